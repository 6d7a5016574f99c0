use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Compiled;
use crate::opt::generate::seed_for;
use crate::opt::problem::Assignment;
use crate::par::Execution;

/// Independent restarts of single-flip Metropolis annealing with geometric
/// cooling from `T0 = max |coef|` to `T0 * final_ratio` over `sweeps`
/// sweeps. Returns the best state seen; ties go to the earliest restart.
pub(super) fn anneal(c: &Compiled, sweeps: usize, restarts: usize, final_ratio: f64, seed: u64, exec: Execution) -> Assignment {
    let runs = exec.map_range(restarts, |r| run(c, sweeps, final_ratio, seed_for(seed, r as u64)));
    let (bits, _) = runs.into_iter().fold((Vec::new(), f64::INFINITY), |acc, cand| if cand.1 < acc.1 { cand } else { acc });
    Assignment::new(bits)
}

fn run(c: &Compiled, sweeps: usize, final_ratio: f64, seed: u64) -> (Vec<bool>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bits: Vec<bool> = (0..c.n).map(|_| rng.gen()).collect();
    let mut e = c.energy(&bits);
    let mut best = (bits.clone(), e);
    let t0 = c.max_abs_coefficient();
    if t0 == 0.0 || c.n == 0 {
        return best;
    }
    let alpha = if sweeps > 1 { final_ratio.powf(1.0 / (sweeps - 1) as f64) } else { 1.0 };
    let mut t = t0;
    for _ in 0..sweeps {
        for i in 0..c.n {
            let d = c.delta(&bits, i);
            if d <= 0.0 || rng.gen::<f64>() < (-d / t).exp() {
                bits[i] = !bits[i];
                e += d;
                if e < best.1 {
                    best = (bits.clone(), e);
                }
            }
        }
        t *= alpha;
    }
    // Incremental sums drift; report the exact energy of the kept state.
    let exact = c.energy(&best.0);
    (best.0, exact)
}
