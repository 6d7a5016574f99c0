use super::Compiled;
use crate::opt::problem::Assignment;
use crate::par::Execution;

/// Prefix bits fixed per chunk; chunking is the same for both execution
/// modes so results agree bit for bit.
const CHUNK_BITS: usize = 6;

/// Global minimum by Gray-code enumeration. Ties go to the smallest mask.
pub(super) fn search(c: &Compiled, exec: Execution) -> Assignment {
    let n = c.n;
    let high = CHUNK_BITS.min(n);
    let low = n - high;
    let best = exec.map_range(1usize << high, |prefix| scan(c, low, (prefix as u64) << low))
        .into_iter()
        .fold((f64::INFINITY, u64::MAX), |acc, cand| if better(cand, acc) { cand } else { acc });
    Assignment::from_mask(best.1, n)
}

fn better(a: (f64, u64), b: (f64, u64)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

fn scan(c: &Compiled, low: usize, base: u64) -> (f64, u64) {
    let mut bits: Vec<bool> = (0..c.n).map(|i| base >> i & 1 == 1).collect();
    let mut mask = base;
    let mut e = c.energy(&bits);
    let mut best = (e, mask);
    for k in 1u64..1 << low {
        let i = k.trailing_zeros() as usize;
        e += c.delta(&bits, i);
        bits[i] = !bits[i];
        mask ^= 1 << i;
        if better((e, mask), best) {
            best = (e, mask);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opt::generate::{gen_instance, InstanceSpec};

    #[test]
    fn matches_plain_enumeration() {
        for seed in 0..10 {
            let inst = gen_instance(&InstanceSpec::Hobo { num_vars: 9, degree: 3, num_terms: 15 }, seed).unwrap();
            let p = inst.problem().unwrap();
            let c = Compiled::new(p);
            let best = (0..1u64 << 9).map(|m| p.evaluate(&Assignment::from_mask(m, 9)).unwrap()).fold(f64::INFINITY, f64::min);
            for exec in [Execution::Sequential, Execution::Parallel] {
                let a = search(&c, exec);
                assert!((p.evaluate(&a).unwrap() - best).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tiny_problems() {
        let p = crate::opt::PseudoBooleanProblem::new(
            2,
            [(vec![0], 1.0), (vec![1], -1.0)],
            crate::opt::Sense::Minimize,
            crate::opt::ProblemMeta::new(crate::opt::Family::Custom),
        )
        .unwrap();
        assert_eq!(search(&Compiled::new(&p), Execution::Sequential).to_string(), "01");
    }
}
