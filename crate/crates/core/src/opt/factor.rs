use serde::{Deserialize, Serialize};

use super::problem::{Assignment, Family, Polynomial, ProblemMeta, PseudoBooleanProblem, Sense};
use super::{OptError, Result};

/// Bit layout of a factorization instance. Variables `0..p1_bits` encode
/// `p1 = 1 + sum_i 2^(i+1) a_i`; the next `p2_bits` encode `p2` likewise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorEncoding {
    pub n: u64,
    pub p1_bits: usize,
    pub p2_bits: usize,
    /// Set when `n` is prime: no assignment reaches cost 0.
    #[serde(default)]
    pub prime: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorDecoding {
    pub p1: u64,
    pub p2: u64,
    pub cost: u128,
}

impl FactorEncoding {
    /// Smallest widths whose odd range reaches `ceil(sqrt n)` for `p1` and
    /// `floor(n / 3)` for `p2`. Both maxima stay below `n`, which keeps the
    /// trivial `1 x n` split unreachable.
    pub fn for_modulus(n: u64) -> Result<Self> {
        if n.is_multiple_of(2) {
            return Err(OptError::InvalidModulus(n, "even moduli are rejected"));
        }
        if n < 9 {
            return Err(OptError::InvalidModulus(n, "modulus must be at least 9"));
        }
        Ok(Self { n, p1_bits: width_for(ceil_sqrt(n)), p2_bits: width_for(n / 3), prime: is_prime(n) })
    }

    pub fn num_vars(&self) -> usize {
        self.p1_bits + self.p2_bits
    }

    /// Bits encoding the pair, or `None` if either factor is even or too wide.
    pub fn encode(&self, p1: u64, p2: u64) -> Option<Assignment> {
        let mut bits = odd_bits(p1, self.p1_bits)?;
        bits.extend(odd_bits(p2, self.p2_bits)?);
        Some(Assignment::new(bits))
    }
}

fn odd_bits(p: u64, width: usize) -> Option<Vec<bool>> {
    if p.is_multiple_of(2) || (p >> 1) >> width != 0 {
        return None;
    }
    Some((0..width).map(|i| (p >> (i + 1)) & 1 == 1).collect())
}

fn width_for(max: u64) -> usize {
    let mut k = 0;
    while (1u64 << (k + 1)) - 1 < max {
        k += 1;
    }
    k
}

fn ceil_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn factor_polynomial(offset: usize, width: usize) -> Polynomial {
    let mut p = Polynomial::constant(1.0);
    for i in 0..width {
        p.add(&Polynomial::var(offset + i).scale((1u64 << (i + 1)) as f64));
    }
    p
}

/// Minimisation problem `(n - p1 p2)^2` over the encoding bits.
pub fn factorization_problem(n: u64) -> Result<PseudoBooleanProblem> {
    let enc = FactorEncoding::for_modulus(n)?;
    let p1 = factor_polynomial(0, enc.p1_bits);
    let p2 = factor_polynomial(enc.p1_bits, enc.p2_bits);
    let mut diff = Polynomial::constant(n as f64);
    diff.add(&p1.mul(&p2).scale(-1.0));
    let cost = diff.mul(&diff);
    let mut meta = ProblemMeta::new(Family::Factorization);
    meta.factorization = Some(enc);
    PseudoBooleanProblem::from_polynomial(enc.num_vars(), cost, Sense::Minimize, meta)
}

pub fn decode_factors(p: &PseudoBooleanProblem, a: &Assignment) -> Result<FactorDecoding> {
    let enc = match (p.family(), p.meta().factorization) {
        (Family::Factorization, Some(enc)) => enc,
        (found, _) => return Err(OptError::FamilyMismatch { expected: Family::Factorization, found }),
    };
    let bits = a.bits();
    let need = enc.num_vars();
    if bits.len() < need {
        return Err(OptError::LengthMismatch { expected: need, found: bits.len() });
    }
    let read = |range: std::ops::Range<usize>| -> u64 {
        1 + range.enumerate().filter(|&(_, v)| bits[v]).map(|(i, _)| 1u64 << (i + 1)).sum::<u64>()
    };
    let p1 = read(0..enc.p1_bits);
    let p2 = read(enc.p1_bits..need);
    let diff = enc.n as i128 - p1 as i128 * p2 as i128;
    Ok(FactorDecoding { p1, p2, cost: (diff * diff) as u128 })
}
