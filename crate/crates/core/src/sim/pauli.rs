use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Result, SimError, MAX_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis in symplectic form: qubit `i` is
/// bit `i` of the basis index, `x` marks X/Y factors and `z` marks Z/Y.
/// Acting on a basis state, `P|b> = i^{|x&z|} (-1)^{|b&z|} |b ^ x>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliString {
    x: u32,
    z: u32,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn new(factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::default();
        for &(q, p) in factors {
            if q >= MAX_QUBITS {
                return Err(SimError::InvalidPauli(format!("qubit {q} out of range")));
            }
            if s.get(q) != Pauli::I {
                return Err(SimError::InvalidPauli(format!("qubit {q} appears twice")));
            }
            let (x, z) = p.bits();
            s.x |= (x as u32) << q;
            s.z |= (z as u32) << q;
        }
        Ok(s)
    }

    pub fn single(q: usize, p: Pauli) -> Self {
        Self::new(&[(q, p)]).expect("valid single-qubit Pauli")
    }

    pub fn pair(a: usize, pa: Pauli, b: usize, pb: Pauli) -> Self {
        Self::new(&[(a, pa), (b, pb)]).expect("valid two-qubit Pauli")
    }

    pub fn get(&self, q: usize) -> Pauli {
        match (self.x >> q & 1, self.z >> q & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    pub fn x_mask(&self) -> usize {
        self.x as usize
    }

    pub fn z_mask(&self) -> usize {
        self.z as usize
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Number of qubits needed to hold the highest non-identity factor.
    pub fn support_len(&self) -> usize {
        32 - (self.x | self.z).leading_zeros() as usize
    }

    /// Number of Y factors, which fixes the global phase `i^{ny}`.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// True when the matrix has only real entries (even number of Y).
    pub fn is_real(&self) -> bool {
        self.y_count().is_multiple_of(2)
    }

    /// `(target, sign)` with `P|b> = i^{ny} * sign * |target>`.
    #[inline]
    pub fn act(&self, b: usize) -> (usize, f64) {
        let sign = if (b & self.z as usize).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        (b ^ self.x as usize, sign)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.weight() == 0 {
            return f.write_str("I");
        }
        for q in 0..self.support_len() {
            let p = self.get(q);
            if p != Pauli::I {
                write!(f, "{}{q}", p.letter())?;
            }
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = SimError;

    /// Accepts labels such as `X0`, `X0Y1`, `Z2 Z3` and `I`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || SimError::InvalidPauli(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "I" {
            return Ok(Self::IDENTITY);
        }
        let mut factors = Vec::new();
        let mut chars = compact.chars().peekable();
        while let Some(c) = chars.next() {
            let p = match c.to_ascii_uppercase() {
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(bad()),
            };
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            factors.push((digits.parse::<usize>().map_err(|_| bad())?, p));
        }
        if factors.is_empty() {
            return Err(bad());
        }
        Self::new(&factors).map_err(|_| bad())
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
