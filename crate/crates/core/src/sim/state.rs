use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{Result, SimError, MAX_DENSE_QUBITS, MAX_QUBITS, STATE_TOLERANCE};

pub type C64 = Complex<f64>;

fn qubits_for(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(SimError::DimensionMismatch(format!("length {len} is not 2^n for n >= 1")));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(SimError::TooManyQubits { found: n, max: MAX_QUBITS });
    }
    Ok(n)
}

fn check_qubits(n: usize, max: usize) -> Result<()> {
    if n == 0 {
        return Err(SimError::DimensionMismatch("a register needs at least one qubit".into()));
    }
    if n > max {
        return Err(SimError::TooManyQubits { found: n, max });
    }
    Ok(())
}

/// Normalised state vector over `n` qubits; qubit `i` is bit `i` of the
/// basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n: usize,
    amps: Vec<C64>,
}

impl QuantumState {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n = qubits_for(amps.len())?;
        let s = Self { n, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > STATE_TOLERANCE {
            return Err(SimError::NotNormalized(norm));
        }
        Ok(s)
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let n = qubits_for(amps.len())?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(SimError::NotNormalized(norm));
        }
        Ok(Self { n, amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits(n, MAX_QUBITS)?;
        if index >> n != 0 {
            return Err(SimError::DimensionMismatch(format!("basis index {index} out of range for {n} qubits")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Product state from a bit string whose character `i` is qubit `i`.
    pub fn product(bits: &str) -> Result<Self> {
        let mut index = 0;
        for (i, c) in bits.chars().enumerate() {
            match c {
                '0' => {}
                '1' => index |= 1 << i,
                _ => return Err(SimError::DimensionMismatch(format!("invalid bit `{c}` in `{bits}`"))),
            }
        }
        Self::basis(bits.chars().count(), index)
    }

    /// Haar-like random state from independent complex Gaussians.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Result<Self> {
        check_qubits(n, MAX_QUBITS)?;
        let amps = (0..1usize << n).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        Self::normalized(amps)
    }

    pub(crate) fn from_raw(n: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n);
        Self { n, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &QuantumState) -> Result<C64> {
        if self.n != other.n {
            return Err(SimError::DimensionMismatch(format!("{} vs {} qubits", self.n, other.n)));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Euclidean distance between amplitude vectors (phase sensitive).
    pub fn distance(&self, other: &QuantumState) -> Result<f64> {
        if self.n != other.n {
            return Err(SimError::DimensionMismatch(format!("{} vs {} qubits", self.n, other.n)));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
    }
}

/// Mixed state as a dense `2^n x 2^n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    rho: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positive semidefiniteness.
    pub fn from_matrix(rho: DMatrix<C64>) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(SimError::InvalidDensityMatrix(format!("{}x{} is not square", rho.nrows(), rho.ncols())));
        }
        let n = qubits_for(rho.nrows())?;
        check_qubits(n, MAX_DENSE_QUBITS)?;
        let dim = rho.nrows();
        for i in 0..dim {
            for j in i..dim {
                if (rho[(i, j)] - rho[(j, i)].conj()).norm() > STATE_TOLERANCE {
                    return Err(SimError::InvalidDensityMatrix(format!("not Hermitian at ({i}, {j})")));
                }
            }
        }
        let trace = rho.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > STATE_TOLERANCE {
            return Err(SimError::InvalidDensityMatrix(format!("trace {trace} differs from 1")));
        }
        let min = rho.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -STATE_TOLERANCE {
            return Err(SimError::InvalidDensityMatrix(format!("negative eigenvalue {min}")));
        }
        Ok(Self { n, rho })
    }

    pub fn pure(psi: &QuantumState) -> Result<Self> {
        check_qubits(psi.n, MAX_DENSE_QUBITS)?;
        let v = nalgebra::DVector::from_column_slice(&psi.amps);
        Ok(Self { n: psi.n, rho: &v * v.adjoint() })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubits(n, MAX_DENSE_QUBITS)?;
        let d = 1usize << n;
        Ok(Self { n, rho: DMatrix::from_diagonal_element(d, d, C64::new(1.0 / d as f64, 0.0)) })
    }

    /// `(1 - p) |psi><psi| + p I / 2^n`.
    pub fn depolarized(psi: &QuantumState, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(SimError::InvalidDensityMatrix(format!("depolarizing probability {p} outside [0, 1]")));
        }
        let pure = Self::pure(psi)?;
        let mixed = Self::maximally_mixed(psi.n)?;
        Ok(Self { n: psi.n, rho: pure.rho * C64::new(1.0 - p, 0.0) + mixed.rho * C64::new(p, 0.0) })
    }

    /// Convex combination of pure states.
    pub fn mixture(parts: &[(f64, QuantumState)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| SimError::InvalidDensityMatrix("empty mixture".into()))?;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| w.is_nan() || *w < 0.0) || (total - 1.0).abs() > STATE_TOLERANCE {
            return Err(SimError::InvalidDensityMatrix("mixture weights must be nonnegative and sum to 1".into()));
        }
        let mut rho = DMatrix::zeros(first.1.dim(), first.1.dim());
        for (w, psi) in parts {
            if psi.n != first.1.n {
                return Err(SimError::DimensionMismatch("mixture components differ in size".into()));
            }
            rho += Self::pure(psi)?.rho * C64::new(*w, 0.0);
        }
        Ok(Self { n: first.1.n, rho })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.rho
    }
}
