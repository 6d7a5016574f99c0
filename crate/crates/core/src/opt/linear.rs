use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{OptError, Result};

/// Dense system `A x = b` with a known solution, rows stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub solution: Vec<f64>,
}

impl LinearSystem {
    /// Strictly diagonally dominant matrix, so the system is nonsingular
    /// and well conditioned.
    pub fn random<R: Rng>(dim: usize, rng: &mut R) -> Self {
        let mut a = vec![vec![0.0; dim]; dim];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                if i != j {
                    *x = rng.gen_range(-1.0..1.0);
                }
            }
            let off: f64 = row.iter().map(|x: &f64| x.abs()).sum();
            row[i] = off + 1.0;
        }
        let solution: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = a.iter().map(|row| row.iter().zip(&solution).map(|(x, y)| x * y).sum()).collect();
        Self { a, b, solution }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }
}

fn check_dims(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(OptError::DimensionMismatch(format!("A has {} rows, b has {} entries", a.len(), b.len())));
    }
    if let Some((i, row)) = a.iter().enumerate().find(|(_, r)| r.len() != x.len()) {
        return Err(OptError::DimensionMismatch(format!("row {i} has {} columns, x has {} entries", row.len(), x.len())));
    }
    Ok(())
}

/// Relative residual `|A x - b|_2 / |b|_2`.
pub fn linear_residual(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> Result<f64> {
    check_dims(a, b, x)?;
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nb == 0.0 {
        return Err(OptError::ZeroRhs);
    }
    let nr = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let r = row.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() - bi;
            r * r
        })
        .sum::<f64>()
        .sqrt();
    Ok(nr / nb)
}

/// Classical reference solve by LU decomposition.
pub fn solve_linear_system(sys: &LinearSystem) -> Result<Vec<f64>> {
    let n = sys.dim();
    check_dims(&sys.a, &sys.b, &vec![0.0; n])?;
    let m = DMatrix::from_fn(n, n, |i, j| sys.a[i][j]);
    let x = m.lu().solve(&DVector::from_column_slice(&sys.b)).ok_or(OptError::Singular)?;
    Ok(x.iter().copied().collect())
}
