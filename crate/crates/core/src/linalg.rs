//! Thin wrappers over nalgebra for the small dense complex systems used here.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) type CMatrix = DMatrix<Complex64>;
pub(crate) type CVector = DVector<Complex64>;

pub(crate) fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub(crate) fn solve(m: &CMatrix, rhs: &CVector) -> Result<CVector> {
    m.clone()
        .lu()
        .solve(rhs)
        .filter(|x| x.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
        .ok_or_else(|| {
            Error::Singular(format!(
                "{}x{} system has no unique solution",
                m.nrows(),
                m.ncols()
            ))
        })
}

/// Right singular vector of the smallest singular value, unit 2-norm.
pub(crate) fn null_vector(m: &CMatrix) -> Result<CVector> {
    let n = m.ncols();
    if n == 1 {
        return Ok(CVector::from_element(1, Complex64::new(1.0, 0.0)));
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Internal("SVD did not return right singular vectors".into()))?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Internal("empty matrix".into()))?;
    // rows of V^H are conjugated right singular vectors
    Ok(v_t.row(idx).transpose().map(|x| x.conj()))
}

/// Product of row 2-norms; an upper bound on `|det m|` (Hadamard).
pub(crate) fn hadamard_bound(m: &CMatrix) -> f64 {
    m.row_iter().map(|r| r.norm()).product()
}
