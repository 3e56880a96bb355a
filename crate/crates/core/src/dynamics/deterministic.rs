//! Oscillator state after the qubit is traced out, written directly in terms
//! of the ladder coefficients.

use num_complex::Complex;

use super::{closed_form, MpjcConfig, Preparation};
use crate::error::{Error, Result};
use crate::hilbert::DensityMatrix;
use crate::scalar::Real;

fn hermitian_from_upper<T: Real>(basis: Vec<usize>, upper: &[&[Complex<T>]]) -> Result<DensityMatrix<T>> {
    let d = upper.len();
    let mut data = vec![Complex::new(T::zero(), T::zero()); d * d];
    for (i, row) in upper.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            let j = i + k;
            data[i * d + j] = *v;
            data[j * d + i] = v.conj();
        }
    }
    DensityMatrix::new(basis, data)
}

/// `ρ` on `{n₁−m, n₁, n₁+m}`.
pub fn deterministic_rho_1fock<T: Real>(cfg: &MpjcConfig<T>) -> Result<DensityMatrix<T>> {
    let Preparation::OneFock { n1 } = cfg.preparation else {
        return Err(Error::InvalidParameter("deterministic_rho_1fock needs a single-Fock preparation".into()));
    };
    let c = closed_form(cfg)?;
    let x = c.x();
    let (x1, x2, x3, x4) = (x.c1, x.c2, x.c3, x.c4);
    let zero = Complex::new(T::zero(), T::zero());
    let m = cfg.m;
    hermitian_from_upper(
        vec![n1 - m, n1, n1 + m],
        &[
            &[x4.norm_sqr().into(), x4 * x2.conj(), zero],
            &[(x1.norm_sqr() + x2.norm_sqr()).into(), x1 * x3.conj()],
            &[x3.norm_sqr().into()],
        ],
    )
}

/// `ρ` on `{n₁−m, n₁, n₁+m, n₁+2m}` for `n₂ = n₁ + m`, where the two ladders
/// share the levels `n₁` and `n₁+m`.
pub fn deterministic_rho_2fock<T: Real>(cfg: &MpjcConfig<T>) -> Result<DensityMatrix<T>> {
    let Preparation::TwoFock { n1, n2, .. } = cfg.preparation else {
        return Err(Error::InvalidParameter("deterministic_rho_2fock needs a two-Fock preparation".into()));
    };
    let m = cfg.m;
    if n2 != n1 + m {
        return Err(Error::InvalidParameter(format!(
            "deterministic_rho_2fock requires n2 = n1 + m (got n1 = {n1}, n2 = {n2}, m = {m})"
        )));
    }
    let c = closed_form(cfg)?;
    let (x, y) = (c.x(), c.y().expect("two-Fock coefficients carry a y block"));
    let (x1, x2, x3, x4) = (x.c1, x.c2, x.c3, x.c4);
    let (y1, y2, y3, y4) = (y.c1, y.c2, y.c3, y.c4);
    let e1 = x2 + y4;
    let g2 = x3 + y1;
    let zero = Complex::new(T::zero(), T::zero());
    hermitian_from_upper(
        vec![n1 - m, n1, n1 + m, n1 + 2 * m],
        &[
            &[x4.norm_sqr().into(), x4 * e1.conj(), x4 * y2.conj(), zero],
            &[(e1.norm_sqr() + x1.norm_sqr()).into(), e1 * y2.conj() + x1 * g2.conj(), x1 * y3.conj()],
            &[(y2.norm_sqr() + g2.norm_sqr()).into(), g2 * y3.conj()],
            &[y3.norm_sqr().into()],
        ],
    )
}

/// Dispatches on the preparation.
pub fn deterministic_rho<T: Real>(cfg: &MpjcConfig<T>) -> Result<DensityMatrix<T>> {
    match cfg.preparation {
        Preparation::OneFock { .. } => deterministic_rho_1fock(cfg),
        Preparation::TwoFock { .. } => deterministic_rho_2fock(cfg),
        Preparation::ThreeFock { .. } => {
            Err(Error::InvalidParameter("no deterministic reduced state for three-Fock preparations".into()))
        }
    }
}
