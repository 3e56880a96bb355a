//! Brute-force reference: dense Hamiltonian, Hermitian eigendecomposition,
//! `e^{−iHτ}` applied to the initial state.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use super::{rate_down, rate_up, ClosedFormCoefficients, LadderBlock, MpjcConfig};
use crate::error::{Error, Result};
use crate::hilbert::{JointState, OscillatorState, Qubit};

type C64 = Complex<f64>;

/// `aᵐσ₊ + a†ᵐσ₋` on the `2·dim` qubit⊗Fock space (`g` block first).
#[derive(Debug, Clone, PartialEq)]
pub struct MpjcHamiltonian {
    pub m: usize,
    pub dim: usize,
    pub matrix: DMatrix<C64>,
}

pub fn build_hamiltonian(m: usize, dim: usize) -> Result<MpjcHamiltonian> {
    if m == 0 || dim < m + 1 {
        return Err(Error::InvalidParameter(format!("Hamiltonian needs m >= 1 and dim >= m + 1 (m = {m}, dim = {dim})")));
    }
    let mut h = DMatrix::<C64>::zeros(2 * dim, 2 * dim);
    for n in m..dim {
        let b = C64::new(rate_down::<f64>(n, m), 0.0);
        let (g, e) = (n, dim + n - m);
        h[(e, g)] = b;
        h[(g, e)] = b;
    }
    Ok(MpjcHamiltonian { m, dim, matrix: h })
}

/// `e^{−iHτ}ψ₀`.
pub fn oracle_evolve(h: &MpjcHamiltonian, psi0: &JointState<f64>, tau: f64) -> Result<JointState<f64>> {
    if psi0.dim() != h.dim {
        return Err(Error::DimensionMismatch { expected: h.dim, actual: psi0.dim() });
    }
    let top = (0..h.dim)
        .rev()
        .find(|&n| psi0.get(Qubit::Ground, n).norm() > 0.0 || psi0.get(Qubit::Excited, n).norm() > 0.0);
    if let Some(top) = top {
        if top + h.m >= h.dim {
            return Err(Error::TruncationTooSmall { dim: h.dim, required: top + h.m + 1 });
        }
    }
    let eig = SymmetricEigen::new(h.matrix.clone());
    let v = &eig.eigenvectors;
    let psi = DVector::from_column_slice(psi0.flat());
    let mut coeffs = v.adjoint() * psi;
    for (c, &lambda) in coeffs.iter_mut().zip(eig.eigenvalues.iter()) {
        *c *= C64::from_polar(1.0, -lambda * tau);
    }
    let out = v * coeffs;
    JointState::from_flat(h.dim, out.iter().copied().collect())
}

/// `(cos θ|g⟩ + sin θ|e⟩) ⊗ Σ wᵢ|nᵢ⟩`.
pub fn initial_joint_state(cfg: &MpjcConfig<f64>, dim: usize) -> Result<JointState<f64>> {
    let terms: Vec<(usize, C64)> = cfg.components().into_iter().map(|(n, w)| (n, C64::new(w, 0.0))).collect();
    Ok(JointState::product(cfg.theta, &OscillatorState::from_terms(dim, &terms)?))
}

/// Ladder coefficients read off numerically evolved states, one initial
/// component at a time so that merged ladders stay separable.
pub fn oracle_coefficients(cfg: &MpjcConfig<f64>) -> Result<ClosedFormCoefficients<f64>> {
    cfg.validate()?;
    let dim = cfg.max_reachable() + 1;
    let h = build_hamiltonian(cfg.m, dim)?;
    let mut blocks = Vec::new();
    for (n, w) in cfg.components() {
        let single = MpjcConfig::one_fock(n, cfg.m, cfg.theta, cfg.tau);
        let mut psi0 = initial_joint_state(&single, dim)?;
        psi0 = JointState::from_flat(dim, psi0.flat().iter().map(|a| a * w).collect())?;
        let psi = oracle_evolve(&h, &psi0, cfg.tau)?;
        blocks.push(LadderBlock {
            fock: n,
            m: cfg.m,
            weight: w,
            c1: psi.get(Qubit::Ground, n),
            c2: psi.get(Qubit::Excited, n),
            c3: psi.get(Qubit::Ground, n + cfg.m),
            c4: psi.get(Qubit::Excited, n - cfg.m),
            rate_up: rate_up::<f64>(n, cfg.m),
            rate_down: rate_down::<f64>(n, cfg.m),
        });
    }
    Ok(ClosedFormCoefficients { blocks })
}
