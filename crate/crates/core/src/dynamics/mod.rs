//! Closed-form MPJC evolution and the protocols built on it.
//!
//! The interaction `H = a^m σ₊ + a†^m σ₋` (coupling scaled out, `τ = g t`)
//! only couples `|g, n⟩ ↔ |e, n−m⟩` at rate `b_{n,m}` and `|e, n⟩ ↔ |g, n+m⟩`
//! at rate `a_{n,m}`. Every initial component `|n⟩` of the oscillator
//! therefore evolves inside its own four-state ladder block, and the joint
//! state is the weighted sum of those blocks.

mod deterministic;
mod oracle;
mod postselect;
mod reduced;

pub use deterministic::{deterministic_rho, deterministic_rho_1fock, deterministic_rho_2fock};
pub use oracle::{build_hamiltonian, MpjcHamiltonian, initial_joint_state, oracle_coefficients, oracle_evolve};
pub use postselect::{
    phase_correct, postselect_excited, postselect_excited_phase_corrected, postselect_ground, Heralded,
};
pub use reduced::{corrective_rotation, reduced_m_state, ReducedMState};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{JointState, Qubit};
use crate::scalar::Real;

/// `a_{n,m} = √((n+m)!/n!)`, as a product.
pub fn rate_up<T: Real>(n: usize, m: usize) -> T {
    let p = (1..=m).fold(1.0f64, |acc, j| acc * (n + j) as f64);
    T::lit(p).sqrt()
}

/// `b_{n,m} = √(n!/(n−m)!)`, as a product; zero when `n < m`.
pub fn rate_down<T: Real>(n: usize, m: usize) -> T {
    if n < m {
        return T::zero();
    }
    let p = (0..m).fold(1.0f64, |acc, j| acc * (n - j) as f64);
    T::lit(p).sqrt()
}

/// Initial oscillator preparation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Preparation<T> {
    /// `|n₁⟩`
    OneFock { n1: usize },
    /// `cos φ|n₁⟩ + sin φ|n₂⟩`
    TwoFock { n1: usize, n2: usize, phi: T },
    /// `sin φ₁ cos φ₂|n₁⟩ + sin φ₁ sin φ₂|n₂⟩ + cos φ₁|n₃⟩`
    ThreeFock { n1: usize, n2: usize, n3: usize, phi1: T, phi2: T },
}

/// One point of the protocol parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpjcConfig<T> {
    pub preparation: Preparation<T>,
    /// Photons exchanged per qubit flip.
    pub m: usize,
    pub theta: T,
    /// Scaled interaction time `g t`.
    pub tau: T,
}

impl<T: Real> MpjcConfig<T> {
    pub fn one_fock(n1: usize, m: usize, theta: T, tau: T) -> Self {
        Self { preparation: Preparation::OneFock { n1 }, m, theta, tau }
    }

    pub fn two_fock(n1: usize, n2: usize, m: usize, theta: T, phi: T, tau: T) -> Self {
        Self { preparation: Preparation::TwoFock { n1, n2, phi }, m, theta, tau }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn three_fock(n1: usize, n2: usize, n3: usize, m: usize, theta: T, phi1: T, phi2: T, tau: T) -> Self {
        Self { preparation: Preparation::ThreeFock { n1, n2, n3, phi1, phi2 }, m, theta, tau }
    }

    /// `(Fock index, amplitude)` of each initial oscillator component.
    pub fn components(&self) -> Vec<(usize, T)> {
        match self.preparation {
            Preparation::OneFock { n1 } => vec![(n1, T::one())],
            Preparation::TwoFock { n1, n2, phi } => vec![(n1, phi.cos()), (n2, phi.sin())],
            Preparation::ThreeFock { n1, n2, n3, phi1, phi2 } => vec![
                (n1, phi1.sin() * phi2.cos()),
                (n2, phi1.sin() * phi2.sin()),
                (n3, phi1.cos()),
            ],
        }
    }

    pub fn focks(&self) -> Vec<usize> {
        self.components().into_iter().map(|(n, _)| n).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidParameter("multiphoton order m must be at least 1".into()));
        }
        let focks = self.focks();
        for &n in &focks {
            if n < self.m {
                return Err(Error::InvalidParameter(format!(
                    "Fock index {n} is below the multiphoton order m = {} (requires n >= m)",
                    self.m
                )));
            }
        }
        for (i, a) in focks.iter().enumerate() {
            if focks[i + 1..].contains(a) {
                return Err(Error::InvalidParameter(format!("initial Fock indices must be distinct ({a} repeated)")));
            }
        }
        for v in [self.theta, self.tau] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter("angles and time must be finite".into()));
            }
        }
        Ok(())
    }

    /// Largest Fock index reachable from the initial state.
    pub fn max_reachable(&self) -> usize {
        self.focks().into_iter().max().unwrap_or(0) + self.m
    }
}

/// Evolution of one initial component `w |n⟩` inside its ladder block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderBlock<T> {
    pub fock: usize,
    pub m: usize,
    pub weight: T,
    /// `|g, n⟩`
    pub c1: Complex<T>,
    /// `|e, n⟩`
    pub c2: Complex<T>,
    /// `|g, n+m⟩`
    pub c3: Complex<T>,
    /// `|e, n−m⟩`
    pub c4: Complex<T>,
    /// `a_{n,m}`
    pub rate_up: T,
    /// `b_{n,m}`
    pub rate_down: T,
}

impl<T: Real> LadderBlock<T> {
    pub fn evolve(fock: usize, m: usize, weight: T, theta: T, tau: T) -> Self {
        let a = rate_up::<T>(fock, m);
        let b = rate_down::<T>(fock, m);
        let (st, ct) = theta.sin_cos();
        let (sa, ca) = (a * tau).sin_cos();
        let (sb, cb) = (b * tau).sin_cos();
        let z = T::zero();
        Self {
            fock,
            m,
            weight,
            c1: Complex::new(weight * ct * cb, z),
            c2: Complex::new(weight * st * ca, z),
            c3: Complex::new(z, -(weight * st * sa)),
            c4: Complex::new(z, -(weight * ct * sb)),
            rate_up: a,
            rate_down: b,
        }
    }

    pub fn as_array(&self) -> [Complex<T>; 4] {
        [self.c1, self.c2, self.c3, self.c4]
    }

    /// `(qubit, Fock, amplitude)` for the four basis states of the block.
    pub fn terms(&self) -> [(Qubit, usize, Complex<T>); 4] {
        [
            (Qubit::Ground, self.fock, self.c1),
            (Qubit::Excited, self.fock, self.c2),
            (Qubit::Ground, self.fock + self.m, self.c3),
            (Qubit::Excited, self.fock - self.m, self.c4),
        ]
    }
}

/// Closed-form coefficients: one ladder block per initial Fock component
/// (`x`, then `y`, then `z`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormCoefficients<T> {
    pub blocks: Vec<LadderBlock<T>>,
}

impl<T: Real> ClosedFormCoefficients<T> {
    pub fn x(&self) -> &LadderBlock<T> {
        &self.blocks[0]
    }

    pub fn y(&self) -> Option<&LadderBlock<T>> {
        self.blocks.get(1)
    }

    pub fn z(&self) -> Option<&LadderBlock<T>> {
        self.blocks.get(2)
    }

    /// All coefficients in `x₁..x₄, y₁..y₄, z₁..z₄` order.
    pub fn flat(&self) -> Vec<Complex<T>> {
        self.blocks.iter().flat_map(|b| b.as_array()).collect()
    }

    pub fn norm_sqr(&self) -> T {
        self.flat().iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    pub fn m(&self) -> usize {
        self.blocks[0].m
    }

    /// Largest Fock index any block touches.
    pub fn max_fock(&self) -> usize {
        self.blocks.iter().map(|b| b.fock + b.m).max().unwrap_or(0)
    }

    /// The joint state `|Ψ(τ)⟩` assembled from all blocks.
    pub fn joint_state(&self, dim: usize) -> Result<JointState<T>> {
        let mut psi = JointState::zeros(dim);
        for b in &self.blocks {
            for (q, n, c) in b.terms() {
                psi.add_to(q, n, c)?;
            }
        }
        Ok(psi)
    }
}

fn closed_form_checked<T: Real>(cfg: &MpjcConfig<T>) -> Result<ClosedFormCoefficients<T>> {
    cfg.validate()?;
    let blocks = cfg
        .components()
        .into_iter()
        .map(|(n, w)| LadderBlock::evolve(n, cfg.m, w, cfg.theta, cfg.tau))
        .collect();
    Ok(ClosedFormCoefficients { blocks })
}

/// Coefficients for any preparation.
pub fn closed_form<T: Real>(cfg: &MpjcConfig<T>) -> Result<ClosedFormCoefficients<T>> {
    closed_form_checked(cfg)
}

/// `x₁..x₄` for a single initial Fock state.
pub fn closed_form_1fock<T: Real>(cfg: &MpjcConfig<T>) -> Result<ClosedFormCoefficients<T>> {
    match cfg.preparation {
        Preparation::OneFock { .. } => closed_form_checked(cfg),
        _ => Err(Error::InvalidParameter("closed_form_1fock needs a single-Fock preparation".into())),
    }
}

/// `x` and `y` blocks for a two-Fock initial oscillator.
pub fn closed_form_2fock<T: Real>(cfg: &MpjcConfig<T>) -> Result<ClosedFormCoefficients<T>> {
    match cfg.preparation {
        Preparation::TwoFock { .. } => closed_form_checked(cfg),
        _ => Err(Error::InvalidParameter("closed_form_2fock needs a two-Fock preparation".into())),
    }
}

/// `x`, `y` and `z` blocks for a three-Fock initial oscillator.
pub fn closed_form_3fock<T: Real>(cfg: &MpjcConfig<T>) -> Result<ClosedFormCoefficients<T>> {
    match cfg.preparation {
        Preparation::ThreeFock { .. } => closed_form_checked(cfg),
        _ => Err(Error::InvalidParameter("closed_form_3fock needs a three-Fock preparation".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rates_are_factorial_ratios() {
        assert_abs_diff_eq!(rate_down::<f64>(4, 4), 24f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(rate_up::<f64>(4, 4), 1680f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(rate_down::<f64>(4, 2), 12f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(rate_down::<f64>(6, 3), 120f64.sqrt(), epsilon = 1e-14);
        assert_eq!(rate_down::<f64>(2, 3), 0.0);
        // no overflow where full factorials would
        assert!(rate_up::<f64>(30, 6).is_finite());
    }

    #[test]
    fn identity_at_zero_time() {
        let c = closed_form_1fock(&MpjcConfig::one_fock(4, 4, 0.7f64, 0.0)).unwrap();
        let x = c.x();
        assert_abs_diff_eq!(x.c1.re, 0.7f64.cos());
        assert_abs_diff_eq!(x.c2.re, 0.7f64.sin());
        assert_eq!(x.c3.norm(), 0.0);
        assert_eq!(x.c4.norm(), 0.0);
    }

    #[test]
    fn ground_qubit_sector_decouples() {
        let c = closed_form_1fock(&MpjcConfig::one_fock(5, 2, 0.0f64, 1.3)).unwrap();
        let x = c.x();
        assert_eq!(x.c2.norm(), 0.0);
        assert_eq!(x.c3.norm(), 0.0);
        assert_abs_diff_eq!(x.c1.norm_sqr() + x.c4.norm_sqr(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn near_balanced_point() {
        let c = closed_form_1fock(&MpjcConfig::one_fock(4, 4, 1.432566f64, 0.037699)).unwrap();
        let x = c.x();
        assert_abs_diff_eq!(x.c2.norm(), 0.025353, epsilon = 5e-6);
        assert_abs_diff_eq!(x.c4.norm(), 0.025303, epsilon = 5e-6);
    }

    #[test]
    fn two_fock_reduces_at_phi_zero() {
        let two = closed_form_2fock(&MpjcConfig::two_fock(4, 8, 4, 0.9f64, 0.0, 0.3)).unwrap();
        let one = closed_form_1fock(&MpjcConfig::one_fock(4, 4, 0.9f64, 0.3)).unwrap();
        assert_eq!(two.x(), one.x());
        assert!(two.y().unwrap().as_array().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn two_fock_initial_values() {
        let (t, p) = (0.9f64, 0.7f64);
        let c = closed_form_2fock(&MpjcConfig::two_fock(4, 8, 4, t, p, 0.0)).unwrap();
        let f: Vec<f64> = c.flat().iter().map(|z| z.re).collect();
        let want = [t.cos() * p.cos(), t.sin() * p.cos(), 0.0, 0.0, t.cos() * p.sin(), t.sin() * p.sin(), 0.0, 0.0];
        for (a, b) in f.iter().zip(want) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn three_fock_reduces_at_half_pi() {
        let h = std::f64::consts::FRAC_PI_2;
        let three = closed_form_3fock(&MpjcConfig::three_fock(4, 8, 12, 4, 0.5, h, 1.2, 0.4)).unwrap();
        let two = closed_form_2fock(&MpjcConfig::two_fock(4, 8, 4, 0.5, 1.2, 0.4)).unwrap();
        assert!(three.z().unwrap().as_array().iter().all(|c| c.norm() < 1e-16));
        for (a, b) in three.flat()[..8].iter().zip(two.flat()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn three_fock_initial_support() {
        let c = closed_form_3fock(&MpjcConfig::three_fock(4, 8, 12, 4, 0.5f64, 1.0, 1.2, 0.0)).unwrap();
        for b in &c.blocks {
            assert_eq!(b.c3.norm(), 0.0);
            assert_eq!(b.c4.norm(), 0.0);
            assert!(b.c1.norm() > 0.0 && b.c2.norm() > 0.0);
        }
    }

    #[test]
    fn rejects_invalid_configs() {
        assert!(closed_form_1fock(&MpjcConfig::one_fock(3, 4, 0.1f64, 0.1)).is_err());
        assert!(closed_form_2fock(&MpjcConfig::two_fock(4, 4, 4, 0.1f64, 0.1, 0.1)).is_err());
        assert!(closed_form_1fock(&MpjcConfig::one_fock(3, 0, 0.1f64, 0.1)).is_err());
        assert!(closed_form_1fock(&MpjcConfig::two_fock(4, 8, 4, 0.1f64, 0.1, 0.1)).is_err());
    }

    #[test]
    fn parity_pattern() {
        let c = closed_form_3fock(&MpjcConfig::three_fock(5, 9, 13, 3, 0.3f64, 0.8, 2.1, 1.7)).unwrap();
        for b in &c.blocks {
            assert_eq!(b.c1.im, 0.0);
            assert_eq!(b.c2.im, 0.0);
            assert_eq!(b.c3.re, 0.0);
            assert_eq!(b.c4.re, 0.0);
        }
        assert_abs_diff_eq!(c.norm_sqr(), 1.0, epsilon = 1e-14);
    }
}
