//! Two-step synthesis with `n₂ = n₁ − m`: the excited branch spans `2m`
//! photons while the interaction only exchanges `m`.

use num_complex::Complex;

use super::{closed_form_2fock, rate_down, MpjcConfig, Preparation};
use crate::error::{Error, Result};
use crate::hilbert::OscillatorState;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedMState<T> {
    /// `[n₁−2m, n₁−m, n₁]`
    pub fock: [usize; 3],
    /// Phase-corrected, unnormalized real amplitudes on `fock`.
    pub amplitudes: [T; 3],
    /// Middle amplitude `C = cos θ cos φ sin τ_k + sin θ sin φ cos τ_k`.
    pub c_mid: T,
    /// `τ_k = b_{n₁,m} τ`.
    pub tau_k: T,
}

impl<T: Real> ReducedMState<T> {
    /// Normalized `α|n₁−2m⟩ + β|n₁⟩` when the middle amplitude is within
    /// `tol` of zero relative to the state norm.
    pub fn two_fock_state(&self, tol: T) -> Option<OscillatorState<T>> {
        let [a, c, b] = self.amplitudes;
        let norm = (a * a + c * c + b * b).sqrt();
        if norm == T::zero() || c.abs() > tol * norm {
            return None;
        }
        let pair = (a * a + b * b).sqrt();
        OscillatorState::from_terms(
            self.fock[2] + 1,
            &[(self.fock[0], Complex::new(a / pair, T::zero())), (self.fock[2], Complex::new(b / pair, T::zero()))],
        )
        .ok()
    }
}

/// Excited-branch amplitudes of the `n₂ = n₁ − m` preparation.
pub fn reduced_m_state<T: Real>(cfg: &MpjcConfig<T>) -> Result<ReducedMState<T>> {
    let Preparation::TwoFock { n1, n2, .. } = cfg.preparation else {
        return Err(Error::InvalidParameter("reduced_m_state needs a two-Fock preparation".into()));
    };
    let m = cfg.m;
    if n1 < 2 * m {
        return Err(Error::InvalidParameter(format!("reduced_m_state requires n1 >= 2m (got n1 = {n1}, m = {m})")));
    }
    if n2 + m != n1 {
        return Err(Error::InvalidParameter(format!(
            "reduced_m_state requires n2 = n1 - m (got n1 = {n1}, n2 = {n2}, m = {m})"
        )));
    }
    // Same term-wise correction as the heralded path, but a vanishing branch
    // is a valid (trivial) zero here rather than an error.
    let coeffs = closed_form_2fock(cfg)?;
    let fock = [n1 - 2 * m, n1 - m, n1];
    let mut amplitudes = [T::zero(); 3];
    for b in &coeffs.blocks {
        for (slot, &n) in fock.iter().enumerate() {
            if b.fock == n {
                amplitudes[slot] += b.c2.re;
            }
            if b.fock - m == n {
                amplitudes[slot] += -b.c4.im;
            }
        }
    }
    Ok(ReducedMState { fock, amplitudes, c_mid: amplitudes[1], tau_k: rate_down::<T>(n1, m) * cfg.tau })
}

/// Real rotation `R` with `R·(α, β)/‖(α, β)‖ = (c₀, c₁)/‖(c₀, c₁)‖`.
pub fn corrective_rotation<T: Real>(from: [T; 2], to: [T; 2]) -> [[T; 2]; 2] {
    let delta = to[1].atan2(to[0]) - from[1].atan2(from[0]);
    let (s, c) = delta.sin_cos();
    [[c, -s], [s, c]]
}
