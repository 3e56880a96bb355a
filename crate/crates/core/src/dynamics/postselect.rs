use num_complex::Complex;

use super::ClosedFormCoefficients;
use crate::error::{Error, Result};
use crate::hilbert::{OscillatorState, Qubit};
use crate::scalar::Real;

const MIN_PROBABILITY: f64 = 1e-14;
const PHASE_TOL: f64 = 1e-10;

/// Oscillator state left after a qubit measurement, before renormalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Heralded<T> {
    pub state: OscillatorState<T>,
    /// `Σ|amplitude|²` of `state`.
    pub probability: T,
}

impl<T: Real> Heralded<T> {
    pub fn normalized(&self) -> Result<OscillatorState<T>> {
        self.state.normalized()
    }
}

fn collect<T: Real>(
    coeffs: &ClosedFormCoefficients<T>,
    qubit: Qubit,
    lowered_factor: Complex<T>,
) -> Result<Heralded<T>> {
    let mut amps = vec![Complex::new(T::zero(), T::zero()); coeffs.max_fock() + 1];
    for b in &coeffs.blocks {
        for (i, (q, n, c)) in b.terms().into_iter().enumerate() {
            if q == qubit {
                // index 3 is the |e, n−m⟩ term
                amps[n] += if i == 3 { c * lowered_factor } else { c };
            }
        }
    }
    let state = OscillatorState::new(amps)?;
    let probability = state.norm_sqr();
    if probability.to_f64_lossy() < MIN_PROBABILITY {
        return Err(Error::PostselectionImpossible(probability.to_f64_lossy()));
    }
    Ok(Heralded { state, probability })
}

/// Projects the qubit onto `|e⟩`: amplitudes land on `nᵢ` and `nᵢ − m`.
pub fn postselect_excited<T: Real>(coeffs: &ClosedFormCoefficients<T>) -> Result<Heralded<T>> {
    collect(coeffs, Qubit::Excited, Complex::new(T::one(), T::zero()))
}

/// Projects the qubit onto `|g⟩`: amplitudes land on `nᵢ` and `nᵢ + m`.
pub fn postselect_ground<T: Real>(coeffs: &ClosedFormCoefficients<T>) -> Result<Heralded<T>> {
    collect(coeffs, Qubit::Ground, Complex::new(T::one(), T::zero()))
}

/// Excited-branch state with the `−i` of every lowered term removed before
/// the ladders are merged, so the result is real.
///
/// When the ladders of different initial components touch the same Fock
/// index (e.g. `n₂ = n₁ + m`), a real lowered term and a real unlowered term
/// share one amplitude. No diagonal unitary acting on the merged state can
/// then make it real; this term-wise correction is what the fidelity
/// formulas of the scans evaluate. With disjoint supports it agrees with
/// `phase_correct(postselect_excited(..))` up to a global sign.
pub fn postselect_excited_phase_corrected<T: Real>(coeffs: &ClosedFormCoefficients<T>) -> Result<Heralded<T>> {
    collect(coeffs, Qubit::Excited, Complex::new(T::zero(), T::one()))
}

/// Removes `±i` factors amplitude by amplitude and fixes the global sign so
/// the largest-magnitude amplitude is positive.
pub fn phase_correct<T: Real>(state: &OscillatorState<T>) -> Result<OscillatorState<T>> {
    let tol = T::lit(PHASE_TOL);
    let mut out = Vec::with_capacity(state.dim());
    for (n, c) in state.amplitudes().iter().enumerate() {
        let real = if c.im.abs() <= tol {
            c.re
        } else if c.re.abs() <= tol {
            -c.im // i · (i b) = −b
        } else {
            return Err(Error::MixedPhase { fock: n });
        };
        out.push(real);
    }
    let lead = out
        .iter()
        .copied()
        .fold(T::zero(), |best, v| if v.abs() > best.abs() { v } else { best });
    if lead < T::zero() {
        out.iter_mut().for_each(|v| *v = -*v);
    }
    OscillatorState::new(out.into_iter().map(|v| Complex::new(v, T::zero())).collect())
}
