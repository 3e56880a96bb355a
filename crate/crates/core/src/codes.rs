//! Binomial codewords and their primitive-state construction.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::OscillatorState;
use crate::scalar::Real;

/// `(N, S, μ)` label of a binomial codeword `|μ̄⟩_{N,S}`.
///
/// `S + 1` is the Fock spacing and `N + 1` the binomial order. Photon gain is
/// not modelled, so `S` equals the number of correctable losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodewordSpec {
    pub n: u32,
    pub s: u32,
    pub mu: u8,
}

impl CodewordSpec {
    pub fn new(n: u32, s: u32, mu: u8) -> Result<Self> {
        if mu > 1 {
            return Err(Error::InvalidParameter(format!("logical label mu must be 0 or 1, got {mu}")));
        }
        Ok(Self { n, s, mu })
    }

    pub fn spacing(&self) -> usize {
        self.s as usize + 1
    }

    /// Smallest truncation holding every Fock component of the code family.
    pub fn min_dim(&self) -> usize {
        self.spacing() * (self.n as usize + 1) + 1
    }

    /// Fock indices `(S+1)(2k+μ)` carrying amplitude, ascending.
    pub fn support(&self) -> Vec<usize> {
        let top = self.n as usize + 1;
        (self.mu as usize..=top).step_by(2).map(|j| self.spacing() * j).collect()
    }
}

/// Exact `C(n, k)` as an integer.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn sqrt_binomial_weight<T: Real>(n_plus_one: u32, j: u32, n: u32) -> T {
    // binomial in exact integers, converted once before the square root
    let b = binomial(n_plus_one as u64, j as u64) as f64;
    T::lit(b).sqrt() / T::lit(2.0).powi(n as i32).sqrt()
}

fn check_dim(spec_n: u32, s: u32, dim: usize) -> Result<()> {
    let required = (s as usize + 1) * (spec_n as usize + 1) + 1;
    if dim < required {
        return Err(Error::TruncationTooSmall { dim, required });
    }
    Ok(())
}

/// `|μ̄⟩_{N,S} = 2^{-N/2} Σ_k √C(N+1, 2k+μ) |(S+1)(2k+μ)⟩`.
pub fn binomial_codeword<T: Real>(spec: CodewordSpec, dim: usize) -> Result<OscillatorState<T>> {
    check_dim(spec.n, spec.s, dim)?;
    let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
    let top = spec.n + 1;
    let mut j = spec.mu as u32;
    while j <= top {
        amps[spec.spacing() * j as usize] = Complex::new(sqrt_binomial_weight::<T>(top, j, spec.n), T::zero());
        j += 2;
    }
    OscillatorState::new(amps)
}

/// Primitive state `|Θ⟩_{N,S}` and its squared norm (exactly 2).
///
/// Returned unnormalized: both parity projections then carry unit norm.
pub fn primitive_state<T: Real>(n: u32, s: u32, dim: usize) -> Result<(OscillatorState<T>, T)> {
    check_dim(n, s, dim)?;
    let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
    for j in 0..=n + 1 {
        amps[(s as usize + 1) * j as usize] = Complex::new(sqrt_binomial_weight::<T>(n + 1, j, n), T::zero());
    }
    Ok((OscillatorState::new(amps)?, T::lit(2.0)))
}

/// `R(φ) = e^{iφ n̂}` applied to `state`.
pub fn rotate_fock<T: Real>(state: &OscillatorState<T>, angle: T) -> OscillatorState<T> {
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, &a)| {
            let phase = angle * T::from_usize(n).expect("fock index fits scalar");
            a * Complex::from_polar(T::one(), phase)
        })
        .collect();
    OscillatorState::new(amps).expect("rotation preserves dimension")
}

/// Parity rotation `R(π)`, applied as exact signs `(-1)^n`.
pub fn parity<T>(state: &OscillatorState<T>) -> OscillatorState<T>
where
    T: Real,
{
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, &a)| if n % 2 == 1 { -a } else { a })
        .collect();
    OscillatorState::new(amps).expect("parity preserves dimension")
}

/// Normalized `(Θ + R(π)Θ, Θ − R(π)Θ)` projections of the primitive state.
///
/// Returns `(|0̄⟩, |1̄⟩)`. `R(π)` acts on the grid index `m` of the primitive
/// state through `(S+1)m`; for even `S+1` every component would be
/// parity-even, so the rotation is taken on `n̂ / (S+1)`, which is what makes
/// the projection select even and odd `m` for every spacing.
pub fn extract_codewords_from_primitive<T: Real>(
    n: u32,
    s: u32,
    dim: usize,
) -> Result<(OscillatorState<T>, OscillatorState<T>)> {
    let (theta, _) = primitive_state::<T>(n, s, dim)?;
    let spacing = s as usize + 1;
    let rotated = if spacing % 2 == 1 {
        parity(&theta)
    } else {
        grid_parity(&theta, spacing)
    };
    let even = theta.add(&rotated)?.normalized()?;
    let odd = theta.sub(&rotated)?.normalized()?;
    Ok((even, odd))
}

/// `(-1)^{n/(S+1)}` on the lattice `n ≡ 0 mod (S+1)`, identity elsewhere.
fn grid_parity<T: Real>(state: &OscillatorState<T>, spacing: usize) -> OscillatorState<T> {
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, &a)| if n % spacing == 0 && (n / spacing) % 2 == 1 { -a } else { a })
        .collect();
    OscillatorState::new(amps).expect("same dimension")
}

/// `(fock, numerator, denominator)` of one printed amplitude `√(num / den)`.
pub type PrintedTerm = (usize, u32, u32);

/// The explicitly listed low-order codewords, as `(spec, [(fock, numerator², denominator²)])`.
///
/// Amplitude of each Fock component is `√(num / den)`.
pub fn printed_catalog() -> Vec<(CodewordSpec, Vec<PrintedTerm>)> {
    let spec = |n, s, mu| CodewordSpec { n, s, mu };
    vec![
        (spec(1, 1, 0), vec![(0, 1, 2), (4, 1, 2)]),
        (spec(1, 1, 1), vec![(2, 1, 1)]),
        (spec(2, 1, 0), vec![(0, 1, 4), (4, 3, 4)]),
        (spec(2, 1, 1), vec![(2, 3, 4), (6, 1, 4)]),
        (spec(3, 1, 0), vec![(0, 1, 8), (4, 6, 8), (8, 1, 8)]),
        (spec(3, 1, 1), vec![(2, 1, 2), (6, 1, 2)]),
        (spec(4, 1, 0), vec![(0, 1, 16), (4, 10, 16), (8, 5, 16)]),
        (spec(4, 1, 1), vec![(2, 5, 16), (6, 10, 16), (10, 1, 16)]),
        (spec(5, 1, 0), vec![(0, 1, 32), (4, 15, 32), (8, 15, 32), (12, 1, 32)]),
        (spec(5, 1, 1), vec![(2, 6, 32), (6, 20, 32), (10, 6, 32)]),
        (spec(2, 2, 0), vec![(0, 1, 4), (6, 3, 4)]),
        (spec(2, 2, 1), vec![(3, 3, 4), (9, 1, 4)]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn amps(s: &OscillatorState<f64>) -> Vec<f64> {
        s.amplitudes().iter().map(|a| a.re).collect()
    }

    #[test]
    fn simplest_codeword() {
        let s = binomial_codeword::<f64>(CodewordSpec::new(1, 1, 0).unwrap(), 5).unwrap();
        let a = amps(&s);
        assert_abs_diff_eq!(a[0], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(a[4], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(s.support(), vec![0, 4]);
    }

    #[test]
    fn two_loss_odd_codeword() {
        let s = binomial_codeword::<f64>(CodewordSpec::new(2, 2, 1).unwrap(), 10).unwrap();
        assert_abs_diff_eq!(s.amplitude(3).re, 3f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitude(9).re, 0.5, epsilon = 1e-15);
        assert_eq!(s.support(), vec![3, 9]);
    }

    #[test]
    fn three_component_codeword() {
        let s = binomial_codeword::<f64>(CodewordSpec::new(3, 1, 0).unwrap(), 9).unwrap();
        let d = 2.0 * 2f64.sqrt();
        assert_abs_diff_eq!(s.amplitude(0).re, 1.0 / d, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitude(4).re, 6f64.sqrt() / d, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitude(8).re, 1.0 / d, epsilon = 1e-15);
    }

    #[test]
    fn truncation_error_names_minimum() {
        let err = binomial_codeword::<f64>(CodewordSpec::new(2, 2, 1).unwrap(), 9).unwrap_err();
        assert_eq!(err, Error::TruncationTooSmall { dim: 9, required: 10 });
        assert!(CodewordSpec::new(1, 1, 2).is_err());
    }

    #[test]
    fn primitive_examples() {
        let (p, n2) = primitive_state::<f64>(2, 2, 10).unwrap();
        assert_eq!(n2, 2.0);
        let r3 = 3f64.sqrt() / 2.0;
        for (n, v) in [(0, 0.5), (3, r3), (6, r3), (9, 0.5)] {
            assert_abs_diff_eq!(p.amplitude(n).re, v, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(p.norm_sqr(), 2.0, epsilon = 1e-14);

        let (p, _) = primitive_state::<f64>(1, 1, 5).unwrap();
        assert_abs_diff_eq!(p.amplitude(0).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(p.amplitude(2).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.amplitude(4).re, FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn rotation_examples() {
        let (p, _) = primitive_state::<f64>(2, 2, 10).unwrap();
        assert_eq!(rotate_fock(&p, 0.0), p);
        let r = rotate_fock(&p, PI);
        let r3 = 3f64.sqrt() / 2.0;
        for (n, v) in [(0, 0.5), (3, -r3), (6, r3), (9, -0.5)] {
            assert_abs_diff_eq!(r.amplitude(n).re, v, epsilon = 1e-14);
            assert_abs_diff_eq!(r.amplitude(n).im, 0.0, epsilon = 1e-14);
        }
        let full = rotate_fock(&p, 2.0 * PI);
        for (a, b) in full.amplitudes().iter().zip(p.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(r.norm_sqr(), p.norm_sqr(), epsilon = 1e-14);
    }

    #[test]
    fn extraction_examples() {
        let (z, o) = extract_codewords_from_primitive::<f64>(2, 2, 10).unwrap();
        assert_abs_diff_eq!(z.amplitude(0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(z.amplitude(6).re, 3f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(o.amplitude(3).re, 3f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(o.amplitude(9).re, 0.5, epsilon = 1e-15);

        let (z, o) = extract_codewords_from_primitive::<f64>(1, 1, 5).unwrap();
        let expected = binomial_codeword::<f64>(CodewordSpec::new(1, 1, 0).unwrap(), 5).unwrap();
        for (a, b) in z.amplitudes().iter().zip(expected.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(o.amplitude(2).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.inner(&o).unwrap().norm(), 0.0);
    }

    #[test]
    fn binomial_exact() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(60, 30), 118264581564861424);
        assert_eq!(binomial(3, 5), 0);
    }
}
