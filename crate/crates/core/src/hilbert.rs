//! Truncated Fock-space and qubit⊗Fock linear algebra.
//!
//! Basis conventions: Fock indices ascend; in the product space the qubit is
//! the major index with `g` before `e`, so the joint amplitude of `|q, n⟩`
//! lives at `q * dim + n`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Absolute elementwise Hermiticity tolerance (1e-12 in double precision).
pub fn hermitian_tolerance<T: Real>() -> T {
    T::epsilon() * T::lit(4500.0)
}

/// Qubit level in the product basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Qubit {
    Ground,
    Excited,
}

impl Qubit {
    pub fn index(self) -> usize {
        match self {
            Qubit::Ground => 0,
            Qubit::Excited => 1,
        }
    }
}

/// Pure oscillator state over the Fock basis `0..dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatorState<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> OscillatorState<T> {
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("state dimension must be positive".into()));
        }
        Ok(Self { amplitudes })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { amplitudes: vec![Complex::new(T::zero(), T::zero()); dim.max(1)] }
    }

    /// Fock state `|n⟩` truncated to `dim` levels.
    pub fn fock(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::TruncationTooSmall { dim, required: n + 1 });
        }
        let mut s = Self::zeros(dim);
        s.amplitudes[n] = Complex::new(T::one(), T::zero());
        Ok(s)
    }

    pub fn from_real(values: &[T]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex::new(v, T::zero())).collect())
    }

    /// Sparse construction from `(fock, amplitude)` pairs; repeated indices add.
    pub fn from_terms(dim: usize, terms: &[(usize, Complex<T>)]) -> Result<Self> {
        let mut s = Self::zeros(dim);
        for &(n, a) in terms {
            if n >= dim {
                return Err(Error::TruncationTooSmall { dim, required: n + 1 });
            }
            s.amplitudes[n] += a;
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, n: usize) -> Complex<T> {
        self.amplitudes.get(n).copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Largest Fock index carrying a nonzero amplitude.
    pub fn max_occupied(&self) -> Option<usize> {
        self.amplitudes.iter().rposition(|a| a.norm_sqr() > T::zero())
    }

    /// Fock indices with nonzero amplitude, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > T::zero())
            .map(|(n, _)| n)
            .collect()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 > T::zero()) {
            return Err(Error::InvalidParameter("cannot normalize the zero vector".into()));
        }
        let inv = T::one() / n2.sqrt();
        Ok(self.scaled(Complex::new(inv, T::zero())))
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self { amplitudes: self.amplitudes.iter().map(|&a| a * factor).collect() }
    }

    /// Same amplitudes in a (possibly larger) truncation.
    pub fn resized(&self, dim: usize) -> Result<Self> {
        if let Some(top) = self.max_occupied() {
            if top >= dim {
                return Err(Error::TruncationTooSmall { dim, required: top + 1 });
            }
        }
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.resize(dim.max(1), Complex::new(T::zero(), T::zero()));
        Ok(Self { amplitudes })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        Ok(Self {
            amplitudes: self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(Complex::new(-T::one(), T::zero())))
    }
}

/// Pure state of the qubit⊗oscillator system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointState<T> {
    dim: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> JointState<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, amplitudes: vec![Complex::new(T::zero(), T::zero()); 2 * dim] }
    }

    /// Flat amplitudes in `q * dim + n` order.
    pub fn from_flat(dim: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.len() != 2 * dim {
            return Err(Error::DimensionMismatch { expected: 2 * dim, actual: amplitudes.len() });
        }
        Ok(Self { dim, amplitudes })
    }

    /// `(cos θ|g⟩ + sin θ|e⟩) ⊗ |oscillator⟩`.
    pub fn product(theta: T, oscillator: &OscillatorState<T>) -> Self {
        let dim = oscillator.dim();
        let mut s = Self::zeros(dim);
        let (st, ct) = theta.sin_cos();
        for (n, &a) in oscillator.amplitudes().iter().enumerate() {
            s.amplitudes[n] = a * ct;
            s.amplitudes[dim + n] = a * st;
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn flat(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn get(&self, q: Qubit, n: usize) -> Complex<T> {
        if n >= self.dim {
            return Complex::new(T::zero(), T::zero());
        }
        self.amplitudes[q.index() * self.dim + n]
    }

    pub fn add_to(&mut self, q: Qubit, n: usize, value: Complex<T>) -> Result<()> {
        if n >= self.dim {
            return Err(Error::TruncationTooSmall { dim: self.dim, required: n + 1 });
        }
        self.amplitudes[q.index() * self.dim + n] += value;
        Ok(())
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Unnormalized oscillator amplitudes conditioned on the qubit level.
    pub fn branch(&self, q: Qubit) -> OscillatorState<T> {
        let start = q.index() * self.dim;
        OscillatorState { amplitudes: self.amplitudes[start..start + self.dim].to_vec() }
    }
}

/// Hermitian matrix over an explicit ascending list of Fock indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix<T> {
    basis: Vec<usize>,
    data: Vec<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    /// Row-major `data` over `basis`; rejects non-Hermitian input.
    pub fn new(basis: Vec<usize>, data: Vec<Complex<T>>) -> Result<Self> {
        let rho = Self::new_unchecked(basis, data)?;
        let dev = rho.hermiticity_deviation();
        if dev > hermitian_tolerance::<T>() {
            return Err(Error::NotHermitian(dev.to_f64_lossy()));
        }
        Ok(rho)
    }

    /// Shape and basis checks only.
    pub fn new_unchecked(basis: Vec<usize>, data: Vec<Complex<T>>) -> Result<Self> {
        let n = basis.len();
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: data.len() });
        }
        if n == 0 || basis.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("sub-basis must be non-empty and strictly ascending".into()));
        }
        Ok(Self { basis, data })
    }

    /// `|ψ⟩⟨ψ|` restricted to `basis`.
    pub fn from_pure_on(state: &OscillatorState<T>, basis: Vec<usize>) -> Result<Self> {
        let amps: Vec<Complex<T>> = basis.iter().map(|&n| state.amplitude(n)).collect();
        let n = basis.len();
        let mut data = Vec::with_capacity(n * n);
        for a in &amps {
            for b in &amps {
                data.push(a * b.conj());
            }
        }
        Self::new_unchecked(basis, data)
    }

    /// `|ψ⟩⟨ψ|` over the support of `state`.
    pub fn from_pure(state: &OscillatorState<T>) -> Result<Self> {
        Self::from_pure_on(state, state.support())
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim() + j]
    }

    /// Element `⟨n|ρ|n'⟩` by Fock index (zero outside the sub-basis).
    pub fn element(&self, n: usize, np: usize) -> Complex<T> {
        match (self.position(n), self.position(np)) {
            (Some(i), Some(j)) => self.get(i, j),
            _ => Complex::new(T::zero(), T::zero()),
        }
    }

    pub fn position(&self, fock: usize) -> Option<usize> {
        self.basis.binary_search(&fock).ok()
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).fold(T::zero(), |acc, i| acc + self.get(i, i).re)
    }

    pub fn purity(&self) -> T {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn hermiticity_deviation(&self) -> T {
        let n = self.dim();
        let mut dev = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    /// Conjugation by the diagonal unitary `diag(e^{iφ_j})`.
    pub fn rotated(&self, phases: &PhaseVector<T>) -> Result<Self> {
        if phases.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: phases.len() });
        }
        let n = self.dim();
        let u: Vec<Complex<T>> = phases.angles().iter().map(|&p| Complex::from_polar(T::one(), p)).collect();
        let mut data = self.data.clone();
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = u[i] * self.data[i * n + j] * u[j].conj();
            }
        }
        Ok(Self { basis: self.basis.clone(), data })
    }

    /// Principal eigenvector by power iteration (ρ is positive semidefinite).
    pub fn dominant_eigenvector(&self) -> Vec<Complex<T>> {
        let n = self.dim();
        let start = (0..n)
            .max_by(|&a, &b| self.get(a, a).re.partial_cmp(&self.get(b, b).re).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(0);
        let mut v: Vec<Complex<T>> = (0..n).map(|i| self.get(i, start)).collect();
        if v.iter().all(|z| z.norm_sqr() == T::zero()) {
            v[start] = Complex::new(T::one(), T::zero());
        }
        let tol = T::epsilon() * T::lit(16.0);
        for _ in 0..500 {
            let norm = v.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
            if !(norm > T::zero()) {
                break;
            }
            for z in v.iter_mut() {
                *z /= norm;
            }
            let w: Vec<Complex<T>> = (0..n)
                .map(|i| (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + self.get(i, j) * v[j]))
                .collect();
            let wn = w.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
            if !(wn > T::zero()) {
                break;
            }
            let delta = w.iter().zip(&v).fold(T::zero(), |a, (x, y)| a + (*x / wn - *y).norm_sqr());
            v = w;
            if delta < tol * tol {
                break;
            }
        }
        let norm = v.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
        v.into_iter().map(|z| z / norm).collect()
    }
}

/// One angle per sub-basis element; the first is pinned to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector<T> {
    angles: Vec<T>,
}

impl<T: Real> PhaseVector<T> {
    /// Shifts to the gauge `angles[0] = 0` and wraps into `[0, 2π)`.
    pub fn new(raw: &[T]) -> Self {
        let two_pi = T::TAU();
        let offset = raw.first().copied().unwrap_or_else(T::zero);
        let angles = raw
            .iter()
            .map(|&a| {
                let mut x = (a - offset) % two_pi;
                if x < T::zero() {
                    x += two_pi;
                }
                if x >= two_pi {
                    x -= two_pi;
                }
                x
            })
            .collect();
        Self { angles }
    }

    pub fn zeros(n: usize) -> Self {
        Self { angles: vec![T::zero(); n] }
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// `|⟨a|b⟩|²`.
pub fn pure_fidelity<T: Real>(a: &OscillatorState<T>, b: &OscillatorState<T>) -> Result<T> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Target amplitudes restricted to the sub-basis of `rho`.
fn target_on_basis<T: Real>(rho: &DensityMatrix<T>, t: &OscillatorState<T>) -> Result<Vec<Complex<T>>> {
    for n in t.support() {
        if rho.position(n).is_none() {
            return Err(Error::SupportMismatch(n));
        }
    }
    Ok(rho.basis().iter().map(|&n| t.amplitude(n)).collect())
}

/// `⟨t|ρ|t⟩`.
pub fn mixed_fidelity<T: Real>(rho: &DensityMatrix<T>, t: &OscillatorState<T>) -> Result<T> {
    let tv = target_on_basis(rho, t)?;
    Ok(quadratic_form(rho, &tv, None))
}

fn quadratic_form<T: Real>(rho: &DensityMatrix<T>, tv: &[Complex<T>], phases: Option<&[T]>) -> T {
    let n = rho.dim();
    let u: Vec<Complex<T>> = match phases {
        Some(p) => p.iter().map(|&a| Complex::from_polar(T::one(), a)).collect(),
        None => vec![Complex::new(T::one(), T::zero()); n],
    };
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        let left = tv[i].conj() * u[i];
        for j in 0..n {
            acc += left * rho.get(i, j) * u[j].conj() * tv[j];
        }
    }
    acc.re
}

/// `max_φ ⟨t|U(φ) ρ U(φ)†|t⟩` over diagonal phase unitaries, with an argmax.
///
/// Rank-one input uses the analytic optimum. Otherwise: start from the
/// alignment of the dominant eigenvector, then cyclic coordinate ascent where
/// each single-phase update is solved exactly, until the gain per sweep drops
/// below 1e-12.
pub fn phase_max_fidelity<T: Real>(rho: &DensityMatrix<T>, t: &OscillatorState<T>) -> Result<(T, PhaseVector<T>)> {
    let dev = rho.hermiticity_deviation();
    if dev > hermitian_tolerance::<T>() {
        return Err(Error::NotHermitian(dev.to_f64_lossy()));
    }
    let tv = target_on_basis(rho, t)?;
    let n = rho.dim();

    let trace = rho.trace();
    let rank_one = trace > T::zero() && (rho.purity() - trace * trace).abs() <= T::epsilon() * T::lit(64.0);
    let v = rho.dominant_eigenvector();
    let mut phases: Vec<T> = (0..n)
        .map(|j| {
            let tj = if tv[j].norm_sqr() > T::zero() { tv[j].arg() } else { T::zero() };
            let vj = if v[j].norm_sqr() > T::zero() { v[j].arg() } else { T::zero() };
            tj - vj
        })
        .collect();

    if rank_one {
        // (Σ |t_j||ψ_j|)² with ψ scaled to carry the trace
        let s = tv.iter().zip(&v).fold(T::zero(), |acc, (a, b)| acc + a.norm() * b.norm());
        return Ok((s * s * trace, PhaseVector::new(&phases)));
    }

    let m: Vec<Complex<T>> = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            tv[i].conj() * rho.get(i, j) * tv[j]
        })
        .collect();
    let eval = |p: &[T]| quadratic_form(rho, &tv, Some(p));
    let mut best = eval(&phases);
    let gain_tol = T::lit(1e-12).max(T::epsilon() * T::lit(8.0));
    for _ in 0..10_000 {
        for j in 0..n {
            let mut b = Complex::new(T::zero(), T::zero());
            for k in 0..n {
                if k != j {
                    b += m[j * n + k] * Complex::from_polar(T::one(), -phases[k]);
                }
            }
            if b.norm_sqr() > T::zero() {
                phases[j] = -b.arg();
            }
        }
        let value = eval(&phases);
        let gain = value - best;
        if value > best {
            best = value;
        }
        if gain <= gain_tol {
            break;
        }
    }
    Ok((best, PhaseVector::new(&phases)))
}

/// Reduced oscillator state `Tr_qubit |ψ⟩⟨ψ|` on an explicit sub-basis.
pub fn partial_trace_qubit_on<T: Real>(psi: &JointState<T>, basis: Vec<usize>) -> Result<DensityMatrix<T>> {
    let n = basis.len();
    let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
    for q in [Qubit::Ground, Qubit::Excited] {
        let amps: Vec<Complex<T>> = basis.iter().map(|&f| psi.get(q, f)).collect();
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] += amps[i] * amps[j].conj();
            }
        }
    }
    DensityMatrix::new_unchecked(basis, data)
}

/// Reduced oscillator state over every Fock index with nonzero population.
pub fn partial_trace_qubit<T: Real>(psi: &JointState<T>) -> Result<DensityMatrix<T>> {
    let basis: Vec<usize> = (0..psi.dim())
        .filter(|&n| psi.get(Qubit::Ground, n).norm_sqr() + psi.get(Qubit::Excited, n).norm_sqr() > T::zero())
        .collect();
    partial_trace_qubit_on(psi, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn cat04() -> OscillatorState<f64> {
        OscillatorState::from_terms(5, &[(0, c(FRAC_1_SQRT_2, 0.0)), (4, c(FRAC_1_SQRT_2, 0.0))]).unwrap()
    }

    #[test]
    fn pure_fidelity_examples() {
        let a = cat04();
        assert_abs_diff_eq!(pure_fidelity(&a, &a).unwrap(), 1.0, epsilon = 1e-15);
        let zero = OscillatorState::<f64>::fock(0, 5).unwrap();
        let four = OscillatorState::<f64>::fock(4, 5).unwrap();
        assert_eq!(pure_fidelity(&zero, &four).unwrap(), 0.0);
        assert_abs_diff_eq!(pure_fidelity(&a, &zero).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn pure_fidelity_rejects_dimension_mismatch() {
        let a = OscillatorState::<f64>::fock(0, 3).unwrap();
        let b = OscillatorState::<f64>::fock(0, 4).unwrap();
        assert!(matches!(pure_fidelity(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn mixed_fidelity_examples() {
        let t = cat04();
        let rho = DensityMatrix::from_pure(&t).unwrap();
        assert_abs_diff_eq!(mixed_fidelity(&rho, &t).unwrap(), 1.0, epsilon = 1e-15);
        let diag = DensityMatrix::new(vec![0, 4], vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert_abs_diff_eq!(mixed_fidelity(&diag, &t).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn mixed_fidelity_support_mismatch() {
        let rho = DensityMatrix::new(vec![0], vec![c(1.0, 0.0)]).unwrap();
        assert_eq!(mixed_fidelity(&rho, &cat04()), Err(Error::SupportMismatch(4)));
    }

    #[test]
    fn phase_max_absorbs_sign_flip() {
        let psi = OscillatorState::from_terms(5, &[(0, c(FRAC_1_SQRT_2, 0.0)), (4, c(-FRAC_1_SQRT_2, 0.0))]).unwrap();
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        let (f, phases) = phase_max_fidelity(&rho, &cat04()).unwrap();
        assert_abs_diff_eq!(f, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(phases.angles()[0], 0.0);
        assert_abs_diff_eq!(phases.angles()[1], PI, epsilon = 1e-12);
    }

    #[test]
    fn phase_max_on_diagonal_matches_plain_overlap() {
        let rho = DensityMatrix::new(vec![0, 4], vec![c(0.3, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.7, 0.0)]).unwrap();
        let t = cat04();
        let (f, _) = phase_max_fidelity(&rho, &t).unwrap();
        assert_abs_diff_eq!(f, mixed_fidelity(&rho, &t).unwrap(), epsilon = 1e-15);
    }

    #[test]
    fn phase_max_rejects_non_hermitian() {
        let rho = DensityMatrix::new_unchecked(vec![0, 4], vec![c(0.5, 0.0), c(0.3, 0.0), c(0.1, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(matches!(phase_max_fidelity(&rho, &cat04()), Err(Error::NotHermitian(_))));
        assert!(DensityMatrix::new(vec![0, 4], rho.data().to_vec()).is_err());
    }

    #[test]
    fn phase_max_general_mixture() {
        // two incoherent pure components with different relative phases
        let a = OscillatorState::from_terms(3, &[(0, c(0.6, 0.0)), (1, c(0.0, 0.8))]).unwrap();
        let b = OscillatorState::from_terms(3, &[(0, c(0.8, 0.0)), (1, c(0.6, 0.0))]).unwrap();
        let ra = DensityMatrix::from_pure(&a).unwrap();
        let rb = DensityMatrix::from_pure(&b).unwrap();
        let data: Vec<_> = ra.data().iter().zip(rb.data()).map(|(x, y)| x * 0.7 + y * 0.3).collect();
        let rho = DensityMatrix::new(vec![0, 1], data).unwrap();
        let t = OscillatorState::from_terms(3, &[(0, c(FRAC_1_SQRT_2, 0.0)), (1, c(FRAC_1_SQRT_2, 0.0))]).unwrap();
        let (f, p) = phase_max_fidelity(&rho, &t).unwrap();
        // brute-force scan over the single relative phase
        let mut brute = 0.0f64;
        for k in 0..200_000 {
            let phi = 2.0 * PI * k as f64 / 200_000.0;
            let rot = rho.rotated(&PhaseVector::new(&[0.0, phi])).unwrap();
            brute = brute.max(mixed_fidelity(&rot, &t).unwrap());
        }
        assert!(f >= brute - 1e-12);
        assert_abs_diff_eq!(f, brute, epsilon = 1e-9);
        let rot = rho.rotated(&p).unwrap();
        assert_abs_diff_eq!(mixed_fidelity(&rot, &t).unwrap(), f, epsilon = 1e-14);
    }

    #[test]
    fn partial_trace_product_state_is_projector() {
        let osc = OscillatorState::<f64>::fock(3, 6).unwrap();
        let psi = JointState::product(0.4, &osc);
        let rho = partial_trace_qubit(&psi).unwrap();
        assert_eq!(rho.basis(), &[3]);
        assert_abs_diff_eq!(rho.get(0, 0).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn partial_trace_maximally_entangled() {
        let mut psi = JointState::<f64>::zeros(2);
        psi.add_to(Qubit::Ground, 0, c(FRAC_1_SQRT_2, 0.0)).unwrap();
        psi.add_to(Qubit::Excited, 1, c(FRAC_1_SQRT_2, 0.0)).unwrap();
        let rho = partial_trace_qubit(&psi).unwrap();
        assert_eq!(rho.basis(), &[0, 1]);
        assert_abs_diff_eq!(rho.get(0, 0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.get(1, 1).re, 0.5, epsilon = 1e-15);
        assert_eq!(rho.get(0, 1), c(0.0, 0.0));
    }

    #[test]
    fn phase_vector_gauge_and_wrap() {
        let p = PhaseVector::new(&[1.0, 0.5, 1.0 + 7.0]);
        assert_eq!(p.angles()[0], 0.0);
        assert!(p.angles().iter().all(|&a| (0.0..2.0 * PI).contains(&a)));
        assert_abs_diff_eq!(p.angles()[1], 2.0 * PI - 0.5, epsilon = 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let a = OscillatorState::<f32>::from_real(&[0.6, 0.0, 0.8]).unwrap();
        let f = pure_fidelity(&a, &a).unwrap();
        assert!((f - 1.0).abs() < 1e-6);
    }
}
