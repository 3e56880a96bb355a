//! Lindblad evolution of the qubit⊗oscillator system and fidelity-versus-rate
//! sweeps.
//!
//! Joint operators act on the `2·dim` product basis with the ground block
//! first (index `q·dim + n`), the same layout as [`build_hamiltonian`]. The
//! joint density matrix is a dense `nalgebra` matrix; Hamiltonian and collapse
//! operators are stored as sparse real triplets.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::codes::{binomial_codeword, CodewordSpec};
use crate::dynamics::{build_hamiltonian, initial_joint_state, MpjcConfig};
use crate::error::{Error, Result};
use crate::hilbert::{phase_max_fidelity, DensityMatrix, OscillatorState};
use crate::scan::{par_map_ordered, GridSpec};

type C64 = Complex<f64>;

/// Integration error above which [`evolve_master`] gives up.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Default number of RK4 steps per integration.
pub const DEFAULT_STEPS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Oscillator,
    Qubit,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    Dissipation,
    Dephasing,
    Both,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Oscillator, Scenario::Qubit, Scenario::Both];

    fn oscillator(self) -> bool {
        matches!(self, Scenario::Oscillator | Scenario::Both)
    }

    fn qubit(self) -> bool {
        matches!(self, Scenario::Qubit | Scenario::Both)
    }
}

impl ChannelMode {
    pub const ALL: [ChannelMode; 3] = [ChannelMode::Dissipation, ChannelMode::Dephasing, ChannelMode::Both];

    fn dissipation(self) -> bool {
        matches!(self, ChannelMode::Dissipation | ChannelMode::Both)
    }

    fn dephasing(self) -> bool {
        matches!(self, ChannelMode::Dephasing | ChannelMode::Both)
    }
}

/// Decoherence rates in units of the coupling, plus the thermal occupation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladConfig {
    #[serde(default)]
    pub os_relax: f64,
    #[serde(default)]
    pub os_absorb: f64,
    #[serde(default)]
    pub os_dephase: f64,
    #[serde(default)]
    pub qb_relax: f64,
    #[serde(default)]
    pub qb_absorb: f64,
    #[serde(default)]
    pub qb_dephase: f64,
    #[serde(default)]
    pub n_th: f64,
    pub scenario: Scenario,
    pub channels: ChannelMode,
}

impl LindbladConfig {
    /// Every rate set to `rate`; the scenario and channel mode pick which apply.
    pub fn uniform(scenario: Scenario, channels: ChannelMode, n_th: f64, rate: f64) -> Self {
        Self {
            os_relax: rate,
            os_absorb: rate,
            os_dephase: rate,
            qb_relax: rate,
            qb_absorb: rate,
            qb_dephase: rate,
            n_th,
            scenario,
            channels,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [self.os_relax, self.os_absorb, self.os_dephase, self.qb_relax, self.qb_absorb, self.qb_dephase, self.n_th];
        if rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidParameter("rates and n_th must be finite and non-negative".into()));
        }
        if self.os_relax != self.os_absorb || self.qb_relax != self.qb_absorb {
            return Err(Error::InvalidParameter("relaxation and absorption rates must be equal per subsystem".into()));
        }
        Ok(())
    }
}

/// Real sparse operator on the joint space, as `(row, col, value)` triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    pub size: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseOp {
    pub fn from_dense_real(m: &DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), actual: m.ncols() });
        }
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v.im != 0.0 {
                    return Err(Error::InvalidParameter("operator must be real".into()));
                }
                if v.re != 0.0 {
                    entries.push((i, j, v.re));
                }
            }
        }
        entries.sort_by_key(|&(i, j, _)| (i, j));
        Ok(Self { size: m.nrows(), entries })
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.size, self.size);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += C64::new(v, 0.0);
        }
        m
    }

    fn scaled(mut self, factor: f64) -> Self {
        for e in &mut self.entries {
            e.2 *= factor;
        }
        self
    }

    /// `L†L`.
    fn dagger_product(&self) -> Vec<(usize, usize, f64)> {
        let mut acc = std::collections::BTreeMap::new();
        for &(k, i, a) in &self.entries {
            for &(k2, j, b) in &self.entries {
                if k == k2 {
                    *acc.entry((i, j)).or_insert(0.0) += a * b;
                }
            }
        }
        acc.into_iter().filter(|(_, v)| *v != 0.0).map(|((i, j), v)| (i, j, v)).collect()
    }
}

fn op_from(dim: usize, f: impl Fn(usize, usize) -> Option<(usize, usize, f64)>) -> SparseOp {
    let mut entries = Vec::new();
    for q in 0..2 {
        for n in 0..dim {
            if let Some((r, c, v)) = f(q, n) {
                entries.push((r, c, v));
            }
        }
    }
    entries.sort_by_key(|&(i, j, _)| (i, j));
    SparseOp { size: 2 * dim, entries }
}

/// `a ⊗ 1`.
pub fn annihilation(dim: usize) -> SparseOp {
    op_from(dim, |q, n| (n > 0).then(|| (q * dim + n - 1, q * dim + n, (n as f64).sqrt())))
}

/// `a† ⊗ 1`, truncated at `dim − 1`.
pub fn creation(dim: usize) -> SparseOp {
    op_from(dim, |q, n| (n + 1 < dim).then(|| (q * dim + n + 1, q * dim + n, ((n + 1) as f64).sqrt())))
}

/// `a†a ⊗ 1`.
pub fn number(dim: usize) -> SparseOp {
    op_from(dim, |q, n| (n > 0).then(|| (q * dim + n, q * dim + n, n as f64)))
}

/// `1 ⊗ |g⟩⟨e|`.
pub fn sigma_minus(dim: usize) -> SparseOp {
    op_from(dim, |q, n| (q == 0).then(|| (n, dim + n, 1.0)))
}

/// `1 ⊗ |e⟩⟨g|`.
pub fn sigma_plus(dim: usize) -> SparseOp {
    op_from(dim, |q, n| (q == 0).then(|| (dim + n, n, 1.0)))
}

/// `1 ⊗ (|e⟩⟨e| − |g⟩⟨g|)`.
pub fn sigma_z(dim: usize) -> SparseOp {
    op_from(dim, |q, n| Some((q * dim + n, q * dim + n, if q == 1 { 1.0 } else { -1.0 })))
}

/// Collapse operators selected by scenario and channel mode, zero-rate ones
/// omitted.
pub fn build_collapse_ops(cfg: &LindbladConfig, dim: usize) -> Result<Vec<SparseOp>> {
    cfg.validate()?;
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("oscillator dimension must be at least 2, got {dim}")));
    }
    let n = cfg.n_th;
    let mut ops = Vec::new();
    let mut push = |rate: f64, op: SparseOp| {
        if rate > 0.0 {
            ops.push(op.scaled(rate.sqrt()));
        }
    };
    if cfg.scenario.oscillator() {
        if cfg.channels.dissipation() {
            push(cfg.os_relax * (1.0 + n), annihilation(dim));
            push(cfg.os_absorb * n, creation(dim));
        }
        if cfg.channels.dephasing() {
            push(cfg.os_dephase, number(dim));
        }
    }
    if cfg.scenario.qubit() {
        if cfg.channels.dissipation() {
            push(cfg.qb_relax * (1.0 + n), sigma_minus(dim));
            push(cfg.qb_absorb * n, sigma_plus(dim));
        }
        if cfg.channels.dephasing() {
            push(cfg.qb_dephase, sigma_z(dim));
        }
    }
    Ok(ops)
}

/// Precomputed right-hand side `Gρ + ρG† + Σ LρL†` with `G = −iH − ½Σ L†L`.
struct Generator {
    size: usize,
    g: Vec<(usize, usize, C64)>,
    ls: Vec<Vec<(usize, usize, f64)>>,
}

impl Generator {
    fn new(h: &SparseOp, ls: &[SparseOp]) -> Result<Self> {
        let size = h.size;
        if let Some(l) = ls.iter().find(|l| l.size != size) {
            return Err(Error::DimensionMismatch { expected: size, actual: l.size });
        }
        let mut acc = std::collections::BTreeMap::<(usize, usize), C64>::new();
        for &(i, j, v) in &h.entries {
            *acc.entry((i, j)).or_default() += C64::new(0.0, -v);
        }
        for l in ls {
            for (i, j, v) in l.dagger_product() {
                *acc.entry((i, j)).or_default() += C64::new(-0.5 * v, 0.0);
            }
        }
        let g = acc.into_iter().filter(|(_, v)| v.norm_sqr() > 0.0).map(|((i, j), v)| (i, j, v)).collect();
        Ok(Self { size, g, ls: ls.iter().map(|l| l.entries.clone()).collect() })
    }

    fn apply(&self, rho: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let n = self.size;
        out.fill(C64::new(0.0, 0.0));
        for &(i, k, g) in &self.g {
            for j in 0..n {
                out[(i, j)] += g * rho[(k, j)];
            }
        }
        // ρG† = (Gρ)† since ρ is Hermitian
        for i in 0..n {
            for j in i..n {
                let s = out[(i, j)] + out[(j, i)].conj();
                out[(i, j)] = s;
                out[(j, i)] = s.conj();
            }
        }
        for l in &self.ls {
            for &(i, k, a) in l {
                for &(j, p, b) in l {
                    out[(i, j)] += rho[(k, p)] * (a * b);
                }
            }
        }
    }
}

fn check_square(rho: &DMatrix<C64>, size: usize) -> Result<()> {
    if rho.nrows() != size || rho.ncols() != size {
        return Err(Error::DimensionMismatch { expected: size, actual: rho.nrows().max(rho.ncols()) });
    }
    Ok(())
}

/// `−i[H, ρ] + Σ (LρL† − ½{L†L, ρ})` for Hermitian `ρ`.
pub fn lindblad_rhs(rho: &DMatrix<C64>, h: &SparseOp, ls: &[SparseOp]) -> Result<DMatrix<C64>> {
    check_square(rho, h.size)?;
    let gen = Generator::new(h, ls)?;
    let mut out = DMatrix::zeros(h.size, h.size);
    gen.apply(rho, &mut out);
    Ok(out)
}

fn add_scaled(dst: &mut DMatrix<C64>, src: &DMatrix<C64>, s: f64) {
    dst.zip_apply(src, |a, b| *a += b * s);
}

/// Fixed-step RK4 from 0 to `tau`; the last step is shortened to land on
/// `tau`. The result is re-Hermitized once at the end.
pub fn evolve_master(rho0: &DMatrix<C64>, h: &SparseOp, ls: &[SparseOp], tau: f64, dt: f64) -> Result<DMatrix<C64>> {
    if !(dt > 0.0) || !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("need dt > 0 and tau >= 0 (dt = {dt}, tau = {tau})")));
    }
    check_square(rho0, h.size)?;
    let gen = Generator::new(h, ls)?;
    let n = h.size;
    let mut rho = rho0.clone();
    let (mut k1, mut k2, mut k3, mut k4) =
        (DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n));
    let mut tmp = DMatrix::zeros(n, n);
    let full = (tau / dt).floor() as usize;
    let rest = tau - full as f64 * dt;
    let mut steps = vec![dt; full];
    if rest > tau * 1e-12 {
        steps.push(rest);
    }
    for h_step in steps {
        gen.apply(&rho, &mut k1);
        tmp.copy_from(&rho);
        add_scaled(&mut tmp, &k1, 0.5 * h_step);
        gen.apply(&tmp, &mut k2);
        tmp.copy_from(&rho);
        add_scaled(&mut tmp, &k2, 0.5 * h_step);
        gen.apply(&tmp, &mut k3);
        tmp.copy_from(&rho);
        add_scaled(&mut tmp, &k3, h_step);
        gen.apply(&tmp, &mut k4);
        let w = h_step / 6.0;
        add_scaled(&mut rho, &k1, w);
        add_scaled(&mut rho, &k2, 2.0 * w);
        add_scaled(&mut rho, &k3, 2.0 * w);
        add_scaled(&mut rho, &k4, w);
    }
    let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let drift = (rho.trace() - rho0.trace()).norm();
    if drift > TRACE_DRIFT_LIMIT {
        return Err(Error::TraceDrift(drift));
    }
    Ok(rho)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(rho: &DMatrix<C64>) -> f64 {
    SymmetricEigen::new(rho.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// How the final joint state is turned into an oscillator fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    /// Excited-qubit block, renormalized, with the phase `i` restored on the
    /// lowered levels `nⱼ − m`.
    Postselected,
    /// Qubit traced out, fidelity maximized over diagonal phases.
    Unconditioned,
}

/// Preparation, interaction time and target for one open-system run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolPoint {
    pub config: MpjcConfig<f64>,
    pub target: OscillatorState<f64>,
}

impl ProtocolPoint {
    /// `|0̄⟩₁,₁` from `|4⟩` with `m = 4` at grid point `(τ, θ) = (6, 228)`.
    pub fn reference() -> Self {
        let tau = GridSpec { start: 0.0, end: std::f64::consts::TAU, count: 1001 }.value(6);
        let theta = GridSpec { start: 0.0, end: std::f64::consts::PI, count: 501 }.value(228);
        let spec = CodewordSpec::new(1, 1, 0).expect("valid codeword");
        let target = binomial_codeword(spec, spec.min_dim()).expect("valid codeword");
        Self { config: MpjcConfig::one_fock(4, 4, theta, tau), target }
    }

    /// Truncation: every level reachable by the ideal dynamics plus `m` of
    /// headroom for thermal excitation.
    pub fn dim(&self) -> usize {
        (self.config.max_reachable() + self.config.m + 1).max(self.target.dim())
    }

    fn lowered_levels(&self) -> Vec<usize> {
        let focks = self.config.focks();
        focks
            .iter()
            .filter(|&&n| n >= self.config.m)
            .map(|&n| n - self.config.m)
            .filter(|l| !focks.contains(l))
            .collect()
    }

    pub fn initial_rho(&self) -> Result<DMatrix<C64>> {
        let psi = initial_joint_state(&self.config, self.dim())?;
        let v = nalgebra::DVector::from_column_slice(psi.flat());
        Ok(&v * v.adjoint())
    }

    pub fn hamiltonian(&self) -> Result<SparseOp> {
        SparseOp::from_dense_real(&build_hamiltonian(self.config.m, self.dim())?.matrix)
    }

    /// Fidelity of the final joint state `rho` under `readout`.
    pub fn fidelity(&self, rho: &DMatrix<C64>, readout: Readout) -> Result<f64> {
        let d = self.dim();
        check_square(rho, 2 * d)?;
        let support = self.target.support();
        let t: Vec<C64> = support.iter().map(|&n| self.target.amplitude(n)).collect();
        match readout {
            Readout::Postselected => {
                let p: f64 = (0..d).map(|n| rho[(d + n, d + n)].re).sum();
                if p < 1e-14 {
                    return Err(Error::PostselectionImpossible(p));
                }
                let lowered = self.lowered_levels();
                let u = |n: usize| if lowered.contains(&n) { C64::new(0.0, 1.0) } else { C64::new(1.0, 0.0) };
                let mut f = C64::new(0.0, 0.0);
                for (a, &i) in support.iter().enumerate() {
                    for (b, &j) in support.iter().enumerate() {
                        f += t[a].conj() * u(i) * rho[(d + i, d + j)] * u(j).conj() * t[b];
                    }
                }
                Ok(f.re / p)
            }
            Readout::Unconditioned => {
                let k = support.len();
                let mut data = Vec::with_capacity(k * k);
                for &i in &support {
                    for &j in &support {
                        data.push(rho[(i, j)] + rho[(d + i, d + j)]);
                    }
                }
                let reduced = DensityMatrix::new(support, data)?;
                Ok(phase_max_fidelity(&reduced, &self.target)?.0)
            }
        }
    }

    /// Integrates with `steps` RK4 steps and reads out the fidelity.
    pub fn run(&self, cfg: &LindbladConfig, readout: Readout, steps: usize) -> Result<f64> {
        let dim = self.dim();
        let ls = build_collapse_ops(cfg, dim)?;
        let tau = self.config.tau;
        let rho = evolve_master(&self.initial_rho()?, &self.hamiltonian()?, &ls, tau, tau / steps.max(1) as f64)?;
        self.fidelity(&rho, readout)
    }
}

/// Scenario, channel mode and thermal occupation shared by one sweep ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepTemplate {
    pub scenario: Scenario,
    pub channels: ChannelMode,
    pub n_th: f64,
}

/// Every scenario × channel mode × `n̄ ∈ {0, 0.5, 1}`, in that nesting order.
pub fn default_templates() -> Vec<SweepTemplate> {
    let mut out = Vec::new();
    for scenario in Scenario::ALL {
        for channels in ChannelMode::ALL {
            for n_th in [0.0, 0.5, 1.0] {
                out.push(SweepTemplate { scenario, channels, n_th });
            }
        }
    }
    out
}

/// 25 log-spaced rates on `[1e-4, 1]`.
pub fn default_rate_grid() -> Vec<f64> {
    let axis = GridSpec { start: -4.0, end: 0.0, count: 25 };
    (0..axis.count).map(|i| 10f64.powf(axis.value(i))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub scenario: Scenario,
    pub channels: ChannelMode,
    pub n_th: f64,
    pub rate_index: usize,
    pub rate: f64,
    pub fidelity: f64,
}

/// Fidelity for every template and rate, in template-then-rate order.
pub fn fidelity_vs_rate_sweep(
    point: &ProtocolPoint,
    templates: &[SweepTemplate],
    rates: &[f64],
    readout: Readout,
    workers: usize,
) -> Result<Vec<SweepRecord>> {
    let n = templates.len() * rates.len();
    let results = par_map_ordered(n, workers, |k| {
        let (tpl, ri) = (templates[k / rates.len()], k % rates.len());
        let cfg = LindbladConfig::uniform(tpl.scenario, tpl.channels, tpl.n_th, rates[ri]);
        point.run(&cfg, readout, DEFAULT_STEPS).map(|fidelity| SweepRecord {
            scenario: tpl.scenario,
            channels: tpl.channels,
            n_th: tpl.n_th,
            rate_index: ri,
            rate: rates[ri],
            fidelity,
        })
    })?;
    results.into_iter().collect()
}
