//! Probabilistic-protocol scans: fidelity of the phase-corrected excited
//! branch with a real target, evaluated straight from the closed forms.

use serde::{Deserialize, Serialize};

use super::{par_map_ordered, RecordMode, ScanGrid, ScanOptions, ScanRecord, TOLERANCES};
use crate::dynamics::{rate_down, rate_up};
use crate::error::{Error, Result};
use crate::hilbert::OscillatorState;

const MAX_BLOCKS: usize = 3;
const MAX_LEVELS: usize = 2 * MAX_BLOCKS;

/// Precomputed structure of the excited branch for a fixed set of initial
/// Fock components.
///
/// Block `j` (initial `|n_j⟩` with weight `w_j`) contributes
/// `w_j sin θ cos(a_j τ)` at `n_j` and, after the `i` correction,
/// `w_j cos θ sin(b_j τ)` at `n_j − m`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldedKernel {
    blocks: usize,
    levels: usize,
    level_fock: [usize; MAX_LEVELS],
    up_level: [usize; MAX_BLOCKS],
    down_level: [usize; MAX_BLOCKS],
    rate_up: [f64; MAX_BLOCKS],
    rate_down: [f64; MAX_BLOCKS],
    target: [f64; MAX_LEVELS],
}

impl HeraldedKernel {
    pub fn new(focks: &[usize], m: usize, target: &OscillatorState<f64>) -> Result<Self> {
        if focks.is_empty() || focks.len() > MAX_BLOCKS {
            return Err(Error::InvalidParameter(format!("expected 1 to {MAX_BLOCKS} initial Fock indices")));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("multiphoton order m must be at least 1".into()));
        }
        for (i, &n) in focks.iter().enumerate() {
            if n < m {
                return Err(Error::InvalidParameter(format!("Fock index {n} is below m = {m} (requires n >= m)")));
            }
            if focks[..i].contains(&n) {
                return Err(Error::InvalidParameter(format!("initial Fock indices must be distinct ({n} repeated)")));
            }
        }
        let mut all: Vec<usize> = focks.iter().flat_map(|&n| [n - m, n]).collect();
        all.sort_unstable();
        all.dedup();
        let mut level_fock = [0; MAX_LEVELS];
        level_fock[..all.len()].copy_from_slice(&all);
        let pos = |n: usize| all.iter().position(|&x| x == n).expect("level present");
        let mut k = Self {
            blocks: focks.len(),
            levels: all.len(),
            level_fock,
            up_level: [0; MAX_BLOCKS],
            down_level: [0; MAX_BLOCKS],
            rate_up: [0.0; MAX_BLOCKS],
            rate_down: [0.0; MAX_BLOCKS],
            target: [0.0; MAX_LEVELS],
        };
        for (j, &n) in focks.iter().enumerate() {
            k.up_level[j] = pos(n);
            k.down_level[j] = pos(n - m);
            k.rate_up[j] = rate_up::<f64>(n, m);
            k.rate_down[j] = rate_down::<f64>(n, m);
        }
        for n in target.support() {
            let Some(l) = all.iter().position(|&x| x == n) else {
                return Err(Error::SupportMismatch(n));
            };
            let a = target.amplitude(n);
            if a.im != 0.0 {
                return Err(Error::InvalidParameter("scan targets must have real amplitudes".into()));
            }
            k.target[l] = a.re;
        }
        Ok(k)
    }

    pub fn phi_axes(&self) -> usize {
        self.blocks - 1
    }

    /// Fock indices of the excited branch, ascending.
    pub fn levels(&self) -> &[usize] {
        &self.level_fock[..self.levels]
    }

    /// Initial component weights, in the same arithmetic as
    /// [`crate::dynamics::MpjcConfig::components`].
    #[inline(always)]
    fn weights(&self, phi: &[f64]) -> [f64; MAX_BLOCKS] {
        match self.blocks {
            1 => [1.0, 0.0, 0.0],
            2 => [phi[0].cos(), phi[0].sin(), 0.0],
            _ => {
                let (s1, c1) = (phi[0].sin(), phi[0].cos());
                let (s2, c2) = (phi[1].sin(), phi[1].cos());
                [s1 * c2, s1 * s2, c1]
            }
        }
    }

    #[inline(always)]
    fn tau_terms(&self, tau: f64) -> ([f64; MAX_BLOCKS], [f64; MAX_BLOCKS]) {
        let mut ca = [0.0; MAX_BLOCKS];
        let mut sb = [0.0; MAX_BLOCKS];
        for j in 0..self.blocks {
            ca[j] = (self.rate_up[j] * tau).cos();
            sb[j] = (self.rate_down[j] * tau).sin();
        }
        (ca, sb)
    }

    /// Level sums `P` (multiplying `sin θ`) and `Q` (multiplying `cos θ`).
    #[inline(always)]
    fn level_sums(
        &self,
        w: &[f64; MAX_BLOCKS],
        ca: &[f64; MAX_BLOCKS],
        sb: &[f64; MAX_BLOCKS],
    ) -> ([f64; MAX_LEVELS], [f64; MAX_LEVELS]) {
        let mut p = [0.0; MAX_LEVELS];
        let mut q = [0.0; MAX_LEVELS];
        for j in 0..self.blocks {
            p[self.up_level[j]] += w[j] * ca[j];
            q[self.down_level[j]] += w[j] * sb[j];
        }
        (p, q)
    }

    /// `(Σ t_k C_k)² / Σ C_k²`, zero when the branch vanishes.
    #[inline(always)]
    fn merit<const L: usize>(&self, p: &[f64; MAX_LEVELS], q: &[f64; MAX_LEVELS], st: f64, ct: f64) -> f64 {
        let mut ov = 0.0;
        let mut nn = 0.0;
        for l in 0..L {
            let c = st * p[l] + ct * q[l];
            ov += self.target[l] * c;
            nn += c * c;
        }
        if nn > 0.0 {
            ov * ov / nn
        } else {
            0.0
        }
    }

    #[inline(always)]
    fn merit_dyn(&self, p: &[f64; MAX_LEVELS], q: &[f64; MAX_LEVELS], st: f64, ct: f64) -> f64 {
        match self.levels {
            2 => self.merit::<2>(p, q, st, ct),
            3 => self.merit::<3>(p, q, st, ct),
            4 => self.merit::<4>(p, q, st, ct),
            5 => self.merit::<5>(p, q, st, ct),
            _ => self.merit::<6>(p, q, st, ct),
        }
    }

    /// Fidelity at one parameter point; bitwise identical to the scan.
    pub fn fidelity(&self, tau: f64, theta: f64, phi: &[f64]) -> f64 {
        let (ca, sb) = self.tau_terms(tau);
        let w = self.weights(phi);
        let (p, q) = self.level_sums(&w, &ca, &sb);
        self.merit_dyn(&p, &q, theta.sin(), theta.cos())
    }

    fn scan_chunk<const L: usize>(&self, grid: &ScanGrid, ti: usize, mode: RecordMode) -> ChunkResult {
        let tau = grid.tau.value(ti);
        let (ca, sb) = self.tau_terms(tau);
        let nth = grid.theta.count;
        let st: Vec<f64> = (0..nth).map(|i| grid.theta.value(i).sin()).collect();
        let ct: Vec<f64> = (0..nth).map(|i| grid.theta.value(i).cos()).collect();
        let phi_counts: Vec<usize> = grid.phi.iter().map(|g| g.count).collect();
        let combos: usize = phi_counts.iter().product();
        let mut out = ChunkResult::default();
        let mut phi_idx = [0usize; 2];
        let mut phi_val = [0.0f64; 2];
        for combo in 0..combos {
            let mut rem = combo;
            for a in (0..phi_counts.len()).rev() {
                phi_idx[a] = rem % phi_counts[a];
                rem /= phi_counts[a];
                phi_val[a] = grid.phi[a].value(phi_idx[a]);
            }
            let w = self.weights(&phi_val);
            let (p, q) = self.level_sums(&w, &ca, &sb);
            for th in 0..nth {
                let f = self.merit::<L>(&p, &q, st[th], ct[th]);
                let d = (f - 1.0).abs();
                let loose = d <= TOLERANCES[0];
                let strict = d <= TOLERANCES[1];
                out.count_1em4 += loose as u64;
                out.count_1em6 += strict as u64;
                if mode == RecordMode::All || (mode == RecordMode::Passing && loose) {
                    let mut indices = vec![ti, th];
                    indices.extend_from_slice(&phi_idx[..phi_counts.len()]);
                    let mut values = vec![tau, grid.theta.value(th)];
                    values.extend_from_slice(&phi_val[..phi_counts.len()]);
                    out.records.push(ScanRecord { indices, values, merit: f, pass_1em4: loose, pass_1em6: strict });
                }
            }
        }
        if !grid.phi.is_empty() {
            out.records.sort_by(|a, b| a.indices.cmp(&b.indices));
        }
        out
    }

    /// Full scan over `grid`.
    pub fn scan(&self, grid: &ScanGrid, opts: ScanOptions) -> Result<HeraldedScan> {
        grid.validate(self.phi_axes())?;
        let chunks = par_map_ordered(grid.tau.count, opts.workers, |ti| match self.levels {
            2 => self.scan_chunk::<2>(grid, ti, opts.records),
            3 => self.scan_chunk::<3>(grid, ti, opts.records),
            4 => self.scan_chunk::<4>(grid, ti, opts.records),
            5 => self.scan_chunk::<5>(grid, ti, opts.records),
            _ => self.scan_chunk::<6>(grid, ti, opts.records),
        })?;
        let mut scan = HeraldedScan { count_1em4: 0, count_1em6: 0, points: grid.points(), records: Vec::new() };
        for c in chunks {
            scan.count_1em4 += c.count_1em4;
            scan.count_1em6 += c.count_1em6;
            scan.records.extend(c.records);
        }
        Ok(scan)
    }
}

#[derive(Default)]
struct ChunkResult {
    count_1em4: u64,
    count_1em6: u64,
    records: Vec<ScanRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeraldedScan {
    pub count_1em4: u64,
    pub count_1em6: u64,
    pub points: u64,
    pub records: Vec<ScanRecord>,
}

/// Single initial Fock state `|n₁⟩`, scanned over `(τ, θ)`.
pub fn scan_2fock(
    target: &OscillatorState<f64>,
    n1: usize,
    m: usize,
    grid: &ScanGrid,
    opts: ScanOptions,
) -> Result<HeraldedScan> {
    HeraldedKernel::new(&[n1], m, target)?.scan(grid, opts)
}

/// `cos φ|n₁⟩ + sin φ|n₂⟩`, scanned over `(τ, θ, φ)`.
pub fn scan_3fock(
    target: &OscillatorState<f64>,
    n1: usize,
    n2: usize,
    m: usize,
    grid: &ScanGrid,
    opts: ScanOptions,
) -> Result<HeraldedScan> {
    HeraldedKernel::new(&[n1, n2], m, target)?.scan(grid, opts)
}

/// Three-component initial oscillator, scanned over `(τ, θ, φ₁, φ₂)`.
pub fn scan_4fock(
    target: &OscillatorState<f64>,
    focks: [usize; 3],
    m: usize,
    grid: &ScanGrid,
    opts: ScanOptions,
) -> Result<HeraldedScan> {
    HeraldedKernel::new(&focks, m, target)?.scan(grid, opts)
}
