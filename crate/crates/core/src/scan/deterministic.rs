//! Grid argmax of the deterministic-protocol fidelity
//! `max_U ⟨t|U ρ U†|t⟩`, with `ρ` the oscillator state after tracing out
//! the qubit.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{par_map_ordered, ScanGrid};
use crate::dynamics::{deterministic_rho, rate_down, rate_up, MpjcConfig};
use crate::error::{Error, Result};
use crate::hilbert::{phase_max_fidelity, OscillatorState};

/// Values this close to the maximum are reported as co-maximal.
pub const TIE_TOLERANCE: f64 = 1e-10;

type C64 = Complex<f64>;

/// Target plus preparation: `|n₁⟩`, or `cos φ|n₁⟩ + sin φ|n₁+m⟩` when
/// `two_fock` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicProblem {
    pub target: OscillatorState<f64>,
    pub n1: usize,
    pub m: usize,
    pub two_fock: bool,
}

impl DeterministicProblem {
    pub fn config(&self, tau: f64, theta: f64, phi: Option<f64>) -> MpjcConfig<f64> {
        if self.two_fock {
            MpjcConfig::two_fock(self.n1, self.n1 + self.m, self.m, theta, phi.unwrap_or(0.0), tau)
        } else {
            MpjcConfig::one_fock(self.n1, self.m, theta, tau)
        }
    }

    fn basis(&self) -> Vec<usize> {
        let (n, m) = (self.n1, self.m);
        if self.two_fock {
            vec![n - m, n, n + m, n + 2 * m]
        } else {
            vec![n - m, n, n + m]
        }
    }

    fn validate(&self) -> Result<[f64; 4]> {
        if self.m == 0 || self.n1 < self.m {
            return Err(Error::InvalidParameter(format!(
                "deterministic protocol needs 1 <= m <= n1 (n1 = {}, m = {})",
                self.n1, self.m
            )));
        }
        let basis = self.basis();
        let mut t = [0.0; 4];
        for n in self.target.support() {
            let Some(i) = basis.iter().position(|&b| b == n) else {
                return Err(Error::SupportMismatch(n));
            };
            let a = self.target.amplitude(n);
            if a.im != 0.0 {
                return Err(Error::InvalidParameter("deterministic targets must have real amplitudes".into()));
            }
            t[i] = a.re;
        }
        Ok(t)
    }
}

/// `sin`/`cos` of the four ladder phases at one `τ`.
struct RateTrig {
    /// `(sin, cos)` of `a τ` and `b τ` for the `n₁` ladder, then the `n₁+m` ladder.
    x_up: (f64, f64),
    x_down: (f64, f64),
    y_up: (f64, f64),
    y_down: (f64, f64),
}

impl RateTrig {
    fn new(p: &DeterministicProblem, tau: f64) -> Self {
        let (n, m) = (p.n1, p.m);
        Self {
            x_up: (rate_up::<f64>(n, m) * tau).sin_cos(),
            x_down: (rate_down::<f64>(n, m) * tau).sin_cos(),
            y_up: (rate_up::<f64>(n + m, m) * tau).sin_cos(),
            y_down: (rate_down::<f64>(n + m, m) * tau).sin_cos(),
        }
    }

    /// `Σ_jk |t_j t_k ρ_jk|`, an upper bound on the phase-maximized fidelity
    /// that is attained whenever the nonzero coherences form a tree. Takes
    /// `(sin θ, cos θ)` and `(sin φ, cos φ)`; the `y` ladder drops out when
    /// `sin φ = 0`.
    fn bound(&self, t: &[f64; 4], (st, ct): (f64, f64), (sp, cp): (f64, f64)) -> f64 {
        let z = C64::new(0.0, 0.0);
        let x1 = C64::new(cp * ct * self.x_down.1, 0.0);
        let x2 = C64::new(cp * st * self.x_up.1, 0.0);
        let x3 = C64::new(0.0, -cp * st * self.x_up.0);
        let x4 = C64::new(0.0, -cp * ct * self.x_down.0);
        let y1 = C64::new(sp * ct * self.y_down.1, 0.0);
        let y2 = C64::new(sp * st * self.y_up.1, 0.0);
        let y3 = C64::new(0.0, -sp * st * self.y_up.0);
        let y4 = C64::new(0.0, -sp * ct * self.y_down.0);
        // excited and ground branches on the 4-level basis
        let e = [x4, x2 + y4, y2, z];
        let g = [z, x1, x3 + y1, y3];
        let mut ub = 0.0;
        for j in 0..4 {
            if t[j] == 0.0 {
                continue;
            }
            ub += t[j] * t[j] * (e[j].norm_sqr() + g[j].norm_sqr());
            for k in j + 1..4 {
                if t[k] != 0.0 {
                    ub += 2.0 * (t[j] * t[k]).abs() * (e[j] * e[k].conj() + g[j] * g[k].conj()).norm();
                }
            }
        }
        ub
    }
}

/// Phase-maximized deterministic fidelity at one point.
pub fn deterministic_fidelity(problem: &DeterministicProblem, tau: f64, theta: f64, phi: Option<f64>) -> Result<f64> {
    let rho = deterministic_rho(&problem.config(tau, theta, phi))?;
    Ok(phase_max_fidelity(&rho, &problem.target)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgmaxResult {
    /// `(τ, θ[, φ])` grid indices of the first maximizer in index order.
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    pub fidelity: f64,
    /// Every grid point within [`TIE_TOLERANCE`] of the maximum, in index order.
    pub co_maximal: Vec<Vec<usize>>,
    /// Points that needed the full phase optimization.
    pub full_evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterministicScan {
    pub best: ArgmaxResult,
    pub points: u64,
}

struct Chunk {
    best: f64,
    at: Vec<usize>,
    near: Vec<(Vec<usize>, f64)>,
    full: u64,
}

struct Tables {
    theta: Vec<(f64, f64)>,
    phi: Vec<(f64, f64)>,
}

/// Fidelity at the point of this `τ` slice with the largest bound: a cheap
/// lower bound on the global maximum.
fn seed(problem: &DeterministicProblem, t: &[f64; 4], grid: &ScanGrid, tables: &Tables, ti: usize) -> Result<f64> {
    let rates = RateTrig::new(problem, grid.tau.value(ti));
    let mut top = (f64::NEG_INFINITY, 0, 0);
    for (th, &theta_trig) in tables.theta.iter().enumerate() {
        for (pi, &phi_trig) in tables.phi.iter().enumerate() {
            let b = rates.bound(t, theta_trig, phi_trig);
            if b > top.0 {
                top = (b, th, pi);
            }
        }
    }
    let phi = grid.phi.first().map(|g| g.value(top.2));
    deterministic_fidelity(problem, grid.tau.value(ti), grid.theta.value(top.1), phi)
}

fn chunk(
    problem: &DeterministicProblem,
    t: &[f64; 4],
    grid: &ScanGrid,
    tables: &Tables,
    floor: f64,
    ti: usize,
) -> Result<Chunk> {
    let tau = grid.tau.value(ti);
    let rates = RateTrig::new(problem, tau);
    let mut c = Chunk { best: f64::NEG_INFINITY, at: Vec::new(), near: Vec::new(), full: 0 };
    for th in 0..grid.theta.count {
        let theta = grid.theta.value(th);
        for (pi, &phi_trig) in tables.phi.iter().enumerate() {
            if rates.bound(t, tables.theta[th], phi_trig) < c.best.max(floor) - TIE_TOLERANCE {
                continue;
            }
            let phi = grid.phi.first().map(|g| g.value(pi));
            c.full += 1;
            let f = deterministic_fidelity(problem, tau, theta, phi)?;
            let mut idx = vec![ti, th];
            if phi.is_some() {
                idx.push(pi);
            }
            if f > c.best {
                c.best = f;
                c.at = idx.clone();
                let floor = f - TIE_TOLERANCE;
                c.near.retain(|(_, v)| *v >= floor);
            }
            if f >= c.best - TIE_TOLERANCE {
                c.near.push((idx, f));
            }
        }
    }
    Ok(c)
}

/// Grid argmax with ties broken by the smallest `(τ, θ, φ)` index.
pub fn deterministic_argmax(problem: &DeterministicProblem, grid: &ScanGrid, workers: usize) -> Result<DeterministicScan> {
    grid.validate(usize::from(problem.two_fock))?;
    let t = problem.validate()?;
    let theta = (0..grid.theta.count).map(|i| grid.theta.value(i).sin_cos()).collect();
    let phi = match grid.phi.first() {
        Some(axis) => (0..axis.count).map(|i| axis.value(i).sin_cos()).collect(),
        None => vec![(0.0, 1.0)],
    };
    let tables = Tables { theta, phi };
    // Points whose bound falls below a fidelity already attained somewhere
    // cannot be co-maximal, so seeding the pruning threshold leaves the
    // result unchanged.
    let seeds = par_map_ordered(grid.tau.count, workers, |ti| seed(problem, &t, grid, &tables, ti))?;
    let floor = seeds.into_iter().try_fold(f64::NEG_INFINITY, |acc, f| f.map(|f| acc.max(f)))?;
    let chunks = par_map_ordered(grid.tau.count, workers, |ti| chunk(problem, &t, grid, &tables, floor, ti))?;
    let mut best = f64::NEG_INFINITY;
    let mut at = Vec::new();
    let mut full = 0;
    let mut near = Vec::new();
    for c in chunks {
        let c = c?;
        full += c.full;
        if c.best > best {
            best = c.best;
            at = c.at;
        }
        near.extend(c.near);
    }
    let co_maximal = near.into_iter().filter(|(_, v)| *v >= best - TIE_TOLERANCE).map(|(i, _)| i).collect();
    Ok(DeterministicScan {
        best: ArgmaxResult { values: grid.values_at(&at), indices: at, fidelity: best, co_maximal, full_evaluations: full },
        points: grid.points(),
    })
}
