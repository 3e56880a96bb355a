//! Deterministic parallel grid scans.
//!
//! Every scan is split into one chunk per `τ` index. Chunks are evaluated in
//! parallel and merged in index order, so counts, records and argmax results
//! do not depend on the number of workers.

mod ck;
mod deterministic;
mod heralded;

pub use ck::{ck_value, find_ck_zeros, CkScan};
pub use deterministic::{
    deterministic_argmax, deterministic_fidelity, ArgmaxResult, DeterministicProblem, DeterministicScan,
};
pub use heralded::{scan_2fock, scan_3fock, scan_4fock, HeraldedKernel, HeraldedScan};

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Loose and strict pass thresholds on `|F − 1|`.
pub const TOLERANCES: [f64; 2] = [1e-4, 1e-6];

/// One grid axis with inclusive endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(start: f64, end: f64, count: usize) -> Result<Self> {
        let g = Self { start, end, count };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidParameter(format!("grid needs at least 2 points, got {}", self.count)));
        }
        if !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::InvalidParameter("grid endpoints must be finite".into()));
        }
        Ok(())
    }

    /// `start + i·(end − start)/(count − 1)`, with the last index pinned to `end`.
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            return self.end;
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        self.start + i as f64 * step
    }
}

pub fn grid_values(axis: &GridSpec) -> Result<Vec<f64>> {
    axis.validate()?;
    Ok((0..axis.count).map(|i| axis.value(i)).collect())
}

/// Axes of a scan in the fixed order `τ, θ, φ…`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanGrid {
    pub tau: GridSpec,
    pub theta: GridSpec,
    #[serde(default)]
    pub phi: Vec<GridSpec>,
}

impl ScanGrid {
    /// `τ ∈ [0, 2π]` at 1001 points, `θ ∈ [0, π]` at 501.
    pub fn two_dim() -> Self {
        Self { tau: GridSpec { start: 0.0, end: TAU, count: 1001 }, theta: GridSpec { start: 0.0, end: PI, count: 501 }, phi: vec![] }
    }

    /// [`Self::two_dim`] plus `φ ∈ [0, π]` at 501 points.
    pub fn three_dim() -> Self {
        let mut g = Self::two_dim();
        g.phi.push(GridSpec { start: 0.0, end: PI, count: 501 });
        g
    }

    /// `τ ∈ [0, 2π]` at 501 points; `θ, φ₁, φ₂ ∈ [0, π]` at 251 each.
    pub fn four_dim() -> Self {
        let a = GridSpec { start: 0.0, end: PI, count: 251 };
        Self { tau: GridSpec { start: 0.0, end: TAU, count: 501 }, theta: a, phi: vec![a, a] }
    }

    pub fn validate(&self, phi_axes: usize) -> Result<()> {
        self.tau.validate()?;
        self.theta.validate()?;
        for p in &self.phi {
            p.validate()?;
        }
        if self.phi.len() != phi_axes {
            return Err(Error::InvalidParameter(format!(
                "scan expects {phi_axes} phi axes, grid has {}",
                self.phi.len()
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> u64 {
        self.phi.iter().fold(self.tau.count as u64 * self.theta.count as u64, |acc, p| acc * p.count as u64)
    }

    /// Parameter values at a grid index tuple `(τ, θ, φ…)`.
    pub fn values_at(&self, indices: &[usize]) -> Vec<f64> {
        let mut v = vec![self.tau.value(indices[0]), self.theta.value(indices[1])];
        v.extend(self.phi.iter().zip(&indices[2..]).map(|(g, &i)| g.value(i)));
        v
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    /// `(τ, θ, φ…)` grid indices.
    pub indices: Vec<usize>,
    /// Parameter values at `indices`.
    pub values: Vec<f64>,
    /// Figure of merit: a fidelity, or a coefficient for zero searches.
    pub merit: f64,
    pub pass_1em4: bool,
    pub pass_1em6: bool,
}

/// Which evaluated points end up in the returned record list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordMode {
    All,
    /// Only points passing the loose tolerance.
    Passing,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub workers: usize,
    pub records: RecordMode,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { workers: 1, records: RecordMode::Passing }
    }
}

/// Runs `f(i)` for `i in 0..n` on a pool of `workers` threads and returns
/// the results in index order.
pub(crate) fn par_map_ordered<R, F>(n: usize, workers: usize, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(&f).collect()))
}
