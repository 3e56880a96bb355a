//! Zeros of the middle coefficient of the reduced-order protocol.

use serde::{Deserialize, Serialize};

use super::{par_map_ordered, ScanGrid, ScanRecord, TOLERANCES};
use crate::dynamics::rate_down;
use crate::error::{Error, Result};

/// `C = cos θ cos φ sin τ_k + sin θ sin φ cos τ_k` with `τ_k = b_{n₁,m} τ`.
pub fn ck_value(rate: f64, tau: f64, theta: f64, phi: f64) -> f64 {
    let tk = rate * tau;
    theta.cos() * phi.cos() * tk.sin() + theta.sin() * phi.sin() * tk.cos()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CkScan {
    pub count_1em4: u64,
    pub count_1em6: u64,
    pub points: u64,
    /// Points with `|C| ≤ 1e-4`, in index order.
    pub records: Vec<ScanRecord>,
}

/// All `(τ, θ, φ)` grid points with `|C| ≤ 1e-4`, flagged at both tolerances.
pub fn find_ck_zeros(n1: usize, m: usize, grid: &ScanGrid, workers: usize) -> Result<CkScan> {
    if m == 0 || n1 < 2 * m {
        return Err(Error::InvalidParameter(format!("zero search requires n1 >= 2m (n1 = {n1}, m = {m})")));
    }
    grid.validate(1)?;
    let rate = rate_down::<f64>(n1, m);
    let phi_axis = grid.phi[0];
    let chunks = par_map_ordered(grid.tau.count, workers, |ti| {
        let tau = grid.tau.value(ti);
        let mut out = (0u64, 0u64, Vec::new());
        for th in 0..grid.theta.count {
            let theta = grid.theta.value(th);
            for pi in 0..phi_axis.count {
                let phi = phi_axis.value(pi);
                let c = ck_value(rate, tau, theta, phi);
                let loose = c.abs() <= TOLERANCES[0];
                if loose {
                    let strict = c.abs() <= TOLERANCES[1];
                    out.0 += 1;
                    out.1 += strict as u64;
                    out.2.push(ScanRecord {
                        indices: vec![ti, th, pi],
                        values: vec![tau, theta, phi],
                        merit: c,
                        pass_1em4: loose,
                        pass_1em6: strict,
                    });
                }
            }
        }
        out
    })?;
    let mut scan = CkScan { count_1em4: 0, count_1em6: 0, points: grid.points(), records: Vec::new() };
    for (a, b, r) in chunks {
        scan.count_1em4 += a;
        scan.count_1em6 += b;
        scan.records.extend(r);
    }
    Ok(scan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{reduced_m_state, MpjcConfig};
    use crate::scan::GridSpec;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn agrees_with_reduced_state() {
        let rate = rate_down::<f64>(6, 3);
        for &(tau, th, ph) in &[(0.4, 1.0, 2.0), (5.0, 0.2, 0.9)] {
            let r = reduced_m_state(&MpjcConfig::two_fock(6, 3, 3, th, ph, tau)).unwrap();
            assert!((ck_value(rate, tau, th, ph) - r.c_mid).abs() < 1e-12);
        }
    }

    #[test]
    fn trivial_zeros_on_theta_phi_origin() {
        let a = GridSpec::new(0.0, PI, 5).unwrap();
        let grid = ScanGrid { tau: GridSpec::new(0.0, TAU, 9).unwrap(), theta: a, phi: vec![a] };
        let scan = find_ck_zeros(4, 2, &grid, 1).unwrap();
        assert!(scan.records.iter().any(|r| r.indices == vec![0, 0, 0]));
        assert!(scan.records.iter().all(|r| r.pass_1em4 && (r.pass_1em6 <= r.pass_1em4)));
        assert!(find_ck_zeros(3, 2, &grid, 1).is_err());
    }
}
