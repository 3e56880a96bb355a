//! Independent-route agreement and open-system positivity.

use mpjc::dynamics::{closed_form, deterministic_rho, oracle_coefficients, MpjcConfig};
use mpjc::hilbert::partial_trace_qubit;
use mpjc::{Complex, DensityMatrix};
use mpjc::open_system::{
    build_collapse_ops, evolve_master, min_eigenvalue, ChannelMode, LindbladConfig, ProtocolPoint, Scenario,
};
use proptest::prelude::*;
use std::collections::BTreeSet;

/// `⟨i|rho|j⟩`, zero outside the stored basis.
fn element(rho: &DensityMatrix, i: usize, j: usize) -> Complex {
    let at = |n: usize| rho.basis().iter().position(|&b| b == n);
    match (at(i), at(j)) {
        (Some(a), Some(b)) => rho.get(a, b),
        _ => Complex::new(0.0, 0.0),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_output_has_ladder_parity(m in 1usize..=4, off in 0usize..=6, theta in 0.0..3.2f64, tau in 0.0..6.3f64) {
        let c = oracle_coefficients(&MpjcConfig::one_fock(m + off, m, theta, tau)).unwrap();
        let [c1, c2, c3, c4] = c.x().as_array();
        prop_assert!(c1.im.abs() < 1e-10 && c2.im.abs() < 1e-10);
        prop_assert!(c3.re.abs() < 1e-10 && c4.re.abs() < 1e-10);
    }

    #[test]
    fn deterministic_rho_matches_partial_trace(n1 in 4usize..=10, theta in 0.0..3.2f64, phi in 0.0..3.2f64, tau in 0.0..6.3f64) {
        for cfg in [MpjcConfig::one_fock(n1, 4, theta, tau), MpjcConfig::two_fock(n1, n1 + 4, 4, theta, phi, tau)] {
            let direct = deterministic_rho(&cfg).unwrap();
            let c = closed_form(&cfg).unwrap();
            let traced = partial_trace_qubit(&c.joint_state(cfg.max_reachable() + 1).unwrap()).unwrap();
            let levels: BTreeSet<usize> = direct.basis().iter().chain(traced.basis()).copied().collect();
            for &i in &levels {
                for &j in &levels {
                    prop_assert!((element(&direct, i, j) - element(&traced, i, j)).norm() < 1e-12);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn master_equation_keeps_a_density_matrix(rate in 1e-3..0.5f64, n_th in 0.0..0.3f64, which in 0usize..9) {
        let scenario = Scenario::ALL[which % 3];
        let channels = ChannelMode::ALL[which / 3];
        let point = ProtocolPoint::reference();
        let cfg = LindbladConfig::uniform(scenario, channels, n_th, rate);
        let ls = build_collapse_ops(&cfg, point.dim()).unwrap();
        let rho0 = point.initial_rho().unwrap();
        let tau = point.config.tau;
        let rho = evolve_master(&rho0, &point.hamiltonian().unwrap(), &ls, tau, tau / 400.0).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-9);
        prop_assert!((&rho - rho.adjoint()).camax() < 1e-14);
        prop_assert!(min_eigenvalue(&rho) > -1e-9);
    }
}
