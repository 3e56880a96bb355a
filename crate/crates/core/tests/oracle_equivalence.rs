//! Closed-form ladder coefficients against brute-force evolution, and the
//! Schrödinger residual of the closed form.

use mpjc::dynamics::{build_hamiltonian, closed_form, oracle_coefficients, rate_up, MpjcConfig};
use mpjc::Complex;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

/// Random configuration with `m <= max_m` and every Fock index in `m..=max_n`.
fn draw(rng: &mut ChaCha8Rng, family: usize, max_m: usize, max_n: usize) -> MpjcConfig<f64> {
    let m = rng.gen_range(1..=max_m);
    let theta = rng.gen_range(0.0..PI);
    let tau = rng.gen_range(0.0..TAU);
    match family {
        0 => MpjcConfig::one_fock(rng.gen_range(m..=max_n), m, theta, tau),
        1 => {
            let n1 = rng.gen_range(m..max_n);
            let n2 = rng.gen_range(n1 + 1..=max_n);
            MpjcConfig::two_fock(n1, n2, m, theta, rng.gen_range(0.0..PI), tau)
        }
        _ => {
            let n1 = rng.gen_range(m..max_n - 1);
            let n2 = rng.gen_range(n1 + 1..max_n);
            let n3 = rng.gen_range(n2 + 1..=max_n);
            MpjcConfig::three_fock(n1, n2, n3, m, theta, rng.gen_range(0.0..PI), rng.gen_range(0.0..PI), tau)
        }
    }
}

#[test]
fn closed_form_matches_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    for family in 0..3 {
        let mut worst: f64 = 0.0;
        for _ in 0..500 {
            let cfg = draw(&mut rng, family, 6, 14);
            let a = closed_form(&cfg).unwrap();
            let b = oracle_coefficients(&cfg).unwrap();
            for (x, y) in a.flat().iter().zip(b.flat()) {
                worst = worst.max((x - y).norm());
            }
        }
        assert!(worst < 1e-9, "family {family}: max deviation {worst:e}");
    }
}

/// Largest `|central difference - (-iH psi)|` together with the fastest ladder
/// rate of the configuration.
fn residual(cfg: &MpjcConfig<f64>) -> (f64, f64) {
    let h = 1e-6;
    let dim = cfg.max_reachable() + 1;
    let ham = build_hamiltonian(cfg.m, dim).unwrap();
    let at = |tau: f64| {
        let mut c = *cfg;
        c.tau = tau;
        DVector::from_column_slice(closed_form(&c).unwrap().joint_state(dim).unwrap().flat())
    };
    let deriv = (at(cfg.tau + h) - at(cfg.tau - h)) / Complex::new(2.0 * h, 0.0);
    let rhs = &ham.matrix * at(cfg.tau) * Complex::new(0.0, -1.0);
    let worst = (deriv - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let rate = cfg.focks().into_iter().map(|n| rate_up::<f64>(n, cfg.m)).fold(0.0, f64::max);
    (worst, rate)
}

#[test]
fn closed_form_solves_schrodinger_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for k in 0..100 {
        let cfg = draw(&mut rng, k % 3, 4, 12);
        let (r, _) = residual(&cfg);
        assert!(r < 1e-5, "draw {k}: residual {r:e} for {cfg:?}");
    }
}

/// Over the full oracle domain the central difference itself is limited by
/// its truncation error `rate³ h² / 6`, so the residual is measured in units
/// of the fastest rate.
#[test]
fn closed_form_residual_scales_with_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for k in 0..100 {
        let cfg = draw(&mut rng, k % 3, 6, 14);
        let (r, rate) = residual(&cfg);
        assert!(r / rate < 1e-5, "draw {k}: residual {r:e} at rate {rate} for {cfg:?}");
    }
}
