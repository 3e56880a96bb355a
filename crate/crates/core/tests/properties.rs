use mpjc::codes::{binomial_codeword, extract_codewords_from_primitive, CodewordSpec};
use mpjc::dynamics::{closed_form, deterministic_rho, postselect_excited, postselect_ground, MpjcConfig};
use mpjc::hilbert::{
    mixed_fidelity, partial_trace_qubit, phase_max_fidelity, pure_fidelity, DensityMatrix, JointState, OscillatorState,
    Qubit,
};
use mpjc::Complex;
use proptest::prelude::*;

fn state(dim: usize) -> impl Strategy<Value = OscillatorState<f64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| {
            OscillatorState::new(v.into_iter().map(|(a, b)| Complex::new(a, b)).collect()).unwrap().normalized().unwrap()
        })
}

fn real_state(dim: usize) -> impl Strategy<Value = OscillatorState<f64>> {
    prop::collection::vec(-1.0..1.0f64, dim)
        .prop_filter("nonzero", |v| v.iter().all(|a| a.abs() > 1e-3))
        .prop_map(|v| OscillatorState::from_real(&v).unwrap().normalized().unwrap())
}

fn config() -> impl Strategy<Value = MpjcConfig<f64>> {
    (1usize..=5, 0usize..=8, 1usize..=4, 0.0..std::f64::consts::PI, 0.0..std::f64::consts::PI, 0.0..6.3f64).prop_map(
        |(m, offset, gap, theta, phi, tau)| {
            let n1 = m + offset;
            if gap == 4 {
                MpjcConfig::one_fock(n1, m, theta, tau)
            } else {
                MpjcConfig::two_fock(n1, n1 + gap, m, theta, phi, tau)
            }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pure_fidelity_is_symmetric_and_bounded(a in state(6), b in state(6)) {
        let f = pure_fidelity(&a, &b).unwrap();
        prop_assert!((f - pure_fidelity(&b, &a).unwrap()).abs() < 1e-14);
        prop_assert!((-1e-14..=1.0 + 1e-14).contains(&f));
        prop_assert!((pure_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn phase_max_dominates_plain_fidelity(psi in state(4), chi in state(4), w in 0.0..1.0f64, t in real_state(4)) {
        let basis = vec![0, 1, 2, 3];
        let a = DensityMatrix::from_pure_on(&psi, basis.clone()).unwrap();
        let b = DensityMatrix::from_pure_on(&chi, basis.clone()).unwrap();
        let data: Vec<Complex> = a.data().iter().zip(b.data()).map(|(x, y)| x * w + y * (1.0 - w)).collect();
        let rho = DensityMatrix::new(basis, data).unwrap();
        let (fmax, phases) = phase_max_fidelity(&rho, &t).unwrap();
        prop_assert!(fmax >= mixed_fidelity(&rho, &t).unwrap() - 1e-12);
        prop_assert!((mixed_fidelity(&rho.rotated(&phases).unwrap(), &t).unwrap() - fmax).abs() < 1e-10);
        prop_assert!(fmax <= 1.0 + 1e-12);
    }

    #[test]
    fn rank_one_phase_max_is_analytic(psi in state(5), t in real_state(5)) {
        let rho = DensityMatrix::from_pure_on(&psi, vec![0, 1, 2, 3, 4]).unwrap();
        let expected: f64 = psi.amplitudes().iter().zip(t.amplitudes()).map(|(a, b)| a.norm() * b.norm()).sum();
        let (f, _) = phase_max_fidelity(&rho, &t).unwrap();
        prop_assert!((f - expected * expected).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_is_a_density_matrix(g in state(5), e in state(5), theta in 0.0..3.2f64) {
        let mut amps: Vec<Complex> = g.amplitudes().iter().map(|a| a * theta.cos()).collect();
        amps.extend(e.amplitudes().iter().map(|a| a * theta.sin()));
        let psi = JointState::from_flat(5, amps).unwrap();
        let rho = partial_trace_qubit(&psi).unwrap();
        prop_assert!((rho.trace() - psi.norm_sqr()).abs() < 1e-12);
        prop_assert!(rho.hermiticity_deviation() < 1e-14);
        prop_assert!(rho.purity() <= rho.trace() * rho.trace() + 1e-12);
        for i in 0..rho.dim() {
            prop_assert!(rho.get(i, i).re >= 0.0);
        }
    }

    #[test]
    fn branch_probabilities_sum_to_one(cfg in config()) {
        let c = closed_form(&cfg).unwrap();
        prop_assert!((c.norm_sqr() - 1.0).abs() < 1e-12);
        let pe = postselect_excited(&c).map(|h| h.probability).unwrap_or(0.0f64);
        let pg = postselect_ground(&c).map(|h| h.probability).unwrap_or(0.0f64);
        prop_assert!((pe + pg - 1.0).abs() < 1e-12);
        let psi = c.joint_state(c.max_fock() + 1).unwrap();
        prop_assert!((psi.branch(Qubit::Excited).norm_sqr() - pe).abs() < 1e-12 || pe == 0.0);
    }

    #[test]
    fn deterministic_state_has_unit_trace(n1 in 4usize..=10, theta in 0.0..3.2f64, phi in 0.0..3.2f64, tau in 0.0..6.3f64) {
        for cfg in [MpjcConfig::one_fock(n1, 4, theta, tau), MpjcConfig::two_fock(n1, n1 + 4, 4, theta, phi, tau)] {
            let rho = deterministic_rho(&cfg).unwrap();
            prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
            prop_assert!(rho.hermiticity_deviation() < 1e-14);
        }
    }

    #[test]
    fn codewords_are_orthonormal(n in 0u32..=6, s in 0u32..=4) {
        let dim = CodewordSpec::new(n, s, 0).unwrap().min_dim();
        let z = binomial_codeword::<f64>(CodewordSpec::new(n, s, 0).unwrap(), dim).unwrap();
        let o = binomial_codeword::<f64>(CodewordSpec::new(n, s, 1).unwrap(), dim).unwrap();
        prop_assert!((z.norm_sqr() - 1.0).abs() < 1e-14);
        prop_assert!((o.norm_sqr() - 1.0).abs() < 1e-14);
        prop_assert!(z.inner(&o).unwrap().norm() < 1e-15);
        for k in z.support().into_iter().chain(o.support()) {
            prop_assert_eq!(k % (s as usize + 1), 0);
        }
    }

    #[test]
    fn primitive_extraction_matches_direct(n in 0u32..=6, s in 0u32..=4) {
        let dim = CodewordSpec::new(n, s, 0).unwrap().min_dim();
        let (z, o) = extract_codewords_from_primitive::<f64>(n, s, dim).unwrap();
        for (got, mu) in [(z, 0u8), (o, 1u8)] {
            let want = binomial_codeword::<f64>(CodewordSpec::new(n, s, mu).unwrap(), dim).unwrap();
            for (a, b) in got.amplitudes().iter().zip(want.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
