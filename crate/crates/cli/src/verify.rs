//! Fast cross-module invariant suite behind `mpjc verify`.

use clap::Args;
use mpjc::codes::{binomial_codeword, extract_codewords_from_primitive, printed_catalog, CodewordSpec};
use mpjc::dynamics::{
    closed_form, deterministic_rho, oracle_coefficients, postselect_excited, postselect_excited_phase_corrected,
    postselect_ground, MpjcConfig,
};
use mpjc::hilbert::pure_fidelity;
use mpjc::open_system::{ChannelMode, LindbladConfig, ProtocolPoint, Readout, Scenario, DEFAULT_STEPS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::OutputArgs;
use crate::output::Sink;
use crate::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// Random draws per randomized check (default 100)
    #[arg(long)]
    pub draws: Option<usize>,
    /// RNG seed (default 7)
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed error, or the measured quantity.
    pub value: f64,
    pub tolerance: f64,
}

fn check(name: &str, value: f64, tolerance: f64) -> Check {
    Check { name: name.into(), passed: value <= tolerance, value, tolerance }
}

fn random_config(rng: &mut ChaCha8Rng) -> MpjcConfig<f64> {
    let m = rng.gen_range(1..=4);
    let theta = rng.gen_range(0.0..std::f64::consts::PI);
    let tau = rng.gen_range(0.0..std::f64::consts::TAU);
    let n1 = m + rng.gen_range(0..=8);
    match rng.gen_range(0..3) {
        0 => MpjcConfig::one_fock(n1, m, theta, tau),
        1 => MpjcConfig::two_fock(n1, n1 + rng.gen_range(1..=4), m, theta, rng.gen_range(0.0..3.0), tau),
        _ => {
            let n2 = n1 + rng.gen_range(1..=3);
            let n3 = n2 + rng.gen_range(1..=3);
            MpjcConfig::three_fock(n1, n2, n3, m, theta, rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0), tau)
        }
    }
}

pub fn run_checks(draws: usize, seed: u64) -> Result<Vec<Check>, mpjc::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    for (spec, terms) in printed_catalog() {
        let s = binomial_codeword::<f64>(spec, spec.min_dim())?;
        for (n, num, den) in terms {
            worst = worst.max((s.amplitude(n).re - (num as f64 / den as f64).sqrt()).abs());
        }
    }
    out.push(check("printed codewords", worst, 1e-12));

    let mut worst: f64 = 0.0;
    for n in 0..=6 {
        for s in 0..=4 {
            let spec = CodewordSpec::new(n, s, 0)?;
            let dim = spec.min_dim();
            let (z, o) = extract_codewords_from_primitive::<f64>(n, s, dim)?;
            for (got, mu) in [(z, 0), (o, 1)] {
                let want = binomial_codeword::<f64>(CodewordSpec::new(n, s, mu)?, dim)?;
                for (a, b) in got.amplitudes().iter().zip(want.amplitudes()) {
                    worst = worst.max((a - b).norm());
                }
            }
        }
    }
    out.push(check("primitive extraction", worst, 1e-12));

    let (mut oracle, mut branches, mut trace): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..draws {
        let cfg = random_config(&mut rng);
        let a = closed_form(&cfg)?;
        let b = oracle_coefficients(&cfg)?;
        for (x, y) in a.flat().iter().zip(b.flat()) {
            oracle = oracle.max((x - y).norm());
        }
        let pe = postselect_excited(&a).map(|h| h.probability).unwrap_or(0.0);
        let pg = postselect_ground(&a).map(|h| h.probability).unwrap_or(0.0);
        branches = branches.max((pe + pg - 1.0).abs());
        if let (mpjc::dynamics::Preparation::OneFock { n1 }, true) = (cfg.preparation, cfg.m <= 8) {
            if n1 >= cfg.m {
                trace = trace.max((deterministic_rho(&cfg)?.trace() - 1.0).abs());
            }
        }
    }
    out.push(check("closed form vs oracle", oracle, 1e-9));
    out.push(check("branch probabilities", branches, 1e-12));
    out.push(check("deterministic trace", trace, 1e-12));

    let point = ProtocolPoint::reference();
    let heralded = postselect_excited_phase_corrected(&closed_form(&point.config)?)?.normalized()?;
    let dim = heralded.dim().max(point.target.dim());
    let f = pure_fidelity(&heralded.resized(dim)?, &point.target.resized(dim)?)?;
    out.push(check("heralded point infidelity", 1.0 - f, 1e-6));

    let ideal = LindbladConfig::uniform(Scenario::Both, ChannelMode::Both, 0.0, 0.0);
    let open = point.run(&ideal, Readout::Postselected, DEFAULT_STEPS)?;
    out.push(check("zero-rate master equation", (open - f).abs(), 1e-8));
    Ok(out)
}

pub fn verify(o: &OutputArgs, a: &VerifyArgs) -> Result<(), CliError> {
    let checks = run_checks(a.draws.unwrap_or(100), a.seed.unwrap_or(7))?;
    for c in &checks {
        println!("{}\t{}\t{:e} (tol {:e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.tolerance);
    }
    if let Some(dir) = &o.out {
        Sink::new(Some(dir.clone()), "verify".into(), crate::output::Format::Json)?.summary(&checks)?;
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("failed checks: {}", failed.join(", "))))
    }
}
