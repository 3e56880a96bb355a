//! Subcommand implementations. Every argument struct doubles as the schema
//! of the JSON config for that subcommand.

use std::time::Instant;

use clap::Args;
use mpjc::codes::{binomial_codeword, extract_codewords_from_primitive, primitive_state, CodewordSpec};
use mpjc::dynamics::{
    closed_form, oracle_coefficients, phase_correct, postselect_excited, postselect_excited_phase_corrected,
    postselect_ground, ClosedFormCoefficients, MpjcConfig,
};
use mpjc::hilbert::{pure_fidelity, OscillatorState};
use mpjc::open_system::{
    default_rate_grid, default_templates, fidelity_vs_rate_sweep, LindbladConfig, ProtocolPoint, Readout, SweepRecord,
    SweepTemplate, DEFAULT_STEPS,
};
use mpjc::scan::{
    deterministic_argmax, find_ck_zeros, ArgmaxResult, DeterministicProblem, HeraldedKernel, RecordMode, ScanGrid,
    ScanOptions, TOLERANCES,
};
use mpjc::Complex;
use serde::{Deserialize, Serialize};

use crate::config::{worker_count, OutputArgs};
use crate::output::{float, record_header, record_row, Format, Sink};
use crate::CliError;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn required<T: Copy>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| invalid(format!("missing required --{flag}")))
}

fn sink(o: &OutputArgs, default_name: &str) -> Result<Sink, CliError> {
    Sink::new(o.out.clone(), o.name.clone().unwrap_or_else(|| default_name.to_string()), Format::parse(o.format.as_deref())?)
}

fn codeword_spec(n: i64, s: i64, mu: i64) -> Result<CodewordSpec, CliError> {
    let n = u32::try_from(n).map_err(|_| invalid(format!("N must be a non-negative integer, got {n}")))?;
    let s = u32::try_from(s).map_err(|_| invalid(format!("S must be a non-negative integer, got {s}")))?;
    let mu = u8::try_from(mu).map_err(|_| invalid(format!("mu must be 0 or 1, got {mu}")))?;
    Ok(CodewordSpec::new(n, s, mu)?)
}

/// `--target mu,N,S` or `--amplitudes fock:amp,...` (normalized on input).
pub fn parse_target(target: Option<&str>, amplitudes: Option<&str>) -> Result<OscillatorState<f64>, CliError> {
    match (target, amplitudes) {
        (Some(_), Some(_)) => Err(invalid("give either --target or --amplitudes, not both")),
        (None, None) => Err(invalid("missing required --target mu,N,S (or --amplitudes)")),
        (Some(t), None) => {
            let parts: Vec<i64> = t
                .split(',')
                .map(|p| p.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|_| invalid(format!("--target expects mu,N,S integers, got `{t}`")))?;
            let [mu, n, s] = parts[..] else {
                return Err(invalid(format!("--target expects three values mu,N,S, got `{t}`")));
            };
            let spec = codeword_spec(n, s, mu)?;
            Ok(binomial_codeword(spec, spec.min_dim())?)
        }
        (None, Some(a)) => {
            let mut terms = Vec::new();
            for item in a.split(',') {
                let (n, v) = item
                    .split_once(':')
                    .ok_or_else(|| invalid(format!("--amplitudes entries look like fock:value, got `{item}`")))?;
                let n: usize = n.trim().parse().map_err(|_| invalid(format!("bad Fock index `{n}`")))?;
                let v: f64 = v.trim().parse().map_err(|_| invalid(format!("bad amplitude `{v}`")))?;
                terms.push((n, Complex::new(v, 0.0)));
            }
            let dim = terms.iter().map(|t| t.0).max().unwrap_or(0) + 1;
            Ok(OscillatorState::from_terms(dim, &terms)?.normalized()?)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSummary {
    pub levels: Vec<usize>,
    pub amplitudes: Vec<f64>,
}

impl TargetSummary {
    fn of(t: &OscillatorState<f64>) -> Self {
        let levels = t.support();
        let amplitudes = levels.iter().map(|&n| t.amplitude(n).re).collect();
        Self { levels, amplitudes }
    }
}

// ---------------------------------------------------------------- codeword

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct CodewordArgs {
    /// Correctable loss order N
    #[arg(long = "N", allow_negative_numbers = true)]
    #[serde(rename = "N")]
    pub n: Option<i64>,
    /// Spacing parameter S (Fock spacing S + 1)
    #[arg(long = "S", allow_negative_numbers = true)]
    #[serde(rename = "S")]
    pub s: Option<i64>,
    /// Logical label, 0 or 1
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<i64>,
    /// Truncation (default: smallest that holds the code family)
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmplitudeRow {
    pub fock: usize,
    pub amplitude: f64,
}

pub fn codeword(o: &OutputArgs, a: &CodewordArgs) -> Result<(), CliError> {
    let spec = codeword_spec(required(a.n, "N")?, required(a.s, "S")?, required(a.mu, "mu")?)?;
    let dim = a.dim.unwrap_or(spec.min_dim());
    let state = binomial_codeword::<f64>(spec, dim)?;
    let rows: Vec<AmplitudeRow> =
        state.support().into_iter().map(|n| AmplitudeRow { fock: n, amplitude: state.amplitude(n).re }).collect();
    for r in &rows {
        println!("{}\t{}", r.fock, r.amplitude);
    }
    let sink = sink(o, "codeword")?;
    sink.records(&rows, &["fock".into(), "amplitude".into()], |r| vec![r.fock.to_string(), float(r.amplitude)])
}

// --------------------------------------------------------------- primitive

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveArgs {
    #[arg(long = "N", allow_negative_numbers = true)]
    #[serde(rename = "N")]
    pub n: Option<i64>,
    #[arg(long = "S", allow_negative_numbers = true)]
    #[serde(rename = "S")]
    pub s: Option<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrimitiveSummary {
    pub n: u32,
    pub s: u32,
    pub normalization: f64,
    pub primitive: Vec<AmplitudeRow>,
    pub zero: Vec<AmplitudeRow>,
    pub one: Vec<AmplitudeRow>,
    /// Largest amplitude deviation from the direct construction.
    pub max_deviation: f64,
}

fn rows_of(s: &OscillatorState<f64>) -> Vec<AmplitudeRow> {
    s.support().into_iter().map(|n| AmplitudeRow { fock: n, amplitude: s.amplitude(n).re }).collect()
}

fn max_deviation(a: &OscillatorState<f64>, b: &OscillatorState<f64>) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn primitive(o: &OutputArgs, a: &PrimitiveArgs) -> Result<(), CliError> {
    let spec0 = codeword_spec(required(a.n, "N")?, required(a.s, "S")?, 0)?;
    let dim = spec0.min_dim();
    let (theta, norm) = primitive_state::<f64>(spec0.n, spec0.s, dim)?;
    let (zero, one) = extract_codewords_from_primitive::<f64>(spec0.n, spec0.s, dim)?;
    let spec1 = CodewordSpec::new(spec0.n, spec0.s, 1)?;
    let dev = max_deviation(&zero, &binomial_codeword(spec0, dim)?).max(max_deviation(&one, &binomial_codeword(spec1, dim)?));
    let summary = PrimitiveSummary {
        n: spec0.n,
        s: spec0.s,
        normalization: norm,
        primitive: rows_of(&theta),
        zero: rows_of(&zero),
        one: rows_of(&one),
        max_deviation: dev,
    };
    for (label, rows) in [("primitive", &summary.primitive), ("zero", &summary.zero), ("one", &summary.one)] {
        let text: Vec<String> = rows.iter().map(|r| format!("{}:{}", r.fock, r.amplitude)).collect();
        println!("{label}\t{}", text.join(" "));
    }
    println!("max_deviation\t{dev:e}");
    sink(o, "primitive")?.summary(&summary)?;
    if dev > 1e-12 {
        return Err(CliError::Numerical(format!("extracted codewords deviate by {dev:e}")));
    }
    Ok(())
}

// ------------------------------------------------------------------ evolve

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct PrepArgs {
    /// First initial Fock state
    #[arg(long)]
    pub n1: Option<usize>,
    /// Second initial Fock state (two- and three-Fock preparations)
    #[arg(long)]
    pub n2: Option<usize>,
    /// Third initial Fock state
    #[arg(long)]
    pub n3: Option<usize>,
    /// Photons exchanged per qubit flip
    #[arg(long)]
    pub m: Option<usize>,
    /// Qubit angle, radians
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Oscillator mixing angle for two Fock states, radians
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi2: Option<f64>,
    /// Scaled interaction time g·t
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
    /// closed (default) or oracle
    #[arg(long)]
    pub method: Option<String>,
}

impl PrepArgs {
    pub fn config(&self) -> Result<MpjcConfig<f64>, CliError> {
        let (n1, m) = (required(self.n1, "n1")?, required(self.m, "m")?);
        let (theta, tau) = (required(self.theta, "theta")?, required(self.tau, "tau")?);
        let cfg = match (self.n2, self.n3) {
            (None, None) => MpjcConfig::one_fock(n1, m, theta, tau),
            (Some(n2), None) => MpjcConfig::two_fock(n1, n2, m, theta, required(self.phi, "phi")?, tau),
            (Some(n2), Some(n3)) => {
                MpjcConfig::three_fock(n1, n2, n3, m, theta, required(self.phi1, "phi1")?, required(self.phi2, "phi2")?, tau)
            }
            (None, Some(_)) => return Err(invalid("--n3 needs --n2")),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn coefficients(&self) -> Result<ClosedFormCoefficients<f64>, CliError> {
        let cfg = self.config()?;
        match self.method.as_deref().unwrap_or("closed") {
            "closed" => Ok(closed_form(&cfg)?),
            "oracle" => Ok(oracle_coefficients(&cfg)?),
            other => Err(invalid(format!("method must be closed or oracle, got `{other}`"))),
        }
    }
}

pub fn evolve(o: &OutputArgs, a: &PrepArgs) -> Result<(), CliError> {
    let coeffs = a.coefficients()?;
    let mut header = vec!["fock".to_string(), "weight".to_string()];
    for c in ["c1", "c2", "c3", "c4"] {
        header.push(format!("{c}Re"));
        header.push(format!("{c}Im"));
    }
    let row = |b: &mpjc::dynamics::LadderBlock<f64>| {
        let mut r = vec![b.fock.to_string(), float(b.weight)];
        for c in b.as_array() {
            r.push(float(c.re));
            r.push(float(c.im));
        }
        r
    };
    for b in &coeffs.blocks {
        println!("{}", row(b).join("\t"));
    }
    println!("norm_sqr\t{}", coeffs.norm_sqr());
    sink(o, "evolve")?.records(&coeffs.blocks, &header, row)
}

// -------------------------------------------------------------- postselect

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct PostselectArgs {
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
    #[arg(long)]
    pub n3: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
    /// excited (default) or ground
    #[arg(long)]
    pub branch: Option<String>,
    /// termwise (default), amplitude, or none
    #[arg(long)]
    pub correction: Option<String>,
    /// Optional target codeword mu,N,S for a fidelity readout
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub amplitudes: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PostselectSummary {
    pub branch: String,
    pub correction: String,
    pub probability: f64,
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexRow {
    pub fock: usize,
    pub re: f64,
    pub im: f64,
}

pub fn postselect(o: &OutputArgs, a: &PostselectArgs) -> Result<(), CliError> {
    let prep = PrepArgs {
        n1: a.n1,
        n2: a.n2,
        n3: a.n3,
        m: a.m,
        theta: a.theta,
        phi: a.phi,
        phi1: a.phi1,
        phi2: a.phi2,
        tau: a.tau,
        method: None,
    };
    let coeffs = closed_form(&prep.config()?)?;
    let branch = a.branch.clone().unwrap_or_else(|| "excited".into());
    let correction = a.correction.clone().unwrap_or_else(|| "termwise".into());
    let heralded = match (branch.as_str(), correction.as_str()) {
        ("excited", "termwise") => postselect_excited_phase_corrected(&coeffs)?,
        ("excited", "amplitude" | "none") => postselect_excited(&coeffs)?,
        ("ground", "none") => postselect_ground(&coeffs)?,
        ("ground", _) => return Err(invalid("the ground branch carries no lowered terms; use --correction none")),
        (b, c) => return Err(invalid(format!("unsupported branch/correction `{b}`/`{c}`"))),
    };
    let mut state = heralded.normalized()?;
    if correction == "amplitude" {
        state = phase_correct(&state)?;
    }
    let fidelity = if a.target.is_some() || a.amplitudes.is_some() {
        let t = parse_target(a.target.as_deref(), a.amplitudes.as_deref())?;
        let dim = t.dim().max(state.dim());
        Some(pure_fidelity(&state.resized(dim)?, &t.resized(dim)?)?)
    } else {
        None
    };
    let rows: Vec<ComplexRow> = state
        .support()
        .into_iter()
        .map(|n| ComplexRow { fock: n, re: state.amplitude(n).re, im: state.amplitude(n).im })
        .collect();
    for r in &rows {
        println!("{}\t{}\t{}", r.fock, r.re, r.im);
    }
    println!("probability\t{}", heralded.probability);
    if let Some(f) = fidelity {
        println!("fidelity\t{f}");
    }
    let sink = sink(o, "postselect")?;
    sink.records(&rows, &["fock".into(), "re".into(), "im".into()], |r| vec![r.fock.to_string(), float(r.re), float(r.im)])?;
    sink.summary(&PostselectSummary { branch, correction, probability: heralded.probability, fidelity })
}

// ------------------------------------------------------------------- scans

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ScanArgs {
    /// Target codeword as mu,N,S
    #[arg(long)]
    pub target: Option<String>,
    /// Explicit real target, fock:amplitude,...
    #[arg(long)]
    pub amplitudes: Option<String>,
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
    #[arg(long)]
    pub n3: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Which points go to the records file: all, passing (default), none
    #[arg(long)]
    pub records: Option<String>,
    /// Grid axes (config file only; defaults depend on the subcommand)
    #[arg(skip)]
    pub grid: Option<ScanGrid>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanSummary {
    pub command: String,
    pub target: TargetSummary,
    pub focks: Vec<usize>,
    pub m: usize,
    pub grid: ScanGrid,
    pub points: u64,
    pub tolerances: [f64; 2],
    pub count_1em4: u64,
    pub count_1em6: u64,
    pub records: usize,
}

fn record_mode(s: Option<&str>) -> Result<RecordMode, CliError> {
    match s.unwrap_or("passing") {
        "all" => Ok(RecordMode::All),
        "passing" => Ok(RecordMode::Passing),
        "none" => Ok(RecordMode::None),
        other => Err(invalid(format!("records must be all, passing or none, got `{other}`"))),
    }
}

/// `components` initial Fock states: 1 → scan2, 2 → scan3, 3 → scan4.
pub fn scan(o: &OutputArgs, a: &ScanArgs, components: usize) -> Result<(), CliError> {
    let target = parse_target(a.target.as_deref(), a.amplitudes.as_deref())?;
    let m = required(a.m, "m")?;
    let n1 = required(a.n1, "n1")?;
    let focks: Vec<usize> = match components {
        1 => vec![n1],
        2 => vec![n1, required(a.n2, "n2")?],
        _ => vec![n1, required(a.n2, "n2")?, required(a.n3, "n3")?],
    };
    let (command, default_grid) = match components {
        1 => ("scan2", ScanGrid::two_dim()),
        2 => ("scan3", ScanGrid::three_dim()),
        _ => ("scan4", ScanGrid::four_dim()),
    };
    let grid = a.grid.clone().unwrap_or(default_grid);
    let opts = ScanOptions { workers: worker_count(o)?, records: record_mode(a.records.as_deref())? };
    let kernel = HeraldedKernel::new(&focks, m, &target)?;
    let start = Instant::now();
    let result = kernel.scan(&grid, opts)?;
    let elapsed = start.elapsed().as_secs_f64();
    let summary = ScanSummary {
        command: command.into(),
        target: TargetSummary::of(&target),
        focks,
        m,
        points: result.points,
        grid,
        tolerances: TOLERANCES,
        count_1em4: result.count_1em4,
        count_1em6: result.count_1em6,
        records: result.records.len(),
    };
    println!(
        "{command}: {} points, {} within 1e-4, {} within 1e-6 ({elapsed:.1} s)",
        summary.points, summary.count_1em4, summary.count_1em6
    );
    let sink = sink(o, command)?;
    sink.records(&result.records, &record_header(components - 1, "fidelity"), record_row)?;
    sink.summary(&summary)?;
    sink.timings(&[("scan", elapsed)])
}

// -------------------------------------------------------------- det-argmax

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct DetArgs {
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub amplitudes: Option<String>,
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Prepare cos φ|n1⟩ + sin φ|n1+m⟩ and scan φ as well
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub two_fock: Option<bool>,
    #[arg(skip)]
    pub grid: Option<ScanGrid>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetSummary {
    pub target: TargetSummary,
    pub n1: usize,
    pub m: usize,
    pub two_fock: bool,
    pub grid: ScanGrid,
    pub points: u64,
    pub best: ArgmaxResult,
}

/// Runs the argmax; shared with the acceptance tests.
pub fn det_summary(a: &DetArgs, workers: usize) -> Result<DetSummary, CliError> {
    let target = parse_target(a.target.as_deref(), a.amplitudes.as_deref())?;
    let two_fock = a.two_fock.unwrap_or(false);
    let problem = DeterministicProblem { target: target.clone(), n1: required(a.n1, "n1")?, m: required(a.m, "m")?, two_fock };
    let grid = a.grid.clone().unwrap_or_else(|| if two_fock { ScanGrid::three_dim() } else { ScanGrid::two_dim() });
    let scan = deterministic_argmax(&problem, &grid, workers)?;
    Ok(DetSummary {
        target: TargetSummary::of(&target),
        n1: problem.n1,
        m: problem.m,
        two_fock,
        grid,
        points: scan.points,
        best: scan.best,
    })
}

pub fn det_argmax(o: &OutputArgs, a: &DetArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let summary = det_summary(a, worker_count(o)?)?;
    let elapsed = start.elapsed().as_secs_f64();
    let b = &summary.best;
    let values: Vec<String> = b.values.iter().map(|v| v.to_string()).collect();
    println!(
        "det-argmax: F = {} at indices {:?} = ({}), {} co-maximal ({elapsed:.1} s)",
        b.fidelity,
        b.indices,
        values.join(", "),
        b.co_maximal.len()
    );
    let phi_axes = summary.grid.phi.len();
    let mut header = record_header(phi_axes, "fidelity");
    header.truncate(header.len() - 2);
    let rows: Vec<Vec<usize>> = b.co_maximal.clone();
    let sink = sink(o, "det-argmax")?;
    sink.records(&rows, &header, |idx| {
        let mut r: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
        r.extend(summary.grid.values_at(idx).into_iter().map(float));
        r.push(float(b.fidelity));
        r
    })?;
    sink.summary(&summary)?;
    sink.timings(&[("argmax", elapsed)])
}

// ---------------------------------------------------------------- ck-zeros

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct CkArgs {
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(skip)]
    pub grid: Option<ScanGrid>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CkSummary {
    pub n1: usize,
    pub m: usize,
    pub grid: ScanGrid,
    pub points: u64,
    pub tolerances: [f64; 2],
    pub count_1em4: u64,
    pub count_1em6: u64,
}

pub fn ck_zeros(o: &OutputArgs, a: &CkArgs) -> Result<(), CliError> {
    let (n1, m) = (required(a.n1, "n1")?, required(a.m, "m")?);
    let grid = a.grid.clone().unwrap_or_else(ScanGrid::three_dim);
    let start = Instant::now();
    let scan = find_ck_zeros(n1, m, &grid, worker_count(o)?)?;
    let elapsed = start.elapsed().as_secs_f64();
    println!("ck-zeros: {} within 1e-4, {} within 1e-6 ({elapsed:.1} s)", scan.count_1em4, scan.count_1em6);
    let summary = CkSummary {
        n1,
        m,
        points: scan.points,
        grid,
        tolerances: TOLERANCES,
        count_1em4: scan.count_1em4,
        count_1em6: scan.count_1em6,
    };
    let sink = sink(o, "ck-zeros")?;
    sink.records(&scan.records, &record_header(1, "coefficient"), record_row)?;
    sink.summary(&summary)?;
    sink.timings(&[("scan", elapsed)])
}

// ---------------------------------------------------------- lindblad-sweep

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    /// Target codeword mu,N,S (default 0,1,1)
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub amplitudes: Option<String>,
    /// Initial Fock state (default 4)
    #[arg(long)]
    pub n1: Option<usize>,
    /// Default 4
    #[arg(long)]
    pub m: Option<usize>,
    /// Default: grid value 228 of [0, π] at 501 points
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Default: grid value 6 of [0, 2π] at 1001 points
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
    /// postselected (default) or unconditioned
    #[arg(long)]
    pub readout: Option<String>,
    /// Rates to sweep (default: 25 log-spaced values on [1e-4, 1])
    #[arg(long, value_delimiter = ',')]
    pub rates: Option<Vec<f64>>,
    /// RK4 steps per integration
    #[arg(long)]
    pub steps: Option<usize>,
    /// Sweep rays (config file only; default: every scenario × channel mode × n̄ ∈ {0, 0.5, 1})
    #[arg(skip)]
    pub templates: Option<Vec<SweepTemplate>>,
    /// A single explicit rate set instead of a sweep (config file only)
    #[arg(skip)]
    pub lindblad: Option<LindbladConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub target: TargetSummary,
    pub n1: usize,
    pub m: usize,
    pub theta: f64,
    pub tau: f64,
    pub readout: Readout,
    pub steps: usize,
    pub records: usize,
    pub min_fidelity: f64,
}

pub fn lindblad_sweep(o: &OutputArgs, a: &SweepArgs) -> Result<(), CliError> {
    let reference = ProtocolPoint::reference();
    let target = match (&a.target, &a.amplitudes) {
        (None, None) => reference.target.clone(),
        (t, amp) => parse_target(t.as_deref(), amp.as_deref())?,
    };
    let n1 = a.n1.unwrap_or(4);
    let m = a.m.unwrap_or(4);
    let theta = a.theta.unwrap_or(reference.config.theta);
    let tau = a.tau.unwrap_or(reference.config.tau);
    let config = MpjcConfig::one_fock(n1, m, theta, tau);
    config.validate()?;
    let point = ProtocolPoint { config, target: target.clone() };
    let readout = match a.readout.as_deref().unwrap_or("postselected") {
        "postselected" => Readout::Postselected,
        "unconditioned" => Readout::Unconditioned,
        other => return Err(invalid(format!("readout must be postselected or unconditioned, got `{other}`"))),
    };
    let steps = a.steps.unwrap_or(DEFAULT_STEPS);
    if steps == 0 {
        return Err(invalid("steps must be at least 1"));
    }
    let start = Instant::now();
    let records: Vec<SweepRecord> = match &a.lindblad {
        Some(cfg) => {
            let rate = [cfg.os_relax, cfg.os_dephase, cfg.qb_relax, cfg.qb_dephase].into_iter().fold(0.0, f64::max);
            vec![SweepRecord {
                scenario: cfg.scenario,
                channels: cfg.channels,
                n_th: cfg.n_th,
                rate_index: 0,
                rate,
                fidelity: point.run(cfg, readout, steps)?,
            }]
        }
        None => {
            let templates = a.templates.clone().unwrap_or_else(default_templates);
            let rates = a.rates.clone().unwrap_or_else(default_rate_grid);
            if steps != DEFAULT_STEPS {
                return Err(invalid("--steps only applies together with an explicit lindblad config"));
            }
            fidelity_vs_rate_sweep(&point, &templates, &rates, readout, worker_count(o)?)?
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    let summary = SweepSummary {
        target: TargetSummary::of(&target),
        n1,
        m,
        theta,
        tau,
        readout,
        steps,
        records: records.len(),
        min_fidelity: records.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min),
    };
    println!("lindblad-sweep: {} records, min fidelity {} ({elapsed:.1} s)", summary.records, summary.min_fidelity);
    let header: Vec<String> = ["scenario", "channels", "nTh", "rateIndex", "rate", "fidelity"].map(String::from).to_vec();
    let sink = sink(o, "lindblad-sweep")?;
    sink.records(&records, &header, |r| {
        vec![
            variant_name(&r.scenario),
            variant_name(&r.channels),
            float(r.n_th),
            r.rate_index.to_string(),
            float(r.rate),
            float(r.fidelity),
        ]
    })?;
    sink.summary(&summary)?;
    sink.timings(&[("sweep", elapsed)])
}

/// snake_case serde name of a unit enum variant.
fn variant_name<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}
