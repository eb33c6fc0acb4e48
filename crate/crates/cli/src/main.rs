//! Command-line driver: deterministic protocol runs, seeded sampling, table
//! reproduction checks, and the efficiency / optical / graph verification
//! commands. Exit codes: 0 success, 1 check failure, 2 usage or validation
//! error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use ico_netsim::efficiency::{sweep, EfficiencyParams};
use ico_netsim::entanglement::classify;
use ico_netsim::graphstate::{
    build_graph_state, build_ico_graph_state, correction_identity_residual, Graph, IcoSign,
};
use ico_netsim::optical::verify_against_abstract;
use ico_netsim::protocol::{
    branch_states, feedforward_correction, run, verify_table1, verify_table2, ProtocolConfig,
    ProtocolConfigDoc, RowReport,
};
use ico_netsim::qcore::{apply, OutcomeRecord, Parity, StateVector};
use ico_netsim::{reduce, SimError};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
const MAX_QUBITS_ENV: &str = "ICO_NETSIM_MAX_QUBITS";

#[derive(Parser)]
#[command(name = "ico-netsim", version, about = "Switch-protocol entanglement simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config and emit the full outcome table.
    Run {
        /// Path to the JSON config.
        #[arg(long)]
        config: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Replace odd-parity states by their corrected (even-branch) form
        /// where the tabulated correction exists.
        #[arg(long)]
        feed_forward: bool,
    },
    /// Draw seeded samples from the outcome distribution.
    Sample {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every tabulated two-party cell against the engine.
    Table1,
    /// Check every tabulated three-party cell against the engine.
    Table2,
    /// Sweep θ over [0, 2π] for fixed coefficients and report both branches.
    SweepTheta {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 64)]
        steps: usize,
        /// Shared-state branch phase: "1" or "i".
        #[arg(long, default_value = "1")]
        shared_phase: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the loss model over a party/distance grid.
    Efficiency {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 66.0)]
        l_max: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        #[arg(long, default_value_t = 0.96)]
        eta0: f64,
        #[arg(long, default_value_t = 0.96)]
        eta_d: f64,
        #[arg(long, default_value_t = 1.0 / 22.0)]
        attenuation: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Audit the photonic layout against the abstract engine over a grid.
    OpticalVerify {
        /// θ grid in radians; defaults to kπ/8 for k = 0..16.
        #[arg(long, value_delimiter = ',')]
        thetas: Vec<f64>,
        /// Wave-plate angles in degrees for both photons.
        #[arg(long, value_delimiter = ',', default_value = "0,15,22.5,30,45")]
        lambdas: Vec<f64>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the graph-state construction for one edge list.
    GraphVerify {
        /// Edges as "0-1,1-2".
        #[arg(long)]
        edges: String,
        /// Vertex count; inferred from the edge list when omitted.
        #[arg(long)]
        vertices: Option<usize>,
        /// Skip the interleaved corrections.
        #[arg(long)]
        raw: bool,
        #[arg(long, value_enum, default_value = "plus")]
        sign: SignArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Reproducibility header emitted at the top of every output artifact.
struct RunManifest {
    command: String,
    config_hash: String,
    tool_version: String,
    seed: Option<u64>,
}

impl RunManifest {
    fn new(command: &str, canonical_config: &str, seed: Option<u64>) -> Self {
        let digest = Sha256::digest(canonical_config.as_bytes());
        let config_hash: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        Self {
            command: command.to_string(),
            config_hash,
            tool_version: TOOL_VERSION.to_string(),
            seed,
        }
    }

    fn csv_header(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# command: {}", self.command);
        let _ = writeln!(s, "# config_hash: {}", self.config_hash);
        let _ = writeln!(s, "# tool_version: {}", self.tool_version);
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "# seed: {seed}");
        }
        s
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "command": self.command,
            "config_hash": self.config_hash,
            "tool_version": self.tool_version,
            "seed": self.seed,
        })
    }
}

enum CliError {
    /// Exit code 1: a verification failed.
    Check(String),
    /// Exit code 2: bad usage, config, or input file.
    Validation(String),
}

impl CliError {
    fn from_sim(err: SimError) -> Self {
        CliError::Validation(err.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Run {
            config,
            out,
            format,
            feed_forward,
        } => cmd_run(&config, out.as_deref(), format, feed_forward),
        Command::Sample {
            config,
            shots,
            seed,
            out,
        } => cmd_sample(&config, shots, seed, out.as_deref()),
        Command::Table1 => cmd_tables(1),
        Command::Table2 => cmd_tables(2),
        Command::SweepTheta {
            n,
            alphas,
            steps,
            shared_phase,
            out,
        } => cmd_sweep_theta(n, &alphas, steps, &shared_phase, out.as_deref()),
        Command::Efficiency {
            n,
            l_max,
            step,
            eta0,
            eta_d,
            attenuation,
            out,
        } => cmd_efficiency(&n, l_max, step, eta0, eta_d, attenuation, out.as_deref()),
        Command::OpticalVerify {
            thetas,
            lambdas,
            tol,
            out,
        } => cmd_optical_verify(&thetas, &lambdas, tol, out.as_deref()),
        Command::GraphVerify {
            edges,
            vertices,
            raw,
            sign,
            out,
        } => cmd_graph_verify(&edges, vertices, raw, sign, out.as_deref()),
    }
}

fn emit(out: Option<&std::path::Path>, content: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn max_parties_from_env() -> CliResult<Option<usize>> {
    match std::env::var(MAX_QUBITS_ENV) {
        Err(_) => Ok(None),
        Ok(raw) => {
            let qubits: usize = raw.parse().map_err(|_| {
                CliError::Validation(format!("{MAX_QUBITS_ENV}={raw} is not a qubit count"))
            })?;
            Ok(Some(qubits / 2))
        }
    }
}

fn load_config(path: &std::path::Path) -> CliResult<ProtocolConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let doc: ProtocolConfigDoc =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
    let mut cfg = ProtocolConfig::try_from(doc).map_err(CliError::from_sim)?;
    if let Some(cap) = max_parties_from_env()? {
        cfg = cfg.with_max_parties(cap).map_err(CliError::from_sim)?;
    }
    Ok(cfg)
}

/// Canonical JSON used for the manifest hash: fixed field order, resolved
/// values, shortest round-trip decimals.
fn canonical_config(cfg: &ProtocolConfig) -> String {
    let alphas = cfg
        .alphas
        .iter()
        .map(|a| format!("{a}"))
        .collect::<Vec<_>>()
        .join(",");
    format!(
        "{{\"n_parties\":{},\"theta\":{},\"alphas\":[{}],\"shared_phase\":{{\"re\":{},\"im\":{}}}}}",
        cfg.n_parties, cfg.theta, alphas, cfg.shared_phase.re, cfg.shared_phase.im
    )
}

fn record_class(record: &OutcomeRecord) -> CliResult<String> {
    Ok(classify(record.collapsed.as_ref())
        .map_err(CliError::from_sim)?
        .class
        .to_string())
}

fn state_for_output(
    record: &OutcomeRecord,
    cfg: &ProtocolConfig,
    feed_forward: bool,
) -> CliResult<Option<StateVector>> {
    let Some(state) = &record.collapsed else {
        return Ok(None);
    };
    if feed_forward && record.parity == Parity::Odd {
        let correction = feedforward_correction(cfg).map_err(CliError::from_sim)?;
        if let Some(gate) = correction {
            let targets: Vec<usize> = (0..cfg.n_parties).collect();
            return apply(state, &gate, &targets)
                .map(Some)
                .map_err(CliError::from_sim);
        }
    }
    Ok(Some(state.clone()))
}

fn cmd_run(
    config_path: &std::path::Path,
    out: Option<&std::path::Path>,
    format: Format,
    feed_forward: bool,
) -> CliResult<()> {
    let cfg = load_config(config_path)?;
    let records = run(&cfg).map_err(CliError::from_sim)?;
    let manifest = RunManifest::new("run", &canonical_config(&cfg), None);
    let content = match format {
        Format::Csv => {
            let mut s = manifest.csv_header();
            let dim = 1usize << cfg.n_parties;
            let mut header = String::from("outcome,parity,probability,class");
            for i in 0..dim {
                let _ = write!(header, ",amp{i}_re,amp{i}_im");
            }
            let _ = writeln!(s, "{header}");
            for record in &records {
                let class = record_class(record)?;
                let _ = write!(
                    s,
                    "{},{},{},{}",
                    record.outcome, record.parity, record.probability, class
                );
                match state_for_output(record, &cfg, feed_forward)? {
                    Some(state) => {
                        for amp in state.amplitudes() {
                            let _ = write!(s, ",{},{}", amp.re, amp.im);
                        }
                    }
                    None => {
                        for _ in 0..dim {
                            s.push_str(",,");
                        }
                    }
                }
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let mut outcomes = Vec::new();
            for record in &records {
                let class = record_class(record)?;
                let amplitudes = state_for_output(record, &cfg, feed_forward)?.map(|state| {
                    state
                        .amplitudes()
                        .iter()
                        .map(|a| serde_json::json!([a.re, a.im]))
                        .collect::<Vec<_>>()
                });
                outcomes.push(serde_json::json!({
                    "outcome": record.outcome,
                    "parity": record.parity.to_string(),
                    "probability": record.probability,
                    "class": class,
                    "amplitudes": amplitudes,
                }));
            }
            let doc = serde_json::json!({
                "manifest": manifest.to_json(),
                "outcomes": outcomes,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
    };
    emit(out, &content)
}

fn cmd_sample(
    config_path: &std::path::Path,
    shots: u64,
    seed: u64,
    out: Option<&std::path::Path>,
) -> CliResult<()> {
    if shots == 0 {
        return Err(CliError::Validation("shots must be at least 1".into()));
    }
    let cfg = load_config(config_path)?;
    let records = run(&cfg).map_err(CliError::from_sim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; records.len()];
    for _ in 0..shots {
        let mut x: f64 = rng.random();
        let mut chosen = records.len() - 1;
        for (i, record) in records.iter().enumerate() {
            if x < record.probability {
                chosen = i;
                break;
            }
            x -= record.probability;
        }
        counts[chosen] += 1;
    }
    let manifest = RunManifest::new("sample", &canonical_config(&cfg), Some(seed));
    let mut s = manifest.csv_header();
    let _ = writeln!(s, "outcome,count");
    for (record, count) in records.iter().zip(&counts) {
        let _ = writeln!(s, "{},{}", record.outcome, count);
    }
    emit(out, &s)
}

fn format_row_report(report: &RowReport) -> String {
    let alphas = report
        .alphas
        .iter()
        .map(|a| format!("{a}"))
        .collect::<Vec<_>>()
        .join(",");
    let fidelity = report
        .strict_fidelity
        .map(|f| format!("{f:.12}"))
        .unwrap_or_else(|| "-".into());
    format!(
        "{} table{} theta={:.12} alphas=[{}] parity={} expected={} class={} strict_fidelity={}",
        if report.pass { "PASS" } else { "FAIL" },
        report.table,
        report.theta,
        alphas,
        report.parity,
        report.label,
        report.actual_class,
        fidelity,
    )
}

fn cmd_tables(which: u8) -> CliResult<()> {
    let reports = if which == 1 {
        verify_table1().map_err(CliError::from_sim)?
    } else {
        verify_table2().map_err(CliError::from_sim)?
    };
    let mut failures = 0usize;
    for report in &reports {
        println!("{}", format_row_report(report));
        if !report.pass {
            failures += 1;
        }
    }
    println!(
        "table{which}: {}/{} cells passed",
        reports.len() - failures,
        reports.len()
    );
    if failures > 0 {
        Err(CliError::Check(format!("{failures} table{which} cells failed")))
    } else {
        Ok(())
    }
}

fn cmd_sweep_theta(
    n: usize,
    alphas: &[f64],
    steps: usize,
    shared_phase: &str,
    out: Option<&std::path::Path>,
) -> CliResult<()> {
    if steps == 0 {
        return Err(CliError::Validation("steps must be at least 1".into()));
    }
    let alphas: Vec<f64> = if alphas.is_empty() {
        vec![0.5; n]
    } else {
        alphas.to_vec()
    };
    let phase = match shared_phase.trim() {
        "1" => Complex64::new(1.0, 0.0),
        "i" => Complex64::new(0.0, 1.0),
        other => {
            return Err(CliError::Validation(format!(
                "shared_phase: expected \"1\" or \"i\", got \"{other}\""
            )))
        }
    };
    let canonical = format!(
        "{{\"command\":\"sweep-theta\",\"n\":{n},\"alphas\":[{}],\"steps\":{steps},\"shared_phase\":[{},{}]}}",
        alphas.iter().map(|a| format!("{a}")).collect::<Vec<_>>().join(","),
        phase.re,
        phase.im
    );
    let manifest = RunManifest::new("sweep-theta", &canonical, None);
    let mut s = manifest.csv_header();
    let _ = writeln!(s, "theta,parity,probability,class");
    for i in 0..=steps {
        let theta = i as f64 * std::f64::consts::TAU / steps as f64;
        let cfg =
            ProtocolConfig::new(n, theta, alphas.clone(), phase).map_err(CliError::from_sim)?;
        let cfg = match max_parties_from_env()? {
            Some(cap) => cfg.with_max_parties(cap).map_err(CliError::from_sim)?,
            None => cfg,
        };
        let b = branch_states(&cfg).map_err(CliError::from_sim)?;
        for (parity, prob, state) in
            [("even", b.even_prob, &b.even), ("odd", b.odd_prob, &b.odd)]
        {
            let class = classify(state.as_ref()).map_err(CliError::from_sim)?.class;
            let _ = writeln!(s, "{theta},{parity},{prob},{class}");
        }
    }
    emit(out, &s)
}

#[allow(clippy::too_many_arguments)]
fn cmd_efficiency(
    n_list: &[usize],
    l_max: f64,
    step: f64,
    eta0: f64,
    eta_d: f64,
    attenuation: f64,
    out: Option<&std::path::Path>,
) -> CliResult<()> {
    if !(step > 0.0) || !(l_max >= 0.0) {
        return Err(CliError::Validation(
            "step must be positive and l-max non-negative".into(),
        ));
    }
    let base = EfficiencyParams {
        eta0,
        eta_d,
        attenuation,
        ..Default::default()
    };
    let mut l_grid = Vec::new();
    let mut l = 0.0;
    while l <= l_max + 1e-9 {
        l_grid.push(l);
        l += step;
    }
    let rows = sweep(n_list, &l_grid, &base).map_err(CliError::from_sim)?;
    let n_txt = n_list
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let canonical = format!(
        "{{\"command\":\"efficiency\",\"n\":[{n_txt}],\"l_max\":{l_max},\"step\":{step},\"eta0\":{eta0},\"eta_d\":{eta_d},\"attenuation\":{attenuation}}}"
    );
    let manifest = RunManifest::new("efficiency", &canonical, None);
    let mut s = manifest.csv_header();
    let _ = writeln!(s, "N,L_km,eta_prior,eta_ours,enhancement");
    for row in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            row.n, row.l_km, row.eta_prior, row.eta_ours, row.enhancement
        );
    }
    emit(out, &s)
}

fn cmd_optical_verify(
    thetas: &[f64],
    lambdas: &[f64],
    tol: f64,
    out: Option<&std::path::Path>,
) -> CliResult<()> {
    if !(tol > 0.0) {
        return Err(CliError::Validation("tol must be positive".into()));
    }
    let thetas: Vec<f64> = if thetas.is_empty() {
        (0..=16)
            .map(|k| k as f64 * std::f64::consts::PI / 8.0)
            .collect()
    } else {
        thetas.to_vec()
    };
    let fmt_list = |xs: &[f64]| {
        xs.iter()
            .map(|x| format!("{x}"))
            .collect::<Vec<_>>()
            .join(",")
    };
    let canonical = format!(
        "{{\"command\":\"optical-verify\",\"thetas\":[{}],\"lambdas\":[{}],\"tol\":{tol}}}",
        fmt_list(&thetas),
        fmt_list(lambdas)
    );
    let manifest = RunManifest::new("optical-verify", &canonical, None);
    let mut s = manifest.csv_header();
    let _ = writeln!(
        s,
        "theta,lambda1,lambda2,detector_pair,probability,infidelity_vs_abstract"
    );
    let mut worst: f64 = 0.0;
    for &theta in &thetas {
        for &l1 in lambdas {
            for &l2 in lambdas {
                let report =
                    verify_against_abstract(theta, l1, l2, tol).map_err(CliError::from_sim)?;
                worst = worst.max(report.max_infidelity);
                for cmp in &report.per_outcome {
                    let _ = writeln!(
                        s,
                        "{theta},{l1},{l2},{},{},{}",
                        cmp.pair.label(),
                        cmp.optical_probability,
                        cmp.infidelity
                    );
                }
            }
        }
    }
    emit(out, &s)?;
    if worst > tol {
        Err(CliError::Check(format!(
            "optical equivalence failed: max infidelity {worst:.3e} > {tol:.3e}"
        )))
    } else {
        Ok(())
    }
}

fn parse_edges(text: &str) -> CliResult<Vec<(usize, usize)>> {
    let mut edges = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (a, b) = part
            .split_once('-')
            .ok_or_else(|| CliError::Validation(format!("edge \"{part}\" is not of the form i-j")))?;
        let i: usize = a
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("edge \"{part}\": bad vertex \"{a}\"")))?;
        let j: usize = b
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("edge \"{part}\": bad vertex \"{b}\"")))?;
        edges.push((i, j));
    }
    Ok(edges)
}

fn cmd_graph_verify(
    edges_text: &str,
    vertices: Option<usize>,
    raw: bool,
    sign: SignArg,
    out: Option<&std::path::Path>,
) -> CliResult<()> {
    let edges = parse_edges(edges_text)?;
    let inferred = edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(1);
    let n = vertices.unwrap_or(inferred);
    let graph = Graph::new(n, &edges).map_err(CliError::from_sim)?;
    let sign = match sign {
        SignArg::Plus => IcoSign::Plus,
        SignArg::Minus => IcoSign::Minus,
    };

    let reference = build_graph_state(&graph).map_err(CliError::from_sim)?;
    let constructed = build_ico_graph_state(&graph, sign, !raw).map_err(CliError::from_sim)?;
    let fidelity = reference
        .fidelity(&constructed)
        .map_err(CliError::from_sim)?;
    let identity_residual = correction_identity_residual(sign).map_err(CliError::from_sim)?;

    let mut spectra_match = true;
    if n >= 2 {
        for subset_mask in 1usize..(1 << n) {
            let keep: Vec<usize> = (0..n).filter(|q| subset_mask >> q & 1 == 1).collect();
            if keep.len() > n / 2 || keep.len() == n {
                continue;
            }
            let a = reduce(&constructed, &keep)
                .map_err(CliError::from_sim)?
                .eigenvalues();
            let b = reduce(&reference, &keep)
                .map_err(CliError::from_sim)?
                .eigenvalues();
            if a.iter().zip(&b).any(|(x, y)| (x - y).abs() > 1e-10) {
                spectra_match = false;
            }
        }
    }

    let canonical = format!(
        "{{\"command\":\"graph-verify\",\"vertices\":{n},\"edges\":\"{}\",\"raw\":{raw},\"sign\":\"{}\"}}",
        edges
            .iter()
            .map(|&(i, j)| format!("{i}-{j}"))
            .collect::<Vec<_>>()
            .join(","),
        match sign {
            IcoSign::Plus => "plus",
            IcoSign::Minus => "minus",
        }
    );
    let manifest = RunManifest::new("graph-verify", &canonical, None);
    let doc = serde_json::json!({
        "manifest": manifest.to_json(),
        "fidelity_to_graph_state": fidelity,
        "identity_residual": identity_residual,
        "spectra_match": spectra_match,
    });
    emit(
        out,
        &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()),
    )?;

    let ok = if raw {
        spectra_match && identity_residual <= 1e-12
    } else {
        spectra_match && identity_residual <= 1e-12 && fidelity >= 1.0 - 1e-9
    };
    if ok {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "graph verification failed: fidelity {fidelity}, residual {identity_residual:.3e}, spectra_match {spectra_match}"
        )))
    }
}
