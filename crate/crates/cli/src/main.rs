use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use comixer::certify::{run_sweep, CertifyReport, ReportFormat, SweepConfig};
use comixer::lab::{
    estimate_joint_lipschitz, estimate_per_arg, estimate_per_arg_lipschitz, estimate_retraction_lipschitz, gap_probe,
    IntervalSpace, QuotientSpace, SamplerConfig, PER_ARG_BOUND,
};
use comixer::measure::{
    geodesic_point, quotient_class, quotient_comixer, quotient_dist, rho, set_comixer, set_mixer, IntervalSet,
};
use comixer::subset::{hausdorff_dist, retraction_3_to_2, FiniteSubset};
use comixer::{NormSpec, OpKind, TernaryOp, Vector};

const SEED_ENV: &str = "METRIC_LAB_SEED";

/// Failure classes, mapped onto the process exit code.
#[derive(Debug)]
enum Failure {
    Violation(String),
    Input(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Violation(_) => 1,
            Failure::Input(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl From<comixer::Error> for Failure {
    fn from(e: comixer::Error) -> Self {
        Failure::Input(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Input(e.into())
}

fn io_err<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Io(e.into())
}

#[derive(Parser)]
#[command(name = "comixer", version, about = "Mixers, co-mixers and their Lipschitz certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalOp {
    Incenter,
    Nagel,
    Median,
    Group1d,
    Setmix,
    Setcomix,
    Quotcomix,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LabOp {
    Incenter,
    Nagel,
    Median,
    Group1d,
    Retraction,
    Setmix,
    Setcomix,
    Quotcomix,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(clap::Args, Clone)]
struct NormArgs {
    /// Norm exponent: 1, 1.5, 2, inf, ... (or a full spec such as "p2;weights=1,2")
    #[arg(long, default_value = "2")]
    p: String,
    /// Comma separated coordinate weights
    #[arg(long)]
    weights: Option<String>,
}

impl NormArgs {
    fn spec(&self) -> Result<NormSpec, Failure> {
        let spec: NormSpec = self.p.parse()?;
        match &self.weights {
            None => Ok(spec),
            Some(w) => {
                let w = w
                    .split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|_| anyhow!("invalid weight {t:?}")))
                    .collect::<anyhow::Result<Vec<_>>>()
                    .map_err(Failure::Input)?;
                Ok(spec.with_weights(w)?)
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an operation on triples "x;y;z" (vectors or interval sets)
    Eval {
        #[arg(long, value_enum)]
        op: EvalOp,
        #[command(flatten)]
        norm: NormArgs,
        /// Triples to evaluate; read line by line from stdin when omitted
        #[arg(allow_hyphen_values = true)]
        triples: Vec<String>,
    },
    /// Run a certification sweep and write its report
    Certify {
        /// JSON sweep configuration; built-in defaults when omitted
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report destination (overrides the config); stdout when neither is set
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        samples: Option<usize>,
        /// Seed (overrides the config and METRIC_LAB_SEED)
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Apply the retraction X(3) -> X(2) and report per-pair Lipschitz ratios
    Retract {
        #[command(flatten)]
        norm: NormArgs,
        /// Retract a single subset "x1,.. | y1,.. | z1,.." and print the result
        #[arg(long, allow_hyphen_values = true)]
        set: Option<String>,
        /// File of "E ; E'" lines; stdin when omitted
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Boolean and metric operations on interval sets such as "0-0.25,0.75-1"
    MeasureAlgebra {
        #[command(subcommand)]
        op: SetCommand,
    },
    /// Tabulate the interchange candidate on R \ (-1, 1)
    GapProbe {
        #[arg(long, default_value_t = 100.0)]
        x_max: f64,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Estimate a Lipschitz constant by sampling and local search
    Lipschitz {
        #[arg(long, value_enum)]
        op: LabOp,
        /// Perturbed argument (1, 2 or 3); ignored with --joint and for retraction
        #[arg(long, default_value_t = 1)]
        arg: usize,
        /// Perturb all three arguments at once
        #[arg(long)]
        joint: bool,
        #[command(flatten)]
        norm: NormArgs,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1.0)]
        box_radius: f64,
        /// Override the claimed bound
        #[arg(long)]
        bound: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SetCommand {
    Union { a: String, b: String },
    Intersection { a: String, b: String },
    Difference { a: String, b: String },
    SymDiff { a: String, b: String },
    Complement { a: String },
    Measure { a: String },
    /// Measure of the symmetric difference
    Rho { a: String, b: String },
    /// Majority of three sets
    Mix { a: String, b: String, c: String },
    /// Parity of three sets
    Comix { a: String, b: String, c: String },
    /// Canonical representative of the class of A modulo complement
    Class { a: String },
    /// Distance between the classes of A and B
    QuotientDist { a: String, b: String },
    /// The parity operation on classes
    QuotientComix { a: String, b: String, c: String },
    /// The interval [0, t]
    Geodesic { t: f64 },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Violation(msg) => eprintln!("violation: {msg}"),
                Failure::Input(e) => eprintln!("error: {e:#}"),
                Failure::Io(e) => eprintln!("I/O error: {e:#}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Eval { op, norm, triples } => cmd_eval(op, &norm, triples),
        Command::Certify { config, output, format, samples, seed } => cmd_certify(config, output, format, samples, seed),
        Command::Retract { norm, set, input, output } => cmd_retract(&norm, set, input, output),
        Command::MeasureAlgebra { op } => cmd_measure_algebra(op),
        Command::GapProbe { x_max, step, format } => cmd_gap_probe(x_max, step, format),
        Command::Lipschitz { op, arg, joint, norm, dim, samples, seed, box_radius, bound, output } => {
            let seed = resolve_seed(seed, 42)?;
            cmd_lipschitz(op, arg, joint, &norm, dim, samples, seed, box_radius, bound, output)
        }
    }
}

fn resolve_seed(flag: Option<u64>, fallback: u64) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| input(anyhow!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(fallback),
    }
}

fn read_lines(path: Option<&Path>) -> Result<Vec<String>, Failure> {
    let lines: Vec<String> = match path {
        Some(p) => fs::read_to_string(p)
            .with_context(|| format!("reading {}", p.display()))
            .map_err(Failure::Io)?
            .lines()
            .map(str::to_owned)
            .collect(),
        None => io::stdin().lock().lines().collect::<io::Result<_>>().map_err(io_err)?,
    };
    Ok(lines.into_iter().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#')).collect())
}

fn write_output(path: Option<&Path>, body: &[u8]) -> CmdResult {
    match path {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())).map_err(Failure::Io),
        None => io::stdout().write_all(body).map_err(io_err),
    }
}

fn split3(s: &str) -> Result<[&str; 3], Failure> {
    let parts: Vec<&str> = s.split(';').map(str::trim).collect();
    <[&str; 3]>::try_from(parts).map_err(|p| input(anyhow!("expected three ';'-separated arguments, got {}", p.len())))
}

fn eval_one(op: EvalOp, spec: &NormSpec, triple: &str) -> Result<String, Failure> {
    let [x, y, z] = split3(triple)?;
    let vector_kind = match op {
        EvalOp::Incenter => Some(OpKind::IncenterMixer),
        EvalOp::Nagel => Some(OpKind::NagelComixer),
        EvalOp::Median => Some(OpKind::MedianMixer),
        EvalOp::Group1d => Some(OpKind::GroupComixer1d),
        _ => None,
    };
    if let Some(kind) = vector_kind {
        let (a, b, c): (Vector, Vector, Vector) = (x.parse()?, y.parse()?, z.parse()?);
        return Ok(TernaryOp::new(kind, spec.clone()).apply(&a, &b, &c)?.to_string());
    }
    let (a, b, c): (IntervalSet, IntervalSet, IntervalSet) = (x.parse()?, y.parse()?, z.parse()?);
    Ok(match op {
        EvalOp::Setmix => set_mixer(&a, &b, &c).to_string(),
        EvalOp::Setcomix => set_comixer(&a, &b, &c).to_string(),
        _ => quotient_comixer(&quotient_class(&a), &quotient_class(&b), &quotient_class(&c)).to_string(),
    })
}

fn cmd_eval(op: EvalOp, norm: &NormArgs, triples: Vec<String>) -> CmdResult {
    let spec = norm.spec()?;
    let triples = if triples.is_empty() { read_lines(None)? } else { triples };
    let mut out = String::new();
    for t in &triples {
        out.push_str(&eval_one(op, &spec, t)?);
        out.push('\n');
    }
    write_output(None, out.as_bytes())
}

#[derive(Serialize)]
struct CertifyOutput<'a> {
    generated_at: u64,
    #[serde(flatten)]
    report: &'a CertifyReport,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    kind: &'a str,
    name: &'a str,
    op: &'a str,
    arg_index: Option<usize>,
    norm: Option<&'a str>,
    dim: Option<usize>,
    samples: usize,
    value: f64,
    bound: f64,
    pass: bool,
}

fn report_csv(report: &CertifyReport) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &report.lipschitz {
        w.serialize(CsvRow {
            kind: "lipschitz",
            name: &r.mode,
            op: &r.op,
            arg_index: r.arg_index,
            norm: r.norm.as_deref(),
            dim: r.dim,
            samples: r.samples,
            value: r.estimate,
            bound: r.claimed_bound + r.tolerance,
            pass: r.pass,
        })?;
    }
    for c in &report.checks {
        w.serialize(CsvRow {
            kind: "check",
            name: &c.name,
            op: &c.op,
            arg_index: None,
            norm: c.norm.as_deref(),
            dim: c.dim,
            samples: c.cases,
            value: c.worst,
            bound: c.threshold,
            pass: c.pass,
        })?;
    }
    Ok(w.into_inner()?)
}

fn cmd_certify(
    config: Option<PathBuf>,
    output: Option<PathBuf>,
    format: Option<Format>,
    samples: Option<usize>,
    seed: Option<u64>,
) -> CmdResult {
    let mut cfg = match &config {
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("reading {}", p.display()))
                .map_err(Failure::Io)?;
            serde_json::from_str::<SweepConfig>(&text)
                .with_context(|| format!("parsing {}", p.display()))
                .map_err(Failure::Input)?
        }
        None => SweepConfig::default(),
    };
    cfg.seed = resolve_seed(seed, cfg.seed)?;
    if let Some(n) = samples {
        cfg.samples = n;
    }
    if let Some(f) = format {
        cfg.format = f.into();
    }
    if let Some(p) = output {
        cfg.output_path = Some(p.to_string_lossy().into_owned());
    }
    cfg.validate()?;

    let report = run_sweep(&cfg)?;
    let body = match cfg.format {
        ReportFormat::Json => {
            let generated_at = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            let mut s = serde_json::to_string_pretty(&CertifyOutput { generated_at, report: &report }).map_err(io_err)?;
            s.push('\n');
            s.into_bytes()
        }
        ReportFormat::Csv => report_csv(&report).map_err(io_err)?,
    };
    write_output(cfg.output_path.as_deref().map(Path::new), &body)?;

    let total = report.lipschitz.len() + report.checks.len();
    eprintln!("{} of {total} results pass", total - report.failures());
    if report.all_pass {
        Ok(())
    } else {
        for r in report.lipschitz.iter().filter(|r| !r.pass) {
            eprintln!(
                "  {} {} arg={:?} norm={:?} dim={:?}: estimate {} > bound {}",
                r.mode, r.op, r.arg_index, r.norm, r.dim, r.estimate, r.claimed_bound
            );
        }
        for c in report.checks.iter().filter(|c| !c.pass) {
            eprintln!("  {} {} norm={:?} dim={:?}: {} > {}", c.name, c.op, c.norm, c.dim, c.worst, c.threshold);
        }
        Err(Failure::Violation(format!("{} result(s) failed", report.failures())))
    }
}

#[derive(Serialize)]
struct RetractRow {
    pair: usize,
    input_distance: f64,
    output_distance: f64,
    ratio: Option<f64>,
}

fn cmd_retract(norm: &NormArgs, set: Option<String>, input_path: Option<PathBuf>, output: Option<PathBuf>) -> CmdResult {
    let spec = norm.spec()?;
    if let Some(s) = set {
        let e: FiniteSubset = s.parse()?;
        let image = retraction_3_to_2(&e, &spec)?;
        return write_output(output.as_deref(), format!("{image}\n").as_bytes());
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for (i, line) in read_lines(input_path.as_deref())?.iter().enumerate() {
        let (l, r) = line
            .split_once(';')
            .ok_or_else(|| input(anyhow!("line {}: expected \"E ; E'\"", i + 1)))?;
        let e: FiniteSubset = l.trim().parse()?;
        let f: FiniteSubset = r.trim().parse()?;
        let d_in = hausdorff_dist(&e, &f, &spec)?;
        let d_out = hausdorff_dist(&retraction_3_to_2(&e, &spec)?, &retraction_3_to_2(&f, &spec)?, &spec)?;
        let ratio = (d_in > 0.0).then(|| d_out / d_in);
        w.serialize(RetractRow { pair: i + 1, input_distance: d_in, output_distance: d_out, ratio }).map_err(io_err)?;
    }
    let body = w.into_inner().map_err(|e| io_err(anyhow!("{e}")))?;
    write_output(output.as_deref(), &body)
}

fn cmd_measure_algebra(op: SetCommand) -> CmdResult {
    fn p(s: &str) -> Result<IntervalSet, Failure> {
        Ok(s.parse()?)
    }
    let line = match op {
        SetCommand::Union { a, b } => p(&a)?.union(&p(&b)?).to_string(),
        SetCommand::Intersection { a, b } => p(&a)?.intersection(&p(&b)?).to_string(),
        SetCommand::Difference { a, b } => p(&a)?.difference(&p(&b)?).to_string(),
        SetCommand::SymDiff { a, b } => p(&a)?.sym_diff(&p(&b)?).to_string(),
        SetCommand::Complement { a } => p(&a)?.complement().to_string(),
        SetCommand::Measure { a } => p(&a)?.measure().to_string(),
        SetCommand::Rho { a, b } => rho(&p(&a)?, &p(&b)?).to_string(),
        SetCommand::Mix { a, b, c } => set_mixer(&p(&a)?, &p(&b)?, &p(&c)?).to_string(),
        SetCommand::Comix { a, b, c } => set_comixer(&p(&a)?, &p(&b)?, &p(&c)?).to_string(),
        SetCommand::Class { a } => quotient_class(&p(&a)?).to_string(),
        SetCommand::QuotientDist { a, b } => quotient_dist(&quotient_class(&p(&a)?), &quotient_class(&p(&b)?)).to_string(),
        SetCommand::QuotientComix { a, b, c } => {
            quotient_comixer(&quotient_class(&p(&a)?), &quotient_class(&p(&b)?), &quotient_class(&p(&c)?)).to_string()
        }
        SetCommand::Geodesic { t } => geodesic_point(t)?.to_string(),
    };
    write_output(None, format!("{line}\n").as_bytes())
}

fn cmd_gap_probe(x_max: f64, step: f64, format: Format) -> CmdResult {
    let probe = gap_probe(x_max, step)?;
    let body = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&probe).map_err(io_err)?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &probe.rows {
                w.serialize(row).map_err(io_err)?;
            }
            w.into_inner().map_err(|e| io_err(anyhow!("{e}")))?
        }
    };
    write_output(None, &body)?;
    if probe.stays_in_left_component && probe.displacement_lower_bound_holds {
        Ok(())
    } else {
        Err(Failure::Violation("candidate left the component of -1".into()))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_lipschitz(
    op: LabOp,
    arg: usize,
    joint: bool,
    norm: &NormArgs,
    dim: usize,
    samples: usize,
    seed: u64,
    box_radius: f64,
    bound: Option<f64>,
    output: Option<PathBuf>,
) -> CmdResult {
    let spec = norm.spec()?;
    let cfg = SamplerConfig::new(seed, samples, dim).with_box_radius(box_radius);
    let kind = match op {
        LabOp::Incenter => Some(OpKind::IncenterMixer),
        LabOp::Nagel => Some(OpKind::NagelComixer),
        LabOp::Median => Some(OpKind::MedianMixer),
        LabOp::Group1d => Some(OpKind::GroupComixer1d),
        _ => None,
    };
    if joint && kind.is_none() {
        return Err(input(anyhow!("--joint applies to vector operations only")));
    }
    let report = match (op, kind) {
        (_, Some(kind)) => {
            let top = TernaryOp::new(kind, spec.clone());
            let r = if joint {
                estimate_joint_lipschitz(&top, &cfg, &spec)?
            } else {
                estimate_per_arg_lipschitz(&top, arg, &cfg, &spec)?
            };
            r.map_witness(ToString::to_string)
        }
        (LabOp::Retraction, _) => estimate_retraction_lipschitz(&cfg, &spec)?.map_witness(ToString::to_string),
        (LabOp::Setmix, _) => {
            estimate_per_arg(&IntervalSpace::default(), "setmix", set_mixer, arg, &cfg, PER_ARG_BOUND, 0.0)?
                .map_witness(ToString::to_string)
        }
        (LabOp::Setcomix, _) => {
            estimate_per_arg(&IntervalSpace::default(), "setcomix", set_comixer, arg, &cfg, PER_ARG_BOUND, 0.0)?
                .map_witness(ToString::to_string)
        }
        (LabOp::Quotcomix, _) => {
            estimate_per_arg(&QuotientSpace::default(), "quotcomix", quotient_comixer, arg, &cfg, PER_ARG_BOUND, 0.0)?
                .map_witness(ToString::to_string)
        }
        _ => unreachable!("vector operations are handled above"),
    };
    let report = match bound {
        Some(b) => report.with_claimed_bound(b),
        None => report,
    };
    let mut body = serde_json::to_string_pretty(&report).map_err(io_err)?;
    body.push('\n');
    write_output(output.as_deref(), body.as_bytes())?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Violation(format!("estimate {} exceeds bound {}", report.estimate, report.claimed_bound)))
    }
}
