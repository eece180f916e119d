//! Command-line driver: single-point evaluations, figure-window parameter
//! scans (CSV/JSON), spinor coefficient dumps, and the validation suite.
//!
//! Exit codes: 0 success, 1 validation failure, 2 bad arguments, 3 I/O
//! error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sncs::fock::{DeformationKind, DEFAULT_DIM};
use sncs::scan::{self, OutputFormat, Range, ScanConfig, ScanResult};
use sncs::supercoherent::{build_superposition, SuperCoherentSpec, SuperpositionParams};
use sncs::susy::{classify, KMatrix, CLASSIFY_TOL};
use sncs::validate::{run_validation, DEFAULT_SEED};
use sncs::C64;

const ENV_DIM: &str = "SUSY_NCS_DIM";
const ORACLE_CHECK_TOL: f64 = 1e-7;

#[derive(Parser)]
#[command(
    name = "sncs",
    about = "Nonlinear supercoherent states of the SUSY oscillator: uncertainties, geometric phases, validation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Heisenberg-product scan: sigma_x sigma_p over complex amplitudes, or
    /// (sigma_x sigma_p)^2 of the theta-family superposition when --theta or
    /// a spinor preset is given.
    Uncertainty(ScanArgs),
    /// Geometric-phase scan over the theta family (generic rows use the
    /// closed form, degenerate rows the matrix path).
    Geomphase(ScanArgs),
    /// Dump the coefficients of one supercoherent (superposition) state.
    State(StateArgs),
    /// Run the self-check suite; nonzero exit on any failure.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct ScanArgs {
    /// Deformation family: linear, nl (f = N + 1) or NL (f = N).
    #[arg(long, value_parser = parse_kind, default_value = "nl")]
    kind: DeformationKind,
    /// Mixing angle of the K matrix (k2 = cos theta, k3 = sin theta);
    /// switches the uncertainty scan to spinor mode.
    #[arg(long)]
    theta: Option<f64>,
    /// Superposition angle eta.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    eta: f64,
    /// Superposition phase lambda.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    re_min: f64,
    #[arg(long, default_value_t = 3.0)]
    re_max: f64,
    #[arg(long, default_value_t = 0.1)]
    re_step: f64,
    #[arg(long, default_value_t = 0.0)]
    im_min: f64,
    #[arg(long, default_value_t = 0.0)]
    im_max: f64,
    #[arg(long, default_value_t = 0.1)]
    im_step: f64,
    /// Fock truncation (falls back to SUSY_NCS_DIM, then the default).
    #[arg(long)]
    dim: Option<usize>,
    /// K-matrix classification tolerance.
    #[arg(long, default_value_t = CLASSIFY_TOL)]
    tol: f64,
    /// Oscillator frequency.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Recompute every row through the truncated-matrix path and append an
    /// oracle column; exits 1 if any row deviates by more than 1e-7.
    #[arg(long)]
    oracle_check: bool,
    /// Scan the fixed-free-parameter A/C eigenstate family instead of the
    /// +/- pair superposition (the linear-case figure convention).
    #[arg(long)]
    ac_basis: bool,
    /// Figure window preset (fig1..fig5 for uncertainty, fig6/fig7 for
    /// geomphase); overrides kind/theta/ranges.
    #[arg(long)]
    preset: Option<String>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_parser = parse_format, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args)]
struct StateArgs {
    #[arg(long, value_parser = parse_kind, default_value = "nl")]
    kind: DeformationKind,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    theta: f64,
    /// Re of the eigenvalue.
    #[arg(long, default_value_t = 1.0)]
    re: f64,
    /// Im of the eigenvalue.
    #[arg(long, default_value_t = 0.0)]
    im: f64,
    /// Superposition angle eta (0 selects the plus state alone).
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = CLASSIFY_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_parser = parse_format, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

fn parse_kind(s: &str) -> Result<DeformationKind, String> {
    match s {
        "linear" => Ok(DeformationKind::Linear),
        "nl" => Ok(DeformationKind::ShiftedNumber),
        "NL" => Ok(DeformationKind::Number),
        other => Err(format!(
            "unknown kind {other:?} (expected linear, nl or NL)"
        )),
    }
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(format!("unknown format {other:?} (expected csv or json)")),
    }
}

fn env_dim() -> Option<usize> {
    std::env::var(ENV_DIM).ok().and_then(|v| v.parse().ok())
}

fn resolve_dim(flag: Option<usize>, fallback: usize) -> usize {
    flag.or_else(env_dim).unwrap_or(fallback)
}

enum Sink {
    Stdout(io::Stdout),
    File(BufWriter<File>),
}

impl Sink {
    fn open(path: &Option<String>) -> io::Result<Self> {
        match path {
            None => Ok(Sink::Stdout(io::stdout())),
            Some(p) => Ok(Sink::File(BufWriter::new(File::create(p)?))),
        }
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            Sink::Stdout(s) => s.write(buf),
            Sink::File(f) => f.write(buf),
        }
    }
    fn flush(&mut self) -> io::Result<()> {
        match self {
            Sink::Stdout(s) => s.flush(),
            Sink::File(f) => f.flush(),
        }
    }
}

fn build_config(args: &ScanArgs, command: &str) -> Result<(ScanConfig, String), String> {
    if let Some(name) = &args.preset {
        let (mut config, preset_command) =
            scan::preset(name).map_err(|e| e.to_string())?;
        if preset_command != command {
            return Err(format!(
                "preset {name} belongs to the {preset_command} command"
            ));
        }
        config.dim = resolve_dim(args.dim, config.dim);
        config.oracle_check = args.oracle_check;
        if args.ac_basis {
            config.ac_basis = true;
        }
        return Ok((config, command.to_string()));
    }
    let re = Range::new(args.re_min, args.re_max, args.re_step).map_err(|e| e.to_string())?;
    let im = if args.im_min == args.im_max {
        Range::single(args.im_min)
    } else {
        Range::new(args.im_min, args.im_max, args.im_step).map_err(|e| e.to_string())?
    };
    let theta = match (command, args.theta) {
        ("geomphase", None) => Some(Range::single(std::f64::consts::FRAC_PI_4)),
        (_, Some(t)) => Some(Range::single(t)),
        (_, None) => None,
    };
    Ok((
        ScanConfig {
            kind: args.kind,
            theta,
            eta: args.eta,
            lambda: args.lambda,
            re,
            im,
            dim: resolve_dim(args.dim, DEFAULT_DIM),
            tolerance: args.tol,
            omega: args.omega,
            oracle_check: args.oracle_check,
            ac_basis: args.ac_basis,
            notes: vec![],
        },
        command.to_string(),
    ))
}

fn emit(result: &ScanResult, out: &Option<String>, format: OutputFormat) -> ExitCode {
    let mut sink = match Sink::open(out) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot open output: {e}");
            return ExitCode::from(3);
        }
    };
    let written = match format {
        OutputFormat::Csv => result.write_csv(&mut sink),
        OutputFormat::Json => result.write_json(&mut sink),
    }
    .and_then(|()| sink.flush().map_err(Into::into));
    if let Err(e) = written {
        eprintln!("error: write failed: {e}");
        return ExitCode::from(3);
    }
    if let Some(max) = result.max_oracle_deviation() {
        if max > ORACLE_CHECK_TOL {
            eprintln!(
                "oracle check failed: max |closed - oracle| = {max:.3e} > {ORACLE_CHECK_TOL:.1e}"
            );
            return ExitCode::from(1);
        }
        eprintln!("oracle check passed: max |closed - oracle| = {max:.3e}");
    }
    if result.failed_rows() > 0 {
        eprintln!(
            "note: {} of {} rows carry error markers",
            result.failed_rows(),
            result.rows.len()
        );
    }
    ExitCode::SUCCESS
}

fn run_scan(args: &ScanArgs, command: &str) -> ExitCode {
    let (config, _) = match build_config(args, command) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let result = match command {
        "uncertainty" => scan::run_uncertainty_scan(&config),
        _ => scan::run_geomphase_scan(&config),
    };
    emit(&result, &args.out, args.format)
}

fn run_state(args: &StateArgs) -> ExitCode {
    let dim = resolve_dim(args.dim, DEFAULT_DIM);
    let state = KMatrix::theta_family(args.theta)
        .and_then(|base| classify(base.k1, base.k2, base.k3, base.k4, args.tol))
        .and_then(|k| {
            let spec = SuperCoherentSpec::new(k, args.kind, C64::new(args.re, args.im));
            build_superposition(
                &spec,
                &SuperpositionParams::new(args.eta, args.lambda),
                dim,
            )
        });
    let state = match state {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut sink = match Sink::open(&args.out) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot open output: {e}");
            return ExitCode::from(3);
        }
    };
    let write = |sink: &mut Sink| -> io::Result<()> {
        match args.format {
            OutputFormat::Csv => {
                writeln!(sink, "# sncs state dump")?;
                writeln!(
                    sink,
                    "# kind: {}, theta: {}, eigenvalue: {} + {} i, eta: {}, lambda: {}, dim: {}",
                    args.kind.label(),
                    scan::fmt_f64(args.theta),
                    scan::fmt_f64(args.re),
                    scan::fmt_f64(args.im),
                    scan::fmt_f64(args.eta),
                    scan::fmt_f64(args.lambda),
                    dim
                )?;
                writeln!(sink, "n,upper_re,upper_im,lower_re,lower_im")?;
                for n in 0..state.dim() {
                    let u = state.upper().coeff(n);
                    let l = state.lower().coeff(n);
                    writeln!(
                        sink,
                        "{n},{},{},{},{}",
                        scan::fmt_f64(u.re),
                        scan::fmt_f64(u.im),
                        scan::fmt_f64(l.re),
                        scan::fmt_f64(l.im)
                    )?;
                }
                Ok(())
            }
            OutputFormat::Json => {
                let rows: Vec<serde_json::Value> = (0..state.dim())
                    .map(|n| {
                        let u = state.upper().coeff(n);
                        let l = state.lower().coeff(n);
                        serde_json::json!({
                            "n": n,
                            "upper_re": u.re,
                            "upper_im": u.im,
                            "lower_re": l.re,
                            "lower_im": l.im,
                        })
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut *sink, &rows)
                    .map_err(io::Error::other)?;
                writeln!(sink)
            }
        }
    };
    if let Err(e) = write(&mut sink).and_then(|()| sink.flush()) {
        eprintln!("error: write failed: {e}");
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}

fn run_validate(args: &ValidateArgs) -> ExitCode {
    let dim = resolve_dim(args.dim, DEFAULT_DIM);
    let report = run_validation(dim, args.seed);
    print!("{report}");
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Uncertainty(args) => run_scan(args, "uncertainty"),
        Command::Geomphase(args) => run_scan(args, "geomphase"),
        Command::State(args) => run_state(args),
        Command::Validate(args) => run_validate(args),
    }
}
