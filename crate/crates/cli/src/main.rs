//! `superopt`: superoptimal analysis and unitary interpolants of rational
//! matrix symbols stored as JSON.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use superopt::hankel::hankel_norm;
use superopt::interpolant::{interpolant_from_report, InterpolantOptions, UNIT_TOL};
use superopt::matfun::MatSymbol;
use superopt::symbol_file::{Meta, SymbolFile};
use superopt::thematic::superoptimal;
use superopt::wh_index::{verify_interpolant, verify_symbol, Certificate, VerifyTolerances};
use superopt::Error;

const EXIT_INTERNAL: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "superopt", version, about = "Superoptimal approximation and unitary interpolants")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Grid size on the circle (overrides SUPEROPT_GRID and file meta).
    #[arg(long, global = true, value_name = "N")]
    grid: Option<usize>,
    /// Tolerance for treating a superoptimal value as 1.
    #[arg(long, global = true, value_name = "X")]
    tol_construct: Option<f64>,
    /// Unitarity and Fourier-match tolerance for certificates.
    #[arg(long, global = true, value_name = "Y")]
    tol_verify: Option<f64>,
    /// Write the JSON report or certificate here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hankel norm and superoptimal values/indices of a symbol.
    Analyze { phi: PathBuf },
    /// Construct a unitary interpolant with the given nonnegative indices.
    Interpolate {
        phi: PathBuf,
        /// Comma-separated nonnegative indices, nondecreasing; may be empty.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        indices: String,
        /// Output symbol file for U (stdout when omitted).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Certify that U is a unitary interpolant of Phi.
    Verify {
        phi: PathBuf,
        u: PathBuf,
        /// Also analyze Phi and check the negative indices against it.
        #[arg(long)]
        analyze: bool,
        /// Expected nonnegative indices, comma-separated.
        #[arg(long)]
        indices: Option<String>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NormTooLarge { .. } => EXIT_INFEASIBLE,
            _ => EXIT_INTERNAL,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INTERNAL, message: message.into() }
}

#[derive(Serialize)]
struct AnalyzeReport {
    n: usize,
    hankel_norm: f64,
    t: Vec<f64>,
    k: Vec<i64>,
    monotone: bool,
    r: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
}

#[derive(Serialize)]
struct InterpolateReport<'a> {
    hankel_norm: f64,
    t: &'a [f64],
    k: &'a [i64],
    requested: &'a [i64],
    unique: bool,
    certificate: &'a Certificate,
}

struct Settings {
    unit_tol: f64,
    verify: VerifyTolerances,
}

impl Settings {
    fn new(common: &Common, meta: &Meta) -> Self {
        let unit_tol = common.tol_construct.or(meta.tol_construct).unwrap_or(UNIT_TOL);
        let mut verify = VerifyTolerances::default();
        if let Some(y) = common.tol_verify.or(meta.tol_verify) {
            verify.unitarity = y;
            verify.fourier = y;
            verify.analyticity = 10.0 * y;
        }
        Self { unit_tol, verify }
    }
}

fn parse_indices(text: &str) -> Result<Vec<i64>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<i64>().map_err(|_| usage(format!("invalid index {s:?}"))))
        .collect()
}

fn load(path: &Path, disk_free: bool) -> Result<(SymbolFile, MatSymbol), Failure> {
    let file = SymbolFile::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let sym = file.to_symbol(disk_free).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok((file, sym))
}

fn emit(report: Option<&Path>, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    match report {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn print_certificate(cert: &Certificate) {
    for c in &cert.checks {
        let tag = if c.passed { "ok  " } else { "FAIL" };
        eprintln!("{tag} {:<20} {} (expected {})", c.name, c.measured, c.expected);
    }
    for n in &cert.notes {
        eprintln!("note: {n}");
    }
}

fn analyze(common: &Common, path: &Path) -> Result<(), Failure> {
    let (file, phi) = load(path, true)?;
    let settings = Settings::new(common, &file.meta);
    let norm = hankel_norm(&phi);
    let rep = superoptimal(&phi)?;
    let message = rep.k.is_empty().then(|| "already analytic".to_string());
    if let Some(m) = &message {
        eprintln!("{m}");
    }
    emit(
        common.report.as_deref(),
        &AnalyzeReport {
            n: phi.size(),
            hankel_norm: norm,
            r: rep.count_at_least(1.0, settings.unit_tol),
            t: rep.t,
            k: rep.k,
            monotone: rep.monotone,
            message,
        },
    )
}

fn interpolate(common: &Common, path: &Path, indices: &str, out: Option<&Path>) -> Result<(), Failure> {
    let (file, phi) = load(path, true)?;
    let settings = Settings::new(common, &file.meta);
    let d_tail = parse_indices(indices)?;
    let norm = hankel_norm(&phi);
    if norm > 1.0 + settings.unit_tol {
        return Err(Error::NormTooLarge { norm }.into());
    }
    let rep = superoptimal(&phi)?;
    let opts = InterpolantOptions { unit_tol: settings.unit_tol, skip_certificate: true };
    let result = interpolant_from_report(&phi, &rep, &d_tail, &opts)?;
    let cert = verify_interpolant(&phi, &result, Some(&rep), &settings.verify);

    let u_file = SymbolFile::from_symbol(&result.u, file.meta.clone());
    match out {
        Some(p) => u_file.write(p)?,
        None => println!("{}", u_file.to_json()),
    }
    let report = InterpolateReport {
        hankel_norm: norm,
        t: &rep.t,
        k: &rep.k,
        requested: &result.requested,
        unique: result.unique,
        certificate: &cert,
    };
    match (&common.report, out) {
        (Some(p), _) => emit(Some(p), &report)?,
        // U went to a file, so stdout is free for the certificate
        (None, Some(_)) => emit(None, &report)?,
        (None, None) => {}
    }
    print_certificate(&cert);
    if cert.passed {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VERIFY, message: "certificate failed".into() })
    }
}

fn verify(common: &Common, phi_path: &Path, u_path: &Path, analyze: bool, indices: Option<&str>) -> Result<(), Failure> {
    let (file, phi) = load(phi_path, true)?;
    // U legitimately has poles inside the disk
    let (_, u) = load(u_path, false)?;
    let settings = Settings::new(common, &file.meta);
    let requested = indices.map(parse_indices).transpose()?;
    let rep = if analyze { Some(superoptimal(&phi)?) } else { None };
    let cert = verify_symbol(&phi, &u, requested.as_deref(), rep.as_ref(), &settings.verify);
    emit(common.report.as_deref(), &cert)?;
    print_certificate(&cert);
    if cert.passed {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VERIFY, message: "certificate failed".into() })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INTERNAL) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.common.grid {
        // read once by the library on first use
        std::env::set_var("SUPEROPT_GRID", n.to_string());
    } else if let Some(n) = grid_from_meta(&cli.cmd) {
        if std::env::var_os("SUPEROPT_GRID").is_none() {
            std::env::set_var("SUPEROPT_GRID", n.to_string());
        }
    }
    let outcome = match &cli.cmd {
        Cmd::Analyze { phi } => analyze(&cli.common, phi),
        Cmd::Interpolate { phi, indices, out } => interpolate(&cli.common, phi, indices, out.as_deref()),
        Cmd::Verify { phi, u, analyze, indices } => verify(&cli.common, phi, u, *analyze, indices.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn grid_from_meta(cmd: &Cmd) -> Option<usize> {
    let path = match cmd {
        Cmd::Analyze { phi } | Cmd::Interpolate { phi, .. } | Cmd::Verify { phi, .. } => phi,
    };
    SymbolFile::read(path).ok()?.meta.grid
}
