use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chernpatch::strata::ModelJson;
use chernpatch::suite::{chern_pifiber_report, curvature_table, dual_value, run_suite, SuiteConfig, SUITES};
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "chernpatch", version, about = "Chern–Weil forms of patched connections: verification suites and computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a named verification suite and emit a JSON report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override every check's tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Override every check's primary sample count.
        #[arg(long)]
        samples: Option<usize>,
        /// Model JSON supplying strata, flags and eps0.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Add a known-bad input so the affected check must fail.
        #[arg(long)]
        inject_fault: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Curvature table of an invariant connection at the base point.
    Curvature {
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "nomizu")]
        connection: String,
        #[arg(long, default_value = "standard")]
        rep: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chern-form checks on a patched-connection model.
    Chern {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "pifiber")]
        check: String,
        #[arg(long, default_value = "standard")]
        rep: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value_t = 12)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact Chern number of a compact dual (p:n or gr:k,n).
    Dual {
        #[arg(long)]
        space: String,
        #[arg(long, default_value = "tangent")]
        bundle: String,
        #[arg(long)]
        monomial: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Check,
    Usage(String),
}

fn emit(json: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, format!("{json}\n")).map_err(|e| Failure::Usage(format!("writing {}: {e}", path.display()))),
        None => match writeln!(std::io::stdout().lock(), "{json}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Usage(format!("writing stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn load_model(path: &Path) -> Result<ModelJson, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("reading {}: {e}", path.display())))?;
    ModelJson::parse(&text).map_err(|e| Failure::Usage(e.to_string()))
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON value serializes")
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Verify { suite, seed, tol, samples, model, inject_fault, out } => {
            if !SUITES.contains(&suite.as_str()) {
                return Err(Failure::Usage(format!("unknown suite {suite}; expected one of {}", SUITES.join(", "))));
            }
            let model = model.as_deref().map(load_model).transpose()?;
            let config = SuiteConfig { suite, seed, tol, samples, model, inject_fault };
            let report = run_suite(&config).map_err(usage)?;
            emit(&report.to_json(), out.as_deref())?;
            if report.pass { Ok(()) } else { Err(Failure::Check) }
        }
        Command::Curvature { group, connection, rep, out } => {
            let table = curvature_table(&group, &connection, &rep).map_err(usage)?;
            emit(&pretty(&table), out.as_deref())
        }
        Command::Chern { model, check, rep, seed, tol, samples, out } => {
            if check != "pifiber" {
                return Err(Failure::Usage(format!("unknown check {check}; expected pifiber")));
            }
            let model = load_model(&model)?;
            let (report, pass) = chern_pifiber_report(&model, &rep, seed, samples, tol).map_err(usage)?;
            emit(&pretty(&report), out.as_deref())?;
            if pass { Ok(()) } else { Err(Failure::Check) }
        }
        Command::Dual { space, bundle, monomial, out } => {
            let value = dual_value(&space, &bundle, &monomial).map_err(usage)?;
            emit(&pretty(&value), out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("usage: chernpatch <verify|curvature|chern|dual> [options]; see --help");
            ExitCode::from(2)
        }
    }
}
