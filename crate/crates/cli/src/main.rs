use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use courant_kit::{parse_point, run_corpus, run_document, CliError, Command, NondegMode, Options, Report, Suite};

/// Exact certification of generalized complex structures on Courant algebroids.
#[derive(Parser)]
#[command(name = "courant-kit", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Input document (JSON)
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Which integrability test: 18, 10, oracle or all
    #[arg(long, global = true, default_value = "all")]
    suite: String,
    /// Evaluation point, comma separated; repeatable
    #[arg(long, global = true)]
    point: Vec<String>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random section tuples for sampled checks
    #[arg(long, global = true, default_value_t = 20)]
    trials: usize,
    /// JSON report destination; "-" prints JSON instead of text
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Scan the 18 relations in parallel
    #[arg(long, global = true)]
    parallel: bool,
    /// Record wall-clock timings (reports are then no longer reproducible byte for byte)
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand, Clone)]
enum Cmd {
    /// Jacobi identity, invariant metric and complex structure on a Lie algebra
    CheckLie,
    /// Space of ad-invariant symmetric forms
    InvariantForms,
    /// Signature of /form or /metric
    Signature,
    /// Defining data and Dorfman bracket axioms
    CheckCourant,
    /// Algebraic conditions on a generalized almost complex structure
    CheckGacs,
    /// Integrability by relation suites and the frame oracle
    Integrability,
    /// Nondegenerate case: completion from a seed and integrability conditions
    Nondeg {
        #[arg(long, conflicts_with = "check")]
        complete: bool,
        #[arg(long)]
        check: bool,
    },
    /// Pointwise description of the +i eigenbundle
    Ldata,
    /// Transport defining data and structures along an isomorphism
    Transport,
    /// Reduce a nondegenerate integrable structure to its normal form
    NormalForm,
    /// Run a built-in reference input
    Corpus {
        /// lemma-7param, lemma-ex2, double-sl2, canonical-symplectic, twist-roundtrip, hopf-chart, dorfman-axioms or all
        name: String,
    },
}

fn command_of(c: &Cmd) -> Option<Command> {
    Some(match c {
        Cmd::CheckLie => Command::CheckLie,
        Cmd::InvariantForms => Command::InvariantForms,
        Cmd::Signature => Command::Signature,
        Cmd::CheckCourant => Command::CheckCourant,
        Cmd::CheckGacs => Command::CheckGacs,
        Cmd::Integrability => Command::Integrability,
        Cmd::Nondeg { .. } => Command::Nondeg,
        Cmd::Ldata => Command::Ldata,
        Cmd::Transport => Command::Transport,
        Cmd::NormalForm => Command::NormalForm,
        Cmd::Corpus { .. } => return None,
    })
}

fn options(cli: &Cli) -> Result<Options, CliError> {
    let c = &cli.common;
    let nondeg = match &cli.command {
        Cmd::Nondeg { complete: true, .. } => NondegMode::Complete,
        Cmd::Nondeg { check: true, .. } => NondegMode::Check,
        _ => NondegMode::Both,
    };
    Ok(Options {
        suite: c.suite.parse::<Suite>()?,
        points: c.point.iter().map(|p| parse_point(p)).collect::<Result<_, _>>()?,
        seed: c.seed,
        trials: c.trials,
        parallel: c.parallel,
        nondeg,
        timings: c.timings,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    let err = |source| CliError::Write { path: path.display().to_string(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(err)?;
    }
    std::fs::write(path, text).map_err(err)
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let opts = options(cli)?;
    let (report, default_name) = match (&cli.command, command_of(&cli.command)) {
        (Cmd::Corpus { name }, _) => (run_corpus(name, &opts)?, format!("corpus-{name}.json")),
        (_, Some(cmd)) => {
            let path = cli.common.input.as_ref().ok_or_else(|| CliError::Option(format!("{} needs --input FILE", cmd.name())))?;
            let bytes = std::fs::read(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })?;
            (run_document(cmd, &bytes, &opts)?, format!("{}.json", cmd.name()))
        }
        (_, None) => unreachable!(),
    };
    let json = report.to_json();
    match &cli.common.json {
        Some(p) if p.as_os_str() == "-" => print!("{json}"),
        Some(p) => {
            write(p, &json)?;
            print!("{}", report.to_text());
        }
        None => {
            if let Some(dir) = std::env::var_os("COURANT_KIT_OUT") {
                write(&Path::new(&dir).join(default_name), &json)?;
            }
            print!("{}", report.to_text());
        }
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => ExitCode::from(r.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
