use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use liftlab_cli::lexer::Pos;
use liftlab_cli::parser::{Name, Stmt, StmtKind};
use liftlab_cli::{parse, Format, Outcome, Session};

#[derive(Parser)]
#[command(name = "liftlab", version, about = "Exact Poisson and Jacobi calculus from scripts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: FormatArg,
    /// Seed for randomized batteries.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run every statement of a script.
    Run { script: PathBuf },
    /// Load the definitions of a script and run one suite on named objects.
    Check {
        suite: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "define", required = false)]
        define: Vec<String>,
    },
    /// Randomized identity battery.
    Battery {
        #[arg(long, default_value_t = liftlab_cli::session::DEFAULT_BATTERY_COUNT)]
        count: usize,
    },
}

fn read(path: &Path) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(2)
    })
}

fn finish(outcome: &Outcome, format: Format, source: &str) -> ExitCode {
    print!("{}", outcome.render(format));
    if let Some(e) = &outcome.error {
        eprintln!("error: {source}:{e}");
    }
    ExitCode::from(outcome.exit_code())
}

fn check(session: &mut Session, suite: &str, define: &[String], src: &str) -> Outcome {
    let stmts = match parse(src) {
        Ok(s) => s,
        Err(e) => {
            return Outcome {
                outputs: Vec::new(),
                error: Some(e.into()),
            }
        }
    };
    let defs: Vec<Stmt> = stmts.into_iter().filter(Stmt::is_definition).collect();
    let loaded = session.run(&defs);
    if loaded.error.is_some() {
        return loaded;
    }
    let pos = Pos { line: 0, col: 0 };
    let name = |text: &str| Name {
        text: text.to_string(),
        pos,
    };
    let stmt = Stmt {
        kind: StmtKind::Check {
            suite: name(suite),
            args: define.iter().map(|d| name(d)).collect(),
        },
        pos,
    };
    session.run(&[stmt])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
    };
    let mut session = Session::new(cli.seed);
    match &cli.command {
        Command::Run { script } => {
            let src = match read(script) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let outcome = session.run_script(&src);
            finish(&outcome, format, &script.display().to_string())
        }
        Command::Check { suite, input, define } => {
            let src = match read(input) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let outcome = check(&mut session, suite, define, &src);
            finish(&outcome, format, &input.display().to_string())
        }
        Command::Battery { count } => {
            let outcome = session.run_script(&format!("check battery {count}\n"));
            finish(&outcome, format, "battery")
        }
    }
}
