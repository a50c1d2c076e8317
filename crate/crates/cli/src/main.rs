use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use polyadic::Limits;
use polyadic_cli::commands::{run, CliError, Options, Verb};
use polyadic_cli::render;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

/// Exhaustive computations with finite polyadic groups.
#[derive(Debug, Parser)]
#[command(name = "polyadic", version)]
struct Cli {
    verb: Verb,
    /// Verb arguments: words for freereduce, direction and equation for translate, points for closure.
    args: Vec<String>,
    #[arg(long)]
    group: Option<PathBuf>,
    /// Polyadic group file; give it twice to homs for source and target.
    #[arg(long)]
    polyadic: Vec<PathBuf>,
    #[arg(long)]
    system: Option<PathBuf>,
    #[arg(long)]
    presentation: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    anchor: Option<String>,
    /// Coset definition cap for cosets.
    #[arg(long)]
    cap: Option<usize>,
    /// Variable count for closure when no points are given.
    #[arg(long)]
    vars: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    jobs: Option<usize>,
}

fn emit(doc: &serde_json::Value, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(doc).expect("serializable")),
        Format::Table => print!("{}", render::table(doc)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(2);
        }
    }
    let opts = Options {
        group: cli.group,
        polyadic: cli.polyadic,
        system: cli.system,
        presentation: cli.presentation,
        n: cli.n,
        anchor: cli.anchor,
        cap: cli.cap,
        vars: cli.vars,
        args: cli.args,
    };
    match run(cli.verb, &opts, &Limits::default()) {
        Ok(doc) => {
            emit(&doc, cli.format);
            ExitCode::SUCCESS
        }
        Err(CliError::Failure { message, document }) => {
            emit(&document, cli.format);
            eprintln!("failure: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
