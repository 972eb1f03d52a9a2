use clap::{Parser, Subcommand};
use hitchin_cli::{run, Command, RunConfig};
use std::path::PathBuf;

/// Exact stability polytopes, Arthur-style weights and SL(2) fiber counts
/// over F_q(t).
#[derive(Parser)]
#[command(name = "hitchin-cli", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Run the randomized identity suites for n in {2, 3, 4}.
    Identities {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        cases: usize,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nearest point of the stability polytope for a family file.
    Hn {
        #[arg(long)]
        input: PathBuf,
        /// Truncation parameter as comma-separated rationals, e.g. "5,-5".
        #[arg(long)]
        xi: String,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The four-way weight report (both routes of both weights).
    Weights {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        xi: String,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-pipeline fiber count for an instance file.
    Count {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Descent identity for an instance file.
    Descent {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    let (config, json, out) = match cli.command {
        Sub::Identities {
            seed,
            cases,
            json,
            out,
        } => (
            RunConfig {
                command: Command::Identities,
                input_path: None,
                xi: None,
                seed,
                cases,
                json_out: json,
                out: out.clone(),
            },
            json,
            out,
        ),
        Sub::Hn {
            input,
            xi,
            json,
            out,
        } => (
            RunConfig {
                command: Command::Hn,
                input_path: Some(input),
                xi: Some(xi),
                seed: 0,
                cases: 0,
                json_out: json,
                out: out.clone(),
            },
            json,
            out,
        ),
        Sub::Weights {
            input,
            xi,
            json,
            out,
        } => (
            RunConfig {
                command: Command::Weights,
                input_path: Some(input),
                xi: Some(xi),
                seed: 0,
                cases: 0,
                json_out: json,
                out: out.clone(),
            },
            json,
            out,
        ),
        Sub::Count { input, json, out } => (
            RunConfig {
                command: Command::Count,
                input_path: Some(input),
                xi: None,
                seed: 0,
                cases: 0,
                json_out: json,
                out: out.clone(),
            },
            json,
            out,
        ),
        Sub::Descent { input, json, out } => (
            RunConfig {
                command: Command::Descent,
                input_path: Some(input),
                xi: None,
                seed: 0,
                cases: 0,
                json_out: json,
                out: out.clone(),
            },
            json,
            out,
        ),
    };
    let (code, value) = run(&config);
    let text = if json {
        serde_json::to_string(&value).expect("serializable report")
    } else {
        serde_json::to_string_pretty(&value).expect("serializable report")
    };
    if let Some(path) = out {
        if let Err(e) = std::fs::write(&path, &text) {
            eprintln!("cannot write {}: {e}", path.display());
            std::process::exit(2);
        }
    }
    println!("{text}");
    std::process::exit(code);
}
