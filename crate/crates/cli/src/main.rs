//! entropylab: topological entropy, kneading data, and parameter
//! deformations for multimodal interval maps.

use clap::{Parser, Subcommand};
use entropylab_cli::sweep::{run_sweep, sweep_csv, SweepSpec};
use entropylab_cli::{cmd_deform, cmd_entropy, cmd_st, cmd_verify};
use std::io::Write;

fn default_budget() -> usize {
    std::env::var("ENTROPYLAB_BUDGET")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(10_000)
}

#[derive(Parser)]
#[command(
    name = "entropylab",
    about = "Topological entropy and deformation flows for multimodal interval maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy of a map description (JSON inline or @file). Prints a JSON
    /// record {value, lower, upper, method, depth}.
    Entropy {
        /// Map description: inline JSON or @path/to/file.json
        description: String,
        #[arg(long, default_value_t = 40)]
        depth: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Sweep a family parameter; writes CSV with columns
    /// param,entropy,lower,upper,depth_used,error.
    Sweep {
        /// Family id (logistic, cubic-fig4, chebyshev-k)
        family: String,
        /// Swept parameter name (lambda, b)
        #[arg(long, default_value = "b")]
        param: String,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 24)]
        depth: usize,
        #[arg(long, default_value_t = 5e-3)]
        tol: f64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output CSV path (stdout when omitted)
        #[arg(long)]
        output: Option<String>,
    },
    /// The stunted sawtooth parameters realizing a polynomial's kneading
    /// invariant; prints JSON zeta (rationals as "p/q") with error bounds.
    St {
        description: String,
        #[arg(long, default_value_t = 30)]
        depth: usize,
    },
    /// Deformation flows on stunted parameters; emits a CSV trace.
    Deform {
        description: String,
        /// Flow id: gamma, Gamma, delta, hatdelta, beta, retract0, sigma
        flow: String,
        /// Flow time as a rational "p/q"
        #[arg(long, default_value = "1")]
        t: String,
        /// Entropy target for Gamma
        #[arg(long)]
        h0: Option<f64>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        output: Option<String>,
    },
    /// Seeded property suites: rome, monotone, semiconj, flows, cycles, all.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
    },
}

fn load_description(arg: &str) -> Result<String, String> {
    if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))
    } else {
        Ok(arg.to_string())
    }
}

fn emit(text: &str, output: Option<&String>) -> i32 {
    match output {
        None => {
            print!("{text}");
            0
        }
        Some(path) => match std::fs::File::create(path) {
            Ok(mut f) => {
                if let Err(e) = f.write_all(text.as_bytes()) {
                    eprintln!("error: cannot write {path}: {e}");
                    return 4;
                }
                0
            }
            Err(e) => {
                eprintln!("error: cannot create {path}: {e}");
                4
            }
        },
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Entropy {
            description,
            depth,
            tol,
        } => match load_description(&description) {
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
            Ok(d) => {
                let (out, code) = cmd_entropy(&d, depth, tol);
                println!("{out}");
                code
            }
        },
        Command::Sweep {
            family,
            param,
            lo,
            hi,
            steps,
            depth,
            tol,
            jobs,
            output,
        } => {
            let spec = SweepSpec {
                family,
                param,
                lo,
                hi,
                steps,
                depth,
                tol,
                jobs,
            };
            match run_sweep(&spec) {
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
                Ok(rows) => emit(&sweep_csv(&rows), output.as_ref()),
            }
        }
        Command::St { description, depth } => match load_description(&description) {
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
            Ok(d) => {
                let (out, code) = cmd_st(&d, depth);
                println!("{out}");
                code
            }
        },
        Command::Deform {
            description,
            flow,
            t,
            h0,
            budget,
            output,
        } => match load_description(&description) {
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
            Ok(d) => {
                let budget = budget.unwrap_or_else(default_budget);
                let (out, code) = cmd_deform(&d, &flow, &t, h0, budget);
                if code == 0 {
                    emit(&out, output.as_ref()).max(code)
                } else {
                    eprintln!("{out}");
                    code
                }
            }
        },
        Command::Verify { suite, seed } => {
            let (out, code) = cmd_verify(&suite, seed);
            print!("{out}");
            code
        }
    };
    std::process::exit(code);
}
