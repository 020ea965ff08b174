//! `gp2`: run rooted graph programs, generate input graphs, classify rules
//! and benchmark scaling behaviour.
//!
//! Exit codes: 0 result graph, 2 the program failed, 3 step limit reached,
//! 1 usage, I/O or parse error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gp2_core::bench::{bench, CSV_HEADER};
use gp2_core::generators::{generate, random_graph, GraphClass};
use gp2_core::interp::{exec_traced, Limits, Outcome, Program, TraceEvent};
use gp2_core::programs::{bundled_source, BUNDLED_NAMES};
use gp2_core::text::{parse_host, parse_program, print_host};

#[derive(Parser)]
#[command(name = "gp2", version, about = "Rooted graph programs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a program on a host graph.
    Run {
        /// Program file, or the name of a bundled program.
        program: String,
        /// Host graph file; `-` reads standard input.
        input: PathBuf,
        /// Write the result graph here instead of standard output.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = Limits::default().max_steps)]
        max_steps: u64,
        /// Print one line per step to standard error.
        #[arg(long)]
        trace: bool,
    },
    /// Time a program over generated graphs of increasing size.
    Bench {
        program: String,
        #[arg(long)]
        class: String,
        /// Comma-separated node counts, ascending.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        /// Write CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = Limits::default().max_steps)]
        max_steps: u64,
    },
    /// Generate an input graph. `--class random` draws `n` nodes and `2n`
    /// edges uniformly from `--seed`.
    Gen {
        #[arg(long)]
        class: String,
        /// Number of nodes.
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Report which rules of a program are fast.
    CheckFast { program: String },
}

#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn program_text(arg: &str) -> Result<String, Failure> {
    let path = Path::new(arg);
    if !path.exists() && BUNDLED_NAMES.contains(&arg) {
        return Ok(bundled_source(arg)?.to_string());
    }
    fs::read_to_string(path).map_err(|e| Failure(format!("{arg}: {e}")))
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        Ok(io::read_to_string(io::stdin())?)
    } else {
        fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.cmd {
        Cmd::Run {
            program,
            input,
            output,
            max_steps,
            trace,
        } => {
            let p = Program::parse(&program_text(&program)?)
                .map_err(|e| Failure(format!("{program}: {e}")))?;
            let g = parse_host(&read_input(&input)?)
                .map_err(|e| Failure(format!("{}: {e}", input.display())))?;
            let limits = Limits { max_steps };
            let mut err = io::stderr().lock();
            let mut printer = |ev: &TraceEvent<'_>, _: &_| {
                let _ = match ev {
                    TraceEvent::Call {
                        step,
                        rule,
                        applied,
                        probes,
                    } => {
                        let r = if *applied { "matched" } else { "failed" };
                        writeln!(err, "{step} {rule} {r} {probes}")
                    }
                    TraceEvent::Break { step } => writeln!(err, "{step} break"),
                    TraceEvent::Fail { step } => writeln!(err, "{step} fail"),
                    _ => Ok(()),
                };
            };
            let (outcome, _) = exec_traced(&p, g, limits, trace.then_some(&mut printer));
            match outcome {
                Outcome::Graph(h) => {
                    emit(output.as_deref(), &print_host(&h))?;
                    Ok(0)
                }
                Outcome::Fail => {
                    println!("fail");
                    Ok(2)
                }
                Outcome::StepLimitExceeded => {
                    eprintln!("step limit of {max_steps} exceeded");
                    Ok(3)
                }
            }
        }
        Cmd::Bench {
            program,
            class,
            sizes,
            reps,
            csv,
            max_steps,
        } => {
            if reps == 0 {
                return Err(Failure("--reps must be at least 1".into()));
            }
            let class: GraphClass = class.parse()?;
            let p = Program::parse(&program_text(&program)?)
                .map_err(|e| Failure(format!("{program}: {e}")))?;
            let name = Path::new(&program)
                .file_stem()
                .map_or(program.clone(), |s| s.to_string_lossy().into_owned());
            let rows = bench(&p, &name, class, &sizes, reps, Limits { max_steps })?;
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&r.csv_line());
                out.push('\n');
            }
            emit(csv.as_deref(), &out)?;
            Ok(0)
        }
        Cmd::Gen {
            class,
            n,
            seed,
            output,
        } => {
            let g = if class == "random" {
                random_graph(seed, n, 2 * n)
            } else {
                generate(class.parse()?, n)?
            };
            emit(output.as_deref(), &print_host(&g))?;
            Ok(0)
        }
        Cmd::CheckFast { program } => {
            let src = parse_program(&program_text(&program)?)
                .map_err(|e| Failure(format!("{program}: {e}")))?;
            for rule in &src.rules {
                let report = rule.classify_fast();
                if report.is_fast() {
                    println!("{}: fast", rule.name);
                } else {
                    let why: Vec<_> = report.reasons.iter().map(|r| r.to_string()).collect();
                    println!("{}: slow ({})", rule.name, why.join("; "));
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
