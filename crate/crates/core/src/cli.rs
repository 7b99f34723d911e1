//! The `gk` command line. [`run_cli`] does all the work and returns the exit
//! code with the text to print, so it can be tested without a process.
//!
//! Exit codes: 0 success, Equivalent or valid; 1 Unknown or invalid; 2
//! malformed input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::model::{eval, soundness_check_trace, validate_model, MatrixModel};
use crate::normalform::normalize_sum_traced;
use crate::presentation::Presentation;
use crate::rewrite::{check_trace, decide_equiv, trace_from_json, trace_to_json, Budget, Verdict};
use crate::terms::{parse_sum, FormalSum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "gk",
    version,
    about = "Words, rewriting and matrix models for finitely presented additive categories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a presentation and print its validation report.
    Validate { pres: PathBuf },
    /// Print the normal form of a term.
    Normalize {
        pres: PathBuf,
        #[arg(short = 'e', long = "expr")]
        term: String,
        /// Write the derivation to this file as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Search for a rewrite proof that two terms are equal.
    Equiv {
        pres: PathBuf,
        #[arg(short = 'l', long = "left")]
        left: String,
        #[arg(short = 'r', long = "right")]
        right: String,
        #[arg(long, default_value_t = Budget::default().depth)]
        depth: usize,
        #[arg(long, default_value_t = Budget::default().max_states)]
        max_states: usize,
        /// Context length for steps that only add summands.
        #[arg(long, default_value_t = Budget::default().expansion_context)]
        expansion_context: usize,
        /// Write the proof to this file as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Evaluate a term in an integer-matrix model.
    Eval {
        pres: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(short = 'e', long = "expr")]
        term: String,
    },
    /// Replay a proof trace, and check it in a model when one is given.
    CheckTrace {
        pres: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        trace: PathBuf,
    },
}

/// Outcome of one invocation: exit code and the text for the terminal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub text: String,
}

impl CliOutput {
    fn new(code: i32, text: impl Into<String>) -> Self {
        CliOutput {
            code,
            text: text.into(),
        }
    }

    fn malformed(text: impl Into<String>) -> Self {
        let mut text = text.into();
        if !text.ends_with('\n') {
            text.push('\n');
        }
        CliOutput::new(EXIT_MALFORMED, text)
    }
}

/// `argv` includes the program name.
pub fn run_cli<I, T>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_MALFORMED
            } else {
                EXIT_OK
            };
            return CliOutput::new(code, e.render().to_string());
        }
    };
    match run(cli.command) {
        Ok(out) | Err(out) => out,
    }
}

fn read(path: &Path) -> Result<String, CliOutput> {
    std::fs::read_to_string(path)
        .map_err(|e| CliOutput::malformed(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliOutput> {
    std::fs::write(path, text)
        .map_err(|e| CliOutput::malformed(format!("cannot write {}: {e}", path.display())))
}

fn load_presentation(path: &Path) -> Result<Presentation, CliOutput> {
    Presentation::parse(&read(path)?)
        .map_err(|e| CliOutput::malformed(format!("{}:{e}", path.display())))
}

/// Every command except `validate` needs a valid presentation.
fn load_valid(path: &Path) -> Result<Presentation, CliOutput> {
    let p = load_presentation(path)?;
    let report = p.validate();
    if !report.is_valid() {
        return Err(CliOutput::malformed(format!(
            "{}: presentation is invalid\n{report}",
            path.display()
        )));
    }
    Ok(p)
}

fn load_model(p: &Presentation, path: &Path) -> Result<MatrixModel, CliOutput> {
    let m = MatrixModel::from_json(p, &read(path)?)
        .map_err(|e| CliOutput::malformed(format!("{}: {e}", path.display())))?;
    let report = validate_model(p, &m)
        .map_err(|e| CliOutput::malformed(format!("{}: {e}", path.display())))?;
    if !report.is_valid() {
        return Err(CliOutput::new(
            EXIT_NEGATIVE,
            format!("{}: model is invalid\n{report}", path.display()),
        ));
    }
    Ok(m)
}

fn term(p: &Presentation, what: &str, text: &str) -> Result<FormalSum, CliOutput> {
    parse_sum(p, text).map_err(|e| CliOutput::malformed(format!("{what} `{text}`: {e}")))
}

fn run(command: Command) -> Result<CliOutput, CliOutput> {
    match command {
        Command::Validate { pres } => {
            let p = load_presentation(&pres)?;
            let report = p.validate();
            let code = if report.is_valid() {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            };
            Ok(CliOutput::new(code, report.to_string()))
        }
        Command::Normalize {
            pres,
            term: t,
            trace,
        } => {
            let p = load_valid(&pres)?;
            let s = term(&p, "term", &t)?;
            let (n, tr) =
                normalize_sum_traced(&p, &s).map_err(|e| CliOutput::malformed(e.to_string()))?;
            if let Some(path) = trace {
                write(&path, &trace_to_json(&p, &tr))?;
            }
            Ok(CliOutput::new(EXIT_OK, format!("{}\n", n.to_text(&p))))
        }
        Command::Equiv {
            pres,
            left,
            right,
            depth,
            max_states,
            expansion_context,
            trace,
        } => {
            let p = load_valid(&pres)?;
            let l = term(&p, "left term", &left)?;
            let r = term(&p, "right term", &right)?;
            let budget = Budget {
                depth,
                max_states,
                expansion_context,
            };
            let verdict = decide_equiv(&p, &l, &r, &budget)
                .map_err(|e| CliOutput::malformed(e.to_string()))?;
            match verdict {
                Verdict::Equivalent(tr) => {
                    if let Some(path) = trace {
                        write(&path, &trace_to_json(&p, &tr))?;
                    }
                    Ok(CliOutput::new(
                        EXIT_OK,
                        format!("Equivalent\nsteps: {}\n", tr.len()),
                    ))
                }
                Verdict::Unknown(stats) => {
                    let mut text = String::from("Unknown\n");
                    let _ = writeln!(
                        text,
                        "explored: {} left, {} right states",
                        stats.left_states, stats.right_states
                    );
                    if stats.state_limit_hit {
                        text.push_str("state limit reached\n");
                    }
                    Ok(CliOutput::new(EXIT_NEGATIVE, text))
                }
            }
        }
        Command::Eval {
            pres,
            model,
            term: t,
        } => {
            let p = load_valid(&pres)?;
            let m = load_model(&p, &model)?;
            let s = term(&p, "term", &t)?;
            let v = eval(&p, &m, &s).map_err(|e| CliOutput::malformed(e.to_string()))?;
            Ok(CliOutput::new(EXIT_OK, format!("{v}\n")))
        }
        Command::CheckTrace { pres, model, trace } => {
            let p = load_valid(&pres)?;
            let m = model
                .as_deref()
                .map(|path| load_model(&p, path))
                .transpose()?;
            let tr = trace_from_json(&p, &read(&trace)?)
                .map_err(|e| CliOutput::malformed(format!("{}: {e}", trace.display())))?;
            if let Err(e) = check_trace(&p, &tr) {
                return Ok(CliOutput::new(EXIT_NEGATIVE, format!("structural: {e}\n")));
            }
            let mut text = format!("structural: ok ({} steps)\n", tr.len());
            if let Some(m) = m {
                let sound = soundness_check_trace(&p, &m, &tr)
                    .map_err(|e| CliOutput::malformed(e.to_string()))?;
                if !sound {
                    text.push_str("model: values differ along the trace\n");
                    return Ok(CliOutput::new(EXIT_NEGATIVE, text));
                }
                text.push_str("model: ok\n");
            }
            Ok(CliOutput::new(EXIT_OK, text))
        }
    }
}
