//! The `corec` command line: argument handling, file loading and output.

mod repl;
mod workspace;

use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

pub use repl::{Repl, ReplReply};
pub use workspace::Workspace;

use crate::equiv::{DEFAULT_BOUND, DEFAULT_MAX_STATES, DEFAULT_PAIR_CAP};
use crate::expr::DefinitionSet;
use crate::model::check_well_formed;
use crate::proof::{verify, ProofObject};
use crate::syntax::{parse_definitions, parse_stream_expr_with, EqualMethod, ParseOptions, Query, SourceText};

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    True = 0,
    False = 1,
    Unknown = 2,
    Usage = 3,
    EvalError = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Search limits shared by all commands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub bound: u64,
    pub max_states: usize,
    pub pair_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { bound: DEFAULT_BOUND, max_states: DEFAULT_MAX_STATES, pair_cap: DEFAULT_PAIR_CAP }
    }
}

/// The result of one command: an exit status, human text and a JSON document.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub status: ExitStatus,
    pub text: String,
    pub json: Value,
    /// Errors go to the diagnostic channel.
    pub is_error: bool,
}

impl Outcome {
    pub fn result(status: ExitStatus, text: impl Into<String>, json: Value) -> Self {
        Self { status, text: text.into(), json, is_error: false }
    }

    pub fn error(status: ExitStatus, kind: &str, message: impl Into<String>) -> Self {
        let message = message.into();
        let json = json!({"verdict": "error", "kind": kind, "message": message});
        Self { status, text: format!("error: {message}"), json, is_error: true }
    }

    pub(crate) fn with_json_field(mut self, key: &str, value: Value) -> Self {
        self.json[key] = value;
        self
    }
}

#[derive(Parser, Debug)]
#[command(name = "corec", version, about = "Evaluate, compare and prove properties of codata definitions")]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Flags {
    /// Print results as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Number of elements compared by bounded checks.
    #[arg(long, global = true, default_value_t = DEFAULT_BOUND, value_parser = clap::value_parser!(u64).range(1..))]
    pub bound: u64,
    /// Largest state graph explored per stream.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_STATES, value_parser = positive_usize)]
    pub max_states: usize,
    /// Largest relation built by circular coinduction.
    #[arg(long, global = true, default_value_t = DEFAULT_PAIR_CAP, value_parser = positive_usize)]
    pub pair_cap: usize,
    /// Parse `s^t` with a stream-valued exponent (always rejected by `check`).
    #[arg(long, global = true)]
    pub allow_stream_exponent: bool,
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Report well-formedness violations.
    Check { files: Vec<PathBuf> },
    /// Print element N of a stream.
    Eval { name: String, index: u64, files: Vec<PathBuf> },
    /// Print the expansion of a stream up to element N.
    Expand { name: String, index: u64, files: Vec<PathBuf> },
    /// Decide whether two stream expressions are equal.
    Equal {
        left: String,
        right: String,
        files: Vec<PathBuf>,
        /// auto, bisim, symbolic, bounded or recurrence.
        #[arg(long, default_value = "auto", value_parser = parse_method)]
        method: EqualMethod,
    },
    /// Decide finite equivalence (equal up to a bijection of values).
    Fequiv { left: String, right: String, files: Vec<PathBuf> },
    /// Prove a claim such as `forall n. fib^1(n) > 0` or `sum1 = sum2`.
    Prove {
        claim: String,
        files: Vec<PathBuf>,
        /// Write the proof object here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a proof object.
    Verify { proof: PathBuf },
    /// Read definitions and queries line by line.
    Repl { files: Vec<PathBuf> },
}

fn parse_method(s: &str) -> Result<EqualMethod, String> {
    EqualMethod::parse(s).ok_or_else(|| format!("unknown method `{s}`"))
}

impl Flags {
    pub fn limits(&self) -> Limits {
        Limits { bound: self.bound, max_states: self.max_states, pair_cap: self.pair_cap }
    }

    pub fn parse_options(&self) -> ParseOptions {
        ParseOptions { allow_stream_exponent: self.allow_stream_exponent }
    }
}

/// Parses and merges definition files in order.
pub fn load_files(files: &[PathBuf], opts: ParseOptions) -> Result<DefinitionSet, Outcome> {
    let mut defs = DefinitionSet::new();
    for path in files {
        let content = std::fs::read_to_string(path)
            .map_err(|e| Outcome::error(ExitStatus::Usage, "io", format!("{}: {e}", path.display())))?;
        let src = SourceText::new(content, path.display().to_string());
        let parsed = parse_definitions(&src, opts).map_err(|e| {
            let mut o = workspace::parse_error(&e);
            let lines: Vec<String> = e.diagnostics().iter().map(|d| format!("{}:{d}", path.display())).collect();
            o.text = lines.join("\n");
            o.with_json_field("file", json!(path.display().to_string()))
        })?;
        for def in parsed.definitions() {
            defs.insert(def.clone()).map_err(|d| {
                Outcome::error(ExitStatus::Usage, "redefinition", format!("{}: `{}` is already defined", path.display(), d.0))
            })?;
        }
    }
    Ok(defs)
}

fn workspace(files: &[PathBuf], flags: &Flags) -> Result<Workspace, Outcome> {
    let defs = load_files(files, flags.parse_options())?;
    let report = check_well_formed(&defs);
    if !report.is_well_formed() {
        return Err(workspace::ill_formed(&report));
    }
    Ok(Workspace::new(defs, flags.limits()))
}

fn expr(text: &str, flags: &Flags) -> Result<crate::expr::StreamExpr, Outcome> {
    parse_stream_expr_with(text, flags.parse_options()).map_err(|e| workspace::parse_error(&e))
}

fn query_outcome(files: &[PathBuf], flags: &Flags, q: impl FnOnce(&Flags) -> Result<Query, Outcome>) -> Outcome {
    let run = || -> Result<Outcome, Outcome> {
        let mut ws = workspace(files, flags)?;
        Ok(ws.run(&q(flags)?).0)
    };
    run().unwrap_or_else(|e| e)
}

fn prove(claim: &str, files: &[PathBuf], out: Option<&PathBuf>, flags: &Flags) -> Outcome {
    let run = || -> Result<Outcome, Outcome> {
        let mut ws = workspace(files, flags)?;
        let src = SourceText::new(format!("prove {claim}"), "<claim>");
        let q = crate::syntax::parse_query_with(&src, flags.parse_options()).map_err(|e| workspace::parse_error(&e))?;
        if !matches!(q, Query::Forall { .. } | Query::ProveEqual { .. }) {
            return Err(Outcome::error(ExitStatus::Usage, "usage", "expected a `forall` claim or an equation"));
        }
        let (mut outcome, proof) = ws.run(&q);
        if let (Some(path), Some(proof)) = (out, proof) {
            std::fs::write(path, proof.to_json() + "\n")
                .map_err(|e| Outcome::error(ExitStatus::Usage, "io", format!("{}: {e}", path.display())))?;
            outcome.text.push_str(&format!("\nproof written to {}", path.display()));
            outcome.json["written_to"] = json!(path.display().to_string());
        }
        Ok(outcome)
    };
    run().unwrap_or_else(|e| e)
}

fn verify_file(path: &PathBuf) -> Outcome {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Outcome::error(ExitStatus::Usage, "io", format!("{}: {e}", path.display())),
    };
    let proof = match ProofObject::from_json(&text) {
        Ok(p) => p,
        Err(e) => return Outcome::error(ExitStatus::Usage, "parse", format!("{}: {e}", path.display())),
    };
    match verify(&proof) {
        Ok(claim) => Outcome::result(
            ExitStatus::True,
            format!("verified: {claim}"),
            json!({"verdict": "verified", "kind": proof.kind(), "claim": claim}),
        ),
        Err(e) => Outcome::result(
            ExitStatus::False,
            format!("rejected: {e}"),
            json!({"verdict": "rejected", "kind": proof.kind(), "reason": e.to_string()}),
        ),
    }
}

/// Runs one non-interactive command.
pub fn execute(cli: &Cli) -> Outcome {
    let flags = &cli.flags;
    match &cli.command {
        // `check` reports stream-valued exponents as violations rather than parse errors.
        Command::Check { files } => match load_files(files, ParseOptions { allow_stream_exponent: true }) {
            Ok(defs) => workspace::report_outcome(&check_well_formed(&defs), defs.len()),
            Err(o) => o,
        },
        Command::Eval { name, index, files } => {
            query_outcome(files, flags, |_| Ok(Query::Element { name: name.clone(), index: *index }))
        }
        Command::Expand { name, index, files } => {
            query_outcome(files, flags, |_| Ok(Query::Expand { name: name.clone(), index: *index }))
        }
        Command::Equal { left, right, files, method } => query_outcome(files, flags, |f| {
            Ok(Query::Equal { left: expr(left, f)?, right: expr(right, f)?, method: *method })
        }),
        Command::Fequiv { left, right, files } => {
            query_outcome(files, flags, |f| Ok(Query::FinEquiv { left: expr(left, f)?, right: expr(right, f)? }))
        }
        Command::Prove { claim, files, out } => prove(claim, files, out.as_ref(), flags),
        Command::Verify { proof } => verify_file(proof),
        Command::Repl { .. } => Outcome::error(ExitStatus::Usage, "usage", "the REPL needs an input stream"),
    }
}

pub fn emit(o: &Outcome, json_mode: bool, out: &mut dyn Write, err: &mut dyn Write) {
    // Write failures (for example a closed pipe) have nowhere to be reported.
    if json_mode {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&o.json).expect("json values serialize"));
    } else if o.is_error {
        let _ = writeln!(err, "{}", o.text);
    } else {
        let _ = writeln!(out, "{}", o.text);
    }
}

/// Entry point: parses `args`, runs the command and returns the exit code.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let json_mode = args.iter().any(|a| a == "--json");
            let o = Outcome::error(ExitStatus::Usage, "usage", e.render().to_string().trim_end());
            if json_mode {
                emit(&o, true, out, err);
            } else {
                let _ = write!(err, "{e}");
            }
            return ExitStatus::Usage.code();
        }
    };
    if let Command::Repl { files } = &cli.command {
        return match load_files(files, cli.flags.parse_options()) {
            Ok(defs) => match Repl::new(defs, cli.flags.limits(), cli.flags.parse_options()) {
                Ok(mut repl) => repl.run(input, out, err, cli.flags.json),
                Err(o) => {
                    emit(&o, cli.flags.json, out, err);
                    o.status.code()
                }
            },
            Err(o) => {
                emit(&o, cli.flags.json, out, err);
                o.status.code()
            }
        };
    }
    let o = execute(&cli);
    emit(&o, cli.flags.json, out, err);
    o.status.code()
}
