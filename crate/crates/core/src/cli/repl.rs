//! Line-oriented REPL over a growing set of definitions.

use std::io::{BufRead, IsTerminal, Write};

use serde_json::json;

use super::workspace::{parse_error, Workspace};
use super::{emit, ExitStatus, Limits, Outcome};
use crate::expr::DefinitionSet;
use crate::syntax::{is_definition_line, parse_definitions, parse_query_with, ParseOptions, SourceText};

const HELP: &str = "\
definitions:  name as [d0, ..., dk | body]
queries:      eval NAME N | expand NAME N | equal A B [by METHOD] | fequiv A B
              prove forall n. P [using window W {...}] | prove A = B
commands:     :defs  :reset  :help  :quit";

#[derive(Clone, Debug, PartialEq)]
pub struct ReplReply {
    pub outcome: Option<Outcome>,
    pub quit: bool,
}

impl ReplReply {
    fn show(o: Outcome) -> Self {
        Self { outcome: Some(o), quit: false }
    }
}

pub struct Repl {
    initial: DefinitionSet,
    ws: Workspace,
    opts: ParseOptions,
}

impl Repl {
    /// Starts a session over `defs`, which must be well-formed.
    pub fn new(defs: DefinitionSet, limits: Limits, opts: ParseOptions) -> Result<Self, Outcome> {
        let mut ws = Workspace::new(DefinitionSet::new(), limits);
        ws.replace_defs(defs.clone())?;
        Ok(Self { initial: defs, ws, opts })
    }

    pub fn defs(&self) -> &DefinitionSet {
        self.ws.defs()
    }

    pub fn handle_line(&mut self, line: &str) -> ReplReply {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            return ReplReply { outcome: None, quit: false };
        }
        if let Some(cmd) = trimmed.strip_prefix(':') {
            return self.meta(cmd.trim());
        }
        if is_definition_line(trimmed) {
            return ReplReply::show(self.define(trimmed));
        }
        let src = SourceText::repl(trimmed);
        match parse_query_with(&src, self.opts) {
            Ok(q) => ReplReply::show(self.ws.run(&q).0),
            Err(e) => ReplReply::show(parse_error(&e)),
        }
    }

    fn meta(&mut self, cmd: &str) -> ReplReply {
        match cmd {
            "quit" | "q" => ReplReply { outcome: None, quit: true },
            "reset" => {
                let limits = self.ws.limits();
                self.ws = Workspace::new(self.initial.clone(), limits);
                ReplReply::show(Outcome::result(
                    ExitStatus::True,
                    format!("reset: {} definitions", self.initial.len()),
                    json!({"verdict": "reset", "definitions": self.initial.len()}),
                ))
            }
            "defs" => {
                let rows: Vec<(String, usize)> =
                    self.defs().definitions().iter().map(|d| (d.name.to_string(), d.dimension())).collect();
                let text = if rows.is_empty() {
                    "no definitions".to_string()
                } else {
                    rows.iter().map(|(n, d)| format!("{n} : dimension {d}")).collect::<Vec<_>>().join("\n")
                };
                let j: Vec<_> = rows.iter().map(|(n, d)| json!({"name": n, "dimension": d})).collect();
                ReplReply::show(Outcome::result(ExitStatus::True, text, json!({"definitions": j})))
            }
            "help" => ReplReply::show(Outcome::result(ExitStatus::True, HELP, json!({"help": HELP}))),
            other => ReplReply::show(Outcome::error(
                ExitStatus::Usage,
                "usage",
                format!("unknown command `:{other}`; try :help"),
            )),
        }
    }

    fn define(&mut self, line: &str) -> Outcome {
        let parsed = match parse_definitions(&SourceText::repl(line), self.opts) {
            Ok(d) => d,
            Err(e) => return parse_error(&e),
        };
        let mut defs = self.defs().clone();
        let mut names = Vec::new();
        for def in parsed.definitions() {
            names.push(def.name.to_string());
            if let Err(d) = defs.insert(def.clone()) {
                return Outcome::error(ExitStatus::Usage, "redefinition", format!("`{}` is already defined", d.0));
            }
        }
        if let Err(o) = self.ws.replace_defs(defs) {
            return o;
        }
        Outcome::result(
            ExitStatus::True,
            format!("defined {}", names.join(", ")),
            json!({"verdict": "defined", "names": names}),
        )
    }

    /// Reads lines until EOF or `:quit`. Errors never end the loop.
    pub fn run(&mut self, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write, json_mode: bool) -> i32 {
        let prompt = !json_mode && std::io::stdin().is_terminal();
        let mut line = String::new();
        loop {
            if prompt {
                let _ = write!(err, "corec> ");
                let _ = err.flush();
            }
            line.clear();
            match input.read_line(&mut line) {
                Ok(0) => break,
                Ok(_) => {}
                Err(e) => {
                    emit(&Outcome::error(ExitStatus::Usage, "io", e.to_string()), json_mode, out, err);
                    return ExitStatus::Usage.code();
                }
            }
            let reply = self.handle_line(&line);
            if let Some(o) = &reply.outcome {
                if json_mode {
                    let _ = writeln!(out, "{}", o.json);
                } else {
                    emit(o, false, out, err);
                }
            }
            if reply.quit {
                break;
            }
        }
        0
    }
}
