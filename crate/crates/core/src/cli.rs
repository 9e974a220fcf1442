//! The `gosil` command line.
//!
//! Exit codes: 0 when every axiom is well-typed, true, or a model exists;
//! 1 for type errors, false axioms and unsatisfiable theories; 2 for usage,
//! parse and I/O errors.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::elaboration;
use crate::grounding::{self, GroundInterpretation, GroundingError, GroundingErrorKind};
use crate::semantics::{
    find_models, parse_structure, print_structure, satisfies, validate_structure, ModelError, ModelOptions,
    Structure, DEFAULT_MAX_CANDIDATES,
};
use crate::span::Span;
use crate::syntax::{parse_theory, print_formula, Axiom, Formula, Theory};
use crate::typing::{self, TypeError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gosil", version, about = "Check, elaborate, ground and evaluate guarded order-sorted intensional theories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Type-check every axiom.
    Check {
        theory: PathBuf,
        /// Print the typing derivation of each well-typed axiom.
        #[arg(long)]
        derivation: bool,
        /// Print every grounding step of intensional axioms.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print every axiom with its guards made explicit.
    Elaborate {
        theory: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the grounded form of every axiom.
    Ground {
        theory: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate every axiom in a structure.
    Eval {
        theory: PathBuf,
        #[arg(long)]
        structure: PathBuf,
        /// Upper end of the Nat range; overrides the structure's own.
        #[arg(long)]
        nat_bound: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate structures over bounded domains that satisfy every axiom.
    Models {
        theory: PathBuf,
        /// Domain size of a maximal user type, as `Type=n`.
        #[arg(long = "bound", value_name = "TYPE=N", required = true, value_parser = parse_bound)]
        bounds: Vec<(String, usize)>,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        nat_bound: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_MAX_CANDIDATES)]
        max_candidates: u128,
    },
}

fn parse_bound(s: &str) -> Result<(String, usize), String> {
    let (ty, n) = s.split_once('=').ok_or_else(|| format!("`{s}` is not of the form TYPE=N"))?;
    let n = n.trim().parse::<usize>().map_err(|e| format!("bad size in `{s}`: {e}"))?;
    Ok((ty.trim().to_string(), n))
}

struct Session<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Session<'_> {
    fn say(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", line.as_ref());
    }

    /// `file:line:column: error[Kind]: message`, the only diagnostic format.
    fn diagnose(&mut self, file: &Path, span: Option<Span>, kind: &str, message: impl AsRef<str>) {
        let at = match span {
            Some(s) => format!("{}:{s}", file.display()),
            None => file.display().to_string(),
        };
        let _ = writeln!(self.err, "{at}: error[{kind}]: {}", message.as_ref());
    }

    fn json(&mut self, value: &Value) {
        self.say(serde_json::to_string_pretty(value).expect("JSON values always serialize"));
    }

    fn read(&mut self, path: &Path) -> Option<String> {
        match std::fs::read_to_string(path) {
            Ok(text) => Some(text),
            Err(e) => {
                self.diagnose(path, None, "IoError", e.to_string());
                None
            }
        }
    }

    fn load_theory(&mut self, path: &Path) -> Result<Theory, i32> {
        let text = self.read(path).ok_or(EXIT_USAGE)?;
        parse_theory(&text).map_err(|e| {
            self.diagnose(path, Some(e.span), e.kind.name(), &e.message);
            EXIT_USAGE
        })
    }

    fn interpretation(&mut self, path: &Path, theory: &Theory) -> Result<GroundInterpretation, i32> {
        grounding::build_intensional_interp(theory).map_err(|e| {
            self.diagnose(path, e.span, e.kind.name(), &e.message);
            EXIT_FAILURE
        })
    }
}

/// Run the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut s = Session { out, err };
    let result = match cli.command {
        Command::Check { theory, derivation, trace, json } => check(&mut s, &theory, derivation, trace, json),
        Command::Elaborate { theory, json } => rewrite(&mut s, &theory, json, Rewrite::Elaborate),
        Command::Ground { theory, json } => rewrite(&mut s, &theory, json, Rewrite::Ground),
        Command::Eval { theory, structure, nat_bound, json } => eval(&mut s, &theory, &structure, nat_bound, json),
        Command::Models { theory, bounds, limit, nat_bound, max_candidates } => {
            models(&mut s, &theory, bounds, limit, ModelOptions { nat_bound, max_candidates })
        }
    };
    result.unwrap_or_else(|code| code)
}

fn location(span: Option<Span>) -> Value {
    span.map_or(Value::Null, |s| json!({ "line": s.line, "column": s.column }))
}

fn type_error_message(axiom: &Axiom, e: &TypeError) -> String {
    format!("axiom {}: {e}", axiom.label)
}

fn grounding_failure(s: &mut Session, path: &Path, axiom: &Axiom, e: &GroundingError) -> (String, String) {
    let kind = e.kind.name().to_string();
    let message = match &e.kind {
        GroundingErrorKind::Typing(t) => type_error_message(axiom, t),
        _ => format!("axiom {}: {}", axiom.label, e.message),
    };
    s.diagnose(path, Some(e.span.unwrap_or(axiom.span)), &kind, &message);
    (kind, message)
}

fn check(s: &mut Session, path: &Path, derivation: bool, trace: bool, json: bool) -> Result<i32, i32> {
    let theory = s.load_theory(path)?;
    let interp = s.interpretation(path, &theory)?;
    let mut code = EXIT_OK;
    let mut report = Vec::new();
    for axiom in &theory.axioms {
        let mut entry = json!({ "label": axiom.label, "location": location(Some(axiom.span)) });
        match typing::check_sentence_with(&interp, &axiom.formula) {
            Ok(check) => {
                let verdict = if check.is_well_typed() { "well-typed" } else { "ill-typed" };
                entry["verdict"] = json!(verdict);
                if !json {
                    s.say(format!("{}: {verdict}", axiom.label));
                }
                if let Some(t) = &check.grounding {
                    let steps = [("source", &t.source), ("expanded", &t.expanded), ("reduced", &t.reduced)];
                    for (name, f) in steps.iter().filter(|_| trace) {
                        if !json {
                            s.say(format!("  {name}: {}", print_formula(f)));
                        }
                        entry[*name] = json!(print_formula(f));
                    }
                    if !json {
                        s.say(format!("  grounded: {}", print_formula(&t.grounded)));
                    }
                    entry["grounded"] = json!(print_formula(&t.grounded));
                }
                match &check.result {
                    Ok(d) if derivation => {
                        if !json {
                            for line in d.render().lines() {
                                s.say(format!("  {line}"));
                            }
                        }
                        entry["derivation"] = d.to_json();
                    }
                    Ok(_) => {}
                    Err(e) => {
                        code = EXIT_FAILURE;
                        let message = type_error_message(axiom, e);
                        s.diagnose(path, Some(axiom.span), e.kind.name(), &message);
                        entry["error_kind"] = json!(e.kind.name());
                        entry["message"] = json!(message);
                        entry["expected"] = json!(e.expected);
                        entry["found"] = json!(e.found);
                    }
                }
            }
            Err(e) => {
                code = EXIT_FAILURE;
                let (kind, message) = grounding_failure(s, path, axiom, &e);
                if !json {
                    s.say(format!("{}: error", axiom.label));
                }
                entry["verdict"] = json!("error");
                entry["error_kind"] = json!(kind);
                entry["message"] = json!(message);
            }
        }
        report.push(entry);
    }
    if json {
        s.json(&json!({ "file": path.display().to_string(), "axioms": report }));
    }
    Ok(code)
}

#[derive(Clone, Copy)]
enum Rewrite {
    Elaborate,
    Ground,
}

fn rewrite(s: &mut Session, path: &Path, json: bool, mode: Rewrite) -> Result<i32, i32> {
    let theory = s.load_theory(path)?;
    let interp = s.interpretation(path, &theory)?;
    let vocab = &theory.vocabulary;
    let ctx = typing::initial_context(vocab);
    let mut code = EXIT_OK;
    let mut report = Vec::new();
    for axiom in &theory.axioms {
        let result: Result<Formula, GroundingError> = match mode {
            Rewrite::Elaborate if !axiom.formula.is_intensional() => {
                elaboration::elaborate(vocab, &ctx, &axiom.formula).map_err(GroundingError::from)
            }
            _ => grounding::ground(&axiom.formula, &interp),
        };
        match result {
            Ok(f) => {
                let text = print_formula(&f);
                if !json {
                    s.say(format!("{}: {text}", axiom.label));
                }
                report.push(json!({ "label": axiom.label, "formula": text }));
            }
            Err(e) => {
                code = EXIT_FAILURE;
                let (kind, message) = grounding_failure(s, path, axiom, &e);
                if !json {
                    s.say(format!("{}: error", axiom.label));
                }
                report.push(json!({
                    "label": axiom.label,
                    "error_kind": kind,
                    "message": message,
                    "location": location(Some(axiom.span)),
                }));
            }
        }
    }
    if json {
        s.json(&json!({ "file": path.display().to_string(), "axioms": report }));
    }
    Ok(code)
}

/// Position of the `type` or `interp` entry naming `subject`.
fn entry_span(text: &str, subject: &str) -> Option<Span> {
    text.lines().enumerate().find_map(|(i, line)| {
        let trimmed = line.trim_start();
        let mut words = trimmed.split(|c: char| c.is_whitespace() || c == '=').filter(|w| !w.is_empty());
        let keyword = words.next()?;
        let named = (keyword == "type" || keyword == "interp") && words.next() == Some(subject);
        named.then(|| Span::new(i + 1, line.len() - trimmed.len() + 1))
    })
}

fn eval(s: &mut Session, path: &Path, structure_path: &Path, nat_bound: Option<u64>, json: bool) -> Result<i32, i32> {
    let theory = s.load_theory(path)?;
    let interp = s.interpretation(path, &theory)?;
    let text = s.read(structure_path).ok_or(EXIT_USAGE)?;
    let mut structure: Structure = parse_structure(&text).map_err(|e| {
        s.diagnose(structure_path, Some(e.span), "StructureSyntaxError", &e.message);
        EXIT_USAGE
    })?;
    if nat_bound.is_some() {
        structure.nat_bound = nat_bound;
    }
    let mut with_facts = structure.clone();
    with_facts.adopt_facts(&theory.concept_facts);
    let report = validate_structure(interp.vocabulary(), &with_facts);
    if !report.is_empty() {
        for v in &report.violations {
            let span = entry_span(&text, &v.subject).unwrap_or(Span::new(1, 1));
            s.diagnose(structure_path, Some(span), &format!("{:?}", v.kind), &v.message);
        }
        return Err(EXIT_FAILURE);
    }
    let mut code = EXIT_OK;
    let mut results = Vec::new();
    for axiom in &theory.axioms {
        match satisfies(&theory, &structure, &axiom.formula) {
            Ok(value) => {
                if !value {
                    code = EXIT_FAILURE;
                }
                if !json {
                    s.say(format!("{}: {value}", axiom.label));
                }
                results.push(json!({ "label": axiom.label, "verdict": value }));
            }
            Err(e) => {
                code = EXIT_FAILURE;
                let message = format!("axiom {}: {e}", axiom.label);
                s.diagnose(path, Some(axiom.span), e.kind_name(), &message);
                if !json {
                    s.say(format!("{}: error", axiom.label));
                }
                results.push(json!({
                    "label": axiom.label,
                    "verdict": Value::Null,
                    "error_kind": e.kind_name(),
                    "message": message,
                    "location": location(Some(axiom.span)),
                }));
            }
        }
    }
    if json {
        s.json(&json!({ "file": path.display().to_string(), "structure": structure_path.display().to_string(), "axioms": results }));
    }
    Ok(code)
}

fn models(
    s: &mut Session,
    path: &Path,
    bounds: Vec<(String, usize)>,
    limit: Option<usize>,
    opts: ModelOptions,
) -> Result<i32, i32> {
    let theory = s.load_theory(path)?;
    let bounds: BTreeMap<String, usize> = bounds.into_iter().collect();
    let found = find_models(&theory, &bounds, limit, opts).map_err(|e| {
        let code = match &e {
            ModelError::BoundMissing(_) | ModelError::InvalidBound(_) | ModelError::ExplosionGuard { .. } => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        let span = match &e {
            ModelError::IllTyped { label, .. } => theory.axiom(label).map(|a| a.span),
            _ => None,
        };
        s.diagnose(path, span, e.kind_name(), e.to_string());
        code
    })?;
    if found.is_empty() {
        s.say("no models");
        return Ok(EXIT_FAILURE);
    }
    for (i, m) in found.iter().enumerate() {
        if i > 0 {
            s.say("");
        }
        s.say(format!("// model {}", i + 1));
        let _ = write!(s.out, "{}", print_structure(m));
    }
    Ok(EXIT_OK)
}
