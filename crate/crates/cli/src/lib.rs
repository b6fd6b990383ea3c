//! Command-line front end: argument handling, dispatch and reports.

pub mod parse;
mod selftest;

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{mpsc, Arc};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use sigma_hensel::finite_field::FieldDesc;
use sigma_hensel::hensel::{sigma_hensel_solve, Approximation, CheckOptions, SolveOptions, SolveReport};
use sigma_hensel::leading_term::{angular_component, LeadingTerm};
use sigma_hensel::series::{weierstrass_divide, weierstrass_prepare, SeparatedSeries, Var};
use sigma_hensel::term::NamedSeries;
use sigma_hensel::witt::{RingDesc, WittNum};
use sigma_hensel::{Error, Val};

pub use parse::{parse_term, parse_term_with_spans};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sigmahensel", version, about = "p-adic difference-analytic algebra over W(F_{p^k})")]
pub struct Cli {
    #[command(flatten)]
    pub session: SessionArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct SessionArgs {
    /// Residue characteristic.
    #[arg(short = 'p', global = true)]
    pub p: Option<u64>,
    /// Residue field degree.
    #[arg(short = 'k', global = true, default_value_t = 1)]
    pub k: usize,
    /// Absolute precision: arithmetic is mod p^N.
    #[arg(short = 'N', global = true, default_value_t = 8)]
    pub n: u32,
    /// Residue field modulus, coefficients low to high (`c0,c1,...,ck`).
    #[arg(long, global = true, value_delimiter = ',')]
    pub modulus: Option<Vec<u64>>,
    /// Series file; the file stem names the series in terms.
    #[arg(long = "series", global = true)]
    pub series: Vec<PathBuf>,
    /// Sampled pairs for the linear-approximation check.
    #[arg(long, global = true, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Print batch results in input order.
    #[arg(long, global = true)]
    pub ordered: bool,
    /// Emit a JSON report.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find a root of each term by σ-Hensel iteration.
    Solve {
        #[arg(required = true)]
        terms: Vec<String>,
        /// Starting approximation.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        start: String,
        /// Ball radius ξ (default: min val of the gradient).
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<i64>,
        /// Recompute the linear data at every step.
        #[arg(long)]
        newton: bool,
    },
    /// Evaluate a term at a point.
    Eval {
        term: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Leading term lt_{p^m}.
    Lt {
        #[arg(allow_hyphen_values = true)]
        value: String,
        #[arg(short = 'm', default_value_t = 0)]
        level: u32,
    },
    /// Angular component ac_{p^m}.
    Ac {
        #[arg(allow_hyphen_values = true)]
        value: String,
        #[arg(short = 'm', default_value_t = 0)]
        level: u32,
    },
    /// Weierstrass division of series G by series F.
    Wdiv {
        g: String,
        f: String,
        /// Distinguished variable, e.g. X0 or Y1.
        #[arg(long)]
        var: String,
    },
    /// Weierstrass preparation of series F.
    Wprep {
        f: String,
        #[arg(long)]
        var: String,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

/// Usage problems exit with 2, mathematical failures with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. }
            | Error::UnknownSeries(_)
            | Error::Arity(_)
            | Error::Parse(_)
            | Error::NotPrime(_)
            | Error::InvalidParameters(_)
            | Error::ReducibleModulus { .. } => CliError::Usage(format!("error[{}]: {e}", e.code())),
            e => CliError::Domain(e),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Domain(e) => format!("error[{}]: {e}", e.code()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Session {
    args: SessionArgs,
    ring: Arc<RingDesc>,
    series: HashMap<String, Arc<NamedSeries>>,
}

impl Session {
    fn open(args: &SessionArgs) -> CliResult<Session> {
        let p = args.p.ok_or_else(|| CliError::Usage("missing -p".into()))?;
        let field = FieldDesc::new(p, args.k, args.modulus.as_deref())?;
        let ring = RingDesc::new(field, args.n)?;
        let mut series = HashMap::new();
        for path in &args.series {
            let named = load_series(&ring, path)?;
            series.insert(named.name.clone(), named);
        }
        Ok(Session {
            args: args.clone(),
            ring,
            series,
        })
    }

    fn elem(&self, s: &str) -> CliResult<WittNum> {
        Ok(self.ring.parse_elem(s)?)
    }

    fn series(&self, name: &str) -> CliResult<&Arc<NamedSeries>> {
        self.series
            .get(name)
            .ok_or_else(|| CliError::from(Error::UnknownSeries(name.into())))
    }

    fn config_json(&self) -> Value {
        json!({
            "p": self.ring.p(),
            "k": self.ring.k(),
            "N": self.ring.precision(),
            "modulus": self.ring.field().modulus(),
            "samples": self.args.samples,
            "seed": self.args.seed,
        })
    }
}

fn load_series(ring: &Arc<RingDesc>, path: &Path) -> CliResult<Arc<NamedSeries>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| CliError::Usage(format!("{}: no usable file stem", path.display())))?;
    Ok(NamedSeries::new(name, SeparatedSeries::parse(ring, &text)?))
}

fn parse_var(s: &str) -> CliResult<Var> {
    let bad = || CliError::Usage(format!("variable must look like X0 or Y1, got {s:?}"));
    let (kind, idx) = s.split_at(1.min(s.len()));
    let idx: usize = idx.parse().map_err(|_| bad())?;
    match kind {
        "X" | "x" => Ok(Var::X(idx)),
        "Y" | "y" => Ok(Var::Y(idx)),
        _ => Err(bad()),
    }
}

fn num_json(x: &WittNum) -> Value {
    json!({ "int": x.to_int_string(), "digits": x.to_digit_string() })
}

fn num_text(x: &WittNum) -> String {
    format!("{} ({})", x.to_int_string(), x.to_digit_string())
}

fn val_json(v: Val) -> Value {
    match v {
        Val::Fin(i) => json!(i),
        Val::Inf => json!("inf"),
    }
}

struct Outcome {
    inputs: Value,
    outputs: Value,
    steps: Vec<Value>,
    text: Vec<String>,
    /// Nonzero when a batch finished with some failed items.
    status: i32,
}

fn solve_json(report: &SolveReport) -> (Value, Vec<Value>) {
    let steps = report
        .steps
        .iter()
        .map(|s| {
            json!({
                "approx": num_json(&s.approx),
                "residual_val": val_json(s.residual_val),
                "step_val": s.size,
            })
        })
        .collect();
    let approximation = match report.config.approximation {
        Approximation::Certified => json!("certified"),
        Approximation::Sampled(n) => json!({ "sampled": n }),
    };
    let outputs = json!({
        "root": num_json(&report.root),
        "steps": report.steps.len(),
        "residual_val": val_json(report.residual_val),
        "xi": report.config.xi,
        "d": report.config.d.iter().map(num_json).collect::<Vec<_>>(),
        "linear_approximation": approximation,
    });
    (outputs, steps)
}

fn run_solve(session: &Session, terms: &[String], start: &str, xi: Option<i64>, newton: bool) -> CliResult<Outcome> {
    let a0 = session.elem(start)?;
    let parsed = terms
        .iter()
        .map(|t| parse_term(t, &session.series))
        .collect::<sigma_hensel::Result<Vec<_>>>()?;
    let opts = SolveOptions {
        check: CheckOptions {
            samples: session.args.samples,
            seed: session.args.seed,
            ..CheckOptions::default()
        },
        newton,
    };
    // independent solves run concurrently; results arrive in completion order
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|scope| {
        for (i, t) in parsed.iter().enumerate() {
            let tx = tx.clone();
            let a0 = &a0;
            scope.spawn(move || {
                let _ = tx.send((i, sigma_hensel_solve(t, a0, xi, None, &opts)));
            });
        }
    });
    drop(tx);
    let mut results: Vec<_> = rx.into_iter().collect();
    if session.args.ordered || terms.len() == 1 {
        results.sort_by_key(|(i, _)| *i);
    }
    let mut text = Vec::new();
    let mut outputs = Vec::new();
    let mut steps = Vec::new();
    let mut first_error = None;
    for (i, result) in results {
        match result {
            Ok(report) => {
                let (out, st) = solve_json(&report);
                let line = format!("root = {} after {} steps", num_text(&report.root), report.steps.len());
                text.push(if terms.len() == 1 { line } else { format!("{}: {line}", terms[i]) });
                outputs.push(json!({ "term": terms[i], "result": out, "steps": st.clone() }));
                if terms.len() == 1 {
                    steps = st;
                }
            }
            Err(e) => {
                let err = CliError::from(e);
                if terms.len() == 1 {
                    return Err(err);
                }
                text.push(format!("{}: {}", terms[i], err.message()));
                outputs.push(json!({ "term": terms[i], "error": err.message() }));
                first_error.get_or_insert(err);
            }
        }
    }
    let outputs = if terms.len() == 1 {
        outputs.remove(0)["result"].take()
    } else {
        json!({ "results": outputs })
    };
    Ok(Outcome {
        inputs: json!({ "terms": terms, "start": num_json(&a0), "xi": xi, "newton": newton }),
        outputs,
        steps,
        text,
        status: first_error.map_or(EXIT_OK, |e| e.exit_code()),
    })
}

fn run_command(session_args: &SessionArgs, command: &Command) -> CliResult<Outcome> {
    if let Command::Selftest = command {
        let (ok, lines) = selftest::run();
        if !ok {
            return Err(CliError::Domain(Error::StalledProgress(lines.join("\n"))));
        }
        return Ok(Outcome {
            inputs: json!({}),
            outputs: json!({ "suites": lines }),
            steps: Vec::new(),
            status: EXIT_OK,
            text: lines,
        });
    }
    let session = Session::open(session_args)?;
    match command {
        Command::Solve { terms, start, xi, newton } => run_solve(&session, terms, start, *xi, *newton),
        Command::Eval { term, at } => {
            let t = parse_term(term, &session.series)?;
            let x = session.elem(at)?;
            let v = t.prolong_eval(&x)?;
            Ok(Outcome {
                inputs: json!({ "term": term, "at": num_json(&x) }),
                outputs: json!({ "value": num_json(&v), "val": val_json(v.val()) }),
                steps: Vec::new(),
                status: EXIT_OK,
                text: vec![num_text(&v)],
            })
        }
        Command::Lt { value, level } => {
            let x = session.elem(value)?;
            let lt = LeadingTerm::of(&x, *level)?;
            Ok(Outcome {
                inputs: json!({ "value": num_json(&x), "level": level }),
                outputs: json!({
                    "lt": lt.to_string(),
                    "val": val_json(lt.val()),
                    "unit": lt.unit().map(num_json),
                }),
                steps: Vec::new(),
                status: EXIT_OK,
                text: vec![lt.to_string()],
            })
        }
        Command::Ac { value, level } => {
            let x = session.elem(value)?;
            let ac = angular_component(&x, *level)?;
            Ok(Outcome {
                inputs: json!({ "value": num_json(&x), "level": level }),
                outputs: json!({ "ac": ac.to_string(), "value": num_json(ac.value()) }),
                steps: Vec::new(),
                status: EXIT_OK,
                text: vec![ac.to_string()],
            })
        }
        Command::Wdiv { g, f, var } => {
            let var = parse_var(var)?;
            let (gs, fs) = (session.series(g)?, session.series(f)?);
            let div = weierstrass_divide(&gs.series, &fs.series, var)?;
            let (q, r) = (div.quotient.to_text(), div.remainder.to_text());
            Ok(Outcome {
                inputs: json!({ "g": g, "f": f, "var": var.to_string() }),
                outputs: json!({ "quotient": q, "remainder": r }),
                steps: Vec::new(),
                status: EXIT_OK,
                text: vec![format!("quotient:\n{q}remainder:\n{r}").trim_end().to_string()],
            })
        }
        Command::Wprep { f, var } => {
            let var = parse_var(var)?;
            let fs = session.series(f)?;
            let prep = weierstrass_prepare(&fs.series, var)?;
            let (u, p) = (prep.unit.to_text(), prep.poly.to_text());
            Ok(Outcome {
                inputs: json!({ "f": f, "var": var.to_string() }),
                outputs: json!({ "unit": u, "poly": p }),
                steps: Vec::new(),
                status: EXIT_OK,
                text: vec![format!("unit:\n{u}poly:\n{p}").trim_end().to_string()],
            })
        }
        Command::Selftest => unreachable!("handled above"),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Solve { .. } => "solve",
        Command::Eval { .. } => "eval",
        Command::Lt { .. } => "lt",
        Command::Ac { .. } => "ac",
        Command::Wdiv { .. } => "wdiv",
        Command::Wprep { .. } => "wprep",
        Command::Selftest => "selftest",
    }
}

/// Runs the program on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let started = Instant::now();
    let result = run_command(&cli.session, &cli.command);
    let elapsed = started.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(outcome) => {
            if cli.session.json {
                let config = Session::open(&cli.session).map(|s| s.config_json()).unwrap_or(Value::Null);
                let report = json!({
                    "command": command_name(&cli.command),
                    "config": config,
                    "inputs": outcome.inputs,
                    "outputs": outcome.outputs,
                    "steps": outcome.steps,
                    "timings_ms": { "total": elapsed },
                });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                for line in outcome.text {
                    let _ = writeln!(out, "{line}");
                }
            }
            outcome.status
        }
        Err(e) => {
            if cli.session.json {
                let report = json!({
                    "command": command_name(&cli.command),
                    "error": e.message(),
                    "exit_code": e.exit_code(),
                });
                let _ = writeln!(out, "{report}");
            }
            let _ = writeln!(err, "{}", e.message());
            e.exit_code()
        }
    }
}
