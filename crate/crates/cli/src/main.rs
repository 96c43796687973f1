use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monitors::automata::{
    afa_to_nfa, dot, monitor_dfa, monitor_nfa, monitor_to_afa, Afa, Dfa, Limits, Nfa, Polarity,
};
use monitors::gapbench::{blowup_report, BlowupRow, Family, GapParams};
use monitors::logic::{eval_formula_lasso, parse_formula_infer, synthesize, synthesize_with, Formula, Lasso};
use monitors::semantics::{run_finite_trace, Budget, OutcomeKind};
use monitors::terms::doc::{read_document, write_document, Document};
use monitors::terms::{parse_monitor_infer, validate};
use monitors::transform::{
    check_equivalence, check_strict, determinize_regular, pad, parallel_to_deterministic, parallel_to_regular,
    Equivalence, EquivalenceMode, PipelineStats,
};
use monitors::{Alphabet, Error, Monitor};
use serde_json::json;

#[derive(Parser)]
#[command(name = "monitors", version, about = "Runtime monitors: run, transform, compare and synthesize")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate and pretty-print a monitor or formula.
    Parse(ParseArgs),
    /// Run a monitor on a finite trace.
    Run(RunArgs),
    /// Convert a monitor to a regular or deterministic monitor, or to an automaton.
    Transform(TransformArgs),
    /// Compare two monitors for verdict (or ω-verdict) equivalence.
    Equiv(EquivArgs),
    /// Synthesize a monitor from a formula.
    Synth(SynthArgs),
    /// Evaluate a formula on the infinite trace U·V^ω.
    Eval(EvalArgs),
    /// Size measurements.
    Bench {
        #[command(subcommand)]
        which: BenchCommand,
    },
    /// Write the automaton of a monitor.
    Export(ExportArgs),
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Blowup of the gap monitor families.
    Gap(GapArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Doc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolarityArg {
    Accept,
    Reject,
}

impl From<PolarityArg> for Polarity {
    fn from(p: PolarityArg) -> Polarity {
        match p {
            PolarityArg::Accept => Polarity::Accept,
            PolarityArg::Reject => Polarity::Reject,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Regular,
    Deterministic,
    Afa,
    Nfa,
    Dfa,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AutomatonKind {
    Afa,
    Nfa,
    Dfa,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Sizes,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    A,
    U,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Alphabet override, comma separated.
    #[arg(long)]
    alphabet: Option<String>,
    /// State limit for automaton constructions and unfolding.
    #[arg(long, default_value_t = 1_000_000)]
    max_states: usize,
    /// Largest printed term, in symbols.
    #[arg(long, default_value_t = 1_000_000)]
    print_limit: u128,
}

#[derive(Args)]
struct ParseArgs {
    /// Input file, `-` for stdin.
    #[arg(default_value = "-")]
    input: PathBuf,
    /// Read a formula instead of a monitor.
    #[arg(long)]
    formula: bool,
    /// Also print the validation report.
    #[arg(long)]
    report: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct RunArgs {
    #[arg(short = 'm', long = "monitor", default_value = "-")]
    monitor: PathBuf,
    /// Trace, e.g. `a b a` or `aba` for single-letter alphabets.
    #[arg(short = 't', long, conflicts_with = "trace_file")]
    trace: Option<String>,
    #[arg(long)]
    trace_file: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    tau_budget: usize,
    #[arg(long, default_value_t = 100_000)]
    frontier_budget: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(short = 'm', long = "monitor", default_value = "-")]
    monitor: PathBuf,
    #[arg(long, value_enum)]
    to: Target,
    /// Append `end` to action sums missing some action before transforming.
    #[arg(long)]
    pad: bool,
    /// Accept inputs that are not syntactically reactive.
    #[arg(long)]
    lenient: bool,
    /// Polarity for automaton targets.
    #[arg(long, value_enum, default_value = "accept")]
    polarity: PolarityArg,
    #[arg(long, value_enum)]
    emit: Option<Emit>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EquivArgs {
    #[arg(long = "m1")]
    m1: PathBuf,
    #[arg(long = "m2")]
    m2: PathBuf,
    /// Compare verdicts on infinite traces only.
    #[arg(long)]
    omega: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(short = 'f', long = "formula", default_value = "-")]
    formula: PathBuf,
    /// Defaults to reject for formulas without least fixpoints, accept otherwise.
    #[arg(long, value_enum)]
    polarity: Option<PolarityArg>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(short = 'f', long = "formula", default_value = "-")]
    formula: PathBuf,
    /// `U:V` with V non-empty.
    #[arg(long)]
    lasso: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GapArgs {
    #[arg(long, value_enum, ignore_case = true)]
    family: FamilyArg,
    #[arg(long)]
    l: u32,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(short = 'm', long = "monitor", default_value = "-")]
    monitor: PathBuf,
    #[arg(long, value_enum, default_value = "dfa")]
    automaton: AutomatonKind,
    #[arg(long, value_enum, default_value = "accept")]
    polarity: PolarityArg,
    /// Graphviz output.
    #[arg(long)]
    dot: bool,
    #[command(flatten)]
    common: Common,
}

/// Failure of a command, with its exit status.
enum Failure {
    Input(String),
    Resource(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::ResourceLimit(_) => Failure::Resource(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Out = Result<(String, bool), Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut s = String::new();
    if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Input(format!("stdin: {e}")))?;
    } else {
        s = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(s)
}

fn is_document(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

fn override_alphabet(common: &Common) -> Result<Option<Alphabet>, Failure> {
    Ok(common.alphabet.as_deref().map(Alphabet::parse_list).transpose()?)
}

fn load_monitor(path: &Path, common: &Common) -> Result<Monitor, Failure> {
    monitor_from_text(&read_input(path)?, override_alphabet(common)?.as_ref())
}

fn monitor_from_text(text: &str, alphabet: Option<&Alphabet>) -> Result<Monitor, Failure> {
    let m = if is_document(text) {
        Monitor::from_document(&read_document(text)?)?
    } else if let Some(ab) = alphabet {
        monitors::terms::parse_monitor(text, ab)?
    } else {
        parse_monitor_infer(text)?
    };
    m.require_closed()?;
    Ok(m)
}

/// Loads two monitors over a common alphabet: the override if given, else
/// the union of the actions each text names.
fn load_pair(p1: &Path, p2: &Path, common: &Common) -> Result<(Monitor, Monitor), Failure> {
    let (t1, t2) = (read_input(p1)?, read_input(p2)?);
    let alphabet = match override_alphabet(common)? {
        Some(ab) => Some(ab),
        None if is_document(&t1) || is_document(&t2) => None,
        None => {
            let mut names = BTreeSet::new();
            for t in [&t1, &t2] {
                if let Ok(m) = parse_monitor_infer(t) {
                    names.extend(m.alphabet().names().iter().cloned());
                }
            }
            if names.is_empty() { None } else { Some(Alphabet::new(names)?) }
        }
    };
    Ok((monitor_from_text(&t1, alphabet.as_ref())?, monitor_from_text(&t2, alphabet.as_ref())?))
}

fn load_formula(path: &Path, common: &Common) -> Result<(Formula, Alphabet), Failure> {
    let text = read_input(path)?;
    if is_document(&text) {
        return Ok(Formula::from_document(&read_document(&text)?)?);
    }
    match override_alphabet(common)? {
        Some(ab) => Ok((monitors::logic::parse_formula(&text, &ab)?, ab)),
        None => Ok(parse_formula_infer(&text)?),
    }
}

fn doc_json(doc: &Document) -> String {
    write_document(doc)
}

/// Text form of a monitor, with an alphabet header when the term does not
/// mention every action.
fn monitor_text(m: &Monitor, limit: u128) -> Result<String, Failure> {
    let body = m.to_text(limit)?;
    let mentioned = parse_monitor_infer(&body).map(|p| p.alphabet().clone());
    if mentioned.as_ref() == Ok(m.alphabet()) {
        Ok(body)
    } else {
        Ok(format!("@alphabet {}\n{body}", m.alphabet().names().join(", ")))
    }
}

fn formula_text(phi: &Formula, ab: &Alphabet) -> String {
    let body = phi.to_text(ab);
    match parse_formula_infer(&body) {
        Ok((_, inferred)) if &inferred == ab => body,
        _ => format!("@alphabet {}\n{body}", ab.names().join(", ")),
    }
}

fn show_monitor(m: &Monitor, common: &Common) -> Result<String, Failure> {
    match common.format {
        Format::Text => Ok(monitor_text(m, common.print_limit)? + "\n"),
        Format::Doc => Ok(doc_json(&m.to_document(common.print_limit)?) + "\n"),
    }
}

fn limits(common: &Common) -> Limits {
    Limits { max_states: common.max_states }
}

fn cmd_parse(a: &ParseArgs) -> Out {
    let mut out = String::new();
    if a.formula {
        let (phi, ab) = load_formula(&a.input, &a.common)?;
        match a.common.format {
            Format::Text => {
                writeln!(out, "{}", formula_text(&phi, &ab)).unwrap();
                if a.report {
                    let f = phi.fragments();
                    writeln!(
                        out,
                        "size {} sHML {} cHML {} maxHML {} minHML {}",
                        phi.size(),
                        f.shml,
                        f.chml,
                        f.max_hml,
                        f.min_hml
                    )
                    .unwrap();
                }
            }
            Format::Doc => writeln!(out, "{}", doc_json(&phi.to_document(&ab))).unwrap(),
        }
    } else {
        let m = load_monitor(&a.input, &a.common)?;
        out += &show_monitor(&m, &a.common)?;
        if a.report {
            let r = validate(&m);
            match a.common.format {
                Format::Text => writeln!(
                    out,
                    "size {} regular {} deterministic {} guarded {} reactive {}",
                    r.size, r.regular, r.deterministic, r.guarded, r.syntactically_reactive
                )
                .unwrap(),
                Format::Doc => writeln!(out, "{}", serde_json::to_string(&r).unwrap()).unwrap(),
            }
        }
    }
    Ok((out, true))
}

fn cmd_run(a: &RunArgs) -> Out {
    let m = load_monitor(&a.monitor, &a.common)?;
    let text = match (&a.trace, &a.trace_file) {
        (Some(t), _) => t.clone(),
        (None, Some(f)) => read_input(f)?,
        (None, None) => String::new(),
    };
    let trace = m.alphabet().parse_trace(text.trim())?;
    let budget = Budget::new(a.tau_budget, a.frontier_budget)?;
    let o = run_finite_trace(&m, &trace, &budget)?;
    let out = match a.common.format {
        Format::Text => format!("{o}\n"),
        Format::Doc => serde_json::to_string(&o).unwrap() + "\n",
    };
    if o.kind == OutcomeKind::BudgetExceeded {
        print!("{out}");
        return Err(Failure::Resource(format!("silent-step budget exceeded at prefix {}", o.witness_prefix_len.unwrap_or(0))));
    }
    Ok((out, true))
}

fn sizes_line(s: &PipelineStats) -> String {
    format!(
        "sizes: input {} afa {}/{} nfa {}/{} dfa {}/{} output {}",
        s.input_size,
        s.accept.afa_states,
        s.reject.afa_states,
        s.accept.nfa_states,
        s.reject.nfa_states,
        s.accept.dfa_states,
        s.reject.dfa_states,
        s.output_size
    )
}

fn cmd_transform(a: &TransformArgs) -> Out {
    let mut m = load_monitor(&a.monitor, &a.common)?;
    if a.pad {
        m = pad(&m);
    }
    let l = limits(&a.common);
    let polarity = Polarity::from(a.polarity);
    match a.to {
        Target::Regular | Target::Deterministic => {
            if !a.lenient {
                check_strict(&m)?;
            }
            let t = if a.to == Target::Regular {
                parallel_to_regular(&m, &l)?
            } else if m.is_regular() {
                determinize_regular(&m, &l)?
            } else {
                parallel_to_deterministic(&m, &l)?
            };
            let mut out = show_monitor(&t.monitor, &a.common)?;
            if a.emit == Some(Emit::Sizes) {
                match a.common.format {
                    Format::Text => writeln!(out, "{}", sizes_line(&t.stats)).unwrap(),
                    Format::Doc => writeln!(out, "{}", serde_json::to_string(&t.stats).unwrap()).unwrap(),
                }
            }
            Ok((out, true))
        }
        Target::Afa => Ok((afa_listing(&monitor_to_afa(&m, polarity)?, a.common.format), true)),
        Target::Nfa => Ok((nfa_listing(&monitor_nfa(&m, polarity, &l)?.0, a.common.format), true)),
        Target::Dfa => Ok((dfa_listing(&monitor_dfa(&m, polarity, &l)?.0, a.common.format), true)),
    }
}

fn names(ab: &Alphabet) -> Vec<String> {
    ab.names().to_vec()
}

fn afa_listing(x: &Afa, format: Format) -> String {
    let delta: Vec<Vec<String>> = x.delta.iter().map(|row| row.iter().map(|f| f.to_string()).collect()).collect();
    match format {
        Format::Doc => {
            let v = json!({
                "format": "afa", "alphabet": names(&x.alphabet), "initial": x.initial.to_string(),
                "accepting": x.accepting, "delta": delta,
            });
            v.to_string() + "\n"
        }
        Format::Text => {
            let mut s = format!("afa states {}\ninitial {}\n", x.len(), x.initial);
            for (q, row) in delta.iter().enumerate() {
                let acc = if x.accepting[q] { " accepting" } else { "" };
                writeln!(s, "q{q}{acc}").unwrap();
                for (a, f) in x.alphabet.actions().zip(row) {
                    writeln!(s, "  {} -> {f}", x.alphabet.name(a)).unwrap();
                }
            }
            s
        }
    }
}

fn nfa_listing(x: &Nfa, format: Format) -> String {
    match format {
        Format::Doc => {
            let v = json!({
                "format": "nfa", "alphabet": names(&x.alphabet), "initial": x.initial,
                "accepting": x.accepting, "trans": x.trans,
            });
            v.to_string() + "\n"
        }
        Format::Text => {
            let init: Vec<String> = x.initial.iter().map(|q| format!("q{q}")).collect();
            let mut s = format!("nfa states {}\ninitial {}\n", x.len(), init.join(" "));
            for q in 0..x.len() {
                let acc = if x.accepting[q] { " accepting" } else { "" };
                writeln!(s, "q{q}{acc}").unwrap();
                for a in x.alphabet.actions() {
                    for p in &x.trans[q][a.index()] {
                        writeln!(s, "  {} -> q{p}", x.alphabet.name(a)).unwrap();
                    }
                }
            }
            s
        }
    }
}

fn dfa_listing(x: &Dfa, format: Format) -> String {
    match format {
        Format::Doc => {
            let v = json!({
                "format": "dfa", "alphabet": names(&x.alphabet), "initial": x.initial,
                "accepting": x.accepting, "trans": x.trans, "dead": x.dead,
            });
            v.to_string() + "\n"
        }
        Format::Text => {
            let mut s = format!("dfa states {}\ninitial q{}\n", x.len(), x.initial);
            for q in 0..x.len() {
                let acc = if x.accepting[q] { " accepting" } else { "" };
                writeln!(s, "q{q}{acc}").unwrap();
                for a in x.alphabet.actions() {
                    writeln!(s, "  {} -> q{}", x.alphabet.name(a), x.trans[q][a.index()]).unwrap();
                }
            }
            s
        }
    }
}

fn polarity_name(p: Polarity) -> &'static str {
    match p {
        Polarity::Accept => "accept",
        Polarity::Reject => "reject",
    }
}

fn cmd_equiv(a: &EquivArgs) -> Out {
    let (m1, m2) = load_pair(&a.m1, &a.m2, &a.common)?;
    let mode = if a.omega { EquivalenceMode::Omega } else { EquivalenceMode::Verdict };
    let result = check_equivalence(&m1, &m2, mode, &limits(&a.common))?;
    let ab = m1.alphabet();
    let out = match (&result, a.common.format) {
        (Equivalence::Equivalent, Format::Text) => "EQUIVALENT\n".to_string(),
        (Equivalence::Equivalent, Format::Doc) => json!({"equivalent": true}).to_string() + "\n",
        (Equivalence::Trace { polarity, trace }, Format::Text) => {
            format!("NOT EQUIVALENT ({}) on trace {}\n", polarity_name(*polarity), ab.format_trace(trace))
        }
        (Equivalence::Trace { polarity, trace }, Format::Doc) => {
            let t: Vec<&str> = trace.iter().map(|a| ab.name(*a)).collect();
            json!({"equivalent": false, "polarity": polarity_name(*polarity), "trace": t}).to_string() + "\n"
        }
        (Equivalence::Lasso { polarity, u, v }, Format::Text) => format!(
            "NOT EQUIVALENT ({}) on lasso {}:{}\n",
            polarity_name(*polarity),
            ab.format_trace(u),
            ab.format_trace(v)
        ),
        (Equivalence::Lasso { polarity, u, v }, Format::Doc) => {
            let u: Vec<&str> = u.iter().map(|a| ab.name(*a)).collect();
            let v: Vec<&str> = v.iter().map(|a| ab.name(*a)).collect();
            json!({"equivalent": false, "polarity": polarity_name(*polarity), "u": u, "v": v}).to_string() + "\n"
        }
    };
    Ok((out, result.holds()))
}

fn cmd_synth(a: &SynthArgs) -> Out {
    let (phi, ab) = load_formula(&a.formula, &a.common)?;
    let m = match a.polarity {
        Some(p) => synthesize_with(&phi, &ab, p.into())?,
        None => synthesize(&phi, &ab)?.0,
    };
    Ok((show_monitor(&m, &a.common)?, true))
}

fn cmd_eval(a: &EvalArgs) -> Out {
    let (phi, ab) = load_formula(&a.formula, &a.common)?;
    let (u, v) = a
        .lasso
        .split_once(':')
        .ok_or_else(|| Failure::Input("lasso must have the form U:V".into()))?;
    let lasso = Lasso::new(ab.parse_trace(u.trim())?, ab.parse_trace(v.trim())?)?;
    let holds = eval_formula_lasso(&phi, &lasso);
    let out = match a.common.format {
        Format::Text => format!("{holds}\n"),
        Format::Doc => json!({"holds": holds}).to_string() + "\n",
    };
    Ok((out, holds))
}

fn cmd_gap(a: &GapArgs) -> Out {
    let family = match a.family {
        FamilyArg::A => Family::A,
        FamilyArg::U => Family::U,
    };
    let p = GapParams::new(a.l)?;
    let row = blowup_report(family, p, &limits(&a.common))?;
    let out = match a.common.format {
        Format::Text => {
            let mut s = BlowupRow::COLUMNS.join("\t") + "\n";
            s += &row.cells().join("\t");
            s + "\n"
        }
        Format::Doc => serde_json::to_string(&row).unwrap() + "\n",
    };
    Ok((out, true))
}

fn cmd_export(a: &ExportArgs) -> Out {
    let m = load_monitor(&a.monitor, &a.common)?;
    let l = limits(&a.common);
    let polarity = Polarity::from(a.polarity);
    let format = a.common.format;
    let out = match a.automaton {
        AutomatonKind::Afa => {
            let x = monitor_to_afa(&m, polarity)?;
            if a.dot { dot::afa_to_dot(&x) } else { afa_listing(&x, format) }
        }
        AutomatonKind::Nfa => {
            let x = afa_to_nfa(&monitor_to_afa(&m, polarity)?, &l)?;
            if a.dot { dot::nfa_to_dot(&x) } else { nfa_listing(&x, format) }
        }
        AutomatonKind::Dfa => {
            let x = monitor_dfa(&m, polarity, &l)?.0;
            if a.dot { dot::dfa_to_dot(&x) } else { dfa_listing(&x, format) }
        }
    };
    Ok((out, true))
}

fn dispatch(cli: &Cli) -> ExitCode {
    let result = match &cli.command {
        Command::Parse(a) => cmd_parse(a),
        Command::Run(a) => cmd_run(a),
        Command::Transform(a) => cmd_transform(a),
        Command::Equiv(a) => cmd_equiv(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Bench { which: BenchCommand::Gap(a) } => cmd_gap(a),
        Command::Export(a) => cmd_export(a),
    };
    match result {
        Ok((out, positive)) => {
            print!("{out}");
            if positive { ExitCode::SUCCESS } else { ExitCode::from(1) }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error[input]: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("error[resource]: {msg}");
            ExitCode::from(3)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("error[usage]: {e}");
            return ExitCode::from(2);
        }
    };
    // Deeply nested terms recurse; give the worker a large stack.
    std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(move || dispatch(&cli))
        .expect("spawn worker thread")
        .join()
        .unwrap_or(ExitCode::from(101))
}
