//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails.

use std::io::Write;
use std::time::Instant;

use monitors::automata::{afa_accepts, consistent, monitor_dfa, monitor_to_afa, Limits, Polarity};
use monitors::corpus::{all_lassos, all_traces, monitor_corpus, random_formula, rng};
use monitors::gapbench::{
    blowup_report, build_gap_monitor, build_tk, gap_alphabet, in_w, oracle_membership, random_suite, targeted_suite,
    Family, GapParams, TkParams,
};
use monitors::logic::{eval_formula_lasso, parse_formula, synthesize_with, translate_max_to_safety, Fragment};
use monitors::semantics::{Budget, Engine, OutcomeKind};
use monitors::terms::validate;
use monitors::transform::{
    check_equivalence, determinize_regular, parallel_to_deterministic, parallel_to_regular, EquivalenceMode,
};
use monitors::{Alphabet, Monitor};
use rand::seq::IndexedRandom;
use rand::Rng;

const CORPUS_SEED: u64 = 20_240_501;
const CORPUS_SIZE: usize = 500;
const TRACE_LEN: usize = 6;
const GAP_SEED: u64 = 7;
const GAP_RANDOM_TRACES: usize = 10_000;
const GAP_RANDOM_LEN: usize = 20;
const GAP_MIN_TARGETED: usize = 200;
/// Upper bound on l(m_A^k)/k² for l in 1..=3.
const GAP_SIZE_RATIO_BOUND: f64 = 250.0;
const FORMULA_SEED: u64 = 11;
const FORMULAS_PER_FRAGMENT: usize = 300;
const FORMULA_DEPTH: u32 = 5;
const LASSO_BOUND: usize = 3;
const TRANSLATIONS: usize = 100;
const TK_SEED: u64 = 3;
const TK_PAIRS: usize = 20;
const TK_MAX_LEN: usize = 10_000;

type Check = Result<String, String>;

fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).unwrap()
}

fn m(s: &str) -> Monitor {
    Monitor::parse(s, &ab()).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn semantics_vs_afa(corpus: &[Monitor]) -> Check {
    let traces = all_traces(&ab(), TRACE_LEN);
    let budget = Budget::default();
    let mut checks = 0usize;
    for mon in corpus {
        let acc = monitor_to_afa(mon, Polarity::Accept).map_err(|e| format!("{mon}: {e}"))?;
        let rej = monitor_to_afa(mon, Polarity::Reject).map_err(|e| format!("{mon}: {e}"))?;
        let mut engine = Engine::new(mon).map_err(|e| e.to_string())?;
        for t in &traces {
            let o = engine.run(t, &budget);
            ensure(o.kind != OutcomeKind::BudgetExceeded, || format!("{mon}: budget exceeded"))?;
            // A verdict reached on a prefix persists, so the run and the
            // automata are compared on the whole trace.
            ensure(o.accepted_at.is_some() == afa_accepts(&acc, t), || {
                format!("{mon} accept mismatch on {}", ab().format_trace(t))
            })?;
            ensure(o.rejected_at.is_some() == afa_accepts(&rej, t), || {
                format!("{mon} reject mismatch on {}", ab().format_trace(t))
            })?;
            checks += 2;
        }
    }
    Ok(format!("{} monitors, {} traces, {checks} comparisons", corpus.len(), traces.len()))
}

fn worked_examples() -> Check {
    let l = Limits::default();
    let det = determinize_regular(&m("a.b.yes + a.a.no"), &l).map_err(|e| e.to_string())?.monitor;
    let same = check_equivalence(&det, &m("a.(b.yes + a.no)"), EquivalenceMode::Verdict, &l).map_err(|e| e.to_string())?;
    ensure(same.holds() && validate(&det).deterministic, || format!("(a) got {det}"))?;

    let (no, sum) = (m("no"), m("a.no + b.no"));
    let omega = check_equivalence(&no, &sum, EquivalenceMode::Omega, &l).map_err(|e| e.to_string())?;
    let verdict = check_equivalence(&no, &sum, EquivalenceMode::Verdict, &l).map_err(|e| e.to_string())?;
    ensure(omega.holds() && !verdict.holds(), || "(b) equivalence modes".into())?;

    let mt = m("rec x.(x & (a.yes + b.yes))");
    let mut e = Engine::new(&mt).map_err(|e| e.to_string())?;
    let o = e.run(&ab().parse_trace("a").unwrap(), &Budget::default());
    ensure(o.kind == OutcomeKind::BudgetExceeded, || format!("(c) got {o}"))?;

    let par = m("a.yes & b.no");
    let mut e = Engine::new(&par).map_err(|e| e.to_string())?;
    for t in all_traces(&ab(), TRACE_LEN) {
        let o = e.run(&t, &Budget::default());
        ensure(o.kind == OutcomeKind::Inconclusive, || format!("(d) {o} on {}", ab().format_trace(&t)))?;
    }
    Ok("(a) (b) (c) (d) exact".into())
}

fn equivalent(x: &Monitor, y: &Monitor, l: &Limits) -> Result<bool, String> {
    check_equivalence(x, y, EquivalenceMode::Verdict, l)
        .map(|e| e.holds())
        .map_err(|e| format!("{x} vs {y}: {e}"))
}

/// Checks the pipeline on one monitor; returns whether it was consistent.
fn pipeline_on(mon: &Monitor, l: &Limits) -> Result<bool, String> {
    let reg = parallel_to_regular(mon, l).map_err(|e| format!("{mon}: {e}"))?.monitor;
    ensure(reg.is_regular(), || format!("{mon}: output {reg} is not regular"))?;
    ensure(equivalent(mon, &reg, l)?, || format!("{mon}: regular output {reg} differs"))?;
    if !consistent(mon).map_err(|e| e.to_string())? {
        return Ok(false);
    }
    let det = parallel_to_deterministic(mon, l).map_err(|e| format!("{mon}: {e}"))?.monitor;
    ensure(validate(&det).deterministic, || format!("{mon}: {det} is not deterministic"))?;
    ensure(equivalent(mon, &det, l)?, || format!("{mon}: deterministic output {det} differs"))?;
    let det2 = determinize_regular(&reg, l).map_err(|e| format!("{reg}: {e}"))?.monitor;
    ensure(equivalent(&det, &det2, l)?, || format!("{mon}: the two deterministic routes differ"))?;
    Ok(true)
}

fn pipeline(corpus: &[Monitor]) -> Check {
    let l = Limits::default();
    let mut consistent_count = 0;
    for mon in corpus {
        if pipeline_on(mon, &l)? {
            consistent_count += 1;
        }
    }
    Ok(format!("{} monitors, {consistent_count} consistent", corpus.len()))
}

fn gap_agreement() -> Check {
    let p = GapParams::new(1).unwrap();
    let ab = gap_alphabet();
    let mut r = rng(GAP_SEED);
    let mut report = Vec::new();
    for family in [Family::A, Family::U] {
        let afa = monitor_to_afa(&build_gap_monitor(family, p), Polarity::Accept).map_err(|e| e.to_string())?;
        let targeted = targeted_suite(family, p);
        ensure(targeted.len() >= GAP_MIN_TARGETED, || format!("{family:?}: only {} targeted cases", targeted.len()))?;
        let random = random_suite(&mut r, p, GAP_RANDOM_TRACES, GAP_RANDOM_LEN);
        let mut members = 0;
        for t in targeted.iter().chain(&random) {
            let expected = oracle_membership(family, p, t).map_err(|e| e.to_string())?;
            let got = afa_accepts(&afa, &ab.parse_trace(t).unwrap());
            ensure(got == expected, || format!("{family:?} on {t}: monitor {got}, oracle {expected}"))?;
            members += expected as usize;
        }
        report.push(format!("{family:?}: {} targeted + {} random, {members} members", targeted.len(), random.len()));
    }
    let mut ratios = Vec::new();
    for l in 1..=3 {
        let p = GapParams::new(l).unwrap();
        let size = build_gap_monitor(Family::A, p).size() as f64;
        ratios.push(size / (p.k() * p.k()) as f64);
    }
    ensure(ratios.iter().all(|r| *r <= GAP_SIZE_RATIO_BOUND), || format!("size ratios {ratios:?}"))?;
    report.push(format!("l(m_A)/k² = {}", ratios.iter().map(|r| format!("{r:.1}")).collect::<Vec<_>>().join(", ")));
    Ok(report.join("; "))
}

fn synthesis() -> Check {
    let ab = ab();
    let lassos = all_lassos(&ab, LASSO_BOUND, LASSO_BOUND);
    let mut r = rng(FORMULA_SEED);
    let l = Limits::default();
    for fragment in Fragment::ALL {
        let polarity = match fragment {
            Fragment::Shml | Fragment::MaxHml => Polarity::Reject,
            Fragment::Chml | Fragment::MinHml => Polarity::Accept,
        };
        for _ in 0..FORMULAS_PER_FRAGMENT {
            let phi = random_formula(&mut r, &ab, fragment, FORMULA_DEPTH);
            let text = phi.to_text(&ab);
            let mon = synthesize_with(&phi, &ab, polarity).map_err(|e| format!("{text}: {e}"))?;
            let (dfa, _) = monitor_dfa(&mon, polarity, &l).map_err(|e| format!("{text}: {e}"))?;
            for lasso in &lassos {
                let holds = eval_formula_lasso(&phi, lasso);
                let member = dfa.lasso_member(&lasso.u, &lasso.v).map_err(|e| e.to_string())?;
                let expected = match polarity {
                    Polarity::Reject => !holds,
                    Polarity::Accept => holds,
                };
                ensure(member == expected, || {
                    format!("{text} via {mon} on {}·({})^ω", ab.format_trace(&lasso.u), ab.format_trace(&lasso.v))
                })?;
            }
        }
    }
    Ok(format!("{} formulas per fragment, {} lassos each", FORMULAS_PER_FRAGMENT, lassos.len()))
}

fn translation() -> Check {
    let ab = ab();
    let lassos = all_lassos(&ab, LASSO_BOUND, LASSO_BOUND);
    let l = Limits::default();
    let mut r = rng(FORMULA_SEED + 1);
    let mut inputs = vec![parse_formula("<a>tt", &ab).unwrap()];
    inputs.extend((0..TRANSLATIONS).map(|_| random_formula(&mut r, &ab, Fragment::MaxHml, FORMULA_DEPTH)));
    for phi in &inputs {
        let text = phi.to_text(&ab);
        let psi = translate_max_to_safety(phi, &ab, &l).map_err(|e| format!("{text}: {e}"))?;
        ensure(psi.in_fragment(Fragment::Shml), || format!("{text} gave {}", psi.to_text(&ab)))?;
        for lasso in &lassos {
            ensure(eval_formula_lasso(phi, lasso) == eval_formula_lasso(&psi, lasso), || {
                format!("{text} vs {} on {}·({})^ω", psi.to_text(&ab), ab.format_trace(&lasso.u), ab.format_trace(&lasso.v))
            })?;
        }
    }
    let diamond = translate_max_to_safety(&inputs[0], &ab, &l).map_err(|e| e.to_string())?;
    let boxed = parse_formula("[b]ff", &ab).unwrap();
    ensure(lassos.iter().all(|x| eval_formula_lasso(&diamond, x) == eval_formula_lasso(&boxed, x)), || {
        format!("<a>tt gave {}", diamond.to_text(&ab))
    })?;
    Ok(format!("{} formulas; <a>tt ↦ {}", inputs.len(), diamond.to_text(&ab)))
}

fn blowup() -> Check {
    let l = Limits::default();
    let mut sizes = Vec::new();
    for gl in 1..=2 {
        let p = GapParams::new(gl).unwrap();
        let row = blowup_report(Family::U, p, &l).map_err(|e| e.to_string())?;
        let reg = row.regular_size.ok_or_else(|| format!("l={gl}: {}", row.note.clone().unwrap_or_default()))?;
        ensure(reg > row.parallel_size, || format!("l={gl}: regular {reg} ≤ parallel {}", row.parallel_size))?;
        let mu = build_gap_monitor(Family::U, p);
        pipeline_on(&mu, &l)?;
        sizes.push((row.parallel_size, reg));
    }
    ensure(sizes[1].1 > sizes[0].1, || format!("regular sizes {sizes:?} not increasing"))?;
    Ok(sizes
        .iter()
        .enumerate()
        .map(|(i, (p, r))| format!("l={}: parallel {p}, regular {r}", i + 1))
        .collect::<Vec<_>>()
        .join("; "))
}

fn tk_probe() -> Check {
    let p = GapParams::new(1).unwrap();
    let ab = gap_alphabet();
    let mut r = rng(TK_SEED);
    let params = TkParams::random(p, &mut r).map_err(|e| e.to_string())?;
    let tk = build_tk(&params, TK_MAX_LEN).map_err(|e| e.to_string())?;
    for block in tk.split(['#', '$']).filter(|b| !b.is_empty()) {
        ensure(in_w(p, block), || format!("block {block} not in W"))?;
    }
    let (dfa, _) = monitor_dfa(&build_gap_monitor(Family::A, p), Polarity::Accept, &Limits::default())
        .map_err(|e| e.to_string())?;
    let trace = ab.parse_trace(&tk).unwrap();
    let prefixes: Vec<usize> = (0..=trace.len()).collect();
    for _ in 0..TK_PAIRS {
        let (i, j) = loop {
            let i = *prefixes.choose(&mut r).unwrap();
            let j = r.random_range(0..=trace.len());
            if i != j {
                break (i, j);
            }
        };
        let (f, g) = (&trace[..i], &trace[..j]);
        let h = dfa
            .distinguishing_suffix(f, g)
            .ok_or_else(|| format!("no suffix separates prefixes of length {i} and {j}"))?;
        let fh = ab.format_trace(&[f, &h[..]].concat()).replace('ε', "");
        let gh = ab.format_trace(&[g, &h[..]].concat()).replace('ε', "");
        let split = oracle_membership(Family::A, p, &fh).unwrap() != oracle_membership(Family::A, p, &gh).unwrap();
        ensure(split, || format!("suffix {} does not separate {i} and {j} by the oracle", ab.format_trace(&h)))?;
    }
    Ok(format!("|t_K| = {}, {} $ symbols, {TK_PAIRS} pairs separated", tk.len(), tk.matches('$').count()))
}

#[test]
fn acceptance() {
    let corpus = monitor_corpus(&ab(), CORPUS_SIZE, CORPUS_SEED);
    let criteria: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("semantics/AFA cross-validation", Box::new(|| semantics_vs_afa(&corpus))),
        ("worked example fidelity", Box::new(worked_examples)),
        ("pipeline correctness", Box::new(|| pipeline(&corpus))),
        ("gap-family agreement", Box::new(gap_agreement)),
        ("synthesis soundness", Box::new(synthesis)),
        ("translation soundness", Box::new(translation)),
        ("blowup observation", Box::new(blowup)),
        ("t_K probe", Box::new(tk_probe)),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        let line = match result {
            Ok(detail) => format!("criterion {} PASS {name}: {detail} ({secs:.1}s)\n", i + 1),
            Err(why) => {
                failed.push(i + 1);
                format!("criterion {} FAIL {name}: {why} ({secs:.1}s)\n", i + 1)
            }
        };
        // Written to the handle directly so the report survives output capture.
        let mut out = std::io::stdout().lock();
        out.write_all(line.as_bytes()).unwrap();
        out.flush().unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
