//! Pipeline transformations between parallel, regular and deterministic
//! monitors, and the verdict and ω-verdict equivalence checks.

use std::collections::HashMap;

use serde::Serialize;

use crate::automata::{
    dfa_language_equal, dfa_to_monitor, intersection_witness, monitor_dfa, monitor_nfa, nfa_to_dfa,
    nfa_to_monitor, unfold, Comparison, Graph, Kind, LanguageStats, Limits, Nfa, Polarity,
};
use crate::terms::{validate, Action, Alphabet, Monitor, Node, TermId, TermStore, VarId, Verdict};
use crate::{Error, Result};

/// Sizes observed along one transformation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PipelineStats {
    pub input_size: u128,
    pub accept: LanguageStats,
    pub reject: LanguageStats,
    pub output_size: u128,
}

#[derive(Clone, Debug)]
pub struct Transformed {
    pub monitor: Monitor,
    pub stats: PipelineStats,
}

/// Refuses parallel monitors that fail the syntactic reactivity check, on
/// which the automaton construction is not guaranteed exact.
pub fn check_strict(m: &Monitor) -> Result<()> {
    m.require_closed()?;
    if m.is_regular() || validate(m).syntactically_reactive {
        Ok(())
    } else {
        Err(Error::NotReactive(
            "parallel monitor is not syntactically reactive; pad its sums with `end`".into(),
        ))
    }
}

/// Appends `+ end` to every sum of prefixes that does not already cover
/// every action or contain a verdict.
pub fn pad(m: &Monitor) -> Monitor {
    let src = m.store();
    let n_act = m.alphabet().len();
    let reach = m.reachable();
    let mut needs_pad = vec![false; src.len()];
    for &id in &reach {
        if !matches!(src.node(id), Node::Prefix(..) | Node::Choice(..)) {
            continue;
        }
        let mut acts = vec![false; n_act];
        let mut has_other = false;
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            match src.node(x) {
                Node::Choice(l, r) => stack.extend([l, r]),
                Node::Prefix(a, _) => acts[a.index()] = true,
                _ => has_other = true,
            }
        }
        needs_pad[id.index()] = !has_other && acts.iter().any(|c| !c);
    }
    // `plain` translates a node as a summand; `whole` as a complete sum.
    let mut store = TermStore::new();
    let mut plain: HashMap<TermId, TermId> = HashMap::new();
    let mut vmap: HashMap<VarId, VarId> = HashMap::new();
    let whole = |store: &mut TermStore, plain: &HashMap<TermId, TermId>, id: TermId| {
        let t = plain[&id];
        if needs_pad[id.index()] {
            let e = store.end();
            store.choice(t, e)
        } else {
            t
        }
    };
    for &id in &reach {
        let t = match src.node(id) {
            Node::Verdict(v) => store.verdict(v),
            Node::Prefix(a, c) => {
                let c = whole(&mut store, &plain, c);
                store.prefix(a, c)
            }
            Node::Choice(l, r) => store.choice(plain[&l], plain[&r]),
            Node::And(l, r) => {
                let (l, r) = (whole(&mut store, &plain, l), whole(&mut store, &plain, r));
                store.and(l, r)
            }
            Node::Or(l, r) => {
                let (l, r) = (whole(&mut store, &plain, l), whole(&mut store, &plain, r));
                store.or(l, r)
            }
            Node::Var(v) => {
                let nv = *vmap.entry(v).or_insert_with(|| store.fresh_var(&src.var_info(v).name));
                store.var(nv)
            }
            Node::Rec(v, b) => {
                let nv = *vmap.entry(v).or_insert_with(|| store.fresh_var(&src.var_info(v).name));
                let b = whole(&mut store, &plain, b);
                store.bind(nv, b)
            }
        };
        plain.insert(id, t);
    }
    let root = whole(&mut store, &plain, m.root());
    let mut out = TermStore::new();
    let root = out.import(&store, root);
    Monitor::new(m.alphabet().clone(), out, root)
}

/// Sum of two monitors in a fresh store. A bare verdict operand is wrapped
/// as `rec x.v` so that it keeps its immediate verdict inside the sum.
fn join(alphabet: &Alphabet, parts: &[&Monitor]) -> Monitor {
    let mut store = TermStore::new();
    let live: Vec<&&Monitor> = parts
        .iter()
        .filter(|m| m.node(m.root()) != Node::Verdict(Verdict::End))
        .collect();
    let mut roots = Vec::new();
    for m in &live {
        let mut t = store.import(m.store(), m.root());
        if live.len() > 1 && matches!(store.node(t), Node::Verdict(_)) {
            let v = store.fresh_var("x");
            t = store.bind(v, t);
        }
        roots.push(t);
    }
    let root = match store.sum(roots) {
        Some(r) => r,
        None => store.end(),
    };
    Monitor::new(alphabet.clone(), store, root)
}

/// Regular monitor with the same accepted and rejected traces.
pub fn parallel_to_regular(m: &Monitor, limits: &Limits) -> Result<Transformed> {
    m.require_closed()?;
    let (na, sa) = monitor_nfa(m, Polarity::Accept, limits)?;
    let (nr, sr) = monitor_nfa(m, Polarity::Reject, limits)?;
    let ma = nfa_to_monitor(&na, Verdict::Yes, limits)?;
    let mr = nfa_to_monitor(&nr, Verdict::No, limits)?;
    let out = join(m.alphabet(), &[&ma, &mr]);
    Ok(Transformed {
        stats: PipelineStats { input_size: m.size(), accept: sa, reject: sr, output_size: out.size() },
        monitor: out,
    })
}

fn require_consistent(na: &Nfa, nr: &Nfa) -> Result<()> {
    match intersection_witness(na, nr) {
        None => Ok(()),
        Some(t) => Err(Error::Inconsistent(format!(
            "trace {} is both accepted and rejected",
            na.alphabet.format_trace(&t)
        ))),
    }
}

/// Deterministic monitor equivalent to a consistent regular monitor, read
/// off the product of its acceptance and rejection DFAs.
pub fn determinize_regular(m: &Monitor, limits: &Limits) -> Result<Transformed> {
    m.require_closed()?;
    if !m.is_regular() {
        return Err(Error::NotRegular);
    }
    let (na, _) = monitor_nfa(m, Polarity::Accept, limits)?;
    let (nr, _) = monitor_nfa(m, Polarity::Reject, limits)?;
    require_consistent(&na, &nr)?;
    let (da, sa) = monitor_dfa(m, Polarity::Accept, limits)?;
    let (dr, sr) = monitor_dfa(m, Polarity::Reject, limits)?;
    let k = m.alphabet().len();
    let mut index: HashMap<(u32, u32), u32> = HashMap::from([((da.initial, dr.initial), 0)]);
    let mut pairs = vec![(da.initial, dr.initial)];
    let mut kind = Vec::new();
    let mut succ = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (p, q) = pairs[i];
        let k_here = if da.accepting[p as usize] {
            Kind::Final(Verdict::Yes)
        } else if dr.accepting[q as usize] {
            Kind::Final(Verdict::No)
        } else {
            Kind::Open
        };
        let mut row = Vec::new();
        if k_here == Kind::Open {
            for a in 0..k {
                let next = (da.trans[p as usize][a], dr.trans[q as usize][a]);
                let j = *index.entry(next).or_insert_with(|| {
                    pairs.push(next);
                    (pairs.len() - 1) as u32
                });
                if pairs.len() > limits.max_states {
                    return Err(Error::ResourceLimit(format!("product: more than {} states", limits.max_states)));
                }
                row.push((Action(a as u32), j));
            }
        }
        kind.push(k_here);
        succ.push(row);
        i += 1;
    }
    let g = Graph { kind, succ }.prune();
    let out = unfold(m.alphabet(), &g, &[0], limits)?;
    Ok(Transformed {
        stats: PipelineStats { input_size: m.size(), accept: sa, reject: sr, output_size: out.size() },
        monitor: out,
    })
}

fn marker_names(base: &Alphabet) -> (String, String) {
    let pick = |candidates: &[&str]| -> String {
        for c in candidates {
            if base.lookup(c).is_none() {
                return c.to_string();
            }
        }
        (0..)
            .map(|i| format!("{}{i}", candidates.last().unwrap()))
            .find(|c| base.lookup(c).is_none())
            .unwrap()
    };
    (pick(&["✓", "mark_accept"]), pick(&["✗", "mark_reject"]))
}

/// Deterministic monitor equivalent to a consistent (parallel) monitor.
///
/// The acceptance and rejection automata are joined into one automaton over
/// the alphabet extended with two fresh markers: accepting states of the
/// first step to a common final state on the accept marker, those of the
/// second on the reject marker. Its determinization yields a deterministic
/// acceptance monitor in which every sum offering the accept (reject) marker
/// is then replaced by `yes` (`no`).
pub fn parallel_to_deterministic(m: &Monitor, limits: &Limits) -> Result<Transformed> {
    m.require_closed()?;
    let (na, sa) = monitor_nfa(m, Polarity::Accept, limits)?;
    let (nr, sr) = monitor_nfa(m, Polarity::Reject, limits)?;
    require_consistent(&na, &nr)?;
    let base = m.alphabet();
    let (acc_name, rej_name) = marker_names(base);
    let ext = base.extended(&[&acc_name, &rej_name])?;
    let acc_mark = ext.action(&acc_name)?;
    let rej_mark = ext.action(&rej_name)?;
    let k = base.len();
    let off = na.len() as u32;
    let f = (na.len() + nr.len()) as u32;
    let mut trans: Vec<Vec<Vec<u32>>> = Vec::new();
    for (nfa, shift, mark) in [(&na, 0u32, acc_mark), (&nr, off, rej_mark)] {
        for q in 0..nfa.len() {
            let mut row: Vec<Vec<u32>> =
                (0..k).map(|a| nfa.trans[q][a].iter().map(|p| p + shift).collect()).collect();
            row.push(vec![]);
            row.push(vec![]);
            if nfa.accepting[q] {
                row[mark.index()] = vec![f];
            }
            trans.push(row);
        }
    }
    trans.push(vec![vec![f]; k + 2]);
    let mut initial: Vec<u32> = na.initial.clone();
    initial.extend(nr.initial.iter().map(|q| q + off));
    let mut accepting = vec![false; f as usize];
    accepting.push(true);
    let joined = Nfa { alphabet: ext.clone(), initial, trans, accepting }.trim();
    let dfa = nfa_to_dfa(&joined, limits)?.extension_close();
    let marked = dfa_to_monitor(&dfa, Verdict::Yes, limits)?;
    let out = replace_marker_sums(&marked, base, acc_mark, rej_mark)?;
    let stats = PipelineStats {
        input_size: m.size(),
        accept: LanguageStats { dfa_states: dfa.len(), ..sa },
        reject: LanguageStats { dfa_states: dfa.len(), ..sr },
        output_size: out.size(),
    };
    Ok(Transformed { monitor: out, stats })
}

fn summands(store: &TermStore, id: TermId, out: &mut Vec<TermId>) {
    match store.node(id) {
        Node::Choice(l, r) => {
            summands(store, l, out);
            summands(store, r, out);
        }
        _ => out.push(id),
    }
}

/// Replaces maximal sums offering a marker by the corresponding verdict,
/// collapses `rec x.v` to `v`, and drops the markers from the alphabet.
fn replace_marker_sums(m: &Monitor, base: &Alphabet, acc: Action, rej: Action) -> Result<Monitor> {
    struct Ctx<'a> {
        src: &'a TermStore,
        dst: TermStore,
        memo: HashMap<TermId, TermId>,
        vmap: HashMap<VarId, VarId>,
        acc: Action,
        rej: Action,
    }
    fn go(cx: &mut Ctx<'_>, id: TermId) -> Result<TermId> {
        if let Some(&t) = cx.memo.get(&id) {
            return Ok(t);
        }
        let t = match cx.src.node(id) {
            Node::Verdict(v) => cx.dst.verdict(v),
            Node::Var(v) => {
                let nv = *cx.vmap.get(&v).expect("variable visited under its binder");
                cx.dst.var(nv)
            }
            Node::Rec(v, b) => {
                let nv = cx.dst.fresh_var(&cx.src.var_info(v).name);
                cx.vmap.insert(v, nv);
                let body = go(cx, b)?;
                match cx.dst.node(body) {
                    Node::Verdict(_) => body,
                    _ => cx.dst.bind(nv, body),
                }
            }
            Node::Prefix(..) | Node::Choice(..) => {
                let mut parts = Vec::new();
                summands(cx.src, id, &mut parts);
                let mut has_acc = false;
                let mut has_rej = false;
                let mut kept = Vec::new();
                for p in parts {
                    match cx.src.node(p) {
                        Node::Prefix(a, _) if a == cx.acc => has_acc = true,
                        Node::Prefix(a, _) if a == cx.rej => has_rej = true,
                        Node::Prefix(a, c) => kept.push((a, c)),
                        n => unreachable!("deterministic monitor has a non-prefix summand {n:?}"),
                    }
                }
                match (has_acc, has_rej) {
                    (true, true) => return Err(Error::Inconsistent("a trace reaches both markers".into())),
                    (true, false) => cx.dst.yes(),
                    (false, true) => cx.dst.no(),
                    (false, false) => {
                        let mut out = Vec::new();
                        for (a, c) in kept {
                            let c2 = go(cx, c)?;
                            out.push(cx.dst.prefix(a, c2));
                        }
                        match cx.dst.sum(out) {
                            Some(s) => s,
                            None => cx.dst.end(),
                        }
                    }
                }
            }
            n => unreachable!("regular monitor has a parallel node {n:?}"),
        };
        cx.memo.insert(id, t);
        Ok(t)
    }
    let mut cx = Ctx { src: m.store(), dst: TermStore::new(), memo: HashMap::new(), vmap: HashMap::new(), acc, rej };
    let root = go(&mut cx, m.root())?;
    let mut out = TermStore::new();
    let r = out.import(&cx.dst, root);
    let result = Monitor::new(base.clone(), out, r);
    for id in result.reachable() {
        if let Node::Prefix(a, _) = result.node(id) {
            assert!(a.index() < base.len(), "marker action left in output");
        }
    }
    Ok(result)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EquivalenceMode {
    Verdict,
    Omega,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    /// A finite trace on which exactly one monitor reaches the verdict.
    Trace { polarity: Polarity, trace: Vec<Action> },
    /// An infinite trace `u·v^ω` on which exactly one monitor eventually
    /// reaches the verdict.
    Lasso { polarity: Polarity, u: Vec<Action>, v: Vec<Action> },
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        *self == Equivalence::Equivalent
    }
}

pub fn check_equivalence(m1: &Monitor, m2: &Monitor, mode: EquivalenceMode, limits: &Limits) -> Result<Equivalence> {
    m1.alphabet().check_same(m2.alphabet())?;
    for polarity in [Polarity::Accept, Polarity::Reject] {
        let (d1, _) = monitor_dfa(m1, polarity, limits)?;
        let (d2, _) = monitor_dfa(m2, polarity, limits)?;
        match mode {
            EquivalenceMode::Verdict => {
                if let Comparison::Counterexample(trace) = dfa_language_equal(&d1, &d2)? {
                    return Ok(Equivalence::Trace { polarity, trace });
                }
            }
            EquivalenceMode::Omega => {
                let (s1, s2) = (d1.omega_saturate(), d2.omega_saturate());
                if let Comparison::Counterexample(u) = dfa_language_equal(&s1, &s2)? {
                    let weaker = if s1.accepts(&u) { &d2 } else { &d1 };
                    let (u, v) = weaker.avoiding_cycle(&u).expect("saturation counterexample has an avoiding run");
                    return Ok(Equivalence::Lasso { polarity, u, v });
                }
            }
        }
    }
    Ok(Equivalence::Equivalent)
}
