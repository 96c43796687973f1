//! Small-step execution of monitors, verdict detection on finite traces,
//! and the reactivity and consistency checks.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::terms::{Action, Monitor, Node, TermId, TermStore, Verdict};
use crate::{Error, Result};

/// A transition label: an external action or the silent action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Tau,
    Act(Action),
}

/// Limits on silent-step exploration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Distinct terms the silent closure may add after a single action.
    pub max_tau_steps_per_action: usize,
    /// Largest admissible set of current terms.
    pub max_frontier_terms: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_tau_steps_per_action: 10_000, max_frontier_terms: 100_000 }
    }
}

impl Budget {
    pub fn new(max_tau_steps_per_action: usize, max_frontier_terms: usize) -> Result<Self> {
        if max_tau_steps_per_action == 0 || max_frontier_terms == 0 {
            return Err(Error::InvalidArgument("budget limits must be positive".into()));
        }
        Ok(Budget { max_tau_steps_per_action, max_frontier_terms })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OutcomeKind {
    Accepted,
    Rejected,
    Inconclusive,
    BudgetExceeded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub kind: OutcomeKind,
    /// Length of the shortest prefix on which the reported verdict was
    /// reached, or on which the budget ran out.
    pub witness_prefix_len: Option<usize>,
    /// Shortest accepted prefix, if one was found.
    pub accepted_at: Option<usize>,
    /// Shortest rejected prefix, if one was found.
    pub rejected_at: Option<usize>,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = self.witness_prefix_len.unwrap_or(0);
        match self.kind {
            OutcomeKind::Accepted => write!(f, "ACCEPTED at prefix {at}"),
            OutcomeKind::Rejected => write!(f, "REJECTED at prefix {at}"),
            OutcomeKind::Inconclusive => write!(f, "INCONCLUSIVE"),
            OutcomeKind::BudgetExceeded => write!(f, "BUDGET EXCEEDED at prefix {at}"),
        }
    }
}

/// Executes the transition relation of one monitor, creating derivative
/// terms on demand and caching single-step derivatives.
pub struct Engine {
    monitor: Monitor,
    store: TermStore,
    memo: HashMap<(TermId, Label), Vec<TermId>>,
}

struct Exceeded;

impl Engine {
    pub fn new(m: &Monitor) -> Result<Self> {
        m.require_closed()?;
        Ok(Engine { monitor: m.clone(), store: m.store().clone(), memo: HashMap::new() })
    }

    pub fn root(&self) -> TermId {
        self.monitor.root()
    }

    pub fn node(&self, id: TermId) -> Node {
        self.store.node(id)
    }

    /// A standalone monitor for a term created by this engine.
    pub fn to_monitor(&self, id: TermId) -> Monitor {
        let mut store = TermStore::new();
        let root = store.import(&self.store, id);
        Monitor::new(self.monitor.alphabet().clone(), store, root)
    }

    /// All `m'` with `id --label--> m'`, sorted by id.
    pub fn derivatives(&mut self, id: TermId, label: Label) -> Vec<TermId> {
        if let Some(d) = self.memo.get(&(id, label)) {
            return d.clone();
        }
        let mut out = match (self.store.node(id), label) {
            (Node::Verdict(_), Label::Act(_)) => vec![id],
            (Node::Verdict(_), Label::Tau) => vec![],
            (Node::Prefix(a, c), Label::Act(b)) if a == b => vec![c],
            (Node::Prefix(..), _) => vec![],
            (Node::Rec(_, body), Label::Tau) => vec![body],
            (Node::Var(v), Label::Tau) => self.store.binder(v).into_iter().collect(),
            (Node::Rec(..) | Node::Var(_), Label::Act(_)) => vec![],
            (Node::Choice(l, r), _) => {
                let mut d = self.derivatives(l, label);
                d.extend(self.derivatives(r, label));
                d
            }
            (n @ (Node::And(l, r) | Node::Or(l, r)), Label::Act(_)) => {
                let conj = matches!(n, Node::And(..));
                let dl = self.derivatives(l, label);
                let dr = self.derivatives(r, label);
                let mut d = Vec::with_capacity(dl.len() * dr.len());
                for &x in &dl {
                    for &y in &dr {
                        d.push(self.par(conj, x, y));
                    }
                }
                d
            }
            (n @ (Node::And(l, r) | Node::Or(l, r)), Label::Tau) => {
                let conj = matches!(n, Node::And(..));
                let mut d = Vec::new();
                for x in self.derivatives(l, Label::Tau) {
                    d.push(self.par(conj, x, r));
                }
                for y in self.derivatives(r, Label::Tau) {
                    d.push(self.par(conj, l, y));
                }
                d.extend(self.reduce(conj, l, r));
                d
            }
        };
        out.sort();
        out.dedup();
        self.memo.insert((id, label), out.clone());
        out
    }

    fn par(&mut self, conj: bool, l: TermId, r: TermId) -> TermId {
        self.store.mk(if conj { Node::And(l, r) } else { Node::Or(l, r) })
    }

    /// Verdict evaluation steps of a parallel composition (and their
    /// symmetric variants).
    fn reduce(&mut self, conj: bool, l: TermId, r: TermId) -> Vec<TermId> {
        let verdict = |id: TermId| match self.store.node(id) {
            Node::Verdict(v) => Some(v),
            _ => None,
        };
        let (vl, vr) = (verdict(l), verdict(r));
        let mut out = Vec::new();
        if vl == Some(Verdict::End) && vr == Some(Verdict::End) {
            out.push(l);
        }
        let (unit, absorb) = if conj { (Verdict::Yes, Verdict::No) } else { (Verdict::No, Verdict::Yes) };
        for (v, other, this) in [(vl, r, l), (vr, l, r)] {
            if v == Some(unit) {
                out.push(other);
            }
            if v == Some(absorb) {
                out.push(this);
            }
        }
        out
    }

    /// Silent closure of `start`; fails when more than `limit` new terms
    /// are discovered.
    fn closure(&mut self, start: Vec<TermId>, limit: usize) -> std::result::Result<Vec<TermId>, Exceeded> {
        let mut seen: std::collections::HashSet<TermId> = start.iter().copied().collect();
        let mut queue: VecDeque<TermId> = start.iter().copied().collect();
        let mut out = start;
        let mut added = 0usize;
        while let Some(id) = queue.pop_front() {
            for d in self.derivatives(id, Label::Tau) {
                if seen.insert(d) {
                    added += 1;
                    if added > limit {
                        return Err(Exceeded);
                    }
                    out.push(d);
                    queue.push_back(d);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Weak derivatives: `=>label=>` from each term in `from`, as a closed set.
    pub fn weak_step(&mut self, from: &[TermId], label: Label, b: &Budget) -> Option<Vec<TermId>> {
        let mut next = Vec::new();
        for &s in from {
            next.extend(self.derivatives(s, label));
        }
        next.sort();
        next.dedup();
        self.closure(next, b.max_tau_steps_per_action).ok()
    }

    fn has_verdict(&self, set: &[TermId], v: Verdict) -> bool {
        set.iter().any(|&id| self.store.node(id) == Node::Verdict(v))
    }

    /// Runs the monitor over the trace and reports the earliest verdict.
    pub fn run(&mut self, trace: &[Action], b: &Budget) -> Outcome {
        let mut accepted_at = None;
        let mut rejected_at = None;
        let mut exceeded_at = None;
        let mut frontier = match self.closure(vec![self.root()], b.max_tau_steps_per_action) {
            Ok(f) => Some(f),
            Err(Exceeded) => {
                exceeded_at = Some(0);
                None
            }
        };
        for i in 0..=trace.len() {
            let Some(cur) = frontier.as_ref() else { break };
            if cur.len() > b.max_frontier_terms {
                exceeded_at = Some(i);
                break;
            }
            if accepted_at.is_none() && self.has_verdict(cur, Verdict::Yes) {
                accepted_at = Some(i);
            }
            if rejected_at.is_none() && self.has_verdict(cur, Verdict::No) {
                rejected_at = Some(i);
            }
            if (accepted_at.is_some() && rejected_at.is_some()) || i == trace.len() {
                break;
            }
            let cur = frontier.take().unwrap();
            frontier = self.weak_step(&cur, Label::Act(trace[i]), b);
            if frontier.is_none() {
                exceeded_at = Some(i + 1);
            }
        }
        let (kind, witness) = match (accepted_at, rejected_at) {
            (Some(a), Some(r)) if r < a => (OutcomeKind::Rejected, Some(r)),
            (Some(a), _) => (OutcomeKind::Accepted, Some(a)),
            (None, Some(r)) => (OutcomeKind::Rejected, Some(r)),
            (None, None) => match exceeded_at {
                Some(e) => (OutcomeKind::BudgetExceeded, Some(e)),
                None => (OutcomeKind::Inconclusive, None),
            },
        };
        Outcome { kind, witness_prefix_len: witness, accepted_at, rejected_at }
    }
}

/// All `m'` with `m --label--> m'`, as standalone monitors.
pub fn derivatives(m: &Monitor, label: Label) -> Result<Vec<Monitor>> {
    let mut e = Engine::new(m)?;
    let ds = e.derivatives(m.root(), label);
    Ok(ds.into_iter().map(|d| e.to_monitor(d)).collect())
}

pub fn run_finite_trace(m: &Monitor, t: &[Action], b: &Budget) -> Result<Outcome> {
    Ok(Engine::new(m)?.run(t, b))
}

#[derive(Clone, Debug)]
pub enum Reactivity {
    Reactive,
    /// A reachable state that cannot weakly perform the action.
    NotReactive { state: Monitor, action: Action },
    /// The reachable state space did not close within the budget.
    UnknownAtBound,
}

#[derive(Clone, Debug)]
pub struct ReactivityReport {
    pub verdict: Reactivity,
    pub syntactically_reactive: bool,
}

/// Explores the reachable states breadth-first and checks that each can
/// weakly perform every action.
pub fn check_reactive(m: &Monitor, b: &Budget) -> Result<ReactivityReport> {
    let syntactically_reactive = crate::terms::validate(m).syntactically_reactive;
    let mut e = Engine::new(m)?;
    let actions: Vec<Action> = m.alphabet().actions().collect();
    let mut order = vec![m.root()];
    let mut index: HashMap<TermId, usize> = HashMap::from([(m.root(), 0)]);
    let mut tau_succ: Vec<Vec<usize>> = Vec::new();
    let mut strong: Vec<Vec<bool>> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let s = order[i];
        let mut row = Vec::with_capacity(actions.len());
        let mut succs = Vec::new();
        for &a in &actions {
            let ds = e.derivatives(s, Label::Act(a));
            row.push(!ds.is_empty());
            succs.extend(ds.into_iter().map(|d| (d, false)));
        }
        succs.extend(e.derivatives(s, Label::Tau).into_iter().map(|d| (d, true)));
        let mut taus = Vec::new();
        for (d, tau) in succs {
            let j = *index.entry(d).or_insert_with(|| {
                order.push(d);
                order.len() - 1
            });
            if tau {
                taus.push(j);
            }
        }
        if order.len() > b.max_frontier_terms {
            return Ok(ReactivityReport { verdict: Reactivity::UnknownAtBound, syntactically_reactive });
        }
        strong.push(row);
        tau_succ.push(taus);
        i += 1;
    }
    let mut weak = strong;
    let mut changed = true;
    while changed {
        changed = false;
        for s in 0..order.len() {
            for &t in &tau_succ[s] {
                for a in 0..actions.len() {
                    if weak[t][a] && !weak[s][a] {
                        weak[s][a] = true;
                        changed = true;
                    }
                }
            }
        }
    }
    for (s, row) in weak.iter().enumerate() {
        if let Some(a) = row.iter().position(|&c| !c) {
            return Ok(ReactivityReport {
                verdict: Reactivity::NotReactive { state: e.to_monitor(order[s]), action: actions[a] },
                syntactically_reactive,
            });
        }
    }
    Ok(ReactivityReport { verdict: Reactivity::Reactive, syntactically_reactive })
}

/// True when no finite trace is both accepted and rejected.
pub fn check_consistent(m: &Monitor) -> Result<bool> {
    crate::automata::consistent(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{parse_monitor, Alphabet};

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn m(s: &str) -> Monitor {
        parse_monitor(s, &ab()).unwrap()
    }

    fn act(s: &str) -> Label {
        Label::Act(ab().action(s).unwrap())
    }

    fn texts(ms: Vec<Monitor>) -> Vec<String> {
        let mut v: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn single_step_rules() {
        assert_eq!(texts(derivatives(&m("a.yes + b.no"), act("a")).unwrap()), ["yes"]);
        assert_eq!(texts(derivatives(&m("yes"), act("a")).unwrap()), ["yes"]);
        assert!(derivatives(&m("yes"), Label::Tau).unwrap().is_empty());
        let d = texts(derivatives(&m("yes & a.no"), Label::Tau).unwrap());
        assert!(d.contains(&"a.no".to_string()));
        let d = texts(derivatives(&m("no & a.yes"), Label::Tau).unwrap());
        assert!(d.contains(&"no".to_string()));
        let d = texts(derivatives(&m("a.yes & no"), Label::Tau).unwrap());
        assert_eq!(d, ["no"]);
        assert_eq!(texts(derivatives(&m("no | a.yes"), Label::Tau).unwrap()), ["a.yes"]);
        assert_eq!(texts(derivatives(&m("yes | a.no"), Label::Tau).unwrap()), ["yes"]);
        assert_eq!(texts(derivatives(&m("end & end"), Label::Tau).unwrap()), ["end"]);
        assert_eq!(
            texts(derivatives(&m("rec x.(a.x + b.yes)"), Label::Tau).unwrap()),
            ["a.rec x.(a.x + b.yes) + b.yes"]
        );
        assert_eq!(
            texts(derivatives(&m("a.yes & (a.no + b.yes)"), act("a")).unwrap()),
            ["yes & no"]
        );
    }

    #[test]
    fn open_terms_are_refused() {
        assert!(matches!(derivatives(&m("x"), Label::Tau), Err(Error::OpenTerm(_))));
    }

    #[test]
    fn runs_report_earliest_verdict() {
        let t = ab().parse_trace("b").unwrap();
        let o = run_finite_trace(&m("a.yes + b.no"), &t, &Budget::default()).unwrap();
        assert_eq!(o.to_string(), "REJECTED at prefix 1");
        let t = ab().parse_trace("ab").unwrap();
        let o = run_finite_trace(&m("a.yes & b.no"), &t, &Budget::default()).unwrap();
        assert_eq!(o.kind, OutcomeKind::Inconclusive);
        let o = run_finite_trace(&m("yes + a.no"), &[], &Budget::default()).unwrap();
        assert_eq!(o.kind, OutcomeKind::Inconclusive);
        let o = run_finite_trace(&m("rec x.yes"), &[], &Budget::default()).unwrap();
        assert_eq!(o.witness_prefix_len, Some(0));
    }

    #[test]
    fn unbounded_silent_growth_exhausts_budget() {
        let mt = m("rec x.(x & (a.yes + b.yes))");
        let t = ab().parse_trace("a").unwrap();
        let o = run_finite_trace(&mt, &t, &Budget::new(200, 1000).unwrap()).unwrap();
        assert_eq!(o.kind, OutcomeKind::BudgetExceeded);
    }

    #[test]
    fn reactivity() {
        let b = Budget::new(1000, 2000).unwrap();
        let r = check_reactive(&m("a.yes + b.no"), &b).unwrap();
        assert!(matches!(r.verdict, Reactivity::Reactive));
        let r = check_reactive(&m("a.yes & b.no"), &b).unwrap();
        match r.verdict {
            Reactivity::NotReactive { state, action } => {
                assert_eq!(state.to_string(), "a.yes & b.no");
                assert_eq!(ab().name(action), "a");
            }
            v => panic!("unexpected {v:?}"),
        }
        let r = check_reactive(&m("rec x.(x & (a.yes + b.yes))"), &b).unwrap();
        assert!(matches!(r.verdict, Reactivity::UnknownAtBound));
    }
}
