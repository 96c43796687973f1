//! Alternating, nondeterministic and deterministic finite automata over a
//! monitor alphabet, the monitor-to-automaton construction, and the
//! conversions back to monitors.

mod afa;
mod dfa;
pub mod dot;
mod graph;
mod nfa;
mod posbool;
mod unfold;

pub use afa::{afa_accepts, monitor_to_afa, Afa};
pub use dfa::{dfa_language_equal, nfa_to_dfa, Comparison, Dfa};
pub use nfa::{afa_to_nfa, Nfa};
pub use posbool::PosBool;
pub use unfold::{dfa_to_monitor, nfa_to_monitor};
pub(crate) use unfold::{unfold, Graph, Kind};

use serde::Serialize;

use crate::terms::{Monitor, Verdict};
use crate::Result;

/// Which verdict an automaton recognizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Polarity {
    Accept,
    Reject,
}

impl Polarity {
    pub fn verdict(self) -> Verdict {
        match self {
            Polarity::Accept => Verdict::Yes,
            Polarity::Reject => Verdict::No,
        }
    }
}

/// Resource guard for state-space constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub max_states: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_states: 1_000_000 }
    }
}

/// Sizes observed while compiling one polarity of a monitor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LanguageStats {
    pub afa_states: usize,
    pub nfa_states: usize,
    pub dfa_states: usize,
}

/// Extension-closed NFA for the accepted or rejected traces of a monitor.
pub fn monitor_nfa(m: &Monitor, polarity: Polarity, limits: &Limits) -> Result<(Nfa, LanguageStats)> {
    let afa = monitor_to_afa(m, polarity)?;
    let nfa = afa_to_nfa(&afa, limits)?;
    let stats = LanguageStats { afa_states: afa.len(), nfa_states: nfa.len(), dfa_states: 0 };
    Ok((nfa.extension_close(), stats))
}

/// Extension-closed DFA for the accepted or rejected traces of a monitor.
pub fn monitor_dfa(m: &Monitor, polarity: Polarity, limits: &Limits) -> Result<(Dfa, LanguageStats)> {
    let (nfa, mut stats) = monitor_nfa(m, polarity, limits)?;
    let dfa = nfa_to_dfa(&nfa, limits)?.extension_close();
    stats.dfa_states = dfa.len();
    Ok((dfa, stats))
}

/// True when no finite trace is both accepted and rejected.
pub fn consistent(m: &Monitor) -> Result<bool> {
    let limits = Limits::default();
    let (acc, _) = monitor_nfa(m, Polarity::Accept, &limits)?;
    let (rej, _) = monitor_nfa(m, Polarity::Reject, &limits)?;
    Ok(intersection_witness(&acc, &rej).is_none())
}

/// Some trace accepted by both NFAs, found by breadth-first product search.
pub fn intersection_witness(n1: &Nfa, n2: &Nfa) -> Option<Vec<crate::terms::Action>> {
    use std::collections::{HashMap, VecDeque};
    let mut parent: HashMap<(u32, u32), Option<((u32, u32), crate::terms::Action)>> = HashMap::new();
    let mut queue = VecDeque::new();
    for &p in &n1.initial {
        for &q in &n2.initial {
            parent.insert((p, q), None);
            queue.push_back((p, q));
        }
    }
    while let Some((p, q)) = queue.pop_front() {
        if n1.accepting[p as usize] && n2.accepting[q as usize] {
            let mut trace = Vec::new();
            let mut cur = (p, q);
            while let Some(Some((prev, a))) = parent.get(&cur) {
                trace.push(*a);
                cur = *prev;
            }
            trace.reverse();
            return Some(trace);
        }
        for a in n1.alphabet.actions() {
            for &p2 in &n1.trans[p as usize][a.index()] {
                for &q2 in &n2.trans[q as usize][a.index()] {
                    if !parent.contains_key(&(p2, q2)) {
                        parent.insert((p2, q2), Some(((p, q), a)));
                        queue.push_back((p2, q2));
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{parse_monitor, Alphabet};

    fn m(s: &str) -> Monitor {
        parse_monitor(s, &Alphabet::new(["a", "b"]).unwrap()).unwrap()
    }

    #[test]
    fn consistency() {
        assert!(!consistent(&m("a.yes + a.no")).unwrap());
        assert!(consistent(&m("a.yes + b.no")).unwrap());
        assert!(consistent(&m("yes & (a.no + b.end)")).unwrap());
        assert!(!consistent(&m("(a.yes + a.no + end) & (a.yes + end)")).unwrap());
    }

    #[test]
    fn round_trip_through_monitors() {
        let limits = Limits::default();
        let src = m("(a.yes + b.end) & rec x.(a.x + b.yes)");
        let (d, _) = monitor_dfa(&src, Polarity::Accept, &limits).unwrap();
        let det = dfa_to_monitor(&d, Verdict::Yes, &limits).unwrap();
        assert!(crate::terms::validate(&det).deterministic);
        let (d2, _) = monitor_dfa(&det, Polarity::Accept, &limits).unwrap();
        assert_eq!(dfa_language_equal(&d, &d2).unwrap(), Comparison::Equal);
        let (n, _) = monitor_nfa(&src, Polarity::Accept, &limits).unwrap();
        let reg = nfa_to_monitor(&n, Verdict::Yes, &limits).unwrap();
        assert!(reg.is_regular());
        let (d3, _) = monitor_dfa(&reg, Polarity::Accept, &limits).unwrap();
        assert_eq!(dfa_language_equal(&d, &d3).unwrap(), Comparison::Equal);
    }

    #[test]
    fn conversions_on_small_automata() {
        let limits = Limits::default();
        let (d, _) = monitor_dfa(&m("a.yes + end"), Polarity::Accept, &limits).unwrap();
        assert_eq!(dfa_to_monitor(&d, Verdict::Yes, &limits).unwrap().to_string(), "a.yes");
        let (d, _) = monitor_dfa(&m("yes"), Polarity::Accept, &limits).unwrap();
        assert_eq!(dfa_to_monitor(&d, Verdict::Yes, &limits).unwrap().to_string(), "yes");
        let (n, _) = monitor_nfa(&m("end"), Polarity::Accept, &limits).unwrap();
        assert_eq!(nfa_to_monitor(&n, Verdict::Yes, &limits).unwrap().to_string(), "end");
        let (d, _) = monitor_dfa(&m("a.b.yes + a.a.no"), Polarity::Reject, &limits).unwrap();
        assert!(d.accepts(&d.alphabet.parse_trace("aab").unwrap()));
        assert!(!d.accepts(&d.alphabet.parse_trace("ab").unwrap()));
    }
}
