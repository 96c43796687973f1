use std::collections::{HashMap, VecDeque};

use super::{Limits, Nfa};
use crate::terms::{Action, Alphabet};
use crate::{Error, Result};

/// Total deterministic finite automaton. Non-co-reachable states are merged
/// into at most one explicit sink, `dead`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    pub alphabet: Alphabet,
    pub initial: u32,
    /// `trans[q][a]`.
    pub trans: Vec<Vec<u32>>,
    pub accepting: Vec<bool>,
    pub dead: Option<u32>,
}

/// Result of a language comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    /// Shortest trace in exactly one of the languages, least in alphabet order.
    Counterexample(Vec<Action>),
}

impl Dfa {
    pub fn len(&self) -> usize {
        self.accepting.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accepting.is_empty()
    }

    pub fn run(&self, t: &[Action]) -> u32 {
        t.iter().fold(self.initial, |q, a| self.trans[q as usize][a.index()])
    }

    pub fn accepts(&self, t: &[Action]) -> bool {
        self.accepting[self.run(t) as usize]
    }

    /// The DFA of the empty language.
    pub fn empty(alphabet: &Alphabet) -> Dfa {
        Dfa {
            alphabet: alphabet.clone(),
            initial: 0,
            trans: vec![vec![0; alphabet.len()]],
            accepting: vec![false],
            dead: Some(0),
        }
    }

    pub fn is_extension_closed(&self) -> bool {
        (0..self.len()).all(|q| !self.accepting[q] || self.trans[q].iter().all(|&p| p as usize == q))
    }

    /// Restricts to reachable states, merges every state that cannot reach
    /// acceptance into one sink, and renumbers breadth-first.
    pub fn normalize(&self) -> Dfa {
        let n = self.len();
        let k = self.alphabet.len();
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for q in 0..n {
            for &p in &self.trans[q] {
                rev[p as usize].push(q as u32);
            }
        }
        let mut co = self.accepting.clone();
        let mut stack: Vec<u32> = (0..n as u32).filter(|&q| co[q as usize]).collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q as usize] {
                if !co[p as usize] {
                    co[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        let mut r = Renumber { co: &co, new_id: vec![None; n], dead: None, order: Vec::new(), queue: VecDeque::new() };
        let initial = r.visit(self.initial);
        let mut trans_new: HashMap<u32, Vec<u32>> = HashMap::new();
        while let Some(q) = r.queue.pop_front() {
            let id = r.new_id[q as usize].unwrap();
            let row: Vec<u32> = (0..k).map(|a| r.visit(self.trans[q as usize][a])).collect();
            trans_new.insert(id, row);
        }
        let Renumber { dead, order, .. } = r;
        let trans = (0..order.len() as u32)
            .map(|i| trans_new.remove(&i).unwrap_or_else(|| vec![i; k]))
            .collect();
        let accepting = order.iter().map(|q| q.is_some_and(|q| self.accepting[q as usize])).collect();
        Dfa { alphabet: self.alphabet.clone(), initial, trans, accepting, dead }
    }

    /// Accepting states become absorbing; the language becomes `L·Σ*`.
    pub fn extension_close(&self) -> Dfa {
        let k = self.alphabet.len();
        let trans = (0..self.len())
            .map(|q| if self.accepting[q] { vec![q as u32; k] } else { self.trans[q].clone() })
            .collect();
        Dfa { trans, ..self.clone() }.normalize()
    }

    /// Marks as accepting every state all of whose infinite continuations
    /// pass through acceptance, then extension-closes. Two automata have the
    /// same `L·Σ^ω` exactly when their saturations have the same language.
    pub fn omega_saturate(&self) -> Dfa {
        let good = self.omega_good();
        Dfa { accepting: good, ..self.clone() }.extension_close()
    }

    /// States from which every infinite path meets an accepting state.
    fn omega_good(&self) -> Vec<bool> {
        let mut good = self.accepting.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..self.len() {
                if !good[q] && self.trans[q].iter().all(|&p| good[p as usize]) {
                    good[q] = true;
                    changed = true;
                }
            }
        }
        good
    }

    /// Complement automaton (same states, flipped acceptance).
    pub fn complement(&self) -> Dfa {
        Dfa { accepting: self.accepting.iter().map(|b| !b).collect(), ..self.clone() }.normalize()
    }

    /// Whether `u·v^ω` has a prefix in the language.
    pub fn lasso_member(&self, u: &[Action], v: &[Action]) -> Result<bool> {
        if v.is_empty() {
            return Err(Error::InvalidArgument("lasso period must be non-empty".into()));
        }
        let mut q = self.initial;
        if self.accepting[q as usize] {
            return Ok(true);
        }
        for &a in u {
            q = self.trans[q as usize][a.index()];
            if self.accepting[q as usize] {
                return Ok(true);
            }
        }
        for _ in 0..=self.len() {
            for &a in v {
                q = self.trans[q as usize][a.index()];
                if self.accepting[q as usize] {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Shortest `h` such that exactly one of `f·h`, `g·h` is accepted.
    pub fn distinguishing_suffix(&self, f: &[Action], g: &[Action]) -> Option<Vec<Action>> {
        pair_search(self, self, self.run(f), self.run(g))
    }

    /// Some witness lasso `(u, v)` for a state outside the ω-language, when
    /// the run after `u` can avoid acceptance forever.
    pub(crate) fn avoiding_cycle(&self, u: &[Action]) -> Option<(Vec<Action>, Vec<Action>)> {
        let good = self.omega_good();
        let mut q = self.run(u);
        if good[q as usize] {
            return None;
        }
        let mut path: Vec<Action> = Vec::new();
        let mut seen: HashMap<u32, usize> = HashMap::new();
        loop {
            if let Some(&i) = seen.get(&q) {
                let mut prefix = u.to_vec();
                prefix.extend_from_slice(&path[..i]);
                return Some((prefix, path[i..].to_vec()));
            }
            seen.insert(q, path.len());
            let a = self
                .alphabet
                .actions()
                .find(|a| !good[self.trans[q as usize][a.index()] as usize])
                .expect("non-good state has a non-good successor");
            path.push(a);
            q = self.trans[q as usize][a.index()];
        }
    }
}

/// Breadth-first renumbering in which every dead state maps to one sink.
struct Renumber<'a> {
    co: &'a [bool],
    new_id: Vec<Option<u32>>,
    dead: Option<u32>,
    /// New id -> old state, `None` for the sink.
    order: Vec<Option<u32>>,
    queue: VecDeque<u32>,
}

impl Renumber<'_> {
    fn visit(&mut self, q: u32) -> u32 {
        if !self.co[q as usize] {
            if let Some(d) = self.dead {
                return d;
            }
            self.order.push(None);
            let d = (self.order.len() - 1) as u32;
            self.dead = Some(d);
            return d;
        }
        if let Some(id) = self.new_id[q as usize] {
            return id;
        }
        self.order.push(Some(q));
        self.queue.push_back(q);
        let id = (self.order.len() - 1) as u32;
        self.new_id[q as usize] = Some(id);
        id
    }
}

fn pair_search(d1: &Dfa, d2: &Dfa, p0: u32, q0: u32) -> Option<Vec<Action>> {
    let mut parent: HashMap<(u32, u32), Option<((u32, u32), Action)>> = HashMap::new();
    let mut queue = VecDeque::new();
    parent.insert((p0, q0), None);
    queue.push_back((p0, q0));
    while let Some((p, q)) = queue.pop_front() {
        if d1.accepting[p as usize] != d2.accepting[q as usize] {
            let mut trace = Vec::new();
            let mut cur = (p, q);
            while let Some(Some((prev, a))) = parent.get(&cur) {
                trace.push(*a);
                cur = *prev;
            }
            trace.reverse();
            return Some(trace);
        }
        for a in d1.alphabet.actions() {
            let next = (d1.trans[p as usize][a.index()], d2.trans[q as usize][a.index()]);
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                e.insert(Some(((p, q), a)));
                queue.push_back(next);
            }
        }
    }
    None
}

pub fn dfa_language_equal(d1: &Dfa, d2: &Dfa) -> Result<Comparison> {
    d1.alphabet.check_same(&d2.alphabet)?;
    Ok(match pair_search(d1, d2, d1.initial, d2.initial) {
        None => Comparison::Equal,
        Some(t) => Comparison::Counterexample(t),
    })
}

/// Subset construction, followed by normalization.
pub fn nfa_to_dfa(n: &Nfa, limits: &Limits) -> Result<Dfa> {
    let k = n.alphabet.len();
    let mut sets: Vec<Vec<u32>> = Vec::new();
    let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut start = n.initial.clone();
    start.sort_unstable();
    start.dedup();
    index.insert(start.clone(), 0);
    sets.push(start);
    let mut trans: Vec<Vec<u32>> = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        let mut row = Vec::with_capacity(k);
        for a in 0..k {
            let mut next: Vec<u32> =
                sets[i].iter().flat_map(|&q| n.trans[q as usize][a].iter().copied()).collect();
            next.sort_unstable();
            next.dedup();
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if sets.len() >= limits.max_states {
                        return Err(Error::ResourceLimit(format!(
                            "NFA to DFA: more than {} states",
                            limits.max_states
                        )));
                    }
                    let id = sets.len() as u32;
                    index.insert(next.clone(), id);
                    sets.push(next);
                    id
                }
            };
            row.push(id);
        }
        trans.push(row);
        i += 1;
    }
    let accepting = sets.iter().map(|s| s.iter().any(|&q| n.accepting[q as usize])).collect();
    Ok(Dfa { alphabet: n.alphabet.clone(), initial: 0, trans, accepting, dead: None }.normalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    /// DFA for traces starting with `a`.
    fn starts_a() -> Dfa {
        Dfa { alphabet: ab(), initial: 0, trans: vec![vec![1, 2], vec![1, 1], vec![2, 2]], accepting: vec![false, true, false], dead: None }
            .normalize()
    }

    /// DFA for traces containing an `a`.
    fn contains_a() -> Dfa {
        Dfa { alphabet: ab(), initial: 0, trans: vec![vec![1, 0], vec![1, 1]], accepting: vec![false, true], dead: None }
            .normalize()
    }

    #[test]
    fn equality_and_counterexamples() {
        let d = starts_a();
        assert_eq!(dfa_language_equal(&d, &d).unwrap(), Comparison::Equal);
        let t = ab().parse_trace("ba").unwrap();
        assert_eq!(dfa_language_equal(&d, &contains_a()).unwrap(), Comparison::Counterexample(t));
    }

    #[test]
    fn normalization_merges_dead_states() {
        let d = starts_a();
        assert_eq!(d.len(), 3);
        assert_eq!(d.dead, Some(2));
        assert!(d.is_extension_closed());
    }

    #[test]
    fn lasso_and_suffixes() {
        let just_a = Dfa {
            alphabet: ab(),
            initial: 0,
            trans: vec![vec![1, 2], vec![2, 2], vec![2, 2]],
            accepting: vec![false, true, false],
            dead: None,
        }
        .normalize();
        let closed = just_a.extension_close();
        assert_eq!(dfa_language_equal(&closed, &starts_a()).unwrap(), Comparison::Equal);
        let t = |s: &str| ab().parse_trace(s).unwrap();
        assert!(closed.lasso_member(&t("a"), &t("b")).unwrap());
        assert!(!closed.lasso_member(&t(""), &t("b")).unwrap());
        assert!(closed.lasso_member(&t("b"), &t("b")).is_ok());
        assert_eq!(closed.distinguishing_suffix(&t("a"), &t("b")), Some(vec![]));
        assert_eq!(closed.distinguishing_suffix(&t("ab"), &t("ab")), None);
    }

    #[test]
    fn omega_saturation() {
        // Every trace has a nonempty prefix; every nonempty trace is accepted.
        let nonempty = Dfa { alphabet: ab(), initial: 0, trans: vec![vec![1, 1], vec![1, 1]], accepting: vec![false, true], dead: None };
        let all = Dfa { alphabet: ab(), initial: 0, trans: vec![vec![0, 0]], accepting: vec![true], dead: None };
        assert_ne!(dfa_language_equal(&nonempty, &all).unwrap(), Comparison::Equal);
        assert_eq!(
            dfa_language_equal(&nonempty.omega_saturate(), &all.omega_saturate()).unwrap(),
            Comparison::Equal
        );
    }
}
