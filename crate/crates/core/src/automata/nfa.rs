use std::collections::{HashMap, VecDeque};

use super::{Afa, Limits, PosBool};
use crate::terms::{Action, Alphabet};
use crate::{Error, Result};

/// Nondeterministic finite automaton without silent transitions.
#[derive(Clone, Debug)]
pub struct Nfa {
    pub alphabet: Alphabet,
    pub initial: Vec<u32>,
    /// `trans[q][a]`: sorted successor list.
    pub trans: Vec<Vec<Vec<u32>>>,
    pub accepting: Vec<bool>,
}

impl Nfa {
    pub fn len(&self) -> usize {
        self.accepting.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accepting.is_empty()
    }

    pub fn accepts(&self, t: &[Action]) -> bool {
        let mut cur: Vec<u32> = self.initial.clone();
        for &a in t {
            let mut next: Vec<u32> =
                cur.iter().flat_map(|&q| self.trans[q as usize][a.index()].iter().copied()).collect();
            next.sort_unstable();
            next.dedup();
            cur = next;
        }
        cur.iter().any(|&q| self.accepting[q as usize])
    }

    /// Accepting states are absorbing: each has only self-loops.
    pub fn is_extension_closed(&self) -> bool {
        (0..self.len()).all(|q| {
            !self.accepting[q] || self.trans[q].iter().all(|s| s.as_slice() == [q as u32])
        })
    }

    /// Keeps only states reachable from an initial state and co-reachable
    /// to an accepting one, renumbered in breadth-first order.
    pub fn trim(&self) -> Nfa {
        let n = self.len();
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for q in 0..n {
            for succ in &self.trans[q] {
                for &p in succ {
                    rev[p as usize].push(q as u32);
                }
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
        let mut order: Vec<u32> = Vec::new();
        let mut new_id: Vec<Option<u32>> = vec![None; n];
        let mut queue = VecDeque::new();
        for &q in &self.initial {
            if co[q as usize] && new_id[q as usize].is_none() {
                new_id[q as usize] = Some(order.len() as u32);
                order.push(q);
                queue.push_back(q);
            }
        }
        while let Some(q) = queue.pop_front() {
            for succ in &self.trans[q as usize] {
                for &p in succ {
                    if co[p as usize] && new_id[p as usize].is_none() {
                        new_id[p as usize] = Some(order.len() as u32);
                        order.push(p);
                        queue.push_back(p);
                    }
                }
            }
        }
        let map = |list: &[u32]| -> Vec<u32> {
            let mut v: Vec<u32> = list.iter().filter_map(|&p| new_id[p as usize]).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        Nfa {
            alphabet: self.alphabet.clone(),
            initial: map(&self.initial),
            trans: order.iter().map(|&q| self.trans[q as usize].iter().map(|s| map(s)).collect()).collect(),
            accepting: order.iter().map(|&q| self.accepting[q as usize]).collect(),
        }
    }

    /// Makes every accepting state absorbing, so the language becomes its
    /// closure under finite extensions.
    pub fn extension_close(&self) -> Nfa {
        let k = self.alphabet.len();
        let trans = (0..self.len())
            .map(|q| {
                if self.accepting[q] {
                    vec![vec![q as u32]; k]
                } else {
                    self.trans[q].clone()
                }
            })
            .collect();
        Nfa { trans, ..self.clone() }.trim()
    }
}

/// Powerset construction: NFA states are minimal sets of AFA states whose
/// conjunction is a disjunct of the current obligation.
pub fn afa_to_nfa(afa: &Afa, limits: &Limits) -> Result<Nfa> {
    let n = afa.len();
    let k = afa.alphabet.len();
    // States that accept every continuation, and states that accept none.
    let mut universal = afa.accepting.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for q in 0..n {
            if universal[q] && !afa.delta[q].iter().all(|f| f.eval(&|p| universal[p as usize])) {
                universal[q] = false;
                changed = true;
            }
        }
    }
    let mut empty: Vec<bool> = afa.accepting.iter().map(|&acc| !acc).collect();
    changed = true;
    while changed {
        changed = false;
        for q in 0..n {
            if empty[q] && afa.delta[q].iter().any(|f| f.eval(&|p| !empty[p as usize])) {
                empty[q] = false;
                changed = true;
            }
        }
    }
    let simplify = |f: &PosBool| {
        f.substitute(&|p| {
            if universal[p as usize] {
                PosBool::True
            } else if empty[p as usize] {
                PosBool::False
            } else {
                PosBool::Atom(p)
            }
        })
    };
    let limit = limits.max_states;
    let too_many = |what: &str| Error::ResourceLimit(format!("AFA to NFA: more than {limit} {what}"));
    let mut dnf_cache: HashMap<(u32, usize), Vec<Vec<u32>>> = HashMap::new();
    let initial_dnf = simplify(&afa.initial).dnf(limit).ok_or_else(|| too_many("initial clauses"))?;

    let mut sets: Vec<Vec<u32>> = Vec::new();
    let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut intern = |s: Vec<u32>, sets: &mut Vec<Vec<u32>>| -> Result<u32> {
        if let Some(&i) = index.get(&s) {
            return Ok(i);
        }
        if sets.len() >= limit {
            return Err(too_many("states"));
        }
        let i = sets.len() as u32;
        index.insert(s.clone(), i);
        sets.push(s);
        Ok(i)
    };
    let mut dnf_of = |q: u32, a: usize| -> Result<Vec<Vec<u32>>> {
        if let Some(d) = dnf_cache.get(&(q, a)) {
            return Ok(d.clone());
        }
        let d = simplify(&afa.delta[q as usize][a]).dnf(limit).ok_or_else(|| too_many("clauses"))?;
        dnf_cache.insert((q, a), d.clone());
        Ok(d)
    };
    let compatible = pair_nonempty(n, k, &afa.accepting, &mut dnf_of)?;
    let live = |c: &[u32]| match &compatible {
        Some(ok) => c.iter().enumerate().all(|(i, &p)| c[i..].iter().all(|&q| ok[p as usize * n + q as usize])),
        None => true,
    };
    let mut initial = Vec::new();
    for c in initial_dnf {
        if live(&c) {
            initial.push(intern(c, &mut sets)?);
        }
    }
    let mut trans: Vec<Vec<Vec<u32>>> = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        let set = sets[i].clone();
        let mut row = Vec::with_capacity(k);
        for a in 0..k {
            let mut acc: Vec<Vec<u32>> = vec![vec![]];
            for &q in &set {
                let d = dnf_of(q, a)?;
                acc = super::posbool::dnf_product(&acc, &d, limit).ok_or_else(|| too_many("clauses"))?;
                acc.retain(|c| live(c));
                if acc.is_empty() {
                    break;
                }
            }
            let mut succ = Vec::with_capacity(acc.len());
            for c in acc {
                succ.push(intern(c, &mut sets)?);
            }
            succ.sort_unstable();
            row.push(succ);
        }
        trans.push(row);
        i += 1;
    }
    let accepting = sets.iter().map(|s| s.iter().all(|&q| afa.accepting[q as usize])).collect();
    initial.sort_unstable();
    Ok(Nfa { alphabet: afa.alphabet.clone(), initial, trans, accepting }.trim())
}

/// Largest AFA for which pairwise compatibility is computed.
const PAIR_LIMIT: usize = 2000;

/// Over-approximation of the pairs `(p, q)` whose conjunction accepts some
/// trace, as a least fixpoint: a pair is compatible if both states accept,
/// or some action has clauses for `p` and `q` whose union is pairwise
/// compatible. Clause sets containing an incompatible pair accept nothing.
fn pair_nonempty(
    n: usize,
    k: usize,
    accepting: &[bool],
    dnf_of: &mut dyn FnMut(u32, usize) -> Result<Vec<Vec<u32>>>,
) -> Result<Option<Vec<bool>>> {
    if n > PAIR_LIMIT {
        return Ok(None);
    }
    let mut dnf: Vec<Vec<Vec<Vec<u32>>>> = Vec::with_capacity(n);
    for q in 0..n {
        let mut row = Vec::with_capacity(k);
        for a in 0..k {
            row.push(dnf_of(q as u32, a)?);
        }
        dnf.push(row);
    }
    let mut ok = vec![false; n * n];
    for p in 0..n {
        for q in 0..n {
            ok[p * n + q] = accepting[p] && accepting[q];
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        for p in 0..n {
            for q in p..n {
                if ok[p * n + q] {
                    continue;
                }
                let pairwise = |c: &[u32], ok: &[bool]| {
                    c.iter().enumerate().all(|(i, &x)| c[i..].iter().all(|&y| ok[x as usize * n + y as usize]))
                };
                let found = (0..k).any(|a| {
                    dnf[p][a].iter().any(|c1| {
                        dnf[q][a].iter().any(|c2| {
                            let mut u: Vec<u32> = c1.iter().chain(c2).copied().collect();
                            u.sort_unstable();
                            u.dedup();
                            pairwise(&u, &ok)
                        })
                    })
                });
                if found {
                    ok[p * n + q] = true;
                    ok[q * n + p] = true;
                    changed = true;
                }
            }
        }
    }
    Ok(Some(ok))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{afa_accepts, monitor_to_afa, Polarity};
    use crate::corpus::all_traces;
    use crate::terms::parse_monitor;

    #[test]
    fn powerset_agrees_with_afa() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        for s in [
            "(a.yes + b.end) & rec x.(a.x + b.yes)",
            "rec x.(a.x + b.yes) | rec y.(b.y + a.(a.yes + b.end))",
            "a.yes + b.no",
            "end",
            "yes",
        ] {
            let m = parse_monitor(s, &ab).unwrap();
            for p in [Polarity::Accept, Polarity::Reject] {
                let afa = monitor_to_afa(&m, p).unwrap();
                let nfa = afa_to_nfa(&afa, &Limits::default()).unwrap();
                for t in all_traces(&ab, 5) {
                    assert_eq!(nfa.accepts(&t), afa_accepts(&afa, &t), "{s} {p:?} {t:?}");
                }
            }
        }
    }

    #[test]
    fn disjunctive_afa_gives_singletons() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        let m = parse_monitor("rec x.(a.x + b.(a.yes + b.x))", &ab).unwrap();
        let afa = monitor_to_afa(&m, Polarity::Accept).unwrap();
        let nfa = afa_to_nfa(&afa, &Limits::default()).unwrap();
        assert!(nfa.len() <= afa.len() + 1);
    }
}
