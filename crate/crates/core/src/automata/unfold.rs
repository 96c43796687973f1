use std::collections::HashMap;

use super::graph::scc;
use super::{Dfa, Limits, Nfa};
use crate::terms::{Action, Alphabet, Monitor, TermId, TermStore, VarId, Verdict};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Final(Verdict),
    Open,
}

/// An automaton prepared for conversion to a monitor: final states become
/// verdicts and every listed transition leads to a state that can still
/// reach a final one.
pub(crate) struct Graph {
    pub kind: Vec<Kind>,
    pub succ: Vec<Vec<(Action, u32)>>,
}

impl Graph {
    /// Drops transitions into states that cannot reach a final state.
    pub fn prune(mut self) -> Graph {
        let n = self.kind.len();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (q, succ) in self.succ.iter().enumerate() {
            for &(_, p) in succ {
                rev[p as usize].push(q);
            }
        }
        let mut live: Vec<bool> = self.kind.iter().map(|k| matches!(k, Kind::Final(_))).collect();
        let mut stack: Vec<usize> = (0..n).filter(|&q| live[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if !live[p] {
                    live[p] = true;
                    stack.push(p);
                }
            }
        }
        for succ in &mut self.succ {
            succ.retain(|&(_, p)| live[p as usize]);
        }
        self
    }
}

struct Frame {
    q: u32,
    var: VarId,
    key: (u32, Vec<(u32, VarId)>),
    next: usize,
    pending: Option<Action>,
    parts: Vec<TermId>,
    free: Vec<VarId>,
}

/// Unfolds the graph from `initials` into a regular monitor. Each state on
/// the current path gets a recursion variable; revisiting it yields the
/// variable, and variables that end up unused get no binder. Results are
/// shared between paths whose stack agrees on the state's component.
pub(crate) fn unfold(alphabet: &Alphabet, g: &Graph, initials: &[u32], limits: &Limits) -> Result<Monitor> {
    let n = g.kind.len();
    let comp = scc(n, &|q| g.succ[q].iter().map(|&(_, p)| p as usize).collect());
    let mut store = TermStore::new();
    let mut memo: HashMap<(u32, Vec<(u32, VarId)>), (TermId, Vec<VarId>)> = HashMap::new();
    let mut on_stack: HashMap<u32, VarId> = HashMap::new();
    let mut comp_stack: HashMap<usize, Vec<(u32, VarId)>> = HashMap::new();
    let mut roots = Vec::new();

    for &init in initials {
        if let Kind::Final(v) = g.kind[init as usize] {
            let t = store.verdict(v);
            let mut s = TermStore::new();
            let r = s.import(&store, t);
            return Ok(Monitor::new(alphabet.clone(), s, r));
        }
    }

    for &init in initials {
        let mut frames: Vec<Frame> = Vec::new();
        let mut result: Option<(TermId, Vec<VarId>)> = None;
        let mut request = Some(init);
        loop {
            if let Some(q) = request.take() {
                // Resolve directly if possible, else open a frame.
                let direct = if let Kind::Final(v) = g.kind[q as usize] {
                    Some((store.verdict(v), vec![]))
                } else if let Some(&v) = on_stack.get(&q) {
                    Some((store.var(v), vec![v]))
                } else {
                    let key = (q, comp_stack.get(&comp[q as usize]).cloned().unwrap_or_default());
                    match memo.get(&key) {
                        Some(r) => Some(r.clone()),
                        None => {
                            if memo.len() >= limits.max_states {
                                return Err(Error::ResourceLimit(format!(
                                    "automaton to monitor: more than {} unfolded states",
                                    limits.max_states
                                )));
                            }
                            let var = store.fresh_var(&format!("x{q}"));
                            on_stack.insert(q, var);
                            comp_stack.entry(comp[q as usize]).or_default().push((q, var));
                            frames.push(Frame { q, var, key, next: 0, pending: None, parts: vec![], free: vec![] });
                            None
                        }
                    }
                };
                if let Some(r) = direct {
                    result = Some(r);
                }
            }
            if let Some((t, free)) = result.take() {
                match frames.last_mut() {
                    None => {
                        roots.push(t);
                        break;
                    }
                    Some(f) => {
                        let a = f.pending.take().expect("child result without pending action");
                        let p = store.prefix(a, t);
                        f.parts.push(p);
                        for v in free {
                            if !f.free.contains(&v) {
                                f.free.push(v);
                            }
                        }
                    }
                }
            }
            let f = frames.last_mut().expect("frame");
            let succ = &g.succ[f.q as usize];
            if f.next < succ.len() {
                let (a, p) = succ[f.next];
                f.next += 1;
                f.pending = Some(a);
                request = Some(p);
                continue;
            }
            let f = frames.pop().unwrap();
            on_stack.remove(&f.q);
            comp_stack.get_mut(&comp[f.q as usize]).unwrap().pop();
            let body = match store.sum(f.parts.iter().copied()) {
                Some(b) => b,
                None => store.end(),
            };
            let used = f.free.contains(&f.var);
            let t = if used { store.bind(f.var, body) } else { body };
            let free: Vec<VarId> = f.free.into_iter().filter(|&v| v != f.var).collect();
            memo.insert(f.key, (t, free.clone()));
            result = Some((t, free));
        }
    }
    let end = store.end();
    let non_end: Vec<TermId> = roots.iter().copied().filter(|&t| t != end).collect();
    let root = store.sum(non_end).unwrap_or(end);
    let mut compact = TermStore::new();
    let r = compact.import(&store, root);
    Ok(Monitor::new(alphabet.clone(), compact, r))
}

/// Regular monitor whose `verdict`-language is the language of the NFA,
/// which must be extension-closed.
pub fn nfa_to_monitor(n: &Nfa, verdict: Verdict, limits: &Limits) -> Result<Monitor> {
    if !n.is_extension_closed() {
        return Err(Error::NotExtensionClosed);
    }
    let g = Graph {
        kind: n.accepting.iter().map(|&acc| if acc { Kind::Final(verdict) } else { Kind::Open }).collect(),
        succ: (0..n.len())
            .map(|q| {
                if n.accepting[q] {
                    return vec![];
                }
                n.alphabet
                    .actions()
                    .flat_map(|a| n.trans[q][a.index()].iter().map(move |&p| (a, p)))
                    .collect()
            })
            .collect(),
    }
    .prune();
    unfold(&n.alphabet, &g, &n.initial, limits)
}

/// Deterministic monitor whose `verdict`-language is the language of the
/// DFA, which must be extension-closed.
pub fn dfa_to_monitor(d: &Dfa, verdict: Verdict, limits: &Limits) -> Result<Monitor> {
    if !d.is_extension_closed() {
        return Err(Error::NotExtensionClosed);
    }
    let g = Graph {
        kind: d.accepting.iter().map(|&acc| if acc { Kind::Final(verdict) } else { Kind::Open }).collect(),
        succ: (0..d.len())
            .map(|q| {
                if d.accepting[q] {
                    return vec![];
                }
                d.alphabet.actions().map(|a| (a, d.trans[q][a.index()])).collect()
            })
            .collect(),
    }
    .prune();
    unfold(&d.alphabet, &g, &[d.initial], limits)
}
