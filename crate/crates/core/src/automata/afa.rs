use std::collections::HashMap;

use super::graph::scc;
use super::{Polarity, PosBool};
use crate::terms::{Action, Alphabet, Monitor, Node, TermId, Verdict};
use crate::Result;

/// Alternating finite automaton with positive boolean transitions.
#[derive(Clone, Debug)]
pub struct Afa {
    pub alphabet: Alphabet,
    pub initial: PosBool,
    /// `delta[q][a]`.
    pub delta: Vec<Vec<PosBool>>,
    pub accepting: Vec<bool>,
    /// Subterm of the source monitor that each state stands for, if any.
    pub sources: Vec<Option<TermId>>,
}

impl Afa {
    pub fn len(&self) -> usize {
        self.accepting.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accepting.is_empty()
    }
}

/// Builds the AFA recognizing the accepted (or rejected) finite traces of a
/// closed monitor. States are subterms reached through action prefixes;
/// silent steps are eliminated as a least fixpoint over the subterm graph.
///
/// The construction is exact for regular monitors and for parallel
/// compositions of reactive monitors.
pub fn monitor_to_afa(m: &Monitor, polarity: Polarity) -> Result<Afa> {
    m.require_closed()?;
    let target = polarity.verdict();
    let reach = m.reachable();
    let local: HashMap<TermId, usize> = reach.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let store = m.store();
    let binder = |v| store.binder(v).expect("closed term");
    let conj_and = polarity == Polarity::Accept;

    // Silent-step dependency edges between subterms.
    let tau_succ: Vec<Vec<usize>> = reach
        .iter()
        .map(|&t| match store.node(t) {
            Node::Verdict(_) | Node::Prefix(..) => vec![],
            Node::Var(v) => vec![local[&binder(v)]],
            n => n.children().map(|c| local[&c]).collect(),
        })
        .collect();

    // Immediate verdict: the term reaches the target verdict by silent steps.
    let mut eps = vec![false; reach.len()];
    let mut changed = true;
    while changed {
        changed = false;
        for (i, &t) in reach.iter().enumerate() {
            if eps[i] {
                continue;
            }
            let e = |c: TermId| eps[local[&c]];
            let plus = |c: TermId| match store.node(c) {
                Node::Verdict(_) | Node::Prefix(..) => false,
                _ => e(c),
            };
            let val = match store.node(t) {
                Node::Verdict(v) => v == target,
                Node::Prefix(..) => false,
                Node::Choice(l, r) => plus(l) || plus(r),
                Node::Rec(_, b) => e(b),
                Node::Var(v) => e(binder(v)),
                Node::And(l, r) => {
                    if conj_and {
                        e(l) && e(r)
                    } else {
                        e(l) || e(r)
                    }
                }
                Node::Or(l, r) => {
                    if conj_and {
                        e(l) || e(r)
                    } else {
                        e(l) && e(r)
                    }
                }
            };
            if val {
                eps[i] = true;
                changed = true;
            }
        }
    }

    let comp = scc(reach.len(), &|i| tau_succ[i].clone());
    let mut by_comp: Vec<Vec<usize>> = vec![Vec::new(); comp.iter().max().map_or(0, |c| c + 1)];
    for (i, &c) in comp.iter().enumerate() {
        by_comp[c].push(i);
    }
    let actions: Vec<Action> = m.alphabet().actions().collect();
    let mut delta: Vec<Vec<PosBool>> = vec![Vec::new(); reach.len()];
    let cx = StepCtx { m, reach: &reach, local: &local, comp: &comp, target, conj_and };
    for members in &by_comp {
        let cyclic = members.len() > 1 || tau_succ[members[0]].contains(&members[0]);
        for &q in members {
            let row = actions
                .iter()
                .map(|&a| {
                    if cyclic {
                        cx.step_cut(q, a, &delta, &mut vec![q])
                    } else {
                        cx.step(q, a, &delta)
                    }
                })
                .collect();
            delta[q] = row;
        }
    }

    // States: the root plus every subterm occurring as an atom.
    let root = local[&m.root()];
    let mut states = vec![root];
    let mut state_of: HashMap<usize, u32> = HashMap::from([(root, 0)]);
    let mut i = 0;
    while i < states.len() {
        let q = states[i];
        let mut atoms = Vec::new();
        for f in &delta[q] {
            f.atoms(&mut atoms);
        }
        for t in atoms {
            let l = local[&TermId(t)];
            state_of.entry(l).or_insert_with(|| {
                states.push(l);
                (states.len() - 1) as u32
            });
        }
        i += 1;
    }
    let rename = |f: &PosBool| f.substitute(&|t| PosBool::Atom(state_of[&local[&TermId(t)]]));
    Ok(Afa {
        alphabet: m.alphabet().clone(),
        initial: PosBool::Atom(0),
        delta: states.iter().map(|&q| delta[q].iter().map(rename).collect()).collect(),
        accepting: states.iter().map(|&q| eps[q]).collect(),
        sources: states.iter().map(|&q| Some(reach[q])).collect(),
    })
}

struct StepCtx<'a> {
    m: &'a Monitor,
    reach: &'a [TermId],
    local: &'a HashMap<TermId, usize>,
    comp: &'a [usize],
    target: Verdict,
    conj_and: bool,
}

impl StepCtx<'_> {
    fn atom(&self, c: TermId) -> PosBool {
        match self.m.node(c) {
            Node::Verdict(v) => PosBool::constant(v == self.target),
            _ => PosBool::Atom(c.0),
        }
    }

    /// One-step formula of `q` given the formulas `get` of its silent successors.
    fn combine(&self, q: usize, a: Action, get: &mut dyn FnMut(usize) -> PosBool) -> PosBool {
        let store = self.m.store();
        let loc = |t: TermId| self.local[&t];
        match store.node(self.reach[q]) {
            Node::Verdict(v) => PosBool::constant(v == self.target),
            Node::Prefix(b, c) => {
                if a == b {
                    self.atom(c)
                } else {
                    PosBool::False
                }
            }
            Node::Choice(l, r) => {
                let (x, y) = (get(loc(l)), get(loc(r)));
                PosBool::or([x, y])
            }
            Node::Rec(_, b) => get(loc(b)),
            Node::Var(v) => get(loc(store.binder(v).expect("closed term"))),
            n @ (Node::And(l, r) | Node::Or(l, r)) => {
                let (x, y) = (get(loc(l)), get(loc(r)));
                if matches!(n, Node::And(..)) == self.conj_and {
                    PosBool::and([x, y])
                } else {
                    PosBool::or([x, y])
                }
            }
        }
    }

    fn step(&self, q: usize, a: Action, delta: &[Vec<PosBool>]) -> PosBool {
        self.combine(q, a, &mut |c| delta[c][a.index()].clone())
    }

    /// Unfolds silent cycles, cutting a branch to `false` when it revisits a
    /// term on the current path.
    fn step_cut(&self, q: usize, a: Action, delta: &[Vec<PosBool>], path: &mut Vec<usize>) -> PosBool {
        self.combine(q, a, &mut |c| {
            if self.comp[c] != self.comp[q] {
                delta[c][a.index()].clone()
            } else if path.contains(&c) {
                PosBool::False
            } else {
                path.push(c);
                let f = self.step_cut(c, a, delta, path);
                path.pop();
                f
            }
        })
    }
}

/// Decides acceptance of a finite trace by backward evaluation.
pub fn afa_accepts(a: &Afa, t: &[Action]) -> bool {
    let mut val = a.accepting.clone();
    for &x in t.iter().rev() {
        let next: Vec<bool> = a.delta.iter().map(|row| row[x.index()].eval(&|q| val[q as usize])).collect();
        val = next;
    }
    a.initial.eval(&|q| val[q as usize])
}
