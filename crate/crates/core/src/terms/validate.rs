use serde::Serialize;

use super::{Monitor, Node, TermId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub closed: bool,
    pub free_vars: Vec<String>,
    pub regular: bool,
    /// Regular, closed, and every sum of two or more summands is a sum of
    /// prefixes with pairwise distinct actions.
    pub deterministic: bool,
    /// Every variable occurrence lies under an action prefix below its binder.
    pub guarded: bool,
    /// A syntactic sufficient condition for reactivity holds.
    pub syntactically_reactive: bool,
    pub size: String,
}

pub fn validate(m: &Monitor) -> ValidationReport {
    let free_vars = m.free_vars();
    let closed = free_vars.is_empty();
    let regular = m.is_regular();
    ValidationReport {
        closed,
        regular,
        deterministic: closed && regular && sums_deterministic(m),
        guarded: guarded(m),
        syntactically_reactive: closed && syntactically_reactive(m),
        size: m.size().to_string(),
        free_vars,
    }
}

fn summands(m: &Monitor, id: TermId, out: &mut Vec<TermId>) {
    match m.node(id) {
        Node::Choice(l, r) => {
            summands(m, l, out);
            summands(m, r, out);
        }
        _ => out.push(id),
    }
}

pub(crate) fn sums_deterministic(m: &Monitor) -> bool {
    for id in m.reachable() {
        if let Node::Choice(..) = m.node(id) {
            let mut parts = Vec::new();
            summands(m, id, &mut parts);
            let mut seen = Vec::new();
            for p in parts {
                match m.node(p) {
                    Node::Prefix(a, _) if !seen.contains(&a) => seen.push(a),
                    _ => return false,
                }
            }
        }
    }
    true
}

fn guarded(m: &Monitor) -> bool {
    for id in m.reachable() {
        if let Node::Rec(v, body) = m.node(id) {
            let mut stack = vec![body];
            let mut seen = std::collections::HashSet::new();
            while let Some(t) = stack.pop() {
                if !seen.insert(t) {
                    continue;
                }
                match m.node(t) {
                    Node::Var(w) if w == v => return false,
                    Node::Prefix(..) | Node::Verdict(_) | Node::Var(_) => {}
                    n => stack.extend(n.children()),
                }
            }
        }
    }
    true
}

/// Actions each node can weakly perform, as a least fixpoint.
pub(crate) fn weak_coverage(m: &Monitor) -> Vec<Vec<bool>> {
    let n_act = m.alphabet().len();
    let reach = m.reachable();
    let mut cov = vec![vec![false; n_act]; m.store().len()];
    let mut changed = true;
    while changed {
        changed = false;
        for &id in &reach {
            let new: Vec<bool> = match m.node(id) {
                Node::Verdict(_) => vec![true; n_act],
                Node::Prefix(a, _) => (0..n_act).map(|i| i == a.index()).collect(),
                Node::Choice(l, r) => {
                    (0..n_act).map(|i| cov[l.index()][i] || cov[r.index()][i]).collect()
                }
                Node::And(l, r) | Node::Or(l, r) => {
                    (0..n_act).map(|i| cov[l.index()][i] && cov[r.index()][i]).collect()
                }
                Node::Rec(_, b) => cov[b.index()].clone(),
                Node::Var(v) => match m.store().binder(v) {
                    Some(b) => cov[b.index()].clone(),
                    None => vec![false; n_act],
                },
            };
            if new != cov[id.index()] {
                cov[id.index()] = new;
                changed = true;
            }
        }
    }
    cov
}

pub(crate) fn syntactically_reactive(m: &Monitor) -> bool {
    let cov = weak_coverage(m);
    let mut seen = vec![false; m.store().len()];
    let mut stack = vec![m.root()];
    while let Some(id) = stack.pop() {
        if std::mem::replace(&mut seen[id.index()], true) {
            continue;
        }
        if cov[id.index()].iter().any(|c| !c) {
            return false;
        }
        match m.node(id) {
            Node::Verdict(_) => {}
            Node::Prefix(_, c) | Node::Rec(_, c) => stack.push(c),
            Node::Var(v) => stack.extend(m.store().binder(v)),
            Node::And(l, r) | Node::Or(l, r) => stack.extend([l, r]),
            Node::Choice(l, r) => {
                let mut parts = vec![l, r];
                while let Some(c) = parts.pop() {
                    match m.node(c) {
                        Node::Choice(x, y) => parts.extend([x, y]),
                        Node::Prefix(_, d) => stack.push(d),
                        Node::Verdict(_) => {}
                        _ => stack.push(c),
                    }
                }
            }
        }
    }
    true
}
