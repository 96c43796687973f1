use std::fmt;

/// Positive boolean formula over automaton states, kept simplified:
/// no constants below the root, flattened, sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PosBool {
    False,
    True,
    Atom(u32),
    And(Vec<PosBool>),
    Or(Vec<PosBool>),
}

impl PosBool {
    pub fn and(items: impl IntoIterator<Item = PosBool>) -> PosBool {
        let mut out = Vec::new();
        for it in items {
            match it {
                PosBool::True => {}
                PosBool::False => return PosBool::False,
                PosBool::And(xs) => out.extend(xs),
                x => out.push(x),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => PosBool::True,
            1 => out.pop().unwrap(),
            _ => PosBool::And(out),
        }
    }

    pub fn or(items: impl IntoIterator<Item = PosBool>) -> PosBool {
        let mut out = Vec::new();
        for it in items {
            match it {
                PosBool::False => {}
                PosBool::True => return PosBool::True,
                PosBool::Or(xs) => out.extend(xs),
                x => out.push(x),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => PosBool::False,
            1 => out.pop().unwrap(),
            _ => PosBool::Or(out),
        }
    }

    pub fn constant(b: bool) -> PosBool {
        if b {
            PosBool::True
        } else {
            PosBool::False
        }
    }

    pub fn eval(&self, val: &dyn Fn(u32) -> bool) -> bool {
        match self {
            PosBool::False => false,
            PosBool::True => true,
            PosBool::Atom(q) => val(*q),
            PosBool::And(xs) => xs.iter().all(|x| x.eval(val)),
            PosBool::Or(xs) => xs.iter().any(|x| x.eval(val)),
        }
    }

    pub fn atoms(&self, out: &mut Vec<u32>) {
        match self {
            PosBool::Atom(q) => out.push(*q),
            PosBool::And(xs) | PosBool::Or(xs) => xs.iter().for_each(|x| x.atoms(out)),
            _ => {}
        }
    }

    /// Replaces every atom and re-simplifies.
    pub fn substitute(&self, f: &dyn Fn(u32) -> PosBool) -> PosBool {
        match self {
            PosBool::Atom(q) => f(*q),
            PosBool::And(xs) => PosBool::and(xs.iter().map(|x| x.substitute(f))),
            PosBool::Or(xs) => PosBool::or(xs.iter().map(|x| x.substitute(f))),
            c => c.clone(),
        }
    }

    /// Minimal disjunctive normal form as sorted clauses of atoms; `None`
    /// when more than `limit` clauses arise.
    pub fn dnf(&self, limit: usize) -> Option<Vec<Vec<u32>>> {
        match self {
            PosBool::False => Some(vec![]),
            PosBool::True => Some(vec![vec![]]),
            PosBool::Atom(q) => Some(vec![vec![*q]]),
            PosBool::Or(xs) => {
                let mut out = Vec::new();
                for x in xs {
                    out.extend(x.dnf(limit)?);
                    if out.len() > limit {
                        return None;
                    }
                }
                Some(minimize(out))
            }
            PosBool::And(xs) => {
                let mut acc = vec![vec![]];
                for x in xs {
                    acc = dnf_product(&acc, &x.dnf(limit)?, limit)?;
                }
                Some(acc)
            }
        }
    }
}

/// Conjunction of two DNFs, minimized.
pub fn dnf_product(a: &[Vec<u32>], b: &[Vec<u32>], limit: usize) -> Option<Vec<Vec<u32>>> {
    if a.len().saturating_mul(b.len()) > limit.saturating_mul(16) {
        return None;
    }
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            let mut c = x.clone();
            c.extend_from_slice(y);
            c.sort_unstable();
            c.dedup();
            out.push(c);
        }
    }
    let out = minimize(out);
    if out.len() > limit {
        None
    } else {
        Some(out)
    }
}

/// Sorts clauses and removes duplicates and supersets of other clauses.
pub fn minimize(mut clauses: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    clauses.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    clauses.dedup();
    let mut out: Vec<Vec<u32>> = Vec::with_capacity(clauses.len());
    for c in clauses {
        if !out.iter().any(|k| is_subset(k, &c)) {
            out.push(c);
        }
    }
    out.sort();
    out
}

fn is_subset(small: &[u32], big: &[u32]) -> bool {
    let mut j = 0;
    for &x in small {
        while j < big.len() && big[j] < x {
            j += 1;
        }
        if j == big.len() || big[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

impl fmt::Display for PosBool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, xs: &[PosBool], op: &str| -> fmt::Result {
            f.write_str("(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(op)?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        };
        match self {
            PosBool::False => f.write_str("false"),
            PosBool::True => f.write_str("true"),
            PosBool::Atom(q) => write!(f, "q{q}"),
            PosBool::And(xs) => join(f, xs, " ∧ "),
            PosBool::Or(xs) => join(f, xs, " ∨ "),
        }
    }
}
