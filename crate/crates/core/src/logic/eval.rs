use super::Formula;
use crate::terms::Action;
use crate::{Error, Result};

/// The infinite trace `u·v^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub u: Vec<Action>,
    pub v: Vec<Action>,
}

impl Lasso {
    pub fn new(u: Vec<Action>, v: Vec<Action>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::InvalidArgument("lasso period must be non-empty".into()));
        }
        Ok(Lasso { u, v })
    }

    /// Number of distinct suffixes (positions).
    fn positions(&self) -> usize {
        self.u.len() + self.v.len()
    }

    fn action(&self, i: usize) -> Action {
        if i < self.u.len() {
            self.u[i]
        } else {
            self.v[i - self.u.len()]
        }
    }

    fn succ(&self, i: usize) -> usize {
        if i + 1 < self.positions() {
            i + 1
        } else {
            self.u.len()
        }
    }
}

/// Linear-time semantics: whether `u·v^ω` satisfies the closed formula.
/// Fixpoints are computed by iteration over the finite set of suffixes.
pub fn eval_formula_lasso(phi: &Formula, w: &Lasso) -> bool {
    let mut env: Vec<(String, Vec<bool>)> = Vec::new();
    eval(phi, w, &mut env)[0]
}

fn eval(phi: &Formula, w: &Lasso, env: &mut Vec<(String, Vec<bool>)>) -> Vec<bool> {
    let n = w.positions();
    match phi {
        Formula::Tt => vec![true; n],
        Formula::Ff => vec![false; n],
        Formula::Var(x) => env
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| panic!("free variable {x}")),
        Formula::And(l, r) => {
            let (a, b) = (eval(l, w, env), eval(r, w, env));
            a.iter().zip(&b).map(|(x, y)| *x && *y).collect()
        }
        Formula::Or(l, r) => {
            let (a, b) = (eval(l, w, env), eval(r, w, env));
            a.iter().zip(&b).map(|(x, y)| *x || *y).collect()
        }
        // On a single trace both modalities look at the unique next suffix,
        // and differ only when the head action does not match.
        Formula::Necessarily(a, b) => {
            let s = eval(b, w, env);
            (0..n).map(|i| w.action(i) != *a || s[w.succ(i)]).collect()
        }
        Formula::Possibly(a, b) => {
            let s = eval(b, w, env);
            (0..n).map(|i| w.action(i) == *a && s[w.succ(i)]).collect()
        }
        Formula::Max(x, b) | Formula::Min(x, b) => {
            let start = matches!(phi, Formula::Max(..));
            env.push((x.clone(), vec![start; n]));
            loop {
                let next = eval(b, w, env);
                let cur = &mut env.last_mut().unwrap().1;
                if *cur == next {
                    break;
                }
                *cur = next;
            }
            env.pop().unwrap().1
        }
    }
}
