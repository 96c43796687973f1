//! Trace enumeration and seeded random generation of monitors and formulas.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::logic::{Formula, Fragment, Lasso};
use crate::terms::{validate, Action, Alphabet, Ast, Monitor, Verdict};
use crate::transform::pad;

/// Every trace of length at most `max_len`, shortest first, then in
/// alphabet order.
pub fn all_traces(alphabet: &Alphabet, max_len: usize) -> Vec<Vec<Action>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for t in &layer {
            for a in alphabet.actions() {
                let mut u: Vec<Action> = t.clone();
                u.push(a);
                next.push(u);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Every lasso `(u, v)` with `|u| ≤ max_u` and `1 ≤ |v| ≤ max_v`.
pub fn all_lassos(alphabet: &Alphabet, max_u: usize, max_v: usize) -> Vec<Lasso> {
    let vs: Vec<Vec<Action>> = all_traces(alphabet, max_v).into_iter().filter(|v| !v.is_empty()).collect();
    let mut out = Vec::new();
    for u in all_traces(alphabet, max_u) {
        for v in &vs {
            out.push(Lasso::new(u.clone(), v.clone()).expect("non-empty loop"));
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_trace<R: Rng>(rng: &mut R, alphabet: &Alphabet, max_len: usize) -> Vec<Action> {
    let len = rng.random_range(0..=max_len);
    (0..len)
        .map(|_| Action(rng.random_range(0..alphabet.len()) as u32))
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct MonitorShape {
    pub max_size: u128,
    pub max_depth: u32,
    pub parallel: bool,
}

impl Default for MonitorShape {
    fn default() -> Self {
        MonitorShape { max_size: 25, max_depth: 5, parallel: true }
    }
}

struct MonitorGen<'a, R> {
    rng: &'a mut R,
    alphabet: &'a Alphabet,
    shape: MonitorShape,
    vars: Vec<String>,
}

impl<R: Rng> MonitorGen<'_, R> {
    fn verdict(&mut self) -> Ast {
        let v = *[Verdict::Yes, Verdict::No, Verdict::End, Verdict::End].choose(self.rng).unwrap();
        Ast::Verdict(v)
    }

    fn action(&mut self) -> String {
        self.alphabet.names().choose(self.rng).unwrap().clone()
    }

    fn term(&mut self, depth: u32, guarded: bool) -> Ast {
        if depth == 0 {
            if guarded && !self.vars.is_empty() && self.rng.random_bool(0.5) {
                return Ast::Var(self.vars.choose(self.rng).unwrap().clone());
            }
            return self.verdict();
        }
        let roll = self.rng.random_range(0..100);
        match roll {
            0..=14 => self.verdict(),
            15..=24 if guarded && !self.vars.is_empty() => Ast::Var(self.vars.choose(self.rng).unwrap().clone()),
            15..=54 => {
                let a = self.action();
                let c = self.term(depth - 1, true);
                let mut t = Ast::Prefix(a, Box::new(c));
                if self.rng.random_bool(0.5) {
                    let b = self.action();
                    let d = self.term(depth - 1, true);
                    t = Ast::Choice(Box::new(t), Box::new(Ast::Prefix(b, Box::new(d))));
                }
                t
            }
            55..=74 => {
                let name = format!("x{}", self.vars.len());
                self.vars.push(name.clone());
                let body = self.term(depth - 1, false);
                self.vars.pop();
                Ast::Rec(name, Box::new(body))
            }
            _ if self.shape.parallel => {
                let l = self.term(depth - 1, guarded);
                let r = self.term(depth - 1, guarded);
                if self.rng.random_bool(0.5) {
                    Ast::And(Box::new(l), Box::new(r))
                } else {
                    Ast::Or(Box::new(l), Box::new(r))
                }
            }
            _ => {
                let a = self.action();
                let c = self.term(depth - 1, true);
                Ast::Prefix(a, Box::new(c))
            }
        }
    }
}

/// A random closed monitor whose sums are padded with `end`, so that it is
/// syntactically reactive, and whose size is within `shape.max_size`.
pub fn random_monitor<R: Rng>(rng: &mut R, alphabet: &Alphabet, shape: MonitorShape) -> Monitor {
    loop {
        let depth = rng.random_range(1..=shape.max_depth);
        let mut g = MonitorGen { rng: &mut *rng, alphabet, shape, vars: vec![] };
        let ast = g.term(depth, false);
        let m = pad(&ast.to_monitor(alphabet).expect("generated terms are well formed"));
        if m.size() <= shape.max_size && validate(&m).syntactically_reactive {
            return m;
        }
    }
}

/// `count` monitors from a fixed seed, alternating regular and parallel.
pub fn monitor_corpus(alphabet: &Alphabet, count: usize, seed: u64) -> Vec<Monitor> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let shape = MonitorShape { parallel: i % 2 == 1, ..MonitorShape::default() };
            random_monitor(&mut r, alphabet, shape)
        })
        .collect()
}

struct FormulaGen<'a, R> {
    rng: &'a mut R,
    alphabet: &'a Alphabet,
    fragment: Fragment,
    vars: Vec<String>,
}

impl<R: Rng> FormulaGen<'_, R> {
    fn leaf(&mut self) -> Formula {
        if !self.vars.is_empty() && self.rng.random_bool(0.4) {
            return Formula::Var(self.vars.choose(self.rng).unwrap().clone());
        }
        if self.rng.random_bool(0.5) {
            Formula::Tt
        } else {
            Formula::Ff
        }
    }

    fn formula(&mut self, depth: u32) -> Formula {
        if depth == 0 || self.rng.random_bool(0.15) {
            return self.leaf();
        }
        let a = Action(self.rng.random_range(0..self.alphabet.len()) as u32);
        let (box_ok, dia_ok, and_ok, or_ok) = match self.fragment {
            Fragment::Shml => (true, false, true, false),
            Fragment::Chml => (false, true, false, true),
            Fragment::MaxHml | Fragment::MinHml => (true, true, true, true),
        };
        loop {
            match self.rng.random_range(0..5) {
                0 if box_ok => return Formula::necessarily(a, self.formula(depth - 1)),
                1 if dia_ok => return Formula::possibly(a, self.formula(depth - 1)),
                2 if and_ok => {
                    let l = self.formula(depth - 1);
                    return Formula::and(l, self.formula(depth - 1));
                }
                3 if or_ok => {
                    let l = self.formula(depth - 1);
                    return Formula::or(l, self.formula(depth - 1));
                }
                4 => {
                    let name = ["X", "Y", "Z", "W", "V"][self.vars.len() % 5].to_string();
                    let name = if self.vars.contains(&name) { format!("{name}{}", self.vars.len()) } else { name };
                    self.vars.push(name.clone());
                    let body = Box::new(self.formula(depth - 1));
                    self.vars.pop();
                    return match self.fragment {
                        Fragment::Shml | Fragment::MaxHml => Formula::Max(name, body),
                        Fragment::Chml | Fragment::MinHml => Formula::Min(name, body),
                    };
                }
                _ => {}
            }
        }
    }
}

/// A random closed formula of the fragment with nesting depth at most
/// `max_depth`.
pub fn random_formula<R: Rng>(rng: &mut R, alphabet: &Alphabet, fragment: Fragment, max_depth: u32) -> Formula {
    let mut g = FormulaGen { rng, alphabet, fragment, vars: vec![] };
    let f = g.formula(max_depth);
    debug_assert!(f.in_fragment(fragment));
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn trace_enumeration() {
        let t = all_traces(&ab(), 2);
        assert_eq!(t.len(), 7);
        assert_eq!(ab().format_trace(&t[3]), "aa");
        assert_eq!(all_lassos(&ab(), 3, 3).len(), 15 * 14);
    }

    #[test]
    fn corpus_is_reproducible_and_bounded() {
        let x = monitor_corpus(&ab(), 40, 7);
        let y = monitor_corpus(&ab(), 40, 7);
        assert_eq!(x.iter().map(|m| m.to_string()).collect::<Vec<_>>(), y.iter().map(|m| m.to_string()).collect::<Vec<_>>());
        for m in &x {
            assert!(m.size() <= 25 && m.is_closed());
        }
        assert!(x.iter().any(|m| !m.is_regular()));
    }

    #[test]
    fn formulas_stay_in_fragment() {
        let mut r = rng(3);
        for f in Fragment::ALL {
            for _ in 0..50 {
                let phi = random_formula(&mut r, &ab(), f, 5);
                assert!(phi.in_fragment(f));
                assert!(phi.free_vars().is_empty());
            }
        }
    }
}
