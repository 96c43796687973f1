use super::{Formula, Fragment};
use crate::automata::{Limits, Polarity};
use crate::terms::{Alphabet, Ast, Builder, Monitor, TermId, VarId, Verdict};
use crate::{Error, Result};

/// Synthesizes a monitor, choosing the rejection direction for formulas
/// without least fixpoints and the acceptance direction otherwise.
pub fn synthesize(phi: &Formula, alphabet: &Alphabet) -> Result<(Monitor, Polarity)> {
    let polarity = if phi.in_fragment(Fragment::MaxHml) { Polarity::Reject } else { Polarity::Accept };
    Ok((synthesize_with(phi, alphabet, polarity)?, polarity))
}

/// Synthesizes a monitor that rejects exactly the traces violating `phi`
/// (`Reject`, for maxHML) or accepts exactly those satisfying it (`Accept`,
/// for minHML), up to extension to infinite traces. Sums are padded so the
/// result is reactive.
pub fn synthesize_with(phi: &Formula, alphabet: &Alphabet, polarity: Polarity) -> Result<Monitor> {
    super::require_closed(phi)?;
    match polarity {
        Polarity::Reject if !phi.in_fragment(Fragment::MaxHml) => return Err(Error::WrongFragment("maxHML")),
        Polarity::Accept if !phi.in_fragment(Fragment::MinHml) => return Err(Error::WrongFragment("minHML")),
        _ => {}
    }
    let phi = guard_fixpoints(phi);
    let mut s = Synth { b: Builder::new(alphabet.clone()), polarity, scope: Vec::new() };
    let (root, _) = s.go(&phi);
    Ok(s.b.finish(root).compact())
}

struct Synth {
    b: Builder,
    polarity: Polarity,
    scope: Vec<(String, VarId)>,
}

impl Synth {
    /// Returns the term and whether it is regular.
    fn go(&mut self, phi: &Formula) -> (TermId, bool) {
        let reject = self.polarity == Polarity::Reject;
        let (success, failure) = if reject { (Verdict::End, Verdict::No) } else { (Verdict::Yes, Verdict::End) };
        match phi {
            Formula::Tt => (self.b.verdict(success), true),
            Formula::Ff => (self.b.verdict(failure), true),
            Formula::Var(x) => {
                let v = self.scope.iter().rev().find(|(y, _)| y == x).expect("closed formula").1;
                (self.b.var(v), true)
            }
            Formula::Max(x, body) | Formula::Min(x, body) => {
                let v = self.b.fresh_var(&x.to_lowercase());
                self.scope.push((x.clone(), v));
                let (t, reg) = self.go(body);
                self.scope.pop();
                (self.b.bind(v, t), reg)
            }
            Formula::Necessarily(a, body) | Formula::Possibly(a, body) => {
                let (t, reg) = self.go(body);
                let step = self.b.prefix(*a, t);
                // The modality whose failure on a mismatching head action
                // decides the verdict: `<a>` when rejecting, `[a]` when accepting.
                let strict = matches!(phi, Formula::Possibly(..)) == reject;
                let parts: Vec<TermId> = if strict {
                    let other = if reject { Verdict::No } else { Verdict::Yes };
                    let actions: Vec<_> = self.b.alphabet.actions().collect();
                    actions
                        .into_iter()
                        .map(|b| if b == *a { step } else {
                            let v = self.b.verdict(other);
                            self.b.prefix(b, v)
                        })
                        .collect()
                } else {
                    vec![step, self.b.end()]
                };
                (self.b.sum(parts).unwrap(), reg)
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                let (x, rx) = self.go(l);
                let (y, ry) = self.go(r);
                // The connective whose monitor fires when either side fires.
                let either = matches!(phi, Formula::And(..)) == reject;
                if either && rx && ry {
                    (self.b.choice(x, y), true)
                } else if matches!(phi, Formula::And(..)) {
                    (self.b.and(x, y), false)
                } else {
                    (self.b.or(x, y), false)
                }
            }
        }
    }
}

/// Replaces fixpoint variables that occur outside every modality of their
/// own body by the fixpoint's trivial solution (`tt` for max, `ff` for min),
/// innermost binders first.
fn guard_fixpoints(phi: &Formula) -> Formula {
    match phi {
        Formula::Max(x, b) | Formula::Min(x, b) => {
            let b = guard_fixpoints(b);
            let unit = if matches!(phi, Formula::Max(..)) { Formula::Tt } else { Formula::Ff };
            let b = replace_unguarded(&b, x, &unit);
            if matches!(phi, Formula::Max(..)) {
                Formula::Max(x.clone(), Box::new(b))
            } else {
                Formula::Min(x.clone(), Box::new(b))
            }
        }
        Formula::And(l, r) => Formula::and(guard_fixpoints(l), guard_fixpoints(r)),
        Formula::Or(l, r) => Formula::or(guard_fixpoints(l), guard_fixpoints(r)),
        Formula::Necessarily(a, b) => Formula::necessarily(*a, guard_fixpoints(b)),
        Formula::Possibly(a, b) => Formula::possibly(*a, guard_fixpoints(b)),
        f => f.clone(),
    }
}

fn replace_unguarded(phi: &Formula, x: &str, by: &Formula) -> Formula {
    match phi {
        Formula::Var(y) if y == x => by.clone(),
        Formula::And(l, r) => Formula::and(replace_unguarded(l, x, by), replace_unguarded(r, x, by)),
        Formula::Or(l, r) => Formula::or(replace_unguarded(l, x, by), replace_unguarded(r, x, by)),
        Formula::Max(y, b) if y != x => Formula::Max(y.clone(), Box::new(replace_unguarded(b, x, by))),
        Formula::Min(y, b) if y != x => Formula::Min(y.clone(), Box::new(replace_unguarded(b, x, by))),
        f => f.clone(),
    }
}

/// The formula whose violations (`Reject`) or models (`Accept`) are the
/// infinite extensions of the rejected (accepted) traces of `m`.
pub fn monitor_to_formula(m: &Monitor, polarity: Polarity) -> Result<Formula> {
    m.require_closed()?;
    let ast = m.to_ast(u128::MAX)?;
    Ok(simplify(&ast_to_formula(&ast, m.alphabet(), polarity)?))
}

fn ast_to_formula(ast: &Ast, ab: &Alphabet, polarity: Polarity) -> Result<Formula> {
    let reject = polarity == Polarity::Reject;
    let go = |t: &Ast| ast_to_formula(t, ab, polarity);
    Ok(match ast {
        Ast::Verdict(v) => {
            let fires = *v == polarity.verdict();
            // Rejecting: firing means violation (ff). Accepting: firing means tt.
            if fires != reject {
                Formula::Tt
            } else {
                Formula::Ff
            }
        }
        Ast::Var(x) => Formula::Var(x.to_uppercase()),
        Ast::Rec(x, b) => {
            let body = Box::new(go(b)?);
            if reject {
                Formula::Max(x.to_uppercase(), body)
            } else {
                Formula::Min(x.to_uppercase(), body)
            }
        }
        Ast::Prefix(a, c) => {
            let a = ab.action(a)?;
            if reject {
                Formula::necessarily(a, go(c)?)
            } else {
                Formula::possibly(a, go(c)?)
            }
        }
        Ast::Choice(l, r) => {
            if reject {
                Formula::and(go(l)?, go(r)?)
            } else {
                Formula::or(go(l)?, go(r)?)
            }
        }
        Ast::And(l, r) => Formula::and(go(l)?, go(r)?),
        Ast::Or(l, r) => Formula::or(go(l)?, go(r)?),
    })
}

/// Constant folding, and removal of fixpoints whose variable is unused.
pub fn simplify(phi: &Formula) -> Formula {
    match phi {
        Formula::And(l, r) => match (simplify(l), simplify(r)) {
            (Formula::Ff, _) | (_, Formula::Ff) => Formula::Ff,
            (Formula::Tt, x) | (x, Formula::Tt) => x,
            (x, y) if x == y => x,
            (x, y) => Formula::and(x, y),
        },
        Formula::Or(l, r) => match (simplify(l), simplify(r)) {
            (Formula::Tt, _) | (_, Formula::Tt) => Formula::Tt,
            (Formula::Ff, x) | (x, Formula::Ff) => x,
            (x, y) if x == y => x,
            (x, y) => Formula::or(x, y),
        },
        Formula::Necessarily(a, b) => match simplify(b) {
            Formula::Tt => Formula::Tt,
            x => Formula::necessarily(*a, x),
        },
        Formula::Possibly(a, b) => match simplify(b) {
            Formula::Ff => Formula::Ff,
            x => Formula::possibly(*a, x),
        },
        Formula::Max(x, b) | Formula::Min(x, b) => {
            let body = simplify(b);
            if !body.free_vars().contains(x) {
                body
            } else if matches!(phi, Formula::Max(..)) {
                Formula::Max(x.clone(), Box::new(body))
            } else {
                Formula::Min(x.clone(), Box::new(body))
            }
        }
        f => f.clone(),
    }
}

/// Rewrites a maxHML formula into an equivalent sHML formula by way of its
/// parallel rejection monitor and the equivalent regular monitor.
pub fn translate_max_to_safety(phi: &Formula, alphabet: &Alphabet, limits: &Limits) -> Result<Formula> {
    if !phi.in_fragment(Fragment::MaxHml) {
        return Err(Error::WrongFragment("maxHML"));
    }
    let m = synthesize_with(phi, alphabet, Polarity::Reject)?;
    let regular = crate::transform::parallel_to_regular(&m, limits)?.monitor;
    let out = monitor_to_formula(&regular, Polarity::Reject)?;
    assert!(out.in_fragment(Fragment::Shml), "regular rejection monitors yield sHML formulas");
    Ok(out)
}
