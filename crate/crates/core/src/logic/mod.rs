//! recHML formulas: syntax, fragments, linear-time evaluation on lasso
//! traces, and synthesis of monitors from formulas and back.

mod eval;
mod synth;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::terms::doc::{Document, NodeDoc, VERSION};
use crate::terms::{Action, Alphabet, Parser, Token};
use crate::{Error, Result};

pub use eval::{eval_formula_lasso, Lasso};
pub use synth::{monitor_to_formula, simplify, synthesize, synthesize_with, translate_max_to_safety};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Tt,
    Ff,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// `[a]φ`: every `a`-step satisfies φ.
    Necessarily(Action, Box<Formula>),
    /// `<a>φ`: some `a`-step satisfies φ.
    Possibly(Action, Box<Formula>),
    Min(String, Box<Formula>),
    Max(String, Box<Formula>),
    Var(String),
}

/// Membership in the syntactic fragments of recHML.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Fragments {
    /// `tt | ff | φ∧ψ | [a]φ | max X.φ | X`
    pub shml: bool,
    /// `tt | ff | φ∨ψ | <a>φ | min X.φ | X`
    pub chml: bool,
    /// No least fixpoints.
    pub max_hml: bool,
    /// No greatest fixpoints.
    pub min_hml: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fragment {
    Shml,
    Chml,
    MaxHml,
    MinHml,
}

impl Fragment {
    pub const ALL: [Fragment; 4] = [Fragment::Shml, Fragment::Chml, Fragment::MaxHml, Fragment::MinHml];

    pub fn name(self) -> &'static str {
        match self {
            Fragment::Shml => "sHML",
            Fragment::Chml => "cHML",
            Fragment::MaxHml => "maxHML",
            Fragment::MinHml => "minHML",
        }
    }
}

impl Fragments {
    pub fn contains(&self, f: Fragment) -> bool {
        match f {
            Fragment::Shml => self.shml,
            Fragment::Chml => self.chml,
            Fragment::MaxHml => self.max_hml,
            Fragment::MinHml => self.min_hml,
        }
    }
}

impl Formula {
    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn necessarily(a: Action, f: Formula) -> Formula {
        Formula::Necessarily(a, Box::new(f))
    }

    pub fn possibly(a: Action, f: Formula) -> Formula {
        Formula::Possibly(a, Box::new(f))
    }

    pub fn fragments(&self) -> Fragments {
        let mut fr = Fragments { shml: true, chml: true, max_hml: true, min_hml: true };
        self.visit(&mut |f| match f {
            Formula::And(..) | Formula::Necessarily(..) => fr.chml = false,
            Formula::Or(..) | Formula::Possibly(..) => fr.shml = false,
            Formula::Max(..) => {
                fr.chml = false;
                fr.min_hml = false;
            }
            Formula::Min(..) => {
                fr.shml = false;
                fr.max_hml = false;
            }
            _ => {}
        });
        fr
    }

    pub fn in_fragment(&self, f: Fragment) -> bool {
        self.fragments().contains(f)
    }

    fn visit(&self, f: &mut dyn FnMut(&Formula)) {
        f(self);
        match self {
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            Formula::Necessarily(_, b) | Formula::Possibly(_, b) | Formula::Min(_, b) | Formula::Max(_, b) => {
                b.visit(f)
            }
            _ => {}
        }
    }

    /// Symbol count: constants and variables 1, binary operators
    /// `l+l+1`, modalities `2+l`, fixpoints `3+l`.
    pub fn size(&self) -> u128 {
        match self {
            Formula::Tt | Formula::Ff | Formula::Var(_) => 1,
            Formula::And(l, r) | Formula::Or(l, r) => l.size() + r.size() + 1,
            Formula::Necessarily(_, b) | Formula::Possibly(_, b) => 2 + b.size(),
            Formula::Min(_, b) | Formula::Max(_, b) => 3 + b.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(x) if !bound.contains(x) => {
                out.insert(x.clone());
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Necessarily(_, b) | Formula::Possibly(_, b) => b.collect_free(bound, out),
            Formula::Min(x, b) | Formula::Max(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            _ => {}
        }
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> FormulaText<'a> {
        FormulaText { f: self, alphabet }
    }

    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        self.display(alphabet).to_string()
    }

    pub fn to_doc(&self, alphabet: &Alphabet) -> NodeDoc {
        let named = |kind: &str, a: &Action, b: &Formula| NodeDoc {
            action: Some(alphabet.name(*a).to_string()),
            ..NodeDoc::with_children(kind, vec![b.to_doc(alphabet)])
        };
        let bound = |kind: &str, x: &str, b: &Formula| NodeDoc {
            var: Some(x.to_string()),
            ..NodeDoc::with_children(kind, vec![b.to_doc(alphabet)])
        };
        match self {
            Formula::Tt => NodeDoc::leaf("tt"),
            Formula::Ff => NodeDoc::leaf("ff"),
            Formula::Var(x) => NodeDoc { var: Some(x.clone()), ..NodeDoc::leaf("var") },
            Formula::And(l, r) => NodeDoc::with_children("and", vec![l.to_doc(alphabet), r.to_doc(alphabet)]),
            Formula::Or(l, r) => NodeDoc::with_children("or", vec![l.to_doc(alphabet), r.to_doc(alphabet)]),
            Formula::Necessarily(a, b) => named("box", a, b),
            Formula::Possibly(a, b) => named("diamond", a, b),
            Formula::Max(x, b) => bound("max", x, b),
            Formula::Min(x, b) => bound("min", x, b),
        }
    }

    pub fn from_doc(d: &NodeDoc, alphabet: &Alphabet) -> Result<Formula> {
        let sub = |i, n| -> Result<Box<Formula>> { Ok(Box::new(Formula::from_doc(d.child(i, n)?, alphabet)?)) };
        Ok(match d.kind.as_str() {
            "tt" => Formula::Tt,
            "ff" => Formula::Ff,
            "var" => Formula::Var(d.field(&d.var, "var")?.to_string()),
            "and" => Formula::And(sub(0, 2)?, sub(1, 2)?),
            "or" => Formula::Or(sub(0, 2)?, sub(1, 2)?),
            "box" => Formula::Necessarily(alphabet.action(d.field(&d.action, "action")?)?, sub(0, 1)?),
            "diamond" => Formula::Possibly(alphabet.action(d.field(&d.action, "action")?)?, sub(0, 1)?),
            "max" => Formula::Max(d.field(&d.var, "var")?.to_string(), sub(0, 1)?),
            "min" => Formula::Min(d.field(&d.var, "var")?.to_string(), sub(0, 1)?),
            k => return Err(Error::Document(format!("unknown formula node kind `{k}`"))),
        })
    }

    pub fn to_document(&self, alphabet: &Alphabet) -> Document {
        Document {
            format: "formula".into(),
            version: VERSION,
            alphabet: alphabet.names().to_vec(),
            term: self.to_doc(alphabet),
        }
    }

    pub fn from_document(doc: &Document) -> Result<(Formula, Alphabet)> {
        if doc.format != "formula" {
            return Err(Error::Document(format!("expected a formula document, found `{}`", doc.format)));
        }
        let alphabet = Alphabet::new(doc.alphabet.iter().cloned())?;
        let f = Formula::from_doc(&doc.term, &alphabet)?;
        require_closed(&f)?;
        Ok((f, alphabet))
    }
}

fn require_closed(f: &Formula) -> Result<()> {
    match f.free_vars().into_iter().next() {
        Some(x) => Err(Error::OpenTerm(x)),
        None => Ok(()),
    }
}

pub struct FormulaText<'a> {
    f: &'a Formula,
    alphabet: &'a Alphabet,
}

impl FormulaText<'_> {
    /// Levels: 0 disjunction, 1 conjunction, 2 unary.
    fn write_at(&self, f: &Formula, out: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let level = match f {
            Formula::Or(..) => 0,
            Formula::And(..) => 1,
            _ => 2,
        };
        if level < min {
            out.write_str("(")?;
            self.write_at(f, out, 0)?;
            return out.write_str(")");
        }
        let name = |a: &Action| self.alphabet.name(*a);
        match f {
            Formula::Tt => out.write_str("tt"),
            Formula::Ff => out.write_str("ff"),
            Formula::Var(x) => out.write_str(x),
            Formula::Or(l, r) => {
                self.write_at(l, out, 0)?;
                out.write_str(" || ")?;
                self.write_at(r, out, 1)
            }
            Formula::And(l, r) => {
                self.write_at(l, out, 1)?;
                out.write_str(" && ")?;
                self.write_at(r, out, 2)
            }
            Formula::Necessarily(a, b) => {
                write!(out, "[{}]", name(a))?;
                self.write_at(b, out, 2)
            }
            Formula::Possibly(a, b) => {
                write!(out, "<{}>", name(a))?;
                self.write_at(b, out, 2)
            }
            Formula::Max(x, b) => {
                write!(out, "max {x}.")?;
                self.write_at(b, out, 2)
            }
            Formula::Min(x, b) => {
                write!(out, "min {x}.")?;
                self.write_at(b, out, 2)
            }
        }
    }
}

impl fmt::Display for FormulaText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(self.f, f, 0)
    }
}

/// Parses formula text over the given alphabet. Free variables are errors.
pub fn parse_formula(text: &str, alphabet: &Alphabet) -> Result<Formula> {
    let mut p = Parser::new(text)?;
    if let Some(names) = p.alphabet_header()? {
        alphabet.check_same(&Alphabet::new(names)?)?;
    }
    let f = formula_or(&mut p, alphabet)?;
    p.expect_eof()?;
    require_closed(&f)?;
    Ok(f)
}

/// Parses formula text, taking the alphabet from an `@alphabet` header or
/// from the sorted set of actions in the modalities.
pub fn parse_formula_infer(text: &str) -> Result<(Formula, Alphabet)> {
    let mut p = Parser::new(text)?;
    let header = p.alphabet_header()?;
    let alphabet = match header {
        Some(names) => Alphabet::new(names)?,
        None => {
            // Collect modality actions from the token stream.
            let mut q = Parser::new(text)?;
            let mut acts = BTreeSet::new();
            loop {
                match q.next() {
                    Token::Eof => break,
                    Token::LBracket | Token::Lt => {
                        if let Ok(a) = q.action_name() {
                            acts.insert(a);
                        }
                    }
                    _ => {}
                }
            }
            if acts.is_empty() {
                return Err(Error::InvalidAlphabet("no actions occur in the formula; supply an alphabet".into()));
            }
            Alphabet::new(acts)?
        }
    };
    let f = formula_or(&mut p, &alphabet)?;
    p.expect_eof()?;
    require_closed(&f)?;
    Ok((f, alphabet))
}

fn formula_or(p: &mut Parser, ab: &Alphabet) -> Result<Formula> {
    let mut left = formula_and(p, ab)?;
    while *p.peek() == Token::OrOr {
        p.next();
        left = Formula::or(left, formula_and(p, ab)?);
    }
    Ok(left)
}

fn formula_and(p: &mut Parser, ab: &Alphabet) -> Result<Formula> {
    let mut left = formula_unary(p, ab)?;
    while *p.peek() == Token::AndAnd {
        p.next();
        left = Formula::and(left, formula_unary(p, ab)?);
    }
    Ok(left)
}

fn formula_unary(p: &mut Parser, ab: &Alphabet) -> Result<Formula> {
    match p.peek().clone() {
        Token::LBracket => {
            p.next();
            let a = ab.action(&p.action_name()?)?;
            p.expect(Token::RBracket, "`]`")?;
            Ok(Formula::necessarily(a, formula_unary(p, ab)?))
        }
        Token::Lt => {
            p.next();
            let a = ab.action(&p.action_name()?)?;
            p.expect(Token::Gt, "`>`")?;
            Ok(Formula::possibly(a, formula_unary(p, ab)?))
        }
        Token::Word(w) if w == "max" || w == "min" => {
            p.next();
            let x = p.ident("a fixpoint variable")?;
            p.expect(Token::Dot, "`.`")?;
            let body = Box::new(formula_unary(p, ab)?);
            Ok(if w == "max" { Formula::Max(x, body) } else { Formula::Min(x, body) })
        }
        Token::Word(w) if w == "tt" => {
            p.next();
            Ok(Formula::Tt)
        }
        Token::Word(w) if w == "ff" => {
            p.next();
            Ok(Formula::Ff)
        }
        Token::Word(_) => Ok(Formula::Var(p.ident("a formula")?)),
        Token::LParen => {
            p.next();
            let f = formula_or(p, ab)?;
            p.expect(Token::RParen, "`)`")?;
            Ok(f)
        }
        _ => p.error("expected a formula"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn fragments_of_examples() {
        let f = parse_formula("max X.([a]X && [b]ff)", &ab()).unwrap();
        let fr = f.fragments();
        assert!(fr.shml && fr.max_hml && !fr.chml);
        let g = parse_formula("<a>tt || ff", &ab()).unwrap();
        let fr = g.fragments();
        assert!(fr.chml && fr.min_hml && !fr.shml);
    }

    #[test]
    fn free_variables_are_errors() {
        assert_eq!(parse_formula("[a]X", &ab()).unwrap_err(), Error::OpenTerm("X".into()));
    }

    #[test]
    fn printing_round_trips() {
        for s in ["max X.([a]X && [b]ff)", "<a>tt || ff", "[a](tt || ff) && <b>min Y.<a>Y"] {
            let f = parse_formula(s, &ab()).unwrap();
            let text = f.to_text(&ab());
            assert_eq!(text, s);
            assert_eq!(parse_formula(&text, &ab()).unwrap(), f);
        }
        let (f, alpha) = parse_formula_infer("[x]ff && <y>tt").unwrap();
        assert_eq!(alpha.names(), ["x", "y"]);
        assert_eq!(f.size(), 7);
    }

    #[test]
    fn document_round_trip() {
        let f = parse_formula("max X.([a]X && <b>ff)", &ab()).unwrap();
        let doc = f.to_document(&ab());
        let (g, alpha) = Formula::from_document(&doc).unwrap();
        assert_eq!(g, f);
        assert_eq!(alpha, ab());
    }
}
