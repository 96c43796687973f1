use std::fmt;

use super::Verdict;

/// Owned syntax tree of a monitor with named actions and variables.
///
/// This is the interchange form between the term store and the text and
/// document formats.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ast {
    Verdict(Verdict),
    Prefix(String, Box<Ast>),
    Choice(Box<Ast>, Box<Ast>),
    Rec(String, Box<Ast>),
    Var(String),
    And(Box<Ast>, Box<Ast>),
    Or(Box<Ast>, Box<Ast>),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Par,
    Choice,
    Prefix,
}

impl Ast {
    fn level(&self) -> Level {
        match self {
            Ast::And(..) | Ast::Or(..) => Level::Par,
            Ast::Choice(..) => Level::Choice,
            _ => Level::Prefix,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: Level) -> fmt::Result {
        if self.level() < min {
            f.write_str("(")?;
            self.write_at(f, Level::Par)?;
            return f.write_str(")");
        }
        match self {
            Ast::Verdict(v) => f.write_str(v.keyword()),
            Ast::Var(x) => f.write_str(x),
            Ast::Prefix(a, c) => {
                write!(f, "{a}.")?;
                c.write_at(f, Level::Prefix)
            }
            Ast::Rec(x, b) => {
                write!(f, "rec {x}.")?;
                b.write_at(f, Level::Prefix)
            }
            Ast::Choice(l, r) => {
                l.write_at(f, Level::Choice)?;
                f.write_str(" + ")?;
                r.write_at(f, Level::Prefix)
            }
            Ast::And(l, r) | Ast::Or(l, r) => {
                if matches!(**l, Ast::Choice(..)) {
                    l.write_at(f, Level::Prefix)?;
                } else {
                    l.write_at(f, Level::Par)?;
                }
                f.write_str(if matches!(self, Ast::And(..)) { " & " } else { " | " })?;
                r.write_at(f, Level::Prefix)
            }
        }
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, Level::Par)
    }
}
