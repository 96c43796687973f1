use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// Words that cannot be used as action names.
pub const RESERVED: &[&str] = &[
    "tau", "τ", "yes", "no", "end", "rec", "tt", "ff", "max", "min",
];

/// Index of an action inside its [`Alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action(pub u32);

impl Action {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An ordered, non-empty set of distinct action names.
///
/// Cloning is cheap. Two alphabets are equal when they list the same names
/// in the same order.
#[derive(Clone)]
pub struct Alphabet(Arc<Vec<String>>);

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if !valid_action_name(n) {
                return Err(Error::InvalidAlphabet(format!("`{n}` is not a valid action name")));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidAlphabet(format!("duplicate action `{n}`")));
            }
        }
        Ok(Alphabet(Arc::new(names)))
    }

    /// Parses a comma or whitespace separated list of action names.
    pub fn parse_list(text: &str) -> Result<Self> {
        Self::new(
            text.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty()),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn actions(&self) -> impl Iterator<Item = Action> + '_ {
        (0..self.0.len() as u32).map(Action)
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, a: Action) -> &str {
        &self.0[a.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<Action> {
        self.0.iter().position(|n| n == name).map(|i| Action(i as u32))
    }

    pub fn action(&self, name: &str) -> Result<Action> {
        self.lookup(name).ok_or_else(|| Error::UnknownAction(name.to_string()))
    }

    /// True when every action name is a single character.
    pub fn single_char(&self) -> bool {
        self.0.iter().all(|n| n.chars().count() == 1)
    }

    /// Returns a new alphabet with `extra` appended.
    pub fn extended(&self, extra: &[&str]) -> Result<Self> {
        Self::new(self.0.iter().cloned().chain(extra.iter().map(|s| s.to_string())))
    }

    pub fn check_same(&self, other: &Alphabet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(format!("{self} vs {other}")))
        }
    }

    /// Parses a trace. Actions may be separated by commas or whitespace; for
    /// single-character alphabets an unseparated string is also accepted.
    pub fn parse_trace(&self, text: &str) -> Result<Vec<Action>> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(Vec::new());
        }
        let parts: Vec<&str> = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let mut out = Vec::new();
        for part in parts {
            if let Some(a) = self.lookup(part) {
                out.push(a);
            } else if self.single_char() {
                for c in part.chars() {
                    let mut buf = [0u8; 4];
                    out.push(self.action(c.encode_utf8(&mut buf))?);
                }
            } else {
                return Err(Error::UnknownAction(part.to_string()));
            }
        }
        Ok(out)
    }

    /// Formats a trace; unseparated for single-character alphabets, `ε` when empty.
    pub fn format_trace(&self, t: &[Action]) -> String {
        if t.is_empty() {
            return "ε".to_string();
        }
        let sep = if self.single_char() { "" } else { " " };
        t.iter().map(|&a| self.name(a)).collect::<Vec<_>>().join(sep)
    }
}

pub fn valid_action_name(n: &str) -> bool {
    if RESERVED.contains(&n) || n.is_empty() {
        return false;
    }
    let mut chars = n.chars();
    let first = chars.next().unwrap();
    if chars.next().is_none() {
        return !first.is_whitespace() && !"().+&|,:@[]<>{}\"'".contains(first);
    }
    n.chars().all(|c| c.is_alphanumeric() || c == '_')
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.join(", "))
    }
}
