use std::collections::BTreeSet;

use super::{valid_action_name, Alphabet, Ast, Monitor, TermId, TermStore, Verdict, VarId};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Token {
    /// Alphanumeric word (`a`, `rec`, `x1`, `0`).
    Word(String),
    /// Any other single character usable as an action name (`#`, `$`).
    Sym(char),
    Dot,
    Plus,
    Amp,
    Bar,
    AndAnd,
    OrOr,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lt,
    Gt,
    At,
    Comma,
    Eof,
}

/// Tokenizer shared by the monitor and formula grammars. Positions are
/// character offsets into the input.
pub struct Lexer {
    tokens: Vec<(Token, usize)>,
}

impl Lexer {
    pub fn new(text: &str) -> Result<Self> {
        let chars: Vec<char> = text.chars().collect();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '/' && chars.get(i + 1) == Some(&'/') {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            let start = i;
            if c.is_alphanumeric() || c == '_' {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push((Token::Word(chars[start..i].iter().collect()), start));
                continue;
            }
            let next = chars.get(i + 1).copied();
            let (tok, len) = match (c, next) {
                ('&', Some('&')) => (Token::AndAnd, 2),
                ('|', Some('|')) => (Token::OrOr, 2),
                ('.', _) => (Token::Dot, 1),
                ('+', _) => (Token::Plus, 1),
                ('&', _) => (Token::Amp, 1),
                ('|', _) => (Token::Bar, 1),
                ('(', _) => (Token::LParen, 1),
                (')', _) => (Token::RParen, 1),
                ('[', _) => (Token::LBracket, 1),
                (']', _) => (Token::RBracket, 1),
                ('<', _) => (Token::Lt, 1),
                ('>', _) => (Token::Gt, 1),
                ('@', _) => (Token::At, 1),
                (',', _) => (Token::Comma, 1),
                (c, _) if valid_action_name(&c.to_string()) => (Token::Sym(c), 1),
                (c, _) => {
                    return Err(Error::Syntax { pos: i, msg: format!("unexpected character `{c}`") })
                }
            };
            tokens.push((tok, start));
            i += len;
        }
        tokens.push((Token::Eof, chars.len()));
        Ok(Lexer { tokens })
    }
}

/// Cursor over a token list.
pub(crate) struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Self> {
        Ok(Parser { tokens: Lexer::new(text)?.tokens, pos: 0 })
    }

    pub(crate) fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    pub(crate) fn peek2(&self) -> &Token {
        &self.tokens[(self.pos + 1).min(self.tokens.len() - 1)].0
    }

    pub(crate) fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    pub(crate) fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let msg = msg.into();
        let msg = if *self.peek() == Token::Eof { format!("{msg} at end of input") } else { msg };
        Err(Error::Syntax { pos: self.offset(), msg })
    }

    pub(crate) fn expect(&mut self, t: Token, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    pub(crate) fn expect_eof(&self) -> Result<()> {
        if *self.peek() == Token::Eof {
            Ok(())
        } else {
            self.error("unexpected trailing input")
        }
    }

    pub(crate) fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Token::Word(w) if w == kw)
    }

    /// An action name: a word or symbol that is a legal action.
    pub(crate) fn action_name(&mut self) -> Result<String> {
        let name = match self.peek() {
            Token::Word(w) => w.clone(),
            Token::Sym(c) => c.to_string(),
            _ => return self.error("expected an action"),
        };
        if name == "tau" || name == "τ" {
            return self.error("the silent action cannot be used as an action");
        }
        if !valid_action_name(&name) {
            return self.error(format!("`{name}` is not a valid action name"));
        }
        self.next();
        Ok(name)
    }

    pub(crate) fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek().clone() {
            Token::Word(w) if !super::RESERVED.contains(&w.as_str()) => {
                self.next();
                Ok(w)
            }
            _ => self.error(format!("expected {what}")),
        }
    }

    /// Optional `@alphabet a, b, c` header.
    pub(crate) fn alphabet_header(&mut self) -> Result<Option<Vec<String>>> {
        if *self.peek() != Token::At {
            return Ok(None);
        }
        self.next();
        if !self.is_keyword("alphabet") {
            return self.error("expected `alphabet` after `@`");
        }
        self.next();
        let mut names = vec![self.action_name()?];
        while *self.peek() == Token::Comma {
            self.next();
            names.push(self.action_name()?);
        }
        Ok(Some(names))
    }

    fn monitor(&mut self) -> Result<Ast> {
        let mut left = self.choice()?;
        loop {
            match self.peek() {
                Token::Amp => {
                    self.next();
                    left = Ast::And(Box::new(left), Box::new(self.choice()?));
                }
                Token::Bar => {
                    self.next();
                    left = Ast::Or(Box::new(left), Box::new(self.choice()?));
                }
                _ => return Ok(left),
            }
        }
    }

    fn choice(&mut self) -> Result<Ast> {
        let mut left = self.prefix()?;
        while *self.peek() == Token::Plus {
            self.next();
            left = Ast::Choice(Box::new(left), Box::new(self.prefix()?));
        }
        Ok(left)
    }

    fn prefix(&mut self) -> Result<Ast> {
        if self.is_keyword("rec") {
            self.next();
            let x = self.ident("a recursion variable")?;
            self.expect(Token::Dot, "`.`")?;
            return Ok(Ast::Rec(x, Box::new(self.prefix()?)));
        }
        let is_action = matches!(self.peek(), Token::Word(_) | Token::Sym(_))
            && *self.peek2() == Token::Dot;
        if is_action {
            let a = self.action_name()?;
            self.next();
            return Ok(Ast::Prefix(a, Box::new(self.prefix()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Ast> {
        match self.peek().clone() {
            Token::LParen => {
                self.next();
                let m = self.monitor()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(m)
            }
            Token::Word(w) => match w.as_str() {
                "yes" => {
                    self.next();
                    Ok(Ast::Verdict(Verdict::Yes))
                }
                "no" => {
                    self.next();
                    Ok(Ast::Verdict(Verdict::No))
                }
                "end" => {
                    self.next();
                    Ok(Ast::Verdict(Verdict::End))
                }
                _ => Ok(Ast::Var(self.ident("a monitor")?)),
            },
            _ => self.error("expected a monitor"),
        }
    }
}

/// Parses monitor text over the given alphabet. An `@alphabet` header, if
/// present, must agree with `alphabet`.
pub fn parse_monitor(text: &str, alphabet: &Alphabet) -> Result<Monitor> {
    let mut p = Parser::new(text)?;
    if let Some(names) = p.alphabet_header()? {
        alphabet.check_same(&Alphabet::new(names)?)?;
    }
    let ast = p.monitor()?;
    p.expect_eof()?;
    ast.to_monitor(alphabet)
}

/// Parses monitor text, taking the alphabet from an `@alphabet` header or,
/// failing that, from the sorted set of actions occurring in the term.
pub fn parse_monitor_infer(text: &str) -> Result<Monitor> {
    let mut p = Parser::new(text)?;
    let header = p.alphabet_header()?;
    let ast = p.monitor()?;
    p.expect_eof()?;
    let alphabet = match header {
        Some(names) => Alphabet::new(names)?,
        None => {
            let mut acts = BTreeSet::new();
            ast.collect_actions(&mut acts);
            if acts.is_empty() {
                return Err(Error::InvalidAlphabet(
                    "no actions occur in the term; supply an alphabet".into(),
                ));
            }
            Alphabet::new(acts)?
        }
    };
    ast.to_monitor(&alphabet)
}

impl Ast {
    pub fn collect_actions(&self, out: &mut BTreeSet<String>) {
        match self {
            Ast::Verdict(_) | Ast::Var(_) => {}
            Ast::Prefix(a, c) => {
                out.insert(a.clone());
                c.collect_actions(out);
            }
            Ast::Rec(_, b) => b.collect_actions(out),
            Ast::Choice(l, r) | Ast::And(l, r) | Ast::Or(l, r) => {
                l.collect_actions(out);
                r.collect_actions(out);
            }
        }
    }

    /// Resolves names and interns the tree. Every `rec` gets its own
    /// variable, so shadowed or repeated binder names are renamed implicitly.
    pub fn to_monitor(&self, alphabet: &Alphabet) -> Result<Monitor> {
        let mut store = TermStore::new();
        let mut scope = Vec::new();
        let mut free = Vec::new();
        let root = self.intern(alphabet, &mut store, &mut scope, &mut free)?;
        Ok(Monitor::new(alphabet.clone(), store, root))
    }

    fn intern(
        &self,
        alphabet: &Alphabet,
        store: &mut TermStore,
        scope: &mut Vec<(String, VarId)>,
        free: &mut Vec<(String, VarId)>,
    ) -> Result<TermId> {
        Ok(match self {
            Ast::Verdict(v) => store.verdict(*v),
            Ast::Prefix(a, c) => {
                let a = alphabet.action(a)?;
                let c = c.intern(alphabet, store, scope, free)?;
                store.prefix(a, c)
            }
            Ast::Choice(l, r) => {
                let l = l.intern(alphabet, store, scope, free)?;
                let r = r.intern(alphabet, store, scope, free)?;
                store.choice(l, r)
            }
            Ast::And(l, r) => {
                let l = l.intern(alphabet, store, scope, free)?;
                let r = r.intern(alphabet, store, scope, free)?;
                store.and(l, r)
            }
            Ast::Or(l, r) => {
                let l = l.intern(alphabet, store, scope, free)?;
                let r = r.intern(alphabet, store, scope, free)?;
                store.or(l, r)
            }
            Ast::Rec(x, b) => {
                let v = store.fresh_var(x);
                scope.push((x.clone(), v));
                let body = b.intern(alphabet, store, scope, free);
                scope.pop();
                store.bind(v, body?)
            }
            Ast::Var(x) => {
                let v = match scope.iter().rev().find(|(n, _)| n == x) {
                    Some(&(_, v)) => v,
                    None => match free.iter().find(|(n, _)| n == x) {
                        Some(&(_, v)) => v,
                        None => {
                            let v = store.fresh_var(x);
                            free.push((x.clone(), v));
                            v
                        }
                    },
                };
                store.var(v)
            }
        })
    }
}
