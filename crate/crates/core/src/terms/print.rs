use std::collections::{HashMap, HashSet};

use super::{Ast, Monitor, Node, TermId, VarId};
use crate::{Error, Result};

/// Expands the shared term into a tree, keeping each binder's own name when
/// it occurs exactly once in the expansion and renaming the others to fresh
/// `x0, x1, ...` in print order.
pub(super) fn to_ast(m: &Monitor, limit: u128) -> Result<Ast> {
    let store = m.store();
    let root = m.root();
    let sizes = store.sizes(root);
    if sizes[root.index()] > limit {
        return Err(Error::ResourceLimit(format!(
            "term expands to {} symbols (limit {limit})",
            sizes[root.index()]
        )));
    }
    let reach = store.reachable(root);
    let mut used: HashSet<String> = HashSet::new();
    for &id in &reach {
        match store.node(id) {
            Node::Rec(v, _) | Node::Var(v) => {
                used.insert(store.var_info(v).name.clone());
            }
            _ => {}
        }
    }
    let mut printer = Printer {
        m,
        name_count: HashMap::new(),
        counting: true,
        symbols: 0,
        limit,
        used: used.clone(),
        next_fresh: 0,
        scope: Vec::new(),
    };
    printer.expand(root)?;
    printer.counting = false;
    printer.used = used;
    printer.next_fresh = 0;
    printer.expand(root)
}

/// A variable whose binder lies outside the printed subterm is printed as
/// the binder itself, which is the term the variable stands for.
struct Printer<'a> {
    m: &'a Monitor,
    name_count: HashMap<String, u128>,
    counting: bool,
    symbols: u128,
    limit: u128,
    used: HashSet<String>,
    next_fresh: usize,
    scope: Vec<(VarId, String)>,
}

impl Printer<'_> {
    fn fresh(&mut self) -> String {
        loop {
            let name = format!("x{}", self.next_fresh);
            self.next_fresh += 1;
            if !self.used.contains(&name) {
                self.used.insert(name.clone());
                return name;
            }
        }
    }

    fn expand(&mut self, id: TermId) -> Result<Ast> {
        let store = self.m.store();
        let alphabet = self.m.alphabet();
        if self.counting {
            self.symbols += 1;
            if self.symbols > self.limit {
                return Err(Error::ResourceLimit(format!("term expands beyond the limit of {} symbols", self.limit)));
            }
        }
        Ok(match store.node(id) {
            Node::Verdict(v) => Ast::Verdict(v),
            Node::Prefix(a, c) => Ast::Prefix(alphabet.name(a).to_string(), Box::new(self.expand(c)?)),
            Node::Choice(l, r) => Ast::Choice(Box::new(self.expand(l)?), Box::new(self.expand(r)?)),
            Node::And(l, r) => Ast::And(Box::new(self.expand(l)?), Box::new(self.expand(r)?)),
            Node::Or(l, r) => Ast::Or(Box::new(self.expand(l)?), Box::new(self.expand(r)?)),
            Node::Rec(v, b) => {
                let orig = store.var_info(v).name.clone();
                let name = if self.counting {
                    *self.name_count.entry(orig.clone()).or_default() += 1;
                    orig
                } else if self.name_count.get(&orig) == Some(&1) {
                    orig
                } else {
                    self.fresh()
                };
                self.scope.push((v, name.clone()));
                let body = self.expand(b);
                self.scope.pop();
                Ast::Rec(name, Box::new(body?))
            }
            Node::Var(v) => match self.scope.iter().rev().find(|(w, _)| *w == v) {
                Some((_, name)) => Ast::Var(name.clone()),
                None => match store.binder(v) {
                    Some(b) => return self.expand(b),
                    None => Ast::Var(store.var_info(v).name.clone()),
                },
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use crate::terms::{parse_monitor, Alphabet};

    fn round(s: &str) -> String {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        parse_monitor(s, &ab).unwrap().to_string()
    }

    #[test]
    fn prints_with_minimal_parentheses() {
        assert_eq!(round("a.yes + b.no"), "a.yes + b.no");
        assert_eq!(round("rec x.(x & (a.yes + b.yes))"), "rec x.(x & (a.yes + b.yes))");
        assert_eq!(round("a.(b.yes + a.no)"), "a.(b.yes + a.no)");
        assert_eq!(round("(a.yes & b.no) | end"), "a.yes & b.no | end");
        assert_eq!(round("a.yes & (b.no | end)"), "a.yes & (b.no | end)");
    }

    #[test]
    fn renames_repeated_binders() {
        assert_eq!(
            round("rec x.a.x + rec x.b.x"),
            "rec x0.a.x0 + rec x1.b.x1"
        );
        assert_eq!(round("rec x.a.rec x.b.x"), "rec x0.a.rec x1.b.x1");
        assert_eq!(round("rec x.a.rec y.b.x"), "rec x.a.rec y.b.x");
    }

    #[test]
    fn shared_subterms_get_distinct_names() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        let mut b = crate::terms::Builder::new(ab);
        let x = b.fresh_var("x");
        let xv = b.var(x);
        let a = b.act("a");
        let body = b.prefix(a, xv);
        let r = b.bind(x, body);
        let root = b.choice(r, r);
        let m = b.finish(root);
        assert_eq!(m.size(), 13);
        assert_eq!(m.to_string(), "rec x0.a.x0 + rec x1.a.x1");
    }
}
