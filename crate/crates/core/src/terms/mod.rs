//! Monitor terms: alphabet, hash-consed term store, size metric,
//! well-formedness checks, text syntax and the structured document format.

mod alphabet;
mod ast;
pub mod doc;
mod parse;
mod print;
mod validate;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

pub use alphabet::{valid_action_name, Action, Alphabet, RESERVED};
pub use ast::Ast;
pub use parse::{parse_monitor, parse_monitor_infer, Lexer, Token};
pub(crate) use parse::Parser;
pub use validate::{validate, ValidationReport};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Yes,
    No,
    End,
}

impl Verdict {
    pub fn keyword(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::End => "end",
        }
    }
}

/// Index of a node in a [`TermStore`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(pub u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Recursion variable. Every variable is bound by at most one `Rec` node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Verdict(Verdict),
    Prefix(Action, TermId),
    Choice(TermId, TermId),
    Rec(VarId, TermId),
    Var(VarId),
    /// Conjunctive parallel composition `m & n`.
    And(TermId, TermId),
    /// Disjunctive parallel composition `m | n`.
    Or(TermId, TermId),
}

impl Node {
    pub fn is_parallel(self) -> bool {
        matches!(self, Node::And(..) | Node::Or(..))
    }

    /// Syntactic children, not following variables to their binders.
    pub fn children(self) -> impl Iterator<Item = TermId> {
        let (a, b) = match self {
            Node::Verdict(_) | Node::Var(_) => (None, None),
            Node::Prefix(_, c) | Node::Rec(_, c) => (Some(c), None),
            Node::Choice(l, r) | Node::And(l, r) | Node::Or(l, r) => (Some(l), Some(r)),
        };
        a.into_iter().chain(b)
    }
}

#[derive(Clone, Debug)]
pub struct VarInfo {
    pub name: String,
    pub binder: Option<TermId>,
}

/// Hash-consed arena of monitor nodes.
///
/// Children are always created before their parents, so node ids are a
/// topological order of the syntax DAG (variable back-edges excepted).
#[derive(Clone, Default, Debug)]
pub struct TermStore {
    nodes: Vec<Node>,
    index: HashMap<Node, TermId>,
    vars: Vec<VarInfo>,
}

impl TermStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: TermId) -> Node {
        self.nodes[id.index()]
    }

    pub fn var_info(&self, v: VarId) -> &VarInfo {
        &self.vars[v.0 as usize]
    }

    pub fn binder(&self, v: VarId) -> Option<TermId> {
        self.vars[v.0 as usize].binder
    }

    pub fn lookup(&self, n: &Node) -> Option<TermId> {
        self.index.get(n).copied()
    }

    pub(crate) fn mk(&mut self, n: Node) -> TermId {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = TermId(self.nodes.len() as u32);
        self.nodes.push(n);
        self.index.insert(n, id);
        id
    }

    pub fn verdict(&mut self, v: Verdict) -> TermId {
        self.mk(Node::Verdict(v))
    }

    pub fn yes(&mut self) -> TermId {
        self.verdict(Verdict::Yes)
    }

    pub fn no(&mut self) -> TermId {
        self.verdict(Verdict::No)
    }

    pub fn end(&mut self) -> TermId {
        self.verdict(Verdict::End)
    }

    pub fn prefix(&mut self, a: Action, c: TermId) -> TermId {
        self.mk(Node::Prefix(a, c))
    }

    pub fn choice(&mut self, l: TermId, r: TermId) -> TermId {
        self.mk(Node::Choice(l, r))
    }

    pub fn and(&mut self, l: TermId, r: TermId) -> TermId {
        self.mk(Node::And(l, r))
    }

    pub fn or(&mut self, l: TermId, r: TermId) -> TermId {
        self.mk(Node::Or(l, r))
    }

    /// Left-nested sum of the given terms; `None` when empty.
    pub fn sum<I: IntoIterator<Item = TermId>>(&mut self, terms: I) -> Option<TermId> {
        let mut it = terms.into_iter();
        let first = it.next()?;
        Some(it.fold(first, |acc, t| self.choice(acc, t)))
    }

    /// Left-nested `&` of the given terms; `None` when empty.
    pub fn and_all<I: IntoIterator<Item = TermId>>(&mut self, terms: I) -> Option<TermId> {
        let mut it = terms.into_iter();
        let first = it.next()?;
        Some(it.fold(first, |acc, t| self.and(acc, t)))
    }

    /// Left-nested `|` of the given terms; `None` when empty.
    pub fn or_all<I: IntoIterator<Item = TermId>>(&mut self, terms: I) -> Option<TermId> {
        let mut it = terms.into_iter();
        let first = it.next()?;
        Some(it.fold(first, |acc, t| self.or(acc, t)))
    }

    pub fn fresh_var(&mut self, name: &str) -> VarId {
        let v = VarId(self.vars.len() as u32);
        self.vars.push(VarInfo { name: name.to_string(), binder: None });
        v
    }

    pub fn var(&mut self, v: VarId) -> TermId {
        self.mk(Node::Var(v))
    }

    /// Creates `rec v.body`. Each variable can be bound only once.
    pub fn bind(&mut self, v: VarId, body: TermId) -> TermId {
        assert!(self.vars[v.0 as usize].binder.is_none(), "variable bound twice");
        let id = self.mk(Node::Rec(v, body));
        self.vars[v.0 as usize].binder = Some(id);
        id
    }

    /// Copies the term rooted at `id` in `src` into `self`.
    pub fn import(&mut self, src: &TermStore, id: TermId) -> TermId {
        let reach = src.reachable(id);
        let mut map: HashMap<TermId, TermId> = HashMap::new();
        let mut vmap: HashMap<VarId, VarId> = HashMap::new();
        for old in reach {
            let n = match src.node(old) {
                Node::Verdict(v) => Node::Verdict(v),
                Node::Prefix(a, c) => Node::Prefix(a, map[&c]),
                Node::Choice(l, r) => Node::Choice(map[&l], map[&r]),
                Node::And(l, r) => Node::And(map[&l], map[&r]),
                Node::Or(l, r) => Node::Or(map[&l], map[&r]),
                Node::Var(v) => {
                    let nv = *vmap
                        .entry(v)
                        .or_insert_with(|| self.fresh_var(&src.var_info(v).name));
                    Node::Var(nv)
                }
                Node::Rec(v, b) => {
                    let nv = *vmap
                        .entry(v)
                        .or_insert_with(|| self.fresh_var(&src.var_info(v).name));
                    let nid = self.bind(nv, map[&b]);
                    map.insert(old, nid);
                    continue;
                }
            };
            let nid = self.mk(n);
            map.insert(old, nid);
        }
        map[&id]
    }

    /// Nodes syntactically reachable from `root` (variables followed to their
    /// binders), in increasing id order.
    pub fn reachable(&self, root: TermId) -> Vec<TermId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![root];
        seen[root.index()] = true;
        while let Some(id) = stack.pop() {
            let n = self.node(id);
            let extra = match n {
                Node::Var(v) => self.binder(v),
                _ => None,
            };
            for c in n.children().chain(extra) {
                if !seen[c.index()] {
                    seen[c.index()] = true;
                    stack.push(c);
                }
            }
        }
        (0..self.nodes.len() as u32)
            .map(TermId)
            .filter(|t| seen[t.index()])
            .collect()
    }

    /// Tree-expansion size of every reachable node, indexed by node id
    /// (entries for unreachable nodes are zero). Saturates at `u128::MAX`.
    pub fn sizes(&self, root: TermId) -> Vec<u128> {
        let mut size = vec![0u128; self.nodes.len()];
        for id in self.reachable(root) {
            size[id.index()] = match self.node(id) {
                Node::Verdict(_) | Node::Var(_) => 1,
                Node::Prefix(_, c) => size[c.index()].saturating_add(2),
                Node::Rec(_, c) => size[c.index()].saturating_add(3),
                Node::Choice(l, r) | Node::And(l, r) | Node::Or(l, r) => size[l.index()]
                    .saturating_add(size[r.index()])
                    .saturating_add(1),
            };
        }
        size
    }
}

/// A monitor term over a fixed alphabet.
#[derive(Clone)]
pub struct Monitor {
    alphabet: Alphabet,
    store: Arc<TermStore>,
    root: TermId,
}

impl Monitor {
    pub fn new(alphabet: Alphabet, store: TermStore, root: TermId) -> Self {
        Monitor { alphabet, store: Arc::new(store), root }
    }

    pub fn from_shared(alphabet: Alphabet, store: Arc<TermStore>, root: TermId) -> Self {
        Monitor { alphabet, store, root }
    }

    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        parse_monitor(text, alphabet)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn store(&self) -> &TermStore {
        &self.store
    }

    pub fn shared_store(&self) -> &Arc<TermStore> {
        &self.store
    }

    pub fn root(&self) -> TermId {
        self.root
    }

    pub fn node(&self, id: TermId) -> Node {
        self.store.node(id)
    }

    /// The symbol count `l(m)` of the tree expansion of the term.
    pub fn size(&self) -> u128 {
        self.store.sizes(self.root)[self.root.index()]
    }

    /// Number of distinct subterms in the shared representation.
    pub fn dag_size(&self) -> usize {
        self.store.reachable(self.root).len()
    }

    pub fn reachable(&self) -> Vec<TermId> {
        self.store.reachable(self.root)
    }

    pub fn is_regular(&self) -> bool {
        self.reachable().into_iter().all(|id| !self.node(id).is_parallel())
    }

    /// Names of variables not bound by any `rec`.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .reachable()
            .into_iter()
            .filter_map(|id| match self.node(id) {
                Node::Var(v) if self.store.binder(v).is_none() => {
                    Some(self.store.var_info(v).name.clone())
                }
                _ => None,
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn require_closed(&self) -> Result<()> {
        match self.free_vars().into_iter().next() {
            Some(x) => Err(Error::OpenTerm(x)),
            None => Ok(()),
        }
    }

    /// A copy of the term holding only the nodes reachable from the root.
    pub fn compact(&self) -> Monitor {
        let mut store = TermStore::new();
        let root = store.import(&self.store, self.root);
        Monitor::new(self.alphabet.clone(), store, root)
    }

    /// The subterm rooted at `id`, sharing this term's store.
    pub fn subterm(&self, id: TermId) -> Monitor {
        Monitor { alphabet: self.alphabet.clone(), store: self.store.clone(), root: id }
    }

    /// Tree expansion with unique binder names. Fails when the expansion
    /// exceeds `limit` symbols.
    pub fn to_ast(&self, limit: u128) -> Result<Ast> {
        print::to_ast(self, limit)
    }

    /// Text form, or an error when the tree expansion exceeds `limit` symbols.
    pub fn to_text(&self, limit: u128) -> Result<String> {
        Ok(self.to_ast(limit)?.to_string())
    }
}

impl fmt::Display for Monitor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_ast(u128::MAX) {
            Ok(ast) => write!(f, "{ast}"),
            Err(_) => Err(fmt::Error),
        }
    }
}

impl fmt::Debug for Monitor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Monitor({self})")
    }
}

/// Incremental construction of a monitor over a named alphabet.
pub struct Builder {
    pub alphabet: Alphabet,
    pub store: TermStore,
}

impl Builder {
    pub fn new(alphabet: Alphabet) -> Self {
        Builder { alphabet, store: TermStore::new() }
    }

    /// Looks up an action by name; panics if it is not in the alphabet.
    pub fn act(&self, name: &str) -> Action {
        self.alphabet
            .lookup(name)
            .unwrap_or_else(|| panic!("action `{name}` not in {}", self.alphabet))
    }

    pub fn finish(self, root: TermId) -> Monitor {
        Monitor::new(self.alphabet, self.store, root)
    }
}

impl std::ops::Deref for Builder {
    type Target = TermStore;
    fn deref(&self) -> &TermStore {
        &self.store
    }
}

impl std::ops::DerefMut for Builder {
    fn deref_mut(&mut self) -> &mut TermStore {
        &mut self.store
    }
}
