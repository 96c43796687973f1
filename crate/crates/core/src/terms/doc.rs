//! Structured document format shared by monitors and formulas.
//!
//! ```json
//! {"format": "monitor", "version": 1, "alphabet": ["a", "b"],
//!  "term": {"kind": "choice", "children": [
//!     {"kind": "prefix", "action": "a", "children": [{"kind": "verdict", "verdict": "yes"}]},
//!     {"kind": "prefix", "action": "b", "children": [{"kind": "verdict", "verdict": "no"}]}]}}
//! ```
//!
//! Monitor node kinds: `verdict` (with `verdict`: `yes|no|end`), `prefix`
//! (`action`, one child), `choice`, `par_and`, `par_or` (two children each),
//! `rec` (`var`, one child), `var` (`var`). Formula node kinds: `tt`, `ff`,
//! `and`, `or` (two children), `box`, `diamond` (`action`, one child), `max`,
//! `min` (`var`, one child), `var` (`var`).

use serde::{Deserialize, Serialize};

use super::{Alphabet, Ast, Monitor, Verdict};
use crate::{Error, Result};

pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub format: String,
    pub version: u32,
    pub alphabet: Vec<String>,
    pub term: NodeDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<NodeDoc>,
}

impl NodeDoc {
    pub fn leaf(kind: &str) -> Self {
        NodeDoc { kind: kind.into(), action: None, var: None, verdict: None, children: vec![] }
    }

    pub fn with_children(kind: &str, children: Vec<NodeDoc>) -> Self {
        NodeDoc { children, ..Self::leaf(kind) }
    }

    pub fn child(&self, i: usize, arity: usize) -> Result<&NodeDoc> {
        if self.children.len() != arity {
            return Err(Error::Document(format!(
                "`{}` node needs {arity} children, found {}",
                self.kind,
                self.children.len()
            )));
        }
        Ok(&self.children[i])
    }

    pub fn field<'a>(&'a self, f: &'a Option<String>, name: &str) -> Result<&'a str> {
        f.as_deref()
            .ok_or_else(|| Error::Document(format!("`{}` node lacks `{name}`", self.kind)))
    }
}

/// Reads a document from JSON text without a nesting limit.
pub fn read_document(text: &str) -> Result<Document> {
    let mut de = serde_json::Deserializer::from_str(text);
    de.disable_recursion_limit();
    let doc = Document::deserialize(&mut de).map_err(|e| Error::Document(e.to_string()))?;
    de.end().map_err(|e| Error::Document(e.to_string()))?;
    if doc.version != VERSION {
        return Err(Error::Document(format!("unsupported version {}", doc.version)));
    }
    Ok(doc)
}

pub fn write_document(doc: &Document) -> String {
    serde_json::to_string_pretty(doc).expect("documents always serialize")
}

impl Ast {
    pub fn to_doc(&self) -> NodeDoc {
        match self {
            Ast::Verdict(v) => NodeDoc { verdict: Some(v.keyword().into()), ..NodeDoc::leaf("verdict") },
            Ast::Var(x) => NodeDoc { var: Some(x.clone()), ..NodeDoc::leaf("var") },
            Ast::Prefix(a, c) => NodeDoc {
                action: Some(a.clone()),
                ..NodeDoc::with_children("prefix", vec![c.to_doc()])
            },
            Ast::Rec(x, b) => NodeDoc {
                var: Some(x.clone()),
                ..NodeDoc::with_children("rec", vec![b.to_doc()])
            },
            Ast::Choice(l, r) => NodeDoc::with_children("choice", vec![l.to_doc(), r.to_doc()]),
            Ast::And(l, r) => NodeDoc::with_children("par_and", vec![l.to_doc(), r.to_doc()]),
            Ast::Or(l, r) => NodeDoc::with_children("par_or", vec![l.to_doc(), r.to_doc()]),
        }
    }

    pub fn from_doc(d: &NodeDoc) -> Result<Ast> {
        let two = |d: &NodeDoc| -> Result<(Box<Ast>, Box<Ast>)> {
            Ok((Box::new(Ast::from_doc(d.child(0, 2)?)?), Box::new(Ast::from_doc(d.child(1, 2)?)?)))
        };
        Ok(match d.kind.as_str() {
            "verdict" => Ast::Verdict(match d.field(&d.verdict, "verdict")? {
                "yes" => Verdict::Yes,
                "no" => Verdict::No,
                "end" => Verdict::End,
                v => return Err(Error::Document(format!("unknown verdict `{v}`"))),
            }),
            "var" => Ast::Var(d.field(&d.var, "var")?.to_string()),
            "prefix" => Ast::Prefix(
                d.field(&d.action, "action")?.to_string(),
                Box::new(Ast::from_doc(d.child(0, 1)?)?),
            ),
            "rec" => Ast::Rec(
                d.field(&d.var, "var")?.to_string(),
                Box::new(Ast::from_doc(d.child(0, 1)?)?),
            ),
            "choice" => {
                let (l, r) = two(d)?;
                Ast::Choice(l, r)
            }
            "par_and" => {
                let (l, r) = two(d)?;
                Ast::And(l, r)
            }
            "par_or" => {
                let (l, r) = two(d)?;
                Ast::Or(l, r)
            }
            k => return Err(Error::Document(format!("unknown monitor node kind `{k}`"))),
        })
    }
}

impl Monitor {
    pub fn to_document(&self, limit: u128) -> Result<Document> {
        Ok(Document {
            format: "monitor".into(),
            version: VERSION,
            alphabet: self.alphabet().names().to_vec(),
            term: self.to_ast(limit)?.to_doc(),
        })
    }

    pub fn from_document(doc: &Document) -> Result<Monitor> {
        if doc.format != "monitor" {
            return Err(Error::Document(format!("expected a monitor document, found `{}`", doc.format)));
        }
        let alphabet = Alphabet::new(doc.alphabet.iter().cloned())?;
        Ast::from_doc(&doc.term)?.to_monitor(&alphabet)
    }
}
