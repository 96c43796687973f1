//! Graphviz export. AFA hyperedges are drawn through intermediate
//! `∧`/`∨` nodes.

use std::fmt::Write;

use super::{Afa, Dfa, Nfa, PosBool};

pub fn dfa_to_dot(d: &Dfa) -> String {
    let mut s = String::from("digraph dfa {\n  rankdir=LR;\n  init [shape=point];\n");
    for q in 0..d.len() {
        let shape = if d.accepting[q] { "doublecircle" } else { "circle" };
        let label = if d.dead == Some(q as u32) { "dead".to_string() } else { format!("q{q}") };
        writeln!(s, "  q{q} [shape={shape}, label=\"{label}\"];").unwrap();
    }
    writeln!(s, "  init -> q{};", d.initial).unwrap();
    for q in 0..d.len() {
        for a in d.alphabet.actions() {
            let p = d.trans[q][a.index()];
            writeln!(s, "  q{q} -> q{p} [label=\"{}\"];", escape(d.alphabet.name(a))).unwrap();
        }
    }
    s.push_str("}\n");
    s
}

pub fn nfa_to_dot(n: &Nfa) -> String {
    let mut s = String::from("digraph nfa {\n  rankdir=LR;\n  init [shape=point];\n");
    for q in 0..n.len() {
        let shape = if n.accepting[q] { "doublecircle" } else { "circle" };
        writeln!(s, "  q{q} [shape={shape}];").unwrap();
    }
    for &q in &n.initial {
        writeln!(s, "  init -> q{q};").unwrap();
    }
    for q in 0..n.len() {
        for a in n.alphabet.actions() {
            for &p in &n.trans[q][a.index()] {
                writeln!(s, "  q{q} -> q{p} [label=\"{}\"];", escape(n.alphabet.name(a))).unwrap();
            }
        }
    }
    s.push_str("}\n");
    s
}

pub fn afa_to_dot(a: &Afa) -> String {
    let mut s = String::from("digraph afa {\n  rankdir=LR;\n  init [shape=point];\n  top [shape=box, label=\"true\"];\n");
    for q in 0..a.len() {
        let shape = if a.accepting[q] { "doublecircle" } else { "circle" };
        writeln!(s, "  q{q} [shape={shape}];").unwrap();
    }
    let mut fresh = 0usize;
    let root = formula(&mut s, &a.initial, &mut fresh);
    if let Some(r) = root {
        writeln!(s, "  init -> {r};").unwrap();
    }
    for q in 0..a.len() {
        for act in a.alphabet.actions() {
            if let Some(target) = formula(&mut s, &a.delta[q][act.index()], &mut fresh) {
                writeln!(s, "  q{q} -> {target} [label=\"{}\"];", escape(a.alphabet.name(act))).unwrap();
            }
        }
    }
    s.push_str("}\n");
    s
}

/// Emits nodes for a formula and returns the node to point at; `None` for `false`.
fn formula(s: &mut String, f: &PosBool, fresh: &mut usize) -> Option<String> {
    match f {
        PosBool::False => None,
        PosBool::True => Some("top".into()),
        PosBool::Atom(q) => Some(format!("q{q}")),
        PosBool::And(xs) | PosBool::Or(xs) => {
            let id = format!("f{fresh}");
            *fresh += 1;
            let op = if matches!(f, PosBool::And(_)) { "∧" } else { "∨" };
            writeln!(s, "  {id} [shape=diamond, label=\"{op}\"];").unwrap();
            for x in xs {
                if let Some(t) = formula(s, x, fresh) {
                    writeln!(s, "  {id} -> {t};").unwrap();
                }
            }
            Some(id)
        }
    }
}

fn escape(name: &str) -> String {
    name.replace('\\', "\\\\").replace('"', "\\\"")
}
