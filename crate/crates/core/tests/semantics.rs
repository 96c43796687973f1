use std::collections::HashSet;

use monitors::corpus::{all_traces, monitor_corpus, random_monitor, random_trace, rng, MonitorShape};
use monitors::semantics::{check_reactive, derivatives, run_finite_trace, Budget, Engine, Label, OutcomeKind, Reactivity};
use monitors::terms::parse_monitor;
use monitors::{Alphabet, Monitor};
use proptest::prelude::*;

fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).unwrap()
}

fn kind(e: &mut Engine, t: &[monitors::Action]) -> OutcomeKind {
    e.run(t, &Budget::default()).kind
}

fn combine(l: &Monitor, r: &Monitor, op: &str) -> Monitor {
    parse_monitor(&format!("({l}) {op} ({r})"), &ab()).unwrap()
}

#[test]
fn parallel_laws_on_reactive_components() {
    let corpus = monitor_corpus(&ab(), 40, 17);
    let traces = all_traces(&ab(), 5);
    for pair in corpus.chunks(2) {
        let (m1, m2) = (&pair[0], &pair[1]);
        let mut e1 = Engine::new(m1).unwrap();
        let mut e2 = Engine::new(m2).unwrap();
        let mut and = Engine::new(&combine(m1, m2, "&")).unwrap();
        let mut or = Engine::new(&combine(m1, m2, "|")).unwrap();
        for t in &traces {
            let (o1, o2) = (e1.run(t, &Budget::default()), e2.run(t, &Budget::default()));
            let (oa, oo) = (and.run(t, &Budget::default()), or.run(t, &Budget::default()));
            let (a1, a2) = (o1.accepted_at.is_some(), o2.accepted_at.is_some());
            let (r1, r2) = (o1.rejected_at.is_some(), o2.rejected_at.is_some());
            assert_eq!(oa.rejected_at.is_some(), r1 || r2, "{m1} & {m2} on {t:?}");
            assert_eq!(oa.accepted_at.is_some(), a1 && a2, "{m1} & {m2} on {t:?}");
            assert_eq!(oo.accepted_at.is_some(), a1 || a2, "{m1} | {m2} on {t:?}");
            assert_eq!(oo.rejected_at.is_some(), r1 && r2, "{m1} | {m2} on {t:?}");
        }
    }
}

#[test]
fn regular_terms_stay_within_their_subterms() {
    let shape = MonitorShape { parallel: false, ..MonitorShape::default() };
    let mut r = rng(23);
    for _ in 0..100 {
        let m = random_monitor(&mut r, &ab(), shape);
        let subterms: HashSet<_> = m.reachable().into_iter().collect();
        let mut e = Engine::new(&m).unwrap();
        let mut frontier = vec![m.root()];
        frontier.extend(e.weak_step(&[m.root()], Label::Tau, &Budget::default()).unwrap());
        let mut seen: HashSet<_> = frontier.iter().copied().collect();
        while let Some(id) = frontier.pop() {
            for a in ab().actions() {
                for d in e.weak_step(&[id], Label::Act(a), &Budget::default()).unwrap() {
                    assert!(subterms.contains(&d), "{m}");
                    if seen.insert(d) {
                        frontier.push(d);
                    }
                }
            }
        }
    }
}

#[test]
fn derivatives_are_deterministic() {
    for m in monitor_corpus(&ab(), 30, 4) {
        for label in [Label::Tau, Label::Act(ab().action("a").unwrap())] {
            let x: Vec<String> = derivatives(&m, label).unwrap().iter().map(|d| d.to_string()).collect();
            let y: Vec<String> = derivatives(&m, label).unwrap().iter().map(|d| d.to_string()).collect();
            assert_eq!(x, y);
        }
    }
}

#[test]
fn reactivity_of_padded_corpus() {
    let b = Budget::new(1000, 5000).unwrap();
    for m in monitor_corpus(&ab(), 30, 8) {
        let r = check_reactive(&m, &b).unwrap();
        assert!(r.syntactically_reactive);
        assert!(!matches!(r.verdict, Reactivity::NotReactive { .. }), "{m}");
    }
}

#[test]
fn run_reports_witness_prefix() {
    let m = parse_monitor("a.yes + b.no", &ab()).unwrap();
    let o = run_finite_trace(&m, &ab().parse_trace("b a").unwrap(), &Budget::default()).unwrap();
    assert_eq!(o.to_string(), "REJECTED at prefix 1");
}

proptest! {
    #[test]
    fn verdicts_persist(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_monitor(&mut r, &ab(), MonitorShape::default());
        let t = random_trace(&mut r, &ab(), 5);
        let ext = random_trace(&mut r, &ab(), 4);
        let mut e = Engine::new(&m).unwrap();
        let before = kind(&mut e, &t);
        if matches!(before, OutcomeKind::Accepted | OutcomeKind::Rejected) {
            let full: Vec<_> = t.iter().chain(&ext).copied().collect();
            prop_assert_eq!(kind(&mut e, &full), before);
        }
    }
}
