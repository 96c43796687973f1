use monitors::automata::{consistent, monitor_dfa, Limits, Polarity};
use monitors::corpus::{all_traces, monitor_corpus};
use monitors::semantics::{run_finite_trace, Budget, OutcomeKind};
use monitors::terms::{parse_monitor, validate, Node};
use monitors::transform::{
    check_equivalence, check_strict, determinize_regular, pad, parallel_to_deterministic, parallel_to_regular,
    Equivalence, EquivalenceMode,
};
use monitors::{Action, Alphabet, Error, Monitor, Verdict};

fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).unwrap()
}

fn m(s: &str) -> Monitor {
    parse_monitor(s, &ab()).unwrap()
}

fn limits() -> Limits {
    Limits { max_states: 200_000 }
}

fn equivalent(x: &Monitor, y: &Monitor, mode: EquivalenceMode) -> bool {
    check_equivalence(x, y, mode, &limits()).unwrap().holds()
}

#[test]
fn pipeline_preserves_verdicts_on_corpus() {
    let mut checked = 0;
    for src in monitor_corpus(&ab(), 80, 41) {
        if !consistent(&src).unwrap() {
            assert!(matches!(parallel_to_deterministic(&src, &limits()), Err(Error::Inconsistent(_))));
            continue;
        }
        let reg = match parallel_to_regular(&src, &limits()) {
            Ok(t) => t.monitor,
            Err(Error::ResourceLimit(_)) => continue,
            Err(e) => panic!("{src}: {e}"),
        };
        assert!(reg.is_regular(), "{reg}");
        assert!(equivalent(&src, &reg, EquivalenceMode::Verdict), "{src} vs {reg}");
        assert!(consistent(&reg).unwrap());

        let det = match determinize_regular(&reg, &limits()) {
            Ok(t) => t.monitor,
            Err(Error::ResourceLimit(_)) => continue,
            Err(e) => panic!("{reg}: {e}"),
        };
        assert!(validate(&det).deterministic, "{det}");
        assert!(equivalent(&src, &det, EquivalenceMode::Verdict), "{src} vs {det}");
        checked += 1;
    }
    assert!(checked >= 50, "only {checked} monitors went through the pipeline");
}

#[test]
fn marker_route_is_deterministic_and_equivalent() {
    for src in monitor_corpus(&ab(), 40, 42) {
        if !consistent(&src).unwrap() {
            continue;
        }
        let Ok(t) = parallel_to_deterministic(&src, &limits()) else { continue };
        assert!(validate(&t.monitor).deterministic, "{}", t.monitor);
        assert_eq!(t.monitor.alphabet(), &ab());
        assert!(equivalent(&src, &t.monitor, EquivalenceMode::Verdict), "{src} vs {}", t.monitor);
    }
}

#[test]
fn verdict_equivalence_implies_omega_equivalence() {
    let corpus = monitor_corpus(&ab(), 40, 43);
    for x in &corpus {
        for y in corpus.iter().take(10) {
            if equivalent(x, y, EquivalenceMode::Verdict) {
                assert!(equivalent(x, y, EquivalenceMode::Omega), "{x} vs {y}");
            }
        }
    }
}

#[test]
fn omega_is_strictly_coarser() {
    let no = m("no");
    let sum = m("a.no + b.no");
    assert!(matches!(
        check_equivalence(&no, &sum, EquivalenceMode::Verdict, &limits()).unwrap(),
        Equivalence::Trace { ref trace, .. } if trace.is_empty()
    ));
    assert!(equivalent(&no, &sum, EquivalenceMode::Omega));
}

#[test]
fn immediate_verdicts_collapse() {
    assert_eq!(parallel_to_deterministic(&m("yes & yes"), &limits()).unwrap().monitor.to_string(), "yes");
    assert_eq!(parallel_to_deterministic(&m("no | (a.no + b.no)"), &limits()).unwrap().monitor.to_string(), "a.no + b.no");
    assert_eq!(parallel_to_deterministic(&m("no & (a.yes + end)"), &limits()).unwrap().monitor.to_string(), "no");
}

#[test]
fn strict_mode_and_padding() {
    let unpadded = m("(a.yes + a.no) & b.yes");
    assert!(matches!(check_strict(&unpadded), Err(Error::NotReactive(_))));
    assert!(check_strict(&pad(&unpadded)).is_ok());
    assert!(matches!(determinize_regular(&m("a.yes + a.no"), &limits()), Err(Error::Inconsistent(_))));
}

fn summands(m: &Monitor, id: monitors::terms::TermId, out: &mut Vec<monitors::terms::TermId>) {
    match m.node(id) {
        Node::Choice(l, r) => {
            summands(m, l, out);
            summands(m, r, out);
        }
        _ => out.push(id),
    }
}

/// Actions `a` with a summand `a.yes` in some sum of `m`.
fn yes_prefix_pairs(m: &Monitor) -> Vec<(Action, Action)> {
    let mut pairs = Vec::new();
    for id in m.reachable() {
        if !matches!(m.node(id), Node::Choice(..)) {
            continue;
        }
        let mut parts = Vec::new();
        summands(m, id, &mut parts);
        let actions: Vec<Action> = parts
            .iter()
            .filter_map(|p| match m.node(*p) {
                Node::Prefix(a, c) if matches!(m.node(c), Node::Verdict(Verdict::Yes)) => Some(a),
                _ => None,
            })
            .collect();
        for (i, a) in actions.iter().enumerate() {
            for b in &actions[i + 1..] {
                if a != b {
                    pairs.push((*a, *b));
                }
            }
        }
    }
    pairs
}

#[test]
fn sums_of_yes_prefixes_share_a_trace() {
    let traces = all_traces(&ab(), 5);
    let mut seen = 0;
    for src in monitor_corpus(&ab(), 80, 44) {
        let Ok(t) = parallel_to_regular(&src, &limits()) else { continue };
        let (dfa, _) = monitor_dfa(&t.monitor, Polarity::Accept, &limits()).unwrap();
        for (a, b) in yes_prefix_pairs(&t.monitor) {
            seen += 1;
            let found = traces.iter().any(|t| {
                dfa.accepts(&[&t[..], &[a]].concat()) && dfa.accepts(&[&t[..], &[b]].concat())
            });
            assert!(found, "{}", t.monitor);
        }
    }
    assert!(seen > 0);
}

#[test]
fn deterministic_outputs_have_no_immediate_yes() {
    for src in monitor_corpus(&ab(), 60, 45) {
        if !consistent(&src).unwrap() {
            continue;
        }
        let Ok(t) = parallel_to_deterministic(&src, &limits()) else { continue };
        let det = t.monitor;
        for id in det.reachable() {
            if matches!(det.node(id), Node::Verdict(Verdict::Yes)) {
                continue;
            }
            let o = run_finite_trace(&det.subterm(id), &[], &Budget::default()).unwrap();
            assert_ne!(o.kind, OutcomeKind::Accepted, "{det}");
        }
    }
}
