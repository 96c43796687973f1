use monitors::automata::{
    afa_accepts, afa_to_nfa, dfa_language_equal, dfa_to_monitor, monitor_dfa, monitor_nfa, monitor_to_afa,
    nfa_to_dfa, nfa_to_monitor, Comparison, Limits, Polarity,
};
use monitors::corpus::{all_traces, monitor_corpus};
use monitors::semantics::{Budget, Engine};
use monitors::terms::validate;
use monitors::{Alphabet, Error};

fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).unwrap()
}

fn limits() -> Limits {
    Limits { max_states: 200_000 }
}

const POLARITIES: [Polarity; 2] = [Polarity::Accept, Polarity::Reject];

#[test]
fn afa_is_linear_in_monitor_size() {
    for m in monitor_corpus(&ab(), 200, 31) {
        for p in POLARITIES {
            let afa = monitor_to_afa(&m, p).unwrap();
            assert!(afa.len() as u128 <= m.size(), "{m}: {} states", afa.len());
        }
    }
}

#[test]
fn afa_matches_operational_semantics() {
    let traces = all_traces(&ab(), 6);
    for m in monitor_corpus(&ab(), 60, 32) {
        let acc = monitor_to_afa(&m, Polarity::Accept).unwrap();
        let rej = monitor_to_afa(&m, Polarity::Reject).unwrap();
        let mut e = Engine::new(&m).unwrap();
        for t in &traces {
            let o = e.run(t, &Budget::default());
            assert_eq!(afa_accepts(&acc, t), o.accepted_at.is_some(), "{m} on {t:?}");
            assert_eq!(afa_accepts(&rej, t), o.rejected_at.is_some(), "{m} on {t:?}");
        }
    }
}

#[test]
fn nfa_agrees_with_afa_and_is_bounded() {
    let traces = all_traces(&ab(), 6);
    for m in monitor_corpus(&ab(), 100, 33) {
        for p in POLARITIES {
            let afa = monitor_to_afa(&m, p).unwrap();
            let nfa = match afa_to_nfa(&afa, &limits()) {
                Ok(n) => n,
                Err(Error::ResourceLimit(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            assert!((nfa.len() as f64) <= 2f64.powi(afa.len() as i32), "{m}");
            for t in &traces {
                assert_eq!(nfa.accepts(t), afa_accepts(&afa, t), "{m} on {t:?}");
            }
        }
    }
}

#[test]
fn automata_round_trip_to_monitors() {
    for m in monitor_corpus(&ab(), 200, 34) {
        for p in POLARITIES {
            let Ok((dfa, _)) = monitor_dfa(&m, p, &limits()) else { continue };
            let (nfa, _) = monitor_nfa(&m, p, &limits()).unwrap();
            let reg = nfa_to_monitor(&nfa, p.verdict(), &limits()).unwrap();
            assert!(reg.is_regular());
            let (d2, _) = monitor_dfa(&reg, p, &limits()).unwrap();
            assert_eq!(dfa_language_equal(&dfa, &d2).unwrap(), Comparison::Equal, "{m} -> {reg}");

            let det = match dfa_to_monitor(&dfa, p.verdict(), &limits()) {
                Ok(d) => d,
                Err(Error::ResourceLimit(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            assert!(validate(&det).deterministic, "{det}");
            let (d3, _) = monitor_dfa(&det, p, &limits()).unwrap();
            assert_eq!(dfa_language_equal(&dfa, &d3).unwrap(), Comparison::Equal, "{m} -> {det}");
        }
    }
}

#[test]
fn dfa_matches_nfa() {
    let traces = all_traces(&ab(), 6);
    for m in monitor_corpus(&ab(), 50, 35) {
        let (nfa, _) = monitor_nfa(&m, Polarity::Reject, &limits()).unwrap();
        let dfa = nfa_to_dfa(&nfa, &limits()).unwrap();
        assert!(dfa.is_extension_closed() || !nfa.is_extension_closed());
        for t in &traces {
            assert_eq!(dfa.accepts(t), nfa.accepts(t));
        }
    }
}

#[test]
fn resource_guard_is_reported() {
    let m = monitors::gapbench::build_gap_monitor(
        monitors::gapbench::Family::A,
        monitors::gapbench::GapParams::new(1).unwrap(),
    );
    let tight = Limits { max_states: 10 };
    assert!(matches!(monitor_dfa(&m, Polarity::Accept, &tight), Err(Error::ResourceLimit(_))));
}
