use monitors::corpus::{monitor_corpus, random_monitor, rng, MonitorShape};
use monitors::terms::{parse_monitor, parse_monitor_infer};
use monitors::transform::{check_equivalence, EquivalenceMode};
use monitors::automata::Limits;
use monitors::{Alphabet, Monitor};
use proptest::prelude::*;

fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).unwrap()
}

fn bits_prefix(i: u32, m: &str) -> String {
    if i == 0 {
        return m.to_string();
    }
    let inner = bits_prefix(i - 1, m);
    format!("0.({inner}) + 1.({inner})")
}

#[test]
fn closed_form_size_of_bit_prefixes() {
    let ab = Alphabet::new(["0", "1", "a"]).unwrap();
    for base in ["yes", "a.no", "rec x.(a.x + end)"] {
        let lm = parse_monitor(base, &ab).unwrap().size();
        for i in 0..=3u32 {
            let m = parse_monitor(&bits_prefix(i, base), &ab).unwrap();
            let p = 1u128 << i;
            assert_eq!(m.size(), p * lm + 5 * (p - 1), "i = {i}, m = {base}");
        }
    }
}

#[test]
fn size_counts_symbols() {
    let m = parse_monitor("rec x.(a.x + b.yes)", &ab()).unwrap();
    assert_eq!(m.size(), 3 + (2 + 1) + 1 + (2 + 1));
    let m = parse_monitor("a.yes & end | no", &ab()).unwrap();
    assert_eq!(m.size(), 7);
}

#[test]
fn parse_errors_carry_positions() {
    let e = parse_monitor("a.yes + ", &ab()).unwrap_err();
    assert!(e.to_string().contains("end of input"), "{e}");
    assert!(parse_monitor("c.yes", &ab()).is_err());
    assert!(parse_monitor("tau.yes", &ab()).is_err());
    let m = parse_monitor_infer("@alphabet a, b, c\nc.yes // comment").unwrap();
    assert_eq!(m.alphabet().names(), ["a", "b", "c"]);
}

#[test]
fn printed_terms_are_verdict_equivalent() {
    for m in monitor_corpus(&ab(), 100, 5) {
        let back = parse_monitor(&m.to_string(), &ab()).unwrap();
        let same = check_equivalence(&m, &back, EquivalenceMode::Verdict, &Limits::default()).unwrap();
        assert!(same.holds(), "{m}");
    }
}

#[test]
fn documents_round_trip() {
    for m in monitor_corpus(&ab(), 50, 9) {
        let doc = m.to_document(u128::MAX).unwrap();
        let back = Monitor::from_document(&doc).unwrap();
        assert_eq!(back.to_string(), m.to_string());
    }
}

proptest! {
    #[test]
    fn print_parse_print_is_stable(seed in any::<u64>()) {
        let m = random_monitor(&mut rng(seed), &ab(), MonitorShape::default());
        let once = m.to_string();
        let twice = parse_monitor(&once, &ab()).unwrap().to_string();
        prop_assert_eq!(once, twice);
    }
}
