//! Gap families over `{0,1,#,$}`: string oracles for `L_A` and `L_U`, the
//! auxiliary and composite parallel monitors recognizing them, the `t_K`
//! trace, and size measurements along the transformation pipeline.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::automata::{monitor_dfa, monitor_nfa, monitor_to_afa, Limits, Polarity};
use crate::terms::{Action, Alphabet, Builder, Monitor, TermId};
use crate::transform::{parallel_to_deterministic, parallel_to_regular};
use crate::{Error, Result};

pub const SYMBOLS: [&str; 4] = ["0", "1", "#", "$"];

pub fn gap_alphabet() -> Alphabet {
    Alphabet::new(SYMBOLS).expect("valid alphabet")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    A,
    U,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::A => "A",
            Family::U => "U",
        }
    }
}

/// Index width `l` and block count `k = 2^l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GapParams {
    l: u32,
}

impl GapParams {
    pub const MAX_L: u32 = 6;

    pub fn new(l: u32) -> Result<Self> {
        if l == 0 || l > Self::MAX_L {
            return Err(Error::InvalidArgument(format!("index width l must be in 1..={}, got {l}", Self::MAX_L)));
        }
        Ok(GapParams { l })
    }

    pub fn l(self) -> usize {
        self.l as usize
    }

    pub fn k(self) -> usize {
        1 << self.l
    }

    pub fn block_len(self) -> usize {
        self.l() + 1
    }

    /// Length of a member of `W`.
    pub fn word_len(self) -> usize {
        self.block_len() * self.k()
    }
}

fn bin(i: usize, width: usize) -> String {
    (0..width).rev().map(|b| if i >> b & 1 == 1 { '1' } else { '0' }).collect()
}

/// The string of `k` bits that `w` encodes, if `w` is in `W`.
pub fn decode(p: GapParams, w: &str) -> Option<Vec<u8>> {
    let bytes = w.as_bytes();
    if bytes.len() != p.word_len() || bytes.iter().any(|c| *c != b'0' && *c != b'1') {
        return None;
    }
    let mut out: Vec<Option<u8>> = vec![None; p.k()];
    for block in bytes.chunks(p.block_len()) {
        let idx = block[..p.l()].iter().fold(0usize, |acc, c| acc * 2 + (c - b'0') as usize);
        if out[idx].is_some() {
            return None;
        }
        out[idx] = Some(block[p.l()] - b'0');
    }
    out.into_iter().collect()
}

pub fn in_w(p: GapParams, w: &str) -> bool {
    decode(p, w).is_some()
}

/// `w ≡ w'` for members of `W`: equal bits at equal indices.
pub fn equivalent(p: GapParams, w: &str, w2: &str) -> bool {
    match (decode(p, w), decode(p, w2)) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

/// Ordered encoding of a string of `k` bits: blocks `bin(i) bit_i`.
pub fn enc(p: GapParams, bits: &[u8]) -> String {
    assert_eq!(bits.len(), p.k());
    bits.iter().enumerate().map(|(i, b)| format!("{}{b}", bin(i, p.l()))).collect()
}

fn check_symbols(t: &str) -> Result<()> {
    match t.chars().find(|c| !"01#$".contains(*c)) {
        Some(c) => Err(Error::UnknownAction(c.to_string())),
        None => Ok(()),
    }
}

fn oracle_a(p: GapParams, t: &[u8]) -> bool {
    let n = p.word_len();
    for i in 0..t.len() {
        if t[i] != b'#' || i + n + 1 >= t.len() || t[i + n + 1] != b'#' {
            continue;
        }
        let w = std::str::from_utf8(&t[i + 1..i + 1 + n]).unwrap();
        if !in_w(p, w) {
            continue;
        }
        let Some(d1) = t[i + n + 2..].iter().position(|c| *c == b'$').map(|x| x + i + n + 2) else {
            continue;
        };
        let Some(d2) = t[d1 + 1..].iter().position(|c| *c == b'$').map(|x| x + d1 + 1) else {
            continue;
        };
        // `u' # w' # $` ends right before the second `$`.
        if d2 < d1 + n + 3 || t[d2 - 1] != b'#' || t[d2 - n - 2] != b'#' {
            continue;
        }
        let w2 = std::str::from_utf8(&t[d2 - n - 1..d2 - 1]).unwrap();
        if in_w(p, w2) && equivalent(p, w, w2) {
            return true;
        }
    }
    false
}

fn oracle_u(p: GapParams, t: &[u8]) -> bool {
    if t.first() != Some(&b'#') {
        return false;
    }
    let mut pos = 1;
    let mut prev: Option<Vec<u8>> = None;
    loop {
        let start = pos;
        while pos < t.len() && (t[pos] == b'0' || t[pos] == b'1') {
            pos += 1;
        }
        if pos == t.len() {
            return false;
        }
        let Some(cur) = decode(p, std::str::from_utf8(&t[start..pos]).unwrap()) else {
            return false;
        };
        if let Some(prev) = &prev {
            if *prev >= cur {
                return false;
            }
        }
        match t[pos] {
            b'$' => return true,
            b'#' => {
                prev = Some(cur);
                pos += 1;
            }
            _ => unreachable!(),
        }
    }
}

/// Membership of a finite trace, written over `0 1 # $` without separators,
/// decided directly on the string.
pub fn oracle_membership(family: Family, p: GapParams, t: &str) -> Result<bool> {
    check_symbols(t)?;
    Ok(match family {
        Family::A => oracle_a(p, t.as_bytes()),
        Family::U => oracle_u(p, t.as_bytes()),
    })
}

/// Whether `blocks` are terminated by `#` only, or by `#` or `$`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminator {
    Hash,
    HashOrDollar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuxKind {
    SkipHash,
    NextHash,
    NextDollar,
    SkipLast,
    All,
    NoMore,
    Unique,
    Perm,
    Find,
    Match,
    Matching,
    Smaller,
    Last,
}

impl AuxKind {
    pub const ALL: [AuxKind; 13] = [
        AuxKind::SkipHash,
        AuxKind::NextHash,
        AuxKind::NextDollar,
        AuxKind::SkipLast,
        AuxKind::All,
        AuxKind::NoMore,
        AuxKind::Unique,
        AuxKind::Perm,
        AuxKind::Find,
        AuxKind::Match,
        AuxKind::Matching,
        AuxKind::Smaller,
        AuxKind::Last,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AuxKind::SkipHash => "skip_#",
            AuxKind::NextHash => "next_#",
            AuxKind::NextDollar => "next_$",
            AuxKind::SkipLast => "skip_last",
            AuxKind::All => "all",
            AuxKind::NoMore => "no_more",
            AuxKind::Unique => "unique",
            AuxKind::Perm => "perm",
            AuxKind::Find => "find",
            AuxKind::Match => "match",
            AuxKind::Matching => "matching",
            AuxKind::Smaller => "smaller",
            AuxKind::Last => "last",
        }
    }

    pub fn from_name(s: &str) -> Option<AuxKind> {
        AuxKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Clone, Debug)]
pub enum AuxArg {
    None,
    Monitor(Monitor),
    Bits(String),
}

struct Gen {
    b: Builder,
    p: GapParams,
    zero: Action,
    one: Action,
    hash: Action,
    dollar: Action,
}

type Bits = Vec<u8>;

fn all_bits(n: usize) -> Vec<Bits> {
    (0..1usize << n).map(|i| (0..n).rev().map(|b| (i >> b & 1) as u8).collect()).collect()
}

impl Gen {
    fn new(p: GapParams) -> Gen {
        let b = Builder::new(gap_alphabet());
        let (zero, one, hash, dollar) = (b.act("0"), b.act("1"), b.act("#"), b.act("$"));
        Gen { b, p, zero, one, hash, dollar }
    }

    fn bit(&self, x: u8) -> Action {
        if x == 0 {
            self.zero
        } else {
            self.one
        }
    }

    /// Sum of prefixes, padded with `end` unless every symbol is offered.
    fn psum(&mut self, parts: Vec<(Action, TermId)>) -> TermId {
        let mut covered = [false; 4];
        let mut terms = Vec::new();
        for (a, m) in parts {
            covered[a.index()] = true;
            terms.push(self.b.prefix(a, m));
        }
        if covered.iter().any(|c| !c) {
            terms.push(self.b.end());
        }
        self.b.sum(terms).unwrap()
    }

    /// First-level prefixes of the trie reading each bit string to its target.
    fn trie(&mut self, entries: &[(Bits, TermId)]) -> Vec<(Action, TermId)> {
        let mut out = Vec::new();
        for bit in [0u8, 1] {
            let group: Vec<(Bits, TermId)> = entries
                .iter()
                .filter(|(s, _)| s.first() == Some(&bit))
                .map(|(s, t)| (s[1..].to_vec(), *t))
                .collect();
            if group.is_empty() {
                continue;
            }
            let target = if group[0].0.is_empty() {
                group[0].1
            } else {
                let parts = self.trie(&group);
                self.psum(parts)
            };
            out.push((self.bit(bit), target));
        }
        out
    }

    fn trie_sum(&mut self, entries: &[(Bits, TermId)]) -> TermId {
        let parts = self.trie(entries);
        self.psum(parts)
    }

    fn rec(&mut self, name: &str, body: impl FnOnce(&mut Gen, TermId) -> TermId) -> TermId {
        let v = self.b.fresh_var(name);
        let x = self.b.var(v);
        let t = body(self, x);
        self.b.bind(v, t)
    }

    /// `rec x.((0.x + 1.x + #.x + $.x) ⊕ #.m)`. The skipped prefix may
    /// contain `$`.
    fn skip_hash(&mut self, m: TermId) -> TermId {
        self.rec("x", |g, x| {
            let l = g.psum(vec![(g.zero, x), (g.one, x), (g.hash, x), (g.dollar, x)]);
            let r = g.psum(vec![(g.hash, m)]);
            g.b.or(l, r)
        })
    }

    fn next_hash(&mut self, m: TermId) -> TermId {
        self.rec("x", |g, x| g.psum(vec![(g.zero, x), (g.one, x), (g.hash, m)]))
    }

    fn next_dollar(&mut self, m: TermId) -> TermId {
        self.rec("x", |g, x| g.psum(vec![(g.zero, x), (g.one, x), (g.hash, x), (g.dollar, m)]))
    }

    fn skip_last(&mut self, m: TermId) -> TermId {
        let yes = self.b.yes();
        let dollar_yes = self.psum(vec![(self.dollar, yes)]);
        let tail = self.rec("y", |g, y| g.psum(vec![(g.zero, y), (g.one, y), (g.hash, dollar_yes)]));
        let inner = self.b.and(m, tail);
        self.rec("x", |g, x| g.psum(vec![(g.zero, x), (g.one, x), (g.hash, x), (g.hash, inner)]))
    }

    fn blocks_to(&mut self, x: TermId) -> TermId {
        let entries: Vec<(Bits, TermId)> = all_bits(self.p.block_len()).into_iter().map(|s| (s, x)).collect();
        self.trie_sum(&entries)
    }

    fn all(&mut self) -> TermId {
        let mut parts = Vec::new();
        for a in all_bits(self.p.l()) {
            let t = self.rec("x", |g, x| {
                let loop_ = g.blocks_to(x);
                let yes = g.b.yes();
                let hit: Vec<(Bits, TermId)> = [0u8, 1]
                    .iter()
                    .map(|b| ([a.as_slice(), &[*b]].concat(), yes))
                    .collect();
                let hit = g.trie_sum(&hit);
                g.b.or(loop_, hit)
            });
            parts.push(t);
        }
        self.b.and_all(parts).unwrap()
    }

    fn terminators(&mut self, term: Terminator) -> Vec<(Action, TermId)> {
        let yes = self.b.yes();
        match term {
            Terminator::Hash => vec![(self.hash, yes)],
            Terminator::HashOrDollar => vec![(self.hash, yes), (self.dollar, yes)],
        }
    }

    fn no_more(&mut self, a: &[u8], term: Terminator) -> TermId {
        self.rec("x", |g, x| {
            let entries: Vec<(Bits, TermId)> = all_bits(g.p.l())
                .into_iter()
                .filter(|c| c != a)
                .flat_map(|c| [0u8, 1].map(|b| ([c.as_slice(), &[b]].concat(), x)))
                .collect();
            let mut parts = g.terminators(term);
            parts.extend(g.trie(&entries));
            g.psum(parts)
        })
    }

    fn unique(&mut self, term: Terminator) -> TermId {
        let mut entries = Vec::new();
        for a in all_bits(self.p.l()) {
            let nm = self.no_more(&a, term);
            for b in [0u8, 1] {
                entries.push(([a.as_slice(), &[b]].concat(), nm));
            }
        }
        self.rec("x", |g, x| {
            let loop_ = g.blocks_to(x);
            let rest = g.trie_sum(&entries);
            let par = g.b.and(loop_, rest);
            let mut summands: Vec<TermId> = Vec::new();
            for (a, m) in g.terminators(term) {
                summands.push(g.b.prefix(a, m));
            }
            summands.push(par);
            g.b.sum(summands).unwrap()
        })
    }

    fn perm(&mut self, term: Terminator) -> TermId {
        let all = self.all();
        let unique = self.unique(term);
        self.b.and(all, unique)
    }

    fn find(&mut self, beta: &[u8]) -> TermId {
        self.rec("x", |g, x| {
            let yes = g.b.yes();
            let entries: Vec<(Bits, TermId)> = all_bits(g.p.block_len())
                .into_iter()
                .map(|s| {
                    let t = if s == beta { yes } else { x };
                    (s, t)
                })
                .collect();
            g.trie_sum(&entries)
        })
    }

    fn match_(&mut self, beta: &[u8]) -> TermId {
        let f = self.find(beta);
        let s = self.skip_last(f);
        self.next_dollar(s)
    }

    /// Includes the summand `#.yes`, which accepts once the whole word has
    /// been read.
    fn matching(&mut self) -> TermId {
        let blocks = all_bits(self.p.block_len());
        let matches: Vec<TermId> = blocks.iter().map(|b| self.match_(b)).collect();
        self.rec("x", |g, x| {
            let entries: Vec<(Bits, TermId)> = blocks
                .iter()
                .zip(&matches)
                .map(|(b, m)| (b.clone(), g.b.and(x, *m)))
                .collect();
            let yes = g.b.yes();
            let mut parts = g.trie(&entries);
            parts.push((g.hash, yes));
            g.psum(parts)
        })
    }

    fn smaller(&mut self) -> TermId {
        let idx = all_bits(self.p.l());
        let mut summands = Vec::new();
        for (i, a) in idx.iter().enumerate() {
            let f0 = self.find(&[a.as_slice(), &[0]].concat());
            let f1 = self.find(&[a.as_slice(), &[1]].concat());
            let n1 = self.next_hash(f1);
            let mut conj = vec![f0, n1];
            for c in &idx[..i] {
                let mut alts = Vec::new();
                for b in [0u8, 1] {
                    let block = [c.as_slice(), &[b]].concat();
                    let here = self.find(&block);
                    let there = self.find(&block);
                    let there = self.next_hash(there);
                    alts.push(self.b.and(here, there));
                }
                conj.push(self.b.sum(alts).unwrap());
            }
            summands.push(self.b.and_all(conj).unwrap());
        }
        self.b.sum(summands).unwrap()
    }

    fn last(&mut self) -> TermId {
        let yes = self.b.yes();
        self.rec("x", |g, x| g.psum(vec![(g.zero, x), (g.one, x), (g.dollar, yes)]))
    }

    fn gap_a(&mut self) -> TermId {
        let perm = self.perm(Terminator::Hash);
        let perm2 = self.perm(Terminator::Hash);
        let sl = self.skip_last(perm2);
        let nd = self.next_dollar(sl);
        let matching = self.matching();
        let body = self.b.and_all([perm, nd, matching]).unwrap();
        self.skip_hash(body)
    }

    /// Reads the leading `#`, then each word checks membership in `W`, and
    /// either ends the sequence with `$` or is smaller than the next word.
    fn gap_u(&mut self) -> TermId {
        let perm = self.perm(Terminator::HashOrDollar);
        let last = self.last();
        let smaller = self.smaller();
        let body = self.rec("x", |g, x| {
            let next = g.next_hash(x);
            let cont = g.b.and(smaller, next);
            let alt = g.b.or(last, cont);
            g.b.and(perm, alt)
        });
        self.psum(vec![(self.hash, body)])
    }
}

fn parse_bits(s: &str, len: usize) -> Result<Bits> {
    if s.len() != len || !s.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::InvalidArgument(format!("expected a block of {len} bits, got `{s}`")));
    }
    Ok(s.bytes().map(|c| c - b'0').collect())
}

/// One auxiliary monitor. Skip and next monitors take a continuation,
/// `find`, `match` take a block of `l+1` bits and `no_more` a block index of
/// `l` bits.
pub fn build_aux(kind: AuxKind, p: GapParams, arg: &AuxArg) -> Result<Monitor> {
    let mut g = Gen::new(p);
    let cont = |g: &mut Gen| -> Result<TermId> {
        match arg {
            AuxArg::Monitor(m) => {
                m.alphabet().check_same(&gap_alphabet())?;
                m.require_closed()?;
                Ok(g.b.import(m.store(), m.root()))
            }
            _ => Err(Error::InvalidArgument(format!("{} needs a continuation monitor", kind.name()))),
        }
    };
    let bits = |len: usize| -> Result<Bits> {
        match arg {
            AuxArg::Bits(s) => parse_bits(s, len),
            _ => Err(Error::InvalidArgument(format!("{} needs a block of {len} bits", kind.name()))),
        }
    };
    let root = match kind {
        AuxKind::SkipHash => {
            let m = cont(&mut g)?;
            g.skip_hash(m)
        }
        AuxKind::NextHash => {
            let m = cont(&mut g)?;
            g.next_hash(m)
        }
        AuxKind::NextDollar => {
            let m = cont(&mut g)?;
            g.next_dollar(m)
        }
        AuxKind::SkipLast => {
            let m = cont(&mut g)?;
            g.skip_last(m)
        }
        AuxKind::All => g.all(),
        AuxKind::NoMore => g.no_more(&bits(p.l())?, Terminator::Hash),
        AuxKind::Unique => g.unique(Terminator::Hash),
        AuxKind::Perm => g.perm(Terminator::Hash),
        AuxKind::Find => g.find(&bits(p.block_len())?),
        AuxKind::Match => g.match_(&bits(p.block_len())?),
        AuxKind::Matching => g.matching(),
        AuxKind::Smaller => g.smaller(),
        AuxKind::Last => g.last(),
    };
    Ok(g.b.finish(root))
}

pub fn build_gap_monitor(family: Family, p: GapParams) -> Monitor {
    let mut g = Gen::new(p);
    let root = match family {
        Family::A => g.gap_a(),
        Family::U => g.gap_u(),
    };
    g.b.finish(root)
}

/// Words of `W` in a fixed order: index permutations in lexicographic order,
/// then bit assignments.
pub fn w_members(p: GapParams) -> Vec<String> {
    let idx: Vec<usize> = (0..p.k()).collect();
    let mut perms = Vec::new();
    permutations(&idx, &mut vec![], &mut vec![false; idx.len()], &mut perms);
    let mut out = Vec::new();
    for perm in &perms {
        for bits in all_bits(p.k()) {
            out.push(perm.iter().map(|&i| format!("{}{}", bin(i, p.l()), bits[i])).collect());
        }
    }
    out
}

fn permutations(items: &[usize], cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == items.len() {
        out.push(cur.clone());
        return;
    }
    for i in 0..items.len() {
        if !used[i] {
            used[i] = true;
            cur.push(items[i]);
            permutations(items, cur, used, out);
            cur.pop();
            used[i] = false;
        }
    }
}

/// Members of the family with all padding segments empty.
pub fn minimal_members(family: Family, p: GapParams) -> Vec<String> {
    let ws = w_members(p);
    let mut out = Vec::new();
    match family {
        Family::A => {
            for w in &ws {
                for w2 in &ws {
                    if equivalent(p, w, w2) {
                        out.push(format!("#{w}#$#{w2}#$"));
                    }
                }
            }
        }
        Family::U => {
            for w in &ws {
                out.push(format!("#{w}$"));
                for w2 in &ws {
                    if decode(p, w) < decode(p, w2) {
                        out.push(format!("#{w}#{w2}$"));
                    }
                }
            }
        }
    }
    out
}

/// Minimal members, each with every bit flipped in turn, every `$` deleted
/// and a `$` inserted at every position. Deduplicated, in first-seen order.
pub fn targeted_suite(family: Family, p: GapParams) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut push = |s: String| {
        if seen.insert(s.clone()) {
            out.push(s);
        }
    };
    for m in minimal_members(family, p) {
        push(m.clone());
        let chars: Vec<char> = m.chars().collect();
        for i in 0..chars.len() {
            let mut c = chars.clone();
            match c[i] {
                '0' => c[i] = '1',
                '1' => c[i] = '0',
                '$' => {
                    c.remove(i);
                }
                _ => continue,
            }
            push(c.into_iter().collect());
        }
        for i in 0..=chars.len() {
            let mut c = chars.clone();
            c.insert(i, '$');
            push(c.into_iter().collect());
        }
    }
    out
}

/// Random traces of length at most `max_len`: half uniform over the four
/// symbols, half assembled from words of `W` and separators.
pub fn random_suite<R: Rng>(rng: &mut R, p: GapParams, count: usize, max_len: usize) -> Vec<String> {
    let ws = w_members(p);
    (0..count)
        .map(|i| {
            if i % 2 == 0 {
                let n = rng.random_range(0..=max_len);
                (0..n).map(|_| ['0', '1', '#', '$'][rng.random_range(0..4)]).collect()
            } else {
                let mut s = String::new();
                while s.len() < max_len {
                    match rng.random_range(0..6) {
                        0 | 1 => s.push('#'),
                        2 => s.push('$'),
                        3 => s.push(if rng.random_bool(0.5) { '0' } else { '1' }),
                        _ => s.push_str(&ws[rng.random_range(0..ws.len())]),
                    }
                }
                s.truncate(rng.random_range(0..=max_len));
                s
            }
        })
        .collect()
}

/// Partition of `{0,1}^k` into halves `C`, `D` and one ordering of the
/// subsets of each. The non-empty subsets come first, in the order of the
/// permutation, followed by the empty subset, giving `K = 2^(2^(k-1))`
/// segments per side.
#[derive(Clone, Debug)]
pub struct TkParams {
    pub gap: GapParams,
    pub c: Vec<Bits>,
    pub d: Vec<Bits>,
    pub p_c: Vec<Vec<Bits>>,
    pub p_d: Vec<Vec<Bits>>,
}

fn subsets(set: &[Bits]) -> Vec<Vec<Bits>> {
    (1..1usize << set.len())
        .map(|mask| set.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, w)| w.clone()).collect())
        .collect()
}

impl TkParams {
    /// Largest `k` for which subsets are enumerated.
    pub const MAX_K: usize = 4;

    pub fn random<R: Rng>(gap: GapParams, rng: &mut R) -> Result<TkParams> {
        if gap.k() > Self::MAX_K {
            return Err(Error::ResourceLimit(format!("t_K needs k ≤ {}, got {}", Self::MAX_K, gap.k())));
        }
        let mut words = all_bits(gap.k());
        words.shuffle(rng);
        let half = words.len() / 2;
        let (c, d) = (words[..half].to_vec(), words[half..].to_vec());
        let order = |set: &[Bits], rng: &mut R| {
            let mut s = subsets(set);
            s.shuffle(rng);
            for x in &mut s {
                x.shuffle(rng);
            }
            s
        };
        let p_c = order(&c, rng);
        let p_d = order(&d, rng);
        let t = TkParams { gap, c, d, p_c, p_d };
        t.validate()?;
        Ok(t)
    }

    /// `K`, the number of segments per side.
    pub fn segments(&self) -> usize {
        1 << (1 << (self.gap.k() - 1))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("t_K parameters: {m}")));
        let k = self.gap.k();
        let mut all: Vec<Bits> = self.c.iter().chain(&self.d).cloned().collect();
        all.sort();
        if all != all_bits(k) || self.c.len() != self.d.len() {
            return bad("C and D must split {0,1}^k into halves");
        }
        for (side, perm) in [(&self.c, &self.p_c), (&self.d, &self.p_d)] {
            let mut seen: Vec<Vec<Bits>> = perm
                .iter()
                .map(|s| {
                    let mut s = s.clone();
                    s.sort();
                    s
                })
                .collect();
            if seen.iter().any(|s| s.is_empty() || s.iter().any(|w| !side.contains(w)) || s.windows(2).any(|p| p[0] == p[1])) {
                return bad("subsets must be non-empty subsets of their half");
            }
            seen.sort();
            seen.dedup();
            if seen.len() != perm.len() || perm.len() != self.segments() - 1 {
                return bad("each side must list every non-empty subset once");
            }
        }
        Ok(())
    }
}

fn segment(p: GapParams, words: &[Bits]) -> String {
    let mut s = String::from("#");
    for w in words {
        s.push_str(&enc(p, w));
        s.push('#');
    }
    s
}

/// `t_0 $ s_0 $ t_1 $ ⋯ $ t_{K-1} $ s_{K-1}`. Fails when the trace would be
/// longer than `max_len`.
pub fn build_tk(t: &TkParams, max_len: usize) -> Result<String> {
    t.validate()?;
    let p = t.gap;
    let empty: Vec<Bits> = vec![];
    let mut parts = Vec::new();
    for i in 0..t.segments() {
        parts.push(segment(p, t.p_c.get(i).unwrap_or(&empty)));
        parts.push(segment(p, t.p_d.get(i).unwrap_or(&empty)));
        let len: usize = parts.iter().map(|s| s.len() + 1).sum();
        if len > max_len + 1 {
            return Err(Error::ResourceLimit(format!("t_K is longer than {max_len} symbols")));
        }
    }
    Ok(parts.join("$"))
}

/// Sizes along the pipeline. Stages after a resource failure are absent and
/// the failure is kept in `note`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BlowupRow {
    pub label: String,
    pub parallel_size: u128,
    pub afa_states: Option<usize>,
    pub nfa_accept_states: Option<usize>,
    pub nfa_reject_states: Option<usize>,
    pub dfa_accept_states: Option<usize>,
    pub regular_size: Option<u128>,
    pub deterministic_size: Option<u128>,
    pub note: Option<String>,
}

impl BlowupRow {
    pub const COLUMNS: [&'static str; 9] = [
        "label",
        "parallel_size",
        "afa_states",
        "nfa_accept_states",
        "nfa_reject_states",
        "dfa_accept_states",
        "regular_size",
        "deterministic_size",
        "note",
    ];

    pub fn cells(&self) -> Vec<String> {
        fn opt<T: ToString>(x: &Option<T>) -> String {
            x.as_ref().map(|v| v.to_string()).unwrap_or_else(|| "-".into())
        }
        vec![
            self.label.clone(),
            self.parallel_size.to_string(),
            opt(&self.afa_states),
            opt(&self.nfa_accept_states),
            opt(&self.nfa_reject_states),
            opt(&self.dfa_accept_states),
            opt(&self.regular_size),
            opt(&self.deterministic_size),
            self.note.clone().unwrap_or_default(),
        ]
    }
}

/// Measures one monitor. Errors other than resource limits are returned.
pub fn measure(label: &str, m: &Monitor, limits: &Limits) -> Result<BlowupRow> {
    let mut row = BlowupRow { label: label.to_string(), parallel_size: m.size(), ..BlowupRow::default() };
    let mut stage = || -> Result<()> {
        row.afa_states = Some(monitor_to_afa(m, Polarity::Accept)?.len());
        row.nfa_accept_states = Some(monitor_nfa(m, Polarity::Accept, limits)?.1.nfa_states);
        row.nfa_reject_states = Some(monitor_nfa(m, Polarity::Reject, limits)?.1.nfa_states);
        row.dfa_accept_states = Some(monitor_dfa(m, Polarity::Accept, limits)?.1.dfa_states);
        row.regular_size = Some(parallel_to_regular(m, limits)?.monitor.size());
        row.deterministic_size = Some(parallel_to_deterministic(m, limits)?.monitor.size());
        Ok(())
    };
    match stage() {
        Ok(()) => {}
        Err(Error::ResourceLimit(msg)) => row.note = Some(msg),
        Err(e) => return Err(e),
    }
    Ok(row)
}

pub fn blowup_report(family: Family, p: GapParams, limits: &Limits) -> Result<BlowupRow> {
    let m = build_gap_monitor(family, p);
    measure(&format!("{}:l={}", family.name(), p.l()), &m, limits)
}
