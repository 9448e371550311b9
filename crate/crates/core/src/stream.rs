//! Generator streams: indexed families of conjugates that present
//! infinitely generated subgroups on demand.
//!
//! The streams used here are families `x^(c^i)` of conjugates of free
//! generators by powers of a fixed letter, over index domains such as
//! `i >= m` or `i <= m-1`. Membership is exact: a candidate word is
//! rewritten over the conjugate basis of the kernel of the `c`-exponent
//! map, and the rewrite support is compared against the allowed domain.

use crate::scheme::SchemeId;
use crate::words::{Symbol, Word};
use std::collections::BTreeMap;

/// A set of integer indices assembled from (possibly unbounded) ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexDomain {
    /// Closed ranges `(lo, hi)`; `None` means unbounded on that side.
    ranges: Vec<(Option<i64>, Option<i64>)>,
}

impl IndexDomain {
    pub fn at_least(m: i64) -> Self {
        IndexDomain { ranges: vec![(Some(m), None)] }
    }

    pub fn at_most(m: i64) -> Self {
        IndexDomain { ranges: vec![(None, Some(m))] }
    }

    pub fn only(i: i64) -> Self {
        IndexDomain { ranges: vec![(Some(i), Some(i))] }
    }

    pub fn union(mut self, other: IndexDomain) -> Self {
        self.ranges.extend(other.ranges);
        self
    }

    pub fn contains(&self, i: i64) -> bool {
        self.ranges.iter().any(|&(lo, hi)| {
            lo.map_or(true, |l| i >= l) && hi.map_or(true, |h| i <= h)
        })
    }

    /// Enumerates each range outward from its finite boundary; ranges are
    /// interleaved round-robin. Panics on a doubly-unbounded range.
    fn enumerate(&self, count: usize) -> Vec<i64> {
        let mut iters: Vec<Box<dyn Iterator<Item = i64>>> = self
            .ranges
            .iter()
            .map(|&(lo, hi)| -> Box<dyn Iterator<Item = i64>> {
                match (lo, hi) {
                    (Some(l), None) => Box::new(l..),
                    (None, Some(h)) => Box::new((0..).map(move |k| h - k)),
                    (Some(l), Some(h)) => Box::new(l..=h),
                    (None, None) => panic!("doubly unbounded index range"),
                }
            })
            .collect();
        let mut out = Vec::with_capacity(count);
        let mut exhausted = vec![false; iters.len()];
        while out.len() < count && exhausted.iter().any(|e| !e) {
            for (it, done) in iters.iter_mut().zip(exhausted.iter_mut()) {
                if out.len() >= count || *done {
                    continue;
                }
                match it.next() {
                    Some(i) => {
                        if !out.contains(&i) {
                            out.push(i);
                        }
                    }
                    None => *done = true,
                }
            }
        }
        out
    }

    /// Indices of the domain inside `[lo, hi]`.
    pub fn clamp(&self, lo: i64, hi: i64) -> Vec<i64> {
        let mut out: Vec<i64> = (lo..=hi).filter(|&i| self.contains(i)).collect();
        out.dedup();
        out
    }
}

/// One rewritten occurrence: `letter` conjugated to level `level`, with a
/// nonzero exponent.
pub type LevelToken = (Symbol, i64, i64);

/// Stream of conjugate generators `letter^(conj^i)` over per-letter index
/// domains, presenting a subgroup of the free group `ambient`.
#[derive(Debug, Clone)]
pub struct GeneratorStream {
    ambient: SchemeId,
    conj: Symbol,
    families: BTreeMap<Symbol, IndexDomain>,
    /// family order for deterministic truncation
    order: Vec<Symbol>,
}

impl GeneratorStream {
    pub fn new(ambient: SchemeId, conj: Symbol) -> Self {
        GeneratorStream { ambient, conj, families: BTreeMap::new(), order: Vec::new() }
    }

    pub fn with_family(mut self, letter: Symbol, domain: IndexDomain) -> Self {
        match self.families.entry(letter) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let merged = e.get().clone().union(domain);
                e.insert(merged);
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(domain);
                self.order.push(letter);
            }
        }
        self
    }

    pub fn ambient(&self) -> SchemeId {
        self.ambient
    }

    pub fn conj_letter(&self) -> Symbol {
        self.conj
    }

    pub fn families(&self) -> impl Iterator<Item = (Symbol, &IndexDomain)> {
        self.order.iter().map(|&s| (s, &self.families[&s]))
    }

    /// The generator `letter^(conj^i)`.
    pub fn word_at(&self, letter: Symbol, i: i64) -> Word {
        Word::generator(letter).conj(&Word::generator(self.conj).pow(i))
    }

    /// First `k` generators; truncations are nested.
    pub fn truncate(&self, k: usize) -> Vec<Word> {
        let mut per_family: Vec<(Symbol, Vec<i64>)> = self
            .order
            .iter()
            .map(|&s| (s, self.families[&s].enumerate(k)))
            .collect();
        let mut out = Vec::with_capacity(k);
        let mut pos = 0usize;
        while out.len() < k {
            let mut advanced = false;
            for (sym, indices) in per_family.iter_mut() {
                if out.len() >= k {
                    break;
                }
                if pos < indices.len() {
                    out.push(self.word_at(*sym, indices[pos]));
                    advanced = true;
                }
            }
            if !advanced {
                break;
            }
            pos += 1;
        }
        out
    }

    /// Generators for all domain indices inside `[lo, hi]`.
    pub fn generators_in_window(&self, lo: i64, hi: i64) -> Vec<Word> {
        let mut out = Vec::new();
        for &sym in &self.order {
            for i in self.families[&sym].clamp(lo, hi) {
                out.push(self.word_at(sym, i));
            }
        }
        out
    }

    /// Rewrites `w` over the conjugate family alphabet: every non-`conj`
    /// letter occurrence becomes a token `x^(conj^i)` where `i` is the
    /// negated running `conj`-exponent (so `c^-i x c^i` reads as index `i`).
    /// Returns `None` when `w` uses letters outside the families or has a
    /// nonzero total `conj`-exponent (then `w` is not even in the kernel).
    pub fn level_tokens(&self, w: &Word) -> Option<Vec<LevelToken>> {
        let mut level = 0i64;
        let mut tokens: Vec<LevelToken> = Vec::new();
        for (sym, sign) in w.letters() {
            if sym == self.conj {
                level += sign;
            } else if self.families.contains_key(&sym) {
                let index = -level;
                match tokens.last_mut() {
                    Some((s, l, e)) if *s == sym && *l == index => {
                        *e += sign;
                        if *e == 0 {
                            tokens.pop();
                        }
                    }
                    _ => tokens.push((sym, index, sign)),
                }
            } else {
                return None;
            }
        }
        if level != 0 {
            return None;
        }
        Some(tokens)
    }

    /// Exact membership in the subgroup generated by the stream: the token
    /// rewrite is the unique expression over the conjugate basis, so `w`
    /// belongs iff every token level is allowed. Returns the witness tokens.
    pub fn member(&self, w: &Word) -> Option<Vec<LevelToken>> {
        let tokens = self.level_tokens(w)?;
        if tokens.iter().all(|&(s, l, _)| self.families[&s].contains(l)) {
            Some(tokens)
        } else {
            None
        }
    }

    /// Finite endpoints of the index domains (window anchors).
    pub fn boundary_levels(&self) -> Vec<i64> {
        let mut out = Vec::new();
        for dom in self.families.values() {
            for &(lo, hi) in &dom.ranges {
                if let Some(l) = lo {
                    out.push(l);
                }
                if let Some(h) = hi {
                    out.push(h);
                }
            }
        }
        out
    }

    /// Smallest and largest family index occurring in `w`, if any.
    pub fn level_span(&self, w: &Word) -> Option<(i64, i64)> {
        let mut level = 0i64;
        let mut span: Option<(i64, i64)> = None;
        for (sym, sign) in w.letters() {
            if sym == self.conj {
                level += sign;
            } else if self.families.contains_key(&sym) {
                let index = -level;
                span = Some(match span {
                    None => (index, index),
                    Some((lo, hi)) => (lo.min(index), hi.max(index)),
                });
            }
        }
        span
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{ScopeId, SymbolTable};

    fn fixture() -> (SymbolTable, Symbol, Symbol) {
        let mut t = SymbolTable::new();
        let b = t.intern("b", ScopeId(0));
        let c = t.intern("c", ScopeId(0));
        (t, b, c)
    }

    #[test]
    fn truncations_are_nested() {
        let (_, b, c) = fixture();
        let s = GeneratorStream::new(ScopeId(0), c).with_family(b, IndexDomain::at_least(3));
        let t2 = s.truncate(2);
        let t5 = s.truncate(5);
        assert_eq!(&t5[..2], &t2[..]);
        assert_eq!(t2[0], s.word_at(b, 3));
        assert_eq!(t2[1], s.word_at(b, 4));
    }

    #[test]
    fn descending_stream_enumerates_downward() {
        let (_, b, c) = fixture();
        let s = GeneratorStream::new(ScopeId(0), c).with_family(b, IndexDomain::at_most(-1));
        let t = s.truncate(2);
        assert_eq!(t[0], s.word_at(b, -1));
        assert_eq!(t[1], s.word_at(b, -2));
    }

    #[test]
    fn membership_by_level_rewriting() {
        let (_, b, c) = fixture();
        let s = GeneratorStream::new(ScopeId(0), c).with_family(b, IndexDomain::at_least(0));
        // b_1 b_3^-2 lies in ⟨b_0, b_1, ...⟩
        let w = s.word_at(b, 1).mul(&s.word_at(b, 3).pow(-2));
        let tokens = s.member(&w).unwrap();
        assert_eq!(tokens, vec![(b, 1, 1), (b, 3, -2)]);
        // b_-1 does not
        assert!(s.member(&s.word_at(b, -1)).is_none());
        // c alone is not in the kernel
        assert!(s.member(&Word::generator(c)).is_none());
    }

    #[test]
    fn two_sided_domains_merge() {
        let (_, b, c) = fixture();
        let s = GeneratorStream::new(ScopeId(0), c)
            .with_family(b, IndexDomain::at_least(2).union(IndexDomain::at_most(-1)));
        assert!(s.member(&s.word_at(b, 2)).is_some());
        assert!(s.member(&s.word_at(b, -4)).is_some());
        assert!(s.member(&s.word_at(b, 0)).is_none());
        assert!(s.member(&s.word_at(b, 1)).is_none());
    }

    #[test]
    fn fixed_letter_as_level_zero_family() {
        let mut t = SymbolTable::new();
        let a = t.intern("a", ScopeId(0));
        let b = t.intern("b", ScopeId(0));
        let c = t.intern("c", ScopeId(0));
        let s = GeneratorStream::new(ScopeId(0), c)
            .with_family(b, IndexDomain::at_least(1))
            .with_family(a, IndexDomain::only(0));
        assert!(s.member(&Word::generator(a)).is_some());
        // a conjugated away from level zero is rejected
        assert!(s.member(&Word::generator(a).conj(&Word::generator(c))).is_none());
        let mixed = Word::generator(a).mul(&s.word_at(b, 2)).mul(&Word::generator(a).inv());
        assert!(s.member(&mixed).is_some());
    }
}
