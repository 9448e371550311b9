//! Alphabets and freely reduced words.
//!
//! A [`Word`] is a run-length encoded, freely reduced word over interned
//! generator symbols. Words are immutable values and the common currency of
//! every other module: multiplication, inversion and conjugation always
//! return reduced representatives.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;

/// Identifier of the scheme node that introduced a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScopeId(pub u32);

/// An interned generator symbol. Cheap to copy; resolved against a
/// [`SymbolTable`] for printing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u32);

/// Interner for generator symbols. `(name, scope)` pairs are unique; the
/// printable name alone need not be, so printers resolve through the table
/// of the scheme tree at hand (validation rejects trees with duplicate
/// printable names).
#[derive(Debug, Default, Clone)]
pub struct SymbolTable {
    names: Vec<(String, ScopeId)>,
    index: BTreeMap<(String, ScopeId), Symbol>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns `(name, scope)`. Returns the existing symbol when the pair was
    /// seen before.
    pub fn intern(&mut self, name: &str, scope: ScopeId) -> Symbol {
        if let Some(&s) = self.index.get(&(name.to_owned(), scope)) {
            return s;
        }
        let sym = Symbol(self.names.len() as u32);
        self.names.push((name.to_owned(), scope));
        self.index.insert((name.to_owned(), scope), sym);
        sym
    }

    pub fn name(&self, sym: Symbol) -> &str {
        &self.names[sym.0 as usize].0
    }

    pub fn scope(&self, sym: Symbol) -> ScopeId {
        self.names[sym.0 as usize].1
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// A freely reduced word: adjacent syllables carry distinct symbols and no
/// exponent is zero. The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    syllables: Vec<(Symbol, i64)>,
}

impl Word {
    /// The identity element.
    pub fn identity() -> Self {
        Word { syllables: Vec::new() }
    }

    /// A single generator.
    pub fn generator(sym: Symbol) -> Self {
        Word { syllables: vec![(sym, 1)] }
    }

    /// A single syllable `sym^exp`; the identity when `exp == 0`.
    pub fn syllable(sym: Symbol, exp: i64) -> Self {
        if exp == 0 {
            Word::identity()
        } else {
            Word { syllables: vec![(sym, exp)] }
        }
    }

    /// Free reduction of a raw syllable list.
    pub fn reduce(raw: &[(Symbol, i64)]) -> Self {
        let mut out: Vec<(Symbol, i64)> = Vec::with_capacity(raw.len());
        for &(sym, exp) in raw {
            if exp == 0 {
                continue;
            }
            match out.last_mut() {
                Some((top, e)) if *top == sym => {
                    *e += exp;
                    if *e == 0 {
                        out.pop();
                    }
                }
                _ => out.push((sym, exp)),
            }
        }
        Word { syllables: out }
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllables(&self) -> &[(Symbol, i64)] {
        &self.syllables
    }

    /// Number of letters counted with multiplicity.
    pub fn len(&self) -> usize {
        self.syllables.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Iterates over single letters `(symbol, ±1)` from left to right.
    pub fn letters(&self) -> impl Iterator<Item = (Symbol, i64)> + '_ {
        self.syllables.iter().flat_map(|&(sym, exp)| {
            let sign = exp.signum();
            (0..exp.unsigned_abs()).map(move |_| (sym, sign))
        })
    }

    pub fn mul(&self, rhs: &Word) -> Word {
        let mut raw = Vec::with_capacity(self.syllables.len() + rhs.syllables.len());
        raw.extend_from_slice(&self.syllables);
        raw.extend_from_slice(&rhs.syllables);
        Word::reduce(&raw)
    }

    pub fn inv(&self) -> Word {
        let syllables = self.syllables.iter().rev().map(|&(s, e)| (s, -e)).collect();
        Word { syllables }
    }

    /// `self^by = by^-1 · self · by`.
    pub fn conj(&self, by: &Word) -> Word {
        by.inv().mul(self).mul(by)
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inv() } else { self.clone() };
        let mut acc = Word::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Multiplies a sequence of words.
    pub fn product<'a>(parts: impl IntoIterator<Item = &'a Word>) -> Word {
        let mut raw = Vec::new();
        for p in parts {
            raw.extend_from_slice(&p.syllables);
        }
        Word::reduce(&raw)
    }

    /// The set of distinct symbols occurring in the word.
    pub fn support(&self) -> impl Iterator<Item = Symbol> + '_ {
        let mut seen = std::collections::BTreeSet::new();
        self.syllables
            .iter()
            .filter_map(move |&(s, _)| if seen.insert(s) { Some(s) } else { None })
    }

    /// Renders the word using the table's printable names. The identity
    /// prints as `1`; inverses use `^-1`.
    pub fn display<'a>(&'a self, table: &'a SymbolTable) -> WordDisplay<'a> {
        WordDisplay { word: self, table }
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    table: &'a SymbolTable,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return write!(f, "1");
        }
        for (i, &(sym, exp)) in self.word.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if exp == 1 {
                write!(f, "{}", self.table.name(sym))?;
            } else {
                write!(f, "{}^{}", self.table.name(sym), exp)?;
            }
        }
        Ok(())
    }
}

/// Parses a word over the given alphabet.
///
/// Grammar: `word := term { term }`, `term := symbol [ '^' sexpr ]`,
/// `sexpr := integer | '(' word ')'`, with whitespace separating terms.
/// `x^(w)` is conjugation sugar for `w^-1 x w`; the literal `1` is the
/// identity.
pub fn parse_word(input: &str, resolve: &BTreeMap<String, Symbol>) -> Result<Word> {
    let mut parser = WordParser { chars: input.char_indices().peekable(), input };
    let w = parser.word(resolve, true)?;
    parser.skip_ws();
    if let Some(&(pos, c)) = parser.chars.peek() {
        return Err(parser.err(pos, format!("unexpected character `{c}`")));
    }
    Ok(w)
}

struct WordParser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    input: &'a str,
}

impl<'a> WordParser<'a> {
    fn err(&self, pos: usize, msg: String) -> Error {
        let col = self.input[..pos].chars().count() + 1;
        Error::Parse { line: 1, col, msg }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(&(_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn word(&mut self, resolve: &BTreeMap<String, Symbol>, top: bool) -> Result<Word> {
        let mut acc = Word::identity();
        let mut any = false;
        loop {
            self.skip_ws();
            match self.chars.peek() {
                None => break,
                Some(&(_, ')')) if !top => break,
                Some(&(pos, c)) => {
                    if c == '1' {
                        self.chars.next();
                        any = true;
                        continue;
                    }
                    if !(c.is_alphabetic() || c == '_') {
                        return Err(self.err(pos, format!("expected a generator, found `{c}`")));
                    }
                    let term = self.term(resolve)?;
                    acc = acc.mul(&term);
                    any = true;
                }
            }
        }
        if !any && top {
            // an empty string is not a word; the identity is written `1`
            return Err(self.err(0, "empty word (write `1` for the identity)".into()));
        }
        Ok(acc)
    }

    fn term(&mut self, resolve: &BTreeMap<String, Symbol>) -> Result<Word> {
        let (start, _) = *self.chars.peek().expect("caller checked");
        let mut end = start;
        while let Some(&(pos, c)) = self.chars.peek() {
            if c.is_alphanumeric() || c == '_' || c == '\'' {
                end = pos + c.len_utf8();
                self.chars.next();
            } else {
                break;
            }
        }
        let name = &self.input[start..end];
        let sym = *resolve
            .get(name)
            .ok_or_else(|| self.err(start, format!("unknown generator `{name}`")))?;
        if matches!(self.chars.peek(), Some(&(_, '^'))) {
            self.chars.next();
            match self.chars.peek() {
                Some(&(_, '(')) => {
                    self.chars.next();
                    let by = self.word(resolve, false)?;
                    match self.chars.next() {
                        Some((_, ')')) => {}
                        other => {
                            let pos = other.map(|(p, _)| p).unwrap_or(self.input.len());
                            return Err(self.err(pos, "expected `)`".into()));
                        }
                    }
                    Ok(Word::generator(sym).conj(&by))
                }
                _ => {
                    let exp = self.integer()?;
                    Ok(Word::syllable(sym, exp))
                }
            }
        } else {
            Ok(Word::generator(sym))
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let mut sign = 1i64;
        if matches!(self.chars.peek(), Some(&(_, '-'))) {
            self.chars.next();
            sign = -1;
        }
        let mut digits = String::new();
        let start = self.chars.peek().map(|&(p, _)| p).unwrap_or(self.input.len());
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_ascii_digit() {
                digits.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        if digits.is_empty() {
            return Err(self.err(start, "expected an integer exponent".into()));
        }
        digits
            .parse::<i64>()
            .map(|v| sign * v)
            .map_err(|_| self.err(start, "exponent out of range".into()))
    }
}

/// A function `Z -> Z` with finite support, stored as its nonzero values.
/// Two sequences are equal iff their maps are equal, so appending or
/// prepending zeros never distinguishes them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FinSupportSeq {
    entries: BTreeMap<i64, i64>,
}

impl FinSupportSeq {
    /// Normalizes a dense value list whose first entry sits at `offset`.
    pub fn from_values(values: &[i64], offset: i64) -> Self {
        let mut entries = BTreeMap::new();
        for (i, &v) in values.iter().enumerate() {
            if v != 0 {
                entries.insert(offset + i as i64, v);
            }
        }
        FinSupportSeq { entries }
    }

    pub fn from_entries(pairs: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut entries = BTreeMap::new();
        for (i, v) in pairs {
            if v != 0 {
                entries.insert(i, v);
            }
        }
        FinSupportSeq { entries }
    }

    pub fn value(&self, index: i64) -> i64 {
        self.entries.get(&index).copied().unwrap_or(0)
    }

    /// Support indices in increasing order with their values.
    pub fn entries(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.entries.iter().map(|(&i, &v)| (i, v))
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_support(&self) -> Option<i64> {
        self.entries.keys().next_back().copied()
    }

    pub fn min_support(&self) -> Option<i64> {
        self.entries.keys().next().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fixture() -> (SymbolTable, Symbol, Symbol) {
        let mut t = SymbolTable::new();
        let b = t.intern("b", ScopeId(0));
        let c = t.intern("c", ScopeId(0));
        (t, b, c)
    }

    #[test]
    fn reduce_cancels_adjacent_inverses() {
        let (_, b, _) = fixture();
        assert!(Word::reduce(&[(b, 1), (b, -1)]).is_identity());
    }

    #[test]
    fn reduce_keeps_reduced_words() {
        let (_, b, c) = fixture();
        let w = Word::reduce(&[(c, -1), (b, 1), (c, 1)]);
        assert_eq!(w.syllables(), &[(c, -1), (b, 1), (c, 1)]);
    }

    #[test]
    fn reduce_collapses_nested_cancellation() {
        let (_, b, c) = fixture();
        // b^2 b^-1 c^3 c^-3 b^-1
        let w = Word::reduce(&[(b, 2), (b, -1), (c, 3), (c, -3), (b, -1)]);
        assert!(w.is_identity());
    }

    #[test]
    fn conjugation_convention() {
        let (t, b, c) = fixture();
        let conj = Word::generator(b).conj(&Word::generator(c));
        assert_eq!(format!("{}", conj.display(&t)), "c^-1 b c");
    }

    #[test]
    fn inverse_of_conjugate() {
        let (t, b, c) = fixture();
        let w = Word::generator(b).conj(&Word::generator(c));
        assert_eq!(format!("{}", w.inv().display(&t)), "c^-1 b^-1 c");
    }

    #[test]
    fn mul_by_inverse_is_identity() {
        let (_, b, _) = fixture();
        let w = Word::generator(b);
        assert!(w.mul(&w.inv()).is_identity());
    }

    #[test]
    fn parse_and_print_round_trip() {
        let (t, b, c) = fixture();
        let mut names = BTreeMap::new();
        names.insert("b".to_string(), b);
        names.insert("c".to_string(), c);
        let w = parse_word("c^-1 b c^3", &names).unwrap();
        assert_eq!(format!("{}", w.display(&t)), "c^-1 b c^3");
        assert_eq!(parse_word("1", &names).unwrap(), Word::identity());
        // conjugation sugar
        let s = parse_word("b^(c c)", &names).unwrap();
        assert_eq!(s, Word::generator(b).conj(&Word::generator(c).pow(2)));
    }

    #[test]
    fn parse_rejects_unknown_symbols() {
        let (_, b, _) = fixture();
        let mut names = BTreeMap::new();
        names.insert("b".to_string(), b);
        assert!(matches!(parse_word("b z", &names), Err(Error::Parse { .. })));
    }

    #[test]
    fn seq_normalization_drops_zeros() {
        let f = FinSupportSeq::from_values(&[0, 0, 5, -1, 0, 0, 2, 2], 0);
        let expected = FinSupportSeq::from_entries([(2, 5), (3, -1), (6, 2), (7, 2)]);
        assert_eq!(f, expected);
        // padding with extra zeros is identified
        let padded = FinSupportSeq::from_values(&[0, 0, 5, -1, 0, 0, 2, 2, 0, 0, 0, 0], 0);
        assert_eq!(f, padded);
    }

    #[test]
    fn zero_seq_is_empty() {
        assert!(FinSupportSeq::from_values(&[0, 0, 0], 0).is_zero());
    }

    #[test]
    fn seq_from_example_values() {
        let f = FinSupportSeq::from_values(&[5, 2, -7, 1], 0);
        let expected = FinSupportSeq::from_entries([(0, 5), (1, 2), (2, -7), (3, 1)]);
        assert_eq!(f, expected);
    }

    fn arb_raw() -> impl Strategy<Value = Vec<(Symbol, i64)>> {
        proptest::collection::vec((0u32..3, -4i64..=4), 0..32)
            .prop_map(|v| v.into_iter().map(|(s, e)| (Symbol(s), e)).collect())
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(raw in arb_raw()) {
            let once = Word::reduce(&raw);
            let twice = Word::reduce(once.syllables());
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn right_inverse_cancels(raw in arb_raw()) {
            let w = Word::reduce(&raw);
            prop_assert!(w.mul(&w.inv()).is_identity());
        }

        #[test]
        fn display_round_trips(raw in arb_raw()) {
            let mut t = SymbolTable::new();
            let names: Vec<(String, Symbol)> = ["b", "c", "d"]
                .iter()
                .map(|n| (n.to_string(), t.intern(n, ScopeId(0))))
                .collect();
            let resolve: BTreeMap<String, Symbol> = names.into_iter().collect();
            let w = Word::reduce(&raw);
            let printed = format!("{}", w.display(&t));
            let parsed = parse_word(&printed, &resolve).unwrap();
            prop_assert_eq!(w, parsed);
        }
    }
}
