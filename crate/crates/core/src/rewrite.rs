//! Normal forms and the word problem over scheme trees.
//!
//! HNN nodes reduce by pinch elimination (Britton); amalgam nodes by
//! alternating-factor reduction with migration through the identified
//! subgroups. Over free bases the reduction splits off canonical coset
//! representatives, giving unique normal forms; over nested bases the
//! forms are pinch-free and sound for triviality, which is all the word
//! problem needs.

use crate::error::{Error, Result};
use crate::scheme::{HnnExtension, Pairing, SchemeId, SchemeNode, Workspace};
use crate::subgroup::{self, SubgroupHandle};
use crate::words::{Symbol, Word};
use std::collections::{BTreeMap, VecDeque};

/// Outcome of a decision procedure that may be legitimately partial.
#[derive(Debug, Clone)]
pub enum Verdict {
    Yes(Option<Witness>),
    No,
    Unknown(String),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }
}

/// A membership witness: a product over subgroup generators (or basis
/// elements) whose expansion equals the queried element.
#[derive(Debug, Clone)]
pub struct Witness {
    pub factors: Vec<(Word, i64)>,
}

impl Witness {
    pub fn expand(&self) -> Word {
        let mut acc = Word::identity();
        for (w, e) in &self.factors {
            acc = acc.mul(&w.pow(*e));
        }
        acc
    }
}

/// One `t^sign · rep` block of an HNN normal form.
#[derive(Debug, Clone)]
pub struct HnnSyllable {
    pub ext_index: usize,
    pub letter: Symbol,
    pub sign: i64,
    pub rep: Word,
}

/// Pinch-free form `head · t^{e_1} l_1 · ... · t^{e_n} l_n` with the head
/// and all representatives in the base group.
#[derive(Debug, Clone)]
pub struct HnnNormalForm {
    pub head: Word,
    pub tail: Vec<HnnSyllable>,
}

impl HnnNormalForm {
    pub fn expand(&self) -> Word {
        let mut acc = self.head.clone();
        for syl in &self.tail {
            acc = acc.mul(&Word::syllable(syl.letter, syl.sign)).mul(&syl.rep);
        }
        acc
    }

    pub fn has_stable_letters(&self) -> bool {
        !self.tail.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorSide {
    Left,
    Right,
}

impl FactorSide {
    pub fn other(self) -> FactorSide {
        match self {
            FactorSide::Left => FactorSide::Right,
            FactorSide::Right => FactorSide::Left,
        }
    }
}

/// Alternating form `head · l_1 · ... · l_n`: the head lies in the
/// amalgamated subgroup (written in left-factor coordinates) and
/// consecutive representatives come from different factors.
#[derive(Debug, Clone)]
pub struct AmalgamSyllable {
    pub side: FactorSide,
    pub rep: Word,
}

#[derive(Debug, Clone)]
pub struct AmalgamNormalForm {
    pub head: Word,
    pub tail: Vec<AmalgamSyllable>,
}

impl AmalgamNormalForm {
    pub fn expand(&self) -> Word {
        let mut acc = self.head.clone();
        for syl in &self.tail {
            acc = acc.mul(&syl.rep);
        }
        acc
    }
}

/// Splits `h = inside · rep` against an associated subgroup. Over a free
/// ambient with a Stallings handle the representative is the canonical
/// coset representative; otherwise the split is all-or-nothing, decided by
/// the handle's membership strategy. The inside part comes back written
/// over the subgroup's own letters (whole-factor members of a nested
/// construction may arrive spelled differently).
fn split(ws: &Workspace, handle: &SubgroupHandle, h: &Word) -> Result<(Word, Word)> {
    if let Some(aut) = handle.automaton() {
        return aut.coset_split(h);
    }
    if let crate::subgroup::Strategy::Factor { node } = handle.strategy() {
        return match subgroup::factor_normal_form(ws, handle.ambient(), *node, h)? {
            subgroup::FactorOutcome::Inside(rewritten) => Ok((rewritten, Word::identity())),
            subgroup::FactorOutcome::Outside => Ok((Word::identity(), h.clone())),
            subgroup::FactorOutcome::Undecided(r) => Err(Error::UnsupportedMembership(r)),
        };
    }
    match subgroup::member(ws, handle, h)? {
        Verdict::Yes(_) if matches!(handle.strategy(), crate::subgroup::Strategy::Trivial) => {
            Ok((Word::identity(), Word::identity()))
        }
        Verdict::Yes(_) => Ok((h.clone(), Word::identity())),
        Verdict::No => Ok((Word::identity(), h.clone())),
        Verdict::Unknown(reason) => Err(Error::UnsupportedMembership(reason)),
    }
}

enum Item {
    Chunk(Word),
    Stable(usize, i64),
}

/// Britton reduction over a (possibly multi-letter) HNN node: eliminates
/// every pinch `t^-1 a t` (`a` in the associated subgroup) and `t b t^-1`
/// (`b` in its image), splitting canonical representatives off every base
/// chunk where the base is free.
pub fn britton_reduce(ws: &Workspace, node: SchemeId, w: &Word) -> Result<HnnNormalForm> {
    let (base, extensions) = match ws.node(node) {
        SchemeNode::Hnn { base, extensions } => (*base, extensions),
        _ => return Err(Error::InvalidScheme("expected an HNN node".into())),
    };
    let letter_index: BTreeMap<Symbol, usize> =
        extensions.iter().enumerate().map(|(i, e)| (e.letter, i)).collect();
    let base_alpha = ws.alphabet(base);

    let mut items: Vec<Item> = Vec::new();
    let mut chunk: Vec<(Symbol, i64)> = Vec::new();
    for (sym, sign) in w.letters() {
        if let Some(&i) = letter_index.get(&sym) {
            if !chunk.is_empty() {
                items.push(Item::Chunk(Word::reduce(&chunk)));
                chunk.clear();
            }
            items.push(Item::Stable(i, sign));
        } else if base_alpha.contains(&sym) {
            chunk.push((sym, sign));
        } else {
            return Err(Error::ForeignSymbol(ws.symbols().name(sym).to_string()));
        }
    }
    if !chunk.is_empty() {
        items.push(Item::Chunk(Word::reduce(&chunk)));
    }

    let mut head = Word::identity();
    let mut tail: VecDeque<HnnSyllable> = VecDeque::new();
    for item in items.into_iter().rev() {
        match item {
            Item::Chunk(g) => head = g.mul(&head),
            Item::Stable(i, sign) => {
                let ext = &extensions[i];
                // prepending t: split mod B and carry phi^-1 of the inside;
                // prepending t^-1: split mod A and carry phi of the inside
                let assoc = if sign > 0 { &ext.b } else { &ext.a };
                let (inside, rep) = split(ws, assoc, &head)?;
                let carried = if sign > 0 {
                    ext.pairing.preimage_of(&inside)?
                } else {
                    ext.pairing.image_of(&inside)?
                };
                let cancels = rep.is_identity()
                    && tail
                        .front()
                        .map(|f| f.ext_index == i && f.sign == -sign)
                        .unwrap_or(false);
                if cancels {
                    let front = tail.pop_front().expect("checked nonempty");
                    head = carried.mul(&front.rep);
                } else {
                    tail.push_front(HnnSyllable { ext_index: i, letter: ext.letter, sign, rep });
                    head = carried;
                }
            }
        }
    }
    Ok(HnnNormalForm { head, tail: tail.into() })
}

/// Greedy factor chunking: shared letters extend the run they follow.
fn amalgam_chunks(
    ws: &Workspace,
    left: SchemeId,
    right: SchemeId,
    w: &Word,
) -> Result<Vec<(FactorSide, Word)>> {
    let la = ws.alphabet(left);
    let ra = ws.alphabet(right);
    #[derive(Clone, Copy, PartialEq)]
    enum Mask {
        L,
        R,
        Both,
    }
    let classify = |sym: Symbol| -> Result<Mask> {
        match (la.contains(&sym), ra.contains(&sym)) {
            (true, true) => Ok(Mask::Both),
            (true, false) => Ok(Mask::L),
            (false, true) => Ok(Mask::R),
            (false, false) => Err(Error::ForeignSymbol(ws.symbols().name(sym).to_string())),
        }
    };
    let mut chunks: Vec<(FactorSide, Word)> = Vec::new();
    let mut cur: Vec<(Symbol, i64)> = Vec::new();
    let mut mask = Mask::Both;
    let finalize = |mask: Mask, cur: &[(Symbol, i64)], chunks: &mut Vec<(FactorSide, Word)>| {
        if cur.is_empty() {
            return;
        }
        let side = match mask {
            Mask::R => FactorSide::Right,
            _ => FactorSide::Left,
        };
        chunks.push((side, Word::reduce(cur)));
    };
    for (sym, sign) in w.letters() {
        let m = classify(sym)?;
        let joint = match (mask, m) {
            (Mask::Both, m) => Some(m),
            (m, Mask::Both) => Some(m),
            (a, b) if a == b => Some(a),
            _ => None,
        };
        match joint {
            Some(j) => {
                mask = j;
                cur.push((sym, sign));
            }
            None => {
                finalize(mask, &cur, &mut chunks);
                cur.clear();
                cur.push((sym, sign));
                mask = m;
            }
        }
    }
    finalize(mask, &cur, &mut chunks);
    Ok(chunks)
}

/// Alternating-sequence reduction over an amalgam node, peeling from the
/// right and migrating subgroup parts into the neighbouring factor.
pub fn amalgam_reduce(ws: &Workspace, node: SchemeId, w: &Word) -> Result<AmalgamNormalForm> {
    let (left, right, a, b, pairing) = match ws.node(node) {
        SchemeNode::Amalgam { left, right, a, b, pairing } => (*left, *right, a, b, pairing),
        _ => return Err(Error::InvalidScheme("expected an amalgam node".into())),
    };
    let chunks = amalgam_chunks(ws, left, right, w)?;
    reduce_chunks(ws, a, b, pairing, chunks)
}

/// Same reduction, starting from an explicit factor sequence.
pub fn amalgam_reduce_parts(
    ws: &Workspace,
    node: SchemeId,
    parts: &[Word],
) -> Result<AmalgamNormalForm> {
    let flat = Word::product(parts.iter());
    amalgam_reduce(ws, node, &flat)
}

fn reduce_chunks(
    ws: &Workspace,
    a: &SubgroupHandle,
    b: &SubgroupHandle,
    pairing: &Pairing,
    chunks: Vec<(FactorSide, Word)>,
) -> Result<AmalgamNormalForm> {
    // carry lives in left-factor coordinates
    let to_side = |side: FactorSide, v: &Word| -> Result<Word> {
        match side {
            FactorSide::Left => Ok(v.clone()),
            FactorSide::Right => pairing.image_of(v),
        }
    };
    let to_left = |side: FactorSide, v: &Word| -> Result<Word> {
        match side {
            FactorSide::Left => Ok(v.clone()),
            FactorSide::Right => pairing.preimage_of(v),
        }
    };
    let mut carry = Word::identity();
    let mut pending: Option<Word> = None;
    let mut tail: VecDeque<AmalgamSyllable> = VecDeque::new();
    for (k, (side, c)) in chunks.into_iter().enumerate().rev() {
        let mut combined = c.mul(&to_side(side, &carry)?);
        if let Some(extra) = pending.take() {
            combined = combined.mul(&extra);
        }
        let handle = match side {
            FactorSide::Left => a,
            FactorSide::Right => b,
        };
        let (inside, rep) = split(ws, handle, &combined)?;
        carry = to_left(side, &inside)?;
        if !rep.is_identity() {
            tail.push_front(AmalgamSyllable { side, rep });
        } else if k > 0 {
            if let Some(front) = tail.pop_front() {
                pending = Some(front.rep);
            }
        }
    }
    Ok(AmalgamNormalForm { head: carry, tail: tail.into() })
}

/// Canonical (or at least pinch-free and deterministic) flattened form.
/// Every syllable of the outer form is recursively normalized in its own
/// node before concatenation.
pub fn normal_form(ws: &Workspace, scheme: SchemeId, w: &Word) -> Result<Word> {
    match ws.node(scheme) {
        SchemeNode::Free { .. } => {
            for s in w.support() {
                if !ws.alphabet(scheme).contains(&s) {
                    return Err(Error::ForeignSymbol(ws.symbols().name(s).to_string()));
                }
            }
            Ok(w.clone())
        }
        SchemeNode::Hnn { base, .. } => {
            let base = *base;
            let form = britton_reduce(ws, scheme, w)?;
            let mut acc = normal_form(ws, base, &form.head)?;
            for syl in &form.tail {
                let rep = normal_form(ws, base, &syl.rep)?;
                acc = acc.mul(&Word::syllable(syl.letter, syl.sign)).mul(&rep);
            }
            Ok(acc)
        }
        SchemeNode::Amalgam { left, right, pairing, .. } => {
            let (left, right) = (*left, *right);
            let pairing = pairing.clone();
            let form = amalgam_reduce(ws, scheme, w)?;
            // flatten the head on the side of the first block, so factor
            // elements flatten to words over their own factor's letters
            let mut acc = match form.tail.first() {
                Some(syl) if syl.side == FactorSide::Right => {
                    normal_form(ws, right, &pairing.image_of(&form.head)?)?
                }
                _ => normal_form(ws, left, &form.head)?,
            };
            for syl in &form.tail {
                let factor = match syl.side {
                    FactorSide::Left => left,
                    FactorSide::Right => right,
                };
                acc = acc.mul(&normal_form(ws, factor, &syl.rep)?);
            }
            Ok(acc)
        }
        SchemeNode::Star { .. } => {
            let exp = ws
                .star_expansion(scheme)
                .ok_or_else(|| Error::InvalidScheme("star not expanded; call prepare()".into()))?;
            normal_form(ws, exp, w)
        }
    }
}

/// Word-problem verdict: is `w` the identity of the scheme's group?
pub fn is_trivial(ws: &Workspace, scheme: SchemeId, w: &Word) -> Result<Verdict> {
    match normal_form(ws, scheme, w) {
        Ok(nf) => Ok(if nf.is_identity() { Verdict::Yes(None) } else { Verdict::No }),
        Err(Error::UnsupportedMembership(reason)) => Ok(Verdict::Unknown(reason)),
        Err(e) => Err(e),
    }
}

/// Equality in the scheme's group, via `is_trivial(x · y^-1)`.
pub fn equal(ws: &Workspace, scheme: SchemeId, x: &Word, y: &Word) -> Result<Verdict> {
    is_trivial(ws, scheme, &x.mul(&y.inv()))
}

/// Access to the extension table of an HNN node.
pub fn hnn_extensions<'a>(ws: &'a Workspace, node: SchemeId) -> Result<(SchemeId, &'a [HnnExtension])> {
    match ws.node(node) {
        SchemeNode::Hnn { base, extensions } => Ok((*base, extensions)),
        _ => Err(Error::InvalidScheme("expected an HNN node".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::Pairing;
    use crate::subgroup::SubgroupHandle;

    /// F(b,c) with the HNN extension t fixing ⟨b⟩.
    fn hnn_fix_b() -> (Workspace, SchemeId, SchemeId) {
        let mut ws = Workspace::new();
        let g = ws.free(&["b", "c"]).unwrap();
        let a = SubgroupHandle::free(&ws, g, vec![ws.parse(g, "b").unwrap()]).unwrap();
        let node = ws.hnn(g, vec![("t", a.clone(), a, Pairing::Identity)]).unwrap();
        (ws, g, node)
    }

    #[test]
    fn britton_criterion_no_pinch() {
        let (ws, _, node) = hnn_fix_b();
        let w = ws.parse(node, "t^-1 c t").unwrap();
        let form = britton_reduce(&ws, node, &w).unwrap();
        assert!(form.head.is_identity());
        assert_eq!(form.tail.len(), 2);
        assert_eq!(form.tail[0].sign, -1);
        assert_eq!(ws.show(&form.tail[0].rep), "c");
        assert_eq!(form.tail[1].sign, 1);
        assert!(form.tail[1].rep.is_identity());
        // expanding reproduces the input
        assert_eq!(form.expand(), w);
    }

    #[test]
    fn britton_pinches_fixed_subgroup() {
        let (ws, _, node) = hnn_fix_b();
        let w = ws.parse(node, "t^-1 b^3 t").unwrap();
        let form = britton_reduce(&ws, node, &w).unwrap();
        assert!(form.tail.is_empty());
        assert_eq!(ws.show(&form.head), "b^3");
    }

    #[test]
    fn britton_is_idempotent_on_reduced_words() {
        let (ws, _, node) = hnn_fix_b();
        for input in ["t^-1 c t", "c t b t^-1 c", "t^2 b t^-1", "b t c t c^-1 t^-1"] {
            let w = ws.parse(node, input).unwrap();
            let once = britton_reduce(&ws, node, &w).unwrap();
            let again = britton_reduce(&ws, node, &once.expand()).unwrap();
            assert_eq!(once.expand(), again.expand(), "input {input}");
            let nf1 = normal_form(&ws, node, &w).unwrap();
            let nf2 = normal_form(&ws, node, &nf1).unwrap();
            assert_eq!(nf1, nf2, "normal form idempotence for {input}");
        }
    }

    #[test]
    fn word_problem_round_trip() {
        let (ws, _, node) = hnn_fix_b();
        let w = ws.parse(node, "t^-1 c t b c^-1").unwrap();
        assert!(is_trivial(&ws, node, &w.mul(&w.inv())).unwrap().is_yes());
        assert!(is_trivial(&ws, node, &ws.parse(node, "b").unwrap()).unwrap().is_no());
        assert!(is_trivial(&ws, node, &ws.parse(node, "t").unwrap()).unwrap().is_no());
        // t commutes with b but not with c
        assert!(equal(
            &ws,
            node,
            &ws.parse(node, "t^-1 b t").unwrap(),
            &ws.parse(node, "b").unwrap()
        )
        .unwrap()
        .is_yes());
        assert!(equal(
            &ws,
            node,
            &ws.parse(node, "t^-1 c t").unwrap(),
            &ws.parse(node, "c").unwrap()
        )
        .unwrap()
        .is_no());
    }

    /// Free product F(a) * F(b,c) as an amalgam over trivial subgroups.
    fn free_product() -> (Workspace, SchemeId, SchemeId, SchemeId) {
        let mut ws = Workspace::new();
        let fa = ws.free(&["a"]).unwrap();
        let fbc = ws.free(&["b", "c"]).unwrap();
        let ta = SubgroupHandle::free(&ws, fa, vec![]).unwrap();
        let tb = SubgroupHandle::free(&ws, fbc, vec![]).unwrap();
        let node = ws.amalgam(fa, fbc, ta, tb, Pairing::Identity).unwrap();
        (ws, fa, fbc, node)
    }

    #[test]
    fn free_product_alternating_form() {
        let (ws, _, _, node) = free_product();
        let w = ws.parse(node, "a b a^-1").unwrap();
        let form = amalgam_reduce(&ws, node, &w).unwrap();
        assert!(form.head.is_identity());
        assert_eq!(form.tail.len(), 3);
        assert_eq!(form.expand(), w);
        assert_eq!(normal_form(&ws, node, &w).unwrap(), w);
    }

    #[test]
    fn free_product_cancellation() {
        let (ws, _, _, node) = free_product();
        let w = ws.parse(node, "a b b^-1 a^-1 c").unwrap();
        let nf = normal_form(&ws, node, &w).unwrap();
        assert_eq!(ws.show(&nf), "c");
        assert!(is_trivial(&ws, node, &ws.parse(node, "a b a^-1 b^-1").unwrap())
            .unwrap()
            .is_no());
    }

    #[test]
    fn identity_word_reduces_to_empty_form() {
        let (ws, _, _, node) = free_product();
        let form = amalgam_reduce(&ws, node, &Word::identity()).unwrap();
        assert!(form.head.is_identity());
        assert!(form.tail.is_empty());
    }

    #[test]
    fn amalgam_with_identified_subgroup_migrates_parts() {
        // G = F(b,c), H = F(d,e); identify ⟨b⟩ with ⟨d⟩ via b -> d
        let mut ws = Workspace::new();
        let g = ws.free(&["b", "c"]).unwrap();
        let h = ws.free(&["d", "e"]).unwrap();
        let a = SubgroupHandle::free(&ws, g, vec![ws.parse(g, "b").unwrap()]).unwrap();
        let b = SubgroupHandle::free(&ws, h, vec![ws.parse(h, "d").unwrap()]).unwrap();
        let morph = crate::stallings::Morphism::on_basis(
            g,
            &ws.free_generators(g).unwrap(),
            h,
            &ws.free_generators(h).unwrap(),
            &[(ws.parse(g, "b").unwrap(), ws.parse(h, "d").unwrap())],
        )
        .unwrap();
        let node = ws.amalgam(g, h, a, b, Pairing::Iso(morph)).unwrap();
        assert!(ws.validate(node).is_empty(), "{:?}", ws.validate(node));

        // c·b migrates b to the right factor as d: c b · d^-1 e ≡ c · e
        let w = ws.parse(node, "c b d^-1 e").unwrap();
        let form = amalgam_reduce(&ws, node, &w).unwrap();
        assert_eq!(form.tail.len(), 2);
        // b = d in the group, so the element equals c·e
        assert!(equal(&ws, node, &w, &ws.parse(node, "c e").unwrap()).unwrap().is_yes());
        assert!(equal(&ws, node, &ws.parse(node, "b").unwrap(), &ws.parse(node, "d").unwrap())
            .unwrap()
            .is_yes());
        assert!(is_trivial(&ws, node, &ws.parse(node, "b d^-1").unwrap()).unwrap().is_yes());
        assert!(is_trivial(&ws, node, &ws.parse(node, "c e^-1").unwrap()).unwrap().is_no());
    }

    #[test]
    fn random_words_cancel_against_inverses() {
        use rand::{Rng, SeedableRng};
        let (ws, _, _, node) = free_product();
        let names: Vec<Word> = ["a", "b", "c"].iter().map(|s| ws.parse(node, s).unwrap()).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let len = rng.gen_range(0..12);
            let mut w = Word::identity();
            for _ in 0..len {
                let g = &names[rng.gen_range(0..names.len())];
                let g = if rng.gen_bool(0.5) { g.clone() } else { g.inv() };
                w = w.mul(&g);
            }
            assert!(is_trivial(&ws, node, &w.mul(&w.inv())).unwrap().is_yes());
        }
    }
}
