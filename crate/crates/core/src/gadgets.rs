//! The concrete constructions: indexed conjugates `b_i = b^(c^i)`,
//! sequence words `b_f`/`a_f`, the index-doubling HNN extensions `Xi_m`
//! with their tail subgroups and witnesses, and the benign-subgroup
//! witness builders (intersection, join, and the two-sided tail example).

use crate::error::{Error, Result};
use crate::rewrite;
use crate::scheme::{Pairing, SchemeId, Workspace};
use crate::stallings::Morphism;
use crate::stream::{GeneratorStream, IndexDomain};
use crate::subgroup::{SubgroupHandle};
use crate::words::{FinSupportSeq, Symbol, Word};

/// Resolves the letters `b`, `c` (and optionally others) in a free node.
fn letter(ws: &Workspace, node: SchemeId, name: &str) -> Result<Symbol> {
    ws.name_map(node)
        .get(name)
        .copied()
        .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
}

/// `b_i = b^(c^i) = c^-i b c^i` in a free group containing `b` and `c`.
pub fn b_index(ws: &Workspace, node: SchemeId, i: i64) -> Result<Word> {
    let b = letter(ws, node, "b")?;
    let c = letter(ws, node, "c")?;
    Ok(Word::generator(b).conj(&Word::generator(c).pow(i)))
}

/// `b_f = b_0^{f(0)} · b_1^{f(1)} · ...` over the support of `f`, in
/// increasing index order (negative indices allowed).
pub fn b_seq(ws: &Workspace, node: SchemeId, f: &FinSupportSeq) -> Result<Word> {
    let mut acc = Word::identity();
    for (i, v) in f.entries() {
        acc = acc.mul(&b_index(ws, node, i)?.pow(v));
    }
    Ok(acc)
}

/// `a_f = a^(b_f) = b_f^-1 · a · b_f`.
pub fn a_seq(ws: &Workspace, node: SchemeId, f: &FinSupportSeq) -> Result<Word> {
    let a = letter(ws, node, "a")?;
    Ok(Word::generator(a).conj(&b_seq(ws, node, f)?))
}

/// The index-doubling morphism on F(b, c): `b -> b_{1-m}`, `c -> c^2`
/// (so `b_i -> b_{2i-m+1}` on all conjugates).
pub fn xi(ws: &Workspace, node: SchemeId, m: i64) -> Result<Morphism> {
    xi_with_shift(ws, node, 1 - m)
}

/// The companion morphism `b -> b_{-m}`, `c -> c^2`
/// (so `b_i -> b_{2i-m}`).
pub fn xi_prime(ws: &Workspace, node: SchemeId, m: i64) -> Result<Morphism> {
    xi_with_shift(ws, node, -m)
}

fn xi_with_shift(ws: &Workspace, node: SchemeId, shift: i64) -> Result<Morphism> {
    let b = letter(ws, node, "b")?;
    let c = letter(ws, node, "c")?;
    let alphabet = ws.free_generators(node)?;
    Morphism::on_basis(
        node,
        &alphabet,
        node,
        &alphabet,
        &[
            (Word::generator(b), b_index(ws, node, shift)?),
            (Word::generator(c), Word::generator(c).pow(2)),
        ],
    )
}

/// The HNN extension of F(b, c) by two stable letters acting by the two
/// index maps above, with configurable letter names.
pub fn xi_hnn_named(
    ws: &mut Workspace,
    base: SchemeId,
    m: i64,
    t_name: &str,
    tp_name: &str,
) -> Result<SchemeId> {
    let alphabet = ws.free_generators(base)?;
    let whole_gens: Vec<Word> = alphabet.iter().map(|&s| Word::generator(s)).collect();
    let phi = xi(ws, base, m)?;
    let phi_p = xi_prime(ws, base, m)?;
    let image = SubgroupHandle::free(ws, base, phi.images().to_vec())?;
    let image_p = SubgroupHandle::free(ws, base, phi_p.images().to_vec())?;
    let a1 = SubgroupHandle::free(ws, base, whole_gens.clone())?;
    let a2 = SubgroupHandle::free(ws, base, whole_gens)?;
    ws.hnn(
        base,
        vec![
            (t_name, a1, image, Pairing::Iso(phi)),
            (tp_name, a2, image_p, Pairing::Iso(phi_p)),
        ],
    )
}

/// `Xi_m` over a fresh F(b, c), with stable letters `t{m}`, `tp{m}`.
pub fn xi_hnn(ws: &mut Workspace, m: i64) -> Result<(SchemeId, SchemeId)> {
    let base = ws.free(&["b", "c"])?;
    let node = xi_hnn_named(ws, base, m, &stable_name("t", m), &stable_name("tp", m))?;
    Ok((base, node))
}

pub fn stable_name(prefix: &str, m: i64) -> String {
    if m < 0 {
        format!("{prefix}n{}", -m)
    } else {
        format!("{prefix}{m}")
    }
}

/// The free product `⟨a⟩ * Xi_m`, as an amalgam over trivial subgroups.
/// Returns (free node of a, base F(b,c), the Xi node, the product node).
pub fn theta(ws: &mut Workspace, m: i64) -> Result<(SchemeId, SchemeId, SchemeId, SchemeId)> {
    let fa = ws.free(&["a"])?;
    let (base, xi_node) = xi_hnn(ws, m)?;
    let ta = SubgroupHandle::free(ws, fa, vec![])?;
    let tx = SubgroupHandle::trivial(xi_node);
    let node = ws.amalgam(fa, xi_node, ta, tx, Pairing::Identity)?;
    Ok((fa, base, xi_node, node))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailDirection {
    Up,
    Down,
}

/// The tail family `⟨b_m, b_{m+1}, ...⟩` (up) or `⟨b_{m-1}, b_{m-2}, ...⟩`
/// (down) as a generator stream.
pub fn tail_stream(
    ws: &Workspace,
    node: SchemeId,
    m: i64,
    direction: TailDirection,
) -> Result<GeneratorStream> {
    let b = letter(ws, node, "b")?;
    let c = letter(ws, node, "c")?;
    let domain = match direction {
        TailDirection::Up => IndexDomain::at_least(m),
        TailDirection::Down => IndexDomain::at_most(m - 1),
    };
    Ok(GeneratorStream::new(node, c).with_family(b, domain))
}

/// A word over `{b_m, t_m, tp_m}` (up) or `{b_{m-1}, t_m, tp_m}` (down)
/// that reduces to `b_i` in `Xi_m`: parity descent through the two index
/// maps. The direction is inferred from which side of `m` the index lies.
pub fn tail_witness(ws: &Workspace, xi_node: SchemeId, m: i64, i: i64) -> Result<Word> {
    let (base, extensions) = rewrite::hnn_extensions(ws, xi_node)?;
    let t = Word::generator(extensions[0].letter);
    let tp = Word::generator(extensions[1].letter);
    if i >= m {
        // ascend from b_m: b_j^t = b_{2j-m+1}, b_j^tp = b_{2j-m}
        let mut conj = Word::identity();
        let mut i = i;
        while i > m {
            if (i - m) % 2 == 1 {
                conj = t.mul(&conj);
                i = (i + m - 1) / 2;
            } else {
                conj = tp.mul(&conj);
                i = (i + m) / 2;
            }
        }
        Ok(b_index(ws, base, m)?.conj(&conj))
    } else {
        // descend from b_{m-1}
        let mut conj = Word::identity();
        let mut i = i;
        while i < m - 1 {
            if (i + m - 1) % 2 == 0 {
                conj = t.mul(&conj);
                i = (i + m - 1) / 2;
            } else {
                conj = tp.mul(&conj);
                i = (i + m) / 2;
            }
        }
        Ok(b_index(ws, base, m - 1)?.conj(&conj))
    }
}

/// A benign-subgroup witness: the group `G`, the subgroup `H` it traps,
/// the finitely presented overgroup `K`, and the finitely generated
/// subgroup `L ≤ K` with the testable contract `G ∩ L = H`.
#[derive(Debug, Clone)]
pub struct BenignWitness {
    /// The f.g. group (a designated node of `K`'s tree), or a handle for
    /// generated subgroups that are not a literal factor.
    pub g: GroupRef,
    pub h: HandleOrStream,
    pub k: SchemeId,
    pub l: SubgroupHandle,
}

#[derive(Debug, Clone)]
pub enum GroupRef {
    Node(SchemeId),
    Generated(SubgroupHandle),
}

#[derive(Debug, Clone)]
pub enum HandleOrStream {
    Handle(SubgroupHandle),
    Stream(GeneratorStream),
}

/// `G ∩ L_i` as a subgroup of `G`. Supported part shapes: `K_i = G`
/// itself (the subgroup is `L_i`), a free `K_i` with a Stallings handle
/// (automaton intersection), or a free product with `G` a factor and
/// `L_i` split along the factors (the trapped part is the `G` component).
fn trapped_subgroup(
    ws: &Workspace,
    g: SchemeId,
    k_i: SchemeId,
    l_i: &SubgroupHandle,
) -> Result<crate::stallings::SubgroupAutomaton> {
    let opaque =
        || Error::UnsupportedMembership("cannot determine the trapped subgroup of a part".into());
    if k_i == g {
        return l_i.automaton().cloned().ok_or_else(opaque);
    }
    if ws.is_free(k_i) {
        let k_alpha = ws.free_generators(k_i)?;
        let l_aut = l_i.automaton().ok_or_else(opaque)?;
        let g_gens: Vec<Word> = ws.alphabet(g).iter().map(|&s| Word::generator(s)).collect();
        let g_inside = crate::stallings::SubgroupAutomaton::build(k_i, &k_alpha, &g_gens)?;
        let inter = g_inside.intersect(l_aut)?;
        // the intersection lies inside G; re-ambient its basis over G
        return crate::stallings::SubgroupAutomaton::build(
            g,
            &ws.free_generators(g)?,
            &inter.basis().to_vec(),
        );
    }
    if let crate::subgroup::Strategy::FreeSplit(parts) = l_i.strategy() {
        for p in parts {
            if p.ambient() == g {
                return p.automaton().cloned().ok_or_else(opaque);
            }
        }
        // no part over G: the trapped subgroup is trivial
        return Ok(crate::stallings::SubgroupAutomaton::trivial(
            g,
            &ws.free_generators(g)?,
        ));
    }
    Err(opaque())
}

/// Witness that an intersection of benign subgroups is benign: `K` is the
/// star of the parts and `L = G^(t_1 ... t_r)` (one generator per
/// generator of `G`, conjugated by the full chain).
pub fn benign_intersection(
    ws: &mut Workspace,
    g: SchemeId,
    parts: Vec<(SchemeId, SubgroupHandle)>,
) -> Result<BenignWitness> {
    let mut h_aut: Option<crate::stallings::SubgroupAutomaton> = None;
    for (k_i, l_i) in &parts {
        let a_i = trapped_subgroup(ws, g, *k_i, l_i)?;
        h_aut = Some(match h_aut {
            None => a_i,
            Some(acc) => acc.intersect(&a_i)?,
        });
    }
    let h_aut = h_aut.ok_or_else(|| Error::InvalidScheme("no parts".into()))?;
    let h = SubgroupHandle::free(ws, g, h_aut.basis().to_vec())?;
    let (k, letters) = build_star(ws, g, parts)?;
    let chain = letters.iter().fold(Word::identity(), |acc, &t| acc.mul(&Word::generator(t)));
    let g_gens: Vec<Word> = ws.alphabet(g).iter().map(|&s| Word::generator(s)).collect();
    let l_gens: Vec<Word> = g_gens.iter().map(|w| w.conj(&chain)).collect();
    let l = SubgroupHandle::bounded(k, l_gens, 12);
    Ok(BenignWitness { g: GroupRef::Node(g), h: HandleOrStream::Handle(h), k, l })
}

/// Witness that a join of benign subgroups is benign: same `K`, with
/// `L = ⟨G^(t_1), ..., G^(t_r)⟩`.
pub fn benign_join(
    ws: &mut Workspace,
    g: SchemeId,
    parts: Vec<(SchemeId, SubgroupHandle)>,
) -> Result<BenignWitness> {
    let mut h_gens: Vec<Word> = Vec::new();
    for (k_i, l_i) in &parts {
        let a_i = trapped_subgroup(ws, g, *k_i, l_i)?;
        h_gens.extend(a_i.basis().iter().cloned());
    }
    let h = SubgroupHandle::free(ws, g, h_gens)?;
    let (k, letters) = build_star(ws, g, parts)?;
    let g_gens: Vec<Word> = ws.alphabet(g).iter().map(|&s| Word::generator(s)).collect();
    let mut l_gens = Vec::new();
    for &t in &letters {
        for w in &g_gens {
            l_gens.push(w.conj(&Word::generator(t)));
        }
    }
    let l = SubgroupHandle::bounded(k, l_gens, 12);
    Ok(BenignWitness { g: GroupRef::Node(g), h: HandleOrStream::Handle(h), k, l })
}

fn build_star(
    ws: &mut Workspace,
    g: SchemeId,
    parts: Vec<(SchemeId, SubgroupHandle)>,
) -> Result<(SchemeId, Vec<Symbol>)> {
    let named: Vec<(SchemeId, SubgroupHandle, String)> = parts
        .into_iter()
        .enumerate()
        .map(|(i, (k, l))| (k, l, format!("t{}", i + 1)))
        .collect();
    let with_refs: Vec<(SchemeId, SubgroupHandle, &str)> =
        named.iter().map(|(k, l, n)| (*k, l.clone(), n.as_str())).collect();
    let star = ws.star(g, with_refs)?;
    let letters: Vec<Symbol> = match ws.node(star) {
        crate::scheme::SchemeNode::Star { parts, .. } => parts.iter().map(|p| p.letter).collect(),
        _ => unreachable!(),
    };
    let k = ws.expand_star(star)?;
    Ok((k, letters))
}

/// The two-sided tail witness: `K` is the star of `Xi_m` (fixing the
/// ascending tail closure) and a second copy of `Xi_0` (fixing the
/// descending one) over the shared F(b, c); `L` is the four-generator
/// subgroup `⟨b^u, c^u, b^v, c^v⟩`; `H` is the two-sided conjugate stream.
pub struct TwoSidedTail {
    pub m: i64,
    pub base: SchemeId,
    pub xi_m: SchemeId,
    pub xi_0: SchemeId,
    pub star: SchemeId,
    pub k: SchemeId,
    pub u: Symbol,
    pub v: Symbol,
    pub l1: SubgroupHandle,
    pub l2: SubgroupHandle,
    pub l: SubgroupHandle,
    pub h: GeneratorStream,
}

pub fn example54(ws: &mut Workspace, m: i64) -> Result<TwoSidedTail> {
    if m < 0 {
        return Err(Error::InvalidScheme(
            "the two-sided tail witness is defined for m >= 0".into(),
        ));
    }
    let base = ws.free(&["b", "c"])?;
    let xi_m = xi_hnn_named(ws, base, m, &stable_name("t", m), &stable_name("tp", m))?;
    // second copy acting for index 0; fresh letter names when m = 0 would
    // collide with the first copy
    let (t0, tp0) = if m == 0 { ("s0", "sp0") } else { ("t0", "tp0") };
    let xi_0 = xi_hnn_named(ws, base, 0, t0, tp0)?;

    let bm = b_index(ws, base, m)?;
    let bneg = b_index(ws, base, -1)?;
    let xi_m_letters: Vec<Symbol> = rewrite::hnn_extensions(ws, xi_m)?.1.iter().map(|e| e.letter).collect();
    let xi_0_letters: Vec<Symbol> = rewrite::hnn_extensions(ws, xi_0)?.1.iter().map(|e| e.letter).collect();
    let l1 = SubgroupHandle::stable_closure(ws, xi_m, vec![bm], xi_m_letters)?;
    let l2 = SubgroupHandle::stable_closure(ws, xi_0, vec![bneg], xi_0_letters)?;

    let star = ws.star(base, vec![(xi_m, l1.clone(), "u"), (xi_0, l2.clone(), "v")])?;
    let (u, v) = match ws.node(star) {
        crate::scheme::SchemeNode::Star { parts, .. } => (parts[0].letter, parts[1].letter),
        _ => unreachable!(),
    };
    let k = ws.expand_star(star)?;

    let b = letter(ws, base, "b")?;
    let c = letter(ws, base, "c")?;
    let mut l_gens = Vec::new();
    for t in [u, v] {
        for x in [b, c] {
            l_gens.push(Word::generator(x).conj(&Word::generator(t)));
        }
    }
    let l = SubgroupHandle::bounded(k, l_gens, 12);

    let h = GeneratorStream::new(base, c)
        .with_family(b, IndexDomain::at_least(m).union(IndexDomain::at_most(-1)));

    Ok(TwoSidedTail { m, base, xi_m, xi_0, star, k, u, v, l1, l2, l, h })
}

/// The variant over `⟨a, b, c⟩`: the overgroup becomes `⟨a⟩ * K`, and `G`
/// the subgroup generated by `a`, `b`, `c`.
pub struct TwoSidedTailWithFreeFactor {
    pub inner: TwoSidedTail,
    pub fa: SchemeId,
    pub k: SchemeId,
    pub g: SubgroupHandle,
}

pub fn example54_with_free_factor(ws: &mut Workspace, m: i64) -> Result<TwoSidedTailWithFreeFactor> {
    let inner = example54(ws, m)?;
    let fa = ws.free(&["a"])?;
    let ta = SubgroupHandle::free(ws, fa, vec![])?;
    let tk = SubgroupHandle::trivial(inner.k);
    let k = ws.amalgam(fa, inner.k, ta, tk, Pairing::Identity)?;
    let a_gen = Word::generator(ws.free_generators(fa)?[0]);
    let whole_a = SubgroupHandle::free(ws, fa, vec![a_gen])?;
    let m_handle = ws.factor_handle(inner.k, inner.base)?;
    let g = SubgroupHandle::free_split(ws, k, vec![whole_a, m_handle])?;
    Ok(TwoSidedTailWithFreeFactor { inner, fa, k, g })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::{britton_reduce, equal, is_trivial};
    use crate::subgroup;

    #[test]
    fn b_index_matches_conjugation_convention() {
        let mut ws = Workspace::new();
        let f = ws.free(&["b", "c"]).unwrap();
        assert_eq!(ws.show(&b_index(&ws, f, 0).unwrap()), "b");
        assert_eq!(ws.show(&b_index(&ws, f, 1).unwrap()), "c^-1 b c");
        assert_eq!(ws.show(&b_index(&ws, f, -2).unwrap()), "c^2 b c^-2");
    }

    #[test]
    fn b_seq_multiplies_in_increasing_index_order() {
        let mut ws = Workspace::new();
        let f = ws.free(&["a", "b", "c"]).unwrap();
        let seq = FinSupportSeq::from_values(&[5, 2, -7, 1], 0);
        let bf = b_seq(&ws, f, &seq).unwrap();
        let expected = ws
            .parse(f, "b^5 c^-1 b^2 c c^-2 b^-7 c^2 c^-3 b c^3")
            .unwrap();
        assert_eq!(bf, expected);
        // zero sequence
        let zero = FinSupportSeq::from_values(&[0, 0], 0);
        assert!(b_seq(&ws, f, &zero).unwrap().is_identity());
        assert_eq!(ws.show(&a_seq(&ws, f, &zero).unwrap()), "a");
        // a_f is the conjugate
        let af = a_seq(&ws, f, &seq).unwrap();
        assert_eq!(af, ws.parse(f, "a").unwrap().conj(&bf));
    }

    #[test]
    fn b_seq_concatenates_disjoint_supports() {
        let mut ws = Workspace::new();
        let f = ws.free(&["b", "c"]).unwrap();
        let lo = FinSupportSeq::from_entries([(0, 2), (1, -1)]);
        let hi = FinSupportSeq::from_entries([(3, 4), (5, 1)]);
        let merged = FinSupportSeq::from_entries([(0, 2), (1, -1), (3, 4), (5, 1)]);
        let cat = b_seq(&ws, f, &lo).unwrap().mul(&b_seq(&ws, f, &hi).unwrap());
        assert_eq!(cat, b_seq(&ws, f, &merged).unwrap());
    }

    #[test]
    fn xi_acts_by_index_doubling() {
        let mut ws = Workspace::new();
        let f = ws.free(&["b", "c"]).unwrap();
        for m in [0i64, 1, 3] {
            let phi = xi(&ws, f, m).unwrap();
            let phi_p = xi_prime(&ws, f, m).unwrap();
            for i in -8..=8 {
                let bi = b_index(&ws, f, i).unwrap();
                assert_eq!(phi.apply(&bi).unwrap(), b_index(&ws, f, 2 * i - m + 1).unwrap());
                assert_eq!(phi_p.apply(&bi).unwrap(), b_index(&ws, f, 2 * i - m).unwrap());
            }
        }
        // the m = 0 images on the letters themselves
        let phi = xi(&ws, f, 0).unwrap();
        assert_eq!(ws.show(&phi.apply(&ws.parse(f, "b").unwrap()).unwrap()), "c^-1 b c");
        assert_eq!(ws.show(&phi.apply(&ws.parse(f, "c").unwrap()).unwrap()), "c^2");
        assert_eq!(ws.show(&phi.apply(&ws.parse(f, "b c").unwrap()).unwrap()), "c^-1 b c^3");
    }

    #[test]
    fn xi_hnn_validates_and_presents_four_relators() {
        let mut ws = Workspace::new();
        let (_, node) = xi_hnn(&mut ws, 3).unwrap();
        assert!(ws.validate(node).is_empty(), "{:?}", ws.validate(node));
        let p = ws.presentation(node).unwrap();
        assert_eq!(p.generator_count(), 4);
        assert_eq!(p.relator_count(), 4);
    }

    #[test]
    fn xi_relations_hold_in_the_extension() {
        let mut ws = Workspace::new();
        let (base, node) = xi_hnn(&mut ws, 0).unwrap();
        // t0^-1 b t0 = c^-1 b c
        let lhs = ws.parse(node, "t0^-1 b t0").unwrap();
        let nf = rewrite::normal_form(&ws, node, &lhs).unwrap();
        assert_eq!(ws.show(&nf), "c^-1 b c");
        // t0^-1 (b c) t0 = c^-1 b c^3
        let lhs2 = ws.parse(node, "t0^-1 b c t0").unwrap();
        assert_eq!(ws.show(&rewrite::normal_form(&ws, node, &lhs2).unwrap()), "c^-1 b c^3");
        // ascending: every base word pinches through
        for w in ["b", "c", "b c^-2 b"] {
            let word = ws.parse(node, &format!("t0^-1 {w} t0")).unwrap();
            let form = britton_reduce(&ws, node, &word).unwrap();
            assert!(!form.has_stable_letters());
        }
        // action table: b_m^{t_m} = b_{m+1}, b_m^{tp_m} = b_m (m = 0)
        let b0 = b_index(&ws, base, 0).unwrap();
        let b1 = b_index(&ws, base, 1).unwrap();
        let t = ws.parse(node, "t0").unwrap();
        let tp = ws.parse(node, "tp0").unwrap();
        assert!(equal(&ws, node, &b0.conj(&t), &b1).unwrap().is_yes());
        assert!(equal(&ws, node, &b0.conj(&tp), &b0).unwrap().is_yes());
    }

    #[test]
    fn tail_witnesses_reduce_to_their_targets() {
        let mut ws = Workspace::new();
        for m in [0i64, 1, 3] {
            let (base, node) = xi_hnn(&mut ws, m).unwrap();
            for i in m..=m + 12 {
                let wit = tail_witness(&ws, node, m, i).unwrap();
                let target = b_index(&ws, base, i).unwrap();
                assert!(
                    equal(&ws, node, &wit, &target).unwrap().is_yes(),
                    "witness for b_{i} in level {m}"
                );
            }
            for i in (m - 12)..=(m - 1) {
                let wit = tail_witness(&ws, node, m, i).unwrap();
                let target = b_index(&ws, base, i).unwrap();
                assert!(equal(&ws, node, &wit, &target).unwrap().is_yes());
            }
            // the worked instance: b_{m+8} = b_m^(t tp^3)
            let wit = tail_witness(&ws, node, m, m + 8).unwrap();
            let (_, exts) = rewrite::hnn_extensions(&ws, node).unwrap();
            let t = Word::generator(exts[0].letter);
            let tp = Word::generator(exts[1].letter);
            let expected = b_index(&ws, base, m).unwrap().conj(&t.mul(&tp.pow(3)));
            assert_eq!(wit, expected);
        }
    }

    #[test]
    fn tail_closure_membership_matches_the_tail_stream() {
        let mut ws = Workspace::new();
        let m = 3i64;
        let (base, node) = xi_hnn(&mut ws, m).unwrap();
        let letters: Vec<Symbol> =
            rewrite::hnn_extensions(&ws, node).unwrap().1.iter().map(|e| e.letter).collect();
        let l = SubgroupHandle::stable_closure(
            &ws,
            node,
            vec![b_index(&ws, base, m).unwrap()],
            letters,
        )
        .unwrap();
        // ascending saturation discovered as a stream
        assert!(matches!(
            l.strategy(),
            crate::subgroup::Strategy::StableClosure(sc)
                if matches!(sc.saturation, crate::subgroup::Saturation::Stream(_))
        ));
        for i in m..m + 13 {
            let bi = b_index(&ws, base, i).unwrap();
            assert!(l.member(&ws, &bi).unwrap().is_yes(), "b_{i} accepted");
        }
        for i in m - 5..m {
            let bi = b_index(&ws, base, i).unwrap();
            assert!(l.member(&ws, &bi).unwrap().is_no(), "b_{i} rejected");
        }
        // the generators themselves
        assert!(l.member(&ws, &ws.parse(node, "t3").unwrap()).unwrap().is_yes());
        assert!(l.member(&ws, &ws.parse(node, "c").unwrap()).unwrap().is_no());
    }

    #[test]
    fn theta_keeps_the_free_factor_apart() {
        let mut ws = Workspace::new();
        let (_, base, xi_node, node) = theta(&mut ws, 1).unwrap();
        assert!(ws.validate(node).is_empty(), "{:?}", ws.validate(node));
        // presentation gains nothing from the free factor
        let p_theta = ws.presentation(node).unwrap();
        let p_xi = ws.presentation(xi_node).unwrap();
        assert_eq!(p_theta.relator_count(), p_xi.relator_count());
        assert_eq!(p_theta.generator_count(), p_xi.generator_count() + 1);
        // a is not in the ⟨b,c⟩ factor
        let m_handle = ws.factor_handle(node, base).unwrap();
        assert!(m_handle.member(&ws, &ws.parse(node, "a").unwrap()).unwrap().is_no());
        assert!(m_handle.member(&ws, &ws.parse(node, "b c").unwrap()).unwrap().is_yes());
    }

    #[test]
    fn tail_streams_enumerate_both_directions() {
        let mut ws = Workspace::new();
        let f = ws.free(&["b", "c"]).unwrap();
        let up = tail_stream(&ws, f, 3, TailDirection::Up).unwrap();
        let first: Vec<String> = up.truncate(3).iter().map(|w| ws.show(w)).collect();
        assert_eq!(first, vec!["c^-3 b c^3", "c^-4 b c^4", "c^-5 b c^5"]);
        let down = tail_stream(&ws, f, 0, TailDirection::Down).unwrap();
        let first: Vec<String> = down.truncate(2).iter().map(|w| ws.show(w)).collect();
        assert_eq!(first, vec!["c b c^-1", "c^2 b c^-2"]);
    }

    #[test]
    fn example54_builds_a_finite_presentation() {
        let mut ws = Workspace::new();
        for m in [0i64, 2] {
            let wit = example54(&mut ws, m).unwrap();
            assert!(ws.validate(wit.k).is_empty(), "{:?}", ws.validate(wit.k));
            let p = ws.presentation(wit.k).unwrap();
            assert_eq!(p.generator_count(), 8);
            assert_eq!(p.relator_count(), 14);
            assert_eq!(wit.l.generator_words().len(), 4);
            // b_i for i >= m is fixed by u
            let bi = b_index(&ws, wit.base, m + 2).unwrap();
            let u = Word::generator(wit.u);
            assert!(equal(&ws, wit.k, &bi.conj(&u), &bi).unwrap().is_yes());
            // b_{-1} fixed by v
            let bneg = b_index(&ws, wit.base, -1).unwrap();
            let v = Word::generator(wit.v);
            assert!(equal(&ws, wit.k, &bneg.conj(&v), &bneg).unwrap().is_yes());
            // but u moves b_{m-1}
            let bout = b_index(&ws, wit.base, m - 1).unwrap();
            assert!(is_trivial(&ws, wit.k, &bout.conj(&u).mul(&bout.inv()))
                .unwrap()
                .is_no());
        }
    }

    #[test]
    fn example54_variant_adds_a_free_factor() {
        let mut ws = Workspace::new();
        let wit = example54_with_free_factor(&mut ws, 2).unwrap();
        assert!(ws.validate(wit.k).is_empty(), "{:?}", ws.validate(wit.k));
        let p = ws.presentation(wit.k).unwrap();
        assert_eq!(p.generator_count(), 9);
        // G = ⟨a, b, c⟩ membership through the split
        let a_word = ws.parse(wit.k, "a").unwrap();
        assert!(subgroup::member(&ws, &wit.g, &a_word).unwrap().is_yes());
        let mixed = ws.parse(wit.k, "a b c").unwrap();
        assert!(subgroup::member(&ws, &wit.g, &mixed).unwrap().is_yes());
        let with_u = ws.parse(wit.k, "a u").unwrap();
        assert!(subgroup::member(&ws, &wit.g, &with_u).unwrap().is_no());
    }
}
