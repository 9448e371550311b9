//! The individual verification suites.
//!
//! Each suite builds its constructions deterministically, draws samples
//! from the per-sample RNG streams, and checks both inclusions of its set
//! equality: elements produced on the right-hand side must be accepted on
//! the left, and reduced words landing in the intersecting factor must be
//! accepted on the right.

use super::{run_samples, SampleOutcome, SuiteParams, SuiteRun};
use crate::error::{Error, Result};
use crate::gadgets::{self, TailDirection};
use crate::rewrite::{self, Verdict};
use crate::scheme::{Pairing, SchemeId, SchemeNode, Workspace};
use crate::stallings::{Morphism, SubgroupAutomaton};
use crate::stream::{GeneratorStream, IndexDomain};
use crate::subgroup::{self, SubgroupHandle};
use crate::words::{Symbol, Word};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn random_reduced(rng: &mut ChaCha8Rng, alphabet: &[Symbol], max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let mut raw: Vec<(Symbol, i64)> = Vec::with_capacity(len);
    for _ in 0..len {
        let s = alphabet[rng.gen_range(0..alphabet.len())];
        let e = if rng.gen_bool(0.5) { 1 } else { -1 };
        raw.push((s, e));
    }
    Word::reduce(&raw)
}

fn random_product(rng: &mut ChaCha8Rng, gens: &[Word], max_factors: usize) -> Word {
    if gens.is_empty() {
        return Word::identity();
    }
    let n = rng.gen_range(0..=max_factors);
    let mut acc = Word::identity();
    for _ in 0..n {
        let g = &gens[rng.gen_range(0..gens.len())];
        acc = acc.mul(&if rng.gen_bool(0.5) { g.clone() } else { g.inv() });
    }
    acc
}

fn verdict_outcome(
    v: Verdict,
    input: String,
    expected: &str,
) -> SampleOutcome {
    match (v, expected) {
        (Verdict::Yes(_), "yes") | (Verdict::No, "no") => SampleOutcome::Pass,
        (Verdict::Unknown(r), _) => SampleOutcome::Unknown(super::Counterexample {
            input,
            expected: expected.into(),
            got: format!("unknown: {r}"),
        }),
        (got, _) => SampleOutcome::fail(input, expected, format!("{got:?}")),
    }
}

/// Stable letters of every HNN node in the subtree, in depth-first order.
fn stable_letters_of(ws: &Workspace, root: SchemeId) -> Vec<Symbol> {
    let mut out = Vec::new();
    fn walk(ws: &Workspace, id: SchemeId, out: &mut Vec<Symbol>) {
        match ws.node(id) {
            SchemeNode::Free { .. } => {}
            SchemeNode::Hnn { base, extensions } => {
                walk(ws, *base, out);
                out.extend(extensions.iter().map(|e| e.letter));
            }
            SchemeNode::Amalgam { left, right, .. } => {
                walk(ws, *left, out);
                walk(ws, *right, out);
            }
            SchemeNode::Star { parts, .. } => {
                for p in parts {
                    walk(ws, p.factor, out);
                    out.push(p.letter);
                }
            }
        }
    }
    walk(ws, root, &mut out);
    let mut seen = std::collections::BTreeSet::new();
    out.retain(|s| seen.insert(*s));
    out
}

/// The menu of associated subgroups used across the star suites.
fn menu_gens(ws: &Workspace, g: SchemeId, which: usize) -> Vec<Word> {
    match which % 3 {
        0 => vec![ws.parse(g, "b").unwrap()],
        1 => vec![ws.parse(g, "c").unwrap()],
        _ => vec![ws.parse(g, "b").unwrap(), ws.parse(g, "c^2").unwrap()],
    }
}

// ---------------------------------------------------------------------
// amalgamated products: Γ' = ⟨G', H'⟩ meets the factors in G' and H'
// ---------------------------------------------------------------------

pub(super) fn lemma31(params: &SuiteParams, samples: u64, seed: u64) -> Result<SuiteRun> {
    let mut ws = Workspace::new();
    let g = ws.free(&["b", "c"])?;
    let h = ws.free(&["d", "e"])?;
    let a = SubgroupHandle::free(&ws, g, vec![ws.parse(g, "b")?])?;
    let b = SubgroupHandle::free(&ws, h, vec![ws.parse(h, "d")?])?;
    let phi = Morphism::on_basis(
        g,
        &ws.free_generators(g)?,
        h,
        &ws.free_generators(h)?,
        &[(ws.parse(g, "b")?, ws.parse(h, "d")?)],
    )?;
    let node = ws.amalgam(g, h, a.clone(), b.clone(), Pairing::Iso(phi.clone()))?;

    // two sampling families: trivial intersections with the amalgamated
    // subgroup, and full containment of it
    struct Config {
        gp: SubgroupAutomaton,
        hp: SubgroupAutomaton,
        /// a generator of the identified subgroup pair (A' side, B' side)
        seam: Option<(Word, Word)>,
    }
    let mut configs = Vec::new();
    {
        let gp = SubgroupAutomaton::build(
            g,
            &ws.free_generators(g)?,
            &[ws.parse(g, "c b c^-1")?, ws.parse(g, "c^2")?],
        )?;
        let hp = SubgroupAutomaton::build(
            h,
            &ws.free_generators(h)?,
            &[ws.parse(h, "e d e^-1")?, ws.parse(h, "e^2")?],
        )?;
        // family (a): G' ∩ A and H' ∩ B are trivial
        let a_aut = a.automaton().expect("stallings");
        let b_aut = b.automaton().expect("stallings");
        if gp.intersect(a_aut)?.rank() != 0 || hp.intersect(b_aut)?.rank() != 0 {
            return Err(Error::Other("family (a) setup must intersect trivially".into()));
        }
        configs.push(Config { gp, hp, seam: None });
    }
    {
        let gp = SubgroupAutomaton::build(
            g,
            &ws.free_generators(g)?,
            &[ws.parse(g, "b")?, ws.parse(g, "c^2")?],
        )?;
        let hp = SubgroupAutomaton::build(
            h,
            &ws.free_generators(h)?,
            &[ws.parse(h, "d")?, ws.parse(h, "e^2")?],
        )?;
        // family (b): A ≤ G', B ≤ H'; verify the hypothesis phi(A') = B'
        let a_aut = a.automaton().expect("stallings");
        let b_aut = b.automaton().expect("stallings");
        let a_part = gp.intersect(a_aut)?;
        let b_part = hp.intersect(b_aut)?;
        if !phi.subgroup_image(&a_part)?.equal(&b_part)? {
            return Err(Error::Other("family (b) violates the hypothesis".into()));
        }
        configs.push(Config { gp, hp, seam: Some((ws.parse(g, "b")?, ws.parse(h, "d")?)) });
    }

    let g_alpha = ws.alphabet(g).clone();
    let h_alpha = ws.alphabet(h).clone();
    let total = configs.len() as u64 * samples;
    let per = samples;
    let (pass, fail, unknown, counterexamples) = run_samples(total, seed, params.jobs, |i, rng| {
        let cfg = &configs[(i / per) as usize];
        let kind = i % 3;
        let side_left = kind != 1;
        let (own_aut, alpha) =
            if side_left { (&cfg.gp, &g_alpha) } else { (&cfg.hp, &h_alpha) };
        if kind == 2 {
            // mixed product over both subgroups; check the landing factor
            let mut w = Word::identity();
            for _ in 0..rng.gen_range(1..=6) {
                let pick_left = rng.gen_bool(0.5);
                let basis = if pick_left { cfg.gp.basis() } else { cfg.hp.basis() };
                if basis.is_empty() {
                    continue;
                }
                let x = &basis[rng.gen_range(0..basis.len())];
                w = w.mul(&if rng.gen_bool(0.5) { x.clone() } else { x.inv() });
            }
            let nf = match rewrite::normal_form(&ws, node, &w) {
                Ok(nf) => nf,
                Err(e) => {
                    return SampleOutcome::fail(ws.show(&w), "normal form", format!("{e}"))
                }
            };
            let in_g = nf.support().all(|s| g_alpha.contains(&s));
            let in_h = nf.support().all(|s| h_alpha.contains(&s));
            if in_g && !cfg.gp.member(&nf).unwrap_or(false) {
                return SampleOutcome::fail(ws.show(&w), "landing in G'", ws.show(&nf));
            }
            if in_h && !nf.is_identity() && !cfg.hp.member(&nf).unwrap_or(false) {
                return SampleOutcome::fail(ws.show(&w), "landing in H'", ws.show(&nf));
            }
            return SampleOutcome::Pass;
        }
        // obfuscated own-side element: insert a^-1 · phi(a) across the seam
        let g1 = random_product(rng, own_aut.basis(), 3);
        let g2 = random_product(rng, own_aut.basis(), 3);
        let mut w = g1.clone();
        if let Some((a_side, b_side)) = &cfg.seam {
            let k = rng.gen_range(-3i64..=3);
            let (back, there) = if side_left {
                (a_side.pow(k), b_side.pow(k))
            } else {
                (b_side.pow(k), a_side.pow(k))
            };
            w = w.mul(&back.inv()).mul(&there);
        }
        w = w.mul(&g2);
        let nf = match rewrite::normal_form(&ws, node, &w) {
            Ok(nf) => nf,
            Err(e) => return SampleOutcome::fail(ws.show(&w), "normal form", format!("{e}")),
        };
        // the element must land back in its factor; identified-subgroup
        // elements may flatten in the opposite factor's coordinates
        let candidate = if nf.support().all(|s| alpha.contains(&s)) {
            nf.clone()
        } else if side_left && nf.support().all(|s| h_alpha.contains(&s)) {
            match phi.apply_inverse(&nf) {
                Ok(w) => w,
                Err(e) => return SampleOutcome::fail(ws.show(&w), "pull back", format!("{e}")),
            }
        } else if !side_left && nf.support().all(|s| g_alpha.contains(&s)) {
            match phi.apply(&nf) {
                Ok(w) => w,
                Err(e) => return SampleOutcome::fail(ws.show(&w), "push forward", format!("{e}")),
            }
        } else {
            return SampleOutcome::fail(
                ws.show(&w),
                "normal form inside the factor",
                ws.show(&nf),
            );
        };
        match own_aut.member(&candidate) {
            Ok(true) => SampleOutcome::Pass,
            Ok(false) => SampleOutcome::fail(ws.show(&w), "member of the subgroup", ws.show(&nf)),
            Err(e) => SampleOutcome::fail(ws.show(&w), "membership", format!("{e}")),
        }
    });
    Ok(SuiteRun { total, pass, fail, unknown, counterexamples, extra_params: BTreeMap::new() })
}

// ---------------------------------------------------------------------
// HNN extensions: ⟨G', t⟩ meets the base in G'
// ---------------------------------------------------------------------

pub(super) fn lemma33(params: &SuiteParams, samples: u64, seed: u64) -> Result<SuiteRun> {
    let mut ws = Workspace::new();
    let g = ws.free(&["b", "c"])?;
    let alphabet = ws.free_generators(g)?;
    let a_b = SubgroupHandle::free(&ws, g, vec![ws.parse(g, "b")?])?;
    // identity extension fixing ⟨b⟩
    let fix_b = ws.hnn(g, vec![("t", a_b.clone(), a_b.clone(), Pairing::Identity)])?;
    // isomorphism extension ⟨b⟩ -> ⟨c⟩
    let phi = Morphism::on_basis(
        g,
        &alphabet,
        g,
        &alphabet,
        &[(ws.parse(g, "b")?, ws.parse(g, "c")?)],
    )?;
    let a_img = SubgroupHandle::free(&ws, g, vec![ws.parse(g, "c")?])?;
    let send_b = ws.hnn(g, vec![("s", a_b.clone(), a_img, Pairing::Iso(phi))])?;

    struct Config {
        node: SchemeId,
        closure: SubgroupHandle,
        gp: SubgroupAutomaton,
        letter: Word,
    }
    let mut configs = Vec::new();
    for (node, gp_gens) in [
        (fix_b, vec!["c b c^-1", "c^2"]), // A' trivial
        (fix_b, vec!["b", "c^2"]),        // A ≤ G'
        (send_b, vec!["b c"]),            // both intersections trivial
    ] {
        let gens: Vec<Word> = gp_gens.iter().map(|s| ws.parse(g, s).unwrap()).collect();
        let letters: Vec<Symbol> = match ws.node(node) {
            SchemeNode::Hnn { extensions, .. } => extensions.iter().map(|e| e.letter).collect(),
            _ => unreachable!(),
        };
        let closure = SubgroupHandle::stable_closure(&ws, node, gens.clone(), letters.clone())?;
        if !matches!(
            closure.strategy(),
            crate::subgroup::Strategy::StableClosure(sc)
                if matches!(sc.saturation, crate::subgroup::Saturation::SelfClosed)
        ) {
            return Err(Error::Other("configuration must satisfy compatibility".into()));
        }
        let gp = SubgroupAutomaton::build(g, &alphabet, &gens)?;
        configs.push(Config { node, closure, gp, letter: Word::generator(letters[0]) });
    }

    let total = configs.len() as u64 * samples;
    let per = samples;
    let (pass, fail, unknown, counterexamples) = run_samples(total, seed, params.jobs, |i, rng| {
        let cfg = &configs[(i / per) as usize];
        match i % 3 {
            0 => {
                // closure elements are accepted
                let mut gens: Vec<Word> = cfg.gp.provided_generators().to_vec();
                gens.push(cfg.letter.clone());
                let w = random_product(rng, &gens, 5);
                verdict_outcome(
                    cfg.closure.member(&ws, &w).unwrap_or(Verdict::Unknown("error".into())),
                    ws.show(&w),
                    "yes",
                )
            }
            1 => {
                // base words outside G' are rejected
                for _ in 0..50 {
                    let w = random_reduced(rng, &alphabet, 7);
                    if !cfg.gp.member(&w).unwrap_or(true) {
                        return verdict_outcome(
                            cfg.closure
                                .member(&ws, &w)
                                .unwrap_or(Verdict::Unknown("error".into())),
                            ws.show(&w),
                            "no",
                        );
                    }
                }
                SampleOutcome::Pass
            }
            _ => {
                // closure words whose reduced form lands in the base lie in G'
                let mut gens: Vec<Word> = cfg.gp.provided_generators().to_vec();
                gens.push(cfg.letter.clone());
                let w = random_product(rng, &gens, 6);
                let form = match rewrite::britton_reduce(&ws, cfg.node, &w) {
                    Ok(f) => f,
                    Err(e) => {
                        return SampleOutcome::fail(ws.show(&w), "reduction", format!("{e}"))
                    }
                };
                if form.has_stable_letters() {
                    return SampleOutcome::Pass;
                }
                match cfg.gp.member(&form.head) {
                    Ok(true) => SampleOutcome::Pass,
                    Ok(false) => {
                        SampleOutcome::fail(ws.show(&w), "head in G'", ws.show(&form.head))
                    }
                    Err(e) => SampleOutcome::fail(ws.show(&w), "membership", format!("{e}")),
                }
            }
        }
    });
    Ok(SuiteRun { total, pass, fail, unknown, counterexamples, extra_params: BTreeMap::new() })
}

// ---------------------------------------------------------------------
// the star construction: ⟨G, t_1..t_r⟩ is the multi-letter HNN extension
// ---------------------------------------------------------------------

struct StarScheme {
    ws: Workspace,
    g: SchemeId,
    alphabet: Vec<Symbol>,
    expansion: SchemeId,
    letters: Vec<Symbol>,
    parts: Vec<SubgroupAutomaton>,
}

/// Star of `r` parts over `G = F(b, c)`, each part either `G` itself
/// (extreme case) or the free product `G * ⟨d_i⟩`, with the associated
/// subgroup drawn from the menu.
fn build_star_scheme(r: u32, menu_offset: usize, fat_parts: bool) -> Result<StarScheme> {
    let mut ws = Workspace::new();
    let g = ws.free(&["b", "c"])?;
    let alphabet = ws.free_generators(g)?;
    let mut parts = Vec::new();
    let mut star_parts: Vec<(SchemeId, SubgroupHandle, String)> = Vec::new();
    for i in 0..r {
        let gens = menu_gens(&ws, g, menu_offset + i as usize);
        let a_i = SubgroupAutomaton::build(g, &alphabet, &gens)?;
        let a_handle = SubgroupHandle::free(&ws, g, gens.clone())?;
        if fat_parts {
            let d = ws.free(&[&format!("d{}", i + 1) as &str])?;
            let ta = SubgroupHandle::free(&ws, g, vec![])?;
            let td = SubgroupHandle::free(&ws, d, vec![])?;
            let k_i = ws.amalgam(g, d, ta, td, Pairing::Identity)?;
            let d_whole =
                SubgroupHandle::free(&ws, d, vec![Word::generator(ws.free_generators(d)?[0])])?;
            let l_i = SubgroupHandle::free_split(&ws, k_i, vec![a_handle, d_whole])?;
            star_parts.push((k_i, l_i, format!("t{}", i + 1)));
        } else {
            star_parts.push((g, a_handle, format!("t{}", i + 1)));
        }
        parts.push(a_i);
    }
    let with_refs: Vec<(SchemeId, SubgroupHandle, &str)> =
        star_parts.iter().map(|(k, l, n)| (*k, l.clone(), n.as_str())).collect();
    let star = ws.star(g, with_refs)?;
    let letters = match ws.node(star) {
        SchemeNode::Star { parts, .. } => parts.iter().map(|p| p.letter).collect(),
        _ => unreachable!(),
    };
    let expansion = ws.expand_star(star)?;
    let diags = ws.validate(expansion);
    if !diags.is_empty() {
        return Err(Error::InvalidScheme(format!("{diags:?}")));
    }
    Ok(StarScheme { ws, g, alphabet, expansion, letters, parts })
}

pub(super) fn lemma42(params: &SuiteParams, samples: u64, seed: u64) -> Result<SuiteRun> {
    let r = params.r.clamp(1, 3);
    let mut configs = Vec::new();
    for fat in [false, true] {
        let star = build_star_scheme(r, 0, fat)?;
        // the direct multi-letter HNN over the same base with the same
        // stable letter symbols
        let mut ws = star.ws.clone();
        let mut exts = Vec::new();
        for (i, a_i) in star.parts.iter().enumerate() {
            let handle =
                SubgroupHandle::free(&ws, star.g, a_i.provided_generators().to_vec())?;
            exts.push(crate::scheme::HnnExtension {
                letter: star.letters[i],
                a: handle.clone(),
                b: handle,
                pairing: Pairing::Identity,
            });
        }
        let direct = ws.hnn_with_letters(star.g, exts)?;
        configs.push((star, ws, direct));
    }

    let total = configs.len() as u64 * samples;
    let per = samples;
    let (pass, fail, unknown, counterexamples) = run_samples(total, seed, params.jobs, |i, rng| {
        let (star, ws, direct) = &configs[(i / per) as usize];
        let mut full_alpha: Vec<Symbol> = star.alphabet.clone();
        full_alpha.extend(star.letters.iter().copied());
        match i % 3 {
            0 => {
                // behavioural agreement between the star expansion and the
                // direct extension on random words
                let w = random_reduced(rng, &full_alpha, 10);
                let lhs = rewrite::is_trivial(ws, star.expansion, &w);
                let rhs = rewrite::is_trivial(ws, *direct, &w);
                match (lhs, rhs) {
                    (Ok(a), Ok(b)) if a.is_yes() == b.is_yes() && a.is_no() == b.is_no() => {
                        SampleOutcome::Pass
                    }
                    (Ok(a), Ok(b)) => SampleOutcome::fail(
                        ws.show(&w),
                        format!("agreement, star={a:?}"),
                        format!("direct={b:?}"),
                    ),
                    (a, b) => {
                        SampleOutcome::fail(ws.show(&w), format!("{a:?}"), format!("{b:?}"))
                    }
                }
            }
            1 => {
                // each stable letter fixes its associated subgroup
                let which = rng.gen_range(0..star.parts.len());
                let a = random_product(rng, star.parts[which].basis(), 4);
                let t = Word::generator(star.letters[which]);
                let w = a.conj(&t).mul(&a.inv());
                verdict_outcome(
                    rewrite::is_trivial(ws, star.expansion, &w)
                        .unwrap_or(Verdict::Unknown("error".into())),
                    ws.show(&w),
                    "yes",
                )
            }
            _ => {
                // and moves everything outside it
                let which = rng.gen_range(0..star.parts.len());
                for _ in 0..50 {
                    let g_w = random_reduced(rng, &star.alphabet, 6);
                    if g_w.is_identity() || star.parts[which].member(&g_w).unwrap_or(true) {
                        continue;
                    }
                    let t = Word::generator(star.letters[which]);
                    let w = g_w.conj(&t).mul(&g_w.inv());
                    return verdict_outcome(
                        rewrite::is_trivial(ws, star.expansion, &w)
                            .unwrap_or(Verdict::Unknown("error".into())),
                        ws.show(&w),
                        "no",
                    );
                }
                SampleOutcome::Pass
            }
        }
    });
    Ok(SuiteRun { total, pass, fail, unknown, counterexamples, extra_params: BTreeMap::new() })
}

// ---------------------------------------------------------------------
// conjugation by the full chain traps exactly the intersection
// ---------------------------------------------------------------------

fn assignments(r: u32) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..r {
        let mut next = Vec::new();
        for a in &out {
            for pick in 0..3 {
                let mut b = a.clone();
                b.push(pick);
                next.push(b);
            }
        }
        out = next;
    }
    out
}

struct ChainScheme {
    ws: Workspace,
    alphabet: Vec<Symbol>,
    expansion: SchemeId,
    letters: Vec<Symbol>,
    parts: Vec<SubgroupAutomaton>,
    intersection: SubgroupAutomaton,
    join: SubgroupAutomaton,
    chain: Word,
}

fn build_chain_scheme(assignment: &[usize], corrupt: bool) -> Result<ChainScheme> {
    let mut ws = Workspace::new();
    let g = ws.free(&["b", "c"])?;
    let alphabet = ws.free_generators(g)?;
    let mut star_parts: Vec<(SchemeId, SubgroupHandle, String)> = Vec::new();
    let mut parts = Vec::new();
    for (i, &which) in assignment.iter().enumerate() {
        let gens = menu_gens(&ws, g, which);
        parts.push(SubgroupAutomaton::build(g, &alphabet, &gens)?);
        star_parts.push((g, SubgroupHandle::free(&ws, g, gens)?, format!("t{}", i + 1)));
    }
    let with_refs: Vec<(SchemeId, SubgroupHandle, &str)> =
        star_parts.iter().map(|(k, l, n)| (*k, l.clone(), n.as_str())).collect();
    let star = ws.star(g, with_refs)?;
    let letters: Vec<Symbol> = match ws.node(star) {
        SchemeNode::Star { parts, .. } => parts.iter().map(|p| p.letter).collect(),
        _ => unreachable!(),
    };
    let expansion = ws.expand_star(star)?;
    let mut intersection: Option<SubgroupAutomaton> = None;
    let mut join_gens = Vec::new();
    for (k, p) in parts.iter().enumerate() {
        join_gens.extend(p.provided_generators().to_vec());
        if corrupt && k > 0 {
            // mutation hook: pretend the intersection is just A_1
            continue;
        }
        intersection = Some(match intersection {
            None => p.clone(),
            Some(acc) => acc.intersect(p)?,
        });
    }
    let intersection = intersection.expect("at least one part");
    let join = SubgroupAutomaton::build(g, &alphabet, &join_gens)?;
    let chain = letters.iter().fold(Word::identity(), |acc, &t| acc.mul(&Word::generator(t)));
    Ok(ChainScheme { ws, alphabet, expansion, letters, parts, intersection, join, chain })
}

pub(super) fn lemma43(params: &SuiteParams, samples: u64, seed: u64) -> Result<SuiteRun> {
    let mut configs = Vec::new();
    for r in 1..=params.r.clamp(1, 3) {
        for a in assignments(r) {
            configs.push(build_chain_scheme(&a, params.corrupt)?);
        }
    }
    let total = configs.len() as u64 * samples;
    let per = samples;
    let (pass, fail, unknown, counterexamples) = run_samples(total, seed, params.jobs, |i, rng| {
        let cfg = &configs[(i / per) as usize];
        let r1 = cfg.letters.len() == 1;
        match i % 3 {
            0 => {
                // elements of the intersection are fixed by the chain
                let g_elt = random_product(rng, cfg.intersection.basis(), 4);
                let w = g_elt.conj(&cfg.chain).mul(&g_elt.inv());
                verdict_outcome(
                    rewrite::is_trivial(&cfg.ws, cfg.expansion, &w)
                        .unwrap_or(Verdict::Unknown("error".into())),
                    cfg.ws.show(&g_elt),
                    "yes",
                )
            }
            1 => {
                // everything else keeps a stable letter after reduction
                for _ in 0..50 {
                    let g_elt = random_reduced(rng, &cfg.alphabet, 6);
                    if cfg.intersection.member(&g_elt).unwrap_or(true) {
                        continue;
                    }
                    let w = g_elt.conj(&cfg.chain);
                    let nf = match rewrite::normal_form(&cfg.ws, cfg.expansion, &w) {
                        Ok(nf) => nf,
                        Err(e) => {
                            return SampleOutcome::fail(
                                cfg.ws.show(&w),
                                "reduction",
                                format!("{e}"),
                            )
                        }
                    };
                    let keeps_letter =
                        nf.support().any(|s| cfg.letters.contains(&s));
                    return if keeps_letter {
                        SampleOutcome::Pass
                    } else {
                        SampleOutcome::fail(
                            cfg.ws.show(&g_elt),
                            "a surviving stable letter",
                            cfg.ws.show(&nf),
                        )
                    };
                }
                SampleOutcome::Pass
            }
            _ => {
                if !r1 {
                    // exercised by kinds 0 and 1 for r > 1
                    return SampleOutcome::Pass;
                }
                // r = 1: g in A iff the conjugate reduces into the base
                let g_elt = random_reduced(rng, &cfg.alphabet, 6);
                let in_a = cfg.parts[0].member(&g_elt).unwrap_or(false);
                let w = g_elt.conj(&cfg.chain);
                let form = match rewrite::britton_reduce(
                    &cfg.ws,
                    hnn_root(&cfg.ws, cfg.expansion),
                    &w,
                ) {
                    Ok(f) => f,
                    Err(e) => {
                        return SampleOutcome::fail(cfg.ws.show(&w), "reduction", format!("{e}"))
                    }
                };
                if in_a != !form.has_stable_letters() {
                    SampleOutcome::fail(
                        cfg.ws.show(&g_elt),
                        format!("in A = {in_a}"),
                        format!("letter-free = {}", !form.has_stable_letters()),
                    )
                } else {
                    SampleOutcome::Pass
                }
            }
        }
    });
    Ok(SuiteRun { total, pass, fail, unknown, counterexamples, extra_params: BTreeMap::new() })
}

/// The expansion of a one-part star is the HNN node itself.
fn hnn_root(ws: &Workspace, id: SchemeId) -> SchemeId {
    match ws.node(id) {
        SchemeNode::Hnn { .. } => id,
        _ => id,
    }
}

pub(super) fn lemma44(params: &SuiteParams, samples: u64, seed: u64) -> Result<SuiteRun> {
    let mut configs = Vec::new();
    for r in 1..=params.r.clamp(1, 3) {
        for a in assignments(r) {
            configs.push(build_chain_scheme(&a, params.corrupt)?);
        }
    }
    let total = configs.len() as u64 * samples;
    let per = samples;
    let (pass, fail, unknown, counterexamples) = run_samples(total, seed, params.jobs, |i, rng| {
        let cfg = &configs[(i / per) as usize];
        if i % 2 == 0 {
            // join elements, written factor by factor through the
            // conjugates: a_1^{t_{i_1}} ... a_k^{t_{i_k}} equals their product
            let k = rng.gen_range(1..=4);
            let mut plain = Word::identity();
            let mut conjugated = Word::identity();
            for _ in 0..k {
                let which = rng.gen_range(0..cfg.parts.len());
                let a = random_product(rng, cfg.parts[which].basis(), 2);
                let t = Word::generator(cfg.letters[which]);
                plain = plain.mul(&a);
                conjugated = conjugated.mul(&a.conj(&t));
            }
            verdict_outcome(
                rewrite::is_trivial(&cfg.ws, cfg.expansion, &conjugated.mul(&plain.inv()))
                    .unwrap_or(Verdict::Unknown("error".into())),
                cfg.ws.show(&plain),
                "yes",
            )
        } else {
            // random words over the conjugated copies that reduce into the
            // base must land in the join
            let mut w = Word::identity();
            for _ in 0..rng.gen_range(1..=5) {
                let which = rng.gen_range(0..cfg.letters.len());
                let t = Word::generator(cfg.letters[which]);
                let g_w = random_reduced(rng, &cfg.alphabet, 4);
                w = w.mul(&g_w.conj(&t));
            }
            let nf = match rewrite::normal_form(&cfg.ws, cfg.expansion, &w) {
                Ok(nf) => nf,
                Err(e) => return SampleOutcome::fail(cfg.ws.show(&w), "reduction", format!("{e}")),
            };
            if nf.support().any(|s| cfg.letters.contains(&s)) {
                return SampleOutcome::Pass;
            }
            match cfg.join.member(&nf) {
                Ok(true) => SampleOutcome::Pass,
                Ok(false) => SampleOutcome::fail(cfg.ws.show(&w), "landing in the join", cfg.ws.show(&nf)),
                Err(e) => SampleOutcome::fail(cfg.ws.show(&w), "membership", format!("{e}")),
            }
        }
    });
    Ok(SuiteRun { total, pass, fail, unknown, counterexamples, extra_params: BTreeMap::new() })
}

// ---------------------------------------------------------------------
// benign intersections and joins through the witness builders
// ---------------------------------------------------------------------

pub(super) fn cor45(params: &SuiteParams, samples: u64, seed: u64) -> Result<SuiteRun> {
    struct Config {
        ws: Workspace,
        wit_i: gadgets::BenignWitness,
        wit_j: gadgets::BenignWitness,
        letters: Vec<Symbol>,
        letters_j: Vec<Symbol>,
        chain: Word,
        alphabet: Vec<Symbol>,
    }
    let mut configs = Vec::new();
    let mut extra = BTreeMap::new();
    for r in 1..=params.r.clamp(1, 2) {
        let mut ws = Workspace::new();
        let g = ws.free(&["b", "c"])?;
        let mut parts = Vec::new();
        for i in 0..r {
            let gens = menu_gens(&ws, g, i as usize);
            let a_handle = SubgroupHandle::free(&ws, g, gens)?;
            let d = ws.free(&[&format!("d{}", i + 1) as &str])?;
            let ta = SubgroupHandle::free(&ws, g, vec![])?;
            let td = SubgroupHandle::free(&ws, d, vec![])?;
            let k_i = ws.amalgam(g, d, ta, td, Pairing::Identity)?;
            let d_whole =
                SubgroupHandle::free(&ws, d, vec![Word::generator(ws.free_generators(d)?[0])])?;
            let l_i = SubgroupHandle::free_split(&ws, k_i, vec![a_handle, d_whole])?;
            parts.push((k_i, l_i));
        }
        let wit_i = gadgets::benign_intersection(&mut ws, g, parts.clone())?;
        let wit_j = gadgets::benign_join(&mut ws, g, parts)?;
        let diags = ws.validate(wit_i.k);
        if !diags.is_empty() {
            return Err(Error::InvalidScheme(format!("{diags:?}")));
        }
        let p = ws.presentation(wit_i.k)?;
        extra.insert(
            format!("overgroup_relators_r{r}"),
            serde_json::Value::from(p.relator_count()),
        );
        extra.insert(
            format!("overgroup_generators_r{r}"),
            serde_json::Value::from(p.generator_count()),
        );
        let letters = stable_letters_of(&ws, wit_i.k);
        let letters_j = stable_letters_of(&ws, wit_j.k);
        let chain =
            letters.iter().fold(Word::identity(), |acc, &t| acc.mul(&Word::generator(t)));
        let alphabet = ws.free_generators(g)?;
        configs.push(Config { ws, wit_i, wit_j, letters, letters_j, chain, alphabet });
    }

    let total = configs.len() as u64 * samples;
    let per = samples;
    let (pass, fail, unknown, counterexamples) = run_samples(total, seed, params.jobs, |i, rng| {
        let cfg = &configs[(i / per) as usize];
        let h_i = match &cfg.wit_i.h {
            gadgets::HandleOrStream::Handle(h) => h,
            _ => unreachable!("builder returns handles here"),
        };
        let h_j = match &cfg.wit_j.h {
            gadgets::HandleOrStream::Handle(h) => h,
            _ => unreachable!(),
        };
        match i % 4 {
            0 => {
                // G ∩ L_I ⊇ H: trapped elements are fixed by the chain
                let basis = h_i.automaton().map(|a| a.basis().to_vec()).unwrap_or_default();
                let g_elt = random_product(rng, &basis, 3);
                let w = g_elt.conj(&cfg.chain).mul(&g_elt.inv());
                verdict_outcome(
                    rewrite::is_trivial(&cfg.ws, cfg.wit_i.k, &w)
                        .unwrap_or(Verdict::Unknown("error".into())),
                    cfg.ws.show(&g_elt),
                    "yes",
                )
            }
            1 => {
                // G ∩ L_I ⊆ H: anything outside keeps a stable letter
                for _ in 0..50 {
                    let g_elt = random_reduced(rng, &cfg.alphabet, 5);
                    let inside = h_i
                        .automaton()
                        .map(|a| a.member(&g_elt).unwrap_or(true))
                        .unwrap_or(true);
                    if inside {
                        continue;
                    }
                    let w = g_elt.conj(&cfg.chain);
                    let nf = match rewrite::normal_form(&cfg.ws, cfg.wit_i.k, &w) {
                        Ok(nf) => nf,
                        Err(e) => {
                            return SampleOutcome::fail(
                                cfg.ws.show(&w),
                                "reduction",
                                format!("{e}"),
                            )
                        }
                    };
                    return if nf.support().any(|s| cfg.letters.contains(&s)) {
                        SampleOutcome::Pass
                    } else {
                        SampleOutcome::fail(
                            cfg.ws.show(&g_elt),
                            "a surviving stable letter",
                            cfg.ws.show(&nf),
                        )
                    };
                }
                SampleOutcome::Pass
            }
            2 => {
                // G ∩ L_J ⊇ H via explicit conjugate witnesses
                let k = rng.gen_range(1..=3);
                let mut plain = Word::identity();
                let mut witness = Word::identity();
                for _ in 0..k {
                    let which = rng.gen_range(0..cfg.letters_j.len());
                    let basis = h_j.automaton().map(|a| a.basis().to_vec()).unwrap_or_default();
                    let a = random_product(rng, &basis, 2);
                    let t = Word::generator(cfg.letters_j[which]);
                    // not every join element is a single part's element;
                    // conjugating by any fixed letter still witnesses
                    // membership in L_J when a is fixed by it
                    let w = rewrite::is_trivial(
                        &cfg.ws,
                        cfg.wit_j.k,
                        &a.conj(&t).mul(&a.inv()),
                    );
                    match w {
                        Ok(Verdict::Yes(_)) => {
                            plain = plain.mul(&a);
                            witness = witness.mul(&a.conj(&t));
                        }
                        _ => {
                            // element moved; take the conjugate itself as a
                            // join generator product
                            witness = witness.mul(&a.conj(&t));
                            plain = plain.mul(&a.conj(&t));
                        }
                    }
                }
                verdict_outcome(
                    rewrite::is_trivial(&cfg.ws, cfg.wit_j.k, &witness.mul(&plain.inv()))
                        .unwrap_or(Verdict::Unknown("error".into())),
                    cfg.ws.show(&plain),
                    "yes",
                )
            }
            _ => {
                // G ∩ L_J ⊆ H on reduced landings
                let mut w = Word::identity();
                for _ in 0..rng.gen_range(1..=4) {
                    let which = rng.gen_range(0..cfg.letters_j.len());
                    let t = Word::generator(cfg.letters_j[which]);
                    let g_w = random_reduced(rng, &cfg.alphabet, 4);
                    w = w.mul(&g_w.conj(&t));
                }
                let nf = match rewrite::normal_form(&cfg.ws, cfg.wit_j.k, &w) {
                    Ok(nf) => nf,
                    Err(e) => {
                        return SampleOutcome::fail(cfg.ws.show(&w), "reduction", format!("{e}"))
                    }
                };
                if nf.support().any(|s| cfg.letters_j.contains(&s)) {
                    return SampleOutcome::Pass;
                }
                match h_j.automaton().map(|a| a.member(&nf)) {
                    Some(Ok(true)) => SampleOutcome::Pass,
                    Some(Ok(false)) => {
                        SampleOutcome::fail(cfg.ws.show(&w), "landing in the join", cfg.ws.show(&nf))
                    }
                    _ => SampleOutcome::fail(cfg.ws.show(&w), "membership", "error"),
                }
            }
        }
    });
    Ok(SuiteRun { total, pass, fail, unknown, counterexamples, extra_params: extra })
}

// ---------------------------------------------------------------------
// conjugate copies generate their free product
// ---------------------------------------------------------------------

pub(super) fn cor47(params: &SuiteParams, samples: u64, seed: u64) -> Result<SuiteRun> {
    let cfg = build_chain_scheme(&[0, 1], false)?; // A_1 = ⟨b⟩, A_2 = ⟨c⟩
    let total = samples;
    let (pass, fail, unknown, counterexamples) = run_samples(total, seed, params.jobs, |_, rng| {
        // alternating product of nontrivial blocks from G^{t_1}, G^{t_2}
        let blocks = rng.gen_range(1..=4);
        let mut which = rng.gen_range(0..2usize);
        let mut w = Word::identity();
        for _ in 0..blocks {
            let mut g_elt = Word::identity();
            for _ in 0..50 {
                let cand = random_reduced(rng, &cfg.alphabet, 5);
                if !cand.is_identity() && !cfg.parts[which].member(&cand).unwrap_or(true) {
                    g_elt = cand;
                    break;
                }
            }
            if g_elt.is_identity() {
                return SampleOutcome::Pass;
            }
            let t = Word::generator(cfg.letters[which]);
            w = w.mul(&g_elt.conj(&t));
            which = 1 - which;
        }
        verdict_outcome(
            rewrite::is_trivial(&cfg.ws, cfg.expansion, &w)
                .unwrap_or(Verdict::Unknown("error".into())),
            cfg.ws.show(&w),
            "no",
        )
    });
    Ok(SuiteRun { total, pass, fail, unknown, counterexamples, extra_params: BTreeMap::new() })
}

// ---------------------------------------------------------------------
// when both letters fix the whole group the conjugates coincide
// ---------------------------------------------------------------------

pub(super) fn remark48(params: &SuiteParams, samples: u64, seed: u64) -> Result<SuiteRun> {
    // first scheme: both letters fix all of G
    let mut ws = Workspace::new();
    let g = ws.free(&["b", "c"])?;
    let alphabet = ws.free_generators(g)?;
    let whole_gens: Vec<Word> = alphabet.iter().map(|&s| Word::generator(s)).collect();
    let w1 = SubgroupHandle::free(&ws, g, whole_gens.clone())?;
    let w2 = SubgroupHandle::free(&ws, g, whole_gens)?;
    let both_whole = ws.hnn(
        g,
        vec![
            ("t1", w1.clone(), w1, Pairing::Identity),
            ("t2", w2.clone(), w2, Pairing::Identity),
        ],
    )?;
    // second scheme: proper subgroups; differences must show up
    let proper = build_chain_scheme(&[0, 1], false)?;

    let total = 2 * samples;
    let per = samples;
    let (pass, fail, unknown, counterexamples) = run_samples(total, seed, params.jobs, |i, rng| {
        if i / per == 0 {
            let g_elt = random_reduced(rng, &alphabet, 8);
            let t1 = ws.parse(both_whole, "t1").unwrap();
            let t2 = ws.parse(both_whole, "t2").unwrap();
            let w = g_elt.conj(&t1).mul(&g_elt.conj(&t2).inv());
            verdict_outcome(
                rewrite::is_trivial(&ws, both_whole, &w)
                    .unwrap_or(Verdict::Unknown("error".into())),
                ws.show(&g_elt),
                "yes",
            )
        } else {
            // sensitivity: with proper subgroups the conjugates agree
            // exactly on A_1 ∩ A_2
            let g_elt = if i % per == 0 {
                // deterministic nontrivial difference
                proper.ws.parse(proper.expansion, "b c").unwrap()
            } else {
                random_reduced(rng, &proper.alphabet, 6)
            };
            let t1 = Word::generator(proper.letters[0]);
            let t2 = Word::generator(proper.letters[1]);
            let diff = g_elt.conj(&t1).mul(&g_elt.conj(&t2).inv());
            let expected = proper.parts[0].member(&g_elt).unwrap_or(false)
                && proper.parts[1].member(&g_elt).unwrap_or(false);
            match rewrite::is_trivial(&proper.ws, proper.expansion, &diff) {
                Ok(v) if v.is_yes() == expected => SampleOutcome::Pass,
                Ok(v) => SampleOutcome::fail(
                    proper.ws.show(&g_elt),
                    format!("trivial difference = {expected}"),
                    format!("{v:?}"),
                ),
                Err(e) => SampleOutcome::fail(proper.ws.show(&g_elt), "verdict", format!("{e}")),
            }
        }
    });
    Ok(SuiteRun { total, pass, fail, unknown, counterexamples, extra_params: BTreeMap::new() })
}

// ---------------------------------------------------------------------
// the tail subgroups of the index-doubling extensions
// ---------------------------------------------------------------------

struct TailScheme {
    ws: Workspace,
    base: SchemeId,
    node: SchemeId,
    up: SubgroupHandle,
    down: SubgroupHandle,
    up_stream: GeneratorStream,
    down_stream: GeneratorStream,
    up_gens: Vec<Word>,
    down_gens: Vec<Word>,
}

fn build_tail_scheme(m: i64, corrupt: bool) -> Result<TailScheme> {
    let mut ws = Workspace::new();
    let (base, node) = gadgets::xi_hnn(&mut ws, m)?;
    let letters: Vec<Symbol> = match ws.node(node) {
        SchemeNode::Hnn { extensions, .. } => extensions.iter().map(|e| e.letter).collect(),
        _ => unreachable!(),
    };
    let bm = gadgets::b_index(&ws, base, m)?;
    let bdown = gadgets::b_index(&ws, base, m - 1)?;
    let up = SubgroupHandle::stable_closure(&ws, node, vec![bm.clone()], letters.clone())?;
    let down = SubgroupHandle::stable_closure(&ws, node, vec![bdown.clone()], letters.clone())?;
    let shift = if corrupt { 1 } else { 0 };
    let up_stream = gadgets::tail_stream(&ws, base, m + shift, TailDirection::Up)?;
    let down_stream = gadgets::tail_stream(&ws, base, m + shift, TailDirection::Down)?;
    let t = Word::generator(letters[0]);
    let tp = Word::generator(letters[1]);
    let up_gens = vec![bm, t.clone(), tp.clone()];
    let down_gens = vec![bdown, t, tp];
    Ok(TailScheme { ws, base, node, up, down, up_stream, down_stream, up_gens, down_gens })
}

pub(super) fn lemma51(params: &SuiteParams, samples: u64, seed: u64) -> Result<SuiteRun> {
    let cfg = build_tail_scheme(params.m, params.corrupt)?;
    let m = params.m;
    let total = samples;
    let (pass, fail, unknown, counterexamples) = run_samples(total, seed, params.jobs, |i, rng| {
        match i % 6 {
            0 => {
                // ascending: b_i enters with a reduction-verified witness
                let i_off = (i / 6) % 13;
                let idx = m + i_off as i64;
                let bi = gadgets::b_index(&cfg.ws, cfg.base, idx).unwrap();
                let wit = gadgets::tail_witness(&cfg.ws, cfg.node, m, idx).unwrap();
                match rewrite::equal(&cfg.ws, cfg.node, &wit, &bi) {
                    Ok(Verdict::Yes(_)) => {}
                    other => {
                        return SampleOutcome::fail(
                            cfg.ws.show(&wit),
                            "witness reduces to target",
                            format!("{other:?}"),
                        )
                    }
                }
                if !cfg.up_stream.member(&bi).is_some() {
                    return SampleOutcome::fail(
                        cfg.ws.show(&bi),
                        "tail membership",
                        "rejected",
                    );
                }
                verdict_outcome(
                    cfg.up.member(&cfg.ws, &bi).unwrap_or(Verdict::Unknown("error".into())),
                    cfg.ws.show(&bi),
                    "yes",
                )
            }
            1 => {
                // ascending: b_i for i < m is rejected
                let idx = m - 1 - ((i / 6) % 5) as i64;
                let bi = gadgets::b_index(&cfg.ws, cfg.base, idx).unwrap();
                verdict_outcome(
                    cfg.up.member(&cfg.ws, &bi).unwrap_or(Verdict::Unknown("error".into())),
                    cfg.ws.show(&bi),
                    "no",
                )
            }
            2 => {
                // random closure words landing in the base land in the tail
                let w = random_product(rng, &cfg.up_gens, 8);
                let form = match rewrite::britton_reduce(&cfg.ws, cfg.node, &w) {
                    Ok(f) => f,
                    Err(e) => {
                        return SampleOutcome::fail(cfg.ws.show(&w), "reduction", format!("{e}"))
                    }
                };
                if form.has_stable_letters() {
                    return SampleOutcome::Pass;
                }
                if cfg.up_stream.member(&form.head).is_some() {
                    SampleOutcome::Pass
                } else {
                    SampleOutcome::fail(
                        cfg.ws.show(&w),
                        "base landing in the ascending tail",
                        cfg.ws.show(&form.head),
                    )
                }
            }
            3 => {
                // descending: witnesses below m
                let idx = m - 1 - ((i / 6) % 12) as i64;
                let bi = gadgets::b_index(&cfg.ws, cfg.base, idx).unwrap();
                let wit = gadgets::tail_witness(&cfg.ws, cfg.node, m, idx).unwrap();
                match rewrite::equal(&cfg.ws, cfg.node, &wit, &bi) {
                    Ok(Verdict::Yes(_)) => {}
                    other => {
                        return SampleOutcome::fail(
                            cfg.ws.show(&wit),
                            "witness reduces to target",
                            format!("{other:?}"),
                        )
                    }
                }
                verdict_outcome(
                    cfg.down.member(&cfg.ws, &bi).unwrap_or(Verdict::Unknown("error".into())),
                    cfg.ws.show(&bi),
                    "yes",
                )
            }
            4 => {
                // descending: b_i for i >= m is rejected
                let idx = m + ((i / 6) % 5) as i64;
                let bi = gadgets::b_index(&cfg.ws, cfg.base, idx).unwrap();
                verdict_outcome(
                    cfg.down.member(&cfg.ws, &bi).unwrap_or(Verdict::Unknown("error".into())),
                    cfg.ws.show(&bi),
                    "no",
                )
            }
            _ => {
                let w = random_product(rng, &cfg.down_gens, 8);
                let form = match rewrite::britton_reduce(&cfg.ws, cfg.node, &w) {
                    Ok(f) => f,
                    Err(e) => {
                        return SampleOutcome::fail(cfg.ws.show(&w), "reduction", format!("{e}"))
                    }
                };
                if form.has_stable_letters() {
                    return SampleOutcome::Pass;
                }
                if cfg.down_stream.member(&form.head).is_some() {
                    SampleOutcome::Pass
                } else {
                    SampleOutcome::fail(
                        cfg.ws.show(&w),
                        "base landing in the descending tail",
                        cfg.ws.show(&form.head),
                    )
                }
            }
        }
    });
    Ok(SuiteRun { total, pass, fail, unknown, counterexamples, extra_params: BTreeMap::new() })
}

// ---------------------------------------------------------------------
// the same tails inside the free product with ⟨a⟩
// ---------------------------------------------------------------------

pub(super) fn lemma52(params: &SuiteParams, samples: u64, seed: u64) -> Result<SuiteRun> {
    let m = params.m;
    let mut ws = Workspace::new();
    let (fa, base, xi_node, theta) = gadgets::theta(&mut ws, m)?;
    let letters: Vec<Symbol> = match ws.node(xi_node) {
        SchemeNode::Hnn { extensions, .. } => extensions.iter().map(|e| e.letter).collect(),
        _ => unreachable!(),
    };
    let bm = gadgets::b_index(&ws, base, m)?;
    let up = SubgroupHandle::stable_closure(&ws, xi_node, vec![bm.clone()], letters.clone())?;
    let a_gen = Word::generator(ws.free_generators(fa)?[0]);
    let whole_a = SubgroupHandle::free(&ws, fa, vec![a_gen])?;
    let l2 = SubgroupHandle::free_split(&ws, theta, vec![whole_a, up])?;
    let a_sym = ws.free_generators(fa)?[0];
    let b_sym = ws.name_map(base)["b"];
    let c_sym = ws.name_map(base)["c"];
    let with_a = GeneratorStream::new(base, c_sym)
        .with_family(b_sym, IndexDomain::at_least(m))
        .with_family(a_sym, IndexDomain::only(0));
    let a_word = Word::generator(a_sym);
    let hnn_letters = letters.clone();
    let closure_gens: Vec<Word> = {
        let mut v = vec![a_word.clone(), bm.clone()];
        v.extend(hnn_letters.iter().map(|&l| Word::generator(l)));
        v
    };

    let total = samples;
    let (pass, fail, unknown, counterexamples) = run_samples(total, seed, params.jobs, |i, rng| {
        match i % 3 {
            0 => {
                // elements of ⟨a, tail⟩ carry witnesses over the closure
                let k = rng.gen_range(1..=4);
                let mut sample = Word::identity();
                let mut witness = Word::identity();
                for _ in 0..k {
                    if rng.gen_bool(0.3) {
                        let e = if rng.gen_bool(0.5) { 1 } else { -1 };
                        sample = sample.mul(&a_word.pow(e));
                        witness = witness.mul(&a_word.pow(e));
                    } else {
                        let idx = m + rng.gen_range(0..=6);
                        let e = if rng.gen_bool(0.5) { 1 } else { -1 };
                        sample =
                            sample.mul(&gadgets::b_index(&ws, base, idx).unwrap().pow(e));
                        witness = witness.mul(
                            &gadgets::tail_witness(&ws, xi_node, m, idx).unwrap().pow(e),
                        );
                    }
                }
                if with_a.member(&sample).is_none() {
                    return SampleOutcome::fail(
                        ws.show(&sample),
                        "stream membership",
                        "rejected",
                    );
                }
                verdict_outcome(
                    rewrite::equal(&ws, theta, &witness, &sample)
                        .unwrap_or(Verdict::Unknown("error".into())),
                    ws.show(&sample),
                    "yes",
                )
            }
            1 => {
                // closure words landing in ⟨a, b, c⟩ land in ⟨a, tail⟩
                let w = random_product(rng, &closure_gens, 7);
                let nf = match rewrite::normal_form(&ws, theta, &w) {
                    Ok(nf) => nf,
                    Err(e) => {
                        return SampleOutcome::fail(ws.show(&w), "reduction", format!("{e}"))
                    }
                };
                if nf.support().any(|s| hnn_letters.contains(&s)) {
                    return SampleOutcome::Pass;
                }
                if with_a.member(&nf).is_some() {
                    SampleOutcome::Pass
                } else {
                    SampleOutcome::fail(ws.show(&w), "landing in ⟨a, tail⟩", ws.show(&nf))
                }
            }
            _ => {
                // rejections through the split handle
                let bad = gadgets::b_index(&ws, base, m - 1 - (i % 4) as i64).unwrap();
                let v1 = l2.member(&ws, &bad).unwrap_or(Verdict::Unknown("error".into()));
                if !v1.is_no() {
                    return SampleOutcome::fail(ws.show(&bad), "no", format!("{v1:?}"));
                }
                // conjugated free-factor letters leave the subgroup
                let moved = a_word.conj(&Word::generator(c_sym));
                verdict_outcome(
                    l2.member(&ws, &moved).unwrap_or(Verdict::Unknown("error".into())),
                    ws.show(&moved),
                    "no",
                )
            }
        }
    });
    Ok(SuiteRun { total, pass, fail, unknown, counterexamples, extra_params: BTreeMap::new() })
}

// ---------------------------------------------------------------------
// the two-sided tail witness, end to end
// ---------------------------------------------------------------------

pub(super) fn example54_suite(params: &SuiteParams, samples: u64, seed: u64) -> Result<SuiteRun> {
    let m = params.m.max(0);
    let mut ws = Workspace::new();
    let wit = gadgets::example54(&mut ws, m)?;
    let diags = ws.validate(wit.k);
    if !diags.is_empty() {
        return Err(Error::InvalidScheme(format!("{diags:?}")));
    }
    let pres = ws.presentation(wit.k)?;
    if wit.l.generator_words().len() != 4 {
        return Err(Error::Other("the join subgroup must have 4 generators".into()));
    }
    // the variant over ⟨a, b, c⟩
    let fa = ws.free(&["a"])?;
    let ta = SubgroupHandle::free(&ws, fa, vec![])?;
    let tk = SubgroupHandle::trivial(wit.k);
    let k_a = ws.amalgam(fa, wit.k, ta, tk, Pairing::Identity)?;
    let a_gen_w = Word::generator(ws.free_generators(fa)?[0]);
    let whole_a = SubgroupHandle::free(&ws, fa, vec![a_gen_w])?;
    let m_handle = ws.factor_handle(wit.k, wit.base)?;
    let g_abc = SubgroupHandle::free_split(&ws, k_a, vec![whole_a, m_handle])?;

    let mut extra = BTreeMap::new();
    extra.insert("overgroup_generators".into(), serde_json::Value::from(pres.generator_count()));
    extra.insert("overgroup_relators".into(), serde_json::Value::from(pres.relator_count()));
    extra.insert("join_generators".into(), serde_json::Value::from(wit.l.generator_words().len()));

    let h = if params.corrupt {
        // mutation hook: misdeclare the trapped stream by one index
        GeneratorStream::new(wit.base, ws.name_map(wit.base)["c"]).with_family(
            ws.name_map(wit.base)["b"],
            IndexDomain::at_least(m + 1).union(IndexDomain::at_most(-1)),
        )
    } else {
        wit.h.clone()
    };
    let u = Word::generator(wit.u);
    let v = Word::generator(wit.v);
    let l_gens = wit.l.generator_words();
    let c_word = ws.parse(wit.base, "c")?;
    let a_letter = ws.free_generators(fa)?[0];

    let total = samples;
    let (pass, fail, unknown, counterexamples) = run_samples(total, seed, params.jobs, |i, rng| {
        match i % 4 {
            0 => {
                // two-sided stream elements enter the join with verified
                // witnesses; the first sample pins the boundary index
                let picks = if i == 0 { 1 } else { rng.gen_range(1..=4) };
                let mut sample = Word::identity();
                let mut witness = Word::identity();
                for p in 0..picks {
                    let idx = if i == 0 && p == 0 {
                        m
                    } else if rng.gen_bool(0.5) {
                        m + rng.gen_range(0..=5)
                    } else {
                        -1 - rng.gen_range(0..=5)
                    };
                    let e = if rng.gen_bool(0.5) { 1 } else { -1 };
                    let bi = gadgets::b_index(&ws, wit.base, idx).unwrap();
                    let conj = if idx >= m { &u } else { &v };
                    sample = sample.mul(&bi.pow(e));
                    witness = witness.mul(&bi.conj(conj).pow(e));
                }
                if h.member(&sample).is_none() {
                    return SampleOutcome::fail(
                        ws.show(&sample),
                        "stream membership",
                        "rejected",
                    );
                }
                verdict_outcome(
                    rewrite::equal(&ws, wit.k, &witness, &sample)
                        .unwrap_or(Verdict::Unknown("error".into())),
                    ws.show(&sample),
                    "yes",
                )
            }
            1 => {
                // join words landing in ⟨b, c⟩ land in the stream
                let w = random_product(rng, &l_gens, 5);
                let nf = match rewrite::normal_form(&ws, wit.k, &w) {
                    Ok(nf) => nf,
                    Err(e) => {
                        return SampleOutcome::fail(ws.show(&w), "reduction", format!("{e}"))
                    }
                };
                let in_base = nf.support().all(|s| ws.alphabet(wit.base).contains(&s));
                if !in_base {
                    return SampleOutcome::Pass;
                }
                if h.member(&nf).is_some() {
                    SampleOutcome::Pass
                } else {
                    SampleOutcome::fail(ws.show(&w), "landing in the stream", ws.show(&nf))
                }
            }
            2 => {
                // negatives: c is not trapped, and for m >= 1 the gap
                // indices stay outside
                let moved = rewrite::equal(&ws, wit.k, &c_word.conj(&u), &c_word)
                    .unwrap_or(Verdict::Unknown("error".into()));
                if !moved.is_no() {
                    return SampleOutcome::fail("c^u = c", "no", format!("{moved:?}"));
                }
                if m >= 1 {
                    let gap = gadgets::b_index(&ws, wit.base, (i as i64 / 4) % m).unwrap();
                    if h.member(&gap).is_some() && !params.corrupt {
                        return SampleOutcome::fail(
                            ws.show(&gap),
                            "outside the stream",
                            "accepted",
                        );
                    }
                }
                SampleOutcome::Pass
            }
            _ => {
                // the ⟨a⟩ * K variant: ⟨a, b, c⟩ membership through the split
                let mut w = Word::identity();
                for _ in 0..rng.gen_range(1..=5) {
                    let letter = match rng.gen_range(0..3) {
                        0 => Word::generator(a_letter),
                        1 => ws.parse(wit.base, "b").unwrap(),
                        _ => c_word.clone(),
                    };
                    w = w.mul(&if rng.gen_bool(0.5) { letter.clone() } else { letter.inv() });
                }
                let inside =
                    subgroup::member(&ws, &g_abc, &w).unwrap_or(Verdict::Unknown("error".into()));
                if !inside.is_yes() {
                    return SampleOutcome::fail(ws.show(&w), "yes", format!("{inside:?}"));
                }
                let with_u = w.mul(&u);
                verdict_outcome(
                    subgroup::member(&ws, &g_abc, &with_u)
                        .unwrap_or(Verdict::Unknown("error".into())),
                    ws.show(&with_u),
                    "no",
                )
            }
        }
    });
    Ok(SuiteRun { total, pass, fail, unknown, counterexamples, extra_params: extra })
}
