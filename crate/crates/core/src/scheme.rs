//! The algebra of group constructions.
//!
//! A [`Workspace`] is an append-only arena of scheme nodes: free groups,
//! multi-letter HNN extensions, amalgamated products and the star
//! construction (HNN extensions of the parts, all amalgamated over one
//! shared subgroup). Generator symbols are namespaced by the node that
//! introduced them, so nested constructions never collide even when their
//! printable names do.

use crate::error::{Error, Result};
use crate::stallings::Morphism;
use crate::subgroup::{Generators, Strategy, SubgroupHandle};
use crate::words::{parse_word, ScopeId, Symbol, SymbolTable, Word};
use std::collections::{BTreeMap, BTreeSet};

/// Index of a scheme node inside its workspace. Doubles as the scope that
/// namespaces the generator symbols the node introduces.
pub type SchemeId = ScopeId;

/// How two associated subgroups are identified.
#[derive(Debug, Clone)]
pub enum Pairing {
    /// The subgroups are literally the same (same symbols, same words).
    Identity,
    /// An isomorphism given on a verified free basis.
    Iso(Morphism),
}

impl Pairing {
    pub fn image_of(&self, w: &Word) -> Result<Word> {
        match self {
            Pairing::Identity => Ok(w.clone()),
            Pairing::Iso(m) => m.apply(w),
        }
    }

    pub fn preimage_of(&self, w: &Word) -> Result<Word> {
        match self {
            Pairing::Identity => Ok(w.clone()),
            Pairing::Iso(m) => m.apply_inverse(w),
        }
    }
}

/// One stable letter of an HNN node with its associated subgroup pair.
#[derive(Debug, Clone)]
pub struct HnnExtension {
    pub letter: Symbol,
    pub a: SubgroupHandle,
    pub b: SubgroupHandle,
    pub pairing: Pairing,
}

/// One part `(K_i, L_i, t_i)` of a star node.
#[derive(Debug, Clone)]
pub struct StarPart {
    pub factor: SchemeId,
    pub fixed: SubgroupHandle,
    pub letter: Symbol,
}

#[derive(Debug, Clone)]
pub enum SchemeNode {
    Free { generators: Vec<Symbol> },
    Hnn { base: SchemeId, extensions: Vec<HnnExtension> },
    Amalgam { left: SchemeId, right: SchemeId, a: SubgroupHandle, b: SubgroupHandle, pairing: Pairing },
    Star { shared: SchemeId, parts: Vec<StarPart> },
}

/// A validation finding, carrying the node it concerns.
#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub node: SchemeId,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "node #{}: {}", self.node.0, self.message)
    }
}

/// Arena of scheme nodes plus the symbol table they share.
#[derive(Debug, Default, Clone)]
pub struct Workspace {
    symbols: SymbolTable,
    nodes: Vec<SchemeNode>,
    alphabets: Vec<BTreeSet<Symbol>>,
    star_expansions: BTreeMap<SchemeId, SchemeId>,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn node(&self, id: SchemeId) -> &SchemeNode {
        &self.nodes[id.0 as usize]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// All symbols usable in words over the node's group.
    pub fn alphabet(&self, id: SchemeId) -> &BTreeSet<Symbol> {
        &self.alphabets[id.0 as usize]
    }

    fn push_node(&mut self, node: SchemeNode, alphabet: BTreeSet<Symbol>) -> SchemeId {
        let id = ScopeId(self.nodes.len() as u32);
        self.nodes.push(node);
        self.alphabets.push(alphabet);
        id
    }

    fn next_id(&self) -> SchemeId {
        ScopeId(self.nodes.len() as u32)
    }

    /// A free group on the given generator names.
    pub fn free(&mut self, names: &[&str]) -> Result<SchemeId> {
        let scope = self.next_id();
        let mut seen = BTreeSet::new();
        for n in names {
            if !seen.insert(*n) {
                return Err(Error::InvalidScheme(format!("duplicate generator `{n}`")));
            }
        }
        let generators: Vec<Symbol> = names.iter().map(|n| self.symbols.intern(n, scope)).collect();
        let alphabet = generators.iter().copied().collect();
        Ok(self.push_node(SchemeNode::Free { generators }, alphabet))
    }

    /// Generator symbols of a free node.
    pub fn free_generators(&self, id: SchemeId) -> Result<Vec<Symbol>> {
        match self.node(id) {
            SchemeNode::Free { generators } => Ok(generators.clone()),
            _ => Err(Error::InvalidScheme("expected a free group node".into())),
        }
    }

    pub fn is_free(&self, id: SchemeId) -> bool {
        matches!(self.node(id), SchemeNode::Free { .. })
    }

    /// HNN extension minting fresh stable letters with the given names.
    pub fn hnn(
        &mut self,
        base: SchemeId,
        exts: Vec<(&str, SubgroupHandle, SubgroupHandle, Pairing)>,
    ) -> Result<SchemeId> {
        let scope = self.next_id();
        let exts = exts
            .into_iter()
            .map(|(name, a, b, pairing)| {
                let letter = self.symbols.intern(name, scope);
                HnnExtension { letter, a, b, pairing }
            })
            .collect();
        self.hnn_with_letters(base, exts)
    }

    /// HNN extension reusing caller-provided stable letter symbols.
    pub fn hnn_with_letters(
        &mut self,
        base: SchemeId,
        extensions: Vec<HnnExtension>,
    ) -> Result<SchemeId> {
        for ext in &extensions {
            if ext.a.ambient() != base || ext.b.ambient() != base {
                return Err(Error::InvalidScheme(
                    "associated subgroups must live in the HNN base".into(),
                ));
            }
        }
        let mut alphabet = self.alphabet(base).clone();
        for ext in &extensions {
            if !alphabet.insert(ext.letter) {
                return Err(Error::InvalidScheme("stable letter already in the alphabet".into()));
            }
        }
        Ok(self.push_node(SchemeNode::Hnn { base, extensions }, alphabet))
    }

    /// Amalgamated product of `left` and `right` over `a ≅ b`.
    pub fn amalgam(
        &mut self,
        left: SchemeId,
        right: SchemeId,
        a: SubgroupHandle,
        b: SubgroupHandle,
        pairing: Pairing,
    ) -> Result<SchemeId> {
        if a.ambient() != left || b.ambient() != right {
            return Err(Error::InvalidScheme(
                "amalgamated subgroups must live in their factors".into(),
            ));
        }
        let alphabet: BTreeSet<Symbol> =
            self.alphabet(left).union(self.alphabet(right)).copied().collect();
        Ok(self.push_node(SchemeNode::Amalgam { left, right, a, b, pairing }, alphabet))
    }

    /// Star construction over the shared subgroup node: each part is an HNN
    /// extension of its factor whose stable letter fixes the given subgroup,
    /// and all parts are amalgamated over `shared`.
    pub fn star(
        &mut self,
        shared: SchemeId,
        parts: Vec<(SchemeId, SubgroupHandle, &str)>,
    ) -> Result<SchemeId> {
        if parts.is_empty() {
            return Err(Error::InvalidScheme("a star needs at least one part".into()));
        }
        let scope = self.next_id();
        let mut alphabet = BTreeSet::new();
        let mut built = Vec::new();
        for (factor, fixed, name) in parts {
            if fixed.ambient() != factor {
                return Err(Error::InvalidScheme(
                    "fixed subgroup must live in its part's factor".into(),
                ));
            }
            let letter = self.symbols.intern(name, scope);
            alphabet.extend(self.alphabet(factor).iter().copied());
            if !alphabet.insert(letter) {
                return Err(Error::InvalidScheme(format!("duplicate stable letter `{name}`")));
            }
            built.push(StarPart { factor, fixed, letter });
        }
        Ok(self.push_node(SchemeNode::Star { shared, parts: built }, alphabet))
    }

    /// Direct children of a node (shared nodes may repeat).
    pub fn children(&self, id: SchemeId) -> Vec<SchemeId> {
        match self.node(id) {
            SchemeNode::Free { .. } => vec![],
            SchemeNode::Hnn { base, .. } => vec![*base],
            SchemeNode::Amalgam { left, right, .. } => vec![*left, *right],
            SchemeNode::Star { shared, parts } => {
                let mut out = vec![*shared];
                out.extend(parts.iter().map(|p| p.factor));
                out
            }
        }
    }

    /// All nodes reachable from `root`, depth-first, deduplicated.
    pub fn subtree(&self, root: SchemeId) -> Vec<SchemeId> {
        let mut seen = BTreeSet::new();
        let mut order = Vec::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            order.push(id);
            for c in self.children(id) {
                stack.push(c);
            }
        }
        order
    }

    /// Whether `target` occurs in the subtree of `root`.
    pub fn contains_node(&self, root: SchemeId, target: SchemeId) -> bool {
        self.subtree(root).contains(&target)
    }

    /// Printable-name resolver for words over the node's group.
    pub fn name_map(&self, id: SchemeId) -> BTreeMap<String, Symbol> {
        let mut map = BTreeMap::new();
        for &sym in self.alphabet(id) {
            map.insert(self.symbols.name(sym).to_string(), sym);
        }
        map
    }

    /// Parses a word over the node's alphabet.
    pub fn parse(&self, id: SchemeId, input: &str) -> Result<Word> {
        parse_word(input, &self.name_map(id))
    }

    /// Renders a word with printable names.
    pub fn show(&self, w: &Word) -> String {
        format!("{}", w.display(&self.symbols))
    }

    /// The cached expansion of a star node, if computed.
    pub fn star_expansion(&self, id: SchemeId) -> Option<SchemeId> {
        self.star_expansions.get(&id).copied()
    }

    /// Expands a star node into its left-nested amalgam-of-HNN form: the
    /// single-part star is just `K_1 *_{L_1} t_1`; additional parts are
    /// amalgamated over the shared subgroup one at a time. Stable letter
    /// symbols are reused, so words over the star parse identically over
    /// the expansion.
    pub fn expand_star(&mut self, id: SchemeId) -> Result<SchemeId> {
        if let Some(&done) = self.star_expansions.get(&id) {
            return Ok(done);
        }
        let (shared, parts) = match self.node(id) {
            SchemeNode::Star { shared, parts } => (*shared, parts.clone()),
            _ => return Err(Error::InvalidScheme("expected a star node".into())),
        };
        let mut acc: Option<SchemeId> = None;
        for part in parts {
            let ext = HnnExtension {
                letter: part.letter,
                a: part.fixed.clone(),
                b: part.fixed.clone(),
                pairing: Pairing::Identity,
            };
            let hnn = self.hnn_with_letters(part.factor, vec![ext])?;
            acc = Some(match acc {
                None => hnn,
                Some(prev) => {
                    let a = self.factor_handle(prev, shared)?;
                    let b = self.factor_handle(hnn, shared)?;
                    self.amalgam(prev, hnn, a, b, Pairing::Identity)?
                }
            });
        }
        let root = acc.expect("at least one part");
        self.star_expansions.insert(id, root);
        Ok(root)
    }

    /// Expands every star in the subtree; call once after construction.
    pub fn prepare(&mut self, root: SchemeId) -> Result<()> {
        let nodes = self.subtree(root);
        for id in nodes {
            if matches!(self.node(id), SchemeNode::Star { .. }) {
                self.expand_star(id)?;
            }
        }
        Ok(())
    }

    /// Handle for a whole designated factor (a subtree node) of `ambient`.
    pub fn factor_handle(&self, ambient: SchemeId, target: SchemeId) -> Result<SubgroupHandle> {
        if !self.contains_node(ambient, target) {
            return Err(Error::InvalidScheme("factor node not in the ambient subtree".into()));
        }
        let gens: Vec<Word> =
            self.alphabet(target).iter().map(|&s| Word::generator(s)).collect();
        Ok(SubgroupHandle::raw(ambient, Generators::Finite(gens), Strategy::Factor { node: target }))
    }

    /// Extracts a finite presentation: all base generators and stable
    /// letters, base relators, one relator `t^-1 a t (a^phi)^-1` per
    /// generator of each associated subgroup, and one identification per
    /// amalgamated generator (skipped when the identification is literal).
    pub fn presentation(&self, id: SchemeId) -> Result<Presentation> {
        let mut generators = Vec::new();
        let mut relators = Vec::new();
        let mut seen_gen = BTreeSet::new();
        let mut seen_rel = BTreeSet::new();
        self.collect_presentation(id, &mut generators, &mut relators, &mut seen_gen, &mut seen_rel)?;
        Ok(Presentation { generators, relators })
    }

    fn collect_presentation(
        &self,
        id: SchemeId,
        generators: &mut Vec<Symbol>,
        relators: &mut Vec<Word>,
        seen_gen: &mut BTreeSet<Symbol>,
        seen_rel: &mut BTreeSet<Word>,
    ) -> Result<()> {
        fn push_gen(g: Symbol, generators: &mut Vec<Symbol>, seen: &mut BTreeSet<Symbol>) {
            if seen.insert(g) {
                generators.push(g);
            }
        }
        match self.node(id) {
            SchemeNode::Free { generators: gens } => {
                for &g in gens {
                    push_gen(g, generators, seen_gen);
                }
            }
            SchemeNode::Hnn { base, extensions } => {
                self.collect_presentation(*base, generators, relators, seen_gen, seen_rel)?;
                for ext in extensions {
                    push_gen(ext.letter, generators, seen_gen);
                    let t = Word::generator(ext.letter);
                    for a in ext.a.finite_generators()? {
                        let image = ext.pairing.image_of(&a)?;
                        let rel = t.inv().mul(&a).mul(&t).mul(&image.inv());
                        if !rel.is_identity() && seen_rel.insert(rel.clone()) {
                            relators.push(rel);
                        }
                    }
                }
            }
            SchemeNode::Amalgam { left, right, a, pairing, .. } => {
                self.collect_presentation(*left, generators, relators, seen_gen, seen_rel)?;
                self.collect_presentation(*right, generators, relators, seen_gen, seen_rel)?;
                for g in a.finite_generators()? {
                    let image = pairing.image_of(&g)?;
                    let rel = g.mul(&image.inv());
                    if !rel.is_identity() && seen_rel.insert(rel.clone()) {
                        relators.push(rel);
                    }
                }
            }
            SchemeNode::Star { parts, .. } => {
                for part in parts.clone() {
                    self.collect_presentation(part.factor, generators, relators, seen_gen, seen_rel)?;
                    push_gen(part.letter, generators, seen_gen);
                    let t = Word::generator(part.letter);
                    for a in part.fixed.finite_generators()? {
                        let rel = t.inv().mul(&a).mul(&t).mul(&a.inv());
                        if !rel.is_identity() && seen_rel.insert(rel.clone()) {
                            relators.push(rel);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Structural validation of the subtree rooted at `id`.
    pub fn validate(&self, id: SchemeId) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let nodes = self.subtree(id);

        // printable names must be unambiguous across the tree
        let mut by_name: BTreeMap<&str, Vec<Symbol>> = BTreeMap::new();
        for &sym in self.alphabet(id) {
            by_name.entry(self.symbols.name(sym)).or_default().push(sym);
        }
        for (name, syms) in by_name {
            if syms.len() > 1 {
                out.push(Diagnostic {
                    node: id,
                    message: format!("generator name `{name}` is introduced by {} nodes", syms.len()),
                });
            }
        }

        // each stable letter belongs to exactly one HNN or star node
        let mut letter_homes: BTreeMap<Symbol, usize> = BTreeMap::new();
        for &n in &nodes {
            match self.node(n) {
                SchemeNode::Hnn { extensions, .. } => {
                    for e in extensions {
                        *letter_homes.entry(e.letter).or_default() += 1;
                    }
                }
                SchemeNode::Star { parts, .. } => {
                    for p in parts {
                        *letter_homes.entry(p.letter).or_default() += 1;
                    }
                }
                _ => {}
            }
        }
        for (sym, count) in letter_homes {
            // a star and its cached expansion share letters by design
            let expanded_twin = nodes.iter().any(|&n| {
                matches!(self.node(n), SchemeNode::Star { .. })
                    && self.star_expansions.contains_key(&n)
            });
            if count > 1 && !expanded_twin {
                out.push(Diagnostic {
                    node: id,
                    message: format!(
                        "stable letter `{}` appears in {count} nodes",
                        self.symbols.name(sym)
                    ),
                });
            }
        }

        for &n in &nodes {
            self.validate_node(n, &mut out);
        }
        out
    }

    fn validate_node(&self, id: SchemeId, out: &mut Vec<Diagnostic>) {
        let mut diag = |message: String| out.push(Diagnostic { node: id, message });
        match self.node(id) {
            SchemeNode::Free { .. } => {}
            SchemeNode::Hnn { base, extensions } => {
                for ext in extensions {
                    if ext.a.ambient() != *base || ext.b.ambient() != *base {
                        diag("associated subgroup outside the base".into());
                        continue;
                    }
                    self.validate_pairing(&ext.pairing, &ext.a, &ext.b, &mut diag);
                }
            }
            SchemeNode::Amalgam { left, right, a, b, pairing } => {
                if a.ambient() != *left || b.ambient() != *right {
                    diag("amalgamated subgroup outside its factor".into());
                    return;
                }
                let shared: BTreeSet<Symbol> = self
                    .alphabet(*left)
                    .intersection(self.alphabet(*right))
                    .copied()
                    .collect();
                match pairing {
                    Pairing::Identity => {
                        if a.generator_words() != b.generator_words() {
                            diag("identity amalgamation requires equal subgroups".into());
                        }
                        // literal identification needs a genuinely shared subtree
                        let allowed: BTreeSet<Symbol> = match a.strategy() {
                            Strategy::Factor { node } => self.alphabet(*node).clone(),
                            _ => BTreeSet::new(),
                        };
                        let mut used: BTreeSet<Symbol> = BTreeSet::new();
                        for w in a.generator_words() {
                            used.extend(w.support());
                        }
                        if !used.iter().all(|s| allowed.contains(s) || shared.contains(s)) && !used.is_empty() {
                            // fall through: symbol sharing is what makes the
                            // identification literal
                            if !used.iter().all(|s| shared.contains(s)) {
                                diag("identity amalgamation must identify shared symbols".into());
                            }
                        }
                    }
                    Pairing::Iso(_) => {
                        if !shared.is_empty() {
                            diag("isomorphism amalgamation requires disjoint factors".into());
                        }
                        self.validate_pairing(pairing, a, b, &mut diag);
                    }
                }
            }
            SchemeNode::Star { shared, parts } => {
                for (i, p) in parts.iter().enumerate() {
                    if !self.contains_node(p.factor, *shared) {
                        diag(format!("part {i} does not contain the shared subgroup node"));
                    }
                    if p.fixed.ambient() != p.factor {
                        diag(format!("part {i}: fixed subgroup outside its factor"));
                    }
                    for q in parts.iter().skip(i + 1) {
                        let inter: BTreeSet<Symbol> = self
                            .alphabet(p.factor)
                            .intersection(self.alphabet(q.factor))
                            .copied()
                            .collect();
                        if !inter.is_subset(self.alphabet(*shared)) {
                            diag(format!("parts share symbols outside the shared subgroup"));
                        }
                    }
                }
            }
        }
    }

    fn validate_pairing(
        &self,
        pairing: &Pairing,
        a: &SubgroupHandle,
        b: &SubgroupHandle,
        diag: &mut impl FnMut(String),
    ) {
        match pairing {
            Pairing::Identity => {
                match (a.automaton(), b.automaton()) {
                    (Some(x), Some(y)) => match x.equal(y) {
                        Ok(true) => {}
                        Ok(false) => diag("identity pairing requires equal subgroups".into()),
                        Err(e) => diag(format!("identity pairing check failed: {e}")),
                    },
                    _ => {
                        if a.generator_words() != b.generator_words() {
                            diag("identity pairing requires equal subgroups".into());
                        }
                    }
                }
            }
            Pairing::Iso(m) => {
                let (Some(x), Some(y)) = (a.automaton(), b.automaton()) else {
                    diag("isomorphism pairing needs subgroups of a free group".into());
                    return;
                };
                match m.domain().equal(x) {
                    Ok(true) => {}
                    Ok(false) => diag("morphism domain differs from the associated subgroup".into()),
                    Err(e) => diag(format!("morphism domain check failed: {e}")),
                }
                match m.codomain().equal(y) {
                    Ok(true) => {}
                    Ok(false) => diag("morphism image differs from the target subgroup".into()),
                    Err(e) => diag(format!("morphism image check failed: {e}")),
                }
                if m.domain().rank() != m.codomain().rank() {
                    diag("morphism does not preserve rank".into());
                }
            }
        }
    }
}

/// A finite presentation: generators and relators.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub generators: Vec<Symbol>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_group_presentation_is_relator_free() {
        let mut ws = Workspace::new();
        let f = ws.free(&["a", "b", "c"]).unwrap();
        assert!(ws.validate(f).is_empty());
        let p = ws.presentation(f).unwrap();
        assert_eq!(p.generator_count(), 3);
        assert_eq!(p.relator_count(), 0);
    }

    #[test]
    fn free_rejects_duplicate_names() {
        let mut ws = Workspace::new();
        assert!(ws.free(&["a", "a"]).is_err());
    }

    #[test]
    fn identity_amalgam_with_unequal_subgroups_is_diagnosed() {
        let mut ws = Workspace::new();
        let g = ws.free(&["b", "c"]).unwrap();
        let h = ws.free(&["d", "e"]).unwrap();
        let a = SubgroupHandle::free(&ws, g, vec![ws.parse(g, "b").unwrap()]).unwrap();
        let b = SubgroupHandle::free(&ws, h, vec![ws.parse(h, "d").unwrap()]).unwrap();
        let node = ws.amalgam(g, h, a, b, Pairing::Identity).unwrap();
        let diags = ws.validate(node);
        assert!(
            diags.iter().any(|d| d.message.contains("identity amalgamation")),
            "expected a diagnostic, got {diags:?}"
        );
    }

    #[test]
    fn single_part_star_expands_to_hnn() {
        let mut ws = Workspace::new();
        let g = ws.free(&["b", "c"]).unwrap();
        let l = SubgroupHandle::free(&ws, g, vec![ws.parse(g, "b").unwrap()]).unwrap();
        let star = ws.star(g, vec![(g, l, "t1")]).unwrap();
        let exp = ws.expand_star(star).unwrap();
        assert!(matches!(ws.node(exp), SchemeNode::Hnn { .. }));
        // same alphabet, words carry over
        assert_eq!(ws.alphabet(star), ws.alphabet(exp));
    }

    #[test]
    fn two_part_star_expands_to_amalgam_of_hnns() {
        let mut ws = Workspace::new();
        let g = ws.free(&["b", "c"]).unwrap();
        let l1 = SubgroupHandle::free(&ws, g, vec![ws.parse(g, "b").unwrap()]).unwrap();
        let l2 = SubgroupHandle::free(&ws, g, vec![ws.parse(g, "c").unwrap()]).unwrap();
        let star = ws.star(g, vec![(g, l1, "t1"), (g, l2, "t2")]).unwrap();
        let exp = ws.expand_star(star).unwrap();
        match ws.node(exp) {
            SchemeNode::Amalgam { left, right, .. } => {
                assert!(matches!(ws.node(*left), SchemeNode::Hnn { .. }));
                assert!(matches!(ws.node(*right), SchemeNode::Hnn { .. }));
            }
            other => panic!("expected amalgam, got {other:?}"),
        }
        assert!(ws.validate(exp).is_empty(), "{:?}", ws.validate(exp));
        // presentations of the star and its expansion agree
        let p1 = ws.presentation(star).unwrap();
        let p2 = ws.presentation(exp).unwrap();
        assert_eq!(p1.generators, p2.generators);
        let r1: BTreeSet<Word> = p1.relators.iter().cloned().collect();
        let r2: BTreeSet<Word> = p2.relators.iter().cloned().collect();
        assert_eq!(r1, r2);
    }

    #[test]
    fn presentation_of_hnn_counts_relators_per_generator() {
        let mut ws = Workspace::new();
        let g = ws.free(&["b", "c"]).unwrap();
        let a = SubgroupHandle::free(&ws, g, vec![ws.parse(g, "b").unwrap()]).unwrap();
        let node = ws
            .hnn(g, vec![("t", a.clone(), a, Pairing::Identity)])
            .unwrap();
        let p = ws.presentation(node).unwrap();
        assert_eq!(p.generator_count(), 3);
        assert_eq!(p.relator_count(), 1); // t^-1 b t b^-1
    }
}
