//! Folded subgroup automata for finitely generated subgroups of free groups.
//!
//! A [`SubgroupAutomaton`] is the folded core graph of a subgroup: the words
//! readable as loops at the basepoint are exactly the subgroup elements.
//! Folding tracks, per edge, an expression over the provided generators;
//! when the provided tuple is a free basis (no rank drop during folding)
//! those expressions rewrite arbitrary members over that basis, which is
//! what [`Morphism`] application needs.

use crate::error::{Error, Result};
use crate::scheme::SchemeId;
use crate::words::{Symbol, SymbolTable, Word};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Token word over an indexed generating tuple (reduced run-length form).
pub type TokenWord = Vec<(u32, i64)>;

pub(crate) fn tok_reduce(raw: &[(u32, i64)]) -> TokenWord {
    let mut out: TokenWord = Vec::with_capacity(raw.len());
    for &(t, e) in raw {
        if e == 0 {
            continue;
        }
        match out.last_mut() {
            Some((top, acc)) if *top == t => {
                *acc += e;
                if *acc == 0 {
                    out.pop();
                }
            }
            _ => out.push((t, e)),
        }
    }
    out
}

pub(crate) fn tok_mul(a: &[(u32, i64)], b: &[(u32, i64)]) -> TokenWord {
    let mut raw = Vec::with_capacity(a.len() + b.len());
    raw.extend_from_slice(a);
    raw.extend_from_slice(b);
    tok_reduce(&raw)
}

pub(crate) fn tok_inv(a: &[(u32, i64)]) -> TokenWord {
    a.iter().rev().map(|&(t, e)| (t, -e)).collect()
}

/// Word over the spanning-tree basis of an automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisWord(pub TokenWord);

impl BasisWord {
    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Substitutes the automaton's basis words back in and reduces.
    pub fn expand(&self, automaton: &SubgroupAutomaton) -> Word {
        let mut acc = Word::identity();
        for &(idx, exp) in &self.0 {
            acc = acc.mul(&automaton.basis()[idx as usize].pow(exp));
        }
        acc
    }

    /// Renders as `x1 x2^-1 ...` with 1-based basis indices.
    pub fn render(&self) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|&(i, e)| {
                if e == 1 {
                    format!("x{}", i + 1)
                } else {
                    format!("x{}^{}", i + 1, e)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone)]
struct FoldEdge {
    src: usize,
    dst: usize,
    gen: u32,
    gamma: TokenWord,
    alive: bool,
}

/// Union-find based folding workspace.
struct Folder {
    parent: Vec<usize>,
    edges: Vec<FoldEdge>,
    adj: Vec<Vec<usize>>,
    exact: bool,
}

impl Folder {
    fn new() -> Self {
        Folder { parent: vec![0], edges: Vec::new(), adj: vec![Vec::new()], exact: true }
    }

    fn add_vertex(&mut self) -> usize {
        let v = self.parent.len();
        self.parent.push(v);
        self.adj.push(Vec::new());
        v
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn add_edge(&mut self, src: usize, dst: usize, gen: u32, gamma: TokenWord) {
        let id = self.edges.len();
        self.edges.push(FoldEdge { src, dst, gen, gamma, alive: true });
        self.adj[src].push(id);
        self.adj[dst].push(id);
    }

    /// Merges the class of `absorbed` into `kept`, transporting edge
    /// expressions by `tau` = the expression carried by a path
    /// kept -> absorbed in the pre-merge graph.
    fn merge(&mut self, kept: usize, absorbed: usize, tau: TokenWord) {
        debug_assert_ne!(kept, absorbed);
        let mut ids = std::mem::take(&mut self.adj[absorbed]);
        // adjacency lists accumulate duplicate entries (self-loops, earlier
        // merges); each edge must be transported exactly once
        ids.sort_unstable();
        ids.dedup();
        let tau_inv = tok_inv(&tau);
        for &id in &ids {
            if !self.edges[id].alive {
                continue;
            }
            let src = self.find(self.edges[id].src);
            let dst = self.find(self.edges[id].dst);
            if src == absorbed {
                self.edges[id].gamma = tok_mul(&tau, &self.edges[id].gamma);
            }
            if dst == absorbed {
                self.edges[id].gamma = tok_mul(&self.edges[id].gamma, &tau_inv);
            }
        }
        self.parent[absorbed] = kept;
        let mut ids = ids;
        self.adj[kept].append(&mut ids);
    }

    /// One folding step at vertex `v`; returns true when something folded.
    fn fold_at(&mut self, v: usize) -> Option<(usize, usize)> {
        // (gen, outgoing?) -> representative edge id
        let mut groups: BTreeMap<(u32, bool), usize> = BTreeMap::new();
        let ids = self.adj[v].clone();
        for id in ids {
            if !self.edges[id].alive {
                continue;
            }
            let src = self.find(self.edges[id].src);
            let dst = self.find(self.edges[id].dst);
            if src != v && dst != v {
                continue;
            }
            for (key_dir, here) in [(true, src == v), (false, dst == v)] {
                if !here {
                    continue;
                }
                let key = (self.edges[id].gen, key_dir);
                if let Some(&other) = groups.get(&key) {
                    if other == id {
                        continue;
                    }
                    return Some(self.fold_pair(v, other, id, key_dir));
                }
                groups.insert(key, id);
            }
        }
        None
    }

    /// Folds `e2` into `e1`; both leave (or both enter) `v` with one label.
    /// Returns the classes whose neighborhoods changed.
    fn fold_pair(&mut self, v: usize, e1: usize, e2: usize, outgoing: bool) -> (usize, usize) {
        let (t1, t2, g1, g2) = {
            let a = &self.edges[e1];
            let b = &self.edges[e2];
            let t1 = if outgoing { a.dst } else { a.src };
            let t2 = if outgoing { b.dst } else { b.src };
            (t1, t2, a.gamma.clone(), b.gamma.clone())
        };
        let t1 = self.find(t1);
        let t2 = self.find(t2);
        self.edges[e2].alive = false;
        if t1 == t2 {
            // parallel edges; a surviving expression mismatch means the
            // provided tuple has a relation (rank drops here)
            if g1 != g2 {
                self.exact = false;
            }
            (v, t1)
        } else {
            // transport kept -> absorbed along e1 then e2 reversed
            let tau = if outgoing { tok_mul(&tok_inv(&g1), &g2) } else { tok_mul(&g1, &tok_inv(&g2)) };
            // the basepoint class anchors the expression calibration
            // (its connector is the identity), so it is never absorbed
            let base = self.find(0);
            if t2 == base {
                self.merge(t2, t1, tok_inv(&tau));
                (v, t2)
            } else {
                self.merge(t1, t2, tau);
                (v, t1)
            }
        }
    }
}

/// Folded core automaton of a finitely generated subgroup of a free group.
///
/// States are BFS-numbered from the basepoint (state 0) with edge labels in
/// alphabet order, so structurally equal subgroups produce byte-identical
/// representations and DOT exports.
#[derive(Debug, Clone)]
pub struct SubgroupAutomaton {
    ambient: SchemeId,
    alphabet: Vec<Symbol>,
    gen_index: BTreeMap<Symbol, u32>,
    n: usize,
    fwd: Vec<BTreeMap<u32, u32>>,
    bwd: Vec<BTreeMap<u32, u32>>,
    provided: Vec<Word>,
    /// Expression over `provided` per positive edge, valid when `exact`.
    gamma: Vec<BTreeMap<u32, TokenWord>>,
    exact: bool,
    tree_words: Vec<Word>,
    basis: Vec<Word>,
    basis_index: BTreeMap<(u32, u32), u32>,
}

impl SubgroupAutomaton {
    /// Builds the folded core automaton of `⟨generators⟩` inside the free
    /// group on `alphabet` (the generator list of the `ambient` node).
    pub fn build(ambient: SchemeId, alphabet: &[Symbol], generators: &[Word]) -> Result<Self> {
        let alpha_set: BTreeSet<Symbol> = alphabet.iter().copied().collect();
        for g in generators {
            for s in g.support() {
                if !alpha_set.contains(&s) {
                    return Err(Error::ForeignSymbol(format!("symbol #{}", s.0)));
                }
            }
        }
        let gen_index: BTreeMap<Symbol, u32> =
            alphabet.iter().enumerate().map(|(i, &s)| (s, i as u32)).collect();

        let mut folder = Folder::new();
        let provided: Vec<Word> =
            generators.iter().filter(|w| !w.is_identity()).cloned().collect();
        for (gi, gen) in provided.iter().enumerate() {
            let letters: Vec<(Symbol, i64)> = gen.letters().collect();
            let mut cur = 0usize;
            for (k, &(sym, sign)) in letters.iter().enumerate() {
                let next = if k + 1 == letters.len() { 0 } else { folder.add_vertex() };
                let label = gen_index[&sym];
                // the first traversal step carries the whole generator token
                let gamma: TokenWord = if k == 0 { vec![(gi as u32, 1)] } else { Vec::new() };
                if sign > 0 {
                    folder.add_edge(cur, next, label, gamma);
                } else {
                    // traversing this edge backwards must contribute gamma,
                    // so the stored (forward) expression is its inverse
                    folder.add_edge(next, cur, label, tok_inv(&gamma));
                }
                cur = next;
            }
        }

        // fold to a fixpoint
        let mut work: VecDeque<usize> = (0..folder.parent.len()).collect();
        while let Some(v) = work.pop_front() {
            let v = folder.find(v);
            while let Some((a, b)) = folder.fold_at(v) {
                work.push_back(a);
                work.push_back(b);
            }
        }

        Self::from_folder(ambient, alphabet.to_vec(), gen_index, folder, provided)
    }

    /// The full ambient group as a subgroup (single-state bouquet).
    pub fn whole_group(ambient: SchemeId, alphabet: &[Symbol]) -> Self {
        let gens: Vec<Word> = alphabet.iter().map(|&s| Word::generator(s)).collect();
        Self::build(ambient, alphabet, &gens).expect("single letters are never foreign")
    }

    /// The trivial subgroup.
    pub fn trivial(ambient: SchemeId, alphabet: &[Symbol]) -> Self {
        Self::build(ambient, alphabet, &[]).expect("no generators")
    }

    fn from_folder(
        ambient: SchemeId,
        alphabet: Vec<Symbol>,
        gen_index: BTreeMap<Symbol, u32>,
        mut folder: Folder,
        provided: Vec<Word>,
    ) -> Result<Self> {
        // trim hanging trees (degree <= 1, never the basepoint)
        let base = folder.find(0);
        loop {
            let mut degree: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (id, e) in folder.edges.iter().enumerate() {
                if !e.alive {
                    continue;
                }
                let (s, d) = (e.src, e.dst);
                degree.entry(s).or_default().push(id);
                if d != s {
                    degree.entry(d).or_default().push(id);
                }
            }
            // resolve to class roots
            let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (v, ids) in degree {
                let r = folder.find(v);
                by_root.entry(r).or_default().extend(ids);
            }
            let mut removed = false;
            for (root, mut ids) in by_root {
                ids.sort_unstable();
                ids.dedup();
                if root != base && ids.len() <= 1 {
                    for id in ids {
                        folder.edges[id].alive = false;
                    }
                    removed = true;
                }
            }
            if !removed {
                break;
            }
        }

        // collect the folded graph on class roots
        let mut fwd_raw: BTreeMap<usize, BTreeMap<u32, (usize, TokenWord)>> = BTreeMap::new();
        let mut bwd_raw: BTreeMap<usize, BTreeMap<u32, usize>> = BTreeMap::new();
        let edges = folder.edges.clone();
        for e in &edges {
            if !e.alive {
                continue;
            }
            let s = folder.find(e.src);
            let d = folder.find(e.dst);
            fwd_raw.entry(s).or_default().insert(e.gen, (d, e.gamma.clone()));
            bwd_raw.entry(d).or_default().insert(e.gen, s);
        }

        // canonical BFS renumbering from the basepoint
        let mut order: Vec<usize> = Vec::new();
        let mut number: BTreeMap<usize, u32> = BTreeMap::new();
        let mut queue = VecDeque::new();
        number.insert(base, 0);
        order.push(base);
        queue.push_back(base);
        let mut tree_parent: BTreeMap<usize, (usize, u32, bool)> = BTreeMap::new();
        while let Some(v) = queue.pop_front() {
            let mut nexts: Vec<(u32, bool, usize)> = Vec::new();
            if let Some(out) = fwd_raw.get(&v) {
                for (&g, &(d, _)) in out {
                    nexts.push((g, true, d));
                }
            }
            if let Some(inn) = bwd_raw.get(&v) {
                for (&g, &s) in inn {
                    nexts.push((g, false, s));
                }
            }
            nexts.sort_by_key(|&(g, dir, _)| (g, !dir));
            for (g, dir, w) in nexts {
                if !number.contains_key(&w) {
                    number.insert(w, order.len() as u32);
                    order.push(w);
                    tree_parent.insert(w, (v, g, dir));
                    queue.push_back(w);
                }
            }
        }

        let n = order.len();
        let mut fwd: Vec<BTreeMap<u32, u32>> = vec![BTreeMap::new(); n];
        let mut bwd: Vec<BTreeMap<u32, u32>> = vec![BTreeMap::new(); n];
        let mut gamma: Vec<BTreeMap<u32, TokenWord>> = vec![BTreeMap::new(); n];
        for (&v, out) in &fwd_raw {
            let vi = number[&v];
            for (&g, &(d, ref expr)) in out {
                let di = number[&d];
                fwd[vi as usize].insert(g, di);
                bwd[di as usize].insert(g, vi);
                gamma[vi as usize].insert(g, expr.clone());
            }
        }

        // spanning-tree words and the induced basis
        let mut tree_words: Vec<Word> = vec![Word::identity(); n];
        let mut tree_edges: BTreeSet<(u32, u32)> = BTreeSet::new();
        for &v in order.iter().skip(1) {
            let (p, g, dir) = tree_parent[&v];
            let pi = number[&p];
            let vi = number[&v];
            let sym = alphabet[g as usize];
            if dir {
                tree_edges.insert((pi, g));
                tree_words[vi as usize] =
                    tree_words[pi as usize].mul(&Word::generator(sym));
            } else {
                tree_edges.insert((vi, g));
                tree_words[vi as usize] =
                    tree_words[pi as usize].mul(&Word::syllable(sym, -1));
            }
        }
        let mut basis: Vec<Word> = Vec::new();
        let mut basis_index: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for s in 0..n {
            for (&g, &t) in &fwd[s] {
                if tree_edges.contains(&(s as u32, g)) {
                    continue;
                }
                let idx = basis.len() as u32;
                basis_index.insert((s as u32, g), idx);
                let w = tree_words[s]
                    .mul(&Word::generator(alphabet[g as usize]))
                    .mul(&tree_words[t as usize].inv());
                basis.push(w);
            }
        }

        Ok(SubgroupAutomaton {
            ambient,
            alphabet,
            gen_index,
            n,
            fwd,
            bwd,
            provided,
            gamma,
            exact: folder.exact,
            tree_words,
            basis,
            basis_index,
        })
    }

    pub fn ambient(&self) -> SchemeId {
        self.ambient
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.n
    }

    pub fn provided_generators(&self) -> &[Word] {
        &self.provided
    }

    /// Spanning-tree (Nielsen) basis of the subgroup.
    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// The provided tuple folded without rank loss, so edge expressions
    /// rewrite members over it.
    pub fn has_exact_expressions(&self) -> bool {
        self.exact && self.provided.len() == self.rank()
    }

    /// True when this is the whole ambient group.
    pub fn is_whole_group(&self) -> bool {
        self.n == 1 && self.fwd[0].len() == self.alphabet.len()
    }

    fn step(&self, state: u32, gen: u32, sign: i64) -> Option<u32> {
        if sign > 0 {
            self.fwd[state as usize].get(&gen).copied()
        } else {
            self.bwd[state as usize].get(&gen).copied()
        }
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        for s in w.support() {
            if !self.gen_index.contains_key(&s) {
                return Err(Error::ForeignSymbol(format!("symbol #{}", s.0)));
            }
        }
        Ok(())
    }

    /// Membership test: does `w` read as a loop at the basepoint?
    pub fn member(&self, w: &Word) -> Result<bool> {
        self.check_word(w)?;
        let mut state = 0u32;
        for (sym, sign) in w.letters() {
            let g = self.gen_index[&sym];
            match self.step(state, g, sign) {
                Some(next) => state = next,
                None => return Ok(false),
            }
        }
        Ok(state == 0)
    }

    /// Rewrites a member over the spanning-tree basis; `None` for
    /// non-members.
    pub fn express(&self, w: &Word) -> Result<Option<BasisWord>> {
        self.check_word(w)?;
        let mut state = 0u32;
        let mut tokens: Vec<(u32, i64)> = Vec::new();
        for (sym, sign) in w.letters() {
            let g = self.gen_index[&sym];
            let next = match self.step(state, g, sign) {
                Some(next) => next,
                None => return Ok(None),
            };
            let edge = if sign > 0 { (state, g) } else { (next, g) };
            if let Some(&idx) = self.basis_index.get(&edge) {
                tokens.push((idx, sign));
            }
            state = next;
        }
        if state == 0 {
            Ok(Some(BasisWord(tok_reduce(&tokens))))
        } else {
            Ok(None)
        }
    }

    /// Rewrites a member over the provided generator tuple. Requires the
    /// tuple to be a verified free basis (see [`Self::has_exact_expressions`]).
    pub fn express_in_provided(&self, w: &Word) -> Result<Option<TokenWord>> {
        if !self.has_exact_expressions() {
            return Err(Error::NotAFreeBasis);
        }
        self.check_word(w)?;
        let mut state = 0u32;
        let mut acc: TokenWord = Vec::new();
        for (sym, sign) in w.letters() {
            let g = self.gen_index[&sym];
            let next = match self.step(state, g, sign) {
                Some(next) => next,
                None => return Ok(None),
            };
            let expr = if sign > 0 {
                self.gamma[state as usize][&g].clone()
            } else {
                tok_inv(&self.gamma[next as usize][&g])
            };
            acc = tok_mul(&acc, &expr);
            state = next;
        }
        if state == 0 {
            Ok(Some(acc))
        } else {
            Ok(None)
        }
    }

    /// Canonical representative of the right coset `A·g`: trace the longest
    /// traceable prefix to a state `v`, then return
    /// `tree_word(v) · untraceable suffix`. Members map to the identity.
    pub fn coset_rep(&self, g: &Word) -> Result<Word> {
        self.check_word(g)?;
        let letters: Vec<(Symbol, i64)> = g.letters().collect();
        let mut state = 0u32;
        let mut consumed = 0usize;
        for &(sym, sign) in &letters {
            let gi = self.gen_index[&sym];
            match self.step(state, gi, sign) {
                Some(next) => {
                    state = next;
                    consumed += 1;
                }
                None => break,
            }
        }
        let suffix: Vec<(Symbol, i64)> = letters[consumed..].to_vec();
        Ok(self.tree_words[state as usize].mul(&Word::reduce(&suffix)))
    }

    /// Splits `g = inside · rep` with `inside ∈ A` and `rep = coset_rep(g)`.
    pub fn coset_split(&self, g: &Word) -> Result<(Word, Word)> {
        let rep = self.coset_rep(g)?;
        let inside = g.mul(&rep.inv());
        debug_assert!(self.member(&inside).unwrap_or(false));
        Ok((inside, rep))
    }

    /// Pullback (product) automaton for the intersection of two subgroups.
    pub fn intersect(&self, other: &SubgroupAutomaton) -> Result<SubgroupAutomaton> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch);
        }
        let k = self.alphabet.len() as u32;
        // explore the reachable product component of (base, base)
        let mut index: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        let mut states: Vec<(u32, u32)> = vec![(0, 0)];
        index.insert((0, 0), 0);
        let mut queue = VecDeque::from([(0u32, 0u32)]);
        let mut edges: Vec<(usize, u32, usize)> = Vec::new();
        while let Some((a, b)) = queue.pop_front() {
            let from = index[&(a, b)];
            for g in 0..k {
                if let (Some(na), Some(nb)) = (self.step(a, g, 1), other.step(b, g, 1)) {
                    let key = (na, nb);
                    let to = *index.entry(key).or_insert_with(|| {
                        states.push(key);
                        queue.push_back(key);
                        states.len() - 1
                    });
                    edges.push((from, g, to));
                }
                if let (Some(pa), Some(pb)) = (self.step(a, g, -1), other.step(b, g, -1)) {
                    let key = (pa, pb);
                    if !index.contains_key(&key) {
                        index.insert(key, states.len());
                        states.push(key);
                        queue.push_back(key);
                    }
                    // the forward edge (key -> (a,b)) is recorded when key
                    // is expanded
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();

        // basis words of the trimmed product component, then refold
        let words = graph_basis_words(states.len(), &edges, 0, &self.alphabet);
        SubgroupAutomaton::build(self.ambient, &self.alphabet, &words)
    }

    /// Subgroup equality via mutual basis membership.
    pub fn equal(&self, other: &SubgroupAutomaton) -> Result<bool> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch);
        }
        for w in self.basis() {
            if !other.member(w)? {
                return Ok(false);
            }
        }
        for w in other.basis() {
            if !self.member(w)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True when every element of `other` lies in `self`.
    pub fn contains(&self, other: &SubgroupAutomaton) -> Result<bool> {
        for w in other.basis() {
            if !self.member(w)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Deterministic DOT export (BFS numbering, label order).
    pub fn to_dot(&self, table: &SymbolTable) -> String {
        let mut out = String::from("digraph subgroup {\n  rankdir=LR;\n  node [shape=circle];\n");
        out.push_str("  0 [shape=doublecircle];\n");
        for s in 0..self.n {
            for (&g, &t) in &self.fwd[s] {
                let name = table.name(self.alphabet[g as usize]);
                out.push_str(&format!("  {s} -> {t} [label=\"{name}\"];\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Spanning-tree basis words of an arbitrary labeled graph after trimming
/// to the core at `base`. Used to convert product graphs back into folded
/// automata.
fn graph_basis_words(
    n: usize,
    edges: &[(usize, u32, usize)],
    base: usize,
    alphabet: &[Symbol],
) -> Vec<Word> {
    let mut alive_edges: BTreeSet<usize> = (0..edges.len()).collect();
    let mut alive_states: BTreeSet<usize> = (0..n).collect();
    loop {
        let mut degree: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &eid in &alive_edges {
            let (s, _, d) = edges[eid];
            degree.entry(s).or_default().push(eid);
            if d != s {
                degree.entry(d).or_default().push(eid);
            }
        }
        let mut removed = false;
        for &v in alive_states.clone().iter() {
            let deg = degree.get(&v).map(|e| e.len()).unwrap_or(0);
            if v != base && deg <= 1 {
                alive_states.remove(&v);
                if let Some(ids) = degree.get(&v) {
                    for &id in ids {
                        alive_edges.remove(&id);
                    }
                }
                removed = true;
            }
        }
        if !removed {
            break;
        }
    }

    // BFS spanning tree over the surviving component
    let mut tree_word: BTreeMap<usize, Word> = BTreeMap::new();
    tree_word.insert(base, Word::identity());
    let mut adjacency: BTreeMap<usize, Vec<(usize, bool, usize)>> = BTreeMap::new();
    for &eid in &alive_edges {
        let (s, _, d) = edges[eid];
        adjacency.entry(s).or_default().push((eid, true, d));
        adjacency.entry(d).or_default().push((eid, false, s));
    }
    for nexts in adjacency.values_mut() {
        nexts.sort_by_key(|&(eid, dir, _)| (edges[eid].1, !dir, eid));
    }
    let mut tree_edge: BTreeSet<usize> = BTreeSet::new();
    let mut queue = VecDeque::from([base]);
    while let Some(v) = queue.pop_front() {
        let Some(nexts) = adjacency.get(&v) else { continue };
        for &(eid, dir, w) in nexts {
            if tree_word.contains_key(&w) {
                continue;
            }
            let sym = alphabet[edges[eid].1 as usize];
            let step = Word::syllable(sym, if dir { 1 } else { -1 });
            tree_word.insert(w, tree_word[&v].mul(&step));
            tree_edge.insert(eid);
            queue.push_back(w);
        }
    }

    let mut words = Vec::new();
    for &eid in &alive_edges {
        if tree_edge.contains(&eid) {
            continue;
        }
        let (s, g, d) = edges[eid];
        if !tree_word.contains_key(&s) {
            continue; // unreachable piece
        }
        let w = tree_word[&s]
            .mul(&Word::generator(alphabet[g as usize]))
            .mul(&tree_word[&d].inv());
        if !w.is_identity() {
            words.push(w);
        }
    }
    words
}

/// Searches for an element of `target ∩ (group · x)` (a left-coset slice of
/// `target`). Returns the shortest witness found by a deterministic BFS on
/// the product of `target` with the coset automaton of `group · x`.
pub fn coset_intersection_witness(
    target: &SubgroupAutomaton,
    group: &SubgroupAutomaton,
    x: &Word,
) -> Result<Option<Word>> {
    if target.ambient != group.ambient {
        return Err(Error::AmbientMismatch);
    }
    group.check_word(x)?;
    target.check_word(x)?;
    let k = target.alphabet.len() as u32;

    // coset automaton: trace the longest prefix of x in `group`, then hang
    // the untraceable suffix as a fresh path; its endpoint is the accept
    // state for words of group·x
    let letters: Vec<(Symbol, i64)> = x.letters().collect();
    let mut state = 0u32;
    let mut consumed = 0;
    for &(sym, sign) in &letters {
        let g = group.gen_index[&sym];
        match group.step(state, g, sign) {
            Some(next) => {
                state = next;
                consumed += 1;
            }
            None => break,
        }
    }
    let ng = group.n as u32;
    let tail: Vec<(u32, i64)> =
        letters[consumed..].iter().map(|&(s, e)| (group.gen_index[&s], e)).collect();
    // states 0..ng are group states; ng+1 ..= ng+tail.len() the hanging path
    let step_c = |s: u32, g: u32, sign: i64| -> Option<u32> {
        if s < ng {
            if let Some(t) = group.step(s, g, sign) {
                return Some(t);
            }
            if !tail.is_empty() && s == state {
                let (tg, te) = tail[0];
                if tg == g && te.signum() == sign.signum() {
                    return Some(ng + 1);
                }
            }
            None
        } else {
            let pos = (s - ng) as usize; // 1-based tail progress
            // moving forward along the tail
            if pos < tail.len() {
                let (tg, te) = tail[pos];
                if tg == g && te.signum() == sign.signum() {
                    return Some(s + 1);
                }
            }
            // moving backward along the tail
            if pos >= 1 {
                let (tg, te) = tail[pos - 1];
                if tg == g && te.signum() == -sign.signum() {
                    return Some(if pos == 1 { state } else { s - 1 });
                }
            }
            None
        }
    };
    let start = (0u32, 0u32);
    let accept = (0u32, if tail.is_empty() { state } else { ng + tail.len() as u32 });
    if start == accept {
        return Ok(Some(Word::identity()));
    }
    let mut prev: BTreeMap<(u32, u32), ((u32, u32), u32, i64)> = BTreeMap::new();
    let mut queue = VecDeque::from([start]);
    let mut seen: BTreeSet<(u32, u32)> = BTreeSet::from([start]);
    while let Some((a, c)) = queue.pop_front() {
        for g in 0..k {
            for sign in [1i64, -1] {
                let (Some(na), Some(nc)) = (target.step(a, g, sign), step_c(c, g, sign)) else {
                    continue;
                };
                let key = (na, nc);
                if seen.insert(key) {
                    prev.insert(key, ((a, c), g, sign));
                    if key == accept {
                        // reconstruct
                        let mut letters_rev: Vec<(Symbol, i64)> = Vec::new();
                        let mut cur = key;
                        while cur != start {
                            let (p, g, sign) = prev[&cur];
                            letters_rev.push((target.alphabet[g as usize], sign));
                            cur = p;
                        }
                        letters_rev.reverse();
                        return Ok(Some(Word::reduce(&letters_rev)));
                    }
                    queue.push_back(key);
                }
            }
        }
    }
    Ok(None)
}

/// An isomorphism between two finitely generated subgroups of free groups,
/// specified on a verified free basis of the domain.
#[derive(Debug, Clone)]
pub struct Morphism {
    domain: SubgroupAutomaton,
    codomain: SubgroupAutomaton,
    basis_words: Vec<Word>,
    images: Vec<Word>,
}

impl Morphism {
    /// Builds the morphism `basis[i] -> images[i]`. Fails unless the basis
    /// tuple folds without rank loss (free basis) and the image tuple does
    /// too (so ranks match and the map is invertible on its image).
    pub fn on_basis(
        dom_ambient: SchemeId,
        dom_alphabet: &[Symbol],
        cod_ambient: SchemeId,
        cod_alphabet: &[Symbol],
        pairs: &[(Word, Word)],
    ) -> Result<Self> {
        let basis_words: Vec<Word> = pairs.iter().map(|(b, _)| b.clone()).collect();
        let images: Vec<Word> = pairs.iter().map(|(_, i)| i.clone()).collect();
        let domain = SubgroupAutomaton::build(dom_ambient, dom_alphabet, &basis_words)?;
        if !domain.has_exact_expressions() {
            return Err(Error::NotAFreeBasis);
        }
        let codomain = SubgroupAutomaton::build(cod_ambient, cod_alphabet, &images)?;
        if !codomain.has_exact_expressions() {
            return Err(Error::NotAFreeBasis);
        }
        Ok(Morphism { domain, codomain, basis_words, images })
    }

    pub fn domain(&self) -> &SubgroupAutomaton {
        &self.domain
    }

    pub fn codomain(&self) -> &SubgroupAutomaton {
        &self.codomain
    }

    pub fn basis_words(&self) -> &[Word] {
        &self.basis_words
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    /// Applies the morphism to a member of the domain.
    pub fn apply(&self, w: &Word) -> Result<Word> {
        let tokens = self.domain.express_in_provided(w)?.ok_or(Error::NotAMember)?;
        Ok(substitute(&tokens, &self.images))
    }

    /// Applies the inverse morphism to a member of the codomain.
    pub fn apply_inverse(&self, w: &Word) -> Result<Word> {
        let tokens = self.codomain.express_in_provided(w)?.ok_or(Error::NotAMember)?;
        Ok(substitute(&tokens, &self.basis_words))
    }

    /// Image of a subgroup `s ⊆ domain` under the morphism.
    pub fn subgroup_image(&self, s: &SubgroupAutomaton) -> Result<SubgroupAutomaton> {
        let mut images = Vec::new();
        for w in s.basis() {
            images.push(self.apply(w)?);
        }
        SubgroupAutomaton::build(self.codomain.ambient, &self.codomain.alphabet, &images)
    }
}

fn substitute(tokens: &[(u32, i64)], words: &[Word]) -> Word {
    let mut acc = Word::identity();
    for &(idx, exp) in tokens {
        acc = acc.mul(&words[idx as usize].pow(exp));
    }
    acc
}


impl SubgroupAutomaton {
    /// Debug rendering of the transition table with edge expressions.
    pub fn debug_edges(&self, table: &SymbolTable) -> String {
        let mut out = String::new();
        for s in 0..self.n {
            for (&g, &t) in &self.fwd[s] {
                let expr = &self.gamma[s][&g];
                out.push_str(&format!(
                    "  {s} -{}-> {t}  gamma={:?}\n",
                    table.name(self.alphabet[g as usize]),
                    expr
                ));
            }
        }
        out
    }
}
