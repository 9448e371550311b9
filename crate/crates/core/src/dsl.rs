//! The declaration language for workspaces: one declaration per line,
//! `#` comments, UTF-8 with LF or CRLF endings.
//!
//! ```text
//! group F = free(a, b, c)
//! sub A = subgroup(F; b, c^2)
//! iso phi : A -> B on { b -> c^-1 b c, c^2 -> c^2 }
//! group X = hnn(F; t1 fixes A, t2 : A2 -> B2 by phi2)
//! group Y = amalgam(G, H; over A ~ B by psi)
//! group S = star(M; (K1, L1, u), (K2, L2, v))
//! ```

use crate::error::{Error, Result};
use crate::scheme::{Pairing, SchemeId, SchemeNode, Workspace};
use crate::stallings::Morphism;
use crate::subgroup::SubgroupHandle;
use crate::words::{parse_word, Word};
use std::collections::BTreeMap;

/// A named, validated collection of schemes, subgroups and isomorphisms.
#[derive(Debug, Default)]
pub struct Document {
    pub ws: Workspace,
    pub groups: BTreeMap<String, SchemeId>,
    pub subgroups: BTreeMap<String, (String, SubgroupHandle)>,
    pub isos: BTreeMap<String, IsoDecl>,
}

#[derive(Debug, Clone)]
pub struct IsoDecl {
    pub domain_sub: String,
    pub codomain_sub: String,
    pub morphism: Morphism,
}

impl Document {
    /// Parses one or more sources (files already read to strings).
    pub fn parse(sources: &[(&str, &str)]) -> Result<Document> {
        let mut doc = Document::default();
        for (_, text) in sources {
            doc.parse_source(text)?;
        }
        // expand stars so queries can run against them
        let roots: Vec<SchemeId> = doc.groups.values().copied().collect();
        for root in roots {
            doc.ws.prepare(root)?;
        }
        Ok(doc)
    }

    pub fn group(&self, name: &str) -> Result<SchemeId> {
        self.groups
            .get(name)
            .copied()
            .ok_or_else(|| Error::Other(format!("unknown group `{name}`")))
    }

    pub fn subgroup(&self, name: &str) -> Result<&SubgroupHandle> {
        self.subgroups
            .get(name)
            .map(|(_, h)| h)
            .ok_or_else(|| Error::Other(format!("unknown subgroup `{name}`")))
    }

    /// Structural diagnostics over every declared group.
    pub fn validate(&self) -> Vec<(String, crate::scheme::Diagnostic)> {
        let mut out = Vec::new();
        for (name, &id) in &self.groups {
            for d in self.ws.validate(id) {
                out.push((name.clone(), d));
            }
        }
        out
    }

    fn parse_source(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            let line = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            self.parse_line(line, lineno + 1)?;
        }
        Ok(())
    }

    fn parse_line(&mut self, line: &str, lineno: usize) -> Result<()> {
        let err = |msg: String| Error::Parse { line: lineno, col: 1, msg };
        if let Some(rest) = line.strip_prefix("group ") {
            let (name, body) = split_once(rest, '=', lineno)?;
            let name = name.trim().to_string();
            if self.groups.contains_key(&name) {
                return Err(err(format!("group `{name}` already declared")));
            }
            let body = body.trim();
            let id = if let Some(args) = call_args(body, "free") {
                let names: Vec<&str> =
                    args.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
                self.ws.free(&names).map_err(|e| err(format!("{e}")))?
            } else if let Some(args) = call_args(body, "hnn") {
                self.parse_hnn(args, lineno)?
            } else if let Some(args) = call_args(body, "amalgam") {
                self.parse_amalgam(args, lineno)?
            } else if let Some(args) = call_args(body, "star") {
                self.parse_star(args, lineno)?
            } else {
                return Err(err(format!("unrecognized group body `{body}`")));
            };
            self.groups.insert(name, id);
            Ok(())
        } else if let Some(rest) = line.strip_prefix("sub ") {
            let (name, body) = split_once(rest, '=', lineno)?;
            let name = name.trim().to_string();
            let body = body.trim();
            let Some(args) = call_args(body, "subgroup") else {
                return Err(err(format!("expected `subgroup(...)`, found `{body}`")));
            };
            let (group_name, gen_text) = split_once(args, ';', lineno)?;
            let ambient = self.group(group_name.trim()).map_err(|e| err(format!("{e}")))?;
            let gens = self.parse_word_list(ambient, gen_text, lineno)?;
            let handle = self.make_subgroup(ambient, gens, lineno)?;
            self.subgroups.insert(name, (group_name.trim().to_string(), handle));
            Ok(())
        } else if let Some(rest) = line.strip_prefix("iso ") {
            // iso NAME : A -> B on { w -> w, ... }
            let (name, rest) = split_once(rest, ':', lineno)?;
            let name = name.trim().to_string();
            let (arrow_part, map_part) = split_once(rest, " on ", lineno)?;
            let (dom, cod) = split_once(arrow_part, "->", lineno)?;
            let dom = dom.trim().to_string();
            let cod = cod.trim().to_string();
            let map_part = map_part.trim();
            let inner = map_part
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| err("expected `{ ... }`".into()))?;
            let dom_handle = self.subgroup(&dom).map_err(|e| err(format!("{e}")))?.clone();
            let cod_handle = self.subgroup(&cod).map_err(|e| err(format!("{e}")))?.clone();
            let dom_amb = dom_handle.ambient();
            let cod_amb = cod_handle.ambient();
            let mut pairs = Vec::new();
            for entry in split_top_level(inner, ',') {
                let entry = entry.trim();
                if entry.is_empty() {
                    continue;
                }
                let (lhs, rhs) = split_once(entry, "->", lineno)?;
                let key = self.parse_one_word(dom_amb, lhs.trim(), lineno)?;
                let val = self.parse_one_word(cod_amb, rhs.trim(), lineno)?;
                pairs.push((key, val));
            }
            let morphism = Morphism::on_basis(
                dom_amb,
                &self.ws.free_generators(dom_amb).map_err(|e| err(format!("{e}")))?,
                cod_amb,
                &self.ws.free_generators(cod_amb).map_err(|e| err(format!("{e}")))?,
                &pairs,
            )
            .map_err(|e| err(format!("{e}")))?;
            // the declared map must match the declared subgroups
            if let (Some(d), Some(c)) = (dom_handle.automaton(), cod_handle.automaton()) {
                if !morphism.domain().equal(d).map_err(|e| err(format!("{e}")))? {
                    return Err(err(format!("map domain differs from subgroup `{dom}`")));
                }
                if !morphism.codomain().equal(c).map_err(|e| err(format!("{e}")))? {
                    return Err(err(format!("map image differs from subgroup `{cod}`")));
                }
            }
            self.isos.insert(name, IsoDecl { domain_sub: dom, codomain_sub: cod, morphism });
            Ok(())
        } else {
            Err(err(format!("unrecognized declaration `{line}`")))
        }
    }

    fn parse_hnn(&mut self, args: &str, lineno: usize) -> Result<SchemeId> {
        let err = |msg: String| Error::Parse { line: lineno, col: 1, msg };
        let (base_name, clause_text) = split_once(args, ';', lineno)?;
        let base = self.group(base_name.trim()).map_err(|e| err(format!("{e}")))?;
        let mut letters: Vec<(String, SubgroupHandle, SubgroupHandle, Pairing)> = Vec::new();
        for clause in split_top_level(clause_text, ',') {
            let clause = clause.trim();
            if clause.is_empty() {
                continue;
            }
            if let Some((letter, sub)) = clause.split_once(" fixes ") {
                let handle = self.subgroup(sub.trim()).map_err(|e| err(format!("{e}")))?.clone();
                letters.push((
                    letter.trim().to_string(),
                    handle.clone(),
                    handle,
                    Pairing::Identity,
                ));
            } else if let Some((letter, rest)) = clause.split_once(':') {
                let (pair_part, iso_name) = split_once(rest, " by ", lineno)?;
                let (a_name, b_name) = split_once(pair_part, "->", lineno)?;
                let a = self.subgroup(a_name.trim()).map_err(|e| err(format!("{e}")))?.clone();
                let b = self.subgroup(b_name.trim()).map_err(|e| err(format!("{e}")))?.clone();
                let iso = self
                    .isos
                    .get(iso_name.trim())
                    .ok_or_else(|| err(format!("unknown iso `{}`", iso_name.trim())))?;
                letters.push((
                    letter.trim().to_string(),
                    a,
                    b,
                    Pairing::Iso(iso.morphism.clone()),
                ));
            } else {
                return Err(err(format!("unrecognized extension clause `{clause}`")));
            }
        }
        let with_refs: Vec<(&str, SubgroupHandle, SubgroupHandle, Pairing)> =
            letters.iter().map(|(n, a, b, p)| (n.as_str(), a.clone(), b.clone(), p.clone())).collect();
        self.ws.hnn(base, with_refs).map_err(|e| err(format!("{e}")))
    }

    fn parse_amalgam(&mut self, args: &str, lineno: usize) -> Result<SchemeId> {
        let err = |msg: String| Error::Parse { line: lineno, col: 1, msg };
        let (factors, over_part) = split_once(args, ';', lineno)?;
        let (left_name, right_name) = split_once(factors, ',', lineno)?;
        let left = self.group(left_name.trim()).map_err(|e| err(format!("{e}")))?;
        let right = self.group(right_name.trim()).map_err(|e| err(format!("{e}")))?;
        let over = over_part.trim();
        let over = over
            .strip_prefix("over ")
            .ok_or_else(|| err("expected `over A ~ B [by phi]`".into()))?;
        let (a_name, rest) = split_once(over, '~', lineno)?;
        let (b_name, pairing) = match rest.split_once(" by ") {
            Some((b, iso_name)) => {
                let iso = self
                    .isos
                    .get(iso_name.trim())
                    .ok_or_else(|| err(format!("unknown iso `{}`", iso_name.trim())))?;
                (b.trim(), Pairing::Iso(iso.morphism.clone()))
            }
            None => (rest.trim(), Pairing::Identity),
        };
        let a = self.subgroup(a_name.trim()).map_err(|e| err(format!("{e}")))?.clone();
        let b = self.subgroup(b_name).map_err(|e| err(format!("{e}")))?.clone();
        self.ws.amalgam(left, right, a, b, pairing).map_err(|e| err(format!("{e}")))
    }

    fn parse_star(&mut self, args: &str, lineno: usize) -> Result<SchemeId> {
        let err = |msg: String| Error::Parse { line: lineno, col: 1, msg };
        let (shared_name, parts_text) = split_once(args, ';', lineno)?;
        let shared = self.group(shared_name.trim()).map_err(|e| err(format!("{e}")))?;
        let mut parts = Vec::new();
        for part in split_top_level(parts_text, ',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let inner = part
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| err(format!("expected `(K, L, t)`, found `{part}`")))?;
            let pieces: Vec<&str> = inner.split(',').map(str::trim).collect();
            if pieces.len() != 3 {
                return Err(err(format!("expected `(K, L, t)`, found `{part}`")));
            }
            let factor = self.group(pieces[0]).map_err(|e| err(format!("{e}")))?;
            let fixed = self.subgroup(pieces[1]).map_err(|e| err(format!("{e}")))?.clone();
            parts.push((factor, fixed, pieces[2].to_string()));
        }
        let with_refs: Vec<(SchemeId, SubgroupHandle, &str)> =
            parts.iter().map(|(f, l, n)| (*f, l.clone(), n.as_str())).collect();
        self.ws.star(shared, with_refs).map_err(|e| err(format!("{e}")))
    }

    fn parse_word_list(&self, ambient: SchemeId, text: &str, lineno: usize) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        for piece in split_top_level(text, ',') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            out.push(self.parse_one_word(ambient, piece, lineno)?);
        }
        Ok(out)
    }

    fn parse_one_word(&self, ambient: SchemeId, text: &str, lineno: usize) -> Result<Word> {
        parse_word(text, &self.ws.name_map(ambient)).map_err(|e| match e {
            Error::Parse { col, msg, .. } => Error::Parse { line: lineno, col, msg },
            other => Error::Parse { line: lineno, col: 1, msg: format!("{other}") },
        })
    }

    /// Picks a membership strategy for a declared subgroup: Stallings
    /// automata over free groups; a stable closure over an HNN node when
    /// the generators split into base words plus stable letters; bounded
    /// search otherwise.
    fn make_subgroup(
        &self,
        ambient: SchemeId,
        gens: Vec<Word>,
        lineno: usize,
    ) -> Result<SubgroupHandle> {
        let err = |msg: String| Error::Parse { line: lineno, col: 1, msg };
        if self.ws.is_free(ambient) {
            return SubgroupHandle::free(&self.ws, ambient, gens).map_err(|e| err(format!("{e}")));
        }
        if let SchemeNode::Hnn { base, extensions } = self.ws.node(ambient) {
            let stable: Vec<crate::words::Symbol> = extensions.iter().map(|e| e.letter).collect();
            let base_alpha = self.ws.alphabet(*base);
            let mut base_gens = Vec::new();
            let mut letters = Vec::new();
            let mut mixed = false;
            for g in &gens {
                let support: Vec<_> = g.support().collect();
                if support.iter().all(|s| base_alpha.contains(s)) {
                    base_gens.push(g.clone());
                } else if support.len() == 1 && stable.contains(&support[0]) && g.len() == 1 {
                    letters.push(support[0]);
                } else {
                    mixed = true;
                }
            }
            if !mixed && !letters.is_empty() {
                if let Ok(h) =
                    SubgroupHandle::stable_closure(&self.ws, ambient, base_gens, letters)
                {
                    return Ok(h);
                }
            }
        }
        Ok(SubgroupHandle::bounded(ambient, gens, 12))
    }
}

fn split_once<'a>(text: &'a str, sep: impl Pattern, lineno: usize) -> Result<(&'a str, &'a str)> {
    sep.split_once(text).ok_or_else(|| Error::Parse {
        line: lineno,
        col: 1,
        msg: format!("expected `{}`", sep.show()),
    })
}

/// Minimal pattern helper so `split_once` accepts both chars and strs.
trait Pattern: Copy {
    fn split_once(self, text: &str) -> Option<(&str, &str)>;
    fn show(self) -> String;
}

impl Pattern for char {
    fn split_once(self, text: &str) -> Option<(&str, &str)> {
        text.split_once(self)
    }
    fn show(self) -> String {
        self.to_string()
    }
}

impl Pattern for &str {
    fn split_once(self, text: &str) -> Option<(&str, &str)> {
        text.split_once(self)
    }
    fn show(self) -> String {
        self.to_string()
    }
}

/// Splits on `sep` outside parentheses and braces.
fn split_top_level(text: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&text[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

/// Extracts the argument text of `name(...)`.
fn call_args<'a>(body: &'a str, name: &str) -> Option<&'a str> {
    let rest = body.strip_prefix(name)?.trim_start();
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    Some(inner)
}

fn b_index_text(i: i64) -> String {
    match i {
        0 => "b".to_string(),
        1 => "c^-1 b c".to_string(),
        -1 => "c b c^-1".to_string(),
        i if i > 0 => format!("c^-{i} b c^{i}"),
        i => format!("c^{} b c^{}", -i, i),
    }
}

/// DSL text for the index-doubling extension at level `m`.
pub fn emit_xi(m: i64) -> String {
    let t = crate::gadgets::stable_name("t", m);
    let tp = crate::gadgets::stable_name("tp", m);
    let mut out = String::new();
    out.push_str("group BC = free(b, c)\n");
    out.push_str("sub A = subgroup(BC; b, c)\n");
    out.push_str(&format!("sub B{m} = subgroup(BC; {}, c^2)\n", b_index_text(1 - m)));
    out.push_str(&format!("sub Bp{m} = subgroup(BC; {}, c^2)\n", b_index_text(-m)));
    out.push_str(&format!(
        "iso xi{m} : A -> B{m} on {{ b -> {}, c -> c^2 }}\n",
        b_index_text(1 - m)
    ));
    out.push_str(&format!(
        "iso xip{m} : A -> Bp{m} on {{ b -> {}, c -> c^2 }}\n",
        b_index_text(-m)
    ));
    out.push_str(&format!(
        "group Xi{m} = hnn(BC; {t} : A -> B{m} by xi{m}, {tp} : A -> Bp{m} by xip{m})\n"
    ));
    out
}

/// DSL text for the free product of ⟨a⟩ with the level-`m` extension.
pub fn emit_theta(m: i64) -> String {
    let mut out = emit_xi(m);
    out.push_str("group FA = free(a)\n");
    out.push_str("sub TA = subgroup(FA; )\n");
    out.push_str(&format!("sub TX = subgroup(Xi{m}; )\n"));
    out.push_str(&format!("group Theta{m} = amalgam(FA, Xi{m}; over TA ~ TX)\n"));
    out
}

/// DSL text for the two-sided tail witness at level `m`.
pub fn emit_example54(m: i64) -> String {
    let t = crate::gadgets::stable_name("t", m);
    let tp = crate::gadgets::stable_name("tp", m);
    let (t0, tp0) = if m == 0 { ("s0", "sp0") } else { ("t0", "tp0") };
    let mut out = String::new();
    out.push_str("group BC = free(b, c)\n");
    out.push_str("sub A = subgroup(BC; b, c)\n");
    out.push_str(&format!("sub BU{m} = subgroup(BC; {}, c^2)\n", b_index_text(1 - m)));
    out.push_str(&format!("sub BUp{m} = subgroup(BC; {}, c^2)\n", b_index_text(-m)));
    out.push_str(&format!(
        "iso xi{m} : A -> BU{m} on {{ b -> {}, c -> c^2 }}\n",
        b_index_text(1 - m)
    ));
    out.push_str(&format!(
        "iso xip{m} : A -> BUp{m} on {{ b -> {}, c -> c^2 }}\n",
        b_index_text(-m)
    ));
    out.push_str(&format!(
        "group XiM = hnn(BC; {t} : A -> BU{m} by xi{m}, {tp} : A -> BUp{m} by xip{m})\n"
    ));
    out.push_str("sub B0 = subgroup(BC; c^-1 b c, c^2)\n");
    out.push_str("sub B0p = subgroup(BC; b, c^2)\n");
    out.push_str("iso zeta : A -> B0 on { b -> c^-1 b c, c -> c^2 }\n");
    out.push_str("iso zetap : A -> B0p on { b -> b, c -> c^2 }\n");
    out.push_str(&format!(
        "group Xi0 = hnn(BC; {t0} : A -> B0 by zeta, {tp0} : A -> B0p by zetap)\n"
    ));
    out.push_str(&format!("sub L1 = subgroup(XiM; {}, {t}, {tp})\n", b_index_text(m)));
    out.push_str(&format!("sub L2 = subgroup(Xi0; {}, {t0}, {tp0})\n", b_index_text(-1)));
    out.push_str("group KJ = star(BC; (XiM, L1, u), (Xi0, L2, v))\n");
    out.push_str("sub LJ = subgroup(KJ; b^(u), c^(u), b^(v), c^(v))\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite;

    #[test]
    fn parses_groups_subs_and_isos() {
        let text = "\
# a small workspace
group F = free(b, c)
sub A = subgroup(F; b, c)
sub B = subgroup(F; c^-1 b c, c^2)
sub Bp = subgroup(F; b, c^2)
iso phi : A -> B on { b -> c^-1 b c, c -> c^2 }
iso phip : A -> Bp on { b -> b, c -> c^2 }
group X = hnn(F; t : A -> B by phi, tp : A -> Bp by phip)
sub L = subgroup(X; b, t, tp)
";
        let doc = Document::parse(&[("test", text)]).unwrap();
        assert!(doc.validate().is_empty(), "{:?}", doc.validate());
        let x = doc.group("X").unwrap();
        let w = doc.ws.parse(x, "t^-1 b t").unwrap();
        let nf = rewrite::normal_form(&doc.ws, x, &w).unwrap();
        assert_eq!(doc.ws.show(&nf), "c^-1 b c");
        // the declared L picked up a stable-closure strategy
        let (_, l) = &doc.subgroups["L"];
        assert!(matches!(l.strategy(), crate::subgroup::Strategy::StableClosure(_)));
        // and decides membership of deep tail elements
        let b5 = doc.ws.parse(x, "c^-5 b c^5").unwrap();
        assert!(l.member(&doc.ws, &b5).unwrap().is_yes());
        let bneg = doc.ws.parse(x, "c b c^-1").unwrap();
        assert!(l.member(&doc.ws, &bneg).unwrap().is_no());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "group F = free(b, c)\nsub A = subgroup(F; z)\n";
        match Document::parse(&[("test", text)]) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn crlf_and_comments_are_accepted() {
        let text = "group F = free(b)\r\n# comment\r\nsub A = subgroup(F; b)\r\n";
        let doc = Document::parse(&[("test", text)]).unwrap();
        assert!(doc.groups.contains_key("F"));
        assert!(doc.subgroups.contains_key("A"));
    }

    #[test]
    fn emitted_gadgets_reparse() {
        for m in [0i64, 2, 3] {
            let xi = emit_xi(m);
            let doc = Document::parse(&[("xi", &xi)]).unwrap();
            assert!(doc.validate().is_empty(), "m={m}: {:?}", doc.validate());

            let theta = emit_theta(m);
            let doc = Document::parse(&[("theta", &theta)]).unwrap();
            assert!(doc.validate().is_empty(), "m={m}: {:?}", doc.validate());

            let e54 = emit_example54(m);
            let doc = Document::parse(&[("e54", &e54)]).unwrap();
            assert!(doc.validate().is_empty(), "m={m}: {:?}", doc.validate());
            // the declared join subgroup has four generators
            let (_, lj) = &doc.subgroups["LJ"];
            assert_eq!(lj.generator_words().len(), 4);
        }
    }
}
