//! Brute-force enumeration oracles, independent of the automaton and
//! rewriting machinery: they operate on raw words with nothing but free
//! reduction, and exist so the clever paths have something dumb and
//! trustworthy to disagree with.

use crate::words::Word;
use std::collections::BTreeSet;

/// All elements expressible as products of at most `depth` factors drawn
/// from `gens` and their inverses, as freely reduced words.
pub fn enumerate_ball(gens: &[Word], depth: usize) -> BTreeSet<Word> {
    let mut ball: BTreeSet<Word> = BTreeSet::new();
    ball.insert(Word::identity());
    let mut frontier: Vec<Word> = vec![Word::identity()];
    let factors: Vec<Word> = gens
        .iter()
        .flat_map(|g| [g.clone(), g.inv()])
        .filter(|w| !w.is_identity())
        .collect();
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &frontier {
            for f in &factors {
                let p = w.mul(f);
                if ball.insert(p.clone()) {
                    next.push(p);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    ball
}

/// Membership verdict by bounded enumeration: `Some(true)` when a product
/// decomposition was found, `None` when the budget says nothing.
pub fn member(gens: &[Word], w: &Word, depth: usize) -> Option<bool> {
    if enumerate_ball(gens, depth).contains(w) {
        Some(true)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{ScopeId, Symbol, SymbolTable};

    #[test]
    fn ball_contains_products_and_inverses() {
        let mut t = SymbolTable::new();
        let b = t.intern("b", ScopeId(0));
        let c = t.intern("c", ScopeId(0));
        let gens = vec![Word::generator(b), Word::generator(c).pow(2)];
        let ball = enumerate_ball(&gens, 3);
        assert!(ball.contains(&Word::identity()));
        assert!(ball.contains(&Word::generator(b).pow(-3)));
        assert!(ball.contains(&Word::generator(b).mul(&Word::generator(c).pow(2))));
        assert!(!ball.contains(&Word::generator(c)));
        let _ = Symbol(0);
    }
}
