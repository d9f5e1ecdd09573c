//! The C*-inference `Σ wᵢwᵢ* = 0 ⇒ wᵢ = 0`.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::{Alphabet, NCPolynomial, RelationSet, Word};
use crate::rational::is_positive;

/// If `w = u·u*` for some nonempty `u`, returns `u`.
fn square_root_word(al: &Alphabet, w: &Word) -> Option<Word> {
    let n = w.len();
    if n == 0 || n % 2 == 1 {
        return None;
    }
    let u = Word(w.letters()[..n / 2].to_vec());
    let tail = &w.letters()[n / 2..];
    (al.star_word(&u).letters() == tail).then_some(u)
}

fn contains_subword(w: &Word, z: &Word) -> bool {
    w.letters().windows(z.len()).any(|win| win == z.letters())
}

/// Replaces relations whose terms are all positive multiples of words
/// `u·u*` (and which have no constant) by `u = 0` for each summand, kills
/// terms containing a vanishing word, and repeats until nothing changes.
pub fn positivity_simplify(r: &RelationSet) -> RelationSet {
    let al = r.alphabet().clone();
    let mut zeros: BTreeSet<Word> = BTreeSet::new();
    let mut current: Vec<NCPolynomial> = r.iter().cloned().collect();
    loop {
        let mut changed = false;
        let mut next = Vec::new();
        for p in current {
            let pruned = if zeros.is_empty() {
                p.clone()
            } else {
                let terms = p
                    .terms()
                    .filter(|(w, _)| !zeros.iter().any(|z| contains_subword(w, z)))
                    .map(|(w, c)| (w.clone(), c.clone()))
                    .collect();
                NCPolynomial::from_terms(&al, terms)
            };
            if pruned != p {
                changed = true;
            }
            if pruned.is_zero() {
                continue;
            }
            let roots: Option<Vec<Word>> = if pruned.constant_term().is_zero()
                && pruned.terms().all(|(_, c)| is_positive(c))
            {
                pruned.terms().map(|(w, _)| square_root_word(&al, w)).collect()
            } else {
                None
            };
            match roots {
                Some(us) => {
                    changed = true;
                    for u in us {
                        let su = al.star_word(&u);
                        zeros.insert(su.clone());
                        zeros.insert(u);
                    }
                }
                None => next.push(pruned),
            }
        }
        current = next;
        if !changed {
            break;
        }
    }
    let mut out = RelationSet::new(&al);
    for z in &zeros {
        let s = al.star_word(z);
        if *z <= s {
            out.insert(NCPolynomial::word(&al, z.clone())).expect("same alphabet");
        }
    }
    for p in current {
        out.insert(p).expect("same alphabet");
    }
    out
}
