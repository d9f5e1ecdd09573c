//! Degree-bounded rewriting modulo a relation set.
//!
//! Relations are oriented by their leading word under the deglex order and
//! kept interreduced: no left-hand side contains another as a subword and
//! right-hand sides are in normal form. On top of that, overlaps between
//! left-hand sides are resolved in order of overlap length, but only up to
//! the requested degree bound. Overlaps beyond the bound are left pending,
//! which is what the `saturated` flag reports. Everything added along the
//! way lies in the two-sided \*-ideal generated by the input, so a zero
//! normal form is a proof; a nonzero one is only "not proved".

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::sync::Arc;

use num_traits::One;

use super::poly::{add_term, Terms};
use super::{same_alphabet, Alphabet, NCPolynomial, Presentation, RelationSet, Word};
use crate::error::{Error, Result};
use crate::rational::Q;

#[derive(Clone, Debug)]
pub struct ReductionResult {
    pub normal_form: NCPolynomial,
    pub is_zero: bool,
    /// No overlap was skipped because it exceeded the degree bound.
    pub saturated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommutatorVerdict {
    Yes,
    Unknown,
}

#[derive(Clone, Debug)]
struct Rule {
    lhs: Word,
    rhs: Terms,
}

/// An interreduced rule set with resumable bounded overlap resolution.
#[derive(Clone, Debug)]
pub struct RewriteSystem {
    alphabet: Arc<Alphabet>,
    rules: Vec<Option<Rule>>,
    index: HashMap<Word, usize>,
    max_lhs: usize,
    inconsistent: bool,
    pending: BinaryHeap<Reverse<(usize, usize, usize, usize)>>,
    completed_to: usize,
}

impl RewriteSystem {
    /// Orients and interreduces `relations` together with their adjoints.
    pub fn new(relations: &RelationSet) -> Self {
        let mut sys = RewriteSystem {
            alphabet: relations.alphabet().clone(),
            rules: Vec::new(),
            index: HashMap::new(),
            max_lhs: 0,
            inconsistent: false,
            pending: BinaryHeap::new(),
            completed_to: 2,
        };
        for r in relations.iter() {
            sys.add(r.clone().into_terms());
            sys.add(r.nc_star().into_terms());
        }
        sys
    }

    pub fn from_presentation(p: &Presentation) -> Self {
        Self::new(p.relations())
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// Whether the relations force `1 = 0`.
    pub fn is_inconsistent(&self) -> bool {
        self.inconsistent
    }

    pub fn rule_count(&self) -> usize {
        self.rules.iter().flatten().count()
    }

    /// Current rules as monic relations `lhs - rhs`.
    pub fn rules_as_relations(&self) -> RelationSet {
        let mut set = RelationSet::new(&self.alphabet);
        if self.inconsistent {
            set.insert(NCPolynomial::one(&self.alphabet)).unwrap();
            return set;
        }
        for r in self.rules.iter().flatten() {
            let mut t = r.rhs.iter().map(|(w, c)| (w.clone(), -c)).collect::<Terms>();
            add_term(&mut t, r.lhs.clone(), Q::one());
            set.insert(NCPolynomial::from_terms(&self.alphabet, t)).unwrap();
        }
        set
    }

    /// Leftmost match; at a given position the shortest left-hand side.
    fn find_match(&self, w: &[super::Letter]) -> Option<(usize, usize)> {
        for start in 0..w.len() {
            let max = self.max_lhs.min(w.len() - start);
            for len in 1..=max {
                if let Some(&ri) = self.index.get(&w[start..start + len]) {
                    return Some((start, ri));
                }
            }
        }
        None
    }

    fn normal_form_terms(&self, mut t: Terms) -> Terms {
        if self.inconsistent {
            return Terms::new();
        }
        // Reducing a word only creates strictly smaller words, so everything
        // above the last reduced word is already irreducible.
        let mut upper: Option<Word> = None;
        loop {
            let found = {
                let mut it: Box<dyn Iterator<Item = (&Word, &Q)>> = match &upper {
                    None => Box::new(t.iter().rev()),
                    Some(u) => Box::new(t.range(..u.clone()).rev()),
                };
                it.find_map(|(w, _)| self.find_match(&w.0).map(|m| (w.clone(), m)))
            };
            let Some((w, (pos, ri))) = found else { break };
            let c = t.remove(&w).expect("term present");
            let rule = self.rules[ri].as_ref().expect("live rule");
            let (left, right) = (&w.0[..pos], &w.0[pos + rule.lhs.len()..]);
            for (rw, rc) in &rule.rhs {
                add_term(&mut t, Word::concat3(left, &rw.0, right), &c * rc);
            }
            upper = Some(w);
        }
        t
    }

    /// Normal form under the current rules, without further completion.
    pub fn normal_form(&self, p: &NCPolynomial) -> NCPolynomial {
        NCPolynomial::from_terms(&self.alphabet, self.normal_form_terms(p.clone().into_terms()))
    }

    fn add(&mut self, t: Terms) {
        let mut queue = VecDeque::from([t]);
        while let Some(t) = queue.pop_front() {
            if self.inconsistent {
                return;
            }
            let mut t = self.normal_form_terms(t);
            let Some((lhs, lc)) = t.pop_last() else { continue };
            if lhs.is_empty() {
                self.inconsistent = true;
                self.rules.clear();
                self.index.clear();
                self.pending.clear();
                return;
            }
            let inv = -lc.recip();
            let rhs: Terms = t.into_iter().map(|(w, c)| (w, c * &inv)).collect();

            for i in 0..self.rules.len() {
                let contains = self.rules[i]
                    .as_ref()
                    .is_some_and(|r| contains_subword(&r.lhs.0, &lhs.0));
                if contains {
                    let r = self.rules[i].take().unwrap();
                    self.index.remove(&r.lhs);
                    let mut back = r.rhs.iter().map(|(w, c)| (w.clone(), -c)).collect::<Terms>();
                    add_term(&mut back, r.lhs, Q::one());
                    queue.push_back(back);
                }
            }

            let new_idx = self.rules.len();
            self.max_lhs = self.max_lhs.max(lhs.len());
            self.index.insert(lhs.clone(), new_idx);
            self.rules.push(Some(Rule { lhs: lhs.clone(), rhs }));

            for i in 0..new_idx {
                let needs = self.rules[i]
                    .as_ref()
                    .is_some_and(|r| r.rhs.keys().any(|w| contains_subword(&w.0, &lhs.0)));
                if needs {
                    let rhs = std::mem::take(&mut self.rules[i].as_mut().unwrap().rhs);
                    let rhs = self.normal_form_terms(rhs);
                    self.rules[i].as_mut().unwrap().rhs = rhs;
                }
            }

            for i in 0..=new_idx {
                if let Some(r) = &self.rules[i] {
                    let other = r.lhs.clone();
                    self.push_overlaps(new_idx, &lhs, i, &other);
                    if i != new_idx {
                        self.push_overlaps(i, &other, new_idx, &lhs);
                    }
                }
            }
        }
    }

    /// Records every proper overlap where a suffix of `u` is a prefix of `v`.
    fn push_overlaps(&mut self, fi: usize, u: &Word, gi: usize, v: &Word) {
        let max = u.len().min(v.len());
        for k in 1..max {
            if u.0[u.len() - k..] == v.0[..k] {
                self.pending
                    .push(Reverse((u.len() + v.len() - k, fi, gi, k)));
            }
        }
    }

    fn is_live(&self, fi: usize, gi: usize) -> bool {
        self.rules[fi].is_some() && self.rules[gi].is_some()
    }

    /// Resolves all pending overlaps whose word length is at most `degree`.
    pub fn complete_to(&mut self, degree: usize) {
        while let Some(&Reverse((deg, fi, gi, k))) = self.pending.peek() {
            if deg > degree {
                break;
            }
            self.pending.pop();
            if self.inconsistent || !self.is_live(fi, gi) {
                continue;
            }
            let f = self.rules[fi].as_ref().unwrap();
            let g = self.rules[gi].as_ref().unwrap();
            let a = &f.lhs.0[..f.lhs.len() - k];
            let b = &g.lhs.0[k..];
            // (u - rf) b - a (v - rg) = a rg - rf b
            let mut s = Terms::new();
            for (w, c) in &g.rhs {
                add_term(&mut s, Word::concat3(a, &w.0, &[]), c.clone());
            }
            for (w, c) in &f.rhs {
                add_term(&mut s, Word::concat3(&[], &w.0, b), -c);
            }
            self.add(s);
        }
        self.completed_to = self.completed_to.max(degree);
    }

    fn blocked_beyond(&self, degree: usize) -> bool {
        self.pending
            .iter()
            .any(|Reverse((d, f, g, _))| *d > degree && self.is_live(*f, *g))
    }

    /// Normal form of `p`, resolving overlaps degree by degree up to
    /// `degree_bound` until `p` is shown to vanish.
    pub fn reduce(&mut self, p: &NCPolynomial, degree_bound: usize) -> Result<ReductionResult> {
        if !same_alphabet(&self.alphabet, p.alphabet()) {
            return Err(Error::UniverseMismatch);
        }
        let mut nf = self.normal_form(p);
        let mut d = self.completed_to;
        while !nf.is_zero() && d < degree_bound {
            d += 1;
            self.complete_to(d);
            nf = self.normal_form(p);
        }
        let is_zero = nf.is_zero();
        Ok(ReductionResult {
            normal_form: nf,
            is_zero,
            saturated: is_zero || !self.blocked_beyond(degree_bound.max(self.completed_to)),
        })
    }
}

fn contains_subword(hay: &[super::Letter], needle: &[super::Letter]) -> bool {
    needle.len() <= hay.len() && hay.windows(needle.len()).any(|w| w == needle)
}

/// Normal form of `p` modulo `relations` with overlaps resolved up to
/// `degree_bound`.
pub fn reduce(p: &NCPolynomial, relations: &RelationSet, degree_bound: usize) -> Result<ReductionResult> {
    RewriteSystem::new(relations).reduce(p, degree_bound)
}

/// `Yes` iff `ab - ba` reduces to zero within the bound. Never answers "no":
/// noncommutativity needs a matrix model.
pub fn proves_commutator_zero(
    a: u32,
    b: u32,
    presentation: &Presentation,
    degree_bound: usize,
) -> Result<CommutatorVerdict> {
    let al = presentation.alphabet();
    if a as usize >= al.len() || b as usize >= al.len() {
        return Err(Error::InvalidInput("generator out of range".into()));
    }
    let x = NCPolynomial::generator(al, a);
    let y = NCPolynomial::generator(al, b);
    let comm = &(&x * &y) - &(&y * &x);
    let res = reduce(&comm, presentation.relations(), degree_bound)?;
    Ok(if res.is_zero {
        CommutatorVerdict::Yes
    } else {
        CommutatorVerdict::Unknown
    })
}

impl CommutatorVerdict {
    pub fn is_yes(self) -> bool {
        self == CommutatorVerdict::Yes
    }
}
