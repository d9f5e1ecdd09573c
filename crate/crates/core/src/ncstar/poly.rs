use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::{same_alphabet, Alphabet, Letter, Word};
use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, Q};

pub(crate) type Terms = BTreeMap<Word, Q>;

pub(crate) fn add_term(terms: &mut Terms, w: Word, c: Q) {
    if c.is_zero() {
        return;
    }
    match terms.entry(w) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Rational linear combination of words over an [`Alphabet`].
///
/// Zero coefficients are never stored and terms are kept in ascending
/// degree-lexicographic order, so structurally equal polynomials print
/// identically.
#[derive(Clone)]
pub struct NCPolynomial {
    alphabet: Arc<Alphabet>,
    terms: Terms,
}

impl NCPolynomial {
    pub fn zero(alphabet: &Arc<Alphabet>) -> Self {
        NCPolynomial {
            alphabet: alphabet.clone(),
            terms: Terms::new(),
        }
    }

    pub fn constant(alphabet: &Arc<Alphabet>, c: Q) -> Self {
        Self::monomial(alphabet, Word::empty(), c)
    }

    pub fn one(alphabet: &Arc<Alphabet>) -> Self {
        Self::constant(alphabet, Q::one())
    }

    pub fn monomial(alphabet: &Arc<Alphabet>, w: Word, c: Q) -> Self {
        let mut terms = Terms::new();
        add_term(&mut terms, w, c);
        NCPolynomial {
            alphabet: alphabet.clone(),
            terms,
        }
    }

    pub fn generator(alphabet: &Arc<Alphabet>, id: u32) -> Self {
        Self::monomial(alphabet, Word(vec![Letter::new(id)]), Q::one())
    }

    /// Generator by name; panics on unknown names (builder use only).
    pub fn gen(alphabet: &Arc<Alphabet>, name: &str) -> Self {
        let id = alphabet
            .id(name)
            .unwrap_or_else(|_| panic!("unknown generator {name}"));
        Self::generator(alphabet, id)
    }

    pub fn word(alphabet: &Arc<Alphabet>, w: Word) -> Self {
        Self::monomial(alphabet, w, Q::one())
    }

    pub(crate) fn from_terms(alphabet: &Arc<Alphabet>, terms: Terms) -> Self {
        debug_assert!(terms.values().all(|c| !c.is_zero()));
        NCPolynomial {
            alphabet: alphabet.clone(),
            terms,
        }
    }

    pub(crate) fn into_terms(self) -> Terms {
        self.terms
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending word order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &Word) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coefficient(&Word::empty())
    }

    pub fn leading(&self) -> Option<(&Word, &Q)> {
        self.terms.iter().next_back()
    }

    /// Degree of the leading word; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.leading().map(|(w, _)| w.len())
    }

    /// Generators that occur in some term.
    pub fn support(&self) -> Vec<u32> {
        let mut s: Vec<u32> = self
            .terms
            .keys()
            .flat_map(|w| w.0.iter().map(|l| l.gen))
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(&self.alphabet);
        }
        NCPolynomial {
            alphabet: self.alphabet.clone(),
            terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect(),
        }
    }

    /// Scaled so that the leading coefficient is 1 (zero stays zero).
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) if !c.is_one() => {
                let inv = c.recip();
                self.scale(&inv)
            }
            _ => self.clone(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if !same_alphabet(&self.alphabet, &other.alphabet) {
            return Err(Error::UniverseMismatch);
        }
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            add_term(&mut terms, w.clone(), c.clone());
        }
        Ok(NCPolynomial {
            alphabet: self.alphabet.clone(),
            terms,
        })
    }

    /// Bilinear extension of word concatenation.
    pub fn nc_multiply(&self, other: &Self) -> Result<Self> {
        if !same_alphabet(&self.alphabet, &other.alphabet) {
            return Err(Error::UniverseMismatch);
        }
        let mut terms = Terms::new();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                add_term(&mut terms, u.concat(v), a * b);
            }
        }
        Ok(NCPolynomial {
            alphabet: self.alphabet.clone(),
            terms,
        })
    }

    /// The involution: words reversed, stars toggled on non-selfadjoint
    /// generators, rational coefficients fixed.
    pub fn nc_star(&self) -> Self {
        let mut terms = Terms::new();
        for (w, c) in &self.terms {
            add_term(&mut terms, self.alphabet.star_word(w), c.clone());
        }
        NCPolynomial {
            alphabet: self.alphabet.clone(),
            terms,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.alphabet);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Replaces generator `g` by `images[g]`; the images fix the target
    /// alphabet. Starred letters are replaced by the star of the image.
    pub fn substitute(&self, images: &[NCPolynomial]) -> Result<Self> {
        let target = images
            .first()
            .map(|p| p.alphabet.clone())
            .ok_or_else(|| Error::InvalidInput("empty substitution".into()))?;
        if images.len() != self.alphabet.len() {
            return Err(Error::UniverseMismatch);
        }
        let starred: Vec<Option<NCPolynomial>> = images
            .iter()
            .enumerate()
            .map(|(g, p)| (!self.alphabet.is_selfadjoint(g as u32)).then(|| p.nc_star()))
            .collect();
        let mut out = Terms::new();
        for (w, c) in &self.terms {
            let mut acc = NCPolynomial::constant(&target, c.clone());
            for l in &w.0 {
                let img = if l.star {
                    starred[l.gen as usize].as_ref().unwrap()
                } else {
                    &images[l.gen as usize]
                };
                acc = acc.nc_multiply(img)?;
            }
            for (w2, c2) in acc.terms {
                add_term(&mut out, w2, c2);
            }
        }
        Ok(NCPolynomial {
            alphabet: target,
            terms: out,
        })
    }

    /// Same polynomial over another alphabet, matching generators by name.
    pub fn rename_into(&self, target: &Arc<Alphabet>) -> Result<Self> {
        let map: Vec<u32> = self
            .alphabet
            .symbols()
            .iter()
            .map(|s| target.id(&s.name))
            .collect::<Result<_>>()?;
        let mut terms = Terms::new();
        for (w, c) in &self.terms {
            let w2 = Word(w.0.iter().map(|l| target.letter(map[l.gen as usize], l.star)).collect());
            add_term(&mut terms, w2, c.clone());
        }
        Ok(NCPolynomial {
            alphabet: target.clone(),
            terms,
        })
    }

    /// Parses `c w + c w - ... [= rhs]`. Words are whitespace-separated
    /// generator names with an optional trailing `*`; an explicit `*`
    /// between letters is not supported. `lhs = rhs` yields `lhs - rhs`.
    pub fn parse(alphabet: &Arc<Alphabet>, text: &str) -> Result<Self> {
        if let Some((l, r)) = text.split_once('=') {
            let l = Self::parse(alphabet, l)?;
            let r = Self::parse(alphabet, r)?;
            return Ok(&l - &r);
        }
        let spaced = text.replace('+', " + ").replace('-', " - ");
        let mut out = Self::zero(alphabet);
        let mut sign = Q::one();
        let mut coef: Option<Q> = None;
        let mut word: Vec<Letter> = Vec::new();
        let mut pending = false;
        let flush = |out: &mut Self, sign: &Q, coef: &mut Option<Q>, word: &mut Vec<Letter>| {
            let c = coef.take().unwrap_or_else(Q::one) * sign;
            let m = Self::monomial(alphabet, Word(std::mem::take(word)), c);
            *out = &*out + &m;
        };
        for tok in spaced.split_whitespace() {
            match tok {
                "+" | "-" => {
                    if pending {
                        flush(&mut out, &sign, &mut coef, &mut word);
                        pending = false;
                        sign = Q::one();
                    }
                    if tok == "-" {
                        sign = -sign;
                    }
                }
                t if t.starts_with(|c: char| c.is_ascii_digit()) => {
                    if !word.is_empty() || coef.is_some() {
                        return Err(Error::Parse(format!("misplaced coefficient `{t}`")));
                    }
                    coef = Some(parse_q(t)?);
                    pending = true;
                }
                t => {
                    let (name, star) = match t.strip_suffix('*') {
                        Some(n) => (n, true),
                        None => (t, false),
                    };
                    let id = alphabet
                        .id(name)
                        .map_err(|_| Error::Parse(format!("unknown generator `{name}`")))?;
                    word.push(alphabet.letter(id, star));
                    pending = true;
                }
            }
        }
        if pending {
            flush(&mut out, &sign, &mut coef, &mut word);
        } else if out.is_zero() && spaced.trim() != "0" && !spaced.trim().is_empty() {
            return Err(Error::Parse(format!("dangling sign in `{text}`")));
        }
        Ok(out)
    }
}

impl PartialEq for NCPolynomial {
    fn eq(&self, other: &Self) -> bool {
        same_alphabet(&self.alphabet, &other.alphabet) && self.terms == other.terms
    }
}

impl Eq for NCPolynomial {}

impl PartialOrd for NCPolynomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Compares term lists from the leading term down; used to sort relation
/// sets canonically.
impl Ord for NCPolynomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let a = self.terms.iter().rev();
        let b = other.terms.iter().rev();
        a.cmp(b)
    }
}

impl std::hash::Hash for NCPolynomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl fmt::Debug for NCPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Leading term first: `q1 q2 - 2 q3 + 4/3`.
impl fmt::Display for NCPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if w.is_empty() {
                write!(f, "{}", fmt_q(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", self.alphabet.fmt_word(w))?;
            } else {
                write!(f, "{} {}", fmt_q(&abs), self.alphabet.fmt_word(w))?;
            }
        }
        Ok(())
    }
}

fn expect_same(a: &NCPolynomial, b: &NCPolynomial) {
    assert!(
        same_alphabet(&a.alphabet, &b.alphabet),
        "polynomials over different alphabets"
    );
}

impl<'a> Add<&'a NCPolynomial> for &'a NCPolynomial {
    type Output = NCPolynomial;
    fn add(self, rhs: &'a NCPolynomial) -> NCPolynomial {
        expect_same(self, rhs);
        self.checked_add(rhs).unwrap()
    }
}

impl<'a> Sub<&'a NCPolynomial> for &'a NCPolynomial {
    type Output = NCPolynomial;
    fn sub(self, rhs: &'a NCPolynomial) -> NCPolynomial {
        expect_same(self, rhs);
        self.checked_add(&-rhs).unwrap()
    }
}

impl<'a> Mul<&'a NCPolynomial> for &'a NCPolynomial {
    type Output = NCPolynomial;
    fn mul(self, rhs: &'a NCPolynomial) -> NCPolynomial {
        expect_same(self, rhs);
        self.nc_multiply(rhs).unwrap()
    }
}

impl Neg for &NCPolynomial {
    type Output = NCPolynomial;
    fn neg(self) -> NCPolynomial {
        NCPolynomial {
            alphabet: self.alphabet.clone(),
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<NCPolynomial> for NCPolynomial {
            type Output = NCPolynomial;
            fn $m(self, rhs: NCPolynomial) -> NCPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn al() -> Arc<Alphabet> {
        Alphabet::new([("p", true), ("q1", true), ("q3", true), ("z", false)]).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let a = al();
        let p = NCPolynomial::parse(&a, "p - 2/3 q1 q3 + 5").unwrap();
        let one = NCPolynomial::one(&a);
        assert_eq!(one.nc_multiply(&p).unwrap(), p);
        assert_eq!(p.nc_multiply(&one).unwrap(), p);
    }

    #[test]
    fn product_of_monomials_is_concatenation() {
        let a = Alphabet::selfadjoint(["q11", "q12"]).unwrap();
        let x = NCPolynomial::gen(&a, "q11");
        let y = NCPolynomial::gen(&a, "q12");
        let xy = x.nc_multiply(&y).unwrap();
        assert_eq!(xy.len(), 1);
        assert_eq!(xy.to_string(), "q11 q12");
    }

    #[test]
    fn square_of_difference_has_four_terms() {
        let a = al();
        let d = NCPolynomial::parse(&a, "p - q1").unwrap();
        let sq = &d * &d;
        assert_eq!(sq.len(), 4);
        assert_eq!(sq, NCPolynomial::parse(&a, "p p - p q1 - q1 p + q1 q1").unwrap());
    }

    #[test]
    fn star_reverses_and_flips() {
        let a = al();
        let p = NCPolynomial::parse(&a, "p + 2 q1 q3").unwrap();
        assert_eq!(p.nc_star(), NCPolynomial::parse(&a, "p + 2 q3 q1").unwrap());
        let z = NCPolynomial::gen(&a, "z");
        assert_eq!(z.nc_star().to_string(), "z*");
        assert_eq!(z.nc_star().nc_star(), z);
    }

    #[test]
    fn mismatched_universes_are_rejected() {
        let a = al();
        let b = Alphabet::selfadjoint(["x"]).unwrap();
        let p = NCPolynomial::one(&a);
        let r = NCPolynomial::one(&b);
        assert!(matches!(p.nc_multiply(&r), Err(Error::UniverseMismatch)));
    }

    #[test]
    fn display_and_parse_agree() {
        let a = al();
        let p = NCPolynomial::parse(&a, "-4/3 q1 q3 + z* z - 1").unwrap();
        assert_eq!(p.to_string(), "z* z - 4/3 q1 q3 - 1");
        assert_eq!(NCPolynomial::parse(&a, &p.to_string()).unwrap(), p);
        assert_eq!(p.constant_term(), q(-1));
        assert_eq!(p.monic().leading().unwrap().1, &q(1));
        let lhs_rhs = NCPolynomial::parse(&a, "p p = p").unwrap();
        assert_eq!(lhs_rhs.to_string(), "p p - p");
        assert_eq!(NCPolynomial::parse(&a, "0").unwrap().to_string(), "0");
        assert_eq!(NCPolynomial::parse(&a, "1/2 p").unwrap().coefficient(&Word::from_gens(&[0])), qf(1, 2));
    }

    #[test]
    fn substitution_respects_star() {
        let a = al();
        let target = Alphabet::new([("u", false)]).unwrap();
        let u = NCPolynomial::gen(&target, "u");
        let one = NCPolynomial::one(&target);
        let images = vec![one.clone(), one.clone(), one, u];
        let p = NCPolynomial::parse(&a, "z* z + p").unwrap();
        assert_eq!(p.substitute(&images).unwrap().to_string(), "u* u + 1");
    }
}
