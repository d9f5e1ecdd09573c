//! Free \*-algebra over the rationals.
//!
//! A [`Word`] is a sequence of [`Letter`]s, a letter being a generator id with
//! a star flag. Words are ordered degree-lexicographically (length first, then
//! letters by generator id with the unstarred letter first). An
//! [`NCPolynomial`] is a finite map from words to nonzero rationals over a
//! shared [`Alphabet`]; iteration runs in ascending word order, so the
//! leading term is the last one.

mod abelian;
mod poly;
mod positivity;
mod presentation;
mod rewrite;

pub use abelian::{abelianize, zero_one_solutions, CommutativePresentation, CommutativePoly};
pub use poly::NCPolynomial;
pub use positivity::positivity_simplify;
pub use presentation::{MagicBlock, Presentation, Provenance, RelationSet, TermOrder};
pub use rewrite::{
    proves_commutator_zero, reduce, CommutatorVerdict, ReductionResult, RewriteSystem,
};

use std::borrow::Borrow;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSymbol {
    pub id: u32,
    pub name: String,
    pub selfadjoint: bool,
}

/// The generator universe shared by every polynomial of a presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<GeneratorSymbol>,
    by_name: HashMap<String, u32>,
}

impl Alphabet {
    /// Builds an alphabet from `(name, selfadjoint)` pairs; ids follow the
    /// given order.
    pub fn new<S: Into<String>>(gens: impl IntoIterator<Item = (S, bool)>) -> Result<Arc<Self>> {
        let mut symbols = Vec::new();
        let mut by_name = HashMap::new();
        for (i, (name, selfadjoint)) in gens.into_iter().enumerate() {
            let name = name.into();
            validate_name(&name)?;
            if by_name.insert(name.clone(), i as u32).is_some() {
                return Err(Error::InvalidInput(format!("duplicate generator `{name}`")));
            }
            symbols.push(GeneratorSymbol {
                id: i as u32,
                name,
                selfadjoint,
            });
        }
        Ok(Arc::new(Alphabet { symbols, by_name }))
    }

    /// All generators selfadjoint.
    pub fn selfadjoint<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Arc<Self>> {
        Self::new(names.into_iter().map(|n| (n, true)))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[GeneratorSymbol] {
        &self.symbols
    }

    pub fn symbol(&self, id: u32) -> &GeneratorSymbol {
        &self.symbols[id as usize]
    }

    pub fn name(&self, id: u32) -> &str {
        &self.symbols[id as usize].name
    }

    pub fn id(&self, name: &str) -> Result<u32> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn is_selfadjoint(&self, id: u32) -> bool {
        self.symbols[id as usize].selfadjoint
    }

    /// Letter for generator `id`, normalizing the star flag away on
    /// selfadjoint generators.
    pub fn letter(&self, id: u32, star: bool) -> Letter {
        Letter {
            gen: id,
            star: star && !self.is_selfadjoint(id),
        }
    }

    pub fn star_letter(&self, l: Letter) -> Letter {
        self.letter(l.gen, !l.star)
    }

    pub fn star_word(&self, w: &Word) -> Word {
        Word(w.0.iter().rev().map(|&l| self.star_letter(l)).collect())
    }

    pub fn fmt_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.0.iter()
            .map(|l| {
                if l.star {
                    format!("{}*", self.name(l.gen))
                } else {
                    self.name(l.gen).to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn validate_name(name: &str) -> Result<()> {
    let bad = name.is_empty()
        || name.starts_with(|c: char| c.is_ascii_digit())
        || name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '+' | '-' | '=' | '*' | '#'));
    if bad {
        Err(Error::InvalidInput(format!("invalid generator name `{name}`")))
    } else {
        Ok(())
    }
}

pub(crate) fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: u32,
    pub star: bool,
}

impl Letter {
    pub fn new(gen: u32) -> Self {
        Letter { gen, star: false }
    }
}

/// A monomial. The empty word is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_gens(gens: &[u32]) -> Self {
        Word(gens.iter().map(|&g| Letter::new(g)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn concat3(left: &[Letter], mid: &[Letter], right: &[Letter]) -> Word {
        let mut v = Vec::with_capacity(left.len() + mid.len() + right.len());
        v.extend_from_slice(left);
        v.extend_from_slice(mid);
        v.extend_from_slice(right);
        Word(v)
    }
}

impl Borrow<[Letter]> for Word {
    fn borrow(&self) -> &[Letter] {
        &self.0
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| format!("g{}{}", l.gen, if l.star { "*" } else { "" }))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}
