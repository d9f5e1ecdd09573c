use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use super::{same_alphabet, Alphabet, NCPolynomial};
use crate::error::{Error, Result};

/// Term order used to orient relations into rewrite rules.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TermOrder {
    /// Length first, then letters by generator id, unstarred before starred.
    #[default]
    DegLex,
}

/// Relations `r = 0`, each stored monic (leading coefficient 1), zero
/// relations dropped, duplicates merged, sorted by leading term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationSet {
    alphabet: Arc<Alphabet>,
    relations: BTreeSet<NCPolynomial>,
    order: TermOrder,
}

impl RelationSet {
    pub fn new(alphabet: &Arc<Alphabet>) -> Self {
        RelationSet {
            alphabet: alphabet.clone(),
            relations: BTreeSet::new(),
            order: TermOrder::DegLex,
        }
    }

    pub fn from_polys(alphabet: &Arc<Alphabet>, polys: impl IntoIterator<Item = NCPolynomial>) -> Result<Self> {
        let mut s = Self::new(alphabet);
        for p in polys {
            s.insert(p)?;
        }
        Ok(s)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn order(&self) -> TermOrder {
        self.order
    }

    /// Canonicalizes and inserts; returns whether the set changed.
    pub fn insert(&mut self, p: NCPolynomial) -> Result<bool> {
        if !same_alphabet(&self.alphabet, p.alphabet()) {
            return Err(Error::UniverseMismatch);
        }
        if p.is_zero() {
            return Ok(false);
        }
        Ok(self.relations.insert(p.monic()))
    }

    pub fn contains(&self, p: &NCPolynomial) -> bool {
        p.is_zero() || self.relations.contains(&p.monic())
    }

    pub fn iter(&self) -> impl Iterator<Item = &NCPolynomial> {
        self.relations.iter()
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn union(&self, other: &RelationSet) -> Result<RelationSet> {
        let mut s = self.clone();
        for r in other.iter() {
            s.insert(r.clone())?;
        }
        Ok(s)
    }
}

impl fmt::Display for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.relations {
            writeln!(f, "{r} = 0")?;
        }
        Ok(())
    }
}

/// A square grid of block entries forming a magic unitary. Entries are
/// usually single generators but may be affine combinations of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MagicBlock {
    pub label: String,
    pub size: usize,
    entries: Vec<NCPolynomial>,
}

impl MagicBlock {
    pub fn new(label: impl Into<String>, size: usize, entries: Vec<NCPolynomial>) -> Result<Self> {
        if entries.len() != size * size || size == 0 {
            return Err(Error::InvalidInput("block entries must form a nonempty square".into()));
        }
        Ok(MagicBlock {
            label: label.into(),
            size,
            entries,
        })
    }

    /// Block whose entries are the given generators, row-major.
    pub fn of_generators(label: impl Into<String>, alphabet: &Arc<Alphabet>, ids: &[u32]) -> Result<Self> {
        let size = (ids.len() as f64).sqrt().round() as usize;
        let entries = ids.iter().map(|&g| NCPolynomial::generator(alphabet, g)).collect();
        Self::new(label, size, entries)
    }

    pub fn entry(&self, i: usize, j: usize) -> &NCPolynomial {
        &self.entries[i * self.size + j]
    }

    pub fn entries(&self) -> &[NCPolynomial] {
        &self.entries
    }

    /// Projection, row-sum, column-sum and row/column orthogonality relations.
    pub fn relations(&self) -> Vec<NCPolynomial> {
        let n = self.size;
        let al = self.entries[0].alphabet().clone();
        let one = NCPolynomial::one(&al);
        let mut out = Vec::new();
        for e in &self.entries {
            out.push(&(e * e) - e);
        }
        for i in 0..n {
            let mut row = -&one;
            let mut col = -&one;
            for j in 0..n {
                row = &row + self.entry(i, j);
                col = &col + self.entry(j, i);
            }
            out.push(row);
            out.push(col);
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if j != k {
                        out.push(self.entry(i, j) * self.entry(i, k));
                        out.push(self.entry(j, i) * self.entry(k, i));
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub builder: String,
    pub input_hash: String,
}

impl Provenance {
    /// Hash of a canonical textual description of the builder input.
    pub fn new(builder: &str, input: &str) -> Self {
        let digest = Sha256::digest(input.as_bytes());
        let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        Provenance {
            builder: builder.to_string(),
            input_hash: hex,
        }
    }
}

/// Generators, relations and magic-unitary block metadata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Arc<Alphabet>,
    relations: RelationSet,
    blocks: Vec<MagicBlock>,
    pub provenance: Option<Provenance>,
    pub meta: Vec<(String, String)>,
}

impl Presentation {
    pub fn new(alphabet: &Arc<Alphabet>) -> Self {
        Presentation {
            alphabet: alphabet.clone(),
            relations: RelationSet::new(alphabet),
            blocks: Vec::new(),
            provenance: None,
            meta: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn relations(&self) -> &RelationSet {
        &self.relations
    }

    pub fn blocks(&self) -> &[MagicBlock] {
        &self.blocks
    }

    /// The last declared block; classical solutions are read off it.
    pub fn principal_block(&self) -> Option<&MagicBlock> {
        self.blocks.last()
    }

    pub fn add_relation(&mut self, p: NCPolynomial) -> Result<()> {
        self.relations.insert(p).map(|_| ())
    }

    pub fn add_relations(&mut self, ps: impl IntoIterator<Item = NCPolynomial>) -> Result<()> {
        for p in ps {
            self.add_relation(p)?;
        }
        Ok(())
    }

    /// Declares a block and adds its magic-unitary relations.
    pub fn add_block(&mut self, block: MagicBlock) -> Result<()> {
        for e in block.entries() {
            if !same_alphabet(e.alphabet(), &self.alphabet) {
                return Err(Error::UniverseMismatch);
            }
        }
        self.add_relations(block.relations())?;
        self.blocks.push(block);
        Ok(())
    }

    pub fn with_provenance(mut self, builder: &str, input: &str) -> Self {
        self.provenance = Some(Provenance::new(builder, input));
        self
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    /// Checks that every block's relations are present.
    pub fn validate(&self) -> Result<()> {
        for b in &self.blocks {
            for r in b.relations() {
                if !self.relations.contains(&r) {
                    return Err(Error::InvalidInput(format!(
                        "block {} is missing relation {r}",
                        b.label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn generator(&self, name: &str) -> Result<NCPolynomial> {
        Ok(NCPolynomial::generator(&self.alphabet, self.alphabet.id(name)?))
    }

    pub fn parse_poly(&self, text: &str) -> Result<NCPolynomial> {
        NCPolynomial::parse(&self.alphabet, text)
    }
}

/// Canonical text form; this is the golden-file format.
///
/// ```text
/// # builder=magic_unitary input=0123456789abcdef
/// generators q[1,1] q[1,2] q[2,1] q[2,2]
/// block U 2
///   q[1,1] | q[1,2]
///   q[2,1] | q[2,2]
/// relations 12
/// q[1,1] q[1,1] - q[1,1] = 0
/// ...
/// ```
impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.provenance {
            writeln!(f, "# builder={} input={}", p.builder, p.input_hash)?;
        }
        for (k, v) in &self.meta {
            writeln!(f, "# {k}={v}")?;
        }
        let names: Vec<&str> = self.alphabet.symbols().iter().map(|s| s.name.as_str()).collect();
        writeln!(f, "generators {}", names.join(" "))?;
        let nsa: Vec<&str> = self
            .alphabet
            .symbols()
            .iter()
            .filter(|s| !s.selfadjoint)
            .map(|s| s.name.as_str())
            .collect();
        if !nsa.is_empty() {
            writeln!(f, "nonselfadjoint {}", nsa.join(" "))?;
        }
        for b in &self.blocks {
            writeln!(f, "block {} {}", b.label, b.size)?;
            for i in 0..b.size {
                let row: Vec<String> = (0..b.size).map(|j| b.entry(i, j).to_string()).collect();
                writeln!(f, "  {}", row.join(" | "))?;
            }
        }
        writeln!(f, "relations {}", self.relations.len())?;
        write!(f, "{}", self.relations)
    }
}
