//! Exact finite-dimensional matrix models of presentations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::classical::{classical_points, PermutationSolution};
use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::ncstar::{same_alphabet, Alphabet, NCPolynomial, Presentation};
use crate::presentations::{cantor_level_presentation, CantorForm};
use crate::rational::{fmt_q, parse_q, Q};

/// Generators mapped to square rational matrices of a common size; adjoints
/// act as transposes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixModel {
    alphabet: Arc<Alphabet>,
    dim: usize,
    assignment: Vec<RatMatrix>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    dim: usize,
    assignment: BTreeMap<String, Vec<Vec<String>>>,
}

impl MatrixModel {
    pub fn new(alphabet: &Arc<Alphabet>, dim: usize, assignment: Vec<RatMatrix>) -> Result<Self> {
        if assignment.len() != alphabet.len() {
            return Err(Error::InvalidInput(format!(
                "{} matrices for {} generators",
                assignment.len(),
                alphabet.len()
            )));
        }
        for (g, m) in assignment.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::Dimension(format!(
                    "`{}` is {}x{}, expected {dim}x{dim}",
                    alphabet.name(g as u32),
                    m.dim(),
                    m.dim()
                )));
            }
        }
        Ok(MatrixModel {
            alphabet: alphabet.clone(),
            dim,
            assignment,
        })
    }

    /// Assignment by generator name; every generator must be covered.
    pub fn from_named(alphabet: &Arc<Alphabet>, named: &BTreeMap<String, RatMatrix>) -> Result<Self> {
        for name in named.keys() {
            alphabet.id(name)?;
        }
        let mats = alphabet
            .symbols()
            .iter()
            .map(|s| {
                named
                    .get(&s.name)
                    .cloned()
                    .ok_or_else(|| Error::InvalidInput(format!("no matrix for `{}`", s.name)))
            })
            .collect::<Result<Vec<_>>>()?;
        let dim = mats.first().map_or(0, RatMatrix::dim);
        Self::new(alphabet, dim, mats)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn matrix(&self, gen: u32) -> &RatMatrix {
        &self.assignment[gen as usize]
    }

    pub fn matrix_by_name(&self, name: &str) -> Result<&RatMatrix> {
        Ok(self.matrix(self.alphabet.id(name)?))
    }

    pub fn matrices(&self) -> &[RatMatrix] {
        &self.assignment
    }

    pub fn eval(&self, p: &NCPolynomial) -> Result<RatMatrix> {
        if !same_alphabet(p.alphabet(), &self.alphabet) {
            return Err(Error::UniverseMismatch);
        }
        let mut acc = RatMatrix::zeros(self.dim);
        for (w, c) in p.terms() {
            let mut t = RatMatrix::scalar(self.dim, c.clone());
            for l in w.letters() {
                let m = &self.assignment[l.gen as usize];
                t = if l.star { &t * &m.transpose() } else { &t * m };
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Block-diagonal sum of two models of the same alphabet.
    pub fn direct_sum(&self, other: &MatrixModel) -> Result<MatrixModel> {
        if !same_alphabet(&self.alphabet, &other.alphabet) {
            return Err(Error::UniverseMismatch);
        }
        let mats = self
            .assignment
            .iter()
            .zip(&other.assignment)
            .map(|(a, b)| a.direct_sum(b))
            .collect();
        Self::new(&self.alphabet, self.dim + other.dim, mats)
    }

    /// Model of `alphabet` sending generator `g` to the value of
    /// `images[g]` in this model.
    pub fn pull_back(&self, alphabet: &Arc<Alphabet>, images: &[NCPolynomial]) -> Result<MatrixModel> {
        if images.len() != alphabet.len() {
            return Err(Error::InvalidInput("one image per generator required".into()));
        }
        let mats = images.iter().map(|p| self.eval(p)).collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, self.dim, mats)
    }

    /// Whether the images of `a` and `b` commute.
    pub fn commutes(&self, a: u32, b: u32) -> bool {
        self.matrix(a).commutator(self.matrix(b)).is_zero()
    }

    pub fn from_json(alphabet: &Arc<Alphabet>, text: &str) -> Result<Self> {
        let raw: ModelJson = serde_json::from_str(text)?;
        let mut named = BTreeMap::new();
        for (name, rows) in raw.assignment {
            if rows.len() != raw.dim || rows.iter().any(|r| r.len() != raw.dim) {
                return Err(Error::Dimension(format!("`{name}` is not {0}x{0}", raw.dim)));
            }
            let rows = rows
                .iter()
                .map(|r| r.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            named.insert(name, RatMatrix::from_rows(rows));
        }
        let m = Self::from_named(alphabet, &named)?;
        if m.dim != raw.dim {
            return Err(Error::Dimension(format!("declared dim {} but matrices are {}", raw.dim, m.dim)));
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        let assignment = self
            .alphabet
            .symbols()
            .iter()
            .map(|s| {
                let rows = self.assignment[s.id as usize]
                    .rows()
                    .iter()
                    .map(|r| r.iter().map(fmt_q).collect())
                    .collect();
                (s.name.clone(), rows)
            })
            .collect();
        serde_json::to_string(&ModelJson {
            dim: self.dim,
            assignment,
        })
        .expect("serializable")
    }
}

impl fmt::Display for MatrixModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {}", self.dim)?;
        for s in self.alphabet.symbols() {
            writeln!(f, "{} = {}", s.name, self.assignment[s.id as usize])?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RelationResidual {
    pub relation: NCPolynomial,
    pub residual: RatMatrix,
}

impl RelationResidual {
    pub fn is_zero(&self) -> bool {
        self.residual.is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct ModelReport {
    pub residuals: Vec<RelationResidual>,
}

impl ModelReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(RelationResidual::is_zero)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationResidual> {
        self.residuals.iter().filter(|r| !r.is_zero())
    }
}

impl fmt::Display for ModelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.residuals {
            if r.is_zero() {
                writeln!(f, "ok   {} = 0", r.relation)?;
            } else {
                writeln!(f, "FAIL {} = 0  residual {}", r.relation, r.residual)?;
            }
        }
        let bad = self.failures().count();
        if bad == 0 {
            writeln!(f, "pass ({} relations)", self.residuals.len())
        } else {
            writeln!(f, "fail ({bad} of {} relations violated)", self.residuals.len())
        }
    }
}

/// Evaluates every relation of `p` in the model.
pub fn verify_model(m: &MatrixModel, p: &Presentation) -> Result<ModelReport> {
    if !same_alphabet(m.alphabet(), p.alphabet()) {
        return Err(Error::UniverseMismatch);
    }
    let residuals = p
        .relations()
        .iter()
        .map(|r| {
            Ok(RelationResidual {
                relation: r.clone(),
                residual: m.eval(r)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModelReport { residuals })
}

/// One-dimensional model of a classical point whose principal block carries
/// the given permutation. Generators that are entries of the principal block
/// are read off directly; the rest come from the abelianization.
pub fn permutation_model(p: &Presentation, s: &PermutationSolution) -> Result<MatrixModel> {
    let block = p
        .principal_block()
        .ok_or_else(|| Error::InvalidInput("presentation declares no magic-unitary block".into()))?;
    if s.perm.len() != block.size {
        return Err(Error::NotASolution(format!(
            "permutation on {} points for a block of size {}",
            s.perm.len(),
            block.size
        )));
    }
    let al = p.alphabet();
    let mut values: Vec<Option<Q>> = vec![None; al.len()];
    for i in 0..block.size {
        for j in 0..block.size {
            let e = block.entry(i, j);
            if let Some((w, c)) = e.leading() {
                if e.len() == 1 && w.len() == 1 && c.is_one() {
                    let v = if s.perm[i] == j { Q::one() } else { Q::zero() };
                    values[w.letters()[0].gen as usize] = Some(v);
                }
            }
        }
    }
    let values: Vec<Q> = if values.iter().all(Option::is_some) {
        values.into_iter().map(Option::unwrap).collect()
    } else {
        let point = classical_points(p)?
            .into_iter()
            .find(|pt| pt.block_perms.last() == Some(&s.perm))
            .ok_or_else(|| Error::NotASolution(format!("{:?}", s.perm)))?;
        point.values[..al.len()]
            .iter()
            .map(|&v| if v == 1 { Q::one() } else { Q::zero() })
            .collect()
    };
    let model = MatrixModel::new(al, 1, values.into_iter().map(|v| RatMatrix::scalar(1, v)).collect())?;
    let report = verify_model(&model, p)?;
    if let Some(bad) = report.failures().next() {
        return Err(Error::NotASolution(format!("{:?} violates {} = 0", s.perm, bad.relation)));
    }
    Ok(model)
}

/// `[[1,0],[0,0]]`.
pub fn projection_a() -> RatMatrix {
    two_by_two_projection(&Q::zero())
}

/// `[[1/2,1/2],[1/2,1/2]]`.
pub fn projection_b() -> RatMatrix {
    two_by_two_projection(&Q::one())
}

/// Orthogonal projection onto the line through `(1, t)`.
pub fn two_by_two_projection(t: &Q) -> RatMatrix {
    let s = (Q::one() + t * t).recip();
    RatMatrix::from_rows(vec![vec![s.clone(), &s * t], vec![&s * t, &s * t * t]])
}

/// Four-dimensional model of the reduced level-2 Cantor presentation with
/// `p = I ⊕ 0`, `q1 = A ⊕ 0`, `q4 = B ⊕ 0`, `q3 = 0 ⊕ A`, `q2 = 0 ⊕ B`.
pub fn cantor_witness_model() -> MatrixModel {
    let pres = cantor_level_presentation(2, CantorForm::Reduced).expect("level 2 exists");
    let z = RatMatrix::zeros(2);
    let i = RatMatrix::identity(2);
    let (a, b) = (projection_a(), projection_b());
    let mats = vec![
        i.direct_sum(&z),
        a.direct_sum(&z),
        z.direct_sum(&b),
        z.direct_sum(&a),
        b.direct_sum(&z),
    ];
    MatrixModel::new(pres.alphabet(), 4, mats).expect("consistent sizes")
}

/// Families searched for noncommutativity witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelFamily {
    /// Direct sums of the one-dimensional permutation models; always
    /// commutative, so it never yields a witness.
    PermutationDiagonalSums,
    /// Each generator is a direct sum of `k ≤ max_blocks` 2×2 blocks drawn
    /// from `I`, the projections onto `(1, t)` for `t` in `params`, and `0`,
    /// in that order.
    TwoProjectionBlocks { params: Vec<Q>, max_blocks: usize },
}

impl ModelFamily {
    /// Blocks built from `A` and `B`, up to two per generator.
    pub fn two_projection_default() -> Self {
        ModelFamily::TwoProjectionBlocks {
            params: vec![Q::zero(), Q::one()],
            max_blocks: 2,
        }
    }

    fn candidates(params: &[Q]) -> Vec<RatMatrix> {
        let mut c = vec![RatMatrix::identity(2)];
        c.extend(params.iter().map(two_by_two_projection));
        c.push(RatMatrix::zeros(2));
        c
    }

    /// Whether a model belongs to the family.
    pub fn contains(&self, p: &Presentation, m: &MatrixModel) -> Result<bool> {
        match self {
            ModelFamily::PermutationDiagonalSums => {
                let diag = m
                    .matrices()
                    .iter()
                    .all(|x| (0..x.dim()).all(|i| (0..x.dim()).all(|j| i == j || x.get(i, j).is_zero())));
                Ok(diag && verify_model(m, p)?.passed())
            }
            ModelFamily::TwoProjectionBlocks { params, max_blocks } => {
                let k = m.dim() / 2;
                if !m.dim().is_multiple_of(2) || k == 0 || k > *max_blocks {
                    return Ok(false);
                }
                let cands = Self::candidates(params);
                let fits = m.matrices().iter().all(|x| {
                    let off_block_zero = (0..x.dim())
                        .all(|i| (0..x.dim()).all(|j| i / 2 == j / 2 || x.get(i, j).is_zero()));
                    off_block_zero
                        && (0..k).all(|b| {
                            let blk = RatMatrix::from_rows(
                                (0..2).map(|i| (0..2).map(|j| x.get(2 * b + i, 2 * b + j).clone()).collect()).collect(),
                            );
                            cands.contains(&blk)
                        })
                });
                Ok(fits && verify_model(m, p)?.passed())
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub pair: (u32, u32),
    pub model: MatrixModel,
}

fn first_noncommuting_pair(m: &MatrixModel) -> Option<(u32, u32)> {
    let n = m.alphabet().len() as u32;
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .find(|&(a, b)| !m.commutes(a, b))
}

/// Searches `family` for a model of `p` in which two generators do not
/// commute. Members are visited by dimension, then lexicographically in the
/// family's candidate order with generators assigned by id; the first model
/// with a noncommuting pair is returned together with the least such pair.
pub fn noncommutativity_witness(p: &Presentation, family: &ModelFamily) -> Result<Option<Witness>> {
    match family {
        ModelFamily::PermutationDiagonalSums => {
            let points = classical_points(p)?;
            let al = p.alphabet();
            let mut sum: Option<MatrixModel> = None;
            for pt in points {
                let mats = pt.values[..al.len()]
                    .iter()
                    .map(|&v| RatMatrix::scalar(1, if v == 1 { Q::one() } else { Q::zero() }))
                    .collect();
                let m = MatrixModel::new(al, 1, mats)?;
                sum = Some(match sum {
                    None => m,
                    Some(s) => s.direct_sum(&m)?,
                });
                if let Some(s) = &sum {
                    if let Some(pair) = first_noncommuting_pair(s) {
                        return Ok(Some(Witness { pair, model: s.clone() }));
                    }
                }
            }
            Ok(None)
        }
        ModelFamily::TwoProjectionBlocks { params, max_blocks } => {
            let base = ModelFamily::candidates(params);
            for k in 1..=*max_blocks {
                if let Some(w) = search_blocks(p, &base, k)? {
                    return Ok(Some(w));
                }
            }
            Ok(None)
        }
    }
}

/// All `k`-fold direct sums of `base`, lexicographic in block choice.
fn block_sums(base: &[RatMatrix], k: usize) -> Vec<RatMatrix> {
    let mut out: Vec<RatMatrix> = base.to_vec();
    for _ in 1..k {
        out = out.iter().flat_map(|a| base.iter().map(move |b| a.direct_sum(b))).collect();
    }
    out
}

fn search_blocks(p: &Presentation, base: &[RatMatrix], k: usize) -> Result<Option<Witness>> {
    let al = p.alphabet().clone();
    let n = al.len();
    let cands = block_sums(base, k);
    // relations grouped by the largest generator they mention; they are
    // checked as soon as that generator has a value
    let mut by_last: Vec<Vec<NCPolynomial>> = vec![Vec::new(); n.max(1)];
    let mut constant_ok = true;
    for r in p.relations().iter() {
        match r.support().into_iter().max() {
            Some(g) => by_last[g as usize].push(r.clone()),
            None => constant_ok &= r.is_zero(),
        }
    }
    if !constant_ok || n == 0 {
        return Ok(None);
    }
    let dim = 2 * k;
    let mut choice = vec![0usize; n];
    let mut g = 0usize;
    let mut mats: Vec<RatMatrix> = vec![RatMatrix::zeros(dim); n];
    // iterative DFS over generator values
    loop {
        if choice[g] < cands.len() {
            mats[g] = cands[choice[g]].clone();
            let partial = MatrixModel {
                alphabet: al.clone(),
                dim,
                assignment: mats.clone(),
            };
            let ok = by_last[g]
                .iter()
                .all(|r| partial.eval(r).map(|m| m.is_zero()).unwrap_or(false));
            if ok {
                if g + 1 == n {
                    if let Some(pair) = first_noncommuting_pair(&partial) {
                        return Ok(Some(Witness { pair, model: partial }));
                    }
                    choice[g] += 1;
                } else {
                    g += 1;
                    choice[g] = 0;
                }
            } else {
                choice[g] += 1;
            }
        } else {
            if g == 0 {
                return Ok(None);
            }
            g -= 1;
            choice[g] += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::classical_solutions;
    use crate::presentations::*;
    use crate::rational::q;
    use crate::spaces::FiniteMetricSpace;

    #[test]
    fn witness_model_passes_and_does_not_commute() {
        let pres = cantor_level_presentation(2, CantorForm::Reduced).unwrap();
        let m = cantor_witness_model();
        let report = verify_model(&m, &pres).unwrap();
        assert!(report.passed(), "{report}");
        let al = pres.alphabet();
        let c = m
            .matrix(al.id("q1").unwrap())
            .commutator(m.matrix(al.id("q4").unwrap()));
        assert_eq!(c.to_string(), "(0 1/2 0 0 / -1/2 0 0 0 / 0 0 0 0 / 0 0 0 0)");
        for g in 1..5 {
            assert!(m.commutes(0, g));
        }
    }

    #[test]
    fn broken_model_names_the_relation() {
        let pres = magic_unitary_presentation(2).unwrap();
        let mut mats = vec![RatMatrix::scalar(1, q(1)), RatMatrix::scalar(1, q(0)), RatMatrix::scalar(1, q(0))];
        mats.push(RatMatrix::scalar(1, q(2)));
        let m = MatrixModel::new(pres.alphabet(), 1, mats).unwrap();
        let report = verify_model(&m, &pres).unwrap();
        assert!(!report.passed());
        assert!(report.failures().any(|r| r.relation.to_string() == "q[2,2] q[2,2] - q[2,2]"));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let pres = magic_unitary_presentation(1).unwrap();
        assert!(matches!(
            MatrixModel::new(pres.alphabet(), 2, vec![RatMatrix::identity(1)]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn permutation_models_verify() {
        let x = FiniteMetricSpace::unit_square();
        let pres = metric_commutation_presentation(&x);
        for s in classical_solutions(&pres).unwrap() {
            let m = permutation_model(&pres, &s).unwrap();
            assert!(verify_model(&m, &pres).unwrap().passed());
        }
        let red = cantor_level_presentation(2, CantorForm::Reduced).unwrap();
        for s in classical_solutions(&red).unwrap() {
            permutation_model(&red, &s).unwrap();
        }
        let bad = PermutationSolution {
            perm: vec![1, 0, 2, 3],
            source: String::new(),
        };
        assert!(permutation_model(&pres, &bad).is_err());
    }

    #[test]
    fn witness_search() {
        let red = cantor_level_presentation(2, CantorForm::Reduced).unwrap();
        let fam = ModelFamily::two_projection_default();
        let w = noncommutativity_witness(&red, &fam).unwrap().expect("witness");
        let al = red.alphabet();
        assert_eq!((al.name(w.pair.0), al.name(w.pair.1)), ("q1", "q4"));
        assert!(verify_model(&w.model, &red).unwrap().passed());
        assert!(fam.contains(&red, &cantor_witness_model()).unwrap());
        let magic = magic_unitary_presentation(2).unwrap();
        assert!(noncommutativity_witness(&magic, &fam).unwrap().is_none());
        assert!(noncommutativity_witness(&magic, &ModelFamily::PermutationDiagonalSums).unwrap().is_none());
    }

    #[test]
    fn json_round_trip() {
        let m = cantor_witness_model();
        let back = MatrixModel::from_json(m.alphabet(), &m.to_json()).unwrap();
        assert_eq!(back, m);
        assert!(MatrixModel::from_json(m.alphabet(), "{").unwrap_err().is_parse());
    }
}
