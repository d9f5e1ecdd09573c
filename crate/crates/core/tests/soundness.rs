//! Derived relations must hold in every exact model of the relations they
//! were derived from.

use qsymkit::classical::classical_solutions;
use qsymkit::continuum::{derive_conclusions, expand_isometry_relations, GeneratingSeries, SpaceKind};
use qsymkit::models::{permutation_model, MatrixModel};
use qsymkit::ncstar::{abelianize, positivity_simplify, zero_one_solutions, RelationSet};
use qsymkit::presentations::{cantor_level_presentation, CantorForm};
use qsymkit::rational::{q, qf};
use qsymkit::RatMatrix;

fn holds(m: &MatrixModel, r: &RelationSet) -> bool {
    r.iter().all(|p| m.eval(p).unwrap().is_zero())
}

fn series_model(s: &GeneratingSeries, named: &[(&str, RatMatrix)]) -> MatrixModel {
    let dim = named[0].1.dim();
    let al = s.alphabet();
    let mut mats = vec![RatMatrix::zeros(dim); al.len()];
    for (name, m) in named {
        mats[al.id(name).unwrap() as usize] = m.clone();
    }
    MatrixModel::new(al, dim, mats).unwrap()
}

fn rotation() -> RatMatrix {
    RatMatrix::from_rows(vec![vec![qf(3, 5), qf(-4, 5)], vec![qf(4, 5), qf(3, 5)]])
}

#[test]
fn interval_reflection_models_satisfy_conclusions() {
    let p = RatMatrix::from_rows(vec![vec![q(1), q(0)], vec![q(0), q(0)]]);
    let perp = &RatMatrix::identity(2) - &p;
    for n in 2..=5 {
        let s = GeneratingSeries::new(SpaceKind::Interval, n).unwrap();
        let rel = expand_isometry_relations(&s);
        let out = derive_conclusions(&rel, SpaceKind::Interval);
        for m in [
            series_model(&s, &[("q0", perp.clone()), ("q1", &p - &perp)]),
            series_model(&s, &[("q0", RatMatrix::identity(1)), ("q1", RatMatrix::scalar(1, q(-1)))]),
            series_model(&s, &[("q0", RatMatrix::zeros(1)), ("q1", RatMatrix::identity(1))]),
        ] {
            assert!(holds(&m, &rel), "model violates the relations at N={n}");
            assert!(holds(&m, &out), "model violates a conclusion at N={n}");
        }
    }
}

#[test]
fn circle_rotation_models_satisfy_conclusions() {
    for n in 2..=5 {
        let s = GeneratingSeries::new(SpaceKind::Circle, n).unwrap();
        let rel = expand_isometry_relations(&s);
        let out = derive_conclusions(&rel, SpaceKind::Circle);
        for m in [
            series_model(&s, &[("q1", rotation())]),
            series_model(&s, &[("q'1", rotation())]),
            series_model(&s, &[("q1", RatMatrix::identity(1))]),
            series_model(&s, &[("q'1", RatMatrix::identity(1))]),
        ] {
            assert!(holds(&m, &rel), "model violates the relations at N={n}");
            assert!(holds(&m, &out), "model violates a conclusion at N={n}");
        }
    }
}

#[test]
fn conclusions_are_stable_under_truncation() {
    for kind in [SpaceKind::Interval, SpaceKind::Circle] {
        let small = GeneratingSeries::new(kind, 4).unwrap();
        let large = GeneratingSeries::new(kind, 6).unwrap();
        let lo = derive_conclusions(&expand_isometry_relations(&small), kind);
        let hi = derive_conclusions(&expand_isometry_relations(&large), kind);
        for p in lo.iter().filter(|p| p.degree().unwrap_or(0) <= 2) {
            let lifted = p.rename_into(large.alphabet()).unwrap();
            assert!(hi.contains(&lifted), "{kind:?}: `{p}` lost when N grows");
        }
    }
}

#[test]
fn positivity_preserves_the_model_set() {
    let p = cantor_level_presentation(2, CantorForm::Raw).unwrap();
    let al = p.alphabet();
    let simplified = positivity_simplify(p.relations());
    let mut corpus: Vec<MatrixModel> =
        classical_solutions(&p).unwrap().iter().map(|s| permutation_model(&p, s).unwrap()).collect();
    corpus.push(MatrixModel::new(al, 1, vec![RatMatrix::identity(1); al.len()]).unwrap());
    corpus.push(MatrixModel::new(al, 1, vec![RatMatrix::zeros(1); al.len()]).unwrap());
    corpus.push(corpus[0].direct_sum(&corpus[corpus.len() - 1]).unwrap());
    for m in &corpus {
        assert_eq!(holds(m, p.relations()), holds(m, &simplified));
    }

    for kind in [SpaceKind::Interval, SpaceKind::Circle] {
        let s = GeneratingSeries::new(kind, 4).unwrap();
        let rel = expand_isometry_relations(&s);
        let simplified = positivity_simplify(&rel);
        let two = RatMatrix::scalar(1, q(2));
        for m in [
            series_model(&s, &[("q1", RatMatrix::identity(1))]),
            series_model(&s, &[("q0", RatMatrix::identity(1))]),
            series_model(&s, &[("q1", RatMatrix::identity(1)), ("q2", two.clone())]),
            series_model(&s, &[("q1", rotation())]),
        ] {
            assert_eq!(holds(&m, &rel), holds(&m, &simplified), "{kind:?}");
        }
    }
}

#[test]
fn zero_one_points_are_diagonal_models() {
    let p = cantor_level_presentation(2, CantorForm::Reduced).unwrap();
    let ab = abelianize(&p);
    let sols = zero_one_solutions(&ab).unwrap();
    assert_eq!(sols.len(), 8);
    for sol in sols {
        let values: Vec<_> = sol.iter().map(|&v| q(v as i64)).collect();
        let mats: Vec<RatMatrix> = (0..p.alphabet().len() as u32)
            .map(|g| RatMatrix::scalar(1, values[ab.var_of(g, false) as usize].clone()))
            .collect();
        let m = MatrixModel::new(p.alphabet(), 1, mats).unwrap();
        assert!(qsymkit::models::verify_model(&m, &p).unwrap().passed());
    }
}
