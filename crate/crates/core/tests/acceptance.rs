//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qsymkit::classical::{
    classical_solutions, enumerate_graph_automorphisms, enumerate_metric_automorphisms, perms,
};
use qsymkit::continuum::{derive_conclusions, expand_isometry_relations, GeneratingSeries, SpaceKind};
use qsymkit::models::{
    cantor_witness_model, noncommutativity_witness, permutation_model, verify_model, MatrixModel, ModelFamily,
};
use qsymkit::ncstar::{abelianize, zero_one_solutions, NCPolynomial, Presentation, RelationSet, RewriteSystem};
use qsymkit::presentations::*;
use qsymkit::rational::{q, qf};
use qsymkit::spaces::{laplacian, truncate, FiniteMetricSpace, TreeDiagram};
use qsymkit::RatMatrix;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    let two = FiniteMetricSpace::from_ints(&[&[0, 1], &[1, 0]]).map_err(err)?;
    let expected = RatMatrix::from_rows(vec![vec![q(-1), q(1)], vec![q(1), q(-1)]]).scale(&qf(4, 3));
    ensure(laplacian(&two).map_err(err)? == expected, || "two-point Laplacian differs".into())?;
    let corpus = common::metric_corpus();
    let mut checked = 0;
    for (name, x) in &corpus {
        if x.n() > 6 || x.n() < 2 {
            continue;
        }
        let l = laplacian(x).map_err(err)?;
        ensure(l.row_sums().iter().all(|s| *s == q(0)), || format!("{name}: row sums"))?;
        ensure(l.is_symmetric(), || format!("{name}: not symmetric"))?;
        for s in enumerate_metric_automorphisms(x, 12).map_err(err)? {
            let p = RatMatrix::permutation(&s.perm);
            ensure(&p * &l == &l * &p, || format!("{name}: L does not commute with {:?}", s.perm))?;
        }
        checked += 1;
    }
    Ok(format!("{checked} spaces"))
}

/// Metric spaces on `n` points with squared distances in {1,2,3,4}, one per
/// relabeling class.
fn small_spaces(n: usize) -> Vec<FiniteMetricSpace> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let perms = common::all_permutations(n);
    let total = 4usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let vals: Vec<i64> = (0..pairs.len()).map(|k| (code / 4usize.pow(k as u32) % 4) as i64 + 1).collect();
        let mut m = vec![vec![0i64; n]; n];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            m[i][j] = vals[k];
            m[j][i] = vals[k];
        }
        let canonical = perms
            .iter()
            .map(|s| pairs.iter().map(|&(i, j)| m[s[i]][s[j]]).collect::<Vec<_>>())
            .min()
            .unwrap();
        if canonical == vals {
            let rows: Vec<Vec<_>> = m.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
            out.push(FiniteMetricSpace::from_finite(rows).unwrap());
        }
    }
    out
}

fn implied(a: &Presentation, b: &Presentation) -> Result<bool, String> {
    let mut sys = RewriteSystem::from_presentation(b);
    for r in a.relations().iter() {
        let r = r.rename_into(b.alphabet()).map_err(err)?;
        if !sys.reduce(&r, 4).map_err(err)?.is_zero {
            return Ok(false);
        }
    }
    Ok(true)
}

fn criterion_2() -> Outcome {
    let mut spaces = 0;
    let mut reductions = 0;
    for n in 1..=4 {
        for x in small_spaces(n) {
            let pc = metric_commutation_presentation(&x);
            let pq = qiso_quadratic_presentation(&x);
            let sc = perms(&classical_solutions(&pc).map_err(err)?);
            let sq = perms(&classical_solutions(&pq).map_err(err)?);
            ensure(sc == sq, || format!("solution sets differ for {}", x.canonical_text()))?;
            if n <= 3 {
                ensure(implied(&pq, &pc)?, || format!("qiso not implied: {}", x.canonical_text()))?;
                ensure(implied(&pc, &pq)?, || format!("commutation not implied: {}", x.canonical_text()))?;
                reductions += 2;
            }
            spaces += 1;
        }
    }
    Ok(format!("{spaces} spaces, {reductions} cross-reductions"))
}

fn solutions_as_perms(p: &Presentation, n: usize) -> Result<Vec<Vec<usize>>, String> {
    let sols = zero_one_solutions(&abelianize(p)).map_err(err)?;
    let mut out: Vec<Vec<usize>> = sols.iter().map(|s| common::assignment_to_perm(s, n)).collect();
    out.sort();
    Ok(out)
}

fn criterion_3() -> Outcome {
    let mut objects = 0;
    let mut metrics = common::metric_corpus();
    metrics.extend(common::large_metric_corpus());
    for (name, x) in &metrics {
        let oracle = perms(&enumerate_metric_automorphisms(x, 12).map_err(err)?);
        if x.n() <= 7 {
            let key: Vec<Vec<_>> = x.rows().to_vec();
            ensure(common::naive_automorphisms(&key) == oracle, || format!("{name}: pruned oracle"))?;
        }
        for p in [metric_commutation_presentation(x), qiso_quadratic_presentation(x)] {
            let got = solutions_as_perms(&p, x.n())?;
            ensure(got == oracle, || format!("{name}: {} solutions vs {} automorphisms", got.len(), oracle.len()))?;
        }
        objects += 1;
    }
    for (name, g) in common::graph_corpus() {
        let oracle = perms(&enumerate_graph_automorphisms(&g, 12).map_err(err)?);
        if g.n() <= 7 {
            let key: Vec<Vec<bool>> = (0..g.n()).map(|a| (0..g.n()).map(|b| g.is_edge(a, b)).collect()).collect();
            ensure(common::naive_automorphisms(&key) == oracle, || format!("{name}: pruned oracle"))?;
        }
        let p = edge_orthogonality_presentation(&g).map_err(err)?;
        let got = solutions_as_perms(&p, g.n())?;
        ensure(got == oracle, || format!("{name}: {} solutions vs {} automorphisms", got.len(), oracle.len()))?;
        let pm = graph_metric_presentation(&g).map_err(err)?;
        ensure(solutions_as_perms(&pm, g.n())? == oracle, || format!("{name}: graph metric scheme"))?;
        objects += 1;
    }
    Ok(format!("{objects} objects"))
}

fn criterion_4() -> Outcome {
    let count = |n, form| classical_solutions(&cantor_level_presentation(n, form).map_err(err)?).map_err(err);
    let l1 = count(1, CantorForm::Reduced)?;
    ensure(l1.len() == 2, || format!("level 1 has {} solutions", l1.len()))?;
    let oracle = enumerate_graph_automorphisms(&truncate(&TreeDiagram::binary(2), 2).map_err(err)?, 12).map_err(err)?;
    let l2 = count(2, CantorForm::Reduced)?;
    ensure(l2.len() == oracle.len(), || format!("level 2: {} vs oracle {}", l2.len(), oracle.len()))?;
    let mut sizes = Vec::new();
    for n in 1..=3 {
        let raw = perms(&count(n, CantorForm::Raw)?);
        let red = perms(&count(n, CantorForm::Reduced)?);
        ensure(raw == red, || format!("level {n}: raw and reduced differ"))?;
        sizes.push(raw.len());
    }
    Ok(format!("levels 1-3: {sizes:?}, oracle at level 2: {}", oracle.len()))
}

fn criterion_5() -> Outcome {
    let pres = cantor_level_presentation(2, CantorForm::Reduced).map_err(err)?;
    let m = cantor_witness_model();
    let report = verify_model(&m, &pres).map_err(err)?;
    ensure(report.passed(), || format!("witness fails:\n{report}"))?;
    let al = pres.alphabet();
    let (q1, q4) = (al.id("q1").map_err(err)?, al.id("q4").map_err(err)?);
    let comm = m.matrix(q1).commutator(m.matrix(q4));
    let half = qf(1, 2);
    let expected = RatMatrix::from_rows(vec![vec![q(0), half.clone()], vec![-half, q(0)]]).direct_sum(&RatMatrix::zeros(2));
    ensure(comm == expected, || format!("commutator is {comm}"))?;
    let fam = ModelFamily::two_projection_default();
    let w = noncommutativity_witness(&pres, &fam).map_err(err)?.ok_or("search found nothing")?;
    ensure(w.pair == (q1, q4), || format!("search found pair {:?}", w.pair))?;
    ensure(verify_model(&w.model, &pres).map_err(err)?.passed(), || "found model fails".into())?;
    ensure(fam.contains(&pres, &m).map_err(err)?, || "witness model outside the family".into())?;
    Ok(format!("commutator {comm}, search found (q1, q4) at dim {}", w.model.dim()))
}

fn criterion_6() -> Outcome {
    let raw = cantor_level_presentation(2, CantorForm::Raw).map_err(err)?;
    let red = cantor_level_presentation(2, CantorForm::Reduced).map_err(err)?;
    let (_, images) = cantor_raw_images(2).map_err(err)?;
    let mut models: Vec<MatrixModel> = Vec::new();
    for s in classical_solutions(&raw).map_err(err)? {
        models.push(permutation_model(&raw, &s).map_err(err)?);
    }
    let perm_count = models.len();
    let witness = cantor_witness_model().pull_back(raw.alphabet(), &images).map_err(err)?;
    models.push(witness.clone());
    let found = noncommutativity_witness(&red, &ModelFamily::two_projection_default())
        .map_err(err)?
        .ok_or("no witness")?;
    models.push(found.model.pull_back(raw.alphabet(), &images).map_err(err)?);
    for k in 0..perm_count {
        models.push(witness.direct_sum(&models[k]).map_err(err)?);
        models.push(models[k].direct_sum(&models[(k + 1) % perm_count]).map_err(err)?);
    }
    models.push(witness.direct_sum(&witness).map_err(err)?);
    let mut checked = 0;
    for m in &models {
        ensure(verify_model(m, &raw).map_err(err)?.passed(), || format!("model of dim {} fails", m.dim()))?;
        for i in ["1", "2"] {
            for j in ["1", "2"] {
                let a = m.matrix_by_name(&format!("a[{i}2,{j}1]")).map_err(err)?;
                let b = m.matrix_by_name(&format!("a[{i}1,{j}2]")).map_err(err)?;
                ensure(a == b, || format!("a[{i}2,{j}1] != a[{i}1,{j}2] in a model of dim {}", m.dim()))?;
            }
        }
        checked += 1;
    }
    ensure(checked >= 20, || format!("only {checked} models"))?;
    Ok(format!("{checked} models ({perm_count} permutation models)"))
}

fn criterion_7() -> Outcome {
    let t = TreeDiagram::binary(3);
    let (levels, maps) = tree_inductive_system(&t, 3).map_err(err)?;
    let limit = inductive_limit_assemble(&levels, &maps).map_err(err)?;
    let got = perms(&classical_solutions(&limit).map_err(err)?);
    for form in [CantorForm::Raw, CantorForm::Reduced] {
        let want = perms(&classical_solutions(&cantor_level_presentation(3, form).map_err(err)?).map_err(err)?);
        ensure(got == want, || format!("{form:?}: {} vs {}", got.len(), want.len()))?;
    }
    let chain = TreeDiagram::chain(4);
    let (levels, maps) = tree_inductive_system(&chain, 4).map_err(err)?;
    let collapsed = inductive_limit_assemble(&levels, &maps).map_err(err)?;
    let al = collapsed.alphabet();
    let mut sys = RewriteSystem::from_presentation(&collapsed);
    for g in 0..al.len() as u32 {
        let x = NCPolynomial::generator(al, g);
        let r = sys.reduce(&(&x - &NCPolynomial::one(al)), 4).map_err(err)?;
        ensure(r.is_zero, || format!("{} does not collapse", al.name(g)))?;
    }
    Ok(format!("{} classical points at level 3; chain of 4 levels collapses", got.len()))
}

fn canonical(al: &std::sync::Arc<qsymkit::ncstar::Alphabet>, text: &str) -> Result<NCPolynomial, String> {
    let mut s = RelationSet::new(al);
    s.insert(NCPolynomial::parse(al, text).map_err(err)?).map_err(err)?;
    let first = s.iter().next().cloned();
    first.ok_or_else(|| "zero relation".to_string())
}

fn criterion_8() -> Outcome {
    let interval = GeneratingSeries::new(SpaceKind::Interval, 5).map_err(err)?;
    let ial = interval.alphabet();
    let rel = expand_isometry_relations(&interval);
    let mut expected = vec!["q2 q0 + q0 q2 + q1 q1 - 2 q2 q0 = 1".to_string()];
    expected.extend((2..=4).map(|n| format!("q{n} q{n} = 0")));
    for t in &expected {
        ensure(rel.contains(&canonical(ial, t)?), || format!("interval relation `{t}` missing"))?;
    }
    let out = derive_conclusions(&rel, SpaceKind::Interval);
    for t in ["q2", "q3", "q4", "q1 q1 = 1"] {
        ensure(out.contains(&canonical(ial, t)?), || format!("interval conclusion `{t}` missing"))?;
    }
    let circle = GeneratingSeries::new(SpaceKind::Circle, 5).map_err(err)?;
    let cal = circle.alphabet();
    let rel = expand_isometry_relations(&circle);
    let mut expected = vec!["q0 q0* + q0* q0".to_string()];
    expected.extend((2..=4).map(|n| format!("q{n} q{n}* + q'{n}* q'{n}")));
    for t in &expected {
        ensure(rel.contains(&canonical(cal, t)?), || format!("circle relation `{t}` missing"))?;
    }
    let out = derive_conclusions(&rel, SpaceKind::Circle);
    for t in ["q0", "q2", "q3", "q4", "q'2", "q'3", "q'4"] {
        ensure(out.contains(&canonical(cal, t)?), || format!("circle conclusion `{t}` missing"))?;
    }
    Ok("interval and circle relations and conclusions present".into())
}

fn criterion_9() -> Outcome {
    let mut counts = Vec::new();
    for n in 1..=3 {
        let t = TreeDiagram::binary(n);
        let tree = perms(&classical_solutions(&tree_diagram_presentation(&t, n).map_err(err)?).map_err(err)?);
        let g = truncate(&t, n).map_err(err)?;
        let edge = perms(&classical_solutions(&edge_orthogonality_presentation(&g).map_err(err)?).map_err(err)?);
        let offset = (1 << n) - 1;
        let restricted: BTreeSet<Vec<usize>> =
            edge.iter().map(|s| s[offset..].iter().map(|v| v - offset).collect()).collect();
        ensure(restricted.len() == edge.len(), || format!("depth {n}: restriction not injective"))?;
        let tree_set: BTreeSet<Vec<usize>> = tree.iter().cloned().collect();
        ensure(restricted == tree_set, || format!("depth {n}: {} vs {}", tree.len(), edge.len()))?;
        counts.push(tree.len());
    }
    Ok(format!("depths 1-3: {counts:?}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("Laplacian correctness", criterion_1, Duration::from_secs(1)),
        ("scheme equivalence", criterion_2, Duration::from_secs(60)),
        ("oracle equivalence", criterion_3, Duration::from_secs(30)),
        ("Cantor tower", criterion_4, Duration::from_secs(60)),
        ("quantum witness", criterion_5, Duration::from_secs(5)),
        ("sibling-entry identity", criterion_6, Duration::from_secs(60)),
        ("inductive limit", criterion_7, Duration::from_secs(10)),
        ("continuum derivations", criterion_8, Duration::from_secs(5)),
        ("tree/graph schemes", criterion_9, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let line = match result {
            Ok(detail) if elapsed <= *limit => format!("PASS criterion {} ({name}): {detail} [{elapsed:.2?}]", i + 1),
            Ok(detail) => {
                failed += 1;
                format!("FAIL criterion {} ({name}): {detail}, but took {elapsed:.2?} > {limit:?}", i + 1)
            }
            Err(e) => {
                failed += 1;
                format!("FAIL criterion {} ({name}): {e} [{elapsed:.2?}]", i + 1)
            }
        };
        println!("{line}");
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
