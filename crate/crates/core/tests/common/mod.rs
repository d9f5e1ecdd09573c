//! Shared corpus of small inputs for the integration tests.
#![allow(dead_code)]

use qsymkit::rational::q;
use qsymkit::spaces::{truncate, FiniteGraph, FiniteMetricSpace, TreeDiagram};

fn from_points(points: &[(i64, i64, i64)]) -> FiniteMetricSpace {
    let sq = points
        .iter()
        .map(|a| {
            points
                .iter()
                .map(|b| q((a.0 - b.0).pow(2) + (a.1 - b.1).pow(2) + (a.2 - b.2).pow(2)))
                .collect()
        })
        .collect();
    FiniteMetricSpace::from_finite(sq).unwrap()
}

pub fn metric_corpus() -> Vec<(&'static str, FiniteMetricSpace)> {
    let hexagon = FiniteMetricSpace::from_finite(
        (0..6)
            .map(|i: i64| {
                (0..6)
                    .map(|j: i64| q([0, 1, 3, 4, 3, 1][((i - j).rem_euclid(6)) as usize]))
                    .collect()
            })
            .collect(),
    )
    .unwrap();
    vec![
        ("two-points", FiniteMetricSpace::from_ints(&[&[0, 1], &[1, 0]]).unwrap()),
        ("equilateral-3", FiniteMetricSpace::equilateral(3, q(1))),
        ("scalene", FiniteMetricSpace::from_ints(&[&[0, 1, 4], &[1, 0, 9], &[4, 9, 0]]).unwrap()),
        ("isosceles", FiniteMetricSpace::from_ints(&[&[0, 1, 1], &[1, 0, 2], &[1, 2, 0]]).unwrap()),
        ("square", FiniteMetricSpace::unit_square()),
        ("rectangle", from_points(&[(0, 0, 0), (1, 0, 0), (1, 2, 0), (0, 2, 0)])),
        ("line-4", from_points(&[(0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0)])),
        ("tetrahedron", FiniteMetricSpace::equilateral(4, q(2))),
        ("equilateral-5", FiniteMetricSpace::equilateral(5, q(3))),
        ("square-pyramid", from_points(&[(0, 0, 0), (2, 0, 0), (2, 2, 0), (0, 2, 0), (1, 1, 1)])),
        ("hexagon", hexagon),
        ("triangular-prism-ish", from_points(&[(0, 0, 0), (2, 0, 0), (1, 2, 0), (0, 0, 1), (2, 0, 1), (1, 2, 1)])),
    ]
}

/// Larger metric spaces for oracle-equivalence runs (up to 12 points).
pub fn large_metric_corpus() -> Vec<(&'static str, FiniteMetricSpace)> {
    let cube: Vec<(i64, i64, i64)> = (0..8).map(|v| (v & 1, (v >> 1) & 1, (v >> 2) & 1)).collect();
    let grid: Vec<(i64, i64, i64)> = (0..9).map(|v| (v % 3, v / 3, 0)).collect();
    vec![("cube", from_points(&cube)), ("grid-3x3", from_points(&grid))]
}

pub fn graph_corpus() -> Vec<(&'static str, FiniteGraph)> {
    let petersen_edges: Vec<(usize, usize)> = (0..5)
        .flat_map(|i| [(i, (i + 1) % 5), (i, i + 5), (i + 5, (i + 2) % 5 + 5)])
        .collect();
    vec![
        ("path-3", FiniteGraph::path(3)),
        ("path-5", FiniteGraph::path(5)),
        ("k4", FiniteGraph::complete(4)),
        ("cycle-5", FiniteGraph::unlabeled(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap()),
        ("cycle-6", FiniteGraph::unlabeled(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap()),
        ("star-4", FiniteGraph::unlabeled(5, (1..5).map(|i| (0, i))).unwrap()),
        ("empty-3", FiniteGraph::unlabeled(3, []).unwrap()),
        ("binary-tree-1", truncate(&TreeDiagram::binary(1), 1).unwrap()),
        ("binary-tree-2", truncate(&TreeDiagram::binary(2), 2).unwrap()),
        ("ternary-tree-2", truncate(&TreeDiagram::uniform(&[3, 1]), 2).unwrap()),
        ("petersen", FiniteGraph::unlabeled(10, petersen_edges).unwrap()),
    ]
}

/// Every permutation of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Unpruned oracle: permutations preserving `key`.
pub fn naive_automorphisms<K: PartialEq>(key: &[Vec<K>]) -> Vec<Vec<usize>> {
    let n = key.len();
    all_permutations(n)
        .into_iter()
        .filter(|s| (0..n).all(|i| (0..n).all(|j| key[s[i]][s[j]] == key[i][j])))
        .collect()
}

/// Reads the permutation off a {0,1} assignment of an `n × n` magic unitary
/// stored row-major in the first `n²` variables.
pub fn assignment_to_perm(values: &[u8], n: usize) -> Vec<usize> {
    (0..n)
        .map(|i| (0..n).find(|&j| values[i * n + j] == 1).expect("row has a one"))
        .collect()
}
