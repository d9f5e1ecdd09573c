//! Brute-force classical oracles: automorphisms of metric spaces and graphs,
//! and the classical points of presentations read off their abelianization.

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ncstar::{abelianize, zero_one_solutions, Presentation};
use crate::rational::Q;
use crate::spaces::{FiniteGraph, FiniteMetricSpace, SqDist};

pub const DEFAULT_SIZE_CAP: usize = 12;

/// A permutation in one-line notation: `perm[i] = σ(i)`, matching a magic
/// unitary with `q[i,σ(i)] = 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PermutationSolution {
    pub perm: Vec<usize>,
    pub source: String,
}

impl PermutationSolution {
    pub fn one_line(&self) -> String {
        self.perm.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    }
}

/// All `σ` with `key[σ(i)][σ(j)] == key[i][j]`, sorted. Candidates for
/// `σ(i)` are restricted to vertices with the same row multiset.
fn enumerate_preserving<K: Eq + Ord + Hash + Clone + Sync>(key: &[Vec<K>], cap: usize) -> Result<Vec<Vec<usize>>> {
    let n = key.len();
    if n > cap {
        return Err(Error::SizeLimit { size: n, limit: cap });
    }
    if n == 0 {
        return Ok(vec![vec![]]);
    }
    let invariant: Vec<Vec<K>> = key
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<K> = row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, k)| k.clone()).collect();
            r.sort();
            r
        })
        .collect();
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| invariant[i] == invariant[j] && key[i][i] == key[j][j]).collect())
        .collect();

    fn extend<K: Eq>(
        key: &[Vec<K>],
        candidates: &[Vec<usize>],
        perm: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let i = perm.len();
        if i == key.len() {
            out.push(perm.clone());
            return;
        }
        for &c in &candidates[i] {
            if used[c] || !(0..i).all(|j| key[i][j] == key[c][perm[j]] && key[j][i] == key[perm[j]][c]) {
                continue;
            }
            used[c] = true;
            perm.push(c);
            extend(key, candidates, perm, used, out);
            perm.pop();
            used[c] = false;
        }
    }

    let mut all: Vec<Vec<usize>> = candidates[0]
        .par_iter()
        .map(|&c| {
            let mut used = vec![false; n];
            used[c] = true;
            let mut perm = vec![c];
            let mut out = Vec::new();
            extend(key, &candidates, &mut perm, &mut used, &mut out);
            out
        })
        .flatten()
        .collect();
    all.sort();
    Ok(all)
}

fn wrap(perms: Vec<Vec<usize>>, source: &str) -> Vec<PermutationSolution> {
    perms
        .into_iter()
        .map(|perm| PermutationSolution {
            perm,
            source: source.to_string(),
        })
        .collect()
}

/// Isometries of a finite metric space, lexicographically sorted.
pub fn enumerate_metric_automorphisms(x: &FiniteMetricSpace, size_cap: usize) -> Result<Vec<PermutationSolution>> {
    let key: Vec<Vec<SqDist>> = x.rows().to_vec();
    Ok(wrap(enumerate_preserving(&key, size_cap)?, "metric"))
}

/// Adjacency-preserving permutations, lexicographically sorted.
pub fn enumerate_graph_automorphisms(g: &FiniteGraph, size_cap: usize) -> Result<Vec<PermutationSolution>> {
    let n = g.n();
    let key: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| g.is_edge(a, b)).collect()).collect();
    Ok(wrap(enumerate_preserving(&key, size_cap)?, "graph"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSummary {
    pub order: usize,
    /// Each orbit sorted, orbits ordered by least element.
    pub orbits: Vec<Vec<usize>>,
}

/// Order and vertex orbits of a permutation group given by all its
/// elements; fails if the list is not closed under composition.
pub fn group_order_and_orbits(sols: &[PermutationSolution]) -> Result<GroupSummary> {
    let Some(first) = sols.first() else {
        return Err(Error::Closure("empty solution list".into()));
    };
    let n = first.perm.len();
    if sols.iter().any(|s| s.perm.len() != n) {
        return Err(Error::Closure("permutations of different sizes".into()));
    }
    let set: BTreeSet<&[usize]> = sols.iter().map(|s| s.perm.as_slice()).collect();
    if set.len() != sols.len() {
        return Err(Error::Closure("duplicate elements".into()));
    }
    let identity: Vec<usize> = (0..n).collect();
    if !set.contains(identity.as_slice()) {
        return Err(Error::Closure("identity missing".into()));
    }
    for a in &set {
        for b in &set {
            let ab: Vec<usize> = b.iter().map(|&x| a[x]).collect();
            if !set.contains(ab.as_slice()) {
                return Err(Error::Closure(format!("{a:?} ∘ {b:?} missing")));
            }
        }
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for s in sols {
        for (i, &j) in s.perm.iter().enumerate() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    let mut orbits: Vec<Vec<usize>> = groups.into_values().collect();
    orbits.sort();
    Ok(GroupSummary {
        order: sols.len(),
        orbits,
    })
}

/// A {0,1} point of a presentation: values of all abelianized variables and
/// the permutation carried by every declared block.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClassicalPoint {
    pub values: Vec<u8>,
    pub block_perms: Vec<Vec<usize>>,
}

/// Every {0,1} point of the abelianization, in solver order.
pub fn classical_points(p: &Presentation) -> Result<Vec<ClassicalPoint>> {
    let c = abelianize(p);
    let sols = zero_one_solutions(&c)?;
    let mut out = Vec::with_capacity(sols.len());
    for values in sols {
        let qv: Vec<Q> = values.iter().map(|&v| if v == 1 { Q::one() } else { Q::zero() }).collect();
        let mut block_perms = Vec::new();
        for b in p.blocks() {
            let mut perm = vec![usize::MAX; b.size];
            for i in 0..b.size {
                for j in 0..b.size {
                    let v = c.eval_nc(b.entry(i, j), &qv);
                    if v.is_one() {
                        if perm[i] != usize::MAX {
                            return Err(Error::NotASolution(format!("block {} row {i} has two ones", b.label)));
                        }
                        perm[i] = j;
                    } else if !v.is_zero() {
                        return Err(Error::NotASolution(format!("block {} entry ({i},{j}) is {v}", b.label)));
                    }
                }
            }
            if perm.contains(&usize::MAX) {
                return Err(Error::NotASolution(format!("block {} is not a permutation", b.label)));
            }
            block_perms.push(perm);
        }
        out.push(ClassicalPoint { values, block_perms });
    }
    Ok(out)
}

/// Distinct permutations carried by the principal (last) block of the
/// classical points, sorted.
pub fn classical_solutions(p: &Presentation) -> Result<Vec<PermutationSolution>> {
    if p.principal_block().is_none() {
        return Err(Error::InvalidInput("presentation declares no magic-unitary block".into()));
    }
    let source = p.provenance.as_ref().map_or("presentation".to_string(), |pr| pr.builder.clone());
    let perms: BTreeSet<Vec<usize>> = classical_points(p)?
        .into_iter()
        .map(|pt| pt.block_perms.last().unwrap().clone())
        .collect();
    Ok(wrap(perms.into_iter().collect(), &source))
}

/// Permutation lists only, for comparisons.
pub fn perms(sols: &[PermutationSolution]) -> Vec<Vec<usize>> {
    sols.iter().map(|s| s.perm.clone()).collect()
}
