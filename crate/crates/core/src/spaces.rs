//! Finite metric spaces, finite graphs and tree-form Bratteli diagrams.
//!
//! Metric spaces store squared distances so that geometric examples such as
//! the unit square stay rational. Graphs become metric spaces with distance
//! 1 on edges and an infinity token elsewhere.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::rational::{fmt_q, parse_q, q, Q};

/// A squared distance; infinity never takes part in arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SqDist {
    Finite(Q),
    Infinite,
}

impl SqDist {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            SqDist::Finite(x) => Some(x),
            SqDist::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SqDist::Infinite)
    }
}

impl fmt::Display for SqDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SqDist::Finite(x) => f.write_str(&fmt_q(x)),
            SqDist::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    sqdist: Vec<Vec<SqDist>>,
}

#[derive(Serialize, Deserialize)]
struct MetricJson {
    n: usize,
    sqdist: Vec<Vec<String>>,
}

impl FiniteMetricSpace {
    /// Checks symmetry, zero diagonal and positive off-diagonal entries.
    /// Triangle-inequality failures are logged, not rejected.
    pub fn new(sqdist: Vec<Vec<SqDist>>) -> Result<Self> {
        let n = sqdist.len();
        for (i, row) in sqdist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, d) in row.iter().enumerate() {
                if d != &sqdist[j][i] {
                    return Err(Error::InvalidInput(format!("not symmetric at ({i},{j})")));
                }
                match (i == j, d) {
                    (true, SqDist::Finite(x)) if x.is_zero() => {}
                    (true, _) => return Err(Error::InvalidInput(format!("nonzero diagonal at {i}"))),
                    (false, SqDist::Finite(x)) if !x.is_positive() => {
                        return Err(Error::InvalidInput(format!("nonpositive distance at ({i},{j})")))
                    }
                    _ => {}
                }
            }
        }
        let space = FiniteMetricSpace { sqdist };
        for (i, j, k) in space.triangle_violations() {
            log::warn!("triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})");
        }
        Ok(space)
    }

    pub fn from_finite(sqdist: Vec<Vec<Q>>) -> Result<Self> {
        Self::new(
            sqdist
                .into_iter()
                .map(|r| r.into_iter().map(SqDist::Finite).collect())
                .collect(),
        )
    }

    /// Convenience for integer squared distances.
    pub fn from_ints(sqdist: &[&[i64]]) -> Result<Self> {
        Self::from_finite(sqdist.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    /// `n` points at mutual squared distance `d`.
    pub fn equilateral(n: usize, d: Q) -> Self {
        let m = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| SqDist::Finite(if i == j { Q::zero() } else { d.clone() }))
                    .collect()
            })
            .collect();
        FiniteMetricSpace { sqdist: m }
    }

    /// Vertices of the unit square in cyclic order.
    pub fn unit_square() -> Self {
        Self::from_ints(&[&[0, 1, 2, 1], &[1, 0, 1, 2], &[2, 1, 0, 1], &[1, 2, 1, 0]]).expect("valid")
    }

    pub fn n(&self) -> usize {
        self.sqdist.len()
    }

    pub fn sqdist(&self, i: usize, j: usize) -> &SqDist {
        &self.sqdist[i][j]
    }

    pub fn rows(&self) -> &[Vec<SqDist>] {
        &self.sqdist
    }

    pub fn has_infinities(&self) -> bool {
        self.sqdist.iter().flatten().any(SqDist::is_infinite)
    }

    /// Finite entries, with infinite ones replaced by zero.
    pub fn finite_part(&self) -> Vec<Vec<Q>> {
        self.sqdist
            .iter()
            .map(|r| r.iter().map(|d| d.finite().cloned().unwrap_or_else(Q::zero)).collect())
            .collect()
    }

    /// 1 where the distance is infinite, 0 elsewhere.
    pub fn infinity_indicator(&self) -> Vec<Vec<Q>> {
        self.sqdist
            .iter()
            .map(|r| r.iter().map(|d| if d.is_infinite() { Q::one() } else { Q::zero() }).collect())
            .collect()
    }

    /// Triples `(i, j, k)` with `d(i,k) > d(i,j) + d(j,k)`, decided on
    /// squared distances.
    pub fn triangle_violations(&self) -> Vec<(usize, usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    if j == i || j == k || i == k {
                        continue;
                    }
                    let ok = match (&self.sqdist[i][k], &self.sqdist[i][j], &self.sqdist[j][k]) {
                        (SqDist::Finite(a), SqDist::Finite(b), SqDist::Finite(c)) => {
                            let s = a - b - c;
                            !s.is_positive() || &s * &s <= q(4) * b * c
                        }
                        (SqDist::Infinite, SqDist::Finite(_), SqDist::Finite(_)) => false,
                        _ => true,
                    };
                    if !ok {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MetricJson = serde_json::from_str(text)?;
        if raw.sqdist.len() != raw.n {
            return Err(Error::Parse(format!("expected {} rows, found {}", raw.n, raw.sqdist.len())));
        }
        let m = raw
            .sqdist
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| match s.trim() {
                        "inf" | "infinity" | "∞" => Ok(SqDist::Infinite),
                        t => parse_q(t).map(SqDist::Finite),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(m)
    }

    pub fn to_json(&self) -> String {
        let raw = MetricJson {
            n: self.n(),
            sqdist: self
                .sqdist
                .iter()
                .map(|r| r.iter().map(|d| d.to_string()).collect())
                .collect(),
        };
        serde_json::to_string(&raw).expect("serializable")
    }

    /// Canonical text used for provenance hashing.
    pub fn canonical_text(&self) -> String {
        self.sqdist
            .iter()
            .map(|r| r.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// `L[i][j] = c/d²(i,j)` off the diagonal with `c = 4/(2n−1)`, and zero row
/// sums. Infinite distances contribute weight 0.
pub fn laplacian(x: &FiniteMetricSpace) -> Result<RatMatrix> {
    let n = x.n();
    if n < 2 {
        return Err(Error::InvalidInput(format!("laplacian needs at least 2 points, got {n}")));
    }
    let c = Q::new(4.into(), (2 * n as i64 - 1).into());
    let mut l = RatMatrix::zeros(n);
    for i in 0..n {
        let mut diag = Q::zero();
        for j in 0..n {
            if i == j {
                continue;
            }
            if let Some(d) = x.sqdist(i, j).finite() {
                let w = &c / d;
                diag -= &w;
                l.set(i, j, w);
            }
        }
        l.set(i, i, diag);
    }
    Ok(l)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGraph {
    vertices: Vec<String>,
    edges: BTreeSet<(usize, usize)>,
    directed: bool,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
    #[serde(default)]
    directed: bool,
}

impl FiniteGraph {
    /// Undirected graphs store both orientations of every edge.
    pub fn new(vertices: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>, directed: bool) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v) {
                return Err(Error::InvalidInput(format!("duplicate vertex `{v}`")));
            }
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= vertices.len() || b >= vertices.len() {
                return Err(Error::InvalidInput(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidInput(format!("self-loop at `{}`", vertices[a])));
            }
            set.insert((a, b));
            if !directed {
                set.insert((b, a));
            }
        }
        Ok(FiniteGraph {
            vertices,
            edges: set,
            directed,
        })
    }

    /// Vertices labeled `0..n`.
    pub fn unlabeled(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()).collect(), edges, false)
    }

    pub fn complete(n: usize) -> Self {
        Self::unlabeled(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).expect("valid")
    }

    pub fn path(n: usize) -> Self {
        Self::unlabeled(n, (1..n).map(|i| (i - 1, i))).expect("valid")
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Undirected edges are counted once.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.edges.len()
        } else {
            self.edges.len() / 2
        }
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a, b))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.range((v, 0)..(v + 1, 0)).count()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for (_, w) in self.edges.range((v, 0)..(v + 1, 0)) {
                if !seen[*w] {
                    seen[*w] = true;
                    stack.push(*w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(text)?;
        let index: HashMap<&str, usize> = raw.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::Parse(format!("edge names unknown vertex `{s}`")))
        };
        let edges = raw
            .edges
            .iter()
            .map(|(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(raw.vertices.clone(), edges, raw.directed)
    }

    pub fn to_json(&self) -> String {
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| self.directed || a < b)
            .map(|&(a, b)| (self.vertices[a].clone(), self.vertices[b].clone()))
            .collect();
        let raw = GraphJson {
            vertices: self.vertices.clone(),
            edges,
            directed: self.directed,
        };
        serde_json::to_string(&raw).expect("serializable")
    }

    pub fn canonical_text(&self) -> String {
        let e: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        format!("{} {} {}", self.n(), self.directed, e.join(","))
    }
}

/// Squared distance 1 on edges and infinity between distinct non-adjacent
/// vertices.
pub fn graph_to_metric(g: &FiniteGraph) -> Result<FiniteMetricSpace> {
    if g.directed {
        return Err(Error::InvalidInput("graph metric needs an undirected graph".into()));
    }
    let n = g.n();
    let m = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i == j, g.is_edge(i, j)) {
                    (true, _) => SqDist::Finite(Q::zero()),
                    (false, true) => SqDist::Finite(Q::one()),
                    (false, false) => SqDist::Infinite,
                })
                .collect()
        })
        .collect();
    FiniteMetricSpace::new(m)
}

/// Leveled tree: level 0 is a single root and every vertex of level `j ≥ 1`
/// has a parent at level `j − 1`; parent maps are onto.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDiagram {
    levels: Vec<usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<Vec<usize>>>,
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    levels: Vec<usize>,
    parents: Vec<Vec<usize>>,
}

impl TreeDiagram {
    /// `parents[j - 1][v]` is the parent of vertex `v` at level `j`.
    pub fn new(levels: Vec<usize>, parents: Vec<Vec<usize>>) -> Result<Self> {
        if levels.first() != Some(&1) {
            return Err(Error::InvalidInput("level 0 must have exactly one vertex".into()));
        }
        if parents.len() + 1 != levels.len() {
            return Err(Error::InvalidInput(format!(
                "{} levels need {} parent maps, got {}",
                levels.len(),
                levels.len() - 1,
                parents.len()
            )));
        }
        let mut children = Vec::with_capacity(parents.len());
        for (j, map) in parents.iter().enumerate() {
            if map.len() != levels[j + 1] {
                return Err(Error::InvalidInput(format!("parent map of level {} has wrong length", j + 1)));
            }
            let mut ch = vec![Vec::new(); levels[j]];
            for (v, &p) in map.iter().enumerate() {
                if p >= levels[j] {
                    return Err(Error::InvalidInput(format!("parent {p} out of range at level {}", j + 1)));
                }
                ch[p].push(v);
            }
            if ch.iter().any(Vec::is_empty) {
                return Err(Error::InvalidInput(format!("parent map onto level {j} is not surjective")));
            }
            children.push(ch);
        }
        Ok(TreeDiagram {
            levels,
            parents,
            children,
        })
    }

    /// Every vertex has the given number of children at each level.
    pub fn uniform(branching: &[usize]) -> Self {
        let mut levels = vec![1];
        let mut parents = Vec::new();
        for &b in branching {
            let prev = *levels.last().unwrap();
            parents.push((0..prev * b).map(|v| v / b).collect());
            levels.push(prev * b);
        }
        Self::new(levels, parents).expect("valid")
    }

    /// Children of vertex `v` are `2v` and `2v + 1`.
    pub fn binary(depth: usize) -> Self {
        Self::uniform(&vec![2; depth])
    }

    /// One vertex per level.
    pub fn chain(depth: usize) -> Self {
        Self::uniform(&vec![1; depth])
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn level_size(&self, level: usize) -> usize {
        self.levels[level]
    }

    pub fn parent(&self, level: usize, v: usize) -> usize {
        self.parents[level - 1][v]
    }

    /// Children (at `level + 1`) of vertex `v` at `level`, ascending.
    pub fn children(&self, level: usize, v: usize) -> &[usize] {
        &self.children[level][v]
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: TreeJson = serde_json::from_str(text)?;
        Self::new(raw.levels, raw.parents)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TreeJson {
            levels: self.levels.clone(),
            parents: self.parents.clone(),
        })
        .expect("serializable")
    }

    pub fn canonical_text(&self) -> String {
        format!("{:?} {:?}", self.levels, self.parents)
    }
}

/// The first `n` levels as an undirected graph, vertices `level:index` in
/// level-major order, edges joining each vertex to its parent.
pub fn truncate(t: &TreeDiagram, n: usize) -> Result<FiniteGraph> {
    if n > t.depth() {
        return Err(Error::InvalidInput(format!("level {n} exceeds depth {}", t.depth())));
    }
    let mut offset = vec![0];
    for j in 0..=n {
        offset.push(offset[j] + t.levels[j]);
    }
    let labels = (0..=n)
        .flat_map(|j| (0..t.levels[j]).map(move |v| format!("{j}:{v}")))
        .collect();
    let mut edges = Vec::new();
    for j in 1..=n {
        for v in 0..t.levels[j] {
            edges.push((offset[j - 1] + t.parent(j, v), offset[j] + v));
        }
    }
    FiniteGraph::new(labels, edges, false)
}
