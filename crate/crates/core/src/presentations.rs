//! Builders turning metric spaces, graphs and tree diagrams into
//! presentations, plus assembly of inductive systems of presentations.
//!
//! Generator naming: magic unitaries use `q[i,j]` (1-based), tree diagrams
//! use `a<m>[i,j]` for level `m`, the raw Cantor tower uses multi-indices
//! `a[I,J]` with digits in {1,2}, and the Cantor limit uses `p`, `p1`,
//! `p12`, ... with digits in {1,2,3,4}.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ncstar::{reduce, same_alphabet, Alphabet, MagicBlock, NCPolynomial, Presentation, RewriteSystem};
use crate::rational::Q;
use crate::spaces::{graph_to_metric, FiniteGraph, FiniteMetricSpace, TreeDiagram};

/// Degree bound used when validating connecting maps.
pub const MAP_CHECK_DEGREE: usize = 4;

fn magic_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n)
        .flat_map(|i| (1..=n).map(move |j| format!("{prefix}[{i},{j}]")))
        .collect()
}

/// Magic unitary generators `q[i][j]` as polynomials, with the block already
/// added to `p`.
fn magic_core(n: usize) -> Result<(Presentation, Vec<Vec<NCPolynomial>>)> {
    if n < 1 {
        return Err(Error::InvalidInput("magic unitary needs n >= 1".into()));
    }
    let al = Alphabet::selfadjoint(magic_names("q", n))?;
    let mut p = Presentation::new(&al);
    let ids: Vec<u32> = (0..(n * n) as u32).collect();
    p.add_block(MagicBlock::of_generators("U", &al, &ids)?)?;
    let q = (0..n)
        .map(|i| (0..n).map(|j| NCPolynomial::generator(&al, (i * n + j) as u32)).collect())
        .collect();
    Ok((p, q))
}

/// `n²` projections `q[i,j]` with row and column sums 1 and explicit row and
/// column orthogonality.
pub fn magic_unitary_presentation(n: usize) -> Result<Presentation> {
    let (p, _) = magic_core(n)?;
    Ok(p.with_provenance("magic_unitary", &n.to_string()))
}

/// Weight matrices a metric space contributes: the finite squared distances
/// and, when some distance is infinite, the indicator of infinite entries.
fn weight_matrices(x: &FiniteMetricSpace) -> Vec<Vec<Vec<Q>>> {
    let mut out = vec![x.finite_part()];
    if x.has_infinities() {
        out.push(x.infinity_indicator());
    }
    out
}

/// `Σᵢ D[i][l] q[k][i] − Σᵢ D[k][i] q[i][l]` for every `(k, l)`, i.e. the
/// entries of `QD − DQ`.
fn commutation_relations(d: &[Vec<Q>], q: &[Vec<NCPolynomial>]) -> Vec<NCPolynomial> {
    let n = d.len();
    let al = q[0][0].alphabet().clone();
    let mut out = Vec::new();
    for k in 0..n {
        for l in 0..n {
            let mut r = NCPolynomial::zero(&al);
            for i in 0..n {
                r = &r + &q[k][i].scale(&d[i][l]);
                r = &r - &q[i][l].scale(&d[k][i]);
            }
            out.push(r);
        }
    }
    out
}

/// `Σ_{i,j} D[i][j] q[k][i] q[l][j] − D[k][l]` for every `(k, l)`.
fn quadratic_relations(d: &[Vec<Q>], q: &[Vec<NCPolynomial>]) -> Vec<NCPolynomial> {
    let n = d.len();
    let al = q[0][0].alphabet().clone();
    let mut out = Vec::new();
    for k in 0..n {
        for l in 0..n {
            let mut r = NCPolynomial::constant(&al, -d[k][l].clone());
            for i in 0..n {
                for j in 0..n {
                    if !d[i][j].is_zero() {
                        r = &r + &(&q[k][i] * &q[l][j]).scale(&d[i][j]);
                    }
                }
            }
            out.push(r);
        }
    }
    out
}

/// Magic unitary commuting with the squared-distance matrix.
pub fn metric_commutation_presentation(x: &FiniteMetricSpace) -> Presentation {
    let (mut p, q) = magic_core(x.n()).expect("nonempty space");
    for d in weight_matrices(x) {
        p.add_relations(commutation_relations(&d, &q)).expect("same alphabet");
    }
    p.with_provenance("metric_commutation", &x.canonical_text())
}

/// Magic unitary preserving squared distances quadratically:
/// `Σ_{i,j} d²(i,j) q[k,i] q[l,j] = d²(k,l)`.
pub fn qiso_quadratic_presentation(x: &FiniteMetricSpace) -> Presentation {
    let (mut p, q) = magic_core(x.n()).expect("nonempty space");
    for d in weight_matrices(x) {
        p.add_relations(quadratic_relations(&d, &q)).expect("same alphabet");
    }
    p.with_provenance("qiso_quadratic", &x.canonical_text())
}

/// Magic unitary on the vertices with `q[a,i] q[b,j] = 0` whenever exactly
/// one of `(a,b)`, `(i,j)` is an edge.
pub fn edge_orthogonality_presentation(g: &FiniteGraph) -> Result<Presentation> {
    if g.is_directed() {
        return Err(Error::InvalidInput("edge scheme needs an undirected graph".into()));
    }
    let n = g.n();
    let (mut p, q) = magic_core(n)?;
    for a in 0..n {
        for b in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if a != b && i != j && g.is_edge(a, b) != g.is_edge(i, j) {
                        p.add_relation(&q[a][i] * &q[b][j])?;
                    }
                }
            }
        }
    }
    Ok(p.with_provenance("edge_orthogonality", &g.canonical_text()))
}

/// Convenience: the edge scheme of a graph viewed through its metric.
pub fn graph_metric_presentation(g: &FiniteGraph) -> Result<Presentation> {
    Ok(metric_commutation_presentation(&graph_to_metric(g)?))
}

/// Generator id of `a<m>[i,j]` (0-based `i`, `j`) in a tree presentation.
fn tree_offsets(t: &TreeDiagram, n: usize) -> Vec<usize> {
    let mut off = vec![0];
    for m in 1..=n {
        let s = t.level_size(m);
        off.push(off[m - 1] + s * s);
    }
    off
}

fn tree_alphabet(t: &TreeDiagram, n: usize) -> Result<Arc<Alphabet>> {
    Alphabet::selfadjoint((1..=n).flat_map(|m| magic_names(&format!("a{m}"), t.level_size(m))))
}

/// One magic unitary per level `1..=n`, tied together by
/// `a⁽ᵐ⁾[i,j] = Σ_{r child of i} a⁽ᵐ⁺¹⁾[r,s]` for every child `s` of `j`.
pub fn tree_diagram_presentation(t: &TreeDiagram, n: usize) -> Result<Presentation> {
    if n < 1 || n > t.depth() {
        return Err(Error::InvalidInput(format!("level {n} outside 1..={}", t.depth())));
    }
    let al = tree_alphabet(t, n)?;
    let off = tree_offsets(t, n);
    let gen = |m: usize, i: usize, j: usize| {
        let s = t.level_size(m);
        NCPolynomial::generator(&al, (off[m - 1] + i * s + j) as u32)
    };
    let mut p = Presentation::new(&al);
    for m in 1..=n {
        let ids: Vec<u32> = (off[m - 1]..off[m]).map(|g| g as u32).collect();
        p.add_block(MagicBlock::of_generators(format!("L{m}"), &al, &ids)?)?;
    }
    for m in 1..n {
        let s = t.level_size(m);
        for i in 0..s {
            for j in 0..s {
                for &c in t.children(m, j) {
                    let mut r = gen(m, i, j);
                    for &ch in t.children(m, i) {
                        r = &r - &gen(m + 1, ch, c);
                    }
                    p.add_relation(r)?;
                }
            }
        }
    }
    Ok(p
        .with_provenance("tree_diagram", &format!("{} {n}", t.canonical_text()))
        .with_meta("levels", n.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CantorForm {
    Raw,
    Reduced,
}

/// Multi-index of vertex `v` at `level` in the binary tree: digits 1/2,
/// most significant first.
pub fn binary_multi_index(level: usize, v: usize) -> String {
    (0..level)
        .rev()
        .map(|b| if (v >> b) & 1 == 0 { '1' } else { '2' })
        .collect()
}

fn cantor_raw(n: usize) -> Result<Presentation> {
    let t = TreeDiagram::binary(n);
    let tree = tree_diagram_presentation(&t, n)?;
    let names = (1..=n).flat_map(|m| {
        let s = 1usize << m;
        (0..s).flat_map(move |i| {
            (0..s).map(move |j| format!("a[{},{}]", binary_multi_index(m, i), binary_multi_index(m, j)))
        })
    });
    let al = Alphabet::selfadjoint(names)?;
    let images: Vec<NCPolynomial> = (0..al.len() as u32).map(|g| NCPolynomial::generator(&al, g)).collect();
    let mut p = Presentation::new(&al);
    for b in tree.blocks() {
        let entries = b.entries().iter().map(|e| e.substitute(&images)).collect::<Result<Vec<_>>>()?;
        p.add_block(MagicBlock::new(b.label.clone(), b.size, entries)?)?;
    }
    for r in tree.relations().iter() {
        p.add_relation(r.substitute(&images)?)?;
    }
    Ok(p)
}

/// Reduced Cantor tower data: the alphabet and, for each level `m`, the
/// `2^m × 2^m` block of affine entries.
struct ReducedTower {
    alphabet: Arc<Alphabet>,
    blocks: Vec<Vec<Vec<NCPolynomial>>>,
    /// `(chosen subprojection, parent entry)` for levels ≥ 2.
    choices: Vec<(NCPolynomial, NCPolynomial)>,
}

fn reduced_names(n: usize) -> Vec<String> {
    let mut names = vec!["p".to_string()];
    if n >= 2 {
        names.extend((1..=4).map(|k| format!("q{k}")));
    }
    for m in 3..=n {
        let s = 1usize << (m - 1);
        for i in 0..s {
            for j in 0..s {
                names.push(format!("x[{},{}]", binary_multi_index(m - 1, i), binary_multi_index(m - 1, j)));
            }
        }
    }
    names
}

fn reduced_tower(n: usize) -> Result<ReducedTower> {
    let al = Alphabet::selfadjoint(reduced_names(n))?;
    let one = NCPolynomial::one(&al);
    let p = NCPolynomial::generator(&al, 0);
    let pc = &one - &p;
    let mut blocks = vec![vec![vec![p.clone(), pc.clone()], vec![pc.clone(), p]]];
    let mut choices = Vec::new();
    let mut next_gen = 1u32;
    for m in 2..=n {
        let parent = &blocks[m - 2];
        let s = parent.len();
        let mut block = vec![vec![NCPolynomial::zero(&al); 2 * s]; 2 * s];
        for i in 0..s {
            for j in 0..s {
                let x = NCPolynomial::generator(&al, next_gen);
                next_gen += 1;
                let e = &parent[i][j];
                let rest = e - &x;
                for a in 0..2 {
                    for b in 0..2 {
                        block[2 * i + a][2 * j + b] = if a == b { x.clone() } else { rest.clone() };
                    }
                }
                choices.push((x, e.clone()));
            }
        }
        blocks.push(block);
    }
    Ok(ReducedTower {
        alphabet: al,
        blocks,
        choices,
    })
}

fn cantor_reduced(n: usize) -> Result<Presentation> {
    let tower = reduced_tower(n)?;
    let mut p = Presentation::new(&tower.alphabet);
    for (x, e) in &tower.choices {
        p.add_relation(&(x * x) - x)?;
        p.add_relation(&(x * e) - x)?;
        p.add_relation(&(e * x) - x)?;
    }
    for (m, b) in tower.blocks.iter().enumerate() {
        let size = b.len();
        p.add_block(MagicBlock::new(format!("L{}", m + 1), size, b.concat())?)?;
    }
    Ok(p)
}

/// Level `n` of the Cantor tower. The raw form is the binary tree
/// presentation with multi-index names; the reduced form keeps one free
/// subprojection per entry of the previous level.
pub fn cantor_level_presentation(n: usize, form: CantorForm) -> Result<Presentation> {
    if n < 1 {
        return Err(Error::InvalidInput("cantor level needs n >= 1".into()));
    }
    let (p, name) = match form {
        CantorForm::Raw => (cantor_raw(n)?, "cantor_raw"),
        CantorForm::Reduced => (cantor_reduced(n)?, "cantor_reduced"),
    };
    Ok(p.with_provenance(name, &n.to_string()).with_meta("levels", n.to_string()))
}

/// Image of every raw level-`n` generator as an affine expression in the
/// reduced generators (the matching entry of the reduced blocks).
pub fn cantor_raw_images(n: usize) -> Result<(Arc<Alphabet>, Vec<NCPolynomial>)> {
    if n < 1 {
        return Err(Error::InvalidInput("cantor level needs n >= 1".into()));
    }
    let tower = reduced_tower(n)?;
    let images = tower.blocks.iter().flat_map(|b| b.iter().flatten().cloned()).collect();
    Ok((tower.alphabet, images))
}

fn limit_name(path: &[u8]) -> String {
    let mut s = String::from("p");
    s.extend(path.iter().map(|d| char::from(b'0' + d)));
    s
}

/// Projections `p` and `p_{m₁…m_k}` (`k ≤ depth`, `mᵢ ∈ 1..=4`) with
/// children 1, 2 below their parent and children 3, 4 below its complement.
pub fn cantor_limit_presentation(depth: usize) -> Result<Presentation> {
    if depth < 1 {
        return Err(Error::InvalidInput("depth must be >= 1".into()));
    }
    let mut paths: Vec<Vec<u8>> = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..depth {
        let mut next = Vec::new();
        for path in &frontier {
            for d in 1..=4u8 {
                let mut c: Vec<u8> = path.clone();
                c.push(d);
                next.push(c);
            }
        }
        paths.extend(next.iter().cloned());
        frontier = next;
    }
    let al = Alphabet::selfadjoint(paths.iter().map(|p| limit_name(p)))?;
    let one = NCPolynomial::one(&al);
    let mut pres = Presentation::new(&al);
    for (g, path) in paths.iter().enumerate() {
        let x = NCPolynomial::generator(&al, g as u32);
        pres.add_relation(&(&x * &x) - &x)?;
        if let Some((&last, parent)) = path.split_last() {
            let e = NCPolynomial::generator(&al, al.id(&limit_name(parent))?);
            let bound = if last <= 2 { e } else { &one - &e };
            pres.add_relation(&(&x * &bound) - &x)?;
            pres.add_relation(&(&bound * &x) - &x)?;
        }
    }
    Ok(pres
        .with_provenance("cantor_limit", &depth.to_string())
        .with_meta("depth", depth.to_string()))
}

/// A morphism between consecutive levels, given on generators. Every image
/// is a sum of target generators with coefficient 1 plus a constant.
#[derive(Clone, Debug)]
pub struct ConnectingMap {
    source: Arc<Alphabet>,
    target: Arc<Alphabet>,
    images: Vec<NCPolynomial>,
}

impl ConnectingMap {
    pub fn new(source: &Arc<Alphabet>, target: &Arc<Alphabet>, images: Vec<NCPolynomial>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::InvalidInput(format!(
                "{} images for {} generators",
                images.len(),
                source.len()
            )));
        }
        for (g, img) in images.iter().enumerate() {
            if !same_alphabet(img.alphabet(), target) {
                return Err(Error::UniverseMismatch);
            }
            let affine = img
                .terms()
                .all(|(w, c)| w.is_empty() || (w.len() == 1 && !w.letters()[0].star && c.is_one()));
            if !affine {
                return Err(Error::InvalidInput(format!(
                    "image of `{}` is not a sum of generators plus a constant: {img}",
                    source.name(g as u32)
                )));
            }
        }
        Ok(ConnectingMap {
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    /// Sends each source generator to the target generator of the same name.
    pub fn by_name(source: &Arc<Alphabet>, target: &Arc<Alphabet>) -> Result<Self> {
        let images = source
            .symbols()
            .iter()
            .map(|s| Ok(NCPolynomial::generator(target, target.id(&s.name)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, images)
    }

    /// Refinement from the level-`k` to the level-`k + 1` tree presentation:
    /// lower levels map to themselves and the top block is expanded by the
    /// interleaving formula at the first child of each column vertex.
    pub fn tree_refinement(t: &TreeDiagram, k: usize, source: &Presentation, target: &Presentation) -> Result<Self> {
        if k < 1 || k >= t.depth() {
            return Err(Error::InvalidInput(format!("no refinement from level {k}")));
        }
        let src = source.alphabet();
        let tgt = target.alphabet();
        let s = t.level_size(k);
        let images = src
            .symbols()
            .iter()
            .map(|sym| {
                let prefix = format!("a{k}[");
                if let Some(rest) = sym.name.strip_prefix(&prefix) {
                    let (i, j) = parse_pair(rest).ok_or_else(|| Error::InvalidInput(sym.name.clone()))?;
                    if i == 0 || j == 0 || i > s || j > s {
                        return Err(Error::InvalidInput(sym.name.clone()));
                    }
                    let c = t.children(k, j - 1)[0];
                    let mut img = NCPolynomial::zero(tgt);
                    for &r in t.children(k, i - 1) {
                        let name = format!("a{}[{},{}]", k + 1, r + 1, c + 1);
                        img = &img + &NCPolynomial::generator(tgt, tgt.id(&name)?);
                    }
                    Ok(img)
                } else {
                    Ok(NCPolynomial::generator(tgt, tgt.id(&sym.name)?))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(src, tgt, images)
    }

    pub fn source(&self) -> &Arc<Alphabet> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Alphabet> {
        &self.target
    }

    pub fn images(&self) -> &[NCPolynomial] {
        &self.images
    }

    pub fn apply(&self, p: &NCPolynomial) -> Result<NCPolynomial> {
        if !same_alphabet(p.alphabet(), &self.source) {
            return Err(Error::UniverseMismatch);
        }
        p.substitute(&self.images)
    }

    /// Composite `other ∘ self`.
    pub fn then(&self, other: &ConnectingMap) -> Result<ConnectingMap> {
        if !same_alphabet(&self.target, &other.source) {
            return Err(Error::UniverseMismatch);
        }
        let images = self.images.iter().map(|i| other.apply(i)).collect::<Result<Vec<_>>>()?;
        Ok(ConnectingMap {
            source: self.source.clone(),
            target: other.target.clone(),
            images,
        })
    }
}

fn parse_pair(s: &str) -> Option<(usize, usize)> {
    let inner = s.strip_suffix(']')?;
    let (a, b) = inner.split_once(',')?;
    Some((a.parse().ok()?, b.parse().ok()?))
}

/// Colimit of a chain of presentations. Each map is checked by pushing every
/// source relation forward and reducing it modulo the target relations at
/// degree 4; a nonzero residue rejects the map. The result lives on the last
/// level's generators and carries every level's relations and blocks pushed
/// forward.
pub fn inductive_limit_assemble(levels: &[Presentation], maps: &[ConnectingMap]) -> Result<Presentation> {
    if levels.is_empty() {
        return Err(Error::InvalidInput("no levels".into()));
    }
    if maps.len() + 1 != levels.len() {
        return Err(Error::InvalidInput(format!(
            "{} levels need {} maps, got {}",
            levels.len(),
            levels.len() - 1,
            maps.len()
        )));
    }
    for (k, m) in maps.iter().enumerate() {
        if !same_alphabet(m.source(), levels[k].alphabet()) || !same_alphabet(m.target(), levels[k + 1].alphabet()) {
            return Err(Error::UniverseMismatch);
        }
        let mut sys = RewriteSystem::from_presentation(&levels[k + 1]);
        for r in levels[k].relations().iter() {
            let image = m.apply(r)?;
            let res = sys.reduce(&image, MAP_CHECK_DEGREE.max(image.degree().unwrap_or(0)))?;
            if !res.is_zero {
                return Err(Error::MapRejected {
                    level: k,
                    relation: r.to_string(),
                    residual: res.normal_form.to_string(),
                });
            }
        }
    }
    let last = levels.last().unwrap();
    let al = last.alphabet().clone();
    // to_last[k]: level k -> last level
    let mut to_last: Vec<Option<ConnectingMap>> = vec![None; levels.len()];
    for k in (0..maps.len()).rev() {
        to_last[k] = Some(match &to_last[k + 1] {
            Some(rest) => maps[k].then(rest)?,
            None => maps[k].clone(),
        });
    }
    let mut out = Presentation::new(&al);
    for (k, lvl) in levels.iter().enumerate() {
        let push = |p: &NCPolynomial| match &to_last[k] {
            Some(m) => m.apply(p),
            None => Ok(p.clone()),
        };
        for b in lvl.blocks() {
            let entries = b.entries().iter().map(push).collect::<Result<Vec<_>>>()?;
            let label = format!("S{}.{}", k + 1, b.label);
            out.add_block(MagicBlock::new(label, b.size, entries)?)?;
        }
        for r in lvl.relations().iter() {
            let img = push(r)?;
            if !img.is_zero() {
                out.add_relation(img)?;
            }
        }
    }
    let sizes: Vec<String> = levels.iter().map(|l| l.alphabet().len().to_string()).collect();
    let input: Vec<String> = levels
        .iter()
        .map(|l| l.provenance.as_ref().map_or("?".to_string(), |p| p.input_hash.clone()))
        .collect();
    Ok(out
        .with_provenance("inductive_limit", &input.join(","))
        .with_meta("levels", levels.len().to_string())
        .with_meta("level_generators", sizes.join(",")))
}

/// Levels `1..=depth` of a tree diagram joined by refinement maps.
pub fn tree_inductive_system(t: &TreeDiagram, depth: usize) -> Result<(Vec<Presentation>, Vec<ConnectingMap>)> {
    let levels = (1..=depth)
        .map(|k| tree_diagram_presentation(t, k))
        .collect::<Result<Vec<_>>>()?;
    let maps = (1..depth)
        .map(|k| ConnectingMap::tree_refinement(t, k, &levels[k - 1], &levels[k]))
        .collect::<Result<Vec<_>>>()?;
    Ok((levels, maps))
}

/// Whether `p` vanishes modulo `pres` within the degree bound.
pub fn vanishes(p: &NCPolynomial, pres: &Presentation, degree_bound: usize) -> Result<bool> {
    Ok(reduce(p, pres.relations(), degree_bound)?.is_zero)
}
