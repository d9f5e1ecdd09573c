//! Maximal commutative quotient and its {0,1}-points.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Alphabet, NCPolynomial, Presentation, Word};
use crate::error::{Error, Result};
use crate::rational::{fmt_q, Q};

/// Sorted `(variable, exponent)` pairs.
pub type CommMonomial = Vec<(u32, u32)>;

fn mono_cmp(a: &CommMonomial, b: &CommMonomial) -> std::cmp::Ordering {
    let da: u32 = a.iter().map(|x| x.1).sum();
    let db: u32 = b.iter().map(|x| x.1).sum();
    da.cmp(&db).then_with(|| b.cmp(a))
}

/// Polynomial in commuting variables with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CommutativePoly {
    /// Ascending under the graded order; leading term last.
    terms: Vec<(CommMonomial, Q)>,
}

impl CommutativePoly {
    fn from_map(map: BTreeMap<CommMonomial, Q>) -> Self {
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| mono_cmp(&a.0, &b.0));
        CommutativePoly { terms }
    }

    pub fn terms(&self) -> &[(CommMonomial, Q)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn monic(mut self) -> Self {
        if let Some((_, lc)) = self.terms.last() {
            let inv = lc.recip();
            for t in &mut self.terms {
                t.1 = &t.1 * &inv;
            }
        }
        self
    }

    /// Value at a point given by variable values.
    pub fn eval(&self, values: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m {
                for _ in 0..e {
                    t *= &values[v as usize];
                }
            }
            acc += t;
        }
        acc
    }
}

impl PartialOrd for CommutativePoly {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CommutativePoly {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let mut a = self.terms.iter().rev();
        let mut b = other.terms.iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return std::cmp::Ordering::Equal,
                (None, Some(_)) => return std::cmp::Ordering::Less,
                (Some(_), None) => return std::cmp::Ordering::Greater,
                (Some(x), Some(y)) => {
                    let o = mono_cmp(&x.0, &y.0).then_with(|| x.1.cmp(&y.1));
                    if o != std::cmp::Ordering::Equal {
                        return o;
                    }
                }
            }
        }
    }
}

/// Commutative quotient of a presentation. Variables are the generators,
/// followed by one extra variable per non-selfadjoint generator standing for
/// its adjoint.
#[derive(Clone, Debug)]
pub struct CommutativePresentation {
    source: Arc<Alphabet>,
    star_var: Vec<Option<u32>>,
    var_names: Vec<String>,
    idempotent: Vec<bool>,
    relations: BTreeSet<CommutativePoly>,
}

impl CommutativePresentation {
    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn var_count(&self) -> usize {
        self.var_names.len()
    }

    pub fn idempotent(&self) -> &[bool] {
        &self.idempotent
    }

    pub fn relations(&self) -> impl Iterator<Item = &CommutativePoly> {
        self.relations.iter()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn source_alphabet(&self) -> &Arc<Alphabet> {
        &self.source
    }

    /// Whether a {0,1} (or rational) point satisfies every relation.
    pub fn satisfied_by(&self, values: &[Q]) -> bool {
        self.relations.iter().all(|r| r.eval(values).is_zero())
    }

    /// Variable carrying a letter of the source alphabet.
    pub fn var_of(&self, gen: u32, star: bool) -> u32 {
        if star {
            self.star_var[gen as usize].unwrap_or(gen)
        } else {
            gen
        }
    }

    /// Evaluates a noncommutative polynomial of the source alphabet at a
    /// point of the quotient.
    pub fn eval_nc(&self, p: &NCPolynomial, values: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (w, c) in p.terms() {
            let mut t = c.clone();
            for l in w.letters() {
                t *= &values[self.var_of(l.gen, l.star) as usize];
            }
            acc += t;
        }
        acc
    }

    fn fmt_mono(&self, m: &CommMonomial) -> String {
        m.iter()
            .map(|&(v, e)| {
                if e == 1 {
                    self.var_names[v as usize].clone()
                } else {
                    format!("{}^{}", self.var_names[v as usize], e)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for CommutativePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "variables {}", self.var_names.join(" "))?;
        let idem: Vec<&str> = self
            .var_names
            .iter()
            .zip(&self.idempotent)
            .filter(|(_, &i)| i)
            .map(|(n, _)| n.as_str())
            .collect();
        writeln!(f, "idempotent {}", idem.join(" "))?;
        writeln!(f, "relations {}", self.relations.len())?;
        for r in &self.relations {
            let mut s = String::new();
            for (i, (m, c)) in r.terms.iter().rev().enumerate() {
                let neg = c.is_negative();
                let abs = c.abs();
                s.push_str(match (i, neg) {
                    (0, true) => "-",
                    (0, false) => "",
                    (_, true) => " - ",
                    (_, false) => " + ",
                });
                if m.is_empty() {
                    s.push_str(&fmt_q(&abs));
                } else if abs.is_one() {
                    s.push_str(&self.fmt_mono(m));
                } else {
                    s.push_str(&format!("{} {}", fmt_q(&abs), self.fmt_mono(m)));
                }
            }
            writeln!(f, "{s} = 0")?;
        }
        Ok(())
    }
}

/// Words become monomials, exponents of idempotent generators collapse to 1
/// and adjoints of selfadjoint generators disappear.
pub fn abelianize(p: &Presentation) -> CommutativePresentation {
    let al = p.alphabet();
    let n = al.len();
    let mut star_var = vec![None; n];
    let mut var_names: Vec<String> = al.symbols().iter().map(|s| s.name.clone()).collect();
    for s in al.symbols() {
        if !s.selfadjoint {
            star_var[s.id as usize] = Some(var_names.len() as u32);
            var_names.push(format!("{}*", s.name));
        }
    }
    let mut idempotent = vec![false; var_names.len()];
    for g in 0..n as u32 {
        let x = NCPolynomial::generator(al, g);
        if p.relations().contains(&(&(&x * &x) - &x)) {
            idempotent[g as usize] = true;
            if let Some(v) = star_var[g as usize] {
                idempotent[v as usize] = true;
            }
        }
    }
    let to_mono = |w: &Word| -> CommMonomial {
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for l in w.letters() {
            let v = if l.star { star_var[l.gen as usize].unwrap() } else { l.gen };
            *counts.entry(v).or_default() += 1;
        }
        counts
            .into_iter()
            .map(|(v, e)| (v, if idempotent[v as usize] { 1 } else { e }))
            .collect()
    };
    let mut relations = BTreeSet::new();
    for r in p.relations().iter() {
        let mut map: BTreeMap<CommMonomial, Q> = BTreeMap::new();
        for (w, c) in r.terms() {
            *map.entry(to_mono(w)).or_insert_with(Q::zero) += c;
        }
        let cp = CommutativePoly::from_map(map);
        if !cp.is_zero() {
            relations.insert(cp.monic());
        }
    }
    CommutativePresentation {
        source: al.clone(),
        star_var,
        var_names,
        idempotent,
        relations,
    }
}

struct IntRelation {
    constant: i128,
    monos: Vec<(Vec<u32>, i128)>,
}

fn to_int_relation(r: &CommutativePoly) -> Result<IntRelation> {
    let mut lcm = BigInt::one();
    for (_, c) in &r.terms {
        lcm = lcm.lcm(c.denom());
    }
    let conv = |c: &Q| -> Result<i128> {
        let v = (c * Q::from_integer(lcm.clone())).to_integer();
        v.to_i128().ok_or(Error::Overflow)
    };
    let mut constant = 0i128;
    let mut monos = Vec::new();
    for (m, c) in &r.terms {
        let c = conv(c)?;
        if m.is_empty() {
            constant += c;
        } else {
            monos.push((m.iter().map(|x| x.0).collect(), c));
        }
    }
    Ok(IntRelation { constant, monos })
}

/// Pseudo-boolean search state: bound propagation over multilinear
/// relations with per-variable lookahead on a single relation.
struct Solver {
    rels: Vec<IntRelation>,
    occurs: Vec<Vec<usize>>,
    value: Vec<i8>,
    trail: Vec<u32>,
    in_queue: Vec<bool>,
    scratch: Vec<[i128; 4]>,
    touched: Vec<u32>,
    is_touched: Vec<bool>,
    solutions: Vec<Vec<u8>>,
}

impl Solver {
    fn assign(&mut self, v: u32, val: i8, queue: &mut VecDeque<usize>) {
        self.value[v as usize] = val;
        self.trail.push(v);
        for &r in &self.occurs[v as usize] {
            if !self.in_queue[r] {
                self.in_queue[r] = true;
                queue.push_back(r);
            }
        }
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let v = self.trail.pop().unwrap();
            self.value[v as usize] = -1;
        }
    }

    /// Returns false on conflict.
    fn propagate(&mut self, mut queue: VecDeque<usize>) -> bool {
        let mut ok = true;
        while let Some(ri) = queue.pop_front() {
            self.in_queue[ri] = false;
            if !ok {
                continue;
            }
            let mut lo = self.rels[ri].constant;
            let mut hi = lo;
            for (vars, c) in &self.rels[ri].monos {
                let mut open = 0;
                let mut zero = false;
                for &v in vars {
                    match self.value[v as usize] {
                        0 => {
                            zero = true;
                            break;
                        }
                        1 => {}
                        _ => open += 1,
                    }
                }
                if zero {
                    continue;
                }
                if open == 0 {
                    lo += c;
                    hi += c;
                    continue;
                }
                let (mn, mx) = ((*c).min(0), (*c).max(0));
                lo += mn;
                hi += mx;
                for &v in vars {
                    if self.value[v as usize] == -1 {
                        if !self.is_touched[v as usize] {
                            self.is_touched[v as usize] = true;
                            self.touched.push(v);
                        }
                        let s = &mut self.scratch[v as usize];
                        s[0] -= mn;
                        s[1] -= mx;
                        if open == 1 {
                            s[2] += c - mn;
                            s[3] += c - mx;
                        }
                    }
                }
            }
            let touched = std::mem::take(&mut self.touched);
            if lo > 0 || hi < 0 {
                ok = false;
            }
            let mut forced = Vec::new();
            for &v in &touched {
                let s = std::mem::take(&mut self.scratch[v as usize]);
                self.is_touched[v as usize] = false;
                if !ok {
                    continue;
                }
                let ok0 = lo + s[0] <= 0 && 0 <= hi + s[1];
                let ok1 = lo + s[2] <= 0 && 0 <= hi + s[3];
                match (ok0, ok1) {
                    (false, false) => ok = false,
                    (false, true) => forced.push((v, 1)),
                    (true, false) => forced.push((v, 0)),
                    _ => {}
                }
            }
            self.touched = touched;
            self.touched.clear();
            if ok {
                for (v, val) in forced {
                    if self.value[v as usize] == -1 {
                        self.assign(v, val, &mut queue);
                    }
                }
            }
        }
        ok
    }

    fn search(&mut self, from: usize) {
        let Some(v) = (from..self.value.len()).find(|&v| self.value[v] == -1) else {
            self.solutions.push(self.value.iter().map(|&x| x as u8).collect());
            return;
        };
        for val in [0i8, 1] {
            let mark = self.trail.len();
            let mut queue = VecDeque::new();
            self.assign(v as u32, val, &mut queue);
            if self.propagate(queue) {
                self.search(v + 1);
            }
            self.undo_to(mark);
        }
    }
}

/// All {0,1} points of a commutative presentation whose variables are all
/// idempotent, sorted lexicographically.
pub fn zero_one_solutions(c: &CommutativePresentation) -> Result<Vec<Vec<u8>>> {
    if let Some(i) = c.idempotent.iter().position(|&b| !b) {
        return Err(Error::InvalidInput(format!(
            "variable `{}` is not idempotent",
            c.var_names[i]
        )));
    }
    let rels: Vec<IntRelation> = c.relations.iter().map(to_int_relation).collect::<Result<_>>()?;
    let nv = c.var_count();
    let mut occurs = vec![Vec::new(); nv];
    for (i, r) in rels.iter().enumerate() {
        let mut vs: Vec<u32> = r.monos.iter().flat_map(|m| m.0.iter().copied()).collect();
        vs.sort_unstable();
        vs.dedup();
        for v in vs {
            occurs[v as usize].push(i);
        }
    }
    let nr = rels.len();
    let mut solver = Solver {
        rels,
        occurs,
        value: vec![-1; nv],
        trail: Vec::new(),
        in_queue: vec![false; nr],
        scratch: vec![[0; 4]; nv],
        touched: Vec::new(),
        is_touched: vec![false; nv],
        solutions: Vec::new(),
    };
    // Constant relations and relations with a single open variable are
    // settled before branching.
    let queue: VecDeque<usize> = (0..nr).collect();
    solver.in_queue.iter_mut().for_each(|b| *b = true);
    if solver.propagate(queue) {
        solver.search(0);
    }
    let mut sols = solver.solutions;
    sols.sort();
    Ok(sols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncstar::MagicBlock;

    fn projection(names: &[&str]) -> Presentation {
        let al = Alphabet::selfadjoint(names.iter().copied()).unwrap();
        let mut p = Presentation::new(&al);
        for n in names {
            let x = p.generator(n).unwrap();
            p.add_relation(&(&x * &x) - &x).unwrap();
        }
        p
    }

    #[test]
    fn single_projection_has_two_characters() {
        let c = abelianize(&projection(&["p"]));
        assert_eq!(c.relation_count(), 0);
        assert_eq!(zero_one_solutions(&c).unwrap(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn magic_unitary_three_gives_permutations() {
        let names: Vec<String> = (0..9).map(|i| format!("q{i}")).collect();
        let al = Alphabet::selfadjoint(names).unwrap();
        let mut p = Presentation::new(&al);
        p.add_block(MagicBlock::of_generators("U", &al, &(0..9).collect::<Vec<_>>()).unwrap())
            .unwrap();
        let sols = zero_one_solutions(&abelianize(&p)).unwrap();
        assert_eq!(sols.len(), 6);
        for s in &sols {
            for i in 0..3 {
                assert_eq!(s[3 * i..3 * i + 3].iter().map(|&x| x as u32).sum::<u32>(), 1);
            }
        }
    }

    #[test]
    fn non_idempotent_generators_are_rejected() {
        let al = Alphabet::selfadjoint(["x"]).unwrap();
        let p = Presentation::new(&al);
        assert!(zero_one_solutions(&abelianize(&p)).is_err());
    }

    #[test]
    fn propagation_handles_weighted_sums() {
        // 2a + b + c = 2 over {0,1}: a=1,b=c=0 or a=0,b=c=1.
        let mut p = projection(&["a", "b", "c"]);
        p.add_relation(p.parse_poly("2 a + b + c - 2").unwrap()).unwrap();
        let sols = zero_one_solutions(&abelianize(&p)).unwrap();
        assert_eq!(sols, vec![vec![0, 1, 1], vec![1, 0, 0]]);
    }

    #[test]
    fn abelianized_products_commute() {
        let mut p = projection(&["a", "b"]);
        p.add_relation(p.parse_poly("a b - b a").unwrap()).unwrap();
        p.add_relation(p.parse_poly("a b a - b").unwrap()).unwrap();
        let c = abelianize(&p);
        // a b a - b becomes a b - b; the commutator vanishes.
        assert_eq!(c.relation_count(), 1);
        assert_eq!(zero_one_solutions(&c).unwrap(), vec![vec![0, 0], vec![1, 0], vec![1, 1]]);
    }
}
