//! Coefficient comparison for isometric coactions on the interval and the
//! circle, followed by the positivity rule.
//!
//! On `[0,1]` with coordinate `T` the coaction is `α(T) = Σ_{n≤N} Tⁿ ⊗ qₙ`
//! with selfadjoint `qₙ`. On the circle with coordinate `Z` it is
//! `α(Z) = Σ_{n≤N} Zⁿ ⊗ qₙ + Σ_{1≤n≤N} Z*ⁿ ⊗ q'ₙ`. Invariance of the squared
//! distance `d²` under `α⁽²⁾ = (id ⊗ id ⊗ m) ∘ flip ∘ (α ⊗ α)` is expanded
//! and compared coefficient by coefficient. Only coefficients untouched by
//! the cutoff `N` are emitted: both exponents must be at most `N − 1` in
//! absolute value.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ncstar::{positivity_simplify, Alphabet, NCPolynomial, RelationSet, RewriteSystem};
use crate::rational::{q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    Interval,
    Circle,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceKind::Interval => "interval",
            SpaceKind::Circle => "circle",
        })
    }
}

/// Truncated coaction series with coefficient generators `q0..qN` (and
/// `q'1..q'N` on the circle).
#[derive(Clone, Debug)]
pub struct GeneratingSeries {
    kind: SpaceKind,
    bound: usize,
    alphabet: Arc<Alphabet>,
}

impl GeneratingSeries {
    pub fn new(kind: SpaceKind, bound: usize) -> Result<Self> {
        if bound < 2 {
            return Err(Error::InvalidInput(format!("series bound must be >= 2, got {bound}")));
        }
        let alphabet = match kind {
            SpaceKind::Interval => Alphabet::selfadjoint((0..=bound).map(|n| format!("q{n}")))?,
            SpaceKind::Circle => Alphabet::new(
                (0..=bound)
                    .map(|n| (format!("q{n}"), false))
                    .chain((1..=bound).map(|n| (format!("q'{n}"), false))),
            )?,
        };
        Ok(GeneratingSeries { kind, bound, alphabet })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// Coefficient of the `k`-th power of the coordinate in `α`; negative
    /// `k` (circle only) stands for powers of the adjoint.
    pub fn coefficient(&self, k: i64) -> NCPolynomial {
        let n = k.unsigned_abs() as usize;
        if n > self.bound || (k < 0 && self.kind == SpaceKind::Interval) {
            return NCPolynomial::zero(&self.alphabet);
        }
        let id = if k >= 0 { n } else { self.bound + n };
        NCPolynomial::generator(&self.alphabet, id as u32)
    }

    fn exponent_range(&self) -> std::ops::RangeInclusive<i64> {
        let m = self.bound as i64 - 1;
        match self.kind {
            SpaceKind::Interval => 0..=m,
            SpaceKind::Circle => -m..=m,
        }
    }
}

/// Coefficient of `xʲ ⊗ xᵏ` in `α⁽²⁾(d²) − d² ⊗ 1`, for every pair with
/// `|j|, |k| ≤ N − 1`, before normalization. Zero coefficients are kept.
pub fn coefficient_relations(s: &GeneratingSeries) -> BTreeMap<(i64, i64), NCPolynomial> {
    let al = s.alphabet();
    let c = |k: i64| s.coefficient(k);
    let one = NCPolynomial::one(al);
    let mut out = BTreeMap::new();
    for j in s.exponent_range() {
        for k in s.exponent_range() {
            let rel = match s.kind {
                SpaceKind::Interval => {
                    // d² = T² ⊗ 1 − 2 T ⊗ T + 1 ⊗ T²
                    let square = |e: i64| {
                        let mut acc = NCPolynomial::zero(al);
                        for a in 0..=e {
                            acc = &acc + &(&c(a) * &c(e - a));
                        }
                        acc
                    };
                    let mut r = (&c(j) * &c(k)).scale(&q(-2));
                    if k == 0 {
                        r = &r + &square(j);
                    }
                    if j == 0 {
                        r = &r + &square(k);
                    }
                    let classical = match (j, k) {
                        (2, 0) | (0, 2) => q(1),
                        (1, 1) => q(-2),
                        _ => Q::zero(),
                    };
                    &r - &one.scale(&classical)
                }
                SpaceKind::Circle => {
                    // d² = 2 ⊗ 1 − Z ⊗ Z* − Z* ⊗ Z; the constant cancels
                    let r = &(&c(j) * &c(-k).nc_star()) + &(&c(-j).nc_star() * &c(k));
                    let classical = if (j, k) == (1, -1) || (j, k) == (-1, 1) {
                        q(1)
                    } else {
                        Q::zero()
                    };
                    &one.scale(&classical) - &r
                }
            };
            out.insert((j, k), rel);
        }
    }
    out
}

/// Canonical relation set of all nonzero truncation-safe coefficients.
pub fn expand_isometry_relations(s: &GeneratingSeries) -> RelationSet {
    let mut set = RelationSet::new(s.alphabet());
    for (_, r) in coefficient_relations(s) {
        set.insert(r).expect("same alphabet");
    }
    set
}

/// Positivity rule followed by interreduction of the result.
pub fn derive_conclusions(r: &RelationSet, _kind: SpaceKind) -> RelationSet {
    let simplified = positivity_simplify(r);
    let mut sys = RewriteSystem::new(&simplified);
    sys.complete_to(2);
    sys.rules_as_relations()
}
