//! Contraction paths on [0,1] of the two closed forms (x+r)/2^l and s/2^l,
//! with exact composition and oscillation.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::dyadic::{BigNat, Dyadic};
use crate::error::{Error, Result};

/// Exact affine or constant self-map of [0,1].
///
/// `Affine { r, l }` is x ↦ (x+r)/2^l with 0 ≤ r ≤ 2^l − 1, so its range is
/// [r/2^l, (r+1)/2^l] ⊆ [0,1]. `Constant(c)` is x ↦ c with c ∈ [0,1].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DyadicPath {
    Affine { r: BigUint, l: u32 },
    Constant(Dyadic),
}

impl DyadicPath {
    pub fn affine(r: u64, l: u32) -> Result<Self> {
        Self::affine_big(BigUint::from(r), l)
    }

    pub fn affine_big(r: BigUint, l: u32) -> Result<Self> {
        let bound = BigUint::one() << l as usize;
        if r >= bound {
            return Err(Error::OutOfRange(format!(
                "affine path needs 0 <= r <= 2^l - 1, got r = {r}, l = {l}"
            )));
        }
        Ok(DyadicPath::Affine { r, l })
    }

    pub fn constant(c: Dyadic) -> Result<Self> {
        if !c.in_unit_interval() {
            return Err(Error::OutOfRange(format!(
                "constant path value {c} outside [0,1]"
            )));
        }
        Ok(DyadicPath::Constant(c))
    }

    /// x ↦ x, the identity, as Affine(0, 0). Violates the single-stage
    /// oscillation bound; used only to build counterexamples.
    pub fn identity() -> Self {
        DyadicPath::Affine {
            r: BigUint::zero(),
            l: 0,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, DyadicPath::Constant(_))
    }

    /// Exact evaluation at a dyadic point of [0,1].
    pub fn evaluate(&self, x: &Dyadic) -> Result<Dyadic> {
        if !x.in_unit_interval() {
            return Err(Error::OutOfRange(format!("path argument {x} outside [0,1]")));
        }
        Ok(match self {
            DyadicPath::Affine { r, l } => x
                .add(&Dyadic::new(BigInt::from(r.clone()), 0))
                .shr(*l),
            DyadicPath::Constant(c) => c.clone(),
        })
    }

    /// sup_{x,y} |ξ(x) − ξ(y)|: exactly 2^{−l} for affine, 0 for constants.
    pub fn oscillation(&self) -> Dyadic {
        match self {
            DyadicPath::Affine { l, .. } => Dyadic::pow2(*l),
            DyadicPath::Constant(_) => Dyadic::zero(),
        }
    }

    /// Exact composition self∘outer (apply `outer` first). The two closed
    /// forms are closed under composition:
    /// Affine(r₁,l₁)∘Affine(r₂,l₂) = Affine(r₂ + r₁·2^{l₂}, l₁+l₂).
    pub fn compose(&self, outer: &DyadicPath) -> DyadicPath {
        match (self, outer) {
            (DyadicPath::Constant(c), _) => DyadicPath::Constant(c.clone()),
            (inner, DyadicPath::Constant(c)) => {
                DyadicPath::Constant(inner.evaluate(c).expect("constant path value in [0,1]"))
            }
            (
                DyadicPath::Affine { r: r1, l: l1 },
                DyadicPath::Affine { r: r2, l: l2 },
            ) => DyadicPath::Affine {
                r: r2 + (r1 << *l2 as usize),
                l: l1 + l2,
            },
        }
    }
}

impl fmt::Display for DyadicPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DyadicPath::Affine { r, l } => write!(f, "(x+{r})/2^{l}"),
            DyadicPath::Constant(c) => write!(f, "const {c}"),
        }
    }
}

/// Ordered list of (path, multiplicity): one connecting-stage's paths with
/// the ξ̄ expansion (each path repeated N times, in order).
#[derive(Clone, Debug, PartialEq)]
pub struct PathList {
    entries: Vec<(DyadicPath, BigNat)>,
}

impl PathList {
    pub fn new(entries: Vec<(DyadicPath, BigNat)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty("path list with no entries".into()));
        }
        if entries.iter().any(|(_, n)| n.is_zero()) {
            return Err(Error::OutOfRange("path multiplicities must be >= 1".into()));
        }
        Ok(PathList { entries })
    }

    pub fn from_unit(paths: Vec<DyadicPath>) -> Result<Self> {
        Self::new(paths.into_iter().map(|p| (p, BigNat::one())).collect())
    }

    pub fn entries(&self) -> &[(DyadicPath, BigNat)] {
        &self.entries
    }

    /// Σ N_r, the total block multiplicity l of the stage.
    pub fn total_multiplicity(&self) -> BigNat {
        self.entries.iter().map(|(_, n)| n).sum()
    }

    pub fn max_oscillation(&self) -> Dyadic {
        self.entries
            .iter()
            .map(|(p, _)| p.oscillation())
            .max()
            .unwrap_or_else(Dyadic::zero)
    }

    /// The ξ̄ expansion: each path repeated according to its multiplicity.
    /// Refuses expansions beyond `budget` entries.
    pub fn expand_bar(&self, budget: usize) -> Result<Vec<DyadicPath>> {
        let total = self.total_multiplicity();
        let total = total.to_usize().ok_or_else(|| Error::DimOverflow(
            "path expansion does not fit a machine word".into(),
        ))?;
        if total > budget {
            return Err(Error::Budget {
                dim: total,
                budget,
            });
        }
        let mut out = Vec::with_capacity(total);
        for (p, n) in &self.entries {
            let n = n.to_usize().unwrap();
            for _ in 0..n {
                out.push(p.clone());
            }
        }
        Ok(out)
    }
}

/// Serialization format for paths in config JSON.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum PathJson {
    #[serde(rename = "affine")]
    Affine { r: u64, l: u32 },
    #[serde(rename = "constant")]
    Constant { num: i64, exp: u32 },
}

impl PathJson {
    pub fn to_path(&self) -> Result<DyadicPath> {
        match self {
            PathJson::Affine { r, l } => DyadicPath::affine(*r, *l),
            PathJson::Constant { num, exp } => {
                DyadicPath::constant(Dyadic::from_ratio(*num, *exp))
            }
        }
    }

    pub fn from_path(p: &DyadicPath) -> Result<Self> {
        Ok(match p {
            DyadicPath::Affine { r, l } => PathJson::Affine {
                r: r.to_u64().ok_or_else(|| {
                    Error::DimOverflow("affine offset too large for config JSON".into())
                })?,
                l: *l,
            },
            DyadicPath::Constant(c) => PathJson::Constant {
                num: c.numerator().to_i64().ok_or_else(|| {
                    Error::DimOverflow("constant numerator too large for config JSON".into())
                })?,
                exp: c.exponent(),
            },
        })
    }
}
