//! Piecewise-linear matrix-valued functions on [0,1] with exact dyadic
//! breakpoints: a computable dense subclass of C([0,1], M_n) closed under
//! composition with the contraction paths, with exact Lipschitz tracking.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::numerics::{kron, spectral_norm, CMatrix, Cx};
use crate::paths::DyadicPath;

/// Membership class LB_i: Lipschitz constant strictly below γ^i.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LipschitzClass {
    pub gamma: f64,
    pub level: u32,
}

impl LipschitzClass {
    pub fn new(gamma: f64, level: u32) -> Result<Self> {
        if !(gamma > 1.0 && gamma < 2.0) {
            return Err(Error::OutOfRange(format!(
                "gamma must lie in (1,2), got {gamma}"
            )));
        }
        Ok(LipschitzClass { gamma, level })
    }

    pub fn bound(&self) -> f64 {
        self.gamma.powi(self.level as i32)
    }

    pub fn contains(&self, f: &PLMatrixFunction) -> bool {
        f.lipschitz_constant() < self.bound()
    }
}

/// Piecewise-linear M_n-valued function: values at strictly increasing
/// dyadic breakpoints (first 0, last 1), linear in between.
///
/// `approx_error` carries a sup-norm bound on the distance to the function
/// this object stands in for; it is 0 for exact constructions and grows
/// only through products, which are piecewise-quadratic and re-interpolated.
#[derive(Clone, Debug)]
pub struct PLMatrixFunction {
    n: usize,
    breakpoints: Vec<Dyadic>,
    values: Vec<CMatrix>,
    approx_error: f64,
}

impl PLMatrixFunction {
    pub fn new(breakpoints: Vec<Dyadic>, values: Vec<CMatrix>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::Shape("need at least two breakpoints".into()));
        }
        if breakpoints.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} breakpoints vs {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != Dyadic::zero() || *breakpoints.last().unwrap() != Dyadic::one() {
            return Err(Error::OutOfRange(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::OutOfRange(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        let n = values[0].rows();
        if values.iter().any(|v| v.rows() != n || v.cols() != n) {
            return Err(Error::Shape("all values must be n x n".into()));
        }
        Ok(PLMatrixFunction {
            n,
            breakpoints,
            values,
            approx_error: 0.0,
        })
    }

    pub fn constant(value: CMatrix) -> Result<Self> {
        Self::new(vec![Dyadic::zero(), Dyadic::one()], vec![value.clone(), value])
    }

    /// The linear function x ↦ (1−x)·v0 + x·v1.
    pub fn from_endpoints(v0: CMatrix, v1: CMatrix) -> Result<Self> {
        Self::new(vec![Dyadic::zero(), Dyadic::one()], vec![v0, v1])
    }

    /// x ↦ x·I_n.
    pub fn coordinate(n: usize) -> Self {
        Self::from_endpoints(CMatrix::zeros(n, n), CMatrix::identity(n)).unwrap()
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn breakpoints(&self) -> &[Dyadic] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[CMatrix] {
        &self.values
    }

    pub fn approx_error(&self) -> f64 {
        self.approx_error
    }

    /// Exact linear interpolation at a dyadic point of [0,1].
    pub fn evaluate(&self, x: &Dyadic) -> Result<CMatrix> {
        if !x.in_unit_interval() {
            return Err(Error::OutOfRange(format!("argument {x} outside [0,1]")));
        }
        match self.breakpoints.binary_search(x) {
            Ok(k) => Ok(self.values[k].clone()),
            Err(k) => {
                // breakpoints[k-1] < x < breakpoints[k]
                let (a, b) = (&self.breakpoints[k - 1], &self.breakpoints[k]);
                let t = x.sub(a).to_f64() / b.sub(a).to_f64();
                Ok(interpolate(&self.values[k - 1], &self.values[k], t))
            }
        }
    }

    /// Exact max over segments of ‖ΔV‖/Δx (spectral norm).
    pub fn lipschitz_constant(&self) -> f64 {
        let mut l = 0.0f64;
        for k in 1..self.breakpoints.len() {
            let dv = self.values[k].sub(&self.values[k - 1]);
            let dx = self.breakpoints[k].sub(&self.breakpoints[k - 1]).to_f64();
            l = l.max(spectral_norm(&dv).expect("finite PL values") / dx);
        }
        l
    }

    /// sup_x ‖f(x)‖. On each segment t ↦ ‖(1−t)A + tB‖ is convex, so the
    /// maximum is attained at a breakpoint; the endpoint max is exact.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| spectral_norm(v).expect("finite PL values"))
            .fold(0.0, f64::max)
    }

    /// Exact composition f∘ξ as a new PL function.
    ///
    /// For Affine(r,l) the new breakpoints are the preimages of f's
    /// breakpoints inside [r/2^l, (r+1)/2^l], mapped back to [0,1]; the
    /// Lipschitz constant contracts by exactly 2^{−l} on the surviving
    /// segments. For a constant path the result is the constant f(c).
    pub fn compose_with_path(&self, xi: &DyadicPath) -> Result<Self> {
        match xi {
            DyadicPath::Constant(c) => {
                let v = self.evaluate(c)?;
                let mut g = Self::constant(v)?;
                g.approx_error = self.approx_error;
                Ok(g)
            }
            DyadicPath::Affine { r, l } => {
                let lo = Dyadic::new(BigInt::from(r.clone()), *l);
                let hi = Dyadic::new(BigInt::from(r.clone()) + 1, *l);
                let mut bps = vec![Dyadic::zero()];
                let mut vals = vec![self.evaluate(&lo)?];
                for (b, v) in self.breakpoints.iter().zip(&self.values) {
                    if *b > lo && *b < hi {
                        // preimage x = b·2^l − r
                        let x = Dyadic::new(b.numerator() << *l as usize, b.exponent())
                            .sub(&Dyadic::new(BigInt::from(r.clone()), 0));
                        bps.push(x);
                        vals.push(v.clone());
                    }
                }
                bps.push(Dyadic::one());
                vals.push(self.evaluate(&hi)?);
                let mut g = Self::new(bps, vals)?;
                g.approx_error = self.approx_error;
                Ok(g)
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        PLMatrixFunction {
            n: self.n,
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v.adjoint()).collect(),
            approx_error: self.approx_error,
        }
    }

    pub fn scale(&self, s: Cx) -> Self {
        PLMatrixFunction {
            n: self.n,
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v.scale(s)).collect(),
            approx_error: self.approx_error * s.norm(),
        }
    }

    /// Shift by a constant matrix (exact; leaves the Lipschitz constant alone).
    pub fn add_constant(&self, a: &CMatrix) -> Result<Self> {
        if a.rows() != self.n || a.cols() != self.n {
            return Err(Error::Shape("constant shift size mismatch".into()));
        }
        Ok(PLMatrixFunction {
            n: self.n,
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v.add(a)).collect(),
            approx_error: self.approx_error,
        })
    }

    fn union_breakpoints(&self, other: &Self) -> Vec<Dyadic> {
        let mut bps: Vec<Dyadic> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .cloned()
            .collect();
        bps.sort();
        bps.dedup();
        bps
    }

    /// Exact sum on the breakpoint union.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Shape("sum of PL functions of different size".into()));
        }
        let bps = self.union_breakpoints(other);
        let mut vals = Vec::with_capacity(bps.len());
        for b in &bps {
            vals.push(self.evaluate(b)?.add(&other.evaluate(b)?));
        }
        let mut g = Self::new(bps, vals)?;
        g.approx_error = self.approx_error + other.approx_error;
        Ok(g)
    }

    /// Pointwise product, re-interpolated on the breakpoint union. The true
    /// product is piecewise quadratic; on a segment with increments ΔA, ΔB
    /// the interpolation defect is (t²−t)ΔAΔB, so ‖defect‖ ≤ ‖ΔAΔB‖/4.
    /// The bound is accumulated into `approx_error`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Shape(
                "product of PL functions of different size".into(),
            ));
        }
        let bps = self.union_breakpoints(other);
        let mut vals = Vec::with_capacity(bps.len());
        for b in &bps {
            vals.push(self.evaluate(b)?.mul(&other.evaluate(b)?));
        }
        let mut seg_err = 0.0f64;
        for k in 1..bps.len() {
            let da = self.evaluate(&bps[k])?.sub(&self.evaluate(&bps[k - 1])?);
            let db = other.evaluate(&bps[k])?.sub(&other.evaluate(&bps[k - 1])?);
            seg_err = seg_err.max(spectral_norm(&da.mul(&db))? / 4.0);
        }
        let carried = self.approx_error * (other.sup_norm() + other.approx_error)
            + other.approx_error * self.sup_norm();
        let mut g = Self::new(bps, vals)?;
        g.approx_error = seg_err + carried;
        Ok(g)
    }

    /// Boundary membership test for the dimension drop algebra:
    /// f(0) ∈ M_p ⊗ 1_q and f(1) ∈ 1_p ⊗ M_q, within `tol` entrywise.
    pub fn dimension_drop_membership(&self, p: usize, q: usize) -> Result<bool> {
        self.dimension_drop_membership_tol(p, q, 1e-12)
    }

    pub fn dimension_drop_membership_tol(&self, p: usize, q: usize, tol: f64) -> Result<bool> {
        if p * q != self.n {
            return Err(Error::Shape(format!(
                "dimension drop needs n = p·q, got n = {}, p·q = {}",
                self.n,
                p * q
            )));
        }
        let f0 = &self.values[0];
        let f1 = self.values.last().unwrap();
        // Conditional expectation onto M_p ⊗ 1_q under the a-outer convention.
        let left = CMatrix::from_fn(p, p, |s, t| {
            let mut acc = Cx::new(0.0, 0.0);
            for c in 0..q {
                acc += f0.get(s * q + c, t * q + c);
            }
            acc / Cx::new(q as f64, 0.0)
        });
        let res0 = f0.sub(&kron(&left, &CMatrix::identity(q))).max_abs();
        // Conditional expectation onto 1_p ⊗ M_q: average of the contiguous
        // diagonal q-blocks.
        let right = CMatrix::from_fn(q, q, |u, v| {
            let mut acc = Cx::new(0.0, 0.0);
            for s in 0..p {
                acc += f1.get(s * q + u, s * q + v);
            }
            acc / Cx::new(p as f64, 0.0)
        });
        let res1 = f1.sub(&kron(&CMatrix::identity(p), &right)).max_abs();
        Ok(res0 <= tol && res1 <= tol)
    }

    /// Deterministic random element of LB_i: rerunning with the same seed is
    /// bit-exact. The result satisfies L_f < γ^i strictly; `hermitian` makes
    /// every value self-adjoint.
    pub fn random_lipschitz(
        n: usize,
        class: &LipschitzClass,
        seed: u64,
        hermitian: bool,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("matrix size 0".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // 0, three interior sixteenths, 1
        let mut interior: Vec<i64> = Vec::new();
        while interior.len() < 3 {
            let k = rng.gen_range(1..16i64);
            if !interior.contains(&k) {
                interior.push(k);
            }
        }
        interior.sort_unstable();
        let mut bps = vec![Dyadic::zero()];
        bps.extend(interior.iter().map(|&k| Dyadic::from_ratio(k, 4)));
        bps.push(Dyadic::one());

        let mut raw = |rng: &mut ChaCha8Rng| {
            let m = CMatrix::from_fn(n, n, |_, _| {
                Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            if hermitian {
                m.add(&m.adjoint()).scale_re(0.5)
            } else {
                m
            }
        };
        let values: Vec<CMatrix> = (0..bps.len()).map(|_| raw(&mut rng)).collect();
        let mut f = Self::new(bps, values)?;
        let l_raw = f.lipschitz_constant();
        let target = class.bound() * (0.4 + 0.55 * rng.gen_range(0.0..1.0));
        if l_raw > 0.0 {
            let s = target / l_raw;
            f = f.scale(Cx::new(s, 0.0));
        }
        debug_assert!(class.contains(&f));
        Ok(f)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "breakpoints": self.breakpoints.iter()
                .map(|b| serde_json::json!({
                    "num": b.numerator().to_string(),
                    "exp": b.exponent(),
                }))
                .collect::<Vec<_>>(),
            "values": self.values.iter().map(|v| {
                (0..v.rows()).map(|r| {
                    (0..v.cols()).map(|c| {
                        let z = v.get(r, c);
                        vec![z.re, z.im]
                    }).collect::<Vec<_>>()
                }).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
        })
    }
}

fn interpolate(a: &CMatrix, b: &CMatrix, t: f64) -> CMatrix {
    a.scale_re(1.0 - t).add(&b.scale_re(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(gamma: f64, level: u32) -> LipschitzClass {
        LipschitzClass::new(gamma, level).unwrap()
    }

    #[test]
    fn evaluate_constant_and_coordinate() {
        let a = CMatrix::diag_real(&[2.0, -1.0]);
        let f = PLMatrixFunction::constant(a.clone()).unwrap();
        assert_eq!(f.evaluate(&Dyadic::from_ratio(3, 3)).unwrap(), a);

        let g = PLMatrixFunction::coordinate(3);
        let v = g.evaluate(&Dyadic::half()).unwrap();
        assert_eq!(v, CMatrix::identity(3).scale_re(0.5));
        assert!(g.evaluate(&Dyadic::from_int(2)).is_err());
    }

    #[test]
    fn evaluate_matches_segment_formula_oracle() {
        // 3-breakpoint function, checked against the raw segment formula.
        let bps = vec![Dyadic::zero(), Dyadic::from_ratio(3, 3), Dyadic::one()];
        let vals = vec![
            CMatrix::diag_real(&[1.0, 0.0]),
            CMatrix::diag_real(&[0.0, 2.0]),
            CMatrix::diag_real(&[-1.0, 1.0]),
        ];
        let f = PLMatrixFunction::new(bps, vals.clone()).unwrap();
        let x = Dyadic::from_ratio(9, 4); // 9/16, inside (3/8, 1)
        let t = (9.0 / 16.0 - 3.0 / 8.0) / (1.0 - 3.0 / 8.0);
        let oracle = vals[1].scale_re(1.0 - t).add(&vals[2].scale_re(t));
        assert_eq!(f.evaluate(&x).unwrap(), oracle);
    }

    #[test]
    fn lipschitz_and_sup_norm() {
        let f = PLMatrixFunction::coordinate(2);
        assert!((f.lipschitz_constant() - 1.0).abs() < 1e-12);
        assert!((f.sup_norm() - 1.0).abs() < 1e-12);
        let c = PLMatrixFunction::constant(CMatrix::identity(2)).unwrap();
        assert_eq!(c.lipschitz_constant(), 0.0);
    }

    #[test]
    fn lipschitz_matches_dense_grid_oracle() {
        let f = PLMatrixFunction::random_lipschitz(3, &class(1.5, 2), 42, false).unwrap();
        let l = f.lipschitz_constant();
        // finite differences over a 1024-point dyadic grid
        let mut best = 0.0f64;
        let mut prev = f.evaluate(&Dyadic::zero()).unwrap();
        for k in 1..=1024i64 {
            let x = Dyadic::from_ratio(k, 10);
            let cur = f.evaluate(&x).unwrap();
            let slope = spectral_norm(&cur.sub(&prev)).unwrap() * 1024.0;
            best = best.max(slope);
            prev = cur;
        }
        assert!(best <= l + 1e-9, "grid {best} vs exact {l}");
        assert!((best - l).abs() < 1e-6, "grid {best} vs exact {l}");
    }

    #[test]
    fn compose_affine_halves_lipschitz() {
        let f = PLMatrixFunction::coordinate(2);
        let g = f
            .compose_with_path(&DyadicPath::affine(0, 1).unwrap())
            .unwrap();
        // g(x) = x/2·I
        assert_eq!(
            g.evaluate(&Dyadic::one()).unwrap(),
            CMatrix::identity(2).scale_re(0.5)
        );
        assert!((g.lipschitz_constant() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn compose_constant_path() {
        let f = PLMatrixFunction::coordinate(2);
        let g = f
            .compose_with_path(&DyadicPath::constant(Dyadic::half()).unwrap())
            .unwrap();
        assert_eq!(g.lipschitz_constant(), 0.0);
        assert_eq!(
            g.evaluate(&Dyadic::zero()).unwrap(),
            CMatrix::identity(2).scale_re(0.5)
        );
    }

    #[test]
    fn compose_agrees_with_pointwise_on_grid() {
        let f = PLMatrixFunction::random_lipschitz(2, &class(1.5, 1), 7, false).unwrap();
        let xi = DyadicPath::affine(1, 1).unwrap(); // (x+1)/2
        let g = f.compose_with_path(&xi).unwrap();
        for k in 0..=64i64 {
            let x = Dyadic::from_ratio(k, 6);
            let lhs = g.evaluate(&x).unwrap();
            let rhs = f.evaluate(&xi.evaluate(&x).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "grid point {k}/64");
        }
    }

    #[test]
    fn dimension_drop_boundary_tests() {
        // constant identity is in every dimension drop algebra
        let f = PLMatrixFunction::constant(CMatrix::identity(6)).unwrap();
        assert!(f.dimension_drop_membership(2, 3).unwrap());

        // f(0) = e11 ⊗ 1_q, f(1) = 1_p ⊗ e11
        let e11p = CMatrix::from_fn(2, 2, |r, c| {
            if r == 0 && c == 0 {
                Cx::new(1.0, 0.0)
            } else {
                Cx::new(0.0, 0.0)
            }
        });
        let e11q = CMatrix::from_fn(3, 3, |r, c| {
            if r == 0 && c == 0 {
                Cx::new(1.0, 0.0)
            } else {
                Cx::new(0.0, 0.0)
            }
        });
        let v0 = kron(&e11p, &CMatrix::identity(3));
        let v1 = kron(&CMatrix::identity(2), &e11q);
        let g = PLMatrixFunction::from_endpoints(v0, v1).unwrap();
        assert!(g.dimension_drop_membership(2, 3).unwrap());

        // generic full matrix at 0 projects with nonzero residual
        let h = PLMatrixFunction::random_lipschitz(6, &class(1.5, 1), 3, false).unwrap();
        assert!(!h.dimension_drop_membership(2, 3).unwrap());
        assert!(h.dimension_drop_membership(2, 2).is_err());
    }

    #[test]
    fn random_lipschitz_is_deterministic_and_in_class() {
        let c = class(1.5, 2);
        let f = PLMatrixFunction::random_lipschitz(2, &c, 99, true).unwrap();
        let g = PLMatrixFunction::random_lipschitz(2, &c, 99, true).unwrap();
        assert_eq!(f.values()[0], g.values()[0]);
        assert_eq!(f.breakpoints(), g.breakpoints());
        assert!(f.lipschitz_constant() < 2.25);
        for v in f.values() {
            assert!(v.hermitian_residual() <= 1e-15);
        }
        for seed in 0..100 {
            let f = PLMatrixFunction::random_lipschitz(2, &c, seed, false).unwrap();
            assert!(c.contains(&f), "seed {seed}");
        }
    }

    #[test]
    fn product_tracks_interpolation_error() {
        let c = class(1.5, 1);
        let f = PLMatrixFunction::random_lipschitz(2, &c, 5, false).unwrap();
        let g = PLMatrixFunction::random_lipschitz(2, &c, 6, false).unwrap();
        let fg = f.mul(&g).unwrap();
        assert!(fg.approx_error() > 0.0);
        // midpoint-ish points: PL value within the tracked bound of the true product
        for k in [1i64, 5, 9, 13] {
            let x = Dyadic::from_ratio(k, 5); // k/32
            let truth = f.evaluate(&x).unwrap().mul(&g.evaluate(&x).unwrap());
            let approx = fg.evaluate(&x).unwrap();
            let err = spectral_norm(&truth.sub(&approx)).unwrap();
            assert!(err <= fg.approx_error() + 1e-12, "err {err}");
        }
        // breakpoint-aligned product is submultiplicative in sup norm
        assert!(fg.sup_norm() <= f.sup_norm() * g.sup_norm() + 1e-12);
    }
}
