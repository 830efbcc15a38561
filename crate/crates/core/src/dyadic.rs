//! Exact dyadic rationals num/2^exp with decidable equality and ordering.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// num / 2^exp in canonical form: num odd or zero, and exp = 0 when num = 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: BigInt, exp: u32) -> Self {
        let mut d = Dyadic { num, exp };
        d.canonicalize();
        d
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    pub fn from_ratio(num: i64, exp: u32) -> Self {
        Dyadic::new(BigInt::from(num), exp)
    }

    pub fn zero() -> Self {
        Dyadic::from_int(0)
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    pub fn half() -> Self {
        Dyadic::from_ratio(1, 1)
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        while self.exp > 0 && (&self.num % 2u8).is_zero() {
            self.num /= 2;
            self.exp -= 1;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    /// Numerator rescaled to a common exponent e ≥ self.exp.
    fn scaled_num(&self, e: u32) -> BigInt {
        &self.num << (e - self.exp) as usize
    }

    pub fn add(&self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        Dyadic::new(self.scaled_num(e) + rhs.scaled_num(e), e)
    }

    pub fn sub(&self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        Dyadic::new(self.scaled_num(e) - rhs.scaled_num(e), e)
    }

    pub fn mul(&self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic::new(-self.num.clone(), self.exp)
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic::new(self.num.abs(), self.exp)
    }

    /// Halve k more times: value / 2^k.
    pub fn shr(&self, k: u32) -> Dyadic {
        Dyadic::new(self.num.clone(), self.exp + k)
    }

    pub fn in_unit_interval(&self) -> bool {
        !self.is_negative() && *self <= Dyadic::one()
    }

    pub fn to_f64(&self) -> f64 {
        // Exact for desk-scale quantities; saturates like f64 otherwise.
        let n = self.num.to_f64().unwrap_or(f64::INFINITY * self.num.signum().to_f64().unwrap());
        n * 2f64.powi(-(self.exp as i32))
    }

    pub fn pow2(exp_neg: u32) -> Self {
        Dyadic::from_ratio(1, exp_neg)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        self.scaled_num(e).cmp(&other.scaled_num(e))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

/// Exact naturals for dimensions n_i, multiplicities l_j^i and the
/// increments n_i² − n_{i−1}².
pub type BigNat = BigUint;
