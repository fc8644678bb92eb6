use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// The weight of a light item, an exact rational strictly between 0 and 1.
///
/// Always stored in lowest terms, so structural equality is value equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Epsilon {
    num: u64,
    den: u64,
}

impl Epsilon {
    pub fn new(num: u64, den: u64) -> Result<Self, ModelError> {
        if num == 0 || den == 0 || num >= den {
            return Err(ModelError::EpsilonOutOfRange(format!("{num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(Epsilon {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Integer key of `v` on the common denominator: `h·q + l·p` for `ε = p/q`.
    ///
    /// Two lattice values compare exactly as their keys do.
    pub fn key(&self, v: LatticeValue) -> u128 {
        v.heavy as u128 * self.den as u128 + v.light as u128 * self.num as u128
    }

    pub fn cmp(&self, a: LatticeValue, b: LatticeValue) -> Ordering {
        self.key(a).cmp(&self.key(b))
    }

    pub fn eq_value(&self, a: LatticeValue, b: LatticeValue) -> bool {
        self.key(a) == self.key(b)
    }

    pub fn le(&self, a: LatticeValue, b: LatticeValue) -> bool {
        self.key(a) <= self.key(b)
    }

    pub fn min(&self, a: LatticeValue, b: LatticeValue) -> LatticeValue {
        if self.le(a, b) {
            a
        } else {
            b
        }
    }

    pub fn max(&self, a: LatticeValue, b: LatticeValue) -> LatticeValue {
        if self.le(a, b) {
            b
        } else {
            a
        }
    }

    pub fn to_f64(&self, v: LatticeValue) -> f64 {
        v.heavy as f64 + v.light as f64 * self.as_f64()
    }

    /// Reduced fraction `(numerator, denominator)` of `v`.
    pub fn fraction(&self, v: LatticeValue) -> (u128, u128) {
        let key = self.key(v);
        let den = self.den as u128;
        let g = gcd128(key, den).max(1);
        (key / g, den / g)
    }

    /// `v` rendered as `"p/q"` in lowest terms.
    pub fn format(&self, v: LatticeValue) -> String {
        let (p, q) = self.fraction(v);
        format!("{p}/{q}")
    }

    /// `⌈T/ε⌉`: the number of light items needed to reach `t` on lights alone.
    pub fn k_of(&self, t: LatticeValue) -> Result<u64, ModelError> {
        let key = self.key(t);
        if key == 0 {
            return Err(ModelError::ZeroTarget);
        }
        let p = self.num as u128;
        Ok(key.div_ceil(p) as u64)
    }

    /// Fewest light items that, together with `heavy` heavy items, reach `t`.
    pub fn lights_needed(&self, t: LatticeValue, heavy: u64) -> u64 {
        let target = self.key(t);
        let have = heavy as u128 * self.den as u128;
        if have >= target {
            0
        } else {
            (target - have).div_ceil(self.num as u128) as u64
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Epsilon {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::MalformedEpsilon(s.to_string());
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        Epsilon::new(p, q).map_err(|_| ModelError::EpsilonOutOfRange(s.to_string()))
    }
}

impl Serialize for Epsilon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Epsilon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A utility of the form `heavy + light·ε`.
///
/// Equality is structural; use [`Epsilon::cmp`] and friends to compare by value,
/// since `(1, 0)` and `(0, 2)` denote the same utility when `ε = 1/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeValue {
    pub heavy: u64,
    pub light: u64,
}

impl LatticeValue {
    pub const ZERO: LatticeValue = LatticeValue { heavy: 0, light: 0 };

    pub const fn new(heavy: u64, light: u64) -> Self {
        LatticeValue { heavy, light }
    }

    pub fn is_zero(&self) -> bool {
        self.heavy == 0 && self.light == 0
    }
}

/// Every achievable bundle weight `h + lε` with `h ≤ heavy`, `l ≤ light`, sorted by
/// value with duplicates merged.
///
/// When two pairs share a value the one with more heavy weight is kept.
pub fn lattice_values(eps: Epsilon, heavy: u64, light: u64) -> Vec<LatticeValue> {
    let mut all: Vec<LatticeValue> = (0..=heavy)
        .flat_map(|h| (0..=light).map(move |l| LatticeValue::new(h, l)))
        .collect();
    all.sort_by(|a, b| eps.cmp(*a, *b).then(b.heavy.cmp(&a.heavy)));
    all.dedup_by(|later, kept| eps.eq_value(*later, *kept));
    all
}
