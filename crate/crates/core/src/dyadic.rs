//! Exact dyadic rationals `m / 2^e` and rational thresholds `p / q`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A non-negative dyadic rational, kept normalized: the numerator is odd or the value is `0/1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigUint,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: BigUint, exp: u32) -> Self {
        if num.is_zero() {
            return Dyadic { num, exp: 0 };
        }
        let tz = num.trailing_zeros().unwrap_or(0);
        let shift = tz.min(exp as u64) as u32;
        Dyadic { num: num >> shift, exp: exp - shift }
    }

    pub fn zero() -> Self {
        Dyadic { num: BigUint::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { num: BigUint::one(), exp: 0 }
    }

    /// `count / 2^n`, the form produced by model counting.
    pub fn from_count(count: u64, n: u32) -> Self {
        Dyadic::new(BigUint::from(count), n)
    }

    /// `1 / 2^e`.
    pub fn inv_pow2(e: u32) -> Self {
        Dyadic { num: BigUint::one(), exp: e }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn denominator(&self) -> BigUint {
        BigUint::one() << self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.exp == 0 && self.num.is_one()
    }

    /// Divide by `2^e`.
    pub fn halve(&self, e: u32) -> Self {
        Dyadic::new(self.num.clone(), self.exp + e)
    }

    pub fn pow(&self, n: u32) -> Self {
        Dyadic::new(self.num.pow(n), self.exp * n)
    }

    pub fn checked_sub(&self, other: &Dyadic) -> Option<Dyadic> {
        let e = self.exp.max(other.exp);
        let a = &self.num << (e - self.exp);
        let b = &other.num << (e - other.exp);
        if a < b {
            None
        } else {
            Some(Dyadic::new(a - b, e))
        }
    }

    /// Numerator scaled to denominator `2^e`; `e` must be at least the exponent.
    pub fn scaled_numerator(&self, e: u32) -> BigUint {
        debug_assert!(e >= self.exp);
        &self.num << (e - self.exp)
    }

    /// Exact "m/2^e" rendering, independent of `Display`.
    pub fn to_pow2_string(&self) -> String {
        format!("{}/2^{}", self.num, self.exp)
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        self.scaled_numerator(e).cmp(&other.scaled_numerator(e))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        Dyadic::new(self.scaled_numerator(e) + rhs.scaled_numerator(e), e)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

/// Panics on a negative result, like unsigned integer subtraction.
impl Sub<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self.checked_sub(rhs).expect("dyadic subtraction underflow")
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Mul<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl<'a> std::iter::Sum<&'a Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = &'a Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| &acc + x)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.denominator())
        }
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `M/2^E`, `P/Q` with `Q` a power of two, or a bare integer.
    fn from_str(s: &str) -> Result<Self> {
        let (p, q) = parse_fraction(s)?;
        if q.is_zero() || (&q & (&q - 1u32)) != BigUint::zero() {
            return Err(Error::invalid(format!("`{s}` is not a dyadic rational")));
        }
        let e = q.trailing_zeros().unwrap_or(0) as u32;
        Ok(Dyadic::new(p, e))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The probability that a uniformly random assignment satisfies one clause of width `k`.
pub fn cp(k: u32) -> Dyadic {
    if k == 0 {
        return Dyadic::zero();
    }
    let denom = BigUint::one() << k;
    Dyadic::new(denom - 1u32, k)
}

/// A rational threshold `p / q` in `[0, 1]`, stored in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Threshold {
    p: BigUint,
    q: BigUint,
}

impl Threshold {
    pub fn new(p: BigUint, q: BigUint) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::invalid("threshold denominator is zero"));
        }
        if p > q {
            return Err(Error::invalid(format!("threshold {p}/{q} exceeds 1")));
        }
        let g = p.gcd(&q);
        let (p, q) = if g.is_zero() { (p, q) } else { (p / &g, q / &g) };
        let q = if p.is_zero() { BigUint::one() } else { q };
        Ok(Threshold { p, q })
    }

    pub fn from_u64(p: u64, q: u64) -> Result<Self> {
        Threshold::new(BigUint::from(p), BigUint::from(q))
    }

    pub fn numer(&self) -> &BigUint {
        &self.p
    }

    pub fn denom(&self) -> &BigUint {
        &self.q
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero()
    }

    /// The same value as a dyadic rational, when the denominator is a power of two.
    pub fn as_dyadic(&self) -> Option<Dyadic> {
        if (&self.q & (&self.q - 1u32)).is_zero() {
            let e = self.q.trailing_zeros().unwrap_or(0) as u32;
            Some(Dyadic::new(self.p.clone(), e))
        } else {
            None
        }
    }

    /// Orders `s` relative to this threshold (`Less` means `s < self`), by cross-multiplication.
    pub fn cmp_dyadic(&self, s: &Dyadic) -> Ordering {
        let lhs = s.numerator() * &self.q;
        let rhs = &self.p << s.exponent();
        lhs.cmp(&rhs)
    }

    /// `self - below`, rounded down to a dyadic with enough precision to stay positive.
    /// Returns `None` unless `below < self`.
    pub fn dyadic_gap_above(&self, below: &Dyadic) -> Option<Dyadic> {
        if self.cmp_dyadic(below) != Ordering::Less {
            return None;
        }
        if let Some(d) = self.as_dyadic() {
            return d.checked_sub(below);
        }
        // floor((p/q - m/2^e) * 2^E) / 2^E with E large enough that the floor is non-zero.
        let e = below.exponent() + self.q.bits() as u32 + 2;
        let scaled = (&self.p << e) / &self.q;
        let base = below.scaled_numerator(e);
        let diff = scaled - base;
        if diff.is_zero() {
            return None;
        }
        Some(Dyadic::new(diff, e))
    }
}

impl From<&Dyadic> for Threshold {
    fn from(d: &Dyadic) -> Self {
        Threshold { p: d.numerator().clone(), q: d.denominator() }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_one() {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl FromStr for Threshold {
    type Err = Error;

    /// Accepts `P/Q`, `M/2^E` or a bare `0`/`1`. Decimal notation is rejected.
    fn from_str(s: &str) -> Result<Self> {
        let (p, q) = parse_fraction(s)?;
        Threshold::new(p, q)
    }
}

impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Threshold {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Compare `sigma` with `delta`; `Greater` means `sigma > delta`.
pub fn compare_threshold(sigma: &Dyadic, delta: &Threshold) -> Ordering {
    delta.cmp_dyadic(sigma)
}

fn parse_uint(s: &str, whole: &str) -> Result<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::invalid(format!(
            "`{whole}` is not of the form P/Q or M/2^E"
        )));
    }
    s.parse::<BigUint>()
        .map_err(|_| Error::invalid(format!("`{whole}`: bad integer `{s}`")))
}

fn parse_fraction(s: &str) -> Result<(BigUint, BigUint)> {
    let t = s.trim();
    match t.split_once('/') {
        None => Ok((parse_uint(t, s)?, BigUint::one())),
        Some((n, d)) => {
            let num = parse_uint(n.trim(), s)?;
            let d = d.trim();
            let den = match d.split_once('^') {
                Some((base, e)) => {
                    if base.trim() != "2" {
                        return Err(Error::invalid(format!("`{s}`: only powers of 2 allowed")));
                    }
                    let e: u32 = e
                        .trim()
                        .parse()
                        .map_err(|_| Error::invalid(format!("`{s}`: bad exponent")))?;
                    BigUint::one() << e
                }
                None => parse_uint(d, s)?,
            };
            Ok((num, den))
        }
    }
}
