//! Number policies.
//!
//! Everything in this crate is generic over a [`Scalar`]: exact
//! arbitrary-precision rationals, exact elements of a real quadratic field
//! `a + b*sqrt(d)`, or an error-tracked `f64`. Exactness is load-bearing:
//! enumerating folds at depth `n` multiplies coordinate errors by `s^n`, so
//! combinatorial work defaults to the exact policies while the tracked
//! policy reports an honest error radius instead of silently guessing.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Error-bound cap used by iterating operations under the tracked policy.
pub const TRACKED_ERR_CAP: f64 = 1e-7;

/// A real number under one of the crate's numeric policies.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether arithmetic and comparisons under this policy are exact.
    const EXACT: bool;

    /// Short policy name for diagnostics and serialized output.
    const POLICY: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(numer: i64, denom: i64) -> Self;

    /// Total order where decidable; `None` when the two values overlap
    /// within tracked error bounds.
    fn try_cmp(&self, other: &Self) -> Option<Ordering>;

    fn abs(&self) -> Self;

    /// Pointwise minimum that stays sound for tracked values (interval min).
    fn min_with(&self, other: &Self) -> Self;

    fn to_f64(&self) -> f64;

    /// Radius of the tracked error interval; zero under exact policies.
    fn err_bound(&self) -> f64;

    /// Canonical display form used in fixtures: `"3/8"`, `"(1+sqrt5)/4"`, ...
    fn canonical(&self) -> String;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn is_zero(&self) -> bool {
        self.try_cmp(&Self::zero()) == Some(Ordering::Equal)
    }
}

/// `x^k` by repeated squaring; negative exponents go through division.
pub fn powi<T: Scalar>(x: &T, k: i32) -> T {
    if k < 0 {
        return T::one() / powi(x, -k);
    }
    let mut acc = T::one();
    let mut base = x.clone();
    let mut e = k as u32;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base.clone();
        }
        base = base.clone() * base;
        e >>= 1;
    }
    acc
}

/// `2^-k`, the metric weight of coordinate depth `k`.
pub fn half_pow<T: Scalar>(k: usize) -> T {
    powi(&T::from_ratio(1, 2), k as i32)
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const POLICY: &'static str = "rational";

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn try_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn min_with(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn err_bound(&self) -> f64 {
        0.0
    }

    fn canonical(&self) -> String {
        self.to_string()
    }
}

/// An element `a + b*sqrt(d)` of a real quadratic field.
///
/// `d` is a squarefree integer >= 2. Purely rational values carry the
/// sentinel `d = 0`; binary operations unify fields and reject genuine
/// mixtures (which cannot arise when all inputs derive from one slope).
#[derive(Clone, PartialEq)]
pub struct Quad {
    a: BigRational,
    b: BigRational,
    d: u32,
}

impl Quad {
    pub fn new(a: BigRational, b: BigRational, d: u32) -> Self {
        let d = if Zero::is_zero(&b) { 0 } else { d };
        if d != 0 {
            let r = (d as f64).sqrt() as u32;
            assert!(r * r != d, "d must not be a perfect square");
        }
        Quad { a, b, d }
    }

    /// The golden slope `(1 + sqrt5)/2`.
    pub fn golden() -> Self {
        Quad::new(
            BigRational::new(1.into(), 2.into()),
            BigRational::new(1.into(), 2.into()),
            5,
        )
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn radical_part(&self) -> &BigRational {
        &self.b
    }

    pub fn field(&self) -> u32 {
        self.d
    }

    fn unified(&self, other: &Self) -> u32 {
        match (self.d, other.d) {
            (0, d) | (d, 0) => d,
            (d1, d2) if d1 == d2 => d1,
            (d1, d2) => panic!("quadratic parts from different fields: sqrt{d1} vs sqrt{d2}"),
        }
    }

    /// Sign of `a + b*sqrt(d)`: -1, 0 or 1.
    fn sign(&self) -> i8 {
        let sa = rational_sign(&self.a);
        let sb = rational_sign(&self.b);
        match (sa, sb) {
            (0, 0) => 0,
            (s, 0) | (0, s) => s,
            (s, t) if s == t => s,
            _ => {
                // Opposite signs: compare a^2 with b^2 d.
                let a2 = self.a.clone() * self.a.clone();
                let b2d = self.b.clone() * self.b.clone() * BigRational::from_integer(self.d.into());
                match a2.cmp(&b2d) {
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                    // a^2 = b^2 d with b != 0 would make sqrt(d) rational.
                    Ordering::Equal => unreachable!("non-square d"),
                }
            }
        }
    }
}

fn rational_sign(x: &BigRational) -> i8 {
    if Zero::is_zero(x) {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

impl Add for Quad {
    type Output = Quad;
    fn add(self, rhs: Quad) -> Quad {
        let d = self.unified(&rhs);
        Quad::new(self.a + rhs.a, self.b + rhs.b, d)
    }
}

impl Sub for Quad {
    type Output = Quad;
    fn sub(self, rhs: Quad) -> Quad {
        let d = self.unified(&rhs);
        Quad::new(self.a - rhs.a, self.b - rhs.b, d)
    }
}

impl Neg for Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        Quad::new(-self.a, -self.b, self.d)
    }
}

impl Mul for Quad {
    type Output = Quad;
    fn mul(self, rhs: Quad) -> Quad {
        let d = self.unified(&rhs);
        let dd = BigRational::from_integer(d.into());
        let a = self.a.clone() * rhs.a.clone() + self.b.clone() * rhs.b.clone() * dd;
        let b = self.a * rhs.b + rhs.a * self.b;
        Quad::new(a, b, d)
    }
}

impl Div for Quad {
    type Output = Quad;
    fn div(self, rhs: Quad) -> Quad {
        let d = self.unified(&rhs);
        let dd = BigRational::from_integer(d.into());
        // Multiply by the conjugate; the norm a^2 - b^2 d vanishes only at 0.
        let norm = rhs.a.clone() * rhs.a.clone() - rhs.b.clone() * rhs.b.clone() * dd;
        assert!(!Zero::is_zero(&norm), "division by zero");
        let conj = Quad::new(rhs.a.clone(), -rhs.b.clone(), d);
        let prod = self * conj;
        Quad::new(prod.a / norm.clone(), prod.b / norm, d)
    }
}

impl PartialOrd for Quad {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.try_cmp(other)
    }
}

impl fmt::Debug for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quad({})", self.canonical())
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl Scalar for Quad {
    const EXACT: bool = true;
    const POLICY: &'static str = "quadratic";

    fn zero() -> Self {
        Quad::new(Scalar::zero(), Scalar::zero(), 0)
    }

    fn one() -> Self {
        Quad::new(Scalar::one(), Scalar::zero(), 0)
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Quad::new(BigRational::from_ratio(numer, denom), Scalar::zero(), 0)
    }

    fn try_cmp(&self, other: &Self) -> Option<Ordering> {
        let diff = self.clone() - other.clone();
        Some(match diff.sign() {
            0 => Ordering::Equal,
            1 => Ordering::Greater,
            _ => Ordering::Less,
        })
    }

    fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn min_with(&self, other: &Self) -> Self {
        if self.try_cmp(other) == Some(Ordering::Greater) {
            other.clone()
        } else {
            self.clone()
        }
    }

    fn to_f64(&self) -> f64 {
        Scalar::to_f64(&self.a) + Scalar::to_f64(&self.b) * (self.d as f64).sqrt()
    }

    fn err_bound(&self) -> f64 {
        0.0
    }

    fn canonical(&self) -> String {
        if Zero::is_zero(&self.b) {
            return self.a.to_string();
        }
        // Common-denominator form (p + q sqrt d)/r with gcd(p, q, r) = 1, r > 0.
        let r = self.a.denom().lcm(self.b.denom());
        let p = self.a.numer() * (&r / self.a.denom());
        let q = self.b.numer() * (&r / self.b.denom());
        let g = p.gcd(&q).gcd(&r);
        let (p, q, r) = (&p / &g, &q / &g, &r / &g);
        let root = if q == BigInt::one() {
            format!("sqrt{}", self.d)
        } else if q == -BigInt::one() {
            format!("-sqrt{}", self.d)
        } else {
            format!("{}sqrt{}", q, self.d)
        };
        let body = if Zero::is_zero(&p) {
            root
        } else if q.is_positive() {
            format!("{}+{}", p, root)
        } else {
            format!("{}{}", p, root)
        };
        if r == BigInt::one() {
            body
        } else if Zero::is_zero(&p) {
            format!("{}/{}", body, r)
        } else {
            format!("({})/{}", body, r)
        }
    }
}

/// An `f64` with a running error radius: the true value lies in
/// `[value - err, value + err]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackedFloat {
    pub value: f64,
    pub err: f64,
}

impl TrackedFloat {
    pub fn exact(value: f64) -> Self {
        TrackedFloat { value, err: 0.0 }
    }

    pub fn with_err(value: f64, err: f64) -> Self {
        TrackedFloat { value, err }
    }

    fn ulp(x: f64) -> f64 {
        x.abs() * f64::EPSILON + f64::MIN_POSITIVE
    }
}

impl Add for TrackedFloat {
    type Output = TrackedFloat;
    fn add(self, rhs: TrackedFloat) -> TrackedFloat {
        let value = self.value + rhs.value;
        TrackedFloat::with_err(value, self.err + rhs.err + Self::ulp(value))
    }
}

impl Sub for TrackedFloat {
    type Output = TrackedFloat;
    fn sub(self, rhs: TrackedFloat) -> TrackedFloat {
        let value = self.value - rhs.value;
        TrackedFloat::with_err(value, self.err + rhs.err + Self::ulp(value))
    }
}

impl Neg for TrackedFloat {
    type Output = TrackedFloat;
    fn neg(self) -> TrackedFloat {
        TrackedFloat::with_err(-self.value, self.err)
    }
}

impl Mul for TrackedFloat {
    type Output = TrackedFloat;
    fn mul(self, rhs: TrackedFloat) -> TrackedFloat {
        let value = self.value * rhs.value;
        let err = (self.value.abs() + self.err) * rhs.err
            + (rhs.value.abs() + rhs.err) * self.err
            + Self::ulp(value);
        TrackedFloat::with_err(value, err)
    }
}

impl Div for TrackedFloat {
    type Output = TrackedFloat;
    fn div(self, rhs: TrackedFloat) -> TrackedFloat {
        let value = self.value / rhs.value;
        let denom = rhs.value.abs() - rhs.err;
        let err = if denom > 0.0 {
            (self.err + value.abs() * rhs.err) / denom + Self::ulp(value)
        } else {
            f64::INFINITY
        };
        TrackedFloat::with_err(value, err)
    }
}

impl fmt::Display for TrackedFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.err == 0.0 {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{}±{:.3e}", self.value, self.err)
        }
    }
}

impl Scalar for TrackedFloat {
    const EXACT: bool = false;
    const POLICY: &'static str = "tracked";

    fn zero() -> Self {
        TrackedFloat::exact(0.0)
    }

    fn one() -> Self {
        TrackedFloat::exact(1.0)
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        let value = numer as f64 / denom as f64;
        // Exact when the quotient is representable (all dyadics we build are).
        let exactly = (value * denom as f64) == numer as f64;
        TrackedFloat::with_err(value, if exactly { 0.0 } else { Self::ulp(value) })
    }

    fn try_cmp(&self, other: &Self) -> Option<Ordering> {
        let gap = self.value - other.value;
        if gap.abs() > self.err + other.err {
            Some(gap.partial_cmp(&0.0).unwrap())
        } else if self.value == other.value && self.err == 0.0 && other.err == 0.0 {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    fn abs(&self) -> Self {
        TrackedFloat::with_err(self.value.abs(), self.err)
    }

    fn min_with(&self, other: &Self) -> Self {
        // Interval minimum, sound for overlapping operands.
        let lo = (self.value - self.err).min(other.value - other.err);
        let hi = (self.value + self.err).min(other.value + other.err);
        TrackedFloat::with_err((lo + hi) / 2.0, (hi - lo) / 2.0)
    }

    fn to_f64(&self) -> f64 {
        self.value
    }

    fn err_bound(&self) -> f64 {
        self.err
    }

    fn canonical(&self) -> String {
        self.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn quad_golden_satisfies_its_minimal_polynomial() {
        let s = Quad::golden();
        let s2 = s.clone() * s.clone();
        let expect = s.clone() + Quad::one();
        assert_eq!(s2, expect);
    }

    #[test]
    fn quad_division_round_trips() {
        let s = Quad::golden();
        let x = Quad::new(rat(3, 7), rat(-2, 5), 5);
        let y = x.clone() * s.clone() / s;
        assert_eq!(x, y);
    }

    #[test]
    fn quad_ordering_mixed_signs() {
        // 7/5 < sqrt2 < 3/2, exercised inside Q(sqrt2).
        let root2 = Quad::new(rat(0, 1), rat(1, 1), 2);
        assert_eq!(
            Quad::from_ratio(7, 5).try_cmp(&root2),
            Some(Ordering::Less)
        );
        assert_eq!(
            Quad::from_ratio(3, 2).try_cmp(&root2),
            Some(Ordering::Greater)
        );
        assert_eq!(root2.try_cmp(&root2), Some(Ordering::Equal));
    }

    #[test]
    fn quad_canonical_strings() {
        let c1 = Quad::new(rat(1, 4), rat(1, 4), 5);
        assert_eq!(c1.canonical(), "(1+sqrt5)/4");
        let c2 = Quad::new(rat(-1, 4), rat(1, 4), 5);
        assert_eq!(c2.canonical(), "(-1+sqrt5)/4");
        assert_eq!(Quad::from_ratio(3, 8).canonical(), "3/8");
        let r = Quad::new(rat(0, 1), rat(1, 2), 5);
        assert_eq!(r.canonical(), "sqrt5/2");
    }

    #[test]
    fn tracked_cmp_three_valued() {
        let a = TrackedFloat::with_err(1.0, 0.1);
        let b = TrackedFloat::with_err(1.05, 0.1);
        assert_eq!(a.try_cmp(&b), None);
        let c = TrackedFloat::exact(2.0);
        assert_eq!(a.try_cmp(&c), Some(Ordering::Less));
    }

    #[test]
    fn tracked_error_grows_through_ops() {
        let a = TrackedFloat::exact(1.0 / 3.0);
        let s = TrackedFloat::exact(1.75);
        let mut x = a;
        for _ in 0..10 {
            x = s * x;
        }
        assert!(x.err > 0.0 && x.err < 1e-10);
    }

    #[test]
    fn powi_handles_negative_exponents() {
        let s = rat(7, 4);
        assert_eq!(powi(&s, 3), rat(343, 64));
        assert_eq!(powi(&s, -2), rat(16, 49));
        assert_eq!(half_pow::<BigRational>(5), rat(1, 32));
    }
}
