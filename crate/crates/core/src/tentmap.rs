//! The tent family `T_s(x) = min{sx, s(1-x)}` restricted to `I = [0, s/2]`:
//! evaluation, preimages, and the critical orbit with exact periodicity
//! certificates.
//!
//! Slopes are confined to `sqrt2 < s <= 2`; the construction rejects
//! anything else.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, TRACKED_ERR_CAP};

/// A validated slope parameter together with its derived constants.
#[derive(Clone, Debug, PartialEq)]
pub struct Slope<T: Scalar> {
    value: T,
}

impl<T: Scalar> Slope<T> {
    /// Builds a slope, checking `sqrt2 < s <= 2` exactly (`s^2 > 2` avoids
    /// any irrational comparison).
    pub fn new(value: T) -> Result<Self> {
        let two = T::from_int(2);
        let sq = value.clone() * value.clone();
        let above = sq.try_cmp(&two).ok_or(Error::AmbiguousComparison {
            context: "slope validation",
            step: 0,
        })?;
        let below = value.try_cmp(&two).ok_or(Error::AmbiguousComparison {
            context: "slope validation",
            step: 0,
        })?;
        if above == Ordering::Greater && below != Ordering::Greater {
            Ok(Slope { value })
        } else {
            Err(Error::SlopeOutOfRange(value.canonical()))
        }
    }

    pub fn value(&self) -> &T {
        &self.value
    }

    /// The turning point `c = 1/2`.
    pub fn turning_point(&self) -> T {
        T::from_ratio(1, 2)
    }

    /// `c1 = s/2`, the critical value and right endpoint of `I`.
    pub fn c1(&self) -> T {
        self.value.clone() / T::from_int(2)
    }

    /// `c2 = s(1 - s/2)`, the left endpoint of the core.
    pub fn c2(&self) -> T {
        self.value.clone() * (T::one() - self.c1())
    }

    /// Right endpoint of the restricted interval `I = [0, s/2]`.
    pub fn domain_sup(&self) -> T {
        self.c1()
    }

    /// `T_s(x) = min{sx, s(1-x)}` for `x` in `[0, 1]`.
    pub fn eval(&self, x: &T) -> Result<T> {
        check_range(x, &T::zero(), &T::one(), "[0,1]")?;
        let left = self.value.clone() * x.clone();
        let right = self.value.clone() * (T::one() - x.clone());
        match x.try_cmp(&self.turning_point()) {
            Some(Ordering::Less) | Some(Ordering::Equal) => Ok(left),
            Some(Ordering::Greater) => Ok(right),
            // Tracked value straddling c: the interval minimum is sound.
            None => Ok(left.min_with(&right)),
        }
    }

    /// `T_s^k(x)`.
    pub fn iterate(&self, x: &T, k: usize) -> Result<T> {
        let mut y = x.clone();
        for _ in 0..k {
            y = self.eval(&y)?;
        }
        Ok(y)
    }

    /// Preimages of `y` inside `I`, deduplicated at the branch coincidence
    /// `y = c1` where both branches return `c`.
    pub fn preimages(&self, y: &T) -> Result<Vec<T>> {
        check_range(y, &T::zero(), &self.domain_sup(), "[0, s/2]")?;
        let left = y.clone() / self.value.clone();
        let right = T::one() - left.clone();
        let mut out = vec![left.clone()];
        match right.try_cmp(&self.domain_sup()) {
            Some(Ordering::Greater) => {}
            Some(_) => {
                if left.try_cmp(&right) != Some(Ordering::Equal) {
                    out.push(right);
                }
            }
            None => {
                return Err(Error::AmbiguousComparison {
                    context: "preimage branch admissibility",
                    step: 0,
                })
            }
        }
        Ok(out)
    }
}

/// How the critical orbit closes up, if it does.
#[derive(Clone, Debug, PartialEq)]
pub enum Periodicity {
    /// `T^k(c) = c` exactly; only reportable under exact policies.
    Exact(usize),
    /// Repeat detected within the tracked tolerance; diagnostic only.
    Approximate(usize),
    None,
}

/// The forward orbit `c1, c2, ..., cN` of the turning point.
#[derive(Clone, Debug)]
pub struct CriticalOrbit<T: Scalar> {
    points: Vec<T>,
    periodicity: Periodicity,
    /// Values of the eventual cycle when one is certified, in orbit order.
    omega_cycle: Option<Vec<T>>,
}

impl<T: Scalar> CriticalOrbit<T> {
    /// `c_k` for `k >= 1`.
    pub fn point(&self, k: usize) -> &T {
        &self.points[k - 1]
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn periodicity(&self) -> &Periodicity {
        &self.periodicity
    }

    /// Exact period of `c` itself, when certified.
    pub fn period(&self) -> Option<usize> {
        match self.periodicity {
            Periodicity::Exact(k) => Some(k),
            _ => None,
        }
    }

    /// The certified eventual cycle (the omega-limit set of `c` when the
    /// orbit is finite). `None` when no exact repeat was found.
    pub fn omega_cycle(&self) -> Option<&[T]> {
        self.omega_cycle.as_deref()
    }
}

/// Computes `c1..cN`, certifying exact (pre)periodicity when the policy
/// allows it.
pub fn critical_orbit<T: Scalar>(slope: &Slope<T>, n: usize) -> Result<CriticalOrbit<T>> {
    assert!(n >= 1, "orbit length must be at least 1");
    let c = slope.turning_point();
    let mut points = Vec::with_capacity(n);
    let mut x = c.clone();
    for _ in 0..n {
        x = slope.eval(&x)?;
        if !T::EXACT && x.err_bound() > TRACKED_ERR_CAP {
            return Err(Error::PrecisionExhausted("critical orbit"));
        }
        points.push(x.clone());
    }

    let mut periodicity = Periodicity::None;
    let mut omega_cycle = None;
    // Period of c: first return of the orbit to c itself.
    for (i, p) in points.iter().enumerate() {
        if p.try_cmp(&c) == Some(Ordering::Equal) {
            periodicity = if T::EXACT {
                Periodicity::Exact(i + 1)
            } else {
                Periodicity::Approximate(i + 1)
            };
            if T::EXACT {
                let mut cycle = vec![c.clone()];
                cycle.extend(points[..i].iter().cloned());
                omega_cycle = Some(cycle);
            }
            break;
        }
    }
    // Eventual cycle: first exact repeat among computed points.
    if omega_cycle.is_none() && T::EXACT {
        'outer: for j in 1..points.len() {
            for i in 0..j {
                if points[i].try_cmp(&points[j]) == Some(Ordering::Equal) {
                    omega_cycle = Some(points[i..j].to_vec());
                    break 'outer;
                }
            }
        }
    }

    Ok(CriticalOrbit {
        points,
        periodicity,
        omega_cycle,
    })
}

/// `min_{N1 <= j <= N2} |x - c_j|`, the finite-window distance from `x` to
/// the critical orbit segment.
pub fn omega_limit_dist<T: Scalar>(
    slope: &Slope<T>,
    x: &T,
    window: (usize, usize),
) -> Result<T> {
    let (n1, n2) = window;
    assert!(n1 < n2, "window must satisfy N1 < N2");
    check_range(x, &T::zero(), &slope.domain_sup(), "[0, s/2]")?;
    let orbit = critical_orbit(slope, n2)?;
    let mut best: Option<T> = None;
    for j in n1..=n2 {
        let d = (x.clone() - orbit.point(j).clone()).abs();
        best = Some(match best {
            None => d,
            Some(b) => b.min_with(&d),
        });
    }
    Ok(best.unwrap())
}

pub(crate) fn check_range<T: Scalar>(
    x: &T,
    lo: &T,
    hi: &T,
    domain: &'static str,
) -> Result<()> {
    let below = x.try_cmp(lo);
    let above = x.try_cmp(hi);
    if below == Some(Ordering::Less) || above == Some(Ordering::Greater) {
        return Err(Error::Domain {
            value: x.canonical(),
            domain,
        });
    }
    Ok(())
}
