//! The inverse limit `K_s` of `(I, T_s)` at desk scale.
//!
//! Points are finite backward-orbit truncations plus a tail descriptor;
//! every metric quantity either comes out exact (structured tails under an
//! exact policy) or carries an explicit error radius. The composant of the
//! endpoint `0bar` is modelled through its fundamental arcs, parametrized
//! by the deepest represented coordinate.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{half_pow, powi, Scalar};
use crate::tentmap::{check_range, Slope};

/// Rule generating coordinates beyond the explicit truncation.
#[derive(Clone, Debug, PartialEq)]
pub enum Tail<T: Scalar> {
    /// Left-branch extension: each deeper coordinate is the previous one
    /// divided by `s`, running down to the fixed point `0`.
    Zero,
    /// The coordinates continue around an exact backward cycle, listed in
    /// order of increasing depth.
    Periodic(Vec<T>),
    /// Any admissible extension; operations report a tail error radius.
    Unspecified,
}

/// A point of the inverse limit: coordinates `x_0, x_{-1}, ..., x_{-m}`
/// (index `k` holds `x_{-k}`) plus a tail rule for the rest.
#[derive(Clone, Debug)]
pub struct ILPoint<T: Scalar> {
    slope: Slope<T>,
    coords: Vec<T>,
    tail: Tail<T>,
}

impl<T: Scalar> ILPoint<T> {
    /// Validates the backward-orbit condition `T(x_{-k-1}) = x_{-k}` and the
    /// coordinate range, then normalizes degenerate tails.
    pub fn new(slope: Slope<T>, coords: Vec<T>, tail: Tail<T>) -> Result<Self> {
        assert!(!coords.is_empty(), "a point needs at least one coordinate");
        let sup = slope.domain_sup();
        for x in &coords {
            check_range(x, &T::zero(), &sup, "[0, s/2]")?;
        }
        for k in 0..coords.len() - 1 {
            let fwd = slope.eval(&coords[k + 1])?;
            match fwd.try_cmp(&coords[k]) {
                Some(Ordering::Equal) | None => {}
                _ => {
                    return Err(Error::Invalid(format!(
                        "coordinates are not a backward orbit at depth {}: T({}) = {} != {}",
                        k + 1,
                        coords[k + 1].canonical(),
                        fwd.canonical(),
                        coords[k].canonical()
                    )))
                }
            }
        }
        let tail = match tail {
            Tail::Periodic(cycle) => {
                assert!(!cycle.is_empty(), "periodic tail needs a nonempty cycle");
                for w in &cycle {
                    check_range(w, &T::zero(), &sup, "[0, s/2]")?;
                }
                // T must map each cycle entry to its shallower neighbour,
                // wrapping onto the deepest explicit coordinate.
                let deepest = coords.last().unwrap();
                let first = slope.eval(&cycle[0])?;
                if first.try_cmp(deepest) == Some(Ordering::Less)
                    || first.try_cmp(deepest) == Some(Ordering::Greater)
                {
                    return Err(Error::Invalid(
                        "periodic tail does not continue the truncation".into(),
                    ));
                }
                for j in 0..cycle.len() {
                    let next = &cycle[(j + 1) % cycle.len()];
                    let fwd = slope.eval(next)?;
                    if fwd.try_cmp(&cycle[j]) == Some(Ordering::Less)
                        || fwd.try_cmp(&cycle[j]) == Some(Ordering::Greater)
                    {
                        return Err(Error::Invalid("periodic tail is not a backward cycle".into()));
                    }
                }
                if cycle.iter().all(|w| w.is_zero()) {
                    Tail::Zero
                } else {
                    Tail::Periodic(cycle)
                }
            }
            other => other,
        };
        Ok(ILPoint { slope, coords, tail })
    }

    /// The endpoint `0bar = (..., 0, 0, 0)`.
    pub fn zero_point(slope: Slope<T>) -> Self {
        ILPoint {
            slope,
            coords: vec![T::zero()],
            tail: Tail::Zero,
        }
    }

    /// The fixed point `(..., p, p, p)` with `p = s/(1+s)`.
    pub fn fixed_point(slope: Slope<T>) -> Self {
        let p = slope.value().clone() / (T::one() + slope.value().clone());
        ILPoint {
            slope,
            coords: vec![p.clone()],
            tail: Tail::Periodic(vec![p]),
        }
    }

    /// A point whose deepest explicit coordinate is `c` preceded by the
    /// critical orbit segment `c_i, c_{i-1}, ..., c_1` and followed by the
    /// left-branch tail: the critical-orbit tail in normalized form.
    pub fn from_critical_orbit(slope: Slope<T>, i: usize) -> Result<Self> {
        let c = slope.turning_point();
        let mut backward = vec![c.clone()];
        let mut x = c;
        for _ in 0..i {
            x = slope.eval(&x)?;
            backward.push(x.clone());
        }
        backward.reverse(); // c_i, ..., c_1, c read top-down
        ILPoint::new(slope, backward, Tail::Zero)
    }

    pub fn slope(&self) -> &Slope<T> {
        &self.slope
    }

    pub fn truncation_depth(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn explicit_coords(&self) -> &[T] {
        &self.coords
    }

    pub fn tail(&self) -> &Tail<T> {
        &self.tail
    }

    pub fn has_structured_tail(&self) -> bool {
        !matches!(self.tail, Tail::Unspecified)
    }

    /// `x_{-k}`, materializing from the tail when `k` exceeds the
    /// truncation depth.
    pub fn coordinate(&self, k: usize) -> Result<T> {
        if k < self.coords.len() {
            return Ok(self.coords[k].clone());
        }
        let beyond = k - (self.coords.len() - 1);
        match &self.tail {
            Tail::Zero => {
                let deepest = self.coords.last().unwrap();
                Ok(deepest.clone() * powi(&(T::one() / self.slope.value().clone()), beyond as i32))
            }
            Tail::Periodic(cycle) => Ok(cycle[(beyond - 1) % cycle.len()].clone()),
            Tail::Unspecified => Err(Error::InsufficientDepth {
                needed: k,
                have: self.coords.len() - 1,
            }),
        }
    }

    /// Extends the explicit truncation to depth `m` using the tail rule.
    pub fn materialize(&self, m: usize) -> Result<ILPoint<T>> {
        if m < self.coords.len() {
            return Ok(self.clone());
        }
        let mut coords = self.coords.clone();
        for k in self.coords.len()..=m {
            coords.push(self.coordinate(k)?);
        }
        Ok(ILPoint {
            slope: self.slope.clone(),
            coords,
            tail: self.tail.clone(),
        })
    }

    /// The shift homeomorphism `sigma^r`: positive powers append forward
    /// images on top, negative powers drop coordinates (materializing from
    /// a structured tail when the truncation is too shallow).
    pub fn shift(&self, r: i64) -> Result<ILPoint<T>> {
        let mut point = self.clone();
        if r >= 0 {
            for _ in 0..r {
                let top = self.slope.eval(&point.coords[0])?;
                point.coords.insert(0, top);
            }
        } else {
            let down = (-r) as usize;
            if point.coords.len() <= down {
                point = point.materialize(point.truncation_depth() + down)?;
            }
            if point.coords.len() <= down {
                return Err(Error::InsufficientDepth {
                    needed: down,
                    have: point.coords.len() - 1,
                });
            }
            point.coords.drain(..down);
            // A periodic tail has rotated relative to the new deepest
            // coordinate; rebuild it by materializing one cycle.
            if let Tail::Periodic(cycle) = &self.tail {
                let m = point.coords.len() - 1;
                let mut rotated = Vec::with_capacity(cycle.len());
                for j in 1..=cycle.len() {
                    rotated.push(self.coordinate(m + down + j)?);
                }
                point.tail = Tail::Periodic(rotated);
            }
        }
        Ok(point)
    }

    /// Exact agreement of coordinates up to depth `m`.
    pub fn agrees_to_depth(&self, other: &ILPoint<T>, m: usize) -> Result<bool> {
        for k in 0..=m {
            if self.coordinate(k)?.try_cmp(&other.coordinate(k)?) != Some(Ordering::Equal) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl<T: Scalar> fmt::Display for ILPoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tail = match &self.tail {
            Tail::Zero => "0-tail".to_string(),
            Tail::Periodic(cycle) => format!(
                "cycle[{}]",
                cycle
                    .iter()
                    .map(|w| w.canonical())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            Tail::Unspecified => "?".to_string(),
        };
        write!(
            f,
            "({}; ..., {})",
            tail,
            self.coords
                .iter()
                .rev()
                .map(|x| x.canonical())
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

/// A metric value together with its error radius. The radius is zero for
/// pairs of structured points under an exact policy.
#[derive(Clone, Debug, PartialEq)]
pub struct Dist<T: Scalar> {
    pub value: T,
    pub error: T,
}

impl<T: Scalar> Dist<T> {
    pub fn exact(value: T) -> Self {
        Dist {
            value,
            error: T::zero(),
        }
    }

    pub fn upper(&self) -> T {
        self.value.clone() + self.error.clone()
    }
}

/// The metric `d(x, y) = sum_{k >= 0} 2^{-k} |x_{-k} - y_{-k}|`.
///
/// The explicit part runs to the deeper of the two truncations; the tail
/// contribution is summed in closed form when both tails are structured
/// and otherwise bounded by `s 2^{-m}`.
pub fn metric_dist<T: Scalar>(x: &ILPoint<T>, y: &ILPoint<T>) -> Result<Dist<T>> {
    if x.slope() != y.slope() {
        return Err(Error::MixedSlopes(
            x.slope().value().canonical(),
            y.slope().value().canonical(),
        ));
    }
    let m = x.truncation_depth().max(y.truncation_depth());
    let mut value = T::zero();
    for k in 0..=m {
        let term = (x.coordinate(k)? - y.coordinate(k)?).abs();
        value = value + half_pow::<T>(k) * term;
    }

    let slope = x.slope();
    match (&x.tail, &y.tail) {
        (Tail::Unspecified, _) | (_, Tail::Unspecified) => {
            let error = half_pow::<T>(m) * slope.value().clone();
            Ok(Dist { value, error })
        }
        (Tail::Zero, Tail::Zero) => {
            // sum_{j>=1} 2^-(m+j) |u - v| s^-j = 2^-m |u - v| / (2s - 1)
            let u = x.coordinate(m)?;
            let v = y.coordinate(m)?;
            let rest = half_pow::<T>(m) * (u - v).abs()
                / (T::from_int(2) * slope.value().clone() - T::one());
            Ok(Dist::exact(value + rest))
        }
        (Tail::Periodic(_), Tail::Periodic(_)) => {
            let la = cycle_len(&x.tail);
            let lb = cycle_len(&y.tail);
            let l = num_integer::lcm(la, lb);
            // One aligned period of coordinate gaps, then the geometric
            // factor 1 / (1 - 2^-L).
            let mut base = T::zero();
            for j in 1..=l {
                let term = (x.coordinate(m + j)? - y.coordinate(m + j)?).abs();
                base = base + half_pow::<T>(m + j) * term;
            }
            let rest = base / (T::one() - half_pow::<T>(l));
            Ok(Dist::exact(value + rest))
        }
        (Tail::Zero, Tail::Periodic(_)) => Ok(Dist::exact(
            value + zero_vs_periodic_tail(x, y, m)?,
        )),
        (Tail::Periodic(_), Tail::Zero) => Ok(Dist::exact(
            value + zero_vs_periodic_tail(y, x, m)?,
        )),
    }
}

fn cycle_len<T: Scalar>(tail: &Tail<T>) -> usize {
    match tail {
        Tail::Periodic(cycle) => cycle.len(),
        _ => 1,
    }
}

/// Exact tail sum for a left-branch tail against a periodic one, both read
/// from depth `m`: the geometric coordinates eventually fall below the
/// cycle, after which every gap has a fixed sign per residue class.
fn zero_vs_periodic_tail<T: Scalar>(
    zero: &ILPoint<T>,
    per: &ILPoint<T>,
    m: usize,
) -> Result<T> {
    let slope = zero.slope();
    let s = slope.value().clone();
    let cycle = match per.tail() {
        Tail::Periodic(cycle) => cycle.clone(),
        _ => unreachable!(),
    };
    let l = cycle.len();
    let u = zero.coordinate(m)?;

    // Smallest positive cycle value; all-zero cycles were normalized away.
    let min_pos = cycle
        .iter()
        .filter(|w| !w.is_zero())
        .cloned()
        .reduce(|a, b| a.min_with(&b))
        .expect("periodic tail has a positive entry");

    // First depth offset j with u s^-j below every positive cycle value.
    let mut split = 1usize;
    let mut geo = u.clone() / s.clone();
    while geo.try_cmp(&min_pos) != Some(Ordering::Less) {
        split += 1;
        geo = geo / s.clone();
        assert!(split < 10_000, "tail split failed to terminate");
    }

    // Finite head of the tail sum.
    let mut total = T::zero();
    for j in 1..split {
        let term = (zero.coordinate(m + j)? - per.coordinate(m + j)?).abs();
        total = total + half_pow::<T>(m + j) * term;
    }

    // Beyond the split: per-residue closed forms. For a residue with cycle
    // value w > 0 the gap is w - u s^-j; for w = 0 it is u s^-j.
    let q = T::one() / (T::from_int(2) * s.clone()); // ratio of u s^-j 2^-j
    let geom_block = T::one() - powi(&q, l as i32); // 1 - q^L
    let per_block = T::one() - half_pow::<T>(l); // 1 - 2^-L
    for r in 0..l {
        let j0 = split + r;
        let w = per.coordinate(m + j0)?;
        // sum over j = j0, j0+L, ... of u s^-j 2^-j, times 2^-m alignment
        let geo_part = u.clone() * powi(&q, j0 as i32) * half_pow::<T>(m) / geom_block.clone();
        if w.is_zero() {
            total = total + geo_part;
        } else {
            let per_part = w * half_pow::<T>(m + j0) / per_block.clone();
            total = total + per_part - geo_part;
        }
    }
    Ok(total)
}

/// The arc `[0bar, s_n]` of the composant of `0bar`, parametrized by its
/// deepest represented coordinate `u = pi_{p+n} in [0, c]` with the
/// left-branch tail below.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalArc<T: Scalar> {
    slope: Slope<T>,
    p: usize,
    n: usize,
}

impl<T: Scalar> FundamentalArc<T> {
    pub fn new(slope: Slope<T>, p: usize, n: usize) -> Self {
        assert!(n >= 1, "arc depth must be at least 1");
        FundamentalArc { slope, p, n }
    }

    pub fn slope(&self) -> &Slope<T> {
        &self.slope
    }

    pub fn projection_index(&self) -> usize {
        self.p
    }

    pub fn depth(&self) -> usize {
        self.n
    }

    /// Total represented depth `p + n`.
    pub fn repr_depth(&self) -> usize {
        self.p + self.n
    }

    /// Right end of the parameter range: the turning point `c`.
    pub fn param_sup(&self) -> T {
        self.slope.turning_point()
    }

    /// The point with `pi_{p+n} = u`; `u = 0` gives `0bar` and `u = c` the
    /// salient endpoint.
    pub fn point(&self, u: &T) -> Result<ILPoint<T>> {
        check_range(u, &T::zero(), &self.param_sup(), "[0, c]")?;
        let depth = self.repr_depth();
        let mut backward = Vec::with_capacity(depth + 1);
        backward.push(u.clone());
        let mut x = u.clone();
        for _ in 0..depth {
            x = self.slope.eval(&x)?;
            backward.push(x.clone());
        }
        backward.reverse();
        ILPoint::new(self.slope.clone(), backward, Tail::Zero)
    }

    /// `pi_l` along the arc as a function of the parameter: `T^{p+n-l}(u)`.
    pub fn projection_of_param(&self, l: usize, u: &T) -> Result<T> {
        assert!(l <= self.repr_depth());
        self.slope.iterate(u, self.repr_depth() - l)
    }
}

/// Sample parameters for Hausdorff computations: `grid + 1` evenly spaced
/// values of `[lo, hi]`.
pub fn uniform_params<T: Scalar>(lo: &T, hi: &T, grid: usize) -> Vec<T> {
    assert!(grid >= 1);
    let step = (hi.clone() - lo.clone()) / T::from_int(grid as i64);
    (0..=grid)
        .map(|i| lo.clone() + step.clone() * T::from_int(i as i64))
        .collect()
}

/// Hausdorff distance between two finite point samples under
/// [`metric_dist`], with the largest per-pair error radius folded in.
pub fn arc_hausdorff<T: Scalar>(a: &[ILPoint<T>], b: &[ILPoint<T>]) -> Result<Dist<T>> {
    assert!(!a.is_empty() && !b.is_empty(), "samples must be nonempty");
    let mut worst = T::zero();
    let mut err = T::zero();
    for (from, to) in [(a, b), (b, a)] {
        for x in from {
            let mut best: Option<Dist<T>> = None;
            for y in to {
                let d = metric_dist(x, y)?;
                best = Some(match best {
                    None => d,
                    Some(cur) => {
                        if d.value.try_cmp(&cur.value) == Some(Ordering::Less) {
                            d
                        } else {
                            cur
                        }
                    }
                });
            }
            let best = best.unwrap();
            if best.value.try_cmp(&worst) == Some(Ordering::Greater) {
                worst = best.value;
            }
            if best.error.try_cmp(&err) == Some(Ordering::Greater) {
                err = best.error;
            }
        }
    }
    Ok(Dist { value: worst, error: err })
}
