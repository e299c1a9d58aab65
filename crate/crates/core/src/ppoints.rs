//! Fold enumeration on fundamental arcs.
//!
//! A point of the arc is a p-point when some coordinate at depth `p + l`
//! sits exactly on the turning point; `l` is its level. Enumeration solves
//! `T^j(u) = c` exactly for every `j` up to the arc depth by walking the
//! preimage tree, so levels are discrete data, never the output of a
//! numeric root finder.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::inverse_limit::{FundamentalArc, ILPoint};
use crate::scalar::Scalar;
use crate::tentmap::Slope;

/// Hard cap on enumeration depth; the solution count grows like `s^n`.
pub const MAX_ENUM_DEPTH: usize = 26;

/// A p-level: finite fold depth, or the convention `infinity` at `0bar`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Finite(usize),
    Infinite,
}

impl Level {
    pub fn finite(self) -> Option<usize> {
        match self {
            Level::Finite(l) => Some(l),
            Level::Infinite => None,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(l) => write!(f, "{l}"),
            Level::Infinite => write!(f, "∞"),
        }
    }
}

/// A p-point of a fundamental arc, by parameter and level.
#[derive(Clone, Debug, PartialEq)]
pub struct PPoint<T: Scalar> {
    pub u: T,
    pub level: Level,
}

/// The ordered level sequence along an arc.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldingPattern {
    levels: Vec<Level>,
}

impl FoldingPattern {
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Compact fixture form: single digits run together, multi-digit
    /// levels bracketed, `∞` for the basepoint.
    pub fn compact(&self) -> String {
        self.levels
            .iter()
            .map(|l| match l {
                Level::Infinite => "∞".to_string(),
                Level::Finite(v) if *v < 10 => v.to_string(),
                Level::Finite(v) => format!("({v})"),
            })
            .collect()
    }
}

impl fmt::Display for FoldingPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.levels {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
            first = false;
        }
        Ok(())
    }
}

/// Solution sets of `T^j(u) = c` over `I` for `j = 0..=n`, via the
/// preimage tree.
pub(crate) fn turning_preimages<T: Scalar>(
    slope: &Slope<T>,
    n: usize,
) -> Result<Vec<Vec<T>>> {
    let mut sols = Vec::with_capacity(n + 1);
    sols.push(vec![slope.turning_point()]);
    for j in 1..=n {
        let mut next = Vec::new();
        for y in &sols[j - 1] {
            next.extend(slope.preimages(y)?);
        }
        sols.push(next);
    }
    Ok(sols)
}

/// All p-points of the arc, sorted by parameter, with the basepoint `0bar`
/// prepended at level `∞`.
///
/// A parameter solving `T^j(u) = c` for several `j` (possible exactly when
/// the critical orbit is periodic) keeps the deepest coordinate hit, i.e.
/// the largest level; anything else breaks the salient structure.
pub fn enumerate_ppoints<T: Scalar>(arc: &FundamentalArc<T>) -> Result<Vec<PPoint<T>>> {
    let n = arc.depth();
    if n > MAX_ENUM_DEPTH {
        return Err(Error::DepthCap {
            requested: n,
            cap: MAX_ENUM_DEPTH,
        });
    }
    let slope = arc.slope();
    let c = slope.turning_point();
    let sols = turning_preimages(slope, n)?;

    let mut hits: Vec<(T, usize)> = Vec::new();
    for (j, layer) in sols.iter().enumerate() {
        for u in layer {
            if u.try_cmp(&c) != Some(Ordering::Greater) {
                hits.push((u.clone(), j));
            }
        }
    }
    sort_exact(&mut hits, "p-point enumeration")?;

    let mut points = vec![PPoint {
        u: T::zero(),
        level: Level::Infinite,
    }];
    let mut iter = hits.into_iter().peekable();
    while let Some((u, mut j)) = iter.next() {
        while let Some((next_u, next_j)) = iter.peek() {
            if next_u.try_cmp(&u) == Some(Ordering::Equal) {
                // Duplicate parameter: legal only when the critical orbit
                // returns to c after next_j - j steps.
                let back = slope.iterate(&c, next_j - j)?;
                if back.try_cmp(&c) != Some(Ordering::Equal) {
                    return Err(Error::Invalid(format!(
                        "parameter {} solves both T^{} and T^{} without a critical return",
                        u.canonical(),
                        j,
                        next_j
                    )));
                }
                j = j.min(*next_j);
                iter.next();
            } else {
                break;
            }
        }
        points.push(PPoint {
            u,
            level: Level::Finite(n - j),
        });
    }
    Ok(points)
}

pub(crate) fn sort_exact<T: Scalar, A>(items: &mut [(T, A)], context: &'static str) -> Result<()> {
    let mut ambiguous = false;
    items.sort_by(|a, b| match a.0.try_cmp(&b.0) {
        Some(ord) => ord,
        None => {
            ambiguous = true;
            Ordering::Equal
        }
    });
    if ambiguous {
        Err(Error::AmbiguousComparison { context, step: 0 })
    } else {
        Ok(())
    }
}

/// Level sequence of [`enumerate_ppoints`] in arc order.
pub fn folding_pattern<T: Scalar>(arc: &FundamentalArc<T>) -> Result<FoldingPattern> {
    let levels = enumerate_ppoints(arc)?
        .into_iter()
        .map(|p| p.level)
        .collect();
    Ok(FoldingPattern { levels })
}

/// A salient point: the i-th running level maximum along the composant.
#[derive(Clone, Debug)]
pub struct SalientPoint<T: Scalar> {
    /// Its level equals this index.
    pub index: usize,
    pub ppoint: PPoint<T>,
    pub point: ILPoint<T>,
}

/// The first `count` salient points at projection index `p`, read off the
/// depth-`count` arc as the successive running maxima of the pattern.
pub fn salient_points<T: Scalar>(
    slope: &Slope<T>,
    p: usize,
    count: usize,
) -> Result<Vec<SalientPoint<T>>> {
    assert!(count >= 1);
    let arc = FundamentalArc::new(slope.clone(), p, count);
    let mut out = Vec::with_capacity(count);
    let mut best = 0usize;
    for pp in enumerate_ppoints(&arc)? {
        if let Level::Finite(l) = pp.level {
            if l > best || (l >= 1 && out.is_empty()) {
                best = l;
                out.push(SalientPoint {
                    index: l,
                    ppoint: pp.clone(),
                    point: arc.point(&pp.u)?,
                });
            }
        }
    }
    for (i, sp) in out.iter().enumerate() {
        if sp.index != i + 1 {
            return Err(Error::Invalid(format!(
                "salient index {} found at position {}",
                sp.index,
                i + 1
            )));
        }
    }
    Ok(out)
}

/// Outcome of checking that the shift moves every p-point of a depth-`n`
/// arc onto a p-point of the depth-`n + r` arc with its level raised by `r`.
#[derive(Clone, Debug)]
pub struct LevelShiftReport {
    pub checked: usize,
    pub violation: Option<String>,
}

impl LevelShiftReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn level_shift_check<T: Scalar>(
    arc: &FundamentalArc<T>,
    r: usize,
) -> Result<LevelShiftReport> {
    let slope = arc.slope();
    let target = FundamentalArc::new(slope.clone(), arc.projection_index(), arc.depth() + r);
    let source_points = enumerate_ppoints(arc)?;
    let target_points = enumerate_ppoints(&target)?;

    let mut checked = 0usize;
    for pp in &source_points {
        let Level::Finite(level) = pp.level else {
            continue;
        };
        let found = target_points.iter().find(|tp| {
            tp.u.try_cmp(&pp.u) == Some(Ordering::Equal)
        });
        let Some(found) = found else {
            return Ok(LevelShiftReport {
                checked,
                violation: Some(format!(
                    "parameter {} is not a p-point of the deeper arc",
                    pp.u.canonical()
                )),
            });
        };
        if found.level != Level::Finite(level + r) {
            return Ok(LevelShiftReport {
                checked,
                violation: Some(format!(
                    "level {} shifts to {:?}, expected {}",
                    level,
                    found.level,
                    level + r
                )),
            });
        }
        // Pointwise: sigma^r of the source point is the target point.
        let image = arc.point(&pp.u)?.shift(r as i64)?;
        let direct = target.point(&pp.u)?;
        if !image.agrees_to_depth(&direct, target.repr_depth())? {
            return Ok(LevelShiftReport {
                checked,
                violation: Some(format!(
                    "shift image of parameter {} differs coordinatewise",
                    pp.u.canonical()
                )),
            });
        }
        checked += 1;
    }
    Ok(LevelShiftReport {
        checked,
        violation: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Quad;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    fn slope2() -> Slope<BigRational> {
        Slope::new(rat(2, 1)).unwrap()
    }

    fn golden() -> Slope<Quad> {
        Slope::new(Quad::golden()).unwrap()
    }

    #[test]
    fn slope_two_depth_two_enumeration() {
        let arc = FundamentalArc::new(slope2(), 0, 2);
        let pts = enumerate_ppoints(&arc).unwrap();
        let us: Vec<_> = pts.iter().map(|p| p.u.clone()).collect();
        assert_eq!(
            us,
            vec![rat(0, 1), rat(1, 8), rat(1, 4), rat(3, 8), rat(1, 2)]
        );
        let levels: Vec<_> = pts.iter().map(|p| p.level).collect();
        assert_eq!(
            levels,
            vec![
                Level::Infinite,
                Level::Finite(0),
                Level::Finite(1),
                Level::Finite(0),
                Level::Finite(2)
            ]
        );
    }

    #[test]
    fn slope_two_depth_one_enumeration() {
        let arc = FundamentalArc::new(slope2(), 0, 1);
        let pts = enumerate_ppoints(&arc).unwrap();
        let us: Vec<_> = pts.iter().map(|p| p.u.clone()).collect();
        assert_eq!(us, vec![rat(0, 1), rat(1, 4), rat(1, 2)]);
        let levels: Vec<_> = pts.iter().map(|p| p.level).collect();
        assert_eq!(
            levels,
            vec![Level::Infinite, Level::Finite(0), Level::Finite(1)]
        );
    }

    #[test]
    fn last_entry_is_the_endpoint_at_full_level() {
        for n in 1..=6 {
            let arc = FundamentalArc::new(slope2(), 2, n);
            let pts = enumerate_ppoints(&arc).unwrap();
            let last = pts.last().unwrap();
            assert_eq!(last.u, rat(1, 2));
            assert_eq!(last.level, Level::Finite(n));
        }
    }

    #[test]
    fn point_count_doubles_for_the_full_slope() {
        for n in 1..=10 {
            let arc = FundamentalArc::new(slope2(), 0, n);
            let pts = enumerate_ppoints(&arc).unwrap();
            assert_eq!(pts.len(), (1usize << n) + 1);
        }
    }

    #[test]
    fn folding_pattern_prefix_and_examples() {
        let fp2 = folding_pattern(&FundamentalArc::new(slope2(), 0, 2)).unwrap();
        assert_eq!(fp2.compact(), "∞0102");
        let fp3 = folding_pattern(&FundamentalArc::new(slope2(), 0, 3)).unwrap();
        assert_eq!(fp3.compact(), "∞01020103");
    }

    #[test]
    fn golden_pattern_handles_critical_returns() {
        // The golden critical orbit returns to c after three steps, so
        // deep parameters solve several iterate equations at once; the
        // deepest hit wins and the salient at u = c keeps level n.
        let fp = folding_pattern(&FundamentalArc::new(golden(), 0, 4)).unwrap();
        assert_eq!(fp.compact(), "∞010201310204");
        assert!(fp.compact().starts_with("∞010201"));
    }

    #[test]
    fn pattern_is_prefix_stable_in_depth() {
        for (p, n) in [(0usize, 5usize), (2, 4)] {
            let shallow = folding_pattern(&FundamentalArc::new(slope2(), p, n)).unwrap();
            let deep = folding_pattern(&FundamentalArc::new(slope2(), p, n + 1)).unwrap();
            assert_eq!(shallow.levels(), &deep.levels()[..shallow.len()]);
            let g_shallow = folding_pattern(&FundamentalArc::new(golden(), p, n)).unwrap();
            let g_deep = folding_pattern(&FundamentalArc::new(golden(), p, n + 1)).unwrap();
            assert_eq!(g_shallow.levels(), &g_deep.levels()[..g_shallow.len()]);
        }
    }

    #[test]
    fn salient_points_carry_their_index_as_level() {
        let sal = salient_points(&golden(), 0, 6).unwrap();
        assert_eq!(sal.len(), 6);
        for (i, sp) in sal.iter().enumerate() {
            assert_eq!(sp.index, i + 1);
            assert_eq!(sp.ppoint.level, Level::Finite(i + 1));
        }
        // sigma(s_i) = s_{i+1}.
        for pair in sal.windows(2) {
            let shifted = pair[0].point.shift(1).unwrap();
            assert!(shifted
                .agrees_to_depth(&pair[1].point, pair[1].point.truncation_depth())
                .unwrap());
        }
    }

    #[test]
    fn salient_dominance() {
        // Every p-point strictly between 0bar and the i-th salient has
        // level below i.
        for n in 2..=8 {
            let arc = FundamentalArc::new(golden(), 1, n);
            let pts = enumerate_ppoints(&arc).unwrap();
            let levels: Vec<usize> = pts[1..]
                .iter()
                .map(|pp| pp.level.finite().unwrap())
                .collect();
            for i in 1..=n {
                let pos = levels.iter().position(|&l| l == i).unwrap();
                assert!(levels[..pos].iter().all(|&l| l < i));
            }
            assert_eq!(*levels.last().unwrap(), n);
        }
    }

    #[test]
    fn level_shift_examples() {
        let report = level_shift_check(&FundamentalArc::new(slope2(), 0, 2), 1).unwrap();
        assert!(report.ok());
        let report = level_shift_check(&FundamentalArc::new(golden(), 0, 3), 2).unwrap();
        assert!(report.ok());
        let report = level_shift_check(&FundamentalArc::new(slope2(), 1, 3), 0).unwrap();
        assert!(report.ok());
    }

    #[test]
    fn enumeration_depth_is_capped() {
        let arc = FundamentalArc::new(slope2(), 0, 27);
        assert!(matches!(
            enumerate_ppoints(&arc),
            Err(Error::DepthCap { .. })
        ));
    }
}
