//! Itineraries and kneading sequences.
//!
//! Words are over `{0, 1, C}` with `C` reserved for exact hits of the
//! turning point. Kneading comparisons use the parity-lexicographic order
//! (first difference decides, direction flipped when the common prefix
//! holds an odd number of `1`s), after resolving each `C` into the larger
//! of its two one-sided readings. That order makes the kneading sequence
//! monotone in the slope, which is what the bisection in
//! [`slope_from_kneading`] consumes.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, TrackedFloat};
use crate::tentmap::Slope;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Zero,
    One,
    /// The point sits exactly on the turning point.
    Crit,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Crit => 'C',
        }
    }

    pub fn from_char(ch: char) -> Option<Symbol> {
        match ch {
            '0' => Some(Symbol::Zero),
            '1' => Some(Symbol::One),
            'C' | 'c' => Some(Symbol::Crit),
            _ => None,
        }
    }
}

/// Tail descriptor making a word indexable beyond its explicit symbols.
#[derive(Clone, Debug, PartialEq)]
pub enum WordTail {
    None,
    Periodic(Vec<Symbol>),
    Pattern(RunGrowthWord),
}

/// Generator for words of the shape `head (1^k 0)(1^{k+1} 0)(1^{k+2} 0)...`
/// with strictly growing runs of ones separated by single zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct RunGrowthWord {
    pub head: Vec<Symbol>,
    pub first_run: usize,
}

impl RunGrowthWord {
    /// Symbol at 0-based position `i` of the generated tail (after `head`).
    fn tail_symbol(&self, mut i: usize) -> Symbol {
        // Block k (k = first_run, first_run+1, ...) is 1^k 0, length k+1.
        let mut k = self.first_run;
        loop {
            if i < k {
                return Symbol::One;
            }
            if i == k {
                return Symbol::Zero;
            }
            i -= k + 1;
            k += 1;
        }
    }

    fn symbol_at(&self, i: usize) -> Symbol {
        if i < self.head.len() {
            self.head[i]
        } else {
            self.tail_symbol(i - self.head.len())
        }
    }
}

/// A finite word plus an optional tail rule.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolWord {
    symbols: Vec<Symbol>,
    tail: WordTail,
}

impl SymbolWord {
    pub fn finite(symbols: Vec<Symbol>) -> Self {
        SymbolWord {
            symbols,
            tail: WordTail::None,
        }
    }

    pub fn with_tail(symbols: Vec<Symbol>, tail: WordTail) -> Self {
        SymbolWord { symbols, tail }
    }

    /// The kneading sequence `1 0 0 1 0 1^2 0 1^3 0 ...` of the slope whose
    /// inverse limit carries its folding points on finitely many
    /// arc-components.
    pub fn growing_runs_example() -> Self {
        SymbolWord::with_tail(
            Vec::new(),
            WordTail::Pattern(RunGrowthWord {
                head: vec![Symbol::One, Symbol::Zero, Symbol::Zero],
                first_run: 1,
            }),
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut symbols = Vec::with_capacity(text.len());
        for ch in text.chars() {
            match Symbol::from_char(ch) {
                Some(sym) => symbols.push(sym),
                None => {
                    return Err(Error::Invalid(format!(
                        "invalid symbol {ch:?}: words are over 0, 1, C"
                    )))
                }
            }
        }
        Ok(SymbolWord::finite(symbols))
    }

    pub fn explicit(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn tail(&self) -> &WordTail {
        &self.tail
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty() && matches!(self.tail, WordTail::None)
    }

    /// Symbol at 0-based position `i`, using the tail rule past the
    /// explicit part. `None` only for finite words.
    pub fn symbol_at(&self, i: usize) -> Option<Symbol> {
        if i < self.symbols.len() {
            return Some(self.symbols[i]);
        }
        match &self.tail {
            WordTail::None => None,
            WordTail::Periodic(cycle) => Some(cycle[(i - self.symbols.len()) % cycle.len()]),
            WordTail::Pattern(gen) => Some(gen.symbol_at(i - self.symbols.len())),
        }
    }

    /// First `n` symbols; errors if the word is shorter and has no tail.
    pub fn prefix(&self, n: usize) -> Result<Vec<Symbol>> {
        (0..n)
            .map(|i| self.symbol_at(i).ok_or(Error::FiniteWord))
            .collect()
    }
}

impl fmt::Display for SymbolWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{}", s.as_char())?;
        }
        match &self.tail {
            WordTail::None => Ok(()),
            WordTail::Periodic(cycle) => {
                write!(f, "({})*", word_string(cycle))
            }
            WordTail::Pattern(gen) => {
                write!(f, "{}<runs from {}>", word_string(&gen.head), gen.first_run)
            }
        }
    }
}

/// Itinerary of `x` under `T_s` to length `n`: `0` left of `c`, `C` at `c`,
/// `1` right of `c`.
pub fn itinerary<T: Scalar>(slope: &Slope<T>, x: &T, n: usize) -> Result<SymbolWord> {
    crate::tentmap::check_range(x, &T::zero(), &slope.domain_sup(), "[0, s/2]")?;
    let c = slope.turning_point();
    let mut symbols = Vec::with_capacity(n);
    let mut y = x.clone();
    for step in 0..n {
        let sym = match y.try_cmp(&c) {
            Some(Ordering::Less) => Symbol::Zero,
            Some(Ordering::Equal) => Symbol::Crit,
            Some(Ordering::Greater) => Symbol::One,
            None => {
                return Err(Error::AmbiguousComparison {
                    context: "itinerary symbol",
                    step,
                })
            }
        };
        symbols.push(sym);
        y = slope.eval(&y)?;
    }
    Ok(SymbolWord::finite(symbols))
}

/// The kneading sequence: the itinerary of `c1`.
pub fn kneading_sequence<T: Scalar>(slope: &Slope<T>, n: usize) -> Result<SymbolWord> {
    itinerary(slope, &slope.c1(), n)
}

/// Resolves every `C` into the larger of its two one-sided readings under
/// the parity-lexicographic order: even count of ones so far picks `1`,
/// odd picks `0`.
pub fn resolve_max(symbols: &[Symbol]) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(symbols.len());
    let mut ones = 0usize;
    for &sym in symbols {
        let resolved = match sym {
            Symbol::Crit => {
                if ones % 2 == 0 {
                    Symbol::One
                } else {
                    Symbol::Zero
                }
            }
            other => other,
        };
        if resolved == Symbol::One {
            ones += 1;
        }
        out.push(resolved);
    }
    out
}

/// Parity-lexicographic comparison on the common length, after `C`
/// resolution. Returns `Equal` when one word is a prefix of the other.
pub fn kneading_cmp(a: &[Symbol], b: &[Symbol]) -> Ordering {
    let ra = resolve_max(a);
    let rb = resolve_max(b);
    let mut ones = 0usize;
    for (x, y) in ra.iter().zip(rb.iter()) {
        if x != y {
            let natural = if x == &Symbol::Zero {
                Ordering::Less
            } else {
                Ordering::Greater
            };
            return if ones % 2 == 0 {
                natural
            } else {
                natural.reverse()
            };
        }
        if *x == Symbol::One {
            ones += 1;
        }
    }
    Ordering::Equal
}

/// Shift-maximality of a prefix in the parity-lexicographic order: no
/// shifted suffix may exceed the word itself on the comparable length.
pub fn is_shift_maximal(symbols: &[Symbol]) -> bool {
    if symbols.is_empty() {
        return false;
    }
    let resolved = resolve_max(symbols);
    if resolved[0] != Symbol::One {
        return false;
    }
    for k in 1..resolved.len() {
        if kneading_cmp(&resolved[k..], &resolved) == Ordering::Greater {
            return false;
        }
    }
    true
}

/// Result of identifying a slope from a kneading prefix.
///
/// `lower..=upper` is the interval of slopes whose kneading sequence starts
/// with the prefix, with each edge located to within the requested
/// precision; `midpoint` carries the interval half-width as its error.
#[derive(Clone, Debug)]
pub struct SlopeMatch {
    pub lower: BigRational,
    pub upper: BigRational,
    pub midpoint: TrackedFloat,
    pub edge_tolerance: f64,
}

impl SlopeMatch {
    pub fn contains(&self, s: &BigRational) -> bool {
        *s >= self.lower && *s <= self.upper
    }

    pub fn width(&self) -> BigRational {
        self.upper.clone() - self.lower.clone()
    }
}

// Rational lower cutoff just above sqrt2; slopes below it are outside the
// bisection's reach.
fn slope_floor() -> BigRational {
    BigRational::from_ratio(1_414_214, 1_000_000)
}

/// Locates the interval of slopes whose kneading sequence extends `prefix`,
/// by exact rational bisection on `(sqrt2, 2]`, and returns its midpoint.
///
/// Kneading prefixes of length `n` pin the slope only to a cylinder of
/// positive width, so the midpoint is meaningful together with the
/// reported interval; each edge is resolved to within `eps`.
pub fn slope_from_kneading(prefix: &SymbolWord, eps: f64) -> Result<SlopeMatch> {
    assert!(eps > 0.0, "eps must be positive");
    let symbols = prefix.explicit();
    if symbols.is_empty() {
        return Err(Error::InadmissiblePrefix("empty prefix".into()));
    }
    if !is_shift_maximal(symbols) {
        return Err(Error::InadmissiblePrefix(format!(
            "{} is not shift-maximal",
            word_string(symbols)
        )));
    }

    let n = symbols.len();
    let cmp_at = |s: &BigRational| -> Result<Ordering> {
        let slope = Slope::new(s.clone())?;
        let kn = kneading_sequence(&slope, n)?;
        Ok(kneading_cmp(kn.explicit(), symbols))
    };

    let lo = slope_floor();
    let hi = BigRational::from_ratio(2, 1);
    let eps_rat = BigRational::new(
        num_bigint::BigInt::from((eps * 1e18) as i64),
        num_bigint::BigInt::from(1_000_000_000_000_000_000i64),
    );

    let at_lo = cmp_at(&lo)?;
    let at_hi = cmp_at(&hi)?;
    if at_hi == Ordering::Less {
        return Err(Error::PrefixUnresolvable(format!(
            "{} exceeds the kneading sequence of s = 2",
            word_string(symbols)
        )));
    }
    if at_lo == Ordering::Greater {
        return Err(Error::PrefixUnresolvable(format!(
            "{} lies below the supported slope range",
            word_string(symbols)
        )));
    }

    // Lower edge: boundary between cmp < 0 and cmp >= 0.
    let lower = if at_lo != Ordering::Less {
        lo.clone()
    } else {
        let (mut a, mut b) = (lo.clone(), hi.clone());
        while b.clone() - a.clone() > eps_rat {
            let mid = (a.clone() + b.clone()) / BigRational::from_ratio(2, 1);
            if cmp_at(&mid)? == Ordering::Less {
                a = mid;
            } else {
                b = mid;
            }
        }
        b
    };
    // Upper edge: boundary between cmp <= 0 and cmp > 0.
    let upper = if at_hi != Ordering::Greater {
        hi.clone()
    } else {
        let (mut a, mut b) = (lo.clone(), hi.clone());
        while b.clone() - a.clone() > eps_rat {
            let mid = (a.clone() + b.clone()) / BigRational::from_ratio(2, 1);
            if cmp_at(&mid)? == Ordering::Greater {
                b = mid;
            } else {
                a = mid;
            }
        }
        a
    };

    if upper < lower {
        // The edges crossed: no slope in range matches at this resolution.
        return Err(Error::PrefixUnresolvable(format!(
            "{} matched no slope at precision {eps}",
            word_string(symbols)
        )));
    }

    let mid = (lower.clone() + upper.clone()) / BigRational::from_ratio(2, 1);
    let half_width = Scalar::to_f64(&((upper.clone() - lower.clone()) / BigRational::from_ratio(2, 1)));
    Ok(SlopeMatch {
        lower,
        upper,
        midpoint: TrackedFloat::with_err(Scalar::to_f64(&mid), half_width + eps),
        edge_tolerance: eps,
    })
}

/// A window of a two-sided word: `left` before the dot, `right` after.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TwoSidedWord {
    pub left: Vec<Symbol>,
    pub right: Vec<Symbol>,
}

impl TwoSidedWord {
    /// Truncation to a smaller window radius.
    pub fn truncate(&self, w: usize) -> TwoSidedWord {
        assert!(w <= self.left.len() && w <= self.right.len());
        TwoSidedWord {
            left: self.left[self.left.len() - w..].to_vec(),
            right: self.right[..w].to_vec(),
        }
    }
}

impl fmt::Display for TwoSidedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.left {
            write!(f, "{}", s.as_char())?;
        }
        write!(f, ".")?;
        for s in &self.right {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

/// Two-sided words of window radius `w` that occur as limits of the shifts
/// of `nu`: centered factors recurring into the far tail of the scanned
/// horizon.
///
/// A window is kept when it occurs at two or more centers, at least one of
/// them past `horizon / 2`; transient factors near the head die out and
/// only the genuinely recurrent windows survive.
pub fn two_sided_limit_set(
    nu: &SymbolWord,
    w: usize,
    horizon: usize,
) -> Result<BTreeSet<TwoSidedWord>> {
    assert!(w >= 1, "window radius must be at least 1");
    if matches!(nu.tail(), WordTail::None) && nu.len() < horizon {
        return Err(Error::FiniteWord);
    }
    let symbols = nu.prefix(horizon)?;
    let mut seen: BTreeMap<TwoSidedWord, (usize, usize)> = BTreeMap::new();
    // Center j: left block ends at position j-1, right block starts at j.
    for j in w..=(horizon - w) {
        let word = TwoSidedWord {
            left: symbols[j - w..j].to_vec(),
            right: symbols[j..j + w].to_vec(),
        };
        let entry = seen.entry(word).or_insert((0, 0));
        entry.0 += 1;
        entry.1 = j;
    }
    Ok(seen
        .into_iter()
        .filter(|(_, (count, last))| *count >= 2 && *last >= horizon / 2)
        .map(|(word, _)| word)
        .collect())
}

pub fn word_string(symbols: &[Symbol]) -> String {
    symbols.iter().map(|s| s.as_char()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Quad;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    fn syms(text: &str) -> Vec<Symbol> {
        SymbolWord::parse(text).unwrap().explicit().to_vec()
    }

    #[test]
    fn itinerary_examples() {
        let s2 = Slope::new(rat(2, 1)).unwrap();
        assert_eq!(
            word_string(itinerary(&s2, &rat(1, 1), 4).unwrap().explicit()),
            "1000"
        );
        assert_eq!(
            word_string(itinerary(&s2, &rat(0, 1), 6).unwrap().explicit()),
            "000000"
        );
        let g = Slope::new(Quad::golden()).unwrap();
        assert_eq!(
            word_string(itinerary(&g, &g.c1(), 3).unwrap().explicit()),
            "10C"
        );
    }

    #[test]
    fn kneading_examples() {
        let s2 = Slope::new(rat(2, 1)).unwrap();
        assert_eq!(
            word_string(kneading_sequence(&s2, 4).unwrap().explicit()),
            "1000"
        );
        let g = Slope::new(Quad::golden()).unwrap();
        assert_eq!(
            word_string(kneading_sequence(&g, 6).unwrap().explicit()),
            "10C10C"
        );
        let low = Slope::new(rat(14143, 10000)).unwrap();
        assert!(word_string(kneading_sequence(&low, 2).unwrap().explicit()).starts_with("10"));
    }

    #[test]
    fn shift_compatibility() {
        let s = Slope::new(rat(7, 4)).unwrap();
        for num in [3i64, 9, 13] {
            let x = rat(num, 16);
            let shifted = itinerary(&s, &s.eval(&x).unwrap(), 9).unwrap();
            let full = itinerary(&s, &x, 10).unwrap();
            assert_eq!(full.explicit()[1..], shifted.explicit()[..]);
        }
    }

    #[test]
    fn resolve_max_follows_parity() {
        // "10C" resolves its C with one 1 before it (odd) -> 0.
        assert_eq!(resolve_max(&syms("10C")), syms("100"));
        // "1C": one 1 (odd) -> 0; "11C": two (even) -> 1.
        assert_eq!(resolve_max(&syms("1C")), syms("10"));
        assert_eq!(resolve_max(&syms("11C")), syms("111"));
    }

    #[test]
    fn kneading_order_matches_slope_order() {
        let mut slopes: Vec<BigRational> = [
            (14143, 10000),
            (145, 100),
            (3, 2),
            (1618, 1000),
            (7, 4),
            (19, 10),
            (2, 1),
        ]
        .iter()
        .map(|&(n, d)| rat(n, d))
        .collect();
        slopes.sort();
        let words: Vec<_> = slopes
            .iter()
            .map(|s| {
                kneading_sequence(&Slope::new(s.clone()).unwrap(), 30)
                    .unwrap()
                    .explicit()
                    .to_vec()
            })
            .collect();
        for pair in words.windows(2) {
            assert_ne!(kneading_cmp(&pair[0], &pair[1]), Ordering::Greater);
        }
    }

    #[test]
    fn computed_kneading_sequences_are_shift_maximal() {
        for (n, d) in [(1415, 1000), (3, 2), (8, 5), (7, 4), (15, 8), (2, 1)] {
            let s = Slope::new(rat(n, d)).unwrap();
            let kn = kneading_sequence(&s, 30).unwrap();
            assert!(is_shift_maximal(kn.explicit()), "s = {n}/{d}");
        }
    }

    #[test]
    fn universal_prefix_matches_whole_range() {
        let m = slope_from_kneading(&SymbolWord::parse("10").unwrap(), 1e-6).unwrap();
        assert_eq!(m.lower, slope_floor());
        assert_eq!(m.upper, rat(2, 1));
    }

    #[test]
    fn all_zero_tail_prefix_pins_the_top_slope() {
        let m = slope_from_kneading(&SymbolWord::parse("1000").unwrap(), 1e-9).unwrap();
        assert_eq!(m.upper, rat(2, 1));
        assert!(m.contains(&rat(2, 1)));
        // The slope-2 kneading extends the prefix; the lower edge sits at
        // the parameter where the fourth symbol flips.
        assert!(m.lower > rat(18, 10));
    }

    #[test]
    fn inadmissible_prefix_is_rejected() {
        assert!(matches!(
            slope_from_kneading(&SymbolWord::parse("011").unwrap(), 1e-6),
            Err(Error::InadmissiblePrefix(_))
        ));
        // "110...": the shift "10..." beats "11..." does not... "11" itself
        // exceeds the range: kneading of 2 starts "10".
        assert!(matches!(
            slope_from_kneading(&SymbolWord::parse("11011010").unwrap(), 1e-6),
            Err(_)
        ));
    }

    #[test]
    fn run_growth_word_prefix() {
        let nu = SymbolWord::growing_runs_example();
        assert_eq!(
            word_string(&nu.prefix(12).unwrap()),
            "100101101110"
        );
        assert_eq!(
            word_string(&nu.prefix(17).unwrap()),
            "10010110111011110"
        );
    }

    #[test]
    fn two_sided_limits_of_growing_runs() {
        let nu = SymbolWord::growing_runs_example();
        for w in 1..=4 {
            let set = two_sided_limit_set(&nu, w, 3000).unwrap();
            // Expected: the all-ones window plus one window per placement of
            // a single zero among 2w positions.
            assert_eq!(set.len(), 2 * w + 1, "w = {w}");
            for word in &set {
                let zeros = word
                    .left
                    .iter()
                    .chain(word.right.iter())
                    .filter(|s| **s == Symbol::Zero)
                    .count();
                assert!(zeros <= 1);
            }
        }
    }

    #[test]
    fn two_sided_limits_periodic_and_eventually_fixed() {
        // (101)^infinity: every centered window of radius 2 recurs; there
        // are exactly 3 of them.
        let per = SymbolWord::with_tail(Vec::new(), WordTail::Periodic(syms("101")));
        let set = two_sided_limit_set(&per, 2, 600).unwrap();
        assert_eq!(set.len(), 3);

        // 1 0^infinity: only the all-zero window survives; transients die.
        let zero_tail = SymbolWord::with_tail(syms("1"), WordTail::Periodic(syms("0")));
        let set = two_sided_limit_set(&zero_tail, 1, 600).unwrap();
        assert_eq!(set.len(), 1);
        let only = set.iter().next().unwrap();
        assert_eq!(only.to_string(), "0.0");
    }

    #[test]
    fn limit_sets_are_closed_under_centered_truncation() {
        let nu = SymbolWord::growing_runs_example();
        let big = two_sided_limit_set(&nu, 4, 3000).unwrap();
        let small = two_sided_limit_set(&nu, 3, 3000).unwrap();
        for word in &big {
            assert!(small.contains(&word.truncate(3)));
        }
    }
}
