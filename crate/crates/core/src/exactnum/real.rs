use super::{rat_int, IntervalReal, Rational};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, Zero};
use std::sync::Arc;

/// Kind of defining series behind a series-generated real.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// All terms positive (plain constructions).
    Positive,
    /// Terms of decreasing modulus with arbitrary signs (sign-varied rows).
    Signed,
}

#[derive(Debug)]
struct SeriesData {
    /// Signed terms t_1, t_2, ... of the defining series. Construction
    /// guarantees |t_{i+1}| <= |t_i| / 2 and |t_1| <= 1/2, and that every
    /// not-yet-computed term is at most the square of the last computed
    /// one (super-geometric growth of the generating integers). Those two
    /// facts make every tail bound below certified.
    terms: Vec<Rational>,
    /// prefix[d] = t_1 + ... + t_d, prefix[0] = 0.
    prefix: Vec<Rational>,
    kind: SeriesKind,
    label: String,
}

impl SeriesData {
    /// Certified bounds on the omitted remainder after `d` computed terms.
    fn tail_interval(&self, d: usize) -> IntervalReal {
        let len = self.terms.len();
        assert!(d <= len);
        if d < len {
            let next = &self.terms[d];
            match self.kind {
                SeriesKind::Positive => IntervalReal::new(next.clone(), next * rat_int(2)),
                SeriesKind::Signed => {
                    let m = next.abs();
                    IntervalReal::new(next - &m, next + &m)
                }
            }
        } else {
            // After all computed terms: the next term is at most the square
            // of the last, and later ratios stay >= 2, so |rest| <= 2 t^2.
            let last = self.terms[len - 1].abs();
            let bound = &last * &last * rat_int(2);
            match self.kind {
                SeriesKind::Positive => IntervalReal::new(Rational::zero(), bound),
                SeriesKind::Signed => IntervalReal::new(-bound.clone(), bound),
            }
        }
    }

    fn width_at(&self, d: usize) -> Rational {
        self.tail_interval(d).width()
    }

    fn interval_at(&self, d: usize) -> IntervalReal {
        self.tail_interval(d).add_rat(&self.prefix[d])
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Literal(Rational),
    /// a + b * sqrt(d), d >= 2 not a perfect square.
    Quadratic { a: Rational, b: Rational, d: u64 },
    Series(Arc<SeriesData>),
    /// constant + sum of coeff * value.
    Combination {
        terms: Vec<(Rational, ExactReal)>,
        constant: Rational,
    },
}

/// A real number given as an exact rational prefix plus certified bounds
/// on the omitted remainder. Immutable after creation; evaluation at any
/// requested width is deterministic.
#[derive(Debug, Clone)]
pub struct ExactReal {
    repr: Repr,
}

impl ExactReal {
    pub fn literal(r: Rational) -> Self {
        ExactReal {
            repr: Repr::Literal(r),
        }
    }

    pub fn zero() -> Self {
        Self::literal(Rational::zero())
    }

    /// a + b*sqrt(d). Perfect-square radicands fold to a literal.
    pub fn quadratic(a: Rational, b: Rational, d: u64) -> Self {
        let s = d.sqrt();
        if s * s == d {
            return Self::literal(a + b * rat_int(s as i64));
        }
        if b.is_zero() {
            return Self::literal(a);
        }
        ExactReal {
            repr: Repr::Quadratic { a, b, d },
        }
    }

    pub fn sqrt_int(d: u64) -> Self {
        Self::quadratic(Rational::zero(), rat_int(1), d)
    }

    fn series(terms: Vec<Rational>, kind: SeriesKind, label: String) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("empty series".into()));
        }
        if terms[0].abs() > super::rat_i64(1, 2) {
            return Err(Error::InvalidParameter(format!(
                "series {label}: first term exceeds 1/2, tail bounds not certified"
            )));
        }
        for w in terms.windows(2) {
            if w[1].is_zero() || w[1].abs() * rat_int(2) > w[0].abs() {
                return Err(Error::InvalidParameter(format!(
                    "series {label}: term ratio below 2, tail bounds not certified"
                )));
            }
        }
        if kind == SeriesKind::Positive && terms.iter().any(|t| !t.is_positive()) {
            return Err(Error::InvalidParameter(format!(
                "series {label}: nonpositive term in positive series"
            )));
        }
        let mut prefix = Vec::with_capacity(terms.len() + 1);
        let mut acc = Rational::zero();
        prefix.push(acc.clone());
        for t in &terms {
            acc += t;
            prefix.push(acc.clone());
        }
        Ok(ExactReal {
            repr: Repr::Series(Arc::new(SeriesData {
                terms,
                prefix,
                kind,
                label,
            })),
        })
    }

    pub fn positive_series(terms: Vec<Rational>, label: impl Into<String>) -> Result<Self> {
        Self::series(terms, SeriesKind::Positive, label.into())
    }

    pub fn signed_series(terms: Vec<Rational>, label: impl Into<String>) -> Result<Self> {
        Self::series(terms, SeriesKind::Signed, label.into())
    }

    pub fn combination(terms: Vec<(Rational, ExactReal)>, constant: Rational) -> Self {
        // fold literal terms into the constant
        let mut c = constant;
        let mut kept = Vec::new();
        for (coeff, x) in terms {
            if coeff.is_zero() {
                continue;
            }
            match x.exact_rational() {
                Some(v) => c += coeff * v,
                None => kept.push((coeff, x)),
            }
        }
        if kept.is_empty() {
            return Self::literal(c);
        }
        ExactReal {
            repr: Repr::Combination {
                terms: kept,
                constant: c,
            },
        }
    }

    pub fn add(&self, other: &ExactReal) -> ExactReal {
        Self::combination(
            vec![(rat_int(1), self.clone()), (rat_int(1), other.clone())],
            Rational::zero(),
        )
    }

    pub fn scale(&self, c: &Rational) -> ExactReal {
        Self::combination(vec![(c.clone(), self.clone())], Rational::zero())
    }

    pub fn neg(&self) -> ExactReal {
        self.scale(&rat_int(-1))
    }

    pub fn add_rat(&self, c: &Rational) -> ExactReal {
        Self::combination(vec![(rat_int(1), self.clone())], c.clone())
    }

    /// The exact rational value, when this real is one.
    pub fn exact_rational(&self) -> Option<Rational> {
        match &self.repr {
            Repr::Literal(r) => Some(r.clone()),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, Repr::Literal(_))
    }

    /// Provenance label for series-backed values, used to match sequences
    /// against the construction they came from.
    pub fn label(&self) -> Option<&str> {
        match &self.repr {
            Repr::Series(s) => Some(&s.label),
            _ => None,
        }
    }

    /// Smallest certified width this value can currently be evaluated to.
    /// Zero for exact and quadratic values (refinable without bound).
    pub fn best_width(&self) -> Rational {
        match &self.repr {
            Repr::Literal(_) | Repr::Quadratic { .. } => Rational::zero(),
            Repr::Series(s) => s.width_at(s.terms.len()),
            Repr::Combination { terms, .. } => {
                let mut acc = Rational::zero();
                for (c, x) in terms {
                    acc += c.abs() * x.best_width();
                }
                acc
            }
        }
    }

    /// Certified interval of width at most `width` containing the true
    /// value. Deterministic for a fixed (value, width): series use the
    /// minimal depth whose certified tail is narrow enough, so a request
    /// already satisfied consumes no further terms.
    pub fn eval(&self, width: &Rational) -> Result<IntervalReal> {
        if !width.is_positive() {
            return Err(Error::InvalidParameter("eval width must be positive".into()));
        }
        match &self.repr {
            Repr::Literal(r) => Ok(IntervalReal::point(r.clone())),
            Repr::Quadratic { a, b, d } => Ok(eval_quadratic(a, b, *d, width)),
            Repr::Series(s) => {
                let len = s.terms.len();
                for dpt in 0..=len {
                    if s.width_at(dpt) <= *width {
                        return Ok(s.interval_at(dpt));
                    }
                }
                Err(Error::InsufficientLevels {
                    requested: super::rat_string(width),
                    achievable: super::rat_string(&s.width_at(len)),
                })
            }
            Repr::Combination { terms, constant } => {
                let k = terms.len() as i64;
                let mut acc = IntervalReal::point(constant.clone());
                for (c, x) in terms {
                    let denom = std::cmp::max(c.abs(), rat_int(1)) * rat_int(k);
                    let w = width / denom;
                    acc = acc.add(&x.eval(&w)?.scale(c));
                }
                Ok(acc)
            }
        }
    }

    /// Tightest certified interval available from the computed data.
    pub fn eval_tightest(&self) -> IntervalReal {
        match &self.repr {
            Repr::Literal(r) => IntervalReal::point(r.clone()),
            Repr::Quadratic { a, b, d } => {
                eval_quadratic(a, b, *d, &Rational::new(BigInt::from(1), BigInt::from(1u64 << 62)))
            }
            Repr::Series(s) => s.interval_at(s.terms.len()),
            Repr::Combination { terms, constant } => {
                let mut acc = IntervalReal::point(constant.clone());
                for (c, x) in terms {
                    acc = acc.add(&x.eval_tightest().scale(c));
                }
                acc
            }
        }
    }

    /// Number of computed series terms (for series-backed values).
    pub fn series_len(&self) -> Option<usize> {
        match &self.repr {
            Repr::Series(s) => Some(s.terms.len()),
            _ => None,
        }
    }

    /// Exact prefix sum of the first `d` series terms.
    pub fn series_prefix(&self, d: usize) -> Option<Rational> {
        match &self.repr {
            Repr::Series(s) => s.prefix.get(d).cloned(),
            _ => None,
        }
    }

    /// Certified remainder bounds after `d` series terms.
    pub fn series_tail(&self, d: usize) -> Option<IntervalReal> {
        match &self.repr {
            Repr::Series(s) => {
                if d <= s.terms.len() {
                    Some(s.tail_interval(d))
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

fn eval_quadratic(a: &Rational, b: &Rational, d: u64, width: &Rational) -> IntervalReal {
    // sqrt(d) in [s, s+1] / 2^k with s = isqrt(d * 4^k); need |b| 2^-k <= width.
    let babs = b.abs();
    let mut k: u32 = 1;
    loop {
        let scale = Rational::new(BigInt::from(1), BigInt::from(1u8) << k);
        if &babs * &scale <= *width || k > 1_000_000 {
            break;
        }
        k += 8;
    }
    let big = BigInt::from(d) << (2 * k);
    let s = big.sqrt();
    let denom = BigInt::from(1u8) << k;
    let lo_root = Rational::new(s.clone(), denom.clone());
    let hi_root = Rational::new(s + 1, denom);
    let root = IntervalReal::new(lo_root, hi_root);
    root.scale(b).add_rat(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat_i64, CmpCertified};
    use proptest::prelude::*;

    #[test]
    fn literal_eval_exact() {
        let x = ExactReal::literal(rat_i64(3, 7));
        let iv = x.eval(&rat_i64(1, 1000)).unwrap();
        assert_eq!(iv, IntervalReal::point(rat_i64(3, 7)));
    }

    #[test]
    fn series_eval_geometric_tail() {
        // terms 1/6, 1/6^5: evaluating at width 1/6^4 uses the first term
        // plus a certified tail, and the result contains 1/6 + 1/6^5.
        let x = ExactReal::positive_series(vec![rat_i64(1, 6), rat_i64(1, 7776)], "t").unwrap();
        let iv = x.eval(&rat_i64(1, 1296)).unwrap();
        assert!(iv.width() <= rat_i64(1, 1296));
        let target = rat_i64(1, 6) + rat_i64(1, 7776);
        assert!(iv.contains(&target));
    }

    #[test]
    fn series_eval_idempotent_depth() {
        let x = ExactReal::positive_series(vec![rat_i64(1, 6), rat_i64(1, 7776)], "t").unwrap();
        // a loose width is satisfied at depth 1; asking again gives the
        // identical interval
        let w = rat_i64(1, 2);
        let a = x.eval(&w).unwrap();
        let b = x.eval(&w).unwrap();
        assert_eq!(a, b);
        // depth 0 already satisfies the width: prefix 0 plus tail [t1, 2 t1]
        assert_eq!(a.lo, rat_i64(1, 6));
        assert_eq!(a.hi, rat_i64(2, 6));
        // a tighter request moves to depth 1: prefix t1 plus tail [t2, 2 t2]
        let c = x.eval(&rat_i64(1, 100)).unwrap();
        assert_eq!(c.lo, rat_i64(1, 6) + rat_i64(1, 7776));
        assert_eq!(c.hi, rat_i64(1, 6) + rat_i64(2, 7776));
    }

    #[test]
    fn series_insufficient_levels() {
        let x = ExactReal::positive_series(vec![rat_i64(1, 6)], "t").unwrap();
        // best achievable width is 2/36
        let err = x.eval(&rat_i64(1, 100_000)).unwrap_err();
        match err {
            Error::InsufficientLevels { .. } => {}
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn series_ratio_validation() {
        assert!(ExactReal::positive_series(vec![rat_i64(1, 2), rat_i64(1, 3)], "bad").is_err());
        assert!(ExactReal::positive_series(vec![rat_i64(2, 3)], "bad").is_err());
        assert!(
            ExactReal::signed_series(vec![rat_i64(-1, 2), rat_i64(1, 8)], "ok").is_ok()
        );
    }

    #[test]
    fn quadratic_eval_sqrt2() {
        let x = ExactReal::sqrt_int(2);
        let iv = x.eval(&rat_i64(1, 1_000_000)).unwrap();
        // 1.41421356 ± small
        assert!(iv.contains(&rat_i64(141_421_356, 100_000_000)));
        assert!(iv.width() <= rat_i64(1, 1_000_000));
        // perfect square folds
        assert!(ExactReal::sqrt_int(49).is_exact());
    }

    #[test]
    fn combination_eval() {
        let phi = ExactReal::quadratic(rat_i64(1, 2), rat_i64(1, 2), 5);
        // phi^2 - phi - 1 = 0, so (2 phi - 1)^2 = 5
        let y = ExactReal::combination(
            vec![(rat_int(2), phi.clone())],
            rat_int(-1),
        );
        let iv = y.eval(&rat_i64(1, 1_000_000)).unwrap();
        let sq = iv.powi(2);
        assert!(sq.contains(&rat_int(5)));
        assert!(iv.width() <= rat_i64(1, 1_000_000));
    }

    #[test]
    fn nested_refinement() {
        let x = ExactReal::positive_series(
            vec![rat_i64(1, 2), rat_i64(1, 64), rat_i64(1, 8192)],
            "t",
        )
        .unwrap();
        let mut prev: Option<IntervalReal> = None;
        for k in 1..=20 {
            let w = Rational::new(BigInt::from(1), BigInt::from(1u64) << k);
            match x.eval(&w) {
                Ok(iv) => {
                    if let Some(p) = &prev {
                        assert!(p.contains_interval(&iv), "not nested at k={k}");
                    }
                    prev = Some(iv);
                }
                Err(Error::InsufficientLevels { .. }) => break,
                Err(e) => panic!("{e}"),
            }
        }
    }

    proptest! {
        #[test]
        fn nested_for_random_series(
            d1 in 2i64..50, r1 in 2i64..6, r2 in 2i64..6, signs in prop::array::uniform3(any::<bool>())
        ) {
            let t1 = rat_i64(if signs[0] {1} else {-1}, 2 * d1);
            let t2 = &t1 / rat_int(r1) * rat_int(if signs[1] {1} else {-1});
            let t3 = &t2 / rat_int(r2) * rat_int(if signs[2] {1} else {-1});
            let x = ExactReal::signed_series(vec![t1, t2.clone(), t3], "p").unwrap();
            let mut prev: Option<IntervalReal> = None;
            for k in 1..=40u32 {
                let w = Rational::new(BigInt::from(1), BigInt::from(1u64) << k);
                match x.eval(&w) {
                    Ok(iv) => {
                        if let Some(p) = &prev {
                            prop_assert!(p.contains_interval(&iv));
                        }
                        prev = Some(iv);
                    }
                    Err(_) => break,
                }
            }
        }
    }

    #[test]
    fn cmp_via_eval() {
        let a = ExactReal::sqrt_int(2);
        let b = ExactReal::literal(rat_i64(3, 2));
        let w = rat_i64(1, 1000);
        assert_eq!(
            a.eval(&w).unwrap().cmp_certified(&b.eval(&w).unwrap()),
            CmpCertified::Less
        );
    }
}
