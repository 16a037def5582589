//! Norm descriptors with certified evaluation and max-norm equivalence
//! constants, projected norms, and the expanding-norm check.

use crate::constants::pow_rat_exp_interval;
use crate::exactnum::{rat_int, rat_string, CmpCertified, IntervalReal, Rational};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

pub type CustomEvaluator = Arc<dyn Fn(&[IntervalReal], &Rational) -> IntervalReal + Send + Sync>;

#[derive(Clone)]
pub enum NormKind {
    Max,
    /// p-norm with rational p = num/den >= 1.
    P { num: u64, den: u64 },
    WeightedMax { weights: Vec<Rational> },
    /// Black-box convex evaluator with user-declared equivalence constants.
    Custom { name: String, eval: CustomEvaluator },
}

impl fmt::Debug for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Max => write!(f, "Max"),
            NormKind::P { num, den } => write!(f, "P({num}/{den})"),
            NormKind::WeightedMax { weights } => {
                write!(f, "WeightedMax({:?})", weights.iter().map(rat_string).collect::<Vec<_>>())
            }
            NormKind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// An evaluable norm on R^dimension together with certified constants
/// equiv_lo, equiv_hi satisfying
/// equiv_lo * |x|_inf <= |x| <= equiv_hi * |x|_inf.
/// The lower constant bounds every enumeration box in `bestapprox`, so it
/// must never be overestimated; built-in kinds carry exact constants and
/// custom declarations are validated on base vectors, vertices and samples.
#[derive(Clone, Debug)]
pub struct NormDescriptor {
    dimension: usize,
    kind: NormKind,
    equiv_lo: Rational,
    equiv_hi: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpandingCheck {
    CertifiedOnSamples,
    CounterexampleFound(Vec<Rational>),
}

impl NormDescriptor {
    pub fn max(dimension: usize) -> Self {
        NormDescriptor {
            dimension,
            kind: NormKind::Max,
            equiv_lo: rat_int(1),
            equiv_hi: rat_int(1),
        }
    }

    /// p-norm, p = num/den >= 1 rational. The upper equivalence constant is
    /// a certified rational bound on dimension^(1/p).
    pub fn p_norm(dimension: usize, p: &Rational) -> Result<Self> {
        if *p < rat_int(1) {
            return Err(Error::InvalidParameter("p-norm needs p >= 1".into()));
        }
        let num = u64::try_from(p.numer().clone())
            .map_err(|_| Error::InvalidParameter("p too large".into()))?;
        let den = u64::try_from(p.denom().clone())
            .map_err(|_| Error::InvalidParameter("p denominator too large".into()))?;
        // dim^{1/p} = (dim^den)^{1/num}
        let powed = IntervalReal::point(rat_int(dimension as i64)).powi(den as u32);
        let bound = pow_rat_exp_interval(
            &powed,
            1,
            num as u32,
            &Rational::new(BigInt::one(), BigInt::from(1_000_000u64)),
        )?;
        Ok(NormDescriptor {
            dimension,
            kind: NormKind::P { num, den },
            equiv_lo: rat_int(1),
            equiv_hi: bound.hi,
        })
    }

    pub fn euclidean(dimension: usize) -> Self {
        Self::p_norm(dimension, &rat_int(2)).expect("p=2 is valid")
    }

    pub fn weighted_max(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::InvalidParameter(
                "weighted max norm needs positive weights".into(),
            ));
        }
        let lo = weights.iter().min().unwrap().clone();
        let hi = weights.iter().max().unwrap().clone();
        Ok(NormDescriptor {
            dimension: weights.len(),
            kind: NormKind::WeightedMax { weights },
            equiv_lo: lo,
            equiv_hi: hi,
        })
    }

    /// Custom norm with declared equivalence constants. The declaration is
    /// validated on all canonical base vectors, all +-1 vertex vectors and
    /// a deterministic set of rational samples; violations are rejected
    /// rather than repaired.
    pub fn custom(
        dimension: usize,
        name: impl Into<String>,
        eval: CustomEvaluator,
        equiv_lo: Rational,
        equiv_hi: Rational,
    ) -> Result<Self> {
        if !equiv_lo.is_positive() || equiv_hi < equiv_lo {
            return Err(Error::InvalidParameter(
                "equivalence constants must satisfy 0 < lo <= hi".into(),
            ));
        }
        let d = NormDescriptor {
            dimension,
            kind: NormKind::Custom {
                name: name.into(),
                eval,
            },
            equiv_lo,
            equiv_hi,
        };
        d.validate_equivalence()?;
        Ok(d)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn equiv_lo(&self) -> &Rational {
        &self.equiv_lo
    }

    pub fn equiv_hi(&self) -> &Rational {
        &self.equiv_hi
    }

    pub fn is_absolute_value_like(&self) -> bool {
        if self.dimension != 1 {
            return false;
        }
        match &self.kind {
            NormKind::Max | NormKind::P { .. } => true,
            NormKind::WeightedMax { weights } => weights[0].is_one(),
            NormKind::Custom { .. } => self.equiv_lo.is_one() && self.equiv_hi.is_one(),
        }
    }

    /// Certified interval for |v|, outward-rounded, with the norm's own
    /// contribution to the width at most `width` (exact kinds ignore it).
    pub fn eval(&self, v: &[IntervalReal], width: &Rational) -> Result<IntervalReal> {
        if v.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: v.len(),
            });
        }
        match &self.kind {
            NormKind::Max => {
                let mut acc = IntervalReal::zero();
                for x in v {
                    acc = acc.max_interval(&x.abs());
                }
                Ok(acc)
            }
            NormKind::WeightedMax { weights } => {
                let mut acc = IntervalReal::zero();
                for (x, w) in v.iter().zip(weights) {
                    acc = acc.max_interval(&x.abs().scale(w));
                }
                Ok(acc)
            }
            NormKind::P { num, den } => {
                let w_in = width / rat_int(2 * (self.dimension as i64 + 1));
                let mut sum = IntervalReal::zero();
                for x in v {
                    let a = x.abs();
                    let t = pow_rat_exp_interval(&a, *num as i64, *den as u32, &w_in)?;
                    sum = sum.add(&t);
                }
                pow_rat_exp_interval(&sum, *den as i64, *num as u32, &(width / rat_int(2)))
            }
            NormKind::Custom { eval, .. } => Ok(eval(v, width)),
        }
    }

    pub fn eval_rational(&self, v: &[Rational], width: &Rational) -> Result<IntervalReal> {
        let iv: Vec<IntervalReal> = v.iter().map(|r| IntervalReal::point(r.clone())).collect();
        self.eval(&iv, width)
    }

    pub fn eval_ints(&self, v: &[BigInt], width: &Rational) -> Result<IntervalReal> {
        let iv: Vec<IntervalReal> = v
            .iter()
            .map(|z| IntervalReal::point(Rational::from_integer(z.clone())))
            .collect();
        self.eval(&iv, width)
    }

    /// Does the integer vector v satisfy |v|_1 <= t (boundary inclusive)?
    /// Exact for max, weighted max and integer-p norms; otherwise certified
    /// by refinement with a bounded budget.
    pub fn admits_height(&self, v: &[BigInt], t: &Rational) -> Result<bool> {
        match &self.kind {
            NormKind::Max => {
                let m = v.iter().map(|z| z.magnitude().clone()).max().unwrap_or_default();
                Ok(Rational::from_integer(BigInt::from(m)) <= *t)
            }
            NormKind::WeightedMax { weights } => {
                let mut worst = Rational::zero();
                for (z, w) in v.iter().zip(weights) {
                    let c = Rational::from_integer(z.abs()) * w;
                    if c > worst {
                        worst = c;
                    }
                }
                Ok(worst <= *t)
            }
            NormKind::P { num, den } if *den == 1 => {
                // sum |v|^p <= t^p, all exact rationals
                let mut sum = BigInt::zero();
                for z in v {
                    sum += z.abs().pow(*num as u32);
                }
                if t.is_negative() {
                    return Ok(false);
                }
                let tp = crate::exactnum::IntervalReal::point(t.clone()).powi(*num as u32);
                Ok(Rational::from_integer(sum) <= tp.lo)
            }
            _ => {
                let mut width = Rational::new(BigInt::one(), BigInt::from(1u64 << 20));
                for _ in 0..12 {
                    let iv = self.eval_ints(v, &width)?;
                    match iv.cmp_rat(t) {
                        CmpCertified::Less => return Ok(true),
                        CmpCertified::Greater => return Ok(false),
                        CmpCertified::Overlap => {
                            if iv.is_point() {
                                return Ok(iv.lo <= *t);
                            }
                        }
                    }
                    width /= rat_int(1024);
                }
                Err(Error::PrecisionExhausted {
                    refinements: 12,
                    context: format!("height admission of {v:?} at t = {}", rat_string(t)),
                })
            }
        }
    }

    /// Descriptor of the norm restricted to the given coordinates
    /// (evaluating the original norm on the zero-padded vector).
    /// For custom kinds the equivalence constants are recomputed from base
    /// and vertex evaluations and then sample-validated, which is exact in
    /// dimension 1 and a declared approximation otherwise.
    pub fn project(&self, coords: &[usize]) -> Result<NormDescriptor> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("empty projection".into()));
        }
        let mut seen = vec![false; self.dimension];
        for &c in coords {
            if c >= self.dimension || seen[c] {
                return Err(Error::InvalidParameter(format!(
                    "bad projection coordinate {c}"
                )));
            }
            seen[c] = true;
        }
        match &self.kind {
            NormKind::Max => Ok(NormDescriptor::max(coords.len())),
            NormKind::P { num, den } => NormDescriptor::p_norm(
                coords.len(),
                &Rational::new(BigInt::from(*num), BigInt::from(*den)),
            ),
            NormKind::WeightedMax { weights } => {
                NormDescriptor::weighted_max(coords.iter().map(|&c| weights[c].clone()).collect())
            }
            NormKind::Custom { name, eval } => {
                let base_eval = eval.clone();
                let full_dim = self.dimension;
                let coords_owned: Vec<usize> = coords.to_vec();
                let projected: CustomEvaluator = Arc::new(move |v, w| {
                    let mut padded = vec![IntervalReal::zero(); full_dim];
                    for (slot, x) in coords_owned.iter().zip(v) {
                        padded[*slot] = x.clone();
                    }
                    base_eval(&padded, w)
                });
                // recompute constants from base vectors and vertices
                let dim = coords.len();
                let width = Rational::new(BigInt::one(), BigInt::from(1u64 << 30));
                let mut lo: Option<Rational> = None;
                let mut hi: Option<Rational> = None;
                let mut scan = |v: &[IntervalReal]| -> Result<()> {
                    let iv = projected(v, &width);
                    lo = Some(match &lo {
                        None => iv.lo.clone(),
                        Some(l) => std::cmp::min(l.clone(), iv.lo.clone()),
                    });
                    hi = Some(match &hi {
                        None => iv.hi.clone(),
                        Some(h) => std::cmp::max(h.clone(), iv.hi.clone()),
                    });
                    Ok(())
                };
                for probe in unit_probes(dim) {
                    scan(&probe)?;
                }
                let d = NormDescriptor {
                    dimension: dim,
                    kind: NormKind::Custom {
                        name: format!("{name}|proj"),
                        eval: projected,
                    },
                    equiv_lo: lo.unwrap(),
                    equiv_hi: hi.unwrap(),
                };
                d.validate_equivalence()?;
                Ok(d)
            }
        }
    }

    /// Checks |x| >= |pi_j(x)| for every axis projection pi_j on
    /// deterministic (base/vertex) plus seeded random rational samples.
    /// Max, p- and weighted-max norms are expanding by a closed-form
    /// argument and certify immediately; for custom norms a returned
    /// counterexample is certified, while `CertifiedOnSamples` is evidence
    /// on the sampled vectors only, not a proof.
    pub fn is_expanding(&self, samples: usize, seed: u64) -> Result<ExpandingCheck> {
        match &self.kind {
            NormKind::Max | NormKind::P { .. } | NormKind::WeightedMax { .. } => {
                return Ok(ExpandingCheck::CertifiedOnSamples)
            }
            NormKind::Custom { .. } => {}
        }
        let dim = self.dimension;
        let width = Rational::new(BigInt::one(), BigInt::from(1u64 << 40));
        let mut vectors: Vec<Vec<Rational>> = Vec::new();
        for probe in unit_probes(dim) {
            vectors.push(probe.iter().map(|iv| iv.lo.clone()).collect());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let v: Vec<Rational> = (0..dim)
                .map(|_| {
                    let num: i64 = rng.gen_range(-1000..=1000);
                    Rational::new(BigInt::from(num), BigInt::from(128u32))
                })
                .collect();
            vectors.push(v);
        }
        for v in &vectors {
            if v.iter().all(|c| c.is_zero()) {
                continue;
            }
            let full = self.eval_rational(v, &width)?;
            for j in 0..dim {
                if v[j].is_zero() {
                    continue;
                }
                let mut proj = vec![Rational::zero(); dim];
                proj[j] = v[j].clone();
                let pj = self.eval_rational(&proj, &width)?;
                if full.cmp_certified(&pj) == CmpCertified::Less {
                    return Ok(ExpandingCheck::CounterexampleFound(v.clone()));
                }
            }
        }
        Ok(ExpandingCheck::CertifiedOnSamples)
    }

    fn validate_equivalence(&self) -> Result<()> {
        let width = Rational::new(BigInt::one(), BigInt::from(1u64 << 30));
        for probe in unit_probes(self.dimension) {
            let iv = self.eval(&probe, &width)?;
            // every probe has sup-norm exactly 1
            if iv.hi < self.equiv_lo || iv.lo > self.equiv_hi {
                return Err(Error::InvariantViolation(format!(
                    "declared equivalence constants [{}, {}] fail on a probe vector: norm in {}",
                    rat_string(&self.equiv_lo),
                    rat_string(&self.equiv_hi),
                    iv
                )));
            }
        }
        Ok(())
    }
}

/// Canonical base vectors and +-1 vertices (sup-norm exactly 1 each).
fn unit_probes(dim: usize) -> Vec<Vec<IntervalReal>> {
    let mut out = Vec::new();
    for i in 0..dim {
        let mut v = vec![IntervalReal::zero(); dim];
        v[i] = IntervalReal::point(rat_int(1));
        out.push(v);
    }
    if dim <= 16 {
        for mask in 0..(1u32 << dim) {
            let v: Vec<IntervalReal> = (0..dim)
                .map(|i| {
                    IntervalReal::point(if mask >> i & 1 == 1 {
                        rat_int(-1)
                    } else {
                        rat_int(1)
                    })
                })
                .collect();
            out.push(v);
        }
    }
    out
}

/// Norm constants used by the constructions: d1 = |e1|', d2 = |e2|' under
/// norm1 projected to the first two coordinates, Gamma = the largest norm2
/// value over all +-1 sign vectors, and gamma = |e1|' again in its role as
/// the height rescaling constant.
#[derive(Debug, Clone)]
pub struct NormConstants {
    pub d1: IntervalReal,
    pub d2: IntervalReal,
    pub gamma_allones: IntervalReal,
    pub gamma_e1_projected: IntervalReal,
}

pub fn norm_constants(
    norm1: &NormDescriptor,
    norm2: &NormDescriptor,
    width: &Rational,
) -> Result<NormConstants> {
    if norm1.dimension() < 2 {
        return Err(Error::InvalidParameter(
            "norm1 must live on dimension >= 2".into(),
        ));
    }
    let proj = norm1.project(&[0, 1])?;
    let e1 = [IntervalReal::point(rat_int(1)), IntervalReal::zero()];
    let e2 = [IntervalReal::zero(), IntervalReal::point(rat_int(1))];
    let d1 = proj.eval(&e1, width)?;
    let d2 = proj.eval(&e2, width)?;
    let m = norm2.dimension();
    let mut gamma: Option<IntervalReal> = None;
    for mask in 0..(1u64 << m.min(20)) {
        let v: Vec<IntervalReal> = (0..m)
            .map(|i| {
                IntervalReal::point(if mask >> i & 1 == 1 {
                    rat_int(-1)
                } else {
                    rat_int(1)
                })
            })
            .collect();
        let g = norm2.eval(&v, width)?;
        gamma = Some(match gamma {
            None => g,
            Some(prev) => prev.max_interval(&g),
        });
    }
    let gamma = gamma.expect("m >= 1");
    for iv in [&d1, &d2, &gamma] {
        if !iv.lo.is_positive() {
            return Err(Error::InvariantViolation(
                "norm constants must be strictly positive".into(),
            ));
        }
    }
    Ok(NormConstants {
        d1: d1.clone(),
        d2,
        gamma_allones: gamma,
        gamma_e1_projected: d1,
    })
}

// ---------------------------------------------------------------------------
// serde: {"kind": "max"|"p"|"wmax"|"custom", ...}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct NormRepr {
    kind: String,
    dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    equiv: [String; 2],
}

impl Serialize for NormDescriptor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match &self.kind {
            NormKind::Max => NormRepr {
                kind: "max".into(),
                dimension: self.dimension,
                p: None,
                weights: None,
                name: None,
                equiv: [rat_string(&self.equiv_lo), rat_string(&self.equiv_hi)],
            },
            NormKind::P { num, den } => NormRepr {
                kind: "p".into(),
                dimension: self.dimension,
                p: Some(rat_string(&Rational::new(
                    BigInt::from(*num),
                    BigInt::from(*den),
                ))),
                weights: None,
                name: None,
                equiv: [rat_string(&self.equiv_lo), rat_string(&self.equiv_hi)],
            },
            NormKind::WeightedMax { weights } => NormRepr {
                kind: "wmax".into(),
                dimension: self.dimension,
                p: None,
                weights: Some(weights.iter().map(rat_string).collect()),
                name: None,
                equiv: [rat_string(&self.equiv_lo), rat_string(&self.equiv_hi)],
            },
            NormKind::Custom { name, .. } => NormRepr {
                kind: "custom".into(),
                dimension: self.dimension,
                p: None,
                weights: None,
                name: Some(name.clone()),
                equiv: [rat_string(&self.equiv_lo), rat_string(&self.equiv_hi)],
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NormDescriptor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = NormRepr::deserialize(d)?;
        let parse = |s: &str| crate::exactnum::rat_parse(s).map_err(D::Error::custom);
        match repr.kind.as_str() {
            "max" => Ok(NormDescriptor::max(repr.dimension)),
            "p" => {
                let p = parse(repr.p.as_deref().ok_or_else(|| D::Error::custom("missing p"))?)?;
                NormDescriptor::p_norm(repr.dimension, &p).map_err(D::Error::custom)
            }
            "wmax" => {
                let ws = repr
                    .weights
                    .ok_or_else(|| D::Error::custom("missing weights"))?;
                let ws = ws
                    .iter()
                    .map(|s| parse(s))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                NormDescriptor::weighted_max(ws).map_err(D::Error::custom)
            }
            "custom" => Err(D::Error::custom(
                "custom norms carry code and must be constructed programmatically",
            )),
            k => Err(D::Error::custom(format!("unknown norm kind {k:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat_i64;
    use proptest::prelude::*;

    fn pt(v: i64) -> IntervalReal {
        IntervalReal::point(rat_int(v))
    }

    #[test]
    fn max_norm_eval() {
        let n = NormDescriptor::max(3);
        let iv = n
            .eval(&[pt(3), pt(-4), pt(1)], &rat_i64(1, 1000))
            .unwrap();
        assert_eq!(iv, IntervalReal::point(rat_int(4)));
    }

    #[test]
    fn p2_norm_eval_345() {
        let n = NormDescriptor::euclidean(2);
        let w = rat_i64(1, 1_000_000);
        let iv = n.eval(&[pt(3), pt(4)], &w).unwrap();
        assert!(iv.contains(&rat_int(5)));
        assert!(iv.width() <= w);
    }

    #[test]
    fn weighted_max_eval() {
        let n = NormDescriptor::weighted_max(vec![rat_int(2), rat_int(1)]).unwrap();
        let iv = n.eval(&[pt(1), pt(3)], &rat_i64(1, 1000)).unwrap();
        assert_eq!(iv, IntervalReal::point(rat_int(3)));
    }

    #[test]
    fn projections() {
        let m5 = NormDescriptor::max(5).project(&[0, 1]).unwrap();
        assert_eq!(m5.dimension(), 2);
        assert!(matches!(m5.kind(), NormKind::Max));

        let p2 = NormDescriptor::euclidean(3).project(&[0, 1]).unwrap();
        assert!(matches!(p2.kind(), NormKind::P { num: 2, den: 1 }));

        // custom |(x1,x2)| = max(|x1|, |x1+x2|) projected to {1} is |.|
        let eval: CustomEvaluator = Arc::new(|v, _w| {
            let a = v[0].abs();
            let b = v[0].add(&v[1]).abs();
            a.max_interval(&b)
        });
        let c = NormDescriptor::custom(2, "skew", eval, rat_i64(1, 2), rat_int(2)).unwrap();
        let proj = c.project(&[0]).unwrap();
        assert_eq!(proj.dimension(), 1);
        assert_eq!(proj.equiv_lo(), &rat_int(1));
        assert_eq!(proj.equiv_hi(), &rat_int(1));
        let iv = proj.eval(&[pt(-7)], &rat_i64(1, 1000)).unwrap();
        assert_eq!(iv, IntervalReal::point(rat_int(7)));
    }

    #[test]
    fn projected_norm_matches_zero_padding() {
        let n = NormDescriptor::euclidean(4);
        let proj = n.project(&[0, 1]).unwrap();
        let w = rat_i64(1, 1_000_000);
        let a = proj.eval(&[pt(3), pt(4)], &w).unwrap();
        let b = n.eval(&[pt(3), pt(4), pt(0), pt(0)], &w).unwrap();
        // identical computation path, identical interval
        assert_eq!(a, b);
    }

    #[test]
    fn expanding_checks() {
        assert_eq!(
            NormDescriptor::max(3).is_expanding(10, 0).unwrap(),
            ExpandingCheck::CertifiedOnSamples
        );
        let p32 = NormDescriptor::p_norm(2, &rat_i64(3, 2)).unwrap();
        assert_eq!(
            p32.is_expanding(10, 0).unwrap(),
            ExpandingCheck::CertifiedOnSamples
        );
        // |x| = |x1 - x2| + |x2|/100 is a norm but shrinks under the
        // projection to either axis at x = (1,1)
        let eval: CustomEvaluator = Arc::new(|v, _w| {
            let a = v[0].sub(&v[1]).abs();
            let b = v[1].abs().scale(&rat_i64(1, 100));
            a.add(&b)
        });
        let c = NormDescriptor::custom(2, "degenerate", eval, rat_i64(1, 100), rat_int(3)).unwrap();
        match c.is_expanding(50, 7).unwrap() {
            ExpandingCheck::CounterexampleFound(v) => {
                // certified violation; the canonical witness (1,1) is in the
                // deterministic probe set
                assert_eq!(v, vec![rat_int(1), rat_int(1)]);
            }
            other => panic!("expected counterexample, got {other:?}"),
        }
    }

    #[test]
    fn custom_equivalence_validation_rejects() {
        let eval: CustomEvaluator = Arc::new(|v, _w| v[0].abs());
        // claims lo = 2 but |e1| = 1
        assert!(NormDescriptor::custom(1, "bad", eval, rat_int(2), rat_int(3)).is_err());
    }

    #[test]
    fn admits_height_exactness() {
        let n = NormDescriptor::euclidean(2);
        let v = [BigInt::from(3), BigInt::from(4)];
        assert!(n.admits_height(&v, &rat_int(5)).unwrap());
        assert!(!n.admits_height(&v, &rat_i64(499, 100)).unwrap());
        let m = NormDescriptor::max(2);
        assert!(m.admits_height(&v, &rat_int(4)).unwrap());
        assert!(!m.admits_height(&v, &rat_i64(399, 100)).unwrap());
    }

    #[test]
    fn constants_for_max_pair() {
        let w = rat_i64(1, 1_000_000);
        let nc = norm_constants(&NormDescriptor::max(4), &NormDescriptor::max(3), &w).unwrap();
        assert_eq!(nc.d1, IntervalReal::point(rat_int(1)));
        assert_eq!(nc.d2, IntervalReal::point(rat_int(1)));
        assert_eq!(nc.gamma_allones, IntervalReal::point(rat_int(1)));
    }

    #[test]
    fn serde_roundtrip() {
        let n = NormDescriptor::p_norm(3, &rat_i64(3, 2)).unwrap();
        let s = serde_json::to_string(&n).unwrap();
        let back: NormDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(back.dimension(), 3);
        assert!(matches!(back.kind(), NormKind::P { num: 3, den: 2 }));
    }

    proptest! {
        // equivalence constants hold on random rational vectors, and the
        // norm scales exactly with |lambda| (homogeneity certified on the
        // built-in kinds)
        #[test]
        fn equivalence_and_homogeneity(
            xs in prop::collection::vec(-200i64..200, 2..4),
            lam_num in -20i64..20,
        ) {
            prop_assume!(xs.iter().any(|&x| x != 0));
            prop_assume!(lam_num != 0);
            let v: Vec<Rational> = xs.iter().map(|&x| rat_i64(x, 16)).collect();
            let dim = v.len();
            let w = rat_i64(1, 1_000_000_000);
            let sup = v.iter().map(|r| r.abs()).max().unwrap();
            for norm in [
                NormDescriptor::max(dim),
                NormDescriptor::euclidean(dim),
                NormDescriptor::weighted_max(vec![rat_i64(3, 2); dim]).unwrap(),
            ] {
                let iv = norm.eval_rational(&v, &w).unwrap();
                prop_assert!(iv.hi >= norm.equiv_lo() * &sup);
                prop_assert!(iv.lo <= norm.equiv_hi() * &sup);
                // homogeneity
                let lam = rat_i64(lam_num, 7);
                let scaled: Vec<Rational> = v.iter().map(|r| r * &lam).collect();
                let si = norm.eval_rational(&scaled, &w).unwrap();
                let expect = iv.scale(&lam.abs());
                // outward widths may differ; certified overlap is required
                prop_assert!(si.lo <= expect.hi && expect.lo <= si.hi);
            }
        }

        // triangle inequality on sampled rational triples
        #[test]
        fn triangle_inequality(
            a in prop::collection::vec(-60i64..60, 3),
            b in prop::collection::vec(-60i64..60, 3),
        ) {
            let va: Vec<Rational> = a.iter().map(|&x| rat_i64(x, 8)).collect();
            let vb: Vec<Rational> = b.iter().map(|&x| rat_i64(x, 8)).collect();
            let vsum: Vec<Rational> = va.iter().zip(&vb).map(|(x, y)| x + y).collect();
            let w = rat_i64(1, 1_000_000_000);
            for norm in [NormDescriptor::max(3), NormDescriptor::euclidean(3)] {
                let na = norm.eval_rational(&va, &w).unwrap();
                let nb = norm.eval_rational(&vb, &w).unwrap();
                let ns = norm.eval_rational(&vsum, &w).unwrap();
                // |a+b| <= |a| + |b| within certified slack
                prop_assert!(ns.lo <= na.hi + nb.hi);
            }
        }
    }
}
