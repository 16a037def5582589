//! Closed-form constants: covering thresholds, ball volumes, the covering
//! bound, Dirichlet constants for named norm pairs, and the certified
//! elementary routines (pi, log, integer roots) the rest of the crate
//! leans on. Pi and square roots are carried symbolically until a decimal
//! is requested, so the threshold identities are exact, not floating-point
//! coincidences.

use crate::exactnum::{rat_i64, rat_int, IntervalReal, Rational};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------------------
// certified elementary functions
// ---------------------------------------------------------------------------

/// Certified interval for pi, width at most `width`.
/// Machin: pi = 16 atan(1/5) - 4 atan(1/239).
pub fn pi_interval(width: &Rational) -> IntervalReal {
    let w5 = width / rat_int(32);
    let w239 = width / rat_int(8);
    let a5 = atan_inv(5, &w5);
    let a239 = atan_inv(239, &w239);
    a5.scale(&rat_int(16)).sub(&a239.scale(&rat_int(4)))
}

/// atan(1/x) for integer x >= 2 via the alternating series; the error after
/// truncation is bounded by the first omitted term.
fn atan_inv(x: i64, width: &Rational) -> IntervalReal {
    let xr = rat_int(x);
    let x2 = &xr * &xr;
    let mut term = xr.recip();
    let mut sum = Rational::zero();
    let mut k: i64 = 0;
    loop {
        let contrib = &term / rat_int(2 * k + 1);
        if contrib <= *width {
            // alternating: true value within [sum - contrib, sum + contrib]
            return IntervalReal::new(&sum - &contrib, &sum + &contrib);
        }
        if k % 2 == 0 {
            sum += &contrib;
        } else {
            sum -= &contrib;
        }
        term = &term / &x2;
        k += 1;
    }
}

/// Certified interval for ln 2 = 2 atanh(1/3).
pub fn ln2_interval(width: &Rational) -> IntervalReal {
    atanh_small(&rat_i64(1, 3), &(width / rat_int(2))).scale(&rat_int(2))
}

/// atanh(u) for |u| <= 1/3 by the odd power series; tail after the term in
/// u^(2K+1) is at most that term times 9/8 (geometric with ratio u^2<=1/9).
fn atanh_small(u: &Rational, width: &Rational) -> IntervalReal {
    assert!(u.abs() <= rat_i64(1, 3));
    let u2 = u * u;
    let mut pow = u.clone();
    let mut sum = Rational::zero();
    let mut k: i64 = 0;
    loop {
        let contrib = &pow / rat_int(2 * k + 1);
        let bound = contrib.abs() * rat_i64(9, 8);
        if bound <= *width {
            return IntervalReal::new(&sum - &bound, &sum + &bound);
        }
        sum += &contrib;
        pow = &pow * &u2;
        k += 1;
    }
}

/// Certified interval for ln q, q a positive rational.
pub fn ln_rational(q: &Rational, width: &Rational) -> Result<IntervalReal> {
    if !q.is_positive() {
        return Err(Error::InvalidParameter("log of nonpositive value".into()));
    }
    // reduce q = m * 2^e with m in [2/3, 4/3); then |(m-1)/(m+1)| <= 1/5.
    let mut m = q.clone();
    let mut e: i64 = 0;
    let lo = rat_i64(2, 3);
    let hi = rat_i64(4, 3);
    while m >= hi {
        m /= rat_int(2);
        e += 1;
    }
    while m < lo {
        m *= rat_int(2);
        e -= 1;
    }
    let u = (&m - rat_int(1)) / (&m + rat_int(1));
    let w_half = width / rat_int(2);
    let series = atanh_small(&u, &(&w_half / rat_int(2))).scale(&rat_int(2));
    if e == 0 {
        return Ok(series);
    }
    let ln2 = ln2_interval(&(&w_half / rat_int(e.abs()))).scale(&rat_int(e));
    Ok(series.add(&ln2))
}

/// Certified ln over an interval of positive rationals.
pub fn ln_interval(x: &IntervalReal, width: &Rational) -> Result<IntervalReal> {
    if !x.lo.is_positive() {
        return Err(Error::InvalidParameter("log of nonpositive interval".into()));
    }
    let w = width / rat_int(2);
    let lo = ln_rational(&x.lo, &w)?;
    let hi = ln_rational(&x.hi, &w)?;
    Ok(IntervalReal::new(lo.lo, hi.hi))
}

/// Certified k-th root of a nonnegative rational, width at most `width`.
pub fn root_rational(q: &Rational, k: u32, width: &Rational) -> Result<IntervalReal> {
    if q.is_negative() {
        return Err(Error::InvalidParameter("root of negative value".into()));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("zeroth root".into()));
    }
    if q.is_zero() {
        return Ok(IntervalReal::zero());
    }
    // scale so that the integer k-th root gives 1/S resolution, S = 2^p
    let mut p: u32 = 2;
    loop {
        let sres = Rational::new(BigInt::from(2), BigInt::one() << p);
        if sres <= *width || p > 4_000_000 {
            break;
        }
        p += 8;
    }
    let s = BigInt::one() << p;
    let sk = pow_bigint(&s, k);
    let scaled = (q * Rational::from_integer(sk)).floor().to_integer();
    let t = scaled.nth_root(k);
    let lo = Rational::new(t.clone(), s.clone());
    let hi = Rational::new(t + 2, s);
    Ok(IntervalReal::new(lo, hi))
}

/// Outward k-th root of a nonnegative interval.
pub fn root_interval(x: &IntervalReal, k: u32, width: &Rational) -> Result<IntervalReal> {
    let w = width / rat_int(2);
    let lo = root_rational(&x.lo, k, &w)?;
    let hi = root_rational(&x.hi, k, &w)?;
    Ok(IntervalReal::new(lo.lo, hi.hi))
}

/// Certified x^(u/v) for a nonnegative interval x and integers u, v >= 1.
pub fn pow_rat_exp_interval(
    x: &IntervalReal,
    u: i64,
    v: u32,
    width: &Rational,
) -> Result<IntervalReal> {
    if u == 0 {
        return Ok(IntervalReal::point(rat_int(1)));
    }
    let powed = if u > 0 {
        x.powi(u as u32)
    } else {
        x.powi((-u) as u32).recip()?
    };
    if v == 1 {
        return Ok(powed);
    }
    root_interval(&powed, v, width)
}

fn pow_bigint(b: &BigInt, k: u32) -> BigInt {
    b.pow(k)
}

// ---------------------------------------------------------------------------
// symbolic values  q * pi^(p/2) * sqrt(d)
// ---------------------------------------------------------------------------

/// Exact symbolic value `coeff * pi^(pi_half/2) * sqrt(surd)` with `surd`
/// squarefree. Closed under multiplication, which is all the threshold
/// identities need.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymReal {
    #[serde(with = "crate::exactnum::rational_serde")]
    pub coeff: Rational,
    pub pi_half: u32,
    pub surd: u64,
}

impl SymReal {
    pub fn rational(q: Rational) -> Self {
        SymReal {
            coeff: q,
            pi_half: 0,
            surd: 1,
        }
    }

    /// q * sqrt(d), normalizing the square part of d into the coefficient.
    pub fn with_surd(q: Rational, d: u64) -> Self {
        let (sq, free) = split_square(d);
        SymReal {
            coeff: q * rat_int(sq as i64),
            pi_half: 0,
            surd: if q_is_zero_u(&free) { 1 } else { free },
        }
    }

    pub fn mul(&self, other: &SymReal) -> SymReal {
        let d = self.surd as u128 * other.surd as u128;
        let d = u64::try_from(d).expect("surd overflow");
        let (sq, free) = split_square(d);
        SymReal {
            coeff: &self.coeff * &other.coeff * rat_int(sq as i64),
            pi_half: self.pi_half + other.pi_half,
            surd: free,
        }
    }

    pub fn scale(&self, q: &Rational) -> SymReal {
        SymReal {
            coeff: &self.coeff * q,
            pi_half: self.pi_half,
            surd: self.surd,
        }
    }

    /// Divide, requiring the pi power and surd to cancel or divide evenly
    /// (sufficient for the identities computed here).
    pub fn div(&self, other: &SymReal) -> Option<SymReal> {
        if other.coeff.is_zero() {
            return None;
        }
        if self.pi_half < other.pi_half {
            return None;
        }
        // sqrt(a)/sqrt(b) = sqrt(a b)/b
        let prod = self.surd as u128 * other.surd as u128;
        let prod = u64::try_from(prod).ok()?;
        let (sq, free) = split_square(prod);
        Some(SymReal {
            coeff: &self.coeff / &other.coeff * rat_int(sq as i64)
                / rat_int(other.surd as i64),
            pi_half: self.pi_half - other.pi_half,
            surd: free,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// Certified decimal interval of width at most `width`.
    pub fn to_interval(&self, width: &Rational) -> IntervalReal {
        if self.coeff.is_zero() {
            return IntervalReal::zero();
        }
        // crude magnitude bound to split the width budget
        let mut acc = IntervalReal::point(self.coeff.clone());
        let w = width / rat_int(8) / magnitude_bound(self);
        if self.pi_half > 0 {
            let pi = pi_interval(&w);
            let whole = self.pi_half / 2;
            if whole > 0 {
                acc = acc.mul(&pi.powi(whole));
            }
            if self.pi_half % 2 == 1 {
                let sqrt_pi = root_interval(&pi, 2, &w).expect("pi positive");
                acc = acc.mul(&sqrt_pi);
            }
        }
        if self.surd > 1 {
            let r = root_rational(&rat_int(self.surd as i64), 2, &w).expect("surd nonneg");
            acc = acc.mul(&r);
        }
        acc
    }

    pub fn describe(&self) -> String {
        let mut s = crate::exactnum::rat_string(&self.coeff);
        match self.pi_half {
            0 => {}
            1 => s.push_str("*sqrt(pi)"),
            2 => s.push_str("*pi"),
            p if p % 2 == 0 => s.push_str(&format!("*pi^{}", p / 2)),
            p => s.push_str(&format!("*pi^({p}/2)")),
        }
        if self.surd > 1 {
            s.push_str(&format!("*sqrt({})", self.surd));
        }
        s
    }
}

fn q_is_zero_u(d: &u64) -> bool {
    *d == 0
}

fn magnitude_bound(s: &SymReal) -> Rational {
    // an upper bound on pi^(p/2) sqrt(d), generous
    let mut m = rat_int(1) + s.coeff.abs();
    for _ in 0..s.pi_half {
        m *= rat_int(2); // sqrt(pi) < 2
    }
    m *= rat_int((s.surd.sqrt() + 2) as i64);
    m
}

/// d = sq^2 * free with free squarefree; returns (sq, free).
fn split_square(d: u64) -> (u64, u64) {
    if d == 0 {
        return (0, 0);
    }
    let mut free = d;
    let mut sq: u64 = 1;
    let mut p: u64 = 2;
    while p * p <= free {
        while free % (p * p) == 0 {
            free /= p * p;
            sq *= p;
        }
        p += 1;
    }
    (sq, free)
}

// ---------------------------------------------------------------------------
// Gamma at integers and half-integers, ball volumes
// ---------------------------------------------------------------------------

pub fn factorial(k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    acc
}

/// (2m-1)!! for m >= 0 (empty product = 1).
pub fn double_factorial_odd(m: u64) -> BigInt {
    let mut acc = BigInt::one();
    let mut i: u64 = 1;
    while i + 1 <= 2 * m {
        acc *= BigInt::from(i);
        i += 2;
    }
    acc
}

/// Gamma(k) for integer k >= 1.
pub fn gamma_int(k: u64) -> Rational {
    assert!(k >= 1);
    Rational::from_integer(factorial(k - 1))
}

/// Gamma(m + 1/2) = (2m-1)!!/2^m * sqrt(pi), exact symbolic form.
pub fn gamma_half(m: u64) -> SymReal {
    let q = Rational::new(double_factorial_odd(m), BigInt::one() << m);
    SymReal {
        coeff: q,
        pi_half: 1,
        surd: 1,
    }
}

/// Exact volume of the unit k-ball, pi^(k/2)/Gamma(k/2+1).
pub fn ball_volume_sym(k: u64) -> SymReal {
    if k % 2 == 0 {
        let j = k / 2;
        SymReal {
            coeff: Rational::new(BigInt::one(), factorial(j)),
            pi_half: k as u32,
            surd: 1,
        }
    } else {
        // pi^(k/2) / Gamma((k+1)/2 + 1/2): denominator (2j+1)!!/2^(j+1) sqrt(pi)
        // with j = (k-1)/2; the sqrt(pi) cancels one half power.
        let j = (k - 1) / 2;
        let denom = double_factorial_odd(j + 1);
        SymReal {
            coeff: Rational::new(BigInt::one() << (j + 1), denom),
            pi_half: (k - 1) as u32,
            surd: 1,
        }
    }
}

pub fn ball_volume(k: u64, width: &Rational) -> (SymReal, IntervalReal) {
    let s = ball_volume_sym(k);
    let iv = s.to_interval(width);
    (s, iv)
}

// ---------------------------------------------------------------------------
// covering thresholds
// ---------------------------------------------------------------------------

/// The explicit threshold constant
/// c_n = (n-3)/(8(n-2)^{3/2}) * sqrt(pi) * Gamma(n - 1/2)/Gamma(n),
/// via Gamma(n-1/2) = (2n-3)!! sqrt(pi) / 2^{n-1}. Strictly positive for
/// n >= 4 and strictly below the volume-ratio supremum (`cn_volume_sup_sym`),
/// which is what the covering argument needs.
pub fn cn_threshold_sym(n: u64) -> Result<SymReal> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "threshold constant requires n >= 4, got {n}"
        )));
    }
    // (n-3) (2n-3)!! / (8 * 2^{n-1} * (n-1)!) * pi * (n-2)^{-3/2}
    let q = Rational::new(
        BigInt::from(n - 3) * double_factorial_odd(n - 1),
        BigInt::from(8u32) * (BigInt::one() << (n - 1)) * factorial(n - 1),
    );
    let m = n - 2;
    // (n-2)^{-3/2} = sqrt(n-2) / (n-2)^2
    let base = SymReal::with_surd(q / rat_int((m * m) as i64), m);
    Ok(SymReal {
        coeff: base.coeff,
        pi_half: 2,
        surd: base.surd,
    })
}

pub fn cn_threshold(n: u64, width: &Rational) -> Result<(SymReal, IntervalReal)> {
    let s = cn_threshold_sym(n)?;
    let iv = s.to_interval(width);
    Ok((s, iv))
}

/// The supremum of admissible covering constants,
/// (n-3)/(4(2n-4) sqrt(n-2)) * vol(B_{n-2}) / vol(B_{n-3});
/// the covering bound evaluated at this value equals vol(B_{n-2}) exactly.
pub fn cn_volume_sup_sym(n: u64) -> Result<SymReal> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "threshold supremum requires n >= 4, got {n}"
        )));
    }
    let ratio = ball_volume_sym(n - 2)
        .div(&ball_volume_sym(n - 3))
        .expect("volume ratio is exact");
    let m = n - 2;
    let q = Rational::new(BigInt::from(n - 3), BigInt::from(4 * (2 * n - 4)));
    // 1/sqrt(n-2) = sqrt(n-2)/(n-2)
    let coeff = SymReal::with_surd(q / rat_int(m as i64), m);
    Ok(coeff.mul(&ratio))
}

/// The covering-bound coefficient at eps = eps2 = 0:
/// 4 (2n-4) sqrt(n-2) vol(B_{n-3}) / (n-3); the bound is this times L T^n.
pub fn covering_coefficient_sym(n: u64) -> Result<SymReal> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "covering bound requires n >= 4 (n = 3 would need a logarithmic term), got {n}"
        )));
    }
    let q = Rational::new(BigInt::from(4 * (2 * n - 4)), BigInt::from(n - 3));
    Ok(SymReal::with_surd(q, n - 2).mul(&ball_volume_sym(n - 3)))
}

/// Symbolic covering bound at eps = eps2 = 0 for a symbolic L*T^n value.
pub fn covering_bound_sym(n: u64, lv_tvn: &SymReal) -> Result<SymReal> {
    Ok(covering_coefficient_sym(n)?.mul(lv_tvn))
}

/// Certified covering bound
/// 2(2n-4) (2 sqrt(n-2) + 2 eps) vol(B_{n-3}) (1/(n-3) + eps2) L T^n,
/// with `box_scale` an optional norm-equivalence inflation applied to T
/// (exact tightness for non-max norms is not claimed).
#[allow(clippy::too_many_arguments)]
pub fn covering_bound(
    n: u64,
    eps: &Rational,
    eps2: &Rational,
    l_v: &IntervalReal,
    t_v: &Rational,
    box_scale: &Rational,
    width: &Rational,
) -> Result<IntervalReal> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "covering bound requires n >= 4, got {n}"
        )));
    }
    if eps.is_negative() || eps2.is_negative() {
        return Err(Error::InvalidParameter("eps, eps2 must be >= 0".into()));
    }
    let w = width / rat_int(16);
    let sqrt_n2 = root_rational(&rat_int((n - 2) as i64), 2, &w)?;
    let vol = ball_volume_sym(n - 3).to_interval(&w);
    let t_eff = t_v * box_scale;
    let t_pow = IntervalReal::point(t_eff).powi(n as u32);
    let factor1 = rat_int(2 * (2 * n as i64 - 4));
    let factor2 = sqrt_n2
        .scale(&rat_int(2))
        .add(&IntervalReal::point(eps * rat_int(2)));
    let factor3 = IntervalReal::point(rat_i64(1, n as i64 - 3) + eps2);
    Ok(factor2
        .scale(&factor1)
        .mul(&vol)
        .mul(&factor3)
        .mul(l_v)
        .mul(&t_pow))
}

// ---------------------------------------------------------------------------
// Dirichlet constant D for named norm pairs
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum DirichletD {
    /// Exact value, proven (max/max via the linear-forms theorem).
    Exact(#[serde(with = "crate::exactnum::rational_serde")] Rational),
    /// Empirical upper bound from a random-matrix sweep; not rigorous.
    EmpiricalUpper(IntervalReal),
}

impl DirichletD {
    pub fn is_rigorous(&self) -> bool {
        matches!(self, DirichletD::Exact(_))
    }
}

/// D for the given norm pair. Max/max (in any dimensions, including the
/// 1-dimensional absolute value) returns exactly 1; anything else gets an
/// empirical upper bound from a sweep of random rational matrices, clearly
/// labeled non-rigorous.
pub fn dirichlet_d(
    m: usize,
    n: usize,
    norm1: &crate::normspace::NormDescriptor,
    norm2: &crate::normspace::NormDescriptor,
    sweep_matrices: usize,
    height_cap: i64,
    seed: u64,
) -> Result<DirichletD> {
    use crate::normspace::NormKind;
    let maxlike = |d: &crate::normspace::NormDescriptor| {
        matches!(d.kind(), NormKind::Max) || (d.dimension() == 1 && d.is_absolute_value_like())
    };
    if maxlike(norm1) && maxlike(norm2) {
        return Ok(DirichletD::Exact(rat_int(1)));
    }
    crate::spectrum::empirical_dirichlet_upper(m, n, norm1, norm2, sweep_matrices, height_cap, seed)
        .map(DirichletD::EmpiricalUpper)
}
