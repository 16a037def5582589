use super::{rat_string, Rational};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Result of a certified comparison of two intervals. `Overlap` means the
/// intervals intersect, so the order of the underlying reals is not decided
/// at this precision; the caller refines and retries. Equal exact values
/// always report `Overlap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpCertified {
    Less,
    Greater,
    Overlap,
}

/// Closed interval with rational endpoints. All arithmetic is outward
/// exact: rational endpoint arithmetic makes the usual interval formulas
/// lossless, so the true result of the operation on any members of the
/// operand intervals lies inside the result interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalReal {
    #[serde(with = "super::rational_serde")]
    pub lo: Rational,
    #[serde(with = "super::rational_serde")]
    pub hi: Rational,
}

impl fmt::Display for IntervalReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", rat_string(&self.lo), rat_string(&self.hi))
    }
}

impl IntervalReal {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        IntervalReal { lo, hi }
    }

    pub fn point(v: Rational) -> Self {
        IntervalReal { lo: v.clone(), hi: v }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_interval(&self, other: &IntervalReal) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / super::rat_int(2)
    }

    pub fn add(&self, other: &IntervalReal) -> IntervalReal {
        IntervalReal {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &IntervalReal) -> IntervalReal {
        IntervalReal {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> IntervalReal {
        IntervalReal {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, other: &IntervalReal) -> IntervalReal {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        IntervalReal { lo, hi }
    }

    pub fn scale(&self, c: &Rational) -> IntervalReal {
        if c.is_negative() {
            IntervalReal {
                lo: &self.hi * c,
                hi: &self.lo * c,
            }
        } else {
            IntervalReal {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    pub fn add_rat(&self, c: &Rational) -> IntervalReal {
        IntervalReal {
            lo: &self.lo + c,
            hi: &self.hi + c,
        }
    }

    pub fn abs(&self) -> IntervalReal {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let hi = std::cmp::max(-self.lo.clone(), self.hi.clone());
            IntervalReal {
                lo: Rational::zero(),
                hi,
            }
        }
    }

    /// Integer power with outward bounds.
    pub fn powi(&self, k: u32) -> IntervalReal {
        if k == 0 {
            return IntervalReal::point(super::rat_int(1));
        }
        let lo_p = pow_rat(&self.lo, k);
        let hi_p = pow_rat(&self.hi, k);
        if k % 2 == 1 {
            IntervalReal { lo: lo_p, hi: hi_p }
        } else if !self.lo.is_negative() {
            IntervalReal { lo: lo_p, hi: hi_p }
        } else if !self.hi.is_positive() {
            IntervalReal { lo: hi_p, hi: lo_p }
        } else {
            IntervalReal {
                lo: Rational::zero(),
                hi: std::cmp::max(lo_p, hi_p),
            }
        }
    }

    /// Reciprocal; requires the interval to exclude zero.
    pub fn recip(&self) -> crate::Result<IntervalReal> {
        if self.contains(&Rational::zero()) {
            return Err(crate::Error::InvalidParameter(
                "reciprocal of interval containing zero".into(),
            ));
        }
        Ok(IntervalReal {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &IntervalReal) -> IntervalReal {
        IntervalReal {
            lo: std::cmp::min(self.lo.clone(), other.lo.clone()),
            hi: std::cmp::max(self.hi.clone(), other.hi.clone()),
        }
    }

    /// Pointwise min of two intervals (contains min(x,y) for any members).
    pub fn min_interval(&self, other: &IntervalReal) -> IntervalReal {
        IntervalReal {
            lo: std::cmp::min(self.lo.clone(), other.lo.clone()),
            hi: std::cmp::min(self.hi.clone(), other.hi.clone()),
        }
    }

    /// Pointwise max.
    pub fn max_interval(&self, other: &IntervalReal) -> IntervalReal {
        IntervalReal {
            lo: std::cmp::max(self.lo.clone(), other.lo.clone()),
            hi: std::cmp::max(self.hi.clone(), other.hi.clone()),
        }
    }

    /// Certified three-way comparison.
    pub fn cmp_certified(&self, other: &IntervalReal) -> CmpCertified {
        if self.hi < other.lo {
            CmpCertified::Less
        } else if self.lo > other.hi {
            CmpCertified::Greater
        } else {
            CmpCertified::Overlap
        }
    }

    pub fn cmp_rat(&self, v: &Rational) -> CmpCertified {
        if &self.hi < v {
            CmpCertified::Less
        } else if &self.lo > v {
            CmpCertified::Greater
        } else {
            CmpCertified::Overlap
        }
    }

    /// Floor on a definite interval: `Some(k)` when every member has the
    /// same floor, `None` (indeterminate, forces refinement) when the
    /// interval straddles an integer. Never silently misrounds.
    pub fn floor_definite(&self) -> Option<BigInt> {
        let fl = self.lo.floor().to_integer();
        let fh = self.hi.floor().to_integer();
        // hi being exactly an integer is still ambiguous: the true value
        // could be hi (floor = hi) or just below (floor = hi - 1),
        // unless the interval is a point.
        if fl == fh && (!self.hi.is_integer() || self.is_point()) {
            Some(fl)
        } else {
            None
        }
    }

    pub fn ceil_definite(&self) -> Option<BigInt> {
        let cl = self.lo.ceil().to_integer();
        let ch = self.hi.ceil().to_integer();
        if cl == ch && (!self.lo.is_integer() || self.is_point()) {
            Some(cl)
        } else {
            None
        }
    }
}

fn pow_rat(r: &Rational, k: u32) -> Rational {
    let mut acc = Rational::from_integer(BigInt::from(1));
    let mut base = r.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Sum of interval values.
pub fn interval_sum<'a>(it: impl IntoIterator<Item = &'a IntervalReal>) -> IntervalReal {
    let mut acc = IntervalReal::zero();
    for x in it {
        acc = acc.add(x);
    }
    acc
}
