//! Certified probability intervals and the elementary arithmetic the
//! forward recursion needs.

use std::fmt;

use num_rational::BigRational;
use serde::Serialize;

use crate::fpround::{enclose_rational, format_hex, to_rational, Arith, Float};

/// A closed interval `[lo, hi]` of representable numbers. Construction
/// enforces `lo <= hi` and rejects NaN, so empty intervals cannot exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<F> {
    lo: F,
    hi: F,
}

impl<F: Float> Interval<F> {
    pub const ZERO: Self = Interval {
        lo: F::ZERO,
        hi: F::ZERO,
    };
    pub const ONE: Self = Interval {
        lo: F::ONE,
        hi: F::ONE,
    };

    /// `None` when `lo > hi` or either end is NaN.
    pub fn new(lo: F, hi: F) -> Option<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            None
        } else {
            Some(Interval { lo, hi })
        }
    }

    pub fn point(x: F) -> Self {
        Self::new(x, x).expect("point interval from NaN")
    }

    /// The enclosing representable pair of an exact rational.
    pub fn enclose(r: &BigRational) -> Self {
        let (lo, hi) = enclose_rational::<F>(r);
        Interval { lo, hi }
    }

    #[inline]
    pub fn lo(&self) -> F {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> F {
        self.hi
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.hi == F::ZERO
    }

    pub fn contains(&self, r: &BigRational) -> bool {
        to_rational(self.lo) <= *r && *r <= to_rational(self.hi)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Width `hi - lo` rounded upward.
    pub fn width<A: Arith<F = F>>(&self) -> F {
        A::sub_up(self.hi, self.lo)
    }

    pub fn lo_rational(&self) -> BigRational {
        to_rational(self.lo)
    }

    pub fn hi_rational(&self) -> BigRational {
        to_rational(self.hi)
    }
}

/// `[down(a.lo + b.lo), up(a.hi + b.hi)]`
#[inline]
pub fn iv_add<A: Arith>(a: Interval<A::F>, b: Interval<A::F>) -> Interval<A::F> {
    Interval {
        lo: A::add_down(a.lo, b.lo),
        hi: A::add_up(a.hi, b.hi),
    }
}

/// `[down(a.lo * b.lo), up(a.hi * b.hi)]` for nonnegative operands.
#[inline]
pub fn iv_mul<A: Arith>(a: Interval<A::F>, b: Interval<A::F>) -> Interval<A::F> {
    Interval {
        lo: A::mul_down(a.lo, b.lo),
        hi: A::mul_up(a.hi, b.hi),
    }
}

/// Replaces `hi` by `min(hi, 1)`.
#[inline]
pub fn iv_clamp_unit<F: Float>(a: Interval<F>) -> Interval<F> {
    debug_assert!(a.lo <= F::ONE, "lower bound above one: {a:?}");
    if a.hi > F::ONE {
        Interval {
            lo: a.lo,
            hi: F::ONE,
        }
    } else {
        a
    }
}

/// `[down(1 - a.hi), up(1 - a.lo)]`
pub fn iv_complement<A: Arith>(a: Interval<A::F>) -> Interval<A::F> {
    let one = <A::F as Float>::ONE;
    Interval {
        lo: A::sub_down(one, a.hi),
        hi: A::sub_up(one, a.lo),
    }
}

impl<F: Float> fmt::Display for Interval<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_hex(self.lo), format_hex(self.hi))
    }
}

/// JSON form of an interval: hex fields are authoritative, decimals are
/// shortest round-trip renderings for display.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalJson {
    pub lo_hex: String,
    pub hi_hex: String,
    pub lo_dec: String,
    pub hi_dec: String,
}

impl<F: Float> From<Interval<F>> for IntervalJson {
    fn from(iv: Interval<F>) -> Self {
        IntervalJson {
            lo_hex: format_hex(iv.lo),
            hi_hex: format_hex(iv.hi),
            lo_dec: format!("{:?}", iv.lo),
            hi_dec: format!("{:?}", iv.hi),
        }
    }
}

impl<F: Float> Serialize for Interval<F> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IntervalJson::from(*self).serialize(s)
    }
}
