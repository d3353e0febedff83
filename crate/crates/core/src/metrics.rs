//! Accuracy of probability approximations: absolute and relative errors of
//! points and intervals, optimal approximators, maximal representable
//! accuracy, and the presentation formats used in reports.
//!
//! All quantities are evaluated exactly on rationals; the float-valued
//! accessors round upward so reported errors are upper bounds.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::fpround::{enclose_rational, to_rational, Float};
use crate::interval::Interval;

/// An exact error value; division by zero gives [`Metric::Infinite`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Metric {
    Finite(BigRational),
    Infinite,
}

impl Metric {
    pub fn zero() -> Self {
        Metric::Finite(BigRational::zero())
    }

    /// `num / den` with `0/0 = 0` and `x/0 = inf`.
    pub fn ratio(num: BigRational, den: &BigRational) -> Self {
        if den.is_zero() {
            if num.is_zero() {
                Metric::zero()
            } else {
                Metric::Infinite
            }
        } else {
            Metric::Finite(num / den)
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Metric::Infinite)
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Metric::Finite(r) => Some(r),
            Metric::Infinite => None,
        }
    }

    /// Smallest representable number `>=` the value.
    pub fn upper<F: Float>(&self) -> F {
        match self {
            Metric::Finite(r) => enclose_rational::<F>(r).1,
            Metric::Infinite => F::INFINITY,
        }
    }

    pub fn max(self, other: Self) -> Self {
        match (self, other) {
            (Metric::Finite(a), Metric::Finite(b)) => Metric::Finite(if a >= b { a } else { b }),
            _ => Metric::Infinite,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Finite(r) => write!(f, "{r}"),
            Metric::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("approximation {pt} lies outside [{a}, {b}]")]
    OutsideInterval { a: String, b: String, pt: String },
    #[error("interval bounds must satisfy 0 <= a <= b <= 1")]
    BadInterval,
}

fn one() -> BigRational {
    BigRational::one()
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// `min(p, 1 - p)`
fn dist_to_edge(p: &BigRational) -> BigRational {
    let c = one() - p;
    if *p <= c {
        p.clone()
    } else {
        c
    }
}

fn check_interval(a: &BigRational, b: &BigRational) -> Result<(), MetricError> {
    if a.is_negative() || a > b || *b > one() {
        return Err(MetricError::BadInterval);
    }
    Ok(())
}

/// `|p - pt|`
pub fn e_abs_point(p: &BigRational, pt: &BigRational) -> Metric {
    Metric::Finite((p - pt).abs())
}

/// `|p - pt| / min(p, 1 - p)`
pub fn e_rel_point(p: &BigRational, pt: &BigRational) -> Metric {
    Metric::ratio((p - pt).abs(), &dist_to_edge(p))
}

/// Worst relative error of `pt` over `p` in `[a, b]`, attained at an
/// endpoint.
pub fn e_rel_interval_at(
    a: &BigRational,
    b: &BigRational,
    pt: &BigRational,
) -> Result<Metric, MetricError> {
    check_interval(a, b)?;
    if pt < a || pt > b {
        return Err(MetricError::OutsideInterval {
            a: a.to_string(),
            b: b.to_string(),
            pt: pt.to_string(),
        });
    }
    Ok(e_rel_point(a, pt).max(e_rel_point(b, pt)))
}

/// Worst absolute error of `pt` over `[a, b]`.
pub fn e_abs_interval_at(a: &BigRational, b: &BigRational, pt: &BigRational) -> Metric {
    e_abs_point(a, pt).max(e_abs_point(b, pt))
}

/// Minimax relative error of `[a, b]` and its optimal approximator.
///
/// With `A = min(a, 1-a)` and `B = min(b, 1-b)` the optimum is
/// `(aB + bA) / (A + B)` with value `(b - a) / (A + B)`. A nondegenerate
/// interval touching 0 or 1 reports infinity.
pub fn e_rel_interval(a: &BigRational, b: &BigRational) -> Result<(Metric, BigRational), MetricError> {
    check_interval(a, b)?;
    if a == b {
        return Ok((Metric::zero(), a.clone()));
    }
    let ea = dist_to_edge(a);
    let eb = dist_to_edge(b);
    if ea.is_zero() || eb.is_zero() {
        return Ok((Metric::Infinite, (a + b) * half()));
    }
    let s = &ea + &eb;
    let pt = (a * &eb + b * &ea) / &s;
    Ok((Metric::Finite((b - a) / s), pt))
}

/// `((b - a) / 2, (a + b) / 2)`
pub fn e_abs_interval(a: &BigRational, b: &BigRational) -> Result<(Metric, BigRational), MetricError> {
    check_interval(a, b)?;
    Ok((Metric::Finite((b - a) * half()), (a + b) * half()))
}

/// Relative error of the enclosing representable interval of `p`.
pub fn max_accuracy<F: Float>(p: &BigRational) -> Metric {
    let (lo, hi) = enclose_rational::<F>(p);
    e_rel_interval(&to_rational(lo), &to_rational(hi))
        .expect("enclosure of a probability")
        .0
}

/// `max(max_accuracy(p), max_accuracy(1 - p))`
pub fn max_accuracy_complement<F: Float>(p: &BigRational) -> Metric {
    max_accuracy::<F>(p).max(max_accuracy::<F>(&(one() - p)))
}

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

/// The minimal `c * 10^k >= x` with a 3-significant-digit `c`, written as
/// `"2.01e-11"`; `0` and `inf` are written as such.
pub fn display_bound_3sig(x: &Metric) -> String {
    let x = match x {
        Metric::Infinite => return "inf".to_string(),
        Metric::Finite(x) => x,
    };
    assert!(!x.is_negative(), "display of a negative bound");
    if x.is_zero() {
        return "0".to_string();
    }
    // Find k with 100 * 10^k <= x < 1000 * 10^k.
    let scale = |k: i32| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(pow10(k as u32))
        } else {
            BigRational::new(BigInt::one(), pow10((-k) as u32))
        }
    };
    let digits = x.numer().to_string().len() as i32 - x.denom().to_string().len() as i32;
    let mut k = digits - 3;
    let hundred = BigRational::from_integer(BigInt::from(100));
    let thousand = BigRational::from_integer(BigInt::from(1000));
    while *x >= &thousand * scale(k) {
        k += 1;
    }
    while *x < &hundred * scale(k) {
        k -= 1;
    }
    let c = x / scale(k);
    let mut ci = c.ceil().to_integer();
    if ci == BigInt::from(1000) {
        ci = BigInt::from(100);
        k += 1;
    }
    let ci: u32 = ci.try_into().expect("three digits");
    format!("{}.{:02}e{}", ci / 100, ci % 100, k + 2)
}

/// Nearest value of the 7-digit presentation system as a digit string
/// after the decimal point, or `"0"` / `"1"`.
///
/// Values below one half keep 7 digits after their leading zeros, values
/// above keep 7 digits after their leading nines (at least 7 digits in
/// total). Ties round up among leading zeros and down among leading nines.
fn nearest_t(y: &BigRational) -> String {
    if y.is_zero() {
        return "0".to_string();
    }
    if *y == one() {
        return "1".to_string();
    }
    let tenth = BigRational::new(BigInt::one(), BigInt::from(10));
    let low = *y < half();
    let mut run = 0u32;
    if low {
        let mut bound = tenth.clone();
        while *y < bound {
            run += 1;
            bound = bound * &tenth;
        }
    } else {
        let z = one() - y;
        let mut bound = tenth.clone();
        while z <= bound {
            run += 1;
            bound = bound * &tenth;
        }
    }
    let len = 7.max(run + 5);
    let scaled = y * BigRational::from_integer(pow10(len));
    let (mut fl, rem): (BigInt, BigInt) = scaled.numer().div_mod_floor(scaled.denom());
    let twice: BigInt = rem * 2;
    let round_up = match twice.cmp(scaled.denom()) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Equal => low,
        std::cmp::Ordering::Less => false,
    };
    if round_up {
        fl += 1;
    }
    if fl == pow10(len) {
        return "1".to_string();
    }
    if fl.is_zero() {
        return "0".to_string();
    }
    debug_assert_eq!(fl.sign(), Sign::Plus);
    format!("{:0>width$}", fl.to_string(), width = len as usize)
}

/// Presentation of an interval `[a, b]` in the 7-digit system: the digits
/// both ends agree on, `?` where they first differ, and a leading run of
/// three or more zeros or nines written as `.0^R` / `.9^R` (`{R}` when
/// `R >= 10`).
pub fn format_t(a: &BigRational, b: &BigRational) -> String {
    let ta = nearest_t(a);
    let tb = nearest_t(b);
    let (digits, unsure) = if ta == tb {
        if ta == "0" || ta == "1" {
            return ta;
        }
        (ta, false)
    } else {
        let expand = |s: &str| -> Vec<u8> {
            match s {
                "1" => vec![b'9'; 400],
                "0" => vec![b'0'; 400],
                _ => s.as_bytes().to_vec(),
            }
        };
        let (ea, eb) = (expand(&ta), expand(&tb));
        let common = ea.iter().zip(&eb).take_while(|(x, y)| x == y).count();
        (String::from_utf8(ea[..common].to_vec()).expect("ascii"), true)
    };
    let mut out = String::from(".");
    let bytes = digits.as_bytes();
    let run = match bytes.first() {
        Some(&c) if c == b'0' || c == b'9' => bytes.iter().take_while(|&&x| x == c).count(),
        _ => 0,
    };
    if run >= 3 {
        out.push(bytes[0] as char);
        out.push('^');
        if run < 10 {
            out.push_str(&run.to_string());
        } else {
            out.push_str(&format!("{{{run}}}"));
        }
        out.push_str(&digits[run..]);
    } else {
        out.push_str(&digits);
    }
    if unsure {
        out.push('?');
    }
    out
}

/// Error summary of a certified interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport<F> {
    /// Upper bound on `(b - a) / 2`.
    pub e_abs_opt: F,
    /// Upper bound on the minimax relative error (may be infinite).
    pub e_rel_opt: F,
    pub e_abs_display: String,
    pub e_rel_display: String,
    /// Midpoint, rounded down.
    pub best_abs_approximator: F,
    /// Relative-error optimum, rounded down.
    pub best_rel_approximator: F,
    /// Presentation in the 7-digit system.
    pub approx: String,
}

impl<F: Float> ErrorReport<F> {
    pub fn new(iv: &Interval<F>) -> Self {
        let a = iv.lo_rational();
        let b = iv.hi_rational();
        let (eabs, mid) = e_abs_interval(&a, &b).expect("certified probability interval");
        let (erel, opt) = e_rel_interval(&a, &b).expect("certified probability interval");
        ErrorReport {
            e_abs_opt: eabs.upper(),
            e_rel_opt: erel.upper(),
            e_abs_display: display_bound_3sig(&eabs),
            e_rel_display: display_bound_3sig(&erel),
            best_abs_approximator: enclose_rational::<F>(&mid).0,
            best_rel_approximator: enclose_rational::<F>(&opt).0,
            approx: format_t(&a, &b),
        }
    }
}

/// JSON form of the two metrics of an `errors` query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorSummary {
    pub e_abs: String,
    pub e_abs_approximator: String,
    pub e_rel: String,
    pub e_rel_approximator: String,
    pub e_abs_display: String,
    pub e_rel_display: String,
    pub approx: String,
}

impl<F: Float> From<&ErrorReport<F>> for ErrorSummary {
    fn from(r: &ErrorReport<F>) -> Self {
        ErrorSummary {
            e_abs: format!("{:?}", r.e_abs_opt),
            e_abs_approximator: format!("{:?}", r.best_abs_approximator),
            e_rel: format!("{:?}", r.e_rel_opt),
            e_rel_approximator: format!("{:?}", r.best_rel_approximator),
            e_abs_display: r.e_abs_display.clone(),
            e_rel_display: r.e_rel_display.clone(),
            approx: r.approx.clone(),
        }
    }
}
