//! Directed-rounding scalar arithmetic on binary floating-point numbers.
//!
//! Every operation first computes the round-to-nearest result and then
//! determines the sign of the rounding residual `exact - nearest` without
//! touching the floating-point environment: TwoSum for addition, an exact
//! product error (fused multiply-add or Dekker splitting) for multiplication
//! and division, and exact integer arithmetic on the decomposed operands in
//! the underflow range where those transformations lose exactness.
//!
//! Knowing the residual sign, a [`Strong`] context returns the optimal
//! directed result (the nearest representable number on the requested side
//! of the exact value). A [`Fallback`] context models a platform that only
//! reports inexactness: whenever the operation was inexact it steps the
//! nearest result one unit in the last place outward in both directions.

use std::cmp::Ordering;
use std::fmt::{self, Debug};
use std::marker::PhantomData;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

/// Binary interchange format used for representable numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Binary64,
    Binary32,
}

impl Precision {
    pub fn as_str(self) -> &'static str {
        match self {
            Precision::Binary64 => "binary64",
            Precision::Binary32 => "binary32",
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How directed results are derived from the nearest-rounded result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundingMode {
    /// Optimal directed rounding.
    Strong,
    /// One-ulp outward stepping of inexact results.
    Fallback,
}

/// Name of the environment variable selecting the rounding mode.
pub const ROUNDING_ENV: &str = "RIGSCAN_ROUNDING";

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown rounding mode {0:?} (expected \"strong\" or \"fallback\")")]
pub struct UnknownRoundingMode(pub String);

impl RoundingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RoundingMode::Strong => "strong",
            RoundingMode::Fallback => "fallback",
        }
    }

    /// Reads [`ROUNDING_ENV`]; unset means [`RoundingMode::Strong`].
    pub fn from_env() -> Result<Self, UnknownRoundingMode> {
        match std::env::var(ROUNDING_ENV) {
            Ok(v) => v.parse(),
            Err(_) => Ok(RoundingMode::Strong),
        }
    }
}

impl std::str::FromStr for RoundingMode {
    type Err = UnknownRoundingMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "strong" => Ok(RoundingMode::Strong),
            "fallback" => Ok(RoundingMode::Fallback),
            other => Err(UnknownRoundingMode(other.to_string())),
        }
    }
}

impl fmt::Display for RoundingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A binary floating-point format with the bit-level access the directed
/// operations need. Implemented for `f64` and, with the `binary32` feature,
/// for `f32`.
pub trait Float:
    Copy
    + PartialOrd
    + PartialEq
    + Debug
    + Default
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const PRECISION: Precision;
    const ZERO: Self;
    const ONE: Self;
    const INFINITY: Self;
    const NAN: Self;
    const MAX: Self;
    /// Smallest positive normal number.
    const MIN_NORMAL: Self;
    /// Number of stored fraction bits.
    const FRACTION_BITS: u32;
    /// Exponent of the smallest subnormal, `2^MIN_LSB_EXP`.
    const MIN_LSB_EXP: i32;
    /// Largest `e` such that `2^e * (2 - 2^-FRACTION_BITS)` is finite.
    const MAX_EXP: i32;
    /// Products at least this large have an exactly representable error term.
    const EXACT_PRODUCT_MIN: Self;
    /// Operands below this magnitude can be split without overflow.
    const SPLIT_MAX: Self;
    /// Veltkamp splitting constant `2^ceil(p/2) + 1`.
    const SPLITTER: Self;

    fn next_up(self) -> Self;
    fn next_down(self) -> Self;
    fn abs(self) -> Self;
    fn is_finite(self) -> bool;
    fn is_nan(self) -> bool;
    fn fused_mul_add(self, a: Self, b: Self) -> Self;
    /// Splits a finite value into `(negative, mantissa, exponent)` with
    /// `value = ±mantissa * 2^exponent` exactly.
    fn decompose(self) -> (bool, u64, i32);
    /// Raw bit pattern widened to 64 bits.
    fn to_bits_u64(self) -> u64;
    /// Nearest-rounded conversion from an unsigned integer.
    fn from_u64_nearest(n: u64) -> Self;
    fn to_f64(self) -> f64;
}

macro_rules! impl_float {
    ($t:ty, $bits:ty, $prec:expr, $frac:expr, $min_lsb:expr, $max_exp:expr,
     $exact_min:expr, $split_max:expr, $splitter:expr) => {
        impl Float for $t {
            const PRECISION: Precision = $prec;
            const ZERO: Self = 0.0;
            const ONE: Self = 1.0;
            const INFINITY: Self = <$t>::INFINITY;
            const NAN: Self = <$t>::NAN;
            const MAX: Self = <$t>::MAX;
            const MIN_NORMAL: Self = <$t>::MIN_POSITIVE;
            const FRACTION_BITS: u32 = $frac;
            const MIN_LSB_EXP: i32 = $min_lsb;
            const MAX_EXP: i32 = $max_exp;
            const EXACT_PRODUCT_MIN: Self = $exact_min;
            const SPLIT_MAX: Self = $split_max;
            const SPLITTER: Self = $splitter;

            #[inline]
            fn next_up(self) -> Self {
                <$t>::next_up(self)
            }
            #[inline]
            fn next_down(self) -> Self {
                <$t>::next_down(self)
            }
            #[inline]
            fn abs(self) -> Self {
                <$t>::abs(self)
            }
            #[inline]
            fn is_finite(self) -> bool {
                <$t>::is_finite(self)
            }
            #[inline]
            fn is_nan(self) -> bool {
                <$t>::is_nan(self)
            }
            #[inline]
            fn fused_mul_add(self, a: Self, b: Self) -> Self {
                <$t>::mul_add(self, a, b)
            }
            fn decompose(self) -> (bool, u64, i32) {
                let total = <$bits>::BITS;
                let bits = self.to_bits();
                let neg = (bits >> (total - 1)) != 0;
                let exp_mask: $bits = (1 << (total - 1 - $frac)) - 1;
                let exp_field = ((bits >> $frac) & exp_mask) as i32;
                let frac = (bits & ((1 << $frac) - 1)) as u64;
                if exp_field == 0 {
                    (neg, frac, $min_lsb)
                } else {
                    (neg, frac | (1u64 << $frac), exp_field - 1 + $min_lsb)
                }
            }
            #[inline]
            fn to_bits_u64(self) -> u64 {
                self.to_bits() as u64
            }
            #[inline]
            fn from_u64_nearest(n: u64) -> Self {
                n as $t
            }
            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_float!(
    f64,
    u64,
    Precision::Binary64,
    52,
    -1074,
    971,
    // 2^-960
    1.0261342003245941e-289,
    // 2^995
    6.696928794914171e299,
    134217729.0
);

#[cfg(feature = "binary32")]
impl_float!(
    f32,
    u32,
    Precision::Binary32,
    23,
    -149,
    104,
    // 2^-100
    7.888609e-31,
    // 2^114
    2.0769187e34,
    4097.0
);

/// Builds `±mantissa * 2^exponent`, which must be representable or overflow
/// (overflow yields infinity).
pub fn compose<F: Float>(neg: bool, mantissa: u64, exponent: i32) -> F {
    if mantissa == 0 {
        return if neg { -F::ZERO } else { F::ZERO };
    }
    let p = F::FRACTION_BITS + 1;
    let mut m = mantissa;
    let mut e = exponent;
    let width = 64 - m.leading_zeros();
    if width > p {
        let shift = width - p;
        debug_assert!(m.trailing_zeros() >= shift, "compose: value not representable");
        m >>= shift;
        e += shift as i32;
    } else if width < p {
        let room = (p - width) as i32;
        let shift = room.min(e - F::MIN_LSB_EXP).max(0);
        m <<= shift;
        e -= shift;
    }
    debug_assert!(e >= F::MIN_LSB_EXP, "compose: value below the subnormal range");
    if e > F::MAX_EXP {
        return if neg { -F::INFINITY } else { F::INFINITY };
    }
    // m * 2^e with m < 2^p: scale the exact integer by powers of two, each
    // step exact because the result is representable.
    let mut v = F::from_u64_nearest(m);
    let mut k = e;
    let two = F::ONE + F::ONE;
    let half = F::ONE / two;
    while k > 0 {
        v = v * two;
        k -= 1;
    }
    // Scale down in two phases so intermediate values stay normal until the
    // final subnormal step.
    while k < 0 {
        v = v * half;
        k += 1;
    }
    if neg {
        -v
    } else {
        v
    }
}

fn cmp_magnitude(m1: u128, e1: i32, m2: u128, e2: i32) -> Ordering {
    match (m1 == 0, m2 == 0) {
        (true, true) => return Ordering::Equal,
        (true, false) => return Ordering::Less,
        (false, true) => return Ordering::Greater,
        _ => {}
    }
    let top1 = (128 - m1.leading_zeros()) as i64 + e1 as i64;
    let top2 = (128 - m2.leading_zeros()) as i64 + e2 as i64;
    if top1 != top2 {
        return top1.cmp(&top2);
    }
    if e1 >= e2 {
        (m1 << (e1 - e2)).cmp(&m2)
    } else {
        m1.cmp(&(m2 << (e2 - e1)))
    }
}

/// Exact comparison of `a * b` with `c` for finite operands.
pub fn cmp_product_exact<F: Float>(a: F, b: F, c: F) -> Ordering {
    let (sa, ma, ea) = a.decompose();
    let (sb, mb, eb) = b.decompose();
    let (sc, mc, ec) = c.decompose();
    let mp = ma as u128 * mb as u128;
    let sp = sa != sb;
    let sign = |neg: bool, m: u128| -> i8 {
        if m == 0 {
            0
        } else if neg {
            -1
        } else {
            1
        }
    };
    let (gp, gc) = (sign(sp, mp), sign(sc, mc as u128));
    if gp != gc {
        return gp.cmp(&gc);
    }
    if gp == 0 {
        return Ordering::Equal;
    }
    let mag = cmp_magnitude(mp, ea + eb, mc as u128, ec);
    if gp < 0 {
        mag.reverse()
    } else {
        mag
    }
}

#[inline]
fn sign_of<F: Float>(x: F) -> Ordering {
    if x > F::ZERO {
        Ordering::Greater
    } else if x < F::ZERO {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// Error of the nearest-rounded product `p = fl(x * y)`: `x * y - p`,
/// exact when `|p| >= EXACT_PRODUCT_MIN` and both operands are below
/// `SPLIT_MAX`.
#[inline]
fn product_error<F: Float>(x: F, y: F, p: F) -> F {
    if cfg!(target_feature = "fma") {
        x.fused_mul_add(y, -p)
    } else {
        let split = |a: F| {
            let c = F::SPLITTER * a;
            let hi = c - (c - a);
            (hi, a - hi)
        };
        let (xh, xl) = split(x);
        let (yh, yl) = split(y);
        (((xh * yh - p) + xh * yl) + xl * yh) + xl * yl
    }
}

#[inline]
fn overflow_residual<F: Float>(r: F) -> Ordering {
    // The exact result is finite while the nearest result saturated.
    if r > F::ZERO {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Nearest sum and the sign of `exact - nearest`.
#[inline]
pub fn add_residual<F: Float>(x: F, y: F) -> (F, Ordering) {
    let s = x + y;
    if !s.is_finite() {
        if x.is_finite() && y.is_finite() {
            return (s, overflow_residual(s));
        }
        return (s, Ordering::Equal);
    }
    let bb = s - x;
    let err = (x - (s - bb)) + (y - bb);
    (s, sign_of(err))
}

/// Nearest product and the sign of `exact - nearest`.
#[inline]
pub fn mul_residual<F: Float>(x: F, y: F) -> (F, Ordering) {
    let p = x * y;
    if !p.is_finite() {
        if x.is_finite() && y.is_finite() {
            return (p, overflow_residual(p));
        }
        return (p, Ordering::Equal);
    }
    if x == F::ZERO || y == F::ZERO || !x.is_finite() || !y.is_finite() {
        return (p, Ordering::Equal);
    }
    if p.abs() >= F::EXACT_PRODUCT_MIN && x.abs() < F::SPLIT_MAX && y.abs() < F::SPLIT_MAX {
        (p, sign_of(product_error(x, y, p)))
    } else {
        (p, cmp_product_exact(x, y, p))
    }
}

/// Nearest quotient and the sign of `exact - nearest`.
#[inline]
pub fn div_residual<F: Float>(x: F, y: F) -> (F, Ordering) {
    let q = x / y;
    if q.is_nan() {
        return (q, Ordering::Equal);
    }
    if !q.is_finite() {
        if x.is_finite() && y.is_finite() && y != F::ZERO {
            return (q, overflow_residual(q));
        }
        return (q, Ordering::Equal);
    }
    if x == F::ZERO || !y.is_finite() {
        return (q, Ordering::Equal);
    }
    // sign(x/y - q) = sign(x - q*y) * sign(y)
    let fast = x.abs() >= F::EXACT_PRODUCT_MIN
        && q.abs() >= F::MIN_NORMAL
        && q.abs() < F::SPLIT_MAX
        && y.abs() < F::SPLIT_MAX;
    let remainder = if fast {
        let p = q * y;
        let e = product_error(q, y, p);
        // x - p is exact: p is within a factor of two of x.
        let d = x - p;
        d.partial_cmp(&e).unwrap_or(Ordering::Equal)
    } else {
        cmp_product_exact(q, y, x).reverse()
    };
    if y > F::ZERO {
        (q, remainder)
    } else {
        (q, remainder.reverse())
    }
}

/// A directed-rounding context: a float format plus a rounding mode.
///
/// All interval and kernel code is generic over this trait; the two
/// implementations are [`Strong`] and [`Fallback`].
pub trait Arith: Copy + Default + Debug + Send + Sync + 'static {
    type F: Float;
    const MODE: RoundingMode;

    /// Upward result from the nearest result and the residual sign.
    fn round_up(nearest: Self::F, residual: Ordering) -> Self::F;
    /// Downward result from the nearest result and the residual sign.
    fn round_down(nearest: Self::F, residual: Ordering) -> Self::F;

    #[inline]
    fn add_up(x: Self::F, y: Self::F) -> Self::F {
        let (s, r) = add_residual(x, y);
        Self::round_up(s, r)
    }
    #[inline]
    fn add_down(x: Self::F, y: Self::F) -> Self::F {
        let (s, r) = add_residual(x, y);
        Self::round_down(s, r)
    }
    #[inline]
    fn sub_up(x: Self::F, y: Self::F) -> Self::F {
        Self::add_up(x, -y)
    }
    #[inline]
    fn sub_down(x: Self::F, y: Self::F) -> Self::F {
        Self::add_down(x, -y)
    }
    #[inline]
    fn mul_up(x: Self::F, y: Self::F) -> Self::F {
        let (p, r) = mul_residual(x, y);
        Self::round_up(p, r)
    }
    #[inline]
    fn mul_down(x: Self::F, y: Self::F) -> Self::F {
        let (p, r) = mul_residual(x, y);
        Self::round_down(p, r)
    }
    #[inline]
    fn div_up(x: Self::F, y: Self::F) -> Self::F {
        let (q, r) = div_residual(x, y);
        Self::round_up(q, r)
    }
    #[inline]
    fn div_down(x: Self::F, y: Self::F) -> Self::F {
        let (q, r) = div_residual(x, y);
        Self::round_down(q, r)
    }

    /// Smallest representable number `>= n`.
    fn int_up(n: u64) -> Self::F {
        let (x, r) = int_residual::<Self::F>(n);
        Self::round_up(x, r)
    }
    /// Largest representable number `<= n`.
    fn int_down(n: u64) -> Self::F {
        let (x, r) = int_residual::<Self::F>(n);
        Self::round_down(x, r)
    }
}

fn int_residual<F: Float>(n: u64) -> (F, Ordering) {
    let x = F::from_u64_nearest(n);
    if n < (1u64 << (F::FRACTION_BITS + 1)) {
        return (x, Ordering::Equal);
    }
    let (_, m, e) = x.decompose();
    (x, cmp_magnitude(n as u128, 0, m as u128, e))
}

/// Optimal directed rounding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Strong<F>(PhantomData<F>);

/// Outward one-ulp stepping of inexact nearest results.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Fallback<F>(PhantomData<F>);

impl<F: Float> Arith for Strong<F> {
    type F = F;
    const MODE: RoundingMode = RoundingMode::Strong;

    #[inline]
    fn round_up(nearest: F, residual: Ordering) -> F {
        if residual == Ordering::Greater {
            nearest.next_up()
        } else {
            nearest
        }
    }
    #[inline]
    fn round_down(nearest: F, residual: Ordering) -> F {
        if residual == Ordering::Less {
            nearest.next_down()
        } else {
            nearest
        }
    }
}

impl<F: Float> Arith for Fallback<F> {
    type F = F;
    const MODE: RoundingMode = RoundingMode::Fallback;

    #[inline]
    fn round_up(nearest: F, residual: Ordering) -> F {
        if residual != Ordering::Equal {
            nearest.next_up()
        } else {
            nearest
        }
    }
    #[inline]
    fn round_down(nearest: F, residual: Ordering) -> F {
        if residual != Ordering::Equal {
            nearest.next_down()
        } else {
            nearest
        }
    }
}

/// Outcome classification of a directed operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundFlag {
    Exact,
    RoundedUp,
    RoundedDown,
    Invalid,
}

/// A directed result together with how it relates to the exact value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundResult<F> {
    /// NaN exactly when `flag` is [`RoundFlag::Invalid`].
    pub value: F,
    pub flag: RoundFlag,
}

impl<F: Float> RoundResult<F> {
    pub fn is_invalid(&self) -> bool {
        self.flag == RoundFlag::Invalid
    }

    /// The value, or `None` for the indeterminate forms.
    pub fn get(&self) -> Option<F> {
        (!self.is_invalid()).then_some(self.value)
    }
}

fn classify<F: Float>(value: F, residual: Ordering, stepped: bool, up: bool) -> RoundResult<F> {
    let flag = if value.is_nan() {
        RoundFlag::Invalid
    } else if residual == Ordering::Equal && !stepped {
        RoundFlag::Exact
    } else if up {
        RoundFlag::RoundedUp
    } else {
        RoundFlag::RoundedDown
    };
    RoundResult { value, flag }
}

macro_rules! directed_op {
    ($(#[$doc:meta])* $name:ident, $residual:ident, $neg:expr, $dir:ident, $up:expr) => {
        $(#[$doc])*
        pub fn $name<A: Arith>(x: A::F, y: A::F) -> RoundResult<A::F> {
            let y = if $neg { -y } else { y };
            let (nearest, r) = $residual(x, y);
            let value = A::$dir(nearest, r);
            classify(value, r, value != nearest, $up)
        }
    };
}

directed_op!(
    /// Upward-rounded `x + y`.
    add_up, add_residual, false, round_up, true
);
directed_op!(
    /// Downward-rounded `x + y`.
    add_down, add_residual, false, round_down, false
);
directed_op!(
    /// Upward-rounded `x - y`.
    sub_up, add_residual, true, round_up, true
);
directed_op!(
    /// Downward-rounded `x - y`.
    sub_down, add_residual, true, round_down, false
);
directed_op!(
    /// Upward-rounded `x * y`.
    mul_up, mul_residual, false, round_up, true
);
directed_op!(
    /// Downward-rounded `x * y`.
    mul_down, mul_residual, false, round_down, false
);
directed_op!(
    /// Upward-rounded `x / y`.
    div_up, div_residual, false, round_up, true
);
directed_op!(
    /// Downward-rounded `x / y`.
    div_down, div_residual, false, round_down, false
);

/// The exact rational value of a finite float.
pub fn to_rational<F: Float>(x: F) -> BigRational {
    assert!(x.is_finite(), "to_rational: non-finite value {x:?}");
    let (neg, m, e) = x.decompose();
    let mut num = BigInt::from(m);
    let mut den = BigInt::one();
    if e >= 0 {
        num <<= e as usize;
    } else {
        den <<= (-e) as usize;
    }
    if neg {
        num = -num;
    }
    BigRational::new(num, den)
}

/// The enclosing representable pair `[down(r), up(r)]` of a rational.
/// Both ends coincide exactly when `r` is representable.
pub fn enclose_rational<F: Float>(r: &BigRational) -> (F, F) {
    if r.is_zero() {
        return (F::ZERO, F::ZERO);
    }
    if r.is_negative() {
        let (lo, hi) = enclose_rational::<F>(&-r);
        return (-hi, -lo);
    }
    let num = r.numer().magnitude().clone();
    let den = r.denom().magnitude().clone();
    // floor(log2 r)
    let mut log2 = num.bits() as i64 - den.bits() as i64;
    if shifted_cmp(&num, &den, log2) == Ordering::Less {
        log2 -= 1;
    }
    let p = F::FRACTION_BITS as i64 + 1;
    let q = (log2 - (p - 1)).max(F::MIN_LSB_EXP as i64);
    // m = floor(r / 2^q)
    let (m, exact) = if q <= 0 {
        let (m, rem) = (num << (-q) as usize).div_rem(&den);
        (m, rem.is_zero())
    } else {
        let (m, rem) = num.div_rem(&(den << q as usize));
        (m, rem.is_zero())
    };
    let m: u64 = m.try_into().expect("mantissa fits in 64 bits");
    let q = q.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
    if q > F::MAX_EXP {
        return (F::MAX, F::INFINITY);
    }
    let down: F = compose(false, m, q);
    let down = if down.is_finite() { down } else { F::MAX };
    if exact {
        return (down, down);
    }
    (down, compose(false, m + 1, q))
}

/// Compares `a` with `b * 2^shift`.
fn shifted_cmp(a: &BigUint, b: &BigUint, shift: i64) -> Ordering {
    if shift >= 0 {
        a.cmp(&(b << shift as usize))
    } else {
        (a << (-shift) as usize).cmp(b)
    }
}

/// Converts a rational given as a big integer sign and magnitude pair.
pub fn rational_from_parts(sign: Sign, num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from_biguint(sign, num), BigInt::from_biguint(Sign::Plus, den))
}

const HEX_SEPARATOR: &str = "·2^";

/// Number of hex digits after the point in the canonical form.
pub fn hex_digits<F: Float>() -> usize {
    (F::FRACTION_BITS as usize).div_ceil(4)
}

/// Bit-exact hexadecimal form: `0`, `1`, or `1.<digits>·2^<exp>` (subnormals
/// as `0.<digits>·2^<min normal exp>`).
pub fn format_hex<F: Float>(x: F) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if !x.is_finite() {
        return if x > F::ZERO { "inf" } else { "-inf" }.to_string();
    }
    if x == F::ZERO {
        return "0".to_string();
    }
    let (neg, m, e) = x.decompose();
    let sign = if neg { "-" } else { "" };
    if !neg && x == F::ONE {
        return "1".to_string();
    }
    let fb = F::FRACTION_BITS;
    let digits = hex_digits::<F>();
    let pad = digits as u32 * 4 - fb;
    let frac = (m & ((1u64 << fb) - 1)) << pad;
    let (lead, exp) = if m >> fb != 0 {
        (1, e + fb as i32)
    } else {
        (0, F::MIN_LSB_EXP + fb as i32)
    };
    format!("{sign}{lead}.{frac:0digits$x}{HEX_SEPARATOR}{exp}")
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed hex float at {token:?}: {reason}")]
pub struct HexParseError {
    pub token: String,
    pub reason: &'static str,
}

fn hex_err(token: &str, reason: &'static str) -> HexParseError {
    HexParseError {
        token: token.to_string(),
        reason,
    }
}

/// Inverse of [`format_hex`]. `*` is accepted in place of `·`.
pub fn parse_hex<F: Float>(s: &str) -> Result<F, HexParseError> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let value: F = match body {
        "0" => F::ZERO,
        "1" => F::ONE,
        "inf" => F::INFINITY,
        _ => parse_hex_body(body)?,
    };
    Ok(if neg { -value } else { value })
}

fn parse_hex_body<F: Float>(body: &str) -> Result<F, HexParseError> {
    let (sig, exp) = body
        .split_once("·2^")
        .or_else(|| body.split_once("*2^"))
        .ok_or_else(|| hex_err(body, "expected significand followed by \"·2^\""))?;
    let (lead, frac) = sig
        .split_once('.')
        .ok_or_else(|| hex_err(sig, "significand must contain '.'"))?;
    let digits = hex_digits::<F>();
    if frac.len() != digits {
        return Err(hex_err(frac, "wrong number of hex digits"));
    }
    if !frac.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) {
        return Err(hex_err(frac, "expected lowercase hex digits"));
    }
    let exp: i32 = exp
        .parse()
        .map_err(|_| hex_err(exp, "exponent is not a decimal integer"))?;
    let fb = F::FRACTION_BITS;
    let pad = digits as u32 * 4 - fb;
    let raw = u64::from_str_radix(frac, 16).map_err(|_| hex_err(frac, "invalid hex digits"))?;
    if raw & ((1u64 << pad) - 1) != 0 {
        return Err(hex_err(frac, "trailing bits beyond the format's precision"));
    }
    let f = raw >> pad;
    let min_normal_exp = F::MIN_LSB_EXP + fb as i32;
    let max_normal_exp = F::MAX_EXP + fb as i32;
    match lead {
        "1" => {
            if exp < min_normal_exp || exp > max_normal_exp {
                return Err(hex_err(&exp.to_string(), "exponent out of range"));
            }
            Ok(compose(false, f | (1u64 << fb), exp - fb as i32))
        }
        "0" => {
            if exp != min_normal_exp {
                return Err(hex_err(&exp.to_string(), "subnormal must use the minimal exponent"));
            }
            if f == 0 {
                return Err(hex_err(sig, "zero must be written as \"0\""));
            }
            Ok(compose(false, f, F::MIN_LSB_EXP))
        }
        other => Err(hex_err(other, "leading digit must be 0 or 1")),
    }
}
