//! Binomial and hypergeometric densities as certified intervals, and the
//! one-step transition kernels of the partial-sum chains
//! `S_k = N_1 + ... + N_k` of multinomial and multivariate hypergeometric
//! vectors.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::fpround::{Arith, Float};
use crate::interval::Interval;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("hypergeometric parameters violate {0}")]
    HyperDomain(&'static str),
    #[error("binomial parameters violate {0}")]
    BinomDomain(&'static str),
    #[error("dimension d must be at least 1")]
    EmptyDimension,
    #[error("expected {expected} cell parameters, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("cell probability {index} is outside [0, 1]")]
    ProbabilityRange { index: usize },
    #[error("cell probability bounds {index} are not ordered")]
    BoundsOrder { index: usize },
    #[error("cell probabilities must sum to 1 (sum is {0})")]
    SumNotOne(String),
    #[error("population total {total} is smaller than the sample size {n}")]
    PopulationTooSmall { total: u64, n: u64 },
    #[error("{family} family requires {expected} cell parameters")]
    WrongParameterKind {
        family: &'static str,
        expected: &'static str,
    },
}

/// Parameters of `b_{n,p}(k)` with separate bounds on `p` and `q = 1 - p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomParams<F> {
    pub n: u64,
    pub k: u64,
    pub p_lo: F,
    pub p_hi: F,
    pub q_lo: F,
    pub q_hi: F,
}

impl<F: Float> BinomParams<F> {
    pub fn new(n: u64, k: u64, p: Interval<F>, q: Interval<F>) -> Self {
        BinomParams {
            n,
            k,
            p_lo: p.lo(),
            p_hi: p.hi(),
            q_lo: q.lo(),
            q_hi: q.hi(),
        }
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        if self.k > self.n {
            return Err(KernelError::BinomDomain("0 <= k <= n"));
        }
        let unit = |x: F| x >= F::ZERO && x <= F::ONE;
        if !(unit(self.p_lo) && unit(self.p_hi) && self.p_lo <= self.p_hi) {
            return Err(KernelError::BinomDomain("0 <= p_lo <= p_hi <= 1"));
        }
        if !(unit(self.q_lo) && unit(self.q_hi) && self.q_lo <= self.q_hi) {
            return Err(KernelError::BinomDomain("0 <= q_lo <= q_hi <= 1"));
        }
        Ok(())
    }
}

/// Parameters of `h_{n,r,b}(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HyperParams {
    pub n: u64,
    pub r: u64,
    pub b: u64,
    pub k: u64,
}

impl HyperParams {
    pub fn validate(&self) -> Result<(), KernelError> {
        if self.n < 1 {
            return Err(KernelError::HyperDomain("1 <= n"));
        }
        if self.n > self.r + self.b {
            return Err(KernelError::HyperDomain("n <= r + b"));
        }
        if self.k > self.n || self.k > self.r {
            return Err(KernelError::HyperDomain("k <= min(n, r)"));
        }
        if self.n - self.k > self.b {
            return Err(KernelError::HyperDomain("max(0, n - b) <= k"));
        }
        Ok(())
    }
}

#[inline]
fn dmul<A: Arith, const UP: bool>(x: A::F, y: A::F) -> A::F {
    if UP {
        A::mul_up(x, y)
    } else {
        A::mul_down(x, y)
    }
}

/// Directed `num / den` of two integers.
#[inline]
fn dratio<A: Arith, const UP: bool>(num: u64, den: u64) -> A::F {
    if UP {
        A::div_up(A::int_up(num), A::int_down(den))
    } else {
        A::div_down(A::int_down(num), A::int_up(den))
    }
}

/// Interleaved product for `C(n,k) p^k q^(n-k)`: a coefficient factor is
/// taken while the accumulator is below one, otherwise a `p` or `q` factor.
fn bnp<A: Arith, const UP: bool>(k: u64, n: u64, p: A::F, q: A::F) -> A::F {
    if 2 * k > n {
        return bnp::<A, UP>(n - k, n, q, p);
    }
    let mut f = <A::F as Float>::ONE;
    let (mut j0, mut j1, mut j2) = (0u64, 0u64, 0u64);
    while j0 < k || j1 < k || j2 < n - k {
        let others_left = j1 < k || j2 < n - k;
        if j0 < k && (f < <A::F as Float>::ONE || !others_left) {
            j0 += 1;
            f = dmul::<A, UP>(f, dratio::<A, UP>(n - k + j0, j0));
        } else if j1 < k {
            j1 += 1;
            f = dmul::<A, UP>(f, p);
        } else {
            j2 += 1;
            f = dmul::<A, UP>(f, q);
        }
    }
    f
}

/// Interleaved product for `C(r,k) C(b,n-k) / C(r+b,n)`: numerator factors
/// while the accumulator is below one, otherwise denominator factors.
fn hyp<A: Arith, const UP: bool>(n: u64, r: u64, b: u64, k: u64) -> A::F {
    let mut f = <A::F as Float>::ONE;
    let (mut j0, mut j1, mut j2) = (0u64, 0u64, 0u64);
    while j0 < k || j1 < n - k || j2 < n {
        let numerators_left = j0 < k || j1 < n - k;
        if numerators_left && (f < <A::F as Float>::ONE || j2 >= n) {
            if j0 < k {
                f = dmul::<A, UP>(f, dratio::<A, UP>(r - j0, j0 + 1));
                j0 += 1;
            } else {
                f = dmul::<A, UP>(f, dratio::<A, UP>(b - j1, j1 + 1));
                j1 += 1;
            }
        } else {
            f = dmul::<A, UP>(f, dratio::<A, UP>(j2 + 1, r + b - j2));
            j2 += 1;
        }
    }
    f
}

/// State of one interleaved product evaluated in lockstep with others.
#[derive(Clone, Copy)]
struct Chain<F> {
    f: F,
    j: [u64; 3],
    /// Factor counts `[k, k, n - k]` for bnp, `[k, n - k, n]` for hyp.
    len: [u64; 3],
}

impl<F: Float> Chain<F> {
    fn new(len: [u64; 3]) -> Self {
        Chain {
            f: F::ONE,
            j: [0; 3],
            len,
        }
    }

    #[inline]
    fn done(&self) -> bool {
        self.j[0] >= self.len[0] && self.j[1] >= self.len[1] && self.j[2] >= self.len[2]
    }
}

/// [`bnp`] for every `k` in `0..=kmax`, stepping all products one factor
/// per round. Each product keeps exactly the factor sequence of [`bnp`].
fn bnp_row<A: Arith, const UP: bool>(n: u64, kmax: u64, p: A::F, q: A::F) -> Vec<A::F> {
    let one = <A::F as Float>::ONE;
    let mut chains: Vec<(Chain<A::F>, bool)> = (0..=kmax)
        .map(|k| {
            let swap = 2 * k > n;
            let k = if swap { n - k } else { k };
            (Chain::new([k, k, n - k]), swap)
        })
        .collect();
    loop {
        let mut busy = false;
        for (c, swap) in chains.iter_mut() {
            if c.done() {
                continue;
            }
            busy = true;
            let (pp, qq) = if *swap { (q, p) } else { (p, q) };
            let [k, _, nk] = c.len;
            let others_left = c.j[1] < k || c.j[2] < nk;
            if c.j[0] < k && (c.f < one || !others_left) {
                c.j[0] += 1;
                c.f = dmul::<A, UP>(c.f, dratio::<A, UP>(nk + c.j[0], c.j[0]));
            } else if c.j[1] < k {
                c.j[1] += 1;
                c.f = dmul::<A, UP>(c.f, pp);
            } else {
                c.j[2] += 1;
                c.f = dmul::<A, UP>(c.f, qq);
            }
        }
        if !busy {
            break;
        }
    }
    chains.into_iter().map(|(c, _)| c.f).collect()
}

/// [`hyp`] for every `k` in `ks`, in lockstep.
fn hyp_row<A: Arith, const UP: bool>(n: u64, r: u64, b: u64, ks: &[u64]) -> Vec<A::F> {
    let one = <A::F as Float>::ONE;
    let mut chains: Vec<Chain<A::F>> = ks.iter().map(|&k| Chain::new([k, n - k, n])).collect();
    loop {
        let mut busy = false;
        for c in chains.iter_mut() {
            if c.done() {
                continue;
            }
            busy = true;
            let numerators_left = c.j[0] < c.len[0] || c.j[1] < c.len[1];
            if numerators_left && (c.f < one || c.j[2] >= n) {
                if c.j[0] < c.len[0] {
                    c.f = dmul::<A, UP>(c.f, dratio::<A, UP>(r - c.j[0], c.j[0] + 1));
                    c.j[0] += 1;
                } else {
                    c.f = dmul::<A, UP>(c.f, dratio::<A, UP>(b - c.j[1], c.j[1] + 1));
                    c.j[1] += 1;
                }
            } else {
                c.f = dmul::<A, UP>(c.f, dratio::<A, UP>(c.j[2] + 1, r + b - c.j[2]));
                c.j[2] += 1;
            }
        }
        if !busy {
            break;
        }
    }
    chains.into_iter().map(|c| c.f).collect()
}

/// `kernel_value` for `inc = 0..=max_inc`, bit-identical entry by entry.
pub fn kernel_row<A: Arith>(kernel: &StepKernel<A::F>, rem: u64, max_inc: u64) -> Vec<Interval<A::F>> {
    let one = <A::F as Float>::ONE;
    let mut out = vec![Interval::ZERO; max_inc as usize + 1];
    let top = max_inc.min(rem);
    let clamp = |lo: A::F, hi: A::F| {
        Interval::new(lo, if hi > one { one } else { hi }).expect("ordered density bounds")
    };
    match *kernel {
        StepKernel::Binom { p, q } => {
            let lo = bnp_row::<A, false>(rem, top, p.lo(), q.lo());
            let hi = bnp_row::<A, true>(rem, top, p.hi(), q.hi());
            for (i, (l, h)) in lo.into_iter().zip(hi).enumerate() {
                out[i] = clamp(l, h);
            }
        }
        StepKernel::Hyper { r, b } => {
            if rem == 0 {
                out[0] = Interval::ONE;
                return out;
            }
            if rem > r + b {
                return out;
            }
            if rem == r + b {
                if r <= max_inc {
                    out[r as usize] = Interval::ONE;
                }
                return out;
            }
            let ks: Vec<u64> = (rem.saturating_sub(b)..=top.min(r)).collect();
            let lo = hyp_row::<A, false>(rem, r, b, &ks);
            let hi = hyp_row::<A, true>(rem, r, b, &ks);
            for ((k, l), h) in ks.into_iter().zip(lo).zip(hi) {
                out[k as usize] = clamp(l, h);
            }
        }
    }
    out
}

/// Certified `b_{n,p}(k)`: the product runs once downward on `(p_lo, q_lo)`
/// and once upward on `(p_hi, q_hi)`; the upper end is clamped to one.
pub fn binom_density<A: Arith>(params: &BinomParams<A::F>) -> Interval<A::F> {
    debug_assert!(params.validate().is_ok(), "{params:?}");
    let lo = bnp::<A, false>(params.k, params.n, params.p_lo, params.q_lo);
    let hi = bnp::<A, true>(params.k, params.n, params.p_hi, params.q_hi);
    let one = <A::F as Float>::ONE;
    Interval::new(lo, if hi > one { one } else { hi }).expect("binomial bounds ordered")
}

/// Certified `h_{n,r,b}(k)`.
pub fn hyper_density<A: Arith>(params: &HyperParams) -> Result<Interval<A::F>, KernelError> {
    params.validate()?;
    let HyperParams { n, r, b, k } = *params;
    if n == r + b {
        return Ok(Interval::ONE);
    }
    let lo = hyp::<A, false>(n, r, b, k);
    let hi = hyp::<A, true>(n, r, b, k);
    let one = <A::F as Float>::ONE;
    Ok(Interval::new(lo, if hi > one { one } else { hi }).expect("hypergeometric bounds ordered"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Multinomial,
    Hypergeometric,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Multinomial => "multinomial",
            Family::Hypergeometric => "hypergeometric",
        }
    }
}

/// Cell parameters of a chain.
#[derive(Debug, Clone, PartialEq)]
pub enum CellParams {
    /// Exact multinomial cell probabilities.
    Exact(Vec<BigRational>),
    /// Multinomial cell probabilities known only through exact bounds.
    Bounds(Vec<(BigRational, BigRational)>),
    /// Hypergeometric cell populations `m_1..m_d`.
    Populations(Vec<u64>),
}

/// A multinomial or multivariate hypergeometric vector of dimension `d`
/// with total count `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub family: Family,
    pub n: u64,
    pub d: usize,
    pub cells: CellParams,
}

impl ChainSpec {
    /// Multinomial with `p = (1/d, ..., 1/d)` held exactly.
    pub fn multinomial_uniform(n: u64, d: usize) -> Result<Self, KernelError> {
        if d == 0 {
            return Err(KernelError::EmptyDimension);
        }
        let p = BigRational::new(BigInt::one(), BigInt::from(d));
        Self::multinomial(n, vec![p; d])
    }

    pub fn multinomial(n: u64, p: Vec<BigRational>) -> Result<Self, KernelError> {
        let spec = ChainSpec {
            family: Family::Multinomial,
            n,
            d: p.len(),
            cells: CellParams::Exact(p),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn multinomial_bounds(
        n: u64,
        bounds: Vec<(BigRational, BigRational)>,
    ) -> Result<Self, KernelError> {
        let spec = ChainSpec {
            family: Family::Multinomial,
            n,
            d: bounds.len(),
            cells: CellParams::Bounds(bounds),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn hypergeometric(n: u64, m: Vec<u64>) -> Result<Self, KernelError> {
        let spec = ChainSpec {
            family: Family::Hypergeometric,
            n,
            d: m.len(),
            cells: CellParams::Populations(m),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        if self.d == 0 {
            return Err(KernelError::EmptyDimension);
        }
        let len = match &self.cells {
            CellParams::Exact(v) => v.len(),
            CellParams::Bounds(v) => v.len(),
            CellParams::Populations(v) => v.len(),
        };
        if len != self.d {
            return Err(KernelError::LengthMismatch {
                expected: self.d,
                got: len,
            });
        }
        let zero = BigRational::zero();
        let one = BigRational::one();
        let unit = |x: &BigRational| *x >= zero && *x <= one;
        match (&self.cells, self.family) {
            (CellParams::Exact(p), Family::Multinomial) => {
                if let Some(i) = p.iter().position(|x| !unit(x)) {
                    return Err(KernelError::ProbabilityRange { index: i });
                }
                let sum: BigRational = p.iter().sum();
                if sum != one {
                    return Err(KernelError::SumNotOne(sum.to_string()));
                }
            }
            (CellParams::Bounds(b), Family::Multinomial) => {
                for (i, (lo, hi)) in b.iter().enumerate() {
                    if !unit(lo) || !unit(hi) {
                        return Err(KernelError::ProbabilityRange { index: i });
                    }
                    if lo > hi {
                        return Err(KernelError::BoundsOrder { index: i });
                    }
                }
                let lo: BigRational = b.iter().map(|x| &x.0).sum();
                let hi: BigRational = b.iter().map(|x| &x.1).sum();
                if lo > one || hi < one {
                    return Err(KernelError::SumNotOne(format!("[{lo}, {hi}]")));
                }
            }
            (CellParams::Populations(m), Family::Hypergeometric) => {
                let total: u64 = m.iter().sum();
                if total < self.n {
                    return Err(KernelError::PopulationTooSmall { total, n: self.n });
                }
            }
            (_, Family::Multinomial) => {
                return Err(KernelError::WrongParameterKind {
                    family: "multinomial",
                    expected: "probability",
                })
            }
            (_, Family::Hypergeometric) => {
                return Err(KernelError::WrongParameterKind {
                    family: "hypergeometric",
                    expected: "population",
                })
            }
        }
        Ok(())
    }
}

/// The law of the increment `N_{k+1}` given the remaining count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepKernel<F> {
    /// Binomial with conditional success ratio `p` and its complement `q`.
    Binom { p: Interval<F>, q: Interval<F> },
    /// Hypergeometric with `r` red and `b` remaining blue items.
    Hyper { r: u64, b: u64 },
}

fn ratio_enclosure<F: Float>(num: &BigRational, den: &BigRational) -> Interval<F> {
    if den.is_zero() {
        return Interval::ZERO;
    }
    Interval::enclose(&(num / den))
}

/// Per-step kernels of the partial-sum chain, indexed by the 0-based cell.
pub fn step_kernels<A: Arith>(spec: &ChainSpec) -> Vec<StepKernel<A::F>> {
    let d = spec.d;
    match &spec.cells {
        CellParams::Exact(p) => {
            let mut tails = vec![BigRational::zero(); d + 1];
            for i in (0..d).rev() {
                tails[i] = &tails[i + 1] + &p[i];
            }
            (0..d)
                .map(|k| {
                    if tails[k].is_zero() {
                        StepKernel::Binom {
                            p: Interval::ZERO,
                            q: Interval::ONE,
                        }
                    } else if k + 1 == d {
                        StepKernel::Binom {
                            p: Interval::ONE,
                            q: Interval::ZERO,
                        }
                    } else {
                        StepKernel::Binom {
                            p: ratio_enclosure(&p[k], &tails[k]),
                            q: ratio_enclosure(&tails[k + 1], &tails[k]),
                        }
                    }
                })
                .collect()
        }
        CellParams::Bounds(b) => {
            let bounds: Vec<Interval<A::F>> = b
                .iter()
                .map(|(lo, hi)| {
                    let lo = Interval::<A::F>::enclose(lo).lo();
                    let hi = Interval::<A::F>::enclose(hi).hi();
                    Interval::new(lo, hi).expect("ordered bounds")
                })
                .collect();
            let zero = <A::F as Float>::ZERO;
            let one = <A::F as Float>::ONE;
            let mut tail_lo = vec![zero; d + 1];
            let mut tail_hi = vec![zero; d + 1];
            for i in (0..d).rev() {
                tail_lo[i] = A::add_down(tail_lo[i + 1], bounds[i].lo());
                tail_hi[i] = A::add_up(tail_hi[i + 1], bounds[i].hi());
            }
            let ratio = |num_lo: A::F, num_hi: A::F, den_lo: A::F, den_hi: A::F| {
                let lo = A::div_down(num_lo, den_hi);
                let hi = if den_lo == zero {
                    one
                } else {
                    let h = A::div_up(num_hi, den_lo);
                    if h > one {
                        one
                    } else {
                        h
                    }
                };
                Interval::new(if lo > hi { hi } else { lo }, hi).expect("ratio bounds")
            };
            (0..d)
                .map(|k| {
                    if k + 1 == d {
                        StepKernel::Binom {
                            p: Interval::ONE,
                            q: Interval::ZERO,
                        }
                    } else if tail_hi[k] == zero {
                        StepKernel::Binom {
                            p: Interval::ZERO,
                            q: Interval::ONE,
                        }
                    } else {
                        StepKernel::Binom {
                            p: ratio(bounds[k].lo(), bounds[k].hi(), tail_lo[k], tail_hi[k]),
                            q: ratio(tail_lo[k + 1], tail_hi[k + 1], tail_lo[k], tail_hi[k]),
                        }
                    }
                })
                .collect()
        }
        CellParams::Populations(m) => {
            let mut rest = 0u64;
            let mut out = vec![StepKernel::Hyper { r: 0, b: 0 }; d];
            for k in (0..d).rev() {
                out[k] = StepKernel::Hyper { r: m[k], b: rest };
                rest += m[k];
            }
            out
        }
    }
}

/// Certified `P(N_{k+1} = inc | remaining count = rem)`.
pub fn kernel_value<A: Arith>(kernel: &StepKernel<A::F>, rem: u64, inc: u64) -> Interval<A::F> {
    if inc > rem {
        return Interval::ZERO;
    }
    match *kernel {
        StepKernel::Binom { p, q } => binom_density::<A>(&BinomParams::new(rem, inc, p, q)),
        StepKernel::Hyper { r, b } => {
            if rem == 0 {
                return Interval::ONE;
            }
            let params = HyperParams { n: rem, r, b, k: inc };
            hyper_density::<A>(&params).unwrap_or(Interval::ZERO)
        }
    }
}

/// Certified `P(S_{k+1} = x | S_k = y)` for the 0-based step `k`.
/// Impossible transitions give `[0, 0]`.
pub fn transition<A: Arith>(spec: &ChainSpec, k: usize, y: u64, x: u64) -> Interval<A::F> {
    assert!(k < spec.d, "step {k} out of range for d = {}", spec.d);
    if x < y || x > spec.n {
        return Interval::ZERO;
    }
    let kernel = step_kernels::<A>(spec)[k];
    kernel_value::<A>(&kernel, spec.n - y, x - y)
}

/// Lazily filled table of kernel values `K_k(y -> y + inc)` for
/// `inc <= max_inc`, shared across thresholds.
pub struct KernelTable<A: Arith> {
    n: u64,
    d: usize,
    max_inc: usize,
    steps: Vec<StepKernel<A::F>>,
    rows: Vec<OnceLock<Box<[Interval<A::F>]>>>,
}

impl<A: Arith> KernelTable<A> {
    pub fn new(spec: &ChainSpec, max_inc: u64) -> Self {
        let max_inc = max_inc.min(spec.n) as usize;
        let rows = (0..spec.d * (spec.n as usize + 1))
            .map(|_| OnceLock::new())
            .collect();
        KernelTable {
            n: spec.n,
            d: spec.d,
            max_inc,
            steps: step_kernels::<A>(spec),
            rows,
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_inc(&self) -> usize {
        self.max_inc
    }

    /// Values for `inc = 0..=max_inc` from `y` at step `k`.
    pub fn row(&self, k: usize, y: u64) -> &[Interval<A::F>] {
        let idx = k * (self.n as usize + 1) + y as usize;
        self.rows[idx]
            .get_or_init(|| kernel_row::<A>(&self.steps[k], self.n - y, self.max_inc as u64).into())
    }

    #[inline]
    pub fn get(&self, k: usize, y: u64, x: u64) -> Interval<A::F> {
        debug_assert!(x >= y && (x - y) as usize <= self.max_inc);
        self.row(k, y)[(x - y) as usize]
    }
}

/// Exact rational `b_{n,p}(k)`.
pub fn binom_exact(n: u64, k: u64, p: &BigRational) -> BigRational {
    if k > n {
        return BigRational::zero();
    }
    let q = BigRational::one() - p;
    let c = BigRational::from_integer(binomial(n, k));
    c * pow(p, k) * pow(&q, n - k)
}

/// Exact rational `h_{n,r,b}(k)`.
pub fn hyper_exact(n: u64, r: u64, b: u64, k: u64) -> BigRational {
    if k > n || k > r || n - k > b {
        return BigRational::zero();
    }
    BigRational::new(binomial(r, k) * binomial(b, n - k), binomial(r + b, n))
}

pub(crate) fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

fn pow(x: &BigRational, e: u64) -> BigRational {
    num_traits::pow(x.clone(), e as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpround::{Fallback, Strong};
    use crate::interval::iv_add;

    type S = Strong<f64>;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn binomial_trivial_cases() {
        let half = Interval::point(0.5);
        let b = binom_density::<S>(&BinomParams::new(2, 1, half, half));
        assert_eq!(b, Interval::point(0.5));
        let b = binom_density::<S>(&BinomParams::new(3, 0, Interval::ZERO, Interval::ONE));
        assert_eq!(b, Interval::ONE);
        let b = binom_density::<S>(&BinomParams::new(3, 3, Interval::ONE, Interval::ZERO));
        assert_eq!(b, Interval::ONE);
        let b = binom_density::<S>(&BinomParams::new(3, 2, Interval::ONE, Interval::ZERO));
        assert_eq!(b, Interval::ZERO);
    }

    #[test]
    fn binomial_500_2_encloses_rational() {
        let p = rat(1, 365);
        let q = rat(364, 365);
        let b = binom_density::<S>(&BinomParams::new(
            500,
            2,
            Interval::enclose(&p),
            Interval::enclose(&q),
        ));
        assert!(b.contains(&binom_exact(500, 2, &p)));
    }

    #[test]
    fn hyper_examples() {
        let h = hyper_density::<S>(&HyperParams { n: 1, r: 3, b: 7, k: 1 }).unwrap();
        assert!(h.contains(&rat(3, 10)));
        assert!(h.hi() <= h.lo().next_up().next_up());
        let h = hyper_density::<S>(&HyperParams { n: 10, r: 3, b: 7, k: 3 }).unwrap();
        assert_eq!(h, Interval::ONE);
        let h = hyper_density::<S>(&HyperParams { n: 2, r: 2, b: 2, k: 1 }).unwrap();
        assert!(h.contains(&rat(2, 3)));
        let h = hyper_density::<S>(&HyperParams { n: 2, r: 2, b: 0, k: 2 }).unwrap();
        assert_eq!(h, Interval::ONE);
    }

    #[test]
    fn hyper_domain_errors() {
        let e = hyper_density::<S>(&HyperParams { n: 5, r: 1, b: 1, k: 1 }).unwrap_err();
        assert_eq!(e, KernelError::HyperDomain("n <= r + b"));
        let e = hyper_density::<S>(&HyperParams { n: 2, r: 1, b: 5, k: 2 }).unwrap_err();
        assert_eq!(e, KernelError::HyperDomain("k <= min(n, r)"));
        let e = hyper_density::<S>(&HyperParams { n: 0, r: 1, b: 5, k: 0 }).unwrap_err();
        assert_eq!(e, KernelError::HyperDomain("1 <= n"));
    }

    #[test]
    fn exhaustive_binomial_containment() {
        for n in 0..=60u64 {
            for (pn, pd) in [(1, 2), (1, 3), (2, 7), (1, 365), (5, 6)] {
                let p = rat(pn, pd);
                let q = rat(pd - pn, pd);
                let (pi, qi) = (Interval::<f64>::enclose(&p), Interval::<f64>::enclose(&q));
                for k in 0..=n {
                    let exact = binom_exact(n, k, &p);
                    let s = binom_density::<S>(&BinomParams::new(n, k, pi, qi));
                    let w = binom_density::<Fallback<f64>>(&BinomParams::new(n, k, pi, qi));
                    assert!(s.contains(&exact), "n={n} k={k} p={p}");
                    assert!(w.contains(&exact), "n={n} k={k} p={p}");
                    let sym = binom_density::<S>(&BinomParams::new(n, n - k, qi, pi));
                    assert!(sym.intersects(&s));
                }
            }
        }
    }

    #[test]
    fn exhaustive_hyper_containment_and_normalization() {
        for r in 0..=12u64 {
            for b in 0..=12u64 {
                for n in 1..=(r + b) {
                    let mut sum = Interval::ZERO;
                    for k in n.saturating_sub(b)..=n.min(r) {
                        let h = hyper_density::<S>(&HyperParams { n, r, b, k }).unwrap();
                        assert!(h.contains(&hyper_exact(n, r, b, k)), "{n} {r} {b} {k}");
                        sum = iv_add::<S>(sum, h);
                    }
                    assert!(sum.lo() <= 1.0 && sum.hi() >= 1.0);
                }
            }
        }
    }

    #[test]
    fn binomial_normalization_and_no_overflow() {
        let p = Interval::<f64>::enclose(&rat(1, 365));
        let q = Interval::<f64>::enclose(&rat(364, 365));
        for n in [1u64, 10, 500, 5000] {
            let mut sum = Interval::ZERO;
            for k in 0..=n {
                let b = binom_density::<S>(&BinomParams::new(n, k, p, q));
                assert!(b.hi().is_finite());
                sum = iv_add::<S>(sum, b);
            }
            assert!(sum.lo() <= 1.0 && sum.hi() >= 1.0, "n={n}");
        }
    }

    #[test]
    fn rows_match_single_evaluations() {
        let kernels = [
            StepKernel::Binom {
                p: Interval::enclose(&rat(1, 7)),
                q: Interval::enclose(&rat(6, 7)),
            },
            StepKernel::Binom {
                p: Interval::enclose(&rat(5, 7)),
                q: Interval::enclose(&rat(2, 7)),
            },
            StepKernel::Binom {
                p: Interval::ONE,
                q: Interval::ZERO,
            },
            StepKernel::Hyper { r: 4, b: 9 },
            StepKernel::Hyper { r: 10, b: 0 },
            StepKernel::Hyper { r: 0, b: 10 },
        ];
        for kernel in &kernels {
            for rem in 0..=14u64 {
                for max_inc in [0u64, 3, 9, 20] {
                    let row = kernel_row::<S>(kernel, rem, max_inc);
                    for inc in 0..=max_inc {
                        assert_eq!(row[inc as usize], kernel_value::<S>(kernel, rem, inc), "{kernel:?} {rem} {inc}");
                    }
                    let roww = kernel_row::<Fallback<f64>>(kernel, rem, max_inc);
                    for inc in 0..=max_inc {
                        assert_eq!(roww[inc as usize], kernel_value::<Fallback<f64>>(kernel, rem, inc));
                    }
                }
            }
        }
    }

    #[test]
    fn transitions() {
        let spec = ChainSpec::multinomial_uniform(1, 2).unwrap();
        assert!(transition::<S>(&spec, 0, 0, 1).contains(&rat(1, 2)));
        let spec = ChainSpec::multinomial_uniform(5, 3).unwrap();
        assert_eq!(transition::<S>(&spec, 2, 2, 5), Interval::ONE);
        assert_eq!(transition::<S>(&spec, 2, 2, 4), Interval::ZERO);
        assert_eq!(transition::<S>(&spec, 1, 3, 2), Interval::ZERO);
        let spec = ChainSpec::hypergeometric(500, vec![10; 365]).unwrap();
        let mut sum = Interval::ZERO;
        for x in 0..=10 {
            sum = iv_add::<S>(sum, transition::<S>(&spec, 0, 0, x));
        }
        assert!(sum.lo() <= 1.0 && sum.hi() >= 1.0);
        assert_eq!(transition::<S>(&spec, 0, 0, 11), Interval::ZERO);
    }

    #[test]
    fn bounds_parameters_enclose_exact() {
        let p = vec![rat(1, 3), rat(1, 6), rat(1, 2)];
        let bounds: Vec<_> = p
            .iter()
            .map(|x| {
                let iv = Interval::<f64>::enclose(x);
                (iv.lo_rational(), iv.hi_rational())
            })
            .collect();
        let exact = ChainSpec::multinomial(6, p.clone()).unwrap();
        let loose = ChainSpec::multinomial_bounds(6, bounds).unwrap();
        for y in 0..=6u64 {
            for x in y..=6 {
                let e = transition::<S>(&exact, 0, y, x);
                let l = transition::<S>(&loose, 0, y, x);
                assert!(l.lo() <= e.lo() && e.hi() <= l.hi());
                let r = binom_exact(6 - y, x - y, &p[0]);
                assert!(l.contains(&r));
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(ChainSpec::multinomial(3, vec![rat(1, 2), rat(1, 3)]).is_err());
        assert!(ChainSpec::hypergeometric(10, vec![2, 3]).is_err());
        assert_eq!(
            ChainSpec::multinomial_uniform(3, 0).unwrap_err(),
            KernelError::EmptyDimension
        );
    }
}
