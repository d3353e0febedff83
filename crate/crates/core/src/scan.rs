//! Scan probabilities through the window chain
//! `W_k = (S_k, ..., S_{k+l-1})` of partial sums.
//!
//! Window `j` (1-based) has sum `S_{j+l-1} - S_{j-1}`. The first window is
//! admitted iff `s_l` lies in `A_1`; the transition `v -> w` into window
//! `j` is admitted iff `w_l - v_1` lies in `A_j`. This turns
//! `P(all window sums in their sets)` into a rectangle probability over
//! `d - l + 1` window steps.
//!
//! States are packed as `s_1 * (T+1)^(l-1) + sum of offsets`, where the
//! offsets `s_{i+1} - s_i` are digits in radix `T + 1` and `T` bounds every
//! window sum. The packing is order-preserving, so the code doubles as the
//! engine's dense index.

use std::sync::Arc;

use thiserror::Error;

use crate::engine::{rectangle_probability_stats, ConstraintSet, RunStats, TransitionModel};
use crate::fpround::Arith;
use crate::interval::{iv_complement, iv_mul, Interval};
use crate::kernels::{ChainSpec, KernelError, KernelTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScanError {
    #[error("window length {ell} must satisfy 1 <= l <= d = {d}")]
    WindowLength { ell: usize, d: usize },
    #[error("expected {expected} window constraint sets, got {got}")]
    SetCount { expected: usize, got: usize },
    #[error("window state space (n + 1) * (T + 1)^(l - 1) does not fit in 64 bits")]
    StateSpace,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// A scan problem: a chain, a window length and one increment constraint
/// per window.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub chain: ChainSpec,
    pub ell: usize,
    pub sets: Vec<ConstraintSet>,
}

impl ScanSpec {
    pub fn new(chain: ChainSpec, ell: usize, sets: Vec<ConstraintSet>) -> Result<Self, ScanError> {
        chain.validate()?;
        check_ell(&chain, ell)?;
        let expected = chain.d - ell + 1;
        if sets.len() != expected {
            return Err(ScanError::SetCount {
                expected,
                got: sets.len(),
            });
        }
        Ok(ScanSpec { chain, ell, sets })
    }

    /// All windows constrained to `{0..t}`.
    pub fn cdf(chain: ChainSpec, ell: usize, t: u64) -> Result<Self, ScanError> {
        check_ell(&chain, ell)?;
        let sets = vec![ConstraintSet::range(0, t as i64); chain.d - ell + 1];
        Self::new(chain, ell, sets)
    }

    pub fn windows(&self) -> usize {
        self.chain.d - self.ell + 1
    }

    /// Largest window sum any constraint admits, capped at `n`.
    pub fn max_window_sum(&self) -> u64 {
        max_sum(&self.sets, self.chain.n)
    }
}

fn check_ell(chain: &ChainSpec, ell: usize) -> Result<(), ScanError> {
    if ell == 0 || ell > chain.d {
        return Err(ScanError::WindowLength { ell, d: chain.d });
    }
    Ok(())
}

fn max_sum(sets: &[ConstraintSet], n: u64) -> u64 {
    let m = sets.iter().filter_map(ConstraintSet::max).max().unwrap_or(0);
    (m.max(0) as u64).min(n)
}

/// The window chain as a [`TransitionModel`] over packed window codes.
pub struct WindowModel<A: Arith> {
    table: Arc<KernelTable<A>>,
    n: u64,
    ell: usize,
    windows: usize,
    /// Radix of the offset digits, `T + 1`.
    radix: u64,
    /// `(T+1)^(l-1)`: weight of `s_1`.
    lead: u64,
    /// `(T+1)^(l-2)`: weight of the first offset (1 when `l = 1`).
    first: u64,
}

impl<A: Arith> WindowModel<A> {
    /// Model with window sums bounded by `tmax`; the table must cover
    /// increments up to `tmax`.
    pub fn new(table: Arc<KernelTable<A>>, ell: usize, tmax: u64) -> Result<Self, ScanError> {
        let d = table.d();
        if ell == 0 || ell > d {
            return Err(ScanError::WindowLength { ell, d });
        }
        let n = table.n();
        let tmax = tmax.min(n);
        assert!(tmax as usize <= table.max_inc(), "kernel table too narrow");
        let radix = tmax + 1;
        let lead = radix
            .checked_pow(ell as u32 - 1)
            .filter(|l| l.checked_mul(n + 1).is_some())
            .ok_or(ScanError::StateSpace)?;
        let first = if ell >= 2 { lead / radix } else { 1 };
        Ok(WindowModel {
            table,
            n,
            ell,
            windows: d - ell + 1,
            radix,
            lead,
            first,
        })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Packs a nondecreasing tuple.
    pub fn encode(&self, sums: &[u64]) -> u64 {
        debug_assert_eq!(sums.len(), self.ell);
        let mut code = sums[0];
        for w in sums.windows(2) {
            code = code * self.radix + (w[1] - w[0]);
        }
        code
    }

    /// Unpacks a code into `(s_1, ..., s_l)`.
    pub fn decode(&self, code: u64) -> Vec<u64> {
        let mut s = vec![code / self.lead];
        let mut rest = code % self.lead;
        let mut weight = self.first;
        for _ in 1..self.ell {
            let o = rest / weight;
            rest %= weight;
            weight /= self.radix.max(1);
            let last = *s.last().unwrap();
            s.push(last + o);
        }
        s
    }

    /// `(s_1, s_l)` of a code.
    #[inline]
    fn ends(&self, code: u64) -> (u64, u64) {
        let s1 = code / self.lead;
        let mut rest = code % self.lead;
        let mut sl = s1;
        while rest > 0 {
            sl += rest % self.radix;
            rest /= self.radix;
        }
        (s1, sl)
    }

    /// Code of the successor of `code` whose last sum is `x`, given `s_l`.
    #[inline]
    fn shift(&self, code: u64, s1: u64, sl: u64, x: u64) -> u64 {
        if self.ell == 1 {
            return x;
        }
        let rest = code % self.lead;
        let o1 = rest / self.first;
        let s2 = s1 + o1;
        s2 * self.lead + (rest % self.first) * self.radix + (x - sl)
    }

    fn initial_rec(
        &self,
        a0: &ConstraintSet,
        prefix: &mut Vec<u64>,
        mass: Interval<A::F>,
        out: &mut Vec<(u64, Interval<A::F>)>,
    ) {
        let i = prefix.len();
        let prev = prefix.last().copied().unwrap_or(0);
        let cap = (self.radix - 1).min(self.n);
        if i == self.ell {
            if a0.contains(prev as i64) {
                out.push((self.encode(prefix), mass));
            }
            return;
        }
        let row = self.table.row(i, prev);
        for x in prev..=cap {
            let step = row[(x - prev) as usize];
            let m = if i == 0 { step } else { iv_mul::<A>(mass, step) };
            if m.is_zero() {
                continue;
            }
            prefix.push(x);
            self.initial_rec(a0, prefix, m, out);
            prefix.pop();
        }
    }
}

impl<A: Arith> TransitionModel<A> for WindowModel<A> {
    type State = u64;

    fn len(&self) -> usize {
        self.windows
    }

    fn initial(&self, a0: &ConstraintSet, out: &mut Vec<(u64, Interval<A::F>)>) {
        let mut prefix = Vec::with_capacity(self.ell);
        self.initial_rec(a0, &mut prefix, Interval::ONE, out);
    }

    fn successors(&self, k: usize, from: &u64, ak: &ConstraintSet, out: &mut Vec<(u64, i64)>) {
        let _ = k;
        let (s1, sl) = self.ends(*from);
        ak.for_each_between((sl - s1) as i64, (self.n - s1) as i64, |a| {
            let x = s1 + a as u64;
            out.push((self.shift(*from, s1, sl, x), a));
        });
    }

    fn step(&self, k: usize, from: &u64, to: &u64) -> Interval<A::F> {
        let (_, sl) = self.ends(*from);
        let (_, x) = self.ends(*to);
        self.table.get(k + self.ell - 1, sl, x)
    }

    fn weighted_successors(
        &self,
        k: usize,
        from: &u64,
        ak: &ConstraintSet,
        out: &mut Vec<(u64, Interval<A::F>)>,
    ) {
        let (s1, sl) = self.ends(*from);
        let row = self.table.row(k + self.ell - 1, sl);
        ak.for_each_between((sl - s1) as i64, (self.n - s1) as i64, |a| {
            let x = s1 + a as u64;
            out.push((self.shift(*from, s1, sl, x), row[(x - sl) as usize]));
        });
    }

    fn dense_capacity(&self, _k: usize) -> Option<usize> {
        usize::try_from(self.lead.checked_mul(self.n + 1)?).ok()
    }

    #[inline]
    fn dense_index(&self, _k: usize, s: &u64) -> usize {
        *s as usize
    }
}

/// Window model with its own kernel table.
pub fn build_window_model<A: Arith>(spec: &ScanSpec) -> Result<WindowModel<A>, ScanError> {
    let tmax = spec.max_window_sum();
    let table = Arc::new(KernelTable::<A>::new(&spec.chain, tmax));
    WindowModel::new(table, spec.ell, tmax)
}

/// Certified `P(window sum j in A_j for every j)`.
pub fn scan_probability<A: Arith>(spec: &ScanSpec) -> Result<Interval<A::F>, ScanError> {
    Ok(scan_probability_stats::<A>(spec)?.0)
}

pub fn scan_probability_stats<A: Arith>(
    spec: &ScanSpec,
) -> Result<(Interval<A::F>, RunStats), ScanError> {
    if spec.ell == spec.chain.d {
        // The single window holds all n items.
        let hit = spec.sets[0].contains(spec.chain.n as i64);
        let p = if hit { Interval::ONE } else { Interval::ZERO };
        return Ok((p, RunStats::default()));
    }
    let model = build_window_model::<A>(spec)?;
    Ok(rectangle_probability_stats(&model, &spec.sets))
}

/// Certified `P(max window sum <= t)`.
pub fn scan_cdf<A: Arith>(chain: &ChainSpec, ell: usize, t: u64) -> Result<Interval<A::F>, ScanError> {
    scan_probability::<A>(&ScanSpec::cdf(chain.clone(), ell, t)?)
}

/// Certified `P(max window sum >= t)`, computed as the complement of the
/// distribution function at `t - 1`.
pub fn scan_tail<A: Arith>(chain: &ChainSpec, ell: usize, t: u64) -> Result<Interval<A::F>, ScanError> {
    check_ell(chain, ell)?;
    if t == 0 {
        return Ok(Interval::ONE);
    }
    if t > chain.n {
        return Ok(Interval::ZERO);
    }
    Ok(iv_complement::<A>(scan_cdf::<A>(chain, ell, t - 1)?))
}

/// Distribution-function evaluations for many thresholds sharing one
/// kernel table.
pub struct ScanBatch<A: Arith> {
    chain: ChainSpec,
    ell: usize,
    table: Arc<KernelTable<A>>,
}

impl<A: Arith> ScanBatch<A> {
    /// Batch covering thresholds up to `tmax`.
    pub fn new(chain: &ChainSpec, ell: usize, tmax: u64) -> Result<Self, ScanError> {
        chain.validate()?;
        check_ell(chain, ell)?;
        Ok(ScanBatch {
            chain: chain.clone(),
            ell,
            table: Arc::new(KernelTable::new(chain, tmax)),
        })
    }

    pub fn chain(&self) -> &ChainSpec {
        &self.chain
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn cdf(&self, t: u64) -> Result<Interval<A::F>, ScanError> {
        Ok(self.cdf_stats(t)?.0)
    }

    pub fn cdf_stats(&self, t: u64) -> Result<(Interval<A::F>, RunStats), ScanError> {
        let spec = ScanSpec::cdf(self.chain.clone(), self.ell, t)?;
        if self.ell == self.chain.d {
            return scan_probability_stats::<A>(&spec);
        }
        let t = t.min(self.chain.n);
        assert!(t as usize <= self.table.max_inc(), "threshold {t} exceeds the batch table");
        let model = WindowModel::new(self.table.clone(), self.ell, t)?;
        Ok(rectangle_probability_stats(&model, &spec.sets))
    }

    pub fn tail(&self, t: u64) -> Result<Interval<A::F>, ScanError> {
        if t == 0 {
            return Ok(Interval::ONE);
        }
        if t > self.chain.n {
            return Ok(Interval::ZERO);
        }
        Ok(iv_complement::<A>(self.cdf(t - 1)?))
    }
}
