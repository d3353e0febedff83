//! Forward recursion for rectangle probabilities
//! `P(Y_1 in A_1, ..., Y_d in A_d)` of a Markov chain `X_k` with
//! increments `Y_k`, evaluated in directed-rounding interval arithmetic:
//!
//! `p(k, x) = sum over y in A_k of P(X_k = x | X_{k-1} = x - y) p(k-1, x - y)`.
//!
//! Accumulation order is fixed: predecessors in ascending state order and,
//! within a predecessor, increments in ascending order.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

use crate::fpround::Arith;
use crate::interval::{iv_add, iv_clamp_unit, iv_mul, Interval};

/// A finite set of admissible increments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintSet {
    /// Inclusive range `lo..=hi`; empty when `lo > hi`.
    Range(i64, i64),
    /// Sorted, deduplicated values.
    Set(Vec<i64>),
}

impl ConstraintSet {
    pub fn range(lo: i64, hi: i64) -> Self {
        ConstraintSet::Range(lo, hi)
    }

    pub fn from_values(mut v: Vec<i64>) -> Self {
        v.sort_unstable();
        v.dedup();
        ConstraintSet::Set(v)
    }

    pub fn empty() -> Self {
        ConstraintSet::Set(Vec::new())
    }

    pub fn contains(&self, x: i64) -> bool {
        match self {
            ConstraintSet::Range(lo, hi) => *lo <= x && x <= *hi,
            ConstraintSet::Set(v) => v.binary_search(&x).is_ok(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            ConstraintSet::Range(lo, hi) => lo > hi,
            ConstraintSet::Set(v) => v.is_empty(),
        }
    }

    /// Largest member, if any.
    pub fn max(&self) -> Option<i64> {
        match self {
            ConstraintSet::Range(lo, hi) => (lo <= hi).then_some(*hi),
            ConstraintSet::Set(v) => v.last().copied(),
        }
    }

    /// Calls `f` on members of `[lo, hi]` in ascending order.
    #[inline]
    pub fn for_each_between(&self, lo: i64, hi: i64, mut f: impl FnMut(i64)) {
        match self {
            ConstraintSet::Range(a, b) => {
                for x in (*a).max(lo)..=(*b).min(hi) {
                    f(x);
                }
            }
            ConstraintSet::Set(v) => {
                let start = v.partition_point(|&x| x < lo);
                for &x in v[start..].iter().take_while(|&&x| x <= hi) {
                    f(x);
                }
            }
        }
    }
}

/// A discrete Markov model whose rectangle probabilities the engine
/// computes. Steps are 0-based: layer 0 holds `p(1, .)`.
pub trait TransitionModel<A: Arith> {
    type State: Copy + Ord + Hash + Debug;

    /// Number of increments `d`.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Appends the states admitted by `a0` with their probabilities, in
    /// ascending state order.
    fn initial(&self, a0: &ConstraintSet, out: &mut Vec<(Self::State, Interval<A::F>)>);

    /// Appends `(successor, increment)` pairs reachable from `from` at step
    /// `k` with increment in `ak`, in ascending successor order.
    fn successors(
        &self,
        k: usize,
        from: &Self::State,
        ak: &ConstraintSet,
        out: &mut Vec<(Self::State, i64)>,
    );

    /// Certified transition probability at step `k`.
    fn step(&self, k: usize, from: &Self::State, to: &Self::State) -> Interval<A::F>;

    /// Successors together with their transition probabilities, in the
    /// order of [`TransitionModel::successors`].
    fn weighted_successors(
        &self,
        k: usize,
        from: &Self::State,
        ak: &ConstraintSet,
        out: &mut Vec<(Self::State, Interval<A::F>)>,
    ) {
        let mut succ = Vec::new();
        self.successors(k, from, ak, &mut succ);
        out.extend(succ.into_iter().map(|(to, _)| (to, self.step(k, from, &to))));
    }

    /// Size of a dense index space covering every state of step `k`'s
    /// layer, if the model provides one.
    fn dense_capacity(&self, _k: usize) -> Option<usize> {
        None
    }

    /// Order-preserving index into `0..dense_capacity(k)`.
    fn dense_index(&self, _k: usize, _s: &Self::State) -> usize {
        unreachable!("model has no dense index")
    }
}

/// Probabilities `p(k, x)` of one step, sorted by state.
#[derive(Debug, Clone, PartialEq)]
pub struct DPLayer<S, F> {
    pub k: usize,
    pub entries: Vec<(S, Interval<F>)>,
}

impl<S, F> DPLayer<S, F> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Dense buffers above this size fall back to an ordered map.
const DENSE_LIMIT: usize = 1 << 25;

/// Layer 0 from the model's initial distribution restricted to `a0`.
pub fn dp_init<A: Arith, M: TransitionModel<A>>(
    model: &M,
    a0: &ConstraintSet,
) -> DPLayer<M::State, A::F> {
    let mut entries = Vec::new();
    model.initial(a0, &mut entries);
    entries.retain(|(_, p)| !p.is_zero());
    debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
    DPLayer { k: 0, entries }
}

/// Reusable buffers for [`dp_step_with`].
pub struct Scratch<S, F> {
    cells: Vec<Option<(S, Interval<F>)>>,
    touched: Vec<usize>,
    succ: Vec<(S, Interval<F>)>,
    /// Transitions evaluated so far.
    pub transitions: u64,
}

impl<S, F> Default for Scratch<S, F> {
    fn default() -> Self {
        Scratch {
            cells: Vec::new(),
            touched: Vec::new(),
            succ: Vec::new(),
            transitions: 0,
        }
    }
}

/// Layer `layer.k + 1` under the increment constraint `ak`.
pub fn dp_step<A: Arith, M: TransitionModel<A>>(
    model: &M,
    layer: &DPLayer<M::State, A::F>,
    ak: &ConstraintSet,
) -> DPLayer<M::State, A::F> {
    dp_step_with(model, layer, ak, &mut Scratch::default())
}

pub fn dp_step_with<A: Arith, M: TransitionModel<A>>(
    model: &M,
    layer: &DPLayer<M::State, A::F>,
    ak: &ConstraintSet,
    scratch: &mut Scratch<M::State, A::F>,
) -> DPLayer<M::State, A::F> {
    let k = layer.k + 1;
    let succ = &mut scratch.succ;
    let transitions = &mut scratch.transitions;
    let entries = match model.dense_capacity(k) {
        Some(cap) if cap <= DENSE_LIMIT => {
            let cells = &mut scratch.cells;
            if cells.len() < cap {
                cells.resize(cap, None);
            }
            let touched = &mut scratch.touched;
            touched.clear();
            for (from, mass) in &layer.entries {
                succ.clear();
                model.weighted_successors(k, from, ak, succ);
                *transitions += succ.len() as u64;
                for (to, kernel) in succ.iter() {
                    let contrib = iv_mul::<A>(*kernel, *mass);
                    let idx = model.dense_index(k, to);
                    match &mut cells[idx] {
                        Some((_, acc)) => *acc = iv_add::<A>(*acc, contrib),
                        slot @ None => {
                            *slot = Some((*to, contrib));
                            touched.push(idx);
                        }
                    }
                }
            }
            touched.sort_unstable();
            touched
                .iter()
                .filter_map(|&i| cells[i].take())
                .filter(|(_, p)| !p.is_zero())
                .collect()
        }
        _ => {
            let mut cells: BTreeMap<M::State, Interval<A::F>> = BTreeMap::new();
            for (from, mass) in &layer.entries {
                succ.clear();
                model.weighted_successors(k, from, ak, succ);
                *transitions += succ.len() as u64;
                for (to, kernel) in succ.iter() {
                    let contrib = iv_mul::<A>(*kernel, *mass);
                    cells
                        .entry(*to)
                        .and_modify(|acc| *acc = iv_add::<A>(*acc, contrib))
                        .or_insert(contrib);
                }
            }
            cells.into_iter().filter(|(_, p)| !p.is_zero()).collect()
        }
    };
    DPLayer { k, entries }
}

/// Sum of a layer in ascending state order, clamped to `[0, 1]`.
pub fn layer_total<A: Arith, S>(layer: &DPLayer<S, A::F>) -> Interval<A::F> {
    let total = layer
        .entries
        .iter()
        .fold(Interval::ZERO, |acc, (_, p)| iv_add::<A>(acc, *p));
    iv_clamp_unit(total)
}

/// Statistics of a run of the recursion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    pub max_layer: usize,
    pub transitions: u64,
}

/// Certified `P(Y_1 in A_1, ..., Y_d in A_d)`; `sets[k]` constrains the
/// increment of step `k`.
pub fn rectangle_probability<A: Arith, M: TransitionModel<A>>(
    model: &M,
    sets: &[ConstraintSet],
) -> Interval<A::F> {
    rectangle_probability_stats(model, sets).0
}

pub fn rectangle_probability_stats<A: Arith, M: TransitionModel<A>>(
    model: &M,
    sets: &[ConstraintSet],
) -> (Interval<A::F>, RunStats) {
    assert_eq!(sets.len(), model.len(), "one constraint set per step");
    assert!(!sets.is_empty(), "at least one step");
    let mut stats = RunStats::default();
    let mut scratch = Scratch::default();
    let mut layer = dp_init(model, &sets[0]);
    stats.max_layer = layer.len();
    for ak in &sets[1..] {
        if layer.is_empty() {
            break;
        }
        layer = dp_step_with(model, &layer, ak, &mut scratch);
        stats.max_layer = stats.max_layer.max(layer.len());
    }
    stats.transitions = scratch.transitions;
    (layer_total::<A, _>(&layer), stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpround::Strong;

    type S = Strong<f64>;

    /// Walk on integers with fixed increment probabilities.
    struct Walk {
        d: usize,
        probs: Vec<f64>,
        dense: bool,
    }

    impl TransitionModel<S> for Walk {
        type State = i64;
        fn len(&self) -> usize {
            self.d
        }
        fn initial(&self, a0: &ConstraintSet, out: &mut Vec<(i64, Interval<f64>)>) {
            for (y, p) in self.probs.iter().enumerate() {
                if a0.contains(y as i64) {
                    out.push((y as i64, Interval::point(*p)));
                }
            }
        }
        fn successors(&self, _k: usize, from: &i64, ak: &ConstraintSet, out: &mut Vec<(i64, i64)>) {
            ak.for_each_between(0, self.probs.len() as i64 - 1, |y| out.push((from + y, y)));
        }
        fn step(&self, _k: usize, from: &i64, to: &i64) -> Interval<f64> {
            Interval::point(self.probs[(to - from) as usize])
        }
        fn dense_capacity(&self, _k: usize) -> Option<usize> {
            self.dense.then_some(self.d * self.probs.len())
        }
        fn dense_index(&self, _k: usize, s: &i64) -> usize {
            *s as usize
        }
    }

    #[test]
    fn dyadic_walk_is_exact() {
        for dense in [false, true] {
            let m = Walk {
                d: 3,
                probs: vec![0.25, 0.5, 0.25],
                dense,
            };
            let full = vec![ConstraintSet::range(0, 2); 3];
            assert_eq!(rectangle_probability(&m, &full), Interval::ONE);
            let layer = dp_init(&m, &full[0]);
            let next = dp_step(&m, &layer, &ConstraintSet::from_values(vec![1]));
            assert_eq!(next.entries, vec![(1, Interval::point(0.125)), (2, Interval::point(0.25)), (3, Interval::point(0.125))]);
            let sets = vec![ConstraintSet::range(0, 0), ConstraintSet::range(1, 1), ConstraintSet::range(0, 2)];
            assert_eq!(rectangle_probability(&m, &sets), Interval::point(0.125));
        }
    }

    #[test]
    fn empty_first_set_gives_zero() {
        let m = Walk {
            d: 2,
            probs: vec![0.5, 0.5],
            dense: false,
        };
        let sets = vec![ConstraintSet::empty(), ConstraintSet::range(0, 1)];
        assert!(dp_init(&m, &sets[0]).is_empty());
        assert_eq!(rectangle_probability(&m, &sets), Interval::ZERO);
    }

    #[test]
    fn two_predecessors_merge() {
        let m = Walk {
            d: 2,
            probs: vec![0.5, 0.5],
            dense: true,
        };
        let layer = dp_init(&m, &ConstraintSet::range(0, 1));
        let next = dp_step(&m, &layer, &ConstraintSet::range(0, 1));
        assert_eq!(next.entries[1], (1, Interval::point(0.5)));
    }

    #[test]
    fn constraint_set_iteration() {
        let s = ConstraintSet::from_values(vec![5, 1, 3, 3]);
        let mut v = Vec::new();
        s.for_each_between(2, 5, |x| v.push(x));
        assert_eq!(v, vec![3, 5]);
        assert_eq!(s.max(), Some(5));
        assert!(ConstraintSet::range(3, 2).is_empty());
    }
}
