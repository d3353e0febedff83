use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

use rigscan::engine::ConstraintSet;
use rigscan::kernels::ChainSpec;
use rigscan::oracle::{exact_rectangle_dp, exact_scan_probability, Budget};
use rigscan::scan::{scan_cdf, scan_probability, scan_tail, ScanBatch, ScanSpec};
use rigscan::{Arith, Fallback, Strong};

fn rat(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Multinomial with probabilities proportional to `w` (all weights 0 is
/// replaced by a single unit weight).
fn multinomial(n: u64, w: &[u64]) -> ChainSpec {
    let mut w = w.to_vec();
    if w.iter().all(|&x| x == 0) {
        w[0] = 1;
    }
    let s: u64 = w.iter().sum();
    ChainSpec::multinomial(n, w.iter().map(|&x| rat(x, s)).collect()).unwrap()
}

fn hypergeometric(n: u64, m: &[u64]) -> ChainSpec {
    let mut m = m.to_vec();
    let total: u64 = m.iter().sum();
    if total < n {
        m[0] += n - total;
    }
    ChainSpec::hypergeometric(n, m).unwrap()
}

fn chain_strategy() -> impl Strategy<Value = ChainSpec> {
    let multi = (0u64..9, prop::collection::vec(0u64..5, 2..6)).prop_map(|(n, w)| multinomial(n, &w));
    let hyper = (0u64..9, prop::collection::vec(0u64..5, 2..6)).prop_map(|(n, m)| hypergeometric(n, &m));
    prop_oneof![multi, hyper]
}

fn set_strategy() -> impl Strategy<Value = ConstraintSet> {
    prop_oneof![
        (0i64..6, 0i64..9).prop_map(|(a, b)| ConstraintSet::range(a, a + b)),
        prop::collection::vec(0i64..9, 0..5).prop_map(ConstraintSet::from_values),
    ]
}

fn spec_strategy() -> impl Strategy<Value = ScanSpec> {
    chain_strategy()
        .prop_flat_map(|chain| {
            let d = chain.d;
            (Just(chain), 1..=d)
        })
        .prop_flat_map(|(chain, ell)| {
            let windows = chain.d - ell + 1;
            (Just(chain), Just(ell), prop::collection::vec(set_strategy(), windows))
        })
        .prop_map(|(chain, ell, sets)| ScanSpec::new(chain, ell, sets).unwrap())
}

fn contains_oracle<A: Arith>(spec: &ScanSpec, exact: &BigRational) -> bool {
    scan_probability::<A>(spec).unwrap().contains(exact)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    #[test]
    fn rectangle_intervals_contain_the_exact_value(spec in spec_strategy()) {
        let b = Budget::default();
        let exact = exact_rectangle_dp(&spec, &b).unwrap();
        prop_assert_eq!(&exact, &exact_scan_probability(&spec, &b).unwrap());
        prop_assert!(contains_oracle::<Strong<f64>>(&spec, &exact));
        prop_assert!(contains_oracle::<Fallback<f64>>(&spec, &exact));
    }

    #[test]
    fn cdf_and_tail_bracket_each_other(chain in chain_strategy(), ell_pick in 0usize..8, t in 0u64..10) {
        let ell = 1 + ell_pick % chain.d;
        let b = Budget::default();
        let t = t.min(chain.n + 1);
        let exact = exact_rectangle_dp(&ScanSpec::cdf(chain.clone(), ell, t).unwrap(), &b).unwrap();
        let cdf = scan_cdf::<Strong<f64>>(&chain, ell, t).unwrap();
        prop_assert!(cdf.contains(&exact));
        let tail = scan_tail::<Strong<f64>>(&chain, ell, t + 1).unwrap();
        prop_assert!(tail.contains(&(BigRational::one() - &exact)));
        let next = scan_cdf::<Strong<f64>>(&chain, ell, t + 1).unwrap();
        prop_assert!(cdf.lo() <= next.hi());
    }

    #[test]
    fn batch_matches_single_runs(n in 0u64..12, d in 2usize..6, ell_pick in 0usize..6) {
        let chain = ChainSpec::multinomial_uniform(n, d).unwrap();
        let ell = 1 + ell_pick % d;
        let batch = ScanBatch::<Strong<f64>>::new(&chain, ell, n).unwrap();
        for t in 0..=n {
            prop_assert_eq!(batch.cdf(t).unwrap(), scan_cdf::<Strong<f64>>(&chain, ell, t).unwrap());
        }
    }

    #[test]
    fn bounded_parameters_contain_every_admissible_law(n in 0u64..8, w in prop::collection::vec(1u64..5, 2..5), slack in 1u64..50) {
        let exact_chain = multinomial(n, &w);
        let p = match &exact_chain.cells {
            rigscan::kernels::CellParams::Exact(p) => p.clone(),
            _ => unreachable!(),
        };
        let eps = rat(1, 1000 * slack);
        let zero = BigRational::from_integer(0.into());
        let bounds = p
            .iter()
            .map(|x| {
                let lo = if *x > eps { x - &eps } else { zero.clone() };
                let hi = if x + &eps < BigRational::one() { x + &eps } else { BigRational::one() };
                (lo, hi)
            })
            .collect();
        let chain = ChainSpec::multinomial_bounds(n, bounds).unwrap();
        let ell = 1 + (n as usize % exact_chain.d);
        let t = n / 2;
        let exact = exact_rectangle_dp(&ScanSpec::cdf(exact_chain, ell, t).unwrap(), &Budget::default()).unwrap();
        let iv = scan_cdf::<Strong<f64>>(&chain, ell, t).unwrap();
        prop_assert!(iv.contains(&exact));
    }
}
