//! Exact rational reference values for small instances.
//!
//! Two independent evaluations of the same window event:
//! [`exact_scan_probability`] enumerates every composition of `n` into `d`
//! cells with integer weights, and [`exact_rectangle_dp`] runs the forward
//! recursion over `(partial sum, last l-1 increments)` in rational
//! arithmetic. Neither shares code with the floating-point pipeline.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::kernels::{CellParams, ChainSpec, Family};
use crate::scan::{ScanError, ScanSpec};

/// Reduced fraction with positive denominator.
pub type ExactRational = BigRational;

/// Default cap on `C(n+d-1, d-1)` for enumeration.
pub const DEFAULT_COMPOSITIONS: u128 = 100_000_000;
/// Default cap on live states of the exact recursion.
pub const DEFAULT_STATES: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration needs a budget of {required} compositions (configured: {budget})")]
    CompositionBudget { required: BigUint, budget: u128 },
    #[error("exact recursion needs more than {budget} states (reached {reached} at step {step})")]
    StateBudget {
        budget: usize,
        reached: usize,
        step: usize,
    },
    #[error("the oracle needs exact cell parameters, not bounds")]
    InexactParameters,
    #[error(transparent)]
    Scan(#[from] ScanError),
}

/// Limits beyond which the oracles refuse to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub compositions: u128,
    pub states: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            compositions: DEFAULT_COMPOSITIONS,
            states: DEFAULT_STATES,
        }
    }
}

fn choose(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n + d - 1, d - 1)`, the number of compositions of `n` into `d` cells.
pub fn composition_count(n: u64, d: usize) -> BigUint {
    choose(n + d as u64 - 1, d as u64 - 1)
}

/// Cell weights over a common denominator: `P(x) = w(x) / denom`.
struct Weights {
    /// Multinomial: numerators `c_i` of `p_i = c_i / D`. Hypergeometric:
    /// populations.
    cells: Vec<BigUint>,
    family: Family,
    denom: BigUint,
}

fn weights(chain: &ChainSpec) -> Result<Weights, OracleError> {
    match &chain.cells {
        CellParams::Exact(p) => {
            let mut lcm = BigInt::one();
            for x in p {
                lcm = lcm.lcm(x.denom());
            }
            let cells = p
                .iter()
                .map(|x| {
                    (x.numer() * (&lcm / x.denom()))
                        .to_biguint()
                        .expect("nonnegative probability")
                })
                .collect();
            let d = lcm.to_biguint().expect("positive denominator");
            Ok(Weights {
                cells,
                family: Family::Multinomial,
                denom: num_traits::pow(d, chain.n as usize),
            })
        }
        CellParams::Populations(m) => Ok(Weights {
            cells: m.iter().map(|&x| BigUint::from(x)).collect(),
            family: Family::Hypergeometric,
            denom: choose(m.iter().sum(), chain.n),
        }),
        CellParams::Bounds(_) => Err(OracleError::InexactParameters),
    }
}

struct Enumerator<'a> {
    spec: &'a ScanSpec,
    w: &'a Weights,
    pops: Vec<u64>,
    x: Vec<u64>,
    sum: BigUint,
}

impl Enumerator<'_> {
    /// Weight factor of putting `x` of the `rem` remaining draws in `cell`.
    fn factor(&self, cell: usize, rem: u64, x: u64) -> BigUint {
        match self.w.family {
            Family::Multinomial => choose(rem, x) * num_traits::pow(self.w.cells[cell].clone(), x as usize),
            Family::Hypergeometric => choose(self.pops[cell], x),
        }
    }

    fn window_ok(&self, k: usize) -> bool {
        let ell = self.spec.ell;
        if k + 1 < ell {
            return true;
        }
        let j = k + 1 - ell;
        let s: u64 = self.x[j..=k].iter().sum();
        self.spec.sets[j].contains(s as i64)
    }

    fn dfs(&mut self, k: usize, rem: u64, weight: BigUint) {
        let d = self.spec.chain.d;
        if k + 1 == d {
            self.x[k] = rem;
            if self.window_ok(k) {
                let f = self.factor(k, rem, rem);
                if !f.is_zero() {
                    self.sum += weight * f;
                }
            }
            return;
        }
        for x in 0..=rem {
            self.x[k] = x;
            if !self.window_ok(k) {
                continue;
            }
            let f = self.factor(k, rem, x);
            if f.is_zero() {
                continue;
            }
            self.dfs(k + 1, rem - x, &weight * f);
        }
    }
}

/// Exact `P(all window sums lie in their sets)` by enumerating the support.
pub fn exact_scan_probability(spec: &ScanSpec, budget: &Budget) -> Result<ExactRational, OracleError> {
    let chain = &spec.chain;
    let required = composition_count(chain.n, chain.d);
    if required > BigUint::from(budget.compositions) {
        return Err(OracleError::CompositionBudget {
            required,
            budget: budget.compositions,
        });
    }
    let w = weights(chain)?;
    let pops = match &chain.cells {
        CellParams::Populations(m) => m.clone(),
        _ => Vec::new(),
    };
    let mut e = Enumerator {
        spec,
        w: &w,
        pops,
        x: vec![0; chain.d],
        sum: BigUint::zero(),
    };
    e.dfs(0, chain.n, BigUint::one());
    Ok(BigRational::new(BigInt::from(e.sum), BigInt::from(w.denom.clone())))
}

/// Exact `P(max window sum <= t)` by enumeration.
pub fn exact_scan_cdf(chain: &ChainSpec, ell: usize, t: u64, budget: &Budget) -> Result<ExactRational, OracleError> {
    exact_scan_probability(&ScanSpec::cdf(chain.clone(), ell, t)?, budget)
}

/// Conditional law of the next increment given `rem` draws left.
fn step_law(chain: &ChainSpec, k: usize, rem: u64) -> Vec<BigRational> {
    match &chain.cells {
        CellParams::Exact(p) => {
            let tail: BigRational = p[k..].iter().sum();
            if tail.is_zero() {
                let mut v = vec![BigRational::zero(); rem as usize + 1];
                v[0] = BigRational::one();
                return v;
            }
            let q = &p[k] / &tail;
            let r = BigRational::one() - &q;
            (0..=rem)
                .map(|x| {
                    BigRational::from_integer(BigInt::from(choose(rem, x)))
                        * num_traits::pow(q.clone(), x as usize)
                        * num_traits::pow(r.clone(), (rem - x) as usize)
                })
                .collect()
        }
        CellParams::Populations(m) => {
            let red = m[k];
            let total: u64 = m[k..].iter().sum();
            let all = BigInt::from(choose(total, rem));
            (0..=rem)
                .map(|x| {
                    if all.is_zero() {
                        return BigRational::zero();
                    }
                    let num = choose(red, x) * choose(total - red, rem - x);
                    BigRational::new(BigInt::from(num), all.clone())
                })
                .collect()
        }
        CellParams::Bounds(_) => unreachable!("checked by caller"),
    }
}

/// Exact rectangle probability of the window event by the forward
/// recursion in rational arithmetic.
pub fn exact_rectangle_dp(spec: &ScanSpec, budget: &Budget) -> Result<ExactRational, OracleError> {
    let chain = &spec.chain;
    if matches!(chain.cells, CellParams::Bounds(_)) {
        return Err(OracleError::InexactParameters);
    }
    let ell = spec.ell;
    // (partial sum, last l-1 increments)
    let mut layer: BTreeMap<(u64, Vec<u64>), BigRational> = BTreeMap::new();
    layer.insert((0, Vec::new()), BigRational::one());
    for k in 0..chain.d {
        let mut next: BTreeMap<(u64, Vec<u64>), BigRational> = BTreeMap::new();
        for ((s, recent), mass) in &layer {
            let rem = chain.n - s;
            let law = if k + 1 == chain.d {
                let mut v = vec![BigRational::zero(); rem as usize + 1];
                v[rem as usize] = BigRational::one();
                v
            } else {
                step_law(chain, k, rem)
            };
            for (x, px) in law.into_iter().enumerate() {
                if px.is_zero() {
                    continue;
                }
                let x = x as u64;
                if k + 1 >= ell {
                    let w: u64 = recent.iter().sum::<u64>() + x;
                    if !spec.sets[k + 1 - ell].contains(w as i64) {
                        continue;
                    }
                }
                let mut tail = recent.clone();
                if ell > 1 {
                    tail.push(x);
                    if tail.len() > ell - 1 {
                        tail.remove(0);
                    }
                }
                let contrib = mass * px;
                *next.entry((s + x, tail)).or_insert_with(BigRational::zero) += contrib;
            }
        }
        if next.len() > budget.states {
            return Err(OracleError::StateBudget {
                budget: budget.states,
                reached: next.len(),
                step: k + 1,
            });
        }
        layer = next;
    }
    Ok(layer.into_values().sum())
}

/// Exact `P(max window sum <= t)` by the recursion.
pub fn exact_scan_cdf_dp(chain: &ChainSpec, ell: usize, t: u64, budget: &Budget) -> Result<ExactRational, OracleError> {
    exact_rectangle_dp(&ScanSpec::cdf(chain.clone(), ell, t)?, budget)
}

/// Cell parameters of a fixture line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixtureParams {
    Uniform,
    Probabilities(Vec<BigRational>),
    Populations(Vec<u64>),
}

/// One line of the fixture file: family, n, d, l, t, parameters and the
/// reduced value of `P(max window sum <= t)`, tab-separated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub family: Family,
    pub n: u64,
    pub d: usize,
    pub ell: usize,
    pub t: u64,
    pub params: FixtureParams,
    pub value: BigRational,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("bad fixture line: {0}")]
pub struct FixtureError(pub String);

impl Fixture {
    pub fn chain(&self) -> Result<ChainSpec, OracleError> {
        let chain = match &self.params {
            FixtureParams::Uniform => ChainSpec::multinomial_uniform(self.n, self.d),
            FixtureParams::Probabilities(p) => ChainSpec::multinomial(self.n, p.clone()),
            FixtureParams::Populations(m) => ChainSpec::hypergeometric(self.n, m.clone()),
        };
        Ok(chain.map_err(ScanError::from)?)
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = match &self.params {
            FixtureParams::Uniform => "uniform".to_string(),
            FixtureParams::Probabilities(p) => {
                p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            }
            FixtureParams::Populations(m) => {
                m.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            }
        };
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.family.as_str(),
            self.n,
            self.d,
            self.ell,
            self.t,
            params,
            self.value
        )
    }
}

impl FromStr for Fixture {
    type Err = FixtureError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let bad = || FixtureError(line.to_string());
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 7 {
            return Err(bad());
        }
        let family = match f[0] {
            "multinomial" => Family::Multinomial,
            "hypergeometric" => Family::Hypergeometric,
            _ => return Err(bad()),
        };
        let n = f[1].parse().map_err(|_| bad())?;
        let d = f[2].parse().map_err(|_| bad())?;
        let ell = f[3].parse().map_err(|_| bad())?;
        let t = f[4].parse().map_err(|_| bad())?;
        let params = match (family, f[5]) {
            (Family::Multinomial, "uniform") => FixtureParams::Uniform,
            (Family::Multinomial, s) => FixtureParams::Probabilities(
                s.split(',')
                    .map(|x| x.parse::<BigRational>().map_err(|_| bad()))
                    .collect::<Result<_, _>>()?,
            ),
            (Family::Hypergeometric, s) => FixtureParams::Populations(
                s.split(',')
                    .map(|x| x.parse::<u64>().map_err(|_| bad()))
                    .collect::<Result<_, _>>()?,
            ),
        };
        let value = f[6].parse::<BigRational>().map_err(|_| bad())?;
        Ok(Fixture {
            family,
            n,
            d,
            ell,
            t,
            params,
            value,
        })
    }
}

/// Parses a fixture file, skipping blank lines and `#` comments.
pub fn parse_fixtures(text: &str) -> Result<Vec<Fixture>, FixtureError> {
    text.lines()
        .map(str::trim_end)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::parse)
        .collect()
}

/// `value` as a float for diagnostics.
pub fn approx_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::ConstraintSet;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn two_cells() {
        let chain = ChainSpec::multinomial(2, vec![rat(1, 2), rat(1, 2)]).unwrap();
        let b = Budget::default();
        assert_eq!(exact_scan_cdf(&chain, 1, 1, &b).unwrap(), rat(1, 2));
        assert_eq!(exact_scan_cdf_dp(&chain, 1, 1, &b).unwrap(), rat(1, 2));
        assert_eq!(exact_scan_cdf(&chain, 1, 2, &b).unwrap(), rat(1, 1));
    }

    #[test]
    fn oracles_agree() {
        let b = Budget::default();
        let chains = [
            ChainSpec::multinomial_uniform(7, 4).unwrap(),
            ChainSpec::multinomial(6, vec![rat(1, 6), rat(1, 3), rat(1, 2)]).unwrap(),
            ChainSpec::hypergeometric(4, vec![2, 2, 2]).unwrap(),
            ChainSpec::hypergeometric(5, vec![1, 3, 0, 4]).unwrap(),
        ];
        for chain in &chains {
            for ell in 1..=chain.d {
                let mut prev = BigRational::zero();
                for t in 0..=chain.n {
                    let e = exact_scan_cdf(chain, ell, t, &b).unwrap();
                    let r = exact_scan_cdf_dp(chain, ell, t, &b).unwrap();
                    assert_eq!(e, r, "{chain:?} l={ell} t={t}");
                    assert!(e >= prev);
                    prev = e;
                }
                assert_eq!(prev, BigRational::one());
            }
        }
    }

    #[test]
    fn complementary_events_sum_to_one() {
        let chain = ChainSpec::multinomial_uniform(6, 4).unwrap();
        let b = Budget::default();
        let below = ScanSpec::new(chain.clone(), 2, vec![ConstraintSet::range(0, 2); 3]).unwrap();
        let mut total = exact_scan_probability(&below, &b).unwrap();
        // Partition the complement by the first window that exceeds 2.
        for j in 0..3 {
            let mut sets = vec![ConstraintSet::range(0, 2); 3];
            sets[j] = ConstraintSet::range(3, 6);
            for s in sets.iter_mut().skip(j + 1) {
                *s = ConstraintSet::range(0, 6);
            }
            total += exact_scan_probability(&ScanSpec::new(chain.clone(), 2, sets).unwrap(), &b).unwrap();
        }
        assert_eq!(total, BigRational::one());
    }

    #[test]
    fn hypergeometric_small() {
        let chain = ChainSpec::hypergeometric(4, vec![2, 2, 2]).unwrap();
        let b = Budget::default();
        // Draws of 4 from 6 with every adjacent pair summing to at most 3:
        // the pairs exceed 3 exactly for (2,2,0) and (0,2,2).
        let v = exact_scan_cdf(&chain, 2, 3, &b).unwrap();
        assert_eq!(v, rat(13, 15));
    }

    #[test]
    fn budget_refusal() {
        let chain = ChainSpec::multinomial_uniform(15, 25).unwrap();
        let err = exact_scan_cdf(&chain, 3, 5, &Budget::default()).unwrap_err();
        assert!(matches!(err, OracleError::CompositionBudget { .. }));
        assert!(err.to_string().contains(&composition_count(15, 25).to_string()));
        let tight = Budget {
            compositions: 1,
            states: 3,
        };
        assert!(matches!(
            exact_scan_cdf_dp(&chain, 3, 5, &tight),
            Err(OracleError::StateBudget { .. })
        ));
    }

    #[test]
    fn fixture_round_trip() {
        let line = "hypergeometric\t4\t3\t2\t3\t2,2,2\t13/15";
        let f: Fixture = line.parse().unwrap();
        assert_eq!(f.to_string(), line);
        let g: Fixture = "multinomial\t2\t2\t1\t1\tuniform\t1/2".parse().unwrap();
        assert_eq!(g.params, FixtureParams::Uniform);
        assert!("multinomial\t2".parse::<Fixture>().is_err());
    }
}
