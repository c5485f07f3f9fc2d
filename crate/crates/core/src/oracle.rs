//! Exact enumeration of the pivotal sampling process for tiny populations.
//!
//! Every source of randomness of a run is expanded into explicit branches
//! with exact rational weights: the uniform unit draw, the uniform choice
//! among equidistant nearest neighbours and the two-way pivotal branch. The
//! branch structure follows the randomness contract documented in
//! [`crate::pivotal`], so the result is the exact distribution of the sampler
//! output. For LPM1 the redraw loop is expanded as conditioning on a mutual
//! pair; the sampler's deterministic fallback after `10 N` misses is not
//! modelled.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::distance::Distance;
use crate::error::{Error, Result};
use crate::pivotal::{snap, InclusionProbabilities, Variant};
use crate::points::Points;

/// Largest population accepted by [`enumerate`].
pub const MAX_UNITS: usize = 8;

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub first_order: Vec<f64>,
    pub second_order: Vec<Vec<f64>>,
    /// Probability of each possible sample, keyed by its sorted unit indices.
    pub sample_distribution: BTreeMap<Vec<usize>, f64>,
    #[serde(skip)]
    pub exact: BTreeMap<Vec<usize>, BigRational>,
}

impl OracleResult {
    pub fn probability_of(&self, sample: &[usize]) -> f64 {
        self.sample_distribution.get(sample).copied().unwrap_or(0.0)
    }

    pub fn total_probability(&self) -> BigRational {
        self.exact
            .values()
            .fold(BigRational::zero(), |acc, p| acc + p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("oracle result serializes")
    }
}

/// Converts `x` to the simplest rational that maps back to the same `f64`,
/// falling back to its exact binary value.
pub fn to_rational(x: f64) -> BigRational {
    if let Some(r) = Ratio::<i64>::approximate_float(x) {
        if (*r.numer() as f64 / *r.denom() as f64) == x {
            return BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
        }
    }
    BigRational::from_float(x).expect("finite probability")
}

/// Exact distribution of the sample produced by `variant`.
pub fn enumerate(
    probs: &InclusionProbabilities,
    coords: &Points,
    distance: &Distance,
    variant: Variant,
) -> Result<OracleResult> {
    let n = probs.len();
    if n > MAX_UNITS {
        return Err(Error::PopulationTooLarge {
            size: n,
            cap: MAX_UNITS,
        });
    }
    if n != coords.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities for {} coordinate rows",
            n,
            coords.len()
        )));
    }
    let mut reduced = vec![vec![0.0; n]; n];
    for (i, row) in reduced.iter_mut().enumerate() {
        for (j, d) in row.iter_mut().enumerate() {
            *d = distance.reduced(coords.row(i), coords.row(j));
        }
    }
    let start: Vec<BigRational> = probs
        .values()
        .iter()
        .map(|&p| to_rational(snap(p)))
        .collect();
    let mut walker = Walker {
        reduced,
        variant,
        memo: HashMap::new(),
    };
    let dist = walker.walk(&start);

    let mut first = vec![BigRational::zero(); n];
    let mut second = vec![vec![BigRational::zero(); n]; n];
    let mut exact = BTreeMap::new();
    for (mask, p) in dist {
        let units: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        for &i in &units {
            first[i] += &p;
            for &j in &units {
                second[i][j] += &p;
            }
        }
        exact.insert(units, p);
    }
    let to_f = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
    Ok(OracleResult {
        first_order: first.iter().map(to_f).collect(),
        second_order: second
            .iter()
            .map(|r| r.iter().map(to_f).collect())
            .collect(),
        sample_distribution: exact.iter().map(|(k, v)| (k.clone(), to_f(v))).collect(),
        exact,
    })
}

type Distribution = BTreeMap<u32, BigRational>;

struct Walker {
    reduced: Vec<Vec<f64>>,
    variant: Variant,
    memo: HashMap<Vec<BigRational>, Distribution>,
}

impl Walker {
    fn ties(&self, i: usize, undecided: &[usize]) -> Vec<usize> {
        let mut best = f64::INFINITY;
        let mut out = Vec::new();
        for &j in undecided {
            if j == i {
                continue;
            }
            let d = self.reduced[i][j];
            if d < best {
                best = d;
                out.clear();
                out.push(j);
            } else if d == best {
                out.push(j);
            }
        }
        out
    }

    fn walk(&mut self, state: &[BigRational]) -> Distribution {
        if let Some(hit) = self.memo.get(state) {
            return hit.clone();
        }
        let one = BigRational::one();
        let undecided: Vec<usize> = (0..state.len())
            .filter(|&i| !state[i].is_zero() && state[i] != one)
            .collect();
        let base: u32 = (0..state.len())
            .filter(|&i| state[i] == one)
            .fold(0, |m, i| m | (1 << i));

        let mut out = Distribution::new();
        if undecided.len() < 2 {
            match undecided.first() {
                None => {
                    out.insert(base, one);
                }
                Some(&i) => {
                    add(&mut out, base | (1 << i), state[i].clone());
                    add(&mut out, base, &one - &state[i]);
                }
            }
            self.memo.insert(state.to_vec(), out.clone());
            return out;
        }

        // (i, j, weight) for every way the next pivotal pair can be chosen
        let k = BigRational::from_integer(BigInt::from(undecided.len()));
        let mut pairs = Vec::new();
        for &i in &undecided {
            let ties = self.ties(i, &undecided);
            let t = BigRational::from_integer(BigInt::from(ties.len()));
            for &j in &ties {
                if self.variant == Variant::Lpm1 && !self.ties(j, &undecided).contains(&i) {
                    continue;
                }
                pairs.push((i, j, (&one / &k) / &t));
            }
        }
        if self.variant == Variant::Lpm1 {
            let total = pairs.iter().fold(BigRational::zero(), |acc, p| acc + &p.2);
            for p in pairs.iter_mut() {
                p.2 = &p.2 / &total;
            }
        }

        for (i, j, w) in pairs {
            let (pi, pj) = (&state[i], &state[j]);
            let s = pi + pj;
            let (first, a1, b1, a2, b2) = if s < one {
                (
                    pj / &s,
                    BigRational::zero(),
                    s.clone(),
                    s.clone(),
                    BigRational::zero(),
                )
            } else {
                let two = &one + &one;
                (
                    (&one - pj) / (&two - &s),
                    one.clone(),
                    &s - &one,
                    &s - &one,
                    one.clone(),
                )
            };
            let second = &one - &first;
            for (branch_p, a, b) in [(first, a1, b1), (second, a2, b2)] {
                if branch_p.is_zero() {
                    continue;
                }
                let mut next = state.to_vec();
                next[i] = a;
                next[j] = b;
                let weight = &w * &branch_p;
                for (mask, p) in self.walk(&next) {
                    add(&mut out, mask, &weight * p);
                }
            }
        }
        self.memo.insert(state.to_vec(), out.clone());
        out
    }
}

fn add(d: &mut Distribution, mask: u32, p: BigRational) {
    if p.is_zero() {
        return;
    }
    let e = d.entry(mask).or_insert_with(BigRational::zero);
    *e += p;
}
