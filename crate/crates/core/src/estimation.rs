//! Horvitz-Thompson estimation, the local mean variance estimator and the
//! spatial balance diagnostic.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distance::Distance;
use crate::error::{Error, Result};
use crate::pivotal::{pick_tie, NeighborIndex};
use crate::points::Points;

pub const SCHEMA_VERSION: u32 = 1;

/// Neighbourhood size used by the local mean variance estimator unless told
/// otherwise. Results depend on this choice and no value is optimal in
/// general.
pub const DEFAULT_NEIGHBORHOOD: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub schema_version: u32,
    pub point: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_prime: Option<usize>,
    pub population_size: f64,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub schema_version: u32,
    pub balance: f64,
    pub cell_masses: Vec<f64>,
    pub mc_points: usize,
}

/// Horvitz-Thompson estimate of a population mean,
/// `(1 / N) * sum(w_i * y_i / pi_i)` over the sampled units. Without weights
/// `w_i = 1`.
pub fn ht_estimate(
    values: &[f64],
    probs: &[f64],
    population_size: f64,
    weights: Option<&[f64]>,
) -> Result<EstimateReport> {
    if values.len() != probs.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} values for {} probabilities",
            values.len(),
            probs.len()
        )));
    }
    if let Some(w) = weights {
        if w.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} values",
                w.len(),
                values.len()
            )));
        }
    }
    if !(population_size.is_finite() && population_size > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "population size {population_size} must be positive"
        )));
    }
    let mut total = 0.0;
    for (i, (&y, &p)) in values.iter().zip(probs).enumerate() {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::ProbabilityOutOfRange { index: i, value: p });
        }
        if !y.is_finite() {
            return Err(Error::NonFinite(format!("trait value at position {i}")));
        }
        let w = weights.map_or(1.0, |w| w[i]);
        total += w * y / p;
    }
    Ok(EstimateReport {
        schema_version: SCHEMA_VERSION,
        point: total / population_size,
        variance: None,
        n: values.len(),
        n_prime: None,
        population_size,
        method: "horvitz-thompson".into(),
    })
}

/// Local mean variance estimate of the variance of a sample mean,
/// `n' / (n^2 (n' - 1)) * sum_x (y(x) - m_x)^2`, where `m_x` averages `y`
/// over `x` and its `n' - 1` nearest sampled neighbours. Equidistant
/// neighbours are taken in index order.
///
/// With `n' = n` every neighbourhood is the full sample and the result is
/// the usual `sum (y - mean)^2 / (n (n - 1))`.
pub fn local_mean_variance(
    values: &[f64],
    coords: &Points,
    distance: &Distance,
    n_prime: usize,
) -> Result<f64> {
    let n = values.len();
    if coords.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} values for {} coordinate rows",
            n,
            coords.len()
        )));
    }
    check_neighborhood(n, n_prime)?;
    let mut keyed: Vec<(f64, usize)> = Vec::with_capacity(n);
    let mut total = 0.0;
    for i in 0..n {
        keyed.clear();
        let xi = coords.row(i);
        keyed.extend(
            (0..n)
                .filter(|&j| j != i)
                .map(|j| (distance.reduced(xi, coords.row(j)), j)),
        );
        let k = n_prime - 1;
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < keyed.len() {
            keyed.select_nth_unstable_by(k - 1, cmp);
        }
        let local =
            (values[i] + keyed[..k].iter().map(|&(_, j)| values[j]).sum::<f64>()) / n_prime as f64;
        total += (values[i] - local).powi(2);
    }
    let n = n as f64;
    let m = n_prime as f64;
    Ok(m / (n * n * (m - 1.0)) * total)
}

/// Neighbourhood size check shared with callers that skip coordinates.
pub fn check_neighborhood(n: usize, n_prime: usize) -> Result<()> {
    if n_prime < 2 || n_prime > n {
        return Err(Error::InvalidParameter(format!(
            "neighbourhood size {n_prime} must lie in [2, {n}]"
        )));
    }
    Ok(())
}

/// `sum (y - mean)^2 / (n (n - 1))`.
pub fn global_mean_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n * (n - 1.0))
}

/// Monte Carlo spatial balance of a sample against a reference cloud.
///
/// Each reference point is assigned to its nearest sample point (Euclidean,
/// exact ties split uniformly at random). Cell `i` gets mass
/// `a_i = n * count_i / M` and the balance is `(1 / n) * sum (a_i - 1)^2`.
/// With a uniform reference cloud the masses estimate Voronoi cell areas in
/// any dimension.
pub fn spatial_balance<R: Rng + ?Sized>(
    sample: &Points,
    reference: &Points,
    rng: &mut R,
) -> Result<BalanceReport> {
    let n = sample.len();
    let m = reference.len();
    if sample.dim() != reference.dim() {
        return Err(Error::DimensionMismatch(format!(
            "sample has {} columns, reference cloud {}",
            sample.dim(),
            reference.dim()
        )));
    }
    if m < n {
        return Err(Error::InvalidParameter(format!(
            "reference cloud of {m} points is smaller than the sample of {n}"
        )));
    }
    let mut counts = vec![0usize; n];
    let mut index = NeighborIndex::new(sample, Distance::Euclidean);
    let mut ties = Vec::new();
    for p in reference.rows() {
        index.nearest_ties_to(p, &mut ties);
        counts[pick_tie(&ties, rng)] += 1;
    }
    let cell_masses: Vec<f64> = counts
        .iter()
        .map(|&c| n as f64 * c as f64 / m as f64)
        .collect();
    let balance = cell_masses.iter().map(|a| (a - 1.0).powi(2)).sum::<f64>() / n as f64;
    Ok(BalanceReport {
        schema_version: SCHEMA_VERSION,
        balance,
        cell_masses,
        mc_points: m,
    })
}
