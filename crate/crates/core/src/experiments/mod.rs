//! Replicated Monte Carlo experiments comparing iid sampling, stratification,
//! importance sampling and pivotal thinning.
//!
//! Every experiment runs `m` replicates; replicate `k` draws from
//! [`replicate_stream`]`(seed, k)`, so results do not depend on scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::continuous::{discretize, DistributionSpec};
use crate::distance::Distance;
use crate::error::{Error, Result};
use crate::estimation::SCHEMA_VERSION;
use crate::pivotal::{sample, InclusionProbabilities, Variant};
use crate::points::Points;
use crate::rng::{replicate_stream, ChaCha8Rng};

mod balance;
mod integral;
pub mod ode;
mod option;
mod rainforest;
mod rare_event;

pub use balance::run_balance_experiment;
pub use integral::{integral_sweep, run_integral_experiment, INTEGRAL_TRUE_VALUE, STRATA};
pub use option::{bs_price, normal_cdf, run_option_experiment, OptionParams};
pub use rainforest::{
    integrate_to_attractor, rainforest_rhs, run_rainforest_experiment, stability_closed_form,
    stability_of, Attractor, RainforestParams, StabilityReport,
};
pub use rare_event::{
    rare_event_payoff, rare_event_threshold, rare_event_true_value, run_rare_event_experiment,
};

/// Default discretization factor: `N = 100 n`.
pub const DEFAULT_DISCRETIZATION_FACTOR: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "iid")]
    Iid,
    #[serde(rename = "lpm1")]
    Lpm1,
    #[serde(rename = "lpm2")]
    Lpm2,
    #[serde(rename = "stratified")]
    Stratified,
    #[serde(rename = "is")]
    Is,
    #[serde(rename = "is+lpm2")]
    IsLpm2,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Iid => "iid",
            Method::Lpm1 => "lpm1",
            Method::Lpm2 => "lpm2",
            Method::Stratified => "stratified",
            Method::Is => "is",
            Method::IsLpm2 => "is+lpm2",
        }
    }

    /// Pivotal variant used for thinning, if any.
    pub fn variant(self) -> Option<Variant> {
        match self {
            Method::Lpm1 => Some(Variant::Lpm1),
            Method::Lpm2 | Method::IsLpm2 => Some(Variant::Lpm2),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iid" => Ok(Method::Iid),
            "lpm1" => Ok(Method::Lpm1),
            "lpm2" | "lpm" => Ok(Method::Lpm2),
            "stratified" | "strat" => Ok(Method::Stratified),
            "is" => Ok(Method::Is),
            "is+lpm2" | "is+lpm" | "is-lpm2" => Ok(Method::IsLpm2),
            other => Err(Error::InvalidParameter(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub method: Method,
    /// Sample size `n`.
    pub n: usize,
    /// Discretization size `N`.
    #[serde(rename = "N")]
    pub population: usize,
    /// Replicate count `m`.
    pub replicates: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(
        experiment: &str,
        method: Method,
        n: usize,
        population: usize,
        replicates: usize,
        seed: u64,
    ) -> Self {
        Self {
            experiment: experiment.into(),
            method,
            n,
            population,
            replicates,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("sample size must be >= 1".into()));
        }
        if self.n > self.population {
            return Err(Error::InvalidParameter(format!(
                "sample size {} exceeds discretization size {}",
                self.n, self.population
            )));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidParameter(
                "replicate count must be >= 1".into(),
            ));
        }
        Ok(())
    }

    fn require(&self, allowed: &[Method]) -> Result<()> {
        if allowed.contains(&self.method) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "method '{}' is not available for the {} experiment",
                self.method, self.experiment
            )))
        }
    }
}

/// Mean and standard deviation of replicate estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation; absent for a single replicate.
    pub sd: Option<f64>,
    pub replicates: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let m = values.len();
        let mean = values.iter().sum::<f64>() / m as f64;
        let sd = (m > 1).then(|| {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt()
        });
        Self {
            mean,
            sd,
            replicates: m,
        }
    }

    /// Standard error of the mean, `sd / sqrt(m)`.
    pub fn standard_error(&self) -> Option<f64> {
        self.sd.map(|s| s / (self.replicates as f64).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, f64>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub true_value: Option<f64>,
    /// Mean over replicates of the square root of the local mean variance
    /// estimate, where the experiment computes it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_sd_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_secs: Option<f64>,
}

impl ExperimentReport {
    pub(crate) fn new(config: &ExperimentConfig, summary: Summary, started: Instant) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            config: config.clone(),
            parameters: BTreeMap::new(),
            summary,
            true_value: None,
            local_sd_mean: None,
            wall_time_secs: Some(started.elapsed().as_secs_f64()),
        }
    }

    pub fn mean(&self) -> f64 {
        self.summary.mean
    }

    pub fn sd(&self) -> f64 {
        self.summary.sd.unwrap_or(0.0)
    }

    pub const CSV_HEADER: [&'static str; 6] = ["method", "n", "N", "m", "mean", "sd"];

    pub fn csv_row(&self) -> [String; 6] {
        [
            self.config.method.to_string(),
            self.config.n.to_string(),
            self.config.population.to_string(),
            self.summary.replicates.to_string(),
            format!("{:?}", self.summary.mean),
            self.summary
                .sd
                .map(|s| format!("{s:?}"))
                .unwrap_or_default(),
        ]
    }
}

/// Runs `m` independent replicates of `estimator` in parallel and collects
/// the results in replicate order.
pub fn replicate_values<T, F>(m: usize, seed: u64, estimator: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync,
{
    (0..m)
        .into_par_iter()
        .map(|k| estimator(k, &mut replicate_stream(seed, k as u64)))
        .collect()
}

/// Mean and sd of `m` replicate estimates.
pub fn replicate<F>(m: usize, seed: u64, estimator: F) -> Summary
where
    F: Fn(usize, &mut ChaCha8Rng) -> f64 + Sync,
{
    Summary::of(&replicate_values(m, seed, estimator))
}

/// Fallible variant of [`replicate_values`]; the first error in replicate
/// order wins.
pub fn try_replicate_values<T, F>(m: usize, seed: u64, estimator: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> Result<T> + Sync,
{
    replicate_values(m, seed, estimator).into_iter().collect()
}

/// Discretizes `dist` into `population` points and thins it to `n` with equal
/// probabilities `n / N`. Returns the cloud and the selected rows.
pub fn thinned_cloud<R: Rng + ?Sized>(
    dist: &DistributionSpec,
    n: usize,
    population: usize,
    variant: Variant,
    rng: &mut R,
) -> Result<(Points, Vec<usize>)> {
    let cloud = discretize(dist, population, rng)?.coords;
    let probs = InclusionProbabilities::equal(n, population)?;
    let s = sample(variant, &probs, &cloud, &Distance::Euclidean, rng)?;
    Ok((cloud, s.selected))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_replicate_has_no_sd() {
        let s = replicate(1, 9, |_, _| 4.0);
        assert_eq!(s.mean, 4.0);
        assert_eq!(s.sd, None);
    }

    #[test]
    fn constant_estimator() {
        let s = replicate(50, 9, |_, _| 2.5);
        assert_eq!(s.sd, Some(0.0));
    }

    #[test]
    fn index_estimator() {
        let s = replicate(3, 9, |k, _| k as f64);
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.sd, Some(1.0));
    }

    #[test]
    fn replicates_are_reproducible() {
        let a = replicate_values(20, 5, |_, rng| rng.random::<u64>());
        let b = replicate_values(20, 5, |_, rng| rng.random::<u64>());
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn method_names_round_trip() {
        for m in [
            Method::Iid,
            Method::Lpm1,
            Method::Lpm2,
            Method::Stratified,
            Method::Is,
            Method::IsLpm2,
        ] {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("mcmc".parse::<Method>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::new("x", Method::Iid, 10, 5, 1, 0)
            .validate()
            .is_err());
        assert!(ExperimentConfig::new("x", Method::Iid, 5, 5, 0, 0)
            .validate()
            .is_err());
        assert!(ExperimentConfig::new("x", Method::Iid, 5, 5, 1, 0)
            .validate()
            .is_ok());
    }
}
