use std::time::Instant;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::{replicate_values, thinned_cloud, ExperimentConfig, ExperimentReport, Method, Summary};
use crate::continuous::{normal_quantile, DistributionSpec};
use crate::distance::Distance;
use crate::error::{Error, Result};
use crate::estimation::{ht_estimate, local_mean_variance, DEFAULT_NEIGHBORHOOD};
use crate::points::Points;

/// European call on an asset following geometric Brownian motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionParams {
    pub spot: f64,
    pub strike: f64,
    pub rate: f64,
    pub sigma: f64,
    pub maturity: f64,
}

impl Default for OptionParams {
    fn default() -> Self {
        Self {
            spot: 100.0,
            strike: 120.0,
            rate: 0.03,
            sigma: 0.5,
            maturity: 0.25,
        }
    }
}

impl OptionParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.spot > 0.0
            && self.strike > 0.0
            && self.maturity > 0.0
            && self.sigma >= 0.0
            && self.rate.is_finite()
            && self.sigma.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "invalid option parameters {self:?}"
            )))
        }
    }

    /// Terminal asset value for a standard normal draw `z`.
    #[inline]
    pub fn terminal_value(&self, z: f64) -> f64 {
        let t = self.maturity;
        self.spot
            * ((self.rate - 0.5 * self.sigma * self.sigma) * t + self.sigma * t.sqrt() * z).exp()
    }

    /// Discounted call payoff for a standard normal draw `z`.
    #[inline]
    pub fn discounted_payoff(&self, z: f64) -> f64 {
        (-self.rate * self.maturity).exp() * (self.terminal_value(z) - self.strike).max(0.0)
    }
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Black-Scholes price of the call at time 0. With `sigma = 0` this is the
/// deterministic limit `max(0, s - K exp(-rT))`.
pub fn bs_price(p: &OptionParams) -> Result<f64> {
    p.validate()?;
    let discount = (-p.rate * p.maturity).exp();
    if p.sigma == 0.0 {
        return Ok((p.spot - p.strike * discount).max(0.0));
    }
    let vol = p.sigma * p.maturity.sqrt();
    let d1 = ((p.spot / p.strike).ln() + (p.rate + 0.5 * p.sigma * p.sigma) * p.maturity) / vol;
    let d2 = d1 - vol;
    Ok(normal_cdf(d1) * p.spot - normal_cdf(d2) * p.strike * discount)
}

/// Prices the call by simulation. `iid` draws `n` normals; `lpm1`/`lpm2`
/// thin a cloud of `N` normals. Each replicate also computes the local mean
/// variance estimate with `n' = 10` (or `n` if smaller), reported as the mean
/// of its square root.
pub fn run_option_experiment(
    cfg: &ExperimentConfig,
    params: &OptionParams,
) -> Result<ExperimentReport> {
    cfg.validate()?;
    cfg.require(&[Method::Iid, Method::Lpm1, Method::Lpm2])?;
    let exact = bs_price(params)?;
    let started = Instant::now();
    let (n, big_n) = (cfg.n, cfg.population);
    let n_prime = DEFAULT_NEIGHBORHOOD.min(n);
    let dist = DistributionSpec::standard_normal(1);
    let rows = replicate_values(
        cfg.replicates,
        cfg.seed,
        |_, rng| -> Result<(f64, Option<f64>)> {
            let (z, pi, population) = match cfg.method.variant() {
                None => {
                    let z: Vec<f64> = (0..n)
                        .map(|_| normal_quantile(rng.sample(Open01)))
                        .collect();
                    (z, n as f64 / big_n as f64, big_n as f64)
                }
                Some(variant) => {
                    let (cloud, selected) = thinned_cloud(&dist, n, big_n, variant, rng)?;
                    let z = selected.iter().map(|&i| cloud.row(i)[0]).collect();
                    (z, n as f64 / big_n as f64, big_n as f64)
                }
            };
            let y: Vec<f64> = z.iter().map(|&v| params.discounted_payoff(v)).collect();
            let probs = vec![pi; y.len()];
            let point = ht_estimate(&y, &probs, population, None)?.point;
            let local = if y.len() >= n_prime && n_prime >= 2 {
                let coords = Points::from_column(&z)?;
                Some(local_mean_variance(&y, &coords, &Distance::Euclidean, n_prime)?.sqrt())
            } else {
                None
            };
            Ok((point, local))
        },
    );
    let rows: Vec<(f64, Option<f64>)> = rows.into_iter().collect::<Result<_>>()?;
    let estimates: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let local: Vec<f64> = rows.iter().filter_map(|r| r.1).collect();
    let mut report = ExperimentReport::new(cfg, Summary::of(&estimates), started);
    report.true_value = Some(exact);
    report.local_sd_mean =
        (!local.is_empty()).then(|| local.iter().sum::<f64>() / local.len() as f64);
    report.parameters.extend([
        ("spot".to_string(), params.spot),
        ("strike".to_string(), params.strike),
        ("rate".to_string(), params.rate),
        ("sigma".to_string(), params.sigma),
        ("maturity".to_string(), params.maturity),
        ("n_prime".to_string(), n_prime as f64),
    ]);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_price() {
        let p = bs_price(&OptionParams::default()).unwrap();
        assert!((p - 3.886).abs() < 5e-4, "{p}");
    }

    #[test]
    fn limits() {
        let p = OptionParams {
            strike: 1e-9,
            ..OptionParams::default()
        };
        assert!((bs_price(&p).unwrap() - p.spot).abs() < 1e-6);
        let mut p = OptionParams {
            sigma: 1e-6,
            ..OptionParams::default()
        };
        assert!(bs_price(&p).unwrap() < 1e-12);
        p.sigma = 0.0;
        assert_eq!(bs_price(&p).unwrap(), 0.0);
        assert!(bs_price(&OptionParams {
            spot: -1.0,
            ..OptionParams::default()
        })
        .is_err());
    }

    #[test]
    fn zero_volatility_has_zero_spread() {
        let p = OptionParams {
            strike: 90.0,
            sigma: 0.0,
            ..OptionParams::default()
        };
        for method in [Method::Iid, Method::Lpm2] {
            let cfg = ExperimentConfig::new("option", method, 20, 200, 30, 1);
            let r = run_option_experiment(&cfg, &p).unwrap();
            assert!(r.sd() < 1e-12);
            assert!((r.mean() - bs_price(&p).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_stratified() {
        let cfg = ExperimentConfig::new("option", Method::Stratified, 20, 200, 3, 1);
        assert!(run_option_experiment(&cfg, &OptionParams::default()).is_err());
    }
}
