use std::time::Instant;

use super::{replicate_values, thinned_cloud, ExperimentConfig, ExperimentReport, Method, Summary};
use crate::continuous::{discretize, DistributionSpec};
use crate::error::{Error, Result};
use crate::estimation::spatial_balance;
use crate::points::Points;

/// Spatial balance of samples of size `n` from the uniform distribution on
/// `[0, 1]^q`.
///
/// Each replicate discretizes the cube into `N` points, then either thins
/// them with LPM or draws `n` fresh iid points. The reference cloud is the
/// discretized population, or `fresh_reference` new uniform points.
pub fn run_balance_experiment(
    cfg: &ExperimentConfig,
    q: usize,
    fresh_reference: Option<usize>,
) -> Result<ExperimentReport> {
    cfg.validate()?;
    cfg.require(&[Method::Iid, Method::Lpm1, Method::Lpm2])?;
    if q == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    if fresh_reference == Some(0) {
        return Err(Error::Empty("reference cloud"));
    }
    let started = Instant::now();
    let dist = DistributionSpec::unit_cube(q);
    let rows = replicate_values(cfg.replicates, cfg.seed, |_, rng| -> Result<f64> {
        let (cloud, sample) = match cfg.method.variant() {
            Some(v) => {
                let (cloud, selected) = thinned_cloud(&dist, cfg.n, cfg.population, v, rng)?;
                let sample = cloud.select(&selected)?;
                (cloud, sample)
            }
            None => {
                let cloud = discretize(&dist, cfg.population, rng)?.coords;
                (cloud, Points::new(dist.draw(cfg.n, rng), q)?)
            }
        };
        let reference = match fresh_reference {
            Some(m) => discretize(&dist, m, rng)?.coords,
            None => cloud,
        };
        Ok(spatial_balance(&sample, &reference, rng)?.balance)
    });
    let values = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut report = ExperimentReport::new(cfg, Summary::of(&values), started);
    report.parameters.insert("q".into(), q as f64);
    report.parameters.insert(
        "reference_points".into(),
        fresh_reference.unwrap_or(cfg.population) as f64,
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lpm_is_better_balanced_than_iid() {
        let run = |m| {
            let cfg = ExperimentConfig::new("balance", m, 20, 1000, 20, 4);
            run_balance_experiment(&cfg, 2, None).unwrap().mean()
        };
        assert!(run(Method::Lpm2) < run(Method::Iid) / 2.0);
    }

    #[test]
    fn rejects_unsupported_method() {
        let cfg = ExperimentConfig::new("balance", Method::Is, 20, 1000, 2, 4);
        assert!(run_balance_experiment(&cfg, 2, None).is_err());
    }
}
