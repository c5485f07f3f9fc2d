use std::time::Instant;

use super::{replicate_values, thinned_cloud, ExperimentConfig, ExperimentReport, Method, Summary};
use crate::continuous::{normal_quantile, DistributionSpec, ISSpec};
use crate::error::Result;
use crate::estimation::ht_estimate;

/// Mean of the proposal used by the importance sampling variants.
pub const PROPOSAL_MEAN: f64 = 3.0;

/// The 99.9th percentile of the standard normal distribution.
pub fn rare_event_threshold() -> f64 {
    normal_quantile(0.999)
}

/// `1000 x` above the 99.9th percentile, zero below.
#[inline]
pub fn rare_event_payoff(x: f64, threshold: f64) -> f64 {
    if x > threshold {
        1000.0 * x
    } else {
        0.0
    }
}

/// Exact `E[1000 X 1{X > a}] = 1000 phi(a)` for standard normal `X`.
pub fn rare_event_true_value() -> f64 {
    let a = rare_event_threshold();
    1000.0 * (-0.5 * a * a).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Estimates the rare-event mean. `iid`/`lpm2` sample the target `N(0, 1)`
/// directly; `is`/`is+lpm2` sample the proposal `N(3, 1)` and weight each
/// point by the density ratio in the Horvitz-Thompson estimator.
pub fn run_rare_event_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    cfg.require(&[
        Method::Iid,
        Method::Lpm1,
        Method::Lpm2,
        Method::Is,
        Method::IsLpm2,
    ])?;
    let started = Instant::now();
    let threshold = rare_event_threshold();
    let target = DistributionSpec::standard_normal(1);
    let proposal = DistributionSpec::normal(vec![PROPOSAL_MEAN], vec![1.0])?;
    let is = ISSpec::new(target.clone(), proposal.clone())?;
    let weighted = matches!(cfg.method, Method::Is | Method::IsLpm2);
    let source = if weighted { &proposal } else { &target };
    let (n, big_n) = (cfg.n, cfg.population);

    let values = replicate_values(cfg.replicates, cfg.seed, |_, rng| -> Result<f64> {
        let x: Vec<f64> = match cfg.method.variant() {
            None => source.draw(n, rng),
            Some(variant) => {
                let (cloud, selected) = thinned_cloud(source, n, big_n, variant, rng)?;
                selected.iter().map(|&i| cloud.row(i)[0]).collect()
            }
        };
        let y: Vec<f64> = x.iter().map(|&v| rare_event_payoff(v, threshold)).collect();
        let w: Option<Vec<f64>> = weighted.then(|| {
            x.iter()
                .map(|v| is.weight(std::slice::from_ref(v)))
                .collect()
        });
        let pi = vec![n as f64 / big_n as f64; y.len()];
        Ok(ht_estimate(&y, &pi, big_n as f64, w.as_deref())?.point)
    });
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    let mut report = ExperimentReport::new(cfg, Summary::of(&values), started);
    report.true_value = Some(rare_event_true_value());
    Ok(report)
}
