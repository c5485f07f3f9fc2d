use std::time::Instant;

use rand::distr::Open01;
use rand::Rng;

use super::{replicate_values, thinned_cloud, ExperimentConfig, ExperimentReport, Method, Summary};
use crate::continuous::DistributionSpec;
use crate::error::{Error, Result};
use crate::estimation::ht_estimate;

/// `integral of x over (0, 1)`.
pub const INTEGRAL_TRUE_VALUE: f64 = 0.5;

/// Number of equal-width strata in the stratified baseline.
pub const STRATA: usize = 10;

/// Estimates the integral of `x` over `(0, 1)` by sampling `y(x) = x`.
///
/// `iid` averages `n` uniforms; `lpm1`/`lpm2` thin `N` uniforms to `n` and
/// apply the Horvitz-Thompson estimator with `pi = n / N`; `stratified` draws
/// `n / 10` uniforms in each of 10 equal strata.
pub fn run_integral_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    cfg.require(&[Method::Iid, Method::Lpm1, Method::Lpm2, Method::Stratified])?;
    if cfg.method == Method::Stratified && !cfg.n.is_multiple_of(STRATA) {
        return Err(Error::InvalidParameter(format!(
            "stratified allocation needs n divisible by {STRATA}, got {}",
            cfg.n
        )));
    }
    let started = Instant::now();
    let dist = DistributionSpec::unit_cube(1);
    let (n, big_n) = (cfg.n, cfg.population);
    let values = replicate_values(cfg.replicates, cfg.seed, |_, rng| -> Result<f64> {
        match cfg.method {
            Method::Iid => Ok((0..n).map(|_| rng.sample::<f64, _>(Open01)).sum::<f64>() / n as f64),
            Method::Stratified => {
                let per = n / STRATA;
                let width = 1.0 / STRATA as f64;
                let mut total = 0.0;
                for s in 0..STRATA {
                    for _ in 0..per {
                        let u: f64 = rng.sample(Open01);
                        total += (s as f64 + u) * width;
                    }
                }
                Ok(total / n as f64)
            }
            Method::Lpm1 | Method::Lpm2 => {
                let variant = cfg.method.variant().expect("pivotal method");
                let (cloud, selected) = thinned_cloud(&dist, n, big_n, variant, rng)?;
                let y: Vec<f64> = selected.iter().map(|&i| cloud.row(i)[0]).collect();
                let pi = vec![n as f64 / big_n as f64; y.len()];
                Ok(ht_estimate(&y, &pi, big_n as f64, None)?.point)
            }
            _ => unreachable!("method checked above"),
        }
    });
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    let mut report = ExperimentReport::new(cfg, Summary::of(&values), started);
    report.true_value = Some(INTEGRAL_TRUE_VALUE);
    Ok(report)
}

/// Integral experiment for each discretization size in `sizes`, with the
/// other settings from `cfg`.
pub fn integral_sweep(cfg: &ExperimentConfig, sizes: &[usize]) -> Result<Vec<ExperimentReport>> {
    sizes
        .iter()
        .map(|&big_n| {
            let mut c = cfg.clone();
            c.population = big_n;
            run_integral_experiment(&c)
        })
        .collect()
}
