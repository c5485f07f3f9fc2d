use std::time::Instant;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ode::{integrate_until, Stop, Tolerances};
use super::{
    normal_cdf, replicate_values, thinned_cloud, ExperimentConfig, ExperimentReport, Method,
    Summary,
};
use crate::continuous::{normal_quantile, DistributionSpec};
use crate::error::{Error, Result};

/// Bistable forest cover model `x' = F(x) - M x` with
/// `F(x) = R x (1 - x)` above the critical cover and 0 at or below it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RainforestParams {
    pub growth: f64,
    pub death: f64,
    pub x_crit: f64,
    /// Radius of the attractor neighbourhoods.
    pub epsilon: f64,
    pub t_max: f64,
}

impl Default for RainforestParams {
    fn default() -> Self {
        Self {
            growth: 1.0,
            death: 0.5,
            x_crit: 0.1,
            epsilon: 1e-2,
            t_max: 1e3,
        }
    }
}

impl RainforestParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.death > 0.0 && self.death < self.growth) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < M < R, got M = {}, R = {}",
                self.death, self.growth
            )));
        }
        if !(0.0..1.0).contains(&self.x_crit) {
            return Err(Error::InvalidParameter(format!(
                "critical cover {} outside [0, 1)",
                self.x_crit
            )));
        }
        if !(self.epsilon > 0.0 && self.t_max > 0.0) {
            return Err(Error::InvalidParameter(
                "epsilon and t_max must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Forest equilibrium `1 - M / R`.
    pub fn forest_state(&self) -> f64 {
        1.0 - self.death / self.growth
    }

    pub fn with_x_crit(mut self, x_crit: f64) -> Self {
        self.x_crit = x_crit;
        self
    }
}

#[inline]
pub fn rainforest_rhs(x: f64, p: &RainforestParams) -> f64 {
    let growth = if x > p.x_crit {
        p.growth * x * (1.0 - x)
    } else {
        0.0
    };
    growth - p.death * x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attractor {
    Forest,
    Savanna,
    Timeout,
}

/// Integrates from `x0` until the state enters the `epsilon` neighbourhood of
/// the forest or savanna equilibrium, or `t_max` passes.
///
/// A neighbourhood only counts as reached when the flow there does not point
/// away from its equilibrium; otherwise a state just above a critical cover
/// of 0 would be classified as savanna while growing towards the forest.
pub fn integrate_to_attractor(x0: f64, p: &RainforestParams) -> Result<Attractor> {
    p.validate()?;
    if !x0.is_finite() {
        return Err(Error::NonFinite("initial cover".into()));
    }
    let forest = p.forest_state();
    let captured = |x: f64, target: f64| {
        (x - target).abs() < p.epsilon && rainforest_rhs(x, p) * (target - x) >= 0.0
    };
    let (stop, _, _) = integrate_until(
        |_, y, dy| dy[0] = rainforest_rhs(y[0], p),
        &[x0],
        p.t_max,
        Tolerances::default(),
        |_, y| {
            if captured(y[0], forest) {
                Some(Attractor::Forest)
            } else if captured(y[0], 0.0) {
                Some(Attractor::Savanna)
            } else {
                None
            }
        },
    );
    Ok(match stop {
        Stop::Event(a) => a,
        Stop::Timeout | Stop::Failed => Attractor::Timeout,
    })
}

/// Fraction of safe initial conditions `N_safe / N_tot`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub p: f64,
    pub n_safe: usize,
    pub n_tot: usize,
    /// Trajectories that reached neither attractor; counted as unsafe.
    pub n_timeout: usize,
}

/// Stability measure for perturbations `z`, each giving the initial cover
/// `x_F - |z|`.
pub fn stability_of(perturbations: &[f64], p: &RainforestParams) -> Result<StabilityReport> {
    let forest = p.forest_state();
    let (mut n_safe, mut n_timeout) = (0, 0);
    for &z in perturbations {
        match integrate_to_attractor(forest - z.abs(), p)? {
            Attractor::Forest => n_safe += 1,
            Attractor::Timeout => n_timeout += 1,
            Attractor::Savanna => {}
        }
    }
    let n_tot = perturbations.len();
    Ok(StabilityReport {
        p: n_safe as f64 / n_tot as f64,
        n_safe,
        n_tot,
        n_timeout,
    })
}

/// Expected stability under standard normal perturbations. A perturbation is
/// safe exactly when `x_F - |z| > x_crit`, so the mean is
/// `2 Phi(x_F - x_crit) - 1` (zero once `x_crit >= x_F`).
pub fn stability_closed_form(p: &RainforestParams) -> f64 {
    let margin = p.forest_state() - p.x_crit;
    if margin <= 0.0 {
        0.0
    } else {
        2.0 * normal_cdf(margin) - 1.0
    }
}

/// Replicated stability estimates, one report per critical cover in `grid`.
/// Grid point `g` uses master seed `cfg.seed + g`.
pub fn run_rainforest_experiment(
    cfg: &ExperimentConfig,
    params: &RainforestParams,
    grid: &[f64],
) -> Result<Vec<ExperimentReport>> {
    cfg.validate()?;
    cfg.require(&[Method::Iid, Method::Lpm1, Method::Lpm2])?;
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty x_crit grid".into()));
    }
    let dist = DistributionSpec::standard_normal(1);
    let (n, big_n) = (cfg.n, cfg.population);
    grid.iter()
        .enumerate()
        .map(|(g, &x_crit)| {
            let p = params.with_x_crit(x_crit);
            p.validate()?;
            let started = Instant::now();
            let seed = cfg.seed.wrapping_add(g as u64);
            let rows =
                replicate_values(cfg.replicates, seed, |_, rng| -> Result<StabilityReport> {
                    let z: Vec<f64> = match cfg.method.variant() {
                        None => (0..n)
                            .map(|_| normal_quantile(rng.sample(Open01)))
                            .collect(),
                        Some(variant) => {
                            let (cloud, selected) = thinned_cloud(&dist, n, big_n, variant, rng)?;
                            selected.iter().map(|&i| cloud.row(i)[0]).collect()
                        }
                    };
                    stability_of(&z, &p)
                });
            let rows: Vec<StabilityReport> = rows.into_iter().collect::<Result<_>>()?;
            let values: Vec<f64> = rows.iter().map(|r| r.p).collect();
            let timeouts: usize = rows.iter().map(|r| r.n_timeout).sum();
            let mut report = ExperimentReport::new(cfg, Summary::of(&values), started);
            report.true_value = Some(stability_closed_form(&p));
            report.parameters.extend([
                ("x_crit".to_string(), x_crit),
                ("R".to_string(), p.growth),
                ("M".to_string(), p.death),
                ("epsilon".to_string(), p.epsilon),
                ("t_max".to_string(), p.t_max),
                ("timeouts".to_string(), timeouts as f64),
            ]);
            Ok(report)
        })
        .collect()
}
