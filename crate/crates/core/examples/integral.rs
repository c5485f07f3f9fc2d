//! Monte Carlo estimate of the integral of x over (0, 1): iid, stratified and
//! LPM2 samples of 100, and the LPM2 spread as the discretization grows.
//!
//! cargo run --release --example integral

use pivotal_sampling::experiments::{
    integral_sweep, run_integral_experiment, ExperimentConfig, Method,
};

fn main() -> pivotal_sampling::Result<()> {
    for method in [Method::Iid, Method::Stratified, Method::Lpm2] {
        let cfg = ExperimentConfig::new("integral", method, 100, 10_000, 1000, 1);
        let r = run_integral_experiment(&cfg)?;
        println!("{method:>10}: mean {:.5}, sd {:.5}", r.mean(), r.sd());
    }
    let cfg = ExperimentConfig::new("integral", Method::Lpm2, 100, 100, 500, 2);
    for r in integral_sweep(&cfg, &[100, 300, 1000, 3000, 10_000])? {
        println!("N = {:>6}: sd {:.5}", r.config.population, r.sd());
    }
    Ok(())
}
