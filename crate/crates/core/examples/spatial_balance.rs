//! Spatial balance of LPM2 and iid samples of the unit square: the variance
//! of the Voronoi cell masses around their ideal value 1.
//!
//! cargo run --release --example spatial_balance

use pivotal_sampling::experiments::{run_balance_experiment, ExperimentConfig, Method};

fn main() -> pivotal_sampling::Result<()> {
    for method in [Method::Lpm2, Method::Lpm1, Method::Iid] {
        let cfg = ExperimentConfig::new("balance", method, 100, 10_000, 100, 4);
        let r = run_balance_experiment(&cfg, 2, None)?;
        println!("{method:>5}: balance {:.4} (sd {:.4})", r.mean(), r.sd());
    }
    Ok(())
}
