//! European call priced by Monte Carlo with iid normals and with LPM2
//! thinning, against the Black-Scholes formula. Also reports the single-sample
//! local mean standard error.
//!
//! cargo run --release --example option_pricing

use pivotal_sampling::experiments::{
    bs_price, run_option_experiment, ExperimentConfig, Method, OptionParams,
};

fn main() -> pivotal_sampling::Result<()> {
    let p = OptionParams::default();
    println!("Black-Scholes {:.4}", bs_price(&p)?);
    for n in [100, 1000] {
        for method in [Method::Iid, Method::Lpm2] {
            let cfg = ExperimentConfig::new("option", method, n, 10_000, 500, 3);
            let r = run_option_experiment(&cfg, &p)?;
            let local = r
                .local_sd_mean
                .map(|v| format!(", local sd {v:.4}"))
                .unwrap_or_default();
            println!(
                "n={n:>5} {method:>5}: mean {:.4}, sd {:.4}{local}",
                r.mean(),
                r.sd()
            );
        }
    }
    Ok(())
}
