//! Basin stability of the forest state of a rainforest/savanna model: the
//! probability that a N(0, 1) perturbation of the forest cover returns to the
//! forest, for several critical covers.
//!
//! cargo run --release --example rainforest

use pivotal_sampling::experiments::{
    run_rainforest_experiment, stability_closed_form, ExperimentConfig, Method, RainforestParams,
};

fn main() -> pivotal_sampling::Result<()> {
    let params = RainforestParams::default();
    let grid = [0.0, 0.1, 0.2, 0.3, 0.4];
    let run = |m| {
        let cfg = ExperimentConfig::new("rainforest", m, 50, 10_000, 100, 9);
        run_rainforest_experiment(&cfg, &params, &grid)
    };
    let (iid, lpm) = (run(Method::Iid)?, run(Method::Lpm2)?);
    println!("x_crit  exact   lpm2 (sd)        iid (sd)");
    for (g, &x) in grid.iter().enumerate() {
        println!(
            "{x:>5}  {:.4}  {:.4} ({:.4})  {:.4} ({:.4})",
            stability_closed_form(&params.with_x_crit(x)),
            lpm[g].mean(),
            lpm[g].sd(),
            iid[g].mean(),
            iid[g].sd()
        );
    }
    Ok(())
}
