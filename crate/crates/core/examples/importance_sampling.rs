//! Rare-event mean E[1000 X 1{X > q_0.999}] for X ~ N(0, 1): plain sampling,
//! importance sampling from N(3, 1), and importance sampling thinned by LPM2.
//!
//! cargo run --release --example importance_sampling

use pivotal_sampling::experiments::{
    rare_event_true_value, run_rare_event_experiment, ExperimentConfig, Method,
};

fn main() -> pivotal_sampling::Result<()> {
    println!("true value {:.4}", rare_event_true_value());
    for method in [Method::Iid, Method::Lpm2, Method::Is, Method::IsLpm2] {
        let cfg = ExperimentConfig::new("rare-event", method, 100, 10_000, 300, 1);
        let r = run_rare_event_experiment(&cfg)?;
        println!("{:>8}: mean {:.4}, sd {:.4}", method, r.mean(), r.sd());
    }
    Ok(())
}
