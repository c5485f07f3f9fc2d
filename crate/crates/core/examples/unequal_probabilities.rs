//! Unequal inclusion probabilities proportional to a size variable, and the
//! Horvitz-Thompson estimate of a population mean.
//!
//! cargo run --example unequal_probabilities

use pivotal_sampling::estimation::ht_estimate;
use pivotal_sampling::experiments::replicate_values;
use pivotal_sampling::rng::seeded;
use pivotal_sampling::{lpm2, Distance, InclusionProbabilities, Points};
use rand::Rng;

fn main() -> pivotal_sampling::Result<()> {
    let big_n = 1000;
    let n = 50.0;
    let mut rng = seeded(7);
    let coords = Points::new((0..2 * big_n).map(|_| rng.random()).collect(), 2)?;
    let size: Vec<f64> = (0..big_n)
        .map(|_| 1.0 + 4.0 * rng.random::<f64>())
        .collect();
    // trait roughly proportional to size
    let y: Vec<f64> = size.iter().map(|s| 2.0 * s + rng.random::<f64>()).collect();
    let total: f64 = size.iter().sum();
    let pi: Vec<f64> = size.iter().map(|s| n * s / total).collect();
    let probs = InclusionProbabilities::new(pi.clone())?;
    let truth = y.iter().sum::<f64>() / big_n as f64;

    let estimates = replicate_values(500, 8, |_, rng| {
        let s = lpm2(&probs, &coords, &Distance::Euclidean, rng).unwrap();
        let ys: Vec<f64> = s.selected.iter().map(|&i| y[i]).collect();
        let ps: Vec<f64> = s.selected.iter().map(|&i| pi[i]).collect();
        ht_estimate(&ys, &ps, big_n as f64, None).unwrap().point
    });
    let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
    let sd = (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>()
        / (estimates.len() - 1) as f64)
        .sqrt();
    println!("population mean {truth:.4}");
    println!("HT over 500 LPM2 samples: mean {mean:.4}, sd {sd:.4}");
    Ok(())
}
