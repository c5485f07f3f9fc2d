//! Variance of the sample mean from a single LPM2 sample: the local mean
//! estimator with a few neighbours against the iid formula and against the
//! spread over many replicate samples.
//!
//! cargo run --release --example variance_estimation

use pivotal_sampling::continuous::DistributionSpec;
use pivotal_sampling::estimation::{global_mean_variance, local_mean_variance};
use pivotal_sampling::experiments::thinned_cloud;
use pivotal_sampling::rng::{replicate_stream, seeded};
use pivotal_sampling::{Distance, Variant};

fn y(x: &[f64]) -> f64 {
    (3.0 * x[0]).sin() + x[1] * x[1]
}

fn main() -> pivotal_sampling::Result<()> {
    let dist = DistributionSpec::unit_cube(2);
    let (n, big_n) = (200, 20_000);
    let (cloud, selected) = thinned_cloud(&dist, n, big_n, Variant::Lpm2, &mut seeded(5))?;
    let sample = cloud.select(&selected)?;
    let values: Vec<f64> = sample.rows().map(y).collect();
    for n_prime in [2, 4, 10] {
        let v = local_mean_variance(&values, &sample, &Distance::Euclidean, n_prime)?;
        println!("local mean, n' = {n_prime:>2}: sd {:.5}", v.sqrt());
    }
    println!(
        "iid formula:          sd {:.5}",
        global_mean_variance(&values).sqrt()
    );

    let means: Vec<f64> = (0..300)
        .map(|k| {
            let (c, s) =
                thinned_cloud(&dist, n, big_n, Variant::Lpm2, &mut replicate_stream(6, k)).unwrap();
            s.iter().map(|&i| y(c.row(i))).sum::<f64>() / n as f64
        })
        .collect();
    let m = means.iter().sum::<f64>() / means.len() as f64;
    let sd = (means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64).sqrt();
    println!("replicate spread:     sd {sd:.5}");
    Ok(())
}
