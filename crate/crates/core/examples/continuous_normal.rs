//! Thin an iid discretization of a bivariate normal with LPM2 and compare the
//! sample moments with an iid sample of the same size.
//!
//! cargo run --example continuous_normal

use pivotal_sampling::continuous::{discretize, DistributionSpec};
use pivotal_sampling::experiments::thinned_cloud;
use pivotal_sampling::rng::seeded;
use pivotal_sampling::{Points, Variant};

fn moments(p: &Points) -> (f64, f64) {
    let xs: Vec<f64> = p.column(0).collect();
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (m, v)
}

fn main() -> pivotal_sampling::Result<()> {
    let target = DistributionSpec::normal(vec![1.0, -2.0], vec![2.0, 0.5])?;
    let mut rng = seeded(11);
    let (cloud, selected) = thinned_cloud(&target, 200, 20_000, Variant::Lpm2, &mut rng)?;
    let lpm = cloud.select(&selected)?;
    let iid = discretize(&target, 200, &mut rng)?.coords;
    let (m1, v1) = moments(&lpm);
    let (m2, v2) = moments(&iid);
    println!("first coordinate, target mean 1 variance 4");
    println!("  lpm2 n=200: mean {m1:.4}, variance {v1:.4}");
    println!("  iid  n=200: mean {m2:.4}, variance {v2:.4}");
    Ok(())
}
