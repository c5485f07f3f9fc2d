//! Exact sample distribution of LPM1 and LPM2 on five units, by enumerating
//! every branch of the random process with rational arithmetic.
//!
//! cargo run --example exact_oracle

use pivotal_sampling::oracle::enumerate;
use pivotal_sampling::{Distance, InclusionProbabilities, Points, Variant};

fn main() -> pivotal_sampling::Result<()> {
    let coords = Points::from_rows(&[[0.0, 0.0], [1.0, 0.0], [2.5, 0.0], [0.0, 1.0], [2.0, 2.0]])?;
    let probs = InclusionProbabilities::new(vec![0.4, 0.6, 0.5, 0.7, 0.8])?;
    for variant in [Variant::Lpm1, Variant::Lpm2] {
        let r = enumerate(&probs, &coords, &Distance::Euclidean, variant)?;
        println!("{}: first order {:?}", variant.name(), r.first_order);
        for (s, p) in &r.exact {
            println!("  {s:?}  {p}");
        }
    }
    Ok(())
}
