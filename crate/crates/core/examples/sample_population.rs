//! Draw a well-spread sample of 20 from a 400-point grid and compare how many
//! selected units are grid neighbours under LPM2 and under simple random
//! sampling.
//!
//! cargo run --example sample_population

use pivotal_sampling::rng::seeded;
use pivotal_sampling::{lpm1, lpm2, Distance, InclusionProbabilities, Points};
use rand::seq::index::sample as srs;

fn neighbour_pairs(points: &Points, selected: &[usize]) -> usize {
    let mut count = 0;
    for (k, &i) in selected.iter().enumerate() {
        for &j in &selected[k + 1..] {
            let d = Distance::Euclidean.distance(points.row(i), points.row(j));
            if d <= 1.0 {
                count += 1;
            }
        }
    }
    count
}

fn main() -> pivotal_sampling::Result<()> {
    let rows: Vec<[f64; 2]> = (0..400)
        .map(|k| [(k % 20) as f64, (k / 20) as f64])
        .collect();
    let grid = Points::from_rows(&rows)?;
    let probs = InclusionProbabilities::equal(20, 400)?;
    let mut rng = seeded(2024);

    let s2 = lpm2(&probs, &grid, &Distance::Euclidean, &mut rng)?;
    println!("LPM2 selected {:?}", s2.selected);
    println!("{} pivotal steps", s2.steps);

    let runs = 200;
    let (mut a2, mut a1, mut a0) = (0, 0, 0);
    for _ in 0..runs {
        a2 += neighbour_pairs(
            &grid,
            &lpm2(&probs, &grid, &Distance::Euclidean, &mut rng)?.selected,
        );
        a1 += neighbour_pairs(
            &grid,
            &lpm1(&probs, &grid, &Distance::Euclidean, &mut rng)?.selected,
        );
        a0 += neighbour_pairs(&grid, &srs(&mut rng, 400, 20).into_vec());
    }
    let per = |c: usize| c as f64 / runs as f64;
    println!(
        "adjacent pairs per sample over {runs} runs: lpm2 {:.2}, lpm1 {:.2}, srs {:.2}",
        per(a2),
        per(a1),
        per(a0)
    );
    for y in (0..20).rev() {
        let line: String = (0..20)
            .map(|x| {
                if s2.selected.contains(&(y * 20 + x)) {
                    '#'
                } else {
                    '.'
                }
            })
            .collect();
        println!("{line}");
    }
    Ok(())
}
