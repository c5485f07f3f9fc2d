use pivotal_sampling::oracle::enumerate;
use pivotal_sampling::rng::seeded;
use pivotal_sampling::{lpm1, lpm2, sample, Distance, InclusionProbabilities, Points, Variant};
use rand::Rng;

fn cloud(n: usize, dim: usize, seed: u64) -> Points {
    let mut rng = seeded(seed);
    Points::new((0..n * dim).map(|_| rng.random()).collect(), dim).unwrap()
}

#[test]
fn first_order_frequencies_match_targets() {
    let pi = vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.5];
    let probs = InclusionProbabilities::new(pi.clone()).unwrap();
    let coords = cloud(6, 2, 11);
    let runs = 40_000;
    for variant in [Variant::Lpm1, Variant::Lpm2] {
        let mut hits = [0usize; 6];
        let mut rng = seeded(12);
        for _ in 0..runs {
            for i in sample(variant, &probs, &coords, &Distance::Euclidean, &mut rng)
                .unwrap()
                .selected
            {
                hits[i] += 1;
            }
        }
        for (i, &p) in pi.iter().enumerate() {
            let freq = hits[i] as f64 / runs as f64;
            let se = (p * (1.0 - p) / runs as f64).sqrt();
            assert!(
                (freq - p).abs() < 4.0 * se,
                "{variant:?} unit {i}: {freq} vs {p}"
            );
        }
    }
}

#[test]
fn finals_are_binary_and_steps_bounded() {
    let coords = cloud(200, 3, 1);
    let probs = InclusionProbabilities::equal(37, 200).unwrap();
    for seed in 0..20 {
        for s in [
            lpm1(&probs, &coords, &Distance::Euclidean, &mut seeded(seed)).unwrap(),
            lpm2(&probs, &coords, &Distance::Cityblock, &mut seeded(seed)).unwrap(),
        ] {
            assert!(s.final_probs.iter().all(|&p| p == 0.0 || p == 1.0));
            assert_eq!(s.selected.len(), 37);
            assert!(s.steps <= 2 * 200);
            assert!(s.selected.windows(2).all(|w| w[0] < w[1]));
        }
    }
}

#[test]
fn same_seed_same_sample() {
    let coords = cloud(500, 2, 3);
    let probs = InclusionProbabilities::equal(50, 500).unwrap();
    let a = lpm2(&probs, &coords, &Distance::Euclidean, &mut seeded(9)).unwrap();
    let b = lpm2(&probs, &coords, &Distance::Euclidean, &mut seeded(9)).unwrap();
    let c = lpm2(&probs, &coords, &Distance::Euclidean, &mut seeded(10)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.selected, c.selected);
}

#[test]
fn custom_metric_matches_builtin() {
    let coords = cloud(120, 2, 5);
    let probs = InclusionProbabilities::equal(12, 120).unwrap();
    let manual = Distance::custom(|a, b| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum());
    let a = lpm2(&probs, &coords, &Distance::Cityblock, &mut seeded(4)).unwrap();
    let b = lpm2(&probs, &coords, &manual, &mut seeded(4)).unwrap();
    assert_eq!(a.selected, b.selected);
}

#[test]
fn square_corners_oracle() {
    // unit square corners, pi = 1/2: the first pair is a random edge and the
    // remaining two corners form the opposite edge, one unit kept from each.
    // Diagonals then have probability 1/4, edges 1/8.
    let coords = Points::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
    let probs = InclusionProbabilities::equal(2, 4).unwrap();
    for variant in [Variant::Lpm1, Variant::Lpm2] {
        let r = enumerate(&probs, &coords, &Distance::Euclidean, variant).unwrap();
        assert_eq!(r.sample_distribution.len(), 6);
        for (s, &p) in &r.sample_distribution {
            let diagonal = s == &[0, 3] || s == &[1, 2];
            assert_eq!(p, if diagonal { 0.25 } else { 0.125 }, "{variant:?} {s:?}");
        }
        for (i, &p) in r.first_order.iter().enumerate() {
            assert_eq!(p, 0.5, "unit {i}");
            for j in (i + 1)..4 {
                let diagonal = i + j == 3;
                assert_eq!(r.second_order[i][j], if diagonal { 0.25 } else { 0.125 });
            }
        }
    }
}

#[test]
fn spread_beats_iid_on_nearest_pairs() {
    // neighbouring units are rarely selected together
    let n = 400;
    let coords = Points::new((0..n).map(|i| i as f64).collect(), 1).unwrap();
    let probs = InclusionProbabilities::equal(40, n).unwrap();
    let mut adjacent = 0;
    for seed in 0..50 {
        let s = lpm2(&probs, &coords, &Distance::Euclidean, &mut seeded(seed)).unwrap();
        adjacent += s.selected.windows(2).filter(|w| w[1] == w[0] + 1).count();
    }
    // iid-like designs would give about 0.1 * 39 * 50 = 195
    assert!(adjacent < 40, "{adjacent}");
}
