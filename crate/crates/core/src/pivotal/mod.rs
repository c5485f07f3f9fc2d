//! The local pivotal method over a discrete population.
//!
//! # Randomness contract
//!
//! Every run consumes its random stream in a fixed order so that other
//! implementations (and the exact enumerator in [`crate::oracle`]) reproduce
//! it:
//!
//! 1. unit draw: `random_range(0..k)` over the `k` undecided units, held in a
//!    compact array that is updated with swap-remove;
//! 2. tie-break: `random_range(0..t)` over the `t` equidistant nearest
//!    neighbours sorted by index, only when `t > 1`;
//! 3. branch: one `random::<f64>()` draw `u`, the first branch of the update is
//!    taken when `u` is below its probability.
//!
//! LPM1 repeats steps 1 and 2 until the drawn pair is mutually nearest (the
//! check itself consumes nothing). After `10 N` consecutive failures it scans
//! the undecided array in order for the first mutual pair. When a single
//! undecided unit remains (only possible if the probabilities do not sum to
//! an integer) it is included iff one final `random::<f64>()` draw falls below
//! its probability.

mod index;
mod update;

pub use index::NeighborIndex;
pub use update::{first_branch_probability, pivotal_update, DECIDED_TOLERANCE};

pub(crate) use index::pick_tie;
pub(crate) use update::{is_decided, snap, update_pair};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distance::Distance;
use crate::error::{Error, Result};
use crate::points::Points;

/// Prescribed inclusion probabilities, one per unit, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionProbabilities(Vec<f64>);

impl InclusionProbabilities {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ProbabilityOutOfRange { index, value });
            }
        }
        if values.is_empty() {
            return Err(Error::Empty("inclusion probabilities"));
        }
        Ok(Self(values))
    }

    /// Equal probabilities `n / N` for every unit.
    pub fn equal(n: usize, population: usize) -> Result<Self> {
        if population == 0 {
            return Err(Error::Empty("population"));
        }
        if n > population {
            return Err(Error::InvalidParameter(format!(
                "sample size {n} exceeds population size {population}"
            )));
        }
        Ok(Self(vec![n as f64 / population as f64; population]))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Expected sample size, the sum of the probabilities.
    pub fn expected_size(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Outcome of a pivotal sampling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleResult {
    /// Indices of the selected units, ascending.
    pub selected: Vec<usize>,
    /// Final probabilities, each exactly 0 or 1.
    pub final_probs: Vec<f64>,
    /// Number of pivotal updates performed.
    pub steps: usize,
}

impl SampleResult {
    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Update only mutually nearest pairs.
    Lpm1,
    /// Update a random undecided unit with its nearest neighbour.
    Lpm2,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Lpm1 => "lpm1",
            Variant::Lpm2 => "lpm2",
        }
    }
}

/// Select a sample with LPM2.
///
/// ```
/// use pivotal_sampling::{lpm2, Distance, InclusionProbabilities, Points};
/// use rand::SeedableRng;
///
/// let coords = Points::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])?;
/// let probs = InclusionProbabilities::equal(2, 4)?;
/// let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
/// let s = lpm2(&probs, &coords, &Distance::Euclidean, &mut rng)?;
/// assert_eq!(s.selected.len(), 2);
/// # Ok::<(), pivotal_sampling::Error>(())
/// ```
pub fn lpm2<R: Rng + ?Sized>(
    probs: &InclusionProbabilities,
    coords: &Points,
    distance: &Distance,
    rng: &mut R,
) -> Result<SampleResult> {
    sample(Variant::Lpm2, probs, coords, distance, rng)
}

/// Select a sample with LPM1.
pub fn lpm1<R: Rng + ?Sized>(
    probs: &InclusionProbabilities,
    coords: &Points,
    distance: &Distance,
    rng: &mut R,
) -> Result<SampleResult> {
    sample(Variant::Lpm1, probs, coords, distance, rng)
}

pub fn sample<R: Rng + ?Sized>(
    variant: Variant,
    probs: &InclusionProbabilities,
    coords: &Points,
    distance: &Distance,
    rng: &mut R,
) -> Result<SampleResult> {
    if probs.len() != coords.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities for {} coordinate rows",
            probs.len(),
            coords.len()
        )));
    }
    let mut run = Run::new(probs, coords, distance.clone());
    match variant {
        Variant::Lpm2 => run.lpm2(rng),
        Variant::Lpm1 => run.lpm1(rng),
    }
    run.finish(rng)
}

struct Run<'a> {
    p: Vec<f64>,
    undecided: Vec<usize>,
    position: Vec<usize>,
    index: NeighborIndex<'a>,
    steps: usize,
}

impl<'a> Run<'a> {
    fn new(probs: &InclusionProbabilities, coords: &'a Points, distance: Distance) -> Self {
        let p: Vec<f64> = probs.values().iter().map(|&v| snap(v)).collect();
        let mut index = NeighborIndex::new(coords, distance);
        let mut undecided = Vec::with_capacity(p.len());
        let mut position = vec![usize::MAX; p.len()];
        for (i, &v) in p.iter().enumerate() {
            if is_decided(v) {
                index.deactivate(i);
            } else {
                position[i] = undecided.len();
                undecided.push(i);
            }
        }
        Self {
            p,
            undecided,
            position,
            index,
            steps: 0,
        }
    }

    fn retire(&mut self, i: usize) {
        let k = self.position[i];
        let last = *self.undecided.last().expect("retiring from empty set");
        self.undecided.swap_remove(k);
        if last != i {
            self.position[last] = k;
        }
        self.position[i] = usize::MAX;
        self.index.deactivate(i);
    }

    fn apply<R: Rng + ?Sized>(&mut self, i: usize, j: usize, rng: &mut R) {
        let (a, b) = update_pair(self.p[i], self.p[j], rng.random());
        self.p[i] = a;
        self.p[j] = b;
        self.steps += 1;
        if is_decided(a) {
            self.retire(i);
        }
        if is_decided(b) {
            self.retire(j);
        }
    }

    fn lpm2<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let mut ties = Vec::new();
        while self.undecided.len() >= 2 {
            let i = self.undecided[rng.random_range(0..self.undecided.len())];
            self.index.nearest_ties_of(i, &mut ties);
            let j = pick_tie(&ties, rng);
            self.apply(i, j, rng);
        }
    }

    fn lpm1<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let cap = 10 * self.p.len();
        let mut ties = Vec::new();
        let mut back = Vec::new();
        let mut failures = 0;
        while self.undecided.len() >= 2 {
            let pair = if failures < cap {
                let i = self.undecided[rng.random_range(0..self.undecided.len())];
                self.index.nearest_ties_of(i, &mut ties);
                let j = pick_tie(&ties, rng);
                self.index.nearest_ties_of(j, &mut back);
                back.binary_search(&i).is_ok().then_some((i, j))
            } else {
                Some(self.first_mutual_pair())
            };
            match pair {
                Some((i, j)) => {
                    failures = 0;
                    self.apply(i, j, rng);
                }
                None => failures += 1,
            }
        }
    }

    fn first_mutual_pair(&mut self) -> (usize, usize) {
        let mut ties = Vec::new();
        let mut back = Vec::new();
        for k in 0..self.undecided.len() {
            let i = self.undecided[k];
            self.index.nearest_ties_of(i, &mut ties);
            for &j in &ties {
                self.index.nearest_ties_of(j, &mut back);
                if back.binary_search(&i).is_ok() {
                    return (i, j);
                }
            }
        }
        unreachable!("the closest undecided pair is always mutually nearest")
    }

    fn finish<R: Rng + ?Sized>(mut self, rng: &mut R) -> Result<SampleResult> {
        if let Some(&i) = self.undecided.first() {
            let u: f64 = rng.random();
            self.p[i] = if u < self.p[i] { 1.0 } else { 0.0 };
            self.retire(i);
        }
        let selected = self
            .p
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| (v == 1.0).then_some(i))
            .collect();
        Ok(SampleResult {
            selected,
            final_probs: self.p,
            steps: self.steps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn square() -> Points {
        Points::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap()
    }

    #[test]
    fn all_ones_is_immediate() {
        let pts = square();
        let probs = InclusionProbabilities::new(vec![1.0; 4]).unwrap();
        for v in [Variant::Lpm1, Variant::Lpm2] {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let s = sample(v, &probs, &pts, &Distance::Euclidean, &mut rng).unwrap();
            assert_eq!(s.selected, vec![0, 1, 2, 3]);
            assert_eq!(s.steps, 0);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let pts = square();
        let probs = InclusionProbabilities::equal(1, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(matches!(
            lpm2(&probs, &pts, &Distance::Euclidean, &mut rng),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(InclusionProbabilities::new(vec![0.5, 1.5]).is_err());
        assert!(InclusionProbabilities::equal(5, 4).is_err());
    }

    #[test]
    fn two_units_give_one() {
        let pts = Points::from_column(&[0.0, 5.0]).unwrap();
        let probs = InclusionProbabilities::new(vec![0.5, 0.5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for v in [Variant::Lpm1, Variant::Lpm2] {
            let s = sample(v, &probs, &pts, &Distance::Euclidean, &mut rng).unwrap();
            assert_eq!(s.len(), 1);
            assert_eq!(s.steps, 1);
        }
    }

    #[test]
    fn lone_remaining_unit_is_decided() {
        let pts = Points::from_column(&[0.0, 1.0, 2.0]).unwrap();
        let probs = InclusionProbabilities::new(vec![0.5, 0.5, 0.25]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let s = lpm2(&probs, &pts, &Distance::Euclidean, &mut rng).unwrap();
            assert!(s.final_probs.iter().all(|&p| p == 0.0 || p == 1.0));
            assert!((1..=2).contains(&s.len()));
        }
    }

    #[test]
    fn custom_distance_runs() {
        let pts = Points::from_column(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let probs = InclusionProbabilities::equal(3, 6).unwrap();
        let d = Distance::custom(|a, b| (a[0] - b[0]).abs().powf(0.5));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for v in [Variant::Lpm1, Variant::Lpm2] {
            let s = sample(v, &probs, &pts, &d, &mut rng).unwrap();
            assert_eq!(s.len(), 3);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let data: Vec<f64> = (0..200).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let pts = Points::new(data, 2).unwrap();
        let probs = InclusionProbabilities::equal(10, 100).unwrap();
        for v in [Variant::Lpm1, Variant::Lpm2] {
            let a = sample(
                v,
                &probs,
                &pts,
                &Distance::Euclidean,
                &mut ChaCha8Rng::seed_from_u64(77),
            )
            .unwrap();
            let b = sample(
                v,
                &probs,
                &pts,
                &Distance::Euclidean,
                &mut ChaCha8Rng::seed_from_u64(77),
            )
            .unwrap();
            assert_eq!(a, b);
        }
    }
}
