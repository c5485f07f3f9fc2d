use crate::error::{Error, Result};

/// Probabilities within this distance of 0 or 1 count as decided and are
/// snapped to the exact bound.
pub const DECIDED_TOLERANCE: f64 = 1e-9;

#[inline]
pub(crate) fn snap(p: f64) -> f64 {
    if p < DECIDED_TOLERANCE {
        0.0
    } else if p > 1.0 - DECIDED_TOLERANCE {
        1.0
    } else {
        p
    }
}

#[inline]
pub(crate) fn is_decided(p: f64) -> bool {
    p == 0.0 || p == 1.0
}

/// Probability of the first branch of the pivotal update for `(pi, pj)`:
/// the branch where `i` gives its mass away (sum below one) or where `i` is
/// included (sum at least one).
#[inline]
pub fn first_branch_probability(pi: f64, pj: f64) -> f64 {
    let s = pi + pj;
    if s < 1.0 {
        pj / s
    } else {
        (1.0 - pj) / (2.0 - s)
    }
}

/// Pivotal update without input validation. `u` is a uniform draw in `[0, 1)`;
/// the first branch is taken when `u` falls below its probability.
#[inline]
pub(crate) fn update_pair(pi: f64, pj: f64, u: f64) -> (f64, f64) {
    let s = pi + pj;
    let first = u < first_branch_probability(pi, pj);
    let (a, b) = if s < 1.0 {
        if first {
            (0.0, s)
        } else {
            (s, 0.0)
        }
    } else if first {
        (1.0, s - 1.0)
    } else {
        (s - 1.0, 1.0)
    };
    (snap(a), snap(b))
}

/// Moves inclusion probability between two undecided units so that at least
/// one of them ends up at exactly 0 or 1, keeping their sum fixed.
///
/// If `pi + pj < 1` the result is `(0, pi + pj)` with probability
/// `pj / (pi + pj)` and `(pi + pj, 0)` otherwise. If `pi + pj >= 1` it is
/// `(1, pi + pj - 1)` with probability `(1 - pj) / (2 - pi - pj)` and
/// `(pi + pj - 1, 1)` otherwise.
///
/// ```
/// use pivotal_sampling::pivotal::pivotal_update;
/// assert_eq!(pivotal_update(0.3, 0.4, 0.5).unwrap(), (0.0, 0.7));
/// assert_eq!(pivotal_update(0.75, 0.5, 0.9).unwrap(), (0.25, 1.0));
/// ```
pub fn pivotal_update(pi: f64, pj: f64, u: f64) -> Result<(f64, f64)> {
    for (index, value) in [(0, pi), (1, pj)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::ProbabilityOutOfRange { index, value });
        }
    }
    if is_decided(pi) || is_decided(pj) {
        return Err(Error::DecidedInput(pi, pj));
    }
    if !(0.0..1.0).contains(&u) {
        return Err(Error::InvalidParameter(format!(
            "uniform draw {u} not in [0, 1)"
        )));
    }
    Ok(update_pair(pi, pj, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sum_below_one() {
        let cut = 4.0 / 7.0;
        assert_eq!(pivotal_update(0.3, 0.4, cut - 1e-9).unwrap(), (0.0, 0.7));
        assert_eq!(pivotal_update(0.3, 0.4, cut + 1e-9).unwrap(), (0.7, 0.0));
    }

    #[test]
    fn sum_above_one() {
        let cut = 3.0 / 7.0;
        let (a, b) = pivotal_update(0.6, 0.7, cut - 1e-9).unwrap();
        assert_eq!(a, 1.0);
        assert!((b - 0.3).abs() < 1e-15);
        let (a, b) = pivotal_update(0.6, 0.7, cut + 1e-9).unwrap();
        assert!((a - 0.3).abs() < 1e-15);
        assert_eq!(b, 1.0);
    }

    #[test]
    fn halves() {
        assert_eq!(first_branch_probability(0.5, 0.5), 0.5);
        assert_eq!(pivotal_update(0.5, 0.5, 0.49).unwrap(), (1.0, 0.0));
        assert_eq!(pivotal_update(0.5, 0.5, 0.5).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            pivotal_update(1.2, 0.4, 0.1),
            Err(Error::ProbabilityOutOfRange { index: 0, .. })
        ));
        assert!(matches!(
            pivotal_update(0.3, -0.1, 0.1),
            Err(Error::ProbabilityOutOfRange { index: 1, .. })
        ));
        assert_eq!(
            pivotal_update(0.0, 0.4, 0.1),
            Err(Error::DecidedInput(0.0, 0.4))
        );
        assert_eq!(
            pivotal_update(0.3, 1.0, 0.1),
            Err(Error::DecidedInput(0.3, 1.0))
        );
    }

    #[test]
    fn martingale() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let m = 100_000;
        let mean = (0..m)
            .map(|_| update_pair(0.3, 0.4, rng.random()).0)
            .sum::<f64>()
            / m as f64;
        // pi' takes 0 or 0.7; its variance is 0.3 * 0.7 - 0.09
        let sd = (0.7 * 0.3 - 0.09_f64).sqrt();
        assert!(
            (mean - 0.3).abs() < 4.0 * sd / (m as f64).sqrt(),
            "mean {mean}"
        );
    }

    proptest! {
        #[test]
        fn mass_is_conserved(pi in 1e-6..1.0 - 1e-6f64, pj in 1e-6..1.0 - 1e-6f64, u in 0.0..1.0f64) {
            // snapping inside the decided band moves mass by at most the tolerance
            prop_assume!((pi + pj - 1.0).abs() > DECIDED_TOLERANCE);
            let (a, b) = pivotal_update(pi, pj, u).unwrap();
            prop_assert!((a + b - pi - pj).abs() <= 1e-12);
            prop_assert!(is_decided(a) || is_decided(b));
            prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        }
    }
}
