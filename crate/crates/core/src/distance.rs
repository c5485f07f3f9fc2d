use std::fmt;
use std::sync::Arc;

type DistanceFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

/// Distance used to decide which units are neighbours.
///
/// The three built-in metrics support k-d tree pruning. A custom metric may be
/// any function with `d(a, a) = 0` and `d(a, b) >= 0`; neighbour searches then
/// fall back to a linear scan.
#[derive(Clone, Default)]
pub enum Distance {
    #[default]
    Euclidean,
    Cityblock,
    Chebyshev,
    Custom(Arc<DistanceFn>),
}

impl Distance {
    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        Distance::Custom(Arc::new(f))
    }

    /// Parses `euclidean`, `cityblock` or `chebyshev` (also `chebychev`).
    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "euclidean" => Some(Distance::Euclidean),
            "cityblock" | "manhattan" => Some(Distance::Cityblock),
            "chebyshev" | "chebychev" => Some(Distance::Chebyshev),
            _ => None,
        }
    }

    pub fn supports_tree(&self) -> bool {
        !matches!(self, Distance::Custom(_))
    }

    /// Order-preserving surrogate of the distance, used for all comparisons.
    ///
    /// For the Euclidean metric this is the squared distance; the other metrics
    /// return the distance itself.
    #[inline]
    pub fn reduced(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Distance::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| {
                    let d = x - y;
                    d * d
                })
                .sum(),
            Distance::Cityblock => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Distance::Chebyshev => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
            Distance::Custom(f) => f(a, b),
        }
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Distance::Euclidean => self.reduced(a, b).sqrt(),
            _ => self.reduced(a, b),
        }
    }

    /// Lower bound on the reduced distance from `p` to any point in the
    /// axis-aligned box `[lo, hi]`. Only meaningful for built-in metrics.
    #[inline]
    pub(crate) fn reduced_box_bound(&self, p: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
        let gaps = p.iter().zip(lo.iter().zip(hi)).map(|(&x, (&l, &h))| {
            if x < l {
                l - x
            } else if x > h {
                x - h
            } else {
                0.0
            }
        });
        match self {
            Distance::Euclidean => gaps.map(|g| g * g).sum(),
            Distance::Cityblock => gaps.sum(),
            Distance::Chebyshev => gaps.fold(0.0, f64::max),
            Distance::Custom(_) => 0.0,
        }
    }
}

impl fmt::Debug for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Euclidean => f.write_str("Euclidean"),
            Distance::Cityblock => f.write_str("Cityblock"),
            Distance::Chebyshev => f.write_str("Chebyshev"),
            Distance::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_metrics() {
        let a = [0.0, 0.0];
        let b = [3.0, -4.0];
        assert_eq!(Distance::Euclidean.distance(&a, &b), 5.0);
        assert_eq!(Distance::Cityblock.distance(&a, &b), 7.0);
        assert_eq!(Distance::Chebyshev.distance(&a, &b), 4.0);
        for d in [
            Distance::Euclidean,
            Distance::Cityblock,
            Distance::Chebyshev,
        ] {
            assert_eq!(d.distance(&b, &b), 0.0);
        }
    }

    #[test]
    fn names() {
        assert!(matches!(
            Distance::from_name("Chebychev"),
            Some(Distance::Chebyshev)
        ));
        assert!(Distance::from_name("mahalanobis").is_none());
    }

    #[test]
    fn box_bound_is_a_lower_bound() {
        let lo = [0.0, 0.0];
        let hi = [1.0, 1.0];
        let p = [2.0, -1.0];
        for d in [
            Distance::Euclidean,
            Distance::Cityblock,
            Distance::Chebyshev,
        ] {
            let bound = d.reduced_box_bound(&p, &lo, &hi);
            for corner in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, 0.5]] {
                assert!(bound <= d.reduced(&p, &corner));
            }
        }
    }
}
