//! Discretization of continuous distributions into finite populations.
//!
//! A continuous target is replaced by `N` iid draws, which LPM then thins to
//! a well-spread sample. Under importance sampling the draws come from a
//! proposal and every point carries the density ratio `f / g` as a weight.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::sync::Arc;

use rand::distr::Open01;
use rand::Rng;
use serde::Serialize;
use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};
use crate::points::Points;

type Transform = dyn Fn(&[f64], &mut [f64]) + Send + Sync;
type LogDensity = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Name recorded for the uniform-to-normal transform.
pub const NORMAL_TRANSFORM: &str = "inverse-cdf";

/// A continuous distribution on `R^q` with independent coordinates, or a
/// caller-supplied transform of `q` open-interval uniforms.
#[derive(Clone)]
pub enum DistributionSpec {
    Uniform {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Normal {
        mean: Vec<f64>,
        sd: Vec<f64>,
    },
    Custom {
        dim: usize,
        transform: Arc<Transform>,
        log_density: Option<Arc<LogDensity>>,
    },
}

impl fmt::Debug for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform { lower, upper } => f
                .debug_struct("Uniform")
                .field("lower", lower)
                .field("upper", upper)
                .finish(),
            Self::Normal { mean, sd } => f
                .debug_struct("Normal")
                .field("mean", mean)
                .field("sd", sd)
                .finish(),
            Self::Custom { dim, .. } => f.debug_struct("Custom").field("dim", dim).finish(),
        }
    }
}

/// Standard normal quantile.
#[inline]
pub fn normal_quantile(u: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * u)
}

impl DistributionSpec {
    pub fn uniform(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let spec = Self::Uniform { lower, upper };
        spec.validate()?;
        Ok(spec)
    }

    /// Uniform on the unit cube `(0, 1)^q`.
    pub fn unit_cube(dim: usize) -> Self {
        Self::Uniform {
            lower: vec![0.0; dim],
            upper: vec![1.0; dim],
        }
    }

    pub fn normal(mean: Vec<f64>, sd: Vec<f64>) -> Result<Self> {
        let spec = Self::Normal { mean, sd };
        spec.validate()?;
        Ok(spec)
    }

    pub fn standard_normal(dim: usize) -> Self {
        Self::Normal {
            mean: vec![0.0; dim],
            sd: vec![1.0; dim],
        }
    }

    /// Distribution defined by mapping `dim` uniforms on `(0, 1)` to a point.
    pub fn custom<F>(dim: usize, transform: F) -> Self
    where
        F: Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    {
        Self::Custom {
            dim,
            transform: Arc::new(transform),
            log_density: None,
        }
    }

    /// Attaches a log-density to a custom distribution so it can serve in
    /// importance sampling.
    pub fn with_log_density<F>(self, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        match self {
            Self::Custom { dim, transform, .. } => Self::Custom {
                dim,
                transform,
                log_density: Some(Arc::new(f)),
            },
            other => other,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Uniform { lower, .. } => lower.len(),
            Self::Normal { mean, .. } => mean.len(),
            Self::Custom { dim, .. } => *dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Uniform { lower, upper } => {
                if lower.len() != upper.len() {
                    return Err(Error::DimensionMismatch(
                        "uniform bounds differ in length".into(),
                    ));
                }
                if lower.is_empty() {
                    return Err(Error::InvalidParameter("dimension must be >= 1".into()));
                }
                for (k, (a, b)) in lower.iter().zip(upper).enumerate() {
                    if !(a.is_finite() && b.is_finite() && a < b) {
                        return Err(Error::InvalidParameter(format!(
                            "uniform bounds ({a}, {b}) invalid in dimension {k}"
                        )));
                    }
                }
            }
            Self::Normal { mean, sd } => {
                if mean.len() != sd.len() {
                    return Err(Error::DimensionMismatch(
                        "normal mean and sd differ in length".into(),
                    ));
                }
                if mean.is_empty() {
                    return Err(Error::InvalidParameter("dimension must be >= 1".into()));
                }
                for (k, (m, s)) in mean.iter().zip(sd).enumerate() {
                    if !(m.is_finite() && s.is_finite() && *s > 0.0) {
                        return Err(Error::InvalidParameter(format!(
                            "normal parameters (mean {m}, sd {s}) invalid in dimension {k}"
                        )));
                    }
                }
            }
            Self::Custom { dim, .. } => {
                if *dim == 0 {
                    return Err(Error::InvalidParameter("dimension must be >= 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Maps one vector of `(0, 1)` uniforms to a point.
    #[inline]
    pub fn transform(&self, u: &[f64], out: &mut [f64]) {
        match self {
            Self::Uniform { lower, upper } => {
                for k in 0..out.len() {
                    out[k] = lower[k] + (upper[k] - lower[k]) * u[k];
                }
            }
            Self::Normal { mean, sd } => {
                for k in 0..out.len() {
                    out[k] = mean[k] + sd[k] * normal_quantile(u[k]);
                }
            }
            Self::Custom { transform, .. } => transform(u, out),
        }
    }

    /// Log-density at `x`, if known.
    pub fn log_density(&self, x: &[f64]) -> Option<f64> {
        match self {
            Self::Uniform { lower, upper } => {
                let mut acc = 0.0;
                for k in 0..x.len() {
                    if x[k] < lower[k] || x[k] > upper[k] {
                        return Some(f64::NEG_INFINITY);
                    }
                    acc -= (upper[k] - lower[k]).ln();
                }
                Some(acc)
            }
            Self::Normal { mean, sd } => Some(
                x.iter()
                    .zip(mean.iter().zip(sd))
                    .map(|(&v, (&m, &s))| {
                        let z = (v - m) / s;
                        -0.5 * z * z - s.ln() - 0.5 * (2.0 * PI).ln()
                    })
                    .sum(),
            ),
            Self::Custom { log_density, .. } => log_density.as_ref().map(|f| f(x)),
        }
    }

    /// Draws `count` points into a row-major buffer.
    pub fn draw<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        let q = self.dim();
        let mut data = vec![0.0; count * q];
        let mut u = vec![0.0; q];
        for row in data.chunks_exact_mut(q) {
            for v in u.iter_mut() {
                *v = rng.sample(Open01);
            }
            self.transform(&u, row);
        }
        data
    }
}

/// Importance sampling setup: draws come from `proposal`, weights are
/// `exp(log f - log g)` with `f` the target density.
///
/// The proposal must be positive wherever the integrand times `f` is nonzero;
/// that is the caller's responsibility.
#[derive(Debug, Clone)]
pub struct ISSpec {
    pub target: DistributionSpec,
    pub proposal: DistributionSpec,
}

impl ISSpec {
    pub fn new(target: DistributionSpec, proposal: DistributionSpec) -> Result<Self> {
        target.validate()?;
        proposal.validate()?;
        if target.dim() != proposal.dim() {
            return Err(Error::DimensionMismatch(format!(
                "target has dimension {}, proposal {}",
                target.dim(),
                proposal.dim()
            )));
        }
        let x = vec![0.5; target.dim()];
        if target.log_density(&x).is_none() || proposal.log_density(&x).is_none() {
            return Err(Error::InvalidParameter(
                "importance sampling needs log-densities for target and proposal".into(),
            ));
        }
        Ok(Self { target, proposal })
    }

    /// Likelihood ratio `f(x) / g(x)`.
    pub fn weight(&self, x: &[f64]) -> f64 {
        let f = self.target.log_density(x).unwrap_or(f64::NAN);
        let g = self.proposal.log_density(x).unwrap_or(f64::NAN);
        (f - g).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeedRecord {
    pub seed: Option<u64>,
    pub normal_transform: &'static str,
}

/// `N` iid points with per-point weights (all 1 without importance sampling).
#[derive(Debug, Clone)]
pub struct DiscretizedPopulation {
    pub coords: Points,
    pub weights: Vec<f64>,
    pub seed: SeedRecord,
}

impl DiscretizedPopulation {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Records the seed the generator was created from.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed.seed = Some(seed);
        self
    }

    /// CSV with header `x0,..,x{q-1},weight`, one row per point.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let q = self.coords.dim();
        let mut header: Vec<String> = (0..q).map(|k| format!("x{k}")).collect();
        header.push("weight".into());
        w.write_record(&header)?;
        let mut record = Vec::with_capacity(q + 1);
        for (row, wt) in self.coords.rows().zip(&self.weights) {
            record.clear();
            record.extend(row.iter().map(|v| format!("{v:?}")));
            record.push(format!("{wt:?}"));
            w.write_record(&record)?;
        }
        w.flush()
    }
}

/// Draws `count` iid points from `dist`, all with weight 1.
pub fn discretize<R: Rng + ?Sized>(
    dist: &DistributionSpec,
    count: usize,
    rng: &mut R,
) -> Result<DiscretizedPopulation> {
    dist.validate()?;
    if count == 0 {
        return Err(Error::InvalidParameter("N must be >= 1".into()));
    }
    let coords = Points::new(dist.draw(count, rng), dist.dim())?;
    Ok(DiscretizedPopulation {
        coords,
        weights: vec![1.0; count],
        seed: SeedRecord {
            seed: None,
            normal_transform: NORMAL_TRANSFORM,
        },
    })
}

/// Draws `count` iid points from the proposal and weights each by `f / g`.
pub fn discretize_is<R: Rng + ?Sized>(
    spec: &ISSpec,
    count: usize,
    rng: &mut R,
) -> Result<DiscretizedPopulation> {
    let mut pop = discretize(&spec.proposal, count, rng)?;
    for (i, (row, w)) in pop.coords.rows().zip(pop.weights.iter_mut()).enumerate() {
        *w = spec.weight(row);
        if !w.is_finite() {
            return Err(Error::NonFinite(format!("importance weight at point {i}")));
        }
    }
    Ok(pop)
}

/// Result of [`standardize`].
#[derive(Debug, Clone)]
pub struct Standardized {
    pub coords: Points,
    /// Columns with zero sample variance, left unscaled.
    pub constant_columns: Vec<usize>,
}

/// Divides each column by its sample standard deviation. Columns are not
/// centred.
pub fn standardize(coords: &Points) -> Result<Standardized> {
    let n = coords.len();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "standardize needs at least two rows".into(),
        ));
    }
    let q = coords.dim();
    let mut scale = vec![1.0; q];
    let mut constant_columns = Vec::new();
    for (k, s) in scale.iter_mut().enumerate() {
        let mean = coords.column(k).sum::<f64>() / n as f64;
        let var = coords.column(k).map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        if var > 0.0 {
            *s = var.sqrt();
        } else {
            constant_columns.push(k);
        }
    }
    let data = coords
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, v)| v / scale[i % q])
        .collect();
    Ok(Standardized {
        coords: Points::new(data, q)?,
        constant_columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn mean_sd(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
        let n = xs.clone().count() as f64;
        let m = xs.clone().sum::<f64>() / n;
        let v = xs.map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, v.sqrt())
    }

    #[test]
    fn uniform_mean() {
        let pop = discretize(&DistributionSpec::unit_cube(1), 10_000, &mut seeded(1)).unwrap();
        let (m, _) = mean_sd(pop.coords.column(0));
        assert!((m - 0.5).abs() < 4.0 / (12.0f64 * 1e4).sqrt());
        assert!(pop.weights.iter().all(|&w| w == 1.0));
    }

    #[test]
    fn normal_sd() {
        let pop = discretize(
            &DistributionSpec::standard_normal(1),
            10_000,
            &mut seeded(2),
        )
        .unwrap();
        let (_, sd) = mean_sd(pop.coords.column(0));
        assert!((sd - 1.0).abs() < 0.05);
    }

    #[test]
    fn shape() {
        let pop = discretize(&DistributionSpec::standard_normal(4), 100, &mut seeded(3)).unwrap();
        assert_eq!(pop.coords.len(), 100);
        assert_eq!(pop.coords.dim(), 4);
    }

    #[test]
    fn invalid_specs() {
        assert!(DistributionSpec::normal(vec![0.0], vec![0.0]).is_err());
        assert!(DistributionSpec::uniform(vec![1.0], vec![1.0]).is_err());
        assert!(discretize(&DistributionSpec::unit_cube(1), 0, &mut seeded(1)).is_err());
    }

    #[test]
    fn identical_measures_weigh_one() {
        let n = DistributionSpec::standard_normal(2);
        let spec = ISSpec::new(n.clone(), n).unwrap();
        let pop = discretize_is(&spec, 500, &mut seeded(4)).unwrap();
        assert!(pop.weights.iter().all(|&w| (w - 1.0).abs() < 1e-12));
    }

    #[test]
    fn shifted_gaussian_ratio() {
        let spec = ISSpec::new(
            DistributionSpec::standard_normal(1),
            DistributionSpec::normal(vec![3.0], vec![1.0]).unwrap(),
        )
        .unwrap();
        assert!((spec.weight(&[3.0]) - (-4.5f64).exp()).abs() < 1e-15);
        assert!((spec.weight(&[1.5]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_finite_weight_is_an_error() {
        // target support is narrower than proposal: weight 0 is fine, but a
        // proposal with zero density at a drawn point gives infinity
        let target = DistributionSpec::standard_normal(1);
        let proposal =
            DistributionSpec::custom(1, |u, x| x[0] = u[0]).with_log_density(|_| f64::NEG_INFINITY);
        let spec = ISSpec::new(target, proposal).unwrap();
        assert!(matches!(
            discretize_is(&spec, 10, &mut seeded(5)),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn importance_identity() {
        let spec = ISSpec::new(
            DistributionSpec::standard_normal(1),
            DistributionSpec::normal(vec![3.0], vec![1.0]).unwrap(),
        )
        .unwrap();
        let n = 100_000;
        let pop = discretize_is(&spec, n, &mut seeded(6)).unwrap();
        let terms: Vec<f64> = pop
            .coords
            .rows()
            .zip(&pop.weights)
            .map(|(x, w)| if x[0] > 0.0 { *w } else { 0.0 })
            .collect();
        let (m, sd) = mean_sd(terms.iter().copied());
        assert!((m - 0.5).abs() < 4.0 * sd / (n as f64).sqrt(), "mean {m}");
    }

    #[test]
    fn standardize_cases() {
        let pts = Points::from_rows(&[[1.0, 0.0], [1.0, 2.0], [1.0, 4.0]]).unwrap();
        let s = standardize(&pts).unwrap();
        assert_eq!(s.constant_columns, vec![0]);
        assert_eq!(s.coords.column(0).collect::<Vec<_>>(), vec![1.0, 1.0, 1.0]);
        let (_, sd) = mean_sd(s.coords.column(1));
        assert!((sd - 1.0).abs() < 1e-12);
        let again = standardize(&s.coords).unwrap();
        for (a, b) in again.coords.as_slice().iter().zip(s.coords.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(standardize(&Points::from_column(&[1.0]).unwrap()).is_err());
    }

    #[test]
    fn csv_layout() {
        let pop = discretize(&DistributionSpec::unit_cube(2), 3, &mut seeded(7)).unwrap();
        let mut buf = Vec::new();
        pop.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x0,x1,weight");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].ends_with(",1.0"));
    }
}
