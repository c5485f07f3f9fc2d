use crate::error::{Error, Result};

/// Row-major `N x q` matrix of real coordinates.
///
/// Every entry is finite and both dimensions are at least one.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    data: Vec<f64>,
    dim: usize,
}

impl Points {
    /// Wraps a row-major buffer holding `data.len() / dim` rows.
    pub fn new(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "coordinate dimension must be >= 1".into(),
            ));
        }
        if data.is_empty() {
            return Err(Error::Empty("coordinate matrix"));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch(format!(
                "buffer of length {} is not a multiple of dimension {}",
                data.len(),
                dim
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "coordinate at row {}, column {}",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self { data, dim })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} columns, expected {}",
                    i,
                    r.len(),
                    dim
                )));
            }
            data.extend_from_slice(r);
        }
        if rows.is_empty() {
            return Err(Error::Empty("coordinate matrix"));
        }
        Self::new(data, dim)
    }

    /// One-dimensional population from a slice of scalars.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec(), 1)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + Clone + '_ {
        self.data.iter().skip(j).step_by(self.dim).copied()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// New matrix holding the given rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.len() {
                return Err(Error::InvalidParameter(format!(
                    "row index {} out of range for {} rows",
                    i,
                    self.len()
                )));
            }
            data.extend_from_slice(self.row(i));
        }
        Self::new(data, self.dim)
    }
}
