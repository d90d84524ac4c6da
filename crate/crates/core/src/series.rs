//! T×N panels of nodal observations with explicit missing cells.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::network::default_names;

/// Rows are time points, columns are nodes. `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMatrix {
    names: Vec<String>,
    n_times: usize,
    values: Vec<Option<f64>>,
}

impl SeriesMatrix {
    pub fn new(names: Vec<String>, rows: Vec<Vec<Option<f64>>>) -> Result<Self> {
        let n = names.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "row {} has {} values for {} nodes",
                bad + 1,
                rows[bad].len(),
                n
            )));
        }
        if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("series value"));
        }
        let n_times = rows.len();
        Ok(SeriesMatrix { names, n_times, values: rows.into_iter().flatten().collect() })
    }

    /// Fully observed panel from a T×N matrix.
    pub fn from_matrix(names: Vec<String>, m: &Matrix) -> Result<Self> {
        if names.len() != m.cols() {
            return Err(Error::DimensionMismatch(format!("{} names for {} columns", names.len(), m.cols())));
        }
        Ok(SeriesMatrix { names, n_times: m.rows(), values: m.as_slice().iter().map(|&x| Some(x)).collect() })
    }

    /// Panel with nodes named `1..=n`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        Self::new(default_names(n), rows.into_iter().map(|r| r.into_iter().map(Some).collect()).collect())
    }

    /// All cells missing.
    pub fn empty_like(names: Vec<String>, n_times: usize) -> Self {
        let n = names.len();
        SeriesMatrix { names, n_times, values: vec![None; n_times * n] }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_times(&self) -> usize {
        self.n_times
    }

    pub fn n_nodes(&self) -> usize {
        self.names.len()
    }

    #[inline]
    pub fn get(&self, t: usize, i: usize) -> Option<f64> {
        self.values[t * self.n_nodes() + i]
    }

    #[inline]
    pub fn set(&mut self, t: usize, i: usize, v: Option<f64>) {
        let n = self.n_nodes();
        self.values[t * n + i] = v;
    }

    pub fn row(&self, t: usize) -> &[Option<f64>] {
        let n = self.n_nodes();
        &self.values[t * n..(t + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Option<f64>]> {
        (0..self.n_times).map(move |t| self.row(t))
    }

    pub fn column(&self, i: usize) -> Vec<Option<f64>> {
        (0..self.n_times).map(|t| self.get(t, i)).collect()
    }

    pub fn observed(&self, t: usize) -> Vec<bool> {
        self.row(t).iter().map(Option::is_some).collect()
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().any(Option::is_none)
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// Rows `start..end` (zero-based, end exclusive).
    pub fn slice_rows(&self, start: usize, end: usize) -> Result<Self> {
        if start > end || end > self.n_times {
            return Err(Error::InvalidArgument(format!(
                "row range {start}..{end} outside 0..{}",
                self.n_times
            )));
        }
        let n = self.n_nodes();
        Ok(SeriesMatrix {
            names: self.names.clone(),
            n_times: end - start,
            values: self.values[start * n..end * n].to_vec(),
        })
    }

    /// Dense matrix; fails if any cell is missing.
    pub fn to_matrix(&self) -> Result<Matrix> {
        let data = self
            .values
            .iter()
            .map(|v| v.ok_or_else(|| Error::InvalidArgument("series has missing values".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_vec(self.n_times, self.n_nodes(), data))
    }

    /// Applies `f` to every observed cell.
    pub fn map(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Self {
        let n = self.n_nodes();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| v.map(|x| f(k / n, k % n, x)))
            .collect();
        SeriesMatrix { names: self.names.clone(), n_times: self.n_times, values }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_nodes() {
            return Err(Error::DimensionMismatch("name count differs from node count".into()));
        }
        self.names = names;
        Ok(self)
    }

    /// Appends rows below this panel.
    pub fn append_rows(&mut self, rows: &[Vec<Option<f64>>]) -> Result<()> {
        for r in rows {
            if r.len() != self.n_nodes() {
                return Err(Error::DimensionMismatch("appended row length".into()));
            }
            self.values.extend_from_slice(r);
            self.n_times += 1;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construct_and_index() {
        let mut s = SeriesMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        assert_eq!((s.n_times(), s.n_nodes()), (3, 2));
        assert_eq!(s.get(1, 1), Some(4.0));
        s.set(2, 0, None);
        assert!(s.has_missing());
        assert_eq!(s.observed(2), vec![false, true]);
        assert_eq!(s.column(0), vec![Some(1.0), Some(3.0), None]);
        assert!(s.to_matrix().is_err());
        let head = s.slice_rows(0, 2).unwrap();
        assert_eq!(head.to_matrix().unwrap().row(1), &[3.0, 4.0]);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(SeriesMatrix::new(default_names(2), vec![vec![Some(1.0)]]).is_err());
        assert!(SeriesMatrix::new(default_names(1), vec![vec![Some(f64::NAN)]]).is_err());
    }
}
