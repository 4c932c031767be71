// SPDX-License-Identifier: MIT
//! Row-major data matrix with a missingness mask.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// `n × p` values plus a mask where `true` means observed. Masked cells are
/// stored as NaN and are never returned by the accessors.
#[derive(Debug, Clone)]
pub struct Dataset {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
    mask: Vec<bool>,
    names: Vec<String>,
}

impl Dataset {
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        mut values: Vec<f64>,
        mask: Vec<bool>,
        names: Vec<String>,
    ) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidArgument("dataset needs at least one row and column".into()));
        }
        if values.len() != n_rows * n_cols || mask.len() != values.len() || names.len() != n_cols
        {
            return Err(Error::InvalidArgument(format!(
                "dataset shape mismatch: {n_rows}x{n_cols} with {} values, {} mask cells, {} names",
                values.len(),
                mask.len(),
                names.len()
            )));
        }
        for (v, &m) in values.iter_mut().zip(&mask) {
            if !m {
                *v = f64::NAN;
            } else if !v.is_finite() {
                return Err(Error::InvalidArgument("observed cells must be finite".into()));
            }
        }
        Ok(Dataset { n_rows, n_cols, values, mask, names })
    }

    /// Fully observed data with columns named `X0, X1, ...`.
    pub fn complete(n_rows: usize, n_cols: usize, values: Vec<f64>) -> Result<Self> {
        let names = (0..n_cols).map(|c| format!("X{c}")).collect();
        Dataset::new(n_rows, n_cols, values, vec![true; n_rows * n_cols], names)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    #[inline]
    pub fn is_observed(&self, row: usize, col: usize) -> bool {
        self.mask[row * self.n_cols + col]
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        let k = row * self.n_cols + col;
        self.mask[k].then(|| self.values[k])
    }

    /// Value of an observed cell. Callers must have checked the mask.
    #[inline]
    pub(crate) fn observed_value(&self, row: usize, col: usize) -> f64 {
        debug_assert!(self.is_observed(row, col));
        self.values[row * self.n_cols + col]
    }

    /// Observed values of a column, with their row indices.
    pub fn observed_column(&self, col: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.n_rows).filter_map(move |r| self.get(r, col).map(|v| (r, v)))
    }

    pub fn missing_count(&self, col: usize) -> usize {
        (0..self.n_rows).filter(|&r| !self.is_observed(r, col)).count()
    }

    pub fn has_missing(&self) -> bool {
        self.mask.iter().any(|&m| !m)
    }

    /// Copy with `hidden` cells (row-major, same shape) additionally masked.
    pub fn with_mask(&self, hidden: &[bool]) -> Dataset {
        assert_eq!(hidden.len(), self.mask.len(), "mask shape mismatch");
        let mut out = self.clone();
        for (k, &h) in hidden.iter().enumerate() {
            if h {
                out.mask[k] = false;
                out.values[k] = f64::NAN;
            }
        }
        out
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Dataset {
        let mut values = Vec::with_capacity(self.n_rows * cols.len());
        let mut mask = Vec::with_capacity(self.n_rows * cols.len());
        for r in 0..self.n_rows {
            for &c in cols {
                let k = r * self.n_cols + c;
                values.push(self.values[k]);
                mask.push(self.mask[k]);
            }
        }
        Dataset {
            n_rows: self.n_rows,
            n_cols: cols.len(),
            values,
            mask,
            names: cols.iter().map(|&c| self.names[c].clone()).collect(),
        }
    }

    pub fn rename(&mut self, names: Vec<String>) {
        assert_eq!(names.len(), self.n_cols, "one name per column");
        self.names = names;
    }
}

/// Equal shape, names and mask, and equal values in every observed cell.
impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.n_rows == other.n_rows
            && self.n_cols == other.n_cols
            && self.names == other.names
            && self.mask == other.mask
            && self.values.iter().zip(&other.values).zip(&self.mask).all(|((a, b), &m)| !m || a == b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masked_cells_are_hidden() {
        let d = Dataset::new(2, 2, vec![1.0, 2.0, 3.0, 4.0], vec![true, false, true, true], vec![
            "a".into(),
            "b".into(),
        ])
        .unwrap();
        assert_eq!(d.get(0, 1), None);
        assert_eq!(d.get(1, 1), Some(4.0));
        assert_eq!(d.missing_count(1), 1);
        assert_eq!(d.observed_column(1).collect::<Vec<_>>(), vec![(1, 4.0)]);
        let s = d.select_columns(&[1]);
        assert_eq!(s.n_cols(), 1);
        assert_eq!(s.get(0, 0), None);
        assert_eq!(s.names(), &["b".to_string()]);
    }

    #[test]
    fn shape_errors() {
        assert!(Dataset::complete(0, 1, vec![]).is_err());
        assert!(Dataset::complete(1, 2, vec![1.0]).is_err());
        assert!(Dataset::complete(1, 1, vec![f64::INFINITY]).is_err());
    }
}
