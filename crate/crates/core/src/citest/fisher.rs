// SPDX-License-Identifier: MIT
//! Fisher's z test for vanishing partial correlation.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::data::Dataset;
use crate::error::{Error, Result};

const CLAMP: f64 = 1.0 - 1e-12;
const MAX_CONDITION: f64 = 1e12;

/// Rows observed on every variable in `vars`, ascending.
pub fn testwise_rows(data: &Dataset, vars: &[usize]) -> Vec<usize> {
    (0..data.n_rows()).filter(|&r| vars.iter().all(|&c| data.is_observed(r, c))).collect()
}

/// Rows without any missing cell.
pub fn listwise_rows(data: &Dataset) -> Vec<usize> {
    let all: Vec<usize> = (0..data.n_cols()).collect();
    testwise_rows(data, &all)
}

/// Unbiased sample covariance of `vars` over `rows` (which must be observed
/// on every listed variable). Indexed by position in `vars`.
pub fn covariance(data: &Dataset, rows: &[usize], vars: &[usize]) -> DMatrix<f64> {
    let k = vars.len();
    let n = rows.len();
    let mut mean = alloc::vec![0.0; k];
    for &r in rows {
        for (m, &c) in mean.iter_mut().zip(vars) {
            *m += data.observed_value(r, c);
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut cov = DMatrix::<f64>::zeros(k, k);
    let mut centered = alloc::vec![0.0; k];
    for &r in rows {
        for ((x, &c), m) in centered.iter_mut().zip(vars).zip(&mean) {
            *x = data.observed_value(r, c) - m;
        }
        for a in 0..k {
            for b in a..k {
                cov[(a, b)] += centered[a] * centered[b];
            }
        }
    }
    let denom = (n.max(2) - 1) as f64;
    for a in 0..k {
        for b in a..k {
            let v = cov[(a, b)] / denom;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    cov
}

/// Partial correlation of variables `i` and `j` given `w`, all indices into
/// the square matrix `cov`. Uses the inverse of the `{i,j} ∪ w` submatrix and
/// a pseudo-inverse when its condition number exceeds `1e12`. Degenerate
/// inputs (zero variance) give 0.
pub fn partial_correlation(cov: &DMatrix<f64>, i: usize, j: usize, w: &[usize]) -> f64 {
    let r = if w.is_empty() {
        cov[(i, j)] / libm::sqrt(cov[(i, i)] * cov[(j, j)])
    } else {
        let idx: Vec<usize> = [i, j].into_iter().chain(w.iter().copied()).collect();
        let sub = DMatrix::from_fn(idx.len(), idx.len(), |a, b| cov[(idx[a], idx[b])]);
        let precision = precision_matrix(sub);
        -precision[(0, 1)] / libm::sqrt(precision[(0, 0)] * precision[(1, 1)])
    };
    if r.is_nan() {
        0.0
    } else {
        r.clamp(-CLAMP, CLAMP)
    }
}

fn precision_matrix(sub: DMatrix<f64>) -> DMatrix<f64> {
    let eig = sub.clone().symmetric_eigen();
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e.abs()), hi.max(e.abs())));
    if lo > 0.0 && hi / lo <= MAX_CONDITION {
        if let Some(inv) = sub.clone().try_inverse() {
            return inv;
        }
    }
    sub.pseudo_inverse(1e-12 * hi.max(f64::MIN_POSITIVE)).unwrap_or_else(|_| DMatrix::zeros(0, 0))
}

/// Two-sided standard-normal tail probability of `|stat|`.
pub fn normal_two_sided(stat: f64) -> f64 {
    libm::erfc(stat.abs() / core::f64::consts::SQRT_2).min(1.0)
}

/// Outcome of a Fisher z test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherZ {
    pub r: f64,
    pub p_value: f64,
    pub independent: bool,
}

/// Tests `i ⊥ j | w` from covariance `cov` estimated on `effective_n` rows.
/// Requires `effective_n > |w| + 3`.
pub fn fisher_z(
    cov: &DMatrix<f64>,
    effective_n: usize,
    i: usize,
    j: usize,
    w: &[usize],
    alpha: f64,
) -> Result<FisherZ> {
    let dof = effective_n as i64 - w.len() as i64 - 3;
    if dof <= 0 {
        return Err(Error::InvalidArgument(format!(
            "{effective_n} rows are too few for a test with {} conditioning variables",
            w.len()
        )));
    }
    let r = partial_correlation(cov, i, j, w);
    let z = 0.5 * libm::log((1.0 + r) / (1.0 - r));
    let p_value = normal_two_sided(libm::sqrt(dof as f64) * z);
    Ok(FisherZ { r, p_value, independent: p_value >= alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn tail_probability() {
        assert!((normal_two_sided(1.959963984540054) - 0.05).abs() < 1e-12);
        assert_eq!(normal_two_sided(0.0), 1.0);
    }

    #[test]
    fn identical_columns_are_dependent() {
        let cov = DMatrix::from_row_slice(2, 2, &[2.0, 2.0, 2.0, 2.0]);
        let t = fisher_z(&cov, 100, 0, 1, &[], 0.01).unwrap();
        assert!(t.r > 0.999);
        assert!(!t.independent);
    }

    #[test]
    fn too_few_rows() {
        let cov = DMatrix::identity(3, 3);
        assert!(fisher_z(&cov, 4, 0, 1, &[2], 0.01).is_err());
        assert!(fisher_z(&cov, 5, 0, 1, &[2], 0.01).is_ok());
    }

    #[test]
    fn singular_submatrix_falls_back() {
        // third variable duplicates the first
        let cov = DMatrix::from_row_slice(3, 3, &[1.0, 0.5, 1.0, 0.5, 1.0, 0.5, 1.0, 0.5, 1.0]);
        let r = partial_correlation(&cov, 0, 1, &[2]);
        assert!(r.is_finite() && r.abs() <= CLAMP);
    }

    #[test]
    fn rows_and_covariance() {
        let d = Dataset::new(
            3,
            2,
            vec![1.0, 2.0, 3.0, 0.0, 5.0, 6.0],
            vec![true, true, true, false, true, true],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        assert_eq!(testwise_rows(&d, &[0]), vec![0, 1, 2]);
        assert_eq!(listwise_rows(&d), vec![0, 2]);
        let c = covariance(&d, &[0, 2], &[0, 1]);
        assert!((c[(0, 0)] - 8.0).abs() < 1e-12);
        assert!((c[(0, 1)] - 8.0).abs() < 1e-12);
    }
}
