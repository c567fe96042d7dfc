use faer::sparse::{SparseColMat, Triplet};
use faer::prelude::*;
use faer::Mat;
use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::CsrMatrix;

use crate::error::{Error, Result};
use crate::sparse::{mul_vec, to_dense};

/// Systems up to this size are factorized densely.
const DENSE_LIMIT: usize = 400;
const REFINEMENT_STEPS: usize = 3;

type DenseLu = nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>;

enum Factor {
    Dense(Box<(DenseLu, DenseLu)>),
    Sparse(faer::sparse::linalg::solvers::Lu<usize, f64>),
}

impl Factor {
    fn solve(&self, b: &[f64], transpose: bool) -> Vec<f64> {
        match self {
            Factor::Dense(lus) => {
                let lu = if transpose { &lus.1 } else { &lus.0 };
                lu.solve(&DVector::from_column_slice(b))
                    .map_or_else(|| vec![f64::NAN; b.len()], |x| x.as_slice().to_vec())
            }
            Factor::Sparse(lu) => {
                let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
                let x = if transpose { lu.solve_transpose(&rhs) } else { lu.solve(&rhs) };
                (0..b.len()).map(|i| x[(i, 0)]).collect()
            }
        }
    }
}

fn factorize(a: &CsrMatrix<f64>) -> Option<Factor> {
    let n = a.nrows();
    if n <= DENSE_LIMIT {
        let d = to_dense(a);
        let lu = d.clone().lu();
        if !lu.is_invertible() {
            return None;
        }
        return Some(Factor::Dense(Box::new((lu, d.transpose().lu()))));
    }
    let triplets: Vec<Triplet<usize, usize, f64>> = a.triplet_iter().map(|(i, j, v)| Triplet::new(i, j, *v)).collect();
    let m = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets).ok()?;
    m.sp_lu().ok().map(Factor::Sparse)
}

fn norm1(a: &CsrMatrix<f64>) -> f64 {
    let mut col = vec![0.0; a.ncols()];
    for (_, j, v) in a.triplet_iter() {
        col[j] += v.abs();
    }
    col.into_iter().fold(0.0, f64::max)
}

/// Hager's estimate of `‖A⁻¹‖₁`.
fn inverse_norm1_estimate(f: &Factor, n: usize) -> f64 {
    let mut x = vec![1.0 / n as f64; n];
    let mut est = 0.0;
    for _ in 0..5 {
        let y = f.solve(&x, false);
        if y.iter().any(|v| !v.is_finite()) {
            return f64::INFINITY;
        }
        let new_est: f64 = y.iter().map(|v| v.abs()).sum();
        let xi: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
        let z = f.solve(&xi, true);
        if z.iter().any(|v| !v.is_finite()) {
            return f64::INFINITY;
        }
        let (jmax, zmax) =
            z.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (j, v)| if v.abs() > acc.1 { (j, v.abs()) } else { acc });
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        if new_est <= est || zmax <= ztx {
            return new_est.max(est);
        }
        est = new_est;
        x = vec![0.0; n];
        x[jmax] = 1.0;
    }
    est
}

/// One-norm condition estimate `‖A‖₁ ‖A⁻¹‖₁` (infinite for singular matrices).
pub fn condition_estimate(a: &CsrMatrix<f64>) -> f64 {
    match factorize(a) {
        Some(f) => norm1(a) * inverse_norm1_estimate(&f, a.nrows()),
        None => f64::INFINITY,
    }
}

/// Solves `A x = b` by LU (dense for small systems, sparse otherwise) with iterative
/// refinement; fails unless `‖Ax − b‖₂ ≤ lin_tol ‖b‖₂`.
pub fn solve_linear(a: &CsrMatrix<f64>, b: &[f64], lin_tol: f64) -> Result<Vec<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::Dimension(format!("{}×{} matrix with right-hand side of length {}", n, a.ncols(), b.len())));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let bnorm = DVector::from_column_slice(b).norm();
    let singular = |f: Option<&Factor>| Error::Singular {
        condition: f.map_or(f64::INFINITY, |f| norm1(a) * inverse_norm1_estimate(f, n)),
    };
    let f = factorize(a).ok_or_else(|| singular(None))?;
    let mut x = f.solve(b, false);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(singular(Some(&f)));
    }
    for _ in 0..=REFINEMENT_STEPS {
        let ax = mul_vec(a, &x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, ax)| b - ax).collect();
        let rnorm = DVector::from_column_slice(&r).norm();
        if rnorm <= lin_tol * bnorm {
            return Ok(x);
        }
        let dx = f.solve(&r, false);
        if dx.iter().any(|v| !v.is_finite()) {
            break;
        }
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
    }
    let ax = mul_vec(a, &x);
    let rnorm = b.iter().zip(&ax).map(|(b, ax)| (b - ax).powi(2)).sum::<f64>().sqrt();
    if rnorm <= lin_tol * bnorm {
        return Ok(x);
    }
    Err(singular(Some(&f)))
}

/// Dense convenience wrapper used for small internal systems.
pub fn solve_dense(a: &DMatrix<f64>, b: &[f64], lin_tol: f64) -> Result<Vec<f64>> {
    solve_linear(&crate::sparse::from_dense(a), b, lin_tol)
}
