//! Sparse-matrix helpers and the plain-text dump format
//! (`%%rdfem-sparse 1`, `rows cols nnz`, then 0-based `i j value` lines).

use std::fmt::Write;

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::error::{Error, Result};

pub const SPARSE_HEADER: &str = "%%rdfem-sparse 1";

/// Builds a CSR matrix from triplets; duplicate entries are summed in insertion order.
pub fn csr_from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> CsrMatrix<f64> {
    let mut coo = CooMatrix::new(rows, cols);
    for &(i, j, v) in triplets {
        coo.push(i, j, v);
    }
    CsrMatrix::from(&coo)
}

pub fn to_dense(a: &CsrMatrix<f64>) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(a.nrows(), a.ncols());
    for (i, j, v) in a.triplet_iter() {
        d[(i, j)] += *v;
    }
    d
}

pub fn from_dense(a: &DMatrix<f64>) -> CsrMatrix<f64> {
    let mut t = Vec::new();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if a[(i, j)] != 0.0 {
                t.push((i, j, a[(i, j)]));
            }
        }
    }
    csr_from_triplets(a.nrows(), a.ncols(), &t)
}

/// `y = A x`.
pub fn mul_vec(a: &CsrMatrix<f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(a.ncols(), x.len(), "dimension mismatch in sparse product");
    a.row_iter().map(|row| row.col_indices().iter().zip(row.values()).map(|(&j, v)| v * x[j]).sum()).collect()
}

/// `y = Aᵀ x`.
pub fn mul_transpose_vec(a: &CsrMatrix<f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(a.nrows(), x.len(), "dimension mismatch in sparse product");
    let mut y = vec![0.0; a.ncols()];
    for (i, row) in a.row_iter().enumerate() {
        for (&j, v) in row.col_indices().iter().zip(row.values()) {
            y[j] += v * x[i];
        }
    }
    y
}

pub fn norm2(x: &[f64]) -> f64 {
    DVector::from_column_slice(x).norm()
}

/// Entry lookup (zero when structurally absent).
pub fn get(a: &CsrMatrix<f64>, i: usize, j: usize) -> f64 {
    let row = a.row(i);
    match row.col_indices().binary_search(&j) {
        Ok(k) => row.values()[k],
        Err(_) => 0.0,
    }
}

pub fn is_symmetric(a: &CsrMatrix<f64>, tol: f64) -> bool {
    a.nrows() == a.ncols() && a.triplet_iter().all(|(i, j, v)| (v - get(a, j, i)).abs() <= tol)
}

pub fn write_sparse(a: &CsrMatrix<f64>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{SPARSE_HEADER}");
    let _ = writeln!(s, "{} {} {}", a.nrows(), a.ncols(), a.nnz());
    for (i, j, v) in a.triplet_iter() {
        let _ = writeln!(s, "{i} {j} {v:e}");
    }
    s
}

pub fn read_sparse(text: &str) -> Result<CsrMatrix<f64>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let perr = |line, msg: String| Error::Parse { line, msg };
    match lines.next() {
        Some((_, h)) if h == SPARSE_HEADER => {}
        Some((line, _)) => return Err(perr(line, format!("expected `{SPARSE_HEADER}`"))),
        None => return Err(perr(1, "empty sparse dump".into())),
    }
    let (line, dims) = lines.next().ok_or_else(|| perr(2, "missing size line".into()))?;
    let dims: Vec<usize> = dims
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| perr(line, format!("bad size `{t}`"))))
        .collect::<Result<_>>()?;
    if dims.len() != 3 {
        return Err(perr(line, "size line must be `rows cols nnz`".into()));
    }
    let mut t = Vec::with_capacity(dims[2]);
    for (line, l) in lines {
        let tok: Vec<&str> = l.split_whitespace().collect();
        if tok.len() != 3 {
            return Err(perr(line, "entry must be `i j value`".into()));
        }
        let i: usize = tok[0].parse().map_err(|_| perr(line, format!("bad row `{}`", tok[0])))?;
        let j: usize = tok[1].parse().map_err(|_| perr(line, format!("bad column `{}`", tok[1])))?;
        let v: f64 = tok[2].parse().map_err(|_| perr(line, format!("bad value `{}`", tok[2])))?;
        if i >= dims[0] || j >= dims[1] {
            return Err(perr(line, format!("entry ({i}, {j}) outside {}×{}", dims[0], dims[1])));
        }
        t.push((i, j, v));
    }
    if t.len() != dims[2] {
        return Err(Error::Invalid(format!("declared {} entries, found {}", dims[2], t.len())));
    }
    Ok(csr_from_triplets(dims[0], dims[1], &t))
}
