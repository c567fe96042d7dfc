use nalgebra::DMatrix;

/// Default relative rank tolerance (times the largest singular value).
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Singular values and right singular vectors of `s`, with `V` square (`cols × cols`).
fn full_svd(s: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (m, n) = s.shape();
    let padded = if m < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(s);
        p
    } else {
        s.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    (svd.singular_values.as_slice().to_vec(), v_t.transpose())
}

fn threshold(sigma: &[f64], tol: Option<f64>) -> f64 {
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    tol.unwrap_or(DEFAULT_RANK_TOL * smax)
}

/// Numerical rank with the same tolerance convention as [`null_space_basis`].
pub fn rank(s: &DMatrix<f64>, tol: Option<f64>) -> usize {
    if s.is_empty() {
        return 0;
    }
    let (sigma, _) = full_svd(s);
    let t = threshold(&sigma, tol);
    sigma.iter().filter(|&&v| v > t).count()
}

/// Orthonormal basis (as columns) of `{v : S v = 0}`.
///
/// `tol` is an absolute singular-value threshold; by default `1e-10 · σ_max`.
/// Each column is signed so that its first clearly nonzero entry is positive.
pub fn null_space_basis(s: &DMatrix<f64>, tol: Option<f64>) -> DMatrix<f64> {
    let n = s.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if s.nrows() == 0 || s.iter().all(|&v| v == 0.0) {
        return DMatrix::identity(n, n);
    }
    let (sigma, v) = full_svd(s);
    let t = threshold(&sigma, tol);
    let mut cols: Vec<usize> = (0..n).filter(|&i| sigma.get(i).is_none_or(|&sv| sv <= t)).collect();
    cols.sort_unstable();
    let mut basis = DMatrix::zeros(n, cols.len());
    for (k, &c) in cols.iter().enumerate() {
        let mut col = v.column(c).clone_owned();
        if let Some(first) = col.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                col = -col;
            }
        }
        basis.set_column(k, &col);
    }
    basis
}

/// Basis of `{m : mᵀ S = 0}`, i.e. conserved moieties.
pub fn left_null_space_basis(s: &DMatrix<f64>, tol: Option<f64>) -> DMatrix<f64> {
    null_space_basis(&s.transpose(), tol)
}
