use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution {
    pub x: Vec<f64>,
    /// `‖A x − b‖₂`
    pub residual: f64,
    pub iterations: usize,
}

/// Minimum-norm least squares restricted to the columns in `passive`.
fn restricted_lstsq(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[usize]) -> Vec<f64> {
    let sub = a.select_columns(passive);
    let svd = sub.svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = smax * 1e-13 * a.nrows().max(a.ncols()) as f64;
    svd.solve(b, eps).map(|x| x.as_slice().to_vec()).unwrap_or_else(|_| vec![0.0; passive.len()])
}

/// Lawson–Hanson active-set solution of `min ‖A x − b‖₂` subject to `x ≥ 0`.
pub fn nnls(a: &DMatrix<f64>, b: &[f64]) -> NnlsSolution {
    let (m, n) = a.shape();
    assert_eq!(b.len(), m, "nnls right-hand side length");
    let bv = DVector::from_column_slice(b);
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let anorm = a.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let tol = 10.0 * f64::EPSILON * anorm * m.max(n) as f64 * bv.norm().max(1.0);
    let max_iter = 3 * n + 50;
    let mut iterations = 0;

    loop {
        let r = &bv - a * &x;
        let w = a.transpose() * &r;
        let candidate = (0..n).filter(|&j| !passive[j] && w[j] > tol).max_by(|&i, &j| {
            w[i].partial_cmp(&w[j]).unwrap_or(std::cmp::Ordering::Equal).then(j.cmp(&i))
        });
        let Some(j) = candidate else { break };
        if iterations >= max_iter {
            break;
        }
        iterations += 1;
        passive[j] = true;
        loop {
            let p: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let z = restricted_lstsq(a, &bv, &p);
            if z.iter().all(|&v| v > 0.0) {
                for (k, &i) in p.iter().enumerate() {
                    x[i] = z[k];
                }
                break;
            }
            // step back toward z until a passive variable hits zero
            let mut alpha = f64::INFINITY;
            for (k, &i) in p.iter().enumerate() {
                if z[k] <= 0.0 {
                    let denom = x[i] - z[k];
                    let a_i = if denom > 0.0 { x[i] / denom } else { 0.0 };
                    alpha = alpha.min(a_i);
                }
            }
            for (k, &i) in p.iter().enumerate() {
                x[i] += alpha * (z[k] - x[i]);
            }
            for &i in &p {
                if x[i] <= tol {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
            if p.iter().all(|&i| passive[i]) {
                // no variable left the set: guard against stalling
                break;
            }
        }
    }
    let residual = (&bv - a * &x).norm();
    NnlsSolution { x: x.as_slice().to_vec(), residual, iterations }
}
