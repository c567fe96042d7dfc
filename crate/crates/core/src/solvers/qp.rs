use nalgebra::{DMatrix, DVector};

use super::nnls::nnls;
use super::nullspace::null_space_basis;

/// Absolute slack granted to bounds and equalities when testing feasibility.
const FEAS_TOL: f64 = 1e-9;

/// Minimum-norm point of `{x : E x = e, lower ≤ x ≤ upper}`, or `None` if the set is empty.
///
/// Equalities are eliminated with `x = E⁺e + Z z` (`Z` an orthonormal null-space basis), which
/// turns the problem into a least-distance program `min ‖z‖ s.t. G z ≥ h` solved through NNLS.
pub fn min_norm_point(e_mat: &DMatrix<f64>, e_rhs: &[f64], lower: &[f64], upper: &[f64]) -> Option<Vec<f64>> {
    let n = e_mat.ncols();
    assert_eq!(e_mat.nrows(), e_rhs.len());
    assert!(lower.len() == n && upper.len() == n);
    if lower.iter().zip(upper).any(|(l, u)| l > u) {
        return None;
    }
    let scale = e_rhs
        .iter()
        .chain(lower.iter().chain(upper).filter(|v| v.is_finite()))
        .fold(1.0f64, |m, v| m.max(v.abs()));

    let rhs = DVector::from_column_slice(e_rhs);
    let (x_p, z_basis) = if e_mat.nrows() == 0 {
        (DVector::zeros(n), DMatrix::identity(n, n))
    } else {
        let svd = e_mat.clone().svd(true, true);
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let x_p = svd.solve(&rhs, 1e-10 * smax).ok()?;
        (x_p, null_space_basis(e_mat, Some(1e-10 * smax)))
    };
    if (e_mat * &x_p - &rhs).amax() > FEAS_TOL * scale {
        return None;
    }

    // constraints G z ≥ h from finite bounds
    let k = z_basis.ncols();
    let mut g_rows: Vec<Vec<f64>> = Vec::new();
    let mut h: Vec<f64> = Vec::new();
    for i in 0..n {
        let zi: Vec<f64> = z_basis.row(i).iter().copied().collect();
        let trivial = zi.iter().all(|v| v.abs() <= 1e-12);
        if lower[i].is_finite() {
            let hi = (lower[i] - x_p[i]) / scale;
            if trivial {
                if hi > FEAS_TOL {
                    return None;
                }
            } else {
                g_rows.push(zi.clone());
                h.push(hi - 1e-13);
            }
        }
        if upper[i].is_finite() {
            let hi = (x_p[i] - upper[i]) / scale;
            if trivial {
                if hi > FEAS_TOL {
                    return None;
                }
            } else {
                g_rows.push(zi.iter().map(|v| -v).collect());
                h.push(hi - 1e-13);
            }
        }
    }

    let z = if g_rows.is_empty() || k == 0 {
        DVector::zeros(k)
    } else {
        let m = g_rows.len();
        // NNLS on [Gᵀ; hᵀ] u ≈ [0; 1]
        let mut a = DMatrix::zeros(k + 1, m);
        for (c, (row, hc)) in g_rows.iter().zip(&h).enumerate() {
            for r in 0..k {
                a[(r, c)] = row[r];
            }
            a[(k, c)] = *hc;
        }
        let mut f = vec![0.0; k + 1];
        f[k] = 1.0;
        let sol = nnls(&a, &f);
        let u = DVector::from_column_slice(&sol.x);
        let resid = &a * u - DVector::from_column_slice(&f);
        if resid.norm() <= 1e-12 || resid[k].abs() <= 1e-14 {
            return None;
        }
        DVector::from_fn(k, |r, _| -resid[r] / resid[k])
    };
    let z = z * scale;
    let mut x = x_p + &z_basis * z;
    for i in 0..n {
        let tol = FEAS_TOL * scale;
        if x[i] < lower[i] - tol || x[i] > upper[i] + tol {
            return None;
        }
        x[i] = x[i].clamp(lower[i], upper[i]);
    }
    if let Some(p) = polish(e_mat, &rhs, lower, upper, &x, scale) {
        x = p;
    }
    Some(x.as_slice().to_vec())
}

/// Refines an approximate minimizer by pinning the variables at their bounds and solving the
/// least-norm problem in the remaining ones exactly. Returns `None` if the result is not better.
fn polish(e_mat: &DMatrix<f64>, rhs: &DVector<f64>, lower: &[f64], upper: &[f64], x: &DVector<f64>, scale: f64) -> Option<DVector<f64>> {
    let n = x.len();
    let snap = 1e-7 * scale;
    let mut fixed = x.clone();
    let mut free = Vec::new();
    for i in 0..n {
        if (x[i] - lower[i]).abs() <= snap {
            fixed[i] = lower[i];
        } else if (x[i] - upper[i]).abs() <= snap {
            fixed[i] = upper[i];
        } else {
            fixed[i] = 0.0;
            free.push(i);
        }
    }
    let mut y = fixed;
    if !free.is_empty() && e_mat.nrows() > 0 {
        let e_free = e_mat.select_columns(&free);
        let r = rhs - e_mat * &y;
        let svd = e_free.svd(true, true);
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let xf = svd.solve(&r, 1e-10 * smax.max(f64::MIN_POSITIVE)).ok()?;
        for (k, &i) in free.iter().enumerate() {
            y[i] = xf[k];
        }
    }
    let tol = FEAS_TOL * scale;
    let feasible = (0..n).all(|i| y[i] >= lower[i] - tol && y[i] <= upper[i] + tol);
    let before = (e_mat * x - rhs).amax();
    let after = (e_mat * &y - rhs).amax();
    if !feasible || after > before.max(1e-12 * scale) || y.norm() > x.norm() * (1.0 + 1e-9) + tol {
        return None;
    }
    for i in 0..n {
        y[i] = y[i].clamp(lower[i], upper[i]);
    }
    Some(y)
}
