use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// A feasible point (the optimum when `status` is `Optimal`); empty when infeasible.
    pub x: Vec<f64>,
    pub objective: f64,
}

/// `x_j = offset_j + Σ sign·y_k` over the listed standard-form columns.
struct VarMap {
    offset: f64,
    terms: Vec<(usize, f64)>,
}

/// Revised simplex on `min costᵀ y, A y = b, y ≥ 0`; the basis is refactorized at every pivot.
struct Simplex<'a> {
    a: &'a DMatrix<f64>,
    b: DVector<f64>,
    basis: Vec<usize>,
}

impl Simplex<'_> {
    fn factor(&self) -> Result<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>> {
        let lu = self.a.select_columns(&self.basis).lu();
        if !lu.is_invertible() {
            return Err(Error::Singular { condition: f64::INFINITY });
        }
        Ok(lu)
    }

    fn basic_values(&self) -> Result<DVector<f64>> {
        let lu = self.factor()?;
        lu.solve(&self.b).ok_or(Error::Singular { condition: f64::INFINITY })
    }

    /// Bland's rule over columns allowed by `enterable`. Returns `false` if unbounded.
    fn minimize(&mut self, cost: &[f64], enterable: &[bool], pivots: &mut usize) -> Result<bool> {
        let m = self.a.nrows();
        let cscale = cost.iter().fold(0.0f64, |s, c| s.max(c.abs())).max(f64::MIN_POSITIVE);
        loop {
            let lu = self.factor()?;
            let xb = lu.solve(&self.b).ok_or(Error::Singular { condition: f64::INFINITY })?;
            let cb = DVector::from_iterator(m, self.basis.iter().map(|&j| cost[j]));
            let y = self
                .a
                .select_columns(&self.basis)
                .transpose()
                .lu()
                .solve(&cb)
                .ok_or(Error::Singular { condition: f64::INFINITY })?;
            let mut in_basis = vec![false; self.a.ncols()];
            for &j in &self.basis {
                in_basis[j] = true;
            }
            let entering = (0..self.a.ncols()).find(|&j| {
                enterable[j] && !in_basis[j] && (cost[j] - self.a.column(j).dot(&y)) < -COST_TOL * cscale
            });
            let Some(c) = entering else { return Ok(true) };
            let u = lu.solve(&self.a.column(c).clone_owned()).ok_or(Error::Singular { condition: f64::INFINITY })?;
            let mut best: Option<(usize, f64)> = None;
            for i in 0..m {
                if u[i] > PIVOT_TOL {
                    let ratio = xb[i].max(0.0) / u[i];
                    let better = match best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < br - 1e-12 * br.max(1.0)
                                || (ratio <= br + 1e-12 * br.max(1.0) && self.basis[i] < self.basis[bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = best else { return Ok(false) };
            self.basis[r] = c;
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(Error::Invalid("simplex pivot limit exceeded".into()));
            }
        }
    }
}

/// Maximizes `cᵀx` subject to `A x = b` and `lower ≤ x ≤ upper` by the two-phase simplex
/// method with Bland's rule. With `c = None` only a feasible point is sought.
pub fn linprog(a: &DMatrix<f64>, b: &[f64], c: Option<&[f64]>, lower: &[f64], upper: &[f64]) -> Result<LpSolution> {
    let (m, n) = a.shape();
    if b.len() != m || lower.len() != n || upper.len() != n || c.is_some_and(|c| c.len() != n) {
        return Err(Error::Dimension("linear program dimensions disagree".into()));
    }
    if lower.iter().chain(upper).any(|v| v.is_nan()) || lower.iter().zip(upper).any(|(l, u)| l > u) {
        return Ok(LpSolution { status: LpStatus::Infeasible, x: Vec::new(), objective: f64::NAN });
    }

    // standard form y ≥ 0
    let mut maps = Vec::with_capacity(n);
    let mut ny = 0;
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (l, u) = (lower[j], upper[j]);
        let map = if l.is_finite() {
            if u.is_finite() {
                upper_rows.push((ny, u - l));
            }
            ny += 1;
            VarMap { offset: l, terms: vec![(ny - 1, 1.0)] }
        } else if u.is_finite() {
            ny += 1;
            VarMap { offset: u, terms: vec![(ny - 1, -1.0)] }
        } else {
            ny += 2;
            VarMap { offset: 0.0, terms: vec![(ny - 2, 1.0), (ny - 1, -1.0)] }
        };
        maps.push(map);
    }
    let n_slack = upper_rows.len();
    let rows = m + n_slack;
    let cols = ny + n_slack;
    let mut std_a = DMatrix::zeros(rows, cols);
    let mut std_b = vec![0.0; rows];
    for i in 0..m {
        let mut bi = b[i];
        for (j, map) in maps.iter().enumerate() {
            let aij = a[(i, j)];
            if aij != 0.0 {
                bi -= aij * map.offset;
                for &(k, s) in &map.terms {
                    std_a[(i, k)] += aij * s;
                }
            }
        }
        std_b[i] = bi;
    }
    for (r, &(k, width)) in upper_rows.iter().enumerate() {
        std_a[(m + r, k)] = 1.0;
        std_a[(m + r, ny + r)] = 1.0;
        std_b[m + r] = width;
    }
    for i in 0..rows {
        let s = std_a.row(i).amax();
        let s = if s > 0.0 { s } else { 1.0 };
        let sign = if std_b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..cols {
            std_a[(i, j)] *= sign / s;
        }
        std_b[i] *= sign / s;
    }

    // phase 1 with one artificial per row
    let total = cols + rows;
    let mut aug = DMatrix::zeros(rows, total);
    aug.view_mut((0, 0), (rows, cols)).copy_from(&std_a);
    for i in 0..rows {
        aug[(i, cols + i)] = 1.0;
    }
    let mut sx = Simplex { a: &aug, b: DVector::from_vec(std_b.clone()), basis: (cols..total).collect() };
    let mut cost1 = vec![0.0; total];
    cost1[cols..].fill(1.0);
    let mut pivots = 0;
    sx.minimize(&cost1, &vec![true; total], &mut pivots)?;
    let xb = sx.basic_values()?;
    let infeas: f64 = (0..rows).filter(|&i| sx.basis[i] >= cols).map(|i| xb[i].abs()).sum();
    let bscale = std_b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    if infeas > 1e-9 * bscale {
        return Ok(LpSolution { status: LpStatus::Infeasible, x: Vec::new(), objective: f64::NAN });
    }
    // drive zero-level artificials out of the basis where possible
    for i in 0..rows {
        if sx.basis[i] >= cols {
            let lu = sx.factor()?;
            let candidate = (0..cols).filter(|j| !sx.basis.contains(j)).find(|&j| {
                lu.solve(&aug.column(j).clone_owned()).is_some_and(|u| u[i].abs() > 1e-7)
            });
            if let Some(j) = candidate {
                sx.basis[i] = j;
            }
        }
    }

    let mut status = LpStatus::Optimal;
    if let Some(c) = c {
        let mut cost2 = vec![0.0; total];
        for (j, map) in maps.iter().enumerate() {
            for &(k, s) in &map.terms {
                cost2[k] -= c[j] * s;
            }
        }
        let mut enterable = vec![true; total];
        enterable[cols..].fill(false);
        if !sx.minimize(&cost2, &enterable, &mut pivots)? {
            status = LpStatus::Unbounded;
        }
    }

    let xb = sx.basic_values()?;
    let mut y = vec![0.0; total];
    for (i, &bv) in sx.basis.iter().enumerate() {
        y[bv] = xb[i].max(0.0);
    }
    let x: Vec<f64> = maps
        .iter()
        .zip(lower.iter().zip(upper))
        .map(|(map, (&l, &u))| {
            let v = map.offset + map.terms.iter().map(|&(k, s)| s * y[k]).sum::<f64>();
            v.clamp(l, u)
        })
        .collect();
    let objective = match (status, c) {
        (LpStatus::Optimal, Some(c)) => c.iter().zip(&x).map(|(a, b)| a * b).sum(),
        (LpStatus::Unbounded, _) => f64::INFINITY,
        _ => 0.0,
    };
    Ok(LpSolution { status, x, objective })
}
