use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest number of irreversible coordinates (after splitting reversible steps).
pub const MAX_COORDINATES: usize = 24;
const MAX_RAYS: usize = 200_000;
const ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PathwayClass {
    BoundaryLinked,
    FutileCycle,
    InternalCycle,
}

/// One non-negative coordinate: a step traversed forward (`+1`) or backward (`-1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coordinate {
    pub step: usize,
    pub direction: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathwayBasis {
    /// Extreme rays in step coordinates (steps × pathways); reversible steps may be negative.
    pub p: DMatrix<f64>,
    /// The same rays in irreversible coordinates (coordinates × pathways), all non-negative.
    pub split: DMatrix<f64>,
    pub coordinates: Vec<Coordinate>,
    pub classes: Vec<PathwayClass>,
}

impl PathwayBasis {
    pub fn len(&self) -> usize {
        self.p.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.p.ncols() == 0
    }

    pub fn count(&self, class: PathwayClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }
}

fn zero_set(r: &[f64]) -> BTreeSet<usize> {
    r.iter().enumerate().filter(|(_, v)| v.abs() <= ZERO_TOL).map(|(i, _)| i).collect()
}

fn normalize(r: &mut [f64]) {
    let m = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for v in r.iter_mut() {
        *v /= m;
        if v.abs() <= ZERO_TOL {
            *v = 0.0;
        }
    }
}

/// Extreme rays of `{x ≥ 0 : A x = 0}` by double description, starting from the
/// non-negative orthant and intersecting with one equality row at a time.
fn cone_rays(a: &DMatrix<f64>) -> Result<Vec<Vec<f64>>> {
    let n = a.ncols();
    let mut rays: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    for row in a.row_iter() {
        let row: Vec<f64> = row.iter().copied().collect();
        let scale = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            continue;
        }
        let dots: Vec<f64> = rays.iter().map(|r| r.iter().zip(&row).map(|(a, b)| a * b).sum::<f64>() / scale).collect();
        let zeros: Vec<BTreeSet<usize>> = rays.iter().map(|r| zero_set(r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| dots[i] > ZERO_TOL).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| dots[i] < -ZERO_TOL).collect();
        let mut next: Vec<Vec<f64>> = (0..rays.len()).filter(|&i| dots[i].abs() <= ZERO_TOL).map(|i| rays[i].clone()).collect();
        for &p in &pos {
            for &q in &neg {
                let common: BTreeSet<usize> = zeros[p].intersection(&zeros[q]).copied().collect();
                let adjacent =
                    (0..rays.len()).all(|k| k == p || k == q || !common.is_subset(&zeros[k]));
                if !adjacent {
                    continue;
                }
                let mut r: Vec<f64> = rays[q].iter().zip(&rays[p]).map(|(xq, xp)| dots[p] * xq - dots[q] * xp).collect();
                normalize(&mut r);
                next.push(r);
                if next.len() > MAX_RAYS {
                    return Err(Error::SizeLimit(format!("more than {MAX_RAYS} intermediate rays")));
                }
            }
        }
        rays = next;
    }
    for r in &mut rays {
        normalize(r);
    }
    Ok(rays)
}

/// Extreme pathways of `S` (species × steps).
///
/// Reversible steps are split into forward and backward coordinates; the trivial cycles that
/// run one reversible step forward and backward at once are dropped. `boundary` marks exchange
/// steps and drives the classification: no boundary flux means an internal cycle, boundary flux
/// with zero net exchange `S_B v_B = 0` a futile cycle, anything else boundary-linked.
/// Columns are scaled to a largest entry of 1 and ordered lexicographically by support.
pub fn extreme_pathways(s: &DMatrix<f64>, reversible: &[bool], boundary: &[bool]) -> Result<PathwayBasis> {
    let (ns, nr) = s.shape();
    if reversible.len() != nr || boundary.len() != nr {
        return Err(Error::Dimension(format!(
            "{nr} steps but {} reversibility and {} boundary flags",
            reversible.len(),
            boundary.len()
        )));
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("stoichiometric matrix has non-finite entries".into()));
    }
    let mut coordinates = Vec::new();
    for step in 0..nr {
        coordinates.push(Coordinate { step, direction: 1 });
        if reversible[step] {
            coordinates.push(Coordinate { step, direction: -1 });
        }
    }
    let nc = coordinates.len();
    if nc > MAX_COORDINATES {
        return Err(Error::SizeLimit(format!("{nc} irreversible coordinates exceed the limit of {MAX_COORDINATES}")));
    }
    let mut a = DMatrix::zeros(ns, nc);
    for (k, c) in coordinates.iter().enumerate() {
        for i in 0..ns {
            a[(i, k)] = s[(i, c.step)] * c.direction as f64;
        }
    }
    let mut rays = cone_rays(&a)?;
    rays.retain(|r| {
        let support: Vec<usize> = (0..nc).filter(|&k| r[k] != 0.0).collect();
        !(support.len() == 2 && coordinates[support[0]].step == coordinates[support[1]].step)
    });
    let support = |r: &Vec<f64>| -> Vec<usize> { (0..nc).filter(|&k| r[k] != 0.0).collect() };
    rays.sort_by_key(|x| support(x));

    let np = rays.len();
    let mut split = DMatrix::zeros(nc, np);
    let mut p = DMatrix::<f64>::zeros(nr, np);
    let mut classes = Vec::with_capacity(np);
    for (j, r) in rays.iter().enumerate() {
        for (k, c) in coordinates.iter().enumerate() {
            split[(k, j)] = r[k];
            p[(c.step, j)] += c.direction as f64 * r[k];
        }
        let col = p.column(j);
        let has_boundary = (0..nr).any(|r| boundary[r] && col[r].abs() > ZERO_TOL);
        let class = if !has_boundary {
            PathwayClass::InternalCycle
        } else {
            let net_exchange = (0..ns)
                .map(|i| (0..nr).filter(|&r| boundary[r]).map(|r| s[(i, r)] * col[r]).sum::<f64>().abs())
                .fold(0.0, f64::max);
            if net_exchange <= ZERO_TOL {
                PathwayClass::FutileCycle
            } else {
                PathwayClass::BoundaryLinked
            }
        };
        classes.push(class);
    }
    Ok(PathwayBasis { p, split, coordinates, classes })
}
