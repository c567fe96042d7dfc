//! Independent oracles shared by the integration tests: meshes written in the file format,
//! Gauss rules from the Golub–Welsch eigenproblem, exact rational elimination, brute-force
//! enumerations and an adaptive Dormand–Prince integrator.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rdfem::mesh::{load_mesh, Mesh};
use rdfem::network::{MechanismKind, RateConstants};

// ---------------------------------------------------------------- meshes

/// `n × n` cells on the unit square, two counter-clockwise triangles per cell.
/// Boundary tags: 1 bottom, 2 right, 3 top, 4 left.
pub fn square_mesh_text(n: usize) -> String {
    let h = 1.0 / n as f64;
    let id = |i: usize, j: usize| j * (n + 1) + i + 1;
    let mut s = String::from("rdfem-mesh 1\n");
    writeln!(s, "nodes {}", (n + 1) * (n + 1)).unwrap();
    for j in 0..=n {
        for i in 0..=n {
            writeln!(s, "{} {} {}", id(i, j), i as f64 * h, j as f64 * h).unwrap();
        }
    }
    writeln!(s, "elements {}", 2 * n * n).unwrap();
    let mut boundary = Vec::new();
    let mut e = 0;
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            writeln!(s, "{} tri3 {a} {b} {c}", e + 1).unwrap();
            writeln!(s, "{} tri3 {a} {c} {d}", e + 2).unwrap();
            if j == 0 {
                boundary.push((e + 1, 0, 1));
            }
            if i == n - 1 {
                boundary.push((e + 1, 1, 2));
            }
            if j == n - 1 {
                boundary.push((e + 2, 1, 3));
            }
            if i == 0 {
                boundary.push((e + 2, 2, 4));
            }
            e += 2;
        }
    }
    writeln!(s, "boundary {}", boundary.len()).unwrap();
    for (el, f, t) in boundary {
        writeln!(s, "{el} {f} {t}").unwrap();
    }
    s
}

pub fn square_mesh(n: usize) -> Mesh {
    load_mesh(&square_mesh_text(n)).expect("structured square mesh")
}

fn single_element(kind: &str, points: &[Vec<f64>]) -> Mesh {
    let mut s = format!("rdfem-mesh 1\nnodes {}\n", points.len());
    for (i, p) in points.iter().enumerate() {
        let coords: Vec<String> = p.iter().map(|v| format!("{v:e}")).collect();
        writeln!(s, "{} {}", i + 1, coords.join(" ")).unwrap();
    }
    let ids: Vec<String> = (1..=points.len()).map(|i| i.to_string()).collect();
    writeln!(s, "elements 1\n1 {kind} {}", ids.join(" ")).unwrap();
    s.push_str("boundary 0\n");
    load_mesh(&s).expect("single element mesh")
}

pub fn triangle_mesh(p: [[f64; 2]; 3]) -> Mesh {
    single_element("tri3", &p.iter().map(|v| v.to_vec()).collect::<Vec<_>>())
}

pub fn tet_mesh(p: [[f64; 3]; 4]) -> Mesh {
    single_element("tet4", &p.iter().map(|v| v.to_vec()).collect::<Vec<_>>())
}

pub fn quad_mesh(p: [[f64; 2]; 4]) -> Mesh {
    single_element("quad4", &p.iter().map(|v| v.to_vec()).collect::<Vec<_>>())
}

pub fn beam_mesh(x0: f64, x1: f64) -> Mesh {
    single_element("beam2", &[vec![x0], vec![x1]])
}

pub fn unit_triangle() -> Mesh {
    triangle_mesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
}

pub fn triangle_area(p: &[[f64; 2]; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

pub fn tet_volume(p: &[[f64; 3]; 4]) -> f64 {
    let d = |i: usize| [p[i][0] - p[0][0], p[i][1] - p[0][1], p[i][2] - p[0][2]];
    let (a, b, c) = (d(1), d(2), d(3));
    (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])) / 6.0
}

// ---------------------------------------------------------------- quadrature

/// Gauss–Legendre rule on [-1, 1] from the eigen-decomposition of the Jacobi matrix.
pub fn golub_welsch(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[(k - 1, k)] = b;
        j[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> =
        (0..n).map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Rule on the reference simplex of dimension `dim` with weights summing to one;
/// each point is given in barycentric coordinates.
pub fn simplex_rule(dim: usize, n: usize) -> Vec<(f64, Vec<f64>)> {
    let (x, w) = golub_welsch(n);
    let pts: Vec<(f64, f64)> = x.iter().zip(&w).map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
    let mut out = Vec::new();
    match dim {
        1 => {
            for &(t, wt) in &pts {
                out.push((wt, vec![1.0 - t, t]));
            }
        }
        2 => {
            for &(u, wu) in &pts {
                for &(v, wv) in &pts {
                    let (r1, r2) = (u, v * (1.0 - u));
                    out.push((2.0 * wu * wv * (1.0 - u), vec![1.0 - r1 - r2, r1, r2]));
                }
            }
        }
        3 => {
            for &(u, wu) in &pts {
                for &(v, wv) in &pts {
                    for &(t, wt) in &pts {
                        let r1 = u;
                        let r2 = v * (1.0 - u);
                        let r3 = t * (1.0 - u) * (1.0 - v);
                        let jac = (1.0 - u).powi(2) * (1.0 - v);
                        out.push((6.0 * wu * wv * wt * jac, vec![1.0 - r1 - r2 - r3, r1, r2, r3]));
                    }
                }
            }
        }
        _ => panic!("unsupported simplex dimension {dim}"),
    }
    out
}

/// `∫ f(λ) dΩ` over a simplex of the given measure, `λ` the barycentric coordinates.
pub fn integrate_simplex(measure: f64, dim: usize, n: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    simplex_rule(dim, n).iter().map(|(w, l)| w * f(l)).sum::<f64>() * measure
}

/// `∫ f(N) dΩ` over a bilinear quadrilateral, `N` its four shape values.
pub fn integrate_quad(corners: &[[f64; 2]; 4], n: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    let (x, w) = golub_welsch(n);
    let mut sum = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        for (eta, wj) in x.iter().zip(&w) {
            let s = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
            let shape: Vec<f64> = s.iter().map(|(a, b)| 0.25 * (1.0 + a * xi) * (1.0 + b * eta)).collect();
            let (mut j11, mut j12, mut j21, mut j22) = (0.0, 0.0, 0.0, 0.0);
            for (k, (a, b)) in s.iter().enumerate() {
                let dxi = 0.25 * a * (1.0 + b * eta);
                let deta = 0.25 * b * (1.0 + a * xi);
                j11 += dxi * corners[k][0];
                j12 += dxi * corners[k][1];
                j21 += deta * corners[k][0];
                j22 += deta * corners[k][1];
            }
            sum += wi * wj * (j11 * j22 - j12 * j21) * f(&shape);
        }
    }
    sum
}

/// Gradients of the barycentric coordinates of a simplex (one row per node).
pub fn simplex_gradients(coords: &[Vec<f64>]) -> DMatrix<f64> {
    let d = coords.len() - 1;
    let j = DMatrix::from_fn(d, d, |r, c| coords[c + 1][r] - coords[0][r]);
    let inv = j.try_inverse().expect("non-degenerate simplex");
    let mut g = DMatrix::zeros(d + 1, d);
    for i in 0..d {
        for k in 0..d {
            g[(i + 1, k)] = inv[(i, k)];
            g[(0, k)] -= inv[(i, k)];
        }
    }
    g
}

/// Points of a tensor rule on a bilinear quadrilateral: (weight × det J, shape values,
/// physical shape gradients).
pub fn quad_rule(corners: &[[f64; 2]; 4], n: usize) -> Vec<(f64, Vec<f64>, DMatrix<f64>)> {
    let (x, w) = golub_welsch(n);
    let s = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
    let mut out = Vec::new();
    for (xi, wi) in x.iter().zip(&w) {
        for (eta, wj) in x.iter().zip(&w) {
            let shape: Vec<f64> = s.iter().map(|(a, b)| 0.25 * (1.0 + a * xi) * (1.0 + b * eta)).collect();
            let dref = DMatrix::from_fn(4, 2, |k, d| {
                let (a, b) = s[k];
                if d == 0 {
                    0.25 * a * (1.0 + b * eta)
                } else {
                    0.25 * b * (1.0 + a * xi)
                }
            });
            let xy = DMatrix::from_fn(4, 2, |k, d| corners[k][d]);
            let jac = dref.transpose() * xy;
            let det = jac.determinant();
            let grads = dref * jac.try_inverse().expect("regular map").transpose();
            out.push((wi * wj * det, shape, grads));
        }
    }
    out
}

// ---------------------------------------------------------------- exact arithmetic

pub type Q = BigRational;

pub fn q(v: i64) -> Q {
    BigRational::from_integer(BigInt::from(v))
}

pub fn qf(v: &Q) -> f64 {
    v.to_f64().expect("representable rational")
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..cols {
                    let sub = &f * &m[r][k];
                    m[i][k] = &m[i][k] - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn to_q(s: &[Vec<i64>]) -> Vec<Vec<Q>> {
    s.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()
}

pub fn rational_rank(s: &[Vec<i64>]) -> usize {
    rref(&mut to_q(s)).len()
}

/// Basis of `{v : S v = 0}` from the reduced echelon form.
pub fn rational_null_space(s: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut m = s.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); ncols];
            v[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Unique solution of `A x = b`, or `None` when singular or inconsistent.
fn solve_unique(a: &[Vec<Q>], b: &[Q], n: usize) -> Option<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = a.iter().zip(b).map(|(r, bi)| r.iter().cloned().chain([bi.clone()]).collect()).collect();
    let pivots = rref(&mut m);
    if pivots.contains(&n) || pivots.len() != n {
        return None;
    }
    Some((0..n).map(|r| m[r][n].clone()).collect())
}

#[derive(Debug, Clone)]
pub struct VertexOptimum {
    pub objective: Q,
    pub x: Vec<Q>,
    pub vertices: usize,
}

/// Maximizes `cᵀx` over `{A x = b, lo ≤ x ≤ hi}` by enumerating every basic solution in exact
/// arithmetic. `hi = None` means no upper bound. Returns `None` when the polytope is empty.
pub fn lp_vertex_oracle(a: &[Vec<i64>], b: &[i64], lo: &[i64], hi: &[Option<i64>], c: &[i64]) -> Option<VertexOptimum> {
    let n = lo.len();
    let aq = to_q(a);
    let mut best: Option<VertexOptimum> = None;
    let mut vertices = 0;
    // 0 = at lower, 1 = at upper, 2 = free
    let mut state = vec![0u8; n];
    loop {
        let valid = state.iter().zip(hi).all(|(s, h)| *s != 1 || h.is_some());
        if valid {
            let free: Vec<usize> = (0..n).filter(|&j| state[j] == 2).collect();
            let fixed = |j: usize| if state[j] == 0 { q(lo[j]) } else { q(hi[j].unwrap()) };
            let rhs: Vec<Q> = aq
                .iter()
                .zip(b)
                .map(|(row, &bi)| {
                    let mut r = q(bi);
                    for j in (0..n).filter(|&j| state[j] != 2) {
                        r -= &row[j] * fixed(j);
                    }
                    r
                })
                .collect();
            let sub: Vec<Vec<Q>> = aq.iter().map(|row| free.iter().map(|&j| row[j].clone()).collect()).collect();
            let sol = if free.is_empty() {
                rhs.iter().all(Zero::is_zero).then(Vec::new)
            } else {
                solve_unique(&sub, &rhs, free.len())
            };
            if let Some(xf) = sol {
                let mut x: Vec<Q> = (0..n).map(|j| if state[j] == 2 { Q::zero() } else { fixed(j) }).collect();
                for (k, &j) in free.iter().enumerate() {
                    x[j] = xf[k].clone();
                }
                let inside = (0..n).all(|j| x[j] >= q(lo[j]) && hi[j].is_none_or(|h| x[j] <= q(h)));
                if inside {
                    vertices += 1;
                    let obj = x.iter().zip(c).fold(Q::zero(), |s, (xj, &cj)| s + xj * q(cj));
                    if best.as_ref().is_none_or(|b| obj > b.objective) {
                        best = Some(VertexOptimum { objective: obj, x, vertices: 0 });
                    }
                }
            }
        }
        // next assignment
        let mut k = 0;
        loop {
            if k == n {
                return best.map(|b| VertexOptimum { vertices, ..b });
            }
            state[k] += 1;
            if state[k] < 3 {
                break;
            }
            state[k] = 0;
            k += 1;
        }
    }
}

/// Extreme rays of `{v ≥ 0 : S v = 0}` by checking every support set: a support yields an
/// extreme ray iff the restricted null space is one-dimensional and strictly signed.
/// Rays are scaled to a largest entry of one and sorted by support.
pub fn brute_force_rays(s: &[Vec<i64>], n: usize) -> Vec<Vec<f64>> {
    let sq = to_q(s);
    let mut rays = Vec::new();
    for mask in 1u32..(1 << n) {
        let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let sub: Vec<Vec<Q>> = sq.iter().map(|row| cols.iter().map(|&j| row[j].clone()).collect()).collect();
        let ns = if sub.is_empty() {
            if cols.len() == 1 {
                vec![vec![Q::one()]]
            } else {
                continue;
            }
        } else {
            rational_null_space(&sub, cols.len())
        };
        if ns.len() != 1 {
            continue;
        }
        let v = &ns[0];
        let positive = v.iter().all(Signed::is_positive);
        let negative = v.iter().all(Signed::is_negative);
        if !(positive || negative) {
            continue;
        }
        let mut ray = vec![0.0; n];
        for (k, &j) in cols.iter().enumerate() {
            ray[j] = qf(&v[k]).abs();
        }
        let m = ray.iter().cloned().fold(0.0, f64::max);
        rays.push(ray.into_iter().map(|x| x / m).collect::<Vec<_>>());
    }
    sort_by_support(&mut rays);
    rays
}

pub fn support(v: &[f64]) -> Vec<usize> {
    v.iter().enumerate().filter(|(_, x)| x.abs() > 1e-9).map(|(i, _)| i).collect()
}

pub fn sort_by_support(rays: &mut [Vec<f64>]) {
    rays.sort_by_key(|a| support(a));
}

// ---------------------------------------------------------------- least squares

/// Smallest `‖P w − v‖` over `w ≥ 0`, found by trying every active set.
pub fn nnls_oracle(p: &DMatrix<f64>, v: &[f64]) -> f64 {
    let n = p.ncols();
    let target = DVector::from_column_slice(v);
    let mut best = target.norm();
    for mask in 1u32..(1 << n) {
        let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let sub = p.select_columns(&cols);
        let svd = sub.clone().svd(true, true);
        let Ok(w) = svd.solve(&target, 1e-12) else { continue };
        if w.iter().all(|&x| x >= -1e-12) {
            let r = (&sub * w - &target).norm();
            best = best.min(r);
        }
    }
    best
}

// ---------------------------------------------------------------- ODE integration

/// Dormand–Prince 5(4) with adaptive steps; returns the state at each requested time.
pub fn dopri45(
    f: impl Fn(f64, &[f64]) -> Vec<f64>,
    y0: &[f64],
    times: &[f64],
    rtol: f64,
    atol: f64,
) -> Vec<Vec<f64>> {
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] =
        [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = 0.0;
    let mut h: f64 = 1e-6;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        while t < target {
            let step = h.min(target - t);
            let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
            for s in 0..7 {
                let ys: Vec<f64> = (0..n).map(|i| y[i] + step * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>()).collect();
                k.push(f(t + C[s] * step, &ys));
            }
            let y5: Vec<f64> = (0..n).map(|i| y[i] + step * (0..7).map(|s| B5[s] * k[s][i]).sum::<f64>()).collect();
            let y4: Vec<f64> = (0..n).map(|i| y[i] + step * (0..7).map(|s| B4[s] * k[s][i]).sum::<f64>()).collect();
            let err = (0..n)
                .map(|i| {
                    let sc = atol + rtol * y[i].abs().max(y5[i].abs());
                    ((y5[i] - y4[i]) / sc).powi(2)
                })
                .sum::<f64>()
                / n as f64;
            let err = err.sqrt();
            if err <= 1.0 {
                t += step;
                y = y5;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = step * factor;
        }
        out.push(y.clone());
    }
    out
}

// ---------------------------------------------------------------- mechanism balances

/// Species balances `dC/dt` of each catalog mechanism written out term by term.
pub fn mechanism_balance(kind: MechanismKind, k: &RateConstants, c: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    let k = |name: &str| k[name];
    let c = |name: &str| c[name];
    let mut d: Vec<(String, f64)> = Vec::new();
    let mut put = |name: &str, v: f64| d.push((name.to_string(), v));
    use MechanismKind::*;
    match kind {
        EnzymeActivation => {
            put("E0", -k("k1") * c("E0") + k("k-1") * c("E"));
            put("E", k("k1") * c("E0") - k("k-1") * c("E"));
        }
        ReactionChain(n) => {
            for i in 1..=n {
                let inflow = if i > 1 { k(&format!("k{}", i - 1)) * c(&format!("A{}", i - 1)) } else { 0.0 };
                let outflow = if i < n { k(&format!("k{i}")) * c(&format!("A{i}")) } else { 0.0 };
                put(&format!("A{i}"), inflow - outflow);
            }
        }
        MichaelisMenten => {
            put("ES", k("k1") * c("E") * c("S") - k("k-1") * c("ES") - k("k2") * c("ES"));
            put("S", -k("k1") * c("E") * c("S") + k("k-1") * c("ES"));
            put("P", k("k2") * c("ES"));
            put("E", -k("k1") * c("E") * c("S") + k("k-1") * c("ES") + k("k2") * c("ES"));
        }
        CompetitiveInhibition => {
            put("ES", k("k1") * c("E") * c("S") - k("k-1") * c("ES") - k("k2") * c("ES"));
            put("S", -k("k1") * c("E") * c("S") + k("k-1") * c("ES"));
            put("P", k("k2") * c("ES"));
            put(
                "E",
                -k("k1") * c("E") * c("S") + k("k-1") * c("ES") + k("k2") * c("ES") - k("k3") * c("E") * c("I")
                    + k("k-3") * c("EI"),
            );
            put("EI", k("k3") * c("E") * c("I") - k("k-3") * c("EI"));
            put("I", -k("k3") * c("E") * c("I") + k("k-3") * c("EI"));
        }
        NonCompetitiveInhibition => {
            put(
                "E",
                -k("k1") * c("E") * c("S") + k("k-1") * c("ES") + k("k2") * c("ES") - k("k3") * c("E") * c("I")
                    + k("k-3") * c("EI"),
            );
            put("S", -k("k1") * c("E") * c("S") + k("k-1") * c("ES") - k("k5") * c("EI") * c("S") + k("k-5") * c("ESI"));
            put(
                "ES",
                k("k1") * c("E") * c("S") - k("k-1") * c("ES") - k("k2") * c("ES") - k("k4") * c("ES") * c("I")
                    + k("k-4") * c("ESI"),
            );
            put("P", k("k2") * c("ES"));
            put("I", -k("k3") * c("E") * c("I") + k("k-3") * c("EI") - k("k4") * c("ES") * c("I") + k("k-4") * c("ESI"));
            put("EI", k("k3") * c("E") * c("I") - k("k-3") * c("EI") - k("k5") * c("EI") * c("S") + k("k-5") * c("ESI"));
            put(
                "ESI",
                k("k4") * c("ES") * c("I") - k("k-4") * c("ESI") + k("k5") * c("EI") * c("S") - k("k-5") * c("ESI"),
            );
        }
        AntiCompetitiveInhibition => {
            put("E", -k("k1") * c("E") * c("S") + k("k-1") * c("ES") + k("k2") * c("ES"));
            put("S", -k("k1") * c("E") * c("S") + k("k-1") * c("ES"));
            put(
                "ES",
                k("k1") * c("E") * c("S") - k("k-1") * c("ES") - k("k2") * c("ES") - k("k3") * c("ES") * c("I")
                    + k("k-3") * c("ESI"),
            );
            put("P", k("k2") * c("ES"));
            put("I", -k("k3") * c("ES") * c("I") + k("k-3") * c("ESI"));
            put("ESI", k("k3") * c("ES") * c("I") - k("k-3") * c("ESI"));
        }
        PingPongBiBi => {
            put("E", -k("k1") * c("E") * c("A") + k("k6") * c("EQ"));
            put("A", -k("k1") * c("E") * c("A"));
            put("EA", k("k1") * c("E") * c("A") - k("k2") * c("EA") + k("k-2") * c("FP"));
            put("FP", k("k2") * c("EA") - k("k-2") * c("FP") - k("k3") * c("FP"));
            put("F", k("k3") * c("FP") - k("k4") * c("F") * c("B"));
            put("P", k("k3") * c("FP"));
            put("B", -k("k4") * c("F") * c("B"));
            put("FB", k("k4") * c("F") * c("B") - k("k5") * c("FB") + k("k-5") * c("EQ"));
            put("EQ", k("k5") * c("FB") - k("k-5") * c("EQ") - k("k6") * c("EQ"));
            put("Q", k("k6") * c("EQ"));
        }
        PingPongBiBiParallel => {
            put("E", -k("k1") * c("E") * c("D") + k("k6") * c("ET") + k("k9") * c("EC"));
            put("D", -k("k1") * c("E") * c("D"));
            put("ED", k("k1") * c("E") * c("D") - k("k2") * c("ED") + k("k-2") * c("FP"));
            put("FP", k("k2") * c("ED") - k("k-2") * c("FP") - k("k3") * c("FP"));
            put("F", k("k3") * c("FP") - k("k4") * c("F") * c("A") - k("k7") * c("F") * c("B"));
            put("P", k("k3") * c("FP"));
            put("A", -k("k4") * c("F") * c("A"));
            put("FA", k("k4") * c("F") * c("A") - k("k5") * c("FA") + k("k-5") * c("ET"));
            put("ET", k("k5") * c("FA") - k("k-5") * c("ET") - k("k6") * c("ET"));
            put("T", k("k6") * c("ET"));
            put("B", -k("k7") * c("F") * c("B"));
            put("FB", k("k7") * c("F") * c("B") - k("k8") * c("FB") + k("k-8") * c("EC"));
            put("EC", k("k8") * c("FB") - k("k-8") * c("EC") - k("k9") * c("EC"));
            put("C", k("k9") * c("EC"));
        }
        TernaryComplexRandom => {
            put("E", -k("k1") * c("E") * c("A") - k("k2") * c("E") * c("B") + k("k8") * c("EP") + k("k9") * c("EQ"));
            put("A", -k("k1") * c("E") * c("A") - k("k4") * c("EB") * c("A"));
            put("B", -k("k2") * c("E") * c("B") - k("k3") * c("EA") * c("B"));
            put("EA", k("k1") * c("E") * c("A") - k("k3") * c("EA") * c("B"));
            put("EB", k("k2") * c("E") * c("B") - k("k4") * c("EB") * c("A"));
            put(
                "EAB",
                k("k3") * c("EA") * c("B") + k("k4") * c("EB") * c("A") - k("k5") * c("EAB") + k("k-5") * c("EPQ"),
            );
            put("EPQ", k("k5") * c("EAB") - k("k-5") * c("EPQ") - k("k6") * c("EPQ") - k("k7") * c("EPQ"));
            put("EP", k("k6") * c("EPQ") - k("k8") * c("EP"));
            put("EQ", k("k7") * c("EPQ") - k("k9") * c("EQ"));
            put("P", k("k7") * c("EPQ") + k("k8") * c("EP"));
            put("Q", k("k6") * c("EPQ") + k("k9") * c("EQ"));
        }
        RapidEquilibriumRandom => {
            let r1 = k("k1") * c("E") * c("A") - k("k-1") * c("EA");
            let r2 = k("k2") * c("EA") * c("D") - k("k-2") * c("EDA");
            let r3 = k("k3") * c("EDA") - k("k-3") * c("E") * c("P") * c("T");
            let r4 = k("k4") * c("E") * c("D") - k("k-4") * c("ED");
            let r5 = k("k5") * c("ED") * c("A") - k("k-5") * c("EDA");
            let r6 = k("k6") * c("ED") * c("B") - k("k-6") * c("EDB");
            let r7 = k("k7") * c("EDB") - k("k-7") * c("E") * c("P") * c("C");
            let r8 = k("k8") * c("E") * c("B") - k("k-8") * c("EB");
            let r9 = k("k9") * c("EB") * c("D") - k("k-9") * c("EDB");
            put("E", -r1 + r3 - r4 + r7 - r8);
            put("A", -r1 - r5);
            put("B", -r6 - r8);
            put("D", -r2 - r4 - r9);
            put("EA", r1 - r2);
            put("ED", r4 - r5 - r6);
            put("EB", r8 - r9);
            put("EDA", r2 - r3 + r5);
            put("EDB", r6 - r7 + r9);
            put("P", r3 + r7);
            put("T", r3);
            put("C", r7);
        }
        FirstOrder => {
            put("A", -k("k1") * c("A"));
            put("B", k("k1") * c("A"));
        }
        SecondOrder => {
            put("A", -k("k1") * c("A") * c("B"));
            put("B", -k("k1") * c("A") * c("B"));
            put("C", k("k1") * c("A") * c("B"));
        }
    }
    d.into_iter().collect()
}

/// Species forming the conserved enzyme (or total mass) pool of each mechanism.
pub fn enzyme_pool(kind: MechanismKind) -> Vec<String> {
    use MechanismKind::*;
    let v: &[&str] = match kind {
        EnzymeActivation => &["E0", "E"],
        ReactionChain(n) => return (1..=n).map(|i| format!("A{i}")).collect(),
        MichaelisMenten => &["E", "ES"],
        CompetitiveInhibition => &["E", "ES", "EI"],
        NonCompetitiveInhibition => &["E", "ES", "EI", "ESI"],
        AntiCompetitiveInhibition => &["E", "ES", "ESI"],
        PingPongBiBi => &["E", "EA", "FP", "F", "FB", "EQ"],
        PingPongBiBiParallel => &["E", "ED", "FP", "F", "FA", "ET", "FB", "EC"],
        TernaryComplexRandom => &["E", "EA", "EB", "EAB", "EPQ", "EP", "EQ"],
        RapidEquilibriumRandom => &["E", "EA", "ED", "EB", "EDA", "EDB"],
        FirstOrder => &["A", "B"],
        SecondOrder => &["A", "C"],
    };
    v.iter().map(|s| s.to_string()).collect()
}

/// Rate constants, initial state and horizon used for the well-mixed benchmarks.
pub struct Benchmark {
    pub kind: MechanismKind,
    pub k: RateConstants,
    pub initial: BTreeMap<String, f64>,
    pub horizon: f64,
}

fn consts(pairs: &[(&str, f64)]) -> RateConstants {
    pairs.iter().map(|(n, v)| (n.to_string(), *v)).collect()
}

pub fn benchmark(kind: MechanismKind) -> Benchmark {
    use MechanismKind::*;
    let (k, init, horizon): (RateConstants, &[(&str, f64)], f64) = match kind {
        EnzymeActivation => (consts(&[("k1", 2.0), ("k-1", 0.5)]), &[("E0", 1.0)], 5.0),
        ReactionChain(_) => (consts(&[("k1", 1.0), ("k2", 0.5), ("k3", 0.25)]), &[("A1", 1.0)], 10.0),
        MichaelisMenten => (consts(&[("k1", 1e3), ("k-1", 1.0), ("k2", 10.0)]), &[("E", 1e-2), ("S", 1.0)], 10.0),
        CompetitiveInhibition => (
            consts(&[("k1", 100.0), ("k-1", 1.0), ("k2", 5.0), ("k3", 50.0), ("k-3", 1.0)]),
            &[("E", 0.05), ("S", 1.0), ("I", 0.2)],
            10.0,
        ),
        NonCompetitiveInhibition => (
            consts(&[
                ("k1", 100.0),
                ("k-1", 1.0),
                ("k2", 5.0),
                ("k3", 50.0),
                ("k-3", 2.0),
                ("k4", 20.0),
                ("k-4", 1.0),
                ("k5", 20.0),
                ("k-5", 1.0),
            ]),
            &[("E", 0.05), ("S", 1.0), ("I", 0.2)],
            10.0,
        ),
        AntiCompetitiveInhibition => (
            consts(&[("k1", 100.0), ("k-1", 1.0), ("k2", 5.0), ("k3", 30.0), ("k-3", 1.0)]),
            &[("E", 0.05), ("S", 1.0), ("I", 0.2)],
            10.0,
        ),
        PingPongBiBi => (
            consts(&[
                ("k1", 50.0),
                ("k2", 10.0),
                ("k-2", 1.0),
                ("k3", 5.0),
                ("k4", 50.0),
                ("k5", 10.0),
                ("k-5", 1.0),
                ("k6", 5.0),
            ]),
            &[("E", 0.05), ("A", 1.0), ("B", 1.0)],
            10.0,
        ),
        PingPongBiBiParallel => (
            consts(&[
                ("k1", 50.0),
                ("k2", 10.0),
                ("k-2", 1.0),
                ("k3", 5.0),
                ("k4", 40.0),
                ("k5", 10.0),
                ("k-5", 1.0),
                ("k6", 5.0),
                ("k7", 30.0),
                ("k8", 8.0),
                ("k-8", 1.0),
                ("k9", 4.0),
            ]),
            &[("E", 0.05), ("D", 1.0), ("A", 0.5), ("B", 0.5)],
            10.0,
        ),
        TernaryComplexRandom => (
            consts(&[
                ("k1", 20.0),
                ("k2", 20.0),
                ("k3", 40.0),
                ("k4", 40.0),
                ("k5", 10.0),
                ("k-5", 1.0),
                ("k6", 5.0),
                ("k7", 5.0),
                ("k8", 10.0),
                ("k9", 10.0),
            ]),
            &[("E", 0.05), ("A", 1.0), ("B", 1.0)],
            10.0,
        ),
        RapidEquilibriumRandom => (
            consts(&[
                ("k1", 20.0),
                ("k-1", 1.0),
                ("k2", 20.0),
                ("k-2", 1.0),
                ("k3", 5.0),
                ("k-3", 0.1),
                ("k4", 20.0),
                ("k-4", 1.0),
                ("k5", 20.0),
                ("k-5", 1.0),
                ("k6", 20.0),
                ("k-6", 1.0),
                ("k7", 5.0),
                ("k-7", 0.1),
                ("k8", 20.0),
                ("k-8", 1.0),
                ("k9", 20.0),
                ("k-9", 1.0),
            ]),
            &[("E", 0.05), ("A", 1.0), ("B", 1.0), ("D", 1.0)],
            10.0,
        ),
        FirstOrder => (consts(&[("k1", 1.0)]), &[("A", 1.0)], 1.0),
        SecondOrder => (consts(&[("k1", 2.0)]), &[("A", 1.0), ("B", 0.5)], 2.0),
    };
    let mut initial: BTreeMap<String, f64> = kind.species_names().into_iter().map(|s| (s, 0.0)).collect();
    for (n, v) in init {
        initial.insert(n.to_string(), *v);
    }
    Benchmark { kind, k, initial, horizon }
}

// ---------------------------------------------------------------- flux networks

/// Five metabolites A..E, steps v1..v5 and exchange fluxes b1..b3 in the printed sign
/// convention (b1 leaves A).
pub fn network_5x8_printed() -> Vec<Vec<i64>> {
    vec![
        vec![-1, 0, 0, 0, 0, -1, 0, 0],
        vec![1, -1, 0, 0, 1, 0, 0, 0],
        vec![0, 1, -1, -1, 0, 0, 0, 0],
        vec![0, 0, 1, 0, 0, 0, -1, 0],
        vec![0, 0, 0, 1, -1, 0, 0, -1],
    ]
}

/// The same network with b1 feeding A.
pub fn network_5x8_uptake() -> Vec<Vec<i64>> {
    let mut s = network_5x8_printed();
    s[0][5] = 1;
    s
}

pub fn to_dmatrix(s: &[Vec<i64>]) -> DMatrix<f64> {
    let rows = s.len();
    let cols = s.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows, cols, |i, j| s[i][j] as f64)
}
