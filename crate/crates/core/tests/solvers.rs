mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rdfem::assembly::{assemble_fba_system, assemble_transient, GlobalMass, WeightField};
use rdfem::network::{expand_mechanism, MechanismKind, RateConstants};
use rdfem::solvers::{
    integrate_transient, left_null_space_basis, linprog, min_norm_point, nnls, null_space_basis, rank, solve_dense,
    solve_flux, solve_linear, step_transient, FluxStatus, LpStatus, Nonlinear, SolverConfig,
};
use rdfem::sparse::{csr_from_triplets, from_dense};
use rdfem::Error;

fn first_order(k: f64) -> rdfem::network::ReactionNetwork {
    let k: RateConstants = [("k1".to_string(), k)].into_iter().collect();
    expand_mechanism(MechanismKind::FirstOrder, &k).unwrap()
}

#[test]
fn uniform_decay_matches_theta_recurrence() {
    let mesh = triangle_mesh([[0.0, 0.0], [1.5, 0.2], [0.3, 0.8]]);
    let net = first_order(2.0);
    let sys = assemble_transient(&mesh, &net, &WeightField::ones(&net, 3), &[]).unwrap();
    let c0 = sys.initial_state(&[1.0, 0.0]).unwrap();
    for (theta, dt) in [(1.0, 0.01), (0.5, 0.01), (0.5, 0.1)] {
        let cfg = SolverConfig { theta, dt, t_end: 10.0 * dt, ..Default::default() };
        let out = integrate_transient(&sys, &c0, &cfg, |_, _, _| Ok(())).unwrap();
        let factor: f64 = (1.0 - (1.0 - theta) * dt * 2.0) / (1.0 + theta * dt * 2.0);
        let expect = factor.powi(10);
        for i in 0..3 {
            assert!((out.state[sys.dof(0, i)] - expect).abs() < 1e-12, "theta {theta}");
            assert!((out.state[sys.dof(1, i)] - (1.0 - expect)).abs() < 1e-12);
        }
        assert_eq!(out.steps, 10);
    }
}

#[test]
fn inert_uniform_state_is_stationary() {
    let mesh = square_mesh(3);
    let mut net = first_order(0.0);
    net.set_diffusivity("A", 0.5).unwrap();
    net.set_diffusivity("B", 0.1).unwrap();
    let sys = assemble_transient(&mesh, &net, &WeightField::ones(&net, mesh.node_count()), &[]).unwrap();
    let c0 = sys.initial_state(&[0.7, 0.2]).unwrap();
    let cfg = SolverConfig { dt: 0.05, t_end: 1.0, ..Default::default() };
    let out = integrate_transient(&sys, &c0, &cfg, |_, _, _| Ok(())).unwrap();
    for (a, b) in out.state.iter().zip(&c0) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn callback_sees_every_step_and_can_abort() {
    let mesh = unit_triangle();
    let net = first_order(1.0);
    let sys = assemble_transient(&mesh, &net, &WeightField::ones(&net, 3), &[]).unwrap();
    let c0 = sys.initial_state(&[1.0, 0.0]).unwrap();
    let cfg = SolverConfig { dt: 0.1, t_end: 1.0, ..Default::default() };
    let mut seen = Vec::new();
    integrate_transient(&sys, &c0, &cfg, |step, t, _| {
        seen.push((step, t));
        Ok(())
    })
    .unwrap();
    assert_eq!(seen.len(), 11);
    assert_eq!(seen[0], (0, 0.0));
    assert!((seen[10].1 - 1.0).abs() < 1e-12);
    let err = integrate_transient(&sys, &c0, &cfg, |step, _, _| {
        if step == 3 {
            Err(Error::Invalid("stop".into()))
        } else {
            Ok(())
        }
    });
    assert!(err.is_err());
    let bad = SolverConfig { theta: 1.5, ..cfg.clone() };
    assert!(integrate_transient(&sys, &c0, &bad, |_, _, _| Ok(())).is_err());
}

#[test]
fn newton_and_picard_agree() {
    let mesh = square_mesh(2);
    let b = benchmark(MechanismKind::MichaelisMenten);
    let mut net = expand_mechanism(MechanismKind::MichaelisMenten, &b.k).unwrap();
    net.set_diffusivity("S", 0.05).unwrap();
    let sys = assemble_transient(&mesh, &net, &WeightField::ones(&net, 9), &[]).unwrap();
    let per: Vec<f64> = sys.species_names().iter().map(|n| b.initial[n]).collect();
    let c0 = sys.initial_state(&per).unwrap();
    let base = SolverConfig { dt: 1e-3, t_end: 0.05, nl_tol: 1e-13, nl_max_iter: 200, ..Default::default() };
    let newton = integrate_transient(&sys, &c0, &base, |_, _, _| Ok(())).unwrap();
    let picard_cfg = SolverConfig { nonlinear: Nonlinear::Picard, ..base };
    let picard = integrate_transient(&sys, &c0, &picard_cfg, |_, _, _| Ok(())).unwrap();
    for (a, p) in newton.state.iter().zip(&picard.state) {
        assert!((a - p).abs() < 1e-9);
    }
    assert!(newton.nonlinear_iterations <= picard.nonlinear_iterations);
}

#[test]
fn single_step_reports_iterations() {
    let mesh = unit_triangle();
    let b = benchmark(MechanismKind::SecondOrder);
    let net = expand_mechanism(MechanismKind::SecondOrder, &b.k).unwrap();
    let sys = assemble_transient(&mesh, &net, &WeightField::ones(&net, 3), &[]).unwrap();
    let per: Vec<f64> = sys.species_names().iter().map(|n| b.initial[n]).collect();
    let c0 = sys.initial_state(&per).unwrap();
    let step = step_transient(&sys, &c0, &SolverConfig { dt: 0.01, ..Default::default() }).unwrap();
    assert!(step.iterations >= 1);
    assert!(step.update_norm < 1e-10);
    let starved = SolverConfig { dt: 0.01, nl_max_iter: 1, nl_tol: 1e-300, ..Default::default() };
    assert!(matches!(step_transient(&sys, &c0, &starved), Err(Error::NonlinearDivergence { .. })));
}

#[test]
fn linear_solve_examples() {
    let eye = csr_from_triplets(3, 3, &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]);
    assert_eq!(solve_linear(&eye, &[1.0, 2.0, 3.0], 1e-14).unwrap(), vec![1.0, 2.0, 3.0]);
    let a = from_dense(&DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]));
    let x = solve_linear(&a, &[3.0, 3.0], 1e-14).unwrap();
    assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    let singular = from_dense(&DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]));
    assert!(matches!(solve_linear(&singular, &[1.0, 0.0], 1e-12), Err(Error::Singular { .. })));
    assert!(solve_linear(&eye, &[1.0], 1e-12).is_err());
}

#[test]
fn large_spd_sparse_matches_dense() {
    // 1D Laplacian plus a random diagonal shift, 400 unknowns
    let n = 400;
    let mut trip = Vec::new();
    for i in 0..n {
        trip.push((i, i, 2.0 + 0.01 * ((i * 37) % 17) as f64));
        if i + 1 < n {
            trip.push((i, i + 1, -1.0));
            trip.push((i + 1, i, -1.0));
        }
    }
    let a = csr_from_triplets(n, n, &trip);
    let b: Vec<f64> = (0..n).map(|i| ((i * 13) % 7) as f64 - 3.0).collect();
    let x = solve_linear(&a, &b, 1e-12).unwrap();
    let dense = rdfem::sparse::to_dense(&a);
    let reference = dense.clone().lu().solve(&DVector::from_column_slice(&b)).unwrap();
    assert!((DVector::from_column_slice(&x) - reference).amax() < 1e-10);
}

#[test]
fn null_space_examples() {
    let s = DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, -1.0]);
    let z = null_space_basis(&s, None);
    assert_eq!(z.ncols(), 1);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!((z[(0, 0)].abs() - r).abs() < 1e-15 && (z[(0, 0)] - z[(1, 0)]).abs() < 1e-15);
    assert_eq!(null_space_basis(&DMatrix::identity(3, 3), None).ncols(), 0);

    let printed = network_5x8_printed();
    let s = to_dmatrix(&printed);
    let z = null_space_basis(&s, None);
    let exact = rational_null_space(&to_q(&printed), 8);
    assert_eq!(z.ncols(), exact.len());
    assert_eq!(z.ncols(), 3);
    assert_eq!(rank(&s, None), rational_rank(&printed));
    assert!((&s * &z).amax() < 1e-13);
    assert!((z.transpose() * &z - DMatrix::identity(3, 3)).amax() < 1e-13);
    // every exact null vector lies in the span of the numeric basis
    for v in exact {
        let v = DVector::from_iterator(8, v.iter().map(qf));
        let proj = &z * (z.transpose() * &v);
        assert!((proj - v).amax() < 1e-12);
    }
    let l = left_null_space_basis(&s, None);
    assert_eq!(l.ncols(), 5 - rational_rank(&printed));
    assert!((l.transpose() * &s).amax() < 1e-13);
}

#[test]
fn flux_examples() {
    let inf = f64::INFINITY;
    let printed = to_dmatrix(&network_5x8_printed());
    let sys = assemble_fba_system(&GlobalMass::single_node(), &printed, &[(0.0, inf); 8], None).unwrap();
    let mut c = vec![0.0; 8];
    c[6] = 1.0;
    let sol = solve_flux(&sys, Some(&c)).unwrap();
    assert_eq!(sol.status, FluxStatus::Optimal);
    assert!(sol.objective.unwrap().abs() < 1e-12);

    let uptake = to_dmatrix(&network_5x8_uptake());
    let mut bounds = vec![(0.0, inf); 8];
    bounds[5] = (10.0, 10.0);
    let sys = assemble_fba_system(&GlobalMass::single_node(), &uptake, &bounds, None).unwrap();
    let sol = solve_flux(&sys, Some(&c)).unwrap();
    assert!((sol.objective.unwrap() - 10.0).abs() < 1e-9);
    assert!(sol.residual_norm < 1e-9);

    let unbounded = assemble_fba_system(&GlobalMass::single_node(), &uptake, &[(0.0, inf); 8], None).unwrap();
    assert_eq!(solve_flux(&unbounded, Some(&c)).unwrap().status, FluxStatus::Unbounded);
    let mut tight = vec![(0.0, inf); 8];
    tight[5] = (1.0, 1.0);
    tight[6] = (0.0, 0.0);
    tight[7] = (0.0, 0.0);
    let infeasible = assemble_fba_system(&GlobalMass::single_node(), &uptake, &tight, None).unwrap();
    assert_eq!(solve_flux(&infeasible, None).unwrap().status, FluxStatus::Infeasible);
}

#[test]
fn lp_status_examples() {
    let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
    let s = linprog(&a, &[1.0], Some(&[1.0, 2.0]), &[0.0, 0.0], &[f64::INFINITY; 2]).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    assert!((s.objective - 2.0).abs() < 1e-12);
    let s = linprog(&a, &[-1.0], Some(&[1.0, 2.0]), &[0.0, 0.0], &[f64::INFINITY; 2]).unwrap();
    assert_eq!(s.status, LpStatus::Infeasible);
    let d = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
    let s = linprog(&d, &[0.0], Some(&[1.0, 0.0]), &[0.0, 0.0], &[f64::INFINITY; 2]).unwrap();
    assert_eq!(s.status, LpStatus::Unbounded);
}

#[test]
fn nnls_small_example() {
    let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
    let sol = nnls(&a, &[1.0, -1.0, 0.0]);
    assert!(sol.x.iter().all(|&x| x >= 0.0));
    assert!((sol.residual - nnls_oracle(&a, &[1.0, -1.0, 0.0])).abs() < 1e-12);
}

fn lp_case() -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<i64>, Vec<i64>, Vec<i64>, Vec<i64>)> {
    (1usize..4, 2usize..7).prop_flat_map(|(m, n)| {
        (
            prop::collection::vec(prop::collection::vec(-2i64..=2, n), m),
            prop::collection::vec(0i64..=3, n),
            prop::collection::vec(1i64..=3, n),
            prop::collection::vec(-3i64..=3, n),
            prop::collection::vec(-1i64..=1, m),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lp_matches_vertex_enumeration((a, x0, hi, c, shift) in lp_case()) {
        let n = x0.len();
        let x0: Vec<i64> = x0.iter().zip(&hi).map(|(x, h)| (*x).min(*h)).collect();
        // feasible right-hand side, occasionally nudged off the polytope
        let b: Vec<i64> = a.iter().zip(&shift).map(|(row, s)| row.iter().zip(&x0).map(|(r, x)| r * x).sum::<i64>() + s * 7).collect();
        let lo = vec![0i64; n];
        let hi_opt: Vec<Option<i64>> = hi.iter().map(|&h| Some(h)).collect();
        let oracle = lp_vertex_oracle(&a, &b, &lo, &hi_opt, &c);
        let af = to_dmatrix(&a);
        let bf: Vec<f64> = b.iter().map(|&v| v as f64).collect();
        let cf: Vec<f64> = c.iter().map(|&v| v as f64).collect();
        let hf: Vec<f64> = hi.iter().map(|&v| v as f64).collect();
        let sol = linprog(&af, &bf, Some(&cf), &vec![0.0; n], &hf).unwrap();
        match oracle {
            None => prop_assert_eq!(sol.status, LpStatus::Infeasible),
            Some(best) => {
                prop_assert_eq!(sol.status, LpStatus::Optimal);
                prop_assert!((sol.objective - qf(&best.objective)).abs() < 1e-9);
                for j in 0..n {
                    prop_assert!(sol.x[j] >= -1e-9 && sol.x[j] <= hf[j] + 1e-9);
                }
                let r = &af * DVector::from_column_slice(&sol.x) - DVector::from_column_slice(&bf);
                prop_assert!(r.amax() < 1e-9);
            }
        }
    }

    #[test]
    fn min_norm_point_is_minimal(e in prop::collection::vec(-2.0f64..2.0, 10), x0 in prop::collection::vec(0.0f64..3.0, 5), dirs in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 5), 4)) {
        let e = DMatrix::from_row_slice(2, 5, &e);
        let rhs = (&e * DVector::from_column_slice(&x0)).as_slice().to_vec();
        let lower = vec![0.0; 5];
        let upper = vec![3.0; 5];
        let x = min_norm_point(&e, &rhs, &lower, &upper).unwrap();
        let xv = DVector::from_column_slice(&x);
        prop_assert!((&e * &xv - DVector::from_column_slice(&rhs)).amax() < 1e-9);
        prop_assert!(x.iter().all(|&v| (-1e-9..=3.0 + 1e-9).contains(&v)));
        prop_assert!(xv.norm() <= DVector::from_column_slice(&x0).norm() + 1e-9);
        // other feasible points reached by LP vertices are never shorter
        for d in dirs {
            let sol = linprog(&e, &rhs, Some(&d), &lower, &upper).unwrap();
            prop_assert_eq!(sol.status, LpStatus::Optimal);
            prop_assert!(xv.norm() <= DVector::from_column_slice(&sol.x).norm() + 1e-9);
        }
    }

    #[test]
    fn dense_solve_of_random_spd(seed in prop::collection::vec(-1.0f64..1.0, 100 * 20), rhs in prop::collection::vec(-1.0f64..1.0, 100)) {
        let g = DMatrix::from_row_slice(100, 20, &seed);
        let a = &g * g.transpose() + DMatrix::identity(100, 100);
        let x = solve_dense(&a, &rhs, 1e-12).unwrap();
        let chol = a.clone().cholesky().unwrap().solve(&DVector::from_column_slice(&rhs));
        prop_assert!((DVector::from_column_slice(&x) - chol).amax() < 1e-10);
    }

    #[test]
    fn nnls_matches_active_set_enumeration(p in prop::collection::vec(-1.0f64..1.0, 4 * 4), v in prop::collection::vec(-1.0f64..1.0, 4), rank_drop in any::<bool>()) {
        let mut p = DMatrix::from_row_slice(4, 4, &p);
        if rank_drop {
            let c = p.column(0) + p.column(1);
            p.set_column(3, &c);
        }
        let sol = nnls(&p, &v);
        prop_assert!(sol.x.iter().all(|&x| x >= 0.0));
        let r = (&p * DVector::from_column_slice(&sol.x) - DVector::from_column_slice(&v)).norm();
        prop_assert!((r - sol.residual).abs() < 1e-12);
        prop_assert!((sol.residual - nnls_oracle(&p, &v)).abs() < 1e-9);
    }
}
