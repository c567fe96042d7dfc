use crate::assembly::AssembledTransient;
use crate::error::{Error, Result};

use super::linear::solve_linear;

/// Concentrations in `[CLIP_THRESHOLD, 0)` after a step are set to zero.
pub const CLIP_THRESHOLD: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nonlinear {
    Newton,
    Picard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// 0 explicit Euler, 0.5 Crank–Nicolson, 1 implicit Euler.
    pub theta: f64,
    /// s
    pub dt: f64,
    /// s
    pub t_end: f64,
    pub nonlinear: Nonlinear,
    pub nl_tol: f64,
    pub nl_max_iter: usize,
    pub lin_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            theta: 1.0,
            dt: 1e-3,
            t_end: 1.0,
            nonlinear: Nonlinear::Newton,
            nl_tol: 1e-10,
            nl_max_iter: 50,
            lin_tol: 1e-12,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::Config(format!("theta must lie in [0, 1], got {}", self.theta)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if !(self.nl_tol > 0.0) || !(self.lin_tol > 0.0) || self.nl_max_iter == 0 {
            return Err(Error::Config("tolerances and iteration limits must be positive".into()));
        }
        Ok(())
    }

    /// Number of fixed steps covering `[0, t_end]`.
    pub fn step_count(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub state: Vec<f64>,
    pub iterations: usize,
    /// Final update norm `‖δ‖∞`.
    pub update_norm: f64,
}

fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// One θ-scheme step: solves
/// `M (C − Cn)/dt + θ res(C) + (1 − θ) res(Cn) = 0` by Newton or Picard iteration.
pub fn step_transient(sys: &AssembledTransient, c_n: &[f64], cfg: &SolverConfig) -> Result<StepResult> {
    cfg.validate()?;
    if c_n.len() != sys.n_dofs() {
        return Err(Error::Dimension(format!("state has {} entries, system {}", c_n.len(), sys.n_dofs())));
    }
    for &(dof, g) in sys.dirichlet() {
        if (c_n[dof] - g).abs() > 1e-12 * g.abs().max(1.0) {
            return Err(Error::Invalid(format!("state violates the Dirichlet value {g} at unknown {dof}")));
        }
    }
    let theta = cfg.theta;
    let inv_dt = 1.0 / cfg.dt;
    let explicit_part: Vec<f64> = if theta < 1.0 {
        sys.residual(c_n).into_iter().map(|r| (1.0 - theta) * r).collect()
    } else {
        vec![0.0; c_n.len()]
    };
    let mass = sys.mass();
    let mut fixed = vec![false; c_n.len()];
    for &(dof, _) in sys.dirichlet() {
        fixed[dof] = true;
    }

    let mut c = c_n.to_vec();
    let mut update = f64::INFINITY;
    for iter in 1..=cfg.nl_max_iter {
        let diff: Vec<f64> = c.iter().zip(c_n).map(|(a, b)| a - b).collect();
        let m_diff = crate::sparse::mul_vec(&mass, &diff);
        let res = if theta > 0.0 { sys.residual(&c) } else { vec![0.0; c.len()] };
        let mut rhs: Vec<f64> = (0..c.len())
            .map(|i| if fixed[i] { 0.0 } else { -(m_diff[i] * inv_dt + theta * res[i] + explicit_part[i]) })
            .collect();

        let jac_vals = if theta > 0.0 {
            sys.jacobian_values(&c, cfg.nonlinear == Nonlinear::Picard)
        } else {
            vec![0.0; sys.pattern_len()]
        };
        let vals: Vec<f64> = sys.mass_values().iter().zip(&jac_vals).map(|(m, j)| m * inv_dt + theta * j).collect();
        let mut a = sys.pattern_matrix(vals);
        crate::assembly::apply_dirichlet(&mut a, &mut rhs, &sys.dirichlet().iter().map(|&(d, _)| (d, 0.0)).collect::<Vec<_>>());

        let delta = solve_linear(&a, &rhs, cfg.lin_tol)?;
        for (ci, d) in c.iter_mut().zip(&delta) {
            *ci += d;
        }
        update = inf_norm(&delta);
        if !update.is_finite() {
            break;
        }
        if update <= cfg.nl_tol * inf_norm(&c).max(1.0) {
            for (i, v) in c.iter_mut().enumerate() {
                if *v < 0.0 {
                    if *v >= CLIP_THRESHOLD {
                        *v = 0.0;
                    } else {
                        let (s, n) = (i / sys.n_nodes(), i % sys.n_nodes());
                        return Err(Error::NegativeConcentration {
                            value: *v,
                            context: format!("species {} at node index {n}", sys.species_names()[s]),
                        });
                    }
                }
            }
            return Ok(StepResult { state: c, iterations: iter, update_norm: update });
        }
    }
    Err(Error::NonlinearDivergence { iterations: cfg.nl_max_iter, update })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransientSummary {
    pub state: Vec<f64>,
    pub steps: usize,
    pub nonlinear_iterations: usize,
    /// Update norm of the last nonlinear iteration of the last step (0 without steps).
    pub last_update_norm: f64,
}

/// Advances `c0` over `cfg.step_count()` steps; `observer(step, t, state)` sees the initial
/// state (step 0) and every step after it.
pub fn integrate_transient<F>(
    sys: &AssembledTransient,
    c0: &[f64],
    cfg: &SolverConfig,
    mut observer: F,
) -> Result<TransientSummary>
where
    F: FnMut(usize, f64, &[f64]) -> Result<()>,
{
    cfg.validate()?;
    let steps = cfg.step_count();
    let mut c = c0.to_vec();
    observer(0, 0.0, &c)?;
    let mut iterations = 0;
    let mut last_update_norm = 0.0;
    for k in 1..=steps {
        let t = k as f64 * cfg.dt;
        let r = step_transient(sys, &c, cfg).map_err(|e| e.context(format!("time step {k} (t = {t:e} s)")))?;
        iterations += r.iterations;
        last_update_norm = r.update_norm;
        c = r.state;
        observer(k, t, &c)?;
    }
    Ok(TransientSummary { state: c, steps, nonlinear_iterations: iterations, last_update_norm })
}
