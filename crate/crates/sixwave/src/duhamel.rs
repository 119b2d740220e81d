//! The Lambda time-integral map and the Picard fixed-point solvers.
//!
//! The iteration variable is the transported trajectory g(t) = T^{-t}f(t), so
//! a sweep evaluates, at each time node s, the field T^{-s} C[T^s g(s)] on the
//! grid and integrates in time by composite trapezoid. Prefix sums make every
//! output node of Lambda a difference of two cumulative integrals.

use crate::bounds::{thresholds, Thresholds};
use crate::collision::fast::TripleTable;
use crate::error::{Result, SixwaveError};
use crate::field::{maxwellian, transport, weighted_norm, Field, GridData, Trajectory};
use crate::quadrature::QuadratureSpec;
use crate::weights::WeightParams;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Strictly increasing, contains 0; may span negative times.
    pub time_grid: Vec<f64>,
    pub picard_tol: f64,
    pub max_iters: usize,
    pub quadrature: QuadratureSpec,
    pub center_on_maxwellian: bool,
    pub enforce_thresholds: bool,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.time_grid.is_empty() || !self.time_grid.windows(2).all(|p| p[0] < p[1]) {
            return Err(SixwaveError::Config(
                "time grid must be strictly increasing".into(),
            ));
        }
        if !self.time_grid.iter().any(|t| t.abs() < 1e-12) {
            return Err(SixwaveError::Config("time grid must contain 0".into()));
        }
        if !(self.picard_tol > 0.0) {
            return Err(SixwaveError::Config("picard_tol must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(SixwaveError::Config("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// The fixed point t -> T^{-t}f(t).
    pub trajectory: Trajectory,
    pub residual_history: Vec<f64>,
    pub contraction_ratios: Vec<f64>,
    pub converged: bool,
    /// For the Maxwellian-centered solver: whether the trajectory stayed in
    /// the (1 +/- 2 r_p) M bracket at every grid node.
    pub in_maxwellian_ball: Option<bool>,
}

/// The integrand of Lambda at each time node, materialized on the grid:
/// I(s) = T^{-s} C[T^s g(s)](s).
pub(crate) fn collision_integrand(
    g: &Trajectory,
    table: &TripleTable,
) -> Vec<GridData> {
    let grid = table.grid();
    g.times()
        .iter()
        .zip(g.fields())
        .map(|(&s, gi)| {
            let f_phys = transport(gi, s).sample_on(grid);
            let h = table.collide_grid(f_phys.grid_data().expect("sampled"));
            // compose back with T^{-s}: value at (x, v) is H(x + s v, v)
            let mut out = GridData::zeros(grid);
            for i in 0..grid.nx {
                let x = grid.x(i);
                for j in 0..grid.nv {
                    let v = grid.v(j);
                    *out.at_mut(i, j) = h.eval(x + s * v, v);
                }
            }
            out
        })
        .collect()
}

fn node_index(times: &[f64], t: f64) -> Result<usize> {
    if !t.is_finite() {
        return Err(SixwaveError::NeedsTailPolicy(t));
    }
    let scale = 1.0 + times[0].abs().max(times[times.len() - 1].abs());
    times
        .iter()
        .position(|&s| (s - t).abs() < 1e-10 * scale)
        .ok_or(SixwaveError::NeedsTailPolicy(t))
}

/// Lambda_{a,b}[g](t) on the trajectory's own time grid. `None` endpoints
/// stand for the output node t itself, so e.g. (Some(0), None) realizes the
/// Duhamel integral from 0 to t and (None, Some(T)) the tail integral from t
/// to T. Finite endpoints must be grid nodes.
pub fn lambda_map(
    g: &Trajectory,
    a: Option<f64>,
    b: Option<f64>,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    let table = TripleTable::build(&cfg.quadrature);
    lambda_map_with(g, a, b, &table)
}

pub(crate) fn lambda_map_with(
    g: &Trajectory,
    a: Option<f64>,
    b: Option<f64>,
    table: &TripleTable,
) -> Result<Trajectory> {
    let times = g.times();
    let n = times.len();
    let grid = table.grid();
    let a_idx = a.map(|t| node_index(times, t)).transpose()?;
    let b_idx = b.map(|t| node_index(times, t)).transpose()?;

    let integrand = collision_integrand(g, table);
    // cumulative trapezoid from the first node
    let mut prefix: Vec<GridData> = Vec::with_capacity(n);
    prefix.push(GridData::zeros(grid));
    for k in 1..n {
        let dt = 0.5 * (times[k] - times[k - 1]);
        let mut next = prefix[k - 1].clone();
        for (w, (a_val, b_val)) in next
            .values
            .iter_mut()
            .zip(integrand[k - 1].values.iter().zip(integrand[k].values.iter()))
        {
            *w += dt * (a_val + b_val);
        }
        prefix.push(next);
    }

    let fields = (0..n)
        .map(|k| {
            let lo = a_idx.unwrap_or(k);
            let hi = b_idx.unwrap_or(k);
            let mut out = prefix[hi].clone();
            for (w, p) in out.values.iter_mut().zip(prefix[lo].values.iter()) {
                *w -= p;
            }
            Field::from_grid(out)
        })
        .collect();
    Trajectory::new(times.to_vec(), fields)
}

/// Runs the fixed-point iteration g <- base + Lambda_{0,t}[g] from `seed`.
pub(crate) fn picard_iterate(
    base: &Field,
    seed: Trajectory,
    w: &WeightParams,
    cfg: &SolverConfig,
) -> Result<Solution> {
    let table = TripleTable::build(&cfg.quadrature);
    let grid = cfg.quadrature.grid;
    let mut g = seed;
    let mut residual_history = Vec::new();
    let mut contraction_ratios = Vec::new();
    let mut converged = false;
    for _ in 0..cfg.max_iters {
        let lam = lambda_map_with(&g, Some(0.0), None, &table)?;
        let next_fields: Vec<Field> = lam
            .fields()
            .iter()
            .map(|li| base.lin_comb(1.0, li, 1.0, grid))
            .collect();
        let next = Trajectory::new(g.times().to_vec(), next_fields)?;
        let mut residual: f64 = 0.0;
        for (old, new) in g.fields().iter().zip(next.fields()) {
            let diff = new.lin_comb(1.0, old, -1.0, grid);
            residual = residual.max(weighted_norm(&diff, w)?);
        }
        if let Some(&prev) = residual_history.last() {
            contraction_ratios.push(if prev > 0.0 { residual / prev } else { 0.0 });
        }
        residual_history.push(residual);
        g = next;
        if residual < cfg.picard_tol {
            converged = true;
            break;
        }
    }
    Ok(Solution {
        trajectory: g,
        residual_history,
        contraction_ratios,
        converged,
        in_maxwellian_ball: None,
    })
}

fn regime_gate(f0: &Field, w: &WeightParams, cfg: &SolverConfig, thr: &Thresholds) -> Result<f64> {
    let norm = weighted_norm(f0, w)?;
    if cfg.enforce_thresholds && norm > thr.r_e {
        return Err(SixwaveError::OutsideSmallDataRegime {
            norm,
            limit: thr.r_e,
        });
    }
    Ok(norm)
}

/// Small-data mild solution: iterates g <- f0 + Lambda_{0,t}[g] from the
/// constant trajectory f0.
pub fn picard_solve(f0: &Field, w: &WeightParams, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    let thr = thresholds(w);
    regime_gate(f0, w, cfg, &thr)?;
    // Seed with the grid-sampled data so every iterate shares the grid
    // representation; an analytic seed would transport exactly while later
    // iterates resample, polluting the first contraction ratio with a
    // one-time O(h^2) difference.
    let seed = Trajectory::constant(
        cfg.time_grid.clone(),
        f0.sample_on(cfg.quadrature.grid),
    )?;
    picard_iterate(f0, seed, w, cfg)
}

/// Maxwellian-centered solution: same map, seeded at the constant trajectory
/// M, with ball membership relative to M tracked on the converged trajectory.
pub fn picard_solve_centered(
    f0: &Field,
    w: &WeightParams,
    cfg: &SolverConfig,
) -> Result<Solution> {
    cfg.validate()?;
    let thr = thresholds(w);
    let Some((lo, hi)) = thr.r_p_interval else {
        return Err(SixwaveError::MaxwellianRegimeUnavailable);
    };
    let m = maxwellian(w);
    let grid = cfg.quadrature.grid;
    let dist = weighted_norm(&f0.lin_comb(1.0, &m, -1.0, grid), w)?;
    if dist >= hi {
        return Err(SixwaveError::OutsideSmallDataRegime {
            norm: dist,
            limit: hi,
        });
    }
    // smallest admissible radius with f0 strictly inside
    let r_p = lo.max(dist * (1.0 + 1e-9) + f64::MIN_POSITIVE).min(hi);
    let seed = Trajectory::constant(cfg.time_grid.clone(), m.sample_on(grid))?;
    let mut sol = picard_iterate(f0, seed, w, cfg)?;
    let mut inside = true;
    for gi in sol.trajectory.fields() {
        for i in 0..grid.nx {
            let x = grid.x(i);
            for j in 0..grid.nv {
                let v = grid.v(j);
                let mv = m.eval(x, v);
                let val = gi.eval(x, v);
                let pad = 1e-12 * (1.0 + mv);
                if val < (1.0 - 2.0 * r_p) * mv - pad || val > (1.0 + 2.0 * r_p) * mv + pad {
                    inside = false;
                }
            }
        }
    }
    sol.in_maxwellian_ball = Some(inside);
    Ok(sol)
}

/// Stability ratio |||T^{-t}f - T^{-t}g||| / ||f0 - g0|| for two small data.
pub fn stability(f0: &Field, g0: &Field, w: &WeightParams, cfg: &SolverConfig) -> Result<f64> {
    let grid = cfg.quadrature.grid;
    let denom = weighted_norm(&f0.lin_comb(1.0, g0, -1.0, grid), w)?;
    if denom == 0.0 {
        return Ok(0.0);
    }
    let a = picard_solve(f0, w, cfg)?;
    let b = picard_solve(g0, w, cfg)?;
    let mut num: f64 = 0.0;
    for (fa, fb) in a.trajectory.fields().iter().zip(b.trajectory.fields()) {
        num = num.max(weighted_norm(&fa.lin_comb(1.0, fb, -1.0, grid), w)?);
    }
    Ok(num / denom)
}
