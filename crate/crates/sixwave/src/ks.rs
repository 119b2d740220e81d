//! Associated linear problem and the monotone Kaniel-Shinbrot bracketing.
//!
//! The ALP (d/dt + v d/dx) f = h - f R[g,..] is solved in the transported
//! variable u(t) = T^{-t}f(t) by the integrating-factor formula
//!     u(t) = f0 e^{-rho(t)} + int_0^t e^{rho(s) - rho(t)} q(s) ds,
//! where rho(t) is the time integral of the transported loss rate and q the
//! transported source. All weights are nonnegative for t >= 0, so the map
//! preserves pointwise order in (f0, -g, h) exactly at the quadrature level —
//! the property the bracketing iteration rests on.

use crate::bounds::thresholds;
use crate::collision::fast::TripleTable;
use crate::duhamel::{Solution, SolverConfig};
use crate::error::{Result, SixwaveError};
use crate::field::{maxwellian, transport, weighted_norm, Field, GridData, Trajectory};
use crate::weights::WeightParams;

/// One bracketing iterate: lower and upper transported trajectories.
#[derive(Debug, Clone)]
pub struct KsState {
    pub lower: Trajectory,
    pub upper: Trajectory,
    pub n: usize,
    /// Triple norm of upper - lower per iteration.
    pub gap_history: Vec<f64>,
    /// Time-node index attaining the smallest per-node gap, per iteration.
    pub min_gap_nodes: Vec<usize>,
}

fn min_value(f: &Field, grid: crate::field::GridSpec) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..grid.nx {
        let x = grid.x(i);
        for j in 0..grid.nv {
            m = m.min(f.eval(x, grid.v(j)));
        }
    }
    m
}

/// Transported gain and rate integrands of a trajectory, sharing one
/// materialization and table pass per node:
/// (T^{-s} G[T^s g(s)], T^{-s} R[T^s g(s)]).
fn gain_rate_integrands(
    g: &Trajectory,
    table: &TripleTable,
) -> (Vec<GridData>, Vec<GridData>) {
    let grid = table.grid();
    let mut gains = Vec::with_capacity(g.len());
    let mut rates = Vec::with_capacity(g.len());
    for (&s, gi) in g.times().iter().zip(g.fields()) {
        let f_phys = transport(gi, s).sample_on(grid);
        let (gain, rate) = table.gain_and_rate_grid(f_phys.grid_data().expect("sampled"));
        let mut gain_t = GridData::zeros(grid);
        let mut rate_t = GridData::zeros(grid);
        for i in 0..grid.nx {
            let x = grid.x(i);
            for j in 0..grid.nv {
                let v = grid.v(j);
                *gain_t.at_mut(i, j) = gain.eval(x + s * v, v);
                *rate_t.at_mut(i, j) = rate.eval(x + s * v, v);
            }
        }
        gains.push(gain_t);
        rates.push(rate_t);
    }
    (gains, rates)
}

fn rate_integrand(g: &Trajectory, table: &TripleTable) -> Vec<GridData> {
    let grid = table.grid();
    g.times()
        .iter()
        .zip(g.fields())
        .map(|(&s, gi)| {
            let f_phys = transport(gi, s).sample_on(grid);
            let rate = table.rate_grid(f_phys.grid_data().expect("sampled"));
            let mut rate_t = GridData::zeros(grid);
            for i in 0..grid.nx {
                let x = grid.x(i);
                for j in 0..grid.nv {
                    let v = grid.v(j);
                    *rate_t.at_mut(i, j) = rate.eval(x + s * v, v);
                }
            }
            rate_t
        })
        .collect()
}

/// Composite trapezoid weights of the signed integral from times[z] to
/// times[k] over the nodes between them; empty when k = z.
fn signed_trapezoid(times: &[f64], z: usize, k: usize) -> Vec<(usize, f64)> {
    let (lo, hi, sign) = if k >= z { (z, k, 1.0) } else { (k, z, -1.0) };
    let mut out = Vec::with_capacity(hi - lo + 1);
    for s in lo..=hi {
        let left = if s > lo { times[s] - times[s - 1] } else { 0.0 };
        let right = if s < hi { times[s + 1] - times[s] } else { 0.0 };
        out.push((s, sign * 0.5 * (left + right)));
    }
    out
}

/// Core integrating-factor evaluation from materialized integrands.
fn alp_from_integrands(
    f0: &GridData,
    rates: &[GridData],
    sources: &[GridData],
    times: &[f64],
    zero_idx: usize,
) -> Vec<GridData> {
    let grid = f0.spec;
    let n = times.len();
    let npts = f0.values.len();
    // rho(t_k) = cumulative trapezoid of the transported rate from t = 0
    let mut rho: Vec<Vec<f64>> = vec![vec![0.0; npts]; n];
    for k in (zero_idx + 1)..n {
        let dt = 0.5 * (times[k] - times[k - 1]);
        for p in 0..npts {
            rho[k][p] = rho[k - 1][p] + dt * (rates[k - 1].values[p] + rates[k].values[p]);
        }
    }
    for k in (0..zero_idx).rev() {
        let dt = 0.5 * (times[k + 1] - times[k]);
        for p in 0..npts {
            rho[k][p] = rho[k + 1][p] - dt * (rates[k].values[p] + rates[k + 1].values[p]);
        }
    }
    (0..n)
        .map(|k| {
            let mut out = GridData::zeros(grid);
            let weights = signed_trapezoid(times, zero_idx, k);
            for p in 0..npts {
                let rk = rho[k][p];
                let mut acc = f0.values[p] * (-rk).exp();
                for &(s, w) in &weights {
                    acc += w * (rho[s][p] - rk).exp() * sources[s].values[p];
                }
                out.values[p] = acc;
            }
            out
        })
        .collect()
}

fn check_nonneg(name: &str, m: f64) -> Result<()> {
    if m < -1e-12 {
        let _ = name;
        return Err(SixwaveError::AlpNegativeData(m));
    }
    Ok(())
}

/// Solves the associated linear problem. `g` supplies the loss-rate slots and
/// `h` the source; both follow the trajectory convention (fields are the
/// transported values T^{-t} g(t), T^{-t} h(t)).
pub fn alp_solve(
    f0: &Field,
    g: &Trajectory,
    h: &Trajectory,
    w: &WeightParams,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    let _ = w;
    cfg.validate()?;
    let grid = cfg.quadrature.grid;
    if g.times() != cfg.time_grid.as_slice() || h.times() != cfg.time_grid.as_slice() {
        return Err(SixwaveError::Config(
            "ALP trajectories must live on the solver time grid".into(),
        ));
    }
    check_nonneg("f0", min_value(f0, grid))?;
    for t in g.fields().iter().chain(h.fields()) {
        check_nonneg("trajectory", min_value(t, grid))?;
    }
    let table = TripleTable::build(&cfg.quadrature);
    let rates = rate_integrand(g, &table);
    let sources: Vec<GridData> = h
        .fields()
        .iter()
        .map(|f| f.sample_on(grid).grid_data().expect("sampled").clone())
        .collect();
    let f0g = f0.sample_on(grid).grid_data().expect("sampled").clone();
    let fields = alp_from_integrands(&f0g, &rates, &sources, g.times(), g.zero_index())
        .into_iter()
        .map(Field::from_grid)
        .collect();
    Trajectory::new(g.times().to_vec(), fields)
}

/// Pointwise grid comparison a <= b; returns the worst violation if any.
fn order_violation(
    a: &Trajectory,
    b: &Trajectory,
    grid: crate::field::GridSpec,
) -> Option<(f64, f64, f64, f64)> {
    let mut worst: Option<(f64, f64, f64, f64)> = None;
    for ((&t, fa), fb) in a.times().iter().zip(a.fields()).zip(b.fields()) {
        for i in 0..grid.nx {
            let x = grid.x(i);
            for j in 0..grid.nv {
                let v = grid.v(j);
                let va = fa.eval(x, v);
                let vb = fb.eval(x, v);
                let tol = 1e-12 * (1.0 + va.abs() + vb.abs());
                let gap = va - vb;
                if gap > tol && worst.map_or(true, |w| gap > w.3) {
                    worst = Some((t, x, v, gap));
                }
            }
        }
    }
    worst
}

/// Monotone bracketing solver for nonnegative small data.
pub fn ks_solve_with_state(
    f0: &Field,
    w: &WeightParams,
    cfg: &SolverConfig,
) -> Result<(Solution, KsState)> {
    cfg.validate()?;
    let grid = cfg.quadrature.grid;
    let thr = thresholds(w);
    check_nonneg("f0", min_value(f0, grid))?;
    let norm = weighted_norm(f0, w)?;
    if norm > thr.r_ks {
        return Err(SixwaveError::OutsideKsRegime {
            norm,
            limit: thr.r_ks,
        });
    }
    let times = cfg.time_grid.clone();
    let zero_idx = {
        let t = Trajectory::constant(times.clone(), Field::zero(grid))?;
        t.zero_index()
    };
    let table = TripleTable::build(&cfg.quadrature);
    let f0g = f0.sample_on(grid).grid_data().expect("sampled").clone();

    let c0 = 20.0 / 19.0 * norm;
    let mut lower = Trajectory::constant(times.clone(), Field::zero(grid))?;
    let mut upper = Trajectory::constant(
        times.clone(),
        maxwellian(w).scale(c0).sample_on(grid),
    )?;
    let mut gap_history = Vec::new();
    let mut min_gap_nodes = Vec::new();
    let mut converged = false;
    let mut n = 0;
    while n < cfg.max_iters {
        let (gain_l, rate_l) = gain_rate_integrands(&lower, &table);
        let (gain_u, rate_u) = gain_rate_integrands(&upper, &table);
        let next_lower = Trajectory::new(
            times.clone(),
            alp_from_integrands(&f0g, &rate_u, &gain_l, &times, zero_idx)
                .into_iter()
                .map(Field::from_grid)
                .collect(),
        )?;
        let next_upper = Trajectory::new(
            times.clone(),
            alp_from_integrands(&f0g, &rate_l, &gain_u, &times, zero_idx)
                .into_iter()
                .map(Field::from_grid)
                .collect(),
        )?;
        // ordering: l_n <= l_{n+1} <= u_{n+1} <= u_n at every node. On the
        // first sweep this is the beginning condition of the scheme.
        let stage = if n == 0 { "beginning condition" } else { "sandwich ordering" };
        for (a, b) in [
            (&lower, &next_lower),
            (&next_lower, &next_upper),
            (&next_upper, &upper),
        ] {
            if let Some((t, x, v, gap)) = order_violation(a, b, grid) {
                return Err(SixwaveError::BeginningCondition {
                    time: t,
                    x,
                    v,
                    detail: format!("{stage} violated by {gap:.3e} at iteration {n}"),
                });
            }
        }
        lower = next_lower;
        upper = next_upper;
        n += 1;
        let mut gap: f64 = 0.0;
        let mut min_gap = f64::INFINITY;
        let mut min_node = 0;
        for (idx, (lu, uu)) in lower.fields().iter().zip(upper.fields()).enumerate() {
            let g = weighted_norm(&uu.lin_comb(1.0, lu, -1.0, grid), w)?;
            if g < min_gap {
                min_gap = g;
                min_node = idx;
            }
            gap = gap.max(g);
        }
        gap_history.push(gap);
        min_gap_nodes.push(min_node);
        if gap < cfg.picard_tol {
            converged = true;
            break;
        }
    }
    let limit_fields: Vec<Field> = lower
        .fields()
        .iter()
        .zip(upper.fields())
        .map(|(lu, uu)| lu.lin_comb(0.5, uu, 0.5, grid))
        .collect();
    let trajectory = Trajectory::new(times, limit_fields)?;
    let contraction_ratios = gap_history
        .windows(2)
        .map(|p| if p[0] > 0.0 { p[1] / p[0] } else { 0.0 })
        .collect();
    let solution = Solution {
        trajectory,
        residual_history: gap_history.clone(),
        contraction_ratios,
        converged,
        in_maxwellian_ball: None,
    };
    let state = KsState {
        lower,
        upper,
        n,
        gap_history,
        min_gap_nodes,
    };
    Ok((solution, state))
}

pub fn ks_solve(f0: &Field, w: &WeightParams, cfg: &SolverConfig) -> Result<Solution> {
    ks_solve_with_state(f0, w, cfg).map(|(s, _)| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision::loss_rate_r;
    use crate::field::GridSpec;
    use crate::quadrature::QuadratureSpec;

    fn cfg(w: &WeightParams, nt: usize) -> SolverConfig {
        let grid = GridSpec::new(17, 17, w.lx, w.lv);
        SolverConfig {
            time_grid: (0..nt).map(|i| i as f64 / (nt - 1) as f64).collect(),
            picard_tol: 1e-10,
            max_iters: 25,
            quadrature: QuadratureSpec::new(grid, 8),
            center_on_maxwellian: false,
            enforce_thresholds: true,
        }
    }

    #[test]
    fn alp_pure_transport() {
        let w = WeightParams::new(1.0, 1.0, 1e-8).unwrap();
        let cfg = cfg(&w, 5);
        let z = Trajectory::constant(cfg.time_grid.clone(), Field::zero(cfg.quadrature.grid))
            .unwrap();
        let f0 = maxwellian(&w).scale(0.1);
        let sol = alp_solve(&f0, &z, &z, &w, &cfg).unwrap();
        let grid = cfg.quadrature.grid;
        for f in sol.fields() {
            let d = f.lin_comb(1.0, &f0, -1.0, grid);
            assert!(weighted_norm(&d, &w).unwrap() < 1e-12);
        }
        // zero data, zero source stays zero
        let sol = alp_solve(&Field::zero(grid), &z, &z, &w, &cfg).unwrap();
        for f in sol.fields() {
            assert_eq!(weighted_norm(f, &w).unwrap(), 0.0);
        }
    }

    #[test]
    fn alp_rejects_negative_data() {
        let w = WeightParams::new(1.0, 1.0, 1e-8).unwrap();
        let cfg = cfg(&w, 3);
        let z = Trajectory::constant(cfg.time_grid.clone(), Field::zero(cfg.quadrature.grid))
            .unwrap();
        let bad = maxwellian(&w).scale(-0.1);
        assert!(matches!(
            alp_solve(&bad, &z, &z, &w, &cfg),
            Err(SixwaveError::AlpNegativeData(_))
        ));
    }

    #[test]
    fn alp_closed_form_decay() {
        // h = 0, g = u0: the output is f0 exp(-int of the transported rate),
        // nonincreasing in t and equal to f0 at t = 0. Cross-check the grid
        // rate against the direct quadrature at v = 0 (where the transport
        // composition stays on-grid).
        let w = WeightParams::new(1.0, 1.0, 1e-8).unwrap();
        let cfg = cfg(&w, 5);
        let grid = cfg.quadrature.grid;
        let u0 = maxwellian(&w).scale(0.14).sample_on(grid);
        let g = Trajectory::constant(cfg.time_grid.clone(), u0.clone()).unwrap();
        let h = Trajectory::constant(cfg.time_grid.clone(), Field::zero(grid)).unwrap();
        let f0 = maxwellian(&w).scale(0.1);
        let sol = alp_solve(&f0, &g, &h, &w, &cfg).unwrap();
        let d0 = sol.field(0).lin_comb(1.0, &f0, -1.0, grid);
        assert!(weighted_norm(&d0, &w).unwrap() < 1e-12);
        for (prev, next) in sol.fields().windows(2).map(|p| (&p[0], &p[1])) {
            for i in 0..grid.nx {
                let x = grid.x(i);
                for j in 0..grid.nv {
                    let v = grid.v(j);
                    assert!(next.eval(x, v) <= prev.eval(x, v) + 1e-14);
                }
            }
        }
        // closed form at (x, 0) for the final node: the transported rate
        // recomputed independently per node (same grid materialization the
        // solver performs), then integrated by trapezoid in time.
        let x = grid.x(5);
        let rates: Vec<f64> = cfg
            .time_grid
            .iter()
            .map(|&s| {
                let fs = crate::field::transport(&u0, s).sample_on(grid);
                loss_rate_r(&fs, &fs, &fs, &fs, &fs, x, 0.0, &cfg.quadrature)
            })
            .collect();
        let mut rho = 0.0;
        for k in 1..rates.len() {
            rho += 0.5 * (cfg.time_grid[k] - cfg.time_grid[k - 1]) * (rates[k - 1] + rates[k]);
        }
        let expect = f0.eval(x, 0.0) * (-rho).exp();
        let got = sol.fields().last().unwrap().eval(x, 0.0);
        assert!((got - expect).abs() < 1e-10 * (1.0 + expect.abs()), "{got} vs {expect}");
    }

    #[test]
    fn alp_preserves_order() {
        let w = WeightParams::new(1.0, 1.0, 1e-8).unwrap();
        let cfg = cfg(&w, 5);
        let grid = cfg.quadrature.grid;
        let small = maxwellian(&w).scale(0.05).sample_on(grid);
        let big = maxwellian(&w).scale(0.12).sample_on(grid);
        let tr = |f: &Field| Trajectory::constant(cfg.time_grid.clone(), f.clone()).unwrap();
        // f0_1 <= f0_2, g_1 >= g_2, h_1 <= h_2 => output_1 <= output_2
        let out1 = alp_solve(&small, &tr(&big), &tr(&small), &w, &cfg).unwrap();
        let out2 = alp_solve(&big, &tr(&small), &tr(&big), &w, &cfg).unwrap();
        assert!(order_violation(&out1, &out2, grid).is_none());
    }

    #[test]
    fn ks_zero_data() {
        let w = WeightParams::new(1.0, 1.0, 1e-8).unwrap();
        let cfg = cfg(&w, 5);
        let sol = ks_solve(&Field::zero(cfg.quadrature.grid), &w, &cfg).unwrap();
        assert!(sol.converged);
        for f in sol.trajectory.fields() {
            assert_eq!(weighted_norm(f, &w).unwrap(), 0.0);
        }
    }

    #[test]
    fn ks_rejects_large_data() {
        let w = WeightParams::new(1.0, 1.0, 1e-8).unwrap();
        let cfg = cfg(&w, 3);
        assert!(matches!(
            ks_solve(&maxwellian(&w), &w, &cfg),
            Err(SixwaveError::OutsideKsRegime { .. })
        ));
    }

    #[test]
    fn ks_small_data_brackets_and_converges() {
        let w = WeightParams::new(1.0, 1.0, 1e-8).unwrap();
        let cfg = cfg(&w, 5);
        let grid = cfg.quadrature.grid;
        let thr = thresholds(&w);
        let f0 = maxwellian(&w).scale(thr.r_e / 2.0);
        let (sol, state) = ks_solve_with_state(&f0, &w, &cfg).unwrap();
        assert!(sol.converged, "gaps {:?}", state.gap_history);
        assert!(state
            .gap_history
            .windows(2)
            .all(|p| p[1] <= p[0] * (1.0 + 1e-12)));
        // limit nonnegative
        for f in sol.trajectory.fields() {
            assert!(min_value(f, grid) >= -1e-12);
        }
        // agrees with the Picard solution
        let psol = crate::duhamel::picard_solve(&f0, &w, &cfg).unwrap();
        let mut dist: f64 = 0.0;
        for (a, b) in sol.trajectory.fields().iter().zip(psol.trajectory.fields()) {
            dist = dist.max(weighted_norm(&a.lin_comb(1.0, b, -1.0, grid), &w).unwrap());
        }
        assert!(
            dist <= (2.0 * cfg.picard_tol).max(1e-3 * thr.r_ks),
            "dist {dist}"
        );
    }
}
