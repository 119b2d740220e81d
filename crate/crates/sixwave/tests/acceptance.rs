//! Acceptance suite. Each test covers one criterion at production grids
//! (nx = nv = 65, n_theta = 64, nt = 33 unless stated) and prints a single
//! `criterion N (...): PASS/FAIL` line. Tolerances are pinned in the code
//! below. Run with `--test acceptance -- --nocapture --test-threads=1`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sixwave::bounds::{conv_lemma_bound, conv_lemma_lhs, thresholds, verify_time_lemma};
use sixwave::collision::{kernel_i, moments, parametrize};
use sixwave::duhamel::{picard_solve, picard_solve_centered, stability, SolverConfig};
use sixwave::field::{maxwellian, triple_norm, weighted_norm, Field};
use sixwave::ks::ks_solve_with_state;
use sixwave::oracle::{i_coarea, resonance_identity_check, rj_residual};
use sixwave::scattering::{
    default_scatter_tol, forward_limit, inverse_wave_with_tol, roundtrip, Direction,
};
use sixwave::{GridSpec, QuadratureSpec, WeightParams};

const KERNEL_VALUE: f64 = 1.8137993642342178; // pi / sqrt(3)
/// Slack factor applied to analytic constants when checking observed values.
const SLACK: f64 = 1.2;

fn unit_weights() -> WeightParams {
    WeightParams::new(1.0, 1.0, 1e-8).unwrap()
}

fn production_cfg(w: &WeightParams) -> SolverConfig {
    SolverConfig {
        time_grid: (0..33).map(|k| k as f64 / 32.0).collect(),
        picard_tol: 1e-10,
        max_iters: 50,
        quadrature: QuadratureSpec::new(GridSpec::new(65, 65, w.lx, w.lv), 64),
        center_on_maxwellian: false,
        enforce_thresholds: true,
    }
}

/// Gaussian-enveloped field c·M + d·cos(kx x)cos(kv v)·M with weighted norm
/// exactly c + d; used to draw admissible random data.
fn bump_field(w: &WeightParams, grid: GridSpec, c: f64, d: f64, kx: f64, kv: f64) -> Field {
    let (alpha, beta) = (w.alpha, w.beta);
    Field::from_rule(
        move |x, v| {
            (c + d * (kx * x).cos() * (kv * v).cos()) * (-(alpha * x * x + beta * v * v)).exp()
        },
        grid,
    )
    .sample_on(grid)
}

fn conclude(n: usize, name: &str, started: Instant, checks: &[(&str, bool, String)]) {
    let pass = checks.iter().all(|c| c.1);
    println!(
        "criterion {n} ({name}): {} [{:.1} s]",
        if pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    for (label, ok, detail) in checks {
        if !ok {
            println!("  failed: {label}: {detail}");
        }
    }
    assert!(pass, "criterion {n} ({name}) failed");
}

#[test]
fn criterion_1_representation_lemma_equivalence() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_pair: f64 = 0.0;
    let mut worst_value: f64 = 0.0;
    let mut done = 0;
    while done < 200 {
        let v = rng.gen_range(-3.0f64..3.0);
        let v1 = rng.gen_range(-3.0f64..3.0);
        let v2 = rng.gen_range(-3.0f64..3.0);
        if (v1 - v).abs() < 1e-2 && (v2 - v).abs() < 1e-2 {
            continue;
        }
        done += 1;
        let a = kernel_i(v, v1, v2, 4096, 1).unwrap();
        let b = i_coarea(v, v1, v2, 4096);
        worst_pair = worst_pair.max((a - b).abs());
        worst_value = worst_value.max((a - KERNEL_VALUE).abs().max((b - KERNEL_VALUE).abs()));
    }
    conclude(
        1,
        "representation-lemma equivalence",
        t0,
        &[
            (
                "dual-route agreement",
                worst_pair <= 1e-6,
                format!("max |kernel_I - i_coarea| = {worst_pair:.3e} > 1e-6"),
            ),
            (
                "common value pi/sqrt(3)",
                worst_value <= 1e-6,
                format!("max deviation from pi/sqrt(3) = {worst_value:.3e} > 1e-6"),
            ),
        ],
    );
}

#[test]
fn criterion_2_resonance_exactness() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_sigma: f64 = 0.0;
    let mut worst_omega: f64 = 0.0;
    let mut worst_identity: f64 = 0.0;
    let mut done = 0;
    while done < 10_000 {
        let v = rng.gen_range(-3.0f64..3.0);
        let v1 = rng.gen_range(-3.0f64..3.0);
        let v2 = rng.gen_range(-3.0f64..3.0);
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        if (1.0 + theta.cos() * theta.sin()).abs() < 1e-2 {
            continue;
        }
        done += 1;
        let t = parametrize(v, v1, v2, theta);
        let scale = 1.0
            + [t.v, t.v1, t.v2, t.v3, t.v4, t.v5]
                .iter()
                .map(|u| u.abs())
                .fold(0.0, f64::max);
        worst_sigma = worst_sigma.max(t.sigma().abs() / scale);
        worst_omega = worst_omega.max(t.omega_defect().abs() / (scale * scale));
        let x = rng.gen_range(-2.0f64..2.0);
        let s = rng.gen_range(-3.0f64..3.0);
        let id_scale = (1.0 + x.abs() + s.abs() * scale).powi(2);
        worst_identity = worst_identity.max(resonance_identity_check(x, v, s, &t) / id_scale);
    }
    conclude(
        2,
        "resonance exactness",
        t0,
        &[
            (
                "momentum defect",
                worst_sigma <= 1e-12,
                format!("{worst_sigma:.3e} > 1e-12 (scaled)"),
            ),
            (
                "energy defect",
                worst_omega <= 1e-12,
                format!("{worst_omega:.3e} > 1e-12 (scaled)"),
            ),
            (
                "conservation identity",
                worst_identity <= 1e-10,
                format!("{worst_identity:.3e} > 1e-10 (scaled)"),
            ),
        ],
    );
}

#[test]
fn criterion_3_equilibria() {
    let t0 = Instant::now();
    let w = unit_weights();
    let q = QuadratureSpec::new(GridSpec::new(65, 65, w.lx, w.lv), 64);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_rj: f64 = 0.0;
    for _ in 0..20 {
        let a = rng.gen_range(0.5f64..3.0);
        let b = rng.gen_range(0.0f64..2.0);
        // mass scale of the quadrature for f ~ 1/a: (2 Lv)^2 quintic factors
        let scale = (2.0 * w.lv).powi(2) / a.powi(5);
        worst_rj = worst_rj.max(rj_residual(a, b, &w, &q) / scale);
    }
    // v-constant fields (b = 0) make the collision bracket vanish pointwise;
    // only cancellation rounding survives
    let mut worst_const: f64 = 0.0;
    for &a in &[0.5f64, 1.0, 2.5] {
        let scale = (2.0 * w.lv).powi(2) / a.powi(5);
        worst_const = worst_const.max(rj_residual(a, 0.0, &w, &q) / scale);
    }
    conclude(
        3,
        "equilibria annihilate the collision operator",
        t0,
        &[
            (
                "rj residual",
                worst_rj <= 1e-10,
                format!("{worst_rj:.3e} > 1e-10 (scaled)"),
            ),
            (
                "v-constant residual at rounding",
                worst_const <= 1e-11,
                format!("{worst_const:.3e} > 1e-11 (scaled)"),
            ),
        ],
    );
}

#[test]
fn criterion_4_conservation_under_refinement() {
    let t0 = Instant::now();
    let w = unit_weights();
    // only the v-grid and angular resolution enter the moment quadrature;
    // the field is sampled on each resolution's own grid so the measured
    // defect is the second-order interpolation error of the discrete
    // operator (the quadrature itself is spectrally accurate on Gaussians)
    let coarse = QuadratureSpec::new(GridSpec::new(3, 65, w.lx, w.lv), 64);
    let fine = QuadratureSpec::new(GridSpec::new(3, 129, w.lx, w.lv), 128);
    let m_coarse = maxwellian(&w).sample_on(coarse.grid);
    let m_fine = maxwellian(&w).sample_on(fine.grid);
    let mut checks = Vec::new();
    for &x in &[0.0, 0.5 * w.lx] {
        let (c0, c1, c2) = moments(&m_coarse, x, &coarse);
        let (f0, f1, f2) = moments(&m_fine, x, &fine);
        // magnitude of the defect triple: individual components far below
        // the leading one carry cancellation noise, not convergence order
        let c_mag = c0.abs().max(c1.abs()).max(c2.abs());
        let f_mag = f0.abs().max(f1.abs()).max(f2.abs());
        checks.push((
            "moment defect magnitude decreases 3x",
            f_mag <= c_mag / 3.0 + 1e-13,
            format!("x = {x}: coarse {c_mag:.3e}, fine {f_mag:.3e}"),
        ));
        for (name, c, f) in [
            ("mass", c0, f0),
            ("momentum", c1, f1),
            ("energy", c2, f2),
        ] {
            checks.push((
                "each component non-increasing",
                f.abs() <= c.abs() + 1e-13,
                format!("{name} at x = {x}: coarse {c:.3e}, fine {f:.3e}"),
            ));
        }
    }
    conclude(4, "conservation under refinement", t0, &checks);
}

#[test]
fn criterion_5_contraction_and_bounds() {
    let t0 = Instant::now();
    let w = unit_weights();
    let cfg = production_cfg(&w);
    let thr = thresholds(&w);
    let eps = thr.r_e / 2.0;
    let f0 = maxwellian(&w).scale(eps);
    let sol = picard_solve(&f0, &w, &cfg).unwrap();
    let late_ratio = sol
        .contraction_ratios
        .iter()
        .copied()
        .fold(0.0f64, f64::max);
    let tn = triple_norm(&sol.trajectory, &w).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = cfg.quadrature.grid;
    let mut worst_stability: f64 = 0.0;
    for _ in 0..5 {
        let mut draw = || {
            bump_field(
                &w,
                grid,
                rng.gen_range(thr.r_e / 8.0..thr.r_e / 4.0),
                rng.gen_range(0.0..thr.r_e / 8.0),
                rng.gen_range(0.5f64..3.0),
                rng.gen_range(0.5f64..3.0),
            )
        };
        let (a, b) = (draw(), draw());
        worst_stability = worst_stability.max(stability(&a, &b, &w, &cfg).unwrap());
    }
    conclude(
        5,
        "contraction and bounds",
        t0,
        &[
            ("picard converged", sol.converged, "did not converge".into()),
            (
                "contraction ratio",
                late_ratio <= 0.25 * SLACK,
                format!("{late_ratio:.3e} > {:.3e}", 0.25 * SLACK),
            ),
            (
                "triple norm",
                tn <= 2.0 * eps * SLACK,
                format!("{tn:.3e} > {:.3e}", 2.0 * eps * SLACK),
            ),
            (
                "stability ratio",
                worst_stability <= 2.0 * SLACK,
                format!("{worst_stability:.3e} > {:.3e}", 2.0 * SLACK),
            ),
        ],
    );
}

#[test]
fn criterion_6_monotone_bracketing() {
    let t0 = Instant::now();
    let w = unit_weights();
    let cfg = production_cfg(&w);
    let thr = thresholds(&w);
    let f0 = maxwellian(&w).scale(thr.r_ks / 2.0);
    // a beginning-condition or ordering violation surfaces as an error here
    let (sol, state) = ks_solve_with_state(&f0, &w, &cfg).unwrap();
    let mut worst_ratio: f64 = 0.0;
    for pair in state.gap_history.windows(2).skip(1) {
        if pair[0] > 0.0 {
            worst_ratio = worst_ratio.max(pair[1] / pair[0]);
        }
    }
    // the comparison datum exceeds the conservative small-data radius but is
    // well inside the bracketing radius; disable the gate on the Picard side
    let mut free = cfg.clone();
    free.enforce_thresholds = false;
    let picard = picard_solve(&f0, &w, &free).unwrap();
    let grid = cfg.quadrature.grid;
    let mut dist: f64 = 0.0;
    for (a, b) in sol
        .trajectory
        .fields()
        .iter()
        .zip(picard.trajectory.fields())
    {
        dist = dist.max(weighted_norm(&a.lin_comb(1.0, b, -1.0, grid), &w).unwrap());
    }
    let mut min_val = f64::INFINITY;
    for f in sol.trajectory.fields() {
        for i in 0..grid.nx {
            for j in 0..grid.nv {
                min_val = min_val.min(f.eval(grid.x(i), grid.v(j)));
            }
        }
    }
    let dist_tol = (2.0 * cfg.picard_tol).max(1e-3 * thr.r_ks);
    conclude(
        6,
        "monotone bracketing",
        t0,
        &[
            ("bracket converged", sol.converged, "gap did not close".into()),
            (
                "gap ratio",
                worst_ratio <= 0.5 * SLACK,
                format!("{worst_ratio:.3e} > {:.3e}", 0.5 * SLACK),
            ),
            (
                "limit matches picard",
                dist <= dist_tol,
                format!("{dist:.3e} > {dist_tol:.3e}"),
            ),
            (
                "limit nonnegative",
                min_val >= -1e-12,
                format!("min value {min_val:.3e} < -1e-12"),
            ),
        ],
    );
}

#[test]
fn criterion_7_nonnegativity_regime() {
    let t0 = Instant::now();
    let w = WeightParams::new(1e8, 1.0, 1e-8).unwrap();
    let thr = thresholds(&w);
    let cfg = production_cfg(&w);
    let sol = picard_solve_centered(&maxwellian(&w), &w, &cfg).unwrap();
    conclude(
        7,
        "nonnegativity regime",
        t0,
        &[
            (
                "admissible radius interval nonempty",
                thr.r_p_interval.is_some(),
                "interval empty".into(),
            ),
            (
                "nonneg regime flag",
                thr.nonneg_regime,
                "flag false".into(),
            ),
            ("picard converged", sol.converged, "did not converge".into()),
            (
                "stays in the Maxwellian bracket",
                sol.in_maxwellian_ball == Some(true),
                format!("{:?}", sol.in_maxwellian_ball),
            ),
        ],
    );
}

#[test]
fn criterion_8_scattering() {
    let t0 = Instant::now();
    let w = unit_weights();
    let cfg = production_cfg(&w);
    let thr = thresholds(&w);
    let tol = default_scatter_tol(&w);
    let eps = thr.r_s / 4.0;
    let grid = cfg.quadrature.grid;
    let f0 = maxwellian(&w).scale(eps).sample_on(grid);
    let res = forward_limit(&f0, &w, &cfg, Direction::Plus).unwrap();
    let final_defect = res
        .convergence_history
        .last()
        .map_or(f64::INFINITY, |&(_, d)| d);
    let moved = weighted_norm(&res.state.lin_comb(1.0, &f0, -1.0, grid), &w).unwrap();
    let rt = roundtrip(&res.state, &w, &cfg, Direction::Plus).unwrap();
    let rt_tol = (10.0 * tol).max(1e-3 * thr.r_s);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut draw = || {
        bump_field(
            &w,
            grid,
            rng.gen_range(thr.r_s / 8.0..thr.r_s / 4.0),
            rng.gen_range(0.0..thr.r_s / 16.0),
            rng.gen_range(0.5f64..3.0),
            rng.gen_range(0.5f64..3.0),
        )
    };
    let states: Vec<Field> = (0..4).map(|_| draw()).collect();
    let inverses: Vec<Field> = states
        .iter()
        .map(|s| {
            inverse_wave_with_tol(s, &w, &cfg, Direction::Plus, tol)
                .unwrap()
                .0
        })
        .collect();
    let mut worst_inverse_stability: f64 = 0.0;
    for (i, j) in [(0usize, 1usize), (2, 3), (0, 2)] {
        let denom = weighted_norm(&states[i].lin_comb(1.0, &states[j], -1.0, grid), &w).unwrap();
        let num =
            weighted_norm(&inverses[i].lin_comb(1.0, &inverses[j], -1.0, grid), &w).unwrap();
        worst_inverse_stability = worst_inverse_stability.max(num / denom);
    }
    conclude(
        8,
        "scattering",
        t0,
        &[
            (
                "forward limit converged",
                res.converged && final_defect < tol,
                format!("defect {final_defect:.3e} vs tol {tol:.3e}"),
            ),
            (
                "state stays near the datum",
                moved <= eps / 32.0 * SLACK,
                format!("{moved:.3e} > {:.3e}", eps / 32.0 * SLACK),
            ),
            (
                "roundtrip",
                rt <= rt_tol,
                format!("{rt:.3e} > {rt_tol:.3e}"),
            ),
            (
                "inverse-map stability",
                worst_inverse_stability <= 2.0 * SLACK,
                format!("{worst_inverse_stability:.3e} > {:.3e}", 2.0 * SLACK),
            ),
        ],
    );
}

#[test]
fn criterion_9_weighted_bound_lemmas() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_time: f64 = 0.0;
    for _ in 0..100 {
        let x0 = rng.gen_range(-2.0f64..2.0);
        let mut u0 = rng.gen_range(-3.0f64..3.0);
        if u0.abs() < 1e-2 {
            u0 = 1e-2;
        }
        let alpha = rng.gen_range(0.5f64..4.0);
        let (num, bound) = verify_time_lemma(x0, u0, alpha).unwrap();
        worst_time = worst_time.max((num - bound).abs() / bound);
    }
    let mut conv_ok = true;
    let mut conv_detail = String::new();
    for _ in 0..1000 {
        let v = rng.gen_range(-3.0f64..3.0);
        let beta = rng.gen_range(0.5f64..2.0);
        let q = rng.gen_range(-1.5f64..0.0);
        let l = (20.0 / beta).sqrt() + v.abs();
        let lhs = conv_lemma_lhs(v, beta, q, 201, l);
        let bound = conv_lemma_bound(v, beta, q);
        if lhs > bound {
            conv_ok = false;
            conv_detail = format!("v={v} beta={beta} q={q}: {lhs} > {bound}");
            break;
        }
    }
    conclude(
        9,
        "weighted bound lemmas",
        t0,
        &[
            (
                "time lemma equality",
                worst_time <= 1e-8,
                format!("relative error {worst_time:.3e} > 1e-8"),
            ),
            ("convolution lemma inequality", conv_ok, conv_detail),
        ],
    );
}
