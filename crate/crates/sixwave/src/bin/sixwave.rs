use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sixwave::bounds::{thresholds, Thresholds};
use sixwave::collision::{kernel_i, parametrize};
use sixwave::config::{parse_config, AppConfig};
use sixwave::duhamel::picard_solve;
use sixwave::field::weighted_norm;
use sixwave::ks::ks_solve_with_state;
use sixwave::oracle::{i_coarea, resonance_identity_check, rj_residual};
use sixwave::output::{
    write_diagnostics_csv, write_grid_csv, write_key_value_csv, write_sandwich_csv,
    write_scattering_csv, write_verify_csv,
};
use sixwave::scattering::{default_scatter_tol, forward_limit_with_tol, Direction};
use sixwave::quadrature::QuadratureSpec;
use sixwave::{Field, GridSpec, Result, SixwaveError, WeightParams};

#[derive(Parser)]
#[command(name = "sixwave", about = "Six-wave kinetic equation solvers and diagnostics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the Cauchy problem by Picard iteration on the Duhamel map.
    Simulate {
        config: PathBuf,
        /// Output directory for CSV artifacts.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Solve by the monotone bracketing scheme.
    Ks {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compute the forward scattering state.
    Scatter {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print smallness thresholds for the given weight parameters.
    Thresholds {
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1e-8)]
        eps_tail: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the independent oracle suites.
    Verify {
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn exit_code_for(err: &SixwaveError) -> u8 {
    match err {
        SixwaveError::OutsideSmallDataRegime { .. }
        | SixwaveError::OutsideKsRegime { .. }
        | SixwaveError::OutsideScatteringRegime { .. }
        | SixwaveError::MaxwellianRegimeUnavailable => 2,
        SixwaveError::BeginningCondition { .. } => 3,
        _ => 1,
    }
}

fn dump_field(path: &Path, f: &Field, grid: GridSpec) -> Result<()> {
    let sampled = f.sample_on(grid);
    write_grid_csv(path, sampled.grid_data().expect("sampled"))
}

fn simulate(cfg: &AppConfig, out: &Path) -> Result<u8> {
    let f0 = cfg.initial_datum()?;
    let sol = picard_solve(&f0, &cfg.weights, &cfg.solver)?;
    std::fs::create_dir_all(out)?;
    write_diagnostics_csv(&out.join("diagnostics.csv"), &sol)?;
    let grid = cfg.solver.quadrature.grid;
    dump_field(
        &out.join("f_final.csv"),
        sol.trajectory.fields().last().expect("nonempty"),
        grid,
    )?;
    if !sol.converged {
        eprintln!("picard iteration did not converge within max_iters");
        return Ok(3);
    }
    println!(
        "converged in {} iterations, final residual {:.3e}",
        sol.residual_history.len(),
        sol.residual_history.last().copied().unwrap_or(0.0)
    );
    Ok(0)
}

fn ks(cfg: &AppConfig, out: &Path) -> Result<u8> {
    let f0 = cfg.initial_datum()?;
    let (sol, state) = ks_solve_with_state(&f0, &cfg.weights, &cfg.solver)?;
    std::fs::create_dir_all(out)?;
    write_sandwich_csv(&out.join("sandwich.csv"), &state)?;
    let grid = cfg.solver.quadrature.grid;
    dump_field(
        &out.join("f_final.csv"),
        sol.trajectory.fields().last().expect("nonempty"),
        grid,
    )?;
    if !sol.converged {
        eprintln!("bracketing gap did not close within max_iters");
        return Ok(3);
    }
    println!(
        "bracket closed in {} iterations, final gap {:.3e}",
        state.n,
        state.gap_history.last().copied().unwrap_or(0.0)
    );
    Ok(0)
}

fn scatter(cfg: &AppConfig, out: &Path) -> Result<u8> {
    let f0 = cfg.initial_datum()?;
    let direction = if *cfg.solver.time_grid.last().expect("nonempty") > 0.0 {
        Direction::Plus
    } else {
        Direction::Minus
    };
    let tol = cfg
        .scatter_tol
        .unwrap_or_else(|| default_scatter_tol(&cfg.weights));
    let res = forward_limit_with_tol(&f0, &cfg.weights, &cfg.solver, direction, tol)?;
    std::fs::create_dir_all(out)?;
    write_scattering_csv(&out.join("scattering.csv"), &res.convergence_history)?;
    let name = match direction {
        Direction::Plus => "f_plus.csv",
        Direction::Minus => "f_minus.csv",
    };
    dump_field(&out.join(name), &res.state, cfg.solver.quadrature.grid)?;
    if !res.converged {
        eprintln!("scattering tail did not settle below tolerance at the horizon cap");
        return Ok(3);
    }
    println!(
        "scattering state settled at T = {} (tail majorant {}), |f| = {:.6e}",
        res.tail_time,
        if res.tail_sound { "sound" } else { "exceeded" },
        weighted_norm(&res.state, &cfg.weights)?
    );
    Ok(0)
}

fn print_thresholds(alpha: f64, beta: f64, eps_tail: f64, out: Option<&Path>) -> Result<u8> {
    let w = WeightParams::new(alpha, beta, eps_tail)?;
    let t: Thresholds = thresholds(&w);
    let (p_lo, p_hi) = t.r_p_interval.unwrap_or((f64::NAN, f64::NAN));
    let rows = vec![
        ("c_d".to_string(), t.c_d),
        ("c1beta".to_string(), t.c1beta),
        ("r_e".to_string(), t.r_e),
        ("r_ks".to_string(), t.r_ks),
        ("r_s".to_string(), t.r_s),
        ("r_p_lo".to_string(), p_lo),
        ("r_p_hi".to_string(), p_hi),
        (
            "nonneg_regime".to_string(),
            if t.nonneg_regime { 1.0 } else { 0.0 },
        ),
    ];
    for (k, v) in &rows {
        println!("{k} = {v:.6}");
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        write_key_value_csv(&dir.join("thresholds.csv"), &rows)?;
    }
    Ok(0)
}

fn verify(cfg: Option<AppConfig>, out: &Path) -> Result<u8> {
    let seed = cfg.as_ref().map_or(0, |c| c.seed);
    let w = cfg
        .as_ref()
        .map_or_else(|| WeightParams::new(1.0, 1.0, 1e-8), |c| Ok(c.weights.clone()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<(String, f64, f64, bool)> = Vec::new();
    let push = |name: &str, measured: f64, bound: f64, rows: &mut Vec<_>| {
        let pass = measured <= bound;
        println!(
            "{name}: measured {measured:.3e} bound {bound:.3e} -> {}",
            if pass { "pass" } else { "FAIL" }
        );
        rows.push((name.to_string(), measured, bound, pass));
    };

    // dual-route evaluation of the resonant integral
    let mut worst_pair: f64 = 0.0;
    let mut worst_value: f64 = 0.0;
    let kernel_value = std::f64::consts::PI / 3f64.sqrt();
    for _ in 0..200 {
        let v = rng.gen_range(-3.0f64..3.0);
        let v1 = rng.gen_range(-3.0f64..3.0);
        let v2 = rng.gen_range(-3.0f64..3.0);
        if (v1 - v).abs() < 1e-2 && (v2 - v).abs() < 1e-2 {
            continue;
        }
        let a = kernel_i(v, v1, v2, 4096, 1)?;
        let b = i_coarea(v, v1, v2, 4096);
        worst_pair = worst_pair.max((a - b).abs());
        worst_value = worst_value.max((a - kernel_value).abs().max((b - kernel_value).abs()));
    }
    push("resonant_integral_dual_route", worst_pair, 1e-6, &mut rows);
    push("resonant_integral_value", worst_value, 1e-6, &mut rows);

    // resonance constraints and the conservation identity
    let mut worst_sigma: f64 = 0.0;
    let mut worst_omega: f64 = 0.0;
    let mut worst_identity: f64 = 0.0;
    for _ in 0..10_000 {
        let v = rng.gen_range(-3.0f64..3.0);
        let v1 = rng.gen_range(-3.0f64..3.0);
        let v2 = rng.gen_range(-3.0f64..3.0);
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        if (1.0 + theta.cos() * theta.sin()).abs() < 1e-2 {
            continue;
        }
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
        worst_identity =
            worst_identity.max(resonance_identity_check(x, v, s, &t) / id_scale);
    }
    push("resonance_momentum_defect", worst_sigma, 1e-12, &mut rows);
    push("resonance_energy_defect", worst_omega, 1e-12, &mut rows);
    push("conservation_identity", worst_identity, 1e-10, &mut rows);

    // equilibrium residuals
    let q = QuadratureSpec::new(GridSpec::new(9, 33, w.lx, w.lv), 16);
    let mut worst_rj: f64 = 0.0;
    for _ in 0..20 {
        let a = rng.gen_range(0.5f64..3.0);
        let b = rng.gen_range(0.0f64..2.0);
        let scale = (2.0 * w.lv).powi(2) / a.powi(5);
        worst_rj = worst_rj.max(rj_residual(a, b, &w, &q) / scale);
    }
    push("equilibrium_residual", worst_rj, 1e-10, &mut rows);

    std::fs::create_dir_all(out)?;
    write_verify_csv(&out.join("verify.csv"), &rows)?;
    Ok(if rows.iter().all(|r| r.3) { 0 } else { 1 })
}

fn run() -> Result<u8> {
    match Cli::parse().cmd {
        Cmd::Simulate { config, out } => simulate(&parse_config(&config)?, &out),
        Cmd::Ks { config, out } => ks(&parse_config(&config)?, &out),
        Cmd::Scatter { config, out } => scatter(&parse_config(&config)?, &out),
        Cmd::Thresholds {
            alpha,
            beta,
            eps_tail,
            out,
        } => print_thresholds(alpha, beta, eps_tail, out.as_deref()),
        Cmd::Verify { config, out } => {
            let cfg = config.map(|p| parse_config(&p)).transpose()?;
            verify(cfg, &out)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
