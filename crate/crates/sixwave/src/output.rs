//! CSV emission and grid-field round-tripping. All numeric columns carry at
//! least 16 significant digits so runs are reproducible bit-for-bit from the
//! artifacts.

use std::fmt::Write as _;
use std::path::Path;

use crate::duhamel::Solution;
use crate::error::{Result, SixwaveError};
use crate::field::{GridData, GridSpec};
use crate::ks::KsState;

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a grid field as `x,v,value` rows in row-major (x outer) order.
pub fn write_grid_csv(path: &Path, data: &GridData) -> Result<()> {
    let grid = data.spec;
    let mut out = String::from("x,v,value\n");
    for i in 0..grid.nx {
        for j in 0..grid.nv {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt(grid.x(i)),
                fmt(grid.v(j)),
                fmt(data.at(i, j))
            );
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a field written by `write_grid_csv` (or any complete tensor grid of
/// `x,v,value` rows), reconstructing the grid from the coordinate columns.
pub fn read_grid_csv(path: &Path) -> Result<GridData> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (ln == 0 && line.starts_with('x')) {
            continue;
        }
        let mut cols = line.split(',');
        let mut next = |name: &str| -> Result<f64> {
            cols.next()
                .ok_or_else(|| {
                    SixwaveError::Config(format!("line {}: missing column {name}", ln + 1))
                })?
                .trim()
                .parse::<f64>()
                .map_err(|e| SixwaveError::Config(format!("line {}: {e}", ln + 1)))
        };
        rows.push((next("x")?, next("v")?, next("value")?));
    }
    if rows.is_empty() {
        return Err(SixwaveError::Config("empty grid file".into()));
    }
    let mut xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let mut vs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    vs.sort_by(f64::total_cmp);
    vs.dedup();
    let (nx, nv) = (xs.len(), vs.len());
    if nx < 2 || nv < 2 || rows.len() != nx * nv {
        return Err(SixwaveError::Config(format!(
            "grid file is not a complete {nx} x {nv} tensor grid"
        )));
    }
    let lx = xs[nx - 1].max(-xs[0]);
    let lv = vs[nv - 1].max(-vs[0]);
    let spec = GridSpec::new(nx, nv, lx, lv);
    let mut data = GridData::zeros(spec);
    let find = |arr: &[f64], val: f64| arr.partition_point(|&a| a < val);
    for (x, v, value) in rows {
        *data.at_mut(find(&xs, x), find(&vs, v)) = value;
    }
    Ok(data)
}

/// Writes solver iteration diagnostics as `iter,residual,ratio`; the first
/// row has no ratio.
pub fn write_diagnostics_csv(path: &Path, sol: &Solution) -> Result<()> {
    let mut out = String::from("iter,residual,ratio\n");
    for (i, r) in sol.residual_history.iter().enumerate() {
        let ratio = if i == 0 {
            String::new()
        } else {
            fmt(sol.contraction_ratios[i - 1])
        };
        let _ = writeln!(out, "{},{},{}", i + 1, fmt(*r), ratio);
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes bracketing-iteration diagnostics as `n,gap,min_gap_node`.
pub fn write_sandwich_csv(path: &Path, state: &KsState) -> Result<()> {
    let mut out = String::from("n,gap,min_gap_node\n");
    for (n, (gap, node)) in state
        .gap_history
        .iter()
        .zip(&state.min_gap_nodes)
        .enumerate()
    {
        let _ = writeln!(out, "{},{},{}", n + 1, fmt(*gap), node);
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes scattering convergence as `t,defect_norm`.
pub fn write_scattering_csv(path: &Path, history: &[(f64, f64)]) -> Result<()> {
    let mut out = String::from("t,defect_norm\n");
    for (t, d) in history {
        let _ = writeln!(out, "{},{}", fmt(*t), fmt(*d));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes verification results as `check,measured,bound,pass`.
pub fn write_verify_csv(path: &Path, rows: &[(String, f64, f64, bool)]) -> Result<()> {
    let mut out = String::from("check,measured,bound,pass\n");
    for (check, measured, bound, pass) in rows {
        let _ = writeln!(out, "{},{},{},{}", check, fmt(*measured), fmt(*bound), pass);
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes named scalar values as `key,value`.
pub fn write_key_value_csv(path: &Path, rows: &[(String, f64)]) -> Result<()> {
    let mut out = String::from("key,value\n");
    for (key, value) in rows {
        let _ = writeln!(out, "{},{}", key, fmt(*value));
    }
    std::fs::write(path, out)?;
    Ok(())
}
