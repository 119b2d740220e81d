//! C ABI for the sixwave library.
//!
//! Conventions: all entry points return a `SixwaveStatus` (or a pointer that
//! is null on failure) and never unwind across the boundary. Solvers and
//! fields are opaque handles created and destroyed here; field value buffers
//! are row-major with the space index outermost, `nx * nv` doubles. The last
//! error message is kept per thread and retrieved with
//! `sixwave_last_error_message`.

use std::cell::RefCell;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use sixwave::bounds::thresholds;
use sixwave::duhamel::{picard_solve, SolverConfig};
use sixwave::field::{maxwellian, weighted_norm};
use sixwave::ks::ks_solve;
use sixwave::scattering::{default_scatter_tol, forward_limit_with_tol, Direction};
use sixwave::{Field, GridData, GridSpec, QuadratureSpec, SixwaveError, WeightParams};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SixwaveStatus {
    Ok = 0,
    /// Invalid argument or configuration.
    InvalidArgument = 1,
    /// Data outside a smallness regime required by the requested solver.
    OutsideRegime = 2,
    /// Iteration failed to converge or to certify its ordering.
    NoConvergence = 3,
    /// A required pointer was null.
    NullPointer = 4,
    /// Internal panic; the handle states are unchanged.
    Internal = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.to_string());
}

fn status_of(err: &SixwaveError) -> SixwaveStatus {
    match err {
        SixwaveError::OutsideSmallDataRegime { .. }
        | SixwaveError::OutsideKsRegime { .. }
        | SixwaveError::OutsideScatteringRegime { .. }
        | SixwaveError::MaxwellianRegimeUnavailable => SixwaveStatus::OutsideRegime,
        SixwaveError::BeginningCondition { .. } => SixwaveStatus::NoConvergence,
        _ => SixwaveStatus::InvalidArgument,
    }
}

fn fail(err: &SixwaveError) -> SixwaveStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Runs a closure, converting panics into `Internal`.
fn guarded<F: FnOnce() -> SixwaveStatus>(f: F) -> SixwaveStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            SixwaveStatus::Internal
        }
    }
}

/// Opaque solver handle: weight parameters plus discretization.
pub struct SixwaveSolver {
    weights: WeightParams,
    config: SolverConfig,
}

/// Opaque field handle; values live on the solver grid it was created with.
pub struct SixwaveField {
    field: Field,
    grid: GridSpec,
}

/// Smallness thresholds; `r_p_lo`/`r_p_hi` are NaN when `has_r_p` is 0.
#[repr(C)]
pub struct SixwaveThresholds {
    pub c_d: f64,
    pub c1beta: f64,
    pub r_e: f64,
    pub r_ks: f64,
    pub r_s: f64,
    pub r_p_lo: f64,
    pub r_p_hi: f64,
    pub has_r_p: i32,
    pub nonneg_regime: i32,
}

/// Copies the most recent error message on this thread into `buf`
/// (NUL-terminated, truncated to `len`). Returns the full message length.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null (query mode).
#[no_mangle]
pub unsafe extern "C" fn sixwave_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Fills `out` with the smallness thresholds for the given weights.
///
/// # Safety
/// `out` must point to a writable `SixwaveThresholds`.
#[no_mangle]
pub unsafe extern "C" fn sixwave_thresholds(
    alpha: f64,
    beta: f64,
    eps_tail: f64,
    out: *mut SixwaveThresholds,
) -> SixwaveStatus {
    if out.is_null() {
        set_error("out is null");
        return SixwaveStatus::NullPointer;
    }
    guarded(|| {
        let w = match WeightParams::new(alpha, beta, eps_tail) {
            Ok(w) => w,
            Err(e) => return fail(&e),
        };
        let t = thresholds(&w);
        let (lo, hi) = t.r_p_interval.unwrap_or((f64::NAN, f64::NAN));
        *out = SixwaveThresholds {
            c_d: t.c_d,
            c1beta: t.c1beta,
            r_e: t.r_e,
            r_ks: t.r_ks,
            r_s: t.r_s,
            r_p_lo: lo,
            r_p_hi: hi,
            has_r_p: t.r_p_interval.is_some() as i32,
            nonneg_regime: t.nonneg_regime as i32,
        };
        SixwaveStatus::Ok
    })
}

/// Creates a solver. The time grid is `nt` uniform nodes on
/// [`t_min`, `t_max`], which must contain 0 as a node. Returns null on
/// invalid parameters (see `sixwave_last_error_message`).
#[no_mangle]
pub extern "C" fn sixwave_solver_new(
    alpha: f64,
    beta: f64,
    eps_tail: f64,
    nx: usize,
    nv: usize,
    n_theta: usize,
    t_min: f64,
    t_max: f64,
    nt: usize,
    picard_tol: f64,
    max_iters: usize,
) -> *mut SixwaveSolver {
    let built = catch_unwind(|| -> Result<SixwaveSolver, SixwaveError> {
        let weights = WeightParams::new(alpha, beta, eps_tail)?;
        if nx < 2 || nv < 2 {
            return Err(SixwaveError::Config("nx and nv must be at least 2".into()));
        }
        if nt < 2 || t_max <= t_min {
            return Err(SixwaveError::Config(
                "time grid requires nt >= 2 and t_max > t_min".into(),
            ));
        }
        let mut time_grid: Vec<f64> = (0..nt)
            .map(|k| t_min + (t_max - t_min) * k as f64 / (nt - 1) as f64)
            .collect();
        let zi = time_grid
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap();
        if time_grid[zi].abs() > 1e-12 * (t_max - t_min) {
            return Err(SixwaveError::Config(
                "time grid must contain t = 0 as a node".into(),
            ));
        }
        time_grid[zi] = 0.0;
        let config = SolverConfig {
            time_grid,
            picard_tol,
            max_iters,
            quadrature: QuadratureSpec::new(
                GridSpec::new(nx, nv, weights.lx, weights.lv),
                n_theta,
            ),
            center_on_maxwellian: false,
            enforce_thresholds: true,
        };
        config.validate()?;
        Ok(SixwaveSolver { weights, config })
    });
    match built {
        Ok(Ok(solver)) => Box::into_raw(Box::new(solver)),
        Ok(Err(e)) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
        Err(_) => {
            set_error("internal panic");
            std::ptr::null_mut()
        }
    }
}

/// Frees a solver handle. Null is ignored.
///
/// # Safety
/// `solver` must be a pointer from `sixwave_solver_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sixwave_solver_free(solver: *mut SixwaveSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Number of space nodes of the solver grid.
///
/// # Safety
/// `solver` must be a live solver handle.
#[no_mangle]
pub unsafe extern "C" fn sixwave_solver_nx(solver: *const SixwaveSolver) -> usize {
    solver
        .as_ref()
        .map_or(0, |s| s.config.quadrature.grid.nx)
}

/// Number of velocity nodes of the solver grid.
///
/// # Safety
/// `solver` must be a live solver handle.
#[no_mangle]
pub unsafe extern "C" fn sixwave_solver_nv(solver: *const SixwaveSolver) -> usize {
    solver
        .as_ref()
        .map_or(0, |s| s.config.quadrature.grid.nv)
}

unsafe fn solver_ref<'a>(solver: *const SixwaveSolver) -> Option<&'a SixwaveSolver> {
    solver.as_ref()
}

/// Creates the Maxwellian scaled to weighted norm `scale` on the solver
/// grid. Returns null on error.
///
/// # Safety
/// `solver` must be a live solver handle.
#[no_mangle]
pub unsafe extern "C" fn sixwave_field_maxwellian(
    solver: *const SixwaveSolver,
    scale: f64,
) -> *mut SixwaveField {
    let Some(s) = solver_ref(solver) else {
        set_error("solver is null");
        return std::ptr::null_mut();
    };
    let grid = s.config.quadrature.grid;
    let field = maxwellian(&s.weights).scale(scale).sample_on(grid);
    Box::into_raw(Box::new(SixwaveField { field, grid }))
}

/// Creates a field from `nx * nv` row-major values (space outermost) on the
/// solver grid. Returns null on error.
///
/// # Safety
/// `solver` must be a live solver handle and `values` must point to `len`
/// readable doubles.
#[no_mangle]
pub unsafe extern "C" fn sixwave_field_from_values(
    solver: *const SixwaveSolver,
    values: *const f64,
    len: usize,
) -> *mut SixwaveField {
    let Some(s) = solver_ref(solver) else {
        set_error("solver is null");
        return std::ptr::null_mut();
    };
    if values.is_null() {
        set_error("values is null");
        return std::ptr::null_mut();
    }
    let grid = s.config.quadrature.grid;
    if len != grid.nx * grid.nv {
        set_error("values length does not match nx * nv");
        return std::ptr::null_mut();
    }
    let slice = std::slice::from_raw_parts(values, len);
    let mut data = GridData::zeros(grid);
    data.values.copy_from_slice(slice);
    Box::into_raw(Box::new(SixwaveField {
        field: Field::from_grid(data),
        grid,
    }))
}

/// Copies the `nx * nv` row-major values of a field into `out`.
///
/// # Safety
/// `field` must be a live field handle and `out` must point to `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sixwave_field_values(
    field: *const SixwaveField,
    out: *mut f64,
    len: usize,
) -> SixwaveStatus {
    let Some(f) = field.as_ref() else {
        set_error("field is null");
        return SixwaveStatus::NullPointer;
    };
    if out.is_null() {
        set_error("out is null");
        return SixwaveStatus::NullPointer;
    }
    if len != f.grid.nx * f.grid.nv {
        set_error("out length does not match nx * nv");
        return SixwaveStatus::InvalidArgument;
    }
    guarded(|| {
        let sampled = f.field.sample_on(f.grid);
        let data = sampled.grid_data().expect("sampled field has grid data");
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&data.values);
        SixwaveStatus::Ok
    })
}

/// Weighted sup-norm of a field under the solver's weights.
///
/// # Safety
/// `solver` and `field` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sixwave_field_norm(
    solver: *const SixwaveSolver,
    field: *const SixwaveField,
    out: *mut f64,
) -> SixwaveStatus {
    let (Some(s), Some(f)) = (solver_ref(solver), field.as_ref()) else {
        set_error("solver or field is null");
        return SixwaveStatus::NullPointer;
    };
    if out.is_null() {
        set_error("out is null");
        return SixwaveStatus::NullPointer;
    }
    guarded(|| match weighted_norm(&f.field, &s.weights) {
        Ok(n) => {
            *out = n;
            SixwaveStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

/// Frees a field handle. Null is ignored.
///
/// # Safety
/// `field` must be a pointer from a field constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sixwave_field_free(field: *mut SixwaveField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

unsafe fn write_out_field(
    out: *mut *mut SixwaveField,
    field: Field,
    grid: GridSpec,
) -> SixwaveStatus {
    *out = Box::into_raw(Box::new(SixwaveField { field, grid }));
    SixwaveStatus::Ok
}

/// Solves the Cauchy problem by Picard iteration. On success stores the
/// transported solution at the final time node in `*out_final` (caller
/// frees) and the last residual in `*out_residual` (may be null).
///
/// # Safety
/// `solver` and `f0` must be live handles; `out_final` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sixwave_picard_solve(
    solver: *const SixwaveSolver,
    f0: *const SixwaveField,
    out_final: *mut *mut SixwaveField,
    out_residual: *mut f64,
) -> SixwaveStatus {
    let (Some(s), Some(f)) = (solver_ref(solver), f0.as_ref()) else {
        set_error("solver or f0 is null");
        return SixwaveStatus::NullPointer;
    };
    if out_final.is_null() {
        set_error("out_final is null");
        return SixwaveStatus::NullPointer;
    }
    guarded(|| match picard_solve(&f.field, &s.weights, &s.config) {
        Ok(sol) => {
            if !out_residual.is_null() {
                *out_residual = sol.residual_history.last().copied().unwrap_or(0.0);
            }
            if !sol.converged {
                set_error("picard iteration did not converge within max_iters");
                return SixwaveStatus::NoConvergence;
            }
            let last = sol.trajectory.fields().last().expect("nonempty").clone();
            write_out_field(out_final, last, s.config.quadrature.grid)
        }
        Err(e) => fail(&e),
    })
}

/// Solves by the monotone bracketing scheme. Stores the limit at the final
/// time node in `*out_final` and the last bracket gap in `*out_gap` (may be
/// null).
///
/// # Safety
/// `solver` and `f0` must be live handles; `out_final` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sixwave_ks_solve(
    solver: *const SixwaveSolver,
    f0: *const SixwaveField,
    out_final: *mut *mut SixwaveField,
    out_gap: *mut f64,
) -> SixwaveStatus {
    let (Some(s), Some(f)) = (solver_ref(solver), f0.as_ref()) else {
        set_error("solver or f0 is null");
        return SixwaveStatus::NullPointer;
    };
    if out_final.is_null() {
        set_error("out_final is null");
        return SixwaveStatus::NullPointer;
    }
    guarded(|| match ks_solve(&f.field, &s.weights, &s.config) {
        Ok(sol) => {
            if !out_gap.is_null() {
                *out_gap = sol.residual_history.last().copied().unwrap_or(0.0);
            }
            if !sol.converged {
                set_error("bracketing gap did not close within max_iters");
                return SixwaveStatus::NoConvergence;
            }
            let last = sol.trajectory.fields().last().expect("nonempty").clone();
            write_out_field(out_final, last, s.config.quadrature.grid)
        }
        Err(e) => fail(&e),
    })
}

/// Computes the forward (`direction > 0`) or backward (`direction < 0`)
/// scattering state. `tol <= 0` selects the default tolerance. Stores the
/// state in `*out_state` and the settled horizon in `*out_tail_time` (may be
/// null).
///
/// # Safety
/// `solver` and `f0` must be live handles; `out_state` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sixwave_scatter(
    solver: *const SixwaveSolver,
    f0: *const SixwaveField,
    direction: i32,
    tol: f64,
    out_state: *mut *mut SixwaveField,
    out_tail_time: *mut f64,
) -> SixwaveStatus {
    let (Some(s), Some(f)) = (solver_ref(solver), f0.as_ref()) else {
        set_error("solver or f0 is null");
        return SixwaveStatus::NullPointer;
    };
    if out_state.is_null() {
        set_error("out_state is null");
        return SixwaveStatus::NullPointer;
    }
    let dir = if direction >= 0 {
        Direction::Plus
    } else {
        Direction::Minus
    };
    let tol = if tol > 0.0 {
        tol
    } else {
        default_scatter_tol(&s.weights)
    };
    guarded(
        || match forward_limit_with_tol(&f.field, &s.weights, &s.config, dir, tol) {
            Ok(res) => {
                if !out_tail_time.is_null() {
                    *out_tail_time = res.tail_time;
                }
                if !res.converged {
                    set_error("scattering tail did not settle below tolerance");
                    return SixwaveStatus::NoConvergence;
                }
                write_out_field(out_state, res.state, s.config.quadrature.grid)
            }
            Err(e) => fail(&e),
        },
    )
}
