//! Explicit constants, smallness thresholds, and the Gamma majorant that
//! controls the time integrals of the collision operator.

use crate::error::{Result, SixwaveError};
use crate::quadrature::{adaptive_simpson, trapezoid_weight, QuadratureSpec};
use crate::weights::WeightParams;

/// The constant C_d of the Gaussian convolution estimate: the smallest value
/// validating both uses in its proof, max(pi^d, |S^{2d-1}|) with
/// |S^{2d-1}| = 2 pi^d / (d-1)!.
pub fn c_d(d: usize) -> f64 {
    assert!(d >= 1);
    let pi_d = std::f64::consts::PI.powi(d as i32);
    let mut fact = 1.0;
    for k in 2..d {
        fact *= k as f64;
    }
    pi_d.max(2.0 * pi_d / fact)
}

/// C_{1,beta} = 2^{-1/2} C_1 (1/beta + 1), the d = 1, q = -1 case of the
/// convolution constant.
pub fn c1beta(beta: f64) -> f64 {
    std::f64::consts::FRAC_1_SQRT_2 * c_d(1) * (1.0 / beta + 1.0)
}

/// Smallness radii and regime flags for the solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub c_d: f64,
    pub c1beta: f64,
    /// Small-data radius for the Picard solver.
    pub r_e: f64,
    /// Admissible radii for Maxwellian-centered solutions, when nonempty.
    pub r_p_interval: Option<(f64, f64)>,
    /// Radius for the Kaniel-Shinbrot scheme.
    pub r_ks: f64,
    /// Scattering radius (shares the small-data bound).
    pub r_s: f64,
    /// Whether the centered solution is certified nonnegative:
    /// 2^-12 < C_{1,beta} alpha^{-1/2} < (3/16)^4.
    pub nonneg_regime: bool,
}

pub fn thresholds(w: &WeightParams) -> Thresholds {
    let c = c1beta(w.beta);
    let a8 = w.alpha.powf(0.125);
    let r_e = a8 / (2f64.powf(3.5) * c.powf(0.25));
    let r_ks = (19.0 / 20.0) * a8 / (240.0 * c).powf(0.25);
    let ratio = c / w.alpha.sqrt();
    let upper = (3.0f64 / 16.0).powi(4);
    let r_p_interval = if ratio < upper {
        Some((1.0 / 6.0, a8 / (8.0 * c.powf(0.25)) - 0.5))
    } else {
        None
    };
    Thresholds {
        c_d: c_d(1),
        c1beta: c,
        r_e,
        r_p_interval,
        r_ks,
        r_s: r_e,
        nonneg_regime: ratio > 2f64.powi(-12) && ratio < upper,
    }
}

/// The Gamma majorant
/// Gamma(s,x,v) = e^{-a x^2 - b v^2} * iint e^{-a(|x+s(v-v1)|^2 + |x+s(v-v2)|^2)
/// - b(v1^2+v2^2)} dv1 dv2 by tensor trapezoid over the v-grid. The integrand
/// factorizes, so the double sum is the square of one trapezoid sum.
pub fn gamma(s: f64, x: f64, v: f64, w: &WeightParams, q: &QuadratureSpec) -> f64 {
    let grid = q.grid;
    let hv = grid.hv();
    let mut inner = 0.0;
    for j in 0..grid.nv {
        let v1 = grid.v(j);
        let shifted = x + s * (v - v1);
        inner += trapezoid_weight(j, grid.nv)
            * hv
            * (-w.alpha * shifted * shifted - w.beta * v1 * v1).exp();
    }
    (-w.alpha * x * x - w.beta * v * v).exp() * inner * inner
}

/// Numeric check of the time lemma: returns
/// (integral of e^{-alpha |x0 + s u0|^2} ds, sqrt(pi) alpha^{-1/2} / |u0|).
/// In d = 1 the two coincide.
pub fn verify_time_lemma(x0: f64, u0: f64, alpha: f64) -> Result<(f64, f64)> {
    if u0 == 0.0 {
        return Err(SixwaveError::DegenerateDirection);
    }
    let bound = std::f64::consts::PI.sqrt() / (alpha.sqrt() * u0.abs());
    // The integrand is a Gaussian in s centered at -x0/u0 with rate
    // alpha u0^2; ten standard widths capture it to below rounding.
    let center = -x0 / u0;
    let half = 10.0 / (alpha.sqrt() * u0.abs());
    let numeric = adaptive_simpson(
        &|s: f64| {
            let y = x0 + s * u0;
            (-alpha * y * y).exp()
        },
        center - half,
        center + half,
        1e-13 * bound,
    );
    Ok((numeric, bound))
}

/// Left side of the convolution lemma at d = 1 by tensor trapezoid:
/// iint (|v1 - v| + |v2 - v|)^q e^{-beta(v1^2 + v2^2)} dv1 dv2.
///
/// The grid is centered on v so the integrable singularity sits exactly on
/// the (skipped) central node; an off-node singularity at distance delta
/// much smaller than the spacing would otherwise inflate the trapezoid sum
/// by O(h^2 delta^q). The truncation half-width l is measured from v, so
/// callers should add |v| to the Gaussian support radius.
pub fn conv_lemma_lhs(v: f64, beta: f64, q: f64, n: usize, l: f64) -> f64 {
    let h = 2.0 * l / (n - 1) as f64;
    let half = (n - 1) as f64 / 2.0;
    let mut acc = 0.0;
    for j1 in 0..n {
        // offsets from v computed symmetrically so the central node is
        // exactly zero (no cancellation residue)
        let u1 = h * (j1 as f64 - half);
        let w1 = trapezoid_weight(j1, n) * h;
        for j2 in 0..n {
            let u2 = h * (j2 as f64 - half);
            let r = u1.abs() + u2.abs();
            if r == 0.0 {
                continue; // measure-zero node of the integrable singularity
            }
            let (v1, v2) = (v + u1, v + u2);
            acc += w1
                * trapezoid_weight(j2, n)
                * h
                * r.powf(q)
                * (-beta * (v1 * v1 + v2 * v2)).exp();
        }
    }
    acc
}

/// The convolution-lemma bound C_{d,beta} (1 + |v|^{q+}) for q <= 0, d = 1.
pub fn conv_lemma_bound(v: f64, beta: f64, q: f64) -> f64 {
    assert!(q <= 0.0 && q > -2.0);
    let c = 2f64.powf(q / 2.0) * c_d(1) * (1.0 / beta + 1.0 / (2.0 + q));
    c * (1.0 + v.abs().powf(0.0))
}
