//! Independent brute-force verifiers for the collision quadrature: a co-area
//! evaluation of the resonant integral that shares no code with the
//! collision module, the conservation identity behind the weighted bounds,
//! and equilibrium residual diagnostics.

use crate::collision::{collide, ResonantTuple};
use crate::field::Field;
use crate::quadrature::QuadratureSpec;
use crate::weights::WeightParams;

/// Resonant integral evaluated by the co-area formula. Collapsing the
/// momentum constraint leaves a double integral of a delta on the energy
/// shell, an ellipse Q(v3, v4) = E centered at (S/3, S/3); the delta
/// evaluates to the line integral of 1/|grad Q| over that ellipse, computed
/// here with `n_level` arc nodes. Returns 0 for an empty or degenerate level
/// set.
pub fn i_coarea(v: f64, v1: f64, v2: f64, n_level: usize) -> f64 {
    assert!(n_level >= 1);
    let s = v + v1 + v2;
    let e = v * v + v1 * v1 + v2 * v2;
    // Q(v3, v4) = v3^2 + v4^2 + (S - v3 - v4)^2 = S^2/3 + u^T M u with
    // M = [[2, 1], [1, 2]] in centered coordinates u = (v3, v4) - (S/3, S/3)
    let excess = e - s * s / 3.0;
    // excess vanishes identically only at v1 = v2 = v; a relative threshold
    // absorbs rounding in E - S^2/3 there
    if excess <= 1e-12 * (1.0 + e) {
        return 0.0;
    }
    // eigen-directions of M: (1,1)/sqrt(2) with eigenvalue 3 and
    // (1,-1)/sqrt(2) with eigenvalue 1; semi-axes sqrt(excess/3), sqrt(excess)
    let r1 = (excess / 3.0).sqrt();
    let r2 = excess.sqrt();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut acc = 0.0;
    let dphi = std::f64::consts::TAU / n_level as f64;
    for m in 0..n_level {
        let phi = (m as f64 + 0.5) * dphi;
        let (sin, cos) = phi.sin_cos();
        // point and tangent in centered coordinates
        let (a, b) = (r1 * cos, r2 * sin);
        let u = (inv_sqrt2 * (a + b), inv_sqrt2 * (a - b));
        let (da, db) = (-r1 * sin, r2 * cos);
        let speed = (da * da + db * db).sqrt();
        // grad Q = 2 M u
        let g = (2.0 * (2.0 * u.0 + u.1), 2.0 * (u.0 + 2.0 * u.1));
        let grad = (g.0 * g.0 + g.1 * g.1).sqrt();
        if grad == 0.0 {
            return 0.0;
        }
        acc += speed / grad * dphi;
    }
    acc
}

/// Residual of the squared-shift conservation identity along transport: for
/// a resonant tuple, the sum of |x + s(v - v_i)|^2 over the outgoing
/// velocities equals |x|^2 plus the same sum over the incoming ones.
pub fn resonance_identity_check(x: f64, v: f64, s: f64, t: &ResonantTuple) -> f64 {
    let shift = |vi: f64| {
        let y = x + s * (v - vi);
        y * y
    };
    let outgoing = shift(t.v3) + shift(t.v4) + shift(t.v5);
    let incoming = x * x + shift(t.v1) + shift(t.v2);
    (outgoing - incoming).abs()
}

/// Maximum of |collision operator| over sample points for the equilibrium
/// family f(x, v) = 1 / (a + b v^2), whose gain and loss brackets cancel
/// pointwise on the resonant manifold. `b = 0` (v-constant fields) is
/// allowed.
pub fn rj_residual(a: f64, b: f64, w: &WeightParams, q: &QuadratureSpec) -> f64 {
    assert!(a > 0.0 && b >= 0.0);
    let f = Field::from_rule(move |_x, v| 1.0 / (a + b * v * v), q.grid);
    let mut worst: f64 = 0.0;
    let nx = 5.min(q.grid.nx);
    let nv = 9.min(q.grid.nv);
    for i in 0..nx {
        let x = -w.lx + 2.0 * w.lx * i as f64 / (nx - 1) as f64;
        for j in 0..nv {
            let v = -w.lv + 2.0 * w.lv * j as f64 / (nv - 1) as f64;
            worst = worst.max(collide(&f, x, v, q).abs());
        }
    }
    worst
}
