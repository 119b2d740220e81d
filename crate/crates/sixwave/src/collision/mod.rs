//! Six-wave collision operator via the delta-collapsed angular quadrature.
//!
//! The resonant integral over (v3, v4, v5) collapses to an angle theta on the
//! unit circle: with omega = (cos t, sin t) the delta root is
//! A = (w1 (v1-v) + w2 (v2-v)) / (1 + w1 w2), and the dependent velocities are
//! v3 = v1 - A w1, v4 = v2 - A w2, v5 = v + A (w1 + w2). The quadrature is
//! midpoint in theta, tensor trapezoid in (v1, v2), with the half-circle gate
//! (sign(A) + 1)/4 from the root calculus.

pub mod fast;

use crate::error::{Result, SixwaveError};
use crate::field::Field;
use crate::quadrature::{trapezoid_weight, QuadratureSpec};

/// One point of the resonant manifold Sigma = Omega = 0.
#[derive(Debug, Clone, Copy)]
pub struct ResonantTuple {
    pub v: f64,
    pub v1: f64,
    pub v2: f64,
    pub theta: f64,
    /// The nonzero delta root (a velocity).
    pub a: f64,
    pub v3: f64,
    pub v4: f64,
    pub v5: f64,
}

impl ResonantTuple {
    /// Momentum defect v + v1 + v2 - v3 - v4 - v5 (zero to rounding).
    pub fn sigma(&self) -> f64 {
        self.v + self.v1 + self.v2 - self.v3 - self.v4 - self.v5
    }

    /// Energy defect (zero to rounding).
    pub fn omega_defect(&self) -> f64 {
        self.v * self.v + self.v1 * self.v1 + self.v2 * self.v2
            - self.v3 * self.v3
            - self.v4 * self.v4
            - self.v5 * self.v5
    }
}

/// Solves the resonance constraints along direction theta.
pub fn parametrize(v: f64, v1: f64, v2: f64, theta: f64) -> ResonantTuple {
    let (s, c) = theta.sin_cos();
    let a = (c * (v1 - v) + s * (v2 - v)) / (1.0 + c * s);
    ResonantTuple {
        v,
        v1,
        v2,
        theta,
        a,
        v3: v1 - a * c,
        v4: v2 - a * s,
        v5: v + a * (c + s),
    }
}

/// Half-circle gate (sign(A) + 1)/4 with sign(0) = 0.
#[inline]
pub(crate) fn gate(a: f64) -> f64 {
    if a > 0.0 {
        0.5
    } else if a == 0.0 {
        0.25
    } else {
        0.0
    }
}

/// The resonant-manifold measure I(v, v1, v2): for d = 1 constant pi/sqrt(3)
/// at nondegenerate inputs. d = 2 integrates over S^3 with the scalar inputs
/// embedded on the first axis of each velocity plane (oracle use only).
pub fn kernel_i(v: f64, v1: f64, v2: f64, n_theta: usize, d: usize) -> Result<f64> {
    if n_theta < 4 {
        return Err(SixwaveError::InsufficientQuadrature(n_theta));
    }
    match d {
        1 => {
            let w = std::f64::consts::TAU / n_theta as f64;
            let mut acc = 0.0;
            for m in 0..n_theta {
                let theta = (m as f64 + 0.5) * w;
                let (s, c) = theta.sin_cos();
                let dot = c * (v1 - v) + s * (v2 - v);
                acc += gate(dot) * w / (1.0 + c * s);
            }
            Ok(acc)
        }
        2 => {
            // omega in S^3 by product angles; u = (v1-v, 0, v2-v, 0).
            let n = n_theta.min(96);
            let hp = std::f64::consts::PI / n as f64;
            let ht = std::f64::consts::TAU / n as f64;
            let u1 = v1 - v;
            let u2 = v2 - v;
            let mut acc = 0.0;
            for i in 0..n {
                let p1 = (i as f64 + 0.5) * hp;
                let (s1, c1) = p1.sin_cos();
                for j in 0..n {
                    let p2 = (j as f64 + 0.5) * hp;
                    let (s2, c2) = p2.sin_cos();
                    for k in 0..n {
                        let p3 = (k as f64 + 0.5) * ht;
                        let (s3, c3) = p3.sin_cos();
                        let w = [c1, s1 * c2, s1 * s2 * c3, s1 * s2 * s3];
                        let dot = w[0] * u1 + w[2] * u2;
                        let denom = 1.0 + w[0] * w[2] + w[1] * w[3];
                        acc += gate(dot) * dot * dot / (denom * denom * denom)
                            * s1
                            * s1
                            * s2
                            * hp
                            * hp
                            * ht;
                    }
                }
            }
            Ok(acc)
        }
        _ => Err(SixwaveError::Config("d must be 1 or 2".into())),
    }
}

/// The four split contributions of the collision operator at one (x, v).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionTerms {
    pub g1: f64,
    pub g2: f64,
    pub l1: f64,
    pub l2: f64,
}

impl CollisionTerms {
    pub fn gain(&self) -> f64 {
        self.g1 + self.g2
    }

    pub fn loss(&self) -> f64 {
        self.l1 + self.l2
    }

    pub fn net(&self) -> f64 {
        self.gain() - self.loss()
    }
}

/// Evaluates the split collision integrals at one (x, v) with six independent
/// field slots: gain integrand k3 l4 m5 (f g1 + f h2 + g1 h2), loss integrand
/// f g1 h2 (k3 l4 + k3 m5 + l4 m5).
#[allow(clippy::too_many_arguments)]
pub fn collision_terms(
    f: &Field,
    g: &Field,
    h: &Field,
    k: &Field,
    l: &Field,
    m: &Field,
    x: f64,
    v: f64,
    q: &QuadratureSpec,
) -> CollisionTerms {
    let grid = q.grid;
    let hv = grid.hv();
    let wt = q.theta_weight();
    let f0 = f.eval(x, v);
    let mut out = CollisionTerms {
        g1: 0.0,
        g2: 0.0,
        l1: 0.0,
        l2: 0.0,
    };
    // Hoist the angular data out of the velocity loops.
    let angles: Vec<(f64, f64, f64)> = q
        .thetas()
        .map(|t| {
            let (s, c) = t.sin_cos();
            (c, s, 1.0 + c * s)
        })
        .collect();
    for j1 in 0..grid.nv {
        let v1 = grid.v(j1);
        let w1 = trapezoid_weight(j1, grid.nv) * hv;
        let gv1 = g.eval(x, v1);
        for j2 in 0..grid.nv {
            let v2 = grid.v(j2);
            let w12 = w1 * trapezoid_weight(j2, grid.nv) * hv;
            let hv2 = h.eval(x, v2);
            for &(c, s, denom) in &angles {
                let a = (c * (v1 - v) + s * (v2 - v)) / denom;
                let gt = gate(a);
                if gt == 0.0 {
                    continue;
                }
                let w = w12 * wt * gt / denom;
                let k3 = k.eval(x, v1 - a * c);
                let l4 = l.eval(x, v2 - a * s);
                let m5 = m.eval(x, v + a * (c + s));
                let klm = k3 * l4 * m5;
                out.g1 += w * klm * f0 * (gv1 + hv2);
                out.g2 += w * klm * gv1 * hv2;
                let fgh = f0 * gv1 * hv2;
                out.l1 += w * fgh * k3 * (l4 + m5);
                out.l2 += w * fgh * l4 * m5;
            }
        }
    }
    out
}

/// Full collision operator C6[f](x, v) = gain - loss with all slots = f.
pub fn collide(f: &Field, x: f64, v: f64, q: &QuadratureSpec) -> f64 {
    collision_terms(f, f, f, f, f, f, x, v, q).net()
}

/// The loss integral with the leading f removed: L = f * R[g, h, k, l, m].
pub fn loss_rate_r(
    g: &Field,
    h: &Field,
    k: &Field,
    l: &Field,
    m: &Field,
    x: f64,
    v: f64,
    q: &QuadratureSpec,
) -> f64 {
    let grid = q.grid;
    let hv = grid.hv();
    let wt = q.theta_weight();
    let angles: Vec<(f64, f64, f64)> = q
        .thetas()
        .map(|t| {
            let (s, c) = t.sin_cos();
            (c, s, 1.0 + c * s)
        })
        .collect();
    let mut acc = 0.0;
    for j1 in 0..grid.nv {
        let v1 = grid.v(j1);
        let w1 = trapezoid_weight(j1, grid.nv) * hv;
        let gv1 = g.eval(x, v1);
        for j2 in 0..grid.nv {
            let v2 = grid.v(j2);
            let w12 = w1 * trapezoid_weight(j2, grid.nv) * hv;
            let hv2 = h.eval(x, v2);
            let gh = gv1 * hv2;
            for &(c, s, denom) in &angles {
                let a = (c * (v1 - v) + s * (v2 - v)) / denom;
                let gt = gate(a);
                if gt == 0.0 {
                    continue;
                }
                let w = w12 * wt * gt / denom;
                let k3 = k.eval(x, v1 - a * c);
                let l4 = l.eval(x, v2 - a * s);
                let m5 = m.eval(x, v + a * (c + s));
                acc += w * gh * (k3 * (l4 + m5) + l4 * m5);
            }
        }
    }
    acc
}

/// Discrete weak-form moments of C6[f] at fixed x against {1, v, v^2}.
pub fn moments(f: &Field, x: f64, q: &QuadratureSpec) -> (f64, f64, f64) {
    let grid = q.grid;
    let hv = grid.hv();
    let mut m0 = 0.0;
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for j in 0..grid.nv {
        let v = grid.v(j);
        let w = trapezoid_weight(j, grid.nv) * hv;
        let c = collide(f, x, v, q);
        m0 += w * c;
        m1 += w * c * v;
        m2 += w * c * v * v;
    }
    (m0, m1, m2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpec;

    const PI_OVER_SQRT3: f64 = 1.813799364234218;

    #[test]
    fn parametrize_permutation_points() {
        // theta = 0: A = v1 - v and (v3, v4, v5) = (v, v2, v1).
        let t = parametrize(0.3, 1.1, -0.7, 0.0);
        assert!((t.a - (1.1 - 0.3)).abs() < 1e-15);
        assert!((t.v3 - 0.3).abs() < 1e-15);
        assert!((t.v4 + 0.7).abs() < 1e-15);
        assert!((t.v5 - 1.1).abs() < 1e-15);
        // theta = pi/2: A = v2 - v and (v3, v4, v5) = (v1, v, v2).
        let t = parametrize(0.3, 1.1, -0.7, std::f64::consts::FRAC_PI_2);
        assert!((t.a - (-0.7 - 0.3)).abs() < 1e-12);
        assert!((t.v3 - 1.1).abs() < 1e-12);
        assert!((t.v4 - 0.3).abs() < 1e-12);
        assert!((t.v5 + 0.7).abs() < 1e-12);
    }

    #[test]
    fn parametrize_resonance_exactness() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 8.0 - 4.0
        };
        for _ in 0..500 {
            let (v, v1, v2) = (rnd(), rnd(), rnd());
            let theta = (rnd() + 4.0) * 0.75;
            let t = parametrize(v, v1, v2, theta);
            let scale = 1.0 + v.abs().max(v1.abs()).max(v2.abs()).max(t.a.abs());
            assert!(t.sigma().abs() <= 1e-12 * scale);
            assert!(t.omega_defect().abs() <= 1e-12 * scale * scale);
            let (s, c) = theta.sin_cos();
            let denom = 1.0 + c * s;
            assert!((0.5..=1.5).contains(&denom));
        }
    }

    #[test]
    fn kernel_constant_d1() {
        // The gated midpoint sum is exactly half the ungated one (antipodal
        // pairing), so even modest n_theta hits the constant to rounding.
        for &(v, v1, v2) in &[(0.0, 1.0, 0.0), (0.3, -1.2, 0.8), (2.0, 2.5, -1.0)] {
            let k = kernel_i(v, v1, v2, 64, 1).unwrap();
            assert!((k - PI_OVER_SQRT3).abs() < 1e-10, "k = {k}");
        }
        // swap and translation symmetry
        let a = kernel_i(0.2, 1.0, -0.5, 64, 1).unwrap();
        let b = kernel_i(0.2, -0.5, 1.0, 64, 1).unwrap();
        let c = kernel_i(1.2, 2.0, 0.5, 64, 1).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((a - c).abs() < 1e-12);
    }

    #[test]
    fn kernel_rejects_coarse_quadrature() {
        assert!(matches!(
            kernel_i(0.0, 1.0, 0.0, 3, 1),
            Err(SixwaveError::InsufficientQuadrature(3))
        ));
        assert!(kernel_i(0.0, 1.0, 0.0, 8, 3).is_err());
    }

    fn small_quad() -> QuadratureSpec {
        QuadratureSpec::new(GridSpec::new(9, 33, 3.0, 3.0), 16)
    }

    #[test]
    fn zero_fields_vanish() {
        let q = small_quad();
        let z = Field::zero(q.grid);
        let t = collision_terms(&z, &z, &z, &z, &z, &z, 0.0, 0.5, &q);
        assert_eq!(t, CollisionTerms { g1: 0.0, g2: 0.0, l1: 0.0, l2: 0.0 });
        assert_eq!(collide(&z, 0.0, 0.5, &q), 0.0);
        assert_eq!(loss_rate_r(&z, &z, &z, &z, &z, 0.0, 0.5, &q), 0.0);
        assert_eq!(moments(&z, 0.0, &q), (0.0, 0.0, 0.0));
    }

    #[test]
    fn v_constants_are_equilibria() {
        let q = small_quad();
        let f = Field::from_rule(|x, _| 1.0 + 0.5 * (x * 0.3).cos(), q.grid);
        for &(x, v) in &[(0.0, 0.0), (1.0, -0.7), (-2.0, 1.3)] {
            let t = collision_terms(&f, &f, &f, &f, &f, &f, x, v, &q);
            let scale = t.gain().abs().max(1.0);
            assert!((t.gain() - t.loss()).abs() < 1e-12 * scale);
            assert!(collide(&f, x, v, &q).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn rayleigh_jeans_equilibrium() {
        let q = small_quad();
        let f = Field::from_rule(|_, v| 1.0 / (0.7 + 0.4 * v * v), q.grid);
        for &v in &[0.0, 0.6, -1.4] {
            let t = collision_terms(&f, &f, &f, &f, &f, &f, 0.3, v, &q);
            let scale = t.gain().abs().max(1.0);
            assert!(
                (t.gain() - t.loss()).abs() < 1e-12 * scale,
                "residual {}",
                t.gain() - t.loss()
            );
        }
    }

    #[test]
    fn loss_factorizes_through_rate() {
        let q = small_quad();
        let f = Field::from_rule(|x, v| (-0.3 * x * x - 0.8 * v * v).exp(), q.grid);
        let g = Field::from_rule(|x, v| (-0.5 * x * x - v * v).exp() * (1.0 + 0.2 * v), q.grid);
        for &(x, v) in &[(0.0, 0.4), (0.8, -0.9)] {
            let t = collision_terms(&f, &g, &g, &g, &g, &g, x, v, &q);
            let r = loss_rate_r(&g, &g, &g, &g, &g, x, v, &q);
            assert!((t.loss() - f.eval(x, v) * r).abs() < 1e-12 * (1.0 + r.abs()));
            assert!(r >= 0.0);
        }
    }

    #[test]
    fn gain_and_rate_are_monotone() {
        let q = QuadratureSpec::new(GridSpec::new(5, 17, 2.0, 2.0), 8);
        let lo = Field::from_rule(|x, v| 0.5 * (-x * x - v * v).exp(), q.grid);
        let hi = Field::from_rule(|x, v| (-0.5 * x * x - 0.5 * v * v).exp(), q.grid);
        for &(x, v) in &[(0.0, 0.0), (0.5, -0.8), (-1.0, 1.1)] {
            let tl = collision_terms(&lo, &lo, &lo, &lo, &lo, &lo, x, v, &q);
            let th = collision_terms(&hi, &hi, &hi, &hi, &hi, &hi, x, v, &q);
            assert!(tl.gain() <= th.gain() + 1e-14);
            let rl = loss_rate_r(&lo, &lo, &lo, &lo, &lo, x, v, &q);
            let rh = loss_rate_r(&hi, &hi, &hi, &hi, &hi, x, v, &q);
            assert!(rl <= rh + 1e-14);
        }
    }
}
