use crate::field::GridSpec;

/// Discretization parameters shared by the collision quadrature: the
/// phase-space grid and the number of midpoint angular nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub grid: GridSpec,
    pub n_theta: usize,
}

impl QuadratureSpec {
    pub fn new(grid: GridSpec, n_theta: usize) -> Self {
        Self { grid, n_theta }
    }

    /// Midpoint angular nodes theta_m = (m + 1/2) * 2 pi / n.
    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n_theta;
        (0..n).map(move |m| (m as f64 + 0.5) * std::f64::consts::TAU / n as f64)
    }

    #[inline]
    pub fn theta_weight(&self) -> f64 {
        std::f64::consts::TAU / self.n_theta as f64
    }

    /// Doubled resolution in every direction, for self-convergence oracles.
    pub fn refined(&self) -> Self {
        let g = self.grid;
        Self {
            grid: GridSpec::new(g.nx, 2 * g.nv - 1, g.lx, g.lv),
            n_theta: 2 * self.n_theta,
        }
    }
}

/// Trapezoid weight for node i of an n-node uniform rule (spacing folded in
/// by the caller).
#[inline]
pub fn trapezoid_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// Composite trapezoid over arbitrary strictly increasing nodes.
pub fn trapezoid_irregular(ts: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(ts.len(), ys.len());
    let mut acc = 0.0;
    for i in 1..ts.len() {
        acc += 0.5 * (ts[i] - ts[i - 1]) * (ys[i] + ys[i - 1]);
    }
    acc
}

/// Adaptive Simpson quadrature on [a, b] to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 48)
}
