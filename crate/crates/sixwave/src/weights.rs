use crate::error::{Result, SixwaveError};

/// Exponential weight rates (alpha, beta) of the Gaussian-weighted sup norm
/// together with the truncation radii derived from the tail tolerance.
///
/// The weighted norm is sup |f(x,v)| exp(alpha x^2 + beta v^2); the domain is
/// truncated to [-lx, lx] x [-lv, lv] where the Gaussian weight class has
/// decayed below `eps_tail`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    pub alpha: f64,
    pub beta: f64,
    pub eps_tail: f64,
    pub lx: f64,
    pub lv: f64,
}

impl WeightParams {
    /// Builds weight parameters with lx = sqrt(ln(1/eps_tail)/alpha) and
    /// lv = sqrt(ln(1/eps_tail)/beta), so the truncation error is
    /// user-controlled through `eps_tail`.
    pub fn new(alpha: f64, beta: f64, eps_tail: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(SixwaveError::Config("alpha must be positive".into()));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(SixwaveError::Config("beta must be positive".into()));
        }
        if !(eps_tail > 0.0 && eps_tail < 1.0) {
            return Err(SixwaveError::Config(
                "eps_tail must lie in (0, 1)".into(),
            ));
        }
        let log_inv = (1.0 / eps_tail).ln();
        Ok(Self {
            alpha,
            beta,
            eps_tail,
            lx: (log_inv / alpha).sqrt(),
            lv: (log_inv / beta).sqrt(),
        })
    }

    /// Same as [`WeightParams::new`] but with explicit truncation radii.
    pub fn with_radii(alpha: f64, beta: f64, eps_tail: f64, lx: f64, lv: f64) -> Result<Self> {
        let mut w = Self::new(alpha, beta, eps_tail)?;
        if !(lx > 0.0) || !(lv > 0.0) {
            return Err(SixwaveError::Config("Lx and Lv must be positive".into()));
        }
        if (-alpha * lx * lx).exp() > eps_tail * (1.0 + 1e-12)
            || (-beta * lv * lv).exp() > eps_tail * (1.0 + 1e-12)
        {
            return Err(SixwaveError::Config(
                "truncation radii too small for eps_tail".into(),
            ));
        }
        w.lx = lx;
        w.lv = lv;
        Ok(w)
    }

    /// Weight factor exp(alpha x^2 + beta v^2).
    #[inline]
    pub fn weight(&self, x: f64, v: f64) -> f64 {
        (self.alpha * x * x + self.beta * v * v).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radii_satisfy_tail_bound() {
        let w = WeightParams::new(1.0, 2.0, 1e-8).unwrap();
        assert!((-w.alpha * w.lx * w.lx).exp() <= w.eps_tail * (1.0 + 1e-12));
        assert!((-w.beta * w.lv * w.lv).exp() <= w.eps_tail * (1.0 + 1e-12));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(WeightParams::new(-1.0, 1.0, 1e-8).is_err());
        assert!(WeightParams::new(1.0, 0.0, 1e-8).is_err());
        assert!(WeightParams::new(1.0, 1.0, 1.5).is_err());
    }
}
