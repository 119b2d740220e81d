use std::sync::Arc;

use crate::error::{Result, SixwaveError};
use crate::weights::WeightParams;

/// Uniform tensor grid over [-lx, lx] x [-lv, lv].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub nv: usize,
    pub lx: f64,
    pub lv: f64,
}

impl GridSpec {
    pub fn new(nx: usize, nv: usize, lx: f64, lv: f64) -> Self {
        assert!(nx >= 2 && nv >= 2, "grid needs at least two nodes per axis");
        assert!(lx > 0.0 && lv > 0.0);
        Self { nx, nv, lx, lv }
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        2.0 * self.lx / (self.nx - 1) as f64
    }

    #[inline]
    pub fn hv(&self) -> f64 {
        2.0 * self.lv / (self.nv - 1) as f64
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        -self.lx + self.hx() * i as f64
    }

    #[inline]
    pub fn v(&self, j: usize) -> f64 {
        -self.lv + self.hv() * j as f64
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nx).map(|i| self.x(i))
    }

    pub fn vs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nv).map(|j| self.v(j))
    }
}

/// Tolerance, in grid cells, within which an evaluation coordinate is
/// considered to sit exactly on a node.
pub const NODE_SNAP: f64 = 1e-9;

/// Sampled field values on a [`GridSpec`], row-major over (x_i, v_j).
#[derive(Debug, Clone)]
pub struct GridData {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl GridData {
    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            spec,
            values: vec![0.0; spec.nx * spec.nv],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.nv + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.values[i * self.spec.nv + j]
    }

    /// Bilinear interpolation with zero extension outside the box.
    ///
    /// Coordinates within `NODE_SNAP` grid cells of a node are snapped onto
    /// it, so that points computed to lie exactly on the boundary node by
    /// different arithmetic routes agree on being inside the box.
    pub fn eval(&self, x: f64, v: f64) -> f64 {
        let s = &self.spec;
        let snap = |f: f64| {
            let r = f.round();
            if (f - r).abs() < NODE_SNAP {
                r
            } else {
                f
            }
        };
        let fx = snap((x + s.lx) / s.hx());
        let fv = snap((v + s.lv) / s.hv());
        if fx < 0.0 || fv < 0.0 || fx > (s.nx - 1) as f64 || fv > (s.nv - 1) as f64 {
            return 0.0;
        }
        let i = (fx.floor() as usize).min(s.nx - 2);
        let j = (fv.floor() as usize).min(s.nv - 2);
        let tx = fx - i as f64;
        let tv = fv - j as f64;
        let f00 = self.at(i, j);
        let f01 = self.at(i, j + 1);
        let f10 = self.at(i + 1, j);
        let f11 = self.at(i + 1, j + 1);
        (1.0 - tx) * ((1.0 - tv) * f00 + tv * f01) + tx * ((1.0 - tv) * f10 + tv * f11)
    }
}

type Rule = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Backing {
    /// Evaluable everywhere in the plane; `sample` fixes the evaluation set
    /// used by the discrete sup norm.
    Rule { rule: Rule, sample: GridSpec },
    Grid(Arc<GridData>),
}

/// A space-velocity function f(x, v), either analytic (a rule) or a sampled
/// grid with bilinear interpolation and zero extension outside the box.
#[derive(Clone)]
pub struct Field {
    backing: Backing,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.backing {
            Backing::Rule { sample, .. } => write!(f, "Field::Rule(sample: {sample:?})"),
            Backing::Grid(g) => write!(f, "Field::Grid({:?})", g.spec),
        }
    }
}

impl Field {
    pub fn from_rule<F>(rule: F, sample: GridSpec) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            backing: Backing::Rule {
                rule: Arc::new(rule),
                sample,
            },
        }
    }

    pub fn from_grid(data: GridData) -> Self {
        Self {
            backing: Backing::Grid(Arc::new(data)),
        }
    }

    pub fn zero(sample: GridSpec) -> Self {
        Self::from_grid(GridData::zeros(sample))
    }

    /// The grid over which the discrete sup norm is evaluated.
    pub fn sample_spec(&self) -> GridSpec {
        match &self.backing {
            Backing::Rule { sample, .. } => *sample,
            Backing::Grid(g) => g.spec,
        }
    }

    pub fn grid_data(&self) -> Option<&GridData> {
        match &self.backing {
            Backing::Grid(g) => Some(g),
            Backing::Rule { .. } => None,
        }
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.backing, Backing::Rule { .. })
    }

    #[inline]
    pub fn eval(&self, x: f64, v: f64) -> f64 {
        match &self.backing {
            Backing::Rule { rule, .. } => rule(x, v),
            Backing::Grid(g) => g.eval(x, v),
        }
    }

    /// Materializes the field on `spec` by sampling at the nodes.
    pub fn sample_on(&self, spec: GridSpec) -> Field {
        let mut out = GridData::zeros(spec);
        for i in 0..spec.nx {
            let x = spec.x(i);
            for j in 0..spec.nv {
                *out.at_mut(i, j) = self.eval(x, spec.v(j));
            }
        }
        Field::from_grid(out)
    }

    /// Pointwise linear combination a*self + b*other, materialized on `spec`.
    pub fn lin_comb(&self, a: f64, other: &Field, b: f64, spec: GridSpec) -> Field {
        let mut out = GridData::zeros(spec);
        for i in 0..spec.nx {
            let x = spec.x(i);
            for j in 0..spec.nv {
                *out.at_mut(i, j) = a * self.eval(x, spec.v(j)) + b * other.eval(x, spec.v(j));
            }
        }
        Field::from_grid(out)
    }

    pub fn scale(&self, c: f64) -> Field {
        match &self.backing {
            Backing::Rule { rule, sample } => {
                let r = rule.clone();
                Field::from_rule(move |x, v| c * r(x, v), *sample)
            }
            Backing::Grid(g) => {
                let mut d = (**g).clone();
                for w in d.values.iter_mut() {
                    *w *= c;
                }
                Field::from_grid(d)
            }
        }
    }
}

/// Free-streaming composition (T^s g)(x, v) = g(x - s v, v).
///
/// The result wraps the input lazily; grid-backed inputs keep interpolating
/// on their own nodes with zero extension, so resampling happens only when a
/// caller materializes the result.
pub fn transport(g: &Field, s: f64) -> Field {
    if s == 0.0 {
        return g.clone();
    }
    let inner = g.clone();
    let sample = g.sample_spec();
    Field::from_rule(move |x, v| inner.eval(x - s * v, v), sample)
}

/// The Gaussian M(x, v) = exp(-alpha x^2 - beta v^2), analytic-backed.
pub fn maxwellian(w: &WeightParams) -> Field {
    let (alpha, beta) = (w.alpha, w.beta);
    let sample = GridSpec::new(129, 129, w.lx, w.lv);
    Field::from_rule(
        move |x, v| (-alpha * x * x - beta * v * v).exp(),
        sample,
    )
}

/// Discrete weighted sup norm: max over the field's sample nodes of
/// |f(x, v)| exp(alpha x^2 + beta v^2).
pub fn weighted_norm(f: &Field, w: &WeightParams) -> Result<f64> {
    let spec = f.sample_spec();
    let mut sup: f64 = 0.0;
    for i in 0..spec.nx {
        let x = spec.x(i);
        let wx = (w.alpha * x * x).exp();
        for j in 0..spec.nv {
            let v = spec.v(j);
            let val = f.eval(x, v);
            if !val.is_finite() {
                return Err(SixwaveError::NonFiniteField);
            }
            let weighted = val.abs() * wx * (w.beta * v * v).exp();
            if !weighted.is_finite() {
                return Err(SixwaveError::WeightOverflow);
            }
            sup = sup.max(weighted);
        }
    }
    Ok(sup)
}

/// A time-indexed family of fields representing t -> T^{-t} f(t).
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    fields: Vec<Field>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, fields: Vec<Field>) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(SixwaveError::Config(
                "trajectory needs one field per time node".into(),
            ));
        }
        if !times.windows(2).all(|p| p[0] < p[1]) {
            return Err(SixwaveError::Config(
                "trajectory times must be strictly increasing".into(),
            ));
        }
        if !times.iter().any(|t| t.abs() < 1e-12) {
            return Err(SixwaveError::Config("trajectory times must contain 0".into()));
        }
        Ok(Self { times, fields })
    }

    /// Constant-in-time trajectory holding `f` at every node.
    pub fn constant(times: Vec<f64>, f: Field) -> Result<Self> {
        let fields = vec![f; times.len()];
        Self::new(times, fields)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn field(&self, i: usize) -> &Field {
        &self.fields[i]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index of the node t = 0.
    pub fn zero_index(&self) -> usize {
        self.times
            .iter()
            .position(|t| t.abs() < 1e-12)
            .expect("trajectory contains t = 0 by construction")
    }

    pub fn index_of(&self, t: f64) -> Option<usize> {
        let scale = 1.0 + self.times.last().unwrap().abs().max(self.times[0].abs());
        self.times.iter().position(|&s| (s - t).abs() < 1e-10 * scale)
    }
}

/// Triple norm: sup over time nodes of the weighted sup norm.
pub fn triple_norm(g: &Trajectory, w: &WeightParams) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for f in g.fields() {
        sup = sup.max(weighted_norm(f, w)?);
    }
    Ok(sup)
}
