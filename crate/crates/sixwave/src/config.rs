//! Line-oriented `key = value` configuration for the CLI.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::duhamel::SolverConfig;
use crate::error::{Result, SixwaveError};
use crate::field::{maxwellian, Field, GridSpec};
use crate::output::read_grid_csv;
use crate::quadrature::QuadratureSpec;
use crate::weights::WeightParams;

/// Initial-datum recipe.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Zero,
    /// Maxwellian scaled to the given weighted norm.
    MaxwellianScaled(f64),
    /// Rayleigh-Jeans-type profile 1 / (a + b v^2).
    Rj { a: f64, b: f64 },
    /// Grid dump in `x,v,value` CSV form.
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct AppConfig {
    pub weights: WeightParams,
    pub solver: SolverConfig,
    pub init: InitSpec,
    pub scatter_tol: Option<f64>,
    pub slack: f64,
    pub seed: u64,
}

impl AppConfig {
    /// Materializes the configured initial datum on the solver grid.
    pub fn initial_datum(&self) -> Result<Field> {
        let grid = self.solver.quadrature.grid;
        Ok(match &self.init {
            InitSpec::Zero => Field::zero(grid),
            InitSpec::MaxwellianScaled(eps) => {
                maxwellian(&self.weights).scale(*eps).sample_on(grid)
            }
            InitSpec::Rj { a, b } => {
                let (a, b) = (*a, *b);
                Field::from_rule(move |_x, v| 1.0 / (a + b * v * v), grid).sample_on(grid)
            }
            InitSpec::File(path) => Field::from_grid(read_grid_csv(path)?),
        })
    }
}

fn parse_init(value: &str) -> Result<InitSpec> {
    if value == "zero" {
        return Ok(InitSpec::Zero);
    }
    if let Some(eps) = value.strip_prefix("maxwellian_scaled:") {
        let eps: f64 = eps
            .trim()
            .parse()
            .map_err(|e| SixwaveError::Config(format!("invalid init scale: {e}")))?;
        return Ok(InitSpec::MaxwellianScaled(eps));
    }
    if let Some(rest) = value.strip_prefix("rj:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 2 {
            return Err(SixwaveError::Config(
                "init rj takes two parameters: rj:a,b".into(),
            ));
        }
        let a: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|e| SixwaveError::Config(format!("invalid rj parameter a: {e}")))?;
        let b: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|e| SixwaveError::Config(format!("invalid rj parameter b: {e}")))?;
        if a <= 0.0 || b < 0.0 {
            return Err(SixwaveError::Config(
                "init rj requires a > 0 and b >= 0".into(),
            ));
        }
        return Ok(InitSpec::Rj { a, b });
    }
    if let Some(path) = value.strip_prefix("file:") {
        return Ok(InitSpec::File(PathBuf::from(path.trim())));
    }
    Err(SixwaveError::Config(format!(
        "unknown init spec `{value}` (expected zero | maxwellian_scaled:eps | rj:a,b | file:path)"
    )))
}

const KNOWN_KEYS: &[&str] = &[
    "alpha",
    "beta",
    "eps_tail",
    "nx",
    "nv",
    "n_theta",
    "Lx",
    "Lv",
    "t_min",
    "t_max",
    "nt",
    "picard_tol",
    "max_iters",
    "scatter_tol",
    "enforce_thresholds",
    "slack",
    "seed",
    "init",
];

struct Raw(HashMap<String, String>);

impl Raw {
    fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|e| SixwaveError::Config(format!("invalid value for `{key}`: {e}"))),
        }
    }

    fn get_opt<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.0
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|e| SixwaveError::Config(format!("invalid value for `{key}`: {e}")))
            })
            .transpose()
    }
}

pub fn parse_config_str(text: &str) -> Result<AppConfig> {
    let mut map = HashMap::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            SixwaveError::Config(format!("line {}: expected `key = value`", ln + 1))
        })?;
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(SixwaveError::Config(format!("unknown key `{key}`")));
        }
        if map.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(SixwaveError::Config(format!("duplicate key `{key}`")));
        }
    }
    let raw = Raw(map);

    let alpha = raw.get("alpha", 1.0)?;
    let beta = raw.get("beta", 1.0)?;
    let eps_tail = raw.get("eps_tail", 1e-8)?;
    let weights = match (raw.get_opt::<f64>("Lx")?, raw.get_opt::<f64>("Lv")?) {
        (None, None) => WeightParams::new(alpha, beta, eps_tail)?,
        (lx, lv) => {
            let derived = WeightParams::new(alpha, beta, eps_tail)?;
            WeightParams::with_radii(
                alpha,
                beta,
                eps_tail,
                lx.unwrap_or(derived.lx),
                lv.unwrap_or(derived.lv),
            )?
        }
    };

    let nx: usize = raw.get("nx", 65)?;
    let nv: usize = raw.get("nv", 65)?;
    let n_theta: usize = raw.get("n_theta", 64)?;
    if nx < 2 || nv < 2 {
        return Err(SixwaveError::Config("nx and nv must be at least 2".into()));
    }
    let grid = GridSpec::new(nx, nv, weights.lx, weights.lv);

    let t_min: f64 = raw.get("t_min", 0.0)?;
    let t_max: f64 = raw.get("t_max", 1.0)?;
    let nt: usize = raw.get("nt", 33)?;
    if nt < 2 || t_max <= t_min {
        return Err(SixwaveError::Config(
            "time grid requires nt >= 2 and t_max > t_min".into(),
        ));
    }
    if t_min > 0.0 || t_max < 0.0 {
        return Err(SixwaveError::Config(
            "time grid must contain t = 0".into(),
        ));
    }
    let mut time_grid: Vec<f64> = (0..nt)
        .map(|k| t_min + (t_max - t_min) * k as f64 / (nt - 1) as f64)
        .collect();
    // snap the node nearest zero onto zero so trajectories anchor exactly
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

    let solver = SolverConfig {
        time_grid,
        picard_tol: raw.get("picard_tol", 1e-10)?,
        max_iters: raw.get("max_iters", 50)?,
        quadrature: QuadratureSpec::new(grid, n_theta),
        center_on_maxwellian: false,
        enforce_thresholds: raw.get("enforce_thresholds", true)?,
    };
    solver.validate()?;

    let init = match raw.0.get("init") {
        None => InitSpec::Zero,
        Some(v) => parse_init(v)?,
    };

    Ok(AppConfig {
        weights,
        solver,
        init,
        scatter_tol: raw.get_opt("scatter_tol")?,
        slack: raw.get("slack", 0.2)?,
        seed: raw.get("seed", 0)?,
    })
}

pub fn parse_config(path: &Path) -> Result<AppConfig> {
    parse_config_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = parse_config_str("").unwrap();
        assert_eq!(cfg.solver.quadrature.grid.nx, 65);
        assert_eq!(cfg.solver.quadrature.grid.nv, 65);
        assert_eq!(cfg.solver.quadrature.n_theta, 64);
        assert_eq!(cfg.solver.time_grid.len(), 33);
        assert_eq!(cfg.init, InitSpec::Zero);
        assert!(cfg.solver.enforce_thresholds);
    }

    #[test]
    fn full_config_parses() {
        let text = "
            alpha = 2.0   # comment
            beta = 0.5
            eps_tail = 1e-6
            nx = 17
            nv = 33
            n_theta = 16
            t_min = -1.0
            t_max = 1.0
            nt = 9
            picard_tol = 1e-8
            max_iters = 12
            enforce_thresholds = false
            slack = 0.1
            seed = 42
            init = maxwellian_scaled:0.02
        ";
        let cfg = parse_config_str(text).unwrap();
        assert_eq!(cfg.weights.alpha, 2.0);
        assert_eq!(cfg.solver.time_grid[4], 0.0);
        assert_eq!(cfg.init, InitSpec::MaxwellianScaled(0.02));
        assert_eq!(cfg.seed, 42);
        assert!(!cfg.solver.enforce_thresholds);
        let f0 = cfg.initial_datum().unwrap();
        let norm = crate::field::weighted_norm(&f0, &cfg.weights).unwrap();
        assert!((norm - 0.02).abs() < 1e-12);
    }

    #[test]
    fn rj_and_file_inits() {
        assert_eq!(
            parse_init("rj:1.5,0.5").unwrap(),
            InitSpec::Rj { a: 1.5, b: 0.5 }
        );
        assert_eq!(
            parse_init("file:/tmp/f.csv").unwrap(),
            InitSpec::File(PathBuf::from("/tmp/f.csv"))
        );
        assert!(parse_init("rj:1.0").is_err());
        assert!(parse_init("bogus").is_err());
    }

    #[test]
    fn errors_are_specific() {
        let err = parse_config_str("alfa = 1.0").unwrap_err();
        assert!(err.to_string().contains("unknown key `alfa`"), "{err}");
        let err = parse_config_str("alpha = -1").unwrap_err();
        assert!(err.to_string().contains("alpha must be positive"), "{err}");
        let err = parse_config_str("nx = two").unwrap_err();
        assert!(err.to_string().contains("invalid value for `nx`"), "{err}");
        let err = parse_config_str("t_min = 0.5").unwrap_err();
        assert!(err.to_string().contains("contain t = 0"), "{err}");
        let err = parse_config_str("alpha = 1\nalpha = 2").unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }
}
