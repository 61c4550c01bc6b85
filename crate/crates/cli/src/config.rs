//! The run configuration file: one JSON document drives every subcommand,
//! each reading the sections it needs. Unknown fields are rejected so
//! typos surface as validation errors, not silent defaults.

use serde::Deserialize;
use ustat_core::config::{DistSpec, KernelSpec};
use ustat_core::model::{DiscreteDistribution, Kernel};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub dist: Option<DistSpec>,
    #[serde(default)]
    pub kernel: Option<KernelSpec>,
    /// Single sample size for `variance` and `bound`.
    #[serde(default)]
    pub n: Option<usize>,
    /// Sample sizes for `simulate`, `verify`, `norm`, and `tail`.
    #[serde(default)]
    pub n_values: Option<Vec<usize>>,
    #[serde(default)]
    pub replications: Option<usize>,
    /// Single moment order for `bound`.
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub p_values: Option<Vec<f64>>,
    #[serde(default)]
    pub tail_grid: Option<TailGridSpec>,
    /// Explicit bound inputs, an alternative to a kernel spec for `bound`.
    #[serde(default)]
    pub bound: Option<ExplicitBound>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TailGridSpec {
    Points(Vec<f64>),
    Range { min: f64, max: f64, points: usize },
}

impl TailGridSpec {
    pub fn to_points(&self) -> Result<Vec<f64>, String> {
        match self {
            TailGridSpec::Points(p) => Ok(p.clone()),
            TailGridSpec::Range { min, max, points } => {
                if *points < 2 || max <= min || max.is_nan() || *min < 0.0 || min.is_nan() {
                    return Err(format!(
                        "tail_grid range needs 0 <= min < max and points >= 2, \
                         got min={min}, max={max}, points={points}"
                    ));
                }
                Ok((0..*points)
                    .map(|i| min + (max - min) * i as f64 / (*points as f64 - 1.0))
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitBound {
    pub d: usize,
    pub r: usize,
    pub n: usize,
    pub p: f64,
    pub phi_p: f64,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }

    pub fn model(&self) -> Result<(DiscreteDistribution, Kernel), String> {
        let dist = self
            .dist
            .as_ref()
            .ok_or("config is missing the `dist` section")?
            .build()
            .map_err(|e| format!("config `dist`: {e}"))?;
        let kernel = self
            .kernel
            .as_ref()
            .ok_or("config is missing the `kernel` section")?
            .build()
            .map_err(|e| format!("config `kernel`: {e}"))?;
        Ok((dist, kernel))
    }

    pub fn sample_sizes(&self, degree: usize) -> Result<Vec<usize>, String> {
        let ns = match (&self.n_values, self.n) {
            (Some(ns), _) => ns.clone(),
            (None, Some(n)) => vec![n],
            (None, None) => vec![degree + 1, 10, 50],
        };
        for &n in &ns {
            if n <= degree {
                return Err(format!(
                    "sample size {n} does not exceed the kernel degree {degree}"
                ));
            }
        }
        Ok(ns)
    }

    pub fn moment_orders(&self) -> Vec<f64> {
        match (&self.p_values, self.p) {
            (Some(ps), _) => ps.clone(),
            (None, Some(p)) => vec![p],
            (None, None) => vec![2.0, 3.0, 4.0, 6.0],
        }
    }

    pub fn tail_points(&self) -> Result<Vec<f64>, String> {
        match &self.tail_grid {
            Some(g) => g.to_points(),
            None => Ok((0..25).map(|i| 0.5 * i as f64).collect()),
        }
    }
}
