//! JSON specs for distributions and kernels.
//!
//! ```json
//! {"dist": {"atoms": [[-1.0, 0.5], [1.0, 0.5]]},
//!  "kernel": {"name": "product", "arity": 2}}
//! ```
//!
//! or, for the truncated centered Poisson law:
//!
//! ```json
//! {"dist": {"poisson_centered": {"p_max": 6.0}}, "kernel": {"name": "identity"}}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{truncated_centered_poisson, DiscreteDistribution, Kernel};

pub const DEFAULT_POISSON_TAIL_TOL: f64 = 1e-15;

/// Distribution spec: explicit atoms or the truncated centered Poisson.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistSpec {
    Atoms(Vec<(f64, f64)>),
    PoissonCentered {
        p_max: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_tol: Option<f64>,
    },
}

impl DistSpec {
    pub fn build(&self) -> Result<DiscreteDistribution> {
        match self {
            DistSpec::Atoms(atoms) => DiscreteDistribution::new(atoms.clone()),
            DistSpec::PoissonCentered { p_max, tail_tol } => {
                truncated_centered_poisson(*p_max, tail_tol.unwrap_or(DEFAULT_POISSON_TAIL_TOL))
            }
        }
    }
}

/// Kernel spec by catalog name, with the arity where it is configurable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity: Option<usize>,
}

impl KernelSpec {
    pub fn build(&self) -> Result<Kernel> {
        Kernel::by_name(&self.name, self.arity)
    }
}

/// A (distribution, kernel) pair, the common core of every run config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    pub dist: DistSpec,
    pub kernel: KernelSpec,
}

impl ModelSpec {
    pub fn build(&self) -> Result<(DiscreteDistribution, Kernel)> {
        Ok((self.dist.build()?, self.kernel.build()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_atom_spec() {
        let json = r#"{"dist": {"atoms": [[-1.0, 0.5], [1.0, 0.5]]},
                       "kernel": {"name": "product", "arity": 2}}"#;
        let spec: ModelSpec = serde_json::from_str(json).unwrap();
        let (dist, kernel) = spec.build().unwrap();
        assert_eq!(dist.support_size(), 2);
        assert_eq!(kernel.arity(), 2);
        assert_eq!(kernel.name(), "product2");
    }

    #[test]
    fn parses_poisson_spec() {
        let json = r#"{"dist": {"poisson_centered": {"p_max": 2.0}},
                       "kernel": {"name": "identity"}}"#;
        let spec: ModelSpec = serde_json::from_str(json).unwrap();
        let (dist, _) = spec.build().unwrap();
        assert!((dist.variance() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_atoms() {
        let json = r#"{"dist": {"atoms": [[0.0, 0.7], [1.0, 0.7]]},
                       "kernel": {"name": "sum"}}"#;
        let spec: ModelSpec = serde_json::from_str(json).unwrap();
        assert!(spec.build().is_err());
    }

    #[test]
    fn rejects_unknown_kernel() {
        let spec = KernelSpec {
            name: "frobnicate".to_string(),
            arity: None,
        };
        assert!(spec.build().is_err());
    }

    #[test]
    fn roundtrips_through_json() {
        let spec = ModelSpec {
            dist: DistSpec::Atoms(vec![(0.0, 0.25), (1.0, 0.75)]),
            kernel: KernelSpec {
                name: "sign".to_string(),
                arity: None,
            },
        };
        let json = serde_json::to_string(&spec).unwrap();
        let back: ModelSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }
}
