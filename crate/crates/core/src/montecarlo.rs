//! Seeded, worker-count-independent simulation of U(n)/sigma(n), with
//! empirical moments and tails compared against the theoretical bounds.
//!
//! Replication j at sample size n draws its own seed as a pure function of
//! (master seed, n, j), so the draw matrix is bit-identical however the
//! replications are scheduled across threads. Reductions run over the
//! collected, index-ordered draws.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{moment_bound_normalized, BoundInput};
use crate::error::{Error, Result};
use crate::gls::{natural_psi, psi_d_transform, tail_envelope, theorem31_bound};
use crate::hoeffding::{decompose, ProjectionSet};
use crate::model::{
    center, kernel_lp_norm, sample_iid, CenteredKernel, DiscreteDistribution, Kernel,
};
use crate::numeric::derive_seed;
use crate::ustat::evaluate_raw;

/// Everything a simulation run depends on; the report is a pure function
/// of this plan.
#[derive(Debug, Clone)]
pub struct SimulationPlan {
    pub kernel: Kernel,
    pub dist: DiscreteDistribution,
    pub n_values: Vec<usize>,
    pub replications: usize,
    pub p_values: Vec<f64>,
    pub tail_grid: Vec<f64>,
    pub master_seed: u64,
}

impl SimulationPlan {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 100 {
            return Err(Error::Param(format!(
                "need at least 100 replications, got {}",
                self.replications
            )));
        }
        if self.n_values.is_empty() {
            return Err(Error::Param("no sample sizes requested".to_string()));
        }
        for &n in &self.n_values {
            if n <= self.kernel.arity() {
                return Err(Error::Param(format!(
                    "sample size {n} must exceed the kernel degree {}",
                    self.kernel.arity()
                )));
            }
        }
        for &p in &self.p_values {
            if p < 1.0 {
                return Err(Error::Param(format!("moment order {p} below 1")));
            }
        }
        if self.tail_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Param("tail grid must be increasing".to_string()));
        }
        if self.tail_grid.iter().any(|&x| x < 0.0) {
            return Err(Error::Param("tail grid must be nonnegative".to_string()));
        }
        Ok(())
    }
}

/// Normalized draws (U(n) - E U)/sigma(n), one vector per requested n.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationDraws {
    pub per_n: Vec<(usize, Vec<f64>)>,
}

/// Runs the plan. Output is a pure function of (plan, master seed): the
/// same plan gives byte-identical draws at any worker count.
pub fn simulate(plan: &SimulationPlan) -> Result<SimulationDraws> {
    plan.validate()?;
    let ck = center(&plan.kernel, &plan.dist)?;
    let set = decompose(&ck, &plan.dist)?;
    let mut per_n = Vec::with_capacity(plan.n_values.len());
    for &n in &plan.n_values {
        let sigma = set.variance_exact(n)?.sqrt();
        if sigma <= 0.0 || sigma.is_nan() {
            return Err(Error::DegenerateVariance { n });
        }
        let mean = ck.mean();
        let kernel = &plan.kernel;
        let dist = &plan.dist;
        let master = plan.master_seed;
        let draws: Vec<f64> = (0..plan.replications)
            .into_par_iter()
            .map(|j| {
                let seed = derive_seed(master, n as u64, j as u64);
                let sample = sample_iid(dist, n, seed);
                let u = evaluate_raw(kernel, &sample, n)
                    .expect("plan validated: n > degree and sample has length n");
                (u - mean) / sigma
            })
            .collect();
        per_n.push((n, draws));
    }
    Ok(SimulationDraws { per_n })
}

/// (mean |draw|^p)^(1/p) with a delta-method standard error.
pub fn empirical_moment(draws: &[f64], p: f64) -> (f64, f64) {
    assert!(!draws.is_empty() && p >= 1.0);
    let r = draws.len() as f64;
    let mut mean = 0.0;
    for &x in draws {
        mean += x.abs().powf(p);
    }
    mean /= r;
    let mut var = 0.0;
    for &x in draws {
        let d = x.abs().powf(p) - mean;
        var += d * d;
    }
    var /= r * (r - 1.0);
    let estimate = mean.powf(1.0 / p);
    // d/dm m^{1/p} = m^{1/p - 1} / p
    let se = if mean > 0.0 {
        mean.powf(1.0 / p - 1.0) / p * var.sqrt()
    } else {
        0.0
    };
    (estimate, se)
}

/// One empirical tail level.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TailEstimate {
    pub x: f64,
    /// max of the two one-sided exceedance frequencies.
    pub value: f64,
    /// binomial standard error sqrt(T(1-T)/R).
    pub se: f64,
}

/// Empirical T(x) = max of one-sided exceedance frequencies over the grid.
pub fn empirical_tail(draws: &[f64], grid: &[f64]) -> Vec<TailEstimate> {
    let r = draws.len() as f64;
    grid.iter()
        .map(|&x| {
            let upper = draws.iter().filter(|&&v| v > x).count() as f64 / r;
            let lower = draws.iter().filter(|&&v| v < -x).count() as f64 / r;
            let value = upper.max(lower);
            TailEstimate {
                x,
                value,
                se: (value * (1.0 - value) / r).sqrt(),
            }
        })
        .collect()
}

/// Empirical moment row with its attached bound.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MomentRow {
    pub p: f64,
    pub empirical: f64,
    pub se: f64,
    /// Bound on |U(n)/sigma(n)|_p from the summed estimate.
    pub bound: f64,
    /// Effective constant bound / ((p/ln p)^d phi_p).
    pub c_eff: f64,
    /// bound / empirical: how much room the explicit constants leave.
    /// Large by construction; reported, not hidden.
    pub slack: f64,
}

/// Empirical tail row with the envelope value at that level.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TailRow {
    pub x: f64,
    pub empirical: f64,
    pub se: f64,
    pub envelope: f64,
    /// Whether R replications resolve probabilities this small.
    pub resolved: bool,
}

/// Results for one sample size.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleSizeReport {
    pub n: usize,
    pub sigma: f64,
    pub moments: Vec<MomentRow>,
    pub tails: Vec<TailRow>,
}

/// The full simulation report: empirical estimates side by side with the
/// theoretical values they are checked against.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationReport {
    pub kernel: String,
    pub degree: usize,
    pub rank: usize,
    pub kernel_variance: f64,
    pub master_seed: u64,
    pub replications: usize,
    /// Uniform-in-n bound on the transformed-norm of U(n)/sigma(n).
    pub gls_bound: f64,
    pub per_n: Vec<SampleSizeReport>,
}

/// Simulates the plan and attaches every theoretical value.
pub fn run_report(plan: &SimulationPlan) -> Result<SimulationReport> {
    let ck = center(&plan.kernel, &plan.dist)?;
    let set = decompose(&ck, &plan.dist)?;
    let draws = simulate(plan)?;
    build_report(plan, &ck, &set, &draws)
}

/// Report construction from existing draws; deterministic given its inputs.
pub fn build_report(
    plan: &SimulationPlan,
    kernel: &CenteredKernel,
    set: &ProjectionSet,
    draws: &SimulationDraws,
) -> Result<SimulationReport> {
    let d = kernel.arity();
    let r = set.rank();
    let gls_bound = theorem31_bound(set, &plan.n_values)?;
    let psi_d = psi_d_transform(&natural_psi(kernel, &plan.dist)?, d);
    let envelope = tail_envelope(&psi_d, gls_bound)?;
    // p = 2 anchors the normalization check, so it is always reported
    let mut p_values = plan.p_values.clone();
    if !p_values.contains(&2.0) {
        p_values.insert(0, 2.0);
    }
    let centered = {
        let base = kernel.base().clone();
        let mean = kernel.mean();
        Kernel::custom("centered", d, move |a| base.eval(a) - mean)
    };
    let mut per_n = Vec::new();
    for (n, row_draws) in &draws.per_n {
        let sigma = set.variance_exact(*n)?.sqrt();
        let mut moments = Vec::new();
        for &p in &p_values {
            let (empirical, se) = empirical_moment(row_draws, p);
            let phi_p = kernel_lp_norm(&centered, &plan.dist, p)?;
            let input = BoundInput {
                d,
                r,
                n: *n,
                p,
                phi_p,
            };
            let nb = moment_bound_normalized(&input, sigma)?;
            moments.push(MomentRow {
                p,
                empirical,
                se,
                bound: nb.bound,
                c_eff: nb.c_eff,
                slack: nb.bound / empirical.max(f64::MIN_POSITIVE),
            });
        }
        let resolution = 10.0 / plan.replications as f64;
        let tails = empirical_tail(row_draws, &plan.tail_grid)
            .into_iter()
            .map(|t| TailRow {
                x: t.x,
                empirical: t.value,
                se: t.se,
                envelope: if t.x > 0.0 { envelope.eval(t.x) } else { 1.0 },
                resolved: t.value >= resolution,
            })
            .collect();
        per_n.push(SampleSizeReport {
            n: *n,
            sigma,
            moments,
            tails,
        });
    }
    Ok(SimulationReport {
        kernel: plan.kernel.name().to_string(),
        degree: d,
        rank: r,
        kernel_variance: kernel.variance(),
        master_seed: plan.master_seed,
        replications: plan.replications,
        gls_bound,
        per_n,
    })
}

/// What a verdict compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// M-hat(2) against the exact normalization value 1.
    MomentNormalization,
    /// M-hat(p) against the normalized moment bound.
    MomentBound,
    /// Empirical tail against the exponential envelope.
    TailEnvelope,
}

/// One PASS/FAIL comparison: empirical <= theoretical + 3 SE.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub check: CheckKind,
    pub n: usize,
    /// p for moment checks, x for tail checks.
    pub parameter: f64,
    pub empirical: f64,
    pub se: f64,
    pub theoretical: f64,
    pub pass: bool,
}

/// Compares every empirical estimate against its theoretical value.
///
/// `scale` multiplies the theoretical side; 1.0 for a real verification,
/// 0.5 for the negative control that must produce at least one FAIL.
/// The 3 SE slack covers Monte Carlo noise only: the bounds themselves
/// are strict inequalities.
pub fn verify(report: &SimulationReport, scale: f64) -> Vec<Verdict> {
    let mut verdicts = Vec::new();
    for section in &report.per_n {
        for m in &section.moments {
            if m.p == 2.0 {
                verdicts.push(Verdict {
                    check: CheckKind::MomentNormalization,
                    n: section.n,
                    parameter: m.p,
                    empirical: m.empirical,
                    se: m.se,
                    theoretical: scale,
                    pass: m.empirical <= scale + 3.0 * m.se,
                });
            }
            verdicts.push(Verdict {
                check: CheckKind::MomentBound,
                n: section.n,
                parameter: m.p,
                empirical: m.empirical,
                se: m.se,
                theoretical: scale * m.bound,
                pass: m.empirical <= scale * m.bound + 3.0 * m.se,
            });
        }
        for t in &section.tails {
            verdicts.push(Verdict {
                check: CheckKind::TailEnvelope,
                n: section.n,
                parameter: t.x,
                empirical: t.empirical,
                se: t.se,
                theoretical: scale * t.envelope,
                pass: t.empirical <= scale * t.envelope + 3.0 * t.se,
            });
        }
    }
    verdicts
}
