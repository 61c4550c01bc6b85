//! Finite-support distributions, symmetric kernels, and exact moments.
//!
//! Everything downstream (projections, brute-force oracles, bound
//! verification) relies on the sample space being a finite set of real
//! atoms, so moments here are finite sums rather than integrals. The one
//! unbounded law the estimates need — the centered unit-rate Poisson —
//! enters either truncated to finite support or through dedicated
//! log-space series evaluators that stay accurate for large moment orders.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::{
    for_each_permutation, for_each_product, stream_u01, NeumaierSum,
};

/// Default cap on the number of terms any exact enumeration may visit.
pub const ENUMERATION_CAP: u128 = 10_000_000;

/// Absolute tolerance treating a variance as zero.
pub const DEGENERACY_TOL: f64 = 1e-12;

const PROB_SUM_TOL: f64 = 1e-12;

/// A finite-support law given by distinct atoms and their probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<(f64, f64)>,
    cumulative: Vec<f64>,
}

impl DiscreteDistribution {
    /// Validates and normalizes the atom list (sorted by support point).
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.len() < 2 {
            return Err(Error::InvalidDistribution(format!(
                "support size must be at least 2, got {}",
                atoms.len()
            )));
        }
        for &(x, p) in &atoms {
            if !x.is_finite() {
                return Err(Error::InvalidDistribution(format!("non-finite atom {x}")));
            }
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidDistribution(format!(
                    "probability {p} for atom {x} outside (0, 1]"
                )));
            }
        }
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidDistribution(
                "atoms must be distinct".to_string(),
            ));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let mut cumulative = Vec::with_capacity(atoms.len());
        let mut acc = 0.0;
        for &(_, p) in &atoms {
            acc += p;
            cumulative.push(acc);
        }
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(Self { atoms, cumulative })
    }

    /// The symmetric two-point law on {-1, +1}.
    pub fn rademacher() -> Self {
        Self::new(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    pub fn point(&self, i: usize) -> f64 {
        self.atoms[i].0
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.atoms[i].1
    }

    pub fn support(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.0).collect()
    }

    /// E f(xi), exact over the support.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut s = NeumaierSum::new();
        for &(x, p) in &self.atoms {
            s.add(f(x) * p);
        }
        s.total()
    }

    pub fn mean(&self) -> f64 {
        self.expect(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expect(|x| (x - m) * (x - m))
    }

    /// Inverse-CDF lookup for u in [0, 1).
    fn quantile_index(&self, u: f64) -> usize {
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.atoms.len() - 1)
    }
}

type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A symmetric function of `arity` real arguments.
///
/// Symmetry is not enforced at construction (closures are opaque); it is
/// checked exhaustively over support tuples by [`Kernel::verify_symmetric`],
/// which [`center`] runs before anything downstream trusts the kernel.
#[derive(Clone)]
pub struct Kernel {
    name: String,
    arity: usize,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .finish()
    }
}

impl Kernel {
    pub fn custom<F>(name: impl Into<String>, arity: usize, eval: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            arity,
            eval: Arc::new(eval),
        }
    }

    /// x (degree 1).
    pub fn identity() -> Self {
        Self::custom("identity", 1, |a| a[0])
    }

    /// x + y.
    pub fn sum() -> Self {
        Self::custom("sum", 2, |a| a[0] + a[1])
    }

    /// Product of all arguments; the witness kernel for the lower bound.
    pub fn product(arity: usize) -> Self {
        Self::custom(format!("product{arity}"), arity, |a| {
            a.iter().product()
        })
    }

    /// (x - y)^2 / 2, the sample-variance kernel.
    pub fn sample_variance() -> Self {
        Self::custom("sample_variance", 2, |a| {
            let d = a[0] - a[1];
            d * d / 2.0
        })
    }

    /// sgn(x + y), a bounded rank-1 kernel.
    pub fn sign_sum() -> Self {
        Self::custom("sign", 2, |a| {
            let s = a[0] + a[1];
            if s > 0.0 {
                1.0
            } else if s < 0.0 {
                -1.0
            } else {
                0.0
            }
        })
    }

    /// The built-in catalog: spans rank 1 and full rank, bounded and
    /// unbounded values, degrees 1 through 3.
    pub fn catalog() -> Vec<Kernel> {
        vec![
            Self::identity(),
            Self::sum(),
            Self::product(2),
            Self::product(3),
            Self::sample_variance(),
            Self::sign_sum(),
        ]
    }

    pub fn by_name(name: &str, arity: Option<usize>) -> Result<Kernel> {
        match name {
            "identity" => Ok(Self::identity()),
            "sum" => Ok(Self::sum()),
            "product" => {
                let d = arity.unwrap_or(2);
                if d == 0 {
                    return Err(Error::Param("product kernel needs arity >= 1".into()));
                }
                Ok(Self::product(d))
            }
            "sample_variance" => Ok(Self::sample_variance()),
            "sign" => Ok(Self::sign_sum()),
            other => Err(Error::Param(format!("unknown kernel `{other}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, args: &[f64]) -> f64 {
        debug_assert_eq!(args.len(), self.arity);
        (self.eval)(args)
    }

    /// Exhaustive permutation check over all support tuples.
    pub fn verify_symmetric(&self, dist: &DiscreteDistribution) -> Result<()> {
        let s = dist.support_size();
        let terms = (s as u128).checked_pow(self.arity as u32);
        match terms {
            Some(t) if t <= ENUMERATION_CAP => {}
            _ => {
                return Err(Error::CapExceeded {
                    needed: terms.unwrap_or(u128::MAX),
                    cap: ENUMERATION_CAP,
                })
            }
        }
        let pts = dist.support();
        let mut args = vec![0.0; self.arity];
        let mut permuted = vec![0.0; self.arity];
        let mut ok = true;
        for_each_product(s, self.arity, |digits| {
            if !ok {
                return;
            }
            for (a, &d) in args.iter_mut().zip(digits) {
                *a = pts[d];
            }
            let base = self.eval(&args);
            for_each_permutation(self.arity, |perm| {
                for (i, &pi) in perm.iter().enumerate() {
                    permuted[i] = args[pi];
                }
                let v = self.eval(&permuted);
                if (v - base).abs() > 1e-12 * base.abs().max(1.0) {
                    ok = false;
                }
            });
        });
        if ok {
            Ok(())
        } else {
            Err(Error::NonSymmetric {
                kernel: self.name.clone(),
            })
        }
    }
}

/// A kernel together with its exact mean and variance under a fixed law.
#[derive(Debug, Clone)]
pub struct CenteredKernel {
    base: Kernel,
    mean: f64,
    variance: f64,
}

impl CenteredKernel {
    pub fn base(&self) -> &Kernel {
        &self.base
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn arity(&self) -> usize {
        self.base.arity()
    }

    /// Phi(args) - E Phi.
    pub fn eval_centered(&self, args: &[f64]) -> f64 {
        self.base.eval(args) - self.mean
    }
}

fn enumeration_guard(support: usize, arity: usize) -> Result<()> {
    match (support as u128).checked_pow(arity as u32) {
        Some(t) if t <= ENUMERATION_CAP => Ok(()),
        other => Err(Error::CapExceeded {
            needed: other.unwrap_or(u128::MAX),
            cap: ENUMERATION_CAP,
        }),
    }
}

/// Exact expectation of `f` over support^arity with product weights.
pub(crate) fn expect_tuple<F: FnMut(&[f64]) -> f64>(
    dist: &DiscreteDistribution,
    arity: usize,
    mut f: F,
) -> Result<f64> {
    enumeration_guard(dist.support_size(), arity)?;
    let pts = dist.support();
    let mut args = vec![0.0; arity];
    let mut acc = NeumaierSum::new();
    for_each_product(dist.support_size(), arity, |digits| {
        let mut w = 1.0;
        for (i, &d) in digits.iter().enumerate() {
            args[i] = pts[d];
            w *= dist.prob(d);
        }
        acc.add(f(&args) * w);
    });
    Ok(acc.total())
}

/// (E |Phi|^p)^(1/p), exact over the support.
pub fn kernel_lp_norm(kernel: &Kernel, dist: &DiscreteDistribution, p: f64) -> Result<f64> {
    if p < 1.0 {
        return Err(Error::Domain(format!("L_p norm needs p >= 1, got {p}")));
    }
    let m = expect_tuple(dist, kernel.arity(), |args| kernel.eval(args).abs().powf(p))?;
    Ok(m.powf(1.0 / p))
}

/// ln |Phi|_p by log-sum-exp over the support; stays finite where the
/// plain sum of |Phi|^p overflows at large p.
pub fn kernel_lp_norm_ln(kernel: &Kernel, dist: &DiscreteDistribution, p: f64) -> Result<f64> {
    if p < 1.0 {
        return Err(Error::Domain(format!("L_p norm needs p >= 1, got {p}")));
    }
    let mut ln_terms = Vec::new();
    let mut peak = f64::NEG_INFINITY;
    enumeration_guard(dist.support_size(), kernel.arity())?;
    let pts = dist.support();
    let mut args = vec![0.0; kernel.arity()];
    for_each_product(dist.support_size(), kernel.arity(), |digits| {
        let mut ln_w = 0.0;
        for (i, &d) in digits.iter().enumerate() {
            args[i] = pts[d];
            ln_w += dist.prob(d).ln();
        }
        let v = kernel.eval(&args).abs();
        if v > 0.0 {
            let t = p * v.ln() + ln_w;
            ln_terms.push(t);
            peak = peak.max(t);
        }
    });
    if ln_terms.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    let sum: f64 = ln_terms.iter().map(|&t| (t - peak).exp()).sum();
    Ok((peak + sum.ln()) / p)
}

/// E Phi, exact over the support.
pub fn kernel_mean(kernel: &Kernel, dist: &DiscreteDistribution) -> Result<f64> {
    expect_tuple(dist, kernel.arity(), |args| kernel.eval(args))
}

/// Verifies symmetry, then records the exact mean and variance.
pub fn center(kernel: &Kernel, dist: &DiscreteDistribution) -> Result<CenteredKernel> {
    kernel.verify_symmetric(dist)?;
    let mean = kernel_mean(kernel, dist)?;
    let variance = expect_tuple(dist, kernel.arity(), |args| {
        let c = kernel.eval(args) - mean;
        c * c
    })?;
    if variance <= DEGENERACY_TOL {
        return Err(Error::DegenerateKernel { variance });
    }
    Ok(CenteredKernel {
        base: kernel.clone(),
        mean,
        variance,
    })
}

// ---------------------------------------------------------------------------
// Centered unit-rate Poisson: xi = eta - 1
// ---------------------------------------------------------------------------

/// ln E |xi|^p for the centered unit-rate Poisson, by series summation in
/// log space. The k-th term is exp(-1) |k-1|^p / k!, whose peak dwarfs
/// f64 range for large p, so terms are accumulated as logs.
pub fn centered_poisson_ln_abs_moment(p: f64) -> f64 {
    assert!(p >= 1.0, "absolute moment needs p >= 1");
    // k = 0 contributes exp(-1) * 1^p; k = 1 contributes zero.
    let mut ln_terms = vec![-1.0f64];
    let mut ln_k_factorial = 0.0;
    let mut peak = -1.0f64;
    for k in 1..u64::MAX {
        ln_k_factorial += (k as f64).ln();
        if k == 1 {
            continue;
        }
        let t = -1.0 + p * ((k - 1) as f64).ln() - ln_k_factorial;
        ln_terms.push(t);
        peak = peak.max(t);
        if k > 3 && t < peak - 60.0 {
            break;
        }
    }
    let sum: f64 = ln_terms.iter().map(|&t| (t - peak).exp()).sum();
    peak + sum.ln()
}

/// |xi|_p = (E |xi|^p)^(1/p) for the centered unit-rate Poisson.
pub fn centered_poisson_norm(p: f64) -> f64 {
    (centered_poisson_ln_abs_moment(p) / p).exp()
}

/// Exact tail T(x) = max(P(xi > x), P(xi < -x)) of the centered Poisson.
pub fn centered_poisson_tail(x: f64) -> f64 {
    assert!(x > 0.0);
    // xi >= -1, so the lower tail is P(eta = 0) for x < 1 and 0 beyond.
    let lower = if x < 1.0 { (-1.0f64).exp() } else { 0.0 };
    // P(xi > x) = P(eta > x + 1) = sum_{k >= floor(x+1)+1} e^{-1}/k!.
    let k_min = (x + 1.0).floor() as u64 + 1;
    let mut ln_term = -1.0;
    for k in 1..=k_min {
        ln_term -= (k as f64).ln();
    }
    let mut term = ln_term.exp();
    let mut upper = 0.0;
    let mut k = k_min;
    loop {
        upper += term;
        k += 1;
        term /= k as f64;
        if term < upper * 1e-18 + 1e-320 {
            break;
        }
    }
    lower.max(upper)
}

/// Truncated, renormalized law of xi = eta - 1 with atoms {k - 1}.
///
/// The cutoff K is chosen so extending the series changes E|xi|^p_max by
/// less than `tail_tol` relatively, for every p up to `p_max`.
pub fn truncated_centered_poisson(p_max: f64, tail_tol: f64) -> Result<DiscreteDistribution> {
    if p_max < 1.0 {
        return Err(Error::Param(format!(
            "truncated Poisson needs p_max >= 1, got {p_max}"
        )));
    }
    if tail_tol <= 0.0 || tail_tol.is_nan() {
        return Err(Error::Param(format!("tail_tol must be positive, got {tail_tol}")));
    }
    // Terms of E|xi|^p_max; stop once the running term is persistently
    // below tail_tol relative to the accumulated sum.
    let mut probs = vec![(-1.0f64).exp()];
    let mut moment_sum = probs[0]; // |0-1|^p = 1
    let mut ln_k_factorial = 0.0;
    let mut quiet = 0;
    for k in 1..2000u64 {
        ln_k_factorial += (k as f64).ln();
        let prob = (-1.0 - ln_k_factorial).exp();
        probs.push(prob);
        let contrib = if k == 1 {
            0.0
        } else {
            (-1.0 + p_max * ((k - 1) as f64).ln() - ln_k_factorial).exp()
        };
        moment_sum += contrib;
        if k >= 3 && contrib < tail_tol * moment_sum * 1e-3 {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let total: f64 = probs.iter().sum();
    let atoms: Vec<(f64, f64)> = probs
        .iter()
        .enumerate()
        .map(|(k, &p)| (k as f64 - 1.0, p / total))
        .collect();
    DiscreteDistribution::new(atoms)
}

/// |xi|_p divided by its asymptotic envelope p / (e ln p).
pub fn poisson_norm_growth(p: f64) -> Result<f64> {
    if p < 2.0 {
        return Err(Error::Domain(format!("growth ratio needs p >= 2, got {p}")));
    }
    let asymptotic = p / (std::f64::consts::E * p.ln());
    Ok(centered_poisson_norm(p) / asymptotic)
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// n i.i.d. draws from `dist`, bit-identical for identical (dist, n, seed).
pub fn sample_iid(dist: &DiscreteDistribution, n: usize, seed: u64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let u = stream_u01(seed, i as u64);
            dist.point(dist.quantile_index(u))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_distributions() {
        assert!(DiscreteDistribution::new(vec![(0.0, 1.0)]).is_err());
        assert!(DiscreteDistribution::new(vec![(0.0, 0.5), (0.0, 0.5)]).is_err());
        assert!(DiscreteDistribution::new(vec![(0.0, 0.5), (1.0, 0.6)]).is_err());
        assert!(DiscreteDistribution::new(vec![(0.0, -0.5), (1.0, 1.5)]).is_err());
    }

    #[test]
    fn rademacher_moments() {
        let d = DiscreteDistribution::rademacher();
        assert_eq!(d.mean(), 0.0);
        assert_eq!(d.variance(), 1.0);
    }

    #[test]
    fn lp_norm_identity_rademacher() {
        let d = DiscreteDistribution::rademacher();
        let n = kernel_lp_norm(&Kernel::identity(), &d, 2.0).unwrap();
        assert!((n - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lp_norm_sum_rademacher_is_sqrt2() {
        // exhaustive over 4 outcomes: E(x+y)^2 = 2
        let d = DiscreteDistribution::rademacher();
        let n = kernel_lp_norm(&Kernel::sum(), &d, 2.0).unwrap();
        assert!((n - 2.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn lp_norm_product_p4_rademacher() {
        let d = DiscreteDistribution::rademacher();
        let n = kernel_lp_norm(&Kernel::product(2), &d, 4.0).unwrap();
        assert!((n - 1.0).abs() < 1e-14);
    }

    #[test]
    fn center_sample_variance_kernel() {
        // 4-outcome enumeration: mean 1, centered values -1 (same sign) / +1 (different)
        let d = DiscreteDistribution::rademacher();
        let ck = center(&Kernel::sample_variance(), &d).unwrap();
        assert!((ck.mean() - 1.0).abs() < 1e-14);
        assert!((ck.eval_centered(&[1.0, 1.0]) + 1.0).abs() < 1e-14);
        assert!((ck.eval_centered(&[1.0, -1.0]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn center_identity_unchanged() {
        let d = DiscreteDistribution::rademacher();
        let ck = center(&Kernel::identity(), &d).unwrap();
        assert_eq!(ck.mean(), 0.0);
        assert_eq!(ck.variance(), 1.0);
    }

    #[test]
    fn center_shifted_product() {
        let d = DiscreteDistribution::rademacher();
        let shifted = Kernel::custom("xy+5", 2, |a| a[0] * a[1] + 5.0);
        let ck = center(&shifted, &d).unwrap();
        assert!((ck.mean() - 5.0).abs() < 1e-14);
        assert!((ck.eval_centered(&[1.0, -1.0]) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn center_rejects_constant_kernel() {
        let d = DiscreteDistribution::rademacher();
        let c = Kernel::custom("const", 1, |_| 3.0);
        assert!(matches!(
            center(&c, &d),
            Err(Error::DegenerateKernel { .. })
        ));
    }

    #[test]
    fn asymmetric_kernel_detected() {
        let d = DiscreteDistribution::rademacher();
        let k = Kernel::custom("x-y", 2, |a| a[0] - a[1]);
        assert!(matches!(
            k.verify_symmetric(&d),
            Err(Error::NonSymmetric { .. })
        ));
        assert!(matches!(center(&k, &d), Err(Error::NonSymmetric { .. })));
    }

    #[test]
    fn catalog_kernels_are_symmetric() {
        let d = DiscreteDistribution::rademacher();
        for k in Kernel::catalog() {
            k.verify_symmetric(&d).unwrap();
        }
    }

    #[test]
    fn lp_norm_squared_matches_variance_for_centered() {
        let d = DiscreteDistribution::rademacher();
        for k in Kernel::catalog() {
            let ck = center(&k, &d).unwrap();
            let centered = {
                let mean = ck.mean();
                let base = k.clone();
                Kernel::custom("centered", k.arity(), move |a| base.eval(a) - mean)
            };
            let l2 = kernel_lp_norm(&centered, &d, 2.0).unwrap();
            assert!(
                (l2 * l2 - ck.variance()).abs() < 1e-12,
                "{}: {} vs {}",
                k.name(),
                l2 * l2,
                ck.variance()
            );
        }
    }

    #[test]
    fn poisson_variance_is_one() {
        let d = truncated_centered_poisson(2.0, 1e-15).unwrap();
        assert!((d.variance() - 1.0).abs() < 1e-12);
        assert!(d.mean().abs() < 1e-12);
    }

    #[test]
    fn poisson_first_absolute_moment() {
        // series sum_k e^{-1} |k-1|/k! telescopes to 2/e
        let d = truncated_centered_poisson(1.0, 1e-15).unwrap();
        let m1 = d.expect(|x| x.abs());
        assert!((m1 - 2.0 / std::f64::consts::E).abs() < 1e-13, "{m1}");
    }

    #[test]
    fn poisson_truncation_is_stable() {
        // extending the cutoff moves E|xi|^p_max by less than 10 * tail_tol
        let p_max = 4.0;
        let tol = 1e-15;
        let d = truncated_centered_poisson(p_max, tol).unwrap();
        let m = d.expect(|x| x.abs().powf(p_max));
        let exact = centered_poisson_ln_abs_moment(p_max).exp();
        assert!((m - exact).abs() <= 10.0 * tol * exact, "{m} vs {exact}");
    }

    #[test]
    fn poisson_series_matches_closed_forms() {
        assert!((centered_poisson_norm(2.0) - 1.0).abs() < 1e-13);
        let m1 = centered_poisson_ln_abs_moment(1.0).exp();
        assert!((m1 - 2.0 / std::f64::consts::E).abs() < 1e-13);
    }

    #[test]
    fn poisson_growth_ratio_values() {
        // ratio(2) = e ln 2 / 2
        let r2 = poisson_norm_growth(2.0).unwrap();
        let expected = std::f64::consts::E * 2.0f64.ln() / 2.0;
        assert!((r2 - expected).abs() < 1e-12);
        // the trend check: p = 200 sits closer to 1 than p = 20
        let r20 = poisson_norm_growth(20.0).unwrap();
        let r200 = poisson_norm_growth(200.0).unwrap();
        assert!((r200 - 1.0).abs() < (r20 - 1.0).abs());
        for p in [2.0, 5.0, 50.0, 500.0, 5000.0] {
            assert!(poisson_norm_growth(p).unwrap() > 0.0);
        }
        assert!(poisson_norm_growth(1.5).is_err());
    }

    #[test]
    fn poisson_tail_matches_direct_sum() {
        // P(xi > 2) = P(eta >= 4) = 1 - e^{-1}(1 + 1 + 1/2 + 1/6)
        let direct = 1.0
            - (-1.0f64).exp() * (1.0 + 1.0 + 0.5 + 1.0 / 6.0);
        assert!((centered_poisson_tail(2.0) - direct).abs() < 1e-15);
        // below x = 1 the lower tail P(eta = 0) = e^{-1} dominates
        assert!((centered_poisson_tail(0.5) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn sampling_is_deterministic_and_unbiased() {
        let d = DiscreteDistribution::rademacher();
        let n = 100_000;
        let a = sample_iid(&d, n, 1);
        let b = sample_iid(&d, n, 1);
        assert_eq!(a, b);
        let mean: f64 = a.iter().sum::<f64>() / n as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "mean {mean}");
        let single = sample_iid(&d, 1, 99);
        assert!(single[0] == -1.0 || single[0] == 1.0);
    }

    #[test]
    fn sampling_respects_marginals() {
        let d = DiscreteDistribution::new(vec![(0.0, 0.25), (1.0, 0.75)]).unwrap();
        let n = 200_000;
        let s = sample_iid(&d, n, 7);
        let frac1 = s.iter().filter(|&&x| x == 1.0).count() as f64 / n as f64;
        assert!((frac1 - 0.75).abs() < 0.005, "{frac1}");
    }

    #[test]
    fn enumeration_cap_enforced() {
        let atoms: Vec<(f64, f64)> = (0..40).map(|i| (i as f64, 1.0 / 40.0)).collect();
        let d = DiscreteDistribution::new(atoms).unwrap();
        let k = Kernel::product(5); // 40^5 > 1e7
        assert!(matches!(
            kernel_lp_norm(&k, &d, 2.0),
            Err(Error::CapExceeded { .. })
        ));
    }
}
