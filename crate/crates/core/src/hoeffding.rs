//! Exact Hoeffding decomposition over finite support.
//!
//! The projection kernels g_m are built by the 2^m-term inclusion-exclusion
//! expansion of the conditional kernels, which is exact for finite-support
//! laws. The decomposition gives the rank, the orthogonal components
//! U_{n,m} with their martingale sums S_m(n) = C(n,m) U_{n,m}, and the
//! exact variance
//!
//!   sigma^2(n) = sum_{m=r}^{d} C(d,m)^2 C(n,m)^{-1} Var g_m,
//!
//! cross-validated against brute-force enumeration in the tests.

use crate::error::{Error, Result};
use crate::model::{expect_tuple, CenteredKernel, DiscreteDistribution, ENUMERATION_CAP};
use crate::numeric::{binomial, for_each_combination, for_each_product, NeumaierSum};

/// Variances at or below this are treated as exact zeros when locating
/// the rank; exact arithmetic would give 0 and the tolerance only absorbs
/// float noise from the table construction.
pub const RANK_TOL: f64 = 1e-10;

/// A function of `arity` arguments tabulated over support^arity.
#[derive(Debug, Clone)]
pub struct KernelTable {
    arity: usize,
    support: Vec<f64>,
    values: Vec<f64>,
}

impl KernelTable {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    fn point_index(&self, x: f64) -> Option<usize> {
        self.support
            .iter()
            .position(|&s| s == x)
            .or_else(|| {
                self.support
                    .iter()
                    .position(|&s| (s - x).abs() <= 1e-12 * x.abs().max(1.0))
            })
    }

    /// Looks the value up by support indices of the arguments.
    pub fn eval(&self, args: &[f64]) -> Result<f64> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: args.len(),
            });
        }
        let mut flat = 0usize;
        for &x in args {
            let i = self.point_index(x).ok_or_else(|| {
                Error::Domain(format!("point {x} is not in the table support"))
            })?;
            flat = flat * self.support.len() + i;
        }
        Ok(self.values[flat])
    }

    fn eval_by_digits(&self, digits: &[usize]) -> f64 {
        let mut flat = 0usize;
        for &i in digits {
            flat = flat * self.support.len() + i;
        }
        self.values[flat]
    }

    /// E g over support^arity (should vanish for projection tables).
    pub fn mean(&self, dist: &DiscreteDistribution) -> f64 {
        self.weighted_moment(dist, |v| v)
    }

    /// Var g = E g^2 for completely degenerate tables.
    pub fn variance(&self, dist: &DiscreteDistribution) -> f64 {
        let m = self.mean(dist);
        self.weighted_moment(dist, |v| (v - m) * (v - m))
    }

    /// (E |g|^p)^(1/p) over support^arity.
    pub fn lp_norm(&self, dist: &DiscreteDistribution, p: f64) -> f64 {
        self.weighted_moment(dist, |v| v.abs().powf(p)).powf(1.0 / p)
    }

    fn weighted_moment<F: Fn(f64) -> f64>(&self, dist: &DiscreteDistribution, f: F) -> f64 {
        let mut acc = NeumaierSum::new();
        for_each_product(self.support.len(), self.arity, |digits| {
            let mut w = 1.0;
            for &i in digits {
                w *= dist.prob(i);
            }
            acc.add(f(self.eval_by_digits(digits)) * w);
        });
        acc.total()
    }
}

fn table_guard(support: usize, arity: usize) -> Result<()> {
    match (support as u128).checked_pow(arity as u32) {
        Some(t) if t <= ENUMERATION_CAP => Ok(()),
        other => Err(Error::CapExceeded {
            needed: other.unwrap_or(u128::MAX),
            cap: ENUMERATION_CAP,
        }),
    }
}

/// Phi_m(x_1..x_m) = E Phi(x_1..x_m, xi_{m+1}..xi_d), exact by enumeration
/// of the integrated coordinates. m = 0 gives E Phi = 0; m = d gives Phi.
pub fn conditional_kernel(
    kernel: &CenteredKernel,
    dist: &DiscreteDistribution,
    m: usize,
) -> Result<KernelTable> {
    let d = kernel.arity();
    if m > d {
        return Err(Error::ArityMismatch { expected: d, got: m });
    }
    table_guard(dist.support_size(), d)?;
    let support = dist.support();
    let s = support.len();
    let mut values = vec![0.0; s.pow(m as u32)];
    let mut args = vec![0.0; d];
    let mut flat = 0usize;
    for_each_product(s, m, |fixed| {
        for (i, &fi) in fixed.iter().enumerate() {
            args[i] = support[fi];
        }
        let tail = expect_tuple(dist, d - m, |free| {
            args[m..].copy_from_slice(free);
            kernel.eval_centered(&args)
        })
        .expect("guarded above");
        values[flat] = tail;
        flat += 1;
    });
    Ok(KernelTable {
        arity: m,
        support,
        values,
    })
}

/// The m-th projection kernel by inclusion-exclusion over the conditional
/// kernels: g_m(x) = sum_{A subset of {1..m}} (-1)^{m-|A|} Phi_|A|(x_A).
pub fn projection(
    kernel: &CenteredKernel,
    dist: &DiscreteDistribution,
    m: usize,
) -> Result<KernelTable> {
    let d = kernel.arity();
    if m == 0 || m > d {
        return Err(Error::ArityMismatch { expected: d, got: m });
    }
    let conditionals: Vec<KernelTable> = (0..=m)
        .map(|k| conditional_kernel(kernel, dist, k))
        .collect::<Result<_>>()?;
    let support = dist.support();
    let s = support.len();
    let mut values = vec![0.0; s.pow(m as u32)];
    let mut flat = 0usize;
    let mut sub = Vec::with_capacity(m);
    for_each_product(s, m, |digits| {
        let mut acc = NeumaierSum::new();
        for mask in 0u32..(1 << m) {
            let k = mask.count_ones() as usize;
            sub.clear();
            for (i, &di) in digits.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    sub.push(di);
                }
            }
            let term = conditionals[k].eval_by_digits(&sub);
            let sign = if (m - k).is_multiple_of(2) { 1.0 } else { -1.0 };
            acc.add(sign * term);
        }
        values[flat] = acc.total();
        flat += 1;
    });
    Ok(KernelTable {
        arity: m,
        support,
        values,
    })
}

/// The full family g_1..g_d with variances and rank.
#[derive(Debug, Clone)]
pub struct ProjectionSet {
    projections: Vec<KernelTable>,
    variances: Vec<f64>,
    rank: usize,
    kernel_variance: f64,
}

impl ProjectionSet {
    /// g_m for m in 1..=d.
    pub fn projection(&self, m: usize) -> &KernelTable {
        &self.projections[m - 1]
    }

    /// Var g_m for m in 1..=d.
    pub fn variance_of(&self, m: usize) -> f64 {
        self.variances[m - 1]
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.projections.len()
    }

    /// sigma^2(n), exact.
    pub fn variance_exact(&self, n: usize) -> Result<f64> {
        let d = self.degree();
        if n < d {
            return Err(Error::ArityMismatch { expected: d, got: n });
        }
        let mut acc = NeumaierSum::new();
        for m in self.rank..=d {
            acc.add(
                binomial(d as u64, m as u64).powi(2) / binomial(n as u64, m as u64)
                    * self.variances[m - 1],
            );
        }
        Ok(acc.total())
    }

    /// Leading term r! C(d,r)^2 n^{-r} Var g_r of sigma^2(n).
    pub fn variance_asymptotic(&self, n: usize) -> Result<f64> {
        let d = self.degree();
        if n < d {
            return Err(Error::ArityMismatch { expected: d, got: n });
        }
        let r = self.rank;
        let r_factorial: f64 = (1..=r).map(|i| i as f64).product();
        Ok(r_factorial * binomial(d as u64, r as u64).powi(2) * (n as f64).powi(-(r as i32))
            * self.variances[r - 1])
    }

    /// Sum over m of C(d,m) U_{n,m} starting at the rank; equals the
    /// centered U(n) exactly.
    pub fn reconstruct(&self, sample: &[f64], n: usize) -> Result<f64> {
        let d = self.degree();
        let mut acc = NeumaierSum::new();
        for m in self.rank..=d {
            let c = component_ustat(self.projection(m), sample, n)?;
            acc.add(binomial(d as u64, m as u64) * c.u_nm);
        }
        Ok(acc.total())
    }
}

/// Builds every projection kernel of `kernel` and locates the rank.
pub fn decompose(kernel: &CenteredKernel, dist: &DiscreteDistribution) -> Result<ProjectionSet> {
    let d = kernel.arity();
    let mut projections = Vec::with_capacity(d);
    let mut variances = Vec::with_capacity(d);
    for m in 1..=d {
        let g = projection(kernel, dist, m)?;
        variances.push(g.variance(dist));
        projections.push(g);
    }
    let rank = variances
        .iter()
        .position(|&v| v > RANK_TOL)
        .map(|i| i + 1)
        .ok_or(Error::TrivialKernel)?;
    Ok(ProjectionSet {
        projections,
        variances,
        rank,
        kernel_variance: kernel.variance(),
    })
}

impl ProjectionSet {
    pub fn kernel_variance(&self) -> f64 {
        self.kernel_variance
    }
}

/// Smallest m with Var g_m above the rank tolerance.
pub fn rank(kernel: &CenteredKernel, dist: &DiscreteDistribution) -> Result<usize> {
    Ok(decompose(kernel, dist)?.rank())
}

/// The degree-m component U_{n,m} and its martingale sum S_m(n).
#[derive(Debug, Clone, Copy)]
pub struct ComponentValue {
    /// U_{n,m} = C(n,m)^{-1} sum over increasing m-tuples of g_m.
    pub u_nm: f64,
    /// S_m(n) = C(n,m) U_{n,m}, the martingale in n.
    pub martingale: f64,
}

pub fn component_ustat(g: &KernelTable, sample: &[f64], n: usize) -> Result<ComponentValue> {
    let m = g.arity();
    if n < m {
        return Err(Error::ArityMismatch { expected: m, got: n });
    }
    if sample.len() < n {
        return Err(Error::SampleTooShort {
            needed: n,
            got: sample.len(),
        });
    }
    let mut args = vec![0.0; m];
    let mut acc = NeumaierSum::new();
    let mut lookup_err = None;
    for_each_combination(n, m, |tuple| {
        for (a, &i) in args.iter_mut().zip(tuple) {
            *a = sample[i];
        }
        match g.eval(&args) {
            Ok(v) => acc.add(v),
            Err(e) => lookup_err = Some(e),
        }
    });
    if let Some(e) = lookup_err {
        return Err(e);
    }
    let sum = acc.total();
    Ok(ComponentValue {
        u_nm: sum / binomial(n as u64, m as u64),
        martingale: sum,
    })
}

/// Free-function form of [`ProjectionSet::reconstruct`].
pub fn reconstruct(
    kernel: &CenteredKernel,
    dist: &DiscreteDistribution,
    sample: &[f64],
    n: usize,
) -> Result<f64> {
    decompose(kernel, dist)?.reconstruct(sample, n)
}

/// Free-function form of [`ProjectionSet::variance_exact`].
pub fn variance_exact(
    kernel: &CenteredKernel,
    dist: &DiscreteDistribution,
    n: usize,
) -> Result<f64> {
    decompose(kernel, dist)?.variance_exact(n)
}

/// Free-function form of [`ProjectionSet::variance_asymptotic`].
pub fn variance_asymptotic(
    kernel: &CenteredKernel,
    dist: &DiscreteDistribution,
    n: usize,
) -> Result<f64> {
    decompose(kernel, dist)?.variance_asymptotic(n)
}
