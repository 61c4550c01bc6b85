//! Grand-Lebesgue-style norms: moment growth generators, convex
//! conjugates, exponential tail envelopes, and the exponent algebra of the
//! standard example families.
//!
//! The central identity is Chernoff through the moment scale: if
//! |zeta|_p <= N psi(p) on [2, b), then for y > e N
//!
//!   T_zeta(y) <= exp(-nu*(ln(y / N))),   nu(p) = p ln psi(p),
//!
//! where nu* is the one-dimensional convex conjugate restricted to [2, b).
//! Every conjugate here is evaluated at finitely many points, which can
//! only under-estimate the supremum, so computed envelopes stay valid
//! upper bounds on the true tails.

mod conjugate;
mod family;
mod psi;
mod tail;

pub use conjugate::{nu_conjugate, young_fenchel};
pub use family::{
    moment_to_tail, tail_to_moment, ustat_compose, ustat_tail, MomentGrowth, Ratio, TailShape,
};
pub use psi::{gls_norm, gls_norm_ln, natural_psi, nu, psi_d_transform, PsiFamily, PsiFunction};
pub use tail::{norm_from_tail, orlicz_young, orlicz_young_curve, tail_envelope, TailFunction};

use crate::error::Result;
use crate::hoeffding::ProjectionSet;
use crate::numeric::binomial;

/// Bound on sup_n ||U(n)/sigma(n)|| in the norm generated by the d-fold
/// transform of the kernel's natural psi.
///
/// With the natural psi the |Phi|_p factors cancel, leaving for each n
///
///   sup_p  sum_m gamma(m) C(d,m) C(n,m)^{-1/2} (p/ln p)^{m-d} / sigma(n),
///
/// maximized over the requested sample sizes. Each summand is largest
/// where p/ln p is smallest (p = e), and the result stays bounded in n,
/// which is what makes a single constant serve every sample size.
pub fn theorem31_bound(set: &ProjectionSet, n_values: &[usize]) -> Result<f64> {
    let d = set.degree();
    let r = set.rank();
    let mut worst: f64 = 0.0;
    for &n in n_values {
        let sigma = set.variance_exact(n)?.sqrt();
        if sigma <= 0.0 || sigma.is_nan() {
            return Err(crate::error::Error::DegenerateVariance { n });
        }
        // sup over p of a sum of nonincreasing functions of p/ln p;
        // scan the grid anyway, it is cheap and exact at the kink p = e
        let mut sup: f64 = 0.0;
        for i in 0..=256 {
            let p = 2.0 + 8.0 * i as f64 / 256.0;
            let ratio = p / p.ln();
            let mut total = 0.0;
            for m in r..=d {
                total += crate::bounds::gamma(m)
                    * binomial(d as u64, m as u64)
                    * binomial(n as u64, m as u64).powf(-0.5)
                    * ratio.powi(m as i32 - d as i32);
            }
            sup = sup.max(total / sigma);
        }
        worst = worst.max(sup);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::gamma;
    use crate::hoeffding::decompose;
    use crate::model::{center, DiscreteDistribution, Kernel};

    #[test]
    fn theorem_bound_identity_kernel_is_gamma_one() {
        // d = 1, Var = 1: sigma(n) = n^{-1/2} and the single term is
        // gamma(1) n^{-1/2} / sigma(n) = gamma(1), independent of n and p
        let dist = DiscreteDistribution::rademacher();
        let ck = center(&Kernel::identity(), &dist).unwrap();
        let set = decompose(&ck, &dist).unwrap();
        let b = theorem31_bound(&set, &[2, 10, 100]).unwrap();
        assert!((b - gamma(1)).abs() < 1e-9, "{b}");
    }

    #[test]
    fn theorem_bound_monotone_in_norm_scale() {
        // the bound scales linearly with ||Phi||, realized here by scaling
        // the kernel, under which the natural-psi bound is invariant;
        // instead check boundedness across kernels and n
        let dist = DiscreteDistribution::rademacher();
        for k in Kernel::catalog() {
            let ck = match center(&k, &dist) {
                Ok(ck) => ck,
                Err(_) => continue,
            };
            let set = decompose(&ck, &dist).unwrap();
            let ns: Vec<usize> = (k.arity() + 1..=60).collect();
            let b = theorem31_bound(&set, &ns).unwrap();
            assert!(
                b.is_finite() && b > 0.0 && b < 100.0 * gamma(k.arity()),
                "{}: {b}",
                k.name()
            );
        }
    }
}
