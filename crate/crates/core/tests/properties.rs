//! Property tests for the structural invariants: symmetry of the
//! statistic in the sample, norm homogeneity, conjugate convexity, mass
//! conservation of the brute-force oracle, and rational-exponent algebra.

use proptest::prelude::*;

use ustat_core::gls::{gls_norm, young_fenchel, PsiFunction, Ratio};
use ustat_core::model::{sample_iid, DiscreteDistribution, Kernel};
use ustat_core::montecarlo::empirical_tail;
use ustat_core::ustat::{brute_force_distribution, evaluate_raw};

fn catalog_kernel() -> impl Strategy<Value = Kernel> {
    (0usize..6).prop_map(|i| Kernel::catalog().swap_remove(i))
}

fn binary_dist() -> impl Strategy<Value = DiscreteDistribution> {
    (0.05f64..0.95).prop_map(|p| {
        DiscreteDistribution::new(vec![(-1.0, p), (1.0, 1.0 - p)]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::with_cases(64)
    })]

    // U-statistics are symmetric functions of the sample
    #[test]
    fn evaluate_invariant_under_sample_permutation(
        kernel in catalog_kernel(),
        seed in any::<u64>(),
        n in 4usize..9,
        swap in (0usize..8, 0usize..8),
    ) {
        prop_assume!(kernel.arity() <= n);
        let dist = DiscreteDistribution::rademacher();
        let sample = sample_iid(&dist, n, seed);
        let mut permuted = sample.clone();
        permuted.swap(swap.0 % n, swap.1 % n);
        let a = evaluate_raw(&kernel, &sample, n).unwrap();
        let b = evaluate_raw(&kernel, &permuted, n).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    // total probability mass of the enumerated law is 1
    #[test]
    fn brute_force_mass_is_one(
        kernel in catalog_kernel(),
        dist in binary_dist(),
        n in 4usize..8,
    ) {
        prop_assume!(kernel.arity() <= n);
        let law = brute_force_distribution(&kernel, &dist, n).unwrap();
        let mass: f64 = law.iter().map(|&(_, w)| w).sum();
        prop_assert!((mass - 1.0).abs() < 1e-10);
        // values sorted strictly increasing after merging
        prop_assert!(law.windows(2).all(|w| w[0].0 < w[1].0));
    }

    // ||c zeta|| = c ||zeta||
    #[test]
    fn gls_norm_homogeneous(c in 0.1f64..10.0) {
        let psi = PsiFunction::power_log(1.5, 1.0, 0.0).unwrap();
        let n = gls_norm(|p| c * psi.eval(p), &psi).unwrap();
        prop_assert!((n - c).abs() < 1e-9 * c);
    }

    // conjugates are convex: midpoint inequality in the slope
    #[test]
    fn conjugate_midpoint_convexity(
        a in 0.2f64..3.0,
        b in -2.0f64..2.0,
        y in 3.0f64..30.0,
        h in 0.1f64..2.0,
    ) {
        let f = move |x: f64| a * x * x + b * x;
        let dom = (2.0, f64::INFINITY);
        let left = young_fenchel(f, dom, y - h).unwrap();
        let mid = young_fenchel(f, dom, y).unwrap();
        let right = young_fenchel(f, dom, y + h).unwrap();
        prop_assert!(mid <= (left + right) / 2.0 + 1e-6 * mid.abs().max(1.0));
    }

    // empirical tails are probabilities, nonincreasing in the level
    #[test]
    fn empirical_tail_monotone(seed in any::<u64>()) {
        let dist = DiscreteDistribution::rademacher();
        let draws = sample_iid(&dist, 500, seed);
        let grid: Vec<f64> = (0..20).map(|i| 0.1 * i as f64).collect();
        let tail = empirical_tail(&draws, &grid);
        for w in tail.windows(2) {
            prop_assert!(w[1].value <= w[0].value);
        }
        for t in &tail {
            prop_assert!((0.0..=1.0).contains(&t.value));
        }
    }

    // sampling is a pure function of (seed, n) and prefix-stable
    #[test]
    fn sampling_prefix_stable(seed in any::<u64>(), n in 2usize..200) {
        let dist = DiscreteDistribution::rademacher();
        let long = sample_iid(&dist, n, seed);
        let short = sample_iid(&dist, n / 2, seed);
        prop_assert_eq!(&long[..n / 2], &short[..]);
    }

    // rational arithmetic: field laws on small fractions
    #[test]
    fn ratio_field_laws(
        a in (-20i64..20, 1i64..9),
        b in (-20i64..20, 1i64..9),
        c in (-20i64..20, 1i64..9),
    ) {
        let (a, b, c) = (
            Ratio::new(a.0, a.1),
            Ratio::new(b.0, b.1),
            Ratio::new(c.0, c.1),
        );
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!(a - a, Ratio::ZERO);
        if b != Ratio::ZERO {
            prop_assert_eq!(a / b * b, a);
        }
    }
}
