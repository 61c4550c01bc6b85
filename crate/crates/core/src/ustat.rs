//! Exact U-statistic evaluation and brute-force distribution oracles.
//!
//! `evaluate` walks every strictly increasing index tuple; the brute-force
//! routines enumerate the full outcome space of tiny instances so that
//! every downstream bound can be checked against an exact law.

use crate::error::{Error, Result};
use crate::model::{CenteredKernel, DiscreteDistribution, Kernel, ENUMERATION_CAP};
use crate::numeric::{binomial_u128, for_each_combination, for_each_product, NeumaierSum};

/// The strictly increasing d-tuples from {1..n}.
#[derive(Debug, Clone, Copy)]
pub struct IndexSet {
    pub d: usize,
    pub n: usize,
}

impl IndexSet {
    pub fn new(d: usize, n: usize) -> Self {
        Self { d, n }
    }

    pub fn cardinality(&self) -> u128 {
        binomial_u128(self.n as u64, self.d as u64)
    }

    /// Visits each tuple (0-based indices) in lexicographic order and
    /// returns how many were visited.
    pub fn for_each<F: FnMut(&[usize])>(&self, f: F) -> u128 {
        for_each_combination(self.n, self.d, f)
    }

    /// Allocating iterator, for callers that want owned tuples.
    pub fn tuples(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.for_each(|t| out.push(t.to_vec()));
        out
    }
}

/// A U-statistic value at sample size n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UStatValue {
    pub n: usize,
    pub value: f64,
    /// value - E U(n), where E U(n) = E Phi independently of n.
    pub centered_value: f64,
}

fn check_sample(arity: usize, sample: &[f64], n: usize) -> Result<()> {
    if n < arity {
        return Err(Error::ArityMismatch {
            expected: arity,
            got: n,
        });
    }
    if sample.len() < n {
        return Err(Error::SampleTooShort {
            needed: n,
            got: sample.len(),
        });
    }
    Ok(())
}

/// Average of the kernel over all C(n, d) increasing tuples of the first
/// n sample points. n = d is allowed and gives the single-term statistic.
pub fn evaluate_raw(kernel: &Kernel, sample: &[f64], n: usize) -> Result<f64> {
    let d = kernel.arity();
    check_sample(d, sample, n)?;
    let idx = IndexSet::new(d, n);
    let mut args = vec![0.0; d];
    let mut acc = NeumaierSum::new();
    let visited = idx.for_each(|tuple| {
        for (a, &i) in args.iter_mut().zip(tuple) {
            *a = sample[i];
        }
        acc.add(kernel.eval(&args));
    });
    debug_assert_eq!(visited, idx.cardinality());
    Ok(acc.total() / visited as f64)
}

/// As `evaluate_raw`, centering with the exact E Phi of the kernel.
pub fn evaluate(kernel: &CenteredKernel, sample: &[f64], n: usize) -> Result<UStatValue> {
    let value = evaluate_raw(kernel.base(), sample, n)?;
    Ok(UStatValue {
        n,
        value,
        centered_value: value - kernel.mean(),
    })
}

/// Streaming evaluator: feed points one at a time, read U(n) at any point.
///
/// Each new point closes C(len, d-1) new tuples, so the total work to
/// reach n points is exactly the C(n, d) evaluations of a direct pass,
/// paid incrementally.
#[derive(Debug, Clone)]
pub struct IncrementalUStat {
    kernel: Kernel,
    points: Vec<f64>,
    sum: NeumaierSum,
}

impl IncrementalUStat {
    pub fn new(kernel: Kernel) -> Self {
        Self {
            kernel,
            points: Vec::new(),
            sum: NeumaierSum::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, x: f64) {
        let d = self.kernel.arity();
        if self.points.len() >= d - 1 {
            let mut args = vec![0.0; d];
            args[d - 1] = x;
            for_each_combination(self.points.len(), d - 1, |tuple| {
                for (a, &i) in args.iter_mut().zip(tuple) {
                    *a = self.points[i];
                }
                self.sum.add(self.kernel.eval(&args));
            });
        }
        self.points.push(x);
    }

    /// U(n) over everything fed so far.
    pub fn value(&self) -> Result<f64> {
        let d = self.kernel.arity();
        let n = self.points.len();
        if n < d {
            return Err(Error::NotReady { have: n, need: d });
        }
        let count = binomial_u128(n as u64, d as u64) as f64;
        Ok(self.sum.total() / count)
    }
}

fn outcome_cap(support: usize, n: usize) -> Result<()> {
    match (support as u128).checked_pow(n as u32) {
        Some(t) if t <= ENUMERATION_CAP => Ok(()),
        other => Err(Error::CapExceeded {
            needed: other.unwrap_or(u128::MAX),
            cap: ENUMERATION_CAP,
        }),
    }
}

/// Exact law of U(n) by enumerating all support^n outcomes.
///
/// Returns (value, probability) pairs sorted by value, with values closer
/// than a float-noise tolerance merged.
pub fn brute_force_distribution(
    kernel: &Kernel,
    dist: &DiscreteDistribution,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    outcome_cap(dist.support_size(), n)?;
    check_sample(kernel.arity(), &vec![0.0; n], n)?;
    let pts = dist.support();
    let mut sample = vec![0.0; n];
    let mut raw: Vec<(f64, f64)> = Vec::new();
    for_each_product(dist.support_size(), n, |digits| {
        let mut w = 1.0;
        for (s, &d) in sample.iter_mut().zip(digits) {
            *s = pts[d];
            w *= dist.prob(d);
        }
        let u = evaluate_raw(kernel, &sample, n).expect("sample constructed to length n");
        raw.push((u, w));
    });
    raw.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (u, w) in raw {
        match merged.last_mut() {
            Some(last) if (u - last.0).abs() <= 1e-12 * u.abs().max(1.0) => last.1 += w,
            _ => merged.push((u, w)),
        }
    }
    Ok(merged)
}

/// Exact E |U(n) - E U(n)|^p from the enumerated distribution.
pub fn brute_force_moment(
    kernel: &Kernel,
    dist: &DiscreteDistribution,
    n: usize,
    p: f64,
) -> Result<f64> {
    if p < 1.0 {
        return Err(Error::Domain(format!("moment order must be >= 1, got {p}")));
    }
    let law = brute_force_distribution(kernel, dist, n)?;
    let mut mean = NeumaierSum::new();
    for &(u, w) in &law {
        mean.add(u * w);
    }
    let mean = mean.total();
    let mut m = NeumaierSum::new();
    for &(u, w) in &law {
        m.add((u - mean).abs().powf(p) * w);
    }
    Ok(m.total())
}
