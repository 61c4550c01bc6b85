//! Tail functions, the moment-to-tail envelope, and its converse.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::gls::conjugate::nu_conjugate;
use crate::gls::psi::{gls_norm_ln, PsiFunction};

type LnTailFn = dyn Fn(f64) -> f64 + Send + Sync;

/// T(x) = max of the two one-sided exceedance probabilities at level x.
///
/// Carried as u -> ln T(e^u) so envelope tails can be integrated far past
/// where x itself overflows f64.
#[derive(Clone)]
pub struct TailFunction {
    // argument is u = ln x
    ln_at_ln: Arc<LnTailFn>,
}

impl std::fmt::Debug for TailFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TailFunction").finish()
    }
}

impl TailFunction {
    /// From a plain probability function of x.
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            ln_at_ln: Arc::new(move |u| f(u.exp()).ln()),
        }
    }

    /// From ln T as a function of u = ln x.
    pub fn from_ln_at_ln<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            ln_at_ln: Arc::new(f),
        }
    }

    /// ln T(e^u), clamped to the probability range.
    pub fn ln_eval_at_ln(&self, u: f64) -> f64 {
        (self.ln_at_ln)(u).min(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        assert!(x > 0.0, "tails are defined for x > 0");
        self.ln_eval_at_ln(x.ln()).exp()
    }

    /// (x, T(x)) pairs with monotonicity enforced by a running minimum,
    /// absorbing sub-tolerance numeric wiggle from the conjugate grid.
    pub fn on_grid(&self, xs: &[f64]) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(xs.len());
        let mut floor = 1.0f64;
        for &x in xs {
            floor = floor.min(self.eval(x));
            out.push((x, floor));
        }
        out
    }
}

/// The exponential tail envelope exp(-nu*(ln(x / norm))) for x beyond
/// e * norm, and the vacuous bound 1 below it.
///
/// An unbounded conjugate at some slope means psi is bounded there and the
/// variable cannot reach that level at all, so the envelope is zero, not
/// an error. Conjugate values are memoized per slope: verification sweeps
/// hit the same grid repeatedly.
pub fn tail_envelope(psi: &PsiFunction, norm: f64) -> Result<TailFunction> {
    if norm <= 0.0 || norm.is_nan() {
        return Err(Error::Param(format!("norm must be positive, got {norm}")));
    }
    let psi = psi.clone();
    let ln_norm = norm.ln();
    let cache: Mutex<HashMap<u64, f64>> = Mutex::new(HashMap::new());
    Ok(TailFunction::from_ln_at_ln(move |u| {
        let t = u - ln_norm;
        if t <= 1.0 {
            return 0.0; // T <= 1, nothing claimed below e * norm
        }
        if let Some(&v) = cache.lock().unwrap().get(&t.to_bits()) {
            return v;
        }
        let v = match nu_conjugate(&psi, t) {
            Ok(star) => -star,
            Err(Error::Unbounded { .. }) => f64::NEG_INFINITY,
            Err(_) => f64::NAN,
        };
        cache.lock().unwrap().insert(t.to_bits(), v);
        v
    }))
}

/// Moment order cap for the tail-to-norm direction; the reconstructed
/// ratio decays beyond small p in every convergent case, and capping keeps
/// the quadrature honest where x^{p-1} peaks astronomically far out.
const FROM_TAIL_P_MAX: f64 = 256.0;
/// Panel width in u = ln x.
const PANEL_H: f64 = 1.0 / 256.0;
/// Integration start: x = e^{-40} contributes nothing at any scale the
/// norms here live on.
const U_START: f64 = -40.0;
/// A tail whose integrand is still climbing at u = 2000 decays too slowly
/// for the requested moment order.
const U_HARD_CAP: f64 = 2000.0;

/// ln of 2p * integral_0^inf x^{p-1} T(x) dx, by trapezoid panels in
/// u = ln x, accumulated in log space.
fn ln_tail_moment_power(tail: &TailFunction, p: f64) -> Result<f64> {
    let ln_f = |u: f64| p * u + tail.ln_eval_at_ln(u);
    // streaming log-sum-exp over panels
    let mut max_ln = f64::NEG_INFINITY;
    let mut scaled_sum = 0.0f64;
    let mut u = U_START;
    let mut prev = ln_f(u);
    let mut peak = prev;
    loop {
        let next_u = u + PANEL_H;
        let next = ln_f(next_u);
        if next.is_nan() || prev.is_nan() {
            return Err(Error::QuadratureFailure(format!(
                "tail produced NaN near ln x = {u}"
            )));
        }
        // ln of the trapezoid panel h * (f(u) + f(u'))/2
        let hi = prev.max(next);
        if hi > f64::NEG_INFINITY {
            let panel = hi + (((prev - hi).exp() + (next - hi).exp()) / 2.0).ln() + PANEL_H.ln();
            if panel > max_ln {
                scaled_sum = scaled_sum * (max_ln - panel).exp() + 1.0;
                max_ln = panel;
            } else {
                scaled_sum += (panel - max_ln).exp();
            }
        }
        peak = peak.max(next);
        u = next_u;
        prev = next;
        // stop when safely past the peak and negligible
        if next < peak - 45.0 && next < max_ln {
            break;
        }
        if u > U_HARD_CAP {
            return Err(Error::QuadratureFailure(format!(
                "integrand still significant at ln x = {u} for p = {p}; \
                 the tail decays too slowly"
            )));
        }
    }
    if max_ln == f64::NEG_INFINITY {
        return Err(Error::QuadratureFailure(
            "tail integral vanished everywhere".to_string(),
        ));
    }
    Ok((2.0 * p).ln() + max_ln + scaled_sum.ln())
}

/// Reconstructs moments from a tail via |zeta|_p^p <= 2p int x^{p-1} T dx
/// and measures them against psi. The result realizes one admissible
/// constant in the converse direction; it is an upper bound on the true
/// norm, not claimed minimal.
pub fn norm_from_tail(tail: &TailFunction, psi: &PsiFunction) -> Result<f64> {
    let capped = PsiFunction::from_ln(
        psi.b().min(FROM_TAIL_P_MAX),
        psi.family(),
        {
            let psi = psi.clone();
            move |p| psi.ln_eval(p)
        },
    );
    let failure: std::cell::RefCell<Option<Error>> = std::cell::RefCell::new(None);
    let norm = gls_norm_ln(
        |p| match ln_tail_moment_power(tail, p) {
            Ok(ln_pow) => ln_pow / p,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        &capped,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    norm
}

/// The exponential Young function M(u) = exp(nu*(ln |u|)) for |u| > e,
/// patched by exp(C u^2) - 1 inside with C chosen for continuity at e.
pub fn orlicz_young(psi: &PsiFunction, u: f64) -> Result<f64> {
    let a = u.abs();
    let e = std::f64::consts::E;
    let at_e = nu_conjugate(psi, 1.0)?;
    if a > e {
        Ok(nu_conjugate(psi, a.ln())?.exp())
    } else {
        let c = (1.0 + at_e.exp()).ln() / (e * e);
        Ok((c * a * a).exp() - 1.0)
    }
}

/// (u, M(u)) curve for reporting.
pub fn orlicz_young_curve(psi: &PsiFunction, us: &[f64]) -> Result<Vec<(f64, f64)>> {
    us.iter().map(|&u| Ok((u, orlicz_young(psi, u)?))).collect()
}
