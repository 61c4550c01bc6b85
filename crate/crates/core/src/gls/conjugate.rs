//! One-dimensional convex conjugation on a restricted domain:
//! f*(y) = sup_{x in [lo, hi)} (x y - f(x)).

use crate::error::{Error, Result};
use crate::gls::psi::PsiFunction;

/// Hard ceiling for bracketing scans on unbounded domains.
const X_SCAN_CAP: f64 = 1e8;

/// Conjugate of an arbitrary function on [lo, hi) at slope `y`.
///
/// A doubling scan brackets the supremum when the domain is unbounded;
/// a dense grid with local refinement then locates it. No convexity is
/// assumed, so the grid is the safe default; [`nu_conjugate`] exploits
/// convexity where it is guaranteed.
pub fn young_fenchel<F: Fn(f64) -> f64>(f: F, domain: (f64, f64), y: f64) -> Result<f64> {
    let (lo, b) = domain;
    if lo <= 0.0 || lo.is_nan() || b <= lo {
        return Err(Error::Param(format!("bad conjugate domain [{lo}, {b})")));
    }
    let objective = |x: f64| x * y - f(x);
    let hi = if b.is_finite() {
        b - (b - lo) * 1e-9
    } else {
        // bracket: double until the objective turns over
        let mut x = lo;
        let mut best = (objective(lo), lo);
        loop {
            let next = x * 2.0;
            if next > X_SCAN_CAP {
                let v = objective(X_SCAN_CAP);
                if v > best.0 {
                    return Err(Error::Unbounded { y, at: X_SCAN_CAP });
                }
                break;
            }
            let v = objective(next);
            if v > best.0 {
                best = (v, next);
            }
            // two doublings past the incumbent are enough of a margin
            if next > 4.0 * best.1 && v < best.0 {
                break;
            }
            x = next;
        }
        (best.1 * 4.0).min(X_SCAN_CAP)
    };
    // dense log grid
    let n = 512;
    let step = (hi / lo).ln() / n as f64;
    let mut best = (objective(lo), lo);
    for i in 1..=n {
        let x = lo * (step * i as f64).exp();
        let v = objective(x);
        if v > best.0 {
            best = (v, x);
        }
    }
    // local refinement
    let mut wl = (best.1 * (-step).exp()).max(lo);
    let mut wr = if b.is_finite() { (best.1 * step.exp()).min(hi) } else { best.1 * step.exp() };
    for _ in 0..3 {
        for i in 0..=64 {
            let x = wl + (wr - wl) * i as f64 / 64.0;
            let v = objective(x);
            if v > best.0 {
                best = (v, x);
            }
        }
        let w = (wr - wl) / 64.0;
        wl = (best.1 - w).max(lo);
        wr = best.1 + w;
        if b.is_finite() {
            wr = wr.min(hi);
        }
    }
    Ok(best.0)
}

/// nu*(t) = sup_{p in [2, b)} (p t - nu(p)) for nu(p) = p ln psi(p).
///
/// nu is convex for every moment-growth function (ln E|zeta|^p is convex
/// in p), so the objective is concave and a golden-section polish after a
/// doubling bracket is reliable and much cheaper than the dense grid.
pub fn nu_conjugate(psi: &PsiFunction, t: f64) -> Result<f64> {
    let lo = 2.0f64;
    let b = psi.b();
    let obj = |p: f64| p * t - p * psi.ln_eval(p);
    // bracket the maximizer
    let mut hi;
    if b.is_finite() {
        hi = b - (b - lo) * 1e-9;
    } else {
        let mut x = lo;
        let mut best = (obj(lo), lo);
        loop {
            let next = x * 1.5;
            if next > X_SCAN_CAP {
                if obj(X_SCAN_CAP) > best.0 {
                    return Err(Error::Unbounded { y: t, at: X_SCAN_CAP });
                }
                break;
            }
            let v = obj(next);
            if v > best.0 {
                best = (v, next);
            } else if next > 2.25 * best.1 {
                break;
            }
            x = next;
        }
        hi = (best.1 * 2.25).min(X_SCAN_CAP);
    }
    // golden-section on the concave objective
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut a = lo;
    let mut c = hi - inv_phi * (hi - a);
    let mut d = a + inv_phi * (hi - a);
    let (mut fc, mut fd) = (obj(c), obj(d));
    for _ in 0..120 {
        if (hi - a).abs() < 1e-12 * hi.abs().max(1.0) {
            break;
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - a);
            fc = obj(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (hi - a);
            fd = obj(d);
        }
    }
    // the boundary p = 2 may dominate when the slope is small
    Ok(obj(lo).max(fc.max(fd)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gls::psi::PsiFamily;

    #[test]
    fn quadratic_conjugate_interior() {
        // f(x) = x^2 on [2, inf), y = 6: maximizer x = 3, value 9
        let v = young_fenchel(|x| x * x, (2.0, f64::INFINITY), 6.0).unwrap();
        assert!((v - 9.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn quadratic_conjugate_boundary() {
        // y = 2: unconstrained maximizer 1 < 2, so the edge x = 2 wins: 4 - 4 = 0
        let v = young_fenchel(|x| x * x, (2.0, f64::INFINITY), 2.0).unwrap();
        assert!(v.abs() < 1e-9, "{v}");
    }

    #[test]
    fn conjugate_is_convex_in_slope() {
        // midpoint inequality on collinear slope triples
        let f = |x: f64| x * x;
        for y0 in [2.5, 4.0, 7.0, 12.0] {
            let h = 0.75;
            let a = young_fenchel(f, (2.0, f64::INFINITY), y0 - h).unwrap();
            let b = young_fenchel(f, (2.0, f64::INFINITY), y0).unwrap();
            let c = young_fenchel(f, (2.0, f64::INFINITY), y0 + h).unwrap();
            assert!(b <= (a + c) / 2.0 + 1e-7, "at {y0}: {b} vs {}", (a + c) / 2.0);
        }
    }

    #[test]
    fn unbounded_conjugate_detected() {
        // linear f with slope below y grows without bound
        let r = young_fenchel(|x| 0.5 * x, (2.0, f64::INFINITY), 1.0);
        assert!(matches!(r, Err(Error::Unbounded { .. })));
    }

    #[test]
    fn finite_domain_respected() {
        // f = 0 on [2, 5): sup x*1 = approached at 5
        let v = young_fenchel(|_| 0.0, (2.0, 5.0), 1.0).unwrap();
        assert!((v - 5.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn nu_conjugate_matches_quadratic_closed_form() {
        // psi = e^p: nu = p^2, nu*(t) = t^2/4 for t >= 4, else 2t - 4
        let psi = PsiFunction::exp_beta(1.0, 1.0).unwrap();
        for t in [5.0f64, 8.0, 20.0] {
            let v = nu_conjugate(&psi, t).unwrap();
            assert!((v - t * t / 4.0).abs() < 1e-8, "t={t}: {v}");
        }
        for t in [1.0f64, 3.0] {
            let v = nu_conjugate(&psi, t).unwrap();
            assert!((v - (2.0 * t - 4.0)).abs() < 1e-8, "t={t}: {v}");
        }
    }

    #[test]
    fn nu_conjugate_agrees_with_generic_path() {
        let psi = PsiFunction::power_log(1.3, 2.0, 1.0).unwrap();
        for t in [2.0f64, 4.0, 6.0, 9.0] {
            let fast = nu_conjugate(&psi, t).unwrap();
            let slow = young_fenchel(
                |p| p * psi.ln_eval(p),
                (2.0, f64::INFINITY),
                t,
            )
            .unwrap();
            assert!(
                (fast - slow).abs() <= 1e-6 * slow.abs().max(1.0),
                "t={t}: {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn nu_conjugate_unbounded_for_bounded_psi() {
        // constant psi: nu linear, slope above ln c diverges
        let psi = PsiFunction::constant(2.0).unwrap();
        let r = nu_conjugate(&psi, 2.0f64.ln() + 1.0);
        assert!(matches!(r, Err(Error::Unbounded { .. })));
        // slopes below ln c are fine
        assert!(nu_conjugate(&psi, 0.5).is_ok());
    }

    #[test]
    fn nu_conjugate_nondecreasing_in_t() {
        let psi = PsiFunction::from_ln(f64::INFINITY, PsiFamily::Natural, |p| {
            crate::model::centered_poisson_ln_abs_moment(p) / p
        });
        let mut prev = f64::NEG_INFINITY;
        for i in 0..40 {
            let t = 1.0 + 0.25 * i as f64;
            let v = nu_conjugate(&psi, t).unwrap();
            assert!(v >= prev - 1e-9, "t={t}");
            prev = v;
        }
    }
}
