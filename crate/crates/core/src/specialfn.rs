//! Special functions and quadrature primitives.
//!
//! The closed-form solutions of the reduced free-boundary ODEs are built from
//! the principal branch of the Lambert W function, the exponential integral
//! E₁ and integrals of the form `Φ(ω) = ∫_ω^∞ s⁻¹ e^(−μs/(2a)) ds`, which is
//! `E₁(μω/(2a))` after substitution. Everything here is pure and reentrant.

use thiserror::Error;

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Error)]
pub enum SpecialFnError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-convergence: {0}")]
    NonConvergence(String),
}

/// Tolerances and subdivision cap for [`adaptive_integrate`].
#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 4096,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), SpecialFnError> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(SpecialFnError::Domain(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(SpecialFnError::Domain(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Principal branch of the Lambert W function: the `w ≥ −1` solution of
/// `w e^w = x`, defined for `x ≥ −1/e`.
///
/// An initial guess (branch-point series near `−1/e`, Taylor series near 0,
/// log-based for large arguments) is refined by Halley iteration until the
/// residual satisfies `|w e^w − x| ≤ tol·max(1, |x|)`.
pub fn lambert_w0(x: f64, tol: f64) -> Result<f64, SpecialFnError> {
    let branch_point = -(-1.0f64).exp(); // −1/e
    if !x.is_finite() {
        return Err(SpecialFnError::Domain(format!(
            "lambert_w0 argument must be finite, got {x}"
        )));
    }
    if x < branch_point {
        // Allow a hair of rounding slack right at the branch point.
        if x > branch_point - 1e-15 {
            return Ok(-1.0);
        }
        return Err(SpecialFnError::Domain(format!(
            "lambert_w0 defined for x >= -1/e, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }

    let mut w = initial_w0_guess(x);
    let target = tol.abs().max(f64::EPSILON) * x.abs().max(1.0);
    for _ in 0..50 {
        let ew = w.exp();
        let f = w * ew - x;
        if f.abs() <= target {
            return Ok(w);
        }
        // Halley step: f' = e^w (1 + w), f'' = e^w (2 + w).
        let fp = ew * (1.0 + w);
        let denom = fp - f * (w + 2.0) / (2.0 * (w + 1.0));
        let step = if denom != 0.0 && denom.is_finite() {
            f / denom
        } else {
            f / fp.max(f64::MIN_POSITIVE)
        };
        let mut w_next = w - step;
        if w_next < -1.0 {
            w_next = (w - 1.0) / 2.0; // bisect toward the branch point
        }
        w = w_next;
    }
    let res = (w * w.exp() - x).abs();
    if res <= target {
        Ok(w)
    } else {
        Err(SpecialFnError::NonConvergence(format!(
            "lambert_w0({x}) residual {res:.3e} after 50 iterations"
        )))
    }
}

fn initial_w0_guess(x: f64) -> f64 {
    let e = std::f64::consts::E;
    if x < -0.25 {
        // Series about the branch point −1/e.
        let p = (2.0 * (e * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0
    } else if x < 0.5 {
        // Taylor series about 0.
        x * (1.0 - x * (1.0 - 1.5 * x))
    } else if x < e {
        0.5 + 0.3 * (x - 0.5)
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

/// `W(e^a)` on the principal branch, stable for any real `a`.
///
/// For large `a` the argument `e^a` overflows, so the equation is solved in
/// the form `w + ln w = a` instead. Needed by the fast-diffusion integrand,
/// whose exponent ranges over the whole real line.
pub fn lambert_w_exp(a: f64) -> f64 {
    if a < -700.0 {
        // W(e^a) ≈ e^a to double precision here.
        return a.exp();
    }
    if a <= 690.0 {
        return lambert_w0(a.exp(), 1e-14).expect("e^a is in the domain of W");
    }
    // Solve w + ln w = a by Newton from the asymptotic w ≈ a − ln a.
    let mut w = a - a.ln();
    for _ in 0..30 {
        let f = w + w.ln() - a;
        let step = f / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 1e-15 * w.abs() {
            break;
        }
    }
    w
}

/// Exponential integral `E₁(x) = ∫_x^∞ t⁻¹ e^(−t) dt` for `x > 0`.
///
/// Power series for `x ≤ 1`, backward-recurrence continued fraction for
/// `x > 1`. Underflows smoothly to 0 for large arguments.
pub fn exp_integral_e1(x: f64) -> Result<f64, SpecialFnError> {
    if !(x > 0.0) {
        return Err(SpecialFnError::Domain(format!(
            "exp_integral_e1 requires x > 0, got {x}"
        )));
    }
    if x <= 1.0 {
        let mut sum = 1.0;
        let mut term = 1.0;
        for k in 1..=40 {
            let kf = k as f64;
            term = -term * kf * x / ((kf + 1.0) * (kf + 1.0));
            sum += term;
            if term.abs() <= sum.abs() * 1e-16 {
                break;
            }
        }
        Ok(-EULER_GAMMA - x.ln() + x * sum)
    } else {
        let m = 20 + (80.0 / x) as usize;
        let mut t0 = 0.0;
        for k in (1..=m).rev() {
            let kf = k as f64;
            t0 = kf / (kf / (x + t0) + 1.0);
        }
        Ok((-x).exp() / (x + t0))
    }
}

/// `Φ(ω) = ∫_ω^∞ s⁻¹ e^(−μs/(2a)) ds = E₁(μω/(2a))` for positive arguments.
pub fn phi_integral(omega: f64, mu: f64, a: f64) -> Result<f64, SpecialFnError> {
    if !(omega > 0.0) || !(mu > 0.0) || !(a > 0.0) {
        return Err(SpecialFnError::Domain(format!(
            "phi_integral requires omega, mu, a > 0, got ({omega}, {mu}, {a})"
        )));
    }
    exp_integral_e1(mu * omega / (2.0 * a))
}

/// Derivative of [`phi_integral`] in `ω`: `−ω⁻¹ e^(−μω/(2a))`.
pub fn phi_integral_deriv(omega: f64, mu: f64, a: f64) -> f64 {
    -(-mu * omega / (2.0 * a)).exp() / omega
}

/// Adaptive integration of `f` over `[lo, hi]`, where `hi` may be `+∞`.
///
/// Semi-infinite ranges are mapped to `[0, 1)` by `t = lo + s/(1−s)` before
/// integrating; the transformed integrand is treated as 0 at `s = 1`, which
/// is the correct limit for integrands decaying faster than `t⁻²`. The finite
/// case uses adaptive Simpson bisection with the standard embedded error
/// estimate; exceeding the subdivision cap is reported as non-convergence.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, SpecialFnError> {
    cfg.validate()?;
    if !lo.is_finite() {
        return Err(SpecialFnError::Domain(
            "lower integration limit must be finite".into(),
        ));
    }
    if hi.is_finite() {
        if !(lo < hi) {
            return Err(SpecialFnError::Domain(format!(
                "integration bounds must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        adaptive_simpson(&f, lo, hi, cfg)
    } else {
        let g = |s: f64| {
            if s >= 1.0 {
                return 0.0;
            }
            let onems = 1.0 - s;
            let t = lo + s / onems;
            if !t.is_finite() {
                return 0.0;
            }
            let v = f(t) / (onems * onems);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        adaptive_simpson(&g, 0.0, 1.0, cfg)
    }
}

fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, SpecialFnError> {
    let simpson = |a: f64, fa: f64, fm: f64, fb: f64, b: f64| (b - a) / 6.0 * (fa + 4.0 * fm + fb);

    let fa = f(lo);
    let fb = f(hi);
    let m0 = 0.5 * (lo + hi);
    let fm0 = f(m0);
    if !fa.is_finite() || !fb.is_finite() || !fm0.is_finite() {
        return Err(SpecialFnError::Domain(
            "integrand is not finite on the integration range".into(),
        ));
    }
    let whole = simpson(lo, fa, fm0, fb, hi);
    let tol0 = cfg.abs_tol.max(cfg.rel_tol * whole.abs());

    // Stack entries: (a, fa, m, fm, b, fb, coarse Simpson value, local tolerance).
    let mut stack = vec![(lo, fa, m0, fm0, hi, fb, whole, tol0)];
    let mut total = 0.0;
    let mut splits = 0usize;
    while let Some((a, fa, m, fm, b, fb, s, tol)) = stack.pop() {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let sl = simpson(a, fa, flm, fm, m);
        let sr = simpson(m, fm, frm, fb, b);
        let err = (sl + sr - s) / 15.0;
        if err.abs() <= tol || (b - a) < 1e-14 * (hi - lo).abs() {
            total += sl + sr + err;
            continue;
        }
        splits += 1;
        if splits > cfg.max_subdivisions {
            return Err(SpecialFnError::NonConvergence(format!(
                "adaptive quadrature exceeded {} subdivisions",
                cfg.max_subdivisions
            )));
        }
        let half_tol = 0.5 * tol;
        stack.push((a, fa, lm, flm, m, fm, sl, half_tol));
        stack.push((m, fm, rm, frm, b, fb, sr, half_tol));
    }
    Ok(total)
}
