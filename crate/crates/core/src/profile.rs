//! Scalar function profiles: closed-form families and tabulated curves.
//!
//! Conductivities, heat capacities and the transformed diffusivities are all
//! represented as a [`FunctionProfile`]: either one of the closed families
//! (constant, shifted power, exponential) or a [`TabulatedCurve`] evaluated
//! by shape-preserving monotone cubic Hermite interpolation. Out-of-range
//! evaluation of tabulated data is an error, not extrapolation.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("invalid profile: {0}")]
    Invalid(String),
    #[error("argument {arg} outside tabulated range [{lo}, {hi}]")]
    OutOfRange { arg: f64, lo: f64, hi: f64 },
    #[error("profile must be positive: {0}")]
    NonPositive(String),
}

/// A scalar function of one variable, by family.
#[derive(Debug, Clone)]
pub enum FunctionProfile {
    /// `f(x) = c`
    Constant(f64),
    /// `f(x) = coeff · (x + shift)^exponent`
    Power {
        coeff: f64,
        exponent: f64,
        shift: f64,
    },
    /// `f(x) = coeff · e^(rate·x)`
    Exponential { coeff: f64, rate: f64 },
    /// Interpolated data.
    Tabulated(TabulatedCurve),
}

impl FunctionProfile {
    pub fn validate(&self) -> Result<(), ProfileError> {
        match self {
            FunctionProfile::Constant(c) => {
                if !c.is_finite() {
                    return Err(ProfileError::Invalid("constant must be finite".into()));
                }
            }
            FunctionProfile::Power {
                coeff,
                exponent,
                shift,
            } => {
                if !coeff.is_finite() || !exponent.is_finite() || !shift.is_finite() {
                    return Err(ProfileError::Invalid(
                        "power-family coefficients must be finite".into(),
                    ));
                }
                if *coeff == 0.0 {
                    return Err(ProfileError::Invalid(
                        "power-family coefficient must be nonzero".into(),
                    ));
                }
            }
            FunctionProfile::Exponential { coeff, rate } => {
                if !coeff.is_finite() || !rate.is_finite() {
                    return Err(ProfileError::Invalid(
                        "exponential-family coefficients must be finite".into(),
                    ));
                }
                if *coeff == 0.0 {
                    return Err(ProfileError::Invalid(
                        "exponential-family coefficient must be nonzero".into(),
                    ));
                }
            }
            FunctionProfile::Tabulated(curve) => curve.validate()?,
        }
        Ok(())
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            FunctionProfile::Constant(_) => "constant",
            FunctionProfile::Power { .. } => "power",
            FunctionProfile::Exponential { .. } => "exponential",
            FunctionProfile::Tabulated(_) => "tabulated",
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64, ProfileError> {
        match self {
            FunctionProfile::Constant(c) => Ok(*c),
            FunctionProfile::Power {
                coeff,
                exponent,
                shift,
            } => {
                let base = x + shift;
                if base <= 0.0 && exponent.fract() != 0.0 {
                    return Err(ProfileError::OutOfRange {
                        arg: x,
                        lo: -shift,
                        hi: f64::INFINITY,
                    });
                }
                Ok(coeff * base.powf(*exponent))
            }
            FunctionProfile::Exponential { coeff, rate } => Ok(coeff * (rate * x).exp()),
            FunctionProfile::Tabulated(curve) => curve.eval(x),
        }
    }

    /// Evaluation that saturates a tabulated curve at its end values instead
    /// of erroring. Closed families evaluate as usual. Used by iterative
    /// solvers whose trial iterates may briefly leave the tabulated range;
    /// converged solutions are re-checked against the strict range.
    pub fn eval_clamped(&self, x: f64) -> f64 {
        match self {
            FunctionProfile::Tabulated(curve) => curve.eval_clamped(x),
            FunctionProfile::Power {
                coeff,
                exponent,
                shift,
            } => {
                let base = (x + shift).max(1e-12);
                coeff * base.powf(*exponent)
            }
            _ => self.eval(x).unwrap_or(f64::NAN),
        }
    }

    /// Check `f > 0` on `[lo, hi]`, sampling interior points and knots.
    /// Endpoints themselves are excluded so that profiles vanishing only at
    /// an integration limit (e.g. a capacity `∝ T` at `T = 0`) pass.
    pub fn validate_positive(&self, lo: f64, hi: f64, label: &str) -> Result<(), ProfileError> {
        const SAMPLES: usize = 257;
        for i in 1..SAMPLES {
            let x = lo + (hi - lo) * i as f64 / SAMPLES as f64;
            let v = self.eval(x)?;
            if !(v > 0.0) {
                return Err(ProfileError::NonPositive(format!(
                    "{label} evaluates to {v} at {x}"
                )));
            }
        }
        if let FunctionProfile::Tabulated(curve) = self {
            for (x, y) in curve.xs.iter().zip(curve.ys.iter()) {
                if *x > lo && *x < hi && !(*y > 0.0) {
                    return Err(ProfileError::NonPositive(format!(
                        "{label} has knot value {y} at {x}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Strictly increasing abscissae with values and slopes, evaluated as a
/// piecewise cubic Hermite. Slopes are limited Fritsch–Carlson style so the
/// interpolant preserves the monotonicity of the data on every interval.
#[derive(Debug, Clone)]
pub struct TabulatedCurve {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl TabulatedCurve {
    /// Build from knots alone; slopes are estimated by local cubic fits
    /// (third-order accurate on smooth data) and then monotonicity-limited.
    pub fn new(knots: &[(f64, f64)]) -> Result<Self, ProfileError> {
        let xs: Vec<f64> = knots.iter().map(|k| k.0).collect();
        let ys: Vec<f64> = knots.iter().map(|k| k.1).collect();
        let slopes = estimate_slopes(&xs, &ys)?;
        Self::with_slopes(xs, ys, slopes)
    }

    /// Build from knots with known derivative values (e.g. from an ODE
    /// right-hand side or a closed form). Slopes are still limited.
    pub fn with_slopes(xs: Vec<f64>, ys: Vec<f64>, slopes: Vec<f64>) -> Result<Self, ProfileError> {
        if xs.len() < 2 || xs.len() != ys.len() || xs.len() != slopes.len() {
            return Err(ProfileError::Invalid(
                "tabulated curve needs at least 2 knots with matching value/slope lists".into(),
            ));
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(ProfileError::Invalid(format!(
                    "knot abscissae must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if xs.iter().any(|v| !v.is_finite())
            || ys.iter().any(|v| !v.is_finite())
            || slopes.iter().any(|v| !v.is_finite())
        {
            return Err(ProfileError::Invalid(
                "tabulated curve data must be finite".into(),
            ));
        }
        let mut curve = Self { xs, ys, slopes };
        curve.limit_slopes();
        Ok(curve)
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        if self.xs.len() < 2 {
            return Err(ProfileError::Invalid("need at least 2 knots".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn first_value(&self) -> f64 {
        self.ys[0]
    }

    pub fn last_value(&self) -> f64 {
        *self.ys.last().unwrap()
    }

    /// Fritsch–Carlson limiting: zero slopes across flat intervals, clamp
    /// the slope-to-secant ratios into [0, 3] elsewhere.
    fn limit_slopes(&mut self) {
        let n = self.xs.len();
        for i in 0..n - 1 {
            let h = self.xs[i + 1] - self.xs[i];
            let delta = (self.ys[i + 1] - self.ys[i]) / h;
            if delta == 0.0 {
                self.slopes[i] = 0.0;
                self.slopes[i + 1] = 0.0;
                continue;
            }
            for j in [i, i + 1] {
                let r = self.slopes[j] / delta;
                if r < 0.0 {
                    self.slopes[j] = 0.0;
                } else if r > 3.0 {
                    self.slopes[j] = 3.0 * delta;
                }
            }
        }
    }

    fn interval_of(&self, x: f64) -> usize {
        match self
            .xs
            .binary_search_by(|probe| probe.partial_cmp(&x).unwrap())
        {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    fn hermite(&self, i: usize, x: f64) -> (f64, f64) {
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let value = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        let deriv = d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1;
        (value, deriv)
    }

    pub fn eval(&self, x: f64) -> Result<f64, ProfileError> {
        let (lo, hi) = self.range();
        // A relative hair of slack absorbs roundoff at the range ends.
        let pad = 1e-12 * (hi - lo).abs().max(1.0);
        if x < lo - pad || x > hi + pad {
            return Err(ProfileError::OutOfRange { arg: x, lo, hi });
        }
        let xc = x.clamp(lo, hi);
        Ok(self.hermite(self.interval_of(xc), xc).0)
    }

    pub fn eval_deriv(&self, x: f64) -> Result<f64, ProfileError> {
        let (lo, hi) = self.range();
        let pad = 1e-12 * (hi - lo).abs().max(1.0);
        if x < lo - pad || x > hi + pad {
            return Err(ProfileError::OutOfRange { arg: x, lo, hi });
        }
        let xc = x.clamp(lo, hi);
        Ok(self.hermite(self.interval_of(xc), xc).1)
    }

    /// Evaluate with constant extension beyond the range ends.
    pub fn eval_clamped(&self, x: f64) -> f64 {
        let (lo, hi) = self.range();
        let xc = x.clamp(lo, hi);
        self.hermite(self.interval_of(xc), xc).0
    }

    /// Derivative with clamping to the range ends (constant extension has
    /// zero slope beyond them, but audits of perturbed geometries want the
    /// end-knot slope, which this returns).
    pub fn eval_deriv_clamped(&self, x: f64) -> f64 {
        let (lo, hi) = self.range();
        let xc = x.clamp(lo, hi);
        self.hermite(self.interval_of(xc), xc).1
    }

    /// Invert a monotone curve: return `x` with `f(x) = y`, by bisection
    /// refined with Newton steps on the interpolant.
    pub fn invert(&self, y: f64) -> Result<f64, ProfileError> {
        let increasing = self.last_value() > self.first_value();
        let (ylo, yhi) = if increasing {
            (self.first_value(), self.last_value())
        } else {
            (self.last_value(), self.first_value())
        };
        let pad = 1e-12 * (yhi - ylo).abs().max(1.0);
        if y < ylo - pad || y > yhi + pad {
            return Err(ProfileError::OutOfRange {
                arg: y,
                lo: ylo,
                hi: yhi,
            });
        }
        let yc = y.clamp(ylo, yhi);
        let (mut lo, mut hi) = self.range();
        let span = hi - lo;
        let mut x = 0.5 * (lo + hi);
        // Converge on the abscissa interval, not the value residual: near a
        // limiter-flattened knot the inverse has an unbounded derivative and
        // a small value residual does not bound the abscissa error.
        for _ in 0..200 {
            if hi - lo <= 1e-14 * span {
                break;
            }
            let (v, d) = self.hermite(self.interval_of(x), x);
            let err = v - yc;
            let above = if increasing { err > 0.0 } else { err < 0.0 };
            if err == 0.0 {
                break;
            }
            if above {
                hi = x;
            } else {
                lo = x;
            }
            let newton = if d != 0.0 { x - err / d } else { f64::NAN };
            x = if newton.is_finite() && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        Ok(x)
    }
}

/// Derivative at knot `i` of the Lagrange polynomial through the `window`
/// knots nearest to `i` (handles nonuniform spacing).
pub(crate) fn lagrange_derivative_at(xs: &[f64], ys: &[f64], window: usize, i: usize) -> f64 {
    let n = xs.len();
    let window = window.min(n);
    let start = i.saturating_sub(window / 2).min(n - window);
    let xi = xs[i];
    let mut deriv = 0.0;
    for j in start..start + window {
        let mut term = 0.0;
        for k in start..start + window {
            if k == j {
                continue;
            }
            let mut prod = 1.0;
            for l in start..start + window {
                if l == j || l == k {
                    continue;
                }
                prod *= (xi - xs[l]) / (xs[j] - xs[l]);
            }
            term += prod / (xs[j] - xs[k]);
        }
        deriv += ys[j] * term;
    }
    deriv
}

/// Estimate knot slopes from values by differentiating the local cubic
/// Lagrange interpolant through the four nearest knots (three for n = 3).
fn estimate_slopes(xs: &[f64], ys: &[f64]) -> Result<Vec<f64>, ProfileError> {
    let n = xs.len();
    if n < 2 {
        return Err(ProfileError::Invalid("need at least 2 knots".into()));
    }
    if n == 2 {
        let s = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        return Ok(vec![s, s]);
    }
    Ok((0..n)
        .map(|i| lagrange_derivative_at(xs, ys, 4, i))
        .collect())
}
