//! Adaptive Cash–Karp Runge–Kutta integration for the two-state reduced
//! systems (enthalpy value and its flux variable).

use super::SolverError;

const MAX_STEPS: usize = 400_000;

/// Integrate `dy/dx = rhs(x, y)` from `x0` through every target abscissa in
/// `targets` (strictly increasing, first ≥ `x0`), returning the state at
/// each target. Local error is controlled against `tol` per step.
pub(crate) fn integrate_path<F>(
    rhs: &F,
    x0: f64,
    y0: [f64; 2],
    targets: &[f64],
    tol: f64,
) -> Result<Vec<[f64; 2]>, SolverError>
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
{
    let span = targets.last().copied().unwrap_or(x0) - x0;
    if span < 0.0 {
        return Err(SolverError::Internal(
            "integration targets must not precede the start".into(),
        ));
    }
    let mut out = Vec::with_capacity(targets.len());
    let mut x = x0;
    let mut y = y0;
    let mut h = (span / 256.0).max(1e-12);
    let h_min = 1e-14 * span.max(1.0);
    let mut steps = 0usize;
    for &target in targets {
        if target < x - 1e-14 * span.max(1.0) {
            return Err(SolverError::Internal(
                "integration targets must be increasing".into(),
            ));
        }
        while x < target {
            let h_try = h.min(target - x);
            let (y_new, err) = cash_karp_step(rhs, x, y, h_try);
            steps += 1;
            if steps > MAX_STEPS {
                return Err(SolverError::Stiffness(format!(
                    "step budget exhausted at x = {x:.6e}"
                )));
            }
            let scale = err_norm(&y, &y_new, &err, tol);
            if !scale.is_finite() {
                return Err(SolverError::Stiffness(format!(
                    "non-finite state during integration at x = {x:.6e}"
                )));
            }
            if scale <= 1.0 {
                x += h_try;
                y = y_new;
                let grow = if scale > 0.0 {
                    0.9 * scale.powf(-0.2)
                } else {
                    5.0
                };
                h = (h_try * grow.clamp(0.2, 5.0)).max(h_min);
            } else {
                h = (h_try * (0.9 * scale.powf(-0.25)).clamp(0.1, 0.9)).max(h_min);
                if h <= h_min && h_try <= h_min * 1.0001 {
                    return Err(SolverError::Stiffness(format!(
                        "step size underflow at x = {x:.6e}"
                    )));
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}

fn err_norm(y: &[f64; 2], y_new: &[f64; 2], err: &[f64; 2], tol: f64) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..2 {
        let sc = tol * (1.0 + y[i].abs().max(y_new[i].abs()));
        worst = worst.max((err[i] / sc).abs());
    }
    worst
}

/// One Cash–Karp 4(5) step: returns the fifth-order state and the embedded
/// error estimate.
fn cash_karp_step<F>(rhs: &F, x: f64, y: [f64; 2], h: f64) -> ([f64; 2], [f64; 2])
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
{
    const A2: f64 = 0.2;
    const A3: f64 = 0.3;
    const A4: f64 = 0.6;
    const A5: f64 = 1.0;
    const A6: f64 = 0.875;
    const B21: f64 = 0.2;
    const B31: f64 = 3.0 / 40.0;
    const B32: f64 = 9.0 / 40.0;
    const B41: f64 = 0.3;
    const B42: f64 = -0.9;
    const B43: f64 = 1.2;
    const B51: f64 = -11.0 / 54.0;
    const B52: f64 = 2.5;
    const B53: f64 = -70.0 / 27.0;
    const B54: f64 = 35.0 / 27.0;
    const B61: f64 = 1631.0 / 55296.0;
    const B62: f64 = 175.0 / 512.0;
    const B63: f64 = 575.0 / 13824.0;
    const B64: f64 = 44275.0 / 110592.0;
    const B65: f64 = 253.0 / 4096.0;
    const C1: f64 = 37.0 / 378.0;
    const C3: f64 = 250.0 / 621.0;
    const C4: f64 = 125.0 / 594.0;
    const C6: f64 = 512.0 / 1771.0;
    const D1: f64 = C1 - 2825.0 / 27648.0;
    const D3: f64 = C3 - 18575.0 / 48384.0;
    const D4: f64 = C4 - 13525.0 / 55296.0;
    const D5: f64 = -277.0 / 14336.0;
    const D6: f64 = C6 - 0.25;

    let lin = |y: &[f64; 2], terms: &[(f64, &[f64; 2])]| {
        let mut out = *y;
        for i in 0..2 {
            for (c, k) in terms {
                out[i] += h * c * k[i];
            }
        }
        out
    };

    let k1 = rhs(x, y);
    let k2 = rhs(x + A2 * h, lin(&y, &[(B21, &k1)]));
    let k3 = rhs(x + A3 * h, lin(&y, &[(B31, &k1), (B32, &k2)]));
    let k4 = rhs(x + A4 * h, lin(&y, &[(B41, &k1), (B42, &k2), (B43, &k3)]));
    let k5 = rhs(
        x + A5 * h,
        lin(&y, &[(B51, &k1), (B52, &k2), (B53, &k3), (B54, &k4)]),
    );
    let k6 = rhs(
        x + A6 * h,
        lin(
            &y,
            &[(B61, &k1), (B62, &k2), (B63, &k3), (B64, &k4), (B65, &k5)],
        ),
    );

    let mut y_new = y;
    let mut err = [0.0; 2];
    for i in 0..2 {
        y_new[i] += h * (C1 * k1[i] + C3 * k3[i] + C4 * k4[i] + C6 * k6[i]);
        err[i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]);
    }
    (y_new, err)
}
