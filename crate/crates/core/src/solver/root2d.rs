//! Two-dimensional root finding for the transcendental front equations.
//!
//! Damped Newton with a forward-difference Jacobian, multistart seeds on a
//! log grid inside the bracket box, and a nested-bisection fallback (solve
//! the first equation for μ at fixed ω₂, then bisect the second along ω₂).
//! Residual evaluations may fail (domain restrictions, underflow); failing
//! trials are discarded rather than fatal.

use super::{RootSolveConfig, SolverError};

pub(crate) struct RootSearch {
    /// All distinct converged roots, as ((omega2, mu), iterations).
    pub roots: Vec<(f64, f64)>,
    pub best: (f64, f64),
    pub iterations: usize,
    pub residuals: (f64, f64),
}

type Residual<'a> = dyn Fn(f64, f64) -> Result<(f64, f64), SolverError> + 'a;

/// Locate roots of `f(ω₂, μ) = (0, 0)` inside the bracket box.
/// Returns the root with the smallest μ; all distinct roots found across the
/// multistart sweep are reported for the multiplicity note.
pub(crate) fn solve2(f: &Residual, cfg: &RootSolveConfig) -> Result<RootSearch, SolverError> {
    cfg.validate()?;
    let (olo, ohi) = cfg.omega2_bracket;
    let (mlo, mhi) = cfg.mu_bracket;

    let mut roots: Vec<(f64, f64)> = Vec::new();
    let mut total_iters = 0usize;

    let try_push = |root: (f64, f64), roots: &mut Vec<(f64, f64)>| {
        let dup = roots.iter().any(|r| {
            (r.0 - root.0).abs() <= 1e-6 * root.0.abs().max(1.0)
                && (r.1 - root.1).abs() <= 1e-6 * root.1.abs().max(1.0)
        });
        if !dup {
            roots.push(root);
        }
    };

    // Coarse sign grid over the box: every cell in which both residual
    // components change sign seeds a Newton run, so distinct roots are
    // enumerated consistently across solver backends.
    const SCAN_N: usize = 24;
    let o_at = |i: usize| olo * (ohi / olo).powf(i as f64 / SCAN_N as f64);
    let m_at = |j: usize| mlo * (mhi / mlo).powf(j as f64 / SCAN_N as f64);
    let mut values: Vec<Option<(f64, f64)>> = Vec::with_capacity((SCAN_N + 1) * (SCAN_N + 1));
    for j in 0..=SCAN_N {
        for i in 0..=SCAN_N {
            values.push(f(o_at(i), m_at(j)).ok());
        }
    }
    let at = |i: usize, j: usize| values[j * (SCAN_N + 1) + i];
    for j in 0..SCAN_N {
        for i in 0..SCAN_N {
            let corners = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
            if corners.iter().any(|c| c.is_none()) {
                continue;
            }
            let c: Vec<(f64, f64)> = corners.iter().map(|v| v.unwrap()).collect();
            let sign_change = |sel: fn(&(f64, f64)) -> f64| {
                let mut pos = false;
                let mut neg = false;
                for v in &c {
                    let s = sel(v);
                    pos |= s >= 0.0;
                    neg |= s <= 0.0;
                }
                pos && neg
            };
            if sign_change(|v| v.0) && sign_change(|v| v.1) {
                let seed = ((o_at(i) * o_at(i + 1)).sqrt(), (m_at(j) * m_at(j + 1)).sqrt());
                if let Some((root, iters)) = newton_from(f, seed, cfg) {
                    total_iters += iters;
                    try_push(root, &mut roots);
                }
            }
        }
    }

    // Multistart Newton from a golden-ratio log lattice over the box.
    const PHI_FRAC: f64 = 0.618_033_988_749_894_9;
    for k in 0..cfg.multistart.max(1) {
        let su = ((k as f64 + 0.5) * PHI_FRAC).fract();
        let sv = ((k as f64 + 0.5) * PHI_FRAC * PHI_FRAC).fract();
        let seed_o = olo * (ohi / olo).powf(su);
        let seed_m = mlo * (mhi / mlo).powf(sv);
        if let Some((root, iters)) = newton_from(f, (seed_o, seed_m), cfg) {
            total_iters += iters;
            try_push(root, &mut roots);
        } else {
            total_iters += cfg.max_iters;
        }
    }

    // Fallback: nested bisection when Newton found nothing.
    if roots.is_empty() {
        if let Some(root) = nested_bisection(f, cfg) {
            let polished = newton_from(f, root, cfg).map(|(r, _)| r).unwrap_or(root);
            try_push(polished, &mut roots);
        }
    }

    if roots.is_empty() {
        return Err(SolverError::NoRoot(format!(
            "no root of the front equations inside omega2 in [{olo}, {ohi}], mu in [{mlo}, {mhi}]"
        )));
    }
    roots.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let best = roots[0];
    let residuals = f(best.0, best.1)?;
    Ok(RootSearch {
        roots,
        best,
        iterations: total_iters,
        residuals,
    })
}

fn newton_from(
    f: &Residual,
    seed: (f64, f64),
    cfg: &RootSolveConfig,
) -> Option<((f64, f64), usize)> {
    let (olo, ohi) = cfg.omega2_bracket;
    let (mlo, mhi) = cfg.mu_bracket;
    let clamp = |o: f64, m: f64| (o.clamp(olo, ohi), m.clamp(mlo, mhi));

    let (mut o, mut m) = clamp(seed.0, seed.1);
    let mut fv = f(o, m).ok()?;
    for iter in 1..=cfg.max_iters {
        let norm = fv.0.abs().max(fv.1.abs());
        if norm <= cfg.abs_tol {
            return Some(((o, m), iter));
        }
        // Forward-difference Jacobian, relative step 1e−6.
        let ho = 1e-6 * o.abs().max(1e-6);
        let hm = 1e-6 * m.abs().max(1e-6);
        let fo = f(o + ho, m).ok()?;
        let fm = f(o, m + hm).ok()?;
        let j11 = (fo.0 - fv.0) / ho;
        let j21 = (fo.1 - fv.1) / ho;
        let j12 = (fm.0 - fv.0) / hm;
        let j22 = (fm.1 - fv.1) / hm;
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let do_ = (fv.0 * j22 - fv.1 * j12) / det;
        let dm = (fv.1 * j11 - fv.0 * j21) / det;

        // Damping: halve the step until the residual norm improves.
        let mut accepted = false;
        let mut scale = 1.0;
        for _ in 0..30 {
            let (on, mn) = clamp(o - scale * do_, m - scale * dm);
            if let Ok(fn_) = f(on, mn) {
                let new_norm = fn_.0.abs().max(fn_.1.abs());
                if new_norm < norm || new_norm <= cfg.abs_tol {
                    o = on;
                    m = mn;
                    fv = fn_;
                    accepted = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    let norm = fv.0.abs().max(fv.1.abs());
    if norm <= cfg.abs_tol {
        Some(((o, m), cfg.max_iters))
    } else {
        None
    }
}

/// For each ω₂ on a log grid, bisect the first residual along μ (where a
/// sign change exists); then bisect the second residual along ω₂.
fn nested_bisection(f: &Residual, cfg: &RootSolveConfig) -> Option<(f64, f64)> {
    let (olo, ohi) = cfg.omega2_bracket;
    let mu_of_omega = |o: f64| bisect_mu(f, o, cfg);
    let g = |o: f64| -> Option<f64> {
        let m = mu_of_omega(o)?;
        f(o, m).ok().map(|(_, f2)| f2)
    };

    const SCAN: usize = 240;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=SCAN {
        let o = olo * (ohi / olo).powf(i as f64 / SCAN as f64);
        let Some(gv) = g(o) else {
            prev = None;
            continue;
        };
        if let Some((po, pg)) = prev {
            if pg == 0.0 {
                let m = mu_of_omega(po)?;
                return Some((po, m));
            }
            if pg * gv < 0.0 {
                // Bisection on g over [po, o].
                let (mut a, mut b, mut ga) = (po, o, pg);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    let gm = g(mid)?;
                    if ga * gm <= 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                        ga = gm;
                    }
                    if (b - a) <= 1e-15 * b.abs().max(1.0) {
                        break;
                    }
                }
                let o_root = 0.5 * (a + b);
                let m = mu_of_omega(o_root)?;
                return Some((o_root, m));
            }
        }
        prev = Some((o, gv));
    }
    None
}

fn bisect_mu(f: &Residual, omega2: f64, cfg: &RootSolveConfig) -> Option<f64> {
    let (mlo, mhi) = cfg.mu_bracket;
    const SCAN: usize = 200;
    let eval = |m: f64| f(omega2, m).ok().map(|(f1, _)| f1);
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=SCAN {
        let m = mlo * (mhi / mlo).powf(i as f64 / SCAN as f64);
        let Some(v) = eval(m) else {
            prev = None;
            continue;
        };
        if let Some((pm, pv)) = prev {
            if pv == 0.0 {
                return Some(pm);
            }
            if pv * v < 0.0 {
                let (mut a, mut b, mut fa) = (pm, m, pv);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    let fm = eval(mid)?;
                    if fa * fm <= 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                        fa = fm;
                    }
                    if (b - a) <= 1e-16 * b.abs().max(1.0) {
                        break;
                    }
                }
                return Some(0.5 * (a + b));
            }
        }
        prev = Some((m, v));
    }
    None
}
