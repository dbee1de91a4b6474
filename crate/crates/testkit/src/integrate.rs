//! Step-doubling reference integrator. Unlike the main crate's fixed
//! 64-substep scheme, steps here are chosen adaptively from a Richardson
//! error estimate, so agreement between the two is evidence rather than
//! tautology.

use morseflow::{HybridSystem, SymbolicSignal};

fn rk4<F: Fn(f64) -> f64>(f: &F, x: f64, dt: f64) -> f64 {
    let k1 = f(x);
    let k2 = f(x + 0.5 * dt * k1);
    let k3 = f(x + 0.5 * dt * k2);
    let k4 = f(x + dt * k3);
    x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates the autonomous scalar equation `x' = f(x)` over a signed
/// `duration`, holding the per-unit-time error near `tol` by step doubling:
/// each step is taken once whole and twice halved, the pair yields an error
/// estimate, and the accepted value is the Richardson extrapolation.
pub fn adaptive_ode<F: Fn(f64) -> f64>(f: &F, x0: f64, duration: f64, tol: f64) -> f64 {
    if duration == 0.0 {
        return x0;
    }
    let total = duration.abs();
    let sign = duration.signum();
    let mut x = x0;
    let mut done = 0.0f64;
    let mut step = total.min(0.1);
    let floor_step = (total * 1e-10).max(1e-300);
    while done < total {
        step = step.min(total - done);
        let whole = rk4(f, x, sign * step);
        let half = rk4(f, x, sign * 0.5 * step);
        let two = rk4(f, half, sign * 0.5 * step);
        let err = (two - whole).abs() / 15.0;
        let budget = tol * (step / total).max(1e-16);
        if err <= budget || step <= floor_step {
            x = two + (two - whole) / 15.0;
            done += step;
        }
        let factor = 0.9 * (budget / err.max(1e-300)).powf(0.2);
        step *= factor.clamp(0.2, 5.0);
        step = step.max(floor_step);
    }
    x
}

/// Maximal intervals of constant vertex between times `0` and `t`, walked
/// directly off the signal's dwell offset and length. Each entry is
/// `(start, end, vertex)` with `start` and `end` in trajectory order, so for
/// negative `t` the entries run backward.
pub fn constancy_segments(sig: &SymbolicSignal, t: f64) -> Vec<(f64, f64, usize)> {
    let h = sig.h();
    let tau = sig.tau();
    let mut out = Vec::new();
    if t == 0.0 {
        return out;
    }
    let dir = t.signum();
    let mut s = 0.0f64;
    while (t - s) * dir > 0.0 {
        let k = ((s - tau) / h).floor();
        let mut boundary = if dir > 0.0 {
            tau + (k + 1.0) * h
        } else {
            tau + k * h
        };
        if (boundary - s) * dir <= 0.0 {
            boundary += dir * h;
        }
        let end = if (boundary - t) * dir >= 0.0 { t } else { boundary };
        out.push((s, end, sig.evaluate(0.5 * (s + end))));
        s = end;
    }
    out
}

/// Reference hybrid flow: the state is advanced segment by segment with
/// [`adaptive_ode`], switching fields at the signal's breakpoints. Circle
/// states are returned unwrapped; compare with a metric that identifies
/// turns.
pub fn reference_flow(sys: &HybridSystem, sig: &SymbolicSignal, x0: f64, t: f64, tol: f64) -> f64 {
    let mut x = x0;
    let segments = constancy_segments(sig, t);
    let n = segments.len().max(1) as f64;
    for (a, b, vertex) in segments {
        let field = sys.field(vertex);
        x = adaptive_ode(&|y| field.eval(y), x, b - a, tol / n);
    }
    x
}
