//! Reference for the signal metric: dense midpoint sampling of the
//! disagreement set, with an a-priori bound on the sampling error.

use morseflow::SymbolicSignal;

/// Approximates the windowed metric by sampling each weight cell
/// `[i*h, (i+1)*h)` at `per_cell` midpoints and counting disagreements.
/// Returns `(estimate, error_bound)`.
///
/// Within one cell the disagreement indicator changes value at most twice
/// (once per signal offset), so midpoint counting misclassifies at most two
/// samples and the per-cell fraction is off by at most `2 / per_cell`; the
/// bound is that, summed against the cell weights.
pub fn sampled_distance(
    x: &SymbolicSignal,
    y: &SymbolicSignal,
    window: usize,
    per_cell: usize,
) -> (f64, f64) {
    assert_eq!(x.h(), y.h(), "metric oracle needs a common dwell length");
    let h = x.h();
    let n = window as i64;
    let mut value = 0.0;
    let mut weight_sum = 0.0;
    for i in -n..=n {
        let base = i as f64 * h;
        let mut hits = 0usize;
        for j in 0..per_cell {
            let t = base + (j as f64 + 0.5) * h / per_cell as f64;
            if x.evaluate(t) != y.evaluate(t) {
                hits += 1;
            }
        }
        let weight = 0.25f64.powi(i.unsigned_abs() as i32);
        value += weight * hits as f64 / per_cell as f64;
        weight_sum += weight;
    }
    (value, weight_sum * 2.0 / per_cell as f64)
}
