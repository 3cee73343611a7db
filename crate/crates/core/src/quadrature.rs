//! Shared quadrature and refinement helpers.

use serde::Serialize;

/// Outcome of a finiteness test on a truncated functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Finiteness {
    Finite,
    Divergent,
    Inconclusive,
}

/// Growth factor per domain doubling at or above which a functional is declared divergent.
pub const DIVERGENT_GROWTH: f64 = 1.5;
/// Successive increments must shrink at least this fast to count as Cauchy.
pub const CAUCHY_RATIO: f64 = 0.5;
/// Increments below this fraction of the value count as converged outright.
pub const NEGLIGIBLE_INCREMENT: f64 = 1e-3;

/// Composite trapezoid rule on arbitrary nodes.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// `out[k] = ∫_{x_k}^{x_last} y` by the trapezoid rule.
pub fn reverse_cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    for k in (0..n.saturating_sub(1)).rev() {
        out[k] = out[k + 1] + 0.5 * (x[k + 1] - x[k]) * (y[k] + y[k + 1]);
    }
    out
}

/// Primitive of `ln(2/t)`: `G(t) = t (1 + ln(2/t))`, with `G(0) = 0`.
pub fn log_weight_primitive(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * (1.0 + (2.0 / t).ln())
    }
}

/// Exact integral of `ln(2/t)` over `[a, b]`.
pub fn log_weight_cell(a: f64, b: f64) -> f64 {
    log_weight_primitive(b) - log_weight_primitive(a)
}

/// Least-squares slope of `ln y` against `ln x`, over points with `x > 0`, `y > 0`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(&a, &b)| a > 0.0 && b > 0.0 && b.is_finite())
        .map(|(&a, &b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Classifies a sequence of truncated values taken at successive domain doublings.
///
/// Divergent when every doubling multiplies the value by at least
/// [`DIVERGENT_GROWTH`]; finite when successive increments shrink by at least
/// [`CAUCHY_RATIO`] or the last increment is negligible; inconclusive otherwise.
pub fn classify_refinement(values: &[f64]) -> Finiteness {
    if values.iter().any(|v| !v.is_finite()) {
        return Finiteness::Divergent;
    }
    if values.len() < 3 {
        return Finiteness::Inconclusive;
    }
    let growth_ok = values
        .windows(2)
        .all(|w| w[0] > 0.0 && w[1] >= DIVERGENT_GROWTH * w[0]);
    if growth_ok {
        return Finiteness::Divergent;
    }
    let incs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let last = *values.last().unwrap();
    let last_inc = *incs.last().unwrap();
    if last_inc <= NEGLIGIBLE_INCREMENT * last.abs() || last_inc <= 1e-14 {
        return Finiteness::Finite;
    }
    let cauchy = incs.windows(2).all(|w| w[1] < CAUCHY_RATIO * w[0]);
    if cauchy {
        Finiteness::Finite
    } else {
        Finiteness::Inconclusive
    }
}

/// Geometric bound on the remainder of a sequence whose last increments are `incs`.
/// `None` when the increments are not contracting.
pub fn geometric_remainder(incs: &[f64]) -> Option<f64> {
    match incs {
        [] => None,
        [only] => (*only == 0.0).then_some(0.0),
        _ => {
            let a = incs[incs.len() - 2].abs();
            let b = incs[incs.len() - 1].abs();
            if b == 0.0 {
                return Some(0.0);
            }
            if a == 0.0 {
                return None;
            }
            let r = b / a;
            (r < 1.0).then(|| b * r / (1.0 - r))
        }
    }
}

/// Weights attached to a subset of the nodes of an increasing abscissa array.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisRule {
    pub nodes: Vec<usize>,
    pub weights: Vec<f64>,
}

impl AxisRule {
    pub fn apply(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&k, &w)| w * f(k))
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Trapezoid weights for `∫_lower^{x_last} g(t) dt/t` on the nodes `x_k >= lower`.
/// A partial leading cell `[lower, x_first]` is a rectangle at `x_first`.
pub fn inverse_weight_rule(x: &[f64], lower: f64) -> AxisRule {
    let start = x.partition_point(|&t| t < lower * (1.0 - 1e-12));
    if start >= x.len() {
        return AxisRule {
            nodes: Vec::new(),
            weights: Vec::new(),
        };
    }
    let m = x.len() - start;
    let mut w = vec![0.0; m];
    w[0] += (x[start] - lower).max(0.0);
    for k in 0..m - 1 {
        let h = x[start + k + 1] - x[start + k];
        w[k] += 0.5 * h;
        w[k + 1] += 0.5 * h;
    }
    for (k, wk) in w.iter_mut().enumerate() {
        *wk /= x[start + k];
    }
    AxisRule {
        nodes: (start..x.len()).collect(),
        weights: w,
    }
}

/// Cell-exact weights for `∫_0^upper g(t) ln(2/t) dt` with `g` piecewise constant,
/// equal to `g(x_k)` on `(x_{k-1}, x_k]` (`x_{-1} = 0`).
pub fn log_weight_rule(x: &[f64], upper: f64) -> AxisRule {
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut prev = 0.0;
    for (k, &t) in x.iter().enumerate() {
        if prev >= upper {
            break;
        }
        nodes.push(k);
        weights.push(log_weight_cell(prev, t.min(upper)));
        prev = t;
    }
    AxisRule { nodes, weights }
}

/// Keeps every second abscissa (`x_1, x_3, ...`), the coarse half of an `h` vs `2h` comparison.
pub fn decimate<T: Copy>(v: &[T]) -> Vec<T> {
    v.iter().skip(1).step_by(2).copied().collect()
}

/// Richardson-style error estimate `|I_h - I_2h| / 3` for a second-order rule.
pub fn richardson_error(fine: f64, coarse: f64) -> f64 {
    if fine.is_finite() && coarse.is_finite() {
        (fine - coarse).abs() / 3.0
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn axis_rules_integrate_closed_forms() {
        let x: Vec<f64> = (1..=4096).map(|k| k as f64 / 256.0).collect();
        let r = log_weight_rule(&x, 1.0);
        assert_relative_eq!(r.apply(|_| 1.0), 1.0 + 2f64.ln(), epsilon = 1e-12);
        let r = inverse_weight_rule(&x, 1.0);
        assert_relative_eq!(r.apply(|_| 1.0), 16f64.ln(), max_relative = 1e-5);
        assert_eq!(decimate(&[1, 2, 3, 4, 5, 6]), vec![2, 4, 6]);
    }

    #[test]
    fn trapezoid_is_exact_for_linear() {
        let x: Vec<f64> = (0..11).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|t| 2.0 * t + 1.0).collect();
        assert_relative_eq!(trapezoid(&x, &y), 3.0 * 3.0 + 3.0, epsilon = 1e-12);
        let rc = reverse_cumulative_trapezoid(&x, &y);
        assert_relative_eq!(rc[0], trapezoid(&x, &y), epsilon = 1e-12);
        assert_eq!(rc[10], 0.0);
    }

    #[test]
    fn log_weight_over_unit_interval() {
        assert_relative_eq!(log_weight_cell(0.0, 1.0), 1.0 + 2f64.ln(), epsilon = 1e-15);
        let split = log_weight_cell(0.0, 0.25) + log_weight_cell(0.25, 1.0);
        assert_relative_eq!(split, 1.0 + 2f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn loglog_slope_recovers_power() {
        let x: Vec<f64> = (1..50).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|t| 3.0 * t.powf(-1.7)).collect();
        assert_relative_eq!(loglog_slope(&x, &y).unwrap(), -1.7, epsilon = 1e-12);
    }

    #[test]
    fn refinement_classes() {
        assert_eq!(
            classify_refinement(&[1.0, 1.6, 2.6, 4.2]),
            Finiteness::Divergent
        );
        assert_eq!(
            classify_refinement(&[1.0, 1.5, 1.7, 1.75]),
            Finiteness::Finite
        );
        assert_eq!(
            classify_refinement(&[1.0, 1.1, 1.2, 1.3]),
            Finiteness::Inconclusive
        );
        assert_eq!(classify_refinement(&[2.0, 2.0, 2.0]), Finiteness::Finite);
        assert_eq!(classify_refinement(&[1.0, 2.0]), Finiteness::Inconclusive);
    }

    #[test]
    fn geometric_remainder_bounds() {
        assert_relative_eq!(geometric_remainder(&[0.25, 0.125]).unwrap(), 0.125);
        assert!(geometric_remainder(&[1.0, 1.0]).is_none());
    }
}
