//! The truncated Hilbert-type transform `Th(t) = ∫_{→0}^{t/2} (h(t+s) - h(t-s))/s ds`
//! and its coordinate version for functions of two variables.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function_model::GridFunction2D;

/// Samples `h(j · step)`, `j = 0, 1, ...`, of a function on the half-line.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLine {
    pub step: f64,
    pub values: Vec<Complex64>,
}

impl HalfLine {
    pub fn from_fn(step: f64, len: usize, h: impl Fn(f64) -> Complex64) -> Self {
        Self {
            step,
            values: (0..len).map(|j| h(j as f64 * step)).collect(),
        }
    }

    /// Linear interpolation, zero beyond the last sample.
    pub fn at(&self, u: f64) -> Complex64 {
        let p = u / self.step;
        if !(p >= 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        let i = p.floor() as usize;
        let frac = p - i as f64;
        let get = |k: usize| {
            self.values
                .get(k)
                .copied()
                .unwrap_or(Complex64::new(0.0, 0.0))
        };
        if frac == 0.0 {
            get(i)
        } else {
            get(i) * (1.0 - frac) + get(i + 1) * frac
        }
    }
}

/// Trapezoid in `s` on `[0, t/2]` with about `step`-sized cells; the `s = 0`
/// node takes the first interior quotient. `diff(s)` is the numerator.
fn integrate(t: f64, step: f64, diff: impl Fn(f64) -> Complex64) -> Result<Complex64> {
    let half = 0.5 * t;
    let m = ((half / step).ceil() as usize).max(8);
    let ds = half / m as f64;
    let d1 = diff(ds);
    let d2 = diff(2.0 * ds);
    let scale = d1.norm().max(d2.norm());
    // a smooth numerator vanishes linearly; a jump keeps |D(s)| flat as s -> 0
    if scale > 1e-12 && d1.norm() > 0.75 * d2.norm() && d2.norm() > 0.0 {
        return Err(Error::SingularAtOrigin { t });
    }
    let q = |i: usize| diff(i as f64 * ds) / (i as f64 * ds);
    let mut acc = 0.5 * q(1) + 0.5 * q(m);
    for i in 1..m {
        acc += q(i);
    }
    Ok(acc * ds)
}

/// `Th(t)` for each `t > 0`.
pub fn t_transform(h: &HalfLine, ts: &[f64]) -> Result<Vec<Complex64>> {
    ts.iter()
        .map(|&t| {
            if !(t > 0.0) {
                return Err(Error::BadParams(format!("t must be positive, got {t}")));
            }
            integrate(t, h.step, |s| h.at(t + s) - h.at(t - s))
        })
        .collect()
}

/// `T_j g(x) = ∫_0^{x_j/2} (g(x - s e_j) - g(x + s e_j))/s ds` along axis `j` (0 or 1).
/// Note the numerator's sign is opposite to the one-variable form.
pub fn t_transform_2d(
    g: &GridFunction2D,
    axis: usize,
    points: &[(f64, f64)],
) -> Result<Vec<Complex64>> {
    if axis > 1 {
        return Err(Error::BadParams(format!("axis must be 0 or 1, got {axis}")));
    }
    let (dx, dy) = g.domains();
    let step = if axis == 0 { dx.step() } else { dy.step() };
    points
        .iter()
        .map(|&(x, y)| {
            let t = if axis == 0 { x } else { y };
            if !(t > 0.0) {
                return Err(Error::BadParams(format!(
                    "coordinate {axis} must be positive, got {t}"
                )));
            }
            integrate(t, step, |s| {
                if axis == 0 {
                    g.at(x - s, y) - g.at(x + s, y)
                } else {
                    g.at(x, y - s) - g.at(x, y + s)
                }
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_model::{sample_2d, AnalyticFunction2D, Domain1D};
    use approx::assert_relative_eq;

    fn real(step: f64, len: usize, h: impl Fn(f64) -> f64) -> HalfLine {
        HalfLine::from_fn(step, len, |u| Complex64::new(h(u), 0.0))
    }

    #[test]
    fn closed_forms() {
        let c = real(0.01, 1000, |_| 3.0);
        for v in t_transform(&c, &[0.5, 1.0, 2.0]).unwrap() {
            assert_eq!(v.norm(), 0.0);
        }
        let id = real(0.01, 1000, |u| u);
        for (t, v) in [0.5, 1.0, 2.0]
            .iter()
            .zip(t_transform(&id, &[0.5, 1.0, 2.0]).unwrap())
        {
            assert_relative_eq!(v.re, *t, max_relative = 1e-12);
        }
        // (t+s)^2 - (t-s)^2 = 4ts, so Th(t) = 4t · t/2 = 2t^2
        let sq = real(0.001, 10_000, |u| u * u);
        let v = t_transform(&sq, &[2.0]).unwrap()[0];
        assert_relative_eq!(v.re, 8.0, max_relative = 1e-5);
    }

    #[test]
    fn brute_force_square() {
        // two resolutions of an independent midpoint rule on the exact integrand
        let brute = |n: usize| -> f64 {
            let (t, hs) = (2.0f64, 1.0 / n as f64);
            (0..n)
                .map(|i| {
                    let s = (i as f64 + 0.5) * hs;
                    ((t + s).powi(2) - (t - s).powi(2)) / s * hs
                })
                .sum()
        };
        assert_relative_eq!(brute(1000), brute(2000), max_relative = 1e-12);
        assert_relative_eq!(brute(2000), 8.0, max_relative = 1e-12);
    }

    #[test]
    fn jump_is_singular() {
        let step = 0.01;
        let h = real(step, 1000, |u| if u < 1.0 { 1.0 } else { 0.0 });
        assert!(matches!(
            t_transform(&h, &[1.0]),
            Err(Error::SingularAtOrigin { .. })
        ));
    }

    #[test]
    fn two_dimensional_sign() {
        let f = AnalyticFunction2D::new("x", |x, _| Complex64::new(x, 0.0));
        let d = Domain1D::new(8.0, 256).unwrap();
        let g = sample_2d(&f, d, d).unwrap();
        let v = t_transform_2d(&g, 0, &[(2.0, 1.0)]).unwrap()[0];
        // numerator -2s, so T_0 = -x_0
        assert_relative_eq!(v.re, -2.0, max_relative = 1e-9);
    }
}
