//! Variation-type functionals: Beurling's `V*`, the quasi-convexity integral
//! and the Vitali variation in two dimensions.

use num_complex::Complex64;
use serde::Serialize;

use super::thm11::domain_cuts;
use super::FunctionalReport;
use crate::envelopes::suffix_max;
use crate::error::{Error, Result};
use crate::float_format::sci;
use crate::function_model::{GridFunction1D, GridFunction2D};
use crate::quadrature::{decimate, richardson_error, trapezoid};

/// Samples of `f'` on each half-line as `(|t|, f'(±|t|))`, starting at `Δ`.
fn half_lines(f: &GridFunction1D) -> Result<[(Vec<f64>, Vec<Complex64>); 2]> {
    let d = f.derivative().ok_or(Error::MissingDerivative)?;
    let dom = f.domain();
    let o = dom.origin_index();
    let h = dom.step();
    let pos = ((o + 1)..dom.len())
        .map(|k| ((k - o) as f64 * h, d[k]))
        .unzip();
    let neg = (1..=o).map(|j| (j as f64 * h, d[o - j])).unzip();
    Ok([pos, neg])
}

fn upto(x: &[f64], cut: f64) -> usize {
    x.partition_point(|&t| t <= cut * (1.0 + 1e-12))
}

fn vstar_side(x: &[f64], env: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x[0] * env[0] + trapezoid(x, env)
}

fn power_tail(f1_l: f64, l: f64, beta: f64, factor: f64) -> f64 {
    if beta > 1.0 {
        factor * f1_l * l / (beta - 1.0)
    } else {
        f64::INFINITY
    }
}

/// `V*(f) = ∫_0^∞ sup_{s >= t} |f'(s)| dt`, taken on each half-line; the larger side is reported.
///
/// `exponents` gives a power-law tail for non-oscillating families.
pub fn beurling_vstar(
    f: &GridFunction1D,
    exponents: Option<(f64, f64)>,
) -> Result<FunctionalReport> {
    let sides = half_lines(f)?;
    let l = f.domain().half_width();
    let mut refinement = vec![0.0f64; domain_cuts(l, 0.0).len()];
    let (mut coarse, mut tail) = (0.0f64, 0.0f64);
    for (x, d) in &sides {
        let env = suffix_max(&d.iter().map(|v| v.norm()).collect::<Vec<_>>());
        for (r, &c) in refinement.iter_mut().zip(&domain_cuts(l, 0.0)) {
            let m = upto(x, c);
            *r = r.max(vstar_side(&x[..m], &env[..m]));
        }
        coarse = coarse.max(vstar_side(&decimate(x), &decimate(&env)));
        if let Some((_, beta)) = exponents {
            tail = tail.max(power_tail(
                *env.last().unwrap_or(&0.0),
                x.last().copied().unwrap_or(l),
                beta,
                1.0,
            ));
        }
    }
    let err = richardson_error(*refinement.last().unwrap(), coarse);
    Ok(FunctionalReport::assemble(
        "V*",
        refinement,
        err,
        exponents.map(|_| tail),
    ))
}

fn stieltjes_side(x: &[f64], d: &[Complex64]) -> f64 {
    x.windows(2)
        .zip(d.windows(2))
        .map(|(t, v)| 0.5 * (t[0] + t[1]) * (v[1] - v[0]).norm())
        .sum()
}

/// `∫_0^∞ t |df'(t)|` as a Stieltjes sum on each half-line; jumps of `f'`
/// contribute `t |jump|`. The larger side is reported.
pub fn quasiconvex_integral(
    f: &GridFunction1D,
    exponents: Option<(f64, f64)>,
) -> Result<FunctionalReport> {
    let sides = half_lines(f)?;
    let l = f.domain().half_width();
    let cuts = domain_cuts(l, 0.0);
    let mut refinement = vec![0.0f64; cuts.len()];
    let (mut coarse, mut tail) = (0.0f64, 0.0f64);
    for (x, d) in &sides {
        for (r, &c) in refinement.iter_mut().zip(&cuts) {
            let m = upto(x, c);
            *r = r.max(stieltjes_side(&x[..m], &d[..m]));
        }
        coarse = coarse.max(stieltjes_side(&decimate(x), &decimate(d)));
        if let Some((_, beta)) = exponents {
            let f1_l = d.iter().rev().take(8).map(|v| v.norm()).fold(0.0, f64::max);
            tail = tail.max(power_tail(f1_l, x.last().copied().unwrap_or(l), beta, beta));
        }
    }
    // a Stieltjes sum of a jump is not smooth in h, so report the raw h vs 2h gap
    let err = (refinement.last().unwrap() - coarse).abs();
    Ok(FunctionalReport::assemble(
        "quasiconvex",
        refinement,
        err,
        exponents.map(|_| tail),
    ))
}

/// Best dyadic packing on a coarse subgrid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackingEstimate {
    #[serde(serialize_with = "sci")]
    pub value: f64,
    /// Cells per axis of the subgrid the packing boxes are drawn from.
    pub cells: usize,
}

/// Vitali variation: the integral of `|∂²f/∂x∂y|` and, independently, the
/// best sum `Σ |Δ_u f(x)|` over dyadic packings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VitaliReport {
    pub integral: Option<FunctionalReport>,
    pub packing: Option<PackingEstimate>,
}

fn mixed_integral(data: &[Complex64], f: &GridFunction2D, cut: f64, stride: usize) -> f64 {
    let (dx, dy) = f.domains();
    let ny = dy.len();
    let mut acc = 0.0;
    for i in (0..dx.len()).step_by(stride) {
        if dx.point(i).abs() > cut * (1.0 + 1e-12) {
            continue;
        }
        for j in (0..ny).step_by(stride) {
            if dy.point(j).abs() > cut * (1.0 + 1e-12) {
                continue;
            }
            acc += data[i * ny + j].norm();
        }
    }
    acc * dx.step() * dy.step() * (stride * stride) as f64
}

/// Sup of `Σ |Δ box|` over packings by boxes of a dyadic quadtree on a `cells × cells` subgrid.
pub fn dyadic_packing(f: &GridFunction2D, cells: usize) -> Result<PackingEstimate> {
    if !cells.is_power_of_two() || cells == 0 {
        return Err(Error::BadParams(format!(
            "packing cells must be a power of two, got {cells}"
        )));
    }
    let (dx, dy) = f.domains();
    let (lx, ly) = (dx.half_width(), dy.half_width());
    let hx = 2.0 * lx / cells as f64;
    let hy = 2.0 * ly / cells as f64;
    let m = cells + 1;
    let mut nodes = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in 0..m {
            nodes[i * m + j] = f.at(-lx + i as f64 * hx, -ly + j as f64 * hy);
        }
    }
    fn best(nodes: &[Complex64], m: usize, i: usize, j: usize, size: usize) -> f64 {
        let v = |a: usize, b: usize| nodes[a * m + b];
        let own = (v(i + size, j + size) - v(i + size, j) - v(i, j + size) + v(i, j)).norm();
        if size == 1 {
            return own;
        }
        let s = size / 2;
        let children = best(nodes, m, i, j, s)
            + best(nodes, m, i + s, j, s)
            + best(nodes, m, i, j + s, s)
            + best(nodes, m, i + s, j + s, s);
        own.max(children)
    }
    Ok(PackingEstimate {
        value: best(&nodes, m, 0, 0, cells),
        cells,
    })
}

/// Vitali variation of a sampled 2D function. Without a stored mixed partial
/// only the packing estimate is produced, unless `fallback` is off.
pub fn vitali_2d(f: &GridFunction2D, fallback: bool) -> Result<VitaliReport> {
    let integral = match f.partial([1, 1]) {
        Ok(data) => {
            let (dx, _) = f.domains();
            let cuts = domain_cuts(dx.half_width(), 0.0);
            let refinement: Vec<f64> = cuts
                .iter()
                .map(|&c| mixed_integral(data, f, c, 1))
                .collect();
            let coarse = mixed_integral(data, f, dx.half_width(), 2);
            let err = richardson_error(*refinement.last().unwrap(), coarse);
            Some(FunctionalReport::assemble("V", refinement, err, None))
        }
        Err(e) if !fallback => return Err(e),
        Err(_) => None,
    };
    let packing = if fallback {
        Some(dyadic_packing(f, 16)?)
    } else {
        None
    };
    Ok(VitaliReport { integral, packing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_model::{
        sample, sample_2d, AnalyticFunction, AnalyticFunction2D, Domain1D,
    };
    use crate::quadrature::Finiteness;
    use approx::assert_relative_eq;

    fn exp_decay() -> AnalyticFunction {
        AnalyticFunction::real("exp", |t: f64| (-t.abs()).exp())
            .with_real_derivative(|t: f64| -t.signum() * (-t.abs()).exp())
    }

    fn hat() -> AnalyticFunction {
        AnalyticFunction::real("hat", |t: f64| (1.0 - t.abs()).max(0.0))
            .with_real_derivative(|t: f64| if t.abs() < 1.0 { -t.signum() } else { 0.0 })
    }

    #[test]
    fn vstar_closed_forms() {
        let d = Domain1D::new(64.0, 1 << 14).unwrap();
        let r = beurling_vstar(&sample(&exp_decay(), d).unwrap(), None).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-4);
        assert_eq!(r.finite_verdict, Finiteness::Finite);
        let r = beurling_vstar(&sample(&hat(), d).unwrap(), None).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 2.0 * d.step());
    }

    #[test]
    fn vstar_oscillating_frozen() {
        // frozen from an independent numpy running-max + trapezoid on the same grid
        let f = AnalyticFunction::real("sinsq", |t: f64| (t * t).sin() / (1.0 + t * t))
            .with_real_derivative(|t: f64| {
                2.0 * t * (t * t).cos() / (1.0 + t * t)
                    - 2.0 * t * (t * t).sin() / (1.0 + t * t).powi(2)
            });
        let d = Domain1D::new(32.0, 1 << 16).unwrap();
        let r = beurling_vstar(&sample(&f, d).unwrap(), None).unwrap();
        assert_relative_eq!(r.truncated, VSTAR_SINSQ, max_relative = 1e-12);
    }

    const VSTAR_SINSQ: f64 = 7.000_754_385_065_505;

    #[test]
    fn quasiconvex_closed_forms() {
        let d = Domain1D::new(64.0, 1 << 14).unwrap();
        let r = quasiconvex_integral(&sample(&exp_decay(), d).unwrap(), None).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-3);
        let r = quasiconvex_integral(&sample(&hat(), d).unwrap(), None).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = d.step());
    }

    #[test]
    fn quasiconvex_cosine_frozen() {
        let f = AnalyticFunction::real("cos", |t: f64| t.cos() / (1.0 + t.abs()).powi(3))
            .with_real_derivative(|t: f64| {
                -t.sin() / (1.0 + t.abs()).powi(3)
                    - 3.0 * t.signum() * t.cos() / (1.0 + t.abs()).powi(4)
            });
        let d = Domain1D::new(64.0, 1 << 14).unwrap();
        let fine = quasiconvex_integral(&sample(&f, d).unwrap(), None).unwrap();
        let d2 = Domain1D::new(64.0, 1 << 15).unwrap();
        let finer = quasiconvex_integral(&sample(&f, d2).unwrap(), None).unwrap();
        assert_relative_eq!(fine.truncated, finer.truncated, max_relative = 1e-3);
        assert_relative_eq!(finer.truncated, QC_COS, max_relative = 1e-12);
    }

    // frozen from an independent numpy Stieltjes sum on the finer grid
    const QC_COS: f64 = 1.175_781_037_645_986;

    fn exp2d() -> AnalyticFunction2D {
        AnalyticFunction2D::tensor(&exp_decay(), &exp_decay())
    }

    #[test]
    fn vitali_separable_exponential() {
        let d = Domain1D::new(16.0, 1 << 10).unwrap();
        let g = sample_2d(&exp2d(), d, d).unwrap();
        let r = vitali_2d(&g, true).unwrap();
        assert_relative_eq!(r.integral.unwrap().value, 4.0, max_relative = 0.02);
        assert_relative_eq!(r.packing.unwrap().value, 4.0, max_relative = 0.05);
    }

    #[test]
    fn vitali_of_affine_is_zero() {
        let f = AnalyticFunction2D::new("x+y", |x, y| Complex64::new(x + y, 0.0)).with_partials(
            |_, _| Complex64::new(1.0, 0.0),
            |_, _| Complex64::new(1.0, 0.0),
            |_, _| Complex64::new(0.0, 0.0),
        );
        let d = Domain1D::new(4.0, 64).unwrap();
        let r = vitali_2d(&sample_2d(&f, d, d).unwrap(), false).unwrap();
        assert_eq!(r.integral.unwrap().truncated, 0.0);
    }

    #[test]
    fn vitali_gaussian_packing_agrees() {
        let f = AnalyticFunction2D::new("g2", |x: f64, y: f64| {
            Complex64::new((-x * x - y * y).exp(), 0.0)
        });
        let d = Domain1D::new(4.0, 256).unwrap();
        let r = vitali_2d(&sample_2d(&f, d, d).unwrap(), true).unwrap();
        let (i, p) = (r.integral.unwrap().value, r.packing.unwrap().value);
        assert!((i - p).abs() <= 0.05 * i, "integral {i} packing {p}");
    }

    #[test]
    fn missing_derivative() {
        let d = Domain1D::new(4.0, 32).unwrap();
        let g = GridFunction1D::from_real(d, &[0.0; 32]).unwrap();
        assert_eq!(beurling_vstar(&g, None), Err(Error::MissingDerivative));
        assert_eq!(
            quasiconvex_integral(&g, None),
            Err(Error::MissingDerivative)
        );
    }
}
