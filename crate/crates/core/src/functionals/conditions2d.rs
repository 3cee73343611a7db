//! The nine integral conditions for `A(R^2)` built from `f00`, `f01`, `f10`, `f11`
//! (first digit: derivative order in `x`, second: in `y`).

use super::FunctionalReport;
use crate::envelopes::Envelope2D;
use crate::error::{Error, Result};
use crate::parallel;
use crate::quadrature::{
    decimate, inverse_weight_rule, log_weight_rule, reverse_cumulative_trapezoid, richardson_error,
};

pub const CONDITION_NAMES: [&str; 9] = ["C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9"];

struct Sub<'a> {
    env: &'a Envelope2D,
    xs: &'a [usize],
    ys: &'a [usize],
}

impl Sub<'_> {
    fn at(&self, a: usize, b: usize) -> f64 {
        self.env.value(self.xs[a], self.ys[b])
    }
}

/// `∫_{y_b}^{y_last}` along `y` for every row.
fn inner_y(x: &[f64], y: &[f64], p: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let ny = y.len();
    let mut out = Vec::with_capacity(x.len() * ny);
    for a in 0..x.len() {
        let row: Vec<f64> = (0..ny).map(|b| p(a, b)).collect();
        out.extend(reverse_cumulative_trapezoid(y, &row));
    }
    out
}

/// `∫_{x_a}^{x_last}` along `x` for every column.
fn inner_x(x: &[f64], y: &[f64], p: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let (nx, ny) = (x.len(), y.len());
    let mut out = vec![0.0; nx * ny];
    for b in 0..ny {
        let col: Vec<f64> = (0..nx).map(|a| p(a, b)).collect();
        for (a, v) in reverse_cumulative_trapezoid(x, &col)
            .into_iter()
            .enumerate()
        {
            out[a * ny + b] = v;
        }
    }
    out
}

fn nine(envs: [&Envelope2D; 4], xs: &[usize], ys: &[usize]) -> [f64; 9] {
    let [e00, e01, e10, e11] = envs.map(|env| Sub { env, xs, ys });
    let x: Vec<f64> = xs.iter().map(|&i| e00.env.x_abscissae()[i]).collect();
    let y: Vec<f64> = ys.iter().map(|&j| e00.env.y_abscissae()[j]).collect();
    let ny = y.len();
    let (lx, ix) = (log_weight_rule(&x, 1.0), inverse_weight_rule(&x, 1.0));
    let (ly, iy) = (log_weight_rule(&y, 1.0), inverse_weight_rule(&y, 1.0));
    let tensor =
        |rx: &crate::quadrature::AxisRule,
         ry: &crate::quadrature::AxisRule,
         g: &dyn Fn(usize, usize) -> f64| { rx.apply(|a| ry.apply(|b| g(a, b))) };

    let c1 = tensor(&lx, &ly, &|a, b| e11.at(a, b));
    let c2 = tensor(&ix, &iy, &|a, b| e00.at(a, b));
    let both = {
        let rows = inner_y(&x, &y, |a, b| e00.at(a, b) * e11.at(a, b));
        inner_x(&x, &y, |a, b| rows[a * ny + b])
    };
    let c3 = tensor(&ix, &iy, &|a, b| both[a * ny + b].sqrt());
    let c4 = tensor(&lx, &iy, &|a, b| e10.at(a, b));
    let in5 = inner_y(&x, &y, |a, b| e10.at(a, b) * e11.at(a, b));
    let c5 = tensor(&lx, &iy, &|a, b| in5[a * ny + b].sqrt());
    let c6 = tensor(&ix, &ly, &|a, b| e01.at(a, b));
    let in7 = inner_x(&x, &y, |a, b| e01.at(a, b) * e11.at(a, b));
    let c7 = tensor(&ix, &ly, &|a, b| in7[a * ny + b].sqrt());
    let in8 = inner_y(&x, &y, |a, b| e00.at(a, b) * e01.at(a, b));
    let c8 = tensor(&ix, &iy, &|a, b| in8[a * ny + b].sqrt());
    let in9 = inner_x(&x, &y, |a, b| e00.at(a, b) * e10.at(a, b));
    let c9 = tensor(&ix, &iy, &|a, b| in9[a * ny + b].sqrt());
    [c1, c2, c3, c4, c5, c6, c7, c8, c9]
}

/// Evaluates the nine conditions. Truncated values at the domain cuts
/// `L/4`, `L/2`, `L` (per axis) decide finiteness and the tail bound; the
/// quadrature error compares against every second abscissa.
pub fn conditions_2d(
    f00: &Envelope2D,
    f01: &Envelope2D,
    f10: &Envelope2D,
    f11: &Envelope2D,
) -> Result<Vec<FunctionalReport>> {
    let envs = [f00, f01, f10, f11];
    let expected = [[0, 0], [0, 1], [1, 0], [1, 1]];
    for (e, z) in envs.iter().zip(expected) {
        let (eta, zeta) = e.indices();
        if zeta != z || eta != [1 - z[0], 1 - z[1]] {
            return Err(Error::BadIndex { eta, zeta });
        }
        if e.x_abscissae() != f00.x_abscissae() || e.y_abscissae() != f00.y_abscissae() {
            return Err(Error::EnvelopeGridMismatch);
        }
    }
    let xa = f00.x_abscissae();
    let ya = f00.y_abscissae();
    let (lx, ly) = (*xa.last().unwrap(), *ya.last().unwrap());
    let keep = |axis: &[f64], cut: f64| -> Vec<usize> {
        (0..axis.partition_point(|&t| t <= cut * (1.0 + 1e-12))).collect()
    };
    let mut configs: Vec<(Vec<usize>, Vec<usize>)> = [0.25, 0.5, 1.0]
        .into_iter()
        .filter(|&s| s * lx > 1.0 && s * ly > 1.0)
        .map(|s| (keep(xa, s * lx), keep(ya, s * ly)))
        .collect();
    if configs.is_empty() {
        configs.push((keep(xa, lx), keep(ya, ly)));
    }
    let levels = configs.len();
    let all_x: Vec<usize> = (0..xa.len()).collect();
    let all_y: Vec<usize> = (0..ya.len()).collect();
    configs.push((decimate(&all_x), decimate(&all_y)));
    let values = parallel::map(&configs, |(xs, ys)| nine(envs, xs, ys));
    let (refined, coarse) = values.split_at(levels);
    Ok(CONDITION_NAMES
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let refinement: Vec<f64> = refined.iter().map(|v| v[c]).collect();
            let err = richardson_error(*refinement.last().unwrap(), coarse[0][c]);
            FunctionalReport::assemble(name, refinement, err, None)
        })
        .collect())
}
