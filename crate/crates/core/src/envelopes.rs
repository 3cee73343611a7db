//! Monotone majorants of sampled magnitudes.
//!
//! Essential suprema are approximated by sample maxima on the grid's own
//! positive abscissae; nothing is resampled.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function_model::{Field, GridFunction1D, GridFunction2D};
use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Non-increasing: `sup` over `|s| >= t`.
    Tail,
    /// Non-decreasing: `sup` over `0 < |s| <= t`.
    Head,
}

/// A monotone majorant sampled on increasing abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    abscissae: Vec<f64>,
    values: Vec<f64>,
    direction: Direction,
    source: String,
    origin_value: Option<f64>,
}

impl Envelope {
    /// Builds the envelope of raw `magnitudes` at `abscissae` by a running max
    /// (from the outside in for tails, from the inside out for heads).
    pub fn from_samples(
        abscissae: Vec<f64>,
        magnitudes: &[f64],
        direction: Direction,
        source: impl Into<String>,
    ) -> Result<Self> {
        if abscissae.len() != magnitudes.len() || abscissae.is_empty() {
            return Err(Error::EnvelopeGridMismatch);
        }
        if abscissae.windows(2).any(|w| !(w[1] > w[0])) || abscissae[0] < 0.0 {
            return Err(Error::EnvelopeGridMismatch);
        }
        let values = match direction {
            Direction::Tail => suffix_max(magnitudes),
            Direction::Head => prefix_max(magnitudes),
        };
        Ok(Self {
            abscissae,
            values,
            direction,
            source: source.into(),
            origin_value: None,
        })
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// For tails built from a grid function, the sup over all samples including `x = 0`.
    pub fn origin_value(&self) -> Option<f64> {
        self.origin_value
    }

    pub fn last_abscissa(&self) -> f64 {
        *self.abscissae.last().unwrap()
    }

    /// Step evaluation consistent with the sup it stands for. Tails return the
    /// value at the first abscissa `>= t` (constant below the first abscissa,
    /// zero past the last); heads the value at the last abscissa `<= t`.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        match self.direction {
            Direction::Tail => {
                let k = self.abscissae.partition_point(|&a| a < t * (1.0 - 1e-12));
                self.values.get(k).copied().unwrap_or(0.0)
            }
            Direction::Head => {
                let k = self.abscissae.partition_point(|&a| a <= t * (1.0 + 1e-12));
                self.values[k.saturating_sub(1)]
            }
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| match self.direction {
            Direction::Tail => w[1] <= w[0],
            Direction::Head => w[1] >= w[0],
        })
    }

    pub fn expect(&self, direction: Direction) -> Result<()> {
        if self.direction == direction {
            Ok(())
        } else {
            Err(Error::EnvelopeDirectionMismatch {
                expected: direction_name(direction),
                got: direction_name(self.direction),
            })
        }
    }
}

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Tail => "tail",
        Direction::Head => "head",
    }
}

pub fn suffix_max(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    for k in (0..out.len().saturating_sub(1)).rev() {
        out[k] = out[k].max(out[k + 1]);
    }
    out
}

pub fn prefix_max(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    for k in 1..out.len() {
        out[k] = out[k].max(out[k - 1]);
    }
    out
}

fn field_label(field: Field) -> &'static str {
    match field {
        Field::Values => "|f|",
        Field::Derivative => "|f'|",
    }
}

/// `t -> sup_{|s| >= t} |field(s)|` on the positive abscissae `Δ, ..., L`.
pub fn tail_sup(f: &GridFunction1D, field: Field) -> Result<Envelope> {
    tail_sup_within(f, field, f.domain().half_width())
}

/// Like [`tail_sup`] for the function truncated to `|t| <= limit`.
pub fn tail_sup_within(f: &GridFunction1D, field: Field, limit: f64) -> Result<Envelope> {
    let (abscissae, mags, at_origin) = f.radial_profile(field)?;
    let keep = abscissae
        .partition_point(|&a| a <= limit * (1.0 + 1e-12))
        .max(1);
    let mut env = Envelope::from_samples(
        abscissae[..keep].to_vec(),
        &mags[..keep],
        Direction::Tail,
        format!("tail sup {}", field_label(field)),
    )?;
    env.origin_value = Some(at_origin.max(env.values[0]));
    Ok(env)
}

/// `t -> sup_{0 < |s| <= t} |f'(s)|`; the origin sample is excluded.
pub fn head_sup(f: &GridFunction1D) -> Result<Envelope> {
    let (abscissae, mags, _) = f.radial_profile(Field::Derivative)?;
    Envelope::from_samples(abscissae, &mags, Direction::Head, "head sup |f'|")
}

/// One-sided majorant of `|field|` over `s > 0` only, at `Δ, ..., L - Δ`.
pub fn one_sided(f: &GridFunction1D, field: Field, direction: Direction) -> Result<Envelope> {
    let (abscissae, mags) = f.positive_side(field)?;
    Envelope::from_samples(
        abscissae,
        &mags,
        direction,
        format!("one-sided {}", field_label(field)),
    )
}

/// A coordinatewise majorant on the positive quadrant, stored with the `x`
/// index outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope2D {
    x: Vec<f64>,
    y: Vec<f64>,
    values: Vec<f64>,
    eta: [u8; 2],
    zeta: [u8; 2],
}

impl Envelope2D {
    pub fn x_abscissae(&self) -> &[f64] {
        &self.x
    }

    pub fn y_abscissae(&self) -> &[f64] {
        &self.y
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.y.len() + j]
    }

    pub fn indices(&self) -> ([u8; 2], [u8; 2]) {
        (self.eta, self.zeta)
    }

    /// Step evaluation in the tail sense along each coordinate.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let locate = |axis: &[f64], t: f64| axis.partition_point(|&a| a < t.abs() * (1.0 - 1e-12));
        let (i, j) = (locate(&self.x, x), locate(&self.y, y));
        if i >= self.x.len() || j >= self.y.len() {
            return 0.0;
        }
        self.value(i, j)
    }

    /// Non-increasing in every swept coordinate.
    pub fn is_monotone(&self) -> bool {
        let swept = [self.eta[0] | self.zeta[0], self.eta[1] | self.zeta[1]];
        let (nx, ny) = (self.x.len(), self.y.len());
        for i in 0..nx {
            for j in 0..ny {
                let v = self.value(i, j);
                if swept[0] == 1 && i + 1 < nx && self.value(i + 1, j) > v {
                    return false;
                }
                if swept[1] == 1 && j + 1 < ny && self.value(i, j + 1) > v {
                    return false;
                }
            }
        }
        true
    }
}

/// `f_{η,ζ}(x, y)`: the sup of `|D^ζ f|` over `|u_i| >= |x_i|` for every
/// coordinate in the support of `η + ζ`, on positive abscissae `Δ, ..., L`.
/// Coordinates outside that support are only folded over `±x_i`.
pub fn mixed_envelope_2d(f: &GridFunction2D, eta: [u8; 2], zeta: [u8; 2]) -> Result<Envelope2D> {
    let (dx, dy) = f.domains();
    mixed_envelope_2d_within(f, eta, zeta, dx.half_width(), dy.half_width())
}

/// [`mixed_envelope_2d`] for `f` truncated to `|x| <= lx`, `|y| <= ly`.
pub fn mixed_envelope_2d_within(
    f: &GridFunction2D,
    eta: [u8; 2],
    zeta: [u8; 2],
    lx: f64,
    ly: f64,
) -> Result<Envelope2D> {
    let bad = (0..2).any(|i| eta[i] > 1 || zeta[i] > 1 || (eta[i] & zeta[i]) == 1);
    if bad {
        return Err(Error::BadIndex { eta, zeta });
    }
    let data = f.partial(zeta)?;
    let (dx, dy) = f.domains();
    let (nx, ny) = (dx.len(), dy.len());
    let (ox, oy) = (dx.origin_index(), dy.origin_index());
    let xa = dx.positive_abscissae();
    let ya = dy.positive_abscissae();
    let kx = xa.partition_point(|&a| a <= lx * (1.0 + 1e-12)).max(1);
    let ky = ya.partition_point(|&a| a <= ly * (1.0 + 1e-12)).max(1);

    let mirrored = |o: usize, j: usize, n: usize| -> [Option<usize>; 2] {
        [Some(o - j), if o + j < n { Some(o + j) } else { None }]
    };
    let rows: Vec<Vec<f64>> = parallel::map_range(kx, |a| {
        let is = mirrored(ox, a + 1, nx);
        (0..ky)
            .map(|b| {
                let js = mirrored(oy, b + 1, ny);
                let mut m = 0.0f64;
                for i in is.iter().flatten() {
                    for j in js.iter().flatten() {
                        m = m.max(data[i * ny + j].norm());
                    }
                }
                m
            })
            .collect()
    });
    let mut values: Vec<f64> = rows.into_iter().flatten().collect();
    if (eta[1] | zeta[1]) == 1 {
        for row in values.chunks_mut(ky) {
            let s = suffix_max(row);
            row.copy_from_slice(&s);
        }
    }
    if (eta[0] | zeta[0]) == 1 {
        for i in (0..kx.saturating_sub(1)).rev() {
            for j in 0..ky {
                let below = values[(i + 1) * ky + j];
                let v = &mut values[i * ky + j];
                *v = v.max(below);
            }
        }
    }
    Ok(Envelope2D {
        x: xa[..kx].to_vec(),
        y: ya[..ky].to_vec(),
        values,
        eta,
        zeta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_model::{
        sample, sample_2d, AnalyticFunction, AnalyticFunction2D, Domain1D,
    };
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn running_max_examples() {
        let e = Envelope::from_samples(vec![0.0, 1.0, 2.0], &[1.0, 3.0, 2.0], Direction::Tail, "t")
            .unwrap();
        assert_eq!(e.values(), &[3.0, 3.0, 2.0]);
        let e = Envelope::from_samples(vec![0.5, 1.0, 2.0], &[5.0, 1.0, 2.0], Direction::Head, "h")
            .unwrap();
        assert_eq!(e.values(), &[5.0, 5.0, 5.0]);
        assert!(Envelope::from_samples(vec![1.0, 1.0], &[1.0, 1.0], Direction::Tail, "x").is_err());
    }

    #[test]
    fn monotone_function_is_its_own_tail() {
        let f = AnalyticFunction::real("exp", |t: f64| (-t.abs()).exp());
        let d = Domain1D::new(10.0, 256).unwrap();
        let g = sample(&f, d).unwrap();
        let e = tail_sup(&g, Field::Values).unwrap();
        for (t, v) in e.abscissae().iter().zip(e.values()) {
            // the L abscissa mirrors x = -L exactly
            assert_relative_eq!(*v, (-t).exp(), max_relative = 1e-12);
        }
        assert_eq!(e.origin_value(), Some(1.0));
    }

    #[test]
    fn damped_sine_origin_value_is_global_max() {
        let f = AnalyticFunction::real("dsin", |t: f64| t.sin() * (-t.abs() / 10.0).exp());
        let d = Domain1D::new(40.0, 4096).unwrap();
        let g = sample(&f, d).unwrap();
        let e = tail_sup(&g, Field::Values).unwrap();
        let brute = g.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert_eq!(e.origin_value().unwrap(), brute);
        assert_eq!(e.values()[0], brute);
        // frozen from an independent numpy scan of the same grid
        assert_relative_eq!(brute, 0.858_895_615_818_724_9, max_relative = 1e-12);
    }

    #[test]
    fn head_of_linear_is_one() {
        let f = AnalyticFunction::real("id", |t| t).with_real_derivative(|_| 1.0);
        let d = Domain1D::new(4.0, 64).unwrap();
        let g = sample(&f, d).unwrap();
        let e = head_sup(&g).unwrap();
        assert!(e.values().iter().all(|&v| v == 1.0));
        assert_eq!(e.eval(0.01), 1.0);
    }

    #[test]
    fn missing_derivative_is_reported() {
        let d = Domain1D::new(4.0, 32).unwrap();
        let g = GridFunction1D::from_real(d, &[0.0; 32]).unwrap();
        assert_eq!(
            tail_sup(&g, Field::Derivative),
            Err(Error::MissingDerivative)
        );
        assert_eq!(head_sup(&g), Err(Error::MissingDerivative));
    }

    #[test]
    fn eval_is_step_consistent() {
        let e = Envelope::from_samples(vec![1.0, 2.0, 3.0], &[3.0, 2.0, 1.0], Direction::Tail, "t")
            .unwrap();
        assert_eq!(e.eval(0.2), 3.0);
        assert_eq!(e.eval(1.5), 2.0);
        assert_eq!(e.eval(2.0), 2.0);
        assert_eq!(e.eval(3.5), 0.0);
        let h = Envelope::from_samples(vec![1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], Direction::Head, "h")
            .unwrap();
        assert_eq!(h.eval(0.5), 1.0);
        assert_eq!(h.eval(2.5), 2.0);
        assert_eq!(h.eval(9.0), 3.0);
        assert!(h.expect(Direction::Tail).is_err());
    }

    fn exp2d() -> AnalyticFunction2D {
        AnalyticFunction2D::new("exp2d", |x: f64, y: f64| {
            Complex64::new((-x.abs() - y.abs()).exp(), 0.0)
        })
        .with_partials(
            |x: f64, y: f64| Complex64::new(-x.signum() * (-x.abs() - y.abs()).exp(), 0.0),
            |x: f64, y: f64| Complex64::new(-y.signum() * (-x.abs() - y.abs()).exp(), 0.0),
            |x: f64, y: f64| {
                Complex64::new(x.signum() * y.signum() * (-x.abs() - y.abs()).exp(), 0.0)
            },
        )
    }

    #[test]
    fn separable_exponential_envelopes() {
        let d = Domain1D::new(6.0, 64).unwrap();
        let g = sample_2d(&exp2d(), d, d).unwrap();
        for zeta in [[0, 0], [1, 1]] {
            let eta = [1 - zeta[0], 1 - zeta[1]];
            let e = mixed_envelope_2d(&g, eta, zeta).unwrap();
            assert!(e.is_monotone());
            for (i, &x) in e.x_abscissae().iter().enumerate() {
                for (j, &y) in e.y_abscissae().iter().enumerate() {
                    assert_relative_eq!(e.value(i, j), (-x - y).exp(), max_relative = 1e-12);
                }
            }
        }
        assert!(matches!(
            mixed_envelope_2d(&g, [1, 0], [1, 0]),
            Err(Error::BadIndex { .. })
        ));
    }

    #[test]
    fn lorentzian_f10_matches_brute_force() {
        let d = Domain1D::new(8.0, 32).unwrap();
        let lor = AnalyticFunction::real("lor", |t| 1.0 / (1.0 + t * t))
            .with_real_derivative(|t| -2.0 * t / (1.0 + t * t).powi(2));
        let g = sample_2d(&AnalyticFunction2D::tensor(&lor, &lor), d, d).unwrap();
        let e = mixed_envelope_2d(&g, [0, 1], [1, 0]).unwrap();
        let dfx = g.partial([1, 0]).unwrap();
        for (a, &x) in e.x_abscissae().iter().enumerate() {
            for (b, &y) in e.y_abscissae().iter().enumerate() {
                let mut m = 0.0f64;
                for i in 0..32 {
                    for j in 0..32 {
                        if d.point(i).abs() >= x - 1e-12 && d.point(j).abs() >= y - 1e-12 {
                            m = m.max(dfx[i * 32 + j].norm());
                        }
                    }
                }
                assert_eq!(e.value(a, b), m);
            }
        }
        // frozen spot value: sup_{|u|>=1/2} 2u/(1+u^2)^2 = 0.64 at u = 1/2, times 1/(1+0.25)
        let v = e.eval(0.5, 0.5);
        assert_relative_eq!(v, 0.64 * 0.8, max_relative = 1e-12);
    }
}
