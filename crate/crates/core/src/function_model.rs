//! Sampled and analytic functions on a truncated domain, plus the difference
//! and splitting operators the certificate constructions are built from.
//!
//! The real line is truncated to `[-L, L)` and sampled at `N` equispaced
//! points `x_k = -L + kΔ`, `Δ = 2L/N`. Values outside the sampled range are
//! treated as zero (functions vanish at infinity); off-grid arguments are
//! resolved by linear interpolation.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::parallel;

pub type ComplexMap = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
pub type ComplexMap2 = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;
pub type RealMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Symmetric truncation `[-L, L)` sampled at `N` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain1D {
    half_width: f64,
    n: usize,
}

impl Domain1D {
    pub const MIN_SAMPLES: usize = 16;

    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        if n < Self::MIN_SAMPLES || !n.is_power_of_two() {
            return Err(Error::InvalidDomain(format!(
                "sample count must be a power of two >= {}, got {n}",
                Self::MIN_SAMPLES
            )));
        }
        Ok(Self { half_width, n })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.step()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|k| self.point(k))
    }

    /// Index of `x = 0`.
    pub fn origin_index(&self) -> usize {
        self.n / 2
    }

    /// Positive abscissae `Δ, 2Δ, ..., L`; the last one is the mirror of `x_0 = -L`.
    pub fn positive_abscissae(&self) -> Vec<f64> {
        let h = self.step();
        (1..=self.n / 2).map(|j| j as f64 * h).collect()
    }

    /// Last sampled point, `L - Δ`.
    pub fn right_edge(&self) -> f64 {
        self.point(self.n - 1)
    }

    fn covers(&self, x: f64) -> bool {
        x >= -self.half_width - 1e-12 * self.half_width
            && x <= self.right_edge() + 1e-12 * self.half_width
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parity {
    Even,
    Odd,
    #[default]
    None,
}

/// Which sampled field an operation reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Values,
    Derivative,
}

fn interp_linear(values: &[Complex64], dom: &Domain1D, x: f64) -> Complex64 {
    let pos = (x + dom.half_width) / dom.step();
    if !(pos > -1.0) || !pos.is_finite() {
        return Complex64::new(0.0, 0.0);
    }
    let i = pos.floor();
    let frac = pos - i;
    let n = values.len() as isize;
    let i = i as isize;
    let at = |j: isize| {
        if (0..n).contains(&j) {
            values[j as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    if frac == 0.0 {
        return at(i);
    }
    at(i) * (1.0 - frac) + at(i + 1) * frac
}

/// A uniformly sampled complex function of one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction1D {
    domain: Domain1D,
    values: Vec<Complex64>,
    derivative: Option<Vec<Complex64>>,
    parity: Parity,
    origin_gap: f64,
}

impl GridFunction1D {
    pub fn new(domain: Domain1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}-point domain",
                values.len(),
                domain.len()
            )));
        }
        Ok(Self {
            domain,
            values,
            derivative: None,
            parity: Parity::None,
            origin_gap: 0.0,
        })
    }

    /// Builds a grid function from real samples.
    pub fn from_real(domain: Domain1D, values: &[f64]) -> Result<Self> {
        Self::new(
            domain,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn with_derivative(mut self, derivative: Vec<Complex64>) -> Result<Self> {
        if derivative.len() != self.domain.len() {
            return Err(Error::GridMismatch("derivative length".into()));
        }
        self.derivative = Some(derivative);
        Ok(self)
    }

    /// Fills the derivative by finite differences (see [`finite_difference`]).
    pub fn with_finite_difference_derivative(self) -> Self {
        let d = finite_difference(&self.values, self.domain, self.origin_gap == 0.0);
        Self {
            derivative: Some(d),
            ..self
        }
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    pub fn with_origin_gap(mut self, gap: f64) -> Self {
        self.origin_gap = gap.max(0.0);
        self
    }

    pub fn domain(&self) -> Domain1D {
        self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn derivative(&self) -> Option<&[Complex64]> {
        self.derivative.as_deref()
    }

    pub fn field(&self, field: Field) -> Result<&[Complex64]> {
        match field {
            Field::Values => Ok(&self.values),
            Field::Derivative => self.derivative().ok_or(Error::MissingDerivative),
        }
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn origin_gap(&self) -> f64 {
        self.origin_gap
    }

    /// Linear interpolation of the values; zero outside the sampled range.
    pub fn at(&self, x: f64) -> Complex64 {
        interp_linear(&self.values, &self.domain, x)
    }

    pub fn derivative_at(&self, x: f64) -> Result<Complex64> {
        Ok(interp_linear(
            self.derivative().ok_or(Error::MissingDerivative)?,
            &self.domain,
            x,
        ))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Folds `|field|` onto `|t|`: entry `j` holds `max(|field(t_j)|, |field(-t_j)|)`
    /// at the positive abscissae of [`Domain1D::positive_abscissae`]. The second
    /// element is `|field(0)|`.
    pub fn radial_profile(&self, field: Field) -> Result<(Vec<f64>, Vec<f64>, f64)> {
        let data = self.field(field)?;
        let n = self.domain.len();
        let o = self.domain.origin_index();
        let abscissae = self.domain.positive_abscissae();
        let mags = (1..=n / 2)
            .map(|j| {
                let neg = data[o - j].norm();
                if o + j < n {
                    neg.max(data[o + j].norm())
                } else {
                    neg
                }
            })
            .collect();
        Ok((abscissae, mags, data[o].norm()))
    }

    /// `|field|` on the positive half-line only (entries at `Δ, ..., L - Δ`).
    pub fn positive_side(&self, field: Field) -> Result<(Vec<f64>, Vec<f64>)> {
        let data = self.field(field)?;
        let o = self.domain.origin_index();
        let h = self.domain.step();
        let n = self.domain.len();
        Ok(((o + 1)..n)
            .map(|k| ((k - o) as f64 * h, data[k].norm()))
            .unzip())
    }

    /// Raw positive-side samples of `field` at `Δ, ..., L - Δ`.
    pub fn positive_samples(&self, field: Field) -> Result<(Vec<f64>, Vec<Complex64>)> {
        let data = self.field(field)?;
        let o = self.domain.origin_index();
        let h = self.domain.step();
        Ok(((o + 1)..self.domain.len())
            .map(|k| ((k - o) as f64 * h, data[k]))
            .unzip())
    }
}

/// Central differences in the interior, one-sided at the ends. When
/// `one_sided_origin` is set the origin sample uses a forward difference, so no
/// stencil straddles `x = 0`.
pub fn finite_difference(
    values: &[Complex64],
    dom: Domain1D,
    one_sided_origin: bool,
) -> Vec<Complex64> {
    let n = values.len();
    let h = dom.step();
    let o = dom.origin_index();
    (0..n)
        .map(|k| {
            if k == 0 {
                (values[1] - values[0]) / h
            } else if k == n - 1 {
                (values[n - 1] - values[n - 2]) / h
            } else if k == o && one_sided_origin {
                (values[k + 1] - values[k]) / h
            } else {
                (values[k + 1] - values[k - 1]) / (2.0 * h)
            }
        })
        .collect()
}

/// A closed-form complex function of one real variable.
#[derive(Clone)]
pub struct AnalyticFunction {
    label: String,
    evaluate: ComplexMap,
    derivative: Option<ComplexMap>,
    tail_exponents: Option<(f64, f64)>,
    origin_gap: f64,
    parity: Parity,
    phase_rate: Option<RealMap>,
}

impl fmt::Debug for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFunction")
            .field("label", &self.label)
            .field("has_derivative", &self.derivative.is_some())
            .field("tail_exponents", &self.tail_exponents)
            .field("origin_gap", &self.origin_gap)
            .field("parity", &self.parity)
            .finish()
    }
}

impl AnalyticFunction {
    pub fn new(
        label: impl Into<String>,
        evaluate: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            evaluate: Arc::new(evaluate),
            derivative: None,
            tail_exponents: None,
            origin_gap: 0.0,
            parity: Parity::None,
            phase_rate: None,
        }
    }

    /// Real-valued convenience constructor.
    pub fn real(
        label: impl Into<String>,
        evaluate: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(label, move |t| Complex64::new(evaluate(t), 0.0))
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn with_real_derivative(self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.with_derivative(move |t| Complex64::new(d(t), 0.0))
    }

    /// Declares `f = O(|t|^{-alpha})` and `f' = O(|t|^{-beta})` at infinity.
    pub fn with_tail_exponents(mut self, alpha: f64, beta: f64) -> Self {
        self.tail_exponents = Some((alpha, beta));
        self
    }

    pub fn with_origin_gap(mut self, gap: f64) -> Self {
        self.origin_gap = gap.max(0.0);
        self
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    /// Local angular frequency `|φ'(t)|` of an oscillating phase, used for resolution gating.
    pub fn with_phase_rate(mut self, rate: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.phase_rate = Some(Arc::new(rate));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        (self.evaluate)(t)
    }

    pub fn eval_derivative(&self, t: f64) -> Option<Complex64> {
        self.derivative.as_ref().map(|d| d(t))
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn tail_exponents(&self) -> Option<(f64, f64)> {
        self.tail_exponents
    }

    pub fn origin_gap(&self) -> f64 {
        self.origin_gap
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_oscillatory(&self) -> bool {
        self.phase_rate.is_some()
    }

    pub fn phase_rate(&self, t: f64) -> Option<f64> {
        self.phase_rate.as_ref().map(|r| r(t.abs()))
    }

    /// Smallest power-of-two sample count giving at least `per_period` samples
    /// per local oscillation period at `|t| = half_width`.
    pub fn samples_for_resolution(&self, half_width: f64, per_period: f64) -> usize {
        let Some(rate) = self.phase_rate(half_width) else {
            return Domain1D::MIN_SAMPLES;
        };
        if rate <= 0.0 {
            return Domain1D::MIN_SAMPLES;
        }
        // Δ <= 2π / (per_period · rate)
        let needed = 2.0 * half_width * per_period * rate / (2.0 * PI);
        (needed.ceil() as usize)
            .next_power_of_two()
            .max(Domain1D::MIN_SAMPLES)
    }

    /// Largest relative discrepancy between the stored derivative and central
    /// differences of `evaluate` at `probes`. `None` without a stored derivative.
    pub fn derivative_mismatch(&self, probes: &[f64]) -> Option<f64> {
        let d = self.derivative.as_ref()?;
        let worst = probes
            .iter()
            .map(|&t| {
                let rate = self.phase_rate(t).unwrap_or(0.0).max(1e-300);
                let scale = t.abs().max(1.0).min(1.0 / rate);
                let h = 1e-3 * scale;
                // five-point stencil
                let fd = (self.eval(t - 2.0 * h) - self.eval(t + 2.0 * h)
                    + (self.eval(t + h) - self.eval(t - h)) * 8.0)
                    / (12.0 * h);
                let exact = d(t);
                (fd - exact).norm() / exact.norm().max(1e-12)
            })
            .fold(0.0, f64::max);
        Some(worst)
    }
}

/// A closed-form complex function of two real variables with optional partials.
#[derive(Clone)]
pub struct AnalyticFunction2D {
    label: String,
    evaluate: ComplexMap2,
    dx: Option<ComplexMap2>,
    dy: Option<ComplexMap2>,
    dxy: Option<ComplexMap2>,
}

impl fmt::Debug for AnalyticFunction2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFunction2D")
            .field("label", &self.label)
            .field("dx", &self.dx.is_some())
            .field("dy", &self.dy.is_some())
            .field("dxy", &self.dxy.is_some())
            .finish()
    }
}

impl AnalyticFunction2D {
    pub fn new(
        label: impl Into<String>,
        evaluate: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            evaluate: Arc::new(evaluate),
            dx: None,
            dy: None,
            dxy: None,
        }
    }

    pub fn with_partials(
        mut self,
        dx: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
        dy: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
        dxy: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        self.dx = Some(Arc::new(dx));
        self.dy = Some(Arc::new(dy));
        self.dxy = Some(Arc::new(dxy));
        self
    }

    /// Separable product `f(x) g(y)`; partials follow from the factors' derivatives.
    pub fn tensor(fx: &AnalyticFunction, fy: &AnalyticFunction) -> Self {
        let label = format!("{} x {}", fx.label(), fy.label());
        let (a, b) = (fx.clone(), fy.clone());
        let mut out = Self::new(label, move |x, y| a.eval(x) * b.eval(y));
        if fx.has_derivative() && fy.has_derivative() {
            let (a1, b1) = (fx.clone(), fy.clone());
            let (a2, b2) = (fx.clone(), fy.clone());
            let (a3, b3) = (fx.clone(), fy.clone());
            out = out.with_partials(
                move |x, y| a1.eval_derivative(x).unwrap() * b1.eval(y),
                move |x, y| a2.eval(x) * b2.eval_derivative(y).unwrap(),
                move |x, y| a3.eval_derivative(x).unwrap() * b3.eval_derivative(y).unwrap(),
            );
        }
        out
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        (self.evaluate)(x, y)
    }
}

/// Samples `f` on `dom`. Inside the origin gap the values are exactly zero;
/// the derivative comes from `f` when available, else from finite differences.
pub fn sample(f: &AnalyticFunction, dom: Domain1D) -> Result<GridFunction1D> {
    let gap = f.origin_gap();
    let eval_at = |x: f64| {
        if x.abs() < gap {
            Complex64::new(0.0, 0.0)
        } else {
            f.eval(x)
        }
    };
    let values = parallel::map_range(dom.len(), |k| eval_at(dom.point(k)));
    if let Some(k) = values
        .iter()
        .position(|v| !(v.re.is_finite() && v.im.is_finite()))
    {
        return Err(Error::NonFiniteSample { x: dom.point(k) });
    }
    let grid = GridFunction1D::new(dom, values)?
        .with_parity(f.parity())
        .with_origin_gap(gap);
    if !f.has_derivative() {
        return Ok(grid.with_finite_difference_derivative());
    }
    let fd = finite_difference(grid.values(), dom, gap == 0.0);
    let derivative: Vec<Complex64> = parallel::map_range(dom.len(), |k| {
        let x = dom.point(k);
        if x.abs() < gap {
            return Complex64::new(0.0, 0.0);
        }
        let d = f.eval_derivative(x).unwrap();
        if d.re.is_finite() && d.im.is_finite() {
            d
        } else {
            fd[k]
        }
    });
    grid.with_derivative(derivative)
}

/// A uniformly sampled complex function of two variables, stored row-major
/// with the `x` index outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction2D {
    x: Domain1D,
    y: Domain1D,
    values: Vec<Complex64>,
    dx: Option<Vec<Complex64>>,
    dy: Option<Vec<Complex64>>,
    dxy: Option<Vec<Complex64>>,
}

impl GridFunction2D {
    pub fn new(x: Domain1D, y: Domain1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != x.len() * y.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                x.len(),
                y.len()
            )));
        }
        Ok(Self {
            x,
            y,
            values,
            dx: None,
            dy: None,
            dxy: None,
        })
    }

    pub fn with_partials(
        mut self,
        dx: Option<Vec<Complex64>>,
        dy: Option<Vec<Complex64>>,
        dxy: Option<Vec<Complex64>>,
    ) -> Result<Self> {
        let n = self.values.len();
        for p in [&dx, &dy, &dxy].into_iter().flatten() {
            if p.len() != n {
                return Err(Error::GridMismatch("partial derivative shape".into()));
            }
        }
        self.dx = dx;
        self.dy = dy;
        self.dxy = dxy;
        Ok(self)
    }

    pub fn domains(&self) -> (Domain1D, Domain1D) {
        (self.x, self.y)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.y.len() + j
    }

    /// The stored array for `D^ζ f`, with `ζ = [order in x, order in y]`.
    pub fn partial(&self, zeta: [u8; 2]) -> Result<&[Complex64]> {
        match zeta {
            [0, 0] => Ok(&self.values),
            [1, 0] => self.dx.as_deref().ok_or(Error::MissingPartial("df/dx")),
            [0, 1] => self.dy.as_deref().ok_or(Error::MissingPartial("df/dy")),
            [1, 1] => self.dxy.as_deref().ok_or(Error::MissingPartial("d2f/dxdy")),
            _ => Err(Error::BadIndex { eta: [0, 0], zeta }),
        }
    }

    /// Bilinear interpolation; zero outside the sampled rectangle.
    pub fn at(&self, x: f64, y: f64) -> Complex64 {
        let px = (x + self.x.half_width()) / self.x.step();
        let py = (y + self.y.half_width()) / self.y.step();
        if !(px > -1.0 && py > -1.0) {
            return Complex64::new(0.0, 0.0);
        }
        let (i, fx) = (px.floor(), px - px.floor());
        let (j, fy) = (py.floor(), py - py.floor());
        let (nx, ny) = (self.x.len() as isize, self.y.len() as isize);
        let at = |a: isize, b: isize| {
            if (0..nx).contains(&a) && (0..ny).contains(&b) {
                self.values[a as usize * ny as usize + b as usize]
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        let (i, j) = (i as isize, j as isize);
        let mut acc = at(i, j) * ((1.0 - fx) * (1.0 - fy));
        if fx != 0.0 {
            acc += at(i + 1, j) * (fx * (1.0 - fy));
        }
        if fy != 0.0 {
            acc += at(i, j + 1) * ((1.0 - fx) * fy);
        }
        if fx != 0.0 && fy != 0.0 {
            acc += at(i + 1, j + 1) * (fx * fy);
        }
        acc
    }

    fn covers(&self, x: f64, y: f64) -> bool {
        self.x.covers(x) && self.y.covers(y)
    }
}

/// Samples a two-variable function; missing partials are filled by central differences.
pub fn sample_2d(f: &AnalyticFunction2D, x: Domain1D, y: Domain1D) -> Result<GridFunction2D> {
    let (nx, ny) = (x.len(), y.len());
    let grid_of = |g: &ComplexMap2| -> Result<Vec<Complex64>> {
        let rows = parallel::map_range(nx, |i| {
            let xi = x.point(i);
            (0..ny).map(|j| g(xi, y.point(j))).collect::<Vec<_>>()
        });
        let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
        if let Some(k) = flat
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFiniteSample { x: x.point(k / ny) });
        }
        Ok(flat)
    };
    let values = grid_of(&f.evaluate)?;
    let dx = match &f.dx {
        Some(g) => grid_of(g)?,
        None => diff_axis(&values, nx, ny, x.step(), Axis::X),
    };
    let dy = match &f.dy {
        Some(g) => grid_of(g)?,
        None => diff_axis(&values, nx, ny, y.step(), Axis::Y),
    };
    let dxy = match &f.dxy {
        Some(g) => grid_of(g)?,
        None => diff_axis(&dx, nx, ny, y.step(), Axis::Y),
    };
    GridFunction2D::new(x, y, values)?.with_partials(Some(dx), Some(dy), Some(dxy))
}

#[derive(Clone, Copy)]
enum Axis {
    X,
    Y,
}

fn diff_axis(v: &[Complex64], nx: usize, ny: usize, h: f64, axis: Axis) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for i in 0..nx {
        for j in 0..ny {
            let (len, k, get): (usize, usize, Box<dyn Fn(usize) -> Complex64>) = match axis {
                Axis::X => (nx, i, Box::new(|a| v[a * ny + j])),
                Axis::Y => (ny, j, Box::new(|b| v[i * ny + b])),
            };
            out[i * ny + j] = if k == 0 {
                (get(1) - get(0)) / h
            } else if k == len - 1 {
                (get(len - 1) - get(len - 2)) / h
            } else {
                (get(k + 1) - get(k - 1)) / (2.0 * h)
            };
        }
    }
    out
}

/// How a difference stencil treats arguments outside the sampled range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Padding {
    Zero,
    Reject,
}

/// Result of a mixed difference; `zero_padded` flags stencils that left the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Difference {
    pub value: Complex64,
    pub zero_padded: bool,
}

/// The symmetric mixed difference `(∏_j Δ_{u_j}) f(x)` with
/// `Δ_{u_j} f(x) = f(x + u_j e_j) - f(x - u_j e_j)`.
pub trait MixedDifference {
    fn mixed_difference(&self, step: &[f64], at: &[f64], padding: Padding) -> Result<Difference>;
}

fn check_steps(step: &[f64], at: &[f64], dims: usize) -> Result<()> {
    if step.len() != dims || at.len() != dims {
        return Err(Error::GridMismatch(format!(
            "expected {dims}-dimensional step and point"
        )));
    }
    if step.iter().any(|&h| h == 0.0 || !h.is_finite()) {
        return Err(Error::DegenerateStep(step.to_vec()));
    }
    Ok(())
}

impl MixedDifference for GridFunction1D {
    fn mixed_difference(&self, step: &[f64], at: &[f64], padding: Padding) -> Result<Difference> {
        check_steps(step, at, 1)?;
        let (h, x) = (step[0], at[0]);
        let inside = self.domain.covers(x + h) && self.domain.covers(x - h);
        if !inside && padding == Padding::Reject {
            return Err(Error::StepOutOfDomain {
                step: step.to_vec(),
                at: at.to_vec(),
            });
        }
        Ok(Difference {
            value: self.at(x + h) - self.at(x - h),
            zero_padded: !inside,
        })
    }
}

impl MixedDifference for GridFunction2D {
    fn mixed_difference(&self, step: &[f64], at: &[f64], padding: Padding) -> Result<Difference> {
        check_steps(step, at, 2)?;
        let (h1, h2) = (step[0], step[1]);
        let (x, y) = (at[0], at[1]);
        let inside = self.covers(x + h1, y + h2) && self.covers(x - h1, y - h2);
        if !inside && padding == Padding::Reject {
            return Err(Error::StepOutOfDomain {
                step: step.to_vec(),
                at: at.to_vec(),
            });
        }
        let value = self.at(x + h1, y + h2) - self.at(x + h1, y - h2) - self.at(x - h1, y + h2)
            + self.at(x - h1, y - h2);
        Ok(Difference {
            value,
            zero_padded: !inside,
        })
    }
}

/// Cutoff of the low-frequency piece: 1 on `|t| <= 2π`, `(3 - |t|/π)_+` beyond.
pub fn split_weight(t: f64) -> f64 {
    let a = t.abs();
    if a <= 2.0 * PI {
        1.0
    } else {
        (3.0 - a / PI).max(0.0)
    }
}

fn split_weight_slope(t: f64) -> f64 {
    let a = t.abs();
    if a > 2.0 * PI && a < 3.0 * PI {
        -t.signum() / PI
    } else {
        0.0
    }
}

/// Splits the sample `f` into `(phi, psi)` with `phi ≈ w f` and `phi + psi == f`
/// bit for bit. Whichever part is at least `|f|/2` is formed by an exact
/// subtraction (Sterbenz), so `phi` moves by at most one ulp.
fn exact_split(f: f64, w: f64) -> (f64, f64) {
    let phi = f * w;
    if w >= 0.5 {
        (phi, f - phi)
    } else {
        let psi = f - phi;
        (f - psi, psi)
    }
}

/// Splits `f = phi + psi` with `phi` supported in `|t| < 3π` and `psi` vanishing on `|t| <= 2π`.
pub fn split_phi_psi(f: &GridFunction1D) -> Result<(GridFunction1D, GridFunction1D)> {
    let dom = f.domain();
    if dom.half_width() <= 3.0 * PI {
        return Err(Error::DomainTooSmall(format!(
            "splitting needs L > 3π, got L = {}",
            dom.half_width()
        )));
    }
    let n = dom.len();
    let mut phi = Vec::with_capacity(n);
    let mut psi = Vec::with_capacity(n);
    for (k, &v) in f.values().iter().enumerate() {
        let w = split_weight(dom.point(k));
        let (pr, qr) = exact_split(v.re, w);
        let (pi, qi) = exact_split(v.im, w);
        phi.push(Complex64::new(pr, pi));
        psi.push(Complex64::new(qr, qi));
    }
    let mut phi_g = GridFunction1D::new(dom, phi)?
        .with_parity(f.parity())
        .with_origin_gap(f.origin_gap());
    let mut psi_g = GridFunction1D::new(dom, psi)?
        .with_parity(f.parity())
        .with_origin_gap(f.origin_gap().max(2.0 * PI));
    if let Some(d) = f.derivative() {
        let dphi: Vec<Complex64> = (0..n)
            .map(|k| {
                let t = dom.point(k);
                d[k] * split_weight(t) + f.values()[k] * split_weight_slope(t)
            })
            .collect();
        let dpsi: Vec<Complex64> = (0..n).map(|k| d[k] - dphi[k]).collect();
        phi_g = phi_g.with_derivative(dphi)?;
        psi_g = psi_g.with_derivative(dpsi)?;
    }
    Ok((phi_g, psi_g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian() -> AnalyticFunction {
        AnalyticFunction::real("gaussian", |t| (-t * t / 2.0).exp())
            .with_real_derivative(|t| -t * (-t * t / 2.0).exp())
            .with_parity(Parity::Even)
    }

    #[test]
    fn domain_validation() {
        assert!(Domain1D::new(8.0, 64).is_ok());
        assert!(Domain1D::new(8.0, 8).is_err());
        assert!(Domain1D::new(8.0, 100).is_err());
        assert!(Domain1D::new(-1.0, 64).is_err());
        let d = Domain1D::new(8.0, 64).unwrap();
        assert_eq!(d.step(), 0.25);
        assert_eq!(d.point(0), -8.0);
        assert_eq!(d.point(d.origin_index()), 0.0);
        let pa = d.positive_abscissae();
        assert_eq!(pa.len(), 32);
        assert_eq!(*pa.last().unwrap(), 8.0);
    }

    #[test]
    fn sample_gaussian_peaks_at_origin() {
        let d = Domain1D::new(8.0, 64).unwrap();
        let g = sample(&gaussian(), d).unwrap();
        for (k, v) in g.values().iter().enumerate() {
            let x = d.point(k);
            assert_eq!(v.re, (-x * x / 2.0).exp());
        }
        let kmax = (0..64)
            .max_by(|&a, &b| g.values()[a].re.partial_cmp(&g.values()[b].re).unwrap())
            .unwrap();
        assert_eq!(kmax, 32);
    }

    #[test]
    fn sample_odd_function_is_antisymmetric() {
        let f = AnalyticFunction::real("odd", |t| t * (-t.abs()).exp());
        let d = Domain1D::new(5.0, 128).unwrap();
        let g = sample(&f, d).unwrap();
        let o = d.origin_index();
        for j in 1..o {
            assert_eq!(g.values()[o + j], -g.values()[o - j]);
        }
    }

    #[test]
    fn origin_gap_zeroes_the_center() {
        let f = AnalyticFunction::real("chirp", |t: f64| {
            t.abs().powf(-2.0) * (t.abs().powi(3)).sin()
        })
        .with_origin_gap(1.0);
        let d = Domain1D::new(16.0, 256).unwrap();
        let g = sample(&f, d).unwrap();
        for (k, v) in g.values().iter().enumerate() {
            if d.point(k).abs() < 1.0 {
                assert_eq!(*v, Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn non_finite_sample_is_reported() {
        let f = AnalyticFunction::real("pole", |t: f64| 1.0 / t);
        let d = Domain1D::new(4.0, 32).unwrap();
        match sample(&f, d) {
            Err(Error::NonFiniteSample { x }) => assert_eq!(x, 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mixed_difference_examples() {
        let f = AnalyticFunction2D::new("xy", |x, y| Complex64::new(x * y, 0.0));
        let d = Domain1D::new(4.0, 32).unwrap();
        let g = sample_2d(&f, d, d).unwrap();
        let r = g
            .mixed_difference(&[1.0, 1.0], &[0.0, 0.0], Padding::Reject)
            .unwrap();
        assert_relative_eq!(r.value.re, 4.0, epsilon = 1e-12);
        assert!(!r.zero_padded);
        // off-grid stencil: bilinear interpolation is exact for xy
        let r = g
            .mixed_difference(&[0.3, 0.7], &[0.1, -0.2], Padding::Reject)
            .unwrap();
        assert_relative_eq!(r.value.re, 4.0 * 0.3 * 0.7, epsilon = 1e-12);
        assert!(matches!(
            g.mixed_difference(&[0.0, 1.0], &[0.0, 0.0], Padding::Zero),
            Err(Error::DegenerateStep(_))
        ));
        assert!(matches!(
            g.mixed_difference(&[3.0, 3.0], &[2.0, 0.0], Padding::Reject),
            Err(Error::StepOutOfDomain { .. })
        ));
        assert!(
            g.mixed_difference(&[3.0, 3.0], &[2.0, 0.0], Padding::Zero)
                .unwrap()
                .zero_padded
        );

        let sq = AnalyticFunction::real("t^2", |t| t * t);
        let s = sample(&sq, d).unwrap();
        let r = s
            .mixed_difference(&[0.75], &[0.0], Padding::Reject)
            .unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn split_examples() {
        let f = AnalyticFunction::real("exp", |t: f64| (-t.abs()).exp());
        // step 2π/64 puts π, 2.5π and 4π on the grid
        let d = Domain1D::new(8.0 * PI, 256).unwrap();
        let g = sample(&f, d).unwrap();
        let (phi, psi) = split_phi_psi(&g).unwrap();
        let idx = |t: f64| ((t + d.half_width()) / d.step()).round() as usize;
        let k = idx(PI);
        assert_eq!(phi.values()[k], g.values()[k]);
        assert_eq!(psi.values()[k].re, 0.0);
        let k = idx(4.0 * PI);
        assert_eq!(phi.values()[k].re, 0.0);
        assert_eq!(psi.values()[k], g.values()[k]);
        let k = idx(2.5 * PI);
        assert_relative_eq!(
            phi.values()[k].re,
            0.5 * (-2.5 * PI).exp(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            psi.values()[k].re,
            0.5 * (-2.5 * PI).exp(),
            max_relative = 1e-12
        );
        for k in 0..d.len() {
            assert_eq!(phi.values()[k] + psi.values()[k], g.values()[k]);
        }
        let small = Domain1D::new(3.0 * PI, 64).unwrap();
        let g = sample(&f, small).unwrap();
        assert!(matches!(split_phi_psi(&g), Err(Error::DomainTooSmall(_))));
    }

    #[test]
    fn analytic_derivative_matches_finite_differences() {
        let probes: Vec<f64> = (1..40).map(|i| -4.0 + 0.2 * i as f64).collect();
        assert!(gaussian().derivative_mismatch(&probes).unwrap() < 1e-4);
    }

    #[test]
    fn sampled_derivative_close_to_analytic() {
        let d = Domain1D::new(16.0, 1 << 12).unwrap();
        let exact = sample(&gaussian(), d).unwrap();
        let fd = exact.clone().with_finite_difference_derivative();
        let (a, b) = (exact.derivative().unwrap(), fd.derivative().unwrap());
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = a.iter().map(|x| x.norm_sqr()).sum();
        assert!((num / den).sqrt() < 1e-3);
    }

    #[test]
    fn resolution_requirement_scales_with_rate() {
        let f = AnalyticFunction::real("chirp", |t| (t * t).sin()).with_phase_rate(|t| 2.0 * t);
        let n64 = f.samples_for_resolution(64.0, 8.0);
        let n128 = f.samples_for_resolution(128.0, 8.0);
        assert!(n64 >= 20860 && n64.is_power_of_two());
        assert!(n128 >= 4 * 20860 / 2);
        assert_eq!(
            gaussian().samples_for_resolution(64.0, 8.0),
            Domain1D::MIN_SAMPLES
        );
    }
}
