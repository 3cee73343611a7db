//! Independent ground truth for Wiener-norm certificates.
//!
//! Convention: `f(y) = ∫ g(x) e^{ixy} dx`, so `g(x) = (1/2π) ∫ f(y) e^{-ixy} dy`
//! and `‖f‖_A = ‖g‖_1`. The given side samples `y_k = -L + kΔ`; the
//! representing side is half-shifted, `x_m = (m - N/2 + 1/2) Δx` with
//! `Δx Δ N = 2π`, so no sample sits at `x = 0`. All `2π` bookkeeping lives in
//! this module.

mod hilbert;
mod norm;
mod riesz;
mod ttransform;

pub use hilbert::{hilbert_conjugate, Conjugate};
pub use norm::{
    classify_ladder, shell_extrapolation, validate_ladder, wiener_norm, wiener_norm_2d,
    Extrapolation, LadderOptions, NormEstimate, NormVerdict, Rung,
};
pub use riesz::{riesz_factorize, RieszCheck};
pub use ttransform::{t_transform, t_transform_2d, HalfLine};

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::function_model::{Domain1D, GridFunction1D, GridFunction2D};
use crate::parallel;

/// Edge magnitude (relative to the maximum) above which a warning is attached.
pub const EDGE_WARN: f64 = 1e-3;
/// Edge magnitude above which a rung is unusable.
pub const EDGE_FAIL: f64 = 1e-1;

/// Spacing of the representing grid reciprocal to `dom`.
pub fn representing_step(dom: Domain1D) -> f64 {
    2.0 * PI / (dom.len() as f64 * dom.step())
}

/// `x_m` on the half-shifted representing grid.
pub fn representing_point(dom: Domain1D, m: usize) -> f64 {
    (m as f64 - (dom.len() / 2) as f64 + 0.5) * representing_step(dom)
}

/// Positive-definite taper `exp(-(y / (L/4))^2 / 2)` applied before transforming on `[-L, L)`.
pub fn taper(y: f64, half_width: f64) -> f64 {
    let s = y / (0.25 * half_width);
    (-0.5 * s * s).exp()
}

/// Discrete transform pair. Sums are the periodic trapezoid rule: the
/// endpoint pair `y = ±L` shares the single sample at `-L`.
struct Kernel {
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
    pre: Vec<Complex64>,
    post: Vec<Complex64>,
}

impl Kernel {
    fn new(dom: Domain1D) -> Self {
        let n = dom.len();
        let mut planner = FftPlanner::new();
        let l = dom.half_width();
        let pre = (0..n)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::from_polar(sign, -PI * k as f64 / n as f64)
            })
            .collect();
        let scale = dom.step() / (2.0 * PI);
        let post = (0..n)
            .map(|m| Complex64::from_polar(scale, representing_point(dom, m) * l))
            .collect();
        Self {
            fft_fwd: planner.plan_fft_forward(n),
            fft_inv: planner.plan_fft_inverse(n),
            pre,
            post,
        }
    }

    /// In place: samples of `f` on the given grid -> samples of `g` on the representing grid.
    fn analyze(&self, data: &mut [Complex64]) {
        for (v, p) in data.iter_mut().zip(&self.pre) {
            *v *= p;
        }
        self.fft_fwd.process(data);
        for (v, p) in data.iter_mut().zip(&self.post) {
            *v *= p;
        }
    }

    /// In place: samples of `g` -> `f(y_k) = Σ_m g_m e^{i x_m y_k} Δx`.
    fn synthesize(&self, data: &mut [Complex64], dx: f64, step: f64) {
        let to_unit = 2.0 * PI / step;
        for (v, p) in data.iter_mut().zip(&self.post) {
            // undo the analysis scale, keep the conjugate phase
            *v *= p.conj() * to_unit;
        }
        self.fft_inv.process(data);
        for (v, p) in data.iter_mut().zip(&self.pre) {
            *v *= p.conj() * dx;
        }
    }
}

/// A given-side function and its representing density on reciprocal grids.
#[derive(Debug, Clone)]
pub struct SpectralPair {
    f: GridFunction1D,
    g: Vec<Complex64>,
    plancherel: f64,
    edge_ratio: f64,
}

impl SpectralPair {
    pub fn f(&self) -> &GridFunction1D {
        &self.f
    }

    pub fn g(&self) -> &[Complex64] {
        &self.g
    }

    pub fn x_step(&self) -> f64 {
        representing_step(self.f.domain())
    }

    pub fn x_point(&self, m: usize) -> f64 {
        representing_point(self.f.domain(), m)
    }

    /// `‖g‖_1` by the trapezoid (plain sum) rule on the representing grid.
    pub fn g_l1(&self) -> f64 {
        l1(&self.g, self.x_step())
    }

    /// `|‖f‖_2^2 - 2π‖g‖_2^2| / ‖f‖_2^2`.
    pub fn plancherel_discrepancy(&self) -> f64 {
        self.plancherel
    }

    /// Largest edge magnitude relative to `max |f|`.
    pub fn edge_ratio(&self) -> f64 {
        self.edge_ratio
    }

    pub fn edge_warning(&self) -> bool {
        self.edge_ratio > EDGE_WARN
    }

    /// Transforms `g` back to the given grid.
    pub fn synthesize(&self, g: &[Complex64]) -> Result<Vec<Complex64>> {
        synthesize(g, self.f.domain())
    }
}

pub(crate) fn l1(v: &[Complex64], h: f64) -> f64 {
    v.iter().map(|z| z.norm()).sum::<f64>() * h
}

fn l2sq(v: &[Complex64], h: f64) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>() * h
}

fn edge_ratio_1d(v: &[Complex64]) -> f64 {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    v[0].norm().max(v[v.len() - 1].norm()) / max
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Raw analysis of `values` on `dom` into representing-grid samples.
pub(crate) fn analyze(values: &[Complex64], dom: Domain1D) -> Vec<Complex64> {
    let mut data = values.to_vec();
    Kernel::new(dom).analyze(&mut data);
    data
}

/// `f(y_k) = Σ_m g_m e^{i x_m y_k} Δx` on the given grid of `dom`.
pub fn synthesize(g: &[Complex64], dom: Domain1D) -> Result<Vec<Complex64>> {
    if g.len() != dom.len() {
        return Err(Error::GridMismatch(format!(
            "{} samples for a {}-point grid",
            g.len(),
            dom.len()
        )));
    }
    let mut data = g.to_vec();
    Kernel::new(dom).synthesize(&mut data, representing_step(dom), dom.step());
    Ok(data)
}

/// Computes `g` from sampled `f`.
pub fn inverse_transform(f: &GridFunction1D) -> SpectralPair {
    let dom = f.domain();
    let g = analyze(f.values(), dom);
    let lhs = l2sq(f.values(), dom.step());
    let rhs = 2.0 * PI * l2sq(&g, representing_step(dom));
    SpectralPair {
        f: f.clone(),
        plancherel: relative_gap(lhs, rhs),
        edge_ratio: edge_ratio_1d(f.values()),
        g,
    }
}

/// A two-dimensional pair on square-cell reciprocal grids.
#[derive(Debug, Clone)]
pub struct SpectralPair2D {
    f: GridFunction2D,
    g: Vec<Complex64>,
    plancherel: f64,
    edge_ratio: f64,
}

impl SpectralPair2D {
    pub fn f(&self) -> &GridFunction2D {
        &self.f
    }

    pub fn g(&self) -> &[Complex64] {
        &self.g
    }

    pub fn cell_area(&self) -> f64 {
        let (a, b) = self.f.domains();
        representing_step(a) * representing_step(b)
    }

    pub fn g_l1(&self) -> f64 {
        l1(&self.g, self.cell_area())
    }

    pub fn plancherel_discrepancy(&self) -> f64 {
        self.plancherel
    }

    pub fn edge_ratio(&self) -> f64 {
        self.edge_ratio
    }
}

fn transpose(v: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for i in 0..rows {
        for j in 0..cols {
            out[j * rows + i] = v[i * cols + j];
        }
    }
    out
}

pub(crate) fn analyze_2d(values: &[Complex64], a: Domain1D, b: Domain1D) -> Vec<Complex64> {
    let (nx, ny) = (a.len(), b.len());
    let kb = Kernel::new(b);
    let mut data = values.to_vec();
    parallel::for_each_row_mut(&mut data, ny, |_, row| kb.analyze(row));
    let mut t = transpose(&data, nx, ny);
    let ka = Kernel::new(a);
    parallel::for_each_row_mut(&mut t, nx, |_, col| ka.analyze(col));
    transpose(&t, ny, nx)
}

/// Separable two-dimensional version of [`inverse_transform`].
pub fn inverse_transform_2d(f: &GridFunction2D) -> SpectralPair2D {
    let (a, b) = f.domains();
    let g = analyze_2d(f.values(), a, b);
    let lhs = l2sq(f.values(), a.step() * b.step());
    let rhs = 4.0 * PI * PI * l2sq(&g, representing_step(a) * representing_step(b));
    let (nx, ny) = (a.len(), b.len());
    let max = f.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut edge = 0.0f64;
    for i in 0..nx {
        for j in 0..ny {
            if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 {
                edge = edge.max(f.values()[i * ny + j].norm());
            }
        }
    }
    SpectralPair2D {
        f: f.clone(),
        g,
        plancherel: relative_gap(lhs, rhs),
        edge_ratio: if max == 0.0 { 0.0 } else { edge / max },
    }
}
