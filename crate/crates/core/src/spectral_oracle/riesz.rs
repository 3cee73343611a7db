//! Canonical factorization `g = |g|^{1/2} · (|g|^{1/2} sign g)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::float_format::sci;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieszCheck {
    #[serde(serialize_with = "sci")]
    pub f1_l2: f64,
    #[serde(serialize_with = "sci")]
    pub f2_l2: f64,
    /// `‖f1‖_2 ‖f2‖_2`, the bound on `‖f‖_A` through the convolution `f1 * f2`.
    #[serde(serialize_with = "sci")]
    pub product: f64,
    #[serde(serialize_with = "sci")]
    pub g_l1: f64,
    /// `|product - ‖g‖_1| / ‖g‖_1`.
    #[serde(serialize_with = "sci")]
    pub relative_gap: f64,
    /// `max |f1 f2 - g|` over the samples.
    #[serde(serialize_with = "sci")]
    pub max_pointwise_error: f64,
}

/// Factorizes samples of `g` with spacing `h` and compares `‖f1‖_2 ‖f2‖_2` with `‖g‖_1`.
/// Returns the factors alongside the check.
pub fn riesz_factorize(g: &[Complex64], h: f64) -> (Vec<f64>, Vec<Complex64>, RieszCheck) {
    let f1: Vec<f64> = g.iter().map(|z| z.norm().sqrt()).collect();
    let f2: Vec<Complex64> = g
        .iter()
        .zip(&f1)
        .map(|(z, r)| {
            if *r == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                z / r
            }
        })
        .collect();
    let f1_l2 = (f1.iter().map(|v| v * v).sum::<f64>() * h).sqrt();
    let f2_l2 = (f2.iter().map(|v| v.norm_sqr()).sum::<f64>() * h).sqrt();
    let g_l1 = g.iter().map(|z| z.norm()).sum::<f64>() * h;
    let product = f1_l2 * f2_l2;
    let max_pointwise_error = g
        .iter()
        .zip(f1.iter().zip(&f2))
        .map(|(z, (a, b))| (b * *a - z).norm())
        .fold(0.0, f64::max);
    let relative_gap = if g_l1 > 0.0 {
        (product - g_l1).abs() / g_l1
    } else {
        product
    };
    (
        f1,
        f2,
        RieszCheck {
            f1_l2,
            f2_l2,
            product,
            g_l1,
            relative_gap,
            max_pointwise_error,
        },
    )
}
