//! The conjugate function `f~(y) = i ∫ g(x) sign(x) e^{ixy} dx`.

use num_complex::Complex64;

use super::{l1, synthesize, SpectralPair};
use crate::error::Result;
use crate::function_model::GridFunction1D;

#[derive(Debug, Clone)]
pub struct Conjugate {
    /// `i · sign(x) · g(x)` on the representing grid.
    pub density: Vec<Complex64>,
    /// `f~` on the given grid.
    pub function: GridFunction1D,
    /// `‖i sign g‖_1`.
    pub norm: f64,
}

/// Multiplies the density by `i sign x` (with `sign 0 = 0`) and synthesizes `f~`.
pub fn hilbert_conjugate(pair: &SpectralPair) -> Result<Conjugate> {
    let density: Vec<Complex64> = pair
        .g()
        .iter()
        .enumerate()
        .map(|(m, z)| {
            let x = pair.x_point(m);
            let s = if x > 0.0 {
                1.0
            } else if x < 0.0 {
                -1.0
            } else {
                0.0
            };
            Complex64::new(-z.im * s, z.re * s)
        })
        .collect();
    let dom = pair.f().domain();
    let function = GridFunction1D::new(dom, synthesize(&density, dom)?)?;
    Ok(Conjugate {
        norm: l1(&density, pair.x_step()),
        density,
        function,
    })
}
