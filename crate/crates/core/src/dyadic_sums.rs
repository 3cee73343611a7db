//! Dyadic sums of `L₂` norms of mixed differences.
//!
//! The sum is `Σ_s 2^{(s_1+…+s_d)/2} ‖Δ_{π 2^{-s_1},…,π 2^{-s_d}} f‖₂` over
//! `s ∈ ℤ^d`; finiteness implies membership. Sums are truncated to the box
//! `|s_j| <= P` and judged by how the outermost shell `max_j |s_j| = P` decays
//! as `P` grows.
//!
//! Norms are plain Riemann sums over the sampling grid extended by zero, which
//! is exact for the piecewise-constant reading of the samples. Steps that are
//! integer multiples of the grid step use index shifts; others interpolate.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::float_format::{sci, sci_opt, sci_vec};
use crate::function_model::{
    sample, AnalyticFunction, AnalyticFunction2D, Domain1D, GridFunction1D, GridFunction2D,
};
use crate::functionals::{CertificateVerdict, Criterion, FunctionalReport};
use crate::parallel;
use crate::quadrature::Finiteness;

/// Shell ratio (per level) at or below which the sum is declared convergent.
pub const SHELL_RATIO_MAX: f64 = 0.75;
/// Default truncation levels of the per-level ladder.
pub const DEFAULT_LEVELS: [u32; 3] = [6, 8, 10];
/// Smallest admissible truncation.
pub const MIN_TRUNCATION: u32 = 4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `h / step` as an integer when `h` is (numerically) a multiple of `step`.
fn as_multiple(h: f64, step: f64) -> Option<usize> {
    let r = h / step;
    let k = r.round();
    (k >= 1.0 && (r - k).abs() <= 1e-9 * k).then_some(k as usize)
}

fn get(v: &[Complex64], i: isize) -> Complex64 {
    if i >= 0 && (i as usize) < v.len() {
        v[i as usize]
    } else {
        ZERO
    }
}

fn energy(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `(∫ |f(t+h) - f(t-h)|² dt)^{1/2}` with `f` extended by zero.
pub fn l2_difference(f: &GridFunction1D, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::DegenerateStep(vec![h]));
    }
    let dom = f.domain();
    let (n, dx) = (dom.len(), dom.step());
    let v = f.values();
    // shifted copies do not overlap
    if 2.0 * h >= 2.0 * dom.half_width() + dx {
        return Ok((2.0 * energy(v) * dx).sqrt());
    }
    let sum: f64 = match as_multiple(h, dx) {
        Some(m) => {
            let m = m as isize;
            (-m..n as isize + m)
                .map(|i| (get(v, i + m) - get(v, i - m)).norm_sqr())
                .sum()
        }
        None => {
            let pad = (h / dx).ceil() as isize + 1;
            (-pad..n as isize + pad)
                .map(|i| {
                    let t = dom.point(0) + i as f64 * dx;
                    (f.at(t + h) - f.at(t - h)).norm_sqr()
                })
                .sum()
        }
    };
    Ok((sum * dx).sqrt())
}

/// Two-dimensional mixed analogue: the `L₂` norm of
/// `f(x+h₁,y+h₂) - f(x-h₁,y+h₂) - f(x+h₁,y-h₂) + f(x-h₁,y-h₂)`.
pub fn l2_difference_2d(f: &GridFunction2D, h: [f64; 2]) -> Result<f64> {
    if !h.iter().all(|&s| s > 0.0 && s.is_finite()) {
        return Err(Error::DegenerateStep(h.to_vec()));
    }
    let (dx, dy) = f.domains();
    let cell = dx.step() * dy.step();
    // axes along which the two shifted copies are disjoint contribute a factor 2
    let disjoint = |d: Domain1D, s: f64| 2.0 * s >= 2.0 * d.half_width() + d.step();
    let (sx, sy) = (disjoint(dx, h[0]), disjoint(dy, h[1]));
    let (nx, ny) = (dx.len() as isize, dy.len() as isize);
    let v = f.values();
    let at = |i: isize, j: isize| {
        if (0..nx).contains(&i) && (0..ny).contains(&j) {
            v[(i * ny + j) as usize]
        } else {
            ZERO
        }
    };
    let mx = if sx {
        None
    } else {
        as_multiple(h[0], dx.step())
    };
    let my = if sy {
        None
    } else {
        as_multiple(h[1], dy.step())
    };
    let exact_x = sx || mx.is_some();
    let exact_y = sy || my.is_some();
    let sum = if exact_x && exact_y {
        let (mx, my) = (mx.unwrap_or(0) as isize, my.unwrap_or(0) as isize);
        let rows: Vec<f64> = parallel::map_range((nx + 2 * mx) as usize, |r| {
            let i = r as isize - mx;
            (-my..ny + my)
                .map(|j| {
                    let line = |i: isize| {
                        if sy {
                            at(i, j)
                        } else {
                            at(i, j + my) - at(i, j - my)
                        }
                    };
                    let d = if sx {
                        line(i)
                    } else {
                        line(i + mx) - line(i - mx)
                    };
                    d.norm_sqr()
                })
                .sum()
        });
        rows.iter().sum::<f64>()
    } else {
        let px = if sx {
            0
        } else {
            (h[0] / dx.step()).ceil() as isize + 1
        };
        let py = if sy {
            0
        } else {
            (h[1] / dy.step()).ceil() as isize + 1
        };
        let rows: Vec<f64> = parallel::map_range((nx + 2 * px) as usize, |r| {
            let x = dx.point(0) + (r as isize - px) as f64 * dx.step();
            (-py..ny + py)
                .map(|j| {
                    let y = dy.point(0) + j as f64 * dy.step();
                    let line = |x: f64| {
                        if sy {
                            f.at(x, y)
                        } else {
                            f.at(x, y + h[1]) - f.at(x, y - h[1])
                        }
                    };
                    let d = if sx {
                        line(x)
                    } else {
                        line(x + h[0]) - line(x - h[0])
                    };
                    d.norm_sqr()
                })
                .sum()
        });
        rows.iter().sum::<f64>()
    };
    let factor = if sx { 2.0 } else { 1.0 } * if sy { 2.0 } else { 1.0 };
    Ok((factor * sum * cell).sqrt())
}

/// One summand `2^{Σ s_j / 2} ‖Δ‖₂`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicTerm {
    pub index: Vec<i32>,
    #[serde(serialize_with = "sci")]
    pub value: f64,
    /// The smallest step is below two grid steps.
    pub under_resolved: bool,
}

/// All terms of the truncated sum, in lexicographic index order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicSumState {
    pub truncation: u32,
    pub dims: usize,
    pub terms: Vec<DyadicTerm>,
    #[serde(serialize_with = "sci")]
    pub total: f64,
    /// `shells[k]` sums the terms with `max_j |s_j| = k`.
    #[serde(serialize_with = "sci_vec")]
    pub shells: Vec<f64>,
    /// False when the grid has fewer than four samples per local oscillation
    /// period at its edge; such a state cannot support a diagnosis.
    pub phase_resolved: bool,
}

impl DyadicSumState {
    fn from_terms(truncation: u32, dims: usize, terms: Vec<DyadicTerm>) -> Self {
        let mut shells = vec![0.0; truncation as usize + 1];
        for t in &terms {
            let k = t.index.iter().map(|s| s.unsigned_abs()).max().unwrap_or(0) as usize;
            shells[k] += t.value;
        }
        let total = terms.iter().map(|t| t.value).sum();
        Self {
            truncation,
            dims,
            terms,
            total,
            shells,
            phase_resolved: true,
        }
    }

    pub fn outermost_shell(&self) -> f64 {
        *self.shells.last().unwrap_or(&0.0)
    }

    pub fn under_resolved(&self) -> Vec<Vec<i32>> {
        self.terms
            .iter()
            .filter(|t| t.under_resolved)
            .map(|t| t.index.clone())
            .collect()
    }

    pub fn term(&self, index: &[i32]) -> Option<f64> {
        self.terms
            .iter()
            .find(|t| t.index == index)
            .map(|t| t.value)
    }
}

fn dyadic_step(s: i32) -> f64 {
    PI * (-(s as f64)).exp2()
}

fn check_truncation(p: u32) -> Result<()> {
    if p < MIN_TRUNCATION {
        return Err(Error::BadParams(format!(
            "truncation must be at least {MIN_TRUNCATION}, got {p}"
        )));
    }
    Ok(())
}

/// Truncated dyadic sum of a sampled one-dimensional function.
pub fn bernstein_sum(f: &GridFunction1D, p: u32) -> Result<DyadicSumState> {
    check_truncation(p)?;
    let p = p as i32;
    let dx = f.domain().step();
    let indices: Vec<i32> = (-p..=p).collect();
    let terms = parallel::map(&indices, |&s| {
        let h = dyadic_step(s);
        l2_difference(f, h).map(|d| DyadicTerm {
            index: vec![s],
            value: (0.5 * s as f64).exp2() * d,
            under_resolved: h < 2.0 * dx,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(DyadicSumState::from_terms(p as u32, 1, terms))
}

/// Truncated dyadic sum of a sampled two-dimensional function.
pub fn bernstein_sum_2d(f: &GridFunction2D, p: u32) -> Result<DyadicSumState> {
    check_truncation(p)?;
    let p = p as i32;
    let (dx, dy) = f.domains();
    let indices: Vec<[i32; 2]> = (-p..=p)
        .flat_map(|a| (-p..=p).map(move |b| [a, b]))
        .collect();
    // terms parallelize internally over rows
    let terms = indices
        .iter()
        .map(|&[a, b]| {
            let h = [dyadic_step(a), dyadic_step(b)];
            l2_difference_2d(f, h).map(|d| DyadicTerm {
                index: vec![a, b],
                value: (0.5 * (a + b) as f64).exp2() * d,
                under_resolved: h[0] < 2.0 * dx.step() || h[1] < 2.0 * dy.step(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DyadicSumState::from_terms(p as u32, 2, terms))
}

/// The grid used at truncation `P`: half-width `π 2^{P-3}` and step
/// `π 2^{-P-1}`, so the finest step spans exactly two samples and the
/// coarsest shifts clear the domain.
pub fn level_domain(p: u32) -> Result<Domain1D> {
    let p = p as i32;
    Domain1D::new(PI * f64::from(p - 3).exp2(), 1usize << (2 * p - 1))
}

/// Minimum samples per local oscillation period for a usable level grid.
const SAMPLES_PER_PERIOD: f64 = 4.0;

/// Dyadic sums of an analytic family at each truncation level, each on its own grid.
pub fn bernstein_ladder(f: &AnalyticFunction, levels: &[u32]) -> Result<Vec<DyadicSumState>> {
    levels
        .iter()
        .map(|&p| {
            check_truncation(p)?;
            let d = level_domain(p)?;
            let mut state = bernstein_sum(&sample(f, d)?, p)?;
            state.phase_resolved =
                f.samples_for_resolution(d.half_width(), SAMPLES_PER_PERIOD) <= d.len();
            Ok(state)
        })
        .collect()
}

/// Two-dimensional counterpart of [`bernstein_ladder`]. Memory grows as `16^P`.
pub fn bernstein_ladder_2d(f: &AnalyticFunction2D, levels: &[u32]) -> Result<Vec<DyadicSumState>> {
    levels
        .iter()
        .map(|&p| {
            check_truncation(p)?;
            let d = level_domain(p)?;
            let n = d.len();
            let values = parallel::map_range(n * n, |q| f.eval(d.point(q / n), d.point(q % n)));
            if let Some(q) = values
                .iter()
                .position(|v| !(v.re.is_finite() && v.im.is_finite()))
            {
                return Err(Error::NonFiniteSample { x: d.point(q / n) });
            }
            bernstein_sum_2d(&GridFunction2D::new(d, d, values)?, p)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum DyadicDiagnosis {
    Converged {
        #[serde(serialize_with = "sci")]
        total: f64,
        #[serde(serialize_with = "sci")]
        bound: f64,
    },
    Diverging {
        /// Per-level growth factor of the outermost shell.
        #[serde(serialize_with = "sci")]
        ratio: f64,
    },
    Inconclusive,
}

impl DyadicDiagnosis {
    pub fn name(&self) -> &'static str {
        match self {
            DyadicDiagnosis::Converged { .. } => "converged",
            DyadicDiagnosis::Diverging { .. } => "diverging",
            DyadicDiagnosis::Inconclusive => "inconclusive",
        }
    }
}

/// Diagnoses shell sums `shells[k]` observed at increasing levels `levels[k]`.
///
/// Ratios are normalized per level. Converged when the last two ratios are at
/// most [`SHELL_RATIO_MAX`], with tail bound `s ρ/(1-ρ)`; diverging when every
/// ratio is at least 1.
pub fn diagnose_shells(levels: &[u32], shells: &[f64], total: f64) -> Result<DyadicDiagnosis> {
    if shells.len() < 3 || levels.len() != shells.len() {
        return Err(Error::InsufficientStates {
            needed: 3,
            got: shells.len().min(levels.len()),
        });
    }
    if shells.iter().any(|s| !s.is_finite()) {
        return Ok(DyadicDiagnosis::Inconclusive);
    }
    let n = shells.len();
    let last = shells[n - 1];
    if last == 0.0 && shells[n - 2] == 0.0 {
        return Ok(DyadicDiagnosis::Converged { total, bound: 0.0 });
    }
    let ratios: Vec<f64> = (1..n)
        .map(|k| {
            let gap = f64::from(levels[k].saturating_sub(levels[k - 1]).max(1));
            if shells[k - 1] == 0.0 {
                f64::INFINITY
            } else {
                (shells[k] / shells[k - 1]).powf(1.0 / gap)
            }
        })
        .collect();
    let tail = &ratios[ratios.len() - 2..];
    if tail.iter().all(|&r| r <= SHELL_RATIO_MAX) {
        let rho = tail.iter().copied().fold(0.0, f64::max);
        return Ok(DyadicDiagnosis::Converged {
            total,
            bound: last * rho / (1.0 - rho),
        });
    }
    if ratios.iter().all(|&r| r >= 1.0) {
        return Ok(DyadicDiagnosis::Diverging {
            ratio: *ratios.last().unwrap(),
        });
    }
    Ok(DyadicDiagnosis::Inconclusive)
}

/// Diagnoses a sequence of states at increasing truncation from their outermost shells.
pub fn convergence_diagnosis(states: &[DyadicSumState]) -> Result<DyadicDiagnosis> {
    if states.len() < 3 {
        return Err(Error::InsufficientStates {
            needed: 3,
            got: states.len(),
        });
    }
    if states
        .windows(2)
        .any(|w| w[1].truncation <= w[0].truncation)
    {
        return Err(Error::Config(
            "dyadic states must have increasing truncation".into(),
        ));
    }
    if states.iter().any(|s| !s.phase_resolved) {
        return Ok(DyadicDiagnosis::Inconclusive);
    }
    let levels: Vec<u32> = states.iter().map(|s| s.truncation).collect();
    let shells: Vec<f64> = states.iter().map(DyadicSumState::outermost_shell).collect();
    diagnose_shells(&levels, &shells, states.last().unwrap().total)
}

/// Largest change of a shared term between the last two states.
fn level_discrepancy(states: &[DyadicSumState]) -> f64 {
    let [.., a, b] = states else {
        return 0.0;
    };
    a.terms
        .iter()
        .filter_map(|t| b.term(&t.index).map(|v| (v - t.value).abs()))
        .fold(0.0, f64::max)
}

/// Report for the dyadic-sum criterion built from a ladder of states.
pub fn dyadic_report(states: &[DyadicSumState]) -> Result<(FunctionalReport, DyadicDiagnosis)> {
    let diagnosis = convergence_diagnosis(states)?;
    let truncated = states.last().unwrap().total;
    let (value, tail_bound, finite_verdict) = match diagnosis {
        DyadicDiagnosis::Converged { bound, .. } => {
            (truncated + bound, Some(bound), Finiteness::Finite)
        }
        DyadicDiagnosis::Diverging { .. } => (f64::INFINITY, None, Finiteness::Divergent),
        DyadicDiagnosis::Inconclusive => (truncated, None, Finiteness::Inconclusive),
    };
    let report = FunctionalReport {
        name: "bernstein_sum".into(),
        value,
        truncated,
        quad_error: level_discrepancy(states),
        tail_bound,
        finite_verdict,
        refinement: states.iter().map(|s| s.total).collect(),
    };
    Ok((report, diagnosis))
}

/// Verdict of the dyadic-sum criterion for a ladder of states.
pub fn theorem_c_verdict(states: &[DyadicSumState]) -> CertificateVerdict {
    match dyadic_report(states) {
        Ok((report, diagnosis)) => {
            let levels: Vec<String> = states.iter().map(|s| s.truncation.to_string()).collect();
            CertificateVerdict::from_reports(
                Criterion::ThmC,
                vec![report],
                format!("{} over levels {}", diagnosis.name(), levels.join(",")),
            )
        }
        Err(e) => CertificateVerdict::inconclusive(Criterion::ThmC, e.to_string()),
    }
}

/// Whether the terms `g(2^p)` increase or decrease with `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

/// A dyadic sum with the two integrals that bracket it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumBracket {
    #[serde(serialize_with = "sci")]
    pub sum: f64,
    #[serde(serialize_with = "sci")]
    pub lower: f64,
    #[serde(serialize_with = "sci")]
    pub upper: f64,
    #[serde(serialize_with = "sci_opt")]
    pub lower_factor: Option<f64>,
}

impl SumBracket {
    pub fn holds(&self) -> bool {
        self.lower <= self.sum && self.sum <= self.upper
    }
}

/// `α / (2^α - 1)`, with its limit `1/ln 2` at `α = 0`.
pub fn block_factor(alpha: f64) -> f64 {
    if alpha.abs() < 1e-12 {
        1.0 / std::f64::consts::LN_2
    } else {
        alpha / (alpha.exp2() - 1.0)
    }
}

/// `∫_a^b t^{α-1} g(t) dt` by composite Simpson in `ln t`, 256 panels per octave.
fn weighted_integral(g: &impl Fn(f64) -> f64, alpha: f64, a: f64, b: f64) -> f64 {
    let (ua, ub) = (a.ln(), b.ln());
    let octaves = ((ub - ua) / std::f64::consts::LN_2).ceil().max(1.0) as usize;
    let n = 256 * octaves;
    let h = (ub - ua) / n as f64;
    let phi = |u: f64| {
        let t = u.exp();
        t.powf(alpha) * g(t)
    };
    let mut acc = phi(ua) + phi(ub);
    for k in 1..n {
        acc += phi(ua + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// `Σ_{p=m}^{n} 2^{pα} g(2^p)` bracketed by the block-average integrals.
///
/// For increasing `g` the upper bound is `α/(2^α-1) ∫_{2^m}^{2^{n+1}} t^{α-1} g`
/// and the lower is `2^α α/(2^α-1) ∫_{2^{m-1}}^{2^n} t^{α-1} g`; for decreasing
/// `g` the roles swap.
pub fn dyadic_sum_brackets(
    g: impl Fn(f64) -> f64,
    alpha: f64,
    m: i32,
    n: i32,
    monotone: Monotonicity,
) -> Result<SumBracket> {
    if n < m {
        return Err(Error::BadParams(format!("empty range m = {m} > n = {n}")));
    }
    let c = block_factor(alpha);
    let p2 = |p: i32| f64::from(p).exp2();
    let sum = (m..=n).map(|p| p2(p).powf(alpha) * g(p2(p))).sum();
    let right = c * weighted_integral(&g, alpha, p2(m), p2(n + 1));
    let left = alpha.exp2() * c * weighted_integral(&g, alpha, p2(m - 1), p2(n));
    let (lower, upper) = match monotone {
        Monotonicity::Increasing => (left, right),
        Monotonicity::Decreasing => (right, left),
    };
    Ok(SumBracket {
        sum,
        lower,
        upper,
        lower_factor: Some(c),
    })
}
