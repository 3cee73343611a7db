//! The Wiener norm `‖g‖_1` on a refinement ladder, with a convergence verdict.
//!
//! Each rung transforms `f · w_L`, where `w_L` is the Gaussian taper of
//! [`taper`]. The taper is positive definite with `w(0) = 1`, so every rung
//! value is at most `‖f‖_A` and the values converge to it as `L` grows.
//! Besides the direct relative-change test, the ladder records the shell
//! norms `s_k = ‖FT[f (w_{L_k} - w_{L_{k-1}})]‖_1`, which bound the change
//! between rungs. Convergence is decided by the relative changes alone;
//! geometric shell decay only supplies an extrapolated tail, and
//! non-decaying shells together with growing values indicate divergence.

use serde::Serialize;

use super::{analyze, analyze_2d, l1, representing_step, taper, EDGE_FAIL};
use crate::error::{Error, Result};
use crate::float_format::{sci, sci_opt};
use crate::function_model::{sample, sample_2d, AnalyticFunction, AnalyticFunction2D, Domain1D};
use crate::quadrature::loglog_slope;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct LadderOptions {
    /// Relative change between the last two rungs accepted as converged.
    pub tolerance: f64,
    /// Shell ratios at or below this certify geometric convergence.
    pub shell_ratio_max: f64,
    /// Required samples per local oscillation period at the domain edge.
    pub samples_per_period: f64,
    /// Cap on the per-rung sample count after resolution raising.
    pub max_samples: usize,
}

impl Default for LadderOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-2,
            shell_ratio_max: 0.95,
            samples_per_period: 8.0,
            max_samples: 1 << 21,
        }
    }
}

/// One ladder rung.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rung {
    #[serde(serialize_with = "sci")]
    pub half_width: f64,
    pub requested_samples: usize,
    pub samples: usize,
    #[serde(serialize_with = "sci")]
    pub value: f64,
    #[serde(serialize_with = "sci_opt")]
    pub shell: Option<f64>,
    #[serde(serialize_with = "sci")]
    pub plancherel: f64,
    #[serde(serialize_with = "sci")]
    pub edge_ratio: f64,
    pub resolved: bool,
    pub usable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum NormVerdict {
    Converged {
        #[serde(serialize_with = "sci")]
        limit: f64,
        #[serde(serialize_with = "sci")]
        tolerance: f64,
        /// Geometric bound on the remaining change, when the shell route applied.
        #[serde(serialize_with = "sci_opt")]
        tail_bound: Option<f64>,
    },
    Diverging {
        /// Log-log growth rate of the values against `L`.
        #[serde(serialize_with = "sci")]
        rate: f64,
    },
    Inconclusive,
}

impl NormVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            NormVerdict::Converged { .. } => "converged",
            NormVerdict::Diverging { .. } => "diverging",
            NormVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEstimate {
    pub rungs: Vec<Rung>,
    pub verdict: NormVerdict,
    pub extrapolation: Option<Extrapolation>,
}

impl NormEstimate {
    pub fn values(&self) -> Vec<f64> {
        self.rungs.iter().map(|r| r.value).collect()
    }

    pub fn last_value(&self) -> f64 {
        self.rungs.last().map_or(f64::NAN, |r| r.value)
    }

    pub fn is_converged(&self) -> bool {
        matches!(self.verdict, NormVerdict::Converged { .. })
    }

    pub fn is_diverging(&self) -> bool {
        matches!(self.verdict, NormVerdict::Diverging { .. })
    }
}

/// Checks that a ladder has at least three rungs with `L` and `N` doubling.
pub fn validate_ladder(ladder: &[(f64, usize)]) -> Result<()> {
    if ladder.len() < 3 {
        return Err(Error::Config(format!(
            "ladder needs at least 3 rungs, got {}",
            ladder.len()
        )));
    }
    for w in ladder.windows(2) {
        let ((l0, n0), (l1, n1)) = (w[0], w[1]);
        if (l1 / l0 - 2.0).abs() > 1e-9 || n1 != 2 * n0 {
            return Err(Error::Config(format!(
                "ladder rungs must double: ({l0}, {n0}) -> ({l1}, {n1})"
            )));
        }
    }
    for &(l, n) in ladder {
        Domain1D::new(l, n).map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

/// Verdict from rung values and shells (`shells[k]` belongs to rung `k`, `None` for the first).
///
/// Converged requires the last two relative changes to be within the
/// tolerance. Diverging requires strictly growing values and shells that do
/// not shrink. A geometric shell extrapolation never decides the verdict; see
/// [`shell_extrapolation`].
pub fn classify_ladder(
    values: &[f64],
    shells: &[Option<f64>],
    usable: bool,
    opts: &LadderOptions,
) -> NormVerdict {
    if !usable || values.len() < 3 || values.iter().any(|v| !v.is_finite()) {
        return NormVerdict::Inconclusive;
    }
    let n = values.len();
    let last = values[n - 1];
    let rel = |k: usize| (values[k] - values[k - 1]).abs() / values[k].abs().max(f64::MIN_POSITIVE);
    if rel(n - 1) <= opts.tolerance && rel(n - 2) <= opts.tolerance {
        return NormVerdict::Converged {
            limit: last,
            tolerance: opts.tolerance,
            tail_bound: shell_extrapolation(values, shells, opts.shell_ratio_max)
                .map(|e| e.tail_bound),
        };
    }
    let ratios = shell_ratios(shells);
    let shells_grow = !ratios.is_empty() && ratios.iter().all(|&r| r >= 1.0);
    let values_grow = values.windows(2).all(|w| w[1] > w[0]);
    if shells_grow && values_grow {
        let ls: Vec<f64> = (0..n).map(|k| 2f64.powi(k as i32)).collect();
        return NormVerdict::Diverging {
            rate: loglog_slope(&ls, values).unwrap_or(0.0),
        };
    }
    NormVerdict::Inconclusive
}

fn shell_ratios(shells: &[Option<f64>]) -> Vec<f64> {
    let s: Vec<f64> = shells.iter().flatten().copied().collect();
    s.windows(2)
        .map(|w| {
            if w[0] > 0.0 {
                w[1] / w[0]
            } else if w[1] == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .collect()
}

/// Limit predicted by continuing the shell decay geometrically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extrapolation {
    #[serde(serialize_with = "sci")]
    pub limit: f64,
    #[serde(serialize_with = "sci")]
    pub tail_bound: f64,
    #[serde(serialize_with = "sci")]
    pub ratio: f64,
}

/// When every shell ratio is at most `r_max`, the remaining change is at
/// most `s r/(1-r)` provided the decay continues. Reported as a diagnostic
/// only: a power-law tail that has not reached its asymptotic rate fools it.
pub fn shell_extrapolation(
    values: &[f64],
    shells: &[Option<f64>],
    r_max: f64,
) -> Option<Extrapolation> {
    let ratios = shell_ratios(shells);
    if ratios.is_empty() || ratios.iter().any(|&r| !(r <= r_max)) {
        return None;
    }
    let r = ratios.iter().copied().fold(0.0, f64::max);
    let s = shells.iter().flatten().last().copied()?;
    let tail = s * r / (1.0 - r);
    Some(Extrapolation {
        limit: values.last()? + tail,
        tail_bound: tail,
        ratio: r,
    })
}

fn effective_samples(f_rate: impl Fn(f64) -> usize, l: f64, n: usize, cap: usize) -> (usize, bool) {
    let need = f_rate(l);
    let n_eff = n.max(need);
    if n_eff > cap {
        (n.max(cap.min(n_eff)), false)
    } else {
        (n_eff, true)
    }
}

struct RungInput {
    half_width: f64,
    prev_half_width: Option<f64>,
    requested: usize,
    samples: usize,
    resolved: bool,
}

fn ladder_inputs(
    ladder: &[(f64, usize)],
    required: impl Fn(f64) -> usize,
    cap: usize,
) -> Vec<RungInput> {
    ladder
        .iter()
        .enumerate()
        .map(|(k, &(l, n))| {
            let (samples, resolved) = effective_samples(&required, l, n, cap);
            RungInput {
                half_width: l,
                prev_half_width: (k > 0).then(|| ladder[k - 1].0),
                requested: n,
                samples,
                resolved,
            }
        })
        .collect()
}

/// `‖f‖_A` estimate over a ladder of `(L, N)` rungs. `N` is raised per rung
/// to resolve oscillating families (up to `opts.max_samples`).
pub fn wiener_norm(
    f: &AnalyticFunction,
    ladder: &[(f64, usize)],
    opts: &LadderOptions,
) -> Result<NormEstimate> {
    validate_ladder(ladder)?;
    let inputs = ladder_inputs(
        ladder,
        |l| f.samples_for_resolution(l, opts.samples_per_period),
        opts.max_samples,
    );
    let mut rungs = Vec::with_capacity(inputs.len());
    for r in &inputs {
        let dom = Domain1D::new(r.half_width, r.samples)?;
        let raw = sample(f, dom)?;
        let weights: Vec<f64> = dom.points().map(|y| taper(y, r.half_width)).collect();
        let tapered: Vec<Complex64> = raw
            .values()
            .iter()
            .zip(&weights)
            .map(|(v, w)| v * w)
            .collect();
        let dx = representing_step(dom);
        let g = analyze(&tapered, dom);
        let value = l1(&g, dx);
        let shell = r.prev_half_width.map(|lp| {
            let diff: Vec<Complex64> = raw
                .values()
                .iter()
                .zip(dom.points())
                .zip(&weights)
                .map(|((v, y), w)| v * (w - taper(y, lp)))
                .collect();
            l1(&analyze(&diff, dom), dx)
        });
        let lhs: f64 = tapered.iter().map(|z| z.norm_sqr()).sum::<f64>() * dom.step();
        let rhs: f64 =
            2.0 * std::f64::consts::PI * g.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx;
        let max = tapered.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let edge = if max > 0.0 {
            tapered[0].norm().max(tapered[tapered.len() - 1].norm()) / max
        } else {
            0.0
        };
        rungs.push(Rung {
            half_width: r.half_width,
            requested_samples: r.requested,
            samples: r.samples,
            value,
            shell,
            plancherel: if lhs > 0.0 {
                (lhs - rhs).abs() / lhs
            } else {
                0.0
            },
            edge_ratio: edge,
            resolved: r.resolved,
            usable: r.resolved && edge <= EDGE_FAIL,
        });
    }
    Ok(finish(rungs, opts))
}

fn finish(rungs: Vec<Rung>, opts: &LadderOptions) -> NormEstimate {
    let values: Vec<f64> = rungs.iter().map(|r| r.value).collect();
    let shells: Vec<Option<f64>> = rungs.iter().map(|r| r.shell).collect();
    let usable = rungs.iter().all(|r| r.usable);
    let verdict = classify_ladder(&values, &shells, usable, opts);
    let extrapolation = if usable {
        shell_extrapolation(&values, &shells, opts.shell_ratio_max)
    } else {
        None
    };
    NormEstimate {
        rungs,
        verdict,
        extrapolation,
    }
}

/// Two-dimensional ladder on square domains `[-L, L)^2` with `N × N` samples.
pub fn wiener_norm_2d(
    f: &AnalyticFunction2D,
    ladder: &[(f64, usize)],
    opts: &LadderOptions,
) -> Result<NormEstimate> {
    validate_ladder(ladder)?;
    let mut rungs = Vec::with_capacity(ladder.len());
    for (k, &(l, n)) in ladder.iter().enumerate() {
        let dom = Domain1D::new(l, n)?;
        let raw = sample_2d(f, dom, dom)?;
        let w: Vec<f64> = dom.points().map(|y| taper(y, l)).collect();
        let window = |i: usize, j: usize| w[i] * w[j];
        let tapered: Vec<Complex64> = (0..n * n)
            .map(|q| raw.values()[q] * window(q / n, q % n))
            .collect();
        let cell = representing_step(dom).powi(2);
        let g = analyze_2d(&tapered, dom, dom);
        let value = l1(&g, cell);
        let shell = (k > 0).then(|| {
            let lp = ladder[k - 1].0;
            let wp: Vec<f64> = dom.points().map(|y| taper(y, lp)).collect();
            let diff: Vec<Complex64> = (0..n * n)
                .map(|q| raw.values()[q] * (window(q / n, q % n) - wp[q / n] * wp[q % n]))
                .collect();
            l1(&analyze_2d(&diff, dom, dom), cell)
        });
        let lhs: f64 = tapered.iter().map(|z| z.norm_sqr()).sum::<f64>() * dom.step().powi(2);
        let rhs: f64 =
            4.0 * std::f64::consts::PI.powi(2) * g.iter().map(|z| z.norm_sqr()).sum::<f64>() * cell;
        rungs.push(Rung {
            half_width: l,
            requested_samples: n,
            samples: n,
            value,
            shell,
            plancherel: if lhs > 0.0 {
                (lhs - rhs).abs() / lhs
            } else {
                0.0
            },
            edge_ratio: 0.0,
            resolved: true,
            usable: true,
        });
    }
    Ok(finish(rungs, opts))
}
