//! Commands tying families, certificates and the oracle together.
//!
//! Every command builds the family, fits the ladder, evaluates what was
//! asked for on the finest rung and returns a [`Report`]. Configuration
//! problems surface as [`Error::Config`] / [`Error::BadParams`] (exit code 2),
//! numerical failures as the remaining variants (exit code 3).

mod config;
mod report;
mod sweep;

pub use config::{
    fit_ladder, parse_criteria, parse_ladder, RunConfig, DEFAULT_LADDER, DEFAULT_LADDER_2D,
    DEFAULT_LEVELS_2D,
};
pub use report::{
    ConfigEcho, CrossCheck, DyadicSummary, LadderRung, ParamEcho, Report, SpectralChecks, Timings,
    SCHEMA,
};
pub use sweep::{
    parse_axis, sweep_command, Axis, SweepConfig, SweepRow, SweepTable, MAX_SWEEP_POINTS,
};

use std::time::Instant;

use num_complex::Complex64;

use crate::dyadic_sums::{
    bernstein_ladder, bernstein_ladder_2d, convergence_diagnosis, theorem_c_verdict, DyadicSumState,
};
use crate::envelopes::{head_sup, mixed_envelope_2d, tail_sup};
use crate::error::{Error, Result};
use crate::function_model::{sample, sample_2d, Domain1D, Field, GridFunction1D, GridFunction2D};
use crate::functionals::{
    a_delta, beurling_vstar, certify_1d, certify_2d, conditions_2d, quasiconvex_integral,
    theorem11a_functionals, vitali_2d, CertificateVerdict, CertifyOptions, Criterion,
    FunctionalReport,
};
use crate::spectral_oracle::{
    hilbert_conjugate, inverse_transform, riesz_factorize, taper, wiener_norm, wiener_norm_2d,
    NormEstimate, NormVerdict,
};
use crate::testbed::{make_family, Family, Family1D, Family2D};

/// A family sampled on the finest rung of its ladder.
enum Prepared {
    OneD {
        family: Family1D,
        ladder: Vec<(f64, usize)>,
        grid: GridFunction1D,
        /// The default ladder had to shrink below its nominal half-widths.
        shrunk: bool,
    },
    TwoD {
        family: Family2D,
        ladder: Vec<(f64, usize)>,
        grid: GridFunction2D,
    },
}

impl Prepared {
    fn echo(&self, cfg: &RunConfig) -> ConfigEcho {
        match self {
            Prepared::OneD { family, ladder, .. } => {
                ConfigEcho::new(cfg, &family.expected, family.exponents, ladder)
            }
            Prepared::TwoD { family, ladder, .. } => {
                ConfigEcho::new(cfg, &family.expected, None, ladder)
            }
        }
    }
}

fn prepare(cfg: &RunConfig, warnings: &mut Vec<String>) -> Result<Prepared> {
    cfg.validate()?;
    match make_family(&cfg.family)? {
        Family::OneD(family) => {
            let mut shrunk = false;
            let ladder = match &cfg.ladder {
                Some(l) => l.clone(),
                None => {
                    let (l, s) = fit_ladder(&family.function, &DEFAULT_LADDER, &cfg.oracle);
                    shrunk = s;
                    if s {
                        warnings.push(format!(
                            "default ladder shrunk to L = {} to resolve the oscillation",
                            l.last().unwrap().0
                        ));
                    }
                    l
                }
            };
            let (l, n) = *ladder.last().unwrap();
            let need = family
                .function
                .samples_for_resolution(l, cfg.oracle.samples_per_period);
            if need > cfg.oracle.max_samples {
                warnings.push(format!(
                    "finest rung needs {need} samples to resolve the oscillation; capped at {}",
                    cfg.oracle.max_samples
                ));
            }
            let n = n.max(need.min(cfg.oracle.max_samples));
            let grid = sample(&family.function, Domain1D::new(l, n)?)?;
            Ok(Prepared::OneD {
                family,
                ladder,
                grid,
                shrunk,
            })
        }
        Family::TwoD(family) => {
            let ladder = cfg
                .ladder
                .clone()
                .unwrap_or_else(|| DEFAULT_LADDER_2D.to_vec());
            let (l, n) = *ladder.last().unwrap();
            let d = Domain1D::new(l, n)?;
            let grid = sample_2d(&family.function, d, d)?;
            Ok(Prepared::TwoD {
                family,
                ladder,
                grid,
            })
        }
    }
}

fn dyadic_states(cfg: &RunConfig, p: &Prepared) -> Result<Vec<DyadicSumState>> {
    match p {
        Prepared::OneD { family, .. } => bernstein_ladder(&family.function, &cfg.levels()),
        Prepared::TwoD { family, .. } => bernstein_ladder_2d(&family.function, &cfg.levels()),
    }
}

/// Runs the oracle ladder. On a shrunk ladder the taper has not yet reached
/// the bulk of the function, so growth across rungs is not evidence of
/// divergence; such verdicts are downgraded to inconclusive.
fn oracle(cfg: &RunConfig, p: &Prepared, warnings: &mut Vec<String>) -> Result<NormEstimate> {
    match p {
        Prepared::OneD {
            family,
            ladder,
            shrunk,
            ..
        } => {
            let mut est = wiener_norm(&family.function, ladder, &cfg.oracle)?;
            if *shrunk && matches!(est.verdict, NormVerdict::Diverging { .. }) {
                est.verdict = NormVerdict::Inconclusive;
                warnings
                    .push("oracle growth on a shrunk ladder is not treated as divergence".into());
            }
            Ok(est)
        }
        Prepared::TwoD { family, ladder, .. } => {
            wiener_norm_2d(&family.function, ladder, &cfg.oracle)
        }
    }
}

fn elapsed_ms(t: Instant) -> u128 {
    t.elapsed().as_millis()
}

/// Certificates at the finest rung, the oracle over the ladder, and their cross-check.
pub fn certify_command(cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let mut warnings = Vec::new();
    let prepared = prepare(cfg, &mut warnings)?;
    let cert_start = Instant::now();
    let mut certificates = match &prepared {
        Prepared::OneD { family, grid, .. } => {
            let opts = CertifyOptions {
                delta: cfg.delta(),
                exponents: family.exponents,
                oscillatory: family.function.is_oscillatory(),
            };
            certify_1d(grid, &cfg.criteria, &opts)
        }
        Prepared::TwoD { grid, .. } => certify_2d(grid, &cfg.criteria),
    };
    let mut dyadic = None;
    if cfg.criteria.contains(&Criterion::ThmC) {
        let verdict = match dyadic_states(cfg, &prepared) {
            Ok(states) => {
                let v = theorem_c_verdict(&states);
                if let Ok(diagnosis) = convergence_diagnosis(&states) {
                    dyadic = Some(DyadicSummary { diagnosis, states });
                }
                v
            }
            Err(e) => CertificateVerdict::inconclusive(Criterion::ThmC, e.to_string()),
        };
        for c in certificates
            .iter_mut()
            .filter(|c| c.criterion == Criterion::ThmC)
        {
            *c = verdict.clone();
        }
    }
    let certificates_ms = elapsed_ms(cert_start);
    let oracle_start = Instant::now();
    let estimate = oracle(cfg, &prepared, &mut warnings)?;
    let oracle_ms = elapsed_ms(oracle_start);
    let functionals = certificates
        .iter()
        .flat_map(|c| c.inputs.iter().cloned())
        .collect();
    let cross_check = CrossCheck::evaluate(&certificates, Some(&estimate));
    Ok(Report {
        schema: SCHEMA,
        command: "certify".into(),
        config: prepared.echo(cfg),
        functionals,
        certificates,
        packing: None,
        dyadic,
        oracle: Some(estimate),
        spectral: None,
        cross_check,
        warnings,
        timings: cfg.timings.then(|| Timings {
            certificates_ms,
            oracle_ms,
            total_ms: elapsed_ms(start),
        }),
    })
}

/// Functional names accepted by [`functional_command`].
pub const FUNCTIONAL_NAMES: [&str; 9] = [
    "A0",
    "A1",
    "A01",
    "A_delta",
    "V*",
    "quasiconvex",
    "V",
    "conditions2d",
    "bernstein_sum",
];

fn canonical_functional(name: &str) -> Result<&'static str> {
    let n = name.trim().to_ascii_lowercase();
    Ok(match n.as_str() {
        "a0" => "A0",
        "a1" => "A1",
        "a01" => "A01",
        "a_delta" | "adelta" => "A_delta",
        "v*" | "vstar" | "beurling" => "V*",
        "quasiconvex" | "qc" => "quasiconvex",
        "v" | "vitali" => "V",
        "conditions2d" | "c1" | "c2" | "c3" | "c4" | "c5" | "c6" | "c7" | "c8" | "c9" => {
            "conditions2d"
        }
        "bernstein_sum" | "bernstein" | "dyadic" => "bernstein_sum",
        _ => {
            return Err(Error::Config(format!(
                "unknown functional '{name}'; expected one of {FUNCTIONAL_NAMES:?}"
            )))
        }
    })
}

fn needs(dim_2d: bool, name: &str) -> Result<()> {
    let two = matches!(name, "V" | "conditions2d");
    if two != dim_2d && name != "bernstein_sum" {
        let d = if two { "two" } else { "one" };
        return Err(Error::Config(format!(
            "functional {name} needs a {d}-dimensional family"
        )));
    }
    Ok(())
}

/// A single functional (or the nine two-dimensional conditions) on the finest rung.
pub fn functional_command(cfg: &RunConfig, name: &str) -> Result<Report> {
    let start = Instant::now();
    let canonical = canonical_functional(name)?;
    let mut warnings = Vec::new();
    let prepared = prepare(cfg, &mut warnings)?;
    needs(matches!(prepared, Prepared::TwoD { .. }), canonical)?;
    let mut packing = None;
    let mut dyadic = None;
    let functionals: Vec<FunctionalReport> = match (&prepared, canonical) {
        (_, "bernstein_sum") => {
            let states = dyadic_states(cfg, &prepared)?;
            let (report, diagnosis) = crate::dyadic_sums::dyadic_report(&states)?;
            dyadic = Some(DyadicSummary { diagnosis, states });
            vec![report]
        }
        (Prepared::OneD { family, grid, .. }, "A0" | "A1" | "A01") => {
            let f0 = tail_sup(grid, Field::Values)?;
            let f1 = tail_sup(grid, Field::Derivative)?;
            let (a0, a1, a01) = theorem11a_functionals(&f0, &f1, family.exponents)?;
            [a0, a1, a01]
                .into_iter()
                .filter(|r| r.name == canonical)
                .collect()
        }
        (Prepared::OneD { family, grid, .. }, "A_delta") => {
            let f0 = tail_sup(grid, Field::Values)?;
            let finf = head_sup(grid)?;
            vec![a_delta(
                &f0,
                &finf,
                cfg.delta(),
                grid.origin_gap(),
                family.exponents,
            )?]
        }
        (Prepared::OneD { family, grid, .. }, "V*" | "quasiconvex") => {
            let tail = if family.function.is_oscillatory() {
                None
            } else {
                family.exponents
            };
            if canonical == "V*" {
                vec![beurling_vstar(grid, tail)?]
            } else {
                vec![quasiconvex_integral(grid, tail)?]
            }
        }
        (Prepared::TwoD { grid, .. }, "V") => {
            let v = vitali_2d(grid, true)?;
            packing = v.packing;
            v.integral.into_iter().collect()
        }
        (Prepared::TwoD { grid, .. }, "conditions2d") => {
            let env = |z: [u8; 2]| mixed_envelope_2d(grid, [1 - z[0], 1 - z[1]], z);
            conditions_2d(&env([0, 0])?, &env([0, 1])?, &env([1, 0])?, &env([1, 1])?)?
        }
        _ => unreachable!("dimension checked above"),
    };
    Ok(Report {
        schema: SCHEMA,
        command: format!("functional {canonical}"),
        config: prepared.echo(cfg),
        functionals,
        certificates: Vec::new(),
        packing,
        dyadic,
        oracle: None,
        spectral: None,
        cross_check: CrossCheck::NotApplicable,
        warnings,
        timings: cfg.timings.then(|| Timings {
            certificates_ms: elapsed_ms(start),
            oracle_ms: 0,
            total_ms: elapsed_ms(start),
        }),
    })
}

/// Riesz and conjugate-function checks on the tapered finest rung.
pub fn spectral_checks(f: &GridFunction1D) -> Result<SpectralChecks> {
    let dom = f.domain();
    let l = dom.half_width();
    let tapered: Vec<Complex64> = f
        .values()
        .iter()
        .zip(dom.points())
        .map(|(v, y)| v * taper(y, l))
        .collect();
    let pair = inverse_transform(&GridFunction1D::new(dom, tapered)?);
    let (_, _, riesz) = riesz_factorize(pair.g(), pair.x_step());
    let conjugate = hilbert_conjugate(&pair)?;
    Ok(SpectralChecks {
        half_width: l,
        samples: dom.len(),
        g_l1: pair.g_l1(),
        plancherel: pair.plancherel_discrepancy(),
        edge_ratio: pair.edge_ratio(),
        riesz,
        conjugate_norm: conjugate.norm,
    })
}

/// The oracle ladder alone, plus Riesz and conjugate checks for one-dimensional families.
pub fn oracle_command(cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let mut warnings = Vec::new();
    let prepared = prepare(cfg, &mut warnings)?;
    let estimate = oracle(cfg, &prepared, &mut warnings)?;
    let spectral = match &prepared {
        Prepared::OneD { grid, .. } => Some(spectral_checks(grid)?),
        Prepared::TwoD { .. } => None,
    };
    let oracle_ms = elapsed_ms(start);
    Ok(Report {
        schema: SCHEMA,
        command: "oracle".into(),
        config: prepared.echo(cfg),
        functionals: Vec::new(),
        certificates: Vec::new(),
        packing: None,
        dyadic: None,
        oracle: Some(estimate),
        spectral,
        cross_check: CrossCheck::NotApplicable,
        warnings,
        timings: cfg.timings.then(|| Timings {
            certificates_ms: 0,
            oracle_ms,
            total_ms: elapsed_ms(start),
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::Status;
    use crate::testbed::FamilySpec;

    #[test]
    fn gaussian_certifies_and_converges() {
        let cfg = RunConfig::new(FamilySpec::Gaussian);
        let r = certify_command(&cfg).unwrap();
        assert_eq!(r.certificate("thm11a").unwrap().status, Status::Satisfied);
        let o = r.oracle.as_ref().unwrap();
        assert!(o.is_converged());
        assert!((o.last_value() - 1.0).abs() < 1e-2);
        assert_eq!(r.cross_check, CrossCheck::Consistent);
        assert!(r.summary().contains("cross_check consistent"));
    }

    #[test]
    fn reports_are_byte_identical() {
        let cfg = RunConfig::new(FamilySpec::polya(2.0)).with_criteria(&Criterion::ALL);
        let a = certify_command(&cfg).unwrap().to_json().unwrap();
        let b = certify_command(&cfg).unwrap().to_json().unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"schema\": 1"));
    }

    #[test]
    fn cross_check_flags_false_positives() {
        let est = |verdict| NormEstimate {
            rungs: Vec::new(),
            verdict,
            extrapolation: None,
        };
        let sat = CertificateVerdict {
            criterion: Criterion::Thm11a,
            status: Status::Satisfied,
            inputs: Vec::new(),
            notes: String::new(),
        };
        let diverging = est(crate::spectral_oracle::NormVerdict::Diverging { rate: 0.3 });
        assert_eq!(
            CrossCheck::evaluate(std::slice::from_ref(&sat), Some(&diverging)),
            CrossCheck::FalsePositive
        );
        let inc = CertificateVerdict::inconclusive(Criterion::Thm11a, "");
        assert_eq!(
            CrossCheck::evaluate(&[inc], Some(&diverging)),
            CrossCheck::Consistent
        );
        assert_eq!(
            CrossCheck::evaluate(&[sat], None),
            CrossCheck::NotApplicable
        );
    }

    #[test]
    fn functional_names() {
        assert_eq!(canonical_functional("vstar").unwrap(), "V*");
        assert!(matches!(
            canonical_functional("bogus"),
            Err(Error::Config(_))
        ));
        let cfg = RunConfig::new(FamilySpec::Gaussian);
        assert!(matches!(
            functional_command(&cfg, "vitali"),
            Err(Error::Config(_))
        ));
        let r = functional_command(&cfg, "A1").unwrap();
        assert_eq!(r.functionals.len(), 1);
        assert_eq!(r.functionals[0].name, "A1");
    }
}
