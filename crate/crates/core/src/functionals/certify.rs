//! Aggregation of functionals into per-criterion verdicts.

use super::{
    a_delta, beurling_vstar, conditions_2d, quasiconvex_integral, theorem11a_functionals,
    CertificateVerdict, Criterion, Status,
};
use crate::envelopes::{head_sup, mixed_envelope_2d, tail_sup};
use crate::error::{Error, Result};
use crate::function_model::{Field, GridFunction1D, GridFunction2D};

/// Knobs for [`certify_1d`].
#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOptions {
    /// Exponent for the `A_δ` criterion.
    pub delta: f64,
    /// Declared decay exponents `(α, β)` of `f` and `f'`, when known.
    pub exponents: Option<(f64, f64)>,
    /// Oscillating families get no power-law tails in the variation functionals.
    pub oscillatory: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            delta: 0.5,
            exponents: None,
            oscillatory: false,
        }
    }
}

fn from_result(criterion: Criterion, r: Result<CertificateVerdict>) -> CertificateVerdict {
    r.unwrap_or_else(|e| CertificateVerdict::inconclusive(criterion, e.to_string()))
}

/// One verdict per requested criterion for a one-dimensional input.
pub fn certify_1d(
    f: &GridFunction1D,
    criteria: &[Criterion],
    opts: &CertifyOptions,
) -> Vec<CertificateVerdict> {
    let variation_tail = if opts.oscillatory {
        None
    } else {
        opts.exponents
    };
    criteria
        .iter()
        .map(|&c| match c {
            Criterion::Thm11a => from_result(
                c,
                (|| {
                    let f0 = tail_sup(f, Field::Values)?;
                    let f1 = tail_sup(f, Field::Derivative)?;
                    let (a0, a1, a01) = theorem11a_functionals(&f0, &f1, opts.exponents)?;
                    Ok(CertificateVerdict::from_reports(c, vec![a0, a1, a01], ""))
                })(),
            ),
            Criterion::Thm11b => from_result(
                c,
                (|| {
                    let f0 = tail_sup(f, Field::Values)?;
                    let finf = head_sup(f)?;
                    match a_delta(&f0, &finf, opts.delta, f.origin_gap(), opts.exponents) {
                        Err(Error::ZeroDerivativeScale) => Ok(CertificateVerdict {
                            criterion: c,
                            status: Status::Satisfied,
                            inputs: Vec::new(),
                            notes: "trivially satisfied: f vanishes identically".into(),
                        }),
                        Err(e) => Err(e),
                        Ok(r) => Ok(CertificateVerdict::from_reports(
                            c,
                            vec![r],
                            format!("delta = {}", opts.delta),
                        )),
                    }
                })(),
            ),
            Criterion::Beurling => from_result(
                c,
                (|| {
                    let r = beurling_vstar(f, variation_tail)?;
                    Ok(CertificateVerdict::from_reports(c, vec![r], ""))
                })(),
            ),
            Criterion::Quasiconvex => from_result(
                c,
                (|| {
                    let r = quasiconvex_integral(f, variation_tail)?;
                    Ok(CertificateVerdict::from_reports(c, vec![r], ""))
                })(),
            ),
            Criterion::ThmC => CertificateVerdict::inconclusive(
                c,
                "dyadic sums are computed from the analytic family",
            ),
            Criterion::Thm13TwoD => {
                CertificateVerdict::inconclusive(c, "needs a two-dimensional input")
            }
        })
        .collect()
}

/// One verdict per requested criterion for a two-dimensional input.
pub fn certify_2d(f: &GridFunction2D, criteria: &[Criterion]) -> Vec<CertificateVerdict> {
    criteria
        .iter()
        .map(|&c| match c {
            Criterion::Thm13TwoD => from_result(
                c,
                (|| {
                    let env = |z: [u8; 2]| mixed_envelope_2d(f, [1 - z[0], 1 - z[1]], z);
                    let reports =
                        conditions_2d(&env([0, 0])?, &env([0, 1])?, &env([1, 0])?, &env([1, 1])?)?;
                    Ok(CertificateVerdict::from_reports(c, reports, ""))
                })(),
            ),
            Criterion::ThmC => CertificateVerdict::inconclusive(
                c,
                "dyadic sums are computed from the analytic family",
            ),
            _ => CertificateVerdict::inconclusive(c, "one-dimensional criterion"),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_model::{
        sample, sample_2d, AnalyticFunction, AnalyticFunction2D, Domain1D,
    };
    use num_complex::Complex64;

    fn gaussian() -> AnalyticFunction {
        AnalyticFunction::real("g", |t| (-t * t / 2.0).exp())
            .with_real_derivative(|t| -t * (-t * t / 2.0).exp())
    }

    #[test]
    fn gaussian_satisfies_everything_1d() {
        let d = Domain1D::new(64.0, 1 << 14).unwrap();
        let g = sample(&gaussian(), d).unwrap();
        let all = [
            Criterion::Thm11a,
            Criterion::Beurling,
            Criterion::Quasiconvex,
        ];
        let v = certify_1d(&g, &all, &CertifyOptions::default());
        for verdict in &v {
            assert_eq!(verdict.status, Status::Satisfied, "{verdict:?}");
        }
        assert_eq!(v, certify_1d(&g, &all, &CertifyOptions::default()));
    }

    #[test]
    fn zero_function_trivially_satisfies_b() {
        let f = AnalyticFunction::real("0", |_| 0.0)
            .with_real_derivative(|_| 0.0)
            .with_origin_gap(7.0);
        let g = sample(&f, Domain1D::new(64.0, 1 << 12).unwrap()).unwrap();
        let v = certify_1d(&g, &[Criterion::Thm11b], &CertifyOptions::default());
        assert_eq!(v[0].status, Status::Satisfied);
        assert!(v[0].notes.contains("trivially"));
    }

    #[test]
    fn missing_gap_is_inconclusive() {
        let g = sample(&gaussian(), Domain1D::new(64.0, 1 << 12).unwrap()).unwrap();
        let v = certify_1d(&g, &[Criterion::Thm11b], &CertifyOptions::default());
        assert_eq!(v[0].status, Status::Inconclusive);
    }

    #[test]
    fn log_decay_violates_a() {
        let f = AnalyticFunction::real("1/ln", |t: f64| 1.0 / (std::f64::consts::E + t.abs()).ln())
            .with_real_derivative(|t: f64| {
                -t.signum()
                    / ((std::f64::consts::E + t.abs())
                        * (std::f64::consts::E + t.abs()).ln().powi(2))
            });
        let g = sample(&f, Domain1D::new(256.0, 1 << 14).unwrap()).unwrap();
        let opts = CertifyOptions {
            exponents: Some((0.0, 1.0)),
            ..CertifyOptions::default()
        };
        let v = certify_1d(&g, &[Criterion::Thm11a], &opts);
        assert_eq!(v[0].status, Status::Violated);
    }

    #[test]
    fn tensor_gaussian_satisfies_2d() {
        let f = AnalyticFunction2D::tensor(&gaussian(), &gaussian());
        let d = Domain1D::new(8.0, 256).unwrap();
        let g = sample_2d(&f, d, d).unwrap();
        let v = certify_2d(&g, &[Criterion::Thm13TwoD]);
        assert_eq!(v[0].status, Status::Satisfied, "{:?}", v[0]);
        assert_eq!(v[0].inputs.len(), 9);
        let z = AnalyticFunction2D::new("z", |_, _| Complex64::new(0.0, 0.0));
        let g = sample_2d(&z, d, d).unwrap();
        assert_eq!(
            certify_2d(&g, &[Criterion::Thm13TwoD])[0].status,
            Status::Satisfied
        );
    }
}
