//! Scalar sufficient-condition functionals and per-criterion certificates.
//!
//! Every functional is a truncated integral (or supremum) over the sampled
//! domain plus a tail estimate. Finiteness is judged from how the truncated
//! value behaves as the domain is cut to `L/4`, `L/2`, `L`, or from declared
//! decay exponents when the family supplies them.

mod certify;
mod conditions2d;
mod thm11;
mod variation;

pub use certify::{certify_1d, certify_2d, CertifyOptions};
pub use conditions2d::{conditions_2d, CONDITION_NAMES};
pub use thm11::{a_delta, theorem11a_functionals};
pub use variation::{
    beurling_vstar, quasiconvex_integral, vitali_2d, PackingEstimate, VitaliReport,
};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::float_format::{sci, sci_opt, sci_vec};
use crate::quadrature::{
    classify_refinement, geometric_remainder, Finiteness, NEGLIGIBLE_INCREMENT,
};

/// A functional's value with its error and tail bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalReport {
    pub name: String,
    /// Truncated value plus tail bound; `+inf` when divergent.
    #[serde(serialize_with = "sci")]
    pub value: f64,
    /// Value on the full sampled domain, without tail.
    #[serde(serialize_with = "sci")]
    pub truncated: f64,
    #[serde(serialize_with = "sci")]
    pub quad_error: f64,
    /// `None` when no tail bound is available.
    #[serde(serialize_with = "sci_opt")]
    pub tail_bound: Option<f64>,
    pub finite_verdict: Finiteness,
    /// Truncated values at the successive refinements the verdict was based on.
    #[serde(serialize_with = "sci_vec")]
    pub refinement: Vec<f64>,
}

impl FunctionalReport {
    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }

    pub fn is_certified_finite(&self) -> bool {
        self.finite_verdict == Finiteness::Finite && self.tail_bound.is_some()
    }

    /// Builds a report from truncated values at successive refinements (last
    /// entry = finest/largest) and an optional model tail at the last one.
    pub(crate) fn assemble(
        name: &str,
        refinement: Vec<f64>,
        quad_error: f64,
        model_tail: Option<f64>,
    ) -> Self {
        let truncated = refinement.last().copied().unwrap_or(0.0);
        let divergent = |refinement: Vec<f64>| Self {
            name: name.into(),
            value: f64::INFINITY,
            truncated,
            quad_error,
            tail_bound: None,
            finite_verdict: Finiteness::Divergent,
            refinement,
        };
        if !truncated.is_finite() || model_tail.is_some_and(|t| !t.is_finite()) {
            return divergent(refinement);
        }
        let classified = classify_refinement(&refinement);
        if classified == Finiteness::Divergent {
            return divergent(refinement);
        }
        let floor = 1e-14 * truncated.abs().max(1e-300);
        let incs: Vec<f64> = refinement
            .windows(2)
            .map(|w| {
                let d = (w[1] - w[0]).abs();
                if d <= floor {
                    0.0
                } else {
                    d
                }
            })
            .collect();
        let (verdict, tail) = match model_tail {
            Some(t) => {
                let contracting = match incs.as_slice() {
                    [.., a, b] => b <= a || *b <= NEGLIGIBLE_INCREMENT * truncated.abs(),
                    [b] => *b <= NEGLIGIBLE_INCREMENT * truncated.abs(),
                    [] => true,
                };
                if contracting {
                    (Finiteness::Finite, Some(t))
                } else {
                    (Finiteness::Inconclusive, Some(t))
                }
            }
            None => {
                let tail = if classified == Finiteness::Finite {
                    geometric_remainder(&incs)
                } else {
                    None
                };
                (classified, tail)
            }
        };
        let value = truncated
            + if verdict == Finiteness::Finite {
                tail.unwrap_or(0.0)
            } else {
                0.0
            };
        Self {
            name: name.into(),
            value,
            truncated,
            quad_error,
            tail_bound: tail,
            finite_verdict: verdict,
            refinement,
        }
    }
}

/// The criteria the certifier knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Criterion {
    #[serde(rename = "thm11a")]
    Thm11a,
    #[serde(rename = "thm11b")]
    Thm11b,
    #[serde(rename = "beurling")]
    Beurling,
    #[serde(rename = "quasiconvex")]
    Quasiconvex,
    #[serde(rename = "thmC")]
    ThmC,
    #[serde(rename = "thm13-2d")]
    Thm13TwoD,
}

impl Criterion {
    pub const ALL: [Criterion; 6] = [
        Criterion::Thm11a,
        Criterion::Thm11b,
        Criterion::Beurling,
        Criterion::Quasiconvex,
        Criterion::ThmC,
        Criterion::Thm13TwoD,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Criterion::Thm11a => "thm11a",
            Criterion::Thm11b => "thm11b",
            Criterion::Beurling => "beurling",
            Criterion::Quasiconvex => "quasiconvex",
            Criterion::ThmC => "thmC",
            Criterion::Thm13TwoD => "thm13-2d",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown criterion '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Satisfied,
    Violated,
    Inconclusive,
}

/// Outcome of one criterion. `Violated` means a hypothesis failed; none of the
/// criteria is necessary, so it never asserts non-membership.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateVerdict {
    pub criterion: Criterion,
    pub status: Status,
    pub inputs: Vec<FunctionalReport>,
    pub notes: String,
}

impl CertificateVerdict {
    pub fn from_reports(
        criterion: Criterion,
        inputs: Vec<FunctionalReport>,
        notes: impl Into<String>,
    ) -> Self {
        let status = if inputs
            .iter()
            .any(|r| r.finite_verdict == Finiteness::Divergent)
        {
            Status::Violated
        } else if !inputs.is_empty() && inputs.iter().all(FunctionalReport::is_certified_finite) {
            Status::Satisfied
        } else {
            Status::Inconclusive
        };
        Self {
            criterion,
            status,
            inputs,
            notes: notes.into(),
        }
    }

    pub fn inconclusive(criterion: Criterion, notes: impl Into<String>) -> Self {
        Self {
            criterion,
            status: Status::Inconclusive,
            inputs: Vec::new(),
            notes: notes.into(),
        }
    }
}

/// Classification of a pair of decay exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentClass {
    /// `α + β > 1`: membership follows.
    Member,
    /// `α + β = 1`: neither clause applies.
    NotProvable,
    /// `α + β < 1`: counterexamples exist with these exponents.
    CounterexampleRegime,
}

/// Sorts `f = O(|t|^{-α})`, `f' = O(|t|^{-β})` by the sign of `α + β - 1`.
pub fn corollary_classify(alpha: f64, beta: f64) -> Result<ExponentClass> {
    if !(alpha > 0.0) || !beta.is_finite() {
        return Err(Error::BadExponent(alpha));
    }
    let s = alpha + beta;
    Ok(if s > 1.0 {
        ExponentClass::Member
    } else if s < 1.0 {
        ExponentClass::CounterexampleRegime
    } else {
        ExponentClass::NotProvable
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_classes() {
        assert_eq!(corollary_classify(2.0, 0.0).unwrap(), ExponentClass::Member);
        assert_eq!(
            corollary_classify(0.4, 0.4).unwrap(),
            ExponentClass::CounterexampleRegime
        );
        assert_eq!(
            corollary_classify(0.5, 0.5).unwrap(),
            ExponentClass::NotProvable
        );
        assert_eq!(corollary_classify(0.0, 2.0), Err(Error::BadExponent(0.0)));
        assert_eq!(corollary_classify(-1.0, 2.0), Err(Error::BadExponent(-1.0)));
    }

    #[test]
    fn assemble_policies() {
        let r = FunctionalReport::assemble("x", vec![1.0, 1.5, 1.75], 0.0, None);
        assert_eq!(r.finite_verdict, Finiteness::Inconclusive);
        let r = FunctionalReport::assemble("x", vec![1.0, 1.5, 1.6], 0.0, None);
        assert_eq!(r.finite_verdict, Finiteness::Finite);
        assert!((r.tail_bound.unwrap() - 0.1 * 0.2 / 0.8).abs() < 1e-12);
        let r = FunctionalReport::assemble("x", vec![1.0, 2.0, 4.0], 0.0, None);
        assert_eq!(r.finite_verdict, Finiteness::Divergent);
        assert!(r.is_infinite());
        let r = FunctionalReport::assemble("x", vec![1.0, 1.5, 1.75], 0.0, Some(0.3));
        assert_eq!(r.finite_verdict, Finiteness::Finite);
        assert_eq!(r.value, 2.05);
        let r = FunctionalReport::assemble("x", vec![1.0, 1.5, 1.75], 0.0, Some(f64::INFINITY));
        assert_eq!(r.finite_verdict, Finiteness::Divergent);
    }

    #[test]
    fn criterion_names_round_trip() {
        for c in Criterion::ALL {
            assert_eq!(c.name().parse::<Criterion>().unwrap(), c);
        }
        assert!("thm99".parse::<Criterion>().is_err());
    }
}
