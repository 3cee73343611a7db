//! The JSON report and its one-line summary.

use serde::Serialize;

use super::config::RunConfig;
use crate::dyadic_sums::{DyadicDiagnosis, DyadicSumState};
use crate::error::Result;
use crate::float_format::{format, sci, sci_opt};
use crate::functionals::{CertificateVerdict, FunctionalReport, PackingEstimate, Status};
use crate::spectral_oracle::{NormEstimate, NormVerdict, RieszCheck};
use crate::testbed::Expected;

pub const SCHEMA: u32 = 1;

/// Agreement between the certificates and the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CrossCheck {
    #[serde(rename = "consistent")]
    Consistent,
    /// A criterion was satisfied while the oracle ladder diverges.
    #[serde(rename = "FALSE_POSITIVE")]
    FalsePositive,
    #[serde(rename = "not-applicable")]
    NotApplicable,
}

impl CrossCheck {
    pub fn evaluate(certificates: &[CertificateVerdict], oracle: Option<&NormEstimate>) -> Self {
        let Some(o) = oracle else {
            return CrossCheck::NotApplicable;
        };
        let satisfied = certificates.iter().any(|c| c.status == Status::Satisfied);
        match o.verdict {
            NormVerdict::Diverging { .. } if satisfied => CrossCheck::FalsePositive,
            NormVerdict::Inconclusive => CrossCheck::NotApplicable,
            _ => CrossCheck::Consistent,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CrossCheck::Consistent => "consistent",
            CrossCheck::FalsePositive => "FALSE_POSITIVE",
            CrossCheck::NotApplicable => "not-applicable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamEcho {
    pub name: String,
    #[serde(serialize_with = "sci")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderRung {
    #[serde(serialize_with = "sci")]
    pub half_width: f64,
    pub samples: usize,
}

/// Configuration as actually used (after ladder fitting).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub family: String,
    pub params: Vec<ParamEcho>,
    pub expected: Expected,
    #[serde(serialize_with = "sci_opt")]
    pub alpha: Option<f64>,
    #[serde(serialize_with = "sci_opt")]
    pub beta: Option<f64>,
    pub ladder: Vec<LadderRung>,
    pub criteria: Vec<String>,
    #[serde(serialize_with = "sci")]
    pub delta: f64,
    pub dyadic_levels: Vec<u32>,
}

impl ConfigEcho {
    pub(crate) fn new(
        cfg: &RunConfig,
        expected: &Expected,
        exponents: Option<(f64, f64)>,
        ladder: &[(f64, usize)],
    ) -> Self {
        let mut params: Vec<ParamEcho> = cfg
            .family
            .params()
            .into_iter()
            .map(|(k, v)| ParamEcho {
                name: k.into(),
                value: v,
            })
            .collect();
        params.sort_by(|a, b| a.name.cmp(&b.name));
        Self {
            family: cfg.family.to_string(),
            params,
            expected: expected.clone(),
            alpha: exponents.map(|e| e.0),
            beta: exponents.map(|e| e.1),
            ladder: ladder
                .iter()
                .map(|&(half_width, samples)| LadderRung {
                    half_width,
                    samples,
                })
                .collect(),
            criteria: cfg.criteria.iter().map(|c| c.name().to_string()).collect(),
            delta: cfg.delta(),
            dyadic_levels: cfg.levels(),
        }
    }
}

/// Dyadic-sum ladder with its diagnosis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicSummary {
    pub diagnosis: DyadicDiagnosis,
    pub states: Vec<DyadicSumState>,
}

/// Checks on the representing density at the finest rung.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralChecks {
    #[serde(serialize_with = "sci")]
    pub half_width: f64,
    pub samples: usize,
    #[serde(serialize_with = "sci")]
    pub g_l1: f64,
    #[serde(serialize_with = "sci")]
    pub plancherel: f64,
    #[serde(serialize_with = "sci")]
    pub edge_ratio: f64,
    pub riesz: RieszCheck,
    /// `‖i sign g‖_1`.
    #[serde(serialize_with = "sci")]
    pub conjugate_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timings {
    pub certificates_ms: u128,
    pub oracle_ms: u128,
    pub total_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub config: ConfigEcho,
    pub functionals: Vec<FunctionalReport>,
    pub certificates: Vec<CertificateVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub packing: Option<PackingEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dyadic: Option<DyadicSummary>,
    pub oracle: Option<NormEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralChecks>,
    pub cross_check: CrossCheck,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn certificate(&self, name: &str) -> Option<&CertificateVerdict> {
        self.certificates
            .iter()
            .find(|c| c.criterion.name() == name)
    }

    pub fn functional(&self, name: &str) -> Option<&FunctionalReport> {
        self.functionals.iter().find(|f| f.name == name)
    }

    /// `family: criterion=status ... | oracle <verdict> <norm> | cross_check <value>`.
    pub fn summary(&self) -> String {
        let mut parts = vec![format!(
            "{} [{}]",
            self.config.family,
            self.config.expected.name()
        )];
        if !self.certificates.is_empty() {
            let certs: Vec<String> = self
                .certificates
                .iter()
                .map(|c| {
                    let s = serde_json::to_value(c.status).ok();
                    format!(
                        "{}={}",
                        c.criterion,
                        s.and_then(|v| v.as_str().map(String::from))
                            .unwrap_or_default()
                    )
                })
                .collect();
            parts.push(certs.join(" "));
        }
        if self.certificates.is_empty() && !self.functionals.is_empty() {
            let f: Vec<String> = self
                .functionals
                .iter()
                .map(|r| format!("{}={}", r.name, format(r.value)))
                .collect();
            parts.push(f.join(" "));
        }
        if let Some(o) = &self.oracle {
            parts.push(format!(
                "oracle {} norm={}",
                o.verdict.name(),
                format(o.last_value())
            ));
        }
        parts.push(format!("cross_check {}", self.cross_check.name()));
        parts.join(" | ")
    }
}
