//! Named analytic families with their expected classification.
//!
//! | family | `f(t)` | member when |
//! |---|---|---|
//! | `polya(a)` | `(1+|t|)^{-a}` | always (even, convex, decreasing) |
//! | `zygmund_odd(γ)` | `sign(t)|t|^γ (1-|t|)_+` | `γ > 0` |
//! | `corollary(a, b, gap)` | `w(|t|) |t|^{-a} sin(|t|^b)` | `α + β > 1` with `α = a`, `β = a+1-b` |
//! | `stein_chirp(a1, b1)` | `e^{i|t|^{a1}} (1+t^2)^{-b1}` | not when `a1 ≠ 1` and `4 b1 < a1` |
//! | `gaussian`, `exp_decay`, `triangle` | closed forms with `‖f‖_A = 1` | always |
//! | `tensor2d(f, g)` | `f(x) g(y)` | both factors members |
//! | `mixed2d(a)` | `(1+x^2+y^2)^{-a}` | always |
//!
//! The cutoff `w` of the corollary family is the quintic smoothstep (C²) rising
//! from 0 at `gap` to 1 at `2 gap`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function_model::{AnalyticFunction, AnalyticFunction2D, Parity};
use crate::functionals::{corollary_classify, ExponentClass};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expected {
    Member,
    NonMember,
    Boundary,
    MemberIff(String),
}

impl Expected {
    pub fn name(&self) -> &str {
        match self {
            Expected::Member => "member",
            Expected::NonMember => "non_member",
            Expected::Boundary => "boundary",
            Expected::MemberIff(_) => "member_iff",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    Polya {
        a: f64,
    },
    ZygmundOdd {
        gamma: f64,
    },
    Corollary {
        a: f64,
        b: f64,
        gap: f64,
    },
    SteinChirp {
        a1: f64,
        b1: f64,
    },
    Gaussian,
    ExpDecay,
    Triangle,
    Tensor2d {
        fx: Box<FamilySpec>,
        fy: Box<FamilySpec>,
    },
    Mixed2d {
        a: f64,
    },
}

pub const FAMILY_NAMES: [&str; 9] = [
    "polya",
    "zygmund_odd",
    "corollary",
    "stein_chirp",
    "gaussian",
    "exp_decay",
    "triangle",
    "tensor2d",
    "mixed2d",
];

impl FamilySpec {
    pub fn polya(a: f64) -> Self {
        FamilySpec::Polya { a }
    }

    pub fn corollary(a: f64, b: f64) -> Self {
        FamilySpec::Corollary { a, b, gap: 1.0 }
    }

    pub fn stein_chirp(a1: f64, b1: f64) -> Self {
        FamilySpec::SteinChirp { a1, b1 }
    }

    /// The chirp with decay exponents `(α, β)`: `b1 = α/2`, `a1 = α - β + 1`.
    pub fn stein_for_exponents(alpha: f64, beta: f64) -> Self {
        FamilySpec::SteinChirp {
            a1: alpha - beta + 1.0,
            b1: alpha / 2.0,
        }
    }

    pub fn tensor2d(fx: FamilySpec, fy: FamilySpec) -> Self {
        FamilySpec::Tensor2d {
            fx: Box::new(fx),
            fy: Box::new(fy),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Polya { .. } => "polya",
            FamilySpec::ZygmundOdd { .. } => "zygmund_odd",
            FamilySpec::Corollary { .. } => "corollary",
            FamilySpec::SteinChirp { .. } => "stein_chirp",
            FamilySpec::Gaussian => "gaussian",
            FamilySpec::ExpDecay => "exp_decay",
            FamilySpec::Triangle => "triangle",
            FamilySpec::Tensor2d { .. } => "tensor2d",
            FamilySpec::Mixed2d { .. } => "mixed2d",
        }
    }

    pub fn is_2d(&self) -> bool {
        matches!(
            self,
            FamilySpec::Tensor2d { .. } | FamilySpec::Mixed2d { .. }
        )
    }

    /// Numeric parameters in a fixed order (CLI keys).
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            FamilySpec::Polya { a } | FamilySpec::Mixed2d { a } => vec![("a", a)],
            FamilySpec::ZygmundOdd { gamma } => vec![("gamma", gamma)],
            FamilySpec::Corollary { a, b, gap } => vec![("a", a), ("b", b), ("gap", gap)],
            FamilySpec::SteinChirp { a1, b1 } => vec![("a1", a1), ("b1", b1)],
            _ => Vec::new(),
        }
    }

    /// Builds a spec from a family name and `key = value` parameters.
    /// Missing parameters take defaults; unknown keys are rejected. The chirp
    /// also accepts its decay exponents `alpha`, `beta` in place of `a1`, `b1`.
    pub fn from_parts(
        name: &str,
        params: &BTreeMap<String, f64>,
        fx: Option<&str>,
        fy: Option<&str>,
    ) -> Result<Self> {
        let allowed: &[&str] = match name {
            "polya" | "mixed2d" => &["a"],
            "zygmund_odd" => &["gamma"],
            "corollary" => &["a", "b", "gap"],
            "stein_chirp" => &["a1", "b1", "alpha", "beta"],
            "gaussian" | "exp_decay" | "triangle" | "tensor2d" => &[],
            other => return Err(Error::Config(format!("unknown family '{other}'"))),
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Config(format!(
                "family '{name}' has no parameter '{k}'"
            )));
        }
        let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
        Ok(match name {
            "polya" => FamilySpec::Polya { a: get("a", 1.0) },
            "mixed2d" => FamilySpec::Mixed2d { a: get("a", 1.5) },
            "zygmund_odd" => FamilySpec::ZygmundOdd {
                gamma: get("gamma", 0.5),
            },
            "corollary" => FamilySpec::Corollary {
                a: get("a", 2.0),
                b: get("b", 3.0),
                gap: get("gap", 1.0),
            },
            "stein_chirp" => match (params.get("alpha"), params.get("beta")) {
                (None, None) => FamilySpec::SteinChirp {
                    a1: get("a1", 2.0),
                    b1: get("b1", 0.4),
                },
                (Some(&alpha), Some(&beta))
                    if !params.contains_key("a1") && !params.contains_key("b1") =>
                {
                    FamilySpec::stein_for_exponents(alpha, beta)
                }
                _ => {
                    return Err(Error::Config(
                        "stein_chirp takes either a1 and b1, or alpha and beta".into(),
                    ))
                }
            },
            "gaussian" => FamilySpec::Gaussian,
            "exp_decay" => FamilySpec::ExpDecay,
            "triangle" => FamilySpec::Triangle,
            "tensor2d" => FamilySpec::tensor2d(
                Self::parse_inline(fx.unwrap_or("gaussian"))?,
                Self::parse_inline(fy.unwrap_or("gaussian"))?,
            ),
            _ => unreachable!(),
        })
    }

    /// Parses `name` or `name:key=value:key=value` (one-dimensional families only).
    pub fn parse_inline(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or("").trim();
        let mut params = BTreeMap::new();
        for p in parts {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in '{s}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad number '{v}' in '{s}'")))?;
            params.insert(k.trim().to_string(), v);
        }
        let spec = Self::from_parts(name, &params, None, None)?;
        if spec.is_2d() {
            return Err(Error::Config(format!(
                "tensor factors must be one-dimensional, got '{name}'"
            )));
        }
        Ok(spec)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Tensor2d { fx, fy } => write!(f, "tensor2d({fx},{fy})"),
            _ => {
                let p = self.params();
                if p.is_empty() {
                    return f.write_str(self.name());
                }
                let inner: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
                write!(f, "{}({})", self.name(), inner.join(","))
            }
        }
    }
}

/// A one-dimensional family ready for sampling.
#[derive(Debug, Clone)]
pub struct Family1D {
    pub spec: FamilySpec,
    pub function: AnalyticFunction,
    pub expected: Expected,
    /// Declared `(α, β)` with `f = O(|t|^{-α})`, `f' = O(|t|^{-β})`.
    pub exponents: Option<(f64, f64)>,
    /// `‖f‖_A` when known in closed form.
    pub known_norm: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Family2D {
    pub spec: FamilySpec,
    pub function: AnalyticFunction2D,
    pub expected: Expected,
    pub known_norm: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum Family {
    OneD(Family1D),
    TwoD(Family2D),
}

impl Family {
    pub fn expected(&self) -> &Expected {
        match self {
            Family::OneD(f) => &f.expected,
            Family::TwoD(f) => &f.expected,
        }
    }
}

fn bad(msg: String) -> Error {
    Error::BadParams(msg)
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{name} must be positive, got {v}")))
    }
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Quintic smoothstep: 0 below `r`, 1 above `2r`, C² in between.
fn cutoff(u: f64, r: f64) -> (f64, f64) {
    let s = (u - r) / r;
    if s <= 0.0 {
        (0.0, 0.0)
    } else if s >= 1.0 {
        (1.0, 0.0)
    } else {
        let w = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
        let dw = 30.0 * s * s * (1.0 - s) * (1.0 - s) / r;
        (w, dw)
    }
}

fn from_exponents(alpha: f64, beta: f64) -> Expected {
    match corollary_classify(alpha, beta) {
        Ok(ExponentClass::Member) => Expected::Member,
        Ok(ExponentClass::NotProvable) | Err(_) => Expected::Boundary,
        Ok(ExponentClass::CounterexampleRegime) => Expected::NonMember,
    }
}

/// Builds a one-dimensional family.
pub fn make_family_1d(spec: &FamilySpec) -> Result<Family1D> {
    match make_family(spec)? {
        Family::OneD(f) => Ok(f),
        Family::TwoD(_) => Err(Error::Config(format!("{} is two-dimensional", spec.name()))),
    }
}

/// Builds the analytic function, its expected classification and metadata.
pub fn make_family(spec: &FamilySpec) -> Result<Family> {
    let label = spec.to_string();
    let one = |function: AnalyticFunction, expected, exponents, known_norm| {
        Ok(Family::OneD(Family1D {
            spec: spec.clone(),
            function,
            expected,
            exponents,
            known_norm,
        }))
    };
    match *spec {
        FamilySpec::Polya { a } => {
            positive("a", a)?;
            let f = AnalyticFunction::real(label, move |t: f64| (1.0 + t.abs()).powf(-a))
                .with_real_derivative(move |t: f64| {
                    -a * t.signum() * (1.0 + t.abs()).powf(-a - 1.0)
                })
                .with_parity(Parity::Even);
            one(f, Expected::Member, Some((a, a + 1.0)), Some(1.0))
        }
        FamilySpec::ZygmundOdd { gamma } => {
            if !gamma.is_finite() {
                return Err(bad(format!("gamma must be finite, got {gamma}")));
            }
            let f = AnalyticFunction::real(label, move |t: f64| {
                let u = t.abs();
                if u == 0.0 || u >= 1.0 {
                    0.0
                } else {
                    t.signum() * u.powf(gamma) * (1.0 - u)
                }
            })
            // even derivative; at |t| = 1 the inner one-sided value
            .with_real_derivative(move |t: f64| {
                let u = t.abs();
                if u > 1.0 {
                    0.0
                } else if u == 0.0 {
                    if gamma > 1.0 {
                        0.0
                    } else if gamma == 1.0 {
                        1.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    gamma * u.powf(gamma - 1.0) * (1.0 - u) - u.powf(gamma)
                }
            })
            .with_parity(Parity::Odd);
            let expected = if gamma > 0.0 {
                Expected::Member
            } else {
                Expected::NonMember
            };
            one(f, expected, None, None)
        }
        FamilySpec::Corollary { a, b, gap } => {
            positive("a", a)?;
            positive("b", b)?;
            positive("gap", gap)?;
            let f = AnalyticFunction::real(label, move |t: f64| {
                let u = t.abs();
                if u <= gap {
                    return 0.0;
                }
                cutoff(u, gap).0 * u.powf(-a) * u.powf(b).sin()
            })
            .with_real_derivative(move |t: f64| {
                let u = t.abs();
                if u <= gap {
                    return 0.0;
                }
                let (w, dw) = cutoff(u, gap);
                let ub = u.powf(b);
                let core = u.powf(-a) * ub.sin();
                let dcore = -a * u.powf(-a - 1.0) * ub.sin() + b * u.powf(b - 1.0 - a) * ub.cos();
                t.signum() * (dw * core + w * dcore)
            })
            .with_tail_exponents(a, a + 1.0 - b)
            .with_origin_gap(gap)
            .with_parity(Parity::Even)
            .with_phase_rate(move |u| b * u.powf(b - 1.0));
            let (alpha, beta) = (a, a + 1.0 - b);
            one(f, from_exponents(alpha, beta), Some((alpha, beta)), None)
        }
        FamilySpec::SteinChirp { a1, b1 } => {
            positive("a1", a1)?;
            positive("b1", b1)?;
            let f = AnalyticFunction::new(label, move |t: f64| {
                Complex64::from_polar((1.0 + t * t).powf(-b1), t.abs().powf(a1))
            })
            .with_derivative(move |t: f64| {
                let u = t.abs();
                let val = Complex64::from_polar((1.0 + t * t).powf(-b1), u.powf(a1));
                let phase = Complex64::new(-2.0 * b1 * u / (1.0 + t * t), a1 * u.powf(a1 - 1.0));
                if u == 0.0 && a1 < 1.0 {
                    return Complex64::new(f64::NAN, f64::NAN);
                }
                val * phase * t.signum()
            })
            .with_tail_exponents(2.0 * b1, 2.0 * b1 + 1.0 - a1)
            .with_parity(Parity::Even)
            .with_phase_rate(move |u| a1 * u.powf(a1 - 1.0));
            let (alpha, beta) = (2.0 * b1, 2.0 * b1 + 1.0 - a1);
            let expected = if a1 != 1.0 && 4.0 * b1 < a1 {
                Expected::NonMember
            } else if a1 == 1.0 && 4.0 * b1 <= 1.0 {
                Expected::MemberIff("undecided for a1 = 1 with 4 b1 <= 1".into())
            } else {
                from_exponents(alpha, beta)
            };
            one(f, expected, Some((alpha, beta)), None)
        }
        FamilySpec::Gaussian => {
            let f = AnalyticFunction::real(label, |t: f64| (-0.5 * t * t).exp())
                .with_real_derivative(|t: f64| -t * (-0.5 * t * t).exp())
                .with_parity(Parity::Even);
            one(f, Expected::Member, None, Some(1.0))
        }
        FamilySpec::ExpDecay => {
            let f = AnalyticFunction::real(label, |t: f64| (-t.abs()).exp())
                .with_real_derivative(|t: f64| -t.signum() * (-t.abs()).exp())
                .with_parity(Parity::Even);
            one(f, Expected::Member, None, Some(1.0))
        }
        FamilySpec::Triangle => {
            let f = AnalyticFunction::real(label, |t: f64| (1.0 - t.abs()).max(0.0))
                .with_real_derivative(|t: f64| if t.abs() <= 1.0 { -t.signum() } else { 0.0 })
                .with_parity(Parity::Even);
            one(f, Expected::Member, None, Some(1.0))
        }
        FamilySpec::Tensor2d { ref fx, ref fy } => {
            let (a, b) = (make_family_1d(fx)?, make_family_1d(fy)?);
            let expected = match (&a.expected, &b.expected) {
                (Expected::Member, Expected::Member) => Expected::Member,
                _ => Expected::MemberIff("both factors are members".into()),
            };
            let known = a.known_norm.zip(b.known_norm).map(|(p, q)| p * q);
            let function = AnalyticFunction2D::tensor(&a.function, &b.function);
            Ok(Family::TwoD(Family2D {
                spec: spec.clone(),
                function,
                expected,
                known_norm: known,
            }))
        }
        FamilySpec::Mixed2d { a } => {
            positive("a", a)?;
            let function = AnalyticFunction2D::new(label, move |x: f64, y: f64| {
                re((1.0 + x * x + y * y).powf(-a))
            })
            .with_partials(
                move |x: f64, y: f64| re(-2.0 * a * x * (1.0 + x * x + y * y).powf(-a - 1.0)),
                move |x: f64, y: f64| re(-2.0 * a * y * (1.0 + x * x + y * y).powf(-a - 1.0)),
                move |x: f64, y: f64| {
                    re(4.0 * a * (a + 1.0) * x * y * (1.0 + x * x + y * y).powf(-a - 2.0))
                },
            );
            Ok(Family::TwoD(Family2D {
                spec: spec.clone(),
                function,
                expected: Expected::Member,
                known_norm: Some(1.0),
            }))
        }
    }
}

/// The families exercised by the acceptance suite.
pub fn shipped_testbed() -> Vec<FamilySpec> {
    let mut v = vec![
        FamilySpec::Gaussian,
        FamilySpec::ExpDecay,
        FamilySpec::Triangle,
        FamilySpec::polya(0.5),
        FamilySpec::polya(1.0),
        FamilySpec::polya(2.0),
        FamilySpec::ZygmundOdd { gamma: 0.5 },
        FamilySpec::ZygmundOdd { gamma: 1.5 },
        FamilySpec::corollary(2.0, 3.0),
        FamilySpec::corollary(1.0, 1.5),
        FamilySpec::corollary(1.5, 1.2),
        FamilySpec::stein_chirp(2.0, 0.4),
        FamilySpec::stein_chirp(1.4, 0.3),
        FamilySpec::stein_chirp(2.0, 0.8),
    ];
    v.push(FamilySpec::tensor2d(
        FamilySpec::Gaussian,
        FamilySpec::Gaussian,
    ));
    v.push(FamilySpec::Mixed2d { a: 1.5 });
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelopes::tail_sup;
    use crate::function_model::{sample, Domain1D, Field};
    use crate::quadrature::loglog_slope;

    #[test]
    fn published_examples() {
        let c = make_family_1d(&FamilySpec::corollary(2.0, 3.0)).unwrap();
        assert_eq!(c.exponents, Some((2.0, 0.0)));
        assert_eq!(c.expected, Expected::Member);
        let s = make_family_1d(&FamilySpec::stein_chirp(2.0, 0.4)).unwrap();
        assert_eq!(s.expected, Expected::NonMember);
        let z = make_family_1d(&FamilySpec::ZygmundOdd { gamma: -0.5 }).unwrap();
        assert_eq!(z.expected, Expected::NonMember);
        assert_eq!(
            make_family_1d(&FamilySpec::ZygmundOdd { gamma: 0.5 })
                .unwrap()
                .expected,
            Expected::Member
        );
        assert!(matches!(
            make_family(&FamilySpec::polya(-1.0)),
            Err(Error::BadParams(_))
        ));
    }

    #[test]
    fn stein_for_exponents_round_trips() {
        let s = make_family_1d(&FamilySpec::stein_for_exponents(0.8, 0.1)).unwrap();
        let (a, b) = s.exponents.unwrap();
        assert!((a - 0.8).abs() < 1e-15 && (b - 0.1).abs() < 1e-15);
        assert_eq!(s.expected, Expected::NonMember);
    }

    #[test]
    fn derivative_consistency() {
        let probes: Vec<f64> = (0..400)
            .map(|k| -19.95 + 0.1 * k as f64)
            .filter(|t: &f64| {
                let u = t.abs();
                u > 0.05 && (u - 1.0).abs() > 0.05 && (u - 2.0).abs() > 0.05
            })
            .collect();
        for spec in shipped_testbed().into_iter().filter(|s| !s.is_2d()) {
            let fam = make_family_1d(&spec).unwrap();
            let err = fam.function.derivative_mismatch(&probes).unwrap();
            assert!(err <= 1e-4, "{spec}: {err}");
        }
    }

    #[test]
    fn tail_exponent_honesty() {
        let d = Domain1D::new(2000.0, 1 << 22).unwrap();
        for spec in [
            FamilySpec::polya(0.5),
            FamilySpec::polya(2.0),
            FamilySpec::corollary(1.0, 1.5),
            FamilySpec::corollary(2.0, 2.5),
            FamilySpec::stein_chirp(1.4, 0.3),
        ] {
            let fam = make_family_1d(&spec).unwrap();
            let (alpha, beta) = fam.exponents.unwrap();
            let g = sample(&fam.function, d).unwrap();
            for (field, declared) in [(Field::Values, alpha), (Field::Derivative, beta)] {
                let e = tail_sup(&g, field).unwrap();
                let (x, v): (Vec<f64>, Vec<f64>) = e
                    .abscissae()
                    .iter()
                    .zip(e.values())
                    .filter(|(t, _)| **t >= 180.0 && **t <= 1800.0)
                    .map(|(a, b)| (*a, *b))
                    .unzip();
                let slope = loglog_slope(&x, &v).unwrap();
                assert!(
                    (slope + declared).abs() <= 0.1,
                    "{spec} {field:?}: slope {slope} vs -{declared}"
                );
            }
        }
    }

    #[test]
    fn inline_parsing() {
        let s = FamilySpec::parse_inline("polya:a=2").unwrap();
        assert_eq!(s, FamilySpec::polya(2.0));
        assert!(FamilySpec::parse_inline("mixed2d").is_err());
        assert!(FamilySpec::parse_inline("polya:q=2").is_err());
        let t = FamilySpec::from_parts(
            "tensor2d",
            &BTreeMap::new(),
            Some("gaussian"),
            Some("exp_decay"),
        )
        .unwrap();
        assert_eq!(t.to_string(), "tensor2d(gaussian,exp_decay)");
    }
}
