//! Parameter sweeps written as CSV.

use std::collections::BTreeMap;

use super::certify_command;
use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::float_format::format;
use crate::functionals::{Criterion, CONDITION_NAMES};
use crate::parallel;
use crate::testbed::FamilySpec;

pub const MAX_SWEEP_POINTS: usize = 10_000;

/// One swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    /// Explicit values, visited in ascending order.
    Values { name: String, values: Vec<f64> },
    /// `name = scale * base + offset`, evaluated per point.
    Derived {
        name: String,
        base: String,
        scale: f64,
        offset: f64,
    },
}

impl Axis {
    pub fn name(&self) -> &str {
        match self {
            Axis::Values { name, .. } | Axis::Derived { name, .. } => name,
        }
    }
}

fn number(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad number '{s}' in sweep axis")))
}

/// Trims representation noise from generated grid values (`0.6 + 3*0.2`).
fn tidy(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}

/// Parses `name=start:stop:step`, `name=v1,v2,...`, or a derived axis
/// `name=other+c`, `name=other-c`, `name=other*c`.
pub fn parse_axis(s: &str) -> Result<Axis> {
    let (name, spec) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("sweep axis '{s}' is not name=values")))?;
    let name = name.trim().to_string();
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Axis::Values {
            name,
            values: Vec::new(),
        });
    }
    if spec.starts_with(|c: char| c.is_ascii_alphabetic()) {
        let pos = spec
            .find(['+', '-', '*'])
            .ok_or_else(|| Error::Config(format!("derived axis '{s}' needs +, - or *")))?;
        let (base, rest) = spec.split_at(pos);
        let c = number(&rest[1..])?;
        let (scale, offset) = match &rest[..1] {
            "+" => (1.0, c),
            "-" => (1.0, -c),
            _ => (c, 0.0),
        };
        return Ok(Axis::Derived {
            name,
            base: base.trim().to_string(),
            scale,
            offset,
        });
    }
    let mut values: Vec<f64> = if spec.contains(':') {
        let parts: Vec<f64> = spec.split(':').map(number).collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(Error::Config(format!(
                "range '{spec}' is not start:stop:step"
            )));
        };
        if !(step > 0.0) || stop < start {
            return Err(Error::Config(format!(
                "range '{spec}' needs step > 0 and stop >= start"
            )));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > MAX_SWEEP_POINTS {
            return Err(Error::Config(format!(
                "range '{spec}' has more than {MAX_SWEEP_POINTS} values"
            )));
        }
        (0..count).map(|k| tidy(start + k as f64 * step)).collect()
    } else {
        spec.split(',').map(number).collect::<Result<_>>()?
    };
    values.sort_by(f64::total_cmp);
    values.dedup();
    Ok(Axis::Values { name, values })
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub family: String,
    /// Parameters held fixed across the sweep.
    pub fixed: BTreeMap<String, f64>,
    pub axes: Vec<Axis>,
    /// Criteria, ladder, delta and oracle options shared by every point.
    pub template: RunConfig,
}

impl SweepConfig {
    pub fn new(family: &str, axes: Vec<Axis>, template: RunConfig) -> Self {
        Self {
            family: family.to_string(),
            fixed: BTreeMap::new(),
            axes,
            template,
        }
    }

    /// All parameter maps, in lexicographic order of the swept values (axes sorted by name).
    pub fn points(&self) -> Result<Vec<BTreeMap<String, f64>>> {
        let mut value_axes: Vec<(&str, &[f64])> = self
            .axes
            .iter()
            .filter_map(|a| match a {
                Axis::Values { name, values } => Some((name.as_str(), values.as_slice())),
                Axis::Derived { .. } => None,
            })
            .collect();
        value_axes.sort_by(|a, b| a.0.cmp(b.0));
        if let Some(w) = value_axes.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Config(format!("axis '{}' given twice", w[0].0)));
        }
        if value_axes.is_empty() || value_axes.iter().any(|a| a.1.is_empty()) {
            return Ok(Vec::new());
        }
        let total = value_axes
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.1.len()));
        if total.is_none_or(|t| t > MAX_SWEEP_POINTS) {
            return Err(Error::Config(format!(
                "sweep exceeds {MAX_SWEEP_POINTS} points"
            )));
        }
        let mut points = vec![self.fixed.clone()];
        for (name, values) in &value_axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.insert(name.to_string(), v);
                        q
                    })
                })
                .collect();
        }
        for a in &self.axes {
            if let Axis::Derived {
                name,
                base,
                scale,
                offset,
            } = a
            {
                for p in &mut points {
                    let b = *p.get(base).ok_or_else(|| {
                        Error::Config(format!("derived axis '{name}' refers to unknown '{base}'"))
                    })?;
                    p.insert(name.clone(), tidy(scale * b + offset));
                }
            }
        }
        Ok(points)
    }

    fn swept_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.axes.iter().map(|a| a.name().to_string()).collect();
        names.sort();
        names
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: Vec<(String, f64)>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub expected: String,
    pub functionals: Vec<Option<f64>>,
    pub statuses: Vec<String>,
    pub oracle_verdict: String,
    /// Last-rung values of the oracle ladder.
    pub oracle_values: Vec<f64>,
    pub cross_check: String,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|p| p.1)
    }

    pub fn oracle_norm(&self) -> Option<f64> {
        self.oracle_values.last().copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub functional_names: Vec<String>,
    pub criteria: Vec<Criterion>,
    pub rows: Vec<SweepRow>,
}

fn functional_columns(criteria: &[Criterion]) -> Vec<String> {
    criteria
        .iter()
        .flat_map(|c| -> Vec<&str> {
            match c {
                Criterion::Thm11a => vec!["A0", "A1", "A01"],
                Criterion::Thm11b => vec!["A_delta"],
                Criterion::Beurling => vec!["V*"],
                Criterion::Quasiconvex => vec!["quasiconvex"],
                Criterion::ThmC => vec!["bernstein_sum"],
                Criterion::Thm13TwoD => CONDITION_NAMES.to_vec(),
            }
        })
        .map(String::from)
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(format).unwrap_or_default()
}

impl SweepTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            let mut rec: Vec<String> = r.params.iter().map(|p| format(p.1)).collect();
            rec.push(opt(r.alpha));
            rec.push(opt(r.beta));
            rec.push(opt(r.alpha.zip(r.beta).map(|(a, b)| a + b)));
            rec.push(r.expected.clone());
            rec.extend(r.functionals.iter().map(|v| opt(*v)));
            rec.extend(r.statuses.iter().cloned());
            rec.push(r.oracle_verdict.clone());
            rec.push(opt(r.oracle_norm()));
            rec.push(r.cross_check.clone());
            rec.push(r.error.clone().unwrap_or_default());
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

fn run_point(
    cfg: &SweepConfig,
    names: &[String],
    functionals: &[String],
    params: &BTreeMap<String, f64>,
) -> SweepRow {
    let echo: Vec<(String, f64)> = names
        .iter()
        .map(|n| (n.clone(), params.get(n).copied().unwrap_or(f64::NAN)))
        .collect();
    let failed = |e: Error| SweepRow {
        params: echo.clone(),
        alpha: None,
        beta: None,
        expected: String::new(),
        functionals: vec![None; functionals.len()],
        statuses: vec![String::new(); cfg.template.criteria.len()],
        oracle_verdict: String::new(),
        oracle_values: Vec::new(),
        cross_check: String::new(),
        error: Some(e.to_string()),
    };
    let spec = match FamilySpec::from_parts(&cfg.family, params, None, None) {
        Ok(s) => s,
        Err(e) => return failed(e),
    };
    let mut run = cfg.template.clone();
    run.family = spec;
    run.out = None;
    let report = match certify_command(&run) {
        Ok(r) => r,
        Err(e) => return failed(e),
    };
    let status_name = |s| {
        serde_json::to_value(s)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default()
    };
    SweepRow {
        params: echo,
        alpha: report.config.alpha,
        beta: report.config.beta,
        expected: report.config.expected.name().to_string(),
        functionals: functionals
            .iter()
            .map(|n| report.functional(n).map(|f| f.value))
            .collect(),
        statuses: run
            .criteria
            .iter()
            .map(|c| {
                report
                    .certificate(c.name())
                    .map(|v| status_name(v.status))
                    .unwrap_or_default()
            })
            .collect(),
        oracle_verdict: report
            .oracle
            .as_ref()
            .map(|o| o.verdict.name().to_string())
            .unwrap_or_default(),
        oracle_values: report
            .oracle
            .as_ref()
            .map(|o| o.values())
            .unwrap_or_default(),
        cross_check: report.cross_check.name().to_string(),
        error: None,
    }
}

/// Runs `certify` at every grid point. Points run concurrently; rows come back
/// in grid order. A failing point fills the `error` column.
pub fn sweep_command(cfg: &SweepConfig) -> Result<SweepTable> {
    if cfg.template.criteria.is_empty() {
        return Err(Error::Config("at least one criterion is required".into()));
    }
    let points = cfg.points()?;
    let names = cfg.swept_names();
    let functionals = functional_columns(&cfg.template.criteria);
    let mut header = names.clone();
    header.extend(["alpha", "beta", "alpha_plus_beta", "expected"].map(String::from));
    header.extend(functionals.iter().cloned());
    header.extend(
        cfg.template
            .criteria
            .iter()
            .map(|c| format!("status_{}", c.name())),
    );
    header.extend(["oracle_verdict", "oracle_norm", "cross_check", "error"].map(String::from));
    let rows = parallel::map(&points, |p| run_point(cfg, &names, &functionals, p));
    Ok(SweepTable {
        header,
        functional_names: functionals,
        criteria: cfg.template.criteria.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing() {
        assert_eq!(
            parse_axis("a=0.6:2.0:0.2").unwrap(),
            Axis::Values {
                name: "a".into(),
                values: vec![0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0]
            }
        );
        assert_eq!(
            parse_axis("b=a+0.5").unwrap(),
            Axis::Derived {
                name: "b".into(),
                base: "a".into(),
                scale: 1.0,
                offset: 0.5
            }
        );
        assert!(
            matches!(parse_axis("a=2,1,1").unwrap(), Axis::Values { values, .. } if values == vec![1.0, 2.0])
        );
        assert!(parse_axis("a").is_err());
        assert!(parse_axis("a=1:0:1").is_err());
    }

    #[test]
    fn empty_grid_gives_header_only() {
        let template = RunConfig::new(FamilySpec::polya(1.0));
        let cfg = SweepConfig::new("polya", vec![parse_axis("a=").unwrap()], template);
        let t = sweep_command(&cfg).unwrap();
        assert!(t.rows.is_empty());
        let csv = t.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("a,alpha,beta,alpha_plus_beta,expected,A0,A1,A01,status_thm11a,"));
    }

    #[test]
    fn polya_sweep_norms_are_one() {
        let template = RunConfig::new(FamilySpec::polya(1.0));
        let cfg = SweepConfig::new("polya", vec![parse_axis("a=0.5,1,2").unwrap()], template);
        let t = sweep_command(&cfg).unwrap();
        assert_eq!(t.rows.len(), 3);
        for r in &t.rows {
            assert_eq!(r.expected, "member");
            assert_eq!(r.oracle_verdict, "converged");
            assert!((r.oracle_norm().unwrap() - 1.0).abs() < 1e-2);
        }
        assert_eq!(t.rows[0].param("a"), Some(0.5));
    }

    #[test]
    fn point_failures_fill_the_error_column() {
        let template = RunConfig::new(FamilySpec::polya(1.0));
        let cfg = SweepConfig::new("polya", vec![parse_axis("a=-1,1").unwrap()], template);
        let t = sweep_command(&cfg).unwrap();
        assert!(t.rows[0].error.as_deref().unwrap().contains("positive"));
        assert!(t.rows[1].error.is_none());
    }
}
