//! Run configuration and ladder selection.

use std::path::PathBuf;

use crate::dyadic_sums::{DEFAULT_LEVELS, MIN_TRUNCATION};
use crate::error::{Error, Result};
use crate::function_model::AnalyticFunction;
use crate::functionals::Criterion;
use crate::spectral_oracle::{validate_ladder, LadderOptions};
use crate::testbed::FamilySpec;

/// Default one-dimensional ladder.
pub const DEFAULT_LADDER: [(f64, usize); 3] = [(64.0, 1 << 14), (128.0, 1 << 15), (256.0, 1 << 16)];
/// Default two-dimensional ladder (`N × N` samples per rung).
pub const DEFAULT_LADDER_2D: [(f64, usize); 3] = [(8.0, 256), (16.0, 512), (32.0, 1024)];
/// Default truncation levels for two-dimensional dyadic sums.
pub const DEFAULT_LEVELS_2D: [u32; 3] = [4, 5, 6];
/// Smallest first-rung half-width the automatic shrink will go down to.
const MIN_AUTO_HALF_WIDTH: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub family: FamilySpec,
    /// `None` selects the default ladder for the family's dimension.
    pub ladder: Option<Vec<(f64, usize)>>,
    pub criteria: Vec<Criterion>,
    /// Exponent of the `A_δ` criterion; 0.5 when unset.
    pub delta: Option<f64>,
    /// Truncation levels for the dyadic-sum criterion.
    pub dyadic_levels: Option<Vec<u32>>,
    pub oracle: LadderOptions,
    /// Wall-clock timings in the report. Off by default so reports are reproducible byte for byte.
    pub timings: bool,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(family: FamilySpec) -> Self {
        let criteria = if family.is_2d() {
            vec![Criterion::Thm13TwoD]
        } else {
            vec![Criterion::Thm11a]
        };
        Self {
            family,
            ladder: None,
            criteria,
            delta: None,
            dyadic_levels: None,
            oracle: LadderOptions::default(),
            timings: false,
            out: None,
        }
    }

    pub fn with_criteria(mut self, criteria: &[Criterion]) -> Self {
        self.criteria = criteria.to_vec();
        self
    }

    pub fn with_ladder(mut self, ladder: &[(f64, usize)]) -> Self {
        self.ladder = Some(ladder.to_vec());
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(0.5)
    }

    pub fn levels(&self) -> Vec<u32> {
        match &self.dyadic_levels {
            Some(l) => l.clone(),
            None if self.family.is_2d() => DEFAULT_LEVELS_2D.to_vec(),
            None => DEFAULT_LEVELS.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.criteria.is_empty() {
            return Err(Error::Config("at least one criterion is required".into()));
        }
        if let Some(l) = &self.ladder {
            validate_ladder(l)?;
        }
        let d = self.delta();
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::Config(format!("delta must lie in (0, 1), got {d}")));
        }
        let levels = self.levels();
        if levels.len() < 3 || levels.windows(2).any(|w| w[1] <= w[0]) || levels[0] < MIN_TRUNCATION
        {
            return Err(Error::Config(format!(
                "dyadic levels must be at least three increasing values >= {MIN_TRUNCATION}, got {levels:?}"
            )));
        }
        Ok(())
    }
}

/// Parses `L:N[,L:N...]`.
pub fn parse_ladder(s: &str) -> Result<Vec<(f64, usize)>> {
    s.split(',')
        .map(|rung| {
            let (l, n) = rung
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("ladder rung '{rung}' is not L:N")))?;
            let l: f64 = l
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad half-width '{l}'")))?;
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad sample count '{n}'")))?;
            Ok((l, n))
        })
        .collect()
}

/// Parses a comma-separated criteria list.
pub fn parse_criteria(s: &str) -> Result<Vec<Criterion>> {
    s.split(',')
        .filter(|c| !c.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Halves every half-width of the default ladder until its finest rung can be
/// resolved within the sample cap. Returns the ladder and whether it shrank.
pub fn fit_ladder(
    f: &AnalyticFunction,
    ladder: &[(f64, usize)],
    opts: &LadderOptions,
) -> (Vec<(f64, usize)>, bool) {
    let mut out = ladder.to_vec();
    let mut shrunk = false;
    loop {
        let (l, _) = *out.last().unwrap();
        if f.samples_for_resolution(l, opts.samples_per_period) <= opts.max_samples
            || out[0].0 / 2.0 < MIN_AUTO_HALF_WIDTH
        {
            return (out, shrunk);
        }
        for r in &mut out {
            r.0 /= 2.0;
        }
        shrunk = true;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testbed::make_family_1d;

    #[test]
    fn parsing() {
        assert_eq!(
            parse_ladder("64:16384,128:32768").unwrap(),
            vec![(64.0, 16384), (128.0, 32768)]
        );
        assert!(parse_ladder("64").is_err());
        assert_eq!(
            parse_criteria("thm11a,thmC").unwrap(),
            vec![Criterion::Thm11a, Criterion::ThmC]
        );
        assert!(parse_criteria("nope").is_err());
    }

    #[test]
    fn validation() {
        let c = RunConfig::new(FamilySpec::Gaussian);
        assert!(c.validate().is_ok());
        assert!(c.clone().with_criteria(&[]).validate().is_err());
        assert!(c.clone().with_delta(1.5).validate().is_err());
        assert!(c
            .with_ladder(&[(64.0, 1 << 14), (128.0, 1 << 14), (256.0, 1 << 16)])
            .validate()
            .is_err());
    }

    #[test]
    fn fast_chirps_shrink_the_ladder() {
        let opts = LadderOptions::default();
        let g = make_family_1d(&FamilySpec::Gaussian).unwrap();
        assert_eq!(
            fit_ladder(&g.function, &DEFAULT_LADDER, &opts),
            (DEFAULT_LADDER.to_vec(), false)
        );
        let c = make_family_1d(&FamilySpec::corollary(2.0, 3.0)).unwrap();
        let (l, shrunk) = fit_ladder(&c.function, &DEFAULT_LADDER, &opts);
        assert!(shrunk);
        assert_eq!(l[2].0, 64.0);
        assert!(c.function.samples_for_resolution(64.0, 8.0) <= opts.max_samples);
    }
}
