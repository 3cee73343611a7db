//! The one-dimensional functionals `A_0`, `A_1`, `A_01` and `A_δ`.

use std::f64::consts::PI;

use super::FunctionalReport;
use crate::envelopes::{Direction, Envelope};
use crate::error::{Error, Result};
use crate::quadrature::{
    decimate, inverse_weight_rule, log_weight_rule, reverse_cumulative_trapezoid, richardson_error,
    Finiteness,
};

/// Domain cuts used for refinement: `L/4`, `L/2`, `L`, keeping those reaching past `min`.
pub(crate) fn domain_cuts(l: f64, min: f64) -> Vec<f64> {
    [l / 4.0, l / 2.0, l]
        .into_iter()
        .filter(|&c| c > min)
        .collect()
}

fn upto(x: &[f64], cut: f64) -> usize {
    x.partition_point(|&t| t <= cut * (1.0 + 1e-12))
}

fn a0_on(x: &[f64], f0: &[f64]) -> f64 {
    inverse_weight_rule(x, 1.0).apply(|k| f0[k])
}

fn a1_bracket(x: &[f64], f1: &[f64], origin: f64) -> (f64, f64) {
    let rule = log_weight_rule(x, 1.0);
    let lower = rule.apply(|k| f1[k]);
    let upper = rule.apply(|k| if k == 0 { origin.max(f1[0]) } else { f1[k - 1] });
    (lower, upper)
}

fn a01_on(x: &[f64], f0: &[f64], f1: &[f64], inner_tail: f64) -> f64 {
    let p: Vec<f64> = f0.iter().zip(f1).map(|(a, b)| a * b).collect();
    let inner = reverse_cumulative_trapezoid(x, &p);
    inverse_weight_rule(x, 1.0).apply(|k| (inner[k] + inner_tail).sqrt())
}

/// `A_0 = ∫_1^∞ f_0(t)/t dt`, `A_1 = ∫_0^1 f_1(t) ln(2/t) dt` and
/// `A_01 = ∫_1^∞ (∫_t^∞ f_0 f_1)^{1/2} dt/t`.
///
/// `exponents = Some((α, β))` declares `f_0 = O(t^{-α})`, `f_1 = O(t^{-β})`
/// and switches the tails to the matching power-law integrals.
pub fn theorem11a_functionals(
    f0: &Envelope,
    f1: &Envelope,
    exponents: Option<(f64, f64)>,
) -> Result<(FunctionalReport, FunctionalReport, FunctionalReport)> {
    f0.expect(Direction::Tail)?;
    f1.expect(Direction::Tail)?;
    if f0.abscissae() != f1.abscissae() {
        return Err(Error::EnvelopeGridMismatch);
    }
    let x = f0.abscissae();
    let (v0, v1) = (f0.values(), f1.values());
    let l = f0.last_abscissa();
    if l < 1.0 {
        return Err(Error::DomainTooSmall(format!(
            "functionals need L >= 1, got {l}"
        )));
    }
    let cuts = domain_cuts(l, 1.0);
    let (x2, v02, v12) = (decimate(x), decimate(v0), decimate(v1));
    let (f0_l, f1_l) = (*v0.last().unwrap(), *v1.last().unwrap());

    // A_0
    let a0_ref: Vec<f64> = cuts
        .iter()
        .map(|&c| {
            let m = upto(x, c);
            a0_on(&x[..m], &v0[..m])
        })
        .collect();
    let a0_err = richardson_error(*a0_ref.last().unwrap(), a0_on(&x2, &v02));
    let a0_tail = exponents.map(|(alpha, _)| {
        if alpha > 0.0 {
            f0_l / alpha
        } else {
            f64::INFINITY
        }
    });
    let a0 = FunctionalReport::assemble("A0", a0_ref, a0_err, a0_tail);

    // A_1: resolution refinement 4Δ, 2Δ, Δ on the fixed interval (0, 1]
    let origin = f1.origin_value().unwrap_or(v1[0]);
    let (x4, v14) = (decimate(&x2), decimate(&v12));
    let mid = |(lo, hi): (f64, f64)| 0.5 * (lo + hi);
    let fine = a1_bracket(x, v1, origin);
    let a1_ref = vec![
        mid(a1_bracket(&x4, &v14, origin)),
        mid(a1_bracket(&x2, &v12, origin)),
        mid(fine),
    ];
    let a1_tail = exponents.and_then(|(_, beta)| (beta < 0.0).then_some(f64::INFINITY));
    let a1 = FunctionalReport::assemble("A1", a1_ref, 0.5 * (fine.1 - fine.0), a1_tail);

    // A_01
    let a01_ref: Vec<f64> = cuts
        .iter()
        .map(|&c| {
            let m = upto(x, c);
            a01_on(&x[..m], &v0[..m], &v1[..m], 0.0)
        })
        .collect();
    let a01_fine = *a01_ref.last().unwrap();
    let a01_err = richardson_error(a01_fine, a01_on(&x2, &v02, &v12, 0.0));
    let a01_tail = exponents.map(|(alpha, beta)| {
        let gamma = alpha + beta;
        if beta < 0.0 || gamma <= 1.0 {
            return f64::INFINITY;
        }
        let c = f0_l * f1_l * l.powf(gamma);
        let inner_tail = f0_l * f1_l * l / (gamma - 1.0);
        let outer = (c / (gamma - 1.0)).sqrt() * l.powf((1.0 - gamma) / 2.0) * 2.0 / (gamma - 1.0);
        a01_on(x, v0, v1, inner_tail) - a01_fine + outer
    });
    let a01 = FunctionalReport::assemble("A01", a01_ref, a01_err, a01_tail);
    Ok((a0, a1, a01))
}

fn sup_product(t: &[f64], f0: &[f64], finf: &Envelope, delta: f64, limit: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (k, &tk) in t.iter().enumerate() {
        if tk < 2.0 * PI * (1.0 - 1e-12) || tk + 2.0 * PI > limit * (1.0 + 1e-12) {
            continue;
        }
        let v = tk * f0[k].powf(delta) * finf.eval(tk + 2.0 * PI);
        best = Some(best.map_or(v, |b: f64| b.max(v)));
    }
    best
}

/// `A_δ = (sup_{t >= 2π} t f_0(t)^δ f_∞(t + 2π))^{1/(1+δ)}` over grid points with `t + 2π <= L`.
pub fn a_delta(
    f0: &Envelope,
    finf: &Envelope,
    delta: f64,
    origin_gap: f64,
    exponents: Option<(f64, f64)>,
) -> Result<FunctionalReport> {
    f0.expect(Direction::Tail)?;
    finf.expect(Direction::Head)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::BadParams(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if origin_gap < 2.0 * PI * (1.0 - 1e-12) {
        return Err(Error::PreconditionGap(format!(
            "f must vanish on |t| <= 2π; origin gap is {origin_gap}"
        )));
    }
    if finf.eval(4.0 * PI) == 0.0 {
        return Err(Error::ZeroDerivativeScale);
    }
    let l = f0.last_abscissa();
    let root = |s: f64| s.powf(1.0 / (1.0 + delta));
    let refinement: Vec<f64> = domain_cuts(l, 4.0 * PI)
        .into_iter()
        .filter_map(|c| sup_product(f0.abscissae(), f0.values(), finf, delta, c))
        .map(root)
        .collect();
    if refinement.is_empty() {
        return Err(Error::DomainTooSmall(format!(
            "A_delta needs L > 4π, got {l}"
        )));
    }
    let fine = *refinement.last().unwrap();
    let coarse = sup_product(
        &decimate(f0.abscissae()),
        &decimate(f0.values()),
        finf,
        delta,
        l,
    )
    .map(root)
    .unwrap_or(fine);
    let quad_error = (fine - coarse).abs();

    let growths: Vec<f64> = refinement.windows(2).map(|w| w[1] / w[0]).collect();
    let rate = exponents.map(|(alpha, beta)| 1.0 - alpha * delta + (-beta).max(0.0));
    let divergent = rate.is_some_and(|r| r > 0.0)
        || (growths.len() >= 2
            && growths
                .iter()
                .all(|&g| g >= 1.5f64.powf(1.0 / (1.0 + delta))));
    let stable = growths.last().is_some_and(|&g| g < 1.01) || rate.is_some_and(|r| r <= 0.0);
    let (verdict, value, tail) = if divergent {
        (Finiteness::Divergent, f64::INFINITY, None)
    } else if stable {
        (Finiteness::Finite, fine, Some(0.0))
    } else {
        (Finiteness::Inconclusive, fine, None)
    };
    Ok(FunctionalReport {
        name: "A_delta".into(),
        value,
        truncated: fine,
        quad_error,
        tail_bound: tail,
        finite_verdict: verdict,
        refinement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(l: f64, n: usize) -> Vec<f64> {
        let h = l / n as f64;
        (1..=n).map(|k| k as f64 * h).collect()
    }

    fn env(x: &[f64], f: impl Fn(f64) -> f64, d: Direction) -> Envelope {
        let v: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        Envelope::from_samples(x.to_vec(), &v, d, "synthetic").unwrap()
    }

    #[test]
    fn closed_form_functionals() {
        // default-ladder finest rung: L = 256, Δ = 2^-7
        let x = grid(256.0, 1 << 15);
        let f0 = env(&x, |t| (t * t).recip().min(1.0), Direction::Tail);
        let f1 = env(&x, |_| 1.0, Direction::Tail);
        let (a0, a1, _) = theorem11a_functionals(&f0, &f1, Some((2.0, 2.0))).unwrap();
        assert_relative_eq!(a0.value, 0.5, epsilon = 1e-4);
        assert!(a0.quad_error <= 1e-3);
        assert_eq!(a0.finite_verdict, Finiteness::Finite);
        assert_relative_eq!(a1.value, 1.0 + 2f64.ln(), epsilon = 1e-12);
        assert_eq!(a1.quad_error, 0.0);

        let f01 = env(&x, |t| (t * t).recip(), Direction::Tail);
        let (_, _, a01) = theorem11a_functionals(&f01, &f01, Some((2.0, 2.0))).unwrap();
        assert_relative_eq!(a01.value, 2.0 / (3.0 * 3f64.sqrt()), epsilon = 1e-4);
        assert!(a01.quad_error <= 1e-3);
        // without exponents the tail comes from the domain doublings
        let (a0n, _, a01n) = theorem11a_functionals(&f0, &f1, None).unwrap();
        assert_eq!(a0n.finite_verdict, Finiteness::Finite);
        assert_relative_eq!(a0n.value, 0.5, epsilon = 1e-4);
        assert_eq!(a01n.finite_verdict, Finiteness::Inconclusive);
    }

    #[test]
    fn scaling_covariance() {
        let x = grid(64.0, 1 << 12);
        let f0 = env(&x, |t| (1.0 + t).powf(-1.5), Direction::Tail);
        let f1 = env(&x, |t| 1.5 * (1.0 + t).powf(-2.5), Direction::Tail);
        let c = 3.7;
        let g0 = env(&x, |t| c * (1.0 + t).powf(-1.5), Direction::Tail);
        let (a, _, b) = theorem11a_functionals(&f0, &f1, None).unwrap();
        let (a2, _, b2) = theorem11a_functionals(&g0, &f1, None).unwrap();
        assert_relative_eq!(a2.truncated, c * a.truncated, max_relative = 1e-14);
        assert_relative_eq!(b2.truncated, c.sqrt() * b.truncated, max_relative = 1e-14);
    }

    #[test]
    fn log_decay_diverges_with_zero_exponent() {
        let x = grid(256.0, 1 << 12);
        let f0 = env(
            &x,
            |t| 1.0 / (std::f64::consts::E + t).ln(),
            Direction::Tail,
        );
        let (a0, _, _) = theorem11a_functionals(&f0, &f0, Some((0.0, 1.0))).unwrap();
        assert_eq!(a0.finite_verdict, Finiteness::Divergent);
        let (a0, _, _) = theorem11a_functionals(&f0, &f0, None).unwrap();
        assert_ne!(a0.finite_verdict, Finiteness::Finite);
    }

    #[test]
    fn direction_and_domain_errors() {
        let x = grid(8.0, 64);
        let t = env(&x, |t| 1.0 / (1.0 + t), Direction::Tail);
        let h = env(&x, |t| t, Direction::Head);
        assert!(matches!(
            theorem11a_functionals(&h, &t, None),
            Err(Error::EnvelopeDirectionMismatch { .. })
        ));
        let small = grid(0.5, 16);
        let s = env(&small, |_| 1.0, Direction::Tail);
        assert!(matches!(
            theorem11a_functionals(&s, &s, None),
            Err(Error::DomainTooSmall(_))
        ));
    }

    #[test]
    fn a_delta_cases() {
        let x = grid(512.0, 1 << 14);
        let f0 = env(&x, |t| 1.0 / t, Direction::Tail);
        let finf = env(&x, |t| t, Direction::Head);
        let r = a_delta(&f0, &finf, 0.5, 2.0 * PI, None).unwrap();
        assert_eq!(r.finite_verdict, Finiteness::Divergent);
        let zero = env(&x, |_| 0.0, Direction::Head);
        assert_eq!(
            a_delta(&f0, &zero, 0.5, 2.0 * PI, None),
            Err(Error::ZeroDerivativeScale)
        );
        assert!(matches!(
            a_delta(&f0, &finf, 0.5, 1.0, None),
            Err(Error::PreconditionGap(_))
        ));
        // t f0^δ f∞ with f0 = t^-2, f∞ bounded: sup stabilizes
        let f0 = env(&x, |t| (t * t).recip(), Direction::Tail);
        let finf = env(&x, |t| 3.0 * (1.0 - (-t).exp()), Direction::Head);
        let r = a_delta(&f0, &finf, 0.5, 2.0 * PI, None).unwrap();
        assert_eq!(r.finite_verdict, Finiteness::Finite);
    }
}
