//! Randomized invariants across modules.

use num_complex::Complex64;
use proptest::prelude::*;
use wienercert::dyadic_sums::bernstein_sum;
use wienercert::envelopes::{head_sup, mixed_envelope_2d, tail_sup, Direction, Envelope};
use wienercert::function_model::{
    split_phi_psi, Domain1D, Field, GridFunction1D, GridFunction2D, MixedDifference, Padding,
};
use wienercert::spectral_oracle::{t_transform, HalfLine};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn values(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b)), n)
}

const N: usize = 256;

fn domain() -> Domain1D {
    Domain1D::new(8.0, N).unwrap()
}

proptest! {
    #[test]
    fn tail_sup_matches_brute_force(v in values(N)) {
        let d = domain();
        let g = GridFunction1D::new(d, v.clone()).unwrap();
        let env = tail_sup(&g, Field::Values).unwrap();
        let pts: Vec<f64> = d.points().collect();
        for (t, e) in env.abscissae().iter().zip(env.values()) {
            let brute = pts
                .iter()
                .zip(&v)
                .filter(|(s, _)| s.abs() >= t - 1e-9)
                .map(|(_, z)| z.norm())
                .fold(0.0, f64::max);
            prop_assert_eq!(*e, brute);
        }
        // domination at every grid point, including the origin
        for (s, z) in pts.iter().zip(&v) {
            prop_assert!(env.eval(*s) >= z.norm() || s.abs() < 1e-12 && env.origin_value().unwrap() >= z.norm());
        }
        prop_assert!(env.is_monotone());
        let again = Envelope::from_samples(env.abscissae().to_vec(), env.values(), Direction::Tail, "again").unwrap();
        prop_assert_eq!(again.values(), env.values());
    }

    #[test]
    fn head_sup_matches_brute_force(v in values(N), dv in values(N)) {
        let d = domain();
        let g = GridFunction1D::new(d, v).unwrap().with_derivative(dv.clone()).unwrap();
        let env = head_sup(&g).unwrap();
        let pts: Vec<f64> = d.points().collect();
        for (t, e) in env.abscissae().iter().zip(env.values()) {
            let brute = pts
                .iter()
                .zip(&dv)
                .filter(|(s, _)| s.abs() > 1e-12 && s.abs() <= t + 1e-9)
                .map(|(_, z)| z.norm())
                .fold(0.0, f64::max);
            prop_assert_eq!(*e, brute);
        }
        prop_assert!(env.is_monotone());
    }

    #[test]
    fn mixed_envelope_matches_brute_force(v in values(32 * 32), swept_x in any::<bool>()) {
        let d = Domain1D::new(3.0, 32).unwrap();
        let g = GridFunction2D::new(d, d, v.clone()).unwrap();
        let eta = [u8::from(swept_x), 1];
        let env = mixed_envelope_2d(&g, eta, [0, 0]).unwrap();
        let pts: Vec<f64> = d.points().collect();
        for (i, x) in env.x_abscissae().iter().enumerate() {
            for (j, y) in env.y_abscissae().iter().enumerate() {
                let mut brute = 0.0f64;
                for (a, xp) in pts.iter().enumerate() {
                    let ok_x = if swept_x { xp.abs() >= x - 1e-9 } else { (xp.abs() - x).abs() < 1e-9 };
                    if !ok_x {
                        continue;
                    }
                    for (b, yp) in pts.iter().enumerate() {
                        if yp.abs() >= y - 1e-9 {
                            brute = brute.max(v[a * 32 + b].norm());
                        }
                    }
                }
                prop_assert_eq!(env.value(i, j), brute);
            }
        }
        prop_assert!(env.is_monotone());
    }

    #[test]
    fn mixed_difference_factorizes(
        v in values(32 * 32),
        x in -1.5..1.5f64,
        y in -1.5..1.5f64,
        h1 in 0.05..1.5f64,
        h2 in 0.05..1.5f64,
    ) {
        let d = Domain1D::new(4.0, 32).unwrap();
        let g = GridFunction2D::new(d, d, v.clone()).unwrap();
        let full = g.mixed_difference(&[h1, h2], &[x, y], Padding::Reject).unwrap().value;
        // difference in y along the two rows x ± h1, then difference in x
        let column = |xx: f64| {
            let row: Vec<Complex64> = d.points().map(|yy| g.at(xx, yy)).collect();
            GridFunction1D::new(d, row)
                .unwrap()
                .mixed_difference(&[h2], &[y], Padding::Reject)
                .unwrap()
                .value
        };
        // bilinear interpolation is a tensor product, so this holds off the grid too
        let nested = column(x + h1) - column(x - h1);
        let scale = 1.0 + full.norm();
        prop_assert!((full - nested).norm() <= 1e-12 * scale, "{} vs {}", full, nested);
    }

    #[test]
    fn split_reconstructs_exactly(v in values(N)) {
        let d = Domain1D::new(16.0, N).unwrap();
        let g = GridFunction1D::new(d, v.clone()).unwrap();
        let (phi, psi) = split_phi_psi(&g).unwrap();
        for ((p, q), f) in phi.values().iter().zip(psi.values()).zip(&v) {
            prop_assert_eq!(p + q, *f);
        }
    }

    #[test]
    fn t_transform_is_linear(
        c1 in prop::collection::vec(-1.0..1.0f64, 4),
        c2 in prop::collection::vec(-1.0..1.0f64, 4),
        a in -2.0..2.0f64,
        b in -2.0..2.0f64,
    ) {
        let smooth = |k: Vec<f64>| move |u: f64| {
            c(k[0] * (-u * u).exp() + k[1] * (u * 0.7).sin() * (-0.1 * u).exp(), k[2] * (u * 1.3).cos() / (1.0 + u * u) + k[3] * u * (-u).exp())
        };
        let (f1, f2) = (smooth(c1), smooth(c2));
        let step = 1.0 / 64.0;
        let h1 = HalfLine::from_fn(step, 2048, &f1);
        let h2 = HalfLine::from_fn(step, 2048, &f2);
        let sum = HalfLine::from_fn(step, 2048, |u| a * f1(u) + b * f2(u));
        let ts = [0.5, 1.0, 3.0, 10.0];
        let (r1, r2, rs) = (t_transform(&h1, &ts), t_transform(&h2, &ts), t_transform(&sum, &ts));
        prop_assume!(r1.is_ok() && r2.is_ok() && rs.is_ok());
        for ((x, y), s) in r1.unwrap().iter().zip(r2.unwrap()).zip(rs.unwrap()) {
            let combo = a * x + b * y;
            prop_assert!((s - combo).norm() <= 1e-12 * (1.0 + combo.norm()), "{} vs {}", s, combo);
        }
    }

    #[test]
    fn dyadic_terms_are_reflection_invariant(mut v in values(N)) {
        // the leftmost sample has no mirror image on the grid
        v[0] = c(0.0, 0.0);
        let d = Domain1D::new(8.0, N).unwrap();
        let mut r = vec![c(0.0, 0.0); N];
        for k in 1..N {
            r[k] = v[N - k];
        }
        let f = bernstein_sum(&GridFunction1D::new(d, v).unwrap(), 5).unwrap();
        let g = bernstein_sum(&GridFunction1D::new(d, r).unwrap(), 5).unwrap();
        for (a, b) in f.terms.iter().zip(&g.terms) {
            prop_assert_eq!(&a.index, &b.index);
            prop_assert!((a.value - b.value).abs() <= 1e-12 * (1.0 + a.value), "{:?}: {} vs {}", a.index, a.value, b.value);
        }
    }
}
