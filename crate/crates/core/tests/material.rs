mod common;

use approx::assert_relative_eq;
use cavelast_core::material::{BulkDensity, SurfaceDensity};
use cavelast_core::{Mat2, Vec2};
use common::rng;
use proptest::prelude::*;
use rand::Rng;

/// `F` with `det F` in `[0.1, 10]`.
fn arb_f() -> impl Strategy<Value = Mat2> {
    (0.1f64..10.0, 0.0f64..std::f64::consts::TAU, 0.0f64..std::f64::consts::TAU, 0.3f64..3.0, -1.0f64..1.0)
        .prop_map(|(det, t1, t2, s, k)| {
            let rot = |t: f64| Mat2::new(t.cos(), -t.sin(), t.sin(), t.cos());
            let stretch = Mat2::new(s * det.sqrt(), k, 0.0, det.sqrt() / s);
            rot(t1) * stretch * rot(t2)
        })
}

fn arb_density() -> impl Strategy<Value = BulkDensity> {
    (0.1f64..3.0, 0.1f64..3.0, 0.1f64..3.0).prop_map(|(mu, a, b)| BulkDensity::compressible(mu, a, b).unwrap())
}

fn arb_phi() -> impl Strategy<Value = SurfaceDensity> {
    prop_oneof![
        Just(SurfaceDensity::Isotropic),
        (0.2f64..5.0, 0.2f64..5.0, -0.9f64..0.9).prop_map(|(a, b, r)| {
            let off = r * (a * b).sqrt();
            SurfaceDensity::elliptic(Mat2::new(a, off, off, b)).unwrap()
        }),
        (0.01f64..0.5).prop_map(|e| SurfaceDensity::smoothed_l1(e).unwrap()),
    ]
}

fn unit(t: f64) -> Vec2 {
    Vec2::new(t.cos(), t.sin())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn energy_matches_closed_form(w in arb_density(), f in arb_f()) {
        let frob2 = f[(0, 0)].powi(2) + f[(0, 1)].powi(2) + f[(1, 0)].powi(2) + f[(1, 1)].powi(2);
        let h = f[(0, 0)] * f[(1, 1)] - f[(0, 1)] * f[(1, 0)];
        let expect = 0.5 * w.mu * frob2 + w.a * h * h - w.b * h.ln();
        prop_assert!((w.energy(&f).unwrap() - expect).abs() <= 1e-12 * expect.abs().max(1.0));
    }

    #[test]
    fn stress_matches_finite_differences(w in arb_density(), f in arb_f()) {
        let dw = w.stress(&f).unwrap();
        let step = 1e-6;
        for i in 0..2 {
            for j in 0..2 {
                let mut p = f;
                let mut m = f;
                p[(i, j)] += step;
                m[(i, j)] -= step;
                let fd = (w.energy(&p).unwrap() - w.energy(&m).unwrap()) / (2.0 * step);
                prop_assert!((fd - dw[(i, j)]).abs() <= 1e-5 * dw.norm().max(1.0));
            }
        }
    }

    #[test]
    fn surface_density_is_a_norm(phi in arb_phi(), t1 in 0.0f64..7.0, t2 in 0.0f64..7.0, s in 0.01f64..100.0, l1 in 0.1f64..3.0, l2 in 0.1f64..3.0) {
        let (z, v) = (unit(t1) * l1, unit(t2) * l2);
        let pz = phi.value(&z);
        prop_assert!((phi.value(&(z * s)) - s * pz).abs() <= 1e-12 * s * pz);
        prop_assert!(phi.value(&(z + v)) <= pz + phi.value(&v) + 1e-12);
        prop_assert!(pz >= phi.lower_bound_constant() * z.norm() * (1.0 - 1e-3));
        let g = phi.gradient(&z).unwrap();
        prop_assert!((g.dot(&z) - pz).abs() <= 1e-12 * pz.max(1.0));
        let h = 1e-6;
        for k in 0..2 {
            let mut e = Vec2::zeros();
            e[k] = h;
            let fd = (phi.value(&(z + e)) - phi.value(&(z - e))) / (2.0 * h);
            prop_assert!((fd - g[k]).abs() <= 1e-6 * g.norm().max(1.0));
        }
    }
}

#[test]
fn coercivity_and_growth_on_random_samples() {
    let mut r = rng(99);
    let samples: Vec<Mat2> = (0..1000)
        .map(|_| {
            let det: f64 = 10f64.powf(r.gen_range(-1.0..1.0));
            let s: f64 = r.gen_range(0.3..3.0);
            let t: f64 = r.gen_range(0.0..6.3);
            let rot = Mat2::new(t.cos(), -t.sin(), t.sin(), t.cos());
            rot * Mat2::new(s * det.sqrt(), r.gen_range(-1.0..1.0), 0.0, det.sqrt() / s)
        })
        .collect();
    for w in [BulkDensity::default(), BulkDensity::compressible(2.0, 0.5, 3.0).unwrap()] {
        let rep = w.check_assumptions(&samples);
        assert!(rep.coercivity_margin >= -1e-9);
        assert!(rep.w3_constant.is_finite());
        assert!(rep.blows_up_at_zero_det);
    }
}

#[test]
fn hand_evaluated_values() {
    let w = BulkDensity::default();
    let dw = w.stress(&Mat2::new(2.0, 0.0, 0.0, 0.5)).unwrap();
    assert_relative_eq!(dw, Mat2::new(2.5, 0.0, 0.0, 2.5), epsilon = 1e-14);
    let e = SurfaceDensity::elliptic(Mat2::new(4.0, 0.0, 0.0, 1.0)).unwrap();
    assert_relative_eq!(e.value(&(Vec2::new(1.0, 1.0) / 2f64.sqrt())), 2.5f64.sqrt(), epsilon = 1e-14);
    assert_relative_eq!(e.gradient(&Vec2::new(1.0, 0.0)).unwrap(), Vec2::new(2.0, 0.0), epsilon = 1e-14);
    assert!(w.energy(&Mat2::new(1.0, 0.0, 0.0, -1.0)).is_err());
}
