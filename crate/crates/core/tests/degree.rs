mod common;

use std::sync::Arc;

use cavelast_core::degree::{
    check_inv, default_inv_radii, topological_image, winding_number, winding_number_unchecked, DegreeRaster,
    Subdomain,
};
use cavelast_core::geometry::{unit_square, BoundaryTag, DeformationField};
use cavelast_core::polygon::distance_to_loop;
use cavelast_core::Vec2;
use common::*;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn ray_crossing_matches_angle_sum_on_500_loops() {
    let mut r = rng(7);
    let mut checked = 0;
    for _ in 0..500 {
        let lp = random_loop(&mut r);
        for _ in 0..20 {
            let xi = Vec2::new(r.gen_range(-1.2..1.2), r.gen_range(-1.2..1.2));
            if distance_to_loop(&xi, &lp) < 1e-9 {
                continue;
            }
            assert_eq!(winding_number(&lp, &xi).unwrap(), winding_by_angles(&lp, &xi));
            checked += 1;
        }
    }
    assert!(checked > 9_900);
}

#[test]
fn point_on_loop_is_rejected() {
    let sq = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)];
    assert!(winding_number(&sq, &Vec2::new(0.5, 0.0)).is_err());
    assert!(winding_number(&sq, &Vec2::new(1.0, 1.0)).is_err());
}

fn arb_loop() -> impl Strategy<Value = Vec<Vec2>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..30)
        .prop_map(|v| v.into_iter().map(|(x, y)| Vec2::new(x, y)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn winding_agrees_with_oracle(lp in arb_loop(), qx in -1.2f64..1.2, qy in -1.2f64..1.2) {
        let xi = Vec2::new(qx, qy);
        prop_assume!(distance_to_loop(&xi, &lp) > 1e-9);
        prop_assert_eq!(winding_number(&lp, &xi).unwrap(), winding_by_angles(&lp, &xi));
    }

    #[test]
    fn winding_is_reparametrization_invariant(
        lp in arb_loop(),
        shift in 0usize..30,
        qx in -1.2f64..1.2,
        qy in -1.2f64..1.2,
    ) {
        let xi = Vec2::new(qx, qy);
        prop_assume!(distance_to_loop(&xi, &lp) > 1e-6);
        let w = winding_number(&lp, &xi).unwrap();
        let n = lp.len();
        let shifted: Vec<Vec2> = (0..n).map(|k| lp[(k + shift) % n]).collect();
        prop_assert_eq!(winding_number(&shifted, &xi).unwrap(), w);
        let mut refined = Vec::with_capacity(3 * n);
        for k in 0..n {
            let (p, q) = (lp[k], lp[(k + 1) % n]);
            refined.push(p);
            refined.push(p + (q - p) / 3.0);
            refined.push(p + (q - p) * (2.0 / 3.0));
        }
        prop_assert_eq!(winding_number(&refined, &xi).unwrap(), w);
    }

    #[test]
    fn raster_matches_pointwise_rule(lp in arb_loop(), cell in 0.05f64..0.2) {
        let ras = DegreeRaster::from_loops(vec![lp.clone()], cell);
        let g = ras.grid;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let c = g.center(i, j);
                if distance_to_loop(&c, &lp) > 1e-9 {
                    prop_assert_eq!(ras.value(i, j), winding_number_unchecked(&lp, &c));
                }
            }
        }
    }
}

#[test]
fn images_of_nested_balls_are_nested() {
    let mesh = punctured_disk(1.0, 0.05, 0.05);
    let y = radial_cavity(&mesh, 0.3);
    let delta = 0.01;
    let radii = [0.15, 0.3, 0.5, 0.8];
    let rasters: Vec<DegreeRaster> = radii
        .iter()
        .map(|&r| topological_image(&y, &Subdomain::Disk { center: Vec2::zeros(), radius: r }, delta).unwrap())
        .collect();
    for w in rasters.windows(2) {
        let (small, big) = (&w[0], &w[1]);
        let g = small.grid;
        for j in 0..g.ny {
            for i in 0..g.nx {
                if small.value(i, j) == 0 {
                    continue;
                }
                let c = g.center(i, j);
                let near = distance_to_loop(&c, &big.loops[0]) <= 2.0 * delta;
                assert!(big.value_at(&c) != 0 || near, "cell at {c:?} escapes the larger image");
            }
        }
        assert!(big.area() > small.area());
    }
}

fn integral_det(y: &DeformationField) -> f64 {
    let mesh = y.mesh();
    (0..mesh.num_triangles())
        .map(|t| mesh.area(t) * y.element_gradient(t).determinant())
        .sum()
}

#[test]
fn degree_integral_matches_jacobian_integral() {
    let sq = Arc::new(unit_square(24, BoundaryTag::Dirichlet).unwrap());
    let y = DeformationField::from_map(sq, wobble(0.08, 0.4));
    let ras = topological_image(&y, &Subdomain::Outer, 0.005).unwrap();
    let j = integral_det(&y);
    assert!((ras.degree_integral() - j).abs() / j < 0.02);

    let mesh = punctured_disk(1.0, 0.05, 0.05);
    let y = radial_cavity(&mesh, 0.3);
    let ras = topological_image(&y, &Subdomain::Domain, 0.005).unwrap();
    let j = integral_det(&y);
    assert!((ras.degree_integral() - j).abs() / j < 0.02);
    let outer = topological_image(&y, &Subdomain::Outer, 0.005).unwrap();
    assert!(outer.degree_integral() > ras.degree_integral());
}

#[test]
fn cavitation_map_passes_inv() {
    let mesh = punctured_disk(1.0, 0.05, 0.05);
    let y = radial_cavity(&mesh, 0.3);
    let a = Vec2::zeros();
    let rep = check_inv(&y, &[a], &[default_inv_radii(&y, &a, 8)], 20_000, 0.01).unwrap();
    assert!(rep.pass(), "{} violations", rep.violations());
    assert!(rep.entries.iter().all(|e| e.exterior_checked > 0));
    assert!(rep.entries.iter().map(|e| e.interior_checked).sum::<usize>() > 1000);
}

#[test]
fn folded_map_fails_inv_with_located_samples() {
    let sq = Arc::new(unit_square(20, BoundaryTag::Dirichlet).unwrap());
    // the right half is reflected onto the left half
    let y = DeformationField::from_map(sq, |x| Vec2::new(-x.x.abs(), x.y));
    let a = Vec2::new(0.25, 0.0);
    let rep = check_inv(&y, &[a], &[vec![0.1, 0.15]], 20_000, 0.01).unwrap();
    assert!(!rep.pass());
    assert!(!rep.examples.is_empty());
    for v in &rep.examples {
        let mirrored = Vec2::new(-v.yx.x, v.yx.y);
        let hit = (v.x - a).norm() < v.radius || (mirrored - a).norm() < v.radius + 0.03;
        assert!(hit, "violation at {:?} is unrelated to the fold", v.x);
    }
}

