#![allow(dead_code)]

use std::f64::consts::TAU;
use std::sync::Arc;

use cavelast_core::geometry::{BoundaryTag, DeformationField, DomainShape, Mesh, MeshSpec, Puncture};
use cavelast_core::Vec2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Winding number by summing signed angles, rounded.
pub fn winding_by_angles(lp: &[Vec2], xi: &Vec2) -> i32 {
    let n = lp.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = lp[i] - xi;
        let b = lp[(i + 1) % n] - xi;
        total += (a.x * b.y - a.y * b.x).atan2(a.dot(&b));
    }
    (total / TAU).round() as i32
}

/// Closed polyline with random radii around a random centre, possibly
/// traversed several times and in either direction.
pub fn random_loop(r: &mut ChaCha8Rng) -> Vec<Vec2> {
    let n = r.gen_range(3..40);
    let turns: i32 = r.gen_range(1..=2) * if r.gen_bool(0.5) { 1 } else { -1 };
    let c = Vec2::new(r.gen_range(-0.3..0.3), r.gen_range(-0.3..0.3));
    let wild = r.gen_bool(0.3);
    (0..n)
        .map(|k| {
            if wild {
                Vec2::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
            } else {
                let t = turns as f64 * TAU * (k as f64 + r.gen_range(0.0..0.5)) / n as f64;
                c + r.gen_range(0.2..1.0) * Vec2::new(t.cos(), t.sin())
            }
        })
        .collect()
}

pub fn punctured_disk(radius: f64, rho: f64, h: f64) -> Arc<Mesh> {
    let spec = MeshSpec {
        shape: DomainShape::Disk { radius },
        h,
        punctures: vec![Puncture { center: Vec2::zeros(), radius: rho }],
        outer_tag: BoundaryTag::Dirichlet,
        structured: true,
    };
    Arc::new(spec.build().unwrap())
}

/// `x ↦ sqrt(|x|² + c²) x/|x|` about `center`.
pub fn cavitation_map(center: Vec2, c: f64) -> impl Fn(&Vec2) -> Vec2 {
    move |x| {
        let d = x - center;
        let r = d.norm();
        center + d * ((r * r + c * c).sqrt() / r)
    }
}

pub fn radial_cavity(mesh: &Arc<Mesh>, c: f64) -> DeformationField {
    DeformationField::from_map(mesh.clone(), cavitation_map(Vec2::zeros(), c))
}

/// Smooth orientation-preserving perturbation of the identity, vanishing
/// to first order nowhere in particular.
pub fn wobble(amp: f64, phase: f64) -> impl Fn(&Vec2) -> Vec2 {
    move |x| {
        Vec2::new(
            x.x + amp * (2.0 * x.y + phase).sin(),
            x.y + amp * (1.5 * x.x - phase).cos() + 0.1 * x.x,
        )
    }
}
