use std::collections::VecDeque;
use std::io::Write;

use rayon::prelude::*;

use crate::degree::{check_inv, default_inv_radii, InvReport};
use crate::geometry::DeformationField;
use crate::material::{BulkDensity, SurfaceDensity};
use crate::numeric::{pairwise_sum, rot_cw};
use crate::{Error, Result, Vec2};

use super::{battery, TestField};

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOptions {
    pub max_iters: usize,
    /// Stop when the energy decrease falls below `tol_energy · max(1, |ℰ|)` ...
    pub tol_energy: f64,
    /// ... and the largest battery residual is below `tol_residual · max(1, |ℰ|)`.
    pub tol_residual: f64,
    pub det_floor: f64,
    /// Run the (INV) check on every `inv_every`-th accepted step (0 disables).
    pub inv_every: usize,
    /// Raster cell for the (INV) check; defaults to half the mesh size.
    pub inv_delta: Option<f64>,
    pub inv_budget: usize,
    pub inv_radii: usize,
    /// L-BFGS memory.
    pub memory: usize,
    /// Armijo constant.
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            tol_energy: 1e-10,
            tol_residual: 1e-3,
            det_floor: 1e-8,
            inv_every: 10,
            inv_delta: None,
            inv_budget: 20_000,
            inv_radii: 8,
            memory: 10,
            armijo: 1e-4,
            max_backtracks: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIters,
    Stalled,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::MaxIters => "max_iters",
            Self::Stalled => "stalled",
        }
    }
}

/// One accepted iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    pub iter: usize,
    pub energy: f64,
    pub bulk: f64,
    pub surface: f64,
    pub min_det: f64,
    pub step: f64,
    /// Largest `|dℰ/dt|` over the certification battery.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub field: DeformationField,
    pub status: Status,
    pub log: Vec<IterRecord>,
    /// (INV) report of the final iterate (when the mesh has punctures and checks are enabled).
    pub final_inv: Option<InvReport>,
    /// Line-search candidates rejected by the (INV) check.
    pub inv_rejections: usize,
}

impl MinimizeResult {
    pub fn write_log_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "iter,energy,bulk,surface,min_det,step,residual")?;
        for r in &self.log {
            writeln!(
                out,
                "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.6e},{:.6e}",
                r.iter, r.energy, r.bulk, r.surface, r.min_det, r.step, r.residual
            )?;
        }
        Ok(())
    }
}

/// Discrete energy split `(bulk, surface)` and its gradient with respect to
/// every vertex position.
pub fn energy_and_gradient(
    y: &DeformationField,
    density: &BulkDensity,
    phi: &SurfaceDensity,
) -> Result<(f64, f64, Vec<Vec2>)> {
    let mesh = y.mesh();
    let per: Vec<Result<(f64, [Vec2; 3])>> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let f = y.element_gradient(t);
            let det = f.determinant();
            if !(det > 0.0) {
                return Err(Error::Infeasible { triangle: t, det });
            }
            let (w, dw) = density.energy_and_stress(&f)?;
            let a = mesh.area(t);
            let g = mesh.shape_gradients(t).map(|gl| dw * gl * a);
            Ok((a * w, g))
        })
        .collect();
    let mut grad = vec![Vec2::zeros(); mesh.num_vertices()];
    let mut bulk = Vec::with_capacity(per.len());
    for (t, r) in per.into_iter().enumerate() {
        let (w, g) = r?;
        bulk.push(w);
        for (k, &v) in mesh.triangles()[t].iter().enumerate() {
            grad[v] += g[k];
        }
    }
    let mut surf = Vec::new();
    for k in 0..mesh.punctures().len() {
        // cavity orientation: the puncture loop reversed
        let ids: Vec<usize> = mesh.puncture_loop(k).iter().rev().copied().collect();
        let n = ids.len();
        for i in 0..n {
            let (p, q) = (ids[i], ids[(i + 1) % n]);
            let z = rot_cw(&(y.positions()[q] - y.positions()[p]));
            surf.push(phi.value(&z));
            if let Ok(g) = phi.gradient(&z) {
                let jt = Vec2::new(-g.y, g.x);
                grad[q] += jt;
                grad[p] -= jt;
            }
        }
    }
    Ok((pairwise_sum(&bulk), pairwise_sum(&surf), grad))
}

/// Largest `|dℰ/dt|` over the certification battery at `y`.
pub fn certification_residual(y: &DeformationField, density: &BulkDensity, phi: &SurfaceDensity) -> Result<f64> {
    let (_, _, grad) = energy_and_gradient(y, density, phi)?;
    Ok(battery_residual(y, &grad, &battery(y)))
}

fn battery_residual(y: &DeformationField, grad: &[Vec2], fields: &[TestField]) -> f64 {
    fields
        .iter()
        .map(|psi| {
            let parts: Vec<f64> = y.positions().iter().zip(grad).map(|(p, g)| g.dot(&psi.value(p))).collect();
            pairwise_sum(&parts).abs()
        })
        .fold(0.0, f64::max)
}

fn dot(a: &[Vec2], b: &[Vec2]) -> f64 {
    let parts: Vec<f64> = a.iter().zip(b).map(|(x, y)| x.dot(y)).collect();
    pairwise_sum(&parts)
}

/// Descent on the non-Dirichlet vertex positions with L-BFGS directions and
/// a backtracking line search that keeps every element determinant above
/// `det_floor` and, periodically, the (INV) condition.
pub fn minimize(
    y0: &DeformationField,
    density: &BulkDensity,
    phi: &SurfaceDensity,
    opts: &MinimizeOptions,
) -> Result<MinimizeResult> {
    let mesh = y0.mesh().clone();
    let (md, t) = y0.min_det();
    if !(md > opts.det_floor) {
        return Err(Error::Infeasible { triangle: t, det: md });
    }
    let free: Vec<bool> = (0..mesh.num_vertices()).map(|v| !mesh.is_dirichlet(v)).collect();
    let mask = |g: &mut Vec<Vec2>| {
        for (gv, f) in g.iter_mut().zip(&free) {
            if !f {
                *gv = Vec2::zeros();
            }
        }
    };
    let inv_delta = opts.inv_delta.unwrap_or(0.5 * mesh.mesh_size());
    let centers: Vec<Vec2> = mesh.punctures().iter().map(|p| p.center).collect();
    let run_inv = |y: &DeformationField| -> Result<InvReport> {
        let radii: Vec<Vec<f64>> = centers.iter().map(|a| default_inv_radii(y, a, opts.inv_radii)).collect();
        check_inv(y, &centers, &radii, opts.inv_budget, inv_delta)
    };

    let mut y = y0.clone();
    let (mut bulk, mut surface, mut full) = energy_and_gradient(&y, density, phi)?;
    let mut energy = bulk + surface;
    let mut g = full.clone();
    mask(&mut g);
    let mut log = vec![IterRecord {
        iter: 0,
        energy,
        bulk,
        surface,
        min_det: md,
        step: 0.0,
        residual: battery_residual(&y, &full, &battery(&y)),
    }];
    let mut hist: VecDeque<(Vec<Vec2>, Vec<Vec2>, f64)> = VecDeque::new();
    let mut status = Status::MaxIters;
    let mut accepted = 0usize;
    let mut inv_rejections = 0usize;
    let h = mesh.mesh_size();

    for iter in 1..=opts.max_iters {
        // two-loop recursion
        let mut d: Vec<Vec2> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, yv, rho) in hist.iter().rev() {
            let a = rho * dot(s, &d);
            for (di, yi) in d.iter_mut().zip(yv) {
                *di -= yi * a;
            }
            alphas.push(a);
        }
        if let Some((s, yv, _)) = hist.back() {
            let gamma = dot(s, yv) / dot(yv, yv);
            d.iter_mut().for_each(|v| *v *= gamma);
        } else {
            // first step: move the fastest vertex by a hundredth of the mesh size
            let gmax = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if gmax == 0.0 {
                status = Status::Converged;
                break;
            }
            let scale = 0.01 * h / gmax;
            d.iter_mut().for_each(|v| *v *= scale);
        }
        for ((s, yv, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(yv, &d);
            for (di, si) in d.iter_mut().zip(s) {
                *di += si * (a - b);
            }
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            hist.clear();
            let gmax = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let scale = 0.01 * h / gmax.max(1e-300);
            d = g.iter().map(|v| -v * scale).collect();
            slope = dot(&g, &d);
        }

        let check_inv_now = opts.inv_every > 0 && !centers.is_empty() && (accepted + 1).is_multiple_of(opts.inv_every);
        let mut alpha = 1.0;
        let mut found = None;
        for _ in 0..opts.max_backtracks {
            let pos: Vec<Vec2> = y.positions().iter().zip(&d).map(|(p, di)| p + di * alpha).collect();
            let cand = DeformationField::from_positions(mesh.clone(), pos)?;
            let (cmd, _) = cand.min_det();
            if cmd > opts.det_floor {
                if let Ok((b, s, fg)) = energy_and_gradient(&cand, density, phi) {
                    let e = b + s;
                    if e <= energy + opts.armijo * alpha * slope {
                        if check_inv_now && !run_inv(&cand)?.pass() {
                            inv_rejections += 1;
                        } else {
                            found = Some((cand, b, s, fg, cmd));
                            break;
                        }
                    }
                }
            }
            alpha *= 0.5;
        }
        let Some((cand, b, s, fg, cmd)) = found else {
            status = Status::Stalled;
            break;
        };
        accepted += 1;
        let mut gn = fg.clone();
        mask(&mut gn);
        let sv: Vec<Vec2> = cand.positions().iter().zip(y.positions()).map(|(a, b)| a - b).collect();
        let yv: Vec<Vec2> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&sv, &yv);
        if sy > 1e-300 {
            hist.push_back((sv, yv, 1.0 / sy));
            if hist.len() > opts.memory {
                hist.pop_front();
            }
        }
        let e_new = b + s;
        let decrease = energy - e_new;
        y = cand;
        bulk = b;
        surface = s;
        energy = e_new;
        full = fg;
        g = gn;
        let residual = battery_residual(&y, &full, &battery(&y));
        log.push(IterRecord { iter, energy, bulk, surface, min_det: cmd, step: alpha, residual });
        let scale = energy.abs().max(1.0);
        if decrease < opts.tol_energy * scale && residual < opts.tol_residual * scale {
            status = Status::Converged;
            break;
        }
    }
    let final_inv = if opts.inv_every > 0 && !centers.is_empty() { Some(run_inv(&y)?) } else { None };
    Ok(MinimizeResult { field: y, status, log, final_inv, inv_rejections })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geometry::{unit_square, BoundaryTag};
    use crate::variation::discrete_energy;

    #[test]
    fn gradient_matches_differences() {
        let mesh = Arc::new(unit_square(4, BoundaryTag::Free).unwrap());
        let y = DeformationField::from_map(mesh, |x| Vec2::new(x.x + 0.1 * x.y * x.y, 0.9 * x.y + 0.05 * x.x));
        let w = BulkDensity::default();
        let phi = SurfaceDensity::Isotropic;
        let (_, _, g) = energy_and_gradient(&y, &w, &phi).unwrap();
        let h = 1e-6;
        for v in [0, 7, 12] {
            for k in 0..2 {
                let mut p = y.clone();
                p.positions_mut()[v][k] += h;
                let mut m = y.clone();
                m.positions_mut()[v][k] -= h;
                let fd = (discrete_energy(&p, &w, &phi).unwrap() - discrete_energy(&m, &w, &phi).unwrap()) / (2.0 * h);
                assert!((fd - g[v][k]).abs() < 1e-6 * (1.0 + fd.abs()), "{v} {k}: {fd} vs {}", g[v][k]);
            }
        }
    }

    #[test]
    fn identity_data_gives_identity() {
        let mesh = Arc::new(unit_square(6, BoundaryTag::Dirichlet).unwrap());
        let id = DeformationField::identity(mesh.clone());
        let y0 = DeformationField::from_map(mesh, |x| {
            let b = (0.25 - x.x * x.x) * (0.25 - x.y * x.y);
            x + Vec2::new(3.0 * b, -2.0 * b)
        });
        let opts = MinimizeOptions { tol_residual: 1e-12, tol_energy: 1e-15, ..Default::default() };
        let res = minimize(&y0, &BulkDensity::default(), &SurfaceDensity::Isotropic, &opts).unwrap();
        assert_eq!(res.status, Status::Converged);
        let err = res.field.positions().iter().zip(id.positions()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
        assert!(res.log.windows(2).all(|w| w[1].energy <= w[0].energy));
    }
}
