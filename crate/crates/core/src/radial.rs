//! Radially symmetric deformations `y(x) = r(|x|) x/|x|` of a punctured disk:
//! reduced energy, a 1-D minimizer, and the pointwise check of the cavity
//! boundary condition.

use std::f64::consts::TAU;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use crate::geometry::{DeformationField, Mesh};
use crate::material::{BulkDensity, SurfaceDensity};
use crate::numeric::{integrate, Pchip};
use crate::{Error, Mat2, Result, Vec2};

/// Deformed radii `r(R_j)` on increasing reference radii `R_0 = ρ < … < R_M`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    knots: Vec<f64>,
    values: Vec<f64>,
    interp: Pchip,
}

impl RadialProfile {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::Argument(format!(
                "profile needs matching knots and values (got {} and {})",
                knots.len(),
                values.len()
            )));
        }
        if knots[0] < 0.0 || knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Argument("profile knots must be non-negative and increasing".into()));
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) || values.iter().any(|&v| v < 0.0) {
            return Err(Error::DomainScalar("profile values must be non-negative and increasing".into()));
        }
        let interp = Pchip::new(knots.clone(), values.clone());
        Ok(Self { knots, values, interp })
    }

    /// Profile sampled from a function of `R`.
    pub fn from_fn(knots: Vec<f64>, r: impl Fn(f64) -> f64) -> Result<Self> {
        let values = knots.iter().map(|&k| r(k)).collect();
        Self::new(knots, values)
    }

    /// Radii of the deformation of `y` averaged over `angles` rays from `center`.
    /// Samples within 2% past the mesh boundary use the boundary value.
    pub fn lift(y: &DeformationField, center: &Vec2, knots: Vec<f64>, angles: usize) -> Result<Self> {
        let mut values = Vec::with_capacity(knots.len());
        for &k in &knots {
            let mut acc = 0.0;
            for j in 0..angles {
                let t = TAU * (j as f64 + 0.5) / angles as f64;
                let dir = Vec2::new(t.cos(), t.sin());
                let p = match y.evaluate(&(center + dir * k)) {
                    Some(p) => p,
                    None => pull_back(y, center, &dir, k).ok_or_else(|| {
                        Error::Geometry(format!("ray sample at radius {k:.4} is outside the mesh"))
                    })?,
                };
                acc += (p - y.evaluate(center).unwrap_or(*center)).norm();
            }
            values.push(acc / angles as f64);
        }
        Self::new(knots, values)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn inner_radius(&self) -> f64 {
        self.knots[0]
    }

    pub fn outer_radius(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    /// Deformed radius of the cavity, `r(ρ)`.
    pub fn cavity_radius(&self) -> f64 {
        self.values[0]
    }

    /// `r'(ρ)` from the quadratic through the first three knots (the first
    /// secant when that is not positive).
    pub fn inner_slope(&self) -> f64 {
        let (k, v) = (&self.knots, &self.values);
        let d0 = (v[1] - v[0]) / (k[1] - k[0]);
        if k.len() < 3 {
            return d0;
        }
        let (h0, h1) = (k[1] - k[0], k[2] - k[1]);
        let d1 = (v[2] - v[1]) / h1;
        let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if d > 0.0 {
            d
        } else {
            d0
        }
    }

    /// `r(R_out) / R_out`.
    pub fn boundary_stretch(&self) -> f64 {
        self.values.last().unwrap() / self.outer_radius()
    }

    /// `(r(R), r'(R))` from the monotone cubic interpolant.
    pub fn eval(&self, radius: f64) -> (f64, f64) {
        self.interp.eval(radius)
    }

    /// The radial map `x ↦ r(|x|) x/|x|` interpolated on `mesh` (vertices at
    /// the origin stay fixed).
    pub fn to_field(&self, mesh: Arc<Mesh>) -> DeformationField {
        DeformationField::from_map(mesh, |x| {
            let s = x.norm();
            if s == 0.0 {
                *x
            } else {
                x * (self.eval(s).0 / s)
            }
        })
    }
}

/// Value at the last mesh point on the ray, for samples just past a polygonal boundary.
fn pull_back(y: &DeformationField, center: &Vec2, dir: &Vec2, k: f64) -> Option<Vec2> {
    let (mut lo, mut hi) = (0.98 * k, k);
    let mut best = y.evaluate(&(center + dir * lo))?;
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        match y.evaluate(&(center + dir * mid)) {
            Some(p) => {
                best = p;
                lo = mid;
            }
            None => hi = mid,
        }
    }
    Some(best)
}

/// `c ∮ φ(cos θ, sin θ) dθ`.
pub fn anisotropic_circle_perimeter(c: f64, phi: &SurfaceDensity) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let f = |t: f64| phi.value(&Vec2::new(t.cos(), t.sin()));
    // split at the quarter points so kinks of non-smooth densities fall on nodes
    let q = TAU / 4.0;
    c * (0..4).map(|k| integrate(&f, k as f64 * q, (k + 1) as f64 * q, 1e-12)).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialEnergy {
    pub bulk: f64,
    pub surface: f64,
    pub total: f64,
}

/// `∫ 2πR W(diag(r', r/R)) dR + anisotropic_circle_perimeter(r(ρ), φ)`.
pub fn radial_energy(profile: &RadialProfile, density: &BulkDensity, phi: &SurfaceDensity) -> Result<RadialEnergy> {
    let bad = std::cell::Cell::new(None);
    let mut bulk = 0.0;
    for w in profile.knots.windows(2) {
        let f = |rr: f64| {
            let (r, dr) = profile.eval(rr);
            match density.principal(dr, r / rr) {
                Ok((wv, _, _)) => TAU * rr * wv,
                Err(_) => {
                    bad.set(Some(rr));
                    0.0
                }
            }
        };
        bulk += integrate(&f, w[0], w[1], 1e-10);
    }
    if let Some(rr) = bad.get() {
        return Err(Error::DomainScalar(format!("profile has r'·r/R <= 0 near R = {rr:.6e}")));
    }
    let surface = if profile.inner_radius() > 0.0 {
        anisotropic_circle_perimeter(profile.cavity_radius(), phi)
    } else {
        0.0
    };
    Ok(RadialEnergy { bulk, surface, total: bulk + surface })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialStatus {
    Converged,
    Stalled,
    MaxIters,
}

#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub profile: RadialProfile,
    /// Discrete (piecewise-linear) energy at the solution.
    pub energy: f64,
    /// Max-norm of the discrete Euler–Lagrange residual.
    pub residual: f64,
    pub iterations: usize,
    pub status: RadialStatus,
    /// Discrete energy of the start and of every accepted iterate.
    pub history: Vec<f64>,
    /// `(energy, cavity radius)` of the other stationary branch found by [`solve_radial`].
    pub alternate: Option<(f64, f64)>,
}

/// Knots `ρ (R_out/ρ)^{j/M}`, `j = 0..=M`.
pub fn geometric_knots(rho: f64, r_out: f64, m: usize) -> Vec<f64> {
    let q = (r_out / rho).powf(1.0 / m as f64);
    let mut k: Vec<f64> = (0..=m).map(|j| rho * q.powi(j as i32)).collect();
    k[m] = r_out;
    k
}

// five-point Gauss–Legendre on [0, 1]
const GL_X: [f64; 5] = [
    0.046_910_077_030_668,
    0.230_765_344_947_158,
    0.5,
    0.769_234_655_052_842,
    0.953_089_922_969_332,
];
const GL_W: [f64; 5] = [
    0.118_463_442_528_095,
    0.239_314_335_249_683,
    0.284_444_444_444_444,
    0.239_314_335_249_683,
    0.118_463_442_528_095,
];

struct Discrete<'a> {
    knots: &'a [f64],
    density: &'a BulkDensity,
    k_phi: f64,
}

impl Discrete<'_> {
    /// Energy, gradient and tridiagonal Hessian (diag, off-diag) of the
    /// piecewise-linear energy in all knot values.
    fn eval(&self, r: &[f64], with_hessian: bool) -> Option<(f64, Vec<f64>, Vec<f64>, Vec<f64>)> {
        let n = r.len();
        let mut e = 0.0;
        let mut g = vec![0.0; n];
        let mut hd = vec![0.0; n];
        let mut ho = vec![0.0; n - 1];
        for i in 0..n - 1 {
            let (a, b) = (self.knots[i], self.knots[i + 1]);
            let h = b - a;
            let s1 = (r[i + 1] - r[i]) / h;
            for (x, w) in GL_X.iter().zip(GL_W) {
                let rr = a + x * h;
                let (na, nb) = ((b - rr) / h, (rr - a) / h);
                let s2 = (r[i] * na + r[i + 1] * nb) / rr;
                let (wv, dw, hw) = self.density.principal(s1, s2).ok()?;
                let m = TAU * rr * w * h;
                e += m * wv;
                let j = [[-1.0 / h, 1.0 / h], [na / rr, nb / rr]];
                for p in 0..2 {
                    g[i + p] += m * (dw[0] * j[0][p] + dw[1] * j[1][p]);
                }
                if with_hessian {
                    let mut loc = [[0.0; 2]; 2];
                    for (p, lp) in loc.iter_mut().enumerate() {
                        for (q, lq) in lp.iter_mut().enumerate() {
                            for u in 0..2 {
                                for v in 0..2 {
                                    *lq += j[u][p] * hw[u][v] * j[v][q];
                                }
                            }
                        }
                    }
                    hd[i] += m * loc[0][0];
                    hd[i + 1] += m * loc[1][1];
                    ho[i] += m * loc[0][1];
                }
            }
        }
        e += self.k_phi * r[0];
        g[0] += self.k_phi;
        Some((e, g, hd, ho))
    }
}

/// Solves `(d + μ) x_i + o_{i-1} x_{i-1} + o_i x_{i+1} = rhs_i`; `None` if a pivot is not positive.
fn thomas(d: &[f64], o: &[f64], mu: f64, rhs: &[f64]) -> Option<Vec<f64>> {
    let n = d.len();
    let mut c = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut piv = d[0] + mu;
    if !(piv > 0.0) {
        return None;
    }
    c[0] = if n > 1 { o[0] / piv } else { 0.0 };
    z[0] = rhs[0] / piv;
    for i in 1..n {
        piv = d[i] + mu - o[i - 1] * c[i - 1];
        if !(piv > 0.0) {
            return None;
        }
        if i < n - 1 {
            c[i] = o[i] / piv;
        }
        z[i] = (rhs[i] - o[i - 1] * z[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        z[i] -= c[i] * z[i + 1];
    }
    Some(z)
}

/// Minimizes the piecewise-linear radial energy over the knot values with
/// `r(R_out) = λ R_out`, on `M` geometrically graded intervals, by damped Newton
/// steps on the tridiagonal Hessian. Two starts are tried (homogeneous stretch
/// and an open cavity of radius `λ R_out / 2`) and the lower-energy stationary
/// profile is returned; the other one is reported in `alternate`.
pub fn solve_radial(
    lambda: f64,
    density: &BulkDensity,
    phi: &SurfaceDensity,
    rho: f64,
    r_out: f64,
    m: usize,
) -> Result<RadialSolution> {
    let closed = solve_radial_seeded(lambda, density, phi, rho, r_out, m, 0.0)?;
    let open = solve_radial_seeded(lambda, density, phi, rho, r_out, m, 0.5 * lambda * r_out)?;
    let (mut best, other) = if open.energy < closed.energy { (open, closed) } else { (closed, open) };
    best.alternate = Some((other.energy, other.profile.cavity_radius()));
    Ok(best)
}

/// [`solve_radial`] from the single start `r(R) = sqrt(λ²R² + c₀²(1 − R²/R_out²))`.
pub fn solve_radial_seeded(
    lambda: f64,
    density: &BulkDensity,
    phi: &SurfaceDensity,
    rho: f64,
    r_out: f64,
    m: usize,
    c0: f64,
) -> Result<RadialSolution> {
    if !(lambda > 0.0) || m < 32 || !(rho > 0.0 && rho < r_out) {
        return Err(Error::Argument(format!(
            "need λ > 0, M >= 32 and 0 < ρ < R_out (got λ = {lambda}, M = {m}, ρ = {rho}, R_out = {r_out})"
        )));
    }
    let knots = geometric_knots(rho, r_out, m);
    let sys = Discrete { knots: &knots, density, k_phi: anisotropic_circle_perimeter(1.0, phi) };
    let mut r: Vec<f64> = knots
        .iter()
        .map(|&k| (lambda * lambda * k * k + c0 * c0 * (1.0 - (k / r_out).powi(2))).sqrt())
        .collect();
    r[m] = lambda * r_out;
    let (mut e, mut g, mut hd, mut ho) = sys
        .eval(&r, true)
        .ok_or_else(|| Error::DomainScalar("initial radial profile is infeasible".into()))?;
    let free = m; // unknowns r_0 .. r_{M-1}
    // r_0 >= 0 is the only bound; at r_0 = 0 the cavity has closed
    let pgnorm = |r: &[f64], g: &[f64]| {
        g[..free]
            .iter()
            .enumerate()
            .map(|(i, v)| if i == 0 && r[0] <= 0.0 && *v > 0.0 { 0.0 } else { v.abs() })
            .fold(0.0f64, f64::max)
    };
    let mut status = RadialStatus::MaxIters;
    let mut iterations = 0;
    let mut history = vec![e];
    for it in 0..500 {
        iterations = it;
        if pgnorm(&r, &g) < 1e-10 {
            status = RadialStatus::Converged;
            break;
        }
        let lo = usize::from(r[0] <= 0.0 && g[0] > 0.0);
        let rhs: Vec<f64> = g[lo..free].iter().map(|v| -v).collect();
        let scale = hd[lo..free].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut mu = 0.0;
        let reduced = loop {
            if let Some(s) = thomas(&hd[lo..free], &ho[lo..free - 1], mu, &rhs) {
                break s;
            }
            mu = if mu == 0.0 { 1e-10 * scale } else { mu * 10.0 };
        };
        let mut step = vec![0.0; free];
        step[lo..].copy_from_slice(&reduced);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut cand = r.clone();
            for (c, s) in cand.iter_mut().zip(&step) {
                *c += t * s;
            }
            cand[0] = cand[0].max(0.0);
            let slope: f64 = cand.iter().zip(&r).zip(&g).map(|((c, o), gv)| (c - o) * gv).sum();
            if slope < 0.0 && cand.windows(2).all(|w| w[1] > w[0]) {
                if let Some((ec, gc, hdc, hoc)) = sys.eval(&cand, true) {
                    if ec <= e + 1e-4 * slope || (ec - e).abs() <= 1e-15 * e.abs() && pgnorm(&cand, &gc) < pgnorm(&r, &g) {
                        accepted = Some((cand, ec, gc, hdc, hoc));
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        let Some((cand, ec, gc, hdc, hoc)) = accepted else {
            status = if pgnorm(&r, &g) < 1e-6 { RadialStatus::Converged } else { RadialStatus::Stalled };
            break;
        };
        let decrease = e - ec;
        history.push(ec);
        r = cand;
        e = ec;
        g = gc;
        hd = hdc;
        ho = hoc;
        if decrease.abs() < 1e-14 * e.abs().max(1.0) && pgnorm(&r, &g) < 1e-8 {
            status = RadialStatus::Converged;
            break;
        }
    }
    let residual = pgnorm(&r, &g);
    Ok(RadialSolution {
        profile: RadialProfile::new(knots, r)?,
        energy: e,
        residual,
        iterations,
        status,
        history,
        alternate: None,
    })
}

/// One row of a stretch sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub cavity_radius: f64,
    pub bulk: f64,
    pub surface: f64,
    pub total: f64,
}

/// `solve_radial` over several boundary stretches (in parallel).
pub fn sweep(
    lambdas: &[f64],
    density: &BulkDensity,
    phi: &SurfaceDensity,
    rho: f64,
    r_out: f64,
    m: usize,
) -> Result<Vec<SweepRow>> {
    lambdas
        .par_iter()
        .map(|&lambda| {
            let sol = solve_radial(lambda, density, phi, rho, r_out, m)?;
            let c = sol.profile.cavity_radius();
            let surface = anisotropic_circle_perimeter(c, phi);
            Ok(SweepRow {
                lambda,
                cavity_radius: c,
                bulk: sol.energy - surface,
                surface,
                total: sol.energy,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "lambda,cavity_radius,bulk,surface,total")?;
    for r in rows {
        writeln!(
            out,
            "{},{:.12e},{:.12e},{:.12e},{:.12e}",
            r.lambda, r.cavity_radius, r.bulk, r.surface, r.total
        )?;
    }
    Ok(())
}

/// Pointwise residuals of `T ν = −h^φ ν` on the cavity circle.
#[derive(Debug, Clone)]
pub struct BvpReport {
    pub cavity_radius: f64,
    /// `(θ, |Tν + hν| / (|Tν| + |hν| + 1e-12))`.
    pub samples: Vec<(f64, f64)>,
    pub max_residual: f64,
}

/// Evaluates the cavity boundary condition at `samples` angles. `ν` is the
/// unit normal pointing out of the body (into the cavity), so `Dν = −(I − ν⊗ν)/c`
/// on a circle of radius `c`.
pub fn bvp_boundary_check(
    profile: &RadialProfile,
    density: &BulkDensity,
    phi: &SurfaceDensity,
    samples: usize,
) -> Result<BvpReport> {
    let rho = profile.inner_radius();
    if !(rho > 0.0) {
        return Err(Error::Argument("boundary check needs a punctured profile".into()));
    }
    let c = profile.cavity_radius();
    if !(c > 0.0) {
        return Err(Error::DomainScalar("cavity has closed (r(ρ) = 0); no boundary to check".into()));
    }
    let dr = profile.inner_slope();
    let mut out = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = TAU * k as f64 / samples as f64;
        let er = Vec2::new(t.cos(), t.sin());
        let et = Vec2::new(-t.sin(), t.cos());
        let f: Mat2 = er * er.transpose() * dr + et * et.transpose() * (c / rho);
        let tc = density.cauchy_stress(&f)?;
        let nu = -er;
        let dnu = -(Mat2::identity() - nu * nu.transpose()) / c;
        let h = (phi.hessian(&nu)? * dnu).trace();
        let tn = tc * nu;
        let hn = nu * h;
        out.push((t, (tn + hn).norm() / (tn.norm() + hn.norm() + 1e-12)));
    }
    let max_residual = out.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(BvpReport { cavity_radius: c, samples: out, max_residual })
}
