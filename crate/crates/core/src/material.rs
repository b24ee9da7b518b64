//! Bulk and surface energy densities.
//!
//! The bulk density has the split form
//!
//! ```text
//! W(F) = (μ/2)|F|^p + γ(det F),      γ(h) = a h² − b log h   (default)
//! ```
//!
//! which is polyconvex: `W(F) = g(F, det F)` with
//! `g(F, h) = (μ/2)|F|^p + γ(h)` convex in `(F, h)` on `h > 0`, and it
//! blows up as `det F → 0⁺`. The growth exponent must exceed `N − 1 = 1`.
//!
//! Surface densities are norms on ℝ²: positive, convex and one-homogeneous,
//! continuously differentiable away from the origin.

use crate::numeric::cof;
use crate::{Error, Mat2, Result, Vec2};

/// Tabulated volumetric part `γ(h)`, interpolated by cubic Hermite splines
/// with three-point slopes. Outside the table `γ` continues as
/// `γ₀ + s₀ h₀ log(h/h₀)` below (with `s₀ = γ'(h₀) < 0`, so `γ → +∞` at 0)
/// and as a quadratic with curvature `a` above.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumetricTable {
    h: Vec<f64>,
    gamma: Vec<f64>,
    slope: Vec<f64>,
}

impl VolumetricTable {
    pub fn new(h: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if h.len() < 3 || h.len() != gamma.len() {
            return Err(Error::Config(
                "volumetric table needs at least 3 (h, gamma) pairs".into(),
            ));
        }
        if h[0] <= 0.0 || h.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "volumetric table abscissae must be positive and strictly increasing".into(),
            ));
        }
        let n = h.len();
        let mut slope = vec![0.0; n];
        for i in 0..n {
            slope[i] = if i == 0 {
                let (h0, h1) = (h[1] - h[0], h[2] - h[1]);
                let d0 = (gamma[1] - gamma[0]) / h0;
                let d1 = (gamma[2] - gamma[1]) / h1;
                d0 - h0 * (d1 - d0) / (h0 + h1)
            } else if i == n - 1 {
                let (h0, h1) = (h[n - 2] - h[n - 3], h[n - 1] - h[n - 2]);
                let d0 = (gamma[n - 2] - gamma[n - 3]) / h0;
                let d1 = (gamma[n - 1] - gamma[n - 2]) / h1;
                d1 + h1 * (d1 - d0) / (h0 + h1)
            } else {
                let (h0, h1) = (h[i] - h[i - 1], h[i + 1] - h[i]);
                let d0 = (gamma[i] - gamma[i - 1]) / h0;
                let d1 = (gamma[i + 1] - gamma[i]) / h1;
                (h1 * d0 + h0 * d1) / (h0 + h1)
            };
        }
        if slope[0] >= 0.0 {
            return Err(Error::Config(
                "volumetric table must be decreasing at its first abscissa so that gamma blows up at 0"
                    .into(),
            ));
        }
        Ok(Self { h, gamma, slope })
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.gamma
    }

    /// `(γ, γ', γ'')` at `h > 0`; `curvature` is the quadratic coefficient above the table.
    fn eval(&self, h: f64, curvature: f64) -> (f64, f64, f64) {
        let n = self.h.len();
        if h < self.h[0] {
            let (h0, g0, s0) = (self.h[0], self.gamma[0], self.slope[0]);
            return (g0 + s0 * h0 * (h / h0).ln(), s0 * h0 / h, -s0 * h0 / (h * h));
        }
        if h > self.h[n - 1] {
            let (hn, gn, sn) = (self.h[n - 1], self.gamma[n - 1], self.slope[n - 1]);
            let t = h - hn;
            return (gn + sn * t + curvature * t * t, sn + 2.0 * curvature * t, 2.0 * curvature);
        }
        let i = match self.h.binary_search_by(|k| k.partial_cmp(&h).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        };
        let w = self.h[i + 1] - self.h[i];
        let t = (h - self.h[i]) / w;
        let (y0, y1, d0, d1) = (self.gamma[i], self.gamma[i + 1], self.slope[i], self.slope[i + 1]);
        let (t2, t3) = (t * t, t * t * t);
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * w * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * w * d1;
        let dv = ((6.0 * t2 - 6.0 * t) * y0 + (-6.0 * t2 + 6.0 * t) * y1) / w
            + (3.0 * t2 - 4.0 * t + 1.0) * d0
            + (3.0 * t2 - 2.0 * t) * d1;
        let ddv = ((12.0 * t - 6.0) * y0 + (-12.0 * t + 6.0) * y1) / (w * w)
            + ((6.0 * t - 4.0) * d0 + (6.0 * t - 2.0) * d1) / w;
        (v, dv, ddv)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BulkKind {
    /// `γ(h) = a h² − b log h`.
    DefaultCompressible,
    /// `γ` read from a table; `a` sets the quadratic growth past the table.
    UserTable(VolumetricTable),
}

/// Stored-energy density `W(F) = (μ/2)|F|^p + γ(det F)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BulkDensity {
    pub kind: BulkKind,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub p: f64,
}

impl Default for BulkDensity {
    fn default() -> Self {
        Self {
            kind: BulkKind::DefaultCompressible,
            mu: 1.0,
            a: 1.0,
            b: 1.0,
            p: 2.0,
        }
    }
}

impl BulkDensity {
    pub fn new(kind: BulkKind, mu: f64, a: f64, b: f64, p: f64) -> Result<Self> {
        for (name, v) in [("mu", mu), ("a", a), ("b", b)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Config(format!(
                "growth exponent p must exceed N - 1 = 1, got {p}"
            )));
        }
        Ok(Self { kind, mu, a, b, p })
    }

    pub fn compressible(mu: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(BulkKind::DefaultCompressible, mu, a, b, 2.0)
    }

    /// Coercivity constant `c` in `W(F) ≥ c|F|^p + γ(det F)`.
    pub fn coercivity_constant(&self) -> f64 {
        0.5 * self.mu
    }

    /// `(γ(h), γ'(h), γ''(h))` for `h > 0`.
    pub fn volumetric(&self, h: f64) -> (f64, f64, f64) {
        match &self.kind {
            BulkKind::DefaultCompressible => (
                self.a * h * h - self.b * h.ln(),
                2.0 * self.a * h - self.b / h,
                2.0 * self.a + self.b / (h * h),
            ),
            BulkKind::UserTable(t) => t.eval(h, self.a),
        }
    }

    fn check_det(&self, f: &Mat2) -> Result<f64> {
        let det = f.determinant();
        if det > 0.0 && det.is_finite() {
            Ok(det)
        } else {
            Err(Error::Domain {
                what: format!("det F = {det:.6e} is not positive"),
                matrix: *f,
            })
        }
    }

    /// `W(F)`.
    pub fn energy(&self, f: &Mat2) -> Result<f64> {
        let det = self.check_det(f)?;
        Ok(self.energy_unchecked(f, det))
    }

    #[inline]
    fn energy_unchecked(&self, f: &Mat2, det: f64) -> f64 {
        let n2 = f.norm_squared();
        let iso = if self.p == 2.0 { n2 } else { n2.powf(0.5 * self.p) };
        0.5 * self.mu * iso + self.volumetric(det).0
    }

    /// First Piola stress `DW(F)`.
    pub fn stress(&self, f: &Mat2) -> Result<Mat2> {
        let det = self.check_det(f)?;
        Ok(self.stress_unchecked(f, det))
    }

    #[inline]
    fn stress_unchecked(&self, f: &Mat2, det: f64) -> Mat2 {
        let n2 = f.norm_squared();
        let iso = if self.p == 2.0 {
            self.mu
        } else {
            0.5 * self.mu * self.p * n2.powf(0.5 * self.p - 1.0)
        };
        f * iso + cof(f) * self.volumetric(det).1
    }

    /// `(W, DW)` in one pass.
    pub fn energy_and_stress(&self, f: &Mat2) -> Result<(f64, Mat2)> {
        let det = self.check_det(f)?;
        Ok((self.energy_unchecked(f, det), self.stress_unchecked(f, det)))
    }

    /// Cauchy stress `T = DW(F) Fᵀ / det F`.
    pub fn cauchy_stress(&self, f: &Mat2) -> Result<Mat2> {
        let det = self.check_det(f)?;
        Ok(self.stress_unchecked(f, det) * f.transpose() / det)
    }

    /// Energy, gradient and Hessian of `(s₁, s₂) ↦ W(diag(s₁, s₂))`.
    pub fn principal(&self, s1: f64, s2: f64) -> Result<(f64, [f64; 2], [[f64; 2]; 2])> {
        let d = s1 * s2;
        if !(d > 0.0) {
            return Err(Error::DomainScalar(format!(
                "principal stretches ({s1:.6e}, {s2:.6e}) have non-positive product"
            )));
        }
        let q = s1 * s1 + s2 * s2;
        let k = 0.5 * self.mu * self.p;
        let qa = q.powf(0.5 * self.p - 1.0);
        let qb = if self.p == 2.0 { 0.0 } else { (self.p - 2.0) * q.powf(0.5 * self.p - 2.0) };
        let (g, g1, g2) = self.volumetric(d);
        let w = 0.5 * self.mu * q.powf(0.5 * self.p) + g;
        let grad = [k * qa * s1 + g1 * s2, k * qa * s2 + g1 * s1];
        let h11 = k * (qa + qb * s1 * s1) + g2 * s2 * s2;
        let h22 = k * (qa + qb * s2 * s2) + g2 * s1 * s1;
        let h12 = k * qb * s1 * s2 + g2 * d + g1;
        Ok((w, grad, [[h11, h12], [h12, h22]]))
    }

    /// Sampled checks of the structural assumptions on `W`.
    pub fn check_assumptions(&self, samples: &[Mat2]) -> BulkReport {
        let c = self.coercivity_constant();
        let mut min_margin = f64::INFINITY;
        let mut w3_max_ratio: f64 = 0.0;
        let mut w3_finite = true;
        for f in samples {
            let Ok((w, dw)) = self.energy_and_stress(f) else {
                continue;
            };
            let det = f.determinant();
            let lower = c * f.norm().powf(self.p) + self.volumetric(det).0;
            min_margin = min_margin.min(w - lower);
            let denom = w + 1.0;
            if denom > 0.0 {
                w3_max_ratio = w3_max_ratio.max((dw * f.transpose()).norm() / denom);
            } else {
                w3_finite = false;
            }
        }
        let blowup: Vec<f64> = (10..=40)
            .map(|k| {
                let f = Mat2::new(0.5f64.powi(k), 0.0, 0.0, 1.0);
                self.energy(&f).unwrap_or(f64::INFINITY)
            })
            .collect();
        let blows_up = blowup.windows(2).all(|w| w[1] > w[0]) && *blowup.last().unwrap() > 10.0;
        BulkReport {
            coercivity_margin: min_margin,
            w3_constant: if w3_finite { w3_max_ratio } else { f64::INFINITY },
            blows_up_at_zero_det: blows_up,
        }
    }
}

/// Outcome of [`BulkDensity::check_assumptions`].
#[derive(Debug, Clone, Copy)]
pub struct BulkReport {
    /// `min (W(F) − c|F|^p − γ(det F))` over the samples; ≥ 0 when coercive.
    pub coercivity_margin: f64,
    /// Empirical `c̃ = max |DW(F)Fᵀ| / (W(F) + 1)`.
    pub w3_constant: f64,
    pub blows_up_at_zero_det: bool,
}

/// Anisotropic surface density `φ`.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceDensity {
    /// `φ(z) = |z|`.
    Isotropic,
    /// `φ(z) = sqrt(z·Az)` with `A` symmetric positive definite.
    Elliptic { a: Mat2 },
    /// `φ(z) = Σᵢ sqrt(zᵢ² + ε²|z|²) / sqrt(1 + 2ε²)`.
    SmoothedL1 { eps: f64 },
}

impl SurfaceDensity {
    pub fn elliptic(a: Mat2) -> Result<Self> {
        let asym = (a[(0, 1)] - a[(1, 0)]).abs();
        if asym > 1e-12 * a.norm() {
            return Err(Error::Config(format!(
                "elliptic anisotropy matrix must be symmetric (off-diagonal mismatch {asym:.3e})"
            )));
        }
        if !(a[(0, 0)] > 0.0 && a.determinant() > 0.0) {
            return Err(Error::Config(
                "elliptic anisotropy matrix must be positive definite".into(),
            ));
        }
        Ok(Self::Elliptic { a })
    }

    pub fn smoothed_l1(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Config(format!("smoothing eps must be positive, got {eps}")));
        }
        Ok(Self::SmoothedL1 { eps })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Isotropic => "isotropic",
            Self::Elliptic { .. } => "elliptic",
            Self::SmoothedL1 { .. } => "smoothed_l1",
        }
    }

    /// `φ(z)`, with `φ(0) = 0`.
    pub fn value(&self, z: &Vec2) -> f64 {
        match self {
            Self::Isotropic => z.norm(),
            Self::Elliptic { a } => z.dot(&(a * z)).max(0.0).sqrt(),
            Self::SmoothedL1 { eps } => {
                let e2 = eps * eps * z.norm_squared();
                ((z.x * z.x + e2).sqrt() + (z.y * z.y + e2).sqrt()) / (1.0 + 2.0 * eps * eps).sqrt()
            }
        }
    }

    /// `Dφ(z)` for `z ≠ 0`.
    pub fn gradient(&self, z: &Vec2) -> Result<Vec2> {
        if z.x == 0.0 && z.y == 0.0 {
            return Err(Error::DomainScalar(
                "surface density is not differentiable at the origin".into(),
            ));
        }
        Ok(match self {
            Self::Isotropic => z / z.norm(),
            Self::Elliptic { a } => {
                let az = a * z;
                az / z.dot(&az).sqrt()
            }
            Self::SmoothedL1 { eps } => {
                let e2 = eps * eps;
                let n2 = z.norm_squared();
                let s1 = (z.x * z.x + e2 * n2).sqrt();
                let s2 = (z.y * z.y + e2 * n2).sqrt();
                let gx = (z.x + e2 * z.x) / s1 + e2 * z.x / s2;
                let gy = e2 * z.y / s1 + (z.y + e2 * z.y) / s2;
                Vec2::new(gx, gy) / (1.0 + 2.0 * e2).sqrt()
            }
        })
    }

    /// `D²φ(z)` for `z ≠ 0`; only the isotropic and elliptic kinds provide it.
    pub fn hessian(&self, z: &Vec2) -> Result<Mat2> {
        if z.x == 0.0 && z.y == 0.0 {
            return Err(Error::DomainScalar(
                "surface density is not twice differentiable at the origin".into(),
            ));
        }
        match self {
            Self::Isotropic => {
                let n = z.norm();
                let u = z / n;
                Ok((Mat2::identity() - u * u.transpose()) / n)
            }
            Self::Elliptic { a } => {
                let az = a * z;
                let phi = z.dot(&az).sqrt();
                Ok(a / phi - az * az.transpose() / (phi * phi * phi))
            }
            Self::SmoothedL1 { .. } => Err(Error::HessianUnavailable("smoothed_l1")),
        }
    }

    /// `ĉ = min φ` over 256 equally spaced unit directions.
    pub fn lower_bound_constant(&self) -> f64 {
        (0..256)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 256.0;
                self.value(&Vec2::new(t.cos(), t.sin()))
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Sampled checks of homogeneity, positivity, convexity and the Euler identity.
    /// `pairs` are arbitrary nonzero vectors; `scales` positive factors.
    pub fn check_properties(&self, pairs: &[(Vec2, Vec2)], scales: &[f64]) -> SurfaceReport {
        let c_hat = self.lower_bound_constant();
        let mut homogeneity: f64 = 0.0;
        let mut convexity_violation: f64 = 0.0;
        let mut euler: f64 = 0.0;
        let mut lower_bound_violation: f64 = 0.0;
        for ((z, w), t) in pairs.iter().zip(scales.iter().cycle()) {
            let pz = self.value(z);
            homogeneity = homogeneity.max((self.value(&(z * *t)) - t * pz).abs() / (t * pz));
            let mid = self.value(&(0.5 * (z + w)));
            convexity_violation = convexity_violation.max(mid - 0.5 * (pz + self.value(w)));
            if let Ok(g) = self.gradient(z) {
                euler = euler.max((g.dot(z) - pz).abs() / pz);
            }
            lower_bound_violation = lower_bound_violation.max(c_hat * z.norm() - pz);
        }
        SurfaceReport {
            c_hat,
            homogeneity_rel_error: homogeneity,
            convexity_violation,
            euler_rel_error: euler,
            lower_bound_violation,
        }
    }
}

/// Outcome of [`SurfaceDensity::check_properties`].
#[derive(Debug, Clone, Copy)]
pub struct SurfaceReport {
    pub c_hat: f64,
    pub homogeneity_rel_error: f64,
    /// `max φ((z+w)/2) − (φ(z)+φ(w))/2`; ≤ 0 (up to rounding) for convex `φ`.
    pub convexity_violation: f64,
    pub euler_rel_error: f64,
    pub lower_bound_violation: f64,
}
