//! Small numerical helpers shared by the compute modules: deterministic
//! summation, cofactors, smooth cutoffs, quadrature and monotone interpolation.

use crate::{Mat2, Vec2};

/// Pairwise (cascade) summation in index order.
///
/// The result only depends on the order of `values`, so sums assembled from
/// per-element contributions collected in element order are reproducible
/// regardless of how the contributions were computed in parallel.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Component-wise pairwise sum of 2-vectors.
pub fn pairwise_sum_vec(values: &[Vec2]) -> Vec2 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        let mut acc = Vec2::zeros();
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum_vec(&values[..mid]) + pairwise_sum_vec(&values[mid..])
}

/// Cofactor matrix, `cof F = det(F) F^{-T}`.
#[inline]
pub fn cof(f: &Mat2) -> Mat2 {
    Mat2::new(f[(1, 1)], -f[(1, 0)], -f[(0, 1)], f[(0, 0)])
}

/// Rotation by -90°: maps the direction of a counter-clockwise edge to its
/// outward normal (scaled by the edge length).
#[inline]
pub fn rot_cw(v: &Vec2) -> Vec2 {
    Vec2::new(v.y, -v.x)
}

/// C² cutoff on `[0, 1]`: equals 1 at 0, 0 at 1 and beyond, with vanishing
/// first and second derivatives at both ends.
#[inline]
pub fn cutoff(t: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

#[inline]
pub fn cutoff_deriv(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        -30.0 * t * t * (1.0 - t) * (1.0 - t)
    }
}

/// Supremum of `|cutoff'|`, attained at `t = 1/2`.
pub const CUTOFF_DERIV_MAX: f64 = 1.875;

/// Adaptive Gauss–Kronrod (7, 15) quadrature of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
        const XGK: [f64; 8] = [
            0.991_455_371_120_812_6,
            0.949_107_912_342_758_5,
            0.864_864_423_359_769_1,
            0.741_531_185_599_394_4,
            0.586_087_235_467_691_1,
            0.405_845_151_377_397_2,
            0.207_784_955_007_898_5,
            0.0,
        ];
        const WGK: [f64; 8] = [
            0.022_935_322_010_529_22,
            0.063_092_092_629_978_55,
            0.104_790_010_322_250_2,
            0.140_653_259_715_525_9,
            0.169_004_726_639_267_9,
            0.190_350_578_064_785_4,
            0.204_432_940_075_298_9,
            0.209_482_141_084_727_8,
        ];
        const WG: [f64; 4] = [
            0.129_484_966_168_869_7,
            0.279_705_391_489_276_7,
            0.381_830_050_505_118_9,
            0.417_959_183_673_469_4,
        ];
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let fc = f(c);
        let mut kron = WGK[7] * fc;
        let mut gauss = WG[3] * fc;
        for j in 0..7 {
            let x = h * XGK[j];
            let s = f(c - x) + f(c + x);
            kron += WGK[j] * s;
            if j % 2 == 1 {
                gauss += WG[j / 2] * s;
            }
        }
        (kron * h, ((kron - gauss) * h).abs())
    }
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (val, err) = gk15(f, a, b);
        if err <= tol.max(1e-15 * val.abs()) || depth >= 40 {
            return val;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth + 1) + rec(f, m, b, 0.5 * tol, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    rec(f, a, b, tol, 0)
}

/// Symmetric quadrature rule on the reference triangle: barycentric
/// coordinates and weights summing to one.
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    /// Smallest tabulated rule integrating polynomials of degree `order` exactly
    /// (orders above 5 fall back to the degree-5 rule).
    pub fn with_order(order: usize) -> Self {
        match order {
            0 | 1 => Self {
                points: vec![[1.0 / 3.0; 3]],
                weights: vec![1.0],
            },
            2 => Self {
                points: vec![
                    [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
                    [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
                    [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
                ],
                weights: vec![1.0 / 3.0; 3],
            },
            3 | 4 => {
                let (a, wa) = (0.445_948_490_915_965, 0.223_381_589_678_011);
                let (b, wb) = (0.091_576_213_509_771, 0.109_951_743_655_322);
                let mut points = Vec::new();
                let mut weights = Vec::new();
                for (p, w) in [(a, wa), (b, wb)] {
                    let q = 1.0 - 2.0 * p;
                    points.extend([[q, p, p], [p, q, p], [p, p, q]]);
                    weights.extend([w; 3]);
                }
                Self { points, weights }
            }
            _ => {
                let (a, wa) = (0.470_142_064_105_115, 0.132_394_152_788_506);
                let (b, wb) = (0.101_286_507_323_456, 0.125_939_180_544_827);
                let mut points = vec![[1.0 / 3.0; 3]];
                let mut weights = vec![0.225];
                for (p, w) in [(a, wa), (b, wb)] {
                    let q = 1.0 - 2.0 * p;
                    points.extend([[q, p, p], [p, q, p], [p, p, q]]);
                    weights.extend([w; 3]);
                }
                Self { points, weights }
            }
        }
    }
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes).
#[derive(Debug, Clone)]
pub struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl Pchip {
    /// `xs` strictly increasing, at least two knots.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let n = xs.len();
        assert!(n >= 2 && ys.len() == n);
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut ds = vec![0.0; n];
        if n == 2 {
            ds[0] = delta[0];
            ds[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    ds[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            ds[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            ds[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Self { xs, ys, ds }
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|k| k.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.clamp(1, self.xs.len() - 1) - 1,
        }
    }

    /// Value and first derivative at `x` (extrapolates the end cubics).
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1, d0, d1) = (self.ys[i], self.ys[i + 1], self.ds[i], self.ds[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
        let dh00 = (6.0 * t2 - 6.0 * t) / h;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = (-6.0 * t2 + 6.0 * t) / h;
        let dh11 = 3.0 * t2 - 2.0 * t;
        let d = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
        (v, d)
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_integers() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
    }

    #[test]
    fn cofactor_is_det_times_inverse_transpose() {
        let f = Mat2::new(1.3, -0.2, 0.4, 2.1);
        let expected = f.determinant() * f.try_inverse().unwrap().transpose();
        assert!((cof(&f) - expected).norm() < 1e-14);
    }

    #[test]
    fn gauss_kronrod_integrates_smooth_functions() {
        let v = integrate(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-12);
        let v = integrate(&|x: f64| 1.0 / x, 1e-3, 1.0, 1e-10);
        assert!((v - 1000f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn triangle_rules_reach_their_degree() {
        // ∫ over the unit right triangle of x^a y^b = a! b! / (a + b + 2)!
        let fact = |n: u32| (1..=n).product::<u32>() as f64;
        for (order, max_deg) in [(1, 1), (2, 2), (4, 4), (5, 5)] {
            let rule = TriangleRule::with_order(order);
            for a in 0..=max_deg {
                for b in 0..=(max_deg - a) {
                    let q: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| 0.5 * w * p[1].powi(a as i32) * p[2].powi(b as i32))
                        .sum();
                    let exact = fact(a) * fact(b) / fact(a + b + 2);
                    assert!((q - exact).abs() < 1e-12, "order {order} x^{a} y^{b}");
                }
            }
        }
    }

    #[test]
    fn pchip_preserves_monotone_data() {
        let xs = vec![0.0, 0.1, 0.5, 0.6, 1.0];
        let ys = vec![0.0, 0.05, 0.9, 0.95, 1.0];
        let p = Pchip::new(xs, ys);
        let mut prev = -1.0;
        for i in 0..=1000 {
            let (v, d) = p.eval(i as f64 / 1000.0);
            assert!(v >= prev - 1e-15);
            assert!(d >= -1e-12);
            prev = v;
        }
        assert!((p.eval(0.5).0 - 0.9).abs() < 1e-15);
    }
}
