//! Quadrature rules and finite-difference stencils on uniform grids.

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Real};

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = from_usize::<T>(n);
        let m = n.div_ceil(2);
        for i in 0..m {
            // Chebyshev initial guess, then Newton on P_n.
            let mut x = (T::PI() * (from_usize::<T>(i) + lit(0.75)) / (nf + lit(0.5))).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x = x - dx;
                if dx.abs() <= T::epsilon() * lit(4.0) {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != T::zero() { d } else { dp };
            let w = lit::<T>(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(T) -> T, lo: T, hi: T) -> T {
        let half = (hi - lo) * lit(0.5);
        let mid = (hi + lo) * lit(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(mid + half * x))
            * half
    }

    /// Composite rule over `panels` equal sub-intervals.
    pub fn integrate_composite(&self, f: impl Fn(T) -> T, lo: T, hi: T, panels: usize) -> T {
        let width = (hi - lo) / from_usize(panels);
        (0..panels).fold(T::zero(), |acc, i| {
            let a = lo + width * from_usize(i);
            acc + self.integrate(&f, a, a + width)
        })
    }
}

fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = from_usize::<T>(k);
        let p2 = ((kf + kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { p0 } else { p1 };
    let nf = from_usize::<T>(n);
    let d = nf * (x * p - p0) / (x * x - T::one());
    (p, d)
}

/// Double-exponential (tanh-sinh) quadrature on a finite interval.
///
/// Integrable endpoint singularities such as `√(x − a)` or `1/√(x − a)`
/// are handled without special treatment; the integrand is never evaluated
/// at the endpoints themselves. The closure receives the abscissa together
/// with its distances to `lo` and `hi`, which stay accurate near the ends.
pub fn tanh_sinh<T: Real>(f: impl Fn(T, T, T) -> T, lo: T, hi: T, rel_tol: T) -> Result<T> {
    if hi == lo {
        return Ok(T::zero());
    }
    let half = (hi - lo) * lit(0.5);
    let pi_2 = T::FRAC_PI_2();
    let t_max = lit::<T>(3.5);
    let eval = |t: T| -> T {
        let u = pi_2 * t.sinh();
        let cu = u.cosh();
        // 1 - tanh(u) and 1 + tanh(u) without cancellation
        let e = (-(u + u).abs()).exp();
        let small = lit::<T>(2.0) * e / (T::one() + e);
        let (d_lo, d_hi) = if u >= T::zero() {
            (half * (lit::<T>(2.0) - small), half * small)
        } else {
            (half * small, half * (lit::<T>(2.0) - small))
        };
        if d_lo <= T::zero() || d_hi <= T::zero() {
            return T::zero();
        }
        let x = if u >= T::zero() { hi - d_hi } else { lo + d_lo };
        let w = pi_2 * t.cosh() / (cu * cu);
        let v = f(x, d_lo, d_hi) * w;
        if v.is_finite() {
            v
        } else {
            T::zero()
        }
    };
    let mut h = lit::<T>(0.5);
    let mut sum = eval(T::zero());
    let mut k = 1usize;
    while from_usize::<T>(k) * h <= t_max {
        let t = from_usize::<T>(k) * h;
        sum = sum + eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h * half;
    for _level in 0..12 {
        h = h * lit(0.5);
        let mut k = 1usize;
        while from_usize::<T>(k) * h <= t_max {
            let t = from_usize::<T>(k) * h;
            sum = sum + eval(t) + eval(-t);
            k += 2;
        }
        let next = sum * h * half;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= rel_tol * estimate.abs() || diff <= T::min_positive_value() {
            return Ok(estimate);
        }
    }
    Err(Error::Precision("tanh-sinh quadrature did not reach the requested tolerance".into()))
}

/// Cumulative integral of uniformly sampled values, `out[i] = ∫_{x0}^{x_i}`.
///
/// Even-indexed nodes use composite Simpson; odd nodes add a one-interval
/// quadratic correction.
pub fn cumulative_simpson<T: Real>(f: &[T], h: T) -> Vec<T> {
    let n = f.len();
    let mut out = vec![T::zero(); n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = (f[0] + f[1]) * h * lit(0.5);
        return out;
    }
    let third = h / lit(3.0);
    let twelfth = h / lit(12.0);
    // first interval from the quadratic through f0, f1, f2
    out[1] = twelfth * (lit::<T>(5.0) * f[0] + lit::<T>(8.0) * f[1] - f[2]);
    for i in 2..n {
        if i % 2 == 0 {
            out[i] = out[i - 2] + third * (f[i - 2] + lit::<T>(4.0) * f[i - 1] + f[i]);
        } else {
            out[i] = out[i - 1] + twelfth * (-f[i - 2] + lit::<T>(8.0) * f[i - 1] + lit::<T>(5.0) * f[i]);
        }
    }
    out
}

/// Integral over the whole sample range.
pub fn simpson<T: Real>(f: &[T], h: T) -> T {
    cumulative_simpson(f, h).last().copied().unwrap_or(T::zero())
}

/// Fourth-order first derivative on a uniform grid (one-sided at the ends).
pub fn derivative5<T: Real>(f: &[T], h: T) -> Result<Vec<T>> {
    let n = f.len();
    if n < 5 {
        return Err(Error::Resolution(format!("five-point stencil needs at least 5 samples, got {n}")));
    }
    let c = |v: f64| lit::<T>(v);
    let s = lit::<T>(12.0) * h;
    let mut d = vec![T::zero(); n];
    d[0] = (c(-25.0) * f[0] + c(48.0) * f[1] - c(36.0) * f[2] + c(16.0) * f[3] - c(3.0) * f[4]) / s;
    d[1] = (c(-3.0) * f[0] - c(10.0) * f[1] + c(18.0) * f[2] - c(6.0) * f[3] + f[4]) / s;
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - c(8.0) * f[i - 1] + c(8.0) * f[i + 1] - f[i + 2]) / s;
    }
    let m = n - 1;
    d[m] = -(c(-25.0) * f[m] + c(48.0) * f[m - 1] - c(36.0) * f[m - 2] + c(16.0) * f[m - 3] - c(3.0) * f[m - 4]) / s;
    d[m - 1] =
        -(c(-3.0) * f[m] - c(10.0) * f[m - 1] + c(18.0) * f[m - 2] - c(6.0) * f[m - 3] + f[m - 4]) / s;
    Ok(d)
}

/// Fourth-order second derivative on a uniform grid (six-point one-sided
/// stencils at the ends).
pub fn second_derivative5<T: Real>(f: &[T], h: T) -> Result<Vec<T>> {
    let n = f.len();
    if n < 6 {
        return Err(Error::Resolution(format!("second-derivative stencil needs at least 6 samples, got {n}")));
    }
    let c = |v: f64| lit::<T>(v);
    let s = lit::<T>(12.0) * h * h;
    let mut d = vec![T::zero(); n];
    d[0] = (c(45.0) * f[0] - c(154.0) * f[1] + c(214.0) * f[2] - c(156.0) * f[3] + c(61.0) * f[4]
        - c(10.0) * f[5])
        / s;
    d[1] = (c(10.0) * f[0] - c(15.0) * f[1] - c(4.0) * f[2] + c(14.0) * f[3] - c(6.0) * f[4] + f[5]) / s;
    for i in 2..n - 2 {
        d[i] = (-f[i - 2] + c(16.0) * f[i - 1] - c(30.0) * f[i] + c(16.0) * f[i + 1] - f[i + 2]) / s;
    }
    let m = n - 1;
    d[m] = (c(45.0) * f[m] - c(154.0) * f[m - 1] + c(214.0) * f[m - 2] - c(156.0) * f[m - 3]
        + c(61.0) * f[m - 4]
        - c(10.0) * f[m - 5])
        / s;
    d[m - 1] = (c(10.0) * f[m] - c(15.0) * f[m - 1] - c(4.0) * f[m - 2] + c(14.0) * f[m - 3]
        - c(6.0) * f[m - 4]
        + f[m - 5])
        / s;
    Ok(d)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / from_usize(n - 1);
            (0..n).map(|i| if i == n - 1 { hi } else { lo + h * from_usize(i) }).collect()
        }
    }
}
