//! Gauss hypergeometric function ₂F₁(a, b; c; z) for complex parameters and
//! real `z ∈ [0, 1)`.

use num_complex::Complex;

use super::gamma::{is_gamma_pole, log_gamma, rgamma};
use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, real, to_f64, Real};

pub const MAX_TERMS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Params<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub z: T,
}

impl<T: Real> Hyp2F1Params<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, z: T) -> Self {
        Self { a, b, c, z }
    }
}

/// A ₂F₁ value; `degraded` is set when `c − a − b` was within 1e-6 of an
/// integer and the value had to be interpolated from perturbed parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Eval<T> {
    pub value: Complex<T>,
    pub degraded: bool,
}

pub fn hyp2f1<T: Real>(p: &Hyp2F1Params<T>) -> Result<Hyp2F1Eval<T>> {
    hyp2f1_complement(p.a, p.b, p.c, p.z, T::one() - p.z)
}

/// d₂F₁/dz = (ab/c)·₂F₁(a+1, b+1; c+1; z).
pub fn hyp2f1_dz<T: Real>(p: &Hyp2F1Params<T>) -> Result<Hyp2F1Eval<T>> {
    hyp2f1_dz_complement(p.a, p.b, p.c, p.z, T::one() - p.z)
}

/// Same as [`hyp2f1`], with `1 − z` supplied by the caller so that arguments
/// exponentially close to 1 keep their precision.
pub fn hyp2f1_complement<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    z: T,
    one_minus_z: T,
) -> Result<Hyp2F1Eval<T>> {
    check_args(c, z, one_minus_z)?;
    let zero = Complex::new(T::zero(), T::zero());
    if z == T::zero() || a == zero || b == zero {
        return Ok(Hyp2F1Eval { value: real(T::one()), degraded: false });
    }
    if z <= lit(0.5) {
        return Ok(Hyp2F1Eval { value: series(a, b, c, z)?, degraded: false });
    }
    let s = c - a - b;
    let nearest = s.re.round();
    let dist_re = s.re - nearest;
    let delta = lit::<T>(1e-6);
    if s.im.abs() < delta && dist_re.abs() < delta {
        // Interpolate between c − a − b = m ± δ, which straddle the
        // logarithmic case.
        let lo = c - real(dist_re + delta) - Complex::new(T::zero(), s.im);
        let hi = c - real(dist_re - delta) - Complex::new(T::zero(), s.im);
        let f_lo = transformed(a, b, lo, one_minus_z)?;
        let f_hi = transformed(a, b, hi, one_minus_z)?;
        let w_hi = (dist_re + delta) / (delta + delta);
        let value = f_lo * (T::one() - w_hi) + f_hi * w_hi;
        return Ok(Hyp2F1Eval { value, degraded: true });
    }
    Ok(Hyp2F1Eval { value: transformed(a, b, c, one_minus_z)?, degraded: false })
}

pub fn hyp2f1_dz_complement<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    z: T,
    one_minus_z: T,
) -> Result<Hyp2F1Eval<T>> {
    check_args(c, z, one_minus_z)?;
    let zero = Complex::new(T::zero(), T::zero());
    if a == zero || b == zero {
        return Ok(Hyp2F1Eval { value: zero, degraded: false });
    }
    let one = real(T::one());
    let inner = hyp2f1_complement(a + one, b + one, c + one, z, one_minus_z)?;
    Ok(Hyp2F1Eval { value: a * b / c * inner.value, degraded: inner.degraded })
}

fn check_args<T: Real>(c: Complex<T>, z: T, w: T) -> Result<()> {
    if !(z >= T::zero() && w > T::zero() && z.is_finite()) {
        return Err(Error::Domain(format!("hyp2f1 requires z in [0, 1), got z = {}", to_f64(z))));
    }
    if is_gamma_pole(c) {
        return Err(Error::Domain(format!("hyp2f1 parameter c = {} is a non-positive integer", to_f64(c.re))));
    }
    Ok(())
}

/// Direct Gauss series. Stops once three consecutive terms fall below
/// machine precision relative to the partial sum.
pub(crate) fn series<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, z: T) -> Result<Complex<T>> {
    let tol = T::epsilon() * lit(0.5);
    let mut term = real(T::one());
    let mut sum = term;
    let mut small = 0;
    for n in 0..MAX_TERMS {
        let nf = from_usize::<T>(n);
        let denom = (c + nf) * (nf + T::one());
        if denom.norm() == T::zero() {
            return Err(Error::Domain("hyp2f1 series hit a pole in c".into()));
        }
        term = term * (a + nf) * (b + nf) / denom * z;
        sum = sum + term;
        if term.norm() <= tol * sum.norm() {
            small += 1;
            if small >= 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence { terms: MAX_TERMS })
}

/// z → 1 − z connection formula:
///
/// F(a,b;c;z) = Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b)) F(a,b;a+b−c+1;1−z)
///            + (1−z)^{c−a−b} Γ(c)Γ(a+b−c)/(Γ(a)Γ(b)) F(c−a,c−b;c−a−b+1;1−z)
fn transformed<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, w: T) -> Result<Complex<T>> {
    let one = real(T::one());
    let s = c - a - b;
    let lg_c = log_gamma(c)?;
    let first = {
        let pre = (lg_c + log_gamma(s)?).exp() * rgamma(c - a) * rgamma(c - b);
        if pre.norm() == T::zero() {
            pre
        } else {
            pre * series(a, b, one - s, w)?
        }
    };
    let second = {
        let pre = (lg_c + log_gamma(-s)? + s * w.ln()).exp() * rgamma(a) * rgamma(b);
        if pre.norm() == T::zero() {
            pre
        } else {
            pre * series(c - a, c - b, s + one, w)?
        }
    };
    Ok(first + second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn p(a: (f64, f64), b: (f64, f64), c: (f64, f64), z: f64) -> Hyp2F1Params<f64> {
        Hyp2F1Params::new(cplx(a.0, a.1), cplx(b.0, b.1), cplx(c.0, c.1), z)
    }

    /// Plain power series summed to a fixed, generous number of terms.
    fn brute_series(a: Complex<f64>, b: Complex<f64>, c: Complex<f64>, z: f64, terms: usize) -> Complex<f64> {
        let mut t = cplx(1.0, 0.0);
        let mut s = t;
        for n in 0..terms {
            let nf = n as f64;
            t = t * (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
            s += t;
        }
        s
    }

    #[test]
    fn zero_argument_is_one() {
        let v = hyp2f1(&p((0.3, 2.0), (-1.5, 0.1), (2.2, -0.4), 0.0)).unwrap();
        assert_eq!(v.value, cplx(1.0, 0.0));
    }

    #[test]
    fn log_case() {
        // 2F1(1,1;2;z) = -ln(1-z)/z
        let v = hyp2f1(&p((1.0, 0.0), (1.0, 0.0), (2.0, 0.0), 0.5)).unwrap().value;
        let brute = brute_series(cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(2.0, 0.0), 0.5, 200);
        assert!((v - brute).norm() < 1e-14);
        assert!((v.re - 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!((v.re - 1.3862944).abs() < 1e-7);
    }

    #[test]
    fn log_case_above_half_is_flagged() {
        // c − a − b = 0 exactly
        let z = 0.8;
        let v = hyp2f1(&p((1.0, 0.0), (1.0, 0.0), (2.0, 0.0), z)).unwrap();
        assert!(v.degraded);
        let exact = -(1.0f64 - z).ln() / z;
        assert!((v.value.re - exact).abs() < 1e-8 * exact, "{} {}", v.value, exact);
    }

    #[test]
    fn complex_parameters_near_one() {
        // Reference: direct series in 50-digit arithmetic.
        let v = hyp2f1(&p((1.0, -0.1), (0.0, -0.1), (1.0, 0.5), 0.9)).unwrap();
        assert!(!v.degraded);
        let reference = cplx(0.849_067_032_295_425_943_9, -0.083_615_098_169_028_494_6);
        assert!((v.value - reference).norm() <= 1e-10 * reference.norm(), "{}", v.value);
        let brute = brute_series(cplx(1.0, -0.1), cplx(0.0, -0.1), cplx(1.0, 0.5), 0.9, 600);
        assert!((v.value - brute).norm() <= 1e-10 * brute.norm());
    }

    #[test]
    fn derivative_examples() {
        let d = hyp2f1_dz(&p((0.7, 0.2), (1.3, -0.5), (2.1, 0.3), 0.0)).unwrap().value;
        let expect = cplx(0.7, 0.2) * cplx(1.3, -0.5) / cplx(2.1, 0.3);
        assert!((d - expect).norm() < 1e-15);

        let d = hyp2f1_dz(&p((1.0, 0.0), (1.0, 0.0), (2.0, 0.0), 0.5)).unwrap().value;
        // finite difference of the plain series
        let h = 1e-5;
        let f = |z: f64| brute_series(cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(2.0, 0.0), z, 400);
        let fd = (f(0.5 + h) - f(0.5 - h)) / (2.0 * h);
        assert!((d - fd).norm() < 1e-8);
        assert!((d.re - 1.227411).abs() < 1e-6);

        let d = hyp2f1_dz(&p((0.0, 0.0), (1.3, -0.5), (2.1, 0.3), 0.7)).unwrap().value;
        assert_eq!(d, cplx(0.0, 0.0));
    }

    #[test]
    fn complement_keeps_precision_near_one() {
        let (a, b, c) = (cplx(1.0, -0.07), cplx(0.0, -0.07), cplx(1.0, 0.5));
        let w: f64 = 1e-14;
        let v = hyp2f1_complement(a, b, c, 1.0 - w, w).unwrap().value;
        // analytic behaviour at w → 0: first connection term dominates
        let lim = (log_gamma(c).unwrap() + log_gamma(c - a - b).unwrap()).exp() * rgamma(c - a) * rgamma(c - b);
        let osc = (log_gamma(c).unwrap() + log_gamma(a + b - c).unwrap() + (c - a - b) * w.ln()).exp()
            * rgamma(a)
            * rgamma(b);
        assert!((v - lim - osc).norm() < 1e-9);
    }

    #[test]
    fn domain_errors() {
        assert!(hyp2f1(&p((1.0, 0.0), (1.0, 0.0), (-2.0, 0.0), 0.3)).is_err());
        assert!(hyp2f1(&p((1.0, 0.0), (1.0, 0.0), (2.0, 0.0), 1.0)).is_err());
        assert!(hyp2f1(&p((1.0, 0.0), (1.0, 0.0), (2.0, 0.0), -0.1)).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn contiguous_relation(
            ar in -1.5f64..1.5, ai in -1.0f64..1.0,
            br in -1.5f64..1.5, bi in -1.0f64..1.0,
            cr in 1.5f64..3.5, ci in -1.0f64..1.0,
            z in 0.0f64..0.9,
        ) {
            let (a, b, c) = (cplx(ar, ai), cplx(br, bi), cplx(cr, ci));
            let f = |cc: Complex<f64>| hyp2f1_complement(a, b, cc, z, 1.0 - z).unwrap().value;
            let (fm, f0, fp) = (f(c - 1.0), f(c), f(c + 1.0));
            let r = c * (c - 1.0) * (z - 1.0) * fm
                + c * (c - 1.0 - (c * 2.0 - a - b - 1.0) * z) * f0
                + (c - a) * (c - b) * z * fp;
            proptest::prop_assert!(r.norm() <= 1e-8 * f0.norm().max(1e-300), "residual {} at z={}", r.norm(), z);
        }
    }
}
