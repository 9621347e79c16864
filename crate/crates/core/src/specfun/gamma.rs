use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, real, to_f64, Real};

// B_{2k} / (2k (2k-1)) for k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// True when `z` sits on a pole of Γ (0, -1, -2, ...).
pub fn is_gamma_pole<T: Real>(z: Complex<T>) -> bool {
    z.im == T::zero() && z.re <= T::zero() && z.re == z.re.round()
}

/// Principal branch of log Γ(z).
///
/// Shifts `z` upward with the recurrence until Re z ≥ 12, then applies the
/// Stirling series. The logs of the shift factors are summed individually,
/// which gives the branch that is continuous off the negative real axis.
pub fn log_gamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if is_gamma_pole(z) {
        return Err(Error::Domain(format!("log_gamma pole at z = {}", to_f64(z.re))));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain("log_gamma of non-finite argument".into()));
    }
    let threshold = lit::<T>(12.0);
    let mut shift = Complex::new(T::zero(), T::zero());
    let mut w = z;
    while w.re < threshold {
        shift = shift + w.ln();
        w = w + T::one();
    }
    let half = lit::<T>(0.5);
    let ln_2pi_half = lit::<T>(0.918_938_533_204_672_7);
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex::new(T::zero(), T::zero());
    let mut pow = inv;
    for &c in &STIRLING {
        series = series + pow * lit::<T>(c);
        pow = pow * inv2;
    }
    Ok((w - half) * w.ln() - w + real(ln_2pi_half) + series - shift)
}

pub fn gamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    log_gamma(z).map(|l| l.exp())
}

/// 1/Γ(z), which is entire: zero at the poles of Γ.
pub fn rgamma<T: Real>(z: Complex<T>) -> Complex<T> {
    if is_gamma_pole(z) {
        Complex::new(T::zero(), T::zero())
    } else {
        // finite, non-pole arguments always succeed
        log_gamma(z).map(|l| (-l).exp()).unwrap_or_else(|_| Complex::new(T::zero(), T::zero()))
    }
}

/// Real Γ(x) for x > 0.
pub fn gamma_real<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::Domain(format!("gamma_real needs x > 0, got {}", to_f64(x))));
    }
    Ok(log_gamma(real(x))?.re.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    // Values from a 40-digit reference evaluation.
    const GAMMA_THIRD: f64 = 2.678_938_534_707_747_6;
    const GAMMA_TWO_THIRDS: f64 = 1.354_117_939_426_400_4;

    #[test]
    fn anchor_values() {
        assert!((gamma_real(1.0f64).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_real(1.0 / 3.0f64).unwrap() - GAMMA_THIRD).abs() < 1e-12 * GAMMA_THIRD);
        assert!((gamma_real(2.0 / 3.0f64).unwrap() - GAMMA_TWO_THIRDS).abs() < 1e-12 * GAMMA_TWO_THIRDS);
        assert!((gamma_real(1.0 / 3.0f64).unwrap() - 2.678938535).abs() < 1e-9);
        assert!((gamma_real(2.0 / 3.0f64).unwrap() - 1.354117939).abs() < 1e-9);
    }

    #[test]
    fn reflection_product() {
        let p = gamma_real(1.0 / 3.0f64).unwrap() * gamma_real(2.0 / 3.0f64).unwrap();
        let expect = 2.0 * std::f64::consts::PI / 3f64.sqrt();
        assert!((p - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn factorials_on_real_axis() {
        let mut fact = 1.0f64;
        for n in 1..40 {
            let lg = log_gamma(cplx(n as f64 + 1.0, 0.0)).unwrap();
            fact *= n as f64;
            assert!((lg.re - fact.ln()).abs() <= 1e-12 * fact.ln().abs().max(1.0), "{n}");
            assert_eq!(lg.im, 0.0);
        }
    }

    #[test]
    fn real_axis_relative_accuracy_against_recurrence() {
        // Γ(x+1) = x Γ(x) on [0.1, 50]
        let mut x = 0.1f64;
        while x < 50.0 {
            let lhs = log_gamma(cplx(x + 1.0, 0.0)).unwrap().re;
            let rhs = log_gamma(cplx(x, 0.0)).unwrap().re + x.ln();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "{x}");
            x += 0.37;
        }
    }

    #[test]
    fn complex_values_against_reference() {
        // mpmath.loggamma at 30 digits
        let cases = [
            ((0.5, 0.5), (0.112_387_242_809_623_112_5, -0.750_729_202_122_050_744_6)),
            ((1.0, -0.1), (-0.008_197_780_565_405_956_8, 0.057_322_940_416_719_720_5)),
            ((-2.5, 3.0), (-7.478_236_042_050_314_970, -5.726_104_271_910_386_842)),
        ];
        for ((re, im), (lre, lim)) in cases {
            let (lre, lim): (f64, f64) = (lre, lim);
            let v = log_gamma(cplx(re, im)).unwrap();
            assert!((v.re - lre).abs() < 1e-12 && (v.im - lim).abs() < 1e-12, "{re}+{im}i -> {v}");
        }
    }

    #[test]
    fn poles() {
        assert!(log_gamma(cplx(0.0f64, 0.0)).is_err());
        assert!(log_gamma(cplx(-3.0f64, 0.0)).is_err());
        assert_eq!(rgamma(cplx(-2.0f64, 0.0)), cplx(0.0, 0.0));
        assert!(log_gamma(cplx(-3.0f64, 1e-3)).is_ok());
    }
}
