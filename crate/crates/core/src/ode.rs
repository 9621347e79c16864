//! Adaptive Dormand–Prince 5(4) integration for small fixed-size systems.

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub initial_step: Option<T>,
    pub max_steps: usize,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        Self { rel_tol: lit(1e-10), abs_tol: lit(1e-13), initial_step: None, max_steps: 2_000_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th-order weights are the last row of A; these are the differences to
// the embedded 4th-order solution.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns the state at each
/// requested output time (which must be monotone in the direction of
/// integration). Steps are clipped to land exactly on output times.
pub fn integrate<T, F, const N: usize>(
    f: F,
    t0: T,
    y0: [T; N],
    outputs: &[T],
    opts: &OdeOptions<T>,
) -> Result<Vec<[T; N]>>
where
    T: Real,
    F: Fn(T, &[T; N]) -> Result<[T; N]>,
{
    let mut results = Vec::with_capacity(outputs.len());
    let Some(&t_last) = outputs.last() else {
        return Ok(results);
    };
    let dir = if t_last >= t0 { T::one() } else { -T::one() };
    let span = (t_last - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.initial_step.unwrap_or_else(|| (span * lit(1e-4)).max(lit(1e-8))).abs();
    let mut k1 = f(t, &y)?;
    let mut steps = 0usize;

    for &target in outputs {
        if (target - t) * dir < T::zero() {
            return Err(Error::InvalidParameter("ODE output times must be monotone".into()));
        }
        while (target - t) * dir > T::zero() {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Precision(format!("ODE step budget exhausted at t = {}", to_f64(t))));
            }
            let remaining = (target - t).abs();
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };
            let hs = step * dir;

            let mut k = [[T::zero(); N]; 7];
            k[0] = k1;
            for s in 1..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = lit::<T>(A[s][j]);
                    if a != T::zero() {
                        for i in 0..N {
                            ys[i] = ys[i] + hs * a * kj[i];
                        }
                    }
                }
                k[s] = f(t + hs * lit(C[s]), &ys)?;
            }
            let mut y_new = y;
            for i in 0..N {
                let mut acc = T::zero();
                for s in 0..6 {
                    acc = acc + lit::<T>(A[6][s]) * k[s][i];
                }
                y_new[i] = y[i] + hs * acc;
            }
            let mut err = T::zero();
            for i in 0..N {
                let mut e = T::zero();
                for s in 0..7 {
                    e = e + lit::<T>(E[s]) * k[s][i];
                }
                let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
                let r = (hs * e / scale).abs();
                err = err.max(r);
            }
            if !err.is_finite() {
                h = step * lit(0.25);
                if h <= T::epsilon() * t.abs().max(T::one()) {
                    return Err(Error::Precision(format!("ODE step underflow at t = {}", to_f64(t))));
                }
                continue;
            }
            if err <= T::one() {
                t = if clipped { target } else { t + hs };
                y = y_new;
                k1 = k[6];
                if !clipped || step >= h * lit(0.5) {
                    let fac = if err == T::zero() {
                        lit(5.0)
                    } else {
                        (lit::<T>(0.9) * err.powf(lit(-0.2))).min(lit(5.0))
                    };
                    h = step * fac;
                }
            } else {
                let fac = (lit::<T>(0.9) * err.powf(lit(-0.2))).max(lit(0.1));
                h = step * fac;
                if h <= T::epsilon() * lit::<T>(16.0) * t.abs().max(T::one()) {
                    return Err(Error::Precision(format!("ODE step underflow at t = {}", to_f64(t))));
                }
            }
        }
        results.push(y);
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let opts = OdeOptions::default();
        let ts: Vec<f64> = (1..=10).map(|i| i as f64 * std::f64::consts::PI).collect();
        let ys = integrate(|_, y: &[f64; 2]| Ok([y[1], -y[0]]), 0.0, [1.0, 0.0], &ts, &opts).unwrap();
        for (i, y) in ys.iter().enumerate() {
            let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
            assert!((y[0] - sign).abs() < 1e-8, "{i} {:?}", y);
        }
    }

    #[test]
    fn integrates_backwards() {
        let ys = integrate(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, [1.0], &[-1.0, -2.0], &OdeOptions::default()).unwrap();
        assert!((ys[1][0] - (-2.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn rejects_non_monotone_outputs() {
        let r = integrate(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, [1.0], &[1.0, 0.5], &OdeOptions::default());
        assert!(r.is_err());
    }
}
