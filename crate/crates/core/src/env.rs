//! Gaussian environment modes driven by the tanh tunneling background.
//!
//! A mode `y` with frequency ω(t)² = ω0² + 2c·x̄(t)/m is kept in the
//! Gaussian state exp[(−α² + iβ) y²/2ħ]. The state follows either from
//! direct integration of the (α, β) equations or from the exact mode
//! function ξ, related by d ln ξ/dt = (β + iα²)/m.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::EnvMode;
use crate::ode::{integrate, OdeOptions};
use crate::scalar::{cplx, lit, real, to_f64, Real};
use crate::specfun::{hyp2f1_complement, hyp2f1_dz_complement};

/// Vacuum initial states are placed at t0 = −VACUUM_START/ρ.
pub const VACUUM_START: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TanhBackground<T> {
    pub amplitude: T,
    pub rho: T,
}

impl<T: Real> TanhBackground<T> {
    pub fn new(amplitude: T, rho: T) -> Result<Self> {
        if !(amplitude > T::zero() && rho > T::zero() && amplitude.is_finite() && rho.is_finite()) {
            return Err(Error::InvalidParameter("tanh background needs a > 0 and rho > 0".into()));
        }
        Ok(Self { amplitude, rho })
    }

    /// x̄(t) = a(1 + tanh ρt)
    pub fn position(&self, t: T) -> T {
        // 1 + tanh u = 2/(1 + e^{-2u}) keeps precision for u → −∞
        self.amplitude * lit::<T>(2.0) / (T::one() + (lit::<T>(-2.0) * self.rho * t).exp())
    }

    /// aρ sech²(ρt)
    pub fn velocity(&self, t: T) -> T {
        let s = T::one() / (self.rho * t).cosh();
        self.amplitude * self.rho * s * s
    }

    /// Inverse of [`position`](Self::position) for 0 < x < 2a.
    pub fn time_at(&self, x: T) -> Result<T> {
        let u = x / self.amplitude - T::one();
        if !(u.abs() < T::one()) {
            return Err(Error::Domain(format!(
                "tanh background only reaches 0 < x < 2a, got x = {}",
                to_f64(x)
            )));
        }
        Ok(u.atanh() / self.rho)
    }

    pub fn vacuum_start(&self) -> T {
        -lit::<T>(VACUUM_START) / self.rho
    }
}

/// ω(t) for a mode on the background.
pub fn omega_t<T: Real>(mode: &EnvMode<T>, bg: &TanhBackground<T>, t: T) -> Result<T> {
    omega_sq_t(mode, bg, t).map(|w2| w2.sqrt())
}

fn omega_sq_t<T: Real>(mode: &EnvMode<T>, bg: &TanhBackground<T>, t: T) -> Result<T> {
    let w2 = mode.omega_sq_at(bg.position(t));
    if !(w2 > T::zero()) {
        return Err(Error::Tachyonic { omega_sq: to_f64(w2), t: to_f64(t) });
    }
    Ok(w2)
}

/// Late-time frequency √(ω0² + 4ca/m).
pub fn omega_final<T: Real>(mode: &EnvMode<T>, bg: &TanhBackground<T>) -> Result<T> {
    let w2 = mode.omega_sq_at(lit::<T>(2.0) * bg.amplitude);
    if !(w2 > T::zero()) {
        return Err(Error::Tachyonic { omega_sq: to_f64(w2), t: f64::INFINITY });
    }
    Ok(w2.sqrt())
}

/// (ω+, ω−) = ((ω∞ ± ω0)/2)
pub fn omega_pm<T: Real>(mode: &EnvMode<T>, bg: &TanhBackground<T>) -> Result<(T, T)> {
    let wf = omega_final(mode, bg)?;
    let half = lit::<T>(0.5);
    Ok(((wf + mode.omega0) * half, (wf - mode.omega0) * half))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianModeState<T> {
    pub alpha: T,
    pub beta: T,
    pub t: T,
}

impl<T: Real> GaussianModeState<T> {
    pub fn vacuum(mode: &EnvMode<T>, t: T) -> Self {
        Self { alpha: (mode.mass * mode.omega0).sqrt(), beta: T::zero(), t }
    }

    pub fn alpha_sq(&self) -> T {
        self.alpha * self.alpha
    }

    /// (β + iα²)/m
    pub fn log_derivative(&self, mass: T) -> Complex<T> {
        cplx(self.beta, self.alpha_sq()) / mass
    }

    /// Normalised wavefunction at `y`.
    pub fn wavefunction(&self, y: T, hbar: T) -> Complex<T> {
        let a2 = self.alpha_sq();
        let norm = (a2 / (T::PI() * hbar)).powf(lit(0.25));
        (cplx(-a2, self.beta) * (y * y / (lit::<T>(2.0) * hbar))).exp() * norm
    }

    /// ⟨y²⟩ = ħ/2α²
    pub fn y2(&self, hbar: T) -> T {
        hbar / (lit::<T>(2.0) * self.alpha_sq())
    }

    /// ⟨y⁴⟩ = 3ħ²/4α⁴
    pub fn y4(&self, hbar: T) -> T {
        let a2 = self.alpha_sq();
        lit::<T>(3.0) * hbar * hbar / (lit::<T>(4.0) * a2 * a2)
    }
}

/// Vacuum state at t0 = −12/ρ.
pub fn vacuum_start<T: Real>(mode: &EnvMode<T>, bg: &TanhBackground<T>) -> GaussianModeState<T> {
    GaussianModeState::vacuum(mode, bg.vacuum_start())
}

/// Integrates α̇ = −αβ/m, β̇ = α⁴/m − β²/m − mω(t)² from `state0` to each
/// of `times`.
pub fn evolve_gaussian<T: Real>(
    mode: &EnvMode<T>,
    bg: &TanhBackground<T>,
    state0: &GaussianModeState<T>,
    times: &[T],
) -> Result<Vec<GaussianModeState<T>>> {
    let m = mode.mass;
    let floor = T::min_positive_value().sqrt();
    let rhs = |t: T, y: &[T; 2]| {
        let (a, b) = (y[0], y[1]);
        if !(a > floor) || !b.is_finite() {
            return Err(Error::Stiffness { t: to_f64(t) });
        }
        let w2 = omega_sq_t(mode, bg, t)?;
        let a2 = a * a;
        Ok([-a * b / m, (a2 * a2 - b * b) / m - m * w2])
    };
    let opts = OdeOptions::default();
    let ys = integrate(rhs, state0.t, [state0.alpha, state0.beta], times, &opts)?;
    Ok(ys.iter().zip(times).map(|(y, &t)| GaussianModeState { alpha: y[0], beta: y[1], t }).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFunction<T> {
    pub xi: Complex<T>,
    pub xi_dot: Complex<T>,
    pub t: T,
}

impl<T: Real> ModeFunction<T> {
    /// ξ̇/ξ
    pub fn log_derivative(&self) -> Complex<T> {
        self.xi_dot / self.xi
    }

    /// ξ ξ̇* − ξ* ξ̇ (−i for the vacuum normalisation).
    pub fn wronskian(&self) -> Complex<T> {
        self.xi * self.xi_dot.conj() - self.xi.conj() * self.xi_dot
    }
}

/// Exact mode function approaching the vacuum (2ω0)^{−1/2} e^{iω0 t} as
/// t → −∞:
///
/// ```text
/// ξ = (2ω0)^{−1/2} exp[iω+ t + iω− ln(2 cosh ρt)/ρ] ₂F₁(1 − iω−/ρ, −iω−/ρ; 1 + iω0/ρ; z)
/// z = (1 + tanh ρt)/2
/// ```
pub fn xi_analytic<T: Real>(mode: &EnvMode<T>, bg: &TanhBackground<T>, t: T) -> Result<ModeFunction<T>> {
    let (wp, wm) = omega_pm(mode, bg)?;
    let rho = bg.rho;
    let w0 = mode.omega0;
    let u = rho * t;
    let two = lit::<T>(2.0);
    let z = T::one() / (T::one() + (-two * u).exp());
    let zc = T::one() / (T::one() + (two * u).exp());
    let a = cplx(T::one(), -wm / rho);
    let b = cplx(T::zero(), -wm / rho);
    let c = cplx(T::one(), w0 / rho);
    let f = hyp2f1_complement(a, b, c, z, zc)?.value;
    let df = hyp2f1_dz_complement(a, b, c, z, zc)?.value;

    // ln(2 cosh u) = |u| + ln(1 + e^{−2|u|})
    let lncosh = u.abs() + (-two * u.abs()).exp().ln_1p();
    let phase = cplx(T::zero(), wp * t + wm * lncosh / rho).exp();
    let xi = phase * f / (two * w0).sqrt();
    let zdot = two * rho * z * zc;
    let log_d = cplx(T::zero(), wp + wm * u.tanh()) + df * zdot / f;
    Ok(ModeFunction { xi, xi_dot: xi * log_d, t })
}

/// α² = m Im(d ln ξ/dt), β = m Re(d ln ξ/dt).
pub fn state_from_xi<T: Real>(mode: &EnvMode<T>, mf: &ModeFunction<T>) -> Result<GaussianModeState<T>> {
    if mf.xi == real(T::zero()) {
        return Err(Error::Domain("mode function vanishes".into()));
    }
    let l = mf.log_derivative();
    if !(l.im > T::zero()) {
        return Err(Error::InconsistentBranch { im: to_f64(l.im) });
    }
    Ok(GaussianModeState { alpha: (mode.mass * l.im).sqrt(), beta: mode.mass * l.re, t: mf.t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{linspace, GaussLegendre};

    fn fig3() -> (EnvMode<f64>, TanhBackground<f64>) {
        (EnvMode::new(1.0, 1.0, 0.15).unwrap(), TanhBackground::new(1.0, 2.0).unwrap())
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn background_shape() {
        let bg = TanhBackground::new(1.5, 0.7).unwrap();
        assert_eq!(bg.position(0.0), 1.5);
        assert!(bg.position(-1e3) > 0.0 || bg.position(-1e3) == 0.0);
        assert!(bg.position(1e3) <= 3.0);
        for t in [-2.0, -0.3, 0.0, 0.4, 3.0] {
            assert!(rel(bg.time_at(bg.position(t)).unwrap() + 1e-300, t + 1e-300) < 1e-10 || t == 0.0);
            let h = 1e-5;
            let fd = (bg.position(t + h) - bg.position(t - h)) / (2.0 * h);
            assert!(rel(bg.velocity(t), fd) < 1e-8);
        }
        assert!(bg.time_at(3.0).is_err() && bg.time_at(-0.1).is_err());
        assert!((1.0 - (bg.rho * bg.vacuum_start()).tanh().abs()) < 1e-10);
    }

    #[test]
    fn omega_examples() {
        let (mode, bg) = fig3();
        let wf = omega_final(&mode, &bg).unwrap();
        assert!(rel(wf, 1.6f64.sqrt()) < 1e-15);
        assert!((wf - 1.264911).abs() < 1e-6);
        assert!(rel(omega_t(&mode, &bg, 50.0).unwrap(), wf) < 1e-15);
        assert!(rel(omega_t(&mode, &bg, 0.0).unwrap(), 1.3f64.sqrt()) < 1e-15);
        assert!(rel(omega_t(&mode, &bg, -50.0).unwrap(), 1.0) < 1e-15);
        let free = EnvMode::new(1.0, 1.0, 0.0).unwrap();
        for t in [-3.0, 0.0, 2.0] {
            assert_eq!(omega_t(&free, &bg, t).unwrap(), 1.0);
        }
        let (wp, wm) = omega_pm(&mode, &bg).unwrap();
        assert!((wp - 1.132456).abs() < 1e-6 && (wm - 0.132456).abs() < 1e-6);
    }

    #[test]
    fn tachyonic_mode_is_rejected() {
        let mode = EnvMode::new(1.0, 1.0, -0.5).unwrap();
        let bg = TanhBackground::new(1.0, 2.0).unwrap();
        assert!(omega_t(&mode, &bg, -5.0).is_ok());
        assert!(matches!(omega_t(&mode, &bg, 5.0), Err(Error::Tachyonic { .. })));
        assert!(matches!(xi_analytic(&mode, &bg, 0.0), Err(Error::Tachyonic { .. })));
        let s0 = vacuum_start(&mode, &bg);
        assert!(matches!(evolve_gaussian(&mode, &bg, &s0, &[5.0]), Err(Error::Tachyonic { .. })));
    }

    #[test]
    fn decoupled_mode_stays_in_vacuum() {
        let mode = EnvMode::new(2.0, 0.7, 0.0).unwrap();
        let bg = TanhBackground::new(1.0, 1.0).unwrap();
        let s = evolve_gaussian(&mode, &bg, &vacuum_start(&mode, &bg), &[-3.0, 0.0, 8.0]).unwrap();
        for st in s {
            assert!(rel(st.alpha_sq(), 1.4) < 1e-12 && st.beta.abs() < 1e-12);
        }
        for t in [-4.0, 0.0, 3.0] {
            let mf = xi_analytic(&mode, &bg, t).unwrap();
            let expect = cplx(0.0, 0.7 * t).exp() / 1.4f64.sqrt();
            assert!((mf.xi - expect).norm() < 1e-14);
            let st = state_from_xi(&mode, &mf).unwrap();
            assert!(rel(st.alpha_sq(), 1.4) < 1e-14 && st.beta.abs() < 1e-14);
        }
    }

    #[test]
    fn xi_satisfies_mode_equation() {
        let (mode, bg) = fig3();
        let h = 1e-3;
        for t in linspace(-5.0, 5.0, 21) {
            let xi = |s: f64| xi_analytic(&mode, &bg, s).unwrap().xi;
            let d2 = (-xi(t + 2.0 * h) + xi(t + h) * 16.0 - xi(t) * 30.0 + xi(t - h) * 16.0 - xi(t - 2.0 * h))
                / (12.0 * h * h);
            let w2 = omega_t(&mode, &bg, t).unwrap().powi(2);
            assert!((d2 + xi(t) * w2).norm() < 1e-7, "t = {t}");
            let mf = xi_analytic(&mode, &bg, t).unwrap();
            let fd = (xi(t - 2.0 * h) - xi(t - h) * 8.0 + xi(t + h) * 8.0 - xi(t + 2.0 * h)) / (12.0 * h);
            assert!((mf.xi_dot - fd).norm() < 1e-9);
        }
    }

    #[test]
    fn xi_vacuum_asymptotics() {
        let (mode, bg) = fig3();
        let mf = xi_analytic(&mode, &bg, -15.0).unwrap();
        assert!((mf.xi.norm() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((mf.log_derivative() - cplx(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn wronskian_is_conserved() {
        let (mode, bg) = fig3();
        for t in linspace(-10.0 / bg.rho, 10.0 / bg.rho, 41) {
            let w = xi_analytic(&mode, &bg, t).unwrap().wronskian();
            assert!((w - cplx(0.0, -1.0)).norm() < 1e-8, "t = {t}: {w}");
        }
    }

    #[test]
    fn mapping_reproduces_alpha_beta_equations() {
        let (mode, bg) = fig3();
        let h = 1e-4;
        for t in linspace(-3.0, 3.0, 13) {
            let st = |s: f64| state_from_xi(&mode, &xi_analytic(&mode, &bg, s).unwrap()).unwrap();
            let (sp, sm, s0) = (st(t + h), st(t - h), st(t));
            let da = (sp.alpha - sm.alpha) / (2.0 * h);
            let db = (sp.beta - sm.beta) / (2.0 * h);
            let w2 = omega_t(&mode, &bg, t).unwrap().powi(2);
            assert!((da + s0.alpha * s0.beta).abs() < 1e-8);
            assert!((db - (s0.alpha.powi(4) - s0.beta.powi(2) - w2)).abs() < 1e-8);
        }
    }

    #[test]
    fn state_is_invariant_under_xi_rescaling() {
        let (mode, bg) = fig3();
        let mf = xi_analytic(&mode, &bg, 0.3).unwrap();
        let k = cplx(-2.5, 0.7);
        let scaled = ModeFunction { xi: mf.xi * k, xi_dot: mf.xi_dot * k, t: mf.t };
        let (s1, s2) = (state_from_xi(&mode, &mf).unwrap(), state_from_xi(&mode, &scaled).unwrap());
        assert!(rel(s1.alpha, s2.alpha) < 1e-14 && (s1.beta - s2.beta).abs() < 1e-14);
    }

    #[test]
    fn wrong_branch_is_reported() {
        let (mode, _) = fig3();
        let mf = ModeFunction { xi: cplx(1.0, 0.0), xi_dot: cplx(0.0, -1.0), t: 0.0 };
        assert!(matches!(state_from_xi(&mode, &mf), Err(Error::InconsistentBranch { .. })));
        let zero = ModeFunction { xi: cplx(0.0, 0.0), xi_dot: cplx(1.0, 0.0), t: 0.0 };
        assert!(state_from_xi(&mode, &zero).is_err());
    }

    #[test]
    fn ode_and_analytic_routes_agree() {
        let (mode, bg) = fig3();
        let ts = linspace(-5.0, 6.0, 45);
        let ode = evolve_gaussian(&mode, &bg, &vacuum_start(&mode, &bg), &ts).unwrap();
        for (s, &t) in ode.iter().zip(&ts) {
            let a = state_from_xi(&mode, &xi_analytic(&mode, &bg, t).unwrap()).unwrap();
            let d = ((s.alpha_sq() - a.alpha_sq()).powi(2) + (s.beta - a.beta).powi(2)).sqrt();
            let n = (a.alpha_sq().powi(2) + a.beta.powi(2)).sqrt();
            assert!(d / n < 1e-7, "t = {t}: {}", d / n);
        }
    }

    #[test]
    fn adiabatic_limit_has_no_particle_creation() {
        let mode = EnvMode::new(1.0, 1.0, 0.15).unwrap();
        let bg = TanhBackground::new(1.0, 0.02).unwrap();
        let s0 = GaussianModeState::vacuum(&mode, -600.0);
        let late = evolve_gaussian(&mode, &bg, &s0, &[600.0]).unwrap()[0];
        let wf = omega_final(&mode, &bg).unwrap();
        assert!(rel(late.alpha_sq(), mode.mass * wf) < 1e-3);
    }

    #[test]
    fn sudden_limit_oscillates_at_twice_final_frequency() {
        let mode = EnvMode::new(1.0, 1.0, 0.15).unwrap();
        let bg = TanhBackground::new(1.0, 50.0).unwrap();
        let wf = omega_final(&mode, &bg).unwrap();
        let period = std::f64::consts::PI / wf;
        let t0 = 5.0;
        let ts = linspace(t0, t0 + 2.0 * period, 81);
        let s = evolve_gaussian(&mode, &bg, &vacuum_start(&mode, &bg), &ts).unwrap();
        // β(t + π/ω∞) = β(t), β(t + π/2ω∞) ≠ β(t)
        for i in 0..40 {
            assert!((s[i].beta - s[i + 40].beta).abs() < 1e-7);
        }
        assert!((s[0].beta - s[20].beta).abs() > 1e-2);
        // instantaneous-jump squeezed state: ξ = ξ0 cos ω∞t + ξ̇0 sin(ω∞t)/ω∞
        let xi0 = cplx(0.5f64.sqrt(), 0.0);
        let dxi0 = cplx(0.0, 0.5f64.sqrt());
        let max_beta = |f: &dyn Fn(f64) -> f64| ts.iter().map(|&t| f(t).abs()).fold(0.0, f64::max);
        let sudden = |t: f64| {
            let xi = xi0 * (wf * t).cos() + dxi0 * (wf * t).sin() / wf;
            let dxi = -xi0 * wf * (wf * t).sin() + dxi0 * (wf * t).cos();
            (dxi / xi).re
        };
        let got = s.iter().map(|x| x.beta.abs()).fold(0.0, f64::max);
        assert!(rel(got, max_beta(&sudden)) < 0.05);
    }

    #[test]
    fn alpha_underflow_is_stiffness() {
        let mode = EnvMode::new(1.0, 1.0, 0.15).unwrap();
        let bg = TanhBackground::new(1.0, 2.0).unwrap();
        let s0 = GaussianModeState { alpha: 1e-200, beta: 1e10, t: 0.0 };
        assert!(matches!(evolve_gaussian(&mode, &bg, &s0, &[1.0]), Err(Error::Stiffness { .. })));
    }

    #[test]
    fn gaussian_moments_by_quadrature() {
        let gl = GaussLegendre::<f64>::new(40);
        for (alpha, beta, hbar) in [(1.0f64, 0.0f64, 1.0f64), (0.8, -0.6, 0.5), (1.7, 2.0, 2.0)] {
            let s = GaussianModeState { alpha, beta, t: 0.0 };
            let w = 12.0 * s.y2(hbar).sqrt();
            let m = |p: i32| gl.integrate_composite(|y| y.powi(p) * s.wavefunction(y, hbar).norm_sqr(), -w, w, 16);
            assert!((m(0) - 1.0).abs() < 1e-8);
            assert!(rel(m(2), s.y2(hbar)) < 1e-8);
            assert!(rel(m(4), s.y4(hbar)) < 1e-8);
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn evolution_keeps_alpha_positive_and_matches_xi(
            c in -0.05f64..0.5, rho in 0.5f64..4.0, w0 in 0.5f64..2.0, t in -3.0f64..3.0
        ) {
            let mode = EnvMode::new(1.0, w0, c).unwrap();
            let bg = TanhBackground::new(1.0, rho).unwrap();
            let s = evolve_gaussian(&mode, &bg, &vacuum_start(&mode, &bg), &[t]).unwrap()[0];
            proptest::prop_assert!(s.alpha > 0.0);
            let a = state_from_xi(&mode, &xi_analytic(&mode, &bg, t).unwrap()).unwrap();
            proptest::prop_assert!(rel(s.alpha_sq(), a.alpha_sq()) < 1e-6);
        }
    }
}
