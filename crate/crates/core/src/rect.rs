//! Exact stationary solution of tunneling through a rectangular barrier,
//! and the effective classical system it defines.
//!
//! With the transmitted amplitude fixed to one, the three regions are
//!
//! ```text
//! x < 0      ψ = A e^{ikx} + B e^{-ikx}
//! 0 < x < a  ψ = F e^{-βx} + G e^{βx}
//! a < x      ψ = C e^{ikx}
//! ```

use num_complex::Complex;

use crate::env::TanhBackground;
use crate::error::{Error, Result};
use crate::model::{wave_numbers, PhysicalParams, RectBarrier};
use crate::ode::{integrate, OdeOptions};
use crate::quad::{second_derivative5, GaussLegendre};
use crate::scalar::{cplx, lit, real, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Incident,
    Barrier,
    Transmitted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectSolution<T> {
    /// A
    pub incident: Complex<T>,
    /// B
    pub reflected: Complex<T>,
    /// C (normalised to 1)
    pub transmitted: Complex<T>,
    /// F, coefficient of e^{-βx}
    pub decaying: Complex<T>,
    /// G, coefficient of e^{βx}
    pub growing: Complex<T>,
    pub k: T,
    pub beta: T,
    /// β + ik
    pub lambda_plus: Complex<T>,
    /// β − ik
    pub lambda_minus: Complex<T>,
    pub barrier: RectBarrier<T>,
    pub params: PhysicalParams<T>,
}

/// Matches the three regional solutions at x = 0 and x = a.
pub fn solve_rect<T: Real>(params: &PhysicalParams<T>, barrier: &RectBarrier<T>) -> Result<RectSolution<T>> {
    let (k, beta) = wave_numbers(params, barrier)?;
    let a = barrier.width;
    let i = cplx(T::zero(), T::one());
    let c_amp = real(T::one());
    let lp = cplx(beta, k);
    let lm = cplx(beta, -k);
    let phase = (i * k * a).exp();
    let grow = (beta * a).exp();
    let decay = (-beta * a).exp();

    let fg = c_amp * phase / (beta + beta);
    let decaying = fg * lm * grow;
    let growing = fg * lp * decay;

    let ab = -c_amp * phase / (i * lit::<T>(4.0) * k * beta);
    let incident = ab * (lm * lm * grow - lp * lp * decay);
    let reflected = ab * lm * lp * (decay - grow);

    Ok(RectSolution {
        incident,
        reflected,
        transmitted: c_amp,
        decaying,
        growing,
        k,
        beta,
        lambda_plus: lp,
        lambda_minus: lm,
        barrier: *barrier,
        params: *params,
    })
}

/// Transmission probability by two routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmission<T> {
    /// |C/A|² from the matched amplitudes.
    pub amplitude_ratio: T,
    /// 4k²β² / [(k²+β²)² cosh²(βa) − (β²−k²)²]
    pub closed_form: T,
}

impl<T: Real> Transmission<T> {
    pub fn value(&self) -> T {
        self.closed_form
    }

    pub fn relative_mismatch(&self) -> T {
        (self.amplitude_ratio - self.closed_form).abs() / self.closed_form
    }
}

pub fn transmission_probability<T: Real>(sol: &RectSolution<T>) -> Transmission<T> {
    let amplitude_ratio = sol.transmitted.norm_sqr() / sol.incident.norm_sqr();
    Transmission { amplitude_ratio, closed_form: sol.transmission_closed_form() }
}

/// Closed-form rolling time across the barrier.
pub fn rolling_time<T: Real>(sol: &RectSolution<T>) -> T {
    let (k, b) = (sol.k, sol.beta);
    let (k2, b2) = (k * k, b * b);
    let a = sol.barrier.width;
    let p = &sol.params;
    p.mass / (lit::<T>(4.0) * p.hbar * k * b2)
        * ((k2 + b2) / b * (lit::<T>(2.0) * b * a).sinh() + lit::<T>(2.0) * a * (b2 - k2))
}

/// ∫₀ᵃ dx / v(x) by composite Gauss–Legendre, v = √(2(E − V_tot)/M).
pub fn rolling_time_quadrature<T: Real>(sol: &RectSolution<T>) -> T {
    let gl = GaussLegendre::new(20);
    let panels = (sol.beta * sol.barrier.width).to_usize().unwrap_or(1).clamp(4, 400) * 4;
    gl.integrate_composite(
        |x| {
            let kin = sol.kinetic_region2_unchecked(x);
            T::one() / (lit::<T>(2.0) * kin / sol.params.mass).sqrt()
        },
        T::zero(),
        sol.barrier.width,
        panels,
    )
}

impl<T: Real> RectSolution<T> {
    pub fn region(&self, x: T) -> Region {
        if x < T::zero() {
            Region::Incident
        } else if x <= self.barrier.width {
            Region::Barrier
        } else {
            Region::Transmitted
        }
    }

    /// ψ and ψ' evaluated with the formula of the given region (which may
    /// be continued outside it, as needed for matching checks).
    pub fn psi_in(&self, region: Region, x: T) -> (Complex<T>, Complex<T>) {
        let ik = cplx(T::zero(), self.k);
        match region {
            Region::Incident => {
                let e = (ik * x).exp();
                let ei = e.inv();
                (self.incident * e + self.reflected * ei, ik * (self.incident * e - self.reflected * ei))
            }
            Region::Barrier => {
                let d = (-self.beta * x).exp();
                let g = (self.beta * x).exp();
                (
                    self.decaying * d + self.growing * g,
                    (self.growing * g - self.decaying * d) * self.beta,
                )
            }
            Region::Transmitted => {
                let e = (ik * x).exp();
                (self.transmitted * e, ik * self.transmitted * e)
            }
        }
    }

    pub fn psi(&self, x: T) -> (Complex<T>, Complex<T>) {
        self.psi_in(self.region(x), x)
    }

    /// Amplitude R = |ψ|.
    pub fn amplitude(&self, x: T) -> T {
        self.psi(x).0.norm()
    }

    pub fn transmission_closed_form(&self) -> T {
        let (k2, b2) = (self.k * self.k, self.beta * self.beta);
        let ch = (self.beta * self.barrier.width).cosh();
        let s = k2 + b2;
        let d = b2 - k2;
        lit::<T>(4.0) * k2 * b2 / (s * s * ch * ch - d * d)
    }

    /// E − V_tot inside the barrier, written as E·(2β²/D)² with
    /// D = 2β² + 2(k²+β²) sinh²(β(a−x)) so that x = a gives exactly E.
    fn kinetic_region2_unchecked(&self, x: T) -> T {
        let (k2, b2) = (self.k * self.k, self.beta * self.beta);
        let sh = (self.beta * (self.barrier.width - x)).sinh();
        let two = lit::<T>(2.0);
        let d = two * b2 + two * (k2 + b2) * sh * sh;
        let r = two * b2 / d;
        self.params.energy * r * r
    }

    /// Closed form of E − V_tot on [0, a].
    pub fn kinetic_region2(&self, x: T) -> Result<T> {
        if x < T::zero() || x > self.barrier.width {
            return Err(Error::Domain(format!(
                "region II total potential needs 0 <= x <= a, got x = {}",
                to_f64(x)
            )));
        }
        Ok(self.kinetic_region2_unchecked(x))
    }

    /// V_tot = V + V_Q on [0, a] from the closed form.
    pub fn total_potential_region2(&self, x: T) -> Result<T> {
        Ok(self.params.energy - self.kinetic_region2(x)?)
    }

    /// Probability density R² and flux W'R²/M.
    pub fn probability_current(&self, x: T) -> (T, T) {
        let (psi, dpsi) = self.psi(x);
        let flux = self.params.hbar / self.params.mass * (psi.conj() * dpsi).im;
        (psi.norm_sqr(), flux)
    }

    /// Momentum of the effective classical particle, W' = ħ Im(ψ'/ψ).
    pub fn momentum(&self, x: T) -> T {
        match self.region(x) {
            Region::Barrier => (lit::<T>(2.0) * self.params.mass * self.kinetic_region2_unchecked(x)).sqrt(),
            _ => {
                let (psi, dpsi) = self.psi(x);
                self.params.hbar * (psi.conj() * dpsi).im / psi.norm_sqr()
            }
        }
    }

    pub fn velocity(&self, x: T) -> T {
        self.momentum(x) / self.params.mass
    }

    /// V_tot anywhere, from the stationary Hamilton–Jacobi relation
    /// E − V_tot = W'²/2M (closed form inside the barrier).
    pub fn total_potential(&self, x: T) -> T {
        match self.region(x) {
            Region::Barrier => self.params.energy - self.kinetic_region2_unchecked(x),
            _ => {
                let p = self.momentum(x);
                self.params.energy - p * p / (lit::<T>(2.0) * self.params.mass)
            }
        }
    }

    pub fn potential(&self, x: T) -> T {
        self.barrier.potential(x)
    }

    /// Tanh approximation of the tunneling trajectory, ρ = ħk/(aM).
    pub fn tanh_background(&self) -> TanhBackground<T> {
        TanhBackground {
            amplitude: self.barrier.width,
            rho: self.params.hbar * self.k / (self.barrier.width * self.params.mass),
        }
    }
}

/// V_Q = −(ħ²/2M) R''/R from amplitude samples on a uniform grid starting
/// at `x0` with spacing `h`.
pub fn quantum_potential<T: Real>(r: &[T], x0: T, h: T, params: &PhysicalParams<T>) -> Result<Vec<T>> {
    if let Some(i) = r.iter().position(|&v| !(v > T::zero())) {
        return Err(Error::Singularity { x: to_f64(x0 + h * T::from_usize(i).unwrap()) });
    }
    let d2 = second_derivative5(r, h)?;
    let c = -params.hbar * params.hbar / (lit::<T>(2.0) * params.mass);
    Ok(d2.iter().zip(r).map(|(&d, &v)| c * d / v).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile<T> {
    pub xs: Vec<T>,
    pub v: Vec<T>,
    pub v_tot: Vec<T>,
    pub e_minus_vtot: Vec<T>,
}

pub fn potential_profile<T: Real>(sol: &RectSolution<T>, xs: &[T]) -> PotentialProfile<T> {
    let v: Vec<T> = xs.iter().map(|&x| sol.potential(x)).collect();
    let v_tot: Vec<T> = xs.iter().map(|&x| sol.total_potential(x)).collect();
    let e_minus_vtot = v_tot.iter().map(|&vt| sol.params.energy - vt).collect();
    PotentialProfile { xs: xs.to_vec(), v, v_tot, e_minus_vtot }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryMode {
    Exact,
    Tanh,
}

/// Trajectory of the effective classical particle, integrated from
/// x(0) = a/2 along dx/dt = W'(x)/M.
#[derive(Debug, Clone, Copy)]
pub struct ExactTrajectory<T> {
    pub solution: RectSolution<T>,
}

impl<T: Real> ExactTrajectory<T> {
    pub fn start(&self) -> T {
        self.solution.barrier.width * lit(0.5)
    }

    /// Positions at the requested times (any order).
    pub fn positions(&self, ts: &[T]) -> Result<Vec<T>> {
        let opts = OdeOptions::default();
        let rhs = |_t: T, y: &[T; 1]| Ok([self.solution.velocity(y[0])]);
        let mut out = vec![T::zero(); ts.len()];
        let mut fwd: Vec<(usize, T)> = ts.iter().copied().enumerate().filter(|(_, t)| *t >= T::zero()).collect();
        let mut bwd: Vec<(usize, T)> = ts.iter().copied().enumerate().filter(|(_, t)| *t < T::zero()).collect();
        fwd.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        bwd.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        for set in [fwd, bwd] {
            let times: Vec<T> = set.iter().map(|p| p.1).collect();
            let ys = integrate(rhs, T::zero(), [self.start()], &times, &opts)?;
            for ((idx, _), y) in set.iter().zip(ys) {
                out[*idx] = y[0];
            }
        }
        Ok(out)
    }

    /// Time to travel from `from` to `to`, integrating dt/dx = 1/v(x).
    pub fn traverse_time(&self, from: T, to: T) -> Result<T> {
        let rhs = |x: T, _y: &[T; 1]| Ok([T::one() / self.solution.velocity(x)]);
        let opts = OdeOptions { rel_tol: lit(1e-12), abs_tol: lit(1e-14), ..OdeOptions::default() };
        let ys = integrate(rhs, from, [T::zero()], &[to], &opts)?;
        Ok(ys[0][0])
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ClassicalTrajectory<T> {
    Exact(ExactTrajectory<T>),
    Tanh(TanhBackground<T>),
}

impl<T: Real> ClassicalTrajectory<T> {
    pub fn positions(&self, ts: &[T]) -> Result<Vec<T>> {
        match self {
            ClassicalTrajectory::Exact(e) => e.positions(ts),
            ClassicalTrajectory::Tanh(b) => Ok(ts.iter().map(|&t| b.position(t)).collect()),
        }
    }
}

pub fn classical_trajectory<T: Real>(sol: &RectSolution<T>, mode: TrajectoryMode) -> ClassicalTrajectory<T> {
    match mode {
        TrajectoryMode::Exact => ClassicalTrajectory::Exact(ExactTrajectory { solution: *sol }),
        TrajectoryMode::Tanh => ClassicalTrajectory::Tanh(sol.tanh_background()),
    }
}
