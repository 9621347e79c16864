//! Physical parameter records and potential abstractions shared by the
//! solvers.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

fn require_positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {}", to_f64(v))))
    }
}

/// Planck constant, system mass and energy of the stationary state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<T> {
    pub hbar: T,
    pub mass: T,
    pub energy: T,
}

impl<T: Real> PhysicalParams<T> {
    pub fn new(hbar: T, mass: T, energy: T) -> Result<Self> {
        require_positive("hbar", hbar)?;
        require_positive("mass", mass)?;
        require_positive("energy", energy)?;
        Ok(Self { hbar, mass, energy })
    }

    /// ħ = M = 1 units used by all the figures.
    pub fn natural(energy: T) -> Result<Self> {
        Self::new(T::one(), T::one(), energy)
    }

    /// Local wave number √(2M(E−V))/ħ for E > V, or the decay constant
    /// √(2M(V−E))/ħ for V > E.
    pub fn momentum_scale(&self, potential: T) -> T {
        (lit::<T>(2.0) * self.mass * (self.energy - potential).abs()).sqrt() / self.hbar
    }
}

/// Rectangular barrier of height `height` on `0 < x < width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectBarrier<T> {
    pub height: T,
    pub width: T,
}

impl<T: Real> RectBarrier<T> {
    pub fn new(height: T, width: T) -> Result<Self> {
        require_positive("barrier height V0", height)?;
        require_positive("barrier width a", width)?;
        Ok(Self { height, width })
    }

    pub fn potential(&self, x: T) -> T {
        if x > T::zero() && x < self.width {
            self.height
        } else {
            T::zero()
        }
    }
}

/// Wave number outside the barrier and decay constant inside it.
///
/// Requires `0 < E < V0`.
pub fn wave_numbers<T: Real>(params: &PhysicalParams<T>, barrier: &RectBarrier<T>) -> Result<(T, T)> {
    if !(params.energy > T::zero()) {
        return Err(Error::Domain(format!("energy must be positive, got {}", to_f64(params.energy))));
    }
    if params.energy >= barrier.height {
        return Err(Error::AboveBarrier {
            energy: to_f64(params.energy),
            height: to_f64(barrier.height),
        });
    }
    let two_m = lit::<T>(2.0) * params.mass;
    let k = (two_m * params.energy).sqrt() / params.hbar;
    let beta = (two_m * (barrier.height - params.energy)).sqrt() / params.hbar;
    Ok((k, beta))
}

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// A smooth one-dimensional potential with its slope.
///
/// When no analytic derivative is supplied, the slope is a centered finite
/// difference with step `max(1e-6, 1e-6·|x|)`.
#[derive(Clone)]
pub struct SmoothPotential<T> {
    value: ScalarFn<T>,
    derivative: Option<ScalarFn<T>>,
    label: String,
}

impl<T: Real> fmt::Debug for SmoothPotential<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothPotential")
            .field("label", &self.label)
            .field("analytic_derivative", &self.derivative.is_some())
            .finish()
    }
}

impl<T: Real> SmoothPotential<T> {
    pub fn new(value: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self { value: Arc::new(value), derivative: None, label: "custom".into() }
    }

    pub fn with_derivative(
        value: impl Fn(T) -> T + Send + Sync + 'static,
        derivative: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self { value: Arc::new(value), derivative: Some(Arc::new(derivative)), label: "custom".into() }
    }

    /// Polynomial Σ cᵢ xⁱ with ascending coefficients and its exact slope.
    pub fn polynomial(coefficients: &[T]) -> Self {
        let c: Vec<T> = coefficients.to_vec();
        let dc: Vec<T> = c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &ci)| ci * T::from_usize(i).unwrap())
            .collect();
        let horner = |cs: &[T], x: T| cs.iter().rev().fold(T::zero(), |acc, &ci| acc * x + ci);
        let label = format!(
            "poly[{}]",
            c.iter().map(|v| format!("{}", to_f64(*v))).collect::<Vec<_>>().join(",")
        );
        Self {
            value: Arc::new(move |x| horner(&c, x)),
            derivative: Some(Arc::new(move |x| horner(&dc, x))),
            label,
        }
    }

    /// The Fig. 2 barrier `1 − 8x(x−1)`.
    pub fn inverted_parabola() -> Self {
        Self::polynomial(&[T::one(), lit(8.0), lit(-8.0)]).labelled("1-8x(x-1)")
    }

    pub fn labelled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, x: T) -> T {
        (self.value)(x)
    }

    pub fn fd_step(x: T) -> T {
        let h = lit::<T>(1e-6);
        h.max(h * x.abs())
    }

    fn finite_difference(&self, x: T) -> T {
        let h = Self::fd_step(x);
        (self.value(x + h) - self.value(x - h)) / (h + h)
    }

    pub fn derivative(&self, x: T) -> T {
        match &self.derivative {
            Some(d) => d(x),
            None => self.finite_difference(x),
        }
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    /// Relative mismatch between the supplied slope and a centered
    /// difference of the value at `x`.
    pub fn derivative_mismatch(&self, x: T) -> T {
        let fd = self.finite_difference(x);
        let d = self.derivative(x);
        (fd - d).abs() / d.abs().max(T::one())
    }

    /// Checks slope/value consistency at every sample point.
    pub fn check_derivative(&self, xs: &[T], rel_tol: T) -> Result<()> {
        for &x in xs {
            let m = self.derivative_mismatch(x);
            if !(m <= rel_tol) {
                return Err(Error::InvalidParameter(format!(
                    "derivative of {} inconsistent with value at x = {} (mismatch {})",
                    self.label,
                    to_f64(x),
                    to_f64(m)
                )));
            }
        }
        Ok(())
    }
}

/// One environment oscillator `p²/2m + mω0²y²/2 + c·x·y²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvMode<T> {
    pub mass: T,
    pub omega0: T,
    pub coupling: T,
}

impl<T: Real> EnvMode<T> {
    pub fn new(mass: T, omega0: T, coupling: T) -> Result<Self> {
        require_positive("mode mass m", mass)?;
        require_positive("mode frequency omega0", omega0)?;
        if !coupling.is_finite() {
            return Err(Error::InvalidParameter("mode coupling must be finite".into()));
        }
        Ok(Self { mass, omega0, coupling })
    }

    /// ω(x)² = ω0² + 2c·x/m for the system frozen at `x`.
    pub fn omega_sq_at(&self, x: T) -> T {
        self.omega0 * self.omega0 + lit::<T>(2.0) * self.coupling * x / self.mass
    }
}
