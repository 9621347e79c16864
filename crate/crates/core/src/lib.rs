//! Real-time description of quantum tunneling through the quantum
//! (Bohm) potential, with the back reaction of environment particle
//! creation on the tunneling rate.
//!
//! Modules:
//! - [`model`]: physical parameters, barriers, potentials, environment modes
//! - [`specfun`]: log-Gamma, Gauss ₂F₁, Airy functions
//! - [`rect`]: exact rectangular-barrier solution, total potential, rolling time
//! - [`wkb`]: WKB profiles with Airy patches for smooth barriers
//! - [`env`]: Gaussian environment modes on the tanh background
//! - [`backreaction`]: Q factors, effective potential, modified probability
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

pub mod backreaction;
pub mod env;
pub mod error;
pub mod model;
pub mod ode;
pub mod quad;
pub mod rect;
pub mod scalar;
pub mod specfun;
pub mod wkb;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::Complex;

pub type Complex64 = Complex<f64>;
pub type PhysicalParams64 = model::PhysicalParams<f64>;
pub type RectBarrier64 = model::RectBarrier<f64>;
pub type SmoothPotential64 = model::SmoothPotential<f64>;
pub type EnvMode64 = model::EnvMode<f64>;
pub type RectSolution64 = rect::RectSolution<f64>;
pub type TanhBackground64 = env::TanhBackground<f64>;
pub type GaussianModeState64 = env::GaussianModeState<f64>;
pub type ModeFunction64 = env::ModeFunction<f64>;
pub type WkbProfile64 = wkb::WkbProfile<f64>;
pub type TurningPoints64 = wkb::TurningPoints<f64>;
pub type BackreactionProfile64 = backreaction::BackreactionProfile<f64>;
