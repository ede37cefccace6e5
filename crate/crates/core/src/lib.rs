//! Periodic traveling waves of quasilinear Schrödinger equations in real form
//! (`U ∈ ℝ²`, `J = [[0,1],[-1,0]]`, dispersion κ(‖U‖²), potential W(‖U‖²)):
//! wave profiles, the action integral, Evans functions of the linearized
//! operator, Whitham modulation data and the associated stability criteria.

pub mod action;
pub mod asymptotics;
pub mod error;
pub mod exec;
pub mod jet;
pub mod madelung;
pub mod model;
pub mod modulation;
pub mod ode;
pub mod poly;
pub mod profile;
pub mod quad;
pub mod spectral;

pub use error::{Error, Result};
pub use nalgebra;
pub use num_complex;
pub use model::{make_model, Coefficient, ModelSpec};
pub use profile::{WaveParams, WaveProfile};

/// Rotation `e^{θJ}` applied to `e₁`: `(cos θ, −sin θ)`.
pub fn rot_e1(theta: f64) -> [f64; 2] {
    [theta.cos(), -theta.sin()]
}
