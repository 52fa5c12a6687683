//! Physical constants and the single conversion layer between SI inputs,
//! material energies in eV, and the dimensionless variables used inside the
//! engine.
//!
//! With separation `a`, the dimensionless frequency is ζ = 2aξ/c and a
//! material energy `E` (eV) maps to ζ_E = 2aE/(ħc).

use std::f64::consts::PI;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light, m/s.
pub const C_LIGHT: f64 = 299_792_458.0;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Elementary charge, C (also J per eV).
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Fine-structure constant.
pub const ALPHA: f64 = 7.297_352_569_3e-3;

/// ħc in J·m.
pub const HBAR_C: f64 = HBAR * C_LIGHT;
/// ħc in eV·m.
pub const HBAR_C_EV_M: f64 = HBAR_C / E_CHARGE;

/// Default graphene Fermi velocity, m/s.
pub const FERMI_VELOCITY: f64 = 9.0e5;

/// Temperature parameter τ = 4π a k_B T / (ħc).
pub fn tau(separation: f64, temperature: f64) -> f64 {
    4.0 * PI * separation * K_B * temperature / HBAR_C
}

/// Dimensionless form 2aE/(ħc) of an energy given in eV.
pub fn ev_to_dimensionless(energy_ev: f64, separation: f64) -> f64 {
    2.0 * separation * energy_ev / HBAR_C_EV_M
}

/// Inverse of [`ev_to_dimensionless`]: the photon energy ħξ in eV for a
/// dimensionless frequency ζ at separation `a`.
pub fn dimensionless_to_ev(zeta: f64, separation: f64) -> f64 {
    zeta * HBAR_C_EV_M / (2.0 * separation)
}

/// Ideal-metal Casimir pressure at zero temperature, −π²ħc/(240 a⁴), in Pa.
pub fn ideal_metal_pressure_t0(separation: f64) -> f64 {
    -PI * PI * HBAR_C / (240.0 * separation.powi(4))
}
