//! Physical constants and unit helpers.

use std::f64::consts::PI;

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Standard gravity, m/s².
pub const STANDARD_GRAVITY: f64 = 9.806_65;

pub const TWO_PI: f64 = 2.0 * PI;

/// Ordinary frequency in MHz to angular frequency in rad/s.
#[inline]
pub fn mhz_to_angular(f_mhz: f64) -> f64 {
    TWO_PI * f_mhz * 1e6
}

/// Angular frequency in rad/s to ordinary frequency in MHz.
#[inline]
pub fn angular_to_mhz(w: f64) -> f64 {
    w / (TWO_PI * 1e6)
}

/// Two-level saturation intensity `π h c Γ / (3 λ³)` in W/m² for a transition
/// of wavelength `lambda` (m) and energy decay rate `gamma` (rad/s).
pub fn saturation_intensity(lambda: f64, gamma: f64) -> f64 {
    PI * PLANCK * SPEED_OF_LIGHT * gamma / (3.0 * lambda.powi(3))
}

/// Squared resonant Rabi frequency `Γ² I / (2 I_sat)` (rad²/s²) of a closed
/// two-level transition driven at intensity `intensity`.
pub fn rabi_squared(intensity: f64, lambda: f64, gamma: f64) -> f64 {
    gamma * gamma * intensity / (2.0 * saturation_intensity(lambda, gamma))
}
