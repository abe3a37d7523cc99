//! Physical constants in SI units (CODATA 2018 / exact 2019 SI values).

/// Speed of light in vacuum (m/s), exact.
pub const C: f64 = 299_792_458.0;

/// Reduced Planck constant (J·s), exact.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Planck constant (J·s), exact.
pub const H_PLANCK: f64 = 6.626_070_15e-34;

/// Boltzmann constant (J/K), exact.
pub const KB: f64 = 1.380_649e-23;
