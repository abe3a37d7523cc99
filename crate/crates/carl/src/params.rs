//! Physical inputs (atom species, cavity geometry, pump) and every derived
//! single-atom / single-photon rate the dynamics and gain modules consume.
//!
//! All quantities are SI; angular frequencies are rad/s, plain frequencies Hz.

use serde::{Deserialize, Serialize};

use crate::constants::{C, HBAR, H_PLANCK};
use crate::error::{CarlError, Result};
use crate::pump::PumpProfile;

/// Atomic species data, loaded from a JSON fixture file.
///
/// Fixture schema: `{label, mass_kg, gamma_rad_per_s, lines_m: [..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpecies {
    pub label: String,
    /// Atomic mass (kg).
    pub mass_kg: f64,
    /// Natural linewidth of the reference transition (rad/s).
    pub gamma_rad_per_s: f64,
    /// Transition wavelengths (m), at least one.
    pub lines_m: Vec<f64>,
}

impl AtomSpecies {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass_kg > 0.0) {
            return Err(CarlError::invalid("species.mass_kg", "must be > 0"));
        }
        if !(self.gamma_rad_per_s > 0.0) {
            return Err(CarlError::invalid("species.gamma_rad_per_s", "must be > 0"));
        }
        if self.lines_m.is_empty() {
            return Err(CarlError::invalid(
                "species.lines_m",
                "at least one reference line required",
            ));
        }
        if self.lines_m.iter().any(|&l| !(l > 0.0)) {
            return Err(CarlError::invalid("species.lines_m", "wavelengths must be > 0"));
        }
        Ok(())
    }

    pub fn from_json(text: &str, path: &str) -> Result<Self> {
        let species: AtomSpecies = serde_json::from_str(text).map_err(|source| CarlError::Parse {
            path: path.to_string(),
            source,
        })?;
        species.validate()?;
        Ok(species)
    }
}

/// Ring cavity geometry. Finesse is per polarization setting.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityGeometry {
    /// Round-trip length (m).
    pub length_m: f64,
    /// Mode waist (m). Not quoted in typical cavity data sheets for this
    /// geometry; a required input here.
    pub waist_m: f64,
    /// Finesse (dimensionless), > 1.
    pub finesse: f64,
}

impl CavityGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.length_m > 0.0) {
            return Err(CarlError::invalid("cavity.length_m", "must be > 0"));
        }
        if !(self.waist_m > 0.0) {
            return Err(CarlError::invalid("cavity.waist_m", "must be > 0"));
        }
        if !(self.finesse > 1.0) {
            return Err(CarlError::invalid("cavity.finesse", "must be > 1"));
        }
        Ok(())
    }
}

/// Pump laser configuration. `power_w` is the circulating intracavity power;
/// conversion to detected power is an external scale factor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    /// Pump wavelength (m).
    pub wavelength_m: f64,
    /// Peak circulating intracavity power (W).
    pub power_w: f64,
    pub profile: PumpProfile,
}

impl PumpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength_m > 0.0) {
            return Err(CarlError::invalid("pump.wavelength_m", "must be > 0"));
        }
        if !(self.power_w >= 0.0) {
            return Err(CarlError::invalid("pump.power_w", "must be >= 0"));
        }
        self.profile.validate()
    }
}

/// All derived single-atom / single-photon quantities. Pure functions of the
/// inputs: rebuilding from the same inputs is bit-identical.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Free spectral range c/L (Hz).
    pub delta_fsr: f64,
    /// Cavity field decay rate π δ_fsr / F (rad/s).
    pub kappa_c: f64,
    /// Pump wavenumber 2π/λ (1/m).
    pub k: f64,
    /// Recoil frequency 2ħk²/m (rad/s).
    pub omega_r: f64,
    /// Pump detuning from the nearest reference line (rad/s, signed).
    pub delta: f64,
    /// Single-photon Rabi frequency √(3Γc/(k²w₀²L)) (rad/s).
    pub omega_1: f64,
    /// Single-photon light shift Ω₁²/Δ (rad/s, sign follows Δ).
    pub u_0: f64,
    /// Peak intracavity pump photon number.
    pub n_plus: f64,
    /// Photon energy ħω = hc/λ (J).
    pub photon_energy: f64,
    /// Rayleigh scattering loss rate ΓU₀/Δ = ΓΩ₁²/Δ² (rad/s).
    pub gamma_0: f64,
}

/// Full parameter set for one atom–cavity configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CavityAtomParams {
    pub species: AtomSpecies,
    pub cavity: CavityGeometry,
    pub pump: PumpConfig,
    pub derived: DerivedParams,
}

impl CavityAtomParams {
    /// Validate inputs and compute every derived quantity.
    pub fn derive(species: AtomSpecies, cavity: CavityGeometry, pump: PumpConfig) -> Result<Self> {
        species.validate()?;
        cavity.validate()?;
        pump.validate()?;

        let delta_fsr = free_spectral_range(cavity.length_m)?;
        let kappa_c = cavity_decay_rate(delta_fsr, cavity.finesse)?;
        let k = wavenumber(pump.wavelength_m);
        let omega_r = recoil_frequency(pump.wavelength_m, species.mass_kg)?;
        let delta = detuning(pump.wavelength_m, &species)?;
        let omega_1 = single_photon_rabi(
            species.gamma_rad_per_s,
            k,
            cavity.waist_m,
            cavity.length_m,
        )?;
        let u_0 = light_shift(omega_1, delta)?;
        let photon_energy = photon_energy(pump.wavelength_m);
        let n_plus = photon_number(pump.power_w, pump.wavelength_m, delta_fsr)?;
        let gamma_0 = rayleigh_loss_rate(species.gamma_rad_per_s, u_0, delta)?;

        Ok(CavityAtomParams {
            species,
            cavity,
            pump,
            derived: DerivedParams {
                delta_fsr,
                kappa_c,
                k,
                omega_r,
                delta,
                omega_1,
                u_0,
                n_plus,
                photon_energy,
                gamma_0,
            },
        })
    }
}

/// Free spectral range δ_fsr = c/L (Hz).
pub fn free_spectral_range(length_m: f64) -> Result<f64> {
    if !(length_m > 0.0) {
        return Err(CarlError::invalid("length_m", "must be > 0"));
    }
    Ok(C / length_m)
}

/// Cavity field decay rate κ_c = π δ_fsr / F (rad/s).
pub fn cavity_decay_rate(delta_fsr: f64, finesse: f64) -> Result<f64> {
    if !(delta_fsr > 0.0) {
        return Err(CarlError::invalid("delta_fsr", "must be > 0"));
    }
    if !(finesse > 0.0) {
        return Err(CarlError::invalid("finesse", "must be > 0"));
    }
    Ok(std::f64::consts::PI * delta_fsr / finesse)
}

/// Pump wavenumber k = 2π/λ (1/m).
pub fn wavenumber(wavelength_m: f64) -> f64 {
    2.0 * std::f64::consts::PI / wavelength_m
}

/// Recoil frequency ω_r = 2ħk²/m (rad/s).
pub fn recoil_frequency(wavelength_m: f64, mass_kg: f64) -> Result<f64> {
    if !(wavelength_m > 0.0) {
        return Err(CarlError::invalid("wavelength_m", "must be > 0"));
    }
    if !(mass_kg > 0.0) {
        return Err(CarlError::invalid("mass_kg", "must be > 0"));
    }
    let k = wavenumber(wavelength_m);
    Ok(2.0 * HBAR * k * k / mass_kg)
}

/// Signed angular detuning Δ = ω_pump − ω_atom against the nearest reference
/// line. Negative for red detuning. Errors if the pump sits exactly on a line.
pub fn detuning(wavelength_m: f64, species: &AtomSpecies) -> Result<f64> {
    if !(wavelength_m > 0.0) {
        return Err(CarlError::invalid("wavelength_m", "must be > 0"));
    }
    species.validate()?;
    let nearest = species
        .lines_m
        .iter()
        .copied()
        .min_by(|a, b| {
            (a - wavelength_m)
                .abs()
                .partial_cmp(&(b - wavelength_m).abs())
                .expect("finite wavelengths")
        })
        .expect("at least one line");
    if nearest == wavelength_m {
        return Err(CarlError::ZeroDetuning);
    }
    // ω_pump − ω_atom = 2πc (λ₀ − λ) / (λ λ₀)
    Ok(2.0 * std::f64::consts::PI * C * (nearest - wavelength_m) / (wavelength_m * nearest))
}

/// Single-photon Rabi frequency Ω₁ = √(3Γc/(k²w₀²L)) (rad/s).
pub fn single_photon_rabi(gamma: f64, k: f64, waist_m: f64, length_m: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(CarlError::invalid("gamma", "must be >= 0"));
    }
    if !(k > 0.0) || !(waist_m > 0.0) || !(length_m > 0.0) {
        return Err(CarlError::invalid("geometry", "k, waist, length must be > 0"));
    }
    Ok((3.0 * gamma * C / (k * k * waist_m * waist_m * length_m)).sqrt())
}

/// Single-photon light shift U₀ = Ω₁²/Δ (rad/s); also the pump–probe photon
/// exchange rate per atom. Sign follows Δ.
pub fn light_shift(omega_1: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(CarlError::ZeroDetuning);
    }
    Ok(omega_1 * omega_1 / delta)
}

/// Photon energy ħω = hc/λ (J).
pub fn photon_energy(wavelength_m: f64) -> f64 {
    H_PLANCK * C / wavelength_m
}

/// Circulating intracavity photon number n = P/(ħω δ_fsr).
pub fn photon_number(power_w: f64, wavelength_m: f64, delta_fsr: f64) -> Result<f64> {
    if !(power_w >= 0.0) {
        return Err(CarlError::invalid("power_w", "must be >= 0"));
    }
    if !(wavelength_m > 0.0) || !(delta_fsr > 0.0) {
        return Err(CarlError::invalid("photon_number", "wavelength and δ_fsr must be > 0"));
    }
    Ok(power_w / (photon_energy(wavelength_m) * delta_fsr))
}

/// Exact inverse of [`photon_number`]: P = n ħω δ_fsr (W).
pub fn power_from_photons(n: f64, wavelength_m: f64, delta_fsr: f64) -> Result<f64> {
    if !(n >= 0.0) {
        return Err(CarlError::invalid("n", "must be >= 0"));
    }
    if !(wavelength_m > 0.0) || !(delta_fsr > 0.0) {
        return Err(CarlError::invalid("power_from_photons", "wavelength and δ_fsr must be > 0"));
    }
    Ok(n * photon_energy(wavelength_m) * delta_fsr)
}

/// Resonant build-up of the pumped mode: α₊ = α_in √(δ_fsr/κ_c), real and
/// non-negative by phase convention.
pub fn pump_amplitude(alpha_in: f64, delta_fsr: f64, kappa_c: f64) -> Result<f64> {
    if !(kappa_c > 0.0) {
        return Err(CarlError::invalid("kappa_c", "must be > 0"));
    }
    if !(delta_fsr > 0.0) {
        return Err(CarlError::invalid("delta_fsr", "must be > 0"));
    }
    Ok(alpha_in.abs() * (delta_fsr / kappa_c).sqrt())
}

/// Rayleigh scattering loss rate γ₀ = ΓU₀/Δ = ΓΩ₁²/Δ² (rad/s), even in Δ.
pub fn rayleigh_loss_rate(gamma: f64, u_0: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(CarlError::ZeroDetuning);
    }
    Ok(gamma * u_0 / delta)
}
