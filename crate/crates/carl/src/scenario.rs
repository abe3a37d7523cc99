//! Scenario file schema (JSON, SI units throughout) and conversion to the
//! runtime [`Scenario`]. Unknown keys are rejected.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{BackscatterModel, IntegratorMethod, Scenario};
use crate::error::{CarlError, Result};
use crate::params::{AtomSpecies, CavityAtomParams, CavityGeometry, PumpConfig};

/// Species given inline or as a path to a fixture file (resolved relative to
/// the scenario file).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpeciesRef {
    Path(String),
    Inline(AtomSpecies),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomsSection {
    pub n_real: f64,
    pub n_sim: usize,
    pub temperature_k: f64,
    pub seed: u64,
    #[serde(default)]
    pub jitter_eps: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackscatterSection {
    /// Mirror backscattering rate in units of κ_c.
    pub us_over_kappa: f64,
    /// Scatterer phase 2k·z_s (rad).
    #[serde(default)]
    pub phase_rad: f64,
}

impl Default for BackscatterSection {
    fn default() -> Self {
        BackscatterSection {
            us_over_kappa: 0.0,
            phase_rad: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    #[serde(default)]
    pub radiation_pressure: bool,
    #[serde(default)]
    pub delta_c_rad_s: f64,
}

impl Default for PhysicsSection {
    fn default() -> Self {
        PhysicsSection {
            radiation_pressure: false,
            delta_c_rad_s: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub method: IntegratorMethod,
    pub dt_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub duration_s: f64,
    #[serde(default = "default_decimation")]
    pub decimation: usize,
}

fn default_decimation() -> usize {
    1
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(default)]
    pub alpha_minus_re: f64,
    #[serde(default)]
    pub alpha_minus_im: f64,
}

/// On-disk scenario document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub species: SpeciesRef,
    pub cavity: CavityGeometry,
    pub pump: PumpConfig,
    pub atoms: AtomsSection,
    #[serde(default)]
    pub backscatter: BackscatterSection,
    #[serde(default)]
    pub physics: PhysicsSection,
    pub integrator: IntegratorSection,
    pub run: RunSection,
    #[serde(default)]
    pub initial: InitialSection,
}

impl ScenarioFile {
    pub fn from_json(text: &str, path: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| CarlError::Parse {
            path: path.to_string(),
            source,
        })
    }

    /// Resolve the species reference, validate everything and derive the
    /// runtime scenario.
    pub fn build(&self, base_dir: Option<&Path>) -> Result<Scenario> {
        let species = match &self.species {
            SpeciesRef::Inline(sp) => sp.clone(),
            SpeciesRef::Path(rel) => {
                let p = match base_dir {
                    Some(dir) => dir.join(rel),
                    None => Path::new(rel).to_path_buf(),
                };
                let text = std::fs::read_to_string(&p)
                    .map_err(|e| CarlError::io(p.display().to_string(), e))?;
                AtomSpecies::from_json(&text, &p.display().to_string())?
            }
        };

        let params = CavityAtomParams::derive(species, self.cavity, self.pump.clone())?;
        let kappa_c = params.derived.kappa_c;

        if !(self.backscatter.us_over_kappa >= 0.0) {
            return Err(CarlError::Validation(
                "backscatter.us_over_kappa must be >= 0".into(),
            ));
        }

        let scen = Scenario {
            params,
            n_real: self.atoms.n_real,
            n_sim: self.atoms.n_sim,
            temperature_k: self.atoms.temperature_k,
            seed: self.atoms.seed,
            jitter_eps: self.atoms.jitter_eps,
            backscatter: BackscatterModel {
                u_s: self.backscatter.us_over_kappa * kappa_c,
                phase: self.backscatter.phase_rad,
            },
            radiation_pressure: self.physics.radiation_pressure,
            delta_c: self.physics.delta_c_rad_s,
            method: self.integrator.method,
            dt_s: self.integrator.dt_s,
            duration_s: self.run.duration_s,
            initial_alpha: Complex64::new(self.initial.alpha_minus_re, self.initial.alpha_minus_im),
            decimation: self.run.decimation,
        };
        scen.validate()?;
        Ok(scen)
    }
}

/// Load and fully validate a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let (file, dir) = load_scenario_file(path)?;
    file.build(dir.as_deref())
}

/// Load the raw document (for sweeps that patch parameters before building).
pub fn load_scenario_file(path: &Path) -> Result<(ScenarioFile, Option<std::path::PathBuf>)> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CarlError::io(path.display().to_string(), e))?;
    let file = ScenarioFile::from_json(&text, &path.display().to_string())?;
    let dir = path.parent().map(|p| p.to_path_buf());
    Ok((file, dir))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3_json() -> String {
        r#"{
            "species": {
                "label": "Rb87",
                "mass_kg": 1.44316e-25,
                "gamma_rad_per_s": 3.61e7,
                "lines_m": [794.979e-9, 780.241e-9]
            },
            "cavity": {"length_m": 0.085, "waist_m": 176e-6, "finesse": 87000},
            "pump": {
                "wavelength_m": 797.3e-9,
                "power_w": 4.0,
                "profile": {"kind": "servo_ramp", "tau_s": 20e-6}
            },
            "atoms": {"n_real": 1.5e6, "n_sim": 100, "temperature_k": 0.0, "seed": 1},
            "backscatter": {"us_over_kappa": 0.04, "phase_rad": 0.0},
            "integrator": {"method": "euler", "dt_s": 2e-9},
            "run": {"duration_s": 120e-6, "decimation": 50}
        }"#
        .to_string()
    }

    #[test]
    fn fig3_parameters_load() {
        let file = ScenarioFile::from_json(&fig3_json(), "fig3").unwrap();
        let scen = file.build(None).unwrap();
        assert_eq!(scen.n_real, 1.5e6);
        assert_eq!(scen.n_sim, 100);
        assert!(scen.params.derived.delta < 0.0);
        assert!(scen.backscatter.u_s > 0.0);
        assert_eq!(scen.decimation, 50);
        assert_eq!(scen.initial_alpha, Complex64::ZERO);
    }

    #[test]
    fn missing_field_names_key() {
        let bad = fig3_json().replace("\"n_real\": 1.5e6, ", "");
        let err = ScenarioFile::from_json(&bad, "fig3").unwrap_err();
        assert!(err.to_string().contains("n_real"), "got: {err}");
    }

    #[test]
    fn zero_dt_rejected() {
        let bad = fig3_json().replace("\"dt_s\": 2e-9", "\"dt_s\": 0.0");
        let file = ScenarioFile::from_json(&bad, "fig3").unwrap();
        let err = file.build(None).unwrap_err();
        assert!(err.to_string().contains("dt_s"), "got: {err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = fig3_json().replace("\"run\":", "\"bogus\": 1, \"run\":");
        assert!(ScenarioFile::from_json(&bad, "fig3").is_err());
    }

    #[test]
    fn species_path_resolves_relative() {
        let dir = tempfile::tempdir().unwrap();
        let sp_path = dir.path().join("rb87.json");
        std::fs::write(
            &sp_path,
            r#"{"label":"Rb87","mass_kg":1.44316e-25,"gamma_rad_per_s":3.61e7,"lines_m":[794.979e-9]}"#,
        )
        .unwrap();
        let scen_json = fig3_json().replace(
            r#""species": {
                "label": "Rb87",
                "mass_kg": 1.44316e-25,
                "gamma_rad_per_s": 3.61e7,
                "lines_m": [794.979e-9, 780.241e-9]
            }"#,
            "\"species\": \"rb87.json\"",
        );
        let scen_path = dir.path().join("scen.json");
        std::fs::write(&scen_path, scen_json).unwrap();
        let scen = load_scenario(&scen_path).unwrap();
        assert_eq!(scen.params.species.label, "Rb87");
    }
}
