//! Pump switch-on models.
//!
//! The pump mode builds up with a finite rise time set by the bandwidth of the
//! locking servo (about 20 μs); a measured rise can be replayed through the
//! `Sampled` variant.

use serde::{Deserialize, Serialize};

use crate::error::{CarlError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PumpProfile {
    /// Full power for all t ≥ 0.
    Step,
    /// Amplitude rise 1 − e^(−t/τ), i.e. power (1 − e^(−t/τ))².
    ServoRamp { tau_s: f64 },
    /// Linear interpolation of (time s, power W) samples, clamped at the ends.
    /// Powers are absolute; the scenario's `power_w` is ignored here.
    Sampled { samples: Vec<(f64, f64)> },
}

impl PumpProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            PumpProfile::Step => Ok(()),
            PumpProfile::ServoRamp { tau_s } => {
                if !(*tau_s > 0.0) {
                    return Err(CarlError::invalid("pump.profile.tau_s", "must be > 0"));
                }
                Ok(())
            }
            PumpProfile::Sampled { samples } => {
                if samples.is_empty() {
                    return Err(CarlError::invalid(
                        "pump.profile.samples",
                        "sampled profile requires at least one (t, power) pair",
                    ));
                }
                for w in samples.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return Err(CarlError::invalid(
                            "pump.profile.samples",
                            "sample times must be strictly increasing",
                        ));
                    }
                }
                if samples.iter().any(|&(_, p)| !(p >= 0.0)) {
                    return Err(CarlError::invalid(
                        "pump.profile.samples",
                        "powers must be >= 0",
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Instantaneous pump power (W) at time t ≥ 0 for a profile with the given
/// peak power. Sampled profiles carry absolute powers and ignore `peak_w`.
pub fn pump_power_at(profile: &PumpProfile, peak_w: f64, t: f64) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    match profile {
        PumpProfile::Step => peak_w,
        PumpProfile::ServoRamp { tau_s } => {
            let rise = 1.0 - (-t / tau_s).exp();
            peak_w * rise * rise
        }
        PumpProfile::Sampled { samples } => {
            debug_assert!(!samples.is_empty(), "validated at load time");
            if samples.is_empty() {
                return 0.0;
            }
            if t <= samples[0].0 {
                return samples[0].1;
            }
            if t >= samples[samples.len() - 1].0 {
                return samples[samples.len() - 1].1;
            }
            let idx = samples.partition_point(|&(ts, _)| ts <= t);
            let (t0, p0) = samples[idx - 1];
            let (t1, p1) = samples[idx];
            p0 + (p1 - p0) * (t - t0) / (t1 - t0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn step_is_immediate() {
        assert_eq!(pump_power_at(&PumpProfile::Step, 4.0, 0.0), 4.0);
        assert_eq!(pump_power_at(&PumpProfile::Step, 4.0, 1e-3), 4.0);
    }

    #[test]
    fn servo_ramp_at_tau() {
        let p = pump_power_at(&PumpProfile::ServoRamp { tau_s: 20e-6 }, 1.0, 20e-6);
        let expect = (1.0 - (-1.0f64).exp()).powi(2);
        assert_relative_eq!(p, expect, max_relative = 1e-12);
        assert_relative_eq!(p, 0.400, max_relative = 2e-3);
        // monotone non-decreasing during switch-on
        let prof = PumpProfile::ServoRamp { tau_s: 20e-6 };
        let mut last = 0.0;
        for i in 0..200 {
            let v = pump_power_at(&prof, 1.0, i as f64 * 1e-6);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn sampled_interpolates_and_clamps() {
        let prof = PumpProfile::Sampled {
            samples: vec![(0.0, 0.0), (1e-5, 1.0)],
        };
        assert_relative_eq!(pump_power_at(&prof, 99.0, 5e-6), 0.5, max_relative = 1e-12);
        assert_eq!(pump_power_at(&prof, 99.0, 2e-5), 1.0);
        assert_eq!(pump_power_at(&prof, 99.0, 0.0), 0.0);
    }

    #[test]
    fn sampled_empty_table_rejected() {
        let prof = PumpProfile::Sampled { samples: vec![] };
        assert!(prof.validate().is_err());
        let bad = PumpProfile::Sampled {
            samples: vec![(0.0, 0.0), (0.0, 1.0)],
        };
        assert!(bad.validate().is_err());
    }
}
