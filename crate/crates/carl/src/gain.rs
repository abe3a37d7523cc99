//! Small-signal gain, CARL parameter, gain bandwidth, and operating-regime
//! classification.
//!
//! The cavity gain and the superradiant gain are each computed along two
//! algebraically distinct routes that must agree to machine precision; tests
//! and the acceptance suite hold both routes to 1e-12 relative.

use serde::{Deserialize, Serialize};

use crate::constants::C;
use crate::error::{CarlError, Result};

/// Elongated-cloud geometry for the superradiant (mirrorless) gain.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CondensateGeometry {
    /// Length along the long axis (m).
    pub length_m: f64,
    /// Radial waist of the cloud (m).
    pub waist_m: f64,
    /// Atom number.
    pub atom_number: f64,
}

impl CondensateGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.length_m > 0.0) || !(self.waist_m > 0.0) || !(self.atom_number > 0.0) {
            return Err(CarlError::invalid(
                "condensate",
                "length, waist and atom number must be > 0",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CavityRegime {
    GoodCavity,
    BadCavity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantumness {
    Semiclassical,
    Quantum,
}

/// Gain and regime summary for one configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GainReport {
    /// Cavity small-signal gain (rad/s).
    #[serde(rename = "G_c")]
    pub g_c: f64,
    /// Superradiant gain (rad/s), present when condensate geometry was given.
    #[serde(rename = "G_sr")]
    pub g_sr: Option<f64>,
    /// CARL parameter ρ.
    pub rho: f64,
    /// Scaled decay rate κ̄ = κ/(ω_r ρ).
    pub kappa_bar: f64,
    /// Gain bandwidth Δω_G (rad/s); order-of-magnitude estimator with unit
    /// proportionality constants, discontinuous at κ̄ = 1.
    pub gain_bandwidth: f64,
    pub regime: (CavityRegime, Quantumness),
    pub flags: Vec<String>,
}

/// CARL small-signal gain G_c = 2g²N/κ_c with g = Ω₊Ω₋/(2Δ), Ω₊ = Ω₁√n₊,
/// Ω₋ = Ω₁.
pub fn carl_gain(n_atoms: f64, n_plus: f64, omega_1: f64, delta: f64, kappa_c: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(CarlError::ZeroDetuning);
    }
    if !(kappa_c > 0.0) {
        return Err(CarlError::invalid("kappa_c", "must be > 0"));
    }
    if !(n_atoms >= 0.0) || !(n_plus >= 0.0) {
        return Err(CarlError::invalid("carl_gain", "atom and photon numbers must be >= 0"));
    }
    let omega_plus = omega_1 * n_plus.sqrt();
    let g = omega_plus * omega_1 / (2.0 * delta);
    Ok(2.0 * g * g * n_atoms / kappa_c)
}

/// The same gain grouped as (Ω₊²/2Δ)·(N/κ_c)·(Ω₋²/Δ); second route for the
/// identity check.
pub fn carl_gain_product_form(
    n_atoms: f64,
    n_plus: f64,
    omega_1: f64,
    delta: f64,
    kappa_c: f64,
) -> Result<f64> {
    if delta == 0.0 {
        return Err(CarlError::ZeroDetuning);
    }
    if !(kappa_c > 0.0) {
        return Err(CarlError::invalid("kappa_c", "must be > 0"));
    }
    let omega_plus_sq = omega_1 * omega_1 * n_plus;
    Ok((omega_plus_sq / (2.0 * delta)) * (n_atoms / kappa_c) * (omega_1 * omega_1 / delta))
}

/// Single-atom Rayleigh scattering rate R = ΓΩ₊²/(4Δ² + 2Ω₊² + Γ²).
pub fn rayleigh_rate(gamma: f64, delta: f64, omega_plus: f64) -> f64 {
    let denom = 4.0 * delta * delta + 2.0 * omega_plus * omega_plus + gamma * gamma;
    if denom == 0.0 {
        return 0.0;
    }
    gamma * omega_plus * omega_plus / denom
}

/// Superradiant gain with both evaluation routes and a far-detuning check.
#[derive(Debug, Clone, Copy)]
pub struct SuperradiantGain {
    /// Far-off-resonance form (Ω₊²/Δ²)·N₀·3Γ/(2k²w²).
    pub value: f64,
    /// Effective-cavity form with κ_sr = c/L: the cloud treated as a cavity of
    /// free spectral range c/L and finesse π.
    pub effective_cavity_value: f64,
    /// False when |Δ| is not large against Γ and Ω₊; the closed form is then
    /// only an estimate.
    pub far_detuned: bool,
}

/// Superradiant gain of an elongated cloud. Violating the far-detuning
/// precondition sets a flag on the result instead of failing.
pub fn superradiant_gain(
    geom: &CondensateGeometry,
    omega_plus: f64,
    delta: f64,
    gamma: f64,
    k: f64,
) -> Result<SuperradiantGain> {
    geom.validate()?;
    if delta == 0.0 {
        return Err(CarlError::ZeroDetuning);
    }
    if !(k > 0.0) {
        return Err(CarlError::invalid("k", "must be > 0"));
    }
    let w2 = geom.waist_m * geom.waist_m;
    let value =
        (omega_plus * omega_plus / (delta * delta)) * geom.atom_number * 3.0 * gamma / (2.0 * k * k * w2);

    // Effective cavity: κ_sr = π δ_fsr / F_sr with δ_fsr = c/L and F_sr = π,
    // single-photon coupling Ω₁² = 3Γc/(k²w²L).
    let kappa_sr = C / geom.length_m;
    let delta_fsr = C / geom.length_m;
    let effective_cavity_value = (omega_plus * omega_plus / (2.0 * delta * delta))
        * (geom.atom_number / kappa_sr)
        * (3.0 * gamma * delta_fsr / (k * k * w2));

    let far_detuned = 4.0 * delta * delta > 100.0 * (2.0 * omega_plus * omega_plus + gamma * gamma);
    Ok(SuperradiantGain {
        value,
        effective_cavity_value,
        far_detuned,
    })
}

/// CARL parameter ρ = (G κ / ω_r²)^(1/3).
pub fn carl_parameter(gain: f64, kappa_decay: f64, omega_r: f64) -> Result<f64> {
    if !(gain > 0.0) || !(kappa_decay > 0.0) || !(omega_r > 0.0) {
        return Err(CarlError::invalid(
            "carl_parameter",
            "gain, decay rate and recoil frequency must be > 0",
        ));
    }
    Ok((gain * kappa_decay / (omega_r * omega_r)).cbrt())
}

/// Scaled decay rate κ̄ = κ/(ω_r ρ).
pub fn scaled_decay(kappa_decay: f64, omega_r: f64, rho: f64) -> Result<f64> {
    if !(kappa_decay > 0.0) || !(omega_r > 0.0) || !(rho > 0.0) {
        return Err(CarlError::invalid(
            "scaled_decay",
            "all arguments must be > 0",
        ));
    }
    Ok(kappa_decay / (omega_r * rho))
}

/// Gain bandwidth: ω_r ρ in the good-cavity regime (κ̄ < 1), the decay rate κ
/// otherwise. Proportionality constants are taken as exactly 1; no continuity
/// is claimed at κ̄ = 1.
pub fn gain_bandwidth(rho: f64, omega_r: f64, kappa_decay: f64) -> Result<f64> {
    let kappa_bar = scaled_decay(kappa_decay, omega_r, rho)?;
    Ok(if kappa_bar < 1.0 {
        omega_r * rho
    } else {
        kappa_decay
    })
}

/// Regime classification. κ̄ = 1 exactly lands in BadCavity with a boundary
/// flag pushed to `flags`.
pub fn classify_regime(
    kappa_bar: f64,
    omega_r: f64,
    bandwidth: f64,
    flags: &mut Vec<String>,
) -> (CavityRegime, Quantumness) {
    let cavity = if kappa_bar < 1.0 {
        CavityRegime::GoodCavity
    } else {
        if kappa_bar == 1.0 {
            flags.push("kappa_bar_boundary".to_string());
        }
        CavityRegime::BadCavity
    };
    let quantum = if bandwidth < omega_r {
        Quantumness::Quantum
    } else {
        Quantumness::Semiclassical
    };
    (cavity, quantum)
}

/// Assemble a full report for a cavity configuration, optionally with a
/// condensate geometry for the superradiant gain. ρ is fed by the cavity gain
/// when a cavity is present (always, here); mixed setups must build their own
/// report from the parts.
pub fn gain_report(
    n_atoms: f64,
    n_plus: f64,
    omega_1: f64,
    delta: f64,
    kappa_c: f64,
    omega_r: f64,
    gamma: f64,
    k: f64,
    condensate: Option<&CondensateGeometry>,
) -> Result<GainReport> {
    let g_c = carl_gain(n_atoms, n_plus, omega_1, delta, kappa_c)?;
    let mut flags = Vec::new();

    let g_sr = match condensate {
        Some(geom) => {
            let omega_plus = omega_1 * n_plus.sqrt();
            let sr = superradiant_gain(geom, omega_plus, delta, gamma, k)?;
            if !sr.far_detuned {
                flags.push("far_detuning_violated".to_string());
            }
            Some(sr.value)
        }
        None => None,
    };

    let rho = carl_parameter(g_c, kappa_c, omega_r)?;
    let kappa_bar = scaled_decay(kappa_c, omega_r, rho)?;
    let bandwidth = gain_bandwidth(rho, omega_r, kappa_c)?;
    let regime = classify_regime(kappa_bar, omega_r, bandwidth, &mut flags);

    Ok(GainReport {
        g_c,
        g_sr,
        rho,
        kappa_bar,
        gain_bandwidth: bandwidth,
        regime,
        flags,
    })
}

/// Report from a derived parameter set; ρ is fed by the cavity gain.
pub fn report_for(
    params: &crate::params::CavityAtomParams,
    n_atoms: f64,
    condensate: Option<&CondensateGeometry>,
) -> Result<GainReport> {
    let d = &params.derived;
    gain_report(
        n_atoms,
        d.n_plus,
        d.omega_1,
        d.delta,
        d.kappa_c,
        d.omega_r,
        params.species.gamma_rad_per_s,
        d.k,
        condensate,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn carl_gain_zero_atoms_and_linearity() {
        let g0 = carl_gain(0.0, 1.1e9, 7.83e5, -3.34e12, 1.274e5).unwrap();
        assert_eq!(g0, 0.0);
        let g1 = carl_gain(1e6, 1.1e9, 7.83e5, -3.34e12, 1.274e5).unwrap();
        let g2 = carl_gain(2e6, 1.1e9, 7.83e5, -3.34e12, 1.274e5).unwrap();
        assert_relative_eq!(g2, 2.0 * g1, max_relative = 1e-14);
        let gp = carl_gain(1e6, 2.2e9, 7.83e5, -3.34e12, 1.274e5).unwrap();
        assert_relative_eq!(gp, 2.0 * g1, max_relative = 1e-14);
        assert!(carl_gain(1e6, 1.1e9, 7.83e5, 0.0, 1.274e5).is_err());
    }

    #[test]
    fn carl_gain_two_routes_agree() {
        let a = carl_gain(1e6, 1.136e9, 7.83e5, -3.34e12, 1.274e5).unwrap();
        let b = carl_gain_product_form(1e6, 1.136e9, 7.83e5, -3.34e12, 1.274e5).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
        assert!(a > 0.0);
    }

    #[test]
    fn rayleigh_rate_limits() {
        assert_eq!(rayleigh_rate(3.61e7, -3.34e12, 0.0), 0.0);
        // saturation ceiling Γ/2
        let r = rayleigh_rate(3.61e7, 0.0, 1e12);
        assert_relative_eq!(r, 3.61e7 / 2.0, max_relative = 1e-9);
        assert!(r <= 3.61e7 / 2.0);
        // far-off-resonance asymptote to 1%
        let (gamma, delta, op) = (3.61e7, -3.34e12, 1e10);
        assert!(4.0 * delta * delta > 100.0 * (2.0 * op * op + gamma * gamma));
        let asym = gamma * op * op / (4.0 * delta * delta);
        assert_relative_eq!(rayleigh_rate(gamma, delta, op), asym, max_relative = 1e-2);
    }

    #[test]
    fn superradiant_routes_agree_and_scale() {
        let geom = CondensateGeometry {
            length_m: 200e-6,
            waist_m: 10e-6,
            atom_number: 2e5,
        };
        let sr = superradiant_gain(&geom, 1e9, -8e12, 3.61e7, 7.9e6).unwrap();
        assert_relative_eq!(sr.value, sr.effective_cavity_value, max_relative = 1e-12);
        // 1/w² scaling
        let wide = CondensateGeometry {
            waist_m: 20e-6,
            ..geom
        };
        let sr2 = superradiant_gain(&wide, 1e9, -8e12, 3.61e7, 7.9e6).unwrap();
        assert_relative_eq!(sr.value / sr2.value, 4.0, max_relative = 1e-12);
        // zero atoms
        let empty = CondensateGeometry {
            atom_number: 0.0,
            ..geom
        };
        assert!(superradiant_gain(&empty, 1e9, -8e12, 3.61e7, 7.9e6).is_err());
    }

    #[test]
    fn far_detuning_flag() {
        let geom = CondensateGeometry {
            length_m: 200e-6,
            waist_m: 10e-6,
            atom_number: 2e5,
        };
        let near = superradiant_gain(&geom, 1e9, -1e9, 3.61e7, 7.9e6).unwrap();
        assert!(!near.far_detuned);
        let far = superradiant_gain(&geom, 1e6, -1e12, 3.61e7, 7.9e6).unwrap();
        assert!(far.far_detuned);
    }

    #[test]
    fn carl_parameter_unit_case_and_cube_root() {
        assert_relative_eq!(carl_parameter(1.0, 1.0, 1.0).unwrap(), 1.0);
        let r1 = carl_parameter(2.5e6, 1.3e5, 9.1e4).unwrap();
        let r8 = carl_parameter(8.0 * 2.5e6, 1.3e5, 9.1e4).unwrap();
        assert_relative_eq!(r8, 2.0 * r1, max_relative = 1e-12);
        // inverse round trip
        let g = 9.1e4 * r1.powi(3) * 9.1e4 / 1.3e5;
        assert_relative_eq!(carl_parameter(g, 1.3e5, 9.1e4).unwrap(), r1, max_relative = 1e-12);
    }

    #[test]
    fn scaled_decay_paper_values() {
        // F = 87000, λ = 796.1 nm dataset
        let kbar = scaled_decay(1.274e5, 9.104e4, 4.7).unwrap();
        assert_relative_eq!(kbar, 0.298, max_relative = 2e-3);
        // F = 6400, λ = 795.3 nm dataset
        let kbar3 = scaled_decay(1.731e6, 9.122e4, 5.1).unwrap();
        assert_relative_eq!(kbar3, 3.72, max_relative = 2e-3);
        // ρ → 2ρ halves κ̄
        let half = scaled_decay(1.274e5, 9.104e4, 9.4).unwrap();
        assert_relative_eq!(half, kbar / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn gain_bandwidth_branches() {
        // good-cavity case κ̄ ≈ 0.3
        let bw = gain_bandwidth(4.7, 9.104e4, 1.274e5).unwrap();
        assert_relative_eq!(bw, 9.104e4 * 4.7, max_relative = 1e-14);
        assert_relative_eq!(bw, 4.28e5, max_relative = 1e-3);
        // bad-cavity case κ̄ ≈ 3.7
        let bw3 = gain_bandwidth(5.1, 9.122e4, 1.731e6).unwrap();
        assert_eq!(bw3, 1.731e6);
    }

    #[test]
    fn classify_regime_cases() {
        let mut flags = Vec::new();
        let r = classify_regime(0.3, 9.104e4, 9.104e4 * 4.7, &mut flags);
        assert_eq!(r, (CavityRegime::GoodCavity, Quantumness::Semiclassical));
        let r = classify_regime(3.7, 9.122e4, 1.731e6, &mut flags);
        assert_eq!(r, (CavityRegime::BadCavity, Quantumness::Semiclassical));
        // quantum threshold
        let r = classify_regime(0.5, 1.0e5, 0.5e5, &mut flags);
        assert_eq!(r, (CavityRegime::GoodCavity, Quantumness::Quantum));
        assert!(flags.is_empty());
        // boundary
        let r = classify_regime(1.0, 1.0e5, 2.0e5, &mut flags);
        assert_eq!(r.0, CavityRegime::BadCavity);
        assert_eq!(flags, vec!["kappa_bar_boundary".to_string()]);
    }

    proptest! {
        // Eq. (1–2) vs Eq. (3) routes agree to 1e-12 relative.
        #[test]
        fn gain_identity_random(
            n in 1.0f64..1e8,
            np in 1.0f64..1e11,
            o1 in 1e3f64..1e7,
            d in prop::sample::select(vec![-1.0f64, 1.0]),
            dmag in 1e9f64..1e14,
            kc in 1e3f64..1e8,
        ) {
            let delta = d * dmag;
            let a = carl_gain(n, np, o1, delta, kc).unwrap();
            let b = carl_gain_product_form(n, np, o1, delta, kc).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
        }

        // Eq. (5) vs Eq. (6) routes agree to 1e-12 relative.
        #[test]
        fn superradiant_identity_random(
            l in 1e-6f64..1e-2,
            w in 1e-7f64..1e-3,
            n0 in 1.0f64..1e9,
            op in 1e3f64..1e10,
            dmag in 1e9f64..1e14,
            k in 1e6f64..1e8,
        ) {
            let geom = CondensateGeometry { length_m: l, waist_m: w, atom_number: n0 };
            let sr = superradiant_gain(&geom, op, -dmag, 3.61e7, k).unwrap();
            prop_assert!(
                (sr.value - sr.effective_cavity_value).abs()
                    <= 1e-12 * sr.value.abs().max(sr.effective_cavity_value.abs())
            );
        }

        // κ̄ = (κ²/(G ω_r))^(1/3) through the composition.
        #[test]
        fn scaled_decay_composition(
            g in 1e2f64..1e10,
            kappa in 1e3f64..1e8,
            wr in 1e3f64..1e6,
        ) {
            let rho = carl_parameter(g, kappa, wr).unwrap();
            let kbar = scaled_decay(kappa, wr, rho).unwrap();
            let direct = (kappa * kappa / (g * wr)).cbrt();
            prop_assert!((kbar - direct).abs() <= 1e-10 * direct);
        }

        // Classification invariant under joint rescaling of (G, κ, ω_r).
        #[test]
        fn classification_scale_invariant(
            g in 1e2f64..1e10,
            kappa in 1e3f64..1e8,
            wr in 1e3f64..1e6,
            scale in 1e-3f64..1e3,
        ) {
            let classify = |g: f64, kappa: f64, wr: f64| {
                let rho = carl_parameter(g, kappa, wr).unwrap();
                let kbar = scaled_decay(kappa, wr, rho).unwrap();
                let bw = gain_bandwidth(rho, wr, kappa).unwrap();
                let mut flags = Vec::new();
                classify_regime(kbar, wr, bw, &mut flags)
            };
            let a = classify(g, kappa, wr);
            let b = classify(g * scale, kappa * scale, wr * scale);
            prop_assert_eq!(a, b);
        }
    }
}
