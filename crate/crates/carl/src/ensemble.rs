//! Macro-atom ensemble state and its initialization.
//!
//! Each of the N_s simulated trajectories stands for N/N_s real atoms in the
//! field equations; forces act on single atoms and carry no macro weighting.

use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::constants::KB;

/// Positions, momenta and the complex probe amplitude at time t.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleState {
    /// Time (s).
    pub t: f64,
    /// Macro-atom positions (m).
    pub z: Vec<f64>,
    /// Macro-atom momenta (kg·m/s).
    pub p: Vec<f64>,
    /// Probe amplitude α₋ (√photons).
    pub alpha_minus: Complex64,
}

impl EnsembleState {
    pub fn n_sim(&self) -> usize {
        self.z.len()
    }

    pub fn is_finite(&self) -> bool {
        self.alpha_minus.re.is_finite()
            && self.alpha_minus.im.is_finite()
            && self.z.iter().all(|v| v.is_finite())
            && self.p.iter().all(|v| v.is_finite())
    }

    /// Bit-pattern digest used by determinism tests.
    pub fn digest(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.t.to_bits().hash(&mut h);
        for v in &self.z {
            v.to_bits().hash(&mut h);
        }
        for v in &self.p {
            v.to_bits().hash(&mut h);
        }
        self.alpha_minus.re.to_bits().hash(&mut h);
        self.alpha_minus.im.to_bits().hash(&mut h);
        h.finish()
    }
}

/// Spread N_s atoms over half a wavelength with equal spacings, optionally
/// jittered by ±ε·λ, and draw momenta as i.i.d. normals with ⟨p²⟩ = m k_B T.
///
/// The standard-normal draws happen before the jitter draws and are scaled by
/// √(m k_B T), so scenarios differing only in T share the same noise
/// realization under the same seed (and T = 0 gives exactly p_j = 0).
#[allow(clippy::too_many_arguments)]
pub fn init_ensemble(
    n_sim: usize,
    temperature_k: f64,
    wavelength_m: f64,
    mass_kg: f64,
    seed: u64,
    jitter_eps: f64,
    initial_alpha: Complex64,
) -> EnsembleState {
    assert!(n_sim >= 2, "need at least two macro-atoms");
    assert!(temperature_k >= 0.0);

    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    let sigma_p = (mass_kg * KB * temperature_k).sqrt();
    let p: Vec<f64> = (0..n_sim)
        .map(|_| {
            let xi: f64 = StandardNormal.sample(&mut rng);
            sigma_p * xi
        })
        .collect();

    let spacing = wavelength_m / 2.0 / n_sim as f64;
    let mut z: Vec<f64> = (0..n_sim).map(|j| j as f64 * spacing).collect();
    if jitter_eps > 0.0 {
        let jitter = Uniform::new_inclusive(-jitter_eps * wavelength_m, jitter_eps * wavelength_m)
            .expect("valid jitter range");
        for zj in z.iter_mut() {
            *zj += jitter.sample(&mut rng);
        }
    }

    EnsembleState {
        t: 0.0,
        z,
        p,
        alpha_minus: initial_alpha,
    }
}

/// Bunching parameter b = N_s⁻¹ Σ_j e^(−2ikz_j); |b| ≤ 1.
pub fn bunching(state: &EnsembleState, k: f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for &zj in &state.z {
        let (s, c) = (-2.0 * k * zj).sin_cos();
        sum += Complex64::new(c, s);
    }
    sum / state.n_sim() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::HBAR;
    use approx::assert_relative_eq;

    const RB_MASS: f64 = 1.44316e-25;

    #[test]
    fn equal_spacing_phases_and_zero_bunching() {
        let st = init_ensemble(4, 0.0, 796.1e-9, RB_MASS, 1, 0.0, Complex64::ZERO);
        let k = 2.0 * std::f64::consts::PI / 796.1e-9;
        for (j, &zj) in st.z.iter().enumerate() {
            let theta = 2.0 * k * zj;
            assert_relative_eq!(
                theta,
                j as f64 * std::f64::consts::FRAC_PI_2,
                max_relative = 1e-12,
                epsilon = 1e-12
            );
        }
        assert!(bunching(&st, k).norm() < 1e-15);
        assert!(st.p.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn thermal_rms_momentum() {
        // 800 nK: rms momentum ≈ 0.759·(2ħk) at 796.1 nm
        let n = 40_000;
        let st = init_ensemble(n, 800e-9, 796.1e-9, RB_MASS, 7, 0.0, Complex64::ZERO);
        let k = 2.0 * std::f64::consts::PI / 796.1e-9;
        let rms = (st.p.iter().map(|p| p * p).sum::<f64>() / n as f64).sqrt();
        assert_relative_eq!(rms / (2.0 * HBAR * k), 0.759, max_relative = 2e-2);
    }

    #[test]
    fn same_seed_bit_identical() {
        let a = init_ensemble(100, 3e-6, 796.1e-9, RB_MASS, 42, 1e-4, Complex64::new(1.0, 0.0));
        let b = init_ensemble(100, 3e-6, 796.1e-9, RB_MASS, 42, 1e-4, Complex64::new(1.0, 0.0));
        assert_eq!(a.digest(), b.digest());
        let c = init_ensemble(100, 3e-6, 796.1e-9, RB_MASS, 43, 1e-4, Complex64::new(1.0, 0.0));
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn temperature_sweep_shares_noise() {
        // same seed, different T: momenta are the same normals rescaled
        let a = init_ensemble(50, 1e-6, 796.1e-9, RB_MASS, 5, 0.0, Complex64::ZERO);
        let b = init_ensemble(50, 4e-6, 796.1e-9, RB_MASS, 5, 0.0, Complex64::ZERO);
        for (pa, pb) in a.p.iter().zip(&b.p) {
            assert_relative_eq!(pb / pa, 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn bunching_examples() {
        let k = 2.0 * std::f64::consts::PI / 796.1e-9;
        // all atoms at z = 0
        let st = EnsembleState {
            t: 0.0,
            z: vec![0.0; 5],
            p: vec![0.0; 5],
            alpha_minus: Complex64::ZERO,
        };
        assert_relative_eq!(bunching(&st, k).re, 1.0, max_relative = 1e-15);
        // θ = 0 and θ = π/2 → b = (1−i)/2
        let st = EnsembleState {
            t: 0.0,
            z: vec![0.0, std::f64::consts::FRAC_PI_2 / (2.0 * k)],
            p: vec![0.0, 0.0],
            alpha_minus: Complex64::ZERO,
        };
        let b = bunching(&st, k);
        assert_relative_eq!(b.re, 0.5, max_relative = 1e-12);
        assert_relative_eq!(b.im, -0.5, max_relative = 1e-12);
        assert_relative_eq!(b.norm(), std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-12);
    }
}
