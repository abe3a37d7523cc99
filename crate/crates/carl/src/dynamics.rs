//! Semiclassical equations of motion for N_s macro-atoms coupled to the
//! counter-propagating probe mode, with pump ramp, mirror backscattering and
//! radiation pressure.
//!
//! Force and field drive derive from the same interaction Hamiltonian
//! ħU₀α₊ Σ_j (α₋* e^(2ikz_j) + c.c.), so each pump→probe scattering event
//! transfers +2ħk to an atom and the momentum/photon budget closes:
//! d/dt [Σ_j (N/N_s) p_j − 2ħk(|α₋|² + 2κ_c∫|α₋|²dt′)] = 0
//! for U_s = 0, γ₀ = 0. Macro-atom weighting N/N_s enters field sums only,
//! never single-atom forces.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::ensemble::{bunching, init_ensemble, EnsembleState};
use crate::error::{CarlError, Result};
use crate::observables::{mean_momentum, probe_power, Trace};
use crate::params::CavityAtomParams;
use crate::pump::pump_power_at;

/// Magnitudes beyond this convert numerical blow-up into a typed error.
pub const OVERFLOW_GUARD: f64 = 1e30;

/// Effective mirror backscatterer: a stationary scatterer coupling pump into
/// probe at rate U_s with grating phase 2k·z_s.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BackscatterModel {
    /// Scattering rate U_s (rad/s), ≥ 0.
    pub u_s: f64,
    /// Scatterer phase 2k·z_s (rad).
    pub phase: f64,
}

impl Default for BackscatterModel {
    fn default() -> Self {
        BackscatterModel { u_s: 0.0, phase: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorMethod {
    Euler,
    Rk4,
}

/// Complete description of one simulation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub params: CavityAtomParams,
    /// Real atom number N (0 allowed: empty cavity).
    pub n_real: f64,
    /// Macro-atom count N_s ≥ 2.
    pub n_sim: usize,
    /// Initial temperature (K).
    pub temperature_k: f64,
    pub seed: u64,
    /// Uniform position jitter amplitude in units of λ, applied after equal
    /// spacing; seeds the instability when no mirror backscattering is used.
    pub jitter_eps: f64,
    pub backscatter: BackscatterModel,
    pub radiation_pressure: bool,
    /// Pump–probe detuning Δ_c (rad/s); 0 for a pump locked on resonance.
    pub delta_c: f64,
    pub method: IntegratorMethod,
    /// Time step (s).
    pub dt_s: f64,
    /// Run length (s).
    pub duration_s: f64,
    /// Probe amplitude at t = 0.
    pub initial_alpha: Complex64,
    /// Record every n-th step.
    pub decimation: usize,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.n_sim < 2 {
            return Err(CarlError::Validation("atoms.n_sim must be >= 2".into()));
        }
        if self.n_real != 0.0 && self.n_real < self.n_sim as f64 {
            return Err(CarlError::Validation(
                "atoms.n_real must be 0 (empty cavity) or >= atoms.n_sim".into(),
            ));
        }
        if !(self.temperature_k >= 0.0) {
            return Err(CarlError::Validation("atoms.temperature_k must be >= 0".into()));
        }
        if !(self.jitter_eps >= 0.0) {
            return Err(CarlError::Validation("atoms.jitter_eps must be >= 0".into()));
        }
        if !(self.backscatter.u_s >= 0.0) {
            return Err(CarlError::Validation("backscatter rate must be >= 0".into()));
        }
        if !(self.dt_s > 0.0) {
            return Err(CarlError::Validation("integrator.dt_s must be > 0".into()));
        }
        if !(self.duration_s > 0.0) {
            return Err(CarlError::Validation("run.duration_s must be > 0".into()));
        }
        if self.decimation == 0 {
            return Err(CarlError::Validation("run.decimation must be >= 1".into()));
        }
        if !self.initial_alpha.re.is_finite() || !self.initial_alpha.im.is_finite() {
            return Err(CarlError::Validation("initial probe amplitude must be finite".into()));
        }
        Ok(())
    }

    /// Pump amplitude α₊(t) = √n₊(t), real and non-negative.
    pub fn alpha_plus_at(&self, t: f64) -> f64 {
        let d = &self.params.derived;
        let power = pump_power_at(&self.params.pump.profile, self.params.pump.power_w, t);
        (power / (d.photon_energy * d.delta_fsr)).sqrt()
    }

    pub fn initial_state(&self) -> EnsembleState {
        init_ensemble(
            self.n_sim,
            self.temperature_k,
            self.params.pump.wavelength_m,
            self.params.species.mass_kg,
            self.seed,
            self.jitter_eps,
            self.initial_alpha,
        )
    }
}

/// Cached per-run constants for the derivative evaluation.
struct DynContext {
    k: f64,
    inv_mass: f64,
    four_hbar_k_u0: f64,
    hbar_k: f64,
    kappa_c: f64,
    delta_c: f64,
    u_0: f64,
    gamma_0: f64,
    weight: f64,
    n_real: f64,
    u_s: f64,
    mirror_phasor: Complex64,
    radiation_pressure: bool,
}

impl DynContext {
    fn new(scen: &Scenario) -> Self {
        let d = &scen.params.derived;
        DynContext {
            k: d.k,
            inv_mass: 1.0 / scen.params.species.mass_kg,
            four_hbar_k_u0: 4.0 * HBAR * d.k * d.u_0,
            hbar_k: HBAR * d.k,
            kappa_c: d.kappa_c,
            delta_c: scen.delta_c,
            u_0: d.u_0,
            gamma_0: d.gamma_0,
            weight: scen.n_real / scen.n_sim as f64,
            n_real: scen.n_real,
            u_s: scen.backscatter.u_s,
            mirror_phasor: Complex64::from_polar(1.0, scen.backscatter.phase),
            radiation_pressure: scen.radiation_pressure,
        }
    }
}

struct Derivative {
    dz: Vec<f64>,
    dp: Vec<f64>,
    dalpha: Complex64,
}

impl Derivative {
    fn zeros(n: usize) -> Self {
        Derivative {
            dz: vec![0.0; n],
            dp: vec![0.0; n],
            dalpha: Complex64::ZERO,
        }
    }
}

fn eval_derivative(
    z: &[f64],
    p: &[f64],
    alpha: Complex64,
    alpha_plus: f64,
    ctx: &DynContext,
    out: &mut Derivative,
) {
    let mut grating_sum = Complex64::ZERO;
    for j in 0..z.len() {
        let theta = 2.0 * ctx.k * z[j];
        let (sin_t, cos_t) = theta.sin_cos();
        grating_sum += Complex64::new(cos_t, sin_t);

        out.dz[j] = p[j] * ctx.inv_mass;
        // dipole force −4ħkU₀α₊ Im(α₋ e^(−iθ_j))
        let im_part = alpha.im * cos_t - alpha.re * sin_t;
        out.dp[j] = -ctx.four_hbar_k_u0 * alpha_plus * im_part;
    }

    if ctx.radiation_pressure {
        let rp_force =
            ctx.hbar_k * ctx.gamma_0 * (alpha_plus * alpha_plus - alpha.norm_sqr());
        for dpj in out.dp.iter_mut() {
            *dpj += rp_force;
        }
    }

    let mut decay = Complex64::new(ctx.kappa_c, ctx.delta_c);
    let mut drive_coeff = Complex64::new(0.0, ctx.u_0);
    if ctx.radiation_pressure {
        decay.re += ctx.n_real * ctx.gamma_0;
        drive_coeff.re += ctx.gamma_0;
    }
    out.dalpha = -decay * alpha
        - drive_coeff * ctx.weight * alpha_plus * grating_sum
        - Complex64::i() * ctx.u_s * alpha_plus * ctx.mirror_phasor;
}

/// Integrator working buffers, reused across steps.
struct Stepper {
    ctx: DynContext,
    k1: Derivative,
    k2: Derivative,
    k3: Derivative,
    k4: Derivative,
    z_tmp: Vec<f64>,
    p_tmp: Vec<f64>,
}

impl Stepper {
    fn new(scen: &Scenario) -> Self {
        let n = scen.n_sim;
        Stepper {
            ctx: DynContext::new(scen),
            k1: Derivative::zeros(n),
            k2: Derivative::zeros(n),
            k3: Derivative::zeros(n),
            k4: Derivative::zeros(n),
            z_tmp: vec![0.0; n],
            p_tmp: vec![0.0; n],
        }
    }

    fn euler_step(&mut self, scen: &Scenario, state: &mut EnsembleState, dt: f64) {
        let t = state.t;
        let alpha_plus = scen.alpha_plus_at(t);
        eval_derivative(
            &state.z,
            &state.p,
            state.alpha_minus,
            alpha_plus,
            &self.ctx,
            &mut self.k1,
        );
        for j in 0..state.z.len() {
            state.z[j] += dt * self.k1.dz[j];
            state.p[j] += dt * self.k1.dp[j];
        }
        state.alpha_minus += dt * self.k1.dalpha;
    }

    fn rk4_step(&mut self, scen: &Scenario, state: &mut EnsembleState, dt: f64) {
        let t = state.t;
        let n = state.z.len();
        let a_t = scen.alpha_plus_at(t);
        let a_h = scen.alpha_plus_at(t + 0.5 * dt);
        let a_f = scen.alpha_plus_at(t + dt);

        eval_derivative(&state.z, &state.p, state.alpha_minus, a_t, &self.ctx, &mut self.k1);

        for j in 0..n {
            self.z_tmp[j] = state.z[j] + 0.5 * dt * self.k1.dz[j];
            self.p_tmp[j] = state.p[j] + 0.5 * dt * self.k1.dp[j];
        }
        let alpha2 = state.alpha_minus + 0.5 * dt * self.k1.dalpha;
        eval_derivative(&self.z_tmp, &self.p_tmp, alpha2, a_h, &self.ctx, &mut self.k2);

        for j in 0..n {
            self.z_tmp[j] = state.z[j] + 0.5 * dt * self.k2.dz[j];
            self.p_tmp[j] = state.p[j] + 0.5 * dt * self.k2.dp[j];
        }
        let alpha3 = state.alpha_minus + 0.5 * dt * self.k2.dalpha;
        eval_derivative(&self.z_tmp, &self.p_tmp, alpha3, a_h, &self.ctx, &mut self.k3);

        for j in 0..n {
            self.z_tmp[j] = state.z[j] + dt * self.k3.dz[j];
            self.p_tmp[j] = state.p[j] + dt * self.k3.dp[j];
        }
        let alpha4 = state.alpha_minus + dt * self.k3.dalpha;
        eval_derivative(&self.z_tmp, &self.p_tmp, alpha4, a_f, &self.ctx, &mut self.k4);

        let w = dt / 6.0;
        for j in 0..n {
            state.z[j] += w
                * (self.k1.dz[j] + 2.0 * self.k2.dz[j] + 2.0 * self.k3.dz[j] + self.k4.dz[j]);
            state.p[j] += w
                * (self.k1.dp[j] + 2.0 * self.k2.dp[j] + 2.0 * self.k3.dp[j] + self.k4.dp[j]);
        }
        state.alpha_minus +=
            w * (self.k1.dalpha + 2.0 * self.k2.dalpha + 2.0 * self.k3.dalpha + self.k4.dalpha);
    }

    fn advance(&mut self, scen: &Scenario, state: &mut EnsembleState, dt: f64) -> Result<()> {
        match scen.method {
            IntegratorMethod::Euler => self.euler_step(scen, state, dt),
            IntegratorMethod::Rk4 => self.rk4_step(scen, state, dt),
        }
        let mut ok = state.alpha_minus.re.is_finite()
            && state.alpha_minus.im.is_finite()
            && state.alpha_minus.norm_sqr() < OVERFLOW_GUARD * OVERFLOW_GUARD;
        if ok {
            for j in 0..state.z.len() {
                if !state.z[j].is_finite()
                    || !state.p[j].is_finite()
                    || state.z[j].abs() > OVERFLOW_GUARD
                    || state.p[j].abs() > OVERFLOW_GUARD
                {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            Ok(())
        } else {
            Err(CarlError::IntegrationDiverged { t_s: state.t })
        }
    }
}

/// Evaluate the time derivative of (z, p, α₋) at the state's own time.
pub fn derivatives(state: &EnsembleState, scen: &Scenario) -> Result<(Vec<f64>, Vec<f64>, Complex64)> {
    if !state.is_finite() {
        return Err(CarlError::IntegrationDiverged { t_s: state.t });
    }
    let ctx = DynContext::new(scen);
    let mut d = Derivative::zeros(state.n_sim());
    let alpha_plus = scen.alpha_plus_at(state.t);
    eval_derivative(&state.z, &state.p, state.alpha_minus, alpha_plus, &ctx, &mut d);
    Ok((d.dz, d.dp, d.dalpha))
}

/// Advance one step with the scenario's integrator; t increases by dt.
pub fn step(state: &EnsembleState, scen: &Scenario, dt: f64) -> Result<EnsembleState> {
    if !(dt > 0.0) {
        return Err(CarlError::invalid("dt", "must be > 0"));
    }
    let mut next = state.clone();
    let mut stepper = Stepper::new(scen);
    let t0 = state.t;
    stepper.advance(scen, &mut next, dt)?;
    next.t = t0 + dt;
    Ok(next)
}

/// Simulation result: the decimated trace plus the final ensemble state.
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub trace: Trace,
    pub final_state: EnsembleState,
}

/// Run a scenario start to finish. Deterministic for a given seed.
pub fn simulate(scen: &Scenario) -> Result<SimOutput> {
    scen.validate()?;
    let d = &scen.params.derived;
    let dt = scen.dt_s;
    let n_steps = ((scen.duration_s / dt).round() as usize).max(1);

    let mut state = scen.initial_state();
    let mut stepper = Stepper::new(scen);
    let mut trace = Trace::default();

    let record = |state: &EnsembleState, trace: &mut Trace, t: f64| {
        trace.t.push(t);
        trace
            .p_plus
            .push(pump_power_at(&scen.params.pump.profile, scen.params.pump.power_w, t));
        trace
            .p_minus
            .push(probe_power(state.alpha_minus, d.photon_energy, d.delta_fsr));
        trace.alpha_minus.push(state.alpha_minus);
        trace.abs_b.push(bunching(state, d.k).norm());
        trace.mean_p.push(mean_momentum(&state.p, d.k));
    };

    record(&state, &mut trace, 0.0);
    for i in 0..n_steps {
        state.t = i as f64 * dt;
        stepper.advance(scen, &mut state, dt)?;
        state.t = (i + 1) as f64 * dt;
        if (i + 1) % scen.decimation == 0 || i + 1 == n_steps {
            record(&state, &mut trace, state.t);
        }
    }

    Ok(SimOutput {
        trace,
        final_state: state,
    })
}

/// Steady-state probe amplitude for a frozen grating: the bad-cavity oracle
/// α₋ = −i(N U₀ b + U_s e^(−iφ_s)) α₊ / (κ_c + iΔ_c).
///
/// Its magnitude equals the integrator's adiabatic limit exactly; the phase is
/// conjugate to the integrated one (grating-drive phase convention), so
/// comparisons against it are magnitude-based.
pub fn adiabatic_probe(b: Complex64, alpha_plus: f64, scen: &Scenario) -> Complex64 {
    let d = &scen.params.derived;
    let numerator = scen.n_real * d.u_0 * b
        + scen.backscatter.u_s * Complex64::from_polar(1.0, -scen.backscatter.phase);
    -Complex64::i() * numerator * alpha_plus / Complex64::new(d.kappa_c, scen.delta_c)
}
