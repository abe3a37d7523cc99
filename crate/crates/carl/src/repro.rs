//! Reproduction bundles for the standard parameter studies: each tag pins one
//! figure-style study, runs it, writes a self-contained output directory
//! (scenarios, traces, sweep tables, analysis) and evaluates that study's
//! trend checks.
//!
//! The cavity mode waist is not a measured quantity; each study records the
//! value it uses in its emitted scenario files. Scaling studies sit at a
//! waist that keeps the whole sweep inside one regime.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dynamics::SimOutput;
use crate::error::{CarlError, Result};
use crate::fit::fit_power_law;
use crate::gain;
use crate::observables::{
    find_peaks, momentum_histogram, tof_profile, PeakSet, SavedState, PEAK_THRESHOLD_DEFAULT,
    PEAK_WINDOW_DEFAULT, TOF_SIGMA_X_DEFAULT,
};
use crate::scenario::ScenarioFile;
use crate::sweep::{run_sweep, SeedPolicy, SweepOptions, SweepResult, SweepRun, SweepSpec};

pub const FIGURE_TAGS: [&str; 8] = [
    "fig3", "fig4", "fig5", "fig7a", "fig7b", "fig8", "fig9", "fig10",
];

/// One pass/fail line of a figure's trend gate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FigureCheck {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

impl FigureCheck {
    fn new(name: &str, passed: bool, details: String) -> Self {
        FigureCheck {
            name: name.to_string(),
            passed,
            details,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FigureBundle {
    pub tag: String,
    pub checks: Vec<FigureCheck>,
    pub passed: bool,
    /// Fit results and other per-figure numbers, keyed by name.
    pub metrics: serde_json::Map<String, Value>,
}

/// Shared seed for every repro scenario; sweeps vary only the swept leaf.
const SEED: u64 = 12345;

fn rb87_json() -> Value {
    json!({
        "label": "Rb87",
        "mass_kg": 1.44316e-25,
        "gamma_rad_per_s": 3.61e7,
        "lines_m": [794.979e-9, 780.241e-9]
    })
}

struct DocSpec {
    wavelength_m: f64,
    finesse: f64,
    waist_m: f64,
    power_w: f64,
    profile: Value,
    n_real: f64,
    n_sim: usize,
    temperature_k: f64,
    jitter_eps: f64,
    us_over_kappa: f64,
    radiation_pressure: bool,
    duration_s: f64,
    decimation: usize,
}

impl Default for DocSpec {
    fn default() -> Self {
        DocSpec {
            wavelength_m: 796.1e-9,
            finesse: 87000.0,
            waist_m: 176e-6,
            power_w: 0.5,
            profile: json!({"kind": "servo_ramp", "tau_s": 20e-6}),
            n_real: 1e6,
            n_sim: 100,
            temperature_k: 0.0,
            jitter_eps: 0.0,
            us_over_kappa: 0.0,
            radiation_pressure: false,
            duration_s: 100e-6,
            decimation: 25,
        }
    }
}

fn doc(spec: &DocSpec) -> Value {
    json!({
        "species": rb87_json(),
        "cavity": {"length_m": 0.085, "waist_m": spec.waist_m, "finesse": spec.finesse},
        "pump": {
            "wavelength_m": spec.wavelength_m,
            "power_w": spec.power_w,
            "profile": spec.profile,
        },
        "atoms": {
            "n_real": spec.n_real,
            "n_sim": spec.n_sim,
            "temperature_k": spec.temperature_k,
            "seed": SEED,
            "jitter_eps": spec.jitter_eps,
        },
        "backscatter": {"us_over_kappa": spec.us_over_kappa, "phase_rad": 0.0},
        "physics": {"radiation_pressure": spec.radiation_pressure, "delta_c_rad_s": 0.0},
        "integrator": {"method": "euler", "dt_s": 2e-9},
        "run": {"duration_s": spec.duration_s, "decimation": spec.decimation}
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CarlError::Validation(format!("serialize {}: {e}", path.display())))?;
    std::fs::write(path, text).map_err(|e| CarlError::io(path.display().to_string(), e))
}

fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| CarlError::io(path.display().to_string(), e))
}

#[derive(Serialize)]
struct PointAnalysis<'a> {
    peaks: &'a PeakSet,
    mean_p_final: Option<f64>,
    regime: Option<Value>,
}

/// Write trace.csv, final_state.json and analysis.json for one finished run.
pub fn write_run_outputs(
    dir: &Path,
    scen: &crate::dynamics::Scenario,
    sim: &SimOutput,
) -> Result<()> {
    ensure_dir(dir)?;
    sim.trace.write_csv_file(&dir.join("trace.csv"))?;
    let saved = SavedState::new(
        &sim.final_state,
        scen.params.pump.wavelength_m,
        scen.params.species.mass_kg,
        scen.n_real,
    );
    write_json(&dir.join("final_state.json"), &saved)?;

    let peaks = find_peaks(&sim.trace, PEAK_WINDOW_DEFAULT, PEAK_THRESHOLD_DEFAULT)?;
    let regime = if scen.n_real > 0.0 {
        gain::report_for(&scen.params, scen.n_real, None)
            .ok()
            .and_then(|r| serde_json::to_value(&r).ok())
    } else {
        None
    };
    write_json(
        &dir.join("analysis.json"),
        &PointAnalysis {
            peaks: &peaks,
            mean_p_final: sim.trace.mean_p.last().copied(),
            regime,
        },
    )
}

fn write_point(dir: &Path, doc_value: &Value, sim: Option<&SimOutput>) -> Result<()> {
    ensure_dir(dir)?;
    write_json(&dir.join("scenario.json"), doc_value)?;
    let Some(sim) = sim else {
        return Ok(());
    };
    let file: ScenarioFile = serde_json::from_value(doc_value.clone()).map_err(|source| {
        CarlError::Parse {
            path: dir.display().to_string(),
            source,
        }
    })?;
    let scen = file.build(None)?;
    write_run_outputs(dir, &scen, sim)
}

/// Run a named sweep, write its point directories and summary table, return
/// the rows and outputs.
fn run_named_sweep(
    root: &Path,
    name: &str,
    base: Value,
    param_path: &str,
    values: &[f64],
    opts: &SweepOptions,
) -> Result<SweepRun> {
    let spec = SweepSpec {
        base,
        base_dir: None,
        param_path: param_path.to_string(),
        values: values.to_vec(),
        seed_policy: SeedPolicy::Fixed,
    };
    let run = run_sweep(&spec, opts)?;
    for (i, point) in run.points.iter().enumerate() {
        let dir = root.join(format!("{name}_{i:03}"));
        write_point(&dir, &point.doc, point.sim.as_ref())?;
    }
    let csv_path = root.join(format!("{name}_summary.csv"));
    let f = std::fs::File::create(&csv_path)
        .map_err(|e| CarlError::io(csv_path.display().to_string(), e))?;
    run.result.write_csv(std::io::BufWriter::new(f))?;
    Ok(run)
}

fn run_single(root: &Path, name: &str, doc_value: Value) -> Result<SimOutput> {
    let file: ScenarioFile =
        serde_json::from_value(doc_value.clone()).map_err(|source| CarlError::Parse {
            path: name.to_string(),
            source,
        })?;
    let scen = file.build(None)?;
    let sim = crate::dynamics::simulate(&scen)?;
    write_point(&root.join(name), &doc_value, Some(&sim))?;
    Ok(sim)
}

fn rows_p1(result: &SweepResult) -> Vec<Option<f64>> {
    result.rows.iter().map(|r| r.p_minus_1).collect()
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

fn fig3(root: &Path) -> Result<(Vec<FigureCheck>, serde_json::Map<String, Value>)> {
    let sim = run_single(
        root,
        "run",
        doc(&DocSpec {
            wavelength_m: 797.3e-9,
            power_w: 4.0,
            n_real: 1.5e6,
            us_over_kappa: 0.04,
            duration_s: 120e-6,
            decimation: 50,
            ..DocSpec::default()
        }),
    )?;
    let peaks = find_peaks(&sim.trace, PEAK_WINDOW_DEFAULT, PEAK_THRESHOLD_DEFAULT)?;
    let mut checks = Vec::new();
    checks.push(FigureCheck::new(
        "pulse_train",
        peaks.peaks.len() >= 2,
        format!("{} probe maxima", peaks.peaks.len()),
    ));
    let decreasing = peaks.peaks.len() >= 2 && peaks.peaks[1].power_w < peaks.peaks[0].power_w;
    checks.push(FigureCheck::new(
        "decreasing_heights",
        decreasing,
        match peaks.peaks.len() {
            0 | 1 => "fewer than two maxima".to_string(),
            _ => format!(
                "first {:.3} mW, second {:.3} mW",
                peaks.peaks[0].power_w * 1e3,
                peaks.peaks[1].power_w * 1e3
            ),
        },
    ));
    let mut metrics = serde_json::Map::new();
    metrics.insert("peaks".into(), serde_json::to_value(&peaks).unwrap());
    Ok((checks, metrics))
}

fn fig4(root: &Path, opts: &SweepOptions) -> Result<(Vec<FigureCheck>, serde_json::Map<String, Value>)> {
    let base = doc(&DocSpec {
        n_real: 1.5e6,
        power_w: 0.5,
        jitter_eps: 1e-4,
        duration_s: 150e-6,
        ..DocSpec::default()
    });
    let values = [0.0, 0.01, 0.02, 0.04, 0.0775];
    let run = run_named_sweep(root, "us", base, "backscatter.us_over_kappa", &values, opts)?;

    let dts: Vec<f64> = run
        .result
        .rows
        .iter()
        .filter_map(|r| r.delta_t)
        .collect();
    let p1s: Vec<f64> = rows_p1(&run.result).into_iter().flatten().collect();
    let all_found = dts.len() == values.len() && p1s.len() == values.len();

    let mut checks = Vec::new();
    checks.push(FigureCheck::new(
        "delta_t_strictly_decreasing",
        all_found && strictly_decreasing(&dts),
        format!("Δt (μs): {:?}", dts.iter().map(|v| v * 1e6).collect::<Vec<_>>()),
    ));
    checks.push(FigureCheck::new(
        "p1_decreasing",
        all_found && strictly_decreasing(&p1s),
        format!("P₋,₁ (mW): {:?}", p1s.iter().map(|v| v * 1e3).collect::<Vec<_>>()),
    ));
    let mut metrics = serde_json::Map::new();
    metrics.insert("rows".into(), serde_json::to_value(&run.result.rows).unwrap());
    Ok((checks, metrics))
}

fn fig5(root: &Path, opts: &SweepOptions) -> Result<(Vec<FigureCheck>, serde_json::Map<String, Value>)> {
    let base = |temp: f64| {
        doc(&DocSpec {
            n_real: 2.4e6,
            n_sim: 400,
            waist_m: 250e-6,
            us_over_kappa: 0.04,
            temperature_k: temp,
            duration_s: 250e-6,
            decimation: 50,
            ..DocSpec::default()
        })
    };
    let powers = [0.01, 0.03, 0.1, 0.3, 1.0, 1.43];
    let cold = run_named_sweep(root, "t0", base(0.0), "pump.power_w", &powers, opts)?;
    let warm = run_named_sweep(root, "t800nk", base(800e-9), "pump.power_w", &powers, opts)?;

    let ratio_at = |p: f64| -> Option<f64> {
        let idx = powers.iter().position(|&v| v == p)?;
        let a = cold.result.rows[idx].p_minus_1?;
        let b = warm.result.rows[idx].p_minus_1?;
        (a > 0.0).then_some(b / a)
    };
    let hi = ratio_at(1.0);
    let lo = ratio_at(0.03);

    let mut checks = Vec::new();
    checks.push(FigureCheck::new(
        "thermal_ratio_high_power",
        hi.is_some_and(|r| r > 0.9),
        format!("P₋,₁(800 nK)/P₋,₁(0) at 1 W: {hi:?} (need > 0.9)"),
    ));
    checks.push(FigureCheck::new(
        "thermal_ratio_low_power",
        lo.is_some_and(|r| r < 0.5),
        format!("P₋,₁(800 nK)/P₋,₁(0) at 30 mW: {lo:?} (need < 0.5)"),
    ));
    let mut metrics = serde_json::Map::new();
    metrics.insert("powers_w".into(), json!(powers));
    metrics.insert("rows_t0".into(), serde_json::to_value(&cold.result.rows).unwrap());
    metrics.insert("rows_t800nk".into(), serde_json::to_value(&warm.result.rows).unwrap());
    Ok((checks, metrics))
}

fn exponent_checks(
    name: &str,
    xs: &[f64],
    p1: &[Option<f64>],
    range: Option<(f64, f64)>,
    target: f64,
    tol: f64,
) -> (FigureCheck, Option<Value>) {
    let pairs: Vec<(f64, f64)> = xs
        .iter()
        .zip(p1)
        .filter_map(|(&x, &p)| p.map(|p| (x, p)))
        .collect();
    if pairs.len() < 3 {
        return (
            FigureCheck::new(name, false, format!("only {} resolved peaks", pairs.len())),
            None,
        );
    }
    let (fx, fy): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    match fit_power_law(&fx, &fy, range) {
        Ok(fit) => {
            let passed = (fit.exponent - target).abs() <= tol;
            let check = FigureCheck::new(
                name,
                passed,
                format!(
                    "exponent {:.3} vs {target:.3} ± {tol} (R² = {:.4})",
                    fit.exponent, fit.r_squared
                ),
            );
            (check, serde_json::to_value(&fit).ok())
        }
        Err(e) => (FigureCheck::new(name, false, e.to_string()), None),
    }
}

fn fig7a(root: &Path, opts: &SweepOptions) -> Result<(Vec<FigureCheck>, serde_json::Map<String, Value>)> {
    let base = |n: f64, p: f64| {
        doc(&DocSpec {
            waist_m: 100e-6,
            power_w: p,
            profile: json!({"kind": "step"}),
            n_real: n,
            jitter_eps: 1e-4,
            duration_s: 80e-6,
            ..DocSpec::default()
        })
    };
    let ns = [3e5, 5e5, 8e5, 1.2e6, 2e6, 3e6];
    let n_run = run_named_sweep(root, "n", base(1e6, 1.43), "atoms.n_real", &ns, opts)?;
    let ps = [0.5, 0.8, 1.43, 2.5, 5.0];
    let p_run = run_named_sweep(root, "p", base(1e6, 1.43), "pump.power_w", &ps, opts)?;

    let mut metrics = serde_json::Map::new();
    let (c1, f1) = exponent_checks(
        "n_exponent_4_3",
        &ns,
        &rows_p1(&n_run.result),
        None,
        4.0 / 3.0,
        0.15,
    );
    if let Some(f) = f1 {
        metrics.insert("n_fit".into(), f);
    }
    let (c2, f2) = exponent_checks(
        "p_exponent_1_3",
        &ps,
        &rows_p1(&p_run.result),
        None,
        1.0 / 3.0,
        0.1,
    );
    if let Some(f) = f2 {
        metrics.insert("p_fit".into(), f);
    }
    metrics.insert("rows_n".into(), serde_json::to_value(&n_run.result.rows).unwrap());
    metrics.insert("rows_p".into(), serde_json::to_value(&p_run.result.rows).unwrap());
    Ok((vec![c1, c2], metrics))
}

fn fig7b(root: &Path, opts: &SweepOptions) -> Result<(Vec<FigureCheck>, serde_json::Map<String, Value>)> {
    let base = |n: f64, p: f64| {
        doc(&DocSpec {
            wavelength_m: 795.3e-9,
            finesse: 6400.0,
            waist_m: 250e-6,
            power_w: p,
            profile: json!({"kind": "step"}),
            n_real: n,
            jitter_eps: 1e-4,
            duration_s: 200e-6,
            decimation: 50,
            ..DocSpec::default()
        })
    };
    let ns = [2.5e5, 4e5, 6.3e5, 1e6, 1.6e6, 2.5e6];
    let n_run = run_named_sweep(root, "n", base(1e6, 0.066), "atoms.n_real", &ns, opts)?;
    let ps = [0.02, 0.04, 0.066, 0.12, 0.2];
    let p_run = run_named_sweep(root, "p", base(1e6, 0.066), "pump.power_w", &ps, opts)?;

    let mut metrics = serde_json::Map::new();
    // mirror backscattering and crossover proximity corrupt the low-N points;
    // the quadratic asymptote is fitted on the upper half-decade
    let half_decade = (2.5e6 / 10f64.sqrt(), 2.5e6);
    let (c1, f1) = exponent_checks(
        "n_exponent_2",
        &ns,
        &rows_p1(&n_run.result),
        Some(half_decade),
        2.0,
        0.2,
    );
    if let Some(f) = f1 {
        metrics.insert("n_fit".into(), f);
    }
    let (c2, f2) = exponent_checks(
        "p_exponent_1",
        &ps,
        &rows_p1(&p_run.result),
        None,
        1.0,
        0.15,
    );
    if let Some(f) = f2 {
        metrics.insert("p_fit".into(), f);
    }
    metrics.insert("rows_n".into(), serde_json::to_value(&n_run.result.rows).unwrap());
    metrics.insert("rows_p".into(), serde_json::to_value(&p_run.result.rows).unwrap());
    Ok((vec![c1, c2], metrics))
}

fn fig8(root: &Path, opts: &SweepOptions) -> Result<(Vec<FigureCheck>, serde_json::Map<String, Value>)> {
    let base = doc(&DocSpec {
        n_real: 1e6,
        n_sim: 400,
        us_over_kappa: 0.04,
        duration_s: 150e-6,
        ..DocSpec::default()
    });
    let temps = [0.0, 1e-6, 3e-6, 10e-6, 40e-6];
    let run = run_named_sweep(root, "t", base, "atoms.temperature_k", &temps, opts)?;
    let p1s: Vec<f64> = rows_p1(&run.result).into_iter().flatten().collect();
    let monotone = p1s.len() == temps.len() && p1s.windows(2).all(|w| w[1] <= w[0]);
    let checks = vec![FigureCheck::new(
        "p1_monotone_nonincreasing_in_t",
        monotone,
        format!("P₋,₁ (mW): {:?}", p1s.iter().map(|v| v * 1e3).collect::<Vec<_>>()),
    )];
    let mut metrics = serde_json::Map::new();
    metrics.insert("temperatures_k".into(), json!(temps));
    metrics.insert("rows".into(), serde_json::to_value(&run.result.rows).unwrap());
    Ok((checks, metrics))
}

/// Largest rise of `ys` over any window of `width` in `xs`, per unit x.
fn max_windowed_slope(xs: &[f64], ys: &[f64], width: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 0..xs.len() {
        let target = xs[i] + width;
        let j = xs.partition_point(|&x| x < target);
        if j >= xs.len() {
            break;
        }
        best = best.max((ys[j] - ys[i]) / (xs[j] - xs[i]));
    }
    best
}

fn fig9(root: &Path, opts: &SweepOptions) -> Result<(Vec<FigureCheck>, serde_json::Map<String, Value>)> {
    let spec = |p: f64| DocSpec {
        n_real: 2.4e6,
        power_w: p,
        temperature_k: 1.2e-6,
        us_over_kappa: 0.02,
        radiation_pressure: true,
        duration_s: 200e-6,
        ..DocSpec::default()
    };
    let sim = run_single(root, "run", doc(&spec(1.0)))?;
    let tr = &sim.trace;

    // mean momentum slope in the 140–160 μs window against the steepest
    // window of the same width anywhere in the run
    let window = 20e-6;
    let i0 = tr.t.partition_point(|&t| t < 140e-6);
    let i1 = tr.t.partition_point(|&t| t < 160e-6);
    let (end_slope, max_slope);
    if i1 < tr.len() && i0 < i1 {
        end_slope = (tr.mean_p[i1] - tr.mean_p[i0]) / (tr.t[i1] - tr.t[i0]);
        max_slope = max_windowed_slope(&tr.t, &tr.mean_p, window);
    } else {
        end_slope = f64::NAN;
        max_slope = f64::NAN;
    }
    let ratio = end_slope / max_slope;
    let mut checks = Vec::new();
    checks.push(FigureCheck::new(
        "mean_p_saturates",
        ratio.is_finite() && ratio < 0.2,
        format!("d⟨p⟩/dt over 140–160 μs is {ratio:.3} of the run maximum (need < 0.2)"),
    ));

    let powers = [0.25, 0.5, 1.0, 2.0];
    let p_run = run_named_sweep(root, "p", doc(&spec(1.0)), "pump.power_w", &powers, opts)?;
    let finals: Vec<f64> = p_run
        .result
        .rows
        .iter()
        .filter_map(|r| r.mean_p_final)
        .collect();
    let monotone = finals.len() == powers.len() && finals.windows(2).all(|w| w[1] >= w[0]);
    checks.push(FigureCheck::new(
        "mean_p_nondecreasing_in_pump",
        monotone,
        format!("final ⟨p⟩/2ħk: {finals:?}"),
    ));

    let mut metrics = serde_json::Map::new();
    metrics.insert("saturation_ratio".into(), json!(ratio));
    metrics.insert("mean_p_final_by_power".into(), json!(finals));
    metrics.insert("rows_p".into(), serde_json::to_value(&p_run.result.rows).unwrap());
    Ok((checks, metrics))
}

fn fig10(root: &Path) -> Result<(Vec<FigureCheck>, serde_json::Map<String, Value>)> {
    let sim = run_single(
        root,
        "run",
        doc(&DocSpec {
            power_w: 1.0,
            n_real: 2e5,
            us_over_kappa: 0.005,
            jitter_eps: 1e-4,
            duration_s: 40e-6,
            decimation: 10,
            ..DocSpec::default()
        }),
    )?;
    let k = 2.0 * std::f64::consts::PI / 796.1e-9;
    let n_real = 2e5;
    let hist = momentum_histogram(&sim.final_state.p, n_real, k);
    let mass = 1.44316e-25;
    let tof = tof_profile(
        &sim.final_state.p,
        n_real,
        mass,
        10e-3,
        TOF_SIGMA_X_DEFAULT,
        None,
    )?;
    write_json(&root.join("run").join("histogram.json"), &hist)?;
    write_json(&root.join("run").join("tof.json"), &tof)?;

    let w0 = hist.weight_at(0) / n_real;
    let pos: f64 = hist
        .bins
        .iter()
        .zip(&hist.weights)
        .filter(|(&n, _)| n > 0)
        .map(|(_, &w)| w)
        .sum();
    let neg: f64 = hist
        .bins
        .iter()
        .zip(&hist.weights)
        .filter(|(&n, _)| n < 0)
        .map(|(_, &w)| w)
        .sum();
    let wm1 = hist.weight_at(-1);

    let checks = vec![
        FigureCheck::new(
            "zero_state_depopulated",
            w0 < 0.5,
            format!("remaining |p=0⟩ fraction {w0:.3} (need < 0.5)"),
        ),
        FigureCheck::new(
            "shift_to_positive_momentum",
            pos > neg,
            format!("weight n>0: {pos:.0}, n<0: {neg:.0}"),
        ),
        FigureCheck::new(
            "negative_order_populated",
            wm1 > 0.0,
            format!("|p=−1⟩ weight {wm1:.0}"),
        ),
    ];
    let mut metrics = serde_json::Map::new();
    metrics.insert("histogram".into(), serde_json::to_value(&hist).unwrap());
    Ok((checks, metrics))
}

/// Run one figure study into `out_dir`. The bundle's `passed` drives the
/// repro exit code.
pub fn reproduce_figure(tag: &str, out_dir: &Path, workers: Option<usize>) -> Result<FigureBundle> {
    let opts = SweepOptions {
        check_dt: false,
        workers,
    };
    ensure_dir(out_dir)?;
    let (checks, metrics) = match tag {
        "fig3" => fig3(out_dir)?,
        "fig4" => fig4(out_dir, &opts)?,
        "fig5" => fig5(out_dir, &opts)?,
        "fig7a" => fig7a(out_dir, &opts)?,
        "fig7b" => fig7b(out_dir, &opts)?,
        "fig8" => fig8(out_dir, &opts)?,
        "fig9" => fig9(out_dir, &opts)?,
        "fig10" => fig10(out_dir)?,
        other => return Err(CarlError::UnknownTag(other.to_string())),
    };
    let bundle = FigureBundle {
        tag: tag.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
        metrics,
    };
    write_json(&out_dir.join("summary.json"), &bundle)?;
    Ok(bundle)
}

/// Directory bundles double as regression fixtures: rerunning the analysis on
/// an emitted trace must reproduce the emitted numbers exactly.
pub fn reanalyze_point(dir: &Path) -> Result<PeakSet> {
    let trace = crate::observables::Trace::read_csv_file(&dir.join("trace.csv"))?;
    find_peaks(&trace, PEAK_WINDOW_DEFAULT, PEAK_THRESHOLD_DEFAULT)
}
