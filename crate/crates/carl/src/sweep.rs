//! Parameter sweeps: patch one numeric leaf of a scenario document, run each
//! point, analyze, and assemble ordered result rows.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::{simulate, SimOutput};
use crate::error::{CarlError, Result};
use crate::gain;
use crate::observables::{find_peaks, PEAK_THRESHOLD_DEFAULT, PEAK_WINDOW_DEFAULT};
use crate::scenario::ScenarioFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedPolicy {
    /// Every point runs with the base scenario's seed; only the swept
    /// parameter varies.
    Fixed,
    /// Point i runs with seed + i, for statistical-spread studies.
    Incrementing,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// Base scenario document (the JSON value, so any numeric leaf can be
    /// addressed).
    pub base: Value,
    /// Directory for resolving species paths.
    pub base_dir: Option<PathBuf>,
    /// Dot-notation path into the document, e.g. `atoms.n_real`.
    pub param_path: String,
    pub values: Vec<f64>,
    pub seed_policy: SeedPolicy,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Re-run each point at dt/2 and flag rows whose first peak moves < 1%.
    pub check_dt: bool,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub p_minus_1: Option<f64>,
    pub delta_t: Option<f64>,
    pub delta_t_12: Option<f64>,
    pub mean_p_final: Option<f64>,
    pub cavity_regime: Option<String>,
    pub quantumness: Option<String>,
    pub converged_dt: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub param_path: String,
    pub rows: Vec<SweepRow>,
}

/// One sweep point's patched document and, on success, its simulation output.
pub struct SweepPoint {
    pub doc: Value,
    pub sim: Option<SimOutput>,
}

pub struct SweepRun {
    pub result: SweepResult,
    pub points: Vec<SweepPoint>,
}

/// Set the numeric leaf at `path`. Integer leaves stay integers when the new
/// value is integral (so counts and seeds can be swept).
fn set_numeric_leaf(doc: &mut Value, path: &str, value: f64) -> Result<()> {
    let parts: Vec<&str> = path.split('.').collect();
    let mut cur = doc;
    for (i, part) in parts.iter().enumerate() {
        let obj = cur.as_object_mut().ok_or_else(|| {
            CarlError::Validation(format!("sweep path `{path}`: `{part}` is not an object field"))
        })?;
        let entry = obj.get_mut(*part).ok_or_else(|| {
            CarlError::Validation(format!("sweep path `{path}`: key `{part}` not found"))
        })?;
        if i == parts.len() - 1 {
            if !entry.is_number() {
                return Err(CarlError::Validation(format!(
                    "sweep path `{path}` does not resolve to a numeric leaf"
                )));
            }
            let keep_integer = (entry.is_u64() || entry.is_i64()) && value.fract() == 0.0;
            *entry = if keep_integer && value >= 0.0 {
                Value::from(value as u64)
            } else if keep_integer {
                Value::from(value as i64)
            } else {
                serde_json::Number::from_f64(value)
                    .map(Value::Number)
                    .ok_or_else(|| {
                        CarlError::Validation(format!("non-finite sweep value {value}"))
                    })?
            };
            return Ok(());
        }
        cur = entry;
    }
    unreachable!("empty sweep path rejected above")
}

fn run_point(spec: &SweepSpec, index: usize, value: f64, opts: &SweepOptions) -> (SweepRow, SweepPoint) {
    let mut row = SweepRow {
        value,
        p_minus_1: None,
        delta_t: None,
        delta_t_12: None,
        mean_p_final: None,
        cavity_regime: None,
        quantumness: None,
        converged_dt: None,
        error: None,
    };

    let mut doc = spec.base.clone();
    let prep = (|| -> Result<ScenarioFile> {
        set_numeric_leaf(&mut doc, &spec.param_path, value)?;
        if spec.seed_policy == SeedPolicy::Incrementing {
            let base_seed = doc
                .pointer("/atoms/seed")
                .and_then(Value::as_u64)
                .unwrap_or(0);
            set_numeric_leaf(&mut doc, "atoms.seed", (base_seed + index as u64) as f64)?;
        }
        let file: ScenarioFile =
            serde_json::from_value(doc.clone()).map_err(|source| CarlError::Parse {
                path: format!("sweep point {index}"),
                source,
            })?;
        Ok(file)
    })();

    let file = match prep {
        Ok(f) => f,
        Err(e) => {
            row.error = Some(e.to_string());
            return (row, SweepPoint { doc, sim: None });
        }
    };

    let sim = (|| -> Result<SimOutput> {
        let scen = file.build(spec.base_dir.as_deref())?;
        let out = simulate(&scen)?;
        let peaks = find_peaks(&out.trace, PEAK_WINDOW_DEFAULT, PEAK_THRESHOLD_DEFAULT)?;
        row.p_minus_1 = peaks.p_minus_1;
        row.delta_t = peaks.delta_t;
        row.delta_t_12 = peaks.delta_t_12;
        row.mean_p_final = out.trace.mean_p.last().copied();
        if scen.n_real > 0.0 {
            if let Ok(report) = gain::report_for(&scen.params, scen.n_real, None) {
                row.cavity_regime = Some(format!("{:?}", report.regime.0));
                row.quantumness = Some(format!("{:?}", report.regime.1));
            }
        }
        if opts.check_dt {
            let mut half = file.clone();
            half.integrator.dt_s /= 2.0;
            let scen_half = half.build(spec.base_dir.as_deref())?;
            let out_half = simulate(&scen_half)?;
            let peaks_half =
                find_peaks(&out_half.trace, PEAK_WINDOW_DEFAULT, PEAK_THRESHOLD_DEFAULT)?;
            row.converged_dt = match (peaks.p_minus_1, peaks_half.p_minus_1) {
                (Some(a), Some(b)) if a > 0.0 => Some(((a - b) / a).abs() < 0.01),
                _ => None,
            };
        }
        Ok(out)
    })();

    match sim {
        Ok(out) => (row, SweepPoint { doc, sim: Some(out) }),
        Err(e) => {
            row.error = Some(e.to_string());
            (row, SweepPoint { doc, sim: None })
        }
    }
}

/// Run every sweep point (concurrently when a pool is available); rows are
/// keyed by point index, never by completion order.
pub fn run_sweep(spec: &SweepSpec, opts: &SweepOptions) -> Result<SweepRun> {
    if spec.values.len() < 2 {
        return Err(CarlError::Validation("sweep needs at least 2 values".into()));
    }
    // fail fast on an unresolvable path
    let mut probe = spec.base.clone();
    set_numeric_leaf(&mut probe, &spec.param_path, spec.values[0])?;

    let work = |(i, &v): (usize, &f64)| run_point(spec, i, v, opts);
    let pairs: Vec<(SweepRow, SweepPoint)> = match opts.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| CarlError::Validation(format!("worker pool: {e}")))?;
            pool.install(|| spec.values.par_iter().enumerate().map(work).collect())
        }
        None => spec.values.par_iter().enumerate().map(work).collect(),
    };

    let mut rows = Vec::with_capacity(pairs.len());
    let mut points = Vec::with_capacity(pairs.len());
    for (row, point) in pairs {
        rows.push(row);
        points.push(point);
    }
    Ok(SweepRun {
        result: SweepResult {
            param_path: spec.param_path.clone(),
            rows,
        },
        points,
    })
}

impl SweepResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io_err = |e: csv::Error| CarlError::TraceFormat(e.to_string());
        w.write_record([
            "value",
            "p_minus_1_w",
            "delta_t_s",
            "delta_t_12_s",
            "mean_p_final_recoil",
            "cavity_regime",
            "quantumness",
            "converged_dt",
            "error",
        ])
        .map_err(io_err)?;
        let fmt_opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:e}"));
        for r in &self.rows {
            w.write_record([
                format!("{:e}", r.value),
                fmt_opt(r.p_minus_1),
                fmt_opt(r.delta_t),
                fmt_opt(r.delta_t_12),
                fmt_opt(r.mean_p_final),
                r.cavity_regime.clone().unwrap_or_default(),
                r.quantumness.clone().unwrap_or_default(),
                r.converged_dt.map_or(String::new(), |b| b.to_string()),
                r.error.clone().unwrap_or_default(),
            ])
            .map_err(io_err)?;
        }
        w.flush().map_err(|e| CarlError::TraceFormat(e.to_string()))?;
        Ok(())
    }
}
