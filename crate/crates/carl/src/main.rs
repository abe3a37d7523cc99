//! Command-line front end.
//!
//! Exit codes: 0 success, 2 validation or usage error, 3 numerical
//! divergence, 4 trend-check failure in repro mode.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use carl::dynamics::simulate;
use carl::error::{CarlError, Result};
use carl::gain::{self, CondensateGeometry};
use carl::observables::{
    find_peaks, momentum_histogram, tof_profile, SavedState, Trace, PEAK_THRESHOLD_DEFAULT,
    PEAK_WINDOW_DEFAULT, TOF_SIGMA_X_DEFAULT,
};
use carl::repro::{reproduce_figure, write_run_outputs, FIGURE_TAGS};
use carl::scenario::{load_scenario, load_scenario_file};
use carl::sweep::{run_sweep, SeedPolicy, SweepOptions, SweepSpec};

#[derive(Parser)]
#[command(
    name = "carl",
    about = "Collective atomic recoil lasing simulator for a pumped ring cavity",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeedPolicyArg {
    Fixed,
    Incrementing,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write trace.csv, final_state.json and
    /// analysis.json into the output directory.
    Run {
        scenario: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Sweep one numeric scenario parameter (dot path, e.g. atoms.n_real).
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated values for the swept parameter.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "fixed")]
        seed_policy: SeedPolicyArg,
        /// Re-run each point at dt/2 and flag converged rows.
        #[arg(long)]
        check_dt: bool,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Print the gain/regime report for a scenario as JSON.
    Regime {
        scenario: PathBuf,
        /// Condensate long-axis length (m); together with --condensate-waist
        /// adds the superradiant gain to the report.
        #[arg(long)]
        condensate_length: Option<f64>,
        /// Condensate radial waist (m).
        #[arg(long)]
        condensate_waist: Option<f64>,
    },
    /// Extract probe pulses from a trace CSV and print the peak set as JSON.
    Analyze {
        trace: PathBuf,
        #[arg(long, default_value_t = PEAK_WINDOW_DEFAULT)]
        window: usize,
        #[arg(long, default_value_t = PEAK_THRESHOLD_DEFAULT)]
        threshold: f64,
    },
    /// Momentum histogram and time-of-flight profile of a saved final state.
    Tof {
        state: PathBuf,
        /// Ballistic expansion time (s).
        #[arg(long)]
        t_tof: f64,
        /// Gaussian imaging width (m).
        #[arg(long, default_value_t = TOF_SIGMA_X_DEFAULT)]
        sigma_x: f64,
        #[arg(long)]
        x_min: Option<f64>,
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Reproduce one of the built-in figure studies (fig3, fig4, fig5,
    /// fig7a, fig7b, fig8, fig9, fig10).
    Repro {
        tag: String,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            e.exit_code()
        }
    });
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CarlError::Validation(format!("serialize output: {e}")))?;
    println!("{text}");
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CarlError::io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|source| CarlError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run { scenario, output } => {
            let scen = load_scenario(&scenario)?;
            let sim = simulate(&scen)?;
            write_run_outputs(&output, &scen, &sim)?;
            println!(
                "wrote {} samples to {}",
                sim.trace.len(),
                output.display()
            );
            Ok(0)
        }
        Command::Sweep {
            scenario,
            param,
            values,
            output,
            seed_policy,
            check_dt,
            workers,
        } => {
            let (file, base_dir) = load_scenario_file(&scenario)?;
            let base = serde_json::to_value(&file)
                .map_err(|e| CarlError::Validation(format!("serialize scenario: {e}")))?;
            let spec = SweepSpec {
                base,
                base_dir,
                param_path: param,
                values,
                seed_policy: match seed_policy {
                    SeedPolicyArg::Fixed => SeedPolicy::Fixed,
                    SeedPolicyArg::Incrementing => SeedPolicy::Incrementing,
                },
            };
            let run = run_sweep(&spec, &SweepOptions { check_dt, workers })?;
            std::fs::create_dir_all(&output)
                .map_err(|e| CarlError::io(output.display().to_string(), e))?;
            for (i, point) in run.points.iter().enumerate() {
                let dir = output.join(format!("point_{i:03}"));
                std::fs::create_dir_all(&dir)
                    .map_err(|e| CarlError::io(dir.display().to_string(), e))?;
                std::fs::write(
                    dir.join("scenario.json"),
                    serde_json::to_string_pretty(&point.doc).unwrap_or_default(),
                )
                .map_err(|e| CarlError::io(dir.display().to_string(), e))?;
                if let Some(sim) = &point.sim {
                    sim.trace.write_csv_file(&dir.join("trace.csv"))?;
                }
            }
            let json_path = output.join("summary.json");
            std::fs::write(
                &json_path,
                serde_json::to_string_pretty(&run.result)
                    .map_err(|e| CarlError::Validation(format!("serialize summary: {e}")))?,
            )
            .map_err(|e| CarlError::io(json_path.display().to_string(), e))?;
            let csv_path = output.join("summary.csv");
            let f = std::fs::File::create(&csv_path)
                .map_err(|e| CarlError::io(csv_path.display().to_string(), e))?;
            run.result.write_csv(std::io::BufWriter::new(f))?;

            let failed = run.result.rows.iter().filter(|r| r.error.is_some()).count();
            println!(
                "swept {} over {} points ({failed} failed) -> {}",
                run.result.param_path,
                run.result.rows.len(),
                output.display()
            );
            Ok(0)
        }
        Command::Regime {
            scenario,
            condensate_length,
            condensate_waist,
        } => {
            let scen = load_scenario(&scenario)?;
            let condensate = match (condensate_length, condensate_waist) {
                (Some(length_m), Some(waist_m)) => Some(CondensateGeometry {
                    length_m,
                    waist_m,
                    atom_number: scen.n_real,
                }),
                (None, None) => None,
                _ => {
                    return Err(CarlError::Validation(
                        "--condensate-length and --condensate-waist must be given together".into(),
                    ))
                }
            };
            let report = gain::report_for(&scen.params, scen.n_real, condensate.as_ref())?;
            print_json(&report)?;
            Ok(0)
        }
        Command::Analyze {
            trace,
            window,
            threshold,
        } => {
            let tr = Trace::read_csv_file(&trace)?;
            let peaks = find_peaks(&tr, window, threshold)?;
            print_json(&peaks)?;
            Ok(0)
        }
        Command::Tof {
            state,
            t_tof,
            sigma_x,
            x_min,
            x_max,
            points,
        } => {
            let saved: SavedState = read_json(&state)?;
            let k = 2.0 * std::f64::consts::PI / saved.wavelength_m;
            let grid = match (x_min, x_max, points) {
                (Some(a), Some(b), Some(n)) => Some((a, b, n)),
                (None, None, None) => None,
                _ => {
                    return Err(CarlError::Validation(
                        "--x-min, --x-max and --points must be given together".into(),
                    ))
                }
            };
            let histogram = momentum_histogram(&saved.momenta_kg_m_s, saved.n_real, k);
            let profile = tof_profile(
                &saved.momenta_kg_m_s,
                saved.n_real,
                saved.mass_kg,
                t_tof,
                sigma_x,
                grid,
            )?;
            print_json(&serde_json::json!({
                "histogram": histogram,
                "profile": profile,
            }))?;
            Ok(0)
        }
        Command::Repro {
            tag,
            output,
            workers,
        } => {
            if !FIGURE_TAGS.contains(&tag.as_str()) {
                return Err(CarlError::UnknownTag(tag));
            }
            let bundle = reproduce_figure(&tag, &output, workers)?;
            for check in &bundle.checks {
                println!(
                    "[{}] {}: {}",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.name,
                    check.details
                );
            }
            if bundle.passed {
                println!("{tag}: all checks passed -> {}", output.display());
                Ok(0)
            } else {
                println!("{tag}: checks FAILED -> {}", output.display());
                Ok(4)
            }
        }
    }
}
