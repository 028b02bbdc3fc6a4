//! Simulation drivers: `run`, `convergence`, and `check-config`.
//!
//! One simulation per call; intra-step parallelism only. The thread count
//! comes from the caller (CLI flag), the `LANDAU_THREADS` environment
//! variable, or rayon's default, in that order of precedence; because every
//! reduction order is fixed, it changes wall-clock time and nothing else.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::analytic::{bkw_density, predict_equilibrium};
use crate::config::ScenarioConfig;
use crate::diagnostics::{error_norms, record, total_moments};
use crate::error::{Error, Result};
use crate::integrate::{integrate, StepControl};
use crate::model::{MomentRecord, SystemState};
use crate::output::{format_float, write_density_grid, write_snapshot, DiagnosticsWriter};
use crate::scenario::{build_initial, with_resolution, SimulationSetup};
use crate::score::blob_density;

/// Environment variable selecting the worker thread count; a `--threads`
/// flag overrides it.
pub const THREADS_ENV: &str = "LANDAU_THREADS";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Override of the configured output directory.
    pub out_dir: Option<PathBuf>,
    /// Worker threads; `None` falls back to `LANDAU_THREADS`, then to all cores.
    pub threads: Option<usize>,
}

/// Thread count resolved against the environment.
pub fn resolve_threads(cli: Option<usize>) -> Option<usize> {
    cli.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()))
}

fn install_pool<T>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T>
where
    T: Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Validation(vec![format!("thread pool: {e}")]))?;
    pool.install(f)
}

#[derive(Debug, Clone, Serialize)]
pub struct SpeciesSummary {
    pub label: String,
    pub mass: f64,
    pub grid_n: usize,
    pub half_width: f64,
    pub mesh_size: f64,
    pub epsilon: f64,
    pub mass_epsilon: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftSummary {
    /// Per-species weights and number densities compare bitwise equal.
    pub mass_exact: bool,
    pub momentum_abs: f64,
    /// Momentum drift over `sum_i m_i sum_p w_p |v_p|` at t = 0.
    pub momentum_rel: f64,
    pub energy_rel: f64,
    pub entropy_initial: f64,
    pub entropy_final: f64,
    /// Largest entropy increase between consecutive recorded rows
    /// (nonpositive when the series is monotone).
    pub entropy_max_increase: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpeciesFinal {
    pub label: String,
    pub number_density: f64,
    pub bulk_velocity: Vec<f64>,
    pub temperature: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumSummary {
    pub bulk_velocity: Vec<f64>,
    pub temperature: f64,
    pub species_independent: bool,
}

/// Run metadata written to `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub dim: usize,
    pub scheme: String,
    pub dt: f64,
    pub t_final: f64,
    pub steps: usize,
    pub recorded_rows: usize,
    pub wall_clock_sec: f64,
    pub gamma: f64,
    pub species: Vec<SpeciesSummary>,
    /// Common beta value when the scenario uses exact-solution initial data.
    pub beta: Option<f64>,
    pub predicted_equilibrium: EquilibriumSummary,
    pub drift: DriftSummary,
    pub final_species: Vec<SpeciesFinal>,
    pub final_temperature: f64,
    pub final_entropy: f64,
}

/// Everything a caller may want back from a run; the files on disk carry the
/// same data.
#[derive(Debug)]
pub struct RunResult {
    pub summary: RunSummary,
    /// Recorded (step, moments) rows, exactly the diagnostics.csv contents.
    pub records: Vec<(usize, MomentRecord)>,
    pub final_state: SystemState,
    pub setup: SimulationSetup,
    pub out_dir: PathBuf,
}

fn momentum_scale(state: &SystemState) -> f64 {
    let mut scale = 0.0;
    for (spec, ens) in state.species.iter().zip(&state.ensembles) {
        for (w, v) in ens.weights.iter().zip(&ens.velocities) {
            scale += spec.mass * w * v.norm();
        }
    }
    scale
}

fn snapshot_tag(time: f64) -> String {
    // Short stable tag for filenames.
    format!("{time}").replace('.', "p").replace('-', "m")
}

fn write_state_snapshot(
    dir: &Path,
    state: &SystemState,
    grids: &[crate::score::QuadratureGrid],
    time: f64,
) -> Result<()> {
    for ((spec, ens), grid) in state.species.iter().zip(&state.ensembles).zip(grids) {
        let tag = snapshot_tag(time);
        let particles = dir.join(format!("snapshot_{}_t{}.csv", spec.label, tag));
        write_snapshot(&particles, ens, state.dim)?;
        let density = blob_density(ens, spec, state.dim, &grid.centers);
        let density_path = dir.join(format!("density_{}_t{}.csv", spec.label, tag));
        write_density_grid(&density_path, grid, &density)?;
    }
    Ok(())
}

/// Run a scenario to `t_final`, writing `diagnostics.csv`, snapshot and
/// density CSVs at the requested times, and `summary.json`.
pub fn run(config: &ScenarioConfig, options: &RunOptions) -> Result<RunResult> {
    let out_dir = options
        .out_dir
        .clone()
        .unwrap_or_else(|| config.output.directory.clone());
    std::fs::create_dir_all(&out_dir).map_err(|source| Error::Output {
        path: out_dir.clone(),
        source,
    })?;
    install_pool(options.threads, || run_in_pool(config, &out_dir))
}

fn run_in_pool(config: &ScenarioConfig, out_dir: &Path) -> Result<RunResult> {
    let started = Instant::now();
    let setup = build_initial(config)?;
    let state0 = &setup.state;
    let equilibrium = predict_equilibrium(state0)?;
    let t_final = config.time.t_final;

    let control = StepControl {
        dt: config.time.dt,
        scheme: config.time.scheme,
        fp_tolerance: config.time.fp_tolerance,
        fp_max_iters: config.time.fp_max_iters,
        euler_predictor: false,
    };

    let mut writer = DiagnosticsWriter::create(
        &out_dir.join("diagnostics.csv"),
        config.dim,
        config.species.len(),
    )?;
    let initial_record = record(state0, &setup.grids)?;
    writer.write_record(0, &initial_record)?;
    let mut records: Vec<(usize, MomentRecord)> = vec![(0, initial_record.clone())];

    // Snapshot times, earliest first; each fires at the first recorded step
    // whose time has reached it.
    let mut pending: Vec<f64> = config.output.snapshot_times.clone();
    pending.sort_by(f64::total_cmp);
    let tiny = 1e-9 * t_final.abs().max(1.0);
    while let Some(&next) = pending.first() {
        if next <= state0.time + tiny {
            write_state_snapshot(out_dir, state0, &setup.grids, next)?;
            pending.remove(0);
        } else {
            break;
        }
    }

    let every = config.output.diagnostics_every;
    let mut step_count = 0usize;
    let final_state = integrate(state0, &setup.grids, &control, t_final, |step, state| {
        step_count = step;
        let is_final = (t_final - state.time).abs() <= tiny;
        if step % every == 0 || is_final {
            let row = record(state, &setup.grids)?;
            writer.write_record(step, &row)?;
            records.push((step, row));
        }
        while let Some(&next) = pending.first() {
            if next <= state.time + tiny {
                write_state_snapshot(out_dir, state, &setup.grids, next)?;
                pending.remove(0);
            } else {
                break;
            }
        }
        Ok(())
    })?;
    writer.finish()?;

    let final_record = records.last().expect("at least the initial row").1.clone();
    let mass_exact = state0
        .ensembles
        .iter()
        .zip(&final_state.ensembles)
        .all(|(a, b)| a.weights == b.weights)
        && records.iter().all(|(_, r)| {
            r.per_species
                .iter()
                .zip(&initial_record.per_species)
                .all(|(a, b)| a.number_density == b.number_density)
        });
    let momentum_abs = (final_record.totals.momentum - initial_record.totals.momentum).norm();
    let scale = momentum_scale(state0).max(f64::MIN_POSITIVE);
    let energy_rel = (final_record.totals.kinetic_energy - initial_record.totals.kinetic_energy)
        .abs()
        / initial_record.totals.kinetic_energy.abs();
    let mut entropy_max_increase = f64::NEG_INFINITY;
    for pair in records.windows(2) {
        entropy_max_increase =
            entropy_max_increase.max(pair[1].1.totals.entropy - pair[0].1.totals.entropy);
    }
    if !entropy_max_increase.is_finite() {
        entropy_max_increase = 0.0;
    }

    let species_summaries: Vec<SpeciesSummary> = setup
        .state
        .species
        .iter()
        .map(|s| SpeciesSummary {
            label: s.label.clone(),
            mass: s.mass,
            grid_n: s.grid_n,
            half_width: s.half_width,
            mesh_size: s.mesh_size(),
            epsilon: s.epsilon,
            mass_epsilon: s.mass * s.epsilon,
        })
        .collect();

    let summary = RunSummary {
        dim: config.dim,
        scheme: config.time.scheme.name().to_string(),
        dt: config.time.dt,
        t_final,
        steps: step_count,
        recorded_rows: records.len(),
        wall_clock_sec: started.elapsed().as_secs_f64(),
        gamma: config.kernel.gamma,
        species: species_summaries,
        beta: setup.bkw.as_ref().map(|b| b.beta),
        predicted_equilibrium: EquilibriumSummary {
            bulk_velocity: equilibrium.bulk_velocity.components(config.dim)[..config.dim].to_vec(),
            temperature: equilibrium.temperature,
            species_independent: equilibrium.species_independent,
        },
        drift: DriftSummary {
            mass_exact,
            momentum_abs,
            momentum_rel: momentum_abs / scale,
            energy_rel,
            entropy_initial: initial_record.totals.entropy,
            entropy_final: final_record.totals.entropy,
            entropy_max_increase,
        },
        final_species: final_record
            .per_species
            .iter()
            .zip(&setup.state.species)
            .map(|(m, s)| SpeciesFinal {
                label: s.label.clone(),
                number_density: m.number_density,
                bulk_velocity: m.bulk_velocity.components(config.dim)[..config.dim].to_vec(),
                temperature: m.temperature,
            })
            .collect(),
        final_temperature: final_record.totals.temperature,
        final_entropy: final_record.totals.entropy,
    };

    let summary_path = out_dir.join("summary.json");
    let json = serde_json::to_string_pretty(&summary).expect("summary serialization cannot fail");
    std::fs::write(&summary_path, json).map_err(|source| Error::Output {
        path: summary_path,
        source,
    })?;

    Ok(RunResult {
        summary,
        records,
        final_state,
        setup,
        out_dir: out_dir.to_path_buf(),
    })
}

/// One row of a convergence study: one resolution, one species.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceEntry {
    pub n: usize,
    pub species: usize,
    pub h: f64,
    pub rel_l1: f64,
    pub rel_l2: f64,
    pub rel_linf: f64,
}

/// Fitted order (log-error vs log-h slope) per species and norm; NaN when
/// only one resolution was run.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceOrder {
    pub species: usize,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub entries: Vec<ConvergenceEntry>,
    pub orders: Vec<ConvergenceOrder>,
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 {
        return f64::NAN;
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Convergence study against the exact solution: integrate the scenario at
/// each resolution, measure relative errors on the species grids at
/// `t_final`, and fit the order per species and norm. Writes `errors.csv`.
pub fn convergence(
    config: &ScenarioConfig,
    n_list: &[usize],
    options: &RunOptions,
) -> Result<ConvergenceStudy> {
    if n_list.is_empty() {
        return Err(Error::Validation(vec![
            "convergence study needs at least one resolution".into(),
        ]));
    }
    // The exact solution must exist; this also surfaces beta mismatches
    // before any integration starts.
    let bkw = crate::scenario::bkw_params(config)?.ok_or_else(|| {
        Error::Validation(vec![
            "convergence studies require bkw initial data for every species".into(),
        ])
    })?;
    let out_dir = options
        .out_dir
        .clone()
        .unwrap_or_else(|| config.output.directory.clone());
    std::fs::create_dir_all(&out_dir).map_err(|source| Error::Output {
        path: out_dir.clone(),
        source,
    })?;

    install_pool(options.threads, || {
        let t_final = config.time.t_final;
        let control = StepControl {
            dt: config.time.dt,
            scheme: config.time.scheme,
            fp_tolerance: config.time.fp_tolerance,
            fp_max_iters: config.time.fp_max_iters,
            euler_predictor: false,
        };
        let mut entries = Vec::new();
        for &n in n_list {
            let scaled = with_resolution(config, n);
            let setup = build_initial(&scaled)?;
            let final_state =
                integrate(&setup.state, &setup.grids, &control, t_final, |_, _| Ok(()))?;
            for (i, ((spec, ens), grid)) in final_state
                .species
                .iter()
                .zip(&final_state.ensembles)
                .zip(&setup.grids)
                .enumerate()
            {
                let norms = error_norms(ens, spec, grid, |v| bkw_density(t_final, v, i, &bkw));
                entries.push(ConvergenceEntry {
                    n,
                    species: i,
                    h: spec.mesh_size(),
                    rel_l1: norms.rel_l1,
                    rel_l2: norms.rel_l2,
                    rel_linf: norms.rel_linf,
                });
            }
        }

        let species_count = config.species.len();
        let mut orders = Vec::new();
        for i in 0..species_count {
            let pts = |pick: fn(&ConvergenceEntry) -> f64| -> Vec<(f64, f64)> {
                entries
                    .iter()
                    .filter(|e| e.species == i)
                    .map(|e| (e.h.ln(), pick(e).ln()))
                    .collect()
            };
            orders.push(ConvergenceOrder {
                species: i,
                l1: fit_slope(&pts(|e| e.rel_l1)),
                l2: fit_slope(&pts(|e| e.rel_l2)),
                linf: fit_slope(&pts(|e| e.rel_linf)),
            });
        }

        let study = ConvergenceStudy { entries, orders };
        write_errors_csv(&out_dir.join("errors.csv"), &study)?;
        Ok(study)
    })
}

fn write_errors_csv(path: &Path, study: &ConvergenceStudy) -> Result<()> {
    use std::io::Write;
    let file = std::fs::File::create(path).map_err(|source| Error::Output {
        path: path.to_path_buf(),
        source,
    })?;
    let mut writer = std::io::BufWriter::new(file);
    let err = |source| Error::Output {
        path: path.to_path_buf(),
        source,
    };
    writer
        .write_all(b"kind,n,species,h,rel_l1,rel_l2,rel_linf\n")
        .map_err(err)?;
    for e in &study.entries {
        writeln!(
            writer,
            "error,{},{},{},{},{},{}",
            e.n,
            e.species + 1,
            format_float(e.h),
            format_float(e.rel_l1),
            format_float(e.rel_l2),
            format_float(e.rel_linf)
        )
        .map_err(err)?;
    }
    for o in &study.orders {
        writeln!(
            writer,
            "order,,{},,{},{},{}",
            o.species + 1,
            format_float(o.l1),
            format_float(o.l2),
            format_float(o.linf)
        )
        .map_err(err)?;
    }
    writer.flush().map_err(err)
}

/// Human-readable configuration report: derived mesh sizes, regularization
/// parameters and their mass-weighted products, the beta value for
/// exact-solution scenarios, and the predicted equilibrium.
pub fn check_config(config: &ScenarioConfig) -> Result<String> {
    let setup = build_initial(config)?;
    let equilibrium = predict_equilibrium(&setup.state)?;
    let moments = total_moments(&setup.state)?;

    let mut report = String::new();
    report.push_str(&format!(
        "dimension: {}\nkernel exponent gamma: {}\nscheme: {} (dt = {}, t_final = {})\n",
        config.dim,
        config.kernel.gamma,
        config.time.scheme.name(),
        config.time.dt,
        config.time.t_final,
    ));
    report.push_str(&format!(
        "species: {} ({} particles total)\n",
        config.species.len(),
        setup.state.total_particles()
    ));
    for (spec, ens) in setup.state.species.iter().zip(&setup.state.ensembles) {
        report.push_str(&format!(
            "  {}: m = {}, L = {:.12}, n = {}, h = {:.12}, eps = {:.12e}, m*eps = {:.12e}, \
             number density = {:.6}\n",
            spec.label,
            spec.mass,
            spec.half_width,
            spec.grid_n,
            spec.mesh_size(),
            spec.epsilon,
            spec.mass * spec.epsilon,
            ens.total_weight(),
        ));
    }
    let products: Vec<f64> = setup
        .state
        .species
        .iter()
        .map(|s| s.mass * s.epsilon)
        .collect();
    if products.len() > 1 {
        let max = products.iter().cloned().fold(f64::MIN, f64::max);
        let min = products.iter().cloned().fold(f64::MAX, f64::min);
        report.push_str(&format!(
            "m*eps relative spread: {:.3e}\n",
            (max - min) / max
        ));
    }
    if let Some(bkw) = &setup.bkw {
        report.push_str(&format!("beta: {}\n", bkw.beta));
    }
    report.push_str(&format!(
        "initial totals: mass = {:.12}, momentum = {:?}, T = {:.12}\n",
        moments.totals.mass_density,
        &moments.totals.momentum.components(config.dim)[..config.dim],
        moments.totals.temperature,
    ));
    report.push_str(&format!(
        "predicted equilibrium: u = {:?}, T = {:.12}, species-independent temperature: {}\n",
        &equilibrium.bulk_velocity.components(config.dim)[..config.dim],
        equilibrium.temperature,
        equilibrium.species_independent,
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_fits_a_plain_line() {
        let pts = [(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)];
        assert!((fit_slope(&pts) - 2.0).abs() <= 1e-12);
        assert!(fit_slope(&pts[..1]).is_nan());
    }

    #[test]
    fn threads_resolution_prefers_the_flag() {
        std::env::remove_var(THREADS_ENV);
        assert_eq!(resolve_threads(Some(3)), Some(3));
        assert_eq!(resolve_threads(None), None);
        std::env::set_var(THREADS_ENV, "2");
        assert_eq!(resolve_threads(None), Some(2));
        assert_eq!(resolve_threads(Some(5)), Some(5));
        std::env::remove_var(THREADS_ENV);
    }
}
