//! Time integration of the particle velocities.
//!
//! Forward Euler conserves mass and momentum exactly (up to rounding) and
//! energy to first order in the step size. The implicit midpoint rule also
//! conserves energy, up to the fixed-point stopping tolerance; it is solved
//! by fixed-point iteration, and failure to contract is surfaced as a hard
//! error rather than silently accepting a bad step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction::rhs;
use crate::model::SystemState;
use crate::score::QuadratureGrid;
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ForwardEuler,
    ImplicitMidpoint,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::ForwardEuler => "forward_euler",
            Scheme::ImplicitMidpoint => "implicit_midpoint",
        }
    }
}

/// Step-size and solver controls.
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub dt: f64,
    pub scheme: Scheme,
    /// Max-norm stopping tolerance of the fixed-point iteration.
    pub fp_tolerance: f64,
    pub fp_max_iters: usize,
    /// Start the fixed-point iteration from a forward Euler predictor
    /// instead of the current velocities.
    pub euler_predictor: bool,
}

impl StepControl {
    pub fn new(dt: f64, scheme: Scheme) -> Self {
        Self {
            dt,
            scheme,
            fp_tolerance: 1e-8,
            fp_max_iters: 200,
            euler_predictor: false,
        }
    }
}

fn advected(state: &SystemState, field: &[Vec<Vec3>], dt: f64) -> Vec<Vec<Vec3>> {
    state
        .ensembles
        .iter()
        .zip(field)
        .map(|(ens, dv)| {
            ens.velocities
                .iter()
                .zip(dv)
                .map(|(v, d)| *v + dt * *d)
                .collect()
        })
        .collect()
}

fn with_velocities(state: &SystemState, velocities: Vec<Vec<Vec3>>, time: f64) -> SystemState {
    let mut next = state.clone();
    for (ens, v) in next.ensembles.iter_mut().zip(velocities) {
        ens.velocities = v;
    }
    next.time = time;
    next
}

/// One forward Euler step. Weights are untouched; only velocities move.
pub fn step_forward_euler(
    state: &SystemState,
    grids: &[QuadratureGrid],
    dt: f64,
) -> Result<SystemState> {
    let field = rhs(state, grids)?;
    let velocities = advected(state, &field, dt);
    Ok(with_velocities(state, velocities, state.time + dt))
}

/// One implicit midpoint step, solved by fixed-point iteration starting from
/// the current velocities. Returns the new state and the iteration count.
pub fn step_implicit_midpoint(
    state: &SystemState,
    grids: &[QuadratureGrid],
    dt: f64,
    control: &StepControl,
) -> Result<(SystemState, usize)> {
    let mut candidate: Vec<Vec<Vec3>> = if control.euler_predictor {
        let field = rhs(state, grids)?;
        advected(state, &field, dt)
    } else {
        state
            .ensembles
            .iter()
            .map(|e| e.velocities.clone())
            .collect()
    };

    let mut residual = f64::INFINITY;
    for iteration in 1..=control.fp_max_iters {
        // Midpoint velocities (v_next + v_now) / 2.
        let midpoint: Vec<Vec<Vec3>> = state
            .ensembles
            .iter()
            .zip(&candidate)
            .map(|(ens, next)| {
                ens.velocities
                    .iter()
                    .zip(next)
                    .map(|(a, b)| 0.5 * (*a + *b))
                    .collect()
            })
            .collect();
        let mid_state = with_velocities(state, midpoint, state.time);
        let field = rhs(&mid_state, grids)?;
        let updated = advected(state, &field, dt);

        residual = 0.0;
        for (next, prev) in updated.iter().zip(&candidate) {
            for (a, b) in next.iter().zip(prev) {
                residual = residual.max((*a - *b).norm_inf());
            }
        }
        candidate = updated;
        if residual <= control.fp_tolerance {
            return Ok((
                with_velocities(state, candidate, state.time + dt),
                iteration,
            ));
        }
    }
    Err(Error::NonConvergence {
        iterations: control.fp_max_iters,
        residual,
    })
}

fn step(
    state: &SystemState,
    grids: &[QuadratureGrid],
    control: &StepControl,
    dt: f64,
) -> Result<SystemState> {
    match control.scheme {
        Scheme::ForwardEuler => step_forward_euler(state, grids, dt),
        Scheme::ImplicitMidpoint => {
            let control = StepControl { dt, ..*control };
            step_implicit_midpoint(state, grids, dt, &control).map(|(s, _)| s)
        }
    }
}

/// March from `state.time` to `t_final` in steps of `control.dt`, shortening
/// the final step to land exactly on `t_final`. The observer runs after
/// every step, in time order; the first failure aborts the run.
pub fn integrate<F>(
    state: &SystemState,
    grids: &[QuadratureGrid],
    control: &StepControl,
    t_final: f64,
    mut observer: F,
) -> Result<SystemState>
where
    F: FnMut(usize, &SystemState) -> Result<()>,
{
    assert!(
        t_final >= state.time,
        "t_final {} precedes state time {}",
        t_final,
        state.time
    );
    let start = state.time;
    let mut current = state.clone();
    let mut steps = 0usize;
    // Guard against a re-stepped sliver from accumulated rounding.
    let tiny = 1e-12 * t_final.abs().max(1.0);
    while t_final - current.time > tiny {
        let remaining = t_final - current.time;
        let dt = control.dt.min(remaining);
        let mut next = step(&current, grids, control, dt)?;
        steps += 1;
        next.time = if dt < control.dt {
            t_final
        } else {
            start + steps as f64 * control.dt
        };
        if t_final - next.time <= tiny {
            next.time = t_final;
        }
        current = next;
        observer(steps, &current)?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{bkw_density, BkwParams};
    use crate::diagnostics::total_moments;
    use crate::init::{build_grid, epsilon_from_h};
    use crate::model::{KernelSpec, ParticleEnsemble, SpeciesSpec};

    /// Two-species Maxwell-kernel state initialized from the exact solution,
    /// at an arbitrary per-axis resolution.
    fn bkw_example_state(n: usize) -> (SystemState, Vec<QuadratureGrid>) {
        let strength = vec![vec![0.125, 0.0625], vec![0.0625, 0.03125]];
        let params =
            BkwParams::new(vec![2.0, 1.0], vec![1.0, 1.0], strength.clone(), 0.5, 2).unwrap();
        let widths = [3.0, 4.0];
        let mut species = Vec::new();
        let mut ensembles = Vec::new();
        let mut grids = Vec::new();
        for i in 0..2 {
            let spec = SpeciesSpec {
                mass: params.masses[i],
                half_width: widths[i],
                center: Vec3::ZERO,
                grid_n: n,
                epsilon: epsilon_from_h(2.0 * widths[i] / n as f64, 0.64, 1.98),
                label: format!("species{}", i + 1),
            };
            let grid = build_grid(&spec, 2);
            let ens =
                crate::init::init_particles(|v| bkw_density(0.0, v, i, &params), &grid, &spec)
                    .unwrap();
            species.push(spec);
            ensembles.push(ens);
            grids.push(grid);
        }
        let state = SystemState {
            dim: 2,
            species,
            ensembles,
            kernel: KernelSpec {
                gamma: 0.0,
                strength,
            },
            time: 0.0,
        };
        (state, grids)
    }

    /// A one-particle species has no pair interactions at all: the field is
    /// identically zero.
    fn still_state() -> (SystemState, Vec<QuadratureGrid>) {
        let spec = SpeciesSpec {
            mass: 1.0,
            half_width: 1.0,
            center: Vec3::ZERO,
            grid_n: 2,
            epsilon: 0.3,
            label: "s".into(),
        };
        // Four particles all at the same location with one carrying weight:
        // every pair is coincident, so the field vanishes identically.
        let ens = ParticleEnsemble {
            weights: vec![1.0, 0.0, 0.0, 0.0],
            velocities: vec![Vec3::new(0.25, 0.25, 0.0); 4],
        };
        let state = SystemState {
            dim: 2,
            species: vec![spec.clone()],
            ensembles: vec![ens],
            kernel: KernelSpec {
                gamma: 0.0,
                strength: vec![vec![1.0]],
            },
            time: 0.0,
        };
        let grids = vec![build_grid(&spec, 2)];
        (state, grids)
    }

    #[test]
    fn zero_field_leaves_velocities_bitwise_unchanged() {
        let (state, grids) = still_state();
        let next = step_forward_euler(&state, &grids, 0.1).unwrap();
        assert_eq!(next.ensembles[0].velocities, state.ensembles[0].velocities);
        assert_eq!(next.time, 0.1);

        let control = StepControl::new(0.1, Scheme::ImplicitMidpoint);
        let (next, iterations) = step_implicit_midpoint(&state, &grids, 0.1, &control).unwrap();
        assert_eq!(iterations, 1);
        assert_eq!(next.ensembles[0].velocities, state.ensembles[0].velocities);
    }

    #[test]
    fn integrate_to_the_current_time_is_a_no_op() {
        let (state, grids) = still_state();
        let control = StepControl::new(0.1, Scheme::ForwardEuler);
        let mut calls = 0;
        let done = integrate(&state, &grids, &control, 0.0, |_, _| {
            calls += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(calls, 0);
        assert_eq!(done.time, 0.0);
        assert_eq!(done.ensembles[0].velocities, state.ensembles[0].velocities);
    }

    #[test]
    fn partial_final_step_lands_exactly() {
        let (state, grids) = still_state();
        let control = StepControl::new(0.1, Scheme::ForwardEuler);
        let t_final = 1.05;
        let mut times = Vec::new();
        let done = integrate(&state, &grids, &control, t_final, |_, s| {
            times.push(s.time);
            Ok(())
        })
        .unwrap();
        // 10 full steps plus one shortened remainder.
        assert_eq!(times.len(), 11);
        assert_eq!(done.time, t_final);
        assert!((times[9] - 1.0).abs() <= 1e-12);
        assert_eq!(*times.last().unwrap(), t_final);
    }

    #[test]
    fn desk_run_conserves_mass_and_momentum() {
        // Scaled-down two-species exact-solution scenario: a short forward
        // Euler run keeps weights bitwise fixed and momentum at rounding
        // level, and drifts energy only at O(dt).
        let (state, grids) = bkw_example_state(10);
        let weights0: Vec<Vec<f64>> = state.ensembles.iter().map(|e| e.weights.clone()).collect();
        let before = total_moments(&state).unwrap();
        let control = StepControl::new(0.02, Scheme::ForwardEuler);
        let done = integrate(&state, &grids, &control, 0.2, |_, _| Ok(())).unwrap();
        let after = total_moments(&done).unwrap();

        for (w0, ens) in weights0.iter().zip(&done.ensembles) {
            assert_eq!(w0, &ens.weights);
        }
        let scale: f64 = state
            .species
            .iter()
            .zip(&state.ensembles)
            .map(|(s, e)| {
                e.weights
                    .iter()
                    .zip(&e.velocities)
                    .map(|(w, v)| s.mass * w * v.norm())
                    .sum::<f64>()
            })
            .sum();
        let drift = (after.totals.momentum - before.totals.momentum).norm();
        assert!(drift <= 1e-12 * scale, "momentum drift {drift:e}");
        let energy_rel = (after.totals.kinetic_energy - before.totals.kinetic_energy).abs()
            / before.totals.kinetic_energy;
        assert!(energy_rel < 1e-2, "energy drift {energy_rel:e}");
    }

    #[test]
    fn euler_energy_drift_is_first_order() {
        let (state, grids) = bkw_example_state(10);
        let before = total_moments(&state).unwrap().totals.kinetic_energy;
        let drift = |dt: f64| {
            let control = StepControl::new(dt, Scheme::ForwardEuler);
            let done = integrate(&state, &grids, &control, 0.5, |_, _| Ok(())).unwrap();
            (total_moments(&done).unwrap().totals.kinetic_energy - before).abs() / before
        };
        let coarse = drift(0.05);
        let fine = drift(0.025);
        let ratio = coarse / fine;
        assert!(
            (1.6..=2.4).contains(&ratio),
            "halving dt changed the energy drift by {ratio} (coarse {coarse:e}, fine {fine:e})"
        );
    }

    #[test]
    fn midpoint_conserves_momentum_and_energy() {
        let (state, grids) = bkw_example_state(10);
        let before = total_moments(&state).unwrap();
        let control = StepControl::new(0.02, Scheme::ImplicitMidpoint);
        let done = integrate(&state, &grids, &control, 0.2, |_, _| Ok(())).unwrap();
        let after = total_moments(&done).unwrap();
        let energy_rel = (after.totals.kinetic_energy - before.totals.kinetic_energy).abs()
            / before.totals.kinetic_energy;
        // 10 steps at tolerance 1e-8: well under 100x the tolerance.
        assert!(energy_rel <= 1e-6, "midpoint energy drift {energy_rel:e}");
        let scale: f64 = state
            .species
            .iter()
            .zip(&state.ensembles)
            .map(|(s, e)| {
                e.weights
                    .iter()
                    .zip(&e.velocities)
                    .map(|(w, v)| s.mass * w * v.norm())
                    .sum::<f64>()
            })
            .sum();
        let drift = (after.totals.momentum - before.totals.momentum).norm();
        assert!(drift <= 1e-12 * scale, "momentum drift {drift:e}");
    }

    #[test]
    fn midpoint_converges_at_benchmark_step_size() {
        // Full-resolution scenario, a few steps only: the fixed-point
        // iteration must converge at every one of them.
        let (state, grids) = bkw_example_state(40);
        let control = StepControl::new(0.0025, Scheme::ImplicitMidpoint);
        let mut current = state;
        for _ in 0..5 {
            let (next, iterations) =
                step_implicit_midpoint(&current, &grids, 0.0025, &control).unwrap();
            assert!(iterations < control.fp_max_iters);
            current = next;
        }
    }

    #[test]
    fn nonconvergence_is_a_hard_error() {
        let (state, grids) = bkw_example_state(10);
        let control = StepControl {
            dt: 0.02,
            scheme: Scheme::ImplicitMidpoint,
            fp_tolerance: 1e-300,
            fp_max_iters: 3,
            euler_predictor: false,
        };
        let err = step_implicit_midpoint(&state, &grids, 0.02, &control).unwrap_err();
        match err {
            Error::NonConvergence { iterations, .. } => assert_eq!(iterations, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
