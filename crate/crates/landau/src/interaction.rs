//! Right-hand side of the particle ODE system: the pairwise collisional
//! velocity field over all species.
//!
//! For target particle (i, p) the field is
//! `-sum_j sum_q w_q^j A_ji(v_p^i - v_q^j) (F_i(v_p)/m_i - F_j(v_q)/m_j)`,
//! a dense O(N^2) double sum. Scores are evaluated once per call at the
//! current particle positions and shared between both loop orientations; the
//! double sum is then taken directly, with no symmetry tricks, because
//! bitwise-reproducible accumulation order matters more here than the
//! factor-two saving.
//!
//! Parallelism is over target particles only; for each target the sum runs
//! over species ascending, then source particles ascending.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{is_coincident, speed_power};
use crate::model::SystemState;
use crate::score::{grid_log_density, score_from_grid_log, QuadratureGrid};
use crate::vec3::Vec3;

/// Score field of every species evaluated at its own particle positions.
pub fn particle_scores(state: &SystemState, grids: &[QuadratureGrid]) -> Result<Vec<Vec<Vec3>>> {
    assert_eq!(grids.len(), state.species.len(), "one grid per species");
    state
        .species
        .iter()
        .zip(&state.ensembles)
        .zip(grids)
        .map(|((spec, ens), grid)| {
            let grid_log = grid_log_density(ens, spec, grid)?;
            Ok(score_from_grid_log(
                grid,
                &grid_log,
                spec.epsilon,
                &ens.velocities,
            ))
        })
        .collect()
}

/// Pair sum with the scores supplied by the caller. `scores[i][p]` is the
/// score of species `i` at its particle `p`.
pub fn rhs_with_scores(state: &SystemState, scores: &[Vec<Vec3>]) -> Result<Vec<Vec<Vec3>>> {
    let species_count = state.species.len();
    // Score over mass, the quantity differenced inside the bracket.
    let score_over_mass: Vec<Vec<Vec3>> = (0..species_count)
        .map(|i| {
            let inv_m = 1.0 / state.species[i].mass;
            scores[i].iter().map(|&f| f * inv_m).collect()
        })
        .collect();
    // Kernel prefactor per (target, source) pair.
    let coeff: Vec<Vec<f64>> = (0..species_count)
        .map(|i| {
            (0..species_count)
                .map(|j| state.kernel.strength[i][j] / state.species[i].mass)
                .collect()
        })
        .collect();

    let gamma = state.kernel.gamma;
    let out = if gamma == 0.0 {
        assemble(state, &score_over_mass, &coeff, |_| 1.0)
    } else if gamma == -3.0 {
        assemble(state, &score_over_mass, &coeff, |r2| 1.0 / (r2 * r2.sqrt()))
    } else {
        assemble(state, &score_over_mass, &coeff, move |r2| {
            speed_power(r2, gamma)
        })
    };

    for (i, field) in out.iter().enumerate() {
        if let Some(p) = field.iter().position(|dv| !dv.is_finite()) {
            return Err(Error::NonFinite {
                species: i,
                particle: p,
            });
        }
    }
    Ok(out)
}

fn assemble<P>(
    state: &SystemState,
    score_over_mass: &[Vec<Vec3>],
    coeff: &[Vec<f64>],
    pow: P,
) -> Vec<Vec<Vec3>>
where
    P: Fn(f64) -> f64 + Sync,
{
    let species_count = state.species.len();
    (0..species_count)
        .map(|i| {
            let velocities_i = &state.ensembles[i].velocities;
            let g_i = &score_over_mass[i];
            velocities_i
                .par_iter()
                .enumerate()
                .map(|(p, &vp)| {
                    let gp = g_i[p];
                    let mut acc = Vec3::ZERO;
                    for j in 0..species_count {
                        let c = coeff[i][j];
                        let weights = &state.ensembles[j].weights;
                        let velocities_j = &state.ensembles[j].velocities;
                        let g_j = &score_over_mass[j];
                        let same = i == j;
                        for q in 0..velocities_j.len() {
                            if same && p == q {
                                continue;
                            }
                            let z = vp - velocities_j[q];
                            let r2 = z.norm_sq();
                            if is_coincident(r2) {
                                continue;
                            }
                            let bracket = gp - g_j[q];
                            let scale = weights[q] * c * pow(r2);
                            acc += scale * (r2 * bracket - z.dot(bracket) * z);
                        }
                    }
                    -acc
                })
                .collect()
        })
        .collect()
}

/// Full right-hand side: evaluate scores at the current particle positions,
/// then the pair sum. Errors if any output component is non-finite.
pub fn rhs(state: &SystemState, grids: &[QuadratureGrid]) -> Result<Vec<Vec<Vec3>>> {
    let scores = particle_scores(state, grids)?;
    rhs_with_scores(state, &scores)
}

/// Weighted momentum flux `sum_{i,p} m_i w_p^i rhs_p^i`; zero up to rounding
/// for any state.
pub fn momentum_flux(state: &SystemState, field: &[Vec<Vec3>]) -> Vec3 {
    let mut total = Vec3::ZERO;
    for ((spec, ens), dv) in state.species.iter().zip(&state.ensembles).zip(field) {
        for (w, d) in ens.weights.iter().zip(dv) {
            total += (spec.mass * w) * *d;
        }
    }
    total
}

/// Weighted energy flux `sum_{i,p} m_i w_p^i v_p . rhs_p^i`; zero up to
/// rounding for any state.
pub fn energy_flux(state: &SystemState, field: &[Vec<Vec3>]) -> f64 {
    let mut total = 0.0;
    for ((spec, ens), dv) in state.species.iter().zip(&state.ensembles).zip(field) {
        for ((w, v), d) in ens.weights.iter().zip(&ens.velocities).zip(dv) {
            total += spec.mass * w * v.dot(*d);
        }
    }
    total
}

/// Entropy production `sum_{i,p} w_p^i F_i(v_p) . rhs_p^i`; nonpositive up
/// to rounding.
pub fn entropy_flux(state: &SystemState, scores: &[Vec<Vec3>], field: &[Vec<Vec3>]) -> f64 {
    let mut total = 0.0;
    for ((ens, fs), dv) in state.ensembles.iter().zip(scores).zip(field) {
        for ((w, f), d) in ens.weights.iter().zip(fs).zip(dv) {
            total += w * f.dot(*d);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{maxwellian_density, MaxwellianParams};
    use crate::init::{build_grid, constrained_half_width, epsilon_from_h, init_particles};
    use crate::model::{validate_state, KernelSpec, ParticleEnsemble, SpeciesSpec};
    use rand::{Rng, SeedableRng};

    /// Random but structurally valid state, plus matching grids.
    pub fn random_state(
        rng: &mut rand::rngs::StdRng,
        gamma: f64,
        dim: usize,
    ) -> (SystemState, Vec<QuadratureGrid>) {
        let species_count = rng.gen_range(1..=3);
        let mut strength = vec![vec![0.0; species_count]; species_count];
        for i in 0..species_count {
            for j in i..species_count {
                let b = rng.gen_range(0.01..1.0);
                strength[i][j] = b;
                strength[j][i] = b;
            }
        }
        let mut species = Vec::new();
        let mut ensembles = Vec::new();
        let mut grids = Vec::new();
        for i in 0..species_count {
            let grid_n = rng.gen_range(3..=5);
            let half_width = rng.gen_range(1.0..2.5);
            let spec = SpeciesSpec {
                mass: rng.gen_range(0.5..4.0),
                half_width,
                center: Vec3::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), 0.0),
                grid_n,
                epsilon: epsilon_from_h(2.0 * half_width / grid_n as f64, 0.64, 1.98),
                label: format!("s{i}"),
            };
            let n = spec.particle_count(dim);
            let ens = ParticleEnsemble {
                weights: (0..n).map(|_| rng.gen_range(0.01..1.0)).collect(),
                velocities: (0..n)
                    .map(|_| {
                        let z = if dim == 3 {
                            rng.gen_range(-2.0..2.0)
                        } else {
                            0.0
                        };
                        Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), z)
                    })
                    .collect(),
            };
            grids.push(build_grid(&spec, dim));
            species.push(spec);
            ensembles.push(ens);
        }
        let state = SystemState {
            dim,
            species,
            ensembles,
            kernel: KernelSpec { gamma, strength },
            time: 0.0,
        };
        assert!(validate_state(&state).is_empty());
        (state, grids)
    }

    fn scale_momentum(state: &SystemState, field: &[Vec<Vec3>]) -> f64 {
        let mut scale = 0.0;
        for ((spec, ens), dv) in state.species.iter().zip(&state.ensembles).zip(field) {
            for (w, d) in ens.weights.iter().zip(dv) {
                scale += spec.mass * w * d.norm();
            }
        }
        scale
    }

    #[test]
    fn flux_identities_on_random_states() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(0x1a2b3c);
        for trial in 0..30 {
            let gamma = [0.0, -3.0, -1.5][trial % 3];
            let dim = if trial % 5 == 4 { 3 } else { 2 };
            let (state, grids) = random_state(&mut rng, gamma, dim);
            let scores = particle_scores(&state, &grids).unwrap();
            let field = rhs_with_scores(&state, &scores).unwrap();

            let momentum = momentum_flux(&state, &field).norm();
            let momentum_scale = scale_momentum(&state, &field).max(1e-300);
            assert!(
                momentum <= 1e-12 * momentum_scale,
                "trial {trial}: momentum flux {momentum:e} vs scale {momentum_scale:e}"
            );

            let energy = energy_flux(&state, &field).abs();
            let mut energy_scale = 0.0;
            for ((spec, ens), dv) in state.species.iter().zip(&state.ensembles).zip(&field) {
                for ((w, v), d) in ens.weights.iter().zip(&ens.velocities).zip(dv) {
                    energy_scale += spec.mass * w * v.norm() * d.norm();
                }
            }
            assert!(
                energy <= 1e-12 * energy_scale.max(1e-300),
                "trial {trial}: energy flux {energy:e} vs scale {energy_scale:e}"
            );

            let production = entropy_flux(&state, &scores, &field);
            let mut entropy_scale = 0.0;
            for ((ens, fs), dv) in state.ensembles.iter().zip(&scores).zip(&field) {
                for ((w, f), d) in ens.weights.iter().zip(fs).zip(dv) {
                    entropy_scale += w * f.norm() * d.norm();
                }
            }
            assert!(
                production <= 1e-12 * entropy_scale.max(1e-300),
                "trial {trial}: entropy production {production:e}"
            );
        }
    }

    #[test]
    fn mirrored_pair_field_is_antisymmetric() {
        // One species, two equal-weight particles at +/- a: the velocity
        // field on one is exactly the negation of the other.
        let spec = SpeciesSpec {
            mass: 1.5,
            half_width: 2.0,
            center: Vec3::ZERO,
            grid_n: 2,
            epsilon: 0.2,
            label: "s".into(),
        };
        // grid_n = 2 gives 4 particles; use a symmetric square so every
        // particle has its mirror.
        let ens = ParticleEnsemble {
            weights: vec![0.25; 4],
            velocities: vec![
                Vec3::new(-0.7, -0.4, 0.0),
                Vec3::new(-0.7, 0.4, 0.0),
                Vec3::new(0.7, -0.4, 0.0),
                Vec3::new(0.7, 0.4, 0.0),
            ],
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
        let field = rhs(&state, &grids).unwrap();
        // Mirror of particle 0 is particle 3, of 1 is 2.
        let f = &field[0];
        assert!((f[0] + f[3]).norm() <= 1e-15 * f[0].norm().max(1e-300));
        assert!((f[1] + f[2]).norm() <= 1e-15 * f[1].norm().max(1e-300));
    }

    #[test]
    fn joint_equilibrium_field_is_small() {
        // Two Maxwellians with a common bulk velocity and temperature, with
        // m1 eps1 == m2 eps2: the bracket is parallel to the relative
        // velocity and annihilated by the kernel, so only quadrature error
        // remains. The bound is checked over the thermal bulk (3 sigma) and
        // as a weighted rms: score quadrature truncates at the frozen domain
        // boundary, so far-corner particles (weights ~ e^-50) carry O(1)
        // velocity derivatives that say nothing about the dynamics.
        let common_t = 0.25f64;
        let u = Vec3::new(0.1, -0.05, 0.0);
        let masses = [2.0, 1.0];
        let l1 = 6.0 * (common_t / masses[0]).sqrt();
        let widths = [l1, constrained_half_width(masses[0], masses[1], l1, 1.98)];
        let n = 40;
        let mut species = Vec::new();
        let mut ensembles = Vec::new();
        let mut grids = Vec::new();
        for i in 0..2 {
            let spec = SpeciesSpec {
                mass: masses[i],
                half_width: widths[i],
                center: u,
                grid_n: n,
                epsilon: epsilon_from_h(2.0 * widths[i] / n as f64, 0.64, 1.98),
                label: format!("s{i}"),
            };
            let grid = build_grid(&spec, 2);
            let p = MaxwellianParams {
                density: 1.0,
                mass: masses[i],
                bulk_velocity: u,
                temperature: common_t,
            };
            let ens = init_particles(|v| maxwellian_density(v, &p, 2), &grid, &spec).unwrap();
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
                strength: vec![vec![0.125, 0.0625], vec![0.0625, 0.03125]],
            },
            time: 0.0,
        };
        let field = rhs(&state, &grids).unwrap();
        let velocity_scale = (common_t / masses[1]).sqrt();
        let mut worst_bulk = 0.0f64;
        let mut weighted_sq = 0.0;
        let mut total_weight = 0.0;
        for i in 0..2 {
            let sigma = (common_t / state.species[i].mass).sqrt();
            for ((w, v), d) in state.ensembles[i]
                .weights
                .iter()
                .zip(&state.ensembles[i].velocities)
                .zip(&field[i])
            {
                if (*v - u).norm() <= 3.0 * sigma {
                    worst_bulk = worst_bulk.max(d.norm());
                }
                weighted_sq += w * d.norm_sq();
                total_weight += w;
            }
        }
        let weighted_rms = (weighted_sq / total_weight).sqrt();
        assert!(
            worst_bulk <= 5e-3 * velocity_scale,
            "max |dv/dt| in the bulk = {worst_bulk:e}, velocity scale {velocity_scale}"
        );
        assert!(
            weighted_rms <= 5e-3 * velocity_scale,
            "weighted rms |dv/dt| = {weighted_rms:e}"
        );
    }

    #[test]
    fn coincident_cross_species_particles_stay_finite() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let (mut state, grids) = random_state(&mut rng, -3.0, 2);
        if state.species.len() >= 2 {
            // Force an exact cross-species coincidence.
            let v = state.ensembles[0].velocities[0];
            state.ensembles[1].velocities[0] = v;
        }
        let field = rhs(&state, &grids).unwrap();
        for per_species in &field {
            for dv in per_species {
                assert!(dv.is_finite());
            }
        }
    }
}
