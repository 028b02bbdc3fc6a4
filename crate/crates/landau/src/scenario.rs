//! Turn a validated configuration into an initial simulation state.

use crate::analytic::{bkw_density, maxwellian_density, BkwParams, MaxwellianParams};
use crate::config::{CenterRule, HalfWidth, InitialCondition, ScenarioConfig};
use crate::error::{Error, Result};
use crate::init::{build_grid, constrained_half_width, epsilon_from_h, init_particles};
use crate::model::{validate_state, SpeciesSpec, SystemState};
use crate::score::QuadratureGrid;
use crate::vec3::Vec3;

/// Initial state plus the frozen quadrature grids, and the exact-solution
/// parameters when the scenario uses them.
#[derive(Debug, Clone)]
pub struct SimulationSetup {
    pub state: SystemState,
    pub grids: Vec<QuadratureGrid>,
    pub bkw: Option<BkwParams>,
}

/// Resolved half-widths (the constrained one expanded to its value).
pub fn resolve_half_widths(config: &ScenarioConfig) -> Vec<f64> {
    config
        .species
        .iter()
        .map(|s| match s.half_width {
            HalfWidth::Value(l) => l,
            HalfWidth::Constrained { reference } => {
                let r = &config.species[reference];
                let l_ref = match r.half_width {
                    HalfWidth::Value(l) => l,
                    // Validation rejects chained constraints.
                    HalfWidth::Constrained { .. } => unreachable!(),
                };
                constrained_half_width(r.mass, s.mass, l_ref, s.eps_power)
            }
        })
        .collect()
}

/// Resolved species parameter blocks: half-width, center, and regularization
/// all made concrete.
pub fn resolve_species(config: &ScenarioConfig) -> Vec<SpeciesSpec> {
    let widths = resolve_half_widths(config);
    config
        .species
        .iter()
        .zip(widths)
        .map(|(s, half_width)| {
            let center = match s.center {
                CenterRule::Origin => Vec3::ZERO,
                CenterRule::BulkVelocity => match s.initial {
                    InitialCondition::Maxwellian { velocity, .. } => velocity,
                    InitialCondition::Bkw { .. } => Vec3::ZERO,
                },
            };
            let h = 2.0 * half_width / s.grid_n as f64;
            let epsilon = s
                .epsilon_override
                .unwrap_or_else(|| epsilon_from_h(h, s.eps_coeff, s.eps_power));
            SpeciesSpec {
                mass: s.mass,
                half_width,
                center,
                grid_n: s.grid_n,
                epsilon,
                label: s.label.clone(),
            }
        })
        .collect()
}

/// Exact-solution parameters when every species uses them.
pub fn bkw_params(config: &ScenarioConfig) -> Result<Option<BkwParams>> {
    let c = match config.bkw_constant() {
        Some(c) => c,
        None => return Ok(None),
    };
    let masses: Vec<f64> = config.species.iter().map(|s| s.mass).collect();
    let densities: Vec<f64> = config
        .species
        .iter()
        .map(|s| match s.initial {
            InitialCondition::Bkw { density, .. } => density,
            InitialCondition::Maxwellian { density, .. } => density,
        })
        .collect();
    BkwParams::new(
        masses,
        densities,
        config.kernel.strength.clone(),
        c,
        config.dim,
    )
    .map(Some)
}

/// Build grids and midpoint-quadrature particle ensembles for the scenario.
pub fn build_initial(config: &ScenarioConfig) -> Result<SimulationSetup> {
    let species = resolve_species(config);
    let bkw = bkw_params(config)?;

    let mut grids = Vec::with_capacity(species.len());
    let mut ensembles = Vec::with_capacity(species.len());
    for (i, spec) in species.iter().enumerate() {
        let grid = build_grid(spec, config.dim);
        let ensemble = match config.species[i].initial {
            InitialCondition::Bkw { .. } => {
                let params = bkw
                    .as_ref()
                    .expect("bkw params present for bkw initial data");
                init_particles(|v| bkw_density(0.0, v, i, params), &grid, spec)?
            }
            InitialCondition::Maxwellian {
                density,
                velocity,
                temperature,
            } => {
                let p = MaxwellianParams {
                    density,
                    mass: spec.mass,
                    bulk_velocity: velocity,
                    temperature,
                };
                init_particles(|v| maxwellian_density(v, &p, config.dim), &grid, spec)?
            }
        };
        grids.push(grid);
        ensembles.push(ensemble);
    }

    let state = SystemState {
        dim: config.dim,
        species,
        ensembles,
        kernel: config.kernel.clone(),
        time: 0.0,
    };
    let violations = validate_state(&state);
    if !violations.is_empty() {
        return Err(Error::Validation(
            violations.iter().map(|v| v.to_string()).collect(),
        ));
    }
    Ok(SimulationSetup { state, grids, bkw })
}

/// Copy of the configuration with every species' per-axis cell count
/// replaced; used by convergence studies.
pub fn with_resolution(config: &ScenarioConfig, grid_n: usize) -> ScenarioConfig {
    let mut out = config.clone();
    for s in &mut out.species {
        s.grid_n = grid_n;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use crate::presets;

    #[test]
    fn bkw_setup_matches_reference_moments() {
        let config = parse_config(presets::bundled("bkw_example1_desk").unwrap()).unwrap();
        let setup = build_initial(&config).unwrap();
        assert_eq!(setup.state.total_particles(), 2 * 400);
        let bkw = setup.bkw.unwrap();
        assert!((bkw.beta - 0.0625).abs() <= 1e-12);
        // Total weight of each species approximates its unit number density.
        for ens in &setup.state.ensembles {
            let n = ens.total_weight();
            assert!((n - 1.0).abs() <= 1e-3, "n = {n}");
        }
        // Initial diagnostics of the exact solution: total mass 2, zero
        // momentum, unit normalized temperature.
        let rec = crate::diagnostics::record(&setup.state, &setup.grids).unwrap();
        assert!((rec.totals.mass_density - 3.0).abs() <= 3e-3); // m1 n1 + m2 n2
        assert!((rec.totals.number_density - 2.0).abs() <= 2e-3);
        assert!(rec.totals.momentum.norm() <= 1e-3);
        assert!(
            (rec.totals.temperature - 1.0).abs() <= 1e-3,
            "T = {}",
            rec.totals.temperature
        );
        assert!(rec.totals.entropy.is_finite());
    }

    #[test]
    fn constrained_width_matches_mass_weighted_regularization() {
        let config = parse_config(presets::bundled("coulomb_example2_desk").unwrap()).unwrap();
        let setup = build_initial(&config).unwrap();
        let s = &setup.state.species;
        let products: Vec<f64> = s.iter().map(|s| s.mass * s.epsilon).collect();
        let rel = (products[0] - products[1]).abs() / products[0];
        assert!(rel <= 1e-12, "m eps products {products:?}");
        assert!((s[1].half_width - 3.5479325923407477).abs() <= 1e-12);
    }

    #[test]
    fn coulomb_domains_center_on_initial_velocities() {
        let config = parse_config(presets::bundled("coulomb_example1_desk").unwrap()).unwrap();
        let setup = build_initial(&config).unwrap();
        assert_eq!(setup.state.species[0].center, Vec3::new(0.5, 0.25, 0.0));
        assert_eq!(setup.state.species[1].center, Vec3::new(-0.25, 0.0, 0.0));
        assert!(setup.bkw.is_none());
    }

    #[test]
    fn resolution_override_applies_to_all_species() {
        let config = parse_config(presets::bundled("bkw_example1").unwrap()).unwrap();
        let coarse = with_resolution(&config, 12);
        let setup = build_initial(&coarse).unwrap();
        assert_eq!(setup.state.total_particles(), 2 * 144);
        for (spec, grid) in setup.state.species.iter().zip(&setup.grids) {
            assert_eq!(grid.len(), 144);
            assert!((grid.h - spec.mesh_size()).abs() <= 1e-15);
        }
    }
}
