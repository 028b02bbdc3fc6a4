//! Building a scenario in code instead of TOML: a three-species Maxwell-
//! kernel gas with different masses, run for a short horizon.
//!
//! ```bash
//! cargo run --release -p landau --example custom_scenario
//! ```

use landau::config::{
    CenterRule, HalfWidth, InitialCondition, OutputConfig, ScenarioConfig, SpeciesConfig,
    TimeConfig, DEFAULT_EPS_COEFF, DEFAULT_EPS_POWER, DEFAULT_FP_MAX_ITERS, DEFAULT_FP_TOLERANCE,
};
use landau::integrate::Scheme;
use landau::model::KernelSpec;
use landau::runner::{check_config, run, RunOptions};
use landau::vec3::Vec3;

fn species(label: &str, mass: f64, velocity: Vec3, temperature: f64) -> SpeciesConfig {
    // Domain sized to the species' thermal width so the midpoint weights
    // capture the whole Maxwellian.
    let half_width = 6.5 * (temperature / mass).sqrt();
    SpeciesConfig {
        label: label.into(),
        mass,
        half_width: HalfWidth::Value(half_width),
        center: CenterRule::BulkVelocity,
        grid_n: 16,
        epsilon_override: None,
        eps_coeff: DEFAULT_EPS_COEFF,
        eps_power: DEFAULT_EPS_POWER,
        initial: InitialCondition::Maxwellian {
            density: 1.0,
            velocity,
            temperature,
        },
    }
}

fn main() {
    let config = ScenarioConfig {
        dim: 2,
        kernel: KernelSpec {
            gamma: 0.0,
            strength: vec![
                vec![0.10, 0.05, 0.02],
                vec![0.05, 0.08, 0.03],
                vec![0.02, 0.03, 0.06],
            ],
        },
        species: vec![
            species("light", 1.0, Vec3::new(0.3, 0.0, 0.0), 0.2),
            species("medium", 2.0, Vec3::new(-0.2, 0.1, 0.0), 0.15),
            species("heavy", 4.0, Vec3::new(0.0, -0.1, 0.0), 0.1),
        ],
        time: TimeConfig {
            dt: 0.02,
            t_final: 2.0,
            scheme: Scheme::ForwardEuler,
            fp_tolerance: DEFAULT_FP_TOLERANCE,
            fp_max_iters: DEFAULT_FP_MAX_ITERS,
        },
        output: OutputConfig {
            directory: std::env::temp_dir().join("landau_example_custom"),
            snapshot_times: vec![],
            diagnostics_every: 10,
        },
    };

    print!("{}", check_config(&config).expect("valid scenario"));

    let result = run(&config, &RunOptions::default()).expect("run");
    println!("\nafter t = {}:", result.summary.t_final);
    for f in &result.summary.final_species {
        println!(
            "  {}: u = ({:+.4}, {:+.4}), T = {:.4}",
            f.label, f.bulk_velocity[0], f.bulk_velocity[1], f.temperature
        );
    }
    println!(
        "momentum drift {:.2e}, energy drift {:.2e}, entropy max step increase {:.2e}",
        result.summary.drift.momentum_rel,
        result.summary.drift.energy_rel,
        result.summary.drift.entropy_max_increase
    );
}
