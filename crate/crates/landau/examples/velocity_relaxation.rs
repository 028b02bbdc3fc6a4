//! Bulk velocities of two colliding species relaxing to the common
//! equilibrium velocity predicted from the conserved momentum.
//!
//! ```bash
//! cargo run --release -p landau --example velocity_relaxation
//! ```

use landau::config::parse_config;
use landau::presets;
use landau::runner::{run, RunOptions};

fn main() {
    let mut config = parse_config(presets::bundled("coulomb_example1_desk").unwrap()).unwrap();
    config.time.t_final = 10.0;
    config.output.snapshot_times.clear();
    config.output.diagnostics_every = 25;
    for s in &mut config.species {
        s.grid_n = 20;
    }

    let options = RunOptions {
        out_dir: Some(std::env::temp_dir().join("landau_example_velocity")),
        threads: None,
    };
    let result = run(&config, &options).expect("run");
    let eq = &result.summary.predicted_equilibrium;

    println!(
        "predicted equilibrium velocity: ({:.4}, {:.4})",
        eq.bulk_velocity[0], eq.bulk_velocity[1]
    );
    println!(
        "{:>8} {:>10} {:>10} {:>10} {:>10}",
        "time", "u1_x", "u1_y", "u2_x", "u2_y"
    );
    for (_, record) in &result.records {
        let u1 = record.per_species[0].bulk_velocity;
        let u2 = record.per_species[1].bulk_velocity;
        println!(
            "{:>8.2} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            record.time, u1.x, u1.y, u2.x, u2.y
        );
    }
}
