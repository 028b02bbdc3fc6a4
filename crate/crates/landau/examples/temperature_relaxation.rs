//! Species temperatures under Coulomb collisions, with matched vs mismatched
//! regularization parameters.
//!
//! With per-species domains chosen so that `m1 eps1 == m2 eps2`, both
//! temperatures relax toward the conserved total; with equal domains for
//! unequal masses they settle on two distinct values, which is unphysical.
//! This is a shortened, coarser version of the `coulomb_example2` presets.
//!
//! ```bash
//! cargo run --release -p landau --example temperature_relaxation
//! ```

use landau::config::parse_config;
use landau::presets;
use landau::runner::{run, RunOptions};

fn main() {
    for name in ["coulomb_example2_desk", "coulomb_example2_same_domain_desk"] {
        let mut config = parse_config(presets::bundled(name).unwrap()).unwrap();
        config.time.t_final = 10.0;
        config.output.snapshot_times.clear();
        config.output.diagnostics_every = 50;
        for s in &mut config.species {
            s.grid_n = 24;
        }

        let options = RunOptions {
            out_dir: Some(std::env::temp_dir().join("landau_example_temperature")),
            threads: None,
        };
        let result = run(&config, &options).expect("run");
        let eq = &result.summary.predicted_equilibrium;

        println!("{name}: m*eps matched: {}", eq.species_independent);
        println!(
            "{:>8} {:>12} {:>12} {:>12}",
            "time", "T_heavy", "T_light", "T_total"
        );
        for (_, record) in &result.records {
            println!(
                "{:>8.2} {:>12.6} {:>12.6} {:>12.6}",
                record.time,
                record.per_species[0].temperature,
                record.per_species[1].temperature,
                record.totals.temperature
            );
        }
        println!(
            "conserved total temperature (relaxation target when matched): {:.6}\n",
            eq.temperature
        );
    }
}
