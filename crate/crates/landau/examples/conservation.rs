//! Conservation audit of the two time steppers on a scaled-down benchmark.
//!
//! Forward Euler conserves mass and momentum to rounding and drifts energy
//! at O(dt); the implicit midpoint rule holds energy down to the fixed-point
//! tolerance.
//!
//! ```bash
//! cargo run --release -p landau --example conservation
//! ```

use landau::config::parse_config;
use landau::integrate::Scheme;
use landau::presets;
use landau::runner::{run, RunOptions};

fn main() {
    let mut base = parse_config(presets::bundled("bkw_example1_desk").unwrap()).unwrap();
    base.time.t_final = 1.0;
    base.output.snapshot_times.clear();
    for s in &mut base.species {
        s.grid_n = 16;
    }

    for (name, scheme, dt) in [
        ("forward Euler, dt = 0.02", Scheme::ForwardEuler, 0.02),
        ("forward Euler, dt = 0.01", Scheme::ForwardEuler, 0.01),
        (
            "implicit midpoint, dt = 0.02",
            Scheme::ImplicitMidpoint,
            0.02,
        ),
    ] {
        let mut config = base.clone();
        config.time.scheme = scheme;
        config.time.dt = dt;
        let options = RunOptions {
            out_dir: Some(std::env::temp_dir().join("landau_example_conservation")),
            threads: None,
        };
        let result = run(&config, &options).expect("run");
        let drift = &result.summary.drift;
        println!("{name}:");
        println!(
            "  mass exact: {}   momentum drift (relative): {:.3e}   energy drift (relative): {:.3e}",
            drift.mass_exact, drift.momentum_rel, drift.energy_rel
        );
    }
}
