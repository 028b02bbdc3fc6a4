//! Monotone decay of the discrete mollified entropy along a run.
//!
//! ```bash
//! cargo run --release -p landau --example entropy_decay
//! ```

use landau::config::parse_config;
use landau::presets;
use landau::runner::{run, RunOptions};

fn main() {
    let mut config = parse_config(presets::bundled("bkw_example1_desk").unwrap()).unwrap();
    config.time.t_final = 1.5;
    config.output.snapshot_times.clear();
    config.output.diagnostics_every = 5;
    for s in &mut config.species {
        s.grid_n = 16;
    }

    let options = RunOptions {
        out_dir: Some(std::env::temp_dir().join("landau_example_entropy")),
        threads: None,
    };
    let result = run(&config, &options).expect("run");

    println!("{:>8} {:>18} {:>14}", "time", "entropy", "step change");
    let mut previous: Option<f64> = None;
    for (_, record) in &result.records {
        let entropy = record.totals.entropy;
        match previous {
            None => println!("{:>8.3} {:>18.12}", record.time, entropy),
            Some(prev) => println!(
                "{:>8.3} {:>18.12} {:>14.3e}",
                record.time,
                entropy,
                entropy - prev
            ),
        }
        previous = Some(entropy);
    }
    println!(
        "max step increase over the run: {:.3e} (negative = strictly decreasing)",
        result.summary.drift.entropy_max_increase
    );
}
