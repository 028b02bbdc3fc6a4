//! Small convergence study against the exact BKW solution.
//!
//! Runs the two-species Maxwell-kernel benchmark at three coarse resolutions
//! and prints the relative error norms and fitted orders. A desk-scale
//! version of the full study (which uses n = 20..40 and takes a minute or
//! two) — see the `convergence` CLI subcommand for that.
//!
//! ```bash
//! cargo run --release -p landau --example bkw_convergence
//! ```

use landau::config::parse_config;
use landau::presets;
use landau::runner::{convergence, RunOptions};

fn main() {
    let mut config = parse_config(presets::bundled("bkw_example1_desk").unwrap()).unwrap();
    config.time.t_final = 1.0;
    config.time.dt = 0.02;

    let options = RunOptions {
        out_dir: Some(std::env::temp_dir().join("landau_example_convergence")),
        threads: None,
    };
    let study = convergence(&config, &[10, 14, 20], &options).expect("convergence study");

    println!(
        "{:>4} {:>8} {:>10} {:>12} {:>12} {:>12}",
        "n", "species", "h", "rel L1", "rel L2", "rel Linf"
    );
    for e in &study.entries {
        println!(
            "{:>4} {:>8} {:>10.4} {:>12.4e} {:>12.4e} {:>12.4e}",
            e.n,
            e.species + 1,
            e.h,
            e.rel_l1,
            e.rel_l2,
            e.rel_linf
        );
    }
    for o in &study.orders {
        println!(
            "fitted order, species {}: L1 {:.2}, L2 {:.2}, Linf {:.2}",
            o.species + 1,
            o.l1,
            o.l2,
            o.linf
        );
    }
}
