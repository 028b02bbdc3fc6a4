//! The exact two-species BKW solution by itself: width factor, mass and
//! temperature invariants, and approach to the unit-temperature Maxwellian.
//! No particles involved; everything here is closed-form plus quadrature.
//!
//! ```bash
//! cargo run --release -p landau --example bkw_exact
//! ```

use landau::analytic::{bkw_density, bkw_k, maxwellian_density, BkwParams, MaxwellianParams};
use landau::vec3::Vec3;

fn main() {
    let strength = vec![vec![0.125, 0.0625], vec![0.0625, 0.03125]];
    let params =
        BkwParams::new(vec![2.0, 1.0], vec![1.0, 1.0], strength, 0.5, 2).expect("valid parameters");
    println!("common beta: {}", params.beta);

    // Quadrature mesh for the moment checks.
    let half_width = 8.0;
    let n = 400;
    let h = 2.0 * half_width / n as f64;
    let mut cells = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            cells.push(Vec3::new(
                -half_width + (i as f64 + 0.5) * h,
                -half_width + (j as f64 + 0.5) * h,
                0.0,
            ));
        }
    }
    let vol = h * h;

    println!(
        "{:>6} {:>10} {:>12} {:>12} {:>12}",
        "t", "K(t)", "mass_1", "mass_2", "T_total"
    );
    for t in [0.0, 1.0, 2.0, 5.0, 10.0] {
        let k = bkw_k(t, params.c, params.beta, params.dim);
        let mut mass = [0.0f64; 2];
        let mut second = 0.0;
        let mut number = 0.0;
        for &v in &cells {
            for i in 0..2 {
                let f = vol * bkw_density(t, v, i, &params);
                mass[i] += f;
                second += params.masses[i] * f * v.norm_sq();
                number += f;
            }
        }
        println!(
            "{:>6.1} {:>10.6} {:>12.8} {:>12.8} {:>12.8}",
            t,
            k,
            mass[0],
            mass[1],
            second / (2.0 * number)
        );
    }

    // Late-time limit: a Maxwellian at the normalized temperature.
    let t_late = 50.0;
    for i in 0..2 {
        let maxwellian = MaxwellianParams {
            density: params.densities[i],
            mass: params.masses[i],
            bulk_velocity: Vec3::ZERO,
            temperature: 1.0,
        };
        let gap = cells
            .iter()
            .map(|&v| {
                (bkw_density(t_late, v, i, &params) - maxwellian_density(v, &maxwellian, 2)).abs()
            })
            .fold(0.0, f64::max);
        println!(
            "species {}: max gap to the unit Maxwellian at t = {t_late}: {gap:.3e}",
            i + 1
        );
    }
}
