//! The regularized score of a grid-initialized Maxwellian against its closed
//! form -(v - u) / (sigma^2 + eps), sampled along the x axis.
//!
//! ```bash
//! cargo run --release -p landau --example score_profile
//! ```

use landau::analytic::{maxwellian_density, MaxwellianParams};
use landau::init::{build_grid, epsilon_from_h, init_particles};
use landau::model::SpeciesSpec;
use landau::score::score;
use landau::vec3::Vec3;

fn main() {
    let mass = 1.0f64;
    let temperature = 0.25;
    let sigma2 = temperature / mass;
    let sigma = sigma2.sqrt();
    let u = Vec3::new(0.2, -0.1, 0.0);
    let n = 50;
    let spec = SpeciesSpec {
        mass,
        half_width: 6.0 * sigma,
        center: u,
        grid_n: n,
        epsilon: epsilon_from_h(12.0 * sigma / n as f64, 0.64, 1.98),
        label: "maxwellian".into(),
    };
    let grid = build_grid(&spec, 2);
    let params = MaxwellianParams {
        density: 1.0,
        mass,
        bulk_velocity: u,
        temperature,
    };
    let ensemble =
        init_particles(|v| maxwellian_density(v, &params, 2), &grid, &spec).expect("particles");

    let queries: Vec<Vec3> = (-8..=8)
        .map(|k| u + Vec3::new(0.25 * sigma * k as f64, 0.0, 0.0))
        .collect();
    let field = score(&ensemble, &spec, &grid, &queries).expect("score");

    let denom = sigma2 + spec.epsilon;
    println!("eps = {:.5e}, sigma^2 = {sigma2}", spec.epsilon);
    println!(
        "{:>10} {:>14} {:>14} {:>12}",
        "(v-u)_x", "F_x", "closed form", "rel err"
    );
    for (q, f) in queries.iter().zip(&field) {
        let offset = (*q - u).x;
        let want = -offset / denom;
        let rel = if want.abs() > 0.0 {
            ((f.x - want) / want).abs()
        } else {
            f.x.abs()
        };
        println!("{offset:>10.4} {:>14.6e} {want:>14.6e} {rel:>12.3e}", f.x);
    }
}
