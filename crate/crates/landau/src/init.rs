//! Grid construction, particle initialization from a density, and the
//! regularization-parameter rules.

use crate::error::{Error, Result};
use crate::model::{ParticleEnsemble, SpeciesSpec};
use crate::score::QuadratureGrid;
use crate::vec3::Vec3;

/// Element midpoints of `[center - L, center + L]^d` with `n` cells per axis,
/// in lexicographic axis order (x outermost). The grid is built once and
/// stays frozen for the whole simulation.
pub fn build_grid(spec: &SpeciesSpec, dim: usize) -> QuadratureGrid {
    let n = spec.grid_n;
    let h = spec.mesh_size();
    let lo = |axis: usize| spec.center[axis] - spec.half_width;
    let coord = |axis: usize, k: usize| lo(axis) + (k as f64 + 0.5) * h;

    let mut centers = Vec::with_capacity(n.pow(dim as u32));
    match dim {
        2 => {
            for ix in 0..n {
                let x = coord(0, ix);
                for iy in 0..n {
                    centers.push(Vec3::new(x, coord(1, iy), 0.0));
                }
            }
        }
        3 => {
            for ix in 0..n {
                let x = coord(0, ix);
                for iy in 0..n {
                    let y = coord(1, iy);
                    for iz in 0..n {
                        centers.push(Vec3::new(x, y, coord(2, iz)));
                    }
                }
            }
        }
        other => panic!("unsupported dimension {other}"),
    }

    QuadratureGrid {
        centers,
        cell_volume: h.powi(dim as i32),
        h,
        dim,
    }
}

/// Midpoint-quadrature initialization: particles sit at the grid centers and
/// carry weights `h^d f0(center)`. Zero-weight particles are retained so the
/// particle set stays aligned with the quadrature grid.
pub fn init_particles<F: Fn(Vec3) -> f64>(
    f0: F,
    grid: &QuadratureGrid,
    spec: &SpeciesSpec,
) -> Result<ParticleEnsemble> {
    let weights: Vec<f64> = grid
        .centers
        .iter()
        .map(|&c| grid.cell_volume * f0(c))
        .collect();
    if !weights.iter().any(|&w| w > 0.0) {
        return Err(Error::ZeroWeight {
            label: spec.label.clone(),
        });
    }
    Ok(ParticleEnsemble {
        weights,
        velocities: grid.centers.clone(),
    })
}

/// Regularization rule `eps = coeff * h^power`.
pub fn epsilon_from_h(h: f64, coeff: f64, power: f64) -> f64 {
    coeff * h.powf(power)
}

/// Half-width that matches the mass-weighted regularization of a reference
/// species: `L = (m_ref / m)^(1/power) L_ref`. With equal per-axis cell
/// counts this makes `m_ref eps_ref == m eps` up to rounding.
pub fn constrained_half_width(m_ref: f64, m: f64, l_ref: f64, power: f64) -> f64 {
    (m_ref / m).powf(1.0 / power) * l_ref
}
