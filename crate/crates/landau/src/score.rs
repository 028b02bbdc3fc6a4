//! Mollified density reconstruction and the regularized score field.
//!
//! The particle measure is smoothed with an isotropic Gaussian mollifier of
//! variance `epsilon` per axis. The score is the gradient of the variational
//! derivative of the mollified entropy, approximated with the midpoint rule
//! on a quadrature grid that is frozen at initialization and never follows
//! the particles. Mass drifting outside the original domain therefore
//! degrades the quadrature; the shipped scenarios keep the support inside.
//!
//! All functions here are pure. Outer loops parallelize over output elements
//! only, and the inner sums run in fixed (storage) order, so results are
//! bitwise identical for any thread count.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{ParticleEnsemble, SpeciesSpec};
use crate::vec3::Vec3;

/// Exponents beyond this underflow `exp(-x)` to zero; used to skip
/// contributions that cannot change any output bit.
const EXP_UNDERFLOW: f64 = 745.0;

/// Midpoint-rule grid: element centers of the frozen species domain.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    /// Element centers in lexicographic axis order.
    pub centers: Vec<Vec3>,
    /// Element volume `h^d`.
    pub cell_volume: f64,
    /// Mesh size `h`.
    pub h: f64,
    pub dim: usize,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

/// Gaussian mollifier `(2 pi eps)^(-d/2) exp(-|x|^2 / (2 eps))`.
pub fn mollifier(x: Vec3, epsilon: f64, dim: usize) -> f64 {
    gaussian_norm(epsilon, dim) * (-x.norm_sq() / (2.0 * epsilon)).exp()
}

fn gaussian_norm(epsilon: f64, dim: usize) -> f64 {
    (2.0 * PI * epsilon).powi(-(dim as i32)).sqrt()
}

fn require_positive_weight(ensemble: &ParticleEnsemble, species: &SpeciesSpec) -> Result<()> {
    if ensemble.total_weight() > 0.0 {
        Ok(())
    } else {
        Err(Error::ZeroWeight {
            label: species.label.clone(),
        })
    }
}

/// Log of the mollified density `log sum_r w_r psi(x - v_r)` at each point.
///
/// Evaluated as a streaming log-sum-exp so the result stays finite wherever
/// any particle is within floating range; a naive sum underflows to zero far
/// from the support and would poison the score integral with `-inf`.
pub fn log_blob_density(
    ensemble: &ParticleEnsemble,
    species: &SpeciesSpec,
    dim: usize,
    points: &[Vec3],
) -> Result<Vec<f64>> {
    require_positive_weight(ensemble, species)?;
    let epsilon = species.epsilon;
    let inv_two_eps = 1.0 / (2.0 * epsilon);
    let log_norm = gaussian_norm(epsilon, dim).ln();
    let log_w: Vec<f64> = ensemble.weights.iter().map(|w| w.ln()).collect();
    let velocities = &ensemble.velocities;

    let out = points
        .par_iter()
        .map(|&x| {
            let mut max = f64::NEG_INFINITY;
            let mut sum = 0.0f64;
            for (lw, v) in log_w.iter().zip(velocities.iter()) {
                if *lw == f64::NEG_INFINITY {
                    continue; // zero-weight particle
                }
                let a = lw - (x - *v).norm_sq() * inv_two_eps;
                if a <= max - EXP_UNDERFLOW {
                    continue;
                }
                if a > max {
                    sum = sum * (max - a).exp() + 1.0;
                    max = a;
                } else {
                    sum += (a - max).exp();
                }
            }
            max + sum.ln() + log_norm
        })
        .collect();
    Ok(out)
}

/// Mollified density `sum_r w_r psi(x - v_r)` at each point, linear scale.
/// May underflow to zero far from the support.
pub fn blob_density(
    ensemble: &ParticleEnsemble,
    species: &SpeciesSpec,
    dim: usize,
    points: &[Vec3],
) -> Vec<f64> {
    let epsilon = species.epsilon;
    let inv_two_eps = 1.0 / (2.0 * epsilon);
    let norm = gaussian_norm(epsilon, dim);
    let weights = &ensemble.weights;
    let velocities = &ensemble.velocities;

    points
        .par_iter()
        .map(|&x| {
            let mut sum = 0.0f64;
            for (w, v) in weights.iter().zip(velocities.iter()) {
                let ex = (x - *v).norm_sq() * inv_two_eps;
                if ex > EXP_UNDERFLOW {
                    continue;
                }
                sum += w * (-ex).exp();
            }
            norm * sum
        })
        .collect()
}

/// Log density at every grid center; the per-step input shared by the score
/// and entropy quadratures.
pub fn grid_log_density(
    ensemble: &ParticleEnsemble,
    species: &SpeciesSpec,
    grid: &QuadratureGrid,
) -> Result<Vec<f64>> {
    log_blob_density(ensemble, species, grid.dim, &grid.centers)
}

/// Score integral from cached grid log-density values:
/// `F(v) = h^d sum_h grad psi(v - v_h) log_density_h`.
pub fn score_from_grid_log(
    grid: &QuadratureGrid,
    grid_log: &[f64],
    epsilon: f64,
    queries: &[Vec3],
) -> Vec<Vec3> {
    assert_eq!(grid.len(), grid_log.len(), "grid/log length mismatch");
    let inv_two_eps = 1.0 / (2.0 * epsilon);
    // grad psi(x) = -(x / eps) psi(x); constants factored out of the sum.
    let prefactor = -grid.cell_volume * gaussian_norm(epsilon, grid.dim) / epsilon;
    let centers = &grid.centers;

    queries
        .par_iter()
        .map(|&v| {
            let mut acc = Vec3::ZERO;
            for (c, l) in centers.iter().zip(grid_log.iter()) {
                let x = v - *c;
                let ex = x.norm_sq() * inv_two_eps;
                if ex > EXP_UNDERFLOW {
                    continue;
                }
                acc += ((-ex).exp() * l) * x;
            }
            prefactor * acc
        })
        .collect()
}

/// Score field at the query points.
///
/// The grid log pass costs O(M N) per species and is computed once here,
/// then reused across every query.
pub fn score(
    ensemble: &ParticleEnsemble,
    species: &SpeciesSpec,
    grid: &QuadratureGrid,
    queries: &[Vec3],
) -> Result<Vec<Vec3>> {
    let grid_log = grid_log_density(ensemble, species, grid)?;
    Ok(score_from_grid_log(
        grid,
        &grid_log,
        species.epsilon,
        queries,
    ))
}

/// Midpoint-rule entropy `h^d sum_h density_h log(density_h)` of the
/// mollified reconstruction.
pub fn discrete_entropy(
    ensemble: &ParticleEnsemble,
    species: &SpeciesSpec,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let grid_log = grid_log_density(ensemble, species, grid)?;
    // exp(l) underflows to exactly 0 far from the support and 0 * l == 0
    // for finite l, so the tail contributes nothing rather than NaN.
    let sum: f64 = grid_log.iter().map(|&l| l.exp() * l).sum();
    Ok(grid.cell_volume * sum)
}
