//! Particle-level moments, error norms against a reference density, and the
//! per-step diagnostics record.
//!
//! All reductions run serially in storage order so records are bitwise
//! reproducible regardless of thread count.

use crate::error::{Error, Result};
use crate::model::{
    MomentRecord, ParticleEnsemble, SpeciesMoments, SpeciesSpec, SystemState, Totals,
};
use crate::score::{blob_density, discrete_entropy, QuadratureGrid};
use crate::vec3::Vec3;

/// Number density, mass density, bulk velocity, and temperature of one
/// species: `n = sum w`, `rho = m n`, `u = sum w v / n`,
/// `T = m sum w |v - u|^2 / (d n)`.
pub fn species_moments(
    ensemble: &ParticleEnsemble,
    spec: &SpeciesSpec,
    dim: usize,
) -> Result<SpeciesMoments> {
    let number_density = ensemble.total_weight();
    if !(number_density > 0.0) {
        return Err(Error::ZeroWeight {
            label: spec.label.clone(),
        });
    }
    let mut momentum = Vec3::ZERO;
    for (w, v) in ensemble.weights.iter().zip(&ensemble.velocities) {
        momentum += *w * *v;
    }
    let bulk_velocity = momentum * (1.0 / number_density);
    let mut spread = 0.0;
    for (w, v) in ensemble.weights.iter().zip(&ensemble.velocities) {
        spread += w * (*v - bulk_velocity).norm_sq();
    }
    let temperature = spec.mass * spread / (dim as f64 * number_density);
    Ok(SpeciesMoments {
        number_density,
        mass_density: spec.mass * number_density,
        bulk_velocity,
        temperature,
    })
}

/// System totals. The entropy field is left NaN; [`record`] fills it in.
pub fn total_moments(state: &SystemState) -> Result<MomentRecord> {
    let per_species: Vec<SpeciesMoments> = state
        .species
        .iter()
        .zip(&state.ensembles)
        .map(|(spec, ens)| species_moments(ens, spec, state.dim))
        .collect::<Result<_>>()?;

    let number_density: f64 = per_species.iter().map(|m| m.number_density).sum();
    let mass_density: f64 = per_species.iter().map(|m| m.mass_density).sum();

    let mut momentum = Vec3::ZERO;
    let mut kinetic_energy = 0.0;
    for (spec, ens) in state.species.iter().zip(&state.ensembles) {
        for (w, v) in ens.weights.iter().zip(&ens.velocities) {
            momentum += (spec.mass * w) * *v;
            kinetic_energy += spec.mass * w * v.norm_sq();
        }
    }
    let bulk_velocity = momentum * (1.0 / mass_density);

    let mut spread = 0.0;
    for (spec, ens) in state.species.iter().zip(&state.ensembles) {
        for (w, v) in ens.weights.iter().zip(&ens.velocities) {
            spread += spec.mass * w * (*v - bulk_velocity).norm_sq();
        }
    }
    let temperature = spread / (state.dim as f64 * number_density);

    Ok(MomentRecord {
        time: state.time,
        per_species,
        totals: Totals {
            number_density,
            mass_density,
            momentum,
            bulk_velocity,
            kinetic_energy,
            temperature,
            entropy: f64::NAN,
        },
    })
}

/// Complete diagnostics row: totals plus the summed per-species discrete
/// entropy. Pure: repeated calls on the same state are bitwise equal.
pub fn record(state: &SystemState, grids: &[QuadratureGrid]) -> Result<MomentRecord> {
    let mut rec = total_moments(state)?;
    let mut entropy = 0.0;
    for ((spec, ens), grid) in state.species.iter().zip(&state.ensembles).zip(grids) {
        entropy += discrete_entropy(ens, spec, grid)?;
    }
    rec.totals.entropy = entropy;
    Ok(rec)
}

/// Discrete norms of the gap between the mollified particle reconstruction
/// and a reference density, both evaluated on the species quadrature grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub rel_l1: f64,
    pub rel_l2: f64,
    pub rel_linf: f64,
}

/// `L^p` errors `(sum_h h^d |f_rec(v_h) - f(v_h)|^p)^(1/p)` for p = 1, 2,
/// the max-norm error, and their relative versions (divided by the same norm
/// of the reference on the same grid).
pub fn error_norms<F: Fn(Vec3) -> f64>(
    ensemble: &ParticleEnsemble,
    spec: &SpeciesSpec,
    grid: &QuadratureGrid,
    exact: F,
) -> ErrorNorms {
    let reconstructed = blob_density(ensemble, spec, grid.dim, &grid.centers);
    let mut diff1 = 0.0;
    let mut diff2 = 0.0;
    let mut diff_inf = 0.0f64;
    let mut ref1 = 0.0;
    let mut ref2 = 0.0;
    let mut ref_inf = 0.0f64;
    for (&c, &f_rec) in grid.centers.iter().zip(&reconstructed) {
        let f = exact(c);
        let d = (f_rec - f).abs();
        diff1 += d;
        diff2 += d * d;
        diff_inf = diff_inf.max(d);
        let a = f.abs();
        ref1 += a;
        ref2 += a * a;
        ref_inf = ref_inf.max(a);
    }
    let vol = grid.cell_volume;
    let l1 = vol * diff1;
    let l2 = (vol * diff2).sqrt();
    let n1 = vol * ref1;
    let n2 = (vol * ref2).sqrt();
    ErrorNorms {
        l1,
        l2,
        linf: diff_inf,
        rel_l1: l1 / n1,
        rel_l2: l2 / n2,
        rel_linf: diff_inf / ref_inf,
    }
}
