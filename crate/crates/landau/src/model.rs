//! Shared domain types and the global invariants of a simulation state.
//!
//! A state couples `s` species. Each species carries constant particle
//! weights and time-evolving particle velocities; the weights are set once at
//! initialization and never touched again, which is what makes mass
//! conservation exact. All floating-point data is `f64`: the conservation
//! checks operate at 1e-12 relative scale and need the full mantissa.

use std::fmt;

use crate::vec3::Vec3;

/// Physical and numerical parameters of one species.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesSpec {
    /// Particle mass, > 0.
    pub mass: f64,
    /// Velocity-domain half-width: the species lives on `[center - L, center + L]^d`.
    pub half_width: f64,
    /// Domain center in velocity space.
    pub center: Vec3,
    /// Subdivisions per axis, >= 2. The particle count is `grid_n^d`.
    pub grid_n: usize,
    /// Mollifier regularization parameter, > 0.
    pub epsilon: f64,
    pub label: String,
}

impl SpeciesSpec {
    /// Mesh size `h = 2 L / n`, always derived from the stored fields.
    pub fn mesh_size(&self) -> f64 {
        2.0 * self.half_width / self.grid_n as f64
    }

    /// Particle count `n^d` for this species.
    pub fn particle_count(&self, dim: usize) -> usize {
        self.grid_n.pow(dim as u32)
    }
}

/// Per-species particle data: constant weights, evolving velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble {
    pub weights: Vec<f64>,
    pub velocities: Vec<Vec3>,
}

impl ParticleEnsemble {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Sum of particle weights; equals the species number density.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Collision-kernel exponent and pairwise interaction strengths.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    /// Relative-speed exponent, in `[-d-1, 1]`. 0 is the Maxwell case, -3 the
    /// Coulomb case.
    pub gamma: f64,
    /// Symmetric `s x s` matrix of nonnegative interaction strengths.
    pub strength: Vec<Vec<f64>>,
}

impl KernelSpec {
    pub fn species_count(&self) -> usize {
        self.strength.len()
    }

    pub fn is_square(&self) -> bool {
        let s = self.strength.len();
        self.strength.iter().all(|row| row.len() == s)
    }

    /// Exact symmetry check; the reciprocity identity between ordered species
    /// pairs holds only for symmetric strengths.
    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let s = self.strength.len();
        for i in 0..s {
            for j in (i + 1)..s {
                if self.strength[i][j] != self.strength[j][i] {
                    return false;
                }
            }
        }
        true
    }
}

/// Full simulation state: dimension, species parameters, particle data,
/// kernel, and current time.
#[derive(Debug, Clone)]
pub struct SystemState {
    /// Velocity-space dimension, 2 or 3.
    pub dim: usize,
    pub species: Vec<SpeciesSpec>,
    pub ensembles: Vec<ParticleEnsemble>,
    pub kernel: KernelSpec,
    pub time: f64,
}

impl SystemState {
    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    /// Total particle count over all species.
    pub fn total_particles(&self) -> usize {
        self.ensembles.iter().map(|e| e.len()).sum()
    }
}

/// One violated invariant, with enough context to locate it.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Species index when the violation is species-local.
    pub species: Option<usize>,
    /// Name of the offending field or invariant.
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.species {
            Some(i) => write!(f, "species {}: {}: {}", i, self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

fn violation(species: Option<usize>, field: &'static str, message: String) -> Violation {
    Violation {
        species,
        field,
        message,
    }
}

/// Check every structural invariant of a state. Returns all violations found;
/// an empty list means the state is well formed. Never aborts.
pub fn validate_state(state: &SystemState) -> Vec<Violation> {
    let mut out = Vec::new();

    if state.dim != 2 && state.dim != 3 {
        out.push(violation(
            None,
            "dim",
            format!("dimension must be 2 or 3, got {}", state.dim),
        ));
    }
    if state.species.is_empty() {
        out.push(violation(None, "species", "no species defined".to_string()));
    }
    if !(state.time >= 0.0) {
        out.push(violation(
            None,
            "time",
            format!("time must be nonnegative, got {}", state.time),
        ));
    }
    if state.ensembles.len() != state.species.len() {
        out.push(violation(
            None,
            "ensembles",
            format!(
                "{} ensembles for {} species",
                state.ensembles.len(),
                state.species.len()
            ),
        ));
    }

    let s = state.species.len();
    if state.kernel.strength.len() != s || !state.kernel.is_square() {
        out.push(violation(
            None,
            "strength shape",
            format!("strength matrix must be {s}x{s}"),
        ));
    } else {
        if !state.kernel.is_symmetric() {
            out.push(violation(
                None,
                "strength symmetry",
                "strength matrix is not symmetric".to_string(),
            ));
        }
        for (i, row) in state.kernel.strength.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                if !(b >= 0.0) {
                    out.push(violation(
                        None,
                        "strength sign",
                        format!("B[{i}][{j}] = {b} must be nonnegative"),
                    ));
                }
            }
        }
    }
    let gamma_min = -(state.dim as f64) - 1.0;
    if !(state.kernel.gamma >= gamma_min && state.kernel.gamma <= 1.0) {
        out.push(violation(
            None,
            "gamma",
            format!("gamma = {} outside [{gamma_min}, 1]", state.kernel.gamma),
        ));
    }

    for (i, spec) in state.species.iter().enumerate() {
        if !(spec.mass > 0.0) {
            out.push(violation(
                Some(i),
                "mass",
                format!("must be > 0, got {}", spec.mass),
            ));
        }
        if !(spec.half_width > 0.0) {
            out.push(violation(
                Some(i),
                "half_width",
                format!("must be > 0, got {}", spec.half_width),
            ));
        }
        if spec.grid_n < 2 {
            out.push(violation(
                Some(i),
                "grid_n",
                format!("must be >= 2, got {}", spec.grid_n),
            ));
        }
        if !(spec.epsilon > 0.0) {
            out.push(violation(
                Some(i),
                "epsilon",
                format!("must be > 0, got {}", spec.epsilon),
            ));
        }
    }

    for (i, ens) in state.ensembles.iter().enumerate() {
        if ens.weights.len() != ens.velocities.len() {
            out.push(violation(
                Some(i),
                "particle count",
                format!(
                    "{} weights but {} velocities",
                    ens.weights.len(),
                    ens.velocities.len()
                ),
            ));
        }
        if let Some(spec) = state.species.get(i) {
            let expect = spec.particle_count(state.dim);
            if ens.weights.len() != expect {
                out.push(violation(
                    Some(i),
                    "particle count",
                    format!(
                        "ensemble holds {} particles but grid_n^d = {}",
                        ens.weights.len(),
                        expect
                    ),
                ));
            }
        }
        if let Some((p, &w)) = ens
            .weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(**w >= 0.0) || !w.is_finite())
        {
            out.push(violation(
                Some(i),
                "weights",
                format!("weight {p} = {w} must be finite and nonnegative"),
            ));
        }
        if let Some((p, _)) = ens
            .velocities
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite())
        {
            out.push(violation(
                Some(i),
                "velocities",
                format!("velocity {p} is non-finite"),
            ));
        }
        if state.dim == 2 {
            if let Some((p, v)) = ens.velocities.iter().enumerate().find(|(_, v)| v.z != 0.0) {
                out.push(violation(
                    Some(i),
                    "dim padding",
                    format!("velocity {p} has z = {} in a 2-D state", v.z),
                ));
            }
        }
    }

    out
}

/// Per-species moments at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeciesMoments {
    pub number_density: f64,
    pub mass_density: f64,
    pub bulk_velocity: Vec3,
    pub temperature: f64,
}

/// System totals at one instant. `entropy` is NaN until filled in by a full
/// diagnostics record (moment-only paths do not evaluate the quadrature).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Totals {
    pub number_density: f64,
    pub mass_density: f64,
    pub momentum: Vec3,
    pub bulk_velocity: Vec3,
    pub kinetic_energy: f64,
    pub temperature: f64,
    pub entropy: f64,
}

/// Moments and entropy of the whole system at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentRecord {
    pub time: f64,
    pub per_species: Vec<SpeciesMoments>,
    pub totals: Totals,
}
