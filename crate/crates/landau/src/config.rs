//! Scenario configuration: TOML schema, defaults, and validation.
//!
//! Parsing is strict (unknown keys are rejected) and structural errors are
//! reported as [`Error::Parse`]. Everything else is collected by `validate`
//! into a single [`Error::Validation`] listing every violation at once.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::analytic::validate_bkw;
use crate::error::{Error, Result};
use crate::integrate::Scheme;
use crate::model::KernelSpec;
use crate::vec3::Vec3;

pub const DEFAULT_EPS_COEFF: f64 = 0.64;
pub const DEFAULT_EPS_POWER: f64 = 1.98;
pub const DEFAULT_FP_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_FP_MAX_ITERS: usize = 200;

/// Half-width of one species: either a concrete value or derived from a
/// reference species so that `m_ref eps_ref == m eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HalfWidth {
    Value(f64),
    Constrained { reference: usize },
}

/// Where the species domain is centered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterRule {
    Origin,
    /// Center on the species' initial bulk velocity; lets drifting
    /// Maxwellians use a domain that hugs their support.
    BulkVelocity,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Exact-solution initial data with integration constant `c`.
    Bkw { c: f64, density: f64 },
    Maxwellian {
        density: f64,
        velocity: Vec3,
        temperature: f64,
    },
}

#[derive(Debug, Clone)]
pub struct SpeciesConfig {
    pub label: String,
    pub mass: f64,
    pub half_width: HalfWidth,
    pub center: CenterRule,
    pub grid_n: usize,
    pub epsilon_override: Option<f64>,
    pub eps_coeff: f64,
    pub eps_power: f64,
    pub initial: InitialCondition,
}

#[derive(Debug, Clone)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    pub fp_tolerance: f64,
    pub fp_max_iters: usize,
}

#[derive(Debug, Clone)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub snapshot_times: Vec<f64>,
    /// Record every k-th step; the first and last steps are always recorded.
    pub diagnostics_every: usize,
}

/// A fully validated scenario with all defaults applied.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub dim: usize,
    pub kernel: KernelSpec,
    pub species: Vec<SpeciesConfig>,
    pub time: TimeConfig,
    pub output: OutputConfig,
}

impl ScenarioConfig {
    /// Common BKW constant when every species uses exact-solution initial
    /// data; None otherwise.
    pub fn bkw_constant(&self) -> Option<f64> {
        let mut out = None;
        for s in &self.species {
            match s.initial {
                InitialCondition::Bkw { c, .. } => out = Some(c),
                InitialCondition::Maxwellian { .. } => return None,
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Raw (serde) layer: everything optional so validation can report all
// problems in one pass.

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    dim: Option<usize>,
    kernel: Option<RawKernel>,
    species: Option<Vec<RawSpecies>>,
    time: Option<RawTime>,
    output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKernel {
    gamma: Option<f64>,
    strength: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawHalfWidth {
    Value(f64),
    Keyword(String),
    Reference { constrained: usize },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpecies {
    label: Option<String>,
    mass: Option<f64>,
    half_width: Option<RawHalfWidth>,
    center: Option<String>,
    grid_n: Option<usize>,
    epsilon_override: Option<f64>,
    eps_coeff: Option<f64>,
    eps_power: Option<f64>,
    initial: Option<RawInitial>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawInitial {
    Bkw {
        c: Option<f64>,
        density: Option<f64>,
    },
    Maxwellian {
        density: Option<f64>,
        velocity: Option<Vec<f64>>,
        temperature: Option<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    dt: Option<f64>,
    t_final: Option<f64>,
    scheme: Option<Scheme>,
    fp_tolerance: Option<f64>,
    fp_max_iters: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    directory: Option<PathBuf>,
    snapshot_times: Option<Vec<f64>>,
    diagnostics_every: Option<usize>,
}

// ---------------------------------------------------------------------------

/// Parse and validate a scenario from TOML text.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    validate(raw)
}

/// Read, parse, and validate a scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

fn validate(raw: RawConfig) -> Result<ScenarioConfig> {
    let mut problems: Vec<String> = Vec::new();
    let mut problem = |msg: String| problems.push(msg);

    let dim = match raw.dim {
        Some(d @ (2 | 3)) => d,
        Some(d) => {
            problem(format!("dim must be 2 or 3, got {d}"));
            2
        }
        None => {
            problem("missing field: dim".into());
            2
        }
    };

    let raw_species = raw.species.unwrap_or_default();
    let species_count = raw_species.len();
    if species_count == 0 {
        problem("at least one [[species]] block is required".into());
    }

    // Kernel.
    let mut gamma = 0.0;
    let mut strength = vec![vec![0.0; species_count]; species_count];
    match raw.kernel {
        None => problem("missing section: [kernel]".into()),
        Some(k) => {
            match k.gamma {
                None => problem("missing field: kernel.gamma".into()),
                Some(g) => {
                    let lo = -(dim as f64) - 1.0;
                    if !(g >= lo && g <= 1.0) {
                        problem(format!("kernel.gamma = {g} outside [{lo}, 1]"));
                    }
                    gamma = g;
                }
            }
            match k.strength {
                None => problem("missing field: kernel.strength".into()),
                Some(b) => {
                    let square =
                        b.len() == species_count && b.iter().all(|r| r.len() == species_count);
                    if !square {
                        problem(format!(
                            "kernel.strength must be a {species_count}x{species_count} matrix"
                        ));
                    } else {
                        for i in 0..species_count {
                            for j in 0..species_count {
                                if !(b[i][j] >= 0.0) {
                                    problem(format!(
                                        "kernel.strength[{i}][{j}] = {} must be nonnegative",
                                        b[i][j]
                                    ));
                                }
                                if b[i][j] != b[j][i] {
                                    problem(format!(
                                        "kernel.strength is asymmetric at ({i},{j}): {} != {} \
                                         (strength symmetry is required)",
                                        b[i][j], b[j][i]
                                    ));
                                }
                            }
                        }
                        strength = b;
                    }
                }
            }
        }
    }

    // Species.
    let mut species: Vec<SpeciesConfig> = Vec::with_capacity(species_count);
    for (i, s) in raw_species.into_iter().enumerate() {
        let label = s.label.unwrap_or_else(|| format!("species{}", i + 1));
        let mass = match s.mass {
            Some(m) if m > 0.0 && m.is_finite() => m,
            Some(m) => {
                problem(format!("species {i}: mass = {m} must be positive"));
                1.0
            }
            None => {
                problem(format!("species {i}: missing field mass"));
                1.0
            }
        };
        let half_width = match s.half_width {
            Some(RawHalfWidth::Value(l)) if l > 0.0 && l.is_finite() => HalfWidth::Value(l),
            Some(RawHalfWidth::Value(l)) => {
                problem(format!("species {i}: half_width = {l} must be positive"));
                HalfWidth::Value(1.0)
            }
            Some(RawHalfWidth::Keyword(word)) if word == "constrained" => {
                // Bare keyword form: the reference is the other species,
                // which is unambiguous only for two-species systems.
                if species_count == 2 {
                    HalfWidth::Constrained { reference: 1 - i }
                } else {
                    problem(format!(
                        "species {i}: half_width = \"constrained\" needs an explicit \
                         reference for {species_count} species; use {{ constrained = <index> }}"
                    ));
                    HalfWidth::Value(1.0)
                }
            }
            Some(RawHalfWidth::Keyword(word)) => {
                problem(format!(
                    "species {i}: half_width string must be \"constrained\", got {word:?}"
                ));
                HalfWidth::Value(1.0)
            }
            Some(RawHalfWidth::Reference { constrained }) => HalfWidth::Constrained {
                reference: constrained,
            },
            None => {
                problem(format!("species {i}: missing field half_width"));
                HalfWidth::Value(1.0)
            }
        };
        let center = match s.center.as_deref() {
            None | Some("origin") => CenterRule::Origin,
            Some("bulk_velocity") => CenterRule::BulkVelocity,
            Some(other) => {
                problem(format!(
                    "species {i}: center must be \"origin\" or \"bulk_velocity\", got {other:?}"
                ));
                CenterRule::Origin
            }
        };
        let grid_n = match s.grid_n {
            Some(n) if n >= 2 => n,
            Some(n) => {
                problem(format!("species {i}: grid_n = {n} must be >= 2"));
                2
            }
            None => {
                problem(format!("species {i}: missing field grid_n"));
                2
            }
        };
        if let Some(e) = s.epsilon_override {
            if !(e > 0.0 && e.is_finite()) {
                problem(format!(
                    "species {i}: epsilon_override = {e} must be positive"
                ));
            }
        }
        let eps_coeff = s.eps_coeff.unwrap_or(DEFAULT_EPS_COEFF);
        let eps_power = s.eps_power.unwrap_or(DEFAULT_EPS_POWER);
        if !(eps_coeff > 0.0) {
            problem(format!(
                "species {i}: eps_coeff = {eps_coeff} must be positive"
            ));
        }
        if !(eps_power > 0.0) {
            problem(format!(
                "species {i}: eps_power = {eps_power} must be positive"
            ));
        }
        let initial = match s.initial {
            None => {
                problem(format!("species {i}: missing [species.initial] table"));
                InitialCondition::Bkw {
                    c: 0.5,
                    density: 1.0,
                }
            }
            Some(RawInitial::Bkw { c, density }) => {
                let c = match c {
                    Some(c) if c > 0.0 && c < 1.0 => c,
                    Some(c) => {
                        problem(format!("species {i}: bkw c = {c} must lie in (0, 1)"));
                        0.5
                    }
                    None => {
                        problem(format!("species {i}: missing field initial.c"));
                        0.5
                    }
                };
                let density = density.unwrap_or(1.0);
                if !(density > 0.0) {
                    problem(format!(
                        "species {i}: bkw density = {density} must be positive"
                    ));
                }
                InitialCondition::Bkw { c, density }
            }
            Some(RawInitial::Maxwellian {
                density,
                velocity,
                temperature,
            }) => {
                let density = match density {
                    Some(n) if n > 0.0 => n,
                    Some(n) => {
                        problem(format!("species {i}: density = {n} must be positive"));
                        1.0
                    }
                    None => {
                        problem(format!("species {i}: missing field initial.density"));
                        1.0
                    }
                };
                let velocity = match velocity {
                    Some(u) if u.len() == dim && u.iter().all(|x| x.is_finite()) => {
                        Vec3::from_slice(&u)
                    }
                    Some(u) => {
                        problem(format!(
                            "species {i}: initial.velocity must be {dim} finite components, \
                             got {u:?}"
                        ));
                        Vec3::ZERO
                    }
                    None => {
                        problem(format!("species {i}: missing field initial.velocity"));
                        Vec3::ZERO
                    }
                };
                let temperature = match temperature {
                    Some(t) if t > 0.0 => t,
                    Some(t) => {
                        problem(format!("species {i}: temperature = {t} must be positive"));
                        1.0
                    }
                    None => {
                        problem(format!("species {i}: missing field initial.temperature"));
                        1.0
                    }
                };
                InitialCondition::Maxwellian {
                    density,
                    velocity,
                    temperature,
                }
            }
        };
        species.push(SpeciesConfig {
            label,
            mass,
            half_width,
            center,
            grid_n,
            epsilon_override: s.epsilon_override,
            eps_coeff,
            eps_power,
            initial,
        });
    }

    // Cross-species constraints.
    let constrained: Vec<usize> = species
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s.half_width, HalfWidth::Constrained { .. }))
        .map(|(i, _)| i)
        .collect();
    if constrained.len() > 1 {
        problem(format!(
            "at most one species may use a constrained half_width, got {}",
            constrained.len()
        ));
    }
    for &i in &constrained {
        if let HalfWidth::Constrained { reference } = species[i].half_width {
            if reference >= species.len() || reference == i {
                problem(format!(
                    "species {i}: constrained half_width references invalid species {reference}"
                ));
            } else {
                if !matches!(species[reference].half_width, HalfWidth::Value(_)) {
                    problem(format!(
                        "species {i}: constrained half_width must reference a species with a \
                         concrete half_width"
                    ));
                }
                if species[reference].grid_n != species[i].grid_n {
                    problem(format!(
                        "species {i}: constrained half_width requires equal grid_n with \
                         species {reference} ({} vs {})",
                        species[i].grid_n, species[reference].grid_n
                    ));
                }
                if species[reference].eps_coeff != species[i].eps_coeff
                    || species[reference].eps_power != species[i].eps_power
                {
                    problem(format!(
                        "species {i}: constrained half_width requires the same eps_coeff and \
                         eps_power as species {reference}"
                    ));
                }
            }
        }
        if species[i].epsilon_override.is_some() {
            problem(format!(
                "species {i}: constrained half_width cannot be combined with epsilon_override"
            ));
        }
    }

    // Exact-solution initial data: all species or none, one common constant,
    // Maxwell kernel, and matching beta values.
    let bkw_flags: Vec<bool> = species
        .iter()
        .map(|s| matches!(s.initial, InitialCondition::Bkw { .. }))
        .collect();
    if bkw_flags.iter().any(|&b| b) {
        if !bkw_flags.iter().all(|&b| b) {
            problem("bkw initial data must be used by every species or none".into());
        } else {
            if species.len() != 2 {
                problem(format!(
                    "bkw initial data supports exactly 2 species, got {}",
                    species.len()
                ));
            }
            let constants: Vec<f64> = species
                .iter()
                .filter_map(|s| match s.initial {
                    InitialCondition::Bkw { c, .. } => Some(c),
                    _ => None,
                })
                .collect();
            if constants.windows(2).any(|w| w[0] != w[1]) {
                problem(format!(
                    "bkw initial data requires one common constant c, got {constants:?}"
                ));
            }
            if gamma != 0.0 {
                problem(format!(
                    "bkw initial data requires the Maxwell kernel (gamma = 0), got gamma = {gamma}"
                ));
            }
            if species.len() == 2 && strength.len() == 2 {
                let masses: Vec<f64> = species.iter().map(|s| s.mass).collect();
                let densities: Vec<f64> = species
                    .iter()
                    .map(|s| match s.initial {
                        InitialCondition::Bkw { density, .. } => density,
                        _ => 1.0,
                    })
                    .collect();
                if let Err(e) = validate_bkw(&masses, &densities, &strength) {
                    problem(e.to_string());
                }
            }
        }
    }

    // Time.
    let time = match raw.time {
        None => {
            problem("missing section: [time]".into());
            TimeConfig {
                dt: 0.01,
                t_final: 0.0,
                scheme: Scheme::ForwardEuler,
                fp_tolerance: DEFAULT_FP_TOLERANCE,
                fp_max_iters: DEFAULT_FP_MAX_ITERS,
            }
        }
        Some(t) => {
            let dt = match t.dt {
                Some(dt) if dt > 0.0 && dt.is_finite() => dt,
                Some(dt) => {
                    problem(format!("time.dt = {dt} must be positive"));
                    0.01
                }
                None => {
                    problem("missing field: time.dt".into());
                    0.01
                }
            };
            let t_final = match t.t_final {
                Some(tf) if tf >= 0.0 && tf.is_finite() => tf,
                Some(tf) => {
                    problem(format!("time.t_final = {tf} must be nonnegative"));
                    0.0
                }
                None => {
                    problem("missing field: time.t_final".into());
                    0.0
                }
            };
            let fp_tolerance = t.fp_tolerance.unwrap_or(DEFAULT_FP_TOLERANCE);
            if !(fp_tolerance > 0.0) {
                problem(format!(
                    "time.fp_tolerance = {fp_tolerance} must be positive"
                ));
            }
            let fp_max_iters = t.fp_max_iters.unwrap_or(DEFAULT_FP_MAX_ITERS);
            if fp_max_iters == 0 {
                problem("time.fp_max_iters must be at least 1".into());
            }
            TimeConfig {
                dt,
                t_final,
                scheme: t.scheme.unwrap_or(Scheme::ForwardEuler),
                fp_tolerance,
                fp_max_iters,
            }
        }
    };

    // Output.
    let output = match raw.output {
        None => OutputConfig {
            directory: PathBuf::from("out"),
            snapshot_times: Vec::new(),
            diagnostics_every: 1,
        },
        Some(o) => {
            let snapshot_times = o.snapshot_times.unwrap_or_default();
            if snapshot_times.iter().any(|t| !t.is_finite() || *t < 0.0) {
                problem(format!(
                    "output.snapshot_times must be nonnegative and finite, got {snapshot_times:?}"
                ));
            }
            let diagnostics_every = o.diagnostics_every.unwrap_or(1);
            if diagnostics_every == 0 {
                problem("output.diagnostics_every must be at least 1".into());
            }
            OutputConfig {
                directory: o.directory.unwrap_or_else(|| PathBuf::from("out")),
                snapshot_times,
                diagnostics_every,
            }
        }
    };

    if problems.is_empty() {
        Ok(ScenarioConfig {
            dim,
            kernel: KernelSpec { gamma, strength },
            species,
            time,
            output,
        })
    } else {
        Err(Error::Validation(problems))
    }
}
