//! CSV writers: diagnostics time series, particle snapshots, and density
//! dumps on the quadrature grid.
//!
//! All floats are printed with 17 significant digits so files round-trip
//! exactly and bitwise comparisons between runs are meaningful. Lines end
//! with LF.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{MomentRecord, ParticleEnsemble};
use crate::score::QuadratureGrid;

/// Round-trip-exact float formatting (17 significant digits).
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn output_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Output {
        path: path.to_path_buf(),
        source,
    }
}

/// Streaming writer for `diagnostics.csv`: one row per recorded step.
pub struct DiagnosticsWriter {
    writer: BufWriter<File>,
    path: PathBuf,
    dim: usize,
}

impl DiagnosticsWriter {
    /// Create the file and write the header:
    /// `step,time,total_mass,mom_x,mom_y[,mom_z],energy,entropy` followed by
    /// `n_i,ux_i,uy_i[,uz_i],T_i` for each species i (1-based).
    pub fn create(path: &Path, dim: usize, species_count: usize) -> Result<Self> {
        let file = File::create(path).map_err(output_error(path))?;
        let mut writer = BufWriter::new(file);
        let mut header = String::from("step,time,total_mass,mom_x,mom_y");
        if dim == 3 {
            header.push_str(",mom_z");
        }
        header.push_str(",energy,entropy");
        for i in 1..=species_count {
            header.push_str(&format!(",n_{i},ux_{i},uy_{i}"));
            if dim == 3 {
                header.push_str(&format!(",uz_{i}"));
            }
            header.push_str(&format!(",T_{i}"));
        }
        header.push('\n');
        writer
            .write_all(header.as_bytes())
            .map_err(output_error(path))?;
        Ok(Self {
            writer,
            path: path.to_path_buf(),
            dim,
        })
    }

    pub fn write_record(&mut self, step: usize, record: &MomentRecord) -> Result<()> {
        let mut row = format!("{step},{}", format_float(record.time));
        row.push_str(&format!(",{}", format_float(record.totals.mass_density)));
        for k in 0..self.dim {
            row.push_str(&format!(",{}", format_float(record.totals.momentum[k])));
        }
        row.push_str(&format!(
            ",{},{}",
            format_float(record.totals.kinetic_energy),
            format_float(record.totals.entropy)
        ));
        for species in &record.per_species {
            row.push_str(&format!(",{}", format_float(species.number_density)));
            for k in 0..self.dim {
                row.push_str(&format!(",{}", format_float(species.bulk_velocity[k])));
            }
            row.push_str(&format!(",{}", format_float(species.temperature)));
        }
        row.push('\n');
        self.writer
            .write_all(row.as_bytes())
            .map_err(output_error(&self.path))
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer.flush().map_err(output_error(&self.path))
    }
}

/// Particle snapshot: header `w,vx,vy[,vz]`, one row per particle.
pub fn write_snapshot(path: &Path, ensemble: &ParticleEnsemble, dim: usize) -> Result<()> {
    let file = File::create(path).map_err(output_error(path))?;
    let mut writer = BufWriter::new(file);
    let err = |source| Error::Output {
        path: path.to_path_buf(),
        source,
    };
    let header = if dim == 3 {
        "w,vx,vy,vz\n"
    } else {
        "w,vx,vy\n"
    };
    writer.write_all(header.as_bytes()).map_err(err)?;
    for (w, v) in ensemble.weights.iter().zip(&ensemble.velocities) {
        let mut row = format_float(*w);
        for k in 0..dim {
            row.push_str(&format!(",{}", format_float(v[k])));
        }
        row.push('\n');
        writer.write_all(row.as_bytes()).map_err(err)?;
    }
    writer.flush().map_err(err)
}

/// Mollified density on the quadrature grid: header `x,y[,z],f`.
pub fn write_density_grid(path: &Path, grid: &QuadratureGrid, values: &[f64]) -> Result<()> {
    assert_eq!(grid.len(), values.len());
    let file = File::create(path).map_err(output_error(path))?;
    let mut writer = BufWriter::new(file);
    let err = |source| Error::Output {
        path: path.to_path_buf(),
        source,
    };
    let header = if grid.dim == 3 {
        "x,y,z,f\n"
    } else {
        "x,y,f\n"
    };
    writer.write_all(header.as_bytes()).map_err(err)?;
    for (c, f) in grid.centers.iter().zip(values) {
        let mut row = String::new();
        for k in 0..grid.dim {
            row.push_str(&format_float(c[k]));
            row.push(',');
        }
        row.push_str(&format_float(*f));
        row.push('\n');
        writer.write_all(row.as_bytes()).map_err(err)?;
    }
    writer.flush().map_err(err)
}
