//! Legacy VTK field dumps and CSV summary tables.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{DirectorField, QField};
use crate::sweep::SweepRecord;

pub const CSV_HEADER: &str = "t,Ltilde,lambda,elastic,gl,hterm,total,min_norm,min_i,min_j,min_k,\
max_beta,beta_i,beta_j,beta_k,h_mass,iters,residual,class,seed,wall_s";

/// Scientific notation with 9 significant digits.
fn sci9(v: f64) -> String {
    format!("{v:.8e}")
}

/// Scientific notation with 12 significant digits.
fn sci12(v: f64) -> String {
    format!("{v:.11e}")
}

/// Writes `|Q|`, `β` and the director as structured points, x index fastest.
pub fn write_field_vtk(field: &QField, directors: &DirectorField, path: &Path) -> Result<()> {
    if directors.grid != field.grid {
        return Err(Error::Input("director field grid does not match".into()));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_vtk_body(&mut w, field, directors).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_vtk_body(w: &mut impl Write, field: &QField, directors: &DirectorField) -> std::io::Result<()> {
    let g = field.grid;
    let n = g.n();
    let h = g.spacing();
    let o = -g.half_width();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "ldg Q-tensor field")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET STRUCTURED_POINTS")?;
    writeln!(w, "DIMENSIONS {n} {n} {n}")?;
    writeln!(w, "ORIGIN {} {} {}", sci9(o), sci9(o), sci9(o))?;
    writeln!(w, "SPACING {} {} {}", sci9(h), sci9(h), sci9(h))?;
    writeln!(w, "POINT_DATA {}", g.len())?;
    writeln!(w, "SCALARS qnorm double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for q in &field.values {
        writeln!(w, "{}", sci9(q.norm()))?;
    }
    writeln!(w, "SCALARS beta double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for b in &directors.beta {
        writeln!(w, "{}", sci9(*b))?;
    }
    writeln!(w, "VECTORS director double")?;
    for d in &directors.directors {
        writeln!(w, "{} {} {}", sci9(d[0]), sci9(d[1]), sci9(d[2]))?;
    }
    Ok(())
}

/// One CSV data row, without trailing newline.
pub fn csv_row(r: &SweepRecord) -> String {
    let e = &r.energy;
    [
        sci12(r.t),
        sci12(r.l_tilde),
        sci12(r.lambda),
        sci12(e.elastic),
        sci12(e.gl),
        sci12(e.hterm),
        sci12(e.total),
        sci12(r.min_norm),
        r.min_location[0].to_string(),
        r.min_location[1].to_string(),
        r.min_location[2].to_string(),
        sci12(r.max_beta),
        r.beta_location[0].to_string(),
        r.beta_location[1].to_string(),
        r.beta_location[2].to_string(),
        sci12(r.h_mass),
        r.iterations.to_string(),
        sci12(r.residual),
        r.class.clone(),
        r.seed.to_string(),
        format!("{:.3}", r.wall_time),
    ]
    .join(",")
}

/// Writes the header and one row per record, sorted by `(t, seed)`.
pub fn write_summary_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    let mut sorted: Vec<&SweepRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.seed.cmp(&b.seed)));
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let res: std::io::Result<()> = (|| {
        writeln!(w, "{CSV_HEADER}")?;
        for r in sorted {
            writeln!(w, "{}", csv_row(r))?;
        }
        w.flush()
    })();
    res.map_err(|e| Error::io(path, e))
}
