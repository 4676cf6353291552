//! CSV and legacy VTK writers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use subswe_core::mesh::Neighbor;
use subswe_core::{CoarseMesh, Solver};

use crate::harness::{ConvergenceRow, ErrorReport, MassSample, ProbeSeries};

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Solver(#[from] subswe_core::Error),
}

type Result<T> = std::result::Result<T, OutputError>;

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    Ok(csv::Writer::from_path(path)?)
}

fn f(x: f64) -> String {
    format!("{x:.17e}")
}

/// Per-cell state: centroid, conserved variables, surface and wet status.
pub fn write_state_csv(path: &Path, solver: &Solver) -> Result<()> {
    let (eta, status, _) = solver.surface()?;
    let mesh = solver.mesh();
    let s = solver.state();
    let mut w = csv_writer(path)?;
    w.write_record(["cell", "x", "y", "h", "hu", "hv", "eta", "status"])?;
    for m in 0..mesh.num_cells() {
        let c = mesh.centroid(m);
        w.write_record([
            m.to_string(),
            f(c.x),
            f(c.y),
            f(s.h[m]),
            f(s.hu[m]),
            f(s.hv[m]),
            f(eta[m]),
            status[m].code().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Cell id, centroid, area and the three neighbor ids (`-1` on boundaries).
pub fn write_mesh_summary_csv(path: &Path, mesh: &CoarseMesh) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["cell", "x", "y", "area", "n0", "n1", "n2"])?;
    for m in 0..mesh.num_cells() {
        let c = mesh.centroid(m);
        let nb = mesh.neighbors(m).map(|n| match n {
            Neighbor::Cell { cell, .. } => cell as i64,
            Neighbor::Boundary(_) => -1,
        });
        w.write_record([
            m.to_string(),
            f(c.x),
            f(c.y),
            f(mesh.area(m)),
            nb[0].to_string(),
            nb[1].to_string(),
            nb[2].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Stencil mask and reconstructed gradients of the last stage.
pub fn write_weno_debug_csv(path: &Path, solver: &Solver) -> Result<()> {
    let p = solver.last_planes();
    let mut w = csv_writer(path)?;
    w.write_record(["cell", "mask", "deta_dx", "deta_dy", "du_dx", "du_dy", "dv_dx", "dv_dy"])?;
    for m in 0..p.eta.len() {
        w.write_record([
            m.to_string(),
            p.stencil_mask[m].to_string(),
            f(p.eta[m].grad.x),
            f(p.eta[m].grad.y),
            f(p.u[m].grad.x),
            f(p.u[m].grad.y),
            f(p.v[m].grad.x),
            f(p.v[m].grad.y),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_probe_csv(path: &Path, probe: &ProbeSeries) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["t", "h", "hu", "hv"])?;
    for s in &probe.samples {
        w.write_record(s.iter().map(|x| f(*x)))?;
    }
    w.flush()?;
    Ok(())
}

/// File name `probes_<x>_<y>.csv` for a probe.
pub fn probe_file_name(probe: &ProbeSeries) -> String {
    format!("probes_{}_{}.csv", probe.point.x, probe.point.y)
}

pub fn write_mass_csv(path: &Path, mass: &[MassSample]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["t", "volume", "boundary_inflow", "unbalanced", "drift"])?;
    let v0 = mass.first().map_or(0.0, |m| m.volume);
    for m in mass {
        w.write_record([f(m.t), f(m.volume), f(m.inflow), f(m.unbalanced), f(m.volume - v0 - m.inflow - m.unbalanced)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_errors_csv(path: &Path, report: &ErrorReport) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["linf_h", "l2_h", "linf_hu", "l2_hu", "steps", "wall_clock"])?;
    w.write_record([
        f(report.linf_h),
        f(report.l2_h),
        f(report.linf_hu),
        f(report.l2_hu),
        report.steps.to_string(),
        f(report.wall_clock),
    ])?;
    w.flush()?;
    Ok(())
}

pub fn write_convergence_csv(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["order", "n_sg", "edge", "cells", "linf_h", "l2_h", "linf_hu", "l2_hu", "steps", "wall_clock"])?;
    for r in rows {
        w.write_record([
            r.order.to_string(),
            r.n_sg.to_string(),
            f(r.edge),
            r.cells.to_string(),
            f(r.report.linf_h),
            f(r.report.l2_h),
            f(r.report.linf_hu),
            f(r.report.l2_hu),
            r.report.steps.to_string(),
            f(r.report.wall_clock),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn vtk_header(w: &mut impl Write, title: &str) -> io::Result<()> {
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")
}

fn vtk_scalars(w: &mut impl Write, name: &str, values: &[f64]) -> io::Result<()> {
    writeln!(w, "SCALARS {name} double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for v in values {
        writeln!(w, "{v:.12e}")?;
    }
    Ok(())
}

/// Coarse mesh with `h`, `hu`, `hv`, `eta`, bathymetry mean and status as
/// cell data.
pub fn write_vtk(path: &Path, solver: &Solver) -> Result<()> {
    let mesh = solver.mesh();
    let (eta, status, _) = solver.surface()?;
    let s = solver.state();
    let mut w = BufWriter::new(File::create(path)?);
    vtk_header(&mut w, &format!("subswe t={}", solver.time()))?;
    writeln!(w, "POINTS {} double", mesh.vertices().len())?;
    for p in mesh.vertices() {
        writeln!(w, "{:.12e} {:.12e} 0", p.x, p.y)?;
    }
    let n = mesh.num_cells();
    writeln!(w, "CELLS {} {}", n, 4 * n)?;
    for t in mesh.triangles() {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(w, "CELL_TYPES {n}")?;
    for _ in 0..n {
        writeln!(w, "5")?;
    }
    writeln!(w, "CELL_DATA {n}")?;
    vtk_scalars(&mut w, "h", &s.h)?;
    vtk_scalars(&mut w, "hu", &s.hu)?;
    vtk_scalars(&mut w, "hv", &s.hv)?;
    vtk_scalars(&mut w, "eta", &eta)?;
    vtk_scalars(&mut w, "bathymetry", solver.bathymetry().means())?;
    let codes: Vec<f64> = status.iter().map(|s| s.code() as f64).collect();
    vtk_scalars(&mut w, "status", &codes)?;
    w.flush()?;
    Ok(())
}

/// Subgrid triangles with their depth and bathymetry.
pub fn write_subgrid_vtk(path: &Path, solver: &Solver) -> Result<()> {
    let mesh = solver.mesh();
    let part = solver.partition();
    let (_, _, depths) = solver.surface()?;
    let total = part.num_subcells();
    let mut w = BufWriter::new(File::create(path)?);
    vtk_header(&mut w, &format!("subswe subgrid t={}", solver.time()))?;
    writeln!(w, "POINTS {} double", 3 * total)?;
    for m in 0..mesh.num_cells() {
        for k in 0..part.per_cell() {
            for p in part.subcell_vertices(mesh, m, k) {
                writeln!(w, "{:.12e} {:.12e} 0", p.x, p.y)?;
            }
        }
    }
    writeln!(w, "CELLS {} {}", total, 4 * total)?;
    for l in 0..total {
        writeln!(w, "3 {} {} {}", 3 * l, 3 * l + 1, 3 * l + 2)?;
    }
    writeln!(w, "CELL_TYPES {total}")?;
    for _ in 0..total {
        writeln!(w, "5")?;
    }
    writeln!(w, "CELL_DATA {total}")?;
    vtk_scalars(&mut w, "depth", &depths)?;
    vtk_scalars(&mut w, "bathymetry", solver.bathymetry().subcells())?;
    w.flush()?;
    Ok(())
}
