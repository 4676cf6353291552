//! Constructors for the verification cases.

use std::path::{Path, PathBuf};

use subswe_core::math::Vec2;
use subswe_core::{build_rect_mesh, BoundaryKind, BoundarySpec, BoundaryTag, CoarseMesh};

use super::analytic::{Floodplain, MacDonald, Thacker};
use super::{Case, Reference};
use crate::gmsh::{read_msh, MshError};

fn periodic_channel(x: (f64, f64), y: (f64, f64), edge: f64) -> subswe_core::Result<CoarseMesh> {
    let mut mesh = build_rect_mesh(x, y, edge)?;
    mesh.link_periodic(BoundaryTag::SOUTH, BoundaryTag::NORTH)?;
    Ok(mesh)
}

fn lake_bathymetry(p: Vec2) -> f64 {
    1.0 - 0.8 * (-5.0 * (p.x - 0.9).powi(2) - 50.0 * (p.y - 0.5).powi(2)).exp()
}

fn x_walls() -> Vec<BoundarySpec> {
    vec![
        BoundarySpec::new(BoundaryTag::WEST, BoundaryKind::Wall),
        BoundarySpec::new(BoundaryTag::EAST, BoundaryKind::Wall),
    ]
}

/// Still water at `η = −0.4` over an emerging Gaussian bump on
/// `[0.1, 2.1] × [0, 1]`, walls in x and periodic in y; 100 steps of 1 ms.
pub fn lake_at_rest(edge: f64) -> subswe_core::Result<Case> {
    Ok(Case {
        name: "lake_at_rest".into(),
        mesh: periodic_channel((0.1, 2.1), (0.0, 1.0), edge)?,
        bathymetry: Box::new(lake_bathymetry),
        initial: Box::new(|_, d| ((d - 0.4).max(0.0), 0.0, 0.0)),
        boundaries: x_walls(),
        manning: None,
        t_end: 0.1,
        dt_fixed: Some(1e-3),
        probes: Vec::new(),
        reference: Reference::Initial,
    })
}

/// Surface raised by `epsilon` for `x ≤ 0.15` over the submerged bump,
/// run to 0.48 s.
pub fn small_perturbation(edge: f64, epsilon: f64) -> subswe_core::Result<Case> {
    Ok(Case {
        name: "small_perturbation".into(),
        mesh: periodic_channel((0.1, 2.1), (0.0, 1.0), edge)?,
        bathymetry: Box::new(lake_bathymetry),
        initial: Box::new(move |p, d| {
            let eta = if p.x <= 0.15 { epsilon } else { 0.0 };
            ((eta + d).max(0.0), 0.0, 0.0)
        }),
        boundaries: x_walls(),
        manning: None,
        t_end: 0.48,
        dt_fixed: None,
        probes: Vec::new(),
        reference: Reference::None,
    })
}

/// MacDonald steady flow over a generated bed on `[0, 5000] × [0, rows·edge]`
/// with west discharge, east fixed depth and periodic sides.
pub fn macdonald(edge: f64, rows: usize) -> subswe_core::Result<Case> {
    let m = MacDonald::default();
    let bed = m.bathymetry(1.0);
    let length = m.length;
    let d_end = bed.eval(length);
    let h_end = m.depth(length);
    let q = m.discharge;
    let width = edge * rows.max(1) as f64;
    Ok(Case {
        name: "macdonald".into(),
        mesh: periodic_channel((0.0, length), (0.0, width), edge)?,
        bathymetry: Box::new(move |p| bed.eval(p.x)),
        initial: Box::new(move |_, d| ((h_end - d_end + d).max(0.0), 0.0, 0.0)),
        boundaries: vec![
            BoundarySpec::new(BoundaryTag::WEST, BoundaryKind::Discharge(q)),
            BoundarySpec::new(BoundaryTag::EAST, BoundaryKind::FixedSurface(h_end - d_end)),
        ],
        manning: Some(m.manning),
        t_end: 6000.0,
        dt_fixed: None,
        probes: Vec::new(),
        reference: Reference::Analytic(Box::new(move |p, _| (m.depth(p.x), q, 0.0))),
    })
}

/// Oscillating lake in a paraboloid bowl on `[0, 4]²`, walls all around,
/// run for five periods of `3·2π/ω`.
pub fn thacker(params: Thacker, edge: f64) -> subswe_core::Result<Case> {
    let t = params;
    Ok(Case {
        name: "thacker".into(),
        mesh: build_rect_mesh((0.0, t.side), (0.0, t.side), edge)?,
        bathymetry: Box::new(move |p| t.bathymetry(p)),
        initial: Box::new(move |p, _| {
            let v = t.velocity(p, 0.0);
            (t.depth(p, 0.0), v.x, v.y)
        }),
        boundaries: [BoundaryTag::SOUTH, BoundaryTag::EAST, BoundaryTag::NORTH, BoundaryTag::WEST]
            .into_iter()
            .map(|tag| BoundarySpec::new(tag, BoundaryKind::Wall))
            .collect(),
        manning: None,
        t_end: 5.0 * t.run_period(),
        dt_fixed: None,
        probes: vec![Vec2::new(0.5 * t.side, 0.5 * t.side), Vec2::new(0.75 * t.side, 0.5 * t.side)],
        reference: Reference::Analytic(Box::new(move |p, time| {
            let h = t.depth(p, time);
            let v = t.velocity(p, time);
            (h, h * v.x, h * v.y)
        })),
    })
}

/// Coarse mesh source for the floodplain case.
#[derive(Debug, Clone, PartialEq)]
pub enum FloodplainMesh {
    /// Graded mesh shipped with the crate, falling back to `Uniform(50.0)`
    /// when the file is missing.
    Shipped,
    File(PathBuf),
    Uniform(f64),
}

/// Path of the shipped graded floodplain mesh.
pub fn shipped_floodplain_mesh() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/floodplain_graded.msh")
}

fn floodplain_mesh(source: &FloodplainMesh) -> Result<CoarseMesh, MshError> {
    match source {
        FloodplainMesh::Shipped => {
            let path = shipped_floodplain_mesh();
            if path.exists() {
                read_msh(path)
            } else {
                Ok(build_rect_mesh((0.0, 6000.0), (0.0, 1000.0), 50.0)?)
            }
        }
        FloodplainMesh::File(path) => read_msh(path),
        FloodplainMesh::Uniform(edge) => Ok(build_rect_mesh((0.0, 6000.0), (0.0, 1000.0), *edge)?),
    }
}

/// Initially dry floodplain with a meandering channel on
/// `[0, 6000] × [0, 1000]`, 2 m²/s inflow in the west, walls elsewhere.
/// File meshes must tag their boundary lines with the physical tags of
/// [`BoundaryTag`].
pub fn floodplain(source: &FloodplainMesh) -> Result<Case, MshError> {
    let f = Floodplain::default();
    Ok(Case {
        name: "floodplain".into(),
        mesh: floodplain_mesh(source)?,
        bathymetry: Box::new(move |p| -f.elevation(p)),
        initial: Box::new(|_, _| (0.0, 0.0, 0.0)),
        boundaries: vec![
            BoundarySpec::new(BoundaryTag::WEST, BoundaryKind::Discharge(2.0)),
            BoundarySpec::new(BoundaryTag::SOUTH, BoundaryKind::Wall),
            BoundarySpec::new(BoundaryTag::NORTH, BoundaryKind::Wall),
            BoundarySpec::new(BoundaryTag::EAST, BoundaryKind::Wall),
            BoundarySpec::new(BoundaryTag::UNTAGGED, BoundaryKind::Wall),
        ],
        manning: Some(0.03),
        t_end: 6000.0,
        dt_fixed: None,
        probes: Vec::new(),
        reference: Reference::None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use subswe_core::StepConfig;

    #[test]
    fn lake_case_builds_with_dry_crest() {
        let case = lake_at_rest(0.1).unwrap();
        let solver = case.solver(2, StepConfig::default()).unwrap();
        let (_, status, _) = solver.surface().unwrap();
        assert!(status.iter().any(|s| !s.has_water() || *s == subswe_core::WetState::Partial));
        assert_eq!(solver.config().dt_fixed, Some(1e-3));
    }

    #[test]
    fn perturbation_initial_peak() {
        let case = small_perturbation(0.05, 0.01).unwrap();
        let p = Vec2::new(0.12, 0.3);
        let d = lake_bathymetry(p);
        assert!(((case.initial)(p, d).0 - d - 0.01).abs() < 1e-15);
    }

    #[test]
    fn macdonald_case_starts_with_downstream_lake() {
        let case = macdonald(100.0, 1).unwrap();
        let solver = case.solver(2, StepConfig::default()).unwrap();
        let h = &solver.state().h;
        let mesh = solver.mesh();
        let west = (0..mesh.num_cells()).filter(|&m| mesh.centroid(m).x < 2500.0).all(|m| h[m] == 0.0);
        let east = (0..mesh.num_cells()).any(|m| mesh.centroid(m).x > 4900.0 && h[m] > 0.5);
        assert!(west && east);
    }

    #[test]
    fn floodplain_uniform_fallback() {
        let case = floodplain(&FloodplainMesh::Uniform(250.0)).unwrap();
        assert_eq!(case.mesh.num_cells(), 2 * 24 * 4);
        assert!(case.solver(2, StepConfig::default()).is_ok());
    }
}
