//! TOML case files.
//!
//! ```toml
//! [case]
//! name = "thacker"          # lake_at_rest | small_perturbation | macdonald | thacker | floodplain
//! mesh = "bowl.msh"         # optional, floodplain only
//!
//! [parameters]              # all optional; SI units
//! edge = 0.1
//! a = 1.0
//! b0 = 0.1
//! r0 = 0.8
//!
//! [run]                     # all optional; command-line flags take precedence
//! order = 2
//! n_sg = 5
//! cfl = 0.45
//! t_end = 10.0
//! probes = [[2.0, 2.0], [3.0, 2.0]]
//! snapshots = [1.0, 2.0]
//! out = "results"
//! vtk = true
//! csv = true
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::gmsh::MshError;
use crate::harness::analytic::Thacker;
use crate::harness::{self, Case, FloodplainMesh};

#[derive(Debug, thiserror::Error)]
pub enum CaseError {
    #[error("cannot read case file: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid case file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("unknown case `{0}`")]
    UnknownCase(String),
    #[error(transparent)]
    Mesh(#[from] MshError),
    #[error(transparent)]
    Solver(#[from] subswe_core::Error),
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSection {
    pub name: String,
    pub mesh: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub edge: Option<f64>,
    pub epsilon: Option<f64>,
    pub rows: Option<usize>,
    pub a: Option<f64>,
    pub b0: Option<f64>,
    pub r0: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub order: Option<u8>,
    pub n_sg: Option<usize>,
    pub cfl: Option<f64>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub dry_tolerance: Option<f64>,
    #[serde(default)]
    pub probes: Vec<[f64; 2]>,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    pub out: Option<PathBuf>,
    pub vtk: Option<bool>,
    pub csv: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub case: CaseSection,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default)]
    pub run: RunSection,
}

impl CaseFile {
    pub fn parse(text: &str) -> Result<Self, CaseError> {
        Ok(toml::from_str(text)?)
    }

    /// Relative mesh paths are resolved against the case file's directory.
    pub fn load(path: &Path) -> Result<Self, CaseError> {
        let mut file = Self::parse(&fs::read_to_string(path)?)?;
        if let (Some(mesh), Some(dir)) = (&file.case.mesh, path.parent()) {
            if mesh.is_relative() {
                file.case.mesh = Some(dir.join(mesh));
            }
        }
        Ok(file)
    }

    pub fn build(&self) -> Result<Case, CaseError> {
        build_case(&self.case.name, &self.parameters, self.case.mesh.as_deref())
    }
}

/// Names accepted by [`build_case`].
pub const CASE_NAMES: [&str; 5] = ["lake_at_rest", "small_perturbation", "macdonald", "thacker", "floodplain"];

/// Assemble a named case with optional parameter overrides.
pub fn build_case(name: &str, p: &Parameters, mesh: Option<&Path>) -> Result<Case, CaseError> {
    Ok(match name {
        "lake_at_rest" => harness::lake_at_rest(p.edge.unwrap_or(1.0 / 30.0))?,
        "small_perturbation" => harness::small_perturbation(p.edge.unwrap_or(1.0 / 30.0), p.epsilon.unwrap_or(0.01))?,
        "macdonald" => harness::macdonald(p.edge.unwrap_or(100.0), p.rows.unwrap_or(1))?,
        "thacker" => {
            let d = Thacker::default();
            let params = Thacker { a: p.a.unwrap_or(d.a), b0: p.b0.unwrap_or(d.b0), r0: p.r0.unwrap_or(d.r0), ..d };
            harness::thacker(params, p.edge.unwrap_or(0.1))?
        }
        "floodplain" => {
            let source = match (mesh, p.edge) {
                (Some(path), _) => FloodplainMesh::File(path.to_path_buf()),
                (None, Some(edge)) => FloodplainMesh::Uniform(edge),
                (None, None) => FloodplainMesh::Shipped,
            };
            harness::floodplain(&source)?
        }
        other => return Err(CaseError::UnknownCase(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_file() {
        let text = r#"
            [case]
            name = "thacker"

            [parameters]
            edge = 0.2
            b0 = 0.05

            [run]
            order = 1
            n_sg = 3
            probes = [[2.0, 2.0]]
        "#;
        let f = CaseFile::parse(text).unwrap();
        assert_eq!(f.case.name, "thacker");
        assert_eq!(f.parameters.b0, Some(0.05));
        assert_eq!(f.run.probes, vec![[2.0, 2.0]]);
        let case = f.build().unwrap();
        assert_eq!(case.mesh.num_cells(), 2 * 20 * 20);
    }

    #[test]
    fn rejects_unknown_keys_and_cases() {
        assert!(CaseFile::parse("[case]\nname = \"x\"\nfoo = 1\n").is_err());
        let f = CaseFile::parse("[case]\nname = \"nope\"\n").unwrap();
        assert!(matches!(f.build(), Err(CaseError::UnknownCase(_))));
    }
}
