use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Rectangle extents or edge length are not positive and finite.
    DegenerateDomain,
    /// A triangle has zero (or non-finite) area.
    DegenerateTriangle { cell: usize },
    /// A triangle references a vertex that does not exist.
    DanglingVertex { cell: usize, vertex: usize },
    /// More than two triangles share an edge.
    NonManifoldEdge { v0: usize, v1: usize },
    /// Boundary tags given for a periodic pair do not match up geometrically.
    UnmatchedPeriodic { tag_a: u32, tag_b: u32 },
    /// A subgrid division of zero was requested.
    InvalidSubdivision,
    /// The bathymetry function returned a non-finite value.
    NonFiniteBathymetry { subcell: usize },
    /// Free-surface inversion did not converge.
    InversionFailed { cell: usize },
    /// A NaN or infinity appeared in the state.
    NonFiniteState { cell: usize },
    /// Configuration value outside its admissible range.
    InvalidConfig(&'static str),
    /// A boundary edge carries a tag with no boundary condition.
    MissingBoundary { tag: u32 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateDomain => write!(f, "degenerate domain extents or edge length"),
            Error::DegenerateTriangle { cell } => write!(f, "triangle {cell} has zero area"),
            Error::DanglingVertex { cell, vertex } => {
                write!(f, "triangle {cell} references missing vertex {vertex}")
            }
            Error::NonManifoldEdge { v0, v1 } => {
                write!(f, "edge ({v0}, {v1}) is shared by more than two triangles")
            }
            Error::UnmatchedPeriodic { tag_a, tag_b } => {
                write!(f, "periodic boundaries {tag_a} and {tag_b} do not match")
            }
            Error::InvalidSubdivision => write!(f, "subgrid division must be at least 1"),
            Error::NonFiniteBathymetry { subcell } => {
                write!(f, "non-finite bathymetry sample at subcell {subcell}")
            }
            Error::InversionFailed { cell } => {
                write!(f, "free-surface inversion failed in cell {cell}")
            }
            Error::NonFiniteState { cell } => write!(f, "non-finite state in cell {cell}"),
            Error::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
            Error::MissingBoundary { tag } => {
                write!(f, "no boundary condition for boundary tag {tag}")
            }
        }
    }
}

impl core::error::Error for Error {}
