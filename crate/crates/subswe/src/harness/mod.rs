//! Benchmark cases, reference solutions, error norms and study drivers.

pub mod analytic;
pub mod cases;
pub mod convergence;
pub mod norms;
pub mod run;

use subswe_core::math::Vec2;
use subswe_core::{sample_bathymetry, subdivide, BoundarySpec, CoarseMesh, Solver, StepConfig};

pub use cases::{floodplain, lake_at_rest, macdonald, small_perturbation, thacker, FloodplainMesh};
pub use convergence::{convergence_study, fitted_order, pairwise_orders, ConvergenceRow};
pub use norms::{error_norms, reference_at_centers, ErrorReport};
pub use run::{run, MassSample, ProbeSeries, RunOptions, Trajectory};

pub type FieldFn = Box<dyn Fn(Vec2) -> f64 + Send + Sync>;
pub type InitialFn = Box<dyn Fn(Vec2, f64) -> (f64, f64, f64) + Send + Sync>;
/// `(x, t) -> (h, hu, hv)`.
pub type SolutionFn = Box<dyn Fn(Vec2, f64) -> (f64, f64, f64) + Send + Sync>;

/// What the final state is compared against.
pub enum Reference {
    None,
    /// The discrete initial state (fixed-point tests).
    Initial,
    Analytic(SolutionFn),
}

/// A fully specified simulation setup.
pub struct Case {
    pub name: String,
    pub mesh: CoarseMesh,
    /// Bathymetry `d` (positive below datum).
    pub bathymetry: FieldFn,
    /// Pointwise `(h, u, v)` from position and bathymetry.
    pub initial: InitialFn,
    pub boundaries: Vec<BoundarySpec>,
    pub manning: Option<f64>,
    pub t_end: f64,
    pub dt_fixed: Option<f64>,
    pub probes: Vec<Vec2>,
    pub reference: Reference,
}

impl Case {
    /// Build the solver with the initial state set. The case's fixed step is
    /// used unless `config` already carries one.
    pub fn solver(&self, n_sg: usize, mut config: StepConfig) -> subswe_core::Result<Solver> {
        if config.dt_fixed.is_none() {
            config.dt_fixed = self.dt_fixed;
        }
        let partition = subdivide(&self.mesh, n_sg)?;
        let bathymetry = sample_bathymetry(&self.mesh, &partition, |p| (self.bathymetry)(p))?;
        let mut solver = Solver::new(self.mesh.clone(), partition, bathymetry, &self.boundaries, config)?;
        if let Some(n) = self.manning {
            solver.set_manning(n);
        }
        solver.initialize(|p, d| (self.initial)(p, d))?;
        Ok(solver)
    }
}
