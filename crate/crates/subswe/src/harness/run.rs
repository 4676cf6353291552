//! Time integration driver collecting probes, mass and snapshots.

use std::time::Instant;

use subswe_core::math::Vec2;
use subswe_core::{Conserved, Solver};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub probes: Vec<Vec2>,
    /// Times at which the state is copied; the run lands on them exactly.
    pub snapshot_times: Vec<f64>,
}

/// Time series `(t, h, hu, hv)` of the cell whose center is nearest to a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSeries {
    pub point: Vec2,
    pub cell: usize,
    pub samples: Vec<[f64; 4]>,
}

impl ProbeSeries {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s[0])
    }

    pub fn depths(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassSample {
    pub t: f64,
    pub volume: f64,
    /// Cumulative net inflow through open boundaries.
    pub inflow: f64,
    /// Cumulative volume created by clamping negative depths.
    pub unbalanced: f64,
}

impl MassSample {
    /// Volume change not explained by boundary fluxes or clamping,
    /// relative to `reference`.
    pub fn drift(&self, initial: f64, reference: f64) -> f64 {
        (self.volume - initial - self.inflow - self.unbalanced) / reference
    }
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub probes: Vec<ProbeSeries>,
    pub mass: Vec<MassSample>,
    pub snapshots: Vec<(f64, Conserved)>,
    pub steps: usize,
    pub wall_clock: f64,
}

fn record(solver: &Solver, traj: &mut Trajectory) {
    let s = solver.state();
    for p in &mut traj.probes {
        p.samples.push([solver.time(), s.h[p.cell], s.hu[p.cell], s.hv[p.cell]]);
    }
    let d = solver.diagnostics();
    traj.mass.push(MassSample {
        t: solver.time(),
        volume: solver.total_volume(),
        inflow: d.boundary_inflow,
        unbalanced: d.unbalanced_volume,
    });
}

/// Advance `solver` to `t_end`, recording probes and mass after every step.
pub fn run(solver: &mut Solver, t_end: f64, options: &RunOptions) -> subswe_core::Result<Trajectory> {
    let start = Instant::now();
    let mut traj = Trajectory::default();
    for &p in &options.probes {
        let cell = solver.mesh().nearest_cell(p).unwrap_or(0);
        traj.probes.push(ProbeSeries { point: p, cell, samples: Vec::new() });
    }
    record(solver, &mut traj);

    let mut stops: Vec<f64> = options.snapshot_times.iter().copied().filter(|&t| t <= t_end).collect();
    stops.sort_by(f64::total_cmp);
    stops.push(t_end);
    for stop in stops {
        let steps = solver.run_until(stop, |s, _| record(s, &mut traj))?;
        traj.steps += steps;
        if stop < t_end || options.snapshot_times.contains(&stop) {
            traj.snapshots.push((solver.time(), solver.state().clone()));
        }
    }
    traj.wall_clock = start.elapsed().as_secs_f64();
    Ok(traj)
}
