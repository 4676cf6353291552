//! Mesh refinement studies and observed orders.

use std::time::Instant;

use subswe_core::StepConfig;

use super::norms::{error_norms, reference_at_centers, ErrorReport};
use super::run::{run, RunOptions};
use super::{Case, Reference};

/// Orders `log(e_i/e_{i+1}) / log(s_i/s_{i+1})` between successive meshes.
pub fn pairwise_orders(sizes: &[f64], errors: &[f64]) -> Vec<f64> {
    sizes
        .windows(2)
        .zip(errors.windows(2))
        .map(|(s, e)| (e[0] / e[1]).ln() / (s[0] / s[1]).ln())
        .collect()
}

/// Least-squares slope of `log e` against `log s`.
pub fn fitted_order(sizes: &[f64], errors: &[f64]) -> f64 {
    let n = sizes.len() as f64;
    let xs: Vec<f64> = sizes.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// One run of a study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub order: u8,
    pub n_sg: usize,
    pub edge: f64,
    pub cells: usize,
    pub report: ErrorReport,
}

/// Run `build(edge)` for every combination of edge length, subdivision and
/// order; errors are normalized `L_2` against the case's analytic solution.
pub fn convergence_study<F>(
    build: F,
    edges: &[f64],
    n_sgs: &[usize],
    orders: &[u8],
    base: StepConfig,
) -> Result<Vec<ConvergenceRow>, Box<dyn std::error::Error>>
where
    F: Fn(f64) -> Result<Case, Box<dyn std::error::Error>>,
{
    let mut rows = Vec::new();
    for &order in orders {
        for &n_sg in n_sgs {
            for &edge in edges {
                let case = build(edge)?;
                let Reference::Analytic(solution) = &case.reference else {
                    return Err("convergence study needs an analytic reference".into());
                };
                let config = StepConfig { space_order: order, time_order: order, ..base };
                let mut solver = case.solver(n_sg, config)?;
                let start = Instant::now();
                let traj = run(&mut solver, case.t_end, &RunOptions::default())?;
                let exact = reference_at_centers(solver.mesh(), solution, solver.time());
                let mut report = error_norms(solver.mesh(), solver.state(), &exact, true);
                report.steps = traj.steps;
                report.wall_clock = start.elapsed().as_secs_f64();
                rows.push(ConvergenceRow { order, n_sg, edge, cells: solver.mesh().num_cells(), report });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_of_exact_power_law() {
        let sizes = [100.0, 50.0, 25.0];
        let errors: Vec<f64> = sizes.iter().map(|s: &f64| 3.0 * s.powi(2)).collect();
        for o in pairwise_orders(&sizes, &errors) {
            assert!((o - 2.0).abs() < 1e-12);
        }
        assert!((fitted_order(&sizes, &errors) - 2.0).abs() < 1e-12);
    }
}
