use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use subswe::case_file::{build_case, CaseFile, Parameters, RunSection};
use subswe::harness::{
    convergence_study, error_norms, fitted_order, macdonald, reference_at_centers, run, Case, Reference,
    RunOptions,
};
use subswe::output;
use subswe_core::math::Vec2;
use subswe_core::StepConfig;

#[derive(Parser)]
#[command(name = "subswe", version, about = "Subgrid shallow water solver on unstructured triangle meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in case or a TOML case file.
    Run(RunArgs),
    /// MacDonald refinement study written to convergence.csv.
    Convergence(ConvergenceArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Case name (lake_at_rest, small_perturbation, macdonald, thacker,
    /// floodplain) or path to a .toml case file.
    #[arg(long)]
    case: String,
    /// Spatial and temporal order.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    order: Option<u8>,
    /// Subdivisions per coarse edge.
    #[arg(long)]
    nsg: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
    /// Fixed time step in seconds.
    #[arg(long)]
    dt: Option<f64>,
    /// End time in seconds.
    #[arg(long)]
    tend: Option<f64>,
    /// Gmsh MSH 2.2 mesh (floodplain case).
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Coarse edge length of the built-in mesh.
    #[arg(long)]
    edge: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Probe point `x,y`; repeatable.
    #[arg(long, value_parser = parse_point)]
    probe: Vec<Vec2>,
    /// Write VTK files of the final state.
    #[arg(long)]
    vtk: bool,
    /// Write CSV files of the final state.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![100.0, 50.0, 25.0])]
    edges: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![2])]
    nsg: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2])]
    orders: Vec<u8>,
    #[arg(long, default_value = "1")]
    rows: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn parse_point(s: &str) -> Result<Vec2, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x: f64 = x.trim().parse().map_err(|e| format!("{e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("{e}"))?;
    Ok(Vec2::new(x, y))
}

type AnyError = Box<dyn std::error::Error>;

fn load(args: &RunArgs) -> Result<(Case, RunSection), AnyError> {
    let path = Path::new(&args.case);
    if path.extension().is_some_and(|e| e == "toml") {
        let mut file = CaseFile::load(path)?;
        if args.mesh.is_some() {
            file.case.mesh = args.mesh.clone();
        }
        if args.edge.is_some() {
            file.parameters.edge = args.edge;
        }
        Ok((file.build()?, file.run))
    } else {
        let params = Parameters { edge: args.edge, ..Parameters::default() };
        Ok((build_case(&args.case, &params, args.mesh.as_deref())?, RunSection::default()))
    }
}

fn run_command(args: RunArgs) -> Result<(), AnyError> {
    let (case, file_run) = load(&args)?;
    let order = args.order.or(file_run.order).unwrap_or(2);
    let n_sg = args.nsg.or(file_run.n_sg).unwrap_or(1);
    let mut config = StepConfig { space_order: order, time_order: order, ..StepConfig::default() };
    if let Some(cfl) = args.cfl.or(file_run.cfl) {
        config.cfl = cfl;
    }
    config.dt_fixed = args.dt.or(file_run.dt);
    if let Some(tol) = file_run.dry_tolerance {
        config.dry_tolerance = tol;
    }
    let t_end = args.tend.or(file_run.t_end).unwrap_or(case.t_end);
    let out = args.out.or(file_run.out).unwrap_or_else(|| PathBuf::from(format!("out_{}", case.name)));
    let want_vtk = args.vtk || file_run.vtk.unwrap_or(false);
    let want_csv = args.csv || file_run.csv.unwrap_or(false);

    let mut probes: Vec<Vec2> = if args.probe.is_empty() {
        file_run.probes.iter().map(|p| Vec2::new(p[0], p[1])).collect()
    } else {
        args.probe
    };
    if probes.is_empty() {
        probes = case.probes.clone();
    }

    fs::create_dir_all(&out)?;
    let mut solver = case.solver(n_sg, config)?;
    let initial = solver.state().clone();
    let options = RunOptions { probes, snapshot_times: file_run.snapshots.clone() };
    eprintln!("{}: {} cells, n_sg = {n_sg}, order {order}, t_end = {t_end} s", case.name, solver.mesh().num_cells());
    let result = run(&mut solver, t_end, &options);
    let traj = match result {
        Ok(t) => t,
        Err(e) => {
            output::write_state_csv(&out.join("last_good_state.csv"), &solver)?;
            return Err(e.into());
        }
    };

    for p in &traj.probes {
        output::write_probe_csv(&out.join(output::probe_file_name(p)), p)?;
    }
    output::write_mass_csv(&out.join("mass.csv"), &traj.mass)?;
    let reference = match &case.reference {
        Reference::Initial => Some(initial),
        Reference::Analytic(f) => Some(reference_at_centers(solver.mesh(), f, solver.time())),
        Reference::None => None,
    };
    if let Some(r) = reference {
        let mut report = error_norms(solver.mesh(), solver.state(), &r, false);
        report.steps = traj.steps;
        report.wall_clock = traj.wall_clock;
        output::write_errors_csv(&out.join("errors.csv"), &report)?;
        eprintln!("L_inf(h) = {:.3e}, L_2(h) = {:.3e}, L_inf(hu) = {:.3e}", report.linf_h, report.l2_h, report.linf_hu);
    }
    if want_csv {
        output::write_state_csv(&out.join(format!("snapshot_{}.csv", solver.time())), &solver)?;
        output::write_mesh_summary_csv(&out.join("mesh.csv"), solver.mesh())?;
        if order == 2 {
            output::write_weno_debug_csv(&out.join("weno.csv"), &solver)?;
        }
    }
    if want_vtk {
        output::write_vtk(&out.join(format!("snapshot_{}.vtk", solver.time())), &solver)?;
        if n_sg > 1 {
            output::write_subgrid_vtk(&out.join(format!("subgrid_{}.vtk", solver.time())), &solver)?;
        }
    }
    let d = solver.diagnostics();
    eprintln!(
        "{} steps in {:.2} s; redistribution events {}, unbalanced volume {:.3e} m³",
        traj.steps, traj.wall_clock, d.redistribution_events, d.unbalanced_volume
    );
    Ok(())
}

fn convergence_command(args: ConvergenceArgs) -> Result<(), AnyError> {
    fs::create_dir_all(&args.out)?;
    let rows_per_case = args.rows;
    let rows = convergence_study(
        |edge| Ok(macdonald(edge, rows_per_case)?),
        &args.edges,
        &args.nsg,
        &args.orders,
        StepConfig::default(),
    )?;
    output::write_convergence_csv(&args.out.join("convergence.csv"), &rows)?;
    for &order in &args.orders {
        for &n_sg in &args.nsg {
            let sel: Vec<_> = rows.iter().filter(|r| r.order == order && r.n_sg == n_sg).collect();
            let sizes: Vec<f64> = sel.iter().map(|r| r.edge).collect();
            let errors: Vec<f64> = sel.iter().map(|r| r.report.l2_h).collect();
            if sizes.len() > 1 {
                println!("order {order}, n_sg {n_sg}: fitted L_2(h) order {:.3}", fitted_order(&sizes, &errors));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run_command(a),
        Command::Convergence(a) => convergence_command(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
