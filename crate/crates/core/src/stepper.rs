//! Semi-discrete operator, boundary treatment and the two-stage
//! Runge–Kutta time integrator.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::face_recon::{classify_and_reconstruct, extrapolate_raw, CoarseSide, FaceCase, RawSide};
use crate::math::{sqrt, Vec2};
use crate::mesh::{BathymetryField, BoundaryTag, CoarseMesh, Neighbor, SubgridPartition};
use crate::riemann::{hllc_flux, physical_flux, wall_flux, SideState};
use crate::sources::{friction_coefficient, gravity_face_term, implicit_friction_correct};
use crate::state::{
    cutoff_velocity, invert_free_surface, redistribute_negative_depths, CellSubgrid, Conserved,
    Redistribution, WetState,
};
use crate::weno::{build_stencils, first_order_planes, reconstruct_planes, ReconstructionPlanes, StencilSet};
use crate::{DEFAULT_DRY_TOLERANCE, GRAVITY};

/// Condition imposed on a tagged boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind {
    /// Impermeable wall.
    Wall,
    /// Prescribed inflow discharge per unit width (m²/s), directed into the
    /// domain along the inward normal.
    Discharge(f64),
    /// Prescribed water depth (m) with the interior velocity.
    FixedDepth(f64),
    /// Prescribed free-surface elevation (m); the ghost depth is measured
    /// from the bathymetry of the adjacent subcell.
    FixedSurface(f64),
    /// Periodic pairing; the mesh must already be linked.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySpec {
    pub tag: BoundaryTag,
    pub kind: BoundaryKind,
}

impl BoundarySpec {
    pub const fn new(tag: BoundaryTag, kind: BoundaryKind) -> Self {
        BoundarySpec { tag, kind }
    }
}

/// Time stepping parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    /// Courant number applied to `√|T| / λ`.
    pub cfl: f64,
    /// Fixed step; overrides the CFL estimate when set.
    pub dt_fixed: Option<f64>,
    /// Step used when no cell carries a wave.
    pub dt_max: f64,
    /// Velocity cut-off depth `ε_dry` (m).
    pub dry_tolerance: f64,
    /// Spatial order: 1 (constant) or 2 (WENO planes).
    pub space_order: u8,
    /// Temporal order: 1 (forward Euler) or 2 (Heun).
    pub time_order: u8,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            cfl: 0.45,
            dt_fixed: None,
            dt_max: 1.0,
            dry_tolerance: DEFAULT_DRY_TOLERANCE,
            space_order: 2,
            time_order: 2,
        }
    }
}

impl StepConfig {
    pub fn first_order() -> Self {
        StepConfig { space_order: 1, time_order: 1, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl.is_finite()) {
            return Err(Error::InvalidConfig("cfl must be positive"));
        }
        if !(self.dt_max > 0.0) {
            return Err(Error::InvalidConfig("dt_max must be positive"));
        }
        if let Some(dt) = self.dt_fixed {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::InvalidConfig("dt must be positive"));
            }
        }
        if !(self.dry_tolerance >= 0.0) {
            return Err(Error::InvalidConfig("dry tolerance must be non-negative"));
        }
        if !matches!(self.space_order, 1 | 2) || !matches!(self.time_order, 1 | 2) {
            return Err(Error::InvalidConfig("orders must be 1 or 2"));
        }
        Ok(())
    }
}

/// Counters accumulated over the run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Interior subgrid faces per reconstruction case, indexed by
    /// [`FaceCase::index`].
    pub face_cases: [u64; 5],
    pub redistribution_events: usize,
    /// Volume created by clamping depths that neighbors could not cover.
    pub unbalanced_volume: f64,
    /// Net volume that entered through open boundaries (m³).
    pub boundary_inflow: f64,
    pub newton_iterations: u64,
    pub bisection_fallbacks: usize,
    pub friction_fallbacks: usize,
    /// Stencil members read from dry cells; stays zero.
    pub dry_stencil_reads: usize,
    pub steps: usize,
}

impl Diagnostics {
    pub fn face_case_count(&self, case: FaceCase) -> u64 {
        self.face_cases[case.index()]
    }
}

/// Summary of one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    pub redistribution: Redistribution,
    pub boundary_inflow: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct SideFlux {
    flux: [f64; 3],
    eta: f64,
    d: f64,
}

#[derive(Debug, Clone, Default)]
struct Workspace {
    status: Vec<WetState>,
    eta: Vec<f64>,
    d_wet: Vec<f64>,
    h_max: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
    h_sub: Vec<f64>,
    planes: ReconstructionPlanes,
    sides: Vec<SideFlux>,
}

/// Subgrid shallow-water solver on a fixed mesh.
#[derive(Debug, Clone)]
pub struct Solver {
    mesh: CoarseMesh,
    partition: SubgridPartition,
    bathymetry: BathymetryField,
    offsets: Vec<Vec2>,
    bed_gradient: Vec<Vec2>,
    stencils: Option<StencilSet>,
    boundaries: BTreeMap<u32, BoundaryKind>,
    strickler: Option<Vec<f64>>,
    config: StepConfig,
    state: Conserved,
    time: f64,
    diagnostics: Diagnostics,
    work: Workspace,
}

impl Solver {
    /// Every boundary tag left in the mesh needs a non-periodic condition.
    pub fn new(
        mesh: CoarseMesh,
        partition: SubgridPartition,
        bathymetry: BathymetryField,
        boundaries: &[BoundarySpec],
        config: StepConfig,
    ) -> Result<Self> {
        config.validate()?;
        let map: BTreeMap<u32, BoundaryKind> = boundaries.iter().map(|b| (b.tag.0, b.kind)).collect();
        for tag in mesh.boundary_tags() {
            match map.get(&tag.0) {
                None | Some(BoundaryKind::Periodic) => return Err(Error::MissingBoundary { tag: tag.0 }),
                Some(_) => {}
            }
        }
        let nc = mesh.num_cells();
        let per = partition.per_cell();
        let mut offsets = Vec::with_capacity(partition.num_subcells());
        for m in 0..nc {
            let c = mesh.centroid(m);
            for k in 0..per {
                offsets.push(partition.centroids()[partition.global(m, k)] - c);
            }
        }
        let bed_gradient = bed_gradients(&mesh, &partition, &bathymetry, &offsets);
        let stencils = (config.space_order == 2).then(|| build_stencils(&mesh));
        let n = partition.n_sg();
        let work = Workspace {
            status: vec![WetState::Dry; nc],
            eta: vec![0.0; nc],
            d_wet: vec![0.0; nc],
            h_max: vec![0.0; nc],
            u: vec![0.0; nc],
            v: vec![0.0; nc],
            h_sub: vec![0.0; partition.num_subcells()],
            planes: ReconstructionPlanes::default(),
            sides: vec![SideFlux::default(); nc * 3 * n],
        };
        Ok(Solver {
            state: Conserved::zeros(nc),
            mesh,
            partition,
            bathymetry,
            offsets,
            bed_gradient,
            stencils,
            boundaries: map,
            strickler: None,
            config,
            time: 0.0,
            diagnostics: Diagnostics::default(),
            work,
        })
    }

    /// Uniform Manning roughness `n` (s/m^{1/3}); zero disables friction.
    pub fn set_manning(&mut self, n: f64) {
        self.strickler = (n > 0.0).then(|| vec![1.0 / n; self.partition.num_subcells()]);
    }

    /// Per-subcell Manning–Strickler coefficients `M = 1/n`.
    pub fn set_strickler(&mut self, values: Vec<f64>) -> Result<()> {
        if values.len() != self.partition.num_subcells() || values.iter().any(|m| !(*m > 0.0)) {
            return Err(Error::InvalidConfig("strickler values must be positive, one per subcell"));
        }
        self.strickler = Some(values);
        Ok(())
    }

    /// Set the state from pointwise depth and velocity, sampled at subcell
    /// centroids: `f(x, d) -> (h, u, v)`.
    pub fn initialize<F>(&mut self, f: F) -> Result<()>
    where
        F: Fn(Vec2, f64) -> (f64, f64, f64),
    {
        for m in 0..self.mesh.num_cells() {
            let (mut h, mut hu, mut hv) = (0.0, 0.0, 0.0);
            for l in self.partition.subcells(m) {
                let a = self.partition.areas()[l];
                let (hl, ul, vl) = f(self.partition.centroids()[l], self.bathymetry.subcell(l));
                let hl = hl.max(0.0);
                h += a * hl;
                hu += a * hl * ul;
                hv += a * hl * vl;
            }
            let inv = 1.0 / self.mesh.area(m);
            self.state.h[m] = h * inv;
            self.state.hu[m] = hu * inv;
            self.state.hv[m] = hv * inv;
        }
        self.check_finite(&self.state)?;
        self.time = 0.0;
        Ok(())
    }

    /// Still water at elevation `eta`.
    pub fn initialize_still_water(&mut self, eta: f64) -> Result<()> {
        self.initialize(|_, d| ((eta + d).max(0.0), 0.0, 0.0))
    }

    pub fn set_state(&mut self, state: Conserved) -> Result<()> {
        if state.len() != self.mesh.num_cells() {
            return Err(Error::InvalidConfig("state length differs from cell count"));
        }
        self.check_finite(&state)?;
        self.state = state;
        Ok(())
    }

    pub fn set_time(&mut self, time: f64) {
        self.time = time;
    }

    pub fn mesh(&self) -> &CoarseMesh {
        &self.mesh
    }

    pub fn partition(&self) -> &SubgridPartition {
        &self.partition
    }

    pub fn bathymetry(&self) -> &BathymetryField {
        &self.bathymetry
    }

    pub fn state(&self) -> &Conserved {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn config(&self) -> &StepConfig {
        &self.config
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    pub fn stencils(&self) -> Option<&StencilSet> {
        self.stencils.as_ref()
    }

    /// Planes of the most recent stage.
    pub fn last_planes(&self) -> &ReconstructionPlanes {
        &self.work.planes
    }

    pub fn total_volume(&self) -> f64 {
        self.state.total_volume(&self.mesh)
    }

    /// Constant-surface inversion of the current state: `(η̄, status)` per
    /// cell and the subgrid depths.
    pub fn surface(&self) -> Result<(Vec<f64>, Vec<WetState>, Vec<f64>)> {
        let nc = self.mesh.num_cells();
        let mut eta = vec![0.0; nc];
        let mut status = vec![WetState::Dry; nc];
        let mut depths = vec![0.0; self.partition.num_subcells()];
        for m in 0..nc {
            let cell = self.cell_subgrid(m);
            let inv = invert_free_surface(&cell, self.state.h[m], Vec2::ZERO).ok_or(Error::InversionFailed { cell: m })?;
            eta[m] = inv.eta;
            status[m] = inv.state;
            crate::state::subgrid_depths(&cell, inv.eta, Vec2::ZERO, &mut depths[self.partition.subcells(m)]);
        }
        Ok((eta, status, depths))
    }

    fn cell_subgrid(&self, m: usize) -> CellSubgrid<'_> {
        CellSubgrid::new(&self.mesh, &self.partition, &self.bathymetry, &self.offsets, m)
    }

    fn check_finite(&self, state: &Conserved) -> Result<()> {
        match state.first_non_finite() {
            Some(cell) => Err(Error::NonFiniteState { cell }),
            None => Ok(()),
        }
    }

    /// CFL step `cfl · min √|T| / (|u| + √(g h_max))`, or the fixed step.
    pub fn compute_dt(&mut self) -> Result<f64> {
        if let Some(dt) = self.config.dt_fixed {
            return Ok(dt);
        }
        let mut best = f64::INFINITY;
        for m in 0..self.mesh.num_cells() {
            let h = self.state.h[m];
            if h <= 0.0 {
                continue;
            }
            let cell = self.cell_subgrid(m);
            let inv = invert_free_surface(&cell, h, Vec2::ZERO).ok_or(Error::InversionFailed { cell: m })?;
            let h_max = cell.bathymetry.iter().fold(0.0f64, |acc, d| acc.max(inv.eta + d));
            let (u, v) = cutoff_velocity(h, self.state.hu[m], self.state.hv[m], self.config.dry_tolerance);
            let lambda = sqrt(u * u + v * v) + sqrt(GRAVITY * h_max);
            if lambda > 0.0 {
                best = best.min(sqrt(self.mesh.area(m)) / lambda);
            }
        }
        Ok(if best.is_finite() { self.config.cfl * best } else { self.config.dt_max })
    }

    /// Advance by one step of size `dt`.
    pub fn step(&mut self, dt: f64) -> Result<StepReport> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidConfig("dt must be positive"));
        }
        let nc = self.mesh.num_cells();
        let old = self.state.clone();
        let mut rates = Conserved::zeros(nc);
        let mut redistribution = Redistribution::default();

        let out1 = self.rates(&old, &mut rates)?;
        let mut stage = old.clone();
        self.euler_update(&mut stage, &rates, dt, &mut redistribution)?;
        let mut inflow = -dt * out1;

        if self.config.time_order == 2 {
            let out2 = self.rates(&stage, &mut rates)?;
            let mut second = stage.clone();
            self.euler_update(&mut second, &rates, dt, &mut redistribution)?;
            for m in 0..nc {
                stage.h[m] = 0.5 * (old.h[m] + second.h[m]);
                stage.hu[m] = 0.5 * (old.hu[m] + second.hu[m]);
                stage.hv[m] = 0.5 * (old.hv[m] + second.hv[m]);
            }
            inflow = -0.5 * dt * (out1 + out2);
            redistribution.unbalanced_volume *= 0.5;
            self.zero_thin_momentum(&mut stage);
        }

        self.check_finite(&stage)?;
        self.state = stage;
        self.time += dt;
        let d = &mut self.diagnostics;
        d.steps += 1;
        d.redistribution_events += redistribution.events;
        d.unbalanced_volume += redistribution.unbalanced_volume;
        d.boundary_inflow += inflow;
        Ok(StepReport { dt, redistribution, boundary_inflow: inflow })
    }

    /// Step with the configured step size until `t_end`, calling `observer`
    /// after every step. The last step is shortened to land on `t_end`.
    pub fn run_until<F>(&mut self, t_end: f64, mut observer: F) -> Result<usize>
    where
        F: FnMut(&Solver, &StepReport),
    {
        let mut count = 0;
        while self.time < t_end - 1e-12 * t_end.abs().max(1.0) {
            let dt = self.compute_dt()?.min(t_end - self.time);
            let report = self.step(dt)?;
            count += 1;
            observer(self, &report);
        }
        Ok(count)
    }

    fn zero_thin_momentum(&self, state: &mut Conserved) {
        for m in 0..state.len() {
            if state.h[m] < self.config.dry_tolerance {
                state.hu[m] = 0.0;
                state.hv[m] = 0.0;
            }
        }
    }

    fn euler_update(
        &mut self,
        state: &mut Conserved,
        rates: &Conserved,
        dt: f64,
        redistribution: &mut Redistribution,
    ) -> Result<()> {
        let nc = state.len();
        for m in 0..nc {
            state.h[m] += dt * rates.h[m];
            state.hu[m] += dt * rates.hu[m];
            state.hv[m] += dt * rates.hv[m];
        }
        let r = redistribute_negative_depths(&mut state.h, &self.mesh);
        redistribution.events += r.events;
        redistribution.unbalanced_volume += r.unbalanced_volume;
        self.zero_thin_momentum(state);
        if let Some(strickler) = &self.strickler {
            let mut depths = vec![0.0; self.partition.per_cell()];
            for m in 0..nc {
                let h = state.h[m];
                if h < self.config.dry_tolerance || h <= 0.0 {
                    continue;
                }
                let cell = self.cell_subgrid(m);
                let inv = invert_free_surface(&cell, h, Vec2::ZERO).ok_or(Error::InversionFailed { cell: m })?;
                if inv.state == WetState::Dry {
                    continue;
                }
                crate::state::subgrid_depths(&cell, inv.eta, Vec2::ZERO, &mut depths);
                let range = self.partition.subcells(m);
                let Some(c) = friction_coefficient(cell.sub_areas, &depths, &strickler[range]) else {
                    continue;
                };
                let u = Vec2::new(state.hu[m] / h, state.hv[m] / h);
                let fix = implicit_friction_correct(u, Vec2::ZERO, c / h, dt);
                if !fix.converged {
                    self.diagnostics.friction_fallbacks += 1;
                }
                state.hu[m] = h * fix.velocity.x;
                state.hv[m] = h * fix.velocity.y;
            }
        }
        Ok(())
    }

    fn invert_into(&mut self, m: usize, h: f64, gradient: Vec2) -> Result<()> {
        let inv = {
            let cell = self.cell_subgrid(m);
            invert_free_surface(&cell, h, gradient).ok_or(Error::InversionFailed { cell: m })?
        };
        self.diagnostics.newton_iterations += inv.newton_iterations as u64;
        if inv.used_bisection {
            self.diagnostics.bisection_fallbacks += 1;
        }
        self.work.eta[m] = inv.eta;
        self.work.status[m] = inv.state;
        Ok(())
    }

    /// Right-hand side `L(U)`; returns the net outflow rate through open
    /// boundaries (m³/s).
    fn rates(&mut self, state: &Conserved, rates: &mut Conserved) -> Result<f64> {
        let nc = self.mesh.num_cells();
        let n = self.partition.n_sg();
        let tol = self.config.dry_tolerance;

        for m in 0..nc {
            self.invert_into(m, state.h[m], Vec2::ZERO)?;
            let (u, v) = cutoff_velocity(state.h[m], state.hu[m], state.hv[m], tol);
            self.work.u[m] = u;
            self.work.v[m] = v;
        }

        let planes = match &self.stencils {
            Some(st) => {
                let p = reconstruct_planes(&self.mesh, st, &self.work.status, &self.work.eta, &self.work.u, &self.work.v);
                for m in 0..nc {
                    let mask = p.stencil_mask[m];
                    for s in 0..4 {
                        if mask & (1 << s) != 0 {
                            if let Some(stencil) = &st.cell(m)[s] {
                                self.diagnostics.dry_stencil_reads +=
                                    stencil.cells.iter().filter(|&&j| !self.work.status[j].has_water()).count();
                            }
                        }
                    }
                }
                p
            }
            None => first_order_planes(&self.work.eta, &self.work.u, &self.work.v),
        };
        self.work.planes = planes;

        if self.stencils.is_some() {
            for m in 0..nc {
                let g = self.work.planes.eta[m].grad;
                if g != Vec2::ZERO && self.work.status[m].has_water() {
                    self.invert_into(m, state.h[m], g)?;
                    self.work.planes.eta[m].mean = self.work.eta[m];
                }
            }
        }

        // Recomputed wet bathymetry d̄ = h̄ − η̄; for a dry cell this is max d.
        for m in 0..nc {
            let eta = self.work.eta[m];
            let g = self.work.planes.eta[m].grad;
            let mut h_max = 0.0f64;
            for l in self.partition.subcells(m) {
                let depth = (eta + g.dot(self.offsets[l]) + self.bathymetry.subcell(l)).max(0.0);
                self.work.h_sub[l] = depth;
                h_max = h_max.max(depth);
            }
            self.work.d_wet[m] = state.h[m] - eta;
            self.work.h_max[m] = h_max;
        }

        let mut outflow = 0.0;
        for m in 0..nc {
            for e in 0..3 {
                let normal = self.mesh.normal(m, e);
                match self.mesh.neighbors(m)[e] {
                    Neighbor::Cell { cell: nb, edge: nb_e, .. } => {
                        if (nb, nb_e) < (m, e) {
                            continue;
                        }
                        for r in 0..n {
                            let rp = n - 1 - r;
                            let left = self.raw_side(m, e, r);
                            let right = self.raw_side(nb, nb_e, rp);
                            let trace = classify_and_reconstruct(
                                left,
                                right,
                                CoarseSide { eta: self.work.eta[m], d: self.work.d_wet[m] },
                                CoarseSide { eta: self.work.eta[nb], d: self.work.d_wet[nb] },
                            );
                            self.diagnostics.face_cases[trace.case.index()] += 1;
                            let (sl, sr) = if trace.case.is_wall() {
                                let a = wall_flux(trace.h_left, trace.d_left, normal);
                                let b = wall_flux(trace.h_right, trace.d_right, -normal);
                                (
                                    SideFlux { flux: a.flux, eta: a.eta_star, d: a.d_star },
                                    SideFlux { flux: b.flux, eta: b.eta_star, d: b.d_star },
                                )
                            } else {
                                let res = hllc_flux(
                                    SideState::new(trace.h_left, trace.u_left, trace.v_left),
                                    SideState::new(trace.h_right, trace.u_right, trace.v_right),
                                    trace.d_left,
                                    normal,
                                );
                                let f = res.flux;
                                (
                                    SideFlux { flux: f, eta: res.eta_star, d: res.d_star },
                                    SideFlux { flux: [-f[0], -f[1], -f[2]], eta: res.eta_star, d: res.d_star },
                                )
                            };
                            self.work.sides[(m * 3 + e) * n + r] = sl;
                            self.work.sides[(nb * 3 + nb_e) * n + rp] = sr;
                        }
                    }
                    Neighbor::Boundary(tag) => {
                        let kind = self.boundaries.get(&tag.0).copied().unwrap_or(BoundaryKind::Wall);
                        for r in 0..n {
                            let side = self.boundary_flux(m, e, r, normal, kind);
                            outflow += side.flux[0] * self.partition.face(m, e, r).length;
                            self.work.sides[(m * 3 + e) * n + r] = side;
                        }
                    }
                }
            }
        }

        for m in 0..nc {
            let (eta_m, d_m) = (self.work.eta[m], self.work.d_wet[m]);
            let mut acc = [0.0; 3];
            let mut grav = Vec2::ZERO;
            for e in 0..3 {
                let normal = self.mesh.normal(m, e);
                for r in 0..n {
                    let len = self.partition.face(m, e, r).length;
                    let s = self.work.sides[(m * 3 + e) * n + r];
                    acc[0] += s.flux[0] * len;
                    acc[1] += s.flux[1] * len;
                    acc[2] += s.flux[2] * len;
                    grav += gravity_face_term(s.eta, s.d, eta_m, d_m, len, normal);
                }
            }
            let inv = 1.0 / self.mesh.area(m);
            rates.h[m] = -acc[0] * inv;
            rates.hu[m] = (grav.x - acc[1]) * inv;
            rates.hv[m] = (grav.y - acc[2]) * inv;
        }
        Ok(outflow)
    }

    fn raw_side(&self, m: usize, e: usize, r: usize) -> RawSide {
        let face = self.partition.face(m, e, r);
        let l = self.partition.global(m, face.subcell);
        extrapolate_raw(
            &self.work.planes,
            m,
            face.midpoint - self.mesh.centroid(m),
            self.bathymetry.subcell(l),
            self.work.h_sub[l],
        )
    }

    /// Interior trace on an open boundary, with the bathymetry extrapolated
    /// from the subcell centroid to the face midpoint.
    fn open_side(&self, m: usize, e: usize, r: usize) -> RawSide {
        let mut raw = self.raw_side(m, e, r);
        let face = self.partition.face(m, e, r);
        let l = self.partition.global(m, face.subcell);
        let to_face = face.midpoint - self.mesh.centroid(m) - self.offsets[l];
        raw.d += self.bed_gradient[m].dot(to_face);
        if raw.wet {
            raw.h = (raw.eta + raw.d).max(0.0);
        }
        raw
    }

    fn boundary_flux(&self, m: usize, e: usize, r: usize, normal: Vec2, kind: BoundaryKind) -> SideFlux {
        let raw = match kind {
            BoundaryKind::Wall | BoundaryKind::Periodic => self.raw_side(m, e, r),
            _ => self.open_side(m, e, r),
        };
        let to_side = |f: crate::riemann::FluxResult| SideFlux { flux: f.flux, eta: f.eta_star, d: f.d_star };
        match kind {
            BoundaryKind::Wall | BoundaryKind::Periodic => {
                if raw.wet {
                    to_side(wall_flux(raw.h, raw.d, normal))
                } else {
                    let d = self.work.d_wet[m];
                    to_side(wall_flux((self.work.eta[m] + d).max(0.0), d, normal))
                }
            }
            BoundaryKind::Discharge(q) => {
                let invariant = raw.u * normal.x + raw.v * normal.y + 2.0 * sqrt(GRAVITY * raw.h);
                let h = inflow_depth(q, invariant);
                let speed = if h > 0.0 { q / h } else { 0.0 };
                let ghost = SideState::new(h, -speed * normal.x, -speed * normal.y);
                SideFlux { flux: physical_flux(ghost, raw.d, normal), eta: h - raw.d, d: raw.d }
            }
            BoundaryKind::FixedDepth(h) => self.outflow_flux(raw, h, normal),
            BoundaryKind::FixedSurface(eta) => self.outflow_flux(raw, (eta + raw.d).max(0.0), normal),
        }
    }

    fn outflow_flux(&self, raw: RawSide, h: f64, normal: Vec2) -> SideFlux {
        // Subcritical outflow keeps the outgoing invariant u_n + 2c;
        // supercritical outflow takes the interior state unchanged.
        let u_n = raw.u * normal.x + raw.v * normal.y;
        let c_l = sqrt(GRAVITY * raw.h);
        let ghost = if raw.h > 0.0 && u_n >= c_l {
            SideState::new(raw.h, raw.u, raw.v)
        } else {
            let shift = 2.0 * (c_l - sqrt(GRAVITY * h));
            SideState::new(h, raw.u + shift * normal.x, raw.v + shift * normal.y)
        };
        let f = hllc_flux(SideState::new(raw.h, raw.u, raw.v), ghost, raw.d, normal);
        SideFlux { flux: f.flux, eta: f.eta_star, d: f.d_star }
    }
}

/// Least-squares bathymetry gradient of each coarse cell from its own
/// subcell values and the means of its face neighbors.
fn bed_gradients(mesh: &CoarseMesh, partition: &SubgridPartition, bathymetry: &BathymetryField, offsets: &[Vec2]) -> Vec<Vec2> {
    (0..mesh.num_cells())
        .map(|m| {
            let base = bathymetry.mean(m);
            let (mut xx, mut xy, mut yy, mut bx, mut by) = (0.0, 0.0, 0.0, 0.0, 0.0);
            let mut add = |r: Vec2, value: f64| {
                xx += r.x * r.x;
                xy += r.x * r.y;
                yy += r.y * r.y;
                bx += r.x * (value - base);
                by += r.y * (value - base);
            };
            if partition.per_cell() > 1 {
                for l in partition.subcells(m) {
                    add(offsets[l], bathymetry.subcell(l));
                }
            }
            for nb in mesh.neighbors(m) {
                if let Neighbor::Cell { cell, shift, .. } = *nb {
                    add(mesh.centroid(cell) + shift - mesh.centroid(m), bathymetry.mean(cell));
                }
            }
            let det = xx * yy - xy * xy;
            if det > 1e-12 * (xx * yy).max(f64::MIN_POSITIVE) {
                Vec2::new((yy * bx - xy * by) / det, (xx * by - xy * bx) / det)
            } else {
                Vec2::ZERO
            }
        })
        .collect()
}

/// Boundary depth of a prescribed inflow `q` that keeps the outgoing
/// invariant `u_n + 2c`: the root of `2√(g h) − q/h = invariant`, which is
/// unique because the left side increases monotonically in `h`.
pub fn inflow_depth(q: f64, invariant: f64) -> f64 {
    let f = |h: f64| 2.0 * sqrt(GRAVITY * h) - q / h - invariant;
    if q <= 0.0 {
        return if invariant > 0.0 { invariant * invariant / (4.0 * GRAVITY) } else { 0.0 };
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let mut h = 0.5 * (lo + hi);
    for _ in 0..100 {
        let value = f(h);
        if value.abs() <= 1e-14 * (1.0 + invariant.abs()) {
            break;
        }
        if value > 0.0 {
            hi = h;
        } else {
            lo = h;
        }
        let slope = sqrt(GRAVITY / h) + q / (h * h);
        let next = h - value / slope;
        h = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_rect_mesh, sample_bathymetry, subdivide};

    fn channel(n_sg: usize, order: u8, bed: impl Fn(Vec2) -> f64) -> Solver {
        let mut mesh = build_rect_mesh((0.0, 1.0), (0.0, 0.5), 0.1).unwrap();
        mesh.link_periodic(BoundaryTag::SOUTH, BoundaryTag::NORTH).unwrap();
        let part = subdivide(&mesh, n_sg).unwrap();
        let bathy = sample_bathymetry(&mesh, &part, bed).unwrap();
        let bcs = [
            BoundarySpec::new(BoundaryTag::WEST, BoundaryKind::Wall),
            BoundarySpec::new(BoundaryTag::EAST, BoundaryKind::Wall),
        ];
        let cfg = StepConfig { space_order: order, time_order: order, ..StepConfig::default() };
        Solver::new(mesh, part, bathy, &bcs, cfg).unwrap()
    }

    fn bump(p: Vec2) -> f64 {
        1.0 - 0.8 * libm::exp(-20.0 * (p.x - 0.5) * (p.x - 0.5))
    }

    #[test]
    fn missing_boundary_is_rejected() {
        let mesh = build_rect_mesh((0.0, 1.0), (0.0, 1.0), 0.5).unwrap();
        let part = subdivide(&mesh, 1).unwrap();
        let bathy = sample_bathymetry(&mesh, &part, |_| 1.0).unwrap();
        let err = Solver::new(mesh, part, bathy, &[], StepConfig::default()).unwrap_err();
        assert!(matches!(err, Error::MissingBoundary { .. }));
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = StepConfig { cfl: -1.0, ..StepConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = StepConfig { space_order: 3, ..StepConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn lake_at_rest_partially_dry() {
        for order in [1, 2] {
            let mut s = channel(4, order, bump);
            s.initialize_still_water(-0.4).unwrap();
            let v0 = s.total_volume();
            for _ in 0..20 {
                s.step(0.002).unwrap();
            }
            let (eta, status, _) = s.surface().unwrap();
            for m in 0..eta.len() {
                if status[m].has_water() {
                    assert!((eta[m] + 0.4).abs() < 1e-12, "order {order} cell {m}: {}", eta[m]);
                }
                assert!(s.state().hu[m].abs() < 1e-12 && s.state().hv[m].abs() < 1e-12);
            }
            assert!((s.total_volume() - v0).abs() < 1e-13 * v0.max(1.0));
            assert_eq!(s.diagnostics().dry_stencil_reads, 0);
            let d = s.diagnostics();
            assert!(d.face_case_count(FaceCase::WallPartial) + d.face_case_count(FaceCase::DryDry) > 0);
        }
    }

    #[test]
    fn dam_break_conserves_mass_and_stays_positive() {
        let mut s = channel(2, 2, |_| 0.5);
        s.initialize(|x, _| (if x.x < 0.5 { 1.0 } else { 0.1 }, 0.0, 0.0)).unwrap();
        let v0 = s.total_volume();
        s.run_until(0.1, |_, _| {}).unwrap();
        assert!(s.state().h.iter().all(|h| *h >= 0.0));
        assert!((s.total_volume() - v0).abs() < 1e-12);
        assert!(s.diagnostics().unbalanced_volume.abs() < 1e-12);
    }

    #[test]
    fn wetting_front_advances_over_dry_bed() {
        let mut s = channel(3, 1, |_| 0.0);
        s.initialize(|x, _| (if x.x < 0.3 { 0.5 } else { 0.0 }, 0.0, 0.0)).unwrap();
        let v0 = s.total_volume();
        s.run_until(0.1, |_, _| {}).unwrap();
        let wet_far = (0..s.mesh().num_cells())
            .filter(|&m| s.mesh().centroid(m).x > 0.4 && s.state().h[m] > 1e-6)
            .count();
        assert!(wet_far > 0);
        assert!((s.total_volume() - v0).abs() < 1e-12 * v0);
    }

    #[test]
    fn friction_decelerates_uniform_flow() {
        let mut s = channel(1, 1, |_| 1.0);
        s.set_manning(0.03);
        s.initialize(|_, _| (1.0, 1.0, 0.0)).unwrap();
        s.step(0.01).unwrap();
        let u = s.state().hu[0] / s.state().h[0];
        assert!(u < 1.0 && u > 0.99);
    }

    #[test]
    fn dt_follows_cfl() {
        let mut s = channel(1, 1, |_| 1.0);
        s.initialize_still_water(0.0).unwrap();
        let dt = s.compute_dt().unwrap();
        let a = s.mesh().area(0);
        assert!((dt - 0.45 * sqrt(a) / sqrt(GRAVITY)).abs() < 1e-12);
        let mut dry = channel(1, 1, |_| -1.0);
        dry.initialize_still_water(0.0).unwrap();
        assert_eq!(dry.compute_dt().unwrap(), 1.0);
    }

    #[test]
    fn inflow_depth_solves_invariant() {
        for (q, h) in [(2.0, 1.125), (0.5, 0.1), (10.0, 3.0)] {
            let invariant = 2.0 * sqrt(GRAVITY * h) - q / h;
            assert!((inflow_depth(q, invariant) - h).abs() < 1e-12 * h);
        }
        assert_eq!(inflow_depth(0.0, -1.0), 0.0);
        assert!((inflow_depth(0.0, 2.0) - 4.0 / (4.0 * GRAVITY)).abs() < 1e-15);
    }

    #[test]
    fn open_boundaries_keep_uniform_flow() {
        for order in [1, 2] {
            let mut mesh = build_rect_mesh((0.0, 1.0), (0.0, 0.5), 0.1).unwrap();
            mesh.link_periodic(BoundaryTag::SOUTH, BoundaryTag::NORTH).unwrap();
            let part = subdivide(&mesh, 2).unwrap();
            let bathy = sample_bathymetry(&mesh, &part, |_| 1.0).unwrap();
            let bcs = [
                BoundarySpec::new(BoundaryTag::WEST, BoundaryKind::Discharge(0.5)),
                BoundarySpec::new(BoundaryTag::EAST, BoundaryKind::FixedSurface(0.0)),
            ];
            let cfg = StepConfig { space_order: order, time_order: order, ..StepConfig::default() };
            let mut s = Solver::new(mesh, part, bathy, &bcs, cfg).unwrap();
            s.initialize(|_, _| (1.0, 0.5, 0.0)).unwrap();
            for _ in 0..20 {
                let dt = s.compute_dt().unwrap();
                s.step(dt).unwrap();
            }
            let st = s.state();
            for m in 0..st.len() {
                assert!((st.h[m] - 1.0).abs() < 1e-12, "order {order} cell {m}: h {}", st.h[m]);
                assert!((st.hu[m] - 0.5).abs() < 1e-12 && st.hv[m].abs() < 1e-12);
            }
            assert!((s.diagnostics().boundary_inflow).abs() < 1e-10);
        }
    }
}
