//! Boundary conditions, CFL time step, the Euler stage assembling
//! convection + topography sources + rain/infiltration + friction, and the
//! Heun predictor-corrector.
//!
//! The 2D update is unsplit: x and y flux differences are accumulated from
//! independent dimension-by-dimension sweeps and applied in one stage.
//! Boundary interfaces reflect (wall) or copy (neumann) the interior cell's
//! reconstructed face state, which keeps wall interfaces exactly
//! impermeable. Row sweeps, column sweeps and the per-cell source phase run
//! in parallel; every reduction is a sequential pass over ordered per-line
//! results, so outputs are bitwise identical at any worker count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flux::transverse_flux;
use crate::friction::{apply_friction_2d, FrictionLaw};
use crate::grid::{primitive_velocity, FlowState, StructuredGrid, Topography};
use crate::hydrology::{infiltrate_depth, InfiltrationState, RainfallForcing, SoilParameters};
use crate::reconstruction::{centered_source, interface_states, reconstruct_line, CellReconstruction};

/// Depth below which a cell is dry: velocities zeroed, slopes zeroed,
/// friction skipped.
pub const H_DRY: f64 = 1e-12;

/// Depths in (-1e-15, 0) are roundoff and snapped to zero; anything more
/// negative means the positivity guarantee was violated.
pub const NEGATIVE_DEPTH_TOLERANCE: f64 = -1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Wall,
    Neumann,
    Periodic,
}

/// Boundary kind per domain side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Boundaries {
    pub left: BoundaryKind,
    pub right: BoundaryKind,
    pub bottom: BoundaryKind,
    pub top: BoundaryKind,
}

impl Boundaries {
    pub fn walls() -> Self {
        Boundaries {
            left: BoundaryKind::Wall,
            right: BoundaryKind::Wall,
            bottom: BoundaryKind::Wall,
            top: BoundaryKind::Wall,
        }
    }

    /// Periodic sides must be paired.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let p = BoundaryKind::Periodic;
        if (self.left == p) != (self.right == p) {
            return Err("periodic boundaries must pair left with right".into());
        }
        if (self.bottom == p) != (self.top == p) {
            return Err("periodic boundaries must pair bottom with top".into());
        }
        Ok(())
    }
}

/// Courant number and spatial order of the scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CflSettings {
    pub n_cfl: f64,
    pub order: u8,
}

impl CflSettings {
    /// Default Courant numbers: 0.5 at second order, 1 at first order.
    pub fn for_order(order: u8) -> Self {
        assert!(order == 1 || order == 2, "order must be 1 or 2");
        CflSettings {
            n_cfl: if order == 2 { 0.5 } else { 1.0 },
            order,
        }
    }
}

/// Everything the stepper needs besides the evolving state.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub g: f64,
    pub h_dry: f64,
    pub cfl: CflSettings,
    pub boundaries: Boundaries,
    pub friction: FrictionLaw,
    pub soil: Option<SoilParameters>,
    pub rain: RainfallForcing,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            g: 9.81,
            h_dry: H_DRY,
            cfl: CflSettings::for_order(2),
            boundaries: Boundaries::walls(),
            friction: FrictionLaw::None,
            soil: None,
            rain: RainfallForcing::none(),
        }
    }
}

/// Volumes leaving the domain through each side [m^3].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SideVolumes {
    pub left: f64,
    pub right: f64,
    pub bottom: f64,
    pub top: f64,
}

impl SideVolumes {
    pub fn total(&self) -> f64 {
        self.left + self.right + self.bottom + self.top
    }

    fn scaled_sum(a: &SideVolumes, b: &SideVolumes, s: f64) -> SideVolumes {
        SideVolumes {
            left: s * (a.left + b.left),
            right: s * (a.right + b.right),
            bottom: s * (a.bottom + b.bottom),
            top: s * (a.top + b.top),
        }
    }
}

/// Source and boundary volumes of one stage (or one averaged Heun step).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StageAccounting {
    pub dt: f64,
    pub rain_volume: f64,
    pub infiltrated_volume: f64,
    pub outflow: SideVolumes,
}

/// Populate the ghost ring of the flow fields and topography.
/// Wall: h and z mirror the interior neighbor, normal discharge negated,
/// transverse copied. Neumann: everything copied. Periodic: wrapped.
pub fn fill_ghosts(state: &mut FlowState, topo: &mut Topography, bc: &Boundaries) {
    let nx = state.h.nx() as isize;
    let ny = state.h.ny() as isize;
    for j in 0..ny {
        let (src_l, negate_l) = match bc.left {
            BoundaryKind::Wall => (0, true),
            BoundaryKind::Neumann => (0, false),
            BoundaryKind::Periodic => (nx - 1, false),
        };
        state.h.set(-1, j, state.h.get(src_l, j));
        topo.z.set(-1, j, topo.z.get(src_l, j));
        let qn = state.qx.get(src_l, j);
        state.qx.set(-1, j, if negate_l { -qn } else { qn });
        state.qy.set(-1, j, state.qy.get(src_l, j));

        let (src_r, negate_r) = match bc.right {
            BoundaryKind::Wall => (nx - 1, true),
            BoundaryKind::Neumann => (nx - 1, false),
            BoundaryKind::Periodic => (0, false),
        };
        state.h.set(nx, j, state.h.get(src_r, j));
        topo.z.set(nx, j, topo.z.get(src_r, j));
        let qn = state.qx.get(src_r, j);
        state.qx.set(nx, j, if negate_r { -qn } else { qn });
        state.qy.set(nx, j, state.qy.get(src_r, j));
    }
    for i in 0..nx {
        let (src_b, negate_b) = match bc.bottom {
            BoundaryKind::Wall => (0, true),
            BoundaryKind::Neumann => (0, false),
            BoundaryKind::Periodic => (ny - 1, false),
        };
        state.h.set(i, -1, state.h.get(i, src_b));
        topo.z.set(i, -1, topo.z.get(i, src_b));
        let qn = state.qy.get(i, src_b);
        state.qy.set(i, -1, if negate_b { -qn } else { qn });
        state.qx.set(i, -1, state.qx.get(i, src_b));

        let (src_t, negate_t) = match bc.top {
            BoundaryKind::Wall => (ny - 1, true),
            BoundaryKind::Neumann => (ny - 1, false),
            BoundaryKind::Periodic => (0, false),
        };
        state.h.set(i, ny, state.h.get(i, src_t));
        topo.z.set(i, ny, topo.z.get(i, src_t));
        let qn = state.qy.get(i, src_t);
        state.qy.set(i, ny, if negate_t { -qn } else { qn });
        state.qx.set(i, ny, state.qx.get(i, src_t));
    }
}

/// Candidate CFL speed of one face state: max(|u|, |v|) + sqrt(g h); dry
/// faces contribute nothing. Wet faces are always strictly positive, so a
/// zero maximum means the domain is dry.
#[inline]
fn face_speed(h: f64, un: f64, ut: f64, g: f64, h_dry: f64) -> f64 {
    if h >= h_dry {
        un.abs().max(ut.abs()) + (g * h).sqrt()
    } else {
        0.0
    }
}

fn dt_from_face_speed(speed: f64, grid: &StructuredGrid, settings: CflSettings, t_remaining: f64) -> f64 {
    if speed <= 0.0 {
        return t_remaining;
    }
    (settings.n_cfl * grid.dx.min(grid.dy) / speed).min(t_remaining)
}

/// CFL-limited time step, clipped to `t_remaining`. At second order the
/// maximum runs over the reconstructed face values instead of cell values.
/// Ghosts must be filled. An all-dry domain returns `t_remaining`.
pub fn compute_dt(
    state: &FlowState,
    topo: &Topography,
    grid: &StructuredGrid,
    settings: CflSettings,
    g: f64,
    h_dry: f64,
    t_remaining: f64,
) -> f64 {
    let speed = if settings.order == 1 {
        (0..grid.ny as isize)
            .into_par_iter()
            .with_min_len(16)
            .map(|j| {
                let mut row_max = 0.0f64;
                for i in 0..grid.nx as isize {
                    let h = state.h.get(i, j);
                    let u = primitive_velocity(h, state.qx.get(i, j), h_dry);
                    let v = primitive_velocity(h, state.qy.get(i, j), h_dry);
                    row_max = row_max.max(face_speed(h, u, v, g, h_dry));
                }
                row_max
            })
            .reduce(|| 0.0, f64::max)
    } else {
        let line_max = |rec: &[CellReconstruction]| {
            rec.iter().fold(0.0f64, |m, r| {
                m.max(face_speed(r.h_minus, r.u_minus, r.v_minus, g, h_dry))
                    .max(face_speed(r.h_plus, r.u_plus, r.v_plus, g, h_dry))
            })
        };
        let rows = (0..grid.ny as isize)
            .into_par_iter()
            .with_min_len(16)
            .map(|j| {
                line_max(&reconstruct_line(
                    state.h.row(j),
                    state.qx.row(j),
                    state.qy.row(j),
                    topo.z.row(j),
                    grid.dx,
                    h_dry,
                    true,
                ))
            })
            .reduce(|| 0.0, f64::max);
        let cols = (0..grid.nx as isize)
            .into_par_iter()
            .with_min_len(16)
            .map(|i| {
                let mut hc = Vec::new();
                let mut qnc = Vec::new();
                let mut qtc = Vec::new();
                let mut zc = Vec::new();
                state.h.gather_column(i, &mut hc);
                state.qy.gather_column(i, &mut qnc);
                state.qx.gather_column(i, &mut qtc);
                topo.z.gather_column(i, &mut zc);
                line_max(&reconstruct_line(&hc, &qnc, &qtc, &zc, grid.dy, h_dry, true))
            })
            .reduce(|| 0.0, f64::max);
        rows.max(cols)
    };
    dt_from_face_speed(speed, grid, settings, t_remaining)
}

/// Face state entering a Riemann problem: depth, normal and transverse
/// velocity, bed elevation.
#[derive(Clone, Copy)]
struct FaceState {
    h: f64,
    u: f64,
    v: f64,
    z: f64,
}

impl FaceState {
    fn minus_of(r: &CellReconstruction) -> Self {
        FaceState { h: r.h_minus, u: r.u_minus, v: r.v_minus, z: r.z_minus }
    }

    fn plus_of(r: &CellReconstruction) -> Self {
        FaceState { h: r.h_plus, u: r.u_plus, v: r.v_plus, z: r.z_plus }
    }

    fn reflected(self) -> Self {
        FaceState { u: -self.u, ..self }
    }
}

/// One-dimensional sweep along a ghosted line (length n + 2): accumulates
/// -dF/dx with interface and centered sources into the per-cell buffers and
/// returns the mass fluxes through the two boundary interfaces.
#[allow(clippy::too_many_arguments)]
fn sweep_line(
    h: &[f64],
    qn: &[f64],
    qt: &[f64],
    z: &[f64],
    dx: f64,
    g: f64,
    h_dry: f64,
    second_order: bool,
    bc_low: BoundaryKind,
    bc_high: BoundaryKind,
    dh: &mut [f64],
    dqn: &mut [f64],
    dqt: &mut [f64],
) -> (f64, f64, f64) {
    let n = h.len() - 2;
    let rec = reconstruct_line(h, qn, qt, z, dx, h_dry, second_order);

    // CFL speed over the reconstructed face values, before the hydrostatic
    // clipping (the clipped depths would underestimate the wave speeds)
    let max_speed = rec.iter().fold(0.0f64, |m, r| {
        m.max(face_speed(r.h_minus, r.u_minus, r.v_minus, g, h_dry))
            .max(face_speed(r.h_plus, r.u_plus, r.v_plus, g, h_dry))
    });

    let low_face = match bc_low {
        BoundaryKind::Wall => FaceState::minus_of(&rec[0]).reflected(),
        BoundaryKind::Neumann => FaceState::minus_of(&rec[0]),
        BoundaryKind::Periodic => FaceState::plus_of(&rec[n - 1]),
    };
    let high_face = match bc_high {
        BoundaryKind::Wall => FaceState::plus_of(&rec[n - 1]).reflected(),
        BoundaryKind::Neumann => FaceState::plus_of(&rec[n - 1]),
        BoundaryKind::Periodic => FaceState::minus_of(&rec[0]),
    };

    // interface m sits between cells m-1 and m; stream the interface loop
    // and finalize cell m-1 as soon as both of its fluxes are known
    let mut f_h_low = 0.0;
    let mut prev = (0.0, 0.0, 0.0); // (f_h, f_qn + s_right, f_qt) of interface m-1
    for m in 0..=n {
        let lf = if m == 0 { low_face } else { FaceState::plus_of(&rec[m - 1]) };
        let rf = if m == n { high_face } else { FaceState::minus_of(&rec[m]) };
        let st = interface_states(lf.h, lf.u, lf.z, rf.h, rf.u, rf.z, g);
        let fx = transverse_flux(st.h_left, st.u_left, lf.v, st.h_right, st.u_right, rf.v, g, h_dry);
        if m == 0 {
            f_h_low = fx.f_h;
        } else {
            let k = m - 1;
            let r = &rec[k];
            let sc = centered_source(r.h_minus, r.h_plus, r.z_minus, r.z_plus, g);
            dh[k] -= (fx.f_h - prev.0) / dx;
            dqn[k] -= (fx.f_qn + st.s_left - prev.1 - sc) / dx;
            dqt[k] -= (fx.f_qt - prev.2) / dx;
        }
        prev = (fx.f_h, fx.f_qn + st.s_right, fx.f_qt);
    }
    (f_h_low, prev.0, max_speed)
}

struct ColumnResult {
    dh: Vec<f64>,
    dqn: Vec<f64>,
    dqt: Vec<f64>,
    f_bottom: f64,
    f_top: f64,
    max_speed: f64,
}

/// With a single row between two walls, the y-sweep provably produces zero
/// updates and zero boundary fluxes; 1D runs skip it.
fn y_sweep_is_trivial(grid: &StructuredGrid, bc: &Boundaries) -> bool {
    grid.ny == 1 && bc.bottom == BoundaryKind::Wall && bc.top == BoundaryKind::Wall
}

/// Convection phase of one stage: flux differences and source terms per
/// unit time, boundary mass fluxes per line, and the CFL face speed.
struct ConvectivePhase {
    dh: Vec<f64>,
    dqx: Vec<f64>,
    dqy: Vec<f64>,
    row_fluxes: Vec<(f64, f64)>,
    col_fluxes: Vec<(f64, f64)>,
    max_face_speed: f64,
}

#[derive(Default)]
struct RowOutcome {
    rain_volume: f64,
    infiltrated_volume: f64,
    error: Option<Error>,
}

/// One explicit Euler stage: convection with topography sources, then rain,
/// infiltration and friction. Fills the ghost ring of the input state.
/// Returns the new state, the new infiltration state and the stage volumes.
pub fn euler_stage(
    state: &mut FlowState,
    v_inf: &InfiltrationState,
    topo: &mut Topography,
    grid: &StructuredGrid,
    cfg: &SolverConfig,
    dt: f64,
) -> Result<(FlowState, InfiltrationState, StageAccounting)> {
    let rain_rate = cfg.rain.rainfall_at(state.time);
    fill_ghosts(state, topo, &cfg.boundaries);
    let conv = convective_phase(state, topo, grid, cfg);
    apply_phase(state, v_inf, &conv, grid, cfg, dt, rain_rate, "euler")
}

fn convective_phase(
    state: &FlowState,
    topo: &Topography,
    grid: &StructuredGrid,
    cfg: &SolverConfig,
) -> ConvectivePhase {
    let nx = grid.nx;
    let ny = grid.ny;
    let second_order = cfg.cfl.order == 2;
    let (g, h_dry) = (cfg.g, cfg.h_dry);
    let bc = cfg.boundaries;

    let mut dh = vec![0.0; nx * ny];
    let mut dqx = vec![0.0; nx * ny];
    let mut dqy = vec![0.0; nx * ny];

    // x sweep, rows in parallel
    let row_results: Vec<(f64, f64, f64)> = dh
        .par_chunks_mut(nx)
        .zip(dqx.par_chunks_mut(nx))
        .zip(dqy.par_chunks_mut(nx))
        .enumerate()
        .with_min_len(16)
        .map(|(j, ((dh_r, dqx_r), dqy_r))| {
            let j = j as isize;
            sweep_line(
                state.h.row(j),
                state.qx.row(j),
                state.qy.row(j),
                topo.z.row(j),
                grid.dx,
                g,
                h_dry,
                second_order,
                bc.left,
                bc.right,
                dh_r,
                dqx_r,
                dqy_r,
            )
        })
        .collect();
    let mut max_face_speed = row_results.iter().fold(0.0f64, |m, r| m.max(r.2));
    let row_fluxes: Vec<(f64, f64)> = row_results.iter().map(|r| (r.0, r.1)).collect();

    // y sweep, columns in parallel; normal discharge is qy, transverse qx
    let col_results: Vec<ColumnResult> = if y_sweep_is_trivial(grid, &bc) {
        Vec::new()
    } else {
        (0..nx as isize)
            .into_par_iter()
            .with_min_len(16)
            .map(|i| {
                let mut hc = Vec::new();
                let mut qnc = Vec::new();
                let mut qtc = Vec::new();
                let mut zc = Vec::new();
                state.h.gather_column(i, &mut hc);
                state.qy.gather_column(i, &mut qnc);
                state.qx.gather_column(i, &mut qtc);
                topo.z.gather_column(i, &mut zc);
                let mut dh_c = vec![0.0; ny];
                let mut dqn_c = vec![0.0; ny];
                let mut dqt_c = vec![0.0; ny];
                let (f_bottom, f_top, max_speed) = sweep_line(
                    &hc, &qnc, &qtc, &zc, grid.dy, g, h_dry, second_order, bc.bottom, bc.top,
                    &mut dh_c, &mut dqn_c, &mut dqt_c,
                );
                ColumnResult { dh: dh_c, dqn: dqn_c, dqt: dqt_c, f_bottom, f_top, max_speed }
            })
            .collect()
    };
    for (i, col) in col_results.iter().enumerate() {
        max_face_speed = max_face_speed.max(col.max_speed);
        for j in 0..ny {
            dh[j * nx + i] += col.dh[j];
            dqy[j * nx + i] += col.dqn[j];
            dqx[j * nx + i] += col.dqt[j];
        }
    }
    let col_fluxes: Vec<(f64, f64)> = col_results.iter().map(|c| (c.f_bottom, c.f_top)).collect();

    ConvectivePhase { dh, dqx, dqy, row_fluxes, col_fluxes, max_face_speed }
}

#[allow(clippy::too_many_arguments)]
fn apply_phase(
    state: &FlowState,
    v_inf: &InfiltrationState,
    conv: &ConvectivePhase,
    grid: &StructuredGrid,
    cfg: &SolverConfig,
    dt: f64,
    rain_rate: f64,
    stage: &'static str,
) -> Result<(FlowState, InfiltrationState, StageAccounting)> {
    let nx = grid.nx;
    let ny = grid.ny;
    let (g, h_dry) = (cfg.g, cfg.h_dry);

    // boundary outflow volumes, reduced in a fixed order
    let mut outflow = SideVolumes::default();
    for &(f_left, f_right) in &conv.row_fluxes {
        outflow.left += -f_left * dt * grid.dy;
        outflow.right += f_right * dt * grid.dy;
    }
    for &(f_bottom, f_top) in &conv.col_fluxes {
        outflow.bottom += -f_bottom * dt * grid.dx;
        outflow.top += f_top * dt * grid.dx;
    }

    // per-cell phase: apply deltas, then rain, infiltration, friction
    let cell_area = grid.cell_area();
    let time = state.time;
    let stride = state.h.stride();
    let mut new_state = state.clone();
    new_state.time = state.time + dt;
    let mut new_vinf = v_inf.clone();

    let outcomes: Vec<RowOutcome> = {
        let (old, vinf_old) = (state, v_inf);
        let (dh, dqx, dqy) = (&conv.dh, &conv.dqx, &conv.dqy);
        new_state
            .h
            .data_mut()
            .par_chunks_mut(stride)
            .zip(new_state.qx.data_mut().par_chunks_mut(stride))
            .zip(new_state.qy.data_mut().par_chunks_mut(stride))
            .zip(new_vinf.v_inf.data_mut().par_chunks_mut(stride))
            .enumerate()
            .with_min_len(16)
            .map(|(jg, (((h_row, qx_row), qy_row), vinf_row))| {
                if jg == 0 || jg == ny + 1 {
                    return RowOutcome::default();
                }
                let j = (jg - 1) as isize;
                let mut out = RowOutcome::default();
                let h_old_row = old.h.row(j);
                let qx_old_row = old.qx.row(j);
                let qy_old_row = old.qy.row(j);
                let vinf_old_row = vinf_old.v_inf.row(j);
                for i in 0..nx {
                    let k = i + 1;
                    let di = (jg - 1) * nx + i;
                    let h_old = h_old_row[k];
                    let qx_old = qx_old_row[k];
                    let qy_old = qy_old_row[k];

                    let mut h = h_old + dt * dh[di];
                    if h < 0.0 {
                        if h < NEGATIVE_DEPTH_TOLERANCE {
                            out.error = Some(Error::NegativeDepth { i, j: jg - 1, value: h, time });
                            return out;
                        }
                        h = 0.0;
                    }
                    let mut qx = qx_old + dt * dqx[di];
                    let mut qy = qy_old + dt * dqy[di];

                    if rain_rate > 0.0 {
                        h += dt * rain_rate;
                        out.rain_volume += dt * rain_rate * cell_area;
                    }
                    if let Some(soil) = &cfg.soil {
                        let (depth, v_new) = infiltrate_depth(soil, vinf_old_row[k], h, dt);
                        h -= depth;
                        out.infiltrated_volume += depth * cell_area;
                        vinf_row[k] = v_new;
                    }
                    let (qx_f, qy_f) = apply_friction_2d(
                        h, qx, qy, qx_old, qy_old, h_old, cfg.friction, dt, g, h_dry,
                    );
                    qx = qx_f;
                    qy = qy_f;
                    if h < h_dry {
                        qx = 0.0;
                        qy = 0.0;
                    }
                    let bad = [("h", h), ("qx", qx), ("qy", qy)]
                        .into_iter()
                        .find(|(_, v)| !v.is_finite());
                    if let Some((field, _)) = bad {
                        out.error = Some(Error::NonFinite { field, i, j: jg - 1, stage, time });
                        return out;
                    }
                    h_row[k] = h;
                    qx_row[k] = qx;
                    qy_row[k] = qy;
                }
                out
            })
            .collect()
    };

    let mut acc = StageAccounting { dt, outflow, ..Default::default() };
    for outcome in outcomes {
        if let Some(err) = outcome.error {
            return Err(err);
        }
        acc.rain_volume += outcome.rain_volume;
        acc.infiltrated_volume += outcome.infiltrated_volume;
    }
    Ok((new_state, new_vinf, acc))
}

/// Average the interiors of two per-cell arrays into `dst`: (a + b) / 2.
fn average_interior(dst: &mut crate::grid::Field, a: &crate::grid::Field, b: &crate::grid::Field) {
    let nx = dst.nx() as isize;
    let ny = dst.ny() as isize;
    for j in 0..ny {
        for i in 0..nx {
            dst.set(i, j, 0.5 * (a.get(i, j) + b.get(i, j)));
        }
    }
}

/// One Heun predictor-corrector step (a single Euler stage at order 1).
/// dt comes from the CFL bound over the reconstructed face values of the
/// input state (reusing the predictor sweep's reconstruction) and is frozen
/// across both stages, and so is the rain rate: the run loop never steps
/// across a rain breakpoint, so the rate at the step start is the exact
/// integral rate and sampling it again at t + dt would lose half a
/// breakpoint step.
///
/// The frozen dt is checked against the corrector state's own face speeds:
/// an impulsively started flow (for example the first ponded film on a
/// slope, where the semi-implicit friction has no q^n to bite on) can more
/// than double its wave speeds within the predictor, and running the
/// corrector past its CFL bound breaks positivity. When that happens the
/// whole step is redone with the dt halved, still frozen across both
/// stages.
///
/// Mutates `state` and `v_inf` in place and returns the step's volume
/// accounting (stage volumes averaged like the state itself).
pub fn heun_step(
    state: &mut FlowState,
    v_inf: &mut InfiltrationState,
    topo: &mut Topography,
    grid: &StructuredGrid,
    cfg: &SolverConfig,
    t_remaining: f64,
) -> Result<StageAccounting> {
    fill_ghosts(state, topo, &cfg.boundaries);
    let t0 = state.time;
    let rain_rate = cfg.rain.rainfall_at(t0);

    let conv1 = convective_phase(state, topo, grid, cfg);
    let mut dt = dt_from_face_speed(conv1.max_face_speed, grid, cfg.cfl, t_remaining);
    for _attempt in 0..64 {
        let (mut predicted, vinf_predicted, acc1) =
            apply_phase(state, v_inf, &conv1, grid, cfg, dt, rain_rate, "predictor")?;
        if cfg.cfl.order == 1 {
            *state = predicted;
            *v_inf = vinf_predicted;
            return Ok(acc1);
        }

        fill_ghosts(&mut predicted, topo, &cfg.boundaries);
        let conv2 = convective_phase(&predicted, topo, grid, cfg);
        let corrector_bound = dt_from_face_speed(conv2.max_face_speed, grid, cfg.cfl, f64::MAX);
        if dt > corrector_bound {
            dt *= 0.5;
            continue;
        }
        let (corrected, vinf_corrected, acc2) = apply_phase(
            &predicted,
            &vinf_predicted,
            &conv2,
            grid,
            cfg,
            dt,
            rain_rate,
            "corrector",
        )?;

        let mut next = state.clone();
        average_interior(&mut next.h, &state.h, &corrected.h);
        average_interior(&mut next.qx, &state.qx, &corrected.qx);
        average_interior(&mut next.qy, &state.qy, &corrected.qy);
        next.time = t0 + dt;
        let vinf_before = v_inf.v_inf.clone();
        average_interior(&mut v_inf.v_inf, &vinf_before, &vinf_corrected.v_inf);
        *state = next;

        return Ok(StageAccounting {
            dt,
            rain_volume: 0.5 * (acc1.rain_volume + acc2.rain_volume),
            infiltrated_volume: 0.5 * (acc1.infiltrated_volume + acc2.infiltrated_volume),
            outflow: SideVolumes::scaled_sum(&acc1.outflow, &acc2.outflow, 0.5),
        });
    }
    // 64 halvings shrink any dt below every other scale in the problem
    Err(Error::CflStall { time: t0 })
}

/// Warn when the mesh is too coarse for the water depth: the hydrostatic
/// reconstruction needs cell-to-cell bed jumps small against the mean wet
/// depth.
pub fn mesh_resolution_warning(
    state: &FlowState,
    topo: &Topography,
    grid: &StructuredGrid,
    h_dry: f64,
) -> Option<String> {
    let mut wet_sum = 0.0;
    let mut wet_count = 0usize;
    for j in 0..grid.ny as isize {
        for i in 0..grid.nx as isize {
            let h = state.h.get(i, j);
            if h >= h_dry {
                wet_sum += h;
                wet_count += 1;
            }
        }
    }
    if wet_count == 0 {
        return None;
    }
    let mean_wet = wet_sum / wet_count as f64;
    let mut max_dz = 0.0f64;
    for j in 0..grid.ny as isize {
        for i in 0..grid.nx as isize {
            if i + 1 < grid.nx as isize {
                max_dz = max_dz.max((topo.z.get(i + 1, j) - topo.z.get(i, j)).abs());
            }
            if j + 1 < grid.ny as isize {
                max_dz = max_dz.max((topo.z.get(i, j + 1) - topo.z.get(i, j)).abs());
            }
        }
    }
    if mean_wet < max_dz {
        Some(format!(
            "mean wet depth {mean_wet:.3e} m is below the largest cell-to-cell bed jump \
             {max_dz:.3e} m; the hydrostatic reconstruction may stall flow over steps"
        ))
    } else {
        None
    }
}
