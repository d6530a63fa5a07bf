//! Batch driver: assemble a simulation from a configuration, march it to
//! t_end writing snapshots, the hydrograph and the mass-balance report.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use crate::config::{InitialCondition, Side, SimulationConfig};
use crate::dem::read_dem;
use crate::error::{Error, Result};
use crate::grid::{total_water_volume, Field, FlowState, StructuredGrid, Topography};
use crate::hydrology::{InfiltrationState, RainfallForcing};
use crate::output::{
    write_hydrograph, write_mass_balance, write_snapshot, MassBalanceReport, Provenance,
};
use crate::stepper::{
    heun_step, mesh_resolution_warning, SideVolumes, SolverConfig, StageAccounting,
};

/// In-memory simulation: state plus running volume accounting.
pub struct Simulation {
    pub grid: StructuredGrid,
    pub topo: Topography,
    pub state: FlowState,
    pub v_inf: InfiltrationState,
    pub cfg: SolverConfig,
    pub steps: u64,
    pub rain_volume: f64,
    pub infiltrated_volume: f64,
    pub outflow: SideVolumes,
    pub initial_volume: f64,
    pub last_step: StageAccounting,
}

impl Simulation {
    pub fn new(grid: StructuredGrid, topo: Topography, state: FlowState, cfg: SolverConfig) -> Self {
        let initial_volume = total_water_volume(&state, &grid);
        Simulation {
            grid,
            topo,
            state,
            v_inf: InfiltrationState::new(&grid),
            cfg,
            steps: 0,
            rain_volume: 0.0,
            infiltrated_volume: 0.0,
            outflow: SideVolumes::default(),
            initial_volume,
            last_step: StageAccounting::default(),
        }
    }

    /// March to `target` time, stopping exactly on rain breakpoints so the
    /// piecewise-constant forcing integrates exactly.
    pub fn advance_to(&mut self, target: f64) -> Result<()> {
        while self.state.time < target {
            let sub_target = match self.cfg.rain.next_change_after(self.state.time) {
                Some(tb) if tb < target => tb,
                _ => target,
            };
            let remaining = sub_target - self.state.time;
            // sliver below time resolution: snap instead of stepping
            if remaining <= sub_target.abs().max(1.0) * 1e-12 {
                self.state.time = sub_target;
                continue;
            }
            let acc = heun_step(
                &mut self.state,
                &mut self.v_inf,
                &mut self.topo,
                &self.grid,
                &self.cfg,
                remaining,
            )?;
            self.steps += 1;
            self.rain_volume += acc.rain_volume;
            self.infiltrated_volume += acc.infiltrated_volume;
            self.outflow.left += acc.outflow.left;
            self.outflow.right += acc.outflow.right;
            self.outflow.bottom += acc.outflow.bottom;
            self.outflow.top += acc.outflow.top;
            self.last_step = acc;
        }
        Ok(())
    }

    pub fn mass_balance(&self) -> MassBalanceReport {
        MassBalanceReport {
            initial_volume: self.initial_volume,
            rain_volume: self.rain_volume,
            infiltrated_volume: self.infiltrated_volume,
            outflow: self.outflow,
            final_volume: total_water_volume(&self.state, &self.grid),
        }
    }

    /// Instantaneous outlet discharge [m^3/s]: the designated side's share
    /// of the last step's boundary outflow divided by its dt.
    pub fn outlet_discharge(&self, side: Side) -> f64 {
        if self.last_step.dt == 0.0 {
            return 0.0;
        }
        let volume = match side {
            Side::Left => self.last_step.outflow.left,
            Side::Right => self.last_step.outflow.right,
            Side::Bottom => self.last_step.outflow.bottom,
            Side::Top => self.last_step.outflow.top,
        };
        volume / self.last_step.dt
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub quiet: bool,
    /// Worker threads for the sweeps; results are bitwise identical at any
    /// count.
    pub threads: usize,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub steps: u64,
    pub final_time: f64,
    pub wall_seconds: f64,
    pub min_h: f64,
    pub max_h: f64,
    pub residual: f64,
    pub mass_balance: MassBalanceReport,
    pub outputs: Vec<PathBuf>,
}

/// Build the initial state from the configuration.
fn initial_state(
    config: &SimulationConfig,
    grid: &StructuredGrid,
    topo: &Topography,
) -> Result<FlowState> {
    let mut state = FlowState::new(grid);
    match &config.initial {
        InitialCondition::UniformDepth(d) => {
            state.h = Field::constant(grid, *d);
        }
        InitialCondition::SurfaceLevel(level) => {
            let level = *level;
            state.h = Field::from_fn(grid, |i, j| {
                (level - topo.z.get(i as isize, j as isize)).max(0.0)
            });
        }
        InitialCondition::DepthFile(path) => {
            let dem = read_dem(path)?;
            if dem.ncols != grid.nx || dem.nrows != grid.ny {
                return Err(Error::Dem {
                    path: path.clone(),
                    line: 0,
                    message: format!(
                        "depth grid is {}x{}, topography is {}x{}",
                        dem.ncols, dem.nrows, grid.nx, grid.ny
                    ),
                });
            }
            state.h = dem.to_field(grid);
            if state.h.min_interior() < 0.0 {
                return Err(Error::Dem {
                    path: path.clone(),
                    line: 0,
                    message: "initial depth grid has negative values".into(),
                });
            }
        }
    }
    Ok(state)
}

/// Execute a configured run: heun_step until t_end, snapshots every
/// output_interval, hydrograph and mass balance at the end.
pub fn run(config: &SimulationConfig, opts: &RunOptions) -> Result<RunSummary> {
    let wall_start = Instant::now();
    let dem = read_dem(&config.dem_file)?;
    let (grid, topo) = dem.to_topography();
    let state = initial_state(config, &grid, &topo)?;
    let rain = match &config.rain_file {
        Some(path) => crate::config::read_rain_file(path)?,
        None => RainfallForcing::none(),
    };
    let solver_cfg = config.solver_config(rain);

    let output_dir = opts.output_dir.clone().unwrap_or_else(|| config.output_dir.clone());
    fs::create_dir_all(&output_dir).map_err(|e| Error::io(&output_dir, e))?;
    let provenance = Provenance::new(config.hash());

    let threads = opts.threads.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("failed to build worker pool");

    pool.install(|| {
        let mut sim = Simulation::new(grid, topo, state, solver_cfg);
        if let Some(msg) =
            mesh_resolution_warning(&sim.state, &sim.topo, &sim.grid, sim.cfg.h_dry)
        {
            if !opts.quiet {
                eprintln!("warning: {msg}");
            }
        }

        let mut outputs = Vec::new();
        let mut hydrograph = Vec::new();
        let snapshot_path = |k: usize| output_dir.join(format!("snapshot_{k:05}.txt"));

        write_snapshot(&sim.state, &sim.topo, &sim.grid, snapshot_path(0), 0.0, &provenance)?;
        outputs.push(snapshot_path(0));
        if config.outlet.is_some() {
            hydrograph.push((0.0, 0.0));
        }

        let n_samples = (config.t_end / config.output_interval).ceil() as usize;
        for k in 1..=n_samples.max(1) {
            let target = (k as f64 * config.output_interval).min(config.t_end);
            sim.advance_to(target)?;
            write_snapshot(&sim.state, &sim.topo, &sim.grid, snapshot_path(k), target, &provenance)?;
            outputs.push(snapshot_path(k));
            if let Some(side) = config.outlet {
                hydrograph.push((target, sim.outlet_discharge(side)));
            }
            if !opts.quiet {
                let report = sim.mass_balance();
                eprintln!(
                    "t = {:>10.3} s  dt = {:.3e}  h in [{:.3e}, {:.3e}]  residual = {:+.3e}",
                    target,
                    sim.last_step.dt,
                    sim.state.h.min_interior(),
                    sim.state.h.max_interior(),
                    report.residual(),
                );
            }
            if target >= config.t_end {
                break;
            }
        }

        let hydro_path = output_dir.join("hydrograph.txt");
        write_hydrograph(&hydrograph, &hydro_path, &provenance)?;
        outputs.push(hydro_path);

        let report = sim.mass_balance();
        let balance_path = output_dir.join("mass_balance.txt");
        let residual = write_mass_balance(&report, &balance_path, &provenance)?;
        outputs.push(balance_path);

        Ok(RunSummary {
            steps: sim.steps,
            final_time: sim.state.time,
            wall_seconds: wall_start.elapsed().as_secs_f64(),
            min_h: sim.state.h.min_interior(),
            max_h: sim.state.h.max_interior(),
            residual,
            mass_balance: report,
            outputs,
        })
    })
}
