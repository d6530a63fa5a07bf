//! Finite-volume solver for the 2D (and 1D) shallow water equations with
//! rainfall, Green-Ampt infiltration and friction source terms, aimed at
//! rainfall-runoff and overland flow simulation.
//!
//! The scheme is a well-balanced, positivity-preserving hydrostatic
//! reconstruction: MUSCL/minmod interface values of u, h and h+z, the HLL
//! approximate Riemann flux, interface and centered topography sources,
//! semi-implicit friction and Heun time stepping under a CFL bound. Still
//! water over arbitrary topography is an exact steady state and depths
//! never go negative, which is what the numerous wet/dry transitions of
//! overland flow require.

pub mod config;
pub mod dem;
pub mod error;
pub mod flux;
pub mod friction;
pub mod grid;
pub mod hydrology;
pub mod oracles;
pub mod output;
pub mod reconstruction;
pub mod runner;
pub mod stepper;
pub mod verify;

pub use config::{parse_config, parse_config_with_overrides, SimulationConfig};
pub use error::{Error, Result};
pub use grid::{FlowState, StructuredGrid, Topography};
pub use runner::{run, RunOptions, RunSummary, Simulation};
pub use stepper::{SolverConfig, H_DRY};
