//! Text emission of grid snapshots, the outlet hydrograph and the mass
//! balance report. Floats are written with the shortest representation
//! that parses back bit-exactly, and every file header carries the config
//! hash and code version.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{primitive_velocity, FlowState, StructuredGrid, Topography};
use crate::stepper::{SideVolumes, H_DRY};

/// Identifies what produced an output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    pub version: &'static str,
}

impl Provenance {
    pub fn new(config_hash: String) -> Self {
        Provenance { config_hash, version: env!("CARGO_PKG_VERSION") }
    }

    fn header_line(&self) -> String {
        format!("# config={} version={}", self.config_hash, self.version)
    }
}

/// Plot-ready snapshot: "# t = <t>", then one line per cell
/// "x y h u v z h+z qx qy" in row-major order, rows separated by a blank
/// line. Dry cells write zero velocities, never NaN.
pub fn write_snapshot(
    state: &FlowState,
    topo: &Topography,
    grid: &StructuredGrid,
    path: impl AsRef<Path>,
    t: f64,
    provenance: &Provenance,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str(&provenance.header_line());
    out.push('\n');
    out.push_str(&format!("# t = {t}\n"));
    for j in 0..grid.ny {
        if j > 0 {
            out.push('\n');
        }
        for i in 0..grid.nx {
            let (x, y) = grid.cell_center(i, j);
            let (ii, jj) = (i as isize, j as isize);
            let h = state.h.get(ii, jj);
            let qx = state.qx.get(ii, jj);
            let qy = state.qy.get(ii, jj);
            let u = primitive_velocity(h, qx, H_DRY);
            let v = primitive_velocity(h, qy, H_DRY);
            let z = topo.z.get(ii, jj);
            out.push_str(&format!("{x} {y} {h} {u} {v} {z} {} {qx} {qy}\n", h + z));
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Two-column outlet discharge record "t Q".
pub fn write_hydrograph(
    samples: &[(f64, f64)],
    path: impl AsRef<Path>,
    provenance: &Provenance,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str(&provenance.header_line());
    out.push('\n');
    out.push_str("# t [s]  Q [m^3/s]\n");
    for &(t, q) in samples {
        out.push_str(&format!("{t} {q}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Final volume accounting of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassBalanceReport {
    pub initial_volume: f64,
    pub rain_volume: f64,
    pub infiltrated_volume: f64,
    pub outflow: SideVolumes,
    pub final_volume: f64,
}

impl MassBalanceReport {
    /// Closure residual: final - initial - rain + infiltrated + outflow.
    pub fn residual(&self) -> f64 {
        self.final_volume - self.initial_volume - self.rain_volume
            + self.infiltrated_volume
            + self.outflow.total()
    }
}

/// Writes the report and returns the closure residual.
pub fn write_mass_balance(
    report: &MassBalanceReport,
    path: impl AsRef<Path>,
    provenance: &Provenance,
) -> Result<f64> {
    let path = path.as_ref();
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let residual = report.residual();
    let body = format!(
        "{}\n\
         initial volume      [m^3] {}\n\
         rain volume         [m^3] {}\n\
         infiltrated volume  [m^3] {}\n\
         outflow left        [m^3] {}\n\
         outflow right       [m^3] {}\n\
         outflow bottom      [m^3] {}\n\
         outflow top         [m^3] {}\n\
         final volume        [m^3] {}\n\
         closure residual    [m^3] {}\n",
        provenance.header_line(),
        report.initial_volume,
        report.rain_volume,
        report.infiltrated_volume,
        report.outflow.left,
        report.outflow.right,
        report.outflow.bottom,
        report.outflow.top,
        report.final_volume,
        residual,
    );
    f.write_all(body.as_bytes()).map_err(|e| Error::io(path, e))?;
    Ok(residual)
}
