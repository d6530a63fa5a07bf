//! Simulation configuration: "key = value" text files with '#' comments.
//! Unknown keys are hard errors so typos cannot silently fall back to
//! defaults. Command-line overrides patch the raw keys before validation.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::friction::FrictionLaw;
use crate::hydrology::{RainfallForcing, SoilParameters};
use crate::stepper::{Boundaries, BoundaryKind, CflSettings, SolverConfig};

pub const KNOWN_KEYS: &[&str] = &[
    "dem_file",
    "t_end",
    "output_interval",
    "g",
    "order",
    "cfl",
    "friction",
    "friction_coefficient",
    "infiltration",
    "Ks",
    "hf",
    "dtheta",
    "rain_file",
    "boundary_left",
    "boundary_right",
    "boundary_bottom",
    "boundary_top",
    "initial_depth",
    "initial_depth_file",
    "initial_surface_level",
    "output_dir",
    "outlet",
];

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Uniform still water of the given depth (0 = dry start).
    UniformDepth(f64),
    /// Depth grid in the same ESRI ASCII layout as the DEM.
    DepthFile(PathBuf),
    /// Lake at rest: h = max(level - z, 0).
    SurfaceLevel(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub fn name(&self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub dem_file: PathBuf,
    pub t_end: f64,
    pub output_interval: f64,
    pub g: f64,
    pub order: u8,
    pub cfl: f64,
    pub friction: FrictionLaw,
    pub infiltration: Option<SoilParameters>,
    pub boundaries: Boundaries,
    pub initial: InitialCondition,
    pub rain_file: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub outlet: Option<Side>,
}

impl SimulationConfig {
    pub fn solver_config(&self, rain: RainfallForcing) -> SolverConfig {
        SolverConfig {
            g: self.g,
            h_dry: crate::stepper::H_DRY,
            cfl: CflSettings { n_cfl: self.cfl, order: self.order },
            boundaries: self.boundaries,
            friction: self.friction,
            soil: self.infiltration,
            rain,
        }
    }

    /// Canonical physics/numerics listing used for the provenance hash.
    /// Excludes output_dir (runs into different directories must hash the
    /// same) and anything on the execution side such as worker counts.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        let kv = |k: &str, v: String| format!("{k} = {v}\n");
        out.push_str(&kv("dem_file", self.dem_file.display().to_string()));
        out.push_str(&kv("t_end", format!("{:?}", self.t_end)));
        out.push_str(&kv("output_interval", format!("{:?}", self.output_interval)));
        out.push_str(&kv("g", format!("{:?}", self.g)));
        out.push_str(&kv("order", self.order.to_string()));
        out.push_str(&kv("cfl", format!("{:?}", self.cfl)));
        match self.friction {
            FrictionLaw::None => out.push_str(&kv("friction", "none".into())),
            FrictionLaw::DarcyWeisbach { coefficient } => {
                out.push_str(&kv("friction", "darcy-weisbach".into()));
                out.push_str(&kv("friction_coefficient", format!("{coefficient:?}")));
            }
            FrictionLaw::Manning { coefficient } => {
                out.push_str(&kv("friction", "manning".into()));
                out.push_str(&kv("friction_coefficient", format!("{coefficient:?}")));
            }
        }
        match &self.infiltration {
            None => out.push_str(&kv("infiltration", "none".into())),
            Some(s) => {
                out.push_str(&kv("infiltration", "greenampt".into()));
                out.push_str(&kv("Ks", format!("{:?}", s.ks)));
                out.push_str(&kv("hf", format!("{:?}", s.hf)));
                out.push_str(&kv("dtheta", format!("{:?}", s.dtheta)));
            }
        }
        let bname = |b: BoundaryKind| match b {
            BoundaryKind::Wall => "wall",
            BoundaryKind::Neumann => "neumann",
            BoundaryKind::Periodic => "periodic",
        };
        out.push_str(&kv("boundary_left", bname(self.boundaries.left).into()));
        out.push_str(&kv("boundary_right", bname(self.boundaries.right).into()));
        out.push_str(&kv("boundary_bottom", bname(self.boundaries.bottom).into()));
        out.push_str(&kv("boundary_top", bname(self.boundaries.top).into()));
        match &self.initial {
            InitialCondition::UniformDepth(d) => {
                out.push_str(&kv("initial_depth", format!("{d:?}")))
            }
            InitialCondition::DepthFile(p) => {
                out.push_str(&kv("initial_depth_file", p.display().to_string()))
            }
            InitialCondition::SurfaceLevel(l) => {
                out.push_str(&kv("initial_surface_level", format!("{l:?}")))
            }
        }
        if let Some(p) = &self.rain_file {
            out.push_str(&kv("rain_file", p.display().to_string()));
        }
        if let Some(s) = &self.outlet {
            out.push_str(&kv("outlet", s.name().into()));
        }
        out
    }

    /// Short hex digest of the canonical listing.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

struct RawConfig {
    path: PathBuf,
    /// key -> (value, line number)
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Config { path: self.path.clone(), line, message: message.into() }
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn parse_f64(&self, key: &str, raw: &str, line: usize) -> Result<f64> {
        raw.parse::<f64>()
            .map_err(|_| self.err(line, format!("cannot parse {key} = '{raw}' as a number")))
    }
}

fn read_raw(path: &Path, overrides: &[(String, String)]) -> Result<RawConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut raw = RawConfig { path: path.to_path_buf(), entries: BTreeMap::new() };
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| raw.err(line_no, format!("expected 'key = value', found '{content}'")))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(raw.err(line_no, format!("unknown key '{key}'")));
        }
        if raw.entries.contains_key(&key) {
            return Err(raw.err(line_no, format!("duplicate key '{key}'")));
        }
        raw.entries.insert(key, (value, line_no));
    }
    for (key, value) in overrides {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(raw.err(0, format!("unknown key '{key}' in override")));
        }
        raw.entries.insert(key.clone(), (value.clone(), 0));
    }
    Ok(raw)
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<SimulationConfig> {
    parse_config_with_overrides(path, &[])
}

#[allow(clippy::neg_cmp_op_on_partial_ord)] // !(x > 0) also rejects NaN
pub fn parse_config_with_overrides(
    path: impl AsRef<Path>,
    overrides: &[(String, String)],
) -> Result<SimulationConfig> {
    let path = path.as_ref();
    let mut raw = read_raw(path, overrides)?;

    let (dem_value, _) = raw
        .take("dem_file")
        .ok_or_else(|| raw.err(0, "missing mandatory key 'dem_file'"))?;
    let dem_file = PathBuf::from(dem_value);

    let (t_end_raw, t_end_line) = raw
        .take("t_end")
        .ok_or_else(|| raw.err(0, "missing mandatory key 't_end'"))?;
    let t_end = raw.parse_f64("t_end", &t_end_raw, t_end_line)?;
    if !(t_end > 0.0) {
        return Err(raw.err(t_end_line, format!("t_end must be positive, got {t_end}")));
    }

    let output_interval = match raw.take("output_interval") {
        Some((v, line)) => {
            let x = raw.parse_f64("output_interval", &v, line)?;
            if !(x > 0.0) {
                return Err(raw.err(line, format!("output_interval must be positive, got {x}")));
            }
            x
        }
        None => t_end,
    };

    let g = match raw.take("g") {
        Some((v, line)) => {
            let x = raw.parse_f64("g", &v, line)?;
            if !(x > 0.0) {
                return Err(raw.err(line, format!("g must be positive, got {x}")));
            }
            x
        }
        None => crate::grid::PhysicalConstants::default().g,
    };

    let order = match raw.take("order") {
        Some((v, line)) => match v.as_str() {
            "1" => 1,
            "2" => 2,
            other => return Err(raw.err(line, format!("order must be 1 or 2, got '{other}'"))),
        },
        None => 2,
    };

    let cfl = match raw.take("cfl") {
        Some((v, line)) => {
            let x = raw.parse_f64("cfl", &v, line)?;
            if !(x > 0.0 && x <= 1.0) {
                return Err(raw.err(line, "cfl must be in (0, 1]".to_string()));
            }
            x
        }
        None => CflSettings::for_order(order).n_cfl,
    };

    let friction_kind = raw.take("friction");
    let friction_coeff = raw.take("friction_coefficient");
    let friction = match friction_kind.as_ref().map(|(v, l)| (v.as_str(), *l)) {
        None | Some(("none", _)) => {
            if let Some((_, line)) = friction_coeff {
                return Err(raw.err(line, "friction_coefficient given but friction = none"));
            }
            FrictionLaw::None
        }
        Some((kind @ ("darcy-weisbach" | "manning"), line)) => {
            let (cv, cline) = friction_coeff
                .ok_or_else(|| raw.err(line, format!("friction = {kind} requires friction_coefficient")))?;
            let c = raw.parse_f64("friction_coefficient", &cv, cline)?;
            if c < 0.0 {
                return Err(raw.err(cline, format!("friction_coefficient must be >= 0, got {c}")));
            }
            if kind == "manning" {
                FrictionLaw::Manning { coefficient: c }
            } else {
                FrictionLaw::DarcyWeisbach { coefficient: c }
            }
        }
        Some((other, line)) => {
            return Err(raw.err(
                line,
                format!("friction must be darcy-weisbach | manning | none, got '{other}'"),
            ))
        }
    };

    let infiltration_kind = raw.take("infiltration");
    let ks = raw.take("Ks");
    let hf = raw.take("hf");
    let dtheta = raw.take("dtheta");
    let infiltration = match infiltration_kind.as_ref().map(|(v, l)| (v.as_str(), *l)) {
        None | Some(("none", _)) => {
            for (name, entry) in [("Ks", &ks), ("hf", &hf), ("dtheta", &dtheta)] {
                if let Some((_, line)) = entry {
                    return Err(raw.err(*line, format!("{name} given but infiltration = none")));
                }
            }
            None
        }
        Some(("greenampt", line)) => {
            let need = |name: &str, entry: Option<(String, usize)>| -> Result<(String, usize)> {
                entry.ok_or_else(|| raw.err(line, format!("infiltration = greenampt requires {name}")))
            };
            let (ks_v, ks_l) = need("Ks", ks)?;
            let (hf_v, hf_l) = need("hf", hf)?;
            let (dt_v, dt_l) = need("dtheta", dtheta)?;
            let soil = SoilParameters {
                ks: raw.parse_f64("Ks", &ks_v, ks_l)?,
                hf: raw.parse_f64("hf", &hf_v, hf_l)?,
                dtheta: raw.parse_f64("dtheta", &dt_v, dt_l)?,
            };
            soil.validate().map_err(|m| raw.err(line, m))?;
            Some(soil)
        }
        Some((other, line)) => {
            return Err(raw.err(
                line,
                format!("infiltration must be greenampt | none, got '{other}'"),
            ))
        }
    };

    let mut boundary = |key: &str| -> Result<BoundaryKind> {
        match raw.take(key) {
            None => Ok(BoundaryKind::Wall),
            Some((v, line)) => match v.as_str() {
                "wall" => Ok(BoundaryKind::Wall),
                "neumann" => Ok(BoundaryKind::Neumann),
                "periodic" => Ok(BoundaryKind::Periodic),
                other => Err(raw.err(
                    line,
                    format!("{key} must be wall | neumann | periodic, got '{other}'"),
                )),
            },
        }
    };
    let boundaries = Boundaries {
        left: boundary("boundary_left")?,
        right: boundary("boundary_right")?,
        bottom: boundary("boundary_bottom")?,
        top: boundary("boundary_top")?,
    };
    boundaries.validate().map_err(|m| raw.err(0, m))?;

    let init_depth = raw.take("initial_depth");
    let init_file = raw.take("initial_depth_file");
    let init_level = raw.take("initial_surface_level");
    let given = [init_depth.is_some(), init_file.is_some(), init_level.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if given > 1 {
        return Err(raw.err(
            0,
            "initial_depth, initial_depth_file and initial_surface_level are mutually exclusive",
        ));
    }
    let initial = if let Some((v, line)) = init_depth {
        let d = raw.parse_f64("initial_depth", &v, line)?;
        if d < 0.0 {
            return Err(raw.err(line, format!("initial_depth must be >= 0, got {d}")));
        }
        InitialCondition::UniformDepth(d)
    } else if let Some((v, _)) = init_file {
        InitialCondition::DepthFile(PathBuf::from(v))
    } else if let Some((v, line)) = init_level {
        InitialCondition::SurfaceLevel(raw.parse_f64("initial_surface_level", &v, line)?)
    } else {
        InitialCondition::UniformDepth(0.0)
    };

    let rain_file = raw.take("rain_file").map(|(v, _)| PathBuf::from(v));
    let output_dir = raw
        .take("output_dir")
        .map(|(v, _)| PathBuf::from(v))
        .unwrap_or_else(|| PathBuf::from("output"));

    let outlet = match raw.take("outlet") {
        None => None,
        Some((v, line)) => match v.as_str() {
            "none" => None,
            "left" => Some(Side::Left),
            "right" => Some(Side::Right),
            "bottom" => Some(Side::Bottom),
            "top" => Some(Side::Top),
            other => {
                return Err(raw.err(
                    line,
                    format!("outlet must be left | right | bottom | top | none, got '{other}'"),
                ))
            }
        },
    };

    // existence checks for referenced files, relative to the working dir
    for file in [Some(&dem_file), rain_file.as_ref()].into_iter().flatten() {
        if !file.exists() {
            return Err(Error::Config {
                path: path.to_path_buf(),
                line: 0,
                message: format!("referenced file '{}' does not exist", file.display()),
            });
        }
    }
    if let InitialCondition::DepthFile(f) = &initial {
        if !f.exists() {
            return Err(Error::Config {
                path: path.to_path_buf(),
                line: 0,
                message: format!("referenced file '{}' does not exist", f.display()),
            });
        }
    }

    Ok(SimulationConfig {
        dem_file,
        t_end,
        output_interval,
        g,
        order,
        cfl,
        friction,
        infiltration,
        boundaries,
        initial,
        rain_file,
        output_dir,
        outlet,
    })
}

/// Rain file: two columns, time [s] and intensity [mm/h], '#' comments.
/// Intensities are converted to m/s on ingestion.
pub fn read_rain_file(path: impl AsRef<Path>) -> Result<RainfallForcing> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut breakpoints = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_whitespace();
        let err = |msg: String| Error::Config { path: path.to_path_buf(), line: idx + 1, message: msg };
        let t = parts
            .next()
            .unwrap()
            .parse::<f64>()
            .map_err(|_| err(format!("cannot parse time in '{content}'")))?;
        let mm_per_h = parts
            .next()
            .ok_or_else(|| err("rain line needs two columns: time [s], intensity [mm/h]".into()))?
            .parse::<f64>()
            .map_err(|_| err(format!("cannot parse intensity in '{content}'")))?;
        if parts.next().is_some() {
            return Err(err(format!("trailing content in '{content}'")));
        }
        breakpoints.push((t, mm_per_h / 1000.0 / 3600.0));
    }
    RainfallForcing::new(breakpoints)
        .map_err(|m| Error::Config { path: path.to_path_buf(), line: 0, message: m })
}
