//! Analytic solutions and error metrics for verification: lake at rest,
//! the Ritter dry-bed dam break, and a manufactured smooth subcritical
//! steady flow with friction whose topography is built from the steady
//! momentum balance.

use crate::friction::FrictionLaw;
use crate::grid::{Field, StructuredGrid};

/// Analytic reference solution with evaluators h(x, t) and u(x, t).
pub enum AnalyticSolution {
    LakeAtRest {
        surface: f64,
        bed: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    },
    RitterDryDamBreak {
        upstream_depth: f64,
        dam_position: f64,
        g: f64,
    },
    ManufacturedSteady(ManufacturedSteady),
}

impl AnalyticSolution {
    pub fn depth(&self, x: f64, t: f64) -> f64 {
        match self {
            AnalyticSolution::LakeAtRest { surface, bed } => (surface - bed(x)).max(0.0),
            AnalyticSolution::RitterDryDamBreak { upstream_depth, dam_position, g } => {
                ritter_solution(*upstream_depth, *dam_position, *g, x, t).0
            }
            AnalyticSolution::ManufacturedSteady(m) => m.depth(x),
        }
    }

    pub fn velocity(&self, x: f64, t: f64) -> f64 {
        match self {
            AnalyticSolution::LakeAtRest { .. } => 0.0,
            AnalyticSolution::RitterDryDamBreak { upstream_depth, dam_position, g } => {
                ritter_solution(*upstream_depth, *dam_position, *g, x, t).1
            }
            AnalyticSolution::ManufacturedSteady(m) => m.velocity(x),
        }
    }
}

/// Still water at surface level eta: h = max(eta - z, 0), u = 0.
pub fn lake_at_rest(
    bed: impl Fn(f64) -> f64 + Send + Sync + 'static,
    surface: f64,
) -> AnalyticSolution {
    AnalyticSolution::LakeAtRest { surface, bed: Box::new(bed) }
}

/// Classical dam break onto a dry frictionless bed. With c0 = sqrt(g h_l):
/// undisturbed state left of x0 - c0 t, the parabolic fan up to x0 + 2 c0 t,
/// dry bed beyond.
pub fn ritter_solution(h_left: f64, x0: f64, g: f64, x: f64, t: f64) -> (f64, f64) {
    let c0 = (g * h_left).sqrt();
    let xi = (x - x0) / t;
    if xi <= -c0 {
        (h_left, 0.0)
    } else if xi >= 2.0 * c0 {
        (0.0, 0.0)
    } else {
        let h = (2.0 * c0 - xi) * (2.0 * c0 - xi) / (9.0 * g);
        let u = 2.0 / 3.0 * (xi + c0);
        (h, u)
    }
}

/// Smooth depth profile for the manufactured steady flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DepthProfile {
    Constant { h0: f64 },
    /// h(x) = base + amplitude exp(-((x - center)/width)^2)
    GaussianBump { base: f64, amplitude: f64, center: f64, width: f64 },
}

impl DepthProfile {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            DepthProfile::Constant { h0 } => h0,
            DepthProfile::GaussianBump { base, amplitude, center, width } => {
                let s = (x - center) / width;
                base + amplitude * (-s * s).exp()
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            DepthProfile::Constant { .. } => 0.0,
            DepthProfile::GaussianBump { amplitude, center, width, .. } => {
                let s = (x - center) / width;
                amplitude * (-s * s).exp() * (-2.0 * s / width)
            }
        }
    }
}

/// Steady 1D flow with constant discharge q0 over topography built from the
/// momentum balance: z'(x) = (q0^2/(g h^3) - 1) h'(x) - S_f(h, q0).
/// By construction (h, u = q0/h) is an exact steady solution.
#[derive(Debug, Clone, Copy)]
pub struct ManufacturedSteady {
    pub q0: f64,
    pub g: f64,
    pub friction: FrictionLaw,
    pub profile: DepthProfile,
}

impl ManufacturedSteady {
    /// Rejects profiles that leave the smooth subcritical regime the oracle
    /// is valid for.
    pub fn new(
        q0: f64,
        profile: DepthProfile,
        friction: FrictionLaw,
        g: f64,
        domain: (f64, f64),
    ) -> Result<Self, String> {
        let m = ManufacturedSteady { q0, g, friction, profile };
        let samples = 1000;
        for k in 0..=samples {
            let x = domain.0 + (domain.1 - domain.0) * k as f64 / samples as f64;
            let h = profile.eval(x);
            if h <= 0.0 {
                return Err(format!("depth profile not positive at x = {x}"));
            }
            let froude = q0.abs() / (h * (g * h).sqrt());
            if froude >= 1.0 {
                return Err(format!("flow transcritical at x = {x} (Fr = {froude:.3})"));
            }
        }
        Ok(m)
    }

    pub fn depth(&self, x: f64) -> f64 {
        self.profile.eval(x)
    }

    pub fn velocity(&self, x: f64) -> f64 {
        self.q0 / self.profile.eval(x)
    }

    /// Friction slope S_f of the steady flow at depth h.
    fn friction_slope(&self, h: f64) -> f64 {
        let q2 = self.q0 * self.q0;
        match self.friction {
            FrictionLaw::None => 0.0,
            FrictionLaw::DarcyWeisbach { coefficient } => {
                coefficient * q2 / (8.0 * self.g * h * h * h)
            }
            FrictionLaw::Manning { coefficient } => {
                coefficient * coefficient * q2 / h.powf(10.0 / 3.0)
            }
        }
    }

    /// Bed slope that balances the steady momentum equation at x.
    pub fn bed_slope(&self, x: f64) -> f64 {
        let h = self.profile.eval(x);
        let fr2 = self.q0 * self.q0 / (self.g * h * h * h);
        (fr2 - 1.0) * self.profile.derivative(x) - self.friction_slope(h)
    }

    /// Bed elevation at the n + 1 cell faces of a 1D grid, integrated from
    /// z = 0 at the left edge with the trapezoid rule.
    pub fn face_topography(&self, origin_x: f64, dx: f64, n: usize) -> Vec<f64> {
        let mut z = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        z.push(acc);
        let mut slope_prev = self.bed_slope(origin_x);
        for k in 1..=n {
            let x = origin_x + k as f64 * dx;
            let slope = self.bed_slope(x);
            acc += 0.5 * dx * (slope_prev + slope);
            z.push(acc);
            slope_prev = slope;
        }
        z
    }

    /// Per-cell bed elevations: midpoints of the face values.
    pub fn cell_topography(&self, origin_x: f64, dx: f64, n: usize) -> Vec<f64> {
        let faces = self.face_topography(origin_x, dx, n);
        (0..n).map(|k| 0.5 * (faces[k] + faces[k + 1])).collect()
    }
}

/// Discrete norms of the cellwise error: L1 = sum |e| dx dy,
/// L2 = sqrt(sum e^2 dx dy), Linf = max |e|.
pub fn error_norms(numerical: &Field, exact: &Field, grid: &StructuredGrid) -> (f64, f64, f64) {
    let area = grid.cell_area();
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    let mut linf = 0.0f64;
    for j in 0..grid.ny as isize {
        for i in 0..grid.nx as isize {
            let e = numerical.get(i, j) - exact.get(i, j);
            l1 += e.abs() * area;
            l2 += e * e * area;
            linf = linf.max(e.abs());
        }
    }
    (l1, l2.sqrt(), linf)
}
