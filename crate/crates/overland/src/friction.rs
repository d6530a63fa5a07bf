//! Friction laws and the semi-implicit discharge update.
//!
//! The convective step leaves h untouched here; only the discharge is
//! divided by 1 + dt k(q_n, h), which can never flip its sign. That is the
//! stability argument for the semi-implicit form.

/// Friction law with its coefficient: the Darcy-Weisbach f (dimensionless)
/// or the Manning n [s m^-1/3].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrictionLaw {
    None,
    DarcyWeisbach { coefficient: f64 },
    Manning { coefficient: f64 },
}

impl FrictionLaw {
    pub fn coefficient(&self) -> f64 {
        match *self {
            FrictionLaw::None => 0.0,
            FrictionLaw::DarcyWeisbach { coefficient } | FrictionLaw::Manning { coefficient } => {
                coefficient
            }
        }
    }
}

/// Semi-implicit divisor 1 + dt k. Darcy-Weisbach:
/// k = (f/8) |q_n| / (h_n h_new); Manning: k = g n^2 |q_n| / (h_n h_new^(4/3)).
#[inline]
fn divisor(law: FrictionLaw, h_new: f64, h_old: f64, q_old_mag: f64, dt: f64, g: f64) -> f64 {
    match law {
        FrictionLaw::None => 1.0,
        FrictionLaw::DarcyWeisbach { coefficient } => {
            1.0 + dt * (coefficient / 8.0) * q_old_mag / (h_old * h_new)
        }
        FrictionLaw::Manning { coefficient } => {
            1.0 + dt * g * coefficient * coefficient * q_old_mag / (h_old * h_new * h_new.cbrt())
        }
    }
}

/// 1D semi-implicit friction update of one discharge component.
#[allow(clippy::too_many_arguments)]
pub fn apply_friction_semi_implicit(
    h_new: f64,
    q_star: f64,
    q_old: f64,
    h_old: f64,
    law: FrictionLaw,
    dt: f64,
    g: f64,
    h_dry: f64,
) -> f64 {
    if h_new < h_dry {
        return 0.0;
    }
    if h_old < h_dry || q_old == 0.0 {
        return q_star;
    }
    q_star / divisor(law, h_new, h_old, q_old.abs(), dt, g)
}

/// 2D update: both components are divided by the same factor built from the
/// magnitude |q_n| = sqrt(qx_n^2 + qy_n^2), so the law is isotropic.
#[allow(clippy::too_many_arguments)]
pub fn apply_friction_2d(
    h_new: f64,
    qx_star: f64,
    qy_star: f64,
    qx_old: f64,
    qy_old: f64,
    h_old: f64,
    law: FrictionLaw,
    dt: f64,
    g: f64,
    h_dry: f64,
) -> (f64, f64) {
    if h_new < h_dry {
        return (0.0, 0.0);
    }
    let q_old_mag = qx_old.hypot(qy_old);
    if h_old < h_dry || q_old_mag == 0.0 {
        return (qx_star, qy_star);
    }
    let d = divisor(law, h_new, h_old, q_old_mag, dt, g);
    (qx_star / d, qy_star / d)
}
