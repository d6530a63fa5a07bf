//! Wave-speed estimates and the HLL approximate Riemann flux for the
//! homogeneous 1D shallow water system, applied normal to each face.
//! Transverse momentum is advected upwind by the HLL mass flux.

/// Numerical flux through one interface. The same value is used by both
/// adjacent cells, so interior fluxes cancel telescopically in total mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceFlux {
    /// Mass flux [m^2/s].
    pub f_h: f64,
    /// Normal momentum flux [m^3/s^2].
    pub f_q: f64,
    /// max(|c1|, |c2|), for CFL feedback.
    pub max_speed: f64,
}

/// HLL flux extended with upwinded transverse momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseFlux {
    pub f_h: f64,
    pub f_qn: f64,
    pub f_qt: f64,
    pub max_speed: f64,
}

/// Physical flux F(U) = (hu, hu^2 + g h^2 / 2).
#[inline]
fn physical_flux(h: f64, u: f64, g: f64) -> (f64, f64) {
    let q = h * u;
    (q, q * u + 0.5 * g * h * h)
}

/// Slowest and fastest wave speeds over both states:
/// c1 = min(u - sqrt(gh)), c2 = max(u + sqrt(gh)).
#[inline]
pub fn wave_speeds(h_left: f64, u_left: f64, h_right: f64, u_right: f64, g: f64) -> (f64, f64) {
    let c_left = (g * h_left).sqrt();
    let c_right = (g * h_right).sqrt();
    (
        (u_left - c_left).min(u_right - c_right),
        (u_left + c_left).max(u_right + c_right),
    )
}

/// HLL flux. Dry-dry interfaces short-circuit to zero; identical states
/// return the physical flux exactly. When a wave speed is exactly zero the
/// middle branch is used (its limit agrees with the one-sided branches).
pub fn hll_flux(h_left: f64, u_left: f64, h_right: f64, u_right: f64, g: f64, h_dry: f64) -> InterfaceFlux {
    if h_left < h_dry && h_right < h_dry {
        return InterfaceFlux { f_h: 0.0, f_q: 0.0, max_speed: 0.0 };
    }
    if h_left == h_right && u_left == u_right {
        let (f_h, f_q) = physical_flux(h_left, u_left, g);
        let c = (g * h_left).sqrt();
        return InterfaceFlux {
            f_h,
            f_q,
            max_speed: (u_left - c).abs().max((u_left + c).abs()),
        };
    }
    let (c1, c2) = wave_speeds(h_left, u_left, h_right, u_right, g);
    let max_speed = c1.abs().max(c2.abs());
    let (f_h, f_q) = if c1 > 0.0 {
        physical_flux(h_left, u_left, g)
    } else if c2 < 0.0 {
        physical_flux(h_right, u_right, g)
    } else {
        let (fl_h, fl_q) = physical_flux(h_left, u_left, g);
        let (fr_h, fr_q) = physical_flux(h_right, u_right, g);
        let q_left = h_left * u_left;
        let q_right = h_right * u_right;
        let span = c2 - c1;
        (
            (c2 * fl_h - c1 * fr_h) / span + c1 * c2 * (h_right - h_left) / span,
            (c2 * fl_q - c1 * fr_q) / span + c1 * c2 * (q_right - q_left) / span,
        )
    };
    InterfaceFlux { f_h, f_q, max_speed }
}

/// Normal HLL flux plus transverse momentum advected by the sign of the
/// mass flux. At f_h = 0 the transverse contribution vanishes either way.
#[allow(clippy::too_many_arguments)]
pub fn transverse_flux(
    h_left: f64,
    u_left: f64,
    v_left: f64,
    h_right: f64,
    u_right: f64,
    v_right: f64,
    g: f64,
    h_dry: f64,
) -> TransverseFlux {
    let base = hll_flux(h_left, u_left, h_right, u_right, g, h_dry);
    let v_upwind = if base.f_h >= 0.0 { v_left } else { v_right };
    TransverseFlux {
        f_h: base.f_h,
        f_qn: base.f_q,
        f_qt: base.f_h * v_upwind,
        max_speed: base.max_speed,
    }
}
