//! Second-order MUSCL reconstruction with the minmod limiter, the
//! discharge-conserving velocity correction, the hydrostatic interface
//! reconstruction and the associated source terms.
//!
//! The MUSCL variables are u, h and the free surface h + z; interface bed
//! elevations are deduced as (h + z)_face - h_face, which is what keeps a
//! lake at rest exactly flat through the whole chain.

use crate::grid::primitive_velocity;

/// Limited face values of one cell in one sweep direction. `minus` is the
/// face toward smaller index (i - 1/2), `plus` toward larger (i + 1/2).
/// `u` is the velocity normal to the faces, `v` transverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellReconstruction {
    pub h_minus: f64,
    pub h_plus: f64,
    pub u_minus: f64,
    pub u_plus: f64,
    pub v_minus: f64,
    pub v_plus: f64,
    pub z_minus: f64,
    pub z_plus: f64,
}

/// Hydrostatically reconstructed states and momentum source contributions
/// at one interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceStates {
    pub h_left: f64,
    pub h_right: f64,
    pub u_left: f64,
    pub u_right: f64,
    /// Momentum source for the cell left of the interface, (g/2)(h_face^2 - h_left^2).
    pub s_left: f64,
    /// Momentum source for the cell right of the interface.
    pub s_right: f64,
}

#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    if a >= 0.0 && b >= 0.0 {
        a.min(b)
    } else if a <= 0.0 && b <= 0.0 {
        a.max(b)
    } else {
        0.0
    }
}

/// Limited face values (s_{i-1/2+}, s_{i+1/2-}) and slope of a scalar.
#[inline]
pub fn muscl_scalar(s_left: f64, s_center: f64, s_right: f64, dx: f64) -> (f64, f64, f64) {
    let slope = minmod((s_center - s_left) / dx, (s_right - s_center) / dx);
    let half = 0.5 * dx * slope;
    (s_center - half, s_center + half, slope)
}

/// Velocity face values modified so that the face discharge balances:
/// h_{i-1/2+} u_{i-1/2+} + h_{i+1/2-} u_{i+1/2-} = 2 h_i u_i.
/// Note the crossed depth ratios: the minus face is scaled by h_plus.
#[inline]
pub fn muscl_velocity(
    u_center: f64,
    du: f64,
    h_center: f64,
    h_face_minus: f64,
    h_face_plus: f64,
    dx: f64,
    h_dry: f64,
) -> (f64, f64) {
    if h_center < h_dry {
        return (u_center, u_center);
    }
    let half = 0.5 * dx * du;
    (
        u_center - h_face_plus / h_center * half,
        u_center + h_face_minus / h_center * half,
    )
}

/// Positivity-preserving well-balanced interface depths: both sides are
/// clipped by the higher of the two face bed elevations.
#[inline]
pub fn hydrostatic_reconstruct(h_minus: f64, z_minus: f64, h_plus: f64, z_plus: f64) -> (f64, f64) {
    let z_max = z_minus.max(z_plus);
    (
        (h_minus + z_minus - z_max).max(0.0),
        (h_plus + z_plus - z_max).max(0.0),
    )
}

/// Momentum correction compensating the hydrostatic clipping at a face,
/// (g/2)(h_face^2 - h_reconstructed^2); zero when nothing was clipped.
#[inline]
pub fn interface_source(h_face: f64, h_reconstructed: f64, g: f64) -> f64 {
    0.5 * g * (h_face * h_face - h_reconstructed * h_reconstructed)
}

/// Centered bed-slope source of one cell,
/// -g (h_{i-1/2+} + h_{i+1/2-})/2 (z_{i+1/2-} - z_{i-1/2+}).
#[inline]
pub fn centered_source(
    h_minus_face: f64,
    h_plus_face: f64,
    z_minus_face: f64,
    z_plus_face: f64,
    g: f64,
) -> f64 {
    -g * 0.5 * (h_minus_face + h_plus_face) * (z_plus_face - z_minus_face)
}

/// Combine the face states of the two cells meeting at an interface.
#[inline]
pub fn interface_states(
    h_minus: f64,
    u_minus: f64,
    z_minus: f64,
    h_plus: f64,
    u_plus: f64,
    z_plus: f64,
    g: f64,
) -> InterfaceStates {
    let (h_left, h_right) = hydrostatic_reconstruct(h_minus, z_minus, h_plus, z_plus);
    InterfaceStates {
        h_left,
        h_right,
        u_left: u_minus,
        u_right: u_plus,
        s_left: interface_source(h_minus, h_left, g),
        s_right: interface_source(h_plus, h_right, g),
    }
}

/// Reconstruct every interior cell of one ghosted line (length n + 2).
/// `qn` is the discharge normal to the sweep faces, `qt` transverse.
/// Dry cells (h < h_dry) and first-order sweeps use zero slopes.
pub fn reconstruct_line(
    h: &[f64],
    qn: &[f64],
    qt: &[f64],
    z: &[f64],
    dx: f64,
    h_dry: f64,
    second_order: bool,
) -> Vec<CellReconstruction> {
    let n = h.len() - 2;
    debug_assert!(qn.len() == n + 2 && qt.len() == n + 2 && z.len() == n + 2);
    let u: Vec<f64> = (0..n + 2).map(|k| primitive_velocity(h[k], qn[k], h_dry)).collect();
    let v: Vec<f64> = (0..n + 2).map(|k| primitive_velocity(h[k], qt[k], h_dry)).collect();
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let hc = h[k];
        let eta_c = hc + z[k];
        if !second_order || hc < h_dry {
            out.push(CellReconstruction {
                h_minus: hc,
                h_plus: hc,
                u_minus: u[k],
                u_plus: u[k],
                v_minus: v[k],
                v_plus: v[k],
                z_minus: eta_c - hc,
                z_plus: eta_c - hc,
            });
            continue;
        }
        let (h_m, h_p, _) = muscl_scalar(h[k - 1], hc, h[k + 1], dx);
        let (eta_m, eta_p, _) = muscl_scalar(h[k - 1] + z[k - 1], eta_c, h[k + 1] + z[k + 1], dx);
        let du = minmod((u[k] - u[k - 1]) / dx, (u[k + 1] - u[k]) / dx);
        let dv = minmod((v[k] - v[k - 1]) / dx, (v[k + 1] - v[k]) / dx);
        let (u_m, u_p) = muscl_velocity(u[k], du, hc, h_m, h_p, dx, h_dry);
        let (v_m, v_p) = muscl_velocity(v[k], dv, hc, h_m, h_p, dx, h_dry);
        out.push(CellReconstruction {
            h_minus: h_m,
            h_plus: h_p,
            u_minus: u_m,
            u_plus: u_p,
            v_minus: v_m,
            v_plus: v_p,
            z_minus: eta_m - h_m,
            z_plus: eta_p - h_p,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const H_DRY: f64 = 1e-12;

    #[test]
    fn minmod_cases() {
        assert_eq!(minmod(1.0, 2.0), 1.0);
        assert_eq!(minmod(-3.0, -1.0), -1.0);
        assert_eq!(minmod(-1.0, 2.0), 0.0);
        assert_eq!(minmod(0.0, 5.0), 0.0);
        assert_eq!(minmod(0.0, -5.0), 0.0);
    }

    #[test]
    fn muscl_scalar_examples() {
        let (m, p, ds) = muscl_scalar(0.0, 1.0, 2.0, 1.0);
        assert_eq!((m, p, ds), (0.5, 1.5, 1.0));
        let (m, p, ds) = muscl_scalar(0.0, 1.0, 0.0, 1.0);
        assert_eq!((m, p, ds), (1.0, 1.0, 0.0));
        let (m, p, ds) = muscl_scalar(0.0, 1.0, 3.0, 1.0);
        assert_eq!((m, p, ds), (0.5, 1.5, 1.0));
    }

    #[test]
    fn muscl_scalar_reproduces_affine_data() {
        // Exact binary coefficients keep every step exact.
        let (a, b, dx) = (0.75, 1.5, 0.25);
        let s = |x: f64| a + b * x;
        let (m, p, ds) = muscl_scalar(s(0.0), s(dx), s(2.0 * dx), dx);
        assert_eq!(ds, b);
        assert_eq!(m, s(dx) - 0.5 * dx * b);
        assert_eq!(p, s(dx) + 0.5 * dx * b);
    }

    #[test]
    fn muscl_velocity_reference_values() {
        // computed by tools/reference_values.py
        let (u_m, u_p) = muscl_velocity(3.0, 1.0, 2.0, 1.5, 2.5, 1.0, H_DRY);
        assert_eq!(u_m, 2.375);
        assert_eq!(u_p, 3.375);
        assert_eq!(1.5 * u_m + 2.5 * u_p, 12.0); // = 2 h u
    }

    #[test]
    fn muscl_velocity_uniform_depth_reduces_to_plain_faces() {
        let (u_m, u_p) = muscl_velocity(2.0, 0.5, 1.0, 1.0, 1.0, 0.5, H_DRY);
        assert_eq!(u_m, 2.0 - 0.5 * 0.25);
        assert_eq!(u_p, 2.0 + 0.5 * 0.25);
    }

    #[test]
    fn muscl_velocity_dry_cell() {
        let (u_m, u_p) = muscl_velocity(1.3, 10.0, 0.0, 0.0, 0.0, 1.0, H_DRY);
        assert_eq!((u_m, u_p), (1.3, 1.3));
    }

    #[test]
    fn hydrostatic_examples() {
        assert_eq!(hydrostatic_reconstruct(1.0, 0.0, 1.0, 0.0), (1.0, 1.0));
        assert_eq!(hydrostatic_reconstruct(1.0, 0.0, 0.5, 0.5), (0.5, 0.5));
        assert_eq!(hydrostatic_reconstruct(0.2, 0.0, 0.0, 1.0), (0.0, 0.0));
    }

    #[test]
    fn interface_source_examples() {
        // computed by tools/reference_values.py
        assert_eq!(interface_source(1.0, 1.0, 9.81), 0.0);
        assert_eq!(interface_source(1.0, 0.5, 9.81), 3.67875);
        assert!((interface_source(0.2, 0.0, 9.81) - 0.1962).abs() < 1e-16);
    }

    #[test]
    fn centered_source_examples() {
        assert_eq!(centered_source(1.0, 1.0, 0.3, 0.3, 9.81), 0.0);
        let s = centered_source(1.0, 1.0, 0.0, 0.1, 9.81);
        assert!((s - (-0.981)).abs() < 1e-15);
        assert_eq!(centered_source(0.0, 0.0, 0.0, 2.0, 9.81), 0.0);
    }

    #[test]
    fn reconstruct_line_flat_lake_keeps_faces_equal() {
        // Exact binary data: z multiples of 1/64, surface 1.0.
        let z = [0.0, 0.25, 0.5, 0.25, 0.125, 0.0];
        let h: Vec<f64> = z.iter().map(|zi| 1.0 - zi).collect();
        let q = vec![0.0; 6];
        let rec = reconstruct_line(&h, &q, &q, &z, 0.5, H_DRY, true);
        for r in &rec {
            assert_eq!(r.h_minus + r.z_minus, 1.0);
            assert_eq!(r.h_plus + r.z_plus, 1.0);
            assert_eq!(r.u_minus, 0.0);
            assert_eq!(r.u_plus, 0.0);
        }
        // interfaces see equal depths from both sides
        for w in rec.windows(2) {
            let s = interface_states(
                w[0].h_plus, w[0].u_plus, w[0].z_plus,
                w[1].h_minus, w[1].u_minus, w[1].z_minus,
                9.81,
            );
            assert_eq!(s.h_left, s.h_right);
        }
    }

    proptest! {
        #[test]
        fn minmod_bounded_by_smaller_magnitude(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            let m = minmod(a, b);
            prop_assert!(m.abs() <= a.abs().min(b.abs()));
            prop_assert!(m == 0.0 || (m.signum() == a.signum() && m.signum() == b.signum()));
        }

        #[test]
        fn muscl_depth_faces_stay_nonnegative(
            hl in 0.0f64..10.0,
            hc in 0.0f64..10.0,
            hr in 0.0f64..10.0,
            dx in 1e-3f64..10.0,
        ) {
            let (m, p, _) = muscl_scalar(hl, hc, hr, dx);
            prop_assert!(m >= 0.0, "h_minus = {m}");
            prop_assert!(p >= 0.0, "h_plus = {p}");
        }

        #[test]
        fn hydrostatic_never_negative(
            hm in 0.0f64..10.0, zm in -5.0f64..5.0,
            hp in 0.0f64..10.0, zp in -5.0f64..5.0,
        ) {
            let (hl, hr) = hydrostatic_reconstruct(hm, zm, hp, zp);
            prop_assert!(hl >= 0.0 && hr >= 0.0);
            // clipping only reduces depth relative to the free surface
            prop_assert!(hl <= hm + (zm - zp).max(0.0) + 1e-12);
            prop_assert!(hr <= hp + (zp - zm).max(0.0) + 1e-12);
        }

        #[test]
        fn velocity_correction_conserves_discharge(
            h in 1e-6f64..100.0,
            u in -10.0f64..10.0,
            du in -10.0f64..10.0,
            slope_frac in -0.99f64..0.99,
            dx in 1e-3f64..10.0,
        ) {
            // Face depths generated the way the sweep does: h -/+ half slope.
            let half = 0.5 * h * slope_frac;
            let (h_m, h_p) = (h - half, h + half);
            let (u_m, u_p) = muscl_velocity(u, du, h, h_m, h_p, dx, H_DRY);
            let lhs = h_m * u_m + h_p * u_p;
            let rhs = 2.0 * h * u;
            let scale = h_m.abs() * u_m.abs() + h_p.abs() * u_p.abs();
            prop_assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE));
        }
    }
}
