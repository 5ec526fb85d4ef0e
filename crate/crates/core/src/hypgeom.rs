//! Closed-form hyperbolic trigonometry of decorated ideal triangles and
//! semi-ideal prisms.
//!
//! A semi-ideal prism sits over a decorated ideal triangle `A0 A1 A2`. Each
//! ideal vertex `Ai` is joined to its orthogonal projection `Bi` on a lower
//! plane by a lateral edge of signed length `r[i]`, measured from the
//! canonical horosphere at `Ai`. Side `k` of a triangle is the upper edge
//! opposite corner `k`, with Penner length `l[k]`.
//!
//! The solid angle at `Ai` cuts a Euclidean triangle out of the canonical
//! horosphere. Its sides are the two lateral arcs `alpha` (on the lateral
//! faces through `Ai`) and the h-length `lambda` (on the upper face). Its
//! angles are the lateral dihedral angle `omega[i]` and the dihedral angles of
//! the two upper edges through `Ai`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest magnitude accepted for any exponent fed to `exp`.
pub const EXP_LIMIT: f64 = 700.0;

pub(crate) fn finite(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain { what, value })
    }
}

pub(crate) fn checked_exp(exponent: f64) -> Result<f64> {
    if exponent.abs() > EXP_LIMIT {
        return Err(Error::Range { exponent, limit: EXP_LIMIT });
    }
    Ok(exponent.exp())
}

/// Horocyclic arc at the corner opposite the side of length `l_opp` in a
/// decorated ideal triangle: `exp((l_opp - l_adj1 - l_adj2) / 2)`.
pub fn corner_h_length(l_opp: f64, l_adj1: f64, l_adj2: f64) -> Result<f64> {
    finite("l_opp", l_opp)?;
    finite("l_adj1", l_adj1)?;
    finite("l_adj2", l_adj2)?;
    checked_exp(0.5 * (l_opp - l_adj1 - l_adj2))
}

/// Arc of the canonical horosphere at the near vertex of a semi-ideal
/// trapezoid, between the lateral edge and the upper edge:
/// `sqrt(exp(r_other - r_here - l) + exp(-2 r_here))`.
pub fn lateral_arc(r_here: f64, r_other: f64, l: f64) -> Result<f64> {
    finite("r_here", r_here)?;
    finite("r_other", r_other)?;
    finite("l", l)?;
    Ok(lateral_arc_sq(r_here, r_other, l)?.sqrt())
}

fn lateral_arc_sq(r_here: f64, r_other: f64, l: f64) -> Result<f64> {
    Ok(checked_exp(r_other - r_here - l)? + checked_exp(-2.0 * r_here)?)
}

/// Lower edge of a semi-ideal trapezoid, `arccosh(1 + 2 exp(l - r1 - r2))`.
///
/// Evaluated as `2 asinh(exp((l - r1 - r2) / 2))`, which is the same quantity
/// (`cosh a = 1 + 2 sinh^2(a/2)`) without cancellation for small arguments or
/// overflow for large ones.
pub fn lower_edge_length(l: f64, r1: f64, r2: f64) -> Result<f64> {
    finite("l", l)?;
    finite("r1", r1)?;
    finite("r2", r2)?;
    Ok(2.0 * checked_exp(0.5 * (l - r1 - r2))?.asinh())
}

/// Inverse of [`lower_edge_length`] in the exponent: given a lower edge `a`,
/// returns `l - r1 - r2 = 2 ln sinh(a / 2)`.
pub fn upper_exponent_from_lower(a: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Domain { what: "lower edge length", value: a });
    }
    Ok(2.0 * (0.5 * a).sinh().ln())
}

/// Lower edge of a semi-ideal ultraparallel trapezoid whose upper line is at
/// distance `rho` from the lower line: `arccosh(1 + 2 / sinh^2(rho))`.
pub fn lower_edge_from_plane_distance(rho: f64) -> Result<f64> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Domain { what: "rho", value: rho });
    }
    Ok(2.0 * rho.sinh().recip().asinh())
}

// Angle between the sides `x` and `y` of a Euclidean triangle, opposite `z`.
// Half-angle form; accurate near 0 and near pi.
fn euclid_opposite(x: f64, y: f64, z: f64) -> f64 {
    2.0 * ((z - x + y) * (z + x - y)).sqrt().atan2(((x + y - z) * (x + y + z)).sqrt())
}

fn strict_triangle(s1: f64, s2: f64, s3: f64) -> bool {
    s1 > 0.0 && s2 > 0.0 && s3 > 0.0 && s1 < s2 + s3 && s2 < s1 + s3 && s3 < s1 + s2
}

/// Cosine-law angles of a Euclidean triangle with sides `s1, s2, s3`.
///
/// Returns `(angle opposite s3, angle opposite s2, angle opposite s1)`.
pub fn euclid_angles(s1: f64, s2: f64, s3: f64) -> Result<(f64, f64, f64)> {
    for (what, s) in [("s1", s1), ("s2", s2), ("s3", s3)] {
        finite(what, s)?;
    }
    if !strict_triangle(s1, s2, s3) {
        return Err(Error::InadmissiblePrism { corner: 0 });
    }
    Ok((
        euclid_opposite(s1, s2, s3),
        euclid_opposite(s1, s3, s2),
        euclid_opposite(s2, s3, s1),
    ))
}

/// Interior angles of a hyperbolic triangle with side lengths `a[k]`; entry `k`
/// is the angle opposite `a[k]`.
pub fn hyperbolic_angles(a: [f64; 3]) -> Result<[f64; 3]> {
    for &x in &a {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::Domain { what: "hyperbolic side length", value: x });
        }
    }
    if !strict_triangle(a[0], a[1], a[2]) {
        return Err(Error::Degenerate(format!(
            "hyperbolic side lengths {a:?} violate the triangle inequality"
        )));
    }
    let s = 0.5 * (a[0] + a[1] + a[2]);
    let mut out = [0.0; 3];
    for k in 0..3 {
        let (b, c) = (a[(k + 1) % 3], a[(k + 2) % 3]);
        // tan^2(A/2) = sinh(s-b) sinh(s-c) / (sinh s sinh(s-a))
        let num = (s - b).sinh() * (s - c).sinh();
        let den = s.sinh() * (s - a[k]).sinh();
        out[k] = 2.0 * num.sqrt().atan2(den.sqrt());
    }
    Ok(out)
}

/// Angles and horospherical lengths of one semi-ideal prism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrismAngles {
    /// Dihedral angle of the lateral edge at corner `i`.
    pub omega: [f64; 3],
    /// Dihedral angle of the upper edge opposite corner `k`.
    pub phi: [f64; 3],
    /// `alpha[i][0]` is the lateral arc at corner `i` toward corner `i+1`,
    /// `alpha[i][1]` toward corner `i+2`.
    pub alpha: [[f64; 2]; 3],
    /// h-length of the upper ideal face at corner `i`.
    pub lambda: [f64; 3],
}

impl PrismAngles {
    /// `omega[i] + phi[j] + phi[h] - pi` at corner `i`.
    pub fn corner_defect(&self, i: usize) -> f64 {
        self.omega[i] + self.phi[(i + 1) % 3] + self.phi[(i + 2) % 3] - PI
    }
}

// The horospherical triangle at one corner: (alpha toward i+1, alpha toward
// i+2, lambda), and its angles (omega, phi at edge (i,i+1), phi at edge (i,i+2)).
struct CornerTriangle {
    alpha_next: f64,
    alpha_prev: f64,
    lambda: f64,
    omega: f64,
    phi_edge_next: f64,
    phi_edge_prev: f64,
}

fn corner_triangle(l: &[f64; 3], r: &[f64; 3], i: usize) -> Result<CornerTriangle> {
    let j = (i + 1) % 3;
    let h = (i + 2) % 3;
    let alpha_next = lateral_arc(r[i], r[j], l[h])?;
    let alpha_prev = lateral_arc(r[i], r[h], l[j])?;
    let lambda = corner_h_length(l[i], l[j], l[h])?;
    let (omega, phi_edge_next, phi_edge_prev) = euclid_angles(alpha_next, alpha_prev, lambda)
        .map_err(|e| match e {
            Error::InadmissiblePrism { .. } => Error::InadmissiblePrism { corner: i },
            other => other,
        })?;
    Ok(CornerTriangle { alpha_next, alpha_prev, lambda, omega, phi_edge_next, phi_edge_prev })
}

/// All angles of the semi-ideal prism with upper lengths `l` and lateral
/// lengths `r`.
///
/// `phi[k]` is read off the horospherical triangle at corner `k + 1`, the
/// first endpoint of side `k`.
pub fn prism_angles(l: [f64; 3], r: [f64; 3]) -> Result<PrismAngles> {
    let corners = [
        corner_triangle(&l, &r, 0)?,
        corner_triangle(&l, &r, 1)?,
        corner_triangle(&l, &r, 2)?,
    ];
    let mut out = PrismAngles {
        omega: [0.0; 3],
        phi: [0.0; 3],
        alpha: [[0.0; 2]; 3],
        lambda: [0.0; 3],
    };
    for (i, c) in corners.iter().enumerate() {
        out.omega[i] = c.omega;
        out.alpha[i] = [c.alpha_next, c.alpha_prev];
        out.lambda[i] = c.lambda;
        // At corner i, the edge (i, i+1) is side i+2.
        out.phi[(i + 2) % 3] = c.phi_edge_next;
    }
    Ok(out)
}

/// Same as [`prism_angles`] but also returns the dihedral angle of each upper
/// edge as seen from its *second* endpoint. The two readings agree on any
/// admissible prism; this is exposed for consistency checks.
pub fn phi_from_second_endpoint(l: [f64; 3], r: [f64; 3]) -> Result<[f64; 3]> {
    let mut phi = [0.0; 3];
    for i in 0..3 {
        let c = corner_triangle(&l, &r, i)?;
        // At corner i, the edge (i, i+2) is side i+1, whose first endpoint is i+2.
        phi[(i + 1) % 3] = c.phi_edge_prev;
    }
    Ok(phi)
}

/// Partial derivatives of `omega[corner]` with respect to `r[0], r[1], r[2]`,
/// with the upper face held fixed.
pub fn corner_derivatives(l: [f64; 3], r: [f64; 3], corner: usize) -> Result<[f64; 3]> {
    if corner > 2 {
        return Err(Error::Domain { what: "corner", value: corner as f64 });
    }
    let i = corner;
    let j = (i + 1) % 3;
    let h = (i + 2) % 3;
    let c = corner_triangle(&l, &r, i)?;
    let decay = checked_exp(-2.0 * r[i])?;
    let a_next = c.alpha_next * c.alpha_next;
    let a_prev = c.alpha_prev * c.alpha_prev;
    let cot_next = c.phi_edge_next.tan().recip();
    let cot_prev = c.phi_edge_prev.tan().recip();

    let mut d = [0.0; 3];
    d[i] = cot_next / (2.0 * a_next) * (a_next + decay) + cot_prev / (2.0 * a_prev) * (a_prev + decay);
    d[j] = cot_next / (2.0 * a_next) * (decay - a_next);
    d[h] = cot_prev / (2.0 * a_prev) * (decay - a_prev);
    Ok(d)
}
