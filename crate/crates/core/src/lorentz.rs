//! Independent reconstruction of prisms in the hyperboloid model of `ℝ^{1,3}`.
//!
//! Everything here is recomputed from Lorentzian scalar products of explicit
//! vectors, so it can be used to audit the closed forms in
//! [`hypgeom`](crate::hypgeom). The lower plane of every prism is `x₄ = 0`;
//! the canonical horosphere at an ideal vertex is `{x : ⟨x, l̄⟩ = -1}` for its
//! light-like pole `l̄`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Tolerance used to classify vectors by causal type.
pub const CAUSAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzVector(pub [f64; 4]);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Causal {
    TimeLike,
    SpaceLike,
    LightLike,
}

impl LorentzVector {
    pub const E4: Self = Self([0.0, 0.0, 0.0, 1.0]);

    /// `⟨x, y⟩ = -x₁y₁ + x₂y₂ + x₃y₃ + x₄y₄`.
    pub fn dot(&self, other: &Self) -> f64 {
        let (a, b) = (self.0, other.0);
        -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn causal(&self) -> Causal {
        let q = self.norm_sq();
        let scale = self.0.iter().fold(0.0f64, |m, x| m.max(x.abs())).powi(2).max(1.0);
        if q < -CAUSAL_TOL * scale {
            Causal::TimeLike
        } else if q > CAUSAL_TOL * scale {
            Causal::SpaceLike
        } else {
            Causal::LightLike
        }
    }

    /// Space-like vector orthogonal to `a`, `b` and `c`, scaled to unit norm.
    pub fn orthogonal_to(a: &Self, b: &Self, c: &Self) -> Result<Self> {
        let m = |i: usize, j: usize, k: usize| {
            let (a, b, c) = (a.0, b.0, c.0);
            a[i] * (b[j] * c[k] - b[k] * c[j]) - a[j] * (b[i] * c[k] - b[k] * c[i]) + a[k] * (b[i] * c[j] - b[j] * c[i])
        };
        // Euclidean cofactor vector w with w·v = 0; flipping the first
        // coordinate turns it into a Lorentz-orthogonal vector.
        let w = [m(1, 2, 3), -m(0, 2, 3), m(0, 1, 3), -m(0, 1, 2)];
        let n = Self([-w[0], w[1], w[2], w[3]]);
        let q = n.norm_sq();
        if q.is_nan() || q <= 0.0 {
            return Err(Error::Degenerate("orthogonal complement is not space-like".into()));
        }
        Ok(n * q.sqrt().recip())
    }
}

impl Add for LorentzVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for LorentzVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Mul<f64> for LorentzVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self(self.0.map(|x| x * s))
    }
}

impl Neg for LorentzVector {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

fn cosh_lower(l: f64, r1: f64, r2: f64) -> f64 {
    1.0 + 2.0 * (l - r1 - r2).exp()
}

/// Point on the lower plane at distance `a` from the origin in direction `angle`.
fn plane_point(a: f64, angle: f64) -> LorentzVector {
    LorentzVector([a.cosh(), a.sinh() * angle.cos(), a.sinh() * angle.sin(), 0.0])
}

/// Angle at `B1` of the hyperbolic triangle with `cosh` side lengths given.
fn angle_from_cosh(c12: f64, c13: f64, c23: f64) -> f64 {
    let s12 = (c12 * c12 - 1.0).sqrt();
    let s13 = (c13 * c13 - 1.0).sqrt();
    ((c12 * c13 - c23) / (s12 * s13)).clamp(-1.0, 1.0).acos()
}

/// An explicit semi-ideal prism.
#[derive(Debug, Clone, PartialEq)]
pub struct PrismEmbedding {
    /// Lower vertices, on the plane `x₄ = 0`.
    pub lower: [LorentzVector; 3],
    /// Light-like poles of the canonical horospheres at the ideal vertices.
    pub poles: [LorentzVector; 3],
    /// Unit normal of the upper face, pointing into the prism.
    pub upper_normal: LorentzVector,
}

fn place_poles(lower: &[LorentzVector; 3], r: [f64; 3]) -> [LorentzVector; 3] {
    std::array::from_fn(|i| (lower[i] + LorentzVector::E4) * r[i].exp())
}

fn inward(n: LorentzVector, inside: &LorentzVector) -> LorentzVector {
    if n.dot(inside) < 0.0 { -n } else { n }
}

fn upper_normal(poles: &[LorentzVector; 3], inside: &LorentzVector) -> Result<LorentzVector> {
    Ok(inward(LorentzVector::orthogonal_to(&poles[0], &poles[1], &poles[2])?, inside))
}

/// Builds the prism with upper lengths `l` (side `k` opposite corner `k`) and
/// lateral lengths `r`. `B0` sits at the origin, `B1` on the positive
/// `x₂`-axis and `B2` on the side `x₃ > 0`.
pub fn embed_prism(l: [f64; 3], r: [f64; 3]) -> Result<PrismEmbedding> {
    if !admissible_prism(l, r)? {
        return Err(Error::InadmissiblePrism { corner: 0 });
    }
    let c01 = cosh_lower(l[2], r[0], r[1]);
    let c02 = cosh_lower(l[1], r[0], r[2]);
    let c12 = cosh_lower(l[0], r[1], r[2]);
    let lower = [
        plane_point(0.0, 0.0),
        plane_point(c01.acosh(), 0.0),
        plane_point(c02.acosh(), angle_from_cosh(c01, c02, c12)),
    ];
    let poles = place_poles(&lower, r);
    let upper_normal = upper_normal(&poles, &lower[0])?;
    Ok(PrismEmbedding { lower, poles, upper_normal })
}

impl PrismEmbedding {
    /// `arccosh(-⟨B_i, B_j⟩)`.
    pub fn lower_length(&self, i: usize, j: usize) -> f64 {
        (-self.lower[i].dot(&self.lower[j])).max(1.0).acosh()
    }

    /// Penner length between the ideal vertices, `ln(-⟨l̄_i, l̄_j⟩ / 2)`.
    pub fn upper_length(&self, i: usize, j: usize) -> f64 {
        (-0.5 * self.poles[i].dot(&self.poles[j])).ln()
    }

    /// Signed distance from `B_i` to the canonical horosphere at `A_i`.
    pub fn lateral_length(&self, i: usize) -> f64 {
        (-self.lower[i].dot(&self.poles[i])).ln()
    }

    /// Where the lateral edge at `i` meets the horosphere.
    fn horo_lateral(&self, i: usize) -> LorentzVector {
        let g = self.lower[i].dot(&self.poles[i]);
        let a = -1.0 / g;
        let b = (a * a - 1.0) / (2.0 * a * g);
        self.lower[i] * a + self.poles[i] * b
    }

    /// Where the upper edge from `i` to `j` meets the horosphere at `i`.
    fn horo_upper(&self, i: usize, j: usize) -> LorentzVector {
        let g = self.poles[i].dot(&self.poles[j]);
        self.poles[j] * (-1.0 / g) + self.poles[i] * 0.5
    }

    /// Horospherical arc at `i` on the lateral face toward `j`.
    pub fn lateral_arc(&self, i: usize, j: usize) -> f64 {
        (self.horo_lateral(i) - self.horo_upper(i, j)).norm_sq().sqrt()
    }

    /// Horospherical arc at `i` on the upper face.
    pub fn h_length(&self, i: usize) -> f64 {
        let (j, h) = ((i + 1) % 3, (i + 2) % 3);
        (self.horo_upper(i, j) - self.horo_upper(i, h)).norm_sq().sqrt()
    }

    /// Inward unit normal of the lateral face over `B_i B_j`.
    pub fn lateral_normal(&self, i: usize, j: usize) -> Result<LorentzVector> {
        let h = 3 - i - j;
        let n = LorentzVector::orthogonal_to(&self.lower[i], &self.lower[j], &LorentzVector::E4)?;
        Ok(inward(n, &self.lower[h]))
    }

    /// Dihedral angle along the lateral edge at `i`.
    pub fn omega(&self, i: usize) -> Result<f64> {
        let (j, h) = ((i + 1) % 3, (i + 2) % 3);
        Ok(dihedral(&self.lateral_normal(i, j)?, &self.lateral_normal(i, h)?))
    }

    /// Dihedral angle along the upper edge opposite corner `k`.
    pub fn phi(&self, k: usize) -> Result<f64> {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        Ok(dihedral(&self.upper_normal, &self.lateral_normal(i, j)?))
    }

    /// Whether the upper and lower planes are ultraparallel.
    pub fn is_ultraparallel(&self, tol: f64) -> bool {
        self.upper_normal.dot(&LorentzVector::E4).abs() > 1.0 + tol
    }
}

/// Quantities at one corner of a prism, read in the frame that puts that
/// corner's lower vertex at the origin. Horosphere points then have
/// coordinates of order one, which keeps the chord lengths accurate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerReadout {
    /// Lateral arcs toward corners `i + 1` and `i + 2`.
    pub alpha: [f64; 2],
    pub lambda: f64,
    pub omega: f64,
    /// Dihedral angles of the upper edges `(i, i + 1)` and `(i, i + 2)`.
    pub phi: [f64; 2],
    /// Lower edges `B_i B_{i+1}` and `B_i B_{i+2}`.
    pub lower: [f64; 2],
}

pub fn corner_readout(l: [f64; 3], r: [f64; 3], i: usize) -> Result<CornerReadout> {
    let rot = |v: [f64; 3]| std::array::from_fn(|k| v[(i + k) % 3]);
    let e = embed_prism(rot(l), rot(r))?;
    Ok(CornerReadout {
        alpha: [e.lateral_arc(0, 1), e.lateral_arc(0, 2)],
        lambda: e.h_length(0),
        omega: e.omega(0)?,
        phi: [e.phi(2)?, e.phi(1)?],
        lower: [e.lower_length(0, 1), e.lower_length(0, 2)],
    })
}

/// Interior dihedral angle between faces with inward unit normals `u`, `w`.
pub fn dihedral(u: &LorentzVector, w: &LorentzVector) -> f64 {
    (-u.dot(w)).clamp(-1.0, 1.0).acos()
}

/// Whether the semi-ideal prism with data `(l, r)` exists.
///
/// With `q_i = e^{-r_i} l̄_i` the poles of the horospheres through the `B_i`,
/// the lower plane is the plane tangent to all three on their common side:
/// its unit normal `p` satisfies `⟨p, q_i⟩ = 1`. Writing `G c = -1` for the
/// Gram matrix `G_ij = ⟨q_i, q_j⟩ = -2 e^{l_ij - r_i - r_j}`, the part of `p`
/// orthogonal to the `q_i` has norm `1 + Σ c_i`, so such a plane exists iff
/// that number is positive.
pub fn admissible_prism(l: [f64; 3], r: [f64; 3]) -> Result<bool> {
    Ok(admissibility_margin(l, r)? > 0.0)
}

/// `1 + Σ c_i` from [`admissible_prism`]; positive exactly on admissible data.
pub fn admissibility_margin(l: [f64; 3], r: [f64; 3]) -> Result<f64> {
    if let Some(&x) = l.iter().chain(&r).find(|x| !x.is_finite()) {
        return Err(Error::Domain { what: "prism data", value: x });
    }
    // Entry (i, j) is the side opposite the third corner.
    let g = |k: usize| -2.0 * (l[k] - r[(k + 1) % 3] - r[(k + 2) % 3]).exp();
    let gram = Matrix3::new(0.0, g(2), g(1), g(2), 0.0, g(0), g(1), g(0), 0.0);
    let c = gram
        .lu()
        .solve(&-Vector3::repeat(1.0))
        .ok_or_else(|| Error::Degenerate("singular Gram matrix".into()))?;
    Ok(1.0 + c.sum())
}

/// Develops the light-cone poles of a decorated ideal quadrilateral
/// `I J G H` (diagonal `JH`) in `ℝ^{1,2}` from the decorated lengths of its
/// sides and diagonal, and returns `-⟨m, v_G⟩ - 1`, where `⟨m, x⟩ = -1` is
/// the plane through `v_I, v_J, v_H`. Positive iff `v_G` lies beyond that
/// plane, i.e. iff the diagonal is locally convex.
pub fn quad_pole_convexity(d_ij: f64, d_jh: f64, d_hi: f64, d_jg: f64, d_gh: f64) -> f64 {
    let g = |d: f64| -2.0 * d.exp();
    // v_G = x v_I + y v_J + z v_H; x < 0 puts G across JH from I, and
    // ⟨v_G, v_G⟩ = 0 forces x² = e^{d_gh + d_jg - d_ij - d_hi}.
    let x = -(0.5 * (d_gh + d_jg - d_ij - d_hi)).exp();
    let y = (g(d_gh) - x * g(d_hi)) / g(d_jh);
    let z = (g(d_jg) - x * g(d_ij)) / g(d_jh);
    // ⟨m, v_G⟩ = -(x + y + z).
    x + y + z - 1.0
}

/// Two prisms sharing the upper edge `JH`, embedded in one frame.
///
/// The first prism is over `(I, J, H)` and the second over `(G, H, J)`,
/// both listed counterclockwise; the corresponding upper lengths are given
/// with side `k` opposite the `k`-th listed vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct PrismPair {
    pub first: PrismEmbedding,
    pub second: PrismEmbedding,
}

/// Embeds two adjacent prisms. `l1`/`r1` describe `(I, J, H)` and `l2`/`r2`
/// describe `(G, H, J)`; the shared side is `l1[0] == l2[0]`.
pub fn embed_pair(l1: [f64; 3], r1: [f64; 3], l2: [f64; 3], r2: [f64; 3]) -> Result<PrismPair> {
    if !admissible_prism(l1, r1)? || !admissible_prism(l2, r2)? {
        return Err(Error::InadmissiblePrism { corner: 0 });
    }
    // J at the origin, H on the positive axis, I above and G below.
    let c_jh = cosh_lower(l1[0], r1[1], r1[2]);
    let c_ij = cosh_lower(l1[2], r1[0], r1[1]);
    let c_ih = cosh_lower(l1[1], r1[0], r1[2]);
    let c_gj = cosh_lower(l2[1], r2[0], r2[2]);
    let c_gh = cosh_lower(l2[2], r2[0], r2[1]);
    let b_j = plane_point(0.0, 0.0);
    let b_h = plane_point(c_jh.acosh(), 0.0);
    let b_i = plane_point(c_ij.acosh(), angle_from_cosh(c_jh, c_ij, c_ih));
    let b_g = plane_point(c_gj.acosh(), -angle_from_cosh(c_jh, c_gj, c_gh));

    let first_lower = [b_i, b_j, b_h];
    let second_lower = [b_g, b_h, b_j];
    let first_poles = place_poles(&first_lower, r1);
    let second_poles = place_poles(&second_lower, r2);
    let first = PrismEmbedding {
        upper_normal: upper_normal(&first_poles, &b_i)?,
        lower: first_lower,
        poles: first_poles,
    };
    let second = PrismEmbedding {
        upper_normal: upper_normal(&second_poles, &b_g)?,
        lower: second_lower,
        poles: second_poles,
    };
    Ok(PrismPair { first, second })
}

impl PrismPair {
    /// Total dihedral angle at the shared upper edge.
    pub fn shared_dihedral(&self) -> Result<f64> {
        Ok(self.first.phi(0)? + self.second.phi(0)?)
    }

    /// Local Epstein–Penner convexity of the shared edge for the horospheres
    /// through the lower vertices; see [`quad_pole_convexity`].
    pub fn pole_convexity(&self) -> f64 {
        // Poles of the horospheres through B: x_B + e4.
        let q = |p: &PrismEmbedding, i: usize| p.lower[i] + LorentzVector::E4;
        let d = |a: LorentzVector, b: LorentzVector| (-0.5 * a.dot(&b)).ln();
        let (f, s) = (&self.first, &self.second);
        quad_pole_convexity(
            d(q(f, 0), q(f, 1)),
            d(q(f, 1), q(f, 2)),
            d(q(f, 2), q(f, 0)),
            d(q(s, 2), q(s, 0)),
            d(q(s, 0), q(s, 1)),
        )
    }

    /// Angle between the circles circumscribed about the two lower triangles,
    /// measured between their inward normals at `B_J`. Zero when the four
    /// lower vertices are concyclic.
    pub fn circumcircle_angle(&self) -> Result<f64> {
        let b_j = self.first.lower[1];
        let n1 = circle_normal(&self.first.lower, &b_j)?;
        let n2 = circle_normal(&self.second.lower, &b_j)?;
        Ok((n1.dot(&n2) / (n1.norm_sq() * n2.norm_sq()).sqrt()).clamp(-1.0, 1.0).acos())
    }
}

// Inward normal at `at` (tangent to the plane x₄ = 0) of the generalized
// circle {⟨c, x⟩ = 1} through the three points.
fn circle_normal(points: &[LorentzVector; 3], at: &LorentzVector) -> Result<LorentzVector> {
    let rows = Matrix3::from_fn(|a, b| {
        let s = if b == 0 { -1.0 } else { 1.0 };
        s * points[a].0[b]
    });
    let c = rows
        .lu()
        .solve(&Vector3::repeat(1.0))
        .ok_or_else(|| Error::Degenerate("collinear lower triangle".into()))?;
    let c = LorentzVector([c[0], c[1], c[2], 0.0]);
    let n = c + *at * c.dot(at);
    // The triangle's barycentre is inside its circumdisk.
    let centre = points.iter().fold(LorentzVector([0.0; 4]), |acc, p| acc + *p);
    let inside = c.dot(&centre) * (-centre.norm_sq()).sqrt().recip() > 1.0;
    Ok(if inside { n } else { -n })
}
