//! The prismatic complex `K(T, r)`: one semi-ideal prism per triangle, glued
//! along lateral faces. Cone angles, curvatures and exterior angles are
//! assembled from the per-prism closed forms.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hypgeom::{self, PrismAngles};
use crate::surface::{CuspId, DecoratedMetric, EdgeId, Slot, TriangulatedSurface};

/// Edges with exterior angle above `-FLIP_TOL` count as convex.
pub const FLIP_TOL: f64 = 1e-12;

/// Flips allowed per edge before the Delaunay engine gives up.
pub const FLIP_CAP_PER_EDGE: usize = 100;

/// An assembled complex `K(T, r)` with its angle data cached.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexState {
    metric: DecoratedMetric,
    weights: Vec<f64>,
    prisms: Vec<PrismAngles>,
    phi: Vec<f64>,
    theta: Vec<f64>,
    omega: Vec<f64>,
    kappa: Vec<f64>,
}

fn triangle_weights(surface: &TriangulatedSurface, r: &[f64], t: usize) -> [f64; 3] {
    surface.triangle_cusps(t).map(|c| r[c])
}

fn check_weights(surface: &TriangulatedSurface, r: &[f64]) -> Result<()> {
    if r.len() != surface.num_cusps() {
        return Err(Error::CountMismatch { what: "weights", expected: surface.num_cusps(), got: r.len() });
    }
    if let Some(i) = r.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { what: "weight", index: i });
    }
    Ok(())
}

/// Assembles `K(T, r)`; fails if some prism does not exist.
pub fn assemble(metric: &DecoratedMetric, r: &[f64]) -> Result<ComplexState> {
    let s = metric.surface();
    check_weights(s, r)?;
    let mut prisms = Vec::with_capacity(s.num_triangles());
    for t in 0..s.num_triangles() {
        let p = hypgeom::prism_angles(metric.triangle_lengths(t), triangle_weights(s, r, t)).map_err(|e| match e {
            Error::InadmissiblePrism { corner } => Error::InadmissibleTriangle { triangle: t, corner },
            other => other,
        })?;
        prisms.push(p);
    }

    let mut phi = vec![0.0; s.num_edges()];
    let mut omega = vec![0.0; s.num_cusps()];
    for (t, p) in prisms.iter().enumerate() {
        for k in 0..3 {
            phi[s.edge_of(Slot::new(t, k))] += p.phi[k];
            omega[s.cusp_at(t, k)] += p.omega[k];
        }
    }
    let theta = phi.iter().map(|p| PI - p).collect();
    let kappa = omega.iter().map(|w| 2.0 * PI - w).collect();
    Ok(ComplexState { metric: metric.clone(), weights: r.to_vec(), prisms, phi, theta, omega, kappa })
}

impl ComplexState {
    pub fn metric(&self) -> &DecoratedMetric {
        &self.metric
    }

    pub fn surface(&self) -> &TriangulatedSurface {
        self.metric.surface()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn prism(&self, t: usize) -> &PrismAngles {
        &self.prisms[t]
    }

    /// Total dihedral angle `φ̃_e` of each upper edge.
    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// Exterior angle `θ̃_e = π - φ̃_e` of each upper edge.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Total cone angle `ω̃_i` around the lateral edge at each cusp.
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// Curvature `κ̃_i = 2π - ω̃_i`.
    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn is_convex(&self) -> bool {
        self.theta.iter().all(|&t| t >= -FLIP_TOL)
    }

    /// Edge with the most negative exterior angle (smallest id on ties).
    pub fn most_concave_edge(&self) -> Option<(EdgeId, f64)> {
        min_edge(&self.theta)
    }
}

fn min_edge(values: &[f64]) -> Option<(EdgeId, f64)> {
    values
        .iter()
        .copied()
        .enumerate()
        .fold(None, |best, (e, v)| match best {
            Some((_, b)) if b <= v => best,
            _ => Some((e, v)),
        })
}

/// Local Epstein–Penner convexity of every edge of the horocycles shifted by
/// `r`, as a signed quantity with the same sign as `θ̃_e` wherever `K(T, r)`
/// exists. Defined for every `(T, r)`, admissible or not.
pub fn penner_tilts(metric: &DecoratedMetric, r: &[f64]) -> Result<Vec<f64>> {
    let s = metric.surface();
    check_weights(s, r)?;
    let mut tilt = vec![0.0; s.num_edges()];
    for t in 0..s.num_triangles() {
        let l = metric.triangle_lengths(t);
        let w = triangle_weights(s, r, t);
        // Decorated side lengths and the h-lengths of the shifted horocycles.
        let d: [f64; 3] = std::array::from_fn(|k| l[k] - w[(k + 1) % 3] - w[(k + 2) % 3]);
        let mut h = [0.0; 3];
        for k in 0..3 {
            h[k] = hypgeom::checked_exp(0.5 * (d[k] - d[(k + 1) % 3] - d[(k + 2) % 3]))?;
        }
        for k in 0..3 {
            tilt[s.edge_of(Slot::new(t, k))] += h[(k + 1) % 3] + h[(k + 2) % 3] - h[k];
        }
    }
    Ok(tilt)
}

/// Outcome of Delaunay flipping.
#[derive(Debug, Clone, PartialEq)]
pub struct Delaunay {
    pub state: ComplexState,
    /// Flipped edge ids, in order.
    pub flips: Vec<EdgeId>,
}

// Most negative flippable entry below the tolerance, or a stuck error.
fn pick_flip(surface: &TriangulatedSurface, values: &[f64], tol: f64) -> Result<Option<(EdgeId, f64)>> {
    let mut order: Vec<EdgeId> = (0..values.len()).filter(|&e| values[e] < -tol).collect();
    if order.is_empty() {
        return Ok(None);
    }
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    match order.iter().find(|&&e| surface.is_flippable(e)) {
        Some(&e) => Ok(Some((e, values[e]))),
        None => Err(Error::Stuck { edge: order[0] }),
    }
}

/// Flips `metric` until `K(T, r)` is convex.
///
/// While the complex exists, the edge with the most negative `θ̃_e` is
/// flipped. If some prism fails to exist the edge with the most negative
/// Penner tilt is flipped instead; the two criteria agree in sign, and the
/// tilt is defined everywhere.
pub fn delaunayize(metric: &DecoratedMetric, r: &[f64]) -> Result<Delaunay> {
    let cap = FLIP_CAP_PER_EDGE * metric.surface().num_edges();
    let mut current = metric.clone();
    let mut flips = Vec::new();
    let mut history = Vec::new();
    loop {
        let (state, next) = match assemble(&current, r) {
            Ok(state) => {
                let next = pick_flip(current.surface(), &state.theta, FLIP_TOL)?;
                (Some(state), next)
            }
            Err(err @ (Error::InadmissibleTriangle { .. } | Error::Range { .. })) => {
                let tilt = penner_tilts(&current, r)?;
                let scale = tilt.iter().fold(1.0f64, |m, t| m.max(t.abs()));
                match pick_flip(current.surface(), &tilt, FLIP_TOL * scale)? {
                    Some(pick) => (None, Some(pick)),
                    None => return Err(err),
                }
            }
            Err(err) => return Err(err),
        };
        match next {
            None => return Ok(Delaunay { state: state.expect("assembled"), flips }),
            Some((e, value)) => {
                if flips.len() == cap {
                    return Err(Error::FlipCap { cap, history });
                }
                current.flip_in_place(e, false)?;
                flips.push(e);
                history.push(value);
            }
        }
    }
}

/// Flips `state` to a convex complex with the same weights.
pub fn make_delaunay(state: &ComplexState) -> Result<Delaunay> {
    if state.is_convex() {
        return Ok(Delaunay { state: state.clone(), flips: Vec::new() });
    }
    delaunayize(&state.metric, &state.weights)
}

/// A hyperbolic cone metric on the surface, given by geodesic edge lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralMetric {
    lengths: DecoratedMetric,
    angles: Vec<[f64; 3]>,
    cone_angles: Vec<f64>,
    area: f64,
}

impl PolyhedralMetric {
    /// Validates the triangle inequalities and computes angles, cone angles
    /// and area.
    pub fn new(surface: TriangulatedSurface, lengths: Vec<f64>) -> Result<Self> {
        if let Some(i) = lengths.iter().position(|&a| a.is_nan() || a <= 0.0) {
            return Err(Error::Domain { what: "lower edge length", value: lengths[i] });
        }
        Self::from_lengths(DecoratedMetric::new(surface, lengths)?)
    }

    fn from_lengths(lengths: DecoratedMetric) -> Result<Self> {
        let s = lengths.surface();
        let mut angles = Vec::with_capacity(s.num_triangles());
        let mut cone_angles = vec![0.0; s.num_cusps()];
        let mut area = 0.0;
        for t in 0..s.num_triangles() {
            let a = hypgeom::hyperbolic_angles(lengths.triangle_lengths(t)).map_err(|e| match e {
                Error::Degenerate(msg) => Error::Degenerate(format!("lower triangle {t}: {msg}")),
                other => other,
            })?;
            for k in 0..3 {
                cone_angles[s.cusp_at(t, k)] += a[k];
            }
            area += PI - a.iter().sum::<f64>();
            angles.push(a);
        }
        Ok(Self { lengths, angles, cone_angles, area })
    }

    pub fn surface(&self) -> &TriangulatedSurface {
        self.lengths.surface()
    }

    pub fn lengths(&self) -> &[f64] {
        self.lengths.lengths()
    }

    /// Angle of triangle `t` at corner `k` (opposite side `k`).
    pub fn angles(&self, t: usize) -> [f64; 3] {
        self.angles[t]
    }

    pub fn cone_angles(&self) -> &[f64] {
        &self.cone_angles
    }

    /// `2π` minus the cone angle at each vertex.
    pub fn curvatures(&self) -> Vec<f64> {
        self.cone_angles.iter().map(|c| 2.0 * PI - c).collect()
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// Length of the other diagonal of the quadrilateral around `edge`,
    /// obtained by developing its two triangles into the hyperbolic plane.
    pub fn flipped_length(&self, edge: EdgeId) -> Result<f64> {
        let s = self.surface();
        if edge >= s.num_edges() {
            return Err(Error::InvalidEdge(edge));
        }
        if !s.is_flippable(edge) {
            return Err(Error::Unflippable(edge));
        }
        // Quad I J G H with diagonal J H: t1 = (I, J, H), t2 = (G, H, J).
        let [s1, s2] = s.edge_slots(edge);
        let side = |slot: Slot, p: usize| self.lengths.length(s.edge_of(Slot::new(slot.triangle, (slot.side + p) % 3)));
        let ij = side(s1, 2);
        let jg = side(s2, 1);
        let at_j = self.angles[s1.triangle][(s1.side + 1) % 3] + self.angles[s2.triangle][(s2.side + 2) % 3];
        let at_h = self.angles[s1.triangle][(s1.side + 2) % 3] + self.angles[s2.triangle][(s2.side + 1) % 3];
        if at_j >= PI || at_h >= PI {
            return Err(Error::Degenerate(format!("quadrilateral around edge {edge} is not convex")));
        }
        let cosh = ij.cosh() * jg.cosh() - ij.sinh() * jg.sinh() * at_j.cos();
        Ok(cosh.max(1.0).acosh())
    }

    /// Replaces the diagonal `edge` by the other diagonal of its quadrilateral.
    /// The metric itself is unchanged.
    pub fn flip(&self, edge: EdgeId) -> Result<Self> {
        let a = self.flipped_length(edge)?;
        let mut lengths = self.lengths.clone();
        lengths.flip_with_length(edge, a)?;
        Self::from_lengths(lengths)
    }

    /// Decorated upper metric whose complex at `r = 0` has this lower metric.
    pub fn upper_metric(&self) -> Result<DecoratedMetric> {
        let l = self.lengths().iter().map(|&a| hypgeom::upper_exponent_from_lower(a)).collect::<Result<Vec<_>>>()?;
        DecoratedMetric::new(self.surface().clone(), l)
    }
}

/// Lower boundary of a complex: lengths from the trapezoid formula, angles by
/// the hyperbolic cosine law. Computed from the lengths alone, so cone angles
/// and area independently check the upper data.
pub fn lower_metric(state: &ComplexState) -> Result<PolyhedralMetric> {
    let s = state.surface();
    let a = (0..s.num_edges())
        .map(|e| {
            let (i, j) = s.edge_endpoints(e);
            hypgeom::lower_edge_length(state.metric.length(e), state.weights[i], state.weights[j])
        })
        .collect::<Result<Vec<_>>>()?;
    PolyhedralMetric::new(s.clone(), a)
}

/// `Σκ̃_i - 2π(2 - 2g) - area` of the lower boundary; zero up to rounding.
pub fn gauss_bonnet_residual(state: &ComplexState, lower: &PolyhedralMetric) -> f64 {
    let total: f64 = state.kappa.iter().sum();
    total - 2.0 * PI * state.surface().euler_characteristic() as f64 - lower.area()
}

/// Result of [`from_polyhedral`].
#[derive(Debug, Clone, PartialEq)]
pub struct FromPolyhedral {
    pub state: ComplexState,
    /// The input metric retriangulated to be Delaunay.
    pub lower: PolyhedralMetric,
    /// Lower-metric flips, as edge ids.
    pub flips: Vec<EdgeId>,
}

/// Builds the convex complex with `r = 0` whose lower boundary is `pm`.
///
/// The metric is first made Delaunay by intrinsic flips (which keep the
/// lower metric); at `r = 0` the decorated lengths are `2 ln sinh(a / 2)`.
pub fn from_polyhedral(pm: &PolyhedralMetric) -> Result<FromPolyhedral> {
    let cap = FLIP_CAP_PER_EDGE * pm.surface().num_edges();
    let zero = vec![0.0; pm.surface().num_cusps()];
    let mut lower = pm.clone();
    let mut flips = Vec::new();
    let mut history = Vec::new();
    loop {
        let upper = lower.upper_metric()?;
        let next = match assemble(&upper, &zero) {
            Ok(state) => match pick_flip(upper.surface(), &state.theta, FLIP_TOL)? {
                None => return Ok(FromPolyhedral { state, lower, flips }),
                some => some,
            },
            Err(Error::InadmissibleTriangle { .. }) => {
                let tilt = penner_tilts(&upper, &zero)?;
                let scale = tilt.iter().fold(1.0f64, |m, t| m.max(t.abs()));
                pick_flip(upper.surface(), &tilt, FLIP_TOL * scale)?
            }
            Err(err) => return Err(err),
        };
        let Some((e, value)) = next else {
            return Err(Error::Degenerate("lower metric is Delaunay but its complex does not exist".into()));
        };
        if flips.len() == cap {
            return Err(Error::FlipCap { cap, history });
        }
        lower = lower.flip(e)?;
        flips.push(e);
        history.push(value);
    }
}

/// Cusps joined to `cusp` by at least one edge (excluding loops).
pub fn neighbours(surface: &TriangulatedSurface, cusp: CuspId) -> Vec<CuspId> {
    let mut out: Vec<CuspId> = (0..surface.num_edges())
        .filter_map(|e| match surface.edge_endpoints(e) {
            (i, j) if i == cusp && j != cusp => Some(j),
            (i, j) if j == cusp && i != cusp => Some(i),
            _ => None,
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}
