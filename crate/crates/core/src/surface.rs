//! Gluing combinatorics of ideal triangulations of punctured surfaces.
//!
//! A triangulation is a set of `F` triangles together with a fixed-point-free
//! involution on the `3F` side slots. Side `k` of triangle `t` is opposite
//! corner `k` and runs from corner `k + 1` to corner `k + 2` (all triangles are
//! oriented counterclockwise). Gluings identify sides with opposite
//! directions, so every gluing yields an orientable surface. Loops, multiple
//! edges and triangles glued to themselves are all allowed.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type EdgeId = usize;
pub type CuspId = usize;

/// Side `side` of triangle `triangle`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub triangle: usize,
    pub side: usize,
}

impl Slot {
    pub const fn new(triangle: usize, side: usize) -> Self {
        Self { triangle, side }
    }

    fn index(self) -> usize {
        3 * self.triangle + self.side
    }

    fn from_index(i: usize) -> Self {
        Self::new(i / 3, i % 3)
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.triangle, self.side)
    }
}

/// Corner `corner` of triangle `triangle`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrientedCornerIndex {
    pub triangle: usize,
    pub corner: usize,
}

/// An edge traversed in one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientedEdge {
    pub edge: EdgeId,
    /// `true` when the edge is traversed along the direction of its first slot.
    pub forward: bool,
    pub start: CuspId,
    pub end: CuspId,
}

impl OrientedEdge {
    pub fn is_loop(&self) -> bool {
        self.start == self.end
    }
}

/// Oriented edges leaving one cusp, in the cyclic order of the corner walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuspStar {
    pub cusp: CuspId,
    /// Corners at the cusp in cyclic order.
    pub corners: Vec<OrientedCornerIndex>,
    /// Every oriented edge starting at the cusp; loops appear once per end.
    pub outgoing: Vec<OrientedEdge>,
}

impl CuspStar {
    /// Outgoing edges ending at a different cusp.
    pub fn proper(&self) -> impl Iterator<Item = &OrientedEdge> {
        self.outgoing.iter().filter(|e| !e.is_loop())
    }

    /// Outgoing loops (each unoriented loop contributes twice).
    pub fn loops(&self) -> impl Iterator<Item = &OrientedEdge> {
        self.outgoing.iter().filter(|e| e.is_loop())
    }
}

/// Topology computed by [`TriangulatedSurface::report`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceReport {
    pub genus: usize,
    pub cusps: usize,
    pub triangles: usize,
    pub edges: usize,
    /// Corner orbit of each cusp, as `[triangle, corner]` pairs.
    pub cusp_orbits: Vec<Vec<[usize; 2]>>,
}

/// Validated gluing of ideal triangles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangulatedSurface {
    num_triangles: usize,
    partner: Vec<Slot>,
    slot_edge: Vec<EdgeId>,
    edges: Vec<[Slot; 2]>,
    corner_cusp: Vec<CuspId>,
    num_cusps: usize,
    genus: usize,
}

/// Validates a gluing description and returns its topology.
pub fn validate(num_triangles: usize, gluings: &[[Slot; 2]]) -> Result<SurfaceReport> {
    Ok(TriangulatedSurface::from_gluings(num_triangles, gluings)?.report())
}

impl TriangulatedSurface {
    /// Builds a surface from unordered slot pairs.
    ///
    /// Edge ids are the positions of the pairs after sorting each pair and then
    /// the list lexicographically. Cusp ids follow the smallest incident corner.
    pub fn from_gluings(num_triangles: usize, gluings: &[[Slot; 2]]) -> Result<Self> {
        if num_triangles == 0 {
            return Err(Error::Empty);
        }
        let n_slots = 3 * num_triangles;
        let mut partner: Vec<Option<Slot>> = vec![None; n_slots];
        let mut pairs = Vec::with_capacity(gluings.len());
        for &[a, b] in gluings {
            for s in [a, b] {
                if s.triangle >= num_triangles || s.side > 2 {
                    return Err(Error::InvalidSlot { slot: s });
                }
            }
            if a == b {
                return Err(Error::FixedPoint { slot: a });
            }
            for s in [a, b] {
                if partner[s.index()].is_some() {
                    return Err(Error::NotInvolution { slot: s });
                }
            }
            partner[a.index()] = Some(b);
            partner[b.index()] = Some(a);
            pairs.push(if a < b { [a, b] } else { [b, a] });
        }
        if let Some(i) = partner.iter().position(Option::is_none) {
            return Err(Error::Unglued { slot: Slot::from_index(i) });
        }
        let partner: Vec<Slot> = partner.into_iter().map(Option::unwrap).collect();
        pairs.sort();

        let mut slot_edge = vec![0; n_slots];
        for (e, [a, b]) in pairs.iter().enumerate() {
            slot_edge[a.index()] = e;
            slot_edge[b.index()] = e;
        }

        // Connectivity over the dual graph.
        let mut seen = vec![false; num_triangles];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(t) = stack.pop() {
            for k in 0..3 {
                let u = partner[3 * t + k].triangle;
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        if let Some(t) = seen.iter().position(|s| !s) {
            return Err(Error::Disconnected { slot: Slot::new(t, 0) });
        }

        let mut surface = Self {
            num_triangles,
            partner,
            slot_edge,
            edges: pairs,
            corner_cusp: vec![usize::MAX; n_slots],
            num_cusps: 0,
            genus: 0,
        };
        surface.assign_cusps();

        let f = num_triangles as i64;
        let e = surface.edges.len() as i64;
        let chi = surface.num_cusps as i64 - e + f;
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(Error::Degenerate(format!("Euler characteristic {chi} is not that of a closed orientable surface")));
        }
        surface.genus = ((2 - chi) / 2) as usize;
        Ok(surface)
    }

    fn assign_cusps(&mut self) {
        let mut next = 0;
        for start in 0..3 * self.num_triangles {
            if self.corner_cusp[start] != usize::MAX {
                continue;
            }
            let mut c = start;
            loop {
                self.corner_cusp[c] = next;
                c = self.next_corner_index(c);
                if c == start {
                    break;
                }
            }
            next += 1;
        }
        self.num_cusps = next;
    }

    // Corner walk: leave corner c of t across side c+2 (which starts at c) and
    // arrive at the corner of the neighbour where the glued side ends.
    fn next_corner_index(&self, corner: usize) -> usize {
        let (t, c) = (corner / 3, corner % 3);
        let p = self.partner[3 * t + (c + 2) % 3];
        3 * p.triangle + (p.side + 2) % 3
    }

    pub fn num_triangles(&self) -> usize {
        self.num_triangles
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_cusps(&self) -> usize {
        self.num_cusps
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64
    }

    pub fn partner(&self, slot: Slot) -> Slot {
        self.partner[slot.index()]
    }

    pub fn edge_of(&self, slot: Slot) -> EdgeId {
        self.slot_edge[slot.index()]
    }

    /// The two slots of an edge, first one smaller at construction time.
    pub fn edge_slots(&self, edge: EdgeId) -> [Slot; 2] {
        self.edges[edge]
    }

    /// Edge ids of the sides of triangle `t`, indexed by side.
    pub fn triangle_edges(&self, t: usize) -> [EdgeId; 3] {
        [self.slot_edge[3 * t], self.slot_edge[3 * t + 1], self.slot_edge[3 * t + 2]]
    }

    pub fn cusp_at(&self, t: usize, corner: usize) -> CuspId {
        self.corner_cusp[3 * t + corner]
    }

    /// Cusps at the corners of triangle `t`.
    pub fn triangle_cusps(&self, t: usize) -> [CuspId; 3] {
        [self.corner_cusp[3 * t], self.corner_cusp[3 * t + 1], self.corner_cusp[3 * t + 2]]
    }

    /// `(tail, head)` of an edge traversed along its first slot.
    pub fn edge_endpoints(&self, edge: EdgeId) -> (CuspId, CuspId) {
        let s = self.edges[edge][0];
        (self.cusp_at(s.triangle, (s.side + 1) % 3), self.cusp_at(s.triangle, (s.side + 2) % 3))
    }

    /// Whether the two sides of an edge lie in different triangles.
    pub fn is_flippable(&self, edge: EdgeId) -> bool {
        let [a, b] = self.edges[edge];
        a.triangle != b.triangle
    }

    /// Gluing pairs listed in edge-id order.
    pub fn gluings(&self) -> Vec<[Slot; 2]> {
        self.edges.clone()
    }

    pub fn report(&self) -> SurfaceReport {
        SurfaceReport {
            genus: self.genus,
            cusps: self.num_cusps,
            triangles: self.num_triangles,
            edges: self.edges.len(),
            cusp_orbits: (0..self.num_cusps)
                .map(|i| self.cusp_orbit(i).iter().map(|c| [c.triangle, c.corner]).collect())
                .collect(),
        }
    }

    /// Corners of `cusp` in walk order, starting from its smallest corner.
    pub fn cusp_orbit(&self, cusp: CuspId) -> Vec<OrientedCornerIndex> {
        let Some(start) = self.corner_cusp.iter().position(|&c| c == cusp) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut c = start;
        loop {
            out.push(OrientedCornerIndex { triangle: c / 3, corner: c % 3 });
            c = self.next_corner_index(c);
            if c == start {
                break;
            }
        }
        out
    }

    /// Oriented edges leaving `cusp`, in cyclic order.
    pub fn oriented_star(&self, cusp: CuspId) -> Result<CuspStar> {
        if cusp >= self.num_cusps {
            return Err(Error::InvalidCusp(cusp));
        }
        let corners = self.cusp_orbit(cusp);
        let outgoing = corners
            .iter()
            .map(|c| {
                let slot = Slot::new(c.triangle, (c.corner + 2) % 3);
                let edge = self.edge_of(slot);
                OrientedEdge {
                    edge,
                    forward: self.edges[edge][0] == slot,
                    start: cusp,
                    end: self.cusp_at(c.triangle, (c.corner + 1) % 3),
                }
            })
            .collect();
        Ok(CuspStar { cusp, corners, outgoing })
    }

    /// Replaces the diagonal of the quadrilateral around `edge`. The diagonal
    /// keeps its id and its two slots; `inverse` selects the opposite rotation
    /// so that `rotate(e, true)` undoes `rotate(e, false)` exactly.
    fn rotate(&mut self, edge: EdgeId, inverse: bool) -> Result<()> {
        if edge >= self.edges.len() {
            return Err(Error::InvalidEdge(edge));
        }
        if !self.is_flippable(edge) {
            return Err(Error::Unflippable(edge));
        }
        let [s1, s2] = self.edges[edge];
        let (t1, k1, t2, k2) = (s1.triangle, s1.side, s2.triangle, s2.side);

        // Abstract quad vertices, counterclockwise I, J, G, H; the diagonal is JH.
        const I: u8 = 0;
        const J: u8 = 1;
        const G: u8 = 2;
        const H: u8 = 3;
        let old_t1 = [I, J, H];
        let old_t2 = [G, H, J];
        let (new_t1, new_t2) = if inverse { ([H, I, G], [J, G, I]) } else { ([J, G, I], [H, I, G]) };

        let pos = |base: usize, p: usize| (base + p) % 3;
        let mut cusp_of = [0usize; 4];
        for p in 0..3 {
            cusp_of[old_t1[p] as usize] = self.cusp_at(t1, pos(k1, p));
            cusp_of[old_t2[p] as usize] = self.cusp_at(t2, pos(k2, p));
        }

        // Side at relative position p of a triangle laid out from `base`
        // joins the vertices at p+1 and p+2.
        let key = |a: u8, b: u8| if a < b { (a, b) } else { (b, a) };
        let mut quad_side: BTreeMap<(u8, u8), Slot> = BTreeMap::new();
        for p in 1..3 {
            quad_side.insert(key(old_t1[(p + 1) % 3], old_t1[(p + 2) % 3]), Slot::new(t1, pos(k1, p)));
            quad_side.insert(key(old_t2[(p + 1) % 3], old_t2[(p + 2) % 3]), Slot::new(t2, pos(k2, p)));
        }

        // Old slot -> new slot for the four outer sides.
        let mut remap: BTreeMap<Slot, Slot> = BTreeMap::new();
        for (t, k, layout) in [(t1, k1, new_t1), (t2, k2, new_t2)] {
            for p in 1..3 {
                let old = quad_side[&key(layout[(p + 1) % 3], layout[(p + 2) % 3])];
                remap.insert(old, Slot::new(t, pos(k, p)));
            }
        }
        let map = |s: Slot| remap.get(&s).copied().unwrap_or(s);

        let mut updates: Vec<(Slot, Slot, EdgeId)> = Vec::with_capacity(4);
        for (&old, &new) in &remap {
            updates.push((new, map(self.partner(old)), self.edge_of(old)));
        }
        for (new, partner, e) in updates {
            self.partner[new.index()] = partner;
            self.partner[partner.index()] = new;
            self.slot_edge[new.index()] = e;
            self.slot_edge[partner.index()] = e;
        }
        for (t, k, layout) in [(t1, k1, new_t1), (t2, k2, new_t2)] {
            for p in 0..3 {
                self.corner_cusp[3 * t + pos(k, p)] = cusp_of[layout[p] as usize];
            }
        }
        // Edge slot lists for every edge touched.
        let mut touched: Vec<EdgeId> = remap.values().map(|&s| self.edge_of(s)).collect();
        touched.sort_unstable();
        touched.dedup();
        for e in touched {
            self.edges[e] = [Slot::new(usize::MAX, 0); 2];
        }
        for i in 0..3 * self.num_triangles {
            let e = self.slot_edge[i];
            let slot = Slot::from_index(i);
            if self.edges[e][0].triangle == usize::MAX {
                self.edges[e][0] = slot;
            } else if self.edges[e][1].triangle == usize::MAX && self.edges[e][0] != slot {
                self.edges[e][1] = slot;
            }
        }
        Ok(())
    }

    /// Relabels edges and cusps into the canonical numbering used by
    /// [`Self::from_gluings`]. Returns the relabeled surface together with
    /// `edge_map[old] = new` and `cusp_map[old] = new`.
    pub fn canonicalize(&self) -> (Self, Vec<EdgeId>, Vec<CuspId>) {
        let canon = Self::from_gluings(self.num_triangles, &self.edges)
            .expect("a valid surface stays valid under relabeling");
        let edge_map = self.edges.iter().map(|s| canon.edge_of(s[0])).collect();
        let mut cusp_map = vec![0; self.num_cusps];
        for c in 0..3 * self.num_triangles {
            cusp_map[self.corner_cusp[c]] = canon.corner_cusp[c];
        }
        (canon, edge_map, cusp_map)
    }
}

/// A triangulated cusp surface together with one Penner length per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoratedMetric {
    surface: TriangulatedSurface,
    lengths: Vec<f64>,
}

// ln(e^x + e^y) without overflow.
fn log_add_exp(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x > y { (x, y) } else { (y, x) };
    hi + (lo - hi).exp().ln_1p()
}

impl DecoratedMetric {
    pub fn new(surface: TriangulatedSurface, lengths: Vec<f64>) -> Result<Self> {
        if lengths.len() != surface.num_edges() {
            return Err(Error::CountMismatch {
                what: "edge lengths",
                expected: surface.num_edges(),
                got: lengths.len(),
            });
        }
        if let Some(i) = lengths.iter().position(|l| !l.is_finite()) {
            return Err(Error::NonFinite { what: "edge length", index: i });
        }
        Ok(Self { surface, lengths })
    }

    pub fn surface(&self) -> &TriangulatedSurface {
        &self.surface
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn length(&self, edge: EdgeId) -> f64 {
        self.lengths[edge]
    }

    /// Penner lengths of the sides of triangle `t`, indexed by side.
    pub fn triangle_lengths(&self, t: usize) -> [f64; 3] {
        self.surface.triangle_edges(t).map(|e| self.lengths[e])
    }

    /// λ-length `exp(l / 2)` of an edge.
    pub fn lambda_length(&self, edge: EdgeId) -> f64 {
        (0.5 * self.lengths[edge]).exp()
    }

    // Outer sides of the quad around `edge` in cyclic order (IJ, JG, GH, HI).
    fn quad_lengths(&self, edge: EdgeId) -> [f64; 4] {
        let s = &self.surface;
        let [a, b] = s.edge_slots(edge);
        let side = |slot: Slot, p: usize| self.lengths[s.edge_of(Slot::new(slot.triangle, (slot.side + p) % 3))];
        [side(a, 2), side(b, 1), side(b, 2), side(a, 1)]
    }

    fn ptolemy(&self, edge: EdgeId) -> f64 {
        let [ij, jg, gh, hi] = self.quad_lengths(edge);
        2.0 * log_add_exp(0.5 * (ij + gh), 0.5 * (jg + hi)) - self.lengths[edge]
    }

    /// Flips `edge`. The new diagonal keeps the edge id and gets the Ptolemy
    /// length `λ_new λ_old = λ_ij λ_gh + λ_jg λ_hi`; nothing else changes.
    pub fn flip(&self, edge: EdgeId) -> Result<Self> {
        self.flip_impl(edge, false)
    }

    /// Exact inverse of [`Self::flip`].
    pub fn flip_inverse(&self, edge: EdgeId) -> Result<Self> {
        self.flip_impl(edge, true)
    }

    fn flip_impl(&self, edge: EdgeId, inverse: bool) -> Result<Self> {
        let mut out = self.clone();
        out.flip_in_place(edge, inverse)?;
        Ok(out)
    }

    pub(crate) fn flip_in_place(&mut self, edge: EdgeId, inverse: bool) -> Result<()> {
        if edge >= self.lengths.len() {
            return Err(Error::InvalidEdge(edge));
        }
        if !self.surface.is_flippable(edge) {
            return Err(Error::Unflippable(edge));
        }
        let new_length = self.ptolemy(edge);
        self.surface.rotate(edge, inverse)?;
        self.lengths[edge] = new_length;
        Ok(())
    }

    /// Replaces the combinatorics around `edge` and sets the new diagonal to
    /// `new_length` (used for flips that preserve some other metric).
    pub(crate) fn flip_with_length(&mut self, edge: EdgeId, new_length: f64) -> Result<()> {
        if edge >= self.lengths.len() {
            return Err(Error::InvalidEdge(edge));
        }
        self.surface.rotate(edge, false)?;
        self.lengths[edge] = new_length;
        Ok(())
    }

    /// Canonical relabeling; see [`TriangulatedSurface::canonicalize`].
    pub fn canonicalize(&self) -> (Self, Vec<EdgeId>, Vec<CuspId>) {
        let (surface, edge_map, cusp_map) = self.surface.canonicalize();
        let mut lengths = vec![0.0; self.lengths.len()];
        for (old, &new) in edge_map.iter().enumerate() {
            lengths[new] = self.lengths[old];
        }
        (Self { surface, lengths }, edge_map, cusp_map)
    }
}
