//! Small surfaces with known answers, used by tests, benches and the CLI.

use std::f64::consts::PI;

use crate::surface::{DecoratedMetric, Slot, TriangulatedSurface};

fn pairs(list: &[[(usize, usize); 2]]) -> Vec<[Slot; 2]> {
    list.iter().map(|[a, b]| [Slot::new(a.0, a.1), Slot::new(b.0, b.1)]).collect()
}

/// Two ideal triangles glued along all three sides: genus 0, three cusps.
pub fn thrice_punctured_sphere() -> TriangulatedSurface {
    let g = pairs(&[[(0, 0), (1, 0)], [(0, 1), (1, 2)], [(0, 2), (1, 1)]]);
    TriangulatedSurface::from_gluings(2, &g).expect("fixture is valid")
}

/// Gluing of the one-cusp genus-2 surface: a fan triangulation of the octagon
/// `a b a⁻¹ b⁻¹ c d c⁻¹ d⁻¹` from one vertex.
pub fn genus_two_gluings() -> Vec<[Slot; 2]> {
    pairs(&[
        [(0, 2), (1, 0)],
        [(0, 0), (2, 0)],
        [(3, 0), (5, 0)],
        [(4, 0), (5, 1)],
        [(0, 1), (1, 2)],
        [(1, 1), (2, 2)],
        [(2, 1), (3, 2)],
        [(3, 1), (4, 2)],
        [(4, 1), (5, 2)],
    ])
}

/// One-cusp genus-2 surface with 6 triangles and 9 edges.
pub fn genus_two_surface() -> TriangulatedSurface {
    TriangulatedSurface::from_gluings(6, &genus_two_gluings()).expect("fixture is valid")
}

/// [`genus_two_surface`] with every Penner length equal to 2.
pub fn genus_two_metric() -> DecoratedMetric {
    DecoratedMetric::new(genus_two_surface(), vec![2.0; 9]).expect("fixture is valid")
}

/// Weight at which [`genus_two_metric`] has zero curvature: every corner angle
/// is `π/9`, which forces `2 - 2r = ln u` with `u = 1/(2(1 - cos(π/9))) - 1`.
pub fn genus_two_flat_weight() -> f64 {
    let u = 1.0 / (2.0 * (1.0 - (PI / 9.0).cos())) - 1.0;
    0.5 * (2.0 - u.ln())
}

/// Splits triangle `t` into three by a new vertex; the new triangles get ids
/// `F` and `F + 1`.
pub fn split_triangle(surface: &TriangulatedSurface, t: usize) -> TriangulatedSurface {
    let f = surface.num_triangles();
    let (a, b, c) = (t, f, f + 1);
    // Side k of the old triangle becomes side 0 of one of the pieces.
    let piece = [a, b, c];
    let relocate = |s: Slot| if s.triangle == t { Slot::new(piece[s.side], 0) } else { s };
    let mut g: Vec<[Slot; 2]> = surface.gluings().into_iter().map(|[x, y]| [relocate(x), relocate(y)]).collect();
    g.extend(pairs(&[[(a, 1), (b, 2)], [(b, 1), (c, 2)], [(c, 1), (a, 2)]]));
    TriangulatedSurface::from_gluings(f + 2, &g).expect("splitting keeps a valid surface")
}

/// Genus-2 surface with two cusps (8 triangles, 12 edges), from splitting
/// triangle 0 of [`genus_two_surface`].
pub fn two_cusp_surface() -> TriangulatedSurface {
    split_triangle(&genus_two_surface(), 0)
}

/// [`two_cusp_surface`] with length 2 on the old edges and 1 on the edges at
/// the new cusp.
pub fn two_cusp_metric() -> DecoratedMetric {
    let s = two_cusp_surface();
    let lengths = (0..s.num_edges())
        .map(|e| {
            let (u, v) = s.edge_endpoints(e);
            if u == v { 2.0 } else { 1.0 }
        })
        .collect();
    DecoratedMetric::new(s, lengths).expect("fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cusp_counts() {
        let s = two_cusp_surface();
        assert_eq!((s.genus(), s.num_cusps(), s.num_triangles(), s.num_edges()), (2, 2, 8, 12));
        let m = two_cusp_metric();
        assert_eq!(m.lengths().iter().filter(|&&l| l == 1.0).count(), 3);
    }

    #[test]
    fn flat_weight_closed_form() {
        assert!((genus_two_flat_weight() - 0.006_689_288_805_017_478).abs() < 1e-15);
    }
}
