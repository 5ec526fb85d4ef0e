//! Newton ascent on the concave functional whose gradient is `κ̃ - κ'`.
//!
//! The functional itself is never evaluated. Each Newton direction is
//! followed with a line search on the directional derivative
//! `t ↦ (κ̃(r + t d) - κ')·d`, which is monotone by concavity. Every trial
//! point is made Delaunay before its curvatures are read.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::complex::{self, ComplexState};
use crate::error::{Error, Result};
use crate::hypgeom;
use crate::surface::{DecoratedMetric, EdgeId, TriangulatedSurface};

/// Prescribed curvature at every cusp.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTarget {
    kappa: Vec<f64>,
}

impl CurvatureTarget {
    /// Checks `κ'_i < 2π` and `Σκ'_i > 2π(2 - 2g)` for a surface of genus
    /// `g > 1`.
    pub fn new(surface: &TriangulatedSurface, kappa: Vec<f64>) -> Result<Self> {
        if surface.genus() < 2 {
            return Err(Error::Precondition(format!("genus must be at least 2, got {}", surface.genus())));
        }
        if kappa.len() != surface.num_cusps() {
            return Err(Error::CountMismatch { what: "curvatures", expected: surface.num_cusps(), got: kappa.len() });
        }
        if let Some(i) = kappa.iter().position(|k| !k.is_finite()) {
            return Err(Error::NonFinite { what: "curvature", index: i });
        }
        if let Some(i) = kappa.iter().position(|&k| k >= 2.0 * PI) {
            return Err(Error::Infeasible(format!("kappa[{i}] = {} is not below 2π", kappa[i])));
        }
        let bound = 2.0 * PI * surface.euler_characteristic() as f64;
        let total: f64 = kappa.iter().sum();
        // A few ulps of slack so that a target summing to the bound in exact
        // arithmetic is rejected.
        if total <= bound + 8.0 * f64::EPSILON * bound.abs().max(1.0) {
            return Err(Error::Infeasible(format!(
                "sum of curvatures {total} must exceed 2π(2 - 2g) = {bound}"
            )));
        }
        Ok(Self { kappa })
    }

    /// Zero curvature at every cusp.
    pub fn zero(surface: &TriangulatedSurface) -> Result<Self> {
        Self::new(surface, vec![0.0; surface.num_cusps()])
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }
}

/// `κ̃ - κ'`, the gradient of the functional.
pub fn gradient(state: &ComplexState, target: &CurvatureTarget) -> Vec<f64> {
    state.kappa().iter().zip(&target.kappa).map(|(k, t)| k - t).collect()
}

/// `X_ij = ∂κ̃_i / ∂r_j`, assembled corner by corner.
pub fn hessian(state: &ComplexState) -> Result<DMatrix<f64>> {
    let s = state.surface();
    let n = s.num_cusps();
    let r = state.weights();
    let mut x = DMatrix::zeros(n, n);
    for t in 0..s.num_triangles() {
        let cusps = s.triangle_cusps(t);
        let l = state.metric().triangle_lengths(t);
        let w = cusps.map(|c| r[c]);
        for corner in 0..3 {
            let d = hypgeom::corner_derivatives(l, w, corner)?;
            for k in 0..3 {
                x[(cusps[corner], cusps[k])] -= d[k];
            }
        }
    }
    Ok(x)
}

/// Solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Stop once `‖κ̃ - κ'‖∞` is at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// Starting weights; zero when absent.
    pub initial: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100, initial: None }
    }
}

/// Line-search stop threshold on the directional derivative.
pub const LINE_SEARCH_TOL: f64 = 1e-12;
/// Maximum trial points per line search.
pub const LINE_SEARCH_STEPS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub weights: Vec<f64>,
    pub state: ComplexState,
    /// `‖κ̃ - κ'‖∞` at the returned state.
    pub residual: f64,
    pub iterations: usize,
    /// Flips applied along the accepted path, in order.
    pub flips: Vec<EdgeId>,
    /// Residual before the first step and after every accepted step.
    pub trace: Vec<f64>,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

struct Point {
    state: ComplexState,
    grad: Vec<f64>,
    residual: f64,
    flips: Vec<EdgeId>,
}

fn evaluate(metric: &DecoratedMetric, r: &[f64], target: &CurvatureTarget) -> Result<Point> {
    let d = complex::delaunayize(metric, r)?;
    let grad = gradient(&d.state, target);
    let residual = max_abs(&grad);
    if !residual.is_finite() {
        return Err(Error::NonFinite { what: "residual", index: 0 });
    }
    Ok(Point { state: d.state, grad, residual, flips: d.flips })
}

// Newton direction -X⁻¹ g; steepest ascent g if -X is not numerically
// positive definite.
fn direction(state: &ComplexState, grad: &[f64]) -> Result<Vec<f64>> {
    let g = DVector::from_column_slice(grad);
    let neg = -hessian(state)?;
    if let Some(chol) = neg.cholesky() {
        let d = chol.solve(&g);
        if d.iter().all(|x| x.is_finite()) {
            return Ok(d.iter().copied().collect());
        }
    }
    Ok(grad.to_vec())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Finds the weights whose complex has curvature `target`.
pub fn solve(metric: &DecoratedMetric, target: &CurvatureTarget, opts: &SolveOptions) -> Result<SolveReport> {
    let n = metric.surface().num_cusps();
    if target.kappa.len() != n {
        return Err(Error::CountMismatch { what: "curvatures", expected: n, got: target.kappa.len() });
    }
    let r0 = opts.initial.clone().unwrap_or_else(|| vec![0.0; n]);
    if r0.len() != n {
        return Err(Error::CountMismatch { what: "initial weights", expected: n, got: r0.len() });
    }

    let mut r = r0;
    let mut cur = evaluate(metric, &r, target)?;
    let mut flips = cur.flips.clone();
    let mut trace = vec![cur.residual];
    let mut iterations = 0;

    while cur.residual > opts.tol {
        if iterations == opts.max_iter {
            return Err(Error::NoConvergence { iterations, residual: cur.residual, trace });
        }
        iterations += 1;
        let d = direction(&cur.state, &cur.grad)?;
        let slope0 = dot(&cur.grad, &d);

        let mut lo = 0.0;
        let mut hi: Option<f64> = None;
        let mut t = 1.0;
        let mut accepted: Option<(Vec<f64>, Point)> = None;
        let mut best_lo: Option<(Vec<f64>, Point)> = None;
        for _ in 0..LINE_SEARCH_STEPS {
            let trial: Vec<f64> = r.iter().zip(&d).map(|(x, y)| x + t * y).collect();
            match evaluate(cur.state.metric(), &trial, target) {
                Ok(p) => {
                    let slope = dot(&p.grad, &d);
                    let armijo = p.residual <= (1.0 - 1e-4 * t.min(1.0)) * cur.residual;
                    if p.residual <= cur.residual && (armijo || slope.abs() < LINE_SEARCH_TOL * slope0.abs().max(1.0)) {
                        accepted = Some((trial, p));
                        break;
                    }
                    if slope > 0.0 {
                        lo = t;
                        if p.residual <= cur.residual {
                            best_lo = Some((trial, p));
                        }
                        t = hi.map_or(2.0 * t, |h| 0.5 * (lo + h));
                    } else {
                        hi = Some(t);
                        t = 0.5 * (lo + t);
                    }
                }
                Err(_) => {
                    hi = Some(t);
                    t = 0.5 * (lo + t);
                }
            }
        }
        let Some((next_r, next)) = accepted.or(best_lo) else {
            return Err(Error::NoConvergence { iterations, residual: cur.residual, trace });
        };
        if next.residual >= cur.residual && next.residual > opts.tol {
            // No progress possible at this precision.
            return Err(Error::NoConvergence { iterations, residual: cur.residual, trace });
        }
        flips.extend(&next.flips);
        r = next_r;
        cur = next;
        trace.push(cur.residual);
    }

    Ok(SolveReport { weights: r, residual: cur.residual, iterations, flips, trace, state: cur.state })
}

/// `u_i = (r''_i - r'_i) / 2` between two complexes over the same decorated
/// surface.
pub fn conformal_factors(before: &ComplexState, after: &ComplexState) -> Result<Vec<f64>> {
    let (a, b) = (before.surface(), after.surface());
    if a.num_cusps() != b.num_cusps() || a.num_triangles() != b.num_triangles() || a.genus() != b.genus() {
        return Err(Error::Mismatch(format!(
            "(g, n, F) = ({}, {}, {}) vs ({}, {}, {})",
            a.genus(),
            a.num_cusps(),
            a.num_triangles(),
            b.genus(),
            b.num_cusps(),
            b.num_triangles()
        )));
    }
    if a.gluings() == b.gluings() {
        let (la, lb) = (before.metric().lengths(), after.metric().lengths());
        if let Some(e) = (0..la.len()).find(|&e| (la[e] - lb[e]).abs() > 1e-9 * la[e].abs().max(1.0)) {
            return Err(Error::Mismatch(format!("edge {e} has length {} vs {}", la[e], lb[e])));
        }
    }
    Ok(before.weights().iter().zip(after.weights()).map(|(x, y)| 0.5 * (y - x)).collect())
}

/// Largest relative violation of `sinh(a'_e/2) = e^{u_i + u_j} sinh(a''_e/2)`
/// over the edges of `after`, where `a'` is the lower metric of `after`'s
/// triangulation at `before_weights` and `a''` that of `after`.
pub fn conformal_residual(before_weights: &[f64], after: &ComplexState, u: &[f64]) -> Result<f64> {
    let s = after.surface();
    let mut worst = 0.0f64;
    for e in 0..s.num_edges() {
        let (i, j) = s.edge_endpoints(e);
        let l = after.metric().length(e);
        let a1 = hypgeom::lower_edge_length(l, before_weights[i], before_weights[j])?;
        let a2 = hypgeom::lower_edge_length(l, after.weights()[i], after.weights()[j])?;
        let lhs = (0.5 * a1).sinh();
        let rhs = (u[i] + u[j]).exp() * (0.5 * a2).sinh();
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Result of [`uniformize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Uniformization {
    /// The complex built from the input metric (`r = 0`).
    pub initial: ComplexState,
    pub report: SolveReport,
    /// Conformal factor at each vertex.
    pub factors: Vec<f64>,
    /// Lower-metric flips made before solving.
    pub lower_flips: Vec<EdgeId>,
    /// Worst relative error of the discrete conformality relation.
    pub conformal_residual: f64,
}

/// Finds the discretely conformal hyperbolic metric with the given vertex
/// curvatures.
pub fn uniformize(
    pm: &complex::PolyhedralMetric,
    target: &CurvatureTarget,
    opts: &SolveOptions,
) -> Result<Uniformization> {
    let built = complex::from_polyhedral(pm)?;
    let report = solve(built.state.metric(), target, opts)?;
    let factors = conformal_factors(&built.state, &report.state)?;
    let conformal_residual = conformal_residual(built.state.weights(), &report.state, &factors)?;
    Ok(Uniformization { initial: built.state, report, factors, lower_flips: built.flips, conformal_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_relative_eq;

    #[test]
    fn genus_two_closed_form() {
        let m = fixtures::genus_two_metric();
        let target = CurvatureTarget::zero(m.surface()).unwrap();
        let rep = solve(&m, &target, &SolveOptions::default()).unwrap();
        assert_relative_eq!(rep.weights[0], fixtures::genus_two_flat_weight(), epsilon = 1e-10);
        assert!(rep.residual <= 1e-10);
        assert!(rep.iterations <= 10);
        assert!(rep.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn gradient_examples() {
        let m = fixtures::genus_two_metric();
        let target = CurvatureTarget::zero(m.surface()).unwrap();
        let at_zero = complex::assemble(&m, &[0.0]).unwrap();
        assert!(gradient(&at_zero, &target)[0] > 0.0);
        let at_flat = complex::assemble(&m, &[fixtures::genus_two_flat_weight()]).unwrap();
        assert!(gradient(&at_flat, &target)[0].abs() <= 1e-10);
        let own = CurvatureTarget::new(m.surface(), at_zero.kappa().to_vec()).unwrap();
        assert_eq!(gradient(&at_zero, &own), vec![0.0]);
    }

    #[test]
    fn hessian_loop_formula() {
        let m = fixtures::genus_two_metric();
        let r = 0.3;
        let state = complex::assemble(&m, &[r]).unwrap();
        let x = hessian(&state).unwrap();
        // Every corner is congruent: 18 oriented loop incidences, each with
        // e^{-2r}/α² (cot φ + cot φ).
        let alpha2 = (-2.0f64).exp() + (-2.0 * r).exp();
        let cot = (0.5 * state.phi()[0]).tan().recip();
        let expected = -18.0 * (-2.0 * r).exp() / alpha2 * (cot + cot);
        assert_relative_eq!(x[(0, 0)], expected, epsilon = 1e-12);
        assert!(x[(0, 0)] < 0.0);
    }

    #[test]
    fn rejects_boundary_targets() {
        let s = fixtures::genus_two_surface();
        assert!(matches!(CurvatureTarget::new(&s, vec![-4.0 * PI]), Err(Error::Infeasible(_))));
        assert!(matches!(CurvatureTarget::new(&s, vec![2.0 * PI]), Err(Error::Infeasible(_))));
        assert!(CurvatureTarget::new(&s, vec![-4.0 * PI + 1e-6]).is_ok());
        assert!(matches!(
            CurvatureTarget::zero(&fixtures::thrice_punctured_sphere()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn conformal_factors_at_flat_weight() {
        let m = fixtures::genus_two_metric();
        let r = fixtures::genus_two_flat_weight();
        let a = complex::assemble(&m, &[0.0]).unwrap();
        let b = complex::assemble(&m, &[r]).unwrap();
        let u = conformal_factors(&a, &b).unwrap();
        assert_relative_eq!(u[0], r / 2.0, epsilon = 1e-16);
        assert!(conformal_residual(a.weights(), &b, &u).unwrap() <= 1e-12);
        assert_eq!(conformal_factors(&a, &a).unwrap(), vec![0.0]);
        let two = complex::assemble(&fixtures::two_cusp_metric(), &[0.0, 0.0]).unwrap();
        assert!(matches!(conformal_factors(&a, &two), Err(Error::Mismatch(_))));
    }
}
