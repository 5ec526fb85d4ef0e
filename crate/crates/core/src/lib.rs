//! Convex ideal prismatic complexes over decorated hyperbolic cusp surfaces.
//!
//! Given a punctured surface with a decorated cusp metric (an ideal
//! triangulation with Penner lengths), the weights `r` of a prismatic complex
//! are found so that every cusp has a prescribed curvature. The same machinery
//! performs discrete uniformization of hyperbolic polyhedral metrics.
//!
//! ```
//! use prismatic::{fixtures, solve, CurvatureTarget, SolveOptions};
//!
//! let metric = fixtures::genus_two_metric();
//! let target = CurvatureTarget::zero(metric.surface()).unwrap();
//! let report = solve(&metric, &target, &SolveOptions::default()).unwrap();
//! assert!((report.weights[0] - fixtures::genus_two_flat_weight()).abs() < 1e-10);
//! ```

pub mod complex;
pub mod document;
pub mod error;
pub mod fixtures;
pub mod hypgeom;
pub mod lorentz;
pub mod solver;
pub mod surface;

pub use complex::{assemble, delaunayize, from_polyhedral, lower_metric, make_delaunay, ComplexState, Delaunay, PolyhedralMetric};
pub use document::{ResultDocument, SurfaceDocument};
pub use error::{Error, Result};
pub use hypgeom::PrismAngles;
pub use solver::{conformal_factors, gradient, hessian, solve, uniformize, CurvatureTarget, SolveOptions, SolveReport};
pub use surface::{CuspId, DecoratedMetric, EdgeId, OrientedCornerIndex, Slot, SurfaceReport, TriangulatedSurface};
