//! JSON documents for surfaces and results.
//!
//! Floats are written in scientific notation with 17 significant digits, which
//! round-trips every `f64` exactly.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::complex::{self, ComplexState, PolyhedralMetric};
use crate::error::{Error, Result};
use crate::surface::{DecoratedMetric, EdgeId, Slot, TriangulatedSurface};

pub const SURFACE_FORMAT: &str = "cusp-surface/1";
pub const RESULT_FORMAT: &str = "cusp-result/1";

/// Pretty JSON whose floats carry 17 significant digits.
struct ExactFloats<'a>(PrettyFormatter<'a>);

macro_rules! forward {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for ExactFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    forward! {
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    }
}

/// Serializes `value` as pretty JSON with exact floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("documents serialize infallibly");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
}

fn check_format(found: &str, expected: &str) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::Document(format!("format tag is {found:?}, expected {expected:?}")))
    }
}

/// A triangulated surface with one number per edge.
///
/// Edge `i` is the `i`-th gluing pair once every pair is sorted and the list
/// is sorted lexicographically; cusps are numbered by their smallest
/// `(triangle, corner)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDocument {
    pub format: String,
    pub num_triangles: usize,
    pub gluings: Vec<[[usize; 2]; 2]>,
    pub edge_lengths: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_target: Option<Vec<f64>>,
}

impl SurfaceDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: Self = from_json(text)?;
        check_format(&doc.format, SURFACE_FORMAT)?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// Document for `metric`, relabeled canonically. Per-cusp arrays are
    /// given in `metric`'s cusp numbering and are permuted along.
    pub fn from_metric(metric: &DecoratedMetric, weights: Option<&[f64]>, kappa_target: Option<&[f64]>) -> Self {
        let (canon, _, cusp_map) = metric.canonicalize();
        let permute = |v: &[f64]| {
            let mut out = vec![0.0; v.len()];
            for (old, &new) in cusp_map.iter().enumerate() {
                out[new] = v[old];
            }
            out
        };
        Self {
            format: SURFACE_FORMAT.into(),
            num_triangles: canon.surface().num_triangles(),
            gluings: canon
                .surface()
                .gluings()
                .iter()
                .map(|[a, b]| [[a.triangle, a.side], [b.triangle, b.side]])
                .collect(),
            edge_lengths: canon.lengths().to_vec(),
            weights: weights.map(permute),
            kappa_target: kappa_target.map(permute),
        }
    }

    pub fn surface(&self) -> Result<TriangulatedSurface> {
        let g: Vec<[Slot; 2]> = self
            .gluings
            .iter()
            .map(|[a, b]| [Slot::new(a[0], a[1]), Slot::new(b[0], b[1])])
            .collect();
        TriangulatedSurface::from_gluings(self.num_triangles, &g)
    }

    /// Edge lengths read as Penner lengths.
    pub fn metric(&self) -> Result<DecoratedMetric> {
        DecoratedMetric::new(self.surface()?, self.edge_lengths.clone())
    }

    /// Edge lengths read as hyperbolic lengths.
    pub fn polyhedral(&self) -> Result<PolyhedralMetric> {
        let s = self.surface()?;
        if self.edge_lengths.len() != s.num_edges() {
            return Err(Error::CountMismatch { what: "edge lengths", expected: s.num_edges(), got: self.edge_lengths.len() });
        }
        PolyhedralMetric::new(s, self.edge_lengths.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: EdgeId,
    /// Penner length of the upper edge.
    pub l: f64,
    /// Length of the lower edge.
    pub a: f64,
    /// Exterior dihedral angle.
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspRecord {
    pub id: usize,
    /// Total cone angle.
    pub omega: f64,
    /// Conformal factor, when a uniformization was run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
}

/// Output of every command. Edge and cusp ids are those of the input document;
/// flips keep edge ids, so `flip_log` and `edges` use the same numbering.
/// `surface` is the final triangulation, renumbered canonically, ready to be
/// fed back in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub format: String,
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub curvatures: Vec<f64>,
    pub edges: Vec<EdgeRecord>,
    pub cusps: Vec<CuspRecord>,
    pub lower_area: f64,
    pub gauss_bonnet_residual: f64,
    pub flip_log: Vec<EdgeId>,
    /// Worst relative error of the discrete conformality relation, when a
    /// uniformization was run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conformal_residual: Option<f64>,
    pub iterations: usize,
    pub trace: Vec<f64>,
    pub surface: SurfaceDocument,
}

impl ResultDocument {
    /// Describes `state`; `residual`, `trace`, `iterations` and the
    /// uniformization fields are left empty and can be filled in by the caller.
    pub fn from_state(state: &ComplexState, flip_log: Vec<EdgeId>) -> Result<Self> {
        let lower = complex::lower_metric(state)?;
        let edges = (0..state.surface().num_edges())
            .map(|e| EdgeRecord { id: e, l: state.metric().length(e), a: lower.lengths()[e], theta: state.theta()[e] })
            .collect();
        let cusps = state.omega().iter().enumerate().map(|(id, &omega)| CuspRecord { id, omega, u: None }).collect();
        Ok(Self {
            format: RESULT_FORMAT.into(),
            weights: state.weights().to_vec(),
            residual: None,
            curvatures: state.kappa().to_vec(),
            edges,
            cusps,
            lower_area: lower.area(),
            gauss_bonnet_residual: complex::gauss_bonnet_residual(state, &lower),
            flip_log,
            conformal_residual: None,
            iterations: 0,
            trace: Vec::new(),
            surface: SurfaceDocument::from_metric(state.metric(), Some(state.weights()), None),
        })
    }

    pub fn with_factors(mut self, factors: &[f64]) -> Self {
        for (c, &u) in self.cusps.iter_mut().zip(factors) {
            c.u = Some(u);
        }
        self
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: Self = from_json(text)?;
        check_format(&doc.format, RESULT_FORMAT)?;
        check_format(&doc.surface.format, SURFACE_FORMAT)?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}
