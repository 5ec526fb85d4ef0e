//! The `check` verb: a fixed battery of consistency checks.

use prismatic::lorentz::{corner_readout, embed_prism};
use prismatic::{complex, hypgeom, solver, ComplexState, DecoratedMetric, Error, SurfaceDocument};

pub struct Row {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn row(name: &'static str, outcome: Result<String, String>) -> Row {
    match outcome {
        Ok(detail) => Row { name, passed: true, detail },
        Err(detail) => Row { name, passed: false, detail },
    }
}

const ORACLE_TOL: f64 = 1e-10;
const FD_TOL: f64 = 1e-5;
const GAUSS_BONNET_TOL: f64 = 1e-9;

/// Runs every check on `text`. Only a document that does not parse is an
/// error; everything after that is reported as rows.
pub fn run(text: &str, weights: Option<Vec<f64>>) -> Result<Vec<Row>, Error> {
    let doc = SurfaceDocument::parse(text)?;
    let mut rows = Vec::new();
    let metric = match doc.metric() {
        Ok(m) => {
            let rep = m.surface().report();
            rows.push(row(
                "validate",
                Ok(format!("genus {}, {} cusps, {} triangles, {} edges", rep.genus, rep.cusps, rep.triangles, rep.edges)),
            ));
            m
        }
        Err(e) => {
            rows.push(row("validate", Err(e.to_string())));
            return Ok(rows);
        }
    };
    let r = weights.or(doc.weights).unwrap_or_else(|| vec![0.0; metric.surface().num_cusps()]);
    if r.len() != metric.surface().num_cusps() {
        let e = Error::CountMismatch { what: "weights", expected: metric.surface().num_cusps(), got: r.len() };
        rows.push(row("weights", Err(e.to_string())));
        return Ok(rows);
    }

    rows.push(row(
        "admissibility",
        complex::assemble(&metric, &r)
            .map(|_| format!("all {} prisms exist", metric.surface().num_triangles()))
            .map_err(|e| e.to_string()),
    ));

    let state = match complex::delaunayize(&metric, &r) {
        Ok(d) => {
            rows.push(row("convexity", Ok(format!("convex after {} flips", d.flips.len()))));
            d.state
        }
        Err(e) => {
            rows.push(row("convexity", Err(e.to_string())));
            return Ok(rows);
        }
    };
    rows.push(row("lorentz oracle", oracle(&state)));
    rows.push(row("hessian", hessian(&metric, &state)));
    rows.push(row("gauss-bonnet", gauss_bonnet(&state)));
    Ok(rows)
}

fn oracle(state: &ComplexState) -> Result<String, String> {
    let (m, s) = (state.metric(), state.surface());
    let mut worst = 0.0f64;
    for t in 0..s.num_triangles() {
        let l = m.triangle_lengths(t);
        let r = s.triangle_cusps(t).map(|c| state.weights()[c]);
        let p = state.prism(t);
        let e = embed_prism(l, r).map_err(|e| format!("triangle {t}: {e}"))?;
        if !e.is_ultraparallel(ORACLE_TOL) {
            return Err(format!("triangle {t}: prism is not ultraparallel"));
        }
        for i in 0..3 {
            let (j, h) = ((i + 1) % 3, (i + 2) % 3);
            let c = corner_readout(l, r, i).map_err(|e| format!("triangle {t}: {e}"))?;
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
            let lower = [
                hypgeom::lower_edge_length(l[h], r[i], r[j]).map_err(|e| e.to_string())?,
                hypgeom::lower_edge_length(l[j], r[i], r[h]).map_err(|e| e.to_string())?,
            ];
            for err in [
                rel(c.alpha[0], p.alpha[i][0]),
                rel(c.alpha[1], p.alpha[i][1]),
                rel(c.lambda, p.lambda[i]),
                rel(c.lower[0], lower[0]),
                rel(c.lower[1], lower[1]),
                (c.omega - p.omega[i]).abs(),
                (c.phi[0] - p.phi[h]).abs(),
                (c.phi[1] - p.phi[j]).abs(),
            ] {
                worst = worst.max(err);
            }
        }
    }
    if worst <= ORACLE_TOL {
        Ok(format!("closed forms match the embedding within {worst:.1e}"))
    } else {
        Err(format!("closed forms differ from the embedding by {worst:.1e}"))
    }
}

fn hessian(metric: &DecoratedMetric, state: &ComplexState) -> Result<String, String> {
    let x = solver::hessian(state).map_err(|e| e.to_string())?;
    let n = x.nrows();
    let h = 1e-6;
    let kappa = |r: &[f64]| complex::delaunayize(metric, r).map(|d| d.state.kappa().to_vec());
    let scale = x.amax().max(f64::MIN_POSITIVE);
    let (mut fd_err, mut sym_err) = (0.0f64, 0.0f64);
    for j in 0..n {
        let mut plus = state.weights().to_vec();
        let mut minus = plus.clone();
        plus[j] += h;
        minus[j] -= h;
        let (kp, km) = (kappa(&plus).map_err(|e| e.to_string())?, kappa(&minus).map_err(|e| e.to_string())?);
        for i in 0..n {
            fd_err = fd_err.max(((kp[i] - km[i]) / (2.0 * h) - x[(i, j)]).abs() / scale);
            sym_err = sym_err.max((x[(i, j)] - x[(j, i)]).abs());
        }
    }
    if fd_err <= FD_TOL && sym_err <= 1e-10 {
        Ok(format!("finite differences within {fd_err:.1e}, asymmetry {sym_err:.1e}"))
    } else {
        Err(format!("finite-difference error {fd_err:.1e}, asymmetry {sym_err:.1e}"))
    }
}

fn gauss_bonnet(state: &ComplexState) -> Result<String, String> {
    let lower = complex::lower_metric(state).map_err(|e| e.to_string())?;
    let residual = complex::gauss_bonnet_residual(state, &lower);
    if residual.abs() <= GAUSS_BONNET_TOL {
        Ok(format!("residual {residual:.1e}, lower area {:.12}", lower.area()))
    } else {
        Err(format!("residual {residual:.1e}"))
    }
}

pub fn table(rows: &[Row]) -> String {
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in rows {
        let mark = if r.passed { "PASS" } else { "FAIL" };
        out += &format!("{mark}  {:width$}  {}\n", r.name, r.detail);
    }
    out
}
