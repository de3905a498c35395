use std::fs;

use serde_json::{json, Value};
use thiserror::Error;

use billiard_core::constants::{
    constants_report_with, fundamental_identity_sweep, half_pi_star_star_printed_step, omega_area_closed,
    omega_for_ngon, trig_sum_sweep, ConstantsReport, TrigSum,
};
use billiard_core::count::{
    calibrate_conventions, format_table, sampled_word_count, sc_count_series_on, threshold_grid, CountSeries,
    DiagonalCounts, LengthKind, SamplingConfig,
};
use billiard_core::error::{ConstantsError, CountError, EnumError, PolygonError};
use billiard_core::geom::PrecisionConfig;
use billiard_core::polygon::{polygon_alias, PolygonSpec};
use billiard_core::real::Real;
use billiard_core::surface::{surface_alias, SurfaceSpec};
use billiard_core::unfold::{enumerate_diagonals, enumerate_saddle_connections, DiagonalConventions, EnumConfig, LengthRule};

use crate::args::*;
use crate::output::{Report, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        1
    }
}

impl From<PolygonError> for CliError {
    fn from(e: PolygonError) -> Self {
        match e {
            PolygonError::InvalidN { .. } | PolygonError::Schema(_) => CliError::Usage(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}

impl From<ConstantsError> for CliError {
    fn from(e: ConstantsError) -> Self {
        match e {
            ConstantsError::InvalidN { .. } | ConstantsError::InvalidM(_) => CliError::Usage(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}

impl From<EnumError> for CliError {
    fn from(e: EnumError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<CountError> for CliError {
    fn from(e: CountError) -> Self {
        match e {
            CountError::EmptyList | CountError::ZeroLength => CliError::Usage(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}

/// A report plus a verification verdict; `Err` means exit code 2.
pub struct Outcome {
    pub report: Report,
    pub verdict: Result<(), String>,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Outcome { report, verdict: Ok(()) }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn f(x: f64) -> String {
    format!("{x:?}")
}

fn progress(msg: impl AsRef<str>) {
    eprintln!("[billiards] {}", msg.as_ref());
}

pub fn enum_config(g: &Global) -> Result<EnumConfig, CliError> {
    let precision = PrecisionConfig::new(g.epsilon, g.digits).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(EnumConfig {
        precision,
        node_budget: g.node_budget,
        threads: None,
    })
}

fn polygon(src: &PolygonSource) -> Result<PolygonSpec, CliError> {
    match (&src.polygon, &src.polygon_file) {
        (Some(name), None) => Ok(polygon_alias(name)?),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
            Ok(PolygonSpec::from_json(&text)?)
        }
        _ => Err(CliError::Usage("give exactly one of --polygon, --polygon-file".into())),
    }
}

fn surface(src: &SurfaceSource) -> Result<(SurfaceSpec, Option<i64>), CliError> {
    match (&src.surface, &src.surface_file) {
        (Some(name), None) => {
            let s = surface_alias(name)?;
            let n = name.strip_prefix("ngon:").and_then(|n| n.parse().ok());
            Ok((s, n))
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
            Ok((SurfaceSpec::from_json(&text)?, None))
        }
        _ => Err(CliError::Usage("give exactly one of --surface, --surface-file".into())),
    }
}

fn series_table(s: &CountSeries) -> Table {
    let mut t = Table::new(&["threshold", "count", "normalized"]);
    for r in &s.rows {
        t.push(vec![f(r.threshold), r.count.to_string(), r.normalized.map(f).unwrap_or_default()]);
    }
    t
}

pub fn constants(a: &ConstantsArgs, g: &Global) -> Result<Outcome, CliError> {
    let (lo, hi) = match (a.n, a.n_range) {
        (Some(n), None) => (n, n),
        (None, Some(r)) => r,
        _ => return Err(CliError::Usage("give exactly one of --n, --n-range".into())),
    };
    if lo < 3 {
        return Err(CliError::Usage(format!("N must be at least 3, got {lo}")));
    }
    let width = enum_config(g)?.precision.width();
    progress(format!("constants for N = {lo}..={hi} at {} digits", width.digits()));
    let reports: Vec<ConstantsReport> = (lo..=hi)
        .map(|n| constants_report_with(n, width))
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&[
        "n",
        "k",
        "parity_class",
        "a_n",
        "r_n",
        "covol",
        "c_geometric",
        "omega_hat_area",
        "omega_hat_area_closed",
        "c_comb",
        "sigma_n",
        "c_n_pipeline",
        "c_n_closed",
        "c_n",
        "index_two_special_case",
        "limit_ratio",
        "dual_route_rel_err",
    ]);
    for r in &reports {
        table.push(vec![
            r.n.to_string(),
            r.k.to_string(),
            to_json(&r.parity_class).as_str().unwrap_or_default().to_string(),
            f(r.a_n),
            f(r.r_n),
            f(r.covol),
            f(r.c_geometric),
            f(r.omega_hat_area),
            f(r.omega_hat_area_closed),
            f(r.c_comb),
            f(r.sigma_n),
            f(r.c_n_pipeline),
            f(r.c_n_closed),
            f(r.c_n),
            r.index_two_special_case.to_string(),
            f(r.limit_ratio),
            f(r.dual_route_rel_err),
        ]);
    }
    let failing: Vec<String> = reports
        .iter()
        .filter(|r| !r.passes())
        .map(|r| {
            format!(
                "N={:<5} closed={:<24} pipeline={:<24} rel_err={:e}",
                r.n, r.c_n_closed, r.c_n_pipeline, r.dual_route_rel_err
            )
        })
        .collect();
    let json = if reports.len() == 1 {
        to_json(&reports[0])
    } else {
        to_json(&reports)
    };
    Ok(Outcome {
        report: Report { json, table },
        verdict: if failing.is_empty() {
            Ok(())
        } else {
            Err(format!("dual-route check failed:\n{}", failing.join("\n")))
        },
    })
}

const IDENTITY_TOL: f64 = 1e-9;

pub fn identities(a: &IdentitiesArgs) -> Result<Outcome, CliError> {
    if a.m_max < 2 {
        return Err(CliError::Usage(format!("--m-max must be at least 2, got {}", a.m_max)));
    }
    if a.k_max < 1 {
        return Err(CliError::Usage(format!("--k-max must be at least 1, got {}", a.k_max)));
    }
    progress(format!("identities up to m = {}, k = {}", a.m_max, a.k_max));
    let fi = fundamental_identity_sweep(a.m_max)?;
    let sums = trig_sum_sweep(a.k_max);
    let mut rows: Vec<Value> = vec![];
    let mut table = Table::new(&["identity", "relevant_to", "cases", "max_rel_err", "status"]);
    let mut failed = vec![];
    let mut push = |name: &str, rel: &str, cases: usize, err: f64, status: &str| {
        rows.push(json!({ "identity": name, "relevant_to": rel, "cases": cases, "max_rel_err": err, "status": status }));
        table.push(vec![name.into(), rel.into(), cases.to_string(), f(err), status.into()]);
    };
    let worst = fi.iter().map(|r| r.rel_err).fold(0.0, f64::max);
    let status = if worst < IDENTITY_TOL { "pass" } else { "fail" };
    if status == "fail" {
        failed.push("fundamental".to_string());
    }
    push("fundamental", "all", fi.len(), worst, status);
    for s in TrigSum::ALL {
        let rs: Vec<_> = sums.iter().filter(|r| r.sum == s).collect();
        let worst = rs.iter().map(|r| r.rel_err).fold(0.0, f64::max);
        let status = if worst < IDENTITY_TOL { "pass" } else { "fail" };
        let name = to_json(&s).as_str().unwrap_or_default().to_string();
        if status == "fail" {
            failed.push(name.clone());
        }
        let rel = to_json(&s.parity_class()).as_str().unwrap_or_default().to_string();
        push(&name, &rel, rs.len(), worst, status);
    }
    // The printed intermediate step is off by a constant 1/3; shown, not gated.
    let worst = (1..=a.k_max)
        .map(|k| {
            let printed: f64 = half_pi_star_star_printed_step(k);
            let direct: f64 = TrigSum::HalfPiStarStar.direct::<f64>(k);
            ((printed - direct) / direct).abs()
        })
        .fold(0.0, f64::max);
    push("HalfPiStarStar printed step ((2k+1)^2-3)/6", "odd", a.k_max as usize, worst, "documented-discrepancy");
    Ok(Outcome {
        report: Report {
            json: json!({ "tolerance": IDENTITY_TOL, "identities": rows }),
            table,
        },
        verdict: if failed.is_empty() {
            Ok(())
        } else {
            Err(format!("identities above tolerance: {}", failed.join(", ")))
        },
    })
}

fn max_bounces(n: usize, c: &DiagonalConventions) -> Option<usize> {
    match c.length {
        LengthRule::Bounces => Some(n),
        LengthRule::Tiles => n.checked_sub(1),
    }
}

pub fn diagonals(a: &DiagonalsArgs, g: &Global) -> Result<Outcome, CliError> {
    let p = polygon(&a.source)?;
    let cfg = enum_config(g)?;
    let conv = a.conventions.conventions();
    progress(format!("diagonals of {} up to length {} ({conv})", p.name(), a.n));
    if !a.items {
        let counts = DiagonalCounts::compute(&p, a.n, &conv, &cfg)?;
        let s = counts.diagonal_series();
        return Ok(Outcome::ok(Report {
            table: series_table(&s),
            json: to_json(&s),
        }));
    }
    let items = match max_bounces(a.n, &conv) {
        Some(b) => enumerate_diagonals(&p, b, &conv, &cfg)?.0,
        None => enumerate_diagonals(&p, 0, &conv, &cfg)?
            .0
            .into_iter()
            .filter(|d| d.boundary)
            .collect(),
    };
    let mut table = Table::new(&[
        "start_corner",
        "end_corner",
        "bounce_count",
        "combinatorial_length",
        "word",
        "holonomy_x",
        "holonomy_y",
        "geometric_length",
        "boundary",
    ]);
    let mut records = vec![];
    for d in &items {
        let len = if d.boundary { 0 } else { conv.interior_length(d.bounce_count) };
        let word = d.labels(&p).join(" ");
        table.push(vec![
            d.start_corner.to_string(),
            d.end_corner.to_string(),
            d.bounce_count.to_string(),
            len.to_string(),
            word.clone(),
            f(d.holonomy.x),
            f(d.holonomy.y),
            f(d.geometric_length),
            d.boundary.to_string(),
        ]);
        let mut v = to_json(d);
        v["combinatorial_length"] = json!(len);
        v["word"] = json!(word);
        records.push(v);
    }
    Ok(Outcome::ok(Report {
        json: json!({ "polygon": p.name(), "conventions": conv, "count": items.len(), "diagonals": records }),
        table,
    }))
}

pub fn complexity(a: &ComplexityArgs, g: &Global) -> Result<Outcome, CliError> {
    if a.t == 0 {
        return Err(CliError::Usage("--t must be at least 1".into()));
    }
    let p = polygon(&a.source)?;
    let cfg = enum_config(g)?;
    let conv = a.conventions.conventions();
    progress(format!("complexity of {} up to t = {} ({conv})", p.name(), a.t));
    let counts = DiagonalCounts::compute(&p, a.t - 1, &conv, &cfg)?;
    if a.series {
        let s = counts.complexity_series();
        return Ok(Outcome::ok(Report {
            table: series_table(&s),
            json: to_json(&s),
        }));
    }
    let rho = counts.rho(a.t);
    let mut table = Table::new(&["t", "rho"]);
    table.push(vec![a.t.to_string(), rho.to_string()]);
    Ok(Outcome::ok(Report {
        json: json!({ "polygon": p.name(), "conventions": conv, "t": a.t, "rho": rho }),
        table,
    }))
}

/// Limit of the normalized column for `S_N`, when known.
fn convergence_target(n: Option<i64>, kind: LengthKind, g: &Global) -> Result<Option<f64>, CliError> {
    let Some(n) = n.filter(|&n| n >= 5) else {
        return Ok(None);
    };
    let r = constants_report_with(n, enum_config(g)?.precision.width())?;
    let native_area = if n % 2 == 0 { r.a_n } else { 2.0 * r.a_n };
    Ok(Some(match kind {
        LengthKind::Geometric => native_area * r.c_geometric,
        LengthKind::Combinatorial | LengthKind::Regularized => r.c_comb,
    }))
}

pub fn converge(a: &ConvergeArgs, g: &Global) -> Result<Outcome, CliError> {
    if !(a.lmax > 0.0) || a.points == 0 {
        return Err(CliError::Usage("--lmax must be positive and --points nonzero".into()));
    }
    let (s, n) = surface(&a.source)?;
    let cfg = enum_config(g)?;
    let kind = a.length.kind();
    progress(format!("{:?} counts on {} up to L = {}", kind, s.name(), a.lmax));
    let series = sc_count_series_on(&s, &threshold_grid(a.lmax, a.points), kind, &cfg)?;
    let target = convergence_target(n, kind, g)?;
    let last = series.last_normalized();
    let rel_dev = match (last, target) {
        (Some(l), Some(t)) => Some((l - t).abs() / t),
        _ => None,
    };
    let mut table = Table::new(&["threshold", "count", "normalized", "target"]);
    for r in &series.rows {
        table.push(vec![
            f(r.threshold),
            r.count.to_string(),
            r.normalized.map(f).unwrap_or_default(),
            target.map(f).unwrap_or_default(),
        ]);
    }
    let verdict = match (a.tolerance, rel_dev) {
        (Some(tol), Some(d)) if d > tol => Err(format!("last normalized value is {d:.4} from the target, above {tol}")),
        (Some(_), None) => Err("no target known for this surface".into()),
        _ => Ok(()),
    };
    Ok(Outcome {
        report: Report {
            json: json!({ "series": series, "target": target, "last_normalized": last, "rel_dev": rel_dev, "monotone": series.is_monotone() }),
            table,
        },
        verdict,
    })
}

pub fn saddles(a: &SaddlesArgs, g: &Global) -> Result<Outcome, CliError> {
    if !(a.lmax > 0.0) {
        return Err(CliError::Usage("--lmax must be positive".into()));
    }
    let (s, _) = surface(&a.source)?;
    let cfg = enum_config(g)?;
    progress(format!("saddle connections of {} with length at most {}", s.name(), a.lmax));
    let (items, stats) = enumerate_saddle_connections(&s, a.lmax, &cfg)?;
    let mut table = Table::new(&[
        "start_copy",
        "start_vertex",
        "end_copy",
        "end_vertex",
        "start_point",
        "end_point",
        "holonomy_x",
        "holonomy_y",
        "length_geometric",
        "length_combinatorial",
        "length_regularized",
        "crossings_per_class",
        "filling_class",
    ]);
    for sc in &items {
        table.push(vec![
            sc.start.0.to_string(),
            sc.start.1.to_string(),
            sc.end.0.to_string(),
            sc.end.1.to_string(),
            sc.start_point.to_string(),
            sc.end_point.to_string(),
            f(sc.holonomy.x),
            f(sc.holonomy.y),
            f(sc.length_geometric),
            sc.length_combinatorial.to_string(),
            f(sc.length_regularized),
            sc.crossings_per_class.iter().map(u32::to_string).collect::<Vec<_>>().join(";"),
            sc.filling_class.map(|c| c.to_string()).unwrap_or_default(),
        ]);
    }
    Ok(Outcome::ok(Report {
        json: json!({ "surface": s.name(), "count": items.len(), "nodes": stats.nodes, "saddle_connections": items }),
        table,
    }))
}

pub fn omega(a: &OmegaArgs) -> Result<Outcome, CliError> {
    if a.n < 3 {
        return Err(CliError::Usage(format!("N must be at least 3, got {}", a.n)));
    }
    let o = omega_for_ngon::<f64>(a.n)?;
    let closed: f64 = omega_area_closed(a.n)?;
    let rel_err = (o.area - closed).abs() / closed;
    let defect = o.vertex_defect();
    let mut table = Table::new(&["x", "y"]);
    for v in &o.vertices {
        table.push(vec![f(v.x), f(v.y)]);
    }
    let ok = rel_err < 1e-9 && defect < 1e-9 && o.is_convex() && o.is_centrally_symmetric();
    Ok(Outcome {
        report: Report {
            json: json!({
                "n": a.n,
                "vertices": o.vertices,
                "tau": o.tau,
                "area": o.area,
                "area_closed": closed,
                "area_rel_err": rel_err,
                "vertex_defect": defect,
                "convex": o.is_convex(),
                "centrally_symmetric": o.is_centrally_symmetric(),
                "circumradius": o.circumradius().to_f64(),
            }),
            table,
        },
        verdict: if ok {
            Ok(())
        } else {
            Err(format!("omega region check failed: area rel err {rel_err:e}, vertex defect {defect:e}"))
        },
    })
}

pub fn words(a: &WordsArgs) -> Result<Outcome, CliError> {
    if a.t == 0 {
        return Err(CliError::Usage("--t must be at least 1".into()));
    }
    let p = polygon(&a.source)?;
    progress(format!("sampling {} orbits of {} for t = {}", a.samples, p.name(), a.t));
    let w = sampled_word_count(&p, a.t, a.samples, a.seed)?;
    let mut table = Table::new(&["word", "sample_index", "side", "x", "y", "dx", "dy"]);
    for s in &w.words {
        let word: Vec<&str> = s.word.iter().map(|&i| p.side_labels()[i as usize].as_str()).collect();
        table.push(vec![
            word.join(" "),
            s.witness.sample_index.to_string(),
            s.witness.side.to_string(),
            f(s.witness.position.x),
            f(s.witness.position.y),
            f(s.witness.direction.x),
            f(s.witness.direction.y),
        ]);
    }
    Ok(Outcome::ok(Report {
        json: json!({ "polygon": p.name(), "count": w.count(), "sample": w }),
        table,
    }))
}

pub fn calibrate(a: &CalibrateArgs, g: &Global) -> Result<Outcome, CliError> {
    let polys: Vec<PolygonSpec> = a
        .polygons
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| polygon_alias(s))
        .collect::<Result<_, _>>()?;
    let cfg = enum_config(g)?;
    let sampling = SamplingConfig {
        seed: a.seed,
        initial_samples: a.initial_samples,
        max_samples: a.max_samples,
    };
    progress(format!("calibrating on {} polygon(s) for t <= {}", polys.len(), a.t_max));
    match calibrate_conventions(&polys, a.t_max, &sampling, &cfg) {
        Ok(c) => {
            let mut table = Table::new(&["polygon", "conventions", "t", "rho", "sampled", "match"]);
            for r in &c.table {
                table.push(vec![
                    r.polygon.clone(),
                    r.conventions.to_string(),
                    r.t.to_string(),
                    r.rho.to_string(),
                    r.sampled.to_string(),
                    (r.rho == r.sampled).to_string(),
                ]);
            }
            progress(format!("calibration table:\n{}", format_table(&c.table)));
            let admissible: Vec<String> = c.admissible.iter().map(ToString::to_string).collect();
            Ok(Outcome::ok(Report {
                json: json!({ "admissible": admissible, "unique": c.is_unique(), "chosen": c.chosen().to_string(), "calibration": c }),
                table,
            }))
        }
        Err(CountError::CalibrationFailed { table }) => Ok(Outcome {
            report: Report {
                json: json!({ "admissible": [], "table": table }),
                table: Table::new(&["polygon", "conventions", "t", "rho", "sampled", "match"]),
            },
            verdict: Err(format!("no convention matches the sampled counts:\n{table}")),
        }),
        Err(e) => Err(e.into()),
    }
}
