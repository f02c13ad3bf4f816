use std::path::{Path, PathBuf};

use jnrlab::energy::{energy_at_pole, pole_limit, sample_grid, total_energy, Quadrature};
use jnrlab::jnr::{detect_grid, make_grid, recover_weights, section_value, verify_grid_on_curve, GridSearch};
use jnrlab::ratmap::{closed_form_map, compare_up_to_phase, projection_coefficients, scattering_map, RationalMap};
use jnrlab::sphere::{invariant_functions, pairing_check, relative_pairing, rotate, sphere_from_jnr, Rotation};
use jnrlab::{roots, spectral_curve, BiPoly, Complex, JnrData, JnrError, ProjPoint, Tolerances};
use rand::SeedableRng;
use serde_json::{json, Map, Value};

use crate::docs::{self, pair, CurveDocument, Input, JnrInputDocument};
use crate::error::CliError;
use crate::raster;
use crate::report::RunReport;

pub struct Context {
    pub tol: Tolerances,
    pub timings: bool,
}

/// What a command hands back to `main`.
pub struct Outcome {
    pub report: RunReport,
    /// Raw bytes destined for stdout instead of a file.
    pub payload: Option<Vec<u8>>,
}

impl Outcome {
    fn report(report: RunReport) -> Self {
        Self { report, payload: None }
    }
}

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8], report: &mut RunReport) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
    report.artifacts.push(path.display().to_string());
    Ok(())
}

fn json_bytes<T: serde::Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("document serializes");
    s.push('\n');
    s.into_bytes()
}

fn load_jnr(bytes: &[u8], ctx: &Context) -> Result<(JnrInputDocument, JnrData), CliError> {
    let doc = docs::parse_jnr(bytes)?;
    let d = doc.to_data(ctx.tol.sep)?;
    Ok((doc, d))
}

fn complex_list(zs: impl IntoIterator<Item = Complex>) -> Value {
    Value::Array(zs.into_iter().map(|z| json!(pair(z))).collect())
}

fn map_json(m: &RationalMap) -> Value {
    json!({
        "num": complex_list(m.num().coeffs().iter().copied()),
        "den": complex_list(m.den().coeffs().iter().copied()),
        "deg_num": m.num().degree(),
        "deg_den": m.den().degree(),
        "value_at_infinity_zero": m.is_based(),
    })
}

fn curve_checks(p: &BiPoly, report: &mut RunReport, tol: &Tolerances) -> (f64, Option<f64>) {
    let reality = p.reality_defect();
    report.check("reality", reality < tol.id, Some(reality), None);
    let min = match p.antidiagonal_profile(200, tol.id) {
        Ok(profile) => {
            let min = profile.iter().copied().fold(f64::INFINITY, f64::min);
            report.check("compactness", min > 0.0, Some(min), None);
            Some(min)
        }
        Err(e) => {
            report.check("compactness", false, None, Some(e.to_string()));
            None
        }
    };
    (reality, min)
}

pub fn curve(input: &Path, out: Option<&Path>, ctx: &Context) -> Result<Outcome, CliError> {
    let bytes = read(input)?;
    let (_, d) = load_jnr(&bytes, ctx)?;
    let mut report = RunReport::new("curve", &bytes, &ctx.tol, ctx.timings);
    let p = report.timed("curve", || spectral_curve(&d));
    let (reality, min) = curve_checks(&p, &mut report, &ctx.tol);
    let grid = verify_grid_on_curve(&p, d.poles(), &ctx.tol);
    report.check("grid", grid.pass, Some(grid.defect), None);
    let doc = CurveDocument::from_curve(&p);
    if let Some(path) = out {
        write(path, &json_bytes(&doc), &mut report)?;
    }
    report.result = json!({
        "curve": doc,
        "reality_defect": reality,
        "antidiagonal_min": min,
        "grid_defect": grid.defect,
    });
    Ok(Outcome::report(report))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Closed,
    Scattering,
    Both,
}

pub fn ratmap(input: &Path, method: Method, ctx: &Context) -> Result<Outcome, CliError> {
    let bytes = read(input)?;
    let (_, d) = load_jnr(&bytes, ctx)?;
    let mut report = RunReport::new("ratmap", &bytes, &ctx.tol, ctx.timings);
    let mut result = Map::new();
    let closed = (method != Method::Scattering).then(|| closed_form_map(&d));
    let scattered = match method {
        Method::Closed => None,
        _ => Some(scattering_map(&d)?),
    };
    for (name, m) in [("closed", &closed), ("scattering", &scattered)] {
        if let Some(m) = m {
            report.check(&format!("{name} based"), m.is_based(), Some(m.value_at_infinity().norm()), None);
            result.insert(name.into(), map_json(m));
        }
    }
    if let (Some(a), Some(b)) = (&closed, &scattered) {
        let cmp = compare_up_to_phase(a, b)?;
        let unimodular = (cmp.constant.norm() - 1.0).abs();
        report.check("ratmap phase", cmp.defect < 1e-8 && unimodular < 1e-8, Some(cmp.defect), None);
        result.insert("phase".into(), json!({ "constant": pair(cmp.constant), "defect": cmp.defect }));
    }
    report.result = Value::Object(result);
    Ok(Outcome::report(report))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Pgm16,
    Json,
}

pub struct EnergyArgs<'a> {
    pub center: Complex,
    pub half_width: f64,
    pub nx: usize,
    pub ny: usize,
    pub format: Format,
    pub out: Option<&'a Path>,
    pub log10: bool,
}

pub fn energy(input: &Path, args: &EnergyArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let bytes = read(input)?;
    let (_, d) = load_jnr(&bytes, ctx)?;
    let mut report = RunReport::new("energy", &bytes, &ctx.tol, ctx.timings);
    let grid = report.timed("raster", || sample_grid(&d, args.center, args.half_width, args.nx, args.ny))?;
    let finite = grid.values.iter().all(|v| v.is_finite() && *v >= 0.0);
    report.check("finite non-negative", finite, None, None);
    let (lo, hi) = grid.min_max();
    let mut result = json!({
        "center": pair(grid.center),
        "half_width": grid.half_width,
        "nx": grid.nx,
        "ny": grid.ny,
        "min": lo,
        "max": hi,
        "source": grid.source,
        "chart": grid.chart,
        "local_maxima": grid.local_maxima().iter().map(|(i, j)| [grid.x(*i), grid.y(*j)]).collect::<Vec<_>>(),
    });
    let data = match args.format {
        Format::Csv => raster::to_csv(&grid, args.log10).into_bytes(),
        Format::Json => json_bytes(&raster::to_json(&grid)),
        Format::Pgm16 => {
            let (data, (lo, hi)) = raster::to_pgm16(&grid);
            result["pgm_scale"] = json!({ "min": lo, "max": hi, "maxval": 65535, "row_order": "y descending" });
            data
        }
    };
    report.result = result;
    match args.out {
        Some(path) => {
            write(path, &data, &mut report)?;
            Ok(Outcome::report(report))
        }
        None => Ok(Outcome { report, payload: Some(data) }),
    }
}

pub fn grid(input: &Path, seed: Option<Complex>, out: Option<&Path>, ctx: &Context) -> Result<Outcome, CliError> {
    let bytes = read(input)?;
    let p = docs::parse_curve(&bytes)?.to_curve()?;
    let mut report = RunReport::new("grid", &bytes, &ctx.tol, ctx.timings);
    let search = match seed {
        Some(_) => GridSearch { lattice: 0, ..GridSearch::default() },
        None => GridSearch::default(),
    };
    let found = report.timed("search", || detect_grid(&p, seed.unwrap_or_default(), &search, &ctx.tol));
    let g = match found {
        Ok(g) => g,
        Err(e @ JnrError::NoGridFound { seeds_tried, best_defect }) => {
            report.check("grid", false, Some(best_defect), Some(e.to_string()));
            report.result = json!({ "seeds_tried": seeds_tried, "best_defect": best_defect });
            return Ok(Outcome::report(report));
        }
        Err(e) => return Err(e.into()),
    };
    let defect = verify_grid_on_curve(&p, g.poles(), &ctx.tol).defect;
    report.check("grid", true, Some(defect), None);
    let d = recover_weights(&p, g.poles(), &ctx.tol)?;
    let back = spectral_curve(&d);
    let round_trip = projective_distance(&p, &back);
    report.check("round trip", round_trip < 1e-8, Some(round_trip), None);
    let doc = JnrInputDocument::from_data(&d, None);
    if let Some(path) = out {
        write(path, &json_bytes(&doc), &mut report)?;
    }
    report.result = json!({ "data": doc, "grid_defect": defect, "round_trip_defect": round_trip });
    Ok(Outcome::report(report))
}

/// `min_c |p - c q| / |p|` over complex `c`, coefficientwise in the max norm.
fn projective_distance(p: &BiPoly, q: &BiPoly) -> f64 {
    let n = p.n();
    let mut cross = Complex::default();
    let mut norm = 0.0;
    for k in 0..=n {
        for l in 0..=n {
            cross += q.coeff(k, l).conj() * p.coeff(k, l);
            norm += q.coeff(k, l).norm_sqr();
        }
    }
    p.relative_distance(&q.scale(cross / norm))
}

pub fn rotate_cmd(input: &Path, a: Complex, b: Complex, out: Option<&Path>, ctx: &Context) -> Result<Outcome, CliError> {
    let bytes = read(input)?;
    let (doc, d) = load_jnr(&bytes, ctx)?;
    let g = Rotation::new(a, b, 1e-6)?;
    let mut report = RunReport::new("rotate", &bytes, &ctx.tol, ctx.timings);
    let r = match rotate(&d, &g) {
        Ok(r) => r,
        Err(e @ JnrError::PoleAtInfinity(_)) => {
            let hint = suggest_pre_rotation(&d, &g)
                .map(|h| format!("; try --a {},{} --b {},{}", h.a().re, h.a().im, h.b().re, h.b().im))
                .unwrap_or_default();
            return Err(CliError::Check(format!("{e}{hint}")));
        }
        Err(e) => return Err(e.into()),
    };
    let rotated = JnrInputDocument::from_data(&r, doc.labels.clone());
    if let Some(path) = out {
        write(path, &json_bytes(&rotated), &mut report)?;
    }
    report.result = json!({ "data": rotated });
    Ok(Outcome::report(report))
}

/// A nearby rotation that keeps every pole finite.
fn suggest_pre_rotation(d: &JnrData, g: &Rotation) -> Option<Rotation> {
    let t = 0.05f64;
    let nudges = [
        Rotation::from_quaternion(t.cos(), t.sin(), 0.0, 0.0),
        Rotation::from_quaternion(t.cos(), 0.0, t.sin(), 0.0),
    ];
    nudges.iter().map(|h| g.compose(h)).find(|h| rotate(d, h).is_ok())
}

pub fn invariants(input: &Path, ctx: &Context) -> Result<Outcome, CliError> {
    let bytes = read(input)?;
    let (_, d) = load_jnr(&bytes, ctx)?;
    let mut report = RunReport::new("invariants", &bytes, &ctx.tol, ctx.timings);
    let values = invariant_functions(&d)?;
    let mut m = Map::new();
    for ((i, j), v) in &values {
        m.insert(format!("({i},{j})"), json!(v));
    }
    report.result = json!({ "count": values.len(), "invariants": m });
    Ok(Outcome::report(report))
}

pub fn verify(input: &Path, all: bool, seed: u64, ctx: &Context) -> Result<Outcome, CliError> {
    let bytes = read(input)?;
    let mut report = RunReport::new("verify", &bytes, &ctx.tol, ctx.timings);
    match docs::parse_any(&bytes)? {
        Input::Jnr(doc) => {
            let d = doc.to_data(ctx.tol.sep)?;
            jnr_suite(&d, all, seed, &mut report, &ctx.tol);
        }
        Input::Curve(doc) => {
            let p = doc.to_curve()?;
            curve_suite(&p, &mut report, &ctx.tol);
        }
    }
    Ok(Outcome::report(report))
}

fn curve_suite(p: &BiPoly, report: &mut RunReport, tol: &Tolerances) {
    curve_checks(p, report, tol);
    if !report.pass {
        return;
    }
    match detect_grid(p, Complex::default(), &GridSearch::default(), tol) {
        Ok(g) => {
            report.check("grid", true, Some(verify_grid_on_curve(p, g.poles(), tol).defect), None);
            match recover_weights(p, g.poles(), tol) {
                Ok(d) => {
                    report.check("weight recovery", true, None, None);
                    report.result = json!({ "data": JnrInputDocument::from_data(&d, None) });
                }
                Err(e) => report.check("weight recovery", false, None, Some(e.to_string())),
            }
        }
        Err(e) => report.check("grid", false, None, Some(e.to_string())),
    }
}

fn max_relative(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    pairs.into_iter().map(|(a, b)| (a - b).abs() / b.abs()).fold(0.0, f64::max)
}

fn jnr_suite(d: &JnrData, all: bool, seed: u64, report: &mut RunReport, tol: &Tolerances) {
    let n = d.charge();
    let p = report.timed("curve", || spectral_curve(d));
    curve_checks(&p, report, tol);

    let grid = verify_grid_on_curve(&p, d.poles(), tol);
    report.check("grid", grid.pass, Some(grid.defect), None);
    match recover_weights(&p, d.poles(), tol) {
        Ok(back) => {
            let err = max_relative(back.weights().iter().copied().zip(d.canonical().weights().iter().copied()));
            report.check("weight recovery", err < 1e-8, Some(err), None);
        }
        Err(e) => report.check("weight recovery", false, None, Some(e.to_string())),
    }

    let mut smallest = f64::INFINITY;
    let mut failure = None;
    for (eta, zeta) in make_grid(d.poles()).expect("validated poles").points() {
        match section_value(d, &eta, &zeta, tol) {
            Ok(v) => smallest = smallest.min(v.value.norm()),
            Err(e) => failure = Some(e.to_string()),
        }
    }
    let section_ok = failure.is_none() && smallest.is_finite() && smallest > tol.id;
    report.check("section", section_ok, Some(smallest), failure);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let pairing = report.timed("pairing", || pairing_check(d, 200, &mut rng));
    report.check("pairing", pairing < 1e-9, Some(pairing), None);
    let on_curve = curve_pairing(d, &p);
    report.check("pairing on curve", on_curve < 1e-8, Some(on_curve), None);

    let fullness = sphere_from_jnr(d).fullness_condition();
    report.check("fullness", fullness.is_finite() && fullness < 1e12, Some(fullness), None);

    let closed = closed_form_map(d);
    match scattering_map(d).and_then(|s| compare_up_to_phase(&closed, &s)) {
        Ok(cmp) => report.check(
            "ratmap phase",
            cmp.defect < 1e-8 && (cmp.constant + 1.0).norm() < 1e-8,
            Some(cmp.defect),
            Some(format!("c = {} {:+}i", cmp.constant.re, cmp.constant.im)),
        ),
        Err(e) => report.check("ratmap phase", false, None, Some(e.to_string())),
    }
    report.check("ratmap based", closed.is_based(), Some(closed.value_at_infinity().norm()), None);
    let proj = projection_coefficients(d);
    let sum = proj.weighted_sum().norm();
    report.check("projection sum", sum < 1e-10, Some(sum), None);

    let q = sphere_from_jnr(d);
    let pole_err = max_relative(d.poles().iter().enumerate().map(|(k, g)| (pole_limit(&q, *g), energy_at_pole(d, k))));
    report.check("pole energy", pole_err < 1e-5, Some(pole_err), None);

    let mut result = json!({ "charge": n });
    if all {
        match report.timed("total energy", || total_energy(d, &Quadrature::default())) {
            Ok(t) => {
                let ratio = t.value / std::f64::consts::PI;
                let err = (ratio - n as f64).abs() / n as f64;
                report.check("total energy", err < 0.01, Some(err), Some(format!("E/pi = {ratio}")));
                result["total_energy_over_pi"] = json!(ratio);
            }
            Err(e) => report.check("total energy", false, None, Some(e.to_string())),
        }
    }
    report.result = result;
}

/// Worst relative pairing at ten points on the curve, from slices at fixed `eta`.
fn curve_pairing(d: &JnrData, p: &BiPoly) -> f64 {
    let q = sphere_from_jnr(&d.canonical());
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for k in 0.. {
        if count >= 10 || k > 40 {
            break;
        }
        let eta = Complex::from_polar(0.4 + 0.15 * k as f64, 2.3 * k as f64);
        let Ok(zs) = roots(&p.slice_eta(&ProjPoint::affine(eta))) else { continue };
        for z in zs.into_iter().take(10 - count) {
            worst = worst.max(relative_pairing(&q, eta, z));
            count += 1;
        }
    }
    worst
}

pub fn out_path(p: &Option<PathBuf>) -> Option<&Path> {
    p.as_deref()
}
