use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use scurve::algebra::{BranchedRadical, Polynomial, SpectralCurve};
use scurve::onecut::{cubic_potential, g_cubic_at_minus_beta, solve_cubic_branch};
use scurve::orthopoly::{
    compute_moments, recurrence_from_moments, zeros_of_pn, zeros_vs_cuts, Contour,
};
use scurve::phase::{
    classify_t, critical_t_on_ray, trace_boundary, transition_report, Evidence, Label,
    PhaseContext,
};
use scurve::stokes::{
    sign_map, trace_from_simple_roots, validate_cuts, ReG, Rect, StokesLine, TracerConfig,
};
use scurve::twocut::{continue_in_t, newton_solve, residual as twocut_residual, TwoCutSolution};

use crate::opts;
use crate::output::{
    complex_json, metadata, write_csv_rows, write_json, write_polylines_csv, write_sign_map_pgm,
};
use crate::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(scurve::Error),
    Io(std::io::Error),
}

impl From<scurve::Error> for CliError {
    fn from(e: scurve::Error) -> Self {
        CliError::Numerical(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult = Result<(), CliError>;

/// Values from --config override the flags (documented precedence).
fn config_overrides(path: &Option<PathBuf>) -> Result<Map<String, Value>, CliError> {
    match path {
        None => Ok(Map::new()),
        Some(p) => {
            let text = fs::read_to_string(p)?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("config file: {e}")))?;
            match v {
                Value::Object(m) => Ok(m),
                _ => Err(CliError::Usage("config file must be a JSON object".into())),
            }
        }
    }
}

fn over_str(cfg: &Map<String, Value>, key: &str, flag: String) -> String {
    cfg.get(key).and_then(|v| v.as_str()).map(|s| s.to_string()).unwrap_or(flag)
}

fn over_usize(cfg: &Map<String, Value>, key: &str, flag: usize) -> usize {
    cfg.get(key).and_then(|v| v.as_u64()).map(|v| v as usize).unwrap_or(flag)
}

fn usage<T>(r: Result<T, String>) -> Result<T, CliError> {
    r.map_err(CliError::Usage)
}

pub fn dispatch(cli: Cli) -> CliResult {
    fs::create_dir_all(&cli.out)?;
    let cfg = config_overrides(&cli.config)?;
    match cli.command {
        Command::Onecut { t, k, res } => cmd_onecut(&cli.out, &cfg, t, k, res),
        Command::Twocut { t, seed_file, res } => cmd_twocut(&cli.out, &cfg, t, seed_file, res),
        Command::Stokes { t, k, endpoints, res } => cmd_stokes(&cli.out, &cfg, t, k, endpoints, res),
        Command::Phase { grid, pair, no_boundaries } => {
            cmd_phase(&cli.out, &cfg, grid, pair, no_boundaries)
        }
        Command::Zeros { t, n, pair, digits, dump_moments } => {
            cmd_zeros(&cli.out, &cfg, t, n, pair, digits, dump_moments)
        }
        Command::Sweep { path, steps, pair } => cmd_sweep(&cli.out, &cfg, path, steps, pair),
    }
}

fn label_code(l: &Label) -> i64 {
    match l {
        Label::OneCut(k) => *k as i64,
        Label::TwoCut => 3,
        Label::Boundary => 9,
    }
}

fn stokes_outputs(
    dir: &Path,
    curve: &SpectralCurve,
    re_g: &ReG,
    res: usize,
    meta_comment: &str,
) -> Result<Vec<StokesLine>, CliError> {
    let cfg = TracerConfig::default();
    let lines = trace_from_simple_roots(curve, &cfg)?;
    write_polylines_csv(dir, "stokes.csv", meta_comment, &lines)?;
    let radius = (3.5f64).max(1.8 * curve.scale());
    let map = sign_map(&|z| re_g.eval(z), Rect::centered(radius), res, res, 1e-9);
    write_sign_map_pgm(dir, "signmap.pgm", meta_comment, &map)?;
    Ok(lines)
}

fn cmd_onecut(out: &Path, cfg: &Map<String, Value>, t_flag: String, k_flag: usize, res_flag: usize) -> CliResult {
    let t = usage(opts::parse_complex(&over_str(cfg, "t", t_flag)))?;
    let k = over_usize(cfg, "k", k_flag);
    let res = over_usize(cfg, "res", res_flag);
    if k > 2 {
        return Err(CliError::Usage("branch index must be 0, 1 or 2".into()));
    }
    let canonical = format!("onecut t={t} k={k} res={res}");
    let sol = solve_cubic_branch(t, k)?;
    let w = cubic_potential(t);
    let curve = sol.curve(&w)?;
    let re_g = ReG::OneCut { potential: w.clone(), sol };
    let lines = stokes_outputs(out, &curve, &re_g, res, &canonical)?;
    // is there a short line joining a and b, carrying a positive density?
    let short_ab: Option<&StokesLine> = lines.iter().find(|l| {
        l.is_short()
            && ((l.origin - sol.a).norm() < 1e-3 && (l.endpoint().unwrap() - sol.b).norm() < 1e-3
                || (l.origin - sol.b).norm() < 1e-3
                    && (l.endpoint().unwrap() - sol.a).norm() < 1e-3)
    });
    let valid_cut = short_ab
        .map(|l| validate_cuts(&curve, std::slice::from_ref(l)).is_some())
        .unwrap_or(false);
    let g_ind = g_cubic_at_minus_beta(t, k)?;
    let mut body = Map::new();
    body.insert("t".into(), complex_json(t));
    body.insert("branch_k".into(), json!(k));
    body.insert("beta".into(), complex_json(sol.beta));
    body.insert("delta2".into(), complex_json(sol.delta2));
    body.insert("endpoints".into(), json!([complex_json(sol.a), complex_json(sol.b)]));
    body.insert("cubic_residual".into(), json!(sol.residual));
    body.insert("g_at_minus_beta".into(), complex_json(g_ind));
    body.insert("short_line_ab".into(), json!(short_ab.is_some()));
    body.insert("valid_positive_cut".into(), json!(valid_cut));
    if short_ab.is_none() {
        body.insert("report".into(), json!("no short line a-b"));
    }
    write_json(out, "onecut.json", metadata("onecut", &canonical), body)?;
    Ok(())
}

fn parse_seed_file(path: &Path) -> Result<TwoCutSolution, CliError> {
    let text = fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("seed file: {e}")))?;
    let eps = v
        .get("endpoints")
        .and_then(|e| e.as_array())
        .ok_or_else(|| CliError::Usage("seed file needs an 'endpoints' array".into()))?;
    if eps.len() != 4 {
        return Err(CliError::Usage("seed file must list 4 endpoints".into()));
    }
    let mut pts = [Complex64::default(); 4];
    for (i, e) in eps.iter().enumerate() {
        let pair = e.as_array().ok_or_else(|| CliError::Usage("endpoint must be [re, im]".into()))?;
        let get = |v: &Value| -> Result<f64, CliError> {
            if let Some(f) = v.as_f64() {
                return Ok(f);
            }
            v.as_str()
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| CliError::Usage("endpoint coordinates must be numbers".into()))
        };
        pts[i] = Complex64::new(get(&pair[0])?, get(&pair[1])?);
    }
    Ok(TwoCutSolution::new(pts[0], pts[1], pts[2], pts[3]))
}

fn cmd_twocut(out: &Path, cfg: &Map<String, Value>, t_flag: String, seed_file: Option<PathBuf>, res_flag: usize) -> CliResult {
    let t = usage(opts::parse_complex(&over_str(cfg, "t", t_flag)))?;
    let res = over_usize(cfg, "res", res_flag);
    let canonical = format!("twocut t={t} res={res} seeded={}", seed_file.is_some());
    let sol = match seed_file {
        Some(p) => newton_solve(t, &parse_seed_file(&p)?)?,
        None => {
            let ctx = PhaseContext::default();
            ctx.ensure_catalogue();
            match scurve::phase::try_two_cut(t, (1, 2), &ctx)? {
                Some(s) => s,
                None => {
                    // continuation reached no valid S-configuration; still try
                    // a direct solve from the nearest real-axis anchor
                    let anchor_t = Complex64::new(t.re.clamp(-2.9, -1.02), 0.0);
                    let onecut = solve_cubic_branch(Complex64::new(-1.02, 0.0), 0)?;
                    let seed = scurve::twocut::split_seeds(&onecut, 1e-3)
                        .iter()
                        .find_map(|s| newton_solve(Complex64::new(-1.02, 0.0), s).ok())
                        .ok_or(scurve::Error::NoConvergence { iters: 0, residual: f64::NAN })?;
                    let sols = continue_in_t(&[anchor_t, t], &seed)?;
                    *sols.last().unwrap()
                }
            }
        }
    };
    let res8 = twocut_residual(t, &sol)?;
    let charges = scurve::twocut::cut_charges(&sol)?;
    let w = cubic_potential(t);
    let curve = SpectralCurve::from_potential(&w, sol.radical()?);
    let re_g = ReG::Path { curve: curve.clone() };
    stokes_outputs(out, &curve, &re_g, res, &canonical)?;
    let mut body = Map::new();
    body.insert("t".into(), complex_json(t));
    body.insert(
        "endpoints".into(),
        json!([
            complex_json(sol.a),
            complex_json(sol.b),
            complex_json(sol.c),
            complex_json(sol.d)
        ]),
    );
    body.insert("r".into(), json!(sol.r));
    body.insert("residual_norm".into(), json!(sol.residual_norm));
    body.insert("residual_components".into(), json!(res8.to_vec()));
    body.insert("charges".into(), json!(charges.to_vec()));
    write_json(out, "twocut.json", metadata("twocut", &canonical), body)?;
    Ok(())
}

fn cmd_stokes(
    out: &Path,
    cfg: &Map<String, Value>,
    t: Option<String>,
    k: Option<usize>,
    endpoints: Option<String>,
    res_flag: usize,
) -> CliResult {
    let res = over_usize(cfg, "res", res_flag);
    let (curve, desc) = match (t, endpoints) {
        (Some(ts), None) => {
            let t = usage(opts::parse_complex(&over_str(cfg, "t", ts)))?;
            let k = k.unwrap_or(0);
            let sol = solve_cubic_branch(t, k)?;
            let w = cubic_potential(t);
            (sol.curve(&w)?, format!("stokes cubic t={t} k={k}"))
        }
        (None, Some(es)) => {
            let pts = usage(opts::parse_endpoints(&es))?;
            let pairs: Vec<(Complex64, Complex64)> =
                pts.chunks(2).map(|c| (c[0], c[1])).collect();
            let rad = BranchedRadical::new(pairs)?;
            (
                SpectralCurve::with_h(rad, Polynomial::one()),
                format!("stokes endpoints n={}", pts.len()),
            )
        }
        _ => {
            return Err(CliError::Usage(
                "provide either --t (with optional --k) or --endpoints".into(),
            ))
        }
    };
    let re_g = ReG::Path { curve: curve.clone() };
    let lines = stokes_outputs(out, &curve, &re_g, res, &desc)?;
    let mut body = Map::new();
    body.insert("lines".into(), json!(lines.len()));
    body.insert(
        "terminals".into(),
        json!(lines.iter().map(|l| format!("{:?}", l.terminal)).collect::<Vec<_>>()),
    );
    write_json(out, "stokes.json", metadata("stokes", &desc), body)?;
    Ok(())
}

fn cmd_phase(out: &Path, cfg: &Map<String, Value>, grid_flag: String, pair_flag: String, no_boundaries: bool) -> CliResult {
    let grid = usage(opts::parse_grid(&over_str(cfg, "grid", grid_flag)))?;
    let pair = usage(opts::parse_pair(&over_str(cfg, "pair", pair_flag)))?;
    let canonical = format!(
        "phase grid={}:{}:{}:{}:{} pair={},{}",
        grid.re0, grid.re1, grid.im0, grid.im1, grid.n, pair.0, pair.1
    );
    let ctx = PhaseContext::default();
    ctx.ensure_catalogue();
    let n = grid.n;
    let points: Vec<Complex64> = (0..n * n)
        .map(|idx| {
            let iy = idx / n;
            let ix = idx % n;
            Complex64::new(
                grid.re0 + (grid.re1 - grid.re0) * ix as f64 / (n - 1) as f64,
                grid.im0 + (grid.im1 - grid.im0) * iy as f64 / (n - 1) as f64,
            )
        })
        .collect();
    let labels: Vec<i64> = points
        .par_iter()
        .map(|&t| classify_t(t, pair, &ctx).map(|l| label_code(&l.label)).unwrap_or(-1))
        .collect();
    let rows: Vec<String> = points
        .iter()
        .zip(&labels)
        .map(|(t, l)| format!("{:.17e},{:.17e},{l}", t.re, t.im))
        .collect();
    write_csv_rows(out, "raster.csv", &canonical, "re_t,im_t,label", &rows)?;

    if !no_boundaries {
        let mut rows = Vec::new();
        for k in 0..3usize {
            for theta in [std::f64::consts::PI, std::f64::consts::PI / 3.0, 5.0 * std::f64::consts::PI / 3.0] {
                let seed = match critical_t_on_ray(k, theta, (0.9, 1.1)) {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                if let Ok(b) = trace_boundary(k, seed) {
                    for v in &b.polyline {
                        rows.push(format!("{k},{:.17e},{:.17e}", v.re, v.im));
                    }
                    rows.push(String::new());
                }
            }
        }
        write_csv_rows(out, "boundaries.csv", &canonical, "branch_k,re_t,im_t", &rows)?;
    }
    let mut body = Map::new();
    body.insert("grid".into(), json!([grid.re0, grid.re1, grid.im0, grid.im1, grid.n]));
    body.insert("pair".into(), json!([pair.0, pair.1]));
    body.insert(
        "label_legend".into(),
        json!({"0": "one-cut branch 0", "1": "one-cut branch 1", "2": "one-cut branch 2", "3": "two-cut", "-1": "unclassified"}),
    );
    body.insert(
        "two_cut_count".into(),
        json!(labels.iter().filter(|&&l| l == 3).count()),
    );
    write_json(out, "phase.json", metadata("phase", &canonical), body)?;
    Ok(())
}

fn cmd_zeros(
    out: &Path,
    cfg: &Map<String, Value>,
    t_flag: String,
    n_flag: u32,
    pair_flag: String,
    digits_flag: u32,
    dump_moments: bool,
) -> CliResult {
    let t = usage(opts::parse_complex(&over_str(cfg, "t", t_flag)))?;
    let pair = usage(opts::parse_pair(&over_str(cfg, "pair", pair_flag)))?;
    let n = over_usize(cfg, "n", n_flag as usize) as u32;
    let digits = over_usize(cfg, "digits", digits_flag as usize) as u32;
    let canonical = format!("zeros t={t} n={n} pair={},{} digits={digits}", pair.0, pair.1);
    let w = cubic_potential(t);
    let contour = Contour::cubic_sectors(pair.0, pair.1);
    let table = compute_moments(&w, n, &contour, digits)?;
    if dump_moments {
        let rows: Vec<String> = table
            .moments
            .iter()
            .enumerate()
            .map(|(k, m)| {
                format!(
                    "{k} {} {}",
                    m.re.to_decimal_string(digits),
                    m.im.to_decimal_string(digits)
                )
            })
            .collect();
        write_csv_rows(out, "moments.txt", &canonical, "# k re im", &rows)?;
    }
    let rc = recurrence_from_moments(&table)?;
    let zs = zeros_of_pn(&rc, n as usize)?;
    let rows: Vec<String> = zs
        .zeros
        .iter()
        .enumerate()
        .map(|(i, z)| format!("{:.17e},{:.17e},{i}", z.re, z.im))
        .collect();
    write_csv_rows(out, "zeros.csv", &canonical, "re,im,index", &rows)?;

    // predicted cuts from the phase pipeline
    let ctx = PhaseContext::default();
    let cuts: Vec<Vec<Complex64>> = match classify_t(t, pair, &ctx) {
        Ok(label) => match label.evidence {
            Evidence::OneCut { short, .. } => vec![short.samples],
            Evidence::TwoCut { sol } => {
                let curve = SpectralCurve::from_potential(&w, sol.radical()?);
                let cfg_t = TracerConfig::default();
                let mut cuts = Vec::new();
                for &(p, q) in curve.radical().pairs() {
                    if let Some(line) = scurve::stokes::short_between(&curve, p, q, &cfg_t)? {
                        cuts.push(line.samples);
                    }
                }
                cuts
            }
            Evidence::None => vec![],
        },
        Err(_) => vec![],
    };
    let report = zeros_vs_cuts(&zs, &cuts);
    let mut body = Map::new();
    body.insert("t".into(), complex_json(t));
    body.insert("n".into(), json!(n));
    body.insert("digits".into(), json!(digits));
    body.insert("max_zero_residual".into(), json!(zs.max_residual));
    body.insert("cut_count".into(), json!(cuts.len()));
    body.insert("zeros_per_cut".into(), json!(report.counts));
    body.insert("hausdorff_zeros_to_cuts".into(), json!(report.hausdorff));
    body.insert(
        "per_zero_distance".into(),
        json!(report.nearest.iter().map(|(d, _)| *d).collect::<Vec<f64>>()),
    );
    write_json(out, "comparison.json", metadata("zeros", &canonical), body)?;
    Ok(())
}

fn cmd_sweep(out: &Path, cfg: &Map<String, Value>, path_flag: String, steps_flag: usize, pair_flag: String) -> CliResult {
    let waypoints = usage(opts::parse_path(&over_str(cfg, "path", path_flag)))?;
    let steps = over_usize(cfg, "steps", steps_flag).max(2);
    let pair = usage(opts::parse_pair(&over_str(cfg, "pair", pair_flag)))?;
    let canonical = format!("sweep path={waypoints:?} steps={steps} pair={},{}", pair.0, pair.1);
    // resample the waypoint polyline into `steps` points
    let mut length = 0.0;
    for w in waypoints.windows(2) {
        length += (w[1] - w[0]).norm();
    }
    let mut pts = Vec::with_capacity(steps);
    for i in 0..steps {
        let want = length * i as f64 / (steps - 1) as f64;
        let mut acc = 0.0;
        let mut z = *waypoints.last().unwrap();
        for w in waypoints.windows(2) {
            let seg = (w[1] - w[0]).norm();
            if acc + seg >= want || (acc + seg - want).abs() < 1e-12 {
                z = w[0] + (w[1] - w[0]) * ((want - acc) / seg).clamp(0.0, 1.0);
                break;
            }
            acc += seg;
        }
        pts.push(z);
    }
    let ctx = PhaseContext::default();
    ctx.ensure_catalogue();
    let events = transition_report(&pts, pair, 1e-3, &ctx)?;
    let rows: Vec<String> = pts
        .iter()
        .map(|t| {
            let code = classify_t(*t, pair, &ctx).map(|l| label_code(&l.label)).unwrap_or(-1);
            format!("{:.17e},{:.17e},{code}", t.re, t.im)
        })
        .collect();
    write_csv_rows(out, "log.csv", &canonical, "re_t,im_t,label", &rows)?;
    let ev_json: Vec<Value> = events
        .iter()
        .map(|e| {
            json!({
                "kind": format!("{:?}", e.kind),
                "t_before": complex_json(e.t_before),
                "t_after": complex_json(e.t_after),
                "from": format!("{:?}", e.from),
                "to": format!("{:?}", e.to),
            })
        })
        .collect();
    let mut body = Map::new();
    body.insert("events".into(), json!(ev_json));
    body.insert(
        "kinds".into(),
        json!(events.iter().map(|e| format!("{:?}", e.kind)).collect::<Vec<_>>()),
    );
    body.insert(
        "kind_legend".into(),
        json!(["Split", "Merge", "Birth", "Death", "BranchChange"]),
    );
    write_json(out, "events.json", metadata("sweep", &canonical), body)?;
    Ok(())
}
