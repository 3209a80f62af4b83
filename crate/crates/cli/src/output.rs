//! Structured export: JSON with complex numbers as [re, im] decimal-string
//! pairs, CSV polylines, and portable grey-map sign grids. Every file starts
//! from a metadata object carrying the tool version, a hash of the effective
//! configuration, and the orientation conventions in force.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use scurve::stokes::{SignMap, StokesLine};

pub const SCHEMA_VERSION: &str = "1";

/// FNV-1a over the canonical configuration string.
pub fn config_hash(canonical: &str) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in canonical.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// Complex value as a [re, im] pair of decimal strings (precision-preserving).
pub fn complex_json(z: Complex64) -> Value {
    json!([format!("{:.17e}", z.re), format!("{:.17e}", z.im)])
}

pub fn metadata(command: &str, config_canonical: &str) -> Value {
    json!({
        "version": SCHEMA_VERSION,
        "tool": format!("scurve {}", env!("CARGO_PKG_VERSION")),
        "command": command,
        "config_hash": config_hash(config_canonical),
        "conventions": {
            "endpoint_ordering": "cuts labeled by ascending Im of chord midpoint (ties by Re); endpoints within a pair likewise",
            "cycle_orientation": "A_i = 2 * integral over gap i (b_i -> a_{i+1}); B_i = -2 * sum_{j<=i} integral over cut j, plus-side branch",
            "complex_encoding": "[re, im] decimal strings",
        },
    })
}

pub fn write_json(dir: &Path, name: &str, meta: Value, body: Map<String, Value>) -> std::io::Result<()> {
    let mut root = Map::new();
    root.insert("metadata".into(), meta);
    for (k, v) in body {
        root.insert(k, v);
    }
    let text = serde_json::to_string_pretty(&Value::Object(root))?;
    fs::write(dir.join(name), text + "\n")
}

/// Polyline CSV with columns re, im, re_g, im_g; one header comment line of
/// metadata, one blank-line-separated block per line.
pub fn write_polylines_csv(
    dir: &Path,
    name: &str,
    meta_comment: &str,
    lines: &[StokesLine],
) -> std::io::Result<()> {
    let mut f = fs::File::create(dir.join(name))?;
    writeln!(f, "# {meta_comment}")?;
    writeln!(f, "re,im,re_g,im_g")?;
    for (i, line) in lines.iter().enumerate() {
        if i > 0 {
            writeln!(f)?;
        }
        writeln!(f, "# line {} origin=({:.17e},{:.17e}) terminal={:?}", i, line.origin.re, line.origin.im, line.terminal)?;
        for (z, g) in line.samples.iter().zip(&line.g_samples) {
            writeln!(f, "{:.17e},{:.17e},{:.17e},{:.17e}", z.re, z.im, g.re, g.im)?;
        }
    }
    Ok(())
}

/// Sign map as a plain PGM (P2) grid: 0 for Re G < 0, 128 for the level set,
/// 255 for Re G > 0. Rows run from the top of the bounding box.
pub fn write_sign_map_pgm(dir: &Path, name: &str, meta_comment: &str, map: &SignMap) -> std::io::Result<()> {
    let mut f = fs::File::create(dir.join(name))?;
    writeln!(f, "P2")?;
    writeln!(f, "# {meta_comment}")?;
    writeln!(
        f,
        "# bbox re [{:.6e}, {:.6e}] im [{:.6e}, {:.6e}]",
        map.bbox.x0, map.bbox.x1, map.bbox.y0, map.bbox.y1
    )?;
    writeln!(f, "{} {}", map.nx, map.ny)?;
    writeln!(f, "255")?;
    for iy in (0..map.ny).rev() {
        let row: Vec<String> = (0..map.nx)
            .map(|ix| match map.sign_at(ix, iy) {
                1 => "255".to_string(),
                0 => "128".to_string(),
                _ => "0".to_string(),
            })
            .collect();
        writeln!(f, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn write_csv_rows(dir: &Path, name: &str, meta_comment: &str, header: &str, rows: &[String]) -> std::io::Result<()> {
    let mut f = fs::File::create(dir.join(name))?;
    writeln!(f, "# {meta_comment}")?;
    writeln!(f, "{header}")?;
    for r in rows {
        writeln!(f, "{r}")?;
    }
    Ok(())
}
