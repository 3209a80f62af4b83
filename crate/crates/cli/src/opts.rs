//! Flag parsing helpers: complex scalars, grids, sweep paths, and the JSON
//! config-file override.

use num_complex::Complex64;

/// Parse "a+bi" / "a-bi" / "a" / "bi" / "i" forms (also accepting "j").
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.trim().replace(' ', "");
    let t = t.replace('j', "i");
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    // pure real
    if !t.contains('i') {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|e| e.to_string());
    }
    let body = &t[..t.len() - 1];
    if !t.ends_with('i') {
        return Err(format!("'{s}': imaginary unit must be trailing"));
    }
    // split at the last sign that is not an exponent sign and not leading
    let bytes = body.as_bytes();
    let split_at = (1..body.len())
        .rev()
        .find(|&i| {
            (bytes[i] == b'+' || bytes[i] == b'-')
                && bytes[i - 1] != b'e'
                && bytes[i - 1] != b'E'
        });
    match split_at {
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                other => other.parse::<f64>().map_err(|e| e.to_string())?,
            };
            Ok(Complex64::new(0.0, im))
        }
        Some(i) => {
            let re: f64 = body[..i].parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
            let im_str = &body[i..];
            let im = match im_str {
                "+" => 1.0,
                "-" => -1.0,
                other => other.parse::<f64>().map_err(|e| e.to_string())?,
            };
            Ok(Complex64::new(re, im))
        }
    }
}

/// Grid spec "re0:re1:im0:im1:n".
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
    pub n: usize,
}

pub fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() != 5 {
        return Err("grid spec must be re0:re1:im0:im1:n".into());
    }
    let nums: Result<Vec<f64>, _> = parts[..4].iter().map(|p| p.parse::<f64>()).collect();
    let nums = nums.map_err(|e| e.to_string())?;
    let n: usize = parts[4].parse().map_err(|e: std::num::ParseIntError| e.to_string())?;
    if n < 2 || n > 2001 {
        return Err("grid resolution out of bounds 2..=2001".into());
    }
    Ok(GridSpec { re0: nums[0], re1: nums[1], im0: nums[2], im1: nums[3], n })
}

/// Sweep path "a -> b [-> c ...]".
pub fn parse_path(s: &str) -> Result<Vec<Complex64>, String> {
    let pts: Result<Vec<Complex64>, String> = s.split("->").map(parse_complex).collect();
    let pts = pts?;
    if pts.len() < 2 {
        return Err("path needs at least two waypoints".into());
    }
    Ok(pts)
}

/// Contour pair "i,j" with i, j in 0..3 and i != j.
pub fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("pair must be i,j".into());
    }
    let i: usize = parts[0].trim().parse().map_err(|e: std::num::ParseIntError| e.to_string())?;
    let j: usize = parts[1].trim().parse().map_err(|e: std::num::ParseIntError| e.to_string())?;
    if i > 2 || j > 2 || i == j {
        return Err("sector indices must be distinct and in 0..=2".into());
    }
    Ok((i, j))
}

/// Endpoint list "re,im;re,im;..." (pairs of consecutive endpoints form the
/// cuts).
pub fn parse_endpoints(s: &str) -> Result<Vec<Complex64>, String> {
    let pts: Result<Vec<Complex64>, String> = s
        .split(';')
        .map(|p| {
            let xy: Vec<&str> = p.split(',').collect();
            if xy.len() != 2 {
                return Err(format!("endpoint '{p}' must be re,im"));
            }
            let re: f64 = xy[0].trim().parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
            let im: f64 = xy[1].trim().parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
            Ok(Complex64::new(re, im))
        })
        .collect();
    let pts = pts?;
    if pts.len() % 2 != 0 || pts.is_empty() {
        return Err("endpoint list must contain an even number of points".into());
    }
    Ok(pts)
}
