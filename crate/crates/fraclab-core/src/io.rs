//! Run artifacts: CSV fields and norm series (RFC-4180-style, `\n` endings,
//! 17-significant-digit floats) and JSON manifests with sorted keys.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::solver::NormSample;

/// 17 significant digits, scientific; round-trips every f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a field as `x1[,x2[,x3]],value` rows in row-major node order.
pub fn write_field(path: &Path, u: &GridFunction) -> Result<()> {
    let spec = u.spec();
    let n = spec.dim();
    let mut out = String::new();
    for axis in 0..n {
        out.push_str(&format!("x{}", axis + 1));
        out.push(',');
    }
    out.push_str("value\n");
    for (flat, v) in u.values().iter().enumerate() {
        let coords = spec.node_coords(flat);
        for c in coords.iter().take(n) {
            out.push_str(&fmt17(*c));
            out.push(',');
        }
        out.push_str(&fmt17(*v));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a field CSV, inferring the grid from the coordinate columns.
pub fn read_field(path: &Path) -> Result<GridFunction> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty field file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.last() != Some(&"value") || cols.len() < 2 || cols.len() > 4 {
        return Err(Error::Parse(format!("unexpected field header `{header}`")));
    }
    let n = cols.len() - 1;
    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != n + 1 {
            return Err(Error::Parse(format!("row {}: expected {} columns", lineno + 2, n + 1)));
        }
        let mut row = Vec::with_capacity(n);
        for part in &parts[..n] {
            row.push(parse_f64(part)?);
        }
        coords.push(row);
        values.push(parse_f64(parts[n])?);
    }
    let total = values.len();
    let per_axis = (total as f64).powf(1.0 / n as f64).round() as usize;
    if per_axis.pow(n as u32) != total {
        return Err(Error::Parse(format!("{total} rows is not a {n}-dimensional grid")));
    }
    let first = coords[0][0];
    let half_width = -first;
    let spec = GridSpec::new(n, half_width, per_axis)?;
    // Sanity: the second row must advance the fastest axis by h.
    let h = spec.spacing();
    if total > 1 {
        let step = coords[1][n - 1] - coords[0][n - 1];
        if (step - h).abs() > 1e-9 * h {
            return Err(Error::Parse(format!(
                "grid spacing mismatch: rows step by {step}, spec implies {h}"
            )));
        }
    }
    GridFunction::from_values(spec, values)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("cannot parse `{s}` as a number")))
}

/// Writes the evolution series: `t,l1,l2,lq,linf,expLp`.
pub fn write_series(path: &Path, series: &[NormSample]) -> Result<()> {
    let mut out = String::from("t,l1,l2,lq,linf,expLp\n");
    for s in series {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt17(s.t),
            fmt17(s.l1),
            fmt17(s.l2),
            fmt17(s.lq),
            fmt17(s.linf),
            fmt17(s.exp_lp)
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// JSON with sorted keys (serde_json maps are ordered), UTF-8, trailing newline.
pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut file = fs::File::create(path)?;
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Parse(format!("json encode: {e}")))?;
    file.write_all(text.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn field_round_trip_1d() {
        let g = make_grid(1, 10.0, 16).unwrap();
        let u = GridFunction::from_fn(g, |x| (x[0] * 0.3).sin());
        let dir = std::env::temp_dir().join("fraclab_io_test_1d");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("field.csv");
        write_field(&path, &u).unwrap();
        let back = read_field(&path).unwrap();
        assert_eq!(u, back);
    }

    #[test]
    fn field_round_trip_2d() {
        let g = make_grid(2, 3.0, 8).unwrap();
        let u = GridFunction::from_fn(g, |x| x[0] + 10.0 * x[1]);
        let dir = std::env::temp_dir().join("fraclab_io_test_2d");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("field.csv");
        write_field(&path, &u).unwrap();
        let back = read_field(&path).unwrap();
        assert_eq!(u, back);
    }

    #[test]
    fn fmt17_round_trips() {
        for x in [0.0, 1.0 / 3.0, -2.5e-17, 6.02e23, f64::MIN_POSITIVE] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }
}
