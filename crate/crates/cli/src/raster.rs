//! Raster exports of an [`EnergyGrid`].

use std::fmt::Write as _;

use jnrlab::energy::EnergyGrid;
use serde_json::{json, Value};

/// `x,y,E` rows in row-major order (`y` outer, ascending), 17 significant digits.
pub fn to_csv(grid: &EnergyGrid, log10: bool) -> String {
    let mut out = String::with_capacity(grid.values.len() * 72);
    out.push_str(if log10 { "x,y,E,log10E\n" } else { "x,y,E\n" });
    for j in 0..grid.ny {
        let y = grid.y(j);
        for i in 0..grid.nx {
            let e = grid.get(i, j);
            write!(out, "{:.16e},{:.16e},{:.16e}", grid.x(i), y, e).unwrap();
            if log10 {
                write!(out, ",{:.16e}", e.log10()).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
/// Parses the `E` column back, in file order.
pub fn parse_csv_values(text: &str) -> Result<Vec<f64>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.starts_with("x,y,E") => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    lines
        .map(|l| {
            l.split(',')
                .nth(2)
                .ok_or_else(|| format!("short row {l:?}"))?
                .parse::<f64>()
                .map_err(|e| e.to_string())
        })
        .collect()
}

/// Binary 16-bit PGM, min-max scaled; the top image row is the largest `y`.
///
/// Returns the bytes and the `(min, max)` used for scaling.
pub fn to_pgm16(grid: &EnergyGrid) -> (Vec<u8>, (f64, f64)) {
    let (lo, hi) = grid.min_max();
    let span = hi - lo;
    let mut out = format!("P5 {} {} 65535\n", grid.nx, grid.ny).into_bytes();
    out.reserve(grid.values.len() * 2);
    for j in (0..grid.ny).rev() {
        for i in 0..grid.nx {
            let v = if span > 0.0 { ((grid.get(i, j) - lo) / span * 65535.0).round() as u16 } else { 0 };
            out.extend_from_slice(&v.to_be_bytes());
        }
    }
    (out, (lo, hi))
}

pub fn to_json(grid: &EnergyGrid) -> Value {
    let rows: Vec<&[f64]> = grid.values.chunks(grid.nx).collect();
    json!({
        "center": [grid.center.re, grid.center.im],
        "half_width": grid.half_width,
        "nx": grid.nx,
        "ny": grid.ny,
        "values": rows,
        "source": grid.source,
        "chart": grid.chart,
    })
}
