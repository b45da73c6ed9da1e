//! CSV formats for sampled barriers: grid nodes and forbidden-set point
//! clouds. Both have a header row and one row per node.

use crate::barrier::{GridBarrier, SpaceTimeSet};
use crate::error::{domain, Error, Result};
use std::io::{Read, Write};

fn parse_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn read_rows(reader: impl Read, min_cols: usize) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers().map_err(parse_err)?.iter().map(str::to_owned).collect();
    if header.len() < min_cols {
        return Err(Error::Parse(format!("expected at least {min_cols} columns, got {}", header.len())));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(parse_err)?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::Parse(format!("{f:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    Ok((header, rows))
}

/// Sorted distinct values of one column.
fn axis_values(rows: &[Vec<f64>], col: usize) -> Vec<f64> {
    let mut v: Vec<f64> = rows.iter().map(|r| r[col]).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn is_uniform(v: &[f64], lo: f64, hi: f64) -> bool {
    let tol = 1e-9 * (hi - lo).abs().max(1.0);
    let n = v.len() - 1;
    v.iter().enumerate().all(|(i, &x)| (x - (lo + (hi - lo) * i as f64 / n as f64)).abs() <= tol)
}

/// Reads `t,x1,...,xd,phi` rows covering a full uniform grid on
/// `[0, T] × [−R, R]^d` (any row order).
pub fn read_grid_csv(reader: impl Read) -> Result<GridBarrier> {
    let (header, rows) = read_rows(reader, 3)?;
    let dim = header.len() - 2;
    let times = axis_values(&rows, 0);
    let space = axis_values(&rows, 1);
    if times.len() < 2 || space.len() < 2 {
        return domain("grid needs at least two nodes per axis");
    }
    let (horizon, radius) = (times[times.len() - 1], space[space.len() - 1]);
    if times[0] != 0.0 || !is_uniform(&times, 0.0, horizon) {
        return domain("grid times must be uniform on [0, T]");
    }
    for k in 1..=dim {
        let axis = axis_values(&rows, k);
        if axis.len() != space.len() || !is_uniform(&axis, -radius, radius) {
            return domain(format!("grid axis x{k} must be uniform on [-R, R] with the shared node count"));
        }
    }
    let (tn, sn) = (times.len(), space.len());
    let total = tn * sn.pow(dim as u32);
    if rows.len() != total {
        return domain(format!("grid has {} rows, expected {total}", rows.len()));
    }
    let index = |x: f64, lo: f64, hi: f64, n: usize| ((x - lo) / (hi - lo) * (n - 1) as f64).round() as usize;
    let mut values = vec![f64::NAN; total];
    for r in &rows {
        let mut idx = index(r[0], 0.0, horizon, tn);
        for &x in &r[1..=dim] {
            idx = idx * sn + index(x, -radius, radius, sn);
        }
        if !values[idx].is_nan() {
            return domain(format!("duplicate grid node at {:?}", &r[..=dim]));
        }
        values[idx] = r[dim + 1];
    }
    GridBarrier::new(horizon, radius, dim, tn, sn, values)
}

pub fn write_grid_csv(grid: &GridBarrier, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["t".to_string()];
    header.extend((1..=grid.dim()).map(|k| format!("x{k}")));
    header.push("phi".into());
    w.write_record(&header).map_err(parse_err)?;
    for (idx, v) in grid.values().iter().enumerate() {
        let (t, z) = grid.node(idx);
        let mut row = vec![format!("{t:e}")];
        row.extend(z.iter().map(|c| format!("{c:e}")));
        row.push(format!("{v:e}"));
        w.write_record(&row).map_err(parse_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

/// Reads `t,x1,...,xd` rows of a forbidden space-time sample.
pub fn read_point_cloud_csv(reader: impl Read, horizon: f64) -> Result<SpaceTimeSet> {
    let (_, rows) = read_rows(reader, 2)?;
    SpaceTimeSet::new(horizon, rows.into_iter().map(|r| (r[0], r[1..].to_vec())).collect())
}
