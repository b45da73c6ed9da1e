//! Sufficient conditions for non-tangency: overshoot by a jump, and a grid
//! certificate for the non-characteristic condition of a diffusion.

use crate::barrier::BarrierField;
use crate::error::{domain, Error, Result};
use crate::first_passage::first_passage;
use crate::path::CadlagPath;
use crate::time::TimeValue;
use rayon::prelude::*;
use serde::Serialize;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return domain(format!("matrix {rows}x{cols} needs {} entries", rows * cols));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut data = vec![0.0; n * n];
        for (i, &e) in entries.iter().enumerate() {
            data[i * n + i] = e;
        }
        Matrix { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// `Aᵀ v`.
    pub fn transpose_mul(&self, v: &[f64]) -> Vec<f64> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j) * v[i]).sum()).collect()
    }

    fn axpy(&mut self, w: f64, other: &Matrix) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += w * b;
        }
    }
}

/// Drift `b(x, t)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Drift {
    Constant(Vec<f64>),
    /// `offset + A x`.
    Affine { offset: Vec<f64>, matrix: Matrix },
}

/// Diffusion coefficient `σ(x, t)`, a `d × m` matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Volatility {
    Constant(Matrix),
    /// `base + Σ_k x_k slopes[k]`.
    Affine { base: Matrix, slopes: Vec<Matrix> },
}

/// `dX = b(X, t) dt + σ(X, t) dW` in `R^d` driven by `m` Brownian motions.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffusionSpec {
    dim: usize,
    drift: Drift,
    volatility: Volatility,
}

impl DiffusionSpec {
    pub fn new(drift: Drift, volatility: Volatility) -> Result<Self> {
        let dim = match &volatility {
            Volatility::Constant(s) => s.rows(),
            Volatility::Affine { base, slopes } => {
                if slopes.len() != base.rows()
                    || slopes.iter().any(|s| s.rows() != base.rows() || s.cols() != base.cols())
                {
                    return domain("affine volatility needs one d x m slope per coordinate");
                }
                base.rows()
            }
        };
        let drift_ok = match &drift {
            Drift::Constant(v) => v.len() == dim,
            Drift::Affine { offset, matrix } => {
                offset.len() == dim && matrix.rows() == dim && matrix.cols() == dim
            }
        };
        if !drift_ok {
            return domain("drift dimension does not match the volatility");
        }
        Ok(DiffusionSpec { dim, drift, volatility })
    }

    /// Scalar Brownian motion with constant volatility `s` and no drift.
    pub fn scalar(s: f64) -> Self {
        DiffusionSpec {
            dim: 1,
            drift: Drift::Constant(vec![0.0]),
            volatility: Volatility::Constant(Matrix::diag(&[s])),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn drift(&self, x: &[f64], _t: f64) -> Vec<f64> {
        match &self.drift {
            Drift::Constant(v) => v.clone(),
            Drift::Affine { offset, matrix } => (0..self.dim)
                .map(|i| offset[i] + (0..self.dim).map(|j| matrix.get(i, j) * x[j]).sum::<f64>())
                .collect(),
        }
    }

    pub fn volatility(&self, x: &[f64], _t: f64) -> Matrix {
        match &self.volatility {
            Volatility::Constant(s) => s.clone(),
            Volatility::Affine { base, slopes } => {
                let mut s = base.clone();
                for (xk, sk) in x.iter().zip(slopes) {
                    s.axpy(*xk, sk);
                }
                s
            }
        }
    }
}

/// The space-time box `[0, T] × [−R, R]^d` with grid counts, restricted to
/// the band `|Φ| ≤ η`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NeighborhoodSpec {
    pub horizon: f64,
    pub eta: f64,
    pub radius: f64,
    pub time_cells: usize,
    pub space_cells: usize,
}

impl NeighborhoodSpec {
    fn validate(&self) -> Result<()> {
        let extents = self.horizon > 0.0 && self.eta > 0.0 && self.radius > 0.0;
        if !extents || self.time_cells == 0 || self.space_cells == 0 {
            return domain("neighborhood needs positive extents and cell counts");
        }
        Ok(())
    }
}

/// Jump-overshoot check: `(true, y(τ))` if the path is strictly above 0 at
/// its first passage of level 0, `(false, 0)` if it arrives exactly at 0.
pub fn route_a_overshoot(y: &CadlagPath) -> Result<(bool, f64)> {
    let TimeValue::Finite(tau) = first_passage(y, 0.0) else {
        return Err(Error::Precondition("path never reaches level 0".into()));
    };
    let at = y.eval_unchecked(tau);
    Ok(if at > 0.0 { (true, at) } else { (false, 0.0) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RouteBReport {
    pub verdict: Verdict,
    pub c: f64,
    /// `min ‖σᵀ∇Φ‖` over grid points in the band.
    pub min_norm: Option<f64>,
    /// `(t, x)` attaining the minimum.
    pub argmin: Option<(f64, Vec<f64>)>,
    pub band_points: usize,
    pub grid_points: usize,
    pub time_cells: usize,
    pub space_cells: usize,
    /// Finite-difference step, if any gradient was not closed-form.
    pub gradient_step: Option<f64>,
}

impl RouteBReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Grid certificate for `‖σ(x, t)ᵀ ∇_x Φ(t, x)‖ ≥ c` on the band
/// `|Φ| ≤ η` of the neighborhood box. PASS is only as fine as the grid.
pub fn route_b_noncharacteristic(
    diffusion: &DiffusionSpec,
    barrier: &BarrierField,
    nbhd: &NeighborhoodSpec,
    c: f64,
) -> Result<RouteBReport> {
    nbhd.validate()?;
    if !(c > 0.0) {
        return domain("threshold c must be positive");
    }
    let d = diffusion.dim();
    if barrier.dim() != d {
        return domain(format!("barrier dimension {} vs diffusion dimension {d}", barrier.dim()));
    }
    let per_axis = nbhd.space_cells + 1;
    let space_points = per_axis
        .checked_pow(d as u32)
        .ok_or_else(|| Error::Domain("grid too large".into()))?;
    let node = |k: usize, cells: usize, lo: f64, hi: f64| lo + (hi - lo) * k as f64 / cells as f64;

    // per time slice: (band count, best (norm, flat index), fd step)
    type Slice = (usize, Option<(f64, usize)>, Option<f64>);
    let slices: Vec<Slice> = (0..=nbhd.time_cells)
        .into_par_iter()
        .map(|it| -> Result<Slice> {
            let t = node(it, nbhd.time_cells, 0.0, nbhd.horizon);
            let mut band = 0;
            let mut best: Option<(f64, usize)> = None;
            let mut step = None;
            let mut x = vec![0.0; d];
            for flat in 0..space_points {
                let mut rest = flat;
                for xi in x.iter_mut() {
                    *xi = node(rest % per_axis, nbhd.space_cells, -nbhd.radius, nbhd.radius);
                    rest /= per_axis;
                }
                if barrier.eval(t, &x)?.abs() > nbhd.eta {
                    continue;
                }
                band += 1;
                let (grad, h) = barrier.gradient(t, &x)?;
                step = step.or(h);
                let v = diffusion.volatility(&x, t).transpose_mul(&grad);
                let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                if best.is_none_or(|(m, _)| norm < m) {
                    best = Some((norm, flat));
                }
            }
            Ok((band, best.map(|(m, f)| (m, it * space_points + f)), step))
        })
        .collect::<Result<_>>()?;

    let band_points = slices.iter().map(|s| s.0).sum();
    let gradient_step = slices.iter().find_map(|s| s.2);
    // first minimum in grid order, independent of scheduling
    let best = slices.iter().filter_map(|s| s.1).fold(None, |acc: Option<(f64, usize)>, cur| match acc {
        Some(a) if a.0 <= cur.0 => Some(a),
        _ => Some(cur),
    });
    let argmin = best.map(|(_, idx)| {
        let (it, mut rest) = (idx / space_points, idx % space_points);
        let t = node(it, nbhd.time_cells, 0.0, nbhd.horizon);
        let x = (0..d)
            .map(|_| {
                let k = rest % per_axis;
                rest /= per_axis;
                node(k, nbhd.space_cells, -nbhd.radius, nbhd.radius)
            })
            .collect();
        (t, x)
    });
    let min_norm = best.map(|b| b.0);
    let verdict = match min_norm {
        None => Verdict::Inconclusive,
        Some(m) if m >= c => Verdict::Pass,
        Some(_) => Verdict::Fail,
    };
    Ok(RouteBReport {
        verdict,
        c,
        min_norm,
        argmin,
        band_points,
        grid_points: (nbhd.time_cells + 1) * space_points,
        time_cells: nbhd.time_cells,
        space_cells: nbhd.space_cells,
        gradient_step,
    })
}
