//! Continuous barrier fields `Φ(t, z)` describing time-dependent domains
//! `{z : Φ(t, z) < 0}`, and the scalarization `y(t) = Φ(t, x(t))`.

use crate::error::{domain, Result};
use crate::path::{CadlagPath, Segment, VectorPath};

/// Default number of linear pieces per segment when scalarizing against a
/// barrier that has no closed-form composition.
pub const DEFAULT_RESOLUTION: usize = 64;

/// Central-difference step for barriers without a closed-form gradient.
pub const GRADIENT_STEP: f64 = 1e-5;

/// Closed-form boundary families `g(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryFn {
    Constant(f64),
    /// `a + b·t`
    Linear { a: f64, b: f64 },
    /// `a + b·√t`
    Sqrt { a: f64, b: f64 },
}

impl BoundaryFn {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            BoundaryFn::Constant(c) => c,
            BoundaryFn::Linear { a, b } => a + b * t,
            BoundaryFn::Sqrt { a, b } => a + b * t.sqrt(),
        }
    }

    /// Coefficients `(c0, c_t, c_sqrt)` of `c0 + c_t·t + c_sqrt·√t`.
    fn coefficients(&self) -> [f64; 3] {
        match *self {
            BoundaryFn::Constant(c) => [c, 0.0, 0.0],
            BoundaryFn::Linear { a, b } => [a, b, 0.0],
            BoundaryFn::Sqrt { a, b } => [a, 0.0, b],
        }
    }
}

/// `Φ(t, x) = ⟨normal, x⟩ − g(t)`; with `normal = [1]` this is the moving
/// boundary `x − g(t)` in one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineBarrier {
    pub normal: Vec<f64>,
    pub boundary: BoundaryFn,
}

/// Samples on a uniform grid over `[0, T] × [−R, R]^d`, interpolated
/// multilinearly. Axis 0 is time; values are stored with time slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridBarrier {
    horizon: f64,
    radius: f64,
    dim: usize,
    time_nodes: usize,
    space_nodes: usize,
    values: Vec<f64>,
}

impl GridBarrier {
    pub fn new(
        horizon: f64,
        radius: f64,
        dim: usize,
        time_nodes: usize,
        space_nodes: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if !(horizon > 0.0 && radius > 0.0) || dim == 0 || time_nodes < 2 || space_nodes < 2 {
            return domain("grid barrier needs positive extents and at least two nodes per axis");
        }
        let expected = time_nodes * space_nodes.pow(dim as u32);
        if values.len() != expected {
            return domain(format!("grid barrier expects {expected} values, got {}", values.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("grid barrier values must be finite");
        }
        Ok(GridBarrier { horizon, radius, dim, time_nodes, space_nodes, values })
    }

    /// Samples `f` on the grid.
    pub fn from_fn(
        horizon: f64,
        radius: f64,
        dim: usize,
        time_nodes: usize,
        space_nodes: usize,
        f: impl Fn(f64, &[f64]) -> f64,
    ) -> Result<Self> {
        if time_nodes < 2 || space_nodes < 2 {
            return domain("grid barrier needs at least two nodes per axis");
        }
        let total = time_nodes * space_nodes.pow(dim as u32);
        let values = (0..total)
            .map(|idx| {
                let (t, z) = node_coords(idx, horizon, radius, dim, time_nodes, space_nodes);
                f(t, &z)
            })
            .collect();
        Self::new(horizon, radius, dim, time_nodes, space_nodes, values)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn time_nodes(&self) -> usize {
        self.time_nodes
    }

    pub fn space_nodes(&self) -> usize {
        self.space_nodes
    }

    /// Node values, time slowest and the last spatial axis fastest.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Coordinates `(t, z)` of node `idx` in [`GridBarrier::values`] order.
    pub fn node(&self, idx: usize) -> (f64, Vec<f64>) {
        node_coords(idx, self.horizon, self.radius, self.dim, self.time_nodes, self.space_nodes)
    }

    fn axis(&self, x: f64, lo: f64, hi: f64, nodes: usize) -> (usize, f64) {
        let pos = (x - lo) / (hi - lo) * (nodes - 1) as f64;
        let i = (pos.floor() as usize).min(nodes - 2);
        (i, pos - i as f64)
    }

    fn eval(&self, t: f64, z: &[f64]) -> Result<f64> {
        if !(0.0..=self.horizon).contains(&t) || z.iter().any(|c| !(c.abs() <= self.radius)) {
            return domain(format!("({t}, {z:?}) outside the grid box"));
        }
        let mut cells = Vec::with_capacity(self.dim + 1);
        cells.push(self.axis(t, 0.0, self.horizon, self.time_nodes));
        for &c in z {
            cells.push(self.axis(c, -self.radius, self.radius, self.space_nodes));
        }
        let axes = cells.len();
        let mut corners = Vec::with_capacity(1 << axes);
        for mask in 0..(1usize << axes) {
            let mut idx = 0;
            for (k, &(i, _)) in cells.iter().enumerate() {
                let bit = (mask >> (axes - 1 - k)) & 1;
                let n = if k == 0 { self.time_nodes } else { self.space_nodes };
                idx = idx * n + i + bit;
            }
            corners.push(self.values[idx]);
        }
        // collapse the last axis first: corners are ordered with axis 0 as the high bit
        for k in (0..axes).rev() {
            let w = cells[k].1;
            let half = corners.len() / 2;
            let next: Vec<f64> = (0..half)
                .map(|j| {
                    let (a, b) = (corners[2 * j], corners[2 * j + 1]);
                    a + w * (b - a)
                })
                .collect();
            corners = next;
        }
        Ok(corners[0])
    }
}

fn node_coords(
    idx: usize,
    horizon: f64,
    radius: f64,
    dim: usize,
    time_nodes: usize,
    space_nodes: usize,
) -> (f64, Vec<f64>) {
    let mut rest = idx;
    let mut z = vec![0.0; dim];
    for k in (0..dim).rev() {
        let i = rest % space_nodes;
        rest /= space_nodes;
        z[k] = -radius + 2.0 * radius * i as f64 / (space_nodes - 1) as f64;
    }
    (horizon * rest as f64 / (time_nodes - 1) as f64, z)
}

/// A finite sample `{(t_k, z_k)}` of a forbidden space-time set.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeSet {
    horizon: f64,
    dim: usize,
    points: Vec<(f64, Vec<f64>)>,
}

impl SpaceTimeSet {
    pub fn new(horizon: f64, points: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        let Some((_, z0)) = points.first() else {
            return domain("forbidden set sample must be nonempty");
        };
        let dim = z0.len();
        if dim == 0 {
            return domain("points need at least one spatial coordinate");
        }
        for (t, z) in &points {
            if z.len() != dim {
                return domain("points must share one spatial dimension");
            }
            if !(0.0..=horizon).contains(t) || z.iter().any(|c| !c.is_finite()) {
                return domain(format!("sample point ({t}, {z:?}) outside [0, {horizon}] x R^d"));
            }
        }
        Ok(SpaceTimeSet { horizon, dim, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn points(&self) -> &[(f64, Vec<f64>)] {
        &self.points
    }

    fn distance(&self, t: f64, z: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|(s, w)| {
                let dt = t - s;
                dt * dt + z.iter().zip(w).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }
}

/// A continuous barrier `Φ : [0, ∞) × R^d → R`.
#[derive(Clone, Debug, PartialEq)]
pub enum BarrierField {
    Affine(AffineBarrier),
    Grid(GridBarrier),
    Distance(SpaceTimeSet),
    /// `Φ − u`
    Shifted(Box<BarrierField>, f64),
}

impl BarrierField {
    /// One-dimensional moving boundary `Φ(t, x) = x − g(t)`.
    pub fn moving_boundary(g: BoundaryFn) -> Self {
        BarrierField::Affine(AffineBarrier { normal: vec![1.0], boundary: g })
    }

    pub fn affine(normal: Vec<f64>, g: BoundaryFn) -> Result<Self> {
        if normal.is_empty() || normal.iter().any(|c| !c.is_finite()) {
            return domain("affine barrier needs a finite, nonempty normal");
        }
        Ok(BarrierField::Affine(AffineBarrier { normal, boundary: g }))
    }

    /// `Φ − u`; nested shifts collapse into one.
    pub fn shifted(self, u: f64) -> Self {
        match self {
            BarrierField::Shifted(inner, v) => BarrierField::Shifted(inner, v + u),
            other => BarrierField::Shifted(Box::new(other), u),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BarrierField::Affine(a) => a.normal.len(),
            BarrierField::Grid(g) => g.dim,
            BarrierField::Distance(s) => s.dim,
            BarrierField::Shifted(inner, _) => inner.dim(),
        }
    }

    fn check_point(&self, t: f64, z: &[f64]) -> Result<()> {
        if z.len() != self.dim() {
            return domain(format!("point has dimension {}, barrier expects {}", z.len(), self.dim()));
        }
        if !(t >= 0.0) || t.is_infinite() {
            return domain(format!("time {t} outside [0, inf)"));
        }
        Ok(())
    }

    /// `Φ(t, z)`; the point is inside the domain iff this is negative.
    pub fn eval(&self, t: f64, z: &[f64]) -> Result<f64> {
        self.check_point(t, z)?;
        match self {
            BarrierField::Affine(a) => {
                Ok(a.normal.iter().zip(z).map(|(n, x)| n * x).sum::<f64>() - a.boundary.eval(t))
            }
            BarrierField::Grid(g) => g.eval(t, z),
            BarrierField::Distance(s) => {
                if t > s.horizon {
                    return domain(format!("time {t} beyond the sampled horizon {}", s.horizon));
                }
                Ok(-s.distance(t, z))
            }
            BarrierField::Shifted(inner, u) => Ok(inner.eval(t, z)? - u),
        }
    }

    /// Spatial gradient `∇_x Φ(t, z)`, with the finite-difference step used
    /// (`None` when the gradient is closed-form).
    pub fn gradient(&self, t: f64, z: &[f64]) -> Result<(Vec<f64>, Option<f64>)> {
        self.check_point(t, z)?;
        match self {
            BarrierField::Affine(a) => Ok((a.normal.clone(), None)),
            BarrierField::Shifted(inner, _) => inner.gradient(t, z),
            _ => {
                let h = GRADIENT_STEP;
                let mut grad = Vec::with_capacity(z.len());
                let mut probe = z.to_vec();
                for k in 0..z.len() {
                    // stay inside a bounded box by going one-sided at its edge
                    probe[k] = z[k] + h;
                    let (up, hu) = match self.eval(t, &probe) {
                        Ok(v) => (v, h),
                        Err(_) => (self.eval(t, z)?, 0.0),
                    };
                    probe[k] = z[k] - h;
                    let (down, hd) = match self.eval(t, &probe) {
                        Ok(v) => (v, h),
                        Err(_) => (self.eval(t, z)?, 0.0),
                    };
                    probe[k] = z[k];
                    if hu + hd == 0.0 {
                        return domain("gradient stencil leaves the barrier domain");
                    }
                    grad.push((up - down) / (hu + hd));
                }
                Ok((grad, Some(h)))
            }
        }
    }

    /// Affine view: normal, boundary and accumulated level shift.
    fn as_affine(&self) -> Option<(&AffineBarrier, f64)> {
        match self {
            BarrierField::Affine(a) => Some((a, 0.0)),
            BarrierField::Shifted(inner, u) => inner.as_affine().map(|(a, v)| (a, v + u)),
            _ => None,
        }
    }
}

/// The canonical barrier `−dist((t, z), F)` of a sampled forbidden set.
pub fn canonical_barrier(forbidden: SpaceTimeSet) -> Result<BarrierField> {
    if forbidden.is_empty() {
        return domain("forbidden set sample must be nonempty");
    }
    Ok(BarrierField::Distance(forbidden))
}

/// The scalar path `t ↦ Φ(t, x(t))`.
///
/// Exact when `Φ` is affine with a constant or linear boundary (the path is
/// piecewise linear and so is the composition). A `√t` boundary, and any grid
/// or distance barrier, is replaced on every segment of `x` by `resolution`
/// chords through exact values of the composition. Jumps of `x` become jumps
/// of the result at the same times.
pub fn scalarize(x: &VectorPath, barrier: &BarrierField, resolution: usize) -> Result<CadlagPath> {
    if x.dim() != barrier.dim() {
        return domain(format!(
            "path dimension {} does not match barrier dimension {}",
            x.dim(),
            barrier.dim()
        ));
    }
    if x.start() < 0.0 {
        return domain("paths must start at a nonnegative time");
    }
    let resolution = resolution.max(1);
    if let BarrierField::Shifted(inner, u) = barrier {
        return Ok(scalarize(x, inner, resolution)?.shift(-u));
    }
    let start = x.start();
    let end = x.horizon();
    let pts = x.breakpoints();
    let mut segments = Vec::with_capacity(pts.len());

    if let BarrierField::Affine(a) = barrier {
        let comps = x.components();
        // ⟨n, x⟩ is piecewise linear on the merged breakpoints
        let inner_at = |t: f64| -> (f64, f64) {
            let mut v = 0.0;
            let mut s = 0.0;
            for (n, c) in a.normal.iter().zip(comps) {
                let seg = c.segments()[c.segment_index(t)];
                v += n * seg.value_at(t);
                s += n * seg.slope;
            }
            (v, s)
        };
        for w in pts.windows(2) {
            let (p0, p1) = (w[0], w[1]);
            let (v, s) = inner_at(p0);
            match a.boundary {
                BoundaryFn::Constant(c) => segments.push(Segment::linear(p0, v - c, s)),
                BoundaryFn::Linear { a: ga, b: gb } => {
                    segments.push(Segment::linear(p0, v - (ga + gb * p0), s - gb))
                }
                BoundaryFn::Sqrt { .. } => {
                    let f = |t: f64| v + s * (t - p0) - a.boundary.eval(t);
                    push_chords(&mut segments, p0, p1, resolution, f, f(p1));
                }
            }
        }
        let terminal = x.eval(end)?;
        let terminal = a.normal.iter().zip(&terminal).map(|(n, z)| n * z).sum::<f64>()
            - a.boundary.eval(end);
        return CadlagPath::new(start, end, segments, terminal);
    }

    let phi_at = |t: f64, left: bool| -> Result<f64> {
        let z = if left { x.left_limit(t)? } else { x.eval(t)? };
        barrier.eval(t, &z)
    };
    for w in pts.windows(2) {
        let (p0, p1) = (w[0], w[1]);
        let mut nodes = Vec::with_capacity(resolution + 1);
        for j in 0..resolution {
            let t = p0 + (p1 - p0) * j as f64 / resolution as f64;
            nodes.push((t, phi_at(t, false)?));
        }
        nodes.push((p1, phi_at(p1, true)?));
        for k in 0..resolution {
            let (t0, v0) = nodes[k];
            let (t1, v1) = nodes[k + 1];
            segments.push(Segment::linear(t0, v0, (v1 - v0) / (t1 - t0)));
        }
    }
    let terminal = phi_at(end, false)?;
    CadlagPath::new(start, end, segments, terminal)
}

fn push_chords(
    out: &mut Vec<Segment>,
    p0: f64,
    p1: f64,
    pieces: usize,
    f: impl Fn(f64) -> f64,
    left_end: f64,
) {
    let node = |j: usize| p0 + (p1 - p0) * j as f64 / pieces as f64;
    for j in 0..pieces {
        let (t0, t1) = (node(j), if j + 1 == pieces { p1 } else { node(j + 1) });
        let v0 = f(t0);
        let v1 = if j + 1 == pieces { left_end } else { f(t1) };
        out.push(Segment::linear(t0, v0, (v1 - v0) / (t1 - t0)));
    }
}

/// `sup |Φ1 − Φ2|` over `[0, T] × [−R, R]^d`.
///
/// Closed-form when both barriers are affine with the same normal (the
/// difference depends on `t` only); otherwise the maximum over a regular
/// grid with `grid + 1` nodes per axis.
pub fn local_uniform_distance(
    a: &BarrierField,
    b: &BarrierField,
    horizon: f64,
    radius: f64,
    grid: usize,
) -> Result<f64> {
    if a.dim() != b.dim() {
        return domain("barriers have different dimensions");
    }
    if !(horizon > 0.0 && radius > 0.0) {
        return domain("horizon and radius must be positive");
    }
    if let (Some((fa, ua)), Some((fb, ub))) = (a.as_affine(), b.as_affine()) {
        if fa.normal == fb.normal {
            // Φa − Φb = (gb − ga)(t) + (ub − ua) = c0 + c1·t + c2·√t
            let ca = fa.boundary.coefficients();
            let cb = fb.boundary.coefficients();
            let c0 = (cb[0] - ca[0]) + (ub - ua);
            let c1 = cb[1] - ca[1];
            let c2 = cb[2] - ca[2];
            let q = |t: f64| c0 + c1 * t + c2 * t.sqrt();
            let mut d = q(0.0).abs().max(q(horizon).abs());
            if c1 != 0.0 {
                // stationary point in s = √t
                let s = -c2 / (2.0 * c1);
                if s > 0.0 && s * s < horizon {
                    d = d.max(q(s * s).abs());
                }
            }
            return Ok(d);
        }
    }
    let grid = grid.max(1);
    let dim = a.dim();
    let per_axis = grid + 1;
    let total = per_axis.pow(dim as u32 + 1);
    let mut z = vec![0.0; dim];
    let mut d: f64 = 0.0;
    for idx in 0..total {
        let mut rest = idx;
        for c in z.iter_mut().rev() {
            *c = -radius + 2.0 * radius * (rest % per_axis) as f64 / grid as f64;
            rest /= per_axis;
        }
        let t = horizon * rest as f64 / grid as f64;
        d = d.max((a.eval(t, &z)? - b.eval(t, &z)?).abs());
    }
    Ok(d)
}
