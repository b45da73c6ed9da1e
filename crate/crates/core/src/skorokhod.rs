//! Skorokhod-type comparisons: the canonical parametrization of a monotone
//! path's completed graph, the M1 upper bound it yields, and J1 bounds for
//! piecewise paths.

use crate::error::{domain, Error, Result};
use crate::path::{CadlagPath, Segment, TimeChange};

/// A nondecreasing càdlàg path with finite values.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotonePath(CadlagPath);

impl MonotonePath {
    pub fn new(path: CadlagPath) -> Result<Self> {
        if !path.is_nondecreasing() {
            return domain("path is not nondecreasing");
        }
        let finite = path.segments().iter().all(|s| s.value.is_finite() && s.slope.is_finite())
            && path.terminal().is_finite();
        if !finite {
            return domain("monotone path must have finite values; compactify first");
        }
        Ok(MonotonePath(path))
    }

    pub fn path(&self) -> &CadlagPath {
        &self.0
    }

    pub fn start(&self) -> f64 {
        self.0.start()
    }

    pub fn end(&self) -> f64 {
        self.0.horizon()
    }

    /// `L_g = (b − a) + g(b) − g(a)`.
    pub fn length(&self) -> f64 {
        let g = &self.0;
        (g.horizon() - g.start()) + (g.terminal() - g.segments()[0].value)
    }
}

impl TryFrom<CadlagPath> for MonotonePath {
    type Error = Error;

    fn try_from(path: CadlagPath) -> Result<Self> {
        MonotonePath::new(path)
    }
}

/// `Θ_g(t) = (t − a) + g(t) − g(a)`, strictly increasing, with `L_g = Θ_g(b)`.
pub fn theta(g: &MonotonePath) -> (CadlagPath, f64) {
    let p = g.path();
    let (a, ga) = (p.start(), p.segments()[0].value);
    let segments = p
        .segments()
        .iter()
        .map(|s| Segment::linear(s.start, (s.start - a) + (s.value - ga), 1.0 + s.slope))
        .collect();
    let length = g.length();
    let th = CadlagPath::new(a, p.horizon(), segments, length).expect("theta of a valid path");
    (th, length)
}

/// Piecewise-linear parametrization `ℓ ↦ (r(ℓ), u(ℓ))` of a completed graph
/// over `ℓ ∈ [0, L]`. Beyond `L` it stays at the end point `(b, g(b))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametricRep {
    length: f64,
    /// `(ℓ, r, u)`, strictly increasing in ℓ.
    knots: Vec<(f64, f64, f64)>,
}

impl ParametricRep {
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn knots(&self) -> &[(f64, f64, f64)] {
        &self.knots
    }

    /// Knots with ℓ rescaled to `[0, 1]`.
    pub fn scaled_knots(&self) -> Vec<(f64, f64, f64)> {
        let n = self.knots.len();
        self.knots
            .iter()
            .enumerate()
            .map(|(i, &(l, r, u))| (if i + 1 == n { 1.0 } else { l / self.length }, r, u))
            .collect()
    }

    /// `(r(ℓ), u(ℓ))`, padded with the end point for `ℓ > L`.
    pub fn eval(&self, l: f64) -> (f64, f64) {
        interpolate(&self.knots, l)
    }
}

fn interpolate(knots: &[(f64, f64, f64)], l: f64) -> (f64, f64) {
    let j = knots.partition_point(|k| k.0 <= l);
    if j == 0 {
        return (knots[0].1, knots[0].2);
    }
    if j == knots.len() {
        let last = knots[knots.len() - 1];
        return (last.1, last.2);
    }
    let (l0, r0, u0) = knots[j - 1];
    let (l1, r1, u1) = knots[j];
    if l == l0 {
        return (r0, u0);
    }
    let w = (l - l0) / (l1 - l0);
    (r0 + w * (r1 - r0), u0 + w * (u1 - u0))
}

/// Canonical parametrization: `r = Θ_g⁻¹` (generalized inverse) and
/// `u(ℓ) = g(a) + ℓ − (r(ℓ) − a)`. Knot values of `u` are read off `g`
/// itself (`g(t−)` or `g(t)`), so each knot lies on the completed graph.
pub fn canonical_rep(g: &MonotonePath) -> ParametricRep {
    let p = g.path();
    let segs = p.segments();
    let mut knots = vec![(0.0, p.start(), segs[0].value)];
    let mut l = 0.0;
    let mut push = |knots: &mut Vec<(f64, f64, f64)>, dl: f64, r: f64, u: f64| {
        if dl > 0.0 {
            l += dl;
            knots.push((l, r, u));
        }
    };
    for (i, seg) in segs.iter().enumerate() {
        if i > 0 {
            let pre = segs[i - 1].value_at(seg.start);
            push(&mut knots, seg.value - pre, seg.start, seg.value);
        }
        let end = p.segment_end(i);
        push(&mut knots, (end - seg.start) * (1.0 + seg.slope), end, seg.value_at(end));
    }
    let pre = segs[segs.len() - 1].value_at(p.horizon());
    push(&mut knots, p.terminal() - pre, p.horizon(), p.terminal());
    let length = g.length();
    let last = knots.len() - 1;
    knots[last].0 = length;
    ParametricRep { length, knots }
}

fn sup_distance(a: &[(f64, f64, f64)], b: &[(f64, f64, f64)]) -> f64 {
    let mut ls: Vec<f64> = a.iter().chain(b).map(|k| k.0).collect();
    ls.sort_by(f64::total_cmp);
    ls.dedup();
    ls.into_iter()
        .map(|l| {
            let (ra, ua) = interpolate(a, l);
            let (rb, ub) = interpolate(b, l);
            (ra - rb).abs().max((ua - ub).abs())
        })
        .fold(0.0, f64::max)
}

/// Upper bound on the M1 distance between two monotone paths on the same
/// interval: `‖r_f − r_g‖_∞ ∨ ‖u_f − u_g‖_∞` for their canonical
/// parametrizations, compared both padded in arc length and rescaled to
/// `[0, 1]`; the smaller of the two is returned.
pub fn m1_upper_bound(f: &MonotonePath, g: &MonotonePath) -> Result<f64> {
    if f.start() != g.start() || f.end() != g.end() {
        return domain("M1 comparison needs paths on the same interval");
    }
    let (rf, rg) = (canonical_rep(f), canonical_rep(g));
    let padded = sup_distance(rf.knots(), rg.knots());
    let scaled = sup_distance(&rf.scaled_knots(), &rg.scaled_knots());
    Ok(padded.min(scaled))
}

/// J1 cost of a candidate time change: `‖λ − id‖ ∨ ‖f∘λ − g‖`.
pub fn j1_discrepancy(f: &CadlagPath, g: &CadlagPath, lambda: &TimeChange) -> Result<f64> {
    if f.start() != g.start() || f.horizon() != g.horizon() {
        return domain("J1 comparison needs paths on the same domain");
    }
    let moved = f.apply_time_change(lambda)?;
    Ok(lambda.distortion().max(moved.uniform_distance(g)?))
}

/// Best time change found by [`j1_upper_bound`] and its cost.
#[derive(Clone, Debug, PartialEq)]
pub struct J1Search {
    pub cost: f64,
    pub lambda: TimeChange,
}

/// Candidate grid size per knot move.
const SEARCH_GRID: usize = 16;

/// Upper bound on the J1 distance by coordinate descent over piecewise-linear
/// time changes. Knot positions are `g`'s interior breakpoints plus `knots`
/// equally spaced points; each pass tries moving every knot image to `f`'s
/// breakpoints and to a grid inside its admissible bracket. Starts from the
/// better of the identity and the map sending `g`'s jump times to `f`'s in
/// order (when the counts agree). Deterministic.
pub fn j1_upper_bound(f: &CadlagPath, g: &CadlagPath, knots: usize, iters: usize) -> Result<J1Search> {
    let (a, b) = (g.start(), g.horizon());
    let identity = TimeChange::identity(a, b);
    let mut best = J1Search { cost: j1_discrepancy(f, g, &identity)?, lambda: identity };
    if let Some(aligned) = jump_alignment(f, g) {
        let cost = j1_discrepancy(f, g, &aligned)?;
        if cost < best.cost {
            best = J1Search { cost, lambda: aligned };
        }
    }
    if best.cost == 0.0 {
        return Ok(best);
    }

    let mut positions: Vec<f64> = g.breakpoints().into_iter().filter(|&t| t > a && t < b).collect();
    positions.extend((1..=knots).map(|j| a + (b - a) * j as f64 / (knots + 1) as f64));
    positions.extend(best.lambda.knots().iter().map(|k| k.0).filter(|&t| t > a && t < b));
    positions.sort_by(f64::total_cmp);
    positions.dedup();
    let mut images: Vec<f64> = positions.iter().map(|&s| best.lambda.eval(s)).collect();
    let targets: Vec<f64> = f.breakpoints().into_iter().filter(|&t| t > a && t < b).collect();

    let build = |images: &[f64]| -> Option<TimeChange> {
        let mut k = Vec::with_capacity(images.len() + 2);
        k.push((a, a));
        k.extend(positions.iter().copied().zip(images.iter().copied()));
        k.push((b, b));
        TimeChange::new(k).ok()
    };

    for _ in 0..iters {
        let mut improved = false;
        for j in 0..images.len() {
            let lo = if j == 0 { a } else { images[j - 1] };
            let hi = if j + 1 == images.len() { b } else { images[j + 1] };
            let grid = (1..SEARCH_GRID).map(|i| lo + (hi - lo) * i as f64 / SEARCH_GRID as f64);
            let candidates: Vec<f64> = targets
                .iter()
                .copied()
                .filter(|&x| x > lo && x < hi)
                .chain(grid)
                .collect();
            for x in candidates {
                let old = images[j];
                images[j] = x;
                let lambda = build(&images);
                match lambda {
                    Some(lambda) => {
                        let cost = j1_discrepancy(f, g, &lambda)?;
                        if cost < best.cost {
                            best = J1Search { cost, lambda };
                            improved = true;
                        } else {
                            images[j] = old;
                        }
                    }
                    None => images[j] = old,
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok(best)
}

/// `λ` with `λ(s_k) = t_k` for the interior jump times `s_k` of `g` and
/// `t_k` of `f`, when both have the same number of them.
fn jump_alignment(f: &CadlagPath, g: &CadlagPath) -> Option<TimeChange> {
    let (a, b) = (g.start(), g.horizon());
    let interior = |p: &CadlagPath| -> Vec<f64> {
        p.jumps().into_iter().map(|j| j.0).filter(|&t| t > a && t < b).collect()
    };
    let (tf, tg) = (interior(f), interior(g));
    if tf.is_empty() || tf.len() != tg.len() {
        return None;
    }
    let mut k = vec![(a, a)];
    k.extend(tg.into_iter().zip(tf));
    k.push((b, b));
    TimeChange::new(k).ok()
}

/// Default bisection tolerance for [`j1_lower_bound_step`].
pub const BISECTION_TOL: f64 = 1e-4;

/// Certified lower bound on the J1 distance between two step paths.
///
/// Bisection on δ over a necessary condition for a time change of cost
/// below δ; returns the largest δ found where the condition fails (within
/// `tol`). The condition: every value of either path is within δ of a value
/// the other path takes within time δ, and every jump larger than 2δ is
/// matched, order-preservingly, to a jump of the other path within time δ
/// whose pre- and post-jump values are within δ.
pub fn j1_lower_bound_step(f: &CadlagPath, g: &CadlagPath, tol: f64) -> Result<f64> {
    if !f.is_step() || !g.is_step() {
        return domain("J1 lower bound needs step paths");
    }
    if f.start() != g.start() || f.horizon() != g.horizon() {
        return domain("J1 comparison needs paths on the same domain");
    }
    if !(tol > 0.0) {
        return domain("bisection tolerance must be positive");
    }
    let mut hi = f.uniform_distance(g)?;
    if hi == 0.0 {
        return Ok(0.0);
    }
    let (sf, sg) = (StepView::new(f), StepView::new(g));
    if infeasible(&sf, &sg, hi) {
        return Ok(hi);
    }
    let mut lo = 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if infeasible(&sf, &sg, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Step path as value runs plus a terminal value at `b`.
struct StepView {
    a: f64,
    b: f64,
    /// `(start, end, value)` with the run holding on `[start, end)`.
    runs: Vec<(f64, f64, f64)>,
    terminal: f64,
    /// `(time, pre, post)`; includes a jump at `b` if present.
    jumps: Vec<(f64, f64, f64)>,
}

impl StepView {
    fn new(p: &CadlagPath) -> Self {
        let runs: Vec<_> = p
            .segments()
            .iter()
            .enumerate()
            .map(|(i, s)| (s.start, p.segment_end(i), s.value))
            .collect();
        let mut jumps: Vec<_> = runs.windows(2).map(|w| (w[1].0, w[0].2, w[1].2)).collect();
        let last = runs[runs.len() - 1].2;
        if p.terminal() != last {
            jumps.push((p.horizon(), last, p.terminal()));
        }
        StepView { a: p.start(), b: p.horizon(), runs, terminal: p.terminal(), jumps }
    }

    /// Whether some value taken at a time in the open window
    /// `(c − δ, c + δ)` (closed at the domain ends) is within δ of `v`.
    fn has_close_value(&self, c: f64, delta: f64, v: f64) -> bool {
        let (lo, hi) = (c - delta, c + delta);
        let hit = |w: f64| (w - v).abs() < delta;
        let runs = self.runs.iter().any(|&(s, e, w)| {
            let meets_lo = e > lo || (s <= self.a && lo < self.a);
            s < hi && meets_lo && hit(w)
        });
        runs || (self.b < hi && hit(self.terminal))
    }

    /// Test points with the value there: run starts and midpoints, run
    /// values approached from the left at run ends, and the terminal.
    fn probes(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(3 * self.runs.len() + 1);
        for &(s, e, w) in &self.runs {
            out.push((s, w));
            out.push((0.5 * (s + e), w));
            out.push((e, w));
        }
        out.push((self.b, self.terminal));
        out
    }
}

fn infeasible(f: &StepView, g: &StepView, delta: f64) -> bool {
    let values_fail = |p: &StepView, q: &StepView| p.probes().into_iter().any(|(c, v)| !q.has_close_value(c, delta, v));
    values_fail(f, g) || values_fail(g, f) || !jumps_matchable(f, g, delta) || !jumps_matchable(g, f, delta)
}

/// Greedy order-preserving matching of `p`'s jumps larger than 2δ to
/// compatible jumps of `q`. Earliest-fit is optimal for one-sided interval
/// matching on a line.
fn jumps_matchable(p: &StepView, q: &StepView, delta: f64) -> bool {
    let mut next = 0;
    for &(t, pre, post) in p.jumps.iter().filter(|j| (j.2 - j.1).abs() > 2.0 * delta) {
        let compatible = |&(s, qpre, qpost): &(f64, f64, f64)| {
            (s - t).abs() < delta
                && (s == q.b) == (t == p.b)
                && (qpre - pre).abs() < delta
                && (qpost - post).abs() < delta
        };
        match q.jumps[next..].iter().position(compatible) {
            Some(k) => next += k + 1,
            None => return false,
        }
    }
    true
}
