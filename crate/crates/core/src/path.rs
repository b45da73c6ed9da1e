//! Exact piecewise càdlàg paths on a finite interval.
//!
//! A [`CadlagPath`] is a right-continuous function on `[start, end]` made of
//! constant or linear segments on half-open intervals `[t_i, t_{i+1})`, plus
//! a terminal value at `end`. Every supremum, jump and first passage on such
//! a path has a closed form, so nothing here samples.

use crate::error::{domain, Error, Result};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentKind {
    Constant,
    Linear,
}

/// One piece `t ↦ value + slope·(t − start)` on `[start, next start)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub value: f64,
    pub slope: f64,
}

impl Segment {
    pub fn constant(start: f64, value: f64) -> Self {
        Segment { start, value, slope: 0.0 }
    }

    pub fn linear(start: f64, value: f64, slope: f64) -> Self {
        Segment { start, value, slope }
    }

    pub fn kind(&self) -> SegmentKind {
        if self.slope == 0.0 {
            SegmentKind::Constant
        } else {
            SegmentKind::Linear
        }
    }

    #[inline]
    pub fn value_at(&self, t: f64) -> f64 {
        if self.slope == 0.0 {
            self.value
        } else {
            self.value + self.slope * (t - self.start)
        }
    }
}

/// Right-continuous path with left limits, piecewise constant or linear.
#[derive(Clone, Debug, PartialEq)]
pub struct CadlagPath {
    start: f64,
    end: f64,
    segments: Vec<Segment>,
    terminal: f64,
}

impl CadlagPath {
    /// Builds a path from its segments; the first segment must start at
    /// `start`, segment starts must be strictly increasing and below `end`.
    /// Adjacent segments describing the same piece are merged.
    pub fn new(start: f64, end: f64, segments: Vec<Segment>, terminal: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || end <= start {
            return domain(format!("invalid path domain [{start}, {end}]"));
        }
        if segments.is_empty() {
            return domain("path needs at least one segment");
        }
        if segments[0].start != start {
            return domain("first segment must begin at the domain start");
        }
        for w in segments.windows(2) {
            if !(w[1].start > w[0].start) {
                return domain("segment starts must be strictly increasing");
            }
        }
        if let Some(last) = segments.last() {
            if last.start >= end {
                return domain("segment starts beyond the horizon");
            }
        }
        if segments.iter().any(|s| !s.value.is_finite() || !s.slope.is_finite())
            || !terminal.is_finite()
        {
            return domain("path values must be finite");
        }
        let mut path = CadlagPath { start, end, segments, terminal };
        path.normalize();
        Ok(path)
    }

    pub fn constant(start: f64, end: f64, value: f64) -> Result<Self> {
        Self::new(start, end, vec![Segment::constant(start, value)], value)
    }

    /// `t ↦ value + slope·(t − start)` on `[start, end]`.
    pub fn linear(start: f64, end: f64, value: f64, slope: f64) -> Result<Self> {
        let seg = Segment::linear(start, value, slope);
        Self::new(start, end, vec![seg], seg.value_at(end))
    }

    /// Step function taking `steps[i].1` on `[steps[i].0, steps[i+1].0)`.
    /// The first step must sit at `start`. A step placed exactly at `end`
    /// only sets the terminal value.
    pub fn step(start: f64, end: f64, steps: &[(f64, f64)]) -> Result<Self> {
        let mut segments = Vec::with_capacity(steps.len());
        let mut terminal = None;
        for &(t, v) in steps {
            if t == end {
                terminal = Some(v);
            } else {
                segments.push(Segment::constant(t, v));
            }
        }
        let terminal = match (terminal, segments.last()) {
            (Some(v), _) => v,
            (None, Some(s)) => s.value,
            (None, None) => return domain("step path needs a value before the horizon"),
        };
        Self::new(start, end, segments, terminal)
    }

    /// Continuous piecewise-linear interpolant of `(t, v)` nodes.
    pub fn piecewise_linear(nodes: &[(f64, f64)]) -> Result<Self> {
        if nodes.len() < 2 {
            return domain("piecewise-linear path needs at least two nodes");
        }
        let segments = nodes
            .windows(2)
            .map(|w| {
                let (t0, v0) = w[0];
                let (t1, v1) = w[1];
                Segment::linear(t0, v0, (v1 - v0) / (t1 - t0))
            })
            .collect();
        let (t0, _) = nodes[0];
        let (t1, v1) = nodes[nodes.len() - 1];
        Self::new(t0, t1, segments, v1)
    }

    /// Merges adjacent segments that describe one constant or one linear piece.
    fn normalize(&mut self) {
        let mut merged: Vec<Segment> = Vec::with_capacity(self.segments.len());
        for seg in &self.segments {
            if let Some(prev) = merged.last() {
                if prev.slope == seg.slope && prev.value_at(seg.start) == seg.value {
                    continue;
                }
            }
            merged.push(*seg);
        }
        self.segments = merged;
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    /// Right end of the domain.
    pub fn horizon(&self) -> f64 {
        self.end
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn terminal(&self) -> f64 {
        self.terminal
    }

    /// Segment starts followed by the horizon.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.segments.iter().map(|s| s.start).collect();
        b.push(self.end);
        b
    }

    /// End of segment `i` (start of the next one, or the horizon).
    pub fn segment_end(&self, i: usize) -> f64 {
        self.segments.get(i + 1).map_or(self.end, |s| s.start)
    }

    pub fn is_step(&self) -> bool {
        self.segments.iter().all(|s| s.slope == 0.0)
    }

    pub fn is_nondecreasing(&self) -> bool {
        if self.segments.iter().any(|s| s.slope < 0.0) {
            return false;
        }
        (1..self.segments.len()).all(|i| {
            self.segments[i - 1].value_at(self.segments[i].start) <= self.segments[i].value
        }) && self.left_limit_unchecked(self.end) <= self.terminal
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if t.is_nan() || t < self.start || t > self.end {
            return domain(format!("t = {t} outside [{}, {}]", self.start, self.end));
        }
        Ok(())
    }

    /// Index of the segment whose half-open interval contains `t < end`.
    #[inline]
    pub fn segment_index(&self, t: f64) -> usize {
        self.segments.partition_point(|s| s.start <= t).saturating_sub(1)
    }

    /// Right-continuous value at `t`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(self.eval_unchecked(t))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        if t >= self.end {
            return self.terminal;
        }
        self.segments[self.segment_index(t)].value_at(t)
    }

    /// Limit from the left; at the domain start this is the value there.
    pub fn left_limit(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(self.left_limit_unchecked(t))
    }

    #[inline]
    pub(crate) fn left_limit_unchecked(&self, t: f64) -> f64 {
        if t <= self.start {
            return self.segments[0].value;
        }
        // segment with start < t
        let i = self.segments.partition_point(|s| s.start < t) - 1;
        self.segments[i].value_at(t)
    }

    /// Exact supremum over the interval between `lo` and `hi` with the given
    /// endpoint inclusions. An empty interval yields `f64::NEG_INFINITY`.
    pub fn sup_on_interval(&self, lo: f64, hi: f64, include_lo: bool, include_hi: bool) -> Result<f64> {
        self.check_domain(lo)?;
        self.check_domain(hi)?;
        if lo > hi {
            return domain(format!("empty interval [{lo}, {hi}]"));
        }
        if lo == hi {
            return Ok(if include_lo && include_hi {
                self.eval_unchecked(lo)
            } else {
                f64::NEG_INFINITY
            });
        }
        // the right limit at lo is eval(lo), so the lo endpoint contributes either way
        let mut sup = self.eval_unchecked(lo);
        let first = self.segments.partition_point(|s| s.start <= lo);
        for seg in &self.segments[first..] {
            if seg.start >= hi {
                break;
            }
            sup = sup.max(self.left_limit_unchecked(seg.start)).max(seg.value);
        }
        sup = sup.max(self.left_limit_unchecked(hi));
        if include_hi {
            sup = sup.max(self.eval_unchecked(hi));
        }
        Ok(sup)
    }

    /// Supremum over the whole domain.
    pub fn sup(&self) -> f64 {
        self.sup_on_interval(self.start, self.end, true, true)
            .expect("domain endpoints are in range")
    }

    /// All discontinuities `(t, y(t) − y(t−))`, sorted by time.
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for i in 1..self.segments.len() {
            let t = self.segments[i].start;
            let size = self.segments[i].value - self.segments[i - 1].value_at(t);
            if size != 0.0 {
                out.push((t, size));
            }
        }
        let last = self.segments[self.segments.len() - 1];
        let size = self.terminal - last.value_at(self.end);
        if size != 0.0 {
            out.push((self.end, size));
        }
        out
    }

    /// The path `t ↦ y(t) + c`.
    pub fn shift(&self, c: f64) -> CadlagPath {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment { value: s.value + c, ..*s })
            .collect();
        CadlagPath::new(self.start, self.end, segments, self.terminal + c)
            .expect("shift preserves validity")
    }

    /// The path `t ↦ path(λ(t))`.
    pub fn apply_time_change(&self, lambda: &TimeChange) -> Result<CadlagPath> {
        if lambda.start() != self.start || lambda.end() != self.end {
            return domain("time change and path have different domains");
        }
        // (s, λ(s)) pairs: knots of λ and preimages of the path breakpoints,
        // the latter carrying the exact breakpoint as image.
        let mut pairs: Vec<(f64, f64, bool)> = lambda.knots().iter().map(|&(s, x)| (s, x, false)).collect();
        for seg in &self.segments[1..] {
            pairs.push((lambda.inverse(seg.start), seg.start, true));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.2.cmp(&a.2)));
        pairs.dedup_by(|later, earlier| later.0 == earlier.0);

        let mut segments = Vec::with_capacity(pairs.len());
        for w in pairs.windows(2) {
            let (s0, x0, _) = w[0];
            let (s1, x1, _) = w[1];
            let rate = (x1 - x0) / (s1 - s0);
            let seg = self.segments[self.segment_index(x0)];
            segments.push(Segment::linear(s0, seg.value_at(x0), seg.slope * rate));
        }
        CadlagPath::new(self.start, self.end, segments, self.terminal)
    }

    /// Merged breakpoints of two paths on the same domain.
    fn merged_breakpoints(&self, other: &CadlagPath) -> Vec<f64> {
        let mut pts = self.breakpoints();
        pts.extend(other.breakpoints());
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `sup_t |f(t) − g(t)|` over the common domain, exact.
    pub fn uniform_distance(&self, other: &CadlagPath) -> Result<f64> {
        if self.start != other.start || self.end != other.end {
            return domain("uniform distance needs paths on the same domain");
        }
        let mut d: f64 = 0.0;
        for p in self.merged_breakpoints(other) {
            d = d.max((self.eval_unchecked(p) - other.eval_unchecked(p)).abs());
            d = d.max((self.left_limit_unchecked(p) - other.left_limit_unchecked(p)).abs());
        }
        Ok(d)
    }

    /// Restriction to `[lo, hi]` (a sub-interval of the domain).
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<CadlagPath> {
        self.check_domain(lo)?;
        self.check_domain(hi)?;
        if hi <= lo {
            return domain("restriction needs lo < hi");
        }
        let i0 = self.segment_index(lo);
        let mut segments = vec![Segment {
            start: lo,
            value: self.segments[i0].value_at(lo),
            slope: self.segments[i0].slope,
        }];
        segments.extend(self.segments[i0 + 1..].iter().copied().filter(|s| s.start < hi));
        CadlagPath::new(lo, hi, segments, self.eval_unchecked(hi))
    }

    /// Text record; see [`FromStr`] for the grammar.
    pub fn to_text(&self) -> String {
        let fmt_list = |xs: &mut dyn Iterator<Item = f64>| {
            xs.map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(" ")
        };
        let kinds = self
            .segments
            .iter()
            .map(|s| match s.kind() {
                SegmentKind::Constant => "C",
                SegmentKind::Linear => "L",
            })
            .collect::<Vec<_>>()
            .join(" ");
        format!(
            "start {:.16e}\nhorizon {:.16e}\nbreakpoints {}\nkinds {}\nvalues {}\nslopes {}\nterminal {:.16e}\n",
            self.start,
            self.end,
            fmt_list(&mut self.breakpoints().into_iter()),
            kinds,
            fmt_list(&mut self.segments.iter().map(|s| s.value)),
            fmt_list(&mut self.segments.iter().map(|s| s.slope)),
            self.terminal,
        )
    }
}

impl fmt::Display for CadlagPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses the record written by [`CadlagPath::to_text`]: one `key values...`
/// line each for `start` (optional, default 0), `horizon`, `breakpoints`,
/// `kinds` (`C`/`L`), `values`, `slopes` (optional when all kinds are `C`)
/// and `terminal`. Blank lines and `#` comments are ignored.
impl FromStr for CadlagPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |m: String| Error::Parse(m);
        let mut start = 0.0;
        let mut horizon = None;
        let mut breakpoints = None;
        let mut kinds: Option<Vec<SegmentKind>> = None;
        let mut values = None;
        let mut slopes: Option<Vec<f64>> = None;
        let mut terminal = None;
        let nums = |toks: &[&str]| -> Result<Vec<f64>> {
            toks.iter()
                .map(|t| t.parse::<f64>().map_err(|e| parse_err(format!("bad number {t:?}: {e}"))))
                .collect()
        };
        for line in s.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let (key, rest) = (toks[0], &toks[1..]);
            let single = |v: Vec<f64>| -> Result<f64> {
                match v.as_slice() {
                    [x] => Ok(*x),
                    _ => Err(parse_err(format!("{key} takes one value"))),
                }
            };
            match key {
                "start" => start = single(nums(rest)?)?,
                "horizon" => horizon = Some(single(nums(rest)?)?),
                "terminal" => terminal = Some(single(nums(rest)?)?),
                "breakpoints" => breakpoints = Some(nums(rest)?),
                "values" => values = Some(nums(rest)?),
                "slopes" => slopes = Some(nums(rest)?),
                "kinds" => {
                    kinds = Some(
                        rest.iter()
                            .map(|k| match *k {
                                "C" => Ok(SegmentKind::Constant),
                                "L" => Ok(SegmentKind::Linear),
                                other => Err(parse_err(format!("unknown segment kind {other:?}"))),
                            })
                            .collect::<Result<_>>()?,
                    )
                }
                other => return Err(parse_err(format!("unknown key {other:?}"))),
            }
        }
        let horizon = horizon.ok_or_else(|| parse_err("missing horizon".into()))?;
        let breakpoints = breakpoints.ok_or_else(|| parse_err("missing breakpoints".into()))?;
        let kinds = kinds.ok_or_else(|| parse_err("missing kinds".into()))?;
        let values = values.ok_or_else(|| parse_err("missing values".into()))?;
        let terminal = terminal.ok_or_else(|| parse_err("missing terminal".into()))?;
        let m = kinds.len();
        if breakpoints.len() != m + 1 || values.len() != m {
            return Err(parse_err("breakpoints/kinds/values lengths disagree".into()));
        }
        if breakpoints[0] != start || breakpoints[m] != horizon {
            return Err(parse_err("breakpoints must run from start to horizon".into()));
        }
        let slopes = match slopes {
            Some(s) if s.len() == m => s,
            Some(_) => return Err(parse_err("slopes length disagrees".into())),
            None if kinds.iter().all(|k| *k == SegmentKind::Constant) => vec![0.0; m],
            None => return Err(parse_err("linear segments need slopes".into())),
        };
        let segments = (0..m)
            .map(|i| match kinds[i] {
                SegmentKind::Constant if slopes[i] != 0.0 => {
                    Err(parse_err(format!("constant segment {i} has a slope")))
                }
                _ => Ok(Segment { start: breakpoints[i], value: values[i], slope: slopes[i] }),
            })
            .collect::<Result<Vec<_>>>()?;
        CadlagPath::new(start, horizon, segments, terminal)
    }
}

/// A strictly increasing piecewise-linear bijection of `[a, b]` onto itself.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeChange {
    knots: Vec<(f64, f64)>,
}

impl TimeChange {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return domain("time change needs at least two knots");
        }
        let (a, la) = knots[0];
        let (b, lb) = knots[knots.len() - 1];
        if la != a || lb != b {
            return domain("time change must fix both endpoints");
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) || !(w[1].1 > w[0].1) {
                return domain("time change must be strictly increasing");
            }
        }
        Ok(TimeChange { knots })
    }

    pub fn identity(a: f64, b: f64) -> Self {
        TimeChange { knots: vec![(a, a), (b, b)] }
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn start(&self) -> f64 {
        self.knots[0].0
    }

    pub fn end(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    pub fn eval(&self, s: f64) -> f64 {
        let j = self.knots.partition_point(|k| k.0 <= s).clamp(1, self.knots.len() - 1);
        let (s0, x0) = self.knots[j - 1];
        let (s1, x1) = self.knots[j];
        if s == s0 {
            return x0;
        }
        x0 + (x1 - x0) * (s - s0) / (s1 - s0)
    }

    /// `λ⁻¹(x)`, exact at knot images.
    pub fn inverse(&self, x: f64) -> f64 {
        let j = self.knots.partition_point(|k| k.1 <= x).clamp(1, self.knots.len() - 1);
        let (s0, x0) = self.knots[j - 1];
        let (s1, x1) = self.knots[j];
        if x == x0 {
            return s0;
        }
        if x == x1 {
            return s1;
        }
        s0 + (s1 - s0) * (x - x0) / (x1 - x0)
    }

    /// `sup |λ(s) − s|`, attained at a knot.
    pub fn distortion(&self) -> f64 {
        self.knots.iter().map(|(s, x)| (x - s).abs()).fold(0.0, f64::max)
    }
}

/// A path with values in `R^d`, stored componentwise on a common domain.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorPath {
    components: Vec<CadlagPath>,
}

impl VectorPath {
    pub fn new(components: Vec<CadlagPath>) -> Result<Self> {
        let Some(first) = components.first() else {
            return domain("vector path needs at least one component");
        };
        if components.iter().any(|c| c.start != first.start || c.end != first.end) {
            return domain("vector path components must share a domain");
        }
        Ok(VectorPath { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[CadlagPath] {
        &self.components
    }

    pub fn start(&self) -> f64 {
        self.components[0].start
    }

    pub fn horizon(&self) -> f64 {
        self.components[0].end
    }

    /// Union of all component breakpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.components.iter().flat_map(|c| c.breakpoints()).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.eval(t)).collect()
    }

    pub fn left_limit(&self, t: f64) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.left_limit(t)).collect()
    }
}

impl From<CadlagPath> for VectorPath {
    fn from(p: CadlagPath) -> Self {
        VectorPath { components: vec![p] }
    }
}
