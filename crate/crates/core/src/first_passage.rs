//! First-passage times, exit times, exit-time profiles and the
//! non-tangency checker.

use crate::barrier::{scalarize, BarrierField, DEFAULT_RESOLUTION};
use crate::error::{domain, Error, Result};
use crate::path::{CadlagPath, Segment, VectorPath};
use crate::time::{compactify, TimeValue};
use serde::Serialize;

/// `inf{t : y(t) ≥ u}`, or `Infinite` if the level is never reached on the
/// path's domain. Ties count: touching `u` exactly is a passage.
pub fn first_passage(y: &CadlagPath, u: f64) -> TimeValue {
    for (i, seg) in y.segments().iter().enumerate() {
        if seg.value >= u {
            return TimeValue::Finite(seg.start);
        }
        if seg.slope > 0.0 {
            let end = y.segment_end(i);
            if seg.value_at(end) > u {
                let t = seg.start + (u - seg.value) / seg.slope;
                return TimeValue::Finite(t.clamp(seg.start, end));
            }
        }
    }
    if y.terminal() >= u {
        TimeValue::Finite(y.horizon())
    } else {
        TimeValue::Infinite
    }
}

/// Exit time `inf{t : Φ(t, x(t)) ≥ 0}` of `x` from the domain `{Φ < 0}`.
pub fn exit_time(x: &VectorPath, barrier: &BarrierField) -> Result<TimeValue> {
    let y = scalarize(x, barrier, DEFAULT_RESOLUTION)?;
    Ok(first_passage(&y, 0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum LevelMap {
    /// A single exit time for the whole level interval.
    At(TimeValue),
    /// `τ(u) = t0 + (u − v0) / slope` within `[t0, t1]`: the path sweeps the
    /// levels continuously along a rising linear segment.
    Ramp { t0: f64, t1: f64, v0: f64, slope: f64 },
}

impl LevelMap {
    fn eval(&self, u: f64) -> TimeValue {
        match *self {
            LevelMap::At(t) => t,
            LevelMap::Ramp { t0, t1, v0, slope } => {
                TimeValue::Finite((t0 + (u - v0) / slope).clamp(t0, t1))
            }
        }
    }
}

/// One interval of levels with its exit-time law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelPiece {
    pub lo: f64,
    pub lo_closed: bool,
    pub hi: f64,
    pub hi_closed: bool,
    pub map: LevelMap,
}

impl LevelPiece {
    fn covers_up_to(&self, u: f64) -> bool {
        u < self.hi || (u == self.hi && self.hi_closed)
    }
}

/// The profile `u ↦ T_y(u)` on a level interval `[u0, u1]`.
///
/// Nondecreasing. [`ExitProfile::value_at`] returns the first-passage time
/// itself, which is left-continuous at levels where the profile jumps;
/// [`ExitProfile::to_cadlag`] gives the right-continuous modification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExitProfile {
    u0: f64,
    u1: f64,
    pieces: Vec<LevelPiece>,
}

/// Builds the exact profile from the running maximum of `y`.
pub fn exit_profile(y: &CadlagPath, u0: f64, u1: f64) -> Result<ExitProfile> {
    if !(u0 < u1) || !u0.is_finite() || !u1.is_finite() {
        return domain(format!("level interval [{u0}, {u1}] must have u0 < u1"));
    }
    let mut pieces: Vec<LevelPiece> = Vec::new();
    let mut reached = f64::NEG_INFINITY;
    let mut attained = false;
    let point = |pieces: &mut Vec<LevelPiece>, reached: &mut f64, attained: &mut bool, t: f64, v: f64| {
        if v > *reached || (v == *reached && !*attained) {
            pieces.push(LevelPiece {
                lo: *reached,
                lo_closed: !*attained,
                hi: v,
                hi_closed: true,
                map: LevelMap::At(TimeValue::Finite(t)),
            });
            *reached = v;
            *attained = true;
        }
    };
    for (i, seg) in y.segments().iter().enumerate() {
        point(&mut pieces, &mut reached, &mut attained, seg.start, seg.value);
        if seg.slope > 0.0 {
            let t1 = y.segment_end(i);
            let e = seg.value_at(t1);
            if e > reached {
                pieces.push(LevelPiece {
                    lo: reached,
                    lo_closed: false,
                    hi: e,
                    hi_closed: false,
                    map: LevelMap::Ramp { t0: seg.start, t1, v0: seg.value, slope: seg.slope },
                });
                reached = e;
                attained = false;
            }
        }
    }
    point(&mut pieces, &mut reached, &mut attained, y.horizon(), y.terminal());
    pieces.push(LevelPiece {
        lo: reached,
        lo_closed: !attained,
        hi: f64::INFINITY,
        hi_closed: false,
        map: LevelMap::At(TimeValue::Infinite),
    });

    // keep the pieces meeting [u0, u1]
    let pieces = pieces
        .into_iter()
        .filter(|p| p.lo < u1 || (p.lo == u1 && p.lo_closed))
        .filter(|p| !(p.hi < u0 || (p.hi == u0 && !p.hi_closed)))
        .collect();
    Ok(ExitProfile { u0, u1, pieces })
}

impl ExitProfile {
    pub fn level_interval(&self) -> (f64, f64) {
        (self.u0, self.u1)
    }

    pub fn pieces(&self) -> &[LevelPiece] {
        &self.pieces
    }

    /// `T_y(u)` for `u ∈ [u0, u1]`.
    pub fn value_at(&self, u: f64) -> Result<TimeValue> {
        if !(u >= self.u0 && u <= self.u1) {
            return domain(format!("level {u} outside [{}, {}]", self.u0, self.u1));
        }
        let i = self.pieces.partition_point(|p| !p.covers_up_to(u));
        Ok(self.pieces[i].map.eval(u))
    }

    /// Interior levels where the profile changes its law.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces
            .iter()
            .map(|p| p.lo)
            .filter(|&l| l > self.u0 && l < self.u1)
            .collect()
    }

    /// Nondegenerate pieces clipped to `[u0, u1)`, as (start, piece).
    fn right_pieces(&self) -> impl Iterator<Item = (f64, f64, &LevelPiece)> + '_ {
        self.pieces.iter().filter_map(move |p| {
            let lo = p.lo.max(self.u0);
            let hi = p.hi.min(self.u1);
            (lo < hi).then_some((lo, hi, p))
        })
    }

    /// The right-continuous modification as a path over levels. Fails if
    /// the profile is infinite anywhere on the level interval; use
    /// [`ExitProfile::compactified`] then.
    pub fn to_cadlag(&self) -> Result<CadlagPath> {
        let mut segments = Vec::new();
        for (lo, _, p) in self.right_pieces() {
            match p.map {
                LevelMap::At(TimeValue::Finite(t)) => segments.push(Segment::constant(lo, t)),
                LevelMap::At(TimeValue::Infinite) => {
                    return Err(Error::Precondition(format!(
                        "profile is infinite from level {lo}; compactify first"
                    )))
                }
                LevelMap::Ramp { slope, .. } => {
                    let v = p.map.eval(lo).finite().expect("ramps are finite");
                    segments.push(Segment::linear(lo, v, 1.0 / slope));
                }
            }
        }
        let terminal = self.value_at(self.u1)?.finite().ok_or_else(|| {
            Error::Precondition("profile is infinite at the top level; compactify first".into())
        })?;
        CadlagPath::new(self.u0, self.u1, segments, terminal)
    }

    /// Right-continuous modification of `u ↦ τ(u)/(1 + τ(u))` (with `∞ ↦ 1`).
    /// Ramp pieces are replaced by `chords` chords through exact values.
    pub fn compactified(&self, chords: usize) -> Result<CadlagPath> {
        let chords = chords.max(1);
        let mut segments = Vec::new();
        for (lo, hi, p) in self.right_pieces() {
            match p.map {
                LevelMap::At(t) => segments.push(Segment::constant(lo, compactify(t))),
                LevelMap::Ramp { .. } => {
                    let c = |u: f64| compactify(p.map.eval(u));
                    for j in 0..chords {
                        let a = lo + (hi - lo) * j as f64 / chords as f64;
                        let b = if j + 1 == chords { hi } else { lo + (hi - lo) * (j + 1) as f64 / chords as f64 };
                        let (ca, cb) = (c(a), c(b));
                        let mut slope = (cb - ca) / (b - a);
                        // keep the chord end at or below the next node
                        while ca + slope * (b - a) > cb {
                            slope = slope.next_down();
                        }
                        segments.push(Segment::linear(a, ca, slope));
                    }
                }
            }
        }
        CadlagPath::new(self.u0, self.u1, segments, compactify(self.value_at(self.u1)?))
    }

    /// CSV with columns `u_breakpoint,tau,kind`: one row per piece start of
    /// the right-continuous modification plus a final row at `u1`. `kind` is
    /// `constant` or `linear` (interpolate to the next row's left limit).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u_breakpoint,tau,kind\n");
        for (lo, _, p) in self.right_pieces() {
            let kind = match p.map {
                LevelMap::At(_) => "constant",
                LevelMap::Ramp { .. } => "linear",
            };
            out.push_str(&format!("{},{},{}\n", fmt_num(lo), fmt_time(p.map.eval(lo)), kind));
        }
        let last = self.value_at(self.u1).expect("u1 is in range");
        out.push_str(&format!("{},{},constant\n", fmt_num(self.u1), fmt_time(last)));
        out
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_time(t: TimeValue) -> String {
    match t {
        TimeValue::Finite(x) => fmt_num(x),
        TimeValue::Infinite => "INF".into(),
    }
}

/// Outcome of the regular-level test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Regularity {
    pub regular: bool,
    pub passage: f64,
    /// `(ε, t*)` with `t* ∈ (T, T + ε]` and `y(t*) > u`, for each ε tried.
    pub witnesses: Vec<(f64, f64)>,
}

impl Regularity {
    /// Witness for the smallest ε tried.
    pub fn witness(&self) -> Option<f64> {
        self.witnesses.last().map(|&(_, t)| t)
    }
}

/// Number of rungs `ε = horizon·2^{-k}`, `k = 0..=20`, used for witnesses.
const EPS_LADDER: i32 = 20;

/// Whether `y` strictly overshoots `u` immediately after first reaching it.
///
/// Decided from the segment containing `T = T_y(u)`: regular iff `y(T) > u`
/// (a jump over the level) or the segment rises through `T`.
pub fn is_regular_level(y: &CadlagPath, u: f64) -> Result<Regularity> {
    let TimeValue::Finite(passage) = first_passage(y, u) else {
        return Err(Error::Precondition(format!("level {u} is never reached")));
    };
    if passage >= y.horizon() {
        return Ok(Regularity { regular: false, passage, witnesses: vec![] });
    }
    let i = y.segment_index(passage);
    let seg = y.segments()[i];
    let seg_end = y.segment_end(i);
    let at = seg.value_at(passage);
    // room after T where the path stays above u
    let room = if at > u {
        if seg.slope < 0.0 {
            (seg_end - passage).min((at - u) / -seg.slope)
        } else {
            seg_end - passage
        }
    } else if seg.slope > 0.0 {
        seg_end - passage
    } else {
        0.0
    };
    let regular = room > 0.0;
    let mut witnesses = Vec::new();
    if regular {
        for k in 0..=EPS_LADDER {
            let eps = y.horizon() * 2f64.powi(-k);
            let t = passage + eps.min(room) / 2.0;
            if t > passage && y.eval_unchecked(t) > u {
                witnesses.push((eps, t));
            }
        }
    }
    Ok(Regularity { regular, passage, witnesses })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NtCase {
    NoExit,
    GenuineCrossing,
    FailNtMinus,
    FailNtPlus,
}

/// Result of checking non-tangency for one path and barrier on one horizon.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NtReport {
    pub case: NtCase,
    pub exit_time: TimeValue,
    pub horizon: f64,
    /// Without exit: `sup y` over the horizon. With exit at τ: the supremum
    /// of `y` over `[0, T']` as `T' ↑ τ`, excluding the approach to τ itself
    /// (`−∞` when τ = 0).
    pub buffer: f64,
    /// `(t, y(t))` with `y(t) > 0` just after τ.
    pub witness: Option<(f64, f64)>,
}

impl NtReport {
    pub fn to_json(&self) -> String {
        let buffer = if self.buffer.is_finite() {
            serde_json::json!(self.buffer)
        } else {
            serde_json::json!("-INF")
        };
        let v = serde_json::json!({
            "case": self.case,
            "exit_time": self.exit_time,
            "horizon": self.horizon,
            "buffer": buffer,
            "witness": self.witness,
        });
        serde_json::to_string_pretty(&v).expect("report serializes")
    }
}

/// Non-tangency check of `(x, Φ)` on `[0, horizon]`.
pub fn check_nt(x: &VectorPath, barrier: &BarrierField, horizon: f64) -> Result<NtReport> {
    if !(horizon > x.start()) || horizon > x.horizon() {
        return domain(format!("horizon {horizon} outside the path domain"));
    }
    let x = if horizon < x.horizon() {
        VectorPath::new(
            x.components().iter().map(|c| c.restrict(x.start(), horizon)).collect::<Result<_>>()?,
        )?
    } else {
        x.clone()
    };
    let y = scalarize(&x, barrier, DEFAULT_RESOLUTION)?;
    Ok(check_nt_scalar(&y))
}

/// Non-tangency check of a scalarized path at level 0.
pub fn check_nt_scalar(y: &CadlagPath) -> NtReport {
    let horizon = y.horizon();
    match first_passage(y, 0.0) {
        TimeValue::Infinite => {
            let buffer = y.sup();
            let case = if buffer < 0.0 { NtCase::NoExit } else { NtCase::FailNtMinus };
            NtReport { case, exit_time: TimeValue::Infinite, horizon, buffer, witness: None }
        }
        TimeValue::Finite(tau) => {
            // segment-start values and left limits at breakpoints before τ;
            // on each segment the extremes sit at these points
            let buffer = y
                .segments()
                .iter()
                .take_while(|s| s.start < tau)
                .map(|s| {
                    if s.start > y.start() {
                        s.value.max(y.left_limit_unchecked(s.start))
                    } else {
                        s.value
                    }
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let exit_time = TimeValue::Finite(tau);
            if buffer >= 0.0 {
                return NtReport { case: NtCase::FailNtMinus, exit_time, horizon, buffer, witness: None };
            }
            let reg = is_regular_level(y, 0.0).expect("passage is finite");
            if reg.regular {
                let witness = reg.witness().map(|t| (t, y.eval_unchecked(t)));
                NtReport { case: NtCase::GenuineCrossing, exit_time, horizon, buffer, witness }
            } else {
                NtReport { case: NtCase::FailNtPlus, exit_time, horizon, buffer, witness: None }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::BoundaryFn;

    fn sticking() -> CadlagPath {
        CadlagPath::new(
            0.0,
            3.0,
            vec![Segment::linear(0.0, -1.0, 1.0), Segment::constant(1.0, 0.0)],
            0.0,
        )
        .unwrap()
    }

    fn fin(t: f64) -> TimeValue {
        TimeValue::Finite(t)
    }

    #[test]
    fn sticking_path_passages() {
        let y = sticking();
        assert_eq!(first_passage(&y, 0.0), fin(1.0));
        for n in [1.0, 10.0, 1000.0] {
            assert_eq!(first_passage(&y.shift(-1.0 / n), 0.0), TimeValue::Infinite);
            assert_eq!(first_passage(&y.shift(1.0 / n), 0.0), fin(1.0 - 1.0 / n));
        }
    }

    #[test]
    fn exit_times() {
        let one = BarrierField::moving_boundary(BoundaryFn::Constant(1.0));
        let zero = CadlagPath::constant(0.0, 5.0, 0.0).unwrap();
        assert_eq!(exit_time(&zero.clone().into(), &one).unwrap(), TimeValue::Infinite);
        let ramp = CadlagPath::linear(0.0, 5.0, 0.0, 1.0).unwrap();
        assert_eq!(exit_time(&ramp.into(), &one).unwrap(), fin(1.0));
        let below = BarrierField::moving_boundary(BoundaryFn::Constant(-1.0));
        assert_eq!(exit_time(&zero.into(), &below).unwrap(), fin(0.0));
    }

    #[test]
    fn touch_counts_as_passage() {
        let y = CadlagPath::step(0.0, 3.0, &[(0.0, -1.0), (1.0, 0.0), (1.5, -1.0)]).unwrap();
        assert_eq!(first_passage(&y, 0.0), fin(1.0));
        let at_horizon = CadlagPath::step(0.0, 1.0, &[(0.0, -1.0), (1.0, 0.0)]).unwrap();
        assert_eq!(first_passage(&at_horizon, 0.0), fin(1.0));
    }

    #[test]
    fn step_profile_matches_case_formula() {
        let y = CadlagPath::step(0.0, 3.0, &[(0.0, 0.0), (1.0, 0.5), (2.0, 1.0)]).unwrap();
        let p = exit_profile(&y, 0.25, 0.75).unwrap();
        assert_eq!(p.value_at(0.25).unwrap(), fin(1.0));
        assert_eq!(p.value_at(0.5).unwrap(), fin(1.0));
        assert_eq!(p.value_at(0.5000001).unwrap(), fin(2.0));
        assert_eq!(p.value_at(0.75).unwrap(), fin(2.0));
        assert_eq!(p.breakpoints(), vec![0.5]);
        let rc = p.to_cadlag().unwrap();
        assert_eq!(rc.eval(0.5).unwrap(), 2.0);
        assert_eq!(rc.left_limit(0.5).unwrap(), 1.0);
        assert!(p.value_at(0.8).is_err());
    }

    #[test]
    fn identity_profile() {
        let y = CadlagPath::linear(0.0, 1.0, 0.0, 1.0).unwrap();
        let p = exit_profile(&y, 0.0, 1.0).unwrap();
        for u in [0.0, 0.1, 0.37, 0.5, 0.99, 1.0] {
            assert_eq!(p.value_at(u).unwrap(), fin(u));
        }
        let rc = p.to_cadlag().unwrap();
        assert_eq!(rc, CadlagPath::linear(0.0, 1.0, 0.0, 1.0).unwrap());
    }

    #[test]
    fn profile_with_unreached_levels() {
        let y = CadlagPath::linear(0.0, 1.0, 0.0, 1.0).unwrap().restrict(0.0, 0.5).unwrap();
        let p = exit_profile(&y, 0.0, 1.0).unwrap();
        assert_eq!(p.value_at(0.5).unwrap(), fin(0.5));
        assert_eq!(p.value_at(0.6).unwrap(), TimeValue::Infinite);
        assert!(p.to_cadlag().is_err());
        let c = p.compactified(4).unwrap();
        assert_eq!(c.eval(0.75).unwrap(), 1.0);
        assert!((c.eval(0.25).unwrap() - 0.2).abs() < 1e-12);
        assert!(c.is_nondecreasing());
    }

    #[test]
    fn immediate_exit_at_low_level() {
        let y = CadlagPath::constant(0.0, 1.0, 2.0).unwrap();
        let p = exit_profile(&y, 0.0, 1.0).unwrap();
        assert_eq!(p.value_at(0.0).unwrap(), fin(0.0));
        assert_eq!(p.value_at(1.0).unwrap(), fin(0.0));
        assert!(exit_profile(&y, 1.0, 1.0).is_err());
    }

    #[test]
    fn unattained_supremum_is_not_a_passage() {
        // rises to 1 then drops; level 1 first reached at the jump to 2
        let y = CadlagPath::new(
            0.0,
            3.0,
            vec![Segment::linear(0.0, 0.0, 1.0), Segment::constant(1.0, 0.0), Segment::constant(2.0, 2.0)],
            2.0,
        )
        .unwrap();
        assert_eq!(first_passage(&y, 1.0), fin(2.0));
        let p = exit_profile(&y, 0.0, 2.0).unwrap();
        assert_eq!(p.value_at(1.0).unwrap(), fin(2.0));
        assert_eq!(p.value_at(0.999).unwrap(), first_passage(&y, 0.999));
        assert_eq!(p.value_at(1.5).unwrap(), fin(2.0));
    }

    #[test]
    fn profile_csv() {
        let y = CadlagPath::step(0.0, 3.0, &[(0.0, 0.0), (1.0, 0.5), (2.0, 1.0)]).unwrap();
        let csv = exit_profile(&y, 0.25, 1.5).unwrap().to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "u_breakpoint,tau,kind");
        assert_eq!(lines.len(), 5);
        assert!(lines[3].ends_with("INF,constant"));
        assert!(lines[4].ends_with("INF,constant"));
    }

    #[test]
    fn regularity() {
        let reg = is_regular_level(&sticking(), 0.0).unwrap();
        assert!(!reg.regular);
        assert!(reg.witness().is_none());

        let u_star = 0.5;
        let bumpy = CadlagPath::new(
            0.0,
            3.0,
            vec![
                Segment::linear(0.0, u_star - 1.0, 1.0),
                Segment::constant(1.0, u_star),
                Segment::constant(2.0, u_star + 1.0),
            ],
            u_star + 1.0,
        )
        .unwrap();
        assert!(!is_regular_level(&bumpy, u_star).unwrap().regular);

        let ramp = CadlagPath::linear(0.0, 1.0, 0.0, 1.0).unwrap();
        let reg = is_regular_level(&ramp, 0.5).unwrap();
        assert!(reg.regular);
        assert_eq!(reg.witnesses.len(), 21);
        for (eps, t) in &reg.witnesses {
            assert!(*t > 0.5 && *t <= 0.5 + eps);
            assert!(ramp.eval(*t).unwrap() > 0.5);
        }

        // jump overshoot followed by a fast decline
        let spike = CadlagPath::new(
            0.0,
            2.0,
            vec![Segment::constant(0.0, -1.0), Segment::linear(1.0, 0.25, -100.0)],
            -99.75,
        )
        .unwrap();
        let reg = is_regular_level(&spike, 0.0).unwrap();
        assert!(reg.regular);
        assert!(reg.witnesses.iter().all(|&(_, t)| spike.eval(t).unwrap() > 0.0));

        assert!(matches!(
            is_regular_level(&sticking().shift(-1.0), 0.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn nt_cases() {
        let identity = BarrierField::moving_boundary(BoundaryFn::Constant(0.0));
        let report = check_nt(&sticking().into(), &identity, 3.0).unwrap();
        assert_eq!(report.case, NtCase::FailNtPlus);
        assert_eq!(report.exit_time, fin(1.0));

        let one = BarrierField::moving_boundary(BoundaryFn::Constant(1.0));
        let ramp = CadlagPath::linear(0.0, 5.0, 0.0, 1.0).unwrap();
        let report = check_nt(&ramp.into(), &one, 5.0).unwrap();
        assert_eq!(report.case, NtCase::GenuineCrossing);
        assert_eq!(report.exit_time, fin(1.0));
        let (wt, wv) = report.witness.unwrap();
        assert!(wt > 1.0 && wv > 0.0);
        assert!(report.buffer < 0.0);

        let zero = CadlagPath::constant(0.0, 5.0, 0.0).unwrap();
        let report = check_nt(&zero.into(), &one, 5.0).unwrap();
        assert_eq!(report.case, NtCase::NoExit);
        assert_eq!(report.buffer, -1.0);
        assert!(report.to_json().contains("NO_EXIT"));
    }

    #[test]
    fn nt_minus_failures() {
        // approaches 0 from below and drops back: no exit, buffer 0
        let graze = CadlagPath::new(
            0.0,
            2.0,
            vec![Segment::linear(0.0, -1.0, 1.0), Segment::constant(1.0, -1.0)],
            -1.0,
        )
        .unwrap();
        let r = check_nt_scalar(&graze);
        assert_eq!(r.case, NtCase::FailNtMinus);
        assert_eq!(r.exit_time, TimeValue::Infinite);

        // grazes 0 at t = 1 then exits by a jump at 1.5
        let graze_then_jump = CadlagPath::new(
            0.0,
            2.0,
            vec![Segment::linear(0.0, -1.0, 1.0), Segment::constant(1.0, -1.0), Segment::constant(1.5, 1.0)],
            1.0,
        )
        .unwrap();
        let r = check_nt_scalar(&graze_then_jump);
        assert_eq!(r.exit_time, fin(1.5));
        assert_eq!(r.case, NtCase::FailNtMinus);
    }

    #[test]
    fn check_nt_restricts_horizon() {
        let one = BarrierField::moving_boundary(BoundaryFn::Constant(1.0));
        let ramp = CadlagPath::linear(0.0, 5.0, 0.0, 1.0).unwrap();
        let r = check_nt(&ramp.clone().into(), &one, 0.5).unwrap();
        assert_eq!(r.case, NtCase::NoExit);
        assert_eq!(r.buffer, -0.5);
        assert!(check_nt(&ramp.into(), &one, 6.0).is_err());
    }
}
