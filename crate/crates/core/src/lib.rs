//! Exit times of càdlàg paths from time-dependent domains described by
//! continuous barriers, exit-time profiles, Skorokhod J1/M1 bounds and the
//! Monte Carlo experiments built on them.

// `!(a < b)` is used on purpose to reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barrier;
pub mod error;
pub mod experiments;
pub mod first_passage;
pub mod io;
pub mod nt_verification;
pub mod path;
pub mod skorokhod;
pub mod time;

pub use barrier::{scalarize, BarrierField, BoundaryFn, GridBarrier, SpaceTimeSet};
pub use error::{Error, Result};
pub use first_passage::{
    check_nt, exit_profile, exit_time, first_passage, is_regular_level, ExitProfile, NtCase, NtReport,
};
pub use path::{CadlagPath, Segment, SegmentKind, TimeChange, VectorPath};
pub use skorokhod::{
    canonical_rep, j1_discrepancy, j1_lower_bound_step, j1_upper_bound, m1_upper_bound, theta, MonotonePath,
    ParametricRep,
};
pub use time::{compactify, TimeValue};
