//! Exact lower bounds for the probability of a finite union of events
//! (Gallot–Kounias, Kuai–Alajaji–Takahara, Chung–Erdős), finite-prefix
//! Erdős–Rényi and Móri–Székely functionals for event sequences, the dyadic
//! interval sequence, and a seeded search for systems where the KAT bound
//! beats the GK bound.
//!
//! Every probability is an exact [`Rational`]. Only moments with
//! non-integer exponents leave the rationals, and those are carried as
//! fixed-point approximations with 128 fractional bits.

pub mod bounds;
pub mod dyadic;
pub mod error;
pub mod linsolve;
pub mod paper;
pub mod rational;
pub mod report;
pub mod search;
pub mod sequence;
pub mod space;
pub mod spacefile;

pub use bounds::{chung_erdos, gk_bound, gk_solve, gk_solve_rational, gk_solve_with, kat_bound, GkSolution, KatTerm};
pub use dyadic::{ce1_bound_rhs, dyadic_event, verify_ce1_chain, ChainReport, DyadicConfig, DyadicSequence};
pub use error::{Error, ParseError, Result};
pub use linsolve::PivotOrder;
pub use rational::Rational;
pub use report::{BoundKind, BoundReport};
pub use search::{random_system, search_gaps, search_with_includes, GapHit, SearchConfig};
pub use sequence::{
    alpha_moment, er_estimate, er_prefix, ms_estimate, periodic_event, EventSequence, Exponent, PrefixMoment,
    Subsequence,
};
pub use space::{AtomSet, Event, EventSystem, FiniteSpace, JointMatrix};
pub use spacefile::{parse_space, parse_space_with_warnings, write_space};
