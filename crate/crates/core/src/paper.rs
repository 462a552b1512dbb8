//! The six-event gap instance on five atoms, rebuilt from its membership
//! table, and the checks that reproduce its joint matrix and bound values.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::bounds::{gk_bound, kat_bound};
use crate::error::Result;
use crate::rational::{fmt_exact, parse_rational, ratio, Rational};
use crate::space::{AtomSet, Event, EventSystem, FiniteSpace, JointMatrix};

/// Atom ids with their probabilities as decimals.
pub const ATOMS: [(&str, &str); 5] = [("x1", "0.2"), ("x2", "0.2"), ("x3", "0.2"), ("x4", "0.2"), ("x5", "0.2")];

/// Membership table: `TABLE[atom][event]`.
pub const TABLE: [[bool; 6]; 5] = [
    [true, true, true, false, false, true],
    [true, false, false, true, true, true],
    [false, true, true, false, false, true],
    [true, false, false, true, true, false],
    [false, true, true, true, true, false],
];

/// Published joint probability matrix `P(A_iA_j)`.
pub const JOINT: [[&str; 6]; 6] = [
    ["0.6", "0.2", "0.2", "0.4", "0.4", "0.4"],
    ["0.2", "0.6", "0.6", "0.2", "0.2", "0.4"],
    ["0.2", "0.6", "0.6", "0.2", "0.2", "0.4"],
    ["0.4", "0.2", "0.2", "0.6", "0.6", "0.2"],
    ["0.4", "0.2", "0.2", "0.6", "0.6", "0.2"],
    ["0.4", "0.4", "0.4", "0.2", "0.2", "0.6"],
];

pub fn expected_gk() -> Rational {
    ratio(54, 55)
}

pub fn expected_kat() -> Rational {
    ratio(1, 1)
}

pub fn expected_joint_matrix() -> JointMatrix {
    JointMatrix::from_rows(
        JOINT.iter().map(|row| row.iter().map(|s| parse_rational(s).expect("literal")).collect()).collect(),
    )
}

/// Builds a system from a membership table over the given atoms.
pub fn system_from_table<const M: usize>(atoms: &[(&str, &str)], table: &[[bool; M]]) -> Result<EventSystem> {
    let space =
        Arc::new(FiniteSpace::new(atoms.iter().map(|(id, p)| (id.to_string(), parse_rational(p).expect("literal"))))?);
    let events = (0..M)
        .map(|j| {
            let members = AtomSet::from_indices((0..table.len()).filter(|&x| table[x][j]));
            Event::new(format!("A{}", j + 1), space.clone(), members)
        })
        .collect::<Result<Vec<_>>>()?;
    EventSystem::new(space, events)
}

pub fn paper_instance() -> EventSystem {
    system_from_table(&ATOMS, &TABLE).expect("embedded table is valid")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// The four reproduction checks: joint matrix, GK value, KAT value, and
/// KAT > GK.
pub fn verify_instance(sys: &EventSystem) -> Result<Vec<Check>> {
    let joint = sys.joint_matrix();
    let diff = joint.diff(&expected_joint_matrix());
    let mut detail = String::new();
    if diff.is_empty() {
        detail.push_str("6x6 entries equal");
    } else {
        for (i, j, got, want) in &diff {
            let _ = write!(detail, "[{},{}] got {} want {}; ", i + 1, j + 1, fmt_exact(got), fmt_exact(want));
        }
    }
    let gk = gk_bound(sys)?;
    let (kat, _) = kat_bound(sys)?;
    Ok(vec![
        Check { name: "joint-matrix", passed: diff.is_empty(), detail: detail.trim_end().to_string() },
        Check { name: "gk = 54/55", passed: gk == expected_gk(), detail: format!("gk = {}", fmt_exact(&gk)) },
        Check { name: "kat = 1", passed: kat == expected_kat(), detail: format!("kat = {}", fmt_exact(&kat)) },
        Check { name: "kat > gk", passed: kat > gk, detail: format!("kat - gk = {}", fmt_exact(&(&kat - &gk))) },
    ])
}
