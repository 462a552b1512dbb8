//! Printable bound reports: exact `num/den` first, then a 12-significant-digit
//! decimal computed from the exact value.

use std::fmt;

use crate::bounds::{chung_erdos, gk_solve, kat_bound};
use crate::error::{Error, Result};
use crate::rational::{fmt_decimal, fmt_exact, Rational};
use crate::space::EventSystem;

pub const DECIMAL_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Gk,
    Kat,
    ChungErdos,
    Union,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] = [BoundKind::Gk, BoundKind::Kat, BoundKind::ChungErdos, BoundKind::Union];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Gk => "gk",
            BoundKind::Kat => "kat",
            BoundKind::ChungErdos => "ce",
            BoundKind::Union => "union",
        }
    }

    /// `gk`, `kat`, `ce`, `union`, or `all`.
    pub fn parse_selector(s: &str) -> Result<Vec<BoundKind>> {
        match s {
            "all" => Ok(Self::ALL.to_vec()),
            _ => Self::ALL
                .into_iter()
                .find(|k| k.name() == s)
                .map(|k| vec![k])
                .ok_or_else(|| Error::Syntax(format!("unknown bound `{s}` (gk, kat, ce, union, all)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostics {
    None,
    Gk { gamma: Vec<Rational>, rank: usize, free_indices: Vec<usize> },
    Kat { s: Vec<Rational>, theta: Vec<Rational>, terms: Vec<Rational> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub instance: String,
    pub bound: BoundKind,
    pub exact: Rational,
    pub decimal: String,
    pub diagnostics: Diagnostics,
}

impl BoundReport {
    pub fn compute(instance: &str, sys: &EventSystem, kind: BoundKind) -> Result<Self> {
        let (exact, diagnostics) = match kind {
            BoundKind::Gk => {
                let sol = gk_solve(sys)?;
                (sol.bound, Diagnostics::Gk { gamma: sol.gamma, rank: sol.rank, free_indices: sol.free_indices })
            }
            BoundKind::Kat => {
                let (value, terms) = kat_bound(sys)?;
                (
                    value,
                    Diagnostics::Kat {
                        s: terms.iter().map(|t| t.s.clone()).collect(),
                        theta: terms.iter().map(|t| t.theta.clone()).collect(),
                        terms: terms.into_iter().map(|t| t.term).collect(),
                    },
                )
            }
            BoundKind::ChungErdos => (chung_erdos(sys)?, Diagnostics::None),
            BoundKind::Union => (sys.union_prob(), Diagnostics::None),
        };
        Ok(Self {
            instance: instance.to_string(),
            bound: kind,
            decimal: fmt_decimal(&exact, DECIMAL_DIGITS),
            exact,
            diagnostics,
        })
    }
}

fn list(v: &[Rational]) -> String {
    v.iter().map(fmt_exact).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}\t{}", self.instance, self.bound.name(), fmt_exact(&self.exact), self.decimal)?;
        match &self.diagnostics {
            Diagnostics::None => {}
            Diagnostics::Gk { gamma, rank, free_indices } => {
                write!(f, "\n#   gamma = {}", list(gamma))?;
                let free: Vec<String> = free_indices.iter().map(|i| (i + 1).to_string()).collect();
                write!(f, "\n#   rank = {rank}; free = [{}]", free.join(" "))?;
            }
            Diagnostics::Kat { s, theta, terms } => {
                write!(f, "\n#   S = {}", list(s))?;
                write!(f, "\n#   theta = {}", list(theta))?;
                write!(f, "\n#   term = {}", list(terms))?;
            }
        }
        Ok(())
    }
}
