//! Lower bounds for `P(A_1 ∪ ... ∪ A_m)` from pairwise intersection data.
//!
//! * Gallot–Kounias: `Σ γ_i` for any solution of
//!   `(P(A_iA_j) / (P(A_i)P(A_j)))_{ij} γ = 1`. This equals the maximum over
//!   weights `ω` of `(Σ ω_i P(A_i))² / ΣΣ ω_i ω_j P(A_iA_j)`.
//! * Kuai–Alajaji–Takahara: a closed-form sum over events of two fractions
//!   built from the row sums `S_i = Σ_j P(A_iA_j)` and the fractional part
//!   `θ_i` of `S_i / P(A_i)`.
//! * Chung–Erdős: `(Σ P(A_i))² / ΣΣ P(A_iA_j)`, the all-ones `ω` above.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linsolve::{self, PivotOrder};
use crate::rational::Rational;
use crate::space::{EventSystem, JointMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct GkSolution {
    pub gamma: Vec<Rational>,
    pub bound: Rational,
    pub rank: usize,
    /// Indices whose `γ` was fixed to zero because the system is singular.
    pub free_indices: Vec<usize>,
}

/// The normalized Gram matrix `P(A_iA_j) / (P(A_i)P(A_j))`.
pub fn gk_matrix(sys: &EventSystem) -> Result<Vec<Vec<Rational>>> {
    let probs = sys.require_positive()?;
    let joint = sys.joint_matrix();
    let m = sys.len();
    Ok((0..m).map(|i| (0..m).map(|j| joint.get(i, j) / (&probs[i] * &probs[j])).collect()).collect())
}

pub fn gk_solve(sys: &EventSystem) -> Result<GkSolution> {
    gk_solve_with(sys, PivotOrder::Natural)
}

/// [`gk_solve`] with an explicit pivot-column policy. The bound does not
/// depend on the policy; `gamma` and `free_indices` may.
pub fn gk_solve_with(sys: &EventSystem, order: PivotOrder) -> Result<GkSolution> {
    let probs = sys.require_positive()?;
    gk_solve_joint(&sys.joint_matrix(), &probs, order)
}

/// Solves the normalized system through the equivalent `J w = p`, where `J`
/// is the joint matrix and `p` the marginals, then sets `γ_j = P(A_j) w_j`.
/// The two systems differ by nonzero row and column scalings, so they share
/// pivot columns and the particular solution maps exactly. `J` is cleared to
/// integers and eliminated fraction-free.
pub fn gk_solve_joint(joint: &JointMatrix, probs: &[Rational], order: PivotOrder) -> Result<GkSolution> {
    let denom = joint.rows().iter().flatten().chain(probs).fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let scale = |r: &Rational| (r.numer() * &denom) / r.denom();
    let a: Vec<Vec<BigInt>> = joint.rows().iter().map(|row| row.iter().map(scale).collect()).collect();
    let b: Vec<BigInt> = probs.iter().map(scale).collect();
    let sol = linsolve::solve_integer(&a, &b, order).map_err(inconsistent)?;
    let gamma: Vec<Rational> = sol.x.iter().zip(probs).map(|(w, p)| w * p).collect();
    Ok(finish(gamma, sol.rank, sol.free))
}

/// Direct rational elimination of `(P(A_iA_j)/(P(A_i)P(A_j))) γ = 1`. An
/// independent route to the same solution as [`gk_solve_with`].
pub fn gk_solve_rational(sys: &EventSystem, order: PivotOrder) -> Result<GkSolution> {
    let a = gk_matrix(sys)?;
    let ones = vec![Rational::one(); sys.len()];
    let sol = linsolve::solve(&a, &ones, order).map_err(inconsistent)?;
    Ok(finish(sol.x, sol.rank, sol.free))
}

fn inconsistent(e: linsolve::Inconsistent) -> Error {
    Error::domain(format!(
        "normalized Gram system is inconsistent at row {}; the joint matrix is not positive semidefinite",
        e.row
    ))
}

fn finish(gamma: Vec<Rational>, rank: usize, free_indices: Vec<usize>) -> GkSolution {
    let bound = gamma.iter().fold(Rational::zero(), |acc, g| acc + g);
    GkSolution { gamma, bound, rank, free_indices }
}

pub fn gk_bound(sys: &EventSystem) -> Result<Rational> {
    gk_solve(sys).map(|s| s.bound)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KatTerm {
    pub s: Rational,
    pub theta: Rational,
    pub term: Rational,
}

pub fn kat_bound(sys: &EventSystem) -> Result<(Rational, Vec<KatTerm>)> {
    let probs = sys.require_positive()?;
    Ok(kat_from_joint(&sys.joint_matrix(), &probs))
}

/// KAT from a precomputed joint matrix; `probs` must be its (positive)
/// diagonal.
///
/// With everything over a common denominator `D`, `P_i = a/D` and
/// `S_i = s/D`, the fractional part is `θ = r/a` for `r = s mod a` and each
/// term reduces to `(a/D) (r/(s + a - r) + (a - r)/(s - r))`.
pub fn kat_from_joint(joint: &JointMatrix, probs: &[Rational]) -> (Rational, Vec<KatTerm>) {
    let row_sums = joint.row_sums();
    let denom = row_sums.iter().chain(probs).fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let scale = |r: &Rational| (r.numer() * &denom) / r.denom();
    let mut total = Rational::zero();
    let mut terms = Vec::with_capacity(probs.len());
    for (p, s) in probs.iter().zip(row_sums) {
        let (a, si) = (scale(p), scale(&s));
        let r = si.mod_floor(&a);
        let first = Rational::new(r.clone(), &si + &a - &r);
        let second = Rational::new(&a - &r, &si - &r);
        let term = (first + second) * p;
        total += &term;
        terms.push(KatTerm { s, theta: Rational::new(r, a), term });
    }
    (total, terms)
}

pub fn chung_erdos(sys: &EventSystem) -> Result<Rational> {
    let sum = sys.probs().into_iter().fold(Rational::zero(), |a, p| a + p);
    let denom = sys.joint_matrix().total();
    if denom.is_zero() {
        return Err(Error::domain("every event has zero probability"));
    }
    Ok(&sum * &sum / denom)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::rational::{int, ratio};
    use crate::space::{AtomSet, Event, FiniteSpace};
    use crate::spacefile::parse_space;

    const PAPER: &str = include_str!("../examples/six_events.space");

    fn system(probs: &[Rational], events: &[&[usize]]) -> EventSystem {
        let space =
            Arc::new(FiniteSpace::new(probs.iter().enumerate().map(|(i, p)| (format!("x{i}"), p.clone()))).unwrap());
        let events = events
            .iter()
            .enumerate()
            .map(|(k, idx)| {
                Event::new(format!("A{}", k + 1), space.clone(), AtomSet::from_indices(idx.iter().copied())).unwrap()
            })
            .collect();
        EventSystem::new(space, events).unwrap()
    }

    #[test]
    fn six_event_instance_gk() {
        let sys = parse_space(PAPER).unwrap();
        let sol = gk_solve(&sys).unwrap();
        assert_eq!(sol.bound, ratio(54, 55));
        // A2 = A3 and A4 = A5, so the 6x6 system has rank 4
        assert_eq!(sol.rank, 4);
        assert_eq!(sol.free_indices, vec![2, 4]);
        let a = gk_matrix(&sys).unwrap();
        for row in &a {
            let lhs = row.iter().zip(&sol.gamma).fold(Rational::zero(), |acc, (u, v)| acc + u * v);
            assert_eq!(lhs, int(1));
        }
    }

    #[test]
    fn integer_and_rational_routes_match_on_six_events() {
        let sys = parse_space(PAPER).unwrap();
        for order in [PivotOrder::Natural, PivotOrder::Reversed] {
            assert_eq!(gk_solve_with(&sys, order).unwrap(), gk_solve_rational(&sys, order).unwrap());
        }
        let rev = gk_solve_with(&sys, PivotOrder::Reversed).unwrap();
        assert_eq!(rev.free_indices, vec![1, 3]);
        assert_eq!(rev.bound, ratio(54, 55));
    }

    #[test]
    fn six_event_instance_kat_terms() {
        let sys = parse_space(PAPER).unwrap();
        let (kat, terms) = kat_bound(&sys).unwrap();
        assert_eq!(kat, int(1));
        for t in &terms {
            assert_eq!(t.s, ratio(11, 5));
            assert_eq!(t.theta, ratio(2, 3));
            assert_eq!(t.term, ratio(1, 6));
        }
        assert_eq!(chung_erdos(&sys).unwrap(), ratio(54, 55));
    }

    #[test]
    fn single_event() {
        let sys = system(&[ratio(1, 3), ratio(2, 3)], &[&[0]]);
        let sol = gk_solve(&sys).unwrap();
        assert_eq!(sol.gamma, vec![ratio(1, 3)]);
        assert_eq!(sol.bound, ratio(1, 3));
        let (kat, terms) = kat_bound(&sys).unwrap();
        assert_eq!(kat, ratio(1, 3));
        assert_eq!(terms[0].theta, int(0));
        assert_eq!(chung_erdos(&sys).unwrap(), ratio(1, 3));
    }

    #[test]
    fn disjoint_events_are_tight() {
        let sys = system(&[ratio(1, 3), ratio(1, 6), ratio(1, 2)], &[&[0], &[1]]);
        let sol = gk_solve(&sys).unwrap();
        assert_eq!(sol.gamma, vec![ratio(1, 3), ratio(1, 6)]);
        assert_eq!(sol.bound, ratio(1, 2));
        assert_eq!(kat_bound(&sys).unwrap().0, ratio(1, 2));
        assert_eq!(chung_erdos(&sys).unwrap(), ratio(1, 2));
        assert_eq!(sys.union_prob(), ratio(1, 2));
    }

    #[test]
    fn repeated_event() {
        let p = ratio(2, 5);
        for m in 1..=4 {
            let events: Vec<&[usize]> = vec![&[0]; m];
            let sys = system(&[p.clone(), ratio(3, 5)], &events);
            let sol = gk_solve(&sys).unwrap();
            assert_eq!(sol.bound, p);
            assert_eq!(sol.rank, 1);
            assert_eq!(sol.free_indices, (1..m).collect::<Vec<_>>());
            let (kat, terms) = kat_bound(&sys).unwrap();
            assert_eq!(kat, p);
            for t in terms {
                assert_eq!(t.s, &p * int(m as i64));
                assert!(t.theta.is_zero());
                assert_eq!(t.term, &p / int(m as i64));
            }
        }
    }

    #[test]
    fn independent_pair_chung_erdos() {
        // product space {0,1}^2 with fair coins; A = first coin, B = second
        let q = ratio(1, 4);
        let sys = system(&[q.clone(), q.clone(), q.clone(), q], &[&[2, 3], &[1, 3]]);
        // brute force over atoms: ΣP = 1, ΣΣ P(AB) = 1/2 + 1/2 + 2/4
        assert_eq!(chung_erdos(&sys).unwrap(), ratio(2, 3));
    }

    #[test]
    fn zero_probability_is_a_domain_error() {
        let sys = system(&[int(0), int(1)], &[&[1], &[0]]);
        assert!(matches!(gk_solve(&sys), Err(Error::ZeroProbability { index: 1, .. })));
        assert!(matches!(kat_bound(&sys), Err(Error::ZeroProbability { .. })));
        assert!(chung_erdos(&sys).is_ok());
        let all_zero = system(&[int(0), int(1)], &[&[0]]);
        assert!(chung_erdos(&all_zero).is_err());
    }
}
