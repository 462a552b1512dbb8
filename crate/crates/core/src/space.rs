//! Finite probability spaces, events as atom sets, and the exact
//! intersection/union oracles every bound is checked against.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_exact, Rational};

#[derive(Debug, Clone, PartialEq)]
enum Masses {
    Explicit {
        probs: Vec<Rational>,
        /// `cumulative[k] / denom` is the mass of atoms `0..k`, with `denom`
        /// the lcm of the atom denominators.
        cumulative: Vec<BigInt>,
        denom: BigInt,
    },
    /// `count` atoms of equal mass, ids `u0, u1, ...`.
    Uniform { count: usize, each: Rational },
}

/// Ordered atoms with exact probabilities summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpace {
    ids: Vec<String>,
    masses: Masses,
    index: HashMap<String, usize>,
}

impl FiniteSpace {
    pub fn new<I, S>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        let mut ids = Vec::new();
        let mut probs = Vec::new();
        let mut index = HashMap::new();
        for (id, prob) in atoms {
            let id = id.into();
            if prob.is_negative() {
                return Err(Error::Space(format!("atom `{id}` has negative probability {}", fmt_exact(&prob))));
            }
            if index.insert(id.clone(), ids.len()).is_some() {
                return Err(Error::Space(format!("duplicate atom id `{id}`")));
            }
            ids.push(id);
            probs.push(prob);
        }
        if ids.is_empty() {
            return Err(Error::Space("no atoms".into()));
        }
        let denom = probs.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
        let mut cumulative = Vec::with_capacity(probs.len() + 1);
        cumulative.push(BigInt::zero());
        for p in &probs {
            let next = cumulative.last().unwrap() + p.numer() * (&denom / p.denom());
            cumulative.push(next);
        }
        let total = Rational::new(cumulative.last().unwrap().clone(), denom.clone());
        if !total.is_one() {
            return Err(Error::Space(format!("probabilities sum to {} ≠ 1", fmt_exact(&total))));
        }
        Ok(Self { ids, masses: Masses::Explicit { probs, cumulative, denom }, index })
    }

    /// `count` atoms of mass `1/count` each, without materializing per-atom
    /// rationals.
    pub fn uniform(count: usize) -> Self {
        assert!(count > 0, "uniform space needs at least one atom");
        Self {
            ids: Vec::new(),
            masses: Masses::Uniform { count, each: Rational::new(1.into(), count.into()) },
            index: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        match &self.masses {
            Masses::Explicit { probs, .. } => probs.len(),
            Masses::Uniform { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn atom_id(&self, i: usize) -> Cow<'_, str> {
        match &self.masses {
            Masses::Explicit { .. } => Cow::Borrowed(&self.ids[i]),
            Masses::Uniform { .. } => Cow::Owned(format!("u{i}")),
        }
    }

    pub fn atom_index(&self, id: &str) -> Option<usize> {
        match &self.masses {
            Masses::Explicit { .. } => self.index.get(id).copied(),
            Masses::Uniform { count, .. } => id
                .strip_prefix('u')
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&i| i < *count && id == format!("u{i}")),
        }
    }

    pub fn prob(&self, i: usize) -> Cow<'_, Rational> {
        match &self.masses {
            Masses::Explicit { probs, .. } => Cow::Borrowed(&probs[i]),
            Masses::Uniform { each, .. } => Cow::Borrowed(each),
        }
    }

    /// Total mass of a contiguous block of atoms.
    pub fn mass(&self, range: Range<usize>) -> Rational {
        debug_assert!(range.start <= range.end && range.end <= self.len());
        match &self.masses {
            Masses::Explicit { cumulative, denom, .. } => {
                Rational::new(&cumulative[range.end] - &cumulative[range.start], denom.clone())
            }
            Masses::Uniform { each, .. } => each * Rational::from_integer(range.len().into()),
        }
    }

    /// Mass of a union of disjoint blocks, summed before normalizing.
    fn mass_of_runs(&self, runs: &[Range<usize>]) -> Rational {
        match &self.masses {
            Masses::Explicit { cumulative, denom, .. } => {
                let num = runs.iter().fold(BigInt::zero(), |acc, r| acc + &cumulative[r.end] - &cumulative[r.start]);
                Rational::new(num, denom.clone())
            }
            Masses::Uniform { count, .. } => {
                let atoms: usize = runs.iter().map(|r| r.len()).sum();
                Rational::new(atoms.into(), (*count).into())
            }
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = (Cow<'_, str>, Cow<'_, Rational>)> + '_ {
        (0..self.len()).map(move |i| (self.atom_id(i), self.prob(i)))
    }
}

/// A set of atom indices stored as sorted, disjoint, non-adjacent half-open
/// runs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AtomSet {
    runs: Vec<Range<usize>>,
}

impl AtomSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self::from_ranges(v.into_iter().map(|i| i..i + 1))
    }

    pub fn from_ranges<I: IntoIterator<Item = Range<usize>>>(ranges: I) -> Self {
        let mut v: Vec<Range<usize>> = ranges.into_iter().filter(|r| r.start < r.end).collect();
        v.sort_unstable_by_key(|r| r.start);
        let mut runs: Vec<Range<usize>> = Vec::with_capacity(v.len());
        for r in v {
            match runs.last_mut() {
                Some(last) if r.start <= last.end => last.end = last.end.max(r.end),
                _ => runs.push(r),
            }
        }
        Self { runs }
    }

    pub fn runs(&self) -> &[Range<usize>] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.runs.iter().map(|r| r.len()).sum()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.runs.last().map(|r| r.end - 1)
    }

    pub fn contains(&self, i: usize) -> bool {
        let k = self.runs.partition_point(|r| r.end <= i);
        self.runs.get(k).is_some_and(|r| r.start <= i)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.runs.iter().flat_map(|r| r.clone())
    }

    pub fn intersection(&self, other: &AtomSet) -> AtomSet {
        let (mut a, mut b) = (0, 0);
        let mut runs = Vec::new();
        while a < self.runs.len() && b < other.runs.len() {
            let (x, y) = (&self.runs[a], &other.runs[b]);
            let lo = x.start.max(y.start);
            let hi = x.end.min(y.end);
            if lo < hi {
                runs.push(lo..hi);
            }
            if x.end < y.end {
                a += 1;
            } else {
                b += 1;
            }
        }
        Self::from_ranges(runs)
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        Self::from_ranges(self.runs.iter().chain(&other.runs).cloned())
    }
}

/// A subset of the atoms of one space.
#[derive(Debug, Clone)]
pub struct Event {
    name: String,
    space: Arc<FiniteSpace>,
    members: AtomSet,
}

impl Event {
    pub fn new(name: impl Into<String>, space: Arc<FiniteSpace>, members: AtomSet) -> Result<Self> {
        let name = name.into();
        if let Some(max) = members.max_index() {
            if max >= space.len() {
                return Err(Error::Space(format!(
                    "event `{name}` references atom index {max} outside a space of {} atoms",
                    space.len()
                )));
            }
        }
        Ok(Self { name, space, members })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        &self.space
    }

    pub fn members(&self) -> &AtomSet {
        &self.members
    }

    pub fn prob(&self) -> Rational {
        mass_of(&self.space, &self.members)
    }

    /// `P(self ∩ other)`; both events must live in the same space.
    pub fn intersection_prob(&self, other: &Event) -> Rational {
        debug_assert!(Arc::ptr_eq(&self.space, &other.space) || self.space == other.space);
        mass_of(&self.space, &self.members.intersection(&other.members))
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self { name: name.into(), ..self.clone() }
    }
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.members == other.members
            && (Arc::ptr_eq(&self.space, &other.space) || self.space == other.space)
    }
}

pub(crate) fn mass_of(space: &FiniteSpace, set: &AtomSet) -> Rational {
    space.mass_of_runs(set.runs())
}

/// `{A_1, ..., A_m}` over a single space, `m >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventSystem {
    space: Arc<FiniteSpace>,
    events: Vec<Event>,
}

impl EventSystem {
    pub fn new(space: Arc<FiniteSpace>, events: Vec<Event>) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::Space("an event system needs at least one event".into()));
        }
        if let Some(e) = events.iter().find(|e| !Arc::ptr_eq(e.space(), &space) && **e.space() != *space) {
            return Err(Error::Space(format!("event `{}` belongs to a different space", e.name())));
        }
        Ok(Self { space, events })
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        &self.space
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn probs(&self) -> Vec<Rational> {
        self.events.iter().map(Event::prob).collect()
    }

    /// Indices of events with probability zero.
    pub fn zero_probability_events(&self) -> Vec<usize> {
        self.events.iter().enumerate().filter(|(_, e)| e.prob().is_zero()).map(|(i, _)| i).collect()
    }

    /// Fails on the first zero-probability event.
    pub fn require_positive(&self) -> Result<Vec<Rational>> {
        let probs = self.probs();
        if let Some(i) = probs.iter().position(Zero::is_zero) {
            return Err(Error::ZeroProbability { index: i, name: self.events[i].name().to_string() });
        }
        Ok(probs)
    }

    pub fn joint_matrix(&self) -> JointMatrix {
        let m = self.len();
        let mut entries = vec![vec![Rational::zero(); m]; m];
        for (i, a) in self.events.iter().enumerate() {
            entries[i][i] = a.prob();
            for (j, b) in self.events.iter().enumerate().skip(i + 1) {
                let p = a.intersection_prob(b);
                entries[j][i] = p.clone();
                entries[i][j] = p;
            }
        }
        JointMatrix { entries }
    }

    pub fn union_prob(&self) -> Rational {
        let union = self.events.iter().fold(AtomSet::empty(), |acc, e| acc.union(e.members()));
        mass_of(&self.space, &union)
    }

    /// The system restricted to the given event indices, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let events = indices
            .iter()
            .map(|&i| {
                self.events
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::domain(format!("event index {i} out of range (m = {})", self.len())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.space.clone(), events)
    }
}

/// `P(A_i A_j)` for an event system.
#[derive(Debug, Clone, PartialEq)]
pub struct JointMatrix {
    entries: Vec<Vec<Rational>>,
}

impl JointMatrix {
    pub fn from_rows(entries: Vec<Vec<Rational>>) -> Self {
        Self { entries }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<Rational> {
        (0..self.size()).map(|i| self.entries[i][i].clone()).collect()
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        self.entries.iter().map(|row| row.iter().fold(Rational::zero(), |a, x| a + x)).collect()
    }

    pub fn total(&self) -> Rational {
        self.row_sums().into_iter().fold(Rational::zero(), |a, x| a + x)
    }

    pub fn is_symmetric(&self) -> bool {
        let m = self.size();
        (0..m).all(|i| (0..i).all(|j| self.entries[i][j] == self.entries[j][i]))
    }

    /// Entry-by-entry differences `(i, j, self, other)`.
    pub fn diff(&self, other: &JointMatrix) -> Vec<(usize, usize, Rational, Rational)> {
        let mut out = Vec::new();
        let m = self.size().max(other.size());
        for i in 0..m {
            for j in 0..m {
                let a = self.entries.get(i).and_then(|r| r.get(j));
                let b = other.entries.get(i).and_then(|r| r.get(j));
                if a != b {
                    out.push((
                        i,
                        j,
                        a.cloned().unwrap_or_else(Rational::zero),
                        b.cloned().unwrap_or_else(Rational::zero),
                    ));
                }
            }
        }
        out
    }
}

impl fmt::Display for JointMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(fmt_exact).collect();
            writeln!(f, "{}", cells.join("\t"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn space(probs: &[Rational]) -> Arc<FiniteSpace> {
        Arc::new(FiniteSpace::new(probs.iter().enumerate().map(|(i, p)| (format!("x{}", i + 1), p.clone()))).unwrap())
    }

    fn event(space: &Arc<FiniteSpace>, name: &str, idx: &[usize]) -> Event {
        Event::new(name, space.clone(), AtomSet::from_indices(idx.iter().copied())).unwrap()
    }

    #[test]
    fn atom_set_runs_are_canonical() {
        let s = AtomSet::from_indices([5, 1, 2, 3, 7, 6, 2]);
        assert_eq!(s.runs(), &[1..4, 5..8]);
        assert_eq!(s.len(), 6);
        assert!(s.contains(3) && !s.contains(4) && s.contains(7) && !s.contains(0));
        let t = AtomSet::from_ranges([0..2, 6..10]);
        assert_eq!(s.intersection(&t).runs(), &[1..2, 6..8]);
        assert_eq!(s.union(&t).runs(), &[0..4, 5..10]);
    }

    #[test]
    fn normalization_failure_reports_the_sum() {
        let err = FiniteSpace::new([("a", ratio(1, 2)), ("b", ratio(1, 3))]).unwrap_err();
        assert!(err.to_string().contains("sum to 5/6 ≠ 1"), "{err}");
    }

    #[test]
    fn duplicate_and_negative_atoms_rejected() {
        assert!(FiniteSpace::new([("a", ratio(1, 2)), ("a", ratio(1, 2))]).is_err());
        assert!(FiniteSpace::new([("a", ratio(3, 2)), ("b", ratio(-1, 2))]).is_err());
    }

    #[test]
    fn event_probabilities() {
        let s = space(&[ratio(1, 2), ratio(1, 4), ratio(1, 4)]);
        assert_eq!(event(&s, "e", &[]).prob(), int(0));
        assert_eq!(event(&s, "all", &[0, 1, 2]).prob(), int(1));
        assert_eq!(event(&s, "b", &[1, 2]).prob(), ratio(1, 2));
        assert!(Event::new("bad", s.clone(), AtomSet::from_indices([3])).is_err());
    }

    #[test]
    fn disjoint_and_repeated_joint_matrices() {
        let s = space(&[ratio(1, 4), ratio(1, 4), ratio(1, 2)]);
        let sys = EventSystem::new(s.clone(), vec![event(&s, "a", &[0]), event(&s, "b", &[1])]).unwrap();
        assert_eq!(
            sys.joint_matrix(),
            JointMatrix::from_rows(vec![vec![ratio(1, 4), int(0)], vec![int(0), ratio(1, 4)]])
        );
        assert_eq!(sys.union_prob(), ratio(1, 2));

        let a = event(&s, "a", &[0, 2]);
        let sys = EventSystem::new(s.clone(), vec![a.clone(), a.renamed("a2")]).unwrap();
        let jm = sys.joint_matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(*jm.get(i, j), ratio(3, 4));
            }
        }
        assert_eq!(sys.union_prob(), ratio(3, 4));
    }

    #[test]
    fn degenerate_single_atom_space() {
        let s = space(&[int(1)]);
        let sys = EventSystem::new(s.clone(), vec![event(&s, "A", &[0])]).unwrap();
        assert_eq!(sys.probs(), vec![int(1)]);
        assert_eq!(sys.union_prob(), int(1));
    }

    #[test]
    fn zero_probability_events_are_flagged() {
        let s = space(&[int(0), int(1)]);
        let sys = EventSystem::new(s.clone(), vec![event(&s, "A", &[1]), event(&s, "Z", &[0])]).unwrap();
        assert_eq!(sys.zero_probability_events(), vec![1]);
        assert!(matches!(sys.require_positive(), Err(Error::ZeroProbability { index: 1, .. })));
    }

    #[test]
    fn uniform_space_ids_round_trip() {
        let u = FiniteSpace::uniform(8);
        assert_eq!(u.len(), 8);
        assert_eq!(u.atom_index("u7"), Some(7));
        assert_eq!(u.atom_index("u8"), None);
        assert_eq!(u.atom_index("u07"), None);
        assert_eq!(u.mass(2..6), ratio(1, 2));
        assert_eq!(*u.prob(3), ratio(1, 8));
    }

    #[test]
    fn mixed_spaces_are_rejected() {
        let s1 = space(&[int(1)]);
        let s2 = space(&[ratio(1, 2), ratio(1, 2)]);
        let err = EventSystem::new(s1.clone(), vec![event(&s1, "a", &[0]), event(&s2, "b", &[1])]);
        assert!(err.is_err());
    }
}
