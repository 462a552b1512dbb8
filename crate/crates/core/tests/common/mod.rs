#![allow(dead_code)]

use std::sync::Arc;

use bcbounds::rational::ratio;
use bcbounds::{AtomSet, Event, EventSystem, FiniteSpace, Rational};
use num_traits::Zero;
use rand::seq::index;
use rand::Rng;

/// Random system with `1..=max_atoms` atoms whose masses are a random
/// composition of a granularity `g <= max_g`, and `1..=max_events` nonempty
/// events.
pub fn random_system<R: Rng>(rng: &mut R, max_atoms: usize, max_events: usize, max_g: u64) -> EventSystem {
    let atoms = rng.gen_range(1..=max_atoms);
    let g = rng.gen_range(atoms as u64..=max_g.max(atoms as u64));
    let mut cuts: Vec<u64> =
        index::sample(rng, (g - 1) as usize, atoms - 1).into_iter().map(|c| c as u64 + 1).collect();
    cuts.sort_unstable();
    cuts.push(g);
    let mut prev = 0;
    let space = Arc::new(
        FiniteSpace::new(cuts.iter().enumerate().map(|(i, &c)| {
            let w = c - prev;
            prev = c;
            (format!("a{i}"), ratio(w as i64, g as i64))
        }))
        .unwrap(),
    );
    let m = rng.gen_range(1..=max_events);
    let events = (0..m)
        .map(|k| {
            let members = loop {
                let picked: Vec<usize> = (0..atoms).filter(|_| rng.gen_bool(0.5)).collect();
                if !picked.is_empty() {
                    break picked;
                }
            };
            Event::new(format!("E{k}"), space.clone(), AtomSet::from_indices(members)).unwrap()
        })
        .collect();
    EventSystem::new(space, events).unwrap()
}

/// Union probability by summing atom masses one atom at a time.
pub fn brute_union(sys: &EventSystem) -> Rational {
    let space = sys.space();
    (0..space.len())
        .filter(|&a| sys.events().iter().any(|e| e.members().contains(a)))
        .fold(Rational::zero(), |acc, a| acc + space.prob(a).into_owned())
}

/// `P(A_i ∩ A_j)` by atom enumeration.
pub fn brute_joint(sys: &EventSystem, i: usize, j: usize) -> Rational {
    let space = sys.space();
    let (a, b) = (&sys.events()[i], &sys.events()[j]);
    (0..space.len())
        .filter(|&x| a.members().contains(x) && b.members().contains(x))
        .fold(Rational::zero(), |acc, x| acc + space.prob(x).into_owned())
}

/// `(Σ P(A_i))² / ΣΣ P(A_iA_j)` from enumerated joint probabilities.
pub fn brute_chung_erdos(sys: &EventSystem) -> Rational {
    let m = sys.len();
    let sum = (0..m).fold(Rational::zero(), |acc, i| acc + brute_joint(sys, i, i));
    let denom = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .fold(Rational::zero(), |acc, (i, j)| acc + brute_joint(sys, i, j));
    &sum * &sum / denom
}
