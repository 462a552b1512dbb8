//! Randomized search for event systems where the KAT bound strictly exceeds
//! the GK bound. Every hit is an exact certificate.

use std::sync::Arc;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{gk_solve_joint, kat_from_joint};
use crate::error::{Error, Result};
use crate::linsolve::PivotOrder;
use crate::rational::{fmt_decimal, fmt_exact, Rational};
use crate::space::{AtomSet, Event, EventSystem, FiniteSpace};
use crate::spacefile::write_space;

/// Atom count is capped so event patterns fit in a `u64` mask.
pub const MAX_ATOMS: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub atoms: usize,
    pub events: usize,
    pub trials: u64,
    pub seed: u64,
    pub granularity: u64,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.atoms < 2 || self.atoms > MAX_ATOMS {
            return Err(Error::domain(format!("atoms must lie in 2..={MAX_ATOMS}")));
        }
        if self.events < 2 {
            return Err(Error::domain("events must be at least 2"));
        }
        if self.trials == 0 {
            return Err(Error::domain("trials must be at least 1"));
        }
        if self.granularity < self.atoms as u64 {
            return Err(Error::domain(format!(
                "granularity {} is smaller than the atom count {}",
                self.granularity, self.atoms
            )));
        }
        Ok(())
    }
}

/// Per-trial generator: the ChaCha key comes from the seed and the stream
/// from the trial index, so trials are independent of scheduling.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Deterministic in `(cfg.seed, trial)`. Atom masses are a uniformly random
/// composition of `g` into `atoms` positive parts, each divided by `g`; each
/// event is a uniformly random nonempty atom subset.
pub fn random_system(cfg: &SearchConfig, trial: u64) -> Result<EventSystem> {
    cfg.validate()?;
    let mut rng = trial_rng(cfg.seed, trial);
    let g = cfg.granularity;

    let cuts_needed = cfg.atoms - 1;
    let mut cuts: Vec<u64> =
        index::sample(&mut rng, (g - 1) as usize, cuts_needed).into_iter().map(|c| c as u64 + 1).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(cfg.atoms);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(g)) {
        parts.push(c - prev);
        prev = c;
    }
    let space = Arc::new(FiniteSpace::new(
        parts.iter().enumerate().map(|(i, &w)| (format!("x{}", i + 1), Rational::new(w.into(), g.into()))),
    )?);

    let full = (1u64 << cfg.atoms) - 1;
    let events = (0..cfg.events)
        .map(|k| {
            let mask = rng.gen_range(1..=full);
            let members = AtomSet::from_indices((0..cfg.atoms).filter(|b| mask >> b & 1 == 1));
            Event::new(format!("A{}", k + 1), space.clone(), members)
        })
        .collect::<Result<Vec<_>>>()?;
    EventSystem::new(space, events)
}

/// Where a hit came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum HitSource {
    /// A system supplied by the caller, by position.
    Included(usize),
    Trial(u64),
}

#[derive(Debug, Clone)]
pub struct GapHit {
    pub source: HitSource,
    pub system: EventSystem,
    pub gk: Rational,
    pub kat: Rational,
    pub gap: Rational,
    pub union: Rational,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub evaluated: u64,
    pub kat_above_gk: u64,
    pub gk_above_kat: u64,
    pub ties: u64,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    /// Sorted by gap descending, then by source.
    pub hits: Vec<GapHit>,
    pub stats: SearchStats,
}

enum Verdict {
    Hit(Box<GapHit>),
    GkAbove,
    Tie,
}

fn evaluate(source: HitSource, sys: EventSystem) -> Result<Verdict> {
    let probs = sys.require_positive()?;
    let joint = sys.joint_matrix();
    let gk = gk_solve_joint(&joint, &probs, PivotOrder::Natural)?.bound;
    let (kat, _) = kat_from_joint(&joint, &probs);
    if kat > gk {
        let union = sys.union_prob();
        if gk > union || kat > union {
            return Err(Error::domain(format!(
                "bound exceeds the union probability in {source:?}: gk {}, kat {}, union {}",
                fmt_exact(&gk),
                fmt_exact(&kat),
                fmt_exact(&union)
            )));
        }
        let gap = &kat - &gk;
        Ok(Verdict::Hit(Box::new(GapHit { source, system: sys, gk, kat, gap, union })))
    } else if gk > kat {
        Ok(Verdict::GkAbove)
    } else {
        Ok(Verdict::Tie)
    }
}

pub fn search_gaps(cfg: &SearchConfig) -> Result<Vec<GapHit>> {
    search_with_includes(cfg, &[]).map(|o| o.hits)
}

/// Runs the random trials plus any caller-supplied systems. Uses the ambient
/// rayon pool; the result does not depend on its size.
pub fn search_with_includes(cfg: &SearchConfig, includes: &[EventSystem]) -> Result<SearchOutcome> {
    cfg.validate()?;
    let included = includes
        .iter()
        .enumerate()
        .map(|(i, sys)| evaluate(HitSource::Included(i), sys.clone()))
        .collect::<Result<Vec<_>>>()?;
    let trials = (1..=cfg.trials)
        .into_par_iter()
        .map(|t| random_system(cfg, t).and_then(|sys| evaluate(HitSource::Trial(t), sys)))
        .collect::<Result<Vec<_>>>()?;

    let mut stats = SearchStats::default();
    let mut hits = Vec::new();
    for v in included.into_iter().chain(trials) {
        stats.evaluated += 1;
        match v {
            Verdict::Hit(h) => {
                stats.kat_above_gk += 1;
                hits.push(*h);
            }
            Verdict::GkAbove => stats.gk_above_kat += 1,
            Verdict::Tie => stats.ties += 1,
        }
    }
    hits.sort_by(|a, b| b.gap.cmp(&a.gap).then_with(|| a.source.cmp(&b.source)));
    Ok(SearchOutcome { hits, stats })
}

/// Column order of [`summary_row`].
pub const SUMMARY_HEADER: &str = "rank\tsource\tgap\tgk\tkat\tunion\tgap_decimal";

pub fn source_label(source: &HitSource) -> String {
    match source {
        HitSource::Included(i) => format!("include:{i}"),
        HitSource::Trial(t) => format!("trial:{t}"),
    }
}

pub fn summary_row(rank: usize, hit: &GapHit) -> String {
    format!(
        "{rank}\t{}\t{}\t{}\t{}\t{}\t{}",
        source_label(&hit.source),
        fmt_exact(&hit.gap),
        fmt_exact(&hit.gk),
        fmt_exact(&hit.kat),
        fmt_exact(&hit.union),
        fmt_decimal(&hit.gap, 12)
    )
}

/// Space-file text for a hit, with its bound values in the header comments.
pub fn hit_file(rank: usize, hit: &GapHit) -> String {
    write_space(
        &hit.system,
        &[
            format!("gap hit {rank} ({})", source_label(&hit.source)),
            format!("gk {}", fmt_exact(&hit.gk)),
            format!("kat {}", fmt_exact(&hit.kat)),
            format!("gap {}", fmt_exact(&hit.gap)),
            format!("union {}", fmt_exact(&hit.union)),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{gk_bound, kat_bound};
    use crate::rational::ratio;
    use crate::spacefile::parse_space;

    fn cfg(atoms: usize, events: usize, g: u64, trials: u64, seed: u64) -> SearchConfig {
        SearchConfig { atoms, events, trials, seed, granularity: g }
    }

    #[test]
    fn random_systems_are_deterministic() {
        let c = cfg(5, 6, 10, 1, 1);
        let a = random_system(&c, 1).unwrap();
        let b = random_system(&c, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
        assert_eq!(a.space().len(), 5);
        assert!(a.events().iter().all(|e| !e.members().is_empty()));
    }

    #[test]
    fn forced_composition() {
        let c = cfg(2, 2, 2, 1, 99);
        for t in 1..20 {
            let sys = random_system(&c, t).unwrap();
            assert!(sys.space().atoms().all(|(_, p)| *p == ratio(1, 2)));
        }
    }

    #[test]
    fn trials_differ() {
        let c = cfg(5, 6, 10, 1, 3);
        let systems: Vec<String> = (1..=100).map(|t| write_space(&random_system(&c, t).unwrap(), &[])).collect();
        let distinct: std::collections::HashSet<_> = systems.iter().collect();
        assert!(distinct.len() > 95, "{}", distinct.len());
    }

    #[test]
    fn config_validation() {
        assert!(cfg(1, 2, 5, 1, 0).validate().is_err());
        assert!(cfg(5, 1, 5, 1, 0).validate().is_err());
        assert!(cfg(5, 6, 5, 0, 0).validate().is_err());
        assert!(cfg(5, 6, 4, 1, 0).validate().is_err());
        assert!(cfg(64, 6, 100, 1, 0).validate().is_err());
        assert!(cfg(5, 6, 5, 1, 0).validate().is_ok());
    }

    #[test]
    fn included_six_event_instance_is_a_hit() {
        let paper = parse_space(include_str!("../examples/six_events.space")).unwrap();
        let out = search_with_includes(&cfg(3, 2, 3, 1, 0), &[paper]).unwrap();
        let hit = out.hits.iter().find(|h| h.source == HitSource::Included(0)).unwrap();
        assert_eq!(hit.gap, ratio(1, 55));
        assert_eq!(hit.gk, ratio(54, 55));
    }

    #[test]
    fn hits_are_sorted_and_certified() {
        let out = search_with_includes(&cfg(5, 6, 5, 3000, 11), &[]).unwrap();
        assert_eq!(out.stats.evaluated, 3000);
        for w in out.hits.windows(2) {
            assert!(w[0].gap >= w[1].gap);
        }
        for h in &out.hits {
            assert!(h.gap > Rational::from_integer(0.into()));
            assert!(h.gk <= h.union && h.kat <= h.union);
            let reparsed = parse_space(&hit_file(1, h)).unwrap();
            assert_eq!(gk_bound(&reparsed).unwrap(), h.gk);
            assert_eq!(kat_bound(&reparsed).unwrap().0, h.kat);
        }
    }
}
