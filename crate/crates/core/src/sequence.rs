//! Event sequences and the finite-prefix moments of
//! `α_n = Σ_{i≤n} I_{A_τ(i)} / Σ_{i≤n} P(A_τ(i))`.
//!
//! Prefix statistics are kept as a [`CountProfile`]: the atoms are split into
//! maximal runs sharing one coverage count, and the probability mass at each
//! count is tracked exactly. Every moment `E(α_n^p)` is then a short sum over
//! distinct counts.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dyadic::DyadicSequence;
use crate::error::{Error, Result};
use crate::rational::{
    fmt_exact, int, is_integer, parse_rational, pow_rational, ratio, to_f64, truncate_bits, Rational,
    DEFAULT_PRECISION_BITS,
};
use crate::space::{Event, EventSystem, FiniteSpace};

/// A strictly positive moment exponent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(Rational);

impl Exponent {
    pub fn new(p: Rational) -> Result<Self> {
        if !p.is_positive() {
            return Err(Error::domain(format!("exponent must be positive, got {}", fmt_exact(&p))));
        }
        Ok(Self(p))
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(parse_rational(s).map_err(Error::Syntax)?)
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn is_integer(&self) -> bool {
        is_integer(&self.0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.0)
    }

    /// `1 / (1 - p)`, the outer power of the powered-moment functional.
    pub fn dual(&self) -> Option<Rational> {
        let d = Rational::one() - &self.0;
        (!d.is_zero()).then(|| d.recip())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if is_integer(&self.0) {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}", fmt_exact(&self.0))
        }
    }
}

/// `{2, 1/2, 1/4, 1/8, 1/16, 1/32}`.
pub fn default_p_grid() -> Vec<Exponent> {
    let mut grid = vec![Exponent(int(2))];
    grid.extend((1..=5).map(|k| Exponent(ratio(1, 1 << k))));
    grid
}

/// `A_1, A_2, ...`, indexed from 1.
#[derive(Debug, Clone)]
pub enum EventSequence {
    /// A finite list; indices beyond its length are errors.
    Explicit(EventSystem),
    /// `A_1..A_m, A_1..A_m, ...`.
    Periodic(EventSystem),
    Dyadic(DyadicSequence),
}

impl EventSequence {
    pub fn event(&self, n: usize) -> Result<Event> {
        if n == 0 {
            return Err(Error::domain("sequence indices start at 1"));
        }
        match self {
            EventSequence::Explicit(sys) => sys
                .events()
                .get(n - 1)
                .cloned()
                .ok_or_else(|| Error::domain(format!("index {n} beyond explicit sequence of length {}", sys.len()))),
            EventSequence::Periodic(sys) => Ok(periodic_event(sys, n)),
            EventSequence::Dyadic(d) => d.event(n),
        }
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        match self {
            EventSequence::Explicit(sys) | EventSequence::Periodic(sys) => sys.space(),
            EventSequence::Dyadic(d) => d.space(),
        }
    }

    /// Largest valid index, if the sequence is finite.
    pub fn max_index(&self) -> Option<usize> {
        match self {
            EventSequence::Explicit(sys) => Some(sys.len()),
            EventSequence::Periodic(_) => None,
            EventSequence::Dyadic(d) => Some(d.config().max_index()),
        }
    }

    /// The events `A_τ(1), ..., A_τ(n)` as a finite system.
    pub fn prefix_system(&self, tau: &Subsequence, n: usize) -> Result<EventSystem> {
        let events = tau.materialize(n)?.into_iter().map(|k| self.event(k)).collect::<Result<Vec<_>>>()?;
        EventSystem::new(self.space().clone(), events)
    }
}

/// `base.events[(n - 1) mod m]`.
pub fn periodic_event(base: &EventSystem, n: usize) -> Event {
    assert!(n >= 1, "sequence indices start at 1");
    base.events()[(n - 1) % base.len()].clone()
}

/// `τ(n) = base^(n - shift)` or `τ(n) = scale·n + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrideRule {
    Linear { scale: usize, offset: usize },
    Power { base: usize, shift: usize },
}

impl StrideRule {
    /// Accepts `n`, `3n`, `3*n`, `2n+1`, `2^n`, `2^(n-1)`.
    pub fn parse(expr: &str) -> Result<Self> {
        let e: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Syntax(format!("unrecognized stride rule `{expr}`"));
        if let Some((base, rest)) = e.split_once('^') {
            let base: usize = base.parse().map_err(|_| bad())?;
            let rest = rest.trim_start_matches('(').trim_end_matches(')');
            let shift = match rest.strip_prefix('n').ok_or_else(bad)? {
                "" => 0,
                s => s.strip_prefix('-').and_then(|d| d.parse().ok()).ok_or_else(bad)?,
            };
            if base < 2 || shift > 1 {
                return Err(Error::domain(format!("stride rule `{expr}` is not strictly increasing from n = 1")));
            }
            return Ok(StrideRule::Power { base, shift });
        }
        let (lin, offset) = match e.split_once('+') {
            Some((l, o)) => (l, o.parse().map_err(|_| bad())?),
            None => (e.as_str(), 0),
        };
        let coef = lin.strip_suffix('n').ok_or_else(bad)?;
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let scale = if coef.is_empty() { 1 } else { coef.parse().map_err(|_| bad())? };
        if scale == 0 {
            return Err(bad());
        }
        Ok(StrideRule::Linear { scale, offset })
    }

    pub fn apply(&self, n: usize) -> Result<usize> {
        let overflow = || Error::Resource(format!("stride rule overflows at n = {n}"));
        match *self {
            StrideRule::Linear { scale, offset } => {
                scale.checked_mul(n).and_then(|v| v.checked_add(offset)).ok_or_else(overflow)
            }
            StrideRule::Power { base, shift } => {
                u32::try_from(n - shift).ok().and_then(|e| base.checked_pow(e)).ok_or_else(overflow)
            }
        }
    }
}

/// A strictly increasing `τ: {1, 2, ...} → {1, 2, ...}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Subsequence {
    Identity,
    /// `τ(i) = list[i - 1]`.
    Indices(Vec<usize>),
    Stride(StrideRule),
}

impl Subsequence {
    pub fn indices(list: Vec<usize>) -> Result<Self> {
        validate_increasing(&list)?;
        Ok(Subsequence::Indices(list))
    }

    /// `identity`, `stride:EXPR`, or `list:i,j,k`.
    pub fn parse(spec: &str) -> Result<Self> {
        if spec == "identity" {
            return Ok(Subsequence::Identity);
        }
        if let Some(expr) = spec.strip_prefix("stride:") {
            return Ok(Subsequence::Stride(StrideRule::parse(expr)?));
        }
        if let Some(list) = spec.strip_prefix("list:") {
            return Self::parse_list(list);
        }
        Err(Error::Syntax(format!("unknown subsequence `{spec}` (expected identity, stride:EXPR or list:...)")))
    }

    /// Whitespace- or comma-separated positive integers.
    pub fn parse_list(text: &str) -> Result<Self> {
        let list = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| Error::Syntax(format!("bad index `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        Self::indices(list)
    }

    /// `n` distinct indices drawn uniformly from `1..=upper`, sorted.
    pub fn random_increasing(seed: u64, n: usize, upper: usize) -> Result<Self> {
        if n > upper {
            return Err(Error::domain(format!("cannot draw {n} distinct indices from 1..={upper}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<usize> = index::sample(&mut rng, upper, n).into_iter().map(|i| i + 1).collect();
        v.sort_unstable();
        Ok(Subsequence::Indices(v))
    }

    pub fn apply(&self, i: usize) -> Result<usize> {
        if i == 0 {
            return Err(Error::domain("subsequence indices start at 1"));
        }
        match self {
            Subsequence::Identity => Ok(i),
            Subsequence::Indices(v) => v
                .get(i - 1)
                .copied()
                .ok_or_else(|| Error::domain(format!("subsequence list has {} entries, index {i} requested", v.len()))),
            Subsequence::Stride(rule) => rule.apply(i),
        }
    }

    /// `[τ(1), ..., τ(n)]`, checked strictly increasing.
    pub fn materialize(&self, n: usize) -> Result<Vec<usize>> {
        let v = (1..=n).map(|i| self.apply(i)).collect::<Result<Vec<_>>>()?;
        validate_increasing(&v)?;
        Ok(v)
    }
}

fn validate_increasing(v: &[usize]) -> Result<()> {
    if v.first() == Some(&0) {
        return Err(Error::domain("subsequence indices must be ≥ 1"));
    }
    if let Some(w) = v.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::domain(format!("subsequence is not strictly increasing ({} then {})", w[0], w[1])));
    }
    Ok(())
}

/// Coverage counts `c(x) = #{i ≤ n : x ∈ A_τ(i)}` and the normalizer
/// `s = Σ_{i≤n} P(A_τ(i))` after `n` events.
#[derive(Debug, Clone)]
pub struct CountProfile {
    space: Arc<FiniteSpace>,
    /// start -> (end, count); pieces tile `0..space.len()`.
    pieces: BTreeMap<usize, (usize, u64)>,
    /// count -> total probability of atoms with that count (nonzero only).
    histogram: BTreeMap<u64, Rational>,
    normalizer: Rational,
    len: usize,
}

impl CountProfile {
    pub fn new(space: Arc<FiniteSpace>) -> Self {
        let mut pieces = BTreeMap::new();
        pieces.insert(0, (space.len(), 0));
        let mut histogram = BTreeMap::new();
        histogram.insert(0, Rational::one());
        Self { space, pieces, histogram, normalizer: Rational::zero(), len: 0 }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn normalizer(&self) -> &Rational {
        &self.normalizer
    }

    /// Count -> mass, ascending by count.
    pub fn histogram(&self) -> &BTreeMap<u64, Rational> {
        &self.histogram
    }

    /// Coverage count of a single atom.
    pub fn count_at(&self, atom: usize) -> u64 {
        self.pieces.range(..=atom).next_back().map(|(_, &(_, c))| c).unwrap_or(0)
    }

    pub fn push(&mut self, event: &Event) {
        debug_assert_eq!(event.space().len(), self.space.len());
        for run in event.members().runs() {
            self.split_at(run.start);
            self.split_at(run.end);
            let starts: Vec<usize> = self.pieces.range(run.start..run.end).map(|(&s, _)| s).collect();
            for s in starts {
                let (e, c) = self.pieces[&s];
                let mass = self.space.mass(s..e);
                if !mass.is_zero() {
                    let slot = self.histogram.get_mut(&c).expect("count present in histogram");
                    *slot -= &mass;
                    if slot.is_zero() {
                        self.histogram.remove(&c);
                    }
                    *self.histogram.entry(c + 1).or_insert_with(Rational::zero) += mass;
                }
                self.pieces.insert(s, (e, c + 1));
            }
            self.merge_at(run.start);
            self.merge_at(run.end);
        }
        self.normalizer += event.prob();
        self.len += 1;
    }

    fn split_at(&mut self, pos: usize) {
        if pos == 0 || pos >= self.space.len() {
            return;
        }
        let (&s, &(e, c)) = self.pieces.range(..=pos).next_back().expect("pieces tile the space");
        if s < pos {
            self.pieces.insert(s, (pos, c));
            self.pieces.insert(pos, (e, c));
        }
    }

    fn merge_at(&mut self, pos: usize) {
        let Some(&(e, c)) = self.pieces.get(&pos) else {
            return;
        };
        let Some((&ls, &(_, lc))) = self.pieces.range(..pos).next_back() else {
            return;
        };
        if lc == c {
            self.pieces.remove(&pos);
            self.pieces.insert(ls, (e, c));
        }
    }

    fn require_mass(&self) -> Result<()> {
        if self.len == 0 {
            return Err(Error::domain("empty prefix"));
        }
        if self.normalizer.is_zero() {
            return Err(Error::domain("prefix events have zero total probability"));
        }
        Ok(())
    }

    /// `E(α_n^k)` exactly, for an integer `k ≥ 1`.
    pub fn integer_moment(&self, k: u32) -> Result<Rational> {
        self.require_mass()?;
        let s_k = num_traits::pow(self.normalizer.clone(), k as usize);
        let sum = self
            .histogram
            .iter()
            .fold(Rational::zero(), |acc, (&c, mass)| acc + mass * num_traits::pow(int(c as i64), k as usize));
        Ok(sum / s_k)
    }

    /// `E(α_n^p)`, exact for integer `p`, otherwise a lower approximation
    /// within `2^-bits` of the true value (masses sum to one).
    pub fn moment(&self, p: &Exponent, bits: u32) -> Result<Rational> {
        if p.is_integer() {
            let k = p.value().to_integer().to_u32().ok_or_else(|| Error::domain("exponent too large"))?;
            return self.integer_moment(k);
        }
        self.require_mass()?;
        let mut sum = Rational::zero();
        for (&c, mass) in &self.histogram {
            if c == 0 {
                continue;
            }
            let alpha = int(c as i64) / &self.normalizer;
            let powered = pow_rational(&alpha, p.value(), bits + 8).expect("positive base");
            sum += mass * powered;
        }
        Ok(truncate_bits(&sum, bits))
    }
}

/// Feeds `A_τ(1), ..., A_τ(n_max)` into a profile, calling `visit` after each.
pub fn scan_prefixes<F>(seq: &EventSequence, tau: &Subsequence, n_max: usize, mut visit: F) -> Result<()>
where
    F: FnMut(usize, &CountProfile) -> Result<()>,
{
    let mut profile = CountProfile::new(seq.space().clone());
    let mut last = 0;
    for n in 1..=n_max {
        let k = tau.apply(n)?;
        if k <= last {
            return Err(Error::domain(format!("subsequence is not strictly increasing at n = {n}")));
        }
        last = k;
        profile.push(&seq.event(k)?);
        visit(n, &profile)?;
    }
    Ok(())
}

pub fn prefix_profile(seq: &EventSequence, tau: &Subsequence, n: usize) -> Result<CountProfile> {
    let mut out = None;
    scan_prefixes(seq, tau, n, |k, prof| {
        if k == n {
            out = Some(prof.clone());
        }
        Ok(())
    })?;
    out.ok_or_else(|| Error::domain("empty prefix"))
}

/// `E(α_n^p)` for one prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixMoment {
    pub n: usize,
    pub p: Exponent,
    /// Nearest f64 to `approx`.
    pub value: f64,
    /// Exact value when `p` is an integer, otherwise a `2^-bits` lower
    /// approximation.
    pub approx: Rational,
    pub exact: Option<Rational>,
}

impl PrefixMoment {
    fn from_profile(profile: &CountProfile, p: &Exponent, bits: u32) -> Result<Self> {
        let approx = profile.moment(p, bits)?;
        Ok(Self {
            n: profile.len(),
            p: p.clone(),
            value: to_f64(&approx),
            exact: p.is_integer().then(|| approx.clone()),
            approx,
        })
    }
}

pub fn alpha_moment(seq: &EventSequence, tau: &Subsequence, n: usize, p: &Exponent) -> Result<PrefixMoment> {
    alpha_moment_with_precision(seq, tau, n, p, DEFAULT_PRECISION_BITS)
}

pub fn alpha_moment_with_precision(
    seq: &EventSequence,
    tau: &Subsequence,
    n: usize,
    p: &Exponent,
    bits: u32,
) -> Result<PrefixMoment> {
    if n == 0 {
        return Err(Error::domain("prefix length must be at least 1"));
    }
    PrefixMoment::from_profile(&prefix_profile(seq, tau, n)?, p, bits)
}

/// `1 / E(α_n²)`, exactly.
pub fn er_prefix(seq: &EventSequence, tau: &Subsequence, n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::domain("prefix length must be at least 1"));
    }
    Ok(prefix_profile(seq, tau, n)?.integer_moment(2)?.recip())
}

/// First prefix length of the trailing window `[⌈(1 - w)N⌉, N]`, at least 1.
pub fn window_start(n_max: usize, window: f64) -> Result<usize> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::domain(format!("window must lie in (0, 1], got {window}")));
    }
    let start = ((1.0 - window) * n_max as f64).ceil() as usize;
    Ok(start.clamp(1, n_max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErEstimate {
    pub value: Rational,
    pub argmax: usize,
    pub window: (usize, usize),
}

/// Windowed maximum of [`er_prefix`], the surrogate for the limsup.
pub fn er_estimate(seq: &EventSequence, tau: &Subsequence, n_max: usize, window: f64) -> Result<ErEstimate> {
    if n_max < 2 {
        return Err(Error::domain("N must be at least 2"));
    }
    let start = window_start(n_max, window)?;
    let mut best: Option<(Rational, usize)> = None;
    scan_prefixes(seq, tau, n_max, |n, prof| {
        if n >= start {
            let v = prof.integer_moment(2)?.recip();
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, n));
            }
        }
        Ok(())
    })?;
    let (value, argmax) = best.expect("window is nonempty");
    Ok(ErEstimate { value, argmax, window: (start, n_max) })
}

/// One exponent of the MS scan.
#[derive(Debug, Clone, PartialEq)]
pub struct MsPoint {
    pub p: Exponent,
    /// Windowed max of `E(α_n^p)^{1/(1-p)}`.
    pub powered: Rational,
    pub powered_value: f64,
    pub powered_argmax: usize,
    /// Windowed max of `E(α_n^p)` itself.
    pub moment: Rational,
    pub moment_value: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MsEstimate {
    pub curve: Vec<MsPoint>,
    /// Supremum of the powered values over the grid.
    pub sup: f64,
    pub sup_p: Exponent,
    /// The small-exponent form: windowed max of `E(α_n^p)` at the smallest
    /// grid exponent.
    pub limit_form: f64,
    pub limit_p: Exponent,
    pub window: (usize, usize),
}

/// Windowed MS surrogate: for each `p` the maximum over the window of
/// `E(α_n^p)^{1/(1-p)}`, then the supremum over the grid.
pub fn ms_estimate(
    seq: &EventSequence,
    tau: &Subsequence,
    n_max: usize,
    window: f64,
    grid: &[Exponent],
) -> Result<MsEstimate> {
    ms_estimate_with_precision(seq, tau, n_max, window, grid, DEFAULT_PRECISION_BITS)
}

pub fn ms_estimate_with_precision(
    seq: &EventSequence,
    tau: &Subsequence,
    n_max: usize,
    window: f64,
    grid: &[Exponent],
    bits: u32,
) -> Result<MsEstimate> {
    if grid.is_empty() {
        return Err(Error::domain("empty exponent grid"));
    }
    if let Some(p) = grid.iter().find(|p| p.is_one()) {
        return Err(Error::domain(format!("exponent {p} is not allowed (p must differ from 1)")));
    }
    if n_max < 2 {
        return Err(Error::domain("N must be at least 2"));
    }
    let start = window_start(n_max, window)?;
    let duals: Vec<Rational> = grid.iter().map(|p| p.dual().expect("p ≠ 1")).collect();
    let mut best: Vec<Option<(Rational, usize, Rational)>> = vec![None; grid.len()];

    scan_prefixes(seq, tau, n_max, |n, prof| {
        if n < start {
            return Ok(());
        }
        for ((p, dual), slot) in grid.iter().zip(&duals).zip(best.iter_mut()) {
            let m = prof.moment(p, bits)?;
            let powered = if p.is_integer() && is_integer(dual) {
                pow_rational(&m, dual, bits).expect("moment is positive")
            } else {
                truncate_bits(&pow_rational(&m, dual, bits + 8).expect("moment is positive"), bits)
            };
            match slot {
                None => *slot = Some((powered, n, m)),
                Some((bp, bn, bm)) => {
                    if powered > *bp {
                        *bp = powered;
                        *bn = n;
                    }
                    if m > *bm {
                        *bm = m;
                    }
                }
            }
        }
        Ok(())
    })?;

    let curve: Vec<MsPoint> = grid
        .iter()
        .zip(best)
        .zip(&duals)
        .map(|((p, b), dual)| {
            let (powered, argmax, moment) = b.expect("window is nonempty");
            MsPoint {
                p: p.clone(),
                powered_value: to_f64(&powered),
                powered,
                powered_argmax: argmax,
                moment_value: to_f64(&moment),
                moment,
                exact: p.is_integer() && is_integer(dual),
            }
        })
        .collect();
    let sup_point = curve.iter().max_by(|a, b| a.powered.cmp(&b.powered)).expect("nonempty grid");
    let limit_point = curve.iter().min_by(|a, b| a.p.cmp(&b.p)).expect("nonempty grid");
    Ok(MsEstimate {
        sup: sup_point.powered_value,
        sup_p: sup_point.p.clone(),
        limit_form: limit_point.moment_value,
        limit_p: limit_point.p.clone(),
        window: (start, n_max),
        curve,
    })
}
