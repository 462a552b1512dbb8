//! The dyadic sequence `A_{2^{i-1}+k} = [k/2^i, (k+1)/2^i) ∪ [1/2, 1)` on a
//! uniform grid of `2^L` atoms, and the moment bound it satisfies:
//!
//! ```text
//! E(α_n^p) ≤ ((log₂ 2n)^p (1/2)^{1-p} + n^p / 2) / (n/2)^p,   0 < p < 1.
//! ```
//!
//! The chain behind it uses three facts, each checked separately by
//! [`verify_ce1_chain`]: every event has probability at least 1/2; the
//! left-half coverage integral `∫_{[0,1/2)} Σ I dP` is at most `log₂ 2n`;
//! and the resulting closed form dominates the moment.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{ratio, to_f64, Rational, DEFAULT_PRECISION_BITS};
use crate::sequence::{prefix_profile, EventSequence, Exponent, Subsequence};
use crate::space::{AtomSet, Event, FiniteSpace};

/// Largest supported resolution (`2^22` atoms).
pub const MAX_RESOLUTION: u32 = 22;

/// Relative slack applied to the right-hand side before comparing.
pub const RHS_SLACK: f64 = 1.0 / (1u64 << 40) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicConfig {
    resolution: u32,
}

impl DyadicConfig {
    pub fn new(resolution: u32) -> Result<Self> {
        if resolution == 0 || resolution > MAX_RESOLUTION {
            return Err(Error::Resource(format!("resolution {resolution} outside 1..={MAX_RESOLUTION}")));
        }
        Ok(Self { resolution })
    }

    /// Smallest resolution whose grid aligns every event up to `max_index`.
    pub fn for_max_index(max_index: usize) -> Result<Self> {
        let max_index = max_index.max(1);
        let levels = usize::BITS - (max_index - 1).leading_zeros();
        Self::new(levels + 1)
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn atoms(&self) -> usize {
        1 << self.resolution
    }

    pub fn max_index(&self) -> usize {
        1 << (self.resolution - 1)
    }
}

/// `n = 2^{i-1} + k` with `0 ≤ k < 2^{i-1}`.
pub fn decompose(n: usize) -> (u32, usize) {
    assert!(n >= 1);
    let i = usize::BITS - n.leading_zeros();
    (i, n - (1 << (i - 1)))
}

#[derive(Debug, Clone)]
pub struct DyadicSequence {
    config: DyadicConfig,
    space: Arc<FiniteSpace>,
}

impl DyadicSequence {
    pub fn new(config: DyadicConfig) -> Self {
        Self { space: Arc::new(FiniteSpace::uniform(config.atoms())), config }
    }

    pub fn config(&self) -> DyadicConfig {
        self.config
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        &self.space
    }

    pub fn event(&self, n: usize) -> Result<Event> {
        dyadic_event_in(&self.config, &self.space, n)
    }
}

/// The `n`-th dyadic event in a fresh uniform space of the configured size.
pub fn dyadic_event(cfg: &DyadicConfig, n: usize) -> Result<Event> {
    dyadic_event_in(cfg, &Arc::new(FiniteSpace::uniform(cfg.atoms())), n)
}

fn dyadic_event_in(cfg: &DyadicConfig, space: &Arc<FiniteSpace>, n: usize) -> Result<Event> {
    if n == 0 || n > cfg.max_index() {
        return Err(Error::Resource(format!(
            "dyadic index {n} outside 1..={} at resolution {}",
            cfg.max_index(),
            cfg.resolution()
        )));
    }
    let (i, k) = decompose(n);
    let width = 1usize << (cfg.resolution() - i);
    let half = cfg.atoms() / 2;
    let members = AtomSet::from_ranges([k * width..(k + 1) * width, half..cfg.atoms()]);
    Event::new(format!("D{n}"), space.clone(), members)
}

/// `P(A_n ∩ [0, 1/2))`: `1/2` for `n = 1`, else `2^{-i}`.
pub fn left_half_mass(n: usize) -> Rational {
    let (i, _) = decompose(n);
    if i == 1 {
        ratio(1, 2)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << i)
    }
}

/// `((log₂ 2n)^p (1/2)^{1-p} + n^p/2) / (n/2)^p`.
pub fn ce1_bound_rhs(n: usize, p: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p must lie in (0, 1), got {p}")));
    }
    let n = n as f64;
    let log_term = (2.0 * n).log2().powf(p) * 0.5f64.powf(1.0 - p);
    Ok((log_term + n.powf(p) / 2.0) / (n / 2.0).powf(p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub n: usize,
    pub p: Exponent,
    /// Smallest `P(A_τ(i))`.
    pub min_prob: Rational,
    pub step_a: bool,
    /// `∫_{[0,1/2)} Σ_{i≤n} I_{A_τ(i)} dP`.
    pub left_integral: Rational,
    pub log_bound: f64,
    pub step_b: bool,
    /// `leftmass(τ(i)) ≤ leftmass(i)` for every `i ≤ n`.
    pub monotone: bool,
    pub moment: Rational,
    pub moment_value: f64,
    pub rhs: f64,
    pub step_c: bool,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.step_a && self.step_b && self.monotone && self.step_c
    }
}

/// Checks the three steps of the moment bound on the prefix
/// `A_τ(1), ..., A_τ(n)` of the dyadic sequence.
pub fn verify_ce1_chain(cfg: &DyadicConfig, tau: &Subsequence, n: usize, p: &Exponent) -> Result<ChainReport> {
    let pf = p.to_f64();
    if *p.value() >= Rational::one() {
        return Err(Error::domain(format!("p must lie in (0, 1), got {p}")));
    }
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let indices = tau.materialize(n)?;
    let last = *indices.last().expect("n ≥ 1");
    if last > cfg.max_index() {
        return Err(Error::Resource(format!(
            "τ({n}) = {last} exceeds the largest index {} at resolution {}",
            cfg.max_index(),
            cfg.resolution()
        )));
    }
    let seq = EventSequence::Dyadic(DyadicSequence::new(*cfg));

    let half = ratio(1, 2);
    let mut min_prob: Option<Rational> = None;
    let mut left_integral = Rational::zero();
    let mut monotone = true;
    for (pos, &k) in indices.iter().enumerate() {
        let prob = seq.event(k)?.prob();
        if min_prob.as_ref().is_none_or(|m| prob < *m) {
            min_prob = Some(prob);
        }
        let lm = left_half_mass(k);
        monotone &= lm <= left_half_mass(pos + 1);
        left_integral += lm;
    }
    let min_prob = min_prob.expect("n ≥ 1");
    let step_a = min_prob >= half;
    let log_bound = ((2 * n) as f64).log2();
    let step_b = rational_le_log2(&left_integral, 2 * n);

    let profile = prefix_profile(&seq, tau, n)?;
    let moment = profile.moment(p, DEFAULT_PRECISION_BITS)?;
    let moment_value = to_f64(&moment);
    let rhs = ce1_bound_rhs(n, pf)?;
    // `moment` is at most 2^-128 below the true value, far inside the slack.
    let step_c = moment_value <= rhs * (1.0 + RHS_SLACK);

    Ok(ChainReport {
        n,
        p: p.clone(),
        min_prob,
        step_a,
        left_integral,
        log_bound,
        step_b,
        monotone,
        moment,
        moment_value,
        rhs,
        step_c,
    })
}

/// `x ≤ log₂(m)` without rounding when `m` is a power of two or `x` is
/// clear of the neighbouring integers.
fn rational_le_log2(x: &Rational, m: usize) -> bool {
    let floor_log = (usize::BITS - 1 - m.leading_zeros()) as i64;
    if *x <= Rational::from_integer(floor_log.into()) {
        return true;
    }
    if m.is_power_of_two() || *x > Rational::from_integer((floor_log + 1).into()) {
        return false;
    }
    to_f64(x) <= (m as f64).log2()
}
