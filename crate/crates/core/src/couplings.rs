//! The couplings themselves: three ways to draw one value per family member
//! from shared randomness so that members with close laws usually agree.
//!
//! * clock: each member takes the atom minimizing clock(u) / p(u) over its
//!   support. Any pair disagrees with probability at most
//!   F(d) = 2d / (1 + d) in the pair's total variation distance d.
//! * race: members scan a shared stream of marked Poisson events and take
//!   the atom of the first event whose height falls under their own mass
//!   at that atom. Same pairwise guarantee, never better than clock
//!   atom-for-atom.
//! * star: one uniformly chosen pivot member is sampled from its law and
//!   every other member is maximally coupled to it; pairs involving the
//!   pivot disagree with probability exactly their total variation
//!   distance.

use crate::dist::{AtomId, DiscreteDistribution, Family};
use crate::error::{Error, Result};
use crate::randomness::{derive, ClockTable, PoissonStream, SplitMix64};

/// Which coupling produced a sample. The CLI tokens are `i` (race),
/// `ii` (clock), and `star`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CouplingKind {
    Race,
    Clock,
    Star,
}

impl CouplingKind {
    pub fn token(self) -> &'static str {
        match self {
            CouplingKind::Race => "i",
            CouplingKind::Clock => "ii",
            CouplingKind::Star => "star",
        }
    }

    pub fn from_token(s: &str) -> Result<CouplingKind> {
        match s {
            "i" => Ok(CouplingKind::Race),
            "ii" => Ok(CouplingKind::Clock),
            "star" => Ok(CouplingKind::Star),
            _ => Err(Error::DomainError(format!(
                "unknown coupling {s:?}; expected i, ii, or star"
            ))),
        }
    }
}

/// One value per family member, in member order.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleVector {
    kind: CouplingKind,
    seed: u64,
    values: Vec<AtomId>,
}

impl SampleVector {
    pub fn kind(&self) -> CouplingKind {
        self.kind
    }

    /// Seed of the randomness that produced this sample.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn values(&self) -> &[AtomId] {
        &self.values
    }

    pub fn value(&self, member: usize) -> AtomId {
        self.values[member]
    }

    /// (member name, atom label) pairs for display.
    pub fn labeled<'a>(&'a self, family: &'a Family) -> impl Iterator<Item = (&'a str, &'a str)> {
        family
            .names()
            .iter()
            .zip(&self.values)
            .map(|(n, &v)| (n.as_str(), family.universe().label(v)))
    }
}

/// Draw via the exponential-clock rule: argmin over the support of
/// clock(u) / p(u). Ties break to the smaller atom.
pub fn sample_clock(family: &Family, clocks: &ClockTable) -> Result<SampleVector> {
    if clocks.universe() != family.universe() {
        return Err(Error::UniverseMismatch(
            "clock table built for a different universe".into(),
        ));
    }
    let values = family
        .members()
        .iter()
        .map(|m| clock_argmin(m, clocks))
        .collect();
    Ok(SampleVector {
        kind: CouplingKind::Clock,
        seed: clocks.seed(),
        values,
    })
}

fn clock_argmin(dist: &DiscreteDistribution, clocks: &ClockTable) -> AtomId {
    let mut best = AtomId(0);
    let mut best_score = f64::INFINITY;
    for u in dist.support() {
        let score = clocks.clock(u) / dist.prob(u);
        if score < best_score {
            best_score = score;
            best = u;
        }
    }
    best
}

/// Draw via the Poisson race: each member takes the atom of the first
/// event whose height is at most the member's mass at that atom. Consumes
/// at most `max_events` events from the stream; if some member is still
/// unassigned afterwards the stream position is left where it stopped and
/// `ExhaustedStream` is returned (the stopping time is almost surely
/// finite, so retrying with a larger budget from a fresh stream succeeds).
pub fn sample_race(
    family: &Family,
    stream: &mut PoissonStream,
    max_events: u64,
) -> Result<SampleVector> {
    if stream.universe() != family.universe() {
        return Err(Error::UniverseMismatch(
            "event stream built for a different universe".into(),
        ));
    }
    let n = family.len();
    let mut values: Vec<Option<AtomId>> = vec![None; n];
    let mut unassigned = n;
    for _ in 0..max_events {
        let event = stream.next_event();
        for (i, member) in family.members().iter().enumerate() {
            if values[i].is_none() && event.height <= member.prob(event.atom) {
                values[i] = Some(event.atom);
                unassigned -= 1;
            }
        }
        if unassigned == 0 {
            return Ok(SampleVector {
                kind: CouplingKind::Race,
                seed: stream.seed(),
                values: values.into_iter().map(Option::unwrap).collect(),
            });
        }
    }
    Err(Error::ExhaustedStream {
        consumed: stream.position(),
    })
}

/// Default race budget: 64 events per universe atom.
pub fn race_budget(family: &Family) -> u64 {
    64 * family.universe().len() as u64
}

/// Race sampler with automatic retry: starts at the default budget and
/// doubles on exhaustion, replaying a fresh stream from the same seed each
/// attempt. The result is a pure function of (family, seed).
pub fn sample_race_auto(family: &Family, seed: u64) -> Result<SampleVector> {
    let mut budget = race_budget(family);
    for _ in 0..24 {
        let mut stream = PoissonStream::new(family.universe(), seed);
        match sample_race(family, &mut stream, budget) {
            Err(Error::ExhaustedStream { .. }) => budget *= 2,
            other => return other,
        }
    }
    Err(Error::ExhaustedStream { consumed: budget })
}

/// Draw via the star coupling: a uniformly chosen pivot member is sampled
/// from its own law, and every other member agrees with the pivot on their
/// overlap and otherwise samples the normalized excess of its law over the
/// pivot's.
pub fn sample_star(family: &Family, seed: u64) -> SampleVector {
    let mut rng = SplitMix64::new(derive(seed, "star", &[]));
    let pivot = rng.next_index(family.len());
    let pivot_dist = family.member(pivot);
    let pivot_value = inverse_cdf(pivot_dist, rng.next_unit());
    let pp = pivot_dist.prob(pivot_value);
    let mut values = vec![pivot_value; family.len()];
    for (i, member) in family.members().iter().enumerate() {
        if i == pivot {
            continue;
        }
        let overlap = member.prob(pivot_value).min(pp) / pp;
        if rng.next_unit() <= overlap {
            continue; // agree with the pivot
        }
        // Sample the normalized positive part (member - pivot)_+.
        let excess: Vec<f64> = member
            .probs()
            .iter()
            .zip(pivot_dist.probs())
            .map(|(&m, &p)| (m - p).max(0.0))
            .collect();
        let total: f64 = excess.iter().sum();
        values[i] = inverse_cdf_weights(&excess, total, rng.next_unit());
    }
    SampleVector {
        kind: CouplingKind::Star,
        seed,
        values,
    }
}

fn inverse_cdf(dist: &DiscreteDistribution, u: f64) -> AtomId {
    inverse_cdf_weights(dist.probs(), 1.0, u)
}

fn inverse_cdf_weights(weights: &[f64], total: f64, u: f64) -> AtomId {
    let target = u * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = i;
            if target <= acc {
                return AtomId(i as u32);
            }
        }
    }
    AtomId(last_positive as u32) // rounding left target marginally above acc
}

/// Convenience sampler dispatch used by Monte Carlo loops and the CLI.
pub fn sample(family: &Family, kind: CouplingKind, seed: u64) -> Result<SampleVector> {
    match kind {
        CouplingKind::Clock => {
            let clocks = ClockTable::generate(family.universe(), seed);
            sample_clock(family, &clocks)
        }
        CouplingKind::Race => sample_race_auto(family, seed),
        CouplingKind::Star => Ok(sample_star(family, seed)),
    }
}
