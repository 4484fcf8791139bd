//! Monte Carlo estimation of disagreement probabilities under any of
//! the couplings, with binomial standard errors.

use crate::couplings::{sample, CouplingKind};
use crate::dist::Family;
use crate::error::{Error, Result};
use crate::randomness::replicate_seed;

/// Smallest replicate count accepted; below this the normal-theory
/// error bars are not worth printing.
pub const MIN_SAMPLES: u64 = 1_000;

/// An event to tally: disagreement of one pair, or "not all equal"
/// over a listed tuple of members.
#[derive(Clone, Debug)]
pub enum EventSpec {
    Pair(String, String),
    Tuple(Vec<String>),
}

impl EventSpec {
    fn label(&self) -> String {
        match self {
            EventSpec::Pair(a, b) => format!("{a}!={b}"),
            EventSpec::Tuple(names) => format!("not-all-equal:{}", names.join("|")),
        }
    }

    fn resolve(&self, family: &Family) -> Result<Vec<usize>> {
        match self {
            EventSpec::Pair(a, b) => Ok(vec![family.index_of(a)?, family.index_of(b)?]),
            EventSpec::Tuple(names) => {
                if names.len() < 2 {
                    return Err(Error::DomainError(
                        "tuple events need at least two members".into(),
                    ));
                }
                names.iter().map(|n| family.index_of(n)).collect()
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct McEstimate {
    pub label: String,
    pub estimate: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
}

/// Runs `n` independent draws of the chosen coupling, each from its own
/// derived seed, and tallies every requested event. Estimates are
/// disagreement frequencies; stderr = sqrt(p(1-p)/n).
pub fn mc_estimate(
    family: &Family,
    kind: CouplingKind,
    events: &[EventSpec],
    n: u64,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    if n < MIN_SAMPLES {
        return Err(Error::DomainError(format!(
            "need at least {MIN_SAMPLES} replicates, got {n}"
        )));
    }
    let resolved: Vec<Vec<usize>> = events
        .iter()
        .map(|e| e.resolve(family))
        .collect::<Result<_>>()?;
    let mut counts = vec![0u64; events.len()];
    for r in 0..n {
        let draw = sample(family, kind, replicate_seed(seed, r))?;
        for (slot, members) in resolved.iter().enumerate() {
            let first = draw.value(members[0]);
            if members[1..].iter().any(|&m| draw.value(m) != first) {
                counts[slot] += 1;
            }
        }
    }
    Ok(events
        .iter()
        .zip(&counts)
        .map(|(event, &count)| {
            let p = count as f64 / n as f64;
            McEstimate {
                label: event.label(),
                estimate: p,
                stderr: (p * (1.0 - p) / n as f64).sqrt(),
                n,
                seed,
            }
        })
        .collect())
}
