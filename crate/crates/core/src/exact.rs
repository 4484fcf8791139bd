//! Closed-form agreement probabilities for the two pairwise couplings, the
//! disagreement bound they satisfy, and the tuple-level bounds.
//!
//! Throughout, alpha denotes the total variation distance of the pair (or,
//! for tuples, 1 minus the sum of pointwise minima) and the bound is
//! F(alpha) = 2 alpha / (1 + alpha).

use crate::dist::{AtomId, DiscreteDistribution};
use crate::error::{Error, Result};

/// Tolerance used by the tightness predicate when comparing probabilities.
pub const TIGHT_TOLERANCE: f64 = 1e-12;

/// F(x) = 2x / (1 + x): the pairwise disagreement guarantee as a function
/// of total variation distance. Domain [0, 1].
pub fn disagreement_bound(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::DomainError(format!("x = {x} outside [0, 1]")));
    }
    Ok(2.0 * x / (1.0 + x))
}

/// Per-atom agreement probabilities P(X = Y = u) plus their sum.
#[derive(Clone, Debug)]
pub struct AgreementBreakdown {
    per_atom: Vec<f64>,
    total: f64,
}

impl AgreementBreakdown {
    fn new(per_atom: Vec<f64>) -> AgreementBreakdown {
        let total = per_atom.iter().sum();
        AgreementBreakdown { per_atom, total }
    }

    pub fn per_atom(&self) -> &[f64] {
        &self.per_atom
    }

    pub fn atom(&self, id: AtomId) -> f64 {
        self.per_atom[id.0 as usize]
    }

    /// P(X = Y).
    pub fn total(&self) -> f64 {
        self.total
    }

    /// P(X != Y).
    pub fn disagreement(&self) -> f64 {
        1.0 - self.total
    }
}

fn check_pair(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<()> {
    if p.universe() != q.universe() {
        return Err(Error::UniverseMismatch(
            "agreement formulas need a shared universe".into(),
        ));
    }
    Ok(())
}

/// Exact agreement of the exponential-clock coupling:
/// P(X = Y = u) = 1 / sum_v max(p_v / p_u, q_v / q_u) when both p_u and
/// q_u are positive, and 0 otherwise.
pub fn clock_agreement(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<AgreementBreakdown> {
    check_pair(p, q)?;
    let ps = p.probs();
    let qs = q.probs();
    let mut per_atom = vec![0.0; ps.len()];
    for u in 0..ps.len() {
        if ps[u] <= 0.0 || qs[u] <= 0.0 {
            continue;
        }
        let mut denom = 0.0;
        for v in 0..ps.len() {
            denom += (ps[v] / ps[u]).max(qs[v] / qs[u]);
        }
        per_atom[u] = 1.0 / denom;
    }
    Ok(AgreementBreakdown::new(per_atom))
}

/// Exact agreement of the Poisson-race coupling:
/// P(X = Y = u) = min(p_u, q_u) (1 + |p_u - q_u|) / (1 + alpha), where
/// alpha is the total variation distance.
pub fn race_agreement(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<AgreementBreakdown> {
    check_pair(p, q)?;
    let alpha = p.tv_distance(q)?;
    let scale = 1.0 / (1.0 + alpha);
    let per_atom = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&pu, &qu)| scale * pu.min(qu) * (1.0 + (pu - qu).abs()))
        .collect();
    Ok(AgreementBreakdown::new(per_atom))
}

/// True when every atom has either equal masses (within `TIGHT_TOLERANCE`)
/// or a vanishing minimum. Exactly in this case both couplings meet
/// F(alpha) with equality.
pub fn is_tight(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<bool> {
    check_pair(p, q)?;
    Ok(p.probs()
        .iter()
        .zip(q.probs())
        .all(|(&pu, &qu)| (pu - qu).abs() <= TIGHT_TOLERANCE || pu.min(qu) == 0.0))
}

/// Check that the clock coupling's per-atom agreement dominates the race
/// coupling's, atom by atom. Returns the first violating atom, or None
/// when the domination holds (it always should; a Some return is a bug
/// witness, not an expected outcome).
pub fn check_dominance(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<Option<AtomId>> {
    let clock = clock_agreement(p, q)?;
    let race = race_agreement(p, q)?;
    for u in 0..clock.per_atom().len() {
        if clock.per_atom()[u] < race.per_atom()[u] - 1e-12 {
            return Ok(Some(AtomId(u as u32)));
        }
    }
    Ok(None)
}

/// Lower bound on P(all k members equal) available to both couplings:
/// sum_u min_i p_i(u) / sum_u max_i p_i(u).
pub fn tuple_agreement_floor(members: &[&DiscreteDistribution]) -> Result<f64> {
    if members.len() < 2 {
        return Err(Error::DomainError("tuple needs at least 2 members".into()));
    }
    let universe = members[0].universe();
    for m in &members[1..] {
        if m.universe() != universe {
            return Err(Error::UniverseMismatch(
                "tuple members need a shared universe".into(),
            ));
        }
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for u in 0..universe.len() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for m in members {
            let p = m.probs()[u];
            lo = lo.min(p);
            hi = hi.max(p);
        }
        num += lo;
        den += hi;
    }
    Ok(num / den)
}

/// Upper bound k·alpha / (1 + (k-1)·alpha) on P(not all equal), where
/// alpha = 1 - sum_u min_i p_i(u).
pub fn tuple_disagreement_bound(alpha: f64, k: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::DomainError(format!("alpha = {alpha} outside [0, 1]")));
    }
    if k < 2 {
        return Err(Error::DomainError("k must be at least 2".into()));
    }
    Ok(k as f64 * alpha / (1.0 + (k as f64 - 1.0) * alpha))
}

/// 1 - sum_u min_i p_i(u) for a tuple of members.
pub fn tuple_alpha(members: &[&DiscreteDistribution]) -> Result<f64> {
    if members.len() < 2 {
        return Err(Error::DomainError("tuple needs at least 2 members".into()));
    }
    let universe = members[0].universe();
    for m in &members[1..] {
        if m.universe() != universe {
            return Err(Error::UniverseMismatch(
                "tuple members need a shared universe".into(),
            ));
        }
    }
    let mut s = 0.0;
    for u in 0..universe.len() {
        s += members
            .iter()
            .map(|m| m.probs()[u])
            .fold(f64::INFINITY, f64::min);
    }
    Ok((1.0 - s).clamp(0.0, 1.0))
}
