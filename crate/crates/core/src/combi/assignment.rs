//! Assignments z: one chosen element per size-n subset (or 0 for "none"),
//! with exact disagreement counting and the two lemma checks built on it.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::space::{
    distant_pair_threshold, pair_totals, total_disagreement_lower, SubsetSpace,
};
use crate::error::{Error, Result};

/// Largest subset count the quadratic pair scan accepts.
pub const PAIR_SCAN_CAP: usize = 20_000;

/// A choice function on a subset space. choices[i] is an element of
/// subset i, or 0 when the subset selects nothing. A zero choice counts
/// as disagreeing with every other subset, zeros included.
#[derive(Clone, Debug)]
pub struct Assignment {
    space: Arc<SubsetSpace>,
    choices: Vec<u32>,
}

/// Exact disagreement counts by distance: counts[m] is the number of
/// ordered pairs at distance m whose choices differ, for m = 1..=k.
#[derive(Clone, Debug, PartialEq)]
pub struct DisagreementProfile {
    pub counts: BTreeMap<u32, BigUint>,
    pub totals: BTreeMap<u32, BigUint>,
}

impl DisagreementProfile {
    pub fn at(&self, m: u32) -> BigUint {
        self.counts.get(&m).cloned().unwrap_or_default()
    }

    /// Sum of D_m over m = 1..=k.
    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }
}

#[derive(Clone, Debug)]
pub struct DistantBoundCheck {
    pub distant: BigUint,
    pub threshold: Ratio<BigUint>,
    pub meets: bool,
}

#[derive(Clone, Debug)]
pub struct PerturbedBoundCheck {
    pub total: BigUint,
    pub epsilon: Ratio<BigUint>,
    pub lower: BigUint,
    pub rhs: BigRational,
    pub holds: bool,
    pub slack: BigRational,
}

#[derive(Serialize, Deserialize)]
struct AssignmentFile {
    n: u64,
    k: u64,
    choices: Vec<ChoiceFile>,
}

#[derive(Serialize, Deserialize)]
struct ChoiceFile {
    subset: String,
    choice: u32,
}

impl Assignment {
    pub fn from_choices(space: Arc<SubsetSpace>, choices: Vec<u32>) -> Result<Assignment> {
        if choices.len() != space.count() {
            return Err(Error::ShapeError(format!(
                "{} choices for {} subsets",
                choices.len(),
                space.count()
            )));
        }
        for (i, &c) in choices.iter().enumerate() {
            if c != 0 && !space.contains(i, c) {
                return Err(Error::InvalidAssignment {
                    subset: space.label(i),
                    reason: format!("{c} is not an element"),
                });
            }
        }
        Ok(Assignment { space, choices })
    }

    /// z_I = min(I).
    pub fn greedy(n: u64, k: u64) -> Result<Assignment> {
        let space = Arc::new(SubsetSpace::new(n, k)?);
        let choices = (0..space.count()).map(|i| space.min_element(i)).collect();
        Ok(Assignment { space, choices })
    }

    /// z_I = the element of I congruent to mult * sum(I) mod modulus,
    /// with residue 0 standing for the value `modulus`. Because the
    /// modulus is at least n+k, at most one element can match; a subset
    /// with no match makes the assignment invalid.
    pub fn affine_mod(n: u64, k: u64, mult: u64, modulus: u64) -> Result<Assignment> {
        if modulus < n + k {
            return Err(Error::DomainError(format!(
                "modulus {modulus} below ground size {}",
                n + k
            )));
        }
        let space = Arc::new(SubsetSpace::new(n, k)?);
        let mut choices = Vec::with_capacity(space.count());
        for i in 0..space.count() {
            let t = (mult % modulus) * (space.element_sum(i) % modulus) % modulus;
            let r = if t == 0 { modulus } else { t };
            if r <= (n + k) && space.contains(i, r as u32) {
                choices.push(r as u32);
            } else {
                return Err(Error::InvalidAssignment {
                    subset: space.label(i),
                    reason: format!("no element congruent to {t} mod {modulus}"),
                });
            }
        }
        Ok(Assignment { space, choices })
    }

    pub fn space(&self) -> &Arc<SubsetSpace> {
        &self.space
    }

    pub fn choices(&self) -> &[u32] {
        &self.choices
    }

    pub fn zero_count(&self) -> usize {
        self.choices.iter().filter(|&&c| c == 0).count()
    }

    /// Fraction of subsets with no choice, as an exact rational.
    pub fn epsilon(&self) -> Ratio<BigUint> {
        Ratio::new(
            BigUint::from(self.zero_count()),
            BigUint::from(self.space.count()),
        )
    }

    /// How many subsets choose each value; index v in 0..=n+k.
    pub fn value_class_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.space.ground() as usize + 1];
        for &c in &self.choices {
            sizes[c as usize] += 1;
        }
        sizes
    }

    pub fn disagreement_profile(&self) -> Result<DisagreementProfile> {
        let nsub = self.space.count();
        if nsub > PAIR_SCAN_CAP {
            return Err(Error::TooLarge(format!(
                "{nsub} subsets exceeds pair scan cap {PAIR_SCAN_CAP}"
            )));
        }
        let k = self.space.k();
        let mut counts = vec![0u64; k as usize + 1];
        for i in 0..nsub {
            let zi = self.choices[i];
            for j in i + 1..nsub {
                let zj = self.choices[j];
                if zi == 0 || zi != zj {
                    // Ordered pairs: each unordered disagreement counts twice.
                    counts[self.space.distance(i, j) as usize] += 2;
                }
            }
        }
        let totals = pair_totals(self.space.n() as u64, k as u64)?;
        Ok(DisagreementProfile {
            counts: (1..=k).map(|m| (m, BigUint::from(counts[m as usize]))).collect(),
            totals: (1..=k)
                .map(|m| (m, totals.get(&m).cloned().unwrap_or_default()))
                .collect(),
        })
    }

    /// D_k against the threshold 2k/(n+k) * (distance-k pair total).
    pub fn check_distant_bound(&self) -> Result<DistantBoundCheck> {
        let profile = self.disagreement_profile()?;
        let threshold =
            distant_pair_threshold(self.space.n() as u64, self.space.k() as u64)?;
        let distant = profile.at(self.space.k());
        let meets = Ratio::from_integer(distant.clone()) >= threshold;
        Ok(DistantBoundCheck { distant, threshold, meets })
    }

    /// Total disagreements against (1 - eps^2 (n+k)^2 / n^2) * lower,
    /// the zero-tolerant weakening of the total lower bound.
    pub fn check_perturbed_bound(&self) -> Result<PerturbedBoundCheck> {
        let (n, k) = (self.space.n() as u64, self.space.k() as u64);
        let profile = self.disagreement_profile()?;
        let total = profile.total();
        let epsilon = self.epsilon();
        let lower = total_disagreement_lower(n, k)?;
        let signed = |x: &BigUint| BigInt::from(x.clone());
        let eps = BigRational::new(signed(epsilon.numer()), signed(epsilon.denom()));
        let ratio = BigRational::new(BigInt::from(n + k), BigInt::from(n));
        let factor = BigRational::one() - &eps * &eps * &ratio * &ratio;
        let rhs = factor * BigRational::from_integer(signed(&lower));
        let total_signed = BigRational::from_integer(signed(&total));
        let holds = total_signed >= rhs;
        let slack = total_signed - rhs.clone();
        Ok(PerturbedBoundCheck { total, epsilon, lower, rhs, holds, slack })
    }

    pub fn to_json(&self) -> String {
        let file = AssignmentFile {
            n: self.space.n() as u64,
            k: self.space.k() as u64,
            choices: self
                .choices
                .iter()
                .enumerate()
                .map(|(i, &c)| ChoiceFile { subset: self.space.label(i), choice: c })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("assignment serializes")
    }

    pub fn from_json(text: &str) -> Result<Assignment> {
        let file: AssignmentFile = serde_json::from_str(text)
            .map_err(|e| Error::ShapeError(format!("assignment json: {e}")))?;
        let space = Arc::new(SubsetSpace::new(file.n, file.k)?);
        let index: HashMap<String, usize> =
            (0..space.count()).map(|i| (space.label(i), i)).collect();
        let mut choices = vec![u32::MAX; space.count()];
        for entry in &file.choices {
            let &i = index.get(&entry.subset).ok_or_else(|| Error::InvalidAssignment {
                subset: entry.subset.clone(),
                reason: "unknown subset".into(),
            })?;
            if choices[i] != u32::MAX {
                return Err(Error::InvalidAssignment {
                    subset: entry.subset.clone(),
                    reason: "duplicate subset".into(),
                });
            }
            choices[i] = entry.choice;
        }
        if let Some(i) = choices.iter().position(|&c| c == u32::MAX) {
            return Err(Error::InvalidAssignment {
                subset: space.label(i),
                reason: "missing from file".into(),
            });
        }
        Assignment::from_choices(space, choices)
    }
}

#[cfg(test)]
mod tests {
    use super::super::space::binomial;
    use super::*;
    use num_traits::Zero;

    #[test]
    fn greedy_3_2_profile() {
        let z = Assignment::greedy(3, 2).unwrap();
        let profile = z.disagreement_profile().unwrap();
        assert_eq!(profile.at(2), BigUint::from(24u32));
        assert_eq!(profile.total(), BigUint::from(54u32));
        let check = z.check_distant_bound().unwrap();
        assert!(check.meets);
        assert_eq!(
            Ratio::from_integer(check.distant),
            check.threshold,
            "greedy sits exactly on the threshold"
        );
    }

    #[test]
    fn greedy_value_classes_are_binomials() {
        for (n, k) in [(3u64, 2u64), (5, 3), (2, 3), (6, 1)] {
            let z = Assignment::greedy(n, k).unwrap();
            let sizes = z.value_class_sizes();
            assert_eq!(sizes[0], 0);
            for i in 1..=(k + 1) {
                assert_eq!(
                    BigUint::from(sizes[i as usize]),
                    binomial(n + k - i, (k + 1) - i),
                    "({n},{k}) class {i}"
                );
            }
            for i in (k + 2)..=(n + k) {
                assert_eq!(sizes[i as usize], 0, "({n},{k}) class {i}");
            }
        }
    }

    #[test]
    fn mod5_on_3_2_beats_greedy() {
        let z = Assignment::affine_mod(3, 2, 2, 5).unwrap();
        let profile = z.disagreement_profile().unwrap();
        assert_eq!(profile.at(2), BigUint::from(20u32));
        let check = z.check_distant_bound().unwrap();
        assert!(!check.meets, "20 < 24");
    }

    #[test]
    fn affine_mod_rejects_small_modulus() {
        assert!(matches!(
            Assignment::affine_mod(3, 2, 2, 4),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn affine_mod_mult_1_misses() {
        // sum({3,4,5}) = 12 = 2 mod 5, and 2 is not in the subset.
        match Assignment::affine_mod(3, 2, 1, 5) {
            Err(Error::InvalidAssignment { subset, .. }) => assert_eq!(subset, "3-4-5"),
            other => panic!("expected invalid assignment, got {other:?}"),
        }
    }

    #[test]
    fn greedy_total_matches_lower_for_small_sizes() {
        for (n, k) in [(2u64, 1u64), (3, 1), (2, 2), (3, 2), (2, 3), (4, 3)] {
            let z = Assignment::greedy(n, k).unwrap();
            let total = z.disagreement_profile().unwrap().total();
            assert_eq!(total, total_disagreement_lower(n, k).unwrap(), "({n},{k})");
        }
    }

    #[test]
    fn profile_counts_within_totals() {
        let z = Assignment::affine_mod(4, 2, 3, 7).unwrap_or_else(|_| {
            Assignment::greedy(4, 2).unwrap()
        });
        let profile = z.disagreement_profile().unwrap();
        for (m, d) in &profile.counts {
            assert!(d <= &profile.totals[m]);
        }
    }

    #[test]
    fn perturbed_bound_greedy_with_one_zero() {
        let z = Assignment::greedy(3, 2).unwrap();
        let mut choices = z.choices().to_vec();
        choices[0] = 0;
        let z = Assignment::from_choices(z.space().clone(), choices).unwrap();
        assert_eq!(
            z.epsilon(),
            Ratio::new(BigUint::one(), BigUint::from(10u32))
        );
        let check = z.check_perturbed_bound().unwrap();
        assert!(check.holds);
        assert!(check.slack >= BigRational::zero());
    }

    #[test]
    fn perturbed_bound_zero_free_is_plain_lower_bound() {
        let z = Assignment::greedy(4, 2).unwrap();
        let check = z.check_perturbed_bound().unwrap();
        assert_eq!(check.rhs, BigRational::from_integer(check.lower.clone().into()));
        assert!(check.holds);
        assert_eq!(check.slack, BigRational::zero(), "greedy attains equality");
    }

    #[test]
    fn all_zero_assignment_rhs_nonpositive() {
        // eps = 1 makes the factor 1 - (n+k)^2/n^2 negative, so the
        // weakened bound holds vacuously.
        let space = Arc::new(SubsetSpace::new(2, 2).unwrap());
        let z = Assignment::from_choices(space, vec![0; 6]).unwrap();
        let check = z.check_perturbed_bound().unwrap();
        assert!(check.rhs < BigRational::zero());
        assert!(check.holds);
    }

    #[test]
    fn from_choices_validates_membership() {
        let space = Arc::new(SubsetSpace::new(3, 2).unwrap());
        let mut choices: Vec<u32> = (0..space.count())
            .map(|i| space.min_element(i))
            .collect();
        choices[0] = 1; // subset {3,4,5} does not contain 1
        assert!(matches!(
            Assignment::from_choices(space, choices),
            Err(Error::InvalidAssignment { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let z = Assignment::affine_mod(3, 2, 2, 5).unwrap();
        let text = z.to_json();
        let back = Assignment::from_json(&text).unwrap();
        assert_eq!(back.choices(), z.choices());
        assert!(text.contains("\"subset\": \"3-4-5\""));
    }
}
