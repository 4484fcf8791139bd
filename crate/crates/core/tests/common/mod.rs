//! Deterministic random instances shared by the integration suites.

use tvcouple::randomness::SplitMix64;
use tvcouple::{DiscreteDistribution, Family, Universe};

/// Universe "0".."m-1" for m in 2..=max_atoms.
pub fn random_universe(rng: &mut SplitMix64, max_atoms: usize) -> Universe {
    let m = 2 + rng.next_index(max_atoms - 1);
    let labels: Vec<String> = (0..m).map(|i| i.to_string()).collect();
    Universe::new(labels.iter().map(|s| s.as_str())).unwrap()
}

/// A random law with zeros kept common, so tight and disjoint pairs
/// appear regularly in sweeps.
pub fn random_distribution(rng: &mut SplitMix64, universe: &Universe) -> DiscreteDistribution {
    loop {
        let mut probs = vec![0.0; universe.len()];
        let mut total = 0.0;
        for p in probs.iter_mut() {
            if rng.next_unit() < 0.35 {
                continue;
            }
            *p = rng.next_unit();
            total += *p;
        }
        if total > 0.0 {
            for p in probs.iter_mut() {
                *p /= total;
            }
            return DiscreteDistribution::from_probs(universe, probs).unwrap();
        }
    }
}

pub fn random_pair_family(rng: &mut SplitMix64, max_atoms: usize) -> Family {
    let universe = random_universe(rng, max_atoms);
    let p = random_distribution(rng, &universe);
    let q = random_distribution(rng, &universe);
    Family::new(universe, vec![("P".to_string(), p), ("Q".to_string(), q)]).unwrap()
}

pub fn random_family(rng: &mut SplitMix64, max_atoms: usize, members: usize) -> Family {
    let universe = random_universe(rng, max_atoms);
    let list: Vec<(String, DiscreteDistribution)> = (0..members)
        .map(|i| (format!("V{i}"), random_distribution(rng, &universe)))
        .collect();
    Family::new(universe, list).unwrap()
}
