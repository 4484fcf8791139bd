//! The Q statistic on triples: ordered pairs of 3-subsets of {1..n}
//! sharing exactly one element whose choices fail to both equal that
//! shared element. The minimum assignment z_I = min(I) gives n_5/5;
//! the search looks for larger values.

use num_bigint::BigUint;

use super::space::binomial;
use crate::error::{Error, Result};
use crate::randomness::{derive, SplitMix64};

const Q_MAX_N: u32 = 12;

/// n(n-1)(n-2)(n-3)(n-4).
pub fn falling_5(n: u32) -> u64 {
    (0..5).map(|i| (n - i) as u64).product()
}

/// Number of ordered pairs (I, J) of 3-subsets with |I ∩ J| = 1, which
/// is n_5/4.
pub fn q_pair_total(n: u32) -> u64 {
    falling_5(n) / 4
}

/// All 3-subsets of {1..n} with the pairs sharing exactly one element.
#[derive(Debug)]
pub struct QSpace {
    n: u32,
    triples: Vec<[u32; 3]>,
    /// Unordered pairs (i, j, shared element).
    pairs: Vec<(u32, u32, u32)>,
    /// Per triple: (other triple, shared element).
    adj: Vec<Vec<(u32, u32)>>,
}

impl QSpace {
    pub fn new(n: u32) -> Result<QSpace> {
        if n < 5 {
            return Err(Error::DomainError(format!("need n >= 5, got {n}")));
        }
        if n > Q_MAX_N {
            return Err(Error::TooLarge(format!(
                "n = {n} exceeds the triple-space cap {Q_MAX_N}"
            )));
        }
        let mut triples = Vec::new();
        for a in 1..=n - 2 {
            for b in a + 1..=n - 1 {
                for c in b + 1..=n {
                    triples.push([a, b, c]);
                }
            }
        }
        debug_assert_eq!(
            BigUint::from(triples.len()),
            binomial(n as u64, 3)
        );
        let mut pairs = Vec::new();
        let mut adj = vec![Vec::new(); triples.len()];
        for i in 0..triples.len() {
            for j in i + 1..triples.len() {
                let shared: Vec<u32> = triples[i]
                    .iter()
                    .filter(|x| triples[j].contains(x))
                    .copied()
                    .collect();
                if shared.len() == 1 {
                    pairs.push((i as u32, j as u32, shared[0]));
                    adj[i].push((j as u32, shared[0]));
                    adj[j].push((i as u32, shared[0]));
                }
            }
        }
        debug_assert_eq!(2 * pairs.len() as u64, q_pair_total(n));
        Ok(QSpace { n, triples, pairs, adj })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn triples(&self) -> &[[u32; 3]] {
        &self.triples
    }

    pub fn label(&self, i: usize) -> String {
        let t = self.triples[i];
        format!("{}-{}-{}", t[0], t[1], t[2])
    }

    /// z_I = min(I).
    pub fn min_assignment(&self) -> Vec<u32> {
        self.triples.iter().map(|t| t[0]).collect()
    }

    fn validate(&self, choices: &[u32]) -> Result<()> {
        if choices.len() != self.triples.len() {
            return Err(Error::ShapeError(format!(
                "{} choices for {} triples",
                choices.len(),
                self.triples.len()
            )));
        }
        for (i, (&z, t)) in choices.iter().zip(&self.triples).enumerate() {
            if !t.contains(&z) {
                return Err(Error::DomainError(format!(
                    "choice {z} is not in triple {}",
                    self.label(i)
                )));
            }
        }
        Ok(())
    }

    /// Ordered pairs sharing one element where the choices do not both
    /// equal it.
    pub fn q_count(&self, choices: &[u32]) -> Result<u64> {
        self.validate(choices)?;
        let agreements = self
            .pairs
            .iter()
            .filter(|&&(i, j, x)| choices[i as usize] == x && choices[j as usize] == x)
            .count() as u64;
        Ok(2 * (self.pairs.len() as u64 - agreements))
    }

    /// Agreement tables for the search: cnt[i][v] counts neighbours J
    /// with shared element v currently choosing v.
    fn counts(&self, choices: &[u32]) -> Vec<Vec<u32>> {
        let mut cnt = vec![vec![0u32; self.n as usize + 1]; self.triples.len()];
        for (i, neighbors) in self.adj.iter().enumerate() {
            for &(j, x) in neighbors {
                if choices[j as usize] == x {
                    cnt[i][x as usize] += 1;
                }
            }
        }
        cnt
    }

    fn agreements(&self, choices: &[u32], cnt: &[Vec<u32>]) -> u64 {
        // Each agreeing unordered pair is seen from both sides.
        let twice: u64 = choices
            .iter()
            .enumerate()
            .map(|(i, &z)| cnt[i][z as usize] as u64)
            .sum();
        twice / 2
    }

    /// Steepest descent on the agreement count (so ascent on Q).
    fn descend(&self, choices: &mut [u32], cnt: &mut [Vec<u32>]) -> u64 {
        loop {
            let mut pick = usize::MAX;
            let mut pick_target = 0u32;
            let mut pick_gain = 0i64;
            for (i, t) in self.triples.iter().enumerate() {
                let base = cnt[i][choices[i] as usize] as i64;
                for &b in t {
                    let drop = base - cnt[i][b as usize] as i64;
                    if b != choices[i] && drop > pick_gain {
                        pick_gain = drop;
                        pick = i;
                        pick_target = b;
                    }
                }
            }
            if pick == usize::MAX {
                return self.agreements(choices, cnt);
            }
            let old = choices[pick];
            choices[pick] = pick_target;
            for &(j, x) in &self.adj[pick] {
                if x == old {
                    cnt[j as usize][x as usize] -= 1;
                } else if x == pick_target {
                    cnt[j as usize][x as usize] += 1;
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct QSearchReport {
    pub n: u32,
    pub best_q: u64,
    pub best_choices: Vec<u32>,
    pub pair_total: u64,
    /// The minimum assignment's value n_5/5.
    pub baseline: u64,
    /// Whether best_q reached n_5/5 + 4.
    pub reached_plus_four: bool,
    pub exhaustive: bool,
    pub restarts: u32,
}

/// Maximise Q. At n = 5 the full 3^10 state space is enumerated and the
/// true maximum returned; otherwise one descent starts from the minimum
/// assignment and `restarts` more from random starts derived from the
/// seed.
pub fn q_search(n: u32, seed: u64, restarts: u32) -> Result<QSearchReport> {
    let space = QSpace::new(n)?;
    let baseline = falling_5(n) / 5;
    let pair_total = q_pair_total(n);
    let (best_q, best_choices, exhaustive) = if n == 5 {
        let (q, w) = exhaustive_max_q(&space);
        (q, w, true)
    } else {
        let mut best_agree = u64::MAX;
        let mut best = Vec::new();
        for r in 0..=restarts {
            let mut choices = if r == 0 {
                space.min_assignment()
            } else {
                let mut rng =
                    SplitMix64::new(derive(seed, "qsearch", &u64::from(r).to_le_bytes()));
                space.triples.iter().map(|t| t[rng.next_index(3)]).collect()
            };
            let mut cnt = space.counts(&choices);
            let agree = space.descend(&mut choices, &mut cnt);
            if agree < best_agree {
                best_agree = agree;
                best = choices;
            }
        }
        (2 * (space.pairs.len() as u64 - best_agree), best, false)
    };
    Ok(QSearchReport {
        n,
        best_q,
        best_choices,
        pair_total,
        baseline,
        reached_plus_four: best_q >= baseline + 4,
        exhaustive,
        restarts,
    })
}

fn exhaustive_max_q(space: &QSpace) -> (u64, Vec<u32>) {
    let nsub = space.triples.len();
    let mut idx = vec![0usize; nsub];
    let mut choices: Vec<u32> = space.triples.iter().map(|t| t[0]).collect();
    let mut min_agree = u64::MAX;
    let mut witness = Vec::new();
    loop {
        let agree = space
            .pairs
            .iter()
            .filter(|&&(i, j, x)| choices[i as usize] == x && choices[j as usize] == x)
            .count() as u64;
        if agree < min_agree {
            min_agree = agree;
            witness = choices.clone();
        }
        let mut pos = 0;
        loop {
            if pos == nsub {
                return (2 * (space.pairs.len() as u64 - min_agree), witness);
            }
            idx[pos] += 1;
            if idx[pos] < 3 {
                choices[pos] = space.triples[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            choices[pos] = space.triples[pos][0];
            pos += 1;
        }
    }
}
