//! Probing the distant-disagreement bound: exhaustive minimisation at toy
//! sizes, steepest-descent local search beyond them.

use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::Ratio;

use super::space::{distant_pair_threshold, total_disagreement_lower, SubsetSpace};
use crate::error::{Error, Result};
use crate::randomness::{derive, SplitMix64};

/// Largest subset count the local search accepts.
pub const SEARCH_CAP: usize = 10_000;

const EXHAUSTIVE_STATE_CAP: u64 = 1_000_000;
const DISTANT_PAIR_CAP: u64 = 10_000_000;

/// Result of enumerating every zero-free assignment.
#[derive(Clone, Debug)]
pub struct ExhaustiveReport {
    pub states: u64,
    /// Smallest D_k over all assignments, with the first witness found.
    pub min_distant: u64,
    pub distant_witness: Vec<u32>,
    /// Smallest total disagreement count, with its witness.
    pub min_total: u64,
    pub total_witness: Vec<u32>,
    /// 2k/(n+k) times the distance-k pair total; absent when k > n.
    pub threshold: Option<Ratio<BigUint>>,
    /// Whether every assignment met the total lower bound.
    pub all_meet_total_lower: bool,
}

/// Best assignment found by local search.
#[derive(Clone, Debug)]
pub struct SearchReport {
    pub best_distant: u64,
    pub best_choices: Vec<u32>,
    pub threshold: Ratio<BigUint>,
    pub ever_below: bool,
    pub restarts: u32,
    pub moves: u64,
}

/// Shared machinery: the distance-k adjacency lists, element tables, and
/// the agreement count tables cnt[i][v] = #{distant J : z_J = v}.
struct SearchContext {
    space: Arc<SubsetSpace>,
    elements: Vec<Vec<u32>>,
    adj: Vec<Vec<u32>>,
    total_ordered: u64,
}

impl SearchContext {
    fn new(space: Arc<SubsetSpace>) -> SearchContext {
        let nsub = space.count();
        let k = space.k();
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); nsub];
        for i in 0..nsub {
            for j in i + 1..nsub {
                if space.distance(i, j) == k {
                    adj[i].push(j as u32);
                    adj[j].push(i as u32);
                }
            }
        }
        let elements = (0..nsub).map(|i| space.elements(i)).collect();
        let total_ordered = adj.iter().map(|a| a.len() as u64).sum();
        SearchContext { space, elements, adj, total_ordered }
    }

    fn greedy_choices(&self) -> Vec<u32> {
        (0..self.space.count()).map(|i| self.space.min_element(i)).collect()
    }

    fn counts(&self, choices: &[u32]) -> Vec<Vec<u32>> {
        let ground = self.space.ground() as usize;
        let mut cnt = vec![vec![0u32; ground + 1]; self.space.count()];
        for (i, neighbors) in self.adj.iter().enumerate() {
            for &j in neighbors {
                cnt[i][choices[j as usize] as usize] += 1;
            }
        }
        cnt
    }

    fn agreements(&self, choices: &[u32], cnt: &[Vec<u32>]) -> u64 {
        choices
            .iter()
            .enumerate()
            .map(|(i, &z)| cnt[i][z as usize] as u64)
            .sum()
    }

    /// Steepest descent on D_k: repeatedly apply the single-choice flip
    /// with the largest strict agreement gain. Returns (final D_k, moves).
    fn descend(
        &self,
        choices: &mut [u32],
        cnt: &mut [Vec<u32>],
        max_moves: u64,
    ) -> (u64, u64) {
        let nsub = self.space.count();
        let best_move = |row: &[u32], elems: &[u32], current: u32| -> (i64, u32) {
            let base = row[current as usize] as i64;
            let mut gain = 0i64;
            let mut target = current;
            for &b in elems {
                let g = row[b as usize] as i64 - base;
                if b != current && g > gain {
                    gain = g;
                    target = b;
                }
            }
            (gain, target)
        };
        let mut gains: Vec<(i64, u32)> = (0..nsub)
            .map(|i| best_move(&cnt[i], &self.elements[i], choices[i]))
            .collect();
        let mut moves = 0u64;
        while moves < max_moves {
            let mut pick = 0usize;
            let mut pick_gain = 0i64;
            for (i, &(g, _)) in gains.iter().enumerate() {
                if g > pick_gain {
                    pick_gain = g;
                    pick = i;
                }
            }
            if pick_gain <= 0 {
                break;
            }
            let old = choices[pick];
            let new = gains[pick].1;
            choices[pick] = new;
            for &j in &self.adj[pick] {
                let j = j as usize;
                cnt[j][old as usize] -= 1;
                cnt[j][new as usize] += 1;
                gains[j] = best_move(&cnt[j], &self.elements[j], choices[j]);
            }
            gains[pick] = best_move(&cnt[pick], &self.elements[pick], new);
            moves += 1;
        }
        (self.total_ordered - self.agreements(choices, cnt), moves)
    }
}

/// Minimum D_k over every zero-free assignment, by brute enumeration.
/// Also tracks the minimum total disagreement count and whether the
/// total lower bound ever failed.
pub fn exhaustive_min_distant(n: u64, k: u64) -> Result<ExhaustiveReport> {
    let space = SubsetSpace::new(n, k)?;
    let nsub = space.count();
    let mut states = 1u64;
    for _ in 0..nsub {
        states = states
            .checked_mul(n)
            .filter(|&s| s <= EXHAUSTIVE_STATE_CAP)
            .ok_or_else(|| {
                Error::TooLarge(format!(
                    "{n}^{nsub} assignments exceeds {EXHAUSTIVE_STATE_CAP}"
                ))
            })?;
    }
    let k32 = space.k();
    let mut distant_pairs: Vec<(u32, u32)> = Vec::new();
    for i in 0..nsub {
        for j in i + 1..nsub {
            if space.distance(i, j) == k32 {
                distant_pairs.push((i as u32, j as u32));
            }
        }
    }
    let elements: Vec<Vec<u32>> = (0..nsub).map(|i| space.elements(i)).collect();
    let lower: u64 = total_disagreement_lower(n, k)?
        .try_into()
        .map_err(|_| Error::TooLarge("total lower bound exceeds u64".into()))?;
    let ground = space.ground() as usize;
    let total_pairs_ordered = (nsub * nsub - nsub) as u64;

    let mut idx = vec![0usize; nsub];
    let mut choices: Vec<u32> = elements.iter().map(|e| e[0]).collect();
    let mut tally = vec![0u64; ground + 1];
    let mut min_distant = u64::MAX;
    let mut min_total = u64::MAX;
    let mut distant_witness = Vec::new();
    let mut total_witness = Vec::new();
    let mut all_meet = true;
    loop {
        let mut distant = 0u64;
        for &(i, j) in &distant_pairs {
            if choices[i as usize] != choices[j as usize] {
                distant += 2;
            }
        }
        for t in tally.iter_mut() {
            *t = 0;
        }
        for &c in &choices {
            tally[c as usize] += 1;
        }
        // Ordered agreements off the diagonal are sum over values of
        // N_v (N_v - 1); subtract from all off-diagonal pairs.
        let agreements: u64 = tally.iter().map(|&t| t * t.saturating_sub(1)).sum();
        let total = total_pairs_ordered - agreements;
        if distant < min_distant {
            min_distant = distant;
            distant_witness = choices.clone();
        }
        if total < min_total {
            min_total = total;
            total_witness = choices.clone();
        }
        if total < lower {
            all_meet = false;
        }
        // Mixed-radix advance over choice indices.
        let mut pos = 0;
        loop {
            if pos == nsub {
                let threshold = if k <= n {
                    Some(distant_pair_threshold(n, k)?)
                } else {
                    None
                };
                return Ok(ExhaustiveReport {
                    states,
                    min_distant,
                    distant_witness,
                    min_total,
                    total_witness,
                    threshold,
                    all_meet_total_lower: all_meet,
                });
            }
            idx[pos] += 1;
            if idx[pos] < elements[pos].len() {
                choices[pos] = elements[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            choices[pos] = elements[pos][0];
            pos += 1;
        }
    }
}

/// Steepest-descent search for assignments with few distance-k
/// disagreements. One descent starts from the greedy assignment, then
/// `restarts` more from random zero-free starts with seeds derived from
/// the master seed. `max_moves` caps each descent.
pub fn local_search_min_distant(
    n: u64,
    k: u64,
    seed: u64,
    restarts: u32,
    max_moves: u64,
) -> Result<SearchReport> {
    let space = Arc::new(SubsetSpace::new(n, k)?);
    let threshold = distant_pair_threshold(n, k)?;
    if space.count() > SEARCH_CAP {
        return Err(Error::TooLarge(format!(
            "{} subsets exceeds search cap {SEARCH_CAP}",
            space.count()
        )));
    }
    let ctx = SearchContext::new(space);
    if ctx.total_ordered > DISTANT_PAIR_CAP {
        return Err(Error::TooLarge(format!(
            "{} distant pairs exceeds {DISTANT_PAIR_CAP}",
            ctx.total_ordered
        )));
    }
    let mut best_distant = u64::MAX;
    let mut best_choices = Vec::new();
    let mut moves_total = 0u64;
    for r in 0..=restarts {
        let mut choices = if r == 0 {
            ctx.greedy_choices()
        } else {
            let mut rng =
                SplitMix64::new(derive(seed, "search", &u64::from(r).to_le_bytes()));
            ctx.elements
                .iter()
                .map(|e| e[rng.next_index(e.len())])
                .collect()
        };
        let mut cnt = ctx.counts(&choices);
        let (d, moves) = ctx.descend(&mut choices, &mut cnt, max_moves);
        moves_total += moves;
        if d < best_distant {
            best_distant = d;
            best_choices = choices;
        }
    }
    let ever_below = Ratio::from_integer(BigUint::from(best_distant)) < threshold;
    Ok(SearchReport {
        best_distant,
        best_choices,
        threshold,
        ever_below,
        restarts,
        moves: moves_total,
    })
}
