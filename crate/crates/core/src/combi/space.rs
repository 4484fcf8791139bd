//! The subset space S(n, k): all size-n subsets of {1, ..., n+k}, stored by
//! their size-k complements, together with the exact pair counts by
//! Hamming distance and the counting identities built from them.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest number of subsets a space may hold.
pub const MAX_SUBSETS: u64 = 1_000_000;

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut result = BigUint::one();
    for i in 0..k {
        result *= n - i;
        result /= i + 1;
    }
    result
}

/// (n+k)! / (m! m! (n-m)! (k-m)!): the number of ordered subset pairs at
/// Hamming distance m. Zero when m exceeds min(n, k).
pub fn multinomial_pair(n: u64, k: u64, m: u64) -> BigUint {
    if m > n.min(k) {
        return BigUint::zero();
    }
    binomial(n + k, m) * binomial(n + k - m, m) * binomial(n + k - 2 * m, n - m)
}

fn check_sizes(n: u64, k: u64) -> Result<()> {
    if n == 0 || k == 0 {
        return Err(Error::DomainError(format!("need n, k >= 1, got ({n}, {k})")));
    }
    Ok(())
}

/// Ordered pair counts by distance: m -> #{(I, J) : |I \ J| = m} for
/// m = 0..=min(n, k). The values sum to binomial(n+k, k)^2.
pub fn pair_totals(n: u64, k: u64) -> Result<BTreeMap<u32, BigUint>> {
    check_sizes(n, k)?;
    Ok((0..=n.min(k))
        .map(|m| (m as u32, multinomial_pair(n, k, m)))
        .collect())
}

/// Exact distribution of the distance of a uniform ordered pair:
/// c_m = pair_totals[m] / binomial(n+k, k)^2. Sums to exactly 1.
pub fn distance_profile(n: u64, k: u64) -> Result<BTreeMap<u32, Ratio<BigUint>>> {
    let totals = pair_totals(n, k)?;
    let count = binomial(n + k, k);
    let denom = &count * &count;
    Ok(totals
        .into_iter()
        .map(|(m, t)| (m, Ratio::new(t, denom.clone())))
        .collect())
}

/// The floor every assignment's distance-k disagreement count must reach:
/// (2k / (n+k)) * pair_totals[k]. Requires k <= n so that distance-k pairs
/// exist. Always an integer, returned as an exact rational.
pub fn distant_pair_threshold(n: u64, k: u64) -> Result<Ratio<BigUint>> {
    check_sizes(n, k)?;
    if k > n {
        return Err(Error::DomainError(format!(
            "distance-{k} pairs need k <= n, got ({n}, {k})"
        )));
    }
    let t = multinomial_pair(n, k, k);
    Ok(Ratio::new(BigUint::from(2 * k) * t, BigUint::from(n + k)))
}

/// Lower bound on the total disagreement count over all ordered pairs:
/// sum_{i=0}^{k-1} 2 binomial(n+i, i+1) binomial(n+i, i).
pub fn total_disagreement_lower(n: u64, k: u64) -> Result<BigUint> {
    check_sizes(n, k)?;
    let mut total = BigUint::zero();
    for i in 0..k {
        total += BigUint::from(2u32) * binomial(n + i, i + 1) * binomial(n + i, i);
    }
    Ok(total)
}

/// Both sides of the counting identity
/// sum_{i<k} binomial(n+i, i+1) binomial(n+i, i)
///   = sum_{m>=1} (m / (n+m)) multinomial(n+k; m, m, n-m, k-m),
/// evaluated exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub lhs: BigUint,
    pub rhs: Ratio<BigUint>,
    pub equal: bool,
}

pub fn check_combi_identity(n: u64, k: u64) -> Result<IdentityCheck> {
    check_sizes(n, k)?;
    let mut lhs = BigUint::zero();
    for i in 0..k {
        lhs += binomial(n + i, i + 1) * binomial(n + i, i);
    }
    let mut rhs = Ratio::from_integer(BigUint::zero());
    for m in 1..=k {
        let t = multinomial_pair(n, k, m);
        if t.is_zero() {
            continue;
        }
        rhs += Ratio::new(BigUint::from(m) * t, BigUint::from(n + m));
    }
    let equal = rhs == Ratio::from_integer(lhs.clone());
    Ok(IdentityCheck { lhs, rhs, equal })
}

#[derive(Clone, Debug)]
pub struct StepCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

fn profile_f64(n: u64, k: u64) -> Result<Vec<(u64, f64)>> {
    use num_traits::ToPrimitive;
    if k > n {
        return Err(Error::DomainError(format!("need k <= n, got ({n}, {k})")));
    }
    let profile = distance_profile(n, k)?;
    Ok(profile
        .into_iter()
        .filter(|(m, _)| *m >= 1)
        .map(|(m, c)| {
            let c = c.numer().to_f64().unwrap() / c.denom().to_f64().unwrap();
            (m as u64, c)
        })
        .collect())
}

/// Averages a candidate bound f against F over the distance profile:
/// lhs = sum_m c_m f(m/n), rhs = sum_m c_m F(m/n). Any valid
/// disagreement bound must have lhs >= rhs.
pub fn check_step_inequality<G>(f: G, n: u64, k: u64) -> Result<StepCheck>
where
    G: Fn(f64) -> f64,
{
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for (m, c) in profile_f64(n, k)? {
        let x = m as f64 / n as f64;
        lhs += c * f(x);
        rhs += c * crate::exact::disagreement_bound(x)?;
    }
    Ok(StepCheck { lhs, rhs, holds: lhs >= rhs - 1e-12 })
}

/// The eps-shifted variant: sum_m c_m f((1-eps) m/n) against
/// (1 - 3 eps^(2/3)) sum_m c_m F(m/n).
pub fn check_step_inequality_eps<G>(f: G, n: u64, k: u64, eps: f64) -> Result<StepCheck>
where
    G: Fn(f64) -> f64,
{
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::DomainError(format!("eps = {eps} outside [0, 1]")));
    }
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for (m, c) in profile_f64(n, k)? {
        let x = m as f64 / n as f64;
        lhs += c * f((1.0 - eps) * x);
        rhs += c * crate::exact::disagreement_bound(x)?;
    }
    rhs *= 1.0 - 3.0 * eps.powf(2.0 / 3.0);
    Ok(StepCheck { lhs, rhs, holds: lhs >= rhs - 1e-12 })
}

/// All size-n subsets of {1..n+k}, enumerated in lexicographic order of
/// their size-k complements. Distances, choices, and searches all run on
/// complement storage; when the ground set fits in 64 bits a bitmask per
/// subset backs the distance computation.
#[derive(Debug)]
pub struct SubsetSpace {
    n: u32,
    k: u32,
    count: usize,
    comp_flat: Vec<u32>,
    masks: Option<Vec<u64>>,
}

impl SubsetSpace {
    pub fn new(n: u64, k: u64) -> Result<SubsetSpace> {
        check_sizes(n, k)?;
        let count_big = binomial(n + k, k);
        if count_big > BigUint::from(MAX_SUBSETS) {
            return Err(Error::TooLarge(format!(
                "{count_big} subsets exceeds {MAX_SUBSETS}"
            )));
        }
        let count: u64 = count_big.try_into().unwrap();
        let ground = n + k;
        let mut comp_flat = Vec::with_capacity((count * k) as usize);
        let mut masks = if ground <= 64 {
            Some(Vec::with_capacity(count as usize))
        } else {
            None
        };
        // Lexicographic enumeration of k-combinations of {1..ground}.
        let mut comb: Vec<u32> = (1..=k as u32).collect();
        loop {
            comp_flat.extend_from_slice(&comb);
            if let Some(masks) = masks.as_mut() {
                masks.push(comb.iter().fold(0u64, |m, &x| m | 1 << (x - 1)));
            }
            // Advance to the next combination.
            let mut i = k as usize;
            loop {
                if i == 0 {
                    return Ok(SubsetSpace {
                        n: n as u32,
                        k: k as u32,
                        count: count as usize,
                        comp_flat,
                        masks,
                    });
                }
                i -= 1;
                if comb[i] < (ground - (k - 1 - i as u64)) as u32 {
                    comb[i] += 1;
                    for j in i + 1..k as usize {
                        comb[j] = comb[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Size of the ground set, n + k.
    pub fn ground(&self) -> u32 {
        self.n + self.k
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// The size-k complement of subset `idx`, sorted ascending.
    pub fn complement(&self, idx: usize) -> &[u32] {
        let k = self.k as usize;
        &self.comp_flat[idx * k..(idx + 1) * k]
    }

    pub fn mask(&self, idx: usize) -> Option<u64> {
        self.masks.as_ref().map(|m| m[idx])
    }

    /// Hamming distance |I \ J| between subsets: equal to the number of
    /// complement elements of J missing from I's complement.
    pub fn distance(&self, i: usize, j: usize) -> u32 {
        if let Some(masks) = &self.masks {
            return (masks[i] & !masks[j]).count_ones();
        }
        let (a, b) = (self.complement(i), self.complement(j));
        let mut shared = 0u32;
        let (mut x, mut y) = (0, 0);
        while x < a.len() && y < b.len() {
            match a[x].cmp(&b[y]) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    shared += 1;
                    x += 1;
                    y += 1;
                }
            }
        }
        self.k - shared
    }

    pub fn contains(&self, idx: usize, x: u32) -> bool {
        x >= 1 && x <= self.ground() && !self.complement(idx).contains(&x)
    }

    /// Smallest element of subset `idx`.
    pub fn min_element(&self, idx: usize) -> u32 {
        let mut candidate = 1u32;
        for &c in self.complement(idx) {
            if c == candidate {
                candidate += 1;
            } else if c > candidate {
                break;
            }
        }
        candidate
    }

    /// The pos-th smallest element of subset `idx` (0-based, pos < n).
    pub fn element_at(&self, idx: usize, pos: usize) -> u32 {
        let comp = self.complement(idx);
        let mut ci = 0;
        let mut remaining = pos;
        for x in 1..=self.ground() {
            if ci < comp.len() && comp[ci] == x {
                ci += 1;
                continue;
            }
            if remaining == 0 {
                return x;
            }
            remaining -= 1;
        }
        unreachable!("pos out of range")
    }

    /// The subset's elements, sorted ascending.
    pub fn elements(&self, idx: usize) -> Vec<u32> {
        let comp = self.complement(idx);
        let mut out = Vec::with_capacity(self.n as usize);
        let mut ci = 0;
        for x in 1..=self.ground() {
            if ci < comp.len() && comp[ci] == x {
                ci += 1;
            } else {
                out.push(x);
            }
        }
        out
    }

    /// Display label: the subset's elements joined with '-'.
    pub fn label(&self, idx: usize) -> String {
        self.elements(idx)
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }

    /// Sum of the subset's elements.
    pub fn element_sum(&self, idx: usize) -> u64 {
        let g = self.ground() as u64;
        let total = g * (g + 1) / 2;
        total - self.complement(idx).iter().map(|&x| x as u64).sum::<u64>()
    }
}
