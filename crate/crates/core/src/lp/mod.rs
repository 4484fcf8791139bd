//! Ground-truth coupling oracle for small families: the closed-form
//! optimal pair coupling, an LP for the smallest achievable worst
//! pairwise disagreement, and an LP for the smallest total pairwise
//! disagreement.

mod simplex;

use std::fmt;

use crate::dist::{AtomId, DiscreteDistribution, Family, Universe};
use crate::error::{Error, Result};
use simplex::{solve, Relation, Status};

/// Largest product support the LP front-ends will enumerate.
pub const JOINT_SUPPORT_CAP: usize = 100_000;

const WEIGHT_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    InfeasibleTolerance,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpStatus::Optimal => write!(f, "optimal"),
            LpStatus::InfeasibleTolerance => write!(f, "infeasible-tolerance"),
        }
    }
}

/// A coupling plan: value tuples (one coordinate per member) with
/// probabilities. Coordinate marginals reproduce the member laws.
#[derive(Clone, Debug)]
pub struct JointDistribution {
    universe: Universe,
    names: Vec<String>,
    support: Vec<Vec<AtomId>>,
    weights: Vec<f64>,
}

impl JointDistribution {
    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn support(&self) -> &[Vec<AtomId>] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The law of coordinate `coord`, over the whole universe.
    pub fn marginal(&self, coord: usize) -> Vec<f64> {
        let mut probs = vec![0.0; self.universe.len()];
        for (tuple, w) in self.support.iter().zip(&self.weights) {
            probs[tuple[coord].0 as usize] += w;
        }
        probs
    }

    /// Largest per-atom gap between a coordinate marginal and the
    /// corresponding member of `family`.
    pub fn max_marginal_error(&self, family: &Family) -> f64 {
        let mut worst = 0.0f64;
        for coord in 0..self.names.len() {
            let marginal = self.marginal(coord);
            let member = family.member(coord);
            for (a, &m) in marginal.iter().enumerate() {
                worst = worst.max((m - member.prob(AtomId(a as u32))).abs());
            }
        }
        worst
    }

    pub fn pair_disagreement(&self, i: usize, j: usize) -> f64 {
        self.support
            .iter()
            .zip(&self.weights)
            .filter(|(t, _)| t[i] != t[j])
            .map(|(_, w)| w)
            .sum()
    }

    pub fn max_pair_disagreement(&self) -> f64 {
        let k = self.names.len();
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in i + 1..k {
                worst = worst.max(self.pair_disagreement(i, j));
            }
        }
        worst
    }

    pub fn sum_pair_disagreement(&self) -> f64 {
        let k = self.names.len();
        let mut total = 0.0;
        for i in 0..k {
            for j in i + 1..k {
                total += self.pair_disagreement(i, j);
            }
        }
        total
    }
}

#[derive(Clone, Debug)]
pub struct LpReport {
    pub objective: f64,
    pub joint: JointDistribution,
    pub status: LpStatus,
    pub iterations: u64,
}

/// The maximal coupling of two distributions, built directly: diagonal
/// mass min(p_u, q_u), surpluses matched greedily in atom order. Its
/// disagreement probability is exactly the total variation distance.
pub fn optimal_pair_coupling(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<LpReport> {
    if p.universe() != q.universe() {
        return Err(Error::UniverseMismatch(
            "pair coupling needs one shared universe".into(),
        ));
    }
    let universe = p.universe().clone();
    let mut support = Vec::new();
    let mut weights = Vec::new();
    for a in universe.atoms() {
        let overlap = p.prob(a).min(q.prob(a));
        if overlap > 0.0 {
            support.push(vec![a, a]);
            weights.push(overlap);
        }
    }
    let mut surplus_p: Vec<(AtomId, f64)> = universe
        .atoms()
        .map(|a| (a, p.prob(a) - q.prob(a)))
        .filter(|(_, s)| *s > 0.0)
        .collect();
    let mut surplus_q: Vec<(AtomId, f64)> = universe
        .atoms()
        .map(|a| (a, q.prob(a) - p.prob(a)))
        .filter(|(_, s)| *s > 0.0)
        .collect();
    let mut objective = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < surplus_p.len() && j < surplus_q.len() {
        let moved = surplus_p[i].1.min(surplus_q[j].1);
        if moved > WEIGHT_FLOOR {
            support.push(vec![surplus_p[i].0, surplus_q[j].0]);
            weights.push(moved);
            objective += moved;
        }
        surplus_p[i].1 -= moved;
        surplus_q[j].1 -= moved;
        if surplus_p[i].1 <= WEIGHT_FLOOR {
            i += 1;
        }
        if surplus_q[j].1 <= WEIGHT_FLOOR {
            j += 1;
        }
    }
    Ok(LpReport {
        objective,
        joint: JointDistribution {
            universe,
            names: vec!["X".into(), "Y".into()],
            support,
            weights,
        },
        status: LpStatus::Optimal,
        iterations: 0,
    })
}

struct TupleSpace {
    supports: Vec<Vec<AtomId>>,
    tuples: Vec<Vec<AtomId>>,
}

fn tuple_space(family: &Family) -> Result<TupleSpace> {
    let supports: Vec<Vec<AtomId>> = family
        .members()
        .iter()
        .map(|m| m.support().collect())
        .collect();
    let mut count = 1usize;
    for s in &supports {
        count = count
            .checked_mul(s.len())
            .filter(|&c| c <= JOINT_SUPPORT_CAP)
            .ok_or_else(|| {
                Error::TooLarge(format!(
                    "product support exceeds {JOINT_SUPPORT_CAP} tuples"
                ))
            })?;
    }
    let mut tuples = Vec::with_capacity(count);
    let mut idx = vec![0usize; supports.len()];
    loop {
        tuples.push(
            idx.iter()
                .zip(&supports)
                .map(|(&i, s)| s[i])
                .collect::<Vec<_>>(),
        );
        let mut pos = supports.len();
        loop {
            if pos == 0 {
                return Ok(TupleSpace { supports, tuples });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < supports[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Marginal equality rows, one per member per support atom.
fn marginal_rows(
    family: &Family,
    space: &TupleSpace,
    extra_cols: usize,
) -> (Vec<Vec<f64>>, Vec<Relation>, Vec<f64>) {
    let n_tuples = space.tuples.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (coord, support) in space.supports.iter().enumerate() {
        for &atom in support {
            let mut row = vec![0.0; n_tuples + extra_cols];
            for (t, tuple) in space.tuples.iter().enumerate() {
                if tuple[coord] == atom {
                    row[t] = 1.0;
                }
            }
            rows.push(row);
            rhs.push(family.member(coord).prob(atom));
        }
    }
    let relations = vec![Relation::Eq; rows.len()];
    (rows, relations, rhs)
}

fn report_from(
    family: &Family,
    space: TupleSpace,
    weights_raw: &[f64],
    objective: f64,
    status: Status,
    iterations: u64,
) -> LpReport {
    let mut support = Vec::new();
    let mut weights = Vec::new();
    for (tuple, &w) in space.tuples.into_iter().zip(weights_raw) {
        if w > WEIGHT_FLOOR {
            support.push(tuple);
            weights.push(w);
        }
    }
    LpReport {
        objective,
        joint: JointDistribution {
            universe: family.universe().clone(),
            names: family.names().to_vec(),
            support,
            weights,
        },
        status: match status {
            Status::Optimal => LpStatus::Optimal,
            Status::Infeasible => LpStatus::InfeasibleTolerance,
        },
        iterations,
    }
}

/// Smallest achievable worst-pair disagreement: minimise t subject to
/// exact marginals and, for every pair, P(X_i != X_j) <= t.
pub fn minimax_disagreement(family: &Family) -> Result<LpReport> {
    let space = tuple_space(family)?;
    let n_tuples = space.tuples.len();
    let t_col = n_tuples;
    let (mut rows, mut relations, mut rhs) = marginal_rows(family, &space, 1);
    for (i, j) in family.pairs() {
        let mut row = vec![0.0; n_tuples + 1];
        for (t, tuple) in space.tuples.iter().enumerate() {
            if tuple[i] != tuple[j] {
                row[t] = 1.0;
            }
        }
        row[t_col] = -1.0;
        rows.push(row);
        relations.push(Relation::Le);
        rhs.push(0.0);
    }
    let mut c = vec![0.0; n_tuples + 1];
    c[t_col] = 1.0;
    let sol = solve(&c, &rows, &relations, &rhs)?;
    let objective = sol.x[t_col];
    Ok(report_from(family, space, &sol.x[..n_tuples], objective, sol.status, sol.iterations))
}

/// Smallest total pairwise disagreement: a pure transport objective,
/// cost of a tuple = its number of disagreeing pairs.
pub fn min_sum_disagreement(family: &Family) -> Result<LpReport> {
    let space = tuple_space(family)?;
    let (rows, relations, rhs) = marginal_rows(family, &space, 0);
    let k = family.len();
    let c: Vec<f64> = space
        .tuples
        .iter()
        .map(|tuple| {
            let mut cost = 0.0;
            for i in 0..k {
                for j in i + 1..k {
                    if tuple[i] != tuple[j] {
                        cost += 1.0;
                    }
                }
            }
            cost
        })
        .collect();
    let sol = solve(&c, &rows, &relations, &rhs)?;
    let objective = sol.objective;
    Ok(report_from(family, space, &sol.x, objective, sol.status, sol.iterations))
}
