//! Dense two-phase simplex. The problems here are tiny (at most a few
//! dozen rows and ~10^5 columns), so a plain tableau with Dantzig
//! pricing is enough; after repeated degenerate pivots the rule switches
//! to Bland's, which cannot cycle.

use crate::error::{Error, Result};

const TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const ITER_CAP: u64 = 20_000;
const DEGENERATE_SWITCH: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Relation {
    Eq,
    Le,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Status {
    Optimal,
    Infeasible,
}

#[derive(Debug)]
pub(crate) struct Solution {
    pub status: Status,
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: u64,
}

struct Tableau {
    m: usize,
    width: usize, // columns + rhs
    art_start: usize,
    a: Vec<f64>,
    z: Vec<f64>,
    basis: Vec<usize>,
    iterations: u64,
    degenerate_run: u32,
    bland: bool,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let inv = 1.0 / self.at(row, col);
        for v in &mut self.a[row * w..(row + 1) * w] {
            *v *= inv;
        }
        self.a[row * w + col] = 1.0; // exact after normalisation
        for r in 0..self.m {
            if r == row {
                continue;
            }
            let factor = self.at(r, col);
            if factor == 0.0 {
                continue;
            }
            for c in 0..w {
                self.a[r * w + c] -= factor * self.at(row, c);
            }
            self.a[r * w + col] = 0.0;
        }
        let factor = self.z[col];
        if factor != 0.0 {
            for c in 0..w {
                self.z[c] -= factor * self.at(row, c);
            }
            self.z[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Runs the current objective row to optimality. Only columns below
    /// `art_start` may enter.
    fn iterate(&mut self) -> Result<()> {
        loop {
            let mut enter = usize::MAX;
            if self.bland {
                for c in 0..self.art_start {
                    if self.z[c] < -TOL {
                        enter = c;
                        break;
                    }
                }
            } else {
                let mut best = -TOL;
                for c in 0..self.art_start {
                    if self.z[c] < best {
                        best = self.z[c];
                        enter = c;
                    }
                }
            }
            if enter == usize::MAX {
                return Ok(());
            }
            let mut leave = usize::MAX;
            let mut best_ratio = f64::INFINITY;
            for r in 0..self.m {
                let coeff = self.at(r, enter);
                if coeff > PIVOT_TOL {
                    let ratio = self.rhs(r) / coeff;
                    if ratio < best_ratio - TOL
                        || (ratio < best_ratio + TOL
                            && (leave == usize::MAX || self.basis[r] < self.basis[leave]))
                    {
                        best_ratio = ratio;
                        leave = r;
                    }
                }
            }
            if leave == usize::MAX {
                return Err(Error::DomainError(
                    "linear program is unbounded".into(),
                ));
            }
            if best_ratio <= TOL {
                self.degenerate_run += 1;
                if self.degenerate_run > DEGENERATE_SWITCH {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }
            self.pivot(leave, enter);
            self.iterations += 1;
            if self.iterations > ITER_CAP {
                return Err(Error::SolverStall {
                    iterations: self.iterations as usize,
                });
            }
        }
    }
}

/// Minimises c.x over rows(i).x (=|<=) b(i), x >= 0.
pub(crate) fn solve(
    c: &[f64],
    rows: &[Vec<f64>],
    relations: &[Relation],
    b: &[f64],
) -> Result<Solution> {
    let m = rows.len();
    let structural = c.len();
    assert_eq!(relations.len(), m);
    assert_eq!(b.len(), m);
    let n_slack = relations.iter().filter(|r| **r == Relation::Le).count();

    // Column layout: structural, slacks, artificials, rhs.
    // Rows with a nonnegative rhs and a +1 slack start with the slack
    // basic; everything else gets an artificial.
    let mut needs_artificial = Vec::with_capacity(m);
    for (i, rel) in relations.iter().enumerate() {
        needs_artificial.push(*rel == Relation::Eq || b[i] < 0.0);
    }
    let n_art = needs_artificial.iter().filter(|&&x| x).count();
    let art_start = structural + n_slack;
    let width = art_start + n_art + 1;

    let mut a = vec![0.0; m * width];
    let mut basis = vec![usize::MAX; m];
    let mut slack_at = 0usize;
    let mut art_at = 0usize;
    for i in 0..m {
        let negate = b[i] < 0.0;
        let sign = if negate { -1.0 } else { 1.0 };
        debug_assert_eq!(rows[i].len(), structural);
        for (j, &v) in rows[i].iter().enumerate() {
            a[i * width + j] = sign * v;
        }
        a[i * width + width - 1] = sign * b[i];
        if relations[i] == Relation::Le {
            a[i * width + structural + slack_at] = sign;
            if !negate {
                basis[i] = structural + slack_at;
            }
            slack_at += 1;
        }
        if needs_artificial[i] {
            let col = art_start + art_at;
            a[i * width + col] = 1.0;
            basis[i] = col;
            art_at += 1;
        }
    }

    // Phase 1: minimise the artificial sum.
    let mut z = vec![0.0; width];
    for v in &mut z[art_start..width - 1] {
        *v = 1.0;
    }
    let mut t = Tableau {
        m,
        width,
        art_start,
        a,
        z,
        basis,
        iterations: 0,
        degenerate_run: 0,
        bland: false,
    };
    for i in 0..m {
        if t.basis[i] >= art_start {
            for c in 0..width {
                t.z[c] -= t.at(i, c);
            }
        }
    }
    if n_art > 0 {
        t.iterate()?;
        let phase1 = -t.z[width - 1];
        if phase1 > 1e-7 {
            return Ok(Solution {
                status: Status::Infeasible,
                x: vec![0.0; structural],
                objective: f64::NAN,
                iterations: t.iterations,
            });
        }
        // Drive leftover artificials out of the basis; rows that admit
        // no pivot are redundant and drop out.
        let mut r = 0;
        while r < t.m {
            if t.basis[r] >= art_start {
                let col = (0..art_start).find(|&c| t.at(r, c).abs() > PIVOT_TOL);
                match col {
                    Some(c) => t.pivot(r, c),
                    None => {
                        let w = t.width;
                        t.a.drain(r * w..(r + 1) * w);
                        t.basis.remove(r);
                        t.m -= 1;
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    // Phase 2: the real objective, artificial columns frozen.
    t.z = vec![0.0; width];
    t.z[..structural].copy_from_slice(c);
    for i in 0..t.m {
        let cost = if t.basis[i] < structural { c[t.basis[i]] } else { 0.0 };
        if cost != 0.0 {
            for col in 0..width {
                t.z[col] -= cost * t.at(i, col);
            }
        }
    }
    t.degenerate_run = 0;
    t.bland = false;
    t.iterate()?;

    let mut x = vec![0.0; structural];
    for i in 0..t.m {
        if t.basis[i] < structural {
            x[t.basis[i]] = t.rhs(i).max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(Solution { status: Status::Optimal, x, objective, iterations: t.iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_system() {
        // min x + y subject to x + y = 1, x - y = 0 -> x = y = 1/2.
        let sol = solve(
            &[1.0, 1.0],
            &[vec![1.0, 1.0], vec![1.0, -1.0]],
            &[Relation::Eq, Relation::Eq],
            &[1.0, 0.0],
        )
        .unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.x[0] - 0.5).abs() < 1e-9);
        assert!((sol.x[1] - 0.5).abs() < 1e-9);
        assert!((sol.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn inequality_and_negative_rhs() {
        // min -x - 2y s.t. x + y <= 4, -x - y <= -1, y <= 3.
        let sol = solve(
            &[-1.0, -2.0],
            &[vec![1.0, 1.0], vec![-1.0, -1.0], vec![0.0, 1.0]],
            &[Relation::Le, Relation::Le, Relation::Le],
            &[4.0, -1.0, 3.0],
        )
        .unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective - -7.0).abs() < 1e-9, "x=1, y=3");
    }

    #[test]
    fn redundant_rows_are_dropped() {
        // x + y = 1 twice plus their sum; the duplicates are dependent.
        let sol = solve(
            &[1.0, 0.0],
            &[vec![1.0, 1.0], vec![1.0, 1.0], vec![2.0, 2.0]],
            &[Relation::Eq, Relation::Eq, Relation::Eq],
            &[1.0, 1.0, 2.0],
        )
        .unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!(sol.objective.abs() < 1e-9, "all mass on y");
    }

    #[test]
    fn infeasible_system() {
        let sol = solve(
            &[1.0],
            &[vec![1.0], vec![1.0]],
            &[Relation::Eq, Relation::Eq],
            &[1.0, 2.0],
        )
        .unwrap();
        assert_eq!(sol.status, Status::Infeasible);
    }

    #[test]
    fn unbounded_reports_error() {
        let err = solve(&[-1.0], &[vec![0.0]], &[Relation::Le], &[1.0]);
        assert!(err.is_err());
    }
}
