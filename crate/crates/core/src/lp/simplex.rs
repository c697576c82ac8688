//! Dense two-phase primal simplex over exact rationals.
//!
//! Variables are nonnegative. Bland's rule (lowest-index entering column,
//! lowest-index leaving basic variable on ratio ties) is used in both phases,
//! so the method always terminates.

use num_traits::{One, Signed, Zero};

use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub coeffs: Vec<Rational>,
    pub kind: RowKind,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Infeasible,
    Unbounded,
    /// Optimal point (values of the structural variables) and objective value.
    Optimal(Vec<Rational>, Rational),
}

struct Tableau {
    /// m rows of `width + 1` entries; the last entry is the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · x` restricted to the columns in `allowed`.
    /// Returns false when unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool]) -> bool {
        loop {
            let mut entering = None;
            for j in 0..self.width {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                        reduced -= &cost[b] * &self.rows[i][j];
                    }
                }
                if reduced.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leaving {
                    None => true,
                    Some((k, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            match leaving {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn value(&self, j: usize) -> Rational {
        self.basis
            .iter()
            .position(|&b| b == j)
            .map_or_else(Rational::zero, |i| self.rhs(i).clone())
    }
}

/// Maximizes `objective · x` subject to `rows` and `x ≥ 0`.
pub fn maximize(num_vars: usize, rows: &[Row], objective: &[Rational]) -> Outcome {
    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.kind != RowKind::Eq).count();
    // Normalize to nonnegative right-hand sides first, so we know which rows
    // need an artificial variable.
    let normalized: Vec<(Vec<Rational>, RowKind, Rational)> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.coeffs.len(), num_vars);
            if r.rhs.is_negative() {
                let kind = match r.kind {
                    RowKind::Le => RowKind::Ge,
                    RowKind::Ge => RowKind::Le,
                    RowKind::Eq => RowKind::Eq,
                };
                (r.coeffs.iter().map(|c| -c).collect(), kind, -&r.rhs)
            } else {
                (r.coeffs.clone(), r.kind, r.rhs.clone())
            }
        })
        .collect();
    let artificial_count = normalized
        .iter()
        .filter(|(_, k, _)| *k != RowKind::Le)
        .count();
    let width = num_vars + slack_count + artificial_count;
    let first_artificial = num_vars + slack_count;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        width,
    };
    let mut next_slack = num_vars;
    let mut next_art = first_artificial;
    for (coeffs, kind, rhs) in normalized {
        let mut row = vec![Rational::zero(); width + 1];
        row[..num_vars].clone_from_slice(&coeffs);
        row[width] = rhs;
        let basic = match kind {
            RowKind::Le => {
                row[next_slack] = Rational::one();
                next_slack += 1;
                next_slack - 1
            }
            RowKind::Ge => {
                row[next_slack] = -Rational::one();
                next_slack += 1;
                row[next_art] = Rational::one();
                next_art += 1;
                next_art - 1
            }
            RowKind::Eq => {
                row[next_art] = Rational::one();
                next_art += 1;
                next_art - 1
            }
        };
        tab.rows.push(row);
        tab.basis.push(basic);
    }

    if artificial_count > 0 {
        let mut cost = vec![Rational::zero(); width];
        for c in cost.iter_mut().skip(first_artificial) {
            *c = -Rational::one();
        }
        let all = vec![true; width];
        // phase one is bounded above by zero
        tab.optimize(&cost, &all);
        let infeasibility: Rational = (first_artificial..width).map(|j| tab.value(j)).sum();
        if infeasibility.is_positive() {
            return Outcome::Infeasible;
        }
        // Drive zero-valued artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= first_artificial {
                match (0..first_artificial).find(|&j| !tab.rows[i][j].is_zero()) {
                    Some(j) => {
                        tab.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut cost = vec![Rational::zero(); width];
    cost[..num_vars].clone_from_slice(objective);
    let allowed: Vec<bool> = (0..width).map(|j| j < first_artificial).collect();
    if !tab.optimize(&cost, &allowed) {
        return Outcome::Unbounded;
    }
    let x: Vec<Rational> = (0..num_vars).map(|j| tab.value(j)).collect();
    let value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
    Outcome::Optimal(x, value)
}
