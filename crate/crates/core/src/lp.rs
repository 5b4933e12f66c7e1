//! Exact rational feasibility for `A x = b, x >= 0` by the two-phase simplex
//! method (phase one only) with Bland's anti-cycling rule.

use num_traits::{One, Signed, Zero};

use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    /// A basic feasible solution.
    Feasible(Vec<Rational>),
    /// Farkas certificate `y` with `yᵀA <= 0` and `yᵀb > 0`.
    Infeasible(Vec<Rational>),
}

/// Decides feasibility of `A x = b, x >= 0` exactly. `a` is row-major with
/// `b.len()` rows.
pub fn feasible_point(a: &[Vec<Rational>], b: &[Rational]) -> LpOutcome {
    let m = b.len();
    let n = a.first().map_or(0, Vec::len);
    assert_eq!(a.len(), m, "row count mismatch");
    let width = n + m + 1;

    // Rows are negated where needed so the artificial basis starts feasible.
    let mut sign = vec![Rational::one(); m];
    let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for i in 0..m {
        assert_eq!(a[i].len(), n, "ragged constraint matrix");
        let flip = b[i].is_negative();
        if flip {
            sign[i] = -Rational::one();
        }
        let mut row = Vec::with_capacity(width);
        for x in &a[i] {
            row.push(if flip { -x.clone() } else { x.clone() });
        }
        for k in 0..m {
            row.push(if k == i { Rational::one() } else { Rational::zero() });
        }
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        tab.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Reduced costs of the phase-one objective (sum of artificials); the
    // last entry is minus the objective value.
    let mut cost = vec![Rational::zero(); width];
    for row in &tab {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }

    loop {
        let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if !tab[i][enter].is_positive() {
                continue;
            }
            let ratio = &tab[i][width - 1] / &tab[i][enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // Phase one is bounded below by zero, so a ratio always exists.
        let (r, _) = leave.expect("phase-one objective is bounded");
        pivot(&mut tab, &mut cost, r, enter);
        basis[r] = enter;
    }

    if cost[width - 1].is_zero() {
        let mut x = vec![Rational::zero(); n];
        for (i, &j) in basis.iter().enumerate() {
            if j < n {
                x[j] = tab[i][width - 1].clone();
            }
        }
        LpOutcome::Feasible(x)
    } else {
        // Artificial reduced costs are 1 - y_i for the phase-one duals.
        let y = (0..m)
            .map(|i| (Rational::one() - &cost[n + i]) * &sign[i])
            .collect();
        LpOutcome::Infeasible(y)
    }
}

fn pivot(tab: &mut [Vec<Rational>], cost: &mut [Rational], r: usize, c: usize) {
    let inv = Rational::one() / &tab[r][c];
    for v in tab[r].iter_mut() {
        if !v.is_zero() {
            *v *= &inv;
        }
    }
    let pivot_row = tab[r].clone();
    let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let factor = row[c].clone();
        for &j in &nonzero {
            row[j] -= &factor * &pivot_row[j];
        }
    }
    if !cost[c].is_zero() {
        let factor = cost[c].clone();
        for &j in &nonzero {
            cost[j] -= &factor * &pivot_row[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn check_farkas(a: &[Vec<Rational>], b: &[Rational], y: &[Rational]) {
        let n = a[0].len();
        for j in 0..n {
            let s: Rational = (0..b.len()).map(|i| &y[i] * &a[i][j]).sum();
            assert!(!s.is_positive(), "yᵀA must be <= 0");
        }
        let yb: Rational = y.iter().zip(b).map(|(y, b)| y * b).sum();
        assert!(yb.is_positive(), "yᵀb must be > 0");
    }

    #[test]
    fn simple_feasible() {
        // x0 + x1 = 1, x1 + x2 = 1, x0 + x2 = 1 -> all 1/2.
        let a = vec![vec![q(1), q(1), q(0)], vec![q(0), q(1), q(1)], vec![q(1), q(0), q(1)]];
        let b = vec![q(1), q(1), q(1)];
        match feasible_point(&a, &b) {
            LpOutcome::Feasible(x) => {
                let half = Rational::new(1.into(), 2.into());
                assert_eq!(x, vec![half.clone(), half.clone(), half]);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_with_certificate() {
        // x0 = 1 and x0 = 2.
        let a = vec![vec![q(1), q(0)], vec![q(1), q(0)]];
        let b = vec![q(1), q(2)];
        match feasible_point(&a, &b) {
            LpOutcome::Infeasible(y) => check_farkas(&a, &b, &y),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn negative_right_hand_side() {
        // -x0 = -3 has the solution x0 = 3; -x0 - x1 = 1 has none.
        let a = vec![vec![q(-1), q(0)]];
        assert_eq!(feasible_point(&a, &[q(-3)]), LpOutcome::Feasible(vec![q(3), q(0)]));
        let a = vec![vec![q(-1), q(-1)]];
        match feasible_point(&a, &[q(1)]) {
            LpOutcome::Infeasible(y) => check_farkas(&a, &[q(1)], &y),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }
}
