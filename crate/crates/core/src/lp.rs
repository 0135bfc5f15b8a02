//! Dense primal simplex over any [`Scalar`].
//!
//! Solves `maximize c·x subject to A x <= b, x >= 0` with `b >= 0`, so the
//! slack basis is feasible and no phase one is needed. Exact instances pivot
//! by Bland's rule; float instances use Dantzig's rule on a slightly
//! perturbed right-hand side (falling back to Bland after a run of degenerate
//! pivots) and then recover the basic solution for the true `b` from the
//! final basis inverse. Both are deterministic.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotRule {
    Bland,
    Dantzig,
}

#[derive(Clone, Debug)]
pub struct LpSolution<S> {
    pub x: Vec<S>,
    /// Shadow price of each constraint: an optimal solution of the dual
    /// `minimize b·y subject to A^T y >= c, y >= 0`.
    pub dual: Vec<S>,
    pub value: S,
    pub pivots: usize,
    /// Final basis; indices past `x.len()` are slacks.
    pub basis: Vec<usize>,
}

const MAX_PIVOTS: usize = 1_000_000;
const DEGENERATE_RUN: usize = 64;

/// Pivot and optimality tolerance: zero for exact types.
pub fn lp_tol<S: Scalar>() -> S {
    if S::EXACT {
        S::zero()
    } else {
        S::from_ratio(1, 1_000_000_000)
    }
}

struct Tableau<S> {
    rows: usize,
    width: usize,
    /// Row-major constraint rows, each `width` long, rhs in the last slot.
    cells: Vec<S>,
    /// Reduced costs; the last slot holds minus the objective value.
    obj: Vec<S>,
    basis: Vec<usize>,
}

impl<S: Scalar> Tableau<S> {
    fn at(&self, i: usize, j: usize) -> &S {
        &self.cells[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let w = self.width;
        let piv = self.at(r, col).clone();
        let row_r: Vec<S> = self.cells[r * w..(r + 1) * w]
            .iter()
            .map(|x| x.clone() / piv.clone())
            .collect();
        let nz: Vec<usize> = (0..w).filter(|&j| !row_r[j].is_zero()).collect();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.at(i, col).clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.cells[i * w..(i + 1) * w];
            for &j in &nz {
                row[j] = row[j].clone() - f.clone() * row_r[j].clone();
            }
            row[col] = S::zero();
        }
        let f = self.obj[col].clone();
        if !f.is_zero() {
            for &j in &nz {
                self.obj[j] = self.obj[j].clone() - f.clone() * row_r[j].clone();
            }
            self.obj[col] = S::zero();
        }
        self.cells[r * w..(r + 1) * w].clone_from_slice(&row_r);
        self.basis[r] = col;
    }
}

/// Restore primal feasibility of a dual-feasible tableau. Leaves the row
/// whose basic variable has the smallest index among negative ones and
/// enters by the dual ratio test, ties to the smallest column.
fn dual_simplex<S: Scalar>(t: &mut Tableau<S>, tol: &S) -> Result<usize> {
    let w = t.width;
    let mut pivots = 0;
    loop {
        let leave = (0..t.rows)
            .filter(|&i| *t.at(i, w - 1) < -tol.clone())
            .min_by_key(|&i| t.basis[i]);
        let Some(r) = leave else { return Ok(pivots) };
        let mut enter: Option<(usize, S)> = None;
        for j in 0..w - 1 {
            let arj = t.at(r, j);
            if *arj < -tol.clone() {
                let ratio = t.obj[j].clone() / arj.clone();
                if enter.as_ref().is_none_or(|(_, best)| ratio < *best) {
                    enter = Some((j, ratio));
                }
            }
        }
        let Some((col, _)) = enter else {
            return Err(Error::Lp("infeasible".into()));
        };
        t.pivot(r, col);
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::Lp("pivot limit reached".into()));
        }
    }
}

/// Maximise `c·x` over `{x >= 0 : A x <= b}`; requires `b >= 0`.
pub fn maximize<S: Scalar>(a: &[Vec<S>], b: &[S], c: &[S], rule: PivotRule) -> Result<LpSolution<S>> {
    maximize_from(a, b, c, rule, &[])
}

/// As [`maximize`], starting from the basis `warm` (typically one found in
/// lower precision). A dual-feasible but primal-infeasible start is
/// repaired by dual simplex; anything else falls back to the slack basis.
pub fn maximize_from<S: Scalar>(
    a: &[Vec<S>],
    b: &[S],
    c: &[S],
    rule: PivotRule,
    warm: &[usize],
) -> Result<LpSolution<S>> {
    if !warm.is_empty() {
        if let Some(sol) = solve(a, b, c, rule, warm)? {
            return Ok(sol);
        }
    }
    Ok(solve(a, b, c, rule, &[])?.expect("the slack basis is feasible"))
}

fn solve<S: Scalar>(
    a: &[Vec<S>],
    b: &[S],
    c: &[S],
    rule: PivotRule,
    warm: &[usize],
) -> Result<Option<LpSolution<S>>> {
    let m = a.len();
    let nv = c.len();
    if b.len() != m || a.iter().any(|r| r.len() != nv) {
        return Err(Error::Lp("inconsistent dimensions".into()));
    }
    if b.iter().any(|x| *x < S::zero()) {
        return Err(Error::Lp("right-hand side must be nonnegative".into()));
    }
    let width = nv + m + 1;
    let perturb = !S::EXACT;
    let shifted: Vec<S> = if perturb {
        (0..m)
            .map(|i| b[i].clone() + S::from_ratio(1000 + (i as i64 * 7919) % 1000, 10_000_000_000))
            .collect()
    } else {
        b.to_vec()
    };
    let mut cells = vec![S::zero(); m * width];
    for i in 0..m {
        let row = &mut cells[i * width..(i + 1) * width];
        row[..nv].clone_from_slice(&a[i]);
        row[nv + i] = S::one();
        row[width - 1] = shifted[i].clone();
    }
    let mut obj = vec![S::zero(); width];
    obj[..nv].clone_from_slice(c);
    let mut t = Tableau {
        rows: m,
        width,
        cells,
        obj,
        basis: (nv..nv + m).collect(),
    };
    let tol = lp_tol::<S>();
    let mut pivots = 0;
    // Pivot each structural column of the warm basis into a row whose
    // basic slack is not itself part of the warm basis.
    let keep: Vec<bool> = (0..nv + m).map(|j| warm.contains(&j)).collect();
    for &j in warm {
        if j >= nv || t.basis.contains(&j) {
            continue;
        }
        let mut best: Option<usize> = None;
        for i in 0..m {
            let bi = t.basis[i];
            if bi >= nv
                && !keep[bi]
                && t.at(i, j).abs() > tol
                && best.is_none_or(|k| t.at(i, j).abs() > t.at(k, j).abs())
            {
                best = Some(i);
                if S::EXACT {
                    break;
                }
            }
        }
        if let Some(r) = best {
            t.pivot(r, j);
            pivots += 1;
        }
    }
    if (0..m).any(|i| *t.at(i, width - 1) < -tol.clone()) {
        if (0..width - 1).any(|j| t.obj[j] > tol) {
            return Ok(None);
        }
        pivots += dual_simplex(&mut t, &tol)?;
    }
    let mut degenerate = 0;
    loop {
        let bland = rule == PivotRule::Bland || degenerate >= DEGENERATE_RUN;
        let entering = if bland {
            (0..width - 1).find(|&j| t.obj[j] > tol)
        } else {
            let mut best: Option<usize> = None;
            for j in 0..width - 1 {
                if t.obj[j] > tol && best.is_none_or(|k| t.obj[j] > t.obj[k]) {
                    best = Some(j);
                }
            }
            best
        };
        let Some(col) = entering else { break };
        let mut leave: Option<(usize, S)> = None;
        for i in 0..m {
            let aij = t.at(i, col);
            if *aij > tol {
                let ratio = t.at(i, width - 1).clone() / aij.clone();
                let better = match &leave {
                    None => true,
                    Some((k, best)) => {
                        ratio < *best || (ratio == *best && t.basis[i] < t.basis[*k])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, step)) = leave else {
            return Err(Error::Lp("unbounded".into()));
        };
        if step.is_pos() {
            degenerate = 0;
        } else {
            degenerate += 1;
        }
        t.pivot(r, col);
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::Lp("pivot limit reached".into()));
        }
    }
    if perturb {
        // x_B = B^{-1} b, with B^{-1} sitting in the slack columns.
        let mut value = S::zero();
        for i in 0..m {
            let mut xi = S::zero();
            for (j, bj) in b.iter().enumerate() {
                if !bj.is_zero() {
                    xi = xi + t.at(i, nv + j).clone() * bj.clone();
                }
            }
            if xi < -S::from_ratio(1, 1_000_000) {
                return Err(Error::Lp("perturbed basis infeasible for the true right-hand side".into()));
            }
            if xi < S::zero() {
                xi = S::zero();
            }
            let bv = t.basis[i];
            if bv < nv {
                value = value + c[bv].clone() * xi.clone();
            }
            t.cells[i * width + width - 1] = xi;
        }
        t.obj[width - 1] = -value;
    }
    let mut x = vec![S::zero(); nv];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < nv {
            x[bv] = t.at(i, width - 1).clone();
        }
    }
    let dual = (0..m).map(|i| -t.obj[nv + i].clone()).collect();
    Ok(Some(LpSolution {
        x,
        dual,
        value: -t.obj[width - 1].clone(),
        pivots,
        basis: t.basis,
    }))
}

/// Solve `M x = r` by Gaussian elimination; `None` if `M` is singular.
fn solve_dense<S: Scalar>(mut mat: Vec<Vec<S>>, mut rhs: Vec<S>) -> Option<Vec<S>> {
    let m = rhs.len();
    let tol = lp_tol::<S>();
    for col in 0..m {
        let mut piv: Option<usize> = None;
        for i in col..m {
            if mat[i][col].abs() > tol && piv.is_none_or(|k| mat[i][col].abs() > mat[k][col].abs()) {
                piv = Some(i);
                if S::EXACT {
                    break;
                }
            }
        }
        let p = piv?;
        mat.swap(col, p);
        rhs.swap(col, p);
        let inv = S::one() / mat[col][col].clone();
        let nz: Vec<usize> = (col + 1..m).filter(|&j| !mat[col][j].is_zero()).collect();
        for i in col + 1..m {
            if mat[i][col].is_zero() {
                continue;
            }
            let f = mat[i][col].clone() * inv.clone();
            for &j in &nz {
                let d = f.clone() * mat[col][j].clone();
                mat[i][j] = mat[i][j].clone() - d;
            }
            mat[i][col] = S::zero();
            rhs[i] = rhs[i].clone() - f * rhs[col].clone();
        }
    }
    let mut x = vec![S::zero(); m];
    for i in (0..m).rev() {
        let mut acc = rhs[i].clone();
        for j in i + 1..m {
            if !mat[i][j].is_zero() {
                acc = acc - mat[i][j].clone() * x[j].clone();
            }
        }
        x[i] = acc / mat[i][i].clone();
    }
    Some(x)
}

/// Check that `basis` (as returned in [`LpSolution::basis`]) is optimal for
/// `maximize c·x, A x <= b, x >= 0`, solving for the basic solution and the
/// shadow prices directly. `None` if it is singular, infeasible or not
/// optimal.
pub fn certify_basis<S: Scalar>(a: &[Vec<S>], b: &[S], c: &[S], basis: &[usize]) -> Option<LpSolution<S>> {
    let m = a.len();
    let nv = c.len();
    if basis.len() != m {
        return None;
    }
    // Rows whose slack is basic drop out: their dual price is zero and the
    // slack absorbs whatever the structural columns leave. The remaining
    // rows and the structural basics form a square system.
    let mut slack_basic = vec![false; m];
    let mut structural: Vec<usize> = Vec::new();
    for &j in basis {
        if j < nv {
            structural.push(j);
        } else {
            slack_basic[j - nv] = true;
        }
    }
    let tight: Vec<usize> = (0..m).filter(|&i| !slack_basic[i]).collect();
    if tight.len() != structural.len() {
        return None;
    }
    let sq: Vec<Vec<S>> = tight
        .iter()
        .map(|&i| structural.iter().map(|&j| a[i][j].clone()).collect())
        .collect();
    let sq_t: Vec<Vec<S>> = (0..structural.len())
        .map(|k| sq.iter().map(|row| row[k].clone()).collect())
        .collect();
    let xs = solve_dense(sq, tight.iter().map(|&i| b[i].clone()).collect())?;
    let ys = solve_dense(sq_t, structural.iter().map(|&j| c[j].clone()).collect())?;
    let tol = lp_tol::<S>();
    let mut x = vec![S::zero(); nv];
    for (&j, v) in structural.iter().zip(xs) {
        if v < -tol.clone() {
            return None;
        }
        x[j] = v;
    }
    let mut y = vec![S::zero(); m];
    for (&i, v) in tight.iter().zip(ys) {
        if v < -tol.clone() {
            return None;
        }
        y[i] = v;
    }
    // Slack rows: b_i − a_i·x >= 0.
    for i in (0..m).filter(|&i| slack_basic[i]) {
        let ax = structural
            .iter()
            .filter(|&&j| !a[i][j].is_zero() && !x[j].is_zero())
            .fold(S::zero(), |acc, &j| acc + a[i][j].clone() * x[j].clone());
        if b[i].clone() - ax < -tol.clone() {
            return None;
        }
    }
    // Reduced costs c_j − y·A_j <= 0.
    for j in 0..nv {
        let ay = tight
            .iter()
            .filter(|&&i| !a[i][j].is_zero() && !y[i].is_zero())
            .fold(S::zero(), |acc, &i| acc + a[i][j].clone() * y[i].clone());
        if c[j].clone() - ay > tol {
            return None;
        }
    }
    let value = x
        .iter()
        .zip(c)
        .fold(S::zero(), |acc, (xj, cj)| acc + xj.clone() * cj.clone());
    Some(LpSolution {
        x,
        dual: y,
        value,
        pivots: 0,
        basis: basis.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: u64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 → (2, 6), value 36.
        let a = vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(2, 1)], vec![q(3, 1), q(2, 1)]];
        let b = vec![q(4, 1), q(12, 1), q(18, 1)];
        let c = vec![q(3, 1), q(5, 1)];
        for rule in [PivotRule::Bland, PivotRule::Dantzig] {
            let s = maximize(&a, &b, &c, rule).unwrap();
            assert_eq!(s.value, q(36, 1));
            assert_eq!(s.x, vec![q(2, 1), q(6, 1)]);
            // Strong duality: b·y = value, A^T y >= c.
            let by: Rational = b.iter().zip(&s.dual).map(|(b, y)| b * y).sum();
            assert_eq!(by, s.value);
            assert_eq!(s.dual, vec![q(0, 1), q(3, 2), q(1, 1)]);
        }
    }

    #[test]
    fn float_matches_exact() {
        let a = vec![vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0]];
        let b = vec![1.0f64, 1.0, 1.0];
        let c = vec![1.0, 1.0, 1.0];
        let s = maximize(&a, &b, &c, PivotRule::Dantzig).unwrap();
        assert!((s.value - 1.5).abs() < 1e-12);
    }

    #[test]
    fn float_basis_certified_exactly() {
        let a = vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(2, 1)], vec![q(3, 1), q(2, 1)]];
        let b = vec![q(4, 1), q(12, 1), q(18, 1)];
        let c = vec![q(3, 1), q(5, 1)];
        let to_f = |v: &[Rational]| v.iter().map(|x| x.to_f64()).collect::<Vec<f64>>();
        let af: Vec<Vec<f64>> = a.iter().map(|r| to_f(r)).collect();
        let fs = maximize(&af, &to_f(&b), &to_f(&c), PivotRule::Dantzig).unwrap();
        let s = certify_basis(&a, &b, &c, &fs.basis).unwrap();
        assert_eq!(s.value, q(36, 1));
        assert_eq!(s.dual, vec![q(0, 1), q(3, 2), q(1, 1)]);
        // The slack basis is feasible but not optimal.
        assert!(certify_basis(&a, &b, &c, &[2, 3, 4]).is_none());
    }

    #[test]
    fn unbounded_detected() {
        let a = vec![vec![q(1, 1), q(-1, 1)]];
        let b = vec![q(1, 1)];
        let c = vec![q(0, 1), q(1, 1)];
        assert!(matches!(maximize(&a, &b, &c, PivotRule::Bland), Err(Error::Lp(_))));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example (for Dantzig without anti-cycling).
        let a = vec![
            vec![q(1, 4), q(-8, 1), q(-1, 1), q(9, 1)],
            vec![q(1, 2), q(-12, 1), q(-1, 2), q(3, 1)],
            vec![q(0, 1), q(0, 1), q(1, 1), q(0, 1)],
        ];
        let b = vec![q(0, 1), q(0, 1), q(1, 1)];
        let c = vec![q(3, 4), q(-20, 1), q(1, 2), q(-6, 1)];
        let s = maximize(&a, &b, &c, PivotRule::Bland).unwrap();
        assert_eq!(s.value, q(5, 4));
    }
}
