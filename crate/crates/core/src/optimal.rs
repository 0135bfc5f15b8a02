//! The tester minimising ε/δ, found by linear programming.
//!
//! With weights `w_α >= 0` on nonzero dual codewords, the program is
//!
//! ```text
//! minimise   e
//! subject to Σ_α w_α [<α, v> = 1] >= wt(v̄)   for every nonzero coset v̄
//!            Σ_α w_α α_i <= e                for every coordinate i
//! ```
//!
//! Normalising `w` gives a tester with `ε/δ <= e`, and the optimum `e` is
//! the least ratio any tester achieves, which equals the ℓ1 distortion of
//! the coset graph. The solver works on the dual program, whose origin is
//! feasible, and reads `w` off its shadow prices.

use crate::codes::CosetTable;
use crate::error::{Error, Result};
use crate::f2::{parity, wht};
use crate::lp::{certify_basis, lp_tol, maximize_from, LpSolution, PivotRule};
use crate::scalar::{Extended, Scalar};
use crate::tester::Tester;

/// Largest redundancy `n − k` accepted with exact arithmetic.
pub const MAX_EXACT_DIM: usize = 12;
/// Largest redundancy `n − k` accepted with float arithmetic.
pub const MAX_FLOAT_DIM: usize = 14;

/// Rows added per round of row generation.
const BATCH: usize = 4;

/// Primal and dual optimal solutions of the tester program.
#[derive(Clone, Debug)]
pub struct LpCertificate<S> {
    /// Unnormalised primal weights `w_α`, keyed by dual-code coordinates.
    pub weights: Vec<(u64, S)>,
    /// Dual multipliers of the coset constraints, keyed by syndrome.
    pub coset_duals: Vec<(u64, S)>,
    /// Dual multipliers of the per-coordinate load constraints.
    pub coord_duals: Vec<S>,
    pub value: S,
}

#[derive(Clone, Debug)]
pub struct OptimalTester<S> {
    pub tester: Tester<S>,
    /// Minimum of ε/δ over all testers.
    pub ratio: S,
    pub certificate: LpCertificate<S>,
}

fn close<S: Scalar>(a: &S, b: &S) -> bool {
    if S::EXACT {
        a == b
    } else {
        let scale = S::one() + a.abs();
        (a.clone() - b.clone()).abs() <= lp_tol::<S>() * S::from_count(100) * scale
    }
}

fn geq<S: Scalar>(a: &S, b: &S) -> bool {
    S::EXACT && a >= b || !S::EXACT && a.clone() + lp_tol::<S>() * S::from_count(100) >= *b
}

/// Solve the tester program.
///
/// The dual program has a row per nonzero dual word and a column per
/// nonzero coset, far too many to pivot on directly. Both are generated
/// lazily: starting from the unit coordinate words (which keep the
/// restricted program bounded) and the weight-one cosets, solve, then use
/// one transform of `y` to find violated rows and one transform of `w` to
/// find under-rejected cosets, add the worst of each, and repeat. When
/// neither exists the restricted optimum is optimal for the full program.
///
/// Exact solves first run the float version, then certify its final basis
/// in rational arithmetic, falling back to exact pivoting if that fails.
pub fn optimal_tester<S: Scalar>(tbl: &CosetTable) -> Result<OptimalTester<S>> {
    let code = tbl.code();
    let h = code.h();
    if h == 0 {
        return Err(Error::NoValidTester);
    }
    let limit = if S::EXACT { MAX_EXACT_DIM } else { MAX_FLOAT_DIM };
    if h > limit {
        return Err(Error::TooLarge(format!("LP over 2^{h} dual words")));
    }
    let program = Program::<S>::new(tbl);
    let start = program.start();
    if !S::EXACT {
        let (act, sol) = program.generate(start, &[])?;
        return finish(tbl, certificate(&act, &sol));
    }
    let float = Program::<f64>::new(tbl);
    let Ok((act, fsol)) = float.generate(start.clone(), &[]) else {
        let (act, sol) = program.generate(start, &[])?;
        return finish(tbl, certificate(&act, &sol));
    };
    // Small-denominator rationals near the float optimum usually are the
    // exact optimum; the certificate check decides.
    let guess = rationalize::<S>(&certificate(&act, &fsol));
    if guess.verify(tbl).is_ok() {
        return finish(tbl, guess);
    }
    let (a, b, c) = program.restricted(&act);
    let (act, sol) = match certify_basis(&a, &b, &c, &fsol.basis) {
        Some(sol) if program.violations(&act, &sol).is_none() => (act, sol),
        _ => program.generate(act, &fsol.basis)?,
    };
    finish(tbl, certificate(&act, &sol))
}

/// Nearest rational to `x` with error at most `1e−9 · max(1, |x|)`, taking
/// the first continued-fraction convergent that qualifies.
fn nearest_simple<S: Scalar>(x: f64) -> S {
    let tol = 1e-9 * x.abs().max(1.0);
    if x.abs() <= tol {
        return S::zero();
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if k1 > 0 && (x - h1 as f64 / k1 as f64).abs() <= tol {
            break;
        }
        let frac = r - a;
        if frac.abs() < 1e-15 || k1 > 1 << 40 {
            break;
        }
        r = 1.0 / frac;
    }
    match (i64::try_from(h1), u64::try_from(k1)) {
        (Ok(p), Ok(q)) if q > 0 => S::from_ratio(p, q),
        _ => crate::scalar::convert::<f64, S>(&x),
    }
}

fn rationalize<S: Scalar>(c: &LpCertificate<f64>) -> LpCertificate<S> {
    let keyed = |v: &[(u64, f64)]| -> Vec<(u64, S)> {
        v.iter()
            .map(|(k, x)| (*k, nearest_simple::<S>(*x)))
            .filter(|(_, x)| !x.is_zero())
            .collect()
    };
    LpCertificate {
        weights: keyed(&c.weights),
        coset_duals: keyed(&c.coset_duals),
        coord_duals: c.coord_duals.iter().map(|&x| nearest_simple(x)).collect(),
        value: nearest_simple(c.value),
    }
}

/// Rows and columns of the restricted dual program.
#[derive(Clone)]
struct Active {
    words: Vec<u64>,
    cosets: Vec<u64>,
}

struct Program<S> {
    n: usize,
    size: usize,
    supports: Vec<Vec<usize>>,
    weight: Vec<S>,
}

impl<S: Scalar> Program<S> {
    fn new(tbl: &CosetTable) -> Self {
        let code = tbl.code();
        let (n, h) = (code.n(), code.h());
        let size = 1usize << h;
        let supports = (0..size as u64)
            .map(|a| code.dual_word(a).iter_ones().collect())
            .collect();
        let weight = (0..size).map(|v| S::from_count(tbl.leader_weight(v))).collect();
        Self {
            n,
            size,
            supports,
            weight,
        }
    }

    fn start(&self) -> Active {
        let h = self.size.trailing_zeros();
        let mut cosets: Vec<u64> = (1..self.size as u64)
            .filter(|&v| self.weight[v as usize] == S::one())
            .collect();
        cosets.truncate(BATCH);
        Active {
            words: (0..h).map(|j| 1u64 << j).collect(),
            cosets,
        }
    }

    /// Rows: `Σ z <= 1`, then `Σ_v y_v [<α,v> = 1] − Σ_i z_i α_i <= 0` for
    /// each active α. Columns: `y_v` for active cosets, then `z`. Appending
    /// keeps existing row indices.
    fn restricted(&self, act: &Active) -> (Vec<Vec<S>>, Vec<S>, Vec<S>) {
        let nc = act.cosets.len();
        let width = nc + self.n;
        let mut rows: Vec<Vec<S>> = Vec::with_capacity(act.words.len() + 1);
        let mut first = vec![S::zero(); width];
        for z in first[nc..].iter_mut() {
            *z = S::one();
        }
        rows.push(first);
        for &alpha in &act.words {
            let mut row = vec![S::zero(); width];
            for (j, &v) in act.cosets.iter().enumerate() {
                if parity(alpha, v) {
                    row[j] = S::one();
                }
            }
            for &i in &self.supports[alpha as usize] {
                row[nc + i] = -S::one();
            }
            rows.push(row);
        }
        let mut b = vec![S::zero(); act.words.len() + 1];
        b[0] = S::one();
        let mut c: Vec<S> = act.cosets.iter().map(|&v| self.weight[v as usize].clone()).collect();
        c.extend(std::iter::repeat_n(S::zero(), self.n));
        (rows, b, c)
    }

    /// Violated rows and under-rejected cosets outside `act`, worst first;
    /// `None` when there are neither.
    ///
    /// With `y` and `w` spread over `F2^h`, row α is violated by
    /// `(Σ y − ŷ(α))/2 − Σ_i z_i α_i`, and coset v is short of
    /// `wt(v) − (Σ w − ŵ(v))/2`.
    fn violations(&self, act: &Active, sol: &LpSolution<S>) -> Option<(Vec<u64>, Vec<u64>)> {
        let size = self.size;
        let nc = act.cosets.len();
        let two = S::from_count(2);
        let tol = lp_tol::<S>();
        let worst = |mut found: Vec<(S, u64)>| -> Vec<u64> {
            found.sort_by(|x, y| {
                y.0.partial_cmp(&x.0)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(x.1.cmp(&y.1))
            });
            found.into_iter().take(BATCH).map(|(_, a)| a).collect()
        };

        let mut y = vec![S::zero(); size];
        for (j, &v) in act.cosets.iter().enumerate() {
            y[v as usize] = sol.x[j].clone();
        }
        let ysum = y.iter().fold(S::zero(), |acc, t| acc + t.clone());
        wht(&mut y);
        let z = &sol.x[nc..];
        let mut seen = vec![false; size];
        for &a in &act.words {
            seen[a as usize] = true;
        }
        let mut rows = Vec::new();
        for a in 1..size {
            if seen[a] {
                continue;
            }
            let lhs = (ysum.clone() - y[a].clone()) / two.clone();
            let rhs = self.supports[a].iter().fold(S::zero(), |acc, &i| acc + z[i].clone());
            let excess = lhs - rhs;
            if excess > tol {
                rows.push((excess, a as u64));
            }
        }

        let mut w = vec![S::zero(); size];
        for (k, &a) in act.words.iter().enumerate() {
            w[a as usize] = sol.dual[k + 1].clone();
        }
        let wsum = w.iter().fold(S::zero(), |acc, t| acc + t.clone());
        wht(&mut w);
        let mut seen = vec![false; size];
        for &v in &act.cosets {
            seen[v as usize] = true;
        }
        let mut cols = Vec::new();
        for v in 1..size {
            if seen[v] {
                continue;
            }
            let rej = (wsum.clone() - w[v].clone()) / two.clone();
            let short = self.weight[v].clone() - rej;
            if short > tol {
                cols.push((short, v as u64));
            }
        }

        if rows.is_empty() && cols.is_empty() {
            None
        } else {
            Some((worst(rows), worst(cols)))
        }
    }

    fn generate(&self, mut act: Active, warm: &[usize]) -> Result<(Active, LpSolution<S>)> {
        let rule = if S::EXACT { PivotRule::Bland } else { PivotRule::Dantzig };
        let mut warm = warm.to_vec();
        loop {
            let (a, b, c) = self.restricted(&act);
            let sol = maximize_from(&a, &b, &c, rule, &warm)?;
            let Some((rows, cols)) = self.violations(&act, &sol) else {
                return Ok((act, sol));
            };
            act.words.extend(rows);
            act.cosets.extend(cols);
            warm.clear();
        }
    }
}

/// Read the certificate off an optimal restricted solution.
fn certificate<S: Scalar>(act: &Active, sol: &LpSolution<S>) -> LpCertificate<S> {
    let nc = act.cosets.len();
    let clean = |v: &S| if !S::EXACT && v.abs() <= lp_tol::<S>() { S::zero() } else { v.clone() };
    let mut weights: Vec<(u64, S)> = act
        .words
        .iter()
        .zip(&sol.dual[1..])
        .map(|(&a, w)| (a, clean(w)))
        .filter(|(_, w)| !w.is_zero())
        .collect();
    weights.sort_by_key(|(a, _)| *a);
    let mut coset_duals: Vec<(u64, S)> = act
        .cosets
        .iter()
        .zip(&sol.x)
        .map(|(&v, y)| (v, clean(y)))
        .filter(|(_, y)| !y.is_zero())
        .collect();
    coset_duals.sort_by_key(|(v, _)| *v);
    LpCertificate {
        weights,
        coset_duals,
        coord_duals: sol.x[nc..].iter().map(clean).collect(),
        value: sol.value.clone(),
    }
}

fn finish<S: Scalar>(tbl: &CosetTable, cert: LpCertificate<S>) -> Result<OptimalTester<S>> {
    let code = tbl.code().clone();
    let total = cert.weights.iter().fold(S::zero(), |acc, (_, w)| acc + w.clone());
    if !total.is_pos() {
        return Err(Error::NoValidTester);
    }
    let masses = cert
        .weights
        .iter()
        .map(|(a, w)| (*a, w.clone() / total.clone()))
        .collect();
    let tester = Tester::from_coords(code, masses)?;
    let report = tester.soundness(tbl, None)?;
    match &report.ratio {
        Extended::Finite(r) if close(r, &cert.value) => {}
        other => {
            return Err(Error::IdentityViolated(format!(
                "LP value {} but tester ratio {}",
                cert.value.render(),
                other.render()
            )))
        }
    }
    Ok(OptimalTester {
        tester,
        ratio: cert.value.clone(),
        certificate: cert,
    })
}

impl<S: Scalar> LpCertificate<S> {
    /// Check primal feasibility, dual feasibility and equal objectives.
    pub fn verify(&self, tbl: &CosetTable) -> Result<()> {
        let code = tbl.code();
        let (n, h) = (code.n(), code.h());
        let fail = |m: String| Err(Error::IdentityViolated(m));
        let zero = S::zero();
        let dual_words: Vec<(u64, Vec<usize>)> = (1..1u64 << h)
            .map(|a| (a, code.dual_word(a).iter_ones().collect()))
            .collect();
        // Primal: every coset rejected at least its weight; loads <= value.
        for v in 1..1u64 << h {
            let rej = self
                .weights
                .iter()
                .filter(|(a, _)| parity(*a, v))
                .fold(zero.clone(), |acc, (_, w)| acc + w.clone());
            if !geq(&rej, &S::from_count(tbl.leader_weight(v as usize))) {
                return fail(format!("coset {v} under-rejected"));
            }
        }
        let mut load = vec![zero.clone(); n];
        for (a, w) in &self.weights {
            if !geq(w, &zero) {
                return fail("negative primal weight".into());
            }
            for &i in &dual_words[(*a - 1) as usize].1 {
                load[i] = load[i].clone() + w.clone();
            }
        }
        if load.iter().any(|l| !geq(&self.value, l)) {
            return fail("coordinate load exceeds value".into());
        }
        // Dual: Σ_v y_v [<α,v> = 1] <= Σ_i z_i α_i for every α; Σ z <= 1.
        if self.coord_duals.iter().any(|z| !geq(z, &zero))
            || self.coset_duals.iter().any(|(_, y)| !geq(y, &zero))
        {
            return fail("negative dual multiplier".into());
        }
        let zsum = self.coord_duals.iter().fold(zero.clone(), |acc, z| acc + z.clone());
        if !geq(&S::one(), &zsum) {
            return fail("coordinate multipliers exceed 1".into());
        }
        for (a, support) in &dual_words {
            let lhs = self
                .coset_duals
                .iter()
                .filter(|(v, _)| parity(*a, *v))
                .fold(zero.clone(), |acc, (_, y)| acc + y.clone());
            let rhs = support
                .iter()
                .fold(zero.clone(), |acc, &i| acc + self.coord_duals[i].clone());
            if !geq(&rhs, &lhs) {
                return fail(format!("dual constraint for word {a} violated"));
            }
        }
        let dual_value = self.coset_duals.iter().fold(zero, |acc, (v, y)| {
            acc + y.clone() * S::from_count(tbl.leader_weight(*v as usize))
        });
        if !close(&dual_value, &self.value) {
            return fail(format!(
                "duality gap: primal {} dual {}",
                self.value.render(),
                dual_value.render()
            ));
        }
        Ok(())
    }
}
