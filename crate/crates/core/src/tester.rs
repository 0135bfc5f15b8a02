//! Distributions on the dual code viewed as local testers.
//!
//! A tester rejects a received word `v` when a sampled dual codeword `α`
//! has `<α, v> = 1`. Its quality is the pair (smoothness ε, soundness δ):
//! every coordinate is queried with probability at most ε, and every word
//! is rejected with probability at least δ times its distance to the code.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::codes::{CosetTable, LinearCode};
use crate::error::{Error, Result};
use crate::f2::{check_group_dim, parity, wht, BitVec};
use crate::scalar::{convert, recip, Extended, Scalar};

/// Largest number of multiply-adds `boost_explicit` will perform.
const EXPLICIT_BUDGET: u128 = 1 << 24;

#[derive(Clone, Debug)]
pub struct Tester<S> {
    code: Arc<LinearCode>,
    /// Sorted by codeword, duplicates merged, zero masses dropped.
    support: Vec<(BitVec, S)>,
    /// Coordinates of each support word in the parity-check basis.
    coords: Vec<u64>,
    /// Support indices grouped by equal probability.
    classes: Vec<(S, Vec<usize>)>,
}

impl<S: Scalar> PartialEq for Tester<S> {
    fn eq(&self, other: &Self) -> bool {
        *self.code == *other.code && self.support == other.support
    }
}

/// Smoothness and soundness of a tester on its code.
#[derive(Clone, Debug, PartialEq)]
pub struct TesterReport<S> {
    pub epsilon: S,
    pub delta: S,
    /// `epsilon / delta`; infinite when `delta = 0`.
    pub ratio: Extended<S>,
    pub covering_radius: usize,
    pub cap: Option<usize>,
    /// Soundness against `min(d(v, C), cap)` when a cap was requested.
    pub capped_delta: Option<S>,
}

impl<S: Scalar> Tester<S> {
    pub fn new(code: Arc<LinearCode>, support: Vec<(BitVec, S)>) -> Result<Self> {
        let n = code.n();
        let mut total = S::zero();
        for (v, p) in &support {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
            if !code.is_dual_codeword(v) {
                return Err(Error::NotDualCodeword(v.to_string()));
            }
            if !p.approx_ge(&S::zero()) {
                return Err(Error::BadDistribution(format!("negative mass {}", p.render())));
            }
            total = total + p.clone();
        }
        if !total.approx_eq(&S::one()) {
            return Err(Error::BadDistribution(total.render()));
        }
        let mut support = support;
        support.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(BitVec, S)> = Vec::with_capacity(support.len());
        for (v, p) in support {
            match merged.last_mut() {
                Some((w, q)) if *w == v => *q = q.clone() + p,
                _ => merged.push((v, p)),
            }
        }
        merged.retain(|(_, p)| !p.is_zero());
        let coords = if code.h() <= 64 {
            merged
                .iter()
                .map(|(v, _)| code.dual_coords(v).expect("dual codeword has coordinates"))
                .collect()
        } else {
            Vec::new()
        };
        let mut classes: Vec<(S, Vec<usize>)> = Vec::new();
        for (i, (_, p)) in merged.iter().enumerate() {
            match classes.iter_mut().find(|(q, _)| q == p) {
                Some((_, idx)) => idx.push(i),
                None => classes.push((p.clone(), vec![i])),
            }
        }
        Ok(Self {
            code,
            support: merged,
            coords,
            classes,
        })
    }

    /// Tester from masses on dual-code coordinates (parity-check basis).
    pub fn from_coords(code: Arc<LinearCode>, masses: Vec<(u64, S)>) -> Result<Self> {
        let support = masses
            .into_iter()
            .map(|(a, p)| (code.dual_word(a), p))
            .collect();
        Self::new(code, support)
    }

    /// Tester from a dense mass table indexed by dual-code coordinates.
    pub fn from_dense(code: Arc<LinearCode>, mass: &[S]) -> Result<Self> {
        let masses = mass
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(a, p)| (a as u64, p.clone()))
            .collect();
        Self::from_coords(code, masses)
    }

    /// Uniform distribution over the given dual codewords (a multiset).
    pub fn uniform(code: Arc<LinearCode>, words: Vec<BitVec>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::BadDistribution("empty support".into()));
        }
        let p = recip::<S>(words.len());
        Self::new(code, words.into_iter().map(|w| (w, p.clone())).collect())
    }

    /// The lazy tester that always samples the zero dual codeword.
    pub fn point_mass_zero(code: Arc<LinearCode>) -> Self {
        let n = code.n();
        Self::new(code, vec![(BitVec::zeros(n), S::one())]).expect("zero is a dual codeword")
    }

    /// `(1 − p)·δ_0 + p·self`.
    pub fn diluted(&self, p: S) -> Result<Self> {
        let mut support: Vec<(BitVec, S)> = self
            .support
            .iter()
            .map(|(v, q)| (v.clone(), q.clone() * p.clone()))
            .collect();
        support.push((BitVec::zeros(self.code.n()), S::one() - p));
        Self::new(self.code.clone(), support)
    }

    pub fn code(&self) -> &Arc<LinearCode> {
        &self.code
    }

    pub fn support(&self) -> &[(BitVec, S)] {
        &self.support
    }

    /// Parity-check-basis coordinates of the support, aligned with
    /// [`support`](Self::support).
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn convert<T: Scalar>(&self) -> Tester<T> {
        let support = self
            .support
            .iter()
            .map(|(v, p)| (v.clone(), convert::<S, T>(p)))
            .collect();
        Tester::new(self.code.clone(), support).expect("conversion preserves validity")
    }

    /// Dense mass table over `F2^h` indexed by dual-code coordinates.
    pub fn dense(&self) -> Result<Vec<S>> {
        check_group_dim(self.code.h())?;
        let mut mass = vec![S::zero(); 1 << self.code.h()];
        for (&a, (_, p)) in self.coords.iter().zip(&self.support) {
            mass[a as usize] = mass[a as usize].clone() + p.clone();
        }
        Ok(mass)
    }

    /// `Rej(v) = Pr_α[<α, v> = 1]`, by direct evaluation on the support.
    pub fn rej(&self, v: &BitVec) -> S {
        assert_eq!(v.len(), self.code.n());
        self.sum_classes(|i| self.support[i].0.dot(v))
    }

    /// Rejection probability of the coset with syndrome `s`.
    pub fn rej_syndrome(&self, s: u64) -> S {
        self.sum_classes(|i| parity(self.coords[i], s))
    }

    fn sum_classes(&self, rejects: impl Fn(usize) -> bool) -> S {
        self.classes.iter().fold(S::zero(), |acc, (p, idx)| {
            let count = idx.iter().filter(|&&i| rejects(i)).count();
            if count == 0 {
                acc
            } else {
                acc + p.clone() * S::from_count(count)
            }
        })
    }

    /// Rejection probability of every coset, indexed by syndrome. Large
    /// supports go through the transform, `Rej = (1 − D̂) / 2`.
    pub fn coset_rejections(&self) -> Result<Vec<S>> {
        let h = self.code.h();
        check_group_dim(h)?;
        if self.classes.len() <= 2 * h.max(1) {
            return self.coset_rejections_direct();
        }
        let mut lambda = self.dense()?;
        wht(&mut lambda);
        let two = S::from_count(2);
        Ok(lambda.into_iter().map(|l| (S::one() - l) / two.clone()).collect())
    }

    /// [`Self::coset_rejections`] by direct evaluation on the support.
    pub fn coset_rejections_direct(&self) -> Result<Vec<S>> {
        let h = self.code.h();
        check_group_dim(h)?;
        Ok((0..1u64 << h).map(|s| self.rej_syndrome(s)).collect())
    }

    /// ε = max_i Rej(e_i).
    pub fn smoothness(&self) -> S {
        let n = self.code.n();
        (0..n)
            .map(|i| self.rej(&BitVec::unit(i, n)))
            .fold(S::zero(), |m, r| if r > m { r } else { m })
    }

    /// Smoothness, soundness and (optionally) capped soundness against the
    /// coset table of the same code.
    pub fn soundness(&self, tbl: &CosetTable, cap: Option<usize>) -> Result<TesterReport<S>> {
        if **tbl.code() != *self.code {
            return Err(Error::PreconditionFailed("coset table belongs to another code".into()));
        }
        if cap == Some(0) {
            return Err(Error::PreconditionFailed("cap must be at least 1".into()));
        }
        let epsilon = self.smoothness();
        let rej = self.coset_rejections()?;
        let mut delta: Option<S> = None;
        let mut capped: Option<S> = None;
        for (s, r) in rej.iter().enumerate().skip(1) {
            let w = tbl.leader_weight(s);
            let d = r.clone() / S::from_count(w);
            if delta.as_ref().is_none_or(|m| d < *m) {
                delta = Some(d);
            }
            if let Some(c) = cap {
                let d = r.clone() / S::from_count(w.min(c));
                if capped.as_ref().is_none_or(|m| d < *m) {
                    capped = Some(d);
                }
            }
        }
        let delta = delta.unwrap_or_else(S::zero);
        let capped_delta = cap.map(|_| capped.unwrap_or_else(S::zero));
        let t = tbl.covering_radius();
        let report = TesterReport {
            ratio: Extended::ratio(epsilon.clone(), delta.clone()),
            epsilon,
            delta,
            covering_radius: t,
            cap,
            capped_delta,
        };
        report.check_invariants()?;
        Ok(report)
    }

    /// Whether the support is a basis of the dual code.
    pub fn is_basis_tester(&self) -> bool {
        let h = self.code.h();
        self.support.len() == h
            && crate::f2::span_dim(&self.coords, h) == h
            && self.support.iter().all(|(v, _)| !v.is_zero())
    }

    /// `ℓ`-fold XOR convolution of the tester with itself. Uses explicit
    /// convolution when it fits the work budget and the spectral route
    /// otherwise.
    pub fn boost(&self, ell: u32) -> Result<Self> {
        match self.boost_explicit(ell) {
            Err(Error::SupportBlowup) => self.boost_spectral(ell),
            other => other,
        }
    }

    /// Sum of `ℓ` independent samples, computed by repeated convolution of
    /// the support with itself.
    pub fn boost_explicit(&self, ell: u32) -> Result<Self> {
        if ell == 0 {
            return Err(Error::PreconditionFailed("boost needs ell >= 1".into()));
        }
        let h = self.code.h();
        if h > 20 {
            return Err(Error::SupportBlowup);
        }
        let s = self.support.len() as u128;
        let size = 1u128 << h;
        let mut cost = 0u128;
        let mut reach = s;
        for _ in 1..ell {
            cost += reach.min(size) * s;
            reach = reach.saturating_mul(s);
        }
        if cost > EXPLICIT_BUDGET {
            return Err(Error::SupportBlowup);
        }
        let base: Vec<(u64, S)> = self
            .coords
            .iter()
            .zip(&self.support)
            .map(|(&a, (_, p))| (a, p.clone()))
            .collect();
        if S::EXACT {
            if let Some(cur) = convolve_integers(&base, ell, h) {
                return Self::from_coords(self.code.clone(), cur);
            }
        }
        let mut cur = base.clone();
        let mut acc = vec![S::zero(); 1 << h];
        let mut touched = vec![false; 1 << h];
        for _ in 1..ell {
            let mut order = Vec::new();
            for (x, p) in &cur {
                for (a, q) in &base {
                    let y = (x ^ a) as usize;
                    if !touched[y] {
                        touched[y] = true;
                        order.push(y);
                    }
                    acc[y] = acc[y].clone() + p.clone() * q.clone();
                }
            }
            order.sort_unstable();
            cur = order
                .iter()
                .map(|&y| {
                    touched[y] = false;
                    (y as u64, std::mem::replace(&mut acc[y], S::zero()))
                })
                .collect();
        }
        Self::from_coords(self.code.clone(), cur)
    }

    /// Boosted tester through the spectrum: `λ ↦ λ^ℓ`, then invert the
    /// transform.
    pub fn boost_spectral(&self, ell: u32) -> Result<Self> {
        if ell == 0 {
            return Err(Error::PreconditionFailed("boost needs ell >= 1".into()));
        }
        let mut mass = self.dense()?;
        wht(&mut mass);
        for l in mass.iter_mut() {
            *l = l.powu(ell);
        }
        wht(&mut mass);
        let scale = recip::<S>(mass.len());
        for m in mass.iter_mut() {
            *m = m.clone() * scale.clone();
            if !S::EXACT && m.abs() <= S::tolerance() {
                *m = S::zero();
            }
        }
        Self::from_dense(self.code.clone(), &mass)
    }

    /// Serialise as a tester file referring to `code_ref`.
    pub fn to_text(&self, code_ref: &str) -> String {
        let mut s = format!("tester {code_ref}\n");
        for (v, p) in &self.support {
            s.push_str(&format!("{} {v}\n", p.render()));
        }
        s
    }

    /// Parse a tester file; `resolve` loads the code it names.
    pub fn parse(
        text: &str,
        resolve: impl FnOnce(&str) -> Result<Arc<LinearCode>>,
    ) -> Result<(String, Self)> {
        let (code_ref, entries) = parse_tester_lines(text)?;
        let code = resolve(&code_ref)?;
        let tester = Self::new(code, entries)?;
        Ok((code_ref, tester))
    }
}

fn parse_tester_lines<S: Scalar>(text: &str) -> Result<(String, Vec<(BitVec, S)>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty tester file"))?;
    let code_ref = header
        .strip_prefix("tester ")
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .ok_or_else(|| Error::parse(no, "header must be `tester <codefile>`"))?
        .to_string();
    let mut entries = Vec::new();
    for (no, line) in lines {
        let (p, v) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::parse(no, "expected `p/q bits`"))?;
        let p = S::parse_prob(p).ok_or_else(|| Error::parse(no, format!("bad probability {p:?}")))?;
        let v: BitVec = v.trim().parse().map_err(|e| Error::parse(no, format!("{e}")))?;
        entries.push((v, p));
    }
    Ok((code_ref, entries))
}

impl<S: Scalar> TesterReport<S> {
    /// `δ <= ε` and `δ·t <= 1` (and the capped analogues) hold for every
    /// tester on every code.
    pub fn check_invariants(&self) -> Result<()> {
        if !self.epsilon.approx_ge(&self.delta) {
            return Err(Error::IdentityViolated(format!(
                "delta {} exceeds epsilon {}",
                self.delta.render(),
                self.epsilon.render()
            )));
        }
        let t = self.covering_radius;
        if !S::one().approx_ge(&(self.delta.clone() * S::from_count(t))) {
            return Err(Error::IdentityViolated(format!(
                "delta {} exceeds 1/t with t = {t}",
                self.delta.render()
            )));
        }
        if let (Some(c), Some(cd)) = (self.cap, &self.capped_delta) {
            let m = t.min(c);
            if !self.epsilon.approx_ge(cd) || !S::one().approx_ge(&(cd.clone() * S::from_count(m))) {
                return Err(Error::IdentityViolated(format!(
                    "capped delta {} out of range",
                    cd.render()
                )));
            }
        }
        Ok(())
    }
}

/// Exact `ℓ`-fold convolution on integer numerators over a common
/// denominator. `None` if a count overflows.
fn convolve_integers<S: Scalar>(base: &[(u64, S)], ell: u32, h: usize) -> Option<Vec<(u64, S)>> {
    let fracs: Vec<(u64, BigRational)> = base.iter().map(|(a, p)| (*a, convert(p))).collect();
    let den = fracs.iter().fold(BigInt::one(), |l, (_, p)| l.lcm(p.denom()));
    let ints = fracs
        .iter()
        .map(|(a, p)| Some((*a, (p.numer() * (&den / p.denom())).to_u128()?)))
        .collect::<Option<Vec<(u64, u128)>>>()?;
    let mut cur = ints.clone();
    let mut acc = vec![0u128; 1 << h];
    let mut touched = vec![false; 1 << h];
    for _ in 1..ell {
        let mut order = Vec::new();
        for &(x, p) in &cur {
            for &(a, q) in &ints {
                let y = (x ^ a) as usize;
                if !touched[y] {
                    touched[y] = true;
                    order.push(y);
                }
                acc[y] = acc[y].checked_add(p.checked_mul(q)?)?;
            }
        }
        order.sort_unstable();
        cur = order
            .iter()
            .map(|&y| {
                touched[y] = false;
                (y as u64, std::mem::take(&mut acc[y]))
            })
            .collect();
    }
    let scale = BigRational::from_integer(num_traits::pow(den, ell as usize));
    Some(
        cur.into_iter()
            .filter(|&(_, c)| c != 0)
            .map(|(y, c)| (y, convert(&(BigRational::from_integer(BigInt::from(c)) / scale.clone()))))
            .collect(),
    )
}

/// `Rej` after boosting, from the single-sample rejection:
/// `1 − 2·Rej' = (1 − 2·Rej)^ℓ`.
pub fn boosted_rejection<S: Scalar>(rej: &S, ell: u32) -> S {
    let two = S::from_count(2);
    (S::one() - (S::one() - two.clone() * rej.clone()).powu(ell)) / two
}

/// Outcome of [`covradius_boost`].
#[derive(Clone, Debug)]
pub struct CovRadiusBoost<S> {
    pub tester: Tester<S>,
    /// `None` when the input already met the target soundness.
    pub ell: Option<u64>,
    pub report: TesterReport<S>,
}

/// Turn a tester with `δ >= ε/c` into one with `ε' <= 1/(4t)` and
/// `δ' >= 1/(16·c·t)` by boosting `ℓ = ⌊1/(4tε)⌋` times.
pub fn covradius_boost<S: Scalar>(
    tester: &Tester<S>,
    tbl: &CosetTable,
    c: &S,
) -> Result<CovRadiusBoost<S>> {
    let report = tester.soundness(tbl, None)?;
    let TesterReport { epsilon, delta, .. } = &report;
    if !delta.is_pos() {
        return Err(Error::PremiseViolated("tester has zero soundness".into()));
    }
    if !c.is_pos() || !(delta.clone() * c.clone()).approx_ge(epsilon) {
        return Err(Error::PremiseViolated(format!(
            "delta {} < epsilon {} / c {}",
            delta.render(),
            epsilon.render(),
            c.render()
        )));
    }
    let t = tbl.covering_radius();
    let tt = S::from_count(t);
    let target = S::one() / (S::from_count(16) * c.clone() * tt.clone());
    if *delta > target {
        return Ok(CovRadiusBoost {
            tester: tester.clone(),
            ell: None,
            report,
        });
    }
    let ell = (S::one() / (S::from_count(4) * tt.clone() * epsilon.clone()))
        .floor_u64()
        .filter(|&l| l >= 1 && l <= u32::MAX as u64)
        .ok_or_else(|| Error::PremiseViolated("boost exponent out of range".into()))?;
    let boosted = tester.boost(ell as u32)?;
    let after = boosted.soundness(tbl, None)?;
    let eps_cap = S::one() / (S::from_count(4) * tt);
    if !eps_cap.approx_ge(&after.epsilon) || !after.delta.approx_ge(&target) {
        return Err(Error::BoundViolated(format!(
            "boosted tester has epsilon {} and delta {}",
            after.epsilon.render(),
            after.delta.render()
        )));
    }
    Ok(CovRadiusBoost {
        tester: boosted,
        ell: Some(ell),
        report: after,
    })
}
