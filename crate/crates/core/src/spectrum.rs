//! Spectrum generators and the two constructions linking them to testers,
//! plus the small-set expansion and hypercontractivity checks.
//!
//! A functional `b ∈ F2^h` is packed like a group element, and `λ(b)` is read
//! from the transform of the graph's mass function. For a tester graph the
//! functionals `ē_i` are the parity-check columns, so `λ(ē_i) = 1 − 2 Rej(e_i)`.

use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cayley::{spectrum, tester_graph, CayleyGraph};
use crate::codes::{CosetTable, LinearCode};
use crate::error::{Error, Result};
use crate::f2::{cayley_bfs, check_group_dim, independence_width, span_dim, wht, BitMatrix, BitVec, UNREACHED};
use crate::scalar::Scalar;
use crate::tester::Tester;

/// An ordered list of functionals `b_1 … b_n` spanning `F2^h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumGenerator {
    h: usize,
    functionals: Vec<u64>,
}

impl SpectrumGenerator {
    pub fn new(h: usize, functionals: Vec<BitVec>) -> Result<Self> {
        if h == 0 {
            return Err(Error::DegenerateGraph);
        }
        check_group_dim(h)?;
        let mut packed = Vec::with_capacity(functionals.len());
        for b in &functionals {
            if b.len() != h {
                return Err(Error::DimensionMismatch {
                    expected: h,
                    got: b.len(),
                });
            }
            packed.push(b.to_u64().expect("h <= 24"));
        }
        Self::from_packed(h, packed)
    }

    pub fn from_packed(h: usize, functionals: Vec<u64>) -> Result<Self> {
        if h == 0 {
            return Err(Error::DegenerateGraph);
        }
        check_group_dim(h)?;
        if let Some(&b) = functionals.iter().find(|&&b| b >> h != 0) {
            return Err(Error::DimensionMismatch {
                expected: h,
                got: 64 - b.leading_zeros() as usize,
            });
        }
        if span_dim(&functionals, h) < h {
            return Err(Error::NotSpanning);
        }
        Ok(Self { h, functionals })
    }

    /// The standard dual basis `e_1*, …, e_h*`.
    pub fn standard(h: usize) -> Result<Self> {
        Self::from_packed(h, (0..h).map(|i| 1u64 << i).collect())
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn n(&self) -> usize {
        self.functionals.len()
    }

    pub fn packed(&self) -> &[u64] {
        &self.functionals
    }

    pub fn functionals(&self) -> Vec<BitVec> {
        self.functionals
            .iter()
            .map(|&b| BitVec::from_u64(b, self.h))
            .collect()
    }

    /// Largest `d` such that every `d` of the functionals are independent.
    pub fn independence_width(&self) -> usize {
        independence_width(&self.functionals()).expect("h <= 24")
    }

    /// `rk_B(a)` for every `a`, by one breadth-first search.
    pub fn ranks(&self) -> Vec<u32> {
        cayley_bfs(&self.functionals, self.h)
    }

    /// `sg h n`, then one 0/1 row per functional.
    pub fn to_text(&self) -> String {
        let mut s = format!("sg {} {}\n", self.h, self.n());
        for b in self.functionals() {
            s.push_str(&format!("{b}\n"));
        }
        s
    }
}

impl FromStr for SpectrumGenerator {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty generator file"))?;
        let dims: Vec<usize> = match header.strip_prefix("sg ") {
            Some(rest) => rest
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::parse(no, format!("bad dimension {t:?}"))))
                .collect::<Result<_>>()?,
            None => return Err(Error::parse(no, "header must be `sg h n`")),
        };
        let [h, n] = dims[..] else {
            return Err(Error::parse(no, "header must be `sg h n`"));
        };
        let mut rows = Vec::with_capacity(n);
        for (no, line) in lines {
            let v: BitVec = line.parse().map_err(|e| Error::parse(no, format!("{e}")))?;
            if v.len() != h {
                return Err(Error::parse(no, format!("functional has {} bits, expected {h}", v.len())));
            }
            rows.push(v);
        }
        if rows.len() != n {
            return Err(Error::parse(no, format!("header promises {n} functionals, found {}", rows.len())));
        }
        Self::new(h, rows)
    }
}

/// Outcome of checking the spectrum-generator conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct SGReport<S> {
    pub mu: S,
    pub nu: S,
    /// Claimed independence width.
    pub d: usize,
    /// Measured independence width.
    pub width: usize,
    pub independent: bool,
    /// `(i, λ(b_i))` with `λ(b_i) < 1 − μ`.
    pub large_eigenvalue_failures: Vec<(usize, S)>,
    /// `(a, λ(a), rk_B(a))` with `λ(a) > 1 − ν·rk_B(a)`.
    pub decay_failures: Vec<(u64, S, u32)>,
}

impl<S: Scalar> SGReport<S> {
    pub fn large_eigenvalues(&self) -> bool {
        self.large_eigenvalue_failures.is_empty()
    }

    pub fn spectral_decay(&self) -> bool {
        self.decay_failures.is_empty()
    }

    pub fn pass(&self) -> bool {
        self.independent && self.large_eigenvalues() && self.spectral_decay()
    }
}

fn check_slack<S: Scalar>(name: &str, x: &S) -> Result<()> {
    if x.approx_ge(&S::zero()) && S::from_count(2).approx_ge(x) {
        Ok(())
    } else {
        Err(Error::PreconditionFailed(format!("{name} = {} outside [0, 2]", x.render())))
    }
}

/// Check that `B` is a `d`-wise independent `(μ, ν)`-spectrum generator for `g`.
pub fn verify_sg<S: Scalar>(
    g: &CayleyGraph<S>,
    b: &SpectrumGenerator,
    mu: S,
    nu: S,
    d: usize,
) -> Result<SGReport<S>> {
    if g.h() != b.h() {
        return Err(Error::DimensionMismatch {
            expected: g.h(),
            got: b.h(),
        });
    }
    check_slack("mu", &mu)?;
    check_slack("nu", &nu)?;
    let width = b.independence_width();
    let table = spectrum(g);
    let lambda = table.values();
    let floor = S::one() - mu.clone();
    let large_eigenvalue_failures = b
        .packed()
        .iter()
        .enumerate()
        .filter(|(_, &bi)| !lambda[bi as usize].approx_ge(&floor))
        .map(|(i, &bi)| (i, lambda[bi as usize].clone()))
        .collect();
    let ranks = b.ranks();
    let decay_failures = ranks
        .iter()
        .enumerate()
        .filter_map(|(a, &rk)| {
            debug_assert_ne!(rk, UNREACHED);
            let ceiling = S::one() - nu.clone() * S::from_count(rk as usize);
            (!ceiling.approx_ge(&lambda[a])).then(|| (a as u64, lambda[a].clone(), rk))
        })
        .collect();
    Ok(SGReport {
        mu,
        nu,
        d,
        width,
        independent: width >= d,
        large_eigenvalue_failures,
        decay_failures,
    })
}

/// The spectrum generator of a tester: `Cay(C⊥, D)` with the parity-check
/// columns as functionals, checked at `(2ε, 2δ, d)`.
pub fn sg_from_ltc<S: Scalar>(
    t: &Tester<S>,
) -> Result<(CayleyGraph<S>, SpectrumGenerator, SGReport<S>)> {
    let code = t.code();
    check_group_dim(code.h())?;
    let d = code.min_distance()?;
    if d < 3 {
        return Err(Error::DistanceTooSmall(d));
    }
    let tbl = CosetTable::new(code.clone())?;
    let report = t.soundness(&tbl, None)?;
    let g = tester_graph(t)?;
    let b = SpectrumGenerator::from_packed(code.h(), code.syndrome_columns().to_vec())?;
    let two = S::from_count(2);
    let sg = verify_sg(&g, &b, two.clone() * report.epsilon, two * report.delta, d)?;
    Ok((g, b, sg))
}

/// The code whose dual is the image of `α ↦ (b_1(α), …, b_n(α))`, with the
/// pushforward of the graph's distribution as tester.
pub fn ltc_from_sg<S: Scalar>(
    g: &CayleyGraph<S>,
    b: &SpectrumGenerator,
) -> Result<(Arc<LinearCode>, Tester<S>)> {
    if g.h() != b.h() {
        return Err(Error::DimensionMismatch {
            expected: g.h(),
            got: b.h(),
        });
    }
    let pcheck = BitMatrix::from_columns(&b.functionals(), b.h())?;
    let code = Arc::new(LinearCode::from_parity_check(pcheck)?);
    let t = Tester::from_coords(code.clone(), g.mass().to_vec())?;
    Ok((code, t))
}

fn vertex_set(h: usize, set: &[u64]) -> Result<Vec<u64>> {
    check_group_dim(h)?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(&x) = set.iter().find(|&&x| x >> h != 0) {
        return Err(Error::DimensionMismatch {
            expected: h,
            got: 64 - x.leading_zeros() as usize,
        });
    }
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    Ok(s)
}

/// `Φ(S) = Pr_{x ∈ S, s ~ D}[x + s ∉ S]`. Large sets go through the transform.
pub fn expansion<S: Scalar>(g: &CayleyGraph<S>, set: &[u64]) -> Result<S> {
    let s = vertex_set(g.h(), set)?;
    let work = s.len() as u128 * g.mass().len() as u128;
    if work > ((g.h() as u128 + 1) << g.h()) {
        expansion_spectral(g, &s)
    } else {
        expansion_direct(g, &s)
    }
}

/// [`expansion`] by counting edges that leave the set.
pub fn expansion_direct<S: Scalar>(g: &CayleyGraph<S>, set: &[u64]) -> Result<S> {
    let s = vertex_set(g.h(), set)?;
    let mut member = vec![false; 1 << g.h()];
    for &x in &s {
        member[x as usize] = true;
    }
    let mut stay = S::zero();
    for (step, p) in g.mass() {
        let inside = s.iter().filter(|&&x| member[(x ^ step) as usize]).count();
        stay = stay + p.clone() * S::from_count(inside);
    }
    Ok(S::one() - stay / S::from_count(s.len()))
}

/// [`expansion`] as `1 − ⟨1_S, G 1_S⟩ / τ`, with `G` diagonalised by the transform.
pub fn expansion_spectral<S: Scalar>(g: &CayleyGraph<S>, set: &[u64]) -> Result<S> {
    let s = vertex_set(g.h(), set)?;
    let mut ind = vec![S::zero(); 1 << g.h()];
    for &x in &s {
        ind[x as usize] = S::one();
    }
    wht(&mut ind);
    let table = spectrum(g);
    let quad = ind
        .iter()
        .zip(table.values())
        .fold(S::zero(), |acc, (f, l)| acc + l.clone() * f.clone() * f.clone());
    let size = S::from_count(1 << g.h());
    Ok(S::one() - quad / (size * S::from_count(s.len())))
}

/// `ν d / 4 − 3^{d/2} τ^{1/4}`.
pub fn sse_bound(nu: f64, d: usize, tau: f64) -> f64 {
    nu * d as f64 / 4.0 - 3f64.powf(d as f64 / 2.0) * tau.powf(0.25)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SetProbe {
    pub size: usize,
    pub tau: f64,
    pub phi: f64,
    pub bound: f64,
    /// True when the bound is not positive.
    pub vacuous: bool,
}

impl SetProbe {
    pub fn slack(&self) -> f64 {
        self.phi - self.bound
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SseReport {
    pub probes: Vec<SetProbe>,
}

impl SseReport {
    pub fn vacuous(&self) -> usize {
        self.probes.iter().filter(|p| p.vacuous).count()
    }

    /// Sets where the bound was positive and held.
    pub fn nonvacuous(&self) -> usize {
        self.probes.len() - self.vacuous()
    }

    pub fn min_slack(&self) -> Option<f64> {
        self.probes.iter().map(SetProbe::slack).reduce(f64::min)
    }
}

/// Check `Φ(S) ≥ ν d/4 − 3^{d/2} τ^{1/4}` on each set, for a graph that is
/// a `(μ, ν)`-spectrum generator at width `d`.
pub fn sse_bound_check<S: Scalar>(
    g: &CayleyGraph<S>,
    b: &SpectrumGenerator,
    mu: S,
    nu: S,
    d: usize,
    sets: &[Vec<u64>],
) -> Result<SseReport> {
    let sg = verify_sg(g, b, mu, nu.clone(), d)?;
    if !sg.pass() {
        return Err(Error::PreconditionFailed(format!(
            "not a ({}, {})-spectrum generator at width {d}",
            sg.mu.render(),
            sg.nu.render()
        )));
    }
    let nu = nu.to_f64();
    let total = (1u64 << g.h()) as f64;
    let mut probes = Vec::with_capacity(sets.len());
    for set in sets {
        let phi = expansion(g, set)?.to_f64();
        let size = vertex_set(g.h(), set)?.len();
        let tau = size as f64 / total;
        let bound = sse_bound(nu, d, tau);
        if phi + 1e-12 < bound {
            return Err(Error::BoundViolated(format!(
                "Φ = {phi} < {bound} on the set {:?}",
                set.iter().map(|&x| BitVec::from_u64(x, g.h()).to_string()).collect::<Vec<_>>()
            )));
        }
        probes.push(SetProbe {
            size,
            tau,
            phi,
            bound,
            vacuous: bound <= 0.0,
        });
    }
    Ok(SseReport { probes })
}

/// Small vertex sets of `F2^h`, cycling through singletons, Hamming balls of
/// radius 1 and 2, and random sets of size 1, 2, 4 and 8.
pub fn probe_sets(h: usize, count: usize, seed: u64) -> Result<Vec<Vec<u64>>> {
    if h == 0 {
        return Err(Error::DegenerateGraph);
    }
    check_group_dim(h)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = 1u64 << h;
    let mut sets = Vec::with_capacity(count);
    for i in 0..count {
        let center = rng.random_range(0..size);
        let set = match i % 7 {
            0 => vec![center],
            1 | 2 => {
                let mut ball = vec![center];
                for j in 0..h {
                    ball.push(center ^ (1 << j));
                    if i % 7 == 2 {
                        for k in j + 1..h {
                            ball.push(center ^ (1 << j) ^ (1 << k));
                        }
                    }
                }
                ball
            }
            r => {
                let want = (1usize << (r - 3)).min(size as usize);
                let mut s = vec![center];
                while s.len() < want {
                    let x = rng.random_range(0..size);
                    if !s.contains(&x) {
                        s.push(x);
                    }
                }
                s
            }
        };
        sets.push(set);
    }
    Ok(sets)
}

/// `(E f², E f⁴)` over `F2^h` for `f = Σ_b c_b χ_b`.
pub fn moments(h: usize, coeffs: &[(u64, f64)]) -> Result<(f64, f64)> {
    check_group_dim(h)?;
    let mut f = vec![0.0f64; 1 << h];
    for &(b, c) in coeffs {
        if b >> h != 0 {
            return Err(Error::DimensionMismatch {
                expected: h,
                got: 64 - b.leading_zeros() as usize,
            });
        }
        f[b as usize] += c;
    }
    wht(&mut f);
    let size = f.len() as f64;
    let m2 = f.iter().map(|x| x * x).sum::<f64>() / size;
    let m4 = f.iter().map(|x| (x * x) * (x * x)).sum::<f64>() / size;
    Ok((m2, m4))
}

#[derive(Clone, Debug, PartialEq)]
pub struct HyperconReport {
    pub degree: usize,
    pub trials: usize,
    pub seed: u64,
    pub width: usize,
    /// Number of monomials `b_S` with `|S| ≤ degree`.
    pub monomials: usize,
    /// `9^degree`.
    pub bound: f64,
    /// Largest `E f⁴ / (E f²)²` seen.
    pub max_ratio: f64,
    /// Largest `|E f² − Σ f̂(S)²|`.
    pub max_parseval_error: f64,
}

/// Tolerance on `E f⁴ ≤ 9^d (E f²)²`.
pub const HYPERCON_TOL: f64 = 1e-9;
/// Tolerance on the Parseval identity.
pub const PARSEVAL_TOL: f64 = 1e-10;

/// All `b_S = Σ_{i ∈ S} b_i` with `|S| ≤ d`, in lexicographic order of `S`.
fn low_degree_monomials(b: &[u64], d: usize) -> Vec<u64> {
    fn rec(b: &[u64], start: usize, left: usize, acc: u64, out: &mut Vec<u64>) {
        out.push(acc);
        if left == 0 {
            return;
        }
        for i in start..b.len() {
            rec(b, i + 1, left - 1, acc ^ b[i], out);
        }
    }
    let mut out = Vec::new();
    rec(b, 0, d, 0, &mut out);
    out
}

/// Sample degree-`d` polynomials in the functionals with standard normal
/// coefficients and check the 2-4 hypercontractive inequality on each.
pub fn hypercontractivity_check(
    b: &[BitVec],
    d: usize,
    trials: usize,
    seed: u64,
) -> Result<HyperconReport> {
    let Some(h) = b.first().map(BitVec::len) else {
        return Err(Error::PreconditionFailed("no functionals".into()));
    };
    check_group_dim(h)?;
    if let Some(v) = b.iter().find(|v| v.len() != h) {
        return Err(Error::DimensionMismatch {
            expected: h,
            got: v.len(),
        });
    }
    let width = independence_width(b)?;
    if width < 4 * d + 1 && width != b.len() + 1 {
        return Err(Error::PreconditionFailed(format!(
            "functionals are only {width}-wise independent, need {}",
            4 * d + 1
        )));
    }
    let packed: Vec<u64> = b.iter().map(|v| v.to_u64().expect("h <= 24")).collect();
    let monomials = low_degree_monomials(&packed, d);
    let bound = 9f64.powi(d as i32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = 0.0f64;
    let mut max_parseval_error = 0.0f64;
    for _ in 0..trials {
        let coeffs: Vec<(u64, f64)> = monomials
            .iter()
            .map(|&m| (m, rng.sample(StandardNormal)))
            .collect();
        let (m2, m4) = moments(h, &coeffs)?;
        let energy: f64 = coeffs.iter().map(|(_, c)| c * c).sum();
        let err = (m2 - energy).abs();
        if err > PARSEVAL_TOL {
            return Err(Error::IdentityViolated(format!(
                "E f² = {m2} but Σ f̂² = {energy}"
            )));
        }
        if m4 > bound * m2 * m2 + HYPERCON_TOL {
            return Err(Error::BoundViolated(format!(
                "E f⁴ = {m4} > {bound}·({m2})² for coefficients {:?}",
                coeffs.iter().map(|(_, c)| *c).collect::<Vec<_>>()
            )));
        }
        max_parseval_error = max_parseval_error.max(err);
        if m2 > 0.0 {
            max_ratio = max_ratio.max(m4 / (m2 * m2));
        }
    }
    Ok(HyperconReport {
        degree: d,
        trials,
        seed,
        width,
        monomials: monomials.len(),
        bound,
        max_ratio,
        max_parseval_error,
    })
}
