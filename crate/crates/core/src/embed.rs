//! Cut embeddings of `F2^n / C`, their distortion, linearization into a
//! tester, and the lower bounds on the best achievable distortion.
//!
//! Vertices are quotient coordinates (syndromes) in `F2^h`. A cut embedding
//! is a distribution over `±1` tables; it induces `δ(x, y) = Pr[f(x) ≠ f(y)]`.

use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cayley::{bfs_metric, CayleyGraph};
use crate::codes::{CosetTable, LinearCode};
use crate::error::{Error, Result};
use crate::f2::{check_group_dim, parity, wht, BitVec};
use crate::scalar::{recip, Extended, Scalar};
use crate::tester::Tester;

/// Largest `h` accepted by [`distortion`] and [`linearize`].
pub const MAX_EMBED_DIM: usize = 16;
/// Above this `h`, [`distortion`] shift-averages instead of scanning all pairs.
pub const MAX_PAIR_DIM: usize = 10;

/// Distribution over `±1` tables on `F2^h`. A `true` entry is `−1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CutEmbedding<S> {
    h: usize,
    functions: Vec<(Vec<bool>, S)>,
}

impl<S: Scalar> CutEmbedding<S> {
    pub fn new(h: usize, functions: Vec<(Vec<bool>, S)>) -> Result<Self> {
        check_group_dim(h)?;
        if functions.is_empty() {
            return Err(Error::BadDistribution("no functions".into()));
        }
        let mut total = S::zero();
        for (table, p) in &functions {
            if table.len() != 1 << h {
                return Err(Error::DimensionMismatch {
                    expected: 1 << h,
                    got: table.len(),
                });
            }
            if *p < S::zero() {
                return Err(Error::BadDistribution(format!("negative mass {}", p.render())));
            }
            total = total + p.clone();
        }
        if !total.approx_eq(&S::one()) {
            return Err(Error::BadDistribution(total.render()));
        }
        Ok(Self { h, functions })
    }

    /// The character cuts `χ_a` of a tester, with the tester's masses.
    pub fn from_tester(t: &Tester<S>) -> Result<Self> {
        let h = t.code().h();
        check_group_dim(h)?;
        let functions = t
            .coords()
            .iter()
            .zip(t.support())
            .map(|(&a, (_, p))| (character(a, h), p.clone()))
            .collect();
        Self::new(h, functions)
    }

    /// `count` uniformly weighted random tables.
    pub fn random(h: usize, count: usize, seed: u64) -> Result<Self> {
        check_group_dim(h)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = recip::<S>(count.max(1));
        let functions = (0..count)
            .map(|_| ((0..1usize << h).map(|_| rng.random::<bool>()).collect(), p.clone()))
            .collect();
        Self::new(h, functions)
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn functions(&self) -> &[(Vec<bool>, S)] {
        &self.functions
    }

    pub fn delta(&self, x: u64, y: u64) -> S {
        self.functions
            .iter()
            .filter(|(f, _)| f[x as usize] != f[y as usize])
            .fold(S::zero(), |acc, (_, p)| acc + p.clone())
    }

    /// `δ'(z) = E_a δ(a, a + z)`, by direct summation.
    pub fn shift_averaged_delta(&self) -> Vec<S> {
        let size = 1u64 << self.h;
        let scale = recip::<S>(size as usize);
        (0..size)
            .map(|z| {
                (0..size).fold(S::zero(), |acc, a| acc + self.delta(a, a ^ z)) * scale.clone()
            })
            .collect()
    }

    /// Pull back tables on `F2^n` to the quotient by the code's syndrome map.
    pub fn to_quotient(&self, code: &LinearCode) -> Result<Self> {
        let (n, h) = (code.n(), code.h());
        if self.h != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.h,
            });
        }
        check_group_dim(h)?;
        let mut functions = Vec::with_capacity(self.functions.len());
        for (f, p) in &self.functions {
            let mut g: Vec<Option<bool>> = vec![None; 1 << h];
            for (v, &fv) in f.iter().enumerate() {
                let s = syndrome(code, v as u64);
                match g[s] {
                    None => g[s] = Some(fv),
                    Some(prev) if prev != fv => return Err(Error::NotCosetInvariant),
                    Some(_) => {}
                }
            }
            functions.push((g.into_iter().map(|b| b.expect("syndrome map is onto")).collect(), p.clone()));
        }
        Self::new(h, functions)
    }

    /// `embed h`, then `p/q ++-+…` lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("embed {}\n", self.h);
        for (f, p) in &self.functions {
            let table: String = f.iter().map(|&b| if b { '-' } else { '+' }).collect();
            s.push_str(&format!("{} {table}\n", p.render()));
        }
        s
    }
}

impl<S: Scalar> FromStr for CutEmbedding<S> {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty embedding file"))?;
        let h: usize = header
            .strip_prefix("embed ")
            .and_then(|h| h.trim().parse().ok())
            .ok_or_else(|| Error::parse(no, "header must be `embed h`"))?;
        if h > MAX_EMBED_DIM {
            return Err(Error::TooLarge(format!("embedding dimension {h}")));
        }
        let mut functions = Vec::new();
        for (no, line) in lines {
            let [p, table] = line.split_whitespace().collect::<Vec<_>>()[..] else {
                return Err(Error::parse(no, "expected `p/q ±table`"));
            };
            let p = S::parse_prob(p).ok_or_else(|| Error::parse(no, format!("bad probability {p:?}")))?;
            let table = table
                .chars()
                .map(|c| match c {
                    '+' => Ok(false),
                    '-' => Ok(true),
                    _ => Err(Error::parse(no, format!("bad table character {c:?}"))),
                })
                .collect::<Result<Vec<bool>>>()?;
            if table.len() != 1 << h {
                return Err(Error::parse(no, format!("table has {} entries, expected {}", table.len(), 1u64 << h)));
            }
            functions.push((table, p));
        }
        Self::new(h, functions)
    }
}

fn character(a: u64, h: usize) -> Vec<bool> {
    (0..1u64 << h).map(|x| parity(a, x)).collect()
}

fn syndrome(code: &LinearCode, v: u64) -> usize {
    code.syndrome_index(&BitVec::from_u64(v, code.n()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistortionReport<S> {
    /// Largest `δ / d` over edges.
    pub max_stretch: S,
    /// Smallest `δ / d` over pairs at positive distance.
    pub min_stretch: S,
    pub distortion: Extended<S>,
}

impl<S: Scalar> DistortionReport<S> {
    fn new(max_stretch: S, min_stretch: S) -> Self {
        let distortion = Extended::ratio(max_stretch.clone(), min_stretch.clone());
        Self {
            max_stretch,
            min_stretch,
            distortion,
        }
    }
}

/// Functions grouped by probability, each group packed as one bit per
/// function at every vertex.
struct Signatures<S> {
    classes: Vec<(S, Vec<Vec<u64>>)>,
}

impl<S: Scalar> Signatures<S> {
    fn new(e: &CutEmbedding<S>) -> Self {
        let mut groups: Vec<(S, Vec<&Vec<bool>>)> = Vec::new();
        for (f, p) in &e.functions {
            if p.is_zero() {
                continue;
            }
            match groups.iter_mut().find(|(q, _)| q == p) {
                Some((_, fs)) => fs.push(f),
                None => groups.push((p.clone(), vec![f])),
            }
        }
        let classes = groups
            .into_iter()
            .map(|(p, fs)| {
                let words = fs.len().div_ceil(64);
                let sigs = (0..1usize << e.h)
                    .map(|x| {
                        let mut sig = vec![0u64; words];
                        for (j, f) in fs.iter().enumerate() {
                            if f[x] {
                                sig[j / 64] |= 1 << (j % 64);
                            }
                        }
                        sig
                    })
                    .collect();
                (p, sigs)
            })
            .collect();
        Self { classes }
    }

    fn counts(&self, x: usize, y: usize, out: &mut [u32]) {
        for (c, (_, sigs)) in self.classes.iter().enumerate() {
            out[c] = sigs[x]
                .iter()
                .zip(&sigs[y])
                .map(|(a, b)| (a ^ b).count_ones())
                .sum();
        }
    }

    fn delta(&self, counts: &[u32]) -> S {
        self.classes
            .iter()
            .zip(counts)
            .fold(S::zero(), |acc, ((p, _), &c)| acc + p.clone() * S::from_count(c as usize))
    }
}

/// Distortion of a cut embedding into the graph's path metric. Pairs are
/// scanned exhaustively up to `h = 10`; beyond that the embedding is
/// shift-averaged first.
pub fn distortion<S: Scalar>(e: &CutEmbedding<S>, g: &CayleyGraph<S>) -> Result<DistortionReport<S>> {
    let h = g.h();
    if e.h != h {
        return Err(Error::DimensionMismatch { expected: h, got: e.h });
    }
    if h > MAX_EMBED_DIM {
        return Err(Error::TooLarge(format!("distortion over 2^{h} vertices")));
    }
    let dist = bfs_metric(g)?;
    if h > MAX_PAIR_DIM {
        return Ok(shift_invariant_distortion(&linear_weights(e), g, &dist));
    }
    let sigs = Signatures::new(e);
    let mut counts = vec![0u32; sigs.classes.len()];
    let size = 1usize << h;
    let mut gens = g.generator_set();
    gens.retain(|&s| s != 0);
    gens.sort_unstable();
    gens.dedup();
    let mut max_stretch = S::zero();
    for x in 0..size {
        for &s in &gens {
            let y = x ^ s as usize;
            if x < y {
                sigs.counts(x, y, &mut counts);
                let d = sigs.delta(&counts);
                if d > max_stretch {
                    max_stretch = d;
                }
            }
        }
    }
    // With one probability class the minimum at each distance is a count.
    let mut min_stretch: Option<S> = None;
    if sigs.classes.len() <= 1 {
        let max_d = *dist.iter().max().expect("nonempty") as usize;
        let mut best = vec![u32::MAX; max_d + 1];
        for x in 0..size {
            for y in x + 1..size {
                sigs.counts(x, y, &mut counts);
                let c = counts.first().copied().unwrap_or(0);
                let r = dist[x ^ y] as usize;
                best[r] = best[r].min(c);
            }
        }
        let p = sigs.classes.first().map_or_else(S::zero, |(p, _)| p.clone());
        for (r, &c) in best.iter().enumerate().skip(1) {
            if c == u32::MAX {
                continue;
            }
            let stretch = p.clone() * S::from_count(c as usize) / S::from_count(r);
            if min_stretch.as_ref().is_none_or(|m| stretch < *m) {
                min_stretch = Some(stretch);
            }
        }
    } else {
        for x in 0..size {
            for y in x + 1..size {
                sigs.counts(x, y, &mut counts);
                let stretch = sigs.delta(&counts) / S::from_count(dist[x ^ y] as usize);
                if min_stretch.as_ref().is_none_or(|m| stretch < *m) {
                    min_stretch = Some(stretch);
                }
            }
        }
    }
    Ok(DistortionReport::new(max_stretch, min_stretch.unwrap_or_else(S::zero)))
}

/// Distortion of `δ(z) = Σ_a w_a [<a, z> = 1]`.
fn shift_invariant_distortion<S: Scalar>(w: &[S], g: &CayleyGraph<S>, dist: &[u32]) -> DistortionReport<S> {
    let mut lambda = w.to_vec();
    wht(&mut lambda);
    let two = S::from_count(2);
    let delta: Vec<S> = lambda.into_iter().map(|l| (S::one() - l) / two.clone()).collect();
    let max_stretch = g
        .generator_set()
        .iter()
        .filter(|&&s| s != 0)
        .map(|&s| delta[s as usize].clone())
        .fold(S::zero(), |m, d| if d > m { d } else { m });
    let min_stretch = delta
        .iter()
        .zip(dist)
        .skip(1)
        .map(|(d, &r)| d.clone() / S::from_count(r as usize))
        .reduce(|m, s| if s < m { s } else { m })
        .unwrap_or_else(S::zero);
    DistortionReport::new(max_stretch, min_stretch)
}

/// `w_a = E_f f̂(a)²` over `F2^h`.
fn linear_weights<S: Scalar>(e: &CutEmbedding<S>) -> Vec<S> {
    let size = 1usize << e.h;
    let mut w = vec![S::zero(); size];
    let scale = S::from_count(size) * S::from_count(size);
    let mut spec = vec![0i64; size];
    for (f, p) in &e.functions {
        for (s, &neg) in spec.iter_mut().zip(f) {
            *s = if neg { -1 } else { 1 };
        }
        wht(&mut spec);
        for (wa, &fa) in w.iter_mut().zip(&spec) {
            if fa != 0 {
                *wa = wa.clone() + p.clone() * S::from_count((fa * fa) as usize) / scale.clone();
            }
        }
    }
    w
}

/// The tester `w_α = E_f f̂(α)²` together with the distortions before and
/// after linearization.
#[derive(Clone, Debug)]
pub struct Linearized<S> {
    pub tester: Tester<S>,
    pub before: DistortionReport<S>,
    pub after: DistortionReport<S>,
}

/// Linearize a cut embedding of `F2^n / C`. Tables may be given on the
/// quotient (`2^h` entries) or on `F2^n`, in which case they must be
/// constant on cosets of `C`.
pub fn linearize<S: Scalar>(e: &CutEmbedding<S>, code: &Arc<LinearCode>) -> Result<Linearized<S>> {
    let h = code.h();
    if h > MAX_EMBED_DIM {
        return Err(Error::TooLarge(format!("linearization over 2^{h} cosets")));
    }
    let quotient;
    let e = if e.h == h {
        e
    } else {
        quotient = e.to_quotient(code)?;
        &quotient
    };
    let w = linear_weights(e);
    let tester = Tester::from_dense(code.clone(), &w)?;
    if h == 0 {
        let zero = DistortionReport::new(S::zero(), S::zero());
        return Ok(Linearized {
            tester,
            before: zero.clone(),
            after: zero,
        });
    }
    let g = CayleyGraph::from_gens(h, code.syndrome_columns().to_vec())?;
    let before = distortion(e, &g)?;
    let after = shift_invariant_distortion(&w, &g, &bfs_metric(&g)?);
    if !after.distortion.approx_le(&before.distortion) {
        return Err(Error::BoundViolated(format!(
            "linearized distortion {} exceeds {}",
            after.distortion.render(),
            before.distortion.render()
        )));
    }
    Ok(Linearized { tester, before, after })
}

/// Distortion of the character embedding of a tester: smoothness over
/// soundness.
pub fn linear_distortion<S: Scalar>(t: &Tester<S>, tbl: &CosetTable) -> Result<DistortionReport<S>> {
    let r = t.soundness(tbl, None)?;
    if !r.delta.is_pos() {
        return Err(Error::DegenerateEmbedding);
    }
    Ok(DistortionReport::new(r.epsilon, r.delta))
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnBound<S> {
    pub dual_distance: usize,
    pub n: usize,
    pub covering_radius: usize,
    /// `(d⊥ / n) · t`.
    pub bound: S,
    /// `d⊥ h / (n log2(n/h))`, reported without constants; `None` when `n = h`.
    pub asymptotic: Option<f64>,
}

/// Lower bound `(d⊥ / n) · t` on the distortion of any tester supported on
/// nonzero dual words.
pub fn khot_naor_bound<S: Scalar>(code: &LinearCode, tbl: &CosetTable) -> Result<KnBound<S>> {
    if **tbl.code() != *code {
        return Err(Error::PreconditionFailed("coset table belongs to another code".into()));
    }
    if code.h() == 0 {
        return Err(Error::ZeroDual);
    }
    let (n, h) = (code.n(), code.h());
    let dual_distance = code.dual_distance()?;
    let t = tbl.covering_radius();
    let asymptotic = (n > h).then(|| (dual_distance * h) as f64 / (n as f64 * (n as f64 / h as f64).log2()));
    Ok(KnBound {
        dual_distance,
        n,
        covering_radius: t,
        bound: S::from_count(dual_distance * t) / S::from_count(n),
        asymptotic,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisBound<S> {
    pub ratio: Extended<S>,
    /// `k d / (3 n)`.
    pub bound: S,
}

/// Check `ε/δ ≥ k d / (3 n)` for a tester whose support is a basis of `C⊥`.
pub fn basis_tester_bound<S: Scalar>(code: &LinearCode, t: &Tester<S>, tbl: &CosetTable) -> Result<BasisBound<S>> {
    if **t.code() != *code {
        return Err(Error::PreconditionFailed("tester belongs to another code".into()));
    }
    if !t.is_basis_tester() {
        return Err(Error::NotBasisTester);
    }
    let r = t.soundness(tbl, None)?;
    let d = code.min_distance()?;
    let bound = S::from_count(code.k() * d) / S::from_count(3 * code.n());
    if !Extended::Finite(bound.clone()).approx_le(&r.ratio) {
        return Err(Error::BoundViolated(format!(
            "ratio {} below k d / 3n = {}",
            r.ratio.render(),
            bound.render()
        )));
    }
    Ok(BasisBound { ratio: r.ratio, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::zoo;
    use crate::Rational;
    use num_traits::{One, Zero};
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};

    type Q = Rational;

    fn q(n: i64, d: u64) -> Q {
        Q::from_ratio(n, d)
    }

    fn bits(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    fn table(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '-').collect()
    }

    fn simplex(code: &Arc<LinearCode>) -> Tester<Q> {
        let words = (1..1u64 << code.h()).map(|a| code.dual_word(a)).collect();
        Tester::uniform(code.clone(), words).unwrap()
    }

    fn weight_two_rep4() -> Tester<Q> {
        let code = Arc::new(zoo::rep4());
        let words = (1..1u64 << code.h())
            .map(|a| code.dual_word(a))
            .filter(|w| w.weight() == 2)
            .collect();
        Tester::uniform(code, words).unwrap()
    }

    #[test]
    fn dictator_cuts_on_hypercube() {
        let h = 4;
        let g = CayleyGraph::<Q>::from_gens(h, (0..h).map(|i| 1 << i).collect()).unwrap();
        let funcs = (0..h).map(|i| (character(1 << i, h), q(1, h as u64))).collect();
        let e = CutEmbedding::new(h, funcs).unwrap();
        let r = distortion(&e, &g).unwrap();
        assert_eq!(r.distortion, Extended::Finite(Q::one()));
        assert_eq!(r.max_stretch, q(1, 4));
    }

    #[test]
    fn indicator_cut_on_square_is_infinite() {
        let g = CayleyGraph::<Q>::from_gens(2, vec![1, 2]).unwrap();
        let e = CutEmbedding::new(2, vec![(table("+++-"), Q::one())]).unwrap();
        assert!(distortion(&e, &g).unwrap().distortion.is_infinite());
    }

    #[test]
    fn weight_two_cuts_on_rep4() {
        let t = weight_two_rep4();
        let g = crate::cayley::graph_from_code::<Q>(t.code()).unwrap();
        let r = distortion(&CutEmbedding::from_tester(&t).unwrap(), &g).unwrap();
        assert_eq!(r.distortion, Extended::Finite(q(3, 2)));
        let tbl = CosetTable::new(t.code().clone()).unwrap();
        assert_eq!(linear_distortion(&t, &tbl).unwrap(), r);
    }

    #[test]
    fn linear_embedding_linearizes_to_itself() {
        let code = Arc::new(zoo::hamming74());
        let t = simplex(&code).diluted(q(1, 2)).unwrap();
        let l = linearize(&CutEmbedding::from_tester(&t).unwrap(), &code).unwrap();
        assert_eq!(l.tester, t);
        assert_eq!(l.before, l.after);
    }

    #[test]
    fn linearize_indicator_cut() {
        let code = Arc::new(zoo::zero_code(2));
        let e = CutEmbedding::new(2, vec![(table("+++-"), Q::one())]).unwrap();
        let l = linearize(&e, &code).unwrap();
        assert_eq!(l.tester.support().len(), 4);
        assert!(l.tester.support().iter().all(|(_, p)| *p == q(1, 4)));
        assert!(l.before.distortion.is_infinite());
        assert_eq!(l.after.distortion, Extended::Finite(q(2, 1)));
    }

    #[test]
    fn linearize_mixture_of_characters() {
        let code = Arc::new(zoo::zero_code(3));
        let e = CutEmbedding::new(3, vec![(character(3, 3), q(1, 2)), (character(5, 3), q(1, 2))]).unwrap();
        let l = linearize(&e, &code).unwrap();
        let mut support: Vec<(u64, Q)> = l
            .tester
            .coords()
            .iter()
            .zip(l.tester.support())
            .map(|(&a, (_, p))| (a, p.clone()))
            .collect();
        support.sort_by_key(|(a, _)| *a);
        assert_eq!(support, vec![(3, q(1, 2)), (5, q(1, 2))]);
    }

    #[test]
    fn tables_on_the_full_space_must_be_coset_invariant() {
        let code = Arc::new(zoo::repetition(3));
        // Constant on {x, x + 111}: depends only on x_0 + x_1.
        let good: Vec<bool> = (0..8u64).map(|x| (x & 1) ^ ((x >> 1) & 1) == 1).collect();
        let e = CutEmbedding::new(3, vec![(good, Q::one())]).unwrap();
        let l = linearize(&e, &code).unwrap();
        assert_eq!(l.tester.support().len(), 1);
        assert_eq!(l.tester.support()[0].0, bits("110"));
        let bad = CutEmbedding::new(3, vec![(character(1, 3), Q::one())]).unwrap();
        assert_eq!(linearize(&bad, &code).unwrap_err(), Error::NotCosetInvariant);
    }

    #[test]
    fn linear_distortion_examples() {
        let code = Arc::new(zoo::hamming74());
        let tbl = CosetTable::new(code.clone()).unwrap();
        let r = linear_distortion(&simplex(&code), &tbl).unwrap();
        assert_eq!(r.distortion, Extended::Finite(Q::one()));
        let t = weight_two_rep4();
        let tbl = CosetTable::new(t.code().clone()).unwrap();
        assert_eq!(linear_distortion(&t, &tbl).unwrap().distortion, Extended::Finite(q(3, 2)));
        let single = Tester::<Q>::uniform(code.clone(), vec![code.dual_word(1)]).unwrap();
        let tbl = CosetTable::new(code).unwrap();
        assert_eq!(linear_distortion(&single, &tbl).unwrap_err(), Error::DegenerateEmbedding);
    }

    #[test]
    fn khot_naor_examples() {
        let cases = [
            (zoo::hamming74(), q(4, 7)),
            (zoo::rep4(), Q::one()),
            (zoo::repetition(3), q(2, 3)),
        ];
        for (c, want) in cases {
            let code = Arc::new(c);
            let tbl = CosetTable::new(code.clone()).unwrap();
            assert_eq!(khot_naor_bound::<Q>(&code, &tbl).unwrap().bound, want);
        }
        let full = Arc::new(zoo::full_space(3));
        let tbl = CosetTable::new(full.clone()).unwrap();
        assert_eq!(khot_naor_bound::<Q>(&full, &tbl).unwrap_err(), Error::ZeroDual);
    }

    #[test]
    fn basis_bound_examples() {
        let code = Arc::new(zoo::hamming74());
        let t = Tester::<Q>::uniform(code.clone(), code.parity_check().rows().to_vec()).unwrap();
        let tbl = CosetTable::new(code.clone()).unwrap();
        let r = basis_tester_bound(&code, &t, &tbl).unwrap();
        assert_eq!((r.ratio, r.bound), (Extended::Finite(q(3, 1)), q(4, 7)));

        let code = Arc::new(zoo::repetition(3));
        let t = Tester::<Q>::uniform(code.clone(), vec![bits("110"), bits("011")]).unwrap();
        let tbl = CosetTable::new(code.clone()).unwrap();
        let r = basis_tester_bound(&code, &t, &tbl).unwrap();
        assert_eq!((r.ratio, r.bound), (Extended::Finite(q(2, 1)), q(1, 3)));

        let code = Arc::new(zoo::repetition(2));
        let t = Tester::<Q>::uniform(code.clone(), vec![bits("11")]).unwrap();
        let tbl = CosetTable::new(code.clone()).unwrap();
        let r = basis_tester_bound(&code, &t, &tbl).unwrap();
        assert_eq!((r.ratio, r.bound), (Extended::Finite(Q::one()), q(1, 3)));

        let code = Arc::new(zoo::hamming74());
        let tbl = CosetTable::new(code.clone()).unwrap();
        assert_eq!(basis_tester_bound(&code, &simplex(&code), &tbl).unwrap_err(), Error::NotBasisTester);
    }

    #[test]
    fn text_round_trip() {
        let e = CutEmbedding::new(2, vec![(table("+++-"), q(1, 3)), (table("+-+-"), q(2, 3))]).unwrap();
        let text = e.to_text();
        assert_eq!(text, "embed 2\n1/3 +++-\n2/3 +-+-\n");
        assert_eq!(text.parse::<CutEmbedding<Q>>().unwrap(), e);
        assert!("embed 2\n1 +++\n".parse::<CutEmbedding<Q>>().is_err());
        assert!("embed 2\n1/2 ++++\n".parse::<CutEmbedding<Q>>().is_err());
    }

    #[test]
    fn shift_average_above_pair_limit() {
        // h = 11 takes the shift-averaged route; character cuts are already
        // shift-invariant so the value is unchanged.
        let code = Arc::new(zoo::repetition(12));
        let t = Tester::<Q>::uniform(
            code.clone(),
            (0..11).map(|i| code.dual_word(1 << i)).collect(),
        )
        .unwrap();
        let g = crate::cayley::graph_from_code::<Q>(&code).unwrap();
        let tbl = CosetTable::new(code).unwrap();
        let r = distortion(&CutEmbedding::from_tester(&t).unwrap(), &g).unwrap();
        assert_eq!(r, linear_distortion(&t, &tbl).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn character_embedding_matches_formula(seed in 0u64..1000, which in 0usize..4) {
            let code = Arc::new(match which {
                0 => zoo::hamming74(),
                1 => zoo::rep4(),
                2 => zoo::random(9, 4, seed),
                _ => zoo::repetition(5),
            });
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = code.h();
            let masses: Vec<(u64, Q)> = (0..5)
                .map(|_| (rng.random_range(0..1u64 << h), q(rng.random_range(1..4), 1)))
                .collect();
            let total = masses.iter().fold(Q::zero(), |a, (_, p)| a + p.clone());
            let t = Tester::from_coords(code.clone(), masses.into_iter().map(|(a, p)| (a, p / total.clone())).collect()).unwrap();
            let tbl = CosetTable::new(code.clone()).unwrap();
            let g = crate::cayley::graph_from_code::<Q>(&code).unwrap();
            let cut = distortion(&CutEmbedding::from_tester(&t).unwrap(), &g).unwrap();
            match linear_distortion(&t, &tbl) {
                Ok(lin) => prop_assert_eq!(lin, cut),
                Err(_) => prop_assert!(cut.distortion.is_infinite()),
            }
        }

        #[test]
        fn linearization_never_increases_distortion(seed in 0u64..1000, count in 1usize..6) {
            let code = Arc::new(zoo::random(8, 4, seed));
            let e = CutEmbedding::<Q>::random(code.h(), count, seed).unwrap();
            let l = linearize(&e, &code).unwrap();
            prop_assert!(l.after.distortion.approx_le(&l.before.distortion));
            // The linear embedding is the shift average of the original.
            let lin = CutEmbedding::from_tester(&l.tester).unwrap();
            let avg = e.shift_averaged_delta();
            for (z, d) in avg.iter().enumerate() {
                prop_assert_eq!(d.clone(), lin.delta(0, z as u64));
            }
            let ef = e.convert_f64();
            let lf = linearize(&ef, &code).unwrap();
            let lin = CutEmbedding::from_tester(&lf.tester).unwrap();
            for (z, d) in ef.shift_averaged_delta().iter().enumerate() {
                prop_assert!((d - lin.delta(0, z as u64)).abs() <= 1e-12);
            }
        }
    }

    impl CutEmbedding<Q> {
        fn convert_f64(&self) -> CutEmbedding<f64> {
            CutEmbedding {
                h: self.h,
                functions: self.functions.iter().map(|(f, p)| (f.clone(), p.to_f64())).collect(),
            }
        }
    }
}
