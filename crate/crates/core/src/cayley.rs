//! Cayley graphs on `F2^h`, their spectra, and the code ↔ graph bijection.
//!
//! Group elements are packed little-endian into `u64`, so a dense table of
//! length `2^h` is indexed by element. A code with parity-check matrix `H`
//! corresponds to `Cay(F2^h, columns of H)`; its metric from 0 is the
//! coset-leader weight, and its eigenvalues are `1 − 2 Rej` of any tester
//! whose support spans the dual.

use std::str::FromStr;

use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::f2::{cayley_bfs, check_group_dim, span_dim, wht, BitMatrix, BitVec};
use crate::scalar::Scalar;
use crate::tester::Tester;

#[derive(Clone, Debug, PartialEq)]
pub struct CayleyGraph<S> {
    h: usize,
    /// Sorted by element, merged, zero masses dropped.
    mass: Vec<(u64, S)>,
    /// The unweighted generator multiset, when the graph was built from one.
    gens: Option<Vec<u64>>,
}

fn check_dim(h: usize) -> Result<()> {
    if h == 0 {
        return Err(Error::DegenerateGraph);
    }
    check_group_dim(h)
}

fn check_element(x: u64, h: usize) -> Result<()> {
    if x >> h != 0 {
        Err(Error::DimensionMismatch {
            expected: h,
            got: 64 - x.leading_zeros() as usize,
        })
    } else {
        Ok(())
    }
}

impl<S: Scalar> CayleyGraph<S> {
    /// Unweighted graph: the uniform distribution over a generator multiset.
    pub fn from_gens(h: usize, gens: Vec<u64>) -> Result<Self> {
        check_dim(h)?;
        if gens.is_empty() {
            return Err(Error::BadDistribution("empty generator multiset".into()));
        }
        for &g in &gens {
            check_element(g, h)?;
        }
        let share = S::from_ratio(1, gens.len() as u64);
        let mass = gens.iter().map(|&g| (g, share.clone())).collect();
        Ok(Self {
            h,
            mass: canonical(mass),
            gens: Some(gens),
        })
    }

    /// Weighted graph from a probability mass function.
    pub fn from_mass(h: usize, mass: Vec<(u64, S)>) -> Result<Self> {
        check_dim(h)?;
        let mut total = S::zero();
        for (x, p) in &mass {
            check_element(*x, h)?;
            if *p < S::zero() {
                return Err(Error::BadDistribution(format!("negative mass {}", p.render())));
            }
            total = total + p.clone();
        }
        if !total.approx_eq(&S::one()) {
            return Err(Error::BadDistribution(format!("masses sum to {}", total.render())));
        }
        Ok(Self {
            h,
            mass: canonical(mass),
            gens: None,
        })
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn mass(&self) -> &[(u64, S)] {
        &self.mass
    }

    pub fn gens(&self) -> Option<&[u64]> {
        self.gens.as_deref()
    }

    /// Generators used for the path metric: the multiset if present,
    /// otherwise the support of the distribution.
    pub fn generator_set(&self) -> Vec<u64> {
        match &self.gens {
            Some(g) => g.clone(),
            None => self.mass.iter().map(|(x, _)| *x).collect(),
        }
    }

    pub fn dense_mass(&self) -> Vec<S> {
        let mut d = vec![S::zero(); 1 << self.h];
        for (x, p) in &self.mass {
            d[*x as usize] = p.clone();
        }
        d
    }

    pub fn convert<T: Scalar>(&self) -> CayleyGraph<T> {
        CayleyGraph {
            h: self.h,
            mass: self
                .mass
                .iter()
                .map(|(x, p)| (*x, crate::scalar::convert::<S, T>(p)))
                .collect(),
            gens: self.gens.clone(),
        }
    }

    /// `cayley h`, then `gen bits` lines or `mass p/q bits` lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("cayley {}\n", self.h);
        match &self.gens {
            Some(gens) => {
                for &g in gens {
                    s.push_str(&format!("gen {}\n", BitVec::from_u64(g, self.h)));
                }
            }
            None => {
                for (x, p) in &self.mass {
                    s.push_str(&format!("mass {} {}\n", p.render(), BitVec::from_u64(*x, self.h)));
                }
            }
        }
        s
    }
}

fn canonical<S: Scalar>(mut mass: Vec<(u64, S)>) -> Vec<(u64, S)> {
    mass.sort_by_key(|(x, _)| *x);
    let mut out: Vec<(u64, S)> = Vec::with_capacity(mass.len());
    for (x, p) in mass {
        match out.last_mut() {
            Some((y, q)) if *y == x => *q = q.clone() + p,
            _ => out.push((x, p)),
        }
    }
    out.retain(|(_, p)| !p.is_zero());
    out
}

impl<S: Scalar> FromStr for CayleyGraph<S> {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty graph file"))?;
        let h: usize = header
            .strip_prefix("cayley ")
            .and_then(|h| h.trim().parse().ok())
            .ok_or_else(|| Error::parse(no, "header must be `cayley h`"))?;
        let element = |no: usize, bits: &str| -> Result<u64> {
            let v: BitVec = bits.trim().parse().map_err(|e| Error::parse(no, format!("{e}")))?;
            if v.len() != h {
                return Err(Error::parse(no, format!("element has {} bits, expected {h}", v.len())));
            }
            v.to_u64().ok_or_else(|| Error::parse(no, "element too long"))
        };
        let mut gens = Vec::new();
        let mut mass = Vec::new();
        for (no, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[..] {
                ["gen", bits] => gens.push(element(no, bits)?),
                ["mass", p, bits] => {
                    let p = S::parse_prob(p)
                        .ok_or_else(|| Error::parse(no, format!("bad probability {p:?}")))?;
                    mass.push((element(no, bits)?, p));
                }
                _ => return Err(Error::parse(no, "expected `gen bits` or `mass p/q bits`")),
            }
            if !gens.is_empty() && !mass.is_empty() {
                return Err(Error::parse(no, "cannot mix gen and mass lines"));
            }
        }
        if !gens.is_empty() {
            Self::from_gens(h, gens)
        } else {
            Self::from_mass(h, mass)
        }
    }
}

/// Eigenvalues `λ(b) = Σ_s D(s) (−1)^{<b,s>}`, indexed by functional `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumTable<S> {
    lambda: Vec<S>,
}

impl<S: Scalar> SpectrumTable<S> {
    pub fn h(&self) -> usize {
        self.lambda.len().trailing_zeros() as usize
    }

    pub fn lambda(&self, b: u64) -> &S {
        &self.lambda[b as usize]
    }

    pub fn values(&self) -> &[S] {
        &self.lambda
    }

    /// `λ(0) = 1` and every eigenvalue lies in `[−1, 1]`.
    pub fn check(&self) -> Result<()> {
        if !self.lambda[0].approx_eq(&S::one()) {
            return Err(Error::IdentityViolated(format!("λ(0) = {}", self.lambda[0].render())));
        }
        let one = S::one();
        if let Some((b, l)) = self
            .lambda
            .iter()
            .enumerate()
            .find(|(_, l)| !one.approx_ge(&l.abs()))
        {
            return Err(Error::IdentityViolated(format!("λ({b}) = {} outside [−1, 1]", l.render())));
        }
        Ok(())
    }
}

pub fn spectrum<S: Scalar>(g: &CayleyGraph<S>) -> SpectrumTable<S> {
    let mut lambda = g.dense_mass();
    wht(&mut lambda);
    SpectrumTable { lambda }
}

/// `Cay(F2^{n−k}, columns of H)`, unweighted.
pub fn graph_from_code<S: Scalar>(code: &LinearCode) -> Result<CayleyGraph<S>> {
    check_dim(code.h())?;
    CayleyGraph::from_gens(code.h(), code.syndrome_columns().to_vec())
}

/// The code whose parity-check columns are the generators.
pub fn code_from_graph<S: Scalar>(g: &CayleyGraph<S>) -> Result<LinearCode> {
    let gens = g
        .gens()
        .ok_or_else(|| Error::PreconditionFailed("graph has no generator multiset".into()))?;
    if span_dim(gens, g.h()) < g.h() {
        return Err(Error::NotGenerating { h: g.h() });
    }
    let cols: Vec<BitVec> = gens.iter().map(|&s| BitVec::from_u64(s, g.h())).collect();
    LinearCode::from_parity_check(BitMatrix::from_columns(&cols, g.h())?)
}

/// `Cay(C⊥, D)`, with `C⊥` coordinatised by the parity-check rows.
pub fn tester_graph<S: Scalar>(t: &Tester<S>) -> Result<CayleyGraph<S>> {
    let h = t.code().h();
    check_dim(h)?;
    let mass = t
        .coords()
        .iter()
        .zip(t.support())
        .map(|(&a, (_, p))| (a, p.clone()))
        .collect();
    CayleyGraph::from_mass(h, mass)
}

/// Outcome of comparing eigenvalues with rejection probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub cosets: usize,
    /// Largest `|λ(v̄) − (1 − 2 Rej(v̄))|`; zero in exact arithmetic.
    pub max_error: f64,
}

/// Largest `h` accepted by [`eigenvalue_rejection_identity`].
pub const MAX_IDENTITY_DIM: usize = 20;

/// Check `λ(v̄) = 1 − 2 Rej(v̄, D)` on every coset, with λ from the transform
/// of the tester graph and Rej evaluated directly on the support.
pub fn eigenvalue_rejection_identity<S: Scalar>(t: &Tester<S>) -> Result<IdentityCheck> {
    let h = t.code().h();
    if h > MAX_IDENTITY_DIM {
        return Err(Error::TooLarge(format!("identity check over 2^{h} cosets")));
    }
    let lambda: Vec<S> = if h == 0 {
        vec![S::one()]
    } else {
        spectrum(&tester_graph(t)?).lambda
    };
    let rej = t.coset_rejections_direct()?;
    let tol = if S::EXACT { S::zero() } else { S::from_ratio(1, 10_000_000_000) };
    let two = S::from_count(2);
    let mut max_error = 0.0f64;
    for (s, (l, r)) in lambda.iter().zip(&rej).enumerate() {
        let rhs = S::one() - two.clone() * r.clone();
        let err = (l.clone() - rhs.clone()).abs();
        if err > tol {
            return Err(Error::IdentityViolated(format!(
                "coset {}: λ = {} but 1 − 2 Rej = {}",
                BitVec::from_u64(s as u64, h),
                l.render(),
                rhs.render()
            )));
        }
        max_error = max_error.max(err.to_f64());
    }
    Ok(IdentityCheck {
        cosets: lambda.len(),
        max_error,
    })
}

/// Path distances from 0, ignoring weights.
pub fn bfs_metric<S: Scalar>(g: &CayleyGraph<S>) -> Result<Vec<u32>> {
    let gens = g.generator_set();
    if span_dim(&gens, g.h()) < g.h() {
        return Err(Error::Disconnected);
    }
    Ok(cayley_bfs(&gens, g.h()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{zoo, CosetTable};
    use crate::Rational;
    use proptest::prelude::*;
    use std::sync::Arc;

    type Q = Rational;

    fn q(n: i64, d: u64) -> Q {
        Q::from_ratio(n, d)
    }

    fn bits(s: &str) -> u64 {
        s.parse::<BitVec>().unwrap().to_u64().unwrap()
    }

    fn simplex(code: &Arc<LinearCode>) -> Tester<Q> {
        let words = (1..1u64 << code.h()).map(|a| code.dual_word(a)).collect();
        Tester::uniform(code.clone(), words).unwrap()
    }

    #[test]
    fn hamming_graph_is_k8() {
        let g: CayleyGraph<Q> = graph_from_code(&zoo::hamming74()).unwrap();
        let mut gens = g.gens().unwrap().to_vec();
        gens.sort();
        assert_eq!(gens, (1..8).collect::<Vec<_>>());
        assert_eq!(bfs_metric(&g).unwrap(), vec![0, 1, 1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn repetition_graph_is_k4() {
        let g: CayleyGraph<Q> = graph_from_code(&zoo::repetition(3)).unwrap();
        let mut gens = g.gens().unwrap().to_vec();
        gens.sort();
        assert_eq!(gens, vec![1, 2, 3]);
    }

    #[test]
    fn full_space_is_degenerate() {
        assert_eq!(
            graph_from_code::<Q>(&zoo::full_space(4)),
            Err(Error::DegenerateGraph)
        );
    }

    #[test]
    fn code_from_graph_examples() {
        let cube = CayleyGraph::<Q>::from_gens(3, vec![1, 2, 4]).unwrap();
        let c = code_from_graph(&cube).unwrap();
        assert_eq!((c.n(), c.k()), (3, 0));

        let k8 = CayleyGraph::<Q>::from_gens(3, (1..8).collect()).unwrap();
        let c = code_from_graph(&k8).unwrap();
        assert_eq!((c.n(), c.k(), c.min_distance().unwrap()), (7, 4, 3));

        let flat = CayleyGraph::<Q>::from_gens(3, vec![1, 2, 3]).unwrap();
        assert_eq!(code_from_graph(&flat), Err(Error::NotGenerating { h: 3 }));
    }

    #[test]
    fn round_trip_keeps_parity_check() {
        for code in [zoo::hamming74(), zoo::reed_muller(1, 4), zoo::random(10, 4, 7)] {
            let g: CayleyGraph<Q> = graph_from_code(&code).unwrap();
            let back = code_from_graph(&g).unwrap();
            assert_eq!(back.parity_check(), code.parity_check());
            assert_eq!(graph_from_code::<Q>(&back).unwrap(), g);
        }
    }

    #[test]
    fn tester_graph_examples() {
        let code = Arc::new(zoo::hamming74());
        let lazy = tester_graph(&Tester::<Q>::point_mass_zero(code.clone())).unwrap();
        assert!(spectrum(&lazy).values().iter().all(|l| *l == q(1, 1)));

        let t = simplex(&code);
        let g = tester_graph(&t).unwrap();
        assert_eq!(g.mass(), (1..8).map(|x| (x, q(1, 7))).collect::<Vec<_>>());

        let d = tester_graph(&t.diluted(q(7, 64)).unwrap()).unwrap();
        assert_eq!(d.mass()[0], (0, q(57, 64)));
        assert_eq!(d.mass()[1..], (1..8).map(|x| (x, q(1, 64))).collect::<Vec<_>>()[..]);
    }

    #[test]
    fn spectrum_examples() {
        let k8 = CayleyGraph::<Q>::from_gens(3, (1..8).collect()).unwrap();
        let s = spectrum(&k8);
        assert_eq!(*s.lambda(0), q(1, 1));
        assert!((1..8).all(|b| *s.lambda(b) == q(-1, 7)));
        // Direct summation oracle.
        for b in 0..8u64 {
            let direct: Q = (1..8u64)
                .map(|x| if (b & x).count_ones() % 2 == 1 { q(-1, 7) } else { q(1, 7) })
                .sum();
            assert_eq!(*s.lambda(b), direct);
        }
        s.check().unwrap();

        // Noisy square: each coordinate flips with probability 1/4.
        let noisy = CayleyGraph::<Q>::from_mass(
            2,
            vec![(0, q(9, 16)), (1, q(3, 16)), (2, q(3, 16)), (3, q(1, 16))],
        )
        .unwrap();
        let s = spectrum(&noisy);
        for b in 0..4u64 {
            assert_eq!(*s.lambda(b), q(1, 1u64 << b.count_ones()));
        }
    }

    #[test]
    fn identity_examples() {
        let code = Arc::new(zoo::hamming74());
        let t = simplex(&code);
        let rej = t.coset_rejections().unwrap();
        assert_eq!(rej[0], q(0, 1));
        let g = tester_graph(&t).unwrap();
        assert_eq!(*spectrum(&g).lambda(5), q(1, 1) - q(8, 7));
        assert_eq!(eigenvalue_rejection_identity(&t).unwrap().max_error, 0.0);

        let d = t.diluted(q(7, 64)).unwrap();
        let g = tester_graph(&d).unwrap();
        assert!((1..8).all(|b| *spectrum(&g).lambda(b) == q(7, 8)));
        eigenvalue_rejection_identity(&d).unwrap();
    }

    #[test]
    fn identity_detects_a_wrong_graph() {
        // A mismatched basis breaks the identity.
        let code = Arc::new(zoo::repetition(3));
        let t = Tester::<Q>::uniform(code.clone(), vec![code.dual_word(1)]).unwrap();
        let wrong = CayleyGraph::<Q>::from_mass(2, vec![(2, q(1, 1))]).unwrap();
        let lambda = spectrum(&wrong);
        let rej = t.coset_rejections().unwrap();
        assert!((0..4).any(|s| *lambda.lambda(s) != q(1, 1) - q(2, 1) * rej[s as usize].clone()));
    }

    #[test]
    fn metric_examples() {
        let cube = CayleyGraph::<Q>::from_gens(3, vec![1, 2, 4]).unwrap();
        let d = bfs_metric(&cube).unwrap();
        assert!((0..8u64).all(|x| d[x as usize] == x.count_ones()));

        let g = CayleyGraph::<Q>::from_gens(3, vec![bits("100"), bits("010"), bits("001"), bits("111")])
            .unwrap();
        let d = bfs_metric(&g).unwrap();
        assert_eq!(d[bits("110") as usize], 2);
        assert_eq!(d[bits("111") as usize], 1);

        let flat = CayleyGraph::<Q>::from_gens(3, vec![1, 2]).unwrap();
        assert_eq!(bfs_metric(&flat), Err(Error::Disconnected));
    }

    #[test]
    fn text_round_trip() {
        let g = CayleyGraph::<Q>::from_gens(3, vec![1, 2, 4, 7, 7]).unwrap();
        assert_eq!(g.to_text().parse::<CayleyGraph<Q>>().unwrap(), g);
        let w = CayleyGraph::<Q>::from_mass(2, vec![(0, q(1, 2)), (3, q(1, 2))]).unwrap();
        assert_eq!(w.to_text(), "cayley 2\nmass 1/2 00\nmass 1/2 11\n");
        assert_eq!(w.to_text().parse::<CayleyGraph<Q>>().unwrap(), w);
        assert!("cayley 2\ngen 10\nmass 1/2 11\n".parse::<CayleyGraph<Q>>().is_err());
        assert!("cayley 2\nmass 1/2 11\n".parse::<CayleyGraph<Q>>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn metric_is_coset_distance(n in 4usize..=10, kf in 0.2f64..0.8, seed in any::<u64>()) {
            let k = ((n as f64 * kf) as usize).clamp(1, n - 1);
            let code = Arc::new(zoo::random(n, k, seed));
            let g: CayleyGraph<Q> = graph_from_code(&code).unwrap();
            let dist = bfs_metric(&g).unwrap();
            let words = code.codewords();
            for x in 0..1u64 << n {
                let v = BitVec::from_u64(x, n);
                let brute = words.iter().map(|c| (&v ^ c).weight()).min().unwrap();
                prop_assert_eq!(dist[code.syndrome_index(&v)] as usize, brute);
            }
            let tbl = CosetTable::new(code.clone()).unwrap();
            prop_assert_eq!(dist.iter().map(|&d| d as usize).collect::<Vec<_>>(),
                (0..dist.len()).map(|s| tbl.leader_weight(s)).collect::<Vec<_>>());
        }

        #[test]
        fn spectrum_bounded_and_self_inverse(h in 1usize..=8, raw in prop::collection::vec((any::<u64>(), 1u32..100), 1..20)) {
            let mass: Vec<(u64, f64)> = {
                let total: u32 = raw.iter().map(|r| r.1).sum();
                raw.iter().map(|&(x, w)| (x & ((1 << h) - 1), w as f64 / total as f64)).collect()
            };
            let g = CayleyGraph::from_mass(h, mass).unwrap();
            let s = spectrum(&g);
            s.check().unwrap();
            prop_assert!((s.lambda(0) - 1.0).abs() < 1e-12);
            let mut back = s.values().to_vec();
            wht(&mut back);
            let dense = g.dense_mass();
            for (a, b) in back.iter().zip(&dense) {
                prop_assert!((a / (1u64 << h) as f64 - b).abs() < 1e-12);
            }
        }

        #[test]
        fn identity_on_random_testers(n in 4usize..=9, seed in any::<u64>(), masses in prop::collection::vec(1u64..20, 1..8)) {
            let code = Arc::new(zoo::random(n, n / 2, seed));
            let h = code.h();
            let total: u64 = masses.iter().sum();
            let support = masses.iter().enumerate()
                .map(|(i, &m)| ((seed.rotate_left(i as u32 * 7) ^ i as u64) & ((1 << h) - 1), q(m as i64, total)))
                .collect();
            let t = Tester::from_coords(code, support).unwrap();
            prop_assert_eq!(eigenvalue_rejection_identity(&t).unwrap().max_error, 0.0);
        }
    }
}
