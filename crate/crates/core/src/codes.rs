//! Binary linear codes, their duals, and coset-leader tables.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::f2::{cayley_bfs, check_group_dim, independence_width, BitMatrix, BitVec, MAX_BITS};

/// Which matrix a code was specified by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    Generator,
    ParityCheck,
}

impl MatrixKind {
    pub fn keyword(self) -> &'static str {
        match self {
            MatrixKind::Generator => "gen",
            MatrixKind::ParityCheck => "pcheck",
        }
    }
}

/// An `[n, k]` binary linear code with both generator and parity-check
/// matrices at full row rank. The parity-check rows double as the fixed
/// basis of the dual code, so syndromes are coordinates of `F2^n / C`.
#[derive(Clone)]
pub struct LinearCode {
    n: usize,
    gen: BitMatrix,
    pcheck: BitMatrix,
    source: MatrixKind,
    /// Packed parity-check columns, i.e. syndromes of the unit vectors.
    columns: Vec<u64>,
}

impl PartialEq for LinearCode {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.gen == other.gen && self.pcheck == other.pcheck
    }
}

impl fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearCode[{}, {}]", self.n, self.k())
    }
}

impl LinearCode {
    /// Build from either matrix; the other is completed as its kernel.
    /// Dependent rows are dropped, keeping the earliest independent ones.
    pub fn new(m: BitMatrix, which: MatrixKind) -> Result<Self> {
        let n = m.ncols();
        if n == 0 || n > MAX_BITS {
            return Err(Error::TooLarge(format!("block length {n}")));
        }
        let basis = m.independent_rows();
        if basis.nrows() == 0 {
            return Err(Error::RankDeficient);
        }
        let other = basis.kernel_basis();
        let (gen, pcheck) = match which {
            MatrixKind::Generator => (basis, other),
            MatrixKind::ParityCheck => (other, basis),
        };
        Ok(Self::assemble(n, gen, pcheck, which))
    }

    pub fn from_generator(gen: BitMatrix) -> Result<Self> {
        Self::new(gen, MatrixKind::Generator)
    }

    pub fn from_parity_check(pcheck: BitMatrix) -> Result<Self> {
        Self::new(pcheck, MatrixKind::ParityCheck)
    }

    fn assemble(n: usize, gen: BitMatrix, pcheck: BitMatrix, source: MatrixKind) -> Self {
        let columns = if pcheck.nrows() <= 64 {
            pcheck
                .columns()
                .iter()
                .map(|c| c.to_u64().expect("at most 64 rows"))
                .collect()
        } else {
            Vec::new()
        };
        Self {
            n,
            gen,
            pcheck,
            source,
            columns,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.gen.nrows()
    }

    /// Redundancy `n − k`: the dimension of the dual code and of the
    /// associated Cayley graph.
    pub fn h(&self) -> usize {
        self.pcheck.nrows()
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.gen
    }

    pub fn parity_check(&self) -> &BitMatrix {
        &self.pcheck
    }

    pub fn source(&self) -> MatrixKind {
        self.source
    }

    /// Packed syndromes of `e_1..e_n` (empty when `h > 64`).
    pub fn syndrome_columns(&self) -> &[u64] {
        &self.columns
    }

    pub fn dual(&self) -> LinearCode {
        let source = match self.source {
            MatrixKind::Generator => MatrixKind::ParityCheck,
            MatrixKind::ParityCheck => MatrixKind::Generator,
        };
        Self::assemble(self.n, self.pcheck.clone(), self.gen.clone(), source)
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        v.len() == self.n && self.pcheck.mul_vec(v).is_zero()
    }

    pub fn is_dual_codeword(&self, v: &BitVec) -> bool {
        v.len() == self.n && self.gen.mul_vec(v).is_zero()
    }

    pub fn syndrome(&self, v: &BitVec) -> BitVec {
        self.pcheck.mul_vec(v)
    }

    /// Syndrome packed little-endian into an index of `F2^h`.
    pub fn syndrome_index(&self, v: &BitVec) -> usize {
        assert!(self.h() <= 64, "syndrome index needs h <= 64");
        assert_eq!(v.len(), self.n);
        v.iter_ones().fold(0u64, |acc, i| acc ^ self.columns[i]) as usize
    }

    /// Dual codeword `a^T H` with coordinates `a` in the parity-check basis.
    pub fn dual_word(&self, coords: u64) -> BitVec {
        self.pcheck.combine_rows(&BitVec::from_u64(coords, self.h()))
    }

    /// Coordinates of a dual codeword in the parity-check basis.
    pub fn dual_coords(&self, alpha: &BitVec) -> Option<u64> {
        self.pcheck.row_coordinates(alpha).and_then(|a| a.to_u64())
    }

    /// Some word whose syndrome is `s`.
    pub fn coset_representative(&self, s: u64) -> BitVec {
        // Rows of H^T are the parity-check columns.
        self.pcheck
            .transpose()
            .row_coordinates(&BitVec::from_u64(s, self.h()))
            .expect("parity-check matrix has full row rank")
    }

    /// Exact minimum distance. The zero code `{0}` reports `n + 1`.
    pub fn min_distance(&self) -> Result<usize> {
        let (k, h) = (self.k(), self.h());
        if k == 0 {
            return Ok(self.n + 1);
        }
        if k <= h && k <= 24 {
            return Ok(self.min_weight_by_enumeration());
        }
        if h <= 24 {
            return independence_width(&self.pcheck.columns());
        }
        if k <= 24 {
            return Ok(self.min_weight_by_enumeration());
        }
        Err(Error::TooLarge(format!("min(k, n-k) = {} > 24", k.min(h))))
    }

    pub fn dual_distance(&self) -> Result<usize> {
        self.dual().min_distance()
    }

    fn min_weight_by_enumeration(&self) -> usize {
        let k = self.k();
        let mut word = BitVec::zeros(self.n);
        let mut best = self.n + 1;
        // Gray-code walk through all 2^k codewords.
        for i in 1u64..(1u64 << k) {
            let flip = i.trailing_zeros() as usize;
            word ^= self.gen.row(flip);
            best = best.min(word.weight());
        }
        best
    }

    /// All codewords, in Gray-code order starting from 0.
    pub fn codewords(&self) -> Vec<BitVec> {
        let k = self.k();
        assert!(k <= 24);
        let mut word = BitVec::zeros(self.n);
        let mut out = vec![word.clone()];
        for i in 1u64..(1u64 << k) {
            word ^= self.gen.row(i.trailing_zeros() as usize);
            out.push(word.clone());
        }
        out
    }

    /// Text form: `code n k`, then `gen`/`pcheck`, then that matrix's rows.
    pub fn to_text(&self) -> String {
        let m = match self.source {
            MatrixKind::Generator => &self.gen,
            MatrixKind::ParityCheck => &self.pcheck,
        };
        let mut s = format!("code {} {}\n{}\n", self.n, self.k(), self.source.keyword());
        for r in m.rows() {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }
}

impl FromStr for LinearCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty());
        let (no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty code file"))?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        let (n, k) = match toks[..] {
            ["code", n, k] => (
                n.parse::<usize>().map_err(|_| Error::parse(no, "bad n"))?,
                k.parse::<usize>().map_err(|_| Error::parse(no, "bad k"))?,
            ),
            _ => return Err(Error::parse(no, "header must be `code n k`")),
        };
        let (no, kind) = lines.next().ok_or_else(|| Error::parse(no + 1, "missing matrix kind"))?;
        let kind = match kind.trim() {
            "gen" => MatrixKind::Generator,
            "pcheck" => MatrixKind::ParityCheck,
            other => return Err(Error::parse(no, format!("expected gen or pcheck, got {other:?}"))),
        };
        let rows = BitMatrix::parse_rows(lines, n)?;
        // Full-space codes have an empty parity-check matrix.
        let code = if rows.is_empty() && kind == MatrixKind::ParityCheck {
            let gen = BitMatrix::identity(n);
            Self::assemble(n, gen, BitMatrix::zeros(0, n), MatrixKind::ParityCheck)
        } else {
            LinearCode::new(BitMatrix::new(rows, n)?, kind)?
        };
        if code.k() != k {
            return Err(Error::parse(
                no,
                format!("header says k = {k}, matrix gives k = {}", code.k()),
            ));
        }
        Ok(code)
    }
}

/// Per-syndrome coset-leader weights of `F2^n / C`.
#[derive(Clone, Debug)]
pub struct CosetTable {
    code: Arc<LinearCode>,
    leader_weight: Vec<u32>,
    covering_radius: usize,
}

impl CosetTable {
    /// Breadth-first search over the syndrome space, generated by the
    /// parity-check columns.
    pub fn new(code: Arc<LinearCode>) -> Result<Self> {
        let h = code.h();
        check_group_dim(h)?;
        let leader_weight = cayley_bfs(code.syndrome_columns(), h);
        let covering_radius = leader_weight.iter().copied().max().unwrap_or(0) as usize;
        Ok(Self {
            code,
            leader_weight,
            covering_radius,
        })
    }

    pub fn code(&self) -> &Arc<LinearCode> {
        &self.code
    }

    pub fn leader_weights(&self) -> &[u32] {
        &self.leader_weight
    }

    pub fn leader_weight(&self, syndrome: usize) -> usize {
        self.leader_weight[syndrome] as usize
    }

    pub fn covering_radius(&self) -> usize {
        self.covering_radius
    }

    pub fn dist_to_code(&self, v: &BitVec) -> usize {
        self.leader_weight(self.code.syndrome_index(v))
    }
}

/// Standard code zoo used by tests and the corpus.
pub mod zoo {
    use super::*;

    fn rows(strs: &[&str]) -> BitMatrix {
        let rows: Vec<BitVec> = strs.iter().map(|s| s.parse().expect("valid bits")).collect();
        let n = rows[0].len();
        BitMatrix::new(rows, n).expect("equal lengths")
    }

    /// `[n, 1, n]` repetition code.
    pub fn repetition(n: usize) -> LinearCode {
        let all = BitVec::from_bools(&vec![true; n]);
        LinearCode::from_generator(BitMatrix::new(vec![all], n).unwrap()).unwrap()
    }

    /// `[n, n−1, 2]` even-weight code.
    pub fn parity(n: usize) -> LinearCode {
        let all = BitVec::from_bools(&vec![true; n]);
        LinearCode::from_parity_check(BitMatrix::new(vec![all], n).unwrap()).unwrap()
    }

    /// `[7, 4, 3]` Hamming code; column `j` of the parity check is `j + 1`
    /// in little-endian binary.
    pub fn hamming74() -> LinearCode {
        LinearCode::from_parity_check(rows(&["1010101", "0110011", "0001111"])).unwrap()
    }

    /// `[8, 4, 4]` extended Hamming code.
    pub fn extended_hamming84() -> LinearCode {
        LinearCode::from_parity_check(rows(&[
            "10101010",
            "01100110",
            "00011110",
            "11111111",
        ]))
        .unwrap()
    }

    /// Reed–Muller `RM(r, m)`: evaluations of monomials of degree `<= r`
    /// at the points of `F2^m` (point `p` packs its coordinates
    /// little-endian), monomials ordered by degree then by variable mask.
    pub fn reed_muller(r: usize, m: usize) -> LinearCode {
        assert!(m <= 12 && r <= m);
        let n = 1usize << m;
        let mut gen = Vec::new();
        for deg in 0..=r {
            for mono in (0u64..(1 << m)).filter(|s| s.count_ones() as usize == deg) {
                let bits: Vec<bool> = (0..n as u64).map(|p| p & mono == mono).collect();
                gen.push(BitVec::from_bools(&bits));
            }
        }
        LinearCode::from_generator(BitMatrix::new(gen, n).unwrap()).unwrap()
    }

    /// Random `[n, k]` code from a seeded generator; rows are redrawn until
    /// the generator has full rank.
    pub fn random(n: usize, k: usize, seed: u64) -> LinearCode {
        assert!(k >= 1 && k <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let gen: Vec<BitVec> = (0..k)
                .map(|_| BitVec::from_bools(&(0..n).map(|_| rng.random::<bool>()).collect::<Vec<_>>()))
                .collect();
            let m = BitMatrix::new(gen, n).unwrap();
            if m.rank() == k {
                return LinearCode::from_generator(m).unwrap();
            }
        }
    }

    /// `{0000, 1111}`: the `[4, 1, 4]` repetition code.
    pub fn rep4() -> LinearCode {
        repetition(4)
    }

    /// The full space `F2^n` (`k = n`).
    pub fn full_space(n: usize) -> LinearCode {
        LinearCode::from_generator(BitMatrix::identity(n)).unwrap()
    }

    /// The zero code `{0}` of length `n` (`k = 0`).
    pub fn zero_code(n: usize) -> LinearCode {
        LinearCode::from_parity_check(BitMatrix::identity(n)).unwrap()
    }
}
