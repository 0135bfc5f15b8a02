use std::fmt;
use std::str::FromStr;

use super::bitvec::BitVec;
use crate::error::{Error, Result};

/// Dense matrix over F2 stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<BitVec>,
    ncols: usize,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: BitMatrix,
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    pub fn new(rows: Vec<BitVec>, ncols: usize) -> Result<Self> {
        for r in &rows {
            if r.len() != ncols {
                return Err(Error::DimensionMismatch {
                    expected: ncols,
                    got: r.len(),
                });
            }
        }
        Ok(Self { rows, ncols })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            rows: vec![BitVec::zeros(ncols); nrows],
            ncols,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: (0..n).map(|i| BitVec::unit(i, n)).collect(),
            ncols: n,
        }
    }

    /// Matrix whose columns are the given vectors (all of length `nrows`).
    pub fn from_columns(cols: &[BitVec], nrows: usize) -> Result<Self> {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != nrows {
                return Err(Error::DimensionMismatch {
                    expected: nrows,
                    got: c.len(),
                });
            }
            for i in c.iter_ones() {
                m.rows[i].set(j, true);
            }
        }
        Ok(m)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn column(&self, j: usize) -> BitVec {
        let mut c = BitVec::zeros(self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            if r.get(j) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn columns(&self) -> Vec<BitVec> {
        (0..self.ncols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> BitMatrix {
        BitMatrix {
            rows: self.columns(),
            ncols: self.nrows(),
        }
    }

    /// `M · v` for a column vector `v` of length `ncols`.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    /// `a^T · M` for a row-combination vector `a` of length `nrows`.
    pub fn combine_rows(&self, a: &BitVec) -> BitVec {
        assert_eq!(a.len(), self.nrows());
        let mut out = BitVec::zeros(self.ncols);
        for i in a.iter_ones() {
            out ^= &self.rows[i];
        }
        out
    }

    /// `M · N^T`; zero exactly when every row of `M` is orthogonal to every
    /// row of `N`.
    pub fn mul_transpose(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.ncols, other.ncols);
        let rows = self
            .rows
            .iter()
            .map(|r| BitVec::from_bools(&other.rows.iter().map(|s| r.dot(s)).collect::<Vec<_>>()))
            .collect();
        BitMatrix {
            rows,
            ncols: other.nrows(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVec::is_zero)
    }

    pub fn echelon(&self) -> Echelon {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    *row ^= &pivot;
                }
            }
            pivots.push(c);
            r += 1;
        }
        rows.truncate(r);
        Echelon {
            reduced: BitMatrix {
                rows,
                ncols: self.ncols,
            },
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of `{x : M x = 0}` as rows, one per free column.
    pub fn kernel_basis(&self) -> BitMatrix {
        let Echelon { reduced, pivots } = self.echelon();
        let mut is_pivot = vec![false; self.ncols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let rows = (0..self.ncols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut x = BitVec::unit(f, self.ncols);
                for (r, &p) in pivots.iter().enumerate() {
                    if reduced.get(r, f) {
                        x.set(p, true);
                    }
                }
                x
            })
            .collect();
        BitMatrix {
            rows,
            ncols: self.ncols,
        }
    }

    /// Keeps rows that are independent of the rows kept before them.
    pub fn independent_rows(&self) -> BitMatrix {
        let mut kept: Vec<BitVec> = Vec::new();
        let mut basis: Vec<(usize, BitVec)> = Vec::new();
        for row in &self.rows {
            let mut v = row.clone();
            for (p, b) in &basis {
                if v.get(*p) {
                    v ^= b;
                }
            }
            let lead = v.iter_ones().next();
            if let Some(p) = lead {
                basis.push((p, v));
                kept.push(row.clone());
            }
        }
        BitMatrix {
            rows: kept,
            ncols: self.ncols,
        }
    }

    /// Whether both matrices have the same row space.
    pub fn same_row_space(&self, other: &BitMatrix) -> bool {
        self.ncols == other.ncols && self.echelon().reduced == other.echelon().reduced
    }

    /// Solve `a^T · M = v` for `a` when `M` has independent rows.
    pub fn row_coordinates(&self, v: &BitVec) -> Option<BitVec> {
        // Track each echelon row as a combination of original rows.
        let m = self.nrows();
        let mut work: Vec<(BitVec, BitVec)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), BitVec::unit(i, m)))
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            if r == work.len() {
                break;
            }
            let Some(p) = (r..work.len()).find(|&i| work[i].0.get(c)) else {
                continue;
            };
            work.swap(r, p);
            let pivot = work[r].clone();
            for (i, row) in work.iter_mut().enumerate() {
                if i != r && row.0.get(c) {
                    row.0 ^= &pivot.0;
                    row.1 ^= &pivot.1;
                }
            }
            pivots.push(c);
            r += 1;
        }
        let mut rest = v.clone();
        let mut coords = BitVec::zeros(m);
        for (i, &p) in pivots.iter().enumerate() {
            if rest.get(p) {
                rest ^= &work[i].0;
                coords ^= &work[i].1;
            }
        }
        rest.is_zero().then_some(coords)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.nrows(), self.ncols);
        for r in &self.rows {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }

    /// Parse rows of 0/1 strings (one per line, blank lines skipped).
    pub(crate) fn parse_rows<'a>(
        lines: impl Iterator<Item = (usize, &'a str)>,
        ncols: usize,
    ) -> Result<Vec<BitVec>> {
        let mut rows = Vec::new();
        for (no, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: BitVec = line
                .parse()
                .map_err(|e| Error::parse(no, format!("{e}")))?;
            if v.len() != ncols {
                return Err(Error::parse(
                    no,
                    format!("row has {} bits, expected {ncols}", v.len()),
                ));
            }
            rows.push(v);
        }
        Ok(rows)
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    /// Text format: `nrows ncols` header, then one 0/1 row per line.
    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (no, header) = lines
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or_else(|| Error::parse(1, "empty matrix file"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(no, "header must be `nrows ncols`"))?;
        let [nrows, ncols] = dims[..] else {
            return Err(Error::parse(no, "header must be `nrows ncols`"));
        };
        let rows = Self::parse_rows(lines, ncols)?;
        if rows.len() != nrows {
            return Err(Error::parse(
                no,
                format!("expected {nrows} rows, found {}", rows.len()),
            ));
        }
        BitMatrix::new(rows, ncols)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix[{}x{}]", self.nrows(), self.ncols)?;
        for r in &self.rows {
            write!(f, " {r}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&str]) -> BitMatrix {
        let rows: Vec<BitVec> = rows.iter().map(|r| r.parse().unwrap()).collect();
        let n = rows[0].len();
        BitMatrix::new(rows, n).unwrap()
    }

    /// Rank by brute force: 2^rows / number of distinct row combinations.
    fn rank_by_subsets(mat: &BitMatrix) -> usize {
        let r = mat.nrows();
        let mut seen = std::collections::HashSet::new();
        for mask in 0u64..(1 << r) {
            seen.insert(mat.combine_rows(&BitVec::from_u64(mask, r)));
        }
        seen.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        assert_eq!(BitMatrix::zeros(2, 5).rank(), 0);
        let dep = m(&["1110", "0111", "1001"]);
        assert_eq!(rank_by_subsets(&dep), 2);
        assert_eq!(dep.rank(), 2);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(BitMatrix::identity(3).kernel_basis().nrows(), 0);

        let k = m(&["111"]).kernel_basis();
        assert_eq!(k.nrows(), 2);
        let even: Vec<BitVec> = (0u64..8)
            .map(|x| BitVec::from_u64(x, 3))
            .filter(|v| v.weight() % 2 == 0)
            .collect();
        for mask in 0u64..4 {
            assert!(even.contains(&k.combine_rows(&BitVec::from_u64(mask, 2))));
        }
        assert!(k.same_row_space(&m(&["110", "011"])));
    }

    #[test]
    fn hamming_generator_kernel_is_simplex() {
        let gen = m(&["1110000", "1001100", "0101010", "1101001"]);
        let ker = gen.kernel_basis();
        assert_eq!(ker.nrows(), 3);
        assert!(gen.mul_transpose(&ker).is_zero());
        for mask in 1u64..8 {
            assert_eq!(ker.combine_rows(&BitVec::from_u64(mask, 3)).weight(), 4);
        }
    }

    #[test]
    fn row_coordinates_inverts_combination() {
        let h = m(&["1010101", "0110011", "0001111"]);
        for mask in 0u64..8 {
            let a = BitVec::from_u64(mask, 3);
            let v = h.combine_rows(&a);
            assert_eq!(h.row_coordinates(&v), Some(a));
        }
        assert_eq!(h.row_coordinates(&"1000000".parse().unwrap()), None);
    }

    #[test]
    fn text_round_trip() {
        let a = m(&["1110", "0111"]);
        let b: BitMatrix = a.to_text().parse().unwrap();
        assert_eq!(a, b);
        assert!("2 3\n101\n".parse::<BitMatrix>().is_err());
    }

    #[test]
    fn independent_rows_keeps_originals() {
        let dep = m(&["1110", "0111", "1001", "0001"]);
        let ind = dep.independent_rows();
        assert_eq!(ind.nrows(), 3);
        assert_eq!(ind.row(2).to_string(), "0001");
    }
}
