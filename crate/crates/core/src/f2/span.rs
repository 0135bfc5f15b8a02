use std::collections::{HashSet, VecDeque};

use super::bitvec::{mask, BitVec};
use super::matrix::BitMatrix;
use crate::error::{Error, Result};

/// Largest group dimension `h` for which `F2^h` is enumerated explicitly.
pub const MAX_GROUP_DIM: usize = 24;

/// Marker for vertices not reached by [`cayley_bfs`].
pub const UNREACHED: u32 = u32::MAX;

pub(crate) fn check_group_dim(h: usize) -> Result<()> {
    if h > MAX_GROUP_DIM {
        Err(Error::TooLarge(format!("group dimension {h} > {MAX_GROUP_DIM}")))
    } else {
        Ok(())
    }
}

/// Breadth-first distances from 0 in `Cay(F2^h, gens)`.
///
/// Unreachable vertices hold [`UNREACHED`]. Zero generators are ignored.
pub fn cayley_bfs(gens: &[u64], h: usize) -> Vec<u32> {
    cayley_bfs_bounded(gens, h, None, u32::MAX)
}

fn cayley_bfs_bounded(gens: &[u64], h: usize, target: Option<u64>, max_depth: u32) -> Vec<u32> {
    assert!(h <= MAX_GROUP_DIM);
    let size = 1usize << h;
    let mut uniq: Vec<u64> = gens.iter().copied().filter(|&g| g != 0).collect();
    uniq.sort_unstable();
    uniq.dedup();
    let mut dist = vec![UNREACHED; size];
    dist[0] = 0;
    let mut queue = VecDeque::from([0u64]);
    while let Some(x) = queue.pop_front() {
        let dx = dist[x as usize];
        if Some(x) == target || dx >= max_depth {
            if Some(x) == target {
                break;
            }
            continue;
        }
        for &g in &uniq {
            let y = (x ^ g) as usize;
            if dist[y] == UNREACHED {
                dist[y] = dx + 1;
                queue.push_back(y as u64);
            }
        }
    }
    dist
}

/// Images of `vs` under the projection onto the pivot coordinates of their
/// row space. The projection is injective on the span, so linear relations
/// among the images are exactly those among the inputs.
fn project_to_span(vs: &[BitVec]) -> Result<(Vec<u64>, usize)> {
    let n = vs[0].len();
    let m = BitMatrix::new(vs.to_vec(), n)?;
    let pivots = m.echelon().pivots;
    let r = pivots.len();
    if r > 64 {
        return Ok((Vec::new(), r));
    }
    let proj = vs
        .iter()
        .map(|v| {
            pivots
                .iter()
                .enumerate()
                .filter(|(_, &p)| v.get(p))
                .fold(0u64, |acc, (j, _)| acc | (1 << j))
        })
        .collect();
    Ok((proj, r))
}

/// Size of the smallest linearly dependent sub-multiset of `vs`, i.e. the
/// largest `d` such that `vs` is `d`-wise independent. Returns
/// `vs.len() + 1` when the whole list is independent.
pub fn independence_width(vs: &[BitVec]) -> Result<usize> {
    assert!(!vs.is_empty(), "independence_width of an empty list");
    if vs.iter().any(BitVec::is_zero) {
        return Ok(1);
    }
    let n = vs.len();
    let (proj, r) = project_to_span(vs)?;
    if r == n {
        return Ok(n + 1);
    }
    if r > MAX_GROUP_DIM {
        return Err(Error::TooLarge(format!("span dimension {r}")));
    }
    let mut seen = HashSet::new();
    if !proj.iter().all(|p| seen.insert(*p)) {
        return Ok(2);
    }
    // Any r + 1 vectors in an r-dimensional space are dependent.
    let mut best = r + 1;
    for i in 0..n {
        if best == 3 {
            break;
        }
        let others: Vec<u64> = proj
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &p)| p)
            .collect();
        // A shortest path never reuses a generator, so it is a set.
        let dist = cayley_bfs_bounded(&others, r, Some(proj[i]), (best - 2) as u32);
        let d = dist[proj[i] as usize];
        if d != UNREACHED && (d as usize) + 1 < best {
            best = d as usize + 1;
        }
    }
    Ok(best)
}

/// Minimum number of generators (with multiplicity) summing to `target`.
pub fn rank_wrt(target: &BitVec, gens: &[BitVec]) -> Result<usize> {
    assert!(!gens.is_empty(), "rank_wrt needs generators");
    let h = target.len();
    for g in gens {
        if g.len() != h {
            return Err(Error::DimensionMismatch {
                expected: h,
                got: g.len(),
            });
        }
    }
    check_group_dim(h)?;
    let t = target.to_u64().expect("h <= 24");
    let packed: Vec<u64> = gens.iter().map(|g| g.to_u64().expect("h <= 24")).collect();
    let dist = cayley_bfs_bounded(&packed, h, Some(t), u32::MAX);
    match dist[t as usize] {
        UNREACHED => Err(Error::NotInSpan),
        d => Ok(d as usize),
    }
}

/// Dimension of the span of packed group elements.
pub fn span_dim(vs: &[u64], h: usize) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &v in vs {
        let mut x = v & mask(h);
        for &b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}
