//! The standard zoo of small codes with their canonical testers, plus seeded
//! random testers for property checks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codes::{zoo, LinearCode};
use crate::error::{Error, Result};
use crate::f2::{check_group_dim, BitVec};
use crate::scalar::Scalar;
use crate::tester::Tester;

/// Named codes, in a fixed order.
pub fn codes() -> Vec<(&'static str, Arc<LinearCode>)> {
    [
        ("rep31", zoo::repetition(3)),
        ("rep41", zoo::rep4()),
        ("rep51", zoo::repetition(5)),
        ("par43", zoo::parity(4)),
        ("par65", zoo::parity(6)),
        ("hamming74", zoo::hamming74()),
        ("ham84", zoo::extended_hamming84()),
        ("rm13", zoo::reed_muller(1, 3)),
        ("rm14", zoo::reed_muller(1, 4)),
        ("rm24", zoo::reed_muller(2, 4)),
        ("rand94", zoo::random(9, 4, 1)),
        ("rand105", zoo::random(10, 5, 2)),
        ("rand126", zoo::random(12, 6, 3)),
    ]
    .into_iter()
    .map(|(name, c)| (name, Arc::new(c)))
    .collect()
}

/// Nonzero dual codewords, in coordinate order.
fn dual_words(code: &LinearCode) -> Result<Vec<BitVec>> {
    check_group_dim(code.h())?;
    if code.h() == 0 {
        return Err(Error::NoValidTester);
    }
    Ok((1..1u64 << code.h()).map(|a| code.dual_word(a)).collect())
}

/// Uniform over the minimum-weight nonzero dual words.
pub fn min_weight_tester<S: Scalar>(code: &Arc<LinearCode>) -> Result<Tester<S>> {
    let words = dual_words(code)?;
    let w = words.iter().map(BitVec::weight).min().expect("h >= 1");
    Tester::uniform(code.clone(), words.into_iter().filter(|v| v.weight() == w).collect())
}

/// Uniform over all nonzero dual words.
pub fn all_nonzero_tester<S: Scalar>(code: &Arc<LinearCode>) -> Result<Tester<S>> {
    Tester::uniform(code.clone(), dual_words(code)?)
}

/// `minwt`, `all`, and the diluted variants `minwt-half` and `all-eighth`.
pub fn canonical_testers<S: Scalar>(code: &Arc<LinearCode>) -> Result<Vec<(&'static str, Tester<S>)>> {
    let minwt = min_weight_tester(code)?;
    let all = all_nonzero_tester(code)?;
    let half = minwt.diluted(S::from_ratio(1, 2))?;
    let eighth = all.diluted(S::from_ratio(1, 8))?;
    Ok(vec![("minwt", minwt), ("all", all), ("minwt-half", half), ("all-eighth", eighth)])
}

/// Up to six dual words with integer weights 1 to 5, normalised.
pub fn random_tester<S: Scalar>(code: &Arc<LinearCode>, seed: u64) -> Result<Tester<S>> {
    let h = code.h();
    check_group_dim(h)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = rng.random_range(1..=6usize);
    let picks: Vec<(u64, u64)> = (0..size)
        .map(|_| (rng.random_range(0..1u64 << h), rng.random_range(1..=5u64)))
        .collect();
    let total: u64 = picks.iter().map(|(_, w)| w).sum();
    let masses = picks
        .into_iter()
        .map(|(a, w)| (a, S::from_ratio(w as i64, total)))
        .collect();
    Tester::from_coords(code.clone(), masses)
}
