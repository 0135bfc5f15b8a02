use std::ops::{Add, Sub};

/// In-place unnormalised Walsh–Hadamard transform:
/// `out[b] = Σ_x in[x] · (−1)^{<b,x>}` over `F2^h`, `len = 2^h`.
///
/// Applying it twice multiplies by `2^h`.
pub fn wht<S>(a: &mut [S])
where
    S: Clone + Add<Output = S> + Sub<Output = S>,
{
    let n = a.len();
    assert!(n.is_power_of_two(), "transform length must be a power of two");
    let mut half = 1;
    while half < n {
        for block in (0..n).step_by(2 * half) {
            for i in block..block + half {
                let x = a[i].clone();
                let y = a[i + half].clone();
                a[i] = x.clone() + y.clone();
                a[i + half] = x - y;
            }
        }
        half *= 2;
    }
}
