//! Bounded search over `F_p`-spans of matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::FpMatrix;
use crate::{Caps, Decided};

/// `p^n` if it fits in a `u64`.
pub fn span_size(p: u64, n: usize) -> Option<u64> {
    p.checked_pow(n as u32)
}

pub fn linear_combination(p: u64, basis: &[FpMatrix], coeffs: &[u64], rows: usize, cols: usize) -> FpMatrix {
    let mut acc = FpMatrix::zeros(p, rows, cols);
    for (b, &c) in basis.iter().zip(coeffs) {
        if c != 0 {
            acc = acc.add(&b.scale(c));
        }
    }
    acc
}

fn coeffs_at(p: u64, n: usize, mut idx: u64) -> Vec<u64> {
    (0..n)
        .map(|_| {
            let c = idx % p;
            idx /= p;
            c
        })
        .collect()
}

/// Every element of the span, first coefficient least significant; `None` above `cap`.
pub fn enumerate_span(p: u64, basis: &[FpMatrix], rows: usize, cols: usize, cap: u64) -> Option<Vec<FpMatrix>> {
    let total = span_size(p, basis.len()).filter(|&t| t <= cap)?;
    Some((0..total).map(|i| linear_combination(p, basis, &coeffs_at(p, basis.len(), i), rows, cols)).collect())
}

/// First element of the span satisfying `pred`.
///
/// Exhaustive in enumeration order when the span has at most `caps.exhaustive` elements;
/// otherwise `caps.samples` seeded random draws, reporting `Undecided` on failure.
pub fn find_in_span(
    p: u64,
    basis: &[FpMatrix],
    rows: usize,
    cols: usize,
    caps: &Caps,
    mut pred: impl FnMut(&FpMatrix) -> bool,
) -> Decided<FpMatrix> {
    match span_size(p, basis.len()).filter(|&t| t <= caps.exhaustive) {
        Some(total) => {
            for i in 0..total {
                let m = linear_combination(p, basis, &coeffs_at(p, basis.len(), i), rows, cols);
                if pred(&m) {
                    return Decided::Found(m);
                }
            }
            Decided::Absent
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(caps.seed);
            for _ in 0..caps.samples {
                let coeffs: Vec<u64> = (0..basis.len()).map(|_| rng.gen_range(0..p)).collect();
                let m = linear_combination(p, basis, &coeffs, rows, cols);
                if pred(&m) {
                    return Decided::Found(m);
                }
            }
            Decided::Undecided(format!(
                "span of dimension {} over F_{} exceeds the exhaustive cap; {} samples tried",
                basis.len(),
                p,
                caps.samples
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_finds_first() {
        let basis = vec![FpMatrix::identity(3, 2)];
        let caps = Caps::default();
        let found = find_in_span(3, &basis, 2, 2, &caps, |m| m.get(0, 0) == 2).found().unwrap();
        assert_eq!(found, FpMatrix::identity(3, 2).scale(2));
        assert_eq!(find_in_span(3, &basis, 2, 2, &caps, |m| m.get(0, 1) == 1), Decided::Absent);
    }

    #[test]
    fn sampling_is_undecided_when_nothing_matches() {
        let basis: Vec<FpMatrix> = (0..20).map(|_| FpMatrix::identity(2, 1)).collect();
        let caps = Caps { samples: 10, ..Caps::default() };
        assert!(find_in_span(2, &basis, 1, 1, &caps, |_| false).is_undecided());
    }
}
