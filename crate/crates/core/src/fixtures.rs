//! Ready-made maps used by tests, the oracle and the command line.

use crate::lift::PLCircleMap;

/// The two-piece tent family `0 ↦ 0, 1/2 ↦ m, 1 ↦ m − k`.
///
/// Panics if `m` or `k` is not positive.
pub fn phi(m: i64, k: i64) -> PLCircleMap {
    assert!(m > 0 && k > 0, "phi needs m, k > 0");
    PLCircleMap::from_ratios(&[(0, 1), (1, 2), (1, 1)], &[(0, 1), (m, 1), (m - k, 1)]).expect("valid lift")
}

/// The mirrored family `0 ↦ 0, 1/2 ↦ −m, 1 ↦ k − m`.
pub fn phi_neg(m: i64, k: i64) -> PLCircleMap {
    assert!(m > 0 && k > 0, "phi_neg needs m, k > 0");
    PLCircleMap::from_ratios(&[(0, 1), (1, 2), (1, 1)], &[(0, 1), (-m, 1), (k - m, 1)]).expect("valid lift")
}

/// Degree −1, slopes ±3, transitive with period 2.
pub fn flip_period_two() -> PLCircleMap {
    PLCircleMap::from_ratios(
        &[(0, 1), (1, 6), (1, 3), (1, 2), (2, 3), (5, 6), (1, 1)],
        &[(0, 1), (-1, 2), (0, 1), (-1, 2), (-1, 1), (-1, 2), (-1, 1)],
    )
    .expect("valid lift")
}

/// Degree 1, slopes ±3, transitive with period 2.
pub fn rotation_period_two() -> PLCircleMap {
    PLCircleMap::from_ratios(
        &[(0, 1), (1, 6), (1, 3), (1, 2), (2, 3), (5, 6), (1, 1)],
        &[(1, 2), (1, 1), (1, 2), (1, 1), (3, 2), (1, 1), (3, 2)],
    )
    .expect("valid lift")
}

/// Degree 0, slopes ±2, transitive with period 2.
pub fn fold_period_two() -> PLCircleMap {
    PLCircleMap::from_ratios(
        &[(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)],
        &[(0, 1), (-1, 2), (0, 1), (1, 2), (0, 1)],
    )
    .expect("valid lift")
}

/// Degree 1, exact, with the exceptional fixed point 0: its other
/// preimages 1/4 and 3/4 are both critical.
pub fn exact_with_exceptional_fixed_point() -> PLCircleMap {
    PLCircleMap::from_ratios(
        &[(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)],
        &[(0, 1), (1, 1), (1, 2), (0, 1), (1, 1)],
    )
    .expect("valid lift")
}

/// Degree 1, slopes ±3, transitive with period 3: each third of the circle
/// zigzags three times across the next third.
pub fn rotation_period_three() -> PLCircleMap {
    let bps: Vec<(i64, i64)> = (0..=9).map(|i| (i, 9)).collect();
    PLCircleMap::from_ratios(
        &bps,
        &[(1, 3), (2, 3), (1, 3), (2, 3), (1, 1), (2, 3), (1, 1), (4, 3), (1, 1), (4, 3)],
    )
    .expect("valid lift")
}
