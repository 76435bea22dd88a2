//! Brute-force cross-checks built along independent routes: iterated lifts
//! instead of orbit folding, explicit matrix-unit bookkeeping instead of the
//! closed-form column rules, and the closed-form family answers.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::circle::{components, CircleInterval, CirclePoint};
use crate::dynamics::MarkovStructure;
use crate::error::{Error, Result};
use crate::intlin::{FGAbelianGroup, IntMatrix};
use crate::lift::PLCircleMap;
use crate::valency::Valency;

/// The finite-dimensional algebras at level `k`, as summand labels and the
/// points or intervals indexing their matrix units.
#[derive(Clone, Debug)]
pub struct FiniteAlgebraModel {
    pub order: usize,
    /// `(d, v)` ↦ points `x ∈ φ^{-k}(d)` with `val(φ^k, x) = v`
    pub a_summands: BTreeMap<(CirclePoint, u8), Vec<CirclePoint>>,
    /// `(J, v)` ↦ components `I'` of `T \ φ^{-k}(D)` with `φ^k(I') = J`,
    /// `val(φ^k, I') = v`
    pub b_summands: BTreeMap<(usize, Valency), Vec<CircleInterval>>,
    /// every component of `T \ φ^{-k}(D)` with its label
    pub pieces: Vec<(CircleInterval, usize, Valency)>,
}

/// Builds the level-`k` model from the exact lift of `φ^k`.
pub fn finite_algebra_model(map: &PLCircleMap, s: &MarkovStructure, k: usize) -> Result<FiniteAlgebraModel> {
    let fk = map.iterate(k)?;
    let mut points = BTreeSet::new();
    let mut a_summands: BTreeMap<(CirclePoint, u8), Vec<CirclePoint>> = BTreeMap::new();
    for d in &s.d {
        for (x, v) in fk.preimages(d) {
            points.insert(x.clone());
            a_summands.entry((d.clone(), v.index_rank())).or_default().push(x);
        }
    }
    let cuts: Vec<CirclePoint> = points.into_iter().collect();
    let mut pieces = Vec::new();
    let mut b_summands: BTreeMap<(usize, Valency), Vec<CircleInterval>> = BTreeMap::new();
    for piece in components(&cuts) {
        let (a, b) = piece.lifted_bounds();
        let (fa, fb) = (fk.lift().eval_real(&a), fk.lift().eval_real(&b));
        let (image, v) = if fb > fa {
            (CircleInterval::with_length(CirclePoint::new(fa.clone()), &fb - &fa), Valency::PP)
        } else {
            (CircleInterval::with_length(CirclePoint::new(fb.clone()), &fa - &fb), Valency::MM)
        };
        let j = s
            .interval_index(&image)
            .ok_or_else(|| Error::BadPartition(format!("level-{k} piece {piece} maps onto {image}")))?;
        b_summands.entry((j, v)).or_default().push(piece.clone());
        pieces.push((piece, j, v));
    }
    Ok(FiniteAlgebraModel {
        order: k,
        a_summands,
        b_summands,
        pieces,
    })
}

fn valency_of_rank(r: u8) -> Valency {
    Valency::ALL.into_iter().find(|v| v.index_rank() == r).unwrap()
}

/// Matrices of the two unital embeddings on K₀, by literal evaluation at
/// every minimal projection `e_{x,x}`.
#[derive(Clone, Debug)]
pub struct OracleI0U0 {
    /// column labels, in index order
    pub labels: Vec<(CirclePoint, Valency)>,
    pub i0: IntMatrix,
    pub u0: IntMatrix,
    /// representatives whose column differs from the first one of their summand
    pub mismatches: Vec<String>,
}

pub fn oracle_i0_u0(map: &PLCircleMap, s: &MarkovStructure, k: usize) -> Result<OracleI0U0> {
    let model = finite_algebra_model(map, s, k)?;
    let rows = 2 * s.intervals.len();
    let row = |j: usize, v: Valency| 2 * j + usize::from(v == Valency::MM);

    // I_k: x < I with val (+,+), or I < x with val (−,−); U_k mirrored
    let column = |x: &CirclePoint, embed_i: bool| -> Vec<BigInt> {
        let mut col = vec![BigInt::zero(); rows];
        for (piece, j, v) in &model.pieces {
            let x_before = piece.start() == x;
            let x_after = piece.end() == *x;
            let hit = if embed_i {
                (x_before && *v == Valency::PP) || (x_after && *v == Valency::MM)
            } else {
                (x_after && *v == Valency::PP) || (x_before && *v == Valency::MM)
            };
            if hit {
                col[row(*j, *v)] += 1;
            }
        }
        col
    };

    let mut labels = Vec::new();
    let mut i_cols = Vec::new();
    let mut u_cols = Vec::new();
    let mut mismatches = Vec::new();
    for ((d, r), xs) in &model.a_summands {
        let v = valency_of_rank(*r);
        let ci = column(&xs[0], true);
        let cu = column(&xs[0], false);
        for x in &xs[1..] {
            if column(x, true) != ci || column(x, false) != cu {
                mismatches.push(format!("summand ({d}, {v}): representative {x} disagrees with {}", xs[0]));
            }
        }
        labels.push((d.clone(), v));
        i_cols.push(ci);
        u_cols.push(cu);
    }
    Ok(OracleI0U0 {
        labels,
        i0: IntMatrix::from_columns(rows, &i_cols),
        u0: IntMatrix::from_columns(rows, &u_cols),
        mismatches,
    })
}

/// `RO⁺(root)` truncated at `n, m ≤ bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedOrbit {
    pub root: CirclePoint,
    pub bound: usize,
    pub members: BTreeSet<CirclePoint>,
}

pub fn restricted_orbit(map: &PLCircleMap, root: &CirclePoint, bound: usize) -> Result<RestrictedOrbit> {
    let cap = map.limits().max_orbit;
    if bound > cap {
        return Err(Error::ResourceLimit {
            what: "restricted orbit depth",
            cap,
        });
    }
    let mut members = BTreeSet::new();
    let mut y = root.clone();
    for n in 0..=bound {
        let vn = map.valency_iterate(n, root);
        for m in 0..=bound {
            for (z, vz) in map.preimages_iter(&y, m)? {
                if vz == vn {
                    members.insert(z);
                }
            }
        }
        y = map.evaluate(&y);
    }
    Ok(RestrictedOrbit {
        root: root.clone(),
        bound,
        members,
    })
}

/// Closed-form K-groups of the tent family `φ_{m,k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectedFamily {
    pub k0: FGAbelianGroup,
    pub k1: FGAbelianGroup,
    /// `gcd(k, m − 1)`; zero on the `k = m − 1` branch
    pub g: BigInt,
}

/// Panics unless `m ≥ 2, k ≥ 2` or `m = k ≥ 1`.
pub fn expected_family_result(m: i64, k: i64) -> ExpectedFamily {
    assert!((m >= 2 && k >= 2) || (m == k && m >= 1), "outside the closed-form range");
    let mm = BigInt::from(m - 1);
    let kk = BigInt::from(k);
    if kk == mm {
        return ExpectedFamily {
            k0: FGAbelianGroup::from_factors(2, &[mm]),
            k1: FGAbelianGroup::free(2),
            g: BigInt::zero(),
        };
    }
    let g = kk.gcd(&mm);
    let t = (&kk * &kk - &mm * &mm).abs() / &g;
    ExpectedFamily {
        k0: FGAbelianGroup::from_factors(1, &[g.clone(), t]),
        k1: FGAbelianGroup::free(1),
        g,
    }
}

/// The mirrored family `φ_{−m,−k}` swaps the roles of `m` and `k`.
pub fn expected_conjugate_family_result(m: i64, k: i64) -> ExpectedFamily {
    expected_family_result(k, m)
}

/// Hand-derived isomorphism `coker(1 − Ã) → Z_g ⊕ Z_T` for `φ_{m,k}`,
/// `k ≠ m − 1`, on vectors `(z, z, u, v)` of `ker(I0 − U0)` written in
/// `D(±)` coordinates. Row operations reduce `1 − Ã` to
/// `diag(1, [[k, m−1],[m−1, k]])`; a Bézout pair `x·k/g + y·(m−1)/g = 1`
/// then diagonalizes the block.
pub fn family_unit_coordinates(m: i64, k: i64, w: &[BigInt]) -> (BigInt, BigInt) {
    assert_ne!(k, m - 1, "only the k != m - 1 branch has this form");
    assert_eq!(w.len(), 4);
    assert_eq!(w[0], w[1], "not in ker(I0 - U0)");
    let (mb, kb) = (BigInt::from(m - 1), BigInt::from(k));
    let c = BigInt::from(m + k - 2);
    let second = &c * &w[0] - &w[2];
    let third = &c * &w[0] - &w[3];
    let e = kb.extended_gcd(&mb);
    let g = e.gcd.clone();
    // x·k + y·(m−1) = g
    let (x, y) = (e.x, e.y);
    let t = (&kb * &kb - &mb * &mb).abs() / &g;
    let first = (&x * &second + &y * &third).mod_floor(&g);
    let last = (-(&mb / &g) * &second + (&kb / &g) * &third).mod_floor(&t);
    (first, last)
}

/// Closed-form coordinates of the unit under [`family_unit_coordinates`]:
/// `(−x mod g, (m−1)/g mod T)` with `x·k + y·(m−1) = g`. Also returns
/// `(g, T)`.
pub fn expected_family_unit(m: i64, k: i64) -> ((BigInt, BigInt), (BigInt, BigInt)) {
    assert_ne!(k, m - 1, "only the k != m - 1 branch has this form");
    let (kb, mb) = (BigInt::from(k), BigInt::from(m - 1));
    let e = kb.extended_gcd(&mb);
    let t = (&kb * &kb - &mb * &mb).abs() / &e.gcd;
    let coords = ((-e.x).mod_floor(&e.gcd), (&mb / &e.gcd).mod_floor(&t));
    (coords, (e.gcd, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{exceptional_fixed_points, markov_check};
    use crate::fixtures::phi;
    use crate::ktheory::{matrix_i0, matrix_u0, signed_index_sets};

    #[test]
    fn oracle_matches_rules_on_phi22() {
        let f = phi(2, 2);
        let s = markov_check(&f).unwrap().unwrap();
        let o = oracle_i0_u0(&f, &s, 1).unwrap();
        assert!(o.mismatches.is_empty());
        let sets = signed_index_sets(&f, &s, 1).unwrap();
        assert_eq!(o.labels, sets.dpm);
        assert_eq!(o.i0, matrix_i0(&s, &sets));
        assert_eq!(o.u0, matrix_u0(&s, &sets));
    }

    #[test]
    fn orbit_grows() {
        let f = phi(2, 2);
        let x = CirclePoint::from_ratio(1, 7);
        let sizes: Vec<usize> = (1..=3).map(|n| restricted_orbit(&f, &x, n).unwrap().members.len()).collect();
        assert!(sizes[0] < sizes[1] && sizes[1] < sizes[2], "{sizes:?}");
    }

    #[test]
    fn closed_forms() {
        assert_eq!(expected_family_result(3, 2).k0.to_string(), "Z^2 + Z/2");
        assert_eq!(expected_family_result(2, 3).k0.to_string(), "Z + Z/8");
        assert_eq!(expected_family_result(3, 3).k0.to_string(), "Z + Z/5");
        assert_eq!(expected_family_result(5, 3).k0.to_string(), "Z + Z/7");
        assert_eq!(expected_family_result(2, 2).k1.to_string(), "Z");
        assert_eq!(expected_conjugate_family_result(2, 3).k0.to_string(), "Z^2 + Z/2");
    }

    #[test]
    fn family_coordinates_kill_relations() {
        for (m, k) in [(2i64, 2i64), (2, 3), (3, 3), (5, 3), (4, 2)] {
            let c = m + k - 2;
            // columns of 1 − Ã in the basis (z,z,u,v) ↦ (z,u,v), embedded in D(±)
            let rows = [[-1, -1, -1], [-c, 2 - m, 1 - k], [-c, 1 - k, 2 - m]];
            for j in 0..3 {
                let w = [rows[0][j], rows[0][j], rows[1][j], rows[2][j]].map(BigInt::from);
                let (a, b) = family_unit_coordinates(m, k, &w);
                assert!(a.is_zero() && b.is_zero(), "({m},{k}) column {j}");
            }
        }
        let unit = [1, 1, 1, 1].map(BigInt::from);
        assert_eq!(family_unit_coordinates(2, 2, &unit), (BigInt::zero(), BigInt::from(1)));
    }

    #[test]
    fn exceptional_fixed_point_orbit_is_trivial() {
        // 0 is fixed; its only other preimage 1/3 is critical
        let f = PLCircleMap::from_ratios(&[(0, 1), (1, 3), (2, 3), (1, 1)], &[(0, 1), (1, 1), (1, 2), (1, 1)]).unwrap();
        let e = CirclePoint::zero();
        assert_eq!(exceptional_fixed_points(&f).unwrap(), vec![e.clone()]);
        for n in 0..=3 {
            assert_eq!(restricted_orbit(&f, &e, n).unwrap().members, BTreeSet::from([e.clone()]));
        }
    }
}
