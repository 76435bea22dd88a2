//! K-groups of Markov maps with the class of the unit, computed from the
//! integer matrices `I0`, `U0`, `A` and `B`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::circle::{CircleInterval, CirclePoint};
use crate::dynamics::{markov_check, markov_order, markov_violation, structure_report, MarkovStructure, Verdict};
use crate::error::{Error, Result};
use crate::intlin::{
    group_and_unit, induce_on_cokernel, kernel_basis, restrict_to_kernel, FGAbelianGroup, GroupAndUnit, IntMatrix,
    Subquotient,
};
use crate::lift::PLCircleMap;
use crate::valency::Valency;

/// Row/column labels of the K-theory matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedIndexSets {
    pub order: usize,
    /// `D(±)`, sorted by point then valency rank
    pub dpm: Vec<(CirclePoint, Valency)>,
    /// `I(±) = I × {(+,+), (−,−)}`, sorted by interval start then `(+,+)` first
    pub ipm: Vec<(CircleInterval, Valency)>,
}

impl SignedIndexSets {
    pub fn d_index(&self, d: &CirclePoint, v: Valency) -> Option<usize> {
        self.dpm.iter().position(|(x, w)| x == d && *w == v)
    }

    /// Row of `(I_j, v)`; `v` must be pure.
    pub fn i_index(interval: usize, v: Valency) -> usize {
        match v {
            Valency::PP => 2 * interval,
            Valency::MM => 2 * interval + 1,
            _ => panic!("I(±) only carries pure valencies"),
        }
    }
}

fn dpm_at(map: &PLCircleMap, s: &MarkovStructure, k: usize) -> Result<Vec<(CirclePoint, Valency)>> {
    let mut out = Vec::new();
    for d in &s.d {
        let vals: BTreeSet<u8> = map.preimages_iter(d, k)?.into_iter().map(|(_, v)| v.index_rank()).collect();
        for v in [Valency::MP, Valency::PM, Valency::PP, Valency::MM] {
            if vals.contains(&v.index_rank()) {
                out.push((d.clone(), v));
            }
        }
    }
    Ok(out)
}

/// `D(±)` by enumeration of `φ^{-k}(D)`, checked against order `k + 1`.
pub fn signed_index_sets(map: &PLCircleMap, s: &MarkovStructure, k: usize) -> Result<SignedIndexSets> {
    let dpm = dpm_at(map, s, k)?;
    if dpm_at(map, s, k + 1)? != dpm {
        return Err(Error::StabilityViolation { k, next: k + 1 });
    }
    let ipm = s
        .intervals
        .iter()
        .flat_map(|iv| [(iv.clone(), Valency::PP), (iv.clone(), Valency::MM)])
        .collect();
    Ok(SignedIndexSets { order: k, dpm, ipm })
}

fn pure_parts(v: Valency) -> &'static [Valency] {
    match v {
        Valency::PP => &[Valency::PP],
        Valency::MM => &[Valency::MM],
        Valency::MP => &[Valency::PP, Valency::MM],
        Valency::PM => &[],
    }
}

/// Rows `I(±)`, columns `D(±)`; column `(d,v)` is supported on the
/// component right of `d`.
pub fn matrix_i0(s: &MarkovStructure, sets: &SignedIndexSets) -> IntMatrix {
    let mut m = IntMatrix::zeros(sets.ipm.len(), sets.dpm.len());
    for (col, (d, v)) in sets.dpm.iter().enumerate() {
        let j = s.right_of(d);
        for &w in pure_parts(*v) {
            m[(SignedIndexSets::i_index(j, w), col)] += 1;
        }
    }
    m
}

/// Rows `I(±)`, columns `D(±)`; column `(d,v)` is supported on the
/// component left of `d`.
pub fn matrix_u0(s: &MarkovStructure, sets: &SignedIndexSets) -> IntMatrix {
    let mut m = IntMatrix::zeros(sets.ipm.len(), sets.dpm.len());
    for (col, (d, v)) in sets.dpm.iter().enumerate() {
        let j = s.left_of(d);
        let parts: &[Valency] = match v {
            Valency::PP => &[Valency::PP],
            Valency::MM => &[Valency::MM],
            Valency::PM => &[Valency::PP, Valency::MM],
            Valency::MP => &[],
        };
        for &w in parts {
            m[(SignedIndexSets::i_index(j, w), col)] += 1;
        }
    }
    m
}

/// Square matrix on `D(±)`.
pub fn matrix_a(map: &PLCircleMap, s: &MarkovStructure, sets: &SignedIndexSets) -> Result<IntMatrix> {
    let n = sets.dpm.len();
    let mut m = IntMatrix::zeros(n, n);
    let bump = |m: &mut IntMatrix, col: usize, x: CirclePoint, w: Valency| -> Result<()> {
        let row = sets
            .d_index(&x, w)
            .ok_or_else(|| Error::LabelOutsideIndex(format!("{x}, {w}")))?;
        m[(row, col)] += 1;
        Ok(())
    };
    for (col, (d, v)) in sets.dpm.iter().enumerate() {
        bump(&mut m, col, map.evaluate(d), map.valency(d))?;
        let right = &s.intervals[s.right_of(d)];
        for z in s.cuts.iter().filter(|z| right.contains(z)) {
            let w = map.valency(z);
            for &u in pure_parts(*v) {
                bump(&mut m, col, map.evaluate(z), w.compose(u))?;
            }
        }
    }
    Ok(m)
}

/// Which lap of each component feeds [`matrix_b`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LapPolicy {
    /// the lap starting at the left end of the component
    #[default]
    Leftmost,
    /// the lap ending at the right end of the component
    Rightmost,
}

/// Square matrix on `I(±)`: each `(J, v)` goes to `±(φ(J'), val(φ,J')•v)`
/// for one lap `J'` of `J`.
pub fn matrix_b(s: &MarkovStructure, sets: &SignedIndexSets, policy: LapPolicy) -> Result<IntMatrix> {
    let n = sets.ipm.len();
    let mut m = IntMatrix::zeros(n, n);
    for (j, iv) in s.intervals.iter().enumerate() {
        let lap = match policy {
            LapPolicy::Leftmost => s.laps.iter().find(|l| l.parent == j && l.arc.start() == iv.start()),
            LapPolicy::Rightmost => s.laps.iter().find(|l| l.parent == j && l.arc.end() == iv.end()),
        }
        .ok_or_else(|| Error::NoValidSubinterval(iv.to_string()))?;
        let (w, sign) = if lap.increasing {
            (Valency::PP, BigInt::one())
        } else {
            (Valency::MM, -BigInt::one())
        };
        for v in [Valency::PP, Valency::MM] {
            let row = SignedIndexSets::i_index(lap.target, w.compose(v));
            let col = SignedIndexSets::i_index(j, v);
            m[(row, col)] += &sign;
        }
    }
    Ok(m)
}

/// `m(d,v) = #{x ∈ φ^{-k}(d) : val(φ^k, x) = v}`, checked to lie in
/// `ker(I0 − U0)`.
pub fn unit_vector(map: &PLCircleMap, sets: &SignedIndexSets, i0_minus_u0: &IntMatrix) -> Result<Vec<BigInt>> {
    let mut out = vec![BigInt::zero(); sets.dpm.len()];
    let points: BTreeSet<CirclePoint> = sets.dpm.iter().map(|(d, _)| d.clone()).collect();
    for d in &points {
        for (_, v) in map.preimages_iter(d, sets.order)? {
            let i = sets
                .d_index(d, v)
                .ok_or_else(|| Error::LabelOutsideIndex(format!("{d}, {v}")))?;
            out[i] += 1;
        }
    }
    if i0_minus_u0.mul_vec(&out).iter().any(|x| !x.is_zero()) {
        let shown: Vec<String> = out.iter().map(ToString::to_string).collect();
        return Err(Error::UnitNotInKernel(format!("({})", shown.join(", "))));
    }
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct KTheoryOptions {
    /// use this order instead of the minimized one
    pub order: Option<usize>,
    pub policy: LapPolicy,
    /// run even when the map is not known to give a simple algebra
    pub force: bool,
}

#[derive(Clone, Debug)]
pub struct KTheoryResult {
    pub k0: FGAbelianGroup,
    pub k1: FGAbelianGroup,
    pub k0_extension_split: bool,
    /// coordinates of the unit in `coker(1 − Ã)`: free part, then torsion
    pub unit_class: Vec<BigInt>,
    pub order: usize,
    pub sets: SignedIndexSets,
    pub i0: IntMatrix,
    pub u0: IntMatrix,
    pub a: IntMatrix,
    pub b: IntMatrix,
    /// columns: basis of `ker(I0 − U0)`
    pub kernel_basis: IntMatrix,
    pub a_tilde: IntMatrix,
    /// in the coordinates of `coker(I0 − U0)`
    pub b_tilde: IntMatrix,
    pub coker_i0_u0: FGAbelianGroup,
    pub unit_vector: Vec<BigInt>,
    pub coker_one_minus_a: FGAbelianGroup,
    pub ker_one_minus_a: FGAbelianGroup,
    pub coker_one_minus_b: FGAbelianGroup,
    pub ker_one_minus_b: FGAbelianGroup,
    /// the `1 − Ã` computation, for coordinates of further classes
    pub a_side: GroupAndUnit,
}

/// Full pipeline from the map to the K-groups. Refuses non-Markov maps,
/// and maps not known to be simple unless `force` is set.
pub fn compute_ktheory(map: &PLCircleMap, options: &KTheoryOptions) -> Result<KTheoryResult> {
    let s = match markov_check(map)? {
        Some(s) => s,
        None => {
            let x = markov_violation(map).map(|x| x.to_string()).unwrap_or_default();
            return Err(Error::NotMarkov(x));
        }
    };
    let default_order = if options.force {
        None
    } else {
        let report = structure_report(map)?;
        if report.simple != Verdict::Yes {
            return Err(Error::NotSimple(format!(
                "simple = {}, exact = {}, transitive = {}",
                report.simple, report.exact, report.transitive
            )));
        }
        report.markov_order.map(|o| o.k)
    };
    let k = match (options.order, default_order) {
        (Some(k), _) | (None, Some(k)) => k,
        (None, None) => markov_order(map, &s, true)?.k,
    };
    assert!(k >= 1, "order must be positive");
    ktheory_at_order(map, &s, k, options.policy)
}

/// The pipeline at a fixed order `k` on a given partition.
pub fn ktheory_at_order(map: &PLCircleMap, s: &MarkovStructure, k: usize, policy: LapPolicy) -> Result<KTheoryResult> {
    let sets = signed_index_sets(map, s, k)?;
    let i0 = matrix_i0(s, &sets);
    let u0 = matrix_u0(s, &sets);
    let m = i0.sub(&u0);
    let kb = kernel_basis(&m);
    let unit = unit_vector(map, &sets, &m)?;

    let a = matrix_a(map, s, &sets)?;
    let a_tilde = restrict_to_kernel(&a, &kb)?;
    let b = matrix_b(s, &sets, policy)?;
    let (coker, b_tilde) = induce_on_cokernel(&b, &m)?;

    let n_d = sets.dpm.len();
    let n_i = sets.ipm.len();
    let a_side = group_and_unit(
        &Subquotient::new(kb.clone(), IntMatrix::zeros(n_d, 0))?,
        &IntMatrix::identity(n_d).sub(&a),
        &unit,
    )?;
    let b_side = group_and_unit(
        &Subquotient::new(IntMatrix::identity(n_i), m.clone())?,
        &IntMatrix::identity(n_i).sub(&b),
        &vec![BigInt::zero(); n_i],
    )?;

    let k1 = b_side.cokernel.direct_sum(&a_side.kernel);
    let k0 = a_side.cokernel.direct_sum(&b_side.kernel);
    Ok(KTheoryResult {
        k0,
        k1,
        k0_extension_split: b_side.kernel.is_free(),
        unit_class: a_side.element.clone(),
        order: k,
        i0,
        u0,
        a,
        b,
        kernel_basis: kb,
        a_tilde,
        b_tilde,
        coker_i0_u0: coker.group,
        unit_vector: unit,
        coker_one_minus_a: a_side.cokernel.clone(),
        ker_one_minus_a: a_side.kernel.clone(),
        coker_one_minus_b: b_side.cokernel.clone(),
        ker_one_minus_b: b_side.kernel.clone(),
        a_side,
        sets,
    })
}
