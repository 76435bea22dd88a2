//! Markov partitions, incidence matrices and the structure verdicts that
//! follow from them.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::circle::{components, CircleInterval, CirclePoint, Rational};
use crate::error::{Error, Result};
use crate::intlin::IntMatrix;
use crate::lift::PLCircleMap;
use crate::valency::Valency;

/// A maximal open arc between consecutive points of `φ^{-1}(D)`; it maps
/// monotonically onto exactly one component of `T \ D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lap {
    pub arc: CircleInterval,
    /// component of `T \ D` containing the lap
    pub parent: usize,
    /// component of `T \ D` it maps onto
    pub target: usize,
    pub increasing: bool,
}

/// A forward-invariant finite set `D ⊇ φ(C₁)` together with the induced
/// partition data.
#[derive(Clone, Debug)]
pub struct MarkovStructure {
    pub d: Vec<CirclePoint>,
    pub intervals: Vec<CircleInterval>,
    /// sorted `φ^{-1}(D)`
    pub cuts: Vec<CirclePoint>,
    pub laps: Vec<Lap>,
    /// `incidence[I][J]` = number of laps of `J` mapping onto `I`
    pub incidence: IntMatrix,
    /// 0/1 matrix on states `(J, ±)` (index `2J` for `+`, `2J+1` for `−`),
    /// with an edge `(J,t) → (I,σt)` for each lap of `J` onto `I` of sign `σ`
    pub doubled_incidence: IntMatrix,
}

impl MarkovStructure {
    /// Builds the partition generated by `d`, which must contain `φ(C₁)`
    /// and be forward invariant.
    pub fn build(map: &PLCircleMap, d: Vec<CirclePoint>) -> Result<Self> {
        let d: Vec<CirclePoint> = d.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if d.is_empty() {
            return Err(Error::BadPartition("empty partition set".into()));
        }
        for x in &d {
            let y = map.evaluate(x);
            if d.binary_search(&y).is_err() {
                return Err(Error::BadPartition(format!("image {y} of {x} is not in D")));
            }
        }
        let intervals = components(&d);
        let mut cuts = BTreeSet::new();
        for x in &d {
            for (z, _) in map.preimages(x) {
                cuts.insert(z);
            }
        }
        let cuts: Vec<CirclePoint> = cuts.into_iter().collect();
        for (c, _) in map.critical_points() {
            if cuts.binary_search(c).is_err() {
                return Err(Error::BadPartition(format!("critical point {c} is not a cut point")));
            }
        }

        let n = intervals.len();
        let locate = |x: &CirclePoint| intervals.iter().position(|iv| iv.contains(x));
        let mut laps = Vec::new();
        let mut incidence = IntMatrix::zeros(n, n);
        let mut doubled = IntMatrix::zeros(2 * n, 2 * n);
        for arc in components(&cuts) {
            let (a, b) = arc.lifted_bounds();
            let (fa, fb) = (map.lift().eval_real(&a), map.lift().eval_real(&b));
            let increasing = fb > fa;
            let image = if increasing {
                CircleInterval::with_length(CirclePoint::new(fa.clone()), &fb - &fa)
            } else {
                CircleInterval::with_length(CirclePoint::new(fb.clone()), &fa - &fb)
            };
            let mid = arc.start().shifted(&(arc.length() / Rational::from_integer(BigInt::from(2))));
            let parent = locate(&mid).ok_or_else(|| Error::BadPartition(format!("lap {arc} meets D")))?;
            let target = intervals
                .iter()
                .position(|iv| *iv == image)
                .ok_or_else(|| Error::BadPartition(format!("lap {arc} maps onto {image}, not a component")))?;
            incidence[(target, parent)] += 1;
            for t in 0..2 {
                let s = if increasing { t } else { 1 - t };
                doubled[(2 * target + s, 2 * parent + t)] = BigInt::one();
            }
            laps.push(Lap {
                arc,
                parent,
                target,
                increasing,
            });
        }
        Ok(MarkovStructure {
            d,
            intervals,
            cuts,
            laps,
            incidence,
            doubled_incidence: doubled,
        })
    }

    /// Index of the component whose left endpoint is `x` (`I_x^+`).
    pub fn right_of(&self, x: &CirclePoint) -> usize {
        self.intervals.iter().position(|iv| iv.start() == x).expect("x ∈ D")
    }

    /// Index of the component whose right endpoint is `x` (`I_x^-`).
    pub fn left_of(&self, x: &CirclePoint) -> usize {
        self.intervals.iter().position(|iv| iv.end() == *x).expect("x ∈ D")
    }

    pub fn interval_index(&self, iv: &CircleInterval) -> Option<usize> {
        self.intervals.iter().position(|j| j == iv)
    }
}

/// Fails unless the map has critical points and its lift spans a full turn.
pub fn check_standing_assumptions(map: &PLCircleMap) -> Result<()> {
    let width = map.lift().range_width();
    if width < Rational::one() {
        return Err(Error::NotSurjective(width.to_string()));
    }
    if map.critical_points().is_empty() {
        return Err(Error::LocallyInjective);
    }
    Ok(())
}

/// `φ(C₁)`, sorted.
pub fn critical_values(map: &PLCircleMap) -> Vec<CirclePoint> {
    let set: BTreeSet<CirclePoint> = map.critical_points().iter().map(|(c, _)| map.evaluate(c)).collect();
    set.into_iter().collect()
}

/// The partition of `D = φ(C₁)` when `φ(C₁) ⊆ C₁`; `None` otherwise.
pub fn markov_check(map: &PLCircleMap) -> Result<Option<MarkovStructure>> {
    check_standing_assumptions(map)?;
    let d = critical_values(map);
    if d.iter().any(|x| !map.is_critical(x)) {
        return Ok(None);
    }
    MarkovStructure::build(map, d).map(Some)
}

/// The first critical value that is not a critical point, if any.
pub fn markov_violation(map: &PLCircleMap) -> Option<CirclePoint> {
    critical_values(map).into_iter().find(|x| !map.is_critical(x))
}

/// The forward orbit closure `⋃_{n≥1} φⁿ(C₁)` when it has at most
/// `limits.max_orbit` points.
pub fn post_critical_set(map: &PLCircleMap) -> Option<Vec<CirclePoint>> {
    let cap = map.limits().max_orbit;
    let mut seen: BTreeSet<CirclePoint> = BTreeSet::new();
    let mut queue: VecDeque<CirclePoint> = critical_values(map).into();
    while let Some(x) = queue.pop_front() {
        if seen.insert(x.clone()) {
            if seen.len() > cap {
                return None;
            }
            queue.push_back(map.evaluate(&x));
        }
    }
    Some(seen.into_iter().collect())
}

/// Partition generated by the finite post-critical set; equals the
/// [`markov_check`] partition for Markov maps.
pub fn post_critical_partition(map: &PLCircleMap) -> Result<Option<MarkovStructure>> {
    check_standing_assumptions(map)?;
    match post_critical_set(map) {
        Some(d) => MarkovStructure::build(map, d).map(Some),
        None => Ok(None),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixTests {
    pub irreducible: bool,
    pub primitive: bool,
    /// gcd of cycle lengths through vertex 0 (1 when there are none)
    pub period: usize,
}

fn bfs_levels(adj: &[Vec<usize>], root: usize) -> Vec<Option<usize>> {
    let mut level = vec![None; adj.len()];
    level[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if level[v].is_none() {
                level[v] = Some(level[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    level
}

/// Graph tests on a square nonnegative matrix, with an edge `j → i`
/// whenever `m[i][j] > 0`.
pub fn matrix_tests(m: &IntMatrix) -> MatrixTests {
    let n = m.rows();
    assert_eq!(n, m.cols(), "matrix_tests needs a square matrix");
    if n == 0 {
        return MatrixTests {
            irreducible: false,
            primitive: false,
            period: 1,
        };
    }
    let mut fwd = vec![Vec::new(); n];
    let mut bwd = vec![Vec::new(); n];
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if m[(i, j)].is_positive() {
                fwd[j].push(i);
                bwd[i].push(j);
                edges.push((j, i));
            }
        }
    }
    let level = bfs_levels(&fwd, 0);
    let back = bfs_levels(&bwd, 0);
    let irreducible = !edges.is_empty() && level.iter().all(Option::is_some) && back.iter().all(Option::is_some);
    let mut g = 0usize;
    for &(u, v) in &edges {
        if let (Some(lu), Some(lv), Some(_), Some(_)) = (level[u], level[v], back[u], back[v]) {
            let diff = (lu + 1).abs_diff(lv);
            g = g.gcd(&diff);
        }
    }
    let period = if g == 0 { 1 } else { g };
    MatrixTests {
        irreducible,
        primitive: irreducible && period == 1,
        period,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Undetermined,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The cycle of closed arcs permuted by a transitive map that is not
/// totally transitive: `φ(cycle[i]) = cycle[i+1 mod p]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalPeriod {
    pub p: usize,
    /// each entry is a union of closed arcs, listed as `(start, end)`
    pub cycle: Vec<Vec<(CirclePoint, CirclePoint)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicsVerdicts {
    pub transitive: Verdict,
    pub exact: Verdict,
    pub global_period: Option<GlobalPeriod>,
}

fn merge_into_arcs(structure: &MarkovStructure, members: &[usize]) -> Vec<(CirclePoint, CirclePoint)> {
    let n = structure.intervals.len();
    let inside: Vec<bool> = (0..n).map(|i| members.contains(&i)).collect();
    if inside.iter().all(|&b| b) {
        let p = structure.intervals[0].start().clone();
        return vec![(p.clone(), p)];
    }
    // start each run right after an interval outside the class
    let first_gap = (0..n).find(|&i| !inside[i]).unwrap();
    let mut arcs = Vec::new();
    let mut run: Option<(CirclePoint, CirclePoint)> = None;
    for step in 1..=n {
        let i = (first_gap + step) % n;
        let iv = &structure.intervals[i];
        if inside[i] {
            run = Some(match run {
                Some((s, _)) => (s, iv.end()),
                None => (iv.start().clone(), iv.end()),
            });
        } else if let Some(r) = run.take() {
            arcs.push(r);
        }
    }
    if let Some(r) = run {
        arcs.push(r);
    }
    arcs.sort();
    arcs
}

/// Dynamical verdicts read off the incidence matrix. Only expanding maps
/// get definite answers.
pub fn dynamics_verdicts(map: &PLCircleMap, structure: &MarkovStructure) -> DynamicsVerdicts {
    if !map.is_expanding() {
        return DynamicsVerdicts {
            transitive: Verdict::Undetermined,
            exact: Verdict::Undetermined,
            global_period: None,
        };
    }
    let t = matrix_tests(&structure.incidence);
    let global_period = (t.irreducible && t.period > 1).then(|| {
        let mut fwd = vec![Vec::new(); structure.intervals.len()];
        for lap in &structure.laps {
            fwd[lap.parent].push(lap.target);
        }
        let level = bfs_levels(&fwd, 0);
        let cycle = (0..t.period)
            .map(|c| {
                let members: Vec<usize> = (0..level.len()).filter(|&i| level[i].unwrap() % t.period == c).collect();
                merge_into_arcs(structure, &members)
            })
            .collect();
        GlobalPeriod { p: t.period, cycle }
    });
    DynamicsVerdicts {
        transitive: Verdict::from_bool(t.irreducible),
        exact: Verdict::from_bool(t.primitive),
        global_period,
    }
}

/// Fixed points `e`, not critical, with `φ^{-1}(e) \ C₁ = {e}`.
pub fn exceptional_fixed_points(map: &PLCircleMap) -> Result<Vec<CirclePoint>> {
    let mut out = Vec::new();
    for (e, v) in map.fixed_points()? {
        if v.is_critical() {
            continue;
        }
        let others_critical = map.preimages(&e).iter().all(|(z, u)| *z == e || u.is_critical());
        if others_critical {
            out.push(e);
        }
    }
    Ok(out)
}

/// The critical value all of whose preimages are critical, if any.
pub fn exceptional_critical_value(map: &PLCircleMap) -> Option<CirclePoint> {
    critical_values(map)
        .into_iter()
        .find(|z| map.preimages(z).iter().all(|(_, v)| v.is_critical()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MarkovOrder {
    /// the order used downstream (minimized or the bound)
    pub k: usize,
    /// least `N` with `φ^N(I) = T` for the image arc `I` of a doubling pair
    pub n: usize,
    /// `N + 2`, valid without further checks
    pub bound: usize,
}

/// Least `N` such that `φ^N` maps the image arc of the laps adjacent to the
/// first critical point onto the whole circle.
fn doubling_cover_time(map: &PLCircleMap, s: &MarkovStructure) -> Result<usize> {
    let (c, _) = map.critical_points().first().ok_or(Error::LocallyInjective)?;
    let right = s
        .laps
        .iter()
        .find(|l| l.arc.start() == c)
        .ok_or_else(|| Error::BadPartition(format!("no lap starts at {c}")))?;
    let left = s
        .laps
        .iter()
        .find(|l| l.arc.end() == *c)
        .ok_or_else(|| Error::BadPartition(format!("no lap ends at {c}")))?;
    if left.target != right.target {
        return Err(Error::BadPartition(format!("laps at {c} have different images")));
    }
    let n_int = s.intervals.len();
    let n_d = s.d.len();
    let d_index = |x: &CirclePoint| s.d.binary_search(x).expect("forward invariant D");
    let d_image: Vec<usize> = s.d.iter().map(|x| d_index(&map.evaluate(x))).collect();
    let mut inner: Vec<Vec<usize>> = vec![Vec::new(); n_int];
    for q in &s.cuts {
        if s.d.binary_search(q).is_err() {
            let j = s.intervals.iter().position(|iv| iv.contains(q)).unwrap();
            inner[j].push(d_index(&map.evaluate(q)));
        }
    }

    let mut ints = vec![false; n_int];
    let mut pts = vec![false; n_d];
    ints[left.target] = true;
    let cap = 4 * (n_int + n_d) + 8;
    for step in 0..=cap {
        if ints.iter().all(|&b| b) && pts.iter().all(|&b| b) {
            return Ok(step);
        }
        let mut next_ints = vec![false; n_int];
        let mut next_pts = vec![false; n_d];
        for lap in &s.laps {
            if ints[lap.parent] {
                next_ints[lap.target] = true;
            }
        }
        for j in 0..n_int {
            if ints[j] {
                for &p in &inner[j] {
                    next_pts[p] = true;
                }
            }
        }
        for p in 0..n_d {
            if pts[p] {
                next_pts[d_image[p]] = true;
            }
        }
        ints = next_ints;
        pts = next_pts;
    }
    Err(Error::BadPartition("doubling arc never covers the circle".into()))
}

/// States `(I, ±)` reachable in exactly `j` steps from `{(J,+)}`.
fn signed_reach(s: &MarkovStructure, j: usize) -> Vec<bool> {
    let n = s.doubled_incidence.rows();
    let mut cur: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
    for _ in 0..j {
        let mut next = vec![false; n];
        for src in 0..n {
            if cur[src] {
                for dst in 0..n {
                    if !s.doubled_incidence[(dst, src)].is_zero() {
                        next[dst] = true;
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

fn has_both_pure(pre: &[(CirclePoint, Valency)]) -> bool {
    pre.iter().any(|(_, v)| *v == Valency::PP) && pre.iter().any(|(_, v)| *v == Valency::MM)
}

/// Points of `D` that have a non-critical preimage.
fn d_points_in_image_of_regular(map: &PLCircleMap, s: &MarkovStructure) -> Vec<CirclePoint> {
    s.d.iter()
        .filter(|x| map.preimages(x).iter().any(|(_, v)| !v.is_critical()))
        .cloned()
        .collect()
}

/// Whether every `x ∈ φ(T \ C₁)` has `j`-fold preimages of both pure
/// valencies, using one reachability query per component.
fn condition_a_at(map: &PLCircleMap, s: &MarkovStructure, j: usize) -> Result<bool> {
    let reach = signed_reach(s, j);
    if (0..s.intervals.len()).any(|i| !(reach[2 * i] && reach[2 * i + 1])) {
        return Ok(false);
    }
    for x in d_points_in_image_of_regular(map, s) {
        if !has_both_pure(&map.preimages_iter(&x, j)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Condition a) at a single `j` checked by direct enumeration at one
/// interior point per component and at every relevant point of `D`.
pub fn verify_condition_a(map: &PLCircleMap, s: &MarkovStructure, j: usize) -> Result<bool> {
    let two = Rational::from_integer(BigInt::from(2));
    for iv in &s.intervals {
        let mid = iv.start().shifted(&(iv.length() / &two));
        if !has_both_pure(&map.preimages_iter(&mid, j)?) {
            return Ok(false);
        }
    }
    for x in d_points_in_image_of_regular(map, s) {
        if !has_both_pure(&map.preimages_iter(&x, j)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An order `k` for which condition a) holds at every `j ≥ k`.
pub fn markov_order(map: &PLCircleMap, s: &MarkovStructure, minimize: bool) -> Result<MarkovOrder> {
    let n = doubling_cover_time(map, s)?;
    let bound = n + 2;
    // fails when some point of D has only one pure valency among its
    // preimages, e.g. an exceptional fixed point
    if !condition_a_at(map, s, bound)? {
        return Err(Error::NotSimple(format!("condition a) fails at the cover bound j = {bound}")));
    }
    let mut k = bound;
    if minimize {
        while k > 1 && condition_a_at(map, s, k - 1)? {
            k -= 1;
        }
    }
    Ok(MarkovOrder { k, n, bound })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuotientForm {
    /// `C(T)`
    Circle,
    /// `C(T) ⊗ M_p`
    CircleTensorMatrices(usize),
    /// `C(T) ⊕ C(T)`
    TwoCircles,
}

impl fmt::Display for QuotientForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuotientForm::Circle => f.write_str("C(T)"),
            QuotientForm::CircleTensorMatrices(p) => write!(f, "C(T)⊗M_{p}"),
            QuotientForm::TwoCircles => f.write_str("C(T)⊕C(T)"),
        }
    }
}

/// Which finite invariant set generated the partition the verdicts use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionSource {
    /// `D = φ(C₁) ⊆ C₁`
    CriticalValues,
    /// `D` = forward orbit of `φ(C₁)`, which is finite but not inside `C₁`
    PostCriticalOrbit,
}

#[derive(Clone, Debug)]
pub struct StructureReport {
    pub degree: BigInt,
    pub critical_points: Vec<(CirclePoint, Valency)>,
    pub critical_values: Vec<CirclePoint>,
    pub expanding: bool,
    /// `φ(C₁) ⊆ C₁`
    pub markov: bool,
    pub partition_source: Option<PartitionSource>,
    pub partition: Option<MarkovStructure>,
    pub transitive: Verdict,
    pub exact: Verdict,
    pub global_period: Option<GlobalPeriod>,
    /// `None` when a segment is fixed pointwise
    pub exceptional_fixed_points: Option<Vec<CirclePoint>>,
    pub exceptional_critical_value: Option<CirclePoint>,
    pub simple: Verdict,
    pub quotient_form: Option<QuotientForm>,
    /// only for Markov maps with exact = yes
    pub markov_order: Option<MarkovOrder>,
    /// `(field, justification)` pairs
    pub provenance: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

/// All structural verdicts for `map`. Fails only when the map is not
/// surjective or has no critical points.
pub fn structure_report(map: &PLCircleMap) -> Result<StructureReport> {
    check_standing_assumptions(map)?;
    let mut provenance = Vec::new();
    let mut warnings = Vec::new();
    let mut prov = |field: &str, why: &str| provenance.push((field.to_string(), why.to_string()));

    let degree = map.degree().clone();
    let expanding = map.is_expanding();
    let strict = markov_check(map)?;
    let markov = strict.is_some();
    let (partition, partition_source) = match strict {
        Some(s) => (Some(s), Some(PartitionSource::CriticalValues)),
        None => match post_critical_partition(map)? {
            Some(s) => (Some(s), Some(PartitionSource::PostCriticalOrbit)),
            None => (None, None),
        },
    };
    if markov {
        prov("markov", "every critical value is a critical point");
    } else if let Some(x) = markov_violation(map) {
        prov("markov", &format!("critical value {x} is not a critical point"));
    }

    let verdicts = match &partition {
        Some(s) => dynamics_verdicts(map, s),
        None => DynamicsVerdicts {
            transitive: Verdict::Undetermined,
            exact: Verdict::Undetermined,
            global_period: None,
        },
    };
    match (&partition, expanding) {
        (None, _) => {
            warnings.push("post-critical orbit is not finite within the search cap; dynamics undetermined".into());
            prov("transitive", "no finite invariant partition found");
        }
        (Some(_), false) => {
            warnings.push("map is not expanding (some |slope| <= 1); dynamics undetermined".into());
            prov("transitive", "incidence criteria need |slope| > 1 everywhere");
        }
        (Some(_), true) => {
            let src = match partition_source {
                Some(PartitionSource::PostCriticalOrbit) => "post-critical partition",
                _ => "critical-value partition",
            };
            prov("transitive", &format!("incidence matrix of the {src} is irreducible iff transitive (expanding map)"));
            prov("exact", &format!("incidence matrix of the {src} is primitive iff exact (expanding map)"));
            if verdicts.global_period.is_some() {
                prov(
                    "global_period",
                    "cyclic classes of the irreducible incidence graph are permuted by the map",
                );
            }
        }
    }

    let efp = match exceptional_fixed_points(map) {
        Ok(v) => Some(v),
        Err(Error::DegeneratePiece { index }) => {
            warnings.push(format!("segment {index} is fixed pointwise; exceptional fixed points undetermined"));
            None
        }
        Err(e) => return Err(e),
    };
    let ecv = exceptional_critical_value(map);

    let simple = match (verdicts.transitive, verdicts.exact, &efp) {
        (_, Verdict::Yes, Some(v)) if v.is_empty() => {
            prov("simple", "exact with no exceptional fixed point");
            Verdict::Yes
        }
        (_, Verdict::Yes, Some(_)) => {
            prov("simple", "an exceptional fixed point is a closed invariant orbit of the groupoid");
            Verdict::No
        }
        (_, Verdict::No, _) => {
            prov("simple", "simplicity requires exactness");
            Verdict::No
        }
        (Verdict::No, _, _) => {
            prov("simple", "simplicity requires transitivity");
            Verdict::No
        }
        _ => {
            prov("simple", "exactness or exceptional fixed points undetermined");
            Verdict::Undetermined
        }
    };

    let one = BigInt::one();
    let quotient_form = if verdicts.transitive == Verdict::Yes && simple == Verdict::No {
        let q = if verdicts.exact == Verdict::Yes {
            let has_efp = efp.as_ref().is_some_and(|v| !v.is_empty());
            (degree.abs() == one && has_efp).then_some(QuotientForm::Circle)
        } else if degree == one {
            let p = verdicts.global_period.as_ref().map_or(1, |g| g.p);
            Some(QuotientForm::CircleTensorMatrices(p))
        } else if degree == -one.clone() {
            Some(QuotientForm::TwoCircles)
        } else if degree.is_zero() {
            Some(QuotientForm::CircleTensorMatrices(2))
        } else {
            None
        };
        if let Some(q) = q {
            let why = match q {
                QuotientForm::Circle => "quotient by the ideal of the exceptional fixed point orbit, degree ±1",
                QuotientForm::CircleTensorMatrices(_) if degree.is_zero() => {
                    "degree 0, transitive but not totally transitive: arcs exchanged in a 2-cycle"
                }
                QuotientForm::CircleTensorMatrices(_) => "degree 1, transitive but not totally transitive: p arcs permuted cyclically",
                QuotientForm::TwoCircles => "degree -1, transitive but not totally transitive: two arcs exchanged",
            };
            prov("quotient_form", why);
        }
        q
    } else {
        None
    };

    let markov_order = match (&partition, partition_source, verdicts.exact) {
        (Some(s), Some(PartitionSource::CriticalValues), Verdict::Yes) => {
            prov("markov_order", "least k with both pure valencies among j-fold preimages for all j >= k");
            match markov_order(map, s, true) {
                Ok(o) => Some(o),
                Err(Error::NotSimple(why)) => {
                    warnings.push(format!("no Markov order: {why}"));
                    None
                }
                Err(e) => return Err(e),
            }
        }
        _ => None,
    };

    Ok(StructureReport {
        degree,
        critical_points: map.critical_points().to_vec(),
        critical_values: critical_values(map),
        expanding,
        markov,
        partition_source,
        partition,
        transitive: verdicts.transitive,
        exact: verdicts.exact,
        global_period: verdicts.global_period,
        exceptional_fixed_points: efp,
        exceptional_critical_value: ecv,
        simple,
        quotient_form,
        markov_order,
        provenance,
        warnings,
    })
}
