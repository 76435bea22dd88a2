//! Piecewise-linear lifts and the circle maps they define.
//!
//! A lift is a continuous piecewise-linear `f : [0,1] → R` with rational
//! breakpoints `0 = c₀ < … < c_N = 1`, `f(0) ∈ [0,1)` and integer
//! `f(1) − f(0)`. It defines `φ(e^{2πit}) = e^{2πif(t)}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::circle::{ceil, floor, CirclePoint, Rational};
use crate::error::{Error, LiftError, Result};
use crate::valency::Valency;

/// Size caps for the operations whose output grows exponentially.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// breakpoints of an iterated or composed lift
    pub max_breakpoints: usize,
    /// points in one iterated preimage set `φ^{-j}(x)`
    pub max_preimages: usize,
    /// length of a forward orbit search
    pub max_orbit: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_breakpoints: 1_000_000,
            max_preimages: 1_000_000,
            max_orbit: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLLift {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
}

impl PLLift {
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Rational>) -> std::result::Result<Self, LiftError> {
        let n = breakpoints.len();
        if n < 2 {
            return Err(LiftError::TooFewBreakpoints(n));
        }
        if values.len() != n {
            return Err(LiftError::LengthMismatch {
                breakpoints: n,
                values: values.len(),
            });
        }
        if !breakpoints[0].is_zero() {
            return Err(LiftError::FirstBreakpoint(breakpoints[0].to_string()));
        }
        if !breakpoints[n - 1].is_one() {
            return Err(LiftError::LastBreakpoint(breakpoints[n - 1].to_string()));
        }
        for i in 1..n {
            if breakpoints[i] <= breakpoints[i - 1] {
                return Err(LiftError::Unsorted {
                    index: i,
                    prev: breakpoints[i - 1].to_string(),
                    next: breakpoints[i].to_string(),
                });
            }
        }
        if values[0].is_negative() || values[0] >= Rational::one() {
            return Err(LiftError::StartOutOfRange(values[0].to_string()));
        }
        let rise = &values[n - 1] - &values[0];
        if !rise.is_integer() {
            return Err(LiftError::NonIntegerDegree(rise.to_string()));
        }
        for i in 1..n {
            if values[i] == values[i - 1] {
                return Err(LiftError::ZeroSlope {
                    index: i - 1,
                    from: breakpoints[i - 1].to_string(),
                    to: breakpoints[i].to_string(),
                });
            }
        }
        Ok(PLLift { breakpoints, values })
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn segment_count(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn degree(&self) -> BigInt {
        (&self.values[self.values.len() - 1] - &self.values[0]).to_integer()
    }

    /// Slope of segment `i`, i.e. on `[c_i, c_{i+1}]`.
    pub fn slope(&self, i: usize) -> Rational {
        (&self.values[i + 1] - &self.values[i]) / (&self.breakpoints[i + 1] - &self.breakpoints[i])
    }

    /// Index of the segment whose half-open span `[c_i, c_{i+1})` holds `t`;
    /// `t = 1` maps to the last segment.
    fn segment_of(&self, t: &Rational) -> usize {
        let n = self.segment_count();
        match self.breakpoints.binary_search(t) {
            Ok(i) => i.min(n - 1),
            Err(i) => i - 1,
        }
    }

    /// `f(t)` for `t ∈ [0,1]`.
    pub fn eval(&self, t: &Rational) -> Rational {
        let i = self.segment_of(t);
        &self.values[i] + self.slope(i) * (t - &self.breakpoints[i])
    }

    /// The extension `F(t + n) = f(t) + n·deg` of the lift to all of `R`.
    pub fn eval_real(&self, t: &Rational) -> Rational {
        let n = floor(t);
        let r = t - Rational::from_integer(n.clone());
        self.eval(&r) + Rational::from_integer(n * self.degree())
    }

    /// `max f − min f`; the map is onto the circle iff this is at least 1.
    pub fn range_width(&self) -> Rational {
        let max = self.values.iter().max().unwrap();
        let min = self.values.iter().min().unwrap();
        max - min
    }

    /// Lift of `outer ∘ inner`, refined by the preimages of `outer`'s
    /// breakpoints. Fails once the refinement exceeds `cap` breakpoints.
    pub fn compose(outer: &PLLift, inner: &PLLift, cap: usize) -> Result<PLLift> {
        let outer_cuts = &outer.breakpoints[..outer.breakpoints.len() - 1];
        let outer_deg = outer.degree();
        let outer_at = |j: usize, n: &BigInt| -> Rational {
            &outer.values[j] + Rational::from_integer(n * &outer_deg)
        };

        let mut bps = vec![inner.breakpoints[0].clone()];
        let mut vals = vec![outer.eval_real(&inner.values[0])];
        for i in 0..inner.segment_count() {
            let a = &inner.values[i];
            let b = &inner.values[i + 1];
            let c0 = &inner.breakpoints[i];
            let slope = inner.slope(i);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let mut hits: Vec<(Rational, Rational)> = Vec::new();
            let mut n = floor(lo);
            let n_hi = ceil(hi);
            while n <= n_hi {
                for (j, e) in outer_cuts.iter().enumerate() {
                    let s = e + Rational::from_integer(n.clone());
                    if &s > lo && &s < hi {
                        let t = c0 + (&s - a) / &slope;
                        hits.push((t, outer_at(j, &n)));
                    }
                }
                n += 1;
            }
            hits.sort_by(|x, y| x.0.cmp(&y.0));
            for (t, v) in hits {
                bps.push(t);
                vals.push(v);
            }
            bps.push(inner.breakpoints[i + 1].clone());
            vals.push(outer.eval_real(b));
            if bps.len() > cap {
                return Err(Error::ResourceLimit {
                    what: "lift breakpoints",
                    cap,
                });
            }
        }
        let shift = Rational::from_integer(floor(&vals[0]));
        for v in vals.iter_mut() {
            *v -= &shift;
        }
        Ok(PLLift::new(bps, vals)?)
    }
}

/// A circle map given by an exact piecewise-linear lift.
#[derive(Clone, Debug)]
pub struct PLCircleMap {
    lift: PLLift,
    degree: BigInt,
    critical: Vec<(CirclePoint, Valency)>,
    limits: Limits,
}

impl PartialEq for PLCircleMap {
    fn eq(&self, other: &Self) -> bool {
        self.lift == other.lift
    }
}

impl PLCircleMap {
    pub fn new(lift: PLLift) -> Self {
        let degree = lift.degree();
        let mut map = PLCircleMap {
            lift,
            degree,
            critical: Vec::new(),
            limits: Limits::default(),
        };
        let n = map.lift.segment_count();
        map.critical = (0..n)
            .filter_map(|i| {
                let x = CirclePoint::new(map.lift.breakpoints[i].clone());
                let v = map.valency(&x);
                v.is_critical().then_some((x, v))
            })
            .collect();
        map
    }

    /// Builds the map from machine-integer `(num, den)` pairs; convenient for
    /// fixtures.
    pub fn from_ratios(breakpoints: &[(i64, i64)], values: &[(i64, i64)]) -> std::result::Result<Self, LiftError> {
        let conv = |xs: &[(i64, i64)]| -> Vec<Rational> {
            xs.iter().map(|&(p, q)| crate::circle::rat(p, q)).collect()
        };
        Ok(PLCircleMap::new(PLLift::new(conv(breakpoints), conv(values))?))
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn lift(&self) -> &PLLift {
        &self.lift
    }

    pub fn degree(&self) -> &BigInt {
        &self.degree
    }

    /// The critical set `C₁` in increasing order, with valencies.
    pub fn critical_points(&self) -> &[(CirclePoint, Valency)] {
        &self.critical
    }

    pub fn is_critical(&self, x: &CirclePoint) -> bool {
        self.critical.binary_search_by(|(c, _)| c.cmp(x)).is_ok()
    }

    /// All slopes have absolute value `> 1`.
    pub fn is_expanding(&self) -> bool {
        (0..self.lift.segment_count()).all(|i| self.lift.slope(i).abs() > Rational::one())
    }

    pub fn evaluate(&self, x: &CirclePoint) -> CirclePoint {
        CirclePoint::new(self.lift.eval(x.t()))
    }

    /// `φⁿ(x)`.
    pub fn evaluate_n(&self, n: usize, x: &CirclePoint) -> CirclePoint {
        (0..n).fold(x.clone(), |y, _| self.evaluate(&y))
    }

    pub fn valency(&self, x: &CirclePoint) -> Valency {
        let lift = &self.lift;
        let n = lift.segment_count();
        let t = x.t();
        let (left, right) = match lift.breakpoints[..n].binary_search(t) {
            Ok(0) => (lift.slope(n - 1), lift.slope(0)),
            Ok(i) => (lift.slope(i - 1), lift.slope(i)),
            Err(i) => {
                let s = lift.slope(i - 1);
                (s.clone(), s)
            }
        };
        Valency::from_sides(left.is_positive(), right.is_positive())
    }

    /// `val(φⁿ, x)`, folded along the orbit `x, φx, …, φ^{n−1}x`.
    pub fn valency_iterate(&self, n: usize, x: &CirclePoint) -> Valency {
        let mut acc = Valency::PP;
        let mut y = x.clone();
        for _ in 0..n {
            acc = self.valency(&y).compose(acc);
            y = self.evaluate(&y);
        }
        acc
    }

    /// Exact lift of `φⁿ`, `n ≥ 1`.
    pub fn iterate_lift(&self, n: usize) -> Result<PLLift> {
        assert!(n >= 1, "iterate_lift needs n >= 1");
        let mut acc = self.lift.clone();
        for _ in 1..n {
            acc = PLLift::compose(&self.lift, &acc, self.limits.max_breakpoints)?;
        }
        Ok(acc)
    }

    pub fn iterate(&self, n: usize) -> Result<PLCircleMap> {
        Ok(PLCircleMap::new(self.iterate_lift(n)?).with_limits(self.limits))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PLCircleMap) -> Result<PLCircleMap> {
        let lift = PLLift::compose(&self.lift, &inner.lift, self.limits.max_breakpoints)?;
        Ok(PLCircleMap::new(lift).with_limits(self.limits))
    }

    /// All `x` with `φ(x) = y`, in increasing order, with `val(φ, x)`.
    pub fn preimages(&self, y: &CirclePoint) -> Vec<(CirclePoint, Valency)> {
        let lift = &self.lift;
        let mut found: BTreeMap<CirclePoint, ()> = BTreeMap::new();
        for i in 0..lift.segment_count() {
            let a = &lift.values[i];
            let b = &lift.values[i + 1];
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let slope = lift.slope(i);
            let mut n = ceil(&(lo - y.t()));
            let n_hi = floor(&(hi - y.t()));
            while n <= n_hi {
                let target = y.t() + Rational::from_integer(n.clone());
                let t = &lift.breakpoints[i] + (target - a) / &slope;
                found.insert(CirclePoint::new(t), ());
                n += 1;
            }
        }
        found
            .into_keys()
            .map(|x| {
                let v = self.valency(&x);
                (x, v)
            })
            .collect()
    }

    /// All `z` with `φʲ(z) = y`, with `val(φʲ, z)`, sorted by `z`.
    pub fn preimages_iter(&self, y: &CirclePoint, j: usize) -> Result<Vec<(CirclePoint, Valency)>> {
        let mut level = vec![(y.clone(), Valency::PP)];
        for _ in 0..j {
            let mut next = Vec::new();
            for (w, vw) in &level {
                for (z, u) in self.preimages(w) {
                    next.push((z, vw.compose(u)));
                }
                if next.len() > self.limits.max_preimages {
                    return Err(Error::ResourceLimit {
                        what: "iterated preimages",
                        cap: self.limits.max_preimages,
                    });
                }
            }
            level = next;
        }
        level.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(level)
    }

    /// Solutions of `f(t) − t ∈ Z` on `[0,1)`.
    pub fn fixed_points(&self) -> Result<Vec<(CirclePoint, Valency)>> {
        let lift = &self.lift;
        let mut found: BTreeMap<CirclePoint, ()> = BTreeMap::new();
        for i in 0..lift.segment_count() {
            let c0 = &lift.breakpoints[i];
            let c1 = &lift.breakpoints[i + 1];
            let g0 = &lift.values[i] - c0;
            let g1 = &lift.values[i + 1] - c1;
            let rate = lift.slope(i) - Rational::one();
            if rate.is_zero() {
                if g0.is_integer() {
                    return Err(Error::DegeneratePiece { index: i });
                }
                continue;
            }
            let (lo, hi) = if g0 < g1 { (&g0, &g1) } else { (&g1, &g0) };
            let mut n = ceil(lo);
            let n_hi = floor(hi);
            while n <= n_hi {
                let t = c0 + (Rational::from_integer(n.clone()) - &g0) / &rate;
                found.insert(CirclePoint::new(t), ());
                n += 1;
            }
        }
        Ok(found
            .into_keys()
            .map(|x| {
                let v = self.valency(&x);
                (x, v)
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{int, rat};
    use crate::fixtures::phi;

    #[test]
    fn evaluate_matches_examples() {
        let f = phi(2, 2);
        assert_eq!(f.evaluate(&CirclePoint::from_ratio(1, 8)), CirclePoint::from_ratio(1, 2));
        assert_eq!(f.evaluate(&CirclePoint::from_ratio(3, 4)), CirclePoint::zero());
        assert_eq!(f.evaluate(&CirclePoint::from_ratio(1, 2)), CirclePoint::zero());
    }

    #[test]
    fn valency_examples() {
        let f = phi(2, 2);
        assert_eq!(f.valency(&CirclePoint::from_ratio(1, 2)), Valency::PM);
        assert_eq!(f.valency(&CirclePoint::zero()), Valency::MP);
        assert_eq!(f.valency(&CirclePoint::from_ratio(1, 8)), Valency::PP);
        assert_eq!(f.valency_iterate(2, &CirclePoint::from_ratio(1, 8)), Valency::PM);
        assert_eq!(f.valency_iterate(2, &CirclePoint::from_ratio(3, 8)), Valency::PM);
        assert_eq!(
            f.valency_iterate(1, &CirclePoint::from_ratio(5, 7)),
            f.valency(&CirclePoint::from_ratio(5, 7))
        );
    }

    #[test]
    fn critical_set_excludes_direction_preserving_breakpoints() {
        // breakpoint at 1/4 changes slope but not direction
        let f = PLCircleMap::from_ratios(&[(0, 1), (1, 4), (1, 2), (1, 1)], &[(0, 1), (1, 1), (3, 1), (0, 1)]).unwrap();
        let crit: Vec<_> = f.critical_points().iter().map(|(x, _)| x.clone()).collect();
        assert_eq!(crit, vec![CirclePoint::zero(), CirclePoint::from_ratio(1, 2)]);
    }

    #[test]
    fn second_iterate_of_phi22() {
        let f = phi(2, 2);
        let l2 = f.iterate_lift(2).unwrap();
        // 2 pieces, each crossing 3 interior cut points of the outer lift
        let slopes: Vec<_> = (0..l2.segment_count()).map(|i| l2.slope(i)).collect();
        assert!(slopes.iter().all(|s| s.abs() == int(16)));
        let mut direction_changes = 0;
        for w in slopes.windows(2) {
            if w[0].is_positive() != w[1].is_positive() {
                direction_changes += 1;
            }
        }
        assert_eq!(direction_changes + 1, 8);
        assert_eq!(f.iterate_lift(1).unwrap(), *f.lift());
    }

    #[test]
    fn preimage_examples() {
        let f = phi(2, 2);
        let pre = f.preimages(&CirclePoint::zero());
        let expect = vec![
            (CirclePoint::zero(), Valency::MP),
            (CirclePoint::from_ratio(1, 4), Valency::PP),
            (CirclePoint::from_ratio(1, 2), Valency::PM),
            (CirclePoint::from_ratio(3, 4), Valency::MM),
        ];
        assert_eq!(pre, expect);

        let g = PLCircleMap::from_ratios(&[(0, 1), (1, 2), (1, 1)], &[(0, 1), (3, 1), (1, 1)]).unwrap();
        let pre = g.preimages(&CirclePoint::zero());
        let expect = vec![
            (CirclePoint::zero(), Valency::MP),
            (CirclePoint::from_ratio(1, 6), Valency::PP),
            (CirclePoint::from_ratio(1, 3), Valency::PP),
            (CirclePoint::from_ratio(1, 2), Valency::PM),
            (CirclePoint::from_ratio(3, 4), Valency::MM),
        ];
        assert_eq!(pre, expect);
    }

    #[test]
    fn fixed_points_of_phi22() {
        let fixed: Vec<_> = phi(2, 2).fixed_points().unwrap().into_iter().map(|(x, _)| x).collect();
        let expect: Vec<_> = [(0, 1), (1, 3), (3, 5), (4, 5)]
            .iter()
            .map(|&(p, q)| CirclePoint::from_ratio(p, q))
            .collect();
        assert_eq!(fixed, expect);
    }

    #[test]
    fn rotation_has_no_fixed_points() {
        let f = PLCircleMap::from_ratios(&[(0, 1), (1, 1)], &[(1, 2), (3, 2)]).unwrap();
        assert!(f.fixed_points().unwrap().is_empty());
    }

    #[test]
    fn identity_piece_is_degenerate() {
        let f = PLCircleMap::from_ratios(&[(0, 1), (1, 2), (1, 1)], &[(0, 1), (1, 2), (3, 1)]).unwrap();
        assert_eq!(f.fixed_points(), Err(Error::DegeneratePiece { index: 0 }));
    }

    #[test]
    fn lift_validation() {
        let bp = vec![int(0), rat(1, 2), int(1)];
        assert!(matches!(
            PLLift::new(bp.clone(), vec![int(0), int(0), int(0)]),
            Err(LiftError::ZeroSlope { index: 0, .. })
        ));
        assert!(PLLift::new(bp.clone(), vec![rat(1, 2), rat(5, 2), rat(1, 2)]).is_ok());
        assert!(matches!(
            PLLift::new(bp.clone(), vec![int(1), int(2), int(1)]),
            Err(LiftError::StartOutOfRange(_))
        ));
        assert!(matches!(
            PLLift::new(bp.clone(), vec![int(0), int(2), rat(1, 2)]),
            Err(LiftError::NonIntegerDegree(_))
        ));
        assert!(matches!(
            PLLift::new(vec![int(0), rat(1, 2), rat(1, 2), int(1)], vec![int(0), int(1), int(2), int(0)]),
            Err(LiftError::Unsorted { index: 2, .. })
        ));
    }

    #[test]
    fn breakpoint_cap_fails_loudly() {
        let f = phi(3, 3).with_limits(Limits {
            max_breakpoints: 20,
            ..Limits::default()
        });
        assert!(matches!(f.iterate_lift(3), Err(Error::ResourceLimit { .. })));
    }
}
