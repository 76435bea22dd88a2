//! Exact points and arcs on the circle `R/Z`.
//!
//! A point `t ∈ [0,1)` stands for `e^{2πit}`; arcs run counterclockwise,
//! i.e. in the direction of increasing `t`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Exact rational number, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// Builds `num/den` from machine integers.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Largest integer `≤ r`.
pub fn floor(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Smallest integer `≥ r`.
pub fn ceil(r: &Rational) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

/// `r mod 1`, in `[0,1)`.
pub fn frac(r: &Rational) -> Rational {
    r - Rational::from_integer(floor(r))
}

/// A point of the circle, stored as its representative in `[0,1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CirclePoint(Rational);

impl CirclePoint {
    /// Reduces `t` modulo 1.
    pub fn new(t: Rational) -> Self {
        CirclePoint(frac(&t))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(rat(num, den))
    }

    pub fn zero() -> Self {
        CirclePoint(Rational::zero())
    }

    /// The representative in `[0,1)`.
    pub fn t(&self) -> &Rational {
        &self.0
    }

    /// Counterclockwise distance from `self` to `other`, in `[0,1)`.
    pub fn distance_to(&self, other: &CirclePoint) -> Rational {
        frac(&(&other.0 - &self.0))
    }

    pub fn shifted(&self, by: &Rational) -> CirclePoint {
        CirclePoint::new(&self.0 + by)
    }
}

impl fmt::Debug for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<Rational> for CirclePoint {
    fn from(t: Rational) -> Self {
        CirclePoint::new(t)
    }
}

/// Open counterclockwise arc `(start, start + length)`.
///
/// `0 < length ≤ 1`. Length 1 is the whole circle minus `start`, which is
/// what a partition by a single point produces.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CircleInterval {
    start: CirclePoint,
    length: Rational,
}

impl CircleInterval {
    /// Arc from `start` counterclockwise to `end`. Equal endpoints give the
    /// circle minus that point.
    pub fn new(start: CirclePoint, end: CirclePoint) -> Self {
        let mut length = start.distance_to(&end);
        if length.is_zero() {
            length = Rational::one();
        }
        CircleInterval { start, length }
    }

    /// Panics unless `0 < length ≤ 1`.
    pub fn with_length(start: CirclePoint, length: Rational) -> Self {
        assert!(
            length.is_positive() && length <= Rational::one(),
            "arc length {length} outside (0,1]"
        );
        CircleInterval { start, length }
    }

    pub fn start(&self) -> &CirclePoint {
        &self.start
    }

    pub fn end(&self) -> CirclePoint {
        self.start.shifted(&self.length)
    }

    pub fn length(&self) -> &Rational {
        &self.length
    }

    /// `x ∈ (a,b)` iff `(x − a mod 1) ∈ (0, length)`.
    pub fn contains(&self, x: &CirclePoint) -> bool {
        let d = self.start.distance_to(x);
        d.is_positive() && d < self.length
    }

    /// The left endpoint as a real number together with `start + length`,
    /// i.e. a lift of the arc to an interval of `R` starting in `[0,1)`.
    pub fn lifted_bounds(&self) -> (Rational, Rational) {
        let a = self.start.t().clone();
        let b = &a + &self.length;
        (a, b)
    }
}

impl fmt::Debug for CircleInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.start, self.end())
    }
}

impl fmt::Display for CircleInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let end = self.end();
        // print the circle minus a point as (a, a+1) so the wrap is visible
        if self.length.is_one() {
            write!(f, "({}, {})", self.start, self.start.t() + Rational::one())
        } else if end.t() < self.start.t() && !end.t().is_zero() {
            write!(f, "({}, {})", self.start, end.t() + Rational::one())
        } else if end.t().is_zero() {
            write!(f, "({}, 1)", self.start)
        } else {
            write!(f, "({}, {})", self.start, end)
        }
    }
}

impl PartialOrd for CircleInterval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CircleInterval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.start
            .cmp(&other.start)
            .then_with(|| self.length.cmp(&other.length))
    }
}

/// Splits the circle at the sorted, deduplicated points `cuts` and returns
/// the open components in counterclockwise order, starting at `cuts[0]`.
pub fn components(cuts: &[CirclePoint]) -> Vec<CircleInterval> {
    let n = cuts.len();
    (0..n)
        .map(|i| CircleInterval::new(cuts[i].clone(), cuts[(i + 1) % n].clone()))
        .collect()
}
