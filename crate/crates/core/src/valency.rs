//! One-sided monotonicity of a map at a point, and the monoid structure
//! that composes it along orbits.

use std::fmt;

/// How a piecewise monotone map behaves immediately left and right of a point.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Valency {
    /// increasing on both sides
    PP,
    /// decreasing on both sides
    MM,
    /// local maximum
    PM,
    /// local minimum
    MP,
}

impl Valency {
    pub const ALL: [Valency; 4] = [Valency::PP, Valency::PM, Valency::MP, Valency::MM];

    /// From the signs of the slopes on the left and right (`true` = increasing).
    pub fn from_sides(left_increasing: bool, right_increasing: bool) -> Self {
        match (left_increasing, right_increasing) {
            (true, true) => Valency::PP,
            (false, false) => Valency::MM,
            (true, false) => Valency::PM,
            (false, true) => Valency::MP,
        }
    }

    /// `self • inner`: the valency of `outer ∘ inner` at `x` when `self` is
    /// the valency of `outer` at `inner(x)` and `inner` has valency `inner`
    /// at `x`.
    pub fn compose(self, inner: Valency) -> Valency {
        use Valency::*;
        match (self, inner) {
            (PP, y) => y,
            (PM, _) => PM,
            (MP, _) => MP,
            (MM, PP) => MM,
            (MM, PM) => MP,
            (MM, MP) => PM,
            (MM, MM) => PP,
        }
    }

    pub fn is_critical(self) -> bool {
        matches!(self, Valency::PM | Valency::MP)
    }

    /// `+1` for `(+,+)`, `-1` for `(−,−)`; `None` at critical points.
    pub fn sign(self) -> Option<i64> {
        match self {
            Valency::PP => Some(1),
            Valency::MM => Some(-1),
            _ => None,
        }
    }

    /// Position in the index order `(−,+) < (+,−) < (+,+) < (−,−)` used for
    /// the rows and columns of every K-theory matrix.
    pub fn index_rank(self) -> u8 {
        match self {
            Valency::MP => 0,
            Valency::PM => 1,
            Valency::PP => 2,
            Valency::MM => 3,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Valency::PP => "(+,+)",
            Valency::MM => "(-,-)",
            Valency::PM => "(+,-)",
            Valency::MP => "(-,+)",
        }
    }

    pub fn parse(s: &str) -> Option<Valency> {
        Valency::ALL.into_iter().find(|v| v.symbol() == s)
    }
}

impl fmt::Display for Valency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Free-function form of [`Valency::compose`].
pub fn compose_valency(outer: Valency, inner: Valency) -> Valency {
    outer.compose(inner)
}
