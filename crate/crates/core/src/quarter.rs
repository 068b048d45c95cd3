//! Distances on the quarter-integer grid.

use std::fmt;
use std::ops::{Add, Sub};

/// A non-negative multiple of 1/4, stored as a count of quarters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuarterDist(pub u32);

impl QuarterDist {
    pub const ZERO: QuarterDist = QuarterDist(0);
    pub const QUARTER: QuarterDist = QuarterDist(1);
    pub const HALF: QuarterDist = QuarterDist(2);

    pub const fn from_int(n: u32) -> Self {
        QuarterDist(4 * n)
    }

    pub const fn quarters(self) -> u32 {
        self.0
    }

    pub const fn floor(self) -> u32 {
        self.0 / 4
    }

    pub const fn ceil(self) -> u32 {
        self.0.div_ceil(4)
    }

    pub const fn is_integer(self) -> bool {
        self.0.is_multiple_of(4)
    }

    /// Quarter residue: 0 for vertices, 2 for edge interiors, 1 for faces.
    pub const fn residue(self) -> u32 {
        self.0 % 4
    }
}

impl Add for QuarterDist {
    type Output = QuarterDist;
    fn add(self, o: QuarterDist) -> QuarterDist {
        QuarterDist(self.0 + o.0)
    }
}

impl Sub for QuarterDist {
    type Output = QuarterDist;
    fn sub(self, o: QuarterDist) -> QuarterDist {
        QuarterDist(self.0 - o.0)
    }
}

impl fmt::Display for QuarterDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.0 / 4;
        match self.0 % 4 {
            0 => write!(f, "{whole}"),
            1 => write!(f, "{whole}.25"),
            2 => write!(f, "{whole}.5"),
            _ => write!(f, "{whole}.75"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_and_display() {
        let q = QuarterDist(5);
        assert_eq!(q.floor(), 1);
        assert_eq!(q.ceil(), 2);
        assert_eq!(QuarterDist::from_int(3).ceil(), 3);
        assert_eq!(q.to_string(), "1.25");
        assert_eq!(QuarterDist(6).to_string(), "1.5");
        assert_eq!(QuarterDist(8).to_string(), "2");
    }
}
