use std::fmt;

use super::rational::{fmt_rational, midpoint, Rational};
use super::PlError;

/// An interval with exact endpoints. Support components and most of the
/// dynamics work with open intervals; closed ones show up as block hulls.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
    lo_open: bool,
    hi_open: bool,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, lo_open: bool, hi_open: bool) -> Result<Self, PlError> {
        if lo >= hi {
            return Err(PlError::EmptyInterval(fmt_rational(&lo), fmt_rational(&hi)));
        }
        Ok(Interval { lo, hi, lo_open, hi_open })
    }

    pub fn open(lo: Rational, hi: Rational) -> Result<Self, PlError> {
        Self::new(lo, hi, true, true)
    }

    pub fn closed(lo: Rational, hi: Rational) -> Result<Self, PlError> {
        Self::new(lo, hi, false, false)
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn is_open(&self) -> bool {
        self.lo_open && self.hi_open
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        midpoint(&self.lo, &self.hi)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = if self.lo_open { x > &self.lo } else { x >= &self.lo };
        let below = if self.hi_open { x < &self.hi } else { x <= &self.hi };
        above && below
    }

    /// Intersection of the open interiors is nonempty.
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }

    /// `self ⊆ other` as open intervals (endpoint inclusion).
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn is_proper_subset_of(&self, other: &Interval) -> bool {
        self.is_subset_of(other) && self != other
    }

    /// Two open intervals form a 2-chain when their intersection is a proper
    /// nonempty subinterval of both. Shared endpoints never qualify.
    pub fn forms_two_chain(&self, other: &Interval) -> bool {
        (self.lo < other.lo && other.lo < self.hi && self.hi < other.hi)
            || (other.lo < self.lo && self.lo < other.hi && other.hi < self.hi)
    }

    /// Closure of `self` lies in the open interval `other`.
    pub fn closure_inside(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    /// `self` lies entirely to the left of `other` (sup ≤ inf).
    pub fn precedes(&self, other: &Interval) -> bool {
        self.hi <= other.lo
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        Interval::open(lo, hi).ok()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            fmt_rational(&self.lo),
            fmt_rational(&self.hi),
            if self.hi_open { ')' } else { ']' }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_pl::rational::rat;

    fn iv(a: i64, b: i64, c: i64, d: i64) -> Interval {
        Interval::open(rat(a, b), rat(c, d)).unwrap()
    }

    #[test]
    fn rejects_empty() {
        assert!(Interval::open(rat(1, 2), rat(1, 2)).is_err());
        assert!(Interval::open(rat(3, 4), rat(1, 2)).is_err());
    }

    #[test]
    fn two_chain_requires_proper_overlap() {
        assert!(iv(0, 1, 3, 4).forms_two_chain(&iv(1, 4, 1, 1)));
        assert!(iv(1, 4, 1, 1).forms_two_chain(&iv(0, 1, 3, 4)));
        // nested
        assert!(!iv(0, 1, 1, 1).forms_two_chain(&iv(1, 2, 1, 1)));
        // shared endpoint only
        assert!(!iv(0, 1, 1, 2).forms_two_chain(&iv(1, 2, 1, 1)));
        // equal
        assert!(!iv(0, 1, 1, 2).forms_two_chain(&iv(0, 1, 1, 2)));
    }

    #[test]
    fn display_uses_num_den() {
        assert_eq!(iv(0, 1, 1, 1).to_string(), "(0/1, 1/1)");
    }
}
