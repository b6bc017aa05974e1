use std::fmt;

use num_traits::{One, Signed, Zero};

use super::interval::Interval;
use super::rational::{fmt_rational, int, is_dyadic, is_power_of_two_ratio, to_f64, Rational};
use super::PlError;

/// Orientation-preserving piecewise-linear homeomorphism of [0,1] with exact
/// rational breakpoints.
///
/// The breakpoint list is canonical: it starts at (0,0), ends at (1,1), both
/// coordinates strictly increase, and no interior point is collinear with its
/// neighbours. Two maps are equal iff their breakpoint lists are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PLHomeo {
    pts: Vec<(Rational, Rational)>,
}

fn collinear(a: &(Rational, Rational), b: &(Rational, Rational), c: &(Rational, Rational)) -> bool {
    (&b.1 - &a.1) * (&c.0 - &b.0) == (&c.1 - &b.1) * (&b.0 - &a.0)
}

fn prune(pts: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(pts.len());
    for p in pts {
        if let Some(last) = out.last() {
            if last.0 == p.0 {
                continue;
            }
        }
        while out.len() >= 2 && collinear(&out[out.len() - 2], &out[out.len() - 1], &p) {
            out.pop();
        }
        out.push(p);
    }
    out
}

impl PLHomeo {
    pub fn new(points: Vec<(Rational, Rational)>) -> Result<Self, PlError> {
        let first = points.first().ok_or_else(|| PlError::InvalidHomeo("no breakpoints".into()))?;
        let last = points.last().unwrap();
        if !(first.0.is_zero() && first.1.is_zero()) {
            return Err(PlError::InvalidHomeo("must start at (0,0)".into()));
        }
        if !(last.0.is_one() && last.1.is_one()) {
            return Err(PlError::InvalidHomeo("must end at (1,1)".into()));
        }
        for w in points.windows(2) {
            if w[0].0 >= w[1].0 || w[0].1 >= w[1].1 {
                return Err(PlError::InvalidHomeo(format!(
                    "breakpoints not strictly increasing at ({}, {})",
                    fmt_rational(&w[1].0),
                    fmt_rational(&w[1].1)
                )));
            }
        }
        Ok(PLHomeo { pts: prune(points) })
    }

    pub fn identity() -> Self {
        PLHomeo { pts: vec![(int(0), int(0)), (int(1), int(1))] }
    }

    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.pts
    }

    pub fn is_identity(&self) -> bool {
        self.pts.len() == 2
    }

    fn segment_for(&self, x: &Rational) -> usize {
        // index i with pts[i].0 <= x <= pts[i+1].0
        match self.pts.binary_search_by(|p| p.0.cmp(x)) {
            Ok(i) => i.min(self.pts.len() - 2),
            Err(i) => i - 1,
        }
    }

    /// Exact image of `x ∈ [0,1]`.
    pub fn eval(&self, x: &Rational) -> Result<Rational, PlError> {
        if x.is_negative() || x > &int(1) {
            return Err(PlError::Domain(fmt_rational(x)));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &Rational) -> Rational {
        let i = self.segment_for(x);
        let (x0, y0) = &self.pts[i];
        let (x1, y1) = &self.pts[i + 1];
        if x == x0 {
            return y0.clone();
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let i = self.pts.partition_point(|p| to_f64(&p.0) <= x).clamp(1, self.pts.len() - 1) - 1;
        let (x0, y0) = (to_f64(&self.pts[i].0), to_f64(&self.pts[i].1));
        let (x1, y1) = (to_f64(&self.pts[i + 1].0), to_f64(&self.pts[i + 1].1));
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn inverse(&self) -> Self {
        PLHomeo { pts: self.pts.iter().map(|(x, y)| (y.clone(), x.clone())).collect() }
    }

    /// `self ∘ inner`, i.e. `x ↦ self(inner(x))`.
    pub fn compose(&self, inner: &PLHomeo) -> PLHomeo {
        let inv = inner.inverse();
        let mut xs: Vec<Rational> = inner.pts.iter().map(|p| p.0.clone()).collect();
        xs.extend(self.pts.iter().map(|p| inv.eval_unchecked(&p.0)));
        xs.sort();
        xs.dedup();
        let pts = xs
            .into_iter()
            .map(|x| {
                let y = self.eval_unchecked(&inner.eval_unchecked(&x));
                (x, y)
            })
            .collect();
        PLHomeo { pts: prune(pts) }
    }

    pub fn pow(&self, n: i64) -> PLHomeo {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = PLHomeo::identity();
        let mut sq = base;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq);
            }
        }
        acc
    }

    /// `[f, g] = f g f⁻¹ g⁻¹`.
    pub fn commutator(&self, g: &PLHomeo) -> PLHomeo {
        self.compose(g).compose(&self.inverse()).compose(&g.inverse())
    }

    /// `self ∘ g ∘ self⁻¹`.
    pub fn conjugate(&self, g: &PLHomeo) -> PLHomeo {
        self.compose(g).compose(&self.inverse())
    }

    pub fn slopes(&self) -> Vec<Rational> {
        self.pts.windows(2).map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0)).collect()
    }

    /// Maximal open intervals on which the map moves points, in increasing order.
    pub fn support_components(&self) -> Vec<Interval> {
        let disp = |p: &(Rational, Rational)| &p.1 - &p.0;
        // sample points: breakpoints plus the crossing of the diagonal inside a segment
        let mut marks: Vec<(Rational, Rational)> = Vec::new();
        for w in self.pts.windows(2) {
            let (d0, d1) = (disp(&w[0]), disp(&w[1]));
            marks.push((w[0].0.clone(), d0.clone()));
            if (d0.is_positive() && d1.is_negative()) || (d0.is_negative() && d1.is_positive()) {
                let x = &w[0].0 + &d0 * (&w[1].0 - &w[0].0) / (&d0 - &d1);
                marks.push((x, int(0)));
            }
        }
        marks.push((int(1), int(0)));

        let mut comps = Vec::new();
        let mut start: Option<Rational> = None;
        for w in marks.windows(2) {
            let moved_inside = !(w[0].1.is_zero() && w[1].1.is_zero());
            if moved_inside && start.is_none() {
                start = Some(w[0].0.clone());
            }
            if w[1].1.is_zero() {
                if let Some(s) = start.take() {
                    comps.push(Interval::open(s, w[1].0.clone()).expect("nondegenerate component"));
                }
            }
        }
        comps
    }

    /// True when every breakpoint is dyadic and every slope is a power of two,
    /// which characterizes membership in Thompson's group F.
    pub fn is_dyadic_f_element(&self) -> bool {
        self.pts.iter().all(|(x, y)| is_dyadic(x) && is_dyadic(y)) && self.slopes().iter().all(is_power_of_two_ratio)
    }

    /// The map agreeing with `self` on `j` and the identity elsewhere.
    /// Requires `j` to be invariant, i.e. both endpoints fixed.
    pub fn restrict_to(&self, j: &Interval) -> Result<PLHomeo, PlError> {
        if self.eval(j.lo())? != *j.lo() || self.eval(j.hi())? != *j.hi() {
            return Err(PlError::NotInvariant(j.to_string()));
        }
        let mut pts = vec![(int(0), int(0)), (j.lo().clone(), j.lo().clone())];
        pts.extend(self.pts.iter().filter(|p| j.lo() < &p.0 && &p.0 < j.hi()).cloned());
        pts.push((j.hi().clone(), j.hi().clone()));
        pts.push((int(1), int(1)));
        let mut uniq: Vec<(Rational, Rational)> = Vec::with_capacity(pts.len());
        for p in pts {
            if uniq.last().map_or(true, |q| q.0 != p.0) {
                uniq.push(p);
            }
        }
        Ok(PLHomeo { pts: prune(uniq) })
    }

    /// Copy of `self` rescaled into `[lo, hi]`, identity outside.
    pub fn rescaled_into(&self, lo: &Rational, hi: &Rational) -> PLHomeo {
        let len = hi - lo;
        let mut pts = vec![(int(0), int(0))];
        pts.extend(self.pts.iter().map(|(x, y)| (lo + &len * x, lo + &len * y)));
        pts.push((int(1), int(1)));
        let mut uniq: Vec<(Rational, Rational)> = Vec::with_capacity(pts.len());
        for p in pts {
            if uniq.last().map_or(true, |q| q.0 != p.0) {
                uniq.push(p);
            }
        }
        PLHomeo { pts: prune(uniq) }
    }

    /// Exact check that `self ∘ g = g ∘ self` on the closed window `[lo, hi]`.
    pub fn commutes_on(&self, g: &PLHomeo, lo: &Rational, hi: &Rational) -> bool {
        let p = self.compose(g);
        let q = g.compose(self);
        let mut xs: Vec<&Rational> = vec![lo, hi];
        xs.extend(p.pts.iter().chain(q.pts.iter()).map(|pt| &pt.0).filter(|x| lo <= *x && *x <= hi));
        xs.into_iter().all(|x| p.eval_unchecked(x) == q.eval_unchecked(x))
    }

    pub fn commutes_with(&self, g: &PLHomeo) -> bool {
        self.compose(g) == g.compose(self)
    }

    /// Image of an interval (endpoint images; orientation preserving).
    pub fn image(&self, j: &Interval) -> Interval {
        Interval::new(self.eval_unchecked(j.lo()), self.eval_unchecked(j.hi()), true, true)
            .expect("homeomorphic image of a nondegenerate interval")
    }
}

impl fmt::Display for PLHomeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.pts.iter().map(|(x, y)| format!("({}, {})", fmt_rational(x), fmt_rational(y))).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A bump: identity outside `(lo, hi)`, sending `mid` to `mid_image`.
pub fn bump(lo: Rational, hi: Rational, mid: Rational, mid_image: Rational) -> Result<PLHomeo, PlError> {
    let mut pts = vec![(int(0), int(0))];
    if !lo.is_zero() {
        pts.push((lo.clone(), lo));
    }
    pts.push((mid, mid_image));
    if !hi.is_one() {
        pts.push((hi.clone(), hi));
    }
    pts.push((int(1), int(1)));
    PLHomeo::new(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_pl::rational::rat;
    use crate::exact_pl::thompson::thompson_generators;

    #[test]
    fn compose_with_identity_and_inverse() {
        let (a, b) = thompson_generators();
        assert_eq!(PLHomeo::identity().compose(&a), a);
        assert!(a.compose(&a.inverse()).is_identity());
        assert!(b.inverse().compose(&b).is_identity());
        assert_eq!(a.inverse().inverse(), a);
    }

    #[test]
    fn standard_generator_values() {
        let (a, _) = thompson_generators();
        assert_eq!(a.eval(&rat(1, 2)).unwrap(), rat(1, 4));
        assert_eq!(a.eval(&rat(7, 8)).unwrap(), rat(3, 4));
        assert_eq!(a.compose(&a).eval(&rat(1, 2)).unwrap(), rat(1, 8));
        assert_eq!(a.inverse().eval(&rat(1, 4)).unwrap(), rat(1, 2));
        assert_eq!(PLHomeo::identity().eval(&rat(3, 7)).unwrap(), rat(3, 7));
    }

    #[test]
    fn eval_outside_unit_interval_is_an_error() {
        let (a, _) = thompson_generators();
        assert!(matches!(a.eval(&rat(3, 2)), Err(PlError::Domain(_))));
        assert!(matches!(a.eval(&rat(-1, 2)), Err(PlError::Domain(_))));
    }

    #[test]
    fn supports_of_generators() {
        let (a, b) = thompson_generators();
        assert!(PLHomeo::identity().support_components().is_empty());
        assert_eq!(a.support_components(), vec![Interval::open(int(0), int(1)).unwrap()]);
        assert_eq!(b.support_components(), vec![Interval::open(rat(1, 2), int(1)).unwrap()]);
    }

    #[test]
    fn support_with_interior_crossing() {
        // moves right on (0, 1/2), left on (1/2, 1)
        let f = PLHomeo::new(vec![(int(0), int(0)), (rat(1, 4), rat(3, 8)), (rat(3, 4), rat(5, 8)), (int(1), int(1))])
            .unwrap();
        let comps = f.support_components();
        assert_eq!(comps, vec![Interval::open(int(0), rat(1, 2)).unwrap(), Interval::open(rat(1, 2), int(1)).unwrap()]);
    }

    #[test]
    fn restriction() {
        let (a, b) = thompson_generators();
        let j = Interval::open(rat(1, 2), int(1)).unwrap();
        assert_eq!(b.restrict_to(&j).unwrap(), b);
        assert!(PLHomeo::identity().restrict_to(&j).unwrap().is_identity());
        assert!(matches!(a.restrict_to(&j), Err(PlError::NotInvariant(_))));
    }

    #[test]
    fn rejects_invalid_breakpoints() {
        assert!(PLHomeo::new(vec![(int(0), int(0)), (rat(1, 2), rat(1, 2))]).is_err());
        assert!(PLHomeo::new(vec![(int(0), int(0)), (rat(1, 2), rat(1, 2)), (rat(1, 2), rat(3, 4)), (int(1), int(1))])
            .is_err());
        assert!(PLHomeo::new(vec![(int(0), int(0)), (rat(1, 2), rat(3, 4)), (rat(3, 4), rat(1, 2)), (int(1), int(1))])
            .is_err());
    }

    #[test]
    fn collinear_points_are_pruned() {
        let f = PLHomeo::new(vec![(int(0), int(0)), (rat(1, 3), rat(1, 3)), (int(1), int(1))]).unwrap();
        assert!(f.is_identity());
    }

    #[test]
    fn pow_matches_repeated_composition() {
        let (a, b) = thompson_generators();
        let ab = a.compose(&b);
        assert_eq!(ab.pow(3), ab.compose(&ab).compose(&ab));
        assert_eq!(ab.pow(-2), ab.inverse().compose(&ab.inverse()));
        assert!(ab.pow(0).is_identity());
    }
}
