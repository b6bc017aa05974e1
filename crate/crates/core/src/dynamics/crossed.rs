use std::fmt;

use super::{component_catalogue, ActionSpec, Component, DynamicsError};
use crate::exact_pl::rational::fmt_rational;
use crate::exact_pl::{GenSet, GroupWord, Interval, PLHomeo, Rational};

/// Two support components `j1 ∈ π₀ supp g1`, `j2 ∈ π₀ supp g2` whose
/// intersection is a proper nonempty subinterval of both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoChain {
    pub j1: Interval,
    pub j2: Interval,
    pub g1: GroupWord,
    pub g2: GroupWord,
}

impl TwoChain {
    /// Re-checks the invariants exactly against the generators.
    pub fn validate(&self, gens: &GenSet) -> Result<bool, DynamicsError> {
        let e1 = self.g1.evaluate(gens)?;
        let e2 = self.g2.evaluate(gens)?;
        Ok(e1.support_components().contains(&self.j1)
            && e2.support_components().contains(&self.j2)
            && self.j1.forms_two_chain(&self.j2))
    }
}

impl fmt::Display for TwoChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "two-chain J1={} of [{}], J2={} of [{}]", self.j1, self.g1, self.j2, self.g2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrossedVariant {
    /// `J ∈ π₀ supp f` and `g(∂J) ∩ J ≠ ∅`.
    BoundaryMoved,
    /// `f(a) = a < f(b) < g(a) < g(b) = b`.
    Ping { a: Rational, b: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossedPairWitness {
    pub f: GroupWord,
    pub g: GroupWord,
    pub j: Interval,
    pub variant: CrossedVariant,
}

impl CrossedPairWitness {
    pub fn validate(&self, gens: &GenSet) -> Result<bool, DynamicsError> {
        let f = self.f.evaluate(gens)?;
        let g = self.g.evaluate(gens)?;
        Ok(match &self.variant {
            CrossedVariant::BoundaryMoved => {
                f.support_components().contains(&self.j)
                    && (self.j.contains(&g.eval(self.j.lo())?) || self.j.contains(&g.eval(self.j.hi())?))
            }
            CrossedVariant::Ping { a, b } => {
                let fa = f.eval(a)?;
                let fb = f.eval(b)?;
                let ga = g.eval(a)?;
                let gb = g.eval(b)?;
                &fa == a && a < &fb && fb < ga && ga < gb && &gb == b
            }
        })
    }
}

impl fmt::Display for CrossedPairWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.variant {
            CrossedVariant::BoundaryMoved => {
                write!(f, "crossed pair (boundary-moved) f=[{}] g=[{}] J={}", self.f, self.g, self.j)
            }
            CrossedVariant::Ping { a, b } => write!(
                f,
                "crossed pair (ping) f=[{}] g=[{}] J={} a={} b={}",
                self.f,
                self.g,
                self.j,
                fmt_rational(a),
                fmt_rational(b)
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConradianVerdict {
    NonConradian(TwoChain),
    NoWitnessUpTo(usize),
}

impl fmt::Display for ConradianVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConradianVerdict::NonConradian(c) => write!(f, "non-conradian: {c}"),
            ConradianVerdict::NoWitnessUpTo(b) => write!(f, "no witness up to budget {b}"),
        }
    }
}

/// First pair (in catalogue order of the later member) forming a two-chain.
pub fn find_two_chain_among(components: &[Component]) -> Option<TwoChain> {
    for (j, cj) in components.iter().enumerate() {
        for ci in &components[..j] {
            if ci.interval.forms_two_chain(&cj.interval) {
                let (left, right) = if ci.interval.lo() < cj.interval.lo() { (ci, cj) } else { (cj, ci) };
                return Some(TwoChain {
                    j1: left.interval.clone(),
                    j2: right.interval.clone(),
                    g1: left.word.clone(),
                    g2: right.word.clone(),
                });
            }
        }
    }
    None
}

pub fn find_two_chain(action: &ActionSpec) -> Option<TwoChain> {
    find_two_chain_among(&component_catalogue(&action.elements()))
}

/// Boundary-moved crossed pair among elements of length ≤ budget.
pub fn find_boundary_crossed_pair(action: &ActionSpec) -> Option<CrossedPairWitness> {
    let elements = action.elements();
    for (fw, f) in &elements {
        for j in f.support_components() {
            for (gw, g) in &elements {
                let lo = g.eval_unchecked(j.lo());
                let hi = g.eval_unchecked(j.hi());
                if j.contains(&lo) || j.contains(&hi) {
                    return Some(CrossedPairWitness {
                        f: fw.clone(),
                        g: gw.clone(),
                        j: j.clone(),
                        variant: CrossedVariant::BoundaryMoved,
                    });
                }
            }
        }
    }
    None
}

/// Smallest `n ≥ 1` with `h^n(x)` strictly on the requested side of `target`.
fn iterate_past(h: &PLHomeo, x: &Rational, target: &Rational, below: bool) -> usize {
    let mut y = x.clone();
    let mut n = 0;
    loop {
        y = h.eval_unchecked(&y);
        n += 1;
        if (below && &y < target) || (!below && &y > target) {
            return n;
        }
    }
}

/// Turns a two-chain into a ping pair by taking powers, as in the two-chain
/// criterion: with `J1` left of `J2`, `a = inf J2`, `b = sup J1`, `f` a power
/// of `g2^{±1}` pushing `b` down toward `a`, and `g` a power of `g1^{±1}`
/// pushing `a` up toward `b`.
pub fn ping_from_two_chain(chain: &TwoChain, gens: &GenSet) -> Result<CrossedPairWitness, DynamicsError> {
    let e1 = chain.g1.evaluate(gens)?;
    let e2 = chain.g2.evaluate(gens)?;
    let a = chain.j2.lo().clone();
    let b = chain.j1.hi().clone();
    let mid = crate::exact_pl::rational::midpoint(&a, &b);
    // f: moves points of J2 to the left
    let (f_base, f_word) =
        if e2.eval_unchecked(&b) < b { (e2, chain.g2.clone()) } else { (e2.inverse(), chain.g2.inverse()) };
    let (g_base, g_word) =
        if e1.eval_unchecked(&a) > a { (e1, chain.g1.clone()) } else { (e1.inverse(), chain.g1.inverse()) };
    let n = iterate_past(&f_base, &b, &mid, true);
    let m = iterate_past(&g_base, &a, &mid, false);
    Ok(CrossedPairWitness {
        f: f_word.pow(n as i64),
        g: g_word.pow(m as i64),
        j: chain.j2.clone(),
        variant: CrossedVariant::Ping { a, b },
    })
}

/// Ping pair among powers of elements of length ≤ budget: searches component
/// pairs `(a, ·) ∈ π₀ supp f`, `(·, b) ∈ π₀ supp g` with the straddling
/// configuration `inf < a < b < sup`, then powers up.
pub fn find_ping_pair(action: &ActionSpec) -> Option<CrossedPairWitness> {
    let catalogue = component_catalogue(&action.elements());
    for (j, cj) in catalogue.iter().enumerate() {
        for ci in &catalogue[..j] {
            // ping configuration: the f-component starts at a and contains b,
            // the g-component ends at b and contains a
            let (fc, gc) = if ci.interval.lo() > cj.interval.lo() { (ci, cj) } else { (cj, ci) };
            let (a, b) = (fc.interval.lo(), gc.interval.hi());
            if gc.interval.lo() < a && a < b && b < fc.interval.hi() {
                let chain = TwoChain {
                    j1: gc.interval.clone(),
                    j2: fc.interval.clone(),
                    g1: gc.word.clone(),
                    g2: fc.word.clone(),
                };
                return ping_from_two_chain(&chain, action.generators()).ok();
            }
        }
    }
    None
}

/// Either variant; the boundary-moved search runs first.
pub fn find_crossed_pair(action: &ActionSpec) -> Option<CrossedPairWitness> {
    find_boundary_crossed_pair(action).or_else(|| find_ping_pair(action))
}

pub fn conradian_diagnostic(action: &ActionSpec) -> ConradianVerdict {
    match find_two_chain(action) {
        Some(c) => ConradianVerdict::NonConradian(c),
        None => ConradianVerdict::NoWitnessUpTo(action.word_budget()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_pl::rational::{int, rat};
    use crate::exact_pl::{bump, standard_genset};

    fn action(gens: Vec<(&str, PLHomeo)>, budget: usize) -> ActionSpec {
        ActionSpec::new(gens.into_iter().map(|(n, g)| (n.to_string(), g)).collect(), budget).unwrap()
    }

    fn two_bumps() -> ActionSpec {
        let f = bump(int(0), rat(3, 4), rat(1, 2), rat(5, 8)).unwrap();
        let g = bump(rat(1, 4), int(1), rat(1, 2), rat(5, 8)).unwrap();
        action(vec![("f", f), ("g", g)], 3)
    }

    fn disjoint_bumps() -> ActionSpec {
        let f = bump(int(0), rat(1, 2), rat(1, 4), rat(3, 8)).unwrap();
        let g = bump(rat(1, 2), int(1), rat(3, 4), rat(7, 8)).unwrap();
        action(vec![("f", f), ("g", g)], 4)
    }

    #[test]
    fn single_generator_has_no_chain() {
        let (a, _) = crate::exact_pl::thompson_generators();
        let act = action(vec![("A", a)], 4);
        assert_eq!(find_two_chain(&act), None);
        assert_eq!(find_crossed_pair(&act), None);
    }

    #[test]
    fn overlapping_bumps_form_a_chain() {
        let act = two_bumps();
        let chain = find_two_chain(&act).unwrap();
        assert_eq!(chain.j1, Interval::open(int(0), rat(3, 4)).unwrap());
        assert_eq!(chain.j2, Interval::open(rat(1, 4), int(1)).unwrap());
        assert!(chain.validate(act.generators()).unwrap());
    }

    #[test]
    fn overlapping_bumps_ping_pair_uses_bump_endpoints() {
        let act = two_bumps();
        let w = find_ping_pair(&act).unwrap();
        assert_eq!(w.variant, CrossedVariant::Ping { a: rat(1, 4), b: rat(3, 4) });
        assert!(w.validate(act.generators()).unwrap());
        let bw = find_boundary_crossed_pair(&act).unwrap();
        assert!(bw.validate(act.generators()).unwrap());
    }

    #[test]
    fn disjoint_bumps_never_chain() {
        let act = disjoint_bumps();
        assert_eq!(find_two_chain(&act), None);
        assert_eq!(find_crossed_pair(&act), None);
        assert_eq!(conradian_diagnostic(&act), ConradianVerdict::NoWitnessUpTo(4));
    }

    #[test]
    fn identity_action_has_no_crossed_pair() {
        let act = action(vec![("e", PLHomeo::identity())], 3);
        assert_eq!(find_crossed_pair(&act), None);
    }

    #[test]
    fn thompson_f_is_not_conradian() {
        let gens = standard_genset();
        // A and B alone are nested; a witness appears once words of length 2 are allowed
        let act1 = ActionSpec::new(gens.clone(), 1).unwrap();
        assert_eq!(conradian_diagnostic(&act1), ConradianVerdict::NoWitnessUpTo(1));
        let act2 = ActionSpec::new(gens.clone(), 2).unwrap();
        match conradian_diagnostic(&act2) {
            ConradianVerdict::NonConradian(c) => assert!(c.validate(&gens).unwrap()),
            v => panic!("expected a witness, got {v}"),
        }
    }
}
