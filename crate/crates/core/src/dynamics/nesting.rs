use std::collections::{BTreeMap, HashSet};
use std::ops::RangeInclusive;

use super::{component_catalogue, find_two_chain_among, ActionSpec, DynamicsError, TwoChain};
use crate::exact_pl::rational::{fmt_rational, int, rat};
use crate::exact_pl::{bump, enumerate_elements, half_copy, GenSet, Interval, PLHomeo, Rational};
use crate::regularity::{check_condition_ii, NestingWitness, WitnessMap};

/// Maximum number of elements kept per sampled derived level.
const LEVEL_CAP: usize = 64;

/// `∏_{n ∈ range} cⁿ g cⁿ⁻¹`. The copies must have pairwise disjoint supports,
/// which holds when `supp g` lies in a fundamental domain of `c`.
pub fn periodize(g: &PLHomeo, c: &PLHomeo, range: RangeInclusive<i64>) -> PLHomeo {
    let mut acc = PLHomeo::identity();
    let (lo, hi) = (*range.start(), *range.end());
    let mut cn = c.pow(lo);
    let mut n = lo;
    while n <= hi {
        acc = acc.compose(&cn.conjugate(g));
        cn = c.compose(&cn);
        n += 1;
    }
    acc
}

/// A two-chain meeting `supp c`, for `c` commuting with the action on the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralizerCertificate {
    pub chain: TwoChain,
    pub c_component: Interval,
}

fn check_centralizes(c: &PLHomeo, gens: &GenSet, window: &(Rational, Rational)) -> Result<(), DynamicsError> {
    for (name, g) in gens {
        if !c.commutes_on(g, &window.0, &window.1) {
            return Err(DynamicsError::NotCentralizing(name.clone()));
        }
    }
    Ok(())
}

fn full_window() -> (Rational, Rational) {
    (int(0), int(1))
}

/// Looks for the configuration excluded for C^{1,τ} actions: `c` commutes with
/// every generator (exactly, on `window`), yet some two-chain of the action
/// lying in the window has union meeting `supp c`.
///
/// For maps with finitely many breakpoints commuting on all of [0,1] such a
/// chain cannot exist; a window lets truncated periodic models exhibit it.
pub fn centralizer_obstruction(
    c: &PLHomeo,
    action: &ActionSpec,
    window: Option<(Rational, Rational)>,
) -> Result<Option<CentralizerCertificate>, DynamicsError> {
    let window = window.unwrap_or_else(full_window);
    check_centralizes(c, action.generators(), &window)?;
    let c_comps = c.support_components();
    if c_comps.is_empty() {
        return Ok(None);
    }
    let win = Interval::closed(window.0.clone(), window.1.clone())?;
    let catalogue: Vec<_> =
        component_catalogue(&action.elements()).into_iter().filter(|comp| comp.interval.is_subset_of(&win)).collect();
    for (j, cj) in catalogue.iter().enumerate() {
        for ci in &catalogue[..j] {
            let pair = [ci.clone(), cj.clone()];
            if let Some(chain) = find_two_chain_among(&pair) {
                if let Some(k) = c_comps.iter().find(|k| k.overlaps(&chain.j1) || k.overlaps(&chain.j2)) {
                    return Ok(Some(CentralizerCertificate { chain, c_component: k.clone() }));
                }
            }
        }
    }
    Ok(None)
}

/// Commutators `[x, y]` over pairs of `prev` (in order), nontrivial and
/// distinct, capped at [`LEVEL_CAP`].
fn next_derived_level(prev: &[PLHomeo]) -> Vec<PLHomeo> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    'outer: for (i, x) in prev.iter().enumerate() {
        for y in &prev[i + 1..] {
            let z = x.commutator(y);
            if !z.is_identity() && seen.insert(z.clone()) {
                out.push(z);
                if out.len() >= LEVEL_CAP {
                    break 'outer;
                }
            }
        }
    }
    out
}

fn support_hull(gens: &GenSet) -> Option<Interval> {
    let comps: Vec<Interval> = gens.values().flat_map(|g| g.support_components()).collect();
    let lo = comps.iter().map(|j| j.lo()).min()?.clone();
    let hi = comps.iter().map(|j| j.hi()).max()?.clone();
    Interval::open(lo, hi).ok()
}

/// Proper subinterval of `j` displaced off itself by `g` (`g` has no fixed
/// point in `j`).
fn displaced_subinterval(g: &PLHomeo, j: &Interval) -> Interval {
    let x = j.midpoint();
    let y = g.eval_unchecked(&x);
    if y > x {
        Interval::open(x, y).unwrap()
    } else {
        Interval::open(y, x).unwrap()
    }
}

fn disjoint(a: &Interval, b: &Interval) -> bool {
    !a.overlaps(b)
}

/// Builds `J₁ ⊋ … ⊋ J_k` and `g₂, …, g_k` from sampled derived levels, then
/// appends the translation `c^N` with `J₁ ∩ c^N J₁ = ∅`.
///
/// `c` must commute with every generator on `window` (exactly) and have no
/// fixed point inside the support hull of the action. Returns `Ok(None)` when
/// no chain of intervals is realizable at the word budget. The returned
/// witness has been checked for condition (ii) up to `horizon` steps.
pub fn extract_nesting_witness(
    action: &ActionSpec,
    k: usize,
    c: &PLHomeo,
    window: Option<(Rational, Rational)>,
    horizon: usize,
) -> Result<Option<NestingWitness>, DynamicsError> {
    if k < 2 {
        return Err(DynamicsError::DepthTooSmall);
    }
    let window = window.unwrap_or_else(full_window);
    check_centralizes(c, action.generators(), &window)?;
    let Some(hull) = support_hull(action.generators()) else {
        return Ok(None);
    };
    if !c.support_components().iter().any(|u| hull.is_subset_of(u)) {
        let fixed = c
            .support_components()
            .iter()
            .flat_map(|u| [u.lo().clone(), u.hi().clone()])
            .chain([int(0), int(1)])
            .find(|x| hull.contains(x))
            .unwrap_or_else(|| hull.midpoint());
        return Err(DynamicsError::CentralFixedPoint(fmt_rational(&fixed)));
    }

    let mut levels: Vec<Vec<PLHomeo>> =
        vec![enumerate_elements(action.generators(), action.word_budget()).into_iter().map(|(_, g)| g).collect()];
    for _ in 1..=k {
        let next = next_derived_level(levels.last().unwrap());
        levels.push(next);
    }

    for g_k in &levels[k] {
        let Some(chain) = climb(g_k, &levels, k) else {
            continue;
        };
        let (intervals, movers) = chain;
        let j1 = intervals[0].clone();
        if !(Interval::open(window.0.clone(), window.1.clone())?.closure_inside_or_eq(&j1)) {
            continue;
        }
        let Some((n_shift, c_n)) = separating_power(c, &j1) else {
            continue;
        };
        let mut maps = vec![WitnessMap::pl(format!("c^{n_shift}"), c_n)];
        let mut defaults = BTreeMap::new();
        for (offset, g) in movers.into_iter().enumerate() {
            let level = offset + 2;
            maps.push(WitnessMap::pl(format!("g{level}"), g));
            defaults.insert(level, maps.len() - 1);
        }
        let witness = NestingWitness::new(maps, intervals, 1.0, vec![0], true, defaults, BTreeMap::new())
            .map_err(|e| DynamicsError::Witness(e.to_string()))?;
        return match check_condition_ii(&witness, horizon) {
            Ok(None) => Ok(Some(witness)),
            _ => Err(DynamicsError::NotCentralizing(format!("c beyond the window at horizon {horizon}"))),
        };
    }
    Ok(None)
}

/// Intervals `J₁..J_k` and movers `g₂..g_k` (index 0 ↦ g₂).
fn climb(g_k: &PLHomeo, levels: &[Vec<PLHomeo>], k: usize) -> Option<(Vec<Interval>, Vec<PLHomeo>)> {
    let j_km1 = g_k.support_components().into_iter().find(|j| j.lo() > &int(0) && j.hi() < &int(1))?;
    let j_k = displaced_subinterval(g_k, &j_km1);
    // built from the innermost outward
    let mut intervals = vec![j_k, j_km1];
    let mut movers = vec![g_k.clone()];
    for i in (2..k).rev() {
        let inner = intervals.last().unwrap().clone();
        let found = levels[i].iter().find_map(|g| {
            let moved = g.image(&inner);
            if !disjoint(&moved, &inner) {
                return None;
            }
            g.support_components()
                .into_iter()
                .find(|comp| inner.is_proper_subset_of(comp) && comp.lo() > &int(0) && comp.hi() < &int(1))
                .map(|comp| (g.clone(), comp))
        });
        let (g, outer) = found?;
        movers.push(g);
        intervals.push(outer);
    }
    intervals.reverse();
    movers.reverse();
    Some((intervals, movers))
}

/// Smallest `N ≥ 1` with `J ∩ c^N J = ∅`, and `c^N`.
fn separating_power(c: &PLHomeo, j: &Interval) -> Option<(usize, PLHomeo)> {
    let mut cn = c.clone();
    for n in 1..=4096 {
        if disjoint(&cn.image(j), j) {
            return Some((n, cn));
        }
        cn = c.compose(&cn);
    }
    None
}

impl Interval {
    /// The closed window contains `j`.
    fn closure_inside_or_eq(&self, j: &Interval) -> bool {
        self.lo() <= j.lo() && j.hi() <= self.hi()
    }
}

/// Result of the F₋/F₊ commutator support check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FCheckReport {
    pub budget: usize,
    pub minus_commutators: usize,
    pub plus_commutators: usize,
    /// Hull of all `[F₋,F₋]` commutator supports, if any is nontrivial.
    pub minus_hull: Option<Interval>,
    pub plus_hull: Option<Interval>,
    pub minus_inside: bool,
    pub plus_inside: bool,
    pub disjoint: bool,
}

impl FCheckReport {
    pub fn passed(&self) -> bool {
        self.minus_inside && self.plus_inside && self.disjoint
    }
}

fn commutator_supports(gens: &GenSet, budget: usize) -> (usize, Vec<Interval>) {
    let elems: Vec<PLHomeo> = enumerate_elements(gens, budget).into_iter().map(|(_, g)| g).collect();
    let mut count = 0;
    let mut comps = Vec::new();
    let mut seen = HashSet::new();
    for (i, x) in elems.iter().enumerate() {
        for y in &elems[i + 1..] {
            let z = x.commutator(y);
            if z.is_identity() || !seen.insert(z.clone()) {
                continue;
            }
            count += 1;
            comps.extend(z.support_components());
        }
    }
    (count, comps)
}

fn hull(comps: &[Interval]) -> Option<Interval> {
    let lo = comps.iter().map(|j| j.lo()).min()?.clone();
    let hi = comps.iter().map(|j| j.hi()).max()?.clone();
    Interval::open(lo, hi).ok()
}

/// Commutators of words of length ≤ `budget` in the minus copy of F (supported
/// in [0,1/2]) and in the plus copy (in [1/2,1]) have supports exactly inside
/// (0,1/2) and (1/2,1) respectively, hence disjoint.
pub fn f_disjoint_commutators_check(budget: usize) -> FCheckReport {
    let half = rat(1, 2);
    let (minus_commutators, minus) = commutator_supports(&half_copy(false), budget);
    let (plus_commutators, plus) = commutator_supports(&half_copy(true), budget);
    let left = Interval::open(int(0), half.clone()).unwrap();
    let right = Interval::open(half, int(1)).unwrap();
    let minus_inside = minus.iter().all(|j| j.is_subset_of(&left));
    let plus_inside = plus.iter().all(|j| j.is_subset_of(&right));
    let disjoint = minus.iter().all(|j| plus.iter().all(|k| !j.overlaps(k)));
    FCheckReport {
        budget,
        minus_commutators,
        plus_commutators,
        minus_hull: hull(&minus),
        plus_hull: hull(&plus),
        minus_inside,
        plus_inside,
        disjoint,
    }
}

/// The translation-like map used by the periodic models: slope 2 on [0,1/4]
/// and 2/3 on [1/4,1], with no fixed point in (0,1). `[1/4,1/2]` is a
/// fundamental domain.
pub fn translation_like() -> PLHomeo {
    PLHomeo::new(vec![(int(0), int(0)), (rat(1, 4), rat(1, 2)), (int(1), int(1))]).unwrap()
}

/// Generators of a Conradian tower `⟨a, b, e⟩` inside the fundamental domain
/// `(1/4, 1/2)`: `a` moves the whole domain, `b` is a bump inside a
/// fundamental domain of `a`, `e` a bump inside a fundamental domain of `b`.
/// The second derived subgroup is nontrivial.
pub fn tower_seed() -> GenSet {
    let a = PLHomeo::new(vec![
        (int(0), int(0)),
        (rat(1, 4), rat(1, 4)),
        (rat(3, 8), rat(7, 16)),
        (rat(1, 2), rat(1, 2)),
        (int(1), int(1)),
    ])
    .unwrap();
    let b = bump(rat(41, 128), rat(43, 128), rat(21, 64), rat(85, 256)).unwrap();
    let e = bump(rat(337, 1024), rat(339, 1024), rat(169, 512), rat(677, 2048)).unwrap();
    [("a".to_string(), a), ("b".to_string(), b), ("e".to_string(), e)].into_iter().collect()
}

/// Copies of F rescaled into the fundamental domain `(1/4, 1/2)`.
pub fn f_seed() -> GenSet {
    let (lo, hi) = (rat(1, 4), rat(1, 2));
    let (a, b) = crate::exact_pl::thompson_generators();
    [("A".to_string(), a.rescaled_into(&lo, &hi)), ("B".to_string(), b.rescaled_into(&lo, &hi))].into_iter().collect()
}

/// Periodizes each seed generator over `c^n` copies for `n ∈ range` and
/// returns the generators together with the window on which they commute
/// with `c` exactly.
pub fn periodic_model(seed: &GenSet, c: &PLHomeo, range: RangeInclusive<i64>) -> (GenSet, (Rational, Rational)) {
    let gens = seed.iter().map(|(n, g)| (n.clone(), periodize(g, c, range.clone()))).collect();
    let d = rat(1, 4);
    let lo = c.pow(*range.start()).eval_unchecked(&d);
    let hi = c.pow(*range.end()).eval_unchecked(&d);
    (gens, (lo, hi))
}

/// The basic (2,1)-nesting: `c` translation-like, `g` a bump on
/// `J₁ = (5/16, 3/8)` inside the fundamental domain, `J₂ = (11/32, 23/64)`
/// displaced by `g`, and `w_n = cⁿ`. `g` is periodized over copies `0..=copies`,
/// so condition (ii) holds exactly for `n ≤ copies`.
pub fn translation_example_witness(copies: i64) -> NestingWitness {
    let c = translation_like();
    let g0 = bump(rat(5, 16), rat(3, 8), rat(11, 32), rat(23, 64)).unwrap();
    let g = periodize(&g0, &c, 0..=copies);
    let j1 = Interval::open(rat(5, 16), rat(3, 8)).unwrap();
    let j2 = Interval::open(rat(11, 32), rat(23, 64)).unwrap();
    NestingWitness::new(
        vec![WitnessMap::pl("c", c), WitnessMap::pl("g", g)],
        vec![j1, j2],
        1.0,
        vec![0],
        true,
        [(2, 1)].into_iter().collect(),
        BTreeMap::new(),
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regularity::verify_nesting_witness;

    #[test]
    fn periodized_copies_commute_with_c_on_the_window() {
        let c = translation_like();
        let (gens, window) = periodic_model(&tower_seed(), &c, -2..=6);
        for g in gens.values() {
            assert!(c.commutes_on(g, &window.0, &window.1));
            assert!(!c.commutes_with(g));
        }
    }

    #[test]
    fn non_centralizing_element_is_rejected() {
        let (a, b) = crate::exact_pl::thompson_generators();
        let act = ActionSpec::new([("B".to_string(), b)].into_iter().collect(), 2).unwrap();
        assert!(matches!(centralizer_obstruction(&a, &act, None), Err(DynamicsError::NotCentralizing(_))));
    }

    #[test]
    fn identity_center_gives_no_certificate() {
        let act = ActionSpec::new(crate::exact_pl::standard_genset(), 2).unwrap();
        assert_eq!(centralizer_obstruction(&PLHomeo::identity(), &act, None).unwrap(), None);
    }

    #[test]
    fn conradian_tower_gives_no_centralizer_certificate() {
        let c = translation_like();
        let (gens, window) = periodic_model(&tower_seed(), &c, -1..=4);
        let act = ActionSpec::new(gens, 2).unwrap();
        assert_eq!(centralizer_obstruction(&c, &act, Some(window)).unwrap(), None);
    }

    #[test]
    fn periodic_f_model_yields_certificate() {
        let c = translation_like();
        let (gens, window) = periodic_model(&f_seed(), &c, -1..=3);
        let act = ActionSpec::new(gens, 2).unwrap();
        let cert = centralizer_obstruction(&c, &act, Some(window)).unwrap().unwrap();
        assert!(cert.chain.validate(act.generators()).unwrap());
        assert!(cert.c_component.overlaps(&cert.chain.j1));
    }

    #[test]
    fn abelian_action_has_no_nesting() {
        let c = translation_like();
        let (gens, window) =
            periodic_model(&[("a".to_string(), tower_seed()["a"].clone())].into_iter().collect(), &c, -1..=6);
        let act = ActionSpec::new(gens, 2).unwrap();
        assert_eq!(extract_nesting_witness(&act, 2, &c, Some(window), 4).unwrap(), None);
    }

    #[test]
    fn tower_model_yields_a_two_one_nesting() {
        let c = translation_like();
        let (gens, window) = periodic_model(&tower_seed(), &c, -1..=12);
        let act = ActionSpec::new(gens, 1).unwrap();
        let w = extract_nesting_witness(&act, 2, &c, Some(window), 8).unwrap().unwrap();
        assert_eq!(w.k(), 2);
        let report = verify_nesting_witness(&w, 8, 1e-3).unwrap();
        assert!(report.accepted());
        // depth 3 exceeds the derived length of the tower
        assert_eq!(extract_nesting_witness(&act, 3, &c, Some(window_of(&c)), 4).unwrap(), None);
    }

    fn window_of(c: &PLHomeo) -> (Rational, Rational) {
        periodic_model(&tower_seed(), c, -1..=12).1
    }

    #[test]
    fn fixed_point_of_c_in_support_is_an_error() {
        // B fixes (0, 1/2], which lies inside the support of A; commutation is vacuous on a degenerate window
        let (a, b) = crate::exact_pl::thompson_generators();
        let act_a = ActionSpec::new([("A".to_string(), a)].into_iter().collect(), 1).unwrap();
        assert!(matches!(
            extract_nesting_witness(&act_a, 2, &b, Some((int(0), int(0))), 1),
            Err(DynamicsError::CentralFixedPoint(_))
        ));
        let act_b = ActionSpec::new([("B".to_string(), b.clone())].into_iter().collect(), 1).unwrap();
        assert!(matches!(extract_nesting_witness(&act_b, 1, &b, None, 1), Err(DynamicsError::DepthTooSmall)));
    }

    #[test]
    fn f_halves_have_disjoint_commutator_supports() {
        let r = f_disjoint_commutators_check(2);
        assert!(r.passed());
        assert!(r.minus_commutators > 0 && r.plus_commutators > 0);
        let h = r.minus_hull.unwrap();
        assert!(h.hi() <= &rat(1, 2));
    }

    #[test]
    fn single_commutator_supports() {
        let minus = half_copy(false);
        let z = minus["A-"].commutator(&minus["B-"]);
        let left = Interval::open(int(0), rat(1, 2)).unwrap();
        assert!(!z.is_identity());
        assert!(z.support_components().iter().all(|j| j.is_subset_of(&left)));
        let plus = half_copy(true);
        let z = plus["A+"].commutator(&plus["B+"]);
        let right = Interval::open(rat(1, 2), int(1)).unwrap();
        assert!(z.support_components().iter().all(|j| j.is_subset_of(&right)));
    }
}
