use super::{ActionSpec, TwoChain};
use crate::exact_pl::{GroupWord, Interval, PLHomeo};

/// Budget-relative partition of the components of `supp G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportClassification {
    /// Components realized as a support component of some word of length
    /// ≤ budget, with that word.
    pub nested: Vec<(Interval, GroupWord)>,
    /// Remaining components of `supp G`.
    pub crossed_candidates: Vec<Interval>,
    /// For each crossed candidate, consecutive maximal generator components
    /// forming two-chains whose union covers it.
    pub coverings: Vec<Vec<TwoChain>>,
}

/// `supp f ∩ supp g ≠ ∅`.
pub fn is_overlapping_pair(f: &PLHomeo, g: &PLHomeo) -> bool {
    let cf = f.support_components();
    let cg = g.support_components();
    cf.iter().any(|j| cg.iter().any(|k| j.overlaps(k)))
}

/// Every component of `f` and every component of `g` are disjoint or nested.
pub fn check_nested_or_disjoint(f: &PLHomeo, g: &PLHomeo) -> bool {
    let cf = f.support_components();
    let cg = g.support_components();
    cf.iter().all(|j| cg.iter().all(|k| !j.overlaps(k) || j.is_subset_of(k) || k.is_subset_of(j)))
}

/// Merges overlapping open intervals. Intervals that only touch stay apart,
/// since the shared endpoint is fixed by everything.
fn merge(mut intervals: Vec<Interval>) -> Vec<Interval> {
    intervals.sort_by(|a, b| a.lo().cmp(b.lo()));
    let mut out: Vec<Interval> = Vec::new();
    for j in intervals {
        match out.last_mut() {
            Some(last) if j.lo() < last.hi() => {
                if j.hi() > last.hi() {
                    *last = Interval::open(last.lo().clone(), j.hi().clone()).unwrap();
                }
            }
            _ => out.push(j),
        }
    }
    out
}

pub fn classify_supports(action: &ActionSpec) -> SupportClassification {
    let gen_components: Vec<(Interval, GroupWord)> = action
        .generators()
        .iter()
        .flat_map(|(n, g)| g.support_components().into_iter().map(move |j| (j, GroupWord::generator(n))))
        .collect();
    let supp_g = merge(gen_components.iter().map(|(j, _)| j.clone()).collect());
    let elements = action.elements();

    let mut nested = Vec::new();
    let mut crossed_candidates = Vec::new();
    let mut coverings = Vec::new();
    for j0 in supp_g {
        let realized = elements.iter().find(|(_, g)| g.support_components().contains(&j0)).map(|(w, _)| w.clone());
        match realized {
            Some(w) => nested.push((j0, w)),
            None => {
                coverings.push(generator_level_cover(&j0, &gen_components));
                crossed_candidates.push(j0);
            }
        }
    }
    SupportClassification { nested, crossed_candidates, coverings }
}

/// Maximal generator components inside `j0`, chained left to right. Each
/// consecutive pair is a two-chain because neither contains the other.
fn generator_level_cover(j0: &Interval, gen_components: &[(Interval, GroupWord)]) -> Vec<TwoChain> {
    let inside: Vec<&(Interval, GroupWord)> = gen_components.iter().filter(|(j, _)| j.is_subset_of(j0)).collect();
    let mut maximal: Vec<&(Interval, GroupWord)> =
        inside.iter().copied().filter(|(j, _)| !inside.iter().any(|(k, _)| j.is_proper_subset_of(k))).collect();
    maximal.sort_by(|a, b| a.0.lo().cmp(b.0.lo()));
    maximal.dedup_by(|a, b| a.0 == b.0);
    maximal
        .windows(2)
        .map(|w| TwoChain { j1: w[0].0.clone(), j2: w[1].0.clone(), g1: w[0].1.clone(), g2: w[1].1.clone() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_pl::rational::{int, rat};
    use crate::exact_pl::{bump, standard_genset, GenSet};

    fn spec(gens: Vec<(&str, PLHomeo)>, budget: usize) -> ActionSpec {
        ActionSpec::new(gens.into_iter().map(|(n, g)| (n.to_string(), g)).collect::<GenSet>(), budget).unwrap()
    }

    #[test]
    fn overlap_examples() {
        let (a, b) = crate::exact_pl::thompson_generators();
        assert!(!is_overlapping_pair(&PLHomeo::identity(), &a));
        assert!(is_overlapping_pair(&a, &b));
        let f = bump(int(0), rat(1, 2), rat(1, 4), rat(3, 8)).unwrap();
        let g = bump(rat(1, 2), int(1), rat(3, 4), rat(7, 8)).unwrap();
        assert!(!is_overlapping_pair(&f, &g));
    }

    #[test]
    fn nested_or_disjoint_examples() {
        let f = bump(int(0), rat(1, 2), rat(1, 4), rat(3, 8)).unwrap();
        let g = bump(rat(1, 2), int(1), rat(3, 4), rat(7, 8)).unwrap();
        assert!(check_nested_or_disjoint(&f, &g));
        let inner = bump(rat(1, 8), rat(3, 8), rat(1, 4), rat(5, 16)).unwrap();
        assert!(check_nested_or_disjoint(&f, &inner));
        let left = bump(int(0), rat(3, 4), rat(1, 2), rat(5, 8)).unwrap();
        let right = bump(rat(1, 4), int(1), rat(1, 2), rat(5, 8)).unwrap();
        assert!(!check_nested_or_disjoint(&left, &right));
    }

    #[test]
    fn single_bump_is_nested() {
        let f = bump(rat(1, 4), rat(3, 4), rat(1, 2), rat(5, 8)).unwrap();
        let c = classify_supports(&spec(vec![("f", f)], 2));
        assert_eq!(c.nested.len(), 1);
        assert!(c.crossed_candidates.is_empty());
    }

    #[test]
    fn disjoint_bumps_give_two_nested_components() {
        let f = bump(int(0), rat(1, 2), rat(1, 4), rat(3, 8)).unwrap();
        let g = bump(rat(1, 2), int(1), rat(3, 4), rat(7, 8)).unwrap();
        let c = classify_supports(&spec(vec![("f", f), ("g", g)], 2));
        assert_eq!(c.nested.len(), 2);
        assert!(c.crossed_candidates.is_empty());
    }

    #[test]
    fn crossed_bumps_merge_into_a_covered_candidate() {
        let f = bump(int(0), rat(3, 4), rat(1, 2), rat(5, 8)).unwrap();
        let g = bump(rat(1, 4), int(1), rat(1, 2), rat(5, 8)).unwrap();
        let act = spec(vec![("f", f), ("g", g)], 1);
        let c = classify_supports(&act);
        assert_eq!(c.crossed_candidates, vec![Interval::open(int(0), int(1)).unwrap()]);
        let cover = &c.coverings[0];
        assert_eq!(cover.len(), 1);
        assert!(cover[0].validate(act.generators()).unwrap());
        // f g moves every point of (0,1), so the component is realized at budget 2
        let c2 = classify_supports(&act.with_budget(2).unwrap());
        assert_eq!(c2.nested.len(), 1);
        assert!(c2.crossed_candidates.is_empty());
    }

    #[test]
    fn thompson_support_is_nested() {
        // A has (0,1) as its support component
        let c = classify_supports(&ActionSpec::new(standard_genset(), 1).unwrap());
        assert_eq!(c.nested.len(), 1);
        assert_eq!(c.nested[0].1.to_string(), "A");
    }
}
