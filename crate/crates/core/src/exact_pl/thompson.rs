use super::homeo::PLHomeo;
use super::rational::{int, rat};
use super::word::GenSet;

/// The standard generating pair of Thompson's group F.
///
/// `A` is x/2 on [0,1/2], x−1/4 on [1/2,3/4] and 2x−1 on [3/4,1]; `B` is the
/// identity on [0,1/2] and a copy of `A` rescaled into [1/2,1].
pub fn thompson_generators() -> (PLHomeo, PLHomeo) {
    let a = PLHomeo::new(vec![(int(0), int(0)), (rat(1, 2), rat(1, 4)), (rat(3, 4), rat(1, 2)), (int(1), int(1))])
        .expect("standard generator A");
    let b = a.rescaled_into(&rat(1, 2), &int(1));
    (a, b)
}

pub fn standard_genset() -> GenSet {
    let (a, b) = thompson_generators();
    [("A".to_string(), a), ("B".to_string(), b)].into_iter().collect()
}

/// Copy of F supported in `[0,1/2]` (the minus copy) or `[1/2,1]` (plus copy),
/// generated by rescaled `A`, `B`.
pub fn half_copy(upper: bool) -> GenSet {
    let (a, b) = thompson_generators();
    let (lo, hi) = if upper { (rat(1, 2), int(1)) } else { (int(0), rat(1, 2)) };
    let suffix = if upper { "+" } else { "-" };
    [(format!("A{suffix}"), a.rescaled_into(&lo, &hi)), (format!("B{suffix}"), b.rescaled_into(&lo, &hi))]
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_belong_to_f() {
        let (a, b) = thompson_generators();
        assert!(a.is_dyadic_f_element());
        assert!(b.is_dyadic_f_element());
        assert_eq!(a.slopes(), vec![rat(1, 2), int(1), int(2)]);
        for g in half_copy(false).values().chain(half_copy(true).values()) {
            assert!(g.is_dyadic_f_element());
        }
    }

    #[test]
    fn b_is_rescaled_a() {
        let (_, b) = thompson_generators();
        assert_eq!(b.eval(&rat(1, 4)).unwrap(), rat(1, 4));
        assert_eq!(b.eval(&rat(3, 4)).unwrap(), rat(5, 8));
        assert_eq!(b.breakpoints().len(), 5);
    }

    #[test]
    fn non_dyadic_map_is_not_in_f() {
        let f = PLHomeo::new(vec![(int(0), int(0)), (rat(1, 3), rat(1, 2)), (int(1), int(1))]).unwrap();
        assert!(!f.is_dyadic_f_element());
    }
}
