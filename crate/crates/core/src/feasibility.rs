//! The parameter system (A)–(E) of the nested construction, its consolidated
//! `q/p` window, and the golden-ratio threshold.
//!
//! Writing `x = 1 − 1/r`, the system is equivalent to
//! `1/p + 1/q < x ≤ 1/(τp)`, `x ≤ 1/(1+τ²q)`, `x < 1 − τ`, and
//! `max(τq/(1−x), 1/x) ≤ q′ ≤ min(1/(τx), q)` (strict at `1/x` and `q`).
//! Eliminating `x` gives `τ/(1−τ) < q/p < min((1−τ)q − 1, ((1−τ²)q − 1)/(τ²q + 1))`,
//! whose upper end tends to `(1−τ²)/τ²` like the published window.

use rayon::prelude::*;

pub use crate::tsuboi::Params;

/// Slack of each condition; positive means satisfied with room.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residuals {
    /// `q′/q − rτ`, needs `≥ 0`.
    pub a_lower: f64,
    /// `1 − q′/q`, needs `> 0`.
    pub a_upper: f64,
    /// `1 − (1/p + 1/q + 1/r)`, needs `> 0`.
    pub b: f64,
    /// `1 − (1/q′ + 1/r)`, needs `> 0`.
    pub c: f64,
    /// `1 − τp(1 − 1/r)`, needs `≥ 0`.
    pub d: f64,
    /// `1 − τq′(1 − 1/r)`, needs `≥ 0`.
    pub e: f64,
}

impl Residuals {
    pub fn feasible(&self) -> bool {
        self.a_lower >= 0.0 && self.a_upper > 0.0 && self.b > 0.0 && self.c > 0.0 && self.d >= 0.0 && self.e >= 0.0
    }

    /// `(name, slack, strict)` per condition.
    pub fn entries(&self) -> [(&'static str, f64, bool); 6] {
        [
            ("A_lower", self.a_lower, false),
            ("A_upper", self.a_upper, true),
            ("B", self.b, true),
            ("C", self.c, true),
            ("D", self.d, false),
            ("E", self.e, false),
        ]
    }
}

pub fn check_conditions(params: &Params) -> Residuals {
    let Params { tau, p, q, q_prime, r } = *params;
    let x = 1.0 - 1.0 / r;
    Residuals {
        a_lower: q_prime / q - r * tau,
        a_upper: 1.0 - q_prime / q,
        b: 1.0 - (1.0 / p + 1.0 / q + 1.0 / r),
        c: 1.0 - (1.0 / q_prime + 1.0 / r),
        d: 1.0 - tau * p * x,
        e: 1.0 - tau * q_prime * x,
    }
}

/// The published window `τ/(1−τ) < q/p < min((1−τ)q−1, ((1−τ²)q−τ)/(τ²q+τ))`.
pub fn consolidated_window(tau: f64, q: f64) -> (f64, f64) {
    let lower = tau / (1.0 - tau);
    let upper = ((1.0 - tau) * q - 1.0).min(((1.0 - tau * tau) * q - tau) / (tau * tau * q + tau));
    (lower, upper)
}

/// The window obtained by eliminating `r` and `q′` exactly (module docs).
pub fn exact_window(tau: f64, q: f64) -> (f64, f64) {
    let lower = tau / (1.0 - tau);
    let upper = ((1.0 - tau) * q - 1.0).min(((1.0 - tau * tau) * q - 1.0) / (tau * tau * q + 1.0));
    (lower, upper)
}

/// `q ∈ {2, 4, …, 2²⁰}`.
pub fn q_grid() -> Vec<f64> {
    (1..=20).map(|e| 2f64.powi(e)).collect()
}

/// Admissible `x = 1 − 1/r` for given `τ, p, q`: `(lo, hi)` with `lo`
/// excluded, `hi` included only when it comes from (D).
fn x_range(tau: f64, p: f64, q: f64) -> (f64, f64) {
    let lo = 1.0 / p + 1.0 / q;
    let hi = (1.0 / (tau * p)).min(1.0 / (1.0 + tau * tau * q)).min(1.0 - tau);
    (lo, hi)
}

/// `q′` range for given `τ, q, r`: `[max(rτq, r/(r−1)), min(1/(τ(1−1/r)), q)]`.
fn q_prime_range(tau: f64, q: f64, r: f64) -> (f64, f64) {
    let x = 1.0 - 1.0 / r;
    (((r * tau * q).max(1.0 / x)), (1.0 / (tau * x)).min(q))
}

fn complete(tau: f64, p: f64, q: f64, r: f64) -> Option<Params> {
    if !(r > 1.0) {
        return None;
    }
    let (lo, hi) = q_prime_range(tau, q, r);
    if !(lo < hi) {
        return None;
    }
    let params = Params::new(tau, p, q, 0.5 * (lo + hi), r).ok()?;
    params.residuals().feasible().then_some(params)
}

/// Tuple for a given `q`, or `None` when the window at `q` is empty.
///
/// `q/p` is the midpoint of the intersection of the published and exact
/// windows. `r` is first taken as 0.99 times the (D)-tight value (or 2 when
/// `τp ≤ 1`); when that leaves no room for `q′`, `x = 1 − 1/r` is taken at the
/// midpoint of its admissible range.
pub fn feasible_at(tau: f64, q: f64) -> Option<Params> {
    let (lower, upper_pub) = consolidated_window(tau, q);
    let (_, upper_exact) = exact_window(tau, q);
    let upper = upper_pub.min(upper_exact);
    if !(lower < upper) {
        return None;
    }
    let ratio = 0.5 * (lower + upper);
    let p = q / ratio;
    if !(p > 1.0) {
        return None;
    }
    let r_default = if tau * p > 1.0 { 0.99 / (1.0 - 1.0 / (tau * p)) } else { 2.0 };
    complete(tau, p, q, r_default).or_else(|| {
        let (lo, hi) = x_range(tau, p, q);
        if !(lo < hi) {
            return None;
        }
        let x = 0.5 * (lo + hi);
        complete(tau, p, q, 1.0 / (1.0 - x))
    })
}

/// First feasible tuple along [`q_grid`].
pub fn find_feasible(tau: f64) -> Option<Params> {
    if !(tau > 0.0 && tau < 1.0) {
        return None;
    }
    q_grid().into_iter().find_map(|q| feasible_at(tau, q))
}

/// Binary search for the feasibility threshold on `(0,1)`.
pub fn sup_tau(tolerance: f64) -> f64 {
    let (mut lo, mut hi) = (0.01, 0.99);
    debug_assert!(find_feasible(lo).is_some() && find_feasible(hi).is_none());
    while hi - lo > tolerance.max(1e-12) {
        let mid = 0.5 * (lo + hi);
        if find_feasible(mid).is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `(−1 + √5)/2`.
pub fn golden_threshold() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionRow {
    pub tau: f64,
    pub q: f64,
    pub lower: f64,
    pub upper: f64,
    pub feasible: bool,
}

/// Published window over the grid, rows ordered by `τ` then `q`.
pub fn emit_region(tau_grid: &[f64], q_grid: &[f64]) -> Vec<RegionRow> {
    let pairs: Vec<(f64, f64)> = tau_grid.iter().flat_map(|&t| q_grid.iter().map(move |&q| (t, q))).collect();
    pairs
        .par_iter()
        .map(|&(tau, q)| {
            let (lower, upper) = consolidated_window(tau, q);
            RegionRow { tau, q, lower, upper, feasible: lower < upper }
        })
        .collect()
}

pub fn region_csv(rows: &[RegionRow]) -> String {
    let mut s = String::from("tau,q,lower,upper,feasible\n");
    for r in rows {
        s.push_str(&format!("{:.17e},{:.17e},{:.17e},{:.17e},{}\n", r.tau, r.q, r.lower, r.upper, r.feasible));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residuals_at_all_fours() {
        let r = check_conditions(&Params::new(0.5, 4.0, 4.0, 4.0, 4.0).unwrap());
        assert_eq!(r.b, 0.25);
        assert_eq!(r.d, -0.5);
        assert!(!r.feasible());
    }

    #[test]
    fn small_tau_degenerates() {
        let p = Params::new(1e-9, 3.0, 3.0, 3.0, 3.0).unwrap();
        let r = check_conditions(&p);
        assert!(r.d > 0.99 && r.e > 0.99);
        assert!((r.a_lower - 1.0).abs() < 1e-8);
    }

    #[test]
    fn window_examples() {
        let (lo, hi) = consolidated_window(0.6, 1e9);
        assert!((lo - 1.5).abs() < 1e-12);
        assert!((hi - 16.0 / 9.0).abs() < 1e-6);
        for q in q_grid() {
            let (lo, hi) = consolidated_window(0.63, q);
            assert!(lo > hi);
        }
        let phi = golden_threshold();
        let (lo, hi) = consolidated_window(phi, 1e15);
        assert!((lo - hi).abs() < 1e-9);
    }

    #[test]
    fn window_upper_increases_with_q() {
        for tau in [0.1, 0.3, 0.5, 0.6, 0.7, 0.9] {
            let grid: Vec<f64> = (1..200).map(|i| 1.0 + i as f64 * 0.37).collect();
            for w in grid.windows(2) {
                assert!(consolidated_window(tau, w[1]).1 > consolidated_window(tau, w[0]).1);
            }
        }
    }

    #[test]
    fn solver_round_trips() {
        for tau in [0.05, 0.1, 0.3, 0.5, 0.6, 0.61] {
            let p = find_feasible(tau).unwrap_or_else(|| panic!("no tuple at {tau}"));
            assert!(p.residuals().feasible(), "{p}: {:?}", p.residuals());
        }
        assert!(find_feasible(0.63).is_none());
        assert!(find_feasible(0.7).is_none());
    }

    #[test]
    fn threshold_is_golden() {
        assert!((sup_tau(1e-3) - 0.618).abs() <= 1e-3 + 1e-4);
        assert!((sup_tau(1e-1) - 0.618).abs() <= 0.1);
        assert!((sup_tau(1e-4) - golden_threshold()).abs() <= 2e-4);
    }

    #[test]
    fn region_rows() {
        let rows = emit_region(&[0.6, 0.63, 0.99], &[1e3, 8.0]);
        assert_eq!(rows.len(), 6);
        assert!(rows[0].feasible);
        assert!(rows[2..4].iter().all(|r| !r.feasible));
        assert!(rows[4..].iter().all(|r| !r.feasible && (r.lower - 99.0).abs() < 1e-9));
        assert!(region_csv(&rows).starts_with("tau,q,lower,upper,feasible\n"));
    }
}
