use rayon::prelude::*;

use super::holder::{holder_norm, uniform_grid, HOLDER_INFLATION};
use super::witness::{orbit, tail_estimate, NestingWitness};
use super::RegularityError;
use crate::exact_pl::rational::to_f64;

/// Smallest `k ≥ 2` with `τ(1+τ)^{k−2} ≥ 1`.
pub fn min_k_for_tau(tau: f64) -> Result<usize, RegularityError> {
    check_tau(tau)?;
    let mut k = 2;
    let mut lhs = tau;
    while lhs < 1.0 {
        lhs *= 1.0 + tau;
        k += 1;
    }
    Ok(k)
}

/// `⌈1 + 1/τ⌉`.
pub fn k_tau_lower_bound(tau: f64) -> Result<usize, RegularityError> {
    check_tau(tau)?;
    Ok((1.0 + 1.0 / tau).ceil() as usize)
}

fn check_tau(tau: f64) -> Result<(), RegularityError> {
    if tau > 0.0 && tau <= 1.0 {
        Ok(())
    } else {
        Err(RegularityError::Samples(format!("tau {tau} outside (0,1]")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnestRow {
    pub n: usize,
    pub length_j1: f64,
    pub partial_sum: f64,
    /// `|w_n J_{k−1}|`.
    pub claim_lhs: f64,
    /// `N^{2^{k−2}−1} |w_n J₁|^{(1+τ)^{k−2}}`.
    pub claim_rhs: f64,
    pub claim_holds: bool,
    /// `ln(t′ − 1)` upper bound forced on `w_n J_{k−1}` by the Hölder estimate of `t′`.
    pub log_excess_upper: f64,
    /// `ln(max t′ − 1)` over a grid of `w_n J_{k−1}`, `-inf` when `max t′ ≤ 1`.
    pub log_excess_observed: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnestReport {
    pub k: usize,
    pub tau: f64,
    pub u: f64,
    /// `τ(1+τ)^{k−2} ≥ u`: the witness cannot exist in `C^{1,τ}`.
    pub lemma_applies: bool,
    /// `1 + max_s ([s′]_τ + [log s′]_τ)`, grid estimate.
    pub big_n: f64,
    /// `N^{2^{k−2}} Σ |w_n J₁|^u`.
    pub big_n_bar: f64,
    /// `ln(e^{−N̄} |J_k| / |J_{k−1}|)`: logarithm of the excess in the lower
    /// bound `t′(x_n) ≥ 1 + e^{−N̄}|J_k|/|J_{k−1}|`.
    pub log_excess_lower: f64,
    pub rows: Vec<KnestRow>,
    /// First step `n ≤ n_max` at which the Hölder-forced upper bound or the
    /// observed derivative falls below the lower bound.
    pub visible_at: Option<usize>,
    /// First step at which the upper bound falls below the lower bound when
    /// `|w_n J_{k−1}|` is extrapolated geometrically past `n_max`.
    pub forced_at: Option<usize>,
}

impl KnestReport {
    pub fn inconsistency_flagged(&self) -> bool {
        self.visible_at.is_some() || self.forced_at.is_some()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,length,partial_sum,claim_lhs,claim_rhs,log_excess_upper,log_excess_lower\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                r.n, r.length_j1, r.partial_sum, r.claim_lhs, r.claim_rhs, r.log_excess_upper, self.log_excess_lower
            ));
        }
        s
    }
}

/// Grid estimates of `[s′]_τ` and `[log s′]_τ`.
fn derivative_norms(w: &NestingWitness, grid: &[f64], tau: f64) -> Result<Vec<(f64, f64)>, RegularityError> {
    w.maps()
        .par_iter()
        .map(|m| {
            let d: Vec<f64> = grid.iter().map(|&x| m.deriv(x)).collect();
            let logd: Vec<f64> = d.iter().map(|v| v.ln()).collect();
            Ok((holder_norm(grid, &d, tau)?.value, holder_norm(grid, &logd, tau)?.value))
        })
        .collect()
}

/// Sample grid: uniform on [0,1] refined on `J₁`.
fn sample_grid(w: &NestingWitness, points: usize) -> Vec<f64> {
    let j1 = &w.intervals()[0];
    let mut g = uniform_grid(0.0, 1.0, points);
    g.extend(uniform_grid(to_f64(j1.lo()), to_f64(j1.hi()), points / 2));
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Quantities of the Nesting Lemma's proof for `w` at exponent `τ`, treating
/// the maps as if they were `C^{1,τ}` with the grid norms (inflated by
/// [`HOLDER_INFLATION`]).
pub fn knest_contradiction_quantities(
    w: &NestingWitness,
    tau: f64,
    n_max: usize,
    grid_points: usize,
) -> Result<KnestReport, RegularityError> {
    check_tau(tau)?;
    let k = w.k();
    let grid = sample_grid(w, grid_points.max(16));
    let norms = derivative_norms(w, &grid, tau)?;
    let big_n = 1.0 + norms.iter().map(|(a, b)| HOLDER_INFLATION * (a + b)).fold(0.0, f64::max);
    let orbit = orbit(w, n_max)?;
    let l1 = orbit.lengths(0);
    let lk1 = orbit.lengths(k - 2);
    let lk = orbit.lengths(k - 1);
    let pow2 = 2f64.powi(k as i32 - 2);
    let exponent = (1.0 + tau).powi(k as i32 - 2);
    let sum_u: f64 = l1.iter().map(|l| l.powf(w.u())).sum();
    let big_n_bar = big_n.powf(pow2) * sum_u;
    let log_excess_lower = -big_n_bar + (lk[0] / lk1[0]).ln();

    let endpoints: Vec<(f64, f64)> = match &orbit {
        super::witness::Orbit::Exact(v) => {
            v.iter().map(|js| (to_f64(js[k - 2].lo()), to_f64(js[k - 2].hi()))).collect()
        }
        super::witness::Orbit::Approx(v) => v.iter().map(|js| js[k - 2]).collect(),
    };
    let mut rows = Vec::with_capacity(n_max + 1);
    let mut partial = 0.0;
    let mut visible_at = None;
    for n in 0..=n_max {
        partial += l1[n].powf(w.u());
        let t = w
            .certificate(n, k)
            .ok_or_else(|| RegularityError::MalformedWitness(format!("no certificate for step {n}, level {k}")))?;
        let t_map = &w.maps()[t];
        let t_norm = HOLDER_INFLATION * norms[t].0;
        let log_excess_upper = t_norm.ln() + tau * lk1[n].ln();
        let (a, b) = endpoints[n];
        let observed = uniform_grid(a, b, 64).into_iter().map(|x| t_map.deriv(x)).fold(f64::MIN, f64::max);
        let log_excess_observed = if observed > 1.0 { (observed - 1.0).ln() } else { f64::NEG_INFINITY };
        let claim_rhs = big_n.powf(pow2 - 1.0) * l1[n].powf(exponent);
        if visible_at.is_none() && (log_excess_upper < log_excess_lower || log_excess_observed < log_excess_lower) {
            visible_at = Some(n);
        }
        rows.push(KnestRow {
            n,
            length_j1: l1[n],
            partial_sum: partial,
            claim_lhs: lk1[n],
            claim_rhs,
            claim_holds: lk1[n] <= claim_rhs * (1.0 + 1e-12),
            log_excess_upper,
            log_excess_observed,
        });
    }
    let forced_at = visible_at.or_else(|| {
        let (rho, _) = tail_estimate(&lk1, 1.0);
        let rho = rho?;
        if !(rho < 1.0 && rho > 0.0) {
            return None;
        }
        let last = rows.last()?.log_excess_upper;
        // upper(n) = last + τ (n − n_max) ln ρ
        let gap = last - log_excess_lower;
        let steps = (gap / (-tau * rho.ln())).floor() as usize + 1;
        n_max.checked_add(steps)
    });
    Ok(KnestReport {
        k,
        tau,
        u: w.u(),
        lemma_applies: tau * (1.0 + tau).powi(k as i32 - 2) >= w.u(),
        big_n,
        big_n_bar,
        log_excess_lower,
        rows,
        visible_at,
        forced_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_two_claim_is_trivial_and_contradiction_is_forced() {
        let w = crate::dynamics::translation_example_witness(30);
        let r = knest_contradiction_quantities(&w, 0.5, 30, 400).unwrap();
        assert!(r.rows.iter().all(|row| row.claim_holds && row.claim_lhs == row.length_j1));
        // τ(1+τ)^0 = 1/2 < u = 1 for k = 2, yet the forced index is reported
        assert!(!r.lemma_applies);
        assert!(r.inconsistency_flagged());
        let sum: f64 = r.rows.iter().map(|row| row.length_j1).sum();
        assert!((r.big_n_bar - r.big_n * sum).abs() <= 1e-9 * r.big_n_bar);
    }

    #[test]
    fn single_term_big_n_bar() {
        let w = crate::dynamics::translation_example_witness(4);
        let r = knest_contradiction_quantities(&w, 0.5, 0, 200).unwrap();
        let j1 = to_f64(&w.intervals()[0].length());
        assert!((r.big_n_bar - r.big_n * j1).abs() <= 1e-12 * r.big_n_bar);
    }

    #[test]
    fn min_k_values() {
        assert_eq!(min_k_for_tau(1.0).unwrap(), 2);
        assert_eq!(min_k_for_tau(0.5).unwrap(), 4);
        assert_eq!(k_tau_lower_bound(0.5).unwrap(), 3);
        assert!(min_k_for_tau(0.0).is_err());
        assert!(k_tau_lower_bound(1.5).is_err());
    }

    #[test]
    fn min_k_is_tight() {
        for i in 1..=100 {
            let tau = i as f64 / 100.0;
            let k = min_k_for_tau(tau).unwrap();
            assert!(tau * (1.0 + tau).powi(k as i32 - 2) >= 1.0);
            if k > 2 {
                assert!(tau * (1.0 + tau).powi(k as i32 - 3) < 1.0);
            }
        }
    }
}
