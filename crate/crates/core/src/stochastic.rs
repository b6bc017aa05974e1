//! Monte Carlo checks of the random-sequence summability lemma and exact
//! ping-pong disjointness for positive words.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::exact_pl::rational::to_f64;
use crate::exact_pl::{Interval, PLHomeo};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StochasticError {
    #[error("invalid weight: {0}")]
    Weight(String),
    #[error("invalid sampling parameters: {0}")]
    Sampling(String),
    #[error("ping configuration violated: {0}")]
    Configuration(String),
}

type Result<T> = std::result::Result<T, StochasticError>;

type CustomWeight = Arc<dyn Fn(&[usize]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum WeightKind {
    Zero,
    /// `α(v) = d^{−2|v|}`.
    Geometric,
    /// `α(v) = d^{−|v|} / (|v|(|v|+1))`.
    Harmonic,
    /// `α(v) = Π π(v_i) / (|v|(|v|+1))` for a letter distribution `π`.
    Product(Vec<f64>),
    /// Arbitrary weight with every level mass `Σ_{|v|=n} α(v)` at most 1.
    Custom(CustomWeight),
}

/// A sub-probability weight on nonempty words over `{0,…,d−1}`.
#[derive(Clone)]
pub struct SeqWeight {
    d: usize,
    kind: WeightKind,
}

impl fmt::Debug for SeqWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            WeightKind::Zero => "zero".to_string(),
            WeightKind::Geometric => "geometric".to_string(),
            WeightKind::Harmonic => "harmonic".to_string(),
            WeightKind::Product(p) => format!("product{p:?}"),
            WeightKind::Custom(_) => "custom".to_string(),
        };
        write!(f, "SeqWeight(d={}, {kind})", self.d)
    }
}

fn harmonic(n: usize) -> f64 {
    1.0 / (n as f64 * (n as f64 + 1.0))
}

impl SeqWeight {
    pub fn new(d: usize, kind: WeightKind) -> Result<Self> {
        if d < 2 {
            return Err(StochasticError::Weight(format!("alphabet size {d} < 2")));
        }
        if let WeightKind::Product(p) = &kind {
            if p.len() != d || p.iter().any(|&x| !(x >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(StochasticError::Weight(format!("{p:?} is not a distribution on {d} letters")));
            }
        }
        Ok(SeqWeight { d, kind })
    }

    pub fn zero(d: usize) -> Result<Self> {
        SeqWeight::new(d, WeightKind::Zero)
    }

    pub fn geometric(d: usize) -> Result<Self> {
        SeqWeight::new(d, WeightKind::Geometric)
    }

    pub fn harmonic(d: usize) -> Result<Self> {
        SeqWeight::new(d, WeightKind::Harmonic)
    }

    pub fn product(letters: Vec<f64>) -> Result<Self> {
        SeqWeight::new(letters.len(), WeightKind::Product(letters))
    }

    pub fn custom(d: usize, f: impl Fn(&[usize]) -> f64 + Send + Sync + 'static) -> Result<Self> {
        SeqWeight::new(d, WeightKind::Custom(Arc::new(f)))
    }

    /// The weight used by the acceptance run: letter distribution
    /// `(0.9, 0.1)` with harmonic level masses.
    pub fn test_weight() -> Self {
        SeqWeight::product(vec![0.9, 0.1]).expect("valid distribution")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn weight(&self, v: &[usize]) -> f64 {
        let n = v.len();
        let d = self.d as f64;
        match &self.kind {
            WeightKind::Zero => 0.0,
            WeightKind::Geometric => d.powi(-2 * n as i32),
            WeightKind::Harmonic => d.powi(-(n as i32)) * harmonic(n),
            WeightKind::Product(p) => v.iter().map(|&a| p[a]).product::<f64>() * harmonic(n),
            WeightKind::Custom(f) => f(v),
        }
    }

    /// `Σ_{|v|=n} α(v)`, in closed form where one is known.
    pub fn level_mass(&self, n: usize) -> Option<f64> {
        let d = self.d as f64;
        match &self.kind {
            WeightKind::Zero => Some(0.0),
            WeightKind::Geometric => Some(d.powi(-(n as i32))),
            WeightKind::Harmonic | WeightKind::Product(_) => Some(harmonic(n)),
            WeightKind::Custom(_) => None,
        }
    }

    /// Total mass over all nonempty words, in closed form where one is known.
    pub fn total_mass(&self) -> Option<f64> {
        let d = self.d as f64;
        match &self.kind {
            WeightKind::Zero => Some(0.0),
            WeightKind::Geometric => Some(1.0 / (d - 1.0)),
            WeightKind::Harmonic | WeightKind::Product(_) => Some(1.0),
            WeightKind::Custom(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OmegaStats {
    pub d: usize,
    pub tau: f64,
    pub n_max: usize,
    pub seed: u64,
    pub mean: f64,
    pub max: f64,
    pub std_error: f64,
    /// Per trial, partial sums at `n_max/4`, `n_max/2` and `n_max`.
    pub checkpoints: Vec<[f64; 3]>,
}

impl OmegaStats {
    pub fn trials(&self) -> usize {
        self.checkpoints.len()
    }

    pub fn to_csv(&self) -> String {
        let (q1, q2) = checkpoint_indices(self.n_max);
        let mut s = format!("trial,sum_n{q1},sum_n{q2},sum_n{}\n", self.n_max);
        for (i, c) in self.checkpoints.iter().enumerate() {
            s.push_str(&format!("{i},{:.17e},{:.17e},{:.17e}\n", c[0], c[1], c[2]));
        }
        s
    }
}

fn checkpoint_indices(n_max: usize) -> (usize, usize) {
    ((n_max / 4).max(1), (n_max / 2).max(1))
}

fn check_sampling(tau: f64, n_max: usize, trials: usize) -> Result<()> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(StochasticError::Sampling(format!("tau {tau} outside (0,1]")));
    }
    if n_max == 0 || trials == 0 {
        return Err(StochasticError::Sampling("n_max and trials must be positive".into()));
    }
    Ok(())
}

/// Trial `i` draws from ChaCha8 seeded with `seed` on stream `i`.
fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Mean, maximum and standard error of per-trial sums, aggregated in trial
/// order.
fn summarize(checkpoints: &[[f64; 3]]) -> (f64, f64, f64) {
    let n = checkpoints.len() as f64;
    let mean = checkpoints.iter().map(|c| c[2]).sum::<f64>() / n;
    let max = checkpoints.iter().map(|c| c[2]).fold(f64::NEG_INFINITY, f64::max);
    let var = if checkpoints.len() > 1 {
        checkpoints.iter().map(|c| (c[2] - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, max, (var / n).sqrt())
}

/// Per-trial sums `Σ_{n≤n_max} α(ω_n)^τ` for uniformly random letters.
pub fn omega_sum_monte_carlo(
    alpha: &SeqWeight,
    tau: f64,
    n_max: usize,
    trials: usize,
    seed: u64,
) -> Result<OmegaStats> {
    check_sampling(tau, n_max, trials)?;
    let (q1, q2) = checkpoint_indices(n_max);
    let checkpoints: Vec<[f64; 3]> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let mut word = Vec::with_capacity(n_max);
            let mut sum = 0.0;
            let mut out = [0.0; 3];
            for n in 1..=n_max {
                word.push(rng.gen_range(0..alpha.d));
                sum += alpha.weight(&word).powf(tau);
                if n == q1 {
                    out[0] = sum;
                }
                if n == q2 {
                    out[1] = sum;
                }
            }
            out[2] = sum;
            out
        })
        .collect();
    let (mean, max, std_error) = summarize(&checkpoints);
    Ok(OmegaStats { d: alpha.d, tau, n_max, seed, mean, max, std_error, checkpoints })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpectationBound {
    /// `Σ_{n≤n_max} d^{−nτ}`.
    pub partial: f64,
    /// `d^{−τ}/(1−d^{−τ})`.
    pub closed_form: f64,
}

pub fn expectation_bound(d: usize, tau: f64, n_max: usize) -> Result<ExpectationBound> {
    if d < 2 || !(tau > 0.0) {
        return Err(StochasticError::Sampling(format!("need d ≥ 2 and tau > 0, got d={d}, tau={tau}")));
    }
    let x = (d as f64).powf(-tau);
    let partial = (1..=n_max).map(|n| x.powi(n as i32)).sum();
    Ok(ExpectationBound { partial, closed_form: x / (1.0 - x) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PingReport {
    pub word_length: usize,
    pub words_checked: usize,
    /// First pair of distinct positive words (as letter strings over
    /// `{1,2}`) whose images of `U₀` meet.
    pub overlap: Option<(String, String)>,
    /// `Σ_{|w|=n} |wU₀|` for `n = 0..=word_length`, exact.
    pub level_totals: Vec<f64>,
    pub stats: OmegaStats,
}

impl PingReport {
    pub fn disjoint(&self) -> bool {
        self.overlap.is_none()
    }
}

fn word_name(w: &[usize]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    // letters are listed in application order s₁, s₂, …
    w.iter().rev().map(|&a| if a == 0 { "g1" } else { "g2" }).collect::<Vec<_>>().join(" ")
}

/// Exact disjointness of `wU₀` over positive words in `{g1, g2}` of length
/// at most `word_length`, plus sampled sums `Σ_{n≤n_max} |s_n⋯s₁U₀|^τ`.
///
/// Requires `g2U₀ < U₀ < g1U₀` with `U₀` inside components `J₁` of
/// `supp g1` and `J₂` of `supp g2` satisfying
/// `inf J₁ < inf J₂ < g2U₀` and `g1U₀ < sup J₁ < sup J₂`.
#[allow(clippy::too_many_arguments)]
pub fn ping_orbit_sums(
    g1: &PLHomeo,
    g2: &PLHomeo,
    u0: &Interval,
    tau: f64,
    word_length: usize,
    n_max: usize,
    trials: usize,
    seed: u64,
) -> Result<PingReport> {
    check_sampling(tau, n_max, trials)?;
    let bad = |m: String| Err(StochasticError::Configuration(m));
    let (i1, i2) = (g1.image(u0), g2.image(u0));
    if !(i2.precedes(u0) && u0.precedes(&i1)) {
        return bad(format!("need g2U0 < U0 < g1U0, got {i2} and {i1}"));
    }
    let comp = |g: &PLHomeo| g.support_components().into_iter().find(|j| u0.is_subset_of(j));
    let (Some(j1), Some(j2)) = (comp(g1), comp(g2)) else {
        return bad("U0 is not inside a support component of both maps".into());
    };
    if !(j1.lo() < j2.lo() && j2.lo() <= i2.lo() && i1.hi() <= j1.hi() && j1.hi() < j2.hi()) {
        return bad(format!("components {j1} and {j2} are not in two-chain position around U0"));
    }
    let gens = [g1, g2];
    let mut level: Vec<(Vec<usize>, Interval)> = vec![(Vec::new(), u0.clone())];
    let mut all = level.clone();
    let mut level_totals = vec![to_f64(&u0.length())];
    for _ in 0..word_length {
        level = level
            .iter()
            .flat_map(|(w, j)| {
                gens.iter().enumerate().map(move |(a, g)| {
                    let mut w2 = w.clone();
                    w2.push(a);
                    (w2, g.image(j))
                })
            })
            .collect();
        level_totals.push(to_f64(&level.iter().map(|(_, j)| j.length()).sum()));
        all.extend(level.iter().cloned());
    }
    all.sort_by(|a, b| a.1.lo().cmp(b.1.lo()));
    let overlap = all.windows(2).find(|p| !p[0].1.precedes(&p[1].1)).map(|p| (word_name(&p[0].0), word_name(&p[1].0)));

    let (q1, q2) = checkpoint_indices(n_max);
    let (lo0, hi0) = (to_f64(u0.lo()), to_f64(u0.hi()));
    let checkpoints: Vec<[f64; 3]> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let (mut lo, mut hi) = (lo0, hi0);
            let mut sum = 0.0;
            let mut out = [0.0; 3];
            for n in 1..=n_max {
                let g = gens[rng.gen_range(0..2)];
                lo = g.eval_f64(lo);
                hi = g.eval_f64(hi);
                sum += (hi - lo).max(0.0).powf(tau);
                if n == q1 {
                    out[0] = sum;
                }
                if n == q2 {
                    out[1] = sum;
                }
            }
            out[2] = sum;
            out
        })
        .collect();
    let (mean, max, std_error) = summarize(&checkpoints);
    Ok(PingReport {
        word_length,
        words_checked: all.len(),
        overlap,
        level_totals,
        stats: OmegaStats { d: 2, tau, n_max, seed, mean, max, std_error, checkpoints },
    })
}

/// Two PL maps in ping position around `U₀ = (7/16, 9/16)`: `g1` pushes
/// `(1/4, 3/4)` into `[9/16, 3/4)` and `g2` pushes it into `(1/4, 7/16]`.
pub fn ping_example() -> (PLHomeo, PLHomeo, Interval) {
    use crate::exact_pl::rational::{int, rat};
    let g1 = PLHomeo::new(vec![(int(0), int(0)), (rat(1, 4), rat(9, 16)), (rat(3, 4), rat(3, 4)), (int(1), int(1))])
        .expect("valid map");
    let g2 = PLHomeo::new(vec![(int(0), int(0)), (rat(1, 4), rat(1, 4)), (rat(3, 4), rat(7, 16)), (int(1), int(1))])
        .expect("valid map");
    (g1, g2, Interval::open(rat(7, 16), rat(9, 16)).expect("nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weight_gives_zero_sums() {
        let s = omega_sum_monte_carlo(&SeqWeight::zero(3).unwrap(), 0.5, 50, 20, 1).unwrap();
        assert_eq!((s.mean, s.max, s.std_error), (0.0, 0.0, 0.0));
    }

    #[test]
    fn geometric_weight_sum_is_deterministic() {
        let s = omega_sum_monte_carlo(&SeqWeight::geometric(2).unwrap(), 0.5, 40, 10, 7).unwrap();
        let exact: f64 = (1..=40).map(|n| 0.5f64.powi(n)).sum();
        assert!(s.checkpoints.iter().all(|c| (c[2] - exact).abs() < 1e-15 && c[2] < 1.0));
    }

    #[test]
    fn expectation_bound_values() {
        assert_eq!(expectation_bound(2, 0.5, 1).unwrap().partial, 2f64.powf(-0.5));
        let b = expectation_bound(2, 0.5, 200).unwrap();
        assert!((b.closed_form - 1.0 / (2f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((b.partial - b.closed_form).abs() < 1e-12);
        assert!((expectation_bound(2, 1.0, 60).unwrap().partial - 1.0).abs() < 1e-15);
        assert!(expectation_bound(1, 0.5, 10).is_err());
    }

    #[test]
    fn product_weight_mean_matches_its_expectation() {
        // E α(ω_n)^τ = (n(n+1))^{−τ} (Σ_a π_a^τ / d)^n
        let w = SeqWeight::test_weight();
        let s = omega_sum_monte_carlo(&w, 0.5, 100, 4000, 11).unwrap();
        let m = (0.9f64.sqrt() + 0.1f64.sqrt()) / 2.0;
        let exact: f64 = (1..=100).map(|n| harmonic(n).sqrt() * m.powi(n as i32)).sum();
        assert!((s.mean - exact).abs() < 4.0 * s.std_error, "{} vs {exact}", s.mean);
    }

    #[test]
    fn reruns_are_bit_identical() {
        let w = SeqWeight::test_weight();
        let a = omega_sum_monte_carlo(&w, 0.5, 40, 300, 99).unwrap();
        let b = omega_sum_monte_carlo(&w, 0.5, 40, 300, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
        let c = omega_sum_monte_carlo(&w, 0.5, 40, 300, 100).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn ping_example_is_disjoint() {
        let (g1, g2, u0) = ping_example();
        let r = ping_orbit_sums(&g1, &g2, &u0, 0.5, 6, 100, 500, 3).unwrap();
        assert!(r.disjoint(), "{:?}", r.overlap);
        assert_eq!(r.words_checked, 127);
        assert!(r.level_totals.iter().all(|&t| t <= 1.0));
        let bound = expectation_bound(2, 0.5, 100).unwrap().partial;
        assert!(r.stats.mean <= bound + 3.0 * r.stats.std_error);
    }

    #[test]
    fn ping_rejects_a_wrong_configuration() {
        let (g1, g2, u0) = ping_example();
        assert!(ping_orbit_sums(&g2, &g1, &u0, 0.5, 3, 10, 10, 0).is_err());
    }
}
