use rayon::prelude::*;

use super::RegularityError;

/// Safety factor applied to grid Hölder estimates wherever an inequality uses
/// the true norm on its large side.
pub const HOLDER_INFLATION: f64 = 1.01;

/// Grid lower bound for `sup |f(x)−f(y)| / |x−y|^τ`, attained at `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderEstimate {
    pub tau: f64,
    pub value: f64,
    pub x: f64,
    pub y: f64,
}

impl HolderEstimate {
    pub fn inflated(&self) -> f64 {
        self.value * HOLDER_INFLATION
    }
}

fn check_samples(xs: &[f64], fs: &[f64], tau: f64) -> Result<(), RegularityError> {
    if xs.len() != fs.len() {
        return Err(RegularityError::Samples(format!("{} abscissae but {} values", xs.len(), fs.len())));
    }
    if xs.len() < 2 {
        return Err(RegularityError::Samples("at least two samples are required".into()));
    }
    if !(0.0..1.0).contains(&tau) && tau != 1.0 {
        return Err(RegularityError::Samples(format!("tau {tau} outside [0,1]")));
    }
    Ok(())
}

/// Best quotient among pairs `(i, j)` with `i < j ≤ i + max_gap`; ties keep
/// the lexicographically first pair.
fn best_pair(xs: &[f64], fs: &[f64], tau: f64, max_gap: usize) -> HolderEstimate {
    let n = xs.len();
    let first = HolderEstimate { tau, value: 0.0, x: xs[0], y: xs[1] };
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best: Option<HolderEstimate> = None;
            for j in (i + 1)..n.min(i.saturating_add(max_gap).saturating_add(1)) {
                let dx = (xs[j] - xs[i]).abs();
                if dx == 0.0 {
                    continue;
                }
                let q = (fs[j] - fs[i]).abs() / dx.powf(tau);
                if best.map_or(true, |b| q > b.value) {
                    best = Some(HolderEstimate { tau, value: q, x: xs[i], y: xs[j] });
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .fold(first, |acc, e| if e.value > acc.value { e } else { acc })
}

/// Maximum Hölder quotient over all sample pairs.
pub fn holder_norm(xs: &[f64], fs: &[f64], tau: f64) -> Result<HolderEstimate, RegularityError> {
    check_samples(xs, fs, tau)?;
    Ok(best_pair(xs, fs, tau, usize::MAX))
}

/// Maximum Hölder quotient over pairs at most `max_gap` indices apart.
pub fn holder_norm_local(xs: &[f64], fs: &[f64], tau: f64, max_gap: usize) -> Result<HolderEstimate, RegularityError> {
    check_samples(xs, fs, tau)?;
    Ok(best_pair(xs, fs, tau, max_gap.max(1)))
}

/// `holder_norm` of `f` sampled on `grid`.
pub fn holder_norm_of(
    f: impl Fn(f64) -> f64 + Sync,
    grid: &[f64],
    tau: f64,
) -> Result<HolderEstimate, RegularityError> {
    let fs: Vec<f64> = grid.par_iter().map(|&x| f(x)).collect();
    holder_norm(grid, &fs, tau)
}

/// `n + 1` equally spaced points of `[a, b]`.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisplacementReport {
    pub deriv_holder: HolderEstimate,
    /// `HOLDER_INFLATION · [Df]_τ`.
    pub constant: f64,
    /// Largest `|f(x)−x| / (C |x−a|^{1+τ})` over the grid.
    pub worst_ratio: f64,
    /// Grid points where the inequality fails.
    pub violations: Vec<f64>,
    pub points_checked: usize,
}

impl DisplacementReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `|f(x)−x| ≤ C·|x−a|^{1+τ}` on the grid, where `C` is the inflated
/// grid estimate of `[Df]_τ` from the same samples and `f(a) = a`.
pub fn check_displacement(
    xs: &[f64],
    fx: &[f64],
    dfx: &[f64],
    a: f64,
    tau: f64,
) -> Result<DisplacementReport, RegularityError> {
    check_samples(xs, fx, tau)?;
    check_samples(xs, dfx, tau)?;
    let deriv_holder = holder_norm(xs, dfx, tau)?;
    let constant = deriv_holder.inflated();
    let mut worst_ratio: f64 = 0.0;
    let mut violations = Vec::new();
    let mut points_checked = 0;
    for (&x, &f) in xs.iter().zip(fx) {
        if x == a {
            continue;
        }
        points_checked += 1;
        let lhs = (f - x).abs();
        let rhs = constant * (x - a).abs().powf(1.0 + tau);
        let rounding = 4.0 * f64::EPSILON * x.abs().max(1.0);
        if lhs > rhs + rounding {
            violations.push(x);
        }
        if rhs > 0.0 {
            worst_ratio = worst_ratio.max(lhs / rhs);
        } else if lhs > rounding {
            worst_ratio = f64::INFINITY;
        }
    }
    Ok(DisplacementReport { deriv_holder, constant, worst_ratio, violations, points_checked })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_function_has_zero_norm() {
        let xs = uniform_grid(0.0, 1.0, 50);
        let e = holder_norm_of(|_| 3.0, &xs, 0.5).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn identity_with_zero_exponent_peaks_at_endpoints() {
        let xs = uniform_grid(0.0, 1.0, 64);
        let e = holder_norm_of(|x| x, &xs, 0.0).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!((e.x, e.y), (0.0, 1.0));
    }

    #[test]
    fn square_root_half_holder() {
        let xs = uniform_grid(0.0, 1.0, 1000);
        let e = holder_norm_of(f64::sqrt, &xs, 0.5).unwrap();
        assert!(e.value >= 0.99 && e.value <= 1.0 + 1e-12, "{}", e.value);
    }

    #[test]
    fn too_few_samples_is_an_error() {
        assert!(holder_norm(&[0.0], &[0.0], 0.5).is_err());
        assert!(holder_norm(&[0.0, 1.0], &[0.0], 0.5).is_err());
    }

    #[test]
    fn local_estimate_is_below_global() {
        let xs = uniform_grid(0.0, 1.0, 200);
        let fs: Vec<f64> = xs.iter().map(|x| (7.0 * x).sin()).collect();
        let g = holder_norm(&xs, &fs, 0.3).unwrap();
        let l = holder_norm_local(&xs, &fs, 0.3, 5).unwrap();
        assert!(l.value <= g.value);
    }

    #[test]
    fn identity_displacement_is_zero() {
        let xs = uniform_grid(0.0, 1.0, 100);
        let ones = vec![1.0; xs.len()];
        let r = check_displacement(&xs, &xs, &ones, 0.0, 0.5).unwrap();
        assert!(r.holds());
        assert_eq!(r.worst_ratio, 0.0);
    }

    #[test]
    fn smooth_map_fixing_an_endpoint_satisfies_displacement() {
        // f(x) = x + x²/4 on [0,1]: f' = 1 + x/2, [f']_1/2 = 1/2
        let xs = uniform_grid(0.0, 1.0, 1000);
        let fx: Vec<f64> = xs.iter().map(|x| x + x * x / 4.0).collect();
        let dfx: Vec<f64> = xs.iter().map(|x| 1.0 + x / 2.0).collect();
        let r = check_displacement(&xs, &fx, &dfx, 0.0, 0.5).unwrap();
        assert!(r.holds(), "{r:?}");
    }
}
