use super::holder::{holder_norm, uniform_grid, HOLDER_INFLATION};
use super::witness::SmoothMap;
use super::RegularityError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Horn {
    /// `M_n / L_n` stays bounded away from zero.
    RatioBoundedBelow,
    /// `M_n / L_n → 0`.
    RatioToZero,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Z2Row {
    pub i: usize,
    /// `aⁱz − aⁱy`.
    pub l: f64,
    /// `|t aⁱz − aⁱz|`.
    pub m: f64,
    pub ratio: f64,
    /// `C Lᵢ^{1+τ}` with `C` the inflated estimate of `[Dt]_τ`.
    pub bound: f64,
    pub bound_holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Z2Report {
    pub tau: f64,
    pub dt_holder: f64,
    pub rows: Vec<Z2Row>,
    /// `Σ Lᵢ^τ`.
    pub sum_l_tau: f64,
    /// `Σ Mᵢ^τ`.
    pub sum_m_tau: f64,
    /// `C^τ Σ Lᵢ^{τ(1+τ)}`, which bounds `Σ Mᵢ^τ` when the Hölder bound holds.
    pub sum_m_tau_bound: f64,
    pub horn: Horn,
    pub conflict: bool,
}

/// Orbit quantities `Lᵢ`, `Mᵢ` for commuting `a`, `t` with `t(y) = y`,
/// `t(z) ≠ z`, `y < z`.
///
/// The conflict flag is raised when some `Mᵢ` exceeds its Hölder bound, when
/// `Σ Mᵢ^τ` exceeds `C^τ Σ Lᵢ^{τ(1+τ)}`, or when the ratio stays bounded
/// below while `C Lᵢ^τ` (which dominates the ratio) drops under it.
pub fn z2_sequence_diagnostic(
    a: &dyn SmoothMap,
    t: &dyn SmoothMap,
    y: f64,
    z: f64,
    tau: f64,
    n_max: usize,
) -> Result<Z2Report, RegularityError> {
    if !(y < z) {
        return Err(RegularityError::Configuration(format!("need y < z, got y={y}, z={z}")));
    }
    if (t.eval(y) - y).abs() > 1e-12 {
        return Err(RegularityError::Configuration(format!("t does not fix y={y}")));
    }
    if t.eval(z) == z {
        return Err(RegularityError::Configuration(format!("t fixes z={z}")));
    }
    let mut ys = vec![y];
    let mut zs = vec![z];
    for _ in 0..n_max {
        ys.push(a.eval(*ys.last().unwrap()));
        zs.push(a.eval(*zs.last().unwrap()));
    }
    let tz: Vec<f64> = zs.iter().map(|&x| t.eval(x)).collect();
    let lo = ys.iter().chain(&zs).chain(&tz).copied().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().chain(&zs).chain(&tz).copied().fold(f64::NEG_INFINITY, f64::max);
    let mut grid = uniform_grid(lo, hi, 4000);
    for (i, (&yi, &zi)) in ys.iter().zip(&zs).enumerate().take(n_max + 1) {
        let _ = i;
        let (p, q) = (yi.min(tz[i]).min(zi), zi.max(tz[i]));
        grid.extend(uniform_grid(p, q, 32));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let dts: Vec<f64> = grid.iter().map(|&x| t.deriv(x)).collect();
    let dt_holder = HOLDER_INFLATION * holder_norm(&grid, &dts, tau)?.value;

    let rows: Vec<Z2Row> = (0..=n_max)
        .map(|i| {
            let l = zs[i] - ys[i];
            let m = (tz[i] - zs[i]).abs();
            let bound = dt_holder * l.powf(1.0 + tau);
            let rounding = 4.0 * f64::EPSILON * zs[i].abs().max(1.0);
            Z2Row {
                i,
                l,
                m,
                ratio: if l > 0.0 { m / l } else { f64::INFINITY },
                bound,
                bound_holds: m <= bound + rounding,
            }
        })
        .collect();
    let sum_l_tau = rows.iter().map(|r| r.l.powf(tau)).sum();
    let sum_m_tau: f64 = rows.iter().map(|r| r.m.powf(tau)).sum();
    let sum_m_tau_bound = dt_holder.powf(tau) * rows.iter().map(|r| r.l.powf(tau * (1.0 + tau))).sum::<f64>();

    let first = rows[0].ratio;
    let quarter = (rows.len() / 4).max(1);
    let tail = &rows[rows.len() - quarter..];
    let tail_min = tail.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let horn = if first > 0.0 && tail_min >= 0.1 * first { Horn::RatioBoundedBelow } else { Horn::RatioToZero };
    let bound_violated = rows.iter().any(|r| !r.bound_holds) || sum_m_tau > sum_m_tau_bound * (1.0 + 1e-12);
    let squeezed = horn == Horn::RatioBoundedBelow && tail.iter().any(|r| dt_holder * r.l.powf(tau) < tail_min);
    Ok(Z2Report {
        tau,
        dt_holder,
        rows,
        sum_l_tau,
        sum_m_tau,
        sum_m_tau_bound,
        horn,
        conflict: bound_violated || squeezed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Affine(f64, f64);
    impl SmoothMap for Affine {
        fn eval(&self, x: f64) -> f64 {
            self.0 * x + self.1
        }
        fn deriv(&self, _: f64) -> f64 {
            self.0
        }
    }

    struct Id;
    impl SmoothMap for Id {
        fn eval(&self, x: f64) -> f64 {
            x
        }
        fn deriv(&self, _: f64) -> f64 {
            1.0
        }
    }

    #[test]
    fn t_fixing_z_is_rejected() {
        let a = Affine(0.5, 0.0);
        let err = z2_sequence_diagnostic(&a, &Id, 0.1, 0.2, 0.5, 10);
        assert!(matches!(err, Err(RegularityError::Configuration(_))));
    }

    #[test]
    fn identity_on_the_orbit_gives_zero_m() {
        // t moves only points above 1/2, the orbit of z stays below
        struct Shift;
        impl SmoothMap for Shift {
            fn eval(&self, x: f64) -> f64 {
                if x > 0.5 {
                    x + (x - 0.5).powi(3) * (1.0 - x).powi(3)
                } else {
                    x
                }
            }
            fn deriv(&self, x: f64) -> f64 {
                if x > 0.5 {
                    1.0 + 3.0 * (x - 0.5).powi(2) * (1.0 - x).powi(3) - 3.0 * (x - 0.5).powi(3) * (1.0 - x).powi(2)
                } else {
                    1.0
                }
            }
        }
        let a = Affine(0.5, 0.0);
        let r = z2_sequence_diagnostic(&a, &Shift, 0.0, 0.75, 0.5, 8).unwrap();
        assert!(r.rows[1..].iter().all(|row| row.m == 0.0 && row.ratio == 0.0));
        assert_eq!(r.horn, Horn::RatioToZero);
        assert!(!r.conflict);
    }

    #[test]
    fn linear_commuting_pair_has_bounded_ratio_and_conflicts() {
        // a(x) = x/2 and t(x) = 2x/3 commute and fix 0; ratio is constant 1/3
        let a = Affine(0.5, 0.0);
        let t = Affine(2.0 / 3.0, 0.0);
        let r = z2_sequence_diagnostic(&a, &t, 0.0, 0.9, 0.5, 20).unwrap();
        assert_eq!(r.horn, Horn::RatioBoundedBelow);
        assert!(r.rows.iter().all(|row| (row.ratio - 1.0 / 3.0).abs() < 1e-12));
        // [Dt]_τ = 0, so any nonzero M violates the bound
        assert!(r.conflict);
    }
}
