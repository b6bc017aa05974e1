/// Gauss–Legendre nodes and weights on [-1, 1], 8 points.
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Panels of the cumulative table.
const PANELS: usize = 32;

fn smoothstep(s: f64) -> f64 {
    s * s * (3.0 - 2.0 * s)
}

fn bump(s: f64) -> f64 {
    let u = s * (1.0 - s);
    16.0 * u * u
}

/// A smooth increasing parametrization `h: [0,1] → [lo, hi]` with
/// `h′(0) = scale_left`, `h′(1) = scale_right`.
///
/// `h′(s) ∝ exp((1−σ(s)) ln w₀ + σ(s) ln w₁ + β φ(s))` with `σ` the cubic
/// smoothstep and `φ = 16 s²(1−s)²`; `β` is chosen so the mean of the weight
/// is 1, and the residual normalization is absorbed exactly so `h(1) = hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    lo: f64,
    hi: f64,
    ln_w0: f64,
    ln_w1: f64,
    beta: f64,
    /// `∫₀^{m/PANELS} w` for `m = 0..=PANELS`.
    table: Vec<f64>,
}

impl Chart {
    pub fn new(lo: f64, hi: f64, scale_left: f64, scale_right: f64) -> Chart {
        assert!(hi > lo && scale_left > 0.0 && scale_right > 0.0, "degenerate chart");
        let len = hi - lo;
        let ln_w0 = (scale_left / len).ln();
        let ln_w1 = (scale_right / len).ln();
        let mut chart = Chart { lo, hi, ln_w0, ln_w1, beta: 0.0, table: Vec::new() };
        chart.beta = chart.solve_beta();
        chart.table = chart.build_table();
        chart
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    fn log_weight(&self, s: f64) -> f64 {
        let sig = smoothstep(s);
        (1.0 - sig) * self.ln_w0 + sig * self.ln_w1 + self.beta * bump(s)
    }

    fn weight(&self, s: f64) -> f64 {
        self.log_weight(s).exp()
    }

    fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        GL_NODES.iter().zip(&GL_WEIGHTS).map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
    }

    /// `(∫ w, ∫ φ w)` over [0,1] for a trial `β`.
    fn moments(&self, beta: f64) -> (f64, f64) {
        let lw = |s: f64| {
            let sig = smoothstep(s);
            (1.0 - sig) * self.ln_w0 + sig * self.ln_w1 + beta * bump(s)
        };
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        for p in 0..PANELS {
            let (a, b) = (p as f64 / PANELS as f64, (p + 1) as f64 / PANELS as f64);
            m0 += self.integrate(a, b, |s| lw(s).exp());
            m1 += self.integrate(a, b, |s| bump(s) * lw(s).exp());
        }
        (m0, m1)
    }

    /// Root of `ln ∫ w_β = 0`, which is increasing and convex in `β`.
    fn solve_beta(&self) -> f64 {
        let g = |beta: f64| self.moments(beta).0.ln();
        let (mut lo, mut hi) = (-1.0, 1.0);
        while g(lo) > 0.0 {
            lo *= 2.0;
        }
        while g(hi) < 0.0 {
            hi *= 2.0;
        }
        let mut beta = 0.5 * (lo + hi);
        for _ in 0..200 {
            let (m0, m1) = self.moments(beta);
            let val = m0.ln();
            if val > 0.0 {
                hi = beta;
            } else {
                lo = beta;
            }
            if val.abs() < 1e-15 || hi - lo < 1e-14 {
                break;
            }
            let next = beta - val / (m1 / m0);
            beta = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        }
        beta
    }

    fn build_table(&self) -> Vec<f64> {
        let mut t = Vec::with_capacity(PANELS + 1);
        let mut acc = 0.0;
        t.push(0.0);
        for p in 0..PANELS {
            let (a, b) = (p as f64 / PANELS as f64, (p + 1) as f64 / PANELS as f64);
            acc += self.integrate(a, b, |s| self.weight(s));
            t.push(acc);
        }
        t
    }

    fn total(&self) -> f64 {
        self.table[PANELS]
    }

    fn cumulative(&self, s: f64) -> f64 {
        let m = ((s * PANELS as f64) as usize).min(PANELS - 1);
        let a = m as f64 / PANELS as f64;
        self.table[m] + if s > a { self.integrate(a, s, |u| self.weight(u)) } else { 0.0 }
    }

    /// `h(s)`.
    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return self.lo;
        }
        if s >= 1.0 {
            return self.hi;
        }
        (self.lo + self.len() * self.cumulative(s) / self.total()).min(self.hi)
    }

    /// `h′(s)`.
    pub fn deriv(&self, s: f64) -> f64 {
        self.len() * self.weight(s.clamp(0.0, 1.0)) / self.total()
    }

    /// `(ln h′)′(s)`.
    pub fn log_deriv_slope(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        let dsig = 6.0 * s * (1.0 - s);
        let dphi = 32.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
        dsig * (self.ln_w1 - self.ln_w0) + self.beta * dphi
    }

    /// `h⁻¹(x)`, Newton within the bracketing panel.
    pub fn inverse(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return 1.0;
        }
        let target = (x - self.lo) / self.len() * self.total();
        let m = self.table.partition_point(|&v| v <= target).clamp(1, PANELS) - 1;
        let (mut a, mut b) = (m as f64 / PANELS as f64, (m + 1) as f64 / PANELS as f64);
        let mut s = a + (b - a) * (target - self.table[m]) / (self.table[m + 1] - self.table[m]);
        for _ in 0..60 {
            let f = self.cumulative(s) - target;
            if f > 0.0 {
                b = s;
            } else {
                a = s;
            }
            let next = s - f / self.weight(s);
            let next = if next > a && next < b { next } else { 0.5 * (a + b) };
            if (next - s).abs() <= 1e-17 || b - a <= 1e-16 {
                return next;
            }
            s = next;
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_derivatives_and_values() {
        for (l, r) in [(1.0, 1.0), (0.3, 2.0), (5.0, 0.01), (1e-3, 1e3)] {
            let c = Chart::new(0.25, 0.75, l * 0.5, r * 0.5);
            assert_eq!(c.eval(0.0), 0.25);
            assert_eq!(c.eval(1.0), 0.75);
            assert!((c.deriv(0.0) / (l * 0.5) - 1.0).abs() < 1e-12, "{l} {}", c.deriv(0.0));
            assert!((c.deriv(1.0) / (r * 0.5) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn affine_when_scales_match_length() {
        let c = Chart::new(1.0, 3.0, 2.0, 2.0);
        for i in 0..=10 {
            let s = i as f64 / 10.0;
            assert!((c.eval(s) - (1.0 + 2.0 * s)).abs() < 1e-14);
            assert!(c.log_deriv_slope(s).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_round_trip_and_monotone() {
        let c = Chart::new(0.1, 0.2, 0.02, 0.5);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=1000 {
            let s = i as f64 / 1000.0;
            let x = c.eval(s);
            assert!(x > prev || i == 0);
            prev = x;
            assert!((c.inverse(x) - s).abs() < 1e-13, "{s}");
            assert!(c.deriv(s) > 0.0);
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let c = Chart::new(0.0, 1.0, 0.4, 1.7);
        for i in 1..20 {
            let s = i as f64 / 20.0;
            let h = 1e-6;
            let fd = (c.eval(s + h) - c.eval(s - h)) / (2.0 * h);
            assert!((fd - c.deriv(s)).abs() < 1e-7);
        }
    }
}
