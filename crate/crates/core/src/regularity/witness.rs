use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::RegularityError;
use crate::exact_pl::rational::to_f64;
use crate::exact_pl::{Interval, PLHomeo, Rational};

/// Tolerance for interval comparisons when some map is only known numerically.
pub const SMOOTH_SLACK: f64 = 1e-12;

/// An increasing homeomorphism of [0,1] known through evaluation.
pub trait SmoothMap: Send + Sync {
    fn eval(&self, x: f64) -> f64;
    fn deriv(&self, x: f64) -> f64;
}

impl SmoothMap for PLHomeo {
    fn eval(&self, x: f64) -> f64 {
        self.eval_f64(x)
    }

    /// Right derivative, left derivative at 1.
    fn deriv(&self, x: f64) -> f64 {
        let pts = self.breakpoints();
        let seg = pts.windows(2).find(|w| x < to_f64(&w[1].0)).unwrap_or(&pts[pts.len() - 2..]);
        to_f64(&((&seg[1].1 - &seg[0].1) / (&seg[1].0 - &seg[0].0)))
    }
}

#[derive(Clone)]
pub enum MapKind {
    Pl(PLHomeo),
    Smooth(Arc<dyn SmoothMap>),
}

#[derive(Clone)]
pub struct WitnessMap {
    pub name: String,
    pub kind: MapKind,
}

impl WitnessMap {
    pub fn pl(name: impl Into<String>, map: PLHomeo) -> Self {
        WitnessMap { name: name.into(), kind: MapKind::Pl(map) }
    }

    pub fn smooth(name: impl Into<String>, map: Arc<dyn SmoothMap>) -> Self {
        WitnessMap { name: name.into(), kind: MapKind::Smooth(map) }
    }

    pub fn as_pl(&self) -> Option<&PLHomeo> {
        match &self.kind {
            MapKind::Pl(p) => Some(p),
            MapKind::Smooth(_) => None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            MapKind::Pl(p) => p.eval_f64(x),
            MapKind::Smooth(s) => s.eval(x),
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match &self.kind {
            MapKind::Pl(p) => SmoothMap::deriv(p, x),
            MapKind::Smooth(s) => s.deriv(x),
        }
    }
}

impl fmt::Debug for WitnessMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MapKind::Pl(p) => write!(f, "{}: {}", self.name, p),
            MapKind::Smooth(_) => write!(f, "{}: <smooth>", self.name),
        }
    }
}

impl PartialEq for WitnessMap {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && match (&self.kind, &other.kind) {
                (MapKind::Pl(a), MapKind::Pl(b)) => a == b,
                (MapKind::Smooth(a), MapKind::Smooth(b)) => Arc::ptr_eq(a, b),
                _ => false,
            }
    }
}

/// Maps `S`, intervals `J₁ ⊋ … ⊋ J_k`, exponent `u`, the sequence
/// `s₁, s₂, …` (indices into `S`; `w_n = s_n ⋯ s₁`) and, for every step `n`
/// and level `i ∈ 2..=k`, the map swapping `w_n J_i` off itself while fixing
/// `w_n J_{i−1}`.
///
/// A cyclic sequence repeats its prefix forever. Certificates default per
/// level and may be overridden per `(n, i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NestingWitness {
    maps: Vec<WitnessMap>,
    intervals: Vec<Interval>,
    u: f64,
    sequence: Vec<usize>,
    cyclic: bool,
    default_certs: BTreeMap<usize, usize>,
    overrides: BTreeMap<(usize, usize), usize>,
}

impl NestingWitness {
    pub fn new(
        maps: Vec<WitnessMap>,
        intervals: Vec<Interval>,
        u: f64,
        sequence: Vec<usize>,
        cyclic: bool,
        default_certs: BTreeMap<usize, usize>,
        overrides: BTreeMap<(usize, usize), usize>,
    ) -> Result<Self, RegularityError> {
        let bad = |m: String| Err(RegularityError::MalformedWitness(m));
        if intervals.len() < 2 {
            return bad("at least two intervals are required".into());
        }
        if !(u > 0.0 && u <= 1.0) {
            return bad(format!("exponent u = {u} outside (0,1]"));
        }
        for w in intervals.windows(2) {
            if !w[1].is_proper_subset_of(&w[0]) {
                return bad(format!("{} is not properly nested in {}", w[1], w[0]));
            }
        }
        if cyclic && sequence.is_empty() {
            return bad("cyclic sequence must be nonempty".into());
        }
        if let Some(s) = sequence.iter().find(|&&s| s >= maps.len()) {
            return bad(format!("sequence index {s} out of range"));
        }
        let k = intervals.len();
        for i in 2..=k {
            if !default_certs.contains_key(&i) && !overrides.keys().any(|&(_, j)| j == i) {
                return bad(format!("no certificate for level {i}"));
            }
        }
        for (&i, &s) in &default_certs {
            if !(2..=k).contains(&i) || s >= maps.len() {
                return bad(format!("certificate ({i} -> {s}) out of range"));
            }
        }
        for (&(n, i), &s) in &overrides {
            if !(2..=k).contains(&i) || s >= maps.len() {
                return bad(format!("certificate at step {n} ({i} -> {s}) out of range"));
            }
        }
        Ok(NestingWitness { maps, intervals, u, sequence, cyclic, default_certs, overrides })
    }

    pub fn k(&self) -> usize {
        self.intervals.len()
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn maps(&self) -> &[WitnessMap] {
        &self.maps
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn sequence(&self) -> &[usize] {
        &self.sequence
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn default_certificates(&self) -> &BTreeMap<usize, usize> {
        &self.default_certs
    }

    pub fn certificate_overrides(&self) -> &BTreeMap<(usize, usize), usize> {
        &self.overrides
    }

    /// Same geometric data with another exponent.
    pub fn with_u(&self, u: f64) -> Result<Self, RegularityError> {
        let mut w = self.clone();
        w.u = u;
        NestingWitness::new(w.maps, w.intervals, u, w.sequence, w.cyclic, w.default_certs, w.overrides)
    }

    /// Replaces the certificate used at step `n` for level `i`.
    pub fn with_override(&self, n: usize, i: usize, s: usize) -> Result<Self, RegularityError> {
        let mut overrides = self.overrides.clone();
        overrides.insert((n, i), s);
        NestingWitness::new(
            self.maps.clone(),
            self.intervals.clone(),
            self.u,
            self.sequence.clone(),
            self.cyclic,
            self.default_certs.clone(),
            overrides,
        )
    }

    /// `s_n` for `n ≥ 1`.
    pub fn step(&self, n: usize) -> Option<usize> {
        if n == 0 {
            return None;
        }
        if self.cyclic {
            Some(self.sequence[(n - 1) % self.sequence.len()])
        } else {
            self.sequence.get(n - 1).copied()
        }
    }

    /// Largest `n` for which `w_n` is defined.
    pub fn horizon(&self) -> usize {
        if self.cyclic {
            usize::MAX
        } else {
            self.sequence.len()
        }
    }

    pub fn certificate(&self, n: usize, i: usize) -> Option<usize> {
        self.overrides.get(&(n, i)).or_else(|| self.default_certs.get(&i)).copied()
    }

    fn all_pl(&self) -> bool {
        self.maps.iter().all(|m| m.as_pl().is_some())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureKind {
    /// `s w_n J_i ∩ w_n J_i ≠ ∅`.
    NotDisplaced,
    /// `s w_n J_{i−1} ≠ w_n J_{i−1}`.
    NotInvariant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConditionFailure {
    pub n: usize,
    pub level: usize,
    pub map: usize,
    pub kind: FailureKind,
}

impl fmt::Display for ConditionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            FailureKind::NotDisplaced => "does not displace w_n J_i",
            FailureKind::NotInvariant => "does not preserve w_n J_{i-1}",
        };
        write!(f, "step n={}, level i={}: map #{} {}", self.n, self.level, self.map, what)
    }
}

/// Images `w_n J_i` for `n = 0..=n_max`, exact when every map is PL.
pub(crate) enum Orbit {
    Exact(Vec<Vec<Interval>>),
    Approx(Vec<Vec<(f64, f64)>>),
}

impl Orbit {
    pub(crate) fn lengths(&self, level: usize) -> Vec<f64> {
        match self {
            Orbit::Exact(v) => v.iter().map(|js| to_f64(&js[level].length())).collect(),
            Orbit::Approx(v) => v.iter().map(|js| js[level].1 - js[level].0).collect(),
        }
    }
}

pub(crate) fn orbit(w: &NestingWitness, n_max: usize) -> Result<Orbit, RegularityError> {
    if n_max > w.horizon() {
        return Err(RegularityError::MalformedWitness(format!(
            "sequence prefix has {} steps, {} requested",
            w.horizon(),
            n_max
        )));
    }
    if w.all_pl() {
        let mut cur = w.intervals.clone();
        let mut out = vec![cur.clone()];
        for n in 1..=n_max {
            let s = w.maps[w.step(n).unwrap()].as_pl().unwrap();
            cur = cur.iter().map(|j| s.image(j)).collect();
            out.push(cur.clone());
        }
        Ok(Orbit::Exact(out))
    } else {
        let mut cur: Vec<(f64, f64)> = w.intervals.iter().map(|j| (to_f64(j.lo()), to_f64(j.hi()))).collect();
        let mut out = vec![cur.clone()];
        for n in 1..=n_max {
            let s = &w.maps[w.step(n).unwrap()];
            cur = cur.iter().map(|&(a, b)| (s.eval(a), s.eval(b))).collect();
            out.push(cur.clone());
        }
        Ok(Orbit::Approx(out))
    }
}

fn exact_step(s: &PLHomeo, ji: &Interval, jprev: &Interval) -> Option<FailureKind> {
    if s.image(ji).overlaps(ji) {
        return Some(FailureKind::NotDisplaced);
    }
    let lo: Rational = s.eval_unchecked(jprev.lo());
    let hi: Rational = s.eval_unchecked(jprev.hi());
    if &lo != jprev.lo() || &hi != jprev.hi() {
        return Some(FailureKind::NotInvariant);
    }
    None
}

fn approx_step(s: &WitnessMap, ji: (f64, f64), jprev: (f64, f64)) -> Option<FailureKind> {
    let (a, b) = (s.eval(ji.0), s.eval(ji.1));
    if !(b <= ji.0 + SMOOTH_SLACK || a >= ji.1 - SMOOTH_SLACK) {
        return Some(FailureKind::NotDisplaced);
    }
    if (s.eval(jprev.0) - jprev.0).abs() > SMOOTH_SLACK || (s.eval(jprev.1) - jprev.1).abs() > SMOOTH_SLACK {
        return Some(FailureKind::NotInvariant);
    }
    None
}

/// First step `(n, i)` (ordered by `n`, then `i`) at which the certificate
/// fails, for `n = 0..=n_max`.
pub fn check_condition_ii(w: &NestingWitness, n_max: usize) -> Result<Option<ConditionFailure>, RegularityError> {
    let orbit = orbit(w, n_max)?;
    for n in 0..=n_max {
        for i in 2..=w.k() {
            let s = w
                .certificate(n, i)
                .ok_or_else(|| RegularityError::MalformedWitness(format!("no certificate for step {n}, level {i}")))?;
            let kind = match &orbit {
                Orbit::Exact(v) => exact_step(w.maps[s].as_pl().unwrap(), &v[n][i - 1], &v[n][i - 2]),
                Orbit::Approx(v) => approx_step(&w.maps[s], v[n][i - 1], v[n][i - 2]),
            };
            if let Some(kind) = kind {
                return Ok(Some(ConditionFailure { n, level: i, map: s, kind }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NestingReport {
    pub n_max: usize,
    pub exact: bool,
    pub failure: Option<ConditionFailure>,
    /// `|w_n J₁|` for `n = 0..=n_max`.
    pub lengths: Vec<f64>,
    /// `Σ_{m ≤ n} |w_m J₁|^u`.
    pub partial_sums: Vec<f64>,
    /// Largest ratio `|w_{n+1}J₁| / |w_n J₁|` over the last quarter of steps.
    pub tail_ratio: Option<f64>,
    /// Geometric tail bound implied by `tail_ratio`, when below 1.
    pub tail_bound: Option<f64>,
    pub tail_tolerance: f64,
}

impl NestingReport {
    pub fn condition_ii_ok(&self) -> bool {
        self.failure.is_none()
    }

    pub fn summable(&self) -> bool {
        self.tail_bound.is_some_and(|t| t <= self.tail_tolerance)
    }

    pub fn accepted(&self) -> bool {
        self.condition_ii_ok() && self.summable()
    }

    pub fn partial_sum(&self) -> f64 {
        *self.partial_sums.last().unwrap()
    }

    /// Rows `n,|w_nJ1|,partial_sum`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,length,partial_sum\n");
        for (n, (l, p)) in self.lengths.iter().zip(&self.partial_sums).enumerate() {
            s.push_str(&format!("{n},{l:.17e},{p:.17e}\n"));
        }
        s
    }
}

/// Condition (ii) exactly (or with [`SMOOTH_SLACK`] for numerical maps) for
/// `n ≤ n_max`, plus partial sums and a geometric tail heuristic for
/// condition (i).
pub fn verify_nesting_witness(
    w: &NestingWitness,
    n_max: usize,
    tail_tolerance: f64,
) -> Result<NestingReport, RegularityError> {
    let failure = check_condition_ii(w, n_max)?;
    let orbit = orbit(w, n_max)?;
    let lengths = orbit.lengths(0);
    let partial_sums: Vec<f64> = lengths
        .iter()
        .scan(0.0, |acc, l| {
            *acc += l.powf(w.u);
            Some(*acc)
        })
        .collect();
    let (tail_ratio, tail_bound) = tail_estimate(&lengths, w.u);
    Ok(NestingReport {
        n_max,
        exact: matches!(orbit, Orbit::Exact(_)),
        failure,
        lengths,
        partial_sums,
        tail_ratio,
        tail_bound,
        tail_tolerance,
    })
}

/// `ρ` = max ratio over the last quarter; tail `≤ L_last^u ρ^u / (1 − ρ^u)`.
pub(crate) fn tail_estimate(lengths: &[f64], u: f64) -> (Option<f64>, Option<f64>) {
    if lengths.len() < 2 {
        return (None, None);
    }
    let steps = lengths.len() - 1;
    let start = steps - (steps / 4).max(1);
    let rho = (start..steps)
        .map(|n| if lengths[n] > 0.0 { lengths[n + 1] / lengths[n] } else { f64::INFINITY })
        .fold(0.0_f64, f64::max);
    let bound = (rho < 1.0).then(|| {
        let ru = rho.powf(u);
        lengths[steps].powf(u) * ru / (1.0 - ru)
    });
    (Some(rho), bound)
}
