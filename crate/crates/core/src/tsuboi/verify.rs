use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::{ConstructedAction, Generator, Piece, V3};
use crate::exact_pl::{Interval, Rational};
use crate::regularity::{
    check_displacement, holder_norm, HolderEstimate, NestingWitness, RegularityError, SmoothMap, WitnessMap,
};

fn max_norm(v: V3) -> i64 {
    v.0.abs().max(v.1.abs()).max(v.2.abs())
}

/// Blocks whose max-norm is at most `bound`, in lexicographic order.
fn core_blocks(action: &ConstructedAction, bound: i64) -> Vec<(V3, Piece)> {
    action.structure().blocks().filter(|&(v, _)| max_norm(v) <= bound).collect()
}

/// Margin from the truncation boundary inside which every relation is
/// evaluated through block maps only.
pub const VALID_MARGIN: i64 = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct CommutationReport {
    pub points: usize,
    pub at: f64,
    pub bt: f64,
    /// `(m, max |[a^m b a^{−m}, b](x) − x|)`.
    pub lamp: Vec<(i64, f64)>,
}

impl CommutationReport {
    pub fn max_deviation(&self) -> f64 {
        self.lamp.iter().map(|l| l.1).fold(self.at.max(self.bt), f64::max)
    }
}

fn commutator(
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
    fi: impl Fn(f64) -> f64,
    gi: impl Fn(f64) -> f64,
    x: f64,
) -> f64 {
    f(g(fi(gi(x))))
}

/// Deviation of the defining relations at `sample_count` points spread over
/// the blocks of max-norm at most `N − VALID_MARGIN`.
pub fn verify_commutations(action: &ConstructedAction, sample_count: usize) -> CommutationReport {
    let bound = (action.structure().n() as i64 - VALID_MARGIN).max(0);
    let blocks = core_blocks(action, bound);
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let points: Vec<f64> = (0..sample_count)
        .map(|m| {
            let p = blocks[(m * 7919) % blocks.len()].1;
            let s = ((m as f64 + 1.0) * golden).fract();
            p.lo + s * p.len()
        })
        .collect();
    let (a, b, t) = (&action.a, &action.b, &action.t);
    let dev =
        |rel: &(dyn Fn(f64) -> f64 + Sync)| points.par_iter().map(|&x| (rel(x) - x).abs()).reduce(|| 0.0, f64::max);
    let at = dev(&|x| commutator(|y| a.eval(y), |y| t.eval(y), |y| a.eval_inverse(y), |y| t.eval_inverse(y), x));
    let bt = dev(&|x| commutator(|y| b.eval(y), |y| t.eval(y), |y| b.eval_inverse(y), |y| t.eval_inverse(y), x));
    let lamp = (1..=3)
        .map(|m| {
            let c = |y: f64| a.pow_eval(m, b.eval(a.pow_eval(-m, y)));
            let ci = |y: f64| a.pow_eval(m, b.eval_inverse(a.pow_eval(-m, y)));
            (m, dev(&|x| commutator(c, |y| b.eval(y), ci, |y| b.eval_inverse(y), x)))
        })
        .collect();
    CommutationReport { points: points.len(), at, bt, lamp }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JunctionReport {
    /// Shared endpoints of consecutive block maps.
    pub junctions: usize,
    /// Largest relative difference of one-sided derivatives at a junction.
    pub max_mismatch: f64,
    /// Largest `|g′ − 1|` where a block map meets the identity region.
    pub max_identity_mismatch: f64,
    /// Largest relative error of a block endpoint derivative against its
    /// prescribed length ratio.
    pub max_prescription_error: f64,
}

impl JunctionReport {
    pub fn compatible(&self, tol: f64) -> bool {
        self.max_mismatch <= tol && self.max_identity_mismatch <= tol && self.max_prescription_error <= tol
    }
}

fn junctions_of(g: &Generator) -> (usize, f64, f64) {
    let segs = g.segments();
    let (mut count, mut mismatch, mut ident) = (0, 0f64, 0f64);
    for (idx, seg) in segs.iter().enumerate() {
        let (d0, d1) = seg.endpoint_derivatives();
        let src = seg.source();
        match idx.checked_sub(1).map(|p| &segs[p]) {
            Some(prev) if prev.source().hi == src.lo => {
                count += 1;
                mismatch = mismatch.max((prev.endpoint_derivatives().1 / d0 - 1.0).abs());
            }
            _ => ident = ident.max((d0 - 1.0).abs()),
        }
        if segs.get(idx + 1).map_or(true, |next| next.source().lo != src.hi) {
            ident = ident.max((d1 - 1.0).abs());
        }
    }
    (count, mismatch, ident)
}

/// One-sided derivative agreement at every junction of every generator, and
/// the endpoint prescriptions `g′(sup I_v) = |g I_v|/|I_v|`,
/// `g′(inf I_v) = |g I_{v−e₃}|/|I_{v−e₃}|` on every block map.
pub fn junction_report(action: &ConstructedAction) -> JunctionReport {
    let s = action.structure();
    let (mut junctions, mut max_mismatch, mut max_identity_mismatch) = (0, 0f64, 0f64);
    for g in action.generators() {
        let (c, m, i) = junctions_of(g);
        junctions += c;
        max_mismatch = max_mismatch.max(m);
        max_identity_mismatch = max_identity_mismatch.max(i);
    }
    let shifts: [(&Arc<Generator>, V3); 3] = [(&action.a, (1, 0, 0)), (&action.b, (0, 1, 0)), (&action.t, (0, 0, 1))];
    let blocks: Vec<(V3, Piece)> = s.blocks().collect();
    let max_prescription_error = blocks
        .par_iter()
        .map(|&((i, j, k), p)| {
            let mut worst = 0f64;
            for (g, e) in &shifts {
                let u = (i + e.0, j + e.1, k + e.2);
                if !s.in_range(u) || (e.1 == 1 && i != 0) {
                    continue;
                }
                let Some(seg) = g.segment_at(0.5 * (p.lo + p.hi)) else {
                    continue;
                };
                if seg.source() != p {
                    continue;
                }
                let (d0, d1) = seg.endpoint_derivatives();
                let want1 = s.length(u) / s.length((i, j, k));
                let want0 = s.length((u.0, u.1, u.2 - 1)) / s.length((i, j, k - 1));
                worst = worst.max((d1 / want1 - 1.0).abs()).max((d0 / want0 - 1.0).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    JunctionReport { junctions, max_mismatch, max_identity_mismatch, max_prescription_error }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzReport {
    pub blocks_checked: usize,
    pub m_estimate: f64,
    /// Largest grid Lipschitz estimate of `ln g′` over its bound.
    pub worst_ratio: f64,
    pub worst_block: Option<(String, V3)>,
    /// Smallest `M` for which every checked block satisfies the bound.
    pub empirical_m: f64,
}

impl LipschitzReport {
    pub fn holds(&self) -> bool {
        self.worst_ratio <= 1.0
    }
}

/// Relative ratio variation below which a block map counts as affine.
const AFFINE_RATIO_TOL: f64 = 1e-12;
/// Scaled log-derivative slope tolerated on a block map counted as affine.
const AFFINE_SLOPE_TOL: f64 = 1e-8;

/// Grid Lipschitz constant of `ln g′` on every block-to-block map against
/// `(M/|I_u|)·|(|I_u|/|I_v|)/(|I_{u−e₃}|/|I_{v−e₃}|) − 1|` for `g: I_u → I_v`.
pub fn check_log_deriv_lipschitz(action: &ConstructedAction, m_estimate: f64) -> LipschitzReport {
    const GRID: usize = 64;
    let s = action.structure();
    let shifts: [(&Arc<Generator>, V3); 3] = [(&action.a, (1, 0, 0)), (&action.b, (0, 1, 0)), (&action.t, (0, 0, 1))];
    let blocks: Vec<(V3, Piece)> = s.blocks().collect();
    let rows: Vec<(String, V3, f64, f64)> = blocks
        .par_iter()
        .flat_map_iter(|&(u, p)| {
            let mut out = Vec::new();
            for (g, e) in &shifts {
                let v = (u.0 + e.0, u.1 + e.1, u.2 + e.2);
                if !s.in_range(v) || (e.1 == 1 && u.0 != 0) {
                    continue;
                }
                let Some(seg) = g.segment_at(0.5 * (p.lo + p.hi)) else {
                    continue;
                };
                if seg.source() != p {
                    continue;
                }
                let lip = (0..=GRID)
                    .map(|m| seg.log_deriv_slope(p.lo + p.len() * m as f64 / GRID as f64).abs())
                    .fold(0.0, f64::max);
                let r = (s.length(u) / s.length(v)) / (s.length((u.0, u.1, u.2 - 1)) / s.length((v.0, v.1, v.2 - 1)));
                out.push((g.name().to_string(), u, lip * p.len(), (r - 1.0).abs()));
            }
            out
        })
        .collect();
    let mut worst_ratio = 0f64;
    let mut worst_block = None;
    let mut empirical_m = 0f64;
    for (name, u, scaled, dev) in &rows {
        let (ratio, m) = if *dev <= AFFINE_RATIO_TOL {
            if *scaled <= AFFINE_SLOPE_TOL {
                (0.0, 0.0)
            } else {
                (f64::INFINITY, f64::INFINITY)
            }
        } else {
            (scaled / (m_estimate * dev), scaled / dev)
        };
        empirical_m = empirical_m.max(m);
        if ratio > worst_ratio || worst_block.is_none() {
            worst_ratio = worst_ratio.max(ratio);
            worst_block = Some((name.clone(), *u));
        }
    }
    LipschitzReport { blocks_checked: rows.len(), m_estimate, worst_ratio, worst_block, empirical_m }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NestedSupportReport {
    pub points: usize,
    /// `a` moves every sampled point of `(0,1)`.
    pub a_full: bool,
    /// `b` fixes everything off the interior of level 0, moves every sampled
    /// interior point, and fixes the level endpoints exactly.
    pub b_on_level_zero: bool,
    /// Column `(0,0)`: `t` fixes its endpoints exactly, moves its sampled
    /// interior points, and its closure lies inside the interior of level 0.
    pub t_component: Option<Piece>,
}

impl NestedSupportReport {
    pub fn passed(&self) -> bool {
        self.a_full && self.b_on_level_zero && self.t_component.is_some()
    }
}

pub fn nested_support_report(action: &ConstructedAction) -> NestedSupportReport {
    const GRID: usize = 10_000;
    let s = action.structure();
    let level = s.level(0);
    let col = s.column(0, 0);
    let grid: Vec<f64> = (1..GRID).map(|m| m as f64 / GRID as f64).collect();
    let a_full = grid.par_iter().all(|&x| action.a.eval(x) != x);
    let inside = |x: f64| x > level.lo && x < level.hi;
    let b_grid = grid.par_iter().all(|&x| (action.b.eval(x) != x) == inside(x));
    let b_level = (0..=GRID).all(|m| {
        let x = level.lo + level.len() * m as f64 / GRID as f64;
        (action.b.eval(x) == x) == (m == 0 || m == GRID)
    });
    let t_moves = (1..GRID).all(|m| {
        let x = col.lo + col.len() * m as f64 / GRID as f64;
        action.t.eval(x) != x
    });
    let t_fixes = action.t.eval(col.lo) == col.lo && action.t.eval(col.hi) == col.hi;
    let closure_inside = level.lo < col.lo && col.hi < level.hi;
    NestedSupportReport {
        points: grid.len(),
        a_full,
        b_on_level_zero: b_grid && b_level,
        t_component: (t_moves && t_fixes && closure_inside).then_some(col),
    }
}

/// `supp b ⊆ J̄₁ ⊆ supp a` with a component of `supp t` inside `supp b`.
pub fn nested_support_check(action: &ConstructedAction) -> bool {
    nested_support_report(action).passed()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnDisplacement {
    pub column: (i64, i64),
    pub constant: f64,
    pub worst_ratio: f64,
    pub violations: usize,
    pub points: usize,
}

/// The displacement inequality for `t` on column `(i, j)` from its fixed
/// left end, sampled at `points_per_block` points of each block with
/// `|k| ≤ k_bound`.
pub fn column_displacement(
    action: &ConstructedAction,
    column: (i64, i64),
    tau: f64,
    points_per_block: usize,
    k_bound: i64,
) -> Result<ColumnDisplacement, RegularityError> {
    let s = action.structure();
    let a = s.column(column.0, column.1).lo;
    let mut xs = vec![a];
    for k in -k_bound..=k_bound {
        let p = s.block((column.0, column.1, k)).expect("block inside the truncation");
        xs.extend((1..=points_per_block).map(|m| p.lo + p.len() * m as f64 / points_per_block as f64));
    }
    let fx: Vec<f64> = xs.par_iter().map(|&x| action.t.eval(x)).collect();
    let dfx: Vec<f64> = xs.par_iter().map(|&x| action.t.deriv(x)).collect();
    let r = check_displacement(&xs, &fx, &dfx, a, tau)?;
    Ok(ColumnDisplacement {
        column,
        constant: r.constant,
        worst_ratio: r.worst_ratio,
        violations: r.violations.len(),
        points: r.points_checked,
    })
}

/// [`column_displacement`] on every column with `|i|, |j| ≤ N − margin`.
pub fn displacement_check(
    action: &ConstructedAction,
    tau: f64,
    points_per_block: usize,
    margin: i64,
) -> Result<Vec<ColumnDisplacement>, RegularityError> {
    let bound = (action.structure().n() as i64 - margin).max(0);
    let cols: Vec<(i64, i64)> = (-bound..=bound).flat_map(|i| (-bound..=bound).map(move |j| (i, j))).collect();
    cols.par_iter().map(|&c| column_displacement(action, c, tau, points_per_block, bound)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockDisplacement {
    pub blocks: usize,
    pub points: usize,
    pub constant: f64,
    /// Largest `|t(x)−x| / (C |x−a|^{1+τ})` with `a` the left end of the
    /// block's column.
    pub worst_ratio: f64,
    pub violations: usize,
}

impl BlockDisplacement {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// `|t(x)−x| ≤ C·|x−a|^{1+τ}` at `points_per_block` points of every block,
/// where `a` is the fixed left end of the block's column and
/// `C = HOLDER_INFLATION · dt_estimate`.
pub fn block_displacement(
    action: &ConstructedAction,
    tau: f64,
    points_per_block: usize,
    dt_estimate: f64,
) -> BlockDisplacement {
    let s = action.structure();
    let constant = crate::regularity::HOLDER_INFLATION * dt_estimate;
    let blocks: Vec<(V3, Piece)> = s.blocks().collect();
    let per_block: Vec<(f64, usize)> = blocks
        .par_iter()
        .map(|&((i, j, _), p)| {
            let a = s.column(i, j).lo;
            let (mut worst, mut bad) = (0f64, 0usize);
            for m in 1..=points_per_block {
                let x = p.lo + p.len() * m as f64 / points_per_block as f64;
                let lhs = (action.t.eval(x) - x).abs();
                let rhs = constant * (x - a).powf(1.0 + tau);
                if lhs > rhs + 4.0 * f64::EPSILON {
                    bad += 1;
                }
                worst = worst.max(lhs / rhs);
            }
            (worst, bad)
        })
        .collect();
    BlockDisplacement {
        blocks: blocks.len(),
        points: blocks.len() * points_per_block,
        constant,
        worst_ratio: per_block.iter().map(|r| r.0).fold(0.0, f64::max),
        violations: per_block.iter().map(|r| r.1).sum(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeHolder {
    pub da: HolderEstimate,
    pub dt: HolderEstimate,
}

fn column_holder(
    action: &ConstructedAction,
    g: &Generator,
    (i, j): (i64, i64),
    bound: i64,
    tau: f64,
    points_per_block: usize,
) -> Result<HolderEstimate, RegularityError> {
    let s = action.structure();
    let mut xs = Vec::new();
    for k in -bound..=bound {
        let p = s.block((i, j, k)).expect("block inside the truncation");
        xs.extend((0..points_per_block).map(|m| p.lo + p.len() * m as f64 / points_per_block as f64));
    }
    xs.push(s.block((i, j, bound)).expect("block inside the truncation").hi);
    let fs: Vec<f64> = xs.iter().map(|&x| g.deriv(x)).collect();
    holder_norm(&xs, &fs, tau)
}

/// Grid estimates of `[Da]_τ` and `[Dt]_τ`, each the maximum over columns
/// with `|i|, |j| ≤ N − margin` of the all-pairs estimate on that column's
/// blocks with `|k| ≤ N − margin`.
pub fn derivative_holder(
    action: &ConstructedAction,
    tau: f64,
    points_per_block: usize,
    margin: i64,
) -> Result<DerivativeHolder, RegularityError> {
    let bound = (action.structure().n() as i64 - margin).max(0);
    let cols: Vec<(i64, i64)> = (-bound..=bound).flat_map(|i| (-bound..=bound).map(move |j| (i, j))).collect();
    let best = |g: &Generator| -> Result<HolderEstimate, RegularityError> {
        let all: Vec<HolderEstimate> = cols
            .par_iter()
            .map(|&c| column_holder(action, g, c, bound, tau, points_per_block))
            .collect::<Result<_, _>>()?;
        Ok(all.into_iter().reduce(|x, y| if y.value > x.value { y } else { x }).expect("at least one column"))
    };
    Ok(DerivativeHolder { da: best(&action.a)?, dt: best(&action.t)? })
}

fn open_interval(p: Piece) -> Interval {
    let lo = Rational::from_float(p.lo).expect("finite endpoint");
    let hi = Rational::from_float(p.hi).expect("finite endpoint");
    Interval::open(lo, hi).expect("nonempty piece")
}

/// `{b, t}` as a (2, u)-nesting: `J₁` is column `(0,0)`, `J₂` its block
/// `(0,0,0)`, `w_n = bⁿ`, and `t` certifies every step since it preserves
/// each column of level 0 and moves every block off itself.
pub fn tsuboi_nesting_witness(action: &ConstructedAction, u: f64) -> Result<NestingWitness, RegularityError> {
    let s = action.structure();
    let b: Arc<dyn SmoothMap> = action.b.clone();
    let t: Arc<dyn SmoothMap> = action.t.clone();
    NestingWitness::new(
        vec![WitnessMap::smooth("b", b), WitnessMap::smooth("t", t)],
        vec![open_interval(s.column(0, 0)), open_interval(s.block((0, 0, 0)).expect("central block"))],
        u,
        vec![0],
        true,
        [(2, 1)].into_iter().collect(),
        BTreeMap::new(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsuboi::build_action;

    fn action(n: usize) -> ConstructedAction {
        build_action(&crate::feasibility::find_feasible(0.5).unwrap(), n).unwrap()
    }

    #[test]
    fn relations_hold_in_the_valid_region() {
        let r = verify_commutations(&action(6), 400);
        assert!(r.max_deviation() <= 1e-9, "{r:?}");
    }

    #[test]
    fn junctions_are_c1() {
        let r = junction_report(&action(4));
        assert!(r.junctions > 0);
        assert!(r.compatible(1e-12), "{r:?}");
    }

    #[test]
    fn lipschitz_report_finds_a_finite_constant() {
        let act = action(4);
        let r = check_log_deriv_lipschitz(&act, 1.0);
        assert!(r.empirical_m.is_finite() && r.empirical_m > 0.0);
        let again = check_log_deriv_lipschitz(&act, r.empirical_m * 1.0001);
        assert!(again.holds(), "{again:?}");
    }

    #[test]
    fn supports_are_nested_and_break_without_b() {
        let act = action(4);
        assert!(nested_support_check(&act));
        assert!(!nested_support_check(&act.with_b(Generator::identity("b"))));
    }

    #[test]
    fn displacement_holds_on_the_central_column() {
        let r = column_displacement(&action(4), (0, 0), 0.5, 200, 2).unwrap();
        assert_eq!(r.violations, 0, "{r:?}");
    }

    #[test]
    fn witness_passes_condition_ii() {
        let act = action(6);
        let w = tsuboi_nesting_witness(&act, 0.5).unwrap();
        assert_eq!(crate::regularity::check_condition_ii(&w, 5).unwrap(), None);
    }
}
