use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::{Chart, LevelStructure3, Piece, V3};
use crate::regularity::SmoothMap;

/// `h_target ∘ h_source⁻¹` from `source` onto `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDiffeo {
    src: Arc<Chart>,
    dst: Arc<Chart>,
}

impl BlockDiffeo {
    pub fn new(src: Arc<Chart>, dst: Arc<Chart>) -> Self {
        BlockDiffeo { src, dst }
    }

    pub fn source(&self) -> Piece {
        Piece { lo: self.src.lo(), hi: self.src.hi() }
    }

    pub fn target(&self) -> Piece {
        Piece { lo: self.dst.lo(), hi: self.dst.hi() }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.dst.eval(self.src.inverse(x))
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let s = self.src.inverse(x);
        self.dst.deriv(s) / self.src.deriv(s)
    }

    pub fn eval_inverse(&self, y: f64) -> f64 {
        self.src.eval(self.dst.inverse(y))
    }

    /// Derivatives at `inf source` and `sup source`.
    pub fn endpoint_derivatives(&self) -> (f64, f64) {
        (self.dst.deriv(0.0) / self.src.deriv(0.0), self.dst.deriv(1.0) / self.src.deriv(1.0))
    }

    /// `(ln g′)′` at `x`.
    pub fn log_deriv_slope(&self, x: f64) -> f64 {
        let s = self.src.inverse(x);
        (self.dst.log_deriv_slope(s) - self.src.log_deriv_slope(s)) / self.src.deriv(s)
    }
}

/// A homeomorphism of [0,1] given by block diffeomorphisms with pairwise
/// adjacent or disjoint sources, and the identity elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    name: String,
    segments: Vec<BlockDiffeo>,
}

impl Generator {
    pub fn new(name: impl Into<String>, mut segments: Vec<BlockDiffeo>) -> Self {
        segments.sort_by(|a, b| a.src.lo().total_cmp(&b.src.lo()));
        Generator { name: name.into(), segments }
    }

    pub fn identity(name: impl Into<String>) -> Self {
        Generator { name: name.into(), segments: Vec::new() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn segments(&self) -> &[BlockDiffeo] {
        &self.segments
    }

    pub fn segment_at(&self, x: f64) -> Option<&BlockDiffeo> {
        let idx = self.segments.partition_point(|s| s.src.hi() < x);
        self.segments.get(idx).filter(|s| s.src.lo() <= x)
    }

    fn segment_onto(&self, y: f64) -> Option<&BlockDiffeo> {
        let idx = self.segments.partition_point(|s| s.dst.hi() < y);
        self.segments.get(idx).filter(|s| s.dst.lo() <= y)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.segment_at(x).map_or(x, |s| s.eval(x))
    }

    pub fn deriv(&self, x: f64) -> f64 {
        self.segment_at(x).map_or(1.0, |s| s.deriv(x))
    }

    pub fn eval_inverse(&self, y: f64) -> f64 {
        self.segment_onto(y).map_or(y, |s| s.eval_inverse(y))
    }

    /// `g^n(x)` for any integer `n`.
    pub fn pow_eval(&self, n: i64, x: f64) -> f64 {
        let mut y = x;
        for _ in 0..n.unsigned_abs() {
            y = if n > 0 { self.eval(y) } else { self.eval_inverse(y) };
        }
        y
    }
}

impl SmoothMap for Generator {
    fn eval(&self, x: f64) -> f64 {
        Generator::eval(self, x)
    }

    fn deriv(&self, x: f64) -> f64 {
        Generator::deriv(self, x)
    }
}

/// The generators `a`, `b`, `t` over a level structure.
///
/// `a` maps `I_v` onto `I_{v+e₁}`, `t` maps `I_v` onto `I_{v+e₃}` and `b`
/// maps `I_v` onto `I_{v+e₂}` for `v` in level 0, each via the chart
/// `h_{target} ∘ h_v⁻¹`; gaps map to the corresponding gaps. Every piece
/// endpoint `x` carries a scale `s(x)` equal to `h′` at `x` for both charts
/// meeting there, with `s(sup I_v) = |I_v|`. Truncation boundaries are
/// absorbed by single charts onto or from a union of pieces.
#[derive(Clone, Debug)]
pub struct ConstructedAction {
    structure: LevelStructure3,
    pub a: Arc<Generator>,
    pub b: Arc<Generator>,
    pub t: Arc<Generator>,
}

/// Scales at piece endpoints and the shared piece charts.
struct Charts<'a> {
    s: &'a LevelStructure3,
    n: i64,
    blocks: HashMap<V3, Arc<Chart>>,
    col_left: HashMap<(i64, i64), Arc<Chart>>,
    col_right: HashMap<(i64, i64), Arc<Chart>>,
    lev_left: HashMap<i64, Arc<Chart>>,
    lev_right: HashMap<i64, Arc<Chart>>,
    global: (Arc<Chart>, Arc<Chart>),
}

fn geo(a: f64, b: f64) -> f64 {
    (a * b).sqrt()
}

impl<'a> Charts<'a> {
    fn scale_col_start(s: &LevelStructure3, i: i64, j: i64) -> f64 {
        let n = s.n() as i64;
        let cl = s.column_gaps(i, j).0.len();
        if j == -n {
            geo(s.level_gaps(i).0.len(), cl)
        } else {
            geo(s.column_gaps(i, j - 1).1.len(), cl)
        }
    }

    fn scale_col_end(s: &LevelStructure3, i: i64, j: i64) -> f64 {
        let n = s.n() as i64;
        if j == n {
            geo(s.column_gaps(i, n).1.len(), s.level_gaps(i).1.len())
        } else {
            Self::scale_col_start(s, i, j + 1)
        }
    }

    fn scale_level_start(s: &LevelStructure3, i: i64) -> f64 {
        let n = s.n() as i64;
        let ll = s.level_gaps(i).0.len();
        if i == -n {
            geo(s.end_gaps().0.len(), ll)
        } else {
            geo(s.level_gaps(i - 1).1.len(), ll)
        }
    }

    fn scale_level_end(s: &LevelStructure3, i: i64) -> f64 {
        let n = s.n() as i64;
        if i == n {
            geo(s.level_gaps(n).1.len(), s.end_gaps().1.len())
        } else {
            Self::scale_level_start(s, i + 1)
        }
    }

    fn new(s: &'a LevelStructure3) -> Self {
        let n = s.n() as i64;
        let block_list: Vec<(V3, Piece)> = s.blocks().collect();
        let blocks: HashMap<V3, Arc<Chart>> = block_list
            .par_iter()
            .map(|&(v, p)| {
                let left = s.length((v.0, v.1, v.2 - 1));
                (v, Arc::new(Chart::new(p.lo, p.hi, left, p.len())))
            })
            .collect();
        let cols: Vec<(i64, i64)> = (-n..=n).flat_map(|i| (-n..=n).map(move |j| (i, j))).collect();
        let col_left = cols
            .par_iter()
            .map(|&(i, j)| {
                let g = s.column_gaps(i, j).0;
                ((i, j), Arc::new(Chart::new(g.lo, g.hi, Self::scale_col_start(s, i, j), s.virtual_left(i, j))))
            })
            .collect();
        let col_right = cols
            .par_iter()
            .map(|&(i, j)| {
                let g = s.column_gaps(i, j).1;
                ((i, j), Arc::new(Chart::new(g.lo, g.hi, s.length((i, j, n)), Self::scale_col_end(s, i, j))))
            })
            .collect();
        let lev_left = (-n..=n)
            .map(|i| {
                let g = s.level_gaps(i).0;
                (i, Arc::new(Chart::new(g.lo, g.hi, Self::scale_level_start(s, i), Self::scale_col_start(s, i, -n))))
            })
            .collect();
        let lev_right = (-n..=n)
            .map(|i| {
                let g = s.level_gaps(i).1;
                (i, Arc::new(Chart::new(g.lo, g.hi, Self::scale_col_end(s, i, n), Self::scale_level_end(s, i))))
            })
            .collect();
        let (gl, gr) = s.end_gaps();
        let global = (
            Arc::new(Chart::new(gl.lo, gl.hi, gl.len(), Self::scale_level_start(s, -n))),
            Arc::new(Chart::new(gr.lo, gr.hi, Self::scale_level_end(s, n), gr.len())),
        );
        Charts { s, n, blocks, col_left, col_right, lev_left, lev_right, global }
    }

    fn seg(src: &Arc<Chart>, dst: &Arc<Chart>) -> BlockDiffeo {
        BlockDiffeo::new(src.clone(), dst.clone())
    }

    /// Piece-to-piece maps of column `(i, j)` onto column `(i2, j2)`.
    fn column_map(&self, (i, j): (i64, i64), (i2, j2): (i64, i64), out: &mut Vec<BlockDiffeo>) {
        out.push(Self::seg(&self.col_left[&(i, j)], &self.col_left[&(i2, j2)]));
        for k in -self.n..=self.n {
            out.push(Self::seg(&self.blocks[&(i, j, k)], &self.blocks[&(i2, j2, k)]));
        }
        out.push(Self::seg(&self.col_right[&(i, j)], &self.col_right[&(i2, j2)]));
    }

    fn build_a(&self) -> Generator {
        let (n, s) = (self.n, self.s);
        let mut segs = Vec::new();
        for i in -n..n {
            segs.push(Self::seg(&self.lev_left[&i], &self.lev_left[&(i + 1)]));
            for j in -n..=n {
                self.column_map((i, j), (i + 1, j), &mut segs);
            }
            segs.push(Self::seg(&self.lev_right[&i], &self.lev_right[&(i + 1)]));
        }
        let (gl, gr) = s.end_gaps();
        let first = s.level(-n);
        let onto = Chart::new(0.0, first.hi, gl.len(), Self::scale_level_end(s, -n));
        segs.push(BlockDiffeo::new(self.global.0.clone(), Arc::new(onto)));
        let last = s.level(n);
        let from = Chart::new(last.lo, 1.0, Self::scale_level_start(s, n), gr.len());
        segs.push(BlockDiffeo::new(Arc::new(from), self.global.1.clone()));
        Generator::new("a", segs)
    }

    fn build_b(&self) -> Generator {
        let (n, s) = (self.n, self.s);
        let mut segs = Vec::new();
        for j in -n..n {
            self.column_map((0, j), (0, j + 1), &mut segs);
        }
        let level = s.level(0);
        let first = s.column(0, -n);
        let onto = Chart::new(level.lo, first.hi, Self::scale_level_start(s, 0), Self::scale_col_end(s, 0, -n));
        segs.push(BlockDiffeo::new(self.lev_left[&0].clone(), Arc::new(onto)));
        let last = s.column(0, n);
        let from = Chart::new(last.lo, level.hi, Self::scale_col_start(s, 0, n), Self::scale_level_end(s, 0));
        segs.push(BlockDiffeo::new(Arc::new(from), self.lev_right[&0].clone()));
        Generator::new("b", segs)
    }

    fn build_t(&self) -> Generator {
        let (n, s) = (self.n, self.s);
        let cols: Vec<(i64, i64)> = (-n..=n).flat_map(|i| (-n..=n).map(move |j| (i, j))).collect();
        let segs: Vec<BlockDiffeo> = cols
            .par_iter()
            .flat_map_iter(|&(i, j)| {
                let mut out = Vec::new();
                let col = s.column(i, j);
                let first = s.block((i, j, -n)).unwrap();
                let onto = Chart::new(col.lo, first.hi, Self::scale_col_start(s, i, j), first.len());
                out.push(BlockDiffeo::new(self.col_left[&(i, j)].clone(), Arc::new(onto)));
                for k in -n..n {
                    out.push(Self::seg(&self.blocks[&(i, j, k)], &self.blocks[&(i, j, k + 1)]));
                }
                let last = s.block((i, j, n)).unwrap();
                let from = Chart::new(last.lo, col.hi, s.length((i, j, n - 1)), Self::scale_col_end(s, i, j));
                out.push(BlockDiffeo::new(Arc::new(from), self.col_right[&(i, j)].clone()));
                out
            })
            .collect();
        Generator::new("t", segs)
    }
}

impl ConstructedAction {
    pub fn build(structure: LevelStructure3) -> Self {
        let (a, b, t) = {
            let charts = Charts::new(&structure);
            (charts.build_a(), charts.build_b(), charts.build_t())
        };
        ConstructedAction { structure, a: Arc::new(a), b: Arc::new(b), t: Arc::new(t) }
    }

    pub fn structure(&self) -> &LevelStructure3 {
        &self.structure
    }

    pub fn generators(&self) -> [&Arc<Generator>; 3] {
        [&self.a, &self.b, &self.t]
    }

    /// Same action with `b` replaced.
    pub fn with_b(&self, b: Generator) -> Self {
        ConstructedAction { b: Arc::new(b), ..self.clone() }
    }

    /// One row per block: index, endpoints, length, and the derivatives of
    /// `a` and `t` at both endpoints.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("i,j,k,lo,hi,length,da_inf,da_sup,dt_inf,dt_sup\n");
        for ((i, j, k), p) in self.structure.blocks() {
            let x = 0.5 * (p.lo + p.hi);
            let (a0, a1) = self.a.segment_at(x).map_or((1.0, 1.0), |g| g.endpoint_derivatives());
            let (t0, t1) = self.t.segment_at(x).map_or((1.0, 1.0), |g| g.endpoint_derivatives());
            s.push_str(&format!(
                "{i},{j},{k},{:.17e},{:.17e},{:.17e},{a0:.17e},{a1:.17e},{t0:.17e},{t1:.17e}\n",
                p.lo,
                p.hi,
                p.len()
            ));
        }
        s
    }
}

/// Builds the structure and the generators.
pub fn build_action(params: &super::Params, n: usize) -> Result<ConstructedAction, super::TsuboiError> {
    Ok(ConstructedAction::build(LevelStructure3::build(params, n)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn action(n: usize) -> ConstructedAction {
        build_action(&crate::feasibility::find_feasible(0.5).unwrap(), n).unwrap()
    }

    #[test]
    fn generators_are_increasing_with_positive_derivative() {
        let act = action(4);
        for g in act.generators() {
            let mut prev = -1.0;
            for m in 0..=10_000 {
                let x = m as f64 / 10_000.0;
                let y = g.eval(x);
                assert!(y > prev || (m == 0 && y == 0.0), "{} at {x}", g.name());
                assert!(g.deriv(x) > 0.0);
                prev = y;
            }
            assert_eq!(g.eval(0.0), 0.0);
            assert_eq!(g.eval(1.0), 1.0);
        }
    }

    #[test]
    fn endpoint_derivatives_follow_length_ratios() {
        let act = action(4);
        let s = act.structure();
        let v = (1, 0, 0);
        let blk = s.block(v).unwrap();
        let x = 0.5 * (blk.lo + blk.hi);
        let (a0, a1) = act.a.segment_at(x).unwrap().endpoint_derivatives();
        let e1 = (2, 0, 0);
        assert!((a1 / (s.length(e1) / s.length(v)) - 1.0).abs() < 1e-12);
        assert!((a0 / (s.length((2, 0, -1)) / s.length((1, 0, -1))) - 1.0).abs() < 1e-12);
        let (t0, t1) = act.t.segment_at(x).unwrap().endpoint_derivatives();
        assert!((t1 / (s.length((1, 0, 1)) / s.length(v)) - 1.0).abs() < 1e-12);
        assert!((t0 / (s.length(v) / s.length((1, 0, -1))) - 1.0).abs() < 1e-12);
        assert!((act.a.eval(blk.lo) - s.block(e1).unwrap().lo).abs() < 1e-15);
        assert!((act.t.deriv(blk.hi) - s.length((1, 0, 1)) / s.length(v)).abs() < 1e-9);
    }

    #[test]
    fn b_is_identity_off_level_zero() {
        let act = action(4);
        let l0 = act.structure().level(0);
        for m in 0..=1000 {
            let x = m as f64 / 1000.0;
            if !l0.contains(x) {
                assert_eq!(act.b.eval(x), x);
            }
        }
    }

    #[test]
    fn inverses_round_trip() {
        let act = action(3);
        for g in act.generators() {
            for m in 0..=500 {
                let x = m as f64 / 500.0;
                assert!((g.eval_inverse(g.eval(x)) - x).abs() < 1e-13, "{} at {x}", g.name());
            }
        }
    }
}
