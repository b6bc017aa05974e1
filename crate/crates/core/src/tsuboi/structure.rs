use std::fmt;

use rayon::prelude::*;

use super::{Params, TsuboiError};

/// Index of a block.
pub type V3 = (i64, i64, i64);

/// A closed subinterval `[lo, hi]` of [0,1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
}

impl Piece {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo, self.hi)
    }
}

/// `1/((|i|+1)^p + (|j|+1)^q + (|k|+1)^r)` for `i ≠ 0`, and
/// `1/((|j|+1)^{q′} + (|k|+1)^r)` for `i = 0`.
pub fn raw_length(params: &Params, v: V3) -> f64 {
    let (i, j, k) = v;
    let b = |n: i64| (n.unsigned_abs() + 1) as f64;
    if i != 0 {
        1.0 / (b(i).powf(params.p) + b(j).powf(params.q) + b(k).powf(params.r))
    } else {
        1.0 / (b(j).powf(params.q_prime) + b(k).powf(params.r))
    }
}

/// `Σ_{max(|i|,|j|,|k|) ≤ n} raw_length`.
pub fn raw_sum(params: &Params, n: usize) -> f64 {
    let n = n as i64;
    (-n..=n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for j in -n..=n {
                for k in -n..=n {
                    s += raw_length(params, (i, j, k));
                }
            }
            s
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}

/// Half-width of the index cube whose total mass normalizes every structure
/// with `N ≤ REFERENCE_HALF_WIDTH / 4`; block positions are then independent
/// of the truncation.
pub const REFERENCE_HALF_WIDTH: usize = 128;

/// Blocks `I_v` for `max(|i|,|j|,|k|) ≤ N`, in lexicographic order, with
/// gaps that carry the truncated mass at each level of the structure:
///
/// `[0,1] = G_L ∪ ⋃_i (L_L(i) ∪ ⋃_j (C_L(i,j) ∪ ⋃_k I_{i,j,k} ∪ C_R(i,j)) ∪ L_R(i)) ∪ G_R`,
///
/// where `C_{L,R}(i,j)` hold the blocks with `|k| > N` of column `(i,j)`,
/// `L_{L,R}(i)` the columns with `|j| > N` of level `i`, and `G_{L,R}` the
/// levels with `|i| > N`. Consecutive pieces share endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelStructure3 {
    params: Params,
    n: usize,
    reference: usize,
    /// Normalizing mass: raw lengths summed over the reference cube.
    total_mass: f64,
    blocks: Vec<Piece>,
    /// Normalized length of the virtual block `(i, j, −N−1)`, per column.
    virtual_left: Vec<f64>,
    column_gaps: Vec<(Piece, Piece)>,
    level_gaps: Vec<(Piece, Piece)>,
    global_gaps: (Piece, Piece),
}

/// Per-`(|i|, |j|)` column sums over the reference range.
struct ColumnSums {
    full: Vec<f64>,
    tail: Vec<f64>,
    width: usize,
}

fn column_sums(params: &Params, n: usize, reference: usize) -> ColumnSums {
    let width = reference + 1;
    let pw = |e: f64| -> Vec<f64> { (0..width).map(|m| ((m + 1) as f64).powf(e)).collect() };
    let (pp, pq, pqp, pr) = (pw(params.p), pw(params.q), pw(params.q_prime), pw(params.r));
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..width)
        .into_par_iter()
        .map(|ai| {
            let mut full = Vec::with_capacity(width);
            let mut tail = Vec::with_capacity(width);
            for aj in 0..width {
                let base = if ai == 0 { pqp[aj] } else { pp[ai] + pq[aj] };
                let term = |ak: usize| 1.0 / (base + pr[ak]);
                let t: f64 = (n + 1..width).map(term).sum();
                let inner: f64 = (1..=n.min(reference)).map(term).sum();
                full.push(term(0) + 2.0 * (inner + t));
                tail.push(t);
            }
            (full, tail)
        })
        .collect();
    let mut full = Vec::with_capacity(width * width);
    let mut tail = Vec::with_capacity(width * width);
    for (f, t) in rows {
        full.extend(f);
        tail.extend(t);
    }
    ColumnSums { full, tail, width }
}

impl ColumnSums {
    fn full(&self, i: i64, j: i64) -> f64 {
        self.full[i.unsigned_abs() as usize * self.width + j.unsigned_abs() as usize]
    }

    fn tail(&self, i: i64, j: i64) -> f64 {
        self.tail[i.unsigned_abs() as usize * self.width + j.unsigned_abs() as usize]
    }

    /// `Σ_{j} full(i, j)` over `|j| ≤ reference`, and the part with `|j| > n`.
    fn level(&self, i: i64, n: usize) -> (f64, f64) {
        let r = (self.width - 1) as i64;
        let tail: f64 = (n as i64 + 1..=r).map(|j| self.full(i, j)).sum();
        let inner: f64 = (1..=n as i64).map(|j| self.full(i, j)).sum();
        (self.full(i, 0) + 2.0 * (inner + tail), tail)
    }
}

impl LevelStructure3 {
    /// Lengths from [`raw_length`], normalized by the mass of the reference
    /// cube `max(|v|) ≤ max(128, 4N)`.
    pub fn build(params: &Params, n: usize) -> Result<Self, TsuboiError> {
        if n < 2 {
            return Err(TsuboiError::Truncation(n));
        }
        let res = params.residuals();
        if !(res.b > 0.0) {
            return Err(TsuboiError::NotSummable(format!("1/p + 1/q + 1/r = {} ≥ 1", 1.0 - res.b)));
        }
        if !(res.c > 0.0) {
            return Err(TsuboiError::NotSummable(format!("1/q' + 1/r = {} ≥ 1", 1.0 - res.c)));
        }
        let reference = REFERENCE_HALF_WIDTH.max(4 * n);
        let sums = column_sums(params, n, reference);
        let ni = n as i64;
        let r = reference as i64;
        let levels: Vec<(f64, f64)> = (0..=r).map(|i| sums.level(i, n)).collect();
        let total_mass: f64 = levels[0].0 + 2.0 * levels[1..].iter().map(|l| l.0).sum::<f64>();
        let global_tail: f64 = levels[n + 1..].iter().map(|l| l.0).sum();

        let mut cursor = 0.0;
        let mut take = |mass: f64| {
            let lo = cursor;
            cursor += mass / total_mass;
            Piece { lo, hi: cursor }
        };
        let gl = take(global_tail);
        let w = 2 * n + 1;
        let mut blocks = Vec::with_capacity(w * w * w);
        let mut virtual_left = Vec::with_capacity(w * w);
        let mut column_gaps = Vec::with_capacity(w * w);
        let mut level_gaps = Vec::with_capacity(w);
        for i in -ni..=ni {
            let level_tail = levels[i.unsigned_abs() as usize].1;
            let ll = take(level_tail);
            for j in -ni..=ni {
                let ct = sums.tail(i, j);
                let cl = take(ct);
                for k in -ni..=ni {
                    blocks.push(take(raw_length(params, (i, j, k))));
                }
                let cr = take(ct);
                column_gaps.push((cl, cr));
                virtual_left.push(raw_length(params, (i, j, -ni - 1)) / total_mass);
            }
            let lr = take(level_tail);
            level_gaps.push((ll, lr));
        }
        let mut gr = take(global_tail);
        gr.hi = 1.0;
        Ok(LevelStructure3 {
            params: *params,
            n,
            reference,
            total_mass,
            blocks,
            virtual_left,
            column_gaps,
            level_gaps,
            global_gaps: (gl, gr),
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn reference_half_width(&self) -> usize {
        self.reference
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    fn width(&self) -> i64 {
        2 * self.n as i64 + 1
    }

    pub fn in_range(&self, v: V3) -> bool {
        let n = self.n as i64;
        v.0.abs() <= n && v.1.abs() <= n && v.2.abs() <= n
    }

    fn column_index(&self, i: i64, j: i64) -> usize {
        let n = self.n as i64;
        ((i + n) * self.width() + (j + n)) as usize
    }

    pub fn block(&self, v: V3) -> Option<Piece> {
        if !self.in_range(v) {
            return None;
        }
        let n = self.n as i64;
        Some(self.blocks[(self.column_index(v.0, v.1) as i64 * self.width() + v.2 + n) as usize])
    }

    /// Normalized length of `I_v`, including virtual blocks outside the truncation.
    pub fn length(&self, v: V3) -> f64 {
        match self.block(v) {
            Some(b) => b.len(),
            None => raw_length(&self.params, v) / self.total_mass,
        }
    }

    /// Normalized length of `I_{(i,j,−N−1)}`, as stored.
    pub fn virtual_left(&self, i: i64, j: i64) -> f64 {
        self.virtual_left[self.column_index(i, j)]
    }

    /// Blocks with their indices, in lexicographic order.
    pub fn blocks(&self) -> impl Iterator<Item = (V3, Piece)> + '_ {
        let n = self.n as i64;
        let w = self.width();
        self.blocks.iter().enumerate().map(move |(idx, p)| {
            let idx = idx as i64;
            ((idx / (w * w) - n, (idx / w) % w - n, idx % w - n), *p)
        })
    }

    pub fn column_gaps(&self, i: i64, j: i64) -> (Piece, Piece) {
        self.column_gaps[self.column_index(i, j)]
    }

    pub fn level_gaps(&self, i: i64) -> (Piece, Piece) {
        self.level_gaps[(i + self.n as i64) as usize]
    }

    pub fn end_gaps(&self) -> (Piece, Piece) {
        self.global_gaps
    }

    /// Closure of `I_{i,j}` including its gaps.
    pub fn column(&self, i: i64, j: i64) -> Piece {
        let (l, r) = self.column_gaps(i, j);
        Piece { lo: l.lo, hi: r.hi }
    }

    /// Closure of `I_i` including its gaps.
    pub fn level(&self, i: i64) -> Piece {
        let (l, r) = self.level_gaps(i);
        Piece { lo: l.lo, hi: r.hi }
    }

    /// Total length of all gaps.
    pub fn gap_mass(&self) -> f64 {
        let (gl, gr) = self.global_gaps;
        gl.len()
            + gr.len()
            + self.level_gaps.iter().map(|(a, b)| a.len() + b.len()).sum::<f64>()
            + self.column_gaps.iter().map(|(a, b)| a.len() + b.len()).sum::<f64>()
    }

    /// The block containing `x`, if any.
    pub fn locate(&self, x: f64) -> Option<(V3, Piece)> {
        let n = self.n as i64;
        let i = (-n..=n).find(|&i| self.level(i).contains(x))?;
        let j = (-n..=n).find(|&j| self.column(i, j).contains(x))?;
        let start = self.column_index(i, j) * self.width() as usize;
        let col = &self.blocks[start..start + self.width() as usize];
        let k = col.partition_point(|b| b.hi < x);
        (k < col.len() && col[k].contains(x)).then(|| ((i, j, k as i64 - n), col[k]))
    }

    /// One row per block: `i,j,k,lo,hi,length`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("i,j,k,lo,hi,length\n");
        for ((i, j, k), p) in self.blocks() {
            s.push_str(&format!("{i},{j},{k},{:.17e},{:.17e},{:.17e}\n", p.lo, p.hi, p.len()));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> Params {
        crate::feasibility::find_feasible(0.5).unwrap()
    }

    #[test]
    fn regularized_raw_length() {
        let p = Params::new(0.5, 2.0, 3.0, 2.5, 3.0).unwrap();
        // (1+1)^2 + 1 + 1
        assert_eq!(raw_length(&p, (1, 0, 0)), 1.0 / 6.0);
        assert_eq!(raw_length(&p, (2, 0, 0)), 1.0 / 11.0);
        assert_eq!(raw_length(&p, (0, 0, 0)), 0.5);
        assert_eq!(raw_length(&p, (0, -1, 1)), 1.0 / (2f64.powf(2.5) + 8.0));
    }

    #[test]
    fn raw_sum_below_product_bound() {
        let p = Params::new(0.5, 3.0, 3.0, 3.0, 3.0).unwrap();
        let harmonic: f64 = (-8i64..=8).map(|i| 1.0 / (i.abs() + 1) as f64).sum();
        let three_halves: f64 = (-8i64..=8).map(|i| ((i.abs() + 1) as f64).powf(-1.5)).sum();
        // a+b+c ≥ 3(abc)^{1/3} off level 0 and b+c ≥ 2√(bc) on it
        let bound = (harmonic - 1.0) * harmonic * harmonic / 3.0 + three_halves * three_halves / 2.0;
        let s = raw_sum(&p, 8);
        assert!(s < bound, "{s} vs {bound}");
    }

    #[test]
    fn non_summable_parameters_are_refused() {
        let p = Params::new(0.5, 3.0, 3.0, 3.0, 3.0).unwrap();
        assert!(matches!(LevelStructure3::build(&p, 8), Err(TsuboiError::NotSummable(_))));
        assert!(matches!(LevelStructure3::build(&params(), 1), Err(TsuboiError::Truncation(1))));
    }

    #[test]
    fn pieces_tile_the_interval_in_lex_order() {
        let s = LevelStructure3::build(&params(), 9).unwrap();
        let (gl, gr) = s.end_gaps();
        assert_eq!(gl.lo, 0.0);
        assert_eq!(gr.hi, 1.0);
        let mut prev: Option<(V3, Piece)> = None;
        for (v, b) in s.blocks() {
            assert!(b.len() > 0.0);
            if let Some((u, pb)) = prev {
                assert!(u < v);
                assert!(pb.hi <= b.lo);
                if u.0 == v.0 && u.1 == v.1 {
                    assert_eq!(pb.hi, b.lo);
                }
            }
            prev = Some((v, b));
        }
        assert!(s.block((0, 5, -3)).unwrap().hi <= s.block((1, -9, 0)).unwrap().lo);
        assert!((gl.len() - gr.len()).abs() < 1e-15);
    }

    #[test]
    fn lengths_follow_the_formula() {
        let p = params();
        let s = LevelStructure3::build(&p, 4).unwrap();
        let ratio = s.length((1, 0, 0)) / s.length((0, 0, 0));
        assert!((ratio - raw_length(&p, (1, 0, 0)) / raw_length(&p, (0, 0, 0))).abs() < 1e-12);
    }

    #[test]
    fn block_positions_do_not_depend_on_truncation() {
        let p = params();
        let s8 = LevelStructure3::build(&p, 8).unwrap();
        let s16 = LevelStructure3::build(&p, 16).unwrap();
        // the mass in front of a block is the same lex-smaller material for every N
        for v in [(0, 0, 0), (3, -2, 5), (-8, 8, -8)] {
            let (b8, b16) = (s8.block(v).unwrap(), s16.block(v).unwrap());
            assert!((b8.lo - b16.lo).abs() < 1e-13, "{v:?}: {} vs {}", b8.lo, b16.lo);
            assert!((b8.len() - b16.len()).abs() < 1e-18);
        }
        assert!(s16.gap_mass() < s8.gap_mass());
        assert_eq!(s8.locate(s8.block((1, 2, 3)).unwrap().lo + 1e-12).unwrap().0, (1, 2, 3));
    }
}
