//! Ordered Bratteli diagrams with consecutive ordering.
//!
//! A diagram is described by finitely many levels `(M(k), Q(k))`, `k = 1..=K`; every
//! level beyond `K` repeats the last one. A stationary diagram is the special case
//! `K = 1`. Vertices are numbered `1..=l(k)` in every user-facing position (edges,
//! error messages); matrix accessors use 0-based `(row, col)` indices.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

fn dense_rows<R: AsRef<[u32]>>(rows: &[R]) -> Result<(usize, usize, Vec<u32>)> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err(Error::MalformedMatrix("no rows".to_string()));
    }
    let ncols = rows[0].as_ref().len();
    if ncols == 0 {
        return Err(Error::MalformedMatrix("no columns".to_string()));
    }
    let mut entries = Vec::with_capacity(nrows * ncols);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_ref();
        if row.len() != ncols {
            return Err(Error::MalformedMatrix(format!(
                "row {} has {} entries, expected {}",
                i + 1,
                row.len(),
                ncols
            )));
        }
        entries.extend_from_slice(row);
    }
    Ok((nrows, ncols, entries))
}

/// Edge multiplicities between two consecutive levels.
///
/// Entry `(i, j)` counts the edges from vertex `j + 1` of level `k - 1` to vertex
/// `i + 1` of level `k`. No row or column may be identically zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl IncidenceMatrix {
    pub fn new<R: AsRef<[u32]>>(rows: &[R]) -> Result<Self> {
        let (rows, cols, entries) = dense_rows(rows)?;
        let m = IncidenceMatrix {
            rows,
            cols,
            entries,
        };
        for i in 0..m.rows {
            if m.row(i).iter().all(|&x| x == 0) {
                return Err(Error::ZeroRow(i + 1));
            }
        }
        for j in 0..m.cols {
            if (0..m.rows).all(|i| m.get(i, j) == 0) {
                return Err(Error::ZeroColumn(j + 1));
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Indegree of vertex `i + 1`.
    pub fn row_sum(&self, i: usize) -> u64 {
        self.row(i).iter().map(|&x| u64::from(x)).sum()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    fn pattern(&self) -> BoolMatrix {
        BoolMatrix {
            rows: self.rows,
            cols: self.cols,
            bits: self.entries.iter().map(|&x| x > 0).collect(),
        }
    }
}

/// Rank of each source among the incoming edges of a vertex.
///
/// Row `i` lists, for every source `j` with `M(i, j) > 0`, the position (1-based) of
/// the block of edges coming from `j`; zero exactly where the incidence is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderingMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl OrderingMatrix {
    pub fn new<R: AsRef<[u32]>>(rows: &[R]) -> Result<Self> {
        let (rows, cols, entries) = dense_rows(rows)?;
        Ok(OrderingMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// The canonical consecutive ordering: sources appear in index order.
    pub fn canonical(m: &IncidenceMatrix) -> Self {
        let mut entries = vec![0; m.rows * m.cols];
        for i in 0..m.rows {
            let mut rank = 0;
            for j in 0..m.cols {
                if m.get(i, j) > 0 {
                    rank += 1;
                    entries[i * m.cols + j] = rank;
                }
            }
        }
        OrderingMatrix {
            rows: m.rows,
            cols: m.cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Checks the zero pattern and the per-row permutation rule against `m`.
    pub fn validate_against(&self, m: &IncidenceMatrix, level: usize) -> Result<()> {
        if self.rows != m.rows || self.cols != m.cols {
            return Err(Error::DimensionMismatch {
                level,
                detail: format!(
                    "ordering is {}x{} but incidence is {}x{}",
                    self.rows, self.cols, m.rows, m.cols
                ),
            });
        }
        for i in 0..m.rows {
            let support = m.row(i).iter().filter(|&&x| x > 0).count();
            let mut seen = vec![false; support];
            for j in 0..m.cols {
                let q = self.get(i, j);
                let nonzero = m.get(i, j) > 0;
                if nonzero != (q > 0) {
                    return Err(Error::InvalidOrdering {
                        level,
                        row: i + 1,
                        detail: format!(
                            "entry {} is {} but incidence entry is {}",
                            j + 1,
                            q,
                            m.get(i, j)
                        ),
                    });
                }
                if q == 0 {
                    continue;
                }
                let q = q as usize;
                if q > support || seen[q - 1] {
                    return Err(Error::InvalidOrdering {
                        level,
                        row: i + 1,
                        detail: format!(
                            "nonzero entries must be a permutation of 1..={}; rank {} is repeated or out of range",
                            support, q
                        ),
                    });
                }
                seen[q - 1] = true;
            }
        }
        Ok(())
    }

    pub fn is_canonical_for(&self, m: &IncidenceMatrix) -> bool {
        *self == OrderingMatrix::canonical(m)
    }
}

/// A consecutive block of incoming edges sharing one source.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct SourceGroup {
    /// 0-based source vertex.
    pub source: usize,
    /// Order index of the first edge of the block.
    pub start: u64,
    pub count: u64,
}

/// One level `(M(k), Q(k))` with the incoming-edge layout precomputed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Level {
    incidence: IncidenceMatrix,
    ordering: OrderingMatrix,
    groups: Vec<Vec<SourceGroup>>,
}

impl Level {
    fn new(incidence: IncidenceMatrix, ordering: OrderingMatrix, level: usize) -> Result<Self> {
        ordering.validate_against(&incidence, level)?;
        let groups = (0..incidence.rows)
            .map(|i| {
                let mut srcs: Vec<(u32, usize)> = (0..incidence.cols)
                    .filter(|&j| incidence.get(i, j) > 0)
                    .map(|j| (ordering.get(i, j), j))
                    .collect();
                srcs.sort_unstable();
                let mut start = 0;
                srcs.into_iter()
                    .map(|(_, j)| {
                        let count = u64::from(incidence.get(i, j));
                        let g = SourceGroup {
                            source: j,
                            start,
                            count,
                        };
                        start += count;
                        g
                    })
                    .collect()
            })
            .collect();
        Ok(Level {
            incidence,
            ordering,
            groups,
        })
    }

    pub fn groups(&self, range: usize) -> &[SourceGroup] {
        &self.groups[range]
    }

    pub fn indegree(&self, range: usize) -> u64 {
        self.incidence.row_sum(range)
    }

    /// Source (0-based) of the edge with order index `order` into `range`.
    pub fn source_of(&self, range: usize, order: u64) -> Option<usize> {
        self.groups[range]
            .iter()
            .find(|g| order >= g.start && order < g.start + g.count)
            .map(|g| g.source)
    }

    /// Source of the minimal edge into `range`.
    pub fn min_source(&self, range: usize) -> usize {
        self.groups[range][0].source
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct BoolMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl BoolMatrix {
    fn identity(n: usize) -> Self {
        let mut bits = vec![false; n * n];
        for i in 0..n {
            bits[i * n + i] = true;
        }
        BoolMatrix {
            rows: n,
            cols: n,
            bits,
        }
    }

    /// `self * rhs` over the boolean semiring.
    fn mul(&self, rhs: &BoolMatrix) -> BoolMatrix {
        debug_assert_eq!(self.cols, rhs.rows);
        let mut bits = vec![false; self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                if !self.bits[i * self.cols + k] {
                    continue;
                }
                for j in 0..rhs.cols {
                    if rhs.bits[k * rhs.cols + j] {
                        bits[i * rhs.cols + j] = true;
                    }
                }
            }
        }
        BoolMatrix {
            rows: self.rows,
            cols: rhs.cols,
            bits,
        }
    }

    fn all_positive(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }
}

/// Outcome of [`BratteliDiagram::check_simplicity`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplicity {
    pub simple: bool,
    /// `(k, k̃)` pairs with `M(k̃)⋯M(k+1)` entrywise positive, one per distinct
    /// starting level that was examined.
    pub witnesses: Vec<(usize, usize)>,
    /// First starting level for which no positive product was found.
    pub failing_level: Option<usize>,
}

impl Simplicity {
    pub fn witness(&self) -> Option<(usize, usize)> {
        self.witnesses.first().copied()
    }
}

/// Default search depth for [`BratteliDiagram::check_simplicity`].
pub const DEFAULT_PROBE_DEPTH: usize = 16;

fn wielandt_bound(l: usize) -> usize {
    (l - 1) * (l - 1) + 1
}

/// An ordered Bratteli diagram with consecutive ordering, described by finitely many
/// levels whose last one repeats forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BratteliDiagram {
    sizes: Vec<usize>,
    levels: Vec<Level>,
    stationary: bool,
    probe_depth: usize,
}

impl BratteliDiagram {
    /// Builds a stationary diagram and requires it to be simple.
    ///
    /// `ordering = None` selects the canonical consecutive ordering.
    pub fn build_stationary(
        l: usize,
        incidence: IncidenceMatrix,
        ordering: Option<OrderingMatrix>,
    ) -> Result<Self> {
        let d = Self::assemble_stationary(l, incidence, ordering)?;
        let s = d.check_simplicity(d.probe_depth);
        if !s.simple {
            return Err(Error::NotSimple {
                level: s.failing_level.unwrap_or(0),
            });
        }
        Ok(d)
    }

    /// Structural validation only (shapes, zero rows/columns, ordering); no
    /// simplicity requirement.
    pub fn assemble_stationary(
        l: usize,
        incidence: IncidenceMatrix,
        ordering: Option<OrderingMatrix>,
    ) -> Result<Self> {
        if incidence.rows != l || incidence.cols != l {
            return Err(Error::DimensionMismatch {
                level: 1,
                detail: format!(
                    "stationary diagram with {} vertices needs a {}x{} matrix, got {}x{}",
                    l, l, l, incidence.rows, incidence.cols
                ),
            });
        }
        let ordering = ordering.unwrap_or_else(|| OrderingMatrix::canonical(&incidence));
        let level = Level::new(incidence, ordering, 1)?;
        Ok(BratteliDiagram {
            sizes: vec![l, l],
            levels: vec![level],
            stationary: true,
            probe_depth: DEFAULT_PROBE_DEPTH,
        })
    }

    /// Builds a diagram from an explicit list of levels; the last level repeats.
    ///
    /// `sizes` lists `l(0), l(1), …, l(K)` for the `K` supplied levels. The repeated
    /// tail matrix must be square. Structural validation only.
    pub fn from_levels(
        sizes: &[usize],
        levels: Vec<(IncidenceMatrix, Option<OrderingMatrix>)>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::DimensionMismatch {
                level: 0,
                detail: "at least one incidence matrix is required".to_string(),
            });
        }
        if sizes.len() != levels.len() + 1 {
            return Err(Error::DimensionMismatch {
                level: 0,
                detail: format!(
                    "{} level sizes given for {} incidence matrices (expected {})",
                    sizes.len(),
                    levels.len(),
                    levels.len() + 1
                ),
            });
        }
        if sizes.contains(&0) {
            return Err(Error::DimensionMismatch {
                level: 0,
                detail: "level sizes must be positive".to_string(),
            });
        }
        let mut built = Vec::with_capacity(levels.len());
        for (idx, (m, q)) in levels.into_iter().enumerate() {
            let k = idx + 1;
            if m.rows != sizes[k] || m.cols != sizes[k - 1] {
                return Err(Error::DimensionMismatch {
                    level: k,
                    detail: format!(
                        "expected {}x{} incidence matrix, got {}x{}",
                        sizes[k],
                        sizes[k - 1],
                        m.rows,
                        m.cols
                    ),
                });
            }
            let q = q.unwrap_or_else(|| OrderingMatrix::canonical(&m));
            built.push(Level::new(m, q, k)?);
        }
        let last = built.len();
        if !built[last - 1].incidence.is_square() {
            return Err(Error::DimensionMismatch {
                level: last,
                detail: "the last (repeated) incidence matrix must be square".to_string(),
            });
        }
        let stationary = built.len() == 1 && sizes[0] == sizes[1];
        Ok(BratteliDiagram {
            sizes: sizes.to_vec(),
            levels: built,
            stationary,
            probe_depth: DEFAULT_PROBE_DEPTH,
        })
    }

    pub fn with_probe_depth(mut self, depth: usize) -> Self {
        self.probe_depth = depth.max(1);
        self
    }

    pub fn probe_depth(&self) -> usize {
        self.probe_depth
    }

    pub fn is_stationary(&self) -> bool {
        self.stationary
    }

    /// Number of explicitly described levels `K`; levels beyond `K` repeat level `K`.
    pub fn explicit_levels(&self) -> usize {
        self.levels.len()
    }

    /// `l(k)`, the number of vertices at level `k`.
    pub fn vertex_count(&self, k: usize) -> usize {
        self.sizes[k.min(self.sizes.len() - 1)]
    }

    pub(crate) fn level(&self, k: usize) -> &Level {
        debug_assert!(k >= 1);
        &self.levels[(k - 1).min(self.levels.len() - 1)]
    }

    pub fn incidence(&self, k: usize) -> &IncidenceMatrix {
        &self.level(k).incidence
    }

    pub fn ordering(&self, k: usize) -> &OrderingMatrix {
        &self.level(k).ordering
    }

    /// Indegree of the 1-based vertex `v` at level `k ≥ 1`.
    pub fn indegree(&self, k: usize, v: u32) -> u64 {
        self.level(k).indegree(v as usize - 1)
    }

    pub fn is_canonical(&self) -> bool {
        self.levels
            .iter()
            .all(|l| l.ordering.is_canonical_for(&l.incidence))
    }

    /// `(a, b, c, d)` of a 2×2 level.
    pub fn coefficients_2x2(&self, k: usize) -> Option<[u32; 4]> {
        let m = self.incidence(k);
        if m.rows != 2 || m.cols != 2 {
            return None;
        }
        Some([m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)])
    }

    /// Whether every level (including level 0) has exactly two vertices.
    pub fn is_two_by_two(&self) -> bool {
        self.sizes.iter().all(|&s| s == 2)
    }

    /// Every row sum of every incidence matrix exceeds one (every non-initial
    /// vertex has at least two incoming edges).
    pub fn check_hypothesis_a(&self) -> bool {
        self.levels
            .iter()
            .all(|l| (0..l.incidence.rows).all(|i| l.incidence.row_sum(i) > 1))
    }

    /// Looks for entrywise positive products `M(k̃)⋯M(k+1)`.
    ///
    /// Starting levels `k ≥ K - 1` all see the same repeated tail, so only
    /// `k = 0..K` are examined. For each the search runs up to
    /// `k + max(horizon, (K - k) + (l - 1)² + 1)` levels; since a positive product
    /// stays positive after multiplying by a matrix without zero rows, and a
    /// primitive `l×l` matrix has a positive power of exponent at most
    /// `(l - 1)² + 1`, the verdict is decisive for these finite descriptions.
    pub fn check_simplicity(&self, horizon: usize) -> Simplicity {
        let horizon = horizon.max(1);
        let big_k = self.levels.len();
        let tail_l = self.sizes[big_k];
        let mut witnesses = Vec::new();
        for k in 0..big_k {
            let depth = horizon.max(big_k - k + wielandt_bound(tail_l));
            let mut product = BoolMatrix::identity(self.vertex_count(k));
            let mut found = None;
            for kt in (k + 1)..=(k + depth) {
                product = self.level(kt).incidence.pattern().mul(&product);
                if product.all_positive() {
                    found = Some(kt);
                    break;
                }
            }
            match found {
                Some(kt) => witnesses.push((k, kt)),
                None => {
                    return Simplicity {
                        simple: false,
                        witnesses,
                        failing_level: Some(k),
                    }
                }
            }
        }
        Simplicity {
            simple: true,
            witnesses,
            failing_level: None,
        }
    }

    /// Number of paths from level 0 to each vertex of level `k` (every level-0
    /// vertex carries the single empty path).
    pub fn path_count_vector(&self, k: usize) -> Vec<num_bigint::BigUint> {
        use num_bigint::BigUint;
        let mut counts: Vec<BigUint> = vec![BigUint::from(1u32); self.vertex_count(0)];
        for lvl in 1..=k {
            let m = self.incidence(lvl);
            counts = (0..m.rows)
                .map(|i| {
                    m.row(i)
                        .iter()
                        .zip(counts.iter())
                        .map(|(&e, c)| c * BigUint::from(e))
                        .sum()
                })
                .collect();
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[[u32; 2]]) -> IncidenceMatrix {
        IncidenceMatrix::new(rows).unwrap()
    }

    #[test]
    fn stationary_example_is_valid() {
        let d = BratteliDiagram::build_stationary(2, m(&[[2, 1], [3, 1]]), None).unwrap();
        assert!(d.is_stationary());
        assert_eq!(d.ordering(1).to_rows(), vec![vec![1, 2], vec![1, 2]]);
        assert_eq!(d.ordering(7).to_rows(), vec![vec![1, 2], vec![1, 2]]);
        assert!(d.check_hypothesis_a());
    }

    #[test]
    fn cantor_single_vertex() {
        let d = BratteliDiagram::build_stationary(1, IncidenceMatrix::new(&[[2]]).unwrap(), None)
            .unwrap();
        assert_eq!(d.indegree(3, 1), 2);
        assert!(d.check_hypothesis_a());
    }

    #[test]
    fn identity_is_rejected() {
        let err = BratteliDiagram::build_stationary(2, m(&[[1, 0], [0, 1]]), None).unwrap_err();
        assert_eq!(err, Error::NotSimple { level: 0 });
    }

    #[test]
    fn zero_rows_and_columns() {
        assert_eq!(
            IncidenceMatrix::new(&[[0, 0], [1, 1]]).unwrap_err(),
            Error::ZeroRow(1)
        );
        assert_eq!(
            IncidenceMatrix::new(&[[1, 0], [1, 0]]).unwrap_err(),
            Error::ZeroColumn(2)
        );
        assert!(matches!(
            IncidenceMatrix::new(&[vec![1, 1], vec![1]]),
            Err(Error::MalformedMatrix(_))
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let err = BratteliDiagram::build_stationary(3, m(&[[2, 1], [3, 1]]), None).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn ordering_validation() {
        let inc = m(&[[2, 1], [3, 1]]);
        let repeated = OrderingMatrix::new(&[[1, 1], [1, 2]]).unwrap();
        assert!(matches!(
            BratteliDiagram::build_stationary(2, inc.clone(), Some(repeated)),
            Err(Error::InvalidOrdering { row: 1, .. })
        ));
        let zero_mismatch = OrderingMatrix::new(&[[1, 0], [1, 2]]).unwrap();
        assert!(matches!(
            BratteliDiagram::build_stationary(2, inc.clone(), Some(zero_mismatch)),
            Err(Error::InvalidOrdering { .. })
        ));
        let swapped = OrderingMatrix::new(&[[2, 1], [1, 2]]).unwrap();
        let d = BratteliDiagram::build_stationary(2, inc, Some(swapped)).unwrap();
        assert!(!d.is_canonical());
        // row 1: source 2 first, then the two edges from source 1
        assert_eq!(d.level(1).source_of(0, 0), Some(1));
        assert_eq!(d.level(1).source_of(0, 1), Some(0));
        assert_eq!(d.level(1).source_of(0, 2), Some(0));
        assert_eq!(d.level(1).source_of(0, 3), None);
    }

    #[test]
    fn simplicity_witnesses() {
        let d = BratteliDiagram::build_stationary(2, m(&[[2, 1], [3, 1]]), None).unwrap();
        let s = d.check_simplicity(3);
        assert!(s.simple);
        assert_eq!(s.witness(), Some((0, 1)));

        let fib = BratteliDiagram::build_stationary(2, m(&[[1, 1], [1, 0]]), None).unwrap();
        let s = fib.check_simplicity(3);
        assert!(s.simple);
        assert_eq!(s.witness(), Some((0, 2)));

        let block = BratteliDiagram::assemble_stationary(2, m(&[[2, 0], [0, 2]]), None).unwrap();
        let s = block.check_simplicity(3);
        assert!(!s.simple);
        assert_eq!(s.failing_level, Some(0));
    }

    #[test]
    fn simplicity_needs_more_than_l_powers() {
        // Wielandt's matrix: primitive, first positive power is (l-1)^2 + 1 = 5.
        let w = IncidenceMatrix::new(&[[0, 1, 0], [0, 0, 1], [1, 1, 0]]).unwrap();
        let d = BratteliDiagram::build_stationary(3, w, None).unwrap();
        assert_eq!(d.check_simplicity(1).witness(), Some((0, 5)));
    }

    #[test]
    fn hypothesis_a() {
        let fib = BratteliDiagram::build_stationary(2, m(&[[1, 1], [1, 0]]), None).unwrap();
        assert!(!fib.check_hypothesis_a());
    }

    #[test]
    fn non_stationary_levels() {
        let d = BratteliDiagram::from_levels(
            &[1, 1, 1, 1],
            vec![
                (IncidenceMatrix::new(&[[2]]).unwrap(), None),
                (IncidenceMatrix::new(&[[4]]).unwrap(), None),
                (IncidenceMatrix::new(&[[6]]).unwrap(), None),
            ],
        )
        .unwrap();
        assert!(!d.is_stationary());
        assert_eq!(d.indegree(2, 1), 4);
        assert_eq!(d.indegree(9, 1), 6);
        assert!(d.check_simplicity(4).simple);

        let bad = BratteliDiagram::from_levels(
            &[1, 2],
            vec![(IncidenceMatrix::new(&[[1], [1]]).unwrap(), None)],
        );
        assert!(matches!(bad, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn path_counts() {
        let d = BratteliDiagram::build_stationary(2, m(&[[1, 3], [1, 4]]), None).unwrap();
        let v = d.path_count_vector(3);
        assert_eq!(v, vec![91u32.into(), 115u32.into()]);
    }
}
