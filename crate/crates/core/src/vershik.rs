//! Paths cofinal with the minimal path and the Vershik successor.
//!
//! A [`PathState`] keeps only the finite part of a path that differs from the minimal
//! path `x₀`; every level past the stored prefix is the corresponding edge of `x₀`.
//! Trailing edges that coincide with `x₀` are always stripped, so two states are
//! equal exactly when the paths are equal.

use alloc::format;
use alloc::vec::Vec;

use crate::diagram::BratteliDiagram;
use crate::{Error, Result};

/// Extra levels examined past the stored prefix when looking for a non-maximal edge.
const ZETA_SEARCH_CAP: usize = 64;

/// An edge `(k, s, m, r)`: level, source, order index among the incoming edges of
/// `r`, and range. Vertices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub level: usize,
    pub source: u32,
    pub order: u64,
    pub range: u32,
}

impl Edge {
    /// The `(s, m, r)` triple.
    pub fn triple(&self) -> (u32, u64, u32) {
        (self.source, self.order, self.range)
    }
}

/// A path cofinal with `x₀`, stored as its normalized prefix.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathState {
    edges: Vec<Edge>,
}

impl PathState {
    /// The stored prefix `e_1, …, e_ξ`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    /// Whether this is `x₀` itself.
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn triples(&self) -> Vec<(u32, u64, u32)> {
        self.edges.iter().map(Edge::triple).collect()
    }
}

/// A diagram together with its resolved minimal path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VershikSystem {
    diagram: BratteliDiagram,
    /// 0-based vertices of `x₀` at levels `0..=K`; beyond `K` the last entry repeats.
    x0: Vec<usize>,
}

impl VershikSystem {
    /// Resolves `x₀` from the minimal-source map of the repeated level.
    ///
    /// The map must have exactly one periodic point (which is then fixed);
    /// otherwise the tail vertex has to be named with [`Self::with_tail_vertex`].
    pub fn new(diagram: BratteliDiagram) -> Result<Self> {
        let l = diagram.vertex_count(diagram.explicit_levels());
        let f: Vec<usize> = {
            let lvl = diagram.level(diagram.explicit_levels());
            (0..l).map(|v| lvl.min_source(v)).collect()
        };
        let periodic: Vec<usize> = (0..l)
            .filter(|&v| {
                let mut w = f[v];
                for _ in 0..l {
                    if w == v {
                        return true;
                    }
                    w = f[w];
                }
                false
            })
            .collect();
        if periodic.len() != 1 {
            return Err(Error::AmbiguousMinimalPath(periodic.len()));
        }
        Self::resolve(diagram, periodic[0])
    }

    /// Uses the named 1-based tail vertex, which must be a fixed point of the
    /// minimal-source map of the repeated level.
    pub fn with_tail_vertex(diagram: BratteliDiagram, vertex: u32) -> Result<Self> {
        let l = diagram.vertex_count(diagram.explicit_levels());
        if vertex == 0 || vertex as usize > l {
            return Err(Error::InvalidTailVertex { vertex });
        }
        let v = vertex as usize - 1;
        if diagram.level(diagram.explicit_levels()).min_source(v) != v {
            return Err(Error::InvalidTailVertex { vertex });
        }
        Self::resolve(diagram, v)
    }

    fn resolve(diagram: BratteliDiagram, tail: usize) -> Result<Self> {
        let big_k = diagram.explicit_levels();
        if diagram.level(big_k).indegree(tail) < 2 {
            return Err(Error::DegenerateMinimalPath {
                vertex: tail as u32 + 1,
            });
        }
        let mut x0 = alloc::vec![0; big_k + 1];
        x0[big_k] = tail;
        for k in (1..=big_k).rev() {
            x0[k - 1] = diagram.level(k).min_source(x0[k]);
        }
        Ok(VershikSystem { diagram, x0 })
    }

    pub fn diagram(&self) -> &BratteliDiagram {
        &self.diagram
    }

    /// The 1-based vertex of `x₀` at level `k`.
    pub fn x0_vertex(&self, k: usize) -> u32 {
        self.x0_vertex0(k) as u32 + 1
    }

    fn x0_vertex0(&self, k: usize) -> usize {
        self.x0[k.min(self.x0.len() - 1)]
    }

    /// The edge of `x₀` at level `k ≥ 1`.
    pub fn x0_edge(&self, k: usize) -> Edge {
        Edge {
            level: k,
            source: self.x0_vertex(k - 1),
            order: 0,
            range: self.x0_vertex(k),
        }
    }

    pub fn x0(&self) -> PathState {
        PathState::default()
    }

    /// The order-minimal path of `E(1)∘…∘E(k)` ending at the 1-based vertex `v`.
    pub fn minimal_path_to(&self, k: usize, v: u32) -> Vec<Edge> {
        let mut out = Vec::with_capacity(k);
        self.push_minimal_path(k, v as usize - 1, &mut out);
        out
    }

    fn push_minimal_path(&self, k: usize, v: usize, out: &mut Vec<Edge>) {
        let start = out.len();
        let mut range = v;
        for level in (1..=k).rev() {
            let src = self.diagram.level(level).min_source(range);
            out.push(Edge {
                level,
                source: src as u32 + 1,
                order: 0,
                range: range as u32 + 1,
            });
            range = src;
        }
        out[start..].reverse();
    }

    /// Checks and normalizes an explicit prefix.
    ///
    /// Edges must be listed for levels `1, 2, …` with matching order indices and
    /// sources, chained by `r(e_i) = s(e_{i+1})`, and the last range must be the
    /// vertex of `x₀` at that level.
    pub fn path_from_edges(&self, edges: Vec<Edge>) -> Result<PathState> {
        for (i, e) in edges.iter().enumerate() {
            let k = i + 1;
            if e.level != k {
                return Err(Error::InvalidPath(format!(
                    "edge {} is labelled level {}, expected {}",
                    k, e.level, k
                )));
            }
            self.check_edge(e)?;
            if i > 0 && edges[i - 1].range != e.source {
                return Err(Error::InvalidPath(format!(
                    "edge at level {} starts at {} but the previous edge ends at {}",
                    k,
                    e.source,
                    edges[i - 1].range
                )));
            }
        }
        if let Some(last) = edges.last() {
            let want = self.x0_vertex(last.level);
            if last.range != want {
                return Err(Error::InvalidPath(format!(
                    "prefix ends at vertex {} of level {}, but the minimal path passes through {}",
                    last.range, last.level, want
                )));
            }
        }
        let mut state = PathState { edges };
        self.normalize(&mut state);
        Ok(state)
    }

    /// Builds a path from `(s, m, r)` triples for levels `1, 2, …`.
    pub fn path_from_triples(&self, triples: &[(u32, u64, u32)]) -> Result<PathState> {
        let edges = triples
            .iter()
            .enumerate()
            .map(|(i, &(source, order, range))| Edge {
                level: i + 1,
                source,
                order,
                range,
            })
            .collect();
        self.path_from_edges(edges)
    }

    fn check_edge(&self, e: &Edge) -> Result<()> {
        let l_prev = self.diagram.vertex_count(e.level - 1);
        let l_cur = self.diagram.vertex_count(e.level);
        if e.range == 0 || e.range as usize > l_cur || e.source == 0 || e.source as usize > l_prev {
            return Err(Error::InvalidPath(format!(
                "edge at level {} has a vertex out of range",
                e.level
            )));
        }
        let lvl = self.diagram.level(e.level);
        match lvl.source_of(e.range as usize - 1, e.order) {
            Some(s) if s + 1 == e.source as usize => Ok(()),
            Some(s) => Err(Error::InvalidPath(format!(
                "edge {} into vertex {} at level {} comes from {}, not {}",
                e.order,
                e.range,
                e.level,
                s + 1,
                e.source
            ))),
            None => Err(Error::InvalidPath(format!(
                "order index {} exceeds the indegree {} of vertex {} at level {}",
                e.order,
                lvl.indegree(e.range as usize - 1),
                e.range,
                e.level
            ))),
        }
    }

    fn normalize(&self, x: &mut PathState) {
        while let Some(last) = x.edges.last() {
            if *last == self.x0_edge(last.level) {
                x.edges.pop();
            } else {
                break;
            }
        }
    }

    /// `e_k(x)` for any level `k ≥ 1`.
    pub fn edge_at(&self, x: &PathState, k: usize) -> Edge {
        if k <= x.edges.len() {
            x.edges[k - 1]
        } else {
            self.x0_edge(k)
        }
    }

    fn is_maximal(&self, e: &Edge) -> bool {
        e.order + 1 == self.diagram.level(e.level).indegree(e.range as usize - 1)
    }

    /// The first level whose edge is not maximal.
    pub fn zeta(&self, x: &PathState) -> usize {
        let cap = x.edges.len() + ZETA_SEARCH_CAP;
        for k in 1..=cap {
            if !self.is_maximal(&self.edge_at(x, k)) {
                return k;
            }
        }
        panic!(
            "no non-maximal edge within {} levels; the minimal path is cofinal with a maximal path",
            cap
        );
    }

    /// The length of the normalized prefix (0 for `x₀`).
    pub fn xi(&self, x: &PathState) -> usize {
        x.edges.len()
    }

    /// `A(x)`: levels below `ζ(x)` whose edge is not minimal, increasing.
    pub fn carry_set(&self, x: &PathState) -> Vec<usize> {
        self.carry_set_with_zeta(x, self.zeta(x))
    }

    pub(crate) fn carry_set_with_zeta(&self, x: &PathState, zeta: usize) -> Vec<usize> {
        (1..zeta)
            .filter(|&k| self.edge_at(x, k).order != 0)
            .collect()
    }

    /// The Vershik successor `V_B(x)`.
    pub fn successor(&self, x: &PathState) -> PathState {
        self.successor_with_zeta(x, self.zeta(x))
    }

    pub(crate) fn successor_with_zeta(&self, x: &PathState, zeta: usize) -> PathState {
        let e = self.edge_at(x, zeta);
        let lvl = self.diagram.level(zeta);
        let order = e.order + 1;
        let src = lvl
            .source_of(e.range as usize - 1, order)
            .expect("edge below ζ is not maximal");
        let mut edges = Vec::with_capacity(x.edges.len().max(zeta));
        self.push_minimal_path(zeta - 1, src, &mut edges);
        edges.push(Edge {
            level: zeta,
            source: src as u32 + 1,
            order,
            range: e.range,
        });
        if x.edges.len() > zeta {
            edges.extend_from_slice(&x.edges[zeta..]);
        }
        let mut out = PathState { edges };
        self.normalize(&mut out);
        out
    }

    /// `y_j(x)`: levels `1..=k_{x,j}` reset to the minimal path into `s(e_{k_{x,j}+1})`.
    pub fn reset_target(&self, x: &PathState, j: usize) -> Result<PathState> {
        let a = self.carry_set(x);
        if j == 0 || j > a.len() {
            return Err(Error::CarryIndexOutOfRange {
                index: j,
                theta: a.len(),
            });
        }
        Ok(self.reset_at_level(x, a[j - 1]))
    }

    /// Replaces levels `1..=k` by the minimal path into `s(e_{k+1}(x))`.
    pub(crate) fn reset_at_level(&self, x: &PathState, k: usize) -> PathState {
        let next = self.edge_at(x, k + 1);
        let mut edges = Vec::with_capacity(x.edges.len());
        self.push_minimal_path(k, next.source as usize - 1, &mut edges);
        if x.edges.len() > k {
            edges.extend_from_slice(&x.edges[k..]);
        }
        let mut out = PathState { edges };
        self.normalize(&mut out);
        out
    }

    /// `V_B^n(x)`.
    pub fn iterate(&self, x: &PathState, n: u64) -> PathState {
        let mut cur = x.clone();
        for _ in 0..n {
            cur = self.successor(&cur);
        }
        cur
    }

    /// The orbit `x, V_B(x), …, V_B^{n-1}(x)`.
    pub fn orbit(&self, x: &PathState, n: usize) -> Vec<PathState> {
        let mut out = Vec::with_capacity(n);
        let mut cur = x.clone();
        for _ in 0..n {
            let next = self.successor(&cur);
            out.push(cur);
            cur = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::IncidenceMatrix;

    fn system(rows: &[[u32; 2]]) -> VershikSystem {
        let d = BratteliDiagram::build_stationary(2, IncidenceMatrix::new(rows).unwrap(), None)
            .unwrap();
        VershikSystem::new(d).unwrap()
    }

    fn edges(v: &[(usize, u32, u64, u32)]) -> Vec<Edge> {
        v.iter()
            .map(|&(level, source, order, range)| Edge {
                level,
                source,
                order,
                range,
            })
            .collect()
    }

    // e1=(2,3,2), e2=(2,2,1), e3=(1,1,2), continued by an edge back to the x0 tail
    fn example_path(sys: &VershikSystem) -> PathState {
        sys.path_from_triples(&[(2, 3, 2), (2, 2, 1), (1, 1, 2), (2, 2, 1)])
            .unwrap()
    }

    fn fibonacci_path(sys: &VershikSystem) -> PathState {
        sys.path_from_triples(&[(2, 1, 1), (1, 0, 2), (2, 1, 1)])
            .unwrap()
    }

    #[test]
    fn minimal_paths() {
        let sys = system(&[[2, 1], [3, 1]]);
        assert_eq!(
            sys.minimal_path_to(2, 1),
            edges(&[(1, 1, 0, 1), (2, 1, 0, 1)])
        );
        assert_eq!(sys.minimal_path_to(1, 2), edges(&[(1, 1, 0, 2)]));
        let fib = system(&[[1, 1], [1, 0]]);
        assert_eq!(
            fib.minimal_path_to(2, 2),
            edges(&[(1, 1, 0, 1), (2, 1, 0, 2)])
        );
    }

    #[test]
    fn x0_basics() {
        let sys = system(&[[2, 1], [3, 1]]);
        let x0 = sys.x0();
        assert_eq!(sys.zeta(&x0), 1);
        assert!(sys.carry_set(&x0).is_empty());
        assert_eq!(sys.xi(&x0), 0);
        assert_eq!(sys.successor(&x0).triples(), vec![(1, 1, 1)]);
        assert_eq!(sys.iterate(&x0, 0), x0);
    }

    #[test]
    fn example_path_dynamics() {
        let sys = system(&[[2, 1], [3, 1]]);
        let x = example_path(&sys);
        assert_eq!(sys.zeta(&x), 3);
        assert_eq!(sys.carry_set(&x), vec![1, 2]);
        let v = sys.successor(&x);
        assert_eq!(&v.triples()[..3], &[(1, 0, 1), (1, 0, 1), (1, 2, 2)]);
        assert_eq!(sys.edge_at(&v, 4), sys.edge_at(&x, 4));
        let y1 = sys.reset_target(&x, 1).unwrap();
        assert_eq!(y1.triples()[0], (1, 0, 2));
        assert_eq!(&y1.edges()[1..], &x.edges()[1..]);
        let y2 = sys.reset_target(&x, 2).unwrap();
        assert_eq!(&y2.triples()[..2], &[(1, 0, 1), (1, 0, 1)]);
        assert_eq!(&y2.edges()[2..], &x.edges()[2..]);
        assert_eq!(
            sys.reset_target(&x, 3),
            Err(Error::CarryIndexOutOfRange { index: 3, theta: 2 })
        );
    }

    #[test]
    fn fibonacci_path_dynamics() {
        let sys = system(&[[1, 1], [1, 0]]);
        let x = fibonacci_path(&sys);
        assert_eq!(sys.zeta(&x), 4);
        assert_eq!(sys.carry_set(&x), vec![1, 3]);
        let v = sys.successor(&x);
        assert_eq!(v.triples()[3], (2, 1, 1));
        assert_eq!(&v.edges()[..3], &sys.minimal_path_to(3, 2)[..]);
        let y2 = sys.reset_target(&x, 2).unwrap();
        assert_eq!(y2.triples(), vec![]);
        assert_eq!(
            sys.minimal_path_to(3, 1),
            edges(&[(1, 1, 0, 1), (2, 1, 0, 1), (3, 1, 0, 1)])
        );
    }

    #[test]
    fn iterate_hits_example_path() {
        let sys = system(&[[1, 3], [1, 4]]);
        let x = sys.iterate(&sys.x0(), 65);
        assert_eq!(x.triples(), vec![(2, 3, 2), (2, 4, 2), (2, 2, 1)]);
    }

    #[test]
    fn rejects_bad_paths() {
        let sys = system(&[[2, 1], [3, 1]]);
        // ends off the minimal path
        assert!(sys.path_from_triples(&[(1, 0, 2)]).is_err());
        // broken chain
        assert!(sys.path_from_triples(&[(1, 0, 2), (1, 1, 1)]).is_err());
        // order index too large
        assert!(sys.path_from_triples(&[(2, 3, 1)]).is_err());
        // wrong source for the order index
        assert!(sys.path_from_triples(&[(2, 0, 1)]).is_err());
        // trailing minimal edges are stripped
        let x = sys.path_from_triples(&[(1, 1, 1), (1, 0, 1)]).unwrap();
        assert_eq!(x.len(), 1);
    }

    #[test]
    fn ambiguous_and_degenerate() {
        // min-source map swaps the two vertices: no fixed point
        let q = crate::OrderingMatrix::new(&[[2, 1], [1, 2]]).unwrap();
        let d = BratteliDiagram::build_stationary(
            2,
            IncidenceMatrix::new(&[[1, 1], [1, 1]]).unwrap(),
            Some(q),
        )
        .unwrap();
        assert_eq!(
            VershikSystem::new(d.clone()).unwrap_err(),
            Error::AmbiguousMinimalPath(2)
        );
        assert_eq!(
            VershikSystem::with_tail_vertex(d, 1).unwrap_err(),
            Error::InvalidTailVertex { vertex: 1 }
        );

        // each vertex is its own minimal source: two fixed points
        let d = BratteliDiagram::build_stationary(
            2,
            IncidenceMatrix::new(&[[1, 1], [1, 1]]).unwrap(),
            Some(crate::OrderingMatrix::new(&[[1, 2], [2, 1]]).unwrap()),
        )
        .unwrap();
        assert_eq!(
            VershikSystem::new(d.clone()).unwrap_err(),
            Error::AmbiguousMinimalPath(2)
        );
        let sys = VershikSystem::with_tail_vertex(d, 2).unwrap();
        assert_eq!(sys.x0_vertex(5), 2);

        // the tail vertex has a single incoming edge
        let d = BratteliDiagram::build_stationary(
            2,
            IncidenceMatrix::new(&[[1, 0], [1, 1]]).unwrap(),
            None,
        );
        assert!(d.is_err());
        let d = BratteliDiagram::build_stationary(
            2,
            IncidenceMatrix::new(&[[1, 1], [0, 1]]).unwrap(),
            Some(crate::OrderingMatrix::new(&[[1, 2], [0, 1]]).unwrap()),
        );
        assert!(d.is_err());
    }

    #[test]
    fn degenerate_tail_vertex() {
        let d = BratteliDiagram::build_stationary(
            2,
            IncidenceMatrix::new(&[[1, 1], [1, 1]]).unwrap(),
            Some(crate::OrderingMatrix::new(&[[1, 2], [1, 2]]).unwrap()),
        )
        .unwrap();
        assert!(VershikSystem::new(d).is_ok());
        let d = BratteliDiagram::from_levels(
            &[2, 2, 2],
            alloc::vec![
                (IncidenceMatrix::new(&[[1, 1], [1, 1]]).unwrap(), None),
                (IncidenceMatrix::new(&[[1, 0], [1, 1]]).unwrap(), None),
            ],
        )
        .unwrap();
        assert_eq!(
            VershikSystem::new(d).unwrap_err(),
            Error::DegenerateMinimalPath { vertex: 1 }
        );
    }

    #[test]
    fn non_stationary_prefix() {
        let d = BratteliDiagram::from_levels(
            &[1, 2, 2],
            alloc::vec![
                (IncidenceMatrix::new(&[[1], [2]]).unwrap(), None),
                (IncidenceMatrix::new(&[[2, 1], [3, 1]]).unwrap(), None),
            ],
        )
        .unwrap();
        let sys = VershikSystem::new(d).unwrap();
        assert_eq!(sys.x0_vertex(0), 1);
        assert_eq!(sys.x0_vertex(1), 1);
        let orbit = sys.orbit(&sys.x0(), 50);
        for w in orbit.windows(2) {
            assert_ne!(w[0], w[1]);
        }
    }
}
