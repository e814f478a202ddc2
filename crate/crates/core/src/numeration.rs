//! The `(F, G)` numeration system of 2×2 diagrams and a general path-rank codec.
//!
//! For a 2×2 diagram with canonical consecutive ordering and level matrices
//! `M_n = [[a_n, b_n], [c_n, d_n]]`, `(F_n, G_n)ᵀ = M_n (F_{n-1}, G_{n-1})ᵀ` with
//! `F_0 = G_0 = 1` counts the paths into the two vertices of level `n`, and the
//! state reached from `x₀` after `N` successor steps has digits
//! `(δ_j, γ_j)` with `N = Σ δ_{j+1} F_j + γ_{j+1} G_j`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::diagram::BratteliDiagram;
use crate::vershik::{Edge, PathState, VershikSystem};
use crate::{Error, Result};

/// Depth of the `F`/`G` table built up front.
const INITIAL_DEPTH: usize = 64;

/// Exact `F_n`, `G_n` for `n = 0..=depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FgSequences {
    pub f: Vec<BigUint>,
    pub g: Vec<BigUint>,
}

impl FgSequences {
    /// `(F_n, G_n)` for a stationary matrix `[[a, b], [c, d]]`.
    pub fn stationary(coeffs: [u32; 4], depth: usize) -> Self {
        Self::from_levels(|_| coeffs, depth)
    }

    /// `(F_n, G_n)` where `level(n)` gives `(a_n, b_n, c_n, d_n)` for `n ≥ 1`.
    pub fn from_levels(level: impl Fn(usize) -> [u32; 4], depth: usize) -> Self {
        let mut f = Vec::with_capacity(depth + 1);
        let mut g = Vec::with_capacity(depth + 1);
        f.push(BigUint::one());
        g.push(BigUint::one());
        for n in 1..=depth {
            let [a, b, c, d] = level(n);
            let (fp, gp) = (&f[n - 1], &g[n - 1]);
            let fnew = fp * a + gp * b;
            let gnew = fp * c + gp * d;
            f.push(fnew);
            g.push(gnew);
        }
        FgSequences { f, g }
    }

    pub fn depth(&self) -> usize {
        self.f.len() - 1
    }

    /// Checks the three-term recurrence satisfied by both sequences.
    ///
    /// For level-dependent coefficients the identity is
    /// `b_n F_{n+1} = (a_{n+1} b_n + b_{n+1} d_n) F_n − b_{n+1}(a_n d_n − b_n c_n) F_{n-1}`,
    /// which reduces to `F_{n+1} = (a + d) F_n − (ad − bc) F_{n-1}` when stationary.
    /// `G` satisfies the same identity with the roles of the rows exchanged.
    pub fn recurrence_holds(&self, level: impl Fn(usize) -> [u32; 4]) -> bool {
        let big = |x: u32| BigInt::from(x);
        let fz = |n: usize| BigInt::from(self.f[n].clone());
        let gz = |n: usize| BigInt::from(self.g[n].clone());
        for n in 1..self.depth() {
            let [a0, b0, c0, d0] = level(n).map(big);
            let [a1, b1, c1, d1] = level(n + 1).map(big);
            let det0 = &a0 * &d0 - &b0 * &c0;
            let f_lhs = &b0 * fz(n + 1);
            let f_rhs = (&a1 * &b0 + &b1 * &d0) * fz(n) - &b1 * &det0 * fz(n - 1);
            let g_lhs = &c0 * gz(n + 1);
            let g_rhs = (&d1 * &c0 + &c1 * &a0) * gz(n) - &c1 * &det0 * gz(n - 1);
            if f_lhs != f_rhs || g_lhs != g_rhs {
                return false;
            }
        }
        true
    }

    /// Checks `(F_n, G_n)ᵀ = Mⁿ (1, 1)ᵀ` for a stationary matrix by repeated squaring.
    pub fn matrix_power_holds(&self, coeffs: [u32; 4]) -> bool {
        let m = coeffs.map(BigUint::from);
        (0..=self.depth()).all(|n| {
            let p = mat_pow(&m, n as u64);
            let fv = &p[0] + &p[1];
            let gv = &p[2] + &p[3];
            fv == self.f[n] && gv == self.g[n]
        })
    }
}

fn mat_mul(x: &[BigUint; 4], y: &[BigUint; 4]) -> [BigUint; 4] {
    [
        &x[0] * &y[0] + &x[1] * &y[2],
        &x[0] * &y[1] + &x[1] * &y[3],
        &x[2] * &y[0] + &x[3] * &y[2],
        &x[2] * &y[1] + &x[3] * &y[3],
    ]
}

fn mat_pow(m: &[BigUint; 4], mut n: u64) -> [BigUint; 4] {
    let mut acc = [
        BigUint::one(),
        BigUint::zero(),
        BigUint::zero(),
        BigUint::one(),
    ];
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            acc = mat_mul(&acc, &base);
        }
        base = mat_mul(&base, &base);
        n >>= 1;
    }
    acc
}

/// A digit string `((δ_1, γ_1), …, (δ_ξ, γ_ξ))` with the `(source, range)` state of
/// each pair. Trailing `(0, 0)` pairs are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DigitString {
    pairs: Vec<(u32, u32)>,
    states: Vec<(u8, u8)>,
}

impl DigitString {
    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    /// `(s_j, r_j)` for each pair, 1-based vertices.
    pub fn states(&self) -> &[(u8, u8)] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// The `(F, G)` numeration of a 2×2 diagram with canonical consecutive ordering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FgNumeration {
    levels: Vec<[u32; 4]>,
    fg: FgSequences,
}

impl FgNumeration {
    /// Requires every level to have two vertices, canonical orderings, and
    /// `a_n > 0`, `c_n > 0` (so vertex 1 is the minimal source of both vertices).
    pub fn new(diagram: &BratteliDiagram) -> Result<Self> {
        if !diagram.is_two_by_two() {
            return Err(Error::NotTwoByTwo(
                "every level must have exactly two vertices".to_string(),
            ));
        }
        if !diagram.is_canonical() {
            return Err(Error::NotTwoByTwo(
                "the ordering must be the canonical consecutive ordering".to_string(),
            ));
        }
        let levels: Vec<[u32; 4]> = (1..=diagram.explicit_levels())
            .map(|k| diagram.coefficients_2x2(k).expect("2x2 level"))
            .collect();
        for (i, [a, _, c, _]) in levels.iter().enumerate() {
            if *a == 0 || *c == 0 {
                return Err(Error::NotTwoByTwo(format!(
                    "level {} needs a > 0 and c > 0 (vertex 1 must feed both vertices)",
                    i + 1
                )));
            }
        }
        let mut num = FgNumeration {
            levels,
            fg: FgSequences {
                f: Vec::new(),
                g: Vec::new(),
            },
        };
        num.fg = num.fg_sequences(INITIAL_DEPTH);
        Ok(num)
    }

    /// `(a_n, b_n, c_n, d_n)` for `n ≥ 1`.
    pub fn coefficients(&self, n: usize) -> [u32; 4] {
        self.levels[(n.max(1) - 1).min(self.levels.len() - 1)]
    }

    pub fn is_stationary(&self) -> bool {
        self.levels.len() == 1
    }

    pub fn fg_sequences(&self, depth: usize) -> FgSequences {
        if !self.fg.f.is_empty() && depth <= self.fg.depth() {
            return FgSequences {
                f: self.fg.f[..=depth].to_vec(),
                g: self.fg.g[..=depth].to_vec(),
            };
        }
        FgSequences::from_levels(|n| self.coefficients(n), depth)
    }

    /// The cached sequences (at least 64 levels deep).
    pub fn table(&self) -> &FgSequences {
        &self.fg
    }

    fn table_for(&self, depth: usize) -> alloc::borrow::Cow<'_, FgSequences> {
        if depth <= self.fg.depth() {
            alloc::borrow::Cow::Borrowed(&self.fg)
        } else {
            alloc::borrow::Cow::Owned(self.fg_sequences(depth))
        }
    }

    /// `(δ, γ)` of a single edge `(k, s, m, r)`.
    pub fn edge_digits(&self, e: &Edge) -> (u32, u32) {
        let [a, _, c, _] = self.coefficients(e.level);
        let head = if e.range == 1 { a } else { c };
        let m = e.order as u32;
        if e.source == 1 {
            (m, 0)
        } else {
            (head, m - head)
        }
    }

    /// The digit string of a path.
    pub fn path_digits(&self, x: &PathState) -> DigitString {
        DigitString {
            pairs: x.edges().iter().map(|e| self.edge_digits(e)).collect(),
            states: x
                .edges()
                .iter()
                .map(|e| (e.source as u8, e.range as u8))
                .collect(),
        }
    }

    /// Infers the automaton states of a raw pair list and checks every constraint.
    ///
    /// The last pair ends at vertex 1 (the minimal path); each pair's source is
    /// forced by whether `δ` reaches its upper value. Trailing `(0, 0)` pairs are
    /// dropped.
    pub fn digits_from_pairs(&self, pairs: &[(u32, u32)]) -> Result<DigitString> {
        let mut len = pairs.len();
        while len > 0 && pairs[len - 1] == (0, 0) {
            len -= 1;
        }
        let pairs = &pairs[..len];
        let mut states = alloc::vec![(0u8, 0u8); len];
        let mut range = 1u8;
        for j in (0..len).rev() {
            let level = j + 1;
            let [a, b, c, d] = self.coefficients(level);
            let (head, tail) = if range == 1 { (a, b) } else { (c, d) };
            let (delta, gamma) = pairs[j];
            let source = if delta == head {
                if gamma >= tail {
                    return Err(Error::InvalidDigits(format!(
                        "pair {} = ({},{}): γ must be below {}",
                        level, delta, gamma, tail
                    )));
                }
                2
            } else if delta < head {
                if gamma != 0 {
                    return Err(Error::InvalidDigits(format!(
                        "pair {} = ({},{}): γ must be 0 when δ < {}",
                        level, delta, gamma, head
                    )));
                }
                1
            } else {
                return Err(Error::InvalidDigits(format!(
                    "pair {} = ({},{}): δ exceeds {}",
                    level, delta, gamma, head
                )));
            };
            states[j] = (source as u8, range);
            range = source;
        }
        Ok(DigitString {
            pairs: pairs.to_vec(),
            states,
        })
    }

    /// Whether the pairs form an automaton-valid digit string.
    pub fn validate_digits(&self, pairs: &[(u32, u32)]) -> bool {
        self.digits_from_pairs(pairs).is_ok()
    }

    /// `N = Σ δ_{j+1} F_j + γ_{j+1} G_j`.
    pub fn decode(&self, ds: &DigitString) -> BigUint {
        let fg = self.table_for(ds.len());
        let mut n = BigUint::zero();
        for (j, &(delta, gamma)) in ds.pairs.iter().enumerate() {
            if delta != 0 {
                n += &fg.f[j] * delta;
            }
            if gamma != 0 {
                n += &fg.g[j] * gamma;
            }
        }
        n
    }

    /// Validates then decodes a raw pair list.
    pub fn decode_pairs(&self, pairs: &[(u32, u32)]) -> Result<BigUint> {
        Ok(self.decode(&self.digits_from_pairs(pairs)?))
    }

    /// The digit string of `V_B^N(x₀)`, computed greedily from the top level down.
    pub fn encode(&self, n: &BigUint) -> DigitString {
        let mut depth = self.fg.depth();
        let mut fg = alloc::borrow::Cow::Borrowed(&self.fg);
        let top = loop {
            if let Some(k) = fg.f.iter().position(|f| n < f) {
                break k;
            }
            depth *= 2;
            fg = alloc::borrow::Cow::Owned(self.fg_sequences(depth));
        };
        let mut pairs = alloc::vec![(0u32, 0u32); top];
        let mut states = alloc::vec![(0u8, 0u8); top];
        let mut rest = n.clone();
        let mut range = 1u8;
        for level in (1..=top).rev() {
            let [a, b, c, d] = self.coefficients(level);
            let (head, tail) = if range == 1 { (a, b) } else { (c, d) };
            let fprev = &fg.f[level - 1];
            let gprev = &fg.g[level - 1];
            let block = fprev * head;
            let source;
            if rest < block {
                let (q, r) = rest.div_rem(fprev);
                pairs[level - 1] = (q.to_u32().expect("digit fits"), 0);
                rest = r;
                source = 1u8;
            } else {
                rest -= block;
                let (q, r) = rest.div_rem(gprev);
                let gamma = q.to_u32().expect("digit fits");
                debug_assert!(gamma < tail);
                pairs[level - 1] = (head, gamma);
                rest = r;
                source = 2u8;
            }
            states[level - 1] = (source, range);
            range = source;
        }
        debug_assert!(rest.is_zero());
        DigitString { pairs, states }
    }

    pub fn encode_u64(&self, n: u64) -> DigitString {
        self.encode(&BigUint::from(n))
    }

    /// The same digits obtained by walking the Vershik orbit from `x₀`.
    pub fn encode_via_orbit(&self, sys: &VershikSystem, n: u64) -> DigitString {
        self.path_digits(&sys.iterate(&sys.x0(), n))
    }

    /// The path whose digits are `ds`.
    pub fn path_of(&self, sys: &VershikSystem, ds: &DigitString) -> Result<PathState> {
        let edges = ds
            .pairs
            .iter()
            .zip(ds.states.iter())
            .enumerate()
            .map(|(j, (&(delta, gamma), &(s, r)))| Edge {
                level: j + 1,
                source: u32::from(s),
                order: u64::from(delta + gamma),
                range: u32::from(r),
            })
            .collect();
        sys.path_from_edges(edges)
    }

    /// The state `V_B^N(x₀)`.
    pub fn state_of(&self, sys: &VershikSystem, n: &BigUint) -> PathState {
        self.path_of(sys, &self.encode(n))
            .expect("encoded digits form a valid path")
    }
}

/// Integer rank of paths cofinal with `x₀` for diagrams of any shape.
///
/// `rank(V_B^N(x₀)) = N`; the rank of a path is the number of paths into the same
/// vertex that precede it in the reverse lexicographic order.
#[derive(Clone, Debug)]
pub struct PathRanker<'a> {
    sys: &'a VershikSystem,
}

impl<'a> PathRanker<'a> {
    pub fn new(sys: &'a VershikSystem) -> Self {
        PathRanker { sys }
    }

    /// Path counts from level 0 to every vertex of levels `0..=depth`.
    pub fn path_counts(&self, depth: usize) -> Vec<Vec<BigUint>> {
        let d = self.sys.diagram();
        let mut out = Vec::with_capacity(depth + 1);
        out.push(alloc::vec![BigUint::one(); d.vertex_count(0)]);
        for k in 1..=depth {
            let m = d.incidence(k);
            let prev = &out[k - 1];
            let row: Vec<BigUint> = (0..m.rows())
                .map(|i| {
                    m.row(i)
                        .iter()
                        .zip(prev.iter())
                        .filter(|(&e, _)| e > 0)
                        .map(|(&e, c)| c * e)
                        .sum()
                })
                .collect();
            out.push(row);
        }
        out
    }

    pub fn rank(&self, x: &PathState) -> BigUint {
        let counts = self.path_counts(x.len());
        let d = self.sys.diagram();
        let mut n = BigUint::zero();
        for e in x.edges() {
            let lower = &counts[e.level - 1];
            for g in d.level(e.level).groups(e.range as usize - 1) {
                if g.start >= e.order {
                    break;
                }
                let before = (e.order - g.start).min(g.count);
                n += &lower[g.source] * before;
            }
        }
        n
    }

    pub fn unrank(&self, n: &BigUint) -> PathState {
        let d = self.sys.diagram();
        let mut depth = 16;
        let (top, counts) = loop {
            let counts = self.path_counts(depth);
            if let Some(k) =
                (0..=depth).find(|&k| *n < counts[k][self.sys.x0_vertex(k) as usize - 1])
            {
                break (k, counts);
            }
            depth *= 2;
        };
        let mut edges = alloc::vec![
            Edge {
                level: 0,
                source: 0,
                order: 0,
                range: 0
            };
            top
        ];
        let mut rest = n.clone();
        let mut range = self.sys.x0_vertex(top) as usize - 1;
        for level in (1..=top).rev() {
            let lower = &counts[level - 1];
            let mut chosen = None;
            for g in d.level(level).groups(range) {
                let block = &lower[g.source] * g.count;
                if rest < block {
                    let (q, r) = rest.div_rem(&lower[g.source]);
                    let q = q.to_u64().expect("order index fits");
                    chosen = Some((g.source, g.start + q));
                    rest = r;
                    break;
                }
                rest -= block;
            }
            let (src, order) = chosen.expect("rank below the path count");
            edges[level - 1] = Edge {
                level,
                source: src as u32 + 1,
                order,
                range: range as u32 + 1,
            };
            range = src;
        }
        self.sys
            .path_from_edges(edges)
            .expect("unranked edges form a valid path")
    }
}
