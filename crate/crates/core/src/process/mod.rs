//! The stochastic adding machine: the random Vershik map, its transition operator,
//! simulation and recurrence classification.
//!
//! From a state `x` with carry set `A(x) = {k_1 < … < k_θ}` and carry depth `ζ`,
//! the machine moves to
//!
//! - `x` with probability `1 − p_{k_1}`,
//! - `y_j(x)` with probability `p_{k_1}⋯p_{k_j}(1 − p_{k_{j+1}})` for `j < θ`,
//! - `y_θ(x)` with probability `p_{k_1}⋯p_{k_θ}(1 − p_ζ)`,
//! - `V_B(x)` with probability `p_{k_1}⋯p_{k_θ} p_ζ`.
//!
//! When `θ = 0` this reads: stay with `1 − p_ζ`, advance with `p_ζ`.

mod recurrence;
mod schedule;
mod simulate;
mod transition;

pub use recurrence::{
    bound_coefficients, classify_recurrence, period_diagnostic, return_time_bound, Classification,
    Justification, Period, Recurrence, ReturnTimeBound,
};
pub use schedule::{ProbSchedule, ScheduleKind, TailRule};
pub use simulate::{replica_rng, Trajectory};
pub use transition::TransitionRow;

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::numeration::{FgNumeration, PathRanker};
use crate::prob::Probability;
use crate::vershik::{PathState, VershikSystem};
use crate::{Error, Result};

/// A diagram, its minimal path and a probability schedule.
#[derive(Clone, Debug)]
pub struct AddingMachine {
    sys: VershikSystem,
    schedule: ProbSchedule,
    numeration: Option<FgNumeration>,
    hypothesis_a: bool,
}

/// A sparse matrix entry `(row, col, value)`.
pub type Triplet<P> = (u64, u64, P);

impl AddingMachine {
    pub fn new(sys: VershikSystem, schedule: ProbSchedule) -> Self {
        let numeration = FgNumeration::new(sys.diagram()).ok();
        let hypothesis_a = sys.diagram().check_hypothesis_a();
        AddingMachine {
            sys,
            schedule,
            numeration,
            hypothesis_a,
        }
    }

    pub fn system(&self) -> &VershikSystem {
        &self.sys
    }

    pub fn schedule(&self) -> &ProbSchedule {
        &self.schedule
    }

    /// The `(F, G)` numeration, when the diagram is 2×2 with canonical ordering.
    pub fn numeration(&self) -> Option<&FgNumeration> {
        self.numeration.as_ref()
    }

    pub fn hypothesis_a(&self) -> bool {
        self.hypothesis_a
    }

    /// `V_B^N(x₀)`.
    pub fn state_of(&self, n: &BigUint) -> PathState {
        match &self.numeration {
            Some(num) => num.state_of(&self.sys, n),
            None => PathRanker::new(&self.sys).unrank(n),
        }
    }

    /// The integer `N` with `V_B^N(x₀) = x`.
    pub fn label_of(&self, x: &PathState) -> BigUint {
        match &self.numeration {
            Some(num) => num.decode(&num.path_digits(x)),
            None => PathRanker::new(&self.sys).rank(x),
        }
    }

    /// The one-step law from `x`.
    pub fn transition_distribution<P: Probability>(
        &self,
        x: &PathState,
    ) -> TransitionRow<PathState, P> {
        let sys = &self.sys;
        let zeta = sys.zeta(x);
        let carries = sys.carry_set_with_zeta(x, zeta);
        let p = |j: usize| P::from_schedule(&self.schedule, j);
        let mut row = TransitionRow::new();
        let advance = sys.successor_with_zeta(x, zeta);
        if carries.is_empty() {
            let pz = p(zeta);
            row.insert(x.clone(), pz.complement());
            row.insert(advance, pz);
            return row;
        }
        row.insert(x.clone(), p(carries[0]).complement());
        let mut prod = P::one();
        for (idx, &k) in carries.iter().enumerate() {
            prod = prod * p(k);
            let next = carries.get(idx + 1).copied().unwrap_or(zeta);
            let fail = prod.clone() * p(next).complement();
            if !fail.is_zero() {
                row.insert(sys.reset_at_level(x, k), fail);
            }
        }
        row.insert(advance, prod * p(zeta));
        row
    }

    /// Row `N` of the transition operator in closed form.
    ///
    /// Requires a 2×2 diagram with canonical ordering satisfying Hypothesis A; then
    /// `A(x) = {1, …, ζ − 1}` and the row has mass `1 − p_1` at `N`,
    /// `∏_{j ≤ ζ} p_j` at `N + 1` and `∏_{j ≤ r} p_j (1 − p_{r+1})` at
    /// `N − Σ_{j < r} (δ_{j+1} F_j + γ_{j+1} G_j)` for `1 ≤ r < ζ`.
    pub fn operator_row<P: Probability>(&self, n: &BigUint) -> Result<TransitionRow<BigUint, P>> {
        let num = self.numeration.as_ref().ok_or_else(|| {
            Error::NotTwoByTwo("the closed-form row needs the (F,G) numeration".into())
        })?;
        if !self.hypothesis_a {
            return Err(Error::HypothesisA(
                "some vertex has a single incoming edge".into(),
            ));
        }
        let ds = num.encode(n);
        let fg = num.table();
        let pairs = ds.pairs();
        let states = ds.states();
        let mut zeta = pairs.len() + 1;
        for (j, (&(dl, gm), &(_, r))) in pairs.iter().zip(states).enumerate() {
            let [a, b, c, d] = num.coefficients(j + 1);
            let indeg = if r == 1 { a + b } else { c + d };
            if dl + gm + 1 != indeg {
                zeta = j + 1;
                break;
            }
        }
        let fg_owned;
        let fg = if zeta > fg.depth() {
            fg_owned = num.fg_sequences(zeta);
            &fg_owned
        } else {
            fg
        };
        let p = |j: usize| P::from_schedule(&self.schedule, j);
        let mut row = TransitionRow::new();
        row.insert(n.clone(), p(1).complement());
        let mut prod = P::one();
        let mut offset = BigUint::default();
        for r in 1..zeta {
            prod = prod * p(r);
            let (dl, gm) = pairs[r - 1];
            offset += &fg.f[r - 1] * dl + &fg.g[r - 1] * gm;
            row.insert(n - &offset, prod.clone() * p(r + 1).complement());
        }
        row.insert(n + 1u32, prod * p(zeta));
        Ok(row)
    }

    /// Row `N` obtained by pushing the path law through the integer labelling.
    pub fn row_via_paths<P: Probability>(&self, n: &BigUint) -> TransitionRow<BigUint, P> {
        let x = self.state_of(n);
        self.transition_distribution::<P>(&x)
            .map_targets(|y| self.label_of(y))
    }

    /// Row `N`, in closed form when available.
    pub fn row<P: Probability>(&self, n: &BigUint) -> TransitionRow<BigUint, P> {
        match self.operator_row(n) {
            Ok(r) => r,
            Err(_) => self.row_via_paths(n),
        }
    }

    /// Rows `0..size` as `(row, col, value)` triplets in row-major order. Columns
    /// may reach `size` (the last row's advance target).
    pub fn build_operator<P: Probability>(&self, size: u64) -> Vec<Triplet<P>> {
        let mut out = Vec::new();
        for n in 0..size {
            self.push_row_triplets(n, &mut out);
        }
        out
    }

    /// Appends the triplets of row `n`.
    pub fn push_row_triplets<P: Probability>(&self, n: u64, out: &mut Vec<Triplet<P>>) {
        let row = self.row::<P>(&BigUint::from(n));
        for (col, p) in row {
            let col = col
                .to_u64()
                .unwrap_or_else(|| panic!("column of row {} exceeds u64", n));
            out.push((n, col, p));
        }
    }
}
