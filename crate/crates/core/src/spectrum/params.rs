use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::diagram::BratteliDiagram;
use crate::process::ProbSchedule;
use crate::{Error, Result};

/// Default number of `F`-recursion steps.
pub const DEFAULT_BUDGET: usize = 64;
/// Per-level increment below which the digit-product supremum counts as settled.
pub const DEFAULT_DP_THRESHOLD: f64 = 1e-12;
/// Number of consecutive settled levels required.
pub const DEFAULT_DP_WINDOW: usize = 8;

/// Where the escape radius came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusSource {
    /// Analytic nesting radius (`det M < 0`, `bc > (ad − bc)²`, constant `p`).
    Analytic,
    /// Doubled until a probe classification stopped changing.
    Heuristic,
    /// Supplied by the caller.
    User,
}

/// Coefficients, schedule and numerical settings for the fibered recursion
/// `u_{F_n} = (u_{F_{n-1}}^{a_n} w_{F_{n-1}}^{b_n} − (1 − p_{n+1})) / p_{n+1}`,
/// `w_{F_n} = (u_{F_{n-1}}^{c_n} w_{F_{n-1}}^{d_n} − (1 − p_{n+1})) / p_{n+1}`,
/// seeded with `u_{F_0} = w_{F_0} = (λ − (1 − p_1)) / p_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralParams {
    levels: Vec<[u32; 4]>,
    schedule: ProbSchedule,
    pub budget: usize,
    radius: f64,
    radius_source: RadiusSource,
    pub dp_threshold: f64,
    pub dp_window: usize,
}

impl SpectralParams {
    /// Level coefficients `(a_n, b_n, c_n, d_n)` for `n = 1, 2, …`; the last repeats.
    /// The escape radius is chosen by [`super::escape_radius`].
    pub fn new(levels: Vec<[u32; 4]>, schedule: ProbSchedule) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidSpectralParams(
                "at least one coefficient set is required".into(),
            ));
        }
        for (i, [a, b, c, d]) in levels.iter().enumerate() {
            if a + b == 0 || c + d == 0 {
                return Err(Error::InvalidSpectralParams(format!(
                    "level {}: both rows need a nonzero entry",
                    i + 1
                )));
            }
        }
        let mut params = SpectralParams {
            levels,
            schedule,
            budget: DEFAULT_BUDGET,
            radius: 0.0,
            radius_source: RadiusSource::Heuristic,
            dp_threshold: DEFAULT_DP_THRESHOLD,
            dp_window: DEFAULT_DP_WINDOW,
        };
        let (r, src) = super::escape_radius(&params);
        params.radius = r;
        params.radius_source = src;
        Ok(params)
    }

    pub fn stationary(coeffs: [u32; 4], schedule: ProbSchedule) -> Result<Self> {
        Self::new(alloc::vec![coeffs], schedule)
    }

    pub fn from_diagram(d: &BratteliDiagram, schedule: ProbSchedule) -> Result<Self> {
        if !d.is_two_by_two() {
            return Err(Error::NotTwoByTwo(
                "the fibered recursion needs 2x2 levels".into(),
            ));
        }
        let levels = (1..=d.explicit_levels())
            .map(|k| d.coefficients_2x2(k).expect("2x2 level"))
            .collect();
        Self::new(levels, schedule)
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidSpectralParams(format!(
                "escape radius {} must be positive and finite",
                radius
            )));
        }
        self.radius = radius;
        self.radius_source = RadiusSource::User;
        Ok(self)
    }

    pub(crate) fn set_radius(&mut self, radius: f64, source: RadiusSource) {
        self.radius = radius;
        self.radius_source = source;
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn radius_source(&self) -> RadiusSource {
        self.radius_source
    }

    pub fn schedule(&self) -> &ProbSchedule {
        &self.schedule
    }

    /// `(a_n, b_n, c_n, d_n)` for `n ≥ 1`.
    pub fn coefficients(&self, n: usize) -> [u32; 4] {
        self.levels[(n.max(1) - 1).min(self.levels.len() - 1)]
    }

    pub fn levels(&self) -> &[[u32; 4]] {
        &self.levels
    }

    pub fn is_stationary(&self) -> bool {
        self.levels.len() == 1
    }

    /// `p_j` in floating point.
    pub fn p(&self, j: usize) -> f64 {
        self.schedule.p_f64(j)
    }

    /// The constant `p` when the schedule is constant.
    pub fn constant_p(&self) -> Option<f64> {
        self.schedule.constant_value().and_then(|p| p.to_f64())
    }

    /// `u_{F_0}(λ)`.
    pub fn seed(&self, lambda: Complex64) -> Complex64 {
        super::orbit::affine(lambda, self.p(1))
    }

    fn all_levels(&self, f: impl Fn([i64; 4]) -> bool) -> bool {
        self.levels.iter().all(|c| f(c.map(i64::from)))
    }

    /// `ad − bc < 0` at every level.
    pub fn det_negative(&self) -> bool {
        self.all_levels(|[a, b, c, d]| a * d - b * c < 0)
    }

    /// `ad − bc ≤ 0` at every level.
    pub fn det_nonpositive(&self) -> bool {
        self.all_levels(|[a, b, c, d]| a * d - b * c <= 0)
    }

    /// `bc > (ad − bc)²` at every level.
    pub fn bc_dominates(&self) -> bool {
        self.all_levels(|[a, b, c, d]| {
            let det = a * d - b * c;
            b * c > det * det
        })
    }

    /// `a + b = c + d` at every level.
    pub fn balanced(&self) -> bool {
        self.all_levels(|[a, b, c, d]| a + b == c + d)
    }

    /// `abc > 0` and `c + d > 1` at every level.
    pub fn pt_hypotheses(&self) -> bool {
        self.all_levels(|[a, b, c, d]| a * b * c > 0 && c + d > 1)
    }

    /// Conditions under which escape from the analytic radius is permanent.
    pub fn nesting_applies(&self) -> bool {
        self.is_stationary()
            && self.det_negative()
            && self.bc_dominates()
            && self.constant_p().is_some_and(|p| p > 0.0 && p < 1.0)
    }
}
