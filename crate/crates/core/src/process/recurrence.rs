use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::ProbSchedule;
use crate::diagram::BratteliDiagram;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recurrence {
    Transient,
    NullRecurrent,
    PositiveRecurrent,
    Unknown,
}

/// The criterion behind a [`Classification`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Justification {
    /// Only finitely many `p_j < 1`: irreducibility is not established.
    IrreducibilityUnproven,
    /// Irreducible and `∏ p_j > 0`.
    ProductPositive,
    /// Hypothesis A with `∏ p_j = 0`.
    HypothesisAProductZero,
    /// Stationary diagram with constant `p ∈ (0, 1)`.
    StationaryConstant,
    /// `[[1, b], [1, 0]]` with a convergent return-time bound.
    ReturnTimeBound,
    /// None of the available criteria applies.
    NoCriterion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Recurrence,
    pub justification: Justification,
}

impl Justification {
    pub fn tag(&self) -> &'static str {
        match self {
            Justification::IrreducibilityUnproven => "irreducibility-unproven",
            Justification::ProductPositive => "product-positive",
            Justification::HypothesisAProductZero => "hypothesis-a-product-zero",
            Justification::StationaryConstant => "stationary-constant",
            Justification::ReturnTimeBound => "return-time-bound",
            Justification::NoCriterion => "no-criterion",
        }
    }
}

impl Recurrence {
    pub fn tag(&self) -> &'static str {
        match self {
            Recurrence::Transient => "transient",
            Recurrence::NullRecurrent => "null_recurrent",
            Recurrence::PositiveRecurrent => "positive_recurrent",
            Recurrence::Unknown => "unknown",
        }
    }
}

/// `b` when the diagram is stationary with matrix `[[1, b], [1, 0]]`, `b > 0`, and
/// canonical ordering.
fn fibonacci_like(d: &BratteliDiagram) -> Option<u32> {
    if !d.is_stationary() || !d.is_canonical() {
        return None;
    }
    match d.coefficients_2x2(1)? {
        [1, b, 1, 0] if b > 0 => Some(b),
        _ => None,
    }
}

/// Whether `Σ C_j max(p_{j-1}, p_j)` converges, with `C_j ≍ √2^j`: the schedule is
/// geometric with ratio `q`, `2q² < 1`.
fn bound_series_converges(ps: &ProbSchedule) -> bool {
    match ps.geometric_ratio() {
        Some(q) => q * q * BigRational::from_integer(2.into()) < BigRational::one(),
        None => false,
    }
}

/// Applies the transience, null-recurrence and positive-recurrence criteria in
/// that order; anything they do not cover is [`Recurrence::Unknown`].
pub fn classify_recurrence(d: &BratteliDiagram, ps: &ProbSchedule) -> Classification {
    let c = |verdict, justification| Classification {
        verdict,
        justification,
    };
    if !ps.infinitely_many_below_one() {
        return c(Recurrence::Unknown, Justification::IrreducibilityUnproven);
    }
    if ps.product_positive() {
        return c(Recurrence::Transient, Justification::ProductPositive);
    }
    if d.check_hypothesis_a() {
        return c(
            Recurrence::NullRecurrent,
            Justification::HypothesisAProductZero,
        );
    }
    if d.is_stationary() {
        if let Some(p) = ps.constant_value() {
            if p < BigRational::one() && p > BigRational::zero() {
                return c(Recurrence::NullRecurrent, Justification::StationaryConstant);
            }
        }
    }
    if fibonacci_like(d).is_some() && bound_series_converges(ps) {
        return c(
            Recurrence::PositiveRecurrent,
            Justification::ReturnTimeBound,
        );
    }
    c(Recurrence::Unknown, Justification::NoCriterion)
}

/// Aperiodicity diagnostic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Period {
    /// `p_1 < 1`, so `x₀` has a self-loop.
    Aperiodic,
    /// `p_1 = 1`: depends on the diagram and is not decided here.
    Unknown,
}

pub fn period_diagnostic(ps: &ProbSchedule) -> Period {
    if ps.p_rational(1) < BigRational::one() {
        Period::Aperiodic
    } else {
        Period::Unknown
    }
}

/// `C_1, …, C_n` for `[[1, b], [1, 0]]`: `C_1 = 1 + b`, `C_2 = 1 + 2b`,
/// `C_3 = 1 + 2b + b²` and `C_{j+2} = 2 C_j` for `j ≥ 2`.
pub fn bound_coefficients(b: u32, n: usize) -> Vec<f64> {
    let b = f64::from(b);
    let mut c = Vec::with_capacity(n);
    for j in 1..=n {
        let v = match j {
            1 => 1.0 + b,
            2 => 1.0 + 2.0 * b,
            3 => 1.0 + 2.0 * b + b * b,
            _ => 2.0 * c[j - 3],
        };
        c.push(v);
    }
    c
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReturnTimeBound {
    /// `C_1 + Σ_{j ≤ J} C_j max(p_{j-1}, p_j)`.
    pub partial: f64,
    /// Bound on the omitted terms; `None` when no tail estimate is available.
    pub remainder: Option<f64>,
    /// `partial + remainder`, or `∞`.
    pub bound: f64,
}

impl ReturnTimeBound {
    pub fn is_finite(&self) -> bool {
        self.bound.is_finite()
    }
}

/// Upper bound on the expected return time to `x₀` for `[[1, b], [1, 0]]`,
/// `E[T] ≤ C_1 + Σ_{j ≥ 1} C_j max(p_{j-1}, p_j)` with `p_0 = 1`.
///
/// The series is summed through `J`; for `p_j = q^j` with `q√2 < 1` the rest is
/// bounded by `(κ/q)(q√2)^{J+1}/(1 − q√2)` where `κ = max_j C_j / √2^j`.
/// Without that estimate the bound is `∞`.
pub fn return_time_bound(b: u32, ps: &ProbSchedule, depth: usize) -> ReturnTimeBound {
    let c = bound_coefficients(b, depth.max(3));
    let p = |j: usize| if j == 0 { 1.0 } else { ps.p_f64(j) };
    let mut partial = c[0];
    for j in 1..=depth {
        partial += c[j - 1] * p(j - 1).max(p(j));
    }
    let remainder = if bound_series_converges(ps) {
        let q = ps.geometric_ratio().and_then(|q| q.to_f64()).unwrap_or(1.0);
        let s2 = core::f64::consts::SQRT_2;
        let kappa = c[..3]
            .iter()
            .enumerate()
            .map(|(i, v)| v / num_traits::Float::powi(s2, i as i32 + 1))
            .fold(0.0, f64::max);
        let r = q * s2;
        Some(kappa / q * num_traits::Float::powi(r, depth as i32 + 1) / (1.0 - r))
    } else {
        None
    };
    let bound = match remainder {
        Some(r) => partial + r,
        None => f64::INFINITY,
    };
    ReturnTimeBound {
        partial,
        remainder,
        bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::IncidenceMatrix;
    use crate::prob::ratio;
    use crate::process::TailRule;

    fn diagram(rows: [[u32; 2]; 2]) -> BratteliDiagram {
        BratteliDiagram::build_stationary(2, IncidenceMatrix::new(&rows).unwrap(), None).unwrap()
    }

    #[test]
    fn coefficients() {
        assert_eq!(bound_coefficients(1, 6), [2.0, 3.0, 4.0, 6.0, 8.0, 12.0]);
        assert_eq!(bound_coefficients(2, 6), [3.0, 5.0, 9.0, 10.0, 18.0, 20.0]);
    }

    #[test]
    fn verdicts() {
        let transient = ProbSchedule::one_minus_geometric(ratio(1, 3)).unwrap();
        let half = ProbSchedule::constant(ratio(1, 2)).unwrap();
        let quarter = ProbSchedule::geometric(ratio(1, 4)).unwrap();
        for rows in [[[2, 1], [3, 1]], [[1, 1], [1, 0]]] {
            assert_eq!(
                classify_recurrence(&diagram(rows), &transient).verdict,
                Recurrence::Transient
            );
        }
        let c = classify_recurrence(&diagram([[2, 1], [3, 1]]), &half);
        assert_eq!(c.verdict, Recurrence::NullRecurrent);
        let c = classify_recurrence(&diagram([[1, 1], [1, 0]]), &half);
        assert_eq!(
            c,
            Classification {
                verdict: Recurrence::NullRecurrent,
                justification: Justification::StationaryConstant
            }
        );
        let c = classify_recurrence(&diagram([[1, 1], [1, 0]]), &quarter);
        assert_eq!(c.verdict, Recurrence::PositiveRecurrent);
        let c = classify_recurrence(&diagram([[2, 1], [3, 1]]), &quarter);
        assert_eq!(c.verdict, Recurrence::NullRecurrent);
        // q = 3/4 is too slow for the bound
        let slow = ProbSchedule::geometric(ratio(3, 4)).unwrap();
        let c = classify_recurrence(&diagram([[1, 1], [1, 0]]), &slow);
        assert_eq!(c.verdict, Recurrence::Unknown);
        let ones =
            ProbSchedule::explicit(alloc::vec![ratio(1, 2)], TailRule::Constant(ratio(1, 1)))
                .unwrap();
        let c = classify_recurrence(&diagram([[2, 1], [3, 1]]), &ones);
        assert_eq!(c.justification, Justification::IrreducibilityUnproven);
    }

    #[test]
    fn bounds() {
        let quarter = ProbSchedule::geometric(ratio(1, 4)).unwrap();
        let r = return_time_bound(1, &quarter, 20);
        let oracle: f64 = 2.0
            + bound_coefficients(1, 200)
                .iter()
                .enumerate()
                .map(|(i, c)| c * 0.25f64.powi(i as i32))
                .sum::<f64>();
        assert!(r.is_finite());
        assert!(r.remainder.unwrap() < 1e-3);
        assert!((r.partial - oracle).abs() < 1e-3);
        assert!(r.bound >= oracle);
        assert!((r.bound - 5.14).abs() < 0.01);

        let half = ProbSchedule::constant(ratio(1, 2)).unwrap();
        assert!(!return_time_bound(1, &half, 20).is_finite());

        let eighth = ProbSchedule::geometric(ratio(1, 8)).unwrap();
        let r = return_time_bound(2, &eighth, 20);
        assert!(r.is_finite() && r.bound > 3.0 + 3.0);
    }

    #[test]
    fn period() {
        assert_eq!(
            period_diagnostic(&ProbSchedule::constant(ratio(1, 2)).unwrap()),
            Period::Aperiodic
        );
        assert_eq!(
            period_diagnostic(&ProbSchedule::constant(ratio(1, 1)).unwrap()),
            Period::Unknown
        );
    }
}
