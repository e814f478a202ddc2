use alloc::vec::Vec;

use num_bigint::BigUint;
use num_complex::Complex64;
#[cfg_attr(feature = "std", allow(unused_imports))]
use num_traits::Float;

use super::orbit::{fibered_orbit, orbit_from, Coord, FiberedOrbit, Stop};
use super::params::{RadiusSource, SpectralParams};
use crate::numeration::DigitString;
use crate::process::AddingMachine;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetKind {
    F,
    E,
    Pt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    BoundedWithinBudget,
    Escaped,
}

/// What a `σ_pt` verdict rests on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// `u_{F_n}` left the disk of radius `R`; it is a subsequence of `u_n`.
    SubsequenceEscape,
    /// `a + b = c + d` and `|u_{F_k}| > 1` for some `k`.
    BlowUp,
    /// `a + b = c + d` and `|u_{F_n}| ≤ 1` for every tested `n`.
    UnitDiskBound,
    /// The supremum of `|u_n|` over `n < F_L` stopped growing.
    DigitProductStabilized,
    /// The supremum of `|u_n|` over `n < F_L` exceeded `R`.
    DigitProductEscape,
    /// Neither settled nor escaped within the budget.
    BudgetExhausted,
}

impl Certificate {
    pub fn tag(&self) -> &'static str {
        match self {
            Certificate::SubsequenceEscape => "subsequence-escape",
            Certificate::BlowUp => "blow-up",
            Certificate::UnitDiskBound => "unit-disk-bound",
            Certificate::DigitProductStabilized => "digit-product-stabilized",
            Certificate::DigitProductEscape => "digit-product-escape",
            Certificate::BudgetExhausted => "budget-exhausted",
        }
    }
}

/// Verdict for one spectral parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MembershipResult {
    pub lambda: Complex64,
    pub set: SetKind,
    pub verdict: Verdict,
    /// First `n ≤ budget` at which the tested quantity left the disk.
    pub escape_index: Option<usize>,
    /// First escape of `w_{F_n}` among the computed steps.
    pub w_escape_index: Option<usize>,
    /// `ln sup |u_n|` for `σ_pt`; `ln max |u_{F_n}|` otherwise.
    pub log_growth: f64,
    pub certificate: Option<Certificate>,
}

impl MembershipResult {
    pub fn is_bounded(&self) -> bool {
        self.verdict == Verdict::BoundedWithinBudget
    }

    /// Pixel code: 0 when bounded, otherwise escape index + 1.
    pub fn code(&self) -> u32 {
        match (self.verdict, self.escape_index) {
            (Verdict::BoundedWithinBudget, _) => 0,
            (Verdict::Escaped, Some(i)) => i as u32 + 1,
            (Verdict::Escaped, None) => 1,
        }
    }
}

fn result(
    lambda: Complex64,
    set: SetKind,
    orbit: &FiberedOrbit,
    escape_index: Option<usize>,
) -> MembershipResult {
    MembershipResult {
        lambda,
        set,
        verdict: if escape_index.is_some() {
            Verdict::Escaped
        } else {
            Verdict::BoundedWithinBudget
        },
        escape_index,
        w_escape_index: orbit.w_escape,
        log_growth: orbit.max_log_u(),
        certificate: None,
    }
}

/// Boundedness of `(u_{F_n})` within the budget.
pub fn f_membership(lambda: Complex64, params: &SpectralParams) -> MembershipResult {
    let orbit = fibered_orbit(lambda, params, params.budget, Stop::U);
    result(lambda, SetKind::F, &orbit, orbit.u_escape)
}

/// Boundedness of `(u_{F_n}, w_{F_n})` within the budget.
pub fn e_membership(lambda: Complex64, params: &SpectralParams) -> MembershipResult {
    let orbit = fibered_orbit(lambda, params, params.budget, Stop::Either);
    let idx = match (orbit.u_escape, orbit.w_escape) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    result(lambda, SetKind::E, &orbit, idx)
}

/// Escape indices of both components over the full budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EscapeComparison {
    pub u_escape: Option<usize>,
    pub w_escape: Option<usize>,
}

impl EscapeComparison {
    /// Both escaped or both stayed bounded.
    pub fn agree(&self) -> bool {
        self.u_escape.is_some() == self.w_escape.is_some()
    }
}

pub fn escape_comparison(lambda: Complex64, params: &SpectralParams) -> EscapeComparison {
    let orbit = fibered_orbit(lambda, params, params.budget, Stop::Both);
    EscapeComparison {
        u_escape: orbit.u_escape,
        w_escape: orbit.w_escape,
    }
}

/// One level of the digit-product maximization: the best `ln |u_{F_{j-1}}^δ w_{F_{j-1}}^γ|`
/// over the admissible pairs with the given source and range.
fn best_pair(head: u32, tail: u32, source: usize, lu: f64, lw: f64) -> f64 {
    let scaled = |k: u32, l: f64| if k == 0 { 0.0 } else { f64::from(k) * l };
    if source == 0 {
        if head == 0 {
            return f64::NEG_INFINITY;
        }
        if lu > 0.0 {
            scaled(head - 1, lu)
        } else {
            0.0
        }
    } else {
        if tail == 0 {
            return f64::NEG_INFINITY;
        }
        let g = if lw > 0.0 { scaled(tail - 1, lw) } else { 0.0 };
        scaled(head, lu) + g
    }
}

/// `ln max_{n < F_L} |u_n|` for `L = 1..=orbit.len()`.
fn digit_product_suprema(orbit: &FiberedOrbit, params: &SpectralParams) -> Vec<f64> {
    let mut s = [0.0f64, 0.0f64];
    let mut out = Vec::with_capacity(orbit.len());
    for j in 1..=orbit.len() {
        let lu = orbit.u[j - 1].log_abs();
        let lw = orbit.w[j - 1].log_abs();
        let [a, b, c, d] = params.coefficients(j);
        let mut next = [f64::NEG_INFINITY; 2];
        for (r, (head, tail)) in [(a, b), (c, d)].into_iter().enumerate() {
            for (src, prev) in s.iter().enumerate() {
                let v = prev + best_pair(head, tail, src, lu, lw);
                if v > next[r] {
                    next[r] = v;
                }
            }
        }
        s = next;
        out.push(s[0]);
    }
    out
}

/// Boundedness of the full eigenvector sequence `(u_n)`.
///
/// An escape of `u_{F_n}` settles the question negatively. With `a + b = c + d` the
/// unit-disk test is exact. Otherwise the supremum of `|u_n|` over `n < F_L` is
/// maximized level by level over the digit automaton and declared bounded only
/// when its last `dp_window` increments are all below `dp_threshold`.
pub fn pt_membership(lambda: Complex64, params: &SpectralParams) -> MembershipResult {
    let orbit = fibered_orbit(lambda, params, params.budget, Stop::U);
    let mut res = result(lambda, SetKind::Pt, &orbit, orbit.u_escape);
    if orbit.u_escape.is_some() {
        res.certificate = Some(Certificate::SubsequenceEscape);
        return res;
    }
    if params.balanced() {
        match orbit.u.iter().position(|u| u.log_abs() > 0.0) {
            Some(k) => {
                res.verdict = Verdict::Escaped;
                res.escape_index = Some(k);
                res.certificate = Some(Certificate::BlowUp);
            }
            None => res.certificate = Some(Certificate::UnitDiskBound),
        }
        res.log_growth = orbit.max_log_u().max(0.0);
        return res;
    }
    let sup = digit_product_suprema(&orbit, params);
    res.log_growth = sup.last().copied().unwrap_or(0.0);
    let ln_r = params.radius().ln();
    if let Some(l) = sup.iter().position(|&b| b > ln_r) {
        res.verdict = Verdict::Escaped;
        res.escape_index = Some(l + 1);
        res.certificate = Some(Certificate::DigitProductEscape);
        return res;
    }
    let window = params.dp_window;
    let settled = sup.len() > window
        && sup
            .windows(2)
            .rev()
            .take(window)
            .all(|w| w[1] - w[0] < params.dp_threshold);
    if settled {
        res.certificate = Some(Certificate::DigitProductStabilized);
    } else {
        res.verdict = Verdict::Escaped;
        res.escape_index = Some(params.budget);
        res.certificate = Some(Certificate::BudgetExhausted);
    }
    res
}

fn product_over_digits(orbit: &FiberedOrbit, pairs: &[(u32, u32)]) -> Complex64 {
    let mut z = Complex64::new(1.0, 0.0);
    for (i, &(dl, gm)) in pairs.iter().enumerate() {
        match (orbit.u[i], orbit.w[i]) {
            (Coord::Value(u), Coord::Value(w)) => {
                if dl > 0 {
                    z *= num_traits::pow(u, dl as usize);
                }
                if gm > 0 {
                    z *= num_traits::pow(w, gm as usize);
                }
            }
            _ => {
                if dl > 0 || gm > 0 {
                    return Complex64::new(f64::INFINITY, 0.0);
                }
            }
        }
    }
    z
}

/// `u_n(λ) = ∏ u_{F_i}^{δ_{i+1}} w_{F_i}^{γ_{i+1}}` for the `n` with digits `ds`.
pub fn u_n_value(lambda: Complex64, ds: &DigitString, params: &SpectralParams) -> Complex64 {
    if ds.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let orbit = fibered_orbit(lambda, params, ds.len() - 1, Stop::Never);
    product_over_digits(&orbit, ds.pairs())
}

/// `max_{N < K} |(S z)_N − λ z_N|` with `z_N = u_N(λ)`.
pub fn eigen_residual(
    lambda: Complex64,
    machine: &AddingMachine,
    params: &SpectralParams,
    rows: u64,
) -> Result<f64> {
    let num = machine
        .numeration()
        .ok_or_else(|| Error::NotTwoByTwo("the eigenvector is indexed by (F,G) digits".into()))?;
    let depth = num.encode_u64(rows).len().max(1);
    let orbit = fibered_orbit(lambda, params, depth, Stop::Never);
    let z: Vec<Complex64> = (0..=rows)
        .map(|n| product_over_digits(&orbit, num.encode_u64(n).pairs()))
        .collect();
    let mut worst = 0.0f64;
    for n in 0..rows {
        let row = machine.operator_row::<f64>(&BigUint::from(n))?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (col, p) in row.iter() {
            let col = u64::try_from(col).expect("column fits") as usize;
            acc += z[col] * *p;
        }
        let r = (acc - lambda * z[n as usize]).norm();
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Outcome of the critical-point diagnostic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalTest {
    /// Constant `p < 1/2`, `det M < 0`, `bc > (ad − bc)²`.
    pub applicable: bool,
    pub escaped: bool,
    pub escape_index: Option<usize>,
    /// The starting value `(1 − p)/p`.
    pub start: f64,
}

/// Iterates the fibered map from `u = w = (1 − p)/p` and reports escape.
pub fn critical_escape_test(params: &SpectralParams) -> CriticalTest {
    let p = params.constant_p().unwrap_or_else(|| params.p(1));
    let applicable = params.constant_p().is_some()
        && p < 0.5
        && params.is_stationary()
        && params.det_negative()
        && params.bc_dominates();
    let start = (1.0 - p) / p;
    let orbit = orbit_from(
        Complex64::new(start, 0.0),
        params,
        params.budget,
        Stop::Either,
    );
    let idx = match (orbit.u_escape, orbit.w_escape) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    CriticalTest {
        applicable,
        escaped: idx.is_some(),
        escape_index: idx,
        start,
    }
}

const PROBE_SIDE: usize = 16;
const MAX_DOUBLINGS: usize = 24;

/// Escape radius: the analytic nesting radius when its hypotheses hold, otherwise a
/// radius doubled until the `𝓔` classification of a 16×16 probe grid over
/// `[−2, 2]²` no longer changes.
pub fn escape_radius(params: &SpectralParams) -> (f64, RadiusSource) {
    if params.nesting_applies() {
        let p = params.constant_p().expect("constant schedule");
        let [a, b, c, d] = params.coefficients(1).map(f64::from);
        let dd = b * c - a * d;
        let h = |r: f64| {
            let base = p * r - (1.0 - p);
            if base <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let inner = p * base.powf(c / dd) - (1.0 - p);
            if inner <= 0.0 {
                return f64::NEG_INFINITY;
            }
            inner.powf(b / dd)
        };
        let mut r = (2.0 - p) / p + 1.0;
        for _ in 0..MAX_DOUBLINGS * 4 {
            if h(r) > r {
                return (r, RadiusSource::Analytic);
            }
            r *= 2.0;
        }
    }
    let mut r = match params.schedule().min_value() {
        Some(pm) if pm > 0.0 => ((2.0 - pm) / pm + 1.0).max(2.0),
        _ => 4.0,
    };
    let mut probe = params.clone();
    probe.budget = params.budget.min(64);
    let mut classify = |r: f64| -> Vec<bool> {
        probe.set_radius(r, RadiusSource::Heuristic);
        (0..PROBE_SIDE * PROBE_SIDE)
            .map(|k| {
                let (i, j) = (k % PROBE_SIDE, k / PROBE_SIDE);
                let step = 4.0 / PROBE_SIDE as f64;
                let lam = Complex64::new(
                    -2.0 + (i as f64 + 0.5) * step,
                    -2.0 + (j as f64 + 0.5) * step,
                );
                e_membership(lam, &probe).is_bounded()
            })
            .collect()
    };
    let mut prev = classify(r);
    for _ in 0..MAX_DOUBLINGS {
        let next = classify(2.0 * r);
        if next == prev {
            return (r, RadiusSource::Heuristic);
        }
        r *= 2.0;
        prev = next;
    }
    (r, RadiusSource::Heuristic)
}
