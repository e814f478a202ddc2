use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg_attr(feature = "std", allow(unused_imports))]
use num_traits::Float;

use super::membership::Verdict;
use super::orbit::{affine_monomial, Coord};
use crate::diagram::IncidenceMatrix;
use crate::process::ProbSchedule;
use crate::{Error, Result};

/// Result of iterating the general fibered map on `ℂ^l`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitOutcome {
    pub verdict: Verdict,
    /// First `n` with `‖ψ_n(z)‖_∞ > R`; index 0 is the starting point.
    pub escape_index: Option<usize>,
    /// The last computed point.
    pub last: Vec<Coord>,
    /// `max_n ln ‖ψ_n(z)‖_∞`.
    pub log_growth: f64,
}

/// `g(z)_i = (∏_j z_j^{m_{i,j}} − (1 − p)) / p`.
pub fn general_step(z: &[Coord], m: &IncidenceMatrix, p: f64) -> Vec<Coord> {
    (0..m.rows())
        .map(|i| affine_monomial(z, m.row(i), p))
        .collect()
}

fn sup_log(z: &[Coord]) -> f64 {
    z.iter()
        .map(Coord::log_abs)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Iterates `ψ_n = g_n ∘ … ∘ g_1` from `z`, where step `n` uses the `n`-th matrix
/// (the last one repeating) and `p_{n+1}`, for `n = 1..=budget`.
pub fn fibered_orbit_general(
    z: &[Complex64],
    matrices: &[IncidenceMatrix],
    schedule: &ProbSchedule,
    budget: usize,
    radius: f64,
) -> Result<OrbitOutcome> {
    let l = z.len();
    if l < 2 {
        return Err(Error::InvalidSpectralParams(
            "the general fibered map needs at least two coordinates".into(),
        ));
    }
    if matrices.is_empty() {
        return Err(Error::InvalidSpectralParams(
            "at least one matrix is required".into(),
        ));
    }
    for (k, m) in matrices.iter().enumerate() {
        if m.rows() != l || m.cols() != l {
            return Err(Error::DimensionMismatch {
                level: k + 1,
                detail: format!("expected {}x{}, got {}x{}", l, l, m.rows(), m.cols()),
            });
        }
        if let Some(i) = (0..l).find(|&i| m.row_sum(i) < 2) {
            return Err(Error::HypothesisA(format!(
                "row {} of matrix {} sums to less than 2",
                i + 1,
                k + 1
            )));
        }
    }
    let ln_r = radius.ln();
    let mut cur: Vec<Coord> = z.iter().map(|&v| Coord::Value(v)).collect();
    let mut growth = sup_log(&cur);
    let escaped = |c: &[Coord]| c.iter().any(|x| x.exceeds(radius, ln_r));
    if escaped(&cur) {
        return Ok(OrbitOutcome {
            verdict: Verdict::Escaped,
            escape_index: Some(0),
            last: cur,
            log_growth: growth,
        });
    }
    for n in 1..=budget {
        let m = &matrices[(n - 1).min(matrices.len() - 1)];
        cur = general_step(&cur, m, schedule.p_f64(n + 1));
        growth = growth.max(sup_log(&cur));
        if escaped(&cur) {
            return Ok(OrbitOutcome {
                verdict: Verdict::Escaped,
                escape_index: Some(n),
                last: cur,
                log_growth: growth,
            });
        }
    }
    Ok(OrbitOutcome {
        verdict: Verdict::BoundedWithinBudget,
        escape_index: None,
        last: cur,
        log_growth: growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::ratio;
    use crate::spectrum::{fibered_orbit, SpectralParams, Stop};

    fn ones(l: usize) -> IncidenceMatrix {
        IncidenceMatrix::new(&alloc::vec![alloc::vec![1u32; l]; l]).unwrap()
    }

    #[test]
    fn all_ones_is_fixed() {
        let m = IncidenceMatrix::new(&[[2, 1, 0], [0, 1, 3], [1, 1, 1]]).unwrap();
        let ps = ProbSchedule::constant(ratio(3, 10)).unwrap();
        let z = [Complex64::new(1.0, 0.0); 3];
        let out = fibered_orbit_general(&z, &[m], &ps, 40, 10.0).unwrap();
        assert_eq!(out.verdict, Verdict::BoundedWithinBudget);
        assert!(out.last.iter().all(|c| *c == Coord::Value(z[0])));
    }

    #[test]
    fn cube_escapes_at_one() {
        let ps = ProbSchedule::constant(ratio(1, 1)).unwrap();
        let z = [Complex64::new(2.0, 0.0); 3];
        let out = fibered_orbit_general(&z, &[ones(3)], &ps, 10, 4.0).unwrap();
        assert_eq!(out.escape_index, Some(1));
        assert_eq!(out.last[0], Coord::Value(Complex64::new(8.0, 0.0)));
    }

    #[test]
    fn diagonal_start_matches_two_by_two() {
        let ps = ProbSchedule::constant(ratio(1, 2)).unwrap();
        let params = SpectralParams::stationary([2, 1, 3, 1], ps.clone()).unwrap();
        let m = IncidenceMatrix::new(&[[2, 1], [3, 1]]).unwrap();
        for lam in [
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.4, 0.6),
            Complex64::new(1.4, 0.0),
        ] {
            let u0 = params.seed(lam);
            let orbit = fibered_orbit(lam, &params, 12, Stop::Never);
            for n in 0..=12 {
                let out = fibered_orbit_general(
                    &[u0, u0],
                    std::slice::from_ref(&m),
                    &ps,
                    n,
                    f64::INFINITY,
                )
                .unwrap();
                assert_eq!(out.last, [orbit.u[n], orbit.w[n]]);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let ps = ProbSchedule::constant(ratio(1, 2)).unwrap();
        let z1 = [Complex64::new(0.0, 0.0)];
        assert!(fibered_orbit_general(&z1, &[ones(1)], &ps, 4, 4.0).is_err());
        let id = IncidenceMatrix::new(&[[1, 0], [0, 1]]).unwrap();
        let z = [Complex64::new(0.0, 0.0); 2];
        assert!(fibered_orbit_general(&z, &[id], &ps, 4, 4.0).is_err());
        assert!(fibered_orbit_general(&z, &[ones(3)], &ps, 4, 4.0).is_err());
    }
}
