use alloc::format;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::{Error, Result};

/// How an explicit list continues past its last entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailRule {
    RepeatLast,
    Cycle,
    Constant(BigRational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScheduleKind {
    /// `p_j = p`.
    Constant(BigRational),
    /// `p_1, …, p_n` then the tail rule.
    Explicit {
        values: Vec<BigRational>,
        tail: TailRule,
    },
    /// `p_j = q^j`.
    Geometric { ratio: BigRational },
    /// `p_j = 1 − q^j`.
    OneMinusGeometric { ratio: BigRational },
}

/// The carry probabilities `(p_j)_{j ≥ 1}`, each in `(0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbSchedule {
    kind: ScheduleKind,
    values_f64: Vec<f64>,
    scalar_f64: f64,
}

fn in_unit(p: &BigRational) -> bool {
    p.is_positive() && *p <= BigRational::one()
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl ProbSchedule {
    pub fn constant(p: BigRational) -> Result<Self> {
        if !in_unit(&p) {
            return Err(Error::InvalidSchedule(format!(
                "constant probability {} must lie in (0, 1]",
                p
            )));
        }
        Ok(Self::from_kind(ScheduleKind::Constant(p)))
    }

    pub fn explicit(values: Vec<BigRational>, tail: TailRule) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSchedule(
                "explicit schedule needs at least one value".into(),
            ));
        }
        for (i, p) in values.iter().enumerate() {
            if !in_unit(p) {
                return Err(Error::InvalidSchedule(format!(
                    "p_{} = {} must lie in (0, 1]",
                    i + 1,
                    p
                )));
            }
        }
        if let TailRule::Constant(t) = &tail {
            if !in_unit(t) {
                return Err(Error::InvalidSchedule(format!(
                    "tail probability {} must lie in (0, 1]",
                    t
                )));
            }
        }
        Ok(Self::from_kind(ScheduleKind::Explicit { values, tail }))
    }

    pub fn geometric(ratio: BigRational) -> Result<Self> {
        if !in_unit(&ratio) {
            return Err(Error::InvalidSchedule(format!(
                "geometric ratio {} must lie in (0, 1]",
                ratio
            )));
        }
        Ok(Self::from_kind(ScheduleKind::Geometric { ratio }))
    }

    pub fn one_minus_geometric(ratio: BigRational) -> Result<Self> {
        if !(ratio.is_positive() && ratio < BigRational::one()) {
            return Err(Error::InvalidSchedule(format!(
                "ratio {} must lie in (0, 1) so that 1 − q^j is nonzero",
                ratio
            )));
        }
        Ok(Self::from_kind(ScheduleKind::OneMinusGeometric { ratio }))
    }

    fn from_kind(kind: ScheduleKind) -> Self {
        let (values_f64, scalar_f64) = match &kind {
            ScheduleKind::Constant(p) => (Vec::new(), to_f64(p)),
            ScheduleKind::Explicit { values, tail } => (
                values.iter().map(to_f64).collect(),
                match tail {
                    TailRule::Constant(t) => to_f64(t),
                    _ => 0.0,
                },
            ),
            ScheduleKind::Geometric { ratio } | ScheduleKind::OneMinusGeometric { ratio } => {
                (Vec::new(), to_f64(ratio))
            }
        };
        ProbSchedule {
            kind,
            values_f64,
            scalar_f64,
        }
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    /// `p_j` exactly, `j ≥ 1`.
    pub fn p_rational(&self, j: usize) -> BigRational {
        debug_assert!(j >= 1);
        match &self.kind {
            ScheduleKind::Constant(p) => p.clone(),
            ScheduleKind::Explicit { values, tail } => {
                if j <= values.len() {
                    values[j - 1].clone()
                } else {
                    match tail {
                        TailRule::RepeatLast => values[values.len() - 1].clone(),
                        TailRule::Cycle => values[(j - 1) % values.len()].clone(),
                        TailRule::Constant(t) => t.clone(),
                    }
                }
            }
            ScheduleKind::Geometric { ratio } => num_traits::pow(ratio.clone(), j),
            ScheduleKind::OneMinusGeometric { ratio } => {
                BigRational::one() - num_traits::pow(ratio.clone(), j)
            }
        }
    }

    /// `p_j` in binary floating point, `j ≥ 1`.
    pub fn p_f64(&self, j: usize) -> f64 {
        debug_assert!(j >= 1);
        match &self.kind {
            ScheduleKind::Constant(_) => self.scalar_f64,
            ScheduleKind::Explicit { tail, .. } => {
                let v = &self.values_f64;
                if j <= v.len() {
                    v[j - 1]
                } else {
                    match tail {
                        TailRule::RepeatLast => v[v.len() - 1],
                        TailRule::Cycle => v[(j - 1) % v.len()],
                        TailRule::Constant(_) => self.scalar_f64,
                    }
                }
            }
            ScheduleKind::Geometric { .. } => powi(self.scalar_f64, j),
            ScheduleKind::OneMinusGeometric { .. } => 1.0 - powi(self.scalar_f64, j),
        }
    }

    /// `#{j : p_j < 1} = ∞`.
    pub fn infinitely_many_below_one(&self) -> bool {
        let one = BigRational::one();
        match &self.kind {
            ScheduleKind::Constant(p) => *p < one,
            ScheduleKind::Explicit { values, tail } => match tail {
                TailRule::RepeatLast => values[values.len() - 1] < one,
                TailRule::Cycle => values.iter().any(|p| *p < one),
                TailRule::Constant(t) => *t < one,
            },
            ScheduleKind::Geometric { ratio } => *ratio < one,
            ScheduleKind::OneMinusGeometric { .. } => true,
        }
    }

    /// `∏ p_j > 0`, equivalently `Σ (1 − p_j) < ∞`.
    pub fn product_positive(&self) -> bool {
        match &self.kind {
            ScheduleKind::OneMinusGeometric { .. } => true,
            _ => !self.infinitely_many_below_one(),
        }
    }

    /// `Some(p)` when every `p_j` equals `p`.
    pub fn constant_value(&self) -> Option<BigRational> {
        match &self.kind {
            ScheduleKind::Constant(p) => Some(p.clone()),
            ScheduleKind::Explicit { values, tail } => {
                let first = &values[0];
                let same = values.iter().all(|p| p == first)
                    && match tail {
                        TailRule::Constant(t) => t == first,
                        _ => true,
                    };
                same.then(|| first.clone())
            }
            ScheduleKind::Geometric { ratio } if ratio.is_one() => Some(ratio.clone()),
            _ => None,
        }
    }

    /// `Some(q)` for `p_j = q^j`.
    pub fn geometric_ratio(&self) -> Option<&BigRational> {
        match &self.kind {
            ScheduleKind::Geometric { ratio } => Some(ratio),
            _ => None,
        }
    }

    /// Eventual period `P` of the sequence (`p_{j+P} = p_j` for large `j`), when
    /// it is eventually periodic.
    pub fn eventual_period(&self) -> Option<usize> {
        match &self.kind {
            ScheduleKind::Constant(_) => Some(1),
            ScheduleKind::Explicit { values, tail } => match tail {
                TailRule::Cycle => Some(values.len()),
                _ => Some(1),
            },
            ScheduleKind::Geometric { ratio } if ratio.is_one() => Some(1),
            _ => None,
        }
    }

    /// `inf_j p_j` when strictly positive.
    pub fn min_value(&self) -> Option<f64> {
        match &self.kind {
            ScheduleKind::Constant(_) => Some(self.scalar_f64),
            ScheduleKind::Explicit { tail, .. } => {
                let m = self.values_f64.iter().copied().fold(1.0, f64::min);
                Some(match tail {
                    TailRule::Constant(_) => m.min(self.scalar_f64),
                    _ => m,
                })
            }
            ScheduleKind::Geometric { .. } => (self.scalar_f64 == 1.0).then_some(1.0),
            ScheduleKind::OneMinusGeometric { .. } => Some(1.0 - self.scalar_f64),
        }
    }

    /// `∏_{j ≤ n} p_j` in floating point.
    pub fn partial_product_f64(&self, n: usize) -> f64 {
        (1..=n).map(|j| self.p_f64(j)).product()
    }

    /// `∏_{j ≤ n} p_j` exactly.
    pub fn partial_product(&self, n: usize) -> BigRational {
        (1..=n).fold(BigRational::one(), |acc, j| acc * self.p_rational(j))
    }

    pub fn is_trivial(&self) -> bool {
        match &self.kind {
            ScheduleKind::Constant(p) => p.is_one(),
            _ => false,
        }
    }
}

fn powi(x: f64, j: usize) -> f64 {
    if j > i32::MAX as usize {
        return if x == 1.0 { 1.0 } else { 0.0 };
    }
    num_traits::Float::powi(x, j as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::ratio;

    #[test]
    fn accessors() {
        let s = ProbSchedule::explicit(
            alloc::vec![ratio(3, 10), ratio(1, 2), ratio(7, 10)],
            TailRule::Cycle,
        )
        .unwrap();
        assert_eq!(s.p_rational(4), ratio(3, 10));
        assert_eq!(s.p_rational(6), ratio(7, 10));
        assert!((s.p_f64(5) - 0.5).abs() < 1e-15);
        assert!(s.infinitely_many_below_one());
        assert!(!s.product_positive());
        assert_eq!(s.eventual_period(), Some(3));

        let g = ProbSchedule::geometric(ratio(1, 4)).unwrap();
        assert_eq!(g.p_rational(3), ratio(1, 64));
        assert_eq!(g.p_f64(2), 0.0625);
        assert!(!g.product_positive());

        let t = ProbSchedule::one_minus_geometric(ratio(1, 3)).unwrap();
        assert_eq!(t.p_rational(2), ratio(8, 9));
        assert!(t.product_positive());
        assert!(t.infinitely_many_below_one());
    }

    #[test]
    fn rejects_null_probabilities() {
        let err =
            ProbSchedule::explicit(alloc::vec![ratio(1, 2), ratio(0, 1)], TailRule::RepeatLast)
                .unwrap_err();
        assert!(matches!(err, Error::InvalidSchedule(ref m) if m.contains("p_2")));
        assert!(ProbSchedule::constant(ratio(3, 2)).is_err());
        assert!(ProbSchedule::one_minus_geometric(ratio(1, 1)).is_err());
    }

    #[test]
    fn constant_detection() {
        let s = ProbSchedule::explicit(alloc::vec![ratio(1, 2); 3], TailRule::RepeatLast).unwrap();
        assert_eq!(s.constant_value(), Some(ratio(1, 2)));
        let s = ProbSchedule::explicit(alloc::vec![ratio(1, 2)], TailRule::Constant(ratio(1, 3)))
            .unwrap();
        assert_eq!(s.constant_value(), None);
        assert_eq!(s.min_value(), Some(1.0 / 3.0));
    }
}
