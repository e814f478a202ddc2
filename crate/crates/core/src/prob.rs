//! Probability arithmetic in exact rational or binary floating-point mode.

use core::fmt::Debug;
use core::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::process::ProbSchedule;

/// Scalar type used for transition probabilities.
pub trait Probability:
    Clone + Debug + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// `p_j` of the schedule, `j ≥ 1`.
    fn from_schedule(schedule: &ProbSchedule, j: usize) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;

    fn complement(&self) -> Self {
        Self::one() - self.clone()
    }
}

impl Probability for f64 {
    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_schedule(schedule: &ProbSchedule, j: usize) -> Self {
        schedule.p_f64(j)
    }

    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Probability for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }

    fn one() -> Self {
        <BigRational as One>::one()
    }

    fn from_schedule(schedule: &ProbSchedule, j: usize) -> Self {
        schedule.p_rational(j)
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// `num / den` as an exact rational.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
