//! Exact exponent algebra for the moment-growth and tail families.
//!
//! Two families close the moment <-> tail conversion loop:
//!
//! - power-log moment growth p^(1/m) (ln p)^r, equivalent to tails
//!   exp(-C x^m (log x)^(-m r));
//! - exp-beta growth exp(C p^beta), equivalent to tails
//!   exp(-C [ln(1 + x)]^(1 + 1/beta)), which holds even without any
//!   exponential moment.
//!
//! Passing to the normalized U-statistic multiplies the growth by
//! (p / ln p)^d, and the resulting exponents are tracked in exact rational
//! arithmetic: m maps to m / (1 + d m) and the log exponent shifts by -d,
//! while the exp-beta family is closed under the map.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Exact rational with i64 components, normalized (positive denominator,
/// reduced).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: i64,
    den: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl Ratio {
    pub const ZERO: Ratio = Ratio { num: 0, den: 1 };
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };

    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den);
        Ratio {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn integer(n: i64) -> Self {
        Ratio { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn recip(&self) -> Self {
        assert!(self.num != 0, "reciprocal of zero");
        Ratio::new(self.den, self.num)
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Add for Ratio {
    type Output = Ratio;
    fn add(self, rhs: Ratio) -> Ratio {
        Ratio::new(self.num * rhs.den + rhs.num * self.den, self.den * rhs.den)
    }
}

impl Sub for Ratio {
    type Output = Ratio;
    fn sub(self, rhs: Ratio) -> Ratio {
        self + (-rhs)
    }
}

impl Mul for Ratio {
    type Output = Ratio;
    fn mul(self, rhs: Ratio) -> Ratio {
        Ratio::new(self.num * rhs.num, self.den * rhs.den)
    }
}

impl Div for Ratio {
    type Output = Ratio;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Ratio) -> Ratio {
        self * rhs.recip()
    }
}

impl Neg for Ratio {
    type Output = Ratio;
    fn neg(self) -> Ratio {
        Ratio {
            num: -self.num,
            den: self.den,
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Moment-growth family, constants suppressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentGrowth {
    /// |zeta|_p <= C p^(1/power) (ln p)^log_power.
    PowerLog { power: Ratio, log_power: Ratio },
    /// |zeta|_p <= exp(C p^beta).
    ExpBeta { beta: Ratio },
}

/// Tail-decay family, constants suppressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailShape {
    /// T(x) <= exp(-C x^power (log x)^log_power), x > e.
    WeibullLog { power: Ratio, log_power: Ratio },
    /// T(x) <= exp(-C [ln(1 + x)]^exponent), x >= 0.
    LogPower { exponent: Ratio },
}

/// Moment growth to the equivalent tail decay.
pub fn moment_to_tail(growth: MomentGrowth) -> Result<TailShape> {
    match growth {
        MomentGrowth::PowerLog { power: m, log_power: r } => {
            if !m.is_positive() {
                return Err(Error::Param(format!("power must be positive, got {m}")));
            }
            Ok(TailShape::WeibullLog {
                power: m,
                log_power: -(m * r),
            })
        }
        MomentGrowth::ExpBeta { beta } => {
            if !beta.is_positive() {
                return Err(Error::Param(format!("beta must be positive, got {beta}")));
            }
            Ok(TailShape::LogPower {
                exponent: Ratio::ONE + beta.recip(),
            })
        }
    }
}

/// Tail decay back to the equivalent moment growth.
pub fn tail_to_moment(shape: TailShape) -> Result<MomentGrowth> {
    match shape {
        TailShape::WeibullLog { power: m, log_power } => {
            if !m.is_positive() {
                return Err(Error::Param(format!("power must be positive, got {m}")));
            }
            Ok(MomentGrowth::PowerLog {
                power: m,
                log_power: -(log_power / m),
            })
        }
        TailShape::LogPower { exponent } => {
            let shifted = exponent - Ratio::ONE;
            if !shifted.is_positive() {
                return Err(Error::Param(format!(
                    "log-power exponent must exceed 1, got {exponent}"
                )));
            }
            Ok(MomentGrowth::ExpBeta {
                beta: shifted.recip(),
            })
        }
    }
}

/// The kernel-to-U-statistic composition: multiplying the growth by
/// (p / ln p)^d maps (m, r) to (m / (1 + d m), r - d) and leaves the
/// exp-beta family untouched.
pub fn ustat_compose(growth: MomentGrowth, d: u32) -> MomentGrowth {
    let d = Ratio::integer(d as i64);
    match growth {
        MomentGrowth::PowerLog { power: m, log_power: r } => MomentGrowth::PowerLog {
            power: m / (Ratio::ONE + d * m),
            log_power: r - d,
        },
        MomentGrowth::ExpBeta { beta } => MomentGrowth::ExpBeta { beta },
    }
}

/// Kernel tail shape to the tail shape of the normalized U-statistic.
pub fn ustat_tail(shape: TailShape, d: u32) -> Result<TailShape> {
    moment_to_tail(ustat_compose(tail_to_moment(shape)?, d))
}
