//! Scalar abstraction over double precision and arbitrary-precision binary floats.
//!
//! Closed-form constants and escalated predicates are written once against
//! [`Real`] and evaluated either as `f64` or as [`Hp`] with a compile-time
//! mantissa width.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

pub trait Real:
    Clone
    + fmt::Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// Approximate number of significant decimal digits carried.
    const DIGITS: u32;

    fn from_i64(n: i64) -> Self;
    fn from_f64(x: f64) -> Self;
    /// Parses a plain decimal literal such as `-0.125` or `3e-2`.
    fn from_decimal(s: &str) -> Option<Self>;
    fn pi() -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn tan(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    fn to_f64(&self) -> f64;

    fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_i64(p) / Self::from_i64(q)
    }

    /// `π·p/q`
    fn pi_ratio(p: i64, q: i64) -> Self {
        Self::pi() * Self::from_i64(p) / Self::from_i64(q)
    }

    fn recip(&self) -> Self {
        Self::from_i64(1) / self.clone()
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    fn cot(&self) -> Self {
        self.cos() / self.sin()
    }

    fn is_zero(&self) -> bool {
        self.abs() <= Self::from_i64(0)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }
}

impl Real for f64 {
    const DIGITS: u32 = 15;

    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_decimal(s: &str) -> Option<Self> {
        s.trim().parse::<f64>().ok().filter(|x| x.is_finite())
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn tan(&self) -> Self {
        f64::tan(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Binary float with a `BITS`-bit mantissa.
#[derive(Clone)]
pub struct Hp<const BITS: usize>(BigFloat);

/// About 38 significant decimal digits.
pub type Hp128 = Hp<128>;
/// About 57 significant decimal digits; the default escalation target.
pub type Hp192 = Hp<192>;
pub type Hp256 = Hp<256>;

/// Mantissa widths available at run time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Width {
    W128,
    W192,
    W256,
}

impl Width {
    /// Narrowest width carrying at least `digits` decimal digits.
    pub fn for_digits(digits: u32) -> Option<Width> {
        match digits {
            d if d <= Hp128::DIGITS => Some(Width::W128),
            d if d <= Hp192::DIGITS => Some(Width::W192),
            d if d <= Hp256::DIGITS => Some(Width::W256),
            _ => None,
        }
    }

    pub fn digits(self) -> u32 {
        match self {
            Width::W128 => Hp128::DIGITS,
            Width::W192 => Hp192::DIGITS,
            Width::W256 => Hp256::DIGITS,
        }
    }
}

/// Evaluates `$body` with the type alias `$t` bound to the chosen width.
macro_rules! at_width {
    ($w:expr, $t:ident => $body:expr) => {
        match $w {
            $crate::real::Width::W128 => {
                type $t = $crate::real::Hp128;
                $body
            }
            $crate::real::Width::W192 => {
                type $t = $crate::real::Hp192;
                $body
            }
            $crate::real::Width::W256 => {
                type $t = $crate::real::Hp256;
                $body
            }
        }
    };
}
pub(crate) use at_width;

impl<const BITS: usize> Hp<BITS> {
    pub fn inner(&self) -> &BigFloat {
        &self.0
    }

    /// Decimal rendering with every carried digit.
    pub fn to_decimal_string(&self) -> String {
        with_consts(|cc| self.0.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into())
    }
}

impl<const BITS: usize> fmt::Debug for Hp<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const BITS: usize> fmt::Display for Hp<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const BITS: usize> PartialEq for Hp<BITS> {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl<const BITS: usize> PartialOrd for Hp<BITS> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|s| s.cmp(&0))
    }
}

macro_rules! hp_binop {
    ($tr:ident, $m:ident) => {
        impl<const BITS: usize> $tr for Hp<BITS> {
            type Output = Self;
            fn $m(self, rhs: Self) -> Self {
                Hp(self.0.$m(&rhs.0, BITS, RM))
            }
        }
    };
}
hp_binop!(Add, add);
hp_binop!(Sub, sub);
hp_binop!(Mul, mul);
hp_binop!(Div, div);

impl<const BITS: usize> Neg for Hp<BITS> {
    type Output = Self;
    fn neg(self) -> Self {
        Hp(self.0.neg())
    }
}

impl<const BITS: usize> Real for Hp<BITS> {
    const DIGITS: u32 = (BITS as f64 * std::f64::consts::LOG10_2) as u32 - 1;

    fn from_i64(n: i64) -> Self {
        Hp(BigFloat::from_i64(n, BITS))
    }
    fn from_f64(x: f64) -> Self {
        Hp(BigFloat::from_f64(x, BITS))
    }
    fn from_decimal(s: &str) -> Option<Self> {
        let s = s.trim();
        s.parse::<f64>().ok().filter(|x| x.is_finite())?;
        let v = with_consts(|cc| BigFloat::parse(s, Radix::Dec, BITS, RM, cc));
        (!v.is_nan()).then_some(Hp(v))
    }
    fn pi() -> Self {
        Hp(with_consts(|cc| cc.pi(BITS, RM)))
    }
    fn sin(&self) -> Self {
        Hp(with_consts(|cc| self.0.sin(BITS, RM, cc)))
    }
    fn cos(&self) -> Self {
        Hp(with_consts(|cc| self.0.cos(BITS, RM, cc)))
    }
    fn tan(&self) -> Self {
        Hp(with_consts(|cc| self.0.tan(BITS, RM, cc)))
    }
    fn sqrt(&self) -> Self {
        Hp(self.0.sqrt(BITS, RM))
    }
    fn abs(&self) -> Self {
        Hp(self.0.abs())
    }
    fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        format!("{}", self.0).parse().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hp_pi_matches_double() {
        assert_eq!(Hp192::pi().to_f64(), std::f64::consts::PI);
    }

    #[test]
    fn hp_carries_more_digits() {
        let third = Hp192::from_ratio(1, 3);
        let err = (third * Hp192::from_i64(3) - Hp192::from_i64(1)).abs();
        assert!(err < Hp192::from_decimal("1e-55").unwrap());
        assert!(Hp192::DIGITS >= 50);
    }

    #[test]
    fn decimal_parse_rejects_garbage() {
        assert!(Hp128::from_decimal("abc").is_none());
        assert_eq!(Hp128::from_decimal("0.25").unwrap().to_f64(), 0.25);
        assert_eq!(f64::from_decimal("-1.5"), Some(-1.5));
    }
}
