//! Precision-tagged real and complex scalars on top of MPFR.
//!
//! Every analytic quantity in the crate is a [`Real`] or [`Complex`]. A value
//! carries its own precision; binary operations round to the smaller of the
//! two operand precisions, so a low-precision input can never be silently
//! promoted. Higher-level routines take a *target* precision and evaluate at
//! [`working_prec`]`(target)`, which adds [`GUARD_BITS`].

mod complex;
mod zero;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use rug::float::{Constant as MpfrConstant, Round};
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

pub use complex::Complex;
pub use zero::{classify_zero, ZeroClass, ZeroTag};

/// Smallest precision any [`Real`] may carry.
pub const MIN_PREC: u32 = 32;

/// Guard bits added on top of a caller's target precision.
pub const GUARD_BITS: u32 = 64;

/// Precision used internally for a caller target of `target` bits.
pub fn working_prec(target: u32) -> u32 {
    target + GUARD_BITS
}

pub(crate) fn check_prec(prec: u32) -> Result<()> {
    if prec < MIN_PREC {
        Err(Error::PrecisionTooLow(prec))
    } else {
        Ok(())
    }
}

/// Arbitrary-precision real number with an explicit precision in bits.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Real(Float);

impl Real {
    /// Wraps an MPFR value. Panics if its precision is below [`MIN_PREC`].
    pub fn from_float(f: Float) -> Self {
        assert!(f.prec() >= MIN_PREC, "precision below {MIN_PREC} bits");
        Real(f)
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_float(Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_float(Float::with_val(prec, v))
    }

    pub fn from_integer(v: &Integer, prec: u32) -> Self {
        Self::from_float(Float::with_val(prec, v))
    }

    pub fn from_rational(v: &Rational, prec: u32) -> Self {
        Self::from_float(Float::with_val(prec, v))
    }

    /// `num / den`, correctly rounded.
    pub fn ratio(num: i64, den: i64, prec: u32) -> Self {
        Self::from_rational(&Rational::from((num, den)), prec)
    }

    /// `2^exp` exactly.
    pub fn pow2(exp: i32, prec: u32) -> Self {
        Self::from_float(Float::with_val(prec, Float::u_exp(1, exp)))
    }

    /// Parses a decimal literal such as `"-0.25"` or `"1.5e-3"`.
    pub fn parse_decimal(s: &str, prec: u32) -> Result<Self> {
        check_prec(prec)?;
        let parsed = Float::parse(s.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(Self::from_float(Float::with_val(prec, parsed)))
    }

    pub fn pi(prec: u32) -> Self {
        Self::from_float(Float::with_val(prec, MpfrConstant::Pi))
    }

    pub fn ln2(prec: u32) -> Self {
        Self::from_float(Float::with_val(prec, MpfrConstant::Log2))
    }

    pub fn euler_gamma(prec: u32) -> Self {
        Self::from_float(Float::with_val(prec, MpfrConstant::Euler))
    }

    /// Riemann zeta at an integer `n >= 2`.
    pub fn zeta_int(n: u32, prec: u32) -> Self {
        Self::from_float(Float::with_val(prec, Float::zeta_u(n)))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    /// Rounds (or exactly widens) to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self::from_float(Float::with_val(prec, &self.0))
    }

    fn map(&self, f: impl FnOnce(&Float) -> Float) -> Self {
        Real(f(&self.0))
    }

    pub fn abs(&self) -> Self {
        self.map(|x| Float::with_val(x.prec(), x.abs_ref()))
    }

    pub fn sqrt(&self) -> Self {
        self.map(|x| Float::with_val(x.prec(), x.sqrt_ref()))
    }

    pub fn ln(&self) -> Self {
        self.map(|x| Float::with_val(x.prec(), x.ln_ref()))
    }

    pub fn exp(&self) -> Self {
        self.map(|x| Float::with_val(x.prec(), x.exp_ref()))
    }

    pub fn sin(&self) -> Self {
        self.map(|x| Float::with_val(x.prec(), x.sin_ref()))
    }

    pub fn cos(&self) -> Self {
        self.map(|x| Float::with_val(x.prec(), x.cos_ref()))
    }

    pub fn cot(&self) -> Self {
        self.map(|x| Float::with_val(x.prec(), x.cot_ref()))
    }

    pub fn recip(&self) -> Self {
        self.map(|x| Float::with_val(x.prec(), x.recip_ref()))
    }

    pub fn square(&self) -> Self {
        self.map(|x| Float::with_val(x.prec(), x.square_ref()))
    }

    /// `atan2(self, x)` with the result in `(-π, π]`.
    pub fn atan2(&self, x: &Real) -> Self {
        let p = self.prec().min(x.prec());
        Real(Float::with_val(p, self.0.atan2_ref(&x.0)))
    }

    pub fn pow(&self, e: &Real) -> Self {
        let p = self.prec().min(e.prec());
        Real(Float::with_val(p, (&self.0).pow(&e.0)))
    }

    pub fn powi(&self, e: i32) -> Self {
        self.map(|x| Float::with_val(x.prec(), x.pow(e)))
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self.map(|x| Float::with_val(x.prec(), x * k))
    }

    pub fn div_i64(&self, k: i64) -> Self {
        self.map(|x| Float::with_val(x.prec(), x / k))
    }

    pub fn mul_rational(&self, r: &Rational) -> Self {
        self.map(|x| Float::with_val(x.prec(), x * r))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    /// `floor(log2 |x|)`, or `None` for zero / non-finite values.
    pub fn log2_floor(&self) -> Option<i32> {
        if self.0.is_normal() {
            self.0.get_exp().map(|e| e - 1)
        } else {
            None
        }
    }

    /// `|self| < 2^exp`
    pub fn abs_lt_pow2(&self, exp: i32) -> bool {
        match self.log2_floor() {
            None => self.0.is_zero(),
            Some(e) => e < exp,
        }
    }

    /// `|self| > 2^exp`
    pub fn abs_gt_pow2(&self, exp: i32) -> bool {
        if !self.0.is_normal() {
            return false;
        }
        let bound = Float::with_val(MIN_PREC, Float::u_exp(1, exp));
        self.0.cmp_abs(&bound) == Some(Ordering::Greater)
    }

    /// Nearest integer.
    pub fn round_to_integer(&self) -> Option<Integer> {
        self.0.to_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Decimal string with `digits` significant digits, positional unless
    /// the exponent is extreme.
    pub fn to_decimal(&self, digits: usize) -> String {
        format_decimal(&self.0, digits.max(1))
    }

    /// Decimal string with as many digits as the precision can support.
    pub fn to_decimal_full(&self) -> String {
        self.to_decimal(decimal_digits(self.prec()))
    }

    pub fn total_cmp(&self, other: &Real) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Number of decimal digits that `bits` binary digits support.
pub fn decimal_digits(bits: u32) -> usize {
    ((bits as f64) * std::f64::consts::LOG10_2).floor().max(1.0) as usize
}

fn format_decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let (neg, mantissa, exp) = x.to_sign_string_exp_round(10, Some(digits), Round::Nearest);
    let exp = exp.unwrap_or(0);
    let mantissa = mantissa.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    // value = 0.mantissa × 10^exp
    if !(-30..=60).contains(&exp) {
        let (head, tail) = mantissa.split_at(1);
        let tail = if tail.is_empty() { "0" } else { tail };
        return format!("{sign}{head}.{tail}e{}", exp - 1);
    }
    if exp <= 0 {
        format!("{sign}0.{}{}", "0".repeat((-exp) as usize), mantissa)
    } else {
        let e = exp as usize;
        if mantissa.len() <= e {
            format!("{sign}{}{}", mantissa, "0".repeat(e - mantissa.len()))
        } else {
            format!("{sign}{}.{}", &mantissa[..e], &mantissa[e..])
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({}; {} bits)", self.to_decimal(30), self.prec())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or_else(|| decimal_digits(self.prec()));
        f.write_str(&self.to_decimal(digits))
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.prec().min(rhs.prec());
                Real(Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

real_binop!(Add, add, +);
real_binop!(Sub, sub, -);
real_binop!(Mul, mul, *);
real_binop!(Div, div, /);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(Float::with_val(self.prec(), -&self.0))
    }
}

/// Sums in a fixed left-to-right order at precision `prec`.
pub fn sum_fixed<'a, I>(terms: I, prec: u32) -> Real
where
    I: IntoIterator<Item = &'a Real>,
{
    let mut acc = Float::new(prec);
    for t in terms {
        acc += &t.0;
    }
    Real::from_float(acc)
}

/// Named mathematical constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    EulerGamma,
    Log2,
}

impl FromStr for Constant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pi" => Ok(Constant::Pi),
            "euler_gamma" | "gamma" => Ok(Constant::EulerGamma),
            "log2" | "ln2" => Ok(Constant::Log2),
            other => Err(Error::UnknownConstant(other.to_string())),
        }
    }
}

/// A constant correctly rounded to `prec` bits.
pub fn constant(c: Constant, prec: u32) -> Result<Real> {
    check_prec(prec)?;
    Ok(match c {
        Constant::Pi => Real::pi(prec),
        Constant::EulerGamma => Real::euler_gamma(prec),
        Constant::Log2 => Real::ln2(prec),
    })
}

/// Looks a constant up by name.
pub fn constant_by_name(name: &str, prec: u32) -> Result<Real> {
    constant(name.parse()?, prec)
}

/// Reduces `k` modulo `q` and folds it to `min(k, q - k)`; errors when `q | k`.
pub fn fold_residue(k: i64, q: u64) -> Result<u64> {
    if q < 2 {
        return Err(Error::InvalidModulus(q));
    }
    let r = k.rem_euclid(q as i64) as u64;
    if r == 0 {
        return Err(Error::ZeroIndex { k, q });
    }
    Ok(r.min(q - r))
}

/// `log(2 sin(kπ/q))`, computed on the folded index so that `k` and `q - k`
/// give bit-identical results.
pub fn log_2sin(k: i64, q: u64, prec: u32) -> Result<Real> {
    check_prec(prec)?;
    let k = fold_residue(k, q)?;
    // 2 sin(kπ/q) ≥ 2 sin(π/q) ≈ 2π/q, so 32 extra bits absorb the two roundings.
    let wp = prec + 32;
    let mut x = Float::with_val(wp, MpfrConstant::Pi);
    x *= k;
    x /= q;
    x.sin_mut();
    x *= 2u32;
    x.ln_mut();
    Ok(Real::from_float(Float::with_val(prec, x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_match_published_digits() {
        // Reference digits from standard tables.
        let pi = constant(Constant::Pi, 64).unwrap();
        assert!(pi.to_decimal(30).starts_with("3.14159265358979323"));
        let g = constant(Constant::EulerGamma, 64).unwrap();
        assert!(g.to_decimal(30).starts_with("0.57721566490153286"));
        let l = constant(Constant::Log2, 64).unwrap();
        assert!(l.to_decimal(30).starts_with("0.69314718055994530"));
        assert_eq!(pi.prec(), 64);
    }

    #[test]
    fn constant_errors() {
        assert!(matches!(constant_by_name("e", 64), Err(Error::UnknownConstant(_))));
        assert!(matches!(constant(Constant::Pi, 16), Err(Error::PrecisionTooLow(16))));
    }

    #[test]
    fn mixed_precision_uses_minimum() {
        let a = Real::one(64);
        let b = Real::pi(200);
        assert_eq!((&a + &b).prec(), 64);
        assert_eq!((&b * &a).prec(), 64);
        assert_eq!((b.clone() / a.clone()).prec(), 64);
    }

    #[test]
    fn log_2sin_special_values() {
        let v = log_2sin(1, 4, 128).unwrap();
        let half_log2 = Real::ln2(128).div_i64(2);
        assert!((&v - &half_log2).abs_lt_pow2(-126));
        assert!(v.to_decimal(30).starts_with("0.346573590279"));
        let z = log_2sin(1, 6, 128).unwrap();
        assert!(z.abs_lt_pow2(-126));
    }

    #[test]
    fn log_2sin_matches_cyclotomic_modulus() {
        let p = 128;
        let direct = log_2sin(2, 5, p).unwrap();
        let z = Complex::root_of_unity(2, 5, p + 32);
        let one_minus = &Complex::one(p + 32) - &z;
        let via_complex = one_minus.abs().ln().with_prec(p);
        assert!((&direct - &via_complex).abs_lt_pow2(-(p as i32) + 2));
    }

    #[test]
    fn log_2sin_rejects_multiples_of_q() {
        assert_eq!(log_2sin(0, 7, 64), Err(Error::ZeroIndex { k: 0, q: 7 }));
        assert_eq!(log_2sin(14, 7, 64), Err(Error::ZeroIndex { k: 14, q: 7 }));
        assert!(log_2sin(1, 1, 64).is_err());
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(Real::ratio(1, 4, 64).to_decimal(5), "0.25");
        assert_eq!(Real::from_i64(-1200, 64).to_decimal(6), "-1200");
        assert_eq!(Real::ratio(3, 2, 64).to_decimal(3), "1.5");
        assert_eq!(Real::zero(64).to_decimal(3), "0");
        assert_eq!(Real::pow2(-200, 64).to_decimal(3), "6.22e-61");
        let r = Real::parse_decimal("-0.015625", 64).unwrap();
        assert_eq!(r, Real::ratio(-1, 64, 64));
    }

    #[test]
    fn pow2_comparisons() {
        let x = Real::pow2(-10, 64);
        assert!(x.abs_lt_pow2(-9));
        assert!(!x.abs_lt_pow2(-10));
        assert!(x.abs_gt_pow2(-11));
        assert!(!x.abs_gt_pow2(-10));
        assert!(Real::zero(64).abs_lt_pow2(-1000));
        assert!(!Real::zero(64).abs_gt_pow2(-1000));
    }
}
