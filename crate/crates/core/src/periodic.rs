//! Arithmetical functions periodic modulo `q`.

use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::{sum_fixed, Real};

#[derive(Clone, PartialEq)]
enum Values {
    Rational(Vec<Rational>),
    Real(Vec<Real>),
}

/// A function `f: Z → R` with period `q`, stored as `f(1), …, f(q)`.
///
/// Values are exact rationals (Erdős functions, characters, user input) or
/// reals at some precision (the kernel functions built in [`crate::erdos`]).
#[derive(Clone, PartialEq)]
pub struct PeriodicFunction {
    values: Values,
}

impl PeriodicFunction {
    pub fn from_rationals(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidModulus(0));
        }
        Ok(PeriodicFunction { values: Values::Rational(values) })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::from_rationals(values.iter().map(|&v| Rational::from(v)).collect())
    }

    pub fn from_reals(values: Vec<Real>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidModulus(0));
        }
        Ok(PeriodicFunction { values: Values::Real(values) })
    }

    /// Parses a comma-separated list of rational literals (`1`, `-2/3`, `0.25`).
    pub fn parse_csv(s: &str) -> Result<Self> {
        let values = s.split(',').map(|tok| parse_rational(tok.trim())).collect::<Result<Vec<_>>>()?;
        Self::from_rationals(values)
    }

    /// The function equal to 1 on residues `≡ r (mod q)` and 0 elsewhere.
    pub fn indicator(r: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidModulus(q));
        }
        let r = r.rem_euclid(q as i64) as u64;
        let vals = (1..=q).map(|n| Rational::from(i64::from(n % q == r))).collect();
        Self::from_rationals(vals)
    }

    pub fn period(&self) -> u64 {
        match &self.values {
            Values::Rational(v) => v.len() as u64,
            Values::Real(v) => v.len() as u64,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, Values::Rational(_))
    }

    fn index(&self, n: i64) -> usize {
        let q = self.period() as i64;
        // residue q is stored last
        ((n - 1).rem_euclid(q)) as usize
    }

    /// Exact value at `n`, when the function is rational-valued.
    pub fn rational(&self, n: i64) -> Option<&Rational> {
        match &self.values {
            Values::Rational(v) => Some(&v[self.index(n)]),
            Values::Real(_) => None,
        }
    }

    /// Value at `n` as a real; stored reals keep their own precision if it is lower.
    pub fn real(&self, n: i64, prec: u32) -> Real {
        match &self.values {
            Values::Rational(v) => Real::from_rational(&v[self.index(n)], prec),
            Values::Real(v) => {
                let x = &v[self.index(n)];
                if x.prec() > prec {
                    x.with_prec(prec)
                } else {
                    x.clone()
                }
            }
        }
    }

    /// `f(1), …, f(q)` as reals.
    pub fn reals(&self, prec: u32) -> Vec<Real> {
        (1..=self.period() as i64).map(|n| self.real(n, prec)).collect()
    }

    /// `Σ_{a=1}^q f(a)`, exactly when possible.
    pub fn exact_sum(&self) -> Option<Rational> {
        match &self.values {
            Values::Rational(v) => Some(v.iter().fold(Rational::new(), |acc, x| acc + x)),
            Values::Real(_) => None,
        }
    }

    pub fn sum_real(&self, prec: u32) -> Real {
        sum_fixed(self.reals(prec).iter(), prec)
    }

    /// Checks the convergence condition `Σ_{a=1}^q f(a) = 0` of `Σ f(n)/n`.
    /// Exact for rational values; for real values the sum must be below `2^-target`.
    pub fn check_convergent(&self, target: u32) -> Result<()> {
        match self.exact_sum() {
            Some(s) if s == 0 => Ok(()),
            Some(s) => Err(Error::Divergent { sum: format_rational(&s) }),
            None => {
                let s = self.sum_real(target + 64);
                if s.abs_lt_pow2(-(target as i32)) {
                    Ok(())
                } else {
                    Err(Error::Divergent { sum: s.to_decimal(20) })
                }
            }
        }
    }

    /// `f(q - n) = -f(n)` for all `n` (exact functions only).
    pub fn is_odd(&self) -> Option<bool> {
        let q = self.period() as i64;
        match &self.values {
            Values::Rational(_) => {
                Some((1..=q).all(|n| *self.rational(q - n).unwrap() == -self.rational(n).unwrap().clone()))
            }
            Values::Real(_) => None,
        }
    }

    /// `f(q - n) = f(n)` for all `n` (exact functions only).
    pub fn is_even(&self) -> Option<bool> {
        let q = self.period() as i64;
        match &self.values {
            Values::Rational(_) => Some((1..=q).all(|n| self.rational(q - n) == self.rational(n))),
            Values::Real(_) => None,
        }
    }

    /// Rational values as `"n/d"` strings, or decimal strings for real-valued functions.
    pub fn value_strings(&self, digits: usize) -> Vec<String> {
        match &self.values {
            Values::Rational(v) => v.iter().map(format_rational).collect(),
            Values::Real(v) => v.iter().map(|x| x.to_decimal(digits)).collect(),
        }
    }
}

impl fmt::Debug for PeriodicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PeriodicFunction(q={}, [{}])", self.period(), self.value_strings(12).join(", "))
    }
}

pub fn format_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"3"`, `"-2/7"` or `"0.125"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: Integer = n.trim().parse().map_err(|_| bad())?;
        let d: Integer = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::from((n, d)));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        let int_digits = if int_digits.is_empty() { "0" } else { int_digits };
        let whole: Integer = format!("{int_digits}{frac}").parse().map_err(|_| bad())?;
        let den = Integer::from(10).pow(frac.len() as u32);
        let r = Rational::from((whole, den));
        return Ok(if neg { -r } else { r });
    }
    let n: Integer = s.parse().map_err(|_| bad())?;
    Ok(Rational::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_literals() {
        let f = PeriodicFunction::parse_csv("1, -2/4, 0.25,0").unwrap();
        assert_eq!(f.period(), 4);
        assert_eq!(f.rational(2).unwrap(), &Rational::from((-1, 2)));
        assert_eq!(f.rational(3).unwrap(), &Rational::from((1, 4)));
        assert_eq!(f.exact_sum().unwrap(), Rational::from((3, 4)));
        assert!(PeriodicFunction::parse_csv("1,x").is_err());
        assert!(PeriodicFunction::parse_csv("1/0").is_err());
        assert_eq!(parse_rational("-0.5").unwrap(), Rational::from((-1, 2)));
    }

    #[test]
    fn periodic_indexing() {
        let f = PeriodicFunction::from_integers(&[1, -1, 0]).unwrap();
        assert_eq!(f.rational(4), f.rational(1));
        assert_eq!(f.rational(0), f.rational(3));
        assert_eq!(f.rational(-1), f.rational(2));
    }

    #[test]
    fn convergence_condition() {
        let f = PeriodicFunction::from_integers(&[1, 1, 0]).unwrap();
        assert_eq!(f.check_convergent(128), Err(Error::Divergent { sum: "2".into() }));
        let g = PeriodicFunction::from_integers(&[1, -1, 0]).unwrap();
        assert!(g.check_convergent(128).is_ok());
        assert_eq!(g.is_odd(), Some(true));
        assert_eq!(g.is_even(), Some(false));
    }

    #[test]
    fn indicator_function() {
        let f = PeriodicFunction::indicator(1, 5).unwrap();
        assert_eq!(f.value_strings(5), vec!["1", "0", "0", "0", "0"]);
        let g = PeriodicFunction::indicator(0, 3).unwrap();
        assert_eq!(g.value_strings(5), vec!["0", "0", "1"]);
    }
}
