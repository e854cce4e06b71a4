use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::Constant as MpfrConstant;
use rug::Float;

use super::Real;

/// Complex number whose two components share one precision.
#[derive(Clone, PartialEq)]
pub struct Complex {
    re: Real,
    im: Real,
}

impl Complex {
    /// Builds a complex number; both parts are rounded to the smaller precision.
    pub fn new(re: Real, im: Real) -> Self {
        let p = re.prec().min(im.prec());
        let re = if re.prec() == p { re } else { re.with_prec(p) };
        let im = if im.prec() == p { im } else { im.with_prec(p) };
        Complex { re, im }
    }

    pub fn from_real(re: Real) -> Self {
        let p = re.prec();
        Complex { re, im: Real::zero(p) }
    }

    pub fn zero(prec: u32) -> Self {
        Complex { re: Real::zero(prec), im: Real::zero(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Complex { re: Real::one(prec), im: Real::zero(prec) }
    }

    /// `exp(2πi·j/n)`. The exponent is reduced mod `n` in exact integer
    /// arithmetic before any rounding happens.
    pub fn root_of_unity(j: i64, n: u64, prec: u32) -> Self {
        assert!(n > 0, "order of a root of unity must be positive");
        let j = j.rem_euclid(n as i64) as u64;
        if j == 0 {
            return Self::one(prec);
        }
        if 2 * j == n {
            return Complex::from_real(Real::from_i64(-1, prec));
        }
        if 4 * j == n {
            return Complex { re: Real::zero(prec), im: Real::one(prec) };
        }
        if 4 * j == 3 * n {
            return Complex { re: Real::zero(prec), im: Real::from_i64(-1, prec) };
        }
        let wp = prec + 16;
        let mut theta = Float::with_val(wp, MpfrConstant::Pi);
        theta *= 2 * j;
        theta /= n;
        let (s, c) = theta.sin_cos(Float::new(wp));
        Complex { re: Real::from_float(Float::with_val(prec, c)), im: Real::from_float(Float::with_val(prec, s)) }
    }

    pub fn re(&self) -> &Real {
        &self.re
    }

    pub fn im(&self) -> &Real {
        &self.im
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Complex { re: self.re.with_prec(prec), im: self.im.with_prec(prec) }
    }

    pub fn conj(&self) -> Self {
        Complex { re: self.re.clone(), im: -&self.im }
    }

    pub fn scale(&self, k: &Real) -> Self {
        Complex::new(&self.re * k, &self.im * k)
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        Complex { re: self.re.mul_i64(k), im: self.im.mul_i64(k) }
    }

    pub fn div_i64(&self, k: i64) -> Self {
        Complex { re: self.re.div_i64(k), im: self.im.div_i64(k) }
    }

    pub fn norm_sqr(&self) -> Real {
        self.re.square() + self.im.square()
    }

    pub fn abs(&self) -> Real {
        let p = self.prec();
        Real::from_float(Float::with_val(p, self.re.as_float().hypot_ref(self.im.as_float())))
    }

    /// Principal argument in `(-π, π]`.
    pub fn arg(&self) -> Real {
        self.im.atan2(&self.re)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Complex {
        Complex { re: self.abs().ln(), im: self.arg() }
    }

    pub fn recip(&self) -> Complex {
        let n = self.norm_sqr();
        Complex::new(&self.re / &n, -(&self.im / &n))
    }

    pub fn div(&self, other: &Complex) -> Complex {
        self * &other.recip()
    }

    /// Sum in fixed order at precision `prec`.
    pub fn sum_fixed<'a, I>(terms: I, prec: u32) -> Complex
    where
        I: IntoIterator<Item = &'a Complex>,
    {
        let mut re = Float::new(prec);
        let mut im = Float::new(prec);
        for t in terms {
            re += t.re.as_float();
            im += t.im.as_float();
        }
        Complex { re: Real::from_float(re), im: Real::from_float(im) }
    }
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Complex({} + {}i; {} bits)", self.re.to_decimal(25), self.im.to_decimal(25), self.prec())
    }
}

impl Add<&Complex> for &Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        Complex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&Complex> for &Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        Complex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&Complex> for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        Complex::new(re, im)
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex { re: -&self.re, im: -&self.im }
    }
}
