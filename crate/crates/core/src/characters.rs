//! Dirichlet characters, Gauss sums and discrete Fourier transforms.
//!
//! A character modulo `q` is stored as one exponent per generator of the
//! unit group `(Z/qZ)*`. All algebra on characters (products, conjugates,
//! parity) is integer arithmetic; values become [`Complex`] only on demand,
//! as roots of unity whose exponent has already been reduced exactly.

use std::fmt;
use std::sync::Arc;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::arith::{crt, euler_phi, factorize, gcd, lcm, multiplicative_order, primitive_root_odd_prime_power};
use crate::error::{Error, Result};
use crate::periodic::PeriodicFunction;
use crate::precision::{check_prec, Complex};

/// Generator/order decomposition of `(Z/qZ)*` with a discrete-log table.
#[derive(Clone, PartialEq, Eq)]
pub struct UnitGroupStructure {
    modulus: u64,
    generators: Vec<u64>,
    orders: Vec<u64>,
    /// `dlog[n]` = exponent vector of the unit `n`, or `None` for non-units.
    dlog: Vec<Option<Vec<u64>>>,
}

impl UnitGroupStructure {
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidModulus(q));
        }
        let mut generators = Vec::new();
        let mut orders = Vec::new();
        for (p, e) in factorize(q) {
            let m = p.pow(e);
            let rest = q / m;
            let local: Vec<(u64, u64)> = if p == 2 {
                match e {
                    1 => vec![],
                    2 => vec![(3, 2)],
                    _ => vec![(m - 1, 2), (5, m / 4)],
                }
            } else {
                vec![(primitive_root_odd_prime_power(p, e), m / p * (p - 1))]
            };
            for (g, ord) in local {
                let global = if rest == 1 { g } else { crt(g, m, 1, rest) };
                generators.push(global);
                orders.push(ord);
            }
        }

        let mut dlog = vec![None; q as usize];
        let total: u64 = orders.iter().product();
        let mut exps = vec![0u64; orders.len()];
        for _ in 0..total {
            let mut n = 1 % q;
            for (g, &x) in generators.iter().zip(&exps) {
                n = n * crate::arith::pow_mod(*g, x, q) % q;
            }
            if dlog[n as usize].is_some() {
                return Err(Error::Character(format!("generators of (Z/{q}Z)* are not independent")));
            }
            dlog[n as usize] = Some(exps.clone());
            // mixed-radix increment
            for (x, &o) in exps.iter_mut().zip(&orders) {
                *x += 1;
                if *x < o {
                    break;
                }
                *x = 0;
            }
        }
        let s = UnitGroupStructure { modulus: q, generators, orders, dlog };
        debug_assert!(s.is_valid());
        Ok(s)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    /// `φ(q)`.
    pub fn size(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Exponent of the group: every character value is an `exponent()`-th root of unity.
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |acc, &o| lcm(acc, o))
    }

    pub fn discrete_log(&self, n: i64) -> Option<&[u64]> {
        let r = n.rem_euclid(self.modulus as i64) as usize;
        self.dlog[r].as_deref()
    }

    /// Checks the structural invariants.
    pub fn is_valid(&self) -> bool {
        let q = self.modulus;
        self.size() == euler_phi(q)
            && self.generators.iter().zip(&self.orders).all(|(&g, &o)| multiplicative_order(g, q) == Some(o))
            && (0..q).all(|n| self.dlog[n as usize].is_some() == (gcd(n, q) == 1))
    }
}

impl fmt::Debug for UnitGroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnitGroupStructure")
            .field("modulus", &self.modulus)
            .field("generators", &self.generators)
            .field("orders", &self.orders)
            .finish()
    }
}

pub fn unit_group_structure(q: u64) -> Result<UnitGroupStructure> {
    UnitGroupStructure::new(q)
}

/// A Dirichlet character modulo `q`.
#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<UnitGroupStructure>,
    exponents: Vec<u64>,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.group.modulus == other.group.modulus && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

impl DirichletCharacter {
    pub fn new(group: Arc<UnitGroupStructure>, exponents: Vec<u64>) -> Result<Self> {
        if exponents.len() != group.orders.len() {
            return Err(Error::Character(format!(
                "expected {} exponents, got {}",
                group.orders.len(),
                exponents.len()
            )));
        }
        let exponents = exponents.iter().zip(&group.orders).map(|(e, o)| e % o).collect();
        Ok(DirichletCharacter { group, exponents })
    }

    pub fn trivial(group: Arc<UnitGroupStructure>) -> Self {
        let exponents = vec![0; group.orders.len()];
        DirichletCharacter { group, exponents }
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn group(&self) -> &Arc<UnitGroupStructure> {
        &self.group
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// Order `N` of the cyclic group the values live in.
    pub fn value_order(&self) -> u64 {
        self.group.exponent()
    }

    /// `t` with `χ(n) = exp(2πi t / N)`, or `None` when `gcd(n, q) > 1`.
    pub fn value_exponent(&self, n: i64) -> Option<u64> {
        let big_n = self.value_order();
        let x = self.group.discrete_log(n)?;
        let t = x
            .iter()
            .zip(&self.exponents)
            .zip(&self.group.orders)
            .fold(0u64, |acc, ((&xi, &ei), &oi)| (acc + xi * ei % oi * (big_n / oi)) % big_n);
        Some(t)
    }

    pub fn value(&self, n: i64, prec: u32) -> Complex {
        match self.value_exponent(n) {
            Some(t) => Complex::root_of_unity(t as i64, self.value_order(), prec),
            None => Complex::zero(prec),
        }
    }

    /// `χ(1), …, χ(q)`.
    pub fn values(&self, prec: u32) -> Vec<Complex> {
        (1..=self.modulus() as i64).map(|n| self.value(n, prec)).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// `χ(-1)` as `+1` or `-1`, decided in integer arithmetic.
    pub fn parity(&self) -> i8 {
        match self.value_exponent(-1) {
            Some(0) => 1,
            Some(t) => {
                debug_assert_eq!(2 * t, self.value_order());
                -1
            }
            None => unreachable!("-1 is always a unit"),
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == 1
    }

    pub fn conj(&self) -> Self {
        let exponents = self.exponents.iter().zip(&self.group.orders).map(|(&e, &o)| (o - e) % o).collect();
        DirichletCharacter { group: self.group.clone(), exponents }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.modulus(), other.modulus());
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .zip(&self.group.orders)
            .map(|((a, b), o)| (a + b) % o)
            .collect();
        DirichletCharacter { group: self.group.clone(), exponents }
    }

    /// Real (quadratic or trivial) characters take only the values 0, ±1.
    pub fn is_real(&self) -> bool {
        self == &self.conj()
    }

    /// The character as an exact periodic function, when it is real-valued.
    pub fn to_periodic(&self) -> Option<PeriodicFunction> {
        if !self.is_real() {
            return None;
        }
        let half = self.value_order() / 2;
        let vals = (1..=self.modulus() as i64)
            .map(|n| match self.value_exponent(n) {
                None => Rational::new(),
                Some(0) => Rational::from(1),
                Some(t) => {
                    debug_assert_eq!(t, half);
                    Rational::from(-1)
                }
            })
            .collect();
        PeriodicFunction::from_rationals(vals).ok()
    }

    pub fn label(&self) -> String {
        let e: Vec<String> = self.exponents.iter().map(|e| e.to_string()).collect();
        format!("χ_{}[{}]", self.modulus(), e.join(","))
    }
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// All `φ(q)` characters modulo `q` (only the even ones when `even_only`),
/// in lexicographic order of exponent vectors, trivial character first.
pub fn enumerate_characters(q: u64, even_only: bool) -> Result<Vec<DirichletCharacter>> {
    let group = Arc::new(UnitGroupStructure::new(q)?);
    Ok(characters_of(&group, even_only))
}

pub fn characters_of(group: &Arc<UnitGroupStructure>, even_only: bool) -> Vec<DirichletCharacter> {
    let orders = group.orders.clone();
    let total: u64 = orders.iter().product();
    let mut out = Vec::with_capacity(total as usize);
    let mut exps = vec![0u64; orders.len()];
    for _ in 0..total {
        let chi = DirichletCharacter { group: group.clone(), exponents: exps.clone() };
        if !even_only || chi.is_even() {
            out.push(chi);
        }
        // increment with the last generator fastest → lexicographic order
        for i in (0..exps.len()).rev() {
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
        }
    }
    out
}

/// Gauss sum `τ(χ) = Σ_{a=1}^q χ(a) ζ_q^a`, rounded to `prec` bits.
pub fn gauss_sum(chi: &DirichletCharacter, prec: u32) -> Result<Complex> {
    check_prec(prec)?;
    let q = chi.modulus();
    let n = chi.value_order();
    let m = lcm(n, q);
    let wp = prec + 16 + bit_len(q);
    let terms: Vec<Complex> = (1..=q as i64)
        .filter_map(|a| {
            let t = chi.value_exponent(a)?;
            // χ(a) ζ_q^a = exp(2πi (t/N + a/q)) with the exponent combined mod lcm(N, q)
            let j = (t * (m / n) + a as u64 * (m / q)) % m;
            Some(Complex::root_of_unity(j as i64, m, wp))
        })
        .collect();
    Ok(Complex::sum_fixed(terms.iter(), wp).with_prec(prec))
}

fn bit_len(n: u64) -> u32 {
    64 - n.leading_zeros()
}

/// Discrete Fourier coefficients `f̂(k) = (1/q) Σ_{a=1}^q f(a) ζ_q^{-ak}`, `k = 1..q`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    coeffs: Vec<Complex>,
}

impl Spectrum {
    pub fn period(&self) -> u64 {
        self.coeffs.len() as u64
    }

    /// `f̂(k)` for any integer `k` (periodic in `k`).
    pub fn coeff(&self, k: i64) -> &Complex {
        let q = self.coeffs.len() as i64;
        &self.coeffs[((k - 1).rem_euclid(q)) as usize]
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    /// `f(n) = Σ_{k=1}^q f̂(k) ζ_q^{kn}` for `n = 1..q`.
    pub fn inverse(&self) -> Vec<Complex> {
        let q = self.period();
        let prec = self.coeffs[0].prec();
        let roots = roots_table(q, prec);
        (1..=q)
            .map(|n| {
                let terms: Vec<Complex> =
                    (1..=q).map(|k| self.coeff(k as i64) * &roots[((k * n) % q) as usize]).collect();
                Complex::sum_fixed(terms.iter(), prec)
            })
            .collect()
    }
}

/// `ζ_q^j` for `j = 0..q`.
pub(crate) fn roots_table(q: u64, prec: u32) -> Vec<Complex> {
    (0..q as i64).map(|j| Complex::root_of_unity(j, q, prec)).collect()
}

/// Fourier transform of complex values `f(1..=q)`, computed at `prec` bits.
pub fn fourier_transform_values(values: &[Complex], prec: u32) -> Spectrum {
    let q = values.len() as u64;
    let wp = prec + 8 + bit_len(q);
    let roots = roots_table(q, wp);
    let coeffs = (1..=q)
        .map(|k| {
            let terms: Vec<Complex> = values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let a = i as u64 + 1;
                    let j = (q - (a * k) % q) % q;
                    v * &roots[j as usize]
                })
                .collect();
            Complex::sum_fixed(terms.iter(), wp).div_i64(q as i64).with_prec(prec)
        })
        .collect();
    Spectrum { coeffs }
}

pub fn fourier_transform(f: &PeriodicFunction, prec: u32) -> Result<Spectrum> {
    check_prec(prec)?;
    let vals: Vec<Complex> = f.reals(prec + 16).into_iter().map(Complex::from_real).collect();
    Ok(fourier_transform_values(&vals, prec))
}

/// Summary record for JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterRecord {
    pub exponents: Vec<u64>,
    pub parity: i8,
    pub trivial: bool,
    pub real: bool,
    pub gauss_sum_re: String,
    pub gauss_sum_im: String,
}

pub fn character_record(chi: &DirichletCharacter, prec: u32) -> Result<CharacterRecord> {
    let tau = gauss_sum(chi, prec + 16)?;
    let digits = crate::precision::decimal_digits(prec);
    Ok(CharacterRecord {
        exponents: chi.exponents().to_vec(),
        parity: chi.parity(),
        trivial: chi.is_trivial(),
        real: chi.is_real(),
        gauss_sum_re: tau.re().to_decimal(digits),
        gauss_sum_im: tau.im().to_decimal(digits),
    })
}

/// Orthogonality sum `Σ_a χ(a) conj(ψ(a))`.
pub fn inner_product(chi: &DirichletCharacter, psi: &DirichletCharacter, prec: u32) -> Complex {
    let q = chi.modulus() as i64;
    let terms: Vec<Complex> = (1..=q)
        .filter_map(|a| {
            let x = chi.value_exponent(a)?;
            let y = psi.value_exponent(a)?;
            let n = chi.value_order();
            Some(Complex::root_of_unity(x as i64 - y as i64, n, prec))
        })
        .collect();
    Complex::sum_fixed(terms.iter(), prec)
}

/// `|z - w| < 2^-bits` componentwise helper for tests and checks.
pub fn complex_close(z: &Complex, w: &Complex, bits: i32) -> bool {
    (z.re() - w.re()).abs_lt_pow2(-bits) && (z.im() - w.im()).abs_lt_pow2(-bits)
}
