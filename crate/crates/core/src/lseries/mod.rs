//! `L(1, f)` for periodic `f`, by three independent routes, and its
//! decomposition over `π`, `log(2 sin bπ/q)` and `log 2`.
//!
//! * **digamma**: `L(1,f) = -(1/q) Σ_{a=1}^q f(a) ψ(a/q)` with `ψ(a/q)` from
//!   Gauss's finite formula ([`digamma`]).
//! * **fourier**: `L(1,f) = -Σ_{k=1}^{q-1} f̂(k) log(1 - ζ_q^k)` with the
//!   principal logarithm of the complex number `1 - ζ_q^k`.
//! * **direct**: partial sums of `Σ f(n)/n` over whole periods plus an
//!   Abel-summation tail estimate. Double precision only; a sanity check.
//!
//! All routes require the convergence condition `Σ_{a=1}^q f(a) = 0`.

mod digamma;
mod hurwitz;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use digamma::{bernoulli_numbers, digamma, digamma_asymptotic};
pub use hurwitz::hurwitz_zeta;

use crate::arith::is_prime;
use crate::characters::{fourier_transform_values, gauss_sum, DirichletCharacter};
use crate::error::{Error, Result};
use crate::periodic::PeriodicFunction;
use crate::precision::{check_prec, decimal_digits, log_2sin, sum_fixed, Complex, Real};

/// Number of terms summed by the direct route.
pub const DIRECT_TERMS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Digamma,
    Fourier,
    Direct,
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "digamma" => Ok(Route::Digamma),
            "fourier" => Ok(Route::Fourier),
            "direct" => Ok(Route::Direct),
            other => Err(Error::Parse(format!("unknown route `{other}` (digamma, fourier, direct)"))),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Digamma => "digamma",
            Route::Fourier => "fourier",
            Route::Direct => "direct",
        })
    }
}

fn bit_len(n: u64) -> u32 {
    64 - n.leading_zeros()
}

/// Extra bits needed to absorb cancellation among terms of size `Σ|f(a)|`.
fn magnitude_bits(f: &PeriodicFunction) -> u32 {
    let total: f64 = f.reals(64).iter().map(|x| x.to_f64().abs()).sum();
    if total <= 1.0 {
        0
    } else {
        total.log2().ceil() as u32
    }
}

/// `L(1, f)` by the chosen route. The direct route's result only carries
/// double precision; see [`l1_direct`] for its error bound.
pub fn l1(f: &PeriodicFunction, route: Route, prec: u32) -> Result<Real> {
    match route {
        Route::Digamma => l1_digamma(f, prec),
        Route::Fourier => l1_fourier(f, prec),
        Route::Direct => {
            check_prec(prec)?;
            let d = l1_direct(f, DIRECT_TERMS)?;
            Ok(Real::from_float(rug::Float::with_val(64, d.value)))
        }
    }
}

/// Digamma values `ψ(a/q)` for `a = 1..q` (the last entry is `ψ(1) = -γ`).
pub fn digamma_table(q: u64, prec: u32) -> Result<Vec<Real>> {
    let mut out = Vec::with_capacity(q as usize);
    for a in 1..q {
        out.push(digamma(a, q, prec)?);
    }
    out.push(-Real::euler_gamma(prec));
    Ok(out)
}

/// `-(1/q) Σ_a f(a) ψ(a/q)` given a precomputed [`digamma_table`].
pub fn l1_from_digamma_table(f: &PeriodicFunction, table: &[Real], prec: u32) -> Real {
    let q = f.period();
    debug_assert_eq!(table.len() as u64, q);
    let terms: Vec<Real> = (1..=q as i64).zip(table).map(|(a, psi)| &f.real(a, prec) * psi).collect();
    -sum_fixed(terms.iter(), prec).div_i64(q as i64)
}

pub fn l1_digamma(f: &PeriodicFunction, prec: u32) -> Result<Real> {
    check_prec(prec)?;
    f.check_convergent(prec)?;
    let q = f.period();
    if q < 2 {
        return Ok(Real::zero(prec));
    }
    let wp = prec + 32 + magnitude_bits(f) + bit_len(q);
    let table = digamma_table(q, wp)?;
    Ok(l1_from_digamma_table(f, &table, wp).with_prec(prec))
}

pub fn l1_fourier(f: &PeriodicFunction, prec: u32) -> Result<Real> {
    check_prec(prec)?;
    f.check_convergent(prec)?;
    let q = f.period();
    let wp = prec + 32 + magnitude_bits(f) + 2 * bit_len(q);
    let values: Vec<Complex> = f.reals(wp).into_iter().map(Complex::from_real).collect();
    let z = l1_fourier_sum(&values, wp);
    // Conjugate pairs k, q-k cancel the imaginary part for real-valued f.
    if !z.im().abs_lt_pow2(-(prec as i32) + 16) {
        return Err(Error::InvariantViolation(format!(
            "fourier route left an imaginary part {} for a real function",
            z.im().to_decimal(10)
        )));
    }
    Ok(z.re().with_prec(prec))
}

/// `-Σ_{k=1}^{q-1} f̂(k) log(1 - ζ_q^k)` for complex values `f(1..=q)`.
pub fn l1_fourier_complex(values: &[Complex], prec: u32) -> Result<Complex> {
    check_prec(prec)?;
    let q = values.len() as u64;
    let wp = prec + 32 + 2 * bit_len(q);
    let values: Vec<Complex> = values.iter().map(|v| v.with_prec(wp.min(v.prec()))).collect();
    let total = Complex::sum_fixed(values.iter(), values[0].prec());
    if !(total.re().abs_lt_pow2(-(prec as i32)) && total.im().abs_lt_pow2(-(prec as i32))) {
        return Err(Error::Divergent {
            sum: format!("{} + {}i", total.re().to_decimal(20), total.im().to_decimal(20)),
        });
    }
    Ok(l1_fourier_sum(&values, wp).with_prec(prec))
}

fn l1_fourier_sum(values: &[Complex], wp: u32) -> Complex {
    let q = values.len() as u64;
    let spectrum = fourier_transform_values(values, wp);
    let one = Complex::one(wp);
    let terms: Vec<Complex> = (1..q as i64)
        .map(|k| {
            let w = &one - &Complex::root_of_unity(k, q, wp);
            spectrum.coeff(k) * &w.ln()
        })
        .collect();
    -&Complex::sum_fixed(terms.iter(), wp)
}

/// Result of the direct route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectSum {
    pub value: f64,
    /// Bound on `|value - L(1,f)|` (tail estimate plus rounding).
    pub tail_bound: f64,
    pub terms: u64,
}

/// Sums `f(n)/n` over `N ≥ terms` (a whole number of periods, so the partial
/// sum `A(N)` vanishes) and adds the Abel-summation tail
/// `∫_N^∞ A(t)/t² dt ≈ Ā/N`, where `Ā` is the mean of `A` over one period.
/// The remaining error is at most `2 q max|A| / N²`.
pub fn l1_direct(f: &PeriodicFunction, terms: u64) -> Result<DirectSum> {
    f.check_convergent(53)?;
    let q = f.period();
    let vals: Vec<f64> = f.reals(64).iter().map(Real::to_f64).collect();
    let periods = terms.div_ceil(q).max(1);
    let n_total = periods * q;

    // Neumaier-compensated sum, residue classes visited in a fixed order.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in 1..=n_total {
        let v = vals[((n - 1) % q) as usize];
        if v == 0.0 {
            continue;
        }
        let term = v / n as f64;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    let partial = sum + comp;

    let mut running = 0.0f64;
    let mut partials = Vec::with_capacity(q as usize);
    partials.push(0.0);
    for &v in &vals[..q as usize - 1] {
        running += v;
        partials.push(running);
    }
    let mean = partials.iter().sum::<f64>() / q as f64;
    let max_abs = partials.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let n = n_total as f64;
    let abs_mass: f64 = vals.iter().map(|v| v.abs()).sum();
    let rounding = 1e-15 * (1.0 + abs_mass * (1.0 + n.ln()));
    Ok(DirectSum {
        value: partial + mean / n,
        tail_bound: 2.0 * q as f64 * max_abs / (n * n) + rounding,
        terms: n_total,
    })
}

/// `L(1, χ)` for a nontrivial even character modulo an odd prime `p` via
/// `L(1,χ) = -(τ(χ)/p) Σ_{k=1}^{p-1} χ̄(k) log|1 - ζ_p^k|`.
pub fn l1_chi_via_gauss(chi: &DirichletCharacter, prec: u32) -> Result<Complex> {
    check_prec(prec)?;
    let p = chi.modulus();
    if p < 3 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    if chi.is_trivial() {
        return Err(Error::Character("the trivial character has no finite L(1, χ)".into()));
    }
    if !chi.is_even() {
        return Err(Error::Character("l1_chi_via_gauss needs an even character".into()));
    }
    let wp = prec + 32 + 2 * bit_len(p);
    let sum = character_log_sum(&chi.conj(), wp)?;
    let tau = gauss_sum(chi, wp)?;
    Ok((-&(&tau * &sum)).div_i64(p as i64).with_prec(prec))
}

/// `Σ_{k=1}^{p-1} χ(k) log|1 - ζ_p^k|`.
pub fn character_log_sum(chi: &DirichletCharacter, prec: u32) -> Result<Complex> {
    let p = chi.modulus();
    let mut terms = Vec::with_capacity(p as usize);
    for k in 1..p as i64 {
        if chi.value_exponent(k).is_some() {
            terms.push(chi.value(k, prec).scale(&log_2sin(k, p, prec)?));
        }
    }
    Ok(Complex::sum_fixed(terms.iter(), prec))
}

/// `L(1,f)` written over the basis `π`, `log(2 sin bπ/q)` (`1 ≤ b ≤ r`) and,
/// for even `q`, `log 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionVector {
    pub q: u64,
    pub pi_coeff: Real,
    /// Entry `b - 1` is the coefficient of `log(2 sin bπ/q)`.
    pub log2sin_coeffs: Vec<Real>,
    /// Zero unless `q` is even.
    pub log2_coeff: Real,
    /// `Σ_{a=1}^{q-1} f(a) cot(aπ/q)`.
    pub cot_sum: Real,
    /// Entry `b - 1` is `Σ_{a=1}^{q-1} f(a) cos(2πab/q)`.
    pub cos_sums: Vec<Real>,
    pub value: Real,
}

impl DecompositionVector {
    /// Re-evaluates the linear combination against the basis at `prec` bits.
    pub fn evaluate(&self, prec: u32) -> Result<Real> {
        let mut terms = vec![&self.pi_coeff * &Real::pi(prec)];
        for (i, c) in self.log2sin_coeffs.iter().enumerate() {
            terms.push(c * &log_2sin(i as i64 + 1, self.q, prec)?);
        }
        terms.push(&self.log2_coeff * &Real::ln2(prec));
        Ok(sum_fixed(terms.iter(), prec))
    }

    pub fn to_record(&self, target: u32) -> DecompositionRecord {
        let d = decimal_digits(target);
        DecompositionRecord {
            q: self.q,
            pi_coeff: self.pi_coeff.to_decimal(d),
            log2sin_coeffs: self.log2sin_coeffs.iter().map(|c| c.to_decimal(d)).collect(),
            log2_coeff: self.log2_coeff.to_decimal(d),
            cot_sum: self.cot_sum.to_decimal(d),
            cos_sums: self.cos_sums.iter().map(|c| c.to_decimal(d)).collect(),
            value: self.value.to_decimal(d),
            prec_bits: target,
        }
    }
}

/// JSON form of a [`DecompositionVector`]; all numbers are decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRecord {
    pub q: u64,
    pub pi_coeff: String,
    pub log2sin_coeffs: Vec<String>,
    pub log2_coeff: String,
    pub cot_sum: String,
    pub cos_sums: Vec<String>,
    pub value: String,
    pub prec_bits: u32,
}

/// Decomposes `L(1, f)`:
///
/// * `π`: `(1/2q) Σ_{a<q} f(a) cot(aπ/q)`
/// * `log(2 sin bπ/q)`: `-(2/q) Σ_{a<q} f(a) cos(2πab/q)`
/// * `log 2` (even `q`): `-(1/q) Σ_{a<q} (-1)^a f(a)`
///
/// When `f(q) ≠ 0` the term `-(f(q)/q) log q` is folded in through
/// `log q = 2 Σ_b log(2 sin bπ/q) + [q even] log 2`.
pub fn decompose_l1(f: &PeriodicFunction, prec: u32) -> Result<DecompositionVector> {
    check_prec(prec)?;
    f.check_convergent(prec)?;
    let q = f.period();
    if q < 2 {
        return Err(Error::InvalidModulus(q));
    }
    let wp = prec + 32 + magnitude_bits(f) + 2 * bit_len(q);
    let r = (q - 1) / 2;
    let qi = q as i64;
    let vals = f.reals(wp);

    let pi = Real::pi(wp);
    let cot_terms: Vec<Real> = (1..qi).map(|a| &vals[a as usize - 1] * &pi.mul_i64(a).div_i64(qi).cot()).collect();
    let cot_sum = sum_fixed(cot_terms.iter(), wp);
    let pi_coeff = cot_sum.div_i64(2 * qi);

    let f_q = &vals[q as usize - 1];
    let log_q_share = f_q.div_i64(qi);
    let mut cos_sums = Vec::with_capacity(r as usize);
    let mut log2sin_coeffs = Vec::with_capacity(r as usize);
    for b in 1..=r as i64 {
        let terms: Vec<Real> =
            (1..qi).map(|a| &vals[a as usize - 1] * Complex::root_of_unity(a * b, q, wp).re()).collect();
        let c = sum_fixed(terms.iter(), wp);
        log2sin_coeffs.push(-c.mul_i64(2).div_i64(qi) - log_q_share.mul_i64(2));
        cos_sums.push(c);
    }

    let log2_coeff = if q % 2 == 0 {
        let terms: Vec<Real> =
            (1..qi).map(|a| if a % 2 == 0 { vals[a as usize - 1].clone() } else { -&vals[a as usize - 1] }).collect();
        -sum_fixed(terms.iter(), wp).div_i64(qi) - log_q_share
    } else {
        Real::zero(wp)
    };

    let mut d =
        DecompositionVector { q, pi_coeff, log2sin_coeffs, log2_coeff, cot_sum, cos_sums, value: Real::zero(wp) };
    d.value = d.evaluate(wp)?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;

    fn close(a: &Real, b: &Real, bits: i32) -> bool {
        (a - b).abs_lt_pow2(-bits)
    }

    fn pi_over_3_sqrt3(p: u32) -> Real {
        Real::pi(p) / (Real::from_i64(3, p) * Real::from_i64(3, p).sqrt())
    }

    #[test]
    fn q3_value_all_routes() {
        let p = 128;
        let f = PeriodicFunction::from_integers(&[1, -1, 0]).unwrap();
        let expected = pi_over_3_sqrt3(p);
        let dg = l1(&f, Route::Digamma, p).unwrap();
        let fo = l1(&f, Route::Fourier, p).unwrap();
        assert!(close(&dg, &expected, 120));
        assert!(close(&fo, &expected, 120));
        assert!(dg.to_decimal(30).starts_with("0.604599788"));
        let direct = l1_direct(&f, DIRECT_TERMS).unwrap();
        assert!((direct.value - expected.to_f64()).abs() <= direct.tail_bound.max(1e-14));
    }

    #[test]
    fn quadratic_character_mod_5() {
        let p = 128;
        let f = PeriodicFunction::from_integers(&[1, -1, -1, 1, 0]).unwrap();
        let dg = l1(&f, Route::Digamma, p).unwrap();
        let fo = l1(&f, Route::Fourier, p).unwrap();
        assert!(close(&dg, &fo, 112));
        // 2 log φ / √5
        let sqrt5 = Real::from_i64(5, p).sqrt();
        let phi = (Real::one(p) + &sqrt5).div_i64(2);
        let expected = phi.ln().mul_i64(2) / sqrt5;
        assert!(close(&dg, &expected, 120));
        assert!(dg.to_decimal(30).starts_with("0.430408940"));
    }

    #[test]
    fn zero_function() {
        let f = PeriodicFunction::from_integers(&[0, 0, 0, 0]).unwrap();
        assert!(l1(&f, Route::Digamma, 64).unwrap().is_zero());
        assert!(l1(&f, Route::Fourier, 64).unwrap().abs_lt_pow2(-64));
        assert_eq!(l1_direct(&f, 1000).unwrap().value, 0.0);
    }

    #[test]
    fn divergent_input_rejected() {
        let f = PeriodicFunction::from_integers(&[1, 1, 0]).unwrap();
        for route in [Route::Digamma, Route::Fourier, Route::Direct] {
            assert!(matches!(l1(&f, route, 64), Err(Error::Divergent { .. })));
        }
        assert!(matches!(decompose_l1(&f, 64), Err(Error::Divergent { .. })));
    }

    #[test]
    fn gauss_route_mod_5_and_7() {
        let p = 128;
        let chars5 = enumerate_characters(5, true).unwrap();
        let quad = chars5.iter().find(|c| !c.is_trivial()).unwrap();
        let v = l1_chi_via_gauss(quad, p).unwrap();
        let f = quad.to_periodic().unwrap();
        let dg = l1(&f, Route::Digamma, p).unwrap();
        assert!(close(v.re(), &dg, 112));
        assert!(v.im().abs_lt_pow2(-112));

        for chi in enumerate_characters(7, true).unwrap().iter().filter(|c| !c.is_trivial()) {
            let v = l1_chi_via_gauss(chi, p).unwrap();
            let fo = l1_fourier_complex(&chi.values(p + 32), p).unwrap();
            assert!(close(v.re(), fo.re(), 112) && close(v.im(), fo.im(), 112));
            assert!(v.abs().to_f64() > 0.1);
            // consistency: result · (-p/τ) equals the conjugate-weighted log sum
            let tau = gauss_sum(chi, p + 32).unwrap();
            let back = (&v * &tau.recip()).mul_i64(-7);
            let direct = character_log_sum(&chi.conj(), p + 32).unwrap();
            assert!(close(back.re(), direct.re(), 110) && close(back.im(), direct.im(), 110));
        }
    }

    #[test]
    fn gauss_route_rejects_bad_characters() {
        let chars = enumerate_characters(7, false).unwrap();
        assert!(l1_chi_via_gauss(&chars[0], 64).is_err());
        let odd = chars.iter().find(|c| !c.is_even()).unwrap();
        assert!(l1_chi_via_gauss(odd, 64).is_err());
        let chars9 = enumerate_characters(9, true).unwrap();
        assert!(matches!(l1_chi_via_gauss(&chars9[1], 64), Err(Error::NotOddPrime(9))));
    }

    #[test]
    fn decomposition_q3_signs() {
        let p = 128;
        let f = PeriodicFunction::from_integers(&[1, -1, 0]).unwrap();
        let d = decompose_l1(&f, p).unwrap();
        let expected_pi = Real::one(p) / (Real::from_i64(3, p) * Real::from_i64(3, p).sqrt());
        assert!(close(&d.pi_coeff, &expected_pi, 120));
        assert!(!d.pi_coeff.is_sign_negative());
        assert!(d.log2sin_coeffs[0].abs_lt_pow2(-120));
        assert!(d.log2_coeff.is_zero());
        assert!(close(&d.value, &pi_over_3_sqrt3(p), 120));
    }

    #[test]
    fn decomposition_parity_structure() {
        let p = 128;
        // odd f → no log terms; even f → no π term
        let odd = PeriodicFunction::parse_csv("2,-1/3,5,-5,1/3,-2,0").unwrap();
        let d = decompose_l1(&odd, p).unwrap();
        assert!(d.log2sin_coeffs.iter().all(|c| c.abs_lt_pow2(-120)));
        let even = PeriodicFunction::parse_csv("1,-3,2,2,-3,1,0").unwrap();
        let d = decompose_l1(&even, p).unwrap();
        assert!(d.pi_coeff.abs_lt_pow2(-120));
    }

    #[test]
    fn decomposition_with_nonzero_f_q_and_even_q() {
        let p = 128;
        let f = PeriodicFunction::parse_csv("1,2,-1/2,3,-4,-3/2").unwrap();
        let d = decompose_l1(&f, p).unwrap();
        let dg = l1(&f, Route::Digamma, p).unwrap();
        assert!(close(&d.value, &dg, 112));
        assert!(!d.log2_coeff.is_zero());
    }

    #[test]
    fn route_parsing() {
        assert_eq!("fourier".parse::<Route>().unwrap(), Route::Fourier);
        assert!("pslq".parse::<Route>().is_err());
        assert_eq!(Route::Direct.to_string(), "direct");
    }
}
