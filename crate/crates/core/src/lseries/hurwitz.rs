use rug::Float;

use crate::error::{Error, Result};
use crate::precision::{check_prec, Real};

/// Hurwitz zeta `ζ(s, x) = Σ_{n≥0} (n + x)^{-s}` for real `s > 1`, `0 < x ≤ 1`,
/// by Euler–Maclaurin summation. The truncation parameters are chosen per
/// call so that the first omitted correction term is below `2^-(prec+32)`.
pub fn hurwitz_zeta(s: &Real, x: &Real, prec: u32) -> Result<Real> {
    check_prec(prec)?;
    let one = Real::one(s.prec());
    if *s <= one {
        return Err(Error::OutOfRange(format!("hurwitz_zeta needs s > 1, got {}", s.to_decimal(20))));
    }
    if x.is_sign_negative() || x.is_zero() || *x > Real::one(x.prec()) {
        return Err(Error::OutOfRange(format!("hurwitz_zeta needs 0 < x <= 1, got {}", x.to_decimal(20))));
    }

    let goal = prec as i32 + 32;
    let wp = prec + 48;
    let s = s.with_prec(wp.max(s.prec()));
    let x = x.with_prec(wp.max(x.prec()));
    let s_f = s.to_f64();

    let terms = (wp / 6).clamp(8, 300);
    let mut n_terms = initial_shift(s_f, terms, goal);
    loop {
        let (value, first_omitted) = euler_maclaurin(&s, &x, n_terms, terms, wp);
        if first_omitted.abs_lt_pow2(-goal) {
            return Ok(value.with_prec(prec));
        }
        n_terms *= 2;
    }
}

/// Smallest shift `N` for which the estimated size of correction term
/// `M + 1` is below `2^-goal`.
fn initial_shift(s: f64, m: u32, goal: i32) -> u64 {
    let est = |n: f64| log2_correction_term(s, m + 1, n);
    let mut n = 1.0f64;
    while est(n) > -(goal as f64) - 4.0 {
        n *= 1.25;
        n = n.ceil();
    }
    n as u64
}

/// `log2 |B_{2k}/(2k)! · s(s+1)…(s+2k-2) · y^{-s-2k+1}|` using
/// `|B_{2k}|/(2k)! ≈ 2/(2π)^{2k}`.
fn log2_correction_term(s: f64, k: u32, y: f64) -> f64 {
    let two_k = 2.0 * k as f64;
    let mut rising = 0.0;
    for i in 0..(2 * k - 1) {
        rising += (s + i as f64).log2();
    }
    1.0 - two_k * (2.0 * std::f64::consts::PI).log2() + rising - (s + two_k - 1.0) * y.log2()
}

/// Returns the Euler–Maclaurin value and the magnitude of the first omitted term.
fn euler_maclaurin(s: &Real, x: &Real, n: u64, m: u32, wp: u32) -> (Real, Real) {
    let neg_s = -s;
    let mut head = Float::new(wp);
    for k in 0..n {
        let base = x + &Real::from_i64(k as i64, wp);
        head += base.pow(&neg_s).as_float();
    }
    let y = x + &Real::from_i64(n as i64, wp);
    let one = Real::one(wp);
    let y_neg_s = y.pow(&neg_s);
    // ∫_N^∞ + g(N)/2
    let integral = &(&y_neg_s * &y) / &(s - &one);
    let mut total = Real::from_float(head) + integral + y_neg_s.div_i64(2);

    // Corrections B_{2k}/(2k)! · (s)_{2k-1} · y^{-s-2k+1}
    let two_pi_sq = (Real::pi(wp).mul_i64(2)).square();
    let y_sq = y.square();
    // k = 1: (s)_1 y^{-s-1}
    let mut rising_pow = &(s * &y_neg_s) / &y;
    let mut pi_pow = two_pi_sq.clone();
    let mut omitted = Real::zero(wp);
    for k in 1..=(m + 1) {
        let zeta = Real::zeta_int(2 * k, wp);
        let mut coeff = &zeta.mul_i64(2) / &pi_pow;
        if k % 2 == 0 {
            coeff = -coeff;
        }
        let term = &coeff * &rising_pow;
        if k == m + 1 {
            omitted = term.abs();
            break;
        }
        total = total + term;
        // (s)_{2k+1} / (s)_{2k-1} = (s+2k-1)(s+2k); y^{-2}
        let a = s + &Real::from_i64(2 * k as i64 - 1, wp);
        let b = s + &Real::from_i64(2 * k as i64, wp);
        rising_pow = &(&(&rising_pow * &a) * &b) / &y_sq;
        pi_pow = &pi_pow * &two_pi_sq;
    }
    (total, omitted)
}
