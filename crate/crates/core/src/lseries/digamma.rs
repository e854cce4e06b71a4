use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::{check_prec, log_2sin, sum_fixed, Complex, Real};

fn bit_len(n: u64) -> u32 {
    64 - n.leading_zeros()
}

/// `ψ(a/q)` for `1 ≤ a < q` from Gauss's finite formula:
///
/// ```text
/// ψ(a/q) = -γ - log q - (π/2) cot(aπ/q)
///          + Σ_{b=1}^{r} cos(2πab/q) log(4 sin²(πb/q))
///          + (-1)^a log 2 · (1 + (-1)^q)/2,        r = ⌊(q-1)/2⌋
/// ```
pub fn digamma(a: u64, q: u64, prec: u32) -> Result<Real> {
    check_prec(prec)?;
    if q < 2 || a == 0 || a >= q {
        return Err(Error::OutOfRange(format!("digamma(a/q) needs 1 <= a < q, got a={a}, q={q}")));
    }
    let wp = prec + 16 + 2 * bit_len(q);
    let r = (q - 1) / 2;

    let mut terms = Vec::with_capacity(r as usize + 4);
    terms.push(-Real::euler_gamma(wp));
    terms.push(-Real::from_i64(q as i64, wp).ln());
    let angle = Real::pi(wp).mul_i64(a as i64).div_i64(q as i64);
    terms.push(-(Real::pi(wp).div_i64(2) * angle.cot()));
    for b in 1..=r {
        let cos = Complex::root_of_unity((a * b) as i64, q, wp).re().clone();
        // log(4 sin²(πb/q)) = 2 log(2 sin(πb/q))
        terms.push(cos * log_2sin(b as i64, q, wp)?.mul_i64(2));
    }
    if q % 2 == 0 {
        let l2 = Real::ln2(wp);
        terms.push(if a % 2 == 0 { l2 } else { -l2 });
    }
    Ok(sum_fixed(terms.iter(), wp).with_prec(prec))
}

/// Bernoulli numbers `B_0, …, B_n` as exact rationals (`B_1 = -1/2`).
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::from(1));
    for m in 1..=n {
        // B_m = -1/(m+1) Σ_{k<m} C(m+1, k) B_k
        let mut acc = Rational::new();
        let mut binom = Integer::from(1); // C(m+1, 0)
        for (k, bk) in b.iter().enumerate() {
            acc += Rational::from((Integer::from(&binom * bk.numer()), bk.denom().clone()));
            binom *= m + 1 - k;
            binom /= k + 1;
        }
        b.push(-acc / Rational::from(m as u64 + 1));
    }
    b
}

/// Digamma at a positive real argument by upward shifting and the
/// asymptotic series `ψ(y) ~ ln y - 1/(2y) - Σ B_{2k}/(2k y^{2k})`.
///
/// Shares no code with [`digamma`]; it exists as an independent check of
/// Gauss's formula and of the Hurwitz-zeta Laurent expansion.
pub fn digamma_asymptotic(x: &Real, prec: u32) -> Result<Real> {
    check_prec(prec)?;
    if x.is_sign_negative() || x.is_zero() {
        return Err(Error::OutOfRange("digamma_asymptotic needs x > 0".into()));
    }
    let wp = prec + 32;
    let goal = prec as f64 + 32.0;
    let m = ((prec / 8).clamp(12, 120)) as usize;
    // |B_{2m+2}|/((2m+2) y^{2m+2}) ≈ 2 (2m+1)! / (2π y)^{2m+2}
    let two_k = (2 * m + 2) as f64;
    let log2_fact: f64 = (1..=(2 * m + 1)).map(|i| (i as f64).log2()).sum();
    let log2_y = (1.0 + log2_fact + goal) / two_k - (2.0 * std::f64::consts::PI).log2();
    let y_min = 2f64.powf(log2_y).ceil().max(1.0);
    let x_f = x.to_f64();
    let shift = if x_f >= y_min { 0 } else { (y_min - x_f).ceil() as u64 };

    let x = x.with_prec(wp.max(x.prec())).with_prec(wp);
    let mut recips = Vec::with_capacity(shift as usize);
    for k in 0..shift {
        recips.push((&x + &Real::from_i64(k as i64, wp)).recip());
    }
    let y = &x + &Real::from_i64(shift as i64, wp);

    let bern = bernoulli_numbers(2 * m);
    let y_sq_inv = y.square().recip();
    let mut pow = y_sq_inv.clone();
    let mut series = Vec::with_capacity(m);
    for k in 1..=m {
        let c = bern[2 * k].clone() / (2 * k as u32);
        series.push(pow.mul_rational(&c));
        pow = &pow * &y_sq_inv;
    }
    let asym = y.ln() - y.recip().div_i64(2) - sum_fixed(series.iter(), wp);
    let shifted = sum_fixed(recips.iter(), wp);
    Ok((asym - shifted).with_prec(prec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[1], Rational::from((-1, 2)));
        assert_eq!(b[2], Rational::from((1, 6)));
        assert_eq!(b[4], Rational::from((-1, 30)));
        assert_eq!(b[3], 0);
        assert_eq!(b[12], Rational::from((-691, 2730)));
    }

    #[test]
    fn oracle_known_values() {
        let p = 128;
        // ψ(1) = -γ, ψ(1/2) = -γ - 2 log 2
        let one = digamma_asymptotic(&Real::one(p), p).unwrap();
        assert!((&one + &Real::euler_gamma(p)).abs_lt_pow2(-120));
        let half = digamma_asymptotic(&Real::ratio(1, 2, p), p).unwrap();
        let expected = -Real::euler_gamma(p) - Real::ln2(p).mul_i64(2);
        assert!((&half - &expected).abs_lt_pow2(-120));
        assert!(half.to_decimal(30).starts_with("-1.963510026"));
    }

    #[test]
    fn gauss_formula_examples() {
        let p = 128;
        let v = digamma(1, 2, p).unwrap();
        let expected = -Real::euler_gamma(p) - Real::ln2(p).mul_i64(2);
        assert!((&v - &expected).abs_lt_pow2(-120));

        let v = digamma(1, 4, p).unwrap();
        let expected = -Real::euler_gamma(p) - Real::ln2(p).mul_i64(3) - Real::pi(p).div_i64(2);
        assert!((&v - &expected).abs_lt_pow2(-120));
    }

    #[test]
    fn gauss_formula_matches_oracle() {
        let p = 128;
        for q in 2..=12u64 {
            for a in 1..q {
                let gauss = digamma(a, q, p).unwrap();
                let oracle = digamma_asymptotic(&Real::ratio(a as i64, q as i64, p + 32), p).unwrap();
                assert!((&gauss - &oracle).abs_lt_pow2(-(p as i32) + 16), "a={a} q={q}");
            }
        }
    }

    #[test]
    fn range_errors() {
        assert!(digamma(0, 5, 64).is_err());
        assert!(digamma(5, 5, 64).is_err());
        assert!(digamma(1, 1, 64).is_err());
    }
}
