//! Integer relations among reals by lattice reduction.
//!
//! Values `x_1..x_n` give the lattice spanned by the rows of `[I | round(C·x)]`
//! with `C = 2^(prec-16)`. A relation `c` with small coefficients is a short
//! vector `(c, Σ c_i round(C x_i))`; everything else has a last coordinate of
//! order `C`. The reduction is the integral LLL variant, so all Gram-Schmidt
//! data are exact integers.

use rug::float::Round;
use rug::ops::DivRounding;
use rug::{Float, Integer};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::precision::{decimal_digits, sum_fixed, working_prec, Real};
use crate::relations::{canonical_coeffs, verify_relation, LogBasis, Provenance, RelationVector, Slot};

/// Longest value list accepted by [`find_integer_relation`].
pub const MAX_VALUES: usize = 24;

/// Lovász constant `δ = 99/100`.
pub const DELTA: (u32, u32) = (99, 100);

/// Bits by which the value column's scale falls short of the target.
pub const SCALE_SLACK: u32 = 16;

/// LLL-reduces the rows of `basis` in place (rows must be linearly
/// independent). Returns `‖b*_i‖²` as exact ratios `d_i / d_{i-1}`.
pub fn lll_reduce(basis: &mut [Vec<Integer>], delta: (u32, u32)) -> Result<Vec<(Integer, Integer)>> {
    let n = basis.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let dot = |a: &[Integer], b: &[Integer]| -> Integer {
        let mut s = Integer::new();
        for (x, y) in a.iter().zip(b) {
            s += x * y;
        }
        s
    };
    // 1-indexed bookkeeping as in the textbook algorithm.
    let mut d = vec![Integer::from(1); n + 1];
    let mut lam = vec![vec![Integer::new(); n + 1]; n + 1];
    let b = basis;
    d[1] = dot(&b[0], &b[0]);
    if d[1] == 0 {
        return Err(Error::InvariantViolation("lattice basis has a zero row".into()));
    }
    let (dp, dq) = (delta.0, delta.1);

    fn red(b: &mut [Vec<Integer>], lam: &mut [Vec<Integer>], d: &[Integer], k: usize, l: usize) {
        let two_lam = Integer::from(&lam[k][l] * 2);
        if two_lam.cmp_abs(&d[l]) == std::cmp::Ordering::Greater {
            // nearest integer to λ/d
            let q = (Integer::from(&two_lam + &d[l])).div_floor(Integer::from(&d[l] * 2));
            let (lo, hi) = b.split_at_mut(k - 1);
            for (x, y) in hi[0].iter_mut().zip(&lo[l - 1]) {
                *x -= Integer::from(&q * y);
            }
            lam[k][l] -= Integer::from(&q * &d[l]);
            for i in 1..l {
                let t = Integer::from(&q * &lam[l][i]);
                lam[k][i] -= t;
            }
        }
    }

    let mut k = 2;
    let mut kmax = 1;
    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = dot(&b[k - 1], &b[j - 1]);
                for i in 1..j {
                    u = (Integer::from(&d[i] * &u) - Integer::from(&lam[k][i] * &lam[j][i])) / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if u == 0 {
                        return Err(Error::InvariantViolation("lattice basis rows are dependent".into()));
                    }
                    d[k] = u;
                }
            }
        }
        loop {
            red(b, &mut lam, &d, k, k - 1);
            // Lovász: δ d_{k-1}² ≤ d_k d_{k-2} + λ²
            let lhs = Integer::from(&d[k] * &d[k - 2]) * dq + Integer::from(lam[k][k - 1].square_ref()) * dq;
            let rhs = Integer::from(d[k - 1].square_ref()) * dp;
            if lhs < rhs {
                b.swap(k - 1, k - 2);
                for j in 1..k - 1 {
                    let t = std::mem::take(&mut lam[k][j]);
                    lam[k][j] = std::mem::replace(&mut lam[k - 1][j], t);
                }
                let l = lam[k][k - 1].clone();
                let big_b = (Integer::from(&d[k - 2] * &d[k]) + Integer::from(l.square_ref())) / &d[k - 1];
                for i in k + 1..=kmax {
                    let t = lam[i][k].clone();
                    lam[i][k] = (Integer::from(&d[k] * &lam[i][k - 1]) - Integer::from(&l * &t)) / &d[k - 1];
                    lam[i][k - 1] = (Integer::from(&big_b * &t) + Integer::from(&l * &lam[i][k])) / &d[k];
                }
                d[k - 1] = big_b;
                if k > 2 {
                    k -= 1;
                }
            } else {
                for l in (1..k - 1).rev() {
                    red(b, &mut lam, &d, k, l);
                }
                k += 1;
                break;
            }
        }
    }
    Ok((1..=n).map(|i| (d[i].clone(), d[i - 1].clone())).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Found,
    /// No relation surfaced. Evidence only: see `excluded_bound`.
    NoneBelowBound,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Found => "Found",
            Verdict::NoneBelowBound => "NoneBelowBound",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RelationSearchResult {
    pub verdict: Verdict,
    pub found: Option<Vec<i64>>,
    /// `|Σ c_i x_i|` for the reported vector (zero when none is reported).
    pub residual: Real,
    pub coeff_bound: u64,
    pub prec: u32,
    /// Lower bound on the norm of every nonzero lattice vector.
    pub norm_lower_bound: f64,
    /// Every relation with all `|c_i|` up to this value would have shown up
    /// as a lattice vector shorter than `norm_lower_bound`.
    pub excluded_bound: f64,
    pub basis: Option<LogBasis>,
}

impl RelationSearchResult {
    /// True when the search rules out every relation within `coeff_bound`.
    pub fn bound_certified(&self) -> bool {
        self.verdict == Verdict::NoneBelowBound && self.excluded_bound >= self.coeff_bound as f64
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("verdict".into(), json!(self.verdict.as_str()));
        m.insert("found".into(), self.found.as_ref().map_or(Value::Null, |c| json!(c)));
        m.insert("residual".into(), json!(self.residual.to_decimal(20)));
        m.insert("coeff_bound".into(), json!(self.coeff_bound));
        m.insert("prec_bits".into(), json!(self.prec));
        m.insert("norm_lower_bound".into(), json!(format!("{:e}", self.norm_lower_bound)));
        m.insert("excluded_bound".into(), json!(format!("{:e}", self.excluded_bound)));
        m.insert("bound_certified".into(), json!(self.bound_certified()));
        if let Some(b) = &self.basis {
            m.insert("q".into(), json!(b.q()));
            m.insert("basis".into(), json!(b.slots().iter().map(Slot::key).collect::<Vec<_>>()));
        }
        Value::Object(m)
    }
}

fn bit_len(n: u64) -> u32 {
    64 - n.leading_zeros()
}

/// Searches for `c ≠ 0`, `max |c_i| ≤ coeff_bound`, with `Σ c_i x_i = 0` at
/// `prec` bits. The values must carry at least `prec + 64` bits.
pub fn find_integer_relation(values: &[Real], coeff_bound: u64, prec: u32) -> Result<RelationSearchResult> {
    let n = values.len();
    if !(2..=MAX_VALUES).contains(&n) {
        return Err(Error::OutOfRange(format!("integer relation search needs 2..={MAX_VALUES} values, got {n}")));
    }
    if prec <= SCALE_SLACK + 16 {
        return Err(Error::PrecisionTooLow(prec));
    }
    if let Some(v) = values.iter().find(|v| v.prec() < working_prec(prec)) {
        return Err(Error::PrecisionTooLow(v.prec()));
    }
    // bound² · 2^-prec must stay below 2^-32.
    if coeff_bound == 0 || 2 * bit_len(coeff_bound) as i64 - prec as i64 > -32 {
        return Err(Error::BoundTooLarge { bound: coeff_bound.to_string(), prec });
    }

    let scale_exp = (prec - SCALE_SLACK) as i32;
    let mut rows: Vec<Vec<Integer>> = values
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let mut row = vec![Integer::new(); n + 1];
            row[i] = Integer::from(1);
            let scaled = Float::with_val(x.prec(), x.as_float() << scale_exp);
            row[n] = scaled.to_integer_round(Round::Nearest).expect("finite value").0;
            row
        })
        .collect();
    let gs = lll_reduce(&mut rows, DELTA)?;

    let min_gs_sq = gs
        .iter()
        .map(|(num, den)| Float::with_val(64, num) / Float::with_val(64, den))
        .fold(f64::INFINITY, |m, v| m.min(v.to_f64()));
    let norm_lower_bound = min_gs_sq.sqrt();
    // A relation with |c_i| ≤ B maps to a vector of norm ≤ B·sqrt(n + n²/4).
    let nf = n as f64;
    let excluded_bound = norm_lower_bound / (nf + nf * nf / 4.0).sqrt();

    let wp = values.iter().map(Real::prec).min().expect("nonempty");
    for row in &rows {
        let c: Vec<Integer> = row[..n].to_vec();
        if c.iter().all(|x| *x == 0) {
            continue;
        }
        if c.iter().any(|x| *x.as_abs() > coeff_bound) {
            continue;
        }
        let c: Vec<i64> = c.iter().map(|x| x.to_i64().expect("bounded")).collect();
        let terms: Vec<Real> = values.iter().zip(&c).map(|(x, &k)| x.mul_i64(k)).collect();
        let residual = sum_fixed(terms.iter(), wp).abs();
        if residual.abs_lt_pow2(-(prec as i32)) {
            let sign = if c.iter().find(|&&x| x != 0).copied().unwrap_or(1) < 0 { -1 } else { 1 };
            return Ok(RelationSearchResult {
                verdict: Verdict::Found,
                found: Some(c.iter().map(|x| x * sign).collect()),
                residual,
                coeff_bound,
                prec,
                norm_lower_bound,
                excluded_bound,
                basis: None,
            });
        }
    }
    Ok(RelationSearchResult {
        verdict: Verdict::NoneBelowBound,
        found: None,
        residual: Real::zero(wp),
        coeff_bound,
        prec,
        norm_lower_bound,
        excluded_bound,
        basis: None,
    })
}

/// [`find_integer_relation`] over the slots of the basis for `q`.
pub fn search_basis(basis: &LogBasis, coeff_bound: u64, prec: u32) -> Result<RelationSearchResult> {
    let values = basis.values(working_prec(prec))?;
    let mut r = find_integer_relation(&values, coeff_bound, prec)?;
    r.basis = Some(basis.clone());
    Ok(r)
}

#[derive(Debug, Clone)]
pub struct LatticeRank {
    pub q: u64,
    pub rank: usize,
    /// Canonical, linearly independent relations over the full basis.
    pub generators: Vec<RelationVector>,
    /// Relations found with a nonzero `π` coefficient (expected empty).
    pub pi_violations: Vec<RelationVector>,
    /// The final search, which found nothing.
    pub last: RelationSearchResult,
    pub coeff_bound: u64,
    pub prec: u32,
}

/// Finds relations one at a time; after each, one slot carrying a nonzero
/// coefficient is dropped, so later relations are independent of earlier
/// ones. Stops at the first `NoneBelowBound`.
pub fn relation_lattice_rank(q: u64, coeff_bound: u64, prec: u32) -> Result<LatticeRank> {
    let basis = LogBasis::new(q)?;
    let values = basis.values(working_prec(prec))?;
    let mut active: Vec<usize> = (0..basis.len()).collect();
    let mut generators = Vec::new();
    let mut pi_violations = Vec::new();
    let pi_index = basis.index_of(Slot::Pi).expect("basis has a pi slot");
    loop {
        let last = if active.len() < 2 {
            None
        } else {
            let sub: Vec<Real> = active.iter().map(|&i| values[i].clone()).collect();
            Some(find_integer_relation(&sub, coeff_bound, prec)?)
        };
        let found = last.as_ref().and_then(|r| r.found.clone());
        let Some(c) = found else {
            let last = last.unwrap_or(RelationSearchResult {
                verdict: Verdict::NoneBelowBound,
                found: None,
                residual: Real::zero(working_prec(prec)),
                coeff_bound,
                prec,
                norm_lower_bound: f64::INFINITY,
                excluded_bound: f64::INFINITY,
                basis: None,
            });
            let mut last = last;
            last.basis = Some(basis.clone());
            return Ok(LatticeRank { q, rank: generators.len(), generators, pi_violations, last, coeff_bound, prec });
        };
        let mut full = vec![0i64; basis.len()];
        for (&slot, &k) in active.iter().zip(&c) {
            full[slot] = k;
        }
        let rel = RelationVector::from_integers(basis.clone(), &full, Provenance::Search)?;
        let class = verify_relation(&rel, prec);
        let recheck = rel.evaluate(2 * working_prec(prec))?;
        if !class.is_zero() || !recheck.abs_lt_pow2(-(prec as i32)) {
            return Err(Error::InvariantViolation(format!(
                "search relation {full:?} for q = {q} fails re-verification"
            )));
        }
        if full[pi_index] != 0 {
            pi_violations.push(rel.clone());
        }
        // Drop the last active slot carrying a coefficient of smallest magnitude.
        let pos = (0..active.len())
            .filter(|&i| c[i] != 0)
            .min_by_key(|&i| (c[i].unsigned_abs(), std::cmp::Reverse(i)))
            .expect("relation is nonzero");
        active.remove(pos);
        generators.push(RelationVector::new(basis.clone(), canonical_coeffs(rel.coeffs()), Provenance::Search)?);
    }
}

impl LatticeRank {
    pub fn to_json(&self) -> Value {
        let coeffs = |r: &RelationVector| json!(r.integer_coeffs().expect("integral relation"));
        let mut m = Map::new();
        m.insert("q".into(), json!(self.q));
        m.insert("rank".into(), json!(self.rank));
        m.insert(
            "basis".into(),
            json!(self.last.basis.as_ref().map(|b| b.slots().iter().map(Slot::key).collect::<Vec<_>>())),
        );
        m.insert("generators".into(), Value::Array(self.generators.iter().map(coeffs).collect()));
        m.insert("pi_violations".into(), Value::Array(self.pi_violations.iter().map(coeffs).collect()));
        m.insert("final_search".into(), self.last.to_json());
        m.insert("coeff_bound".into(), json!(self.coeff_bound));
        m.insert("prec_bits".into(), json!(self.prec));
        m.insert("digits".into(), json!(decimal_digits(self.prec)));
        Value::Object(m)
    }
}
