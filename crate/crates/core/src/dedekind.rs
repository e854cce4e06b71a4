//! Dedekind-type matrices over `G = (Z/pZ)*/{±1}` and the factorization of
//! their determinant into character sums `S_χ`.
//!
//! With `f(a) = log(2 sin aπ/p)` and `r = (p-1)/2`, the matrix
//! `M[a][c] = f(a·c⁻¹)` (indices in `G`, represented by `1..=r`) has
//! `det M = Π_χ S_χ` over the `r` even characters, where
//! `S_χ = Σ_{a=1}^r χ(a) f(a)`.

use serde_json::{json, Map, Value};

use crate::arith::{inv_mod, is_prime};
use crate::characters::{enumerate_characters, gauss_sum, DirichletCharacter};
use crate::error::{Error, Result};
use crate::lseries::digamma_table;
use crate::precision::{
    classify_zero, decimal_digits, log_2sin, sum_fixed, working_prec, Complex, Real, ZeroClass, ZeroTag,
};

/// Largest pivot growth tolerated before the determinant is redone at
/// doubled precision.
const MAX_GROWTH_BITS: i32 = 32;
const MAX_RESTARTS: u32 = 4;

fn check_odd_prime(p: u64) -> Result<()> {
    if p < 3 || !is_prime(p) {
        Err(Error::NotOddPrime(p))
    } else {
        Ok(())
    }
}

/// Representative of `x mod p` in `1..=(p-1)/2` up to sign.
fn fold_g(x: u64, p: u64) -> u64 {
    let x = x % p;
    x.min(p - x)
}

#[derive(Debug, Clone)]
pub struct DedekindMatrix {
    pub p: u64,
    pub r: usize,
    /// `f(1), …, f(r)`.
    pub f: Vec<Real>,
    /// `class[a-1][c-1]` is the representative of `a·c⁻¹` in `G`.
    pub class: Vec<Vec<u64>>,
}

impl DedekindMatrix {
    pub fn entry(&self, a: usize, c: usize) -> &Real {
        &self.f[self.class[a - 1][c - 1] as usize - 1]
    }

    pub fn rows(&self) -> Vec<Vec<Real>> {
        (1..=self.r).map(|a| (1..=self.r).map(|c| self.entry(a, c).clone()).collect()).collect()
    }

    pub fn prec(&self) -> u32 {
        self.f[0].prec()
    }
}

pub fn build_matrix(p: u64, prec: u32) -> Result<DedekindMatrix> {
    check_odd_prime(p)?;
    let r = ((p - 1) / 2) as usize;
    let f = (1..=r as i64).map(|a| log_2sin(a, p, prec)).collect::<Result<Vec<_>>>()?;
    let class = (1..=r as u64)
        .map(|a| {
            (1..=r as u64)
                .map(|c| {
                    let c_inv = inv_mod(c, p).expect("p is prime");
                    fold_g(a * c_inv, p)
                })
                .collect()
        })
        .collect();
    Ok(DedekindMatrix { p, r, f, class })
}

fn check_even_character(chi: &DirichletCharacter) -> Result<u64> {
    let p = chi.modulus();
    check_odd_prime(p)?;
    if !chi.is_even() {
        return Err(Error::Character(format!("S_χ needs an even character, {} is odd", chi.label())));
    }
    Ok(p)
}

/// `S_χ = Σ_{a=1}^{r} χ(a) log(2 sin aπ/p)` for an even character mod `p`.
pub fn s_chi(chi: &DirichletCharacter, prec: u32) -> Result<Complex> {
    let p = check_even_character(chi)?;
    let wp = prec + 16;
    let mut terms = Vec::with_capacity(((p - 1) / 2) as usize);
    for a in 1..=((p - 1) / 2) as i64 {
        terms.push(chi.value(a, wp).scale(&log_2sin(a, p, wp)?));
    }
    Ok(Complex::sum_fixed(terms.iter(), wp).with_prec(prec))
}

/// `-(p / (2 τ(χ̄))) · L(1, χ̄)` with `L(1, χ̄) = -(1/p) Σ_a χ̄(a) ψ(a/p)`,
/// which equals [`s_chi`] for nontrivial even `χ`.
pub fn s_chi_via_l1(chi: &DirichletCharacter, prec: u32) -> Result<Complex> {
    let p = check_even_character(chi)?;
    if chi.is_trivial() {
        return Err(Error::Character("the trivial character has no finite L(1, χ)".into()));
    }
    let wp = prec + 32 + 2 * (64 - p.leading_zeros());
    let bar = chi.conj();
    let psi = digamma_table(p, wp)?;
    let terms: Vec<Complex> = (1..p as i64).map(|a| bar.value(a, wp).scale(&psi[a as usize - 1])).collect();
    let l1 = (-&Complex::sum_fixed(terms.iter(), wp)).div_i64(p as i64);
    let tau = gauss_sum(&bar, wp)?;
    let s = (-&l1.div(&tau)).mul_i64(p as i64).div_i64(2);
    Ok(s.with_prec(prec))
}

/// Determinant by LU with partial pivoting. Returns the determinant and
/// `log2` of the pivot growth `max|U| / max|A|`.
pub fn lu_determinant(rows: &[Vec<Real>], prec: u32) -> (Real, i32) {
    let n = rows.len();
    let mut m: Vec<Vec<Real>> = rows.iter().map(|r| r.iter().map(|x| x.with_prec(prec)).collect()).collect();
    let max_abs =
        |m: &[Vec<Real>]| m.iter().flatten().map(|x| x.log2_floor().unwrap_or(i32::MIN)).max().unwrap_or(i32::MIN);
    let a_max = max_abs(&m);
    let mut u_max = a_max;
    let mut det = Real::one(prec);
    for c in 0..n {
        let p =
            (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()).then(j.cmp(&i))).expect("nonempty range");
        if m[p][c].is_zero() {
            return (Real::zero(prec), 0);
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        for i in c + 1..n {
            let factor = &m[i][c] / &m[c][c];
            for j in c..n {
                let t = &factor * &m[c][j];
                m[i][j] = &m[i][j] - &t;
            }
        }
        det = &det * &m[c][c];
        u_max = u_max.max(max_abs(&m[c..]));
    }
    let growth = if a_max == i32::MIN { 0 } else { u_max - a_max };
    (det, growth)
}

#[derive(Debug, Clone)]
pub struct DeterminantCheck {
    pub p: u64,
    pub target: u32,
    /// Precision the determinant was finally computed at.
    pub working_prec: u32,
    pub det_direct: Real,
    pub det_product: Real,
    pub agree: bool,
    /// Even characters mod `p` and their `S_χ`, trivial character first.
    pub s_chi_values: Vec<(DirichletCharacter, Complex)>,
}

pub fn determinant_check(p: u64, target: u32) -> Result<DeterminantCheck> {
    check_odd_prime(p)?;
    let mut wp = working_prec(target);
    let mut restarts = 0;
    let det_direct = loop {
        let m = build_matrix(p, wp)?;
        let (det, growth) = lu_determinant(&m.rows(), wp);
        if growth <= MAX_GROWTH_BITS || restarts == MAX_RESTARTS {
            break det;
        }
        wp *= 2;
        restarts += 1;
    };

    let chars = enumerate_characters(p, true)?;
    let mut s_chi_values = Vec::with_capacity(chars.len());
    for chi in chars {
        let s = s_chi(&chi, wp)?;
        s_chi_values.push((chi, s));
    }
    let mut prod = Complex::one(wp);
    for (_, s) in &s_chi_values {
        prod = &prod * s;
    }
    // Conjugate characters pair up, so the product is real.
    if !prod.im().abs_lt_pow2(-(target as i32)) && !(prod.im() / prod.re()).abs_lt_pow2(-(target as i32)) {
        return Err(Error::InvariantViolation(format!(
            "character product has imaginary part {}",
            prod.im().to_decimal(20)
        )));
    }
    let det_product = prod.re().clone();
    let diff = (&det_direct - &det_product).abs();
    let tol = &det_direct.abs() * &Real::pow2(-((target / 2) as i32), wp);
    let agree = diff < tol;
    Ok(DeterminantCheck { p, target, working_prec: wp, det_direct, det_product, agree, s_chi_values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateStatus {
    /// Every `S_χ` is nonzero and both determinant routes agree.
    Certified,
    /// Some `S_χ` could not be classified at the tested precision.
    Inconclusive,
    /// A factor classified as zero or the routes disagree.
    Failed,
}

impl CertificateStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertificateStatus::Certified => "certified",
            CertificateStatus::Inconclusive => "inconclusive",
            CertificateStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Certificate {
    pub check: DeterminantCheck,
    pub classes: Vec<ZeroClass>,
    pub status: CertificateStatus,
}

/// Classifies every `|S_χ|` and combines the result with the determinant pair.
pub fn nonvanishing_certificate(p: u64, target: u32) -> Result<Certificate> {
    let check = determinant_check(p, target)?;
    let mut classes = Vec::with_capacity(check.s_chi_values.len());
    for (chi, _) in &check.s_chi_values {
        let class = classify_zero(target, |wp| s_chi(chi, wp).expect("even character mod prime").abs());
        classes.push(class);
    }
    let status = if classes.iter().any(|c| c.tag == ZeroTag::Zero) || !check.agree {
        CertificateStatus::Failed
    } else if classes.iter().any(|c| c.tag == ZeroTag::Indeterminate) {
        CertificateStatus::Inconclusive
    } else {
        CertificateStatus::Certified
    };
    Ok(Certificate { check, classes, status })
}

fn dec(x: &Real, target: u32) -> Value {
    json!(x.to_decimal(decimal_digits(target)))
}

impl DeterminantCheck {
    pub fn to_json(&self) -> Value {
        let t = self.target;
        let factors: Vec<Value> = self
            .s_chi_values
            .iter()
            .map(|(chi, s)| {
                json!({
                    "character": chi.label(),
                    "re": dec(s.re(), t),
                    "im": dec(s.im(), t),
                    "prec_bits": t,
                })
            })
            .collect();
        let mut m = Map::new();
        m.insert("p".into(), json!(self.p));
        m.insert("det_direct".into(), dec(&self.det_direct, t));
        m.insert("det_product".into(), dec(&self.det_product, t));
        m.insert("agree".into(), json!(self.agree));
        m.insert("s_chi".into(), Value::Array(factors));
        m.insert("prec_bits".into(), json!(t));
        m.insert("working_prec_bits".into(), json!(self.working_prec));
        Value::Object(m)
    }
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        let t = self.check.target;
        let factors: Vec<Value> = self
            .check
            .s_chi_values
            .iter()
            .zip(&self.classes)
            .map(|((chi, s), class)| {
                json!({
                    "character": chi.label(),
                    "re": dec(s.re(), t),
                    "im": dec(s.im(), t),
                    "abs": dec(&class.residual, t),
                    "class": class.tag.to_string(),
                    "prec_bits": t,
                })
            })
            .collect();
        let r = (self.check.p - 1) / 2;
        let mut m = Map::new();
        m.insert("p".into(), json!(self.check.p));
        m.insert("status".into(), json!(self.status.as_str()));
        m.insert("factors".into(), Value::Array(factors));
        m.insert(
            "determinant".into(),
            json!({
                "direct": dec(&self.check.det_direct, t),
                "product": dec(&self.check.det_product, t),
                "agree": self.check.agree,
                "prec_bits": t,
            }),
        );
        m.insert(
            "established".into(),
            json!(format!(
                "all {r} character sums are nonzero at {t} bits, so the {r}x{r} matrix is invertible and \
                 no nonzero rational vector annihilates log(2 sin aπ/{p}), 1 <= a <= {r}",
                p = self.check.p
            )),
        );
        m.insert(
            "deferred".into(),
            json!(
                "independence over algebraic numbers, and with π adjoined, rests on Baker's theorem \
                   and the nonvanishing of L(1, χ); see the integer-relation search for numeric evidence"
            ),
        );
        m.insert("prec_bits".into(), json!(t));
        Value::Object(m)
    }
}

/// `Σ_{even χ} χ̄(a) S_χ`, which equals `r · f(a)`.
pub fn character_inversion(p: u64, a: i64, prec: u32) -> Result<Complex> {
    check_odd_prime(p)?;
    let mut terms = Vec::new();
    for chi in enumerate_characters(p, true)? {
        terms.push(&chi.conj().value(a, prec) * &s_chi(&chi, prec)?);
    }
    Ok(Complex::sum_fixed(terms.iter(), prec))
}

/// `Σ_{a=1}^{r} f(a)`, the trivial-character factor, which equals `½ log p`.
pub fn trivial_factor(p: u64, prec: u32) -> Result<Real> {
    check_odd_prime(p)?;
    let f = (1..=((p - 1) / 2) as i64).map(|a| log_2sin(a, p, prec)).collect::<Result<Vec<_>>>()?;
    Ok(sum_fixed(f.iter(), prec))
}
