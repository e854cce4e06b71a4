//! Erdős functions (`f(a) = ±1` off multiples of `q`, `0` on them), their
//! `L(1,f)` values, the trichotomy behind their vanishing, and the explicit
//! odd functions with `L(1,f) = 0`.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use itertools::Itertools;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::arith::{binomial, is_prime};
use crate::error::{Error, Result};
use crate::lseries::{digamma_table, l1_digamma};
use crate::periodic::PeriodicFunction;
use crate::precision::{classify_zero, decimal_digits, sum_fixed, working_prec, Real, ZeroClass, ZeroTag};

/// Written into every stored record.
pub const CODE_VERSION: &str = concat!("cyclolog ", env!("CARGO_PKG_VERSION"));

/// Largest modulus [`scan`] accepts unless told otherwise.
pub const DEFAULT_SCAN_BOUND: u64 = 17;

/// Sign vectors `(f(1), …, f(q-1))` with zero sum, ordered lexicographically
/// by the positions of their `+1` entries. Empty for even `q`.
pub fn erdos_sign_vectors(q: u64) -> Vec<Vec<i8>> {
    if q < 3 || q % 2 == 0 {
        return Vec::new();
    }
    let n = (q - 1) as usize;
    (0..n)
        .combinations(n / 2)
        .map(|plus| {
            let mut v = vec![-1i8; n];
            for i in plus {
                v[i] = 1;
            }
            v
        })
        .collect()
}

pub fn erdos_function(signs: &[i8]) -> Result<PeriodicFunction> {
    let mut vals: Vec<i64> = signs.iter().map(|&s| s as i64).collect();
    vals.push(0);
    PeriodicFunction::from_integers(&vals)
}

pub fn enumerate_erdos_functions(q: u64) -> Vec<PeriodicFunction> {
    erdos_sign_vectors(q).iter().map(|s| erdos_function(s).expect("nonempty sign vector")).collect()
}

/// `C(q-1, (q-1)/2)` for odd `q`, `0` for even `q`.
pub fn admissible_count(q: u64) -> u128 {
    if q < 3 || q % 2 == 0 {
        0
    } else {
        binomial(q - 1, (q - 1) / 2)
    }
}

/// Trigonometric tables shared by every function of one modulus.
struct TrigTables {
    /// `cot(aπ/q)`, `a = 1..q-1`.
    cot: Vec<Real>,
    /// `cos[b-1][a-1] = cos(2πab/q)`.
    cos: Vec<Vec<Real>>,
}

impl TrigTables {
    fn new(q: u64, prec: u32) -> Self {
        let pi = Real::pi(prec + 16);
        let angle = |num: u64, den: u64| (&pi * &Real::from_i64(num as i64, prec + 16)).div_i64(den as i64);
        let cot = (1..q).map(|a| angle(a, q).cot().with_prec(prec)).collect();
        let cos = (1..=(q - 1) / 2)
            .map(|b| (1..q).map(|a| angle(2 * ((a * b) % q), q).cos().with_prec(prec)).collect())
            .collect();
        TrigTables { cot, cos }
    }

    fn weighted(row: &[Real], signs: &[i8], prec: u32) -> Real {
        let terms: Vec<Real> = row.iter().zip(signs).map(|(x, &s)| x.mul_i64(s as i64)).collect();
        sum_fixed(terms.iter(), prec)
    }
}

/// One scanned function.
#[derive(Debug, Clone)]
pub struct ScanRecord {
    pub index: usize,
    pub signs: Vec<i8>,
    pub l_value: Real,
    pub class: ZeroTag,
    pub cot_sum: Real,
    pub cos_sums: Vec<Real>,
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub q: u64,
    pub target: u32,
    pub admissible_count: u128,
    /// Smallest `|L(1,f)|` and its sign vector; `None` when nothing is admissible.
    pub min_abs_l: Option<Real>,
    pub argmin: Option<Vec<i8>>,
    pub all_nonzero: bool,
    /// Set when no function is admissible.
    pub reason: Option<&'static str>,
    pub records: Vec<ScanRecord>,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    /// Worker threads; `None` uses every core.
    pub threads: Option<usize>,
    pub max_q: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { threads: None, max_q: DEFAULT_SCAN_BOUND }
    }
}

/// Evaluates `L(1,f)` for every Erdős function mod `q` and classifies it.
/// The output does not depend on the number of threads.
pub fn scan(q: u64, target: u32, opts: &ScanOptions) -> Result<ScanReport> {
    if q < 3 {
        return Err(Error::InvalidModulus(q));
    }
    if q > opts.max_q {
        return Err(Error::OutOfRange(format!("scan modulus {q} exceeds the bound {}", opts.max_q)));
    }
    if q % 2 == 0 {
        return Ok(ScanReport {
            q,
            target,
            admissible_count: 0,
            min_abs_l: None,
            argmin: None,
            all_nonzero: true,
            reason: Some("parity"),
            records: Vec::new(),
        });
    }
    let wp = working_prec(target);
    let psi = digamma_table(q, wp)?;
    let psi2 = digamma_table(q, 2 * wp)?;
    let trig = TrigTables::new(q, wp);
    let signs = erdos_sign_vectors(q);

    let eval = |(index, s): (usize, &Vec<i8>)| -> ScanRecord {
        let l_at = |table: &[Real], prec: u32| {
            let terms: Vec<Real> = s.iter().zip(table).map(|(&v, p)| p.mul_i64(v as i64)).collect();
            -sum_fixed(terms.iter(), prec).div_i64(q as i64)
        };
        let l = l_at(&psi, wp);
        let class = ZeroClass::from_pair(&l, || l_at(&psi2, 2 * wp), target);
        ScanRecord {
            index,
            signs: s.clone(),
            cot_sum: TrigTables::weighted(&trig.cot, s, wp),
            cos_sums: trig.cos.iter().map(|row| TrigTables::weighted(row, s, wp)).collect(),
            l_value: l,
            class: class.tag,
        }
    };

    let records: Vec<ScanRecord> = match opts.threads {
        Some(1) => signs.iter().enumerate().map(eval).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::OutOfRange(format!("thread pool: {e}")))?
            .install(|| signs.par_iter().enumerate().map(eval).collect()),
        None => signs.par_iter().enumerate().map(eval).collect(),
    };

    let argmin = records.iter().min_by(|a, b| a.l_value.abs().total_cmp(&b.l_value.abs()).then(a.index.cmp(&b.index)));
    Ok(ScanReport {
        q,
        target,
        admissible_count: records.len() as u128,
        min_abs_l: argmin.map(|r| r.l_value.abs()),
        argmin: argmin.map(|r| r.signs.clone()),
        all_nonzero: records.iter().all(|r| r.class == ZeroTag::NonZero),
        reason: None,
        records,
    })
}

impl ScanRecord {
    /// The stored JSONL form.
    pub fn to_json(&self, q: u64, target: u32) -> Value {
        let d = decimal_digits(target);
        let mut m = Map::new();
        m.insert("q".into(), json!(q));
        m.insert("signs".into(), json!(self.signs));
        m.insert("L".into(), json!(self.l_value.to_decimal(d)));
        m.insert("prec".into(), json!(target));
        m.insert("class".into(), json!(self.class.to_string()));
        m.insert("cot_sum".into(), json!(self.cot_sum.to_decimal(d)));
        m.insert("cos_sums".into(), json!(self.cos_sums.iter().map(|c| c.to_decimal(d)).collect::<Vec<_>>()));
        m.insert("code_version".into(), json!(CODE_VERSION));
        Value::Object(m)
    }
}

impl ScanReport {
    pub fn to_json(&self, with_records: bool) -> Value {
        let d = decimal_digits(self.target);
        let mut m = Map::new();
        m.insert("q".into(), json!(self.q));
        m.insert("admissible_count".into(), json!(self.admissible_count as u64));
        m.insert("all_nonzero".into(), json!(self.all_nonzero));
        m.insert("min_abs_L".into(), self.min_abs_l.as_ref().map_or(Value::Null, |x| json!(x.to_decimal(d))));
        m.insert("argmin".into(), self.argmin.as_ref().map_or(Value::Null, |s| json!(s)));
        if let Some(reason) = self.reason {
            m.insert("reason".into(), json!(reason));
        }
        let nonzero = self.records.iter().filter(|r| r.class == ZeroTag::NonZero).count();
        m.insert("nonzero_count".into(), json!(nonzero));
        m.insert("prec_bits".into(), json!(self.target));
        if with_records {
            m.insert(
                "records".into(),
                Value::Array(self.records.iter().map(|r| r.to_json(self.q, self.target)).collect()),
            );
        }
        Value::Object(m)
    }

    pub fn jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_json(self.q, self.target).to_string());
            out.push('\n');
        }
        out
    }
}

/// What [`ScanStore::record`] did with a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StoreOutcome {
    pub appended: usize,
    pub verified: usize,
}

/// Append-only JSONL file of scan records keyed by `(q, signs, prec)`.
/// A record already present is compared instead of written again.
#[derive(Debug, Clone)]
pub struct ScanStore {
    path: PathBuf,
}

impl ScanStore {
    pub fn new(path: impl AsRef<Path>) -> Self {
        ScanStore { path: path.as_ref().to_path_buf() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn key(v: &Value) -> Option<String> {
        Some(format!("{}|{}|{}", v.get("q")?, v.get("signs")?, v.get("prec")?))
    }

    pub fn load(&self) -> Result<Vec<Value>> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let mut out = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let v: Value = serde_json::from_str(&line)
                .map_err(|e| Error::Parse(format!("{}:{}: {e}", self.path.display(), i + 1)))?;
            out.push(v);
        }
        Ok(out)
    }

    pub fn record(&self, report: &ScanReport) -> Result<StoreOutcome> {
        let existing: HashMap<String, Value> =
            self.load()?.into_iter().filter_map(|v| Self::key(&v).map(|k| (k, v))).collect();
        let mut outcome = StoreOutcome::default();
        let mut fresh = String::new();
        for r in &report.records {
            let v = r.to_json(report.q, report.target);
            let key = Self::key(&v).expect("record has key fields");
            match existing.get(&key) {
                Some(old) => {
                    if old["L"] != v["L"] || old["class"] != v["class"] {
                        return Err(Error::InvariantViolation(format!(
                            "stored record {key} has L = {}, class {}; recomputed L = {}, class {}",
                            old["L"], old["class"], v["L"], v["class"]
                        )));
                    }
                    outcome.verified += 1;
                }
                None => {
                    fresh.push_str(&v.to_string());
                    fresh.push('\n');
                    outcome.appended += 1;
                }
            }
        }
        if !fresh.is_empty() {
            let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
            file.write_all(fresh.as_bytes())?;
        }
        Ok(outcome)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `L(1,f) ≠ 0`.
    LNonzero,
    /// `L(1,f) = 0` and every cot/cos sum vanishes.
    TrigSumsVanish,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::LNonzero => "L_nonzero",
            Branch::TrigSumsVanish => "trig_sums_vanish",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AlternativeVerdict {
    pub p: u64,
    pub cot_sum: ZeroClass,
    pub cot_value: Real,
    pub cos_sums: Vec<ZeroClass>,
    pub cos_values: Vec<Real>,
    pub l_value: Real,
    pub l_class: ZeroClass,
    pub branch: Branch,
}

fn cot_sum_at(f: &PeriodicFunction, p: u64, prec: u32) -> Real {
    let wp = prec + 16;
    let pi = Real::pi(wp);
    let terms: Vec<Real> = (1..p as i64).map(|a| &f.real(a, wp) * &pi.mul_i64(a).div_i64(p as i64).cot()).collect();
    sum_fixed(terms.iter(), wp).with_prec(prec)
}

fn cos_sum_at(f: &PeriodicFunction, p: u64, b: u64, prec: u32) -> Real {
    let wp = prec + 16;
    let pi = Real::pi(wp);
    let terms: Vec<Real> = (1..p)
        .map(|a| &f.real(a as i64, wp) * &pi.mul_i64((2 * ((a * b) % p)) as i64).div_i64(p as i64).cos())
        .collect();
    sum_fixed(terms.iter(), wp).with_prec(prec)
}

/// `L(1,f)`, `Σ f(a) cot(aπ/q)` and `Σ f(a) cos(2πab/q)` (`1 ≤ b ≤ (q-1)/2`),
/// each classified at `target` bits.
#[derive(Debug, Clone)]
pub struct TrigSums {
    pub q: u64,
    pub l_value: Real,
    pub l_class: ZeroClass,
    pub cot_value: Real,
    pub cot_class: ZeroClass,
    pub cos_values: Vec<Real>,
    pub cos_classes: Vec<ZeroClass>,
}

impl TrigSums {
    pub fn all_trig_zero(&self) -> bool {
        self.cot_class.is_zero() && self.cos_classes.iter().all(ZeroClass::is_zero)
    }
}

pub fn trig_sums(f: &PeriodicFunction, target: u32) -> Result<TrigSums> {
    let q = f.period();
    if q < 3 {
        return Err(Error::InvalidModulus(q));
    }
    f.check_convergent(target)?;
    let wp = working_prec(target);
    let l_at = |prec: u32| l1_digamma(f, prec).expect("convergence already checked");
    let r = (q - 1) / 2;
    Ok(TrigSums {
        q,
        l_value: l_at(wp),
        l_class: classify_zero(target, l_at),
        cot_value: cot_sum_at(f, q, wp),
        cot_class: classify_zero(target, |prec| cot_sum_at(f, q, prec)),
        cos_values: (1..=r).map(|b| cos_sum_at(f, q, b, wp)).collect(),
        cos_classes: (1..=r).map(|b| classify_zero(target, |prec| cos_sum_at(f, q, b, prec))).collect(),
    })
}

/// Decides which alternative holds for `f` mod an odd prime `p`: either
/// `L(1,f) ≠ 0`, or the cot sum and every cos sum vanish.
pub fn classify_alternative(f: &PeriodicFunction, target: u32) -> Result<AlternativeVerdict> {
    let p = f.period();
    if p < 3 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let sums = trig_sums(f, target)?;
    let trig: Vec<&ZeroClass> = std::iter::once(&sums.cot_class).chain(&sums.cos_classes).collect();
    let f_at_p_zero = f.real(p as i64, working_prec(target)).abs_lt_pow2(-(target as i32));
    let branch = match sums.l_class.tag {
        ZeroTag::NonZero => {
            if f_at_p_zero && sums.all_trig_zero() {
                return Err(Error::InvariantViolation(
                    "L(1,f) classifies nonzero although every cot/cos sum vanishes".into(),
                ));
            }
            Branch::LNonzero
        }
        ZeroTag::Zero => {
            if trig.iter().any(|c| c.is_nonzero()) {
                return Err(Error::InvariantViolation(format!(
                    "L(1,f) vanishes for f mod {p} while a cot/cos sum is nonzero; \
                     this contradicts the linear independence of the logarithms"
                )));
            }
            if trig.iter().any(|c| c.is_indeterminate()) {
                return Err(Error::Inconclusive("a cot/cos sum is indeterminate".into()));
            }
            Branch::TrigSumsVanish
        }
        ZeroTag::Indeterminate => {
            return Err(Error::Inconclusive(format!(
                "L(1,f) = {} is neither zero nor stably nonzero at {target} bits",
                sums.l_value.to_decimal(20)
            )))
        }
    };
    Ok(AlternativeVerdict {
        p,
        cot_sum: sums.cot_class,
        cot_value: sums.cot_value,
        cos_sums: sums.cos_classes,
        cos_values: sums.cos_values,
        l_value: sums.l_value,
        l_class: sums.l_class,
        branch,
    })
}

impl AlternativeVerdict {
    pub fn to_json(&self) -> Value {
        let t = self.l_class.target;
        let d = decimal_digits(t);
        let mut m = Map::new();
        m.insert("p".into(), json!(self.p));
        m.insert("branch".into(), json!(self.branch.as_str()));
        m.insert("L".into(), json!(self.l_value.to_decimal(d)));
        m.insert("L_class".into(), json!(self.l_class.tag.to_string()));
        m.insert("cot_sum".into(), json!(self.cot_value.to_decimal(d)));
        m.insert("cot_class".into(), json!(self.cot_sum.tag.to_string()));
        m.insert(
            "cos_sums".into(),
            Value::Array(
                self.cos_values
                    .iter()
                    .zip(&self.cos_sums)
                    .map(|(v, c)| json!({ "value": v.to_decimal(d), "class": c.tag.to_string() }))
                    .collect(),
            ),
        );
        m.insert("prec_bits".into(), json!(t));
        Value::Object(m)
    }
}

/// The odd function `f_l` mod `q` with `L(1, f_l) = 0`:
///
/// * odd `q`: `(-1)^(n-1) (sin(nπ/q) / sin(π/q))^l`, `3 ≤ l ≤ q-2`;
/// * even `q`: `(-1)^(n-1) (cos(nπ/q) / cos(π/q)) (sin(nπ/q) / sin(π/q))^l`, `3 ≤ l ≤ q-1`;
///
/// with `l` odd. Values are reals at `prec` bits; `f_l(q) = 0` exactly.
pub fn bbw_function(q: u64, l: u64, prec: u32) -> Result<PeriodicFunction> {
    let max_l = if q % 2 == 1 { q.saturating_sub(2) } else { q.saturating_sub(1) };
    if q < 4 || l % 2 == 0 || l < 3 || l > max_l {
        return Err(Error::OutOfRange(format!(
            "kernel function needs odd l with 3 <= l <= {max_l} for q = {q}, got l = {l}"
        )));
    }
    let wp = prec + 32 + 2 * l as u32;
    let pi = Real::pi(wp);
    let angle = |n: u64| pi.mul_i64(n as i64).div_i64(q as i64);
    let s1 = angle(1).sin();
    let c1 = angle(1).cos();
    let mut vals = Vec::with_capacity(q as usize);
    for n in 1..q {
        let mut v = (&angle(n).sin() / &s1).powi(l as i32);
        if q % 2 == 0 {
            v = &v * &(&angle(n).cos() / &c1);
        }
        if n % 2 == 0 {
            v = -v;
        }
        vals.push(v.with_prec(prec));
    }
    vals.push(Real::zero(prec));
    PeriodicFunction::from_reals(vals)
}

/// Valid `l` for [`bbw_function`] at modulus `q`.
pub fn bbw_indices(q: u64) -> Vec<u64> {
    let max_l = if q % 2 == 1 { q.saturating_sub(2) } else { q.saturating_sub(1) };
    (3..=max_l).step_by(2).collect()
}

/// Precision at which to build kernel functions so that classification at
/// `target` bits, including the doubled-precision recheck, sees exact-enough values.
pub fn bbw_prec(target: u32) -> u32 {
    2 * working_prec(target) + 64
}
