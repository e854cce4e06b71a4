//! Rational linear relations among `log(2 sin kπ/q)`, `π` and `log 2`.
//!
//! For composite `q`, every `d | q` with `2 < d < q` and every unit `a` give
//! the product identity
//!
//! ```text
//! 2 sin(a(q/d)·π/q) = Π_{j=1}^{q/d} 2 sin((a + dj)π/q)
//! ```
//!
//! whose logarithm, folded onto `1 ≤ k < q/2`, is a nonzero relation
//! ([`construct_relation`]).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rug::{Integer, Rational};
use serde_json::{json, Map, Value};

use crate::arith::{divisors, gcd, is_composite};
use crate::error::{Error, Result};
use crate::precision::{classify_zero, log_2sin, sum_fixed, Real, ZeroClass};

/// One coordinate of a [`LogBasis`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    /// `log(2 sin kπ/q)` with `1 ≤ k < q/2`.
    Sin(u64),
    Pi,
    Log2,
}

impl Slot {
    /// Key used in serialized records: `"k"`, `"PI"` or `"LOG2"`.
    pub fn key(&self) -> String {
        match self {
            Slot::Sin(k) => k.to_string(),
            Slot::Pi => "PI".to_string(),
            Slot::Log2 => "LOG2".to_string(),
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// `{log(2 sin kπ/q) : 1 ≤ k < q/2} ∪ {π} ∪ {log 2 if q even}`, in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogBasis {
    q: u64,
    slots: Vec<Slot>,
}

impl LogBasis {
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 {
            return Err(Error::InvalidModulus(q));
        }
        let mut slots: Vec<Slot> = (1..=(q - 1) / 2).map(Slot::Sin).collect();
        slots.push(Slot::Pi);
        if q % 2 == 0 {
            slots.push(Slot::Log2);
        }
        Ok(LogBasis { q, slots })
    }

    /// Only the sine slots, without `π` or `log 2`.
    pub fn sin_count(&self) -> usize {
        ((self.q - 1) / 2) as usize
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn index_of(&self, slot: Slot) -> Option<usize> {
        match slot {
            Slot::Sin(k) if k >= 1 && 2 * k < self.q => Some(k as usize - 1),
            Slot::Sin(_) => None,
            Slot::Pi => Some(self.sin_count()),
            Slot::Log2 if self.q % 2 == 0 => Some(self.sin_count() + 1),
            Slot::Log2 => None,
        }
    }

    pub fn slot_value(&self, slot: Slot, prec: u32) -> Result<Real> {
        match slot {
            Slot::Sin(k) => log_2sin(k as i64, self.q, prec),
            Slot::Pi => Ok(Real::pi(prec)),
            Slot::Log2 => Ok(Real::ln2(prec)),
        }
    }

    pub fn values(&self, prec: u32) -> Result<Vec<Real>> {
        self.slots.iter().map(|&s| self.slot_value(s, prec)).collect()
    }
}

/// Folds `k` onto the basis: `k mod q ↦ min(k, q - k)`, with `q/2` mapping to
/// the `log 2` slot because `2 sin(π/2) = 2`.
pub fn fold_index(k: i64, q: u64) -> Result<Slot> {
    if q < 2 {
        return Err(Error::InvalidModulus(q));
    }
    let r = k.rem_euclid(q as i64) as u64;
    if r == 0 {
        return Err(Error::ZeroIndex { k, q });
    }
    let m = r.min(q - r);
    Ok(if 2 * m == q { Slot::Log2 } else { Slot::Sin(m) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Built from the product identity with unit `a` and divisor `d`.
    Construction {
        a: u64,
        d: u64,
    },
    Manual,
    Search,
}

impl Provenance {
    fn to_json(self) -> Value {
        match self {
            Provenance::Construction { a, d } => json!({ "a": a, "d": d }),
            Provenance::Manual => json!("manual"),
            Provenance::Search => json!("search"),
        }
    }
}

/// Rational coefficients over a [`LogBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct RelationVector {
    basis: LogBasis,
    coeffs: Vec<Rational>,
    provenance: Provenance,
}

impl RelationVector {
    pub fn new(basis: LogBasis, coeffs: Vec<Rational>, provenance: Provenance) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::InvalidRelation(format!(
                "{} coefficients for a basis of {} slots",
                coeffs.len(),
                basis.len()
            )));
        }
        Ok(RelationVector { basis, coeffs, provenance })
    }

    pub fn from_integers(basis: LogBasis, coeffs: &[i64], provenance: Provenance) -> Result<Self> {
        Self::new(basis, coeffs.iter().map(|&c| Rational::from(c)).collect(), provenance)
    }

    pub fn basis(&self) -> &LogBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn coeff(&self, slot: Slot) -> Rational {
        self.basis.index_of(slot).map(|i| self.coeffs[i].clone()).unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    /// Coefficients as `i64`, if they are all integers in range.
    pub fn integer_coeffs(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| if *c.denom() == 1 { c.numer().to_i64() } else { None }).collect()
    }

    /// Scales to coprime integers whose first nonzero entry is positive.
    /// The zero vector is returned unchanged.
    pub fn canonical(&self) -> RelationVector {
        RelationVector {
            basis: self.basis.clone(),
            coeffs: canonical_coeffs(&self.coeffs),
            provenance: self.provenance,
        }
    }

    /// `Σ coeff · slot value` at precision `prec`.
    pub fn evaluate(&self, prec: u32) -> Result<Real> {
        let mut terms = Vec::new();
        for (c, &slot) in self.coeffs.iter().zip(self.basis.slots()) {
            if *c != 0 {
                terms.push(self.basis.slot_value(slot, prec)?.mul_rational(c));
            }
        }
        Ok(sum_fixed(terms.iter(), prec))
    }
}

pub(crate) fn canonical_coeffs(coeffs: &[Rational]) -> Vec<Rational> {
    let Some(first) = coeffs.iter().find(|c| **c != 0) else {
        return coeffs.to_vec();
    };
    let mut den = Integer::from(1);
    for c in coeffs {
        den.lcm_mut(c.denom());
    }
    let ints: Vec<Integer> = coeffs
        .iter()
        .map(|c| {
            let mut t = Integer::from(&den / c.denom());
            t *= c.numer();
            t
        })
        .collect();
    let mut g = Integer::new();
    for v in &ints {
        g.gcd_mut(v);
    }
    if *first < 0 {
        g = -g;
    }
    ints.into_iter().map(|v| Rational::from(v / &g)).collect()
}

/// The relation attached to `(q, a, d)` in raw form: `+1` on the slot of
/// `a·q/d` and `-1` on the slot of each `a + d·j`, `j = 1..q/d`, accumulated.
pub fn construct_relation(q: u64, a: u64, d: u64) -> Result<RelationVector> {
    if !is_composite(q) {
        return Err(Error::InvalidRelation(format!("q = {q} is not composite")));
    }
    if q % d != 0 || d <= 2 || d >= q {
        return Err(Error::InvalidRelation(format!("d = {d} must divide q = {q} with 2 < d < q")));
    }
    if a == 0 || a >= q || gcd(a, q) != 1 {
        return Err(Error::InvalidRelation(format!("a = {a} must be a unit in [1, {q})")));
    }
    let basis = LogBasis::new(q)?;
    let mut coeffs = vec![Rational::new(); basis.len()];
    let slot_index = |s: Slot| basis.index_of(s).expect("folded slot lies in the basis");

    let lhs = fold_index((a * (q / d)) as i64, q)?;
    coeffs[slot_index(lhs)] += 1;

    let mut seen = Vec::with_capacity((q / d) as usize);
    for j in 1..=q / d {
        let k = (a + d * j) as i64;
        let slot = fold_index(k, q).map_err(|_| {
            Error::InvariantViolation(format!("a + dj = {k} is divisible by q = {q} (a = {a}, d = {d})"))
        })?;
        if seen.contains(&slot) {
            return Err(Error::InvariantViolation(format!(
                "two indices a + dj fold to slot {slot} (q = {q}, a = {a}, d = {d})"
            )));
        }
        seen.push(slot);
        coeffs[slot_index(slot)] -= 1;
    }

    let rel = RelationVector::new(basis, coeffs, Provenance::Construction { a, d })?;
    if rel.is_zero() {
        return Err(Error::InvariantViolation(format!("relation for (q, a, d) = ({q}, {a}, {d}) vanishes")));
    }
    Ok(rel)
}

/// The pairs `(a, d)` accepted by [`construct_relation`], ordered by `d` then `a`.
pub fn valid_pairs(q: u64) -> Vec<(u64, u64)> {
    if !is_composite(q) {
        return Vec::new();
    }
    let mut out = Vec::new();
    for d in divisors(q).into_iter().filter(|&d| d > 2 && d < q) {
        for a in (1..q).filter(|&a| gcd(a, q) == 1) {
            out.push((a, d));
        }
    }
    out
}

/// `2·log(2 sin(π/4)) = log 2` scaled to modulus `q` with `4 | q`.
pub fn quarter_relation(q: u64) -> Result<RelationVector> {
    if q % 4 != 0 {
        return Err(Error::InvalidRelation(format!("quarter relation needs 4 | q, got {q}")));
    }
    let basis = LogBasis::new(q)?;
    let mut coeffs = vec![Rational::new(); basis.len()];
    coeffs[basis.index_of(Slot::Sin(q / 4)).expect("q/4 < q/2")] = Rational::from(2);
    coeffs[basis.index_of(Slot::Log2).expect("q is even")] = Rational::from(-1);
    RelationVector::new(basis, coeffs, Provenance::Manual)
}

/// Canonical, deduplicated relations known for modulus `q`, and the rank of
/// their rational span.
#[derive(Debug, Clone)]
pub struct RelationSet {
    pub basis: LogBasis,
    pub relations: Vec<RelationVector>,
    pub rank: usize,
}

/// Every [`construct_relation`] output plus the quarter relation when `4 | q`,
/// canonicalized and deduplicated in construction order.
pub fn enumerate_relations(q: u64) -> Result<RelationSet> {
    let basis = LogBasis::new(q)?;
    let mut relations: Vec<RelationVector> = Vec::new();
    let mut push = |rel: RelationVector| {
        let rel = rel.canonical();
        if !relations.iter().any(|r| r.coeffs == rel.coeffs) {
            relations.push(rel);
        }
    };
    for (a, d) in valid_pairs(q) {
        push(construct_relation(q, a, d)?);
    }
    if q % 4 == 0 {
        push(quarter_relation(q)?);
    }
    let rows: Vec<Vec<Rational>> = relations.iter().map(|r| r.coeffs.clone()).collect();
    let rank = rational_rank(&rows);
    Ok(RelationSet { basis, relations, rank })
}

/// Classifies the relation's residual at `target` bits.
pub fn verify_relation(rel: &RelationVector, target: u32) -> ZeroClass {
    classify_zero(target, |wp| rel.evaluate(wp).expect("basis slots are well defined"))
}

/// Reduced row echelon form over `Q`; returns the nonzero rows and pivot columns.
pub fn row_reduce(rows: &[Vec<Rational>]) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::from(1) / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let factor = m[i][c].clone();
                for j in c..ncols {
                    let t = Rational::from(&factor * &m[r][j]);
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

/// Dimension of the rational span of `rows`.
pub fn rational_rank(rows: &[Vec<Rational>]) -> usize {
    row_reduce(rows).1.len()
}

/// Whether `v` lies in the rational span of `rows`.
pub fn span_contains(rows: &[Vec<Rational>], v: &[Rational]) -> bool {
    let mut ext = rows.to_vec();
    ext.push(v.to_vec());
    rational_rank(&ext) == rational_rank(rows)
}

/// Lexicographic comparison of coefficient vectors.
pub fn compare_coeffs(a: &[Rational], b: &[Rational]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.cmp(y)).find(|o| o.is_ne()).unwrap_or(a.len().cmp(&b.len()))
}

/// `"n/d"` with an explicit denominator.
fn fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// JSON record of a relation and its verification.
pub fn relation_record(rel: &RelationVector, class: &ZeroClass) -> Value {
    let coeffs: BTreeMap<String, Value> = rel
        .basis
        .slots()
        .iter()
        .zip(&rel.coeffs)
        .filter(|(_, c)| **c != 0)
        .map(|(s, c)| (s.key(), Value::String(fraction_string(c))))
        .collect();
    let mut m = Map::new();
    m.insert("q".into(), json!(rel.basis.q()));
    m.insert("provenance".into(), rel.provenance.to_json());
    m.insert("coeffs".into(), Value::Object(coeffs.into_iter().collect()));
    m.insert("residual_bits".into(), json!(class.residual_bits()));
    m.insert("residual".into(), json!(class.residual.to_decimal(20)));
    m.insert("class".into(), json!(class.tag.to_string()));
    m.insert("prec_bits".into(), json!(class.target));
    Value::Object(m)
}
