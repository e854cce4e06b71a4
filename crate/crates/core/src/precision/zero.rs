use std::fmt;

use serde::{Deserialize, Serialize};

use super::{working_prec, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ZeroTag {
    Zero,
    NonZero,
    Indeterminate,
}

impl fmt::Display for ZeroTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZeroTag::Zero => "Zero",
            ZeroTag::NonZero => "NonZero",
            ZeroTag::Indeterminate => "Indeterminate",
        })
    }
}

/// Outcome of deciding whether a computed quantity vanishes.
///
/// With target `t` bits:
/// * `Zero` when `|x| < 2^-t`;
/// * `NonZero` when `|x| > 2^-(t/2)` and a recomputation at doubled working
///   precision agrees with `x` on its leading `t/2` bits;
/// * `Indeterminate` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroClass {
    pub tag: ZeroTag,
    /// `|x|` at the primary working precision.
    pub residual: Real,
    pub target: u32,
}

impl ZeroClass {
    /// Classifies `x` given its recomputation `recheck` at doubled precision.
    /// `recheck` is only consulted when `x` is above the nonzero threshold.
    pub fn from_pair(x: &Real, recheck: impl FnOnce() -> Real, target: u32) -> Self {
        let residual = x.abs();
        let half = (target / 2) as i32;
        let tag = if residual.abs_lt_pow2(-(target as i32)) {
            ZeroTag::Zero
        } else if residual.abs_gt_pow2(-half) {
            let y = recheck();
            // Leading t/2 bits agree iff |x - y| <= |x| 2^-(t/2).
            let diff = (x - &y).abs();
            let tol = &residual * &Real::pow2(-half, residual.prec());
            if diff <= tol {
                ZeroTag::NonZero
            } else {
                ZeroTag::Indeterminate
            }
        } else {
            ZeroTag::Indeterminate
        };
        ZeroClass { tag, residual, target }
    }

    pub fn is_zero(&self) -> bool {
        self.tag == ZeroTag::Zero
    }

    pub fn is_nonzero(&self) -> bool {
        self.tag == ZeroTag::NonZero
    }

    pub fn is_indeterminate(&self) -> bool {
        self.tag == ZeroTag::Indeterminate
    }

    /// `floor(-log2 |residual|)`; the residual's precision when it is exactly zero.
    pub fn residual_bits(&self) -> i64 {
        match self.residual.log2_floor() {
            Some(e) => -(e as i64) - 1,
            None => self.residual.prec() as i64,
        }
    }
}

/// Classifies the quantity produced by `producer`, which is called with a
/// working precision: first `working_prec(target)`, then twice that when a
/// nonzero verdict needs confirming.
pub fn classify_zero<F>(target: u32, producer: F) -> ZeroClass
where
    F: Fn(u32) -> Real,
{
    let wp = working_prec(target);
    let x = producer(wp);
    ZeroClass::from_pair(&x, || producer(2 * wp), target)
}
