//! Order-preserving conversion of real coordinates to integers.
//!
//! All coordinates are cut at one shared bit position. The position is the
//! smallest most-significant bit over the gaps between consecutive sorted
//! values of the same sign, refined by two further blocks of the base width
//! so that the truncation error stays below `1 / max_abs^2`.

use std::cmp::Ordering;

use crate::error::QuantizeError;
use crate::scalar::{decompose, exp2i, Coord, QuantInt};

/// The quantization contract shared by build and query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutSpec {
    /// Coarsest order-preserving cut, before refinement.
    pub base_bit: i32,
    /// Bit at which every coordinate is truncated.
    pub cut_bit: i32,
    /// Magnitude width of any quantized input coordinate.
    pub width_b: u32,
    /// `2^cut_bit`.
    pub err: f64,
    /// Largest absolute input coordinate.
    pub max_abs: f64,
}

impl CutSpec {
    /// Builds the spec for a base cut, applying the error refinement.
    pub fn from_base(base_bit: i32, max_abs: f64) -> Self {
        let top = msb_f64(max_abs);
        let base_width = match top {
            Some(t) if t >= base_bit => (t - base_bit + 1) as u32,
            _ => 0,
        };
        let mut cut_bit = base_bit - 2 * base_width as i32;
        if let Some(t) = top {
            if max_abs >= 1.0 {
                cut_bit = cut_bit.min(-2 * t - 2);
            }
        }
        Self::with_cut(base_bit, cut_bit, max_abs)
    }

    fn with_cut(base_bit: i32, cut_bit: i32, max_abs: f64) -> Self {
        let width_b = match msb_f64(max_abs) {
            Some(t) if t >= cut_bit => (t - cut_bit + 1) as u32,
            _ => 1,
        };
        CutSpec {
            base_bit,
            cut_bit,
            width_b,
            err: exp2i(cut_bit),
            max_abs,
        }
    }

    /// The same contract with `extra` more fractional bits.
    pub fn finer(&self, extra: u32) -> Self {
        Self::with_cut(self.base_bit, self.cut_bit - extra as i32, self.max_abs)
    }
}

/// Floor of log2 of a finite positive value, computed exactly.
pub fn msb<T: Coord>(x: T) -> Result<i32, QuantizeError> {
    if !x.is_finite() {
        return Err(QuantizeError::NonFinite(x.to_f64_exact()));
    }
    if x <= T::zero() {
        return Err(QuantizeError::NotPositive(x.to_f64_exact()));
    }
    let (m, e, _) = decompose(x);
    Ok(63 - m.leading_zeros() as i32 + e as i32)
}

fn msb_f64(x: f64) -> Option<i32> {
    msb(x).ok()
}

/// MSB of the exact difference `hi - lo` for same-sign `lo < hi`.
///
/// The rounded difference and its two-sum residual together represent the
/// exact gap; the residual only matters when the rounded gap is a power of
/// two and the exact one sits just below it.
fn gap_msb<T: Coord>(lo: T, hi: T) -> i32 {
    let s = hi - lo;
    let hv = s - hi;
    let lv = s - hv;
    let residual = (hi - lv) + (-lo - hv);
    let k = msb(s).expect("gap of distinct finite values is positive");
    let (m, _, _) = decompose(s);
    if m.is_power_of_two() && residual < T::zero() {
        k - 1
    } else {
        k
    }
}

/// Derives the shared cut from every coordinate of the input.
pub fn compute_cut_bit<T: Coord>(coords: &[T]) -> Result<CutSpec, QuantizeError> {
    if coords.is_empty() {
        return Err(QuantizeError::Empty);
    }
    if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
        return Err(QuantizeError::NonFinite(bad.to_f64_exact()));
    }

    let mut sorted = coords.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let split = sorted.partition_point(|&v| v < T::zero());
    let (neg, nonneg) = sorted.split_at(split);

    let mut base: Option<i32> = None;
    let mut take = |k: i32| base = Some(base.map_or(k, |b: i32| b.min(k)));
    for class in [neg, nonneg] {
        for w in class.windows(2) {
            if w[1] > w[0] {
                take(gap_msb(w[0], w[1]));
            }
        }
    }
    // Negatives must stay at or below -1 once truncated toward zero, or
    // they would collide with small nonnegatives.
    if let (Some(&closest), false) = (neg.last(), nonneg.is_empty()) {
        take(msb(-closest)?);
    }

    let base_bit = match base {
        Some(b) => b,
        None if coords.len() == 1 => 0,
        None => return Err(QuantizeError::AllEqual(sorted[0].to_f64_exact())),
    };

    let max_abs = sorted.iter().map(|v| v.abs().to_f64_exact()).fold(0.0f64, f64::max);
    Ok(CutSpec::from_base(base_bit, max_abs))
}

/// `trunc(x * 2^-cut_bit)`, checked against the spec's width.
pub fn quantize<T: Coord, I: QuantInt>(x: T, spec: &CutSpec) -> Result<I, QuantizeError> {
    let out_of_range = || QuantizeError::OutOfRange {
        value: x.to_f64_exact(),
        cut_bit: spec.cut_bit,
        width: spec.width_b,
    };
    if !x.is_finite() {
        return Err(QuantizeError::NonFinite(x.to_f64_exact()));
    }
    let (m, e, negative) = decompose(x);
    let q = I::from_scaled(m, e - i64::from(spec.cut_bit), negative).ok_or_else(out_of_range)?;
    if q.magnitude_bits() > u64::from(spec.width_b) {
        return Err(out_of_range());
    }
    Ok(q)
}

/// Bound on the drift between a real and a quantized line evaluation, in
/// original units: `2*c*err + 2*max_abs*err + 2*err^2 + err`.
pub fn error_budget(spec: &CutSpec, coeff_bound: f64) -> f64 {
    let err = spec.err;
    2.0 * coeff_bound * err + 2.0 * spec.max_abs * err + 2.0 * err * err + err
}
