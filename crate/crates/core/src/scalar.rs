//! Scalar abstractions: real coordinate types, machine words used as SWAR
//! registers, and integer types that can hold quantized coordinates.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Float, PrimInt, Signed, Unsigned, WrappingAdd, WrappingMul, WrappingSub, Zero};

/// A binary floating-point coordinate type.
///
/// Every finite value is an exact dyadic rational `m * 2^e`; the exact
/// predicates and the quantizer rely on that through [`Float::integer_decode`].
pub trait Coord: Float + FromStr + Debug + Display + Default + Send + Sync + 'static {
    /// Tag written into serialized indexes.
    const TAG: u8;
    /// Encoded size in bytes.
    const BYTES: usize;

    fn to_le_vec(self, out: &mut Vec<u8>);
    fn from_le_slice(bytes: &[u8]) -> Self;

    /// Lossless widening to `f64`.
    fn to_f64_exact(self) -> f64;
}

impl Coord for f32 {
    const TAG: u8 = 32;
    const BYTES: usize = 4;

    fn to_le_vec(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_bits().to_le_bytes());
    }

    fn from_le_slice(bytes: &[u8]) -> Self {
        let mut buf = [0u8; 4];
        buf.copy_from_slice(&bytes[..4]);
        f32::from_bits(u32::from_le_bytes(buf))
    }

    fn to_f64_exact(self) -> f64 {
        f64::from(self)
    }
}

impl Coord for f64 {
    const TAG: u8 = 64;
    const BYTES: usize = 8;

    fn to_le_vec(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_bits().to_le_bytes());
    }

    fn from_le_slice(bytes: &[u8]) -> Self {
        let mut buf = [0u8; 8];
        buf.copy_from_slice(&bytes[..8]);
        f64::from_bits(u64::from_le_bytes(buf))
    }

    fn to_f64_exact(self) -> f64 {
        self
    }
}

/// An unsigned machine word used as a SWAR register.
pub trait Word:
    PrimInt + Unsigned + WrappingAdd + WrappingSub + WrappingMul + Hash + Debug + Send + Sync + 'static
{
    const BITS: u32;

    /// Truncating conversion from `u128`.
    fn from_u128(v: u128) -> Self;
    fn to_u128(self) -> u128;

    fn to_le_vec(self, out: &mut Vec<u8>) {
        let bytes = self.to_u128().to_le_bytes();
        out.extend_from_slice(&bytes[..Self::BITS as usize / 8]);
    }

    fn from_le_slice(bytes: &[u8]) -> Self {
        let n = Self::BITS as usize / 8;
        let mut buf = [0u8; 16];
        buf[..n].copy_from_slice(&bytes[..n]);
        Self::from_u128(u128::from_le_bytes(buf))
    }
}

macro_rules! impl_word {
    ($($t:ty),*) => {
        $(
            impl Word for $t {
                const BITS: u32 = <$t>::BITS;
                #[inline]
                fn from_u128(v: u128) -> Self { v as $t }
                #[inline]
                fn to_u128(self) -> u128 { self as u128 }
            }
        )*
    };
}

impl_word!(u8, u16, u32, u64, u128);

/// An integer type that can receive a quantized coordinate.
///
/// Fixed-width types report overflow as `None`; [`BigInt`] never overflows.
pub trait QuantInt: Clone + Ord + Debug {
    /// Returns `sign * trunc(mantissa * 2^shift)`, i.e. the scaled value
    /// truncated toward zero.
    fn from_scaled(mantissa: u64, shift: i64, negative: bool) -> Option<Self>;

    /// Number of bits in the magnitude (0 for zero).
    fn magnitude_bits(&self) -> u64;
}

macro_rules! impl_quant_int {
    ($($t:ty),*) => {
        $(
            impl QuantInt for $t {
                fn from_scaled(mantissa: u64, shift: i64, negative: bool) -> Option<Self> {
                    let mag: u128 = if shift >= 0 {
                        if mantissa == 0 {
                            0
                        } else {
                            let len = 64 - u64::from(mantissa.leading_zeros());
                            if len as i64 + shift > 127 {
                                return None;
                            }
                            u128::from(mantissa) << shift
                        }
                    } else if -shift >= 64 {
                        0
                    } else {
                        u128::from(mantissa >> (-shift))
                    };
                    let max = <$t>::MAX as u128;
                    if mag > max {
                        return None;
                    }
                    let v = mag as $t;
                    Some(if negative { -v } else { v })
                }

                fn magnitude_bits(&self) -> u64 {
                    u64::from(<$t>::BITS - self.unsigned_abs().leading_zeros())
                }
            }
        )*
    };
}

impl_quant_int!(i32, i64, i128);

impl QuantInt for BigInt {
    fn from_scaled(mantissa: u64, shift: i64, negative: bool) -> Option<Self> {
        let m = BigInt::from(mantissa);
        let mag = if shift >= 0 {
            m << (shift as usize)
        } else {
            m >> ((-shift) as usize)
        };
        Some(if negative { -mag } else { mag })
    }

    fn magnitude_bits(&self) -> u64 {
        if self.is_zero() {
            0
        } else {
            self.abs().bits()
        }
    }
}

/// `2^k` as an `f64`, exact down to the subnormal range; flushes to zero
/// below it and saturates to infinity above the exponent range.
pub fn exp2i(k: i32) -> f64 {
    if k > 1023 {
        f64::INFINITY
    } else if k >= -1022 {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else if k >= -1074 {
        f64::from_bits(1u64 << (k + 1074))
    } else {
        0.0
    }
}

/// Splits a finite value into `(mantissa, exponent, negative)` with
/// `|x| = mantissa * 2^exponent`.
pub(crate) fn decompose<T: Coord>(x: T) -> (u64, i64, bool) {
    let (m, e, s) = x.integer_decode();
    (m, i64::from(e), s < 0 && m != 0)
}

/// Signed conversion helper for fixed-width integers used in tests and
/// width accounting.
pub(crate) fn bit_len_i128(v: i128) -> u32 {
    128 - v.unsigned_abs().leading_zeros()
}
