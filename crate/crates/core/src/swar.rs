//! SIMD-within-a-register arithmetic over fixed-width integer lanes.
//!
//! A lane of `L` bits is laid out as `[guard | sign | magnitude (L-2 bits)]`
//! from the top. Sign-magnitude values keep the magnitude in the low field
//! and the sign in a separate [`SignWord`]. Signed values ([`PackedSigned`])
//! are `(L-1)`-bit two's complement with the guard bit clear, so a lane-wise
//! sum carries into its own guard bit and never into the next lane.
//!
//! Lane 0 sits at the least-significant end of word 0.

use std::fmt;

use crate::error::SwarError;
use crate::scalar::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LaneLayout {
    pub word_bits: u32,
    pub lane_bits: u32,
    pub lanes_per_word: u32,
    pub magnitude_bits: u32,
}

impl LaneLayout {
    /// Bit index of the sign within a lane.
    #[inline]
    pub fn sign_bit(&self) -> u32 {
        self.lane_bits - 2
    }

    /// Words needed for `lanes` occupied lanes.
    #[inline]
    pub fn words_for(&self, lanes: usize) -> usize {
        lanes.div_ceil(self.lanes_per_word as usize)
    }
}

pub fn make_layout(magnitude_bits: u32, word_bits: u32) -> Result<LaneLayout, SwarError> {
    if magnitude_bits == 0 {
        return Err(SwarError::ZeroMagnitude);
    }
    let lane_bits = magnitude_bits + 2;
    if lane_bits > word_bits {
        return Err(SwarError::LaneTooWide { lane_bits, word_bits });
    }
    Ok(LaneLayout {
        word_bits,
        lane_bits,
        lanes_per_word: word_bits / lane_bits,
        magnitude_bits,
    })
}

/// Per-word lane constants. `c1` and `c2` are the lowest bit and the sign
/// bit of every lane; the rest are derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwarConstants<W> {
    pub c1: W,
    pub c2: W,
    /// Top (guard) bit of every lane.
    pub guard: W,
    /// The `L-1` value bits below each guard bit.
    pub value_mask: W,
}

pub fn make_constants<W: Word>(layout: &LaneLayout) -> Result<SwarConstants<W>, SwarError> {
    if layout.word_bits > W::BITS {
        return Err(SwarError::WordTooNarrow {
            word_bits: layout.word_bits,
            register_bits: W::BITS,
        });
    }
    let mut c1 = W::zero();
    for lane in 0..layout.lanes_per_word {
        c1 = c1 | (W::one() << (lane * layout.lane_bits) as usize);
    }
    let c2 = c1 << layout.sign_bit() as usize;
    let guard = c2 << 1;
    Ok(SwarConstants {
        c1,
        c2,
        guard,
        value_mask: guard.wrapping_sub(&c1),
    })
}

/// Mask covering all bits of the first `lanes` lanes of a word.
fn lane_fill<W: Word>(layout: &LaneLayout, lanes: u32) -> W {
    let bits = lanes * layout.lane_bits;
    if bits >= W::BITS {
        W::max_value()
    } else {
        (W::one() << bits as usize) - W::one()
    }
}

/// Occupied lanes in word `j` of a stream with `count` lanes.
#[inline]
fn lanes_in_word(layout: &LaneLayout, count: usize, j: usize) -> u32 {
    let k = layout.lanes_per_word as usize;
    count.saturating_sub(j * k).min(k) as u32
}

/// Word operation tally used to instrument the query path.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct WordOps(pub u64);

impl WordOps {
    #[inline]
    pub fn add(&mut self, n: u64) {
        self.0 += n;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedMagnitudes<W> {
    pub words: Vec<W>,
    pub layout: LaneLayout,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignWord<W> {
    pub words: Vec<W>,
    pub layout: LaneLayout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedSigned<W> {
    pub words: Vec<W>,
    pub layout: LaneLayout,
    pub count: usize,
}

impl<W: Word> PackedMagnitudes<W> {
    pub fn lane(&self, i: usize) -> u128 {
        lane_bits_of(&self.words, &self.layout, i)
    }
}

impl<W: Word> SignWord<W> {
    pub fn is_negative(&self, i: usize) -> bool {
        lane_bits_of(&self.words, &self.layout, i) >> self.layout.sign_bit() & 1 == 1
    }
}

impl<W: Word> PackedSigned<W> {
    pub fn lane(&self, i: usize) -> i128 {
        let raw = lane_bits_of(&self.words, &self.layout, i);
        decode_lane(raw, &self.layout)
    }
}

fn lane_bits_of<W: Word>(words: &[W], layout: &LaneLayout, i: usize) -> u128 {
    let k = layout.lanes_per_word as usize;
    let shift = (i % k) as u32 * layout.lane_bits;
    let w = words[i / k].to_u128() >> shift;
    if layout.lane_bits == 128 {
        w
    } else {
        w & ((1u128 << layout.lane_bits) - 1)
    }
}

/// Reads the low `L-1` bits as two's complement.
fn decode_lane(raw: u128, layout: &LaneLayout) -> i128 {
    let width = layout.lane_bits - 1;
    let v = raw & ((1u128 << width) - 1);
    if v >> (width - 1) & 1 == 1 {
        (v as i128).wrapping_sub((1u128 << width) as i128)
    } else {
        v as i128
    }
}

/// Splits values into packed magnitudes and a sign word.
pub fn pack<W: Word>(values: &[i128], layout: &LaneLayout) -> Result<(PackedMagnitudes<W>, SignWord<W>), SwarError> {
    make_constants::<W>(layout)?;
    let k = layout.lanes_per_word as usize;
    let n_words = layout.words_for(values.len());
    let mut mags = vec![W::zero(); n_words];
    let mut signs = vec![W::zero(); n_words];
    for (i, &v) in values.iter().enumerate() {
        let m = v.unsigned_abs();
        if m >> layout.magnitude_bits != 0 {
            return Err(SwarError::Overflow {
                index: i,
                magnitude_bits: layout.magnitude_bits,
            });
        }
        let shift = ((i % k) as u32 * layout.lane_bits) as usize;
        mags[i / k] = mags[i / k] | (W::from_u128(m) << shift);
        if v < 0 {
            signs[i / k] = signs[i / k] | (W::one() << (shift + layout.sign_bit() as usize));
        }
    }
    Ok((
        PackedMagnitudes {
            words: mags,
            layout: *layout,
            count: values.len(),
        },
        SignWord {
            words: signs,
            layout: *layout,
        },
    ))
}

/// Convenience: pack and convert to two's complement in one step.
pub fn pack_signed<W: Word>(values: &[i128], layout: &LaneLayout) -> Result<PackedSigned<W>, SwarError> {
    let (m, s) = pack::<W>(values, layout)?;
    Ok(to_twos_complement(&m, &s))
}

pub fn unpack<W: Word>(p: &PackedSigned<W>) -> Vec<i128> {
    (0..p.count).map(|i| p.lane(i)).collect()
}

/// Copies one magnitude into every occupied lane with a single multiply by
/// `C1`.
pub fn broadcast<W: Word>(value: u128, layout: &LaneLayout, count: usize) -> Result<PackedMagnitudes<W>, SwarError> {
    if value >> layout.magnitude_bits != 0 {
        return Err(SwarError::Overflow {
            index: 0,
            magnitude_bits: layout.magnitude_bits,
        });
    }
    let k = make_constants::<W>(layout)?;
    let v = W::from_u128(value);
    let words = (0..layout.words_for(count))
        .map(|j| v.wrapping_mul(&k.c1) & lane_fill(layout, lanes_in_word(layout, count, j)))
        .collect();
    Ok(PackedMagnitudes {
        words,
        layout: *layout,
        count,
    })
}

/// Multiplies every lane by one scalar: one whole-word multiply per word on
/// the magnitudes, and an XOR of the scalar's sign into the sign word.
pub fn broadcast_multiply<W: Word>(
    mags: &PackedMagnitudes<W>,
    signs: &SignWord<W>,
    scalar: i128,
) -> Result<(PackedMagnitudes<W>, SignWord<W>), SwarError> {
    assert_eq!(mags.layout, signs.layout);
    let layout = mags.layout;
    let factor = scalar.unsigned_abs();
    for i in 0..mags.count {
        let ok = mags
            .lane(i)
            .checked_mul(factor)
            .is_some_and(|p| p >> layout.magnitude_bits == 0);
        if !ok {
            return Err(SwarError::Overflow {
                index: i,
                magnitude_bits: layout.magnitude_bits,
            });
        }
    }
    let k = make_constants::<W>(&layout)?;
    let mut ops = WordOps::default();
    let f = W::from_u128(factor);
    let mut out_m = Vec::with_capacity(mags.words.len());
    let mut out_s = Vec::with_capacity(mags.words.len());
    for (j, (&m, &s)) in mags.words.iter().zip(&signs.words).enumerate() {
        let flip = if scalar < 0 {
            k.c2 & lane_fill(&layout, lanes_in_word(&layout, mags.count, j))
        } else {
            W::zero()
        };
        let (pm, ps) = mul_word(m, s, f, flip, &mut ops);
        out_m.push(pm);
        out_s.push(ps);
    }
    Ok((
        PackedMagnitudes {
            words: out_m,
            layout,
            count: mags.count,
        },
        SignWord { words: out_s, layout },
    ))
}

pub fn to_twos_complement<W: Word>(mags: &PackedMagnitudes<W>, signs: &SignWord<W>) -> PackedSigned<W> {
    assert_eq!(mags.layout, signs.layout);
    let layout = mags.layout;
    let k = make_constants::<W>(&layout).expect("layout validated at pack time");
    let mut ops = WordOps::default();
    let words = mags
        .words
        .iter()
        .zip(&signs.words)
        .map(|(&a, &s)| twos_word(a, s, &k, &layout, &mut ops))
        .collect();
    PackedSigned {
        words,
        layout,
        count: mags.count,
    }
}

pub fn lanewise_add<W: Word>(a: &PackedSigned<W>, b: &PackedSigned<W>) -> PackedSigned<W> {
    assert_eq!(a.layout, b.layout);
    assert_eq!(a.count, b.count);
    let k = make_constants::<W>(&a.layout).expect("layout validated at pack time");
    let mut ops = WordOps::default();
    let words = a
        .words
        .iter()
        .zip(&b.words)
        .map(|(&x, &y)| add_word(x, y, &k, &mut ops))
        .collect();
    PackedSigned {
        words,
        layout: a.layout,
        count: a.count,
    }
}

/// One bit per lane, set where the lane is negative.
pub fn extract_sign_bits<W: Word>(p: &PackedSigned<W>) -> LaneMask {
    let k = make_constants::<W>(&p.layout).expect("layout validated at pack time");
    let mut mask = LaneMask::zeros(p.count);
    let mut ops = WordOps::default();
    for (j, &w) in p.words.iter().enumerate() {
        let s = sign_word(w, &k, &mut ops);
        gather(s, p.layout.sign_bit(), &p.layout, j, &mut mask, &mut ops);
    }
    mask
}

/// One bit per lane, set where the lane is exactly zero.
pub fn find_zero_lanes<W: Word>(p: &PackedSigned<W>) -> LaneMask {
    let k = make_constants::<W>(&p.layout).expect("layout validated at pack time");
    let mut mask = LaneMask::zeros(p.count);
    let mut ops = WordOps::default();
    for (j, &w) in p.words.iter().enumerate() {
        let z = zero_word(w, &k, &mut ops);
        gather(z, p.layout.lane_bits - 1, &p.layout, j, &mut mask, &mut ops);
    }
    mask
}

// Word-level primitives. Each one tallies the whole-word instructions it
// issues so the query path can be instrumented.

#[inline]
pub(crate) fn mul_word<W: Word>(mag: W, sign: W, factor: W, flip: W, ops: &mut WordOps) -> (W, W) {
    ops.add(2);
    (mag.wrapping_mul(&factor), sign ^ flip)
}

/// Sign-magnitude to two's complement:
/// `C = S >> (L-2)`, `D = S - C`, `E = A & D`, `F = (S << 1) - E`,
/// `G = A - E`, result `(F | G)` with guard bits cleared (folds `-0`).
#[inline]
pub(crate) fn twos_word<W: Word>(a: W, s: W, k: &SwarConstants<W>, layout: &LaneLayout, ops: &mut WordOps) -> W {
    let c = s >> layout.sign_bit() as usize;
    let d = s.wrapping_sub(&c);
    let e = a & d;
    let f = (s << 1).wrapping_sub(&e);
    let g = a.wrapping_sub(&e);
    ops.add(8);
    (f | g) & k.value_mask
}

#[inline]
pub(crate) fn add_word<W: Word>(x: W, y: W, k: &SwarConstants<W>, ops: &mut WordOps) -> W {
    ops.add(2);
    x.wrapping_add(&y) & k.value_mask
}

#[inline]
pub(crate) fn sign_word<W: Word>(w: W, k: &SwarConstants<W>, ops: &mut WordOps) -> W {
    ops.add(1);
    w & k.c2
}

/// Guard bit set in every lane whose value field is zero.
#[inline]
pub(crate) fn zero_word<W: Word>(w: W, k: &SwarConstants<W>, ops: &mut WordOps) -> W {
    let nonzero = w.wrapping_add(&k.value_mask) & k.guard;
    ops.add(3);
    !nonzero & k.guard
}

/// Compresses one flag bit per lane of word `j` into the dense mask. Walks
/// all `K` lanes so the cost does not depend on occupancy.
#[inline]
pub(crate) fn gather<W: Word>(w: W, bit: u32, layout: &LaneLayout, j: usize, out: &mut LaneMask, ops: &mut WordOps) {
    let k = layout.lanes_per_word as usize;
    let base = j * k;
    for l in 0..k {
        let lane = base + l;
        if lane < out.len && (w >> (l as u32 * layout.lane_bits + bit) as usize) & W::one() == W::one() {
            out.set(lane);
        }
    }
    ops.add(k as u64);
}

/// Dense per-lane bitmask. Lanes are stored 63 per `u64` block so that any
/// aligned group of three lanes lives in a single block.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaneMask {
    blocks: Vec<u64>,
    len: usize,
}

pub(crate) const BLOCK_LANES: usize = 63;

impl LaneMask {
    pub fn zeros(len: usize) -> Self {
        LaneMask {
            blocks: vec![0; len.div_ceil(BLOCK_LANES)],
            len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut m = Self::zeros(bits.len());
        for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            m.set(i);
        }
        m
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.blocks[i / BLOCK_LANES] |= 1 << (i % BLOCK_LANES);
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        i < self.len && self.blocks[i / BLOCK_LANES] >> (i % BLOCK_LANES) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &b)| {
            let mut rest = b;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(bi * BLOCK_LANES + t)
            })
        })
    }

    pub(crate) fn blocks(&self) -> &[u64] {
        &self.blocks
    }
}

/// Lane 0 first.
impl fmt::Display for LaneMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}
