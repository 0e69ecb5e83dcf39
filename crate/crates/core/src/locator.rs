//! Packed edge index and point-location queries.
//!
//! Every triangle contributes three lanes (`3t`, `3t + 1`, `3t + 2`) to each
//! of the coefficient streams. A query evaluates all edge functions with a
//! fixed sequence of word operations per packed word, keeps the triangles
//! whose three lanes are nonnegative, and confirms them against the
//! original real coordinates.

use std::marker::PhantomData;

use crate::error::{BuildError, LocateError, SwarError};
use crate::exact::{classify, TriangleHit};
use crate::geom::{BoundingBox, Point};
use crate::quantizer::{error_budget, quantize, CutSpec};
use crate::scalar::{bit_len_i128, Coord, Word};
use crate::subdivision::{edge_coefficients, triangulate, EdgeCoeffs, Subdivision, TriangulatedSubdivision};
use crate::swar::{
    self, add_word, gather, make_constants, make_layout, mul_word, sign_word, twos_word, zero_word, LaneLayout,
    LaneMask, PackedMagnitudes, PackedSigned, SignWord, SwarConstants, WordOps, BLOCK_LANES,
};

/// Three packed coefficient streams and the constants to evaluate them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeStreams<W> {
    pub layout: LaneLayout,
    pub constants: SwarConstants<W>,
    pub a: (PackedMagnitudes<W>, SignWord<W>),
    pub b: (PackedMagnitudes<W>, SignWord<W>),
    /// Query-independent, so stored in two's complement up front.
    pub c: PackedSigned<W>,
    /// `C2` restricted to occupied lanes, per word.
    occupied_signs: Vec<W>,
    /// `+band` in every occupied lane.
    band_words: Vec<W>,
    pub band: u128,
}

impl<W: Word> EdgeStreams<W> {
    /// Packs `(a, b, c)` triples, one lane per triple. Lanes whose
    /// evaluation falls below `-band` are reported by [`Self::below_band`].
    pub fn from_coefficients(
        coeffs: &[(i128, i128, i128)],
        layout: &LaneLayout,
        band: u128,
    ) -> Result<Self, SwarError> {
        let constants = make_constants::<W>(layout)?;
        let col = |f: fn(&(i128, i128, i128)) -> i128| coeffs.iter().map(f).collect::<Vec<_>>();
        let a = swar::pack::<W>(&col(|e| e.0), layout)?;
        let b = swar::pack::<W>(&col(|e| e.1), layout)?;
        let c = swar::pack_signed::<W>(&col(|e| e.2), layout)?;
        let occupied_signs = swar::pack::<W>(&vec![-1; coeffs.len()], layout)?.1.words;
        let band_words = swar::broadcast::<W>(band, layout, coeffs.len())?.words;
        Ok(EdgeStreams {
            layout: *layout,
            constants,
            a,
            b,
            c,
            occupied_signs,
            band_words,
            band,
        })
    }

    pub fn lanes(&self) -> usize {
        self.c.count
    }

    pub fn words(&self) -> usize {
        self.c.words.len()
    }

    #[inline]
    fn word_value(&self, j: usize, fx: W, fy: W, neg_x: bool, neg_y: bool, ops: &mut WordOps) -> W {
        let k = &self.constants;
        let flip = |neg: bool| if neg { self.occupied_signs[j] } else { W::zero() };
        let (am, as_) = mul_word(self.a.0.words[j], self.a.1.words[j], fx, flip(neg_x), ops);
        let (bm, bs) = mul_word(self.b.0.words[j], self.b.1.words[j], fy, flip(neg_y), ops);
        let ta = twos_word(am, as_, k, &self.layout, ops);
        let tb = twos_word(bm, bs, k, &self.layout, ops);
        let ab = add_word(ta, tb, k, ops);
        add_word(ab, self.c.words[j], k, ops)
    }

    fn factors(x1: i64, y1: i64) -> (W, W, bool, bool) {
        (
            W::from_u128(u128::from(x1.unsigned_abs())),
            W::from_u128(u128::from(y1.unsigned_abs())),
            x1 < 0,
            y1 < 0,
        )
    }

    /// `a*x1 + b*y1 + c` in every lane.
    pub fn values(&self, x1: i64, y1: i64) -> PackedSigned<W> {
        let (fx, fy, nx, ny) = Self::factors(x1, y1);
        let mut ops = WordOps::default();
        let words = (0..self.words())
            .map(|j| self.word_value(j, fx, fy, nx, ny, &mut ops))
            .collect();
        PackedSigned {
            words,
            layout: self.layout,
            count: self.lanes(),
        }
    }

    /// Per-lane negative and zero masks of the edge functions at
    /// `(x1, y1)`, tallying every word operation into `ops`.
    pub fn evaluate(&self, x1: i64, y1: i64, ops: &mut WordOps) -> (LaneMask, LaneMask) {
        let (fx, fy, nx, ny) = Self::factors(x1, y1);
        let k = &self.constants;
        let sign_at = self.layout.sign_bit();
        let guard_at = self.layout.lane_bits - 1;
        let mut neg = LaneMask::zeros(self.lanes());
        let mut zero = LaneMask::zeros(self.lanes());
        for j in 0..self.words() {
            let s = self.word_value(j, fx, fy, nx, ny, ops);
            gather(sign_word(s, k, ops), sign_at, &self.layout, j, &mut neg, ops);
            gather(zero_word(s, k, ops), guard_at, &self.layout, j, &mut zero, ops);
        }
        (neg, zero)
    }

    /// Lanes whose edge function is below `-band`.
    pub fn below_band(&self, x1: i64, y1: i64, ops: &mut WordOps) -> LaneMask {
        let (fx, fy, nx, ny) = Self::factors(x1, y1);
        let k = &self.constants;
        let mut out = LaneMask::zeros(self.lanes());
        for j in 0..self.words() {
            let s = self.word_value(j, fx, fy, nx, ny, ops);
            let shifted = add_word(s, self.band_words[j], k, ops);
            gather(
                sign_word(shifted, k, ops),
                self.layout.sign_bit(),
                &self.layout,
                j,
                &mut out,
                ops,
            );
        }
        out
    }
}

/// A candidate triangle from the packed filter and the slots whose edge
/// function was exactly zero (bit `i` for slot `i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub triangle: usize,
    pub on_edge_slots: u8,
}

impl Candidate {
    pub fn slots(&self) -> impl Iterator<Item = u8> + '_ {
        (0..3u8).filter(move |s| self.on_edge_slots >> s & 1 == 1)
    }
}

// bits 0, 3, ..., 60 of a 63-lane block
const GROUP_STARTS: u64 = 0x1249_2492_4924_9249 & ((1 << 63) - 1);

/// Triangles none of whose three lanes is set in `neg`, scanning 21
/// triangles per mask block with word operations.
pub fn candidates(triangles: usize, neg: &LaneMask, zero: &LaneMask) -> Vec<Candidate> {
    let mut out = Vec::new();
    let groups_per_block = BLOCK_LANES / 3;
    for (bi, (&n, &z)) in neg.blocks().iter().zip(zero.blocks()).enumerate() {
        let first = bi * groups_per_block;
        if first >= triangles {
            break;
        }
        let live = (triangles - first).min(groups_per_block);
        let valid = if live == groups_per_block {
            GROUP_STARTS
        } else {
            GROUP_STARTS & ((1u64 << (3 * live)) - 1)
        };
        let any_neg = n | n >> 1 | n >> 2;
        let mut hits = !any_neg & valid;
        while hits != 0 {
            let bit = hits.trailing_zeros();
            hits &= hits - 1;
            out.push(Candidate {
                triangle: first + bit as usize / 3,
                on_edge_slots: (z >> bit & 0b111) as u8,
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Inside { triangle: usize, face: usize },
    OnEdge { triangle: usize, face: usize, slot: u8 },
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocationKind {
    Inside,
    OnEdge,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocateResult {
    pub location: Location,
    pub exact_confirmed: bool,
}

impl LocateResult {
    pub fn kind(&self) -> LocationKind {
        match self.location {
            Location::Inside { .. } => LocationKind::Inside,
            Location::OnEdge { .. } => LocationKind::OnEdge,
            Location::Outside => LocationKind::Outside,
        }
    }

    pub fn triangle(&self) -> Option<usize> {
        match self.location {
            Location::Inside { triangle, .. } | Location::OnEdge { triangle, .. } => Some(triangle),
            Location::Outside => None,
        }
    }

    pub fn face(&self) -> Option<usize> {
        match self.location {
            Location::Inside { face, .. } | Location::OnEdge { face, .. } => Some(face),
            Location::Outside => None,
        }
    }

    pub fn edge_slot(&self) -> Option<u8> {
        match self.location {
            Location::OnEdge { slot, .. } => Some(slot),
            _ => None,
        }
    }
}

/// A query in real and quantized form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryPoint<T> {
    pub x0: T,
    pub y0: T,
    pub x1: i64,
    pub y1: i64,
}

/// Whether candidates are confirmed with exact arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fallback {
    #[default]
    Exact,
    /// Packed filter only; first candidate wins.
    Off,
}

/// The packed index over a triangulated subdivision.
#[derive(Debug, Clone, PartialEq)]
pub struct PackedEdgeIndex<T, W> {
    pub cut: CutSpec,
    pub streams: EdgeStreams<W>,
    pub geometry: TriangulatedSubdivision<T>,
    pub bbox: BoundingBox<T>,
    /// Largest `|a|` or `|b|` over all edges, in real units.
    pub coeff_bound: f64,
    pub error_budget: f64,
    _word: PhantomData<W>,
}

/// `|s| < 2^(B+4) + 8` bounds how far truncating all six coordinates of an
/// orientation test can move it, in quantized units.
fn band_for(width_b: u32) -> u128 {
    (1u128 << (width_b + 4)) + 8
}

impl<T: Coord, W: Word> PackedEdgeIndex<T, W> {
    pub fn build(s: &Subdivision<T>) -> Result<Self, BuildError> {
        let geometry = triangulate(s)?;
        Self::from_triangulation(geometry)
    }

    pub fn from_triangulation(geometry: TriangulatedSubdivision<T>) -> Result<Self, BuildError> {
        let cut = geometry.cut;
        let width = cut.width_b;
        if width > 61 {
            return Err(BuildError::CoordinateWidth(width));
        }
        let layout = make_layout(2 * width + 4, W::BITS)?;

        let mut coeffs = Vec::with_capacity(3 * geometry.triangles.len());
        for t in 0..geometry.triangles.len() {
            for e in edge_coefficients(&geometry, t)? {
                check_widths(&e, coeffs.len(), width)?;
                coeffs.push((e.a, e.b, e.c));
            }
        }
        let band = band_for(width);
        if band + (1u128 << (2 * width + 3)) > 1u128 << layout.magnitude_bits {
            return Err(BuildError::CoordinateWidth(width));
        }
        let streams = EdgeStreams::from_coefficients(&coeffs, &layout, band)?;

        let mut coeff_bound = 0.0f64;
        for tri in &geometry.triangles {
            for s in 0..3 {
                let (p, q) = (geometry.vertices[tri[s]], geometry.vertices[tri[(s + 1) % 3]]);
                coeff_bound = coeff_bound
                    .max((q.x.to_f64_exact() - p.x.to_f64_exact()).abs())
                    .max((q.y.to_f64_exact() - p.y.to_f64_exact()).abs());
            }
        }
        let bbox = BoundingBox::of(geometry.vertices.iter().copied()).expect("validated subdivision has vertices");
        Ok(PackedEdgeIndex {
            cut,
            streams,
            bbox,
            coeff_bound,
            error_budget: error_budget(&cut, coeff_bound),
            geometry,
            _word: PhantomData,
        })
    }

    pub fn layout(&self) -> &LaneLayout {
        &self.streams.layout
    }

    pub fn triangle_count(&self) -> usize {
        self.geometry.triangles.len()
    }

    pub fn words_per_stream(&self) -> usize {
        self.streams.words()
    }

    /// Lane `i` holds slot `i % 3` of triangle `i / 3`.
    pub fn lane_map(&self, lane: usize) -> (usize, u8) {
        (lane / 3, (lane % 3) as u8)
    }

    /// Quantizes a query; `None` when it lies outside the bounding box.
    pub fn query_point(&self, x0: T, y0: T) -> Option<QueryPoint<T>> {
        if !self.bbox.contains(Point::new(x0, y0)) {
            return None;
        }
        let x1 = quantize::<T, i64>(x0, &self.cut).ok()?;
        let y1 = quantize::<T, i64>(y0, &self.cut).ok()?;
        Some(QueryPoint { x0, y0, x1, y1 })
    }

    pub fn evaluate(&self, q: &QueryPoint<T>) -> (LaneMask, LaneMask) {
        self.streams.evaluate(q.x1, q.y1, &mut WordOps::default())
    }

    /// [`Self::evaluate`] plus the number of word operations it issued.
    pub fn evaluate_counted(&self, q: &QueryPoint<T>) -> (LaneMask, LaneMask, WordOps) {
        let mut ops = WordOps::default();
        let (n, z) = self.streams.evaluate(q.x1, q.y1, &mut ops);
        (n, z, ops)
    }

    pub fn candidates(&self, neg: &LaneMask, zero: &LaneMask) -> Vec<Candidate> {
        candidates(self.triangle_count(), neg, zero)
    }

    fn located(&self, t: usize, hit: TriangleHit) -> Option<Location> {
        let face = self.geometry.face_of_triangle[t];
        match hit {
            TriangleHit::Inside => Some(Location::Inside { triangle: t, face }),
            TriangleHit::OnEdge(slot) => Some(Location::OnEdge {
                triangle: t,
                face,
                slot,
            }),
            TriangleHit::Outside => None,
        }
    }

    pub fn locate(&self, x0: T, y0: T) -> Result<LocateResult, LocateError> {
        self.locate_with(x0, y0, Fallback::Exact)
    }

    pub fn locate_with(&self, x0: T, y0: T, fallback: Fallback) -> Result<LocateResult, LocateError> {
        if !(x0.is_finite() && y0.is_finite()) {
            return Err(LocateError::NonFinite);
        }
        let outside = LocateResult {
            location: Location::Outside,
            exact_confirmed: false,
        };
        let Some(q) = self.query_point(x0, y0) else {
            return Ok(outside);
        };
        let (neg, zero) = self.evaluate(&q);
        let cands = self.candidates(&neg, &zero);

        if fallback == Fallback::Off {
            let location = cands.first().map_or(Location::Outside, |c| {
                let face = self.geometry.face_of_triangle[c.triangle];
                match c.slots().next() {
                    Some(slot) => Location::OnEdge {
                        triangle: c.triangle,
                        face,
                        slot,
                    },
                    None => Location::Inside {
                        triangle: c.triangle,
                        face,
                    },
                }
            });
            return Ok(LocateResult {
                location,
                exact_confirmed: false,
            });
        }

        let p = Point::new(x0, y0);
        for c in &cands {
            if classify(p, self.geometry.triangle_points(c.triangle)) == TriangleHit::Inside {
                return Ok(LocateResult {
                    location: Location::Inside {
                        triangle: c.triangle,
                        face: self.geometry.face_of_triangle[c.triangle],
                    },
                    exact_confirmed: true,
                });
            }
        }
        // Boundary contact or a filter miss: every triangle that is not
        // provably outside gets an exact test, lowest index first.
        let below = self.streams.below_band(q.x1, q.y1, &mut WordOps::default());
        let none = LaneMask::zeros(below.len());
        for c in candidates(self.triangle_count(), &below, &none) {
            let hit = classify(p, self.geometry.triangle_points(c.triangle));
            if let Some(location) = self.located(c.triangle, hit) {
                return Ok(LocateResult {
                    location,
                    exact_confirmed: true,
                });
            }
        }
        Ok(LocateResult {
            location: Location::Outside,
            exact_confirmed: true,
        })
    }
}

fn check_widths(e: &EdgeCoeffs, lane: usize, width: u32) -> Result<(), BuildError> {
    for (v, bound) in [(e.a, width + 1), (e.b, width + 1), (e.c, 2 * width + 2)] {
        let bits = bit_len_i128(v);
        if bits > bound {
            return Err(BuildError::CoefficientWidth { lane, bits, bound });
        }
    }
    Ok(())
}
