//! Text formats for subdivisions and queries, and the binary index layout.
//!
//! Subdivision text:
//!
//! ```text
//! vertices <n>
//! <x> <y>            (n lines)
//! faces <f>
//! <i> <j> <k> ...    (f lines, counterclockwise vertex indices)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Query text is one
//! `<x> <y>` pair per line.
//!
//! Index binary, version 1, all integers little-endian:
//!
//! | field | encoding |
//! |---|---|
//! | magic | `PTLOCIDX` (8 bytes) |
//! | version | u16 = 1 |
//! | coordinate tag | u8: 32 or 64 |
//! | word bits | u16 |
//! | lane bits, lanes per word, magnitude bits | 3 x u32 |
//! | base bit, cut bit | 2 x i32 |
//! | width B | u32 |
//! | err, max_abs, coeff bound, error budget | 4 x f64 bits |
//! | band | u128 |
//! | vertex count, triangle count, face count, words per stream | 4 x u32 |
//! | a magnitudes, a signs, b magnitudes, b signs, c | 5 x words, lane 0 lowest |
//! | vertices | per vertex: x, y (coordinate bits), qx, qy (i64) |
//! | triangles | per triangle: 3 x u32 vertex, u32 face |
//!
//! Everything after the header is derivable from the geometry section and
//! the cut; readers rebuild it and reject the file on any disagreement.

use std::str::FromStr;

use crate::error::FormatError;
use crate::geom::Point;
use crate::locator::PackedEdgeIndex;
use crate::quantizer::{quantize, CutSpec};
use crate::scalar::{Coord, Word};
use crate::subdivision::{Subdivision, TriangulatedSubdivision};

pub const MAGIC: &[u8; 8] = b"PTLOCIDX";
pub const VERSION: u16 = 1;

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

fn parse_coord<T: Coord>(tok: &str, line: usize) -> Result<T, FormatError> {
    let v = T::from_str(tok).map_err(|_| parse_err(line, format!("bad number `{tok}`")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite number `{tok}`")));
    }
    Ok(v)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn header(line: Option<(usize, &str)>, keyword: &str) -> Result<(usize, usize), FormatError> {
    let (no, text) = line.ok_or_else(|| parse_err(0, format!("missing `{keyword}` header")))?;
    let mut it = text.split_whitespace();
    if it.next() != Some(keyword) {
        return Err(parse_err(no, format!("expected `{keyword} <count>`")));
    }
    let count = it
        .next()
        .and_then(|c| usize::from_str(c).ok())
        .ok_or_else(|| parse_err(no, format!("expected `{keyword} <count>`")))?;
    if it.next().is_some() {
        return Err(parse_err(no, "trailing tokens"));
    }
    Ok((no, count))
}

fn parse_pair<T: Coord>(no: usize, text: &str) -> Result<Point<T>, FormatError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(parse_err(no, "expected `x y`"));
    }
    Ok(Point::new(parse_coord(toks[0], no)?, parse_coord(toks[1], no)?))
}

pub fn parse_subdivision<T: Coord>(text: &str) -> Result<Subdivision<T>, FormatError> {
    let mut lines = content_lines(text);
    let (_, n) = header(lines.next(), "vertices")?;
    let mut vertices = Vec::with_capacity(n);
    for _ in 0..n {
        let (no, l) = lines.next().ok_or_else(|| parse_err(0, "too few vertex lines"))?;
        vertices.push(parse_pair(no, l)?);
    }
    let (_, f) = header(lines.next(), "faces")?;
    let mut faces = Vec::with_capacity(f);
    for _ in 0..f {
        let (no, l) = lines.next().ok_or_else(|| parse_err(0, "too few face lines"))?;
        let face = l
            .split_whitespace()
            .map(|t| usize::from_str(t).map_err(|_| parse_err(no, format!("bad index `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        faces.push(face);
    }
    if let Some((no, _)) = lines.next() {
        return Err(parse_err(no, "unexpected trailing content"));
    }
    Ok(Subdivision::new(vertices, faces))
}

pub fn write_subdivision<T: Coord>(s: &Subdivision<T>) -> String {
    let mut out = format!("vertices {}\n", s.vertices.len());
    for p in &s.vertices {
        out.push_str(&format!("{} {}\n", p.x, p.y));
    }
    out.push_str(&format!("faces {}\n", s.faces.len()));
    for f in &s.faces {
        let idx: Vec<String> = f.iter().map(|i| i.to_string()).collect();
        out.push_str(&idx.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_queries<T: Coord>(text: &str) -> Result<Vec<Point<T>>, FormatError> {
    content_lines(text).map(|(no, l)| parse_pair(no, l)).collect()
}

/// Fixed-size header fields, readable without knowing the generic types.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexHeader {
    pub version: u16,
    pub coord_tag: u8,
    pub word_bits: u16,
}

pub fn peek_header(bytes: &[u8]) -> Result<IndexHeader, FormatError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(FormatError::BadMagic);
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(FormatError::Version(version));
    }
    Ok(IndexHeader {
        version,
        coord_tag: r.u8()?,
        word_bits: r.u16()?,
    })
}

pub fn write_index<T: Coord, W: Word>(idx: &PackedEdgeIndex<T, W>) -> Vec<u8> {
    let mut out = Vec::new();
    let l = idx.layout();
    let g = &idx.geometry;
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(T::TAG);
    out.extend_from_slice(&(W::BITS as u16).to_le_bytes());
    for v in [l.lane_bits, l.lanes_per_word, l.magnitude_bits] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&idx.cut.base_bit.to_le_bytes());
    out.extend_from_slice(&idx.cut.cut_bit.to_le_bytes());
    out.extend_from_slice(&idx.cut.width_b.to_le_bytes());
    for v in [idx.cut.err, idx.cut.max_abs, idx.coeff_bound, idx.error_budget] {
        out.extend_from_slice(&v.to_bits().to_le_bytes());
    }
    out.extend_from_slice(&idx.streams.band.to_le_bytes());
    for v in [
        g.vertices.len(),
        g.triangles.len(),
        g.face_count,
        idx.words_per_stream(),
    ] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    let s = &idx.streams;
    for words in [&s.a.0.words, &s.a.1.words, &s.b.0.words, &s.b.1.words, &s.c.words] {
        for w in words.iter() {
            w.to_le_vec(&mut out);
        }
    }
    for (p, q) in g.vertices.iter().zip(&g.quantized) {
        p.x.to_le_vec(&mut out);
        p.y.to_le_vec(&mut out);
        out.extend_from_slice(&q[0].to_le_bytes());
        out.extend_from_slice(&q[1].to_le_bytes());
    }
    for (t, &f) in g.triangles.iter().zip(&g.face_of_triangle) {
        for v in t {
            out.extend_from_slice(&(*v as u32).to_le_bytes());
        }
        out.extend_from_slice(&(f as u32).to_le_bytes());
    }
    out
}

pub fn read_index<T: Coord, W: Word>(bytes: &[u8]) -> Result<PackedEdgeIndex<T, W>, FormatError> {
    let head = peek_header(bytes)?;
    if head.coord_tag != T::TAG || u32::from(head.word_bits) != W::BITS {
        return Err(FormatError::TypeMismatch {
            stored: format!("f{} coordinates, {}-bit words", head.coord_tag, head.word_bits),
            expected: format!("f{} coordinates, {}-bit words", T::TAG, W::BITS),
        });
    }
    let mut r = Reader { bytes, pos: 13 };
    let lane = [r.u32()?, r.u32()?, r.u32()?];
    let (base_bit, cut_bit, width_b) = (r.i32()?, r.i32()?, r.u32()?);
    let [err, max_abs, coeff_bound, budget] = [r.f64()?, r.f64()?, r.f64()?, r.f64()?];
    let band = r.u128()?;
    let [nv, nt, nf, nw] = [r.u32()?, r.u32()?, r.u32()?, r.u32()?].map(|v| v as usize);

    let wbytes = W::BITS as usize / 8;
    let mut streams = Vec::with_capacity(5);
    for _ in 0..5 {
        let raw = r.take(nw.checked_mul(wbytes).ok_or(FormatError::Truncated)?)?;
        streams.push(raw.chunks_exact(wbytes).map(W::from_le_slice).collect::<Vec<W>>());
    }
    let mut vertices = Vec::with_capacity(nv.min(bytes.len()));
    let mut quantized = Vec::with_capacity(nv.min(bytes.len()));
    for _ in 0..nv {
        let x = T::from_le_slice(r.take(T::BYTES)?);
        let y = T::from_le_slice(r.take(T::BYTES)?);
        vertices.push(Point::new(x, y));
        quantized.push([r.i64()?, r.i64()?]);
    }
    let mut triangles = Vec::with_capacity(nt.min(bytes.len()));
    let mut face_of_triangle = Vec::with_capacity(nt.min(bytes.len()));
    for _ in 0..nt {
        let t = [r.u32()? as usize, r.u32()? as usize, r.u32()? as usize];
        if t.iter().any(|&v| v >= nv) {
            return Err(FormatError::Corrupt("triangle vertex out of range".into()));
        }
        let f = r.u32()? as usize;
        if f >= nf {
            return Err(FormatError::Corrupt("face id out of range".into()));
        }
        triangles.push(t);
        face_of_triangle.push(f);
    }
    if r.pos != bytes.len() {
        return Err(FormatError::Corrupt("trailing bytes".into()));
    }

    let cut = CutSpec {
        base_bit,
        cut_bit,
        width_b,
        err,
        max_abs,
    };
    if cut != CutSpec::from_base(base_bit, max_abs) && cut != CutSpec::from_base(base_bit, max_abs).finer(2) {
        return Err(FormatError::Corrupt(
            "cut spec does not follow from its base bit".into(),
        ));
    }
    for (p, q) in vertices.iter().zip(&quantized) {
        let expect = [quantize::<T, i64>(p.x, &cut), quantize::<T, i64>(p.y, &cut)];
        if expect != [Ok(q[0]), Ok(q[1])] {
            return Err(FormatError::Corrupt(
                "quantized vertex does not match its real coordinates".into(),
            ));
        }
    }
    let geometry = TriangulatedSubdivision {
        vertices,
        quantized,
        triangles,
        face_of_triangle,
        face_count: nf,
        cut,
    };
    let idx = PackedEdgeIndex::<T, W>::from_triangulation(geometry)
        .map_err(|e| FormatError::Corrupt(format!("geometry does not rebuild: {e}")))?;

    let l = idx.layout();
    let s = &idx.streams;
    let stored_ok = [l.lane_bits, l.lanes_per_word, l.magnitude_bits] == lane
        && idx.coeff_bound.to_bits() == coeff_bound.to_bits()
        && idx.error_budget.to_bits() == budget.to_bits()
        && s.band == band
        && s.a.0.words == streams[0]
        && s.a.1.words == streams[1]
        && s.b.0.words == streams[2]
        && s.b.1.words == streams[3]
        && s.c.words == streams[4];
    if !stored_ok {
        return Err(FormatError::Corrupt("packed streams disagree with the geometry".into()));
    }
    Ok(idx)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        let end = self.pos.checked_add(n).ok_or(FormatError::Truncated)?;
        let s = self.bytes.get(self.pos..end).ok_or(FormatError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], FormatError> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.array::<1>()?[0])
    }

    fn u16(&mut self) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn i32(&mut self) -> Result<i32, FormatError> {
        Ok(i32::from_le_bytes(self.array()?))
    }

    fn i64(&mut self) -> Result<i64, FormatError> {
        Ok(i64::from_le_bytes(self.array()?))
    }

    fn u128(&mut self) -> Result<u128, FormatError> {
        Ok(u128::from_le_bytes(self.array()?))
    }

    fn f64(&mut self) -> Result<f64, FormatError> {
        Ok(f64::from_bits(u64::from_le_bytes(self.array()?)))
    }
}
