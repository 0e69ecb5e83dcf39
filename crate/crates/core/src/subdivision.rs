//! Input subdivisions, their triangulation over quantized coordinates, and
//! the integer line coefficients of every triangle edge.

use crate::error::{QuantizeError, SubdivisionError};
use crate::exact::{orient, ExactSign};
use crate::geom::Point;
use crate::quantizer::{compute_cut_bit, quantize, CutSpec};
use crate::scalar::Coord;
use crate::triangulate::{ear_clip, orient_i};

/// Extra fractional bits used on the single retry after a quantized
/// triangle collapses.
pub const RETRY_BITS: u32 = 2;

/// Planar subdivision: real vertices plus counterclockwise simple faces.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdivision<T> {
    pub vertices: Vec<Point<T>>,
    pub faces: Vec<Vec<usize>>,
}

impl<T: Coord> Subdivision<T> {
    pub fn new(vertices: Vec<Point<T>>, faces: Vec<Vec<usize>>) -> Self {
        Subdivision { vertices, faces }
    }

    /// Every x and y coordinate, the input of the cut computation.
    pub fn coordinates(&self) -> Vec<T> {
        self.vertices.iter().flat_map(|p| [p.x, p.y]).collect()
    }

    /// Checks indices, orientation and simplicity of every face.
    pub fn validate(&self) -> Result<(), SubdivisionError> {
        if self.faces.is_empty() {
            return Err(SubdivisionError::NoFaces);
        }
        if let Some(p) = self.vertices.iter().find(|p| !p.is_finite()) {
            let bad = if p.x.is_finite() { p.y } else { p.x };
            return Err(QuantizeError::NonFinite(bad.to_f64_exact()).into());
        }
        let count = self.vertices.len();
        for (f, face) in self.faces.iter().enumerate() {
            if face.len() < 3 {
                return Err(SubdivisionError::ShortFace {
                    face: f,
                    len: face.len(),
                });
            }
            let mut seen = std::collections::HashSet::with_capacity(face.len());
            for &i in face {
                if i >= count {
                    return Err(SubdivisionError::BadIndex {
                        face: f,
                        index: i,
                        count,
                    });
                }
                if !seen.insert(i) {
                    return Err(SubdivisionError::RepeatedVertex { face: f, index: i });
                }
            }
            let pts: Vec<Point<T>> = face.iter().map(|&i| self.vertices[i]).collect();
            check_simple(f, &pts)?;
            if face_orientation(&pts) != ExactSign::Positive {
                return Err(SubdivisionError::Clockwise { face: f });
            }
        }
        Ok(())
    }
}

/// Orientation at the lowest-then-leftmost corner, which is strictly convex
/// in any simple polygon.
fn face_orientation<T: Coord>(pts: &[Point<T>]) -> ExactSign {
    let n = pts.len();
    let low = (0..n)
        .min_by(|&a, &b| {
            (pts[a].y, pts[a].x)
                .partial_cmp(&(pts[b].y, pts[b].x))
                .expect("finite coordinates")
        })
        .expect("non-empty face");
    orient(pts[(low + n - 1) % n], pts[low], pts[(low + 1) % n])
}

fn on_segment<T: Coord>(p: Point<T>, a: Point<T>, b: Point<T>) -> bool {
    orient(a, b, p) == ExactSign::Zero
        && p.x >= a.x.min(b.x)
        && p.x <= a.x.max(b.x)
        && p.y >= a.y.min(b.y)
        && p.y <= a.y.max(b.y)
}

fn segments_touch<T: Coord>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>) -> bool {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    if o1 != o2
        && o3 != o4
        && o1 != ExactSign::Zero
        && o2 != ExactSign::Zero
        && o3 != ExactSign::Zero
        && o4 != ExactSign::Zero
    {
        return true;
    }
    on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) || on_segment(b, c, d)
}

/// Quadratic pairwise edge test. Adjacent edges may only share their
/// common endpoint.
fn check_simple<T: Coord>(face: usize, pts: &[Point<T>]) -> Result<(), SubdivisionError> {
    let n = pts.len();
    let edge = |i: usize| (pts[i], pts[(i + 1) % n]);
    for i in 0..n {
        let (a, b) = edge(i);
        for j in i + 1..n {
            let (c, d) = edge(j);
            let crossing = if j == i + 1 {
                // shares b == c; fold-back shows up as d on segment ab
                on_segment(d, a, b) || on_segment(a, c, d)
            } else if i == 0 && j == n - 1 {
                on_segment(c, a, b) || on_segment(b, c, d)
            } else {
                segments_touch(a, b, c, d)
            };
            if crossing {
                return Err(SubdivisionError::SelfIntersecting {
                    face,
                    first: i,
                    second: j,
                });
            }
        }
    }
    Ok(())
}

/// Triangles of a subdivision, counterclockwise in both quantized and real
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangulatedSubdivision<T> {
    pub vertices: Vec<Point<T>>,
    pub quantized: Vec<[i64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub face_of_triangle: Vec<usize>,
    pub face_count: usize,
    pub cut: CutSpec,
}

impl<T: Coord> TriangulatedSubdivision<T> {
    pub fn triangle_points(&self, t: usize) -> [Point<T>; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn triangle_quantized(&self, t: usize) -> [[i64; 2]; 3] {
        self.triangles[t].map(|v| self.quantized[v])
    }
}

/// Inside-positive line function `a*x + b*y + c` of one directed edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeCoeffs {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub triangle: usize,
    pub edge_slot: u8,
}

impl EdgeCoeffs {
    /// Line through `from -> to`; positive on its left.
    pub fn through(from: [i64; 2], to: [i64; 2], triangle: usize, edge_slot: u8) -> Self {
        let (xj, yj) = (i128::from(from[0]), i128::from(from[1]));
        let (xk, yk) = (i128::from(to[0]), i128::from(to[1]));
        EdgeCoeffs {
            a: yj - yk,
            b: xk - xj,
            c: xj * yk - xk * yj,
            triangle,
            edge_slot,
        }
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        self.a * x + self.b * y + self.c
    }
}

/// Triangulates with the cut derived from the input, retrying once with
/// [`RETRY_BITS`] finer resolution if a face degenerates.
pub fn triangulate<T: Coord>(s: &Subdivision<T>) -> Result<TriangulatedSubdivision<T>, SubdivisionError> {
    s.validate()?;
    let cut = compute_cut_bit(&s.coordinates())?;
    match triangulate_at(s, cut) {
        Err(SubdivisionError::Degenerate { .. }) => triangulate_at(s, cut.finer(RETRY_BITS)),
        other => other,
    }
}

/// Triangulates a validated subdivision at a fixed cut.
pub fn triangulate_at<T: Coord>(
    s: &Subdivision<T>,
    cut: CutSpec,
) -> Result<TriangulatedSubdivision<T>, SubdivisionError> {
    let quantized = s
        .vertices
        .iter()
        .map(|p| Ok([quantize::<T, i64>(p.x, &cut)?, quantize::<T, i64>(p.y, &cut)?]))
        .collect::<Result<Vec<_>, QuantizeError>>()?;

    let mut triangles = Vec::new();
    let mut face_of_triangle = Vec::new();
    for (f, face) in s.faces.iter().enumerate() {
        let degenerate = SubdivisionError::Degenerate {
            face: f,
            cut_bit: cut.cut_bit,
        };
        let tris = ear_clip(face, &quantized).ok_or(degenerate.clone())?;
        for t in tris {
            if orient(s.vertices[t[0]], s.vertices[t[1]], s.vertices[t[2]]) != ExactSign::Positive {
                return Err(degenerate);
            }
            triangles.push(t);
            face_of_triangle.push(f);
        }
    }
    Ok(TriangulatedSubdivision {
        vertices: s.vertices.clone(),
        quantized,
        triangles,
        face_of_triangle,
        face_count: s.faces.len(),
        cut,
    })
}

/// The three inside-positive edge functions of triangle `tri`; slot `i`
/// runs from vertex `i` to vertex `i + 1`.
pub fn edge_coefficients<T: Coord>(
    t: &TriangulatedSubdivision<T>,
    tri: usize,
) -> Result<[EdgeCoeffs; 3], SubdivisionError> {
    let q = t.triangle_quantized(tri);
    if orient_i(q[0], q[1], q[2]) == 0 {
        return Err(SubdivisionError::ZeroArea { triangle: tri });
    }
    Ok([0u8, 1, 2].map(|s| EdgeCoeffs::through(q[s as usize], q[(s as usize + 1) % 3], tri, s)))
}
