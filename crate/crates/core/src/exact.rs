//! Exact orientation predicates over the original real coordinates.
//!
//! Inputs are binary floats, hence exact dyadic rationals. A floating-point
//! evaluation is accepted when its magnitude clears a forward error bound;
//! otherwise the determinant is recomputed exactly with big integers.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::geom::Point;
use crate::locator::{LocateResult, Location};
use crate::scalar::{decompose, Coord};
use crate::subdivision::TriangulatedSubdivision;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExactSign {
    Negative,
    Zero,
    Positive,
}

impl ExactSign {
    pub fn value(self) -> i8 {
        match self {
            ExactSign::Negative => -1,
            ExactSign::Zero => 0,
            ExactSign::Positive => 1,
        }
    }

    fn of<T: PartialOrd + Default>(v: T) -> Self {
        let zero = T::default();
        if v > zero {
            ExactSign::Positive
        } else if v < zero {
            ExactSign::Negative
        } else {
            ExactSign::Zero
        }
    }
}

// (3 + 16 eps) eps with eps = 2^-53
const ORIENT_BOUND: f64 = 3.330669073875472e-16;
// Below this the products may have left the normal range.
const UNDERFLOW_GUARD: f64 = 1e-270;

/// Sign of `(q - p) x (r - p)`: positive when `p, q, r` turn
/// counterclockwise.
pub fn orient<T: Coord>(p: Point<T>, q: Point<T>, r: Point<T>) -> ExactSign {
    let (px, py) = (p.x.to_f64_exact(), p.y.to_f64_exact());
    let (qx, qy) = (q.x.to_f64_exact(), q.y.to_f64_exact());
    let (rx, ry) = (r.x.to_f64_exact(), r.y.to_f64_exact());

    // both products exactly zero
    if (qx == px || ry == py) && (qy == py || rx == px) {
        return ExactSign::Zero;
    }
    let left = (qx - px) * (ry - py);
    let right = (qy - py) * (rx - px);
    let det = left - right;
    let sum = left.abs() + right.abs();
    if sum.is_finite() && sum > UNDERFLOW_GUARD && det.abs() >= ORIENT_BOUND * sum {
        return ExactSign::of(det);
    }
    orient_exact([px, py, qx, qy, rx, ry])
}

/// Exact rational evaluation on a common power-of-two scale.
fn orient_exact(v: [f64; 6]) -> ExactSign {
    let parts = v.map(decompose);
    let e0 = parts.iter().filter(|p| p.0 != 0).map(|p| p.1).min().unwrap_or(0);
    let [px, py, qx, qy, rx, ry] = parts.map(|(m, e, neg)| {
        let big = BigInt::from(m) << (e - e0).max(0) as usize;
        if neg {
            -big
        } else {
            big
        }
    });
    let det = (&qx - &px) * (&ry - &py) - (&qy - &py) * (&rx - &px);
    if det.is_zero() {
        ExactSign::Zero
    } else if det.is_positive() {
        ExactSign::Positive
    } else {
        ExactSign::Negative
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriangleHit {
    Inside,
    /// Lowest zero slot; slot `i` is the edge from vertex `i` to `i + 1`.
    OnEdge(u8),
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegenerateTriangle;

/// Classifies `q` against a counterclockwise triangle.
pub fn point_in_triangle_exact<T: Coord>(q: Point<T>, tri: [Point<T>; 3]) -> Result<TriangleHit, DegenerateTriangle> {
    if orient(tri[0], tri[1], tri[2]) == ExactSign::Zero {
        return Err(DegenerateTriangle);
    }
    Ok(classify(q, tri))
}

/// Same as [`point_in_triangle_exact`] without the degeneracy check, for
/// triangles validated at build time.
pub(crate) fn classify<T: Coord>(q: Point<T>, tri: [Point<T>; 3]) -> TriangleHit {
    let mut first_zero = None;
    for slot in 0..3 {
        match orient(tri[slot], tri[(slot + 1) % 3], q) {
            ExactSign::Negative => return TriangleHit::Outside,
            ExactSign::Zero => {
                first_zero.get_or_insert(slot as u8);
            }
            ExactSign::Positive => {}
        }
    }
    match first_zero {
        Some(slot) => TriangleHit::OnEdge(slot),
        None => TriangleHit::Inside,
    }
}

/// Linear scan over every triangle with exact tests: the ground truth the
/// packed locator is checked against. Ties go to the lowest triangle index.
pub fn locate_bruteforce<T: Coord>(t: &TriangulatedSubdivision<T>, q: Point<T>) -> LocateResult {
    for tri in 0..t.triangles.len() {
        let face = t.face_of_triangle[tri];
        let location = match classify(q, t.triangle_points(tri)) {
            TriangleHit::Inside => Location::Inside { triangle: tri, face },
            TriangleHit::OnEdge(slot) => Location::OnEdge {
                triangle: tri,
                face,
                slot,
            },
            TriangleHit::Outside => continue,
        };
        return LocateResult {
            location,
            exact_confirmed: true,
        };
    }
    LocateResult {
        location: Location::Outside,
        exact_confirmed: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    #[test]
    fn orient_examples() {
        assert_eq!(orient(pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 1.0)), ExactSign::Positive);
        assert_eq!(orient(pt(0.0, 0.0), pt(1.0, 1.0), pt(2.0, 2.0)), ExactSign::Zero);
        assert_eq!(
            orient(pt(0.0, 0.0), pt(1.0, 0.0), pt(1e-300, -1e-300)),
            ExactSign::Negative
        );
        assert_eq!(ExactSign::Negative.value(), -1);
    }

    #[test]
    fn orient_near_collinear_needs_exact_path() {
        // r sits a hair off the line through p and q
        let p = pt(0.5, 0.5);
        let q = pt(12.0, 12.0);
        let r = pt(24.0, 24.0 + 2f64.powi(-48));
        assert_eq!(orient(p, q, r), ExactSign::Positive);
        let r = pt(24.0, 24.0 - 2f64.powi(-48));
        assert_eq!(orient(p, q, r), ExactSign::Negative);
        // classic failure case for naive evaluation
        let p = pt(0.5, 0.5);
        let q = pt(0.5 + 2f64.powi(-52), 0.5 + 2f64.powi(-52));
        let r = pt(0.5 + 2f64.powi(-51), 0.5 + 2f64.powi(-51));
        assert_eq!(orient(p, q, r), ExactSign::Zero);
    }

    #[test]
    fn orient_handles_huge_and_tiny() {
        assert_eq!(
            orient(pt(-1e308, 0.0), pt(1e308, 0.0), pt(0.0, 1e308)),
            ExactSign::Positive
        );
        assert_eq!(
            orient(pt(0.0, 0.0), pt(5e-324, 0.0), pt(0.0, 5e-324)),
            ExactSign::Positive
        );
        assert_eq!(
            orient(Point::new(0.0f32, 0.0), Point::new(1.0, 0.0), Point::new(0.5, -1e-30)),
            ExactSign::Negative
        );
    }

    #[test]
    fn triangle_classification() {
        let tri = [pt(0.0, 0.0), pt(4.0, 0.0), pt(0.0, 4.0)];
        assert_eq!(point_in_triangle_exact(pt(1.0, 1.0), tri), Ok(TriangleHit::Inside));
        assert_eq!(point_in_triangle_exact(pt(2.0, 0.0), tri), Ok(TriangleHit::OnEdge(0)));
        assert_eq!(point_in_triangle_exact(pt(2.0, 2.0), tri), Ok(TriangleHit::OnEdge(1)));
        assert_eq!(point_in_triangle_exact(pt(0.0, 2.0), tri), Ok(TriangleHit::OnEdge(2)));
        assert_eq!(point_in_triangle_exact(pt(0.0, 0.0), tri), Ok(TriangleHit::OnEdge(0)));
        assert_eq!(point_in_triangle_exact(pt(4.0, 0.0), tri), Ok(TriangleHit::OnEdge(0)));
        assert_eq!(point_in_triangle_exact(pt(0.0, 4.0), tri), Ok(TriangleHit::OnEdge(1)));
        assert_eq!(point_in_triangle_exact(pt(3.0, 3.0), tri), Ok(TriangleHit::Outside));
        let flat = [pt(0.0, 0.0), pt(1.0, 1.0), pt(2.0, 2.0)];
        assert_eq!(point_in_triangle_exact(pt(1.0, 0.0), flat), Err(DegenerateTriangle));
    }

    fn exact_oracle(v: [f64; 6]) -> ExactSign {
        orient_exact(v)
    }

    fn coord() -> impl Strategy<Value = f64> {
        prop_oneof![
            -1e3f64..1e3,
            (-20i32..20).prop_map(|k| k as f64 * 0.125),
            (-1e-200f64..1e-200),
        ]
    }

    proptest! {
        #[test]
        fn filter_agrees_with_exact(v in prop::array::uniform6(coord())) {
            let s = orient(pt(v[0], v[1]), pt(v[2], v[3]), pt(v[4], v[5]));
            prop_assert_eq!(s, exact_oracle(v));
        }

        #[test]
        fn antisymmetric_and_cyclic(v in prop::array::uniform6(coord())) {
            let (p, q, r) = (pt(v[0], v[1]), pt(v[2], v[3]), pt(v[4], v[5]));
            prop_assert_eq!(orient(p, q, r).value(), -orient(p, r, q).value());
            prop_assert_eq!(orient(p, q, r), orient(q, r, p));
            prop_assert_eq!(orient(p, q, r), orient(r, p, q));
        }

        #[test]
        fn centroid_is_inside(v in prop::array::uniform6(-1e6f64..1e6)) {
            let mut tri = [pt(v[0], v[1]), pt(v[2], v[3]), pt(v[4], v[5])];
            let s = orient(tri[0], tri[1], tri[2]);
            prop_assume!(s != ExactSign::Zero);
            if s == ExactSign::Negative {
                tri.swap(1, 2);
            }
            let c = pt((v[0] + v[2] + v[4]) / 3.0, (v[1] + v[3] + v[5]) / 3.0);
            // rounding can push the centroid of a sliver out; only check
            // well-shaped triangles
            let area = ((tri[1].x - tri[0].x) * (tri[2].y - tri[0].y)
                - (tri[1].y - tri[0].y) * (tri[2].x - tri[0].x)).abs();
            let scale = v.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            prop_assume!(area > 1e-6 * scale * scale);
            prop_assert_eq!(point_in_triangle_exact(c, tri), Ok(TriangleHit::Inside));
        }
    }
}
