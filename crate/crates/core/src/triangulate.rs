//! Ear clipping over integer coordinates.

/// Twice the signed area of `(p, q, r)`; positive for a left turn.
#[inline]
pub(crate) fn orient_i(p: [i64; 2], q: [i64; 2], r: [i64; 2]) -> i128 {
    let (px, py) = (i128::from(p[0]), i128::from(p[1]));
    (i128::from(q[0]) - px) * (i128::from(r[1]) - py) - (i128::from(q[1]) - py) * (i128::from(r[0]) - px)
}

/// Closed-triangle containment for a counterclockwise triangle.
#[inline]
fn in_closed_triangle(q: [i64; 2], a: [i64; 2], b: [i64; 2], c: [i64; 2]) -> bool {
    orient_i(a, b, q) >= 0 && orient_i(b, c, q) >= 0 && orient_i(c, a, q) >= 0
}

/// Triangulates a counterclockwise polygon given as indices into `pts`.
///
/// Returns `None` when no strictly convex empty ear can be found, which
/// only happens for polygons that are not simple at this resolution.
pub(crate) fn ear_clip(poly: &[usize], pts: &[[i64; 2]]) -> Option<Vec<[usize; 3]>> {
    let n = poly.len();
    if n < 3 {
        return None;
    }
    let mut next: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let mut prev: Vec<usize> = (0..n).map(|i| (i + n - 1) % n).collect();
    let at = |i: usize| pts[poly[i]];
    let mut out = Vec::with_capacity(n - 2);
    let mut remaining = n;
    // starting at vertex 1 and moving forward makes convex faces fan out
    // from vertex 0
    let mut cur = 1;
    let mut misses = 0;

    while remaining > 3 {
        let (p, nx) = (prev[cur], next[cur]);
        let (a, b, c) = (at(p), at(cur), at(nx));
        let mut is_ear = orient_i(a, b, c) > 0;
        if is_ear {
            let mut j = next[nx];
            while j != p {
                let v = at(j);
                // coincident copies of the ear's own corners don't block it
                if v != a && v != b && v != c && in_closed_triangle(v, a, b, c) {
                    is_ear = false;
                    break;
                }
                j = next[j];
            }
        }
        if is_ear {
            out.push([poly[p], poly[cur], poly[nx]]);
            next[p] = nx;
            prev[nx] = p;
            remaining -= 1;
            misses = 0;
            cur = nx;
        } else {
            misses += 1;
            if misses > remaining {
                return None;
            }
            cur = nx;
        }
    }
    let (p, nx) = (prev[cur], next[cur]);
    if orient_i(at(p), at(cur), at(nx)) <= 0 {
        return None;
    }
    out.push([poly[p], poly[cur], poly[nx]]);
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn area2(t: &[usize; 3], pts: &[[i64; 2]]) -> i128 {
        orient_i(pts[t[0]], pts[t[1]], pts[t[2]])
    }

    fn polygon_area2(poly: &[usize], pts: &[[i64; 2]]) -> i128 {
        let n = poly.len();
        (0..n)
            .map(|i| {
                let (p, q) = (pts[poly[i]], pts[poly[(i + 1) % n]]);
                i128::from(p[0]) * i128::from(q[1]) - i128::from(q[0]) * i128::from(p[1])
            })
            .sum()
    }

    #[test]
    fn convex_polygons_give_k_minus_two() {
        let pts = vec![[0, 0], [4, 0], [6, 3], [3, 6], [-1, 4]];
        for k in 3..=5 {
            let poly: Vec<usize> = (0..k).collect();
            let tris = ear_clip(&poly, &pts).unwrap();
            assert_eq!(tris.len(), k - 2);
        }
    }

    #[test]
    fn convex_polygon_fans_from_first_vertex() {
        let pts = vec![[0, 0], [4, 0], [6, 3], [3, 6], [-1, 4]];
        let tris = ear_clip(&[0, 1, 2, 3, 4], &pts).unwrap();
        assert_eq!(tris, vec![[0, 1, 2], [0, 2, 3], [0, 3, 4]]);
    }

    #[test]
    fn concave_comb_is_tiled() {
        // comb with three teeth
        let pts = vec![
            [0, 0],
            [10, 0],
            [10, 10],
            [8, 10],
            [8, 3],
            [6, 3],
            [6, 10],
            [4, 10],
            [4, 3],
            [2, 3],
            [2, 10],
            [0, 10],
        ];
        let poly: Vec<usize> = (0..pts.len()).collect();
        let tris = ear_clip(&poly, &pts).unwrap();
        assert_eq!(tris.len(), pts.len() - 2);
        assert!(tris.iter().all(|t| area2(t, &pts) > 0));
        let total: i128 = tris.iter().map(|t| area2(t, &pts)).sum();
        assert_eq!(total, polygon_area2(&poly, &pts));
    }

    #[test]
    fn collinear_boundary_vertices() {
        let pts = vec![[0, 0], [1, 0], [2, 0], [1, 1], [0, 2], [0, 1]];
        let poly: Vec<usize> = (0..6).collect();
        let tris = ear_clip(&poly, &pts).unwrap();
        assert!(tris.iter().all(|t| area2(t, &pts) > 0));
        let total: i128 = tris.iter().map(|t| area2(t, &pts)).sum();
        assert_eq!(total, polygon_area2(&poly, &pts));
    }

    #[test]
    fn flat_polygon_fails() {
        let pts = vec![[0, 0], [1, 1], [2, 2]];
        assert!(ear_clip(&[0, 1, 2], &pts).is_none());
    }
}
