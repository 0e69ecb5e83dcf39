//! Seeded random subdivisions and queries.
//!
//! Vertices are distinct points of the dyadic grid `k / 2^g` in the unit
//! square, so they quantize without error at any cut the index picks. The
//! generator takes the convex hull, fans it from its first vertex, inserts
//! the remaining points one by one (splitting the containing triangle in
//! three, or the one or two triangles sharing an edge the point lies on in
//! two), and finally merges some adjacent pairs into convex quadrilateral
//! faces.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geom::{BoundingBox, Point};
use crate::scalar::Coord;
use crate::subdivision::Subdivision;
use crate::triangulate::orient_i;

pub type SynthRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SynthRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Number of points on the finest grid the generator uses.
pub const MAX_VERTICES: usize = 257 * 257;

/// Smallest grid with at least `4n` points, between 2 and 8 bits.
pub fn grid_bits_for(n: usize) -> u32 {
    let mut g = 2;
    while g < 8 && ((1usize << g) + 1).pow(2) < 4 * n {
        g += 1;
    }
    g
}

fn to_point<T: Coord>(p: [i64; 2], grid_bits: u32) -> Point<T> {
    let scale = (1u64 << grid_bits) as f64;
    let c = |v: i64| T::from(v as f64 / scale).expect("grid values fit every coordinate type");
    Point::new(c(p[0]), c(p[1]))
}

fn distinct_grid_points(n: usize, grid_bits: u32, rng: &mut SynthRng) -> Vec<[i64; 2]> {
    let side = (1i64 << grid_bits) + 1;
    assert!(n as i64 <= side * side, "{n} points do not fit a {grid_bits}-bit grid");
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = [rng.gen_range(0..side), rng.gen_range(0..side)];
        if seen.insert(p) {
            out.push(p);
        }
    }
    out
}

/// Strict convex hull, counterclockwise, by monotone chain.
fn convex_hull(pts: &[[i64; 2]]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by_key(|&i| pts[i]);
    let mut hull: Vec<usize> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(order.iter())
        } else {
            Box::new(order.iter().rev())
        };
        for &i in iter {
            while hull.len() >= start + 2 && orient_i(pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]], pts[i]) <= 0
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

fn split(tris: &mut Vec<[usize; 3]>, pts: &[[i64; 2]], p: usize) {
    let q = pts[p];
    let mut on_edges = Vec::new();
    for t in 0..tris.len() {
        let [a, b, c] = tris[t];
        let o = [
            orient_i(pts[a], pts[b], q),
            orient_i(pts[b], pts[c], q),
            orient_i(pts[c], pts[a], q),
        ];
        if o.iter().any(|&v| v < 0) {
            continue;
        }
        match o.iter().position(|&v| v == 0) {
            None => {
                tris[t] = [a, b, p];
                tris.push([b, c, p]);
                tris.push([c, a, p]);
                return;
            }
            Some(s) => on_edges.push((t, s)),
        }
    }
    assert!(!on_edges.is_empty(), "point outside the hull");
    for (t, s) in on_edges {
        let v = tris[t];
        let (from, to, opp) = (v[s], v[(s + 1) % 3], v[(s + 2) % 3]);
        tris[t] = [from, p, opp];
        tris.push([p, to, opp]);
    }
}

/// Triangles of `n` random grid points.
fn random_triangles(n: usize, grid_bits: u32, rng: &mut SynthRng) -> (Vec<[i64; 2]>, Vec<[usize; 3]>) {
    assert!(n >= 3, "need at least three vertices");
    loop {
        let pts = distinct_grid_points(n, grid_bits, rng);
        let hull = convex_hull(&pts);
        if hull.len() < 3 {
            continue;
        }
        let mut tris: Vec<[usize; 3]> = (1..hull.len() - 1).map(|i| [hull[0], hull[i], hull[i + 1]]).collect();
        let on_hull: HashSet<usize> = hull.iter().copied().collect();
        for p in (0..n).filter(|p| !on_hull.contains(p)) {
            split(&mut tris, &pts, p);
        }
        return (pts, tris);
    }
}

/// Merges random edge-adjacent triangle pairs into strictly convex quads.
fn merge_pairs(tris: &[[usize; 3]], pts: &[[i64; 2]], rng: &mut SynthRng) -> Vec<Vec<usize>> {
    let mut by_edge = std::collections::HashMap::new();
    for (t, v) in tris.iter().enumerate() {
        for s in 0..3 {
            by_edge.insert((v[s], v[(s + 1) % 3]), (t, v[(s + 2) % 3]));
        }
    }
    let mut used = vec![false; tris.len()];
    let mut faces = Vec::with_capacity(tris.len());
    for (t, v) in tris.iter().enumerate() {
        if used[t] {
            continue;
        }
        used[t] = true;
        let mut face = v.to_vec();
        if rng.gen_bool(0.5) {
            for s in 0..3 {
                let (a, b, o1) = (v[s], v[(s + 1) % 3], v[(s + 2) % 3]);
                let Some(&(u, o2)) = by_edge.get(&(b, a)) else { continue };
                let quad = [a, o2, b, o1];
                let convex = (0..4).all(|i| orient_i(pts[quad[i]], pts[quad[(i + 1) % 4]], pts[quad[(i + 2) % 4]]) > 0);
                if !used[u] && convex {
                    used[u] = true;
                    face = quad.to_vec();
                    break;
                }
            }
        }
        faces.push(face);
    }
    faces
}

/// A random subdivision of `n` grid vertices whose faces are triangles and
/// convex quadrilaterals. The grid resolution follows [`grid_bits_for`].
pub fn random_subdivision<T: Coord>(n: usize, rng: &mut SynthRng) -> Subdivision<T> {
    random_subdivision_on_grid(n, grid_bits_for(n), rng)
}

pub fn random_subdivision_on_grid<T: Coord>(n: usize, grid_bits: u32, rng: &mut SynthRng) -> Subdivision<T> {
    let (pts, tris) = random_triangles(n, grid_bits, rng);
    let faces = merge_pairs(&tris, &pts, rng);
    Subdivision::new(pts.iter().map(|&p| to_point(p, grid_bits)).collect(), faces)
}

/// A single simple face: `k` grid vertices at increasing angles around the
/// grid center. Retries until snapping leaves the polygon simple.
pub fn random_star_polygon<T: Coord>(k: usize, grid_bits: u32, rng: &mut SynthRng) -> Subdivision<T> {
    assert!(k >= 3);
    let half = (1i64 << grid_bits) / 2;
    loop {
        let mut angles: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let pts: Vec<[i64; 2]> = angles
            .iter()
            .map(|a| {
                let r = rng.gen_range(0.2..1.0) * half as f64;
                [half + (r * a.cos()).round() as i64, half + (r * a.sin()).round() as i64]
            })
            .collect();
        let s = Subdivision::new(
            pts.iter().map(|&p| to_point(p, grid_bits)).collect(),
            vec![(0..k).collect()],
        );
        if s.validate().is_ok() {
            return s;
        }
    }
}

/// The bounding box grown by 10% in each dimension around its center.
pub fn query_box<T: Coord>(b: &BoundingBox<T>) -> (Point<f64>, Point<f64>) {
    let (x0, y0) = (b.min.x.to_f64_exact(), b.min.y.to_f64_exact());
    let (x1, y1) = (b.max.x.to_f64_exact(), b.max.y.to_f64_exact());
    let (dx, dy) = (0.05 * (x1 - x0), 0.05 * (y1 - y0));
    (Point::new(x0 - dx, y0 - dy), Point::new(x1 + dx, y1 + dy))
}

/// Uniform queries over [`query_box`].
pub fn random_queries<T: Coord>(b: &BoundingBox<T>, count: usize, rng: &mut SynthRng) -> Vec<Point<T>> {
    let (lo, hi) = query_box(b);
    (0..count)
        .map(|_| {
            let x = rng.gen_range(lo.x..=hi.x);
            let y = rng.gen_range(lo.y..=hi.y);
            Point::new(T::from(x).expect("finite"), T::from(y).expect("finite"))
        })
        .collect()
}
