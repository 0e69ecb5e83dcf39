use ptloc::exact::{orient, ExactSign};
use ptloc::{
    locate_bruteforce, point_in_triangle_exact, synth, triangulate, BuildError, Coord, LocationKind, PackedEdgeIndex,
    Point, Subdivision, SwarError, TriangleHit, Word, WordOps,
};
use rand::Rng;

fn polygon_area2(pts: &[Point<f64>]) -> f64 {
    (0..pts.len())
        .map(|i| {
            let (p, q) = (pts[i], pts[(i + 1) % pts.len()]);
            p.x * q.y - q.x * p.y
        })
        .sum()
}

/// Winding number with exact orientation; `None` on the boundary.
fn winding(q: Point<f64>, poly: &[Point<f64>]) -> Option<i32> {
    let mut w = 0;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let o = orient(a, b, q);
        if o == ExactSign::Zero
            && q.x >= a.x.min(b.x)
            && q.x <= a.x.max(b.x)
            && q.y >= a.y.min(b.y)
            && q.y <= a.y.max(b.y)
        {
            return None;
        }
        if a.y <= q.y && b.y > q.y && o == ExactSign::Positive {
            w += 1;
        } else if a.y > q.y && b.y <= q.y && o == ExactSign::Negative {
            w -= 1;
        }
    }
    Some(w)
}

#[test]
fn star_polygon_triangles_cover_the_face() {
    let mut rng = synth::rng(11);
    for k in [3, 5, 8, 20, 60] {
        let s: Subdivision<f64> = synth::random_star_polygon(k, 8, &mut rng);
        let t = triangulate(&s).unwrap();
        assert_eq!(t.triangles.len(), k - 2);
        let area: f64 = (0..t.triangles.len())
            .map(|i| polygon_area2(&t.triangle_points(i)))
            .sum();
        assert_eq!(area, polygon_area2(&s.vertices));

        for _ in 0..2000 {
            let q = Point::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            let hits: Vec<TriangleHit> = (0..t.triangles.len())
                .map(|i| point_in_triangle_exact(q, t.triangle_points(i)).unwrap())
                .collect();
            let inside = hits.iter().filter(|h| **h == TriangleHit::Inside).count();
            let on_edge = hits.iter().filter(|h| matches!(h, TriangleHit::OnEdge(_))).count();
            match winding(q, &s.vertices) {
                Some(1) => assert!(
                    inside == 1 && on_edge == 0 || inside == 0 && on_edge >= 2,
                    "{q:?}: {hits:?}"
                ),
                Some(0) => assert_eq!(inside + on_edge, 0, "{q:?}"),
                Some(w) => panic!("winding {w}"),
                None => assert!(inside == 0 && on_edge >= 1),
            }
        }
    }
}

#[test]
fn generated_faces_are_tiled_by_their_triangles() {
    let s: Subdivision<f64> = synth::random_subdivision(300, &mut synth::rng(12));
    let t = triangulate(&s).unwrap();
    for (f, face) in s.faces.iter().enumerate() {
        let pts: Vec<Point<f64>> = face.iter().map(|&v| s.vertices[v]).collect();
        let area: f64 = (0..t.triangles.len())
            .filter(|&i| t.face_of_triangle[i] == f)
            .map(|i| polygon_area2(&t.triangle_points(i)))
            .sum();
        assert_eq!(area, polygon_area2(&pts), "face {f}");
    }
}

fn check_against_oracle<T: Coord, W: Word>(n: usize, seed: u64, queries: usize) {
    let mut rng = synth::rng(seed);
    let s: Subdivision<T> = synth::random_subdivision(n, &mut rng);
    let idx = PackedEdgeIndex::<T, W>::build(&s).unwrap();
    let g = &idx.geometry;
    let mut qs = synth::random_queries(&idx.bbox, queries, &mut rng);
    // vertices and edge midpoints exercise the tie-break
    qs.extend(g.vertices.iter().copied());
    for tri in &g.triangles {
        let (a, b) = (g.vertices[tri[0]], g.vertices[tri[1]]);
        let two = T::one() + T::one();
        qs.push(Point::new((a.x + b.x) / two, (a.y + b.y) / two));
    }
    for q in qs {
        let got = idx.locate(q.x, q.y).unwrap();
        let want = locate_bruteforce(g, q);
        assert_eq!(got.location, want.location, "n={n} seed={seed} q={q:?}");
        if got.kind() != LocationKind::Outside {
            assert!(got.exact_confirmed);
        }
    }
}

#[test]
fn oracle_equivalence_across_types() {
    for (n, seed) in [(3, 1), (10, 2), (64, 3), (400, 4)] {
        check_against_oracle::<f64, u64>(n, seed, 2000);
        check_against_oracle::<f64, u128>(n, seed, 2000);
        check_against_oracle::<f32, u64>(n, seed, 2000);
        check_against_oracle::<f32, u128>(n, seed, 2000);
    }
}

#[test]
fn true_triangle_is_a_candidate_away_from_its_edges() {
    let mut rng = synth::rng(21);
    let s: Subdivision<f64> = synth::random_subdivision(200, &mut rng);
    let idx = PackedEdgeIndex::<f64, u64>::build(&s).unwrap();
    let mut checked = 0;
    for q in synth::random_queries(&idx.bbox, 5000, &mut rng) {
        let Some(t) = locate_bruteforce(&idx.geometry, q).triangle() else {
            continue;
        };
        let p = idx.geometry.triangle_points(t);
        let clear = (0..3).all(|s| {
            let (a, b) = (p[s], p[(s + 1) % 3]);
            let (dx, dy) = (b.x - a.x, b.y - a.y);
            ((q.x - a.x) * dy - (q.y - a.y) * dx).abs() / dx.hypot(dy) > idx.error_budget
        });
        if !clear {
            continue;
        }
        let qp = idx.query_point(q.x, q.y).unwrap();
        let (neg, zero) = idx.evaluate(&qp);
        assert!(
            idx.candidates(&neg, &zero).iter().any(|c| c.triangle == t),
            "{q:?} lost triangle {t}"
        );
        checked += 1;
    }
    assert!(checked > 1000);
}

#[test]
fn word_operations_do_not_depend_on_the_query() {
    let mut rng = synth::rng(31);
    let s: Subdivision<f64> = synth::random_subdivision(100, &mut rng);
    let idx = PackedEdgeIndex::<f64, u64>::build(&s).unwrap();
    let mut counts = std::collections::BTreeSet::new();
    for q in synth::random_queries(&idx.bbox, 10_000, &mut rng) {
        if let Some(qp) = idx.query_point(q.x, q.y) {
            counts.insert(idx.evaluate_counted(&qp).2);
        }
    }
    assert_eq!(counts.len(), 1);
    let k = u64::from(idx.layout().lanes_per_word);
    let words = idx.words_per_stream() as u64;
    assert_eq!(counts.first(), Some(&WordOps(words * (28 + 2 * k))));
}

#[test]
fn every_vertex_is_on_an_edge() {
    let s: Subdivision<f64> = synth::random_subdivision(150, &mut synth::rng(41));
    let idx = PackedEdgeIndex::<f64, u128>::build(&s).unwrap();
    for v in &s.vertices {
        let r = idx.locate(v.x, v.y).unwrap();
        assert_eq!(r.kind(), LocationKind::OnEdge, "{v:?}");
    }
}

#[test]
fn narrow_words_reject_wide_lanes() {
    let s: Subdivision<f64> = synth::random_subdivision(100, &mut synth::rng(5));
    let err = PackedEdgeIndex::<f64, u32>::build(&s).unwrap_err();
    assert!(matches!(
        err,
        BuildError::Swar(SwarError::LaneTooWide { word_bits: 32, .. })
    ));
    // the unit square needs 12-bit lanes
    let sq = Subdivision::new(
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ],
        vec![vec![0, 1, 2, 3]],
    );
    let idx = PackedEdgeIndex::<f64, u16>::build(&sq).unwrap();
    assert_eq!(idx.layout().lanes_per_word, 1);
    assert_eq!(idx.locate(0.75, 0.25).unwrap().kind(), LocationKind::Inside);
}

#[test]
fn negative_and_offset_coordinates() {
    let mut rng = synth::rng(8);
    let base: Subdivision<f64> = synth::random_subdivision(80, &mut rng);
    let s = Subdivision::new(
        base.vertices
            .iter()
            .map(|p| Point::new(p.x * 4.0 - 3.0, p.y * 2.0 - 0.5))
            .collect(),
        base.faces,
    );
    let idx = PackedEdgeIndex::<f64, u64>::build(&s).unwrap();
    for q in synth::random_queries(&idx.bbox, 3000, &mut rng) {
        assert_eq!(
            idx.locate(q.x, q.y).unwrap().location,
            locate_bruteforce(&idx.geometry, q).location
        );
    }
}
