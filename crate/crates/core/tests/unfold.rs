use std::collections::{BTreeMap, BTreeSet};

use approx::assert_relative_eq;

use billiard_core::constants::{cusp_representatives, CuspDirection};
use billiard_core::count::count_diagonals;
use billiard_core::geom::{segment_crossing, CrossingKind, Isometry, PlanarVec, PrecisionConfig};
use billiard_core::polygon::{equilateral_triangle, gcd, regular_ngon, unit_square, PolygonSpec};
use billiard_core::surface::ngon_surface;
use billiard_core::unfold::{
    coarse_bound_k, enumerate_diagonals, enumerate_saddle_connections, Boundary, DiagonalConventions, EnumConfig,
    LengthRule, Orientation, SaddleConnection,
};

fn conv(o: Orientation, b: Boundary) -> DiagonalConventions {
    DiagonalConventions {
        orientation: o,
        boundary: b,
        length: LengthRule::Tiles,
    }
}

fn cfg() -> EnumConfig {
    EnumConfig::default()
}

#[test]
fn square_depth_zero_examples() {
    let sq = unit_square();
    let (d, _) = enumerate_diagonals(&sq, 0, &conv(Orientation::Oriented, Boundary::Exclude), &cfg()).unwrap();
    assert_eq!(d.len(), 4);
    assert!(d.iter().all(|x| (x.geometric_length - 2f64.sqrt()).abs() < 1e-15));
    let (d, _) = enumerate_diagonals(&sq, 0, &conv(Orientation::Unoriented, Boundary::Include), &cfg()).unwrap();
    assert_eq!(d.len(), 6);
    assert_eq!(d.iter().filter(|x| x.boundary).count(), 4);
}

/// Depth-one diagonals by testing every (start corner, mirrored copy, end corner) triple.
fn depth_one_brute_force(p: &PolygonSpec) -> BTreeSet<(usize, u32, usize)> {
    let pc = PrecisionConfig::default();
    let n = p.len();
    let mut out = BTreeSet::new();
    for j in 0..n {
        let (a, b) = p.side(j);
        let mirror = Isometry::reflection(&a, &b);
        for i in 0..n {
            for k in 0..n {
                if k == j || k == (j + 1) % n {
                    continue;
                }
                let target = mirror.apply(&p.vertex(k));
                let seg = (p.vertex(i), target);
                if segment_crossing(seg, (a, b), &pc) != CrossingKind::InteriorTransversal {
                    continue;
                }
                // No other side of either copy may be crossed.
                let blocked = (0..n).filter(|&m| m != j).any(|m| {
                    let (c, d) = p.side(m);
                    let own = segment_crossing(seg, (c, d), &pc) == CrossingKind::InteriorTransversal;
                    let image = segment_crossing(seg, (mirror.apply(&c), mirror.apply(&d)), &pc)
                        == CrossingKind::InteriorTransversal;
                    own || image
                });
                if !blocked {
                    out.insert((i, j as u32, k));
                }
            }
        }
    }
    out
}

#[test]
fn depth_one_matches_brute_force() {
    for p in [equilateral_triangle(), unit_square(), regular_ngon(5).unwrap(), regular_ngon(6).unwrap()] {
        let (d, _) = enumerate_diagonals(&p, 1, &conv(Orientation::Oriented, Boundary::Exclude), &cfg()).unwrap();
        let got: BTreeSet<_> = d
            .iter()
            .filter(|x| x.bounce_count == 1)
            .map(|x| (x.start_corner, x.bounce_word[0], x.end_corner))
            .collect();
        assert_eq!(got.len(), d.iter().filter(|x| x.bounce_count == 1).count(), "{}", p.name());
        assert_eq!(got, depth_one_brute_force(&p), "{}", p.name());
    }
    let (d, _) = enumerate_diagonals(
        &equilateral_triangle(),
        1,
        &conv(Orientation::Oriented, Boundary::Exclude),
        &cfg(),
    )
    .unwrap();
    assert_eq!(d.len(), depth_one_brute_force(&equilateral_triangle()).len());
}

/// Interior square diagonals from a corner are the primitive lattice vectors
/// `(p, q)` with `p, q ≥ 1`, crossing `p + q - 2` grid lines.
fn square_oracle(n: usize) -> u64 {
    let mut c = 0u64;
    for p in 1..=n as i64 {
        for q in 1..=(n as i64 + 1 - p) {
            if gcd(p, q) == 1 {
                c += 1;
            }
        }
    }
    4 + 4 * c
}

#[test]
fn square_counts_match_coprime_oracle() {
    let sq = unit_square();
    for n in [0usize, 1, 2, 3, 5, 8, 13, 40, 80] {
        let got = count_diagonals(&sq, n, &DiagonalConventions::CALIBRATED, &cfg()).unwrap();
        assert_eq!(got, square_oracle(n), "n = {n}");
    }
}

#[test]
fn diagonal_dedup_is_sound() {
    for p in [unit_square(), equilateral_triangle(), regular_ngon(5).unwrap()] {
        let (d, _) = enumerate_diagonals(&p, 8, &DiagonalConventions::CALIBRATED, &cfg()).unwrap();
        let keys: BTreeSet<_> = d.iter().map(|x| (x.start_corner, x.bounce_word.clone(), x.end_corner)).collect();
        assert_eq!(keys.len(), d.len(), "{}", p.name());
        for x in &d {
            assert_eq!(x.bounce_count, x.bounce_word.len());
            assert!(x.geometric_length > 0.0);
            assert_relative_eq!(x.geometric_length, x.holonomy.norm(), max_relative = 1e-12);
        }
    }
}

#[test]
fn unfolding_isometries_alternate_orientation() {
    let (d, _) = enumerate_diagonals(&regular_ngon(5).unwrap(), 6, &DiagonalConventions::CALIBRATED, &cfg()).unwrap();
    for x in d.iter().filter(|x| !x.boundary) {
        let want = if x.bounce_count % 2 == 0 { 1.0 } else { -1.0 };
        assert!((x.end_copy.det() - want).abs() < 1e-9);
        assert!(x.end_copy.orthogonality_defect() < 1e-9);
    }
}

fn sample(n: i64, native_length: f64) -> (billiard_core::surface::SurfaceSpec, Vec<SaddleConnection>) {
    let s = ngon_surface(n).unwrap();
    let l = native_length / s.area().sqrt();
    let (v, _) = enumerate_saddle_connections(&s, l, &cfg()).unwrap();
    (s, v)
}

#[test]
fn octagon_shortest_connections_are_sides() {
    let (_, v) = sample(8, 3.0);
    let r8 = (2.0 - 2f64.sqrt()).sqrt();
    let shortest = v.iter().map(|s| s.holonomy.norm()).fold(f64::INFINITY, f64::min);
    assert_relative_eq!(shortest, r8, max_relative = 1e-12);
    // Eight sides, each traversed both ways.
    let at_r8: Vec<_> = v.iter().filter(|s| (s.holonomy.norm() - r8).abs() < 1e-9).collect();
    assert_eq!(at_r8.len(), 8);
    assert!(at_r8.iter().all(|s| s.filling_class.is_some() && s.length_combinatorial == 0));
}

#[test]
fn octagon_horizontal_chord_lengths() {
    let (s, v) = sample(8, 2.5);
    let h = v
        .iter()
        .find(|c| (c.holonomy.x - 2.0).abs() < 1e-9 && c.holonomy.y.abs() < 1e-9)
        .expect("horizontal connection of native length 2");
    // It runs between opposite vertices inside the polygon and crosses no side.
    assert_eq!(h.length_combinatorial, 0);
    assert_eq!(h.start, (0, 4));
    let a8 = 2.0 * 2f64.sqrt();
    let z = PlanarVec::new(2.0, 0.0);
    let p = regular_ngon(8).unwrap();
    let direct: f64 = (0..4).map(|j| billiard_core::geom::wedge(&z, &p.side_vector(j)).abs()).sum::<f64>() / a8;
    assert_relative_eq!(h.length_regularized, direct, max_relative = 1e-12);
    assert_relative_eq!(s.area(), a8, max_relative = 1e-14);
}

fn direction_lengths(v: &[SaddleConnection], angle: f64) -> Vec<f64> {
    let d = PlanarVec::new(angle.cos(), angle.sin());
    let mut out: Vec<f64> = v
        .iter()
        .filter(|c| {
            let h = c.holonomy;
            billiard_core::geom::wedge(&d, &h).abs() < 1e-9 * h.norm() && d.dot(&h) > 0.0
        })
        .map(|c| c.holonomy.norm())
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

#[test]
fn periodic_directions_match_cusp_representatives() {
    let pi = std::f64::consts::PI;
    let cases: Vec<(i64, CuspDirection, f64)> = vec![
        (8, CuspDirection::Horizontal, 0.0),
        (8, CuspDirection::PiOverN, pi / 8.0),
        (10, CuspDirection::Horizontal, 0.0),
        (10, CuspDirection::PiOverN, pi / 10.0),
        (12, CuspDirection::Horizontal, 0.0),
        (7, CuspDirection::Vertical, pi / 2.0),
        (9, CuspDirection::Vertical, pi / 2.0),
    ];
    for (n, dir, angle) in cases {
        let reps = cusp_representatives::<f64>(n).unwrap();
        let cusp = reps.iter().find(|c| c.direction == dir).unwrap();
        let mut want = cusp.flat();
        want.sort_by(f64::total_cmp);
        let (_, v) = sample(n, want.last().unwrap() * 1.01);
        let got = direction_lengths(&v, angle);
        assert_eq!(got.len(), want.len(), "N = {n} {dir:?}: {got:?} vs {want:?}");
        for (g, w) in got.iter().zip(&want) {
            assert_relative_eq!(g, w, max_relative = 1e-9);
        }
    }
}

#[test]
fn heptagon_vertical_pairs_plus_one_shared() {
    let (_, v) = sample(7, 2.1);
    let got = direction_lengths(&v, std::f64::consts::FRAC_PI_2);
    let mut mult: BTreeMap<i64, usize> = BTreeMap::new();
    for l in &got {
        *mult.entry((l * 1e9).round() as i64).or_default() += 1;
    }
    let mut m: Vec<usize> = mult.values().copied().collect();
    m.sort();
    assert_eq!(m, vec![1, 2, 2]);
}

fn rounded(h: PlanarVec) -> (i64, i64) {
    ((h.x * 1e8).round() as i64, (h.y * 1e8).round() as i64)
}

#[test]
fn even_surfaces_are_rotation_symmetric() {
    for n in [8i64, 10] {
        let (_, v) = sample(n, 6.0);
        let theta = 2.0 * std::f64::consts::PI / n as f64;
        // Skip the ring near the cutoff, where rounding can flip membership.
        let inner = |h: &PlanarVec| h.norm() < 5.9;
        let mut after: Vec<(i64, i64)> = v
            .iter()
            .filter(|c| inner(&c.holonomy))
            .map(|c| rounded(c.holonomy.rotate(&theta)))
            .collect();
        let mut before: Vec<(i64, i64)> = v.iter().filter(|c| inner(&c.holonomy)).map(|c| rounded(c.holonomy)).collect();
        before.sort();
        after.sort();
        let mismatches = before.iter().zip(&after).filter(|(a, b)| a != b).count();
        assert_eq!(mismatches, 0, "N = {n}");
    }
}

#[test]
fn saddle_connection_invariants() {
    for n in [5i64, 7, 8, 9, 10] {
        let (s, v) = sample(n, 5.0);
        let area = s.area();
        let zs: Vec<PlanarVec> = s.filling_system().iter().map(|c| c.holonomy).collect();
        let mut seen = BTreeSet::new();
        for c in &v {
            assert_eq!(c.length_combinatorial, c.crossings_per_class.iter().sum::<u32>());
            let reg: f64 = zs.iter().map(|z| billiard_core::geom::wedge(&c.holonomy, z).abs()).sum::<f64>() / area;
            assert_relative_eq!(c.length_regularized, reg, max_relative = 1e-12);
            assert_relative_eq!(c.length_geometric, c.holonomy.norm() / area.sqrt(), max_relative = 1e-12);
            assert!(seen.insert((c.start, rounded(c.holonomy))), "duplicate {c:?}");
        }
        // Each connection is found once from each endpoint.
        let fwd: BTreeSet<_> = v.iter().map(|c| (c.start_point, c.end_point, rounded(c.holonomy))).collect();
        for c in &v {
            let h = -c.holonomy;
            assert!(fwd.contains(&(c.end_point, c.start_point, rounded(h))), "N = {n}: no reverse of {c:?}");
        }
    }
}

const S8_K_AT_20: f64 = 2.2771166838053984;

#[test]
fn coarse_bound_on_octagon_regression() {
    let s = ngon_surface(8).unwrap();
    let (v, _) = enumerate_saddle_connections(&s, 20.0, &cfg()).unwrap();
    let k = coarse_bound_k(&v).unwrap();
    println!("K(S_8, L <= 20) = {:?} over {} connections", k.k, k.considered);
    assert!((k.k - S8_K_AT_20).abs() < 1e-12, "K = {}", k.k);
    for c in v.iter().filter(|c| c.length_combinatorial > 0) {
        let (g, l_c, r) = (c.length_geometric, c.length_combinatorial as f64, c.length_regularized);
        assert!(g / k.k <= l_c.min(r) * (1.0 + 1e-12));
        assert!(l_c.max(r) <= k.k * g * (1.0 + 1e-12));
    }
    // K only grows with the sample, and has settled well before L = 20.
    let ks: Vec<f64> = [5.0, 10.0, 15.0]
        .iter()
        .map(|&l| coarse_bound_k(&v.iter().filter(|c| c.length_geometric <= l).cloned().collect::<Vec<_>>()).unwrap().k)
        .collect();
    println!("K at L = 5, 10, 15: {ks:?}");
    assert!(ks.windows(2).all(|w| w[0] <= w[1]) && ks[2] <= k.k);
    assert!((k.k - ks[1]).abs() / k.k < 0.05);
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap()
}

#[test]
fn enumeration_is_thread_count_independent() {
    let sq = unit_square();
    let tri = equilateral_triangle();
    let s8 = ngon_surface(8).unwrap();
    let s7 = ngon_surface(7).unwrap();
    let run = |t: usize| {
        let c = cfg().with_threads(t);
        (
            json(&enumerate_diagonals(&sq, 25, &DiagonalConventions::CALIBRATED, &c).unwrap().0),
            json(&enumerate_diagonals(&tri, 12, &DiagonalConventions::CALIBRATED, &c).unwrap().0),
            json(&enumerate_saddle_connections(&s8, 8.0, &c).unwrap().0),
            json(&enumerate_saddle_connections(&s7, 6.0, &c).unwrap().0),
        )
    };
    let base = run(1);
    for t in [4, 8] {
        assert!(base == run(t), "output differs at {t} threads");
    }
}
