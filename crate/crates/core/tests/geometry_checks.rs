use gcrsi_core::geometry::{
    check_geometric_inequality, check_lebesgue_limit, gaussian_barycenter, gaussian_measure,
    random_symmetric_pairs, random_symmetric_polytope, read_corpus, write_corpus, ConvexBody, InequalityParams,
};
use gcrsi_core::rng::SampleStream;
use gcrsi_core::saturation::Sign;
use gcrsi_core::special::interval_mass;
use gcrsi_core::{Error, Exec};
use proptest::prelude::*;

fn within(est: f64, se: f64, exact: f64) -> bool {
    (est - exact).abs() <= 3.0 * se.max(1e-12)
}

fn square() -> ConvexBody {
    ConvexBody::polytope(vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]]).unwrap()
}

fn diamond(r: f64) -> ConvexBody {
    ConvexBody::polytope(vec![vec![r, 0.0], vec![0.0, r], vec![-r, 0.0], vec![0.0, -r]]).unwrap()
}

#[test]
fn measure_examples() {
    let huge = ConvexBody::ball(2, 1e6).unwrap();
    let m = gaussian_measure(&huge, 100_000, 1).unwrap();
    assert!(within(m.mean, m.stderr, 1.0));

    let slab = ConvexBody::sym_slab(vec![1.0], 1.0).unwrap();
    let m = gaussian_measure(&slab, 200_000, 2).unwrap();
    assert!(within(m.mean, m.stderr, 0.682_689_492_137_086), "{m:?}");

    let disc = ConvexBody::ball(2, 1.0).unwrap();
    let m = gaussian_measure(&disc, 200_000, 3).unwrap();
    assert!(within(m.mean, m.stderr, 1.0 - (-0.5f64).exp()), "{m:?}");
    let p = m.mean;
    assert!((m.stderr - (p * (1.0 - p) / 200_000.0).sqrt()).abs() < 1e-15);
}

#[test]
fn membership_examples() {
    assert!(square().contains(&[0.5, 0.5]));
    let e1 = ConvexBody::polytope(vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
    let e2 = ConvexBody::polytope(vec![vec![0.0, 1.0], vec![0.0, -1.0]]).unwrap();
    assert!(ConvexBody::mink_sum(e1, e2).unwrap().contains(&[1.0, 1.0]));
    let mut s = SampleStream::new(4, 0);
    for d in 1..=4 {
        let b = random_symmetric_polytope(d.max(2), &mut s).unwrap();
        assert!(b.contains(&vec![0.0; d.max(2)]));
    }
}

#[test]
fn barycenter_examples() {
    let bx = ConvexBody::axis_box(vec![1.0, 1.0]).unwrap();
    let bc = gaussian_barycenter(&bx, 100_000, 5).unwrap();
    for k in 0..2 {
        assert!(bc.mean[k].abs() <= 3.0 * bc.stderr[k], "{bc:?}");
    }
    let sq = gaussian_barycenter(&square(), 50_000, 6).unwrap();
    assert!(sq.mean.iter().zip(&sq.stderr).all(|(m, s)| m.abs() <= 3.0 * s));

    // {x1 ∈ [0, 2]}: truncated normal mean (φ(0) − φ(2)) / (Φ(2) − Φ(0)).
    let shifted = ConvexBody::intersect(vec![
        ConvexBody::halfspace_unchecked(vec![1.0, 0.0], 2.0).unwrap(),
        ConvexBody::halfspace_unchecked(vec![-1.0, 0.0], 0.0).unwrap(),
    ])
    .unwrap();
    let bc = gaussian_barycenter(&shifted, 100_000, 7).unwrap();
    let pdf = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let exact = (pdf(0.0) - pdf(2.0)) / interval_mass(0.0, 2.0);
    assert!(bc.mean[0] > 0.0 && within(bc.mean[0], bc.stderr[0], exact), "{bc:?} vs {exact}");
}

#[test]
fn centering_guard_rejects_shifted_bodies() {
    let shifted = ConvexBody::intersect(vec![
        ConvexBody::halfspace_unchecked(vec![1.0, 0.0], 2.0).unwrap(),
        ConvexBody::halfspace_unchecked(vec![-1.0, 0.0], 0.0).unwrap(),
    ])
    .unwrap();
    let sq = ConvexBody::axis_box(vec![1.0, 1.0]).unwrap();
    let r = check_geometric_inequality(&shifted, &sq, &InequalityParams::gcrsi(), 20_000, 1, Exec::default());
    assert!(matches!(r, Err(Error::UnsupportedCombination(_)) | Err(Error::Centering { .. })));
    // A centred but asymmetric halfspace intersection passes the guard.
    let h = ConvexBody::intersect(vec![
        ConvexBody::halfspace(vec![1.0, 0.0], 1.0).unwrap(),
        ConvexBody::halfspace(vec![-1.0, 0.0], 1.0).unwrap(),
        ConvexBody::sym_slab(vec![0.0, 1.0], 1.0).unwrap(),
    ])
    .unwrap();
    let b = ConvexBody::axis_box(vec![1.0, 1.0]).unwrap();
    let hb = ConvexBody::intersect(vec![h.clone(), b.clone()]).unwrap();
    assert!(!hb.is_symmetric());
    let r = check_geometric_inequality(&hb, &diamond(1.0), &InequalityParams::gcrsi(), 20_000, 2, Exec::default());
    assert!(matches!(r, Err(Error::UnsupportedCombination(_))));
}

#[test]
fn slab_gcrsi_example() {
    let s = ConvexBody::sym_slab(vec![1.0], 1.0).unwrap();
    let r = check_geometric_inequality(&s, &s, &InequalityParams::gcrsi(), 1_000_000, 8, Exec::default()).unwrap();
    let (g1, g2) = (interval_mass(-1.0, 1.0), interval_mass(-2.0, 2.0));
    assert!((r.lhs - g1 * g1).abs() < 3e-3 && (r.rhs - g1 * g2).abs() < 3e-3, "{r:?}");
    assert!((g1 * g1 - 0.46606).abs() < 1e-5 && (g1 * g2 - 0.65163).abs() < 1e-5);
    assert!(r.margin_sigmas > 3.0);
}

#[test]
fn large_balls_are_near_equality() {
    let b = ConvexBody::ball(2, 40.0).unwrap();
    let r = check_geometric_inequality(&b, &b, &InequalityParams::gcmpi(0.5, 0.5).unwrap(), 50_000, 9, Exec::default())
        .unwrap();
    assert!((r.lhs - 1.0).abs() < 1e-9 && (r.rhs - 1.0).abs() < 1e-9);
}

#[test]
fn square_and_rotated_square() {
    let r45 = diamond(2f64.sqrt());
    let r = check_geometric_inequality(&square(), &r45, &InequalityParams::gcrsi(), 200_000, 10, Exec::default()).unwrap();
    assert!(r.margin_sigmas > 3.0, "{r:?}");
}

#[test]
fn lebesgue_examples() {
    let b = ConvexBody::axis_box(vec![1.0, 1.0]).unwrap();
    for sign in [Sign::Plus, Sign::Minus] {
        let r = check_lebesgue_limit(&b, &b, sign, 40_000, 11, Exec::default()).unwrap();
        // The sampling box is exactly K + L, so the sum has hit rate 1.
        assert_eq!(r.measures.sum.mean, 16.0);
        assert!((r.lhs - 16.0).abs() < 3.0 && (r.rhs - 64.0).abs() < 8.0 && r.margin_sigmas > 3.0, "{r:?}");
    }
    for t in [0.1, 0.5, 0.9] {
        let k = ConvexBody::axis_box(vec![1.0]).unwrap();
        let l = ConvexBody::axis_box(vec![t]).unwrap();
        let r = check_lebesgue_limit(&k, &l, Sign::Plus, 100_000, 12, Exec::default()).unwrap();
        let (lhs, rhs) = (4.0 * t, 2.0 * t * (2.0 + 2.0 * t));
        assert!((r.lhs - lhs).abs() < 0.05 * lhs && (r.rhs - rhs).abs() < 0.05 * rhs && r.margin_sigmas > 0.0);
    }
    let sym = random_symmetric_polytope(3, &mut SampleStream::new(13, 0)).unwrap();
    let p = check_lebesgue_limit(&sym, &sym, Sign::Plus, 20_000, 14, Exec::default()).unwrap();
    let m = check_lebesgue_limit(&sym, &sym, Sign::Minus, 20_000, 14, Exec::default()).unwrap();
    assert_eq!(p, m);
    let slab = ConvexBody::sym_slab(vec![1.0, 0.0], 1.0).unwrap();
    assert!(matches!(check_lebesgue_limit(&slab, &b, Sign::Plus, 10, 1, Exec::default()), Err(Error::Precondition(_))));
}

#[test]
fn corpus_gcrsi_and_milman_pajor() {
    let pairs = random_symmetric_pairs(200, 2024).unwrap();
    let t = std::time::Instant::now();
    let gcrsi = InequalityParams::gcrsi();
    let mp = InequalityParams::milman_pajor(0.5f64.sqrt(), 0.5f64.sqrt()).unwrap();
    let (mut ok_g, mut ok_m) = (0, 0);
    for (i, p) in pairs.iter().enumerate() {
        let g = check_geometric_inequality(&p.k, &p.l, &gcrsi, 20_000, i as u64, Exec::default()).unwrap();
        let m = check_geometric_inequality(&p.k, &p.l, &mp, 20_000, i as u64, Exec::default()).unwrap();
        ok_g += usize::from(g.margin_sigmas >= -3.0);
        ok_m += usize::from(m.margin_sigmas >= -3.0);
    }
    eprintln!("corpus {ok_g}/200 {ok_m}/200 in {:?}", t.elapsed());
    assert!(ok_g >= 198 && ok_m >= 198);
}

#[test]
fn corpus_roundtrip() {
    let pairs = random_symmetric_pairs(12, 3).unwrap();
    let mut buf = Vec::new();
    write_corpus(&pairs, &mut buf).unwrap();
    let back = read_corpus(buf.as_slice()).unwrap();
    assert_eq!(back, pairs);
    assert!(read_corpus("{\"k\": 1}\n".as_bytes()).is_err());
}

/// Convex hull of planar points (monotone chain), counter-clockwise.
fn hull2(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Signed distance-like test: minimum edge cross product, normalised.
fn polygon_margin(h: &[[f64; 2]], x: [f64; 2]) -> f64 {
    (0..h.len())
        .map(|i| {
            let (a, b) = (h[i], h[(i + 1) % h.len()]);
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            ((b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0])) / len
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn mink_sum_lp_matches_brute_force_grid() {
    let mut s = SampleStream::new(15, 0);
    for _ in 0..20 {
        let k = random_symmetric_polytope(2, &mut s).unwrap();
        let l = random_symmetric_polytope(2, &mut s).unwrap();
        let verts = |b: &ConvexBody| -> Vec<[f64; 2]> {
            match serde_json::to_value(b).unwrap()["vertices"].as_array() {
                Some(vs) => vs.iter().map(|v| [v[0].as_f64().unwrap(), v[1].as_f64().unwrap()]).collect(),
                None => unreachable!(),
            }
        };
        let (vk, vl) = (verts(&k), verts(&l));
        let sums: Vec<[f64; 2]> = vk.iter().flat_map(|p| vl.iter().map(move |q| [p[0] + q[0], p[1] + q[1]])).collect();
        let h = hull2(sums);
        let sum = ConvexBody::mink_sum(k, l).unwrap();
        let bb = sum.bounding_box().unwrap();
        let mut checked = 0;
        let mut x = bb[0].0 - 0.1;
        while x <= bb[0].1 + 0.1 {
            let mut y = bb[1].0 - 0.1;
            while y <= bb[1].1 + 0.1 {
                let m = polygon_margin(&h, [x, y]);
                if m.abs() > 1e-7 {
                    assert_eq!(sum.contains(&[x, y]), m > 0.0, "({x}, {y}) margin {m}");
                    checked += 1;
                }
                y += 0.05;
            }
            x += 0.05;
        }
        assert!(checked > 100);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_commutes_with_membership(seed in 0u64..1000, c in prop_oneof![-3.0f64..-0.2, 0.2f64..3.0],
                                        x in prop::collection::vec(-3.0f64..3.0, 3)) {
        let k = random_symmetric_polytope(3, &mut SampleStream::new(seed, 0)).unwrap();
        let sk = ConvexBody::scale(c, k.clone()).unwrap();
        let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
        prop_assert_eq!(sk.contains(&cx), k.contains(&x));
    }

    #[test]
    fn intersection_measure_is_monotone(seed in 0u64..1000) {
        let mut s = SampleStream::new(seed, 1);
        let k = random_symmetric_polytope(2, &mut s).unwrap();
        let l = random_symmetric_polytope(2, &mut s).unwrap();
        let kl = ConvexBody::intersect(vec![k.clone(), l]).unwrap();
        let mk = gaussian_measure(&k, 4000, seed).unwrap();
        let mkl = gaussian_measure(&kl, 4000, seed + 1).unwrap();
        prop_assert!(mkl.mean <= mk.mean + 3.0 * mk.stderr.hypot(mkl.stderr));
    }

    #[test]
    fn reflection_preserves_gaussian_measure(seed in 0u64..1000) {
        let k = random_symmetric_polytope(2, &mut SampleStream::new(seed, 2)).unwrap();
        let h = ConvexBody::intersect(vec![k, ConvexBody::halfspace(vec![1.0, 0.3], 0.4).unwrap()]).unwrap();
        let r = ConvexBody::scale(-1.0, h.clone()).unwrap();
        // Common random numbers: the same samples reflect exactly.
        let with_neg = gaussian_measure(&h, 3000, seed).unwrap();
        let refl = gaussian_measure(&r, 3000, seed).unwrap();
        prop_assert!((with_neg.mean - refl.mean).abs() <= 4.0 * with_neg.stderr.max(1e-3) * 2f64.sqrt());
    }
}
