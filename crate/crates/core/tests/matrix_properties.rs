use gcrsi_core::matrix::{
    check_conjugation_det, check_det_stability, check_gci_gaussian, check_gci_shifted,
    check_interpolation, check_ratio_monotone, psd_check,
};
use gcrsi_core::{det_id_plus, SymMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random PSD matrix `G Gᵀ` with a possibly rank-deficient factor.
fn random_psd(rng: &mut ChaCha8Rng, dim: usize) -> SymMatrix {
    let k = rng.gen_range(1..=dim + 1);
    let scale = 10f64.powf(rng.gen_range(-1.0..1.0));
    let g: Vec<f64> = (0..dim * k).map(|_| scale * rng.gen_range(-1.0..1.0)).collect();
    SymMatrix::gram(dim, k, &g)
}

fn psd_strategy(dim: usize) -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-2.0f64..2.0, dim * dim).prop_map(move |g| SymMatrix::gram(dim, dim, &g))
}

/// Leibniz-formula determinant, independent of the LDLᵀ and Jacobi paths.
fn leibniz_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = 0.0;
    permute(&mut perm, 0, m, &mut total);
    total
}

fn permute(perm: &mut Vec<usize>, k: usize, m: &[Vec<f64>], total: &mut f64) {
    let n = perm.len();
    if k == n {
        let mut inv = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                if perm[i] > perm[j] {
                    inv += 1;
                }
            }
        }
        let sign = if inv % 2 == 0 { 1.0 } else { -1.0 };
        *total += sign * (0..n).map(|i| m[i][perm[i]]).product::<f64>();
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        permute(perm, k + 1, m, total);
        perm.swap(k, i);
    }
}

/// `det(I + M) = Σ_S det(M_S)` over all principal submatrices.
fn principal_minor_sum(m: &SymMatrix) -> f64 {
    let n = m.dim();
    let mut total = 1.0;
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Vec<Vec<f64>> =
            idx.iter().map(|&i| idx.iter().map(|&j| m.get(i, j)).collect()).collect();
        total += leibniz_det(&sub);
    }
    total
}

#[test]
fn gci_gaussian_holds_on_ten_thousand_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let dim = rng.gen_range(1..=6);
        let a = random_psd(&mut rng, dim);
        let b = random_psd(&mut rng, dim);
        let r = check_gci_gaussian(&a, &b).unwrap();
        assert!(r.lhs <= r.rhs + 1e-9 * r.rhs, "lhs={} rhs={}", r.lhs, r.rhs);
        assert!(r.holds);
    }
}

#[test]
fn det_id_plus_matches_principal_minor_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..2_000 {
        let dim = rng.gen_range(1..=4);
        // Indefinite matrices too: the expansion holds for any symmetric M.
        let data: Vec<f64> = (0..dim * dim).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let m = SymMatrix::new(dim, data).unwrap();
        let expect = principal_minor_sum(&m);
        let got = det_id_plus(&m).unwrap();
        let scale = expect.abs().max(1.0);
        assert!((got - expect).abs() <= 1e-10 * scale, "dim={dim} got={got} expect={expect}");
    }
}

#[test]
fn min_eigenvalue_matches_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..500 {
        let dim = rng.gen_range(1..=12);
        let data: Vec<f64> = (0..dim * dim).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let m = SymMatrix::new(dim, data).unwrap();
        let na = nalgebra::DMatrix::from_row_slice(dim, dim, m.entries());
        let mut ev: Vec<f64> = na.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let ours = m.eigenvalues().unwrap();
        for (x, y) in ours.iter().zip(&ev) {
            assert!((x - y).abs() <= 1e-10 * (1.0 + y.abs()), "{x} vs {y}");
        }
        let v = psd_check(&m, 0.0).unwrap();
        assert!((v.min_eigenvalue - ev[0]).abs() <= 1e-10 * (1.0 + ev[0].abs()));
        assert_eq!(v.is_psd, v.min_eigenvalue >= 0.0);
    }
}

#[test]
fn determinant_matches_nalgebra_on_larger_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let dim = rng.gen_range(5..=16);
        let m = random_psd(&mut rng, dim).shift(0.1);
        let na = nalgebra::DMatrix::from_row_slice(dim, dim, m.entries()).determinant();
        let ours = m.determinant().unwrap();
        assert!((ours - na).abs() <= 1e-9 * na.abs(), "{ours} vs {na}");
    }
}

#[test]
fn shifted_gci_matches_whitened_gci() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..1_000 {
        let dim = rng.gen_range(1..=5);
        let a = random_psd(&mut rng, dim);
        let b = random_psd(&mut rng, dim);
        let c = random_psd(&mut rng, dim).shift(0.05);
        let w = c.inv_sqrt().unwrap();
        let g = check_gci_gaussian(&a.sandwich(&w).unwrap(), &b.sandwich(&w).unwrap()).unwrap();
        let s = check_gci_shifted(&a, &b, &c).unwrap();
        // Both sides of the shifted form carry an extra det(C)² factor.
        let (rg, rs) = (g.lhs / g.rhs, s.lhs / s.rhs);
        assert!((rg - rs).abs() <= 1e-8 * rg, "{rg} vs {rs}");
        assert_eq!(g.holds, s.holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn psd_order_is_consistent(n in psd_strategy(3), p in psd_strategy(3)) {
        let m = n.try_add(&p).unwrap();
        let diff = m.try_sub(&n).unwrap();
        let tol = 1e-12 * (1.0 + m.opnorm().unwrap());
        prop_assume!(psd_check(&diff, 0.0).unwrap().is_psd);
        if psd_check(&n, tol).unwrap().is_psd {
            prop_assert!(psd_check(&m, tol).unwrap().is_psd);
        }
    }

    #[test]
    fn ratio_monotone_at_equal_times_is_shifted_gci(
        c in psd_strategy(2), p in psd_strategy(2), q in psd_strategy(2), t in 0.0f64..3.0
    ) {
        let a = c.try_add(&p).unwrap();
        let b = c.try_add(&q).unwrap();
        let rm = check_ratio_monotone(&a, &b, &c, t, t).unwrap();
        let cc = c.scale(t).shift(1.0);
        let aa = a.try_sub(&c).unwrap().scale(t);
        let bb = b.try_sub(&c).unwrap().scale(t);
        let sh = check_gci_shifted(&aa, &bb, &cc).unwrap();
        prop_assert!((rm.lhs - sh.rhs).abs() <= 1e-9 * sh.rhs);
        prop_assert!((rm.rhs - sh.lhs).abs() <= 1e-9 * sh.lhs);
        prop_assert_eq!(rm.holds, sh.holds);
    }

    #[test]
    fn det_stability_holds(a in psd_strategy(3), b in psd_strategy(3)) {
        prop_assert!(check_det_stability(&a, &b).unwrap().holds);
    }

    #[test]
    fn conjugation_monotone(p in psd_strategy(3), z in psd_strategy(3)) {
        let d = p.shift(1.0);
        prop_assert!(check_conjugation_det(&d, &z).unwrap().holds);
    }

    #[test]
    fn ratio_monotone_holds(
        c in psd_strategy(3), p in psd_strategy(3), q in psd_strategy(3),
        t1 in 0.0f64..2.0, dt in 0.0f64..2.0
    ) {
        let a = c.try_add(&p).unwrap();
        let b = c.try_add(&q).unwrap();
        prop_assert!(check_ratio_monotone(&a, &b, &c, t1, t1 + dt).unwrap().holds);
    }

    #[test]
    fn interpolation_holds(c in psd_strategy(3), z in psd_strategy(3), alpha in 0.0f64..=1.0) {
        prop_assert!(check_interpolation(&c, &z, alpha).unwrap().holds);
    }

    #[test]
    fn construction_is_exactly_symmetric(data in prop::collection::vec(-1e3f64..1e3, 16)) {
        let m = SymMatrix::new(4, data).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                prop_assert_eq!(m.get(i, j).to_bits(), m.get(j, i).to_bits());
            }
        }
    }
}
