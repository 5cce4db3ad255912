use std::collections::{BTreeSet, HashSet};

use num::ToPrimitive;
use quatlat::arith::Factored;
use quatlat::counting::*;
use quatlat::lattice::families::*;
use quatlat::lattice::{Lattice4, MaximalOrder, OElt};
use quatlat::quat::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Brute force over a coordinate box. For `nrd(a) = m` and `u(z, az) <= d`,
/// `|iota(a)|_F <= sqrt(m (4d + 2)) |sigma_z|_F^2`, and every coordinate in
/// `1, I, J, IJ` of the disc-6 algebra is at most `|iota(a)|_F`.
fn naive(lat: &Lattice4, z: &UpperHalfPoint, delta: f64, m_max: u64) -> BTreeSet<(u64, OElt)> {
    let o = lat.parent();
    let alg = o.alg();
    assert_eq!((alg.p(), alg.q()), (3, -1));
    let sig = z.y + (z.x * z.x + 1.0) / z.y;
    let f = ((m_max as f64) * (4.0 * delta + 2.0)).sqrt() * sig * (1.0 + 1e-9);
    let std = [alg.one(), alg.i(), alg.j(), alg.ij()];
    let c: Vec<Vec<f64>> = std
        .iter()
        .map(|q| o.rat_coords(q).unwrap().iter().map(|x| x.to_f64().unwrap()).collect())
        .collect();
    let b: Vec<i128> = (0..4).map(|k| (f * (0..4).map(|j| c[j][k].abs()).sum::<f64>()).ceil() as i128).collect();
    let mats: Vec<Mat2> = o.basis().iter().map(iota_inf).collect();
    let mut out = BTreeSet::new();
    for x0 in -b[0]..=b[0] {
        for x1 in -b[1]..=b[1] {
            for x2 in -b[2]..=b[2] {
                for x3 in -b[3]..=b[3] {
                    let x = [x0, x1, x2, x3];
                    let n = o.nrd(&x);
                    if n < 1 || n as u64 > m_max || !lat.contains(&x) {
                        continue;
                    }
                    let mut g = [[0.0; 2]; 2];
                    for k in 0..4 {
                        for i in 0..2 {
                            for j in 0..2 {
                                g[i][j] += x[k] as f64 * mats[k][i][j];
                            }
                        }
                    }
                    if u_displacement(z, &g) <= delta + U_SLACK {
                        out.insert((n as u64, x));
                    }
                }
            }
        }
    }
    out
}

fn flat(found: std::collections::BTreeMap<u64, Vec<OElt>>) -> BTreeSet<(u64, OElt)> {
    found.into_iter().flat_map(|(m, xs)| xs.into_iter().map(move |x| (m, x))).collect()
}

fn zo0(o: &std::sync::Arc<MaximalOrder>) -> Lattice4 {
    Lattice4::from_int_rows(&[[1, 0, 0, 0], [-1, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], o).unwrap()
}

#[test]
fn enumeration_matches_naive_scan() {
    let o = MaximalOrder::disc6();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let lats = [
        Lattice4::maximal(&o),
        scalar_order(&o, 2).unwrap(),
        eichler(&o, &Factored::from_u64(5)).unwrap(),
        zo0(&o),
        random_with_one(&o, 40, &mut rng),
    ];
    for k in 0..20 {
        let lat = &lats[k % lats.len()];
        let z = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..1.3)).unwrap();
        let delta = [0.5, 1.0][k % 2];
        let m_max = 1 + (k as u64 % 3);
        let fast = flat(enumerate_elts(lat, &z, delta, &NormSet::UpTo(m_max)).unwrap());
        let slow = naive(lat, &z, delta, m_max);
        assert_eq!(fast, slow, "query {k}");
    }
}

#[test]
fn sign_symmetry_and_units() {
    let o = MaximalOrder::disc6();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..10 {
        let lat = random_with_one(&o, 200, &mut rng);
        let z = UpperHalfPoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0)).unwrap();
        let found = flat(enumerate_elts(&lat, &z, 1.0, &NormSet::UpTo(30)).unwrap());
        assert!(found.contains(&(1, [1, 0, 0, 0])) && found.contains(&(1, [-1, 0, 0, 0])));
        for (m, x) in &found {
            assert!(found.contains(&(*m, x.map(|v| -v))));
        }
    }
}

#[test]
fn norm_ball_respects_box_constant() {
    let o = MaximalOrder::disc6();
    let t = box_constant_for_basis(1.0, &ZBox::default(), o.alg(), o.basis());
    let lat = eichler(&o, &Factored::from_u64(7)).unwrap();
    for m in 1..=40 {
        let z = UpperHalfPoint::new(0.3, 0.7).unwrap();
        let xs = enumerate_norm_ball(&lat, m, &z, 1.0, &t).unwrap();
        assert!(xs.iter().all(|q| q.nrd() == num::BigRational::from_integer(m.into())));
    }
}

#[test]
fn trivial_shape_bound() {
    let o = MaximalOrder::disc6();
    let w = build_injection(&zo0(&o), None).unwrap();
    assert_eq!((w.shape.m1, w.shape.m2, w.shape.m3, w.shape.e), (1, 1, 1, 2));
    let t = BoxConstant { delta: 1.0, t: 1.0 };
    assert_eq!(explicit_bound(&w, &t, 4, false), 625);
    let one = o.alg().one();
    assert_eq!(project_alpha(&w, &one).unwrap(), ProjectedTuple { a0: 1, a_a: 0, a_b: 0, a3: 0 });
    let mut last = 0;
    for l in 1..50 {
        let b = explicit_bound(&w, &t, l, false);
        assert!(b >= last);
        last = b;
        assert!(explicit_bound(&w, &BoxConstant { delta: 1.0, t: 2.0 }, l, false) >= b);
    }
}

#[test]
fn projection_is_injective_and_congruences_hold() {
    let o = MaximalOrder::disc6();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let lats = [
        eichler_prime_power(&o, 5, 2).unwrap(),
        scalar_order(&o, 3).unwrap(),
        ramified_level_order(&o, 3).unwrap(),
        random_with_one(&o, 10_000, &mut rng),
    ];
    for lat in &lats {
        let w = build_injection(lat, None).unwrap();
        assert_ne!(w.s2 as i128 - w.r2 as i128, 0);
        let basis = w.working.basis_elts().unwrap();
        let mut seen = HashSet::new();
        let mut elts = HashSet::new();
        for _ in 0..10_000 {
            let c: [i128; 4] = std::array::from_fn(|_| rng.gen_range(-30..=30));
            let x: OElt = std::array::from_fn(|k| (0..4).map(|i| c[i] * basis[i][k]).sum());
            let t = project_elt(&w, &x).unwrap();
            assert!(verify_congruences(&w, &t));
            if elts.insert(x) {
                assert!(seen.insert(t), "collision at {x:?}");
            }
        }
        if w.shape.m() > 1 {
            let rejected = (0..2000)
                .filter(|_| {
                    let t = ProjectedTuple {
                        a0: rng.gen_range(-50..50),
                        a_a: rng.gen_range(-50..50),
                        a_b: rng.gen_range(-50..50),
                        a3: rng.gen_range(-50..50),
                    };
                    !verify_congruences(&w, &t)
                })
                .count();
            assert!(rejected > 1000, "only {rejected} of 2000 random tuples rejected");
        }
    }
}

#[test]
fn sweep_reports_are_consistent() {
    let o = MaximalOrder::disc6();
    let t = box_constant_for_basis(1.0, &ZBox::default(), o.alg(), o.basis());
    let z = UpperHalfPoint::new(-0.2, 1.4).unwrap();
    for lat in [Lattice4::maximal(&o), eichler_prime_power(&o, 5, 2).unwrap(), zo0(&o)] {
        let w = build_injection(&lat, None).unwrap();
        let q = |l_max, squares_only| CountQuery { lat: lat.clone(), z, delta: 1.0, l_max, squares_only };
        let one = sweep_counts(&q(1, false), &w, &t).unwrap();
        assert!(one.total >= 2 && one.total <= one.explicit_bound);
        let sq = sweep_counts(&q(6, true), &w, &t).unwrap();
        let all = sweep_counts(&q(36, false), &w, &t).unwrap();
        assert!(sq.total <= all.total);
        assert!(all.total <= all.explicit_bound);
    }
}

#[test]
fn square_norms_factor() {
    let o = MaximalOrder::disc6();
    let alg = o.alg();
    for l in 1..6u64 {
        assert!(square_norm_factor_check(&alg.scalar(l as i64), l).unwrap());
    }
    let z = UpperHalfPoint::new(0.1, 0.9).unwrap();
    let found = enumerate_elts(&Lattice4::maximal(&o), &z, 1.0, &NormSet::SquaresUpTo(12)).unwrap();
    let mut n = 0;
    for (m, xs) in found {
        let l = (m as f64).sqrt().round() as u64;
        for x in xs {
            assert!(square_norm_factor_check(&o.to_quat(&x), l).unwrap());
            n += 1;
        }
    }
    assert!(n > 10);
}

#[test]
fn small_norms_in_deep_orders_commute() {
    let o = MaximalOrder::disc6();
    let e = eichler_prime_power(&o, 7, 4).unwrap();
    let z = UpperHalfPoint::new(0.05, 1.1).unwrap();
    let r = order_small_norm_check(&e, &z, 1.0, 100, 8).unwrap();
    assert!(r.m_star >= 1);
    assert_eq!(r.m_checked, r.m_star.min(100));
    assert!(r.per_m.get(&1).copied().unwrap_or(0) >= 2);
}
