use num::{BigInt, BigRational};
use quatlat::arith::gcd;
use quatlat::lattice::families::*;
use quatlat::lattice::*;
use quatlat::linalg::QMat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn trace_gcd(l: &Lattice4) -> i128 {
    let o = l.parent();
    l.basis_elts().unwrap().iter().fold(0, |g, x| gcd(g, o.trd(x)))
}

fn units(o: &MaximalOrder, h: i128) -> Vec<OElt> {
    let mut out = Vec::new();
    for a in -h..=h {
        for b in -h..=h {
            for c in -h..=h {
                for d in -h..=h {
                    let x = [a, b, c, d];
                    if o.nrd(&x) == 1 && x != [1, 0, 0, 0] && x != [-1, 0, 0, 0] {
                        out.push(x);
                    }
                }
            }
        }
    }
    out
}

fn unimodular<R: Rng>(rng: &mut R) -> [[i128; 4]; 4] {
    let mut u = [[0i128; 4]; 4];
    for (i, row) in u.iter_mut().enumerate() {
        row[i] = 1;
    }
    for _ in 0..12 {
        let i = rng.gen_range(0..4);
        let j = (i + rng.gen_range(1..4)) % 4;
        let f = rng.gen_range(-3..=3);
        for k in 0..4 {
            u[i][k] += f * u[j][k];
        }
    }
    u
}

#[test]
fn shapes_of_random_lattices() {
    let o = MaximalOrder::disc6();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let l = random_with_one(&o, 1_000_000, &mut rng);
        let n = l.level().unwrap();
        let s = l.shape().unwrap();
        // [L : Z + L0] = 2 / gcd of traces, and [O : Z + L0] = 2 M
        let ti = 2 / trace_gcd(&l);
        assert_eq!(s.trace_index as i128, ti);
        assert_eq!(n as i128 * ti, 2 * s.m() as i128);
        assert!(s.e == 1 || s.e == 2);
        assert_eq!(s.level() as u128, n);
        assert_eq!(s.m2 % s.m1, 0);
        assert_eq!(s.m3 % s.m2, 0);
    }
}

#[test]
fn standard_levels_and_shapes() {
    let o = MaximalOrder::disc6();
    let max = Lattice4::maximal(&o);
    assert_eq!(max.level().unwrap(), 1);
    let s = max.shape().unwrap();
    assert_eq!((s.m1, s.m2, s.m3, s.e, s.trace_index), (1, 1, 1, 1, 2));
    for f in [2u64, 3, 4] {
        let l = scalar_order(&o, f).unwrap();
        assert_eq!(l.level().unwrap(), (f * f * f) as u128);
        assert!(l.is_order());
    }
    let s3 = scalar_order(&o, 3).unwrap().shape().unwrap();
    assert_eq!((s3.m1, s3.m2, s3.m3), (3, 3, 3));
    // Z + O_0 has index 2 and the same trace-zero part
    let zo0 = Lattice4::from_int_rows(&[[1, 0, 0, 0], [-1, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], &o).unwrap();
    let s = zo0.shape().unwrap();
    assert_eq!((s.m1, s.m2, s.m3, s.e, s.trace_index), (1, 1, 1, 2, 1));
}

#[test]
fn hnf_is_span_invariant() {
    let o = MaximalOrder::disc6();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let l = random_with_one(&o, 5000, &mut rng);
        let u = unimodular(&mut rng);
        let rows = l.rows_q();
        let moved: QMat = (0..4)
            .map(|i| {
                (0..4)
                    .map(|k| (0..4).map(|j| &rows[j][k] * BigRational::from_integer(BigInt::from(u[i][j]))).sum())
                    .collect()
            })
            .collect();
        let back = hnf_canonicalize(&moved, &o).unwrap();
        assert_eq!(back.hnf(), l.hnf());
        assert_eq!(back.den(), l.den());
        let mut perm = rows.clone();
        perm.reverse();
        assert_eq!(hnf_canonicalize(&perm, &o).unwrap().hnf(), l.hnf());
    }
}

#[test]
fn order_check_against_products() {
    let o = MaximalOrder::disc6();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut orders = 0;
    for _ in 0..200 {
        let l = random_with_one(&o, 2000, &mut rng);
        let b = l.basis_elts().unwrap();
        let closed = b.iter().all(|x| b.iter().all(|y| l.contains(&o.mul(x, y))));
        assert_eq!(l.is_order(), closed);
        orders += usize::from(closed);
    }
    assert!(orders < 200);
}

#[test]
fn invariant_factor_examples() {
    let o = MaximalOrder::disc6();
    let max = Lattice4::maximal(&o);
    assert_eq!(invariant_factors(&max, &max).unwrap().a, [1, 1, 1, 1]);
    assert_eq!(invariant_factors(&scalar_order(&o, 2).unwrap(), &max).unwrap().a, [1, 2, 2, 2]);
    for l in [5u64, 7, 11, 13] {
        let e = eichler(&o, &quatlat::arith::Factored::from_u64(l)).unwrap();
        let f = invariant_factors(&e, &max).unwrap();
        assert_eq!(f.a, [1, 1, 1, l as u128]);
        assert!(f.balanced());
        assert_eq!(e.level().unwrap(), l as u128);
    }
    assert!(!InvariantFactors::from_diagonal([1, 1, 1, 25]).balanced());
    assert!(InvariantFactors::from_diagonal([1, 1, 5, 5]).balanced());
}

#[test]
fn norm_p_conjugator_splits_the_top_factor() {
    let o = MaximalOrder::disc6();
    let max = Lattice4::maximal(&o);
    for p in [5u64, 7] {
        let e = eichler_prime_power(&o, p, 2).unwrap();
        assert_eq!(invariant_factors(&e, &max).unwrap().a, [1, 1, 1, (p * p) as u128]);
        let hit = find_element(6, |x| {
            if o.nrd(x) != p as i128 {
                return false;
            }
            let (c, inside) = e.conjugate(&o.to_quat(x)).unwrap();
            inside && invariant_factors(&c, &max).unwrap().a == [1, 1, p as u128, p as u128]
        });
        assert!(hit.is_some(), "no norm {p} conjugator");
    }
}

#[test]
fn discriminants_and_saturation() {
    let o = MaximalOrder::disc6();
    let max = Lattice4::maximal(&o);
    assert_eq!(max.reduced_discriminant().unwrap(), 6);
    assert_eq!(scalar_order(&o, 2).unwrap().reduced_discriminant().unwrap(), 48);
    let alg = o.alg();
    let rows: QMat = [alg.one(), alg.i(), alg.j(), alg.ij()].iter().map(|q| o.rat_coords(q).unwrap()).collect();
    let lip = hnf_canonicalize(&rows, &o).unwrap();
    assert!(lip.is_order());
    assert_eq!(lip.level().unwrap(), 2);
    let sat = saturate_to_maximal(&lip).unwrap();
    assert_eq!(sat.reduced_discriminant().unwrap(), 6);
    assert_eq!(saturate_to_maximal(&sat).unwrap().hnf(), sat.hnf());
    assert_eq!(saturate_to_maximal(&max).unwrap().hnf(), max.hnf());
}

#[test]
fn unit_conjugation_preserves_invariants() {
    let o = MaximalOrder::disc6();
    let us = units(&o, 2);
    assert!(!us.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for k in 0..100 {
        let l = random_with_one(&o, 3000, &mut rng);
        let g = o.to_quat(&us[k % us.len()]);
        let (c, inside) = l.conjugate(&g).unwrap();
        assert!(inside);
        assert_eq!(c.shape().unwrap(), l.shape().unwrap());
        if l.is_order() {
            assert_eq!(c.reduced_discriminant().unwrap(), l.reduced_discriminant().unwrap());
        }
    }
    let one = o.alg().one();
    let l = scalar_order(&o, 3).unwrap();
    assert_eq!(l.conjugate(&one).unwrap().0.hnf(), l.hnf());
}

#[test]
fn intersections() {
    let o = MaximalOrder::disc6();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..30 {
        let a = random_with_one(&o, 500, &mut rng);
        let b = random_with_one(&o, 500, &mut rng);
        let c = random_with_one(&o, 500, &mut rng);
        assert_eq!(a.intersect(&a).unwrap().hnf(), a.hnf());
        let left = a.intersect(&b).unwrap().intersect(&c).unwrap();
        let right = a.intersect(&b.intersect(&c).unwrap()).unwrap();
        assert_eq!(left.hnf(), right.hnf());
    }
    for l in [5u64, 7, 13] {
        let x = split_element(&o, l).unwrap();
        let e = intersect_with_conjugate(&o, &o.to_quat(&x)).unwrap();
        assert_eq!(e.level().unwrap(), l as u128);
        assert!(e.is_order());
    }
}
