use cartan_adelic::gl2_ring::{Mat2, PrimePower};
use cartan_adelic::matgroups::{
    build_cartan, full_gl2, generate, generate_with_budget, in_cartan, is_conjugate_subgroup, CartanKind, MatGroup,
};
use cartan_adelic::Error;

fn ctx(p: u32, n: u32) -> PrimePower {
    PrimePower::new(p, n).unwrap()
}

fn det_scan(k: PrimePower) -> u64 {
    let m = k.modulus() as i64;
    let mut count = 0;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    if (a * d - b * c).rem_euclid(m) % k.p() as i64 != 0 {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

// nonsplit Cartan from the parametrisation (a, e b; b, a) with an arbitrary non-square e
fn nonsplit_with(k: PrimePower, e: i64) -> MatGroup {
    let m = k.modulus() as i64;
    let p = k.p() as i64;
    let mut elements = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if a % p != 0 || b % p != 0 {
                elements.push(Mat2::new(k, a, e * b, b, a).encode());
            }
        }
    }
    MatGroup::from_elements(k, elements)
}

#[test]
fn trivial_and_generated_groups() {
    let k3 = ctx(3, 1);
    assert_eq!(generate(k3, &[]).unwrap().order(), 1);
    // (0,2;1,0) only has order 4 and gives a dihedral group of order 8
    let d8 = generate(k3, &[Mat2::new(k3, 0, 2, 1, 0), Mat2::new(k3, 1, 0, 0, 2)]).unwrap();
    assert_eq!(d8.order(), 8);
    let g = generate(k3, &[Mat2::new(k3, 1, 2, 1, 1), Mat2::new(k3, 1, 0, 0, 2)]).unwrap();
    assert_eq!(g.order(), 16);
    assert_eq!(g, build_cartan(k3, CartanKind::NonsplitNormaliser).unwrap());

    let k5 = ctx(5, 1);
    let gl = full_gl2(k5).unwrap();
    assert_eq!(gl.order(), 480);
    assert_eq!(gl.order(), det_scan(k5));
    assert_eq!(gl.index_in_gl2().unwrap(), 1);
}

#[test]
fn non_unit_generators_and_budget() {
    let k = ctx(5, 1);
    assert!(matches!(generate(k, &[Mat2::new(k, 5, 0, 0, 1)]), Err(Error::NonUnit(_))));
    let gens = cartan_adelic::matgroups::gl2_generators(k);
    assert!(matches!(generate_with_budget(k, &gens, 100), Err(Error::SizeCap(100))));
}

#[test]
fn cartan_orders() {
    assert_eq!(build_cartan(ctx(3, 2), CartanKind::Nonsplit).unwrap().order(), 72);
    assert_eq!(build_cartan(ctx(3, 2), CartanKind::NonsplitNormaliser).unwrap().order(), 144);
    for p in [3u32, 5, 7, 11] {
        let q = p as u64;
        let k = ctx(p, 1);
        assert_eq!(build_cartan(k, CartanKind::Split).unwrap().order(), (q - 1).pow(2));
        assert_eq!(build_cartan(k, CartanKind::SplitNormaliser).unwrap().order(), 2 * (q - 1).pow(2));
        assert_eq!(build_cartan(k, CartanKind::Borel).unwrap().order(), q * (q - 1).pow(2));
        assert_eq!(build_cartan(k, CartanKind::NonsplitNormaliser).unwrap().order(), 2 * (q * q - 1));
    }
    assert!(matches!(build_cartan(ctx(2, 2), CartanKind::Split), Err(Error::Unsupported(_))));
}

#[test]
fn cartan_indices() {
    assert_eq!(build_cartan(ctx(3, 2), CartanKind::NonsplitNormaliser).unwrap().index_in_gl2().unwrap(), 27);
    assert_eq!(build_cartan(ctx(5, 1), CartanKind::NonsplitNormaliser).unwrap().index_in_gl2().unwrap(), 10);
    let c25 = build_cartan(ctx(5, 2), CartanKind::NonsplitNormaliser).unwrap();
    let gl25 = Mat2::all_invertible(ctx(5, 2)).count() as u64;
    assert_eq!(gl25, 300_000);
    assert_eq!(gl25 / c25.order(), 250);
    assert_eq!(c25.index_in_gl2().unwrap(), 250);
}

#[test]
fn sl2_parts() {
    assert_eq!(full_gl2(ctx(3, 1)).unwrap().sl2_part().order(), 24);
    // the small orders quoted for the normalisers at 5 and 7 are the determinant-one parts
    let c7 = build_cartan(ctx(7, 1), CartanKind::NonsplitNormaliser).unwrap();
    let c5 = build_cartan(ctx(5, 1), CartanKind::NonsplitNormaliser).unwrap();
    assert_eq!((c7.order(), c7.sl2_part().order()), (96, 16));
    assert_eq!((c5.order(), c5.sl2_part().order()), (48, 12));
}

#[test]
fn twisted_coset_has_trace_zero_and_squares_to_scalars() {
    for (p, n) in [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (7, 2)] {
        let k = ctx(p, n);
        let plus = build_cartan(k, CartanKind::NonsplitNormaliser).unwrap();
        let c = build_cartan(k, CartanKind::Nonsplit).unwrap();
        let twisted: Vec<Mat2> = plus.elements().filter(|x| !c.contains(x)).collect();
        assert_eq!(twisted.len() as u64, c.order());
        for x in &twisted {
            assert_eq!(x.trace(), 0);
            assert!(x.mul_unchecked(x).is_scalar());
        }
    }
}

#[test]
fn normaliser_normalises() {
    for (p, n) in [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (7, 2)] {
        let k = ctx(p, n);
        let plus = build_cartan(k, CartanKind::NonsplitNormaliser).unwrap();
        let c = build_cartan(k, CartanKind::Nonsplit).unwrap();
        for g in plus.elements() {
            assert_eq!(c.conjugate_by(&g).unwrap(), c);
        }
    }
}

#[test]
fn membership_agrees_with_enumeration() {
    for kind in CartanKind::ALL {
        let k = ctx(3, 2);
        let g = build_cartan(k, kind).unwrap();
        for x in Mat2::all_invertible(k) {
            assert_eq!(in_cartan(kind, &x).unwrap(), g.contains(&x), "{kind} {x}");
        }
    }
}

#[test]
fn reduction_of_the_normaliser_is_onto() {
    for p in [3u32, 5, 7] {
        let high = build_cartan(ctx(p, 2), CartanKind::NonsplitNormaliser).unwrap();
        let low = build_cartan(ctx(p, 1), CartanKind::NonsplitNormaliser).unwrap();
        assert_eq!(high.reduce_level(1).unwrap(), low);
    }
}

#[test]
fn conjugacy_search() {
    let k = ctx(5, 1);
    let c = build_cartan(k, CartanKind::NonsplitNormaliser).unwrap();
    assert!(is_conjugate_subgroup(&c, &c).unwrap().unwrap().is_identity());

    // eps = 2 and eps * 2^2 = 3 give conjugate tori
    let a = nonsplit_with(k, 2);
    let b = nonsplit_with(k, 3);
    assert_ne!(a, b);
    let x = is_conjugate_subgroup(&a, &b).unwrap().expect("conjugate");
    assert_eq!(a.conjugate_by(&x).unwrap(), b);

    let split = build_cartan(k, CartanKind::SplitNormaliser).unwrap();
    assert_eq!(is_conjugate_subgroup(&c, &split).unwrap(), None);

    let big = build_cartan(ctx(53, 1), CartanKind::Split).unwrap();
    assert!(matches!(is_conjugate_subgroup(&big, &big), Err(Error::SizeCap(_))));
}

#[test]
fn closure_and_lagrange_on_random_groups() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let k = ctx(3, 2);
    for _ in 0..40 {
        let gens: Vec<Mat2> = (0..2)
            .map(|_| loop {
                let x = Mat2::new(k, rng.gen_range(0..9), rng.gen_range(0..9), rng.gen_range(0..9), rng.gen_range(0..9));
                if x.is_invertible() {
                    break x;
                }
            })
            .collect();
        let g = generate(k, &gens).unwrap();
        assert_eq!(k.gl2_order() % g.order(), 0);
        assert!(g.contains(&Mat2::identity(k)));
        let elems: Vec<Mat2> = g.elements().collect();
        for x in elems.iter().take(20) {
            assert!(g.contains(&x.inverse().unwrap()));
            for y in elems.iter().take(20) {
                assert!(g.contains(&x.mul_unchecked(y)));
            }
        }
    }
}
