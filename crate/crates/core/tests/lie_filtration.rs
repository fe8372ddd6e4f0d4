use cartan_adelic::gl2_ring::{Mat2, PrimePower};
use cartan_adelic::lie_filtration::{
    bracket_closed, build_v, classify_cartan_lift, g_dims, is_irreducible_under, is_ncartan_lift_finite,
    ncartan_lift_witness,    is_stable_under, kernel_battery, level_kernel, lie_image, sample_cartan_preimage, verify_cartan_tower,
    CartanCase, Classification, LieSubspace, SamplerConfig, VPiece,
};
use cartan_adelic::matgroups::{build_cartan, full_gl2, generate, preimage, CartanKind, MatGroup};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ctx(p: u32, n: u32) -> PrimePower {
    PrimePower::new(p, n).unwrap()
}

fn v(p: u32, which: VPiece) -> LieSubspace {
    build_v(p, which, CartanCase::Nonsplit).unwrap()
}

fn cplus(p: u32, n: u32) -> MatGroup {
    build_cartan(ctx(p, n), CartanKind::NonsplitNormaliser).unwrap()
}

#[test]
fn level_kernels() {
    assert_eq!(level_kernel(&full_gl2(ctx(3, 2)).unwrap(), 1).unwrap().order(), 81);
    assert_eq!(level_kernel(&cplus(3, 2), 1).unwrap().order(), 9);
    let trivial = generate(ctx(3, 2), &[]).unwrap();
    assert_eq!(level_kernel(&trivial, 1).unwrap().order(), 1);
    assert!(level_kernel(&trivial, 2).is_err());
}

#[test]
fn lie_images_of_standard_groups() {
    for p in [3u32, 5, 7] {
        assert_eq!(lie_image(&cplus(p, 2), 1).unwrap(), v(p, VPiece::V1).sum(&v(p, VPiece::V2)));
        assert_eq!(lie_image(&full_gl2(ctx(p, 2)).unwrap(), 1).unwrap(), LieSubspace::gl2(p));
        assert_eq!(lie_image(&generate(ctx(p, 2), &[]).unwrap(), 1).unwrap().dim(), 0);
    }
}

#[test]
fn lie_image_dimension_matches_kernel_quotient() {
    // |G_i / G_{i+1}| = p^dim g_i, computed without the Lie map
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [3u32] {
        let k = ctx(p, 3);
        let c = cplus(p, 3);
        for _ in 0..15 {
            let g = sample_cartan_preimage(k, &c, &mut rng, 3).unwrap();
            for i in 1..3 {
                let gi = level_kernel(&g, i).unwrap().order();
                let gi1 = if i + 1 < 3 { level_kernel(&g, i + 1).unwrap().order() } else {
                    g.elements().filter(|x| x.is_identity()).count() as u64
                };
                assert_eq!(gi / gi1, (p as u64).pow(lie_image(&g, i).unwrap().dim() as u32));
            }
        }
    }
}

#[test]
fn decomposition_pieces() {
    for p in [3u32, 5, 7, 11, 13] {
        let (v1, v2, v3) = (v(p, VPiece::V1), v(p, VPiece::V2), v(p, VPiece::V3));
        assert_eq!((v1.dim(), v2.dim(), v3.dim()), (1, 1, 2));
        assert_eq!(v1.sum(&v2).sum(&v3), LieSubspace::gl2(p));
        assert_eq!(v1.sum(&v2).sl_part(), v2);
        assert!(!bracket_closed(&v3));
        assert!(bracket_closed(&v1));
    }
    assert_eq!(LieSubspace::gl2(7).sl_part(), LieSubspace::sl2(7));
    assert_eq!(LieSubspace::sl2(7).dim(), 3);
    assert!(bracket_closed(&LieSubspace::gl2(5)));
}

#[test]
fn irreducibility_under_the_normaliser() {
    for p in [5u32, 7] {
        let c = cplus(p, 1);
        for w in [VPiece::V1, VPiece::V2, VPiece::V3] {
            assert!(is_stable_under(&v(p, w), &c).unwrap());
            assert!(is_irreducible_under(&v(p, w), &c).unwrap());
        }
    }
    // scalars are central
    let gl = full_gl2(ctx(5, 1)).unwrap();
    assert!(is_irreducible_under(&v(5, VPiece::V1), &gl).unwrap());
    assert!(!is_stable_under(&v(5, VPiece::V2), &gl).unwrap());
}

#[test]
fn v3_splits_for_small_projective_orders() {
    let battery = cartan_adelic::verify::small_projective_battery().unwrap();
    assert!(!battery.is_empty());
    let eps = ctx(3, 1).eps().unwrap();
    let l1 = LieSubspace::span(3, [[1, 0, 0, 2]]);
    let l2 = LieSubspace::span(3, [[0, eps, 2, 0]]);
    for g in &battery {
        assert!(is_stable_under(&l1, g).unwrap());
        assert!(is_stable_under(&l2, g).unwrap());
        assert!(!is_irreducible_under(&v(3, VPiece::V3), g).unwrap());
    }
    // the full normaliser mod 3 has an element of projective order 4 and keeps V3 irreducible
    assert!(is_irreducible_under(&v(3, VPiece::V3), &cplus(3, 1)).unwrap());
}

#[test]
fn ncartan_lift_predicate() {
    for p in [3u32, 5] {
        let c = cplus(p, 2);
        assert!(is_ncartan_lift_finite(&c).unwrap());
        assert!(!is_ncartan_lift_finite(&c.sl2_part()).unwrap());
    }
    // mod-3 image inside the split torus: contained in the Cartan
    let k = ctx(3, 2);
    let g = generate(k, &[Mat2::new(k, 2, 0, 0, 1), Mat2::new(k, 1, 0, 0, 2), Mat2::scalar(k, 4), Mat2::new(k, 4, 0, 0, 1)])
        .unwrap();
    assert!(!is_ncartan_lift_finite(&g).unwrap());
}

#[test]
fn trichotomy_on_handcrafted_groups() {
    for p in [3u32, 5] {
        let rep = classify_cartan_lift(&cplus(p, 2), "c").unwrap().unwrap();
        assert_eq!(rep.classification, Classification::NormaliserCase);
        assert_eq!(rep.g_dims, vec![2]);

        let full = preimage(&cplus(p, 1), ctx(p, 2)).unwrap();
        assert_eq!(lie_image(&full, 1).unwrap(), LieSubspace::gl2(p));
        let rep = classify_cartan_lift(&full, "full").unwrap().unwrap();
        assert_eq!(rep.classification, Classification::FullKernel { level: 1 });

        let battery = kernel_battery(ctx(p, 2)).unwrap();
        let (_, semi) = battery.iter().find(|(l, _)| l == "kernel V1+V3").unwrap();
        let rep = classify_cartan_lift(semi, "semi").unwrap().unwrap();
        assert_eq!(rep.classification, Classification::SemidirectV1V3Case);
        assert_eq!(rep.g_dims, vec![3]);
    }
}

#[test]
fn tower_census_level_three() {
    let census = verify_cartan_tower(3, 3, SamplerConfig { samples: 60, seed: 3, max_generators: 3 }).unwrap();
    assert!(census.violations().is_empty(), "{:?}", census.violations());
    assert!(census.qualifying > 0);
    assert!(verify_cartan_tower(3, 4, SamplerConfig::default()).is_err());
}

#[test]
fn tower_census_is_deterministic() {
    let cfg = SamplerConfig { samples: 40, seed: 99, max_generators: 3 };
    let a = serde_json::to_string(&verify_cartan_tower(5, 2, cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&verify_cartan_tower(5, 2, cfg).unwrap()).unwrap();
    assert_eq!(a, b);
}

fn sampled_lifts(p: u32, n: u32, count: usize, seed: u64) -> Vec<MatGroup> {
    let k = ctx(p, n);
    let c = cplus(p, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sample_cartan_preimage(k, &c, &mut rng, 3).unwrap()).collect()
}

#[test]
fn filtration_dims_are_monotone() {
    for g in sampled_lifts(3, 3, 40, 5) {
        let d = g_dims(&g).unwrap();
        assert!(d.windows(2).all(|w| w[0] <= w[1]), "{d:?}");
        assert!(d.iter().all(|&x| x <= 4));
    }
}

#[test]
fn scalars_lie_in_g1_for_lifts() {
    for p in [3u32, 5] {
        for g in sampled_lifts(p, 2, 40, 17) {
            if is_ncartan_lift_finite(&g).unwrap() {
                assert!(v(p, VPiece::V1).is_subspace_of(&lie_image(&g, 1).unwrap()));
            }
        }
    }
}

#[test]
fn dim_two_lifts_grow_to_two_or_four() {
    let mut checked = 0;
    for g in sampled_lifts(3, 3, 80, 23) {
        let d = g_dims(&g).unwrap();
        let qualifies = ncartan_lift_witness(&g).unwrap().is_some_and(|w| w.large_projective_order);
        if qualifies && d[0] == 2 {
            checked += 1;
            assert!(d[1] == 2 || d[1] == 4, "{d:?}");
        }
    }
    assert!(checked > 0);
}

#[test]
fn trace_and_sl_part_for_coprime_images() {
    // det surjective and p not dividing |G(p)|: tr g_1 = F_p and the Lie algebra of G n SL2 is g_1 n sl2
    for p in [3u32, 5] {
        for g in sampled_lifts(p, 2, 40, 31) {
            if g.reduce_level(1).unwrap().order() % p as u64 != 0 {
                let g1 = lie_image(&g, 1).unwrap();
                assert!(g1.trace_surjective());
                assert_eq!(lie_image(&g.sl2_part(), 1).unwrap(), g1.sl_part());
            }
        }
    }
}

#[test]
fn containment_on_random_subgroups() {
    let (ok, detail) = cartan_adelic::verify::g_containment(150, 4).unwrap();
    assert!(ok, "{detail}");
}
