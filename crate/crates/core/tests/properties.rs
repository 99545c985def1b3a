mod common;

use proptest::prelude::*;

use lucp_core::algebra::FpMatrix;
use lucp_core::cohomology::{differential, Cochain, CohomologyGroup, GModule};
use lucp_core::crossed::{build_crossed_product, obstruction_three_cocycle, twist_by_two_cochain};

use common::{builtin_fixtures, gmodule_fixtures, instance_gmodule, load};

fn random_cochain(gm: &GModule, degree: usize, seed: &[u64]) -> Cochain {
    let order = gm.group.order();
    let e = gm.group.identity();
    let factors = &gm.module.invariant_factors;
    let mut c = Cochain::identity(gm, degree);
    for (i, v) in c.values.iter_mut().enumerate() {
        if Cochain::args(order, degree, i).contains(&e) {
            continue;
        }
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = seed[(i * factors.len() + k) % seed.len()].wrapping_mul(i as u64 + 1) % factors[k];
        }
    }
    c
}

fn matrix(p: u64, n: usize, seed: &[u64]) -> FpMatrix {
    let rows: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| seed[(i * n + j) % seed.len()] % p).collect()).collect();
    FpMatrix::from_rows(p, &rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn differential_squares_to_zero(which in 0usize..8, degree in 1usize..3, seed in prop::collection::vec(any::<u64>(), 1..16)) {
        let fixtures = gmodule_fixtures();
        let (_, gm) = &fixtures[which % fixtures.len()];
        let c = random_cochain(gm, degree, &seed);
        prop_assert!(differential(gm, &differential(gm, &c)).is_identity());
    }

    #[test]
    fn class_of_inverts_representative(which in 0usize..8, degree in 1usize..4, pick in any::<u64>(), seed in prop::collection::vec(any::<u64>(), 1..16)) {
        let fixtures = gmodule_fixtures();
        let (_, gm) = &fixtures[which % fixtures.len()];
        let h = CohomologyGroup::compute(gm, degree).unwrap();
        let coords = h.group.element_at(pick % h.order());
        let rep = h.representative(gm, &coords);
        prop_assert_eq!(h.class_of(gm, &rep).unwrap(), coords.clone());
        // moving by a normalized coboundary keeps the class
        let b = differential(gm, &random_cochain(gm, degree - 1, &seed));
        if b.is_normalized(gm) {
            prop_assert_eq!(h.class_of(gm, &rep.add(gm, &b)).unwrap(), coords);
        }
    }

    #[test]
    fn class_of_is_additive(which in 0usize..8, degree in 1usize..4, a in any::<u64>(), b in any::<u64>()) {
        let fixtures = gmodule_fixtures();
        let (_, gm) = &fixtures[which % fixtures.len()];
        let h = CohomologyGroup::compute(gm, degree).unwrap();
        let ca = h.group.element_at(a % h.order());
        let cb = h.group.element_at(b % h.order());
        let sum = h.representative(gm, &ca).add(gm, &h.representative(gm, &cb));
        prop_assert_eq!(h.class_of(gm, &sum).unwrap(), h.group.add(&ca, &cb));
        prop_assert_eq!(h.class_of(gm, &h.representative(gm, &ca).neg(gm)).unwrap(), h.group.neg(&ca));
    }

    #[test]
    fn obstruction_of_a_twist_is_its_differential(which in 0usize..4, seed in prop::collection::vec(any::<u64>(), 1..16)) {
        let fixtures = builtin_fixtures();
        let inst = load(&fixtures[which].1);
        let gm = instance_gmodule(&inst);
        let sigma = random_cochain(&gm, 2, &seed);
        let twisted = twist_by_two_cochain(&inst.fm, &inst.center, &sigma).unwrap();
        let beta = obstruction_three_cocycle(&twisted, &inst.center, &gm).unwrap();
        prop_assert_eq!(beta, differential(&gm, &sigma));
    }

    #[test]
    fn crossed_product_is_associative(which in 0usize..4, seed in prop::collection::vec(any::<u64>(), 3..64)) {
        let fixtures = builtin_fixtures();
        let inst = load(&fixtures[which].1);
        let cp = build_crossed_product(&inst.fm).unwrap();
        let r = &cp.ring;
        let p = r.p();
        let n = r.dim();
        let elem = |k: usize| (0..n).map(|i| seed[(k * n + i) % seed.len()].wrapping_add(i as u64 * 7) % p).collect::<Vec<_>>();
        let (a, b, c) = (elem(0), elem(1), elem(2));
        prop_assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
    }

    #[test]
    fn kron_mixed_product(p in prop::sample::select(vec![2u64, 3, 5, 7]), n in 1usize..4, m in 1usize..4, seed in prop::collection::vec(any::<u64>(), 1..32)) {
        let a = matrix(p, n, &seed);
        let b = matrix(p, m, &seed[seed.len() / 2..]);
        let c = matrix(p, n, &seed.iter().map(|s| s.rotate_left(7)).collect::<Vec<_>>());
        let d = matrix(p, m, &seed.iter().map(|s| s.rotate_left(13)).collect::<Vec<_>>());
        prop_assert_eq!(a.kron(&b).mul(&c.kron(&d)), a.mul(&c).kron(&b.mul(&d)));
    }

    #[test]
    fn inverse_is_two_sided(p in prop::sample::select(vec![2u64, 3, 5, 7]), n in 1usize..6, seed in prop::collection::vec(any::<u64>(), 1..40)) {
        let a = matrix(p, n, &seed);
        match a.inverse() {
            Some(inv) => {
                prop_assert!(inv.mul(&a).is_identity());
                prop_assert!(a.mul(&inv).is_identity());
                prop_assert_eq!(a.rank(), n);
            }
            None => prop_assert!(a.rank() < n && !a.kernel().is_empty()),
        }
    }

    #[test]
    fn galois_instances_round_trip(p in prop::sample::select(vec![2u64, 3, 5]), n in 2usize..5) {
        prop_assume!(p.pow(n as u32) <= 125);
        let file = lucp_core::instance::galois(p, n).unwrap();
        let again = lucp_core::instance::InstanceFile::from_json(&file.to_json()).unwrap();
        prop_assert_eq!(&again, &file);
        let inst = again.validate().unwrap();
        prop_assert_eq!(inst.group.order(), n);
        prop_assert!(inst.fm.is_associative());
    }
}
