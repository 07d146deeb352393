use num_bigint::BigUint;
use num_traits::Zero;
use proptest::prelude::*;

use ufa_core::automata::{build_swdfa, build_ufa, AutomatonError};
use ufa_core::primes::select_desk;
use ufa_core::residue::{ModuliSystem, PrimeSubset, ResidueVector};
use ufa_core::tournament::{find_orientation, Tournament};
use ufa_core::verification::{
    check_cycle_argument, check_independent_edge_extraction, check_lemma8, check_lemma9,
    Lemma8Options, Lemma9Options, VerificationError,
};

fn triangle() -> ModuliSystem {
    ModuliSystem::new(2, select_desk(8, 3), Tournament::cyclic_triangle()).unwrap()
}

fn seven() -> ModuliSystem {
    let found = find_orientation(2, Some(7), 10_000, 0).unwrap();
    ModuliSystem::new(2, select_desk(128, 7), found.tournament).unwrap()
}

/// `m` with, for every vertex, the shared primes of its smallest out-edge.
fn one_controlled_edge_per_vertex(ms: &ModuliSystem) -> PrimeSubset {
    let mut m = PrimeSubset::empty(ms.prime_count());
    for v in 1..=ms.n() {
        let u = ms.tournament().out_neighbors(v)[0];
        for &j in ms.shared_primes(v, u).unwrap() {
            m.insert(j);
        }
    }
    m
}

#[test]
fn seven_vertex_pair_check_is_symbolic() {
    let ms = seven();
    let v = check_lemma8(&ms, &Lemma8Options::default());
    assert!(v.pass, "{}", v.to_json());
    let pairs = v.census["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 21);
    for p in pairs {
        assert_eq!(p["union_size"], 96);
        assert!(p["exhaustive"].is_null());
        assert_eq!(p["symbolic"], "exclusive");
    }
}

#[test]
fn seven_vertex_blocking_census_by_sampling() {
    let ms = seven();
    let v = check_lemma9(&ms, 2, &Lemma9Options::default()).unwrap();
    assert!(v.pass, "{}", v.witness);
    assert_eq!(v.census["route"], "sampled");
    assert_eq!(v.census["bound"], 32);
    assert_eq!(v.census["full_product_blocking"], true);
}

#[test]
fn seven_vertex_extraction_returns_one_controlled_edge() {
    let ms = seven();
    let m = one_controlled_edge_per_vertex(&ms);
    assert!(ms.is_blocking(&m));
    let v = check_independent_edge_extraction(&ms, &m, 2).unwrap();
    let edges: Vec<(usize, usize)> = serde_json::from_value(v.witness["edges"].clone()).unwrap();
    assert_eq!(edges.len(), 1);
    let full = check_independent_edge_extraction(&ms, &PrimeSubset::full(128), 2).unwrap();
    assert_eq!(full.census["wanted"], 1);
    // two disjoint edges need k = 3, and every 7-vertex tournament has an
    // inbound-covering triple
    assert!(matches!(
        check_independent_edge_extraction(&ms, &m, 3),
        Err(VerificationError::NotCertified { k: 3, .. })
    ));
}

#[test]
fn seven_vertex_automata_exceed_any_cap() {
    let ms = seven();
    match build_ufa(&ms, 1 << 20) {
        Err(AutomatonError::CapExceeded { required, .. }) => {
            let sum: BigUint = (1..=7).map(|i| ms.modulus_value(i).unwrap()).sum();
            assert_eq!(required, sum + 1u32);
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        build_swdfa(&ms, true, 1 << 20),
        Err(AutomatonError::CapExceeded { .. })
    ));
}

#[test]
fn seven_vertex_open_candidate_has_a_certificate() {
    let ms = seven();
    let v = check_cycle_argument(&ms, &BigUint::from(ms.prime(0)), 2, None).unwrap();
    assert!(v.pass);
    assert_eq!(v.witness["classification"], "non_blocking");
    let t: BigUint = v.witness["multiple"].as_str().unwrap().parse().unwrap();
    assert!((&t % ms.prime(0)).is_zero());
    assert!(ms.contains_length(&t).unwrap());
}

/// Oracle for blocking: multiples of `m` are exactly the lengths with zero
/// residues on `m`, so enumerate every class of the free residues (values
/// `0..=4` represent all behaviours for three vertices).
fn blocking_by_enumeration(ms: &ModuliSystem, m: &PrimeSubset) -> bool {
    let free: Vec<usize> = (0..ms.prime_count()).filter(|&j| !m.contains(j)).collect();
    let total = 5usize.pow(free.len() as u32);
    (0..total).all(|mut code| {
        let mut rv = ResidueVector::constant(ms.prime_count(), 0);
        for &j in &free {
            rv.0[j] = (code % 5) as u64;
            code /= 5;
        }
        ms.accepted_by(&rv).unwrap().is_none()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn blocking_matches_enumeration(mask in 0u64..256) {
        let ms = triangle();
        let m = PrimeSubset::from_mask(8, mask);
        prop_assert_eq!(ms.is_blocking(&m), blocking_by_enumeration(&ms, &m));
    }

    #[test]
    fn membership_is_the_residue_predicate(len in 1u64..u64::MAX) {
        let ms = triangle();
        let rv = ms.residues_of_u64(len);
        let direct = (1..=3).any(|i| ms.acceptable(&rv, i).unwrap());
        prop_assert_eq!(ms.contains_length(&BigUint::from(len)).unwrap(), direct);
    }

    #[test]
    fn certificates_are_accepted_multiples(mask in 0u64..256) {
        let ms = triangle();
        let m = PrimeSubset::from_mask(8, mask);
        let value = ms.subset_value(&m);
        let v = check_cycle_argument(&ms, &value, 1, None).unwrap();
        prop_assert!(v.pass);
        if v.witness["classification"] == "non_blocking" {
            let t: BigUint = v.witness["multiple"].as_str().unwrap().parse().unwrap();
            prop_assert!((&t % &value).is_zero());
            prop_assert!(ms.contains_length(&t).unwrap());
        } else {
            prop_assert!(m.count() >= ms.lemma9_bound(1));
        }
    }
}
