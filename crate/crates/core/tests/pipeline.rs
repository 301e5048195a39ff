use propcalc::cli::{setup, standard_complex, SuiteConfig, SHIPPED};
use propcalc::cobar::{cobar, cylinder, two_colored_resolution};
use propcalc::convolution::{build_k, is_mc, k_element, HAlgebra, LInfinity};
use propcalc::coproperad::Coproperad;
use propcalc::inftymor::{classify, compose_gebra, infty_residual, Class};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shipped(name: &str) -> Coproperad {
    Coproperad::parse(SHIPPED.iter().find(|(n, _)| *n == name).unwrap().1).unwrap()
}

#[test]
fn fixtures_round_trip_through_text() {
    for (name, text) in SHIPPED {
        let c = Coproperad::parse(text).unwrap();
        assert!(c.audit().ok(), "{name}");
        assert_eq!(Coproperad::parse(&c.to_text()).unwrap().to_text(), c.to_text(), "{name}");
    }
}

#[test]
fn cobar_constructions_square_to_zero() {
    for name in ["binary_w2", "pair_w2"] {
        let c = shipped(name);
        for p in [cobar(&c), two_colored_resolution(&c), cylinder(&c)] {
            assert!(p.check_d_squared().ok(), "{name} {}", p.name);
        }
    }
}

#[test]
fn seeded_morphisms_are_maurer_cartan_and_compose() {
    let c = shipped("pair_w2");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = setup(&c, &SuiteConfig::default(), &mut rng);
    let (a, b, g) = (&s.structures[0], &s.structures[1], &s.structures[2]);
    assert!(infty_residual(&c, &s.f, a, b, &s.spaces).unwrap().is_zero());
    assert!(infty_residual(&c, &s.g, b, g, &s.spaces).unwrap().is_zero());
    let gf = compose_gebra(&c, &s.g, &s.f, &s.spaces).unwrap();
    assert!(infty_residual(&c, &gf, a, g, &s.spaces).unwrap().is_zero());
    assert!(classify(&s.f, &s.spaces).contains(&Class::Isotopy));

    let k = build_k(&c, &s.spaces[0], &s.spaces[1]);
    assert!(is_mc(&k, &k_element(&k, Some(a), Some(&s.f), Some(b))).unwrap());
    let h = HAlgebra::new(&c, s.spaces.clone(), 0, 1, a.clone(), b.clone()).unwrap();
    assert!(is_mc(&h, &h.to_vector(&s.f)).unwrap());
    assert!(h.dim() > 0);
}

#[test]
fn standard_complex_is_acyclic_in_even_dimension() {
    assert!(standard_complex(4).homology_ranks().values().all(|&r| r == 0));
}
