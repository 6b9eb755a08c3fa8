use proptest::prelude::*;
use rand::SeedableRng;

use gencol::index::{
    extract_decreasing, tends_to_emptyset, FullIndex, IndexKind, IndexPoint, IndexRng, IndexSet,
    NsaIndex, NullSequence, SpecialIndex, TrivialIndex,
};

fn instances() -> Vec<Box<dyn IndexSet>> {
    vec![
        Box::new(SpecialIndex),
        Box::new(FullIndex::new()),
        Box::new(NsaIndex::new()),
        Box::new(TrivialIndex::default()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn preorder_on_samples(seed in any::<u64>()) {
        let mut rng = IndexRng::seed_from_u64(seed);
        for s in instances() {
            let i = s.sample_point(&mut rng);
            prop_assert!(s.leq(&i, &i).unwrap());
            // comparable chains come from shrinking along a ray
            let j = i.shrink(0.7);
            let k = j.shrink(0.4);
            prop_assert!(s.leq(&k, &j).unwrap() && s.leq(&j, &i).unwrap());
            prop_assert!(s.leq(&k, &i).unwrap());
            let other = s.sample_point(&mut rng);
            if s.leq(&i, &other).unwrap() && s.leq(&other, &k).unwrap() {
                prop_assert!(s.leq(&i, &k).unwrap());
            }
        }
    }

    #[test]
    fn refinement_lies_in_both_classes(seed in any::<u64>()) {
        let mut rng = IndexRng::seed_from_u64(seed);
        for s in instances() {
            let (a, b) = (s.sample_class(&mut rng), s.sample_class(&mut rng));
            let c = s.refine(&a, &b).unwrap();
            prop_assert!(s.class_subset(&c, &a) && s.class_subset(&c, &b));
            for _ in 0..4 {
                if let Some(p) = s.sample_member(&c, &mut rng) {
                    prop_assert!(s.contains(&a, &p) && s.contains(&b, &p), "{p} in {c}");
                }
            }
        }
    }

    #[test]
    fn witnesses_lie_strictly_below(seed in any::<u64>()) {
        let mut rng = IndexRng::seed_from_u64(seed);
        for s in instances() {
            let class = s.sample_class(&mut rng);
            let Some(e) = s.sample_member(&class, &mut rng) else { continue };
            let b = s.sample_member_below(&class, &e, &mut rng).unwrap();
            let c = s.sample_member_below(&class, &e, &mut rng).unwrap();
            let d = s.down_witness(&b, &c, &class, &e).unwrap();
            prop_assert!(s.contains(&class, &d) && s.leq(&d, &e).unwrap());
            prop_assert!(s.lt(&d, &b).unwrap() && s.lt(&d, &c).unwrap());
            if s.kind() != IndexKind::NsaBase {
                prop_assert!(s.underline(&d) < s.underline(&b).min(s.underline(&c)));
            }
        }
    }

    #[test]
    fn full_order_is_antisymmetric(seed in any::<u64>(), r in 0.01f64..1.0, t in 0.01f64..1.0) {
        let f = FullIndex::new();
        let mut rng = IndexRng::seed_from_u64(seed);
        let e = f.sample_point(&mut rng);
        let (i, j) = (e.shrink(r), e.shrink(t));
        if f.leq(&i, &j).unwrap() && f.leq(&j, &i).unwrap() {
            prop_assert!(f.same(&i, &j).unwrap());
            prop_assert_eq!(r, t);
        }
        let other = f.sample_point(&mut rng);
        if f.leq(&i, &other).unwrap() && f.leq(&other, &i).unwrap() {
            prop_assert!(f.same(&i, &other).unwrap());
        }
    }

    #[test]
    fn full_ray_is_order_isomorphic(seed in any::<u64>(), r in 1e-6f64..=1.0, s in 1e-6f64..=1.0) {
        let f = FullIndex::new();
        let e = f.sample_point(&mut IndexRng::seed_from_u64(seed));
        prop_assert_eq!(f.leq(&e.shrink(r), &e.shrink(s)).unwrap(), r <= s);
    }

    #[test]
    fn every_nsa_tail_contains_a_base_class(d in 1e-4f64..2.0) {
        let s = NsaIndex::new();
        let eps0 = NsaIndex::point(gencol::testfn::TestFunction::bump(0.1, d / 2.0).unwrap());
        let class = s.tail_class(&eps0).unwrap();
        let mut rng = IndexRng::seed_from_u64(d.to_bits());
        for _ in 0..8 {
            let p = s.sample_member(&class, &mut rng).unwrap();
            prop_assert!(s.underline(&p) <= s.underline(&eps0));
        }
    }

    #[test]
    fn extracted_subsequences_decrease(xs in prop::collection::vec(0.0f64..1.0, 8..30)) {
        let s = SpecialIndex;
        // an interleaving of a null sequence with noise that still tends to 0
        let points: Vec<IndexPoint> = xs
            .iter()
            .enumerate()
            .map(|(k, x)| IndexPoint::Special((0.5 + 0.5 * x) * (-(k as f64)).exp2()))
            .collect();
        let seq = NullSequence { points, class: s.whole(), anchor: IndexPoint::Special(1.0) };
        let out = extract_decreasing(&seq, &s).unwrap();
        prop_assert_eq!(&out.points[0].to_string(), &seq.points[0].to_string());
        for w in out.points.windows(2) {
            prop_assert!(s.lt(&w[1], &w[0]).unwrap());
        }
    }
}

#[test]
fn dyadic_probes_tend_to_the_empty_set() {
    for s in instances() {
        let class = s.whole();
        let anchor = gencol::index::default_anchor(s.as_ref());
        let probe = s.probe(&class, &anchor, 40).unwrap();
        assert!(tends_to_emptyset(&probe.points, &class, &anchor, s.as_ref()).unwrap());
        let flat = vec![anchor.clone(); 40];
        assert!(!tends_to_emptyset(&flat, &class, &anchor, s.as_ref()).unwrap());
    }
}
