use std::collections::BTreeSet;

use proptest::prelude::*;

use shuffle_core::backforth::{build_iso, qf_type, BuildOutcome};
use shuffle_core::counting::{count_models, ClassKind, ClassSize, ClassSummary, Classes, ModelCount, TheorySummary};
use shuffle_core::realize::{realize_spec, realize_spec_variant};
use shuffle_core::shuffle::{compose, ShuffleFamily};
use shuffle_core::workbench::{build_model, extract_invariant_tuple, list_canonical_models, TheoryTag};
use shuffle_core::{Block, Color, ColoredOrderSpec, OrderedStructure, Rational, Region};

fn block() -> impl Strategy<Value = Block> {
    prop_oneof![
        (0u64..4).prop_map(Block::point),
        (1u8..16, any::<(bool, bool)>(), 0usize..4, 0usize..4).prop_map(|(mask, (lo, hi), a, b)| {
            let colors: Vec<u64> = (0..4).filter(|c| mask & (1 << c) != 0).collect();
            let pick = |k: usize| colors[k % colors.len()];
            Block::dense(colors.clone(), lo.then(|| pick(a)), hi.then(|| pick(b)))
        }),
    ]
}

fn spec() -> impl Strategy<Value = ColoredOrderSpec> {
    prop::collection::vec(block(), 1..=4).prop_map(ColoredOrderSpec::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn realized_specs_show_their_normalized_blocks(s in spec()) {
        let m = realize_spec(&s).unwrap();
        let blocks = s.normalized().blocks;
        let xs = m.enumerate(1000);
        for (j, b) in blocks.iter().enumerate() {
            let j = j as u64;
            let inner: BTreeSet<Color> =
                xs.iter().filter(|x| m.region(x) == Some(Region(j, 0))).map(|x| m.color(x)).collect();
            let endpoint = |minor| m.landmarks().into_iter().find(|x| m.region(x) == Some(Region(j, minor))).map(|x| m.color(&x));
            match b {
                Block::Point(c) => prop_assert_eq!(inner, BTreeSet::from([*c])),
                Block::Dense(d) => {
                    prop_assert_eq!(&inner, &d.colors);
                    prop_assert_eq!(endpoint(1), d.min);
                    prop_assert_eq!(endpoint(2), d.max);
                }
            }
        }
    }

    #[test]
    fn enumeration_is_injective_and_sound(s in spec(), variant in 0u32..3) {
        let m = realize_spec_variant(&s, variant).unwrap();
        let xs = m.enumerate(1000);
        prop_assert_eq!(xs.iter().collect::<BTreeSet<_>>().len(), xs.len());
        for x in &xs {
            prop_assert!(m.contains(x));
        }
    }

    #[test]
    fn qf_type_is_preserved_by_constructed_maps(s in spec(), picks in prop::collection::vec(0usize..64, 1..6)) {
        let (m, n) = (realize_spec(&s).unwrap(), realize_spec_variant(&s, 1).unwrap());
        let BuildOutcome::Iso(f) = build_iso(&m, &n, 64).unwrap() else {
            return Err(TestCaseError::fail("realizations of one spec obstruct"));
        };
        let pairs = f.pairs();
        let chosen: Vec<_> = picks.iter().map(|&k| pairs[k % pairs.len()]).collect();
        let (xs, ys): (Vec<Rational>, Vec<Rational>) = chosen.into_iter().unzip();
        prop_assert_eq!(qf_type(&m, &xs), qf_type(&n, &ys));
    }

    #[test]
    fn any_flag_forces_continuum(flags in any::<[bool; 4]>(), ns in prop::collection::vec(1u64..6, 0..5)) {
        let classes = ns.iter().map(|&n| ClassSummary { n: ClassSize::Finite(n), kind: ClassKind::NonDefinable }).collect();
        let t = TheorySummary { c1: flags[0], c2: flags[1], c3: flags[2], c4: flags[3], classes: Classes::List(classes) };
        let continuum = count_models(&t) == ModelCount::Continuum;
        prop_assert_eq!(continuum, flags.iter().any(|f| *f));
    }
}

#[test]
fn constructed_maps_preserve_each_color_class() {
    let s = ColoredOrderSpec::new(vec![Block::dense([0, 1, 2], Some(1), None), Block::point(2)]);
    let (m, n) = (realize_spec(&s).unwrap(), realize_spec_variant(&s, 2).unwrap());
    let BuildOutcome::Iso(f) = build_iso(&m, &n, 64).unwrap() else {
        panic!("obstructed")
    };
    for c in 0..3 {
        let mut class: Vec<_> = f.pairs().iter().filter(|(x, _)| m.color(x) == Color(c)).collect();
        class.sort();
        for w in class.windows(2) {
            assert!(w[0].1 < w[1].1);
            assert_eq!(n.color(&w[0].1), Color(c));
        }
    }
}

#[test]
fn composition_agrees_with_the_direct_relation() {
    let f = ShuffleFamily::dense_partition(3).unwrap();
    let (s01, s12, s02) = (
        f.relation(0, 1).unwrap(),
        f.relation(1, 2).unwrap(),
        f.relation(0, 2).unwrap(),
    );
    let c = compose(s01, s12, 200).unwrap();
    let xs = f.order(0).unwrap().enumerate(50);
    let zs = f.order(2).unwrap().enumerate(50);
    for a in &xs {
        for b in &zs {
            assert_eq!(c.member(a, b).unwrap(), s02.member(a, b).unwrap(), "{a} {b}");
        }
    }
}

#[test]
fn every_legal_tuple_round_trips_up_to_truncation_8() {
    for tag in TheoryTag::ALL {
        for b in 1..=8 {
            for n in list_canonical_models(tag, b) {
                let m = build_model(tag, &n.tuple).unwrap();
                assert_eq!(extract_invariant_tuple(&m, 200).unwrap(), n.tuple, "{tag} at {b}");
            }
        }
    }
}

#[test]
fn workbench_families_have_at_most_one_endpoint_each_way() {
    for tag in [TheoryTag::TShuf, TheoryTag::T91] {
        for n in list_canonical_models(tag, 4) {
            let m = build_model(tag, &n.tuple).unwrap();
            let families = std::iter::once(m.family()).chain((0..3).map(|k| m.rung_family(k)));
            for f in families.flatten() {
                let (mins, maxs) = f.endpoint_census();
                assert!(mins <= 1 && maxs <= 1, "{tag} {:?}", n.tuple);
            }
        }
    }
}
