use super::*;
use crate::ordertype::{ETA_ONE, ONE, ONE_ETA_ONE};
use CanonicalOrderType::Empty;

fn t0(p: CanonicalOrderType) -> InvariantTuple {
    InvariantTuple::new(1, [("p", p)])
}

fn t91(b: u32, q: CanonicalOrderType, p: &[CanonicalOrderType]) -> InvariantTuple {
    let entries =
        std::iter::once(("q".to_string(), q)).chain(p.iter().enumerate().map(|(i, &x)| (format!("p_{i}"), x)));
    InvariantTuple::new(b, entries)
}

#[test]
fn t0_builds_and_extracts() {
    for p in [Empty, ETA, ONE_ETA] {
        let m = build_model(TheoryTag::T0, &t0(p)).unwrap();
        assert_eq!(extract_invariant_tuple(&m, 300).unwrap(), t0(p));
    }
}

#[test]
fn t0_rejects_a_maximum() {
    for p in [ETA_ONE, ONE_ETA_ONE, ONE] {
        assert!(matches!(
            build_model(TheoryTag::T0, &t0(p)),
            Err(WorkbenchError::Illegal(_))
        ));
    }
}

#[test]
fn t0_models_are_pairwise_distinct() {
    let list = list_canonical_models(TheoryTag::T0, 1);
    let names: Vec<_> = list.iter().map(|n| n.name.clone().unwrap()).collect();
    assert_eq!(names, ["M_∅", "M_∞", "M_•"]);
    let models: Vec<_> = list
        .iter()
        .map(|n| build_model(TheoryTag::T0, &n.tuple).unwrap())
        .collect();
    for (i, a) in models.iter().enumerate() {
        for (j, b) in models.iter().enumerate() {
            let v = decide_iso_models(a, b, None).unwrap();
            assert_eq!(v.iso, i == j, "{i} vs {j}");
        }
    }
}

#[test]
fn t1_min_color_is_extracted_and_distinguishes() {
    let m3 = build_model(
        TheoryTag::T1,
        &InvariantTuple::new(10, [("p", ONE_ETA)]).with_min_color("p", 3),
    )
    .unwrap();
    let m5 = build_model(
        TheoryTag::T1,
        &InvariantTuple::new(10, [("p", ONE_ETA)]).with_min_color("p", 5),
    )
    .unwrap();
    let t = extract_invariant_tuple(&m3, 300).unwrap();
    assert_eq!(t.min_colors["p"], 3);
    let v = decide_iso_models(&m3, &m5, None).unwrap();
    assert!(!v.iso);
    assert_eq!(v.reason.unwrap(), "minimum color of p: D_3 vs D_5");
}

#[test]
fn t1_min_color_rules() {
    let bare = InvariantTuple::new(10, [("p", ONE_ETA)]);
    assert!(matches!(
        build_model(TheoryTag::T1, &bare),
        Err(WorkbenchError::MissingMinColor { .. })
    ));
    let high = bare.clone().with_min_color("p", 10);
    assert!(matches!(
        build_model(TheoryTag::T1, &high),
        Err(WorkbenchError::MinColorOutOfRange { .. })
    ));
    let stray = InvariantTuple::new(10, [("p", ETA)]).with_min_color("p", 1);
    assert!(matches!(
        build_model(TheoryTag::T1, &stray),
        Err(WorkbenchError::StrayMinColor { .. })
    ));
}

#[test]
fn t1_lists_b_plus_two() {
    let list = list_canonical_models(TheoryTag::T1, 10);
    assert_eq!(list.len(), 12);
    assert_eq!(list[2].name.as_deref(), Some("M_0"));
    assert_eq!(list[11].name.as_deref(), Some("M_9"));
}

#[test]
fn index_errors() {
    let t = InvariantTuple::new(1, [("p", ETA), ("r", ETA)]);
    assert!(matches!(
        build_model(TheoryTag::T0, &t),
        Err(WorkbenchError::UnknownIndex { .. })
    ));
    let t = InvariantTuple::new(2, [("q", ETA), ("p_0", ETA)]);
    assert_eq!(
        build_model(TheoryTag::T91, &t).unwrap_err(),
        WorkbenchError::MissingIndex("p_1".into())
    );
}

#[test]
fn t91_singleton_forces_omission() {
    let t = t91(3, Empty, &[ONE, ETA, Empty]);
    let e = build_model(TheoryTag::T91, &t).unwrap_err();
    assert!(matches!(e, WorkbenchError::Illegal(_)), "{e}");
}

#[test]
fn t91_rejects_q_with_a_maximum() {
    let t = t91(2, ETA_ONE, &[ETA, ETA]);
    assert!(matches!(
        build_model(TheoryTag::T91, &t),
        Err(WorkbenchError::NotRealized { .. })
    ));
}

#[test]
fn t91_saturated_build_is_all_eta() {
    let t = t91(8, ETA, &[ETA; 8]);
    let m = build_model(TheoryTag::T91, &t).unwrap();
    assert_eq!(extract_invariant_tuple(&m, 300).unwrap(), t);
}

#[test]
fn t91_axioms_hold_at_depth_30() {
    let t = t91(8, Empty, &[ETA; 8]);
    let m = build_model(TheoryTag::T91, &t).unwrap();
    for v in m.check_axioms(30) {
        assert!(v.passed(), "{v:?}");
    }
}

#[test]
fn t91_equal_tuples_match_to_depth_64() {
    let mut p = [ETA; 4];
    p[2] = ONE_ETA;
    let t = t91(4, ONE_ETA, &p);
    let m = build_model(TheoryTag::T91, &t).unwrap();
    let n = build_model_variant(TheoryTag::T91, &t, 1).unwrap();
    let v = decide_iso_models(&m, &n, Some(64)).unwrap();
    assert!(v.iso);
    assert_eq!(v.witness.unwrap().len(), 64);
}

#[test]
fn tdense_round_trip_and_listing() {
    let list = list_canonical_models(TheoryTag::TDense, 3);
    assert_eq!(list.len(), 1 + 3 + 4);
    for n in &list {
        let m = build_model(TheoryTag::TDense, &n.tuple).unwrap();
        assert_eq!(extract_invariant_tuple(&m, 300).unwrap(), n.tuple);
    }
}

#[test]
fn model_file_round_trips() {
    let json = r#"{"theory":"T1","truncation":4,"tuple":{"p":"1+eta"},"min-colors":{"p":2}}"#;
    let f: ModelFile = serde_json::from_str(json).unwrap();
    assert_eq!(f.theory, TheoryTag::T1);
    assert_eq!(f.invariant_tuple().min_colors["p"], 2);
    assert_eq!(serde_json::to_string(&f).unwrap(), json);
}

#[test]
fn tshuf_builds_three_models_that_satisfy_the_axioms() {
    let list = list_canonical_models(TheoryTag::TShuf, 3);
    assert_eq!(list.len(), 3);
    for n in &list {
        let m = build_model(TheoryTag::TShuf, &n.tuple).unwrap();
        assert_eq!(m.block_count(), 3);
        assert_eq!(extract_invariant_tuple(&m, 200).unwrap(), n.tuple);
        for v in m.check_axioms(20) {
            assert!(v.passed(), "{v:?}");
        }
    }
}

#[test]
fn every_canonical_tuple_round_trips_at_small_truncation() {
    for tag in TheoryTag::ALL {
        for b in 1..=3 {
            for n in list_canonical_models(tag, b) {
                let m = build_model(tag, &n.tuple).unwrap();
                assert_eq!(
                    extract_invariant_tuple(&m, 200).unwrap(),
                    n.tuple,
                    "{tag} {:?}",
                    n.tuple
                );
            }
        }
    }
}

#[test]
fn canonical_lists_are_pairwise_not_iso() {
    for tag in TheoryTag::ALL {
        let models: Vec<_> = list_canonical_models(tag, 3)
            .iter()
            .map(|n| build_model(tag, &n.tuple).unwrap())
            .collect();
        for (i, a) in models.iter().enumerate() {
            for b in &models[i + 1..] {
                assert!(!decide_iso_models(a, b, None).unwrap().iso, "{tag}");
            }
        }
    }
}

#[test]
fn mismatched_models_are_an_error() {
    let a = build_model(TheoryTag::T0, &t0(ETA)).unwrap();
    let b = build_model(TheoryTag::TShuf, &InvariantTuple::new(1, [("p", ETA)])).unwrap();
    assert!(matches!(
        decide_iso_models(&a, &b, None),
        Err(WorkbenchError::Mismatch(..))
    ));
}

#[test]
fn iso_evidence_on_every_small_theory() {
    for tag in TheoryTag::ALL {
        for n in list_canonical_models(tag, 2) {
            let a = build_model(tag, &n.tuple).unwrap();
            let b = build_model_variant(tag, &n.tuple, 1).unwrap();
            let v = decide_iso_models(&a, &b, Some(64)).unwrap();
            assert!(v.iso && v.witness.unwrap().len() == 64, "{tag} {:?}", n.tuple);
        }
    }
}

#[test]
fn distinct_t0_and_t1_models_obstruct_back_and_forth() {
    for tag in [TheoryTag::T0, TheoryTag::T1] {
        let models: Vec<_> = list_canonical_models(tag, 3)
            .iter()
            .map(|n| build_model(tag, &n.tuple).unwrap())
            .collect();
        for (i, a) in models.iter().enumerate() {
            for b in &models[i + 1..] {
                let out = build_iso(a, b, 64).unwrap();
                assert!(matches!(out, BuildOutcome::Obstruction(_)), "{tag} {i}");
            }
        }
    }
}
