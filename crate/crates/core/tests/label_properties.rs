use dnl_core::label::{parse_label, serialize_label, validate_label, Alert, Label, Scope, Severity};
use dnl_core::{list_use_cases, resolve};
use dnl_testkit::{brute_force_resolve, perturb_one_invariant, random_label, LabelShape};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn label_from(seed: u64) -> Label {
    random_label(&mut ChaCha8Rng::seed_from_u64(seed), LabelShape::default())
}

fn pairs(label: &Label) -> Vec<(String, String)> {
    label
        .use_cases
        .iter()
        .flat_map(|u| u.predictions.iter().map(move |p| (u.id.clone(), p.id.clone())))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn generated_labels_validate(seed in any::<u64>()) {
        let label = label_from(seed);
        let report = validate_label(&label);
        prop_assert!(report.passed(), "{:?}", report.violations);
    }

    #[test]
    fn serialize_parse_round_trip(seed in any::<u64>()) {
        let label = label_from(seed);
        let bytes = serialize_label(&label).unwrap();
        prop_assert_eq!(&parse_label(&bytes).unwrap(), &label);
        prop_assert_eq!(serialize_label(&label).unwrap(), bytes);
    }

    #[test]
    fn formatting_does_not_change_canonical_bytes(seed in any::<u64>()) {
        let label = label_from(seed);
        let bytes = serialize_label(&label).unwrap();
        let value: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        let pretty = serde_json::to_vec_pretty(&value).unwrap();
        let reparsed = parse_label(&pretty).unwrap();
        prop_assert_eq!(serialize_label(&reparsed).unwrap(), bytes);
    }

    #[test]
    fn one_broken_invariant_is_reported(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut label = random_label(&mut rng, LabelShape::default());
        if let Some(code) = perturb_one_invariant(&mut rng, &mut label) {
            let report = validate_label(&label);
            prop_assert!(!report.passed());
            prop_assert!(report.has(code), "expected {code}, got {:?}", report.codes());
            prop_assert!(serialize_label(&label).is_err());
        }
    }

    #[test]
    fn unknown_category_is_rejected(name in "[A-Za-z ]{0,12}") {
        prop_assume!(dnl_core::Category::from_name(&name).is_none());
        let doc = serde_json::json!({
            "label_id": "l", "schema_version": "1.0", "dataset_name": "d", "publisher": "",
            "date_produced": "2020-01-01", "overview_modules": [], "use_cases": [],
            "alerts": [], "fyis": [],
            "questionnaire": [{"question_id": "q", "category": name, "question_text": "?", "answer": ""}],
        });
        let err = parse_label(doc.to_string().as_bytes()).unwrap_err();
        prop_assert_eq!(err.code(), "BAD_ENUM_VALUE");
        prop_assert_eq!(err.path(), Some("/questionnaire/0/category"));
    }

    #[test]
    fn resolve_matches_brute_force(seed in any::<u64>()) {
        let label = label_from(seed);
        for (u, p) in pairs(&label) {
            let view = resolve(&label, &u, &p).unwrap();
            let oracle = brute_force_resolve(&label, &u, &p);
            prop_assert_eq!(view.alert_ids(), oracle.alert_ids.iter().map(String::as_str).collect::<Vec<_>>());
            prop_assert_eq!(view.fyi_ids(), oracle.fyi_ids.iter().map(String::as_str).collect::<Vec<_>>());
            prop_assert_eq!(
                (view.severity_summary.red, view.severity_summary.orange, view.severity_summary.yellow),
                (oracle.red, oracle.orange, oracle.yellow)
            );
        }
    }

    #[test]
    fn alerts_sorted_red_first(seed in any::<u64>()) {
        let label = label_from(seed);
        for (u, p) in pairs(&label) {
            let view = resolve(&label, &u, &p).unwrap();
            prop_assert!(view.alerts.windows(2).all(|w| w[0].severity >= w[1].severity));
            prop_assert_eq!(view.severity_summary.total() as usize, view.alerts.len());
        }
    }

    #[test]
    fn widening_scope_never_hides_items(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let label = label_from(seed);
        prop_assume!(!label.alerts.is_empty());
        let i = pick.index(label.alerts.len());
        let mut widened = label.clone();
        widened.alerts[i].scope.push(Scope::Global);
        for (u, p) in pairs(&label) {
            let before = resolve(&label, &u, &p).unwrap();
            let after = resolve(&widened, &u, &p).unwrap();
            for id in before.alert_ids() {
                prop_assert!(after.alert_ids().contains(&id));
            }
            prop_assert!(after.alert_ids().contains(&label.alerts[i].id.as_str()));
            prop_assert_eq!(before.fyi_ids(), after.fyi_ids());
        }
    }

    #[test]
    fn global_alert_reaches_every_pair(seed in any::<u64>()) {
        let mut label = label_from(seed);
        label.alerts.push(Alert {
            id: "everywhere".into(),
            title: "Global".into(),
            description: String::new(),
            severity: Severity::NoKnownMitigation,
            mitigation: None,
            scope: vec![Scope::Global],
            derived_from_question: None,
        });
        for (u, p) in pairs(&label) {
            let view = resolve(&label, &u, &p).unwrap();
            prop_assert!(view.alert_ids().contains(&"everywhere"));
        }
    }

    #[test]
    fn listing_mirrors_declared_use_cases(seed in any::<u64>()) {
        let label = label_from(seed);
        let listing = list_use_cases(&label);
        prop_assert_eq!(listing.len(), label.use_cases.len());
        for (l, u) in listing.iter().zip(&label.use_cases) {
            prop_assert_eq!(&l.use_case_id, &u.id);
            prop_assert_eq!(l.predictions.len(), u.predictions.len());
        }
    }
}

#[test]
fn resolving_ids_outside_the_label_fails() {
    let label = label_from(7);
    assert_eq!(
        resolve(&label, "nope", "p1").unwrap_err().code(),
        "UNKNOWN_USE_CASE"
    );
}
