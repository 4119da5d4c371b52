use chrono::{TimeZone, Utc};
use dnl_core::label::SCHEMA_VERSION;
use dnl_core::profiler::fingerprint_encoding;
use dnl_core::{
    check_staleness, compute_fingerprint, profile_csv_at, ColumnBound, DatasetProfile, Label,
    StalenessVerdict,
};
use dnl_testkit::{oracle_profile, random_table};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

fn at() -> chrono::DateTime<Utc> {
    Utc.with_ymd_and_hms(2021, 3, 4, 5, 6, 7).unwrap()
}

fn bound_as_f64(b: &ColumnBound) -> Option<f64> {
    match *b {
        ColumnBound::Integer(v) => Some(v as f64),
        ColumnBound::Float(v) => Some(v),
        ColumnBound::Date(_) => None,
    }
}

fn label_with_columns(cols: &[String]) -> Label {
    Label {
        label_id: "l".into(),
        schema_version: SCHEMA_VERSION.into(),
        dataset_name: "d".into(),
        publisher: String::new(),
        source_url: None,
        license: None,
        date_produced: chrono::NaiveDate::from_ymd_opt(2020, 11, 1).unwrap(),
        fingerprint: Some(compute_fingerprint(cols).unwrap()),
        overview_modules: vec![],
        use_cases: vec![],
        alerts: vec![],
        fyis: vec![],
        questionnaire: vec![],
    }
}

fn profile_of_header(cols: &[String]) -> DatasetProfile {
    let text = format!("{}\n", cols.join(","));
    profile_csv_at(text.as_bytes(), at()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn streaming_profile_matches_oracle(seed in any::<u64>()) {
        let table = random_table(&mut ChaCha8Rng::seed_from_u64(seed), 50, 8);
        let profile = profile_csv_at(table.text.as_bytes(), at()).unwrap();
        let oracle = oracle_profile(&table.text);
        prop_assert_eq!(profile.row_count, oracle.row_count);
        prop_assert_eq!(profile.columns.len(), oracle.columns.len());
        for (c, o) in profile.columns.iter().zip(&oracle.columns) {
            prop_assert_eq!(&c.name, &o.name);
            prop_assert_eq!(c.inferred_type.as_str(), o.inferred_type);
            prop_assert_eq!(c.missing_count, o.missing_count);
            prop_assert_eq!(c.distinct_count, o.distinct_count);
            let expected_fraction = if o.missing_count == 0 { 0.0 } else { o.missing_count as f64 / oracle.row_count as f64 };
            prop_assert!((c.missing_fraction - expected_fraction).abs() <= 1e-12);
            if let Some((lo, hi)) = o.numeric_range {
                prop_assert_eq!(c.min.as_ref().and_then(bound_as_f64), Some(lo));
                prop_assert_eq!(c.max.as_ref().and_then(bound_as_f64), Some(hi));
            }
            if let Some((lo, hi)) = &o.date_range {
                prop_assert_eq!(c.min.map(|b| match b { ColumnBound::Date(d) => d.to_string(), _ => String::new() }), Some(lo.clone()));
                prop_assert_eq!(c.max.map(|b| match b { ColumnBound::Date(d) => d.to_string(), _ => String::new() }), Some(hi.clone()));
            }
            if o.numeric_range.is_none() && o.date_range.is_none() {
                prop_assert!(c.min.is_none() && c.max.is_none());
            }
        }
    }

    #[test]
    fn profiling_is_idempotent(seed in any::<u64>()) {
        let table = random_table(&mut ChaCha8Rng::seed_from_u64(seed), 20, 5);
        let a = profile_csv_at(table.text.as_bytes(), at()).unwrap();
        let b = profile_csv_at(table.text.as_bytes(), at()).unwrap();
        prop_assert_eq!(a.to_canonical_json(), b.to_canonical_json());
        prop_assert_eq!(DatasetProfile::from_json(&a.to_canonical_json()).unwrap(), a);
    }

    #[test]
    fn fingerprint_is_sha256_of_length_prefixed_names(cols in prop::collection::vec("[a-z,\"é\n]{0,6}", 1..6)) {
        let fp = compute_fingerprint(&cols).unwrap();
        let mut encoding = String::new();
        for c in &cols {
            encoding.push_str(&format!("{}:{}\n", c.len(), c));
        }
        prop_assert_eq!(fingerprint_encoding(&cols), encoding.as_bytes().to_vec());
        prop_assert_eq!(fp.digest, hex::encode(Sha256::digest(encoding.as_bytes())));
    }

    #[test]
    fn digests_agree_exactly_when_lists_do(
        a in prop::collection::vec("[ab:\n]{0,3}", 1..4),
        b in prop::collection::vec("[ab:\n]{0,3}", 1..4),
    ) {
        let same_digest = compute_fingerprint(&a).unwrap().digest == compute_fingerprint(&b).unwrap().digest;
        prop_assert_eq!(same_digest, a == b);
    }

    #[test]
    fn staleness_verdict_tracks_structure(
        recorded in prop::collection::vec("[a-e]{1,2}", 1..5),
        current in prop::collection::vec("[a-e]{1,2}", 1..5),
    ) {
        let report = check_staleness(&label_with_columns(&recorded), &profile_of_header(&current)).unwrap();
        prop_assert_eq!(report.verdict == StalenessVerdict::Fresh, recorded == current);
        for c in &report.added_columns {
            prop_assert!(current.contains(c) && !recorded.contains(c));
        }
        for c in &report.removed_columns {
            prop_assert!(recorded.contains(c) && !current.contains(c));
        }
        prop_assert!(report.note.contains("2020-11-01"));
    }
}

#[test]
fn three_structural_scenarios() {
    let cols: Vec<String> = ["a", "b"].map(String::from).to_vec();
    let label = label_with_columns(&cols);

    let same = check_staleness(&label, &profile_of_header(&cols)).unwrap();
    assert_eq!(same.verdict, StalenessVerdict::Fresh);

    let added = check_staleness(&label, &profile_of_header(&["a", "b", "c"].map(String::from))).unwrap();
    assert_eq!(added.verdict, StalenessVerdict::Stale);
    assert_eq!(added.added_columns, vec!["c".to_string()]);

    let reordered = check_staleness(&label, &profile_of_header(&["b", "a"].map(String::from))).unwrap();
    assert_eq!(reordered.verdict, StalenessVerdict::Stale);
    assert!(reordered.reordered);
    assert!(reordered.added_columns.is_empty() && reordered.removed_columns.is_empty());
}

proptest! {
    #[test]
    fn column_statistics_stay_in_bounds(seed in any::<u64>()) {
        let table = random_table(&mut ChaCha8Rng::seed_from_u64(seed), 50, 8);
        let profile = profile_csv_at(table.text.as_bytes(), at()).unwrap();
        for c in &profile.columns {
            prop_assert!(c.missing_count <= profile.row_count);
            prop_assert!((0.0..=1.0).contains(&c.missing_fraction));
            prop_assert!(c.distinct_count <= profile.row_count - c.missing_count);
        }
    }
}
