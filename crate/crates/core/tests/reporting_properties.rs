use chrono::{TimeZone, Utc};
use dnl_core::{
    compare_labels_at, render_comparison_html, render_label, resolve_all, validate_label, Label,
};
use dnl_testkit::{brute_force_compare, random_label, LabelShape};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SMALL: LabelShape = LabelShape {
    max_use_cases: 4,
    max_predictions: 3,
    max_items: 15,
};

/// Labels where some use cases share a title (up to case and spacing).
fn comparable_labels(seed: u64) -> Option<(Vec<Label>, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=4);
    let mut labels: Vec<Label> = (0..n).map(|_| random_label(&mut rng, SMALL)).collect();
    let title = labels[0].use_cases.choose(&mut rng)?.title.clone();
    for (i, label) in labels.iter_mut().enumerate().skip(1) {
        label.label_id = format!("{}-{i}", label.label_id);
        if rng.random_bool(0.6) {
            if let Some(u) = label.use_cases.first_mut() {
                u.title = format!("  {}  ", title.to_uppercase().replace(' ', "   "));
            }
        }
    }
    labels
        .iter()
        .all(|l| validate_label(l).passed())
        .then_some((labels, title))
}

/// Integers in the `<td class="count sev-{color}">` cells of one row.
fn row_counts(html: &str, color: &str) -> Vec<Option<u64>> {
    let start = html
        .find(&format!("<tr class=\"row-{color}\">"))
        .expect("row present");
    let row = &html[start..start + html[start..].find("</tr>").unwrap()];
    row.split("<td")
        .skip(1)
        .map(|cell| {
            let text = &cell[cell.find('>').unwrap() + 1..cell.find("</td>").unwrap()];
            cell.contains("class=\"count").then(|| text.parse().unwrap())
        })
        .collect()
}

fn pair_section<'a>(html: &'a str, anchor_id: &str) -> &'a str {
    let start = html
        .find(&format!("<section class=\"pair\" id=\"{anchor_id}\""))
        .expect("pair section present");
    let len = html[start..].find("</section>").unwrap();
    &html[start..start + len]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn comparison_counts_match_brute_force(seed in any::<u64>()) {
        let Some((labels, title)) = comparable_labels(seed) else { return Ok(()) };
        let at = Utc.with_ymd_and_hms(2022, 1, 1, 0, 0, 0).unwrap();
        let report = compare_labels_at(&labels, &title, at).unwrap();
        let oracle = brute_force_compare(&labels, &title);
        prop_assert_eq!(report.entries.len(), oracle.len());
        for (e, o) in report.entries.iter().zip(&oracle) {
            match o {
                None => {
                    prop_assert!(!e.is_matched());
                    prop_assert_eq!(e.severity_counts.total() + e.fyi_count, 0);
                }
                Some((r, or, y, f)) => {
                    prop_assert!(e.is_matched());
                    prop_assert_eq!(
                        (e.severity_counts.red, e.severity_counts.orange, e.severity_counts.yellow, e.fyi_count),
                        (*r, *or, *y, *f)
                    );
                }
            }
        }

        let html = render_comparison_html(&report);
        for (color, pick) in [("red", 0), ("orange", 1), ("yellow", 2), ("green", 3)] {
            let expected: Vec<Option<u64>> = oracle
                .iter()
                .map(|o| o.map(|(r, or, y, f)| [r, or, y, f][pick]))
                .collect();
            prop_assert_eq!(row_counts(&html, color), expected);
        }
    }

    #[test]
    fn rendered_pairs_show_resolved_counts(seed in any::<u64>()) {
        let label = random_label(&mut ChaCha8Rng::seed_from_u64(seed), SMALL);
        let docs = render_label(&label).unwrap();
        let page = docs.get("use-cases.html").unwrap();
        for view in resolve_all(&label).unwrap() {
            let anchor_id = dnl_core::reporting::html::anchor("pair", &[&view.use_case_id, &view.prediction_id]);
            let section = pair_section(page, &anchor_id);
            for (color, n) in [
                ("red", view.severity_summary.red),
                ("orange", view.severity_summary.orange),
                ("yellow", view.severity_summary.yellow),
            ] {
                prop_assert_eq!(section.matches(&format!("class=\"alert sev-{color}\"")).count() as u64, n);
            }
            prop_assert_eq!(section.matches("class=\"fyi sev-green\"").count(), view.fyis.len());
            prop_assert_eq!(section.matches("sev-green").count(), view.fyis.len());
        }
    }

    #[test]
    fn every_page_has_three_pane_tabs(seed in any::<u64>()) {
        let label = random_label(&mut ChaCha8Rng::seed_from_u64(seed), SMALL);
        let docs = render_label(&label).unwrap();
        for page in ["index.html", "overview.html", "use-cases.html", "dataset-info.html"] {
            let html = docs.get(page).unwrap();
            prop_assert_eq!(html.matches("<li class=\"pane-tab\">").count(), 3);
            prop_assert_eq!(html.matches(" class=\"current\"").count(), 1);
        }
        prop_assert_eq!(docs.get("index.html"), docs.get("overview.html"));
    }

    #[test]
    fn rendering_is_deterministic(seed in any::<u64>()) {
        let label = random_label(&mut ChaCha8Rng::seed_from_u64(seed), SMALL);
        let a = render_label(&label).unwrap();
        let b = render_label(&label).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn dataset_info_lists_categories_in_order(seed in any::<u64>()) {
        let label = random_label(&mut ChaCha8Rng::seed_from_u64(seed), SMALL);
        let docs = render_label(&label).unwrap();
        let html = docs.get("dataset-info.html").unwrap();
        let positions: Vec<usize> = dnl_core::Category::ALL
            .iter()
            .map(|c| html.find(&format!("<h2>{}</h2>", c.as_str())).expect("category heading"))
            .collect();
        prop_assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn invalid_labels_do_not_render() {
    let mut label = random_label(&mut ChaCha8Rng::seed_from_u64(3), SMALL);
    label.schema_version = "0.1".into();
    assert!(matches!(
        render_label(&label),
        Err(dnl_core::RenderError::InvalidLabel(_))
    ));
}
