use std::collections::HashMap;
use std::fmt::Write;

use crate::label::{Alert, Category, FlagKind, Fyi, Label, OverviewModule, MATERIALIZED_ID_PREFIX};
use crate::profiler::{format_timestamp, ColumnBound, DatasetProfile};
use crate::resolution::ResolvedView;

use super::compare::{ComparisonReport, ComparisonStatus};
use super::{DocumentSet, RenderError};

pub const STYLESHEET_PATH: &str = "assets/label.css";

pub(crate) const STYLESHEET: &str = r#"body { font-family: system-ui, sans-serif; margin: 0 auto; max-width: 60rem; padding: 1rem; color: #1d1d1f; }
header.label-header h1 { margin-bottom: 0.2rem; }
header.label-header .meta { color: #555; margin-top: 0; }
nav.panes ul { display: flex; gap: 1rem; list-style: none; padding: 0; border-bottom: 2px solid #ddd; }
nav.panes a { display: inline-block; padding: 0.4rem 0.8rem; text-decoration: none; color: #1d1d1f; }
nav.panes a.current { border-bottom: 3px solid #1d1d1f; font-weight: bold; }
.badges { display: flex; gap: 1rem; }
.badge { border: 1px solid #ccc; border-radius: 0.5rem; padding: 0.5rem 1rem; text-align: center; }
.badge .value { display: block; font-size: 1.6rem; font-weight: bold; }
table { border-collapse: collapse; }
th, td { border: 1px solid #ddd; padding: 0.3rem 0.6rem; text-align: left; }
ul.alerts, ul.fyis { list-style: none; padding: 0; }
li.alert, li.fyi { border-left: 0.5rem solid; margin: 0.5rem 0; padding: 0.3rem 0.8rem; background: #fafafa; }
.sev-red { border-color: #c62828; }
.sev-orange { border-color: #ef6c00; }
.sev-yellow { border-color: #f9a825; }
.sev-green { border-color: #2e7d32; }
td.sev-red { background: #ffebee; }
td.sev-orange { background: #fff3e0; }
td.sev-yellow { background: #fffde7; }
td.sev-green { background: #e8f5e9; }
a.flag { border-left: 0.3rem solid; padding-left: 0.3rem; margin-left: 0.5rem; }
.not-provided { color: #888; font-style: italic; }
td.not-applicable { color: #888; font-style: italic; background: #f0f0f0; }
"#;

pub(crate) const PANES: [(&str, &str); 3] = [
    ("overview.html", "Overview"),
    ("use-cases.html", "Use Cases & Alerts"),
    ("dataset-info.html", "Dataset Info"),
];

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// A fragment identifier built from arbitrary ids. ASCII alphanumerics and
/// `.` pass through, every other byte becomes `_xx` hex, and parts are
/// joined with `--`, so distinct id tuples never share an anchor.
pub fn anchor(prefix: &str, parts: &[&str]) -> String {
    let mut out = String::from(prefix);
    for part in parts {
        out.push_str("--");
        for b in part.bytes() {
            if b.is_ascii_alphanumeric() || b == b'.' {
                out.push(b as char);
            } else {
                let _ = write!(out, "_{b:02x}");
            }
        }
    }
    out
}

fn pair_anchor(view: &ResolvedView) -> String {
    anchor("pair", &[&view.use_case_id, &view.prediction_id])
}

fn item_anchor(view: &ResolvedView, item_id: &str) -> String {
    format!("{}{}", pair_anchor(view), anchor("", &[item_id]))
}

fn page(label: &Label, current: &str, body: &str) -> String {
    let title = PANES
        .iter()
        .find(|(file, _)| *file == current)
        .map_or("Overview", |(_, t)| t);
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(
        out,
        "<title>{} - {}</title>",
        escape(&label.dataset_name),
        escape(title)
    );
    let _ = writeln!(out, "<link rel=\"stylesheet\" href=\"{STYLESHEET_PATH}\">");
    out.push_str("</head>\n<body>\n<header class=\"label-header\">\n");
    let _ = writeln!(out, "<h1>{}</h1>", escape(&label.dataset_name));
    let _ = writeln!(
        out,
        "<p class=\"meta\">Published by {} &middot; Date <time datetime=\"{d}\">{d}</time></p>",
        escape(&label.publisher),
        d = label.date_produced
    );
    out.push_str("</header>\n<nav class=\"panes\">\n<ul>\n");
    for (file, name) in PANES {
        let class = if file == current { " class=\"current\"" } else { "" };
        let _ = writeln!(
            out,
            "<li class=\"pane-tab\"><a href=\"{file}\"{class}>{}</a></li>",
            escape(name)
        );
    }
    out.push_str("</ul>\n</nav>\n<main>\n");
    out.push_str(body);
    out.push_str("</main>\n</body>\n</html>\n");
    out
}

fn bound_text(b: &Option<ColumnBound>) -> String {
    match b {
        None => String::new(),
        Some(ColumnBound::Integer(v)) => v.to_string(),
        Some(ColumnBound::Float(v)) => v.to_string(),
        Some(ColumnBound::Date(d)) => d.to_string(),
    }
}

fn profile_section(out: &mut String, profile: &DatasetProfile) {
    out.push_str("<section class=\"module computed-stats\">\n<h2>Dataset statistics</h2>\n");
    let _ = writeln!(
        out,
        "<p>{} rows &middot; {} columns &middot; profiled {}</p>",
        profile.row_count,
        profile.columns.len(),
        escape(&format_timestamp(&profile.profiled_at))
    );
    out.push_str("<table>\n<thead><tr><th>Column</th><th>Type</th><th>Missing</th><th>Distinct</th><th>Min</th><th>Max</th></tr></thead>\n<tbody>\n");
    for c in &profile.columns {
        let _ = writeln!(
            out,
            "<tr><td>{}</td><td>{}</td><td>{} ({:.1}%)</td><td>{}</td><td>{}</td><td>{}</td></tr>",
            escape(&c.name),
            c.inferred_type.as_str(),
            c.missing_count,
            c.missing_fraction * 100.0,
            c.distinct_count,
            escape(&bound_text(&c.min)),
            escape(&bound_text(&c.max)),
        );
    }
    out.push_str("</tbody>\n</table>\n");
    let _ = writeln!(
        out,
        "<p class=\"fingerprint\">Structure fingerprint <code>{}</code></p>",
        escape(&profile.fingerprint.digest)
    );
    out.push_str("</section>\n");
}

fn overview_body(label: &Label) -> String {
    let mut out = String::from("<section class=\"pane overview\" id=\"overview\">\n<dl class=\"label-facts\">\n");
    let _ = writeln!(out, "<dt>Date</dt><dd>{}</dd>", label.date_produced);
    let _ = writeln!(out, "<dt>Publisher</dt><dd>{}</dd>", escape(&label.publisher));
    if let Some(url) = &label.source_url {
        let _ = writeln!(
            out,
            "<dt>Source</dt><dd><a href=\"{0}\">{0}</a></dd>",
            escape(url)
        );
    }
    if let Some(license) = &label.license {
        let _ = writeln!(out, "<dt>License</dt><dd>{}</dd>", escape(license));
    }
    if let Some(fp) = &label.fingerprint {
        let _ = writeln!(
            out,
            "<dt>Columns</dt><dd>{}</dd>",
            escape(&fp.column_names.join(", "))
        );
    }
    out.push_str("</dl>\n");
    for module in &label.overview_modules {
        match module {
            OverviewModule::KeyFacts { facts } => {
                out.push_str("<section class=\"module key-facts\">\n<h2>Key facts</h2>\n<dl>\n");
                for (k, v) in facts {
                    let _ = writeln!(out, "<dt>{}</dt><dd>{}</dd>", escape(k), escape(v));
                }
                out.push_str("</dl>\n</section>\n");
            }
            OverviewModule::ComputedStats { profile } => profile_section(&mut out, profile),
            OverviewModule::Badges {
                use_case_count,
                alert_count,
                fyi_count,
            } => {
                out.push_str("<section class=\"module badges\">\n");
                for (value, name) in [
                    (use_case_count, "Use cases"),
                    (alert_count, "Alerts"),
                    (fyi_count, "FYIs"),
                ] {
                    let _ = writeln!(
                        out,
                        "<div class=\"badge\"><span class=\"value\">{value}</span>{name}</div>"
                    );
                }
                out.push_str("</section>\n");
            }
            OverviewModule::FreeText { title, text } => {
                let _ = writeln!(
                    out,
                    "<section class=\"module free-text\">\n<h2>{}</h2>\n<p>{}</p>\n</section>",
                    escape(title),
                    escape(text)
                );
            }
        }
    }
    out.push_str("</section>\n");
    out
}

fn question_link(out: &mut String, question_id: &str) {
    let _ = write!(
        out,
        "<p class=\"source\">From Dataset Info: <a href=\"dataset-info.html#{}\">{}</a></p>",
        anchor("q", &[question_id]),
        escape(question_id)
    );
}

fn alert_item(out: &mut String, view: &ResolvedView, a: &Alert) {
    let _ = write!(
        out,
        "<li class=\"alert sev-{}\" id=\"{}\"><span class=\"severity\">{}</span> <strong>{}</strong>",
        a.severity.color(),
        item_anchor(view, &a.id),
        a.severity.description(),
        escape(&a.title)
    );
    if !a.description.is_empty() {
        let _ = write!(out, "<p>{}</p>", escape(&a.description));
    }
    if !a.mitigation_text().is_empty() {
        let _ = write!(
            out,
            "<p class=\"mitigation\">Mitigation: {}</p>",
            escape(a.mitigation_text())
        );
    }
    if let Some(q) = &a.derived_from_question {
        question_link(out, q);
    }
    out.push_str("</li>\n");
}

fn fyi_item(out: &mut String, view: &ResolvedView, f: &Fyi) {
    let _ = write!(
        out,
        "<li class=\"fyi sev-{}\" id=\"{}\"><span class=\"severity\">FYI</span> <strong>{}</strong>",
        Fyi::COLOR,
        item_anchor(view, &f.id),
        escape(&f.title)
    );
    if !f.description.is_empty() {
        let _ = write!(out, "<p>{}</p>", escape(&f.description));
    }
    if let Some(q) = &f.derived_from_question {
        question_link(out, q);
    }
    out.push_str("</li>\n");
}

fn use_cases_body(label: &Label, views: &HashMap<(&str, &str), &ResolvedView>) -> String {
    let mut out = String::from("<section class=\"pane use-cases\" id=\"use-cases\">\n");
    if label.use_cases.is_empty() {
        out.push_str("<p>This label documents no use cases.</p>\n");
    }
    for u in &label.use_cases {
        let _ = writeln!(
            out,
            "<section class=\"use-case\" id=\"{}\">\n<h2>{}</h2>\n<p>{}</p>",
            anchor("uc", &[&u.id]),
            escape(&u.title),
            escape(&u.description)
        );
        for p in &u.predictions {
            let view = views[&(u.id.as_str(), p.id.as_str())];
            let _ = writeln!(
                out,
                "<section class=\"pair\" id=\"{}\" data-use-case=\"{}\" data-prediction=\"{}\">",
                pair_anchor(view),
                escape(&u.id),
                escape(&p.id)
            );
            let _ = writeln!(
                out,
                "<h3>{}</h3>\n<p class=\"method\">{}</p>",
                escape(&p.title),
                escape(&p.method_description)
            );
            let s = &view.severity_summary;
            let _ = writeln!(
                out,
                "<p class=\"summary\">Red {} &middot; Orange {} &middot; Yellow {} &middot; FYI {}</p>",
                s.red,
                s.orange,
                s.yellow,
                view.fyis.len()
            );
            if view.alerts.is_empty() {
                out.push_str("<p class=\"empty\">No alerts for this selection.</p>\n");
            } else {
                out.push_str("<ul class=\"alerts\">\n");
                for a in &view.alerts {
                    alert_item(&mut out, view, a);
                }
                out.push_str("</ul>\n");
            }
            if !view.fyis.is_empty() {
                out.push_str("<ul class=\"fyis\">\n");
                for f in &view.fyis {
                    fyi_item(&mut out, view, f);
                }
                out.push_str("</ul>\n");
            }
            out.push_str("</section>\n");
        }
        out.push_str("</section>\n");
    }
    out.push_str("</section>\n");
    out
}

/// The displayed item a flagged answer turned into: the authored item that
/// refines the question if there is one, else the materialized item.
fn flag_target<'v>(
    label: &Label,
    question_id: &str,
    ordered_views: &[&'v ResolvedView],
) -> Option<(String, &'v ResolvedView, &'static str)> {
    let authored = label
        .alerts
        .iter()
        .find(|a| a.derived_from_question.as_deref() == Some(question_id))
        .map(|a| (a.id.clone(), a.severity.color()))
        .or_else(|| {
            label
                .fyis
                .iter()
                .find(|f| f.derived_from_question.as_deref() == Some(question_id))
                .map(|f| (f.id.clone(), Fyi::COLOR))
        });
    let (id, color) = match authored {
        Some(found) => found,
        None => {
            let q = label.questionnaire.iter().find(|q| q.question_id == question_id)?;
            let rule = q.flag.as_ref()?;
            let color = match rule.kind {
                FlagKind::Alert => rule.severity.map_or("red", |s| s.color()),
                FlagKind::Fyi => Fyi::COLOR,
            };
            (format!("{MATERIALIZED_ID_PREFIX}{question_id}"), color)
        }
    };
    ordered_views
        .iter()
        .find(|v| v.alerts.iter().any(|a| a.id == id) || v.fyis.iter().any(|f| f.id == id))
        .map(|v| (id, *v, color))
}

fn dataset_info_body(label: &Label, ordered_views: &[&ResolvedView]) -> String {
    let mut out = String::from("<section class=\"pane dataset-info\" id=\"dataset-info\">\n");
    for category in Category::ALL {
        let _ = writeln!(
            out,
            "<section class=\"category\" id=\"{}\">\n<h2>{}</h2>\n<dl>",
            anchor("cat", &[&category.as_str().to_lowercase()]),
            category
        );
        for q in label.questionnaire.iter().filter(|q| q.category == category) {
            let _ = writeln!(
                out,
                "<dt id=\"{}\">{}</dt>",
                anchor("q", &[&q.question_id]),
                escape(&q.question_text)
            );
            out.push_str("<dd class=\"answer\">");
            if q.is_answered() {
                out.push_str(&escape(&q.answer));
            } else {
                out.push_str("<span class=\"not-provided\">Not provided</span>");
            }
            if q.is_answered() && q.flag.is_some() {
                if let Some((id, view, color)) = flag_target(label, &q.question_id, ordered_views) {
                    let summary = q.flag.as_ref().map_or("", |r| r.summary.as_str());
                    let _ = write!(
                        out,
                        " <a class=\"flag sev-{color}\" href=\"use-cases.html#{}\">Flagged: {}</a>",
                        item_anchor(view, &id),
                        escape(summary)
                    );
                }
            }
            out.push_str("</dd>\n");
        }
        out.push_str("</dl>\n</section>\n");
    }
    out.push_str("</section>\n");
    out
}

pub(crate) fn render(label: &Label, views: &[ResolvedView]) -> Result<DocumentSet, RenderError> {
    let by_pair: HashMap<(&str, &str), &ResolvedView> = views
        .iter()
        .map(|v| ((v.use_case_id.as_str(), v.prediction_id.as_str()), v))
        .collect();
    let mut ordered = Vec::new();
    for u in &label.use_cases {
        for p in &u.predictions {
            match by_pair.get(&(u.id.as_str(), p.id.as_str())) {
                Some(v) => ordered.push(*v),
                None => {
                    return Err(RenderError::MissingView {
                        use_case_id: u.id.clone(),
                        prediction_id: p.id.clone(),
                    })
                }
            }
        }
    }

    let overview = overview_body(label);
    let mut docs = DocumentSet::default();
    docs.insert("index.html", page(label, "overview.html", &overview));
    docs.insert("overview.html", page(label, "overview.html", &overview));
    docs.insert(
        "use-cases.html",
        page(label, "use-cases.html", &use_cases_body(label, &by_pair)),
    );
    docs.insert(
        "dataset-info.html",
        page(label, "dataset-info.html", &dataset_info_body(label, &ordered)),
    );
    docs.insert(STYLESHEET_PATH, STYLESHEET.to_string());
    Ok(docs)
}

type CountRow = (&'static str, &'static str, fn(&super::ComparisonEntry) -> u64);

pub(crate) fn render_comparison(report: &ComparisonReport) -> String {
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(
        out,
        "<title>Comparison - {}</title>\n<link rel=\"stylesheet\" href=\"{STYLESHEET_PATH}\">",
        escape(&report.use_case_title)
    );
    out.push_str("</head>\n<body>\n<main>\n");
    let _ = writeln!(
        out,
        "<h1>Label comparison</h1>\n<p class=\"meta\">Use case <strong>{}</strong> &middot; generated {}</p>",
        escape(&report.use_case_title),
        escape(&format_timestamp(&report.generated_at))
    );
    out.push_str("<table class=\"comparison\">\n<thead>\n<tr><th scope=\"col\">Dataset</th>");
    for e in &report.entries {
        let _ = write!(
            out,
            "<th scope=\"col\" class=\"label-col\" data-label-id=\"{}\">{}</th>",
            escape(&e.label_id),
            escape(&e.dataset_name)
        );
    }
    out.push_str("</tr>\n</thead>\n<tbody>\n");

    out.push_str("<tr class=\"row-status\"><th scope=\"row\">Status</th>");
    for e in &report.entries {
        match &e.status {
            ComparisonStatus::Matched { use_case_id } => {
                let _ = write!(
                    out,
                    "<td class=\"matched\" data-use-case=\"{}\">matched</td>",
                    escape(use_case_id)
                );
            }
            ComparisonStatus::NotApplicable => {
                out.push_str("<td class=\"not-applicable\">not applicable</td>");
            }
        }
    }
    out.push_str("</tr>\n");

    out.push_str("<tr class=\"row-date\"><th scope=\"row\">Date</th>");
    for e in &report.entries {
        let _ = write!(out, "<td>{}</td>", e.date_produced);
    }
    out.push_str("</tr>\n<tr class=\"row-rows\"><th scope=\"row\">Rows</th>");
    for e in &report.entries {
        match e.row_count {
            Some(n) => {
                let _ = write!(out, "<td>{n}</td>");
            }
            None => out.push_str("<td></td>"),
        }
    }
    out.push_str("</tr>\n");

    let rows: [CountRow; 4] = [
        ("red", "Red alerts", |e| e.severity_counts.red),
        ("orange", "Orange alerts", |e| e.severity_counts.orange),
        ("yellow", "Yellow alerts", |e| e.severity_counts.yellow),
        ("green", "FYIs", |e| e.fyi_count),
    ];
    for (color, name, count) in rows {
        let _ = write!(
            out,
            "<tr class=\"row-{color}\"><th scope=\"row\">{name}</th>"
        );
        for e in &report.entries {
            if e.is_matched() {
                let _ = write!(out, "<td class=\"count sev-{color}\">{}</td>", count(e));
            } else {
                out.push_str("<td class=\"not-applicable\"></td>");
            }
        }
        out.push_str("</tr>\n");
    }
    out.push_str("</tbody>\n</table>\n</main>\n</body>\n</html>\n");
    out
}
