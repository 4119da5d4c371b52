//! The bundled Dataset Info question bank: four questions per category.
//!
//! Labels are free to carry additional ad-hoc questions; these are the
//! defaults a new label's questionnaire starts from.

use super::{Category, QuestionnaireAnswer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BankQuestion {
    pub id: &'static str,
    pub category: Category,
    pub text: &'static str,
}

const fn q(id: &'static str, category: Category, text: &'static str) -> BankQuestion {
    BankQuestion { id, category, text }
}

pub const QUESTIONS: [BankQuestion; 20] = [
    q("desc-purpose", Category::Description, "For what purpose was the dataset created?"),
    q("desc-creators", Category::Description, "Who created the dataset and on behalf of which entity?"),
    q("desc-funding", Category::Description, "Who funded the creation of the dataset?"),
    q("desc-contact", Category::Description, "How can the owner or maintainer of the dataset be contacted?"),
    q("comp-instances", Category::Composition, "What do the instances that comprise the dataset represent?"),
    q("comp-missing", Category::Composition, "Is any information missing from individual instances?"),
    q("comp-sensitive", Category::Composition, "Does the dataset contain data that might be considered sensitive?"),
    q("comp-subpopulations", Category::Composition, "Does the dataset identify any subpopulations?"),
    q("prov-sources", Category::Provenance, "From which upstream sources was the data obtained?"),
    q("prov-transform", Category::Provenance, "Was any preprocessing, cleaning, or labeling of the data done?"),
    q("prov-raw", Category::Provenance, "Was the raw data saved in addition to the processed data?"),
    q("prov-consent", Category::Provenance, "Did the individuals in question consent to the collection and use of their data?"),
    q("coll-mechanism", Category::Collection, "What mechanisms or procedures were used to collect the data?"),
    q("coll-timeframe", Category::Collection, "Over what timeframe was the data collected?"),
    q("coll-sampling", Category::Collection, "If the dataset is a sample, what was the sampling strategy?"),
    q("coll-definitions", Category::Collection, "Did reporting definitions change across collectors or over time?"),
    q("mgmt-updates", Category::Management, "Will the dataset be updated, and how often?"),
    q("mgmt-versioning", Category::Management, "Will older versions of the dataset continue to be supported?"),
    q("mgmt-errata", Category::Management, "Is there a mechanism for reporting errors in the dataset?"),
    q("mgmt-retention", Category::Management, "Are there limits on the retention of the data?"),
];

pub fn question(id: &str) -> Option<&'static BankQuestion> {
    QUESTIONS.iter().find(|q| q.id == id)
}

/// An unanswered, unflagged questionnaire covering the whole bank.
pub fn blank_questionnaire() -> Vec<QuestionnaireAnswer> {
    QUESTIONS
        .iter()
        .map(|q| QuestionnaireAnswer {
            question_id: q.id.to_string(),
            category: q.category,
            question_text: q.text.to_string(),
            answer: String::new(),
            flag: None,
        })
        .collect()
}
