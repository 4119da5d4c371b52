use rand::seq::IndexedRandom;
use rand::Rng;

/// A generated table and its RFC 4180 text.
#[derive(Debug, Clone)]
pub struct RandomTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub text: String,
}

const MISSING: &[&str] = &["", "NA", "na", "N/A", "n/a", "null", "NULL", "NaN", "nan"];
const INTS: &[&str] = &["0", "1", "-7", "+3", "42", "007", "123456789012"];
const FLOATS: &[&str] = &["1.5", "-0.25", "3.", ".5", "1e3", "2.5E-2", "10"];
const BOOLS: &[&str] = &["true", "false", "TRUE", "False"];
const DATES: &[&str] = &["2020-03-01", "2020-03-02", "2021-12-31", "2020-02-29"];
const STRINGS: &[&str] = &["alpha", "beta", "NY", "has,comma", "say \"hi\"", "x y", "ñ", "inf", "2020-3-1", "1_0"];

fn quote(cell: &str, force: bool) -> String {
    if force || cell.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// Up to `max_rows` x `max_cols` (at least one column). Columns lean toward
/// one type, with occasional contamination and missing tokens.
pub fn random_table<R: Rng>(rng: &mut R, max_rows: usize, max_cols: usize) -> RandomTable {
    let n_cols = rng.random_range(1..=max_cols.max(1));
    let n_rows = rng.random_range(0..=max_rows);
    let header: Vec<String> = (0..n_cols).map(|i| format!("c{i}")).collect();
    let pools: Vec<&[&str]> = (0..n_cols)
        .map(|_| *[INTS, FLOATS, BOOLS, DATES, STRINGS].choose(rng).unwrap())
        .collect();
    let missing_rate = rng.random_range(0.0..0.4);
    let contamination = if rng.random_bool(0.3) { 0.1 } else { 0.0 };
    let rows: Vec<Vec<String>> = (0..n_rows)
        .map(|_| {
            pools
                .iter()
                .map(|pool| {
                    let cell = if rng.random_bool(missing_rate) {
                        MISSING.choose(rng).unwrap()
                    } else if rng.random_bool(contamination) {
                        STRINGS.choose(rng).unwrap()
                    } else {
                        pool.choose(rng).unwrap()
                    };
                    cell.to_string()
                })
                .collect()
        })
        .collect();

    let crlf = rng.random_bool(0.3);
    let eol = if crlf { "\r\n" } else { "\n" };
    let mut text = String::new();
    text.push_str(&header.iter().map(|h| quote(h, false)).collect::<Vec<_>>().join(","));
    text.push_str(eol);
    for row in &rows {
        // a lone empty field would read as a blank line, so quote it
        let lone = row.len() == 1;
        let line: Vec<String> = row
            .iter()
            .map(|c| quote(c, (lone && c.is_empty()) || rng.random_bool(0.1)))
            .collect();
        text.push_str(&line.join(","));
        text.push_str(eol);
    }
    RandomTable { header, rows, text }
}
