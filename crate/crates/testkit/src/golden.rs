//! Checked-in fixtures and golden files.
//!
//! Set `DNL_BLESS=1` to rewrite golden files from the current output.

use std::fs;
use std::path::{Path, PathBuf};

pub const BLESS_VAR: &str = "DNL_BLESS";

/// The workspace `fixtures/` directory.
pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(rel: &str) -> PathBuf {
    fixtures_dir().join(rel)
}

pub fn read_fixture(rel: &str) -> Vec<u8> {
    let path = fixture(rel);
    fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn blessing() -> bool {
    std::env::var(BLESS_VAR).is_ok_and(|v| v == "1")
}

/// Compares `actual` with `fixtures/golden/<rel>`. Returns a description of
/// the first difference, if any.
pub fn check_golden(rel: &str, actual: &[u8]) -> Result<(), String> {
    let path = fixtures_dir().join("golden").join(rel);
    if blessing() {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| e.to_string())?;
        }
        fs::write(&path, actual).map_err(|e| format!("{}: {e}", path.display()))?;
        return Ok(());
    }
    let expected = fs::read(&path).map_err(|e| format!("{}: {e} (run with {BLESS_VAR}=1 to create)", path.display()))?;
    if expected == actual {
        return Ok(());
    }
    let line = expected
        .split(|b| *b == b'\n')
        .zip(actual.split(|b| *b == b'\n'))
        .position(|(a, b)| a != b)
        .map_or_else(|| "length".to_string(), |i| format!("line {}", i + 1));
    Err(format!("{} differs from output at {line}", path.display()))
}
