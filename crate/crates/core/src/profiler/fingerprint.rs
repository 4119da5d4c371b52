use serde::Serialize;
use thiserror::Error;

use crate::canonical::sha256_hex;

/// Digest over the ordered column names of a table.
///
/// The digest is SHA-256 over, for each name in order, its UTF-8 byte
/// length in decimal, `:`, the name bytes, and `\n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct StructuralFingerprint {
    pub column_names: Vec<String>,
    /// 64 lowercase hex characters.
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FingerprintError {
    #[error("cannot fingerprint an empty column list")]
    EmptyColumnList,
}

pub fn fingerprint_encoding<S: AsRef<str>>(column_names: &[S]) -> Vec<u8> {
    let mut buf = Vec::new();
    for name in column_names {
        let name = name.as_ref();
        buf.extend_from_slice(name.len().to_string().as_bytes());
        buf.push(b':');
        buf.extend_from_slice(name.as_bytes());
        buf.push(b'\n');
    }
    buf
}

pub fn compute_fingerprint<S: AsRef<str>>(
    column_names: &[S],
) -> Result<StructuralFingerprint, FingerprintError> {
    if column_names.is_empty() {
        return Err(FingerprintError::EmptyColumnList);
    }
    Ok(StructuralFingerprint {
        column_names: column_names.iter().map(|s| s.as_ref().to_owned()).collect(),
        digest: sha256_hex(&fingerprint_encoding(column_names)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_is_length_prefixed() {
        assert_eq!(fingerprint_encoding(&["a", "b"]), b"1:a\n1:b\n");
        assert_eq!(fingerprint_encoding(&["é"]), "2:é\n".as_bytes());
    }

    #[test]
    fn known_digest() {
        // printf '1:a\n1:b\n' | sha256sum
        assert_eq!(
            compute_fingerprint(&["a", "b"]).unwrap().digest,
            "700dfd192c1fa8813a20119f60fac69bdaf8fbd38520b4fa5b0a21d00621d59b"
        );
    }

    #[test]
    fn order_matters_and_delimiters_cannot_collide() {
        let ab = compute_fingerprint(&["a", "b"]).unwrap();
        assert_eq!(ab, compute_fingerprint(&["a", "b"]).unwrap());
        assert_ne!(ab.digest, compute_fingerprint(&["b", "a"]).unwrap().digest);
        assert_ne!(
            compute_fingerprint(&["a\n1:b"]).unwrap().digest,
            ab.digest
        );
        assert_ne!(
            compute_fingerprint(&["ab"]).unwrap().digest,
            compute_fingerprint(&["a", "b"]).unwrap().digest
        );
    }

    #[test]
    fn empty_list_is_an_error() {
        let none: [&str; 0] = [];
        assert_eq!(compute_fingerprint(&none), Err(FingerprintError::EmptyColumnList));
    }
}
