//! Canonical JSON encoding.
//!
//! Object keys are emitted in lexicographic byte order, arrays keep their
//! order, and no insignificant whitespace is written. The same value always
//! encodes to the same bytes, which is what storage, parity checks and
//! content digests rely on.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Encodes any serializable value in canonical form.
pub fn to_canonical_vec<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<Vec<u8>> {
    let value = serde_json::to_value(value)?;
    let mut out = Vec::with_capacity(256);
    write_value(&value, &mut out)?;
    Ok(out)
}

/// Canonical encoding of an already-built JSON value.
pub fn value_to_canonical_vec(value: &Value) -> Vec<u8> {
    let mut out = Vec::with_capacity(256);
    // Writing into a Vec cannot fail and every Value is representable.
    write_value(value, &mut out).expect("canonical encoding of a JSON value");
    out
}

fn write_value(value: &Value, out: &mut Vec<u8>) -> serde_json::Result<()> {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(&String, &Value)> = map.iter().collect();
            entries.sort_unstable_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));
            out.push(b'{');
            for (i, (key, val)) in entries.into_iter().enumerate() {
                if i > 0 {
                    out.push(b',');
                }
                serde_json::to_writer(&mut *out, key)?;
                out.push(b':');
                write_value(val, out)?;
            }
            out.push(b'}');
        }
        Value::Array(items) => {
            out.push(b'[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(b',');
                }
                write_value(item, out)?;
            }
            out.push(b']');
        }
        scalar => serde_json::to_writer(&mut *out, scalar)?,
    }
    Ok(())
}

/// Lowercase hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// SHA-256 over the canonical encoding of a value.
pub fn content_digest<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    Ok(sha256_hex(&to_canonical_vec(value)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_are_sorted_and_compact() {
        let v = json!({"b": 1, "a": [true, null, {"z": "x", "y": 2.5}], "A": "é"});
        let bytes = value_to_canonical_vec(&v);
        assert_eq!(
            std::str::from_utf8(&bytes).unwrap(),
            r#"{"A":"é","a":[true,null,{"y":2.5,"z":"x"}],"b":1}"#
        );
    }

    #[test]
    fn insertion_order_does_not_matter() {
        let mut m1 = serde_json::Map::new();
        m1.insert("k2".into(), json!(2));
        m1.insert("k1".into(), json!(1));
        let mut m2 = serde_json::Map::new();
        m2.insert("k1".into(), json!(1));
        m2.insert("k2".into(), json!(2));
        assert_eq!(
            value_to_canonical_vec(&Value::Object(m1)),
            value_to_canonical_vec(&Value::Object(m2))
        );
    }

    #[test]
    fn strings_are_escaped() {
        let bytes = to_canonical_vec(&"a\"b\n").unwrap();
        assert_eq!(bytes, br#""a\"b\n""#);
    }

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
