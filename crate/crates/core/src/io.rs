//! Line-delimited record files and content hashes.
//!
//! Every record file starts with a header line naming its kind and schema
//! version, followed by one JSON value per line. Files are written to a
//! sibling temporary and renamed into place, so a reader never sees a
//! partial file.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const RECORD_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub schema_version: u32,
    pub kind: String,
    pub count: usize,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_hash(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

/// Writes `bytes` to `path` through a temporary in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| Error::Format(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

pub fn encode_jsonl<T: Serialize>(kind: &str, items: &[T]) -> Vec<u8> {
    let header = Header { schema_version: RECORD_SCHEMA_VERSION, kind: kind.to_string(), count: items.len() };
    let mut out = serde_json::to_vec(&header).expect("header serializes");
    out.push(b'\n');
    for it in items {
        out.extend(serde_json::to_vec(it).expect("record serializes"));
        out.push(b'\n');
    }
    out
}

pub fn decode_jsonl<T: DeserializeOwned>(kind: &str, bytes: &[u8]) -> Result<Vec<T>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))?;
    let mut lines = text.lines();
    let header: Header = serde_json::from_str(lines.next().ok_or_else(|| Error::Format("empty record file".into()))?)?;
    if header.schema_version != RECORD_SCHEMA_VERSION {
        return Err(Error::SchemaVersion { found: header.schema_version, expected: RECORD_SCHEMA_VERSION });
    }
    if header.kind != kind {
        return Err(Error::Format(format!("expected `{kind}` records, found `{}`", header.kind)));
    }
    let items = lines.filter(|l| !l.is_empty()).map(serde_json::from_str).collect::<std::result::Result<Vec<T>, _>>()?;
    if items.len() != header.count {
        return Err(Error::Format(format!("header announces {} records, found {}", header.count, items.len())));
    }
    Ok(items)
}

/// Writes a record file atomically and returns its content hash.
pub fn write_jsonl<T: Serialize>(path: &Path, kind: &str, items: &[T]) -> Result<String> {
    let bytes = encode_jsonl(kind, items);
    write_atomic(path, &bytes)?;
    Ok(sha256_hex(&bytes))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<Vec<T>> {
    let bytes = fs::read(path).map_err(|e| Error::MissingInput(format!("{}: {e}", path.display())))?;
    decode_jsonl(kind, &bytes)
}

/// Appends one JSON line; used for logs that only ever grow.
pub fn append_line<T: Serialize>(path: &Path, item: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut line = serde_json::to_vec(item)?;
    line.push(b'\n');
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(&line)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_header_checks() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.jsonl");
        let h = write_jsonl(&p, "nums", &[1u32, 2, 3]).unwrap();
        assert_eq!(h, file_hash(&p).unwrap());
        assert_eq!(read_jsonl::<u32>(&p, "nums").unwrap(), vec![1, 2, 3]);
        assert!(matches!(read_jsonl::<u32>(&p, "tasks"), Err(Error::Format(_))));
        let bumped = String::from_utf8(fs::read(&p).unwrap()).unwrap().replacen("\"schema_version\":1", "\"schema_version\":9", 1);
        assert!(matches!(decode_jsonl::<u32>("nums", bumped.as_bytes()), Err(Error::SchemaVersion { found: 9, .. })));
        let truncated = "{\"schema_version\":1,\"kind\":\"nums\",\"count\":3}\n1\n";
        assert!(matches!(decode_jsonl::<u32>("nums", truncated.as_bytes()), Err(Error::Format(_))));
        assert!(!dir.path().join(".x.jsonl.tmp").exists());
    }
}
