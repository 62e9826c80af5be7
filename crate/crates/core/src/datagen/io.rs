use super::generate::Instance;
use crate::jsonl::{read_jsonl, write_jsonl, RecordError};
use std::io::{self, BufRead, Write};

/// Parses one dataset line.
pub fn parse_record(line: &str) -> Result<Instance, serde_json::Error> {
    serde_json::from_str(line)
}

pub fn read_dataset<R: BufRead>(reader: R) -> Result<Vec<Instance>, RecordError> {
    read_jsonl(reader)
}

pub fn write_dataset<W: Write>(w: W, instances: &[Instance]) -> io::Result<()> {
    write_jsonl(w, instances)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{generate_dataset, Count, DatasetId, GenSpec, Vocabulary};

    #[test]
    fn jsonl_round_trip() {
        let ds = generate_dataset(&GenSpec::new(DatasetId::D32, 2, Count::N(6)), &Vocabulary::default_vocab()).unwrap();
        let mut buf = Vec::new();
        write_dataset(&mut buf, &ds).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 6);
        let first = text.lines().next().unwrap();
        assert!(first.starts_with(r#"{"instance_id":"D32-000000","dataset":"D32","template_id":"#), "{first}");
        assert_eq!(read_dataset(&buf[..]).unwrap(), ds);
    }

    #[test]
    fn bad_line_reports_number() {
        let err = read_dataset(&b"\n{\"instance_id\": 3}\n"[..]).unwrap_err();
        assert!(matches!(err, RecordError::Json { line: 2, .. }), "{err}");
    }
}
