use std::io::{Read, Write};
use std::path::Path;

use super::{Relation, Value};
use crate::error::{Error, Result};

/// Reads a relation from CSV: a header of attribute names, then one tuple
/// per line. Repeated lines are distinct bag elements.
pub fn read_csv(name: &str, path: impl AsRef<Path>) -> Result<Relation> {
    let file = std::fs::File::open(path.as_ref())?;
    read_csv_from(name, file)
}

pub fn read_csv_from(name: &str, reader: impl Read) -> Result<Relation> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_owned()).collect();
    let mut rel = Relation::new(name, header)?;
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let values: Vec<Value> = rec.iter().map(Value::from).collect();
        rel.push(values).map_err(|e| Error::Parse(format!("{name}: data row {}: {e}", line + 1)))?;
    }
    Ok(rel)
}

pub fn write_csv(r: &Relation, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path.as_ref())?;
    write_csv_to(r, file)
}

pub fn write_csv_to(r: &Relation, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(r.columns().iter().map(|a| a.as_str()))?;
    for row in r.expanded_rows() {
        w.write_record(row.iter().map(|v| v.as_ref()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relcore::AttrSet;

    #[test]
    fn round_trip_preserves_duplicates_and_quoting() {
        let text = "A,B\na1,\"x, y\"\na1,\"x, y\"\na2,z\n";
        let r = read_csv_from("R", text.as_bytes()).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.schema(), AttrSet::of(&["A", "B"]));
        let mut out = Vec::new();
        write_csv_to(&r, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn ragged_rows_are_errors() {
        assert!(read_csv_from("R", "A,B\n1,2,3\n".as_bytes()).is_err());
    }
}
