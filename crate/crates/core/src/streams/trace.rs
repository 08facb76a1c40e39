// Copyright 2026 The Carbonyl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! CSV trace files.
//!
//! Update traces hold one `op,key,value` line per update with `op` one of
//! `set` or `inc`. Timestamped traces hold `key,timestamp_ns,size`. Neither
//! has a header. Paths ending in `.gz` are gzip-compressed transparently.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use crate::entry::{SimUpdate, UpdateKind};
use crate::error::{Error, Result};
use crate::streams::TimestampedRecord;

fn is_gz(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

fn open_read(path: &Path) -> Result<Box<dyn Read>> {
    let file = BufReader::new(File::open(path)?);
    Ok(if is_gz(path) {
        Box::new(MultiGzDecoder::new(file))
    } else {
        Box::new(file)
    })
}

fn open_write(path: &Path) -> Result<Box<dyn Write>> {
    let file = BufWriter::new(File::create(path)?);
    Ok(if is_gz(path) {
        Box::new(GzEncoder::new(file, Compression::default()))
    } else {
        Box::new(file)
    })
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(r)
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => parse_err(line, format!("{other:?}")),
    }
}

fn record_line(rec: &csv::StringRecord, fallback: u64) -> u64 {
    rec.position().map_or(fallback, |p| p.line())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, what: &str, line: u64) -> Result<T> {
    let raw = rec.get(i).ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    raw.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{raw}`")))
}

fn finite(v: f64, line: u64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(line, format!("value `{v}` is not finite")))
    }
}

pub fn read_updates_from<R: Read>(r: R) -> Result<Vec<SimUpdate>> {
    let mut out = Vec::new();
    let mut rec = csv::StringRecord::new();
    let mut reader = csv_reader(r);
    let mut n = 0;
    while reader.read_record(&mut rec).map_err(csv_err)? {
        n += 1;
        let line = record_line(&rec, n);
        if rec.len() != 3 {
            return Err(parse_err(line, format!("expected 3 fields, found {}", rec.len())));
        }
        let kind = match &rec[0] {
            "set" => UpdateKind::Set,
            "inc" => UpdateKind::Increment,
            other => return Err(parse_err(line, format!("unknown op `{other}`"))),
        };
        let key = field(&rec, 1, "key", line)?;
        let value = finite(field(&rec, 2, "value", line)?, line)?;
        out.push(SimUpdate { kind, key, value });
    }
    Ok(out)
}

pub fn write_updates_to<W: Write>(w: W, updates: &[SimUpdate]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for u in updates {
        let op = match u.kind {
            UpdateKind::Set => "set",
            UpdateKind::Increment => "inc",
        };
        w.write_record([op, &u.key.to_string(), &u.value.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_updates(path: impl AsRef<Path>) -> Result<Vec<SimUpdate>> {
    read_updates_from(open_read(path.as_ref())?)
}

pub fn write_updates(path: impl AsRef<Path>, updates: &[SimUpdate]) -> Result<()> {
    let mut sink = open_write(path.as_ref())?;
    write_updates_to(&mut sink, updates)?;
    sink.flush()?;
    // Dropping the box finishes the gzip stream.
    drop(sink);
    Ok(())
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<TimestampedRecord>> {
    let mut out = Vec::new();
    let mut rec = csv::StringRecord::new();
    let mut reader = csv_reader(open_read(path.as_ref())?);
    let mut n = 0;
    while reader.read_record(&mut rec).map_err(csv_err)? {
        n += 1;
        let line = record_line(&rec, n);
        if rec.len() != 3 {
            return Err(parse_err(line, format!("expected 3 fields, found {}", rec.len())));
        }
        out.push(TimestampedRecord {
            key: field(&rec, 0, "key", line)?,
            timestamp_ns: field(&rec, 1, "timestamp", line)?,
            size: finite(field(&rec, 2, "size", line)?, line)?,
        });
    }
    Ok(out)
}

pub fn write_records(path: impl AsRef<Path>, records: &[TimestampedRecord]) -> Result<()> {
    let sink = open_write(path.as_ref())?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    for r in records {
        w.write_record([r.key.to_string(), r.timestamp_ns.to_string(), r.size.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_a_set_line() {
        let u = read_updates_from("set,42,3.25\n".as_bytes()).unwrap();
        assert_eq!(u, vec![SimUpdate::set(42, 3.25)]);
    }

    #[test]
    fn unknown_op_names_the_line() {
        match read_updates_from("add,1,1\n".as_bytes()) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 1);
                assert!(message.contains("add"));
            }
            other => panic!("{other:?}"),
        }
        match read_updates_from("set,1,1\ninc,2,x\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_non_finite_and_short_lines() {
        assert!(read_updates_from("set,1,NaN\n".as_bytes()).is_err());
        assert!(read_updates_from("set,1,inf\n".as_bytes()).is_err());
        assert!(read_updates_from("set,1\n".as_bytes()).is_err());
        assert!(read_updates_from("set,-1,1\n".as_bytes()).is_err());
    }

    #[test]
    fn gzip_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv.gz");
        let ups: Vec<SimUpdate> = (0..1000)
            .map(|i| if i % 3 == 0 { SimUpdate::set(i, i as f64 / 7.0) } else { SimUpdate::inc(i, -0.1 * i as f64) })
            .collect();
        write_updates(&path, &ups).unwrap();
        assert_eq!(read_updates(&path).unwrap(), ups);
        let mut magic = [0u8; 2];
        File::open(&path).unwrap().read_exact(&mut magic).unwrap();
        assert_eq!(magic, [0x1f, 0x8b]);
    }

    #[test]
    fn timestamped_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let recs = vec![
            TimestampedRecord { key: 1, timestamp_ns: 10, size: 64.0 },
            TimestampedRecord { key: 2, timestamp_ns: 11, size: 1500.0 },
        ];
        write_records(&path, &recs).unwrap();
        assert_eq!(read_records(&path).unwrap(), recs);
    }

    proptest! {
        #[test]
        fn update_round_trip(ups in prop::collection::vec(
            (any::<bool>(), any::<u64>(), -1e12f64..1e12), 0..200)) {
            let ups: Vec<SimUpdate> = ups.into_iter()
                .map(|(s, k, v)| if s { SimUpdate::set(k, v) } else { SimUpdate::inc(k, v) })
                .collect();
            let mut buf = Vec::new();
            write_updates_to(&mut buf, &ups).unwrap();
            prop_assert_eq!(read_updates_from(buf.as_slice()).unwrap(), ups);
        }
    }
}
