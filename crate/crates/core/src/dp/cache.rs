//! CSV persistence for value tables.
//!
//! Layout: one comment line `# seqselect value-table mode=<mode> version=<v>`,
//! the header `n,s,kstar`, then one row per `n >= 1` with `s` printed to 17
//! significant digits. Row `n = 1` carries `kstar = 0` (no maximizer).
//! Files whose first two bytes are the gzip magic are decompressed on load.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use super::ValueTable;
use crate::error::{Error, Result};
use crate::fmt::sig17;

pub const CACHE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn write_table<W: Write>(table: &ValueTable, mut out: W) -> Result<()> {
    writeln!(
        out,
        "# seqselect value-table mode={} version={}",
        table.mode(),
        CACHE_VERSION
    )?;
    writeln!(out, "n,s,kstar")?;
    for n in 1..=table.n_max() {
        writeln!(out, "{},{},{}", n, sig17(table.value(n)), table.kstar(n).unwrap_or(0))?;
    }
    out.flush()?;
    Ok(())
}

/// Parses a cached table. The result is float-backed whatever mode wrote it,
/// and it must pass [`ValueTable::check_invariants`].
pub fn read_table<R: BufRead>(input: R) -> Result<ValueTable> {
    let bad = |line: usize, reason: String| Error::InvalidCache { line, reason };
    let mut values = vec![0.0];
    let mut kstar = vec![0u32];
    let mut saw_header = false;
    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "n,s,kstar" {
                return Err(bad(lineno, format!("expected header `n,s,kstar`, found `{line}`")));
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(bad(lineno, format!("expected 3 fields, found {}", fields.len())));
        }
        let n: usize = fields[0].parse().map_err(|e| bad(lineno, format!("n: {e}")))?;
        if n != values.len() {
            return Err(bad(lineno, format!("expected n = {}, found {n}", values.len())));
        }
        let s: f64 = fields[1].parse().map_err(|e| bad(lineno, format!("s: {e}")))?;
        let k: u32 = fields[2].parse().map_err(|e| bad(lineno, format!("kstar: {e}")))?;
        values.push(s);
        kstar.push(k);
    }
    if values.len() < 2 {
        return Err(bad(0, "no rows".into()));
    }
    ValueTable::from_parts(values, kstar).map_err(|e| bad(0, e.to_string()))
}

pub fn save_table(path: &Path, table: &ValueTable, compress: bool) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    if compress {
        let mut gz = GzEncoder::new(file, Compression::default());
        write_table(table, &mut gz)?;
        gz.finish()?.flush()?;
    } else {
        write_table(table, file)?;
    }
    Ok(())
}

pub fn load_table(path: &Path) -> Result<ValueTable> {
    let mut file = File::open(path)?;
    let mut magic = [0u8; 2];
    let got = file.read(&mut magic)?;
    let file = File::open(path)?;
    if got == 2 && magic == [0x1f, 0x8b] {
        read_table(BufReader::new(GzDecoder::new(file)))
    } else {
        read_table(BufReader::new(file))
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::{build_table, Mode};

    #[test]
    fn round_trip_is_bit_identical() {
        let t = build_table(500, Mode::Float64).unwrap();
        let mut buf = Vec::new();
        write_table(&t, &mut buf).unwrap();
        let back = read_table(buf.as_slice()).unwrap();
        assert_eq!(back.n_max(), 500);
        for n in 0..=500 {
            assert_eq!(back.value(n).to_bits(), t.value(n).to_bits());
            assert_eq!(back.kstar(n), t.kstar(n));
        }
    }

    #[test]
    fn header_and_first_rows() {
        let t = build_table(2, Mode::Float64).unwrap();
        let mut buf = Vec::new();
        write_table(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# seqselect value-table mode=float64"));
        assert_eq!(lines[1], "n,s,kstar");
        assert_eq!(lines[2], "1,1.0000000000000000e0,0");
        assert_eq!(lines[3], "2,1.5000000000000000e0,1");
    }

    #[test]
    fn rejects_broken_tables() {
        let cases = [
            "n,s,kstar\n1,1.0,0\n2,0.9,1\n",
            "n,s,kstar\n1,1.0,0\n3,1.5,1\n",
            "n,s\n1,1.0\n",
            "n,s,kstar\n1,2.0,0\n",
            "n,s,kstar\n1,1.0,0\n2,abc,1\n",
            "n,s,kstar\n",
        ];
        for case in cases {
            assert!(
                matches!(read_table(case.as_bytes()), Err(Error::InvalidCache { .. })),
                "{case}"
            );
        }
    }

    #[test]
    fn gzip_round_trip() {
        let dir = std::env::temp_dir().join(format!("seqselect-cache-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.csv.gz");
        let t = build_table(100, Mode::Float64).unwrap();
        save_table(&path, &t, true).unwrap();
        let back = load_table(&path).unwrap();
        assert_eq!(back.values(), t.values());
        std::fs::remove_dir_all(&dir).ok();
    }
}
