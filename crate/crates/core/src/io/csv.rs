//! Two-column `H,B` text files.

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::BhCurve;

/// Reads an `H [A/m], B [T]` curve.
///
/// A first line whose first field is not a number is taken as a header.
/// Values must be finite. A curve whose field never reverses is accepted with
/// a warning.
pub fn ingest_bh_csv(path: impl AsRef<Path>) -> Result<BhCurve> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_reader(text.as_bytes());

    let parse_error = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let (mut h, mut b) = (Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(line, e.to_string())
        })?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if i == 0 && record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if record.len() != 2 {
            return Err(parse_error(line, format!("expected 2 columns, found {}", record.len())));
        }
        let mut values = [0.0; 2];
        for (slot, field) in values.iter_mut().zip(record.iter()) {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_error(line, format!("`{field}` is not a number")))?;
            if !v.is_finite() {
                return Err(parse_error(line, format!("`{field}` is not finite")));
            }
            *slot = v;
        }
        h.push(values[0]);
        b.push(values[1]);
    }
    if h.len() < 3 {
        return Err(Error::EmptyData {
            path: path.to_path_buf(),
            rows: h.len(),
        });
    }
    let curve = BhCurve::new(h, b)?;
    if !curve.has_reversal() {
        log::warn!(
            "{}: field never changes direction; this is not a closed loop",
            path.display()
        );
    }
    Ok(curve)
}

/// `H,B` header followed by one row per sample, values in shortest
/// round-trip form.
pub fn format_bh_csv(curve: &BhCurve) -> String {
    let mut out = String::with_capacity(curve.len() * 48);
    out.push_str("H,B\n");
    for (h, b) in curve.iter() {
        out.push_str(&format!("{h:e},{b:e}\n"));
    }
    out
}

/// Writes `curve` atomically, replacing any existing file.
pub fn write_bh_csv(path: impl AsRef<Path>, curve: &BhCurve) -> Result<()> {
    super::write_atomic(path.as_ref(), format_bh_csv(curve).as_bytes(), true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file_with(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn minimal_file_with_header() {
        let f = file_with("H,B\n0,0\n10,0.5\n0,0.1");
        let c = ingest_bh_csv(f.path()).unwrap();
        assert_eq!(c.h(), &[0.0, 10.0, 0.0]);
        assert_eq!(c.b(), &[0.0, 0.5, 0.1]);
    }

    #[test]
    fn headerless_file() {
        let f = file_with("0, 0\n10 ,0.5\n\n-5,-0.2\n");
        let c = ingest_bh_csv(f.path()).unwrap();
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn bad_token_reports_its_line() {
        let f = file_with("0,0\nabc,0.5\n0,0.1\n");
        match ingest_bh_csv(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let f = file_with("H,B\n0,0\n1,nan\n0,0.1\n");
        match ingest_bh_csv(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let f = file_with("0,0\n1,2,3\n0,0.1\n");
        assert!(matches!(ingest_bh_csv(f.path()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn too_few_rows() {
        let f = file_with("H,B\n0,0\n1,1\n");
        assert!(matches!(ingest_bh_csv(f.path()), Err(Error::EmptyData { rows: 2, .. })));
    }

    #[test]
    fn missing_file() {
        let err = ingest_bh_csv("/nonexistent/curve.csv").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/curve.csv"));
        assert!(err.is_data_error());
    }
}
