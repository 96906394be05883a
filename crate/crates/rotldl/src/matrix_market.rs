//! Matrix Market coordinate I/O for symmetric matrices.
//!
//! The on-disk format is `%%MatrixMarket matrix coordinate real symmetric`
//! with 1-based `i j value` triples covering one triangle; the writer emits
//! the upper triangle (`j >= i`), the reader accepts either orientation and
//! treats missing entries as zero.

use std::io::{self, BufRead, Write};

use crate::packed::PackedSymMatrix;

/// Reader/writer failure, with a line number for parse errors.
#[derive(Debug)]
pub enum MmError {
    Io(io::Error),
    Parse { line: usize, msg: String },
}

impl std::fmt::Display for MmError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MmError::Io(e) => write!(f, "i/o error: {e}"),
            MmError::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
        }
    }
}

impl std::error::Error for MmError {}

impl From<io::Error> for MmError {
    fn from(e: io::Error) -> Self {
        MmError::Io(e)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> MmError {
    MmError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Reads a symmetric coordinate Matrix Market file.
pub fn read_sym_matrix_market<R: BufRead>(reader: R) -> Result<PackedSymMatrix, MmError> {
    let mut lines = reader.lines().enumerate();

    let (lineno, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file"))
        .and_then(|(i, l)| Ok((i + 1, l?)))?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(|s| s.to_lowercase())
        .collect();
    let expected = [
        "%%matrixmarket",
        "matrix",
        "coordinate",
        "real",
        "symmetric",
    ];
    if fields.len() != expected.len() || fields.iter().zip(expected).any(|(a, b)| a != b) {
        return Err(parse_err(
            lineno,
            format!(
                "header must be \"%%MatrixMarket matrix coordinate real symmetric\", got \"{}\"",
                header.trim()
            ),
        ));
    }

    // Size line, after any % comments.
    let (mut n, mut nnz, mut size_seen) = (0usize, 0usize, false);
    let mut filled: Vec<bool> = Vec::new();
    let mut matrix: Option<PackedSymMatrix> = None;
    let mut entries_read = 0usize;

    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if !size_seen {
            if toks.len() != 3 {
                return Err(parse_err(lineno, "size line must be \"rows cols nnz\""));
            }
            let rows: usize = toks[0]
                .parse()
                .map_err(|_| parse_err(lineno, "invalid row count"))?;
            let cols: usize = toks[1]
                .parse()
                .map_err(|_| parse_err(lineno, "invalid column count"))?;
            nnz = toks[2]
                .parse()
                .map_err(|_| parse_err(lineno, "invalid entry count"))?;
            if rows != cols {
                return Err(parse_err(lineno, "symmetric matrix must be square"));
            }
            n = rows;
            size_seen = true;
            matrix = Some(PackedSymMatrix::zeros(n));
            filled = vec![false; n * (n + 1) / 2];
            continue;
        }
        if toks.len() != 3 {
            return Err(parse_err(lineno, "entry line must be \"i j value\""));
        }
        let i: usize = toks[0]
            .parse()
            .map_err(|_| parse_err(lineno, "invalid row index"))?;
        let j: usize = toks[1]
            .parse()
            .map_err(|_| parse_err(lineno, "invalid column index"))?;
        let v: f64 = toks[2]
            .parse()
            .map_err(|_| parse_err(lineno, "invalid value"))?;
        if i < 1 || i > n || j < 1 || j > n {
            return Err(parse_err(lineno, format!("index ({i}, {j}) out of range")));
        }
        if !v.is_finite() {
            return Err(parse_err(lineno, "non-finite value"));
        }
        let m = matrix.as_mut().unwrap();
        let pos = crate::packed::packed_index(i - 1, j - 1, n);
        if filled[pos] {
            return Err(parse_err(lineno, format!("duplicate entry ({i}, {j})")));
        }
        filled[pos] = true;
        m.set(i - 1, j - 1, v);
        entries_read += 1;
    }

    if !size_seen {
        return Err(parse_err(0, "missing size line"));
    }
    if entries_read != nnz {
        return Err(parse_err(
            0,
            format!("size line promised {nnz} entries, found {entries_read}"),
        ));
    }
    Ok(matrix.unwrap())
}

/// Writes the nonzero upper-triangle entries (`j >= i`, 1-based).
pub fn write_sym_matrix_market<W: Write>(mut w: W, a: &PackedSymMatrix) -> io::Result<()> {
    let n = a.dim();
    let mut nnz = 0usize;
    for i in 0..n {
        for j in i..n {
            if a.get(i, j) != 0.0 {
                nnz += 1;
            }
        }
    }
    writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(w, "{n} {n} {nnz}")?;
    for i in 0..n {
        for j in i..n {
            let v = a.get(i, j);
            if v != 0.0 {
                writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let a = PackedSymMatrix::from_rows(&[
            vec![1.5, 0.0, -2.25],
            vec![0.0, 0.0, 1e-17],
            vec![-2.25, 1e-17, 3.0],
        ]);
        let mut buf = Vec::new();
        write_sym_matrix_market(&mut buf, &a).unwrap();
        let back = read_sym_matrix_market(&buf[..]).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn accepts_lower_triangle_entries() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n2 1 3.5\n2 2 1.0\n";
        let a = read_sym_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(a.get(0, 1), 3.5);
        assert_eq!(a.get(1, 1), 1.0);
        assert_eq!(a.get(0, 0), 0.0);
    }

    #[test]
    fn malformed_header_names_line() {
        let text = "%%MatrixMarket matrix array real general\n2 2 1\n1 1 1.0\n";
        let err = read_sym_matrix_market(text.as_bytes()).unwrap_err();
        match err {
            MmError::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_entry_is_rejected() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 2 1.0\n2 1 2.0\n";
        let err = read_sym_matrix_market(text.as_bytes()).unwrap_err();
        match err {
            MmError::Parse { line, msg } => {
                assert_eq!(line, 4);
                assert!(msg.contains("duplicate"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
