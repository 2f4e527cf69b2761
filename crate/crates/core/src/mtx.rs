//! Matrix Market reader and writer.
//!
//! Coordinate files become [`SparseMatrix`], array files become
//! [`DenseMatrix`]. Real and integer fields are accepted with general,
//! symmetric or skew-symmetric storage; complex and pattern files are
//! rejected explicitly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, MatrixHandle, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

impl Symmetry {
    /// Value stored at the mirrored position of an off-diagonal entry.
    fn mirror(self, v: f64) -> Option<f64> {
        match self {
            Symmetry::General => None,
            Symmetry::Symmetric => Some(v),
            Symmetry::SkewSymmetric => Some(-v),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: &str, lineno: usize) -> Result<(Format, Symmetry)> {
    let tokens: Vec<String> = line
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(
            lineno,
            "expected `%%MatrixMarket matrix <format> <field> <symmetry>`",
        ));
    }
    if tokens[1] != "matrix" {
        return Err(Error::Unsupported(format!("object `{}`", tokens[1])));
    }
    let format = match tokens[2].as_str() {
        "coordinate" => Format::Coordinate,
        "array" => Format::Array,
        other => return Err(parse_err(lineno, format!("unknown format `{other}`"))),
    };
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        "complex" | "pattern" => {
            return Err(Error::Unsupported(format!("field `{}`", tokens[3])));
        }
        other => return Err(parse_err(lineno, format!("unknown field `{other}`"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => return Err(Error::Unsupported("symmetry `hermitian`".into())),
        other => return Err(parse_err(lineno, format!("unknown symmetry `{other}`"))),
    };
    if format == Format::Array && symmetry != Symmetry::General {
        return Err(Error::Unsupported(format!("{} array storage", tokens[4])));
    }
    Ok((format, symmetry))
}

fn parse_usize(tok: &str, lineno: usize, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(lineno, format!("invalid {what} `{tok}`")))
}

fn parse_f64(tok: &str, lineno: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(lineno, format!("invalid value `{tok}`")))?;
    if !v.is_finite() {
        return Err(parse_err(lineno, format!("non-finite value `{tok}`")));
    }
    Ok(v)
}

/// Parses a Matrix Market stream.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<MatrixHandle> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (lineno, header) = match lines.next() {
        Some((n, l)) => (n, l?),
        None => return Err(parse_err(1, "empty file")),
    };
    let (format, symmetry) = parse_header(&header, lineno)?;

    // Skip comments and blank lines; everything else is data.
    let mut data = lines.filter_map(|(n, l)| match l {
        Ok(l) => {
            let t = l.trim();
            (!t.is_empty() && !t.starts_with('%')).then(|| Ok((n, t.to_owned())))
        }
        Err(e) => Some(Err(Error::from(e))),
    });

    let (size_line, size) = data
        .next()
        .transpose()?
        .ok_or_else(|| parse_err(lineno + 1, "missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    let expected_dims = if format == Format::Coordinate { 3 } else { 2 };
    if dims.len() != expected_dims {
        return Err(parse_err(
            size_line,
            format!("expected {expected_dims} size fields"),
        ));
    }
    let rows = parse_usize(dims[0], size_line, "row count")?;
    let cols = parse_usize(dims[1], size_line, "column count")?;
    if rows == 0 || cols == 0 {
        return Err(parse_err(size_line, "matrix has no rows or columns"));
    }

    match format {
        Format::Coordinate => {
            let entries = parse_usize(dims[2], size_line, "entry count")?;
            if symmetry != Symmetry::General && rows != cols {
                return Err(parse_err(
                    size_line,
                    "symmetric storage needs a square matrix",
                ));
            }
            let mut triplets = Vec::with_capacity(entries * 2);
            let mut seen = 0;
            for item in data {
                let (n, line) = item?;
                seen += 1;
                if seen > entries {
                    return Err(parse_err(n, format!("more than {entries} entries")));
                }
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(parse_err(n, "expected `row col value`"));
                }
                let i = parse_usize(toks[0], n, "row index")?;
                let j = parse_usize(toks[1], n, "column index")?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(
                        n,
                        format!("index ({i}, {j}) outside {rows}x{cols}"),
                    ));
                }
                let v = parse_f64(toks[2], n)?;
                let (i, j) = (i - 1, j - 1);
                if symmetry != Symmetry::General && j > i {
                    return Err(parse_err(n, "symmetric storage expects the lower triangle"));
                }
                triplets.push((i, j, v));
                if i != j {
                    if let Some(m) = symmetry.mirror(v) {
                        triplets.push((j, i, m));
                    }
                }
            }
            if seen != entries {
                return Err(parse_err(
                    size_line,
                    format!("expected {entries} entries, found {seen}"),
                ));
            }
            Ok(SparseMatrix::from_triplets(rows, cols, &triplets)?.into())
        }
        Format::Array => {
            // Column-major.
            let mut values = vec![0.0; rows * cols];
            let mut k = 0;
            for item in data {
                let (n, line) = item?;
                for tok in line.split_whitespace() {
                    if k == rows * cols {
                        return Err(parse_err(n, format!("more than {} values", rows * cols)));
                    }
                    let (i, j) = (k % rows, k / rows);
                    values[i * cols + j] = parse_f64(tok, n)?;
                    k += 1;
                }
            }
            if k != rows * cols {
                return Err(parse_err(
                    size_line,
                    format!("expected {} values, found {k}", rows * cols),
                ));
            }
            Ok(DenseMatrix::new(rows, cols, values)?.into())
        }
    }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<MatrixHandle> {
    parse_matrix_market(BufReader::new(File::open(path)?))
}

/// Writes sparse matrices in general coordinate form and dense ones in
/// array form. Values use the shortest representation that parses back to
/// the same bits.
pub fn write_matrix_market_to<W: Write>(a: &MatrixHandle, mut w: W) -> Result<()> {
    match a {
        MatrixHandle::Sparse(s) => {
            writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
            writeln!(w, "{} {} {}", s.rows(), s.cols(), s.nnz())?;
            for i in 0..s.rows() {
                let (cols, vals) = s.row(i);
                for (j, v) in cols.iter().zip(vals) {
                    writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
                }
            }
        }
        MatrixHandle::Dense(d) => {
            writeln!(w, "%%MatrixMarket matrix array real general")?;
            writeln!(w, "{} {}", d.rows(), d.cols())?;
            for j in 0..d.cols() {
                for i in 0..d.rows() {
                    writeln!(w, "{:e}", d.get(i, j))?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_matrix_market(path: impl AsRef<Path>, a: &MatrixHandle) -> Result<()> {
    write_matrix_market_to(a, BufWriter::new(File::create(path)?))
}
