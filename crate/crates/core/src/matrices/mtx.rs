//! Matrix Market coordinate and array files.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::sparse::SparseMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixMarketData {
    Real(SparseMatrix<f64>),
    Complex(SparseMatrix<Complex64>),
}

impl MatrixMarketData {
    pub fn n_rows(&self) -> usize {
        match self {
            MatrixMarketData::Real(a) => a.n_rows(),
            MatrixMarketData::Complex(a) => a.n_rows(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

struct Header {
    array: bool,
    field: Field,
    symmetry: Symmetry,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::MatrixMarket(msg.into())
}

fn parse_header(line: &str) -> Result<Header> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(bad(format!("malformed header line: {line:?}")));
    }
    let array = match tokens[2].as_str() {
        "coordinate" => false,
        "array" => true,
        other => return Err(bad(format!("unsupported format {other:?}"))),
    };
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" => return Err(bad("pattern matrices are not supported")),
        other => return Err(bad(format!("unsupported field {other:?}"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(bad(format!("unsupported symmetry {other:?}"))),
    };
    if symmetry == Symmetry::Hermitian && field != Field::Complex {
        return Err(bad("hermitian symmetry requires the complex field"));
    }
    Ok(Header {
        array,
        field,
        symmetry,
    })
}

/// Header plus the remaining non-comment, non-blank lines.
fn read_lines(path: &Path) -> Result<(Header, Vec<String>)> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    let first = lines.next().ok_or_else(|| bad("empty file"))??;
    let header = parse_header(&first)?;
    let mut body = Vec::new();
    for line in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        body.push(trimmed.to_string());
    }
    Ok((header, body))
}

fn parse_num<T: std::str::FromStr>(token: Option<&str>, what: &str, line: usize) -> Result<T> {
    token
        .ok_or_else(|| bad(format!("missing {what} on data line {line}")))?
        .parse()
        .map_err(|_| bad(format!("cannot parse {what} on data line {line}")))
}

fn parse_value(tokens: &mut std::str::SplitWhitespace, field: Field, line: usize) -> Result<Complex64> {
    let re: f64 = parse_num(tokens.next(), "value", line)?;
    let im = if field == Field::Complex {
        parse_num(tokens.next(), "imaginary part", line)?
    } else {
        0.0
    };
    Ok(Complex64::new(re, im))
}

/// Reads a coordinate-format sparse matrix, expanding symmetric storage.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<MatrixMarketData> {
    let (header, body) = read_lines(path.as_ref())?;
    if header.array {
        return Err(bad("expected coordinate format for a sparse matrix"));
    }
    let mut rows = body.iter();
    let size = rows.next().ok_or_else(|| bad("missing size line"))?;
    let mut tok = size.split_whitespace();
    let m: usize = parse_num(tok.next(), "row count", 0)?;
    let n: usize = parse_num(tok.next(), "column count", 0)?;
    let nnz: usize = parse_num(tok.next(), "entry count", 0)?;
    let mut triplets: Vec<(usize, usize, Complex64)> = Vec::with_capacity(nnz);
    let mut count = 0;
    for (k, line) in rows.enumerate() {
        let line_no = k + 1;
        let mut tok = line.split_whitespace();
        let i: usize = parse_num(tok.next(), "row index", line_no)?;
        let j: usize = parse_num(tok.next(), "column index", line_no)?;
        if i == 0 || j == 0 || i > m || j > n {
            return Err(bad(format!("index ({i}, {j}) out of range on data line {line_no}")));
        }
        let v = parse_value(&mut tok, header.field, line_no)?;
        let (i, j) = (i - 1, j - 1);
        triplets.push((i, j, v));
        if i != j {
            match header.symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => triplets.push((j, i, v)),
                Symmetry::SkewSymmetric => triplets.push((j, i, -v)),
                Symmetry::Hermitian => triplets.push((j, i, v.conj())),
            }
        } else if header.symmetry == Symmetry::SkewSymmetric && v != Complex64::new(0.0, 0.0) {
            return Err(bad(format!("nonzero diagonal in skew-symmetric file on data line {line_no}")));
        }
        count += 1;
    }
    if count != nnz {
        return Err(bad(format!("size line promises {nnz} entries, found {count}")));
    }
    Ok(if header.field == Field::Complex {
        MatrixMarketData::Complex(SparseMatrix::from_triplets(m, n, triplets)?)
    } else {
        MatrixMarketData::Real(SparseMatrix::from_triplets(
            m,
            n,
            triplets.into_iter().map(|(i, j, v)| (i, j, v.re)),
        )?)
    })
}

/// Reads an array-format file as a list of columns (for right-hand sides).
pub fn read_matrix_market_columns(path: impl AsRef<Path>) -> Result<Vec<Vec<Complex64>>> {
    let (header, body) = read_lines(path.as_ref())?;
    if !header.array {
        return Err(bad("expected array format for dense vectors"));
    }
    if header.symmetry != Symmetry::General {
        return Err(bad("only general array files are supported"));
    }
    let mut rows = body.iter();
    let size = rows.next().ok_or_else(|| bad("missing size line"))?;
    let mut tok = size.split_whitespace();
    let m: usize = parse_num(tok.next(), "row count", 0)?;
    let n: usize = parse_num(tok.next(), "column count", 0)?;
    let values: Vec<Complex64> = rows
        .enumerate()
        .map(|(k, line)| parse_value(&mut line.split_whitespace(), header.field, k + 1))
        .collect::<Result<_>>()?;
    if values.len() != m * n {
        return Err(bad(format!("expected {} values, found {}", m * n, values.len())));
    }
    Ok(values.chunks(m.max(1)).take(n).map(<[_]>::to_vec).collect())
}

/// Writes equal-length columns in general array format with 17 significant
/// digits.
pub fn write_matrix_market_columns<S: Scalar>(path: impl AsRef<Path>, columns: &[Vec<S>]) -> Result<()> {
    let m = columns.first().map_or(0, Vec::len);
    if let Some(c) = columns.iter().find(|c| c.len() != m) {
        return Err(crate::error::Error::DimensionMismatch {
            expected: m,
            found: c.len(),
        });
    }
    let field = if S::IS_COMPLEX { "complex" } else { "real" };
    let mut out = String::new();
    writeln!(out, "%%MatrixMarket matrix array {field} general").expect("string write");
    writeln!(out, "{m} {}", columns.len()).expect("string write");
    for v in columns.iter().flatten() {
        if S::IS_COMPLEX {
            writeln!(out, "{:.16e} {:.16e}", v.re(), v.im())
        } else {
            writeln!(out, "{:.16e}", v.re())
        }
        .expect("string write");
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

/// Writes general coordinate format with 17 significant digits, so reading
/// the file back reproduces every value exactly.
pub fn write_matrix_market<S: Scalar>(path: impl AsRef<Path>, a: &SparseMatrix<S>) -> Result<()> {
    let field = if S::IS_COMPLEX { "complex" } else { "real" };
    let mut out = String::new();
    writeln!(out, "%%MatrixMarket matrix coordinate {field} general").expect("string write");
    writeln!(out, "{} {} {}", a.n_rows(), a.n_cols(), a.nnz()).expect("string write");
    for i in 0..a.n_rows() {
        for (j, v) in a.row(i) {
            if S::IS_COMPLEX {
                writeln!(out, "{} {} {:.16e} {:.16e}", i + 1, j + 1, v.re(), v.im())
            } else {
                writeln!(out, "{} {} {:.16e}", i + 1, j + 1, v.re())
            }
            .expect("string write");
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}
