//! Matrix Market (coordinate, complex, general) export.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::WalkOperators;
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, Operator, C64};

const HEADER: &str = "%%MatrixMarket matrix coordinate complex general";

/// Entries in row-major order, 1-based. Dense operators list every nonzero.
pub fn write_matrix_market(op: &Operator) -> String {
    let sparse = op.to_sparse();
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "{} {} {}", sparse.rows(), sparse.cols(), sparse.nnz());
    for (i, j, v) in sparse.triplets() {
        let _ = writeln!(out, "{} {} {:?} {:?}", i + 1, j + 1, v.re, v.im);
    }
    out
}

/// Reads `real` or `complex` general coordinate files.
pub fn parse_matrix_market(text: &str) -> Result<CsrMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, banner) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let banner_fields: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    let complex = match banner_fields.as_slice() {
        [mm, m, c, field, g] if mm == "%%matrixmarket" && m == "matrix" && c == "coordinate" && g == "general" => {
            match field.as_str() {
                "complex" => true,
                "real" => false,
                other => return Err(parse(1, format!("unsupported field '{other}'"))),
            }
        }
        _ => return Err(parse(1, format!("unsupported banner '{banner}'"))),
    };
    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (line, size) = body.next().ok_or(parse(2, "missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse(line, format!("invalid size '{t}'"))))
        .collect::<Result<_>>()?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(parse(line, "size line needs three integers".into()));
    };
    let mut triplets = Vec::with_capacity(nnz);
    for (line, l) in body {
        let f: Vec<&str> = l.split_whitespace().collect();
        let want = if complex { 4 } else { 3 };
        if f.len() != want {
            return Err(parse(line, format!("expected {want} fields, found {}", f.len())));
        }
        let idx = |t: &str, bound: usize| -> Result<usize> {
            match t.parse::<usize>() {
                Ok(k) if (1..=bound).contains(&k) => Ok(k - 1),
                _ => Err(parse(line, format!("index '{t}' out of range"))),
            }
        };
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| parse(line, format!("invalid number '{t}'")))
        };
        let im = if complex { num(f[3])? } else { 0.0 };
        triplets.push((idx(f[0], rows)?, idx(f[1], cols)?, C64::new(num(f[2])?, im)));
    }
    if triplets.len() != nnz {
        return Err(parse(0, format!("declared {nnz} entries, found {}", triplets.len())));
    }
    Ok(CsrMatrix::from_triplets(rows, cols, &triplets))
}

/// Writes `<name>.{dA,dB,S,C,U,T}.mtx` into `dir`, returning the paths.
pub fn export_operators(ops: &WalkOperators, dir: &Path, name: &str) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let items = [
        ("dA", ops.boundary_a()),
        ("dB", ops.boundary_b()),
        ("S", ops.shift()),
        ("C", ops.coin()),
        ("U", ops.evolution()),
        ("T", ops.discriminant()),
    ];
    let mut paths = Vec::new();
    for (tag, op) in items {
        let path = dir.join(format!("{name}.{tag}.mtx"));
        fs::write(&path, write_matrix_market(op))?;
        paths.push(path);
    }
    Ok(paths)
}

fn parse(line: usize, message: String) -> Error {
    Error::Parse { line, message }
}
