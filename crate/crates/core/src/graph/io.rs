//! Text graph format.
//!
//! ```text
//! sawg 1
//! vertices N arcs M
//! arc <id> <origin> <terminus> <inverse_id> <w_re> <w_im> <theta>
//! ```
//!
//! Ids are 0-based. Lines starting with `#` and blank lines are ignored.
//! Floats are written in shortest round-trip form, so a save/load cycle
//! reproduces the graph bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::{Arc, SymmetricArcGraph};
use crate::error::{Error, Result};
use crate::linalg::C64;

const MAGIC: &str = "sawg";
const VERSION: &str = "1";

pub fn write_graph(g: &SymmetricArcGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "vertices {} arcs {}", g.vertex_count(), g.arc_count());
    for (e, a) in g.arcs().iter().enumerate() {
        let _ = writeln!(
            out,
            "arc {e} {} {} {} {:?} {:?} {:?}",
            a.origin, a.terminus, a.inverse, a.weight.re, a.weight.im, a.theta
        );
    }
    out
}

pub fn save_graph(g: &SymmetricArcGraph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_graph(g))?;
    Ok(())
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<SymmetricArcGraph> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn parse_graph(text: &str) -> Result<SymmetricArcGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty graph file".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields != [MAGIC, VERSION] {
        return Err(parse_err(
            line,
            format!("expected '{MAGIC} {VERSION}', found '{header}'"),
        ));
    }

    let (line, dims) = lines.next().ok_or(Error::Parse {
        line: line + 1,
        message: "missing 'vertices N arcs M' line".into(),
    })?;
    let fields: Vec<&str> = dims.split_whitespace().collect();
    let (n, m) = match fields.as_slice() {
        ["vertices", n, "arcs", m] => (
            field::<usize>(line, n, "vertex count")?,
            field::<usize>(line, m, "arc count")?,
        ),
        _ => return Err(parse_err(line, format!("expected 'vertices N arcs M', found '{dims}'"))),
    };

    let mut arcs: Vec<Option<Arc>> = vec![None; m];
    let mut last_line = line;
    for (line, text) in lines {
        last_line = line;
        let f: Vec<&str> = text.split_whitespace().collect();
        if f.len() != 8 || f[0] != "arc" {
            return Err(parse_err(line, format!("expected 8-field arc record, found '{text}'")));
        }
        let id: usize = field(line, f[1], "arc id")?;
        if id >= m {
            return Err(parse_err(line, format!("arc id {id} out of range (arcs {m})")));
        }
        if arcs[id].is_some() {
            return Err(parse_err(line, format!("duplicate arc id {id}")));
        }
        let origin: usize = field(line, f[2], "origin")?;
        let terminus: usize = field(line, f[3], "terminus")?;
        let inverse: usize = field(line, f[4], "inverse id")?;
        let re: f64 = field(line, f[5], "weight real part")?;
        let im: f64 = field(line, f[6], "weight imaginary part")?;
        let theta: f64 = field(line, f[7], "theta")?;
        if origin >= n || terminus >= n {
            return Err(parse_err(line, format!("arc {id} references a vertex outside 0..{n}")));
        }
        if inverse >= m {
            return Err(parse_err(
                line,
                format!("arc {id} has inverse {inverse} outside 0..{m}"),
            ));
        }
        arcs[id] = Some(Arc {
            origin,
            terminus,
            inverse,
            weight: C64::new(re, im),
            theta,
        });
    }
    let arcs = arcs
        .into_iter()
        .enumerate()
        .map(|(id, a)| a.ok_or_else(|| parse_err(last_line, format!("arc {id} missing"))))
        .collect::<Result<Vec<_>>>()?;
    SymmetricArcGraph::new(n, arcs)
}

fn field<T: FromStr>(line: usize, s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| parse_err(line, format!("invalid {what} '{s}'")))
}

fn parse_err(line: usize, message: String) -> Error {
    Error::Parse { line, message }
}
