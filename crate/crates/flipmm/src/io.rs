//! Text serialization of schemes.
//!
//! One scheme per file:
//!
//! ```text
//! # optional comments
//! m n p r ring          ring is one of z2, z3, zt
//! u_1 .. u_mn | v_1 .. v_np | w_1 .. w_pm
//! ...                   exactly r component lines
//! ```
//!
//! Coefficients are decimal integers; position 0 of a row comes first.
//! Lifted schemes use the same layout with ring tags `z` or `q` and
//! coefficients written as `a` or `a/b` (see [`crate::lift`]).

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::ring::{CoeffVec, Ring};
use crate::scheme::{Component, Dims, Scheme, SchemeError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse { line, msg: msg.into() }
}

/// Parses a scheme from the text format. Line numbers in errors are
/// 1-based and count comment and blank lines.
pub fn parse_scheme(text: &str) -> Result<Scheme, IoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(idx, line)| (idx + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'));

    let (header_line, header) = lines.next().ok_or_else(|| parse_err(0, "empty scheme file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 {
        return Err(parse_err(header_line, format!("expected `m n p r ring`, got {header:?}")));
    }
    let num = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_err(header_line, format!("invalid {what} {s:?}")))
    };
    let m = num(fields[0], "m")?;
    let n = num(fields[1], "n")?;
    let p = num(fields[2], "p")?;
    let rank = num(fields[3], "rank")?;
    let ring = Ring::parse(fields[4])
        .ok_or_else(|| parse_err(header_line, format!("unknown ring {:?}", fields[4])))?;
    let dims = Dims::new(m, n, p)?;
    if rank == 0 {
        return Err(parse_err(header_line, "rank must be >= 1"));
    }

    let mut components = Vec::with_capacity(rank);
    for _ in 0..rank {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| parse_err(header_line, format!("expected {rank} component lines")))?;
        let groups: Vec<&str> = line.split('|').collect();
        if groups.len() != 3 {
            return Err(parse_err(line_no, "expected three `|`-separated coefficient groups"));
        }
        let mut rows = [CoeffVec::zero(1, ring); 3];
        for (g, (group, want)) in groups
            .iter()
            .zip([dims.u_len(), dims.v_len(), dims.w_len()])
            .enumerate()
        {
            let values: Vec<i64> = group
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<i64>()
                        .map_err(|_| parse_err(line_no, format!("invalid coefficient {tok:?}")))
                })
                .collect::<Result<_, _>>()?;
            if values.len() != want {
                return Err(parse_err(
                    line_no,
                    format!("group {} has {} coefficients, expected {want}", g + 1, values.len()),
                ));
            }
            rows[g] = CoeffVec::encode(&values, ring)
                .map_err(|e| parse_err(line_no, e.to_string()))?;
        }
        components.push(Component { u: rows[0], v: rows[1], w: rows[2] });
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(parse_err(line_no, format!("trailing data after {rank} component lines")));
    }
    Ok(Scheme::new(dims, ring, components)?)
}

/// Renders a scheme in the text format, bit-exact with what `parse_scheme`
/// accepts.
pub fn render_scheme(s: &Scheme) -> String {
    let d = s.dims();
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {} {} {}", d.m, d.n, d.p, s.rank(), s.ring().name());
    for c in s.components() {
        let row = |v: &CoeffVec| {
            v.decode().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        let _ = writeln!(out, "{} | {} | {}", row(&c.u), row(&c.v), row(&c.w));
    }
    out
}

/// Renders a lifted scheme in the extended format: the ring tag is the
/// coefficient classification (`zt`, `z` or `q`) and coefficients are
/// written as `a` or `a/b`.
pub fn render_rational_scheme(s: &crate::lift::RationalScheme) -> String {
    let d = s.dims();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} {} {} {}",
        d.m,
        d.n,
        d.p,
        s.rank(),
        s.classification().name()
    );
    let fmt = |c: &num_rational::BigRational| {
        if c.is_integer() {
            c.numer().to_string()
        } else {
            format!("{}/{}", c.numer(), c.denom())
        }
    };
    for l in 0..s.rank() {
        let (u, v, w) = s.component_rows(l);
        let row = |vals: &[num_rational::BigRational]| {
            vals.iter().map(fmt).collect::<Vec<_>>().join(" ")
        };
        let _ = writeln!(out, "{} | {} | {}", row(u), row(v), row(w));
    }
    out
}

pub fn read_scheme(path: impl AsRef<Path>) -> Result<Scheme, IoError> {
    let text = std::fs::read_to_string(path)?;
    parse_scheme(&text)
}

pub fn write_scheme(s: &Scheme, path: impl AsRef<Path>) -> Result<(), IoError> {
    std::fs::write(path, render_scheme(s))?;
    Ok(())
}
