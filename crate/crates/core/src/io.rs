//! File formats: parent arrays, degree histograms, master-equation tables.
//!
//! Parent arrays hold one record per non-root node; record `i` is the parent
//! of node `i + 1`. The text form is CSV with header `node,parent`, the binary
//! form is a bare sequence of little-endian `u32`.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::master_eq::QGrid;
use crate::observables::DegreeHistogram;
use crate::tree::GrowingTree;

/// Format with 9 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.8e}")
    }
}

/// Round to 9 significant digits, for numbers serialised as JSON.
pub fn round_sig(x: f64) -> f64 {
    fmt_sig(x).parse().unwrap_or(x)
}

pub fn write_parents_csv(tree: &GrowingTree, mut out: impl Write) -> io::Result<()> {
    let mut s = String::with_capacity(12 * tree.len());
    s.push_str("node,parent\n");
    for (i, p) in tree.parents().iter().enumerate() {
        let _ = writeln!(s, "{},{p}", i + 1);
    }
    out.write_all(s.as_bytes())
}

pub fn write_parents_binary(tree: &GrowingTree, mut out: impl Write) -> io::Result<()> {
    let bytes: Vec<u8> = tree.parents().iter().flat_map(|p| p.to_le_bytes()).collect();
    out.write_all(&bytes)
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn expect_header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, header: &str) -> Result<()> {
    match lines.next() {
        Some((_, h)) if h.replace(' ', "") == header => Ok(()),
        Some((line, h)) => Err(Error::parse(line, format!("expected header {header:?}, found {h:?}"))),
        None => Err(Error::parse(1, format!("missing header {header:?}"))),
    }
}

fn two_fields<T: std::str::FromStr, U: std::str::FromStr>(line: usize, row: &str) -> Result<(T, U)> {
    let mut it = row.split(',').map(str::trim);
    let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
        return Err(Error::parse(line, "expected exactly two fields"));
    };
    let a = a.parse().map_err(|_| Error::parse(line, format!("bad value {a:?}")))?;
    let b = b.parse().map_err(|_| Error::parse(line, format!("bad value {b:?}")))?;
    Ok((a, b))
}

/// Parse a `node,parent` CSV into a tree.
pub fn parse_parents_csv(text: &str) -> Result<GrowingTree> {
    let mut lines = data_lines(text);
    expect_header(&mut lines, "node,parent")?;
    let mut parents = Vec::new();
    for (line, row) in lines {
        let (node, parent): (u32, u32) = two_fields(line, row)?;
        if node as usize != parents.len() + 1 {
            return Err(Error::parse(line, format!("expected node {}, found {node}", parents.len() + 1)));
        }
        if parent >= node {
            return Err(Error::parse(line, format!("parent {parent} of node {node} is not older")));
        }
        parents.push(parent);
    }
    if parents.is_empty() {
        return Err(Error::parse(1, "no records"));
    }
    GrowingTree::from_parents(&parents)
}

/// Parse a little-endian `u32` parent array into a tree.
pub fn parse_parents_binary(bytes: &[u8]) -> Result<GrowingTree> {
    if bytes.is_empty() || bytes.len() % 4 != 0 {
        return Err(Error::parse(
            0,
            format!("binary parent array has {} bytes; need a positive multiple of 4", bytes.len()),
        ));
    }
    let parents: Vec<u32> = bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    if let Some((i, &p)) = parents.iter().enumerate().find(|&(i, &p)| p as usize > i) {
        return Err(Error::parse(i + 1, format!("parent {p} of node {} is not older", i + 1)));
    }
    GrowingTree::from_parents(&parents)
}

pub fn write_histogram_csv(hist: &DegreeHistogram, mut out: impl Write) -> io::Result<()> {
    let mut s = String::from("degree,count\n");
    for (d, c) in hist.iter() {
        let _ = writeln!(s, "{d},{c}");
    }
    out.write_all(s.as_bytes())
}

/// Parse a `degree,count` CSV with strictly ascending degrees.
pub fn parse_histogram_csv(text: &str) -> Result<DegreeHistogram> {
    let mut lines = data_lines(text);
    expect_header(&mut lines, "degree,count")?;
    let mut hist = DegreeHistogram::default();
    let mut last = 0u32;
    for (line, row) in lines {
        let (d, c): (u32, u64) = two_fields(line, row)?;
        if d <= last {
            return Err(Error::parse(line, "degrees must be positive and strictly ascending"));
        }
        if hist.n().checked_add(c).is_none() {
            return Err(Error::parse(line, "count overflow"));
        }
        last = d;
        hist.add(d, c);
    }
    Ok(hist)
}

/// `x,p_x` rows for `x = 1..`.
pub fn write_px_csv(p: &[f64], mut out: impl Write) -> io::Result<()> {
    let mut s = String::from("x,p_x\n");
    for (x, v) in p.iter().enumerate().skip(1) {
        let _ = writeln!(s, "{x},{}", fmt_sig(*v));
    }
    out.write_all(s.as_bytes())
}

/// `k,l,q` rows for every grid cell with `l >= 1`.
pub fn write_grid_csv(grid: &QGrid, mut out: impl Write) -> io::Result<()> {
    let mut s = String::from("k,l,q\n");
    for (k, l, q) in grid.cells().filter(|&(_, l, _)| l >= 1) {
        let _ = writeln!(s, "{k},{l},{}", fmt_sig(q));
    }
    out.write_all(s.as_bytes())
}
