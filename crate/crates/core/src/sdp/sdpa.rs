//! SDPA sparse format (`.dat-s`).
//!
//! SDPA reads `minimize c·x s.t. Σ F_i x_i − F_0 ⪰ 0`, so our `F_0` is written
//! negated. Linear equalities `a·x = c` are written as a trailing diagonal
//! block holding `a·x − c ≥ 0` in its first half and `c − a·x ≥ 0` in its
//! second half; the reader turns such a trailing block back into equalities.

use std::fmt::Write as _;
use std::path::Path;

use super::{BlockKind, LinearEquality, LmiBlock, LmiProblem, SymSparse};
use crate::error::{Error, Result};

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// `(matrix, row, col, value)`, all 0-based.
type Entry = (usize, usize, usize, f64);

/// Renders the problem in SDPA sparse format.
pub fn to_sdpa_string(problem: &LmiProblem) -> String {
    let mut blocks: Vec<(usize, BlockKind, Vec<Entry>)> = Vec::new();
    for blk in &problem.blocks {
        let mut entries = Vec::new();
        for (i, j, v) in blk.f0.iter() {
            entries.push((0, i, j, -v));
        }
        for (&k, f) in &blk.coeffs {
            for (i, j, v) in f.iter() {
                entries.push((k + 1, i, j, v));
            }
        }
        blocks.push((blk.dim, blk.kind, entries));
    }
    let p = problem.equalities.len();
    if p > 0 {
        let mut entries = Vec::new();
        for (q, e) in problem.equalities.iter().enumerate() {
            if e.rhs != 0.0 {
                entries.push((0, q, q, e.rhs));
                entries.push((0, p + q, p + q, -e.rhs));
            }
            let mut merged = std::collections::BTreeMap::new();
            for &(k, a) in &e.coeffs {
                *merged.entry(k).or_insert(0.0) += a;
            }
            for (k, a) in merged {
                entries.push((k + 1, q, q, a));
                entries.push((k + 1, p + q, p + q, -a));
            }
        }
        blocks.push((2 * p, BlockKind::Diagonal, entries));
    }

    let mut out = String::new();
    let _ = writeln!(out, "{}", problem.m);
    let _ = writeln!(out, "{}", blocks.len());
    let sizes: Vec<String> = blocks
        .iter()
        .map(|(d, kind, _)| match kind {
            BlockKind::Dense => d.to_string(),
            BlockKind::Diagonal => format!("-{d}"),
        })
        .collect();
    let _ = writeln!(out, "{}", sizes.join(" "));
    let obj: Vec<String> = problem.b.iter().map(|&v| num(v)).collect();
    let _ = writeln!(out, "{}", obj.join(" "));
    for (bno, (_, _, mut entries)) in blocks.into_iter().enumerate() {
        entries.sort_by_key(|&(mat, i, j, _)| (mat, i, j));
        for (mat, i, j, v) in entries.into_iter().filter(|e| e.3 != 0.0) {
            let _ = writeln!(out, "{mat} {} {} {} {}", bno + 1, i + 1, j + 1, num(v));
        }
    }
    out
}

pub fn export_sdpa(problem: &LmiProblem, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_sdpa_string(problem))?;
    Ok(())
}

pub fn import_sdpa(path: impl AsRef<Path>) -> Result<LmiProblem> {
    parse_sdpa(&std::fs::read_to_string(path)?)
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || matches!(c, ',' | '{' | '}' | '(' | ')'))
        .filter(|t| !t.is_empty())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    tok.parse::<T>().map_err(|e| parse_err(line, format!("{tok:?}: {e}")))
}

/// Parses SDPA sparse text.
pub fn parse_sdpa(text: &str) -> Result<LmiProblem> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .skip_while(|(_, l)| l.starts_with('"') || l.starts_with('*'))
        .peekable();
    let last_line = text.lines().count();
    let mut next_line = |what: &str| {
        lines
            .next()
            .ok_or_else(|| parse_err(last_line + 1, format!("unexpected end of file, expected {what}")))
    };

    let (ln, l) = next_line("the variable count")?;
    let m: usize = parse_num(tokens(l).next().ok_or_else(|| parse_err(ln, "missing m"))?, ln)?;
    let (ln, l) = next_line("the block count")?;
    let nblocks: usize =
        parse_num(tokens(l).next().ok_or_else(|| parse_err(ln, "missing nBLOCK"))?, ln)?;

    let mut sizes: Vec<i64> = Vec::new();
    while sizes.len() < nblocks {
        let (ln, l) = next_line("block sizes")?;
        for t in tokens(l) {
            let s: i64 = parse_num(t, ln)?;
            if s == 0 {
                return Err(parse_err(ln, "block size 0"));
            }
            sizes.push(s);
        }
        if sizes.len() > nblocks {
            return Err(parse_err(ln, format!("expected {nblocks} block sizes, got {}", sizes.len())));
        }
    }

    let mut b: Vec<f64> = Vec::new();
    while b.len() < m {
        let (ln, l) = next_line("objective coefficients")?;
        for t in tokens(l) {
            b.push(parse_num(t, ln)?);
        }
        if b.len() > m {
            return Err(parse_err(ln, format!("expected {m} objective coefficients, got {}", b.len())));
        }
    }

    let mut blocks: Vec<LmiBlock> = sizes
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let kind = if s < 0 { BlockKind::Diagonal } else { BlockKind::Dense };
            LmiBlock::new(s.unsigned_abs() as usize, kind, format!("block{}", k + 1))
        })
        .collect();

    for (ln, l) in lines {
        let t: Vec<&str> = tokens(l).collect();
        if t.len() != 5 {
            return Err(parse_err(ln, format!("expected `matno blockno i j value`, got {} fields", t.len())));
        }
        let mat: usize = parse_num(t[0], ln)?;
        let bno: usize = parse_num(t[1], ln)?;
        let i: usize = parse_num(t[2], ln)?;
        let j: usize = parse_num(t[3], ln)?;
        let v: f64 = parse_num(t[4], ln)?;
        if mat > m {
            return Err(parse_err(ln, format!("matrix number {mat} exceeds m = {m}")));
        }
        if bno == 0 || bno > nblocks {
            return Err(parse_err(ln, format!("block number {bno} out of range 1..={nblocks}")));
        }
        let blk = &mut blocks[bno - 1];
        if i == 0 || j == 0 || i > blk.dim || j > blk.dim {
            return Err(parse_err(ln, format!("entry ({i}, {j}) outside block of size {}", blk.dim)));
        }
        if blk.kind == BlockKind::Diagonal && i != j {
            return Err(parse_err(ln, "off-diagonal entry in a diagonal block"));
        }
        if mat == 0 {
            blk.add(None, i - 1, j - 1, -v);
        } else {
            blk.add(Some(mat - 1), i - 1, j - 1, v);
        }
    }

    let mut problem = LmiProblem { m, b, blocks, equalities: Vec::new() };
    if let Some(eqs) = problem.blocks.last().and_then(equality_pairs) {
        problem.blocks.pop();
        problem.equalities = eqs;
    }
    Ok(problem)
}

/// Recognizes a diagonal block whose second half negates its first half.
fn equality_pairs(blk: &LmiBlock) -> Option<Vec<LinearEquality>> {
    if blk.kind != BlockKind::Diagonal || !blk.dim.is_multiple_of(2) {
        return None;
    }
    let p = blk.dim / 2;
    let mirrored = |f: &SymSparse| (0..p).all(|q| f.get(q, q) == -f.get(p + q, p + q));
    if !mirrored(&blk.f0) || !blk.coeffs.values().all(mirrored) {
        return None;
    }
    let eqs = (0..p)
        .map(|q| LinearEquality {
            coeffs: blk
                .coeffs
                .iter()
                .filter_map(|(&k, f)| {
                    let a = f.get(q, q);
                    (a != 0.0).then_some((k, a))
                })
                .collect(),
            rhs: -blk.f0.get(q, q),
        })
        .collect();
    Some(eqs)
}
