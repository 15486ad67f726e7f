//! Versioned text format for caching sphere rules between runs.
//!
//! ```text
//! invlap-rule v1
//! n 3
//! kind product-gauss
//! seed -
//! size 8192
//! <weight> <ζ_1> ... <ζ_n>
//! ...
//! ```
//!
//! Numbers are written with 17 significant digits so a round trip is exact.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::kernel::SpherePoint;

use super::sphere::{SphereRule, SphereRuleKind};

pub const RULE_MAGIC: &str = "invlap-rule v1";

pub fn write_rule<W: Write>(rule: &SphereRule, mut out: W) -> Result<()> {
    writeln!(out, "{RULE_MAGIC}")?;
    writeln!(out, "n {}", rule.n())?;
    writeln!(out, "kind {}", rule.kind().as_str())?;
    match rule.seed() {
        Some(s) => writeln!(out, "seed {s}")?,
        None => writeln!(out, "seed -")?,
    }
    writeln!(out, "size {}", rule.len())?;
    for (z, w) in rule.iter() {
        write!(out, "{w:.16e}")?;
        for c in z.coords() {
            write!(out, " {c:.16e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn header_value<'a>(line: Option<(usize, String)>, key: &str, buf: &'a mut String) -> Result<(usize, &'a str)> {
    let (idx, text) = line.ok_or(Error::Parse { line: 0, msg: format!("missing `{key}` header") })?;
    *buf = text;
    let mut parts = buf.splitn(2, ' ');
    if parts.next() != Some(key) {
        return Err(Error::Parse { line: idx + 1, msg: format!("expected `{key}` header") });
    }
    Ok((idx + 1, parts.next().unwrap_or("").trim()))
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse { line, msg: format!("bad number `{s}`") })
}

pub fn read_rule<R: BufRead>(input: R) -> Result<SphereRule> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i, l)))
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, l)| !l.trim().is_empty());

    match lines.next() {
        Some((_, l)) if l.trim() == RULE_MAGIC => {}
        _ => return Err(Error::Parse { line: 1, msg: format!("expected `{RULE_MAGIC}`") }),
    }
    let mut buf = String::new();
    let (ln, v) = header_value(lines.next(), "n", &mut buf)?;
    let n: usize = parse_num(v, ln)?;
    let (ln, v) = header_value(lines.next(), "kind", &mut buf)?;
    let kind = SphereRuleKind::parse(v).ok_or(Error::Parse { line: ln, msg: format!("unknown rule kind `{v}`") })?;
    let (ln, v) = header_value(lines.next(), "seed", &mut buf)?;
    let seed = if v == "-" { None } else { Some(parse_num::<u64>(v, ln)?) };
    let (ln, v) = header_value(lines.next(), "size", &mut buf)?;
    let size: usize = parse_num(v, ln)?;

    let mut nodes = Vec::with_capacity(size);
    let mut weights = Vec::with_capacity(size);
    for (idx, text) in lines {
        let vals = text
            .split_whitespace()
            .map(|s| parse_num::<f64>(s, idx + 1))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != n + 1 {
            return Err(Error::Parse { line: idx + 1, msg: format!("expected {} columns, found {}", n + 1, vals.len()) });
        }
        weights.push(vals[0]);
        nodes.push(SpherePoint::new(vals[1..].to_vec()).map_err(|e| Error::Parse { line: idx + 1, msg: e.to_string() })?);
    }
    if nodes.len() != size {
        return Err(Error::Parse { line: 0, msg: format!("header says {size} nodes, found {}", nodes.len()) });
    }
    SphereRule::from_parts(n, nodes, weights, kind, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_sphere_rule;

    #[test]
    fn round_trip_is_exact() {
        for (n, size, seed) in [(2, 17, None), (3, 50, None), (4, 33, Some(9))] {
            let rule = build_sphere_rule(n, size, seed).unwrap();
            let mut buf = Vec::new();
            write_rule(&rule, &mut buf).unwrap();
            let back = read_rule(buf.as_slice()).unwrap();
            assert_eq!(back.kind(), rule.kind());
            assert_eq!(back.seed(), rule.seed());
            assert_eq!(back.weights(), rule.weights());
            for (a, b) in back.nodes().iter().zip(rule.nodes()) {
                for (x, y) in a.coords().iter().zip(b.coords()) {
                    assert!((x - y).abs() <= 2.0 * f64::EPSILON);
                }
            }
        }
    }

    #[test]
    fn malformed_input() {
        assert!(read_rule("nonsense\n".as_bytes()).is_err());
        let text = format!("{RULE_MAGIC}\nn 2\nkind circle-trapezoid\nseed -\nsize 2\n0.5 1 0\n0.5 -1\n");
        assert!(matches!(read_rule(text.as_bytes()), Err(Error::Parse { line: 7, .. })));
        let text = format!("{RULE_MAGIC}\nn 2\nkind circle-trapezoid\nseed -\nsize 3\n0.5 1 0\n0.5 -1 0\n");
        assert!(read_rule(text.as_bytes()).is_err());
    }
}
