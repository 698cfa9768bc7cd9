//! Line-oriented text format for closed invariants.
//!
//! ```text
//! genus <g>
//! topology euler=<int> sigma=<int>
//! class <token> k=<int> sq=<int>
//! coef <token> alpha=<U^a|1>[*e{i}...][*X:<label>...] poly=<exp:coef ...> [window=<lo>:<len>[:down]]
//! ```

use crate::error::{Error, Result};
use crate::fibersum::{AMonomial, ClassToken, ClosedInvariant};
use crate::groupring::{Completion, LaurentSeries};
use std::fmt::Write;

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn keyed<'a>(tok: Option<&'a str>, key: &str, line: usize) -> Result<&'a str> {
    tok.and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| perr(line, format!("expected `{key}=`")))
}

fn int(s: &str, line: usize) -> Result<i64> {
    s.parse().map_err(|_| perr(line, format!("bad integer `{s}`")))
}

fn parse_window(text: &str, series: LaurentSeries, line: usize) -> Result<LaurentSeries> {
    let parts: Vec<&str> = text.split(':').collect();
    let (lo, len, down) = match parts.as_slice() {
        [lo, len] => (int(lo, line)?, len, false),
        [lo, len, "down"] => (int(lo, line)?, len, true),
        _ => return Err(perr(line, format!("bad window `{text}`"))),
    };
    let len: usize = len.parse().map_err(|_| perr(line, format!("bad window length `{len}`")))?;
    if len == 0 {
        return Err(perr(line, "window length must be positive"));
    }
    let hi = lo + len as i64;
    if series.terms().any(|(e, _)| e < lo || e >= hi) {
        return Err(perr(line, "term outside the declared window"));
    }
    if down {
        let up = series.conjugate().with_window(1 - hi, len).map_err(|e| perr(line, e.to_string()))?;
        Ok(up.conjugate())
    } else {
        series.with_window(lo, len).map_err(|e| perr(line, e.to_string()))
    }
}

/// Parses an invariant file; `#` lines and blank lines are ignored.
pub fn parse_invariant(text: &str) -> Result<ClosedInvariant> {
    let mut inv: Option<ClosedInvariant> = None;
    let mut genus: Option<usize> = None;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut toks = t.split_whitespace();
        let head = toks.next().unwrap_or_default();
        match head {
            "genus" => {
                if genus.is_some() {
                    return Err(perr(line, "duplicate genus line"));
                }
                let g = toks.next().ok_or_else(|| perr(line, "missing genus"))?;
                let g: usize = g.parse().map_err(|_| perr(line, format!("bad genus `{g}`")))?;
                if g == 0 {
                    return Err(perr(line, "genus must be positive"));
                }
                genus = Some(g);
            }
            "topology" => {
                let g = genus.ok_or_else(|| perr(line, "topology before genus"))?;
                if inv.is_some() {
                    return Err(perr(line, "duplicate topology line"));
                }
                let e = int(keyed(toks.next(), "euler", line)?, line)?;
                let s = int(keyed(toks.next(), "sigma", line)?, line)?;
                inv = Some(ClosedInvariant::new(g, e, s)?);
            }
            "class" => {
                let inv = inv.as_mut().ok_or_else(|| perr(line, "class before topology"))?;
                let label = toks.next().ok_or_else(|| perr(line, "missing class token"))?;
                let k = int(keyed(toks.next(), "k", line)?, line)?;
                let sq = int(keyed(toks.next(), "sq", line)?, line)?;
                if inv.class(label).is_some() {
                    return Err(perr(line, format!("class `{label}` declared twice")));
                }
                inv.add_class(ClassToken::new(label, k, sq)).map_err(|e| perr(line, e.to_string()))?;
            }
            "coef" => {
                let inv = inv.as_mut().ok_or_else(|| perr(line, "coef before topology"))?;
                let token = toks.next().ok_or_else(|| perr(line, "missing class token"))?;
                if inv.class(token).is_none() {
                    return Err(perr(line, format!("undeclared class `{token}`")));
                }
                let alpha =
                    AMonomial::parse_text(keyed(toks.next(), "alpha", line)?, inv.genus).map_err(|m| perr(line, m))?;
                let first = keyed(toks.next(), "poly", line)?;
                let mut terms: Vec<&str> = Vec::new();
                if !first.is_empty() {
                    terms.push(first);
                }
                let mut window = None;
                for tok in toks {
                    if let Some(w) = tok.strip_prefix("window=") {
                        window = Some(w);
                    } else if window.is_some() {
                        return Err(perr(line, format!("unexpected `{tok}` after window")));
                    } else {
                        terms.push(tok);
                    }
                }
                if terms.is_empty() {
                    return Err(perr(line, "empty poly"));
                }
                let mut series = LaurentSeries::parse_text(&terms.join(" ")).map_err(|e| perr(line, e.to_string()))?;
                if let Some(w) = window {
                    series = parse_window(w, series, line)?;
                }
                if !inv.get(token, &alpha).is_zero() {
                    return Err(perr(line, format!("duplicate coefficient for `{token}` at {alpha}")));
                }
                inv.add_entry(token, alpha, series).map_err(|e| perr(line, e.to_string()))?;
            }
            other => return Err(perr(line, format!("unknown directive `{other}`"))),
        }
    }
    inv.ok_or_else(|| perr(text.lines().count().max(1), "missing genus or topology line"))
}

/// Canonical text; `parse_invariant(print_invariant(x)) == x`.
pub fn print_invariant(inv: &ClosedInvariant) -> String {
    let mut out = String::new();
    writeln!(out, "genus {}", inv.genus).unwrap();
    writeln!(out, "topology euler={} sigma={}", inv.euler, inv.signature).unwrap();
    for c in inv.classes() {
        writeln!(out, "class {} k={} sq={}", c.label, c.k, c.sq).unwrap();
    }
    for e in inv.entries() {
        write!(out, "coef {} alpha={} poly={}", e.token, e.alpha, e.series.to_text()).unwrap();
        if let Some(w) = e.series.window() {
            match w.dir {
                Completion::Up => write!(out, " window={}:{}", w.lo, w.len).unwrap(),
                Completion::Down => write!(out, " window={}:{}:down", w.lo, w.len).unwrap(),
            }
        }
        out.push('\n');
    }
    out
}
