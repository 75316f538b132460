//! Plain-text instance formats. Blank lines and `#` comments are skipped.
//!
//! ```text
//! coverage n U      then n lines of item indices ("-" for an empty set)
//! facility n m      then n rows of m nonnegative reals
//! modular n         then one line of n weights
//! partition n h     then h lines "budget elem elem ..."
//! graphic V E       then E lines "u v"
//! ```
//!
//! An instance file is an objective block followed by a matroid block.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matroid::{GraphicMatroid, MatroidInstance, PartitionMatroid};
use crate::oracle::{CoverageObjective, FacilityLocationObjective, ModularObjective, SetFunction};

#[derive(Clone, Debug)]
pub enum Objective {
    Coverage(CoverageObjective),
    Facility(FacilityLocationObjective),
    Modular(ModularObjective),
}

impl Objective {
    pub fn kind(&self) -> &'static str {
        match self {
            Objective::Coverage(_) => "coverage",
            Objective::Facility(_) => "facility",
            Objective::Modular(_) => "modular",
        }
    }

    pub fn ground_size(&self) -> usize {
        self.function().ground_size()
    }

    pub fn function(&self) -> &dyn SetFunction {
        match self {
            Objective::Coverage(f) => f,
            Objective::Facility(f) => f,
            Objective::Modular(f) => f,
        }
    }

    pub fn into_function(self) -> Arc<dyn SetFunction> {
        match self {
            Objective::Coverage(f) => Arc::new(f),
            Objective::Facility(f) => Arc::new(f),
            Objective::Modular(f) => Arc::new(f),
        }
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if !tokens.is_empty() {
                return Some((i + 1, tokens));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        let last = self.last;
        self.next().ok_or_else(|| Error::Parse {
            line: last + 1,
            msg: format!("unexpected end of input, expected {what}"),
        })
    }

    fn finish(&mut self) -> Result<()> {
        match self.next() {
            None => Ok(()),
            Some((line, _)) => Err(parse_err(line, "unexpected trailing content")),
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn num<T: FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} {tok:?}")))
}

fn header<'a>(line: usize, tokens: &[&'a str], want: usize) -> Result<(&'a str, Vec<usize>)> {
    if tokens.len() != want + 1 {
        return Err(parse_err(
            line,
            format!("header {:?} takes {want} numbers, got {}", tokens[0], tokens.len() - 1),
        ));
    }
    let nums = tokens[1..]
        .iter()
        .map(|t| num(line, t, "count"))
        .collect::<Result<_>>()?;
    Ok((tokens[0], nums))
}

fn read_objective(lines: &mut Lines<'_>) -> Result<Objective> {
    let (at, tokens) = lines.expect("an objective header")?;
    let wrap = |e: Error| parse_err(at, e.to_string());
    match tokens[0] {
        "coverage" => {
            let (_, h) = header(at, &tokens, 2)?;
            let mut sets = Vec::with_capacity(h[0]);
            for _ in 0..h[0] {
                let (line, row) = lines.expect("a coverage set")?;
                if row == ["-"] {
                    sets.push(Vec::new());
                    continue;
                }
                let set = row
                    .iter()
                    .map(|t| num(line, t, "item"))
                    .collect::<Result<Vec<usize>>>()?;
                if let Some(u) = set.iter().find(|&&u| u >= h[1]) {
                    return Err(parse_err(line, format!("item {u} outside universe of size {}", h[1])));
                }
                sets.push(set);
            }
            CoverageObjective::new(h[1], sets)
                .map(Objective::Coverage)
                .map_err(wrap)
        }
        "facility" => {
            let (_, h) = header(at, &tokens, 2)?;
            let mut gains = Vec::with_capacity(h[0] * h[1]);
            for _ in 0..h[0] {
                let (line, row) = lines.expect("a facility row")?;
                if row.len() != h[1] {
                    return Err(parse_err(line, format!("expected {} gains, got {}", h[1], row.len())));
                }
                for t in row {
                    gains.push(num::<f64>(line, t, "gain")?);
                }
            }
            FacilityLocationObjective::new(h[0], h[1], gains)
                .map(Objective::Facility)
                .map_err(wrap)
        }
        "modular" => {
            let (_, h) = header(at, &tokens, 1)?;
            let weights = if h[0] == 0 {
                Vec::new()
            } else {
                let (line, row) = lines.expect("a weight row")?;
                if row.len() != h[0] {
                    return Err(parse_err(line, format!("expected {} weights, got {}", h[0], row.len())));
                }
                row.iter().map(|t| num(line, t, "weight")).collect::<Result<_>>()?
            };
            ModularObjective::new(weights).map(Objective::Modular).map_err(wrap)
        }
        other => Err(parse_err(at, format!("unknown objective {other:?}"))),
    }
}

fn read_matroid(lines: &mut Lines<'_>) -> Result<MatroidInstance> {
    let (at, tokens) = lines.expect("a matroid header")?;
    let wrap = |e: Error| parse_err(at, e.to_string());
    match tokens[0] {
        "partition" => {
            let (_, h) = header(at, &tokens, 2)?;
            let mut parts = Vec::with_capacity(h[1]);
            for _ in 0..h[1] {
                let (line, row) = lines.expect("a part")?;
                let budget = num(line, row[0], "budget")?;
                let elems = row[1..]
                    .iter()
                    .map(|t| num(line, t, "element"))
                    .collect::<Result<_>>()?;
                parts.push((budget, elems));
            }
            PartitionMatroid::from_parts(h[0], parts).map(Into::into).map_err(wrap)
        }
        "graphic" => {
            let (_, h) = header(at, &tokens, 2)?;
            let mut edges = Vec::with_capacity(h[1]);
            for _ in 0..h[1] {
                let (line, row) = lines.expect("an edge")?;
                if row.len() != 2 {
                    return Err(parse_err(line, "an edge is two vertices"));
                }
                edges.push((num(line, row[0], "vertex")?, num(line, row[1], "vertex")?));
            }
            GraphicMatroid::new(h[0], edges).map(Into::into).map_err(wrap)
        }
        other => Err(parse_err(at, format!("unknown matroid {other:?}"))),
    }
}

pub fn parse_objective(text: &str) -> Result<Objective> {
    let mut lines = Lines::new(text);
    let obj = read_objective(&mut lines)?;
    lines.finish()?;
    Ok(obj)
}

pub fn parse_matroid(text: &str) -> Result<MatroidInstance> {
    let mut lines = Lines::new(text);
    let m = read_matroid(&mut lines)?;
    lines.finish()?;
    Ok(m)
}

/// An objective block followed by a matroid block over the same ground set.
pub fn parse_instance(text: &str) -> Result<(Objective, MatroidInstance)> {
    let mut lines = Lines::new(text);
    let obj = read_objective(&mut lines)?;
    let at = lines.last + 1;
    let m = read_matroid(&mut lines)?;
    lines.finish()?;
    if obj.ground_size() != m.ground_size() {
        return Err(parse_err(
            at,
            format!(
                "objective has {} elements, matroid has {}",
                obj.ground_size(),
                m.ground_size()
            ),
        ));
    }
    Ok((obj, m))
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_objective(obj: &Objective) -> String {
    let mut out = String::new();
    match obj {
        Objective::Coverage(f) => {
            let n = f.ground_size();
            writeln!(out, "coverage {n} {}", f.universe_size()).unwrap();
            for e in 0..n {
                let set = f.set(e);
                let line = if set.is_empty() { "-".to_string() } else { join(set) };
                writeln!(out, "{line}").unwrap();
            }
        }
        Objective::Facility(f) => {
            let n = f.ground_size();
            writeln!(out, "facility {n} {}", f.clients()).unwrap();
            for e in 0..n {
                writeln!(out, "{}", join(f.row(e))).unwrap();
            }
        }
        Objective::Modular(f) => {
            writeln!(out, "modular {}", f.weights().len()).unwrap();
            if !f.weights().is_empty() {
                writeln!(out, "{}", join(f.weights())).unwrap();
            }
        }
    }
    out
}

pub fn write_matroid(m: &MatroidInstance) -> String {
    let mut out = String::new();
    match m {
        MatroidInstance::Partition(p) => {
            writeln!(out, "partition {} {}", p.ground_size(), p.budgets().len()).unwrap();
            for (b, part) in p.budgets().iter().zip(p.parts()) {
                writeln!(out, "{}", join(std::iter::once(b).chain(part))).unwrap();
            }
        }
        MatroidInstance::Graphic(g) => {
            writeln!(out, "graphic {} {}", g.vertices(), g.ground_size()).unwrap();
            for &(u, v) in g.edges() {
                writeln!(out, "{u} {v}").unwrap();
            }
        }
    }
    out
}

pub fn write_instance(obj: &Objective, m: &MatroidInstance) -> String {
    write_objective(obj) + &write_matroid(m)
}
