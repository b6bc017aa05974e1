//! Line-oriented text formats for PL actions and nesting witnesses. Blank
//! lines and text after `#` are ignored; tokens are whitespace separated.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::exact_pl::rational::{fmt_rational, parse_rational};
use crate::exact_pl::{GenSet, Interval, PLHomeo};
use crate::regularity::{NestingWitness, WitnessMap};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

/// Decimal with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError { line, message: message.into() })
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let body = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn parse_map(line: usize, toks: &[&str]) -> Result<PLHomeo, FormatError> {
    let pts = toks
        .iter()
        .map(|t| {
            let (x, y) = t.split_once(':').ok_or(FormatError { line, message: format!("expected x:y, got {t:?}") })?;
            let p = |s: &str| parse_rational(s).map_err(|e| FormatError { line, message: e.to_string() });
            Ok((p(x)?, p(y)?))
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    PLHomeo::new(pts).map_err(|e| FormatError { line, message: e.to_string() })
}

fn write_map(map: &PLHomeo) -> String {
    map.breakpoints()
        .iter()
        .map(|(x, y)| format!("{}:{}", fmt_rational(x), fmt_rational(y)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn check_name(line: usize, name: &str) -> Result<(), FormatError> {
    if name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '+') {
        Ok(())
    } else {
        err(line, format!("bad name {name:?}"))
    }
}

/// A named generating set with a word budget.
///
/// ```text
/// action <name>
/// budget <n>
/// gen <name> <x>:<y> <x>:<y> ...
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionFile {
    pub name: String,
    pub budget: usize,
    pub generators: GenSet,
}

impl ActionFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let (mut name, mut budget, mut generators) = (None, None, GenSet::new());
        for (line, toks) in lines(text) {
            match toks[0] {
                "action" if toks.len() == 2 => name = Some(toks[1].to_string()),
                "budget" if toks.len() == 2 => {
                    budget = Some(
                        toks[1]
                            .parse()
                            .map_err(|_| FormatError { line, message: format!("bad budget {:?}", toks[1]) })?,
                    )
                }
                "gen" if toks.len() >= 4 => {
                    check_name(line, toks[1])?;
                    if generators.insert(toks[1].to_string(), parse_map(line, &toks[2..])?).is_some() {
                        return err(line, format!("duplicate generator {:?}", toks[1]));
                    }
                }
                _ => return err(line, format!("unrecognized record {:?}", toks.join(" "))),
            }
        }
        if generators.is_empty() {
            return err(0, "no generators");
        }
        Ok(ActionFile { name: name.unwrap_or_else(|| "action".into()), budget: budget.unwrap_or(1), generators })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("action {}\nbudget {}\n", self.name, self.budget);
        for (n, g) in &self.generators {
            let _ = writeln!(s, "gen {n} {}", write_map(g));
        }
        s
    }
}

/// A (k, u)-nesting witness over PL maps.
///
/// ```text
/// witness <name>
/// u <real>
/// map <name> <x>:<y> ...
/// interval <lo> <hi>             # J₁, J₂, … in order
/// sequence [cyclic] <map> ...    # s₁, s₂, …
/// cert <level> <map>             # default certificate for level i
/// cert <level> <map> at <step>   # override at step n
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessFile {
    pub name: String,
    pub witness: NestingWitness,
}

impl WitnessFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut name = "witness".to_string();
        let mut u = None;
        let mut maps: Vec<(String, PLHomeo)> = Vec::new();
        let mut intervals = Vec::new();
        let mut sequence: Option<(bool, Vec<String>, usize)> = None;
        let mut certs: Vec<(usize, usize, String, Option<usize>)> = Vec::new();
        for (line, toks) in lines(text) {
            let bad_num = |t: &str| FormatError { line, message: format!("bad number {t:?}") };
            match toks[0] {
                "witness" if toks.len() == 2 => name = toks[1].to_string(),
                "u" if toks.len() == 2 => u = Some(toks[1].parse::<f64>().map_err(|_| bad_num(toks[1]))?),
                "map" if toks.len() >= 4 => {
                    check_name(line, toks[1])?;
                    if maps.iter().any(|(n, _)| n == toks[1]) {
                        return err(line, format!("duplicate map {:?}", toks[1]));
                    }
                    maps.push((toks[1].to_string(), parse_map(line, &toks[2..])?));
                }
                "interval" if toks.len() == 3 => {
                    let p = |s: &str| parse_rational(s).map_err(|e| FormatError { line, message: e.to_string() });
                    let j = Interval::open(p(toks[1])?, p(toks[2])?)
                        .map_err(|e| FormatError { line, message: e.to_string() })?;
                    intervals.push(j);
                }
                "sequence" => {
                    let cyclic = toks.get(1) == Some(&"cyclic");
                    let names = toks[1 + cyclic as usize..].iter().map(|s| s.to_string()).collect();
                    sequence = Some((cyclic, names, line));
                }
                "cert" if toks.len() == 3 || (toks.len() == 5 && toks[3] == "at") => {
                    let level = toks[1].parse().map_err(|_| bad_num(toks[1]))?;
                    let step =
                        if toks.len() == 5 { Some(toks[4].parse().map_err(|_| bad_num(toks[4]))?) } else { None };
                    certs.push((line, level, toks[2].to_string(), step));
                }
                _ => return err(line, format!("unrecognized record {:?}", toks.join(" "))),
            }
        }
        let index = |line: usize, n: &str| {
            maps.iter().position(|(m, _)| m == n).ok_or(FormatError { line, message: format!("unknown map {n:?}") })
        };
        let (cyclic, seq_names, seq_line) = sequence.unwrap_or((false, Vec::new(), 0));
        let seq = seq_names.iter().map(|n| index(seq_line, n)).collect::<Result<Vec<_>, _>>()?;
        let mut defaults = BTreeMap::new();
        let mut overrides = BTreeMap::new();
        for (line, level, m, step) in &certs {
            let s = index(*line, m)?;
            match step {
                Some(n) => overrides.insert((*n, *level), s),
                None => defaults.insert(*level, s),
            };
        }
        let witness = NestingWitness::new(
            maps.into_iter().map(|(n, g)| WitnessMap::pl(n, g)).collect(),
            intervals,
            u.unwrap_or(1.0),
            seq,
            cyclic,
            defaults,
            overrides,
        )
        .map_err(|e| FormatError { line: 0, message: e.to_string() })?;
        Ok(WitnessFile { name, witness })
    }

    /// Fails if some map is not PL.
    pub fn to_text(&self) -> Option<String> {
        let w = &self.witness;
        let names: Vec<&str> = w.maps().iter().map(|m| m.name.as_str()).collect();
        let mut s = format!("witness {}\nu {}\n", self.name, fmt_real(w.u()));
        for m in w.maps() {
            let _ = writeln!(s, "map {} {}", m.name, write_map(m.as_pl()?));
        }
        for j in w.intervals() {
            let _ = writeln!(s, "interval {} {}", fmt_rational(j.lo()), fmt_rational(j.hi()));
        }
        let seq: Vec<&str> = w.sequence().iter().map(|&i| names[i]).collect();
        let _ = writeln!(s, "sequence{} {}", if w.is_cyclic() { " cyclic" } else { "" }, seq.join(" "));
        for (level, &m) in w.default_certificates() {
            let _ = writeln!(s, "cert {level} {}", names[m]);
        }
        for (&(n, level), &m) in w.certificate_overrides() {
            let _ = writeln!(s, "cert {level} {} at {n}", names[m]);
        }
        Some(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_pl::standard_genset;

    #[test]
    fn action_file_round_trips() {
        let a = ActionFile { name: "thompson".into(), budget: 3, generators: standard_genset() };
        let text = a.to_text();
        let b = ActionFile::parse(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.to_text(), text);
    }

    #[test]
    fn action_file_accepts_comments_and_decimals() {
        let a = ActionFile::parse("# two bumps\nbudget 2\ngen f 0:0 0.5:0.625 3/4:3/4 1:1  # f\n").unwrap();
        assert_eq!(a.budget, 2);
        assert_eq!(a.generators.len(), 1);
    }

    #[test]
    fn malformed_action_files_report_the_line() {
        let e = ActionFile::parse("budget 2\ngen f 0:0 1/2:3/4 1/4:1/4 1:1\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(ActionFile::parse("gen f 0:0 1:1\nfoo\n").unwrap_err().line, 2);
        assert!(ActionFile::parse("budget 2\n").is_err());
    }

    #[test]
    fn witness_file_round_trips() {
        let w = crate::dynamics::translation_example_witness(12).with_override(3, 2, 0).unwrap();
        let f = WitnessFile { name: "translation".into(), witness: w };
        let text = f.to_text().unwrap();
        let g = WitnessFile::parse(&text).unwrap();
        assert_eq!(g.to_text().unwrap(), text);
        assert_eq!(g.witness.certificate(3, 2), Some(0));
        assert_eq!(g.witness.certificate(4, 2), Some(1));
    }
}
