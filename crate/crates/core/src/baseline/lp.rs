//! LP-format export and a reader for the subset of the format the writer
//! produces (plus the common spellings of section keywords).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{MilpModel, Sense};
use crate::error::{Error, Result};

/// Terms per output line; keeps lines far below the 510-character limit
/// some readers impose.
const TERMS_PER_LINE: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct LpConstraint {
    pub name: String,
    pub terms: Vec<(String, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Name-level view of a linear program.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpProblem {
    pub minimize: bool,
    pub objective: Vec<(String, f64)>,
    pub constraints: Vec<LpConstraint>,
    pub bounds: BTreeMap<String, (Option<f64>, Option<f64>)>,
    pub binaries: Vec<String>,
    pub generals: Vec<String>,
}

impl LpProblem {
    pub fn from_model(model: &MilpModel) -> Self {
        let (lo, hi) = model.order_bounds();
        Self {
            minimize: true,
            objective: model.objective.iter().map(|(v, c)| (v.to_string(), *c)).collect(),
            constraints: model
                .constraints
                .iter()
                .map(|c| LpConstraint {
                    name: c.name.clone(),
                    terms: c.terms.iter().map(|(v, a)| (v.to_string(), *a)).collect(),
                    sense: c.sense,
                    rhs: c.rhs,
                })
                .collect(),
            bounds: model.integers().map(|v| (v.to_string(), (Some(lo), Some(hi)))).collect(),
            binaries: model.binaries().map(|v| v.to_string()).collect(),
            generals: model.integers().map(|v| v.to_string()).collect(),
        }
    }
}

fn write_terms(out: &mut String, terms: &[(String, f64)]) {
    for (k, (name, coef)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let (sign, mag) = if *coef < 0.0 { ("-", -coef) } else { ("+", *coef) };
        if k > 0 || sign == "-" {
            let _ = write!(out, " {sign}");
        }
        if mag == 1.0 {
            let _ = write!(out, " {name}");
        } else {
            let _ = write!(out, " {mag} {name}");
        }
    }
}

fn write_problem(p: &LpProblem, header: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ {header}");
    out.push_str(if p.minimize { "Minimize\n" } else { "Maximize\n" });
    out.push_str(" obj:");
    write_terms(&mut out, &p.objective);
    out.push_str("\nSubject To\n");
    for c in &p.constraints {
        let _ = write!(out, " {}:", c.name);
        write_terms(&mut out, &c.terms);
        let _ = writeln!(out, " {} {}", c.sense.symbol(), c.rhs);
    }
    if !p.bounds.is_empty() {
        out.push_str("Bounds\n");
        for (name, bound) in &p.bounds {
            let _ = match bound {
                (Some(lo), Some(hi)) => writeln!(out, " {lo} <= {name} <= {hi}"),
                (Some(lo), None) => writeln!(out, " {name} >= {lo}"),
                (None, Some(hi)) => writeln!(out, " {name} <= {hi}"),
                (None, None) => writeln!(out, " {name} free"),
            };
        }
    }
    for (title, names) in [("Binaries", &p.binaries), ("Generals", &p.generals)] {
        if names.is_empty() {
            continue;
        }
        let _ = writeln!(out, "{title}");
        for chunk in names.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

pub fn write_lp(model: &MilpModel) -> String {
    let header = format!(
        "mTSP with MTZ subtour elimination: {} tasks, {} robots, cap {}",
        model.task_count(),
        model.m,
        model.h
    );
    write_problem(&LpProblem::from_model(model), &header)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    Generals,
    End,
}

fn section_keyword(line: &str) -> Option<(Section, Option<bool>)> {
    let lower = line.trim().to_ascii_lowercase();
    match lower.as_str() {
        "minimize" | "minimise" | "min" => Some((Section::Objective, Some(true))),
        "maximize" | "maximise" | "max" => Some((Section::Objective, Some(false))),
        "subject to" | "such that" | "st" | "s.t." => Some((Section::Constraints, None)),
        "bounds" | "bound" => Some((Section::Bounds, None)),
        "binaries" | "binary" | "bin" => Some((Section::Binaries, None)),
        "generals" | "general" | "gen" => Some((Section::Generals, None)),
        "end" => Some((Section::End, None)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Name(String),
    Plus,
    Minus,
    Colon,
    Cmp(Sense),
}

fn tokenize(text: &str, context: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            _ if c.is_whitespace() => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            ':' => {
                out.push(Token::Colon);
                i += 1;
            }
            '<' | '>' | '=' => {
                let next = chars.get(i + 1).copied();
                let sense = match (c, next) {
                    ('<', _) | ('=', Some('<')) => Sense::Le,
                    ('>', _) | ('=', Some('>')) => Sense::Ge,
                    _ => Sense::Eq,
                };
                let two = matches!((c, next), ('<' | '>', Some('=')) | ('=', Some('<' | '>')));
                i += if two { 2 } else { 1 };
                out.push(Token::Cmp(sense));
            }
            _ if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() {
                    let d = chars[i];
                    let exp_sign = (d == '+' || d == '-') && matches!(chars[i - 1], 'e' | 'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let v = s.parse().map_err(|_| Error::parse(context, format!("bad number `{s}`")))?;
                out.push(Token::Num(v));
            }
            _ if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || "_.[]{}!\"#$%&(),;?@'`|~".contains(chars[i])) {
                    i += 1;
                }
                out.push(Token::Name(chars[start..i].iter().collect()));
            }
            _ => return Err(Error::parse(context, format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

/// Parses `[+|-] [coef] name` terms until a comparison or the end.
fn parse_terms(tokens: &[Token], mut at: usize, context: &str) -> Result<(Vec<(String, f64)>, usize)> {
    let mut terms = Vec::new();
    while at < tokens.len() && !matches!(tokens[at], Token::Cmp(_)) {
        let mut sign = 1.0;
        while let Some(tok @ (Token::Plus | Token::Minus)) = tokens.get(at) {
            if *tok == Token::Minus {
                sign = -sign;
            }
            at += 1;
        }
        let mut coef = 1.0;
        if let Some(Token::Num(v)) = tokens.get(at) {
            coef = *v;
            at += 1;
        }
        match tokens.get(at) {
            Some(Token::Name(name)) => {
                terms.push((name.clone(), sign * coef));
                at += 1;
            }
            other => return Err(Error::parse(context, format!("expected a variable, found {other:?}"))),
        }
    }
    Ok((terms, at))
}

fn parse_signed_number(tokens: &[Token], at: usize, context: &str) -> Result<(f64, usize)> {
    match (tokens.get(at), tokens.get(at + 1)) {
        (Some(Token::Num(v)), _) => Ok((*v, at + 1)),
        (Some(Token::Minus), Some(Token::Num(v))) => Ok((-v, at + 2)),
        (Some(Token::Plus), Some(Token::Num(v))) => Ok((*v, at + 2)),
        (Some(Token::Name(s)), _) if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") => {
            Ok((f64::INFINITY, at + 1))
        }
        (Some(Token::Minus), Some(Token::Name(s))) if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") => {
            Ok((f64::NEG_INFINITY, at + 2))
        }
        other => Err(Error::parse(context, format!("expected a number, found {other:?}"))),
    }
}

fn strip_label(tokens: &[Token]) -> (Option<String>, usize) {
    match (tokens.first(), tokens.get(1)) {
        (Some(Token::Name(n)), Some(Token::Colon)) => (Some(n.clone()), 2),
        _ => (None, 0),
    }
}

/// Parses LP text into a name-level problem.
pub fn parse_lp(text: &str) -> Result<LpProblem> {
    let mut problem = LpProblem { minimize: true, ..LpProblem::default() };
    let mut section = Section::Preamble;
    let mut objective_text = String::new();
    let mut constraint_text = String::new();
    let mut bound_lines = Vec::new();

    for raw in text.lines() {
        let line = raw.split('\\').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if let Some((next, sense)) = section_keyword(line) {
            section = next;
            if let Some(min) = sense {
                problem.minimize = min;
            }
            continue;
        }
        match section {
            Section::Preamble => return Err(Error::parse("lp", "content before the objective section")),
            Section::Objective => {
                objective_text.push(' ');
                objective_text.push_str(line);
            }
            Section::Constraints => {
                constraint_text.push(' ');
                constraint_text.push_str(line);
                constraint_text.push('\n');
            }
            Section::Bounds => bound_lines.push(line.to_string()),
            Section::Binaries => problem.binaries.extend(line.split_whitespace().map(str::to_string)),
            Section::Generals => problem.generals.extend(line.split_whitespace().map(str::to_string)),
            Section::End => return Err(Error::parse("lp", "content after End")),
        }
    }

    let tokens = tokenize(&objective_text, "objective")?;
    let (_, start) = strip_label(&tokens);
    let (objective, consumed) = parse_terms(&tokens, start, "objective")?;
    if consumed != tokens.len() {
        return Err(Error::parse("objective", "trailing tokens"));
    }
    problem.objective = objective;

    let tokens = tokenize(&constraint_text, "constraints")?;
    let mut at = 0;
    while at < tokens.len() {
        let (label, skip) = strip_label(&tokens[at..]);
        let name = label.unwrap_or_else(|| format!("c{}", problem.constraints.len() + 1));
        let context = format!("constraint {name}");
        let (terms, next) = parse_terms(&tokens, at + skip, &context)?;
        let sense = match tokens.get(next) {
            Some(Token::Cmp(s)) => *s,
            _ => return Err(Error::parse(context, "missing comparison")),
        };
        let (rhs, after) = parse_signed_number(&tokens, next + 1, &context)?;
        problem.constraints.push(LpConstraint { name, terms, sense, rhs });
        at = after;
    }

    for line in bound_lines {
        let tokens = tokenize(&line, "bounds")?;
        let mut lo = None;
        let mut hi = None;
        let name;
        if let Ok((v, at)) = parse_signed_number(&tokens, 0, "bounds") {
            // lo <= name [<= hi]
            let Some(Token::Name(n)) = tokens.get(at + 1) else {
                return Err(Error::parse("bounds", format!("cannot read `{}`", line.trim())));
            };
            name = n.clone();
            lo = Some(v);
            if let Some(Token::Cmp(_)) = tokens.get(at + 2) {
                hi = Some(parse_signed_number(&tokens, at + 3, "bounds")?.0);
            }
        } else {
            let Some(Token::Name(n)) = tokens.first() else {
                return Err(Error::parse("bounds", format!("cannot read `{}`", line.trim())));
            };
            name = n.clone();
            match tokens.get(1) {
                Some(Token::Cmp(Sense::Ge)) => lo = Some(parse_signed_number(&tokens, 2, "bounds")?.0),
                Some(Token::Cmp(Sense::Le)) => hi = Some(parse_signed_number(&tokens, 2, "bounds")?.0),
                Some(Token::Cmp(Sense::Eq)) => {
                    let v = parse_signed_number(&tokens, 2, "bounds")?.0;
                    lo = Some(v);
                    hi = Some(v);
                }
                Some(Token::Name(f)) if f.eq_ignore_ascii_case("free") => {}
                _ => return Err(Error::parse("bounds", format!("cannot read `{}`", line.trim()))),
            }
        }
        problem.bounds.insert(name, (lo, hi));
    }

    Ok(problem)
}
