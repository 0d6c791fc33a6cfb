//! Deterministic LP text: header comments with the model tags, then
//! `Minimize`, `Subject To`, `Bounds`, `Binary`, `General`, `End`.
//! Every variable appears in `Bounds` in declaration order, which is
//! what makes [`parse_lp`] an exact inverse of [`export_lp`].

use std::fmt::Write as _;

use crate::error::{OmtError, Result};

use super::model::*;

/// Up to 12 significant digits, shortest form.
pub fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        return "+inf".into();
    }
    if v == f64::NEG_INFINITY {
        return "-inf".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("float text");
    format!("{rounded}")
}

fn write_expr(out: &mut String, model: &MilpModel, terms: &[(usize, f64)]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (k, &(v, a)) in terms.iter().enumerate() {
        let name = &model.variables[v].name;
        let sign = if a < 0.0 { "-" } else { "+" };
        if k == 0 {
            out.push(' ');
            if a < 0.0 {
                out.push_str("- ");
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        let mag = a.abs();
        if mag == 1.0 {
            out.push_str(name);
        } else {
            let _ = write!(out, "{} {name}", fmt_num(mag));
        }
    }
}

pub fn export_lp(model: &MilpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ model {}", model.name);
    let _ = writeln!(out, "\\ family {}", model.family);
    let _ = writeln!(out, "\\ sorting {}", model.sorting);
    let _ = writeln!(out, "\\ tree {}", model.tree.map(|t| t.to_string()).unwrap_or_else(|| "NONE".into()));
    let _ = writeln!(out, "\\ n {} p {}", model.n, model.p);
    let _ = writeln!(out, "\\ relaxed {}", model.relaxed);
    if let Some(lazy) = model.lazy {
        let _ = writeln!(out, "\\ lazy {lazy}");
        match lazy {
            LazyFamily::Subtour => {
                let _ = writeln!(out, "\\   sum_{{(i,j) in E(S)}} z_i_j <= |S| - 1 for every nonempty S, added by separation");
            }
            LazyFamily::ConnectionCut => {
                let _ = writeln!(out, "\\   sum_{{cut(S)}} (x_i_j + x_j_i + z_i_j) >= 1 for every proper S, added by separation");
            }
        }
    }
    out.push_str("Minimize\n obj:");
    write_expr(&mut out, model, &model.objective);
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.name);
        write_expr(&mut out, model, &c.terms);
        let _ = writeln!(out, " {} {}", c.sense.as_str(), fmt_num(c.rhs));
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        let _ = writeln!(out, " {} <= {} <= {}", fmt_num(v.lower), v.name, fmt_num(v.upper));
    }
    out.push_str("Binary\n");
    for v in model.variables.iter().filter(|v| v.vtype == VarType::Binary) {
        let _ = writeln!(out, " {}", v.name);
    }
    out.push_str("General\n");
    for v in model.variables.iter().filter(|v| v.vtype == VarType::Integer) {
        let _ = writeln!(out, " {}", v.name);
    }
    out.push_str("End\n");
    out
}

fn perr(line: usize, msg: impl Into<String>) -> OmtError {
    OmtError::Parse { line, msg: msg.into() }
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    match tok {
        "+inf" | "inf" | "+infinity" | "infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => tok.parse().map_err(|_| perr(line, format!("bad number `{tok}`"))),
    }
}

/// Linear expression as (name, coefficient) pairs.
fn parse_expr(toks: &[&str], line: usize) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    let mut k = 0;
    if toks == ["0"] {
        return Ok(out);
    }
    while k < toks.len() {
        let mut sign = 1.0;
        if toks[k] == "+" || toks[k] == "-" {
            if toks[k] == "-" {
                sign = -1.0;
            }
            k += 1;
        }
        let tok = *toks.get(k).ok_or_else(|| perr(line, "dangling sign"))?;
        let (coef, name) = if tok.parse::<f64>().is_ok() {
            let name = *toks.get(k + 1).ok_or_else(|| perr(line, "coefficient without variable"))?;
            k += 2;
            (parse_num(tok, line)?, name)
        } else {
            k += 1;
            (1.0, tok)
        };
        out.push((name.to_string(), sign * coef));
    }
    Ok(out)
}

#[derive(PartialEq, PartialOrd)]
enum Section {
    Header,
    Objective,
    Rows,
    Bounds,
    Binary,
    General,
    End,
}

/// Parses text written by [`export_lp`] back into a model.
pub fn parse_lp(text: &str) -> Result<MilpModel> {
    let mut name = String::new();
    let mut family = None;
    let mut sorting = None;
    let mut tree: Option<Option<TreeKind>> = None;
    let mut relaxed = false;
    let mut lazy = None;
    let (mut n, mut p) = (0usize, 0usize);
    let mut section = Section::Header;
    let mut objective: Vec<(String, f64)> = Vec::new();
    let mut rows: Vec<(String, Vec<(String, f64)>, ConSense, f64)> = Vec::new();
    let mut vars: Vec<(String, f64, f64)> = Vec::new();
    let mut binary = Vec::new();
    let mut general = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('\\') {
            let toks: Vec<&str> = c.split_whitespace().collect();
            match toks.as_slice() {
                ["model", v] => name = v.to_string(),
                ["family", v] => family = Some(v.parse::<Family>()?),
                ["sorting", v] => sorting = Some(v.parse::<Sorting>()?),
                ["tree", "NONE"] => tree = Some(None),
                ["tree", v] => tree = Some(Some(v.parse::<TreeKind>()?)),
                ["n", a, "p", b] => {
                    n = a.parse().map_err(|_| perr(ln, "bad n"))?;
                    p = b.parse().map_err(|_| perr(ln, "bad p"))?;
                }
                ["relaxed", v] => relaxed = *v == "true",
                ["lazy", v] => lazy = Some(v.parse::<LazyFamily>()?),
                _ => {}
            }
            continue;
        }
        let next = match line {
            "Minimize" => Some(Section::Objective),
            "Subject To" => Some(Section::Rows),
            "Bounds" => Some(Section::Bounds),
            "Binary" => Some(Section::Binary),
            "General" => Some(Section::General),
            "End" => Some(Section::End),
            _ => None,
        };
        if let Some(s) = next {
            if s <= section {
                return Err(perr(ln, format!("section `{line}` out of order")));
            }
            section = s;
            continue;
        }
        match section {
            Section::Header | Section::End => return Err(perr(ln, format!("unexpected text `{line}`"))),
            Section::Objective => {
                let body = line.strip_prefix("obj:").ok_or_else(|| perr(ln, "objective must start with `obj:`"))?;
                let toks: Vec<&str> = body.split_whitespace().collect();
                objective = parse_expr(&toks, ln)?;
            }
            Section::Rows => {
                let (rname, body) = line.split_once(':').ok_or_else(|| perr(ln, "row without name"))?;
                let toks: Vec<&str> = body.split_whitespace().collect();
                if toks.len() < 3 {
                    return Err(perr(ln, "row too short"));
                }
                let sense = match toks[toks.len() - 2] {
                    "<=" => ConSense::Le,
                    ">=" => ConSense::Ge,
                    "=" => ConSense::Eq,
                    s => return Err(perr(ln, format!("bad sense `{s}`"))),
                };
                let rhs = parse_num(toks[toks.len() - 1], ln)?;
                let terms = parse_expr(&toks[..toks.len() - 2], ln)?;
                rows.push((rname.trim().to_string(), terms, sense, rhs));
            }
            Section::Bounds => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                match toks.as_slice() {
                    [lo, "<=", v, "<=", hi] => vars.push((v.to_string(), parse_num(lo, ln)?, parse_num(hi, ln)?)),
                    _ => return Err(perr(ln, "bounds line must read `lo <= name <= hi`")),
                }
            }
            Section::Binary => binary.push(line.to_string()),
            Section::General => general.push(line.to_string()),
        }
    }
    if section != Section::End {
        return Err(perr(text.lines().count(), "missing `End`"));
    }
    let family = family.ok_or_else(|| perr(1, "missing `family` header"))?;
    let sorting = sorting.ok_or_else(|| perr(1, "missing `sorting` header"))?;
    let tree = tree.ok_or_else(|| perr(1, "missing `tree` header"))?;
    let mut m = MilpModel::new(name, family, sorting, tree, n, p);
    m.relaxed = relaxed;
    m.lazy = lazy;
    for (v, lo, hi) in vars {
        m.add_var(v, lo, hi, VarType::Continuous)?;
    }
    let lookup = |m: &MilpModel, v: &str| m.var(v).ok_or_else(|| OmtError::Parse { line: 0, msg: format!("undeclared variable `{v}`") });
    for b in binary {
        let k = lookup(&m, &b)?;
        m.variables[k].vtype = VarType::Binary;
    }
    for g in general {
        let k = lookup(&m, &g)?;
        m.variables[k].vtype = VarType::Integer;
    }
    let mut obj = Vec::with_capacity(objective.len());
    for (v, a) in objective {
        obj.push((lookup(&m, &v)?, a));
    }
    m.objective = obj;
    for (rname, terms, sense, rhs) in rows {
        let mut t = Vec::with_capacity(terms.len());
        for (v, a) in terms {
            t.push((lookup(&m, &v)?, a));
        }
        m.add_named(rname, t, sense, rhs);
    }
    Ok(m)
}
