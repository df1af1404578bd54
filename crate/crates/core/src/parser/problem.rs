use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use super::{parse_constant, parse_expression_at, ErrorCode, ParseError, RESERVED};
use crate::algebra::{GaussRat, Poly, VarContext};

/// Task requested by a problem file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TaskKind {
    Analyze,
    Stability,
    Perturb,
    Classify,
    Removable,
    Construct,
    Disc,
}

impl TaskKind {
    pub fn parse(s: &str) -> Option<TaskKind> {
        Some(match s {
            "analyze" => TaskKind::Analyze,
            "stability" => TaskKind::Stability,
            "perturb" => TaskKind::Perturb,
            "classify" => TaskKind::Classify,
            "removable" => TaskKind::Removable,
            "construct" => TaskKind::Construct,
            "disc" => TaskKind::Disc,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Analyze => "analyze",
            TaskKind::Stability => "stability",
            TaskKind::Perturb => "perturb",
            TaskKind::Classify => "classify",
            TaskKind::Removable => "removable",
            TaskKind::Construct => "construct",
            TaskKind::Disc => "disc",
        }
    }

    fn allowed_params(self) -> &'static [&'static str] {
        match self {
            TaskKind::Analyze => &[],
            TaskKind::Stability => &["depth"],
            TaskKind::Perturb => &["mode", "budget", "seed", "delta", "depth", "box"],
            TaskKind::Classify => &[],
            TaskKind::Removable => &["order"],
            TaskKind::Construct => &["what", "n", "k", "m", "type", "a"],
            TaskKind::Disc => &[
                "phi",
                "t",
                "grid",
                "tol",
                "max_iter",
                "perturbations",
                "seed",
            ],
        }
    }
}

/// A defining equation as written, with its line for diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub key: String,
    pub expr: Poly,
    /// Written with the `real:` prefix: one real equation instead of two.
    pub real: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldSection {
    pub ctx: Arc<VarContext>,
    pub equations: Vec<Equation>,
    /// `w = ρ(z, z̄)` with `w` the last variable, when given.
    pub graph: Option<Poly>,
    /// `Im w_j = r_j(z, z̄, Re w)` for the trailing variables, when given.
    pub imgraph: Vec<Poly>,
    pub point: Vec<GaussRat>,
}

impl ManifoldSection {
    /// Real defining functions: `Re e`, `Im e` for each complex equation and
    /// `e` itself for a `real:` one.
    pub fn real_equations(&self) -> Vec<Poly> {
        let mut out = Vec::new();
        for eq in &self.equations {
            if eq.real {
                out.push(eq.expr.clone());
            } else {
                out.push(eq.expr.real_part());
                out.push(eq.expr.imag_part());
            }
        }
        out
    }

    /// Real codimension, counting the implied `Im x = 0` of real variables.
    pub fn codimension(&self) -> usize {
        let reals = (0..self.ctx.len()).filter(|&v| self.ctx.is_real(v)).count();
        self.real_equations().len() + reals
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapSection {
    pub target: usize,
    pub components: Vec<Poly>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskSection {
    pub kind: TaskKind,
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemFile {
    pub manifold: ManifoldSection,
    pub map: Option<MapSection>,
    pub task: TaskSection,
}

struct Entry {
    value: String,
    line: usize,
    col: usize,
}

type Section = (usize, BTreeMap<String, Entry>);

fn err(code: ErrorCode, msg: impl Into<String>, line: usize, col: usize) -> ParseError {
    ParseError::new(code, msg, line, col)
}

fn split_sections(text: &str) -> Result<BTreeMap<String, Section>, ParseError> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = body.len() - body.trim_start().len() + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(err(
                    ErrorCode::Syntax,
                    "unterminated section header",
                    line,
                    indent,
                ));
            };
            let name = name.trim().to_string();
            if !matches!(name.as_str(), "manifold" | "map" | "task") {
                return Err(err(
                    ErrorCode::UnknownSection,
                    format!("unknown section `[{name}]`"),
                    line,
                    indent,
                ));
            }
            if sections.contains_key(&name) {
                return Err(err(
                    ErrorCode::DuplicateKey,
                    format!("section `[{name}]` repeated"),
                    line,
                    indent,
                ));
            }
            sections.insert(name.clone(), (line, BTreeMap::new()));
            current = Some(name);
            continue;
        }
        let Some(sec) = current.as_ref() else {
            return Err(err(
                ErrorCode::Syntax,
                "key outside of any section",
                line,
                indent,
            ));
        };
        let Some(eq) = body.find('=') else {
            return Err(err(
                ErrorCode::Syntax,
                "expected `key = value`",
                line,
                indent,
            ));
        };
        let key = body[..eq].trim().to_string();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(err(ErrorCode::Syntax, "malformed key", line, indent));
        }
        let vstart = eq + 1 + (body[eq + 1..].len() - body[eq + 1..].trim_start().len());
        let value = body[eq + 1..].trim().to_string();
        let col = body[..vstart].chars().count() + 1;
        let map = &mut sections.get_mut(sec).unwrap().1;
        if map.contains_key(&key) {
            return Err(err(
                ErrorCode::DuplicateKey,
                format!("duplicate key `{key}`"),
                line,
                indent,
            ));
        }
        map.insert(key, Entry { value, line, col });
    }
    Ok(sections)
}

fn numbered_keys<'a>(
    sec: &'a BTreeMap<String, Entry>,
    prefix: &str,
) -> Result<Vec<(String, &'a Entry)>, ParseError> {
    let mut found: Vec<(usize, String, &Entry)> = Vec::new();
    for (k, e) in sec {
        if let Some(num) = k.strip_prefix(prefix) {
            if let Ok(i) = num.parse::<usize>() {
                found.push((i, k.clone(), e));
            }
        }
    }
    found.sort_by_key(|(i, _, _)| *i);
    Ok(found.into_iter().map(|(_, k, e)| (k, e)).collect())
}

fn parse_list(e: &Entry) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    let mut col = e.col;
    for part in e.value.split(',') {
        let lead = part.len() - part.trim_start().len();
        out.push((part.trim().to_string(), col + lead));
        col += part.chars().count() + 1;
    }
    out
}

/// Parses and validates a problem file.
pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let sections = split_sections(text)?;
    let Some((mline, msec)) = sections.get("manifold") else {
        return Err(err(
            ErrorCode::MissingSection,
            "missing `[manifold]` section",
            1,
            1,
        ));
    };
    for k in msec.keys() {
        let known = matches!(
            k.as_str(),
            "dimension" | "variables" | "real" | "point" | "graph" | "imgraph"
        ) || k
            .strip_prefix("eq")
            .is_some_and(|n| n.parse::<usize>().is_ok());
        if !known {
            let e = &msec[k];
            return Err(err(
                ErrorCode::UnknownKey,
                format!("unknown key `{k}` in [manifold]"),
                e.line,
                1,
            ));
        }
    }
    let vars_entry = msec.get("variables").ok_or_else(|| {
        err(
            ErrorCode::MissingSection,
            "[manifold] needs `variables`",
            *mline,
            1,
        )
    })?;
    let names = parse_list(vars_entry);
    for (n, col) in &names {
        let ok = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok || RESERVED.contains(&n.as_str()) {
            return Err(err(
                ErrorCode::BadValue,
                format!("invalid variable name `{n}`"),
                vars_entry.line,
                *col,
            ));
        }
    }
    let mut real = vec![false; names.len()];
    if let Some(e) = msec.get("real") {
        for (n, col) in parse_list(e) {
            match names.iter().position(|(m, _)| *m == n) {
                Some(i) => real[i] = true,
                None => {
                    return Err(err(
                        ErrorCode::UnknownIdent,
                        format!("unknown identifier `{n}`"),
                        e.line,
                        col,
                    ))
                }
            }
        }
    }
    let ctx =
        VarContext::new(names.iter().map(|(n, _)| n.clone()).collect(), real).map_err(|e| {
            err(
                ErrorCode::DuplicateKey,
                e.to_string(),
                vars_entry.line,
                vars_entry.col,
            )
        })?;
    if let Some(e) = msec.get("dimension") {
        let d: usize = e.value.parse().map_err(|_| {
            err(
                ErrorCode::BadValue,
                "dimension must be a natural number",
                e.line,
                e.col,
            )
        })?;
        if d != ctx.len() {
            return Err(err(
                ErrorCode::Dimension,
                format!("dimension {d} but {} variables declared", ctx.len()),
                e.line,
                e.col,
            ));
        }
    }
    let mut equations = Vec::new();
    for (key, e) in numbered_keys(msec, "eq")? {
        let (body, real, shift) = match e.value.strip_prefix("real:") {
            Some(rest) => (rest, true, 5),
            None => (e.value.as_str(), false, 0),
        };
        let expr = parse_expression_at(body, &ctx, e.line, e.col + shift)?;
        if real && !expr.is_real_valued() {
            return Err(err(
                ErrorCode::BadValue,
                format!("`{key}` is flagged real but is not real-valued"),
                e.line,
                e.col,
            ));
        }
        equations.push(Equation { key, expr, real });
    }
    let mut graph = None;
    let mut imgraph = Vec::new();
    if let Some(e) = msec.get("graph") {
        let rho = parse_expression_at(&e.value, &ctx, e.line, e.col)?;
        let w = ctx
            .len()
            .checked_sub(1)
            .ok_or_else(|| err(ErrorCode::Dimension, "graph needs variables", e.line, 1))?;
        if rho.uses_var(w) {
            return Err(err(
                ErrorCode::BadValue,
                "graph expression may not involve its last variable",
                e.line,
                e.col,
            ));
        }
        equations.push(Equation {
            key: "graph".into(),
            expr: &Poly::var(&ctx, w, false) - &rho,
            real: false,
        });
        graph = Some(rho);
    }
    if let Some(e) = msec.get("imgraph") {
        let parts: Vec<&str> = e.value.split(';').collect();
        if parts.len() >= ctx.len() {
            return Err(err(
                ErrorCode::Dimension,
                "more graph functions than trailing variables",
                e.line,
                e.col,
            ));
        }
        let first_w = ctx.len() - parts.len();
        let mut col = e.col;
        for (j, part) in parts.iter().enumerate() {
            let r = parse_expression_at(part, &ctx, e.line, col)?;
            col += part.chars().count() + 1;
            if !r.is_real_valued() {
                return Err(err(
                    ErrorCode::BadValue,
                    "imgraph functions must be real-valued",
                    e.line,
                    e.col,
                ));
            }
            let w = first_w + j;
            let im_w = Poly::var(&ctx, w, false).imag_part();
            equations.push(Equation {
                key: format!("imgraph{}", j + 1),
                expr: &im_w - &r,
                real: true,
            });
            imgraph.push(r);
        }
    }
    let point = match msec.get("point") {
        None => vec![GaussRat::zero(); ctx.len()],
        Some(e) => {
            let items = parse_list(e);
            if items.len() != ctx.len() {
                return Err(err(
                    ErrorCode::Dimension,
                    format!(
                        "point has {} coordinates, expected {}",
                        items.len(),
                        ctx.len()
                    ),
                    e.line,
                    e.col,
                ));
            }
            let mut pt = Vec::new();
            for (v, (s, col)) in items.iter().enumerate() {
                let c = parse_constant(s, e.line, *col)?;
                if ctx.is_real(v) && !c.is_real() {
                    return Err(err(
                        ErrorCode::BadValue,
                        "real variable given a non-real coordinate",
                        e.line,
                        *col,
                    ));
                }
                pt.push(c);
            }
            pt
        }
    };
    let manifold = ManifoldSection {
        ctx: ctx.clone(),
        equations,
        graph,
        imgraph,
        point,
    };

    let map = match sections.get("map") {
        None => None,
        Some((line, sec)) => {
            for (k, e) in sec {
                let known = k == "target"
                    || k.strip_prefix('f')
                        .is_some_and(|n| n.parse::<usize>().is_ok());
                if !known {
                    return Err(err(
                        ErrorCode::UnknownKey,
                        format!("unknown key `{k}` in [map]"),
                        e.line,
                        1,
                    ));
                }
            }
            let comps = numbered_keys(sec, "f")?;
            let mut components = Vec::new();
            for (i, (key, e)) in comps.iter().enumerate() {
                if *key != format!("f{}", i + 1) {
                    return Err(err(
                        ErrorCode::Dimension,
                        format!("map components must be f1, f2, ...; found `{key}`"),
                        e.line,
                        1,
                    ));
                }
                let p = parse_expression_at(&e.value, &ctx, e.line, e.col)?;
                if p.has_conj() {
                    return Err(err(
                        ErrorCode::BadValue,
                        format!("`{key}` is not holomorphic"),
                        e.line,
                        e.col,
                    ));
                }
                components.push(p);
            }
            let target = match sec.get("target") {
                Some(e) => e.value.parse::<usize>().map_err(|_| {
                    err(
                        ErrorCode::BadValue,
                        "target must be a natural number",
                        e.line,
                        e.col,
                    )
                })?,
                None => components.len(),
            };
            if target != components.len() || target == 0 {
                return Err(err(
                    ErrorCode::Dimension,
                    format!("target {target} but {} components", components.len()),
                    *line,
                    1,
                ));
            }
            Some(MapSection { target, components })
        }
    };

    let task = match sections.get("task") {
        None => TaskSection {
            kind: TaskKind::Analyze,
            params: BTreeMap::new(),
        },
        Some((line, sec)) => {
            let kind = match sec.get("kind") {
                None => TaskKind::Analyze,
                Some(e) => TaskKind::parse(&e.value).ok_or_else(|| {
                    err(
                        ErrorCode::UnknownTask,
                        format!("unknown task `{}`", e.value),
                        e.line,
                        e.col,
                    )
                })?,
            };
            let mut params = BTreeMap::new();
            for (k, e) in sec {
                if k == "kind" {
                    continue;
                }
                if !kind.allowed_params().contains(&k.as_str()) {
                    return Err(err(
                        ErrorCode::UnknownKey,
                        format!("unknown key `{k}` for task {}", kind.as_str()),
                        e.line,
                        1,
                    ));
                }
                params.insert(k.clone(), e.value.clone());
            }
            let _ = line;
            TaskSection { kind, params }
        }
    };
    Ok(ProblemFile {
        manifold,
        map,
        task,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX53: &str = "\
# nonremovable singularity in C^3 -> C^4
[manifold]
dimension = 3
variables = z1, z2, z3
eq1 = z1 - conj(z3)

[map]
target = 4
f1 = z1
f2 = z2
f3 = z3^2
f4 = z2*z3

[task]
kind = stability
";

    #[test]
    fn example_file_parses() {
        let p = parse_problem(EX53).unwrap();
        assert_eq!(p.manifold.codimension(), 2);
        assert_eq!(p.task.kind, TaskKind::Stability);
        let m = p.map.unwrap();
        let printed: Vec<String> = m.components.iter().map(|c| c.to_string()).collect();
        assert_eq!(printed, ["z1", "z2", "z3^2", "z2*z3"]);
    }

    #[test]
    fn minimal_file_defaults_to_analyze() {
        let p = parse_problem("[manifold]\nvariables = z\n").unwrap();
        assert_eq!(p.task.kind, TaskKind::Analyze);
        assert!(p.map.is_none());
    }

    #[test]
    fn distinct_error_codes() {
        let e = parse_problem("[manifold]\nvariables = z1\neq1 = z1 - z9\n").unwrap_err();
        assert_eq!((e.code, e.line, e.col), (ErrorCode::UnknownIdent, 3, 12));
        assert_eq!(
            parse_problem("[map]\nf1 = z\n").unwrap_err().code,
            ErrorCode::MissingSection
        );
        assert_eq!(
            parse_problem("[manifold]\nvariables = z\nreal = z\nreal = z\n")
                .unwrap_err()
                .code,
            ErrorCode::DuplicateKey
        );
        assert_eq!(
            parse_problem("[manifold]\nvariables = z\ndimension = 2\n")
                .unwrap_err()
                .code,
            ErrorCode::Dimension
        );
        assert_eq!(
            parse_problem("[manifold]\nvariables = z\ncolour = red\n")
                .unwrap_err()
                .code,
            ErrorCode::UnknownKey
        );
        assert_eq!(
            parse_problem("[manifold]\nvariables = z\n[task]\nkind = fly\n")
                .unwrap_err()
                .code,
            ErrorCode::UnknownTask
        );
        assert_eq!(
            parse_problem("[manifold]\nvariables = i\n")
                .unwrap_err()
                .code,
            ErrorCode::BadValue
        );
    }

    #[test]
    fn real_variables_and_graphs() {
        let p = parse_problem("[manifold]\nvariables = x, y, xi\nreal = x, y\n").unwrap();
        assert_eq!(p.manifold.codimension(), 2);
        let g =
            parse_problem("[manifold]\nvariables = z1, z2, w\ngraph = conj(z1)*z2 + conj(z2)^3\n")
                .unwrap();
        assert_eq!(g.manifold.codimension(), 2);
        let d = parse_problem("[manifold]\nvariables = z, w\nimgraph = z*conj(z)\n").unwrap();
        assert_eq!(
            d.manifold.equations[0].expr.to_string(),
            "-z*conj(z) - 1/2i*w + 1/2i*conj(w)"
        );
    }
}
