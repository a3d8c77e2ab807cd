//! Line-oriented model and problem files.
//!
//! ```text
//! # comment
//! worlds: w1 w2 w3
//! rel: w1 -> w2, w2 -> w2, * -> w3
//! order: w1 < w2 < w3
//! actual: w1
//! val w1: fever cough
//! theory: flu -> (cough & fever); cold -> cough
//! hypotheses: flu cold pneumonia
//! atoms: chest_pain
//! ```
//!
//! `*` in a relation edge stands for every world. An order item `a < b < c`
//! lists a chain and expands to all of its pairs; separate items are taken
//! as written. `atoms:` declares vocabulary that is false everywhere.
//!
//! Problem files:
//!
//! ```text
//! observe: fever cough
//! priority: allergies=1 strep_throat=2 common_cold=3
//! depth: 2
//! negative: false
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::abduction::AbductionProblem;
use crate::formula::{is_valid_atom_name, parse, Formula};
use crate::kripke::{EvaluationContext, KripkeModel, ModelError};
use crate::preferential::{OrderCheck, PlausibilityModel};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct DocumentError {
    /// 1-based; 0 when the problem is not tied to one line.
    pub line: usize,
    pub message: String,
    /// The text is well formed but describes an invalid model, such as an
    /// edge to an undeclared world.
    pub invariant: bool,
}

fn err(line: usize, message: impl Into<String>) -> DocumentError {
    DocumentError { line, message: message.into(), invariant: false }
}

fn inv(line: usize, message: impl Into<String>) -> DocumentError {
    DocumentError { line, message: message.into(), invariant: true }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelDocument {
    pub worlds: Vec<String>,
    pub relation: Vec<(String, String)>,
    pub order: Option<Vec<(String, String)>>,
    pub actual: Option<String>,
    pub valuation: BTreeMap<String, Vec<String>>,
    pub theory: Vec<Formula>,
    pub hypotheses: Vec<String>,
    pub atoms: Vec<String>,
}

fn split_key(line: &str) -> Option<(&str, &str)> {
    let (k, v) = line.split_once(':')?;
    Some((k.trim(), v.trim()))
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a).trim()
}

fn names(line: usize, text: &str, what: &str) -> Result<Vec<String>, DocumentError> {
    text.split_whitespace()
        .map(|n| {
            if is_valid_atom_name(n) {
                Ok(n.to_string())
            } else {
                Err(err(line, format!("invalid {what} name `{n}`")))
            }
        })
        .collect()
}

impl ModelDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let mut doc = ModelDocument::default();
        let mut seen_worlds = false;
        let mut pending_rel = Vec::new();
        let mut val_rows: Vec<(usize, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = strip_comment(raw);
            if body.is_empty() {
                continue;
            }
            let (key, value) =
                split_key(body).ok_or_else(|| err(line, format!("expected `key: value`, found `{body}`")))?;
            match key {
                "worlds" => {
                    if seen_worlds {
                        return Err(err(line, "`worlds` declared twice"));
                    }
                    seen_worlds = true;
                    doc.worlds = names(line, value, "world")?;
                    if doc.worlds.is_empty() {
                        return Err(err(line, "`worlds` must list at least one world"));
                    }
                }
                "rel" => {
                    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        let (a, b) = item
                            .split_once("->")
                            .ok_or_else(|| err(line, format!("relation edge `{item}` needs `->`")))?;
                        if a.trim().is_empty() || b.trim().is_empty() {
                            return Err(err(line, format!("relation edge `{item}` needs a world on each side")));
                        }
                        pending_rel.push((line, a.trim().to_string(), b.trim().to_string()));
                    }
                }
                "order" => {
                    let order = doc.order.get_or_insert_with(Vec::new);
                    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        let chain: Vec<&str> = item.split('<').map(str::trim).collect();
                        if chain.len() < 2 || chain.iter().any(|s| s.is_empty()) {
                            return Err(err(line, format!("order item `{item}` must look like `a < b`")));
                        }
                        for (x, lower) in chain.iter().enumerate() {
                            for upper in &chain[x + 1..] {
                                order.push((lower.to_string(), upper.to_string()));
                            }
                        }
                    }
                }
                "actual" => {
                    let mut ws = names(line, value, "world")?;
                    if ws.len() != 1 {
                        return Err(err(line, "`actual` names exactly one world"));
                    }
                    doc.actual = ws.pop();
                }
                "theory" => {
                    for item in value.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                        let f = parse(item).map_err(|e| err(line, format!("in theory formula `{item}`: {e}")))?;
                        doc.theory.push(f);
                    }
                }
                "hypotheses" => doc.hypotheses.extend(names(line, value, "atom")?),
                "atoms" => doc.atoms.extend(names(line, value, "atom")?),
                _ if key.starts_with("val ") || key.starts_with("val\t") => {
                    let world = key[4..].trim().to_string();
                    if !is_valid_atom_name(&world) {
                        return Err(err(line, format!("invalid world name `{world}`")));
                    }
                    for atom in names(line, value, "atom")? {
                        doc.valuation.entry(atom).or_default().push(world.clone());
                    }
                    val_rows.push((line, world));
                }
                _ => return Err(err(line, format!("unknown key `{key}`"))),
            }
        }
        if !seen_worlds {
            return Err(err(0, "missing `worlds:` line"));
        }
        for (line, w) in &val_rows {
            if !doc.worlds.contains(w) {
                return Err(inv(*line, format!("valuation row for undeclared world `{w}`")));
            }
        }
        for (line, a, b) in pending_rel {
            let expand = |n: &str| -> Result<Vec<String>, DocumentError> {
                if n == "*" {
                    Ok(doc.worlds.clone())
                } else if doc.worlds.iter().any(|w| w == n) {
                    Ok(vec![n.to_string()])
                } else {
                    Err(inv(line, format!("relation edge {a} -> {b} names undeclared world `{n}`")))
                }
            };
            for x in expand(&a)? {
                for y in expand(&b)? {
                    if !doc.relation.contains(&(x.clone(), y.clone())) {
                        doc.relation.push((x.clone(), y));
                    }
                }
            }
        }
        Ok(doc)
    }

    pub fn vocabulary(&self) -> BTreeSet<String> {
        let mut v: BTreeSet<String> = self.valuation.keys().cloned().collect();
        v.extend(self.hypotheses.iter().cloned());
        v.extend(self.atoms.iter().cloned());
        for f in &self.theory {
            v.extend(f.atoms());
        }
        v
    }

    pub fn kripke(&self) -> Result<KripkeModel, ModelError> {
        let vocab: Vec<String> = self.vocabulary().into_iter().collect();
        let val: Vec<(String, Vec<String>)> = self.valuation.iter().map(|(a, ws)| (a.clone(), ws.clone())).collect();
        let m = KripkeModel::new(&self.worlds, &self.relation, &val, &vocab)?;
        match &self.actual {
            Some(a) => m.with_actual(a),
            None => Ok(m),
        }
    }

    /// The plausibility model, or `None` when the file has no `order:` line.
    pub fn plausibility(&self, check: OrderCheck) -> Result<Option<PlausibilityModel>, ModelError> {
        let Some(order) = &self.order else { return Ok(None) };
        PlausibilityModel::from_named_pairs(self.kripke()?, order, check).map(Some)
    }

    pub fn context(&self) -> EvaluationContext {
        EvaluationContext::new(self.theory.clone())
    }

    /// Canonical text; `parse(to_text(d))` yields `d` up to edge order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "worlds: {}", self.worlds.join(" "));
        if !self.relation.is_empty() {
            let edges: Vec<String> = self.relation.iter().map(|(a, b)| format!("{a} -> {b}")).collect();
            let _ = writeln!(out, "rel: {}", edges.join(", "));
        }
        if let Some(order) = &self.order {
            let pairs: Vec<String> = order.iter().map(|(a, b)| format!("{a} < {b}")).collect();
            let _ = writeln!(out, "order: {}", pairs.join(", "));
        }
        if let Some(a) = &self.actual {
            let _ = writeln!(out, "actual: {a}");
        }
        for w in &self.worlds {
            let atoms: Vec<&str> =
                self.valuation.iter().filter(|(_, ws)| ws.contains(w)).map(|(a, _)| a.as_str()).collect();
            let _ = writeln!(out, "val {w}: {}", atoms.join(" "));
        }
        if !self.theory.is_empty() {
            let fs: Vec<String> = self.theory.iter().map(|f| f.to_string()).collect();
            let _ = writeln!(out, "theory: {}", fs.join("; "));
        }
        if !self.hypotheses.is_empty() {
            let _ = writeln!(out, "hypotheses: {}", self.hypotheses.join(" "));
        }
        let declared: BTreeSet<&String> = self.valuation.keys().chain(&self.hypotheses).collect();
        let extra: Vec<String> = self.atoms.iter().filter(|a| !declared.contains(a)).cloned().collect();
        if !extra.is_empty() {
            let _ = writeln!(out, "atoms: {}", extra.join(" "));
        }
        out.lines().map(|l| format!("{}\n", l.trim_end())).collect()
    }

    pub fn from_kripke(m: &KripkeModel, order: Option<&crate::preferential::StrictOrder>) -> Self {
        let name = |w: usize| m.world_name(w).to_string();
        let mut valuation = BTreeMap::new();
        let mut atoms = Vec::new();
        for a in m.vocabulary() {
            let set = m.atom_set(a);
            if set.is_empty() {
                atoms.push(a.clone());
            } else {
                valuation.insert(a.clone(), set.iter().map(name).collect());
            }
        }
        ModelDocument {
            worlds: m.world_names().to_vec(),
            relation: m.edges().into_iter().map(|(a, b)| (name(a), name(b))).collect(),
            order: order.map(|o| o.pairs().into_iter().map(|(a, b)| (name(a), name(b))).collect()),
            actual: m.actual().map(name),
            valuation,
            theory: Vec::new(),
            hypotheses: Vec::new(),
            atoms,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProblemDocument {
    pub observation: Option<Formula>,
    pub priorities: Option<BTreeMap<String, u32>>,
    pub depth: Option<usize>,
    pub negative_literals: bool,
}

impl ProblemDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let mut doc = ProblemDocument::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = strip_comment(raw);
            if body.is_empty() {
                continue;
            }
            let (key, value) =
                split_key(body).ok_or_else(|| err(line, format!("expected `key: value`, found `{body}`")))?;
            match key {
                "observe" => {
                    let atoms_only = value.split_whitespace().all(is_valid_atom_name);
                    let f = if atoms_only {
                        Formula::conjunction(value.split_whitespace().map(Formula::atom))
                            .ok_or_else(|| err(line, "`observe` needs at least one atom"))?
                    } else {
                        parse(value).map_err(|e| err(line, format!("in observation: {e}")))?
                    };
                    doc.observation = Some(f);
                }
                "priority" => {
                    let map = doc.priorities.get_or_insert_with(BTreeMap::new);
                    for item in value.split_whitespace() {
                        let (atom, level) = item
                            .split_once('=')
                            .ok_or_else(|| err(line, format!("priority `{item}` must look like `atom=level`")))?;
                        let level: u32 =
                            level.parse().ok().filter(|&l| l > 0).ok_or_else(|| {
                                err(line, format!("priority level `{level}` must be a positive integer"))
                            })?;
                        if !is_valid_atom_name(atom) {
                            return Err(err(line, format!("invalid atom name `{atom}`")));
                        }
                        map.insert(atom.to_string(), level);
                    }
                }
                "depth" => {
                    let d: usize = value
                        .parse()
                        .ok()
                        .filter(|&d| d > 0)
                        .ok_or_else(|| err(line, format!("depth `{value}` must be a positive integer")))?;
                    doc.depth = Some(d);
                }
                "negative" => {
                    doc.negative_literals = match value {
                        "true" => true,
                        "false" => false,
                        _ => return Err(err(line, "`negative` is `true` or `false`")),
                    }
                }
                _ => return Err(err(line, format!("unknown key `{key}`"))),
            }
        }
        Ok(doc)
    }

    /// Combines with a model file into an abduction problem.
    pub fn problem(&self, model: &ModelDocument) -> Result<AbductionProblem, DocumentError> {
        let observation = self.observation.clone().ok_or_else(|| err(0, "problem has no `observe:` line"))?;
        let mut p = AbductionProblem::new(model.theory.clone(), observation, model.hypotheses.clone());
        if let Some(d) = self.depth {
            p.candidate_depth = d;
        }
        p.negative_literals = self.negative_literals;
        p.priorities = self.priorities.clone();
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
# sample
worlds: w1 w2 w3
rel: w1 -> w2, w2 -> w2
rel: * -> w3
order: w1 < w2 < w3
actual: w1
val w1: fever cough
val w2:
theory: flu -> (cough & fever); cold -> cough
hypotheses: flu cold
atoms: extra
";

    #[test]
    fn parses_sample() {
        let d = ModelDocument::parse(SAMPLE).unwrap();
        assert_eq!(d.worlds, vec!["w1", "w2", "w3"]);
        assert_eq!(d.relation.len(), 5);
        assert_eq!(d.order.as_ref().unwrap().len(), 3);
        assert_eq!(d.theory.len(), 2);
        assert!(d.vocabulary().contains("extra"));
        let m = d.plausibility(OrderCheck::Strict).unwrap().unwrap();
        assert_eq!(m.base.actual(), Some(0));
        assert_eq!(m.base.true_atoms(0), vec!["cough", "fever"]);
    }

    #[test]
    fn text_round_trip() {
        let d = ModelDocument::parse(SAMPLE).unwrap();
        let again = ModelDocument::parse(&d.to_text()).unwrap();
        assert_eq!(again.kripke().unwrap(), d.kripke().unwrap());
        assert_eq!(again.theory, d.theory);
        assert_eq!(again.hypotheses, d.hypotheses);
        let m = d.plausibility(OrderCheck::Strict).unwrap().unwrap();
        let back = ModelDocument::from_kripke(&m.base, Some(m.order()));
        let m2 = ModelDocument::parse(&back.to_text()).unwrap().plausibility(OrderCheck::Strict).unwrap().unwrap();
        assert_eq!(m2, m);
    }

    #[test]
    fn errors_name_lines() {
        let e = ModelDocument::parse("worlds: a b\nrel: a -> c\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("a -> c"), "{e}");
        assert_eq!(ModelDocument::parse("worlds: a\nfoo: b\n").unwrap_err().line, 2);
        assert_eq!(ModelDocument::parse("worlds: a\ntheory: a &\n").unwrap_err().line, 2);
        assert!(ModelDocument::parse("rel: a -> b\n").is_err());
        assert!(ModelDocument::parse("worlds:\n").is_err());
    }

    #[test]
    fn dangling_order_is_a_model_error() {
        let d = ModelDocument::parse("worlds: a b\norder: a < z\n").unwrap();
        assert!(matches!(d.plausibility(OrderCheck::Strict), Err(ModelError::DanglingOrderEdge { .. })));
        let d = ModelDocument::parse("worlds: a b c\norder: a < b, b < c\n").unwrap();
        assert!(matches!(d.plausibility(OrderCheck::Strict), Err(ModelError::OrderNotTransitive(..))));
    }

    #[test]
    fn problem_file() {
        let p = ProblemDocument::parse("observe: fever cough\npriority: a=1 b=2\ndepth: 1\n").unwrap();
        assert_eq!(p.observation, Some(parse("fever & cough").unwrap()));
        assert_eq!(p.priorities.as_ref().unwrap()["b"], 2);
        assert_eq!(p.depth, Some(1));
        let p = ProblemDocument::parse("observe: fever | cough\n").unwrap();
        assert_eq!(p.observation, Some(parse("fever | cough").unwrap()));
        assert_eq!(ProblemDocument::parse("observe: a\npriority: a=0\n").unwrap_err().line, 2);
        assert!(ProblemDocument::parse("depth: x\n").is_err());
    }
}
