//! Finite Kripke models and the satisfaction relation for `K`, `O` and `A`.
//!
//! Truth is computed denotationally: every formula is mapped to the set of
//! worlds where it holds, so a query at one world costs the same as a query
//! at all of them.
//!
//! `O a` holds at `w` iff the worlds accessible from `w` are exactly the
//! worlds where `a` holds. `A g` holds at `w` iff some witness `a` drawn from
//! the [`WitnessMode`] candidate space satisfies `O a` and `K(g -> a)` at `w`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{is_valid_atom_name, Formula};
use crate::preferential::StrictOrder;
use crate::worldset::{WorldSet, MAX_WORLDS};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("a model needs at least one world")]
    NoWorlds,
    #[error("too many worlds ({0}); at most {MAX_WORLDS} are supported")]
    TooManyWorlds(usize),
    #[error("world `{0}` is declared twice")]
    DuplicateWorld(String),
    #[error("invalid world name `{0}`")]
    InvalidWorldName(String),
    #[error("relation edge {from} -> {to} names an undeclared world")]
    DanglingEdge { from: String, to: String },
    #[error("order edge {lower} < {upper} names an undeclared world")]
    DanglingOrderEdge { lower: String, upper: String },
    #[error("valuation mentions undeclared world `{0}`")]
    UnknownValuationWorld(String),
    #[error("actual world `{0}` is not declared")]
    UnknownActualWorld(String),
    #[error("invalid atom name `{0}`")]
    InvalidAtom(String),
    #[error("plausibility order is not irreflexive: {0} < {0}")]
    OrderNotIrreflexive(String),
    #[error("plausibility order is not transitive: {0} < {1} and {1} < {2} but not {0} < {2}")]
    OrderNotTransitive(String, String, String),
    #[error("plausibility order is not connected: {0} and {1} are incomparable")]
    OrderNotConnected(String, String),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("atom `{0}` is not in the model vocabulary")]
    UnknownAtom(String),
    #[error("`>` needs a plausibility order, but the model has none")]
    PrefWithoutOrder,
    #[error("background formula `{0}` uses `A`, which would make the witness space circular")]
    CircularBackground(Formula),
}

/// Where witnesses for the abduction clause are drawn from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessMode {
    /// The conjunction of the whole background theory.
    Conjunction,
    /// Conjunctions of nonempty subsets of the background.
    #[default]
    Subsets,
    /// Any formula: every set of worlds definable by a boolean formula over
    /// the model vocabulary.
    Unrestricted,
}

impl FromStr for WitnessMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conjunction" => Ok(WitnessMode::Conjunction),
            "subsets" => Ok(WitnessMode::Subsets),
            "unrestricted" => Ok(WitnessMode::Unrestricted),
            other => Err(format!("unknown witness mode `{other}`")),
        }
    }
}

impl fmt::Display for WitnessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessMode::Conjunction => "conjunction",
            WitnessMode::Subsets => "subsets",
            WitnessMode::Unrestricted => "unrestricted",
        })
    }
}

/// The agent's only-known background theory and the witness policy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationContext {
    /// Operands of the declared `O` formulas.
    pub background: Vec<Formula>,
    pub witness_mode: WitnessMode,
    pub max_witness_size: usize,
}

pub const DEFAULT_WITNESS_SIZE: usize = 4;

impl Default for EvaluationContext {
    fn default() -> Self {
        EvaluationContext {
            background: Vec::new(),
            witness_mode: WitnessMode::Subsets,
            max_witness_size: DEFAULT_WITNESS_SIZE,
        }
    }
}

impl EvaluationContext {
    pub fn new(background: Vec<Formula>) -> Self {
        EvaluationContext { background, ..Default::default() }
    }

    pub fn with_mode(mut self, mode: WitnessMode) -> Self {
        self.witness_mode = mode;
        self
    }

    pub fn with_max_witness_size(mut self, size: usize) -> Self {
        self.max_witness_size = size.max(1);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    worlds: Vec<String>,
    succ: Vec<WorldSet>,
    valuation: BTreeMap<String, WorldSet>,
    vocabulary: BTreeSet<String>,
    actual: Option<usize>,
}

impl KripkeModel {
    /// Builds a model from world names, accessibility edges and a valuation
    /// (atom -> worlds where it is true). Atoms in the valuation join the
    /// vocabulary automatically.
    pub fn new<S: AsRef<str>>(
        worlds: &[S],
        edges: &[(S, S)],
        valuation: &[(S, Vec<S>)],
        vocabulary: &[S],
    ) -> Result<Self, ModelError> {
        let names: Vec<String> = worlds.iter().map(|w| w.as_ref().to_string()).collect();
        let index = |name: &str| names.iter().position(|w| w == name);
        let mut succ = vec![WorldSet::EMPTY; names.len()];
        for (from, to) in edges {
            let (Some(i), Some(j)) = (index(from.as_ref()), index(to.as_ref())) else {
                return Err(ModelError::DanglingEdge { from: from.as_ref().into(), to: to.as_ref().into() });
            };
            succ[i].insert(j);
        }
        let mut val = BTreeMap::new();
        for (atom, ws) in valuation {
            let mut set = WorldSet::EMPTY;
            for w in ws {
                let i = index(w.as_ref()).ok_or_else(|| ModelError::UnknownValuationWorld(w.as_ref().into()))?;
                set.insert(i);
            }
            let entry: &mut WorldSet = val.entry(atom.as_ref().to_string()).or_default();
            *entry = entry.union(set);
        }
        let vocab = vocabulary.iter().map(|a| a.as_ref().to_string()).collect();
        KripkeModel::from_parts(names, succ, val, vocab)
    }

    /// Builds a model from index-based parts.
    pub fn from_parts(
        worlds: Vec<String>,
        succ: Vec<WorldSet>,
        valuation: BTreeMap<String, WorldSet>,
        mut vocabulary: BTreeSet<String>,
    ) -> Result<Self, ModelError> {
        if worlds.is_empty() {
            return Err(ModelError::NoWorlds);
        }
        if worlds.len() > MAX_WORLDS {
            return Err(ModelError::TooManyWorlds(worlds.len()));
        }
        let mut seen = BTreeSet::new();
        for w in &worlds {
            if !is_valid_atom_name(w) {
                return Err(ModelError::InvalidWorldName(w.clone()));
            }
            if !seen.insert(w.as_str()) {
                return Err(ModelError::DuplicateWorld(w.clone()));
            }
        }
        let all = WorldSet::full(worlds.len());
        assert_eq!(succ.len(), worlds.len(), "one successor set per world");
        for s in &succ {
            if !s.is_subset(all) {
                let i = s.difference(all).iter().next().unwrap_or(0);
                return Err(ModelError::DanglingEdge { from: "?".into(), to: format!("#{i}") });
            }
        }
        for (atom, set) in &valuation {
            if !set.is_subset(all) {
                return Err(ModelError::UnknownValuationWorld(format!(
                    "#{}",
                    set.difference(all).iter().next().unwrap_or(0)
                )));
            }
            vocabulary.insert(atom.clone());
        }
        if let Some(bad) = vocabulary.iter().find(|a| !is_valid_atom_name(a)) {
            return Err(ModelError::InvalidAtom(bad.clone()));
        }
        Ok(KripkeModel { worlds, succ, valuation, vocabulary, actual: None })
    }

    pub fn with_actual(mut self, name: &str) -> Result<Self, ModelError> {
        let i = self.world_index(name).map_err(|_| ModelError::UnknownActualWorld(name.to_string()))?;
        self.actual = Some(i);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn all(&self) -> WorldSet {
        WorldSet::full(self.worlds.len())
    }

    pub fn world_names(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_name(&self, w: usize) -> &str {
        &self.worlds[w]
    }

    pub fn world_index(&self, name: &str) -> Result<usize, EvalError> {
        self.worlds.iter().position(|w| w == name).ok_or_else(|| EvalError::UnknownWorld(name.to_string()))
    }

    pub fn actual(&self) -> Option<usize> {
        self.actual
    }

    /// `R(w)`.
    pub fn successors(&self, w: usize) -> WorldSet {
        self.succ[w]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.succ[from].contains(to)
    }

    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocabulary
    }

    /// Worlds where `atom` is true; empty for vocabulary atoms that are never
    /// true.
    pub fn atom_set(&self, atom: &str) -> WorldSet {
        self.valuation.get(atom).copied().unwrap_or_default()
    }

    /// Atoms true at `w`, in vocabulary order.
    pub fn true_atoms(&self, w: usize) -> Vec<&str> {
        self.vocabulary.iter().filter(|a| self.atom_set(a).contains(w)).map(String::as_str).collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len()).flat_map(|i| self.succ[i].iter().map(move |j| (i, j))).collect()
    }

    /// Restriction to the worlds in `keep`: `R ∩ (keep × keep)` and the
    /// valuation intersected with `keep`. Returns the new model and the map
    /// from new indices to old ones.
    pub fn submodel(&self, keep: WorldSet) -> Option<(KripkeModel, Vec<usize>)> {
        if keep.is_empty() {
            return None;
        }
        let mapping: Vec<usize> = keep.iter().collect();
        let remap = |s: WorldSet| -> WorldSet {
            mapping.iter().enumerate().filter(|(_, &old)| s.contains(old)).map(|(new, _)| new).collect()
        };
        let model = KripkeModel {
            worlds: mapping.iter().map(|&w| self.worlds[w].clone()).collect(),
            succ: mapping.iter().map(|&w| remap(self.succ[w])).collect(),
            valuation: self.valuation.iter().map(|(a, s)| (a.clone(), remap(*s))).collect(),
            vocabulary: self.vocabulary.clone(),
            actual: self.actual.and_then(|a| mapping.iter().position(|&w| w == a)),
        };
        Some((model, mapping))
    }

    pub(crate) fn check_atoms(&self, f: &Formula) -> Result<(), EvalError> {
        match f.atoms().into_iter().find(|a| !self.vocabulary.contains(a)) {
            Some(a) => Err(EvalError::UnknownAtom(a)),
            None => Ok(()),
        }
    }
}

/// A candidate witness: which background entries it conjoins (or the
/// characteristic formula in unrestricted mode) and where it is true.
#[derive(Clone, Debug)]
struct Candidate {
    members: Vec<usize>,
    truth: WorldSet,
}

/// Computes truth sets for one model, optional plausibility order and
/// evaluation context.
pub(crate) struct Evaluator<'a> {
    model: &'a KripkeModel,
    order: Option<&'a StrictOrder>,
    ctx: &'a EvaluationContext,
    candidates: Option<Vec<Candidate>>,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(
        model: &'a KripkeModel,
        order: Option<&'a StrictOrder>,
        ctx: &'a EvaluationContext,
    ) -> Result<Self, EvalError> {
        let mut ev = Evaluator { model, order, ctx, candidates: None };
        for b in &ctx.background {
            model.check_atoms(b)?;
            if contains_abd(b) {
                return Err(EvalError::CircularBackground(b.clone()));
            }
        }
        let sets = ctx.background.iter().map(|b| ev.eval(b)).collect::<Result<Vec<_>, _>>()?;
        ev.candidates = Some(witness_candidates(ctx, &sets, model.all()));
        Ok(ev)
    }

    pub(crate) fn truth_set(&self, f: &Formula) -> Result<WorldSet, EvalError> {
        self.model.check_atoms(f)?;
        self.eval(f)
    }

    fn eval(&self, f: &Formula) -> Result<WorldSet, EvalError> {
        let m = self.model;
        let n = m.len();
        Ok(match f {
            Formula::True => m.all(),
            Formula::False => WorldSet::EMPTY,
            Formula::Atom(p) => m.atom_set(p),
            Formula::Not(a) => self.eval(a)?.complement(n),
            Formula::And(a, b) => self.eval(a)?.intersection(self.eval(b)?),
            Formula::Or(a, b) => self.eval(a)?.union(self.eval(b)?),
            Formula::Implies(a, b) => self.eval(a)?.complement(n).union(self.eval(b)?),
            Formula::Knows(a) => {
                let ts = self.eval(a)?;
                (0..n).filter(|&w| m.successors(w).is_subset(ts)).collect()
            }
            Formula::Only(a) => {
                let ts = self.eval(a)?;
                (0..n).filter(|&w| m.successors(w) == ts).collect()
            }
            Formula::PrefCond(a, b) => {
                let order = self.order.ok_or(EvalError::PrefWithoutOrder)?;
                let (ta, tb) = (self.eval(a)?, self.eval(b)?);
                (0..n).filter(|&w| order.minimal_in(m.successors(w).intersection(ta)).is_subset(tb)).collect()
            }
            Formula::Abd(g) => {
                let tg = self.eval(g)?;
                (0..n).filter(|&w| self.witness_at(w, tg).is_some()).collect()
            }
        })
    }

    /// Truth set of `g` is `tg`; returns the first admissible witness at `w`.
    fn witness_at(&self, w: usize, tg: WorldSet) -> Option<Candidate> {
        let m = self.model;
        let r = m.successors(w);
        let explains = |truth: WorldSet| match self.order {
            // g > a: a holds at the minimal g-worlds accessible from w
            Some(order) => order.minimal_in(r.intersection(tg)).is_subset(truth),
            // K(g -> a)
            None => r.intersection(tg).is_subset(truth),
        };
        if self.ctx.witness_mode == WitnessMode::Unrestricted {
            return (is_definable(m, r) && explains(r)).then(|| Candidate { members: Vec::new(), truth: r });
        }
        self.candidates
            .as_ref()
            .expect("candidates are computed at construction")
            .iter()
            .find(|c| c.truth == r && explains(c.truth))
            .cloned()
    }

    pub(crate) fn witness_formula(&self, w: usize, g: &Formula) -> Result<Option<Formula>, EvalError> {
        let tg = self.truth_set(g)?;
        Ok(self.witness_at(w, tg).map(|c| {
            if self.ctx.witness_mode == WitnessMode::Unrestricted {
                characteristic_formula(self.model, c.truth)
            } else {
                Formula::conjunction(c.members.iter().map(|&i| self.ctx.background[i].clone()))
                    .expect("background candidates are nonempty")
            }
        }))
    }
}

fn contains_abd(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => false,
        Formula::Abd(_) => true,
        Formula::Not(a) | Formula::Knows(a) | Formula::Only(a) => contains_abd(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::PrefCond(a, b) => {
            contains_abd(a) || contains_abd(b)
        }
    }
}

fn witness_candidates(ctx: &EvaluationContext, sets: &[WorldSet], all: WorldSet) -> Vec<Candidate> {
    let n = sets.len();
    let conj = |members: &[usize]| Candidate {
        members: members.to_vec(),
        truth: members.iter().fold(all, |acc, &i| acc.intersection(sets[i])),
    };
    match ctx.witness_mode {
        WitnessMode::Unrestricted => Vec::new(),
        WitnessMode::Conjunction if n == 0 => Vec::new(),
        WitnessMode::Conjunction => vec![conj(&(0..n).collect::<Vec<_>>())],
        WitnessMode::Subsets => {
            let mut out = Vec::new();
            for size in 1..=ctx.max_witness_size.min(n) {
                for_each_combination(n, size, &mut |members| out.push(conj(members)));
            }
            out
        }
    }
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_combination(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::with_capacity(k), f);
}

/// True iff `set` is a union of valuation classes, i.e. some boolean formula
/// over the vocabulary is true exactly there.
pub fn is_definable(m: &KripkeModel, set: WorldSet) -> bool {
    (0..m.len()).all(|u| {
        let inside = set.contains(u);
        (0..m.len()).all(|v| set.contains(v) == inside || !same_valuation(m, u, v))
    })
}

fn same_valuation(m: &KripkeModel, u: usize, v: usize) -> bool {
    m.vocabulary.iter().all(|a| m.atom_set(a).contains(u) == m.atom_set(a).contains(v))
}

/// Disjunction of the full-vocabulary state descriptions of the worlds in
/// `set` (one per valuation class).
pub fn characteristic_formula(m: &KripkeModel, set: WorldSet) -> Formula {
    let mut seen: Vec<usize> = Vec::new();
    for w in set.iter() {
        if !seen.iter().any(|&u| same_valuation(m, u, w)) {
            seen.push(w);
        }
    }
    let describe = |w: usize| {
        Formula::conjunction(m.vocabulary.iter().map(|a| {
            if m.atom_set(a).contains(w) {
                Formula::atom(a.clone())
            } else {
                Formula::not(Formula::atom(a.clone()))
            }
        }))
        .unwrap_or(Formula::True)
    };
    Formula::disjunction(seen.into_iter().map(describe)).unwrap_or(Formula::False)
}

fn check_world(m: &KripkeModel, w: usize) -> Result<(), EvalError> {
    if w < m.len() {
        Ok(())
    } else {
        Err(EvalError::UnknownWorld(format!("#{w}")))
    }
}

/// `(M, w) |= f`.
pub fn satisfies(m: &KripkeModel, ctx: &EvaluationContext, w: usize, f: &Formula) -> Result<bool, EvalError> {
    check_world(m, w)?;
    Ok(truth_set(m, ctx, f)?.contains(w))
}

/// `{ w | (M, w) |= f }`.
pub fn truth_set(m: &KripkeModel, ctx: &EvaluationContext, f: &Formula) -> Result<WorldSet, EvalError> {
    Evaluator::new(m, None, ctx)?.truth_set(f)
}

/// The conjunction of the whole background, the canonical abduction witness.
pub fn canonical_alpha(ctx: &EvaluationContext) -> Option<Formula> {
    Formula::conjunction(ctx.background.iter().cloned())
}

/// A witness `a` with `O a` and `K(g -> a)` at `w`, if the context admits one.
pub fn abduction_witness(
    m: &KripkeModel,
    ctx: &EvaluationContext,
    w: usize,
    g: &Formula,
) -> Result<Option<Formula>, EvalError> {
    check_world(m, w)?;
    Evaluator::new(m, None, ctx)?.witness_formula(w, g)
}

/// A model together with the context it is queried under.
pub type Pointed<'a> = (&'a KripkeModel, &'a EvaluationContext);

/// Where a consequence claim fails: model index within the suite and world.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Countermodel {
    pub model: usize,
    pub world: usize,
}

/// First world of the suite where all `premises` hold but `f` does not.
pub fn local_countermodel(
    suite: &[Pointed<'_>],
    premises: &[Formula],
    f: &Formula,
) -> Result<Option<Countermodel>, EvalError> {
    for (i, (m, ctx)) in suite.iter().enumerate() {
        let ev = Evaluator::new(m, None, ctx)?;
        let mut support = m.all();
        for p in premises {
            support = support.intersection(ev.truth_set(p)?);
        }
        if let Some(w) = support.difference(ev.truth_set(f)?).iter().next() {
            return Ok(Some(Countermodel { model: i, world: w }));
        }
    }
    Ok(None)
}

/// `premises |= f` over the suite: no world satisfies all premises and
/// falsifies `f`.
pub fn local_consequence(suite: &[Pointed<'_>], premises: &[Formula], f: &Formula) -> Result<bool, EvalError> {
    Ok(local_countermodel(suite, premises, f)?.is_none())
}

/// `f` holds at every world of every model in the suite.
pub fn global_validity(suite: &[Pointed<'_>], f: &Formula) -> Result<bool, EvalError> {
    local_consequence(suite, &[], f)
}

/// The submodel on worlds satisfying the whole background and `g`.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub model: KripkeModel,
    /// `mapping[new] = old` world index.
    pub mapping: Vec<usize>,
}

/// Restricts to `W' = { w | w |= every background formula, w |/= ~g }`.
/// Returns `None` when `W'` is empty.
pub fn restrict_nonvacuous(
    m: &KripkeModel,
    ctx: &EvaluationContext,
    g: &Formula,
) -> Result<Option<Restriction>, EvalError> {
    let ev = Evaluator::new(m, None, ctx)?;
    let mut keep = ev.truth_set(g)?;
    for b in &ctx.background {
        keep = keep.intersection(ev.truth_set(b)?);
    }
    Ok(m.submodel(keep).map(|(model, mapping)| Restriction { model, mapping }))
}

/// Worlds where `A g` holds together with `K ~g`.
pub fn nonvacuity_violations(m: &KripkeModel, ctx: &EvaluationContext, g: &Formula) -> Result<WorldSet, EvalError> {
    let ev = Evaluator::new(m, None, ctx)?;
    let abd = ev.truth_set(&Formula::abd(g.clone()))?;
    let knows_not = ev.truth_set(&Formula::knows(Formula::not(g.clone())))?;
    Ok(abd.intersection(knows_not))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RelationProperties {
    pub reflexive: bool,
    pub transitive: bool,
    pub symmetric: bool,
    pub euclidean: bool,
}

pub fn relation_properties(m: &KripkeModel) -> RelationProperties {
    let n = m.len();
    let r = |a, b| m.has_edge(a, b);
    let mut props = RelationProperties { reflexive: true, transitive: true, symmetric: true, euclidean: true };
    for a in 0..n {
        props.reflexive &= r(a, a);
        for b in 0..n {
            props.symmetric &= !r(a, b) || r(b, a);
            for c in 0..n {
                props.transitive &= !(r(a, b) && r(b, c)) || r(a, c);
                props.euclidean &= !(r(a, b) && r(a, c)) || r(b, c);
            }
        }
    }
    props
}
