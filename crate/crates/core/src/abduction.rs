//! Abduction problems over plausibility models: candidate enumeration,
//! consistency and explainability checks, explanation selection and the
//! selection-based consequence relations.
//!
//! Candidates are sets of hypothesis literals. They are kept as boolean
//! formulas for entailment and wrapped in `A` only when reported. All
//! entailments are evaluated on the supplied model suite with the background
//! and the candidate as local premises.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;
use crate::kripke::{for_each_combination, EvalError, EvaluationContext};
use crate::preferential::{
    local_consequence_pref, preferential_consequence, satisfiable_pref, MinimalReading, PlausibilityModel, PrefPointed,
};

pub const DEFAULT_CANDIDATE_DEPTH: usize = 2;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AbductionError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("the background already entails the observation `{0}`")]
    AlreadyExplained(Formula),
    #[error("the candidate space is empty (no hypotheses or depth 0)")]
    EmptyCandidateSpace,
    #[error("the model suite is empty")]
    EmptySuite,
    #[error("priorization needs priority levels")]
    NoPriorities,
    #[error("hypothesis `{0}` has no priority level")]
    MissingPriority(String),
    #[error("premises must contain background formula `{0}`")]
    BackgroundNotInPremises(Formula),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: String,
    pub positive: bool,
}

impl Literal {
    pub fn formula(&self) -> Formula {
        let a = Formula::atom(self.atom.clone());
        if self.positive {
            a
        } else {
            Formula::not(a)
        }
    }

    fn of(f: &Formula) -> Option<Literal> {
        match f {
            Formula::Atom(a) => Some(Literal { atom: a.clone(), positive: true }),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(a) => Some(Literal { atom: a.clone(), positive: false }),
                _ => None,
            },
            _ => None,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "~{}", self.atom)
        }
    }
}

impl Serialize for Literal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A candidate explanation: a conjunction of literals, kept as a set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Explanation {
    pub literals: Vec<Literal>,
}

impl Explanation {
    pub fn formulas(&self) -> Vec<Formula> {
        self.literals.iter().map(Literal::formula).collect()
    }

    /// The members as abductive formulas `A l`.
    pub fn abductive(&self) -> Vec<Formula> {
        self.literals.iter().map(|l| Formula::abd(l.formula())).collect()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn is_subset(&self, other: &Explanation) -> bool {
        self.literals.iter().all(|l| other.literals.contains(l))
    }

    pub fn is_proper_subset(&self, other: &Explanation) -> bool {
        self.len() < other.len() && self.is_subset(other)
    }
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.literals.iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbductionProblem {
    pub background: Vec<Formula>,
    pub observation: Formula,
    pub hypotheses: Vec<String>,
    pub candidate_depth: usize,
    /// Admit `~h` as well as `h` for each hypothesis.
    pub negative_literals: bool,
    /// Priority level per hypothesis atom; smaller is preferred.
    pub priorities: Option<BTreeMap<String, u32>>,
    pub reading: MinimalReading,
}

impl AbductionProblem {
    pub fn new(background: Vec<Formula>, observation: Formula, hypotheses: Vec<String>) -> Self {
        AbductionProblem {
            background,
            observation,
            hypotheses,
            candidate_depth: DEFAULT_CANDIDATE_DEPTH,
            negative_literals: false,
            priorities: None,
            reading: MinimalReading::default(),
        }
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.candidate_depth = depth;
        self
    }

    pub fn with_priorities<S: Into<String>>(mut self, levels: impl IntoIterator<Item = (S, u32)>) -> Self {
        self.priorities = Some(levels.into_iter().map(|(a, l)| (a.into(), l)).collect());
        self
    }

    fn literals(&self) -> Vec<Literal> {
        let mut seen = Vec::new();
        let mut out = Vec::new();
        for h in &self.hypotheses {
            if seen.contains(h) {
                continue;
            }
            seen.push(h.clone());
            out.push(Literal { atom: h.clone(), positive: true });
            if self.negative_literals {
                out.push(Literal { atom: h.clone(), positive: false });
            }
        }
        out
    }

    fn is_hypothesis_literal(&self, f: &Formula) -> Option<Literal> {
        Literal::of(f).filter(|l| self.hypotheses.contains(&l.atom) && (l.positive || self.negative_literals))
    }
}

/// Every candidate, ordered by size and then by literal position. Sets with
/// complementary literals are skipped.
pub fn candidate_space(p: &AbductionProblem) -> Vec<Explanation> {
    let lits = p.literals();
    let mut out = Vec::new();
    for size in 1..=p.candidate_depth.min(lits.len()) {
        for_each_combination(lits.len(), size, &mut |idx| {
            let chosen: Vec<Literal> = idx.iter().map(|&i| lits[i].clone()).collect();
            let clash = chosen.windows(2).any(|w| w[0].atom == w[1].atom);
            if !clash {
                out.push(Explanation { literals: chosen });
            }
        });
    }
    out
}

/// Entailment checks over a suite, with the background as evaluation
/// context.
struct Judge<'a> {
    suite: Vec<PrefPointed<'a>>,
    reading: MinimalReading,
}

impl<'a> Judge<'a> {
    fn new(
        suite: &'a [PlausibilityModel],
        ctx: &'a EvaluationContext,
        reading: MinimalReading,
    ) -> Result<Self, AbductionError> {
        if suite.is_empty() {
            return Err(AbductionError::EmptySuite);
        }
        Ok(Judge { suite: suite.iter().map(|m| (m, ctx)).collect(), reading })
    }

    fn entails(&self, premises: &[Formula], f: &Formula) -> Result<bool, EvalError> {
        local_consequence_pref(&self.suite, premises, f)
    }

    fn pref_entails(&self, premises: &[Formula], f: &Formula) -> Result<bool, EvalError> {
        preferential_consequence(&self.suite, premises, f, self.reading)
    }

    fn satisfiable(&self, formulas: &[Formula]) -> Result<bool, EvalError> {
        satisfiable_pref(&self.suite, formulas)
    }
}

fn joined(a: &[Formula], b: &[Formula]) -> Vec<Formula> {
    a.iter().chain(b).cloned().collect()
}

/// Consistency and the three explainability conditions for one candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Validation {
    /// Background plus candidate is satisfiable and entails the observation.
    pub consistency: bool,
    /// (background does not entail, candidate alone does not entail,
    /// background plus candidate entails).
    pub explainability: (bool, bool, bool),
}

impl Validation {
    pub fn passes(&self) -> bool {
        let (a, b, c) = self.explainability;
        self.consistency && a && b && c
    }
}

/// Checks a candidate (any list of formulas) against the problem.
pub fn validate(
    p: &AbductionProblem,
    suite: &[PlausibilityModel],
    candidate: &[Formula],
) -> Result<Validation, AbductionError> {
    let ctx = EvaluationContext::new(p.background.clone());
    let judge = Judge::new(suite, &ctx, p.reading)?;
    validate_with(&judge, &p.background, &p.observation, candidate)
}

fn validate_with(
    judge: &Judge<'_>,
    theta: &[Formula],
    alpha: &Formula,
    candidate: &[Formula],
) -> Result<Validation, AbductionError> {
    let both = joined(theta, candidate);
    let combined = judge.entails(&both, alpha)?;
    Ok(Validation {
        consistency: judge.satisfiable(&both)? && combined,
        explainability: (!judge.entails(theta, alpha)?, !judge.entails(candidate, alpha)?, combined),
    })
}

/// Validation of every candidate in the candidate space.
pub fn validate_problem(
    p: &AbductionProblem,
    suite: &[PlausibilityModel],
) -> Result<Vec<(Explanation, Validation)>, AbductionError> {
    let ctx = EvaluationContext::new(p.background.clone());
    let judge = Judge::new(suite, &ctx, p.reading)?;
    candidate_space(p)
        .into_iter()
        .map(|c| Ok((c.clone(), validate_with(&judge, &p.background, &p.observation, &c.formulas())?)))
        .collect()
}

/// The minimal explanations of a problem, in candidate order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplanationFamily {
    pub problem: AbductionProblem,
    pub explanations: Vec<Explanation>,
}

/// Candidates `D` with `theta, D |=≺ alpha` that pass the checks and have no
/// proper nonempty subset that already preferentially entails `alpha`.
fn build_family(
    judge: &Judge<'_>,
    p: &AbductionProblem,
    theta: &[Formula],
    alpha: &Formula,
    explainability: bool,
) -> Result<Vec<Explanation>, AbductionError> {
    let mut pref: BTreeMap<Explanation, bool> = BTreeMap::new();
    let mut out = Vec::new();
    for c in candidate_space(p) {
        let premises = joined(theta, &c.formulas());
        let ok = judge.pref_entails(&premises, alpha)?;
        pref.insert(c.clone(), ok);
        if !ok {
            continue;
        }
        let checked = if explainability {
            validate_with(judge, theta, alpha, &c.formulas())?.passes()
        } else {
            judge.satisfiable(&premises)? && judge.entails(&premises, alpha)?
        };
        if !checked {
            continue;
        }
        let mut redundant = false;
        for size in 1..c.len() {
            for_each_combination(c.len(), size, &mut |idx| {
                let sub = Explanation { literals: idx.iter().map(|&i| c.literals[i].clone()).collect() };
                redundant |= pref.get(&sub).copied().unwrap_or(false);
            });
        }
        if !redundant {
            out.push(c);
        }
    }
    Ok(out)
}

/// Enumerates the family. Fails if the background alone already entails
/// the observation on the suite.
pub fn enumerate_explanations(
    p: &AbductionProblem,
    suite: &[PlausibilityModel],
) -> Result<ExplanationFamily, AbductionError> {
    if candidate_space(p).is_empty() {
        return Err(AbductionError::EmptyCandidateSpace);
    }
    let ctx = EvaluationContext::new(p.background.clone());
    let judge = Judge::new(suite, &ctx, p.reading)?;
    if judge.entails(&p.background, &p.observation)? {
        return Err(AbductionError::AlreadyExplained(p.observation.clone()));
    }
    let explanations = build_family(&judge, p, &p.background, &p.observation, true)?;
    Ok(ExplanationFamily { problem: p.clone(), explanations })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Subset,
    Cardinality,
    #[default]
    Priorization,
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "subset" => Ok(Strategy::Subset),
            "cardinality" => Ok(Strategy::Cardinality),
            "priorization" | "prioritization" => Ok(Strategy::Priorization),
            _ => Err(format!("unknown strategy `{s}` (expected subset, cardinality or priorization)")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Subset => "subset",
            Strategy::Cardinality => "cardinality",
            Strategy::Priorization => "priorization",
        })
    }
}

/// How two explanations are compared under priorization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorityComparison {
    /// Sorted level vectors compared lexicographically, so the best level
    /// decides first. Only strictly better sets exclude.
    #[default]
    Lexicographic,
    /// `D' ⊑ D` iff some level of `D'` is at most some level of `D`; any
    /// other member below `D` excludes it. Nearly every pair is related, so
    /// this usually selects nothing.
    Literal,
}

fn levels(e: &Explanation, priorities: &BTreeMap<String, u32>) -> Result<Vec<u32>, AbductionError> {
    let mut v = e
        .literals
        .iter()
        .map(|l| priorities.get(&l.atom).copied().ok_or_else(|| AbductionError::MissingPriority(l.atom.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    v.sort_unstable();
    Ok(v)
}

fn select_from(
    explanations: &[Explanation],
    priorities: Option<&BTreeMap<String, u32>>,
    strategy: Strategy,
    comparison: PriorityComparison,
) -> Result<Vec<Explanation>, AbductionError> {
    Ok(match strategy {
        Strategy::Subset => {
            explanations.iter().filter(|d| !explanations.iter().any(|e| e.is_proper_subset(d))).cloned().collect()
        }
        Strategy::Cardinality => {
            let min = explanations.iter().map(Explanation::len).min().unwrap_or(0);
            explanations.iter().filter(|d| d.len() == min).cloned().collect()
        }
        Strategy::Priorization => {
            let pr = priorities.ok_or(AbductionError::NoPriorities)?;
            let lv = explanations.iter().map(|e| levels(e, pr)).collect::<Result<Vec<_>, _>>()?;
            let below = |i: usize, j: usize| match comparison {
                PriorityComparison::Lexicographic => lv[i] < lv[j],
                PriorityComparison::Literal => i != j && lv[i].first() <= lv[j].last(),
            };
            (0..explanations.len())
                .filter(|&j| !(0..explanations.len()).any(|i| below(i, j)))
                .map(|j| explanations[j].clone())
                .collect()
        }
    })
}

/// The members of the family chosen by `strategy`.
pub fn select(
    family: &ExplanationFamily,
    strategy: Strategy,
    comparison: PriorityComparison,
) -> Result<Vec<Explanation>, AbductionError> {
    select_from(&family.explanations, family.problem.priorities.as_ref(), strategy, comparison)
}

/// The selection strategy behind each derived consequence relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StarKind {
    S,
    C,
    P,
}

impl StarKind {
    pub fn strategy(self) -> Strategy {
        match self {
            StarKind::S => Strategy::Subset,
            StarKind::C => Strategy::Cardinality,
            StarKind::P => Strategy::Priorization,
        }
    }
}

impl FromStr for StarKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "s" => Ok(StarKind::S),
            "c" => Ok(StarKind::C),
            "p" => Ok(StarKind::P),
            _ => Err(format!("unknown consequence kind `{s}`")),
        }
    }
}

impl fmt::Display for StarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StarKind::S => "s",
            StarKind::C => "c",
            StarKind::P => "p",
        })
    }
}

/// `gamma |=≺* f`. The premises split into hypothesis literals `H` and the
/// rest `B`, which must include the problem background. The answer is the
/// selected explanation `D ⊆ H` of `<B, f>` with `D |=≺ f`, if any.
///
/// The family for `<B, f>` uses the preferential and consistency checks and
/// irredundancy but not explainability, so `f` may already follow from `B`.
pub fn star_witness(
    kind: StarKind,
    p: &AbductionProblem,
    suite: &[PlausibilityModel],
    gamma: &[Formula],
    f: &Formula,
) -> Result<Option<Explanation>, AbductionError> {
    for t in &p.background {
        if !gamma.contains(t) {
            return Err(AbductionError::BackgroundNotInPremises(t.clone()));
        }
    }
    let mut hyps = Vec::new();
    let mut rest = Vec::new();
    for g in gamma {
        match p.is_hypothesis_literal(g) {
            Some(l) => hyps.push(l),
            None => rest.push(g.clone()),
        }
    }
    let ctx = EvaluationContext::new(p.background.clone());
    let judge = Judge::new(suite, &ctx, p.reading)?;
    let family = build_family(&judge, p, &rest, f, false)?;
    let chosen = select_from(&family, p.priorities.as_ref(), kind.strategy(), PriorityComparison::default())?;
    for d in chosen {
        if d.literals.iter().all(|l| hyps.contains(l)) && judge.pref_entails(&d.formulas(), f)? {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

pub fn star_consequence(
    kind: StarKind,
    p: &AbductionProblem,
    suite: &[PlausibilityModel],
    gamma: &[Formula],
    f: &Formula,
) -> Result<bool, AbductionError> {
    Ok(star_witness(kind, p, suite, gamma, f)?.is_some())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceRow {
    pub explanation: Explanation,
    /// No proper subset, the empty set included, entails the observation
    /// together with the background.
    pub subset_minimal: bool,
    pub preferential: bool,
}

impl EquivalenceRow {
    pub fn agrees(&self) -> bool {
        self.subset_minimal == self.preferential
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub rows: Vec<EquivalenceRow>,
    pub violations: usize,
    pub subset_selection: Vec<Explanation>,
    pub cardinality_selection: Vec<Explanation>,
    pub selections_coincide: bool,
}

/// For each family member, compares subset-minimality under plain
/// consequence with preferential consequence of the observation.
pub fn subset_pref_equivalence(
    p: &AbductionProblem,
    suite: &[PlausibilityModel],
) -> Result<EquivalenceReport, AbductionError> {
    let family = enumerate_explanations(p, suite)?;
    let ctx = EvaluationContext::new(p.background.clone());
    let judge = Judge::new(suite, &ctx, p.reading)?;
    let mut rows = Vec::new();
    for d in &family.explanations {
        let mut subset_minimal = !judge.entails(&p.background, &p.observation)?;
        for size in 1..d.len() {
            let mut subs = Vec::new();
            for_each_combination(d.len(), size, &mut |idx| {
                subs.push(idx.iter().map(|&i| d.literals[i].formula()).collect::<Vec<_>>());
            });
            for s in subs {
                subset_minimal &= !judge.entails(&joined(&p.background, &s), &p.observation)?;
            }
        }
        let preferential = judge.pref_entails(&joined(&p.background, &d.formulas()), &p.observation)?;
        rows.push(EquivalenceRow { explanation: d.clone(), subset_minimal, preferential });
    }
    let subset_selection = select(&family, Strategy::Subset, PriorityComparison::default())?;
    let cardinality_selection = select(&family, Strategy::Cardinality, PriorityComparison::default())?;
    Ok(EquivalenceReport {
        violations: rows.iter().filter(|r| !r.agrees()).count(),
        rows,
        selections_coincide: subset_selection == cardinality_selection,
        subset_selection,
        cardinality_selection,
    })
}
