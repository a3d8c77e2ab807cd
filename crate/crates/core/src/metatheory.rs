//! Randomized search for counterexamples to claims about the logic.
//!
//! Each property generates a self-contained [`Instance`] from a seeded
//! model and checks it. Instances serialize to JSON, so every reported
//! counterexample can be replayed. A passing audit is finite evidence, not
//! a proof.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abduction::{self, AbductionError, AbductionProblem, StarKind};
use crate::document::{DocumentError, ModelDocument};
use crate::formula::Formula;
use crate::kripke::{
    self, characteristic_formula, is_definable, EvalError, EvaluationContext, KripkeModel, WitnessMode,
};
use crate::preferential::{self, MinimalReading, OrderCheck, PlausibilityModel, StrictOrder};
use crate::worldset::WorldSet;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AuditError {
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error("invalid audit bounds: {0}")]
    Bounds(String),
    #[error("instance model: {0}")]
    Document(#[from] DocumentError),
    #[error("instance model: {0}")]
    Model(#[from] crate::kripke::ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Abduction(#[from] AbductionError),
    #[error("instance is missing {0}")]
    Malformed(&'static str),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameClass {
    #[default]
    Arbitrary,
    Reflexive,
    S5,
    /// Arbitrary relation; named for the transitive connected plausibility
    /// order that every generated model carries anyway.
    Order,
}

impl FromStr for FrameClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "arbitrary" => Ok(FrameClass::Arbitrary),
            "reflexive" => Ok(FrameClass::Reflexive),
            "s5" | "S5" => Ok(FrameClass::S5),
            "order" => Ok(FrameClass::Order),
            _ => Err(format!("unknown frame class `{s}` (expected arbitrary, reflexive, s5 or order)")),
        }
    }
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameClass::Arbitrary => "arbitrary",
            FrameClass::Reflexive => "reflexive",
            FrameClass::S5 => "s5",
            FrameClass::Order => "order",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_worlds: usize,
    pub max_atoms: usize,
    pub formula_depth: usize,
    pub frame: FrameClass,
    /// Count only non-vacuous trials towards `trials`, giving up after
    /// twenty times as many attempts.
    pub count_non_vacuous: bool,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            seed: 0,
            trials: 1000,
            max_worlds: 5,
            max_atoms: 4,
            formula_depth: 3,
            frame: FrameClass::Arbitrary,
            count_non_vacuous: false,
        }
    }
}

impl AuditConfig {
    pub fn validate(&self) -> Result<(), AuditError> {
        if self.trials == 0 || self.max_worlds == 0 || self.max_atoms == 0 || self.formula_depth == 0 {
            return Err(AuditError::Bounds("trials, worlds, atoms and depth must be positive".into()));
        }
        if self.max_worlds > crate::worldset::MAX_WORLDS {
            return Err(AuditError::Bounds(format!("at most {} worlds", crate::worldset::MAX_WORLDS)));
        }
        Ok(())
    }
}

const ATOM_NAMES: [&str; 8] = ["p", "q", "r", "s", "t", "u", "v", "x"];

fn atom_name(i: usize) -> String {
    ATOM_NAMES.get(i).map_or_else(|| format!("a{i}"), |s| s.to_string())
}

fn rng_for(cfg: &AuditConfig, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial);
    rng
}

fn random_model(cfg: &AuditConfig, rng: &mut ChaCha8Rng) -> PlausibilityModel {
    let n = rng.gen_range(1..=cfg.max_worlds);
    let k = rng.gen_range(1..=cfg.max_atoms);
    let worlds: Vec<String> = (1..=n).map(|i| format!("w{i}")).collect();
    let mut edges = Vec::new();
    match cfg.frame {
        FrameClass::S5 => {
            let class: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            for a in 0..n {
                for b in 0..n {
                    if class[a] == class[b] {
                        edges.push((worlds[a].clone(), worlds[b].clone()));
                    }
                }
            }
        }
        _ => {
            for a in 0..n {
                for b in 0..n {
                    let forced = cfg.frame == FrameClass::Reflexive && a == b;
                    if forced || rng.gen_bool(0.4) {
                        edges.push((worlds[a].clone(), worlds[b].clone()));
                    }
                }
            }
        }
    }
    let atoms: Vec<String> = (0..k).map(atom_name).collect();
    let val: Vec<(String, Vec<String>)> =
        atoms.iter().map(|a| (a.clone(), worlds.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect())).collect();
    let base = KripkeModel::new(&worlds, &edges, &val, &atoms).expect("generated model is well formed");
    let mut ranking: Vec<usize> = (0..n).collect();
    ranking.shuffle(rng);
    PlausibilityModel::new(base, StrictOrder::from_ranking(&ranking), OrderCheck::Strict)
        .expect("a ranking is a strict total order")
}

/// The model for `trial`, determined by the seed and trial number alone.
pub fn generate_model(cfg: &AuditConfig, trial: u64) -> PlausibilityModel {
    random_model(cfg, &mut rng_for(cfg, trial))
}

/// Random formulas over a fixed atom list.
struct Gen<'a> {
    rng: &'a mut ChaCha8Rng,
    atoms: Vec<String>,
    depth: usize,
}

impl Gen<'_> {
    fn atom(&mut self) -> Formula {
        Formula::atom(self.atoms.choose(self.rng).expect("nonempty vocabulary").clone())
    }

    fn objective(&mut self) -> Formula {
        let d = self.rng.gen_range(0..=self.depth);
        self.objective_at(d)
    }

    fn objective_at(&mut self, depth: usize) -> Formula {
        if depth == 0 {
            return match self.rng.gen_range(0..20) {
                0 => Formula::True,
                1 => Formula::False,
                _ => self.atom(),
            };
        }
        match self.rng.gen_range(0..5) {
            0 => self.atom(),
            1 => Formula::not(self.objective_at(depth - 1)),
            2 => Formula::and(self.objective_at(depth - 1), self.objective_at(depth - 1)),
            3 => Formula::or(self.objective_at(depth - 1), self.objective_at(depth - 1)),
            _ => Formula::implies(self.objective_at(depth - 1), self.objective_at(depth - 1)),
        }
    }

    /// Any formula; `pref` admits the conditional `>`.
    fn modal(&mut self, pref: bool) -> Formula {
        let d = self.rng.gen_range(0..=self.depth);
        self.modal_at(d, pref)
    }

    fn modal_at(&mut self, depth: usize, pref: bool) -> Formula {
        if depth == 0 {
            return self.atom();
        }
        let sub = depth - 1;
        match self.rng.gen_range(0..if pref { 10 } else { 9 }) {
            0 => self.atom(),
            1 => Formula::not(self.modal_at(sub, pref)),
            2 => Formula::and(self.modal_at(sub, pref), self.modal_at(sub, pref)),
            3 => Formula::or(self.modal_at(sub, pref), self.modal_at(sub, pref)),
            4 => Formula::implies(self.modal_at(sub, pref), self.modal_at(sub, pref)),
            5 => Formula::knows(self.modal_at(sub, pref)),
            6 => Formula::only(self.objective_at(sub)),
            7 | 8 => Formula::abd(self.objective_at(sub)),
            _ => Formula::pref(self.modal_at(sub, pref), self.modal_at(sub, pref)),
        }
    }
}

/// A boolean formula true exactly on the valuation classes meeting `set`,
/// so it holds on at least `set`.
fn covering(m: &KripkeModel, set: WorldSet) -> Formula {
    characteristic_formula(m, set)
}

/// A random superset of `set`.
fn widen(rng: &mut ChaCha8Rng, n: usize, set: WorldSet) -> WorldSet {
    let mut out = set;
    for w in 0..n {
        if rng.gen_bool(0.3) {
            out.insert(w);
        }
    }
    out
}

/// Points `R(w)` at `set`, keeping the model otherwise unchanged.
fn rewire(m: &PlausibilityModel, w: usize, set: WorldSet) -> PlausibilityModel {
    let base = &m.base;
    let names = base.world_names();
    let mut edges: Vec<(String, String)> =
        base.edges().into_iter().filter(|&(a, _)| a != w).map(|(a, b)| (names[a].clone(), names[b].clone())).collect();
    edges.extend(set.iter().map(|b| (names[w].clone(), names[b].clone())));
    let vocab: Vec<String> = base.vocabulary().iter().cloned().collect();
    let val: Vec<(String, Vec<String>)> =
        vocab.iter().map(|a| (a.clone(), base.atom_set(a).iter().map(|u| names[u].clone()).collect())).collect();
    let mut nb = KripkeModel::new(names, &edges, &val, &vocab).expect("rewired model is well formed");
    if let Some(a) = base.actual() {
        nb = nb.with_actual(&names[a]).expect("actual world kept");
    }
    PlausibilityModel::new(nb, m.order().clone(), OrderCheck::Strict).expect("order unchanged")
}

/// One checkable case: a model file (with background and hypotheses) plus
/// the formulas the property talks about.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub model: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub priorities: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<Formula>,
    #[serde(default)]
    pub formulas: Vec<Formula>,
}

impl Instance {
    fn build(m: &PlausibilityModel, theory: Vec<Formula>, premises: Vec<Formula>, formulas: Vec<Formula>) -> Self {
        let mut doc = ModelDocument::from_kripke(&m.base, Some(m.order()));
        doc.theory = theory;
        Instance { model: doc.to_text(), priorities: BTreeMap::new(), premises, formulas }
    }

    fn formula(&self, i: usize) -> Result<&Formula, AuditError> {
        self.formulas.get(i).ok_or(AuditError::Malformed("a formula"))
    }
}

/// A parsed instance ready for evaluation.
pub struct Loaded<'a> {
    pub instance: &'a Instance,
    pub doc: ModelDocument,
    pub model: PlausibilityModel,
    pub ctx: EvaluationContext,
}

impl<'a> Loaded<'a> {
    pub fn new(instance: &'a Instance) -> Result<Self, AuditError> {
        let doc = ModelDocument::parse(&instance.model)?;
        let model = doc.plausibility(OrderCheck::Strict)?.ok_or(AuditError::Malformed("a plausibility order"))?;
        let ctx = doc.context();
        Ok(Loaded { instance, doc, model, ctx })
    }

    fn kripke(&self) -> &KripkeModel {
        &self.model.base
    }

    fn name(&self, w: usize) -> &str {
        self.model.base.world_name(w)
    }

    fn ts(&self, f: &Formula) -> Result<WorldSet, AuditError> {
        Ok(preferential::truth_set_pref(&self.model, &self.ctx, f)?)
    }

    fn support(&self, fs: &[Formula]) -> Result<WorldSet, AuditError> {
        let mut s = self.model.base.all();
        for f in fs {
            s = s.intersection(self.ts(f)?);
        }
        Ok(s)
    }

    fn local(&self, premises: &[Formula], f: &Formula) -> Result<bool, AuditError> {
        Ok(self.support(premises)?.is_subset(self.ts(f)?))
    }

    fn pref(&self, premises: &[Formula], f: &Formula) -> Result<bool, AuditError> {
        Ok(preferential::preferential_consequence(
            &[(&self.model, &self.ctx)],
            premises,
            f,
            MinimalReading::PremiseMinimal,
        )?)
    }

    fn problem(&self) -> AbductionProblem {
        let mut p = AbductionProblem::new(self.doc.theory.clone(), Formula::True, self.doc.hypotheses.clone());
        if !self.instance.priorities.is_empty() {
            p.priorities = Some(self.instance.priorities.clone());
        }
        p
    }

    fn star(&self, kind: StarKind, premises: &[Formula], f: &Formula) -> Result<bool, AuditError> {
        Ok(abduction::star_consequence(kind, &self.problem(), std::slice::from_ref(&self.model), premises, f)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "detail", rename_all = "lowercase")]
pub enum Outcome {
    /// The property's hypothesis never applied.
    Vacuous,
    Holds,
    /// Holds, but the case is worth showing (for example an empty
    /// restriction).
    Exhibit(String),
    Violated(String),
}

fn verdict_from(violations: Vec<String>, applied: bool) -> Outcome {
    if let Some(first) = violations.into_iter().next() {
        Outcome::Violated(first)
    } else if applied {
        Outcome::Holds
    } else {
        Outcome::Vacuous
    }
}

type Generator = fn(&AuditConfig, &mut ChaCha8Rng, PlausibilityModel) -> Instance;
type Checker = fn(&Loaded<'_>) -> Result<Outcome, AuditError>;

pub struct Property {
    pub name: &'static str,
    pub summary: &'static str,
    /// Frame class used when the caller does not choose one.
    pub frame: FrameClass,
    generate: Generator,
    check: Checker,
}

impl fmt::Debug for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Property").field("name", &self.name).finish()
    }
}

fn gen<'a>(cfg: &AuditConfig, rng: &'a mut ChaCha8Rng, m: &KripkeModel) -> Gen<'a> {
    Gen { rng, atoms: m.vocabulary().iter().cloned().collect(), depth: cfg.formula_depth }
}

fn can_rewire(cfg: &AuditConfig) -> bool {
    matches!(cfg.frame, FrameClass::Arbitrary | FrameClass::Order)
}

/// A background of one or two formulas, usually arranged so that the
/// agent only-knows the whole background at some world.
fn steered_background(
    cfg: &AuditConfig,
    rng: &mut ChaCha8Rng,
    m: PlausibilityModel,
    implications: bool,
) -> (PlausibilityModel, Vec<Formula>) {
    let n = m.base.len();
    let count = rng.gen_range(1..=2);
    let mut theory = Vec::new();
    {
        let mut g = gen(cfg, rng, &m.base);
        for _ in 0..count {
            theory.push(if implications { Formula::implies(g.objective(), g.objective()) } else { g.objective() });
        }
    }
    let w = rng.gen_range(0..n);
    if can_rewire(cfg) && rng.gen_bool(0.8) {
        let ctx = EvaluationContext::new(theory.clone());
        let mut target = m.base.all();
        for t in &theory {
            target = target.intersection(kripke::truth_set(&m.base, &ctx, t).expect("objective"));
        }
        return (rewire(&m, w, target), theory);
    }
    let r = m.base.successors(w);
    if !implications && is_definable(&m.base, r) && rng.gen_bool(0.8) {
        theory[0] = covering(&m.base, r);
        theory.truncate(1);
    }
    (m, theory)
}

fn pref_truth(m: &PlausibilityModel, ctx: &EvaluationContext, fs: &[Formula]) -> WorldSet {
    let mut s = m.base.all();
    for f in fs {
        s = s.intersection(preferential::truth_set_pref(m, ctx, f).expect("generated formulas are well formed"));
    }
    s
}

/// Usually a formula covering a random superset of `target`, otherwise a
/// random one.
fn aimed(cfg: &AuditConfig, rng: &mut ChaCha8Rng, m: &PlausibilityModel, target: WorldSet, modal: bool) -> Formula {
    if rng.gen_bool(0.6) {
        let set = widen(rng, m.base.len(), target);
        covering(&m.base, set)
    } else if modal && rng.gen_bool(0.4) {
        gen(cfg, rng, &m.base).modal(true)
    } else {
        gen(cfg, rng, &m.base).objective()
    }
}

fn world_list(l: &Loaded<'_>, set: WorldSet) -> String {
    set.iter().map(|w| l.name(w).to_string()).collect::<Vec<_>>().join(", ")
}

/// Premises entail `formulas[0]` locally.
fn check_local_entailment(l: &Loaded<'_>) -> Result<Outcome, AuditError> {
    let support = l.support(&l.instance.premises)?;
    let bad = support.difference(l.ts(l.instance.formula(0)?)?);
    let violations = if bad.is_empty() {
        vec![]
    } else {
        vec![format!("premises hold but conclusion fails at {}", world_list(l, bad))]
    };
    Ok(verdict_from(violations, !support.is_empty()))
}

fn gen_prop1(cfg: &AuditConfig, rng: &mut ChaCha8Rng, m: PlausibilityModel) -> Instance {
    let w = rng.gen_range(0..m.base.len());
    let r = m.base.successors(w);
    let phi = if is_definable(&m.base, r) && rng.gen_bool(0.7) {
        covering(&m.base, r)
    } else {
        gen(cfg, rng, &m.base).objective()
    };
    let psi = if rng.gen_bool(0.5) {
        gen(cfg, rng, &m.base).objective()
    } else {
        Formula::or(Formula::not(phi.clone()), gen(cfg, rng, &m.base).objective())
    };
    let rule = Formula::implies(psi.clone(), phi.clone());
    Instance::build(
        &m,
        vec![phi.clone(), rule.clone()],
        vec![Formula::only(phi), Formula::only(rule)],
        vec![Formula::abd(psi)],
    )
}

fn gen_prop2<const KIND: u8>(cfg: &AuditConfig, rng: &mut ChaCha8Rng, m: PlausibilityModel) -> Instance {
    let (m, theory) = steered_background(cfg, rng, m, false);
    let mut g = gen(cfg, rng, &m.base);
    let (phi, psi) = (g.objective(), g.objective());
    let (premises, conclusion) = match KIND {
        0 => (vec![Formula::abd(phi.clone()), Formula::abd(psi.clone())], Formula::and(phi, psi)),
        1 => (vec![Formula::abd(phi.clone()), Formula::abd(psi.clone())], Formula::or(phi, psi)),
        _ => (vec![Formula::abd(phi.clone()), Formula::abd(Formula::implies(phi, psi.clone()))], psi),
    };
    Instance::build(&m, theory, premises, vec![Formula::abd(conclusion)])
}

fn gen_background_and_g(cfg: &AuditConfig, rng: &mut ChaCha8Rng, m: PlausibilityModel) -> Instance {
    let (m, theory) = steered_background(cfg, rng, m, false);
    let g = gen(cfg, rng, &m.base).objective();
    Instance::build(&m, theory, vec![], vec![g])
}

fn check_theorem1(l: &Loaded<'_>) -> Result<Outcome, AuditError> {
    let g = l.instance.formula(0)?;
    let m = l.kripke();
    let mut applied = false;
    let mut violations = Vec::new();
    for mode in [WitnessMode::Subsets, WitnessMode::Conjunction] {
        let ctx = l.ctx.clone().with_mode(mode);
        if ctx.background.is_empty() {
            continue;
        }
        for w in kripke::truth_set(m, &ctx, &Formula::abd(g.clone()))?.iter() {
            applied = true;
            let alpha = match mode {
                WitnessMode::Conjunction => kripke::canonical_alpha(&ctx),
                _ => kripke::abduction_witness(m, &ctx, w, g)?,
            };
            let ok = match &alpha {
                Some(a) => {
                    kripke::satisfies(m, &ctx, w, &Formula::only(a.clone()))?
                        && kripke::satisfies(m, &ctx, w, &Formula::knows(Formula::implies(g.clone(), a.clone())))?
                }
                None => false,
            };
            if !ok {
                violations.push(format!("A {g} holds at {} in {mode} mode without a valid witness", l.name(w)));
            }
        }
    }
    Ok(verdict_from(violations, applied))
}

fn gen_theorem2(cfg: &AuditConfig, rng: &mut ChaCha8Rng, m: PlausibilityModel) -> Instance {
    let (m, theory) = steered_background(cfg, rng, m, true);
    let mut g = gen(cfg, rng, &m.base);
    let (phi, obs) = (g.objective(), g.objective());
    Instance::build(&m, theory, vec![], vec![phi, obs])
}

fn check_theorem2(l: &Loaded<'_>) -> Result<Outcome, AuditError> {
    let (g, obs) = (l.instance.formula(0)?, l.instance.formula(1)?);
    let abd = kripke::truth_set(l.kripke(), &l.ctx, &Formula::abd(g.clone()))?;
    if abd.is_empty() || l.ctx.background.is_empty() || l.local(&l.ctx.background, obs)? {
        return Ok(Outcome::Vacuous);
    }
    let mut p = AbductionProblem::new(l.ctx.background.clone(), obs.clone(), vec![]);
    p.reading = MinimalReading::PremiseMinimal;
    let v = abduction::validate(&p, std::slice::from_ref(&l.model), std::slice::from_ref(g))?;
    Ok(if v.passes() {
        Outcome::Holds
    } else {
        Outcome::Violated(format!(
            "A {g} holds at {} but for observation {obs}: consistency {}, explainability {:?}",
            world_list(l, abd),
            v.consistency,
            v.explainability
        ))
    })
}

/// A background `[psi]` that is only-known at some world where `phi` is
/// known to be false.
fn gen_vacuous_abduction(cfg: &AuditConfig, rng: &mut ChaCha8Rng, m: PlausibilityModel) -> Instance {
    let w = rng.gen_range(0..m.base.len());
    let psi = gen(cfg, rng, &m.base).objective();
    let ctx = EvaluationContext::new(vec![psi.clone()]);
    let m = if can_rewire(cfg) {
        let target = kripke::truth_set(&m.base, &ctx, &psi).expect("objective");
        rewire(&m, w, target)
    } else {
        m
    };
    let mut phi = gen(cfg, rng, &m.base).objective();
    if rng.gen_bool(0.8) {
        phi = Formula::and(phi, Formula::not(psi.clone()));
    }
    Instance::build(&m, vec![psi], vec![], vec![phi])
}

fn check_theorem3(l: &Loaded<'_>) -> Result<Outcome, AuditError> {
    let phi = l.instance.formula(0)?;
    let before = kripke::nonvacuity_violations(l.kripke(), &l.ctx, phi)?;
    if before.is_empty() {
        return Ok(Outcome::Vacuous);
    }
    match kripke::restrict_nonvacuous(l.kripke(), &l.ctx, phi)? {
        None => Ok(Outcome::Exhibit(format!(
            "A ({phi}) & K ~({phi}) at {}; no world satisfies the background and {phi}",
            world_list(l, before)
        ))),
        Some(r) => {
            let after = kripke::nonvacuity_violations(&r.model, &l.ctx, phi)?;
            Ok(if after.is_empty() {
                Outcome::Holds
            } else {
                let names: Vec<&str> = after.iter().map(|w| r.model.world_name(w)).collect();
                Outcome::Violated(format!(
                    "A ({phi}) & K ~({phi}) still holds at {} after restriction",
                    names.join(", ")
                ))
            })
        }
    }
}

fn check_prop3(l: &Loaded<'_>) -> Result<Outcome, AuditError> {
    let phi = l.instance.formula(0)?;
    let abd = kripke::truth_set(l.kripke(), &l.ctx, &Formula::abd(phi.clone()))?;
    let bad = kripke::nonvacuity_violations(l.kripke(), &l.ctx, phi)?;
    let violations =
        if bad.is_empty() { vec![] } else { vec![format!("A ({phi}) & K ~({phi}) at {}", world_list(l, bad))] };
    Ok(verdict_from(violations, !abd.is_empty()))
}

fn gen_restriction<const MODAL: bool>(cfg: &AuditConfig, rng: &mut ChaCha8Rng, m: PlausibilityModel) -> Instance {
    let (m, theory) = steered_background(cfg, rng, m, false);
    let mut g = gen(cfg, rng, &m.base);
    let phi = g.objective();
    let f = if MODAL { g.modal(false) } else { g.objective() };
    Instance::build(&m, theory, vec![], vec![phi, f])
}

/// Truth of `f` at retained worlds survives the restriction.
fn preserved(l: &Loaded<'_>, sub: &KripkeModel, mapping: &[usize], f: &Formula) -> Result<Outcome, AuditError> {
    let before = kripke::truth_set(l.kripke(), &l.ctx, f)?;
    let after = kripke::truth_set(sub, &l.ctx, f)?;
    let lost: Vec<&str> = mapping
        .iter()
        .enumerate()
        .filter(|&(new, &old)| before.contains(old) && !after.contains(new))
        .map(|(_, &old)| l.name(old))
        .collect();
    Ok(if lost.is_empty() {
        Outcome::Holds
    } else {
        Outcome::Violated(format!("{f} true at {} before but not after", lost.join(", ")))
    })
}

fn check_lemma2(l: &Loaded<'_>) -> Result<Outcome, AuditError> {
    let (phi, f) = (l.instance.formula(0)?, l.instance.formula(1)?);
    match kripke::restrict_nonvacuous(l.kripke(), &l.ctx, phi)? {
        None => Ok(Outcome::Vacuous),
        Some(r) => preserved(l, &r.model, &r.mapping, f),
    }
}

fn gen_minimal<const MODAL: bool>(cfg: &AuditConfig, rng: &mut ChaCha8Rng, m: PlausibilityModel) -> Instance {
    let (m, theory) = steered_background(cfg, rng, m, false);
    let mut g = gen(cfg, rng, &m.base);
    let f = if MODAL { g.modal(false) } else { g.objective() };
    Instance::build(&m, theory, vec![], vec![f])
}

fn check_lemma4(l: &Loaded<'_>) -> Result<Outcome, AuditError> {
    let mm = preferential::minimal_model(&l.model);
    preserved(l, &mm.model, &mm.mapping, l.instance.formula(0)?)
}

fn check_lemma3(l: &Loaded<'_>) -> Result<Outcome, AuditError> {
    let mm = preferential::minimal_model(&l.model);
    let order = l.model.order();
    for &a in &mm.mapping {
        for &b in &mm.mapping {
            if order.precedes(a, b) {
                return Ok(Outcome::Violated(format!("{} < {} inside the minimal model", l.name(a), l.name(b))));
            }
        }
    }
    Ok(if mm.mapping.is_empty() { Outcome::Violated("minimal model is empty".into()) } else { Outcome::Holds })
}

const SUPRA: u8 = 0;
const REFL: u8 = 1;
const CM: u8 = 2;
const CT: u8 = 3;
const MONO: u8 = 4;

const LOCAL: u8 = 0;
const PREF: u8 = 1;
const STAR_S: u8 = 2;
const STAR_C: u8 = 3;
const STAR_P: u8 = 4;

fn relation(l: &Loaded<'_>, rel: u8, premises: &[Formula], f: &Formula) -> Result<bool, AuditError> {
    match rel {
        LOCAL => l.local(premises, f),
        PREF => l.pref(premises, f),
        STAR_S => l.star(StarKind::S, premises, f),
        STAR_C => l.star(StarKind::C, premises, f),
        _ => l.star(StarKind::P, premises, f),
    }
}

fn with(gamma: &[Formula], f: &Formula) -> Vec<Formula> {
    gamma.iter().chain(std::iter::once(f)).cloned().collect()
}

fn check_consequence<const REL: u8, const P: u8>(l: &Loaded<'_>) -> Result<Outcome, AuditError> {
    let gamma = &l.instance.premises;
    let rel = |prem: &[Formula], f: &Formula| relation(l, REL, prem, f);
    let f0 = l.instance.formula(0)?;
    let (applies, conclusion, claim) = match P {
        SUPRA => {
            let a = l.local(gamma, f0)?;
            (a, a && rel(gamma, f0)?, format!("premises entail {f0} but not under the relation"))
        }
        REFL => (true, rel(gamma, f0)?, format!("{f0} is a premise but does not follow")),
        _ => {
            let (phi, psi) = (f0, l.instance.formula(1)?);
            match P {
                CM => {
                    let a = rel(gamma, psi)? && rel(gamma, phi)?;
                    (
                        a,
                        a && rel(&with(gamma, phi), psi)?,
                        format!("{psi} and {phi} follow, but adding {phi} loses {psi}"),
                    )
                }
                CT => {
                    let a = rel(gamma, phi)? && rel(&with(gamma, phi), psi)?;
                    (a, a && rel(gamma, psi)?, format!("{phi} follows and with it {psi}, but {psi} does not follow"))
                }
                _ => {
                    let a = rel(gamma, psi)?;
                    (a, a && rel(&with(gamma, phi), psi)?, format!("{psi} follows, but adding {phi} loses it"))
                }
            }
        }
    };
    Ok(if !applies {
        Outcome::Vacuous
    } else if conclusion {
        Outcome::Holds
    } else {
        Outcome::Violated(claim)
    })
}

fn gen_consequence<const REL: u8, const P: u8>(
    cfg: &AuditConfig,
    rng: &mut ChaCha8Rng,
    m: PlausibilityModel,
) -> Instance {
    let (m, theory) = steered_background(cfg, rng, m, false);
    let ctx = EvaluationContext::new(theory.clone());
    let count = rng.gen_range(1..=2);
    let gamma: Vec<Formula> = (0..count)
        .map(|_| {
            let mut g = gen(cfg, rng, &m.base);
            if g.rng.gen_bool(0.7) {
                g.objective()
            } else {
                g.modal(REL != LOCAL)
            }
        })
        .collect();
    let support = pref_truth(&m, &ctx, &gamma);
    let target = |fs: &[Formula]| {
        let s = pref_truth(&m, &ctx, fs);
        if REL == LOCAL {
            s
        } else {
            m.order().minimal_in(s)
        }
    };
    let modal = REL != LOCAL;
    let formulas = match P {
        SUPRA => vec![aimed(cfg, rng, &m, support, modal)],
        REFL => vec![gamma.choose(rng).expect("nonempty premises").clone()],
        CM => {
            let t = target(&gamma);
            vec![aimed(cfg, rng, &m, t, modal), aimed(cfg, rng, &m, t, modal)]
        }
        CT => {
            let phi = aimed(cfg, rng, &m, target(&gamma), modal);
            let t2 = target(&with(&gamma, &phi));
            let psi = aimed(cfg, rng, &m, t2, modal);
            vec![phi, psi]
        }
        _ => {
            let psi = aimed(cfg, rng, &m, target(&gamma), modal);
            let phi = gen(cfg, rng, &m.base).objective();
            vec![phi, psi]
        }
    };
    Instance::build(&m, theory, gamma, formulas)
}

/// A random abduction setting: the first atoms are hypotheses, each with a
/// rule `h -> c` in the background, and random priorities.
fn random_problem_model(
    cfg: &AuditConfig,
    rng: &mut ChaCha8Rng,
    m: PlausibilityModel,
    max_hyps: usize,
) -> (Instance, Vec<Formula>) {
    let atoms: Vec<String> = m.base.vocabulary().iter().cloned().collect();
    let nh = max_hyps.min(atoms.len().saturating_sub(1)).max(1);
    let hyps = atoms[..nh].to_vec();
    let rest: Vec<String> = if atoms.len() > nh { atoms[nh..].to_vec() } else { atoms.clone() };
    let mut consequents = Vec::new();
    let mut theory = Vec::new();
    for h in &hyps {
        let mut g = Gen { rng: &mut *rng, atoms: rest.clone(), depth: cfg.formula_depth.min(2) };
        let c = g.objective();
        theory.push(Formula::implies(Formula::atom(h.clone()), c.clone()));
        consequents.push(c);
    }
    let mut doc = ModelDocument::from_kripke(&m.base, Some(m.order()));
    doc.theory = theory;
    doc.hypotheses = hyps.clone();
    let priorities = hyps.iter().map(|h| (h.clone(), rng.gen_range(1..=3))).collect();
    (Instance { model: doc.to_text(), priorities, premises: vec![], formulas: vec![] }, consequents)
}

fn gen_star<const REL: u8, const P: u8>(cfg: &AuditConfig, rng: &mut ChaCha8Rng, m: PlausibilityModel) -> Instance {
    let (base, consequents) = random_problem_model(cfg, rng, m, 3);
    let doc = ModelDocument::parse(&base.model).expect("generated text parses");
    let hyps: Vec<Formula> = doc.hypotheses.iter().map(|h| Formula::atom(h.clone())).collect();
    let atoms: Vec<String> = doc.vocabulary().into_iter().collect();
    let mut last = base.clone();
    for _ in 0..6 {
        let mut gamma = doc.theory.clone();
        gamma.extend(hyps.iter().filter(|_| rng.gen_bool(0.6)).cloned());
        let draw = |rng: &mut ChaCha8Rng| -> Formula {
            match rng.gen_range(0..5) {
                0 => hyps.choose(rng).expect("hypotheses").clone(),
                1 => Formula::atom(atoms.choose(rng).expect("atoms").clone()),
                2 => consequents.choose(rng).expect("rules").clone(),
                3 if hyps.len() > 1 => Formula::and(hyps[0].clone(), hyps[1].clone()),
                _ => Gen { rng, atoms: atoms.clone(), depth: 1 }.objective(),
            }
        };
        let formulas = match P {
            REFL => vec![gamma.choose(rng).expect("background").clone()],
            SUPRA => vec![draw(rng)],
            _ => vec![draw(rng), draw(rng)],
        };
        let inst = Instance { premises: gamma, formulas, ..base.clone() };
        let applies = Loaded::new(&inst)
            .and_then(|l| check_consequence::<REL, P>(&l))
            .map(|o| o != Outcome::Vacuous)
            .unwrap_or(false);
        if applies {
            return inst;
        }
        last = inst;
    }
    last
}

fn gen_theorem8(cfg: &AuditConfig, rng: &mut ChaCha8Rng, m: PlausibilityModel) -> Instance {
    let mut m = m;
    let mut last = None;
    for _ in 0..10 {
        let (mut inst, consequents) = random_problem_model(cfg, rng, m, 3);
        let obs = if rng.gen_bool(0.6) {
            let a = consequents.choose(rng).expect("rules").clone();
            if rng.gen_bool(0.5) {
                Formula::and(a, consequents.choose(rng).expect("rules").clone())
            } else {
                a
            }
        } else {
            let doc = ModelDocument::parse(&inst.model).expect("generated text parses");
            Gen { rng, atoms: doc.vocabulary().into_iter().collect(), depth: cfg.formula_depth }.objective()
        };
        inst.formulas = vec![obs];
        let applies = Loaded::new(&inst).and_then(|l| theorem8_report(&l)).map(|r| r.is_some()).unwrap_or(false);
        if applies {
            return inst;
        }
        last = Some(inst);
        m = random_model(cfg, rng);
    }
    last.expect("at least one attempt")
}

fn theorem8_report(l: &Loaded<'_>) -> Result<Option<abduction::EquivalenceReport>, AuditError> {
    let mut p = l.problem();
    p.observation = l.instance.formula(0)?.clone();
    match abduction::subset_pref_equivalence(&p, std::slice::from_ref(&l.model)) {
        Ok(r) if r.rows.is_empty() => Ok(None),
        Ok(r) => Ok(Some(r)),
        Err(AbductionError::AlreadyExplained(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn check_theorem8(l: &Loaded<'_>) -> Result<Outcome, AuditError> {
    Ok(match theorem8_report(l)? {
        None => Outcome::Vacuous,
        Some(r) => match r.rows.iter().find(|row| !row.agrees()) {
            None => Outcome::Holds,
            Some(row) => Outcome::Violated(format!(
                "{}: subset-minimal {} but preferential {}",
                row.explanation, row.subset_minimal, row.preferential
            )),
        },
    })
}

fn check_coincide(l: &Loaded<'_>) -> Result<Outcome, AuditError> {
    Ok(match theorem8_report(l)? {
        None => Outcome::Vacuous,
        Some(r) if r.selections_coincide => Outcome::Holds,
        Some(r) => {
            let show = |v: &[abduction::Explanation]| v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ");
            Outcome::Violated(format!(
                "subset selection {} differs from cardinality selection {}",
                show(&r.subset_selection),
                show(&r.cardinality_selection)
            ))
        }
    })
}

macro_rules! prop {
    ($name:expr, $frame:ident, $gen:expr, $check:expr, $summary:expr) => {
        Property { name: $name, summary: $summary, frame: FrameClass::$frame, generate: $gen, check: $check }
    };
}

static PROPERTIES: &[Property] = &[
    prop!("prop1_reflexive_abduction", Reflexive, gen_prop1, check_local_entailment, "O p, O(q -> p) entail A q"),
    prop!("prop2_conjunction", Arbitrary, gen_prop2::<0>, check_local_entailment, "A p, A q entail A(p & q)"),
    prop!("prop2_disjunction", Arbitrary, gen_prop2::<1>, check_local_entailment, "A p, A q entail A(p | q)"),
    prop!("prop2_detachment", Arbitrary, gen_prop2::<2>, check_local_entailment, "A p, A(p -> q) entail A q"),
    prop!(
        "theorem1_witness",
        Arbitrary,
        gen_background_and_g,
        check_theorem1,
        "every A g has a background witness passing the O and K checks"
    ),
    prop!(
        "theorem2_consistency_explainability",
        Arbitrary,
        gen_theorem2,
        check_theorem2,
        "A g under an implication background makes g a consistent explanation"
    ),
    prop!(
        "theorem3_nonvacuity_after_restriction",
        Arbitrary,
        gen_vacuous_abduction,
        check_theorem3,
        "restriction removes every A p & K ~p world"
    ),
    prop!("prop3_nonvacuity", Arbitrary, gen_vacuous_abduction, check_prop3, "A p implies ~K ~p"),
    prop!(
        "lemma2_submodel_objective",
        Arbitrary,
        gen_restriction::<false>,
        check_lemma2,
        "restriction preserves boolean formulas"
    ),
    prop!(
        "lemma2_submodel_modal",
        Arbitrary,
        gen_restriction::<true>,
        check_lemma2,
        "restriction preserves modal formulas"
    ),
    prop!(
        "lemma3_minimal_model",
        Order,
        gen_minimal::<false>,
        check_lemma3,
        "the minimal model is nonempty and has no order pairs"
    ),
    prop!(
        "lemma4_minimal_model_objective",
        Order,
        gen_minimal::<false>,
        check_lemma4,
        "the minimal model preserves boolean formulas"
    ),
    prop!(
        "lemma4_minimal_model_modal",
        Order,
        gen_minimal::<true>,
        check_lemma4,
        "the minimal model preserves modal formulas"
    ),
    prop!(
        "supraclassicality",
        Order,
        gen_consequence::<PREF, SUPRA>,
        check_consequence::<PREF, SUPRA>,
        "|= implies |=<"
    ),
    prop!(
        "reflexivity",
        Order,
        gen_consequence::<PREF, REFL>,
        check_consequence::<PREF, REFL>,
        "premises follow under |=<"
    ),
    prop!(
        "cautious_monotony",
        Order,
        gen_consequence::<PREF, CM>,
        check_consequence::<PREF, CM>,
        "cautious monotony of |=<"
    ),
    prop!(
        "cautious_transitivity",
        Order,
        gen_consequence::<PREF, CT>,
        check_consequence::<PREF, CT>,
        "cautious transitivity of |=<"
    ),
    prop!(
        "plain_monotony_for_pref",
        Order,
        gen_consequence::<PREF, MONO>,
        check_consequence::<PREF, MONO>,
        "monotony of |=< (expected to fail)"
    ),
    prop!(
        "local_supraclassicality",
        Order,
        gen_consequence::<LOCAL, SUPRA>,
        check_consequence::<LOCAL, SUPRA>,
        "|= implies |="
    ),
    prop!(
        "local_reflexivity",
        Order,
        gen_consequence::<LOCAL, REFL>,
        check_consequence::<LOCAL, REFL>,
        "premises follow under |="
    ),
    prop!(
        "local_cautious_monotony",
        Order,
        gen_consequence::<LOCAL, CM>,
        check_consequence::<LOCAL, CM>,
        "cautious monotony of |="
    ),
    prop!(
        "local_cautious_transitivity",
        Order,
        gen_consequence::<LOCAL, CT>,
        check_consequence::<LOCAL, CT>,
        "cautious transitivity of |="
    ),
    prop!(
        "star_s_supraclassicality",
        Order,
        gen_star::<STAR_S, SUPRA>,
        check_consequence::<STAR_S, SUPRA>,
        "|= implies |=<s"
    ),
    prop!(
        "star_s_reflexivity",
        Order,
        gen_star::<STAR_S, REFL>,
        check_consequence::<STAR_S, REFL>,
        "premises follow under |=<s"
    ),
    prop!(
        "star_s_cautious_monotony",
        Order,
        gen_star::<STAR_S, CM>,
        check_consequence::<STAR_S, CM>,
        "cautious monotony of |=<s"
    ),
    prop!(
        "star_s_cautious_transitivity",
        Order,
        gen_star::<STAR_S, CT>,
        check_consequence::<STAR_S, CT>,
        "cautious transitivity of |=<s"
    ),
    prop!(
        "star_c_supraclassicality",
        Order,
        gen_star::<STAR_C, SUPRA>,
        check_consequence::<STAR_C, SUPRA>,
        "|= implies |=<c"
    ),
    prop!(
        "star_c_reflexivity",
        Order,
        gen_star::<STAR_C, REFL>,
        check_consequence::<STAR_C, REFL>,
        "premises follow under |=<c"
    ),
    prop!(
        "star_c_cautious_monotony",
        Order,
        gen_star::<STAR_C, CM>,
        check_consequence::<STAR_C, CM>,
        "cautious monotony of |=<c"
    ),
    prop!(
        "star_c_cautious_transitivity",
        Order,
        gen_star::<STAR_C, CT>,
        check_consequence::<STAR_C, CT>,
        "cautious transitivity of |=<c"
    ),
    prop!(
        "star_p_supraclassicality",
        Order,
        gen_star::<STAR_P, SUPRA>,
        check_consequence::<STAR_P, SUPRA>,
        "|= implies |=<p"
    ),
    prop!(
        "star_p_reflexivity",
        Order,
        gen_star::<STAR_P, REFL>,
        check_consequence::<STAR_P, REFL>,
        "premises follow under |=<p"
    ),
    prop!(
        "star_p_cautious_monotony",
        Order,
        gen_star::<STAR_P, CM>,
        check_consequence::<STAR_P, CM>,
        "cautious monotony of |=<p"
    ),
    prop!(
        "star_p_cautious_transitivity",
        Order,
        gen_star::<STAR_P, CT>,
        check_consequence::<STAR_P, CT>,
        "cautious transitivity of |=<p"
    ),
    prop!(
        "theorem8_equivalence",
        Order,
        gen_theorem8,
        check_theorem8,
        "subset-minimal explanations are exactly the preferential ones"
    ),
    prop!(
        "cardinality_subset_coincide",
        Order,
        gen_theorem8,
        check_coincide,
        "cardinality and subset selections agree"
    ),
];

pub fn properties() -> &'static [Property] {
    PROPERTIES
}

pub fn property(name: &str) -> Result<&'static Property, AuditError> {
    PROPERTIES.iter().find(|p| p.name == name).ok_or_else(|| AuditError::UnknownProperty(name.to_string()))
}

impl Property {
    /// The instance for `trial`, deterministic in the seed and trial.
    pub fn instance(&self, cfg: &AuditConfig, trial: u64) -> Instance {
        let mut rng = rng_for(cfg, trial);
        let m = random_model(cfg, &mut rng);
        (self.generate)(cfg, &mut rng, m)
    }

    pub fn check(&self, instance: &Instance) -> Result<Outcome, AuditError> {
        (self.check)(&Loaded::new(instance)?)
    }
}

/// Re-runs a property on a stored instance.
pub fn replay(name: &str, instance: &Instance) -> Result<Outcome, AuditError> {
    property(name)?.check(instance)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: u64,
    pub detail: String,
    pub instance: Instance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// At least one non-vacuous trial and no counterexample.
    Confirmed,
    Refuted,
    /// No trial exercised the property.
    Vacuous,
}

/// Number of counterexamples and exhibits kept in a report.
pub const KEEP: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub property: String,
    pub config: AuditConfig,
    pub trials: usize,
    pub non_vacuous: usize,
    pub violations: usize,
    pub exhibits: usize,
    pub counterexamples: Vec<Counterexample>,
    pub exhibited: Vec<Counterexample>,
    pub verdict: Verdict,
}

pub fn audit(name: &str, cfg: &AuditConfig) -> Result<AuditReport, AuditError> {
    cfg.validate()?;
    let prop = property(name)?;
    let mut report = AuditReport {
        property: name.to_string(),
        config: cfg.clone(),
        trials: 0,
        non_vacuous: 0,
        violations: 0,
        exhibits: 0,
        counterexamples: vec![],
        exhibited: vec![],
        verdict: Verdict::Vacuous,
    };
    let cap = if cfg.count_non_vacuous { cfg.trials * 20 } else { cfg.trials };
    let mut trial = 0u64;
    while (trial as usize) < cap {
        let done = if cfg.count_non_vacuous { report.non_vacuous } else { report.trials };
        if done >= cfg.trials {
            break;
        }
        let instance = prop.instance(cfg, trial);
        let outcome = prop.check(&instance)?;
        report.trials += 1;
        match outcome {
            Outcome::Vacuous => {}
            Outcome::Holds => report.non_vacuous += 1,
            Outcome::Exhibit(detail) => {
                report.non_vacuous += 1;
                report.exhibits += 1;
                if report.exhibited.len() < KEEP {
                    report.exhibited.push(Counterexample { trial, detail, instance });
                }
            }
            Outcome::Violated(detail) => {
                report.non_vacuous += 1;
                report.violations += 1;
                if report.counterexamples.len() < KEEP {
                    report.counterexamples.push(Counterexample { trial, detail, instance });
                }
            }
        }
        trial += 1;
    }
    report.verdict = if report.violations > 0 {
        Verdict::Refuted
    } else if report.non_vacuous > 0 {
        Verdict::Confirmed
    } else {
        Verdict::Vacuous
    };
    Ok(report)
}

const CLINIC_MODEL: &str = include_str!("../../../models/clinic.model");

fn clinic_instance() -> Instance {
    Instance {
        model: CLINIC_MODEL.to_string(),
        priorities: [("allergies", 1), ("strep_throat", 2), ("common_cold", 3)]
            .into_iter()
            .map(|(a, l)| (a.to_string(), l))
            .collect(),
        premises: vec![],
        formulas: vec![],
    }
}

/// Formulas tried by the clinic search: atoms, hypothesis pairs joined by
/// `&` and `->`, the rule consequents and the observation.
fn clinic_pool(doc: &ModelDocument) -> Vec<Formula> {
    let mut pool: Vec<Formula> = doc.vocabulary().into_iter().map(Formula::atom).collect();
    let hyps: Vec<Formula> = doc.hypotheses.iter().map(|h| Formula::atom(h.clone())).collect();
    for a in &hyps {
        for b in &hyps {
            if a != b {
                pool.push(Formula::implies(a.clone(), b.clone()));
                if a.to_string() < b.to_string() {
                    pool.push(Formula::and(a.clone(), b.clone()));
                }
            }
        }
    }
    for t in &doc.theory {
        if let Formula::Implies(_, c) = t {
            pool.push(c.as_ref().clone());
        }
    }
    pool.push(crate::formula::parse("fever & sore_throat & headache").expect("valid"));
    pool
}

/// Exhaustive search of the clinic example for a counterexample to
/// `property` (one of the `star_*` or consequence properties). Premise sets
/// are the background plus any subset of the hypotheses.
pub fn clinic_search(name: &str) -> Result<Option<Counterexample>, AuditError> {
    let prop = property(name)?;
    let base = clinic_instance();
    let doc = ModelDocument::parse(&base.model)?;
    let pool = clinic_pool(&doc);
    let hyps: Vec<Formula> = doc.hypotheses.iter().map(|h| Formula::atom(h.clone())).collect();
    let arity = if name.ends_with("cautious_monotony") || name.ends_with("cautious_transitivity") { 2 } else { 1 };
    for mask in 0..(1u32 << hyps.len()) {
        let mut gamma = doc.theory.clone();
        gamma.extend((0..hyps.len()).filter(|i| mask >> i & 1 == 1).map(|i| hyps[i].clone()));
        let singles: Vec<Vec<Formula>> = if name.ends_with("reflexivity") {
            gamma.iter().map(|g| vec![g.clone()]).collect()
        } else {
            pool.iter().map(|f| vec![f.clone()]).collect()
        };
        let choices: Vec<Vec<Formula>> = if arity == 1 {
            singles
        } else {
            pool.iter().flat_map(|a| pool.iter().map(move |b| vec![a.clone(), b.clone()])).collect()
        };
        for formulas in choices {
            let inst = Instance { premises: gamma.clone(), formulas, ..base.clone() };
            if let Outcome::Violated(detail) = prop.check(&inst)? {
                return Ok(Some(Counterexample { trial: 0, detail, instance: inst }));
            }
        }
    }
    Ok(None)
}

pub const MATRIX_RELATIONS: [&str; 5] = ["|=", "|=<", "|=<s", "|=<c", "|=<p"];
pub const MATRIX_ROWS: [&str; 4] = ["supraclassicality", "reflexivity", "cautious_monotony", "cautious_transitivity"];

/// The reference cells: rows as in `MATRIX_ROWS`, columns as in
/// `MATRIX_RELATIONS`.
pub const REFERENCE: [[bool; 5]; 4] = [
    [true, true, true, true, true],
    [true, true, true, true, true],
    [false, true, false, false, false],
    [false, true, true, true, false],
];

pub fn matrix_property(row: usize, col: usize) -> String {
    let r = MATRIX_ROWS[row];
    match col {
        0 => format!("local_{r}"),
        1 => r.to_string(),
        2 => format!("star_s_{r}"),
        3 => format!("star_c_{r}"),
        _ => format!("star_p_{r}"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixCell {
    pub row: String,
    pub relation: String,
    pub property: String,
    /// No counterexample was found.
    pub holds: bool,
    /// Verdict of the randomized audit alone.
    pub random_verdict: Verdict,
    pub trials: usize,
    pub non_vacuous: usize,
    /// `clinic` for the exhaustive search of the clinic example, `random`
    /// for the randomized audit.
    pub source: Option<String>,
    pub counterexample: Option<Counterexample>,
    pub expected: bool,
}

impl MatrixCell {
    pub fn symbol(&self) -> &'static str {
        match (self.holds, self.random_verdict) {
            (false, _) => "✗",
            (true, Verdict::Vacuous) => "?",
            (true, _) => "✓",
        }
    }

    pub fn agrees(&self) -> bool {
        self.holds == self.expected
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyMatrix {
    pub config: AuditConfig,
    pub cells: Vec<MatrixCell>,
    pub discrepancies: Vec<String>,
}

/// Computes every cell: the clinic search first, then a randomized audit
/// over plausibility frames. Differences from the reference table are
/// listed, not corrected.
pub fn property_matrix(cfg: &AuditConfig) -> Result<PropertyMatrix, AuditError> {
    let cfg = AuditConfig { frame: FrameClass::Order, ..cfg.clone() };
    let mut cells = Vec::new();
    let mut discrepancies = Vec::new();
    for (row, name) in MATRIX_ROWS.iter().enumerate() {
        for (col, rel) in MATRIX_RELATIONS.iter().enumerate() {
            let prop = matrix_property(row, col);
            let report = audit(&prop, &cfg)?;
            let seeded = clinic_search(&prop)?;
            let (source, counterexample) = match (seeded, report.counterexamples.first()) {
                (Some(c), _) => (Some("clinic".to_string()), Some(c)),
                (None, Some(c)) => (Some("random".to_string()), Some(c.clone())),
                (None, None) => (None, None),
            };
            let cell = MatrixCell {
                row: name.to_string(),
                relation: rel.to_string(),
                property: prop,
                holds: counterexample.is_none(),
                random_verdict: report.verdict,
                trials: report.trials,
                non_vacuous: report.non_vacuous,
                source,
                counterexample,
                expected: REFERENCE[row][col],
            };
            if !cell.agrees() {
                discrepancies.push(format!(
                    "{name} for {rel}: expected {}, computed {}",
                    if cell.expected { "✓" } else { "✗" },
                    cell.symbol()
                ));
            }
            cells.push(cell);
        }
    }
    Ok(PropertyMatrix { config: cfg, cells, discrepancies })
}

impl PropertyMatrix {
    pub fn cell(&self, row: &str, relation: &str) -> Option<&MatrixCell> {
        self.cells.iter().find(|c| c.row == row && c.relation == relation)
    }

    /// A plain-text table followed by the discrepancy list.
    pub fn render(&self) -> String {
        let mut out = format!("{:<24}", "property");
        for r in MATRIX_RELATIONS {
            out.push_str(&format!("{r:>7}"));
        }
        out.push('\n');
        for row in MATRIX_ROWS {
            out.push_str(&format!("{row:<24}"));
            for rel in MATRIX_RELATIONS {
                let sym = self.cell(row, rel).map_or("-", MatrixCell::symbol);
                out.push_str(&format!("{sym:>7}"));
            }
            out.push('\n');
        }
        if self.discrepancies.is_empty() {
            out.push_str("\nno discrepancies with the reference table\n");
        } else {
            out.push_str("\ndiscrepancies with the reference table:\n");
            for d in &self.discrepancies {
                out.push_str(&format!("  {d}\n"));
            }
        }
        for c in self.cells.iter().filter(|c| !c.holds) {
            if let Some(cx) = &c.counterexample {
                let prem: Vec<String> = cx.instance.premises.iter().map(|f| f.to_string()).collect();
                out.push_str(&format!(
                    "\n{} ({}, {}): {}\n  premises: {}\n",
                    c.property,
                    c.relation,
                    c.source.as_deref().unwrap_or("?"),
                    cx.detail,
                    prem.join("; ")
                ));
            }
        }
        out
    }
}
