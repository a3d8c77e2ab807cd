//! Plausibility models: a Kripke model plus a strict preference order over
//! worlds, the conditional `g > h`, minimal states, preferential
//! consequence and the minimal-model construction.

use serde::{Deserialize, Serialize};

use crate::formula::Formula;
use crate::kripke::{Countermodel, EvalError, EvaluationContext, Evaluator, KripkeModel, ModelError};
use crate::worldset::WorldSet;

/// `below[w]` holds every world strictly preferred to `w` (`u ≺ w`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictOrder {
    below: Vec<WorldSet>,
}

impl StrictOrder {
    pub fn empty(n: usize) -> Self {
        StrictOrder { below: vec![WorldSet::EMPTY; n] }
    }

    /// Total order listing worlds from most to least plausible.
    pub fn from_ranking(ranking: &[usize]) -> Self {
        let mut below = vec![WorldSet::EMPTY; ranking.len()];
        for (i, &w) in ranking.iter().enumerate() {
            below[w] = ranking[..i].iter().copied().collect();
        }
        StrictOrder { below }
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut below = vec![WorldSet::EMPTY; n];
        for &(lower, upper) in pairs {
            below[upper].insert(lower);
        }
        StrictOrder { below }
    }

    pub fn len(&self) -> usize {
        self.below.len()
    }

    pub fn is_empty(&self) -> bool {
        self.below.is_empty()
    }

    /// `u ≺ w`.
    pub fn precedes(&self, u: usize, w: usize) -> bool {
        self.below[w].contains(u)
    }

    pub fn below(&self, w: usize) -> WorldSet {
        self.below[w]
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> =
            (0..self.len()).flat_map(|w| self.below[w].iter().map(move |u| (u, w))).collect();
        out.sort_unstable();
        out
    }

    /// Members of `set` with no strictly preferred member of `set`.
    pub fn minimal_in(&self, set: WorldSet) -> WorldSet {
        set.iter().filter(|&w| self.below[w].intersection(set).is_empty()).collect()
    }

    pub fn properties(&self) -> OrderProperties {
        let n = self.len();
        let mut p = OrderProperties { irreflexive: true, transitive: true, connected: true };
        for a in 0..n {
            p.irreflexive &= !self.precedes(a, a);
            for b in 0..n {
                if a != b {
                    p.connected &= self.precedes(a, b) || self.precedes(b, a);
                }
                for c in 0..n {
                    p.transitive &= !(self.precedes(a, b) && self.precedes(b, c)) || self.precedes(a, c);
                }
            }
        }
        p
    }

    fn first_violation(&self, names: &[String]) -> Option<ModelError> {
        let n = self.len();
        if let Some(a) = (0..n).find(|&a| self.precedes(a, a)) {
            return Some(ModelError::OrderNotIrreflexive(names[a].clone()));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.precedes(a, b) && self.precedes(b, c) && !self.precedes(a, c) {
                        return Some(ModelError::OrderNotTransitive(
                            names[a].clone(),
                            names[b].clone(),
                            names[c].clone(),
                        ));
                    }
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if !self.precedes(a, b) && !self.precedes(b, a) {
                    return Some(ModelError::OrderNotConnected(names[a].clone(), names[b].clone()));
                }
            }
        }
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrderProperties {
    pub irreflexive: bool,
    pub transitive: bool,
    pub connected: bool,
}

/// How strictly the order is validated at load time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OrderCheck {
    /// Irreflexive, transitive and connected over distinct worlds.
    #[default]
    Strict,
    /// Connectedness failures become warnings.
    Permissive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlausibilityModel {
    pub base: KripkeModel,
    order: StrictOrder,
    warnings: Vec<String>,
}

impl PlausibilityModel {
    pub fn new(base: KripkeModel, order: StrictOrder, check: OrderCheck) -> Result<Self, ModelError> {
        assert_eq!(base.len(), order.len(), "order must cover every world");
        let mut warnings = Vec::new();
        match order.first_violation(base.world_names()) {
            None => {}
            Some(e @ ModelError::OrderNotConnected(..)) if check == OrderCheck::Permissive => {
                warnings.push(e.to_string())
            }
            Some(e) => return Err(e),
        }
        Ok(PlausibilityModel { base, order, warnings })
    }

    /// Order given as `(lower, upper)` name pairs, read `lower ≺ upper`.
    pub fn from_named_pairs<S: AsRef<str>>(
        base: KripkeModel,
        pairs: &[(S, S)],
        check: OrderCheck,
    ) -> Result<Self, ModelError> {
        let mut idx = Vec::with_capacity(pairs.len());
        for (lower, upper) in pairs {
            let (Ok(l), Ok(u)) = (base.world_index(lower.as_ref()), base.world_index(upper.as_ref())) else {
                return Err(ModelError::DanglingOrderEdge {
                    lower: lower.as_ref().into(),
                    upper: upper.as_ref().into(),
                });
            };
            idx.push((l, u));
        }
        let order = StrictOrder::from_pairs(base.len(), &idx);
        PlausibilityModel::new(base, order, check)
    }

    pub fn order(&self) -> &StrictOrder {
        &self.order
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

pub fn order_properties(m: &PlausibilityModel) -> OrderProperties {
    m.order.properties()
}

/// Minimal worlds of the whole model (`f` absent) or `f`-minimal worlds.
pub fn minimal_states(
    m: &PlausibilityModel,
    f: Option<&Formula>,
    ctx: &EvaluationContext,
) -> Result<WorldSet, EvalError> {
    let set = match f {
        Some(f) => truth_set_pref(m, ctx, f)?,
        None => m.base.all(),
    };
    Ok(m.order.minimal_in(set))
}

pub fn truth_set_pref(m: &PlausibilityModel, ctx: &EvaluationContext, f: &Formula) -> Result<WorldSet, EvalError> {
    Evaluator::new(&m.base, Some(&m.order), ctx)?.truth_set(f)
}

/// Satisfaction in a plausibility model: `>` is the preferential
/// conditional and `A g` asks for a witness `a` with `O a` and `g > a`.
pub fn satisfies_pref(
    m: &PlausibilityModel,
    ctx: &EvaluationContext,
    w: usize,
    f: &Formula,
) -> Result<bool, EvalError> {
    if w >= m.base.len() {
        return Err(EvalError::UnknownWorld(format!("#{w}")));
    }
    Ok(truth_set_pref(m, ctx, f)?.contains(w))
}

pub fn abduction_witness_pref(
    m: &PlausibilityModel,
    ctx: &EvaluationContext,
    w: usize,
    g: &Formula,
) -> Result<Option<Formula>, EvalError> {
    if w >= m.base.len() {
        return Err(EvalError::UnknownWorld(format!("#{w}")));
    }
    Evaluator::new(&m.base, Some(&m.order), ctx)?.witness_formula(w, g)
}

/// Which worlds count as "minimal states" for premises `Γ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinimalReading {
    /// Minimal among the worlds satisfying `Γ`.
    #[default]
    PremiseMinimal,
    /// Globally minimal worlds that happen to satisfy `Γ`.
    Bare,
}

pub type PrefPointed<'a> = (&'a PlausibilityModel, &'a EvaluationContext);

/// Worlds of `m` at which a preferential consequence from `premises` is
/// evaluated.
pub fn premise_minimal(
    m: &PlausibilityModel,
    ctx: &EvaluationContext,
    premises: &[Formula],
    reading: MinimalReading,
) -> Result<WorldSet, EvalError> {
    let ev = Evaluator::new(&m.base, Some(&m.order), ctx)?;
    let mut support = m.base.all();
    for p in premises {
        support = support.intersection(ev.truth_set(p)?);
    }
    Ok(match reading {
        MinimalReading::PremiseMinimal => m.order.minimal_in(support),
        MinimalReading::Bare => m.order.minimal_in(m.base.all()).intersection(support),
    })
}

pub fn preferential_countermodel(
    suite: &[PrefPointed<'_>],
    premises: &[Formula],
    f: &Formula,
    reading: MinimalReading,
) -> Result<Option<Countermodel>, EvalError> {
    for (i, (m, ctx)) in suite.iter().enumerate() {
        let mins = premise_minimal(m, ctx, premises, reading)?;
        let holds = truth_set_pref(m, ctx, f)?;
        if let Some(w) = mins.difference(holds).iter().next() {
            return Ok(Some(Countermodel { model: i, world: w }));
        }
    }
    Ok(None)
}

/// `premises |=≺ f`: `f` holds at every minimal premise world of every
/// model in the suite.
pub fn preferential_consequence(
    suite: &[PrefPointed<'_>],
    premises: &[Formula],
    f: &Formula,
    reading: MinimalReading,
) -> Result<bool, EvalError> {
    Ok(preferential_countermodel(suite, premises, f, reading)?.is_none())
}

/// Plain local consequence evaluated with the plausibility semantics (so
/// that formulas may use `>`).
pub fn local_countermodel_pref(
    suite: &[PrefPointed<'_>],
    premises: &[Formula],
    f: &Formula,
) -> Result<Option<Countermodel>, EvalError> {
    for (i, (m, ctx)) in suite.iter().enumerate() {
        let ev = Evaluator::new(&m.base, Some(&m.order), ctx)?;
        let mut support = m.base.all();
        for p in premises {
            support = support.intersection(ev.truth_set(p)?);
        }
        if let Some(w) = support.difference(ev.truth_set(f)?).iter().next() {
            return Ok(Some(Countermodel { model: i, world: w }));
        }
    }
    Ok(None)
}

pub fn local_consequence_pref(suite: &[PrefPointed<'_>], premises: &[Formula], f: &Formula) -> Result<bool, EvalError> {
    Ok(local_countermodel_pref(suite, premises, f)?.is_none())
}

/// Some world of the suite satisfies every formula.
pub fn satisfiable_pref(suite: &[PrefPointed<'_>], formulas: &[Formula]) -> Result<bool, EvalError> {
    for (m, ctx) in suite {
        let ev = Evaluator::new(&m.base, Some(&m.order), ctx)?;
        let mut support = m.base.all();
        for p in formulas {
            support = support.intersection(ev.truth_set(p)?);
        }
        if !support.is_empty() {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Clone, Debug)]
pub struct MinimalModel {
    pub model: KripkeModel,
    /// `mapping[new] = old` world index.
    pub mapping: Vec<usize>,
}

/// Restriction to the globally minimal worlds. Nonempty for every finite
/// model with an acyclic order.
pub fn minimal_model(m: &PlausibilityModel) -> MinimalModel {
    let keep = m.order.minimal_in(m.base.all());
    let (model, mapping) = m.base.submodel(keep).expect("a finite strict order has a minimal element");
    MinimalModel { model, mapping }
}
