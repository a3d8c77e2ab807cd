//! Shared test support: a raw model representation and a pointwise
//! reference evaluator that shares no code with the library's truth-set
//! engine.

#![allow(dead_code)]

use aol::formula::Formula;
use aol::kripke::{EvaluationContext, KripkeModel, WitnessMode};
use aol::preferential::{OrderCheck, PlausibilityModel, StrictOrder};

pub mod strategies;

#[derive(Clone, Debug)]
pub struct RawModel {
    /// `edges[u][v]` iff v is accessible from u.
    pub edges: Vec<Vec<bool>>,
    /// `val[w][i]` iff atom i is true at w.
    pub val: Vec<Vec<bool>>,
    pub atoms: Vec<String>,
    /// Plausibility rank per world; lower is more plausible.
    pub rank: Option<Vec<usize>>,
    pub background: Vec<Formula>,
    pub mode: WitnessMode,
    pub max_witness: usize,
}

impl RawModel {
    pub fn n(&self) -> usize {
        self.edges.len()
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.n()).map(|w| format!("w{}", w + 1)).collect()
    }

    pub fn kripke(&self) -> KripkeModel {
        let names = self.names();
        let mut edges = Vec::new();
        for u in 0..self.n() {
            for v in 0..self.n() {
                if self.edges[u][v] {
                    edges.push((names[u].clone(), names[v].clone()));
                }
            }
        }
        let valuation: Vec<(String, Vec<String>)> = self
            .atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), (0..self.n()).filter(|&w| self.val[w][i]).map(|w| names[w].clone()).collect()))
            .collect();
        KripkeModel::new(&names, &edges, &valuation, &self.atoms).unwrap()
    }

    pub fn plausibility(&self) -> Option<PlausibilityModel> {
        let rank = self.rank.as_ref()?;
        let mut ranking: Vec<usize> = (0..self.n()).collect();
        ranking.sort_by_key(|&w| (rank[w], w));
        let mut pairs = Vec::new();
        for u in 0..self.n() {
            for v in 0..self.n() {
                if rank[u] < rank[v] {
                    pairs.push((u, v));
                }
            }
        }
        let order = StrictOrder::from_pairs(self.n(), &pairs);
        Some(PlausibilityModel::new(self.kripke(), order, OrderCheck::Permissive).unwrap())
    }

    pub fn context(&self) -> EvaluationContext {
        EvaluationContext::new(self.background.clone()).with_mode(self.mode).with_max_witness_size(self.max_witness)
    }

    fn precedes(&self, u: usize, v: usize) -> bool {
        let r = self.rank.as_ref().expect("ordered model");
        r[u] < r[v]
    }

    fn atom(&self, w: usize, name: &str) -> bool {
        let i = self.atoms.iter().position(|a| a == name).expect("atom in vocabulary");
        self.val[w][i]
    }

    /// True iff `f` holds at world `w`, evaluated by direct recursion on the
    /// satisfaction clauses.
    pub fn holds(&self, w: usize, f: &Formula) -> bool {
        let n = self.n();
        let acc = |v: usize| self.edges[w][v];
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(p) => self.atom(w, p),
            Formula::Not(a) => !self.holds(w, a),
            Formula::And(a, b) => self.holds(w, a) && self.holds(w, b),
            Formula::Or(a, b) => self.holds(w, a) || self.holds(w, b),
            Formula::Implies(a, b) => !self.holds(w, a) || self.holds(w, b),
            Formula::Knows(a) => (0..n).all(|v| !acc(v) || self.holds(v, a)),
            Formula::Only(a) => (0..n).all(|v| acc(v) == self.holds(v, a)),
            Formula::PrefCond(a, b) => (0..n).all(|v| !self.minimal_acc(w, v, a) || self.holds(v, b)),
            Formula::Abd(g) => self.abd(w, g),
        }
    }

    /// v is accessible from w, satisfies `a`, and no accessible `a`-world
    /// is strictly more plausible.
    fn minimal_acc(&self, w: usize, v: usize, a: &Formula) -> bool {
        self.edges[w][v]
            && self.holds(v, a)
            && !(0..self.n()).any(|u| self.edges[w][u] && self.precedes(u, v) && self.holds(u, a))
    }

    /// Worlds where the witness is true, for each admissible witness.
    fn witnesses(&self) -> Vec<Vec<bool>> {
        let n = self.n();
        let conj =
            |members: &[&Formula]| -> Vec<bool> { (0..n).map(|v| members.iter().all(|b| self.holds(v, b))).collect() };
        match self.mode {
            WitnessMode::Conjunction => {
                if self.background.is_empty() {
                    vec![]
                } else {
                    vec![conj(&self.background.iter().collect::<Vec<_>>())]
                }
            }
            WitnessMode::Subsets => {
                let k = self.background.len();
                (1u32..(1 << k))
                    .filter(|mask| mask.count_ones() as usize <= self.max_witness)
                    .map(|mask| {
                        let members: Vec<&Formula> =
                            (0..k).filter(|i| mask & (1 << i) != 0).map(|i| &self.background[i]).collect();
                        conj(&members)
                    })
                    .collect()
            }
            WitnessMode::Unrestricted => {
                // every set closed under agreement on all atoms
                (0u64..(1 << n))
                    .map(|mask| (0..n).map(|v| mask & (1 << v) != 0).collect::<Vec<bool>>())
                    .filter(|set| (0..n).all(|u| (0..n).all(|v| self.val[u] != self.val[v] || set[u] == set[v])))
                    .collect()
            }
        }
    }

    fn abd(&self, w: usize, g: &Formula) -> bool {
        let n = self.n();
        self.witnesses().into_iter().any(|truth| {
            let only = (0..n).all(|v| self.edges[w][v] == truth[v]);
            let explains = match self.rank {
                Some(_) => (0..n).all(|v| !self.minimal_acc(w, v, g) || truth[v]),
                None => (0..n).all(|v| !self.edges[w][v] || !self.holds(v, g) || truth[v]),
            };
            only && explains
        })
    }

    pub fn truth_bits(&self, f: &Formula) -> u64 {
        (0..self.n()).filter(|&w| self.holds(w, f)).fold(0, |acc, w| acc | (1 << w))
    }
}

/// Library truth set as a bitmask.
pub fn library_bits(raw: &RawModel, f: &Formula) -> u64 {
    let ctx = raw.context();
    match raw.plausibility() {
        Some(p) => aol::preferential::truth_set_pref(&p, &ctx, f).unwrap().bits(),
        None => aol::kripke::truth_set(&raw.kripke(), &ctx, f).unwrap().bits(),
    }
}

pub fn repo_path(rel: &str) -> String {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel).to_string_lossy().into_owned()
}

/// Runs the command line in process; returns exit code, stdout and stderr.
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("aol").chain(args.iter().copied());
    let code = aol::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Violations of the shipped output schema.
pub fn schema_errors(v: &serde_json::Value) -> Vec<String> {
    static V: std::sync::OnceLock<jsonschema::Validator> = std::sync::OnceLock::new();
    let validator = V.get_or_init(|| {
        let text = std::fs::read_to_string(repo_path("schema/output.schema.json")).unwrap();
        jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
    });
    validator.iter_errors(v).map(|e| e.to_string()).collect()
}
