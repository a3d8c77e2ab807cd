//! The `aol` command line.
//!
//! Exit codes: 0 success, 1 the queried claim is false (`check`, `entail`),
//! 2 usage or parse error, 3 the input violates a model or problem
//! invariant.

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::abduction::{self, candidate_space, AbductionError, PriorityComparison, StarKind, Strategy};
use crate::document::{DocumentError, ModelDocument, ProblemDocument};
use crate::formula::{parse, Formula};
use crate::kripke::{self, is_definable, EvalError, EvaluationContext, ModelError, WitnessMode};
use crate::metatheory::{self, AuditConfig, AuditError, FrameClass};
use crate::preferential::{self, MinimalReading, OrderCheck, PlausibilityModel};

#[derive(Parser, Debug)]
#[command(name = "aol", version, about = "Only-knowing, abduction and preferential consequence over finite models")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Model file.
    #[arg(short, long)]
    model: String,
    #[arg(long, value_enum, default_value_t = Mode::Subsets)]
    witness_mode: Mode,
    /// Largest background subset tried as a witness.
    #[arg(long, default_value_t = kripke::DEFAULT_WITNESS_SIZE)]
    witness_size: usize,
    /// Accept plausibility orders that are not connected.
    #[arg(long)]
    permissive: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Conjunction,
    Subsets,
    Unrestricted,
}

impl From<Mode> for WitnessMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Conjunction => WitnessMode::Conjunction,
            Mode::Subsets => WitnessMode::Subsets,
            Mode::Unrestricted => WitnessMode::Unrestricted,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Local,
    Preferential,
    S,
    C,
    P,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Strat {
    Subset,
    Cardinality,
    Priorization,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Comparison {
    Lexicographic,
    Literal,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Frame {
    Arbitrary,
    Reflexive,
    S5,
    Order,
}

impl From<Frame> for FrameClass {
    fn from(f: Frame) -> Self {
        match f {
            Frame::Arbitrary => FrameClass::Arbitrary,
            Frame::Reflexive => FrameClass::Reflexive,
            Frame::S5 => FrameClass::S5,
            Frame::Order => FrameClass::Order,
        }
    }
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 5)]
    max_worlds: usize,
    #[arg(long, default_value_t = 4)]
    max_atoms: usize,
    /// Maximum depth of generated formulas.
    #[arg(long, default_value_t = 3)]
    depth: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a formula at a world.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        /// World to evaluate at; defaults to the model's actual world.
        #[arg(short, long)]
        world: Option<String>,
        formula: String,
    },
    /// Decide a consequence claim on the model.
    Entail {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = Kind::Local)]
        kind: Kind,
        /// A premise (repeatable).
        #[arg(short = 'g', long = "premise")]
        premises: Vec<String>,
        /// Add the background theory to the premises (always done for
        /// s, c and p).
        #[arg(long)]
        theory: bool,
        /// Problem file supplying priorities.
        #[arg(short, long)]
        problem: Option<String>,
        /// Read minimal states as global minima satisfying the premises.
        #[arg(long)]
        bare: bool,
        formula: String,
    },
    /// Enumerate minimal explanations and select among them.
    Explain {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(short, long)]
        problem: String,
        /// Defaults to priorization when the problem sets priorities, subset
        /// otherwise.
        #[arg(long, value_enum)]
        strategy: Option<Strat>,
        #[arg(long, value_enum, default_value_t = Comparison::Lexicographic)]
        comparison: Comparison,
        /// Overrides the problem's candidate depth.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        bare: bool,
    },
    /// Print the minimal model.
    Minimize {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Print the submodel on worlds satisfying the background and a formula.
    Restrict {
        #[command(flatten)]
        model: ModelArgs,
        formula: String,
    },
    /// Search for counterexamples to a named property.
    Audit {
        /// Property name; omit with --list.
        property: Option<String>,
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        bounds: AuditArgs,
        /// Frame class; defaults to the property's own.
        #[arg(long, value_enum)]
        frame: Option<Frame>,
        /// Count only trials where the property applies.
        #[arg(long)]
        non_vacuous: bool,
    },
    /// Compute the property matrix of the consequence relations.
    Matrix {
        #[command(flatten)]
        bounds: AuditArgs,
    },
}

/// Failure of a command, mapped to an exit code.
enum Failure {
    Usage(String),
    Invariant(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Invariant(m) => m,
        }
    }
}

fn doc_failure(path: &str, e: DocumentError) -> Failure {
    let msg = if e.line > 0 { format!("{path}:{}: {}", e.line, e.message) } else { format!("{path}: {}", e.message) };
    if e.invariant {
        Failure::Invariant(msg)
    } else {
        Failure::Usage(msg)
    }
}

fn model_failure(path: &str, e: ModelError) -> Failure {
    Failure::Invariant(format!("{path}: {e}"))
}

fn eval_failure(e: EvalError) -> Failure {
    match e {
        EvalError::CircularBackground(_) => Failure::Invariant(e.to_string()),
        _ => Failure::Usage(e.to_string()),
    }
}

fn abduction_failure(e: AbductionError) -> Failure {
    match e {
        AbductionError::Eval(e) => eval_failure(e),
        AbductionError::AlreadyExplained(_) | AbductionError::EmptyCandidateSpace | AbductionError::EmptySuite => {
            Failure::Invariant(e.to_string())
        }
        _ => Failure::Usage(e.to_string()),
    }
}

fn audit_failure(e: AuditError) -> Failure {
    match e {
        AuditError::UnknownProperty(_) | AuditError::Bounds(_) => Failure::Usage(e.to_string()),
        _ => Failure::Invariant(e.to_string()),
    }
}

fn formula(text: &str) -> Result<Formula, Failure> {
    parse(text).map_err(|e| Failure::Usage(format!("formula `{text}`: {e}")))
}

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))
}

struct Loaded {
    doc: ModelDocument,
    kripke: kripke::KripkeModel,
    plaus: Option<PlausibilityModel>,
    ctx: EvaluationContext,
    warnings: Vec<String>,
}

fn load(args: &ModelArgs) -> Result<Loaded, Failure> {
    let text = read(&args.model)?;
    let doc = ModelDocument::parse(&text).map_err(|e| doc_failure(&args.model, e))?;
    let kripke = doc.kripke().map_err(|e| model_failure(&args.model, e))?;
    let check = if args.permissive { OrderCheck::Permissive } else { OrderCheck::Strict };
    let plaus = doc.plausibility(check).map_err(|e| model_failure(&args.model, e))?;
    if args.witness_size == 0 {
        return Err(Failure::Usage("--witness-size must be positive".into()));
    }
    let ctx = doc.context().with_mode(args.witness_mode.into()).with_max_witness_size(args.witness_size);
    let warnings = plaus.as_ref().map(|p| p.warnings().to_vec()).unwrap_or_default();
    Ok(Loaded { doc, kripke, plaus, ctx, warnings })
}

fn need_order<'a>(l: &'a Loaded, path: &str) -> Result<&'a PlausibilityModel, Failure> {
    l.plaus.as_ref().ok_or_else(|| Failure::Usage(format!("{path}: this command needs an `order:` line")))
}

/// Command result: exit code plus the JSON and text renderings.
struct Output {
    code: i32,
    json: Value,
    text: String,
    notes: Vec<String>,
}

fn names(m: &kripke::KripkeModel, set: impl IntoIterator<Item = usize>) -> Vec<String> {
    set.into_iter().map(|w| m.world_name(w).to_string()).collect()
}

fn cmd_check(args: &ModelArgs, world: Option<&str>, text: &str) -> Result<Output, Failure> {
    let l = load(args)?;
    let f = formula(text)?;
    let w = match world {
        Some(name) => l.kripke.world_index(name).map_err(eval_failure)?,
        None => l
            .kripke
            .actual()
            .ok_or_else(|| Failure::Usage("no --world given and the model has no `actual:` line".into()))?,
    };
    let (value, witness) = match &l.plaus {
        Some(p) => (
            preferential::satisfies_pref(p, &l.ctx, w, &f).map_err(eval_failure)?,
            match &f {
                Formula::Abd(g) => preferential::abduction_witness_pref(p, &l.ctx, w, g).map_err(eval_failure)?,
                _ => None,
            },
        ),
        None => (
            kripke::satisfies(&l.kripke, &l.ctx, w, &f).map_err(eval_failure)?,
            match &f {
                Formula::Abd(g) => kripke::abduction_witness(&l.kripke, &l.ctx, w, g).map_err(eval_failure)?,
                _ => None,
            },
        ),
    };
    let mut notes = l.warnings.clone();
    let collapse = l.ctx.witness_mode == WitnessMode::Unrestricted
        && is_definable(&l.kripke, l.kripke.successors(w))
        && contains_abd(&f);
    if collapse {
        notes.push(format!(
            "unrestricted witnesses: the worlds accessible from {} are definable, so A g holds there for every g",
            l.kripke.world_name(w)
        ));
    }
    let mut text_out = format!("{value}\n");
    if let Some(a) = &witness {
        text_out.push_str(&format!("witness: {a}\n"));
    }
    Ok(Output {
        code: if value { 0 } else { 1 },
        json: json!({
            "command": "check",
            "world": l.kripke.world_name(w),
            "formula": f,
            "value": value,
            "witness": witness,
            "witness_mode": l.ctx.witness_mode,
            "flags": if collapse { vec!["unrestricted-collapse"] } else { vec![] },
        }),
        text: text_out,
        notes,
    })
}

fn contains_abd(f: &Formula) -> bool {
    match f {
        Formula::Abd(_) => true,
        Formula::True | Formula::False | Formula::Atom(_) => false,
        Formula::Not(a) | Formula::Knows(a) | Formula::Only(a) => contains_abd(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::PrefCond(a, b) => {
            contains_abd(a) || contains_abd(b)
        }
    }
}

fn load_problem(path: &str, doc: &ModelDocument) -> Result<abduction::AbductionProblem, Failure> {
    let text = read(path)?;
    let pd = ProblemDocument::parse(&text).map_err(|e| doc_failure(path, e))?;
    pd.problem(doc).map_err(|e| doc_failure(path, e))
}

#[allow(clippy::too_many_arguments)]
fn cmd_entail(
    args: &ModelArgs,
    kind: Kind,
    premise_texts: &[String],
    theory: bool,
    problem: Option<&str>,
    bare: bool,
    text: &str,
) -> Result<Output, Failure> {
    let l = load(args)?;
    let f = formula(text)?;
    let mut premises = Vec::new();
    if theory || matches!(kind, Kind::S | Kind::C | Kind::P) {
        premises.extend(l.doc.theory.iter().cloned());
    }
    for p in premise_texts {
        premises.push(formula(p)?);
    }
    let reading = if bare { MinimalReading::Bare } else { MinimalReading::PremiseMinimal };
    let (value, counter, witness) = match kind {
        Kind::Local => {
            let cm = match &l.plaus {
                Some(p) => preferential::local_countermodel_pref(&[(p, &l.ctx)], &premises, &f),
                None => kripke::local_countermodel(&[(&l.kripke, &l.ctx)], &premises, &f),
            }
            .map_err(eval_failure)?;
            (cm.is_none(), cm.map(|c| c.world), None)
        }
        Kind::Preferential => {
            let p = need_order(&l, &args.model)?;
            let cm = preferential::preferential_countermodel(&[(p, &l.ctx)], &premises, &f, reading)
                .map_err(eval_failure)?;
            (cm.is_none(), cm.map(|c| c.world), None)
        }
        Kind::S | Kind::C | Kind::P => {
            let p = need_order(&l, &args.model)?;
            let star = match kind {
                Kind::S => StarKind::S,
                Kind::C => StarKind::C,
                _ => StarKind::P,
            };
            let mut prob = match problem {
                Some(path) => load_problem(path, &l.doc)?,
                None => abduction::AbductionProblem::new(l.doc.theory.clone(), Formula::True, l.doc.hypotheses.clone()),
            };
            prob.reading = reading;
            let w = abduction::star_witness(star, &prob, std::slice::from_ref(p), &premises, &f)
                .map_err(abduction_failure)?;
            (w.is_some(), None, w)
        }
    };
    let kind_name = format!("{kind:?}").to_lowercase();
    let mut text_out = format!("{value}\n");
    if let Some(w) = counter {
        text_out.push_str(&format!("countermodel: {}\n", l.kripke.world_name(w)));
    }
    if let Some(d) = &witness {
        text_out.push_str(&format!("explanation: {d}\n"));
    }
    Ok(Output {
        code: if value { 0 } else { 1 },
        json: json!({
            "command": "entail",
            "kind": kind_name,
            "premises": premises,
            "formula": f,
            "value": value,
            "countermodel": counter.map(|w| l.kripke.world_name(w).to_string()),
            "explanation": witness,
        }),
        text: text_out,
        notes: l.warnings.clone(),
    })
}

#[derive(Serialize)]
struct ExplanationOut {
    explanation: abduction::Explanation,
    abductive: Vec<Formula>,
    #[serde(skip_serializing_if = "Option::is_none")]
    levels: Option<Vec<u32>>,
}

fn explanation_out(e: &abduction::Explanation, p: &abduction::AbductionProblem) -> ExplanationOut {
    let levels = p.priorities.as_ref().and_then(|pr| {
        let mut v: Option<Vec<u32>> = e.literals.iter().map(|l| pr.get(&l.atom).copied()).collect();
        if let Some(v) = v.as_mut() {
            v.sort_unstable();
        }
        v
    });
    ExplanationOut { explanation: e.clone(), abductive: e.abductive(), levels }
}

#[allow(clippy::too_many_arguments)]
fn cmd_explain(
    args: &ModelArgs,
    problem: &str,
    strategy: Option<Strat>,
    comparison: Comparison,
    depth: Option<usize>,
    bare: bool,
) -> Result<Output, Failure> {
    let l = load(args)?;
    let p_model = need_order(&l, &args.model)?;
    let mut p = load_problem(problem, &l.doc)?;
    if let Some(d) = depth {
        p.candidate_depth = d;
    }
    if bare {
        p.reading = MinimalReading::Bare;
    }
    let strategy = match strategy.unwrap_or(if p.priorities.is_some() { Strat::Priorization } else { Strat::Subset }) {
        Strat::Subset => Strategy::Subset,
        Strat::Cardinality => Strategy::Cardinality,
        Strat::Priorization => Strategy::Priorization,
    };
    let comparison = match comparison {
        Comparison::Lexicographic => PriorityComparison::Lexicographic,
        Comparison::Literal => PriorityComparison::Literal,
    };
    let family = abduction::enumerate_explanations(&p, std::slice::from_ref(p_model)).map_err(abduction_failure)?;
    let selected = abduction::select(&family, strategy, comparison).map_err(abduction_failure)?;
    let fam: Vec<ExplanationOut> = family.explanations.iter().map(|e| explanation_out(e, &p)).collect();
    let sel: Vec<ExplanationOut> = selected.iter().map(|e| explanation_out(e, &p)).collect();
    let mut text = format!("observation: {}\nfamily:\n", p.observation);
    for e in &family.explanations {
        text.push_str(&format!("  {e}\n"));
    }
    text.push_str(&format!("selected ({strategy}):\n"));
    for e in &selected {
        let ab: Vec<String> = e.abductive().iter().map(|f| f.to_string()).collect();
        text.push_str(&format!("  {}\n", ab.join(", ")));
    }
    Ok(Output {
        code: 0,
        json: json!({
            "command": "explain",
            "observation": p.observation,
            "hypotheses": p.hypotheses,
            "depth": p.candidate_depth,
            "candidates": candidate_space(&p).len(),
            "strategy": strategy,
            "comparison": comparison,
            "family": fam,
            "selected": sel,
        }),
        text,
        notes: l.warnings.clone(),
    })
}

fn submodel_doc(l: &Loaded, model: &kripke::KripkeModel, order: Option<&preferential::StrictOrder>) -> ModelDocument {
    let mut doc = ModelDocument::from_kripke(model, order);
    doc.theory = l.doc.theory.clone();
    doc.hypotheses = l.doc.hypotheses.clone();
    let vocab = doc.vocabulary();
    doc.atoms.extend(l.doc.vocabulary().into_iter().filter(|a| !vocab.contains(a)));
    doc
}

fn cmd_minimize(args: &ModelArgs) -> Result<Output, Failure> {
    let l = load(args)?;
    let p = need_order(&l, &args.model)?;
    let mm = preferential::minimal_model(p);
    let empty = preferential::StrictOrder::from_pairs(mm.model.len(), &[]);
    let doc = submodel_doc(&l, &mm.model, Some(&empty));
    let text = doc.to_text();
    Ok(Output {
        code: 0,
        json: json!({ "command": "minimize", "worlds": names(&l.kripke, mm.mapping.iter().copied()), "model": text }),
        text,
        notes: l.warnings.clone(),
    })
}

fn cmd_restrict(args: &ModelArgs, text: &str) -> Result<Output, Failure> {
    let l = load(args)?;
    let g = formula(text)?;
    let r = kripke::restrict_nonvacuous(&l.kripke, &l.ctx, &g).map_err(eval_failure)?;
    Ok(match r {
        None => Output {
            code: 0,
            json: json!({ "command": "restrict", "formula": g, "worlds": Vec::<String>::new(), "model": Value::Null }),
            text: "# no world satisfies the background and the formula\n".into(),
            notes: vec![],
        },
        Some(r) => {
            let order = l.plaus.as_ref().map(|p| {
                let pairs: Vec<(usize, usize)> = p
                    .order()
                    .pairs()
                    .into_iter()
                    .filter_map(|(a, b)| {
                        let ia = r.mapping.iter().position(|&o| o == a)?;
                        let ib = r.mapping.iter().position(|&o| o == b)?;
                        Some((ia, ib))
                    })
                    .collect();
                preferential::StrictOrder::from_pairs(r.mapping.len(), &pairs)
            });
            let doc = submodel_doc(&l, &r.model, order.as_ref());
            let text = doc.to_text();
            Output {
                code: 0,
                json: json!({
                    "command": "restrict",
                    "formula": g,
                    "worlds": names(&l.kripke, r.mapping.iter().copied()),
                    "model": text,
                }),
                text,
                notes: vec![],
            }
        }
    })
}

fn audit_config(b: &AuditArgs, frame: FrameClass, non_vacuous: bool) -> AuditConfig {
    AuditConfig {
        seed: b.seed,
        trials: b.trials,
        max_worlds: b.max_worlds,
        max_atoms: b.max_atoms,
        formula_depth: b.depth,
        frame,
        count_non_vacuous: non_vacuous,
    }
}

fn cmd_audit(
    name: Option<&str>,
    list: bool,
    b: &AuditArgs,
    frame: Option<Frame>,
    non_vacuous: bool,
) -> Result<Output, Failure> {
    if list || name.is_none() {
        let props: Vec<Value> = metatheory::properties()
            .iter()
            .map(|p| json!({ "name": p.name, "summary": p.summary, "frame": p.frame }))
            .collect();
        let mut text = String::new();
        for p in metatheory::properties() {
            text.push_str(&format!("{:<40} {:<10} {}\n", p.name, p.frame.to_string(), p.summary));
        }
        if !list {
            return Err(Failure::Usage("name a property, or pass --list".into()));
        }
        return Ok(Output { code: 0, json: json!({ "command": "audit", "properties": props }), text, notes: vec![] });
    }
    let name = name.expect("checked above");
    let prop = metatheory::property(name).map_err(audit_failure)?;
    let cfg = audit_config(b, frame.map_or(prop.frame, Into::into), non_vacuous);
    let r = metatheory::audit(name, &cfg).map_err(audit_failure)?;
    let mut text = format!(
        "{}: {:?} ({} trials, {} non-vacuous, {} violations)\n",
        r.property, r.verdict, r.trials, r.non_vacuous, r.violations
    )
    .to_lowercase();
    for c in &r.counterexamples {
        text.push_str(&format!("\ncounterexample (trial {}): {}\n{}", c.trial, c.detail, c.instance.model));
        let fs: Vec<String> = c.instance.formulas.iter().map(|f| f.to_string()).collect();
        let ps: Vec<String> = c.instance.premises.iter().map(|f| f.to_string()).collect();
        text.push_str(&format!("premises: {}\nformulas: {}\n", ps.join("; "), fs.join("; ")));
    }
    for c in &r.exhibited {
        text.push_str(&format!("\nexhibit (trial {}): {}\n", c.trial, c.detail));
    }
    text.push_str("(finite search over generated models, not a proof)\n");
    Ok(Output { code: 0, json: json!({ "command": "audit", "report": r }), text, notes: vec![] })
}

fn cmd_matrix(b: &AuditArgs) -> Result<Output, Failure> {
    let cfg = audit_config(b, FrameClass::Order, false);
    let m = metatheory::property_matrix(&cfg).map_err(audit_failure)?;
    Ok(Output { code: 0, text: m.render(), json: json!({ "command": "matrix", "matrix": m }), notes: vec![] })
}

fn dispatch(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Check { model, world, formula } => cmd_check(model, world.as_deref(), formula),
        Command::Entail { model, kind, premises, theory, problem, bare, formula } => {
            cmd_entail(model, *kind, premises, *theory, problem.as_deref(), *bare, formula)
        }
        Command::Explain { model, problem, strategy, comparison, depth, bare } => {
            cmd_explain(model, problem, *strategy, *comparison, *depth, *bare)
        }
        Command::Minimize { model } => cmd_minimize(model),
        Command::Restrict { model, formula } => cmd_restrict(model, formula),
        Command::Audit { property, list, bounds, frame, non_vacuous } => {
            cmd_audit(property.as_deref(), *list, bounds, *frame, *non_vacuous)
        }
        Command::Matrix { bounds } => cmd_matrix(bounds),
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            for n in &o.notes {
                let _ = writeln!(err, "note: {n}");
            }
            if cli.json {
                let mut v = o.json;
                if !o.notes.is_empty() {
                    v["notes"] = json!(o.notes);
                }
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable"));
            } else {
                let _ = out.write_all(o.text.as_bytes());
            }
            o.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}
