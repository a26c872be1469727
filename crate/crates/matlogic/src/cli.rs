//! Command-line front end and the JSON workspace format.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser as ClapParser, Subcommand};
use serde_json::{json, Map, Value};

use crate::algebra::{Assignment, FiniteAlgebra};
use crate::decide::{
    atlas_equivalence, atlas_inclusion, has_theorems, theorem_inclusion, weak_equivalence, Answer, DecisionReport,
};
use crate::eqlogic::{
    bridge_implicational, check_e_derivation, decide_ground_equational, eq_consequence, Bridge, DerivationCheck,
    EDerivation, EqMode, EqVerdict, Equality,
};
use crate::error::{Error, Result};
use crate::intprover::{
    g3_decide, glivenko_check, int_relation, rn_classify, rn_power, IntRelation, ProveOutcome, RnClass, RnIndex,
    Sequent, RN_BOUND,
};
use crate::lang::{parse_formula, Formula, Signature};
use crate::lindenbaum::{free_matrix_algebra, representatives};
use crate::matrix::{
    combine_matrices, consequence_with_caps, greatest_compatible_congruence, make_preset, Atlas, Combination, Matrix,
    Verdict, PRESETS,
};
use crate::Caps;

/// A validated workspace file.
#[derive(Clone, Debug)]
pub struct WorkspaceSpec {
    pub signature: Signature,
    pub algebras: BTreeMap<String, FiniteAlgebra>,
    pub matrices: BTreeMap<String, Matrix>,
    pub atlases: BTreeMap<String, Atlas>,
    pub caps: Caps,
}

fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn spec_err(pointer: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Spec {
        pointer: pointer.into(),
        message: message.into(),
    }
}

fn object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| spec_err(at, "expected an object"))
}

fn array<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| spec_err(at, "expected an array"))
}

fn only_keys(obj: &Map<String, Value>, at: &str, allowed: &[&str]) -> Result<()> {
    for k in obj.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(spec_err(format!("{at}/{}", escape(k)), format!("unknown key `{k}`")));
        }
    }
    Ok(())
}

fn element_of(v: &Value, at: &str, elements: &[String]) -> Result<usize> {
    let name = v.as_str().ok_or_else(|| spec_err(at, "expected an element name"))?;
    elements
        .iter()
        .position(|e| e == name)
        .ok_or_else(|| spec_err(at, format!("`{name}` is not an element of the carrier")))
}

fn flatten_table(v: &Value, depth: usize, at: &str, elements: &[String], out: &mut Vec<usize>) -> Result<()> {
    if depth == 0 {
        out.push(element_of(v, at, elements)?);
        return Ok(());
    }
    let rows = array(v, at)?;
    if rows.len() != elements.len() {
        return Err(spec_err(
            at,
            format!(
                "table is not total: {} entries, expected {}",
                rows.len(),
                elements.len()
            ),
        ));
    }
    for (i, r) in rows.iter().enumerate() {
        flatten_table(r, depth - 1, &format!("{at}/{i}"), elements, out)?;
    }
    Ok(())
}

fn parse_signature(v: &Value) -> Result<Signature> {
    let obj = object(v, "/signature")?;
    only_keys(obj, "/signature", &["connectives"])?;
    let list = array(
        obj.get("connectives")
            .ok_or_else(|| spec_err("/signature/connectives", "missing"))?,
        "/signature/connectives",
    )?;
    let mut sig = Signature::new();
    for (i, c) in list.iter().enumerate() {
        let at = format!("/signature/connectives/{i}");
        let c = object(c, &at)?;
        only_keys(c, &at, &["name", "arity"])?;
        let name = c
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| spec_err(format!("{at}/name"), "expected a string"))?;
        let arity = c
            .get("arity")
            .and_then(Value::as_u64)
            .ok_or_else(|| spec_err(format!("{at}/arity"), "expected a natural number"))?;
        sig.add(name, arity as usize)
            .map_err(|e| spec_err(format!("{at}/name"), e.to_string()))?;
    }
    Ok(sig)
}

fn parse_algebra(sig: &Signature, v: &Value, at: &str) -> Result<FiniteAlgebra> {
    let obj = object(v, at)?;
    only_keys(obj, at, &["elements", "operations"])?;
    let elements: Vec<String> = array(
        obj.get("elements")
            .ok_or_else(|| spec_err(format!("{at}/elements"), "missing"))?,
        &format!("{at}/elements"),
    )?
    .iter()
    .enumerate()
    .map(|(i, e)| {
        e.as_str()
            .map(str::to_string)
            .ok_or_else(|| spec_err(format!("{at}/elements/{i}"), "expected a string"))
    })
    .collect::<Result<_>>()?;
    let ops_at = format!("{at}/operations");
    let ops = object(
        obj.get("operations").ok_or_else(|| spec_err(&ops_at, "missing"))?,
        &ops_at,
    )?;
    let mut tables = BTreeMap::new();
    for (name, table) in ops {
        let tat = format!("{ops_at}/{}", escape(name));
        let arity = sig
            .arity(name)
            .ok_or_else(|| spec_err(&tat, format!("`{name}` is not in the signature")))?;
        let mut flat = Vec::new();
        flatten_table(table, arity, &tat, &elements, &mut flat)?;
        tables.insert(name.clone(), flat);
    }
    for (name, _) in sig.iter() {
        if !ops.contains_key(&**name) {
            return Err(spec_err(&ops_at, format!("no table for `{name}`")));
        }
    }
    FiniteAlgebra::new(sig.clone(), elements, tables).map_err(|e| spec_err(at, e.to_string()))
}

fn algebra_ref<'a>(
    algebras: &'a BTreeMap<String, FiniteAlgebra>,
    obj: &Map<String, Value>,
    at: &str,
) -> Result<&'a FiniteAlgebra> {
    let name = obj
        .get("algebra")
        .and_then(Value::as_str)
        .ok_or_else(|| spec_err(format!("{at}/algebra"), "expected an algebra name"))?;
    algebras
        .get(name)
        .ok_or_else(|| spec_err(format!("{at}/algebra"), format!("no algebra named `{name}`")))
}

/// Parses and validates a workspace document.
pub fn parse_spec(text: &str) -> Result<WorkspaceSpec> {
    let v: Value = serde_json::from_str(text).map_err(|e| spec_err("", format!("invalid JSON: {e}")))?;
    let root = object(&v, "")?;
    only_keys(root, "", &["signature", "algebras", "matrices", "atlases", "options"])?;
    let signature = parse_signature(root.get("signature").ok_or_else(|| spec_err("/signature", "missing"))?)?;
    let mut algebras = BTreeMap::new();
    if let Some(a) = root.get("algebras") {
        for (name, def) in object(a, "/algebras")? {
            let at = format!("/algebras/{}", escape(name));
            algebras.insert(name.clone(), parse_algebra(&signature, def, &at)?);
        }
    }
    let mut matrices = BTreeMap::new();
    if let Some(m) = root.get("matrices") {
        for (name, def) in object(m, "/matrices")? {
            let at = format!("/matrices/{}", escape(name));
            let obj = object(def, &at)?;
            only_keys(obj, &at, &["algebra", "designated"])?;
            let alg = algebra_ref(&algebras, obj, &at)?;
            let dat = format!("{at}/designated");
            let des = array(obj.get("designated").ok_or_else(|| spec_err(&dat, "missing"))?, &dat)?
                .iter()
                .enumerate()
                .map(|(i, d)| element_of(d, &format!("{dat}/{i}"), alg.elements()))
                .collect::<Result<Vec<_>>>()?;
            matrices.insert(name.clone(), Matrix::new(alg.clone(), des)?);
        }
    }
    let mut atlases = BTreeMap::new();
    if let Some(a) = root.get("atlases") {
        for (name, def) in object(a, "/atlases")? {
            let at = format!("/atlases/{}", escape(name));
            let obj = object(def, &at)?;
            only_keys(obj, &at, &["algebra", "filters"])?;
            let alg = algebra_ref(&algebras, obj, &at)?;
            let fat = format!("{at}/filters");
            let mut filters = Vec::new();
            for (i, f) in array(obj.get("filters").ok_or_else(|| spec_err(&fat, "missing"))?, &fat)?
                .iter()
                .enumerate()
            {
                let iat = format!("{fat}/{i}");
                filters.push(
                    array(f, &iat)?
                        .iter()
                        .enumerate()
                        .map(|(j, d)| element_of(d, &format!("{iat}/{j}"), alg.elements()))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            atlases.insert(
                name.clone(),
                Atlas::new(alg.clone(), filters).map_err(|e| spec_err(&fat, e.to_string()))?,
            );
        }
    }
    let mut caps = Caps::default();
    if let Some(o) = root.get("options") {
        let obj = object(o, "/options")?;
        only_keys(obj, "/options", &["max_clone", "max_tuples", "memo_limit"])?;
        for (key, slot) in [
            ("max_clone", &mut caps.max_clone),
            ("max_tuples", &mut caps.max_tuples),
            ("memo_limit", &mut caps.memo_limit),
        ] {
            if let Some(x) = obj.get(key) {
                *slot = x
                    .as_u64()
                    .ok_or_else(|| spec_err(format!("/options/{key}"), "expected a natural number"))?
                    as usize;
            }
        }
    }
    Ok(WorkspaceSpec {
        signature,
        algebras,
        matrices,
        atlases,
        caps,
    })
}

pub fn load_spec(path: &Path) -> Result<WorkspaceSpec> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text)
}

fn table_json(alg: &FiniteAlgebra, op: &str, arity: usize, prefix: &mut Vec<usize>) -> Value {
    if prefix.len() == arity {
        return json!(alg.element_name(alg.apply(op, prefix)));
    }
    let rows = (0..alg.size())
        .map(|x| {
            prefix.push(x);
            let v = table_json(alg, op, arity, prefix);
            prefix.pop();
            v
        })
        .collect();
    Value::Array(rows)
}

/// An algebra in workspace format.
pub fn algebra_to_json(alg: &FiniteAlgebra) -> Value {
    let ops: Map<String, Value> = alg
        .signature()
        .iter()
        .map(|(name, arity)| (name.to_string(), table_json(alg, name, arity, &mut Vec::new())))
        .collect();
    json!({"elements": alg.elements(), "operations": ops})
}

#[derive(ClapParser)]
#[command(
    name = "matlogic",
    version,
    about = "Finite logical matrices, consequence and decision procedures"
)]
struct Cli {
    /// Print a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Workspace file with signature, algebras, matrices and atlases.
    #[arg(long, global = true, value_name = "FILE")]
    file: Option<PathBuf>,
    /// Largest clone or representative set to build (default 1000000).
    #[arg(long, global = true)]
    max_clone: Option<usize>,
    /// Largest number of assignment tuples to scan (default 16777216).
    #[arg(long, global = true)]
    max_tuples: Option<usize>,
    /// Largest number of prover states to visit (default 1000000).
    #[arg(long, global = true)]
    memo_limit: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Target {
    /// A built-in matrix: B2, L3, L3modal, G<n>, LC<m>.
    #[arg(long)]
    preset: Option<String>,
    /// A matrix from the workspace.
    #[arg(long)]
    matrix: Option<String>,
    /// An atlas from the workspace.
    #[arg(long)]
    atlas: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula under an assignment.
    Eval {
        #[command(flatten)]
        target: Target,
        /// An algebra from the workspace (or a preset name).
        #[arg(long)]
        algebra: Option<String>,
        formula: String,
        /// Comma-separated `p1=a,p2=b` with element names.
        #[arg(long, value_delimiter = ',')]
        assign: Vec<String>,
    },
    /// Validity of a formula in a matrix or atlas.
    Valid {
        #[command(flatten)]
        target: Target,
        formula: String,
    },
    /// Consequence from premises in a matrix or atlas.
    Conseq {
        #[command(flatten)]
        target: Target,
        /// A premise; repeat for several.
        #[arg(long = "premise")]
        premises: Vec<String>,
        formula: String,
    },
    /// Whether a matrix has no theorems.
    Trivial {
        #[command(flatten)]
        target: Target,
    },
    /// Weak equivalence `Thm[M1] = Thm[M2]`.
    Weq { m1: String, m2: String },
    /// Theorem inclusion `Thm[M1] ⊆ Thm[M2]`.
    Incl {
        m1: String,
        m2: String,
        /// Number of variables to scan instead of the generating-set bound.
        #[arg(long)]
        vars: Option<usize>,
    },
    /// Consequence inclusion `⊢_{A1} ⊆ ⊢_{A2}`.
    AtlasIncl {
        a1: String,
        a2: String,
        /// Number of variables to scan instead of the generating-set bound.
        #[arg(long)]
        vars: Option<usize>,
    },
    /// Consequence equality of two atlases.
    AtlasEq { a1: String, a2: String },
    /// Representatives of n-variable formulas modulo indistinguishability.
    Reps {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        algebra: Option<String>,
        /// Number of variables p1..pn.
        #[arg(long, default_value_t = 1)]
        vars: usize,
    },
    /// The algebra of n-ary term functions with its designated set.
    FreeAlgebra {
        #[command(flatten)]
        target: Target,
        /// Number of variables p1..pn.
        #[arg(long, default_value_t = 1)]
        vars: usize,
    },
    /// The greatest congruence compatible with the designated sets.
    Congruence {
        #[command(flatten)]
        target: Target,
    },
    /// Combine two matrices: lsum, rsum, product or sum.
    Combine { kind: String, m1: String, m2: String },
    /// Equational logic.
    Eq {
        #[command(subcommand)]
        command: EqCommand,
    },
    /// Intuitionistic logic via G3.
    Int {
        #[command(subcommand)]
        command: IntCommand,
    },
    /// List built-in matrices.
    Presets,
}

#[derive(Subcommand)]
enum EqCommand {
    /// Equational consequence over a family of algebras.
    Conseq {
        /// E (pointwise) or EL (identities).
        #[arg(long, default_value = "E")]
        mode: String,
        /// An algebra of the family; repeat for several.
        #[arg(long = "algebra", required = true)]
        algebras: Vec<String>,
        /// A premise; repeat for several.
        #[arg(long = "premise")]
        premises: Vec<String>,
        goal: String,
    },
    /// Check a derivation file.
    DeriveCheck {
        derivation: PathBuf,
        /// A premise; repeat for several.
        #[arg(long = "premise")]
        premises: Vec<String>,
        /// Signature as `name/arity,...` when no workspace is given.
        #[arg(long)]
        sig: Option<String>,
    },
    /// Ground equational consequence by congruence closure.
    Ground {
        /// A premise; repeat for several.
        #[arg(long = "premise")]
        premises: Vec<String>,
        goal: String,
        /// Signature as `name/arity,...` when no workspace is given.
        #[arg(long)]
        sig: Option<String>,
    },
    /// Equational logic of Boolean (EB) or Heyting (EH) algebras.
    Bridge {
        target: String,
        /// A premise; repeat for several.
        #[arg(long = "premise")]
        premises: Vec<String>,
        goal: String,
    },
}

#[derive(Subcommand)]
enum IntCommand {
    /// Decide a formula or a sequent `A, B => C`.
    Prove {
        sequent: String,
        /// Include the proof tree.
        #[arg(long)]
        proof: bool,
    },
    /// preceq, sim or ll between two formulas.
    Relation { kind: String, a: String, b: String },
    /// Print a ladder power: a natural number or omega.
    Rn {
        index: String,
        #[arg(long, default_value_t = RN_BOUND)]
        bound: usize,
    },
    /// Ladder position of a formula in p1.
    Classify {
        formula: String,
        #[arg(long, default_value_t = 16)]
        bound: usize,
    },
    /// Compare classical validity with provability of the double negation.
    Glivenko { formula: String },
}

struct Report {
    code: i32,
    text: String,
    json: Value,
}

impl Report {
    fn new(code: i32, text: impl Into<String>, json: Value) -> Self {
        Report {
            code,
            text: text.into(),
            json,
        }
    }
}

enum Sem {
    Matrix(Matrix),
    Atlas(Atlas),
}

impl Sem {
    fn algebra(&self) -> &FiniteAlgebra {
        match self {
            Sem::Matrix(m) => m.algebra(),
            Sem::Atlas(a) => a.algebra(),
        }
    }
}

struct Ctx {
    ws: Option<WorkspaceSpec>,
    caps: Caps,
}

fn answer_code(a: Answer) -> i32 {
    match a {
        Answer::Yes => 0,
        Answer::No => 1,
        Answer::CapExceeded => 3,
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn show_assignment(alg: &FiniteAlgebra, a: &Assignment) -> String {
    a.iter()
        .map(|(v, x)| format!("p{v} = {}", alg.element_name(*x)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn assignment_json(alg: &FiniteAlgebra, a: &Assignment) -> Value {
    Value::Object(
        a.iter()
            .map(|(v, x)| (format!("p{v}"), json!(alg.element_name(*x))))
            .collect(),
    )
}

fn parse_sig_list(text: &str) -> Result<Signature> {
    let mut sig = Signature::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, arity) = item
            .rsplit_once('/')
            .ok_or_else(|| Error::invalid(format!("`{item}` is not of the form name/arity")))?;
        let arity = arity
            .parse()
            .map_err(|_| Error::invalid(format!("`{arity}` is not an arity")))?;
        sig.add(name, arity)?;
    }
    Ok(sig)
}

impl Ctx {
    fn matrix(&self, name: &str) -> Result<Matrix> {
        if let Some(m) = self.ws.as_ref().and_then(|w| w.matrices.get(name)) {
            return Ok(m.clone());
        }
        make_preset(name).map_err(|_| Error::invalid(format!("no matrix or preset named `{name}`")))
    }

    fn atlas(&self, name: &str) -> Result<Atlas> {
        if let Some(a) = self.ws.as_ref().and_then(|w| w.atlases.get(name)) {
            return Ok(a.clone());
        }
        self.matrix(name)
            .map(|m| m.to_atlas())
            .map_err(|_| Error::invalid(format!("no atlas, matrix or preset named `{name}`")))
    }

    fn algebra(&self, name: &str) -> Result<FiniteAlgebra> {
        if let Some(a) = self.ws.as_ref().and_then(|w| w.algebras.get(name)) {
            return Ok(a.clone());
        }
        make_preset(name)
            .map(|m| m.algebra().clone())
            .map_err(|_| Error::invalid(format!("no algebra or preset named `{name}`")))
    }

    fn target(&self, t: &Target) -> Result<Sem> {
        match (&t.preset, &t.matrix, &t.atlas) {
            (Some(p), None, None) => Ok(Sem::Matrix(
                make_preset(p).map_err(|_| Error::invalid(format!("no preset named `{p}`")))?,
            )),
            (None, Some(m), None) => Ok(Sem::Matrix(self.ws_get(m, |w| &w.matrices, "matrix")?)),
            (None, None, Some(a)) => Ok(Sem::Atlas(self.ws_get(a, |w| &w.atlases, "atlas")?)),
            _ => Err(Error::invalid("give exactly one of --preset, --matrix, --atlas")),
        }
    }

    fn ws_get<T: Clone>(
        &self,
        name: &str,
        pick: impl Fn(&WorkspaceSpec) -> &BTreeMap<String, T>,
        what: &str,
    ) -> Result<T> {
        let ws = self
            .ws
            .as_ref()
            .ok_or_else(|| Error::invalid(format!("--{what} needs a workspace given with --file")))?;
        pick(ws)
            .get(name)
            .cloned()
            .ok_or_else(|| Error::invalid(format!("no {what} named `{name}` in the workspace")))
    }

    fn matrix_target(&self, t: &Target) -> Result<Matrix> {
        match self.target(t)? {
            Sem::Matrix(m) => Ok(m),
            Sem::Atlas(_) => Err(Error::invalid("this command needs a matrix, not an atlas")),
        }
    }

    fn term_signature(&self, sig: &Option<String>) -> Result<Signature> {
        match (sig, &self.ws) {
            (Some(s), _) => parse_sig_list(s),
            (None, Some(w)) => Ok(w.signature.clone()),
            (None, None) => Ok(Signature::boolean_with_constants()),
        }
    }
}

fn decision(report: DecisionReport, what: &str) -> Report {
    let mut text = format!("{what}: {}\n", report.answer.as_str());
    if let Some(w) = &report.witness {
        text.push_str(&format!("witness: {w}\n"));
    }
    if let Some(d) = &report.detail {
        text.push_str(&format!("detail: {d}\n"));
    }
    text.push_str(&format!(
        "representatives: {}, variables: {}, work: {}\n",
        report.stats.representatives, report.stats.variables, report.stats.work_units
    ));
    Report::new(answer_code(report.answer), text, report.to_json())
}

fn verdict_report(sem: &Sem, v: Verdict, what: &str) -> Report {
    match v {
        Verdict::Holds => Report::new(0, format!("{what}\n"), json!({"holds": true})),
        Verdict::Fails { assignment, filter } => {
            let alg = sem.algebra();
            let mut text = format!(
                "not {what}\nrefuting assignment: {}\n",
                show_assignment(alg, &assignment)
            );
            if let Sem::Atlas(_) = sem {
                text.push_str(&format!("filter: {filter}\n"));
            }
            Report::new(
                1,
                text,
                json!({"holds": false, "assignment": assignment_json(alg, &assignment), "filter": filter}),
            )
        }
    }
}

fn semantic_check(ctx: &Ctx, target: &Target, premises: &[String], formula: &str, what: &str) -> Result<Report> {
    let sem = ctx.target(target)?;
    let sig = sem.algebra().signature().clone();
    let f = parse_formula(formula, &sig)?;
    let prem = premises
        .iter()
        .map(|p| parse_formula(p, &sig))
        .collect::<Result<Vec<_>>>()?;
    let v = match &sem {
        Sem::Matrix(m) => consequence_with_caps(m, &prem, &f, &ctx.caps)?,
        Sem::Atlas(a) => consequence_with_caps(a, &prem, &f, &ctx.caps)?,
    };
    Ok(verdict_report(&sem, v, what))
}

fn parse_equalities(texts: &[String], sig: &Signature) -> Result<Vec<Equality>> {
    texts.iter().map(|t| Equality::parse(t, sig)).collect()
}

fn run_eq(ctx: &Ctx, cmd: EqCommand) -> Result<Report> {
    match cmd {
        EqCommand::Conseq {
            mode,
            algebras,
            premises,
            goal,
        } => {
            let mode = match mode.as_str() {
                "E" => EqMode::E,
                "EL" => EqMode::EL,
                other => return Err(Error::invalid(format!("unknown mode `{other}`; use E or EL"))),
            };
            let algs = algebras.iter().map(|a| ctx.algebra(a)).collect::<Result<Vec<_>>>()?;
            let sig = algs[0].signature().clone();
            let prem = parse_equalities(&premises, &sig)?;
            let e = Equality::parse(&goal, &sig)?;
            Ok(match eq_consequence(mode, &algs, &prem, &e, &ctx.caps)? {
                EqVerdict::Holds => Report::new(0, "yes\n", json!({"answer": "yes"})),
                EqVerdict::Fails { algebra, assignment } => {
                    let alg = &algs[algebra];
                    Report::new(
                        1,
                        format!(
                            "no\nalgebra: {}\nassignment: {}\n",
                            algebras[algebra],
                            show_assignment(alg, &assignment)
                        ),
                        json!({"answer": "no", "algebra": algebras[algebra], "algebra_index": algebra,
                               "assignment": assignment_json(alg, &assignment)}),
                    )
                }
            })
        }
        EqCommand::DeriveCheck {
            derivation,
            premises,
            sig,
        } => {
            let sig = ctx.term_signature(&sig)?;
            let text = std::fs::read_to_string(&derivation)
                .map_err(|e| Error::invalid(format!("cannot read {}: {e}", derivation.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| spec_err("", format!("invalid JSON: {e}")))?;
            let d = EDerivation::from_json(&v, &sig)?;
            let mut prem = parse_equalities(&premises, &sig)?;
            if let Some(list) = v.get("premises") {
                for (i, p) in array(list, "/premises")?.iter().enumerate() {
                    let at = format!("/premises/{i}");
                    let t = p.as_str().ok_or_else(|| spec_err(&at, "expected an equality"))?;
                    prem.push(Equality::parse(t, &sig).map_err(|e| spec_err(&at, e.to_string()))?);
                }
            }
            Ok(match check_e_derivation(&d, &prem)? {
                DerivationCheck::Valid { conclusion } => Report::new(
                    0,
                    format!("valid {} derivation of {conclusion}\n", d.system),
                    json!({"valid": true, "conclusion": conclusion.to_string()}),
                ),
                DerivationCheck::Invalid { step, reason } => Report::new(
                    1,
                    format!("invalid at step {step}: {reason}\n"),
                    json!({"valid": false, "step": step, "reason": reason}),
                ),
            })
        }
        EqCommand::Ground { premises, goal, sig } => {
            let sig = ctx.term_signature(&sig)?;
            let prem = parse_equalities(&premises, &sig)?;
            let e = Equality::parse(&goal, &sig)?;
            let r = decide_ground_equational(&prem, &e)?;
            let classes: Vec<Vec<String>> = r
                .classes
                .iter()
                .map(|c| c.iter().map(Formula::to_string).collect())
                .collect();
            let mut text = format!("{}\n", yes_no(r.derivable));
            for c in &classes {
                text.push_str(&format!("class: {}\n", c.join(" = ")));
            }
            Ok(Report::new(
                if r.derivable { 0 } else { 1 },
                text,
                json!({"answer": yes_no(r.derivable), "classes": classes}),
            ))
        }
        EqCommand::Bridge { target, premises, goal } => {
            let bridge: Bridge = target.parse()?;
            let sig = Signature::boolean_with_constants();
            let prem = parse_equalities(&premises, &sig)?;
            let e = Equality::parse(&goal, &sig)?;
            let holds = bridge_implicational(bridge, &prem, &e, &ctx.caps)?;
            Ok(Report::new(
                if holds { 0 } else { 1 },
                format!("{}\n", yes_no(holds)),
                json!({"answer": yes_no(holds)}),
            ))
        }
    }
}

fn int_formula(text: &str) -> Result<Formula> {
    parse_formula(text, &Signature::boolean())
}

fn run_int(ctx: &Ctx, cmd: IntCommand) -> Result<Report> {
    match cmd {
        IntCommand::Prove { sequent, proof } => {
            let s = if sequent.contains("=>") {
                Sequent::parse(&sequent)?
            } else {
                Sequent::theorem(int_formula(&sequent)?)
            };
            Ok(match g3_decide(&s, &ctx.caps)? {
                ProveOutcome::Proved(tree) => {
                    let mut text = format!("proved: {s}\n");
                    let mut j = json!({"answer": "proved", "sequent": s.to_string(), "size": tree.size()});
                    if proof {
                        text.push_str(&tree.to_text());
                        j["proof"] = tree.to_json();
                    }
                    Report::new(0, text, j)
                }
                ProveOutcome::Unprovable => Report::new(
                    1,
                    format!("unprovable: {s}\n"),
                    json!({"answer": "unprovable", "sequent": s.to_string()}),
                ),
            })
        }
        IntCommand::Relation { kind, a, b } => {
            let rel: IntRelation = kind.parse()?;
            let holds = int_relation(rel, &int_formula(&a)?, &int_formula(&b)?, &ctx.caps)?;
            Ok(Report::new(
                if holds { 0 } else { 1 },
                format!("{}\n", yes_no(holds)),
                json!({"answer": yes_no(holds)}),
            ))
        }
        IntCommand::Rn { index, bound } => {
            let idx: RnIndex = index.parse()?;
            let f = rn_power(idx, bound)?;
            Ok(Report::new(
                0,
                format!("{f}\n"),
                json!({"index": idx.to_string(), "formula": f.to_string()}),
            ))
        }
        IntCommand::Classify { formula, bound } => {
            let f = int_formula(&formula)?;
            Ok(match rn_classify(&f, bound, &ctx.caps)? {
                RnClass::Index(i) => Report::new(0, format!("{i}\n"), json!({"class": i.to_string()})),
                RnClass::ExceedsBound => Report::new(
                    1,
                    format!("not equivalent to any power up to {bound}\n"),
                    json!({"class": Value::Null, "bound": bound}),
                ),
            })
        }
        IntCommand::Glivenko { formula } => {
            let f = int_formula(&formula)?;
            let (classical, int) = glivenko_check(&f, &ctx.caps)?;
            Ok(Report::new(
                if classical == int { 0 } else { 1 },
                format!(
                    "classical tautology: {}\n~~f provable in Int: {}\n",
                    yes_no(classical),
                    yes_no(int)
                ),
                json!({"classical": classical, "intuitionistic_double_negation": int}),
            ))
        }
    }
}

fn run(ctx: &Ctx, command: Command) -> Result<Report> {
    let caps = &ctx.caps;
    match command {
        Command::Eval {
            target,
            algebra,
            formula,
            assign,
        } => {
            let alg = match algebra {
                Some(a) => ctx.algebra(&a)?,
                None => ctx.target(&target)?.algebra().clone(),
            };
            let f = parse_formula(&formula, alg.signature())?;
            let mut a = Assignment::new();
            for item in &assign {
                let (var, val) = item
                    .split_once('=')
                    .ok_or_else(|| Error::invalid(format!("`{item}` is not of the form p1=element")))?;
                let v = match parse_formula(var.trim(), alg.signature())?.as_var() {
                    Some(v) => v,
                    None => return Err(Error::invalid(format!("`{var}` is not a variable"))),
                };
                let x = alg
                    .element_index(val.trim())
                    .ok_or_else(|| Error::invalid(format!("`{val}` is not an element")))?;
                a.insert(v, x);
            }
            let value = alg.element_name(alg.evaluate(&f, &a)?).to_string();
            Ok(Report::new(0, format!("{value}\n"), json!({"value": value})))
        }
        Command::Valid { target, formula } => semantic_check(ctx, &target, &[], &formula, "valid"),
        Command::Conseq {
            target,
            premises,
            formula,
        } => semantic_check(ctx, &target, &premises, &formula, "a consequence"),
        Command::Trivial { target } => {
            let m = ctx.matrix_target(&target)?;
            let r = has_theorems(&m, caps)?;
            let mut text = match r.answer {
                Answer::Yes => "has theorems\n".to_string(),
                Answer::No => "no theorems\n".to_string(),
                Answer::CapExceeded => format!("cap exceeded: {}\n", r.detail.clone().unwrap_or_default()),
            };
            if let Some(w) = &r.witness {
                text.push_str(&format!("witness: {w}\n"));
            }
            Ok(Report::new(answer_code(r.answer), text, r.to_json()))
        }
        Command::Weq { m1, m2 } => Ok(decision(
            weak_equivalence(&ctx.matrix(&m1)?, &ctx.matrix(&m2)?, caps)?,
            "weakly equivalent",
        )),
        Command::Incl { m1, m2, vars } => Ok(decision(
            theorem_inclusion(&ctx.matrix(&m1)?, &ctx.matrix(&m2)?, caps, vars)?,
            "Thm[M1] ⊆ Thm[M2]",
        )),
        Command::AtlasIncl { a1, a2, vars } => Ok(decision(
            atlas_inclusion(&ctx.atlas(&a1)?, &ctx.atlas(&a2)?, caps, vars)?,
            "⊢1 ⊆ ⊢2",
        )),
        Command::AtlasEq { a1, a2 } => Ok(decision(
            atlas_equivalence(&ctx.atlas(&a1)?, &ctx.atlas(&a2)?, caps)?,
            "⊢1 = ⊢2",
        )),
        Command::Reps { target, algebra, vars } => {
            let alg = match algebra {
                Some(a) => ctx.algebra(&a)?,
                None => ctx.target(&target)?.algebra().clone(),
            };
            let reps = representatives(&alg, vars, caps)?;
            let mut text = format!("{} representatives in {} variable(s)\n", reps.len(), vars);
            for e in &reps.entries {
                let row: Vec<&str> = e.table.iter().map(|&v| alg.element_name(v as usize)).collect();
                text.push_str(&format!("{}\t[{}]\n", e.witness, row.join(" ")));
            }
            Ok(Report::new(
                0,
                text,
                json!({"count": reps.len(), "representatives": reps.to_json(&alg)}),
            ))
        }
        Command::FreeAlgebra { target, vars } => {
            let m = ctx.matrix_target(&target)?;
            let fa = free_matrix_algebra(&m, vars, caps)?;
            let names = fa.algebra.elements();
            let des: Vec<&str> = fa.designated.iter().map(|&i| names[i].as_str()).collect();
            let mut text = format!("{} elements\n", names.len());
            for n in names {
                text.push_str(&format!("  {n}\n"));
            }
            text.push_str(&format!("designated: {}\n", des.join("; ")));
            Ok(Report::new(
                0,
                text,
                json!({"size": names.len(), "algebra": algebra_to_json(&fa.algebra), "designated": des}),
            ))
        }
        Command::Congruence { target } => {
            let sem = ctx.target(&target)?;
            let theta = match &sem {
                Sem::Matrix(m) => greatest_compatible_congruence(m),
                Sem::Atlas(a) => greatest_compatible_congruence(a),
            };
            let alg = sem.algebra();
            let blocks: Vec<Vec<&str>> = theta
                .blocks()
                .iter()
                .map(|b| b.iter().map(|&x| alg.element_name(x)).collect())
                .collect();
            let mut text = format!(
                "{} block(s){}\n",
                blocks.len(),
                if theta.is_identity() { ", reduced" } else { "" }
            );
            for b in &blocks {
                text.push_str(&format!("  {{{}}}\n", b.join(", ")));
            }
            Ok(Report::new(
                0,
                text,
                json!({"blocks": blocks, "reduced": theta.is_identity()}),
            ))
        }
        Command::Combine { kind, m1, m2 } => {
            let kind: Combination = kind.parse()?;
            let m = combine_matrices(kind, &ctx.matrix(&m1)?, &ctx.matrix(&m2)?)?;
            let alg = m.algebra();
            let des: Vec<&str> = m.designated().iter().map(|&i| alg.element_name(i)).collect();
            Ok(Report::new(
                0,
                format!(
                    "{kind} of {m1} and {m2}: {} elements\ndesignated: {}\n",
                    alg.size(),
                    des.join(", ")
                ),
                json!({"algebra": algebra_to_json(alg), "designated": des}),
            ))
        }
        Command::Eq { command } => run_eq(ctx, command),
        Command::Int { command } => run_int(ctx, command),
        Command::Presets => {
            let text: String = PRESETS.iter().map(|p| format!("{p}\n")).collect();
            Ok(Report::new(0, text, json!({"presets": PRESETS})))
        }
    }
}

/// Runs one command line (without the program name) and returns the exit code and report:
/// 0 yes/valid/proved, 1 no/invalid/unprovable, 2 usage or input error, 3 cap exceeded.
pub fn run_command<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args = std::iter::once("matlogic".to_string()).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let json_out = cli.json;
    let result = (|| {
        let ws = cli.file.as_deref().map(load_spec).transpose()?;
        let mut caps = ws.as_ref().map_or_else(Caps::default, |w| w.caps);
        if let Some(x) = cli.max_clone {
            caps.max_clone = x;
        }
        if let Some(x) = cli.max_tuples {
            caps.max_tuples = x;
        }
        if let Some(x) = cli.memo_limit {
            caps.memo_limit = x;
        }
        run(&Ctx { ws, caps }, cli.command)
    })();
    match result {
        Ok(r) if json_out => (
            r.code,
            format!("{}\n", serde_json::to_string_pretty(&r.json).expect("serializable")),
        ),
        Ok(r) => (r.code, r.text),
        Err(e) => {
            let code = if e.is_cap() { 3 } else { 2 };
            if json_out {
                let mut j = json!({"error": e.to_string()});
                if let Error::Spec { pointer, .. } = &e {
                    j["pointer"] = json!(pointer);
                }
                (
                    code,
                    format!("{}\n", serde_json::to_string_pretty(&j).expect("serializable")),
                )
            } else {
                (code, format!("error: {e}\n"))
            }
        }
    }
}
