//! Equalities between terms: consequence over finite families of equational matrices,
//! derivation checking for E1–E3 and their substitution variants, ground congruence
//! closure, and the implicational bridges to classical and intuitionistic logic.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde_json::{json, Value};

use crate::algebra::{decode_tuple, Assignment, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::intprover::{g3_decide, Sequent};
use crate::lang::{Formula, Node, Parser, Signature, Substitution, Sym, Token};
use crate::matrix::{consequence_with_caps, make_preset};
use crate::Caps;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equality {
    pub lhs: Formula,
    pub rhs: Formula,
}

impl Equality {
    pub fn new(lhs: Formula, rhs: Formula) -> Self {
        Equality { lhs, rhs }
    }

    /// `term ~ term`.
    pub fn parse(text: &str, sig: &Signature) -> Result<Self> {
        let mut p = Parser::new(text, sig)?;
        let lhs = p.formula()?;
        if p.bump() != Some(Token::Tilde) {
            return p.syntax("expected `~` between the two terms");
        }
        let rhs = p.formula()?;
        p.expect_end()?;
        Ok(Equality { lhs, rhs })
    }

    pub fn swap(&self) -> Self {
        Equality::new(self.rhs.clone(), self.lhs.clone())
    }

    pub fn substitute(&self, s: &Substitution) -> Self {
        Equality::new(s.apply(&self.lhs), s.apply(&self.rhs))
    }

    pub fn side(&self, i: usize) -> Option<&Formula> {
        match i {
            0 => Some(&self.lhs),
            1 => Some(&self.rhs),
            _ => None,
        }
    }

    /// The biconditional `lhs <-> rhs`.
    pub fn to_biconditional(&self) -> Formula {
        Formula::equiv(self.lhs.clone(), self.rhs.clone())
    }

    fn check(&self, sig: &Signature) -> Result<()> {
        sig.check(&self.lhs)?;
        sig.check(&self.rhs)
    }
}

impl fmt::Display for Equality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ~ {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EqMode {
    /// Premises and conclusion under the same valuation.
    E,
    /// Premises valid in an algebra force the conclusion valid there.
    EL,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EqVerdict {
    Holds,
    /// Index of the algebra in the family and the separating (mode E) or refuting (mode EL)
    /// valuation.
    Fails {
        algebra: usize,
        assignment: Assignment,
    },
}

impl EqVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, EqVerdict::Holds)
    }
}

fn eq_table(alg: &FiniteAlgebra, e: &Equality, vars: &[u32], caps: &Caps) -> Result<Vec<bool>> {
    let l = alg.term_table(&e.lhs, vars, caps)?;
    let r = alg.term_table(&e.rhs, vars, caps)?;
    Ok(l.iter().zip(&r).map(|(a, b)| a == b).collect())
}

fn assignment_at(vars: &[u32], t: usize, k: usize) -> Assignment {
    let mut tuple = vec![0; vars.len()];
    decode_tuple(t, k, &mut tuple);
    vars.iter().copied().zip(tuple).collect()
}

pub fn eq_consequence(
    mode: EqMode,
    ems: &[FiniteAlgebra],
    premises: &[Equality],
    e: &Equality,
    caps: &Caps,
) -> Result<EqVerdict> {
    let first = ems
        .first()
        .ok_or_else(|| Error::invalid("the family of algebras is empty"))?;
    for a in &ems[1..] {
        first.check_same_signature(a)?;
    }
    for x in premises.iter().chain([e]) {
        x.check(first.signature())?;
    }
    let mut all_vars = e.lhs.variables();
    all_vars.extend(e.rhs.variables());
    for p in premises {
        all_vars.extend(p.lhs.variables());
        all_vars.extend(p.rhs.variables());
    }
    let vars: Vec<u32> = all_vars.into_iter().collect();
    for (i, alg) in ems.iter().enumerate() {
        let goal = eq_table(alg, e, &vars, caps)?;
        let prem = premises
            .iter()
            .map(|p| eq_table(alg, p, &vars, caps))
            .collect::<Result<Vec<_>>>()?;
        match mode {
            EqMode::E => {
                if let Some(t) = (0..goal.len()).find(|&t| !goal[t] && prem.iter().all(|p| p[t])) {
                    return Ok(EqVerdict::Fails {
                        algebra: i,
                        assignment: assignment_at(&vars, t, alg.size()),
                    });
                }
            }
            EqMode::EL => {
                if prem.iter().all(|p| p.iter().all(|&b| b)) {
                    if let Some(t) = goal.iter().position(|&b| !b) {
                        return Ok(EqVerdict::Fails {
                            algebra: i,
                            assignment: assignment_at(&vars, t, alg.size()),
                        });
                    }
                }
            }
        }
    }
    Ok(EqVerdict::Holds)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ESystem {
    E1,
    E2,
    E3,
    E1s,
    E2s,
    E3s,
}

impl ESystem {
    pub fn has_substitution(self) -> bool {
        matches!(self, ESystem::E1s | ESystem::E2s | ESystem::E3s)
    }

    fn base(self) -> u8 {
        match self {
            ESystem::E1 | ESystem::E1s => 1,
            ESystem::E2 | ESystem::E2s => 2,
            ESystem::E3 | ESystem::E3s => 3,
        }
    }

    fn with_base(self, base: u8) -> ESystem {
        match (base, self.has_substitution()) {
            (1, false) => ESystem::E1,
            (2, false) => ESystem::E2,
            (3, false) => ESystem::E3,
            (1, true) => ESystem::E1s,
            (2, true) => ESystem::E2s,
            _ => ESystem::E3s,
        }
    }
}

impl fmt::Display for ESystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ESystem::E1 => "E1",
            ESystem::E2 => "E2",
            ESystem::E3 => "E3",
            ESystem::E1s => "E1s",
            ESystem::E2s => "E2s",
            ESystem::E3s => "E3s",
        })
    }
}

impl std::str::FromStr for ESystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "E1" => ESystem::E1,
            "E2" => ESystem::E2,
            "E3" => ESystem::E3,
            "E1s" => ESystem::E1s,
            "E2s" => ESystem::E2s,
            "E3s" => ESystem::E3s,
            other => return Err(Error::invalid(format!("unknown system `{other}`"))),
        })
    }
}

/// An occurrence: first the side (0 = left, 1 = right), then argument positions.
pub type Path = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Axiom,
    Premise,
    Symmetry {
        from: usize,
    },
    Transitivity {
        left: usize,
        right: usize,
    },
    Congruence {
        args: Vec<usize>,
    },
    /// Each `(path, j)` replaces the occurrence of `α` at `path` in the target by `β`,
    /// where step `j` proves `α ~ β`.
    Replacement {
        target: usize,
        replacements: Vec<(Path, usize)>,
    },
    Substitution {
        from: usize,
        subst: Substitution,
    },
}

impl Justification {
    fn name(&self) -> &'static str {
        match self {
            Justification::Axiom => "axiom",
            Justification::Premise => "premise",
            Justification::Symmetry { .. } => "symmetry",
            Justification::Transitivity { .. } => "transitivity",
            Justification::Congruence { .. } => "congruence",
            Justification::Replacement { .. } => "replacement",
            Justification::Substitution { .. } => "substitution",
        }
    }

    fn references(&self) -> Vec<usize> {
        match self {
            Justification::Axiom | Justification::Premise => vec![],
            Justification::Symmetry { from } | Justification::Substitution { from, .. } => vec![*from],
            Justification::Transitivity { left, right } => vec![*left, *right],
            Justification::Congruence { args } => args.clone(),
            Justification::Replacement { target, replacements } => {
                let mut v = vec![*target];
                v.extend(replacements.iter().map(|(_, j)| *j));
                v
            }
        }
    }

    fn allowed_in(&self, system: ESystem) -> bool {
        match self {
            Justification::Axiom | Justification::Premise | Justification::Symmetry { .. } => true,
            Justification::Transitivity { .. } | Justification::Congruence { .. } => system.base() == 1,
            Justification::Replacement { .. } => system.base() != 1,
            Justification::Substitution { .. } => system.has_substitution(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EStep {
    pub eq: Equality,
    pub by: Justification,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EDerivation {
    pub system: ESystem,
    pub steps: Vec<EStep>,
}

fn malformed(pointer: String, message: impl Into<String>) -> Error {
    Error::Spec {
        pointer,
        message: message.into(),
    }
}

fn field_index(step: &Value, at: &str, key: &str) -> Result<usize> {
    step.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| malformed(format!("{at}/{key}"), "expected a step index"))
}

impl EDerivation {
    /// `{"system": "E1", "steps": [{"eq": "...", "rule": "...", ...}]}`; see `to_json`.
    pub fn from_json(v: &Value, sig: &Signature) -> Result<Self> {
        let system: ESystem = v
            .get("system")
            .and_then(Value::as_str)
            .ok_or_else(|| malformed("/system".into(), "expected a system name"))?
            .parse()
            .map_err(|e: Error| malformed("/system".into(), e.to_string()))?;
        let steps = v
            .get("steps")
            .and_then(Value::as_array)
            .ok_or_else(|| malformed("/steps".into(), "expected an array of steps"))?;
        let mut out = Vec::with_capacity(steps.len());
        for (i, step) in steps.iter().enumerate() {
            let at = format!("/steps/{i}");
            let text = step
                .get("eq")
                .and_then(Value::as_str)
                .ok_or_else(|| malformed(format!("{at}/eq"), "expected an equality"))?;
            let eq = Equality::parse(text, sig).map_err(|e| malformed(format!("{at}/eq"), e.to_string()))?;
            let rule = step
                .get("rule")
                .and_then(Value::as_str)
                .ok_or_else(|| malformed(format!("{at}/rule"), "expected a rule name"))?;
            let by = match rule {
                "axiom" => Justification::Axiom,
                "premise" => Justification::Premise,
                "symmetry" => Justification::Symmetry {
                    from: field_index(step, &at, "from")?,
                },
                "transitivity" => Justification::Transitivity {
                    left: field_index(step, &at, "left")?,
                    right: field_index(step, &at, "right")?,
                },
                "congruence" => {
                    let args = step
                        .get("args")
                        .and_then(Value::as_array)
                        .ok_or_else(|| malformed(format!("{at}/args"), "expected an array of step indices"))?;
                    let args = args
                        .iter()
                        .enumerate()
                        .map(|(j, a)| {
                            a.as_u64()
                                .map(|x| x as usize)
                                .ok_or_else(|| malformed(format!("{at}/args/{j}"), "expected a step index"))
                        })
                        .collect::<Result<_>>()?;
                    Justification::Congruence { args }
                }
                "replacement" => {
                    let target = field_index(step, &at, "target")?;
                    let reps = step
                        .get("replace")
                        .and_then(Value::as_array)
                        .ok_or_else(|| malformed(format!("{at}/replace"), "expected an array of replacements"))?;
                    let mut replacements = Vec::new();
                    for (j, r) in reps.iter().enumerate() {
                        let rat = format!("{at}/replace/{j}");
                        let path = r
                            .get("path")
                            .and_then(Value::as_array)
                            .and_then(|p| {
                                p.iter()
                                    .map(|x| x.as_u64().map(|x| x as usize))
                                    .collect::<Option<Vec<_>>>()
                            })
                            .ok_or_else(|| malformed(format!("{rat}/path"), "expected an array of positions"))?;
                        replacements.push((path, field_index(r, &rat, "by")?));
                    }
                    Justification::Replacement { target, replacements }
                }
                "substitution" => {
                    let map = step
                        .get("subst")
                        .and_then(Value::as_object)
                        .ok_or_else(|| malformed(format!("{at}/subst"), "expected an object of bindings"))?;
                    let mut subst = Substitution::identity();
                    for (k, t) in map {
                        let var = k
                            .strip_prefix('p')
                            .and_then(|n| n.parse::<u32>().ok())
                            .filter(|&n| n >= 1)
                            .ok_or_else(|| {
                                malformed(format!("{at}/subst/{k}"), "keys must be variables p1, p2, ...")
                            })?;
                        let t = t
                            .as_str()
                            .ok_or_else(|| malformed(format!("{at}/subst/{k}"), "expected a term"))?;
                        let f = crate::lang::parse_formula(t, sig)
                            .map_err(|e| malformed(format!("{at}/subst/{k}"), e.to_string()))?;
                        subst.bind(var, f);
                    }
                    Justification::Substitution {
                        from: field_index(step, &at, "from")?,
                        subst,
                    }
                }
                other => return Err(malformed(format!("{at}/rule"), format!("unknown rule `{other}`"))),
            };
            out.push(EStep { eq, by });
        }
        Ok(EDerivation { system, steps: out })
    }

    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| {
                let mut v = json!({"eq": s.eq.to_string(), "rule": s.by.name()});
                match &s.by {
                    Justification::Axiom | Justification::Premise => {}
                    Justification::Symmetry { from } => v["from"] = json!(from),
                    Justification::Transitivity { left, right } => {
                        v["left"] = json!(left);
                        v["right"] = json!(right);
                    }
                    Justification::Congruence { args } => v["args"] = json!(args),
                    Justification::Replacement { target, replacements } => {
                        v["target"] = json!(target);
                        v["replace"] = replacements
                            .iter()
                            .map(|(p, j)| json!({"path": p, "by": j}))
                            .collect::<Vec<_>>()
                            .into();
                    }
                    Justification::Substitution { from, subst } => {
                        v["from"] = json!(from);
                        let map: serde_json::Map<String, Value> = subst
                            .bindings()
                            .map(|(x, f)| (format!("p{x}"), json!(f.to_string())))
                            .collect();
                        v["subst"] = Value::Object(map);
                    }
                }
                v
            })
            .collect();
        json!({"system": self.system.to_string(), "steps": steps})
    }
}

fn subterm_at<'a>(eq: &'a Equality, path: &[usize]) -> Option<&'a Formula> {
    let (&side, rest) = path.split_first()?;
    let mut f = eq.side(side)?;
    for &i in rest {
        f = match f.node() {
            Node::Apply(_, args) => args.get(i)?,
            _ => return None,
        };
    }
    Some(f)
}

fn replace_in(f: &Formula, positions: &[usize], new: &Formula) -> Formula {
    match positions.split_first() {
        None => new.clone(),
        Some((&i, rest)) => match f.node() {
            Node::Apply(op, args) => {
                let mut args = args.clone();
                args[i] = replace_in(&args[i], rest, new);
                Formula::apply_sym(op.clone(), args)
            }
            _ => unreachable!("path checked before replacement"),
        },
    }
}

fn replace_at(eq: &Equality, path: &[usize], new: &Formula) -> Equality {
    let (&side, rest) = path.split_first().expect("nonempty path");
    if side == 0 {
        Equality::new(replace_in(&eq.lhs, rest, new), eq.rhs.clone())
    } else {
        Equality::new(eq.lhs.clone(), replace_in(&eq.rhs, rest, new))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DerivationCheck {
    Valid { conclusion: Equality },
    Invalid { step: usize, reason: String },
}

impl DerivationCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, DerivationCheck::Valid { .. })
    }
}

/// Checks each step against the axiom and rules of `d.system`. Malformed justifications
/// (forward references, paths that address no occurrence) are errors; well-formed steps that
/// do not follow by their rule give `Invalid` at the first such step.
pub fn check_e_derivation(d: &EDerivation, premises: &[Equality]) -> Result<DerivationCheck> {
    if d.steps.is_empty() {
        return Err(malformed("/steps".into(), "a derivation needs at least one step"));
    }
    for (i, step) in d.steps.iter().enumerate() {
        for r in step.by.references() {
            if r >= i {
                return Err(malformed(
                    format!("/steps/{i}"),
                    format!("step {i} refers to step {r}, which does not precede it"),
                ));
            }
        }
        let invalid = |reason: String| Ok(DerivationCheck::Invalid { step: i, reason });
        if !step.by.allowed_in(d.system) {
            return invalid(format!("rule {} is not a rule of {}", step.by.name(), d.system));
        }
        let eq = &step.eq;
        let proved = |j: usize| &d.steps[j].eq;
        match &step.by {
            Justification::Axiom => {
                if eq.lhs != eq.rhs {
                    return invalid("not an instance of α ~ α".into());
                }
            }
            Justification::Premise => {
                if !premises.contains(eq) {
                    return invalid(format!("{eq} is not a premise"));
                }
            }
            Justification::Symmetry { from } => {
                if *eq != proved(*from).swap() {
                    return invalid(format!("does not reverse step {from}"));
                }
            }
            Justification::Transitivity { left, right } => {
                let (l, r) = (proved(*left), proved(*right));
                if l.rhs != r.lhs || eq.lhs != l.lhs || eq.rhs != r.rhs {
                    return invalid(format!("does not chain steps {left} and {right}"));
                }
            }
            Justification::Congruence { args } => {
                let ok = match (eq.lhs.node(), eq.rhs.node()) {
                    (Node::Apply(f, xs), Node::Apply(g, ys)) => {
                        f == g
                            && !args.is_empty()
                            && xs.len() == args.len()
                            && ys.len() == args.len()
                            && args
                                .iter()
                                .enumerate()
                                .all(|(k, &j)| proved(j).lhs == xs[k] && proved(j).rhs == ys[k])
                    }
                    _ => false,
                };
                if !ok {
                    return invalid("not of the form F(α1..αn) ~ F(β1..βn) over the cited steps".into());
                }
            }
            Justification::Replacement { target, replacements } => {
                let base = proved(*target);
                for (path, _) in replacements {
                    if subterm_at(base, path).is_none() {
                        return Err(malformed(
                            format!("/steps/{i}/replace"),
                            format!("path {path:?} addresses no occurrence in step {target}"),
                        ));
                    }
                }
                if d.system.base() == 3 && replacements.len() != 1 {
                    return invalid(format!("{} replaces exactly one occurrence", d.system));
                }
                if replacements.is_empty() {
                    return invalid("replacement cites no occurrence".into());
                }
                for (a, (p, _)) in replacements.iter().enumerate() {
                    for (q, _) in &replacements[a + 1..] {
                        if p.starts_with(q) || q.starts_with(p) {
                            return invalid(format!("occurrences {p:?} and {q:?} overlap"));
                        }
                    }
                }
                let mut result = base.clone();
                for (path, j) in replacements {
                    let by = proved(*j);
                    if subterm_at(base, path) != Some(&by.lhs) {
                        return invalid(format!("the occurrence at {path:?} is not the left side of step {j}"));
                    }
                    result = replace_at(&result, path, &by.rhs);
                }
                if result != *eq {
                    return invalid(format!("replacing in step {target} gives {result}"));
                }
            }
            Justification::Substitution { from, subst } => {
                if proved(*from).substitute(subst) != *eq {
                    return invalid(format!("not a substitution instance of step {from}"));
                }
            }
        }
    }
    Ok(DerivationCheck::Valid {
        conclusion: d.steps.last().expect("nonempty").eq.clone(),
    })
}

/// Rewrites an E1 (E1s) derivation into E2 (E2s): transitivity becomes a replacement on the
/// right side, congruence becomes an axiom `F(ᾱ) ~ F(ᾱ)` followed by one multi-occurrence
/// replacement.
pub fn translate_e1_to_e2(d: &EDerivation) -> Result<EDerivation> {
    if d.system.base() != 1 {
        return Err(Error::invalid(format!("expected an E1 derivation, found {}", d.system)));
    }
    let mut steps = Vec::new();
    let mut at: Vec<usize> = Vec::with_capacity(d.steps.len());
    for step in &d.steps {
        let by = match &step.by {
            Justification::Axiom => Justification::Axiom,
            Justification::Premise => Justification::Premise,
            Justification::Symmetry { from } => Justification::Symmetry { from: at[*from] },
            Justification::Substitution { from, subst } => Justification::Substitution {
                from: at[*from],
                subst: subst.clone(),
            },
            Justification::Transitivity { left, right } => Justification::Replacement {
                target: at[*left],
                replacements: vec![(vec![1], at[*right])],
            },
            Justification::Congruence { args } => {
                steps.push(EStep {
                    eq: Equality::new(step.eq.lhs.clone(), step.eq.lhs.clone()),
                    by: Justification::Axiom,
                });
                Justification::Replacement {
                    target: steps.len() - 1,
                    replacements: args.iter().enumerate().map(|(k, &j)| (vec![1, k], at[j])).collect(),
                }
            }
            Justification::Replacement { .. } => {
                return Err(Error::invalid("replacement does not occur in E1 derivations"))
            }
        };
        steps.push(EStep {
            eq: step.eq.clone(),
            by,
        });
        at.push(steps.len() - 1);
    }
    Ok(EDerivation {
        system: d.system.with_base(2),
        steps,
    })
}

/// Rewrites an E2 (E2s) derivation into E3 (E3s) by performing disjoint replacements one at
/// a time.
pub fn translate_e2_to_e3(d: &EDerivation) -> Result<EDerivation> {
    if d.system.base() != 2 {
        return Err(Error::invalid(format!("expected an E2 derivation, found {}", d.system)));
    }
    let mut steps: Vec<EStep> = Vec::new();
    let mut at: Vec<usize> = Vec::with_capacity(d.steps.len());
    for step in &d.steps {
        let by = match &step.by {
            Justification::Replacement { target, replacements } => {
                let mut cur = at[*target];
                for (path, j) in &replacements[..replacements.len().saturating_sub(1)] {
                    let by = &steps[at[*j]].eq;
                    let eq = replace_at(&steps[cur].eq, path, &by.rhs);
                    steps.push(EStep {
                        eq,
                        by: Justification::Replacement {
                            target: cur,
                            replacements: vec![(path.clone(), at[*j])],
                        },
                    });
                    cur = steps.len() - 1;
                }
                let (path, j) = replacements
                    .last()
                    .ok_or_else(|| Error::invalid("replacement cites no occurrence"))?;
                Justification::Replacement {
                    target: cur,
                    replacements: vec![(path.clone(), at[*j])],
                }
            }
            Justification::Symmetry { from } => Justification::Symmetry { from: at[*from] },
            Justification::Substitution { from, subst } => Justification::Substitution {
                from: at[*from],
                subst: subst.clone(),
            },
            other => other.clone(),
        };
        steps.push(EStep {
            eq: step.eq.clone(),
            by,
        });
        at.push(steps.len() - 1);
    }
    Ok(EDerivation {
        system: d.system.with_base(3),
        steps,
    })
}

/// A finite algebra on the closure classes plus an absorbing `*`, with the valuation sending
/// each variable to its class.
#[derive(Clone, Debug)]
pub struct GroundModel {
    pub algebra: FiniteAlgebra,
    pub assignment: Assignment,
}

#[derive(Clone, Debug)]
pub struct GroundResult {
    pub derivable: bool,
    /// The closure partition of the subterm universe, classes in order of their lowest member.
    pub classes: Vec<Vec<Formula>>,
    pub model: Option<GroundModel>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Key {
    Var(u32),
    Const(Sym),
    App(Sym, Vec<usize>),
}

struct Closure {
    terms: Vec<Formula>,
    keys: Vec<Key>,
    ids: HashMap<Key, usize>,
    parent: Vec<usize>,
}

impl Closure {
    fn add(&mut self, f: &Formula) -> usize {
        let key = match f.node() {
            Node::Var(v) => Key::Var(*v),
            Node::Const(c) => Key::Const(c.clone()),
            Node::Apply(op, args) => Key::App(op.clone(), args.iter().map(|a| self.add(a)).collect()),
        };
        if let Some(&i) = self.ids.get(&key) {
            return i;
        }
        let i = self.terms.len();
        self.terms.push(f.clone());
        self.keys.push(key.clone());
        self.ids.insert(key, i);
        self.parent.push(i);
        i
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    /// Merges applications with the same symbol and equal argument classes until stable.
    fn propagate(&mut self) {
        loop {
            let mut table: HashMap<(Sym, Vec<usize>), usize> = HashMap::new();
            let mut changed = false;
            for i in 0..self.terms.len() {
                let Key::App(op, args) = self.keys[i].clone() else {
                    continue;
                };
                let sig = (op, args.iter().map(|&a| self.find(a)).collect());
                match table.get(&sig) {
                    Some(&j) => changed |= self.union(i, j),
                    None => {
                        table.insert(sig, i);
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
}

/// Decides `premises ⊢ e` without substitution (variables act as constants) by congruence
/// closure over the subterms of premises and goal.
pub fn decide_ground_equational(premises: &[Equality], e: &Equality) -> Result<GroundResult> {
    let mut c = Closure {
        terms: Vec::new(),
        keys: Vec::new(),
        ids: HashMap::new(),
        parent: Vec::new(),
    };
    let mut pairs = Vec::new();
    for p in premises {
        pairs.push((c.add(&p.lhs), c.add(&p.rhs)));
    }
    let (gl, gr) = (c.add(&e.lhs), c.add(&e.rhs));
    for (a, b) in pairs {
        c.union(a, b);
    }
    c.propagate();
    let n = c.terms.len();
    let roots: Vec<usize> = (0..n).map(|i| c.find(i)).collect();
    let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    for &r in &roots {
        let next = class_of_root.len();
        class_of_root.entry(r).or_insert(next);
    }
    let mut classes = vec![Vec::new(); class_of_root.len()];
    for i in 0..n {
        classes[class_of_root[&roots[i]]].push(c.terms[i].clone());
    }
    let derivable = roots[gl] == roots[gr];
    let model = if derivable {
        None
    } else {
        let cls = |i: usize| class_of_root[&roots[i]];
        let star = classes.len();
        let mut sig = Signature::new();
        let mut apps: HashMap<(Sym, Vec<usize>), usize> = HashMap::new();
        for i in 0..n {
            match &c.keys[i] {
                Key::Var(_) => {}
                Key::Const(s) => {
                    if !sig.contains(s) {
                        sig.add(s, 0)?;
                    }
                    apps.insert((s.clone(), vec![]), cls(i));
                }
                Key::App(s, args) => {
                    if !sig.contains(s) {
                        sig.add(s, args.len())?;
                    }
                    apps.insert((s.clone(), args.iter().map(|&a| cls(a)).collect()), cls(i));
                }
            }
        }
        let mut names: Vec<String> = classes.iter().map(|m| format!("[{}]", m[0])).collect();
        names.push("*".into());
        let algebra = FiniteAlgebra::from_fn(sig.clone(), names, |op, args| {
            if args.contains(&star) {
                return star;
            }
            let s = sig.symbol(op).expect("declared");
            apps.get(&(s, args.to_vec())).copied().unwrap_or(star)
        })?;
        let assignment = (0..n)
            .filter_map(|i| match c.keys[i] {
                Key::Var(v) => Some((v, cls(i))),
                _ => None,
            })
            .collect();
        Some(GroundModel { algebra, assignment })
    };
    Ok(GroundResult {
        derivable,
        classes,
        model,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bridge {
    /// Boolean algebras, via the two-element matrix.
    EB,
    /// Heyting algebras, via the G3 prover.
    EH,
}

impl std::str::FromStr for Bridge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "EB" | "eb" => Ok(Bridge::EB),
            "EH" | "eh" => Ok(Bridge::EH),
            other => Err(Error::invalid(format!("unknown bridge `{other}`"))),
        }
    }
}

fn drop_constants(f: &Formula, top: &Formula, bot: &Formula) -> Result<Formula> {
    Ok(match f.node() {
        Node::Var(_) => f.clone(),
        Node::Const(c) => match &**c {
            "top" => top.clone(),
            "bot" => bot.clone(),
            other => return Err(Error::invalid(format!("constant `{other}` has no Heyting reading"))),
        },
        Node::Apply(op, args) => Formula::apply_sym(
            op.clone(),
            args.iter()
                .map(|a| drop_constants(a, top, bot))
                .collect::<Result<_>>()?,
        ),
    })
}

/// Decides `premises ⊢ e` in the equational logic of Boolean (EB) or Heyting (EH) algebras
/// through the biconditional translation of equalities.
pub fn bridge_implicational(target: Bridge, premises: &[Equality], e: &Equality, caps: &Caps) -> Result<bool> {
    let sig = Signature::boolean_with_constants();
    for x in premises.iter().chain([e]) {
        x.check(&sig)?;
    }
    let prem: Vec<Formula> = premises.iter().map(Equality::to_biconditional).collect();
    let goal = e.to_biconditional();
    match target {
        Bridge::EB => Ok(consequence_with_caps(&make_preset("B2")?, &prem, &goal, caps)?.holds()),
        Bridge::EH => {
            let fresh = prem.iter().chain([&goal]).map(Formula::max_var).max().unwrap_or(0) + 1;
            let q = Formula::var(fresh);
            let top = Formula::imp(q.clone(), q.clone());
            let bot = Formula::and(q.clone(), Formula::not(q));
            let goal = drop_constants(&goal, &top, &bot)?;
            let claim = match prem
                .into_iter()
                .map(|p| drop_constants(&p, &top, &bot))
                .reduce(|a, b| Ok(Formula::and(a?, b?)))
            {
                None => goal,
                Some(conj) => Formula::imp(conj?, goal),
            };
            Ok(g3_decide(&Sequent::theorem(claim), caps)?.is_proved())
        }
    }
}
