//! Backward proof search in Kleene's G3 for intuitionistic propositional logic over
//! `{~, &, |, ->}`, Rieger-Nishimura powers, Int relations and Glivenko checks.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lang::{Formula, Node, Parser, Signature, Token, AND, IMP, NOT, OR};
use crate::matrix::{is_valid_with_caps, make_preset};
use crate::Caps;

/// A finite antecedent set and at most one succedent formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub antecedent: BTreeSet<Formula>,
    pub succedent: Option<Formula>,
}

impl Sequent {
    pub fn new(antecedent: impl IntoIterator<Item = Formula>, succedent: Option<Formula>) -> Self {
        Sequent {
            antecedent: antecedent.into_iter().collect(),
            succedent,
        }
    }

    /// `⇒ f`.
    pub fn theorem(f: Formula) -> Self {
        Sequent::new([], Some(f))
    }

    /// Parses `A1, A2 => B`, `A1, A2 =>` or `=> B` over `{~, &, |, ->}`.
    pub fn parse(text: &str) -> Result<Self> {
        let sig = Signature::boolean();
        let mut p = Parser::new(text, &sig)?;
        let mut ante = Vec::new();
        if p.peek() != Some(&Token::Turnstile) {
            loop {
                ante.push(p.formula()?);
                match p.bump() {
                    Some(Token::Comma) => {}
                    Some(Token::Turnstile) => break,
                    _ => return p.syntax("expected `,` or `=>`"),
                }
            }
        } else {
            p.bump();
        }
        let succ = if p.at_end() { None } else { Some(p.formula()?) };
        p.expect_end()?;
        Ok(Sequent::new(ante, succ))
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ante: Vec<String> = self.antecedent.iter().map(|a| a.to_string()).collect();
        let head = ante.join(", ");
        match (&self.succedent, head.is_empty()) {
            (Some(s), true) => write!(f, "=> {s}"),
            (Some(s), false) => write!(f, "{head} => {s}"),
            (None, true) => write!(f, "=>"),
            (None, false) => write!(f, "{head} =>"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Axiom,
    /// `α,Γ ⇒ β / Γ ⇒ α→β`
    ImpRight,
    /// `α→β,Γ ⇒ α` and `β,α→β,Γ ⇒ Θ` / `α→β,Γ ⇒ Θ`
    ImpLeft,
    /// `Γ ⇒ α` and `Γ ⇒ β` / `Γ ⇒ α∧β`
    AndRight,
    /// `α,α∧β,Γ ⇒ Θ` (or with `β`) / `α∧β,Γ ⇒ Θ`
    AndLeft,
    /// `Γ ⇒ α` (or `β`) / `Γ ⇒ α∨β`
    OrRight,
    /// `α,α∨β,Γ ⇒ Θ` and `β,α∨β,Γ ⇒ Θ` / `α∨β,Γ ⇒ Θ`
    OrLeft,
    /// `α,Γ ⇒` / `Γ ⇒ ¬α`
    NotRight,
    /// `¬α,Γ ⇒ α` / `¬α,Γ ⇒ Θ`
    NotLeft,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Axiom => "axiom",
            Rule::ImpRight => "→-1",
            Rule::ImpLeft => "→-2",
            Rule::AndRight => "∧-1",
            Rule::AndLeft => "∧-2",
            Rule::OrRight => "∨-1",
            Rule::OrLeft => "∨-2",
            Rule::NotRight => "¬-1",
            Rule::NotLeft => "¬-2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTree {
    pub sequent: Sequent,
    pub rule: Rule,
    /// The principal antecedent formula of a left rule.
    pub principal: Option<Formula>,
    pub children: Vec<ProofTree>,
}

impl ProofTree {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ProofTree::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.children.iter().map(ProofTree::height).max().unwrap_or(0)
    }

    /// One line per node, children indented below their conclusion.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(0, &mut out);
        out
    }

    fn write_text(&self, indent: usize, out: &mut String) {
        out.push_str(&"  ".repeat(indent));
        out.push_str(&format!("{}   [{}]\n", self.sequent, self.rule.name()));
        for c in &self.children {
            c.write_text(indent + 1, out);
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "sequent": self.sequent.to_string(),
            "rule": self.rule.name(),
            "children": self.children.iter().map(ProofTree::to_json).collect::<Vec<_>>(),
        });
        if let Some(p) = &self.principal {
            v["principal"] = json!(p.to_string());
        }
        v
    }
}

fn with(set: &BTreeSet<Formula>, f: &Formula) -> BTreeSet<Formula> {
    let mut s = set.clone();
    s.insert(f.clone());
    s
}

/// Checks every node of `tree` against its rule schema, reading antecedents as sets.
pub fn check_proof(tree: &ProofTree) -> std::result::Result<(), String> {
    let s = &tree.sequent;
    let ch = &tree.children;
    let fail = |msg: &str| Err(format!("{} at `{}`: {msg}", tree.rule.name(), s));
    let expect_children = |n: usize| {
        if ch.len() == n {
            Ok(())
        } else {
            Err(format!(
                "{} at `{}`: expected {n} premises, found {}",
                tree.rule.name(),
                s,
                ch.len()
            ))
        }
    };
    let principal = || -> std::result::Result<&Formula, String> {
        match &tree.principal {
            Some(p) if s.antecedent.contains(p) => Ok(p),
            _ => Err(format!(
                "{} at `{}`: principal formula missing from the antecedent",
                tree.rule.name(),
                s
            )),
        }
    };
    let same = |c: &ProofTree, ante: &BTreeSet<Formula>, succ: Option<&Formula>| {
        c.sequent.antecedent == *ante && c.sequent.succedent.as_ref() == succ
    };
    match tree.rule {
        Rule::Axiom => {
            expect_children(0)?;
            match &s.succedent {
                Some(a) if s.antecedent.contains(a) => {}
                _ => return fail("succedent does not occur in the antecedent"),
            }
        }
        Rule::ImpRight => {
            expect_children(1)?;
            let Some((a, b)) = s.succedent.as_ref().and_then(|f| f.as_binary(IMP)) else {
                return fail("succedent is not an implication");
            };
            if !same(&ch[0], &with(&s.antecedent, a), Some(b)) {
                return fail("premise does not match");
            }
        }
        Rule::ImpLeft => {
            expect_children(2)?;
            let p = principal()?;
            let Some((a, b)) = p.as_binary(IMP) else {
                return fail("principal is not an implication");
            };
            if !same(&ch[0], &s.antecedent, Some(a)) || !same(&ch[1], &with(&s.antecedent, b), s.succedent.as_ref()) {
                return fail("premises do not match");
            }
        }
        Rule::AndRight => {
            expect_children(2)?;
            let Some((a, b)) = s.succedent.as_ref().and_then(|f| f.as_binary(AND)) else {
                return fail("succedent is not a conjunction");
            };
            if !same(&ch[0], &s.antecedent, Some(a)) || !same(&ch[1], &s.antecedent, Some(b)) {
                return fail("premises do not match");
            }
        }
        Rule::AndLeft => {
            expect_children(1)?;
            let p = principal()?;
            let Some((a, b)) = p.as_binary(AND) else {
                return fail("principal is not a conjunction");
            };
            let succ = s.succedent.as_ref();
            if !same(&ch[0], &with(&s.antecedent, a), succ) && !same(&ch[0], &with(&s.antecedent, b), succ) {
                return fail("premise does not match");
            }
        }
        Rule::OrRight => {
            expect_children(1)?;
            let Some((a, b)) = s.succedent.as_ref().and_then(|f| f.as_binary(OR)) else {
                return fail("succedent is not a disjunction");
            };
            if !same(&ch[0], &s.antecedent, Some(a)) && !same(&ch[0], &s.antecedent, Some(b)) {
                return fail("premise does not match");
            }
        }
        Rule::OrLeft => {
            expect_children(2)?;
            let p = principal()?;
            let Some((a, b)) = p.as_binary(OR) else {
                return fail("principal is not a disjunction");
            };
            let succ = s.succedent.as_ref();
            if !same(&ch[0], &with(&s.antecedent, a), succ) || !same(&ch[1], &with(&s.antecedent, b), succ) {
                return fail("premises do not match");
            }
        }
        Rule::NotRight => {
            expect_children(1)?;
            let Some(a) = s.succedent.as_ref().and_then(|f| f.as_unary(NOT)) else {
                return fail("succedent is not a negation");
            };
            if !same(&ch[0], &with(&s.antecedent, a), None) {
                return fail("premise does not match");
            }
        }
        Rule::NotLeft => {
            expect_children(1)?;
            let p = principal()?;
            let Some(a) = p.as_unary(NOT) else {
                return fail("principal is not a negation");
            };
            if !same(&ch[0], &s.antecedent, Some(a)) {
                return fail("premise does not match");
            }
        }
    }
    ch.iter().try_for_each(check_proof)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Atom,
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
    Imp(u32, u32),
}

type Key = (Rc<[u32]>, Option<u32>);

struct PNode {
    ante: Rc<[u32]>,
    succ: Option<u32>,
    rule: Rule,
    principal: Option<u32>,
    children: Vec<Rc<PNode>>,
}

const FREE: usize = usize::MAX;

/// A reusable prover: formulas are interned once and failed sequents stay cached across
/// calls; proofs found are cached for the duration of one call.
pub struct G3Prover {
    forms: Vec<Formula>,
    kinds: Vec<Kind>,
    ids: HashMap<Formula, u32>,
    failed: HashSet<Key>,
    proved: HashMap<Key, Rc<PNode>>,
    stack: HashMap<Key, usize>,
    memo_limit: usize,
    run_entries: usize,
}

fn insert_sorted(ante: &[u32], x: u32) -> Rc<[u32]> {
    match ante.binary_search(&x) {
        Ok(_) => Rc::from(ante),
        Err(pos) => {
            let mut v = Vec::with_capacity(ante.len() + 1);
            v.extend_from_slice(&ante[..pos]);
            v.push(x);
            v.extend_from_slice(&ante[pos..]);
            Rc::from(v)
        }
    }
}

impl G3Prover {
    pub fn new(caps: &Caps) -> Self {
        G3Prover {
            forms: Vec::new(),
            kinds: Vec::new(),
            ids: HashMap::new(),
            failed: HashSet::new(),
            proved: HashMap::new(),
            stack: HashMap::new(),
            memo_limit: caps.memo_limit,
            run_entries: 0,
        }
    }

    fn intern(&mut self, f: &Formula) -> Result<u32> {
        if let Some(&i) = self.ids.get(f) {
            return Ok(i);
        }
        let kind = match f.node() {
            Node::Var(_) => Kind::Atom,
            Node::Const(c) => {
                return Err(Error::invalid(format!(
                    "constant `{c}` is not available in G3; use ~, &, | and -> only"
                )))
            }
            Node::Apply(op, args) => {
                let ids = args.iter().map(|a| self.intern(a)).collect::<Result<Vec<_>>>()?;
                match (&**op, ids.as_slice()) {
                    (NOT, [a]) => Kind::Not(*a),
                    (AND, [a, b]) => Kind::And(*a, *b),
                    (OR, [a, b]) => Kind::Or(*a, *b),
                    (IMP, [a, b]) => Kind::Imp(*a, *b),
                    _ => {
                        return Err(Error::invalid(format!(
                            "connective `{op}` is not available in G3; use ~, &, | and -> only"
                        )))
                    }
                }
            }
        };
        let i = self.forms.len() as u32;
        self.forms.push(f.clone());
        self.kinds.push(kind);
        self.ids.insert(f.clone(), i);
        Ok(i)
    }

    /// A proof of `s`, or `None` if `s` is not derivable.
    pub fn decide(&mut self, s: &Sequent) -> Result<Option<ProofTree>> {
        let mut ante = Vec::new();
        for a in &s.antecedent {
            ante.push(self.intern(a)?);
        }
        ante.sort_unstable();
        ante.dedup();
        let succ = s.succedent.as_ref().map(|f| self.intern(f)).transpose()?;
        self.proved.clear();
        self.stack.clear();
        self.run_entries = 0;
        let (res, _) = self.prove(Rc::from(ante), succ)?;
        self.proved.clear();
        Ok(res.map(|p| {
            let tree = self.export(&p);
            debug_assert!(check_proof(&tree).is_ok());
            tree
        }))
    }

    pub fn provable(&mut self, f: &Formula) -> Result<bool> {
        Ok(self.decide(&Sequent::theorem(f.clone()))?.is_some())
    }

    fn export(&self, p: &PNode) -> ProofTree {
        ProofTree {
            sequent: Sequent {
                antecedent: p.ante.iter().map(|&i| self.forms[i as usize].clone()).collect(),
                succedent: p.succ.map(|i| self.forms[i as usize].clone()),
            },
            rule: p.rule,
            principal: p.principal.map(|i| self.forms[i as usize].clone()),
            children: p.children.iter().map(|c| self.export(c)).collect(),
        }
    }

    fn prove(&mut self, ante: Rc<[u32]>, succ: Option<u32>) -> Result<(Option<Rc<PNode>>, usize)> {
        let key: Key = (ante.clone(), succ);
        if let Some(p) = self.proved.get(&key) {
            return Ok((Some(p.clone()), FREE));
        }
        if self.failed.contains(&key) {
            return Ok((None, FREE));
        }
        if let Some(&d) = self.stack.get(&key) {
            return Ok((None, d));
        }
        if self.run_entries >= self.memo_limit {
            return Err(Error::cap(format!("prover memo exceeded {} sequents", self.memo_limit)));
        }
        self.run_entries += 1;
        let level = self.stack.len();
        self.stack.insert(key.clone(), level);
        let result = self.expand(&ante, succ);
        self.stack.remove(&key);
        let (found, low) = result?;
        match found {
            Some(p) => {
                self.proved.insert(key, p.clone());
                Ok((Some(p), FREE))
            }
            None => {
                if low >= level {
                    self.failed.insert(key);
                    Ok((None, FREE))
                } else {
                    Ok((None, low))
                }
            }
        }
    }

    fn expand(&mut self, ante: &Rc<[u32]>, succ: Option<u32>) -> Result<(Option<Rc<PNode>>, usize)> {
        let mut low = FREE;
        let node = |rule, principal, children| {
            Some(Rc::new(PNode {
                ante: ante.clone(),
                succ,
                rule,
                principal,
                children,
            }))
        };
        let has = |x: u32| ante.binary_search(&x).is_ok();

        if let Some(s) = succ {
            if has(s) {
                return Ok((node(Rule::Axiom, None, vec![]), FREE));
            }
        }
        for &i in ante.iter() {
            if let Kind::And(a, b) = self.kinds[i as usize] {
                let part = if !has(a) {
                    a
                } else if !has(b) {
                    b
                } else {
                    continue;
                };
                let (r, l) = self.prove(insert_sorted(ante, part), succ)?;
                return Ok(match r {
                    Some(c) => (node(Rule::AndLeft, Some(i), vec![c]), FREE),
                    None => (None, l),
                });
            }
        }
        for &i in ante.iter() {
            if let Kind::Or(a, b) = self.kinds[i as usize] {
                if has(a) || has(b) {
                    continue;
                }
                let (r1, l1) = self.prove(insert_sorted(ante, a), succ)?;
                let Some(c1) = r1 else {
                    return Ok((None, l1));
                };
                let (r2, l2) = self.prove(insert_sorted(ante, b), succ)?;
                return Ok(match r2 {
                    Some(c2) => (node(Rule::OrLeft, Some(i), vec![c1, c2]), FREE),
                    None => (None, l2),
                });
            }
        }
        if let Some(s) = succ {
            match self.kinds[s as usize] {
                Kind::Imp(a, b) => {
                    let (r, l) = self.prove(insert_sorted(ante, a), Some(b))?;
                    return Ok(match r {
                        Some(c) => (node(Rule::ImpRight, None, vec![c]), FREE),
                        None => (None, l),
                    });
                }
                Kind::Not(a) => {
                    let (r, l) = self.prove(insert_sorted(ante, a), None)?;
                    return Ok(match r {
                        Some(c) => (node(Rule::NotRight, None, vec![c]), FREE),
                        None => (None, l),
                    });
                }
                Kind::And(a, b) => {
                    let (r1, l1) = self.prove(ante.clone(), Some(a))?;
                    let Some(c1) = r1 else {
                        return Ok((None, l1));
                    };
                    let (r2, l2) = self.prove(ante.clone(), Some(b))?;
                    return Ok(match r2 {
                        Some(c2) => (node(Rule::AndRight, None, vec![c1, c2]), FREE),
                        None => (None, l2),
                    });
                }
                Kind::Or(a, b) => {
                    for part in [a, b] {
                        let (r, l) = self.prove(ante.clone(), Some(part))?;
                        low = low.min(l);
                        if let Some(c) = r {
                            return Ok((node(Rule::OrRight, None, vec![c]), FREE));
                        }
                    }
                }
                Kind::Atom => {}
            }
        }
        for &i in ante.iter() {
            if let Kind::Imp(a, b) = self.kinds[i as usize] {
                if has(b) || succ == Some(a) {
                    continue;
                }
                let (r1, l1) = self.prove(ante.clone(), Some(a))?;
                low = low.min(l1);
                let Some(c1) = r1 else { continue };
                let (r2, l2) = self.prove(insert_sorted(ante, b), succ)?;
                low = low.min(l2);
                if let Some(c2) = r2 {
                    return Ok((node(Rule::ImpLeft, Some(i), vec![c1, c2]), FREE));
                }
            }
        }
        for &i in ante.iter() {
            if let Kind::Not(a) = self.kinds[i as usize] {
                if succ == Some(a) {
                    continue;
                }
                let (r, l) = self.prove(ante.clone(), Some(a))?;
                low = low.min(l);
                if let Some(c) = r {
                    return Ok((node(Rule::NotLeft, Some(i), vec![c]), FREE));
                }
            }
        }
        Ok((None, low))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProveOutcome {
    Proved(ProofTree),
    Unprovable,
}

impl ProveOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProveOutcome::Proved(_))
    }
}

/// Decides `s` in G3 with a fresh prover; proofs are re-checked before they are returned.
pub fn g3_decide(s: &Sequent, caps: &Caps) -> Result<ProveOutcome> {
    let mut prover = G3Prover::new(caps);
    match prover.decide(s)? {
        Some(tree) => {
            check_proof(&tree).map_err(|e| Error::invalid(format!("internal proof check failed: {e}")))?;
            Ok(ProveOutcome::Proved(tree))
        }
        None => Ok(ProveOutcome::Unprovable),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IntRelation {
    /// `⊢ a → b`
    Preceq,
    /// `a ≼ b` and `b ≼ a`
    Sim,
    /// `⊢ (b → a) → b`
    Ll,
}

impl std::str::FromStr for IntRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "preceq" => Ok(IntRelation::Preceq),
            "sim" => Ok(IntRelation::Sim),
            "ll" => Ok(IntRelation::Ll),
            other => Err(Error::invalid(format!("unknown relation `{other}`"))),
        }
    }
}

pub fn int_relation_with(prover: &mut G3Prover, kind: IntRelation, a: &Formula, b: &Formula) -> Result<bool> {
    match kind {
        IntRelation::Preceq => prover.provable(&Formula::imp(a.clone(), b.clone())),
        IntRelation::Sim => Ok(prover.provable(&Formula::imp(a.clone(), b.clone()))?
            && prover.provable(&Formula::imp(b.clone(), a.clone()))?),
        IntRelation::Ll => prover.provable(&Formula::imp(Formula::imp(b.clone(), a.clone()), b.clone())),
    }
}

pub fn int_relation(kind: IntRelation, a: &Formula, b: &Formula, caps: &Caps) -> Result<bool> {
    int_relation_with(&mut G3Prover::new(caps), kind, a, b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RnIndex {
    Finite(usize),
    Omega,
}

impl fmt::Display for RnIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RnIndex::Finite(n) => write!(f, "{n}"),
            RnIndex::Omega => f.write_str("omega"),
        }
    }
}

impl std::str::FromStr for RnIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega" | "ω" | "w" => Ok(RnIndex::Omega),
            n => n
                .parse()
                .map(RnIndex::Finite)
                .map_err(|_| Error::invalid(format!("`{n}` is neither a natural number nor omega"))),
        }
    }
}

/// Default largest power index `rn_power` builds.
pub const RN_BOUND: usize = 64;

/// The one-variable ladder over `p1`: `p^0 = p∧¬p`, `p^1 = ¬p`, `p^2 = p`, `p^ω = p→p`,
/// `p^{2n+3} = p^{2n+1}→p^{2n}`, `p^{2n+4} = p^{2n+1}∨p^{2n+2}`.
pub fn rn_power(index: RnIndex, bound: usize) -> Result<Formula> {
    let p = Formula::var(1);
    let n = match index {
        RnIndex::Omega => return Ok(Formula::imp(p.clone(), p)),
        RnIndex::Finite(n) => n,
    };
    if n > bound {
        return Err(Error::invalid(format!("power {n} exceeds the bound {bound}")));
    }
    let mut pw: Vec<Formula> = vec![
        Formula::and(p.clone(), Formula::not(p.clone())),
        Formula::not(p.clone()),
        p,
    ];
    for k in 3..=n {
        let f = if k % 2 == 1 {
            Formula::imp(pw[k - 2].clone(), pw[k - 3].clone())
        } else {
            Formula::or(pw[k - 3].clone(), pw[k - 2].clone())
        };
        pw.push(f);
    }
    Ok(pw.swap_remove(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RnClass {
    Index(RnIndex),
    ExceedsBound,
}

/// The ladder position of a formula in `p1`: `ω` if provable, else the least `n ≤ bound`
/// with `f ∼ p^n`.
pub fn rn_classify(f: &Formula, bound: usize, caps: &Caps) -> Result<RnClass> {
    if f.variables().iter().any(|&v| v != 1) {
        return Err(Error::invalid("rn_classify expects a formula in p1 only"));
    }
    let mut prover = G3Prover::new(caps);
    if prover.provable(f)? {
        return Ok(RnClass::Index(RnIndex::Omega));
    }
    for n in 0..=bound {
        let pn = rn_power(RnIndex::Finite(n), bound)?;
        if int_relation_with(&mut prover, IntRelation::Sim, f, &pn)? {
            return Ok(RnClass::Index(RnIndex::Finite(n)));
        }
    }
    Ok(RnClass::ExceedsBound)
}

/// `(f is a classical tautology, ¬¬f is provable in Int)`.
pub fn glivenko_check(f: &Formula, caps: &Caps) -> Result<(bool, bool)> {
    let b2 = make_preset("B2")?;
    Signature::boolean().check(f)?;
    let classical = is_valid_with_caps(&b2, f, caps)?.holds();
    let dn = Formula::not(Formula::not(f.clone()));
    let int = g3_decide(&Sequent::theorem(dn), caps)?.is_proved();
    Ok((classical, int))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_formula;

    fn f(text: &str) -> Formula {
        parse_formula(text, &Signature::boolean()).unwrap()
    }

    fn proves(text: &str) -> bool {
        g3_decide(&Sequent::theorem(f(text)), &Caps::default())
            .unwrap()
            .is_proved()
    }

    #[test]
    fn basic_decisions() {
        assert!(proves("p1 -> p1"));
        assert!(!proves("p1 | ~p1"));
        assert!(proves("~~(p1 | ~p1)"));
        assert!(!proves("((p1 -> p2) -> p1) -> p1"));
        assert!(!proves("~~p1 -> p1"));
        assert!(proves("p1 -> ~~p1"));
        assert!(proves("~~~p1 -> ~p1"));
        assert!(proves("(p1 -> p2) -> (p2 -> p3) -> p1 -> p3"));
        assert!(proves("p1 & p2 -> p2 & p1"));
        assert!(proves("p1 | p2 -> p2 | p1"));
    }

    #[test]
    fn proofs_check_and_export() {
        let s = Sequent::theorem(f("(p1 -> p2) -> (p1 -> p2 -> p3) -> p1 -> p3"));
        let ProveOutcome::Proved(t) = g3_decide(&s, &Caps::default()).unwrap() else {
            panic!("expected a proof")
        };
        assert!(check_proof(&t).is_ok());
        assert_eq!(t.rule, Rule::ImpRight);
        assert!(t.to_text().contains("→-2"));
        assert_eq!(t.to_json()["rule"], "→-1");
        let mut bad = t.clone();
        bad.rule = Rule::AndRight;
        assert!(check_proof(&bad).is_err());
    }

    #[test]
    fn sequent_syntax() {
        let s = Sequent::parse("p1, p1 -> p2 => p2").unwrap();
        assert_eq!(s.antecedent.len(), 2);
        assert_eq!(s.to_string(), "p1, p1 -> p2 => p2");
        let e = Sequent::parse("p1, ~p1 =>").unwrap();
        assert_eq!(e.succedent, None);
        assert!(g3_decide(&e, &Caps::default()).unwrap().is_proved());
        assert_eq!(Sequent::parse("=> p1").unwrap().to_string(), "=> p1");
        assert!(Sequent::parse("p1 p2 => p1").is_err());
    }

    #[test]
    fn rejects_foreign_symbols() {
        let s = Sequent::theorem(Formula::constant("top"));
        assert!(g3_decide(&s, &Caps::default()).is_err());
    }

    #[test]
    fn memo_cap() {
        let caps = Caps {
            memo_limit: 2,
            ..Caps::default()
        };
        let s = Sequent::theorem(f("((p1 -> p2) -> p1) -> p1"));
        assert!(g3_decide(&s, &caps).unwrap_err().is_cap());
    }

    #[test]
    fn powers() {
        let b = RN_BOUND;
        assert_eq!(rn_power(RnIndex::Finite(3), b).unwrap().to_string(), "~p1 -> p1 & ~p1");
        assert_eq!(rn_power(RnIndex::Finite(4), b).unwrap().to_string(), "~p1 | p1");
        assert_eq!(rn_power(RnIndex::Omega, b).unwrap().to_string(), "p1 -> p1");
        assert!(rn_power(RnIndex::Finite(5), 4).is_err());
    }

    #[test]
    fn classification() {
        let caps = Caps::default();
        let c = |t: &str| rn_classify(&f(t), 16, &caps).unwrap();
        assert_eq!(c("~~~p1"), RnClass::Index(RnIndex::Finite(1)));
        assert_eq!(c("~~p1"), RnClass::Index(RnIndex::Finite(3)));
        assert_eq!(c("p1 | ~p1"), RnClass::Index(RnIndex::Finite(4)));
        assert_eq!(c("p1 -> p1"), RnClass::Index(RnIndex::Omega));
        assert_eq!(c("p1 & p1"), RnClass::Index(RnIndex::Finite(2)));
    }

    #[test]
    fn glivenko_examples() {
        let caps = Caps::default();
        assert_eq!(
            glivenko_check(&f("((p1 -> p2) -> p1) -> p1"), &caps).unwrap(),
            (true, true)
        );
        assert_eq!(glivenko_check(&f("p1 & ~p1"), &caps).unwrap(), (false, false));
        assert_eq!(glivenko_check(&f("p1 | ~p1"), &caps).unwrap(), (true, true));
    }

    #[test]
    fn relations() {
        let caps = Caps::default();
        assert!(int_relation(IntRelation::Sim, &f("p1 & p1"), &f("p1"), &caps).unwrap());
        let p0 = rn_power(RnIndex::Finite(0), RN_BOUND).unwrap();
        let p4 = rn_power(RnIndex::Finite(4), RN_BOUND).unwrap();
        assert!(int_relation(IntRelation::Ll, &p0, &p4, &caps).unwrap());
        assert!(int_relation(IntRelation::Preceq, &p0, &p4, &caps).unwrap());
        assert!(!int_relation(IntRelation::Preceq, &p4, &p0, &caps).unwrap());
    }
}
