//! Signatures, formulas, the text syntax, substitution and depth-ordered enumeration.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

pub type Sym = Arc<str>;

pub const NOT: &str = "~";
pub const AND: &str = "&";
pub const OR: &str = "|";
pub const IMP: &str = "->";
pub const IFF: &str = "<->";

/// Maps the unicode spellings accepted on input to the canonical names.
pub fn canonical_name(name: &str) -> &str {
    match name {
        "¬" => NOT,
        "∧" => AND,
        "∨" => OR,
        "→" => IMP,
        "↔" => IFF,
        "⊤" => "top",
        "⊥" => "bot",
        "□" => "box",
        "◇" => "dia",
        other => other,
    }
}

fn infix_arity(name: &str) -> Option<usize> {
    match name {
        NOT => Some(1),
        AND | OR | IMP | IFF => Some(2),
        _ => None,
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric()
        || c == '_'
        || c == '\''
        || c == '.'
        || (!c.is_ascii() && !is_special_char(c) && !c.is_whitespace())
}

fn is_special_char(c: char) -> bool {
    matches!(c, '¬' | '∧' | '∨' | '→' | '↔' | '⊤' | '⊥' | '□' | '◇')
}

fn variable_index(name: &str) -> Option<u32> {
    let digits = name.strip_prefix('p')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    connectives: BTreeMap<Sym, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, usize)>,
    {
        let mut sig = Signature::new();
        for (name, arity) in pairs {
            sig.add(name, arity)?;
        }
        Ok(sig)
    }

    /// `{~, &, |, ->}`.
    pub fn boolean() -> Self {
        Self::from_pairs([(NOT, 1), (AND, 2), (OR, 2), (IMP, 2)]).unwrap()
    }

    /// `{~, &, |, ->, top, bot}`.
    pub fn boolean_with_constants() -> Self {
        Self::from_pairs([(NOT, 1), (AND, 2), (OR, 2), (IMP, 2), ("top", 0), ("bot", 0)]).unwrap()
    }

    pub fn add(&mut self, name: &str, arity: usize) -> Result<()> {
        let name = canonical_name(name);
        if name.is_empty() {
            return Err(Error::InvalidSignature("empty connective name".into()));
        }
        if variable_index(name).is_some() {
            return Err(Error::InvalidSignature(format!(
                "`{name}` collides with the variable namespace"
            )));
        }
        match infix_arity(name) {
            Some(expected) if expected != arity => {
                return Err(Error::InvalidSignature(format!("`{name}` must have arity {expected}")))
            }
            Some(_) => {}
            None => {
                if !name.chars().all(is_name_char) {
                    return Err(Error::InvalidSignature(format!("`{name}` is not a valid name")));
                }
            }
        }
        if self.connectives.contains_key(name) {
            return Err(Error::InvalidSignature(format!("duplicate connective `{name}`")));
        }
        self.connectives.insert(Sym::from(name), arity);
        Ok(())
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.connectives.get(canonical_name(name)).copied()
    }

    pub fn symbol(&self, name: &str) -> Option<Sym> {
        self.connectives
            .get_key_value(canonical_name(name))
            .map(|(k, _)| k.clone())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.arity(name).is_some()
    }

    pub fn len(&self) -> usize {
        self.connectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.connectives.is_empty()
    }

    /// All connectives in name order.
    pub fn iter(&self) -> impl Iterator<Item = (&Sym, usize)> {
        self.connectives.iter().map(|(k, &v)| (k, v))
    }

    /// Arity-0 connectives in name order.
    pub fn constants(&self) -> impl Iterator<Item = &Sym> {
        self.iter().filter(|(_, a)| *a == 0).map(|(k, _)| k)
    }

    /// Connectives of positive arity in name order.
    pub fn operations(&self) -> impl Iterator<Item = (&Sym, usize)> {
        self.iter().filter(|(_, a)| *a > 0)
    }

    pub fn has_constants(&self) -> bool {
        self.constants().next().is_some()
    }

    pub fn restrict(&self, names: &[&str]) -> Result<Signature> {
        let mut sig = Signature::new();
        for name in names {
            let arity = self
                .arity(name)
                .ok_or_else(|| Error::SignatureMismatch(format!("`{name}` is not in the signature")))?;
            sig.add(name, arity)?;
        }
        Ok(sig)
    }

    /// Checks that every symbol of `f` is declared with the arity it is used at.
    pub fn check(&self, f: &Formula) -> Result<()> {
        match f.node() {
            Node::Var(_) => Ok(()),
            Node::Const(c) => match self.arity(c) {
                Some(0) => Ok(()),
                Some(a) => Err(Error::SignatureMismatch(format!(
                    "`{c}` has arity {a} but is used as a constant"
                ))),
                None => Err(Error::SignatureMismatch(format!("unknown constant `{c}`"))),
            },
            Node::Apply(op, args) => {
                match self.arity(op) {
                    Some(a) if a == args.len() => {}
                    Some(a) => {
                        return Err(Error::SignatureMismatch(format!(
                            "`{op}` has arity {a} but is applied to {} arguments",
                            args.len()
                        )))
                    }
                    None => return Err(Error::SignatureMismatch(format!("unknown connective `{op}`"))),
                }
                args.iter().try_for_each(|a| self.check(a))
            }
        }
    }
}

#[derive(Clone, PartialOrd, Ord)]
pub struct Formula(Arc<Node>);

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Var(u32),
    Const(Sym),
    Apply(Sym, Vec<Formula>),
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Formula {}

impl std::hash::Hash for Formula {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl Formula {
    pub fn var(index: u32) -> Formula {
        assert!(index >= 1, "variables are numbered from 1");
        Formula(Arc::new(Node::Var(index)))
    }

    pub fn constant(name: &str) -> Formula {
        Formula(Arc::new(Node::Const(Sym::from(canonical_name(name)))))
    }

    pub fn apply(op: &str, args: Vec<Formula>) -> Formula {
        Formula(Arc::new(Node::Apply(Sym::from(canonical_name(op)), args)))
    }

    pub fn apply_sym(op: Sym, args: Vec<Formula>) -> Formula {
        Formula(Arc::new(Node::Apply(op, args)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::apply(NOT, vec![a])
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::apply(AND, vec![a, b])
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::apply(OR, vec![a, b])
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::apply(IMP, vec![a, b])
    }

    /// The abbreviation `(a -> b) & (b -> a)`.
    pub fn equiv(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn as_var(&self) -> Option<u32> {
        match *self.0 {
            Node::Var(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_apply(&self) -> Option<(&str, &[Formula])> {
        match &*self.0 {
            Node::Apply(op, args) => Some((op, args)),
            _ => None,
        }
    }

    /// Matches a binary application of `op`.
    pub fn as_binary(&self, op: &str) -> Option<(&Formula, &Formula)> {
        match self.as_apply() {
            Some((o, [a, b])) if o == op => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_unary(&self, op: &str) -> Option<&Formula> {
        match self.as_apply() {
            Some((o, [a])) if o == op => Some(a),
            _ => None,
        }
    }

    pub fn is_atom(&self) -> bool {
        !matches!(*self.0, Node::Apply(..))
    }

    pub fn ptr_eq(&self, other: &Formula) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn depth(&self) -> usize {
        match &*self.0 {
            Node::Apply(_, args) => 1 + args.iter().map(Formula::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match &*self.0 {
            Node::Apply(_, args) => 1 + args.iter().map(Formula::size).sum::<usize>(),
            _ => 1,
        }
    }

    pub fn variables(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<u32>) {
        match &*self.0 {
            Node::Var(i) => {
                out.insert(*i);
            }
            Node::Const(_) => {}
            Node::Apply(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Largest variable index occurring, 0 for closed formulas.
    pub fn max_var(&self) -> u32 {
        match &*self.0 {
            Node::Var(i) => *i,
            Node::Const(_) => 0,
            Node::Apply(_, args) => args.iter().map(Formula::max_var).max().unwrap_or(0),
        }
    }

    /// Distinct subformulas, children before parents.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.collect_subformulas(&mut seen, &mut out);
        out
    }

    fn collect_subformulas(&self, seen: &mut BTreeSet<Formula>, out: &mut Vec<Formula>) {
        if seen.contains(self) {
            return;
        }
        if let Node::Apply(_, args) = &*self.0 {
            for a in args {
                a.collect_subformulas(seen, out);
            }
        }
        seen.insert(self.clone());
        out.push(self.clone());
    }

    pub fn substitute(&self, s: &Substitution) -> Formula {
        match &*self.0 {
            Node::Var(i) => s.bindings.get(i).cloned().unwrap_or_else(|| self.clone()),
            Node::Const(_) => self.clone(),
            Node::Apply(op, args) => {
                let new: Vec<Formula> = args.iter().map(|a| a.substitute(s)).collect();
                if new.iter().zip(args).all(|(n, o)| n.ptr_eq(o)) {
                    self.clone()
                } else {
                    Formula::apply_sym(op.clone(), new)
                }
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Assoc {
    Left,
    Right,
    None,
}

const PREFIX_PREC: u8 = 5;
const ATOM_PREC: u8 = 6;

fn infix_prec(op: &str) -> Option<(u8, Assoc)> {
    match op {
        IFF => Some((1, Assoc::None)),
        IMP => Some((2, Assoc::Right)),
        OR => Some((3, Assoc::Left)),
        AND => Some((4, Assoc::Left)),
        _ => None,
    }
}

fn node_prec(f: &Formula) -> u8 {
    match f.as_apply() {
        Some((op, [_, _])) => infix_prec(op).map_or(ATOM_PREC, |p| p.0),
        Some((NOT, [_])) => PREFIX_PREC,
        _ => ATOM_PREC,
    }
}

/// Canonical text form; `parse_formula` inverts it.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

fn write_formula(f: &Formula, out: &mut String) {
    match f.node() {
        Node::Var(i) => {
            out.push('p');
            out.push_str(&i.to_string());
        }
        Node::Const(c) => out.push_str(c),
        Node::Apply(op, args) => {
            if let (NOT, [a]) = (&**op, args.as_slice()) {
                out.push('~');
                write_operand(a, node_prec(a) < PREFIX_PREC, out);
                return;
            }
            if let (Some((prec, assoc)), [a, b]) = (infix_prec(op), args.as_slice()) {
                let pa = node_prec(a);
                let pb = node_prec(b);
                write_operand(a, pa < prec || (pa == prec && assoc != Assoc::Left), out);
                out.push(' ');
                out.push_str(op);
                out.push(' ');
                write_operand(b, pb < prec || (pb == prec && assoc != Assoc::Right), out);
                return;
            }
            out.push_str(op);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_formula(a, out);
            }
            out.push(')');
        }
    }
}

fn write_operand(f: &Formula, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        write_formula(f, out);
        out.push(')');
    } else {
        write_formula(f, out);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Token {
    LParen,
    RParen,
    Comma,
    Tilde,
    Infix(&'static str),
    Turnstile,
    Var(u32),
    Name(String),
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(Token, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let rest = |k: usize| chars.get(i + k).copied();
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Token::LParen,
            ')' => Token::RParen,
            ',' => Token::Comma,
            '~' | '¬' => Token::Tilde,
            '&' | '∧' => Token::Infix(AND),
            '|' | '∨' => Token::Infix(OR),
            '→' => Token::Infix(IMP),
            '↔' => Token::Infix(IFF),
            '-' if rest(1) == Some('>') => {
                i += 1;
                Token::Infix(IMP)
            }
            '<' if rest(1) == Some('-') && rest(2) == Some('>') => {
                i += 2;
                Token::Infix(IFF)
            }
            '=' if rest(1) == Some('>') => {
                i += 1;
                Token::Turnstile
            }
            '⊤' | '⊥' | '□' | '◇' => Token::Name(canonical_name(&c.to_string()).to_string()),
            c if is_name_char(c) => {
                let mut j = i;
                while j < chars.len() && is_name_char(chars[j]) {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                i = j - 1;
                if word.starts_with('p') && word.len() > 1 && word[1..].bytes().all(|b| b.is_ascii_digit()) {
                    match variable_index(&word) {
                        Some(0) | None => {
                            return Err(Error::Syntax {
                                position: start,
                                message: format!("`{word}` is not a valid variable (indices start at 1)"),
                            })
                        }
                        Some(v) => Token::Var(v),
                    }
                } else {
                    Token::Name(word)
                }
            }
            other => {
                return Err(Error::Syntax {
                    position: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

pub(crate) struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(text: &str, sig: &'a Signature) -> Result<Self> {
        let tokens = tokenize(text)?;
        Ok(Parser {
            tokens,
            pos: 0,
            end: text.chars().count(),
            sig,
        })
    }

    pub(crate) fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.0)
    }

    pub(crate) fn position(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.1)
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub(crate) fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    pub(crate) fn syntax<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            position: self.position(),
            message: message.into(),
        })
    }

    pub(crate) fn expect_end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.syntax("unexpected trailing input")
        }
    }

    pub(crate) fn formula(&mut self) -> Result<Formula> {
        self.expr(0)
    }

    fn expr(&mut self, min_prec: u8) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while let Some((Token::Infix(op), p)) = self.tokens.get(self.pos) {
            let (op, position) = (*op, *p);
            let (prec, assoc) = infix_prec(op).expect("infix token");
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.expr(if assoc == Assoc::Right { prec } else { prec + 1 })?;
            lhs = self.build_infix(op, position, lhs, rhs)?;
        }
        Ok(lhs)
    }

    fn build_infix(&self, op: &'static str, position: usize, a: Formula, b: Formula) -> Result<Formula> {
        if let Some(sym) = self.sig.symbol(op) {
            return Ok(Formula::apply_sym(sym, vec![a, b]));
        }
        if op == IFF && self.sig.contains(IMP) && self.sig.contains(AND) {
            return Ok(Formula::equiv(a, b));
        }
        Err(Error::UnknownName {
            name: op.to_string(),
            position,
        })
    }

    fn unary(&mut self) -> Result<Formula> {
        let position = self.position();
        match self.bump() {
            Some(Token::Tilde) => {
                let sym = self.sig.symbol(NOT).ok_or_else(|| Error::UnknownName {
                    name: NOT.into(),
                    position,
                })?;
                let a = self.unary()?;
                Ok(Formula::apply_sym(sym, vec![a]))
            }
            Some(Token::LParen) => {
                let f = self.expr(0)?;
                match self.bump() {
                    Some(Token::RParen) => Ok(f),
                    _ => {
                        self.pos -= 1;
                        self.syntax("expected `)`")
                    }
                }
            }
            Some(Token::Var(i)) => Ok(Formula::var(i)),
            Some(Token::Name(name)) => {
                let sym = self.sig.symbol(&name).ok_or_else(|| Error::UnknownName {
                    name: name.clone(),
                    position,
                })?;
                let expected = self.sig.arity(&name).unwrap_or(0);
                if self.peek() == Some(&Token::LParen) {
                    self.pos += 1;
                    let mut args = vec![self.expr(0)?];
                    loop {
                        match self.bump() {
                            Some(Token::Comma) => args.push(self.expr(0)?),
                            Some(Token::RParen) => break,
                            _ => {
                                self.pos -= 1;
                                return self.syntax("expected `,` or `)`");
                            }
                        }
                    }
                    if args.len() != expected {
                        return Err(Error::ArityMismatch {
                            name,
                            position,
                            expected,
                            found: args.len(),
                        });
                    }
                    Ok(Formula::apply_sym(sym, args))
                } else if expected == 0 {
                    Ok(Formula(Arc::new(Node::Const(sym))))
                } else {
                    Err(Error::ArityMismatch {
                        name,
                        position,
                        expected,
                        found: 0,
                    })
                }
            }
            Some(_) => {
                self.pos -= 1;
                self.syntax("expected a formula")
            }
            None => self.syntax("unexpected end of input"),
        }
    }
}

/// Parses `text` against `sig`. `<->` binds to a declared `<->` connective, otherwise it
/// abbreviates `(a -> b) & (b -> a)`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula> {
    let mut p = Parser::new(text, sig)?;
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<u32, Formula>,
}

impl Substitution {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_bindings<I: IntoIterator<Item = (u32, Formula)>>(bindings: I) -> Self {
        let mut s = Self::default();
        for (v, f) in bindings {
            s.bind(v, f);
        }
        s
    }

    pub fn bind(&mut self, var: u32, f: Formula) {
        if f.as_var() == Some(var) {
            self.bindings.remove(&var);
        } else {
            self.bindings.insert(var, f);
        }
    }

    pub fn get(&self, var: u32) -> Option<&Formula> {
        self.bindings.get(&var)
    }

    pub fn bindings(&self) -> impl Iterator<Item = (u32, &Formula)> {
        self.bindings.iter().map(|(&v, f)| (v, f))
    }

    pub fn is_identity(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn apply(&self, f: &Formula) -> Formula {
        f.substitute(self)
    }

    /// `self ∘ inner`: apply `inner` first, then `self`.
    pub fn compose(&self, inner: &Substitution) -> Substitution {
        let mut out = Substitution::identity();
        for (&v, f) in &self.bindings {
            if !inner.bindings.contains_key(&v) {
                out.bind(v, f.clone());
            }
        }
        for (&v, f) in &inner.bindings {
            out.bind(v, f.substitute(self));
        }
        out
    }
}

pub fn substitute(f: &Formula, s: &Substitution) -> Formula {
    f.substitute(s)
}

pub fn depth(f: &Formula) -> usize {
    f.depth()
}

/// Depth-stratified stream over `Fm^(n)`: depth 0 lists `p1..pn` and then the constants;
/// stratum `d` lists, per connective in name order, the argument tuples drawn from the
/// strata below `d` in lexicographic rank order with at least one argument of depth `d-1`.
pub struct FormulaStream {
    ops: Vec<(Sym, usize)>,
    depth_bound: usize,
    max_count: usize,
    all: Vec<Formula>,
    stratum_start: usize,
    next_depth: usize,
    cursor: usize,
    emitted: usize,
    failed: bool,
}

impl FormulaStream {
    pub fn new(sig: &Signature, n_vars: usize, depth_bound: usize, max_count: usize) -> Result<Self> {
        if n_vars == 0 && !sig.has_constants() {
            return Err(Error::invalid("enumeration needs at least one variable or a constant"));
        }
        let mut all: Vec<Formula> = (1..=n_vars as u32).map(Formula::var).collect();
        all.extend(sig.constants().map(|c| Formula(Arc::new(Node::Const(c.clone())))));
        Ok(FormulaStream {
            ops: sig.operations().map(|(s, a)| (s.clone(), a)).collect(),
            depth_bound,
            max_count,
            all,
            stratum_start: 0,
            next_depth: 1,
            cursor: 0,
            emitted: 0,
            failed: false,
        })
    }

    fn extend(&mut self) -> Result<bool> {
        if self.next_depth > self.depth_bound {
            return Ok(false);
        }
        let prev = self.all.len();
        let frontier = self.stratum_start;
        let mut fresh = Vec::new();
        for (op, arity) in &self.ops {
            let mut idx = vec![0usize; *arity];
            loop {
                if idx.iter().any(|&i| i >= frontier) {
                    if self.all.len() + fresh.len() >= self.max_count {
                        return Err(Error::cap(format!(
                            "formula enumeration exceeded {} formulas",
                            self.max_count
                        )));
                    }
                    let args = idx.iter().map(|&i| self.all[i].clone()).collect();
                    fresh.push(Formula::apply_sym(op.clone(), args));
                }
                if !advance(&mut idx, prev) {
                    break;
                }
            }
        }
        self.stratum_start = prev;
        self.next_depth += 1;
        let grew = !fresh.is_empty();
        self.all.extend(fresh);
        Ok(grew)
    }
}

/// Odometer increment over `[0, base)^k`, last position fastest. Returns false after the last tuple.
pub(crate) fn advance(idx: &mut [usize], base: usize) -> bool {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

impl Iterator for FormulaStream {
    type Item = Result<Formula>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        while self.cursor >= self.all.len() {
            match self.extend() {
                Ok(true) => {}
                Ok(false) => return None,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
        if self.emitted >= self.max_count {
            self.failed = true;
            return Some(Err(Error::cap(format!(
                "formula enumeration exceeded {} formulas",
                self.max_count
            ))));
        }
        let f = self.all[self.cursor].clone();
        self.cursor += 1;
        self.emitted += 1;
        Some(Ok(f))
    }
}

pub fn enumerate_formulas(
    sig: &Signature,
    n_vars: usize,
    depth_bound: usize,
    max_count: usize,
) -> Result<Vec<Formula>> {
    FormulaStream::new(sig, n_vars, depth_bound, max_count)?.collect()
}

/// A random formula of depth at most `max_depth` over `p1..pn` and the signature.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, sig: &Signature, n_vars: u32, max_depth: usize) -> Formula {
    let constants: Vec<Sym> = sig.constants().cloned().collect();
    let ops: Vec<(Sym, usize)> = sig.operations().map(|(s, a)| (s.clone(), a)).collect();
    let atoms = n_vars as usize + constants.len();
    assert!(atoms > 0, "no atoms to build formulas from");
    if max_depth == 0 || ops.is_empty() || rng.random_range(0..4) == 0 {
        let k = rng.random_range(0..atoms);
        return if k < n_vars as usize {
            Formula::var(k as u32 + 1)
        } else {
            Formula(Arc::new(Node::Const(constants[k - n_vars as usize].clone())))
        };
    }
    let (op, arity) = &ops[rng.random_range(0..ops.len())];
    let args = (0..*arity)
        .map(|_| random_formula(rng, sig, n_vars, max_depth - 1))
        .collect();
    Formula::apply_sym(op.clone(), args)
}
