//! Finite algebras: tables, evaluation, products, subalgebras, congruences, isomorphisms
//! and breadth-first clone generation.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lang::{Formula, Node, Signature, Sym};
use crate::{checked_pow, Caps};

/// Argument indices, value table and hash of a candidate term function.
type Candidate = (Vec<usize>, Vec<u16>, u64);

/// Values of variables, keyed by variable index.
pub type Assignment = BTreeMap<u32, usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    arity: usize,
    table: Vec<usize>,
}

impl Operation {
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Entries indexed by argument tuples in lexicographic order, first argument most significant.
    pub fn table(&self) -> &[usize] {
        &self.table
    }

    fn apply(&self, k: usize, args: &[usize]) -> usize {
        let mut idx = 0;
        for &a in args {
            idx = idx * k + a;
        }
        self.table[idx]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    signature: Signature,
    elements: Vec<String>,
    ops: BTreeMap<Sym, Operation>,
}

/// Digits of `index` in base `k`, most significant first.
pub(crate) fn decode_tuple(mut index: usize, k: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = index % k;
        index /= k;
    }
}

impl FiniteAlgebra {
    /// Builds an algebra from explicit tables (see [`Operation::table`] for the layout).
    pub fn new(signature: Signature, elements: Vec<String>, tables: BTreeMap<String, Vec<usize>>) -> Result<Self> {
        let k = elements.len();
        if k == 0 {
            return Err(Error::invalid("an algebra needs at least one element"));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &elements {
            if !seen.insert(e.as_str()) {
                return Err(Error::invalid(format!("duplicate element name `{e}`")));
            }
        }
        let mut ops = BTreeMap::new();
        for (name, table) in tables {
            let sym = signature
                .symbol(&name)
                .ok_or_else(|| Error::SignatureMismatch(format!("table for undeclared connective `{name}`")))?;
            let arity = signature.arity(&name).unwrap();
            let expected = k
                .checked_pow(arity as u32)
                .ok_or_else(|| Error::invalid("table too large"))?;
            if table.len() != expected {
                return Err(Error::invalid(format!(
                    "table of `{name}` has {} entries, expected {expected}",
                    table.len()
                )));
            }
            if let Some(bad) = table.iter().find(|&&v| v >= k) {
                return Err(Error::invalid(format!(
                    "table of `{name}` contains out-of-range entry {bad}"
                )));
            }
            ops.insert(sym, Operation { arity, table });
        }
        for (name, _) in signature.iter() {
            if !ops.contains_key(name) {
                return Err(Error::invalid(format!("missing table for `{name}`")));
            }
        }
        Ok(FiniteAlgebra {
            signature,
            elements,
            ops,
        })
    }

    /// Builds an algebra by tabulating `f(connective, arguments)`.
    pub fn from_fn<F>(signature: Signature, elements: Vec<String>, f: F) -> Result<Self>
    where
        F: Fn(&str, &[usize]) -> usize,
    {
        let k = elements.len();
        let mut tables = BTreeMap::new();
        for (name, arity) in signature.iter() {
            let count = k.pow(arity as u32);
            let mut args = vec![0; arity];
            let table = (0..count)
                .map(|i| {
                    decode_tuple(i, k, &mut args);
                    f(name, &args)
                })
                .collect();
            tables.insert(name.to_string(), table);
        }
        FiniteAlgebra::new(signature, elements, tables)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn element_name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn operation(&self, name: &str) -> Option<&Operation> {
        self.ops.get(crate::lang::canonical_name(name))
    }

    pub fn operations(&self) -> impl Iterator<Item = (&Sym, &Operation)> {
        self.ops.iter()
    }

    /// Value of connective `name` at `args`.
    pub fn apply(&self, name: &str, args: &[usize]) -> usize {
        let op = self.operation(name).unwrap_or_else(|| panic!("no operation `{name}`"));
        op.apply(self.size(), args)
    }

    /// Value of constant `name`.
    pub fn constant(&self, name: &str) -> usize {
        self.apply(name, &[])
    }

    /// The reduct to the named connectives.
    pub fn reduct(&self, names: &[&str]) -> Result<FiniteAlgebra> {
        let signature = self.signature.restrict(names)?;
        let ops = signature
            .iter()
            .map(|(s, _)| (s.clone(), self.ops[s].clone()))
            .collect();
        Ok(FiniteAlgebra {
            signature,
            elements: self.elements.clone(),
            ops,
        })
    }

    /// Same tables under new element names.
    pub fn rename(&self, names: Vec<String>) -> Result<FiniteAlgebra> {
        if names.len() != self.size() {
            return Err(Error::invalid("wrong number of element names"));
        }
        let tables = self
            .ops
            .iter()
            .map(|(s, op)| (s.to_string(), op.table.clone()))
            .collect();
        FiniteAlgebra::new(self.signature.clone(), names, tables)
    }

    pub fn check_same_signature(&self, other: &FiniteAlgebra) -> Result<()> {
        if self.signature == other.signature {
            Ok(())
        } else {
            Err(Error::SignatureMismatch("algebras have different signatures".into()))
        }
    }

    pub fn evaluate(&self, f: &Formula, assignment: &Assignment) -> Result<usize> {
        match f.node() {
            Node::Var(i) => {
                let v = *assignment.get(i).ok_or(Error::UnassignedVariable(*i))?;
                if v >= self.size() {
                    return Err(Error::invalid(format!("value {v} of p{i} is not an element")));
                }
                Ok(v)
            }
            Node::Const(c) => match self.ops.get(c) {
                Some(op) if op.arity == 0 => Ok(op.table[0]),
                _ => Err(Error::SignatureMismatch(format!("unknown constant `{c}`"))),
            },
            Node::Apply(name, args) => {
                let op =
                    self.ops.get(name).filter(|op| op.arity == args.len()).ok_or_else(|| {
                        Error::SignatureMismatch(format!("no {}-ary connective `{name}`", args.len()))
                    })?;
                let vals = args
                    .iter()
                    .map(|a| self.evaluate(a, assignment))
                    .collect::<Result<Vec<_>>>()?;
                Ok(op.apply(self.size(), &vals))
            }
        }
    }

    /// Values of `f` at every tuple of `A^vars.len()`, where tuple position `j` assigns
    /// `vars[j]`; tuples in lexicographic order.
    pub fn term_table(&self, f: &Formula, vars: &[u32], caps: &Caps) -> Result<Vec<usize>> {
        self.signature.check(f)?;
        let k = self.size();
        let count = checked_pow(k, vars.len(), caps.max_tuples)
            .ok_or_else(|| Error::cap(format!("{k}^{} tuples exceed max_tuples", vars.len())))?;
        let mut memo = HashMap::new();
        let table = self.table_rec(f, vars, count, &mut memo)?;
        Ok(table.as_ref().clone())
    }

    fn table_rec(
        &self,
        f: &Formula,
        vars: &[u32],
        count: usize,
        memo: &mut HashMap<*const Node, Arc<Vec<usize>>>,
    ) -> Result<Arc<Vec<usize>>> {
        let key = f.node() as *const Node;
        if let Some(t) = memo.get(&key) {
            return Ok(t.clone());
        }
        let k = self.size();
        let table: Vec<usize> = match f.node() {
            Node::Var(i) => {
                let pos = vars.iter().position(|v| v == i).ok_or(Error::UnassignedVariable(*i))?;
                let stride = k.pow((vars.len() - 1 - pos) as u32);
                (0..count).map(|t| (t / stride) % k).collect()
            }
            Node::Const(c) => vec![self.ops[c].table[0]; count],
            Node::Apply(name, args) => {
                let op = &self.ops[name];
                let cols = args
                    .iter()
                    .map(|a| self.table_rec(a, vars, count, memo))
                    .collect::<Result<Vec<_>>>()?;
                let mut vals = vec![0; cols.len()];
                (0..count)
                    .map(|t| {
                        for (v, c) in vals.iter_mut().zip(&cols) {
                            *v = c[t];
                        }
                        op.apply(k, &vals)
                    })
                    .collect()
            }
        };
        let table = Arc::new(table);
        memo.insert(key, table.clone());
        Ok(table)
    }
}

pub fn evaluate_term(alg: &FiniteAlgebra, f: &Formula, assignment: &Assignment) -> Result<usize> {
    alg.evaluate(f, assignment)
}

/// The direct product of `factors`; carrier tuples in lexicographic order.
pub fn direct_product_many(factors: &[&FiniteAlgebra]) -> Result<FiniteAlgebra> {
    let first = factors.first().ok_or_else(|| Error::invalid("empty product"))?;
    for f in factors {
        first.check_same_signature(f)?;
    }
    let sizes: Vec<usize> = factors.iter().map(|f| f.size()).collect();
    let total = sizes
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .ok_or_else(|| Error::cap("product carrier too large"))?;
    let coords = |mut x: usize| {
        let mut c = vec![0; sizes.len()];
        for (slot, &s) in c.iter_mut().zip(&sizes).rev() {
            *slot = x % s;
            x /= s;
        }
        c
    };
    let elements = (0..total)
        .map(|x| {
            let names: Vec<&str> = coords(x).iter().zip(factors).map(|(&c, f)| f.element_name(c)).collect();
            format!("({})", names.join(","))
        })
        .collect();
    let combine = |parts: &[usize]| parts.iter().zip(&sizes).fold(0, |acc, (&p, &s)| acc * s + p);
    FiniteAlgebra::from_fn(first.signature.clone(), elements, |name, args| {
        let split: Vec<Vec<usize>> = args.iter().map(|&a| coords(a)).collect();
        let parts: Vec<usize> = factors
            .iter()
            .enumerate()
            .map(|(j, f)| {
                let comp: Vec<usize> = split.iter().map(|c| c[j]).collect();
                f.apply(name, &comp)
            })
            .collect();
        combine(&parts)
    })
}

pub fn direct_product(a1: &FiniteAlgebra, a2: &FiniteAlgebra) -> Result<FiniteAlgebra> {
    direct_product_many(&[a1, a2])
}

#[derive(Clone, Debug)]
pub struct Subalgebra {
    pub algebra: FiniteAlgebra,
    /// Parent index of each subalgebra element, ascending.
    pub embedding: Vec<usize>,
    /// For each element, a term over `p1..ps` evaluating to it when `pi` is the i-th seed
    /// element in ascending order.
    pub witnesses: Vec<Formula>,
}

/// The least subuniverse containing `seed` and the constants, with generating terms.
pub fn generated_subalgebra(alg: &FiniteAlgebra, seed: &[usize]) -> Result<Subalgebra> {
    let k = alg.size();
    let mut seed: Vec<usize> = seed.to_vec();
    seed.sort_unstable();
    seed.dedup();
    if let Some(&bad) = seed.iter().find(|&&s| s >= k) {
        return Err(Error::invalid(format!("seed element {bad} is out of range")));
    }
    if seed.is_empty() && !alg.signature.has_constants() {
        return Err(Error::invalid("empty seed over a constant-free signature"));
    }
    let mut found: Vec<(usize, Formula)> = Vec::new();
    let mut have = vec![false; k];
    for (i, &s) in seed.iter().enumerate() {
        have[s] = true;
        found.push((s, Formula::var(i as u32 + 1)));
    }
    for c in alg.signature.constants() {
        let v = alg.constant(c);
        if !have[v] {
            have[v] = true;
            found.push((v, Formula::constant(c)));
        }
    }
    let mut frontier = 0;
    loop {
        let prev = found.len();
        for (name, arity) in alg.signature.operations() {
            let mut idx = vec![0usize; arity];
            loop {
                if idx.iter().any(|&i| i >= frontier) {
                    let args: Vec<usize> = idx.iter().map(|&i| found[i].0).collect();
                    let v = alg.apply(name, &args);
                    if !have[v] {
                        have[v] = true;
                        let terms = idx.iter().map(|&i| found[i].1.clone()).collect();
                        found.push((v, Formula::apply_sym(name.clone(), terms)));
                    }
                }
                if !crate::lang::advance(&mut idx, prev) {
                    break;
                }
            }
        }
        if found.len() == prev {
            break;
        }
        frontier = prev;
    }
    found.sort_by_key(|(v, _)| *v);
    let embedding: Vec<usize> = found.iter().map(|(v, _)| *v).collect();
    let witnesses = found.into_iter().map(|(_, w)| w).collect();
    let mut back = vec![usize::MAX; k];
    for (i, &e) in embedding.iter().enumerate() {
        back[e] = i;
    }
    let names = embedding.iter().map(|&e| alg.elements[e].clone()).collect();
    let algebra = FiniteAlgebra::from_fn(alg.signature.clone(), names, |name, args| {
        let parent: Vec<usize> = args.iter().map(|&a| embedding[a]).collect();
        back[alg.apply(name, &parent)]
    })?;
    Ok(Subalgebra {
        algebra,
        embedding,
        witnesses,
    })
}

/// Smallest generating set, the lexicographically first among those of minimum size.
pub fn minimal_generating_set(alg: &FiniteAlgebra) -> Vec<usize> {
    let k = alg.size();
    for size in 0..=k {
        if size == 0 && !alg.signature.has_constants() {
            continue;
        }
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            if let Ok(sub) = generated_subalgebra(alg, &subset) {
                if sub.embedding.len() == k {
                    return subset;
                }
            }
            if !next_combination(&mut subset, k) {
                break;
            }
        }
    }
    (0..k).collect()
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let r = c.len();
    for i in (0..r).rev() {
        if c[i] < n - r + i {
            c[i] += 1;
            for j in i + 1..r {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// An `n`-ary term operation with the enumeration-first formula realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermFunction {
    pub arity: usize,
    /// Values at the tuples of `A^n` in lexicographic order.
    pub table: Vec<u16>,
    pub witness: Formula,
}

impl TermFunction {
    pub fn value(&self, tuple_index: usize) -> usize {
        self.table[tuple_index] as usize
    }
}

fn table_hash(t: &[u16]) -> u64 {
    let mut h = DefaultHasher::new();
    t.hash(&mut h);
    h.finish()
}

/// Breadth-first clone closure. Depth `d` applies each connective (name order) to argument
/// tuples (lexicographic in discovery rank) drawn from functions of depth below `d` with at
/// least one argument of depth `d-1`; the first formula to produce a table is its witness.
/// Discovery order therefore coincides with the formula enumeration order restricted to
/// the enumeration-first representatives.
pub(crate) struct CloneScan<'a> {
    alg: &'a FiniteAlgebra,
    n: usize,
    tuples: usize,
    caps: Caps,
    pub(crate) entries: Vec<TermFunction>,
    buckets: HashMap<u64, Vec<u32>>,
    /// Number of candidate tables computed.
    pub(crate) work: u64,
}

pub(crate) enum ScanEnd {
    Complete,
    Stopped,
}

const BLOCK: usize = 16;

impl<'a> CloneScan<'a> {
    pub(crate) fn new(alg: &'a FiniteAlgebra, n: usize, caps: &Caps) -> Result<Self> {
        let k = alg.size();
        if k > u16::MAX as usize + 1 {
            return Err(Error::invalid("clone generation supports at most 65536 elements"));
        }
        if n == 0 && !alg.signature.has_constants() {
            return Err(Error::invalid("n = 0 requires constants in the signature"));
        }
        let tuples = checked_pow(k, n, caps.max_tuples)
            .ok_or_else(|| Error::cap(format!("{k}^{n} tuples exceed max_tuples = {}", caps.max_tuples)))?;
        Ok(CloneScan {
            alg,
            n,
            tuples,
            caps: *caps,
            entries: Vec::new(),
            buckets: HashMap::new(),
            work: 0,
        })
    }

    fn lookup(&self, table: &[u16], hash: u64) -> bool {
        self.buckets
            .get(&hash)
            .is_some_and(|b| b.iter().any(|&i| self.entries[i as usize].table == table))
    }

    fn push(&mut self, table: Vec<u16>, witness: Formula, hash: u64) -> Result<bool> {
        if self.lookup(&table, hash) {
            return Ok(false);
        }
        if self.entries.len() >= self.caps.max_clone {
            return Err(Error::cap(format!(
                "clone exceeds max_clone = {} functions",
                self.caps.max_clone
            )));
        }
        self.buckets.entry(hash).or_default().push(self.entries.len() as u32);
        self.entries.push(TermFunction {
            arity: self.n,
            table,
            witness,
        });
        Ok(true)
    }

    /// Runs the closure, calling `visit` on each new function in discovery order; stops
    /// early when `visit` returns true.
    pub(crate) fn run(&mut self, visit: &mut dyn FnMut(&TermFunction) -> bool) -> Result<ScanEnd> {
        let k = self.alg.size();
        let t = self.tuples;
        let mut depth0: Vec<(Vec<u16>, Formula)> = Vec::new();
        for v in 0..self.n {
            let stride = k.pow((self.n - 1 - v) as u32);
            let table = (0..t).map(|i| ((i / stride) % k) as u16).collect();
            depth0.push((table, Formula::var(v as u32 + 1)));
        }
        for c in self.alg.signature.constants() {
            let val = self.alg.constant(c) as u16;
            depth0.push((vec![val; t], Formula::constant(c)));
        }
        for (table, w) in depth0 {
            let h = table_hash(&table);
            if self.push(table, w, h)? && visit(self.entries.last().unwrap()) {
                return Ok(ScanEnd::Stopped);
            }
        }
        let ops: Vec<(Sym, &Operation)> = self
            .alg
            .signature
            .operations()
            .map(|(s, _)| (s.clone(), &self.alg.ops[s]))
            .collect();
        let mut frontier = 0;
        loop {
            let prev = self.entries.len();
            for (name, op) in &ops {
                let arity = op.arity;
                let mut first = 0;
                while first < prev {
                    let block_end = (first + BLOCK).min(prev);
                    let entries = &self.entries;
                    let this = &*self;
                    let found: Vec<Vec<Candidate>> = (first..block_end)
                        .into_par_iter()
                        .map(|head| {
                            let mut out = Vec::new();
                            let mut rest = vec![0usize; arity - 1];
                            let mut args = vec![0usize; arity];
                            loop {
                                if head >= frontier || rest.iter().any(|&i| i >= frontier) {
                                    let mut table = Vec::with_capacity(t);
                                    for x in 0..t {
                                        args[0] = entries[head].table[x] as usize;
                                        for (a, &r) in args[1..].iter_mut().zip(&rest) {
                                            *a = entries[r].table[x] as usize;
                                        }
                                        table.push(op.apply(k, &args) as u16);
                                    }
                                    let h = table_hash(&table);
                                    if !this.lookup(&table, h) {
                                        let mut tuple = Vec::with_capacity(arity);
                                        tuple.push(head);
                                        tuple.extend_from_slice(&rest);
                                        out.push((tuple, table, h));
                                    }
                                }
                                if !crate::lang::advance(&mut rest, prev) {
                                    break;
                                }
                            }
                            out
                        })
                        .collect();
                    let block_count = (block_end - first) as u64;
                    let inner = (prev as u64).saturating_pow(arity as u32 - 1);
                    self.work = self.work.saturating_add(block_count.saturating_mul(inner));
                    for (tuple, table, h) in found.into_iter().flatten() {
                        let args = tuple.iter().map(|&i| self.entries[i].witness.clone()).collect();
                        let w = Formula::apply_sym(name.clone(), args);
                        if self.push(table, w, h)? && visit(self.entries.last().unwrap()) {
                            return Ok(ScanEnd::Stopped);
                        }
                    }
                    first = block_end;
                }
            }
            if self.entries.len() == prev {
                return Ok(ScanEnd::Complete);
            }
            frontier = prev;
        }
    }
}

/// All `n`-ary term operations of `alg`, ordered by table.
pub fn clone_functions(alg: &FiniteAlgebra, n: usize, caps: &Caps) -> Result<Vec<TermFunction>> {
    let mut scan = CloneScan::new(alg, n, caps)?;
    scan.run(&mut |_| false)?;
    let mut out = scan.entries;
    out.sort_by(|a, b| a.table.cmp(&b.table));
    Ok(out)
}

/// A partition of the carrier; block ids are numbered by first occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Congruence {
    block_of: Vec<usize>,
}

impl Congruence {
    pub fn identity(k: usize) -> Self {
        Congruence {
            block_of: (0..k).collect(),
        }
    }

    pub fn total(k: usize) -> Self {
        Congruence { block_of: vec![0; k] }
    }

    /// Normalizes arbitrary labels to first-occurrence numbering.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = HashMap::new();
        let block_of = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Congruence { block_of }
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn labels(&self) -> &[usize] {
        &self.block_of
    }

    pub fn block_count(&self) -> usize {
        self.block_of.iter().max().map_or(0, |m| m + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (x, &b) in self.block_of.iter().enumerate() {
            out[b].push(x);
        }
        out
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    pub fn is_identity(&self) -> bool {
        self.block_count() == self.block_of.len()
    }

    pub fn is_total(&self) -> bool {
        self.block_count() <= 1
    }

    /// True if `self ⊆ other` as relations.
    pub fn refines(&self, other: &Congruence) -> bool {
        let k = self.block_of.len();
        (0..k).all(|a| (0..k).all(|b| !self.related(a, b) || other.related(a, b)))
    }

    /// Exhaustive compatibility test against every operation of `alg`.
    pub fn is_compatible(&self, alg: &FiniteAlgebra) -> bool {
        let k = alg.size();
        for (_, op) in alg.operations() {
            let mut args = vec![0; op.arity];
            for t in 0..op.table.len() {
                decode_tuple(t, k, &mut args);
                let base = op.table[t];
                for j in 0..op.arity {
                    let orig = args[j];
                    for y in 0..k {
                        if y != orig && self.related(y, orig) {
                            args[j] = y;
                            if !self.related(op.apply(k, &args), base) {
                                return false;
                            }
                        }
                    }
                    args[j] = orig;
                }
            }
        }
        true
    }

    /// True if `set` is a union of blocks.
    pub fn saturates(&self, set: &[bool]) -> bool {
        let k = self.block_of.len();
        (0..k).all(|a| (0..k).all(|b| !self.related(a, b) || set[a] == set[b]))
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(k: usize) -> Self {
        UnionFind {
            parent: (0..k).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
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
}

/// The least congruence containing `pairs`.
pub fn congruence_generated(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Result<Congruence> {
    let k = alg.size();
    let mut uf = UnionFind::new(k);
    for &(a, b) in pairs {
        if a >= k || b >= k {
            return Err(Error::invalid(format!("pair ({a},{b}) is outside the carrier")));
        }
        uf.union(a, b);
    }
    loop {
        let mut changed = false;
        for (_, op) in alg.operations() {
            let mut args = vec![0; op.arity];
            for t in 0..op.table.len() {
                decode_tuple(t, k, &mut args);
                for j in 0..op.arity {
                    let orig = args[j];
                    let root = uf.find(orig);
                    if root != orig {
                        args[j] = root;
                        let other = op.apply(k, &args);
                        changed |= uf.union(op.table[t], other);
                        args[j] = orig;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let labels: Vec<usize> = (0..k).map(|x| uf.find(x)).collect();
    Ok(Congruence::from_labels(&labels))
}

/// The quotient algebra; block `i` is named by its members, e.g. `{0,1/2}`.
pub fn quotient(alg: &FiniteAlgebra, theta: &Congruence) -> Result<FiniteAlgebra> {
    let blocks = theta.blocks();
    let names = blocks
        .iter()
        .map(|b| {
            let members: Vec<&str> = b.iter().map(|&x| alg.element_name(x)).collect();
            format!("{{{}}}", members.join(","))
        })
        .collect();
    FiniteAlgebra::from_fn(alg.signature.clone(), names, |name, args| {
        let reps: Vec<usize> = args.iter().map(|&a| blocks[a][0]).collect();
        theta.block_of(alg.apply(name, &reps))
    })
}

pub fn quotient_by_congruence(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Result<(Congruence, FiniteAlgebra)> {
    let theta = congruence_generated(alg, pairs)?;
    let q = quotient(alg, &theta)?;
    Ok((theta, q))
}

/// A bijection `a1 → a2` commuting with all operations (and carrying `d1` onto `d2` when both
/// are given), found by backtracking over images in index order.
pub fn find_isomorphism(
    a1: &FiniteAlgebra,
    a2: &FiniteAlgebra,
    d1: Option<&[bool]>,
    d2: Option<&[bool]>,
) -> Result<Option<Vec<usize>>> {
    a1.check_same_signature(a2)?;
    let k = a1.size();
    if k != a2.size() {
        return Ok(None);
    }
    let des = match (d1, d2) {
        (Some(x), Some(y)) => {
            if x.len() != k || y.len() != k {
                return Err(Error::invalid("designated mask has the wrong length"));
            }
            Some((x, y))
        }
        _ => None,
    };
    let mut map = vec![usize::MAX; k];
    let mut used = vec![false; k];
    let ok = iso_search(a1, a2, des, 0, &mut map, &mut used);
    Ok(ok.then_some(map))
}

fn iso_search(
    a1: &FiniteAlgebra,
    a2: &FiniteAlgebra,
    des: Option<(&[bool], &[bool])>,
    x: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    let k = a1.size();
    if x == k {
        return true;
    }
    for y in 0..k {
        if used[y] {
            continue;
        }
        if let Some((d1, d2)) = des {
            if d1[x] != d2[y] {
                continue;
            }
        }
        map[x] = y;
        used[y] = true;
        if iso_consistent(a1, a2, x, map) && iso_search(a1, a2, des, x + 1, map, used) {
            return true;
        }
        used[y] = false;
        map[x] = usize::MAX;
    }
    false
}

fn iso_consistent(a1: &FiniteAlgebra, a2: &FiniteAlgebra, x: usize, map: &[usize]) -> bool {
    let k = a1.size();
    for (name, op) in a1.operations() {
        let op2 = &a2.ops[name];
        let mut args = vec![0; op.arity];
        let mut image = vec![0; op.arity];
        for t in 0..op.table.len() {
            decode_tuple(t, k, &mut args);
            let r = op.table[t];
            if r > x || args.iter().any(|&a| a > x) {
                continue;
            }
            if r != x && !args.contains(&x) {
                continue;
            }
            for (i, &a) in image.iter_mut().zip(&args) {
                *i = map[a];
            }
            if op2.apply(k, &image) != map[r] {
                return false;
            }
        }
    }
    true
}
