#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};

use matlogic::algebra::FiniteAlgebra;
use matlogic::eqlogic::{EDerivation, EStep, ESystem, Equality, Justification};
use matlogic::lang::{enumerate_formulas, parse_formula, random_formula, Formula, Node, Signature};
use matlogic::matrix::Matrix;
use rand::Rng;

pub fn f(text: &str, sig: &Signature) -> Formula {
    parse_formula(text, sig).unwrap_or_else(|e| panic!("{text}: {e}"))
}

/// `{~/1, ->/2}`.
pub fn neg_imp() -> Signature {
    Signature::from_pairs([("~", 1), ("->", 2)]).unwrap()
}

pub fn fg() -> Signature {
    Signature::from_pairs([("f", 1), ("g", 2)]).unwrap()
}

pub fn random_algebra<R: Rng>(rng: &mut R, sig: &Signature, k: usize) -> FiniteAlgebra {
    let names = (0..k).map(|i| format!("a{i}")).collect();
    let tables = sig
        .iter()
        .map(|(name, arity)| {
            (
                name.to_string(),
                (0..k.pow(arity as u32)).map(|_| rng.random_range(0..k)).collect(),
            )
        })
        .collect();
    FiniteAlgebra::new(sig.clone(), names, tables).unwrap()
}

/// Random algebra of size 1..=kmax with a random (possibly empty) designated set.
pub fn random_matrix<R: Rng>(rng: &mut R, sig: &Signature, kmin: usize, kmax: usize) -> Matrix {
    let k = rng.random_range(kmin..=kmax);
    let alg = random_algebra(rng, sig, k);
    let des: Vec<usize> = (0..k).filter(|_| rng.random_bool(0.5)).collect();
    Matrix::new(alg, des).unwrap()
}

/// Plain recursive evaluation.
pub fn eval(alg: &FiniteAlgebra, f: &Formula, v: &BTreeMap<u32, usize>) -> usize {
    match f.node() {
        Node::Var(i) => v[i],
        Node::Const(c) => alg.constant(c),
        Node::Apply(op, args) => {
            let xs: Vec<usize> = args.iter().map(|a| eval(alg, a, v)).collect();
            alg.apply(op, &xs)
        }
    }
}

/// Every assignment of `vars` into `0..k`.
pub fn assignments(vars: &[u32], k: usize) -> Vec<BTreeMap<u32, usize>> {
    let mut out = vec![BTreeMap::new()];
    for &v in vars {
        out = out
            .into_iter()
            .flat_map(|a| {
                (0..k).map(move |x| {
                    let mut b = a.clone();
                    b.insert(v, x);
                    b
                })
            })
            .collect();
    }
    out
}

pub fn vars_of(fs: &[&Formula]) -> Vec<u32> {
    let mut s = std::collections::BTreeSet::new();
    for f in fs {
        s.extend(f.variables());
    }
    s.into_iter().collect()
}

/// Truth-table consequence with designated mask `d`.
pub fn entails(alg: &FiniteAlgebra, d: &[bool], premises: &[Formula], goal: &Formula) -> bool {
    let mut all: Vec<&Formula> = premises.iter().collect();
    all.push(goal);
    let vars = vars_of(&all);
    assignments(&vars, alg.size())
        .iter()
        .all(|v| !premises.iter().all(|p| d[eval(alg, p, v)]) || d[eval(alg, goal, v)])
}

pub fn valid(m: &Matrix, goal: &Formula) -> bool {
    entails(m.algebra(), m.designated_mask(), &[], goal)
}

/// The term function of `f` over `p1..pn` as a value list.
pub fn table(alg: &FiniteAlgebra, f: &Formula, n: usize) -> Vec<usize> {
    let vars: Vec<u32> = (1..=n as u32).collect();
    assignments(&vars, alg.size()).iter().map(|v| eval(alg, f, v)).collect()
}

/// Walks depth strata of `Fm^(n)` keeping the first formula of each new term function; stops
/// at the first depth that adds nothing. Returns the witnesses and that depth.
pub fn stepwise_representatives(alg: &FiniteAlgebra, n: usize, max_depth: usize) -> (Vec<Formula>, usize) {
    let all = enumerate_formulas(alg.signature(), n, max_depth, 5_000_000).unwrap();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    let mut depth = 0;
    let mut added = false;
    for f in &all {
        if f.depth() != depth {
            if !added && depth > 0 {
                return (out, depth);
            }
            depth = f.depth();
            added = false;
        }
        if seen.insert(table(alg, f, n)) {
            out.push(f.clone());
            added = true;
        }
    }
    let stable = if added { depth + 1 } else { depth };
    (out, stable)
}

pub fn subterms(f: &Formula, out: &mut Vec<Formula>) {
    if let Node::Apply(_, args) = f.node() {
        for a in args {
            subterms(a, out);
        }
    }
    if !out.contains(f) {
        out.push(f.clone());
    }
}

pub fn universe(premises: &[Equality], goal: &Equality) -> Vec<Formula> {
    let mut u = Vec::new();
    for e in premises.iter().chain([goal]) {
        subterms(&e.lhs, &mut u);
        subterms(&e.rhs, &mut u);
    }
    u
}

/// Forward E1 derivation search over the subterm universe extended by one layer of `f`/`g`
/// applications, for at most `rounds` rounds of rule application.
pub fn e1_search(premises: &[Equality], goal: &Equality, rounds: usize) -> bool {
    let base = universe(premises, goal);
    let mut terms = base.clone();
    for a in &base {
        let fa = Formula::apply("f", vec![a.clone()]);
        if !terms.contains(&fa) {
            terms.push(fa);
        }
        for b in &base {
            let g = Formula::apply("g", vec![a.clone(), b.clone()]);
            if !terms.contains(&g) {
                terms.push(g);
            }
        }
    }
    let idx: HashMap<Formula, usize> = terms.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let n = terms.len();
    let mut eq = vec![vec![false; n]; n];
    for (i, row) in eq.iter_mut().enumerate() {
        row[i] = true;
    }
    for p in premises {
        eq[idx[&p.lhs]][idx[&p.rhs]] = true;
    }
    for _ in 0..rounds {
        let mut next = eq.clone();
        for i in 0..n {
            for j in 0..n {
                if eq[i][j] {
                    next[j][i] = true;
                    for k in 0..n {
                        if eq[j][k] {
                            next[i][k] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if next[i][j] {
                    continue;
                }
                if let (Node::Apply(a, xs), Node::Apply(b, ys)) = (terms[i].node(), terms[j].node()) {
                    if a == b && xs.iter().zip(ys).all(|(x, y)| eq[idx[x]][idx[y]]) {
                        next[i][j] = true;
                    }
                }
            }
        }
        if next == eq {
            break;
        }
        eq = next;
    }
    eq[idx[&goal.lhs]][idx[&goal.rhs]]
}

/// Ground instance over `f/1, g/2` with at most `max_terms` distinct subterms.
pub fn random_ground_instance<R: Rng>(rng: &mut R, max_terms: usize) -> (Vec<Equality>, Equality) {
    let sig = fg();
    loop {
        let np = rng.random_range(1..=3);
        let premises: Vec<Equality> = (0..np)
            .map(|_| Equality::new(random_formula(rng, &sig, 3, 2), random_formula(rng, &sig, 3, 2)))
            .collect();
        let goal = match rng.random_range(0..3) {
            0 => Equality::new(random_formula(rng, &sig, 3, 2), random_formula(rng, &sig, 3, 2)),
            1 => {
                let p = &premises[rng.random_range(0..np)];
                Equality::new(
                    Formula::apply("f", vec![p.rhs.clone()]),
                    Formula::apply("f", vec![p.lhs.clone()]),
                )
            }
            _ => {
                let a = &premises[rng.random_range(0..np)];
                let b = &premises[rng.random_range(0..np)];
                Equality::new(a.lhs.clone(), b.rhs.clone())
            }
        };
        if universe(&premises, &goal).len() <= max_terms {
            return (premises, goal);
        }
    }
}

/// A valid E1 derivation from random ground premises over `f/1, g/2`.
pub fn random_e1_derivation<R: Rng>(rng: &mut R, len: usize) -> (Vec<Equality>, EDerivation) {
    let sig = fg();
    let premises: Vec<Equality> = (0..rng.random_range(1..=3))
        .map(|_| Equality::new(random_formula(rng, &sig, 3, 2), random_formula(rng, &sig, 3, 2)))
        .collect();
    let mut steps: Vec<EStep> = premises
        .iter()
        .map(|p| EStep {
            eq: p.clone(),
            by: Justification::Premise,
        })
        .collect();
    while steps.len() < premises.len() + len {
        let m = steps.len();
        let step = match rng.random_range(0..5) {
            0 => {
                let t = random_formula(rng, &sig, 3, 2);
                EStep {
                    eq: Equality::new(t.clone(), t),
                    by: Justification::Axiom,
                }
            }
            1 => {
                let i = rng.random_range(0..m);
                EStep {
                    eq: steps[i].eq.swap(),
                    by: Justification::Symmetry { from: i },
                }
            }
            2 => {
                let pairs: Vec<(usize, usize)> = (0..m)
                    .flat_map(|i| (0..m).map(move |j| (i, j)))
                    .filter(|&(i, j)| steps[i].eq.rhs == steps[j].eq.lhs)
                    .collect();
                if pairs.is_empty() {
                    continue;
                }
                let (i, j) = pairs[rng.random_range(0..pairs.len())];
                EStep {
                    eq: Equality::new(steps[i].eq.lhs.clone(), steps[j].eq.rhs.clone()),
                    by: Justification::Transitivity { left: i, right: j },
                }
            }
            3 => {
                let i = rng.random_range(0..m);
                let e = &steps[i].eq;
                EStep {
                    eq: Equality::new(
                        Formula::apply("f", vec![e.lhs.clone()]),
                        Formula::apply("f", vec![e.rhs.clone()]),
                    ),
                    by: Justification::Congruence { args: vec![i] },
                }
            }
            _ => {
                let (i, j) = (rng.random_range(0..m), rng.random_range(0..m));
                let (a, b) = (&steps[i].eq, &steps[j].eq);
                EStep {
                    eq: Equality::new(
                        Formula::apply("g", vec![a.lhs.clone(), b.lhs.clone()]),
                        Formula::apply("g", vec![a.rhs.clone(), b.rhs.clone()]),
                    ),
                    by: Justification::Congruence { args: vec![i, j] },
                }
            }
        };
        steps.push(step);
    }
    (
        premises,
        EDerivation {
            system: ESystem::E1,
            steps,
        },
    )
}

/// Every algebra over `sig` with carrier `0..k`.
pub fn all_algebras(sig: &Signature, k: usize) -> Vec<FiniteAlgebra> {
    let shape: Vec<(String, usize)> = sig.iter().map(|(n, a)| (n.to_string(), k.pow(a as u32))).collect();
    let slots: usize = shape.iter().map(|s| s.1).sum();
    (0..k.pow(slots as u32))
        .map(|mut code| {
            let tables = shape
                .iter()
                .map(|(name, len)| {
                    let t = (0..*len)
                        .map(|_| {
                            let x = code % k;
                            code /= k;
                            x
                        })
                        .collect();
                    (name.clone(), t)
                })
                .collect();
            let names = (0..k).map(|i| format!("a{i}")).collect();
            FiniteAlgebra::new(sig.clone(), names, tables).unwrap()
        })
        .collect()
}

/// Exhaustive check that `labels` is a congruence of `alg`.
pub fn compatible(alg: &FiniteAlgebra, labels: &[usize]) -> bool {
    let k = alg.size();
    for (name, arity) in alg.signature().iter() {
        let vars: Vec<u32> = (0..arity as u32).collect();
        let tuples = assignments(&vars, k);
        for a in &tuples {
            for b in &tuples {
                let related = a.values().zip(b.values()).all(|(x, y)| labels[*x] == labels[*y]);
                if related {
                    let xa: Vec<usize> = a.values().copied().collect();
                    let xb: Vec<usize> = b.values().copied().collect();
                    if labels[alg.apply(name, &xa)] != labels[alg.apply(name, &xb)] {
                        return false;
                    }
                }
            }
        }
    }
    true
}
