//! Decision procedures: theorem existence, theorem inclusion between matrices and
//! consequence inclusion between atlases.

use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{direct_product, find_isomorphism, minimal_generating_set, CloneScan, ScanEnd, TermFunction};
use crate::error::{Error, Result};
use crate::lang::Formula;
use crate::matrix::{consequence_with_caps, is_valid_with_caps, Atlas, Matrix, Semantics, Verdict};
use crate::Caps;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Answer {
    Yes,
    No,
    CapExceeded,
}

impl Answer {
    pub fn as_str(&self) -> &'static str {
        match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::CapExceeded => "cap-exceeded",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Formula(Formula),
    Sequent {
        premises: Vec<Formula>,
        conclusion: Formula,
    },
}

impl Witness {
    pub fn to_json(&self) -> Value {
        match self {
            Witness::Formula(f) => json!({ "formula": f.to_string() }),
            Witness::Sequent { premises, conclusion } => json!({
                "premises": premises.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "conclusion": conclusion.to_string(),
            }),
        }
    }
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::Formula(x) => write!(f, "{x}"),
            Witness::Sequent { premises, conclusion } => {
                let ps: Vec<String> = premises.iter().map(|p| p.to_string()).collect();
                write!(f, "{} / {conclusion}", ps.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    /// Representatives generated.
    pub representatives: usize,
    /// Candidate tables and separator checks performed.
    pub work_units: u64,
    /// Variables the representatives range over.
    pub variables: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionReport {
    pub answer: Answer,
    pub witness: Option<Witness>,
    pub stats: Stats,
    /// Which direction failed, or why the cap was hit.
    pub detail: Option<String>,
}

impl DecisionReport {
    fn new(answer: Answer, witness: Option<Witness>, stats: Stats) -> Self {
        DecisionReport {
            answer,
            witness,
            stats,
            detail: None,
        }
    }

    fn cap(err: Error, stats: Stats) -> Result<Self> {
        match err {
            Error::CapExceeded(msg) => Ok(DecisionReport {
                answer: Answer::CapExceeded,
                witness: None,
                stats,
                detail: Some(msg),
            }),
            other => Err(other),
        }
    }

    /// `{answer, witness, stats}` plus `detail` when present.
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "answer": self.answer.as_str(),
            "witness": self.witness.as_ref().map_or(Value::Null, Witness::to_json),
            "stats": self.stats,
        });
        if let Some(d) = &self.detail {
            v["detail"] = json!(d);
        }
        v
    }
}

/// Whether `m` has a theorem; the search runs over one-variable representatives, which
/// suffices because theorems are closed under substitution.
pub fn has_theorems(m: &Matrix, caps: &Caps) -> Result<DecisionReport> {
    let mut stats = Stats {
        variables: 1,
        ..Stats::default()
    };
    if m.designated().is_empty() {
        return Ok(DecisionReport::new(Answer::No, None, stats));
    }
    let mut scan = CloneScan::new(m.algebra(), 1, caps)?;
    let mut found = None;
    let outcome = scan.run(&mut |e: &TermFunction| {
        if e.table.iter().all(|&v| m.is_designated(v as usize)) {
            found = Some(e.witness.clone());
            true
        } else {
            false
        }
    });
    stats.representatives = scan.entries.len();
    stats.work_units = scan.work;
    match outcome {
        Err(e) => DecisionReport::cap(e, stats),
        Ok(_) => Ok(match found {
            Some(w) => DecisionReport::new(Answer::Yes, Some(Witness::Formula(w)), stats),
            None => DecisionReport::new(Answer::No, None, stats),
        }),
    }
}

/// Number of variables the inclusion procedures range over: the size of a smallest
/// generating set of the target algebra, or the caller's bound when it is at least that.
fn variable_bound(target: &crate::algebra::FiniteAlgebra, requested: Option<usize>) -> Result<usize> {
    let gens = minimal_generating_set(target).len();
    match requested {
        None => Ok(gens),
        Some(n) if n >= gens => Ok(n),
        Some(n) => Err(Error::invalid(format!(
            "a bound of {n} variables is too small: the target algebra needs {gens} generators"
        ))),
    }
}

/// Decides `Thm[m1] ⊆ Thm[m2]`. Representatives are enumerated over `A1 × A2` on `n`
/// variables, `n` being the size of a generating set of `A2`: every refutation in `m2`
/// factors through a substitution of generator terms, so a non-theorem of `m2` that is a
/// theorem of `m1` exists iff one exists among these representatives. The first
/// representative designated on the left coordinate but not on the right is the witness.
///
/// Isomorphic matrices are answered `yes` without a scan; `theorem_inclusion_scan` always
/// runs the full procedure.
pub fn theorem_inclusion(m1: &Matrix, m2: &Matrix, caps: &Caps, var_bound: Option<usize>) -> Result<DecisionReport> {
    m1.algebra().check_same_signature(m2.algebra())?;
    if find_isomorphism(
        m1.algebra(),
        m2.algebra(),
        Some(m1.designated_mask()),
        Some(m2.designated_mask()),
    )?
    .is_some()
    {
        let mut r = DecisionReport::new(Answer::Yes, None, Stats::default());
        r.detail = Some("isomorphic matrices".into());
        return Ok(r);
    }
    theorem_inclusion_scan(m1, m2, caps, var_bound)
}

pub fn theorem_inclusion_scan(
    m1: &Matrix,
    m2: &Matrix,
    caps: &Caps,
    var_bound: Option<usize>,
) -> Result<DecisionReport> {
    m1.algebra().check_same_signature(m2.algebra())?;
    let n = variable_bound(m2.algebra(), var_bound)?;
    let product = direct_product(m1.algebra(), m2.algebra())?;
    let k2 = m2.algebra().size();
    let mut stats = Stats {
        variables: n,
        ..Stats::default()
    };
    let mut scan = match CloneScan::new(&product, n, caps) {
        Ok(s) => s,
        Err(e) => return DecisionReport::cap(e, stats),
    };
    let mut found = None;
    let outcome = scan.run(&mut |e: &TermFunction| {
        let left = e.table.iter().all(|&x| m1.is_designated(x as usize / k2));
        let right = e.table.iter().all(|&x| m2.is_designated(x as usize % k2));
        if left && !right {
            found = Some(e.witness.clone());
            true
        } else {
            false
        }
    });
    stats.representatives = scan.entries.len();
    stats.work_units = scan.work;
    match outcome {
        Err(e) => DecisionReport::cap(e, stats),
        Ok(ScanEnd::Stopped) => {
            let w = found.expect("stopped on a witness");
            let ok1 = is_valid_with_caps(m1, &w, caps)?.holds();
            let ok2 = is_valid_with_caps(m2, &w, caps)?.holds();
            if !ok1 || ok2 {
                return Err(Error::invalid(format!("witness {w} failed re-validation")));
            }
            Ok(DecisionReport::new(Answer::No, Some(Witness::Formula(w)), stats))
        }
        Ok(ScanEnd::Complete) => Ok(DecisionReport::new(Answer::Yes, None, stats)),
    }
}

fn merge_both(first: DecisionReport, second: DecisionReport, labels: [&str; 2]) -> DecisionReport {
    let stats = Stats {
        representatives: first.stats.representatives + second.stats.representatives,
        work_units: first.stats.work_units.saturating_add(second.stats.work_units),
        variables: first.stats.variables.max(second.stats.variables),
    };
    for (r, label) in [(&first, labels[0]), (&second, labels[1])] {
        if r.answer == Answer::No {
            return DecisionReport {
                answer: Answer::No,
                witness: r.witness.clone(),
                stats,
                detail: Some(format!("fails: {label}")),
            };
        }
    }
    for r in [&first, &second] {
        if r.answer == Answer::CapExceeded {
            return DecisionReport {
                answer: Answer::CapExceeded,
                witness: None,
                stats,
                detail: r.detail.clone(),
            };
        }
    }
    DecisionReport::new(Answer::Yes, None, stats)
}

/// `Thm[m1] = Thm[m2]`.
pub fn weak_equivalence(m1: &Matrix, m2: &Matrix, caps: &Caps) -> Result<DecisionReport> {
    let a = theorem_inclusion(m1, m2, caps, None)?;
    if a.answer == Answer::No {
        return Ok(merge_both(
            a,
            DecisionReport::new(Answer::Yes, None, Stats::default()),
            ["Thm[M1] ⊆ Thm[M2]", ""],
        ));
    }
    let b = theorem_inclusion(m2, m1, caps, None)?;
    Ok(merge_both(a, b, ["Thm[M1] ⊆ Thm[M2]", "Thm[M2] ⊆ Thm[M1]"]))
}

struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn new(n: usize) -> Self {
        Bits {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn full(n: usize) -> Self {
        let mut b = Bits::new(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn subset_of(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn intersect(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.words.len() * 64).filter(|&i| self.get(i))
    }
}

/// Index of the product tuple whose coordinates on one side are `side` and `0` on the other.
fn embed_tuple(side: &[usize], k1: usize, k2: usize, left: bool) -> usize {
    let k = k1 * k2;
    side.iter().fold(0, |acc, &v| acc * k + if left { v * k2 } else { v })
}

/// Decides `S[a1] ≼ S[a2]`, i.e. every consequence of `a1` is one of `a2`.
///
/// Representatives `R` of `Fm^(m)` over `A1 × A2` are generated with `m` the size of a
/// generating set of `A2`. For each tuple `ā` of `A2^m` and filter `D` of `a2` the slice
/// `T = {r : r(ā) ∈ D}` is formed; `a1` must separate every `r0 ∉ T` from `T` by some tuple
/// and filter, otherwise `T / r0` (greedily minimized) is a consequence of `a1` refuted in
/// `a2`. Any counterexample sequent factors through a substitution of generator terms, so
/// the scan is complete.
pub fn atlas_inclusion(a1: &Atlas, a2: &Atlas, caps: &Caps, var_bound: Option<usize>) -> Result<DecisionReport> {
    a1.algebra().check_same_signature(a2.algebra())?;
    if a1 == a2 {
        let mut r = DecisionReport::new(Answer::Yes, None, Stats::default());
        r.detail = Some("identical atlases".into());
        return Ok(r);
    }
    atlas_inclusion_scan(a1, a2, caps, var_bound)
}

pub fn atlas_inclusion_scan(a1: &Atlas, a2: &Atlas, caps: &Caps, var_bound: Option<usize>) -> Result<DecisionReport> {
    a1.algebra().check_same_signature(a2.algebra())?;
    let m = variable_bound(a2.algebra(), var_bound)?;
    let product = direct_product(a1.algebra(), a2.algebra())?;
    let (k1, k2) = (a1.algebra().size(), a2.algebra().size());
    let mut stats = Stats {
        variables: m,
        ..Stats::default()
    };
    let mut scan = match CloneScan::new(&product, m, caps) {
        Ok(s) => s,
        Err(e) => return DecisionReport::cap(e, stats),
    };
    if let Err(e) = scan.run(&mut |_| false) {
        stats.representatives = scan.entries.len();
        stats.work_units = scan.work;
        return DecisionReport::cap(e, stats);
    }
    let reps = scan.entries;
    stats.representatives = reps.len();
    stats.work_units = scan.work;
    let r = reps.len();

    let side_tuples = |k: usize| -> Vec<Vec<usize>> {
        let count = k.pow(m as u32);
        (0..count)
            .map(|i| {
                let mut t = vec![0; m];
                crate::algebra::decode_tuple(i, k, &mut t);
                t
            })
            .collect()
    };
    let mut separators: Vec<Bits> = Vec::new();
    for b in side_tuples(k1) {
        let idx = embed_tuple(&b, k1, k2, true);
        for d in a1.filters() {
            let mut s = Bits::new(r);
            for (i, e) in reps.iter().enumerate() {
                if d[e.table[idx] as usize / k2] {
                    s.set(i);
                }
            }
            separators.push(s);
        }
    }
    let closure = |t: &Bits| -> Bits {
        let mut c = Bits::full(r);
        for s in &separators {
            if t.subset_of(s) {
                c.intersect(s);
            }
        }
        c
    };
    for a in side_tuples(k2) {
        let idx = embed_tuple(&a, k1, k2, false);
        for d in a2.filters() {
            let mut t = Bits::new(r);
            for (i, e) in reps.iter().enumerate() {
                if d[e.table[idx] as usize % k2] {
                    t.set(i);
                }
            }
            stats.work_units = stats.work_units.saturating_add(separators.len() as u64);
            let c = closure(&t);
            let escaped = (0..r).find(|&i| c.get(i) && !t.get(i));
            if let Some(r0) = escaped {
                let mut premises = t;
                let members: Vec<usize> = premises.ones().filter(|&i| i < r).collect();
                for i in members {
                    premises.clear(i);
                    if !closure(&premises).get(r0) {
                        premises.set(i);
                    }
                }
                let xs: Vec<Formula> = premises
                    .ones()
                    .filter(|&i| i < r)
                    .map(|i| reps[i].witness.clone())
                    .collect();
                let alpha = reps[r0].witness.clone();
                let yes1 = consequence_with_caps(a1, &xs, &alpha, caps)?.holds();
                let no2 = matches!(consequence_with_caps(a2, &xs, &alpha, caps)?, Verdict::Fails { .. });
                if !yes1 || !no2 {
                    return Err(Error::invalid("counterexample sequent failed re-validation"));
                }
                return Ok(DecisionReport::new(
                    Answer::No,
                    Some(Witness::Sequent {
                        premises: xs,
                        conclusion: alpha,
                    }),
                    stats,
                ));
            }
        }
    }
    Ok(DecisionReport::new(Answer::Yes, None, stats))
}

/// `S[a1] = S[a2]`.
pub fn atlas_equivalence(a1: &Atlas, a2: &Atlas, caps: &Caps) -> Result<DecisionReport> {
    let a = atlas_inclusion(a1, a2, caps, None)?;
    if a.answer == Answer::No {
        return Ok(merge_both(
            a,
            DecisionReport::new(Answer::Yes, None, Stats::default()),
            ["S[A1] ≼ S[A2]", ""],
        ));
    }
    let b = atlas_inclusion(a2, a1, caps, None)?;
    Ok(merge_both(a, b, ["S[A1] ≼ S[A2]", "S[A2] ≼ S[A1]"]))
}

/// Whether a semantics validates `f`, as a plain boolean.
pub fn validates(m: &impl Semantics, f: &Formula, caps: &Caps) -> Result<bool> {
    Ok(is_valid_with_caps(m, f, caps)?.holds())
}
