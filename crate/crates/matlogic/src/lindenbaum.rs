//! Indistinguishability, representative sets of `Fm^(n)`, restricted Lindenbaum theorems and
//! finite Lindenbaum-Tarski algebras built from clones.

use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::{clone_functions, CloneScan, FiniteAlgebra, TermFunction};
use crate::error::{Error, Result};
use crate::lang::Formula;
use crate::matrix::Matrix;
use crate::{checked_pow, Caps};

fn check_vars(f: &Formula, n: usize) -> Result<()> {
    let m = f.max_var();
    if m as usize > n {
        return Err(Error::invalid(format!("{f} uses p{m}, outside p1..p{n}")));
    }
    Ok(())
}

fn var_list(n: usize) -> Vec<u32> {
    (1..=n as u32).collect()
}

/// True iff `f` and `g` induce the same `n`-ary term function on `alg`.
pub fn indistinguishable(alg: &FiniteAlgebra, f: &Formula, g: &Formula, n: usize) -> Result<bool> {
    check_vars(f, n)?;
    check_vars(g, n)?;
    let caps = Caps::default();
    let vars = var_list(n);
    Ok(alg.term_table(f, &vars, &caps)? == alg.term_table(g, &vars, &caps)?)
}

/// One enumeration-first witness per class of `Fm^(n)` modulo indistinguishability.
#[derive(Clone, Debug)]
pub struct RepresentativeSet {
    pub n: usize,
    /// In enumeration order of the witnesses.
    pub entries: Vec<TermFunction>,
    pub caps: Caps,
}

#[derive(Serialize)]
struct RepJson<'a> {
    witness: String,
    table: Vec<&'a str>,
}

impl RepresentativeSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn witnesses(&self) -> Vec<Formula> {
        self.entries.iter().map(|e| e.witness.clone()).collect()
    }

    /// The entry with the same term function as `f`.
    pub fn representative_of(&self, alg: &FiniteAlgebra, f: &Formula) -> Result<&TermFunction> {
        check_vars(f, self.n)?;
        let table: Vec<u16> = alg
            .term_table(f, &var_list(self.n), &self.caps)?
            .into_iter()
            .map(|v| v as u16)
            .collect();
        self.entries
            .iter()
            .find(|e| e.table == table)
            .ok_or_else(|| Error::invalid("no representative found; the set is incomplete"))
    }

    /// `[{"witness": ..., "table": [element names]}]`.
    pub fn to_json(&self, alg: &FiniteAlgebra) -> serde_json::Value {
        let rows: Vec<RepJson> = self
            .entries
            .iter()
            .map(|e| RepJson {
                witness: e.witness.to_string(),
                table: e.table.iter().map(|&v| alg.element_name(v as usize)).collect(),
            })
            .collect();
        serde_json::to_value(rows).expect("serializable")
    }
}

pub fn representatives(alg: &FiniteAlgebra, n: usize, caps: &Caps) -> Result<RepresentativeSet> {
    let mut scan = CloneScan::new(alg, n, caps)?;
    scan.run(&mut |_| false)?;
    Ok(RepresentativeSet {
        n,
        entries: scan.entries,
        caps: *caps,
    })
}

/// Representatives valid in `m`.
pub fn restricted_theorems(m: &Matrix, n: usize, caps: &Caps) -> Result<Vec<TermFunction>> {
    let reps = representatives(m.algebra(), n, caps)?;
    Ok(reps
        .entries
        .into_iter()
        .filter(|e| e.table.iter().all(|&v| m.is_designated(v as usize)))
        .collect())
}

/// The algebra of `n`-ary term functions under pointwise operations.
#[derive(Clone, Debug)]
pub struct FreeAlgebra {
    /// Elements are named by witnesses and ordered by table.
    pub algebra: FiniteAlgebra,
    /// Term functions landing in the designated set everywhere.
    pub designated: Vec<usize>,
    pub functions: Vec<TermFunction>,
}

impl FreeAlgebra {
    pub fn matrix(&self) -> Matrix {
        Matrix::new(self.algebra.clone(), self.designated.iter().copied()).expect("indices in range")
    }
}

pub fn free_matrix_algebra(m: &Matrix, n: usize, caps: &Caps) -> Result<FreeAlgebra> {
    let alg = m.algebra();
    let functions = clone_functions(alg, n, caps)?;
    let size = functions.len();
    for (_, arity) in alg.signature().operations() {
        if checked_pow(size, arity, caps.max_tuples).is_none() {
            return Err(Error::cap(format!(
                "operation tables over {size} term functions exceed max_tuples"
            )));
        }
    }
    let index: HashMap<&[u16], usize> = functions
        .iter()
        .enumerate()
        .map(|(i, f)| (f.table.as_slice(), i))
        .collect();
    let names = functions.iter().map(|f| f.witness.to_string()).collect();
    let width = functions.first().map_or(0, |f| f.table.len());
    let algebra = FiniteAlgebra::from_fn(alg.signature().clone(), names, |op, args| {
        let op_table = alg.operation(op).expect("declared operation");
        let k = alg.size();
        let table: Vec<u16> = (0..width)
            .map(|t| {
                let mut idx = 0;
                for &a in args {
                    idx = idx * k + functions[a].table[t] as usize;
                }
                op_table.table()[idx] as u16
            })
            .collect();
        index[table.as_slice()]
    })?;
    let designated = functions
        .iter()
        .enumerate()
        .filter(|(_, f)| f.table.iter().all(|&v| m.is_designated(v as usize)))
        .map(|(i, _)| i)
        .collect();
    Ok(FreeAlgebra {
        algebra,
        designated,
        functions,
    })
}
