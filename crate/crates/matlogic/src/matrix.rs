//! Logical matrices and atlases: validity, consequence, matrix and atlas combinations,
//! the greatest compatible congruence and the preset matrices.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::algebra::{direct_product, direct_product_many, Assignment, Congruence, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::lang::{Formula, Signature};
use crate::Caps;

/// An algebra with one designated set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    algebra: FiniteAlgebra,
    designated: Vec<bool>,
}

/// An algebra with a nonempty family of designated sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atlas {
    algebra: FiniteAlgebra,
    filters: Vec<Vec<bool>>,
}

/// Anything with an algebra and an ordered family of filters.
pub trait Semantics {
    fn algebra(&self) -> &FiniteAlgebra;
    fn filters(&self) -> &[Vec<bool>];
}

fn mask(k: usize, members: impl IntoIterator<Item = usize>) -> Result<Vec<bool>> {
    let mut m = vec![false; k];
    for x in members {
        if x >= k {
            return Err(Error::invalid(format!("element {x} is outside the carrier")));
        }
        m[x] = true;
    }
    Ok(m)
}

fn members(mask: &[bool]) -> Vec<usize> {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

fn names_to_indices(alg: &FiniteAlgebra, names: &[&str]) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|n| {
            alg.element_index(n)
                .ok_or_else(|| Error::invalid(format!("`{n}` is not an element of the carrier")))
        })
        .collect()
}

impl Matrix {
    pub fn new(algebra: FiniteAlgebra, designated: impl IntoIterator<Item = usize>) -> Result<Self> {
        let designated = mask(algebra.size(), designated)?;
        Ok(Matrix { algebra, designated })
    }

    pub fn with_names(algebra: FiniteAlgebra, designated: &[&str]) -> Result<Self> {
        let idx = names_to_indices(&algebra, designated)?;
        Matrix::new(algebra, idx)
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn designated(&self) -> Vec<usize> {
        members(&self.designated)
    }

    pub fn designated_mask(&self) -> &[bool] {
        &self.designated
    }

    pub fn is_designated(&self, x: usize) -> bool {
        self.designated[x]
    }

    pub fn to_atlas(&self) -> Atlas {
        Atlas {
            algebra: self.algebra.clone(),
            filters: vec![self.designated.clone()],
        }
    }

    /// The same designated set over a reduct.
    pub fn reduct(&self, names: &[&str]) -> Result<Matrix> {
        Ok(Matrix {
            algebra: self.algebra.reduct(names)?,
            designated: self.designated.clone(),
        })
    }
}

impl Semantics for Matrix {
    fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    fn filters(&self) -> &[Vec<bool>] {
        std::slice::from_ref(&self.designated)
    }
}

impl Atlas {
    /// Duplicate filters are dropped, keeping first occurrences.
    pub fn new(algebra: FiniteAlgebra, filters: Vec<Vec<usize>>) -> Result<Self> {
        let masks = filters
            .into_iter()
            .map(|f| mask(algebra.size(), f))
            .collect::<Result<Vec<_>>>()?;
        Atlas::from_masks(algebra, masks)
    }

    pub fn with_names(algebra: FiniteAlgebra, filters: &[&[&str]]) -> Result<Self> {
        let idx = filters
            .iter()
            .map(|f| names_to_indices(&algebra, f))
            .collect::<Result<Vec<_>>>()?;
        Atlas::new(algebra, idx)
    }

    pub fn from_masks(algebra: FiniteAlgebra, masks: Vec<Vec<bool>>) -> Result<Self> {
        if masks.is_empty() {
            return Err(Error::invalid("an atlas needs at least one filter"));
        }
        let mut filters: Vec<Vec<bool>> = Vec::new();
        for m in masks {
            if m.len() != algebra.size() {
                return Err(Error::invalid("filter mask has the wrong length"));
            }
            if !filters.contains(&m) {
                filters.push(m);
            }
        }
        Ok(Atlas { algebra, filters })
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn filters(&self) -> &[Vec<bool>] {
        &self.filters
    }

    pub fn filter_members(&self, i: usize) -> Vec<usize> {
        members(&self.filters[i])
    }

    pub fn matrices(&self) -> Vec<Matrix> {
        self.filters
            .iter()
            .map(|d| Matrix {
                algebra: self.algebra.clone(),
                designated: d.clone(),
            })
            .collect()
    }
}

impl Semantics for Atlas {
    fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    fn filters(&self) -> &[Vec<bool>] {
        &self.filters
    }
}

impl From<&Matrix> for Atlas {
    fn from(m: &Matrix) -> Atlas {
        m.to_atlas()
    }
}

/// Result of a validity or consequence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// The first separating assignment (lexicographic over the sorted variables) and the
    /// first filter (family order) it separates.
    Fails {
        assignment: Assignment,
        filter: usize,
    },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

pub fn is_valid(m: &Matrix, f: &Formula) -> Result<Verdict> {
    consequence_with_caps(m, &[], f, &Caps::default())
}

pub fn is_valid_with_caps(m: &impl Semantics, f: &Formula, caps: &Caps) -> Result<Verdict> {
    consequence_with_caps(m, &[], f, caps)
}

pub fn consequence(m: &impl Semantics, premises: &[Formula], f: &Formula) -> Result<Verdict> {
    consequence_with_caps(m, premises, f, &Caps::default())
}

pub fn consequence_with_caps(m: &impl Semantics, premises: &[Formula], f: &Formula, caps: &Caps) -> Result<Verdict> {
    let alg = m.algebra();
    let mut vars = f.variables();
    for p in premises {
        vars.extend(p.variables());
    }
    let vars: Vec<u32> = vars.into_iter().collect();
    let goal = alg.term_table(f, &vars, caps)?;
    let prem = premises
        .iter()
        .map(|p| alg.term_table(p, &vars, caps))
        .collect::<Result<Vec<_>>>()?;
    let k = alg.size();
    let mut tuple = vec![0; vars.len()];
    for t in 0..goal.len() {
        for (i, d) in m.filters().iter().enumerate() {
            if !d[goal[t]] && prem.iter().all(|p| d[p[t]]) {
                crate::algebra::decode_tuple(t, k, &mut tuple);
                let assignment = vars.iter().copied().zip(tuple.iter().copied()).collect();
                return Ok(Verdict::Fails { assignment, filter: i });
            }
        }
    }
    Ok(Verdict::Holds)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Combination {
    Lsum,
    Rsum,
    Product,
    Sum,
}

impl FromStr for Combination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lsum" => Ok(Combination::Lsum),
            "rsum" => Ok(Combination::Rsum),
            "product" => Ok(Combination::Product),
            "sum" => Ok(Combination::Sum),
            other => Err(Error::invalid(format!("unknown combination `{other}`"))),
        }
    }
}

impl fmt::Display for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Combination::Lsum => "lsum",
            Combination::Rsum => "rsum",
            Combination::Product => "product",
            Combination::Sum => "sum",
        })
    }
}

fn combine_masks(kind: Combination, d1: &[bool], d2: &[bool]) -> Vec<bool> {
    let k2 = d2.len();
    (0..d1.len() * k2)
        .map(|x| {
            let (a, b) = (d1[x / k2], d2[x % k2]);
            match kind {
                Combination::Lsum => a,
                Combination::Rsum => b,
                Combination::Product => a && b,
                Combination::Sum => a || b,
            }
        })
        .collect()
}

/// Matrices over `A1 × A2`: lsum `D1×|A2|`, rsum `|A1|×D2`, product `D1×D2`, sum the union
/// of lsum and rsum.
pub fn combine_matrices(kind: Combination, m1: &Matrix, m2: &Matrix) -> Result<Matrix> {
    let algebra = direct_product(&m1.algebra, &m2.algebra)?;
    let designated = combine_masks(kind, &m1.designated, &m2.designated);
    Ok(Matrix { algebra, designated })
}

/// Atlases over `A1 × A2` whose filters are the cylinders over the left (lsum) or right
/// (rsum) family.
pub fn combine_atlases(kind: Combination, a1: &Atlas, a2: &Atlas) -> Result<Atlas> {
    let algebra = direct_product(&a1.algebra, &a2.algebra)?;
    let k1 = a1.algebra.size();
    let k2 = a2.algebra.size();
    let filters = match kind {
        Combination::Lsum => a1
            .filters
            .iter()
            .map(|d| combine_masks(Combination::Lsum, d, &vec![true; k2]))
            .collect(),
        Combination::Rsum => a2
            .filters
            .iter()
            .map(|d| combine_masks(Combination::Rsum, &vec![true; k1], d))
            .collect(),
        other => return Err(Error::invalid(format!("atlases combine by lsum or rsum, not {other}"))),
    };
    Atlas::from_masks(algebra, filters)
}

/// One atlas over the product of the family's algebras; filter `i` is `D_i` cylindrified
/// over the other coordinates.
pub fn atlas_from_family(ms: &[Matrix]) -> Result<Atlas> {
    if ms.is_empty() {
        return Err(Error::invalid("empty matrix family"));
    }
    let algs: Vec<&FiniteAlgebra> = ms.iter().map(|m| &m.algebra).collect();
    let algebra = direct_product_many(&algs)?;
    let sizes: Vec<usize> = algs.iter().map(|a| a.size()).collect();
    let total = algebra.size();
    let filters = (0..ms.len())
        .map(|i| {
            let stride: usize = sizes[i + 1..].iter().product();
            (0..total).map(|x| ms[i].designated[(x / stride) % sizes[i]]).collect()
        })
        .collect();
    Atlas::from_masks(algebra, filters)
}

/// The largest congruence of which every filter is a union of blocks. Starts from the
/// partition by filter membership and splits blocks until every unary polynomial step
/// (one operation with all but one argument fixed) maps related elements to related
/// elements.
pub fn greatest_compatible_congruence(m: &impl Semantics) -> Congruence {
    let alg = m.algebra();
    let k = alg.size();
    let initial: Vec<Vec<bool>> = (0..k).map(|x| m.filters().iter().map(|d| d[x]).collect()).collect();
    let mut theta = relabel(&initial);
    loop {
        let keys: Vec<Vec<usize>> = (0..k)
            .map(|x| {
                let mut key = vec![theta.block_of(x)];
                for (_, op) in alg.operations() {
                    let a = op.arity();
                    if a == 0 {
                        continue;
                    }
                    let others = k.pow(a as u32 - 1);
                    let mut rest = vec![0; a - 1];
                    for j in 0..a {
                        for o in 0..others {
                            crate::algebra::decode_tuple(o, k, &mut rest);
                            let mut args = rest.clone();
                            args.insert(j, x);
                            let mut idx = 0;
                            for &v in &args {
                                idx = idx * k + v;
                            }
                            key.push(theta.block_of(op.table()[idx]));
                        }
                    }
                }
                key
            })
            .collect();
        let next = relabel(&keys);
        if next.block_count() == theta.block_count() {
            return next;
        }
        theta = next;
    }
}

fn relabel<K: std::hash::Hash + Eq + Clone>(keys: &[K]) -> Congruence {
    let mut ids: HashMap<K, usize> = HashMap::new();
    let labels: Vec<usize> = keys
        .iter()
        .map(|key| {
            let next = ids.len();
            *ids.entry(key.clone()).or_insert(next)
        })
        .collect();
    Congruence::from_labels(&labels)
}

/// Names of the built-in matrices.
pub const PRESETS: &[&str] = &["B2", "L3", "L3modal", "G<n> (n >= 2)", "LC<m> (m >= 2)"];

fn chain_names(n: usize) -> Vec<String> {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let top = n - 1;
    (0..n)
        .map(|i| match i {
            0 => "0".to_string(),
            i if i == top => "1".to_string(),
            i => {
                let g = gcd(i, top);
                format!("{}/{}", i / g, top / g)
            }
        })
        .collect()
}

fn goedel_chain(n: usize) -> Result<FiniteAlgebra> {
    let top = n - 1;
    FiniteAlgebra::from_fn(Signature::boolean_with_constants(), chain_names(n), |op, a| match op {
        "~" => {
            if a[0] == 0 {
                top
            } else {
                0
            }
        }
        "&" => a[0].min(a[1]),
        "|" => a[0].max(a[1]),
        "->" => {
            if a[0] <= a[1] {
                top
            } else {
                a[1]
            }
        }
        "top" => top,
        _ => 0,
    })
}

fn lukasiewicz3(modal: bool) -> Result<FiniteAlgebra> {
    let mut sig = Signature::boolean_with_constants();
    if modal {
        sig.add("box", 1)?;
        sig.add("dia", 1)?;
    }
    FiniteAlgebra::from_fn(sig, chain_names(3), |op, a| match op {
        "~" => 2 - a[0],
        "&" => a[0].min(a[1]),
        "|" => a[0].max(a[1]),
        "->" => (2 - a[0] + a[1]).min(2),
        "top" => 2,
        "bot" => 0,
        "box" => {
            if a[0] == 2 {
                2
            } else {
                0
            }
        }
        _ => {
            if a[0] == 0 {
                0
            } else {
                2
            }
        }
    })
}

fn chain_param(name: &str, prefix: &str) -> Option<Result<usize>> {
    let rest = name.strip_prefix(prefix)?;
    let rest = rest.trim_start_matches('(').trim_end_matches(')');
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(
        rest.parse::<usize>()
            .map_err(|_| Error::invalid(format!("bad size in preset `{name}`")))
            .and_then(|n| {
                if n < 2 {
                    Err(Error::invalid(format!("preset `{name}` needs at least 2 elements")))
                } else if n > 256 {
                    Err(Error::invalid(format!("preset `{name}` is too large")))
                } else {
                    Ok(n)
                }
            }),
    )
}

/// Built-in matrices, all over `{~, &, |, ->, top, bot}` with designated `{1}`:
/// `B2`, `L3`, `L3modal` (adds `box`, `dia`), `G<n>` and `LC<m>` (Gödel chains).
pub fn make_preset(name: &str) -> Result<Matrix> {
    let name = name.trim();
    let algebra = match name {
        "B2" => goedel_chain(2)?,
        "L3" | "Ł3" => lukasiewicz3(false)?,
        "L3modal" | "Ł3modal" => lukasiewicz3(true)?,
        _ => {
            let n = chain_param(name, "LCchain")
                .or_else(|| chain_param(name, "LC"))
                .or_else(|| chain_param(name, "G"))
                .ok_or_else(|| Error::invalid(format!("unknown preset `{name}`")))??;
            goedel_chain(n)?
        }
    };
    let top = algebra.size() - 1;
    Matrix::new(algebra, [top])
}
