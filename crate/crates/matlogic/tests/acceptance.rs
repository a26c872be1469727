//! End-to-end acceptance checks. Prints one `PASS`/`FAIL` line per criterion.

mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::*;
use matlogic::algebra::{clone_functions, congruence_generated};
use matlogic::algebra::{Assignment, Congruence, FiniteAlgebra};
use matlogic::cli::load_spec;
use matlogic::decide::{
    atlas_inclusion, has_theorems, theorem_inclusion, theorem_inclusion_scan, weak_equivalence, Answer, Witness,
};
use matlogic::eqlogic::{
    bridge_implicational, decide_ground_equational, eq_consequence, Bridge, EqMode, EqVerdict, Equality,
};
use matlogic::intprover::{
    g3_decide, glivenko_check, int_relation_with, rn_classify, rn_power, G3Prover, IntRelation, RnClass, RnIndex,
    Sequent,
};
use matlogic::lang::Substitution;
use matlogic::lang::{random_formula, Formula, Signature};
use matlogic::lindenbaum::indistinguishable;
use matlogic::lindenbaum::{free_matrix_algebra, representatives};
use matlogic::matrix::{
    combine_matrices, consequence, greatest_compatible_congruence, is_valid, make_preset, Atlas, Combination, Matrix,
};
use matlogic::Caps;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Wall-clock limit per criterion, and the exceptions.
const DEFAULT_LIMIT: Duration = Duration::from_secs(10);
const FREE_ALGEBRA_LIMIT: Duration = Duration::from_secs(1);
const RN_LIMIT: Duration = Duration::from_secs(60);

/// Required agreement rates.
const GLIVENKO_AGREEMENT: f64 = 1.0;
const GROUND_AGREEMENT: f64 = 1.0;

const PROPTEST_CASES: u32 = 500;

/// Criteria whose failure is expected, with a substring every failure message must contain.
const KNOWN_UNATTAINABLE: &[(usize, &str)] = &[(3, "De Morgan")];

#[derive(Default)]
struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn asg(pairs: &[(u32, usize)]) -> Assignment {
    pairs.iter().copied().collect()
}

fn refuter(m: &Matrix, text: &str) -> Option<Assignment> {
    let g = f(text, m.algebra().signature());
    match is_valid(m, &g).unwrap() {
        matlogic::matrix::Verdict::Holds => None,
        matlogic::matrix::Verdict::Fails { assignment, .. } => Some(assignment),
    }
}

fn identity_holds(alg: &FiniteAlgebra, lhs: &str, rhs: &str) -> (bool, usize) {
    let (l, r) = (f(lhs, alg.signature()), f(rhs, alg.signature()));
    let vars = vars_of(&[&l, &r]);
    let all = assignments(&vars, alg.size());
    (all.iter().all(|v| eval(alg, &l, v) == eval(alg, &r, v)), all.len())
}

fn c1_b2_tautologies(c: &mut Check) {
    let b2 = make_preset("B2").unwrap();
    let list = [
        "p1 -> p1",
        "~(p1 & ~p1)",
        "p1 | ~p1",
        "p1 -> (p2 -> p1)",
        "~p1 -> (p1 -> p2)",
        "((p1 -> p2) -> p1) -> p1",
        "~~p1 <-> p1",
        "~(p1 & p2) <-> ~p1 | ~p2",
        "~(p1 | p2) <-> ~p1 & ~p2",
    ];
    let mut ok = 0;
    for t in list {
        let lib = is_valid(&b2, &f(t, b2.algebra().signature())).unwrap().holds();
        let brute = valid(&b2, &f(t, b2.algebra().signature()));
        c.expect(lib && brute, format!("`{t}` not valid in B2"));
        ok += (lib && brute) as usize;
    }
    c.note(format!("{ok}/{} tautologies", list.len()));
}

fn c2_lukasiewicz(c: &mut Check) {
    let l3 = make_preset("L3").unwrap();
    let half = l3.algebra().element_index("1/2").unwrap();
    for t in ["p1 | ~p1", "((p1 -> p2) -> p1) -> p1"] {
        let r = refuter(&l3, t);
        c.expect(
            r.as_ref().is_some_and(|a| a.get(&1) == Some(&half)),
            format!("`{t}`: expected refuter p1 = 1/2, got {r:?}"),
        );
    }
    for t in [
        "p1 -> (p2 -> p1)",
        "(p1 -> p2) -> ((p2 -> p3) -> (p1 -> p3))",
        "(~p1 -> ~p2) -> (p2 -> p1)",
        "((p1 -> ~p1) -> p1) -> p1",
    ] {
        c.expect(
            refuter(&l3, t).is_none(),
            format!("Wajsberg formula `{t}` not valid in L3"),
        );
    }
    let l3h = Matrix::with_names(l3.algebra().clone(), &["1/2", "1"]).unwrap();
    let turquette = "~(p1 -> ~p1) | ~(~p1 -> p1)";
    let r = refuter(&l3h, turquette);
    c.expect(
        r == Some(asg(&[(1, half)])),
        format!("Turquette in <L3,{{1/2,1}}>: {r:?}"),
    );
    c.expect(
        !entails(
            l3h.algebra(),
            l3h.designated_mask(),
            &[],
            &f(turquette, l3h.algebra().signature()),
        ),
        "Turquette not refuted by the truth-table oracle",
    );
    let modal = make_preset("L3modal").unwrap();
    for (lhs, rhs) in [
        ("p1 | p2", "(p1 -> p2) -> p2"),
        ("p1 & p2", "~(~p1 | ~p2)"),
        ("dia(p1)", "~p1 -> p1"),
        ("box(p1)", "~dia(~p1)"),
    ] {
        let (ok, n) = identity_holds(modal.algebra(), lhs, rhs);
        c.expect(ok, format!("identity {lhs} = {rhs} fails"));
        c.note(format!("{lhs} = {rhs}: {n} entries"));
    }
}

fn c3_goedel(c: &mut Check) {
    let g3 = make_preset("G3").unwrap();
    for t in ["((p1 -> p2) -> p1) -> p1", "~~p1 <-> p1"] {
        c.expect(refuter(&g3, t).is_some(), format!("G3 does not refute `{t}`"));
    }
    for t in ["~(p1 & p2) <-> ~p1 | ~p2", "~(p1 | p2) <-> ~p1 & ~p2"] {
        let lib = refuter(&g3, t);
        let oracle = valid(&g3, &f(t, g3.algebra().signature()));
        c.expect(
            lib.is_some(),
            format!("De Morgan law `{t}` is valid in G3 (library {lib:?}, truth-table oracle valid = {oracle})"),
        );
    }
    for n in 2..=6 {
        for name in [format!("G{n}"), format!("LC{n}")] {
            let m = make_preset(&name).unwrap();
            c.expect(
                refuter(&m, "(p1 -> p2) | (p2 -> p1)").is_none(),
                format!("linearity fails in {name}"),
            );
        }
    }
    for n in 2..=4 {
        let big = make_preset(&format!("G{}", n + 1)).unwrap();
        let small = make_preset(&format!("G{n}")).unwrap();
        let r = theorem_inclusion(&big, &small, &Caps::default(), None).unwrap();
        c.expect(
            r.answer == Answer::Yes,
            format!("Thm[G{}] ⊆ Thm[G{n}]: {:?}", n + 1, r.answer),
        );
    }
}

fn c4_examples(c: &mut Check) {
    let caps = Caps::default();
    let tr = load_spec(&data("ex-tr.json")).unwrap();
    let m = &tr.matrices["M"];
    let reps: Vec<String> = representatives(m.algebra(), 1, &caps)
        .unwrap()
        .witnesses()
        .iter()
        .map(|w| w.to_string())
        .collect();
    c.expect(reps == ["p1", "0"], format!("ex-tr representatives {reps:?}"));
    let r = has_theorems(m, &caps).unwrap();
    c.expect(r.answer == Answer::No, format!("ex-tr has_theorems {:?}", r.answer));

    let nt = load_spec(&data("ex-nontr.json")).unwrap();
    let m = &nt.matrices["M"];
    let expected = [
        "p1",
        "0",
        "p1 -> p1",
        "p1 -> 0",
        "(p1 -> 0) -> p1",
        "((p1 -> 0) -> p1) -> p1",
    ];
    let reps: Vec<String> = representatives(m.algebra(), 1, &caps)
        .unwrap()
        .witnesses()
        .iter()
        .map(|w| w.to_string())
        .collect();
    c.expect(reps == expected, format!("ex-nontr representatives {reps:?}"));
    let r = has_theorems(m, &caps).unwrap();
    let witness = match &r.witness {
        Some(Witness::Formula(w)) => w.to_string(),
        other => format!("{other:?}"),
    };
    c.expect(
        r.answer == Answer::Yes && witness == "p1 -> p1",
        format!("ex-nontr has_theorems {:?} {witness}", r.answer),
    );
    let (oracle, depth) = stepwise_representatives(m.algebra(), 1, 4);
    let oracle: Vec<String> = oracle.iter().map(|w| w.to_string()).collect();
    c.expect(oracle == expected, format!("enumeration oracle gives {oracle:?}"));
    c.expect(depth == 4, format!("oracle stabilizes at depth {depth}"));
}

fn boolean_laws() -> Vec<(&'static str, &'static str)> {
    vec![
        ("p1 & p2", "p2 & p1"),
        ("p1 | p2", "p2 | p1"),
        ("p1 & (p2 & p3)", "(p1 & p2) & p3"),
        ("p1 | (p2 | p3)", "(p1 | p2) | p3"),
        ("(p1 & p2) | p2", "p2"),
        ("p1 & (p1 | p2)", "p1"),
        ("p1 & (p2 | p3)", "(p1 & p2) | (p1 & p3)"),
        ("p1 | (p2 & p3)", "(p1 | p2) & (p1 | p3)"),
        ("p1 & top", "p1"),
        ("p1 | top", "top"),
        ("(p1 & ~p1) | p2", "p2"),
        ("(p1 | ~p1) & p2", "p2"),
    ]
}

fn c5_free_algebras(c: &mut Check) {
    let b2 = make_preset("B2").unwrap();
    let caps = Caps::default();
    for (n, size) in [(0, 2), (1, 4), (2, 16)] {
        let fa = free_matrix_algebra(&b2, n, &caps).unwrap();
        let alg = &fa.algebra;
        c.expect(
            alg.size() == size,
            format!("free algebra n={n} has {} elements", alg.size()),
        );
        for (l, r) in boolean_laws() {
            let (ok, _) = identity_holds(alg, l, r);
            c.expect(ok, format!("n={n}: {l} = {r} fails"));
        }
        if n == 1 {
            let lt = fa.functions.iter().position(|t| t.table == [0, 1]);
            let neg = fa.functions.iter().position(|t| t.table == [1, 0]);
            let (Some(p), Some(np)) = (lt, neg) else {
                c.expect(false, "[p] or [~p] missing");
                continue;
            };
            let le = |a: usize, b: usize| alg.apply("&", &[a, b]) == a;
            let bot = alg.constant("bot");
            let top = alg.constant("top");
            c.expect(
                bot != top && le(bot, p) && le(bot, np) && le(p, top) && le(np, top),
                "0 < [p], [~p] < 1",
            );
            c.expect(!le(p, np) && !le(np, p), "[p] and [~p] comparable");
            c.expect(alg.apply("~", &[p]) == np, "[p] and [~p] not complements");
        }
    }
}

fn pairs_of(rng: &mut ChaCha8Rng, sig: &Signature) -> (Matrix, Matrix) {
    (random_matrix(rng, sig, 1, 3), random_matrix(rng, sig, 1, 3))
}

fn c6_decisions(c: &mut Check) {
    let caps = Caps::default();
    let b2 = make_preset("B2").unwrap();
    let l3 = make_preset("L3").unwrap();
    let r = theorem_inclusion(&l3, &b2, &caps, None).unwrap();
    c.expect(r.answer == Answer::Yes, format!("Thm[L3] ⊆ Thm[B2]: {:?}", r.answer));
    let r = theorem_inclusion(&b2, &l3, &caps, None).unwrap();
    c.expect(r.answer == Answer::No, format!("Thm[B2] ⊆ Thm[L3]: {:?}", r.answer));
    match &r.witness {
        Some(Witness::Formula(w)) => {
            c.expect(
                valid(&b2, w) && !valid(&l3, w),
                format!("witness `{w}` does not separate"),
            );
            c.note(format!("B2→L3 witness {w}"));
        }
        other => c.expect(false, format!("no formula witness: {other:?}")),
    }
    let peirce = f("((p1 -> p2) -> p1) -> p1", b2.algebra().signature());
    c.expect(
        valid(&b2, &peirce) && !valid(&l3, &peirce),
        "Peirce does not separate B2 from L3",
    );

    let mut presets: Vec<String> = vec!["B2".into(), "L3".into(), "L3modal".into()];
    for n in 2..=6 {
        presets.push(format!("G{n}"));
        presets.push(format!("LC{n}"));
    }
    for name in &presets {
        let m = make_preset(name).unwrap();
        let r = weak_equivalence(&m, &m, &caps).unwrap();
        c.expect(r.answer == Answer::Yes, format!("{name} ≢ {name}: {:?}", r.answer));
        if m.algebra().size() <= 3 {
            let r = theorem_inclusion_scan(&m, &m, &caps, None).unwrap();
            c.expect(r.answer == Answer::Yes, format!("{name} full scan: {:?}", r.answer));
        }
    }

    let sig = neg_imp();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for pair in 0..10 {
        let (m1, m2) = pairs_of(&mut rng, &sig);
        let prod = combine_matrices(Combination::Product, &m1, &m2).unwrap();
        let sum = combine_matrices(Combination::Sum, &m1, &m2).unwrap();
        let mut probes: Vec<Formula> = Vec::new();
        for alg in [m1.algebra(), m2.algebra(), prod.algebra()] {
            probes.extend(representatives(alg, 1, &caps).unwrap().witnesses());
        }
        probes.extend((0..100).map(|_| random_formula(&mut rng, &sig, 2, 4)));
        for w in &probes {
            let (a, b) = (valid(&m1, w), valid(&m2, w));
            c.expect(
                valid(&prod, w) == (a && b),
                format!("pair {pair}: product identity fails at `{w}`"),
            );
            c.expect(
                valid(&sum, w) == (a || b),
                format!("pair {pair}: sum identity fails at `{w}`"),
            );
        }
    }

    let one = Atlas::with_names(l3.algebra().clone(), &[&["1"]]).unwrap();
    let two = Atlas::with_names(l3.algebra().clone(), &[&["1"], &["1/2", "1"]]).unwrap();
    let sig = l3.algebra().signature();
    let (p, pq, q) = (f("p1", sig), f("p1 -> p2", sig), f("p2", sig));
    c.expect(
        consequence(&one, &[p.clone(), pq.clone()], &q).unwrap().holds(),
        "{p, p->q} / q fails in <L3,{{1}}>",
    );
    c.expect(
        !consequence(&two, &[p.clone(), pq.clone()], &q).unwrap().holds(),
        "{p, p->q} / q holds in <L3,{{1},{1/2,1}}>",
    );
    let r = atlas_inclusion(&one, &two, &caps, None).unwrap();
    c.expect(
        r.answer == Answer::No,
        format!("atlas inclusion one way: {:?}", r.answer),
    );
    match &r.witness {
        Some(Witness::Sequent { premises, conclusion }) => {
            c.expect(
                consequence(&one, premises, conclusion).unwrap().holds()
                    && !consequence(&two, premises, conclusion).unwrap().holds(),
                format!("counterexample {premises:?} / {conclusion} does not re-validate"),
            );
            c.note(format!("atlas counterexample {}", r.witness.as_ref().unwrap()));
        }
        other => c.expect(false, format!("no sequent witness: {other:?}")),
    }
    let r = atlas_inclusion(&two, &one, &caps, None).unwrap();
    c.expect(
        r.answer == Answer::Yes,
        format!("atlas inclusion other way: {:?}", r.answer),
    );
}

fn c7_g3(c: &mut Check) {
    let caps = Caps::default();
    let sig = Signature::boolean();
    let proves = |t: &str| g3_decide(&Sequent::theorem(f(t, &sig)), &caps).unwrap().is_proved();
    c.expect(proves("p1 -> p1"), "p -> p");
    let schemata = [
        "A -> (B -> A)",
        "(A -> B) -> ((A -> (B -> C)) -> (A -> C))",
        "A -> (B -> (A & B))",
        "(A & B) -> A",
        "(A & B) -> B",
        "A -> (A | B)",
        "B -> (A | B)",
        "(A -> C) -> ((B -> C) -> ((A | B) -> C))",
        "(A -> B) -> ((A -> ~B) -> ~A)",
        "B -> (~B -> A)",
    ];
    let instances = [
        ("p1", "p2", "p3"),
        ("(p1 & p2)", "~p3", "(p1 | p3)"),
        ("(p1 -> p2)", "~~p1", "p2"),
    ];
    for s in schemata {
        for (a, b, g) in instances {
            let t = s.replace('A', a).replace('B', b).replace('C', g);
            c.expect(proves(&t), format!("axiom instance `{t}` not proved"));
        }
    }
    let mut prover = G3Prover::new(&caps);
    let pw: Vec<Formula> = (0..=12).map(|n| rn_power(RnIndex::Finite(n), 64).unwrap()).collect();
    for (n, p) in pw.iter().enumerate().take(9) {
        c.expect(!prover.provable(p).unwrap(), format!("p^{n} proved"));
    }
    let mut pairs = 0;
    for i in 0..=8 {
        for j in i..=8 {
            let sim = int_relation_with(&mut prover, IntRelation::Sim, &pw[i], &pw[j]).unwrap();
            c.expect(sim == (i == j), format!("sim(p^{i}, p^{j}) = {sim}"));
            pairs += (i < j) as usize;
        }
    }
    c.note(format!("{pairs} off-diagonal pairs"));
    let mut rel = |kind, a: &Formula, b: &Formula| int_relation_with(&mut prover, kind, a, b).unwrap();
    for n in 0..=2 {
        let (a, b, d) = (&pw[2 * n + 1], &pw[2 * n + 3], &pw[2 * n]);
        c.expect(
            rel(IntRelation::Sim, &Formula::and(a.clone(), b.clone()), d),
            format!("(e) n={n}"),
        );
        c.expect(
            rel(IntRelation::Sim, &Formula::imp(a.clone(), b.clone()), b),
            format!("(g) n={n}"),
        );
        c.expect(
            rel(IntRelation::Sim, &Formula::imp(b.clone(), a.clone()), a),
            format!("(h) n={n}"),
        );
        for gap in [4, 5, 6] {
            c.expect(
                rel(IntRelation::Ll, &pw[n], &pw[n + gap]),
                format!("(l) p^{n} ≪ p^{}", n + gap),
            );
        }
        let m = Formula::imp(Formula::imp(a.clone(), d.clone()), d.clone());
        c.expect(rel(IntRelation::Sim, &m, a), format!("(m) n={n}"));
        let printed = Formula::imp(Formula::imp(a.clone(), pw[n].clone()), pw[n].clone());
        let holds = rel(IntRelation::Sim, &printed, a);
        c.note(format!(
            "(m) with p^n in place of p^(2n): n={n} {}",
            if holds { "holds" } else { "fails" }
        ));
    }
    for (t, want) in [("~~~p1", 1), ("~~p1", 3), ("p1 | ~p1", 4)] {
        let got = rn_classify(&f(t, &sig), 16, &caps).unwrap();
        c.expect(
            got == RnClass::Index(RnIndex::Finite(want)),
            format!("rn_classify({t}) = {got:?}, expected {want}"),
        );
    }
}

fn c8_glivenko(c: &mut Check) {
    let sig = Signature::boolean();
    let b2 = make_preset("B2").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut agree, mut tautologies) = (0, 0);
    const N: usize = 200;
    for _ in 0..N {
        let g = random_formula(&mut rng, &sig, 2, 4);
        let (classical, int) = glivenko_check(&g, &Caps::default()).unwrap();
        let oracle = valid(&b2, &g);
        c.expect(
            classical == oracle,
            format!("B2 validity of `{g}` disagrees with the oracle"),
        );
        tautologies += classical as usize;
        if classical == int {
            agree += 1;
        } else {
            c.expect(false, format!("Glivenko fails at `{g}`"));
        }
    }
    let rate = agree as f64 / N as f64;
    c.expect(rate >= GLIVENKO_AGREEMENT, format!("agreement {rate}"));
    c.note(format!("{agree}/{N} agree, {tautologies} tautologies"));
}

fn c9_equational(c: &mut Check) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut agree, mut derivable) = (0, 0);
    const N: usize = 100;
    for _ in 0..N {
        let (premises, goal) = random_ground_instance(&mut rng, 6);
        let cc = decide_ground_equational(&premises, &goal).unwrap().derivable;
        let brute = e1_search(&premises, &goal, 64);
        derivable += cc as usize;
        if cc == brute {
            agree += 1;
        } else {
            c.expect(false, format!("ground disagreement on {premises:?} ⊢ {goal}"));
        }
    }
    let rate = agree as f64 / N as f64;
    c.expect(rate >= GROUND_AGREEMENT, format!("ground agreement {rate}"));
    c.note(format!("{agree}/{N} agree, {derivable} derivable"));

    let b2 = make_preset("B2").unwrap();
    let sig = b2.algebra().signature();
    let prem = [Equality::parse("p1 ~ top", sig).unwrap()];
    let goal = Equality::parse("p1 ~ ~top", sig).unwrap();
    let family = [b2.algebra().clone()];
    let e = eq_consequence(EqMode::E, &family, &prem, &goal, &Caps::default()).unwrap();
    let top = b2.algebra().constant("top");
    c.expect(
        e == EqVerdict::Fails {
            algebra: 0,
            assignment: asg(&[(1, top)]),
        },
        format!("mode E: {e:?}"),
    );
    let el = eq_consequence(EqMode::EL, &family, &prem, &goal, &Caps::default()).unwrap();
    c.expect(el.holds(), format!("mode EL: {el:?}"));

    let sig = Signature::boolean_with_constants();
    let dist = Equality::parse("p1 & (p2 | p3) ~ (p1 & p2) | (p1 & p3)", &sig).unwrap();
    c.expect(
        bridge_implicational(Bridge::EB, &[], &dist, &Caps::default()).unwrap(),
        "EB does not prove distributivity",
    );
    let dn = Equality::parse("~~p1 ~ p1", &sig).unwrap();
    c.expect(
        !bridge_implicational(Bridge::EH, &[], &dn, &Caps::default()).unwrap(),
        "EH proves double negation",
    );
}

fn run_property(c: &mut Check, name: &str, seed: u8, test: impl Fn(&mut ChaCha8Rng) -> Result<(), TestCaseError>) {
    let config = Config {
        cases: PROPTEST_CASES,
        failure_persistence: None,
        rng_seed: proptest::test_runner::RngSeed::Fixed(seed as u64),
        ..Config::default()
    };
    let mut runner = TestRunner::new(config);
    let start = Instant::now();
    let cases = std::cell::Cell::new(0u32);
    let result = runner.run(&proptest::num::u64::ANY, |s| {
        cases.set(cases.get() + 1);
        test(&mut ChaCha8Rng::seed_from_u64(s))
    });
    c.expect(result.is_ok(), format!("{name}: {result:?}"));
    c.expect(
        cases.get() >= PROPTEST_CASES,
        format!("{name}: only {} cases ran", cases.get()),
    );
    c.note(format!(
        "{name}: {} cases {:.2}s",
        cases.get(),
        start.elapsed().as_secs_f64()
    ));
}

/// Largest `n` for which `n`-ary clones over a `k`-element algebra stay small.
fn arity_for(k: usize) -> usize {
    if k <= 2 {
        2
    } else {
        1
    }
}

fn c10_properties(c: &mut Check) {
    let sig = neg_imp();
    let caps = Caps::default();

    run_property(c, "consequence reflexivity and monotonicity", 1, |rng| {
        let m = random_matrix(rng, &sig, 1, 3);
        let xs: Vec<Formula> = (0..rng.random_range(1..=3))
            .map(|_| random_formula(rng, &sig, 3, 3))
            .collect();
        let goal = random_formula(rng, &sig, 3, 3);
        let extra = random_formula(rng, &sig, 3, 3);
        let pick = xs[rng.random_range(0..xs.len())].clone();
        if !consequence(&m, &xs, &pick).unwrap().holds() {
            return Err(TestCaseError::fail("reflexivity"));
        }
        let base = consequence(&m, &xs, &goal).unwrap().holds();
        if base != entails(m.algebra(), m.designated_mask(), &xs, &goal) {
            return Err(TestCaseError::fail("consequence disagrees with the oracle"));
        }
        let mut more = xs.clone();
        more.push(extra);
        if base && !consequence(&m, &more, &goal).unwrap().holds() {
            return Err(TestCaseError::fail("monotonicity"));
        }
        Ok(())
    });

    run_property(
        c,
        "indistinguishability is a congruence closed under substitution",
        2,
        |rng| {
            let k = rng.random_range(1..=3);
            let n = arity_for(k);
            let alg = random_algebra(rng, &sig, k);
            let g1 = random_formula(rng, &sig, n as u32, 3);
            let reps = representatives(&alg, n, &caps).unwrap();
            let g2 = reps.representative_of(&alg, &g1).unwrap().witness.clone();
            if !indistinguishable(&alg, &g1, &g2, n).unwrap() {
                return Err(TestCaseError::fail("representative not indistinguishable"));
            }
            let h = random_formula(rng, &sig, n as u32, 2);
            let s = Substitution::from_bindings((1..=n as u32).map(|v| (v, random_formula(rng, &sig, n as u32, 2))));
            let pairs = [
                (Formula::not(g1.clone()), Formula::not(g2.clone())),
                (Formula::imp(g1.clone(), h.clone()), Formula::imp(g2.clone(), h.clone())),
                (Formula::imp(h.clone(), g1.clone()), Formula::imp(h, g2.clone())),
                (g1.substitute(&s), g2.substitute(&s)),
            ];
            for (a, b) in &pairs {
                if table(&alg, a, n) != table(&alg, b, n) {
                    return Err(TestCaseError::fail(format!("{a} vs {b}")));
                }
            }
            Ok(())
        },
    );

    run_property(c, "clone closure", 3, |rng| {
        let k = rng.random_range(1..=3);
        let n = rng.random_range(1..=arity_for(k));
        let alg = random_algebra(rng, &sig, k);
        let clone = clone_functions(&alg, n, &caps).unwrap();
        let tables: std::collections::HashSet<Vec<u16>> = clone.iter().map(|t| t.table.clone()).collect();
        for v in 1..=n {
            let proj: Vec<u16> = table(&alg, &Formula::var(v as u32), n)
                .iter()
                .map(|&x| x as u16)
                .collect();
            if !tables.contains(&proj) {
                return Err(TestCaseError::fail("projection missing"));
            }
        }
        for _ in 0..10 {
            let a = &clone[rng.random_range(0..clone.len())];
            let b = &clone[rng.random_range(0..clone.len())];
            let neg: Vec<u16> = a.table.iter().map(|&x| alg.apply("~", &[x as usize]) as u16).collect();
            let imp: Vec<u16> = a
                .table
                .iter()
                .zip(&b.table)
                .map(|(&x, &y)| alg.apply("->", &[x as usize, y as usize]) as u16)
                .collect();
            if !tables.contains(&neg) || !tables.contains(&imp) {
                return Err(TestCaseError::fail("not closed"));
            }
        }
        Ok(())
    });

    run_property(c, "representative completeness at depth ≤ 4", 4, |rng| {
        let k = rng.random_range(1..=3);
        let n = rng.random_range(1..=arity_for(k));
        let alg = random_algebra(rng, &sig, k);
        let reps = representatives(&alg, n, &caps).unwrap();
        for _ in 0..5 {
            let g = random_formula(rng, &sig, n as u32, 4);
            let t = table(&alg, &g, n);
            let hits: Vec<_> = reps
                .entries
                .iter()
                .filter(|r| r.table.iter().map(|&x| x as usize).eq(t.iter().copied()))
                .collect();
            if hits.len() != 1 || hits[0].witness.depth() > g.depth() {
                return Err(TestCaseError::fail(format!(
                    "`{g}` matched {} representatives",
                    hits.len()
                )));
            }
        }
        Ok(())
    });

    run_property(c, "greatest compatible congruence", 5, |rng| {
        let m = random_matrix(rng, &sig, 1, 4);
        let alg = m.algebra();
        let omega = greatest_compatible_congruence(&m);
        if !compatible(alg, omega.labels()) || !omega.saturates(m.designated_mask()) {
            return Err(TestCaseError::fail("not a compatible congruence"));
        }
        let base: Vec<(usize, usize)> = (0..alg.size())
            .flat_map(|a| (0..alg.size()).map(move |b| (a, b)))
            .filter(|&(a, b)| omega.related(a, b))
            .collect();
        for a in 0..alg.size() {
            for b in a + 1..alg.size() {
                if omega.related(a, b) {
                    continue;
                }
                let mut pairs = base.clone();
                pairs.push((a, b));
                let bigger: Congruence = congruence_generated(alg, &pairs).unwrap();
                if bigger.saturates(m.designated_mask()) {
                    return Err(TestCaseError::fail(format!("not greatest: ({a}, {b}) can be merged")));
                }
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance() {
    type Criterion = (usize, &'static str, Duration, fn(&mut Check));
    let criteria: [Criterion; 10] = [
        (1, "B2 tautologies", DEFAULT_LIMIT, c1_b2_tautologies),
        (2, "Łukasiewicz L3", DEFAULT_LIMIT, c2_lukasiewicz),
        (3, "Gödel and LC chains", DEFAULT_LIMIT, c3_goedel),
        (4, "ex-tr and ex-nontr", DEFAULT_LIMIT, c4_examples),
        (5, "free Boolean algebras", FREE_ALGEBRA_LIMIT, c5_free_algebras),
        (6, "decision procedures", DEFAULT_LIMIT, c6_decisions),
        (7, "G3 and the Rieger-Nishimura ladder", RN_LIMIT, c7_g3),
        (8, "Glivenko", DEFAULT_LIMIT, c8_glivenko),
        (9, "equational logic", DEFAULT_LIMIT, c9_equational),
        (10, "metaproperties", DEFAULT_LIMIT * 6, c10_properties),
    ];
    let mut results: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (id, name, limit, run) in criteria {
        let mut c = Check::default();
        let start = Instant::now();
        run(&mut c);
        let took = start.elapsed();
        c.expect(took <= limit, format!("took {took:?}, limit {limit:?}"));
        let status = if c.failures.is_empty() { "PASS" } else { "FAIL" };
        let mut line = format!("{status} criterion {id}: {name} ({:.2}s", took.as_secs_f64());
        for n in &c.notes {
            line.push_str("; ");
            line.push_str(n);
        }
        line.push(')');
        println!("{line}");
        for fail in &c.failures {
            println!("    - {fail}");
        }
        results.insert(id, c.failures);
    }
    for (id, failures) in &results {
        match KNOWN_UNATTAINABLE.iter().find(|(k, _)| k == id) {
            Some((_, tag)) => {
                assert!(!failures.is_empty(), "criterion {id} was expected to fail but passed");
                assert!(
                    failures.iter().all(|f| f.contains(tag)),
                    "criterion {id} has unexpected failures: {failures:?}"
                );
            }
            None => assert!(failures.is_empty(), "criterion {id} failed: {failures:?}"),
        }
    }
}
