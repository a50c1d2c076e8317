use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use polyadic::alggeo::{
    coordinate_group, minimal_subsystem, solve, theorem63_check, EquationSystem, Zariski,
};
use polyadic::catalog;
use polyadic::cosets::coset_enumerate;
use polyadic::cover::{build_post_cover, presentation_to_group, PolyadicPresentation};
use polyadic::group::are_isomorphic;
use polyadic::polyadic::{
    dornte_check, homs_by_search, hosszu_gloskin, polyadic_homs, retract, skew_by_search, verify_axioms,
};
use polyadic::terms::{eval_group_term, group_equation_to_polyadic, Equation, GroupEquation, GroupTerm, PolyadicTerm};
use polyadic::words::{f_free, in_free_polyadic, skew_free, FreeWord, PolyadicFreeWord, Symbol};
use polyadic::{Automorphism, Limits, NaryOperation, NaryTable, PolyadicGroup};

const RANDOM_FREE_WORD_CASES: usize = 1000;
const UNION_PAIRS_PER_ENTRY: usize = 40;
const CLOSURE_SUBSETS_PER_SPACE: usize = 60;
const CLOSURE_MAX_POINTS: usize = 27;
const MINSYS_CASES: usize = 100;
const COVER_QUOTIENT_SYSTEMS: [&str; 3] = ["x1 = ~x1", "f(x1,x1,x1) = x1", "f(x1,x1,~x1) = ~x1"];
const COVER_QUOTIENT_TIME_LIMIT: Duration = Duration::from_secs(60);
const SEED: u64 = 0x5eed;

/// Criteria expected to fail because the catalog they quantify over contains an invalid entry.
const KNOWN_FAILURES: [u32; 1] = [1];

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(detail: impl Into<String>) -> Outcome {
    Outcome { pass: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { pass: false, detail: detail.into() }
}

fn limits() -> Limits {
    Limits::default()
}

fn mutations_all_detected(p: &PolyadicGroup) -> Result<usize, String> {
    let table = p.tabulate(&limits()).map_err(|e| e.to_string())?;
    let order = p.order();
    let mut checked = 0;
    for index in 0..table.cells().len() {
        let original = table.cells()[index];
        for delta in 1..order {
            let mut t = table.clone();
            t.set_cell(index, (original + delta) % order);
            let report = verify_axioms(&t, &limits()).map_err(|e| e.to_string())?;
            if report.passed() {
                return Err(format!("mutation of cell {index} to {} undetected", (original + delta) % order));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    let mut all = true;
    for (label, entry) in catalog::standard() {
        match entry {
            Ok(p) => {
                let axioms = verify_axioms(&p, &limits()).expect("within caps");
                let dornte = dornte_check(&p).expect("skews exist");
                let mutations = mutations_all_detected(&p);
                if !axioms.passed() || dornte.is_some() || mutations.is_err() {
                    all = false;
                    notes.push(format!("{label}: axioms={} dornte={:?} {:?}", axioms.passed(), dornte, mutations));
                } else {
                    notes.push(format!("{label} ok ({} mutations caught)", mutations.unwrap()));
                }
            }
            Err(e) => {
                all = false;
                let witness = raw_s3_witness();
                notes.push(format!("{label}: {e}; raw formula table: {witness}"));
            }
        }
    }
    let substitute = catalog::s3_inner(4).expect("valid at n = 4");
    let sub_ok = verify_axioms(&substitute, &limits()).expect("within caps").passed()
        && dornte_check(&substitute).expect("skews exist").is_none();
    match (sub_ok, mutations_all_detected(&substitute)) {
        (true, Ok(k)) => notes.push(format!("substitute der(S3,inner(12),(12),4) ok ({k} mutations caught)")),
        (_, r) => notes.push(format!("substitute der(S3,inner(12),(12),4) fails: axioms={sub_ok} {r:?}")),
    }
    Outcome { pass: all, detail: notes.join("; ") }
}

/// The literal formula `x·θ(y)·θ²(z)·b` for `S3`, `θ` = conjugation by (12), `b` = (12).
fn raw_s3_witness() -> String {
    let g = catalog::symmetric3();
    let s = g.index_of("(12)").expect("named");
    let theta = Automorphism::inner(&g, s);
    let mut cells = Vec::new();
    for x in g.elements() {
        for y in g.elements() {
            for z in g.elements() {
                cells.push(g.mul(g.mul(g.mul(x, theta.apply(y)), theta.apply(theta.apply(z))), s));
            }
        }
    }
    let table = NaryTable::new(g.names().to_vec(), 3, cells).expect("shape");
    let report = verify_axioms(&table, &limits()).expect("within caps");
    match report.associativity {
        Some(w) => format!("associativity fails at {:?}", w.tuple),
        None if report.passed() => "passes".into(),
        None => "solvability fails".into(),
    }
}

fn criterion_2() -> Outcome {
    for (label, p) in catalog::constructible() {
        for x in 0..p.order() {
            let brute = skew_by_search(&p, x).expect("exists");
            if brute != p.skew_of(x) {
                return fail(format!("{label}: skew of {x} is {} by closed form, {brute} by search", p.skew_of(x)));
            }
        }
    }
    let p = catalog::z3_negation();
    let skews = p.skew_table();
    if skews != vec![0, 1, 2] {
        return fail(format!("der(Z3,2x,0,3) skew table {skews:?}"));
    }
    ok("closed form = search on all constructible entries; der(Z3,2x,0,3) skew = identity")
}

fn criterion_3() -> Outcome {
    let mut anchors = 0;
    for (label, p) in catalog::constructible() {
        for a in 0..p.order() {
            match hosszu_gloskin(&p, a, &limits()) {
                Ok(r) => {
                    let g = &r.group;
                    let top = r.theta.pow(p.arity() - 1);
                    let conj = Automorphism::inner(g, r.b);
                    if r.theta.apply(r.b) != r.b || top.images() != conj.images() {
                        return fail(format!("{label} anchor {a}: recovered conditions fail"));
                    }
                    anchors += 1;
                }
                Err(e) => return fail(format!("{label} anchor {a}: {e}")),
            }
        }
    }
    ok(format!("{anchors} anchors reconstruct f with zero mismatches"))
}

fn criterion_4() -> Outcome {
    for (label, p) in catalog::constructible() {
        let retracts: Vec<_> = (0..p.order()).map(|a| retract(&p, a).expect("retract")).collect();
        for i in 0..retracts.len() {
            for j in i + 1..retracts.len() {
                if are_isomorphic(&retracts[i], &retracts[j], &limits()).expect("caps").is_none() {
                    return fail(format!("{label}: retracts over {i} and {j} not isomorphic"));
                }
            }
        }
    }
    ok("all retract pairs isomorphic with witnesses")
}

fn criterion_5() -> Outcome {
    for (label, p) in catalog::constructible() {
        match build_post_cover(&p, &limits()) {
            Ok(c) if c.group().order() == (p.arity() - 1) * p.order() => {}
            Ok(c) => return fail(format!("{label}: cover order {}", c.group().order())),
            Err(e) => return fail(format!("{label}: {e}")),
        }
    }
    let z6 = build_post_cover(&catalog::z3_identity(), &limits()).expect("cover");
    let s3 = build_post_cover(&catalog::z3_negation(), &limits()).expect("cover");
    let a = are_isomorphic(z6.group(), &catalog::cyclic(6), &limits()).expect("caps");
    let b = are_isomorphic(s3.group(), &catalog::symmetric3(), &limits()).expect("caps");
    if a.is_none() || b.is_none() {
        return fail(format!("Z6 witness {}, S3 witness {}", a.is_some(), b.is_some()));
    }
    ok("five properties on all constructible entries; Z6 and S3 witnessed")
}

fn criterion_6() -> Outcome {
    let n = 3;
    let pres = PolyadicPresentation::parse(&["x"], &["~x = x"], n).expect("parses");
    let cover = presentation_to_group(&pres, n).expect("coefficient-free");
    let order = match coset_enumerate(&cover.presentation, 1000) {
        Ok(t) => t.group.order(),
        Err(e) => return fail(format!("cosets: {e}")),
    };
    if order != n - 1 {
        return fail(format!("<x | ~x = x> gives order {order}"));
    }
    let pres = PolyadicPresentation::parse(&["x", "y"], &["f(x,y,x) = f(y,x,x)"], n).expect("parses");
    let rels: Vec<FreeWord> = presentation_to_group(&pres, n).expect("ok").presentation.relators;
    let commutator = FreeWord::parse("x y x^-1 y^-1").expect("parses");
    if rels != vec![commutator] {
        return fail(format!("commutator example gives {rels:?}"));
    }
    let pres = PolyadicPresentation::parse(&["x", "y"], &["~x = x"], n).expect("parses");
    let out = presentation_to_group(&pres, n).expect("ok");
    let expected = FreeWord::parse(&format!("x^{}", 1 - n as i64)).expect("parses");
    if out.presentation.relators != vec![expected] || out.presentation.generators.len() != 2 {
        return fail(format!("<x,y | ~x = x> gives {:?}", out.presentation.relators));
    }
    ok("order 2; commutator relator; x^-2 with y free")
}

fn criterion_7() -> Outcome {
    let cases = [
        ("der(Z3,id,0,3)", catalog::z3_identity()),
        ("der(Z3,2x,0,3)", catalog::z3_negation()),
    ];
    let mut counts = Vec::new();
    for (label, p) in cases {
        let via_pairs: BTreeSet<Vec<usize>> =
            polyadic_homs(&p, &p, &limits()).expect("ok").into_iter().map(|h| h.images).collect();
        let brute: BTreeSet<Vec<usize>> = homs_by_search(&p, &p, &limits()).expect("ok").into_iter().collect();
        if via_pairs != brute {
            return fail(format!("{label}: {} via (a,φ) vs {} by search", via_pairs.len(), brute.len()));
        }
        counts.push(format!("{label}: {}", brute.len()));
    }
    ok(counts.join(", "))
}

fn random_free_word(rng: &mut StdRng, max_len: usize) -> FreeWord {
    let names = ["x", "y", "z"];
    let len = rng.gen_range(0..=max_len);
    FreeWord::reduce((0..len).map(|_| {
        let sym = Symbol::new(names[rng.gen_range(0..names.len())]);
        (sym, if rng.gen_bool(0.5) { 1 } else { -1 })
    }))
}

fn random_polyadic_word(rng: &mut StdRng, n: usize) -> FreeWord {
    let w = random_free_word(rng, 8);
    let fix = (1 - w.height()).rem_euclid(n as i64 - 1);
    w.mul(&FreeWord::power_of(Symbol::new("x"), fix))
}

fn criterion_8() -> Outcome {
    let w = FreeWord::parse("x^2 y^-1 x y^2").expect("parses");
    if w.height() != 4 || !in_free_polyadic(&w, 4) {
        return fail(format!("height {} membership {}", w.height(), in_free_polyadic(&w, 4)));
    }
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut assoc_failures = 0;
    for case in 0..RANDOM_FREE_WORD_CASES {
        let n = 3 + case % 3;
        let ws: Vec<FreeWord> = (0..2 * n - 1).map(|_| random_polyadic_word(&mut rng, n)).collect();
        let values: Vec<FreeWord> = (0..n)
            .map(|i| {
                let inner = f_free(n, &ws[i..i + n]).expect("heights").into_word();
                let mut outer = ws[..i].to_vec();
                outer.push(inner);
                outer.extend_from_slice(&ws[i + n..]);
                f_free(n, &outer).expect("heights").into_word()
            })
            .collect();
        if values.windows(2).any(|v| v[0] != v[1]) {
            assoc_failures += 1;
        }
    }
    let mut skew_failures = 0;
    for case in 0..RANDOM_FREE_WORD_CASES {
        let n = 3 + case % 3;
        let x = PolyadicFreeWord::new(random_polyadic_word(&mut rng, n), n).expect("height fixed");
        let mut args = vec![x.word().clone(); n - 1];
        args.push(skew_free(&x).into_word());
        if f_free(n, &args).expect("heights").word() != x.word() {
            skew_failures += 1;
        }
    }
    let detail = format!("ht = 4; associativity failures {assoc_failures}/{RANDOM_FREE_WORD_CASES}; skew failures {skew_failures}/{RANDOM_FREE_WORD_CASES}");
    if assoc_failures == 0 && skew_failures == 0 {
        ok(detail)
    } else {
        fail(detail)
    }
}

fn criterion_9() -> Outcome {
    let p = catalog::z3_negation();
    let mut checked = 0;
    for b in 0..p.order() {
        for c in 0..p.order() {
            let left = GroupTerm::Product(vec![
                GroupTerm::Const(b),
                GroupTerm::Power(Box::new(GroupTerm::Var(0)), 2),
                GroupTerm::Inverse(Box::new(GroupTerm::Var(1))),
                GroupTerm::Const(c),
                GroupTerm::Var(0),
            ]);
            let e = GroupEquation { left, right: GroupTerm::Identity };
            for a in 0..p.order() {
                let r = retract(&p, a).expect("retract");
                let t = group_equation_to_polyadic(&e, a, &p);
                if !matches!(t.left, PolyadicTerm::Apply(ref args) if args.iter().any(|s| matches!(s, PolyadicTerm::Apply(_)))) {
                    return fail(format!("translation is not nested: {}", t.render(&p)));
                }
                for x in 0..p.order() {
                    for y in 0..p.order() {
                        let pt = [x, y];
                        let in_group = eval_group_term(&e.left, &pt, &r).expect("bound")
                            == eval_group_term(&e.right, &pt, &r).expect("bound");
                        if in_group != t.holds_at(&pt, &p).expect("bound") {
                            return fail(format!("b={b} c={c} anchor {a} point {pt:?}"));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    ok(format!("{checked} (b, c, anchor, point) cases agree"))
}

fn random_term(rng: &mut StdRng, depth: usize, arity: usize, vars: usize, order: usize) -> PolyadicTerm {
    let roll = rng.gen_range(0..10);
    if depth == 0 || roll < 4 {
        if roll % 2 == 0 || vars == 0 {
            PolyadicTerm::Const(rng.gen_range(0..order))
        } else {
            PolyadicTerm::Var(rng.gen_range(0..vars))
        }
    } else if roll < 6 {
        PolyadicTerm::skew(random_term(rng, depth - 1, arity, vars, order))
    } else {
        PolyadicTerm::Apply((0..arity).map(|_| random_term(rng, depth - 1, arity, vars, order)).collect())
    }
}

fn random_system(rng: &mut StdRng, p: &impl NaryOperation, vars: usize, max_eqs: usize) -> EquationSystem {
    let count = rng.gen_range(1..=max_eqs);
    let eqs = (0..count)
        .map(|_| {
            Equation::new(
                random_term(rng, 2, p.arity(), vars, p.order()),
                random_term(rng, 2, p.arity(), vars, p.order()),
            )
        })
        .collect();
    EquationSystem::new(vars, eqs).expect("variables in range")
}

fn criterion_10() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 10);
    let mut coordinate_groups = 0;
    for (label, p) in catalog::constructible() {
        let max_m = if p.order() <= 4 { 3 } else { 2 };
        for k in 0..UNION_PAIRS_PER_ENTRY {
            let m = 1 + k % max_m;
            let s1 = random_system(&mut rng, &p, m, 2);
            let s2 = random_system(&mut rng, &p, m, 2);
            let v1 = solve(&p, &s1, &limits()).expect("caps");
            let v2 = solve(&p, &s2, &limits()).expect("caps");
            let v12 = solve(&p, &s1.union(&s2), &limits()).expect("caps");
            if v12 != v1.intersection(&v2) {
                return fail(format!("{label}: V(S1 ∪ S2) != V(S1) ∩ V(S2)"));
            }
            if m == 1 || p.order() == 3 {
                let cg = match coordinate_group(&p, &v12, &limits()) {
                    Ok(cg) => cg,
                    Err(e) => return fail(format!("{label}: coordinate group: {e}")),
                };
                if cg.structure_witness().expect("derivation").is_none() {
                    return fail(format!("{label}: coordinate group of {} points has no structural witness", v12.len()));
                }
                coordinate_groups += 1;
            }
        }
    }

    let mut spaces = 0;
    for (label, p) in catalog::constructible() {
        for m in 1..=3usize {
            let points = p.order().pow(m as u32);
            if points > CLOSURE_MAX_POINTS {
                break;
            }
            let z = match Zariski::new(&p, m, &limits()) {
                Ok(z) => z,
                Err(e) => return fail(format!("{label} m={m}: {e}")),
            };
            let subsets: Vec<Vec<usize>> = if points <= 9 {
                (0..1u32 << points).map(|mask| (0..points).filter(|&i| mask >> i & 1 == 1).collect()).collect()
            } else {
                (0..CLOSURE_SUBSETS_PER_SPACE)
                    .map(|_| {
                        let density = rng.gen_range(0.05..0.6);
                        (0..points).filter(|_| rng.gen_bool(density)).collect()
                    })
                    .collect()
            };
            for a in &subsets {
                let ca = z.closure_indices(a);
                if !a.iter().all(|x| ca.contains(x)) || z.closure_indices(&ca) != ca {
                    return fail(format!("{label} m={m}: closure not extensive/idempotent at {a:?}"));
                }
                let extra: Vec<usize> = (0..points).filter(|_| rng.gen_bool(0.2)).collect();
                let mut b: Vec<usize> = a.iter().copied().chain(extra).collect();
                b.sort_unstable();
                b.dedup();
                let cb = z.closure_indices(&b);
                if !ca.iter().all(|x| cb.contains(x)) {
                    return fail(format!("{label} m={m}: closure not monotone"));
                }
            }
            spaces += 1;
        }
    }

    let p = catalog::z3_negation();
    for k in 0..MINSYS_CASES {
        let m = 1 + k % 2;
        let s = random_system(&mut rng, &p, m, 5);
        let min = minimal_subsystem(&p, &s, &limits()).expect("caps");
        if solve(&p, &min, &limits()).expect("caps") != solve(&p, &s, &limits()).expect("caps") {
            return fail("minimal subsystem changes V");
        }
    }
    ok(format!(
        "union law on {} pairs; closure laws on {spaces} spaces; {coordinate_groups} coordinate groups structured; {MINSYS_CASES} minimal subsystems",
        UNION_PAIRS_PER_ENTRY * catalog::constructible().len()
    ))
}

fn criterion_11() -> Outcome {
    let p = catalog::z3_negation();
    let mut notes = Vec::new();
    for src in COVER_QUOTIENT_SYSTEMS {
        let s = EquationSystem::parse(src, 1, &p).expect("parses");
        let start = Instant::now();
        let r = match theorem63_check(&p, &s, &limits()) {
            Ok(r) => r,
            Err(e) => return fail(format!("{src}: {e}")),
        };
        let took = start.elapsed();
        if !r.holds() || took > COVER_QUOTIENT_TIME_LIMIT {
            return fail(format!("{src}: holds={} failure={:?} time={took:?}", r.holds(), r.failure));
        }
        notes.push(format!("{{{src}}}: |cover|={} onto |Γ*|={}", r.cover_order, r.cover_coordinate_order));
    }
    ok(notes.join("; "))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "axiom suite", criterion_1),
        (2, "skew oracle", criterion_2),
        (3, "Hosszú–Gloskin round trip", criterion_3),
        (4, "retract isomorphism", criterion_4),
        (5, "Post cover", criterion_5),
        (6, "presentation pipeline", criterion_6),
        (7, "homomorphism enumeration", criterion_7),
        (8, "free words", criterion_8),
        (9, "equation translation", criterion_9),
        (10, "algebraic geometry", criterion_10),
        (11, "cover of coordinate group", criterion_11),
    ];
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let out = run();
        let status = match (out.pass, KNOWN_FAILURES.contains(&id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("{status} {id:>2} {name} [{:.2?}]: {}", start.elapsed(), out.detail);
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
