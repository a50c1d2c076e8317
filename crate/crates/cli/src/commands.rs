//! One library operation per verb. Each verb returns a JSON document.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde_json::{json, Value};

use polyadic::alggeo::{
    coordinate_group, minimal_subsystem, solve, theorem63_check, AlgebraicSet, EquationSystem, Zariski,
};
use polyadic::cosets::coset_enumerate;
use polyadic::cover::{build_post_cover, presentation_to_group};
use polyadic::polyadic::{
    dornte_check, hosszu_gloskin, nary_identity, polyadic_homs, polyadic_subgroups, retract, verify_axioms,
    AxiomReport, SolvabilityWitness,
};
use polyadic::terms::{group_equation_to_polyadic, polyadic_equation_to_group, Equation, GroupEquation};
use polyadic::words::{in_free_polyadic, FreeWord};
use polyadic::{Automorphism, FiniteGroup, Limits, NaryOperation, PolyadicError, PolyadicGroup};

use crate::formats::{
    FormatError, GroupFile, GroupPresentationFile, PolyadicFile, PresentationFile, RawPolyadic, SystemFile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Verb {
    Validate,
    Derive,
    Skew,
    Retract,
    Hg,
    Identity,
    Subgroups,
    Homs,
    Postcover,
    Present2group,
    Cosets,
    Freereduce,
    Translate,
    Solve,
    Coordgroup,
    Closure,
    Irreducible,
    Minsys,
    Thm63,
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub group: Option<PathBuf>,
    pub polyadic: Vec<PathBuf>,
    pub system: Option<PathBuf>,
    pub presentation: Option<PathBuf>,
    pub n: Option<usize>,
    pub anchor: Option<String>,
    pub cap: Option<usize>,
    pub vars: Option<usize>,
    pub args: Vec<String>,
}

pub const DEFAULT_COSET_CAP: usize = 100_000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input: exit status 2.
    #[error("{0}")]
    Input(String),
    /// A mathematical failure report: the document is still printed, exit status 1.
    #[error("{message}")]
    Failure { message: String, document: Value },
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn failure(message: impl Into<String>, document: Value) -> CliError {
    CliError::Failure { message: message.into(), document }
}

fn require<'a, T>(v: &'a Option<T>, flag: &str, verb: Verb) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::Input(format!("{} requires {flag}", verb_name(verb))))
}

pub fn verb_name(verb: Verb) -> String {
    verb.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn names_of(op: &impl NaryOperation, xs: &[usize]) -> Vec<String> {
    xs.iter().map(|&x| op.name(x).to_string()).collect()
}

fn group_names(g: &FiniteGroup, xs: &[usize]) -> Vec<String> {
    xs.iter().map(|&x| g.name(x).to_string()).collect()
}

fn load_raw(path: &Path) -> Result<Result<RawPolyadic, polyadic::GroupError>, CliError> {
    let (file, origin) = PolyadicFile::load(path)?;
    Ok(file.resolve(&origin)?)
}

/// Loads a polyadic file; algebraic defects are input errors here (only `validate` reports them).
fn load_polyadic(path: &Path, limits: &Limits) -> Result<PolyadicGroup, CliError> {
    let raw = load_raw(path)?.map_err(|e| input(format!("{}: not a group: {e}", path.display())))?;
    let built = match raw {
        RawPolyadic::Derived { group, theta, b, n } => {
            let theta = Automorphism::new(&group, theta)
                .map_err(|e| input(format!("{}: theta is not an automorphism: {e}", path.display())))?;
            PolyadicGroup::derive(group, theta, b, n, limits)
        }
        RawPolyadic::Table(t) => PolyadicGroup::from_table(t, limits),
    };
    built.map_err(|e| input(format!("{}: not a polyadic group: {e}", path.display())))
}

fn first_polyadic<'a>(opts: &'a Options, verb: Verb) -> Result<&'a PathBuf, CliError> {
    opts.polyadic.first().ok_or_else(|| CliError::Input(format!("{} requires --polyadic", verb_name(verb))))
}

fn anchor(p: &impl NaryOperation, opts: &Options) -> Result<usize, CliError> {
    match &opts.anchor {
        None => Ok(0),
        Some(name) => (0..p.order())
            .find(|&x| p.name(x) == name)
            .ok_or_else(|| CliError::Input(format!("--anchor: unknown element '{name}'"))),
    }
}

fn group_doc(g: &FiniteGroup) -> Value {
    serde_json::to_value(GroupFile::from_group(g, None)).expect("serializable")
}

fn polyadic_doc(file: &PolyadicFile) -> Value {
    serde_json::to_value(file).expect("serializable")
}

fn solvability_doc(op: &impl NaryOperation, w: &SolvabilityWitness) -> Value {
    json!({
        "position": w.position,
        "fixed": names_of(op, &w.fixed),
        "target": op.name(w.target),
        "solutions": names_of(op, &w.solutions),
    })
}

fn report_doc(op: &impl NaryOperation, r: &AxiomReport) -> Value {
    json!({
        "arity": r.arity,
        "order": r.order,
        "tuples_checked": r.tuples_checked.to_string(),
        "associativity": r.associativity.as_ref().map(|w| json!({
            "tuple": names_of(op, &w.tuple),
            "positions": [w.positions.0, w.positions.1],
            "values": [op.name(w.values.0), op.name(w.values.1)],
        })),
        "existence": r.existence.as_ref().map(|w| solvability_doc(op, w)),
        "uniqueness": r.uniqueness.as_ref().map(|w| solvability_doc(op, w)),
    })
}

pub fn run(verb: Verb, opts: &Options, limits: &Limits) -> Result<Value, CliError> {
    match verb {
        Verb::Validate => validate(opts, limits),
        Verb::Derive => derive(opts, limits),
        Verb::Skew => {
            let p = load_polyadic(first_polyadic(opts, verb)?, limits)?;
            let pairs: Vec<Value> = (0..p.order()).map(|x| json!([p.name(x), p.name(p.skew_of(x))])).collect();
            Ok(json!({ "skew": pairs }))
        }
        Verb::Retract => {
            let p = load_polyadic(first_polyadic(opts, verb)?, limits)?;
            let a = anchor(&p, opts)?;
            let g = retract(&p, a).map_err(input)?;
            Ok(json!({ "anchor": p.name(a), "identity": g.name(g.identity()), "group": group_doc(&g) }))
        }
        Verb::Hg => {
            let p = load_polyadic(first_polyadic(opts, verb)?, limits)?;
            let a = anchor(&p, opts)?;
            let r = match hosszu_gloskin(&p, a, limits) {
                Ok(r) => r,
                Err(PolyadicError::Cap(c)) => return Err(input(c)),
                Err(e) => {
                    let doc = json!({ "anchor": p.name(a), "recovered": false, "error": e.to_string() });
                    return Err(failure(e.to_string(), doc));
                }
            };
            let q = PolyadicGroup::derive(r.group, r.theta, r.b, p.arity(), limits).map_err(input)?;
            let file = PolyadicFile::derived(&q).map_err(input)?;
            Ok(json!({ "anchor": p.name(a), "recovered": true, "polyadic": polyadic_doc(&file) }))
        }
        Verb::Identity => {
            let p = load_polyadic(first_polyadic(opts, verb)?, limits)?;
            Ok(json!({ "identity": nary_identity(&p).map(|e| p.name(e).to_string()) }))
        }
        Verb::Subgroups => {
            let p = load_polyadic(first_polyadic(opts, verb)?, limits)?;
            let subs = polyadic_subgroups(&p, limits).map_err(input)?;
            let list: Vec<Vec<String>> = subs.iter().map(|h| names_of(&p, h)).collect();
            Ok(json!({ "count": list.len(), "subgroups": list }))
        }
        Verb::Homs => homs(opts, limits),
        Verb::Postcover => {
            let p = load_polyadic(first_polyadic(opts, verb)?, limits)?;
            let c = build_post_cover(&p, limits).map_err(input)?;
            let g = c.group();
            let embedding: Vec<Value> = (0..p.order()).map(|x| json!([p.name(x), g.name(c.embed(x))])).collect();
            Ok(json!({
                "order": g.order(),
                "base_order": c.base_order(),
                "arity": c.arity(),
                "group": group_doc(g),
                "embedding": embedding,
                "kernel": group_names(g, &c.kernel()),
            }))
        }
        Verb::Present2group => {
            let path = require(&opts.presentation, "--presentation", verb)?;
            let file = PresentationFile::load(path)?;
            let n = opts.n.or(file.n).ok_or_else(|| input("present2group requires --n or an 'n' field"))?;
            let pres = file.to_presentation(n, path)?;
            let out = presentation_to_group(&pres, n).map_err(input)?;
            let mut doc = serde_json::to_value(GroupPresentationFile::from_presentation(&out.presentation))
                .expect("serializable");
            doc["n"] = json!(n);
            doc["positive_forms"] = json!(out.positive_forms.iter().map(|w| w.to_string()).collect::<Vec<_>>());
            Ok(doc)
        }
        Verb::Cosets => {
            let path = require(&opts.presentation, "--presentation", verb)?;
            let pres = GroupPresentationFile::load(path)?.to_presentation(path)?;
            let cap = opts.cap.unwrap_or(DEFAULT_COSET_CAP);
            let t = coset_enumerate(&pres, cap).map_err(input)?;
            Ok(json!({ "order": t.group.order(), "cosets_defined": t.cosets_defined, "group": group_doc(&t.group) }))
        }
        Verb::Freereduce => {
            if opts.args.is_empty() {
                return Err(input("freereduce expects one or more words"));
            }
            let words = opts
                .args
                .iter()
                .map(|src| {
                    let w = FreeWord::parse(src).map_err(|e| input(format!("'{src}': {e}")))?;
                    let mut doc = json!({
                        "input": src,
                        "reduced": w.to_string(),
                        "height": w.height(),
                        "length": w.length(),
                    });
                    if let Some(n) = opts.n {
                        doc["in_free_polyadic"] = json!(in_free_polyadic(&w, n));
                    }
                    Ok(doc)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(json!({ "words": words }))
        }
        Verb::Translate => translate(opts, limits),
        Verb::Solve => {
            let (p, s) = load_system(opts, verb, limits)?;
            let v = solve(&p, &s, limits).map_err(input)?;
            Ok(json!({ "vars": s.vars, "count": v.len(), "points": points_doc(&p, &v) }))
        }
        Verb::Coordgroup => {
            let (p, s) = load_system(opts, verb, limits)?;
            let v = solve(&p, &s, limits).map_err(input)?;
            let cg = coordinate_group(&p, &v, limits).map_err(input)?;
            let q = cg.to_polyadic(limits).map_err(input)?;
            let file = PolyadicFile::derived(&q).map_err(input)?;
            let elements: Vec<Vec<String>> = cg.elements().iter().map(|t| names_of(&p, t)).collect();
            let witness = cg.structure_witness().map_err(input)?;
            Ok(json!({
                "points": points_doc(&p, &v),
                "order": cg.order(),
                "elements": elements,
                "projections": cg.projections().iter().map(|&i| cg.name(i).to_string()).collect::<Vec<_>>(),
                "structure_witness": witness.map(|u| cg.name(u).to_string()),
                "polyadic": polyadic_doc(&file),
            }))
        }
        Verb::Closure => closure(opts, limits),
        Verb::Irreducible => {
            let (p, s) = load_system(opts, verb, limits)?;
            let v = solve(&p, &s, limits).map_err(input)?;
            let z = Zariski::new(&p, s.vars, limits).map_err(input)?;
            let split = z.decompose(&v, limits).map_err(input)?;
            Ok(json!({
                "points": points_doc(&p, &v),
                "irreducible": split.is_none(),
                "decomposition": split.map(|(a, b)| json!([points_doc(&p, &a), points_doc(&p, &b)])),
            }))
        }
        Verb::Minsys => {
            let (p, s) = load_system(opts, verb, limits)?;
            let m = minimal_subsystem(&p, &s, limits).map_err(input)?;
            let rendered: Vec<String> = m.equations.iter().map(|e| e.render(&p)).collect();
            Ok(json!({
                "input_equations": s.equations.len(),
                "removed": s.equations.len() - m.equations.len(),
                "equations": rendered,
            }))
        }
        Verb::Thm63 => {
            let (p, s) = load_system(opts, verb, limits)?;
            let r = theorem63_check(&p, &s, limits).map_err(input)?;
            let doc = json!({
                "solutions": r.solutions,
                "coordinate_order": r.coordinate_order,
                "cover_order": r.cover_order,
                "cover_solutions": r.cover_solutions,
                "cover_coordinate_order": r.cover_coordinate_order,
                "epimorphism": r.epimorphism.is_some(),
                "failure": r.failure,
            });
            if r.holds() {
                Ok(doc)
            } else {
                Err(failure(r.failure.unwrap_or_default(), doc))
            }
        }
    }
}

fn validate(opts: &Options, limits: &Limits) -> Result<Value, CliError> {
    if let Some(path) = &opts.group {
        let file = GroupFile::load(path)?;
        return match file.to_group()? {
            Ok(g) => Ok(json!({ "kind": "group", "valid": true, "order": g.order(), "abelian": g.is_abelian() })),
            Err(e) => Err(failure(e.to_string(), json!({ "kind": "group", "valid": false, "error": e.to_string() }))),
        };
    }
    let path = first_polyadic(opts, Verb::Validate)?;
    let raw = match load_raw(path)? {
        Ok(raw) => raw,
        Err(e) => {
            return Err(failure(e.to_string(), json!({ "kind": "derived", "valid": false, "error": e.to_string() })))
        }
    };
    match raw {
        RawPolyadic::Derived { group, theta, b, n } => {
            let theta = match Automorphism::new(&group, theta) {
                Ok(t) => t,
                Err(e) => {
                    let msg = format!("theta is not an automorphism: {e}");
                    return Err(failure(msg.clone(), json!({ "kind": "derived", "valid": false, "error": msg })));
                }
            };
            match PolyadicGroup::derive(group, theta, b, n, limits) {
                Ok(p) => {
                    let report = verify_axioms(&p, limits).map_err(input)?;
                    let dornte = dornte_check(&p).map_err(input)?;
                    let doc = json!({
                        "kind": "derived",
                        "valid": report.passed() && dornte.is_none(),
                        "conditions": true,
                        "axioms": report_doc(&p, &report),
                        "dornte": dornte.is_none(),
                    });
                    if report.passed() && dornte.is_none() {
                        Ok(doc)
                    } else {
                        Err(failure(report.to_string(), doc))
                    }
                }
                Err(e @ (PolyadicError::ConditionOneFails { .. } | PolyadicError::ConditionTwoFails { .. })) => Err(
                    failure(e.to_string(), json!({ "kind": "derived", "valid": false, "conditions": false, "error": e.to_string() })),
                ),
                Err(e) => Err(input(e)),
            }
        }
        RawPolyadic::Table(t) => {
            let report = verify_axioms(&t, limits).map_err(input)?;
            let mut doc = json!({ "kind": "table", "valid": report.passed(), "axioms": report_doc(&t, &report) });
            if report.passed() {
                doc["dornte"] = json!(dornte_check(&t).map_err(input)?.is_none());
                Ok(doc)
            } else {
                Err(failure(report.to_string(), doc))
            }
        }
    }
}

fn derive(opts: &Options, limits: &Limits) -> Result<Value, CliError> {
    let path = first_polyadic(opts, Verb::Derive)?;
    let raw = load_raw(path)?.map_err(|e| input(format!("{}: not a group: {e}", path.display())))?;
    let RawPolyadic::Derived { group, theta, b, n } = raw else {
        return Err(input("derive expects a polyadic file of the form {group, theta, b, n}"));
    };
    let theta = Automorphism::new(&group, theta).map_err(|e| input(format!("theta is not an automorphism: {e}")))?;
    match PolyadicGroup::derive(group, theta, b, n, limits) {
        Ok(p) => {
            let table = p.tabulate(limits).map_err(input)?;
            Ok(json!({ "polyadic": polyadic_doc(&PolyadicFile::table(&table)) }))
        }
        Err(e @ (PolyadicError::ConditionOneFails { .. } | PolyadicError::ConditionTwoFails { .. })) => {
            Err(failure(e.to_string(), json!({ "derived": false, "error": e.to_string() })))
        }
        Err(e) => Err(input(e)),
    }
}

fn homs(opts: &Options, limits: &Limits) -> Result<Value, CliError> {
    let p_path = first_polyadic(opts, Verb::Homs)?;
    let p = load_polyadic(p_path, limits)?;
    let q = match opts.polyadic.get(1) {
        Some(path) => load_polyadic(path, limits)?,
        None => p.clone(),
    };
    let hs = polyadic_homs(&p, &q, limits).map_err(input)?;
    let qd = q.derivation().map_err(input)?;
    let list: Vec<Value> = hs
        .iter()
        .map(|h| {
            json!({
                "a": qd.group.name(h.a),
                "phi": group_names(&qd.group, &h.phi),
                "images": names_of(&q, &h.images),
            })
        })
        .collect();
    Ok(json!({
        "source_elements": p.names(),
        "count": list.len(),
        "homomorphisms": list,
    }))
}

fn translate(opts: &Options, limits: &Limits) -> Result<Value, CliError> {
    let (direction, equation) = match opts.args.as_slice() {
        [d, e] => (d.as_str(), e.as_str()),
        _ => return Err(input("translate expects a direction (g2p or p2g) and an equation")),
    };
    let p = load_polyadic(first_polyadic(opts, Verb::Translate)?, limits)?;
    match direction {
        "g2p" => {
            let a = anchor(&p, opts)?;
            let e = GroupEquation::parse(equation, &p.names()).map_err(input)?;
            let t = group_equation_to_polyadic(&e, a, &p);
            Ok(json!({ "direction": "g2p", "anchor": p.name(a), "input": equation, "output": t.render(&p) }))
        }
        "p2g" => {
            let e = Equation::parse(equation, &p).map_err(input)?;
            let cover = build_post_cover(&p, limits).map_err(input)?;
            let g = polyadic_equation_to_group(&e, &cover);
            Ok(json!({
                "direction": "p2g",
                "input": equation,
                "output": g.render(cover.group().names()),
                "cover": group_doc(cover.group()),
            }))
        }
        other => Err(input(format!("unknown direction '{other}' (expected g2p or p2g)"))),
    }
}

fn load_system(opts: &Options, verb: Verb, limits: &Limits) -> Result<(PolyadicGroup, EquationSystem), CliError> {
    let path = require(&opts.system, "--system", verb)?;
    let file = SystemFile::load(path)?;
    let p = load_polyadic(&file.polyadic, limits)?;
    let s = file.to_system(&p, path)?;
    Ok((p, s))
}

fn points_doc(p: &impl NaryOperation, v: &AlgebraicSet) -> Vec<Vec<String>> {
    v.points.iter().map(|q| names_of(p, q)).collect()
}

fn closure(opts: &Options, limits: &Limits) -> Result<Value, CliError> {
    let p = load_polyadic(first_polyadic(opts, Verb::Closure)?, limits)?;
    let names = p.names();
    let points = opts
        .args
        .iter()
        .map(|arg| {
            arg.split(',')
                .map(|s| {
                    let s = s.trim();
                    names.iter().position(|n| n == s).ok_or_else(|| input(format!("unknown element '{s}' in point '{arg}'")))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let vars = match (opts.vars, points.first()) {
        (Some(m), _) => m,
        (None, Some(q)) => q.len(),
        (None, None) => return Err(input("closure of the empty set needs --vars")),
    };
    if let Some(q) = points.iter().find(|q| q.len() != vars) {
        return Err(input(format!("point {:?} does not have {vars} coordinates", names_of(&p, q))));
    }
    let z = AlgebraicSet::from_points(vars, points);
    let zariski = Zariski::new(&p, vars, limits).map_err(input)?;
    let c = zariski.closure(&z).map_err(input)?;
    Ok(json!({
        "vars": vars,
        "input": points_doc(&p, &z),
        "closure": points_doc(&p, &c),
        "algebraic": c == z,
        "term_functions": zariski.function_count(),
    }))
}
