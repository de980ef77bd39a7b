use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use shuffle_core::backforth::{build_iso, decide_iso_spec, BuildOutcome, SpecVerdict};
use shuffle_core::counting::{
    count_models, enumerate_invariant_tuples, kappa_count, ClassSize, Classes, ModelCount, TheorySummary,
};
use shuffle_core::realize::{realize_spec, realize_spec_variant, ColoredOrderSpec};
use shuffle_core::shuffle::{
    check_coherence, check_monotone, check_shuffling, limit_structure, ShuffleFamily, Verdict,
};
use shuffle_core::structure::{Color, OrderedStructure, Query};
use shuffle_core::workbench::{
    build_model, build_model_variant, decide_iso_models, extract_invariant_tuple, list_canonical_models,
    InvariantTuple, ModelFile, TheoryTag, WorkbenchError,
};

use crate::input::load;
use crate::CliError;

/// Records to print and whether the verdicts passed.
pub struct Report {
    pub records: Vec<Value>,
    pub ok: bool,
}

impl Report {
    fn one(record: Value, ok: bool) -> Self {
        Report {
            records: vec![record],
            ok,
        }
    }
}

/// Elements probed per part when extracting invariants from a build.
const PROBE: usize = 300;

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("records serialize")
}

fn with(mut v: Value, key: &str, x: Value) -> Value {
    v.as_object_mut().expect("record is an object").insert(key.into(), x);
    v
}

fn family(k: u32) -> Result<ShuffleFamily, CliError> {
    ShuffleFamily::dense_partition(k).map_err(|e| CliError::Input(e.to_string()))
}

/// The first failing verdict of a per-relation check, or a pass.
fn first_failure(name: &str, depth: usize, runs: Vec<((usize, usize), Verdict)>) -> Verdict {
    for ((i, j), v) in runs {
        if !v.passed() {
            let reason = format!("S_{{{i},{j}}}: {}", v.reason.clone().unwrap_or_default());
            return Verdict {
                check: name.into(),
                reason: Some(reason),
                ..v
            };
        }
    }
    Verdict::pass(name, depth)
}

pub fn shuffle_verify(k: u32, depth: usize) -> Result<Report, CliError> {
    let f = family(k)?;
    let pairs: Vec<(usize, usize)> = (0..f.len())
        .flat_map(|i| (i + 1..f.len()).map(move |j| (i, j)))
        .collect();
    let run = |check: fn(&shuffle_core::shuffle::MonotoneRelation, usize) -> Verdict| {
        pairs
            .par_iter()
            .map(|&(i, j)| ((i, j), check(f.relation(i, j).expect("pair of the family"), depth)))
            .collect::<Vec<_>>()
    };
    let verdicts = [
        first_failure("monotone", depth, run(check_monotone)),
        first_failure("shuffling", depth, run(check_shuffling)),
        check_coherence(&f, depth),
    ];
    let ok = verdicts.iter().all(Verdict::passed);
    let records = verdicts.iter().map(|v| with(to_value(v), "k", json!(k))).collect();
    Ok(Report { records, ok })
}

pub fn limit_build(k: u32, depth: usize) -> Result<Report, CliError> {
    let f = family(k)?;
    let record = |v: Verdict, sample: Value| with(with(to_value(&v), "k", json!(k)), "sample", sample);
    let limit = match limit_structure(&f, depth) {
        Ok(l) => l,
        Err(e) => {
            return Ok(Report::one(
                record(Verdict::fail("limit", depth, Vec::new(), e.to_string()), Value::Null),
                false,
            ))
        }
    };
    let mut xs = limit.enumerate(depth);
    xs.sort_by(|a, b| limit.compare(a, b));
    // every color is dense between neighbouring sample cuts
    let mut verdict = Verdict::pass("limit", depth);
    'gaps: for w in xs.windows(2) {
        for c in 0..k as u64 {
            let q = Query::between(Some(&w[0]), Some(&w[1])).color(Color(c));
            let found = limit.witness(&q).map_err(|e| CliError::Input(e.to_string()))?;
            if found.is_none() {
                let cx = vec![w[0].to_string(), w[1].to_string()];
                verdict = Verdict::fail(
                    "limit",
                    depth,
                    cx,
                    format!("color {c} is missing between neighbouring cuts"),
                );
                break 'gaps;
            }
        }
    }
    let sample = xs.iter().map(|c| json!([c.to_string(), c.origin])).collect();
    let ok = verdict.passed();
    Ok(Report::one(record(verdict, Value::Array(sample)), ok))
}

fn iso_record(verdict: &str, depth: usize, witness: Option<Vec<(String, String)>>, reason: Option<String>) -> Value {
    json!({
        "verdict": verdict,
        "depth": depth,
        "witness-map": witness.map(|w| w.into_iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>()),
        "reason": reason,
    })
}

pub fn iso(a: &Path, b: &Path, depth: usize, engine_only: bool) -> Result<Report, CliError> {
    let sa: ColoredOrderSpec = load(a)?;
    let sb: ColoredOrderSpec = load(b)?;
    let bad = |e: shuffle_core::realize::SpecError| CliError::Input(e.to_string());
    let decision = if engine_only {
        None
    } else {
        Some(decide_iso_spec(&sa, &sb).map_err(bad)?)
    };
    if let Some(SpecVerdict::NotIso(reason)) = decision {
        return Ok(Report::one(iso_record("not-iso", depth, None, Some(reason)), false));
    }
    // an independent realization of the second spec
    let (m, n) = (
        realize_spec(&sa).map_err(bad)?,
        realize_spec_variant(&sb, 1).map_err(bad)?,
    );
    let out = build_iso(&m, &n, depth).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(match (out, decision) {
        (BuildOutcome::Iso(f), decided) => {
            let pairs = f.pairs().iter().map(|(x, y)| (x.to_string(), y.to_string())).collect();
            let verdict = if decided.is_some() {
                "iso"
            } else {
                "no-obstruction-at-depth"
            };
            Report::one(iso_record(verdict, depth, Some(pairs), None), true)
        }
        (BuildOutcome::Obstruction(o), None) => Report::one(iso_record("not-iso", depth, None, Some(o.reason)), false),
        (BuildOutcome::Obstruction(o), Some(_)) => {
            return Err(CliError::Internal(format!(
                "specs decide as isomorphic but back-and-forth failed: {}",
                o.reason
            )))
        }
    })
}

/// Loads a model file; `theory` and `truncation` flags must agree with it.
fn model_file(path: &Path, theory: Option<TheoryTag>, truncation: Option<u32>) -> Result<ModelFile, CliError> {
    let file: ModelFile = load(path)?;
    if let Some(t) = theory.filter(|&t| t != file.theory) {
        return Err(CliError::Input(format!(
            "--theory {t} but {} holds a {} model",
            path.display(),
            file.theory
        )));
    }
    if let Some(b) = truncation.filter(|&b| b != file.truncation) {
        return Err(CliError::Input(format!(
            "--truncation {b} but {} has truncation {}",
            path.display(),
            file.truncation
        )));
    }
    Ok(file)
}

fn workbench(e: WorkbenchError) -> CliError {
    match e {
        WorkbenchError::Disagreement { .. } | WorkbenchError::Evidence(_) => CliError::Internal(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

fn tuple_record(theory: TheoryTag, t: &InvariantTuple) -> Value {
    to_value(&ModelFile::new(theory, t.clone()))
}

pub fn build(
    path: &Path,
    theory: Option<TheoryTag>,
    truncation: Option<u32>,
    depth: usize,
) -> Result<Report, CliError> {
    let file = model_file(path, theory, truncation)?;
    let t = file.invariant_tuple();
    let m = build_model(file.theory, &t).map_err(workbench)?;
    let extracted = extract_invariant_tuple(&m, PROBE).map_err(workbench)?;
    let axioms = m.check_axioms(depth);
    let ok = extracted == t && axioms.iter().all(Verdict::passed);
    let mut record = tuple_record(file.theory, &t);
    record = with(record, "blocks", json!(m.block_count()));
    record = with(record, "extracted", to_value(&extracted.entries));
    record = with(record, "round-trip", json!(extracted == t));
    record = with(record, "depth", json!(depth));
    record = with(record, "axioms", to_value(&axioms));
    record = with(record, "result", json!(if ok { "pass" } else { "fail" }));
    Ok(Report::one(record, ok))
}

pub fn invariants(
    path: &Path,
    theory: Option<TheoryTag>,
    truncation: Option<u32>,
    depth: usize,
) -> Result<Report, CliError> {
    let file = model_file(path, theory, truncation)?;
    let m = build_model(file.theory, &file.invariant_tuple()).map_err(workbench)?;
    let t = extract_invariant_tuple(&m, depth).map_err(workbench)?;
    Ok(Report::one(
        with(tuple_record(file.theory, &t), "depth", json!(depth)),
        true,
    ))
}

pub fn iso_models(a: &Path, b: &Path, depth: usize) -> Result<Report, CliError> {
    let (fa, fb) = (model_file(a, None, None)?, model_file(b, None, None)?);
    let m = build_model(fa.theory, &fa.invariant_tuple()).map_err(workbench)?;
    let n = build_model_variant(fb.theory, &fb.invariant_tuple(), 1).map_err(workbench)?;
    let v = decide_iso_models(&m, &n, Some(depth)).map_err(workbench)?;
    let verdict = if v.iso { "iso" } else { "not-iso" };
    Ok(Report::one(iso_record(verdict, depth, v.witness, v.reason), v.iso))
}

pub fn list_models(theory: TheoryTag, truncation: Option<u32>) -> Result<Report, CliError> {
    let b = match (truncation, theory.unbounded()) {
        (Some(0), _) => return Err(CliError::Input("--truncation must be at least 1".into())),
        (Some(b), _) => b,
        (None, false) => 1,
        (None, true) => {
            return Err(CliError::Input(format!(
                "{theory} has infinitely many countable models; pass --truncation"
            )))
        }
    };
    let list = list_canonical_models(theory, b);
    let mut records: Vec<Value> = list
        .iter()
        .map(|n| {
            let r = tuple_record(theory, &n.tuple);
            match &n.name {
                Some(name) => with(r, "name", json!(name)),
                None => r,
            }
        })
        .collect();
    records.push(json!({
        "theory": theory,
        "truncation": b,
        "models": list.len(),
        "unbounded": theory.unbounded(),
    }));
    Ok(Report { records, ok: true })
}

pub fn count(path: &Path) -> Result<Report, CliError> {
    let t: TheorySummary = load(path)?;
    let count = count_models(&t);
    let kappa = match &t.classes {
        Classes::List(cs) => Some(cs.iter().map(kappa_count).collect::<Vec<_>>()),
        Classes::InfinitelyMany => None,
    };
    let flags: Vec<&str> = [("c1", t.c1), ("c2", t.c2), ("c3", t.c3), ("c4", t.c4)]
        .iter()
        .filter(|(_, on)| *on)
        .map(|(n, _)| *n)
        .collect();
    let reason = match (&count, &t.classes) {
        (ModelCount::Continuum, _) if !flags.is_empty() => format!("condition {} holds", flags.join(", ")),
        (ModelCount::Continuum, _) => "infinitely many classes".to_string(),
        (ModelCount::Aleph0, _) => "a class has infinitely many types".to_string(),
        (ModelCount::Finite(_), _) => "product of the per-class counts".to_string(),
    };
    Ok(Report::one(
        json!({ "count": to_value(&count), "kappa": kappa.map(|k| to_value(&k)), "reason": reason }),
        true,
    ))
}

pub fn enumerate_tuples(path: &Path, truncation: Option<u32>) -> Result<Report, CliError> {
    let t: TheorySummary = load(path)?;
    let Classes::List(classes) = &t.classes else {
        return Err(CliError::Input(format!(
            "{}: classes are infinitely many, there is no per-class data",
            path.display()
        )));
    };
    let mut records = Vec::new();
    for (i, c) in classes.iter().enumerate() {
        if c.n == ClassSize::Infinite && truncation.is_none() {
            return Err(CliError::Input(format!("class {i} is infinite; pass --truncation")));
        }
        let tuples = enumerate_invariant_tuples(c, truncation.unwrap_or(0) as usize);
        let mut r = json!({
            "class": i,
            "n": to_value(&c.n),
            "kind": to_value(&c.kind),
            "kappa": to_value(&kappa_count(c)),
            "listed": tuples.len(),
            "tuples": to_value(&tuples),
        });
        if let Some(b) = truncation.filter(|_| c.n == ClassSize::Infinite) {
            r = with(r, "truncation", json!(b));
        }
        records.push(r);
    }
    Ok(Report { records, ok: true })
}
