//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines are always printed.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use shuffle_core::backforth::{build_iso, decide_iso_spec, verify, BuildOutcome, SpecVerdict};
use shuffle_core::counting::{
    check_class_tuple, count_models, enumerate_invariant_tuples, legal_dense_tuples, ClassKind, ClassSize,
    ClassSummary, Classes, ModelCount, TheorySummary,
};
use shuffle_core::ordertype::{CanonicalOrderType, ETA, ETA_ONE, ONE, ONE_ETA, ONE_ETA_ONE};
use shuffle_core::realize::{realize_spec, realize_spec_variant, Piece};
use shuffle_core::shuffle::{
    check_coherence, check_monotone, check_shuffling, cut_compare, cut_embed, Cut, MonotoneRelation, Order,
    RelationKind, ShuffleFamily,
};
use shuffle_core::workbench::{
    build_model, decide_iso_models, extract_invariant_tuple, list_canonical_models, InvariantTuple, TheoryTag,
    WorkbenchError,
};
use shuffle_core::{Block, Color, ColoredOrderSpec, OrderedStructure, Query, Rational, RealizedOrder, Region};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn class(n: u64, kind: ClassKind) -> ClassSummary {
    ClassSummary {
        n: ClassSize::Finite(n),
        kind,
    }
}

fn summary(classes: Classes) -> TheorySummary {
    TheorySummary {
        c1: false,
        c2: false,
        c3: false,
        c4: false,
        classes,
    }
}

fn counting_fidelity() -> Outcome {
    let t0 = summary(Classes::List(vec![class(1, ClassKind::DefinableLeft)]));
    ensure(count_models(&t0) == ModelCount::Finite(3u32.into()), || {
        "T0 does not count 3".into()
    })?;
    let mut checked = 0;
    for k in 0..=6u32 {
        for m in 0..=6 - k {
            let mut cs = vec![class(1, ClassKind::DefinableRight); k as usize];
            cs.extend(vec![class(1, ClassKind::NonDefinable); m as usize]);
            let want = BigUint::from(3u32).pow(k) * BigUint::from(6u32).pow(m);
            let got = count_models(&summary(Classes::List(cs)));
            ensure(got == ModelCount::Finite(want.clone()), || {
                format!("k={k} m={m}: {got:?}, want {want}")
            })?;
            checked += 1;
        }
    }
    let t91 = summary(Classes::List(vec![
        class(1, ClassKind::DefinableRight),
        ClassSummary {
            n: ClassSize::Infinite,
            kind: ClassKind::DefinableRight,
        },
    ]));
    ensure(count_models(&t91) == ModelCount::Aleph0, || {
        "infinite class is not aleph0".into()
    })?;
    ensure(
        count_models(&summary(Classes::InfinitelyMany)) == ModelCount::Continuum,
        || "infinitely many classes is not continuum".into(),
    )?;
    Ok(format!("{checked} products exact"))
}

const SIX: [CanonicalOrderType; 6] = [CanonicalOrderType::Empty, ONE, ETA, ONE_ETA, ETA_ONE, ONE_ETA_ONE];

/// Every tuple of length `n` over the six invariant types.
fn all_tuples(n: usize) -> impl Iterator<Item = Vec<CanonicalOrderType>> {
    (0..6usize.pow(n as u32)).map(move |mut code| {
        (0..n)
            .map(|_| {
                let t = SIX[code % 6];
                code /= 6;
                t
            })
            .collect()
    })
}

fn enumeration_cross_check() -> Outcome {
    for n in 0..=20u64 {
        let d = enumerate_invariant_tuples(&class(n.max(1), ClassKind::DefinableLeft), 0).len() as u64;
        let nd = enumerate_invariant_tuples(&class(n.max(1), ClassKind::NonDefinable), 0).len() as u64;
        let m = n.max(1);
        ensure(d == m + 2, || format!("definable n={m}: {d}"))?;
        ensure(nd == m * m + 3 * m + 2, || format!("non-definable n={m}: {nd}"))?;
        let dense = legal_dense_tuples(n as usize).len() as u64;
        ensure(dense == (n + 1) * (n + 1), || format!("dense n={n}: {dense}"))?;
    }
    // brute force over all tuples as an independent count
    for n in 1..=5usize {
        for kind in [
            ClassKind::DefinableLeft,
            ClassKind::DefinableRight,
            ClassKind::NonDefinable,
        ] {
            let legal = all_tuples(n).filter(|t| check_class_tuple(kind, t).is_ok()).count();
            let listed = enumerate_invariant_tuples(&class(n as u64, kind), 0).len();
            ensure(legal == listed, || {
                format!("{kind:?} n={n}: {legal} legal, {listed} listed")
            })?;
        }
    }
    Ok("n <= 20, brute force to n = 5".into())
}

fn shuffle_axioms() -> Outcome {
    let depth = 50;
    for k in [2u32, 3, 5, 8] {
        let f = ShuffleFamily::dense_partition(k).map_err(|e| e.to_string())?;
        for i in 0..f.len() {
            for j in i + 1..f.len() {
                let s = f.relation(i, j).map_err(|e| e.to_string())?;
                for v in [check_monotone(s, depth), check_shuffling(s, depth)] {
                    ensure(v.passed(), || format!("k={k} S_{{{i},{j}}}: {v:?}"))?;
                }
            }
        }
        let v = check_coherence(&f, depth);
        ensure(v.passed(), || format!("k={k}: {v:?}"))?;
    }
    let all: Order = std::sync::Arc::new(RealizedOrder::dense_partition(1).map_err(|e| e.to_string())?);
    let reversed = check_monotone(&MonotoneRelation::new(all.clone(), all, RelationKind::Reversed), depth);
    ensure(
        !reversed.passed() && reversed.counterexample.as_ref().is_some_and(|c| !c.is_empty()),
        || format!("reversed relation: {reversed:?}"),
    )?;
    let progression = |start| {
        std::sync::Arc::new(RealizedOrder::from_pieces(vec![Piece::Progression {
            start,
            step: Rational::ONE,
            color: Color(0),
            region: Region(0, 0),
        }]))
    };
    let steps = MonotoneRelation::restrict_ambient(progression(Rational::ZERO), progression(Rational::new(1, 2)));
    let sup = check_shuffling(&steps, depth);
    ensure(
        !sup.passed() && sup.counterexample.as_ref().is_some_and(|c| !c.is_empty()),
        || format!("supremum fiber: {sup:?}"),
    )?;
    Ok("k in {2,3,5,8} pass, both negatives fail with counterexamples".into())
}

/// Whether `x` of the first order lies in the initial part denoted by `c`.
fn in_cut(f: &ShuffleFamily, x: &Rational, c: &Cut) -> Result<bool, String> {
    if c.origin == 0 {
        return Ok(x < &c.anchor);
    }
    f.relation(0, c.origin)
        .and_then(|s| s.member(x, &c.anchor).map_err(Into::into))
        .map_err(|e| e.to_string())
}

/// Strict inclusion of the initial parts of two cuts, judged on members
/// of the first order only.
fn strictly_inside(f: &ShuffleFamily, a: &Cut, b: &Cut) -> Result<bool, String> {
    let (lo, hi) = if a.anchor < b.anchor {
        (a.anchor, b.anchor)
    } else {
        (b.anchor, a.anchor)
    };
    let first = f.order(0).map_err(|e| e.to_string())?;
    let mut probes: Vec<Rational> = vec![lo, hi];
    if let Some(x) = first
        .witness(&Query::between(Some(&lo), Some(&hi)))
        .map_err(|e| e.to_string())?
    {
        probes.push(x);
    }
    let mut grows = false;
    for x in probes.iter().filter(|x| first.contains(x)) {
        match (in_cut(f, x, a)?, in_cut(f, x, b)?) {
            (true, false) => return Ok(false),
            (false, true) => grows = true,
            _ => {}
        }
    }
    Ok(grows)
}

fn cut_calculus() -> Outcome {
    let f = ShuffleFamily::dense_partition(5).map_err(|e| e.to_string())?;
    let mut rng = StdRng::seed_from_u64(7);
    let per = 200;
    let mut cuts = Vec::new();
    for i in 0..f.len() {
        let xs = f.order(i).map_err(|e| e.to_string())?.enumerate(3 * per);
        for _ in 0..per {
            let a = xs[rng.random_range(0..xs.len())];
            cuts.push(cut_embed(&f, i, a).map_err(|e| e.to_string())?);
        }
    }
    let mut seen = HashSet::new();
    cuts.retain(|c| seen.insert(*c));
    let cmp = |a: &Cut, b: &Cut| cut_compare(&f, a, b).map_err(|e| e.to_string());
    let mut sorted = cuts.clone();
    let mut err = None;
    sorted.sort_by(|a, b| {
        if a == b {
            return Ordering::Equal;
        }
        cmp(a, b).unwrap_or_else(|e| {
            err.get_or_insert(e);
            Ordering::Equal
        })
    });
    if let Some(e) = err {
        return Err(e);
    }
    // a strict total order sorts consistently: every pair agrees with the sort
    for (x, a) in sorted.iter().enumerate() {
        for b in &sorted[x + 1..] {
            ensure(cmp(a, b)? == Ordering::Less && cmp(b, a)? == Ordering::Greater, || {
                format!("{a} and {b} are out of order")
            })?;
        }
    }
    let mut pairs = 0;
    let mut violations = 0;
    while pairs < 1000 {
        let (a, b) = (
            &cuts[rng.random_range(0..cuts.len())],
            &cuts[rng.random_range(0..cuts.len())],
        );
        if a.origin >= b.origin {
            continue;
        }
        pairs += 1;
        let member = f
            .relation(a.origin, b.origin)
            .map_err(|e| e.to_string())?
            .member(&a.anchor, &b.anchor);
        if strictly_inside(&f, a, b)? != member.map_err(|e| e.to_string())? {
            violations += 1;
        }
    }
    ensure(violations == 0, || {
        format!("{violations} of {pairs} pairs violate inclusion")
    })?;
    Ok(format!(
        "{} cuts totally ordered, {pairs} cross-index pairs",
        cuts.len()
    ))
}

/// About fifty specs: random ones and rewrites of earlier ones into other
/// presentations of the same order.
fn spec_corpus() -> Vec<ColoredOrderSpec> {
    let mut rng = StdRng::seed_from_u64(11);
    let mut seen = BTreeSet::new();
    let mut out: Vec<ColoredOrderSpec> = Vec::new();
    while out.len() < 50 {
        let spec = if !out.is_empty() && rng.random_bool(0.4) {
            let base = &out[rng.random_range(0..out.len())];
            match rewrite(base, &mut rng) {
                Some(s) => s,
                None => continue,
            }
        } else {
            random_spec(&mut rng)
        };
        if seen.insert(serde_json::to_string(&spec).unwrap()) {
            out.push(spec);
        }
    }
    out
}

fn random_spec(rng: &mut StdRng) -> ColoredOrderSpec {
    let blocks = (0..rng.random_range(1..=4))
        .map(|_| {
            if rng.random_bool(0.3) {
                return Block::point(rng.random_range(0..4));
            }
            // small color sets keep merges likely
            let colors: Vec<u64> = (0..4).filter(|_| rng.random_bool(0.4)).collect();
            let colors = if colors.is_empty() {
                vec![rng.random_range(0..4)]
            } else {
                colors
            };
            let end = |rng: &mut StdRng| rng.random_bool(0.3).then(|| colors[rng.random_range(0..colors.len())]);
            let (min, max) = (end(rng), end(rng));
            Block::dense(colors.iter().copied(), min, max)
        })
        .collect();
    ColoredOrderSpec::new(blocks)
}

/// Splits a dense block into an isomorphic presentation.
fn rewrite(s: &ColoredOrderSpec, rng: &mut StdRng) -> Option<ColoredOrderSpec> {
    if s.blocks.len() >= 4 {
        return None;
    }
    let dense: Vec<usize> = (0..s.blocks.len())
        .filter(|&i| matches!(s.blocks[i], Block::Dense(_)))
        .collect();
    let &i = dense.get(rng.random_range(0..dense.len().max(1)))?;
    let Block::Dense(d) = &s.blocks[i] else { unreachable!() };
    let colors: Vec<u64> = d.colors.iter().map(|c| c.0).collect();
    let (min, max) = (d.min.map(|c| c.0), d.max.map(|c| c.0));
    let replacement = match rng.random_range(0..3) {
        0 if min.is_some() => vec![Block::point(min.unwrap()), Block::dense(colors.clone(), None, max)],
        1 if max.is_some() => vec![Block::dense(colors.clone(), min, None), Block::point(max.unwrap())],
        _ => {
            let c = colors[rng.random_range(0..colors.len())];
            vec![
                Block::dense(colors.clone(), min, Some(c)),
                Block::dense(colors.clone(), None, max),
            ]
        }
    };
    let mut blocks = s.blocks.clone();
    blocks.splice(i..=i, replacement);
    Some(ColoredOrderSpec::new(blocks))
}

fn back_and_forth() -> Outcome {
    let specs = spec_corpus();
    let steps = 64;
    let (mut iso, mut not_iso) = (0, 0);
    for (x, a) in specs.iter().enumerate() {
        for b in &specs[x..] {
            let decided = decide_iso_spec(a, b).map_err(|e| e.to_string())?;
            let (m, n) = (realize_spec(a).unwrap(), realize_spec_variant(b, 1).unwrap());
            let built = build_iso(&m, &n, steps).map_err(|e| e.to_string())?;
            match (&decided, built) {
                (SpecVerdict::Iso, BuildOutcome::Iso(f)) => {
                    // an all-point spec is finite and caps the map at its size
                    let finite = a.blocks.iter().all(|b| matches!(b, Block::Point(_)));
                    let want = if finite { a.blocks.len().min(steps) } else { steps };
                    ensure(f.len() == want && verify(&m, &n, &f), || {
                        format!("witness of size {} for {a:?} is short or unverified", f.len())
                    })?;
                    iso += 1;
                }
                (SpecVerdict::NotIso(_), BuildOutcome::Obstruction(_)) => not_iso += 1,
                (d, BuildOutcome::Iso(_)) => return Err(format!("{a:?} vs {b:?}: decided {d:?}, engine matched")),
                (d, BuildOutcome::Obstruction(o)) => {
                    return Err(format!("{a:?} vs {b:?}: decided {d:?}, engine: {}", o.reason))
                }
            }
        }
    }
    Ok(format!(
        "{} specs, {} pairs agree ({iso} iso, {not_iso} not)",
        specs.len(),
        iso + not_iso
    ))
}

fn workbench_classification() -> Outcome {
    let pairwise_distinct = |tag: TheoryTag, b: u32, want: usize| -> Result<(), String> {
        let list = list_canonical_models(tag, b);
        ensure(list.len() == want, || format!("{tag} at {b}: {} models", list.len()))?;
        let models: Vec<_> = list
            .iter()
            .map(|n| build_model(tag, &n.tuple))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for (i, m) in models.iter().enumerate() {
            for n in &models[i + 1..] {
                let v = decide_iso_models(m, n, None).map_err(|e| e.to_string())?;
                ensure(!v.iso, || format!("{tag}: two listed models are isomorphic"))?;
                let engine = build_iso(m, n, 64).map_err(|e| e.to_string())?;
                ensure(matches!(engine, BuildOutcome::Obstruction(_)), || {
                    format!("{tag}: back-and-forth matched distinct models")
                })?;
            }
        }
        Ok(())
    };
    pairwise_distinct(TheoryTag::T0, 1, 3)?;
    pairwise_distinct(TheoryTag::T1, 10, 12)?;
    let list = list_canonical_models(TheoryTag::T91, 8);
    for n in &list {
        let m = build_model(TheoryTag::T91, &n.tuple).map_err(|e| e.to_string())?;
        for v in m.check_axioms(30) {
            ensure(v.passed(), || format!("{:?}: {v:?}", n.tuple))?;
        }
        let back = extract_invariant_tuple(&m, 300).map_err(|e| e.to_string())?;
        ensure(back == n.tuple, || format!("{:?} extracted as {back:?}", n.tuple))?;
    }
    Ok(format!("3 + 12 distinct, {} T91 builds pass", list.len()))
}

fn at_most_one_endpoint(t: &[CanonicalOrderType]) -> bool {
    t.iter().filter(|x| x.has_min()).count() <= 1 && t.iter().filter(|x| x.has_max()).count() <= 1
}

fn invariant_constraints() -> Outcome {
    let mut accepted = 0usize;
    for n in 1..=8usize {
        for kind in [
            ClassKind::DefinableLeft,
            ClassKind::DefinableRight,
            ClassKind::NonDefinable,
        ] {
            for t in enumerate_invariant_tuples(&class(n as u64, kind), 0) {
                ensure(at_most_one_endpoint(&t), || format!("emitted {t:?}"))?;
            }
        }
        for t in all_tuples(n) {
            if check_class_tuple(ClassKind::NonDefinable, &t).is_ok() {
                accepted += 1;
                ensure(at_most_one_endpoint(&t), || format!("accepted {t:?}"))?;
            }
            // a singleton part forces every other part to be omitted
            let singleton = t.contains(&ONE);
            let others = t.iter().filter(|x| **x != CanonicalOrderType::Empty).count() > 1;
            if singleton && others {
                let entries = std::iter::once(("q".to_string(), CanonicalOrderType::Empty))
                    .chain(t.iter().enumerate().map(|(i, &x)| (format!("p_{i}"), x)));
                let r = build_model(TheoryTag::T91, &InvariantTuple::new(n as u32, entries));
                ensure(matches!(r, Err(WorkbenchError::Illegal(_))), || format!("built {t:?}"))?;
            }
        }
    }
    Ok(format!("{accepted} accepted tuples over n <= 8"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("counting fidelity", counting_fidelity, Duration::from_secs(1)),
        (
            "kappa and enumeration cross-check",
            enumeration_cross_check,
            Duration::from_secs(1),
        ),
        ("shuffle axioms", shuffle_axioms, Duration::from_secs(10)),
        ("cut calculus", cut_calculus, Duration::from_secs(5)),
        ("back-and-forth", back_and_forth, Duration::from_secs(60)),
        (
            "workbench classification",
            workbench_classification,
            Duration::from_secs(60),
        ),
        ("invariant constraints", invariant_constraints, Duration::MAX),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let line = match outcome {
            Ok(detail) if took <= *limit => format!("pass  {detail}"),
            Ok(detail) => format!("FAIL  {detail}, but over the {limit:?} limit"),
            Err(why) => format!("FAIL  {why}"),
        };
        if line.starts_with("FAIL") {
            failed += 1;
        }
        println!("criterion {} {name}: {line} ({:.2} s)", k + 1, took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
