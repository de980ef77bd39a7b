//! Concrete models of the example theories: builders, invariant
//! extraction, isomorphism decisions and the lists of canonical models.
//!
//! Theories and their type indices:
//!
//! * `T0`: colors `C_n` on a convergent sequence of convex blocks, one
//!   type `p` at the limit. Index `p`.
//! * `TDENSE`: dense colors `D_i` and an uncolored part `q`. Index `q`.
//! * `T1`: `T0` with dense colors `D_i` added throughout. Index `p`, and the
//!   color of the minimum of `p` under the key `min-colors`.
//! * `TSHUF`: a shuffled sequence of dense colors `O_i` and one type `p`
//!   to their right. Index `p`.
//! * `T91`: shuffled blocks `O_i` carrying convex colors `C_{i,n}`, the
//!   types `p_i` at the right end of each block, and `q` to the right of
//!   all blocks. Indices `q`, `p_0`, `p_1`, ...

mod build;
mod model;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::backforth::{build_iso, decide_iso_spec, BuildOutcome, SpecVerdict};
use crate::counting::{
    check_class_tuple, enumerate_invariant_tuples, ClassKind, ClassSize, ClassSummary, LegalityError,
};
use crate::ordertype::{CanonicalOrderType, ETA, INVARIANT_TYPES, ONE_ETA};

pub use build::{build_model, build_model_variant, MAX_SHUFFLED_TRUNCATION};
pub use model::{Model, Part};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoryTag {
    #[serde(rename = "T0")]
    T0,
    #[serde(rename = "TDENSE")]
    TDense,
    #[serde(rename = "T1")]
    T1,
    #[serde(rename = "TSHUF")]
    TShuf,
    #[serde(rename = "T91")]
    T91,
}

impl TheoryTag {
    pub const ALL: [TheoryTag; 5] = [
        TheoryTag::T0,
        TheoryTag::TDense,
        TheoryTag::T1,
        TheoryTag::TShuf,
        TheoryTag::T91,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoryTag::T0 => "T0",
            TheoryTag::TDense => "TDENSE",
            TheoryTag::T1 => "T1",
            TheoryTag::TShuf => "TSHUF",
            TheoryTag::T91 => "T91",
        }
    }

    /// The type indices at truncation `b`.
    pub fn indices(self, b: u32) -> Vec<String> {
        match self {
            TheoryTag::T0 | TheoryTag::T1 | TheoryTag::TShuf => vec!["p".into()],
            TheoryTag::TDense => vec!["q".into()],
            TheoryTag::T91 => std::iter::once("q".to_string())
                .chain((0..b).map(|i| format!("p_{i}")))
                .collect(),
        }
    }

    /// Whether the number of countable models is infinite, so that the
    /// canonical list only covers the truncation.
    pub fn unbounded(self) -> bool {
        matches!(self, TheoryTag::TDense | TheoryTag::T1 | TheoryTag::T91)
    }
}

impl fmt::Display for TheoryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoryTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        TheoryTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown theory {s:?}; expected one of T0, TDENSE, T1, TSHUF, T91"))
    }
}

/// The invariants of a model, one per type index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantTuple {
    pub truncation: u32,
    #[serde(rename = "tuple")]
    pub entries: BTreeMap<String, CanonicalOrderType>,
    /// Color index of the minimum of a part, where the theory tells
    /// minima apart by color.
    #[serde(default, rename = "min-colors", skip_serializing_if = "BTreeMap::is_empty")]
    pub min_colors: BTreeMap<String, u32>,
}

impl InvariantTuple {
    pub fn new(truncation: u32, entries: impl IntoIterator<Item = (impl Into<String>, CanonicalOrderType)>) -> Self {
        InvariantTuple {
            truncation,
            entries: entries.into_iter().map(|(k, v)| (k.into(), v)).collect(),
            min_colors: BTreeMap::new(),
        }
    }

    pub fn with_min_color(mut self, index: &str, color: u32) -> Self {
        self.min_colors.insert(index.into(), color);
        self
    }

    pub fn get(&self, index: &str) -> Option<CanonicalOrderType> {
        self.entries.get(index).copied()
    }

    /// `p_0, p_1, ...` of a `T91` tuple, in index order.
    fn p_entries(&self) -> Vec<CanonicalOrderType> {
        (0..self.truncation)
            .map(|i| self.get(&format!("p_{i}")).unwrap_or(CanonicalOrderType::Empty))
            .collect()
    }
}

/// A model spec file: a theory and the tuple to realize.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub theory: TheoryTag,
    pub truncation: u32,
    pub tuple: BTreeMap<String, CanonicalOrderType>,
    #[serde(default, rename = "min-colors", skip_serializing_if = "BTreeMap::is_empty")]
    pub min_colors: BTreeMap<String, u32>,
}

impl ModelFile {
    pub fn new(theory: TheoryTag, t: InvariantTuple) -> Self {
        ModelFile {
            theory,
            truncation: t.truncation,
            tuple: t.entries,
            min_colors: t.min_colors,
        }
    }

    pub fn invariant_tuple(&self) -> InvariantTuple {
        InvariantTuple {
            truncation: self.truncation,
            entries: self.tuple.clone(),
            min_colors: self.min_colors.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WorkbenchError {
    #[error("truncation must be at least 1")]
    ZeroTruncation,
    #[error("{theory} models are built up to truncation {max}, got {got}")]
    TruncationTooLarge { theory: TheoryTag, max: u32, got: u32 },
    #[error("{theory} has no type index {index:?}")]
    UnknownIndex { theory: TheoryTag, index: String },
    #[error("missing type index {0:?}")]
    MissingIndex(String),
    #[error("illegal tuple: {0}")]
    Illegal(String),
    #[error("{index} = {ty} is not realized by this construction: {why}")]
    NotRealized {
        index: String,
        ty: CanonicalOrderType,
        why: &'static str,
    },
    #[error("{index} = 1+eta needs its minimum color under \"min-colors\"")]
    MissingMinColor { index: String },
    #[error("minimum color {color} of {index} is not below the truncation {truncation}")]
    MinColorOutOfRange { index: String, color: u32, truncation: u32 },
    #[error("minimum color given for {index}, which has no minimum here")]
    StrayMinColor { index: String },
    #[error("cannot compare a {0} model with a {1} model")]
    Mismatch(String, String),
    #[error("part {part}: exact classification {exact} disagrees with probing ({probe})")]
    Disagreement { part: String, exact: String, probe: String },
    #[error("isomorphism evidence failed: {0}")]
    Evidence(String),
}

/// Largest finite uncolored part a `TDENSE` build accepts.
pub const MAX_FINITE_PART: u64 = 4096;

fn legality(index: &str, e: LegalityError, labels: &[String]) -> WorkbenchError {
    let name = |i: usize| labels.get(i).cloned().unwrap_or_else(|| i.to_string());
    let msg = match e {
        LegalityError::NotAnInvariant(t) => format!("{t} is not a possible invariant"),
        LegalityError::TwoMinima(i, j) => format!("{} and {} both have a minimum", name(i), name(j)),
        LegalityError::TwoMaxima(i, j) => format!("{} and {} both have a maximum", name(i), name(j)),
        LegalityError::SingletonNotAlone(i, j) => {
            format!("{} is a single point, so {} must be omitted", name(i), name(j))
        }
        LegalityError::DenseNotUniform(i, j) => format!("{} is dense, so {} must be dense too", name(i), name(j)),
        LegalityError::WrongEndpoint { index: i, found } => {
            format!("{} = {found} has a maximum, which this type cannot have", name(i))
        }
    };
    WorkbenchError::Illegal(if labels.len() == 1 {
        format!("{index}: {msg}")
    } else {
        msg
    })
}

/// Checks that `t` names exactly the indices of `tag` and is legal there.
pub fn check_tuple(tag: TheoryTag, t: &InvariantTuple) -> Result<(), WorkbenchError> {
    if t.truncation == 0 {
        return Err(WorkbenchError::ZeroTruncation);
    }
    let indices = tag.indices(t.truncation);
    for k in t.entries.keys() {
        if !indices.contains(k) {
            return Err(WorkbenchError::UnknownIndex {
                theory: tag,
                index: k.clone(),
            });
        }
    }
    if let Some(missing) = indices.iter().find(|k| !t.entries.contains_key(*k)) {
        return Err(WorkbenchError::MissingIndex(missing.clone()));
    }
    for k in t.min_colors.keys() {
        if tag != TheoryTag::T1 || t.get(k) != Some(ONE_ETA) {
            return Err(WorkbenchError::StrayMinColor { index: k.clone() });
        }
    }
    match tag {
        TheoryTag::T0 | TheoryTag::T1 | TheoryTag::TShuf => {
            let p = t.get("p").expect("index checked above");
            check_class_tuple(ClassKind::DefinableRight, &[p]).map_err(|e| legality("p", e, &["p".into()]))?;
            if tag == TheoryTag::T1 && p == ONE_ETA {
                match t.min_colors.get("p") {
                    None => return Err(WorkbenchError::MissingMinColor { index: "p".into() }),
                    Some(&color) if color >= t.truncation => {
                        return Err(WorkbenchError::MinColorOutOfRange {
                            index: "p".into(),
                            color,
                            truncation: t.truncation,
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        TheoryTag::TDense => {
            let q = t.get("q").expect("index checked above");
            if matches!(q, CanonicalOrderType::Finite(n) if n > MAX_FINITE_PART) {
                return Err(WorkbenchError::NotRealized {
                    index: "q".into(),
                    ty: q,
                    why: "finite parts are built up to 4096 points",
                });
            }
        }
        TheoryTag::T91 => {
            let labels: Vec<String> = (0..t.truncation).map(|i| format!("p_{i}")).collect();
            check_class_tuple(ClassKind::DefinableRight, &t.p_entries()).map_err(|e| legality("p", e, &labels))?;
            let q = t.get("q").expect("index checked above");
            if !matches!(q, CanonicalOrderType::Empty) && q != ETA && q != ONE_ETA {
                return Err(WorkbenchError::NotRealized {
                    index: "q".into(),
                    ty: q,
                    why: "q lies to the right of every block and the model has no greatest element",
                });
            }
        }
    }
    Ok(())
}

/// A canonical model: its tuple and the conventional name, if it has one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedTuple {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub tuple: InvariantTuple,
}

/// Every legal invariant tuple of `tag` at truncation `b`, one per
/// isomorphism type. For `TDENSE` the finite parts are cut at `b` points.
pub fn list_canonical_models(tag: TheoryTag, b: u32) -> Vec<NamedTuple> {
    let b = b.max(1);
    let named = |name: Option<String>, t: InvariantTuple| NamedTuple { name, tuple: t };
    let p_names = [("M_∅", CanonicalOrderType::Empty), ("M_∞", ETA), ("M_•", ONE_ETA)];
    match tag {
        TheoryTag::T0 => p_names
            .iter()
            .map(|&(n, p)| named(Some(n.into()), InvariantTuple::new(b, [("p", p)])))
            .collect(),
        TheoryTag::T1 => {
            let mut out: Vec<_> = p_names[..2]
                .iter()
                .map(|&(n, p)| named(Some(n.into()), InvariantTuple::new(b, [("p", p)])))
                .collect();
            out.extend((0..b).map(|i| {
                named(
                    Some(format!("M_{i}")),
                    InvariantTuple::new(b, [("p", ONE_ETA)]).with_min_color("p", i),
                )
            }));
            out
        }
        TheoryTag::TShuf => p_names
            .iter()
            .map(|&(_, p)| named(None, InvariantTuple::new(b, [("p", p)])))
            .collect(),
        TheoryTag::TDense => {
            let finite = (1..=b as u64).map(CanonicalOrderType::Finite);
            let dense = INVARIANT_TYPES.into_iter().filter(|t| t.is_dense());
            std::iter::once(CanonicalOrderType::Empty)
                .chain(finite)
                .chain(dense)
                .map(|q| named(None, InvariantTuple::new(b, [("q", q)])))
                .collect()
        }
        TheoryTag::T91 => {
            let class = ClassSummary {
                n: ClassSize::Infinite,
                kind: ClassKind::DefinableRight,
            };
            let ps = enumerate_invariant_tuples(&class, b as usize);
            let mut out = Vec::new();
            for q in [CanonicalOrderType::Empty, ETA, ONE_ETA] {
                for p in &ps {
                    let entries = std::iter::once(("q".to_string(), q))
                        .chain(p.iter().enumerate().map(|(i, &x)| (format!("p_{i}"), x)));
                    out.push(named(None, InvariantTuple::new(b, entries)));
                }
            }
            out
        }
    }
}

/// Exact classification of each designated part, cross-checked by probing
/// `probe` enumerated elements of the part.
pub fn extract_invariant_tuple(m: &Model, probe: usize) -> Result<InvariantTuple, WorkbenchError> {
    let mut t = InvariantTuple::new(m.truncation(), std::iter::empty::<(String, CanonicalOrderType)>());
    for part in m.parts() {
        let exact = model::classify_exact(&part.order);
        let probed = model::classify_probe(&part.order, probe);
        if probed.as_ref().map_or(true, |p| *p != exact) {
            return Err(WorkbenchError::Disagreement {
                part: part.name.clone(),
                exact: exact.to_string(),
                probe: probed.map_or_else(|e| e, |p| p.to_string()),
            });
        }
        t.entries.insert(part.name.clone(), exact);
        if m.theory() == TheoryTag::T1 && exact == ONE_ETA {
            let min = part.order.minimum().expect("1+eta has a minimum");
            t.min_colors.insert(part.name.clone(), m.min_color_index(&min));
        }
    }
    Ok(t)
}

/// Outcome of [`decide_iso_models`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelVerdict {
    pub iso: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Pairs of a partial isomorphism found by back-and-forth.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<(String, String)>>,
}

/// Models of one theory and truncation are isomorphic iff their invariant
/// tuples agree (with minimum colors for `T1`). With `evidence`, an
/// isomorphic pair is also matched by back-and-forth for that many steps.
pub fn decide_iso_models(m: &Model, n: &Model, evidence: Option<usize>) -> Result<ModelVerdict, WorkbenchError> {
    if m.theory() != n.theory() || m.truncation() != n.truncation() {
        return Err(WorkbenchError::Mismatch(
            format!("{}/{}", m.theory(), m.truncation()),
            format!("{}/{}", n.theory(), n.truncation()),
        ));
    }
    let (a, b) = (m.requested(), n.requested());
    let mut reason = None;
    for (k, x) in &a.entries {
        let y = b.entries[k];
        if *x != y {
            reason = Some(format!("{k}: {x} vs {y}"));
            break;
        }
    }
    if reason.is_none() && a.min_colors != b.min_colors {
        let k = a
            .min_colors
            .keys()
            .chain(b.min_colors.keys())
            .next()
            .expect("maps differ");
        reason = Some(format!(
            "minimum color of {k}: D_{} vs D_{}",
            a.min_colors[k], b.min_colors[k]
        ));
    }
    if reason.is_none() && m.theory() == TheoryTag::TDense {
        let (sa, sb) = (
            m.spec().expect("TDENSE is spec-built"),
            n.spec().expect("TDENSE is spec-built"),
        );
        if let SpecVerdict::NotIso(why) = decide_iso_spec(sa, sb).expect("built specs are valid") {
            reason = Some(why);
        }
    }
    if let Some(reason) = reason {
        return Ok(ModelVerdict {
            iso: false,
            reason: Some(reason),
            witness: None,
        });
    }
    let witness = match evidence {
        None => None,
        Some(steps) => match build_iso(m, n, steps).map_err(|e| WorkbenchError::Evidence(e.to_string()))? {
            BuildOutcome::Iso(f) => Some(f.pairs().iter().map(|(x, y)| (x.to_string(), y.to_string())).collect()),
            BuildOutcome::Obstruction(o) => return Err(WorkbenchError::Evidence(o.reason)),
        },
    };
    Ok(ModelVerdict {
        iso: true,
        reason: None,
        witness,
    })
}

#[cfg(test)]
mod tests;
