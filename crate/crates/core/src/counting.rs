//! Counting countable models from per-class classification data.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::fmt;

use serde::de::{self, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ordertype::{CanonicalOrderType, ETA, ETA_ONE, ONE, ONE_ETA, ONE_ETA_ONE};

/// Size of a class of types: a positive integer or infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassSize {
    Finite(u64),
    Infinite,
}

impl Serialize for ClassSize {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ClassSize::Finite(n) => s.serialize_u64(*n),
            ClassSize::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ClassSize {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ClassSize;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a positive integer or \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, n: u64) -> Result<ClassSize, E> {
                match n {
                    0 => Err(E::custom("class size must be at least 1")),
                    n => Ok(ClassSize::Finite(n)),
                }
            }
            fn visit_str<E: de::Error>(self, w: &str) -> Result<ClassSize, E> {
                match w {
                    "inf" => Ok(ClassSize::Infinite),
                    _ => Err(E::invalid_value(de::Unexpected::Str(w), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassKind {
    /// Invariants in `{0, eta, eta+1}`.
    DefinableLeft,
    /// Invariants in `{0, eta, 1+eta}`.
    DefinableRight,
    NonDefinable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSummary {
    pub n: ClassSize,
    pub kind: ClassKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classes {
    List(Vec<ClassSummary>),
    InfinitelyMany,
}

impl Serialize for Classes {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Classes::List(v) => v.serialize(s),
            Classes::InfinitelyMany => s.serialize_str("infinitely-many"),
        }
    }
}

impl<'de> Deserialize<'de> for Classes {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Classes;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a list of classes or \"infinitely-many\"")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Classes, A::Error> {
                let mut v = Vec::new();
                while let Some(c) = seq.next_element()? {
                    v.push(c);
                }
                Ok(Classes::List(v))
            }
            fn visit_str<E: de::Error>(self, w: &str) -> Result<Classes, E> {
                match w {
                    "infinitely-many" => Ok(Classes::InfinitelyMany),
                    _ => Err(E::invalid_value(de::Unexpected::Str(w), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Classification data of a theory: the four failure flags and the
/// classes of non-orthogonality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheorySummary {
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub c4: bool,
    pub classes: Classes,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelCount {
    Finite(BigUint),
    Aleph0,
    Continuum,
}

impl Serialize for ModelCount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            // arbitrary precision: emitted as a JSON number
            ModelCount::Finite(k) => serde_json::Number::from_string_unchecked(k.to_string()).serialize(s),
            ModelCount::Aleph0 => s.serialize_str("aleph0"),
            ModelCount::Continuum => s.serialize_str("continuum"),
        }
    }
}

/// Number of possible invariants of one class.
pub fn kappa(c: &ClassSummary) -> Option<BigUint> {
    let ClassSize::Finite(n) = c.n else {
        return None;
    };
    let n = BigUint::from(n);
    Some(match c.kind {
        ClassKind::DefinableLeft | ClassKind::DefinableRight => n + 2u32,
        ClassKind::NonDefinable => &n * &n + 3u32 * &n + 2u32,
    })
}

/// `kappa` as JSON: an integer, or `"aleph0"` for an infinite class.
pub fn kappa_count(c: &ClassSummary) -> ModelCount {
    kappa(c).map_or(ModelCount::Aleph0, ModelCount::Finite)
}

/// The dense tuples of length `n` with at most one minimum and at most
/// one maximum, in the order: all eta; one `1+eta`; one `eta+1`; one
/// `1+eta+1`; one `1+eta` and another `eta+1`.
pub fn legal_dense_tuples(n: usize) -> Vec<Vec<CanonicalOrderType>> {
    let with = |edits: &[(usize, CanonicalOrderType)]| {
        let mut t = vec![ETA; n];
        for &(i, x) in edits {
            t[i] = x;
        }
        t
    };
    let mut out = vec![with(&[])];
    for special in [ONE_ETA, ETA_ONE, ONE_ETA_ONE] {
        out.extend((0..n).map(|i| with(&[(i, special)])));
    }
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            out.push(with(&[(i, ONE_ETA), (j, ETA_ONE)]));
        }
    }
    out
}

/// All invariant tuples of a class; an infinite class is cut to
/// `truncation` entries.
pub fn enumerate_invariant_tuples(c: &ClassSummary, truncation: usize) -> Vec<Vec<CanonicalOrderType>> {
    let n = match c.n {
        ClassSize::Finite(n) => n as usize,
        ClassSize::Infinite => truncation,
    };
    let uniform = |x| vec![x; n];
    match c.kind {
        ClassKind::DefinableLeft | ClassKind::DefinableRight => {
            let end = if c.kind == ClassKind::DefinableLeft {
                ETA_ONE
            } else {
                ONE_ETA
            };
            let mut out = vec![uniform(CanonicalOrderType::Empty), uniform(ETA)];
            for i in 0..n {
                let mut t = uniform(ETA);
                t[i] = end;
                out.push(t);
            }
            out
        }
        ClassKind::NonDefinable => {
            let mut out = vec![uniform(CanonicalOrderType::Empty)];
            for i in 0..n {
                let mut t = uniform(CanonicalOrderType::Empty);
                t[i] = ONE;
                out.push(t);
            }
            out.extend(legal_dense_tuples(n));
            out
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LegalityError {
    #[error("{0} is not a possible invariant")]
    NotAnInvariant(CanonicalOrderType),
    #[error("entries {0} and {1} both have a minimum")]
    TwoMinima(usize, usize),
    #[error("entries {0} and {1} both have a maximum")]
    TwoMaxima(usize, usize),
    #[error("entry {0} is a single point, so entry {1} must be omitted")]
    SingletonNotAlone(usize, usize),
    #[error("entry {0} is dense, so entry {1} must be dense too")]
    DenseNotUniform(usize, usize),
    #[error("entry {index} is {found}, which a definable class cannot have")]
    WrongEndpoint { index: usize, found: CanonicalOrderType },
}

/// Legality of a tuple of invariants of one class of shuffled types.
pub fn check_shuffled(t: &[CanonicalOrderType]) -> Result<(), LegalityError> {
    for &x in t {
        if matches!(x, CanonicalOrderType::Finite(n) if n != 1) {
            return Err(LegalityError::NotAnInvariant(x));
        }
    }
    let first = |p: &dyn Fn(CanonicalOrderType) -> bool, skip: Option<usize>| {
        t.iter()
            .enumerate()
            .find(|&(i, &x)| Some(i) != skip && p(x))
            .map(|(i, _)| i)
    };
    if let Some(i) = first(&|x| x.has_min(), None) {
        if let Some(j) = first(&|x| x.has_min(), Some(i)) {
            return Err(LegalityError::TwoMinima(i, j));
        }
    }
    if let Some(i) = first(&|x| x.has_max(), None) {
        if let Some(j) = first(&|x| x.has_max(), Some(i)) {
            return Err(LegalityError::TwoMaxima(i, j));
        }
    }
    if let Some(i) = first(&|x| x == ONE, None) {
        if let Some(j) = first(&|x| x != CanonicalOrderType::Empty, Some(i)) {
            return Err(LegalityError::SingletonNotAlone(i, j));
        }
    }
    if let Some(i) = first(&|x| x.is_dense(), None) {
        if let Some(j) = first(&|x| !x.is_dense(), None) {
            return Err(LegalityError::DenseNotUniform(i, j));
        }
    }
    Ok(())
}

/// Legality of a tuple of invariants of a class of the given kind.
pub fn check_class_tuple(kind: ClassKind, t: &[CanonicalOrderType]) -> Result<(), LegalityError> {
    check_shuffled(t)?;
    let banned: fn(CanonicalOrderType) -> bool = match kind {
        ClassKind::DefinableLeft => CanonicalOrderType::has_min,
        ClassKind::DefinableRight => CanonicalOrderType::has_max,
        ClassKind::NonDefinable => return Ok(()),
    };
    match t.iter().position(|&x| banned(x)) {
        Some(index) => Err(LegalityError::WrongEndpoint { index, found: t[index] }),
        None => Ok(()),
    }
}

/// The number of countable models up to isomorphism.
pub fn count_models(t: &TheorySummary) -> ModelCount {
    if t.c1 || t.c2 || t.c3 || t.c4 {
        return ModelCount::Continuum;
    }
    let Classes::List(classes) = &t.classes else {
        return ModelCount::Continuum;
    };
    let mut product = BigUint::one();
    for c in classes {
        match kappa(c) {
            Some(k) => product *= k,
            None => return ModelCount::Aleph0,
        }
    }
    debug_assert!(!product.is_zero());
    ModelCount::Finite(product)
}
