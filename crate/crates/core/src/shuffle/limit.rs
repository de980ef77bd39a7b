use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use super::{check_coherence, RelationKind, ShuffleError, ShuffleFamily};
use crate::rational::Rational;
use crate::structure::{Color, OrderedStructure, Query, WitnessError};

/// The initial part of `A_0` denoted by an element of order `origin`:
/// `(-∞, anchor)` for origin 0 and `S_{0,origin}(A_0, anchor)` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Cut {
    pub origin: usize,
    pub anchor: Rational,
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.anchor, self.origin)
    }
}

pub fn cut_embed(f: &ShuffleFamily, i: usize, a: Rational) -> Result<Cut, ShuffleError> {
    if !f.order(i)?.contains(&a) {
        return Err(ShuffleError::NotInCarrier { index: i, elem: a });
    }
    Ok(Cut { origin: i, anchor: a })
}

/// Strict inclusion of cuts, decided by relation membership: for `i < j`
/// the cut of `a_i` is below the cut of `a_j` iff `(a_i, a_j) ∈ S_{i,j}`.
pub fn cut_compare(f: &ShuffleFamily, c1: &Cut, c2: &Cut) -> Result<Ordering, ShuffleError> {
    if c1 == c2 {
        return Err(ShuffleError::Reflexive);
    }
    match c1.origin.cmp(&c2.origin) {
        Ordering::Equal => Ok(c1.anchor.cmp(&c2.anchor)),
        Ordering::Less => {
            let inside = f.relation(c1.origin, c2.origin)?.member(&c1.anchor, &c2.anchor)?;
            Ok(if inside { Ordering::Less } else { Ordering::Greater })
        }
        Ordering::Greater => cut_compare(f, c2, c1).map(Ordering::reverse),
    }
}

/// The union of the images of all member orders inside the completion of
/// `A_0`, colored by origin index.
#[derive(Debug, Clone)]
pub struct LimitStructure {
    family: ShuffleFamily,
    /// `offsets[i]` maps an anchor of order `i` to its position on the
    /// line of `A_0`, when every `S_{0,i}` is an ambient shift.
    offsets: Option<Vec<Rational>>,
}

/// Builds the limit after checking coherence on `depth` elements.
pub fn limit_structure(f: &ShuffleFamily, depth: usize) -> Result<LimitStructure, ShuffleError> {
    for (&(i, j), r) in &f.relations {
        if !r.is_direct() {
            return Err(ShuffleError::Undecidable(i, j));
        }
    }
    let v = check_coherence(f, depth);
    if !v.passed() {
        return Err(ShuffleError::Incoherent(v.reason.unwrap_or_default()));
    }
    let mut offsets = vec![Rational::ZERO];
    for i in 1..f.len() {
        match f.relation(0, i)?.kind {
            RelationKind::Ambient { shift } => offsets.push(shift),
            _ => break,
        }
    }
    let offsets = (offsets.len() == f.len().max(1)).then_some(offsets);
    Ok(LimitStructure {
        family: f.clone(),
        offsets,
    })
}

impl LimitStructure {
    pub fn family(&self) -> &ShuffleFamily {
        &self.family
    }

    /// Whether witnesses can be solved exactly.
    pub fn has_solver(&self) -> bool {
        self.offsets.is_some()
    }
}

impl OrderedStructure for LimitStructure {
    type Elem = Cut;

    fn compare(&self, a: &Cut, b: &Cut) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        cut_compare(&self.family, a, b).expect("relations of a limit structure are decidable")
    }

    fn color(&self, a: &Cut) -> Color {
        Color(a.origin as u64)
    }

    /// Dovetails the member enumerations.
    fn elements(&self) -> Box<dyn Iterator<Item = Cut> + '_> {
        let mut iters: Vec<_> = self.family.orders().iter().map(|o| o.iter()).collect();
        let mut done = vec![false; iters.len()];
        let mut next = 0;
        Box::new(std::iter::from_fn(move || {
            while done.iter().any(|d| !d) {
                let k = next;
                next = (next + 1) % iters.len();
                if done[k] {
                    continue;
                }
                match iters[k].next() {
                    Some(anchor) => return Some(Cut { origin: k, anchor }),
                    None => done[k] = true,
                }
            }
            None
        }))
    }

    /// Solved through positions on the line of `A_0`; each candidate is
    /// re-validated by relation membership.
    fn witness(&self, q: &Query<'_, Cut>) -> Result<Option<Cut>, WitnessError> {
        let Some(offsets) = &self.offsets else {
            return Err(WitnessError::Incomplete(
                "limit witnesses need ambient-shift relations out of order 0".into(),
            ));
        };
        if let (Some(l), Some(u)) = (q.lower, q.upper) {
            if self.compare(l, u) != Ordering::Less {
                return Err(WitnessError::MalformedInterval {
                    lower: l.to_string(),
                    upper: u.to_string(),
                });
            }
        }
        let pos = |c: &Cut| c.anchor - offsets[c.origin];
        let origins: Vec<usize> = match q.color {
            Some(Color(c)) => (c < offsets.len() as u64).then_some(c as usize).into_iter().collect(),
            None => (0..offsets.len()).collect(),
        };
        let mut best: Option<Cut> = None;
        for k in origins {
            let lo = q.lower.map(|c| pos(c) + offsets[k]);
            let hi = q.upper.map(|c| pos(c) + offsets[k]);
            let inner = Query::between(lo.as_ref(), hi.as_ref());
            let Some(anchor) = self.family.orders()[k].witness(&inner)? else {
                continue;
            };
            let cut = Cut { origin: k, anchor };
            let above = q.lower.is_none_or(|l| self.compare(l, &cut) == Ordering::Less);
            let below = q.upper.is_none_or(|u| self.compare(&cut, u) == Ordering::Less);
            if !(above && below) {
                return Err(WitnessError::Incomplete(format!(
                    "position of {cut} disagrees with relation membership"
                )));
            }
            if best.is_none_or(|b| anchor.denom() < b.anchor.denom()) {
                best = Some(cut);
            }
        }
        Ok(best)
    }
}
