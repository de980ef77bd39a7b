//! Partial isomorphisms over the quantifier-free signature and the
//! dovetailed back-and-forth construction.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::realize::{Block, ColoredOrderSpec, SpecError};
use crate::structure::{pattern_of, Color, OrderedStructure, RelSym, WitnessError};

/// Order, one unary predicate per color, and the family relations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QfSignature {
    pub colors: BTreeSet<Color>,
    pub relations: BTreeSet<RelSym>,
}

impl QfSignature {
    /// Relation symbols of `s` and the colors seen among its first
    /// `sample` elements.
    pub fn observe<S: OrderedStructure>(s: &S, sample: usize) -> Self {
        QfSignature {
            colors: s.elements().take(sample).map(|x| s.color(&x)).collect(),
            relations: s.relation_symbols().into_iter().collect(),
        }
    }
}

/// A true atomic formula about positions of a tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Equal(usize, usize),
    Less(usize, usize),
    Colored(Color, usize),
    Related(RelSym, usize, usize),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Equal(i, j) => write!(f, "x{i}=x{j}"),
            Atom::Less(i, j) => write!(f, "x{i}<x{j}"),
            Atom::Colored(c, i) => write!(f, "C{c}(x{i})"),
            Atom::Related(RelSym(a, b), i, j) => write!(f, "S{a},{b}(x{i},x{j})"),
        }
    }
}

/// The complete atomic diagram of a tuple: the set of its true atoms.
/// Every atom not listed is false.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QfType {
    pub atoms: BTreeSet<Atom>,
}

impl QfType {
    pub fn render(&self) -> Vec<String> {
        self.atoms.iter().map(Atom::to_string).collect()
    }
}

pub fn qf_type<S: OrderedStructure + ?Sized>(s: &S, tuple: &[S::Elem]) -> QfType {
    let syms = s.relation_symbols();
    let mut atoms = BTreeSet::new();
    for (i, x) in tuple.iter().enumerate() {
        atoms.insert(Atom::Colored(s.color(x), i));
        for (j, y) in tuple.iter().enumerate() {
            match s.compare(x, y) {
                Ordering::Less => {
                    atoms.insert(Atom::Less(i, j));
                }
                Ordering::Equal if i < j => {
                    atoms.insert(Atom::Equal(i, j));
                }
                _ => {}
            }
            for &sym in &syms {
                if s.related(sym, x, y) {
                    atoms.insert(Atom::Related(sym, i, j));
                }
            }
        }
    }
    QfType { atoms }
}

/// A finite map between two structures, as an ordered list of pairs.
#[derive(Debug, Clone)]
pub struct PartialIso<A, B> {
    pairs: Vec<(A, B)>,
    domain: HashSet<A>,
    range: HashSet<B>,
}

impl<A: PartialEq, B: PartialEq> PartialEq for PartialIso<A, B> {
    fn eq(&self, other: &Self) -> bool {
        self.pairs == other.pairs
    }
}

impl<A: Eq, B: Eq> Eq for PartialIso<A, B> {}

impl<A: Clone + Eq + std::hash::Hash, B: Clone + Eq + std::hash::Hash> PartialIso<A, B> {
    pub fn empty() -> Self {
        PartialIso {
            pairs: Vec::new(),
            domain: HashSet::new(),
            range: HashSet::new(),
        }
    }

    pub fn pairs(&self) -> &[(A, B)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn domain(&self) -> Vec<A> {
        self.pairs.iter().map(|(a, _)| a.clone()).collect()
    }

    pub fn range(&self) -> Vec<B> {
        self.pairs.iter().map(|(_, b)| b.clone()).collect()
    }

    pub fn in_domain(&self, a: &A) -> bool {
        self.domain.contains(a)
    }

    pub fn in_range(&self, b: &B) -> bool {
        self.range.contains(b)
    }

    pub fn image(&self, a: &A) -> Option<&B> {
        self.pairs.iter().find(|(x, _)| x == a).map(|(_, y)| y)
    }

    fn push(&mut self, a: A, b: B) {
        self.domain.insert(a.clone());
        self.range.insert(b.clone());
        self.pairs.push((a, b));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// A new element of the first structure is given a partner.
    Forth,
    /// A new element of the second structure is given a partner.
    Back,
}

/// Whether the atoms hold identically on domain and range.
pub fn verify<M: OrderedStructure, N: OrderedStructure>(m: &M, n: &N, f: &PartialIso<M::Elem, N::Elem>) -> bool {
    qf_type(m, &f.domain()) == qf_type(n, &f.range())
}

type MapOf<M, N> = PartialIso<<M as OrderedStructure>::Elem, <N as OrderedStructure>::Elem>;

/// Extends `f` by `x`, searching a partner with the same atomic type over
/// the existing pairs and the same region label. `None` means the witness
/// solver proved that no partner exists.
pub fn extend<M: OrderedStructure, N: OrderedStructure>(
    m: &M,
    n: &N,
    f: &PartialIso<M::Elem, N::Elem>,
    x: Either<M::Elem, N::Elem>,
) -> Result<Option<MapOf<M, N>>, WitnessError> {
    let mut g = f.clone();
    match x {
        Either::Left(x) => {
            let pattern = pattern_of(m, &f.domain(), &x);
            let Some(y) = n.find_partner(&f.range(), &pattern)? else {
                return Ok(None);
            };
            g.push(x, y);
        }
        Either::Right(y) => {
            let pattern = pattern_of(n, &f.range(), &y);
            let Some(x) = m.find_partner(&f.domain(), &pattern)? else {
                return Ok(None);
            };
            g.push(x, y);
        }
    }
    Ok(Some(g))
}

/// An element of one of two structures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Either<A, B> {
    Left(A),
    Right(B),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub direction: Direction,
    pub element: String,
    /// Size of the partial isomorphism when the obstruction was met.
    pub size: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuildOutcome<A, B> {
    Iso(PartialIso<A, B>),
    Obstruction(Obstruction),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("structures have different relation symbols")]
    SignatureMismatch,
    #[error("constructed map fails atom re-verification at size {0}")]
    Unsound(usize),
    #[error(transparent)]
    Witness(#[from] WitnessError),
}

/// Back-and-forth for `steps` pairs: landmarks are matched in order first,
/// then the enumerations of `m` and `n` are dovetailed, forth then back.
/// The result is re-verified atom by atom.
pub fn build_iso<M: OrderedStructure, N: OrderedStructure>(
    m: &M,
    n: &N,
    steps: usize,
) -> Result<BuildOutcome<M::Elem, N::Elem>, EngineError> {
    if m.relation_symbols() != n.relation_symbols() {
        return Err(EngineError::SignatureMismatch);
    }
    let mut f = PartialIso::empty();

    let (lm, ln) = (m.landmarks(), n.landmarks());
    for k in 0..lm.len().max(ln.len()) {
        let (x, y) = match (lm.get(k), ln.get(k)) {
            (Some(x), Some(y)) => (x.clone(), y.clone()),
            (Some(x), None) => {
                return Ok(BuildOutcome::Obstruction(Obstruction {
                    direction: Direction::Forth,
                    element: x.to_string(),
                    size: f.len(),
                    reason: format!(
                        "first structure has {} definable points, second has {}",
                        lm.len(),
                        ln.len()
                    ),
                }))
            }
            (None, Some(y)) => {
                return Ok(BuildOutcome::Obstruction(Obstruction {
                    direction: Direction::Back,
                    element: y.to_string(),
                    size: f.len(),
                    reason: format!(
                        "first structure has {} definable points, second has {}",
                        lm.len(),
                        ln.len()
                    ),
                }))
            }
            (None, None) => unreachable!(),
        };
        let same_region = m.region(&x) == n.region(&y);
        let same_atoms = pattern_of(m, &f.domain(), &x) == pattern_of(n, &f.range(), &y);
        if !(same_region && same_atoms) {
            return Ok(BuildOutcome::Obstruction(Obstruction {
                direction: Direction::Forth,
                element: x.to_string(),
                size: f.len(),
                reason: format!("definable point {x} and its counterpart {y} differ in color or position"),
            }));
        }
        f.push(x, y);
    }

    let mut xs = m.elements();
    let mut ys = n.elements();
    while f.len() < steps {
        let mut progressed = false;
        if let Some(x) = xs.by_ref().find(|x| !f.in_domain(x)) {
            progressed = true;
            match extend(m, n, &f, Either::Left(x.clone()))? {
                Some(g) => f = g,
                None => {
                    return Ok(BuildOutcome::Obstruction(Obstruction {
                        direction: Direction::Forth,
                        element: x.to_string(),
                        size: f.len(),
                        reason: format!("no partner for {x} in the second structure"),
                    }))
                }
            }
        }
        if f.len() >= steps {
            break;
        }
        if let Some(y) = ys.by_ref().find(|y| !f.in_range(y)) {
            progressed = true;
            match extend(m, n, &f, Either::Right(y.clone()))? {
                Some(g) => f = g,
                None => {
                    return Ok(BuildOutcome::Obstruction(Obstruction {
                        direction: Direction::Back,
                        element: y.to_string(),
                        size: f.len(),
                        reason: format!("no partner for {y} in the first structure"),
                    }))
                }
            }
        }
        if !progressed {
            break;
        }
    }
    if !verify(m, n, &f) {
        return Err(EngineError::Unsound(f.len()));
    }
    Ok(BuildOutcome::Iso(f))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "kebab-case")]
pub enum SpecVerdict {
    Iso,
    NotIso(String),
}

/// Two specs present isomorphic structures iff their normalized block
/// lists coincide. Colors are names: a permutation of colors is a
/// different structure unless applied explicitly with
/// [`ColoredOrderSpec::recolor`].
pub fn decide_iso_spec(a: &ColoredOrderSpec, b: &ColoredOrderSpec) -> Result<SpecVerdict, SpecError> {
    a.validate()?;
    b.validate()?;
    let (na, nb) = (a.normalized().blocks, b.normalized().blocks);
    if na == nb {
        return Ok(SpecVerdict::Iso);
    }
    if na.len() != nb.len() {
        return Ok(SpecVerdict::NotIso(format!("block count {} vs {}", na.len(), nb.len())));
    }
    let (k, x, y) = na
        .iter()
        .zip(&nb)
        .enumerate()
        .find_map(|(k, (x, y))| (x != y).then_some((k, x, y)))
        .expect("lists differ");
    let colors = |s: &BTreeSet<Color>| s.iter().map(Color::to_string).collect::<Vec<_>>().join(",");
    let endpoint = |e: &Option<Color>| e.map_or("none".to_string(), |c| c.to_string());
    let reason = match (x, y) {
        (Block::Point(c), Block::Point(d)) => format!("block {k}: point color {c} vs {d}"),
        (Block::Point(_), Block::Dense(_)) => format!("block {k}: point vs dense"),
        (Block::Dense(_), Block::Point(_)) => format!("block {k}: dense vs point"),
        (Block::Dense(p), Block::Dense(q)) => {
            if p.colors != q.colors {
                format!(
                    "block {k}: color set {{{}}} vs {{{}}}",
                    colors(&p.colors),
                    colors(&q.colors)
                )
            } else if p.min.is_some() != q.min.is_some() {
                format!("block {k}: min exists in only one")
            } else if p.min != q.min {
                format!("block {k}: min color {} vs {}", endpoint(&p.min), endpoint(&q.min))
            } else if p.max.is_some() != q.max.is_some() {
                format!("block {k}: max exists in only one")
            } else {
                format!("block {k}: max color {} vs {}", endpoint(&p.max), endpoint(&q.max))
            }
        }
    };
    Ok(SpecVerdict::NotIso(reason))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use crate::realize::{realize_spec, realize_spec_variant, RealizedOrder};
    use crate::structure::Plain;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn spec(blocks: Vec<Block>) -> ColoredOrderSpec {
        ColoredOrderSpec::new(blocks)
    }

    fn iso_size<A, B>(o: &BuildOutcome<A, B>) -> Option<usize>
    where
        A: Clone + Eq + std::hash::Hash,
        B: Clone + Eq + std::hash::Hash,
    {
        match o {
            BuildOutcome::Iso(f) => Some(f.len()),
            BuildOutcome::Obstruction(_) => None,
        }
    }

    #[test]
    fn qf_type_readout() {
        let m = RealizedOrder::dense_partition(2).unwrap();
        assert_eq!(qf_type(&m, &[r(1, 3)]).render(), vec!["C0(x0)"]);
        let t = qf_type(&m, &[r(1, 3), r(1, 2)]);
        assert_eq!(t.render(), vec!["x0<x1", "C0(x0)", "C1(x1)"]);
    }

    #[test]
    fn extend_examples() {
        let m = RealizedOrder::dense_partition(2).unwrap();
        let f = PartialIso::empty();
        let g = extend(&m, &m, &f, Either::Left(r(1, 2))).unwrap().unwrap();
        assert_eq!(m.color(&g.pairs()[0].1), Color(1));

        let mut f = PartialIso::empty();
        f.push(Rational::ZERO, Rational::ZERO);
        let g = extend(&m, &m, &f, Either::Left(Rational::ONE)).unwrap().unwrap();
        let y = g.image(&Rational::ONE).unwrap();
        assert!(*y > Rational::ZERO);
        assert_eq!(m.color(y), m.color(&Rational::ONE));
    }

    #[test]
    fn colored_minimum_has_no_partner_without_one() {
        let a = realize_spec(&spec(vec![Block::dense([0], Some(0), None)])).unwrap();
        let b = realize_spec(&spec(vec![Block::dense([0], None, None)])).unwrap();
        let min = a.minimum().unwrap();
        assert_eq!(extend(&a, &b, &PartialIso::empty(), Either::Left(min)), Ok(None));
    }

    #[test]
    fn one_plus_eta_against_eta_obstructs_at_the_minimum() {
        let a = realize_spec(&spec(vec![Block::dense([0], Some(0), None)])).unwrap();
        let b = realize_spec(&spec(vec![Block::dense([0], None, None)])).unwrap();
        match build_iso(&a, &b, 64).unwrap() {
            BuildOutcome::Obstruction(o) => {
                assert_eq!(o.direction, Direction::Forth);
                assert_eq!(o.element, a.minimum().unwrap().to_string());
            }
            BuildOutcome::Iso(_) => panic!("1+eta is not eta"),
        }
    }

    #[test]
    fn variants_of_one_spec_are_isomorphic_to_depth_64() {
        let s = spec(vec![
            Block::point(2),
            Block::dense([0, 1], Some(1), None),
            Block::dense([0, 1], None, Some(0)),
            Block::dense([2], None, None),
        ]);
        let a = realize_spec_variant(&s, 0).unwrap();
        let b = realize_spec_variant(&s, 1).unwrap();
        let out = build_iso(&a, &b, 64).unwrap();
        assert_eq!(iso_size(&out), Some(64));
        if let BuildOutcome::Iso(f) = out {
            assert!(verify(&a, &b, &f));
        }
    }

    #[test]
    fn structure_is_isomorphic_to_itself() {
        let m = RealizedOrder::dense_partition(3).unwrap();
        assert_eq!(iso_size(&build_iso(&m, &m, 100).unwrap()), Some(100));
    }

    #[test]
    fn finite_orders_stop_when_exhausted() {
        let s = spec(vec![Block::point(0), Block::point(1), Block::point(0)]);
        let a = realize_spec(&s).unwrap();
        let b = realize_spec_variant(&s, 2).unwrap();
        assert_eq!(iso_size(&build_iso(&a, &b, 64).unwrap()), Some(3));
    }

    /// `eta + 1 + eta` against `eta` in one color, on order and colors only.
    #[test]
    fn eta_one_eta_is_eta_on_the_plain_signature() {
        let a = realize_spec(&spec(vec![
            Block::dense([0], None, None),
            Block::point(0),
            Block::dense([0], None, None),
        ]))
        .unwrap();
        let b = realize_spec(&spec(vec![Block::dense([0], None, None)])).unwrap();
        assert_eq!(iso_size(&build_iso(&Plain(&a), &Plain(&b), 64).unwrap()), Some(64));
        assert_eq!(
            decide_iso_spec(a.spec().unwrap(), b.spec().unwrap()),
            Ok(SpecVerdict::Iso)
        );
    }

    #[test]
    fn spec_decisions() {
        let min0 = spec(vec![Block::dense([0, 1], Some(0), None)]);
        let bare = spec(vec![Block::dense([0, 1], None, None)]);
        assert_eq!(
            decide_iso_spec(&min0, &bare),
            Ok(SpecVerdict::NotIso("block 0: min exists in only one".into()))
        );
        let swapped = bare.recolor(|c| Color(1 - c.0));
        assert_eq!(decide_iso_spec(&bare, &swapped), Ok(SpecVerdict::Iso));
        let minswap = min0.recolor(|c| Color(1 - c.0));
        assert_eq!(
            decide_iso_spec(&min0, &minswap),
            Ok(SpecVerdict::NotIso("block 0: min color 0 vs 1".into()))
        );
        assert_eq!(decide_iso_spec(&min0, &min0), Ok(SpecVerdict::Iso));
        let two = spec(vec![Block::point(0), Block::point(0)]);
        assert_eq!(
            decide_iso_spec(&two, &bare),
            Ok(SpecVerdict::NotIso("block count 2 vs 1".into()))
        );
        let bad = spec(vec![Block::dense([], None, None)]);
        assert_eq!(decide_iso_spec(&bad, &bare), Err(SpecError::EmptyColorSet(0)));
    }
}
