use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Palette, Piece, RealizedOrder, Span};
use crate::rational::Rational;
use crate::structure::{Color, Region};

/// A shuffle of dense colors, optionally closed off by colored endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DenseBlock {
    pub colors: BTreeSet<Color>,
    pub min: Option<Color>,
    pub max: Option<Color>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    Point(Color),
    Dense(DenseBlock),
}

impl Block {
    pub fn dense<I: IntoIterator<Item = u64>>(colors: I, min: Option<u64>, max: Option<u64>) -> Self {
        Block::Dense(DenseBlock {
            colors: colors.into_iter().map(Color).collect(),
            min: min.map(Color),
            max: max.map(Color),
        })
    }

    pub fn point(c: u64) -> Self {
        Block::Point(Color(c))
    }
}

/// Finite presentation of a colored countable order: a sum of points and
/// dense shuffles.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColoredOrderSpec {
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("block {0}: a dense shuffle needs a non-empty color set")]
    EmptyColorSet(usize),
    #[error("block {block}: endpoint color {color} is not among the shuffled colors")]
    EndpointOutsideColorSet { block: usize, color: Color },
    #[error("block {0}: the blank color cannot be used in a spec")]
    BlankColor(usize),
}

impl ColoredOrderSpec {
    pub fn new(blocks: Vec<Block>) -> Self {
        ColoredOrderSpec { blocks }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        for (i, b) in self.blocks.iter().enumerate() {
            match b {
                Block::Point(c) if c.is_blank() => return Err(SpecError::BlankColor(i)),
                Block::Point(_) => {}
                Block::Dense(d) => {
                    if d.colors.is_empty() {
                        return Err(SpecError::EmptyColorSet(i));
                    }
                    if d.colors.iter().any(|c| c.is_blank()) {
                        return Err(SpecError::BlankColor(i));
                    }
                    for c in d.min.iter().chain(d.max.iter()) {
                        if !d.colors.contains(c) {
                            return Err(SpecError::EndpointOutsideColorSet { block: i, color: *c });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// All colors used by the spec.
    pub fn colors(&self) -> BTreeSet<Color> {
        let mut out = BTreeSet::new();
        for b in &self.blocks {
            match b {
                Block::Point(c) => {
                    out.insert(*c);
                }
                Block::Dense(d) => out.extend(d.colors.iter().copied()),
            }
        }
        out
    }

    /// The same spec with every color renamed by `f`.
    pub fn recolor(&self, f: impl Fn(Color) -> Color) -> ColoredOrderSpec {
        let blocks = self
            .blocks
            .iter()
            .map(|b| match b {
                Block::Point(c) => Block::Point(f(*c)),
                Block::Dense(d) => Block::Dense(DenseBlock {
                    colors: d.colors.iter().map(|c| f(*c)).collect(),
                    min: d.min.map(&f),
                    max: d.max.map(&f),
                }),
            })
            .collect();
        ColoredOrderSpec { blocks }
    }

    /// Canonical block list: adjacent dense shuffles over the same colors
    /// merge when at most one endpoint sits between them, and a point of a
    /// shuffled color is absorbed into an adjacent endpoint-free side.
    pub fn normalized(&self) -> ColoredOrderSpec {
        ColoredOrderSpec {
            blocks: self.normalize_tracked().into_iter().map(|(b, _)| b).collect(),
        }
    }

    /// Normalized blocks, each with the raw block indices it covers.
    pub(crate) fn normalize_tracked(&self) -> Vec<(Block, Vec<usize>)> {
        let mut stack: Vec<(Block, Vec<usize>)> = Vec::new();
        for (i, b) in self.blocks.iter().enumerate() {
            stack.push((b.clone(), vec![i]));
            while stack.len() >= 2 {
                let n = stack.len();
                let Some(merged) = merge(&stack[n - 2].0, &stack[n - 1].0) else {
                    break;
                };
                let (_, right) = stack.pop().unwrap();
                let top = stack.last_mut().unwrap();
                top.0 = merged;
                top.1.extend(right);
            }
        }
        stack
    }
}

fn merge(left: &Block, right: &Block) -> Option<Block> {
    use Block::*;
    match (left, right) {
        (Dense(a), Dense(b)) if a.colors == b.colors && !(a.max.is_some() && b.min.is_some()) => {
            Some(Dense(DenseBlock {
                colors: a.colors.clone(),
                min: a.min,
                max: b.max,
            }))
        }
        (Dense(a), Point(c)) if a.max.is_none() && a.colors.contains(c) => Some(Dense(DenseBlock {
            colors: a.colors.clone(),
            min: a.min,
            max: Some(*c),
        })),
        (Point(c), Dense(b)) if b.min.is_none() && b.colors.contains(c) => Some(Dense(DenseBlock {
            colors: b.colors.clone(),
            min: Some(*c),
            max: b.max,
        })),
        _ => None,
    }
}

/// Realizes `spec` with block `n` inside the rational interval `(n, n+1)`.
pub fn realize_spec(spec: &ColoredOrderSpec) -> Result<RealizedOrder, SpecError> {
    realize_spec_variant(spec, 0)
}

/// An alternative realization: blocks are shifted by `100 * variant` and
/// the assignment of 2-adic classes to colors is rotated by `variant`, so
/// distinct variants use different rationals for the same color.
pub fn realize_spec_variant(spec: &ColoredOrderSpec, variant: u32) -> Result<RealizedOrder, SpecError> {
    spec.validate()?;
    let tracked = spec.normalize_tracked();
    let mut region_of_raw = vec![0usize; spec.blocks.len()];
    for (j, (_, raws)) in tracked.iter().enumerate() {
        for &r in raws {
            region_of_raw[r] = j;
        }
    }
    let quarter = Rational::new(1, 4);
    let offset = 100 * variant as i128;
    let mut pieces = Vec::new();
    for (n, b) in spec.blocks.iter().enumerate() {
        let origin = Rational::int(offset + n as i128);
        let j = region_of_raw[n];
        let region = Region(j as u64, 0);
        let raws = &tracked[j].1;
        let is_first = raws.first() == Some(&n);
        let is_last = raws.last() == Some(&n);
        match b {
            Block::Point(c) => {
                // a point survives normalization when its block is a point,
                // or it supplies an endpoint of the merged block
                let (r, landmark) = match &tracked[j].0 {
                    Block::Point(_) => (region, true),
                    Block::Dense(_) if is_first => (Region(j as u64, 1), true),
                    Block::Dense(_) if is_last => (Region(j as u64, 2), true),
                    Block::Dense(_) => (region, false),
                };
                pieces.push(Piece::point(origin + Rational::new(1, 2), *c, r, landmark));
            }
            Block::Dense(d) => {
                let lo = if d.min.is_some() { origin + quarter } else { origin };
                let hi = if d.max.is_some() {
                    origin + Rational::new(3, 4)
                } else {
                    origin + Rational::ONE
                };
                let palette: Vec<Color> = d.colors.iter().copied().collect();
                let k = palette.len();
                let colors = (0..k)
                    .map(|class| Some(palette[(class + variant as usize) % k]))
                    .collect();
                pieces.push(Piece::dense(
                    Span::open(lo, hi),
                    Palette::Modulo(k as u32),
                    colors,
                    region,
                ));
                // a definable endpoint gets a region of its own
                if let Some(c) = d.min {
                    let r = if is_first { Region(j as u64, 1) } else { region };
                    pieces.push(Piece::point(lo, c, r, is_first));
                }
                if let Some(c) = d.max {
                    let r = if is_last { Region(j as u64, 2) } else { region };
                    pieces.push(Piece::point(hi, c, r, is_last));
                }
            }
        }
    }
    Ok(RealizedOrder::from_pieces(pieces).with_spec(spec.clone()))
}
