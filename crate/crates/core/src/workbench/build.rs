use super::model::{Blocks, Model, Part, P_BASE, Q_COLOR};
use super::{check_tuple, InvariantTuple, TheoryTag, WorkbenchError};
use crate::ordertype::{CanonicalOrderType, ETA, ETA_ONE, ONE_ETA, ONE_ETA_ONE};
use crate::rational::Rational;
use crate::realize::{realize_spec_variant, Block, ColoredOrderSpec, Palette, Piece, RealizedOrder, RungLayout, Span};
use crate::structure::{Color, Region};

/// Largest truncation for theories whose colors are told apart by 2-adic
/// classes: class `c` needs denominators divisible by `2^c`, and the
/// rungs of a ladder halve again.
pub const MAX_SHUFFLED_TRUNCATION: u32 = 32;

pub fn build_model(tag: TheoryTag, t: &InvariantTuple) -> Result<Model, WorkbenchError> {
    build_model_variant(tag, t, 0)
}

/// Another realization of the same tuple, placed on different rationals.
/// Used as the second side of back-and-forth evidence.
pub fn build_model_variant(tag: TheoryTag, t: &InvariantTuple, variant: u32) -> Result<Model, WorkbenchError> {
    check_tuple(tag, t)?;
    if tag != TheoryTag::T0 && t.truncation > MAX_SHUFFLED_TRUNCATION {
        return Err(WorkbenchError::TruncationTooLarge {
            theory: tag,
            max: MAX_SHUFFLED_TRUNCATION,
            got: t.truncation,
        });
    }
    let v = variant as i128;
    let (pieces, parts, blocks) = match tag {
        TheoryTag::T0 => convergent(t, v, Palette::Modulo(1)),
        TheoryTag::T1 => convergent(t, v, Palette::Modulo(t.truncation)),
        TheoryTag::TDense => return dense_colors(t, variant),
        TheoryTag::TShuf => shuffled(t, v, false),
        TheoryTag::T91 => shuffled(t, v, true),
    };
    let parts = parts
        .into_iter()
        .map(|(name, ps)| Part {
            name,
            order: RealizedOrder::from_pieces(ps),
        })
        .collect();
    Ok(Model {
        theory: tag,
        requested: t.clone(),
        carrier: RealizedOrder::from_pieces(pieces),
        parts,
        blocks,
    })
}

type Layout = (Vec<Piece>, Vec<(String, Vec<Piece>)>, Option<Blocks>);

/// A dense part from `start` on, with `start` itself as a definable
/// minimum when `ty` has one.
fn tail(
    ty: CanonicalOrderType,
    start: Rational,
    palette: Palette,
    colors: Vec<Option<Color>>,
    major: u64,
) -> Vec<Piece> {
    let mut out = Vec::new();
    if ty == CanonicalOrderType::Empty {
        return out;
    }
    if ty.has_min() {
        let c = colors[palette.class_of(&start) as usize].expect("minimum lies in a colored class");
        out.push(Piece::point(start, c, Region(major, 1), true));
    }
    out.push(Piece::dense(Span::above(start), palette, colors, Region(major, 0)));
    out
}

/// `T0` and `T1`: the colors `C_n` on the rungs `(-1/(n+1), -1/(n+2))`,
/// then the `p`-part to the right of `0`. Under `T1` every rung and the
/// `p`-part are split further into the dense colors `D_i`.
fn convergent(t: &InvariantTuple, v: i128, palette: Palette) -> Layout {
    let k = palette.classes() as u64;
    let ladder = Piece::Ladder {
        layout: RungLayout::Harmonic { origin: Rational::ZERO },
        palette,
        class_base: (0..k).map(Some).collect(),
        rung_stride: k,
        region_major: 0,
    };
    let p = t.get("p").expect("checked");
    // the minimum of p has 2-adic class i
    let start = match t.min_colors.get("p") {
        Some(&i) => Rational::int(v) + Rational::pow2_inv(i),
        None => Rational::int(v),
    };
    let colors = (0..k).map(|c| Some(Color(P_BASE + c))).collect();
    let p_pieces = tail(p, start, palette, colors, 1);
    let mut pieces = vec![ladder];
    pieces.extend(p_pieces.iter().cloned());
    (pieces, vec![("p".into(), p_pieces)], None)
}

/// `TDENSE`: dense colors `D_0 .. D_{B-1}` everywhere except on the
/// uncolored part `q`, presented as a spec.
fn dense_colors(t: &InvariantTuple, variant: u32) -> Result<Model, WorkbenchError> {
    let d = || Block::dense(0..t.truncation as u64, None, None);
    let dq = || Block::dense((0..t.truncation as u64).chain([Q_COLOR]), None, None);
    let q = || Block::point(Q_COLOR);
    let blocks = match t.get("q").expect("checked") {
        CanonicalOrderType::Empty => vec![d()],
        CanonicalOrderType::Finite(n) => {
            let mut b = vec![d()];
            for _ in 0..n {
                b.extend([q(), d()]);
            }
            b
        }
        x if x == ETA => vec![dq()],
        x if x == ONE_ETA => vec![d(), q(), dq()],
        x if x == ETA_ONE => vec![dq(), q(), d()],
        x if x == ONE_ETA_ONE => vec![d(), q(), dq(), q(), d()],
        _ => unreachable!("dense types are covered"),
    };
    let spec = ColoredOrderSpec::new(blocks);
    let carrier = realize_spec_variant(&spec, variant).expect("layout specs are valid");
    let q_part = carrier.restrict_colors(&[Color(Q_COLOR)]);
    Ok(Model {
        theory: TheoryTag::TDense,
        requested: t.clone(),
        carrier,
        parts: vec![Part {
            name: "q".into(),
            order: q_part,
        }],
        blocks: None,
    })
}

/// `TSHUF` and `T91`: block `O_i` is the set of rationals in `(i, i+1)`
/// whose 2-adic class (capped at `B-1`) is `i`, so the blocks are shuffled
/// by comparing `x - i`. With `inner`, each block starts with the convex
/// colors `C_{i,n}` on rungs accumulating at `i + c` and ends with the
/// part `p_i` above `i + c`. The last part (`q`, or `p` under `TSHUF`)
/// lies to the right of `B`.
fn shuffled(t: &InvariantTuple, v: i128, inner: bool) -> Layout {
    let b = t.truncation;
    let palette = Palette::Capped(b - 1);
    let only = |i: u32, c: u64| {
        let mut colors = vec![None; b as usize];
        colors[i as usize] = Some(Color(c));
        colors
    };
    let mut pieces = Vec::new();
    let mut parts = Vec::new();
    let ladder = inner.then(|| {
        let ps = t.p_entries();
        match ps.iter().position(|x| x.has_min()) {
            _ if ps.iter().all(|x| *x == CanonicalOrderType::Empty) => Rational::ONE,
            // c has 2-adic class k, so it is the minimum of p_k only
            k => {
                let k = k.unwrap_or(0) as u32;
                Rational::ONE - Rational::new(1, 2 * v + 3) * Rational::pow2_inv(k)
            }
        }
    });
    for i in 0..b {
        let origin = Rational::int(i as i128);
        match ladder {
            Some(width) => {
                let mut class_base = vec![None; b as usize];
                class_base[i as usize] = Some(i as u64);
                pieces.push(Piece::Ladder {
                    layout: RungLayout::Geometric { origin, width },
                    palette,
                    class_base,
                    rung_stride: b as u64,
                    region_major: i as u64,
                });
                let name = format!("p_{i}");
                let p = t.get(&name).expect("checked");
                let mut ps = Vec::new();
                if p != CanonicalOrderType::Empty {
                    let lo = origin + width;
                    let color = Color(P_BASE + i as u64);
                    ps.push(Piece::dense(
                        Span::open(lo, origin + Rational::ONE),
                        palette,
                        only(i, color.0),
                        Region((b + i) as u64, 0),
                    ));
                    if p.has_min() {
                        ps.push(Piece::point(lo, color, Region((b + i) as u64, 1), true));
                    }
                }
                pieces.extend(ps.iter().cloned());
                parts.push((name, ps));
            }
            None => pieces.push(Piece::dense(
                Span::open(origin, origin + Rational::ONE),
                palette,
                only(i, i as u64),
                Region(i as u64, 0),
            )),
        }
    }
    let name = if inner { "q" } else { "p" };
    let last = tail(
        t.get(name).expect("checked"),
        Rational::int(b as i128 + v),
        Palette::Modulo(1),
        vec![Some(Color(Q_COLOR))],
        2 * b as u64,
    );
    pieces.extend(last.iter().cloned());
    parts.insert(0, (name.to_string(), last));
    let blocks = Blocks { count: b, ladder };
    (pieces, parts, Some(blocks))
}
