//! LS code tree and zero-gap code assembly.
//!
//! A tree node holds a Golay pair (the *base*) and its mate. The two codes
//! of a node are completely complementary: their C/S cross-correlation sums
//! vanish at every lag. A node `(P, M)` with `P = (C, S)` and
//! `M = mate(P) = (C', S')` has two children of twice the length:
//!
//! ```text
//! child 0: (C ⧺ C', S ⧺ S')
//! child 1: (C' ⧺ C, S' ⧺ S)
//! ```
//!
//! Both children are again Golay pairs, and every code of one child
//! correlates to zero against every code of the other for all lags
//! `|τ| < len(C)`. More generally the parts-only correlation of two codes is
//! zero for `|τ|` below the sub-code length of their deepest common ancestor.
//!
//! An [`LsCode`] lays a pair out as `C ⧺ 0^gap ⧺ S ⧺ 0^trailing_gap`. Inside
//! `|τ| <= gap` the C part of one code never overlaps the S part of another,
//! so the full-chip correlation there equals the parts-only sum.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::golay::{mate, BipolarSequence, GolayPair};
use crate::{Error, Result};

pub const MAX_DEPTH: usize = 8;
/// Longest sub-code the tree will build.
pub const MAX_SUBCODE_LEN: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodeFamily {
    Base,
    Mate,
}

/// Position of a code in the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodeId {
    pub layer: usize,
    pub node: usize,
    pub family: CodeFamily,
}

impl CodeId {
    pub const fn new(layer: usize, node: usize, family: CodeFamily) -> Self {
        Self {
            layer,
            node,
            family,
        }
    }
}

/// `L<layer>.N<node>.base` or `L<layer>.N<node>.mate`.
impl fmt::Display for CodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let family = match self.family {
            CodeFamily::Base => "base",
            CodeFamily::Mate => "mate",
        };
        write!(f, "L{}.N{}.{}", self.layer, self.node, family)
    }
}

impl FromStr for CodeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = Error::InvalidParameter {
            name: "code id",
            reason: "expected L<layer>.N<node>.<base|mate>",
        };
        let mut fields = s.split('.');
        let (Some(l), Some(n), Some(fam), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(bad);
        };
        let layer = l
            .strip_prefix('L')
            .and_then(|v| v.parse().ok())
            .ok_or(bad.clone())?;
        let node = n
            .strip_prefix('N')
            .and_then(|v| v.parse().ok())
            .ok_or(bad.clone())?;
        let family = match fam {
            "base" => CodeFamily::Base,
            "mate" => CodeFamily::Mate,
            _ => return Err(bad),
        };
        Ok(Self {
            layer,
            node,
            family,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub base: GolayPair,
    pub mate: GolayPair,
}

impl TreeNode {
    fn new(base: GolayPair) -> Self {
        let mate = mate(&base);
        Self { base, mate }
    }

    pub fn pair(&self, family: CodeFamily) -> &GolayPair {
        match family {
            CodeFamily::Base => &self.base,
            CodeFamily::Mate => &self.mate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LsCodeTree {
    seed: GolayPair,
    layers: Vec<Vec<TreeNode>>,
}

impl LsCodeTree {
    pub fn seed(&self) -> &GolayPair {
        &self.seed
    }

    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn layer(&self, layer: usize) -> Result<&[TreeNode]> {
        self.layers
            .get(layer)
            .map(Vec::as_slice)
            .ok_or(Error::LayerOutOfRange {
                layer,
                depth: self.depth(),
            })
    }

    /// Sub-code (C or S part) length at a layer: `N0 * 2^layer`.
    pub fn subcode_len(&self, layer: usize) -> usize {
        self.seed.len() << layer
    }

    pub fn pair(&self, id: CodeId) -> Result<&GolayPair> {
        self.layers
            .get(id.layer)
            .and_then(|nodes| nodes.get(id.node))
            .map(|n| n.pair(id.family))
            .ok_or(Error::UnknownCode)
    }

    /// All code ids of a layer, base then mate for each node.
    pub fn ids(&self, layer: usize) -> Result<Vec<CodeId>> {
        let nodes = self.layer(layer)?;
        Ok((0..nodes.len())
            .flat_map(|node| {
                [CodeFamily::Base, CodeFamily::Mate]
                    .into_iter()
                    .map(move |family| CodeId::new(layer, node, family))
            })
            .collect())
    }
}

fn child_pair(first: &GolayPair, second: &GolayPair) -> GolayPair {
    GolayPair::from_parts(first.c().concat(second.c()), first.s().concat(second.s()))
        .expect("parts of equal-length pairs have equal length")
}

/// Grows the code tree `depth` layers below `seed`.
pub fn expand(seed: &GolayPair, depth: usize) -> Result<LsCodeTree> {
    if depth > MAX_DEPTH {
        return Err(Error::SizeLimit {
            what: "tree depth",
            value: depth,
            max: MAX_DEPTH,
        });
    }
    let deepest = seed.len().checked_shl(depth as u32).unwrap_or(usize::MAX);
    if deepest > MAX_SUBCODE_LEN {
        return Err(Error::SizeLimit {
            what: "sub-code length",
            value: deepest,
            max: MAX_SUBCODE_LEN,
        });
    }
    let mut layers = Vec::with_capacity(depth + 1);
    layers.push(alloc::vec![TreeNode::new(seed.clone())]);
    for _ in 0..depth {
        let parent = layers.last().expect("at least the root layer");
        let children: Vec<TreeNode> = parent
            .iter()
            .flat_map(|node: &TreeNode| {
                [
                    TreeNode::new(child_pair(&node.base, &node.mate)),
                    TreeNode::new(child_pair(&node.mate, &node.base)),
                ]
            })
            .collect();
        layers.push(children);
    }
    Ok(LsCodeTree {
        seed: seed.clone(),
        layers,
    })
}

/// A ternary LS code: `C ⧺ 0^gap ⧺ S ⧺ 0^trailing_gap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LsCode {
    c_part: BipolarSequence,
    s_part: BipolarSequence,
    gap: usize,
    trailing_gap: usize,
    chips: Vec<i8>,
    id: Option<CodeId>,
}

impl LsCode {
    pub fn c_part(&self) -> &BipolarSequence {
        &self.c_part
    }

    pub fn s_part(&self) -> &BipolarSequence {
        &self.s_part
    }

    /// Length of each part (N).
    pub fn part_len(&self) -> usize {
        self.c_part.len()
    }

    pub fn gap(&self) -> usize {
        self.gap
    }

    pub fn trailing_gap(&self) -> usize {
        self.trailing_gap
    }

    pub fn chips(&self) -> &[i8] {
        &self.chips
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn id(&self) -> Option<CodeId> {
        self.id
    }

    pub fn with_id(mut self, id: CodeId) -> Self {
        self.id = Some(id);
        self
    }

    /// Index of the first S-part chip.
    pub fn s_offset(&self) -> usize {
        self.part_len() + self.gap
    }

    /// Whether chip `index` belongs to the C or S part rather than a gap.
    pub fn is_part_chip(&self, index: usize) -> bool {
        let n = self.part_len();
        index < n || (self.s_offset()..self.s_offset() + n).contains(&index)
    }
}

pub fn assemble(
    c_part: &BipolarSequence,
    s_part: &BipolarSequence,
    gap: usize,
    trailing_gap: usize,
) -> Result<LsCode> {
    if c_part.len() != s_part.len() {
        return Err(Error::LengthMismatch {
            left: c_part.len(),
            right: s_part.len(),
        });
    }
    let mut chips = Vec::with_capacity(2 * c_part.len() + gap + trailing_gap);
    chips.extend_from_slice(c_part);
    chips.resize(c_part.len() + gap, 0);
    chips.extend_from_slice(s_part);
    chips.resize(2 * c_part.len() + gap + trailing_gap, 0);
    Ok(LsCode {
        c_part: c_part.clone(),
        s_part: s_part.clone(),
        gap,
        trailing_gap,
        chips,
        id: None,
    })
}

/// Assembles the code at `id` of a tree.
pub fn assemble_id(
    tree: &LsCodeTree,
    id: CodeId,
    gap: usize,
    trailing_gap: usize,
) -> Result<LsCode> {
    let pair = tree.pair(id)?;
    Ok(assemble(pair.c(), pair.s(), gap, trailing_gap)?.with_id(id))
}

/// The codes of one tree layer, all with the same gaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LsCodeSet {
    pub codes: Vec<LsCode>,
    pub layer: usize,
    pub gap: usize,
    pub trailing_gap: usize,
    pub seed_length: usize,
}

impl LsCodeSet {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn code_len(&self) -> usize {
        self.codes.first().map_or(0, LsCode::len)
    }
}

/// Every code of a layer (2 per node), base before mate, in node order.
pub fn code_set(
    tree: &LsCodeTree,
    layer: usize,
    gap: usize,
    trailing_gap: usize,
) -> Result<LsCodeSet> {
    let codes = tree
        .ids(layer)?
        .into_iter()
        .map(|id| assemble_id(tree, id, gap, trailing_gap))
        .collect::<Result<Vec<_>>>()?;
    Ok(LsCodeSet {
        codes,
        layer,
        gap,
        trailing_gap,
        seed_length: tree.seed().len(),
    })
}

/// Deepest common ancestor layer of two nodes on the same layer.
fn common_ancestor_layer(layer: usize, mut a: usize, mut b: usize) -> usize {
    let mut level = layer;
    while a != b {
        a >>= 1;
        b >>= 1;
        level -= 1;
    }
    level
}

/// Interference-free window (in chips) the tree structure guarantees for a
/// code pair laid out with `gap` zeros.
///
/// The window counts the lags `0 < |τ| <= W` at which the combined
/// correlation is exactly zero. Codes of one node (and a code with itself)
/// are limited only by the gap. Codes of different nodes first correlate at
/// `|τ| = L`, the sub-code length of their deepest common ancestor, so they
/// get `min(gap, L - 1)`.
pub fn predicted_ifw(tree: &LsCodeTree, a: CodeId, b: CodeId, gap: usize) -> Result<usize> {
    tree.pair(a)?;
    tree.pair(b)?;
    if a.layer != b.layer {
        return Err(Error::InvalidParameter {
            name: "code pair",
            reason: "codes must come from the same layer",
        });
    }
    if a.node == b.node {
        return Ok(gap);
    }
    let ancestor = common_ancestor_layer(a.layer, a.node, b.node);
    Ok(gap.min(tree.subcode_len(ancestor) - 1))
}
