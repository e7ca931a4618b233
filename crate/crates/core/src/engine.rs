//! The search pipeline.
//!
//! The index stores the nength of the *reversed* text. For a support with
//! cells `c_j` encoded as `b^j`, one Hadamard product and one inverse
//! transform give the match grid
//!
//! ```text
//! M[v] = Σ_j b^j · text[c_j − v]
//! ```
//!
//! so the digits of `M[v]` are exactly the characters under the support at
//! offset `o = −v`. Decoding every entry yields the answer to all `σ^r`
//! queries at once.

use std::collections::BTreeMap;
use std::ops::Range;

use crate::codec::{
    capacity_check, decode_digits, encode_pattern_unchecked, AlphabetMode, Capacity, CodeSpace,
    PatternSupport, Query,
};
use crate::error::{Error, Result};
use crate::grid::{IntGrid, Shape};
use crate::par;
use crate::spectral::{hadamard, nengthen, unnengthen_to_int, NengthGrid};

/// FNV-1a over the little-endian bytes of each value.
pub fn digest(values: &[i64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in values {
        for byte in v.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Transformed reversed text plus what is needed to decode against it.
#[derive(Clone, Debug, PartialEq)]
pub struct NengthIndex {
    space: CodeSpace,
    text_nength: NengthGrid,
    source_digest: u64,
}

impl NengthIndex {
    /// Reassembles an index from persisted parts.
    pub fn from_parts(space: CodeSpace, text_nength: NengthGrid, source_digest: u64) -> Self {
        Self { space, text_nength, source_digest }
    }

    pub fn shape(&self) -> &Shape {
        self.text_nength.shape()
    }

    pub fn space(&self) -> CodeSpace {
        self.space
    }

    pub fn base(&self) -> u64 {
        self.space.base()
    }

    pub fn text_nength(&self) -> &NengthGrid {
        &self.text_nength
    }

    pub fn source_digest(&self) -> u64 {
        self.source_digest
    }

    /// Inverts the stored transform to get the text back, checking the digest.
    pub fn recover_text(&self) -> Result<IntGrid> {
        let text = unnengthen_to_int(&self.text_nength)?.reverse();
        if digest(text.values()) != self.source_digest {
            return Err(Error::Format {
                kind: "index",
                msg: "recovered text does not match the stored digest".into(),
            });
        }
        Ok(text)
    }
}

/// Validates codes and transforms the reversed text.
pub fn build_index(text: &IntGrid, space: CodeSpace) -> Result<NengthIndex> {
    if let Some(pos) = text.values().iter().position(|&c| !space.is_text_code(c)) {
        return Err(Error::CodeOutOfRange { coord: text.shape().unravel(pos), code: text.values()[pos] });
    }
    Ok(NengthIndex {
        space,
        text_nength: nengthen(&text.reverse()),
        source_digest: digest(text.values()),
    })
}

/// Whether support cells may be split across several transforms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SplitPolicy {
    /// Split into as many digit groups as the exactness budget requires.
    #[default]
    Auto,
    /// Encode every cell in one transform, even past the budget.
    SingleGroup,
}

/// Offsets bucketed by the characters found under one group of support cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitGroup {
    cells: Range<usize>,
    buckets: BTreeMap<Vec<i64>, Vec<usize>>,
}

impl DigitGroup {
    /// Indices of the support cells this group covers.
    pub fn cells(&self) -> Range<usize> {
        self.cells.clone()
    }

    /// Digit tuple → sorted row-major offsets.
    pub fn buckets(&self) -> &BTreeMap<Vec<i64>, Vec<usize>> {
        &self.buckets
    }
}

/// Every alignment of a support against the text, keyed by what it reads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchTable {
    support: PatternSupport,
    shape: Shape,
    groups: Vec<DigitGroup>,
    wrap: bool,
}

impl MatchTable {
    pub fn support(&self) -> &PatternSupport {
        &self.support
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn groups(&self) -> &[DigitGroup] {
        &self.groups
    }

    pub fn wrap(&self) -> bool {
        self.wrap
    }

    /// Offsets (row-major positions) matching `query`, sorted.
    pub fn lookup_linear(&self, query: &Query) -> Vec<usize> {
        let digits = query.digits();
        if digits.len() != self.support.len() {
            return Vec::new();
        }
        let mut acc: Option<Vec<usize>> = None;
        for g in &self.groups {
            let Some(hits) = g.buckets.get(&digits[g.cells.clone()]) else {
                return Vec::new();
            };
            acc = Some(match acc {
                None => hits.clone(),
                Some(prev) => intersect_sorted(&prev, hits),
            });
        }
        acc.unwrap_or_default()
    }
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Offset tuples matching `query`, sorted lexicographically.
pub fn lookup(table: &MatchTable, query: &Query) -> Vec<Vec<usize>> {
    table.lookup_linear(query).into_iter().map(|p| table.shape.unravel(p)).collect()
}

/// Contiguous cell ranges, in cell order, that each fit the budget.
fn plan_groups(base: u64, support: &PatternSupport, policy: SplitPolicy) -> Result<Vec<Range<usize>>> {
    let r = support.len();
    let groups = match policy {
        SplitPolicy::SingleGroup => 1,
        SplitPolicy::Auto => match capacity_check(base, r, support.shape().len())? {
            Capacity::Ok => 1,
            Capacity::RequiredGroups(g) => g,
        },
    };
    let per = r.div_ceil(groups);
    Ok((0..r).step_by(per).map(|start| start..(start + per).min(r)).collect())
}

/// Decoded digits of every match-grid entry, indexed by text offset.
fn decode_group(index: &NengthIndex, support: &PatternSupport) -> Result<Vec<Vec<i64>>> {
    let base = index.base();
    let pattern = encode_pattern_unchecked(support, base)?;
    let product = hadamard(&nengthen(&pattern), index.text_nength())?;
    let m = unnengthen_to_int(&product)?;
    let shape = index.shape();
    // offset o reads M[-o]
    par::map_range(shape.len(), |o| decode_digits(m.values()[shape.negate_linear(o)], base, support.len()))
        .into_iter()
        .collect()
}

fn bucket(digits: Vec<Vec<i64>>, keep: impl Fn(usize) -> Option<usize>) -> BTreeMap<Vec<i64>, Vec<usize>> {
    let mut buckets: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (o, d) in digits.into_iter().enumerate() {
        if let Some(pos) = keep(o) {
            buckets.entry(d).or_default().push(pos);
        }
    }
    buckets
}

fn check_support(index: &NengthIndex, support: &PatternSupport) -> Result<()> {
    if support.shape() != index.shape() {
        return Err(Error::ShapeMismatch {
            left: support.shape().dims().to_vec(),
            right: index.shape().dims().to_vec(),
        });
    }
    Ok(())
}

/// All cyclic alignments of `support` against the indexed text.
pub fn find_all(index: &NengthIndex, support: &PatternSupport) -> Result<MatchTable> {
    find_all_with(index, support, SplitPolicy::Auto)
}

pub fn find_all_with(index: &NengthIndex, support: &PatternSupport, policy: SplitPolicy) -> Result<MatchTable> {
    check_support(index, support)?;
    let groups = plan_groups(index.base(), support, policy)?
        .into_iter()
        .map(|cells| {
            let digits = decode_group(index, &support.subset(cells.clone()))?;
            Ok(DigitGroup { cells, buckets: bucket(digits, Some) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MatchTable { support: support.clone(), shape: index.shape().clone(), groups, wrap: true })
}

/// Alignments that keep every support cell inside the text, without wrapping.
///
/// The text is zero-padded by the support's extent minus one along each axis,
/// so no cyclic alignment of an in-bounds offset reaches back around; code 0
/// then never matches a query digit, which is why shifted mode is required.
pub fn match_nowrap(text: &IntGrid, support: &PatternSupport, space: CodeSpace) -> Result<MatchTable> {
    match_nowrap_with(text, support, space, SplitPolicy::Auto)
}

pub fn match_nowrap_with(
    text: &IntGrid,
    support: &PatternSupport,
    space: CodeSpace,
    policy: SplitPolicy,
) -> Result<MatchTable> {
    if space.mode() != AlphabetMode::Shifted {
        return Err(Error::Unsupported("non-wrapping search needs the shifted alphabet".into()));
    }
    let shape = text.shape();
    if support.shape() != shape {
        return Err(Error::ShapeMismatch {
            left: support.shape().dims().to_vec(),
            right: shape.dims().to_vec(),
        });
    }
    let extent = support.extent();
    let padded_dims: Vec<usize> = shape.dims().iter().zip(&extent).map(|(&d, &e)| d + e - 1).collect();
    let padded_shape = Shape::new(padded_dims)?;
    let padded = IntGrid::from_fn(padded_shape.clone(), |i| {
        if i.iter().zip(shape.dims()).all(|(&v, &d)| v < d) {
            text.values()[shape.linear_reduced(i)]
        } else {
            0
        }
    });
    let index = build_index(&padded, space)?;
    let padded_support = support.reshaped(padded_shape.clone())?;
    check_support(&index, &padded_support)?;

    // offsets whose whole support lies inside the original extent
    let keep = |o: usize| {
        let oi = padded_shape.unravel(o);
        let inside = oi.iter().zip(&extent).zip(shape.dims()).all(|((&v, &e), &d)| v + e <= d);
        inside.then(|| shape.linear_reduced(&oi))
    };
    let groups = plan_groups(index.base(), &padded_support, policy)?
        .into_iter()
        .map(|cells| {
            let digits = decode_group(&index, &padded_support.subset(cells.clone()))?;
            Ok(DigitGroup { cells, buckets: bucket(digits, keep) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MatchTable { support: support.clone(), shape: shape.clone(), groups, wrap: false })
}
