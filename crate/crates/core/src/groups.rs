//! Group layouts and covariate duplication.
//!
//! A [`GroupLayout`] is a list of (possibly overlapping) index sets over
//! `0..p`. Duplicating every coordinate once per group that contains it gives
//! an expanded space in which the groups are disjoint and contiguous; the
//! [`DuplicationMap`] records that embedding.

use std::ops::Range;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GroupLayout {
    groups: Vec<Vec<usize>>,
    p: usize,
    max_size: usize,
    overlap: usize,
    membership: Vec<Vec<usize>>,
}

impl GroupLayout {
    /// Builds a layout over `p` coordinates. Group order and the order of
    /// indices inside each group are preserved.
    pub fn new(groups: Vec<Vec<usize>>, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("p must be at least 1".into()));
        }
        let mut membership = vec![Vec::new(); p];
        for (g, group) in groups.iter().enumerate() {
            for &i in group {
                if i >= p {
                    return Err(Error::IndexOutOfRange { group: g, index: i, p });
                }
                if membership[i].last() == Some(&g) {
                    return Err(Error::DuplicateIndex { group: g, index: i });
                }
                membership[i].push(g);
            }
        }
        if let Some(i) = membership.iter().position(|m| m.is_empty()) {
            return Err(Error::UncoveredCoordinate(i));
        }
        let max_size = groups.iter().map(Vec::len).max().unwrap_or(0);
        let overlap = membership.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self {
            groups,
            p,
            max_size,
            overlap,
            membership,
        })
    }

    /// One singleton group per coordinate (the lasso layout).
    pub fn singletons(p: usize) -> Result<Self> {
        Self::new((0..p).map(|i| vec![i]).collect(), p)
    }

    /// `count` consecutive disjoint groups of `size` coordinates each.
    pub fn contiguous(count: usize, size: usize) -> Result<Self> {
        Self::new(
            (0..count)
                .map(|g| (g * size..(g + 1) * size).collect())
                .collect(),
            count * size,
        )
    }

    /// Chain of `count` groups of `size` coordinates, each starting `shift`
    /// coordinates after the previous one. `p` is derived from the chain.
    pub fn chain(count: usize, size: usize, shift: usize) -> Result<Self> {
        if count == 0 || size == 0 || shift == 0 || shift > size {
            return Err(Error::InvalidArgument(format!(
                "chain needs count, size >= 1 and 1 <= shift <= size (got {count}, {size}, {shift})"
            )));
        }
        let p = shift * (count - 1) + size;
        Self::new(
            (0..count)
                .map(|g| (g * shift..g * shift + size).collect())
                .collect(),
            p,
        )
    }

    /// Square blocks of `block × block` cells on a `rows × cols` grid, placed
    /// every `stride` cells along both axes. Cells are numbered row-major.
    /// Blocks are clipped at the border and a final block is added along
    /// each axis when the stride does not land on the edge.
    pub fn grid(rows: usize, cols: usize, block: usize, stride: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || block == 0 || stride == 0 {
            return Err(Error::InvalidArgument(
                "grid dimensions, block and stride must be positive".into(),
            ));
        }
        let starts = |len: usize| {
            let mut s: Vec<usize> = (0..len).step_by(stride).filter(|&s| s + block <= len).collect();
            let last = len.saturating_sub(block);
            if s.last() != Some(&last) {
                s.push(last);
            }
            s
        };
        let mut groups = Vec::new();
        for r0 in starts(rows) {
            for c0 in starts(cols) {
                let mut g = Vec::new();
                for r in r0..(r0 + block).min(rows) {
                    for c in c0..(c0 + block).min(cols) {
                        g.push(r * cols + c);
                    }
                }
                groups.push(g);
            }
        }
        Self::new(groups, rows * cols)
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group(&self, g: usize) -> &[usize] {
        &self.groups[g]
    }

    /// Ambient dimension `p`.
    pub fn dim(&self) -> usize {
        self.p
    }

    /// Number of groups `K`.
    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    /// Largest group size `L`.
    pub fn max_group_size(&self) -> usize {
        self.max_size
    }

    /// Largest number of groups sharing one coordinate, `R`.
    pub fn max_overlap(&self) -> usize {
        self.overlap
    }

    /// Groups containing coordinate `i`, in layout order.
    pub fn groups_of(&self, i: usize) -> &[usize] {
        &self.membership[i]
    }

    pub fn is_disjoint(&self) -> bool {
        self.overlap == 1
    }

    /// Total number of (group, coordinate) memberships, i.e. the expanded dimension.
    pub fn total_size(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }
}

/// A single expanded coordinate: the group that owns it and the original
/// coordinate it copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub group: usize,
    pub original: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DuplicationMap {
    p: usize,
    slots: Vec<Slot>,
    group_ranges: Vec<Range<usize>>,
    multiplicity: Vec<usize>,
}

impl DuplicationMap {
    pub fn new(layout: &GroupLayout) -> Self {
        let mut slots = Vec::with_capacity(layout.total_size());
        let mut group_ranges = Vec::with_capacity(layout.num_groups());
        for (g, group) in layout.groups().iter().enumerate() {
            let start = slots.len();
            slots.extend(group.iter().map(|&i| Slot { group: g, original: i }));
            group_ranges.push(start..slots.len());
        }
        let multiplicity = (0..layout.dim()).map(|i| layout.groups_of(i).len()).collect();
        Self {
            p: layout.dim(),
            slots,
            group_ranges,
            multiplicity,
        }
    }

    pub fn expanded_dim(&self) -> usize {
        self.slots.len()
    }

    pub fn original_dim(&self) -> usize {
        self.p
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn group_ranges(&self) -> &[Range<usize>] {
        &self.group_ranges
    }

    pub fn num_groups(&self) -> usize {
        self.group_ranges.len()
    }

    /// Number of expanded copies of each original coordinate.
    pub fn multiplicity(&self) -> &[usize] {
        &self.multiplicity
    }

    /// Copies design columns so that expanded column `j` equals original
    /// column `slots[j].original`.
    pub fn expand_design(&self, phi: ArrayView2<f64>) -> Result<Array2<f64>> {
        if phi.ncols() != self.p {
            return Err(Error::DimensionMismatch {
                what: "design columns",
                expected: self.p,
                got: phi.ncols(),
            });
        }
        let mut out = Array2::zeros((phi.nrows(), self.expanded_dim()));
        for (j, slot) in self.slots.iter().enumerate() {
            out.column_mut(j).assign(&phi.column(slot.original));
        }
        Ok(out)
    }

    /// Sums expanded coordinates back onto the original coordinates they copy.
    pub fn collapse(&self, w: ArrayView1<f64>) -> Result<Array1<f64>> {
        self.check_expanded(w.len())?;
        let mut x = Array1::zeros(self.p);
        for (slot, &v) in self.slots.iter().zip(w.iter()) {
            x[slot.original] += v;
        }
        Ok(x)
    }

    /// Adjoint of [`collapse`](Self::collapse): copies each original
    /// coordinate into every slot that maps to it.
    pub fn replicate(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        if x.len() != self.p {
            return Err(Error::DimensionMismatch {
                what: "original vector",
                expected: self.p,
                got: x.len(),
            });
        }
        Ok(self.slots.iter().map(|s| x[s.original]).collect())
    }

    /// Embeds `x` by placing each coordinate's mass in the first group that
    /// contains it. `collapse(embed_first(x)) == x`.
    pub fn embed_first(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        if x.len() != self.p {
            return Err(Error::DimensionMismatch {
                what: "original vector",
                expected: self.p,
                got: x.len(),
            });
        }
        let mut seen = vec![false; self.p];
        Ok(self
            .slots
            .iter()
            .map(|s| {
                if seen[s.original] {
                    0.0
                } else {
                    seen[s.original] = true;
                    x[s.original]
                }
            })
            .collect())
    }

    pub(crate) fn check_expanded(&self, len: usize) -> Result<()> {
        if len != self.expanded_dim() {
            return Err(Error::DimensionMismatch {
                what: "expanded vector",
                expected: self.expanded_dim(),
                got: len,
            });
        }
        Ok(())
    }
}
