use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mindex::MultiIndexSet;
use crate::tubes::{LevelLayout, SelectionTable};

/// Below this many coefficients a level runs on the calling thread.
const PARALLEL_MIN_LEN: usize = 1 << 12;

/// Groups handed to one rayon task at a time.
const PARALLEL_CHUNK: usize = 64;

/// Static schedule of the hierarchical scheme.
///
/// Level `ℓ` (1-based) works along dimension `ℓ`. Its groups are the maximal
/// runs of `A` sharing `(α_{ℓ+1}, …, α_m)`; the groups are contiguous and
/// partition `A`, and group `g` consists of `𝒯_ℓ[g]` blocks with
/// `α_ℓ = 0, 1, …`. Block `j ≥ 1` is aligned into block 0 through a stored
/// selection unless every block of the group is a prefix of block 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelPlan {
    len: usize,
    max_block: usize,
    levels: Vec<PlanLevel>,
}

#[derive(Debug, Clone, PartialEq)]
struct PlanLevel {
    /// Group `g` spans `group_offsets[g]..group_offsets[g+1]` in `A`.
    group_offsets: Vec<usize>,
    /// Group `g` owns blocks `first_block[g]..first_block[g+1]`.
    first_block: Vec<usize>,
    /// Block `b` spans `block_offsets[b]..block_offsets[b+1]`. Empty at level 1,
    /// where every block is a single element.
    block_offsets: Vec<usize>,
    /// Map of block `b` into block 0 of its group, local positions, stored as
    /// `maps[map_offsets[b]..map_offsets[b+1]]`; empty for block 0 and prefixes.
    map_offsets: Vec<usize>,
    maps: Vec<u32>,
    prefix: Vec<bool>,
}

/// The three per-level operations of the transform family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Sweep {
    /// `x ← L⁻¹ x` along the level's dimension (truncated forward substitution).
    Solve,
    /// `x ← L x`.
    Lower,
    /// `x ← U x` for an upper triangular `U`.
    Upper,
}

/// A square row-major matrix view.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Dense<'a> {
    pub size: usize,
    pub data: &'a [f64],
}

impl Dense<'_> {
    #[inline(always)]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }
}

/// Builds the schedule for `set` from its layout and level selections.
pub fn plan(set: &MultiIndexSet, layout: &LevelLayout, selections: &SelectionTable) -> Result<LevelPlan> {
    let m = set.m();
    if layout.levels() != m || layout.total() != set.len() || selections.levels.len() != m {
        return Err(Error::InvalidArgument(
            "layout and selections do not match the index set".into(),
        ));
    }
    let mut levels = Vec::with_capacity(m);
    let mut max_block = 1usize;
    for level in 1..=m {
        let groups = layout.group_count(level);
        let mut group_offsets = Vec::with_capacity(groups + 1);
        let mut first_block = Vec::with_capacity(groups + 1);
        for g in 0..groups {
            group_offsets.push(layout.group_range(level, g).start);
            first_block.push(layout.group_blocks(level, g).start);
        }
        group_offsets.push(set.len());
        first_block.push(layout.group_blocks(level, groups - 1).end);

        let mut block_offsets = Vec::new();
        let mut map_offsets = Vec::new();
        let mut maps = Vec::new();
        let mut prefix = vec![true; groups];
        if level >= 2 {
            let blocks = first_block[groups];
            block_offsets.reserve(blocks + 1);
            for b in 0..blocks {
                block_offsets.push(layout.block_range(level, b).start);
            }
            block_offsets.push(set.len());

            let table = &selections.levels[level - 1];
            if table.len() != blocks - groups {
                return Err(Error::InvalidArgument(format!(
                    "level {level} has {} selections, expected {}",
                    table.len(),
                    blocks - groups
                )));
            }
            map_offsets.reserve(blocks + 1);
            let mut next = 0usize;
            for g in 0..groups {
                let own = first_block[g]..first_block[g + 1];
                let block0 = block_offsets[own.start + 1] - block_offsets[own.start];
                max_block = max_block.max(block0);
                let sels = &table[next..next + own.len() - 1];
                next += own.len() - 1;
                prefix[g] = sels.iter().all(|s| s.is_prefix());
                map_offsets.push(maps.len());
                for (k, sel) in sels.iter().enumerate() {
                    let b = own.start + 1 + k;
                    if sel.sup_size() != block0 || sel.sub_size() != block_offsets[b + 1] - block_offsets[b] {
                        return Err(Error::InvalidArgument(format!(
                            "selection for block {b} at level {level} has the wrong shape"
                        )));
                    }
                    map_offsets.push(maps.len());
                    if !prefix[g] {
                        maps.extend_from_slice(sel.map());
                    }
                }
            }
            map_offsets.push(maps.len());
        }
        levels.push(PlanLevel {
            group_offsets,
            first_block,
            block_offsets,
            map_offsets,
            maps,
            prefix,
        });
    }
    Ok(LevelPlan {
        len: set.len(),
        max_block,
        levels,
    })
}

impl LevelPlan {
    /// Number of coefficients `|A|`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    /// Position ranges of the groups formed at `level`.
    pub fn groups(&self, level: usize) -> Vec<Range<usize>> {
        self.levels[level - 1]
            .group_offsets
            .windows(2)
            .map(|w| w[0]..w[1])
            .collect()
    }

    /// For each group formed at `level`, the range of level `ℓ-1` groups
    /// (single elements at level 1) that it merges.
    pub fn merge_groups(&self, level: usize) -> Vec<Range<usize>> {
        self.levels[level - 1]
            .first_block
            .windows(2)
            .map(|w| w[0]..w[1])
            .collect()
    }

    /// Whether a group at `level` is aligned by plain truncation.
    pub fn is_prefix_group(&self, level: usize, group: usize) -> bool {
        self.levels[level - 1].prefix[group]
    }

    /// Group offsets of `level`, used by the evaluator.
    pub(crate) fn group_offsets(&self, level: usize) -> &[usize] {
        &self.levels[level - 1].group_offsets
    }

    pub(crate) fn first_blocks(&self, level: usize) -> &[usize] {
        &self.levels[level - 1].first_block
    }

    /// Applies `sweep` with matrix `mat` along dimension `level` in place and
    /// returns the number of multiply-adds (divisions and scalings included).
    pub(crate) fn run_level(&self, level: usize, sweep: Sweep, mat: Dense<'_>, x: &mut [f64]) -> u64 {
        assert_eq!(x.len(), self.len);
        let lv = &self.levels[level - 1];
        let groups = lv.group_offsets.len() - 1;
        let job = |g: usize, xs: &mut [f64], scratch: &mut Vec<u32>| -> u64 {
            if level == 1 {
                tube_sweep(sweep, mat, xs)
            } else {
                let blocks = lv.first_block[g]..lv.first_block[g + 1];
                let bounds = &lv.block_offsets[blocks.start..=blocks.end];
                let maps = (!lv.prefix[g]).then(|| GroupMaps {
                    offsets: &lv.map_offsets[blocks.start..=blocks.end],
                    data: &lv.maps,
                });
                group_sweep(sweep, mat, xs, bounds, maps, scratch)
            }
        };
        let parallel = groups > 1 && self.len >= PARALLEL_MIN_LEN && rayon::current_num_threads() > 1;
        if !parallel {
            let mut scratch = vec![0u32; self.max_block];
            let mut rest = x;
            let mut ops = 0;
            for g in 0..groups {
                let size = lv.group_offsets[g + 1] - lv.group_offsets[g];
                let (head, tail) = std::mem::take(&mut rest).split_at_mut(size);
                ops += job(g, head, &mut scratch);
                rest = tail;
            }
            return ops;
        }
        let mut slices = Vec::with_capacity(groups);
        let mut rest = x;
        for g in 0..groups {
            let size = lv.group_offsets[g + 1] - lv.group_offsets[g];
            let (head, tail) = std::mem::take(&mut rest).split_at_mut(size);
            slices.push((g, head));
            rest = tail;
        }
        slices
            .into_par_iter()
            .with_min_len(PARALLEL_CHUNK)
            .map_init(
                || vec![0u32; self.max_block],
                |scratch, (g, xs)| job(g, xs, scratch),
            )
            .sum()
    }
}

struct GroupMaps<'a> {
    /// `offsets[k]..offsets[k+1]` is the map of the group's block `k`; block 0
    /// has none.
    offsets: &'a [usize],
    data: &'a [u32],
}

impl GroupMaps<'_> {
    #[inline]
    fn of(&self, block: usize) -> &[u32] {
        &self.data[self.offsets[block]..self.offsets[block + 1]]
    }
}

/// Level 1: a contiguous tube along dimension 1.
fn tube_sweep(sweep: Sweep, mat: Dense<'_>, x: &mut [f64]) -> u64 {
    let t = x.len();
    match sweep {
        Sweep::Solve => {
            for i in 0..t {
                let xi = x[i] / mat.at(i, i);
                x[i] = xi;
                for j in i + 1..t {
                    x[j] -= mat.at(j, i) * xi;
                }
            }
        }
        Sweep::Lower => {
            for i in (0..t).rev() {
                let xi = x[i];
                for j in i + 1..t {
                    x[j] += mat.at(j, i) * xi;
                }
                x[i] = xi * mat.at(i, i);
            }
        }
        Sweep::Upper => {
            for i in 0..t {
                let mut acc = mat.at(i, i) * x[i];
                for j in i + 1..t {
                    acc += mat.at(i, j) * x[j];
                }
                x[i] = acc;
            }
        }
    }
    (t * (t + 1) / 2) as u64
}

/// Levels `ℓ ≥ 2`: one group of blocks, `bounds` absolute block offsets.
///
/// The loops are column oriented; for the pair `(i, j)`, `i < j`, element `k`
/// of block `j` meets element `where_i[σ_j[k]]` of block `i`, where `σ_j` maps
/// block `j` into block 0 and `where_i` inverts `σ_i` on its image.
fn group_sweep(
    sweep: Sweep,
    mat: Dense<'_>,
    x: &mut [f64],
    bounds: &[usize],
    maps: Option<GroupMaps<'_>>,
    scratch: &mut [u32],
) -> u64 {
    let base = bounds[0];
    let t = bounds.len() - 1;
    let range = |b: usize| bounds[b] - base..bounds[b + 1] - base;
    let mut ops = 0u64;

    let fill_where = |i: usize, scratch: &mut [u32]| {
        if let Some(maps) = &maps {
            if i > 0 {
                for (k, &q) in maps.of(i).iter().enumerate() {
                    scratch[q as usize] = k as u32;
                }
            }
        }
    };

    let order: Box<dyn Iterator<Item = usize>> = match sweep {
        Sweep::Lower => Box::new((0..t).rev()),
        _ => Box::new(0..t),
    };
    for i in order {
        let ri = range(i);
        if sweep == Sweep::Solve {
            let d = mat.at(i, i);
            x[ri.clone()].iter_mut().for_each(|v| *v /= d);
            ops += ri.len() as u64;
        } else if sweep == Sweep::Upper {
            let d = mat.at(i, i);
            x[ri.clone()].iter_mut().for_each(|v| *v *= d);
            ops += ri.len() as u64;
        }
        fill_where(i, scratch);
        for j in i + 1..t {
            let rj = range(j);
            let (lo, hi) = x.split_at_mut(rj.start);
            let xi = &mut lo[ri.clone()];
            let xj = &mut hi[..rj.len()];
            ops += rj.len() as u64;
            let coef = match sweep {
                Sweep::Solve => -mat.at(j, i),
                Sweep::Lower => mat.at(j, i),
                Sweep::Upper => mat.at(i, j),
            };
            match (&maps, sweep) {
                (None, Sweep::Upper) => {
                    for (a, &b) in xi.iter_mut().zip(xj.iter()) {
                        *a += coef * b;
                    }
                }
                (None, _) => {
                    for (b, &a) in xj.iter_mut().zip(xi.iter()) {
                        *b += coef * a;
                    }
                }
                (Some(maps), _) => {
                    let sigma = maps.of(j);
                    let pos = |k: usize| -> usize {
                        let q = sigma[k] as usize;
                        if i == 0 {
                            q
                        } else {
                            scratch[q] as usize
                        }
                    };
                    if sweep == Sweep::Upper {
                        for (k, &b) in xj.iter().enumerate() {
                            xi[pos(k)] += coef * b;
                        }
                    } else {
                        for (k, b) in xj.iter_mut().enumerate() {
                            *b += coef * xi[pos(k)];
                        }
                    }
                }
            }
        }
        if sweep == Sweep::Lower {
            let d = mat.at(i, i);
            x[ri.clone()].iter_mut().for_each(|v| *v *= d);
            ops += ri.len() as u64;
        }
    }
    ops
}
