//! Tube projections, the length-to-sum reduction, entropy vectors and
//! ordinal selections.
//!
//! For the co-lex ordered set `A`, the `i`-th tube projection `𝒯ᵢ` lists, for
//! every `α ∈ A` with `α₁ = … = αᵢ = 0`, how many points of `A` lie on the
//! straight path through `α` along axis `i`. For `A = A_{m,n,p}` all of them
//! are prefixes of the first one, with lengths given by the entropy vector.

use std::cmp::Ordering;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::mindex::{colex_cmp, MultiIndexSet, PNorm};

/// `𝒯₁(A)`: run lengths of the axis-1 tubes in co-lex order.
pub fn first_tube_projection(set: &MultiIndexSet) -> Vec<usize> {
    let m = set.m();
    let mut tubes = Vec::new();
    let mut prev: Option<&[u32]> = None;
    for alpha in set.iter() {
        match prev {
            Some(p) if p[1..m] == alpha[1..m] => *tubes.last_mut().unwrap() += 1,
            _ => tubes.push(1),
        }
        prev = Some(alpha);
    }
    tubes
}

/// `𝒯_{axis+1}(A)` straight from the definition, by membership probing.
///
/// Works for any downward closed set; cost `O(|A| m log|A|)`.
pub fn tube_projection_direct(set: &MultiIndexSet, axis: usize) -> Vec<usize> {
    assert!(axis < set.m(), "axis out of range");
    let mut probe = vec![0u32; set.m()];
    set.iter()
        .filter(|alpha| alpha[..=axis].iter().all(|&v| v == 0))
        .map(|alpha| {
            probe.copy_from_slice(alpha);
            let mut len = 0;
            while set.contains(&probe) {
                len += 1;
                probe[axis] += 1;
            }
            len
        })
        .collect()
}

/// Length-to-sum reduction: the shortest prefix of `tubes` whose entries sum
/// to `tubes.len()`.
pub fn reduce(tubes: &[usize]) -> Result<&[usize]> {
    let target = tubes.len();
    let mut sum = 0usize;
    for (j, &t) in tubes.iter().enumerate() {
        if t == 0 {
            return Err(Error::MalformedTube(format!("zero entry at position {j}")));
        }
        sum += t;
        match sum.cmp(&target) {
            Ordering::Equal => return Ok(&tubes[..=j]),
            Ordering::Greater => break,
            Ordering::Less => {}
        }
    }
    Err(Error::MalformedTube(format!(
        "no prefix sums to the length {target}"
    )))
}

/// Entropy vector `e = (e₁, …, e_m)` with `e₁ = len(T)` and
/// `e_{i+1} = len(ℛⁱ(T))`.
pub fn entropy_vector(tubes: &[usize], m: usize) -> Result<Vec<usize>> {
    if m == 0 {
        return Err(Error::InvalidArgument("dimension m must be >= 1".into()));
    }
    let mut entropy = Vec::with_capacity(m);
    let mut current = tubes;
    entropy.push(current.len());
    for _ in 1..m {
        current = reduce(current)?;
        entropy.push(current.len());
    }
    if entropy[m - 1] != 1 {
        return Err(Error::MalformedTube(format!(
            "last reduction has length {}, expected 1",
            entropy[m - 1]
        )));
    }
    Ok(entropy)
}

/// The tube structure of an ℓᵖ set: `𝒯₁` plus the entropy vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeDecomposition {
    m: usize,
    n: u32,
    p: Option<PNorm>,
    len: usize,
    t1: Vec<usize>,
    entropy: Vec<usize>,
}

impl TubeDecomposition {
    /// Computes `𝒯₁` in one pass and the entropy vector by repeated reduction.
    /// Only valid for sets built by [`crate::mindex::build_index_set`].
    pub fn new(set: &MultiIndexSet) -> Result<Self> {
        if set.p().is_none() {
            return Err(Error::InvalidArgument(
                "tube reconstruction by reduction requires an lp set".into(),
            ));
        }
        let t1 = first_tube_projection(set);
        let entropy = entropy_vector(&t1, set.m())?;
        Ok(TubeDecomposition {
            m: set.m(),
            n: set.n(),
            p: set.p(),
            len: set.len(),
            t1,
            entropy,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> Option<PNorm> {
        self.p
    }

    pub fn t1(&self) -> &[usize] {
        &self.t1
    }

    pub fn entropy(&self) -> &[usize] {
        &self.entropy
    }

    /// `𝒯_{axis+1}` as a truncation of `𝒯₁`.
    pub fn projection(&self, axis: usize) -> &[usize] {
        &self.t1[..self.entropy[axis]]
    }

    pub fn projections(&self) -> Vec<&[usize]> {
        (0..self.m).map(|axis| self.projection(axis)).collect()
    }

    /// `κ_{m,n,p}` read off the entropy vector: `e_i = |A_{m-i,n,p}|`.
    pub fn carry_count(&self) -> f64 {
        let lower: usize = self.entropy[..self.m - 1].iter().sum();
        (self.len + lower) as f64 / self.len as f64
    }
}

/// All tube projections `[𝒯₁, …, 𝒯_m]`.
///
/// ℓᵖ sets are handled by truncating `𝒯₁`; general downward closed sets fall
/// back to a direct traversal per axis.
pub fn all_tube_projections(set: &MultiIndexSet) -> Vec<Vec<usize>> {
    match TubeDecomposition::new(set) {
        Ok(tubes) => tubes.projections().into_iter().map(<[usize]>::to_vec).collect(),
        Err(_) => (0..set.m()).map(|axis| tube_projection_direct(set, axis)).collect(),
    }
}

/// Rebuilds the co-lex ordered index list from its tube projections.
pub fn rebuild_from_tubes(m: usize, projections: &[Vec<usize>]) -> Result<MultiIndexSet> {
    if projections.len() != m || m == 0 {
        return Err(Error::LengthMismatch {
            expected: m,
            actual: projections.len(),
        });
    }
    // Start from A ∩ H_m^⊥ = {0} and open up one axis at a time, last axis first.
    let mut points: Vec<u32> = vec![0; m];
    for axis in (0..m).rev() {
        let tubes = &projections[axis];
        let count = points.len() / m;
        if tubes.len() != count {
            return Err(Error::MalformedTube(format!(
                "projection {} has {} entries, expected {count}",
                axis + 1,
                tubes.len()
            )));
        }
        let mut next = Vec::with_capacity(tubes.iter().sum::<usize>() * m);
        for (start, &len) in points.chunks_exact(m).zip(tubes) {
            for k in 0..len as u32 {
                let at = next.len();
                next.extend_from_slice(start);
                next[at + axis] = k;
            }
        }
        points = next;
    }
    let n = points.iter().copied().max().unwrap_or(0);
    Ok(MultiIndexSet::from_flat_unchecked(m, n, None, points))
}

/// An ordinal embedding stored as positions: `map[j]` is the position in the
/// superset of the `j`-th element of the subset. Strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    sup_size: usize,
    map: Vec<u32>,
}

impl Selection {
    pub fn new(map: Vec<u32>, sup_size: usize) -> Result<Self> {
        let increasing = map.windows(2).all(|w| w[0] < w[1]);
        let in_range = map.last().map_or(true, |&last| (last as usize) < sup_size);
        if !increasing || !in_range {
            return Err(Error::InvalidArgument(
                "selection map must be strictly increasing and in range".into(),
            ));
        }
        Ok(Selection { sup_size, map })
    }

    pub fn identity(size: usize) -> Self {
        Self::prefix(size, size)
    }

    pub fn prefix(sub_size: usize, sup_size: usize) -> Self {
        assert!(sub_size <= sup_size);
        Selection {
            sup_size,
            map: (0..sub_size as u32).collect(),
        }
    }

    pub fn sub_size(&self) -> usize {
        self.map.len()
    }

    pub fn sup_size(&self) -> usize {
        self.sup_size
    }

    pub fn map(&self) -> &[u32] {
        &self.map
    }

    pub fn is_prefix(&self) -> bool {
        self.map.iter().enumerate().all(|(k, &q)| q as usize == k)
    }

    /// `Φ v`: extracts the sub-vector at the mapped positions.
    pub fn apply<T: Copy>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.sup_size);
        self.map.iter().map(|&q| v[q as usize]).collect()
    }

    /// `Φᵀ w`: writes `w` into the mapped positions of `out`.
    pub fn scatter<T: Copy>(&self, w: &[T], out: &mut [T]) {
        assert_eq!(w.len(), self.map.len());
        assert_eq!(out.len(), self.sup_size);
        for (&q, &x) in self.map.iter().zip(w) {
            out[q as usize] = x;
        }
    }

    /// `self ∘ inner`: embeds through `inner` first, then through `self`.
    pub fn compose(&self, inner: &Selection) -> Selection {
        assert_eq!(inner.sup_size, self.map.len());
        Selection {
            sup_size: self.sup_size,
            map: inner.map.iter().map(|&q| self.map[q as usize]).collect(),
        }
    }
}

/// Positions of the rows of `sub` inside `sup`, both co-lex sorted, comparing
/// only the leading `width` coordinates.
fn merge_positions<'a>(
    sub: impl Iterator<Item = &'a [u32]>,
    mut sup: impl Iterator<Item = &'a [u32]>,
    width: usize,
) -> Result<Vec<u32>> {
    let mut map = Vec::new();
    let mut pos = 0u32;
    'outer: for row in sub {
        let key = &row[..width];
        for cand in sup.by_ref() {
            let here = pos;
            pos += 1;
            match colex_cmp(&cand[..width], key) {
                Ordering::Less => continue,
                Ordering::Equal => {
                    map.push(here);
                    continue 'outer;
                }
                Ordering::Greater => break,
            }
        }
        return Err(Error::NotASubset(key.to_vec()));
    }
    Ok(map)
}

/// The selection `Φ[A_sub, A_sup]` of the ordinal embedding.
pub fn ordinal_selection(sub: &MultiIndexSet, sup: &MultiIndexSet) -> Result<Selection> {
    if sub.m() != sup.m() {
        return Err(Error::LengthMismatch {
            expected: sup.m(),
            actual: sub.m(),
        });
    }
    let map = merge_positions(sub.iter(), sup.iter(), sub.m())?;
    Selection::new(map, sup.len())
}

/// Group and block boundaries of the hierarchical scheme, derived from the
/// tube projections alone.
///
/// At level `ℓ` (1-based) a *group* is a maximal run of `A` sharing
/// `(α_{ℓ+1}, …, α_m)`, and its *blocks* are the level `ℓ-1` groups it merges
/// (single elements at level 1). Group `g` of level `ℓ` has `𝒯_ℓ[g]` blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelLayout {
    total: usize,
    levels: Vec<LevelGeometry>,
}

#[derive(Debug, Clone, PartialEq)]
struct LevelGeometry {
    /// Positions in `A`; group `g` spans `group_offsets[g]..group_offsets[g+1]`.
    group_offsets: Vec<usize>,
    /// Group `g` owns blocks `first_block[g]..first_block[g+1]`.
    first_block: Vec<usize>,
}

impl LevelLayout {
    pub fn new(projections: &[&[usize]], total: usize) -> Result<Self> {
        let mut levels: Vec<LevelGeometry> = Vec::with_capacity(projections.len());
        let mut prev_blocks = total;
        for (axis, tubes) in projections.iter().enumerate() {
            let sum: usize = tubes.iter().sum();
            if sum != prev_blocks {
                return Err(Error::MalformedTube(format!(
                    "projection {} sums to {sum}, expected {prev_blocks}",
                    axis + 1
                )));
            }
            let mut first_block = Vec::with_capacity(tubes.len() + 1);
            let mut group_offsets = Vec::with_capacity(tubes.len() + 1);
            let mut b = 0usize;
            for &t in tubes.iter() {
                first_block.push(b);
                group_offsets.push(match levels.last() {
                    None => b,
                    Some(prev) => prev.group_offsets[b],
                });
                b += t;
            }
            first_block.push(b);
            group_offsets.push(total);
            prev_blocks = tubes.len();
            levels.push(LevelGeometry {
                group_offsets,
                first_block,
            });
        }
        if prev_blocks != 1 {
            return Err(Error::MalformedTube("top level must be a single group".into()));
        }
        Ok(LevelLayout { total, levels })
    }

    pub fn from_set(set: &MultiIndexSet) -> Result<Self> {
        let projections = all_tube_projections(set);
        let refs: Vec<&[usize]> = projections.iter().map(Vec::as_slice).collect();
        Self::new(&refs, set.len())
    }

    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Number of groups at `level` (1-based).
    pub fn group_count(&self, level: usize) -> usize {
        self.levels[level - 1].first_block.len() - 1
    }

    pub fn group_range(&self, level: usize, group: usize) -> Range<usize> {
        let g = &self.levels[level - 1];
        g.group_offsets[group]..g.group_offsets[group + 1]
    }

    /// Block indices (level `ℓ-1` groups) owned by a group.
    pub fn group_blocks(&self, level: usize, group: usize) -> Range<usize> {
        let g = &self.levels[level - 1];
        g.first_block[group]..g.first_block[group + 1]
    }

    /// Positions in `A` covered by a block of `level`.
    pub fn block_range(&self, level: usize, block: usize) -> Range<usize> {
        if level == 1 {
            block..block + 1
        } else {
            self.group_range(level - 1, block)
        }
    }
}

/// Selections for every block of the hierarchical scheme.
///
/// Level 1 holds, per axis-1 tube, the prefix truncation into the longest tube
/// of its level-2 group. Levels `ℓ ≥ 2` hold, per group and per block `j ≥ 1`,
/// the embedding of that block's prefix set `(α₁, …, α_{ℓ-1})` into block 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTable {
    pub levels: Vec<Vec<Selection>>,
}

pub fn precompute_level_selections(set: &MultiIndexSet, layout: &LevelLayout) -> Result<SelectionTable> {
    let m = set.m();
    let mut levels = Vec::with_capacity(m);

    // Level 1: tube truncations.
    let mut first = Vec::with_capacity(layout.group_count(1));
    if m == 1 {
        first.push(Selection::identity(set.len()));
    } else {
        for g in 0..layout.group_count(2) {
            let blocks = layout.group_blocks(2, g);
            let longest = layout.group_range(1, blocks.start).len();
            for tube in blocks {
                first.push(Selection::prefix(layout.group_range(1, tube).len(), longest));
            }
        }
    }
    levels.push(first);

    for level in 2..=m {
        let width = level - 1;
        let mut table = Vec::new();
        for g in 0..layout.group_count(level) {
            let blocks = layout.group_blocks(level, g);
            let base = layout.block_range(level, blocks.start);
            let rows = |r: Range<usize>| r.map(|i| set.get(i));
            // Chain j -> j-1 -> ... -> 0; each step is a linear merge.
            let mut to_base: Option<Selection> = None;
            let mut prev = base.clone();
            for b in blocks.start + 1..blocks.end {
                let cur = layout.block_range(level, b);
                let step = Selection::new(
                    merge_positions(rows(cur.clone()), rows(prev.clone()), width)?,
                    prev.len(),
                )?;
                let into_base = match &to_base {
                    None => step,
                    Some(outer) => outer.compose(&step),
                };
                table.push(into_base.clone());
                to_base = Some(into_base);
                prev = cur;
            }
        }
        levels.push(table);
    }
    Ok(SelectionTable { levels })
}
