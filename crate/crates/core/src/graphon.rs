//! Step graphons and the basic integral operators on them.
//!
//! A [`StepGraphon`] is given by cut points `0 = b_0 < b_1 < ... < b_m = 1`
//! and a symmetric `m x m` matrix of values in `[0, 1]`. Block `i` covers
//! `[b_i, b_{i+1})` (the last block is closed) and has mass `b_{i+1} - b_i`.

use serde::{Deserialize, Serialize};

use crate::error::{GraphonError, Result};
use crate::TOL;

/// Anything that can be evaluated pointwise on the unit square.
pub trait Kernel {
    fn value(&self, x: f64, y: f64) -> f64;
}

#[derive(Deserialize)]
struct RawStepGraphon {
    boundaries: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl TryFrom<RawStepGraphon> for StepGraphon {
    type Error = GraphonError;

    fn try_from(raw: RawStepGraphon) -> Result<Self> {
        StepGraphon::new(raw.boundaries, raw.values)
    }
}

/// Piecewise-constant symmetric kernel on `[0,1]^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStepGraphon")]
pub struct StepGraphon {
    boundaries: Vec<f64>,
    values: Vec<Vec<f64>>,
    #[serde(skip)]
    masses: Vec<f64>,
}

/// Checks the step-graphon invariants without building one.
pub fn validate(boundaries: &[f64], values: &[Vec<f64>]) -> Result<()> {
    if boundaries.len() < 2 {
        return Err(GraphonError::BadBoundaries {
            index: 0,
            reason: "need at least two cut points",
        });
    }
    if boundaries[0] != 0.0 {
        return Err(GraphonError::BadBoundaries {
            index: 0,
            reason: "first cut point must be 0",
        });
    }
    for (k, pair) in boundaries.windows(2).enumerate() {
        if !pair[1].is_finite() || pair[1] <= pair[0] {
            return Err(GraphonError::BadBoundaries {
                index: k + 1,
                reason: "cut points must be strictly increasing",
            });
        }
    }
    let last = boundaries.len() - 1;
    if boundaries[last] != 1.0 {
        return Err(GraphonError::BadBoundaries {
            index: last,
            reason: "last cut point must be 1",
        });
    }
    let m = last;
    if values.len() != m {
        return Err(GraphonError::BadShape { row: values.len().min(m) });
    }
    for (i, row) in values.iter().enumerate() {
        if row.len() != m {
            return Err(GraphonError::BadShape { row: i });
        }
    }
    for i in 0..m {
        for j in 0..m {
            let v = values[i][j];
            if !(0.0..=1.0).contains(&v) {
                return Err(GraphonError::OutOfRange { i, j });
            }
            if j > i && values[j][i] != v {
                return Err(GraphonError::NonSymmetric { i, j });
            }
        }
    }
    Ok(())
}

impl StepGraphon {
    pub fn new(boundaries: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        validate(&boundaries, &values)?;
        let masses = boundaries.windows(2).map(|p| p[1] - p[0]).collect();
        Ok(Self {
            boundaries,
            values,
            masses,
        })
    }

    /// Step graphon on the uniform partition `{k/m}` with the given values.
    pub fn uniform(values: Vec<Vec<f64>>) -> Result<Self> {
        let m = values.len();
        if m == 0 {
            return Err(GraphonError::BadShape { row: 0 });
        }
        Self::new(uniform_boundaries(m), values)
    }

    pub fn constant(a: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![vec![a]])
    }

    pub fn block_count(&self) -> usize {
        self.masses.len()
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.masses[i]
    }

    /// Block `j` covers `[b_j, b_{j+1})`; the last block also contains 1.
    pub fn block_of(&self, x: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&x) {
            return Err(GraphonError::PointOutOfRange(x));
        }
        let k = self.boundaries.partition_point(|&b| b <= x);
        Ok((k - 1).min(self.block_count() - 1))
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.block_count() {
            return Err(GraphonError::IndexOutOfRange {
                index: i,
                blocks: self.block_count(),
            });
        }
        Ok(())
    }

    fn check_set(&self, k: &ActiveSet) -> Result<()> {
        if k.block_count() != self.block_count() {
            return Err(GraphonError::MismatchedBlockCount {
                expected: self.block_count(),
                got: k.block_count(),
            });
        }
        Ok(())
    }

    /// `d_w(x)` for `x` in block `i`.
    pub fn degree(&self, i: usize) -> Result<f64> {
        self.check_index(i)?;
        Ok(self.degree_unchecked(i))
    }

    pub(crate) fn degree_unchecked(&self, i: usize) -> f64 {
        self.values[i]
            .iter()
            .zip(&self.masses)
            .map(|(v, mu)| v * mu)
            .sum()
    }

    /// `d_w^K(x)` for `x` in block `i`: the degree counted only over `K`.
    pub fn restricted_degree(&self, i: usize, k: &ActiveSet) -> Result<f64> {
        self.check_index(i)?;
        self.check_set(k)?;
        Ok(self.restricted_degree_unchecked(i, k.membership()))
    }

    pub(crate) fn restricted_degree_unchecked(&self, i: usize, members: &[bool]) -> f64 {
        self.values[i]
            .iter()
            .zip(&self.masses)
            .zip(members)
            .filter(|(_, &inside)| inside)
            .map(|((v, mu), _)| v * mu)
            .sum()
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.block_count()).map(|i| self.degree_unchecked(i)).collect()
    }

    /// Integral of the kernel over the unit square.
    pub fn edge_density(&self) -> f64 {
        let mut total = 0.0;
        for (i, row) in self.values.iter().enumerate() {
            let inner: f64 = row.iter().zip(&self.masses).map(|(v, mu)| v * mu).sum();
            total += inner * self.masses[i];
        }
        total
    }

    /// True when all blocks have the same mass, up to `TOL`.
    pub fn has_equal_masses(&self) -> bool {
        self.unequal_mass_index().is_none()
    }

    fn unequal_mass_index(&self) -> Option<usize> {
        let first = self.masses[0];
        self.masses.iter().position(|mu| (mu - first).abs() > TOL)
    }

    /// Relabels equal-mass blocks: `values'[i][j] = values[perm[i]][perm[j]]`.
    pub fn apply_block_permutation(&self, perm: &[usize]) -> Result<StepGraphon> {
        let m = self.block_count();
        if let Some(index) = self.unequal_mass_index() {
            return Err(GraphonError::UnequalBlockMasses { index });
        }
        if !is_permutation(perm, m) {
            return Err(GraphonError::BadPermutation { blocks: m });
        }
        let values = perm
            .iter()
            .map(|&pi| perm.iter().map(|&pj| self.values[pi][pj]).collect())
            .collect();
        Ok(Self {
            boundaries: self.boundaries.clone(),
            values,
            masses: self.masses.clone(),
        })
    }

    /// The pullback `w(σ₂(x), σ₂(y))` under the doubling map
    /// `σ₂(x) = 2x mod 1`. Block `i` of the input appears twice in the
    /// output, as block `i` and block `i + m`.
    pub fn pullback_sigma2(&self) -> StepGraphon {
        let m = self.block_count();
        let mut boundaries: Vec<f64> = self.boundaries.iter().map(|b| b / 2.0).collect();
        boundaries.extend(self.boundaries[1..].iter().map(|b| 0.5 + b / 2.0));
        let values = (0..2 * m)
            .map(|i| (0..2 * m).map(|j| self.values[i % m][j % m]).collect())
            .collect();
        StepGraphon::new(boundaries, values).expect("pullback of a valid graphon is valid")
    }

    /// Averages the kernel onto the uniform `m`-partition. Returns the
    /// resampled graphon and its L1 distance to `self`.
    pub fn resample_uniform(&self, m: usize) -> Result<(StepGraphon, f64)> {
        if m == 0 {
            return Err(GraphonError::BadGrid("grid needs at least one block".into()));
        }
        let grid = uniform_boundaries(m);
        let h = 1.0 / m as f64;
        // overlap[p][i] = |grid cell p ∩ block i|
        let overlap: Vec<Vec<f64>> = grid
            .windows(2)
            .map(|cell| {
                self.boundaries
                    .windows(2)
                    .map(|blk| (cell[1].min(blk[1]) - cell[0].max(blk[0])).max(0.0))
                    .collect()
            })
            .collect();
        let mut values = vec![vec![0.0; m]; m];
        for p in 0..m {
            for q in p..m {
                let mut acc = 0.0;
                for (i, &opi) in overlap[p].iter().enumerate() {
                    if opi == 0.0 {
                        continue;
                    }
                    for (j, &oqj) in overlap[q].iter().enumerate() {
                        acc += opi * oqj * self.values[i][j];
                    }
                }
                let v = (acc / (h * h)).clamp(0.0, 1.0);
                values[p][q] = v;
                values[q][p] = v;
            }
        }
        let resampled = StepGraphon::new(grid, values)?;
        let defect = l1_distance(self, &resampled);
        Ok((resampled, defect))
    }
}

impl Kernel for StepGraphon {
    fn value(&self, x: f64, y: f64) -> f64 {
        let i = self.block_of(x.clamp(0.0, 1.0)).unwrap_or(0);
        let j = self.block_of(y.clamp(0.0, 1.0)).unwrap_or(0);
        self.values[i][j]
    }
}

pub fn uniform_boundaries(m: usize) -> Vec<f64> {
    (0..=m).map(|k| k as f64 / m as f64).collect()
}

pub(crate) fn is_permutation(perm: &[usize], m: usize) -> bool {
    if perm.len() != m {
        return false;
    }
    let mut seen = vec![false; m];
    for &p in perm {
        if p >= m || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

/// Boundary tolerance used when merging partitions.
pub const MERGE_TOL: f64 = 1e-12;

/// Re-expresses both graphons on the union of their cut points.
pub fn common_refinement(g1: &StepGraphon, g2: &StepGraphon) -> (StepGraphon, StepGraphon) {
    if g1.boundaries == g2.boundaries {
        return (g1.clone(), g2.clone());
    }
    let mut points: Vec<f64> = g1
        .boundaries
        .iter()
        .chain(&g2.boundaries)
        .copied()
        .collect();
    points.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::with_capacity(points.len());
    for p in points {
        match merged.last() {
            Some(&last) if p - last <= MERGE_TOL => {}
            _ => merged.push(p),
        }
    }
    // the final cut point must be exactly 1
    if let Some(last) = merged.last_mut() {
        *last = 1.0;
    }
    (refine_onto(g1, &merged), refine_onto(g2, &merged))
}

fn refine_onto(g: &StepGraphon, merged: &[f64]) -> StepGraphon {
    let origin: Vec<usize> = merged
        .windows(2)
        .map(|cell| g.block_of(0.5 * (cell[0] + cell[1])).expect("midpoint in range"))
        .collect();
    let values = origin
        .iter()
        .map(|&i| origin.iter().map(|&j| g.values[i][j]).collect())
        .collect();
    StepGraphon::new(merged.to_vec(), values).expect("refinement of a valid graphon is valid")
}

/// `∫∫ |w1 - w2|`.
pub fn l1_distance(g1: &StepGraphon, g2: &StepGraphon) -> f64 {
    let (a, b) = common_refinement(g1, g2);
    let mu = a.masses();
    let mut total = 0.0;
    for i in 0..a.block_count() {
        for j in 0..a.block_count() {
            total += (a.values[i][j] - b.values[i][j]).abs() * mu[i] * mu[j];
        }
    }
    total
}

/// A union of whole blocks of a specific step graphon, with its mass.
#[derive(Debug, Clone, Serialize)]
pub struct ActiveSet {
    membership: Vec<bool>,
    mass: f64,
}

impl PartialEq for ActiveSet {
    fn eq(&self, other: &Self) -> bool {
        self.membership == other.membership
    }
}

impl Eq for ActiveSet {}

impl ActiveSet {
    pub fn from_membership(g: &StepGraphon, membership: Vec<bool>) -> Result<Self> {
        if membership.len() != g.block_count() {
            return Err(GraphonError::MismatchedBlockCount {
                expected: g.block_count(),
                got: membership.len(),
            });
        }
        let mass = membership
            .iter()
            .zip(g.masses())
            .filter(|(&inside, _)| inside)
            .fold(0.0, |acc, (_, mu)| acc + mu);
        Ok(Self { membership, mass })
    }

    pub fn full(g: &StepGraphon) -> Self {
        Self {
            membership: vec![true; g.block_count()],
            mass: g.masses().iter().sum(),
        }
    }

    pub fn empty(g: &StepGraphon) -> Self {
        Self {
            membership: vec![false; g.block_count()],
            mass: 0.0,
        }
    }

    pub fn from_blocks(g: &StepGraphon, blocks: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut membership = vec![false; g.block_count()];
        for b in blocks {
            if b >= membership.len() {
                return Err(GraphonError::IndexOutOfRange {
                    index: b,
                    blocks: membership.len(),
                });
            }
            membership[b] = true;
        }
        Self::from_membership(g, membership)
    }

    pub fn membership(&self) -> &[bool] {
        &self.membership
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn block_count(&self) -> usize {
        self.membership.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.membership.get(i).copied().unwrap_or(false)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.membership
            .iter()
            .enumerate()
            .filter(|(_, &inside)| inside)
            .map(|(i, _)| i)
    }

    pub fn len(&self) -> usize {
        self.membership.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.membership.iter().any(|&b| b)
    }

    pub fn is_subset_of(&self, other: &ActiveSet) -> bool {
        self.membership
            .iter()
            .zip(&other.membership)
            .all(|(&a, &b)| !a || b)
    }
}
