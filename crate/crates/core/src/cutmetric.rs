//! Exact cut norm between step graphons and bounds on the cut distance.
//!
//! On a common refinement with masses `μ`, the difference kernel becomes the
//! matrix `D_ij = (v1_ij - v2_ij) μ_i μ_j`. The cut-norm objective is bilinear
//! in the fraction of each block that `S` and `T` cover, so the supremum is
//! attained at unions of whole blocks. For a fixed `S` the best `T` takes
//! every column with positive (or every column with negative) sum, which
//! leaves an enumeration over `S` only.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GraphonError, Result};
use crate::graphon::{common_refinement, StepGraphon};
use crate::kcore::decompose;

pub const CUT_NORM_LIMIT: usize = 24;
pub const CUT_NORM_BRUTE_LIMIT: usize = 12;
pub const EXHAUSTIVE_GRID_LIMIT: usize = 8;

/// Number of low bits enumerated sequentially inside one parallel chunk.
const CHUNK_BITS: usize = 14;

#[derive(Debug, Clone, Serialize)]
pub struct CutNormWitness {
    pub value: f64,
    /// Cut points of the common refinement that `s` and `t` index into.
    pub boundaries: Vec<f64>,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub sign: i8,
}

fn difference_matrix(g1: &StepGraphon, g2: &StepGraphon) -> (Vec<f64>, Vec<Vec<f64>>) {
    let (a, b) = common_refinement(g1, g2);
    let mu = a.masses();
    let m = a.block_count();
    let d = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| (a.value_at(i, j) - b.value_at(i, j)) * mu[i] * mu[j])
                .collect()
        })
        .collect();
    (a.boundaries().to_vec(), d)
}

fn check_size(m: usize, limit: usize) -> Result<()> {
    if m > limit {
        Err(GraphonError::TooManyBlocks { blocks: m, limit })
    } else {
        Ok(())
    }
}

/// Best one-sided value for the column sums of some `S`: returns the value
/// and `true` when the positive side wins (ties go to the positive side).
fn best_side(cols: &[f64]) -> (f64, bool) {
    let mut pos = 0.0;
    let mut neg = 0.0;
    for &c in cols {
        if c > 0.0 {
            pos += c;
        } else {
            neg -= c;
        }
    }
    if pos >= neg {
        (pos, true)
    } else {
        (neg, false)
    }
}

/// Exact `d□(g1, g2)` with a maximizing pair of block sets.
///
/// Subsets `S` are visited in binary counting order and the first optimum
/// wins, so the witness does not depend on the thread count.
pub fn cut_norm(g1: &StepGraphon, g2: &StepGraphon) -> Result<CutNormWitness> {
    let (boundaries, d) = difference_matrix(g1, g2);
    let m = d.len();
    check_size(m, CUT_NORM_LIMIT)?;

    let low_bits = m.min(CHUNK_BITS);
    let chunks = 1u64 << (m - low_bits);
    let scan_chunk = |high: u64| -> (f64, u64) {
        let base = high << low_bits;
        let mut cols = vec![0.0; m];
        for i in (low_bits..m).filter(|&i| base >> i & 1 == 1) {
            for (c, dij) in cols.iter_mut().zip(&d[i]) {
                *c += dij;
            }
        }
        let mut best = (best_side(&cols).0, base);
        for low in 1u64..(1u64 << low_bits) {
            let set_bit = low.trailing_zeros() as usize;
            for cleared in 0..set_bit {
                for (c, dij) in cols.iter_mut().zip(&d[cleared]) {
                    *c -= dij;
                }
            }
            for (c, dij) in cols.iter_mut().zip(&d[set_bit]) {
                *c += dij;
            }
            let (v, _) = best_side(&cols);
            if v > best.0 {
                best = (v, base | low);
            }
        }
        best
    };
    let (_, mask) = (0..chunks).into_par_iter().map(scan_chunk).reduce(
        || (f64::NEG_INFINITY, u64::MAX),
        |a, b| {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        },
    );

    let s: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
    let cols: Vec<f64> = (0..m).map(|j| s.iter().map(|&i| d[i][j]).sum()).collect();
    let (_, positive) = best_side(&cols);
    let t: Vec<usize> = (0..m)
        .filter(|&j| if positive { cols[j] > 0.0 } else { cols[j] < 0.0 })
        .collect();
    let d = &d;
    let raw: f64 = s.iter().flat_map(|&i| t.iter().map(move |&j| d[i][j])).sum();
    Ok(CutNormWitness {
        value: raw.abs(),
        boundaries,
        s,
        t,
        sign: if positive { 1 } else { -1 },
    })
}

/// Full enumeration over all pairs `(S, T)`. Used only as an oracle.
pub fn cut_norm_bruteforce(g1: &StepGraphon, g2: &StepGraphon) -> Result<f64> {
    let (_, d) = difference_matrix(g1, g2);
    let m = d.len();
    check_size(m, CUT_NORM_BRUTE_LIMIT)?;
    let best = (0u32..(1 << m))
        .into_par_iter()
        .map(|s_mask| {
            let cols: Vec<f64> = (0..m)
                .map(|j| {
                    (0..m)
                        .filter(|&i| s_mask >> i & 1 == 1)
                        .map(|i| d[i][j])
                        .sum()
                })
                .collect();
            let mut best = 0.0f64;
            for t_mask in 0u32..(1 << m) {
                let total: f64 = (0..m)
                    .filter(|&j| t_mask >> j & 1 == 1)
                    .map(|j| cols[j])
                    .sum();
                best = best.max(total.abs());
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SearchMode {
    Exhaustive,
    Local { restarts: usize, seed: u64 },
}

impl SearchMode {
    pub fn local() -> Self {
        SearchMode::Local {
            restarts: 32,
            seed: 0,
        }
    }
}

/// Certified lower bound and permutation-search upper bound for `δ□`.
///
/// `upper` is the best `d□` over block permutations of the two inputs after
/// averaging onto the uniform grid; `defect_a` and `defect_b` are the L1
/// distances introduced by that averaging. `upper + defect_a + defect_b`
/// bounds `δ□` of the original inputs.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaBoxEstimate {
    pub lower: f64,
    pub upper: f64,
    pub best_permutation: Vec<usize>,
    pub method: SearchMode,
    pub grid: usize,
    pub defect_a: f64,
    pub defect_b: f64,
    pub density_gap: f64,
    pub degeneracy_gap: f64,
}

pub fn delta_box_bounds(
    g1: &StepGraphon,
    g2: &StepGraphon,
    grid: usize,
    mode: SearchMode,
) -> Result<DeltaBoxEstimate> {
    if grid == 0 {
        return Err(GraphonError::BadGrid("grid must have at least one block".into()));
    }
    let limit = match mode {
        SearchMode::Exhaustive => EXHAUSTIVE_GRID_LIMIT,
        SearchMode::Local { .. } => CUT_NORM_LIMIT,
    };
    if grid > limit {
        return Err(GraphonError::BadGrid(format!(
            "grid of {grid} blocks exceeds {limit} for this mode"
        )));
    }
    if let SearchMode::Local { restarts: 0, .. } = mode {
        return Err(GraphonError::BadGrid("local search needs at least one restart".into()));
    }

    let (a, defect_a) = g1.resample_uniform(grid)?;
    let (b, defect_b) = g2.resample_uniform(grid)?;
    let objective = |perm: &[usize]| -> Result<f64> {
        Ok(cut_norm(&a.apply_block_permutation(perm)?, &b)?.value)
    };

    let (upper, best_permutation) = match mode {
        SearchMode::Exhaustive => {
            let mut perm: Vec<usize> = (0..grid).collect();
            let mut best = (objective(&perm)?, perm.clone());
            while next_permutation(&mut perm) {
                let v = objective(&perm)?;
                if v < best.0 {
                    best = (v, perm.clone());
                }
            }
            best
        }
        SearchMode::Local { restarts, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best: Option<(f64, Vec<usize>)> = None;
            for restart in 0..restarts {
                let mut perm: Vec<usize> = (0..grid).collect();
                if restart > 0 {
                    perm.shuffle(&mut rng);
                }
                let (v, p) = hill_climb(perm, &objective)?;
                if best.as_ref().is_none_or(|b| v < b.0) {
                    best = Some((v, p));
                }
            }
            best.expect("at least one restart")
        }
    };

    let density_gap = (g1.edge_density() - g2.edge_density()).abs();
    let degeneracy_gap = (decompose(g1).degeneracy - decompose(g2).degeneracy).abs();
    let lower = density_gap.max((degeneracy_gap / 2.0).powi(2));
    Ok(DeltaBoxEstimate {
        lower,
        upper,
        best_permutation,
        method: mode,
        grid,
        defect_a,
        defect_b,
        density_gap,
        degeneracy_gap,
    })
}

/// First-improvement descent over pairwise swaps.
fn hill_climb(
    mut perm: Vec<usize>,
    objective: &impl Fn(&[usize]) -> Result<f64>,
) -> Result<(f64, Vec<usize>)> {
    let mut current = objective(&perm)?;
    let n = perm.len();
    'outer: loop {
        for x in 0..n {
            for y in x + 1..n {
                perm.swap(x, y);
                let v = objective(&perm)?;
                if v < current {
                    current = v;
                    continue 'outer;
                }
                perm.swap(x, y);
            }
        }
        return Ok((current, perm));
    }
}

/// Advances to the next permutation in lexicographic order.
fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContinuityReport {
    pub degeneracy_a: f64,
    pub degeneracy_b: f64,
    pub gap: f64,
    pub cut_norm: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Checks `|δ(g1) - δ(g2)| ≤ 2 √d□(g1, g2) + tol`. Since `δ□ ≤ d□`, this is
/// implied by the continuity bound in terms of the cut distance.
pub fn check_continuity(g1: &StepGraphon, g2: &StepGraphon, tol: f64) -> Result<ContinuityReport> {
    let cut = cut_norm(g1, g2)?.value;
    let degeneracy_a = decompose(g1).degeneracy;
    let degeneracy_b = decompose(g2).degeneracy;
    let gap = (degeneracy_a - degeneracy_b).abs();
    let bound = 2.0 * cut.sqrt();
    Ok(ContinuityReport {
        degeneracy_a,
        degeneracy_b,
        gap,
        cut_norm: cut,
        bound,
        holds: gap <= bound + tol,
    })
}
