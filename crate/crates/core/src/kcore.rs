//! κ-cores, shell indices and degeneracy of step graphons.
//!
//! For a step graphon every stage `K_κⁿ` of the core iteration is a union of
//! whole blocks, because all points of a block share the same restricted
//! degree. The iteration therefore reaches its fixed point after at most `m`
//! removals, and the shells are recovered exactly by greedy peeling.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GraphonError, Result};
use crate::graphon::{ActiveSet, StepGraphon};
use crate::TOL;

/// Largest block count accepted by [`brute_force_degeneracy`].
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// The sequence of core stages for one threshold κ.
///
/// `stages[0]` is the full set and `stages[n]` is `K_κⁿ`. The list stops at
/// the first fixed point, so consecutive entries are strictly decreasing and
/// the last entry equals `terminal`.
#[derive(Debug, Clone, Serialize)]
pub struct CoreTrace {
    pub kappa: f64,
    pub stages: Vec<ActiveSet>,
    pub terminal: ActiveSet,
}

impl CoreTrace {
    /// First stage index that no longer contains block `i`, if any.
    pub fn leave_stage(&self, i: usize) -> Option<usize> {
        self.stages.iter().position(|s| !s.contains(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeelStep {
    pub block: usize,
    pub degree: f64,
    pub running_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoreDecomposition {
    pub shells: Vec<f64>,
    pub degeneracy: f64,
    pub peel_order: Vec<PeelStep>,
}

impl CoreDecomposition {
    /// Blocks whose shell index is at least `kappa - TOL`.
    pub fn core_blocks(&self, kappa: f64) -> Vec<bool> {
        self.shells.iter().map(|&s| s >= kappa - TOL).collect()
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if (0.0..=1.0).contains(&kappa) {
        Ok(())
    } else {
        Err(GraphonError::BadParameter(format!("kappa = {kappa} is outside [0, 1]")))
    }
}

/// One filtering step: keeps the blocks of `k` whose degree restricted to
/// `k` is at least `kappa` (up to `TOL`).
pub fn core_stage(g: &StepGraphon, kappa: f64, k: &ActiveSet) -> Result<ActiveSet> {
    if k.block_count() != g.block_count() {
        return Err(GraphonError::MismatchedBlockCount {
            expected: g.block_count(),
            got: k.block_count(),
        });
    }
    let members = k.membership();
    let next = (0..g.block_count())
        .map(|i| members[i] && g.restricted_degree_unchecked(i, members) >= kappa - TOL)
        .collect();
    ActiveSet::from_membership(g, next)
}

/// Iterates [`core_stage`] from the full set until nothing changes.
pub fn kappa_core(g: &StepGraphon, kappa: f64) -> Result<CoreTrace> {
    check_kappa(kappa)?;
    let mut stages = vec![ActiveSet::full(g)];
    loop {
        let current = stages.last().expect("at least one stage");
        let next = core_stage(g, kappa, current)?;
        if next == *current {
            break;
        }
        stages.push(next);
    }
    let terminal = stages.last().cloned().expect("at least one stage");
    Ok(CoreTrace {
        kappa,
        stages,
        terminal,
    })
}

/// Shell indices and degeneracy by greedy peeling: repeatedly remove the
/// active block of smallest restricted degree (lowest index on ties) and
/// record the running maximum of the removal degrees.
pub fn decompose(g: &StepGraphon) -> CoreDecomposition {
    let m = g.block_count();
    let mut degree = g.degrees();
    let mut active = vec![true; m];
    let mut shells = vec![0.0; m];
    let mut peel_order = Vec::with_capacity(m);
    let mut running_max = f64::NEG_INFINITY;

    for _ in 0..m {
        let mut pick = usize::MAX;
        for i in (0..m).filter(|&i| active[i]) {
            if pick == usize::MAX || degree[i] < degree[pick] {
                pick = i;
            }
        }
        let d = degree[pick];
        running_max = running_max.max(d);
        shells[pick] = running_max;
        peel_order.push(PeelStep {
            block: pick,
            degree: d,
            running_max,
        });
        active[pick] = false;
        let mu = g.mass(pick);
        for j in (0..m).filter(|&j| active[j]) {
            degree[j] -= g.value_at(j, pick) * mu;
        }
    }

    CoreDecomposition {
        shells,
        degeneracy: running_max.max(0.0),
        peel_order,
    }
}

/// Exhaustive max-min over nonempty block subsets. Ties keep the subset with
/// the smallest bitmask, independent of how the work is split.
pub fn brute_force_degeneracy(g: &StepGraphon) -> Result<(f64, ActiveSet)> {
    let m = g.block_count();
    if m > BRUTE_FORCE_LIMIT {
        return Err(GraphonError::TooManyBlocks {
            blocks: m,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let min_degree = |mask: u32| -> f64 {
        let mut worst = f64::INFINITY;
        for i in (0..m).filter(|i| mask >> i & 1 == 1) {
            let d: f64 = (0..m)
                .filter(|j| mask >> j & 1 == 1)
                .map(|j| g.value_at(i, j) * g.mass(j))
                .sum();
            worst = worst.min(d);
        }
        worst
    };
    let (value, mask) = (1u32..(1u32 << m))
        .into_par_iter()
        .map(|mask| (min_degree(mask), mask))
        .reduce(
            || (f64::NEG_INFINITY, u32::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    let witness = ActiveSet::from_blocks(g, (0..m).filter(|i| mask >> i & 1 == 1))?;
    Ok((value, witness))
}

/// Shell index of the point `x`.
pub fn shell_of(g: &StepGraphon, x: f64) -> Result<f64> {
    let block = g.block_of(x)?;
    Ok(decompose(g).shells[block])
}

/// `(κ, |K_κ|)` for every κ in `grid`, each from its own core iteration.
pub fn mass_of_core_curve(g: &StepGraphon, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.iter()
        .map(|&kappa| Ok((kappa, kappa_core(g, kappa)?.terminal.mass())))
        .collect()
}
