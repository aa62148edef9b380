//! Closed-form example families: the min graphon, the two-block perturbation
//! of a constant graphon, the extremal edge-density graphons, and a step
//! graphon whose core iteration removes the two middle bands in an order
//! that flips as κ decreases towards 1/5.

use serde::Serialize;

use crate::analytic::AnalyticGraphon;
use crate::error::{GraphonError, Result};
use crate::graphon::StepGraphon;
use crate::kcore::{kappa_core, CoreTrace};

/// Successive terms closer than this count as converged.
pub const RECURSION_STEP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecursionStatus {
    Converged,
    /// The radicand went negative: the next stage is empty.
    Aborted,
    /// `n_max` steps were taken without meeting the step tolerance.
    Exhausted,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecursionTrace {
    pub kappa: f64,
    pub terms: Vec<f64>,
    pub status: RecursionStatus,
}

impl RecursionTrace {
    pub fn last(&self) -> f64 {
        *self.terms.last().expect("trace starts at k⁰ = 0")
    }
}

/// Left endpoints `kⁿ` of the stages `[kⁿ, 1]` of the min graphon:
/// `kⁿ⁺¹ = 1 - √(1 - (kⁿ)² - 2κ)`, `k⁰ = 0`.
pub fn min_graphon_recursion(kappa: f64, n_max: usize) -> Result<RecursionTrace> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(GraphonError::BadParameter(format!("kappa = {kappa} is outside [0, 1]")));
    }
    if n_max == 0 {
        return Err(GraphonError::BadParameter("n_max must be at least 1".into()));
    }
    let mut terms = vec![0.0];
    let mut k = 0.0f64;
    for _ in 0..n_max {
        let radicand = 1.0 - k * k - 2.0 * kappa;
        if radicand < 0.0 {
            return Ok(RecursionTrace {
                kappa,
                terms,
                status: RecursionStatus::Aborted,
            });
        }
        let next = 1.0 - radicand.sqrt();
        terms.push(next);
        if (next - k).abs() < RECURSION_STEP_TOL {
            return Ok(RecursionTrace {
                kappa,
                terms,
                status: RecursionStatus::Converged,
            });
        }
        k = next;
    }
    Ok(RecursionTrace {
        kappa,
        terms,
        status: RecursionStatus::Exhausted,
    })
}

/// Stable fixed point `½(1 - √(1 - 4κ))`, defined for `κ ≤ ¼`.
pub fn min_graphon_fixed_point(kappa: f64) -> Option<f64> {
    if (0.0..=0.25).contains(&kappa) {
        Some(0.5 * (1.0 - (1.0 - 4.0 * kappa).sqrt()))
    } else {
        None
    }
}

/// The κ-core `[k_κ, 1]` of the min graphon, or `None` when empty.
pub fn min_graphon_core(kappa: f64) -> Result<Option<(f64, f64)>> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(GraphonError::BadParameter(format!("kappa = {kappa} is outside [0, 1]")));
    }
    Ok(min_graphon_fixed_point(kappa).map(|k| (k, 1.0)))
}

/// Degeneracy of the graphon that is `b` on `[0, α]²` and `a` elsewhere.
pub fn two_block_degeneracy(a: f64, b: f64, alpha: f64) -> Result<f64> {
    for (name, v) in [("a", a), ("b", b), ("alpha", alpha)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(GraphonError::BadParameter(format!("{name} = {v} is outside (0, 1)")));
        }
    }
    Ok(if b < a {
        (1.0 - alpha) * a + alpha * b
    } else {
        a.max(alpha * b)
    })
}

/// The graphons attaining `e = δ²` and `e = δ(2 - δ)` at degeneracy `δ`.
pub fn extremal_pair(delta: f64) -> Result<(StepGraphon, StepGraphon)> {
    let lower = AnalyticGraphon::LowerExtremal(delta)
        .native_step()?
        .expect("step family");
    let upper = AnalyticGraphon::UpperExtremal(delta)
        .native_step()?
        .expect("step family");
    Ok((lower, upper))
}

/// `f(n) = 1 - 1/(n + 1)`.
fn f(n: usize) -> f64 {
    1.0 - 1.0 / (n as f64 + 1.0)
}

/// Sequences for the alternating construction, truncated at depth `N`.
///
/// All vectors are indexed `0..=N` with the zero-th entry equal to 0:
/// `alpha[n]` is `f(n)` for even `n` and the midpoint of its neighbours for
/// odd `n`; `alpha_prime` swaps the parities; `eps` and `eps_prime` are the
/// increments; `beta[j] = Σ_{i ≤ j} ε_i (1 - ε_{i-1})`.
#[derive(Debug, Clone, Serialize)]
pub struct AppendixSpec {
    pub depth: usize,
    pub alpha: Vec<f64>,
    pub alpha_prime: Vec<f64>,
    pub eps: Vec<f64>,
    pub eps_prime: Vec<f64>,
    pub beta: Vec<f64>,
    pub beta_prime: Vec<f64>,
}

pub fn appendix_spec(depth: usize) -> Result<AppendixSpec> {
    AppendixSpec::new(depth)
}

fn increments(alpha: &[f64]) -> Vec<f64> {
    let mut eps = vec![0.0];
    eps.extend(alpha.windows(2).map(|w| w[1] - w[0]));
    eps
}

fn partial_betas(eps: &[f64]) -> Vec<f64> {
    let mut beta = vec![0.0];
    let mut acc = 0.0;
    for i in 1..eps.len() {
        acc += eps[i] * (1.0 - eps[i - 1]);
        beta.push(acc);
    }
    beta
}

const SEQ_TOL: f64 = 1e-12;

impl AppendixSpec {
    pub fn new(depth: usize) -> Result<Self> {
        if depth < 4 {
            return Err(GraphonError::BadDepth(depth));
        }
        let midpoint = |n: usize| 0.5 * (f(n - 1) + f(n + 1));
        let alpha: Vec<f64> = (0..=depth)
            .map(|n| match n {
                0 => 0.0,
                n if n % 2 == 0 => f(n),
                n => midpoint(n),
            })
            .collect();
        let alpha_prime: Vec<f64> = (0..=depth)
            .map(|n| match n {
                0 => 0.0,
                n if n % 2 == 1 => f(n),
                n => midpoint(n),
            })
            .collect();
        let eps = increments(&alpha);
        let eps_prime = increments(&alpha_prime);
        let spec = Self {
            depth,
            beta: partial_betas(&eps),
            beta_prime: partial_betas(&eps_prime),
            alpha,
            alpha_prime,
            eps,
            eps_prime,
        };
        spec.check_invariants()?;
        Ok(spec)
    }

    /// Positivity, monotonicity, truncation and the interleaving
    /// `ε'₁ > ε₁ = ε₂ > ε'₂ = ε'₃ > ε₃ = ε₄ > …`.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.depth;
        let fail = |what: String| Err(GraphonError::BadParameter(what));
        for (name, eps) in [("eps", &self.eps), ("eps'", &self.eps_prime)] {
            for i in 1..=n {
                if eps[i] <= 0.0 {
                    return fail(format!("{name}[{i}] is not positive"));
                }
                if i > 1 && eps[i] > eps[i - 1] + SEQ_TOL {
                    return fail(format!("{name} increases at {i}"));
                }
            }
        }
        for (name, alpha, eps) in [
            ("alpha", &self.alpha, &self.eps),
            ("alpha'", &self.alpha_prime, &self.eps_prime),
        ] {
            if alpha[n] >= 1.0 {
                return fail(format!("{name}[N] is not below 1"));
            }
            let mut acc = 0.0;
            for i in 1..=n {
                acc += eps[i];
                if (acc - alpha[i]).abs() > SEQ_TOL {
                    return fail(format!("{name}[{i}] is not the partial sum of increments"));
                }
            }
        }
        let (e, ep) = (&self.eps, &self.eps_prime);
        for i in (1..=n).step_by(2) {
            if i < n && (e[i] - e[i + 1]).abs() > SEQ_TOL {
                return fail(format!("eps[{i}] != eps[{}]", i + 1));
            }
            if ep[i] <= e[i] {
                return fail(format!("eps'[{i}] <= eps[{i}]"));
            }
        }
        for i in (2..=n).step_by(2) {
            if i < n && (ep[i] - ep[i + 1]).abs() > SEQ_TOL {
                return fail(format!("eps'[{i}] != eps'[{}]", i + 1));
            }
            if e[i] <= ep[i] {
                return fail(format!("eps[{i}] <= eps'[{i}]"));
            }
        }
        Ok(())
    }

    pub fn block_count(&self) -> usize {
        2 * self.depth + 5
    }

    /// Outer zero block `[0, (1 - α_N)/5)`.
    pub fn tail_left_block(&self) -> usize {
        0
    }

    /// Block `[(1 - α_i)/5, (1 - α_{i-1})/5)` for `1 ≤ i ≤ N`.
    pub fn left_block(&self, i: usize) -> usize {
        self.depth + 1 - i
    }

    /// `[1/5, 2/5)`
    pub fn band_a(&self) -> usize {
        self.depth + 1
    }

    /// `[2/5, 3/5)`
    pub fn band_b(&self) -> usize {
        self.depth + 2
    }

    /// `[3/5, 4/5)`
    pub fn band_c(&self) -> usize {
        self.depth + 3
    }

    /// Block `[(4 + α'_{i-1})/5, (4 + α'_i)/5)` for `1 ≤ i ≤ N`.
    pub fn right_block(&self, i: usize) -> usize {
        self.depth + 3 + i
    }

    /// Outer zero block `[(4 + α'_N)/5, 1]`.
    pub fn tail_right_block(&self) -> usize {
        2 * self.depth + 4
    }

    fn left_edge(&self, i: usize) -> f64 {
        (1.0 - self.alpha[i]) / 5.0
    }

    fn right_edge(&self, i: usize) -> f64 {
        (4.0 + self.alpha_prime[i]) / 5.0
    }

    /// Larger of the two truncated tail masses.
    pub fn tail_mass(&self) -> f64 {
        let n = self.depth;
        ((1.0 - self.alpha[n]) / 5.0).max((1.0 - self.alpha_prime[n]) / 5.0)
    }

    /// `κ_i = (1 + (ε_i + ε'_i)/2) / 5`.
    pub fn kappa(&self, i: usize) -> f64 {
        (1.0 + 0.5 * (self.eps[i] + self.eps_prime[i])) / 5.0
    }

    /// Smallest `j ≥ 0` with `(1 + ε_{j+1})/5 < κ`, within the truncation.
    pub fn index_left(&self, kappa: f64) -> Option<usize> {
        (0..self.depth).find(|&j| (1.0 + self.eps[j + 1]) / 5.0 < kappa)
    }

    /// Smallest `j ≥ 0` with `(1 + ε'_{j+1})/5 < κ`, within the truncation.
    pub fn index_right(&self, kappa: f64) -> Option<usize> {
        (0..self.depth).find(|&j| (1.0 + self.eps_prime[j + 1]) / 5.0 < kappa)
    }
}

/// The truncated construction as a step graphon with `2N + 5` blocks,
/// ordered left to right: the left tail, `L_N … L_1`, the bands
/// `A = [1/5, 2/5)`, `B = [2/5, 3/5)`, `C = [3/5, 4/5)`, `R_1 … R_N` and the
/// right tail. Neighbouring `L` blocks and neighbouring `R` blocks are joined
/// with value 1, `L_i` meets `A` with `1 - ε_{i-1}`, `R_i` meets `C` with
/// `1 - ε'_{i-1}`, `A–B` and `B–C` are 1 and everything else is 0.
pub fn appendix_graphon(spec: &AppendixSpec) -> StepGraphon {
    let n = spec.depth;
    let mut boundaries = vec![0.0];
    boundaries.extend((0..=n).rev().map(|i| spec.left_edge(i)));
    boundaries.extend([0.4, 0.6]);
    boundaries.extend((0..=n).map(|i| spec.right_edge(i)));
    boundaries.push(1.0);

    let m = spec.block_count();
    let mut values = vec![vec![0.0; m]; m];
    let mut set = |p: usize, q: usize, v: f64| {
        values[p][q] = v;
        values[q][p] = v;
    };
    for i in 1..n {
        set(spec.left_block(i + 1), spec.left_block(i), 1.0);
        set(spec.right_block(i), spec.right_block(i + 1), 1.0);
    }
    for i in 1..=n {
        set(spec.left_block(i), spec.band_a(), 1.0 - spec.eps[i - 1]);
        set(spec.band_c(), spec.right_block(i), 1.0 - spec.eps_prime[i - 1]);
    }
    set(spec.band_a(), spec.band_b(), 1.0);
    set(spec.band_b(), spec.band_c(), 1.0);
    StepGraphon::new(boundaries, values).expect("construction is a valid graphon")
}

/// Pointwise value of the truncated construction, read off the case table
/// for `x < y` and mirrored.
pub fn appendix_value(spec: &AppendixSpec, x: f64, y: f64) -> f64 {
    let (x, y) = if x <= y { (x, y) } else { (y, x) };
    let n = spec.depth;
    // i with (1 - α_i)/5 ≤ t < (1 - α_{i-1})/5
    let left = |t: f64| (1..=n).find(|&i| spec.left_edge(i) <= t && t < spec.left_edge(i - 1));
    // i with (4 + α'_{i-1})/5 ≤ t < (4 + α'_i)/5
    let right = |t: f64| (1..=n).find(|&i| spec.right_edge(i - 1) <= t && t < spec.right_edge(i));
    let band = |t: f64, lo: f64, hi: f64| lo <= t && t < hi;

    if let (Some(i), Some(j)) = (left(x), left(y)) {
        if i == j + 1 {
            return 1.0;
        }
    }
    if let Some(i) = left(x) {
        if band(y, 0.2, 0.4) {
            return 1.0 - spec.eps[i - 1];
        }
    }
    if band(x, 0.2, 0.4) && band(y, 0.4, 0.6) {
        return 1.0;
    }
    if band(x, 0.4, 0.6) && band(y, 0.6, 0.8) {
        return 1.0;
    }
    if let Some(i) = right(y) {
        if band(x, 0.6, 0.8) {
            return 1.0 - spec.eps_prime[i - 1];
        }
    }
    if let (Some(i), Some(j)) = (right(x), right(y)) {
        if j == i + 1 {
            return 1.0;
        }
    }
    0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeaveOrder {
    /// `[2/5, 3/5)` leaves the active set at an earlier stage.
    MidLeftFirst,
    /// `[3/5, 4/5)` leaves the active set at an earlier stage.
    MidRightFirst,
    Simultaneous,
    /// Neither band leaves.
    Neither,
}

impl LeaveOrder {
    fn from_stages(left: Option<usize>, right: Option<usize>) -> Self {
        match (left, right) {
            (None, None) => Self::Neither,
            (Some(_), None) => Self::MidLeftFirst,
            (None, Some(_)) => Self::MidRightFirst,
            (Some(a), Some(b)) if a < b => Self::MidLeftFirst,
            (Some(a), Some(b)) if a > b => Self::MidRightFirst,
            _ => Self::Simultaneous,
        }
    }
}

/// Comparison of stage `k` against `[(1 - α_{i_κ-k})/5, (4 + α'_{i'_κ-k})/5)`.
#[derive(Debug, Clone, Serialize)]
pub struct IntervalCheck {
    pub k: usize,
    pub expected: (f64, f64),
    /// `None` when the stage is missing or not a single run of blocks.
    pub computed: Option<(f64, f64)>,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlternationRow {
    pub i: usize,
    pub kappa_i: f64,
    pub stage_mid_left: Option<usize>,
    pub stage_mid_right: Option<usize>,
    pub order: LeaveOrder,
    pub i_kappa: Option<usize>,
    pub i_kappa_prime: Option<usize>,
    /// Order implied by comparing `i_κ` with `i'_κ`.
    pub predicted: Option<LeaveOrder>,
    /// `(i_κ, i'_κ)` equals `(i - 1, i)` for odd `i` and `(i, i - 1)` for even.
    pub indices_match_parity: bool,
    pub intervals: Vec<IntervalCheck>,
    pub intervals_match: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlternationReport {
    pub depth: usize,
    pub slack: f64,
    pub rows: Vec<AlternationRow>,
    /// Every row's observed order equals its predicted order.
    pub matches_prediction: bool,
    /// Observed orders differ between every pair of consecutive rows.
    pub alternates: bool,
    pub intervals_match: bool,
}

/// Runs the core iteration at each `κ_i`, `i = 1..=i_max`, and records when
/// the bands `[2/5, 3/5)` and `[3/5, 4/5)` leave the active set.
pub fn appendix_alternation(spec: &AppendixSpec, i_max: usize) -> Result<AlternationReport> {
    if i_max == 0 || i_max + 10 > spec.depth {
        return Err(GraphonError::BadParameter(format!(
            "i_max = {i_max} must lie in 1..={} for depth {}",
            spec.depth.saturating_sub(10),
            spec.depth
        )));
    }
    let g = appendix_graphon(spec);
    let slack = spec.tail_mass() + crate::ASSERT_TOL;
    let mut rows = Vec::with_capacity(i_max);
    for i in 1..=i_max {
        let kappa = spec.kappa(i);
        let trace = kappa_core(&g, kappa)?;
        let stage_mid_left = trace.leave_stage(spec.band_b());
        let stage_mid_right = trace.leave_stage(spec.band_c());
        let i_kappa = spec.index_left(kappa);
        let i_kappa_prime = spec.index_right(kappa);
        let predicted = match (i_kappa, i_kappa_prime) {
            (Some(a), Some(b)) if a < b => Some(LeaveOrder::MidLeftFirst),
            (Some(a), Some(b)) if a > b => Some(LeaveOrder::MidRightFirst),
            _ => None,
        };
        let expected_indices = if i % 2 == 1 { (i - 1, i) } else { (i, i - 1) };
        let intervals = match (i_kappa, i_kappa_prime) {
            (Some(a), Some(b)) => interval_checks(spec, &g, &trace, a, b),
            _ => Vec::new(),
        };
        let intervals_match = intervals.iter().all(|c| c.deviation <= slack);
        rows.push(AlternationRow {
            i,
            kappa_i: kappa,
            stage_mid_left,
            stage_mid_right,
            order: LeaveOrder::from_stages(stage_mid_left, stage_mid_right),
            i_kappa,
            i_kappa_prime,
            predicted,
            indices_match_parity: (i_kappa, i_kappa_prime)
                == (Some(expected_indices.0), Some(expected_indices.1)),
            intervals,
            intervals_match,
        });
    }
    let matches_prediction = rows.iter().all(|r| r.predicted == Some(r.order));
    let alternates = rows.windows(2).all(|w| w[0].order != w[1].order);
    let intervals_match = rows.iter().all(|r| r.intervals_match);
    Ok(AlternationReport {
        depth: spec.depth,
        slack,
        rows,
        matches_prediction,
        alternates,
        intervals_match,
    })
}

fn interval_checks(
    spec: &AppendixSpec,
    g: &StepGraphon,
    trace: &CoreTrace,
    i_kappa: usize,
    i_kappa_prime: usize,
) -> Vec<IntervalCheck> {
    (1..=i_kappa.min(i_kappa_prime))
        .map(|k| {
            let expected = (
                spec.left_edge(i_kappa - k),
                spec.right_edge(i_kappa_prime - k),
            );
            let computed = trace.stages.get(k).and_then(|stage| {
                let members: Vec<usize> = stage.members().collect();
                let (&first, &last) = (members.first()?, members.last()?);
                if last - first + 1 != members.len() {
                    return None;
                }
                Some((g.boundaries()[first], g.boundaries()[last + 1]))
            });
            let deviation = computed.map_or(f64::INFINITY, |(lo, hi)| {
                (lo - expected.0).abs().max((hi - expected.1).abs())
            });
            IntervalCheck {
                k,
                expected,
                computed,
                deviation,
            }
        })
        .collect()
}
