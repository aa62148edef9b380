//! Seeded property suites over random step graphons and finite graphs.
//!
//! Trial `t` of a run with seed `s` draws from its own ChaCha8 stream seeded
//! with `trial_seed(s, t)`, so reports do not depend on how trials are
//! scheduled across threads.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::{appendix_alternation, appendix_spec, AlternationReport};
use crate::cutmetric::check_continuity;
use crate::error::{GraphonError, Result};
use crate::finite::{brute_force_graph_degeneracy, check_kwpr, graph_decompose, graph_to_graphon, FiniteGraph};
use crate::graphon::StepGraphon;
use crate::kcore::{brute_force_degeneracy, decompose, kappa_core};
use crate::random::{equal_mass_graphon, random_graph, step_graphon};
use crate::TOL;

/// Depth of the truncated alternating construction used by the appendix suite.
pub const APPENDIX_DEPTH: usize = 40;
/// Number of `κ_i` examined by the appendix suite.
pub const APPENDIX_ROWS: usize = 6;
/// Random block permutations tried per graphon in the invariance suite.
pub const PERMUTATIONS_PER_GRAPHON: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    LemmasCore,
    Continuity,
    DensityBounds,
    MpInvariance,
    Oracle,
    Kwpr,
    Appendix,
    All,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 7] = [
        Suite::LemmasCore,
        Suite::Continuity,
        Suite::DensityBounds,
        Suite::MpInvariance,
        Suite::Oracle,
        Suite::Kwpr,
        Suite::Appendix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LemmasCore => "lemmas-core",
            Suite::Continuity => "continuity",
            Suite::DensityBounds => "density-bounds",
            Suite::MpInvariance => "mp-invariance",
            Suite::Oracle => "oracle",
            Suite::Kwpr => "kwpr",
            Suite::Appendix => "appendix",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = GraphonError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::INDIVIDUAL
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| GraphonError::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub suite: String,
    pub trial: usize,
    pub seed: u64,
    /// JSON of the offending input.
    pub input: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub failures: Vec<Failure>,
    pub wall_time_secs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub appendix: Option<AlternationReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Seed of trial `t` derived from the run seed (SplitMix64 finalizer).
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    let mut z = seed
        .wrapping_add((trial as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn run_suite(suite: Suite, trials: usize, seed: u64, tol: f64) -> Result<VerifyReport> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(GraphonError::BadParameter(format!("tolerance {tol} must be finite and nonnegative")));
    }
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut appendix = None;
    let suites: Vec<Suite> = match suite {
        Suite::All => Suite::INDIVIDUAL.to_vec(),
        s => vec![s],
    };
    for s in suites {
        if s == Suite::Appendix {
            let (report, mut found) = appendix_suite(seed)?;
            failures.append(&mut found);
            appendix = Some(report);
            continue;
        }
        let check = trial_fn(s);
        let found: Vec<Failure> = (0..trials)
            .into_par_iter()
            .flat_map_iter(|t| {
                let ts = trial_seed(seed, t);
                let mut rng = ChaCha8Rng::seed_from_u64(ts);
                check(&mut rng, t, tol)
                    .into_iter()
                    .map(move |(input, detail)| Failure {
                        suite: s.name().to_string(),
                        trial: t,
                        seed: ts,
                        input,
                        detail,
                    })
            })
            .collect();
        failures.extend(found);
    }
    Ok(VerifyReport {
        suite: suite.name().to_string(),
        trials,
        seed,
        tolerance: tol,
        failures,
        wall_time_secs: start.elapsed().as_secs_f64(),
        appendix,
    })
}

type Findings = Vec<(String, String)>;
type TrialFn = fn(&mut ChaCha8Rng, usize, f64) -> Findings;

fn trial_fn(suite: Suite) -> TrialFn {
    match suite {
        Suite::LemmasCore => lemmas_core_trial,
        Suite::Continuity => continuity_trial,
        Suite::DensityBounds => density_trial,
        Suite::MpInvariance => mp_invariance_trial,
        Suite::Oracle => oracle_trial,
        Suite::Kwpr => kwpr_trial,
        Suite::Appendix | Suite::All => unreachable!("handled by run_suite"),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable input")
}

/// Collects one finding per failed condition.
struct Collector {
    input: String,
    found: Findings,
}

impl Collector {
    fn new(input: String) -> Self {
        Self { input, found: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            self.found.push((self.input.clone(), detail()));
        }
    }
}

/// Every κ at which the core can change, nudged to both sides, plus a grid.
fn probe_kappas(shells: &[f64]) -> Vec<f64> {
    let mut ks: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    for &s in shells {
        ks.extend([s, s - 1e-9, s + 1e-9]);
    }
    ks.retain(|k| (0.0..=1.0).contains(k));
    ks
}

fn lemmas_core_check(g: &StepGraphon, rng: &mut ChaCha8Rng, tol: f64, out: &mut Collector) {
    let m = g.block_count();
    let dec = decompose(g);
    let delta = dec.degeneracy;
    let degrees = g.degrees();

    let (dmin, dmax) = degrees
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    out.check(dmin - tol <= delta && delta <= dmax + tol, || {
        format!("degree sandwich: {dmin} ≤ {delta} ≤ {dmax} fails")
    });

    let high: f64 = (0..m)
        .filter(|&i| degrees[i] >= delta - tol)
        .map(|i| g.mass(i))
        .sum();
    out.check(high >= delta - tol, || {
        format!("high-degree mass {high} is below δ = {delta}")
    });

    let mut curve = Vec::new();
    for kappa in probe_kappas(&dec.shells) {
        let trace = match kappa_core(g, kappa) {
            Ok(t) => t,
            Err(e) => {
                out.check(false, || format!("kappa_core({kappa}) failed: {e}"));
                continue;
            }
        };
        out.check(trace.stages.len() <= m + 1, || {
            format!("κ = {kappa}: {} stages for {m} blocks", trace.stages.len())
        });
        let nested = trace.stages.windows(2).all(|w| w[1].is_subset_of(&w[0]) && w[1] != w[0]);
        out.check(nested, || format!("κ = {kappa}: stages are not strictly nested"));
        let mass = trace.terminal.mass();
        out.check(trace.terminal.is_empty() || mass >= kappa - tol, || {
            format!("κ = {kappa}: nonempty core of mass {mass}")
        });
        let dual: Vec<bool> = dec.shells.iter().map(|&s| s >= kappa - TOL).collect();
        out.check(trace.terminal.membership() == dual.as_slice(), || {
            format!("κ = {kappa}: core {:?} differs from shells {:?}", trace.terminal.membership(), dec.shells)
        });
        curve.push((kappa, mass, trace.terminal));
    }

    // nesting on a random pair
    let (k1, k2) = (rng.gen::<f64>(), rng.gen::<f64>());
    let (hi, lo) = if k1 >= k2 { (k1, k2) } else { (k2, k1) };
    if let (Ok(a), Ok(b)) = (kappa_core(g, hi), kappa_core(g, lo)) {
        out.check(a.terminal.is_subset_of(&b.terminal), || {
            format!("K at κ = {hi} is not inside K at κ = {lo}")
        });
    }

    curve.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in curve.windows(2) {
        out.check(w[1].1 <= w[0].1 + TOL, || {
            format!("core mass rises from {} at κ = {} to {} at κ = {}", w[0].1, w[0].0, w[1].1, w[1].0)
        });
    }
    // left-continuity: just below a shell value the core is the same
    for &s in &dec.shells {
        if s <= 1e-9 {
            continue;
        }
        let (below, at) = (kappa_core(g, s - 1e-9), kappa_core(g, s));
        if let (Ok(below), Ok(at)) = (below, at) {
            out.check(below.terminal == at.terminal, || {
                format!("core mass jumps just below shell value {s}")
            });
        }
    }
}

fn lemmas_core_trial(rng: &mut ChaCha8Rng, _t: usize, tol: f64) -> Findings {
    let m = rng.gen_range(1..=8);
    let g = step_graphon(rng, m);
    let mut out = Collector::new(json(&g));
    lemmas_core_check(&g, rng, tol, &mut out);
    out.found
}

fn continuity_trial(rng: &mut ChaCha8Rng, _t: usize, tol: f64) -> Findings {
    let (m1, m2) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
    let (a, b) = (step_graphon(rng, m1), step_graphon(rng, m2));
    let mut out = Collector::new(json(&(&a, &b)));
    match check_continuity(&a, &b, tol) {
        Ok(r) => out.check(r.holds, || {
            format!("|Δδ| = {} exceeds 2√d□ = {} (d□ = {})", r.gap, r.bound, r.cut_norm)
        }),
        Err(e) => out.check(false, || e.to_string()),
    }
    out.found
}

fn density_trial(rng: &mut ChaCha8Rng, _t: usize, tol: f64) -> Findings {
    let m = rng.gen_range(1..=8);
    let g = step_graphon(rng, m);
    let mut out = Collector::new(json(&g));
    let delta = decompose(&g).degeneracy;
    let e = g.edge_density();
    out.check(delta * delta - tol <= e, || format!("e = {e} < δ² = {}", delta * delta));
    out.check(e <= delta * (2.0 - delta) + tol, || {
        format!("e = {e} > δ(2-δ) = {}", delta * (2.0 - delta))
    });
    out.found
}

/// Compares the stages of `g` pulled back by σ₂ with the σ₂-preimages of the
/// stages of `g`, block by block.
pub fn sigma2_stage_mismatch(g: &StepGraphon, kappa: f64) -> Result<Option<String>> {
    let m = g.block_count();
    let pulled = g.pullback_sigma2();
    let (orig, back) = (kappa_core(g, kappa)?, kappa_core(&pulled, kappa)?);
    if orig.stages.len() != back.stages.len() {
        return Ok(Some(format!(
            "κ = {kappa}: {} stages vs {} after σ₂",
            orig.stages.len(),
            back.stages.len()
        )));
    }
    for (n, (a, b)) in orig.stages.iter().zip(&back.stages).enumerate() {
        let preimage: Vec<bool> = (0..2 * m).map(|k| a.contains(k % m)).collect();
        if b.membership() != preimage.as_slice() {
            return Ok(Some(format!("κ = {kappa}: stage {n} is not the σ₂-preimage")));
        }
    }
    Ok(None)
}

fn mp_invariance_trial(rng: &mut ChaCha8Rng, _t: usize, tol: f64) -> Findings {
    let m = rng.gen_range(1..=8);
    let g = equal_mass_graphon(rng, m);
    let mut out = Collector::new(json(&g));
    let dec = decompose(&g);
    let (delta, e) = (dec.degeneracy, g.edge_density());

    let pulled = g.pullback_sigma2();
    let d2 = decompose(&pulled).degeneracy;
    out.check((d2 - delta).abs() <= tol, || format!("σ₂ moves δ from {delta} to {d2}"));
    let e2 = pulled.edge_density();
    out.check((e2 - e).abs() <= tol, || format!("σ₂ moves e from {e} to {e2}"));
    for kappa in probe_kappas(&dec.shells) {
        match sigma2_stage_mismatch(&g, kappa) {
            Ok(None) => {}
            Ok(Some(msg)) => out.check(false, || msg),
            Err(err) => out.check(false, || err.to_string()),
        }
    }

    let mut perm: Vec<usize> = (0..m).collect();
    for _ in 0..PERMUTATIONS_PER_GRAPHON {
        perm.shuffle(rng);
        let h = match g.apply_block_permutation(&perm) {
            Ok(h) => h,
            Err(err) => {
                out.check(false, || err.to_string());
                continue;
            }
        };
        let dp = decompose(&h).degeneracy;
        out.check((dp - delta).abs() <= tol, || format!("permutation {perm:?} moves δ to {dp}"));
        let ep = h.edge_density();
        out.check((ep - e).abs() <= tol, || format!("permutation {perm:?} moves e to {ep}"));
    }
    out.found
}

fn oracle_trial(rng: &mut ChaCha8Rng, _t: usize, tol: f64) -> Findings {
    let m = rng.gen_range(1..=12);
    let g = step_graphon(rng, m);
    let n = rng.gen_range(1..=12);
    let graph = random_graph(rng, n);
    let mut out = Collector::new(json(&(&g, graph.edges(), n)));

    let peeled = decompose(&g).degeneracy;
    match brute_force_degeneracy(&g) {
        Ok((brute, _)) => out.check((peeled - brute).abs() <= tol, || {
            format!("peeling gives {peeled}, brute force {brute}")
        }),
        Err(e) => out.check(false, || e.to_string()),
    }
    out.found.extend(graph_oracle_findings(&graph, tol));
    out.found
}

/// Finite-graph peeling against induced-subgraph brute force, and the
/// normalized embedding identity.
pub fn graph_oracle_findings(graph: &FiniteGraph, tol: f64) -> Findings {
    let n = graph.node_count();
    let mut out = Collector::new(json(&(n, graph.edges())));
    let d = graph_decompose(graph).degeneracy;
    match brute_force_graph_degeneracy(graph) {
        Ok(b) => out.check(b == d, || format!("graph peeling gives {d}, brute force {b}")),
        Err(e) => out.check(false, || e.to_string()),
    }
    if n > 0 {
        match graph_to_graphon(graph) {
            Ok(w) => {
                let dw = decompose(&w).degeneracy;
                let expected = d as f64 / n as f64;
                out.check((dw - expected).abs() <= tol, || {
                    format!("δ(w_G) = {dw} but degeneracy/n = {expected}")
                });
            }
            Err(e) => out.check(false, || e.to_string()),
        }
    }
    out.found
}

fn kwpr_trial(rng: &mut ChaCha8Rng, t: usize, _tol: f64) -> Findings {
    let n = rng.gen_range(1..=40);
    let fixed = t % 40 + 1;
    let mut found = Vec::new();
    for g in [random_graph(rng, n), FiniteGraph::complete(fixed), FiniteGraph::path(fixed)] {
        let r = check_kwpr(&g);
        if !r.holds {
            found.push((json(&(g.node_count(), g.edges())), r.to_string()));
        }
    }
    found
}

fn appendix_suite(seed: u64) -> Result<(AlternationReport, Vec<Failure>)> {
    let spec = appendix_spec(APPENDIX_DEPTH)?;
    let report = appendix_alternation(&spec, APPENDIX_ROWS)?;
    let failure = |detail: String| Failure {
        suite: Suite::Appendix.name().to_string(),
        trial: 0,
        seed,
        input: format!("appendix:{APPENDIX_DEPTH}"),
        detail,
    };
    let mut failures = Vec::new();
    if !report.alternates {
        let orders: Vec<String> = report
            .rows
            .iter()
            .map(|r| format!("i={}: {:?}", r.i, r.order))
            .collect();
        failures.push(failure(format!(
            "leave order does not alternate with i: {}",
            orders.join(", ")
        )));
    }
    for row in report.rows.iter().filter(|r| !r.intervals_match) {
        failures.push(failure(format!(
            "i = {}: stage intervals deviate beyond the tail slack {}",
            row.i, report.slack
        )));
    }
    Ok((report, failures))
}
