//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so that every line is printed. Reference
//! values come from closed forms or from the small brute-force oracles below,
//! not from the library routines under test.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use graphon_core::analytic::AnalyticGraphon;
use graphon_core::constructions::{
    appendix_alternation, appendix_spec, min_graphon_recursion, LeaveOrder, RecursionStatus,
};
use graphon_core::cutmetric::cut_norm;
use graphon_core::finite::{graph_decompose, graph_to_graphon, FiniteGraph};
use graphon_core::kcore::{decompose, kappa_core};
use graphon_core::random::{equal_mass_graphon, random_graph, step_graphon};
use graphon_core::{StepGraphon, TOL};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-9;

struct Outcome {
    id: &'static str,
    title: &'static str,
    ok: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

/// Criteria that fail for a documented mathematical reason. They still print
/// FAIL; the run only errors if one of them unexpectedly passes or if any
/// other criterion fails.
const KNOWN_FAILURES: &[(&str, &str)] = &[(
    "9b",
    "the construction has |i_κ - i'_κ| = 1 for every i, so both bands leave together for odd i ≥ 3, and κ_1 is outside the admissible range",
)];

fn timed(
    id: &'static str,
    title: &'static str,
    budget_secs: f64,
    run: impl FnOnce() -> (bool, String),
) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = run();
    Outcome {
        id,
        title,
        ok,
        detail,
        elapsed: start.elapsed(),
        budget: Duration::from_secs_f64(budget_secs),
    }
}

fn rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(trial))
}

/// Max over nonempty block subsets of the minimum restricted degree.
fn oracle_degeneracy(g: &StepGraphon) -> f64 {
    let m = g.block_count();
    let (b, v) = (g.boundaries(), g.values());
    let mut best = 0.0f64;
    for mask in 1u32..(1 << m) {
        let inside = |i: usize| mask >> i & 1 == 1;
        let worst = (0..m)
            .filter(|&i| inside(i))
            .map(|i| {
                (0..m)
                    .filter(|&j| inside(j))
                    .map(|j| v[i][j] * (b[j + 1] - b[j]))
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        best = best.max(worst);
    }
    best
}

/// Max over nonempty node subsets of the minimum induced degree.
fn oracle_graph_degeneracy(g: &FiniteGraph) -> usize {
    let n = g.node_count();
    let mut best = 0;
    for mask in 1u32..(1u32 << n) {
        let worst = (0..n)
            .filter(|v| mask >> v & 1 == 1)
            .map(|v| (0..n).filter(|&u| mask >> u & 1 == 1 && g.has_edge(u, v)).count())
            .min()
            .unwrap_or(0);
        best = best.max(worst);
    }
    best
}

/// Repeated removal of a minimum-degree node, O(n²).
fn naive_peeling_degeneracy(g: &FiniteGraph) -> usize {
    let n = g.node_count();
    let mut alive = vec![true; n];
    let mut best = 0;
    for _ in 0..n {
        let (v, d) = (0..n)
            .filter(|&v| alive[v])
            .map(|v| (v, g.neighbors(v).iter().filter(|&&u| alive[u]).count()))
            .min_by_key(|&(_, d)| d)
            .unwrap();
        best = best.max(d);
        alive[v] = false;
    }
    best
}

fn edge_density_by_sum(g: &StepGraphon) -> f64 {
    let (b, v) = (g.boundaries(), g.values());
    let m = g.block_count();
    let mut e = 0.0;
    for i in 0..m {
        for j in 0..m {
            e += v[i][j] * (b[i + 1] - b[i]) * (b[j + 1] - b[j]);
        }
    }
    e
}

fn native(spec: &str) -> StepGraphon {
    spec.parse::<AnalyticGraphon>()
        .unwrap()
        .native_step()
        .unwrap()
        .unwrap()
}

fn criterion_1() -> Vec<Outcome> {
    let cli = timed("1a", "min graphon degeneracy via `degeneracy --spec min`", 5.0, || {
        let bounds = [(64, 0.05), (128, 0.035), (256, 0.025), (512, 0.02)];
        let mut errors = Vec::new();
        let mut ok = true;
        for (m, tol) in bounds {
            let out = Command::new(env!("CARGO_BIN_EXE_graphon"))
                .args(["degeneracy", "--spec", "min", "--blocks", &m.to_string()])
                .output()
                .expect("binary runs");
            let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
            let delta = parsed["degeneracy"].as_f64().unwrap();
            let err = (delta - 0.25).abs();
            ok &= out.status.success() && err <= tol;
            errors.push(err);
        }
        ok &= errors.windows(2).all(|w| w[1] < w[0]);
        let shown: Vec<String> = errors.iter().map(|e| format!("{e:.2e}")).collect();
        (ok, format!("|δ - 1/4| at m = 64..512: {}", shown.join(", ")))
    });
    let recursion = timed("1b", "min graphon recursion at κ = 1/8", 0.001, || {
        let t = min_graphon_recursion(0.125, 10_000).unwrap();
        let expected = 0.5 * (1.0 - 0.5f64.sqrt());
        let err = (t.last() - expected).abs();
        (
            t.status == RecursionStatus::Converged && err < EPS,
            format!("{} terms, error {err:.1e}", t.terms.len()),
        )
    });
    vec![cli, recursion]
}

fn grid10() -> impl Iterator<Item = f64> + Clone {
    (0..10).map(|k| 0.05 + 0.1 * k as f64)
}

fn criterion_2() -> Outcome {
    timed("2", "two-block degeneracy and cut norm on a 10×10×10 grid", 10.0, || {
        let (mut worst_delta, mut worst_cut) = (0.0f64, 0.0f64);
        for a in grid10() {
            for b in grid10() {
                for alpha in grid10() {
                    let g = AnalyticGraphon::TwoBlock { a, b, alpha }
                        .native_step()
                        .unwrap()
                        .unwrap();
                    // low block [0, α) has degree αb + (1-α)a, high block a
                    let closed = if b < a { (1.0 - alpha) * a + alpha * b } else { a.max(alpha * b) };
                    worst_delta = worst_delta.max((decompose(&g).degeneracy - closed).abs());
                    let c = StepGraphon::constant(a).unwrap();
                    let d = cut_norm(&c, &g).unwrap().value;
                    worst_cut = worst_cut.max((d - alpha * alpha * (a - b).abs()).abs());
                }
            }
        }
        (
            worst_delta <= EPS && worst_cut <= 1e-12,
            format!("max |δ - closed form| = {worst_delta:.1e}, max |d□ - α²|a-b|| = {worst_cut:.1e}"),
        )
    })
}

fn criterion_3() -> Vec<Outcome> {
    let sweep = timed("3a", "|Δδ| ≤ 2√d□ on 1000 random pairs", 60.0, || {
        let mut failures = 0;
        let mut tightest = f64::INFINITY;
        for t in 0..1000 {
            let mut r = rng(7, t);
            let (m1, m2) = (r.gen_range(1..=8), r.gen_range(1..=8));
            let (g1, g2) = (step_graphon(&mut r, m1), step_graphon(&mut r, m2));
            let gap = (decompose(&g1).degeneracy - decompose(&g2).degeneracy).abs();
            let bound = 2.0 * cut_norm(&g1, &g2).unwrap().value.sqrt();
            if gap > bound + EPS {
                failures += 1;
            }
            tightest = tightest.min(bound - gap);
        }
        (failures == 0, format!("{failures} violations, smallest slack {tightest:.3e}"))
    });
    let holder = timed("3b", "|Δδ|/d□ grows as α halves, (a, b) = (0.5, 0.2)", 1.0, || {
        let c = StepGraphon::constant(0.5).unwrap();
        let ratios: Vec<f64> = [0.5, 0.25, 0.125, 0.0625]
            .iter()
            .map(|&alpha| {
                let g = AnalyticGraphon::TwoBlock { a: 0.5, b: 0.2, alpha }
                    .native_step()
                    .unwrap()
                    .unwrap();
                let gap = (decompose(&g).degeneracy - 0.5).abs();
                gap / cut_norm(&c, &g).unwrap().value
            })
            .collect();
        let ok = ratios.windows(2).all(|w| w[1] > w[0]);
        let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
        (ok, format!("ratios {}", shown.join(", ")))
    });
    vec![sweep, holder]
}

fn criterion_4() -> Vec<Outcome> {
    let sweep = timed("4a", "δ² ≤ e ≤ δ(2-δ) on 1000 random graphons", 30.0, || {
        let mut failures = 0;
        for t in 0..1000 {
            let mut r = rng(7, t);
            let m = r.gen_range(1..=8);
            let g = step_graphon(&mut r, m);
            let d = decompose(&g).degeneracy;
            let e = edge_density_by_sum(&g);
            if !(d * d - EPS <= e && e <= d * (2.0 - d) + EPS) {
                failures += 1;
            }
        }
        (failures == 0, format!("{failures} violations"))
    });
    let extremal = timed("4b", "extremal graphons attain both bounds", 1.0, || {
        let mut worst = 0.0f64;
        for k in 1..=9 {
            let delta = k as f64 / 10.0;
            let lower = native(&format!("lower:{delta}"));
            let upper = native(&format!("upper:{delta}"));
            for (g, target) in [(&lower, delta * delta), (&upper, delta * (2.0 - delta))] {
                worst = worst.max((edge_density_by_sum(g) - target).abs());
                worst = worst.max((decompose(g).degeneracy - delta).abs());
            }
        }
        (worst <= 1e-12, format!("max deviation {worst:.1e}"))
    });
    vec![sweep, extremal]
}

fn criterion_5() -> Vec<Outcome> {
    let graphons = timed("5a", "peeling = brute force on 500 graphons, m ≤ 12", 120.0, || {
        let mut worst = 0.0f64;
        for t in 0..500 {
            let mut r = rng(5, t);
            let m = r.gen_range(1..=12);
            let g = step_graphon(&mut r, m);
            worst = worst.max((decompose(&g).degeneracy - oracle_degeneracy(&g)).abs());
        }
        (worst <= EPS, format!("max difference {worst:.1e}"))
    });
    let graphs = timed("5b", "graph peeling = induced-subgraph brute force on 200 graphs", 120.0, || {
        let mut failures = 0;
        for t in 0..200 {
            let mut r = rng(55, t);
            let n = r.gen_range(1..=12);
            let g = random_graph(&mut r, n);
            if graph_decompose(&g).degeneracy != oracle_graph_degeneracy(&g) {
                failures += 1;
            }
        }
        (failures == 0, format!("{failures} mismatches"))
    });
    vec![graphons, graphs]
}

fn criterion_6() -> Outcome {
    timed("6", "edge-count sandwich on 500 random graphs, K_n and paths", 10.0, || {
        let mut graphs: Vec<FiniteGraph> = (0..500)
            .map(|t| {
                let mut r = rng(6, t);
                let n = r.gen_range(1..=40);
                random_graph(&mut r, n)
            })
            .collect();
        for n in 1..=40 {
            graphs.push(FiniteGraph::complete(n));
            graphs.push(FiniteGraph::path(n));
        }
        let mut failures = 0;
        for g in &graphs {
            let (n, d) = (g.node_count(), naive_peeling_degeneracy(g));
            let lower = d * (d + 1) / 2;
            let upper = lower + (n - d - 1) * d;
            let e = g.edge_count();
            if !(lower <= e && e <= upper) || graph_decompose(g).degeneracy != d {
                failures += 1;
            }
        }
        (failures == 0, format!("{} graphs, {failures} violations", graphs.len()))
    })
}

fn criterion_7() -> Outcome {
    timed("7", "δ(w_G) = degeneracy(G)/n on 200 random graphs", 30.0, || {
        let mut worst = 0.0f64;
        for t in 0..200 {
            let mut r = rng(77, t);
            let n = r.gen_range(1..=12);
            let g = random_graph(&mut r, n);
            let w = graph_to_graphon(&g).unwrap();
            let expected = oracle_graph_degeneracy(&g) as f64 / n as f64;
            worst = worst.max((decompose(&w).degeneracy - expected).abs());
        }
        (worst <= EPS, format!("max difference {worst:.1e}"))
    })
}

fn probe_kappas(shells: &[f64]) -> Vec<f64> {
    let mut ks: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    for &s in shells {
        ks.extend([s - 1e-9, s, s + 1e-9]);
    }
    ks.retain(|k| (0.0..=1.0).contains(k));
    ks
}

fn criterion_8() -> Outcome {
    timed("8", "invariance under σ₂ and block permutations", 60.0, || {
        let (mut worst, mut stage_mismatches) = (0.0f64, 0);
        for t in 0..100 {
            let mut r = rng(8, t);
            let m = r.gen_range(1..=8);
            let g = equal_mass_graphon(&mut r, m);
            let dec = decompose(&g);
            let (d, e) = (dec.degeneracy, edge_density_by_sum(&g));
            let mut check = |h: &StepGraphon| {
                worst = worst.max((decompose(h).degeneracy - d).abs());
                worst = worst.max((edge_density_by_sum(h) - e).abs());
            };
            let pulled = g.pullback_sigma2();
            check(&pulled);
            let mut perm: Vec<usize> = (0..m).collect();
            for _ in 0..100 {
                perm.shuffle(&mut r);
                check(&g.apply_block_permutation(&perm).unwrap());
            }
            // σ₂(x) = 2x mod 1 sends block k of the pullback onto block k mod m
            for kappa in probe_kappas(&dec.shells) {
                let (a, b) = (kappa_core(&g, kappa).unwrap(), kappa_core(&pulled, kappa).unwrap());
                let same = a.stages.len() == b.stages.len()
                    && a.stages.iter().zip(&b.stages).all(|(sa, sb)| {
                        (0..2 * m).all(|k| sb.contains(k) == sa.contains(k % m))
                    });
                if !same {
                    stage_mismatches += 1;
                }
            }
        }
        (
            worst <= EPS && stage_mismatches == 0,
            format!("max drift {worst:.1e}, {stage_mismatches} stage mismatches"),
        )
    })
}

fn criterion_9() -> Vec<Outcome> {
    let spec = appendix_spec(40).unwrap();
    let report = appendix_alternation(&spec, 6).unwrap();
    let slack = 1.0 / (5.0 * 41.0);
    let intervals = timed("9a", "appendix stage intervals, N = 40", 10.0, || {
        let mut worst = 0.0f64;
        let mut checked = 0;
        for row in &report.rows {
            let (Some(ik), Some(ikp)) = (row.i_kappa, row.i_kappa_prime) else {
                return (false, format!("i = {}: no i_κ", row.i));
            };
            let (alpha, alpha_p) = (&spec.alpha, &spec.alpha_prime);
            let g = graphon_core::constructions::appendix_graphon(&spec);
            let trace = kappa_core(&g, row.kappa_i).unwrap();
            for k in 1..=ik.min(ikp) {
                let expected = ((1.0 - alpha[ik - k]) / 5.0, (4.0 + alpha_p[ikp - k]) / 5.0);
                let Some(stage) = trace.stages.get(k) else {
                    return (false, format!("i = {}: stage {k} missing", row.i));
                };
                let members: Vec<usize> = stage.members().collect();
                let (lo, hi) = (members[0], *members.last().unwrap());
                if hi - lo + 1 != members.len() {
                    return (false, format!("i = {}: stage {k} is not an interval", row.i));
                }
                let b = g.boundaries();
                worst = worst.max((b[lo] - expected.0).abs()).max((b[hi + 1] - expected.1).abs());
                checked += 1;
            }
        }
        (
            worst <= slack + EPS,
            format!("{checked} stages, max deviation {worst:.1e} (slack {slack:.2e})"),
        )
    });
    let alternation = timed("9b", "appendix leave order alternates with the parity of i", 10.0, || {
        let orders: Vec<LeaveOrder> = report.rows.iter().map(|r| r.order).collect();
        let strict = orders
            .iter()
            .all(|o| matches!(o, LeaveOrder::MidLeftFirst | LeaveOrder::MidRightFirst));
        let alternates = orders.windows(2).all(|w| w[0] != w[1]);
        let shown: Vec<String> = orders.iter().map(|o| format!("{o:?}")).collect();
        (strict && alternates, format!("i = 1..6: {}", shown.join(", ")))
    });
    vec![intervals, alternation]
}

fn criterion_10() -> Outcome {
    timed("10", "core lemmas on 500 random graphons", 120.0, || {
        let mut failures: Vec<String> = Vec::new();
        for t in 0..500 {
            let mut r = rng(10, t);
            let m = r.gen_range(1..=8);
            let g = step_graphon(&mut r, m);
            let shells = decompose(&g).shells;
            let mass_at = |kappa: f64| kappa_core(&g, kappa).unwrap().terminal;
            // nesting on random pairs
            for _ in 0..5 {
                let (x, y): (f64, f64) = (r.gen(), r.gen());
                let (hi, lo) = (x.max(y), x.min(y));
                if !mass_at(hi).is_subset_of(&mass_at(lo)) {
                    failures.push(format!("trial {t}: nesting at ({hi}, {lo})"));
                }
            }
            let mut previous = f64::INFINITY;
            for kappa in (0..=100).map(|i| i as f64 / 100.0) {
                let core = mass_at(kappa);
                if !core.is_empty() && core.mass() < kappa - EPS {
                    failures.push(format!("trial {t}: core mass {} < κ = {kappa}", core.mass()));
                }
                if core.mass() > previous + TOL {
                    failures.push(format!("trial {t}: curve rises at κ = {kappa}"));
                }
                previous = core.mass();
            }
            for &s in shells.iter().filter(|&&s| s > 1e-9) {
                if mass_at(s - 1e-9) != mass_at(s) {
                    failures.push(format!("trial {t}: curve jumps just below shell value {s}"));
                }
            }
            for kappa in probe_kappas(&shells) {
                let by_shell: Vec<bool> = shells.iter().map(|&s| s >= kappa - TOL).collect();
                if mass_at(kappa).membership() != by_shell.as_slice() {
                    failures.push(format!("trial {t}: duality at κ = {kappa}"));
                }
            }
        }
        let first = failures.first().cloned().unwrap_or_default();
        (failures.is_empty(), format!("{} failures {first}", failures.len()))
    })
}

fn main() -> ExitCode {
    let mut outcomes = criterion_1();
    outcomes.push(criterion_2());
    outcomes.extend(criterion_3());
    outcomes.extend(criterion_4());
    outcomes.extend(criterion_5());
    outcomes.push(criterion_6());
    outcomes.push(criterion_7());
    outcomes.push(criterion_8());
    outcomes.extend(criterion_9());
    outcomes.push(criterion_10());

    let mut unexpected = 0;
    for o in &outcomes {
        let in_time = o.elapsed <= o.budget;
        let pass = o.ok && in_time;
        let known = KNOWN_FAILURES.iter().find(|(id, _)| *id == o.id);
        let timing = format!("{:.3}s of {:.3}s", o.elapsed.as_secs_f64(), o.budget.as_secs_f64());
        let status = if pass { "PASS" } else { "FAIL" };
        let late = if o.ok && !in_time { " over time budget" } else { "" };
        println!("{status} [{}] {}: {} ({timing}){late}", o.id, o.title, o.detail);
        match (pass, known) {
            (false, Some((_, reason))) => println!("     known failure: {reason}"),
            (true, Some(_)) => {
                println!("     listed as a known failure but passed");
                unexpected += 1;
            }
            (false, None) => unexpected += 1,
            (true, None) => {}
        }
    }
    let passed = outcomes.iter().filter(|o| o.ok && o.elapsed <= o.budget).count();
    println!("acceptance: {passed}/{} criteria passed", outcomes.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
