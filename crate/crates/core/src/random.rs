//! Seeded generators for the property sweeps.

use rand::Rng;

use crate::finite::FiniteGraph;
use crate::graphon::StepGraphon;

fn symmetric_values<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<Vec<f64>> {
    // a third of the instances use 0/1 entries so that knife-edge
    // and disconnected structures show up in the sweeps
    let binary = rng.gen_bool(1.0 / 3.0);
    let density: f64 = rng.gen_range(0.1..0.9);
    let mut values = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = if binary {
                if rng.gen_bool(density) {
                    1.0
                } else {
                    0.0
                }
            } else {
                rng.gen::<f64>()
            };
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    values
}

/// Random step graphon with `m` blocks of random mass.
pub fn step_graphon<R: Rng + ?Sized>(rng: &mut R, m: usize) -> StepGraphon {
    let widths: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = widths.iter().sum();
    let mut boundaries = Vec::with_capacity(m + 1);
    boundaries.push(0.0);
    let mut acc = 0.0;
    for w in &widths[..m - 1] {
        acc += w / total;
        boundaries.push(acc);
    }
    boundaries.push(1.0);
    let values = symmetric_values(rng, m);
    StepGraphon::new(boundaries, values).expect("generated graphon is valid")
}

/// Random step graphon on the uniform `m`-partition.
pub fn equal_mass_graphon<R: Rng + ?Sized>(rng: &mut R, m: usize) -> StepGraphon {
    let values = symmetric_values(rng, m);
    StepGraphon::uniform(values).expect("generated graphon is valid")
}

/// Erdős–Rényi graph `G(n, p)` with `p` itself drawn at random.
pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, n: usize) -> FiniteGraph {
    let p: f64 = rng.gen_range(0.05..0.95);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    FiniteGraph::new(n, edges).expect("generated graph is valid")
}
