//! Independent brute-force oracles used to cross-check the production
//! algorithms. Everything here deliberately avoids the code paths it
//! verifies: shortest-path closures are re-derived from exhaustive simple
//! path enumeration or Dijkstra scans, transport optima from basic-solution
//! enumeration, and gauge values from direct low-dimensional minimization.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::free::FreeVector;
use crate::metric::MetricSpace;
use crate::rat::{rat_zero, Rat};

/// Exhaustive minimum of total weight over all simple paths from `i` to
/// `j` (direct hop included). Exponential; intended for up to ~7 nodes.
pub fn min_over_simple_paths(weights: &[Vec<Rat>], i: usize, j: usize) -> Rat {
    let n = weights.len();
    assert!(n <= 10, "simple-path enumeration is exponential");
    let mut best = weights[i][j].clone();
    let mut visited = vec![false; n];
    visited[i] = true;
    fn dfs(
        weights: &[Vec<Rat>],
        visited: &mut Vec<bool>,
        cur: usize,
        acc: Rat,
        target: usize,
        best: &mut Rat,
    ) {
        if acc >= *best {
            return;
        }
        if cur == target {
            *best = acc;
            return;
        }
        for next in 0..weights.len() {
            if !visited[next] {
                visited[next] = true;
                dfs(weights, visited, next, &acc + &weights[cur][next], target, best);
                visited[next] = false;
            }
        }
    }
    dfs(weights, &mut visited, i, rat_zero(), j, &mut best);
    best
}

/// All-pairs shortest paths by repeated Dijkstra over positive weights.
/// Independent of the Floyd-Warshall closure it cross-checks.
pub fn dijkstra_closure(weights: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = weights.len();
    let mut out = vec![vec![rat_zero(); n]; n];
    for src in 0..n {
        let mut dist: Vec<Option<Rat>> = vec![None; n];
        let mut done = vec![false; n];
        dist[src] = Some(rat_zero());
        loop {
            let mut cur: Option<usize> = None;
            for v in 0..n {
                if done[v] || dist[v].is_none() {
                    continue;
                }
                if cur.map_or(true, |c| dist[v].as_ref().unwrap() < dist[c].as_ref().unwrap()) {
                    cur = Some(v);
                }
            }
            let Some(u) = cur else { break };
            done[u] = true;
            let du = dist[u].clone().unwrap();
            for v in 0..n {
                if v == u {
                    continue;
                }
                let cand = &du + &weights[u][v];
                if dist[v].as_ref().map_or(true, |old| &cand < old) {
                    dist[v] = Some(cand);
                }
            }
        }
        for v in 0..n {
            out[src][v] = dist[v].clone().expect("complete graph is connected");
        }
    }
    out
}

/// Exact transport optimum by enumerating basic solutions: every vertex of
/// the transportation polytope is supported on a forest of source-to-sink
/// arcs, so trying all forests of at most `sources + sinks - 1` arcs and
/// reading flows off by leaf stripping finds the optimum. Exponential;
/// meant for supports of at most ~6 points.
pub fn kr_bruteforce(space: &MetricSpace, mu: &FreeVector) -> Rat {
    let mut excess: BTreeMap<String, Rat> = BTreeMap::new();
    let mut total = rat_zero();
    for (id, c) in mu.terms() {
        excess.insert(id.clone(), c.clone());
        total += c;
    }
    let base_excess = -total;
    if !base_excess.is_zero() {
        *excess.entry(space.base_id().to_owned()).or_insert_with(rat_zero) += base_excess;
    }
    excess.retain(|_, c| !c.is_zero());

    let supplies: Vec<(String, Rat)> =
        excess.iter().filter(|(_, c)| **c > rat_zero()).map(|(k, c)| (k.clone(), c.clone())).collect();
    let demands: Vec<(String, Rat)> =
        excess.iter().filter(|(_, c)| **c < rat_zero()).map(|(k, c)| (k.clone(), -c.clone())).collect();
    if supplies.is_empty() {
        return rat_zero();
    }

    let ns = supplies.len();
    let nt = demands.len();
    let arcs: Vec<(usize, usize)> =
        (0..ns).flat_map(|s| (0..nt).map(move |t| (s, t))).collect();
    let max_arcs = ns + nt - 1;
    assert!(arcs.len() <= 16, "forest enumeration is exponential");

    let mut best: Option<Rat> = None;
    let mut chosen: Vec<usize> = Vec::new();
    enumerate_subsets(&arcs, max_arcs, 0, &mut chosen, &mut |subset| {
        if let Some(cost) = forest_cost(space, &supplies, &demands, subset) {
            if best.as_ref().map_or(true, |b| &cost < b) {
                best = Some(cost);
            }
        }
    });
    best.expect("complete arc set is feasible")
}

fn enumerate_subsets(
    arcs: &[(usize, usize)],
    max_len: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    visit(chosen);
    if chosen.len() == max_len {
        return;
    }
    for i in start..arcs.len() {
        chosen.push(i);
        enumerate_subsets(arcs, max_len, i + 1, chosen, visit);
        chosen.pop();
    }
}

/// Flows forced by conservation on a candidate arc subset, or `None` if
/// the subset is not a feasible basis (cycle, negative flow, or unmet
/// excess).
fn forest_cost(
    space: &MetricSpace,
    supplies: &[(String, Rat)],
    demands: &[(String, Rat)],
    subset: &[usize],
) -> Option<Rat> {
    let ns = supplies.len();
    let nt = demands.len();
    let arcs: Vec<(usize, usize)> = subset
        .iter()
        .map(|&i| {
            let s = i / nt;
            let t = i % nt;
            (s, t)
        })
        .collect();
    let mut remaining: Vec<Rat> = supplies
        .iter()
        .map(|(_, a)| a.clone())
        .chain(demands.iter().map(|(_, a)| -a.clone()))
        .collect();
    let mut alive: Vec<bool> = vec![true; arcs.len()];
    let mut flows: Vec<Rat> = vec![rat_zero(); arcs.len()];
    let node_of = |arc: &(usize, usize), side: usize| if side == 0 { arc.0 } else { ns + arc.1 };

    let mut live_arcs = arcs.len();
    loop {
        if live_arcs == 0 {
            break;
        }
        // Find a leaf node: exactly one live incident arc.
        let mut leaf: Option<(usize, usize)> = None;
        'outer: for node in 0..(ns + nt) {
            let mut incident = None;
            let mut count = 0;
            for (ai, arc) in arcs.iter().enumerate() {
                if !alive[ai] {
                    continue;
                }
                if node_of(arc, 0) == node || node_of(arc, 1) == node {
                    incident = Some(ai);
                    count += 1;
                    if count > 1 {
                        continue 'outer;
                    }
                }
            }
            if count == 1 {
                leaf = Some((node, incident.unwrap()));
                break;
            }
        }
        let Some((node, ai)) = leaf else {
            return None; // only cycles remain
        };
        let (s, t) = arcs[ai];
        // Flow on a supply-leaf is its remaining supply; on a demand-leaf
        // the remaining demand. Signs must come out non-negative.
        let f = if node < ns { remaining[node].clone() } else { -remaining[node].clone() };
        if f < rat_zero() {
            return None;
        }
        flows[ai] = f.clone();
        remaining[s] -= &f;
        remaining[ns + t] += &f;
        remaining[node] = rat_zero();
        alive[ai] = false;
        live_arcs -= 1;
    }
    if remaining.iter().any(|r| !r.is_zero()) {
        return None;
    }
    let mut cost = rat_zero();
    for (ai, (s, t)) in arcs.iter().enumerate() {
        if flows[ai].is_zero() {
            continue;
        }
        let d = space.d_ids(&supplies[*s].0, &demands[*t].0).ok()?;
        cost += &flows[ai] * d;
    }
    Some(cost)
}

// ---------------------------------------------------------------------------
// Low-dimensional gauge oracles (floating point, for the renorm module).
// ---------------------------------------------------------------------------

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Exact gauge of the hull of the euclidean disc with the spikes
/// `+-(e1 + e2)` in dimension 2. The hull boundary consists of the two
/// chords `x1 = 1` / `x2 = 1` (and their reflections) in the matching-sign
/// quadrants and circle arcs in the mixed-sign quadrants.
pub fn hull_gauge_2d_exact(v: &[f64]) -> f64 {
    assert_eq!(v.len(), 2);
    if v[0] * v[1] >= 0.0 {
        v[0].abs().max(v[1].abs())
    } else {
        l2(v)
    }
}

/// Gauge of the hull of the euclidean ball with spikes `+-(e1 + e_m)` by
/// direct minimization of `||v - sum mu_m (e1 + e_m)||_2 + sum |mu_m|`
/// over a shrinking grid. Supports dimensions 2 and 3 (1 or 2 variables).
pub fn hull_gauge_grid(v: &[f64]) -> f64 {
    let dim = v.len();
    assert!((2..=3).contains(&dim));
    let vars = dim - 1;
    let objective = |mu: &[f64]| -> f64 {
        let mut r = v.to_vec();
        let mut l1 = 0.0;
        for (m, &c) in mu.iter().enumerate() {
            r[0] -= c;
            r[m + 1] -= c;
            l1 += c.abs();
        }
        l2(&r) + l1
    };
    grid_zoom(vars, l2(v).max(1e-9), objective)
}

/// Gauge of the hull of the explicit dual ball with spikes
/// `+-(e1* - 2 e_m*)` by direct minimization of
/// `max(||z||_2, max_m |z1 + z_m|) + sum |nu_m|`,  `z = a - sum nu_m b_m`.
pub fn trimmed_dual_gauge_grid(a: &[f64]) -> f64 {
    let dim = a.len();
    assert!((2..=3).contains(&dim));
    let vars = dim - 1;
    let dual_formula = |z: &[f64]| -> f64 {
        let slabs = z[1..].iter().map(|zm| (z[0] + zm).abs()).fold(0.0f64, f64::max);
        l2(z).max(slabs)
    };
    let radius = dual_formula(a).max(1e-9);
    let objective = |nu: &[f64]| -> f64 {
        let mut z = a.to_vec();
        let mut l1 = 0.0;
        for (m, &c) in nu.iter().enumerate() {
            z[0] -= c;
            z[m + 1] += 2.0 * c;
            l1 += c.abs();
        }
        dual_formula(&z) + l1
    };
    grid_zoom(vars, radius, objective)
}

/// Shrinking-grid minimizer for convex objectives in 1 or 2 variables.
/// Any optimizer of the atomic coefficients lies in the max-norm box of
/// the given radius, because the zero vector already achieves an objective
/// equal to the radius term.
fn grid_zoom(vars: usize, radius: f64, objective: impl Fn(&[f64]) -> f64) -> f64 {
    assert!((1..=2).contains(&vars));
    let steps = 24usize;
    let mut center = vec![0.0; vars];
    let mut half = radius;
    let mut best = objective(&center);
    for _ in 0..48 {
        let mut improved_center = center.clone();
        match vars {
            1 => {
                for i in 0..=steps {
                    let x = center[0] - half + 2.0 * half * (i as f64) / (steps as f64);
                    let val = objective(&[x]);
                    if val < best {
                        best = val;
                        improved_center = vec![x];
                    }
                }
            }
            _ => {
                for i in 0..=steps {
                    let x = center[0] - half + 2.0 * half * (i as f64) / (steps as f64);
                    for j in 0..=steps {
                        let y = center[1] - half + 2.0 * half * (j as f64) / (steps as f64);
                        let val = objective(&[x, y]);
                        if val < best {
                            best = val;
                            improved_center = vec![x, y];
                        }
                    }
                }
            }
        }
        center = improved_center;
        // Keep the window several cells wide around the incumbent so the
        // true minimizer of a convex objective cannot escape it.
        half *= 0.45;
        if half < 1e-15 {
            break;
        }
    }
    best
}

/// Lower bound on the hull gauge from support-direction sampling:
/// `gauge(v) >= <c, v> / h(c)` for every direction `c`, where `h` is the
/// explicit support formula `max(||c||_2, max_m |c_1 + c_m|)`. Dense
/// direction families make the bound tight up to the sampling mesh.
pub fn hull_gauge_support_sampling(v: &[f64], directions: usize) -> f64 {
    let dim = v.len();
    assert!((2..=3).contains(&dim));
    let h = |c: &[f64]| -> f64 {
        let slabs = c[1..].iter().map(|cm| (c[0] + cm).abs()).fold(0.0f64, f64::max);
        l2(c).max(slabs)
    };
    let mut best: f64 = 0.0;
    if dim == 2 {
        for i in 0..directions {
            let phi = std::f64::consts::TAU * (i as f64) / (directions as f64);
            let c = [phi.cos(), phi.sin()];
            let val = (c[0] * v[0] + c[1] * v[1]) / h(&c);
            best = best.max(val);
        }
    } else {
        // Fibonacci sphere.
        let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
        for i in 0..directions {
            let t = (i as f64 + 0.5) / (directions as f64);
            let z = 1.0 - 2.0 * t;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = std::f64::consts::TAU * (i as f64) / golden;
            let c = [r * phi.cos(), r * phi.sin(), z];
            let val = (c[0] * v[0] + c[1] * v[1] + c[2] * v[2]) / h(&c);
            best = best.max(val);
        }
    }
    best
}
