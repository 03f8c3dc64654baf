//! Finite pointed metric spaces with exact rational distances, the
//! discounted hop weights and their shortest-path closure, discrete
//! connectability, and the space generators used by the test corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use rand::Rng;
use thiserror::Error;

use crate::rat::{fmt_rat, rat, rat_int, rat_one, rat_zero, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointMeta {
    pub id: String,
    pub label: Option<String>,
    /// Planar (or 1-d) coordinates when the space comes from a generator.
    pub coords: Option<Vec<Rat>>,
}

impl PointMeta {
    pub fn bare(id: impl Into<String>) -> Self {
        PointMeta { id: id.into(), label: None, coords: None }
    }
}

/// A finite pointed metric space: ordered points, a distinguished base
/// point, and a symmetric matrix of exact rational distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricSpace {
    points: Vec<PointMeta>,
    index: BTreeMap<String, usize>,
    base: usize,
    dist: Vec<Vec<Rat>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DimensionMismatch { rows: usize, expected: usize },
    DuplicateId { id: String },
    UnknownBase { base: String },
    NonzeroDiagonal { i: usize },
    NonPositive { i: usize, j: usize },
    Asymmetric { i: usize, j: usize },
    Triangle { i: usize, j: usize, k: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch { rows, expected } => {
                write!(f, "distance matrix has {rows} rows, expected {expected}")
            }
            Violation::DuplicateId { id } => write!(f, "duplicate point id `{id}`"),
            Violation::UnknownBase { base } => write!(f, "base `{base}` is not a point"),
            Violation::NonzeroDiagonal { i } => write!(f, "dist[{i}][{i}] != 0"),
            Violation::NonPositive { i, j } => write!(f, "dist[{i}][{j}] <= 0 for distinct points"),
            Violation::Asymmetric { i, j } => write!(f, "dist[{i}][{j}] != dist[{j}][{i}]"),
            Violation::Triangle { i, j, k } => {
                write!(f, "dist[{i}][{k}] > dist[{i}][{j}] + dist[{j}][{k}]")
            }
        }
    }
}

/// Outcome of checking the metric axioms on raw input.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("invalid metric space: {0}")]
    Invalid(String),
    #[error("unknown point id `{0}`")]
    UnknownPoint(String),
    #[error("points must be distinct, got `{0}` twice")]
    SamePoint(String),
    #[error("alpha must satisfy 0 < alpha < 1, got {0}")]
    BadAlpha(String),
    #[error("eps must be positive, got {0}")]
    BadEps(String),
    #[error("generator parameter out of range: {0}")]
    BadParameter(String),
}

/// Check every metric axiom on raw parts; each violation names its witness.
pub fn validate_parts(points: &[PointMeta], base: &str, dist: &[Vec<Rat>]) -> ValidationReport {
    let n = points.len();
    let mut report = ValidationReport::default();
    let mut seen = BTreeSet::new();
    for p in points {
        if !seen.insert(p.id.clone()) {
            report.violations.push(Violation::DuplicateId { id: p.id.clone() });
        }
    }
    if !points.iter().any(|p| p.id == base) {
        report.violations.push(Violation::UnknownBase { base: base.to_owned() });
    }
    if dist.len() != n || dist.iter().any(|row| row.len() != n) {
        report
            .violations
            .push(Violation::DimensionMismatch { rows: dist.len(), expected: n });
        return report;
    }
    for i in 0..n {
        if !dist[i][i].is_zero() {
            report.violations.push(Violation::NonzeroDiagonal { i });
        }
        for j in (i + 1)..n {
            if dist[i][j] != dist[j][i] {
                report.violations.push(Violation::Asymmetric { i, j });
            }
            if dist[i][j] <= rat_zero() {
                report.violations.push(Violation::NonPositive { i, j });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let via = &dist[i][j] + &dist[j][k];
                if dist[i][k] > via {
                    report.violations.push(Violation::Triangle { i, j, k });
                }
            }
        }
    }
    report
}

impl MetricSpace {
    /// Validates all axioms; duplicate points (zero distance between
    /// distinct ids) are rejected here.
    pub fn new(points: Vec<PointMeta>, base: &str, dist: Vec<Vec<Rat>>) -> Result<Self, MetricError> {
        let report = validate_parts(&points, base, &dist);
        if !report.is_valid() {
            let msg = report
                .violations
                .iter()
                .take(5)
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            return Err(MetricError::Invalid(msg));
        }
        Ok(Self::trusted(points, base, dist))
    }

    /// Internal constructor for matrices already known to satisfy the
    /// axioms (e.g. shortest-path closures of symmetric positive weights).
    pub(crate) fn trusted(points: Vec<PointMeta>, base: &str, dist: Vec<Vec<Rat>>) -> Self {
        let index: BTreeMap<String, usize> =
            points.iter().enumerate().map(|(i, p)| (p.id.clone(), i)).collect();
        let base = index[base];
        MetricSpace { points, index, base, dist }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn base_idx(&self) -> usize {
        self.base
    }

    pub fn base_id(&self) -> &str {
        &self.points[self.base].id
    }

    pub fn id(&self, i: usize) -> &str {
        &self.points[i].id
    }

    pub fn meta(&self, i: usize) -> &PointMeta {
        &self.points[i]
    }

    pub fn points(&self) -> &[PointMeta] {
        &self.points
    }

    pub fn idx(&self, id: &str) -> Result<usize, MetricError> {
        self.index.get(id).copied().ok_or_else(|| MetricError::UnknownPoint(id.to_owned()))
    }

    pub fn d(&self, i: usize, j: usize) -> &Rat {
        &self.dist[i][j]
    }

    pub fn d_ids(&self, x: &str, y: &str) -> Result<Rat, MetricError> {
        Ok(self.dist[self.idx(x)?][self.idx(y)?].clone())
    }

    pub fn dist_matrix(&self) -> &[Vec<Rat>] {
        &self.dist
    }

    /// Smallest positive distance; `None` on a one-point space.
    pub fn min_positive_distance(&self) -> Option<Rat> {
        let n = self.len();
        let mut best: Option<&Rat> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                if best.map_or(true, |b| &self.dist[i][j] < b) {
                    best = Some(&self.dist[i][j]);
                }
            }
        }
        best.cloned()
    }
}

/// The metric segment `[x, y] = { z : d(x,z) + d(z,y) = d(x,y) }`,
/// decided by exact rational equality. Always contains `x` and `y`.
pub fn metric_segment(space: &MetricSpace, x: &str, y: &str) -> Result<BTreeSet<String>, MetricError> {
    let xi = space.idx(x)?;
    let yi = space.idx(y)?;
    let dxy = space.d(xi, yi);
    let mut out = BTreeSet::new();
    for z in 0..space.len() {
        if space.d(xi, z) + space.d(z, yi) == *dxy {
            out.insert(space.id(z).to_owned());
        }
    }
    Ok(out)
}

/// Parameters of the discounted hop weight: `alpha` in (0,1), `eps > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedParams {
    alpha: Rat,
    eps: Rat,
}

impl DerivedParams {
    pub fn new(alpha: Rat, eps: Rat) -> Result<Self, MetricError> {
        if alpha <= rat_zero() || alpha >= rat_one() {
            return Err(MetricError::BadAlpha(fmt_rat(&alpha)));
        }
        if eps <= rat_zero() {
            return Err(MetricError::BadEps(fmt_rat(&eps)));
        }
        Ok(DerivedParams { alpha, eps })
    }

    pub fn alpha(&self) -> &Rat {
        &self.alpha
    }

    pub fn eps(&self) -> &Rat {
        &self.eps
    }
}

/// Discounted hop weight: `d(x,y)` when `d(x,y) >= eps`, and
/// `(1 - alpha) * d(x,y)` when `d(x,y) < eps` (strictly). The boundary
/// `d = eps` takes the undiscounted branch.
pub fn hop_weight(
    space: &MetricSpace,
    params: &DerivedParams,
    x: &str,
    y: &str,
) -> Result<Rat, MetricError> {
    if x == y {
        return Err(MetricError::SamePoint(x.to_owned()));
    }
    let d = space.d_ids(x, y)?;
    Ok(hop_weight_raw(&d, params))
}

fn hop_weight_raw(d: &Rat, params: &DerivedParams) -> Rat {
    if d >= params.eps() {
        d.clone()
    } else {
        (rat_one() - params.alpha()) * d
    }
}

/// Shortest-path closure of the discounted hop weights over the complete
/// graph on the points. Intermediate points of a chain may be any points
/// of the space; positive weights make simple paths sufficient, so a
/// Floyd-Warshall closure computes the exact infimum.
///
/// The result is again a metric with the same points and base, and it
/// satisfies `(1 - alpha) * d <= b <= d` entrywise.
pub fn discounted_metric(space: &MetricSpace, params: &DerivedParams) -> MetricSpace {
    let n = space.len();
    let mut w: Vec<Vec<Rat>> = vec![vec![rat_zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                w[i][j] = hop_weight_raw(space.d(i, j), params);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if i == k {
                continue;
            }
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let via = &w[i][k] + &w[k][j];
                if via < w[i][j] {
                    w[i][j] = via;
                }
            }
        }
    }
    MetricSpace::trusted(space.points().to_vec(), space.base_id(), w)
}

/// The eps -> 0 limit of the discounted metrics. On a finite space the
/// supremum over eps is attained at any eps at most the minimum positive
/// distance: every hop then takes the undiscounted branch, so the limit
/// equals the original metric exactly. This is the exact attained value,
/// not an approximation.
pub fn discounted_metric_limit(space: &MetricSpace, alpha: Rat) -> Result<MetricSpace, MetricError> {
    let eps = space.min_positive_distance().unwrap_or_else(rat_one);
    let params = DerivedParams::new(alpha, eps)?;
    Ok(discounted_metric(space, &params))
}

/// Why a pair fails to be discretely connectable at scale eps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockReason {
    /// No chain of hops strictly below eps joins the points; `reachable`
    /// is the sub-eps component of the start point (a cut certificate:
    /// every edge leaving it has length >= eps).
    NoSubEpsPath { reachable: Vec<String> },
    /// Sub-eps chains exist but the shortest has total >= d(x,y) + eps.
    PathsTooLong { shortest: Rat },
}

/// Result of a discrete-connectability query at scale eps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Connectivity {
    /// A witness chain: every hop strictly below eps, total strictly
    /// below d(x,y) + eps.
    Connected { path: Vec<String>, total: Rat },
    Blocked { reason: BlockReason, dist: Rat },
}

impl Connectivity {
    pub fn is_connected(&self) -> bool {
        matches!(self, Connectivity::Connected { .. })
    }
}

/// Discrete connectability at scale eps: a chain `x = p0, ..., p_{n+1} = y`
/// with every hop strictly below eps and total length strictly below
/// `d(x,y) + eps`. Decided by a shortest path in the subgraph of edges of
/// length < eps.
pub fn discretely_connectable(
    space: &MetricSpace,
    x: &str,
    y: &str,
    eps: &Rat,
) -> Result<Connectivity, MetricError> {
    if x == y {
        return Err(MetricError::SamePoint(x.to_owned()));
    }
    if *eps <= rat_zero() {
        return Err(MetricError::BadEps(fmt_rat(eps)));
    }
    let src = space.idx(x)?;
    let dst = space.idx(y)?;
    let dxy = space.d(src, dst).clone();
    let n = space.len();

    // Dijkstra restricted to edges with d < eps; n is small, O(n^2) scan.
    let mut dist: Vec<Option<Rat>> = vec![None; n];
    let mut prev: Vec<usize> = vec![usize::MAX; n];
    let mut done = vec![false; n];
    dist[src] = Some(rat_zero());
    loop {
        let mut cur: Option<usize> = None;
        for i in 0..n {
            if done[i] || dist[i].is_none() {
                continue;
            }
            if cur.map_or(true, |c| dist[i].as_ref().unwrap() < dist[c].as_ref().unwrap()) {
                cur = Some(i);
            }
        }
        let Some(u) = cur else { break };
        done[u] = true;
        let du = dist[u].clone().unwrap();
        for v in 0..n {
            if v == u || done[v] {
                continue;
            }
            let hop = space.d(u, v);
            if hop >= eps {
                continue;
            }
            let cand = &du + hop;
            if dist[v].as_ref().map_or(true, |old| &cand < old) {
                dist[v] = Some(cand);
                prev[v] = u;
            }
        }
    }

    match dist[dst].clone() {
        None => {
            let reachable = (0..n)
                .filter(|&i| dist[i].is_some())
                .map(|i| space.id(i).to_owned())
                .collect();
            Ok(Connectivity::Blocked { reason: BlockReason::NoSubEpsPath { reachable }, dist: dxy })
        }
        Some(total) => {
            if total < &dxy + eps {
                let mut path = vec![dst];
                let mut cur = dst;
                while cur != src {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                let path = path.into_iter().map(|i| space.id(i).to_owned()).collect();
                Ok(Connectivity::Connected { path, total })
            } else {
                Ok(Connectivity::Blocked {
                    reason: BlockReason::PathsTooLong { shortest: total },
                    dist: dxy,
                })
            }
        }
    }
}

/// Points `k/n` for `0 <= k <= n` on the line with base 0: a discretized
/// unit geodesic. Point ids are the reduced rational coordinates.
pub fn grid_space(n: u32) -> Result<MetricSpace, MetricError> {
    if n == 0 {
        return Err(MetricError::BadParameter("grid needs n >= 1".into()));
    }
    let coords: Vec<Rat> = (0..=n).map(|k| rat(k as i64, n as i64)).collect();
    line_space(&coords)
}

pub const SVC_MAX_DEPTH: u32 = 12;

/// Endpoints of the intervals remaining after `depth` removal steps of a
/// fat Cantor construction on [0,1]: step k removes the open middle
/// interval of length 4^-k from each remaining interval, so the total
/// removed length is 1/2. Yields 2^(depth+1) points on the line, base 0.
pub fn svc_space(depth: u32) -> Result<MetricSpace, MetricError> {
    if depth > SVC_MAX_DEPTH {
        return Err(MetricError::BadParameter(format!(
            "svc depth {depth} exceeds maximum {SVC_MAX_DEPTH}"
        )));
    }
    let mut intervals: Vec<(Rat, Rat)> = vec![(rat_zero(), rat_one())];
    for k in 1..=depth {
        // Removed middle interval has length 4^-k.
        let gap = Rat::new(1.into(), num_bigint::BigInt::from(4u8).pow(k));
        let half_gap = &gap / rat_int(2);
        let mut next = Vec::with_capacity(intervals.len() * 2);
        for (a, b) in intervals {
            let mid = (&a + &b) / rat_int(2);
            next.push((a, &mid - &half_gap));
            next.push((&mid + &half_gap, b));
        }
        intervals = next;
    }
    let mut coords = Vec::with_capacity(intervals.len() * 2);
    for (a, b) in intervals {
        coords.push(a);
        coords.push(b);
    }
    coords.sort();
    coords.dedup();
    line_space(&coords)
}

fn line_space(coords: &[Rat]) -> Result<MetricSpace, MetricError> {
    let points: Vec<PointMeta> = coords
        .iter()
        .map(|c| PointMeta { id: fmt_rat(c), label: None, coords: Some(vec![c.clone()]) })
        .collect();
    let n = coords.len();
    let mut dist = vec![vec![rat_zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                dist[i][j] = (&coords[i] - &coords[j]).abs();
            }
        }
    }
    let base = points[0].id.clone();
    MetricSpace::new(points, &base, dist)
}

/// Seeded random metric space: a random positive symmetric matrix closed
/// under shortest paths. Coefficients are small rationals, so all derived
/// quantities stay exact.
pub fn random_space<R: Rng>(rng: &mut R, n_points: usize) -> MetricSpace {
    assert!(n_points >= 1);
    let n = n_points;
    let mut dist = vec![vec![rat_zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let num = rng.gen_range(1..=32i64);
            let den = rng.gen_range(1..=8i64);
            let d = rat(num, den);
            dist[i][j] = d.clone();
            dist[j][i] = d;
        }
    }
    // Shortest-path closure turns any positive symmetric matrix into a
    // metric without creating zeros.
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if i == j || i == k || j == k {
                    continue;
                }
                let via = &dist[i][k] + &dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    let points: Vec<PointMeta> = (0..n).map(|i| PointMeta::bare(format!("x{i}"))).collect();
    MetricSpace::new(points, "x0", dist).expect("closure of positive symmetric matrix is a metric")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_point(d: Rat) -> MetricSpace {
        MetricSpace::new(
            vec![PointMeta::bare("a"), PointMeta::bare("b")],
            "a",
            vec![vec![rat_zero(), d.clone()], vec![d, rat_zero()]],
        )
        .unwrap()
    }

    #[test]
    fn validate_smallest_space() {
        let report = validate_parts(
            &[PointMeta::bare("a"), PointMeta::bare("b")],
            "a",
            &[vec![rat_zero(), rat_one()], vec![rat_one(), rat_zero()]],
        );
        assert!(report.is_valid());
    }

    #[test]
    fn validate_flags_asymmetry() {
        let report = validate_parts(
            &[PointMeta::bare("a"), PointMeta::bare("b")],
            "a",
            &[vec![rat_zero(), rat_one()], vec![rat(1, 2), rat_zero()]],
        );
        assert!(report.violations.contains(&Violation::Asymmetric { i: 0, j: 1 }));
    }

    #[test]
    fn validate_flags_triangle() {
        let d = vec![
            vec![rat_zero(), rat_one(), rat_int(5)],
            vec![rat_one(), rat_zero(), rat_one()],
            vec![rat_int(5), rat_one(), rat_zero()],
        ];
        let pts = vec![PointMeta::bare("a"), PointMeta::bare("b"), PointMeta::bare("c")];
        let report = validate_parts(&pts, "a", &d);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Triangle { .. })));
    }

    #[test]
    fn validate_flags_dimension() {
        let report = validate_parts(&[PointMeta::bare("a")], "a", &[]);
        assert_eq!(
            report.violations,
            vec![Violation::DimensionMismatch { rows: 0, expected: 1 }]
        );
    }

    #[test]
    fn duplicate_points_rejected() {
        let err = MetricSpace::new(
            vec![PointMeta::bare("a"), PointMeta::bare("a")],
            "a",
            vec![vec![rat_zero(), rat_one()], vec![rat_one(), rat_zero()]],
        );
        assert!(err.is_err());
    }

    #[test]
    fn segment_degenerate_and_line() {
        let s = two_point(rat_one());
        assert_eq!(
            metric_segment(&s, "a", "a").unwrap(),
            BTreeSet::from(["a".to_owned()])
        );

        let g = grid_space(2).unwrap();
        let seg = metric_segment(&g, "0", "1").unwrap();
        assert_eq!(
            seg,
            BTreeSet::from(["0".to_owned(), "1/2".to_owned(), "1".to_owned()])
        );
    }

    #[test]
    fn segment_unknown_point() {
        let s = two_point(rat_one());
        assert!(metric_segment(&s, "a", "zzz").is_err());
    }

    #[test]
    fn hop_weight_branches() {
        let s = two_point(rat_one());
        let p = DerivedParams::new(rat(1, 2), rat(1, 2)).unwrap();
        // d = 1 >= eps: undiscounted branch.
        assert_eq!(hop_weight(&s, &p, "a", "b").unwrap(), rat_one());

        let s = two_point(rat(1, 4));
        // d = 1/4 < 1/2: discounted to 1/8.
        assert_eq!(hop_weight(&s, &p, "a", "b").unwrap(), rat(1, 8));

        // Boundary d = eps exactly takes the undiscounted branch.
        let s = two_point(rat(1, 2));
        assert_eq!(hop_weight(&s, &p, "a", "b").unwrap(), rat(1, 2));

        assert!(hop_weight(&s, &p, "a", "a").is_err());
    }

    #[test]
    fn discounted_metric_two_point() {
        let s = two_point(rat_one());
        let p = DerivedParams::new(rat(1, 2), rat(1, 2)).unwrap();
        let b = discounted_metric(&s, &p);
        assert_eq!(b.d_ids("a", "b").unwrap(), rat_one());
    }

    #[test]
    fn discounted_metric_collinear_shortcut() {
        // {0, 1/2, 1} on a line, alpha = 1/2, eps = 3/5: the two half hops
        // are discounted to 1/4 each, so b(0,1) = 1/2.
        let g = grid_space(2).unwrap();
        let p = DerivedParams::new(rat(1, 2), rat(3, 5)).unwrap();
        let b = discounted_metric(&g, &p);
        assert_eq!(b.d_ids("0", "1").unwrap(), rat(1, 2));
    }

    #[test]
    fn discounted_metric_small_eps_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let s = random_space(&mut rng, 5);
            let eps = s.min_positive_distance().unwrap();
            let p = DerivedParams::new(rat(1, 3), eps).unwrap();
            let b = discounted_metric(&s, &p);
            assert_eq!(b.dist_matrix(), s.dist_matrix());
        }
    }

    #[test]
    fn limit_metric_is_original_and_alpha_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = random_space(&mut rng, 6);
        for alpha in [rat(1, 4), rat(1, 2), rat(3, 4)] {
            let b = discounted_metric_limit(&s, alpha).unwrap();
            assert_eq!(b.dist_matrix(), s.dist_matrix());
        }
        let single = MetricSpace::new(
            vec![PointMeta::bare("0"), PointMeta::bare("z")],
            "0",
            vec![vec![rat_zero(), rat_one()], vec![rat_one(), rat_zero()]],
        )
        .unwrap();
        let b = discounted_metric_limit(&single, rat(1, 2)).unwrap();
        assert_eq!(b.d_ids("0", "z").unwrap(), rat_one());
    }

    #[test]
    fn connectable_two_point() {
        let s = two_point(rat_one());
        // eps = 1/2: no sub-eps edge at all.
        let c = discretely_connectable(&s, "a", "b", &rat(1, 2)).unwrap();
        assert!(matches!(
            c,
            Connectivity::Blocked { reason: BlockReason::NoSubEpsPath { .. }, .. }
        ));
        // eps = 2: the direct hop qualifies (1 < 2 and 1 < 1 + 2).
        let c = discretely_connectable(&s, "a", "b", &rat_int(2)).unwrap();
        assert!(c.is_connected());
        assert!(discretely_connectable(&s, "a", "a", &rat_one()).is_err());
    }

    #[test]
    fn connectable_grid_chain() {
        let g = grid_space(8).unwrap();
        let c = discretely_connectable(&g, "0", "1", &rat(1, 4)).unwrap();
        match c {
            Connectivity::Connected { path, total } => {
                assert_eq!(path.len(), 9);
                assert_eq!(total, rat_one());
            }
            _ => panic!("expected the 8-hop chain"),
        }
    }

    #[test]
    fn grid_generator_examples() {
        let g = grid_space(1).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.d_ids("0", "1").unwrap(), rat_one());

        let g = grid_space(4).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.d_ids("1/4", "3/4").unwrap(), rat(1, 2));

        let g = grid_space(64).unwrap();
        assert_eq!(g.len(), 65);
        assert_eq!(g.min_positive_distance().unwrap(), rat(1, 64));
    }

    #[test]
    fn svc_generator_examples() {
        let s = svc_space(0).unwrap();
        assert_eq!(
            s.points().iter().map(|p| p.id.clone()).collect::<Vec<_>>(),
            vec!["0", "1"]
        );

        let s = svc_space(1).unwrap();
        assert_eq!(
            s.points().iter().map(|p| p.id.clone()).collect::<Vec<_>>(),
            vec!["0", "3/8", "5/8", "1"]
        );

        let s = svc_space(2).unwrap();
        assert_eq!(s.len(), 8);
        // Middle gap of size 1/4 and inner gaps of size 1/16 survive.
        assert_eq!(s.d_ids("3/8", "5/8").unwrap(), rat(1, 4));
        assert_eq!(s.d_ids("5/32", "7/32").unwrap(), rat(1, 16));
        assert!(svc_space(SVC_MAX_DEPTH + 1).is_err());
    }

    #[test]
    fn derived_params_bounds() {
        assert!(DerivedParams::new(rat_zero(), rat_one()).is_err());
        assert!(DerivedParams::new(rat_one(), rat_one()).is_err());
        assert!(DerivedParams::new(rat(1, 2), rat_zero()).is_err());
        assert!(DerivedParams::new(rat(1, 2), rat(1, 8)).is_ok());
    }
}
