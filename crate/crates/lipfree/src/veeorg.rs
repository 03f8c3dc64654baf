//! The layered dyadic example space: rows `S_n = {(k 2^-n, 2^-n)}` over
//! the two anchor points `p = (0,0)` (the base) and `q = (1,0)`, with the
//! metric `d((x1,y1),(x2,y2)) = |x1-x2|` on a common row and
//! `|y1-y2| + min(x1+x2, 2-(x1+x2))` across rows.
//!
//! The free space over this set carries a Daugavet molecule between the
//! anchors even though the anchors span a trivial metric segment. This
//! module generates finite truncations (rows 1..=N) and verifies the
//! constructions that make the example work: the three-set cover and its
//! separation bound, the weighting-operator reconstruction, the witness
//! function for non-polyhedrality, and the almost-squareness witness.

use std::collections::BTreeSet;

use num_traits::Signed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::free::{
    lip_norm, partition_of_unity, weighting, FreeError, FreeVector, PointFunction,
};
use crate::metric::{metric_segment, MetricError, MetricSpace, PointMeta};
use crate::rat::{fmt_rat, pow2_neg, rat_one, rat_zero, Rat};

#[derive(Debug, Error)]
pub enum VeeorgError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Free(#[from] FreeError),
    #[error("levels must satisfy 1 <= levels <= {max}, got {got}")]
    BadLevels { got: u32, max: u32 },
    #[error("cover parameters must satisfy 0 < beta < alpha < 1/2")]
    BadCoverParams,
    #[error("function {index} has lip norm {norm} > 1")]
    OverNormed { index: usize, norm: String },
    #[error("truncation too shallow: needs a level k with 2^-k < eps and levels k-1, k, k+1 present")]
    TooShallow,
    #[error("verification failed: {0}")]
    Failed(String),
}

pub const MAX_LEVELS: u32 = 12;

fn point_id(level: u32, k: u64) -> String {
    format!("s{level}_{k}")
}

/// Exact metric of the layered space, from the coordinates.
fn layered_distance(x1: &Rat, y1: &Rat, x2: &Rat, y2: &Rat) -> Rat {
    if y1 == y2 {
        (x1 - x2).abs()
    } else {
        let near = x1 + x2;
        let far = crate::rat::rat_int(2) - &near;
        (y1 - y2).abs() + near.min(far)
    }
}

/// Truncation with rows 1..=levels plus the anchors; base point `p`.
/// Point count is `2 + sum_{n<=levels} (2^n + 1)`. The metric axioms are
/// checked exhaustively up to 5 levels and on sampled triples above.
pub fn veeorg_space(levels: u32) -> Result<MetricSpace, VeeorgError> {
    if levels == 0 || levels > MAX_LEVELS {
        return Err(VeeorgError::BadLevels { got: levels, max: MAX_LEVELS });
    }
    let mut points: Vec<(String, Rat, Rat)> = vec![
        ("p".to_owned(), rat_zero(), rat_zero()),
        ("q".to_owned(), rat_one(), rat_zero()),
    ];
    for n in 1..=levels {
        let y = pow2_neg(n);
        for k in 0..=(1u64 << n) {
            let x = Rat::new(k.into(), num_bigint::BigInt::from(1u64 << n));
            points.push((point_id(n, k), x, y.clone()));
        }
    }
    let n = points.len();
    let mut dist = vec![vec![rat_zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = layered_distance(&points[i].1, &points[i].2, &points[j].1, &points[j].2);
            dist[i][j] = d.clone();
            dist[j][i] = d;
        }
    }

    if levels <= 5 {
        for i in 0..n {
            for j in 0..n {
                if j == i {
                    continue;
                }
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    if dist[i][k] > &dist[i][j] + &dist[j][k] {
                        return Err(VeeorgError::Failed(format!(
                            "triangle violation at ({}, {}, {})",
                            points[i].0, points[j].0, points[k].0
                        )));
                    }
                }
            }
        }
    } else {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(levels as u64);
        for _ in 0..200_000 {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let k = rng.gen_range(0..n);
            if i == j || j == k || i == k {
                continue;
            }
            if dist[i][k] > &dist[i][j] + &dist[j][k] {
                return Err(VeeorgError::Failed("sampled triangle violation".into()));
            }
        }
    }

    let metas: Vec<PointMeta> = points
        .iter()
        .map(|(id, x, y)| PointMeta {
            id: id.clone(),
            label: Some(format!("({}, {})", fmt_rat(x), fmt_rat(y))),
            coords: Some(vec![x.clone(), y.clone()]),
        })
        .collect();
    Ok(MetricSpace::new(metas, "p", dist)?)
}

fn coord(space: &MetricSpace, idx: usize, axis: usize) -> Rat {
    space.meta(idx).coords.as_ref().expect("layered points carry coordinates")[axis].clone()
}

/// The height functional `h(x, y) = x`; unit Lipschitz norm, checked.
pub fn h_function(space: &MetricSpace) -> Result<PointFunction, VeeorgError> {
    let f = PointFunction::from_fn(space, false, |p| p.coords.as_ref().unwrap()[0].clone());
    let (norm, _) = lip_norm(space, &f);
    if norm != rat_one() {
        return Err(VeeorgError::Failed(format!("h has lip norm {}", fmt_rat(&norm))));
    }
    Ok(f)
}

/// Three-set open cover by first coordinate: `A = {x < alpha}`,
/// `B = {beta < x < 1 - beta}`, `C = {x > 1 - alpha}`.
#[derive(Debug, Clone)]
pub struct AbcCover {
    pub alpha: Rat,
    pub beta: Rat,
    pub a: BTreeSet<String>,
    pub b: BTreeSet<String>,
    pub c: BTreeSet<String>,
}

impl AbcCover {
    pub fn sets(&self) -> [&BTreeSet<String>; 3] {
        [&self.a, &self.b, &self.c]
    }
}

pub fn abc_cover(space: &MetricSpace, alpha: Rat, beta: Rat) -> Result<AbcCover, VeeorgError> {
    let half = crate::rat::rat(1, 2);
    if !(rat_zero() < beta && beta < alpha && alpha < half) {
        return Err(VeeorgError::BadCoverParams);
    }
    let mut cover = AbcCover {
        alpha: alpha.clone(),
        beta: beta.clone(),
        a: BTreeSet::new(),
        b: BTreeSet::new(),
        c: BTreeSet::new(),
    };
    for i in 0..space.len() {
        let x = coord(space, i, 0);
        let id = space.id(i).to_owned();
        if x < alpha {
            cover.a.insert(id.clone());
        }
        if beta < x && x < rat_one() - &beta {
            cover.b.insert(id.clone());
        }
        if x > rat_one() - &alpha {
            cover.c.insert(id);
        }
    }
    // A and C are disjoint since alpha < 1/2; the three sets cover.
    debug_assert!(cover.a.intersection(&cover.c).next().is_none());
    for p in space.points() {
        if !cover.a.contains(&p.id) && !cover.b.contains(&p.id) && !cover.c.contains(&p.id) {
            return Err(VeeorgError::Failed(format!("cover misses point {}", p.id)));
        }
    }
    Ok(cover)
}

#[derive(Debug, Clone)]
pub struct SeparationReport {
    /// Minimum over points of the summed distances to the cover
    /// complements.
    pub min_separation: Rat,
    pub witness: String,
    /// Cover sets whose complement is empty in the truncation; their
    /// distance term is skipped.
    pub skipped_full_sets: Vec<usize>,
    /// The bound `alpha - beta` the minimum is asserted against.
    pub bound: Rat,
}

/// Exact evaluation of `D(z) = sum_k d(z, complement of U_k)` with the
/// guarantee `min_z D(z) >= alpha - beta`. Removing points from the
/// ambient space only increases distances to complements, so the bound
/// from the full space survives truncation; it is re-checked exactly here.
pub fn cover_separation(space: &MetricSpace, cover: &AbcCover) -> Result<SeparationReport, VeeorgError> {
    let mut skipped = Vec::new();
    let complements: Vec<Vec<usize>> = cover
        .sets()
        .iter()
        .map(|set| (0..space.len()).filter(|&i| !set.contains(space.id(i))).collect::<Vec<_>>())
        .collect();
    for (k, comp) in complements.iter().enumerate() {
        if comp.is_empty() {
            skipped.push(k);
        }
    }
    let mut min: Option<(Rat, usize)> = None;
    for z in 0..space.len() {
        let mut total = rat_zero();
        for comp in complements.iter().filter(|c| !c.is_empty()) {
            total += comp.iter().map(|&j| space.d(z, j).clone()).min().unwrap();
        }
        if min.as_ref().map_or(true, |(best, _)| &total < best) {
            min = Some((total, z));
        }
    }
    let (min_separation, witness) = min.expect("space is nonempty");
    let bound = &cover.alpha - &cover.beta;
    if min_separation < bound {
        return Err(VeeorgError::Failed(format!(
            "separation {} below bound {} at {}",
            fmt_rat(&min_separation),
            fmt_rat(&bound),
            space.id(witness)
        )));
    }
    Ok(SeparationReport {
        min_separation,
        witness: space.id(witness).to_owned(),
        skipped_full_sets: skipped,
        bound,
    })
}

#[derive(Debug, Clone)]
pub struct RoundtripReport {
    /// Vectors checked: one Dirac per point plus every molecule.
    pub vectors_checked: usize,
}

/// Builds the partition of unity subordinate to the cover, the associated
/// weighting operators, and verifies that their sum reconstructs every
/// spanning vector exactly: all Diracs and all molecules of the
/// truncation.
pub fn decomposition_roundtrip(
    space: &MetricSpace,
    cover: &AbcCover,
) -> Result<RoundtripReport, VeeorgError> {
    let covers: Vec<BTreeSet<String>> = cover.sets().iter().map(|s| (*s).clone()).collect();
    let phis = partition_of_unity(space, &covers)?;
    for i in 0..space.len() {
        let total: Rat = phis.iter().map(|phi| phi.value(space.id(i))).sum();
        if total != rat_one() {
            return Err(VeeorgError::Failed(format!(
                "partition sums to {} at {}",
                fmt_rat(&total),
                space.id(i)
            )));
        }
    }

    let mut checked = 0usize;
    let mut verify = |mu: FreeVector| -> Result<(), VeeorgError> {
        let mut acc = FreeVector::zero();
        for phi in &phis {
            acc = acc.add(space, &weighting(space, &mu, phi));
        }
        if acc != mu {
            return Err(VeeorgError::Failed("weighting operators failed to reconstruct".into()));
        }
        checked += 1;
        Ok(())
    };

    for p in space.points() {
        verify(FreeVector::new(space, [(p.id.clone(), rat_one())])?)?;
    }
    for i in 0..space.len() {
        for j in 0..space.len() {
            if i < j {
                verify(crate::free::molecule(space, space.id(i), space.id(j))?)?;
            }
        }
    }
    Ok(RoundtripReport { vectors_checked: checked })
}

#[derive(Debug, Clone)]
pub struct PolyhedralReport {
    /// Pairs whose metric segment is trivial (just the two endpoints).
    pub trivial_segment_pairs: usize,
    /// Largest |<f, m_uv>| over trivial-segment pairs other than the
    /// anchor pair; strictly below one.
    pub runner_up: Rat,
    pub anchor_value: Rat,
}

/// The witness `f(x, y) = x (1 - y^2)`: unit norm, pairs to exactly one
/// with the anchor molecule, and stays strictly below one on every other
/// trivial-segment molecule.
pub fn polyhedral_witness(space: &MetricSpace) -> Result<(PointFunction, PolyhedralReport), VeeorgError> {
    let f = PointFunction::from_fn(space, false, |p| {
        let c = p.coords.as_ref().unwrap();
        &c[0] * (rat_one() - &c[1] * &c[1])
    });
    let (norm, _) = lip_norm(space, &f);
    if norm != rat_one() {
        return Err(VeeorgError::Failed(format!("witness has lip norm {}", fmt_rat(&norm))));
    }

    let mut trivial_pairs = 0usize;
    let mut runner_up = rat_zero();
    let mut anchor_value = None;
    for i in 0..space.len() {
        for j in (i + 1)..space.len() {
            let (u, v) = (space.id(i), space.id(j));
            let segment = metric_segment(space, u, v)?;
            if segment.len() != 2 {
                continue;
            }
            trivial_pairs += 1;
            let value = (f.value(u) - f.value(v)).abs() / space.d(i, j);
            let is_anchor = (u == "p" && v == "q") || (u == "q" && v == "p");
            if is_anchor {
                anchor_value = Some(value);
            } else if value > runner_up {
                runner_up = value;
            }
        }
    }
    let anchor_value = anchor_value.ok_or_else(|| VeeorgError::Failed("anchor pair not trivial".into()))?;
    if anchor_value != rat_one() {
        return Err(VeeorgError::Failed(format!(
            "anchor pairing is {}, expected 1",
            fmt_rat(&anchor_value)
        )));
    }
    if runner_up >= rat_one() {
        return Err(VeeorgError::Failed(format!(
            "another trivial-segment pair attains {}",
            fmt_rat(&runner_up)
        )));
    }
    Ok((f, PolyhedralReport { trivial_segment_pairs: trivial_pairs, runner_up, anchor_value }))
}

#[derive(Debug, Clone)]
pub struct AlmostSquareReport {
    /// Row carrying the witness.
    pub level: u32,
    /// Exact norms of f_i + g and f_i - g per input function.
    pub combined_norms: Vec<(Rat, Rat)>,
    pub bound: Rat,
}

/// Almost-squareness witness: `g = 2^-(k+1) x` on the row `S_k` and zero
/// elsewhere, for the smallest usable `k` with `2^-k < eps`. Verifies
/// `lip_norm(g) = 1` and `lip_norm(f_i +- g) <= 1 + eps` exactly.
pub fn almost_square_witness(
    space: &MetricSpace,
    fs: &[PointFunction],
    eps: &Rat,
    levels: u32,
) -> Result<(PointFunction, AlmostSquareReport), VeeorgError> {
    for (index, f) in fs.iter().enumerate() {
        let (norm, _) = lip_norm(space, f);
        if norm > rat_one() {
            return Err(VeeorgError::OverNormed { index, norm: fmt_rat(&norm) });
        }
    }
    // Need rows k-1, k, k+1 inside the truncation and 2^-k < eps.
    let k = (2..levels)
        .find(|&k| pow2_neg(k) < *eps)
        .ok_or(VeeorgError::TooShallow)?;

    let y_k = pow2_neg(k);
    let scale = pow2_neg(k + 1);
    let g = PointFunction::from_fn(space, false, |p| {
        let c = p.coords.as_ref().unwrap();
        if c[1] == y_k {
            &scale * &c[0]
        } else {
            rat_zero()
        }
    });
    let (gnorm, _) = lip_norm(space, &g);
    if gnorm != rat_one() {
        return Err(VeeorgError::Failed(format!("witness norm {}", fmt_rat(&gnorm))));
    }
    // The nearest neighbor of the row endpoint (1, 2^-k) sits one row
    // below at distance 2^-(k+1); that pair attains the norm.
    let a0 = space.idx(&point_id(k, 1 << k))?;
    let below = space.idx(&point_id(k + 1, 1 << (k + 1)))?;
    if *space.d(a0, below) != scale {
        return Err(VeeorgError::Failed("unexpected nearest-neighbor distance".into()));
    }

    let bound = rat_one() + eps;
    let mut combined = Vec::with_capacity(fs.len());
    for f in fs {
        let plus = lip_norm(space, &f.axpy(&rat_one(), &g)).0;
        let minus = lip_norm(space, &f.axpy(&(-rat_one()), &g)).0;
        if plus > bound || minus > bound {
            return Err(VeeorgError::Failed(format!(
                "combined norms {} / {} exceed {}",
                fmt_rat(&plus),
                fmt_rat(&minus),
                fmt_rat(&bound)
            )));
        }
        combined.push((plus, minus));
    }
    Ok((g, AlmostSquareReport { level: k, combined_norms: combined, bound }))
}

/// The anchor molecule oriented to pair positively with the height
/// functional: `(delta(q) - delta(p)) / d(p,q) = delta(q)`.
pub fn daugavet_molecule(space: &MetricSpace) -> Result<FreeVector, VeeorgError> {
    Ok(crate::free::molecule(space, "q", "p")?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free::pair;
    use crate::rat::{rat, rat_int};

    #[test]
    fn space_examples() {
        let s = veeorg_space(1).unwrap();
        assert_eq!(s.len(), 5);
        // Same-row distance.
        assert_eq!(s.d_ids("s1_0", "s1_2").unwrap(), rat_one());
        // Across rows: |y1 - y2| + min(x1 + x2, 2 - x1 - x2).
        assert_eq!(s.d_ids("p", "s1_2").unwrap(), rat(3, 2));
        assert_eq!(s.d_ids("p", "q").unwrap(), rat_one());
        assert!(veeorg_space(0).is_err());
        assert!(veeorg_space(MAX_LEVELS + 1).is_err());
    }

    #[test]
    fn point_counts() {
        for (levels, expected) in [(1u32, 5usize), (2, 12), (3, 21)] {
            assert_eq!(veeorg_space(levels).unwrap().len(), expected);
        }
    }

    #[test]
    fn height_function() {
        let s = veeorg_space(3).unwrap();
        let h = h_function(&s).unwrap();
        assert_eq!(h.value("p"), rat_zero());
        assert_eq!(h.value("q"), rat_one());
        assert_eq!(lip_norm(&s, &h).0, rat_one());
    }

    #[test]
    fn anchor_segment_is_trivial() {
        let s = veeorg_space(3).unwrap();
        let seg = metric_segment(&s, "p", "q").unwrap();
        assert_eq!(seg, BTreeSet::from(["p".to_owned(), "q".to_owned()]));
    }

    #[test]
    fn cover_membership() {
        let s = veeorg_space(2).unwrap();
        let cover = abc_cover(&s, rat(2, 5), rat(1, 5)).unwrap();
        assert!(cover.a.contains("p") && !cover.b.contains("p"));
        assert!(cover.c.contains("q") && !cover.b.contains("q"));
        // The row midpoint (1/2, 1/2) lies only in B.
        assert!(!cover.a.contains("s1_1") && cover.b.contains("s1_1") && !cover.c.contains("s1_1"));
        assert!(cover.a.intersection(&cover.c).next().is_none());
        assert!(abc_cover(&s, rat(1, 5), rat(2, 5)).is_err());
    }

    #[test]
    fn separation_bound() {
        for levels in 1..=4 {
            let s = veeorg_space(levels).unwrap();
            let cover = abc_cover(&s, rat(2, 5), rat(1, 5)).unwrap();
            let report = cover_separation(&s, &cover).unwrap();
            assert!(report.min_separation >= rat(1, 5));
            assert!(report.skipped_full_sets.is_empty());
        }
    }

    #[test]
    fn separation_at_anchor() {
        // D(p) is at least alpha: the nearest point outside A has first
        // coordinate at least alpha.
        let s = veeorg_space(3).unwrap();
        let cover = abc_cover(&s, rat(2, 5), rat(1, 5)).unwrap();
        let comp_a: Vec<usize> =
            (0..s.len()).filter(|&i| !cover.a.contains(s.id(i))).collect();
        let p = s.idx("p").unwrap();
        let dp = comp_a.iter().map(|&j| s.d(p, j).clone()).min().unwrap();
        assert!(dp >= rat(2, 5));
    }

    #[test]
    fn roundtrip_small() {
        let s = veeorg_space(2).unwrap();
        let cover = abc_cover(&s, rat(2, 5), rat(1, 5)).unwrap();
        let report = decomposition_roundtrip(&s, &cover).unwrap();
        assert_eq!(report.vectors_checked, 12 + 12 * 11 / 2);
    }

    #[test]
    fn roundtrip_single_cover_degenerate() {
        let s = veeorg_space(1).unwrap();
        let all: BTreeSet<String> = s.points().iter().map(|p| p.id.clone()).collect();
        let phis = partition_of_unity(&s, &[all]).unwrap();
        let mu = daugavet_molecule(&s).unwrap();
        assert_eq!(weighting(&s, &mu, &phis[0]), mu);
    }

    #[test]
    fn polyhedral_witness_values() {
        let s = veeorg_space(4).unwrap();
        let (f, report) = polyhedral_witness(&s).unwrap();
        assert_eq!(f.value("p"), rat_zero());
        assert_eq!(f.value("q"), rat_one());
        assert_eq!(report.anchor_value, rat_one());
        assert!(report.runner_up < rat_one());
        // Pairing with the anchor molecule is exactly one.
        let m = daugavet_molecule(&s).unwrap();
        assert_eq!(pair(&f, &m), rat_one());
    }

    #[test]
    fn almost_square() {
        let s = veeorg_space(4).unwrap();
        let h = h_function(&s).unwrap();
        let (g, report) = almost_square_witness(&s, &[h.clone()], &rat(1, 3), 4).unwrap();
        assert_eq!(report.level, 2);
        // g vanishes off its row.
        assert_eq!(g.value("p"), rat_zero());
        assert_eq!(g.value("q"), rat_zero());
        assert_eq!(g.value("s1_1"), rat_zero());
        assert_eq!(g.value(&point_id(2, 4)), rat(1, 8));
        for (plus, minus) in &report.combined_norms {
            assert!(plus <= &rat(4, 3) && minus <= &rat(4, 3));
        }
        // Too shallow: eps needs a row below level 1.
        let shallow = veeorg_space(2).unwrap();
        assert!(matches!(
            almost_square_witness(&shallow, &[], &rat(1, 3), 2),
            Err(VeeorgError::TooShallow)
        ));
        // Over-normed inputs are rejected.
        let double = h.axpy(&rat_int(1), &h);
        assert!(matches!(
            almost_square_witness(&s, &[double], &rat(1, 3), 4),
            Err(VeeorgError::OverNormed { .. })
        ));
    }
}
