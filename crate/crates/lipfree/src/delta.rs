//! Scale-indexed detection of Delta behavior for molecules and finitely
//! supported unit vectors.
//!
//! A finite metric space admits no true Delta point, so every check here
//! is parametrized by the scale `eps` and reported as such: certificates
//! hold exactly at the given scale, and refinement trends across scales
//! or growing spaces stand in for the limit statements.

use thiserror::Error;

use crate::free::{
    kr_norm, kr_norm_in, lip_norm, molecule, pair, FreeError, FreeVector, MoleculeCombination,
    PointFunction,
};
use crate::metric::{
    discounted_metric, discretely_connectable, Connectivity, DerivedParams, MetricError,
    MetricSpace,
};
use crate::rat::{fmt_rat, rat_one, rat_zero, Rat};

#[derive(Debug, Error)]
pub enum DeltaError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Free(#[from] FreeError),
    #[error("vector must have unit norm, got {0}")]
    NotUnitVector(String),
    #[error("vector is not a member of the slice")]
    NotInSlice,
    #[error("eps list must be positive and sorted in decreasing order")]
    BadEpsList,
    #[error("consistency violation: {0}")]
    Inconsistent(String),
}

/// Certificate attached to a molecule check at scale eps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeltaCertificate {
    /// Witness chain: sub-eps hops, total below `d(x,y) + eps`; the
    /// discounted-metric value is bounded by the discounted chain cost.
    Chain { path: Vec<String>, total: Rat, discounted_value: Rat },
    /// No qualifying chain; the discounted metric exceeds the exact
    /// lower bound `(1 - alpha) d(x,y) + eps * min(alpha, 1 - alpha)`.
    Blocked { discounted_value: Rat, lower_bound: Rat },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaCheck {
    pub x: String,
    pub y: String,
    pub eps: Rat,
    pub alpha: Rat,
    /// Delta behavior at scale eps: the endpoints are discretely
    /// connectable at that scale.
    pub delta_at_scale: bool,
    pub certificate: DeltaCertificate,
}

/// Delta-molecule check at scale eps: `m_xy` behaves like a Delta point at
/// scale eps iff `x` and `y` are eps-discretely connectable. The verdict
/// is cross-checked against the discounted shortest-path metric: a witness
/// chain caps it at the discounted chain cost, and a blocked pair must
/// respect the exact excess lower bound.
pub fn molecule_check(
    space: &MetricSpace,
    x: &str,
    y: &str,
    eps: &Rat,
    alpha: &Rat,
) -> Result<DeltaCheck, DeltaError> {
    let params = DerivedParams::new(alpha.clone(), eps.clone())?;
    let conn = discretely_connectable(space, x, y, eps)?;
    let b = discounted_metric(space, &params);
    let b_xy = b.d_ids(x, y)?;
    let d_xy = space.d_ids(x, y)?;
    let one_minus = rat_one() - alpha;
    match conn {
        Connectivity::Connected { path, total } => {
            let discounted_chain = &one_minus * &total;
            if b_xy > discounted_chain {
                return Err(DeltaError::Inconsistent(format!(
                    "b(x,y) = {} exceeds discounted chain cost {}",
                    fmt_rat(&b_xy),
                    fmt_rat(&discounted_chain)
                )));
            }
            if b_xy < &one_minus * &d_xy {
                return Err(DeltaError::Inconsistent("b below (1-alpha) d".into()));
            }
            Ok(DeltaCheck {
                x: x.to_owned(),
                y: y.to_owned(),
                eps: eps.clone(),
                alpha: alpha.clone(),
                delta_at_scale: true,
                certificate: DeltaCertificate::Chain { path, total, discounted_value: b_xy },
            })
        }
        Connectivity::Blocked { .. } => {
            let gap = eps * alpha.clone().min(one_minus.clone());
            let lower = &one_minus * &d_xy + gap;
            if b_xy < lower {
                return Err(DeltaError::Inconsistent(format!(
                    "blocked pair violates the excess bound: b = {}, bound = {}",
                    fmt_rat(&b_xy),
                    fmt_rat(&lower)
                )));
            }
            Ok(DeltaCheck {
                x: x.to_owned(),
                y: y.to_owned(),
                eps: eps.clone(),
                alpha: alpha.clone(),
                delta_at_scale: false,
                certificate: DeltaCertificate::Blocked { discounted_value: b_xy, lower_bound: lower },
            })
        }
    }
}

/// Free-space norm of `mu` measured in the discounted metric.
pub fn discounted_norm(
    space: &MetricSpace,
    mu: &FreeVector,
    alpha: &Rat,
    eps: &Rat,
) -> Result<Rat, DeltaError> {
    let params = DerivedParams::new(alpha.clone(), eps.clone())?;
    let b = discounted_metric(space, &params);
    Ok(kr_norm_in(space, &b, mu)?.value)
}

/// First molecule (in lexicographic order of ordered pairs) inside the
/// slice `S(f, alpha)` with endpoint distance strictly below eps.
pub fn slice_molecule_search(
    space: &MetricSpace,
    f: &PointFunction,
    alpha: &Rat,
    eps: &Rat,
) -> Result<Option<(String, String)>, DeltaError> {
    let (norm, _) = lip_norm(space, f);
    if norm != rat_one() {
        return Err(FreeError::NotUnitNorm(fmt_rat(&norm)).into());
    }
    if *alpha <= rat_zero() || *alpha >= rat_one() {
        return Err(MetricError::BadAlpha(fmt_rat(alpha)).into());
    }
    let threshold = rat_one() - alpha;
    let mut ids: Vec<&str> = space.points().iter().map(|p| p.id.as_str()).collect();
    ids.sort();
    for &u in &ids {
        for &v in &ids {
            if u == v {
                continue;
            }
            let d = space.d_ids(u, v)?;
            if &d >= eps {
                continue;
            }
            let quotient = (f.value(u) - f.value(v)) / d;
            if quotient > threshold {
                return Ok(Some((u.to_owned(), v.to_owned())));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaAtom {
    /// Weight of the plain-metric molecule `m_{xy}` in the expansion.
    pub weight: Rat,
    pub x: String,
    pub y: String,
    pub plain_dist: Rat,
    pub discounted_dist: Rat,
    /// Whether the endpoints realize the fully discounted distance
    /// `b = (1 - alpha) d`, i.e. the atom is a Delta molecule at this scale.
    pub delta_flag: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaDecomposition {
    pub atoms: Vec<DeltaAtom>,
    pub discounted_norm: Rat,
    /// Sum of the plain-molecule weights; equals one exactly whenever the
    /// discounted norm equals `1 - alpha`.
    pub weight_sum: Rat,
    pub all_flagged: bool,
}

impl DeltaDecomposition {
    pub fn combination(&self) -> MoleculeCombination {
        MoleculeCombination {
            atoms: self
                .atoms
                .iter()
                .map(|a| crate::free::MoleculeAtom {
                    coeff: a.weight.clone(),
                    x: a.x.clone(),
                    y: a.y.clone(),
                })
                .collect(),
        }
    }
}

/// Expand a unit vector into molecules optimally with respect to the
/// discounted metric and rescale each atom back to a plain-metric
/// molecule: an optimal discounted atom `a (delta(x)-delta(y)) / b(x,y)`
/// contributes the plain molecule `m_{xy}` with weight `a d(x,y) / b(x,y)`.
///
/// When the discounted norm equals `1 - alpha` exactly, every atom carries
/// the Delta flag, the weights are a convex combination (sum exactly one),
/// and the reconstruction is exact; these identities are enforced here.
pub fn decompose(
    space: &MetricSpace,
    mu: &FreeVector,
    alpha: &Rat,
    eps: &Rat,
) -> Result<DeltaDecomposition, DeltaError> {
    let plain_norm = kr_norm(space, mu)?.value;
    if plain_norm != rat_one() {
        return Err(DeltaError::NotUnitVector(fmt_rat(&plain_norm)));
    }
    let params = DerivedParams::new(alpha.clone(), eps.clone())?;
    let b = discounted_metric(space, &params);
    let kr_b = kr_norm_in(space, &b, mu)?;
    let discounted = crate::free::decompose_flow(&b, &kr_b.flow)?;

    let one_minus = rat_one() - alpha;
    let mut atoms = Vec::with_capacity(discounted.atoms.len());
    let mut weight_sum = rat_zero();
    let mut all_flagged = true;
    for atom in &discounted.atoms {
        let d = space.d_ids(&atom.x, &atom.y)?;
        let bxy = b.d_ids(&atom.x, &atom.y)?;
        let weight = &atom.coeff * &d / &bxy;
        let delta_flag = bxy == &one_minus * &d;
        all_flagged &= delta_flag;
        weight_sum += &weight;
        atoms.push(DeltaAtom {
            weight,
            x: atom.x.clone(),
            y: atom.y.clone(),
            plain_dist: d,
            discounted_dist: bxy,
            delta_flag,
        });
    }

    let result = DeltaDecomposition {
        atoms,
        discounted_norm: kr_b.value.clone(),
        weight_sum: weight_sum.clone(),
        all_flagged,
    };

    let reconstructed = result.combination().reconstruct(space)?;
    if &reconstructed != mu {
        return Err(DeltaError::Inconsistent("expansion does not reconstruct the input".into()));
    }
    if kr_b.value == one_minus && (!all_flagged || weight_sum != rat_one()) {
        return Err(DeltaError::Inconsistent(
            "discounted norm hit 1 - alpha but the expansion is not a flagged convex combination"
                .into(),
        ));
    }
    Ok(result)
}

#[derive(Debug, Clone)]
pub struct ProbeResult {
    /// Exact maximum of `||mu - m_uv||` over molecules in the slice.
    pub sup_distance: Rat,
    pub argmax: Option<(String, String)>,
    /// Number of molecules found in the slice.
    pub slice_molecules: usize,
}

/// Exhaustive probe of how far the slice `S(f, alpha)` reaches from `mu`:
/// scans every ordered pair, keeps the molecules lying in the slice, and
/// maximizes the exact transport distance to `mu`. The distance can never
/// exceed 2 for unit `mu`.
pub fn distance_probe(
    space: &MetricSpace,
    mu: &FreeVector,
    f: &PointFunction,
    alpha: &Rat,
) -> Result<ProbeResult, DeltaError> {
    if !crate::free::slice_member(space, f, alpha, mu)? {
        return Err(DeltaError::NotInSlice);
    }
    let threshold = rat_one() - alpha;
    let mut ids: Vec<&str> = space.points().iter().map(|p| p.id.as_str()).collect();
    ids.sort();
    let mut best = rat_zero();
    let mut arg = None;
    let mut count = 0usize;
    for &u in &ids {
        for &v in &ids {
            if u == v {
                continue;
            }
            let m = molecule(space, u, v)?;
            if pair(f, &m) <= threshold {
                continue;
            }
            count += 1;
            let dist = kr_norm(space, &mu.sub(space, &m))?.value;
            if dist > best {
                best = dist;
                arg = Some((u.to_owned(), v.to_owned()));
            }
        }
    }
    Ok(ProbeResult { sup_distance: best, argmax: arg, slice_molecules: count })
}

#[derive(Debug, Clone)]
pub struct ScanRow {
    pub eps: Rat,
    pub discounted_norm: Rat,
}

/// Discounted norms over a decreasing eps grid. The values must be
/// monotone nondecreasing as eps shrinks, and once eps is at most the
/// minimum positive distance the discounted metric is the plain one, so
/// the row equals the plain norm; both facts are enforced.
pub fn norm_scan(
    space: &MetricSpace,
    mu: &FreeVector,
    alpha: &Rat,
    eps_list: &[Rat],
) -> Result<Vec<ScanRow>, DeltaError> {
    if eps_list.is_empty()
        || eps_list.iter().any(|e| *e <= rat_zero())
        || eps_list.windows(2).any(|w| w[0] <= w[1])
    {
        return Err(DeltaError::BadEpsList);
    }
    let mut rows: Vec<ScanRow> = Vec::with_capacity(eps_list.len());
    let min_gap = space.min_positive_distance();
    let plain = kr_norm(space, mu)?.value;
    for eps in eps_list {
        let value = discounted_norm(space, mu, alpha, eps)?;
        if let Some(prev) = rows.last() {
            if value < prev.discounted_norm {
                return Err(DeltaError::Inconsistent(format!(
                    "discounted norm decreased from {} to {} as eps shrank",
                    fmt_rat(&prev.discounted_norm),
                    fmt_rat(&value)
                )));
            }
        }
        if let Some(gap) = &min_gap {
            if eps <= gap && value != plain {
                return Err(DeltaError::Inconsistent(
                    "eps at most the minimum gap must reproduce the plain norm".into(),
                ));
            }
        }
        rows.push(ScanRow { eps: eps.clone(), discounted_norm: value });
    }
    Ok(rows)
}
