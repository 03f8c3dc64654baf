//! Finitely supported elements of the free space over a finite pointed
//! metric space, Lipschitz functionals, and the exact transport norm.
//!
//! The norm of `mu = sum a_i delta(x_i)` is computed as a min-cost flow on
//! the complete digraph over `supp(mu) + {base}` whose divergences match
//! the coefficients (the base point absorbs the total mass). Costs are the
//! metric distances, so by the triangle inequality the optimum is attained
//! on direct source-to-sink arcs; the solver works on that bipartite
//! network and certifies optimality with an exact dual witness: a
//! 1-Lipschitz function vanishing at the base whose pairing with `mu`
//! equals the flow cost.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::metric::{MetricError, MetricSpace};
use crate::rat::{fmt_rat, rat_one, rat_zero, Rat};

#[derive(Debug, Error)]
pub enum FreeError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("function is undefined on point `{0}`")]
    UndefinedOn(String),
    #[error("function value at base must be 0, got {0}")]
    NonzeroAtBase(String),
    #[error("functional is not normalized: lip norm = {0}")]
    NotUnitNorm(String),
    #[error("slice parameter must be positive, got {0}")]
    BadSliceParameter(String),
    #[error("covers do not exhaust the space: point `{0}` is uncovered")]
    Uncovered(String),
    #[error("partition denominator vanishes at point `{0}`")]
    ZeroDenominator(String),
    #[error("internal flow solver disagreement: {0}")]
    FlowInternal(String),
}

/// Finitely supported element `sum a_i delta(x_i)`. The base point never
/// carries a term (`delta(base) = 0`) and zero terms are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeVector {
    terms: BTreeMap<String, Rat>,
}

impl FreeVector {
    pub fn zero() -> Self {
        FreeVector { terms: BTreeMap::new() }
    }

    /// Normalizing constructor: sums repeated ids, drops the base point
    /// and zero coefficients, and rejects unknown ids.
    pub fn new<I>(space: &MetricSpace, terms: I) -> Result<Self, FreeError>
    where
        I: IntoIterator<Item = (String, Rat)>,
    {
        let mut acc: BTreeMap<String, Rat> = BTreeMap::new();
        for (id, coeff) in terms {
            space.idx(&id)?;
            *acc.entry(id).or_insert_with(rat_zero) += coeff;
        }
        acc.remove(space.base_id());
        acc.retain(|_, c| !c.is_zero());
        Ok(FreeVector { terms: acc })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<String, Rat> {
        &self.terms
    }

    pub fn coeff(&self, id: &str) -> Rat {
        self.terms.get(id).cloned().unwrap_or_else(rat_zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().map(|s| s.as_str())
    }

    pub fn add(&self, space: &MetricSpace, other: &FreeVector) -> FreeVector {
        let mut acc = self.terms.clone();
        for (id, c) in &other.terms {
            *acc.entry(id.clone()).or_insert_with(rat_zero) += c;
        }
        acc.retain(|_, c| !c.is_zero());
        let _ = space;
        FreeVector { terms: acc }
    }

    pub fn sub(&self, space: &MetricSpace, other: &FreeVector) -> FreeVector {
        self.add(space, &other.scale(&-rat_one()))
    }

    pub fn scale(&self, factor: &Rat) -> FreeVector {
        if factor.is_zero() {
            return FreeVector::zero();
        }
        FreeVector { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * factor)).collect() }
    }
}

/// The unit molecule `(delta(x) - delta(y)) / d(x,y)`.
pub fn molecule(space: &MetricSpace, x: &str, y: &str) -> Result<FreeVector, FreeError> {
    if x == y {
        return Err(MetricError::SamePoint(x.to_owned()).into());
    }
    let d = space.d_ids(x, y)?;
    let inv = rat_one() / d;
    FreeVector::new(space, [(x.to_owned(), inv.clone()), (y.to_owned(), -inv)])
}

/// Real-valued function on the points. The `Lip0` flavor vanishes at the
/// base point and acts as a functional on free vectors; the `Weight`
/// flavor (partitions of unity) is exempt from that constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointFunction {
    values: BTreeMap<String, Rat>,
    weight_flavor: bool,
}

impl PointFunction {
    /// A functional in Lip_0: defined everywhere, zero at the base.
    pub fn lip0<I>(space: &MetricSpace, values: I) -> Result<Self, FreeError>
    where
        I: IntoIterator<Item = (String, Rat)>,
    {
        let f = Self::collect(space, values)?;
        let at_base = f.value(space.base_id());
        if !at_base.is_zero() {
            return Err(FreeError::NonzeroAtBase(fmt_rat(&at_base)));
        }
        Ok(f)
    }

    /// A weight function: defined everywhere, base value unconstrained.
    pub fn weight<I>(space: &MetricSpace, values: I) -> Result<Self, FreeError>
    where
        I: IntoIterator<Item = (String, Rat)>,
    {
        let mut f = Self::collect(space, values)?;
        f.weight_flavor = true;
        Ok(f)
    }

    fn collect<I>(space: &MetricSpace, values: I) -> Result<Self, FreeError>
    where
        I: IntoIterator<Item = (String, Rat)>,
    {
        let mut map = BTreeMap::new();
        for (id, v) in values {
            space.idx(&id)?;
            map.insert(id, v);
        }
        for p in space.points() {
            if !map.contains_key(&p.id) {
                return Err(FreeError::UndefinedOn(p.id.clone()));
            }
        }
        Ok(PointFunction { values: map, weight_flavor: false })
    }

    /// Pointwise construction from a closure over point metadata.
    pub fn from_fn(
        space: &MetricSpace,
        weight_flavor: bool,
        mut f: impl FnMut(&crate::metric::PointMeta) -> Rat,
    ) -> Self {
        let values = space.points().iter().map(|p| (p.id.clone(), f(p))).collect();
        PointFunction { values, weight_flavor }
    }

    pub fn is_weight(&self) -> bool {
        self.weight_flavor
    }

    pub fn value(&self, id: &str) -> Rat {
        self.values.get(id).cloned().unwrap_or_else(rat_zero)
    }

    pub fn values(&self) -> &BTreeMap<String, Rat> {
        &self.values
    }

    /// f + s * g pointwise; result keeps the Lip0 flavor only when both
    /// operands have it.
    pub fn axpy(&self, s: &Rat, g: &PointFunction) -> PointFunction {
        let values = self
            .values
            .iter()
            .map(|(k, v)| (k.clone(), v + s * g.value(k)))
            .collect();
        PointFunction { values, weight_flavor: self.weight_flavor || g.weight_flavor }
    }
}

/// Exact Lipschitz constant: max of |f(x) - f(y)| / d(x,y) over unordered
/// pairs, with an attaining pair. Zero (no pair) on one-point spaces.
pub fn lip_norm(space: &MetricSpace, f: &PointFunction) -> (Rat, Option<(String, String)>) {
    let n = space.len();
    let mut best = rat_zero();
    let mut arg = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let q = (f.value(space.id(i)) - f.value(space.id(j))).abs() / space.d(i, j);
            if q > best {
                best = q;
                arg = Some((space.id(i).to_owned(), space.id(j).to_owned()));
            }
        }
    }
    (best, arg)
}

/// The duality pairing `<f, mu> = sum a_i f(x_i)`.
pub fn pair(f: &PointFunction, mu: &FreeVector) -> Rat {
    mu.terms.iter().map(|(id, c)| c * f.value(id)).sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowArc {
    pub from: String,
    pub to: String,
    pub amount: Rat,
}

/// Optimal transport witness: non-negative arc flows whose divergence at
/// each point matches the vector coefficient (base absorbs the imbalance)
/// and whose cost is the free-space norm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowSolution {
    pub arcs: Vec<FlowArc>,
    pub objective: Rat,
}

/// Norm computation result with both optimality certificates.
#[derive(Debug, Clone)]
pub struct KrResult {
    pub value: Rat,
    pub flow: FlowSolution,
    /// 1-Lipschitz, zero at the base, pairs with the input to exactly the
    /// optimal value.
    pub dual: PointFunction,
}

/// Exact free-space norm of a finitely supported vector, with primal flow
/// and dual Lipschitz certificates. `kr_norm(mu).value` is zero iff `mu`
/// is zero.
pub fn kr_norm(space: &MetricSpace, mu: &FreeVector) -> Result<KrResult, FreeError> {
    kr_norm_in(space, space, mu)
}

/// As `kr_norm`, but measures costs in `geometry` (a space over the same
/// point ids, e.g. a discounted metric) while `mu` lives over `space`.
pub fn kr_norm_in(
    space: &MetricSpace,
    geometry: &MetricSpace,
    mu: &FreeVector,
) -> Result<KrResult, FreeError> {
    for id in mu.support() {
        space.idx(id)?;
        geometry.idx(id)?;
    }

    // Node set: support plus base; excess = coefficient, base absorbs.
    let mut ids: Vec<String> = mu.support().map(str::to_owned).collect();
    if !ids.iter().any(|i| i == space.base_id()) {
        ids.push(space.base_id().to_owned());
    }
    ids.sort();
    let node_count = ids.len();
    let total: Rat = mu.terms.values().sum();
    let mut excess: Vec<Rat> = ids.iter().map(|id| mu.coeff(id)).collect();
    let base_pos = ids.iter().position(|i| i == space.base_id()).unwrap();
    excess[base_pos] = -total;

    let d = |i: usize, j: usize| -> Rat { geometry.d_ids(&ids[i], &ids[j]).unwrap() };

    // Successive shortest augmenting paths on the bipartite network from
    // positive-excess to negative-excess nodes. Bellman-Ford handles the
    // negative residual arcs; everything is exact.
    let mut flow: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
    loop {
        let sources: Vec<usize> = (0..node_count).filter(|&i| excess[i] > rat_zero()).collect();
        if sources.is_empty() {
            break;
        }
        let sinks: BTreeSet<usize> = (0..node_count).filter(|&i| excess[i] < rat_zero()).collect();
        if sinks.is_empty() {
            return Err(FreeError::FlowInternal("unbalanced excesses".into()));
        }

        // Residual arcs: forward (u,v) between any supply-side u and
        // demand-side v with cost d(u,v); backward (v,u) with cost -d(u,v)
        // where flow is positive.
        let mut dist: Vec<Option<Rat>> = vec![None; node_count];
        let mut prev: Vec<Option<usize>> = vec![None; node_count];
        for &s in &sources {
            dist[s] = Some(rat_zero());
        }
        let supply_side: Vec<usize> =
            (0..node_count).filter(|&i| excess[i] > rat_zero() || flow.keys().any(|&(u, _)| u == i)).collect();
        let demand_side: Vec<usize> =
            (0..node_count).filter(|&i| excess[i] < rat_zero() || flow.keys().any(|&(_, v)| v == i)).collect();
        for _ in 0..node_count {
            let mut changed = false;
            for &u in &supply_side {
                let Some(du) = dist[u].clone() else { continue };
                for &v in &demand_side {
                    if v == u {
                        continue;
                    }
                    let cand = &du + d(u, v);
                    if dist[v].as_ref().map_or(true, |old| &cand < old) {
                        dist[v] = Some(cand);
                        prev[v] = Some(u);
                        changed = true;
                    }
                }
            }
            for (&(u, v), amount) in &flow {
                if amount.is_zero() {
                    continue;
                }
                let Some(dv) = dist[v].clone() else { continue };
                let cand = dv - d(u, v);
                if dist[u].as_ref().map_or(true, |old| &cand < old) {
                    dist[u] = Some(cand);
                    prev[u] = Some(v);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        // Closest reachable sink.
        let t = sinks
            .iter()
            .copied()
            .filter(|&t| dist[t].is_some())
            .min_by(|&a, &b| dist[a].as_ref().unwrap().cmp(dist[b].as_ref().unwrap()))
            .ok_or_else(|| FreeError::FlowInternal("no augmenting path".into()))?;

        // Reconstruct the path back to a source.
        let mut path = vec![t];
        let mut cur = t;
        while prev[cur].is_some() {
            cur = prev[cur].unwrap();
            path.push(cur);
            if path.len() > 2 * node_count + 2 {
                return Err(FreeError::FlowInternal("cyclic predecessor chain".into()));
            }
        }
        path.reverse();
        let s = path[0];

        let mut bottleneck = excess[s].clone().min(-excess[t].clone());
        for w in path.windows(2) {
            let (u, v) = (w[0], w[1]);
            // Backward residual arcs are traversed as (v, u) against flow (u, v).
            if let Some(amount) = flow.get(&(v, u)) {
                if !amount.is_zero() {
                    bottleneck = bottleneck.min(amount.clone());
                }
            }
        }
        if bottleneck <= rat_zero() {
            return Err(FreeError::FlowInternal("nonpositive bottleneck".into()));
        }
        for w in path.windows(2) {
            let (u, v) = (w[0], w[1]);
            let backward = flow.get(&(v, u)).map_or(false, |a| !a.is_zero());
            if backward {
                let a = flow.get_mut(&(v, u)).unwrap();
                *a -= &bottleneck;
                if a.is_zero() {
                    flow.remove(&(v, u));
                }
            } else {
                *flow.entry((u, v)).or_insert_with(rat_zero) += &bottleneck;
            }
        }
        excess[s] -= &bottleneck;
        excess[t] += &bottleneck;
    }

    let objective: Rat = flow.iter().map(|(&(u, v), a)| a * d(u, v)).sum();

    // Dual witness: g = -shortest residual distance from the base over the
    // complete digraph (all forward arcs plus backward arcs on carried
    // flow). No negative residual cycle exists at the optimum, so g is
    // well-defined, 1-Lipschitz on the nodes, zero at the base, and tight
    // on every flow-carrying arc.
    let mut pot: Vec<Rat> = vec![rat_zero(); node_count];
    for _round in 0..=node_count {
        let mut changed = false;
        for u in 0..node_count {
            for v in 0..node_count {
                if u == v {
                    continue;
                }
                let cand = &pot[u] + d(u, v);
                if cand < pot[v] {
                    pot[v] = cand;
                    changed = true;
                }
            }
        }
        for (&(u, v), amount) in &flow {
            if amount.is_zero() {
                continue;
            }
            let cand = &pot[v] - d(u, v);
            if cand < pot[u] {
                pot[u] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        if _round == node_count {
            return Err(FreeError::FlowInternal("negative residual cycle".into()));
        }
    }
    let shift = pot[base_pos].clone();
    let anchor: BTreeMap<String, Rat> =
        ids.iter().zip(&pot).map(|(id, p)| (id.clone(), &shift - p)).collect();

    // McShane extension to all points of the space, measured in `geometry`.
    let g = PointFunction::from_fn(space, false, |p| {
        if let Some(v) = anchor.get(&p.id) {
            return v.clone();
        }
        anchor
            .iter()
            .map(|(aid, av)| av + geometry.d_ids(&p.id, aid).unwrap())
            .min()
            .unwrap()
    });

    let paired = pair(&g, mu);
    if paired != objective {
        return Err(FreeError::FlowInternal(format!(
            "dual pairing {} != flow cost {}",
            fmt_rat(&paired),
            fmt_rat(&objective)
        )));
    }
    let (gnorm, _) = lip_norm(geometry, &g);
    if !mu.is_zero() && gnorm > rat_one() {
        return Err(FreeError::FlowInternal(format!("dual witness has lip norm {}", fmt_rat(&gnorm))));
    }

    let arcs = flow
        .into_iter()
        .filter(|(_, a)| !a.is_zero())
        .map(|((u, v), amount)| FlowArc { from: ids[u].clone(), to: ids[v].clone(), amount })
        .collect();
    Ok(KrResult { value: objective.clone(), flow: FlowSolution { arcs, objective }, dual: g })
}

/// One term of a molecule expansion `sum coeff_k m_{x_k y_k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoleculeAtom {
    pub coeff: Rat,
    pub x: String,
    pub y: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MoleculeCombination {
    pub atoms: Vec<MoleculeAtom>,
}

impl MoleculeCombination {
    /// Rebuild `sum coeff_k (delta(x_k) - delta(y_k)) / d(x_k, y_k)`.
    pub fn reconstruct(&self, space: &MetricSpace) -> Result<FreeVector, FreeError> {
        let mut acc = FreeVector::zero();
        for atom in &self.atoms {
            let m = molecule(space, &atom.x, &atom.y)?;
            acc = acc.add(space, &m.scale(&atom.coeff));
        }
        Ok(acc)
    }

    pub fn coeff_abs_sum(&self) -> Rat {
        self.atoms.iter().map(|a| a.coeff.abs()).sum()
    }
}

/// Optimal molecule expansion: converts the optimal flow into atoms
/// `coeff = flow * d(u, v)` on `m_{uv}`, so that the absolute coefficients
/// sum to the norm and the reconstruction is exact. Arcs are emitted in
/// point-id order, which makes the expansion deterministic.
pub fn decompose(space: &MetricSpace, mu: &FreeVector) -> Result<MoleculeCombination, FreeError> {
    let kr = kr_norm(space, mu)?;
    decompose_flow(space, &kr.flow)
}

pub(crate) fn decompose_flow(
    space: &MetricSpace,
    flow: &FlowSolution,
) -> Result<MoleculeCombination, FreeError> {
    let mut arcs = flow.arcs.clone();
    arcs.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
    let mut atoms = Vec::with_capacity(arcs.len());
    for arc in arcs {
        let d = space.d_ids(&arc.from, &arc.to)?;
        atoms.push(MoleculeAtom { coeff: &arc.amount * d, x: arc.from, y: arc.to });
    }
    Ok(MoleculeCombination { atoms })
}

/// Slice membership `mu in S(f, alpha) = { nu in ball : <f, nu> > 1 - alpha }`
/// for a functional of exact Lipschitz norm one. The inequality is strict.
pub fn slice_member(
    space: &MetricSpace,
    f: &PointFunction,
    alpha: &Rat,
    mu: &FreeVector,
) -> Result<bool, FreeError> {
    if *alpha <= rat_zero() {
        return Err(FreeError::BadSliceParameter(fmt_rat(alpha)));
    }
    let (norm, _) = lip_norm(space, f);
    if norm != rat_one() {
        return Err(FreeError::NotUnitNorm(fmt_rat(&norm)));
    }
    if kr_norm(space, mu)?.value > rat_one() {
        return Ok(false);
    }
    Ok(pair(f, mu) > rat_one() - alpha)
}

/// Partition of unity subordinate to a cover: `phi_k(x) =
/// d(x, complement of U_k) / sum_i d(x, complement of U_i)`.
///
/// Covers whose complement is empty within the finite space contribute an
/// infinite distance; when any such cover exists the unit weight is split
/// evenly among them (the limit value) and all other covers get zero.
/// Returns weight-flavored functions: `phi_k(base)` need not vanish.
pub fn partition_of_unity(
    space: &MetricSpace,
    covers: &[BTreeSet<String>],
) -> Result<Vec<PointFunction>, FreeError> {
    for p in space.points() {
        if !covers.iter().any(|c| c.contains(&p.id)) {
            return Err(FreeError::Uncovered(p.id.clone()));
        }
    }
    let complements: Vec<Vec<usize>> = covers
        .iter()
        .map(|c| (0..space.len()).filter(|&i| !c.contains(space.id(i))).collect())
        .collect();
    let full: Vec<usize> = complements
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_empty())
        .map(|(k, _)| k)
        .collect();
    if !full.is_empty() {
        let share = rat_one() / crate::rat::rat_int(full.len() as i64);
        return Ok((0..covers.len())
            .map(|k| {
                let v = if full.contains(&k) { share.clone() } else { rat_zero() };
                PointFunction::from_fn(space, true, |_| v.clone())
            })
            .collect());
    }

    let gap = |i: usize, comp: &[usize]| -> Rat {
        comp.iter().map(|&j| space.d(i, j).clone()).min().unwrap()
    };
    // The hypothesis of the construction: the denominator is positive
    // everywhere. Checked exactly, witness returned on failure.
    let mut denom = Vec::with_capacity(space.len());
    for i in 0..space.len() {
        let s: Rat = complements.iter().map(|c| gap(i, c)).sum();
        if s.is_zero() {
            return Err(FreeError::ZeroDenominator(space.id(i).to_owned()));
        }
        denom.push(s);
    }
    Ok(complements
        .iter()
        .map(|comp| {
            PointFunction::from_fn(space, true, |p| {
                let i = space.idx(&p.id).unwrap();
                gap(i, comp) / &denom[i]
            })
        })
        .collect())
}

/// Weighting operator `W mu = sum a_i phi(x_i) delta(x_i)`, the unique
/// finitely supported vector with `<W mu, f> = <mu, f * phi>` for all f.
pub fn weighting(space: &MetricSpace, mu: &FreeVector, phi: &PointFunction) -> FreeVector {
    let mut terms = BTreeMap::new();
    for (id, c) in mu.terms() {
        let w = c * phi.value(id);
        if !w.is_zero() {
            terms.insert(id.clone(), w);
        }
    }
    let _ = space;
    FreeVector { terms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{grid_space, random_space};
    use crate::rat::{rat, rat_int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line3() -> MetricSpace {
        // {0, 1, 2} with unit gaps, base 0.
        use crate::metric::PointMeta;
        MetricSpace::new(
            vec![PointMeta::bare("0"), PointMeta::bare("1"), PointMeta::bare("2")],
            "0",
            vec![
                vec![rat_zero(), rat_one(), rat_int(2)],
                vec![rat_one(), rat_zero(), rat_one()],
                vec![rat_int(2), rat_one(), rat_zero()],
            ],
        )
        .unwrap()
    }

    #[test]
    fn molecule_examples() {
        let g = grid_space(4).unwrap();
        // m with the base endpoint keeps a single term.
        let m = molecule(&g, "1/4", "0").unwrap();
        assert_eq!(m.terms().len(), 1);
        assert_eq!(m.coeff("1/4"), rat_int(4));

        let m = molecule(&g, "1/4", "3/4").unwrap();
        assert_eq!(m.coeff("1/4"), rat_int(2));
        assert_eq!(m.coeff("3/4"), rat_int(-2));

        let back = molecule(&g, "3/4", "1/4").unwrap();
        assert_eq!(m.scale(&-rat_one()), back);

        assert!(molecule(&g, "0", "0").is_err());
    }

    #[test]
    fn lip_norm_zero_function() {
        let g = grid_space(4).unwrap();
        let f = PointFunction::from_fn(&g, false, |_| rat_zero());
        assert_eq!(lip_norm(&g, &f).0, rat_zero());
    }

    #[test]
    fn lip0_requires_base_zero_and_totality() {
        let g = grid_space(1).unwrap();
        assert!(PointFunction::lip0(&g, [("0".into(), rat_one()), ("1".into(), rat_one())]).is_err());
        assert!(PointFunction::lip0(&g, [("0".into(), rat_zero())]).is_err());
        assert!(PointFunction::weight(&g, [("0".into(), rat_one()), ("1".into(), rat_one())]).is_ok());
    }

    #[test]
    fn pairing_identities() {
        let g = grid_space(4).unwrap();
        let f = PointFunction::from_fn(&g, false, |p| p.coords.as_ref().unwrap()[0].clone());
        let m = molecule(&g, "1/2", "1/4").unwrap();
        // <f, m_xy> = (f(x) - f(y)) / d(x,y)
        assert_eq!(pair(&f, &m), rat_one());
        assert_eq!(pair(&f, &FreeVector::zero()), rat_zero());
    }

    #[test]
    fn kr_norm_molecule_is_one() {
        let g = grid_space(8).unwrap();
        let m = molecule(&g, "1/8", "5/8").unwrap();
        let kr = kr_norm(&g, &m).unwrap();
        assert_eq!(kr.value, rat_one());
        assert_eq!(kr.flow.arcs.len(), 1);
    }

    #[test]
    fn kr_norm_dirac_is_distance_to_base() {
        let g = grid_space(8).unwrap();
        let mu = FreeVector::new(&g, [("5/8".to_owned(), rat_one())]).unwrap();
        assert_eq!(kr_norm(&g, &mu).unwrap().value, rat(5, 8));
    }

    #[test]
    fn kr_norm_line3_example() {
        // delta(1) + delta(2) on the unit-gap line costs 1 + 2 = 3.
        let s = line3();
        let mu =
            FreeVector::new(&s, [("1".to_owned(), rat_one()), ("2".to_owned(), rat_one())]).unwrap();
        assert_eq!(kr_norm(&s, &mu).unwrap().value, rat_int(3));
    }

    #[test]
    fn kr_norm_zero_vector() {
        let s = line3();
        let kr = kr_norm(&s, &FreeVector::zero()).unwrap();
        assert_eq!(kr.value, rat_zero());
        assert!(kr.flow.arcs.is_empty());
    }

    #[test]
    fn decompose_examples() {
        let s = line3();
        let m = molecule(&s, "1", "2").unwrap();
        let dec = decompose(&s, &m).unwrap();
        assert_eq!(dec.atoms.len(), 1);
        assert_eq!(dec.atoms[0].coeff, rat_one());
        assert_eq!(dec.reconstruct(&s).unwrap(), m);

        // 1/2 m_{0,1} + 1/2 m_{1,2} on the geodesic line.
        let a = molecule(&s, "1", "0").unwrap().scale(&rat(1, 2));
        let b = molecule(&s, "2", "1").unwrap().scale(&rat(1, 2));
        let mu = a.add(&s, &b);
        let kr = kr_norm(&s, &mu).unwrap();
        let dec = decompose(&s, &mu).unwrap();
        assert_eq!(dec.coeff_abs_sum(), kr.value);
        assert_eq!(dec.reconstruct(&s).unwrap(), mu);

        assert!(decompose(&s, &FreeVector::zero()).unwrap().atoms.is_empty());
    }

    #[test]
    fn slice_membership_boundary_is_strict() {
        let g = grid_space(4).unwrap();
        let f = PointFunction::from_fn(&g, false, |p| p.coords.as_ref().unwrap()[0].clone());
        let m = molecule(&g, "1", "0").unwrap();
        // f attains 1 at m, so m lies in every slice of f.
        assert!(slice_member(&g, &f, &rat(1, 100), &m).unwrap());
        // <f, mu> = 1 - alpha exactly is excluded.
        let alpha = rat(1, 2);
        let mu = m.scale(&(rat_one() - &alpha));
        assert!(!slice_member(&g, &f, &alpha, &mu).unwrap());
        // Non-normalized functionals are rejected with their norm.
        let half = f.axpy(&-rat(1, 2), &f);
        match slice_member(&g, &half, &alpha, &m) {
            Err(FreeError::NotUnitNorm(n)) => assert_eq!(n, "1/2"),
            other => panic!("expected NotUnitNorm, got {other:?}"),
        }
    }

    #[test]
    fn partition_single_cover_is_constant_one() {
        let g = grid_space(2).unwrap();
        let all: BTreeSet<String> = g.points().iter().map(|p| p.id.clone()).collect();
        let phis = partition_of_unity(&g, &[all]).unwrap();
        assert_eq!(phis.len(), 1);
        for p in g.points() {
            assert_eq!(phis[0].value(&p.id), rat_one());
        }
    }

    #[test]
    fn partition_two_overlapping_covers() {
        let g = grid_space(4).unwrap();
        let left: BTreeSet<String> = ["0", "1/4", "1/2", "3/4"].map(str::to_owned).into();
        let right: BTreeSet<String> = ["1/4", "1/2", "3/4", "1"].map(str::to_owned).into();
        let phis = partition_of_unity(&g, &[left.clone(), right.clone()]).unwrap();
        for p in g.points() {
            let total: Rat = phis.iter().map(|f| f.value(&p.id)).sum();
            assert_eq!(total, rat_one());
            for (phi, cover) in phis.iter().zip([&left, &right]) {
                let v = phi.value(&p.id);
                assert!(v >= rat_zero() && v <= rat_one());
                if !cover.contains(&p.id) {
                    assert!(v.is_zero());
                }
            }
        }
    }

    #[test]
    fn partition_requires_exhaustive_cover() {
        let g = grid_space(1).unwrap();
        let only_base: BTreeSet<String> = ["0".to_owned()].into();
        assert!(matches!(
            partition_of_unity(&g, &[only_base]),
            Err(FreeError::Uncovered(p)) if p == "1"
        ));
    }

    #[test]
    fn weighting_constant_weights() {
        let g = grid_space(4).unwrap();
        let mu = molecule(&g, "1/4", "3/4").unwrap();
        let one = PointFunction::from_fn(&g, true, |_| rat_one());
        let zero = PointFunction::from_fn(&g, true, |_| rat_zero());
        assert_eq!(weighting(&g, &mu, &one), mu);
        assert!(weighting(&g, &mu, &zero).is_zero());
    }

    #[test]
    fn weighting_pairing_identity_random() {
        // <W mu, f> = <mu, f * phi> for random mu, f, phi.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let n_points = rng.gen_range(2..=5);
            let s = random_space(&mut rng, n_points);
            let mut mu_terms = Vec::new();
            let mut f_vals = Vec::new();
            let mut phi_vals = Vec::new();
            for p in s.points() {
                mu_terms.push((p.id.clone(), rat(rng.gen_range(-4..=4), rng.gen_range(1..=4))));
                f_vals.push((p.id.clone(), rat(rng.gen_range(-4..=4), rng.gen_range(1..=4))));
                phi_vals.push((p.id.clone(), rat(rng.gen_range(-4..=4), rng.gen_range(1..=4))));
            }
            let mu = FreeVector::new(&s, mu_terms).unwrap();
            let f = PointFunction::weight(&s, f_vals).unwrap();
            let phi = PointFunction::weight(&s, phi_vals).unwrap();
            let lhs = pair(&f, &weighting(&s, &mu, &phi));
            let product = PointFunction::from_fn(&s, true, |p| f.value(&p.id) * phi.value(&p.id));
            let rhs = pair(&product, &mu);
            assert_eq!(lhs, rhs);
        }
    }
}
