//! Finite-dimensional renorming gauges on R^N standing in for the
//! sequence-space construction: the hull norm whose unit ball is the
//! convex hull of the euclidean ball with the spikes `+-(e1 + e_n)`, the
//! trimmed norm that intersects it with the slabs `|x1 - 2 x_n| <= 1`,
//! their dual gauges, strongly exposed point families, slice-diameter
//! probes, and the generic max-of-functionals renorming.
//!
//! The hull gauge is computed as an inf-convolution: minimize
//! `||v - sum mu_n (e1 + e_n)||_2 + sum |mu_n|` by cyclic coordinate
//! descent with closed-form updates. Every computed value carries a
//! certificate: a feasible dual (or primal) witness whose pairing pins the
//! value from below, with the duality gap reported and bounded.
//!
//! This module is the only one using floating point; formulas that are
//! exact in rational arithmetic (inner products of the exposed families,
//! slab terms) are asserted exactly elsewhere.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::rat::{rat, rat_int, Rat};

pub const DEFAULT_GAP_TOL: f64 = 1e-8;
pub const MAX_SWEEPS: usize = 100_000;

#[derive(Debug, Error)]
pub enum RenormError {
    #[error("dimension must be at least 2, got {0}")]
    DimTooSmall(usize),
    #[error("dimension {got} too small: need at least {needed}")]
    DimBelow { needed: usize, got: usize },
    #[error("vector has non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("no convergence within the iteration budget; best gap {best_gap:e}")]
    NoConvergence { best_gap: f64 },
    #[error("functional list must be nonempty")]
    EmptyFunctionals,
    #[error("slice functional is not normalized: computed norm {0}")]
    NotNormalized(f64),
    #[error("internal certificate failure: {0}")]
    Certificate(String),
}

/// Coordinate vector over the canonical basis `e_1 .. e_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RenormVector {
    coords: Vec<f64>,
}

impl RenormVector {
    pub fn new(coords: Vec<f64>) -> Result<Self, RenormError> {
        if coords.len() < 2 {
            return Err(RenormError::DimTooSmall(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(RenormError::NonFinite);
        }
        Ok(RenormVector { coords })
    }

    pub fn basis(dim: usize, n: usize) -> Result<Self, RenormError> {
        if dim < 2 {
            return Err(RenormError::DimTooSmall(dim));
        }
        if n == 0 || n > dim {
            return Err(RenormError::DimBelow { needed: n, got: dim });
        }
        let mut coords = vec![0.0; dim];
        coords[n - 1] = 1.0;
        Ok(RenormVector { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn axpy(&self, s: f64, other: &RenormVector) -> Result<Self, RenormError> {
        if self.dim() != other.dim() {
            return Err(RenormError::DimMismatch(self.dim(), other.dim()));
        }
        RenormVector::new(
            self.coords.iter().zip(&other.coords).map(|(a, b)| a + s * b).collect(),
        )
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// The explicit dual formula: `max(||a||_2, max_{n>=2} |a_1 + a_n|)`.
pub fn hull_dual_norm(a: &RenormVector) -> f64 {
    let c = a.coords();
    let slabs = c[1..].iter().map(|an| (c[0] + an).abs()).fold(0.0f64, f64::max);
    l2(c).max(slabs)
}

/// The slab part of the trimmed norm: `max_{n>=2} |v_1 - 2 v_n|`.
fn trim_slab(v: &[f64]) -> (f64, usize, f64) {
    let mut best = 0.0f64;
    let mut arg = 2usize;
    let mut sign = 1.0;
    for (i, vn) in v[1..].iter().enumerate() {
        let t = v[0] - 2.0 * vn;
        if t.abs() > best {
            best = t.abs();
            arg = i + 2;
            sign = t.signum();
        }
    }
    (best, arg, sign)
}

/// Computed gauge value with both certificates: `value` is the primal
/// (upper-bound) objective, `witness` a feasible functional (or vector,
/// for dual gauges) whose pairing reaches `value - gap`, and
/// `decomposition` the sparse atomic coefficients of the optimizer.
#[derive(Debug, Clone)]
pub struct NormResult {
    pub value: f64,
    pub decomposition: Vec<(usize, f64)>,
    pub witness: Vec<f64>,
    pub gap: f64,
}

/// Gauge of `clco(euclidean ball, +-(e1 + e_n))` by coordinate descent on
/// the inf-convolution objective. The dual witness comes for free: the
/// normalized residual direction, scaled into the explicit dual ball.
pub fn hull_norm(v: &RenormVector) -> Result<NormResult, RenormError> {
    hull_norm_with(v, DEFAULT_GAP_TOL, MAX_SWEEPS)
}

pub fn hull_norm_with(
    v: &RenormVector,
    gap_tol: f64,
    max_sweeps: usize,
) -> Result<NormResult, RenormError> {
    let n = v.dim();
    let vc = v.coords();
    let scale = l2(vc);
    if scale == 0.0 {
        return Ok(NormResult { value: 0.0, decomposition: vec![], witness: vec![0.0; n], gap: 0.0 });
    }

    let mut mu = vec![0.0f64; n - 1];
    let mut r: Vec<f64> = vc.to_vec();
    let mut best: Option<NormResult> = None;

    for _sweep in 0..max_sweeps {
        for m in 0..(n - 1) {
            // Restore the coordinate's own contribution: r' = r + mu_m a_m.
            let old = mu[m];
            r[0] += old;
            r[m + 1] += old;
            let b = r[0] + r[m + 1];
            let c: f64 = r.iter().map(|x| x * x).sum();
            // Minimize sqrt(2 t^2 - 2 b t + c) + |t|: zero unless b^2 > c,
            // else the stationary root on the side of b.
            let t = if b * b > c {
                let s = (2.0 * c - b * b).max(0.0).sqrt();
                if b > 0.0 {
                    (b - s) / 2.0
                } else {
                    (b + s) / 2.0
                }
            } else {
                0.0
            };
            mu[m] = t;
            r[0] -= t;
            r[m + 1] -= t;
        }

        let l1: f64 = mu.iter().map(|t| t.abs()).sum();
        let rnorm = l2(&r);
        let value = rnorm + l1;
        let witness = hull_dual_witness(vc, &mu, &r, rnorm);
        let lower = dot(&witness, vc);
        let gap = (value - lower).max(0.0);
        let candidate = NormResult {
            value,
            decomposition: mu
                .iter()
                .enumerate()
                .filter(|(_, t)| t.abs() > 0.0)
                .map(|(m, t)| (m + 2, *t))
                .collect(),
            witness,
            gap,
        };
        if best.as_ref().map_or(true, |b| candidate.gap < b.gap) {
            best = Some(candidate);
        }
        if best.as_ref().unwrap().gap <= gap_tol * scale.max(1.0) {
            break;
        }
    }

    let best = best.unwrap();
    if best.gap > 1e-6 * scale.max(1.0) {
        return Err(RenormError::NoConvergence { best_gap: best.gap });
    }
    // Sandwich ||v|| <= ||v||_2 <= sqrt(2) ||v||, with float slack.
    if best.value > scale * (1.0 + 1e-9) || scale > 2f64.sqrt() * best.value * (1.0 + 1e-9) {
        return Err(RenormError::Certificate("euclidean sandwich violated".into()));
    }
    Ok(best)
}

/// Dual-feasible witness for the hull gauge. Away from a zero residual the
/// normalized residual direction is optimal; at an exact atomic
/// representation the minimum-norm functional that is tight on the active
/// atoms takes over.
fn hull_dual_witness(v: &[f64], mu: &[f64], r: &[f64], rnorm: f64) -> Vec<f64> {
    let n = v.len();
    let feasible = |a: Vec<f64>| -> Vec<f64> {
        let slabs = a[1..].iter().map(|an| (a[0] + an).abs()).fold(0.0f64, f64::max);
        let s = l2(&a).max(slabs).max(1.0);
        a.into_iter().map(|x| x / s).collect()
    };
    if rnorm > 1e-12 {
        return feasible(r.iter().map(|x| x / rnorm).collect());
    }
    // r = 0: v = sum mu_m a_m. Tight functional: a_1 + a_m = sign(mu_m) on
    // the support, minimum euclidean norm.
    let support: Vec<usize> = (0..(n - 1)).filter(|&m| mu[m] != 0.0).collect();
    if support.is_empty() {
        return vec![0.0; n];
    }
    let sign_sum: f64 = support.iter().map(|&m| mu[m].signum()).sum();
    let t = sign_sum / (support.len() as f64 + 1.0);
    let mut a = vec![0.0; n];
    a[0] = t;
    for &m in &support {
        a[m + 1] = mu[m].signum() - t;
    }
    feasible(a)
}

/// Trimmed norm `max(hull gauge, max_n |v_1 - 2 v_n|)`. The slab side is
/// formula-exact; when it wins, the witness is the defining functional and
/// the gap vanishes.
pub fn trimmed_norm(v: &RenormVector) -> Result<NormResult, RenormError> {
    let hull = hull_norm(v)?;
    let (slab, arg, sign) = trim_slab(v.coords());
    // Both bounds |v_1| and |v_n| come from dual-unit functionals, so the
    // trimmed value stays within a factor 3 of the hull value.
    if slab > 3.0 * hull.value * (1.0 + 1e-9) {
        return Err(RenormError::Certificate("trimmed sandwich violated".into()));
    }
    if slab >= hull.value {
        let mut witness = vec![0.0; v.dim()];
        witness[0] = sign;
        witness[arg - 1] = -2.0 * sign;
        return Ok(NormResult { value: slab, decomposition: vec![], witness, gap: 0.0 });
    }
    Ok(hull)
}

fn trimmed_norm_value(v: &RenormVector) -> Result<(f64, f64), RenormError> {
    let r = trimmed_norm(v)?;
    Ok((r.value, r.gap))
}

/// Gauge of `clco(dual hull ball, +-(e1* - 2 e_n*))`: inf-convolution of
/// the explicit dual formula with the atomic l1 gauge, minimized by cyclic
/// coordinate descent with exact one-dimensional convex minimization.
/// The lower-bound witness is a vector of trimmed norm at most one chosen
/// from tight of-the-shelf candidates and the residual direction.
pub fn trimmed_dual_norm(a: &RenormVector) -> Result<NormResult, RenormError> {
    trimmed_dual_norm_with(a, DEFAULT_GAP_TOL, 400)
}

pub fn trimmed_dual_norm_with(
    a: &RenormVector,
    gap_tol: f64,
    max_sweeps: usize,
) -> Result<NormResult, RenormError> {
    let n = a.dim();
    let ac = a.coords();
    let scale = hull_dual_norm(a);
    if scale == 0.0 {
        return Ok(NormResult { value: 0.0, decomposition: vec![], witness: vec![0.0; n], gap: 0.0 });
    }

    // z(nu) = a - sum nu_m (e1* - 2 e_m*): z_1 = a_1 - sum nu,
    // z_m = a_m + 2 nu_m.
    let mut nu = vec![0.0f64; n - 1];
    let mut z: Vec<f64> = ac.to_vec();
    let objective = |z: &[f64], nu: &[f64]| -> f64 {
        let slabs = z[1..].iter().map(|zm| (z[0] + zm).abs()).fold(0.0f64, f64::max);
        l2(z).max(slabs) + nu.iter().map(|t| t.abs()).sum::<f64>()
    };

    let mut value = objective(&z, &nu);
    for _sweep in 0..max_sweeps {
        for m in 0..(n - 1) {
            let old = nu[m];
            // Remove the coordinate's contribution.
            z[0] += old;
            z[m + 1] -= 2.0 * old;
            let zeta: Vec<f64> = z.clone();
            let h = |t: f64| -> f64 {
                // z(t): zeta with z_1 -= t, z_{m+1} += 2 t.
                let z1 = zeta[0] - t;
                let mut sq = z1 * z1;
                let mut slabs = 0.0f64;
                for (j, zj) in zeta[1..].iter().enumerate() {
                    let zj = if j == m { zj + 2.0 * t } else { *zj };
                    sq += zj * zj;
                    slabs = slabs.max((z1 + zj).abs());
                }
                sq.sqrt().max(slabs) + t.abs()
            };
            let radius = h(0.0);
            nu[m] = ternary_min(&h, -radius, radius);
            z[0] -= nu[m];
            z[m + 1] += 2.0 * nu[m];
        }
        let new_value = objective(&z, &nu);
        if value - new_value < 1e-15 * scale.max(1.0) {
            value = new_value;
            break;
        }
        value = new_value;
    }

    // Lower-bound witnesses: vectors of trimmed norm at most one.
    let mut best_lower = f64::NEG_INFINITY;
    let mut best_witness = vec![0.0; n];
    let mut consider = |cand: Vec<f64>| -> Result<(), RenormError> {
        if cand.iter().all(|c| *c == 0.0) {
            return Ok(());
        }
        let rv = RenormVector::new(cand.clone())?;
        let (tn, tgap) = trimmed_norm_value(&rv)?;
        let denom = (tn + tgap).max(1e-300);
        let factor = if denom > 1.0 { 1.0 / denom } else { 1.0 };
        let lower = dot(&cand, ac) * factor;
        if lower > best_lower {
            best_lower = lower;
            best_witness = cand.into_iter().map(|c| c * factor).collect();
        }
        Ok(())
    };

    // Canonical extreme points.
    for sign in [1.0, -1.0] {
        let mut e1 = vec![0.0; n];
        e1[0] = sign;
        consider(e1)?;
        for m in 1..n {
            let mut spike = vec![0.0; n];
            spike[0] = sign;
            spike[m] = sign;
            consider(spike)?;
        }
    }
    // Residual direction.
    let znorm = l2(&z);
    if znorm > 1e-12 {
        consider(z.iter().map(|x| x / znorm).collect())?;
    }
    // Family tight on the active atoms: v(t) = t e1 + sum (t - s_m)/2 e_m
    // over the support, which satisfies v_1 - 2 v_m = s_m.
    let support: Vec<usize> = (0..(n - 1)).filter(|&m| nu[m] != 0.0).collect();
    if !support.is_empty() {
        for k in 0..=24 {
            let t = -1.2 + 2.4 * (k as f64) / 24.0;
            let mut cand = vec![0.0; n];
            cand[0] = t;
            for &m in &support {
                cand[m + 1] = (t - nu[m].signum()) / 2.0;
            }
            consider(cand)?;
        }
    }

    let gap = (value - best_lower).max(0.0);
    if gap > gap_tol.max(1e-12) * 100.0 * scale.max(1.0) {
        return Err(RenormError::NoConvergence { best_gap: gap });
    }
    Ok(NormResult {
        value,
        decomposition: nu
            .iter()
            .enumerate()
            .filter(|(_, t)| t.abs() > 0.0)
            .map(|(m, t)| (m + 2, *t))
            .collect(),
        witness: best_witness,
        gap,
    })
}

/// Minimize a convex function on [lo, hi] by ternary search.
fn ternary_min(h: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..90 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if h(m1) <= h(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let mid = 0.5 * (lo + hi);
    // Snap to zero when the kink at the origin is the minimizer.
    if mid.abs() < 1e-12 || h(0.0) <= h(mid) {
        if h(0.0) <= h(mid) {
            return 0.0;
        }
    }
    mid
}

/// Exact-rational report for the strongly exposed pair family.
#[derive(Debug, Clone)]
pub struct ExposedPairReport {
    pub n: u32,
    pub x: RenormVector,
    pub xstar: RenormVector,
    /// `<x*, x>` as an exact rational; equals one.
    pub pairing: Rat,
    /// `||e1 - x||_2^2` as an exact rational; equals `2/n`.
    pub dist_sq: Rat,
    pub trimmed_norm_x: NormResult,
    pub trimmed_dual_xstar: NormResult,
}

/// The point family exposing the first basis vector: with `k = 32 n - 16`,
/// `x = (1 - 1/n) e1 + (1/(4n)) (e2 + ... + e_{k+1})` and the analogous
/// functional. The pairing `<x*, x>` and the squared euclidean distance to
/// `e1` are verified exactly in rational arithmetic; the unit norms of
/// both vectors are certified numerically.
pub fn exposed_pair(n: u32, dim: usize) -> Result<ExposedPairReport, RenormError> {
    if n == 0 {
        return Err(RenormError::DimBelow { needed: 1, got: 0 });
    }
    let k = 32 * (n as usize) - 16;
    if dim < k + 1 {
        return Err(RenormError::DimBelow { needed: k + 1, got: dim });
    }
    let lead = 1.0 - 1.0 / (n as f64);
    let tail = 1.0 / (4.0 * n as f64);
    let mut coords = vec![0.0; dim];
    coords[0] = lead;
    for i in 1..=k {
        coords[i] = tail;
    }
    let x = RenormVector::new(coords)?;
    let xstar = x.clone();

    // <x*, x> = (1 - 1/n)^2 + k / (16 n^2) = 1 exactly.
    let n_rat = rat_int(n as i64);
    let lead_rat = rat_int(1) - rat_int(1) / &n_rat;
    let tail_rat = rat_int(1) / (rat_int(4) * &n_rat);
    let pairing = &lead_rat * &lead_rat + rat_int(k as i64) * &tail_rat * &tail_rat;
    // ||e1 - x||_2^2 = 1/n^2 + k/(16 n^2) = 2/n exactly.
    let gap_rat = rat_int(1) / &n_rat;
    let dist_sq = &gap_rat * &gap_rat + rat_int(k as i64) * &tail_rat * &tail_rat;
    if pairing != rat_int(1) {
        return Err(RenormError::Certificate("exact pairing is not one".into()));
    }
    if dist_sq != rat(2, 1) / &n_rat {
        return Err(RenormError::Certificate("exact squared distance mismatch".into()));
    }

    let trimmed_norm_x = trimmed_norm(&x)?;
    let trimmed_dual_xstar = trimmed_dual_norm(&xstar)?;
    Ok(ExposedPairReport { n, x, xstar, pairing, dist_sq, trimmed_norm_x, trimmed_dual_xstar })
}

#[derive(Debug, Clone)]
pub struct SuperDeltaRow {
    pub n: usize,
    /// Trimmed distance between the unit vector and its spike translate.
    pub primal_distance: f64,
    /// Trimmed dual distance between the exposing functional and its
    /// slab translate.
    pub dual_distance: f64,
}

#[derive(Debug, Clone)]
pub struct SuperDeltaReport {
    pub rows: Vec<SuperDeltaRow>,
    pub max_primal_error: f64,
    pub max_dual_error: f64,
}

/// Distance-two identities behind the Delta behavior of the first basis
/// vector and its exposing functional: for every n,
/// `trim(e1 - (e1 + e_n)) = trim(e_n) = 2` and the dual distance
/// `trim*(e1* - (e1* - 2 e_n*)) = 2 trim*(e_n*) = 2`. The translates
/// converge to the anchors coordinatewise; no topological claim is made.
pub fn super_delta_witness(dim: usize) -> Result<SuperDeltaReport, RenormError> {
    if dim < 3 {
        return Err(RenormError::DimBelow { needed: 3, got: dim });
    }
    let mut rows = Vec::with_capacity(dim - 1);
    let mut max_primal: f64 = 0.0;
    let mut max_dual: f64 = 0.0;
    for n in 2..=dim {
        let en = RenormVector::basis(dim, n)?;
        let primal = trimmed_norm(&en)?.value;
        let mut two_en_star = vec![0.0; dim];
        two_en_star[n - 1] = 2.0;
        let dual = trimmed_dual_norm(&RenormVector::new(two_en_star)?)?.value;
        max_primal = max_primal.max((primal - 2.0).abs());
        max_dual = max_dual.max((dual - 2.0).abs());
        rows.push(SuperDeltaRow { n, primal_distance: primal, dual_distance: dual });
    }
    Ok(SuperDeltaReport { rows, max_primal_error: max_primal, max_dual_error: max_dual })
}

#[derive(Debug, Clone)]
pub struct FactCheck {
    pub applicable: bool,
    pub computed: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct MembershipReport {
    /// Some coordinate exceeds one: outside the hull ball.
    pub coordinate_over_one: FactCheck,
    /// First coordinate one with a negative later coordinate: outside the
    /// trimmed ball.
    pub negative_tail: FactCheck,
    /// As a functional: first coordinate over one or a later coordinate
    /// over two places it outside the trimmed dual ball.
    pub dual_over_bounds: FactCheck,
    /// As a functional: first coordinate one with a positive later
    /// coordinate places it outside the trimmed dual ball.
    pub dual_positive_tail: FactCheck,
}

const FACT_MARGIN: f64 = 1e-7;

/// Checks the four exclusion facts for a coordinate vector read both as a
/// point and as a functional. Each applicable hypothesis must force the
/// corresponding computed gauge strictly above one (within the float
/// margin); the forcing witnesses are the basis functionals and the unit
/// spikes.
pub fn membership_facts(v: &RenormVector) -> Result<MembershipReport, RenormError> {
    let c = v.coords();
    let eq_one = |x: f64| (x - 1.0).abs() <= 1e-12;

    let hyp1 = c.iter().any(|&x| x > 1.0 + 1e-12);
    let fact1 = if hyp1 {
        let value = hull_norm(v)?.value;
        FactCheck { applicable: true, computed: value, pass: value > 1.0 + FACT_MARGIN }
    } else {
        FactCheck { applicable: false, computed: 0.0, pass: true }
    };

    let hyp2 = eq_one(c[0]) && c[1..].iter().any(|&x| x < -1e-12);
    let fact2 = if hyp2 {
        let value = trimmed_norm(v)?.value;
        FactCheck { applicable: true, computed: value, pass: value > 1.0 + FACT_MARGIN }
    } else {
        FactCheck { applicable: false, computed: 0.0, pass: true }
    };

    let hyp3 = c[0] > 1.0 + 1e-12 || c[1..].iter().any(|&x| x > 2.0 + 1e-12);
    let fact3 = if hyp3 {
        let value = trimmed_dual_norm(v)?.value;
        FactCheck { applicable: true, computed: value, pass: value > 1.0 + FACT_MARGIN }
    } else {
        FactCheck { applicable: false, computed: 0.0, pass: true }
    };

    let hyp4 = eq_one(c[0]) && c[1..].iter().any(|&x| x > 1e-12);
    let fact4 = if hyp4 {
        let value = trimmed_dual_norm(v)?.value;
        FactCheck { applicable: true, computed: value, pass: value > 1.0 + FACT_MARGIN }
    } else {
        FactCheck { applicable: false, computed: 0.0, pass: true }
    };

    Ok(MembershipReport {
        coordinate_over_one: fact1,
        negative_tail: fact2,
        dual_over_bounds: fact3,
        dual_positive_tail: fact4,
    })
}

/// The generic renorming `max(base(x) / 2, max_n |<f_n, x>|)` over a
/// finite family of functionals, with the equivalence sandwich
/// `base/2 <= value <= K base` asserted on every evaluation.
pub struct MaxFunctionalNorm<B: Fn(&[f64]) -> f64> {
    base: B,
    functionals: Vec<RenormVector>,
    /// Uniform bound on the functional norms relative to the base norm.
    bound: f64,
}

impl MaxFunctionalNorm<fn(&[f64]) -> f64> {
    /// Euclidean base norm; the bound is the largest euclidean norm of
    /// the functionals (at least 1/2 so the sandwich stays valid).
    pub fn euclidean(functionals: Vec<RenormVector>) -> Result<Self, RenormError> {
        if functionals.is_empty() {
            return Err(RenormError::EmptyFunctionals);
        }
        let bound = functionals.iter().map(|f| l2(f.coords())).fold(0.5f64, f64::max);
        Ok(MaxFunctionalNorm { base: l2 as fn(&[f64]) -> f64, functionals, bound })
    }
}

impl<B: Fn(&[f64]) -> f64> MaxFunctionalNorm<B> {
    pub fn with_base(base: B, functionals: Vec<RenormVector>, bound: f64) -> Result<Self, RenormError> {
        if functionals.is_empty() {
            return Err(RenormError::EmptyFunctionals);
        }
        Ok(MaxFunctionalNorm { base, functionals, bound })
    }

    pub fn eval(&self, x: &RenormVector) -> Result<f64, RenormError> {
        let base = (self.base)(x.coords());
        let mut value = base / 2.0;
        for f in &self.functionals {
            if f.dim() != x.dim() {
                return Err(RenormError::DimMismatch(f.dim(), x.dim()));
            }
            value = value.max(dot(f.coords(), x.coords()).abs());
        }
        if value < base / 2.0 * (1.0 - 1e-12) || value > self.bound * base * (1.0 + 1e-12) + 1e-300 {
            return Err(RenormError::Certificate("equivalence sandwich violated".into()));
        }
        Ok(value)
    }
}

/// The slab functionals `e1* - 2 e_n*` over a biorthogonal family, the
/// finite instantiation used by the generic renorming.
pub fn slab_functionals(dim: usize) -> Result<Vec<RenormVector>, RenormError> {
    if dim < 2 {
        return Err(RenormError::DimTooSmall(dim));
    }
    (2..=dim)
        .map(|n| {
            let mut f = vec![0.0; dim];
            f[0] = 1.0;
            f[n - 1] = -2.0;
            RenormVector::new(f)
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct SliceProbeConfig {
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SliceProbeReport {
    pub delta: f64,
    pub pool_size: usize,
    pub members: usize,
    /// Largest observed pairwise trimmed distance inside the slice: a
    /// certified lower bound for the slice diameter. `None` when no pool
    /// member lies in the slice.
    pub estimate: Option<f64>,
}

/// Sampled lower bounds on slice diameters, sharing one candidate pool
/// across all requested slice widths. Pool membership is monotone in the
/// width, so the reported estimates are nonincreasing by construction as
/// the slice shrinks. Candidates combine ball points with atom-hull
/// points, plus the canonical extreme points and the functional direction
/// itself; every candidate is scaled into the trimmed unit ball before
/// membership is tested.
pub fn slice_diameter_probe_multi(
    xstar: &RenormVector,
    deltas: &[f64],
    config: SliceProbeConfig,
) -> Result<Vec<SliceProbeReport>, RenormError> {
    use rand::SeedableRng;
    let fnorm = trimmed_dual_norm(xstar)?;
    if (fnorm.value - 1.0).abs() > 1e-6 {
        return Err(RenormError::NotNormalized(fnorm.value));
    }
    let dim = xstar.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut pool: Vec<Vec<f64>> = Vec::new();
    let push = |cand: Vec<f64>, pool: &mut Vec<Vec<f64>>| -> Result<(), RenormError> {
        if cand.iter().all(|c| *c == 0.0) {
            return Ok(());
        }
        let rv = RenormVector::new(cand.clone())?;
        let (tn, tgap) = trimmed_norm_value(&rv)?;
        let denom = (tn + tgap).max(1e-300);
        let factor = if denom > 1.0 { 1.0 / denom } else { 1.0 };
        pool.push(cand.into_iter().map(|c| c * factor).collect());
        Ok(())
    };

    // Canonical candidates.
    let mut e1 = vec![0.0; dim];
    e1[0] = 1.0;
    push(e1, &mut pool)?;
    for m in 1..dim {
        let mut spike = vec![0.0; dim];
        spike[0] = 1.0;
        spike[m] = 1.0;
        push(spike, &mut pool)?;
    }
    // The functional direction.
    let fn2 = l2(xstar.coords());
    if fn2 > 0.0 {
        push(xstar.coords().iter().map(|c| c / fn2).collect(), &mut pool)?;
    }
    // Structured samples: convex combinations of a ball point and an
    // atom-hull point, with the ball point drawn around the functional
    // direction at a range of spreads.
    let budget = config.samples.max(8);
    while pool.len() < budget {
        let spread = match rng.gen_range(0..4) {
            0 => 0.01,
            1 => 0.1,
            2 => 0.5,
            _ => 2.0,
        };
        let mut y: Vec<f64> = (0..dim)
            .map(|i| xstar.coords()[i] / fn2.max(1e-300) + spread * gaussian(&mut rng))
            .collect();
        let ynorm = l2(&y);
        if ynorm > 0.0 {
            for c in &mut y {
                *c /= ynorm;
            }
        }
        let atoms = rng.gen_range(1..=3usize);
        let mut u = vec![0.0; dim];
        let mut rest = 1.0f64;
        for _ in 0..atoms {
            let m = rng.gen_range(1..dim);
            let w = rest * rng.gen::<f64>();
            rest -= w;
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            u[0] += sign * w;
            u[m] += sign * w;
        }
        let lambda: f64 = match rng.gen_range(0..3) {
            0 => 1.0,
            1 => rng.gen(),
            _ => 1.0 - rng.gen::<f64>() * 0.05,
        };
        let cand: Vec<f64> = (0..dim).map(|i| lambda * y[i] + (1.0 - lambda) * u[i]).collect();
        push(cand, &mut pool)?;
    }

    // Measure pairwise distances once for the widest slice and reuse.
    let mut reports = Vec::with_capacity(deltas.len());
    let pairings: Vec<f64> = pool.iter().map(|v| dot(xstar.coords(), v)).collect();
    for &delta in deltas {
        let members: Vec<usize> =
            (0..pool.len()).filter(|&i| pairings[i] > 1.0 - delta).collect();
        let mut estimate = None;
        for (ai, &i) in members.iter().enumerate() {
            for &j in members.iter().skip(ai + 1) {
                let diff: Vec<f64> =
                    pool[i].iter().zip(&pool[j]).map(|(a, b)| a - b).collect();
                if diff.iter().all(|c| *c == 0.0) {
                    continue;
                }
                let dist = trimmed_norm(&RenormVector::new(diff)?)?.value;
                if estimate.map_or(true, |e| dist > e) {
                    estimate = Some(dist);
                }
            }
        }
        if estimate.is_none() && !members.is_empty() {
            estimate = Some(0.0);
        }
        reports.push(SliceProbeReport {
            delta,
            pool_size: pool.len(),
            members: members.len(),
            estimate,
        });
    }
    Ok(reports)
}

pub fn slice_diameter_probe(
    xstar: &RenormVector,
    delta: f64,
    config: SliceProbeConfig,
) -> Result<SliceProbeReport, RenormError> {
    Ok(slice_diameter_probe_multi(xstar, &[delta], config)?.remove(0))
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; plenty for sampling directions.
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vecn(coords: &[f64]) -> RenormVector {
        RenormVector::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn dual_formula_examples() {
        assert_eq!(hull_dual_norm(&vecn(&[1.0, 0.0, 0.0])), 1.0);
        assert_eq!(hull_dual_norm(&vecn(&[1.0, 1.0, 0.0])), 2.0);
        let v = vecn(&[-1.0, 1.0, 0.0]);
        assert!((hull_dual_norm(&v) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hull_norm_unit_vectors() {
        let one = hull_norm(&vecn(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!((one.value - 1.0).abs() < 1e-9);
        assert!(one.gap < 1e-7);

        let spike = hull_norm(&vecn(&[1.0, 1.0, 0.0, 0.0])).unwrap();
        assert!((spike.value - 1.0).abs() < 1e-9, "spike norm {}", spike.value);
        assert!(spike.gap < 1e-7);

        let zero = hull_norm(&vecn(&[0.0, 0.0, 0.0])).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn trimmed_norm_paper_values() {
        assert!((trimmed_norm(&vecn(&[1.0, 0.0, 0.0])).unwrap().value - 1.0).abs() < 1e-9);
        assert!((trimmed_norm(&vecn(&[0.0, 1.0, 0.0])).unwrap().value - 2.0).abs() < 1e-12);
        assert!((trimmed_norm(&vecn(&[1.0, 0.0, 1.0])).unwrap().value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn trimmed_dual_values() {
        let slab = trimmed_dual_norm(&vecn(&[1.0, -2.0, 0.0])).unwrap();
        assert!((slab.value - 1.0).abs() < 1e-8, "slab dual {}", slab.value);
        let en = trimmed_dual_norm(&vecn(&[0.0, 1.0, 0.0])).unwrap();
        assert!((en.value - 1.0).abs() < 1e-8, "basis dual {}", en.value);
        let zero = trimmed_dual_norm(&vecn(&[0.0, 0.0])).unwrap();
        assert_eq!(zero.value, 0.0);
        let e1 = trimmed_dual_norm(&vecn(&[1.0, 0.0, 0.0])).unwrap();
        assert!((e1.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gauge_agrees_with_low_dim_oracles() {
        use crate::bruteforce::{hull_gauge_2d_exact, hull_gauge_grid, trimmed_dual_gauge_grid};
        let samples2 = [[0.7, 0.2], [1.0, 1.0], [0.5, -0.8], [2.0, 0.3], [-1.0, 0.4]];
        for s in samples2 {
            let got = hull_norm(&vecn(&s)).unwrap().value;
            assert!((got - hull_gauge_2d_exact(&s)).abs() < 1e-7, "{s:?}");
            let dual_got = trimmed_dual_norm(&vecn(&s)).unwrap().value;
            let dual_oracle = trimmed_dual_gauge_grid(&s);
            assert!((dual_got - dual_oracle).abs() < 1e-5, "{s:?}: {dual_got} vs {dual_oracle}");
        }
        let samples3 = [[0.7, 0.2, -0.1], [1.0, 1.0, 1.0], [0.4, -0.9, 0.3]];
        for s in samples3 {
            let got = hull_norm(&vecn(&s)).unwrap().value;
            assert!((got - hull_gauge_grid(&s)).abs() < 1e-6, "{s:?}");
            let dual_got = trimmed_dual_norm(&vecn(&s)).unwrap().value;
            let dual_oracle = trimmed_dual_gauge_grid(&s);
            assert!((dual_got - dual_oracle).abs() < 1e-5, "{s:?}: {dual_got} vs {dual_oracle}");
        }
    }

    #[test]
    fn exposed_pair_small() {
        let rep = exposed_pair(1, 20).unwrap();
        assert_eq!(rep.pairing, rat_int(1));
        assert_eq!(rep.dist_sq, rat(2, 1));
        assert!((rep.trimmed_norm_x.value - 1.0).abs() < 1e-7);
        assert!((rep.trimmed_dual_xstar.value - 1.0).abs() < 1e-7);
        assert!(exposed_pair(1, 10).is_err());
    }

    #[test]
    fn super_delta_distances() {
        let rep = super_delta_witness(6).unwrap();
        assert!(rep.max_primal_error < 1e-9);
        assert!(rep.max_dual_error < 1e-7);
    }

    #[test]
    fn membership_fact_examples() {
        // v1 = 1 with a negative tail coordinate: slab pushes it out.
        let rep = membership_facts(&vecn(&[1.0, -0.1, 0.0])).unwrap();
        assert!(rep.negative_tail.applicable && rep.negative_tail.pass);
        assert!((rep.negative_tail.computed - 1.2).abs() < 1e-9);

        // Some coordinate beyond one leaves the hull ball.
        let rep = membership_facts(&vecn(&[0.0, 1.1, 0.0])).unwrap();
        assert!(rep.coordinate_over_one.applicable && rep.coordinate_over_one.pass);

        // Functional with first coordinate one and positive tail.
        let rep = membership_facts(&vecn(&[1.0, 0.1, 0.0])).unwrap();
        assert!(rep.dual_positive_tail.applicable && rep.dual_positive_tail.pass);

        // Inside everything: no fact applies.
        let rep = membership_facts(&vecn(&[0.3, 0.2, 0.1])).unwrap();
        assert!(!rep.coordinate_over_one.applicable);
        assert!(!rep.negative_tail.applicable);
        assert!(!rep.dual_over_bounds.applicable);
        assert!(!rep.dual_positive_tail.applicable);
    }

    #[test]
    fn generic_renorm_values() {
        let dim = 6;
        let norm = MaxFunctionalNorm::euclidean(slab_functionals(dim).unwrap()).unwrap();
        let e1 = RenormVector::basis(dim, 1).unwrap();
        assert!((norm.eval(&e1).unwrap() - 1.0).abs() < 1e-12);
        for n in 2..=dim {
            let en = RenormVector::basis(dim, n).unwrap();
            assert!((norm.eval(&en).unwrap() - 2.0).abs() < 1e-12);
            let spike = e1.axpy(1.0, &en).unwrap();
            assert!((norm.eval(&spike).unwrap() - 1.0).abs() < 1e-12);
            // Homogeneity.
            let double = spike.axpy(1.0, &spike).unwrap();
            assert!((norm.eval(&double).unwrap() - 2.0).abs() < 1e-12);
        }
        // All-zero functionals degenerate to half the base norm.
        let zeros = vec![RenormVector::new(vec![0.0; dim]).unwrap()];
        let half = MaxFunctionalNorm::euclidean(zeros).unwrap();
        assert!((half.eval(&e1).unwrap() - 0.5).abs() < 1e-12);
        assert!(MaxFunctionalNorm::euclidean(vec![]).is_err());
    }

    #[test]
    fn slice_probe_e1_star_contains_distance_two_pair() {
        let dim = 8;
        let e1s = RenormVector::basis(dim, 1).unwrap();
        let rep =
            slice_diameter_probe(&e1s, 1e-3, SliceProbeConfig { samples: 16, seed: 5 }).unwrap();
        assert!(rep.members >= 2);
        assert!(rep.estimate.unwrap() >= 2.0 - 1e-6);
    }

    #[test]
    fn slice_probe_monotone_for_exposing_functional() {
        let rep = exposed_pair(1, 20).unwrap();
        let reports = slice_diameter_probe_multi(
            &rep.xstar,
            &[1e-1, 1e-2, 1e-3, 1e-4],
            SliceProbeConfig { samples: 48, seed: 11 },
        )
        .unwrap();
        let mut last = f64::INFINITY;
        for r in &reports {
            let est = r.estimate.unwrap_or(0.0);
            assert!(est <= last + 1e-12);
            last = est;
        }
        // The exposed point itself always lies in the slice.
        assert!(reports.iter().all(|r| r.members >= 1));
    }

    #[test]
    fn whole_ball_probe_with_trivial_width() {
        let dim = 6;
        let e1s = RenormVector::basis(dim, 1).unwrap();
        let rep =
            slice_diameter_probe(&e1s, 2.0, SliceProbeConfig { samples: 32, seed: 3 }).unwrap();
        // Width 2 admits most of the pool; the estimate reaches the
        // distance-two pair.
        assert!(rep.estimate.unwrap() >= 2.0 - 1e-6);
    }
}
