//! Algebraic-family side of the switching formula.
//!
//! Given a Kuranishi model `(V, W)` the pure invariant reduces to
//! `c_{dimB+q}(W - V)`; the reduction runs through the projective bundle
//! `P(V)` where `q_*(c_1(H)^k) = s_{k-rank V+1}(V)`. The remaining helpers
//! are the integer bookkeeping used by the local-contribution analysis.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactring::{GradedClass, Ring};
use crate::kcalc::{BundleSymbol, ChernModel, KClass};

/// Whether the excess dimension in the rank relation is the geometric genus
/// or the formal excess base dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Excess {
    GeometricGenus,
    Febd,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyData {
    pub dim_b: u32,
    pub q: u32,
    pub pg: u32,
    pub febd: u32,
    /// `C·C`
    pub selfint: i64,
    /// `C·K_{X/B}`
    pub kpair: i64,
    pub excess: Excess,
}

impl FamilyData {
    pub fn new(dim_b: u32, q: u32, pg: u32, febd: u32, selfint: i64, kpair: i64) -> Result<Self> {
        if febd > pg {
            return Err(Error::Precondition(format!(
                "febd = {febd} exceeds p_g = {pg}"
            )));
        }
        let excess = if pg > 0 {
            Excess::Febd
        } else {
            Excess::GeometricGenus
        };
        Ok(Self {
            dim_b,
            q,
            pg,
            febd,
            selfint,
            kpair,
            excess,
        })
    }

    pub fn with_excess(mut self, excess: Excess) -> Self {
        self.excess = excess;
        self
    }

    fn excess_value(&self) -> i64 {
        match self.excess {
            Excess::GeometricGenus => i64::from(self.pg),
            Excess::Febd => i64::from(self.febd),
        }
    }

    /// `(C² - C·K)/2`.
    pub fn half_adjunction(&self) -> Result<i64> {
        let num = self.selfint - self.kpair;
        if num % 2 != 0 {
            return Err(Error::Parity(format!("C² - C·K = {num} is odd")));
        }
        Ok(num / 2)
    }

    /// `dim_C B + q`, the degree of the pure invariant.
    pub fn target_degree(&self) -> i64 {
        i64::from(self.dim_b) + i64::from(self.q)
    }
}

#[derive(Debug, Clone)]
pub struct KuranishiModel {
    pub v: BundleSymbol,
    pub w: BundleSymbol,
}

impl KuranishiModel {
    pub fn new(v: BundleSymbol, w: BundleSymbol) -> Self {
        Self { v, w }
    }

    /// Checks `rank V - rank W = (C² - C·K)/2 + excess - q + 1`.
    pub fn check_rank_relation(&self, fam: &FamilyData) -> Result<()> {
        let lhs = i64::from(self.v.rank()) - i64::from(self.w.rank());
        let rhs = fam.half_adjunction()? + fam.excess_value() - i64::from(fam.q) + 1;
        if lhs != rhs {
            return Err(Error::Precondition(format!(
                "rank V - rank W = {lhs} but (C²-C·K)/2 + excess - q + 1 = {rhs}"
            )));
        }
        Ok(())
    }

    fn ring(&self) -> Result<Ring> {
        for s in [&self.v, &self.w] {
            if let ChernModel::Roots(v) | ChernModel::Formal(v) = s.model() {
                if let Some(c) = v.first() {
                    return Ok(c.ring().clone());
                }
            }
        }
        Err(Error::MissingChernData("Kuranishi model".into()))
    }
}

/// `q_*(c_1(H)^k ∩ [P(V)]) = s_{k - rank V + 1}(V)`, zero for negative
/// index.
pub fn pushforward_power(k: u32, v: &BundleSymbol, ring: &Ring) -> Result<GradedClass> {
    let idx = i64::from(k) - i64::from(v.rank()) + 1;
    if idx < 0 {
        return Ok(ring.zero());
    }
    Ok(KClass::from_symbol(v.clone())
        .total_segre(ring)?
        .grade_or_zero(idx))
}

/// `c_{dimB+q}(W - V)`.
pub fn afsw_pure(model: &KuranishiModel, fam: &FamilyData) -> Result<GradedClass> {
    afsw_with_shift(model, fam, 0)
}

/// `η ∩ c_{dimB+q-deg η}(W - V)` for homogeneous `η`.
pub fn afsw_mixed(
    model: &KuranishiModel,
    fam: &FamilyData,
    eta: &GradedClass,
) -> Result<GradedClass> {
    let g = insertion_degree(eta)?;
    afsw_with_shift(model, fam, g)?.mul(eta)
}

fn insertion_degree(eta: &GradedClass) -> Result<u32> {
    eta.homogeneous_degree().ok_or_else(|| {
        Error::Precondition(format!("insertion `{eta}` is not homogeneous and nonzero"))
    })
}

fn afsw_with_shift(model: &KuranishiModel, fam: &FamilyData, shift: u32) -> Result<GradedClass> {
    model.check_rank_relation(fam)?;
    let ring = model.ring()?;
    let diff = KClass::from_symbol(model.w.clone()).sub(&KClass::from_symbol(model.v.clone()));
    Ok(diff
        .total_chern(&ring)?
        .grade_or_zero(fam.target_degree() - i64::from(shift)))
}

/// Reproduces the pushforward chain through `P(V)`:
///
/// ```text
/// Σ_{j=0}^{rank W} q_*(c_1(H)^{e+j}) · c_{rank W - j}(W),
///     e = (C²-C·K)/2 + dimB + excess
/// ```
///
/// and compares it with [`afsw_pure`].
pub fn verify_cal_chain(model: &KuranishiModel, fam: &FamilyData) -> Result<bool> {
    let direct = afsw_pure(model, fam)?;
    Ok(cal_chain(model, fam, 0)? == direct)
}

/// As [`verify_cal_chain`] with an insertion `η`, which lowers the base
/// dimension by `deg η`.
pub fn verify_cal_chain_mixed(
    model: &KuranishiModel,
    fam: &FamilyData,
    eta: &GradedClass,
) -> Result<bool> {
    let g = insertion_degree(eta)?;
    let direct = afsw_mixed(model, fam, eta)?;
    Ok(cal_chain(model, fam, g)?.mul(eta)? == direct)
}

fn cal_chain(model: &KuranishiModel, fam: &FamilyData, shift: u32) -> Result<GradedClass> {
    model.check_rank_relation(fam)?;
    let ring = model.ring()?;
    let e = fam.half_adjunction()? + i64::from(fam.dim_b) - i64::from(shift) + fam.excess_value();
    let c_w = KClass::from_symbol(model.w.clone()).total_chern(&ring)?;
    let rank_w = i64::from(model.w.rank());
    let mut total = ring.zero();
    for j in 0..=rank_w {
        let power = e + j;
        if power < 0 {
            continue;
        }
        let pushed = pushforward_power(power as u32, &model.v, &ring)?;
        total = total.add(&pushed.mul(&c_w.grade_or_zero(rank_w - j))?)?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KStepClass {
    R0,
    #[serde(rename = "ZERO_TERM")]
    ZeroTerm,
    #[serde(rename = "R1_NEG")]
    R1Neg,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KStep {
    pub p: u32,
    pub degree: i64,
    pub class: KStepClass,
    pub rank: u32,
}

impl KStep {
    pub fn signed_rank(&self) -> i64 {
        match self.class {
            KStepClass::R0 => i64::from(self.rank),
            KStepClass::ZeroTerm => 0,
            KStepClass::R1Neg => -i64::from(self.rank),
        }
    }
}

/// Classifies each `O_C(C + p·PD(C))` pushforward by its fiber degree:
/// `R⁰` of rank `deg+1` for `deg >= 0`, zero for `deg = -1`, and `-R¹` of
/// rank `-deg-1` below that.
pub fn decompose_ksteps(degs: &[i64]) -> Vec<KStep> {
    degs.iter()
        .enumerate()
        .map(|(i, &degree)| {
            let (class, rank) = match degree {
                d if d >= 0 => (KStepClass::R0, d + 1),
                -1 => (KStepClass::ZeroTerm, 0),
                d => (KStepClass::R1Neg, -d - 1),
            };
            KStep {
                p: i as u32 + 1,
                degree,
                class,
                rank: rank as u32,
            }
        })
        .collect()
}

pub fn ksteps_virtual_rank(steps: &[KStep]) -> i64 {
    steps.iter().map(KStep::signed_rank).sum()
}

/// Numerical data of a class for the AF inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassData {
    pub selfint: i64,
    pub kpair: i64,
    pub febd: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AfConditions {
    pub af1: bool,
    pub af2: bool,
    /// `febd(C) <= febd(C + k·PD(C))`.
    pub febd_monotone: bool,
    /// When `p_g > 0` the two excess dimensions must agree.
    pub febd_equal_when_pg: bool,
}

/// Evaluates `(D·D - D·K)/2 + dimB + febd(D) >= 0` for `D = C` and
/// `D = C + k·PD(C)`.
pub fn af_conditions(dim_b: u32, pg: u32, c: &ClassData, shifted: &ClassData) -> AfConditions {
    let holds =
        |d: &ClassData| (d.selfint - d.kpair) + 2 * (i64::from(dim_b) + i64::from(d.febd)) >= 0;
    AfConditions {
        af1: holds(c),
        af2: holds(shifted),
        febd_monotone: c.febd <= shifted.febd,
        febd_equal_when_pg: pg == 0 || c.febd == shifted.febd,
    }
}

/// The strict dimension drop `dim(C) - [dim(C - e) + dim(e)] = e·C - e²`
/// that forces a local contribution to vanish.
pub fn prop_zero_gap(e_sq: i64, e_dot_k: i64, e_dot_c: i64) -> Result<i64> {
    let _ = e_dot_k;
    let gap = e_dot_c - e_sq;
    if gap <= 0 {
        return Err(Error::Precondition(format!(
            "need e·C > e², got e·C = {e_dot_c}, e² = {e_sq}"
        )));
    }
    Ok(gap)
}

/// Dimension count behind [`prop_zero_gap`], for cross-checking: expected
/// dimension `(D² - D·K)/2` of `C`, `C - e` and `e`.
pub fn dimension_gap_by_expansion(
    c_sq: i64,
    c_dot_k: i64,
    e_sq: i64,
    e_dot_k: i64,
    e_dot_c: i64,
) -> i64 {
    let dim = |sq: i64, dk: i64| (sq - dk) / 2;
    let ce_sq = c_sq - 2 * e_dot_c + e_sq;
    let ce_dk = c_dot_k - e_dot_k;
    dim(c_sq, c_dot_k) - (dim(ce_sq, ce_dk) + dim(e_sq, e_dot_k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepIvRange {
    pub lower: i64,
    pub upper_dim: i64,
}

/// Summation window of the localized contribution: starts at
/// `rank G - rank N` and runs up to `dim X' = m - rank N`.
pub fn step_iv_ranges(m: i64, e: i64, rank_n: i64, rank_g: i64) -> StepIvRange {
    let _ = e;
    StepIvRange {
        lower: rank_g - rank_n,
        upper_dim: m - rank_n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ResidueBranch {
    First,
    Second,
}

/// Relative degree `|(M(E)E + e_i)·e_i|` and which branch of the residue
/// sequence applies.
pub fn residue_degree(me_plus_e_dot_e: i64) -> (i64, ResidueBranch) {
    if me_plus_e_dot_e >= 0 {
        (me_plus_e_dot_e, ResidueBranch::First)
    } else {
        (-me_plus_e_dot_e, ResidueBranch::Second)
    }
}

/// Degrees `r >= 1` at which `{c ∩ s}_{m-e-r}` fails to vanish. An empty
/// result means the supplied data satisfies the grading constraint.
pub fn grading_window_violations(
    c: &GradedClass,
    s: &GradedClass,
    m: i64,
    e: i64,
) -> Result<Vec<i64>> {
    let prod = c.mul(s)?;
    let mut out = Vec::new();
    let mut r = 1;
    while m - e - r >= 0 {
        if !prod.grade_or_zero(m - e - r).is_zero() {
            out.push(r);
        }
        r += 1;
    }
    Ok(out)
}

/// Additivity of localized classes over a disjoint decomposition: the
/// degree-`d` piece of the combined data equals the sum of the pieces.
pub fn additivity_check(pairs: &[(GradedClass, GradedClass)], degree: i64) -> Result<bool> {
    let Some((first, _)) = pairs.first() else {
        return Ok(true);
    };
    let ring = first.ring();
    let mut piecewise = ring.zero();
    let mut combined = ring.zero();
    for (c, s) in pairs {
        let prod = c.mul(s)?;
        piecewise = piecewise.add(&prod.grade_or_zero(degree))?;
        combined = combined.add(&prod)?;
    }
    Ok(piecewise == combined.grade_or_zero(degree))
}
