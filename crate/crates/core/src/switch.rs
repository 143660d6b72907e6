//! Smooth-category switching engine for a `-n` rational curve.
//!
//! Switching the determinant line from `L` to `L_k = L + 2k·PD(C)` passes
//! through `k` steps. Step `p` compares moduli dimensions of `L_{p-1}` and
//! `L_p`; the difference `delta = m - (2p-1)n` decides whether the step
//! contributes a kernel piece (`R⁰`, `delta > 0`), an obstruction piece
//! (`R¹`, `delta < 0`) or nothing. The relative obstruction bundle is
//!
//! ```text
//! V_{1→k} = ⊕_{delta<0} V_p ⊖ ⊕_{delta>0} V_p,   rank V_p = |delta|/2
//! ```
//!
//! When `C ≅ P(U)` for a rank-2 bundle `U` the pieces become symmetric
//! powers of `U` or `U*` twisted by `√L₀`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactring::{GradedClass, Ring};
use crate::kcalc::{k_equal, sym_power, BundleSymbol, KClass, Twist};

/// Base data for the projectivized case `C ≅ P(U)`.
#[derive(Debug, Clone)]
pub struct BaseData {
    pub ring: Ring,
    pub u: BundleSymbol,
    pub l0: Twist,
}

impl BaseData {
    /// Ring `Q[c1, c2, l]/(deg > D)` with `U` formal of Chern classes
    /// `c1, c2` and `√L₀` a line with first Chern class `l`.
    pub fn standard(truncation: u32) -> Result<Self> {
        let ring = Ring::with_generators(&[("c1", 1), ("c2", 2), ("l", 1)], truncation)?;
        let u = BundleSymbol::formal_from_generators("U", &ring, "c", 2)?;
        let l0 = Twist::line("√L0", ring.gen("l")?)?;
        Ok(Self { ring, u, l0 })
    }

    pub fn new(ring: Ring, u: BundleSymbol, l0: Twist) -> Result<Self> {
        if u.rank() != 2 {
            return Err(Error::RankMismatch {
                name: u.name().to_string(),
                rank: u.rank(),
                expected: 2,
            });
        }
        Ok(Self { ring, u, l0 })
    }
}

#[derive(Debug, Clone)]
pub struct SwitchProblem {
    m: i64,
    n: i64,
    k: u32,
    base: Option<BaseData>,
}

fn check_parity(m: i64, n: i64) -> Result<()> {
    if (m + n).rem_euclid(2) != 0 {
        return Err(Error::Parity(format!("m + n = {} must be even", m + n)));
    }
    Ok(())
}

impl SwitchProblem {
    pub fn new(m: i64, n: i64, k: u32) -> Result<Self> {
        check_parity(m, n)?;
        if n < 1 {
            return Err(Error::Precondition(format!("n = {n} must be positive")));
        }
        if k < 1 {
            return Err(Error::Precondition("k must be positive".into()));
        }
        Ok(Self {
            m,
            n,
            k,
            base: None,
        })
    }

    pub fn with_base(mut self, base: BaseData) -> Self {
        self.base = Some(base);
        self
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn base(&self) -> Option<&BaseData> {
        self.base.as_ref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StepKind {
    R0,
    #[serde(rename = "ZERO")]
    Zero,
    R1,
}

impl StepKind {
    fn of_delta(delta: i64) -> Self {
        match delta.signum() {
            1 => StepKind::R0,
            0 => StepKind::Zero,
            _ => StepKind::R1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub p: u32,
    pub delta: i64,
    pub kind: StepKind,
    pub piece_rank: u32,
    pub sym_exponent: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct SwitchReport {
    pub m: i64,
    pub n: i64,
    pub k: u32,
    pub steps: Vec<StepRecord>,
    /// `V_{1→k}` as rank-only pieces keyed by the power of `N_C`.
    pub v_class: KClass,
    pub virtual_rank: i64,
    /// The symmetric-power class with kernel pieces positive; equals
    /// `-V_{1→k}`. Present when base data was supplied.
    pub sym_class: Option<KClass>,
    pub chern_of_v: Option<GradedClass>,
    pub segre_of_v: Option<GradedClass>,
    pub ring: Option<Ring>,
}

/// `m - (2p-1)n`.
pub fn expected_dim_delta(m: i64, n: i64, p: u32) -> Result<i64> {
    check_parity(m, n)?;
    if n < 1 || p < 1 {
        return Err(Error::Precondition(format!(
            "need n >= 1 and p >= 1, got n = {n}, p = {p}"
        )));
    }
    Ok(m - (2 * i64::from(p) - 1) * n)
}

fn sym_exponent(m: i64, n: i64, p: u32, kind: StepKind) -> Result<Option<u32>> {
    let half = (m + n) / 2;
    let pn = i64::from(p) * n;
    let e = match kind {
        StepKind::R0 => half - pn - 1,
        StepKind::R1 => -half + pn - 1,
        StepKind::Zero => return Ok(None),
    };
    if e < 0 {
        return Err(Error::Inconsistent(format!(
            "negative symmetric-power exponent {e} at step {p}"
        )));
    }
    Ok(Some(e as u32))
}

fn piece_symbol(kind: StepKind, power: u32, rank: u32) -> BundleSymbol {
    let r = match kind {
        StepKind::R0 => 0,
        _ => 1,
    };
    BundleSymbol::rank_only(format!("R{r}π*(N^{power}⊗P)"), rank)
}

/// Pieces of the switch `L_shift → L_{shift+k}` written relative to the
/// spin-c structure `L` of fiber degree `m`: step `p` of that switch is the
/// `N^{p+shift}⊗P` piece.
fn obstruction_pieces(m: i64, n: i64, k: u32, shift: u32) -> Result<(Vec<StepRecord>, KClass)> {
    let m_shifted = m - 2 * i64::from(shift) * n;
    let mut steps = Vec::with_capacity(k as usize);
    let mut v = KClass::zero();
    for p in 1..=k {
        let delta = expected_dim_delta(m_shifted, n, p)?;
        let kind = StepKind::of_delta(delta);
        let piece_rank = (delta.unsigned_abs() / 2) as u32;
        let mult = match kind {
            StepKind::R1 => 1,
            StepKind::R0 => -1,
            StepKind::Zero => 0,
        };
        if mult != 0 {
            v = v.add(&KClass::from_term(
                piece_symbol(kind, p + shift, piece_rank),
                Twist::trivial(),
                mult,
            ));
        }
        steps.push(StepRecord {
            p,
            delta,
            kind,
            piece_rank,
            sym_exponent: None,
        });
    }
    Ok((steps, v))
}

/// Runs the per-step classification and assembles `V_{1→k}`.
pub fn analyze(problem: &SwitchProblem) -> Result<SwitchReport> {
    let (m, n, k) = (problem.m, problem.n, problem.k);
    let (mut steps, v_class) = obstruction_pieces(m, n, k, 0)?;
    let virtual_rank = v_class.rank();
    let expected = (i64::from(k) * i64::from(k) * n - i64::from(k) * m) / 2;
    if virtual_rank != expected {
        return Err(Error::Inconsistent(format!(
            "virtual rank {virtual_rank} differs from (k²n - km)/2 = {expected}"
        )));
    }
    let mut report = SwitchReport {
        m,
        n,
        k,
        steps: Vec::new(),
        v_class,
        virtual_rank,
        sym_class: None,
        chern_of_v: None,
        segre_of_v: None,
        ring: None,
    };
    if let Some(base) = &problem.base {
        for s in &mut steps {
            s.sym_exponent = sym_exponent(m, n, s.p, s.kind)?;
        }
        let sym = sym_class(base, &decompose_sym(problem)?)?;
        if sym.rank() != -virtual_rank {
            return Err(Error::Inconsistent(format!(
                "symmetric-power class has rank {}, expected {}",
                sym.rank(),
                -virtual_rank
            )));
        }
        report.chern_of_v = Some(sym.total_segre(&base.ring)?);
        report.segre_of_v = Some(sym.total_chern(&base.ring)?);
        report.sym_class = Some(sym);
        report.ring = Some(base.ring.clone());
    }
    report.steps = steps;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymTerm {
    pub p: u32,
    /// `+1` for kernel pieces, `-1` for obstruction pieces.
    pub sign: i64,
    pub exponent: u32,
    /// Whether the power is of `U*` rather than `U`.
    pub dual: bool,
}

impl SymTerm {
    pub fn rank(&self) -> u32 {
        self.exponent + 1
    }
}

impl fmt::Display for SymTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.sign > 0 { '+' } else { '-' };
        let u = if self.dual { "U*" } else { "U" };
        write!(f, "{sign}S^{}({u})⊗√L0", self.exponent)
    }
}

/// Symmetric-power form of each nonzero step:
/// `+S^{(m+n)/2-pn-1}(U)` for `delta > 0`, `-S^{-(m+n)/2+pn-1}(U*)` for
/// `delta < 0`, all twisted by `√L₀`.
pub fn decompose_sym(problem: &SwitchProblem) -> Result<Vec<SymTerm>> {
    let (m, n) = (problem.m, problem.n);
    let mut out = Vec::new();
    for p in 1..=problem.k {
        let kind = StepKind::of_delta(expected_dim_delta(m, n, p)?);
        if let Some(exponent) = sym_exponent(m, n, p, kind)? {
            out.push(SymTerm {
                p,
                sign: if kind == StepKind::R0 { 1 } else { -1 },
                exponent,
                dual: kind == StepKind::R1,
            });
        }
    }
    Ok(out)
}

/// Assembles `Σ sign · S^d(U or U*) ⊗ √L₀` from [`decompose_sym`] output.
pub fn sym_class(base: &BaseData, terms: &[SymTerm]) -> Result<KClass> {
    let u_dual = base.u.dual();
    let mut out = KClass::zero();
    for t in terms {
        let u = if t.dual { &u_dual } else { &base.u };
        let piece = sym_power(u, t.exponent)?.tensor_line(&base.l0)?;
        out = out.add(&piece.scale(t.sign));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FswTarget {
    /// `FSW(·, L)`
    L,
    /// `FSW(·, L_k)`
    Lk,
}

impl fmt::Display for FswTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FswTarget::L => write!(f, "FSW(·, L)"),
            FswTarget::Lk => write!(f, "FSW(·, L_k)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionTerm {
    pub index: u32,
    pub coefficient: GradedClass,
    pub target: FswTarget,
}

fn expand(
    total: &GradedClass,
    insertion: &GradedClass,
    target: FswTarget,
) -> Result<Vec<ExpansionTerm>> {
    let d = total.ring().truncation();
    let mut out = Vec::new();
    for i in 0..=d {
        let coefficient = total.grade(i64::from(i))?.mul(insertion)?;
        if !coefficient.is_zero() {
            out.push(ExpansionTerm {
                index: i,
                coefficient,
                target,
            });
        }
    }
    Ok(out)
}

/// `FSW(c, L_k) = Σ_i FSW(c_i(V) ∪ c, L)`, as formal coefficients.
pub fn expand_switch(report: &SwitchReport, insertion: &GradedClass) -> Result<Vec<ExpansionTerm>> {
    let c = report
        .chern_of_v
        .as_ref()
        .ok_or_else(|| Error::MissingBase("Chern classes of V need base data".into()))?;
    expand(c, insertion, FswTarget::L)
}

/// `FSW(c, L) = Σ_j FSW(s_j(V) ∪ c, L_k)`, as formal coefficients.
pub fn expand_inverse(
    report: &SwitchReport,
    insertion: &GradedClass,
) -> Result<Vec<ExpansionTerm>> {
    let s = report
        .segre_of_v
        .as_ref()
        .ok_or_else(|| Error::MissingBase("Segre classes of V need base data".into()))?;
    expand(s, insertion, FswTarget::Lk)
}

/// Substitutes [`expand_inverse`] into every term of [`expand_switch`] and
/// collects the resulting `FSW(·, L_k)` coefficient.
pub fn roundtrip(report: &SwitchReport, insertion: &GradedClass) -> Result<GradedClass> {
    let mut total = insertion.ring().zero();
    for term in expand_switch(report, insertion)? {
        for inner in expand_inverse(report, &term.coefficient)? {
            total = total.add(&inner.coefficient)?;
        }
    }
    Ok(total)
}

/// Checks `V_{1,2} ⊕ V_{2,3} = V_{1,3}` for consecutive switches by `k1`
/// then `k2`, matching pieces through `N^i ⊗ P_{2,3} = N^{i+k1} ⊗ P_{1,3}`.
pub fn check_consistency(m: i64, n: i64, k1: u32, k2: u32) -> Result<bool> {
    check_parity(m, n)?;
    let (_, v12) = obstruction_pieces(m, n, k1, 0)?;
    let (_, v23) = obstruction_pieces(m, n, k2, k1)?;
    let (_, v13) = obstruction_pieces(m, n, k1 + k2, 0)?;
    Ok(k_equal(&v12.add(&v23), &v13))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GtRankCheck {
    pub lhs: i64,
    pub rhs: i64,
    pub equal: bool,
}

/// Compares the virtual rank with the alternative representation
/// `Σ_i (R¹π_*(N^i) + S^{-q-1}(C ⊕ N_s^{-1}) ⊗ N^i|_s) ⊗ Q`, valid for
/// `q = (m+n-2)/2 < 0`.
pub fn gt_rank_check(m: i64, n: i64, k: u32) -> Result<GtRankCheck> {
    check_parity(m, n)?;
    let q = (m + n - 2) / 2;
    if q >= 0 {
        return Err(Error::Precondition(format!(
            "deg P = (m+n-2)/2 = {q} must be negative"
        )));
    }
    let lhs = analyze(&SwitchProblem::new(m, n, k)?)?.virtual_rank;
    // N^i has degree -in on each fiber, so h¹ = in - 1; S^{-q-1} of a
    // rank-2 bundle has rank -q.
    let rhs = (1..=i64::from(k)).map(|i| (i * n - 1) + (-q)).sum();
    Ok(GtRankCheck {
        lhs,
        rhs,
        equal: lhs == rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_examples() {
        assert_eq!(expected_dim_delta(4, 2, 1).unwrap(), 2);
        assert_eq!(expected_dim_delta(4, 2, 2).unwrap(), -2);
        assert_eq!(expected_dim_delta(3, 3, 1).unwrap(), 0);
        assert!(matches!(expected_dim_delta(3, 2, 1), Err(Error::Parity(_))));
    }

    fn summary(r: &SwitchReport) -> Vec<(StepKind, u32)> {
        r.steps.iter().map(|s| (s.kind, s.piece_rank)).collect()
    }

    #[test]
    fn analyze_examples() {
        let r = analyze(&SwitchProblem::new(4, 2, 3).unwrap()).unwrap();
        assert_eq!(
            summary(&r),
            vec![(StepKind::R0, 1), (StepKind::R1, 1), (StepKind::R1, 3)]
        );
        assert_eq!(r.virtual_rank, 3);

        let r = analyze(&SwitchProblem::new(-2, 2, 2).unwrap()).unwrap();
        assert_eq!(summary(&r), vec![(StepKind::R1, 2), (StepKind::R1, 4)]);
        assert_eq!(r.virtual_rank, 6);

        let r = analyze(&SwitchProblem::new(3, 3, 1).unwrap()).unwrap();
        assert_eq!(summary(&r), vec![(StepKind::Zero, 0)]);
        assert_eq!(r.virtual_rank, 0);
        assert!(r.v_class.is_zero());

        assert!(matches!(SwitchProblem::new(3, 2, 1), Err(Error::Parity(_))));
    }

    #[test]
    fn decompose_examples() {
        let terms = decompose_sym(&SwitchProblem::new(4, 2, 3).unwrap()).unwrap();
        let shown: Vec<String> = terms.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["+S^0(U)⊗√L0", "-S^0(U*)⊗√L0", "-S^2(U*)⊗√L0"]);

        let terms = decompose_sym(&SwitchProblem::new(-2, 2, 2).unwrap()).unwrap();
        let shown: Vec<String> = terms.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["-S^1(U*)⊗√L0", "-S^3(U*)⊗√L0"]);

        assert!(decompose_sym(&SwitchProblem::new(2, 2, 1).unwrap())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn base_report_carries_chern_data() {
        let base = BaseData::standard(4).unwrap();
        let r = analyze(&SwitchProblem::new(4, 2, 3).unwrap().with_base(base)).unwrap();
        let exps: Vec<_> = r.steps.iter().map(|s| s.sym_exponent).collect();
        assert_eq!(exps, vec![Some(0), Some(0), Some(2)]);
        assert_eq!(r.sym_class.as_ref().unwrap().rank(), -3);
        let c = r.chern_of_v.as_ref().unwrap();
        let s = r.segre_of_v.as_ref().unwrap();
        assert!(c.mul(s).unwrap().is_one());
    }

    #[test]
    fn expansions() {
        let base = BaseData::standard(3).unwrap();
        let ring = base.ring.clone();
        let trivial =
            analyze(&SwitchProblem::new(2, 2, 1).unwrap().with_base(base.clone())).unwrap();
        let e = expand_switch(&trivial, &ring.one()).unwrap();
        assert_eq!(e.len(), 1);
        assert!(e[0].coefficient.is_one());
        assert_eq!(e[0].target, FswTarget::L);

        // single obstruction line S^0(U*) ⊗ √L0 with c1 = l
        let line = analyze(&SwitchProblem::new(0, 2, 1).unwrap().with_base(base.clone())).unwrap();
        let e = expand_switch(&line, &ring.one()).unwrap();
        let coeffs: Vec<String> = e.iter().map(|t| t.coefficient.to_string()).collect();
        assert_eq!(coeffs, ["1", "l"]);
        let inv = expand_inverse(&line, &ring.one()).unwrap();
        let coeffs: Vec<String> = inv.iter().map(|t| t.coefficient.to_string()).collect();
        assert_eq!(coeffs, ["1", "-l", "l^2", "-l^3"]);
        assert!(inv.iter().all(|t| t.target == FswTarget::Lk));

        let r = analyze(&SwitchProblem::new(4, 2, 3).unwrap().with_base(base)).unwrap();
        let c1 = ring.gen("c1").unwrap();
        assert_eq!(roundtrip(&r, &c1).unwrap(), c1);

        let bare = analyze(&SwitchProblem::new(4, 2, 3).unwrap()).unwrap();
        assert!(matches!(
            expand_switch(&bare, &ring.one()),
            Err(Error::MissingBase(_))
        ));
    }

    #[test]
    fn consistency_examples() {
        assert!(check_consistency(4, 2, 1, 2).unwrap());
        assert!(check_consistency(-2, 2, 2, 3).unwrap());
        assert!(check_consistency(4, 2, 3, 0).unwrap());
        assert!(check_consistency(3, 2, 1, 1).is_err());
    }

    #[test]
    fn consistency_is_sensitive_to_shift() {
        // pairing V_{2,3} without the k1 shift breaks the identity
        let (_, v12) = obstruction_pieces(4, 2, 1, 0).unwrap();
        let (_, wrong) = obstruction_pieces(4, 2, 2, 0).unwrap();
        let (_, v13) = obstruction_pieces(4, 2, 3, 0).unwrap();
        assert!(!k_equal(&v12.add(&wrong), &v13));
    }

    #[test]
    fn gt_rank_examples() {
        let c = gt_rank_check(-2, 2, 2).unwrap();
        assert_eq!((c.lhs, c.rhs, c.equal), (6, 6, true));
        let c = gt_rank_check(-4, 2, 1).unwrap();
        assert_eq!((c.lhs, c.rhs, c.equal), (3, 3, true));
        assert!(matches!(
            gt_rank_check(0, 2, 1),
            Err(Error::Precondition(_))
        ));
    }
}
