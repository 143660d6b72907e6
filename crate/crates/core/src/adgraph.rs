//! Admissible graphs, type I exceptional classes and their partial orders.
//!
//! An admissible graph on `1..=n` is a forest in which every vertex has at
//! most one parent and parents carry smaller labels than their children
//! (blowup order). Vertex `i` carries the class `e_i = E_i - Σ_{j child} E_j`
//! in the lattice spanned by `C, E_1..E_n` with `E_i·E_j = -δ_ij` and
//! `C·E_i = 0`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ENUMERATION_LIMIT: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct AdmissibleGraph {
    n: usize,
    /// `parent[i]` for vertex `i + 1`.
    parent: Vec<Option<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphJson> for AdmissibleGraph {
    type Error = Error;

    fn try_from(g: GraphJson) -> Result<Self> {
        AdmissibleGraph::from_edges(
            g.n,
            &g.edges.iter().map(|[p, c]| (*p, *c)).collect::<Vec<_>>(),
        )
    }
}

impl From<AdmissibleGraph> for GraphJson {
    fn from(g: AdmissibleGraph) -> Self {
        GraphJson {
            n: g.n,
            edges: g.edges().into_iter().map(|(p, c)| [p, c]).collect(),
        }
    }
}

impl AdmissibleGraph {
    /// The graph with no edges.
    pub fn isolated(n: usize) -> Self {
        Self {
            n,
            parent: vec![None; n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut parent = vec![None; n];
        for &(p, c) in edges {
            if p == 0 || c == 0 || p > n || c > n {
                return Err(Error::InvalidGraph(format!(
                    "edge {p}->{c} outside 1..={n}"
                )));
            }
            if p >= c {
                return Err(Error::InvalidGraph(format!(
                    "edge {p}->{c}: parent label must be smaller than child"
                )));
            }
            if let Some(old) = parent[c - 1] {
                return Err(Error::InvalidGraph(format!(
                    "vertex {c} has two parents ({old} and {p})"
                )));
            }
            parent[c - 1] = Some(p);
        }
        Ok(Self { n, parent })
    }

    /// Builds from a parent table indexed by vertex (`parents[i]` is the
    /// parent of `i + 1`).
    pub fn from_parents(parents: Vec<Option<usize>>) -> Result<Self> {
        let n = parents.len();
        let edges: Vec<_> = parents
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (p, i + 1)))
            .collect();
        Self::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v - 1]
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (1..=self.n)
            .filter(|&c| self.parent[c - 1] == Some(v))
            .collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (p, i + 1)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }

    /// Copy with the out-edges of every vertex in `vertices` removed.
    pub fn detach_children(&self, vertices: &BTreeSet<usize>) -> Self {
        let parent = self
            .parent
            .iter()
            .map(|p| p.filter(|p| !vertices.contains(p)))
            .collect();
        Self { n: self.n, parent }
    }
}

impl fmt::Display for AdmissibleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges()
            .iter()
            .map(|(p, c)| format!("{p}->{c}"))
            .collect();
        write!(f, "n={} [{}]", self.n, edges.join(", "))
    }
}

/// Integer combination `c·C + Σ x_i E_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ExcClass {
    pub coeffs: Vec<i64>,
    pub c_coeff: i64,
}

impl ExcClass {
    pub fn zero(n: usize) -> Self {
        Self {
            coeffs: vec![0; n],
            c_coeff: 0,
        }
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut x = Self::zero(n);
        x.coeffs[i - 1] = 1;
        x
    }

    pub fn add(&self, other: &ExcClass) -> ExcClass {
        ExcClass {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            c_coeff: self.c_coeff + other.c_coeff,
        }
    }

    pub fn sub(&self, other: &ExcClass) -> ExcClass {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> ExcClass {
        ExcClass {
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
            c_coeff: self.c_coeff * k,
        }
    }

    /// `C - Σ m_i E_i`.
    pub fn curve_minus(m: &[i64]) -> ExcClass {
        ExcClass {
            coeffs: m.iter().map(|x| -x).collect(),
            c_coeff: 1,
        }
    }

    /// `K = Σ E_l` restricted to the exceptional lattice.
    pub fn canonical(n: usize) -> ExcClass {
        ExcClass {
            coeffs: vec![1; n],
            c_coeff: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingContext {
    pub m: Vec<i64>,
    pub c_selfint: i64,
    pub c_kpair: i64,
}

impl PairingContext {
    pub fn new(m: Vec<i64>, c_selfint: i64, c_kpair: i64) -> Result<Self> {
        if let Some(bad) = m.iter().find(|&&x| x < 1) {
            return Err(Error::Precondition(format!(
                "multiplicity {bad} must be at least 1"
            )));
        }
        Ok(Self {
            m,
            c_selfint,
            c_kpair,
        })
    }

    /// Multiplicities only; `C·C` and `C·K` set to zero.
    pub fn from_multiplicities(m: Vec<i64>) -> Result<Self> {
        Self::new(m, 0, 0)
    }

    fn curve(&self) -> ExcClass {
        ExcClass::curve_minus(&self.m)
    }
}

pub fn e_class(g: &AdmissibleGraph, i: usize) -> Result<ExcClass> {
    if i == 0 || i > g.n {
        return Err(Error::Precondition(format!(
            "vertex {i} outside 1..={}",
            g.n
        )));
    }
    let mut x = ExcClass::basis(g.n, i);
    for c in g.children(i) {
        x.coeffs[c - 1] -= 1;
    }
    Ok(x)
}

fn e_classes(g: &AdmissibleGraph) -> Vec<ExcClass> {
    (1..=g.n)
        .map(|i| e_class(g, i).expect("in range"))
        .collect()
}

pub fn pair(x: &ExcClass, y: &ExcClass, ctx: &PairingContext) -> i64 {
    x.c_coeff * y.c_coeff * ctx.c_selfint
        - x.coeffs
            .iter()
            .zip(&y.coeffs)
            .map(|(a, b)| a * b)
            .sum::<i64>()
}

fn pair_lattice(x: &ExcClass, y: &ExcClass) -> i64 {
    debug_assert!(x.c_coeff == 0 || y.c_coeff == 0);
    -x.coeffs
        .iter()
        .zip(&y.coeffs)
        .map(|(a, b)| a * b)
        .sum::<i64>()
}

/// Number of edges, cross-checked against `-Σ_i (e_i² - e_i·K)/2`.
pub fn codim(g: &AdmissibleGraph) -> Result<usize> {
    let k = ExcClass::canonical(g.n);
    let mut twice = 0;
    for e in e_classes(g) {
        twice += pair_lattice(&e, &e) - pair_lattice(&e, &k);
    }
    let edges = g.edge_count();
    if twice % 2 != 0 || -twice / 2 != edges as i64 {
        return Err(Error::Inconsistent(format!(
            "-Σ(e²-e·K)/2 = {}/2 but {edges} edges in {g}",
            -twice
        )));
    }
    Ok(edges)
}

/// Every vertex has `(C - ΣmE)·e_i < 0` or `e_i² = -1`.
pub fn special_condition(g: &AdmissibleGraph, ctx: &PairingContext) -> bool {
    let curve = ctx.curve();
    e_classes(g)
        .iter()
        .all(|e| pair(&curve, e, ctx) < 0 || pair_lattice(e, e) == -1)
}

/// `{ i : (C - ΣmE)·e_i < 0 }`.
pub fn negative_set(g: &AdmissibleGraph, ctx: &PairingContext) -> BTreeSet<usize> {
    let curve = ctx.curve();
    e_classes(g)
        .iter()
        .enumerate()
        .filter(|(_, e)| pair(&curve, e, ctx) < 0)
        .map(|(i, _)| i + 1)
        .collect()
}

/// Solves `x = Σ c_j e_j(g)` and returns `c` when all `c_j >= 0`.
///
/// The `e_j` form a unitriangular basis of the `E`-lattice, so the solution
/// is unique: `c_j = x_j + c_{parent(j)}`, computed roots first.
pub fn effective_coeffs(x: &ExcClass, g: &AdmissibleGraph) -> Option<Vec<i64>> {
    if x.c_coeff != 0 || x.coeffs.len() != g.n {
        return None;
    }
    let mut c = vec![0; g.n];
    for j in 1..=g.n {
        c[j - 1] = x.coeffs[j - 1] + g.parent(j).map_or(0, |p| c[p - 1]);
    }
    c.iter().all(|&v| v >= 0).then_some(c)
}

fn effective_over(x: &ExcClass, g: &AdmissibleGraph) -> bool {
    effective_coeffs(x, g).is_some()
}

fn same_size(g: &AdmissibleGraph, g2: &AdmissibleGraph) -> bool {
    g.n == g2.n
}

/// `g > g2`: the graphs differ and every `e_i(g)` is effective over `g2`.
pub fn partial_gt(g: &AdmissibleGraph, g2: &AdmissibleGraph) -> bool {
    same_size(g, g2) && g != g2 && e_classes(g).iter().all(|e| effective_over(e, g2))
}

pub fn partial_ge(g: &AdmissibleGraph, g2: &AdmissibleGraph) -> bool {
    g == g2 || partial_gt(g, g2)
}

fn negative_sum(g: &AdmissibleGraph, set: &BTreeSet<usize>) -> ExcClass {
    set.iter().fold(ExcClass::zero(g.n), |acc, &i| {
        acc.add(&e_class(g, i).expect("in range"))
    })
}

fn sqsupset_effectivity(g: &AdmissibleGraph, g2: &AdmissibleGraph, ctx: &PairingContext) -> bool {
    let lhs = negative_sum(g, &negative_set(g, ctx));
    let rhs = negative_sum(g2, &negative_set(g2, ctx));
    effective_over(&lhs.sub(&rhs), g2)
}

/// `g ⊐ g2`: `g > g2` and `Σ_{I(g)} e_i - Σ_{J(g2)} e'_j` is effective
/// over `g2`.
pub fn partial_sqsupset(g: &AdmissibleGraph, g2: &AdmissibleGraph, ctx: &PairingContext) -> bool {
    partial_gt(g, g2) && sqsupset_effectivity(g, g2, ctx)
}

/// `g ⊒ g2`.
pub fn partial_sqsupseteq(g: &AdmissibleGraph, g2: &AdmissibleGraph, ctx: &PairingContext) -> bool {
    same_size(g, g2) && partial_ge(g, g2) && sqsupset_effectivity(g, g2, ctx)
}

fn gg_clauses(g: &AdmissibleGraph, g2: &AdmissibleGraph, ctx: &PairingContext) -> bool {
    let i_set = negative_set(g, ctx);
    let j_set = negative_set(g2, ctx);
    let kept = i_set
        .iter()
        .all(|&i| e_class(g2, i).ok() == e_class(g, i).ok());
    // e_j² is read in the larger graph g
    let new_minus_one = j_set.iter().any(|&j| {
        let e = e_class(g, j).expect("in range");
        pair_lattice(&e, &e) == -1
    });
    kept && new_minus_one
}

/// `g ≫ g2`: `g > g2`, the negative classes of `g` persist in `g2`, and
/// some `-1` class of `g` becomes negative in `g2`.
pub fn partial_gg(g: &AdmissibleGraph, g2: &AdmissibleGraph, ctx: &PairingContext) -> bool {
    partial_gt(g, g2) && gg_clauses(g, g2, ctx)
}

/// Reflexive closure of [`partial_gg`].
pub fn partial_gg_or_equal(
    g: &AdmissibleGraph,
    g2: &AdmissibleGraph,
    ctx: &PairingContext,
) -> bool {
    (same_size(g, g2) && g == g2) || partial_gg(g, g2, ctx)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Intermediate {
    pub graph: AdmissibleGraph,
    pub i_set: BTreeSet<usize>,
    pub j_set: BTreeSet<usize>,
    pub j0: BTreeSet<usize>,
}

/// All subsets of `items` by increasing size, lexicographic within a size.
fn subsets_by_size(items: &[usize]) -> Vec<BTreeSet<usize>> {
    let mut out: Vec<Vec<usize>> = (0u32..(1 << items.len()))
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, v)| *v)
                .collect()
        })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out.into_iter().map(|v| v.into_iter().collect()).collect()
}

/// Builds `g''` with `g ⊒ g'' ≧≫ g2` for `g > g2` where `g` satisfies the
/// special condition.
///
/// `J₀ ⊆ J - I` is the first subset (smallest size, then lexicographic)
/// with `Σ_I e_i - Σ_{J-J₀} e'_j` effective over `g2`; such a set admits no
/// smaller working subset. `g''` is `g2` with the children of `J₀`
/// detached.
pub fn find_intermediate(
    g: &AdmissibleGraph,
    g2: &AdmissibleGraph,
    ctx: &PairingContext,
) -> Result<Intermediate> {
    if ctx.m.len() != g.n || !same_size(g, g2) {
        return Err(Error::Precondition(
            "graph sizes and multiplicities disagree".into(),
        ));
    }
    if !partial_gt(g, g2) {
        return Err(Error::Precondition(format!("{g} > {g2} does not hold")));
    }
    if !special_condition(g, ctx) {
        return Err(Error::Precondition(format!(
            "{g} fails the special condition"
        )));
    }
    let i_set = negative_set(g, ctx);
    let j_set = negative_set(g2, ctx);
    let free: Vec<usize> = j_set.difference(&i_set).copied().collect();
    let sum_i = negative_sum(g, &i_set);
    for j0 in subsets_by_size(&free) {
        let rest: BTreeSet<usize> = j_set.difference(&j0).copied().collect();
        let class = sum_i.sub(&negative_sum(g2, &rest));
        if !effective_over(&class, g2) {
            continue;
        }
        let graph = g2.detach_children(&j0);
        if !partial_sqsupseteq(g, &graph, ctx) || !partial_gg_or_equal(&graph, g2, ctx) {
            return Err(Error::Inconsistent(format!(
                "intermediate {graph} for J0 = {j0:?} fails verification between {g} and {g2}"
            )));
        }
        return Ok(Intermediate {
            graph,
            i_set,
            j_set,
            j0,
        });
    }
    Err(Error::Inconsistent(format!(
        "no J0 ⊆ J - I makes the class effective for {g} > {g2}"
    )))
}

/// All admissible graphs on `1..=n`: each vertex `j` picks a parent in
/// `{none} ∪ {1..j-1}`, giving `n!` graphs.
pub fn enumerate_admissible(n: usize) -> Result<Vec<AdmissibleGraph>> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::Precondition(format!(
            "enumeration limited to n <= {ENUMERATION_LIMIT}"
        )));
    }
    let mut out = vec![Vec::<Option<usize>>::new()];
    for j in 1..=n {
        let mut next = Vec::with_capacity(out.len() * j);
        for partial in &out {
            let mut none = partial.clone();
            none.push(None);
            next.push(none);
            for p in 1..j {
                let mut with = partial.clone();
                with.push(Some(p));
                next.push(with);
            }
        }
        out = next;
    }
    out.into_iter().map(AdmissibleGraph::from_parents).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> AdmissibleGraph {
        AdmissibleGraph::from_edges(n, edges).unwrap()
    }

    fn ctx(m: &[i64]) -> PairingContext {
        PairingContext::from_multiplicities(m.to_vec()).unwrap()
    }

    #[test]
    fn graph_validation() {
        assert!(AdmissibleGraph::from_edges(2, &[(2, 1)]).is_err());
        assert!(AdmissibleGraph::from_edges(3, &[(1, 3), (2, 3)]).is_err());
        assert!(AdmissibleGraph::from_edges(2, &[(1, 3)]).is_err());
        let json = serde_json::to_string(&g(3, &[(1, 2), (1, 3)])).unwrap();
        assert_eq!(json, r#"{"n":3,"edges":[[1,2],[1,3]]}"#);
        let back: AdmissibleGraph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g(3, &[(1, 2), (1, 3)]));
        assert!(serde_json::from_str::<AdmissibleGraph>(r#"{"n":2,"edges":[[2,1]]}"#).is_err());
    }

    #[test]
    fn e_class_examples() {
        assert_eq!(e_class(&g(2, &[]), 1).unwrap().coeffs, vec![1, 0]);
        assert_eq!(
            e_class(&g(3, &[(1, 2), (1, 3)]), 1).unwrap().coeffs,
            vec![1, -1, -1]
        );
        assert_eq!(e_class(&g(2, &[(1, 2)]), 1).unwrap().coeffs, vec![1, -1]);
        assert!(e_class(&g(2, &[]), 3).is_err());
    }

    #[test]
    fn pairing_examples() {
        let c = ctx(&[1, 2, 3]);
        let e1 = ExcClass::basis(3, 1);
        assert_eq!(pair(&e1, &e1, &c), -1);
        let star = g(3, &[(1, 2), (1, 3)]);
        let e = e_class(&star, 1).unwrap();
        assert_eq!(pair(&e, &e, &c), -3);
        let curve = ExcClass::curve_minus(&c.m);
        assert_eq!(pair(&curve, &e, &c), 1 - 2 - 3);
        let with_c = PairingContext::new(vec![1], 5, 0).unwrap();
        assert_eq!(
            pair(
                &ExcClass::curve_minus(&[1]),
                &ExcClass::curve_minus(&[1]),
                &with_c
            ),
            4
        );
        assert!(PairingContext::new(vec![0], 0, 0).is_err());
    }

    #[test]
    fn codim_examples() {
        assert_eq!(codim(&g(3, &[])).unwrap(), 0);
        assert_eq!(codim(&g(3, &[(1, 2), (1, 3)])).unwrap(), 2);
        assert_eq!(codim(&g(3, &[(1, 2), (2, 3)])).unwrap(), 2);
    }

    #[test]
    fn special_condition_examples() {
        assert!(special_condition(&g(3, &[]), &ctx(&[1, 1, 1])));
        assert!(special_condition(&g(3, &[(1, 2)]), &ctx(&[1, 2, 1])));
        assert!(!special_condition(&g(2, &[(1, 2)]), &ctx(&[3, 1])));
    }

    #[test]
    fn negative_set_examples() {
        assert!(negative_set(&g(2, &[]), &ctx(&[1, 1])).is_empty());
        assert_eq!(
            negative_set(&g(2, &[(1, 2)]), &ctx(&[1, 2])),
            BTreeSet::from([1])
        );
        assert_eq!(
            negative_set(&g(3, &[(1, 2)]), &ctx(&[1, 2, 1])),
            BTreeSet::from([1])
        );
    }

    #[test]
    fn effective_coeff_examples() {
        let chain = g(2, &[(1, 2)]);
        for i in 1..=2 {
            let e = e_class(&chain, i).unwrap();
            let mut unit = vec![0; 2];
            unit[i - 1] = 1;
            assert_eq!(effective_coeffs(&e, &chain), Some(unit));
        }
        assert_eq!(
            effective_coeffs(&ExcClass::basis(2, 2), &chain),
            Some(vec![0, 1])
        );
        let x = ExcClass {
            coeffs: vec![-1, 1],
            c_coeff: 0,
        };
        assert_eq!(effective_coeffs(&x, &chain), None);
        let with_c = ExcClass {
            coeffs: vec![0, 0],
            c_coeff: 1,
        };
        assert_eq!(effective_coeffs(&with_c, &chain), None);
    }

    #[test]
    fn order_examples() {
        assert!(partial_gt(&g(2, &[]), &g(2, &[(1, 2)])));
        assert!(partial_gt(&g(3, &[(1, 2)]), &g(3, &[(1, 2), (1, 3)])));
        assert!(!partial_gt(&g(2, &[]), &g(2, &[])));
        assert!(!partial_gt(&g(2, &[(1, 2)]), &g(2, &[])));
        let c = ctx(&[1, 2]);
        assert!(partial_sqsupseteq(&g(2, &[]), &g(2, &[]), &c));
        assert!(!partial_sqsupset(&g(2, &[]), &g(2, &[]), &c));
        assert!(!partial_sqsupset(&g(2, &[(1, 2)]), &g(2, &[]), &c));
    }

    #[test]
    fn intermediate_two_vertices() {
        let c = ctx(&[1, 2]);
        let top = g(2, &[]);
        let bottom = g(2, &[(1, 2)]);
        let r = find_intermediate(&top, &bottom, &c).unwrap();
        assert!(r.i_set.is_empty());
        assert_eq!(r.j_set, BTreeSet::from([1]));
        assert_eq!(r.j0, BTreeSet::from([1]));
        assert_eq!(r.graph, top);
        assert!(partial_sqsupseteq(&top, &r.graph, &c));
        assert!(partial_gg(&r.graph, &bottom, &c));
    }

    #[test]
    fn intermediate_empty_difference() {
        let c = ctx(&[1, 2, 1]);
        let top = g(3, &[(1, 2)]);
        let bottom = g(3, &[(1, 2), (2, 3)]);
        let r = find_intermediate(&top, &bottom, &c).unwrap();
        assert_eq!(r.i_set, BTreeSet::from([1]));
        assert_eq!(r.j_set, BTreeSet::from([1]));
        assert!(r.j0.is_empty());
        assert_eq!(r.graph, bottom);
    }

    #[test]
    fn intermediate_preconditions() {
        let c = ctx(&[1, 2]);
        assert!(matches!(
            find_intermediate(&g(2, &[(1, 2)]), &g(2, &[]), &c),
            Err(Error::Precondition(_))
        ));
        let bad = ctx(&[3, 1]);
        assert!(matches!(
            find_intermediate(&g(2, &[(1, 2)]), &g(2, &[(1, 2)]), &bad),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn enumeration_counts() {
        let counts: Vec<usize> = (1..=5)
            .map(|n| enumerate_admissible(n).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 2, 6, 24, 120]);
        assert!(enumerate_admissible(8).is_err());
    }
}
