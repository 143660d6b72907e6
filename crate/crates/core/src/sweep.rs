//! Grid sweeps over the combinatorial models, parallel when the `parallel`
//! feature is enabled.

use serde::Serialize;

use crate::adgraph::{
    codim, enumerate_admissible, find_intermediate, partial_gg_or_equal, partial_gt,
    partial_sqsupseteq, special_condition, AdmissibleGraph, PairingContext,
};
use crate::error::{Error, Result};
use crate::switch::{analyze, check_consistency, StepKind, SwitchProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Maps `f` over `items`, preserving order. Falls back to a sequential
    /// loop when built without the `parallel` feature.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            Execution::Parallel => par_map(items, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

/// `(m, n, k)` with `m + n` even, `1 <= n <= n_max`, `|m| <= m_max`,
/// `1 <= k <= k_max`.
pub fn switch_grid(m_max: i64, n_max: i64, k_max: u32) -> Vec<(i64, i64, u32)> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for m in -m_max..=m_max {
            if (m + n) % 2 != 0 {
                continue;
            }
            for k in 1..=k_max {
                out.push((m, n, k));
            }
        }
    }
    out
}

/// Grid points where the virtual rank disagrees with `(k²n - km)/2` or with
/// the signed sum of step piece ranks.
pub fn rank_identity_failures(grid: &[(i64, i64, u32)], exec: Execution) -> Vec<(i64, i64, u32)> {
    exec.map(grid, |&(m, n, k)| {
        let ok = SwitchProblem::new(m, n, k)
            .and_then(|p| analyze(&p))
            .is_ok_and(|r| {
                let kk = i64::from(k);
                let signed: i64 = r
                    .steps
                    .iter()
                    .map(|s| match s.kind {
                        StepKind::R1 => i64::from(s.piece_rank),
                        StepKind::R0 => -i64::from(s.piece_rank),
                        StepKind::Zero => 0,
                    })
                    .sum();
                2 * r.virtual_rank == kk * kk * n - kk * m && signed == r.virtual_rank
            });
        (!ok).then_some((m, n, k))
    })
    .into_iter()
    .flatten()
    .collect()
}

/// `(m, n, k1, k2)` where the two-stage decomposition disagrees.
pub fn consistency_failures(
    m_max: i64,
    n_max: i64,
    k_total: u32,
    exec: Execution,
) -> Vec<(i64, i64, u32, u32)> {
    let mut grid = Vec::new();
    for (m, n, _) in switch_grid(m_max, n_max, 1) {
        for k1 in 1..k_total {
            for k2 in 1..=k_total - k1 {
                grid.push((m, n, k1, k2));
            }
        }
    }
    exec.map(&grid, |&(m, n, k1, k2)| {
        (!check_consistency(m, n, k1, k2).unwrap_or(false)).then_some((m, n, k1, k2))
    })
    .into_iter()
    .flatten()
    .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct InterpolationSummary {
    pub graphs: usize,
    pub comparable_pairs: usize,
    pub triples_checked: usize,
    pub failures: Vec<String>,
}

fn multiplicity_vectors(n: usize, m_max: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (1..=m_max).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Runs the interpolation over every comparable pair of admissible graphs on
/// `n` vertices and every multiplicity vector with entries in `1..=m_max`.
pub fn interpolation_sweep(n: usize, m_max: i64, exec: Execution) -> Result<InterpolationSummary> {
    let graphs = enumerate_admissible(n)?;
    let pairs: Vec<(usize, usize)> = exec
        .map(&graphs, |g| {
            graphs
                .iter()
                .enumerate()
                .filter(|(_, g2)| partial_gt(g, g2))
                .map(|(j, _)| j)
                .collect::<Vec<_>>()
        })
        .into_iter()
        .enumerate()
        .flat_map(|(i, js)| js.into_iter().map(move |j| (i, j)))
        .collect();
    let ms = multiplicity_vectors(n, m_max);
    let per_m = exec.map(&ms, |m| {
        let ctx = PairingContext::from_multiplicities(m.clone()).expect("positive multiplicities");
        let special: Vec<bool> = graphs.iter().map(|g| special_condition(g, &ctx)).collect();
        let mut checked = 0;
        let mut failures = Vec::new();
        for &(i, j) in &pairs {
            if !special[i] {
                continue;
            }
            checked += 1;
            if let Err(e) = check_intermediate(&graphs[i], &graphs[j], &ctx) {
                failures.push(format!("m={m:?} g={} g2={}: {e}", graphs[i], graphs[j]));
            }
        }
        (checked, failures)
    });
    let mut summary = InterpolationSummary {
        graphs: graphs.len(),
        comparable_pairs: pairs.len(),
        ..Default::default()
    };
    for (checked, failures) in per_m {
        summary.triples_checked += checked;
        summary.failures.extend(failures);
    }
    Ok(summary)
}

fn check_intermediate(
    g: &AdmissibleGraph,
    g2: &AdmissibleGraph,
    ctx: &PairingContext,
) -> Result<()> {
    let r = find_intermediate(g, g2, ctx)?;
    if partial_sqsupseteq(g, &r.graph, ctx) && partial_gg_or_equal(&r.graph, g2, ctx) {
        Ok(())
    } else {
        Err(Error::Inconsistent("postcondition".into()))
    }
}

/// Checks the edge-count cross-check on every admissible graph with
/// `n` vertices; returns the number of graphs.
pub fn codim_sweep(n: usize, exec: Execution) -> Result<usize> {
    let graphs = enumerate_admissible(n)?;
    exec.map(&graphs, codim)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(graphs.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_and_parallel_agree() {
        let grid = switch_grid(6, 3, 3);
        assert!(rank_identity_failures(&grid, Execution::Sequential).is_empty());
        assert!(rank_identity_failures(&grid, Execution::Parallel).is_empty());
        let a = interpolation_sweep(3, 2, Execution::Sequential).unwrap();
        let b = interpolation_sweep(3, 2, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_shape() {
        let g = switch_grid(1, 2, 1);
        assert_eq!(g, vec![(-1, 1, 1), (1, 1, 1), (0, 2, 1)]);
        assert_eq!(multiplicity_vectors(2, 2).len(), 4);
        assert_eq!(codim_sweep(4, Execution::Parallel).unwrap(), 24);
    }
}
