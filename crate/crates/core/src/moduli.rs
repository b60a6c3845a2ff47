//! The conductor-stratum combinatorics: validity of branching data, the
//! partition sets `Omega_d`, the refinement order, its cover graph, essential
//! parts, irreducible components with their dimensions, and connectedness
//! diagnostics.

use rayon::prelude::*;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::ramify::BranchingDatum;

/// Outcome of the validity conditions on a conductor matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub valid: bool,
    /// Names the first violated condition.
    pub first_violation: Option<String>,
}

fn row_violation(row: &[u64], p: u64) -> Option<String> {
    if row.iter().all(|&e| e == 0) {
        return Some("row shape: all-zero row".into());
    }
    if row[0] % p == 1 {
        return Some(format!(
            "condition 1: first-column entry {} is 1 mod {p}",
            row[0]
        ));
    }
    for j in 1..row.len() {
        let e = row[j] as i64;
        let prev = row[j - 1] as i64;
        let lower = p as i64 * prev - p as i64 + 1;
        if e < lower {
            return Some(format!(
                "condition 2: entry {} at level {} is below {lower}",
                row[j],
                j + 1
            ));
        }
        if e > lower && (e - lower) % p as i64 == 0 {
            return Some(format!(
                "condition 3: entry {} at level {} exceeds {lower} by a multiple of {p}",
                row[j],
                j + 1
            ));
        }
    }
    None
}

/// Checks the row conditions (1-3) on every row; column sums (condition 4)
/// are intrinsic to the datum and read off via [`BranchingDatum::conductors`].
pub fn validate_datum(d: &BranchingDatum) -> ValidationReport {
    for row in d.rows() {
        if let Some(v) = row_violation(row, d.p()) {
            return ValidationReport {
                valid: false,
                first_violation: Some(v),
            };
        }
    }
    ValidationReport {
        valid: true,
        first_violation: None,
    }
}

pub fn valid_row(row: &[u64], p: u64) -> bool {
    row_violation(row, p).is_none()
}

/// Admissibility of a conductor tuple: `d_1 >= 1` and `d_i >= p d_{i-1} - p`.
pub fn admissible(d: &[u64], p: u64) -> Result<()> {
    if d.is_empty() {
        return Err(Error::InadmissibleTuple("empty tuple".into()));
    }
    if d[0] < 1 {
        return Err(Error::InadmissibleTuple("d_1 must be >= 1".into()));
    }
    for i in 1..d.len() {
        let lower = p as i64 * d[i - 1] as i64 - p as i64;
        if (d[i] as i64) < lower {
            return Err(Error::InadmissibleTuple(format!(
                "d_{} = {} is below p*d_{} - p = {lower}",
                i + 1,
                d[i],
                i
            )));
        }
    }
    Ok(())
}

/// All valid matrices with the given column sums, up to row permutation
/// (rows sorted, deterministic order).
pub fn enumerate_partitions(d: &[u64], p: u64) -> Result<Vec<BranchingDatum>> {
    admissible(d, p)?;
    let n = d.len();
    let mut out: Vec<Vec<Vec<u64>>> = Vec::new();
    let mut budget = d.to_vec();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    // Depth-first over rows in nonincreasing lexicographic order.
    fn rec(
        p: u64,
        n: usize,
        budget: &mut Vec<u64>,
        rows: &mut Vec<Vec<u64>>,
        bound: Option<Vec<u64>>,
        out: &mut Vec<Vec<Vec<u64>>>,
    ) {
        if budget.iter().all(|&b| b == 0) {
            let mut m = rows.clone();
            m.sort();
            out.push(m);
            return;
        }
        // A column budget of 1 can never be finished: entries are 0 or >= 2.
        if budget.contains(&1) {
            return;
        }
        // Enumerate candidate rows <= bound (lex), valid, within budget.
        let mut candidates: Vec<Vec<u64>> = Vec::new();
        let mut row = vec![0u64; n];
        gen_row(p, n, 0, true, budget, &mut row, &bound, &mut |cand: &[u64]| {
            if cand.iter().any(|&e| e > 0) {
                candidates.push(cand.to_vec());
            }
        });
        for cand in candidates {
            for (i, &e) in cand.iter().enumerate() {
                budget[i] -= e;
            }
            rows.push(cand.clone());
            rec(p, n, budget, rows, Some(cand), out);
            let cand = rows.pop().unwrap();
            for (i, &e) in cand.iter().enumerate() {
                budget[i] += e;
            }
        }
    }
    // Generates row entries level by level, obeying the row conditions, the
    // per-column budget, and the lexicographic bound.
    fn gen_row(
        p: u64,
        n: usize,
        level: usize,
        tight: bool,
        budget: &[u64],
        row: &mut Vec<u64>,
        bound: &Option<Vec<u64>>,
        emit: &mut dyn FnMut(&[u64]),
    ) {
        if level == n {
            emit(row);
            return;
        }
        let cap = match (tight, bound) {
            (true, Some(b)) => budget[level].min(b[level]),
            _ => budget[level],
        };
        let prefix_zero = row[..level].iter().all(|&e| e == 0);
        let mut candidates: Vec<u64> = Vec::new();
        if prefix_zero {
            candidates.push(0);
            for e in 2..=cap {
                if e % p != 1 {
                    candidates.push(e);
                }
            }
        } else {
            let prev = row[level - 1];
            let lower = p * prev - p + 1;
            for e in lower..=cap {
                if e == lower || !(e - lower).is_multiple_of(p) {
                    candidates.push(e);
                }
            }
        }
        // Descending keeps generated rows nonincreasing without extra work.
        for &e in candidates.iter().rev() {
            let still_tight = tight
                && match bound {
                    Some(b) => e == b[level],
                    None => false,
                };
            row[level] = e;
            gen_row(p, n, level + 1, still_tight, budget, row, bound, emit);
            row[level] = 0;
        }
    }
    rec(p, n, &mut budget, &mut rows, None, &mut out);
    out.sort();
    out.dedup();
    out.into_iter()
        .map(|rows| BranchingDatum::new(p, rows))
        .collect()
}

/// Which reading of the refinement order to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineSemantics {
    /// One surjection of rows works for all columns simultaneously (the
    /// grouping induced by branch-point specialization). Default.
    ConsistentGrouping,
    /// Each column refines independently (the literal one-line reading).
    PerColumn,
}

/// `coarse` precedes `fine`: the rows of `fine` can be grouped so the groups
/// sum to the rows of `coarse`.
pub fn refines(coarse: &BranchingDatum, fine: &BranchingDatum) -> bool {
    refines_with(coarse, fine, RefineSemantics::ConsistentGrouping)
}

pub fn refines_with(
    coarse: &BranchingDatum,
    fine: &BranchingDatum,
    sem: RefineSemantics,
) -> bool {
    if coarse.p() != fine.p() || coarse.n() != fine.n() {
        return false;
    }
    if coarse.conductors() != fine.conductors() {
        return false;
    }
    match sem {
        RefineSemantics::ConsistentGrouping => {
            let targets = coarse.canonical_rows();
            let items = fine.canonical_rows();
            if items.len() < targets.len() {
                return false;
            }
            let n = coarse.n();
            let mut sums = vec![vec![0u64; n]; targets.len()];
            assign(&items, 0, &targets, &mut sums)
        }
        RefineSemantics::PerColumn => {
            for col in 0..coarse.n() {
                let targets: Vec<Vec<u64>> = coarse
                    .canonical_rows()
                    .iter()
                    .map(|r| vec![r[col]])
                    .collect();
                let items: Vec<Vec<u64>> = fine
                    .canonical_rows()
                    .iter()
                    .map(|r| vec![r[col]])
                    .filter(|r| r[0] > 0)
                    .collect();
                let mut sums = vec![vec![0u64; 1]; targets.len()];
                if !assign(&items, 0, &targets, &mut sums) {
                    return false;
                }
            }
            true
        }
    }
}

fn assign(
    items: &[Vec<u64>],
    idx: usize,
    targets: &[Vec<u64>],
    sums: &mut Vec<Vec<u64>>,
) -> bool {
    if idx == items.len() {
        return sums.iter().zip(targets).all(|(s, t)| s == t);
    }
    let item = &items[idx];
    let mut tried: Vec<&Vec<u64>> = Vec::new();
    for j in 0..targets.len() {
        if tried.iter().any(|s| **s == sums[j]) {
            continue; // identical partial sums give identical subtrees
        }
        let fits = item
            .iter()
            .zip(&sums[j])
            .zip(&targets[j])
            .all(|((e, s), t)| s + e <= *t);
        if !fits {
            continue;
        }
        for (k, e) in item.iter().enumerate() {
            sums[j][k] += e;
        }
        if assign(items, idx + 1, targets, sums) {
            return true;
        }
        for (k, e) in item.iter().enumerate() {
            sums[j][k] -= e;
        }
        tried.push(&targets[j]);
    }
    false
}

/// Essential-part decomposition of one (valid) conductor row: at each
/// branched level, `u_i - p*u_{i-1} = p*q_i + eps_i` with `0 <= eps_i < p`,
/// jumps counted from the first nonzero level with `u_0 = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EssentialParts {
    /// Index (0-based) of the first branched level.
    pub first_level: usize,
    /// `(q, eps)` per branched level, aligned from `first_level`.
    pub parts: Vec<(u64, u64)>,
}

impl EssentialParts {
    pub fn essential_free(&self) -> bool {
        self.parts.iter().all(|&(q, _)| q == 0)
    }

    pub fn total(&self) -> u64 {
        self.parts.iter().map(|&(q, _)| q).sum()
    }
}

pub fn essential_parts(row: &[u64], p: u64) -> Result<EssentialParts> {
    if let Some(v) = row_violation(row, p) {
        return Err(Error::InvalidDatum(v));
    }
    let first = row.iter().position(|&e| e > 0).unwrap();
    let mut parts = Vec::new();
    let mut u_prev = 0u64;
    for &e in &row[first..] {
        let u = e - 1;
        let diff = u - p * u_prev;
        parts.push((diff / p, diff % p));
        u_prev = u;
    }
    Ok(EssentialParts {
        first_level: first,
        parts,
    })
}

pub fn essential_free(row: &[u64], p: u64) -> bool {
    essential_parts(row, p).map(|e| e.essential_free()).unwrap_or(false)
}

/// Dimension of the cover stratum attached to a matrix:
/// `s_n + sum (e - 1 - floor((e-1)/p))` over all entries, where `s_n` is the
/// number of rows.
pub fn dim_cover(d: &BranchingDatum) -> u64 {
    let p = d.p();
    let mut total = d.r() as u64;
    for row in d.rows() {
        for &e in row {
            if e >= 1 {
                let u = e - 1;
                total += u - u / p;
            }
        }
    }
    total
}

/// Curve-stratum dimension: the cover count minus the 3-dimensional framing
/// fiber.
pub fn dim_curve(d: &BranchingDatum) -> i64 {
    dim_cover(d) as i64 - 3
}

/// Per-vertex annotations of the partition graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexInfo {
    /// Column-support counts (the stratification label).
    pub strata: Vec<u64>,
    pub essential_total: u64,
    pub essential_free: bool,
    pub dim_cover: u64,
    pub dim_curve: i64,
}

/// The cover-relation graph on `Omega_d`.
#[derive(Debug, Clone)]
pub struct PartitionGraph {
    pub p: u64,
    pub conductors: Vec<u64>,
    pub vertices: Vec<BranchingDatum>,
    pub info: Vec<VertexInfo>,
    /// Strict cover edges `coarse -> fine`.
    pub edges: Vec<(usize, usize)>,
}

fn vertex_info(d: &BranchingDatum) -> VertexInfo {
    let pr = crate::ramify::p_rank_vector(d);
    let totals: u64 = d
        .rows()
        .iter()
        .map(|r| essential_parts(r, d.p()).map(|e| e.total()).unwrap_or(0))
        .sum();
    VertexInfo {
        strata: pr.column_support,
        essential_total: totals,
        essential_free: totals == 0,
        dim_cover: dim_cover(d),
        dim_curve: dim_curve(d),
    }
}

/// Enumerates `Omega_d` and computes the strict cover edges of the
/// refinement order (parallel pairwise relation plus a betweenness scan).
/// Finished graphs are memoized per (p, d) and shared immutably.
pub fn build_graph(d: &[u64], p: u64) -> Result<Arc<PartitionGraph>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, Vec<u64>), Arc<PartitionGraph>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (p, d.to_vec());
    if let Some(g) = cache.lock().unwrap().get(&key) {
        return Ok(g.clone());
    }
    let vertices = enumerate_partitions(d, p)?;
    let info: Vec<VertexInfo> = vertices.iter().map(vertex_info).collect();
    let k = vertices.len();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .collect();
    let related: Vec<(usize, usize)> = pairs
        .par_iter()
        .filter(|(i, j)| refines(&vertices[*i], &vertices[*j]))
        .cloned()
        .collect();
    let rel_set: std::collections::HashSet<(usize, usize)> = related.iter().cloned().collect();
    let mut edges: Vec<(usize, usize)> = related
        .into_iter()
        .filter(|&(i, j)| {
            !(0..k).any(|z| {
                z != i && z != j && rel_set.contains(&(i, z)) && rel_set.contains(&(z, j))
            })
        })
        .collect();
    edges.sort();
    let graph = Arc::new(PartitionGraph {
        p,
        conductors: d.to_vec(),
        vertices,
        info,
        edges,
    });
    cache.lock().unwrap().insert(key, graph.clone());
    Ok(graph)
}

impl PartitionGraph {
    /// Indices of the component vertices (no essential parts).
    pub fn component_indices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&i| self.info[i].essential_free)
            .collect()
    }

    /// Whether the underlying undirected graph is disconnected.
    pub fn is_disconnected(&self) -> bool {
        let k = self.vertices.len();
        if k <= 1 {
            return false;
        }
        let mut adj = vec![Vec::new(); k];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut seen = vec![false; k];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1usize;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count < k
    }

    /// DOT export; component vertices are double-circled, the stratum label
    /// is part of each vertex label.
    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph partition_graph {{");
        let _ = writeln!(s, "  rankdir=TB;");
        let _ = writeln!(s, "  node [shape=ellipse];");
        for (i, v) in self.vertices.iter().enumerate() {
            let strata: Vec<String> = self.info[i].strata.iter().map(|x| x.to_string()).collect();
            let peripheries = if self.info[i].essential_free { 2 } else { 1 };
            let _ = writeln!(
                s,
                "  v{i} [label=\"{v}\\ns=({})\" peripheries={peripheries} strata=\"({})\"];",
                strata.join(","),
                strata.join(","),
            );
        }
        for &(i, j) in &self.edges {
            let _ = writeln!(s, "  v{i} -> v{j};");
        }
        let _ = writeln!(s, "}}");
        s
    }
}

/// A component of the stratum space: an essential-free matrix with its
/// cover- and curve-space dimensions.
#[derive(Debug, Clone)]
pub struct Component {
    pub datum: BranchingDatum,
    pub dim_cover: u64,
    pub dim_curve: i64,
}

pub fn components(d: &[u64], p: u64) -> Result<Vec<Component>> {
    Ok(enumerate_partitions(d, p)?
        .into_iter()
        .filter(|m| m.rows().iter().all(|r| essential_free(r, p)))
        .map(|m| Component {
            dim_cover: dim_cover(&m),
            dim_curve: dim_curve(&m),
            datum: m,
        })
        .collect())
}

/// Irreducibility of the conductor stratum: exactly one essential-free
/// vertex (equivalently, one irreducible component).
pub fn irreducible(d: &[u64], p: u64) -> Result<bool> {
    Ok(components(d, p)?.len() == 1)
}

/// The minimal-step sufficient condition for irreducibility: `d_1` in {2,3}
/// and `d_i` in `{p d_{i-1} - p + 1, p d_{i-1} - p + 2}`. Under it, `Omega_d`
/// is a single matrix, which is then essential-free. The converse fails in
/// small characteristic, where the 1-mod-p exclusions can leave a lone
/// essential-free vertex at larger conductors (e.g. d = (4) at p = 2 has only
/// {(2),(2)}); use [`irreducible`] for the exact verdict.
pub fn irreducible_closed_form(d: &[u64], p: u64) -> Result<bool> {
    admissible(d, p)?;
    if d[0] != 2 && d[0] != 3 {
        return Ok(false);
    }
    for i in 1..d.len() {
        let base = p * d[i - 1] - p;
        if d[i] != base + 1 && d[i] != base + 2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The subset of `Omega_d` whose column-support counts equal `s`.
pub fn strata(d: &[u64], s: &[u64], p: u64) -> Result<Vec<BranchingDatum>> {
    let want = s.to_vec();
    Ok(enumerate_partitions(d, p)?
        .into_iter()
        .filter(|m| crate::ramify::p_rank_vector(m).column_support == want)
        .collect())
}

/// Sufficient disconnectedness test: `p >= 5` and `3 <= d_1 <= 2p - 2`.
pub fn disconnected_criterion(d1: u64, p: u64) -> bool {
    p >= 5 && d1 >= 3 && d1 <= 2 * p - 2
}
