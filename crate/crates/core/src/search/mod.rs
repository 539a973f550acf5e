//! Exact thresholds: the least `N` such that every `r`-coloring of `[N]`
//! has a monochromatic `{x+y, xy}` with `x > y > 2`.
//!
//! Such a pair is an edge `(x+y, xy)` of the pattern graph, so avoiding it
//! with `r` colors is proper `r`-coloring of that graph.

use crate::coloring::{find_monochromatic, Coloring};
use crate::error::{capacity, domain, Result};
use serde::Serialize;
use std::collections::{BTreeMap, VecDeque};

/// Largest `N` for which a pattern graph is built.
pub const MAX_GRAPH_N: u64 = 10_000_000;
/// Default backtracking budget (search nodes) per colorability call.
pub const DEFAULT_NODE_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternGraph {
    pub n: u64,
    /// Sorted integers of `[7, N]` on at least one edge.
    pub vertices: Vec<u64>,
    /// Sorted, deduplicated `(x + y, xy)`.
    pub edges: Vec<(u64, u64)>,
}

impl PatternGraph {
    /// New edges when `N` grows to `n`: products `xy = n`.
    pub fn edges_at(n: u64) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let mut y = 3;
        while y * (y + 1) <= n {
            if n % y == 0 {
                out.push((n / y + y, n));
            }
            y += 1;
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Vertex indices and adjacency lists.
    fn adjacency(&self) -> (BTreeMap<u64, usize>, Vec<Vec<usize>>) {
        let index: BTreeMap<u64, usize> = self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            let (i, j) = (index[&a], index[&b]);
            adj[i].push(j);
            adj[j].push(i);
        }
        (index, adj)
    }
}

pub fn pattern_graph(n: u64) -> Result<PatternGraph> {
    if n < 7 {
        return domain("pattern graph needs N >= 7");
    }
    if n > MAX_GRAPH_N {
        return capacity(format!("N = {n} exceeds {MAX_GRAPH_N}"));
    }
    let mut edges = Vec::new();
    let mut y = 3u64;
    while y * (y + 1) <= n {
        let mut x = y + 1;
        while x * y <= n {
            edges.push((x + y, x * y));
            x += 1;
        }
        y += 1;
    }
    edges.sort_unstable();
    edges.dedup();
    let mut vertices: Vec<u64> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    vertices.sort_unstable();
    vertices.dedup();
    Ok(PatternGraph { n, vertices, edges })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Colorable,
    NotColorable,
    /// The node budget ran out.
    Indeterminate,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub method: String,
    pub nodes: u64,
    pub max_depth: u64,
    pub vertices: u64,
    pub edges: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchCertificate {
    pub r: u32,
    pub n: u64,
    pub verdict: Verdict,
    /// Proper coloring of `[N]` (unconstrained integers get 0).
    pub coloring: Option<Coloring>,
    /// Odd cycle `v_0, ..., v_{2m}` (closing edge back to `v_0`), for `r = 2`.
    pub odd_cycle: Option<Vec<u64>>,
    /// An edge, which refutes `r = 1`.
    pub edge: Option<(u64, u64)>,
    pub trace: Trace,
}

impl SearchCertificate {
    /// Independent re-check of whatever the certificate claims.
    pub fn verify(&self) -> bool {
        match self.verdict {
            Verdict::Colorable => self.coloring.as_ref().is_some_and(|c| {
                c.n() == self.n && c.r() <= self.r && find_monochromatic(c).is_none()
            }),
            Verdict::NotColorable => match self.r {
                1 => self.edge.is_some_and(|(a, b)| is_edge(a, b, self.n)),
                2 => self.odd_cycle.as_ref().is_some_and(|cyc| {
                    cyc.len() % 2 == 1 && (0..cyc.len()).all(|i| is_edge(cyc[i], cyc[(i + 1) % cyc.len()], self.n))
                }),
                // refutations for r >= 3 carry only the search trace
                _ => true,
            },
            Verdict::Indeterminate => false,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Whether `{a, b}` is `{x + y, xy}` for some `x > y > 2` with `xy <= n`.
pub fn is_edge(a: u64, b: u64, n: u64) -> bool {
    let (s, p) = (a.min(b), a.max(b));
    if p > n {
        return false;
    }
    // x, y are the roots of t^2 - s t + p
    let disc = (s as i128) * (s as i128) - 4 * p as i128;
    if disc <= 0 {
        return false;
    }
    let r = (disc as f64).sqrt().round() as i128;
    let root = (r - 1..=r + 1).find(|&t| t >= 0 && t * t == disc);
    match root {
        Some(t) if (s as i128 + t) % 2 == 0 => {
            let x = (s as i128 + t) / 2;
            let y = (s as i128 - t) / 2;
            x > y && y > 2
        }
        _ => false,
    }
}

fn full_coloring(n: u64, r: u32, g: &PatternGraph, col: &[u16]) -> Result<Coloring> {
    let mut colors = vec![0u16; n as usize];
    for (i, &v) in g.vertices.iter().enumerate() {
        colors[(v - 1) as usize] = col[i];
    }
    Coloring::new(r, colors)
}

fn trace(method: &str, g: &PatternGraph) -> Trace {
    Trace {
        method: method.into(),
        vertices: g.vertices.len() as u64,
        edges: g.edges.len() as u64,
        ..Default::default()
    }
}

/// BFS 2-coloring; `Err` carries an odd cycle.
fn bipartition(adj: &[Vec<usize>]) -> std::result::Result<Vec<u16>, Vec<usize>> {
    let n = adj.len();
    let mut side = vec![u16::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    for s in 0..n {
        if side[s] != u16::MAX {
            continue;
        }
        side[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in &adj[u] {
                if side[v] == u16::MAX {
                    side[v] = 1 - side[u];
                    parent[v] = u;
                    depth[v] = depth[u] + 1;
                    q.push_back(v);
                } else if side[v] == side[u] {
                    // tree paths from u and v up to their common ancestor
                    let (mut a, mut b) = (u, v);
                    let mut left = vec![a];
                    let mut right = vec![b];
                    while depth[a] > depth[b] {
                        a = parent[a];
                        left.push(a);
                    }
                    while depth[b] > depth[a] {
                        b = parent[b];
                        right.push(b);
                    }
                    while a != b {
                        a = parent[a];
                        b = parent[b];
                        left.push(a);
                        right.push(b);
                    }
                    right.pop();
                    right.reverse();
                    left.extend(right);
                    return Err(left);
                }
            }
        }
    }
    Ok(side)
}

/// DSATUR backtracking with new colors opened in order (which fixes the
/// first vertex to 0 and the second to at most 1).
struct Dsatur<'a> {
    adj: &'a [Vec<usize>],
    r: usize,
    col: Vec<u16>,
    /// `sat[v * r + c]`: colored neighbors of `v` with color `c`.
    sat: Vec<u32>,
    satdeg: Vec<u32>,
    nodes: u64,
    max_depth: u64,
    budget: u64,
}

const NONE: u16 = u16::MAX;

impl Dsatur<'_> {
    fn assign(&mut self, v: usize, c: u16) {
        self.col[v] = c;
        let adj = self.adj;
        for &u in &adj[v] {
            let k = u * self.r + c as usize;
            if self.sat[k] == 0 {
                self.satdeg[u] += 1;
            }
            self.sat[k] += 1;
        }
    }

    fn unassign(&mut self, v: usize) {
        let c = self.col[v];
        self.col[v] = NONE;
        let adj = self.adj;
        for &u in &adj[v] {
            let k = u * self.r + c as usize;
            self.sat[k] -= 1;
            if self.sat[k] == 0 {
                self.satdeg[u] -= 1;
            }
        }
    }

    fn pick(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for v in 0..self.col.len() {
            if self.col[v] != NONE {
                continue;
            }
            best = match best {
                None => Some(v),
                Some(b) => {
                    let kv = (self.satdeg[v], self.adj[v].len());
                    let kb = (self.satdeg[b], self.adj[b].len());
                    if kv > kb {
                        Some(v)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        best
    }

    /// `Some(true)` solved, `Some(false)` refuted, `None` out of budget.
    fn solve(&mut self) -> Option<bool> {
        // (vertex, its color, colors in use before it)
        let mut stack: Vec<(usize, u16, u16)> = Vec::new();
        let mut used = 0u16;
        loop {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let Some(mut v) = self.pick() else { return Some(true) };
            let mut start = 0u16;
            loop {
                let limit = (used as usize + 1).min(self.r) as u16;
                let c = (start..limit).find(|&c| self.sat[v * self.r + c as usize] == 0);
                if let Some(c) = c {
                    self.assign(v, c);
                    stack.push((v, c, used));
                    used = used.max(c + 1);
                    self.max_depth = self.max_depth.max(stack.len() as u64);
                    break;
                }
                let Some((pv, pc, pused)) = stack.pop() else { return Some(false) };
                self.unassign(pv);
                used = pused;
                v = pv;
                start = pc + 1;
            }
        }
    }
}

/// Decides whether the pattern graph on `[N]` is `r`-colorable.
pub fn colorability(n: u64, r: u32, node_budget: u64) -> Result<SearchCertificate> {
    if r == 0 {
        return domain("r must be positive");
    }
    let g = pattern_graph(n.max(7))?;
    let n_eff = n.max(7);
    let (_, adj) = g.adjacency();
    let mut cert = SearchCertificate {
        r,
        n: n_eff,
        verdict: Verdict::Colorable,
        coloring: None,
        odd_cycle: None,
        edge: None,
        trace: Trace::default(),
    };
    match r {
        1 => {
            cert.trace = trace("edge-scan", &g);
            if let Some(&e) = g.edges.first() {
                cert.verdict = Verdict::NotColorable;
                cert.edge = Some(e);
            } else {
                cert.coloring = Some(Coloring::monochrome(n_eff, 1)?);
            }
        }
        2 => {
            cert.trace = trace("bfs-bipartition", &g);
            match bipartition(&adj) {
                Ok(side) => cert.coloring = Some(full_coloring(n_eff, 2, &g, &side)?),
                Err(cyc) => {
                    cert.verdict = Verdict::NotColorable;
                    cert.odd_cycle = Some(cyc.into_iter().map(|i| g.vertices[i]).collect());
                }
            }
        }
        _ => {
            let k = g.vertices.len();
            let mut d = Dsatur {
                adj: &adj,
                r: r as usize,
                col: vec![NONE; k],
                sat: vec![0; k * r as usize],
                satdeg: vec![0; k],
                nodes: 0,
                max_depth: 0,
                budget: node_budget,
            };
            let res = d.solve();
            cert.trace = Trace {
                nodes: d.nodes,
                max_depth: d.max_depth,
                ..trace("dsatur", &g)
            };
            match res {
                Some(true) => cert.coloring = Some(full_coloring(n_eff, r, &g, &d.col)?),
                Some(false) => cert.verdict = Verdict::NotColorable,
                None => cert.verdict = Verdict::Indeterminate,
            }
        }
    }
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub r: u32,
    pub n_max: u64,
    /// Least `N` with no `r`-coloring avoiding the pattern.
    pub threshold: Option<u64>,
    /// Colorable certificate at `N* - 1`.
    pub below: Option<SearchCertificate>,
    /// Non-colorable certificate at `N*`.
    pub at: Option<SearchCertificate>,
    pub note: String,
}

/// Least `N <= n_max` whose pattern graph is not `r`-colorable.
///
/// `r <= 2` grows a parity union-find edge by edge. For `r >= 3` the
/// previous coloring is extended greedily to each new vertex and DSATUR is
/// rerun only when that fails.
pub fn sp_number(r: u32, n_max: u64, node_budget: u64) -> Result<ThresholdResult> {
    if r == 0 {
        return domain("r must be positive");
    }
    if n_max > MAX_GRAPH_N {
        return capacity(format!("n_max = {n_max} exceeds {MAX_GRAPH_N}"));
    }
    let found = match r {
        1 => (12 <= n_max).then_some(12).map(Ok),
        2 => first_odd_cycle(n_max).map(Ok),
        _ => first_uncolorable(r, n_max, node_budget),
    };
    let mut out = ThresholdResult {
        r,
        n_max,
        threshold: None,
        below: None,
        at: None,
        note: String::new(),
    };
    match found {
        Some(Ok(n)) => {
            out.threshold = Some(n);
            out.below = Some(colorability(n - 1, r, node_budget)?);
            out.at = Some(colorability(n, r, node_budget)?);
        }
        Some(Err(msg)) => out.note = msg,
        None => out.note = format!("every N <= {n_max} is {r}-colorable; no threshold claimed"),
    }
    Ok(out)
}

fn first_odd_cycle(n_max: u64) -> Option<u64> {
    let size = n_max as usize + 1;
    let mut parent: Vec<usize> = (0..size).collect();
    let mut parity = vec![0u8; size];
    fn find(parent: &mut [usize], parity: &mut [u8], v: usize) -> (usize, u8) {
        let mut path = Vec::new();
        let mut u = v;
        while parent[u] != u {
            path.push(u);
            u = parent[u];
        }
        // compress, accumulating parity to the root
        let root = u;
        let mut acc = 0u8;
        for &w in path.iter().rev() {
            acc ^= parity[w];
            parity[w] = acc;
            parent[w] = root;
        }
        (root, parity[v] * (v != root) as u8)
    }
    for n in 12..=n_max {
        for (a, b) in PatternGraph::edges_at(n) {
            let (ra, pa) = find(&mut parent, &mut parity, a as usize);
            let (rb, pb) = find(&mut parent, &mut parity, b as usize);
            if ra == rb {
                if pa == pb {
                    return Some(n);
                }
            } else {
                parent[ra] = rb;
                parity[ra] = pa ^ pb ^ 1;
            }
        }
    }
    None
}

fn first_uncolorable(r: u32, n_max: u64, budget: u64) -> Option<std::result::Result<u64, String>> {
    // colors of [1, n], grown incrementally
    let mut col: Vec<u16> = vec![0; 12];
    for n in 12..=n_max {
        let nbrs: Vec<u64> = PatternGraph::edges_at(n).into_iter().map(|(s, _)| s).collect();
        let mut free = vec![true; r as usize];
        for &s in &nbrs {
            free[col[(s - 1) as usize] as usize] = false;
        }
        if col.len() < n as usize {
            col.push(0);
        }
        if let Some(c) = free.iter().position(|&f| f) {
            col[(n - 1) as usize] = c as u16;
            continue;
        }
        match colorability(n, r, budget) {
            Ok(cert) => match cert.verdict {
                Verdict::Colorable => col = cert.coloring.unwrap().colors().to_vec(),
                Verdict::NotColorable => return Some(Ok(n)),
                Verdict::Indeterminate => {
                    return Some(Err(format!(
                        "node budget {budget} exhausted at N = {n}; no threshold claimed"
                    )))
                }
            },
            Err(e) => return Some(Err(e.to_string())),
        }
    }
    None
}

#[cfg(test)]
mod tests;
