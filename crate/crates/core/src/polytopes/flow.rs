//! DAG s-t flow networks and the unit-flow polytope over their edges.
//!
//! Coordinate `i` of a flow vector is the flow on edge `i` in the order the
//! edges were supplied; that correspondence is part of the file-format
//! contract.

use std::path::Path;

use crate::error::{Error, Result};
use crate::polytopes::{CaratheodoryRep, PolytopeGeometry};

/// A directed acyclic graph with distinguished source and target.
///
/// Construction validates that the graph is acyclic and that every edge lies
/// on at least one s-t path; an edge failing that would carry identically
/// zero flow and is rejected outright.
#[derive(Debug, Clone)]
pub struct DagFlowNetwork {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    source: usize,
    target: usize,
    topo_order: Vec<usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    longest_path_edges: usize,
}

impl DagFlowNetwork {
    pub fn new(
        num_vertices: usize,
        edges: Vec<(usize, usize)>,
        source: usize,
        target: usize,
    ) -> Result<Self> {
        if num_vertices == 0 {
            return Err(Error::InvalidDimension("network needs at least one vertex".into()));
        }
        if source >= num_vertices || target >= num_vertices {
            return Err(Error::InvalidParameter(format!(
                "source {source} or target {target} out of range for {num_vertices} vertices"
            )));
        }
        if source == target {
            return Err(Error::InvalidParameter("source and target must differ".into()));
        }
        if edges.is_empty() {
            return Err(Error::InvalidParameter("network has no edges, hence no s-t path".into()));
        }
        let mut out_edges = vec![Vec::new(); num_vertices];
        let mut in_edges = vec![Vec::new(); num_vertices];
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::InvalidParameter(format!(
                    "edge {i} = ({u}, {v}) references a vertex out of range"
                )));
            }
            out_edges[u].push(i);
            in_edges[v].push(i);
        }

        let topo_order = topological_order(num_vertices, &edges, &out_edges)?;

        // Every edge must lie on an s-t path: tail reachable from s, head
        // co-reachable from t.
        let from_s = reach(num_vertices, &out_edges, &edges, source, true);
        let to_t = reach(num_vertices, &in_edges, &edges, target, false);
        if !from_s[target] {
            return Err(Error::InvalidParameter("no s-t path exists".into()));
        }
        for (i, &(u, v)) in edges.iter().enumerate() {
            if !from_s[u] || !to_t[v] {
                return Err(Error::InvalidParameter(format!(
                    "edge {i} = ({u}, {v}) lies on no s-t path"
                )));
            }
        }

        let longest_path_edges =
            longest_path(num_vertices, &edges, &out_edges, &topo_order, source, target);

        Ok(Self {
            num_vertices,
            edges,
            source,
            target,
            topo_order,
            out_edges,
            in_edges,
            longest_path_edges,
        })
    }

    /// Parses the text format: first line `V E s t`, then `E` lines
    /// `tail head` (0-indexed). Edge order defines coordinate order.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace().map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("expected an integer, got {t:?}")))
        });
        let mut next = |what: &str| {
            tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("unexpected end of input, expected {what}")))?
        };
        let v = next("vertex count")?;
        let e = next("edge count")?;
        let s = next("source")?;
        let t = next("target")?;
        let mut edges = Vec::with_capacity(e);
        for i in 0..e {
            let tail = next(&format!("tail of edge {i}"))?;
            let head = next(&format!("head of edge {i}"))?;
            edges.push((tail, head));
        }
        if tokens.next().is_some() {
            return Err(Error::Parse("trailing tokens after edge list".into()));
        }
        Self::new(v, edges, s, t)
    }

    pub fn from_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    /// Renders the same text format accepted by [`DagFlowNetwork::from_text`].
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} {} {} {}\n",
            self.num_vertices,
            self.edges.len(),
            self.source,
            self.target
        );
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    /// A layered DAG: source, `layers` ranks of `width` vertices with full
    /// bipartite connections between consecutive ranks, then target.
    pub fn layered(layers: usize, width: usize) -> Result<Self> {
        if layers == 0 || width == 0 {
            return Err(Error::InvalidParameter("layers and width must be positive".into()));
        }
        let num_vertices = 2 + layers * width;
        let source = 0;
        let target = num_vertices - 1;
        let node = |layer: usize, slot: usize| 1 + layer * width + slot;
        let mut edges = Vec::new();
        for j in 0..width {
            edges.push((source, node(0, j)));
        }
        for l in 0..layers - 1 {
            for a in 0..width {
                for b in 0..width {
                    edges.push((node(l, a), node(l + 1, b)));
                }
            }
        }
        for j in 0..width {
            edges.push((node(layers - 1, j), target));
        }
        Self::new(num_vertices, edges, source, target)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Number of edges on the longest s-t path.
    pub fn longest_path_edges(&self) -> usize {
        self.longest_path_edges
    }
}

fn topological_order(
    n: usize,
    edges: &[(usize, usize)],
    out_edges: &[Vec<usize>],
) -> Result<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    for &(_, v) in edges {
        indeg[v] += 1;
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(u) = queue.pop() {
        order.push(u);
        for &e in &out_edges[u] {
            let v = edges[e].1;
            indeg[v] -= 1;
            if indeg[v] == 0 {
                queue.push(v);
            }
        }
    }
    if order.len() != n {
        return Err(Error::InvalidParameter("graph contains a cycle".into()));
    }
    Ok(order)
}

fn reach(
    n: usize,
    adjacency: &[Vec<usize>],
    edges: &[(usize, usize)],
    start: usize,
    forward: bool,
) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for &e in &adjacency[u] {
            let next = if forward { edges[e].1 } else { edges[e].0 };
            if !seen[next] {
                seen[next] = true;
                stack.push(next);
            }
        }
    }
    seen
}

fn longest_path(
    n: usize,
    edges: &[(usize, usize)],
    out_edges: &[Vec<usize>],
    topo_order: &[usize],
    source: usize,
    target: usize,
) -> usize {
    let mut best = vec![usize::MIN; n];
    let mut reachable = vec![false; n];
    reachable[source] = true;
    best[source] = 0;
    for &u in topo_order {
        if !reachable[u] {
            continue;
        }
        for &e in &out_edges[u] {
            let v = edges[e].1;
            if !reachable[v] || best[u] + 1 > best[v] {
                reachable[v] = true;
                best[v] = best[u] + 1;
            }
        }
    }
    best[target]
}

/// The polytope of unit s-t flows over a [`DagFlowNetwork`].
#[derive(Debug, Clone)]
pub struct FlowPolytope {
    network: DagFlowNetwork,
    eta_override: Option<f64>,
}

impl FlowPolytope {
    pub fn new(network: DagFlowNetwork) -> Self {
        Self { network, eta_override: None }
    }

    /// Overrides the geometry heuristic with a known constant.
    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta_override = Some(eta);
        self
    }

    pub fn network(&self) -> &DagFlowNetwork {
        &self.network
    }

    pub fn eta_override(&self) -> Option<f64> {
        self.eta_override
    }

    pub fn ambient_dim(&self) -> usize {
        self.network.num_edges()
    }

    /// Indicator of the minimum-weight s-t path under edge weights `c`,
    /// computed by one relaxation pass in topological order. Negative weights
    /// are fine on a DAG. Ties resolve deterministically: the first
    /// improvement in (topological, edge-index) order is kept.
    pub fn min_cost_path_flow(&self, c: &[f64]) -> Vec<f64> {
        let net = &self.network;
        let n = net.num_vertices;
        let mut dist = vec![f64::INFINITY; n];
        let mut pred: Vec<Option<usize>> = vec![None; n];
        dist[net.source] = 0.0;
        for &u in &net.topo_order {
            if !dist[u].is_finite() {
                continue;
            }
            for &e in &net.out_edges[u] {
                let v = net.edges[e].1;
                let cand = dist[u] + c[e];
                if cand < dist[v] {
                    dist[v] = cand;
                    pred[v] = Some(e);
                }
            }
        }
        let mut flow = vec![0.0; net.num_edges()];
        let mut v = net.target;
        while v != net.source {
            let e = pred[v].expect("target reachable from source by construction");
            flow[e] = 1.0;
            v = net.edges[e].0;
        }
        flow
    }

    /// Feasibility: bounds, conservation at internal vertices, and unit net
    /// outflow at the source.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let net = &self.network;
        if x.len() != net.num_edges() || x.iter().any(|&v| v < -tol || v > 1.0 + tol) {
            return false;
        }
        for v in 0..net.num_vertices {
            let inflow: f64 = net.in_edges[v].iter().map(|&e| x[e]).sum();
            let outflow: f64 = net.out_edges[v].iter().map(|&e| x[e]).sum();
            let want = if v == net.source {
                1.0
            } else if v == net.target {
                -1.0
            } else {
                0.0
            };
            if (outflow - inflow - want).abs() > tol * net.num_edges() as f64 {
                return false;
            }
        }
        true
    }

    /// Vertex predicate: a 0/1 vector that is a feasible unit flow.
    pub fn is_unit_path_flow(&self, v: &[f64], tol: f64) -> bool {
        v.iter().all(|&x| x.abs() <= tol || (x - 1.0).abs() <= tol) && self.contains(v, tol)
    }

    /// Path-peeling Carathéodory decomposition: repeatedly remove the
    /// minimum-positive-flow edge together with one s-t path through it.
    /// Each round zeroes at least one edge, so at most `|E|` rounds run.
    pub fn caratheodory(&self, x: &[f64]) -> Result<CaratheodoryRep> {
        let net = &self.network;
        let m = net.num_edges();
        let mut residual = x.to_vec();
        // Flow entries below this are dead; clamping keeps the support
        // strictly decreasing in the presence of float dust.
        let dust = 1e-13;
        for r in residual.iter_mut() {
            if *r < dust {
                *r = 0.0;
            }
        }

        let mut atoms: Vec<(Vec<f64>, f64)> = Vec::new();
        for _round in 0..m {
            let mut min_edge = None;
            for e in 0..m {
                if residual[e] > 0.0
                    && min_edge.map_or(true, |b: usize| residual[e] < residual[b])
                {
                    min_edge = Some(e);
                }
            }
            let Some(e0) = min_edge else { break };
            let weight = residual[e0];

            let path = self.path_through(e0, &residual)?;
            let mut atom = vec![0.0; m];
            for &e in &path {
                atom[e] = 1.0;
                residual[e] -= weight;
                if residual[e] < dust {
                    residual[e] = 0.0;
                }
            }
            residual[e0] = 0.0;
            atoms.push((atom, weight));
        }

        if residual.iter().any(|&r| r > 1e-8) {
            return Err(Error::NumericalFailure(
                "flow peeling left a non-negligible residual".into(),
            ));
        }
        super::renormalize(&mut atoms);
        CaratheodoryRep::new(atoms, m)
    }

    /// Extends edge `e0` to an s-t path along surviving (positive-residual)
    /// edges, taking the first such edge in index order at each step.
    fn path_through(&self, e0: usize, residual: &[f64]) -> Result<Vec<usize>> {
        let net = &self.network;
        let mut back = Vec::new();
        let mut u = net.edges[e0].0;
        while u != net.source {
            let e = net.in_edges[u]
                .iter()
                .copied()
                .find(|&e| residual[e] > 0.0)
                .ok_or_else(|| {
                    Error::NumericalFailure(format!(
                        "no surviving incoming edge at vertex {u}; input is not a conserved flow"
                    ))
                })?;
            back.push(e);
            u = net.edges[e].0;
        }
        back.reverse();
        back.push(e0);
        let mut v = net.edges[e0].1;
        while v != net.target {
            let e = net.out_edges[v]
                .iter()
                .copied()
                .find(|&e| residual[e] > 0.0)
                .ok_or_else(|| {
                    Error::NumericalFailure(format!(
                        "no surviving outgoing edge at vertex {v}; input is not a conserved flow"
                    ))
                })?;
            back.push(e);
            v = net.edges[e].1;
        }
        Ok(back)
    }

    /// `D = eta = min(sqrt(2 * longest path), sqrt(n))`: two disjoint
    /// longest paths bound the vertex-pair distance, and `sqrt(n)` bounds it
    /// unconditionally.
    pub fn geometry(&self) -> PolytopeGeometry {
        let n = self.ambient_dim() as f64;
        let d = match self.eta_override {
            Some(eta) => eta,
            None => ((2 * self.network.longest_path_edges) as f64).sqrt().min(n.sqrt()),
        };
        PolytopeGeometry { diameter: d, eta: d, xi: Some(1.0), psi: Some(1.0) }
    }

    /// All s-t paths as indicator vectors. Exponential in general; test
    /// support only.
    pub(crate) fn enumerate_path_flows(&self, cap: usize) -> Result<Vec<Vec<f64>>> {
        let net = &self.network;
        let mut result = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        self.dfs_paths(net.source, &mut stack, &mut result, cap)?;
        Ok(result)
    }

    fn dfs_paths(
        &self,
        u: usize,
        stack: &mut Vec<usize>,
        result: &mut Vec<Vec<f64>>,
        cap: usize,
    ) -> Result<()> {
        let net = &self.network;
        if u == net.target {
            if result.len() >= cap {
                return Err(Error::Unsupported(format!("more than {cap} s-t paths")));
            }
            let mut flow = vec![0.0; net.num_edges()];
            for &e in stack.iter() {
                flow[e] = 1.0;
            }
            result.push(flow);
            return Ok(());
        }
        for &e in &net.out_edges[u] {
            stack.push(e);
            self.dfs_paths(net.edges[e].1, stack, result, cap)?;
            stack.pop();
        }
        Ok(())
    }
}
