//! Graph utilities: union-find, Kruskal, components, Stoer-Wagner global
//! minimum cut and a dense max-flow.

use crate::error::{OmtError, Result};
use crate::instance::Instance;

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the two sets; false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Minimum spanning tree over the complete subgraph induced by `nodes`.
/// Edge ties are broken by (cost, min endpoint, max endpoint).
pub fn kruskal_mst(inst: &Instance, nodes: &[usize]) -> Result<(Vec<(usize, usize)>, f64)> {
    if nodes.is_empty() {
        return Err(OmtError::InvalidArgument("kruskal_mst needs at least one node".into()));
    }
    Ok(kruskal_by(inst.n(), nodes, |a, b| inst.c(a, b)))
}

/// Kruskal over an arbitrary symmetric cost function.
pub fn kruskal_by<F: Fn(usize, usize) -> f64>(n: usize, nodes: &[usize], cost: F) -> (Vec<(usize, usize)>, f64) {
    let mut es = Vec::with_capacity(nodes.len() * nodes.len() / 2);
    for (k, &a) in nodes.iter().enumerate() {
        for &b in &nodes[k + 1..] {
            let (i, j) = (a.min(b), a.max(b));
            es.push((cost(i, j), i, j));
        }
    }
    es.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut dsu = UnionFind::new(n);
    let mut tree = Vec::with_capacity(nodes.len().saturating_sub(1));
    let mut total = 0.0;
    for (c, i, j) in es {
        if dsu.union(i, j) {
            tree.push((i, j));
            total += c;
            if tree.len() + 1 == nodes.len() {
                break;
            }
        }
    }
    tree.sort_unstable();
    (tree, total)
}

/// Connected components (each sorted, ordered by smallest member).
pub fn components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut dsu = UnionFind::new(n);
    for &(a, b) in edges {
        dsu.union(a, b);
    }
    let mut label = vec![usize::MAX; n];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let r = dsu.find(v);
        if label[r] == usize::MAX {
            label[r] = out.len();
            out.push(Vec::new());
        }
        out[label[r]].push(v);
    }
    out
}

/// Global minimum cut of a symmetric weight matrix (row-major n×n).
/// Returns the cut weight and one shore. Needs n ≥ 2.
pub fn stoer_wagner(n: usize, w: &[f64]) -> (f64, Vec<usize>) {
    assert!(n >= 2, "stoer_wagner needs two nodes");
    let mut w = w.to_vec();
    // members[v]: original nodes merged into v
    let mut members: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut best = (f64::INFINITY, Vec::new());
    while active.len() > 1 {
        let mut key = vec![0.0; n];
        let mut added = vec![false; n];
        let mut prev = active[0];
        let mut last = active[0];
        for step in 0..active.len() {
            let mut sel = usize::MAX;
            for &v in &active {
                if !added[v] && (sel == usize::MAX || key[v] > key[sel]) {
                    sel = v;
                }
            }
            added[sel] = true;
            if step + 1 == active.len() {
                if key[sel] < best.0 {
                    let mut shore = members[sel].clone();
                    shore.sort_unstable();
                    best = (key[sel], shore);
                }
                prev = last;
                last = sel;
                break;
            }
            prev = last;
            last = sel;
            for &v in &active {
                if !added[v] {
                    key[v] += w[sel * n + v];
                }
            }
        }
        // merge last into prev
        let moved = std::mem::take(&mut members[last]);
        members[prev].extend(moved);
        for &v in &active {
            w[prev * n + v] += w[last * n + v];
            w[v * n + prev] = w[prev * n + v];
        }
        w[prev * n + prev] = 0.0;
        active.retain(|&v| v != last);
    }
    best
}

/// Dense max-flow (Edmonds-Karp). Returns the flow value and the set of
/// nodes reachable from `s` in the final residual graph.
pub fn max_flow(n: usize, cap: &[f64], s: usize, t: usize) -> (f64, Vec<bool>) {
    const EPS: f64 = 1e-12;
    let mut res = cap.to_vec();
    let mut flow = 0.0;
    loop {
        let mut pred = vec![usize::MAX; n];
        pred[s] = s;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if pred[v] == usize::MAX && res[u * n + v] > EPS {
                    pred[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if pred[t] == usize::MAX {
            let reach = pred.iter().map(|&p| p != usize::MAX).collect();
            return (flow, reach);
        }
        let mut bottleneck = f64::INFINITY;
        let mut v = t;
        while v != s {
            let u = pred[v];
            bottleneck = bottleneck.min(res[u * n + v]);
            v = u;
        }
        let mut v = t;
        while v != s {
            let u = pred[v];
            res[u * n + v] -= bottleneck;
            res[v * n + u] += bottleneck;
            v = u;
        }
        flow += bottleneck;
    }
}
