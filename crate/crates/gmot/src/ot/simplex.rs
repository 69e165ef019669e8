//! Exact network-simplex solver for the uniform-marginal transportation
//! problem.
//!
//! The LP: minimize Σᵢⱼ C[i][j]·π[i][j] over couplings π with row sums
//! 1/n₁ and column sums 1/n₂. Internally everything is integer: source i
//! supplies n₂ units, sink j demands n₁ units (total n₁·n₂), so basic
//! flows stay exact integers and the returned plan entries are integer
//! multiples of 1/(n₁·n₂).
//!
//! Implementation notes:
//!
//! * Initial basis: every node hangs off an artificial root by a big-M
//!   arc carrying its full supply/demand. Artificial arcs are never priced
//!   for entry, so once driven out they stay out.
//! * Entering arc: block search over the real arcs with a persistent
//!   cursor — deterministic, first best-in-block, strict improvement over
//!   a scale-aware epsilon.
//! * Leaving arc: Cunningham's strongly feasible rule — the last blocking
//!   arc along the cycle's orientation starting at the apex — which
//!   prevents cycling under degeneracy.
//! * Potentials are updated incrementally on the re-hung subtree and
//!   refreshed from scratch periodically to cap floating-point drift.
//!
//! The returned plan is a vertex of the transportation polytope, so it
//! has at most n₁+n₂−1 nonzero entries.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// Sentinel arc id: the node's tree arc is its artificial root arc.
const ART: usize = usize::MAX;

/// Recompute all potentials exactly after this many pivots.
const REFRESH_INTERVAL: usize = 128;

struct Simplex<'a> {
    n1: usize,
    n2: usize,
    /// Row-major n1×n2 real-arc costs.
    costs: &'a [f64],
    /// Cost of the artificial root arcs (big-M).
    big: f64,
    /// Entering threshold: an arc enters only if its reduced cost is
    /// below −eps.
    eps: f64,
    /// Flow on real arc a = i·n2 + j (source i → sink j).
    flow: Vec<i64>,
    /// Flow on each node's artificial root arc.
    art_flow: Vec<i64>,
    // Spanning-tree structure over nodes 0..n1 (sources), n1..n1+n2
    // (sinks), root = n1+n2.
    parent: Vec<usize>,
    /// Tree arc linking a node to its parent (real arc id or ART).
    pred: Vec<usize>,
    /// True if the pred arc is oriented node → parent.
    up: Vec<bool>,
    pi: Vec<f64>,
    depth: Vec<u32>,
    children: Vec<Vec<usize>>,
    /// Block-search cursor.
    next_arc: usize,
    block: usize,
}

impl<'a> Simplex<'a> {
    fn new(n1: usize, n2: usize, costs: &'a [f64]) -> Self {
        let nodes = n1 + n2;
        let root = nodes;
        let max_abs = costs.iter().fold(0.0f64, |m, &c| m.max(c.abs()));
        let big = 4.0 * (nodes as f64 + 1.0) * (1.0 + max_abs);
        let eps = 1e-11 * (1.0 + max_abs);

        let mut parent = vec![root; nodes + 1];
        parent[root] = root;
        let pred = vec![ART; nodes + 1];
        let mut up = vec![false; nodes + 1];
        let mut pi = vec![0.0; nodes + 1];
        let mut depth = vec![1u32; nodes + 1];
        depth[root] = 0;
        let mut art_flow = vec![0i64; nodes];
        for i in 0..n1 {
            up[i] = true; // source → root
            pi[i] = -big;
            art_flow[i] = n2 as i64;
        }
        for j in n1..nodes {
            up[j] = false; // root → sink
            pi[j] = big;
            art_flow[j] = n1 as i64;
        }
        let mut children = vec![Vec::new(); nodes + 1];
        children[root] = (0..nodes).collect();

        let m = n1 * n2;
        let block = (m as f64).sqrt().ceil() as usize;
        Simplex {
            n1,
            n2,
            costs,
            big,
            eps,
            flow: vec![0; m],
            art_flow,
            parent,
            pred,
            up,
            pi,
            depth,
            children,
            next_arc: 0,
            block: block.clamp(1, m),
        }
    }

    fn tree_flow(&self, u: usize) -> i64 {
        match self.pred[u] {
            ART => self.art_flow[u],
            a => self.flow[a],
        }
    }

    fn add_tree_flow(&mut self, u: usize, d: i64) {
        match self.pred[u] {
            ART => self.art_flow[u] += d,
            a => self.flow[a] += d,
        }
    }

    fn pred_cost(&self, u: usize) -> f64 {
        match self.pred[u] {
            ART => self.big,
            a => self.costs[a],
        }
    }

    /// Most negative reduced cost in the next block containing one, with a
    /// persistent cursor so successive pivots sweep the arc list fairly.
    fn find_entering(&mut self) -> Option<usize> {
        let m = self.costs.len();
        let mut scanned = 0;
        let mut a = self.next_arc;
        while scanned < m {
            let mut best = usize::MAX;
            let mut best_rc = -self.eps;
            for _ in 0..self.block.min(m - scanned) {
                let rc = self.costs[a] + self.pi[a / self.n2] - self.pi[self.n1 + a % self.n2];
                if rc < best_rc {
                    best_rc = rc;
                    best = a;
                }
                a += 1;
                if a == m {
                    a = 0;
                }
                scanned += 1;
            }
            if best != usize::MAX {
                self.next_arc = a;
                return Some(best);
            }
        }
        None
    }

    fn lca(&self, mut u: usize, mut v: usize) -> usize {
        while self.depth[u] > self.depth[v] {
            u = self.parent[u];
        }
        while self.depth[v] > self.depth[u] {
            v = self.parent[v];
        }
        while u != v {
            u = self.parent[u];
            v = self.parent[v];
        }
        u
    }

    fn pivot(&mut self, e: usize) -> Result<()> {
        let s = e / self.n2;
        let t = self.n1 + e % self.n2;
        let join = self.lca(s, t);

        // Bounding arcs: pushing δ along s→t decreases flow on tree arcs
        // traversed against their orientation. On the source side the
        // cycle runs parent→node, so node→parent arcs bound; on the
        // target side it runs node→parent, so parent→node arcs bound.
        // Ties keep the arc occurring last along the cycle's orientation
        // from the apex (strict < on the source side, which the cycle
        // visits in reverse, then ≤ on the target side): the strongly
        // feasible choice.
        let mut delta = i64::MAX;
        let mut leave = usize::MAX;
        let mut target_side = false;
        let mut u = s;
        while u != join {
            if self.up[u] {
                let f = self.tree_flow(u);
                if f < delta {
                    delta = f;
                    leave = u;
                    target_side = false;
                }
            }
            u = self.parent[u];
        }
        let mut u = t;
        while u != join {
            if !self.up[u] {
                let f = self.tree_flow(u);
                if f <= delta {
                    delta = f;
                    leave = u;
                    target_side = true;
                }
            }
            u = self.parent[u];
        }
        if leave == usize::MAX {
            return Err(Error::Numerical(
                "transportation cycle without a reverse arc".into(),
            ));
        }

        // Push δ around the cycle.
        if delta > 0 {
            self.flow[e] += delta;
            let mut u = s;
            while u != join {
                let d = if self.up[u] { -delta } else { delta };
                self.add_tree_flow(u, d);
                u = self.parent[u];
            }
            let mut u = t;
            while u != join {
                let d = if self.up[u] { delta } else { -delta };
                self.add_tree_flow(u, d);
                u = self.parent[u];
            }
        }

        // Swap the entering arc in for the leaving arc: re-root the
        // detached subtree at the entering arc's endpoint inside it.
        let (u_in, new_parent, e_up) = if target_side {
            (t, s, false)
        } else {
            (s, t, true)
        };
        let rc = self.costs[e] + self.pi[s] - self.pi[t];
        let delta_pi = if target_side { rc } else { -rc };

        let mut u = u_in;
        let mut attach_parent = new_parent;
        let mut attach_pred = e;
        let mut attach_up = e_up;
        loop {
            let old_parent = self.parent[u];
            let old_pred = self.pred[u];
            let old_up = self.up[u];
            let pos = self.children[old_parent]
                .iter()
                .position(|&c| c == u)
                .expect("tree child lists stay consistent");
            self.children[old_parent].swap_remove(pos);
            self.parent[u] = attach_parent;
            self.pred[u] = attach_pred;
            self.up[u] = attach_up;
            self.children[attach_parent].push(u);
            if u == leave {
                break;
            }
            attach_parent = u;
            attach_pred = old_pred;
            attach_up = !old_up;
            u = old_parent;
        }

        // Shift potentials and recompute depths across the re-hung
        // subtree (parents are visited before their children).
        let mut stack = vec![u_in];
        while let Some(v) = stack.pop() {
            self.pi[v] += delta_pi;
            self.depth[v] = self.depth[self.parent[v]] + 1;
            stack.extend_from_slice(&self.children[v]);
        }
        Ok(())
    }

    /// Recompute every potential exactly from the tree.
    fn refresh_potentials(&mut self) {
        let root = self.n1 + self.n2;
        self.pi[root] = 0.0;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            if v != root {
                let c = self.pred_cost(v);
                self.pi[v] = if self.up[v] {
                    self.pi[self.parent[v]] - c
                } else {
                    self.pi[self.parent[v]] + c
                };
            }
            stack.extend_from_slice(&self.children[v]);
        }
    }

    fn run(&mut self) -> Result<()> {
        let m = self.costs.len();
        let max_pivots = 64 * (m + self.n1 + self.n2) + 4096;
        let mut pivots = 0;
        while let Some(e) = self.find_entering() {
            self.pivot(e)?;
            pivots += 1;
            if pivots % REFRESH_INTERVAL == 0 {
                self.refresh_potentials();
            }
            if pivots > max_pivots {
                return Err(Error::Numerical(format!(
                    "transportation solve exceeded {max_pivots} pivots"
                )));
            }
        }
        if self.art_flow.iter().any(|&f| f != 0) {
            return Err(Error::Numerical(
                "transportation solve left flow on artificial arcs".into(),
            ));
        }
        Ok(())
    }
}

/// Solves the transportation problem with uniform marginals (1/n₁ per
/// row, 1/n₂ per column) exactly; returns the vertex-optimal plan.
pub(crate) fn solve_uniform(costs: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let (n1, n2) = costs.dim();
    if n1 == 0 || n2 == 0 {
        return Err(Error::Shape("cost matrix must be non-empty".into()));
    }
    if let Some(bad) = costs.iter().find(|c| !c.is_finite()) {
        return Err(Error::Numerical(format!(
            "cost matrix contains a non-finite entry {bad}"
        )));
    }
    let flat: Vec<f64> = costs.iter().copied().collect();
    let mut simplex = Simplex::new(n1, n2, &flat);
    simplex.run()?;
    let total = (n1 * n2) as f64;
    Ok(Array2::from_shape_fn((n1, n2), |(i, j)| {
        simplex.flow[i * n2 + j] as f64 / total
    }))
}
