//! Primal network simplex for uncapacitated minimum-cost flow
//!
//! ```text
//! minimise   Σ_e c_e x_e
//! subject to Σ_{e out of v} x_e − Σ_{e into v} x_e = supply_v,  x ≥ 0
//! ```
//!
//! The LP dual is `max Σ supply_v y_v` subject to `y_i − y_j ≤ c_ij` on every arc, which is
//! the discrete Lipschitz problem when the arcs carry the metric. Arcs can be added after a
//! solve; the current tree stays a feasible basis, so the next solve continues from it.
//!
//! The spanning tree is kept with parent pointers, depths and intrusive child lists. An
//! artificial root is joined to every node (node → root at cost 0 when `supply ≥ 0`, root →
//! node at cost `art_cost` otherwise); `art_cost` must exceed every shortest-path distance
//! so that artificial flow is driven out. Entering arcs are priced by block search; the
//! leaving arc follows the strongly-feasible tie rule (strict on the tail side, non-strict
//! on the head side), which rules out cycling on degenerate pivots.

use crate::error::{Error, Result};

const NONE: usize = usize::MAX;
/// Arc ids from here on are the artificial arcs, `ART + node`.
const ART: usize = usize::MAX / 2;

#[derive(Debug, Clone)]
pub(crate) struct FlowSolution {
    /// Dual potential `y_v` with `y_i − y_j ≤ c_ij` on every arc.
    pub potential: Vec<f64>,
    /// Optimal primal cost.
    pub cost: f64,
}

pub(crate) struct FlowNetwork {
    n: usize,
    tail: Vec<usize>,
    head: Vec<usize>,
    cost: Vec<f64>,
    art_cost: f64,
    art_up: Vec<bool>,
    eps: f64,

    parent: Vec<usize>,
    pred_arc: Vec<usize>,
    /// The tree arc into a node is oriented node → parent.
    pred_up: Vec<bool>,
    flow: Vec<f64>,
    depth: Vec<usize>,
    first_child: Vec<usize>,
    next_sib: Vec<usize>,
    prev_sib: Vec<usize>,
    pi: Vec<f64>,

    next_arc: usize,
    stack: Vec<usize>,
    pivots: usize,
}

impl FlowNetwork {
    /// `supply` must sum to zero up to rounding; `art_cost` must exceed every shortest-path
    /// distance of the final arc set.
    pub(crate) fn new(supply: &[f64], art_cost: f64) -> Self {
        let n = supply.len();
        let root = n;
        let mut net = Self {
            n,
            tail: Vec::new(),
            head: Vec::new(),
            cost: Vec::new(),
            art_cost,
            art_up: supply.iter().map(|&s| s >= 0.0).collect(),
            eps: 1e-12 * art_cost.max(1.0),
            parent: vec![root; n + 1],
            pred_arc: (0..=n).map(|u| ART + u).collect(),
            pred_up: vec![false; n + 1],
            flow: vec![0.0; n + 1],
            depth: vec![1; n + 1],
            first_child: vec![NONE; n + 1],
            next_sib: vec![NONE; n + 1],
            prev_sib: vec![NONE; n + 1],
            pi: vec![0.0; n + 1],
            next_arc: 0,
            stack: Vec::new(),
            pivots: 0,
        };
        net.parent[root] = NONE;
        net.pred_arc[root] = NONE;
        net.depth[root] = 0;
        for u in 0..n {
            if net.art_up[u] {
                net.pred_up[u] = true;
                net.flow[u] = supply[u];
            } else {
                net.pred_up[u] = false;
                net.flow[u] = -supply[u];
                net.pi[u] = art_cost;
            }
            net.add_child(root, u);
        }
        net
    }

    /// A network whose first arcs join every node to `hub` in both directions at
    /// `hub_cost[u]`, started from the feasible star tree that routes all flow through the
    /// hub instead of the artificial root.
    pub(crate) fn with_hub(supply: &[f64], art_cost: f64, hub: usize, hub_cost: &[f64]) -> Self {
        let mut net = Self::new(supply, art_cost);
        let root = net.root();
        // The hub's artificial arc carries no flow; pointing it at the root keeps the tree
        // strongly feasible.
        net.art_up[hub] = true;
        net.pred_up[hub] = true;
        net.flow[hub] = 0.0;
        for u in 0..net.n {
            if u == hub {
                continue;
            }
            let up = net.tail.len();
            net.add_arc(u, hub, hub_cost[u]);
            net.add_arc(hub, u, hub_cost[u]);
            net.remove_child(root, u);
            net.parent[u] = hub;
            net.depth[u] = 2;
            if supply[u] >= 0.0 {
                net.pred_arc[u] = up;
                net.pred_up[u] = true;
                net.flow[u] = supply[u];
            } else {
                net.pred_arc[u] = up + 1;
                net.pred_up[u] = false;
                net.flow[u] = -supply[u];
            }
            net.add_child(hub, u);
        }
        net.refresh_potentials();
        net
    }

    pub(crate) fn add_arc(&mut self, from: usize, to: usize, cost: f64) {
        debug_assert!(from < self.n && to < self.n && from != to);
        self.tail.push(from);
        self.head.push(to);
        self.cost.push(cost);
    }

    #[cfg(test)]
    fn arc_count(&self) -> usize {
        self.tail.len()
    }

    fn root(&self) -> usize {
        self.n
    }

    fn endpoints(&self, e: usize) -> (usize, usize) {
        if e < ART {
            (self.tail[e], self.head[e])
        } else {
            let u = e - ART;
            if self.art_up[u] {
                (u, self.root())
            } else {
                (self.root(), u)
            }
        }
    }

    fn arc_cost(&self, e: usize) -> f64 {
        if e < ART {
            self.cost[e]
        } else if self.art_up[e - ART] {
            0.0
        } else {
            self.art_cost
        }
    }

    fn remove_child(&mut self, p: usize, c: usize) {
        let (prev, next) = (self.prev_sib[c], self.next_sib[c]);
        if prev == NONE {
            self.first_child[p] = next;
        } else {
            self.next_sib[prev] = next;
        }
        if next != NONE {
            self.prev_sib[next] = prev;
        }
        self.prev_sib[c] = NONE;
        self.next_sib[c] = NONE;
    }

    fn add_child(&mut self, p: usize, c: usize) {
        let head = self.first_child[p];
        self.next_sib[c] = head;
        self.prev_sib[c] = NONE;
        if head != NONE {
            self.prev_sib[head] = c;
        }
        self.first_child[p] = c;
    }

    /// Most negative reduced cost in the first block containing a violation.
    fn find_entering(&mut self) -> Option<usize> {
        let m = self.tail.len();
        if m == 0 {
            return None;
        }
        let block = ((m as f64).sqrt().ceil() as usize).max(10).min(m);
        let mut best = NONE;
        let mut min = -self.eps;
        let mut cnt = block;
        let mut e = self.next_arc % m;
        for _ in 0..m {
            let rc = self.cost[e] + self.pi[self.tail[e]] - self.pi[self.head[e]];
            if rc < min {
                min = rc;
                best = e;
            }
            e += 1;
            if e == m {
                e = 0;
            }
            cnt -= 1;
            if cnt == 0 {
                if best != NONE {
                    self.next_arc = e;
                    return Some(best);
                }
                cnt = block;
            }
        }
        if best != NONE {
            self.next_arc = e;
            Some(best)
        } else {
            None
        }
    }

    fn join(&self, mut a: usize, mut b: usize) -> usize {
        while a != b {
            if self.depth[a] >= self.depth[b] {
                a = self.parent[a];
            } else {
                b = self.parent[b];
            }
        }
        a
    }

    fn pivot(&mut self, e_in: usize) -> Result<()> {
        let (s, t) = self.endpoints(e_in);
        let join = self.join(s, t);

        let mut delta = f64::INFINITY;
        let mut u_out = NONE;
        let mut tail_side = true;
        let mut u = s;
        while u != join {
            if self.pred_up[u] && self.flow[u] < delta {
                delta = self.flow[u];
                u_out = u;
                tail_side = true;
            }
            u = self.parent[u];
        }
        u = t;
        while u != join {
            if !self.pred_up[u] && self.flow[u] <= delta {
                delta = self.flow[u];
                u_out = u;
                tail_side = false;
            }
            u = self.parent[u];
        }
        if u_out == NONE {
            return Err(Error::Solver("unbounded pivot cycle".into()));
        }

        if delta > 0.0 {
            u = s;
            while u != join {
                if self.pred_up[u] {
                    self.flow[u] -= delta;
                } else {
                    self.flow[u] += delta;
                }
                u = self.parent[u];
            }
            u = t;
            while u != join {
                if self.pred_up[u] {
                    self.flow[u] += delta;
                } else {
                    self.flow[u] -= delta;
                }
                u = self.parent[u];
            }
        }
        self.flow[u_out] = 0.0;

        let (u_in, v_in) = if tail_side { (s, t) } else { (t, s) };

        // Re-root the detached subtree at u_in along the path u_in → … → u_out.
        self.stack.clear();
        u = u_in;
        loop {
            self.stack.push(u);
            if u == u_out {
                break;
            }
            u = self.parent[u];
        }
        let path = std::mem::take(&mut self.stack);
        let p_out = self.parent[u_out];
        self.remove_child(p_out, u_out);
        for w in path.windows(2) {
            self.remove_child(w[1], w[0]);
        }
        let mut prev = (
            self.pred_arc[path[0]],
            self.pred_up[path[0]],
            self.flow[path[0]],
        );
        for i in 0..path.len() - 1 {
            let (a, b) = (path[i], path[i + 1]);
            let saved = (self.pred_arc[b], self.pred_up[b], self.flow[b]);
            self.parent[b] = a;
            self.pred_arc[b] = prev.0;
            self.pred_up[b] = !prev.1;
            self.flow[b] = prev.2;
            self.add_child(a, b);
            prev = saved;
        }
        self.stack = path;
        self.parent[u_in] = v_in;
        self.pred_arc[u_in] = e_in;
        self.pred_up[u_in] = u_in == s;
        self.flow[u_in] = delta;
        self.add_child(v_in, u_in);

        let c = self.arc_cost(e_in);
        let new_pi = if self.pred_up[u_in] {
            self.pi[v_in] - c
        } else {
            self.pi[v_in] + c
        };
        let sigma = new_pi - self.pi[u_in];
        self.stack.clear();
        self.stack.push(u_in);
        while let Some(w) = self.stack.pop() {
            self.pi[w] += sigma;
            self.depth[w] = self.depth[self.parent[w]] + 1;
            let mut ch = self.first_child[w];
            while ch != NONE {
                self.stack.push(ch);
                ch = self.next_sib[ch];
            }
        }
        Ok(())
    }

    /// Recomputes every potential from the root so accumulated shifts leave no drift.
    fn refresh_potentials(&mut self) {
        let root = self.root();
        self.pi[root] = 0.0;
        self.stack.clear();
        let mut ch = self.first_child[root];
        while ch != NONE {
            self.stack.push(ch);
            ch = self.next_sib[ch];
        }
        while let Some(w) = self.stack.pop() {
            let c = self.arc_cost(self.pred_arc[w]);
            let p = self.parent[w];
            self.pi[w] = if self.pred_up[w] {
                self.pi[p] - c
            } else {
                self.pi[p] + c
            };
            let mut ch = self.first_child[w];
            while ch != NONE {
                self.stack.push(ch);
                ch = self.next_sib[ch];
            }
        }
    }

    /// Pivots to optimality over the current arc set.
    pub(crate) fn solve(&mut self) -> Result<FlowSolution> {
        let limit = self.pivots + 200 * (self.n + 10) + 10 * self.tail.len();
        while let Some(e) = self.find_entering() {
            self.pivot(e)?;
            self.pivots += 1;
            if self.pivots > limit {
                return Err(Error::Solver(format!(
                    "no convergence after {} pivots",
                    self.pivots
                )));
            }
        }
        self.refresh_potentials();
        let tol = 1e-9 * self.flow.iter().fold(1.0_f64, |m, f| m.max(f.abs()));
        let mut total = 0.0;
        for u in 0..self.n {
            let e = self.pred_arc[u];
            if e < ART {
                total += self.flow[u] * self.cost[e];
            } else if self.flow[u] > tol {
                return Err(Error::Solver(format!(
                    "artificial flow {} left at node {u}",
                    self.flow[u]
                )));
            }
        }
        Ok(FlowSolution {
            potential: self.pi[..self.n].iter().map(|v| -v).collect(),
            cost: total,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Minimum-cost assignment by enumerating permutations (unit supplies).
    fn brute_assignment(c: &[Vec<f64>]) -> f64 {
        fn rec(c: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
            if row == c.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..c.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(c[row][j] + rec(c, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        rec(c, 0, &mut vec![false; c.len()])
    }

    fn check_dual(net: &FlowNetwork, sol: &FlowSolution, supply: &[f64]) {
        let dual: f64 = sol.potential.iter().zip(supply).map(|(y, s)| y * s).sum();
        assert!(
            (dual - sol.cost).abs() < 1e-9,
            "dual {dual} vs primal {}",
            sol.cost
        );
        for e in 0..net.arc_count() {
            assert!(sol.potential[net.tail[e]] - sol.potential[net.head[e]] <= net.cost[e] + 1e-9);
        }
    }

    #[test]
    fn matches_permutation_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let n = rng.gen_range(1..=6);
            let c: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(0.0..5.0)).collect())
                .collect();
            let supply: Vec<f64> = (0..2 * n).map(|v| if v < n { 1.0 } else { -1.0 }).collect();
            let mut net = FlowNetwork::new(&supply, 6.0);
            for i in 0..n {
                for j in 0..n {
                    net.add_arc(i, n + j, c[i][j]);
                }
            }
            let sol = net.solve().unwrap();
            let brute = brute_assignment(&c);
            assert!((sol.cost - brute).abs() < 1e-9, "{} vs {}", sol.cost, brute);
            check_dual(&net, &sol, &supply);
        }
    }

    /// Points on a line joined only to their neighbours: the optimum is `∫|F − G|`.
    #[test]
    fn path_graph_gives_one_dimensional_w1() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let n = rng.gen_range(2..40);
            let mut xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            xs.sort_by(f64::total_cmp);
            let mut supply: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mean = supply.iter().sum::<f64>() / n as f64;
            supply.iter_mut().for_each(|v| *v -= mean);
            let mut net = FlowNetwork::new(&supply, 2.0);
            for i in 0..n - 1 {
                net.add_arc(i, i + 1, xs[i + 1] - xs[i]);
                net.add_arc(i + 1, i, xs[i + 1] - xs[i]);
            }
            let sol = net.solve().unwrap();
            let mut cdf = 0.0;
            let mut w1 = 0.0;
            for i in 0..n - 1 {
                cdf += supply[i];
                w1 += cdf.abs() * (xs[i + 1] - xs[i]);
            }
            assert!((sol.cost - w1).abs() < 1e-9, "{} vs {}", sol.cost, w1);
            check_dual(&net, &sol, &supply);
        }
    }

    #[test]
    fn adding_arcs_continues_to_the_full_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let n = rng.gen_range(3..25);
            let pts: Vec<[f64; 2]> = (0..n)
                .map(|_| [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
                .collect();
            let mut supply: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mean = supply.iter().sum::<f64>() / n as f64;
            supply.iter_mut().for_each(|v| *v -= mean);
            let d = |i: usize, j: usize| {
                ((pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2)).sqrt()
            };

            let mut full = FlowNetwork::new(&supply, 100.0);
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        full.add_arc(i, j, d(i, j));
                    }
                }
            }
            let want = full.solve().unwrap().cost;

            // A chain first: its path lengths stay below the artificial cost of 100.
            let mut lazy = FlowNetwork::new(&supply, 100.0);
            for i in 0..n - 1 {
                lazy.add_arc(i, i + 1, d(i, i + 1));
                lazy.add_arc(i + 1, i, d(i, i + 1));
            }
            let first = lazy.solve().unwrap().cost;
            assert!(first >= want - 1e-9);
            for i in 0..n {
                for j in 0..n {
                    if i != j && j != i + 1 && i != j + 1 {
                        lazy.add_arc(i, j, d(i, j));
                    }
                }
            }
            let sol = lazy.solve().unwrap();
            assert!((sol.cost - want).abs() < 1e-9, "{} vs {want}", sol.cost);
            check_dual(&lazy, &sol, &supply);
        }
    }
}
