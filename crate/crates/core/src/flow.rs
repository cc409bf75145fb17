//! Dinic max-flow over real or integer capacities.

use std::collections::VecDeque;

pub trait Capacity:
    Copy + PartialOrd + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self>
{
    const ZERO: Self;
    /// Residuals at or below this are treated as saturated.
    const EPS: Self;
    fn min(self, other: Self) -> Self;
}

impl Capacity for f64 {
    const ZERO: Self = 0.0;
    const EPS: Self = 1e-12;
    fn min(self, other: Self) -> Self {
        f64::min(self, other)
    }
}

impl Capacity for i64 {
    const ZERO: Self = 0;
    const EPS: Self = 0;
    fn min(self, other: Self) -> Self {
        Ord::min(self, other)
    }
}

#[derive(Debug, Clone)]
struct Arc<C> {
    to: usize,
    cap: C,
    flow: C,
}

/// A flow network with paired residual arcs. Arc `2k` is the `k`-th user arc,
/// `2k + 1` its reverse.
#[derive(Debug, Clone)]
pub struct FlowNetwork<C: Capacity> {
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc<C>>,
}

impl<C: Capacity> FlowNetwork<C> {
    pub fn new(nodes: usize) -> Self {
        Self {
            adj: vec![Vec::new(); nodes],
            arcs: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Returns the user arc index.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: C) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc {
            to,
            cap,
            flow: C::ZERO,
        });
        self.arcs.push(Arc {
            to: from,
            cap: C::ZERO,
            flow: C::ZERO,
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id / 2
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len() / 2
    }

    pub fn flow(&self, arc: usize) -> C {
        self.arcs[2 * arc].flow
    }

    pub fn endpoints(&self, arc: usize) -> (usize, usize) {
        (self.arcs[2 * arc + 1].to, self.arcs[2 * arc].to)
    }

    pub fn capacity(&self, arc: usize) -> C {
        self.arcs[2 * arc].cap
    }

    fn residual(&self, a: usize) -> C {
        self.arcs[a].cap - self.arcs[a].flow
    }

    fn push(&mut self, a: usize, amount: C) {
        self.arcs[a].flow = self.arcs[a].flow + amount;
        self.arcs[a ^ 1].flow = self.arcs[a ^ 1].flow - amount;
    }

    fn levels(&self, s: usize) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.adj.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &a in &self.adj[v] {
                let to = self.arcs[a].to;
                if level[to] == usize::MAX && self.residual(a) > C::EPS {
                    level[to] = level[v] + 1;
                    queue.push_back(to);
                }
            }
        }
        level
    }

    fn augment(&mut self, s: usize, t: usize, level: &[usize], iter: &mut [usize]) -> Option<C> {
        // Iterative DFS over the level graph.
        let mut path: Vec<usize> = Vec::new();
        let mut v = s;
        loop {
            if v == t {
                let mut bottleneck = self.residual(path[0]);
                for &a in &path[1..] {
                    bottleneck = bottleneck.min(self.residual(a));
                }
                for &a in &path {
                    self.push(a, bottleneck);
                }
                return Some(bottleneck);
            }
            let mut advanced = false;
            while iter[v] < self.adj[v].len() {
                let a = self.adj[v][iter[v]];
                let to = self.arcs[a].to;
                if level[to] == level[v].wrapping_add(1) && self.residual(a) > C::EPS {
                    path.push(a);
                    v = to;
                    advanced = true;
                    break;
                }
                iter[v] += 1;
            }
            if !advanced {
                {
                    let a = path.pop()?;
                    v = self.arcs[a ^ 1].to;
                    iter[v] += 1;
                }
            }
        }
    }

    /// Adds a maximum `s`-`t` flow on top of the current flow and returns its value.
    pub fn max_flow(&mut self, s: usize, t: usize) -> C {
        let mut total = C::ZERO;
        if s == t {
            return total;
        }
        loop {
            let level = self.levels(s);
            if level[t] == usize::MAX {
                return total;
            }
            let mut iter = vec![0; self.adj.len()];
            while let Some(pushed) = self.augment(s, t, &level, &mut iter) {
                total = total + pushed;
            }
        }
    }

    /// Nodes reachable from `s` in the residual network.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let level = self.levels(s);
        level.into_iter().map(|l| l != usize::MAX).collect()
    }
}
