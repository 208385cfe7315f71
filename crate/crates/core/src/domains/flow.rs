use std::collections::VecDeque;

/// Integer-capacity flow network with paired residual arcs (arc `2i` is the
/// forward arc of edge `i`, arc `2i + 1` its reverse).
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    n: usize,
    to: Vec<usize>,
    cap: Vec<u64>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork {
            n,
            to: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, cap: u64) {
        self.adj[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(cap);
        self.adj[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    /// Edmonds-Karp: augments along shortest residual paths until none is left.
    pub fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0;
        loop {
            let mut via = vec![usize::MAX; self.n];
            let mut seen = vec![false; self.n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &a in &self.adj[u] {
                    let v = self.to[a];
                    if self.cap[a] > 0 && !seen[v] {
                        seen[v] = true;
                        via[v] = a;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut push = u64::MAX;
            let mut v = t;
            while v != s {
                push = push.min(self.cap[via[v]]);
                v = self.to[via[v] ^ 1];
            }
            let mut v = t;
            while v != s {
                self.cap[via[v]] -= push;
                self.cap[via[v] ^ 1] += push;
                v = self.to[via[v] ^ 1];
            }
            total += push;
        }
    }

    /// Residual adjacency: `u -> v` whenever some arc from `u` to `v` has
    /// positive residual capacity.
    pub fn residual_adjacency(&self) -> Vec<Vec<usize>> {
        self.adj
            .iter()
            .map(|arcs| {
                let mut row: Vec<usize> = arcs.iter().filter(|&&a| self.cap[a] > 0).map(|&a| self.to[a]).collect();
                row.sort_unstable();
                row.dedup();
                row
            })
            .collect()
    }

    /// Vertices reachable from `s` in the residual graph.
    pub fn residual_reach(&self, s: usize) -> Vec<bool> {
        reach(&self.residual_adjacency(), s)
    }
}

pub fn reach(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

pub fn reverse(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); adj.len()];
    for (u, outs) in adj.iter().enumerate() {
        for &v in outs {
            out[v].push(u);
        }
    }
    out
}
