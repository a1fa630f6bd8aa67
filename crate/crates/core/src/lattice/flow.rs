//! Dinic maximum flow on small integer-capacity networks.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    head: Vec<usize>,
    // arc arrays; arc `e ^ 1` is the reverse of arc `e`
    to: Vec<usize>,
    cap: Vec<u32>,
    next: Vec<usize>,
}

const NIL: usize = usize::MAX;

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork { head: vec![NIL; nodes], to: Vec::new(), cap: Vec::new(), next: Vec::new() }
    }

    fn push_arc(&mut self, u: usize, v: usize, c: u32) {
        self.to.push(v);
        self.cap.push(c);
        self.next.push(self.head[u]);
        self.head[u] = self.to.len() - 1;
    }

    /// Directed arc `u → v` with capacity `c`.
    pub fn add_arc(&mut self, u: usize, v: usize, c: u32) {
        self.push_arc(u, v, c);
        self.push_arc(v, u, 0);
    }

    /// Undirected edge: capacity `c` usable in either direction.
    pub fn add_edge(&mut self, u: usize, v: usize, c: u32) {
        self.push_arc(u, v, c);
        self.push_arc(v, u, c);
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let n = self.head.len();
        let mut total = 0u64;
        let mut level = vec![u32::MAX; n];
        let mut it = vec![NIL; n];
        loop {
            level.fill(u32::MAX);
            level[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                let mut e = self.head[u];
                while e != NIL {
                    let v = self.to[e];
                    if self.cap[e] > 0 && level[v] == u32::MAX {
                        level[v] = level[u] + 1;
                        q.push_back(v);
                    }
                    e = self.next[e];
                }
            }
            if level[t] == u32::MAX {
                return total;
            }
            it.copy_from_slice(&self.head);
            loop {
                let f = self.augment(s, t, u32::MAX, &level, &mut it);
                if f == 0 {
                    break;
                }
                total += f as u64;
            }
        }
    }

    /// One blocking-flow augmentation, iterative DFS over the level graph.
    fn augment(&mut self, s: usize, t: usize, limit: u32, level: &[u32], it: &mut [usize]) -> u32 {
        let mut stack: Vec<usize> = Vec::new(); // arcs on the current path
        let mut u = s;
        loop {
            if u == t {
                let f = stack.iter().map(|&e| self.cap[e]).min().unwrap_or(limit).min(limit);
                for &e in &stack {
                    self.cap[e] -= f;
                    self.cap[e ^ 1] += f;
                }
                return f;
            }
            let mut advanced = false;
            while it[u] != NIL {
                let e = it[u];
                let v = self.to[e];
                if self.cap[e] > 0 && level[v] == level[u] + 1 {
                    stack.push(e);
                    u = v;
                    advanced = true;
                    break;
                }
                it[u] = self.next[e];
            }
            if !advanced {
                // dead end: retreat and skip the arc that led here
                match stack.pop() {
                    None => return 0,
                    Some(e) => {
                        u = self.to[e ^ 1];
                        it[u] = self.next[it[u]];
                    }
                }
            }
        }
    }
}
