//! Bipartite matching by augmenting paths.
//!
//! [`BipartiteGraph::max_cardinality`] is plain Kuhn augmentation.
//! [`BipartiteGraph::optimal`] grows the matching one augmenting path at a
//! time, always along the path of largest weight gain (Bellman-Ford on the
//! residual graph). Each intermediate matching of size k is then a
//! maximum-weight matching among those of size k, so the final one has
//! maximum cardinality and, among those, maximum total weight.
//! [`BipartiteGraph::canonical`] additionally picks the lexicographically
//! smallest optimal pair list.

/// Bipartite graph with nonnegative integer edge weights.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    adj: Vec<Vec<(usize, u64)>>,
}

/// Cardinality and weight of a matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct MatchingValue {
    pub cardinality: usize,
    pub weight: u64,
}

impl BipartiteGraph {
    pub fn new(n_left: usize, n_right: usize) -> Self {
        Self {
            n_left,
            n_right,
            adj: vec![Vec::new(); n_left],
        }
    }

    /// Adds or overwrites the edge `left - right`.
    pub fn add_edge(&mut self, left: usize, right: usize, weight: u64) {
        assert!(left < self.n_left && right < self.n_right, "edge out of range");
        let row = &mut self.adj[left];
        match row.binary_search_by_key(&right, |(r, _)| *r) {
            Ok(pos) => row[pos].1 = weight,
            Err(pos) => row.insert(pos, (right, weight)),
        }
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn weight(&self, left: usize, right: usize) -> Option<u64> {
        let row = &self.adj[left];
        row.binary_search_by_key(&right, |(r, _)| *r).ok().map(|i| row[i].1)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(l, row)| row.iter().map(move |(r, w)| (l, *r, *w)))
    }

    /// Maximum-cardinality matching (Kuhn's algorithm), ignoring weights.
    pub fn max_cardinality(&self) -> Vec<(usize, usize)> {
        let mut match_right: Vec<Option<usize>> = vec![None; self.n_right];
        for u in 0..self.n_left {
            let mut seen = vec![false; self.n_right];
            self.kuhn_augment(u, &mut seen, &mut match_right);
        }
        let mut pairs: Vec<(usize, usize)> = match_right
            .iter()
            .enumerate()
            .filter_map(|(r, l)| l.map(|l| (l, r)))
            .collect();
        pairs.sort_unstable();
        pairs
    }

    fn kuhn_augment(&self, u: usize, seen: &mut [bool], match_right: &mut [Option<usize>]) -> bool {
        for &(v, _) in &self.adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            let free = match match_right[v] {
                None => true,
                Some(owner) => self.kuhn_augment(owner, seen, match_right),
            };
            if free {
                match_right[v] = Some(u);
                return true;
            }
        }
        false
    }

    /// Maximum cardinality, then maximum weight.
    pub fn optimal(&self) -> (MatchingValue, Vec<(usize, usize)>) {
        let left = vec![true; self.n_left];
        let right = vec![true; self.n_right];
        let (value, match_left) = self.solve(&left, &right);
        let pairs = match_left
            .iter()
            .enumerate()
            .filter_map(|(l, r)| r.map(|r| (l, r)))
            .collect();
        (value, pairs)
    }

    /// An optimal matching whose pair list, sorted by left index, is
    /// lexicographically smallest among all optimal matchings.
    pub fn canonical(&self) -> Vec<(usize, usize)> {
        let mut left_alive = vec![true; self.n_left];
        let mut right_alive = vec![true; self.n_right];
        let (target, _) = self.solve(&left_alive, &right_alive);

        let mut fixed = Vec::with_capacity(target.cardinality);
        let mut fixed_weight = 0u64;
        for u in 0..self.n_left {
            if fixed.len() == target.cardinality {
                break;
            }
            left_alive[u] = false;
            for &(v, w) in &self.adj[u] {
                if !right_alive[v] {
                    continue;
                }
                right_alive[v] = false;
                let (rest, _) = self.solve(&left_alive, &right_alive);
                if fixed.len() + 1 + rest.cardinality == target.cardinality
                    && fixed_weight + w + rest.weight == target.weight
                {
                    fixed.push((u, v));
                    fixed_weight += w;
                    break;
                }
                right_alive[v] = true;
            }
        }
        fixed
    }

    /// Successive max-gain augmentation restricted to the alive vertices.
    fn solve(&self, left_alive: &[bool], right_alive: &[bool]) -> (MatchingValue, Vec<Option<usize>>) {
        let mut match_left: Vec<Option<usize>> = vec![None; self.n_left];
        let mut match_right: Vec<Option<usize>> = vec![None; self.n_right];
        let mut value = MatchingValue {
            cardinality: 0,
            weight: 0,
        };

        loop {
            let mut dist_left: Vec<Option<i64>> = vec![None; self.n_left];
            let mut dist_right: Vec<Option<i64>> = vec![None; self.n_right];
            let mut pred_right: Vec<usize> = vec![usize::MAX; self.n_right];
            for u in 0..self.n_left {
                if left_alive[u] && match_left[u].is_none() {
                    dist_left[u] = Some(0);
                }
            }

            let max_rounds = self.n_left + self.n_right + 1;
            for _ in 0..max_rounds {
                let mut changed = false;
                for u in 0..self.n_left {
                    let Some(du) = dist_left[u] else { continue };
                    for &(v, w) in &self.adj[u] {
                        if !right_alive[v] || match_left[u] == Some(v) {
                            continue;
                        }
                        let cand = du + w as i64;
                        if dist_right[v].is_none_or(|dv| cand > dv) {
                            dist_right[v] = Some(cand);
                            pred_right[v] = u;
                            changed = true;
                        }
                    }
                }
                for v in 0..self.n_right {
                    let (Some(dv), Some(owner)) = (dist_right[v], match_right[v]) else {
                        continue;
                    };
                    let w = self.weight(owner, v).expect("matched edge exists") as i64;
                    let cand = dv - w;
                    if dist_left[owner].is_none_or(|du| cand > du) {
                        dist_left[owner] = Some(cand);
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }

            let best = (0..self.n_right)
                .filter(|&v| right_alive[v] && match_right[v].is_none())
                .filter_map(|v| dist_right[v].map(|d| (d, v)))
                .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
            let Some((gain, end)) = best else { break };

            let mut v = end;
            loop {
                let u = pred_right[v];
                let previous = match_left[u];
                match_left[u] = Some(v);
                match_right[v] = Some(u);
                match previous {
                    Some(pv) => {
                        match_right[pv] = None;
                        v = pv;
                    }
                    None => break,
                }
            }
            value.cardinality += 1;
            value.weight = (value.weight as i64 + gain) as u64;
        }
        (value, match_left)
    }
}
