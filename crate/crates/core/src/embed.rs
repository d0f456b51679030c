//! Backtracking search for injective simplicial maps `pattern → host`.
//!
//! Pattern vertices are placed in a connectivity-first order. A host vertex is
//! a candidate only if it is adjacent to the image of an already placed
//! neighbour and its per-dimension degree profile dominates the pattern
//! vertex's. Each pattern face is checked as soon as its last vertex is placed.

use crate::complex::{Simplex, SimplicialComplex};

struct Search<'a> {
    host: &'a SimplicialComplex,
    order: Vec<usize>,
    /// Pattern faces completed when `order[d]` is placed.
    checks: Vec<Vec<Simplex>>,
    anchor: Vec<Option<usize>>,
    pattern_deg: Vec<Vec<u32>>,
    host_deg: Vec<Vec<u32>>,
    host_adj: Vec<Vec<usize>>,
    /// Require equal degree profiles (valid for bijections).
    exact_degrees: bool,
}

fn adjacency(k: &SimplicialComplex) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); k.vertex_count()];
    for e in k.faces(1) {
        adj[e[0]].push(e[1]);
        adj[e[1]].push(e[0]);
    }
    adj
}

fn search_order(pattern: &SimplicialComplex) -> Vec<usize> {
    let n = pattern.vertex_count();
    let adj = adjacency(pattern);
    let weight: Vec<u32> = pattern.vertex_degrees().iter().map(|d| d.iter().sum()).collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let links = adj[v].iter().filter(|&&u| placed[u]).count();
                (links, weight[v], std::cmp::Reverse(v))
            })
            .expect("unplaced vertex");
        placed[next] = true;
        order.push(next);
    }
    order
}

impl<'a> Search<'a> {
    fn new(pattern: &'a SimplicialComplex, host: &'a SimplicialComplex, exact_degrees: bool) -> Self {
        let order = search_order(pattern);
        let mut position = vec![0; pattern.vertex_count()];
        for (d, &v) in order.iter().enumerate() {
            position[v] = d;
        }
        let mut checks = vec![Vec::new(); order.len()];
        for (_, level) in pattern.levels().skip(1) {
            for f in level {
                let last = f.iter().map(|&v| position[v]).max().expect("non-empty face");
                checks[last].push(f.clone());
            }
        }
        let pattern_adj = adjacency(pattern);
        let anchor = order
            .iter()
            .map(|&v| pattern_adj[v].iter().copied().filter(|&u| position[u] < position[v]).min_by_key(|&u| position[u]))
            .collect();
        Search {
            host,
            order,
            checks,
            anchor,
            pattern_deg: pattern.vertex_degrees(),
            host_deg: host.vertex_degrees(),
            host_adj: adjacency(host),
            exact_degrees,
        }
    }

    fn degree_ok(&self, v: usize, w: usize) -> bool {
        let pd = &self.pattern_deg[v];
        let hd = &self.host_deg[w];
        let width = pd.len().max(hd.len());
        (1..width).all(|i| {
            let a = pd.get(i).copied().unwrap_or(0);
            let b = hd.get(i).copied().unwrap_or(0);
            if self.exact_degrees {
                a == b
            } else {
                a <= b
            }
        })
    }

    /// Number of complete maps below this node, stopping once `limit` is reached.
    fn extend(&self, depth: usize, image: &mut [usize], used: &mut [bool], buf: &mut Vec<usize>, limit: u64) -> u64 {
        if depth == self.order.len() {
            return 1;
        }
        let v = self.order[depth];
        let all: Vec<usize>;
        let candidates: &[usize] = match self.anchor[depth] {
            Some(a) => &self.host_adj[image[a]],
            None => {
                all = (0..self.host.vertex_count()).collect();
                &all
            }
        };
        let mut total = 0u64;
        for &w in candidates {
            if used[w] || !self.degree_ok(v, w) {
                continue;
            }
            image[v] = w;
            let ok = self.checks[depth].iter().all(|face| {
                buf.clear();
                buf.extend(face.iter().map(|&u| image[u]));
                buf.sort_unstable();
                self.host.contains(buf)
            });
            if ok {
                used[w] = true;
                total += self.extend(depth + 1, image, used, buf, limit - total);
                used[w] = false;
                if total >= limit {
                    return total;
                }
            }
        }
        total
    }

    fn run(&self, limit: u64) -> u64 {
        let mut image = vec![usize::MAX; self.pattern_deg.len()];
        let mut used = vec![false; self.host.vertex_count()];
        let mut buf = Vec::new();
        self.extend(0, &mut image, &mut used, &mut buf, limit)
    }
}

fn counts_fit(pattern: &SimplicialComplex, host: &SimplicialComplex) -> bool {
    let p = pattern.simplex_counts();
    let h = host.simplex_counts();
    pattern.vertex_count() <= host.vertex_count() && (0..p.len()).all(|i| p.get(i) <= h.get(i))
}

/// Number of injective vertex maps sending every face of `pattern` to a face
/// of `host` of the same dimension.
pub fn count_embeddings(pattern: &SimplicialComplex, host: &SimplicialComplex) -> u64 {
    if !counts_fit(pattern, host) {
        return 0;
    }
    Search::new(pattern, host, false).run(u64::MAX)
}

pub fn automorphism_count(k: &SimplicialComplex) -> u64 {
    Search::new(k, k, true).run(u64::MAX)
}

fn sorted_profiles(k: &SimplicialComplex) -> Vec<Vec<u32>> {
    let mut d = k.vertex_degrees();
    d.sort();
    d
}

pub fn are_isomorphic(a: &SimplicialComplex, b: &SimplicialComplex) -> bool {
    if a.vertex_count() != b.vertex_count() || a.simplex_counts() != b.simplex_counts() {
        return false;
    }
    if sorted_profiles(a) != sorted_profiles(b) {
        return false;
    }
    // Equal face counts make any face-preserving injection a bijection on faces.
    Search::new(a, b, true).run(1) > 0
}
