//! Helpers shared by the integration tests: seeded instance generators and
//! brute-force counters that share no code with the library.

#![allow(dead_code)]

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simplicial_ld::SimplicialComplex;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random pattern on `1..=max_vertices` labels with facets of dimension
/// at most `max_dim`, relabelled onto the vertices it mentions.
pub fn random_pattern(rng: &mut ChaCha8Rng, max_vertices: usize, max_dim: usize, min_dim: usize) -> SimplicialComplex {
    loop {
        let v = rng.random_range(2..=max_vertices);
        let facets: Vec<Vec<usize>> = (0..rng.random_range(1..=4))
            .map(|_| {
                let size = rng.random_range(1..=(max_dim + 1).min(v));
                let mut f = sample_indices(rng, v, size).into_vec();
                f.sort_unstable();
                f
            })
            .collect();
        let g = SimplicialComplex::pattern(&facets).expect("valid facets");
        if g.dimension().is_some_and(|d| d >= min_dim) {
            return g;
        }
    }
}

/// All faces of `k`, smallest dimension first.
pub fn all_faces(k: &SimplicialComplex) -> Vec<Vec<usize>> {
    k.levels().flat_map(|(_, level)| level.iter().cloned()).collect()
}

/// Visits every injection `0..k → 0..n`.
pub fn for_each_injection(k: usize, n: usize, mut f: impl FnMut(&[usize])) {
    fn rec(k: usize, n: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(k, n, used, cur, f);
                cur.pop();
                used[v] = false;
            }
        }
    }
    rec(k, n, &mut vec![false; n], &mut Vec::new(), &mut f);
}

/// Ordered copies by trying every injection of the pattern's vertices.
pub fn naive_ordered(host: &SimplicialComplex, pattern: &SimplicialComplex) -> u64 {
    let faces = all_faces(pattern);
    let mut count = 0;
    for_each_injection(pattern.vertex_count(), host.vertex_count(), |map| {
        let ok = faces.iter().all(|f| {
            let mut img: Vec<usize> = f.iter().map(|&v| map[v]).collect();
            img.sort_unstable();
            host.contains(&img)
        });
        count += ok as u64;
    });
    count
}

/// Isomorphism by trying every bijection.
pub fn naive_isomorphic(a: &SimplicialComplex, b: &SimplicialComplex) -> bool {
    if a.vertex_count() != b.vertex_count() || a.simplex_counts() != b.simplex_counts() {
        return false;
    }
    let faces = all_faces(a);
    let mut found = false;
    for_each_injection(a.vertex_count(), b.vertex_count(), |map| {
        if !found {
            found = faces.iter().all(|f| {
                let mut img: Vec<usize> = f.iter().map(|&v| map[v]).collect();
                img.sort_unstable();
                b.contains(&img)
            });
        }
    });
    found
}

/// Connected components of the 1-skeleton by union-find.
pub fn components(k: &SimplicialComplex) -> usize {
    let n = k.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for e in k.faces(1) {
        let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
        parent[a] = b;
    }
    (0..n).filter(|&v| find(&mut parent, v) == v).count()
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

pub fn choose(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}
