//! Library results checked against brute-force computations written here.

mod common;

use std::collections::HashSet;

use common::*;
use rand::Rng;
use simplicial_ld::count::{count_ordered, count_unordered, enumerate_subcomplexes, expected_ordered, ln_psi_exact, psi};
use simplicial_ld::extremal::{brute_force_n, n_hat_bounds, solve_float, solve_gamma, Bound, ExtremalQuery};
use simplicial_ld::model::{derive_seed, sample, ExactLn, ModelParams};
use simplicial_ld::mstar::{k_h_threshold, threshold_cap, MStarMode};
use simplicial_ld::{Exponent, LogValue, SimplicialComplex};

fn random_host(rng: &mut rand_chacha::ChaCha8Rng, n: usize, max_dim: usize) -> SimplicialComplex {
    let facets: Vec<Vec<usize>> = (0..rng.random_range(1..=8))
        .map(|_| {
            let size = rng.random_range(2..=(max_dim + 1).min(n));
            let mut f = rand::seq::index::sample(rng, n, size).into_vec();
            f.sort_unstable();
            f
        })
        .collect();
    SimplicialComplex::from_facets(n, &facets).unwrap()
}

#[test]
fn embedding_counts_match_injection_scan() {
    let mut rng = rng(11);
    for _ in 0..300 {
        let n = rng.random_range(3..=7);
        let host = random_host(&mut rng, n, 3);
        let g = random_pattern(&mut rng, 4, 3, 0);
        let naive = naive_ordered(&host, &g);
        assert_eq!(count_ordered(&host, &g), naive, "host {} pattern {}", host.facet_label(), g.facet_label());
        assert_eq!(count_unordered(&host, &g) * g.automorphism_count(), naive);
    }
}

#[test]
fn automorphisms_match_self_maps() {
    let mut rng = rng(12);
    for _ in 0..200 {
        let g = random_pattern(&mut rng, 6, 3, 0);
        assert_eq!(g.automorphism_count(), naive_ordered(&g, &g), "{}", g.facet_label());
    }
}

/// Solves the square system `a x = b` by Gaussian elimination, if regular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// `max Σ x` over the polytope by visiting every basic solution.
fn lp_by_vertices(g: &SimplicialComplex, ln_bounds: &[f64]) -> f64 {
    let v = g.vertex_count();
    // constraints a·x ≤ b: one per face, then -x_u ≤ 0
    let mut rows: Vec<(Vec<f64>, f64)> = all_faces(g)
        .iter()
        .map(|f| {
            let mut a = vec![0.0; v];
            f.iter().for_each(|&u| a[u] = 1.0);
            (a, ln_bounds[f.len() - 1])
        })
        .collect();
    rows.extend((0..v).map(|u| {
        let mut a = vec![0.0; v];
        a[u] = -1.0;
        (a, 0.0)
    }));
    let mut best = f64::NEG_INFINITY;
    let mut pick: Vec<usize> = (0..v).collect();
    loop {
        let a = pick.iter().map(|&i| rows[i].0.clone()).collect();
        let b = pick.iter().map(|&i| rows[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            let feasible = rows.iter().all(|(a, b)| a.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= b + 1e-9);
            if feasible {
                best = best.max(x.iter().sum());
            }
        }
        // next v-subset of the rows
        let m = rows.len();
        let Some(i) = (0..v).rev().find(|&i| pick[i] < m - v + i) else { break };
        pick[i] += 1;
        for j in i + 1..v {
            pick[j] = pick[j - 1] + 1;
        }
    }
    best
}

#[test]
fn lp_matches_vertex_enumeration() {
    let mut rng = rng(13);
    for _ in 0..150 {
        let g = random_pattern(&mut rng, 5, 3, 0);
        let dim = g.dimension().unwrap();
        let ints: Vec<u64> = (0..=dim).map(|_| rng.random_range(1..=60)).collect();
        let ln: Vec<f64> = ints.iter().map(|&m| (m as f64).ln()).collect();
        let expected = lp_by_vertices(&g, &ln);
        let query = ExtremalQuery::integers(g.clone(), &ints).unwrap();
        let exact = solve_gamma(&query).unwrap();
        let float = solve_float(&query).unwrap();
        let tol = 1e-9 * (1.0 + expected.abs());
        assert!((exact.gamma - expected).abs() <= tol, "{} {ints:?}: {} vs {expected}", g.facet_label(), exact.gamma);
        assert!((float.gamma - expected).abs() <= tol);
    }
}

/// Largest unordered copy count over all complexes on `m0` labelled vertices
/// within the budgets, by listing every edge set and triangle set.
fn naive_extremal(g: &SimplicialComplex, bounds: &[u64]) -> u64 {
    let m0 = bounds[0] as usize;
    if g.vertex_count() > m0 {
        return 0;
    }
    let pairs: Vec<Vec<usize>> = (0..m0).flat_map(|a| (a + 1..m0).map(move |b| vec![a, b])).collect();
    let triples: Vec<Vec<usize>> =
        (0..m0).flat_map(|a| (a + 1..m0).flat_map(move |b| (b + 1..m0).map(move |c| vec![a, b, c]))).collect();
    let aut = naive_ordered(g, g);
    let m1 = bounds.get(1).copied().unwrap_or(0);
    let m2 = bounds.get(2).copied().unwrap_or(0);
    let mut best = 0;
    for emask in 0u32..(1 << pairs.len()) {
        if emask.count_ones() as u64 > m1 {
            continue;
        }
        let edges: Vec<&Vec<usize>> = pairs.iter().enumerate().filter(|(i, _)| emask >> i & 1 == 1).map(|(_, p)| p).collect();
        let eset: HashSet<&Vec<usize>> = edges.iter().copied().collect();
        let tri: Vec<&Vec<usize>> = triples
            .iter()
            .filter(|t| eset.contains(&vec![t[0], t[1]]) && eset.contains(&vec![t[0], t[2]]) && eset.contains(&vec![t[1], t[2]]))
            .collect();
        for tmask in 0u32..(1 << tri.len()) {
            if tmask.count_ones() as u64 > m2 {
                continue;
            }
            let mut faces: Vec<Vec<usize>> = edges.iter().map(|e| e.to_vec()).collect();
            faces.extend(tri.iter().enumerate().filter(|(i, _)| tmask >> i & 1 == 1).map(|(_, t)| t.to_vec()));
            let f = SimplicialComplex::from_faces(m0, &faces).unwrap();
            best = best.max(naive_ordered(&f, g) / aut);
        }
    }
    best
}

#[test]
fn extremal_count_matches_exhaustive_listing() {
    let mut rng = rng(14);
    let mut checked = 0;
    while checked < 60 {
        let g = random_pattern(&mut rng, 4, 2, 0);
        let dim = g.dimension().unwrap();
        let m0 = rng.random_range(1..=if dim == 2 { 4 } else { 5 });
        let mut bounds = vec![m0];
        if dim >= 1 {
            bounds.push(rng.random_range(1..=8));
        }
        if dim >= 2 {
            bounds.push(rng.random_range(1..=4));
        }
        assert_eq!(brute_force_n(&g, &bounds).unwrap(), naive_extremal(&g, &bounds), "{} {bounds:?}", g.facet_label());
        checked += 1;
    }
}

/// Subcomplexes of `g` by listing every set of positive-dimensional faces,
/// optionally padded with unused vertices, grouped into isomorphism classes.
fn naive_subcomplex_classes(g: &SimplicialComplex, include_isolated: bool) -> Vec<(SimplicialComplex, u64)> {
    let faces: Vec<Vec<usize>> = all_faces(g).into_iter().filter(|f| f.len() >= 2).collect();
    let mut classes: Vec<(SimplicialComplex, u64)> = Vec::new();
    for mask in 1u32..(1 << faces.len()) {
        let chosen: Vec<&Vec<usize>> = faces.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, f)| f).collect();
        let set: HashSet<&Vec<usize>> = chosen.iter().copied().collect();
        let closed = chosen.iter().all(|f| {
            f.len() == 2 || (0..f.len()).all(|skip| {
                let b: Vec<usize> = f.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                set.contains(&b)
            })
        });
        if !closed {
            continue;
        }
        let used: HashSet<usize> = chosen.iter().flat_map(|f| f.iter().copied()).collect();
        let spare: Vec<usize> = (0..g.vertex_count()).filter(|v| !used.contains(v)).collect();
        let pads: u32 = if include_isolated { 1 << spare.len() } else { 1 };
        for pad in 0..pads {
            let mut facets: Vec<Vec<usize>> = chosen.iter().map(|f| f.to_vec()).collect();
            facets.extend(spare.iter().enumerate().filter(|(i, _)| pad >> i & 1 == 1).map(|(_, &v)| vec![v]));
            let h = SimplicialComplex::pattern(&facets).unwrap();
            match classes.iter_mut().find(|(c, _)| naive_isomorphic(c, &h)) {
                Some((_, count)) => *count += 1,
                None => classes.push((h, 1)),
            }
        }
    }
    classes
}

#[test]
fn subcomplex_classes_match_exhaustive_listing() {
    let mut rng = rng(15);
    let mut checked = 0;
    while checked < 60 {
        let g = random_pattern(&mut rng, 5, 3, 1);
        let positive = g.face_count() - g.vertex_count();
        if positive > 12 {
            continue;
        }
        for include_isolated in [false, true] {
            let naive = naive_subcomplex_classes(&g, include_isolated);
            let lib = enumerate_subcomplexes(&g, include_isolated).unwrap();
            assert_eq!(lib.len(), naive.len(), "{} isolated={include_isolated}", g.facet_label());
            for sub in &lib {
                let (_, count) = naive
                    .iter()
                    .find(|(c, _)| naive_isomorphic(c, &sub.complex))
                    .unwrap_or_else(|| panic!("class {} missing", sub.complex.facet_label()));
                assert_eq!(sub.labeled_count, *count, "{} in {}", sub.complex.facet_label(), g.facet_label());
            }
        }
        checked += 1;
    }
}

#[test]
fn expected_counts_match_falling_factorial_formula() {
    let mut rng = rng(16);
    for _ in 0..100 {
        let g = random_pattern(&mut rng, 5, 3, 0);
        let n = rng.random_range(5..=30);
        let p: Vec<f64> = (0..3).map(|_| rng.random_range(0.05..1.0)).collect();
        let params = ModelParams::from_probs(n, p.clone()).unwrap();
        let s = g.simplex_counts();
        let falling: f64 = (0..g.vertex_count()).map(|i| (n - i) as f64).product();
        let weight: f64 = (1..s.len()).map(|i| p[i - 1].powi(s.get(i) as i32)).product();
        let expected = falling * weight;
        let got = expected_ordered(&params, &g);
        assert!((got - expected).abs() <= 1e-10 * expected, "{got} vs {expected}");
        let psi_direct = (n as f64).powi(g.vertex_count() as i32) * weight;
        assert!((psi(&params, &g).value - psi_direct).abs() <= 1e-10 * psi_direct);
    }
}

#[test]
fn monte_carlo_means_match_expectation() {
    let params = ModelParams::from_probs(10, vec![0.5, 0.6]).unwrap();
    let patterns = [
        SimplicialComplex::from_facets(3, &[[0, 1], [1, 2]]).unwrap(),
        SimplicialComplex::simplex_boundary(2),
        SimplicialComplex::from_facets(4, &[vec![0, 1, 2], vec![2, 3]]).unwrap(),
    ];
    let trials = 4000u64;
    let samples: Vec<SimplicialComplex> = (0..trials).map(|t| sample(&params, derive_seed(99, t))).collect();
    for g in &patterns {
        let counts: Vec<f64> = samples.iter().map(|k| count_ordered(k, g) as f64).collect();
        let mean = counts.iter().sum::<f64>() / trials as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        let mu = expected_ordered(&params, g);
        assert!((mean - mu).abs() <= 4.0 * se, "{}: {mean} vs {mu} (se {se})", g.facet_label());
    }
    // s_j has mean C(n, j+1) Π p_i^{C(j+1, i+1)}
    for j in 1..=2u64 {
        let counts: Vec<f64> = samples.iter().map(|k| k.faces(j as usize).len() as f64).collect();
        let mean = counts.iter().sum::<f64>() / trials as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let mu = choose(10, j + 1) as f64 * (1..=j).map(|i| [0.5f64, 0.6][i as usize - 1].powi(choose(j + 1, i + 1) as i32)).product::<f64>();
        assert!((mean - mu).abs() <= 4.0 * (var / trials as f64).sqrt(), "s_{j}: {mean} vs {mu}");
    }
}

fn threshold_bounds(n: usize, g: &SimplicialComplex, h: &SimplicialComplex, m: u64) -> Vec<u64> {
    let s = g.simplex_counts();
    std::iter::once(n as u64).chain((1..=h.dimension().unwrap()).map(|i| m * s.get(i))).collect()
}

fn small_patterns() -> Vec<SimplicialComplex> {
    vec![
        SimplicialComplex::simplex(1),
        SimplicialComplex::from_facets(3, &[[0, 1], [1, 2]]).unwrap(),
        SimplicialComplex::simplex_boundary(2),
        SimplicialComplex::simplex(2),
        SimplicialComplex::from_facets(4, &[vec![0, 1, 2], vec![2, 3]]).unwrap(),
    ]
}

#[test]
fn threshold_matches_linear_scan() {
    let alphas = [vec!["0.3", "0.2"], vec!["1/2", "0"], vec!["0.1", "0.7"]];
    for a in &alphas {
        let alphas: Vec<Exponent> = a.iter().map(|s| s.parse().unwrap()).collect();
        for n in [7usize, 10, 12] {
            let params = ModelParams::from_alphas(n, alphas.clone(), 2).unwrap();
            for g in small_patterns() {
                for sub in enumerate_subcomplexes(&g, false).unwrap() {
                    let h = &sub.complex;
                    let Some(ExactLn::Value(ln_psi)) = ln_psi_exact(&params, h) else { panic!("exact Ψ") };
                    let cap = threshold_cap(n, &g);
                    let pred: Vec<bool> = (1..=cap)
                        .map(|m| {
                            let q = ExtremalQuery::integers(h.clone(), &threshold_bounds(n, &g, h, m)).unwrap();
                            solve_gamma(&q).unwrap().exact.unwrap().gamma <= ln_psi
                        })
                        .collect();
                    // the predicate is monotone in m
                    assert!(pred.windows(2).all(|w| w[0] || !w[1]), "{} in {}", h.facet_label(), g.facet_label());
                    let scan = pred.iter().rposition(|&b| b).map_or(0, |i| i as u64 + 1);
                    assert_eq!(k_h_threshold(&params, &g, h, MStarMode::LpSurrogate).unwrap(), scan);
                }
            }
        }
    }
}

#[test]
fn surrogate_and_oracle_thresholds_are_bracketed() {
    let alphas: Vec<Exponent> = ["0.3", "0.2"].iter().map(|s| s.parse().unwrap()).collect();
    let mut checked = 0;
    for n in [4usize, 5, 6] {
        let params = ModelParams::from_alphas(n, alphas.clone(), 2).unwrap();
        for g in small_patterns() {
            let cap = threshold_cap(n, &g);
            for sub in enumerate_subcomplexes(&g, false).unwrap() {
                let h = &sub.complex;
                let ln_psi = psi(&params, h).ln_value;
                let s0 = h.vertex_count() as f64;
                let slack = 1e-9 * (1.0 + ln_psi.abs());
                let at = |m: u64| {
                    let bounds = threshold_bounds(n, &g, h, m);
                    let q = ExtremalQuery::integers(h.clone(), &bounds).unwrap();
                    let sol = solve_gamma(&q).unwrap();
                    let sandwich = n_hat_bounds(&q, &sol);
                    let exact_n = brute_force_n(h, &bounds).unwrap();
                    (sol.gamma, sandwich.ln_lower, (exact_n as f64).ln())
                };
                let ko = k_h_threshold(&params, &g, h, MStarMode::OracleExact).unwrap();
                let ks = k_h_threshold(&params, &g, h, MStarMode::LpSurrogate).unwrap();
                if ks >= 1 {
                    // e^γ ≤ Ψ at K_s, so N ≤ s_0^{s_0} Ψ there
                    let (_, _, ln_n) = at(ks);
                    assert!(ln_n <= s0 * s0.ln() + ln_psi + slack);
                }
                if ko >= 1 {
                    // N ≤ Ψ at K_o, so the lower bound sits below Ψ
                    let (_, ln_lower, _) = at(ko);
                    assert!(ln_lower <= ln_psi + slack);
                }
                if ko < cap {
                    // N > Ψ just above K_o, so s_0^{s_0} e^γ > Ψ there
                    let (gamma, _, _) = at(ko + 1);
                    assert!(gamma + s0 * s0.ln() + slack > ln_psi);
                }
                if ks < cap {
                    // e^γ > Ψ just above K_s, so N exceeds the lower bound's share of Ψ
                    let (gamma, ln_lower, ln_n) = at(ks + 1);
                    assert!(ln_n + slack >= ln_lower - gamma + ln_psi);
                }
                checked += 1;
            }
        }
    }
    assert!(checked >= 30);
}

#[test]
fn power_bounds_agree_with_integer_bounds() {
    // n^{β} with integral β is the same program as the integer bound
    let mut rng = rng(17);
    for _ in 0..50 {
        let g = random_pattern(&mut rng, 5, 2, 0);
        let dim = g.dimension().unwrap();
        let base = rng.random_range(2..=6u64);
        let exps: Vec<u32> = (0..=dim).map(|_| rng.random_range(0..=3)).collect();
        let pow = ExtremalQuery::new(
            g.clone(),
            exps.iter().map(|&e| Bound::Power { base, exponent: simplicial_ld::numeric::rational(e as i64, 1) }).collect(),
        )
        .unwrap();
        let int = ExtremalQuery::integers(g.clone(), &exps.iter().map(|&e| base.pow(e)).collect::<Vec<_>>()).unwrap();
        let a: LogValue = solve_gamma(&pow).unwrap().exact.unwrap().gamma;
        let b: LogValue = solve_gamma(&int).unwrap().exact.unwrap().gamma;
        assert_eq!(a, b);
    }
}

#[test]
fn tail_runs_land_in_exact_binomial_band() {
    use simplicial_ld::harness::{tail_estimate, wilson_interval_p, TailExperimentConfig, Target};
    // P(2 Bin(28, 0.3) ≥ 25.2) summed directly
    let exact: f64 = (13..=28u64).map(|k| choose(28, k) as f64 * 0.3f64.powi(k as i32) * 0.7f64.powi(28 - k as i32)).sum();
    let trials = 3000u64;
    let (lo, hi) = wilson_interval_p(exact, trials);
    // exact probability that one run's frequency falls in the band
    let mut pmf = (1.0 - exact).powi(trials as i32);
    let mut coverage = 0.0;
    for k in 0..=trials {
        let f = k as f64 / trials as f64;
        if lo <= f && f <= hi {
            coverage += pmf;
        }
        pmf *= (trials - k) as f64 / (k + 1) as f64 * exact / (1.0 - exact);
    }
    assert!(coverage >= 0.95, "band coverage {coverage}");
    let params = ModelParams::from_probs(8, vec![0.3]).unwrap();
    let runs = 200u64;
    let inside = (0..runs)
        .filter(|&r| {
            let cfg = TailExperimentConfig::new(params.clone(), SimplicialComplex::simplex(1), 0.5, trials, derive_seed(777, r), Target::OrderedCount, None).unwrap();
            let s = tail_estimate(&cfg).unwrap().summary;
            assert!((s.exact_tail.unwrap() - exact).abs() < 1e-12);
            lo <= s.frequency && s.frequency <= hi
        })
        .count() as f64;
    let se = (coverage * (1.0 - coverage) / runs as f64).sqrt();
    assert!((inside / runs as f64 - coverage).abs() <= 4.0 * se, "{inside}/{runs} runs inside, coverage {coverage}");
}
