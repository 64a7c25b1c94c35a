#![allow(clippy::needless_range_loop)]

use coldyn_core::dispersion::{normalize, wasserstein_upper_bound};
use coldyn_core::{
    dispersion_matrix, hierarchical_cluster, intra_volatility_variance, variance_series,
    wasserstein, Linkage, VolatilityPanel,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

/// Random probability vector; some draws are sparse to reach the simplex boundary.
fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    if rng.random_bool(0.2) {
        let keep = rng.random_range(1..=n);
        for (i, x) in w.iter_mut().enumerate() {
            if i >= keep {
                *x = 0.0;
            }
        }
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

#[path = "support/transport_oracle.rs"]
mod transport_oracle;
use transport_oracle::brute_force_transport;

#[test]
fn sorted_formula_equals_brute_force_transport() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 1..=6 {
        for _ in 0..300 {
            let p = random_distribution(&mut rng, n);
            let q = random_distribution(&mut rng, n);
            assert!((wasserstein(&p, &q).unwrap() - brute_force_transport(&p, &q)).abs() < 1e-9);
        }
    }
}

#[test]
fn variance_bounds_and_equality_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 2..=8 {
        let top = 1.0 - 1.0 / n as f64;
        for _ in 0..10_000 {
            let p = random_distribution(&mut rng, n);
            let v = intra_volatility_variance(&p);
            assert!(v >= 0.0 && v <= top + 1e-12);
            if v < 1e-18 {
                assert!(p.iter().all(|x| (x - 1.0 / n as f64).abs() < 1e-9));
            }
            if v > top - 1e-9 {
                let mx = p.iter().cloned().fold(0.0, f64::max);
                assert!((mx - 1.0).abs() < 1e-9);
            }
        }
        assert_eq!(intra_volatility_variance(&vec![1.0 / n as f64; n]), 0.0);
        for k in 0..n {
            let mut q = vec![0.0; n];
            q[k] = 1.0;
            assert!((intra_volatility_variance(&q) - top).abs() < 1e-12);
        }
    }
}

#[test]
fn distance_bound_and_its_equality_case() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 2..=8 {
        let bound = wasserstein_upper_bound(n);
        let sample: Vec<Vec<f64>> = (0..2_000)
            .map(|_| random_distribution(&mut rng, n))
            .collect();
        for pair in sample.windows(2) {
            let d = wasserstein(&pair[0], &pair[1]).unwrap();
            assert!(d <= bound + 1e-12);
            if d > bound - 1e-6 {
                // Only pairs close to (uniform, one-shot) get near the bound.
                let var = |p: &[f64]| intra_volatility_variance(p);
                let (lo, hi) = if var(&pair[0]) < var(&pair[1]) {
                    (&pair[0], &pair[1])
                } else {
                    (&pair[1], &pair[0])
                };
                assert!(var(lo) < 1e-3 && var(hi) > 1.0 - 1.0 / n as f64 - 1e-3);
            }
        }
        let uniform = vec![1.0 / n as f64; n];
        for k in 0..n {
            let mut q = vec![0.0; n];
            q[k] = 1.0;
            assert!((wasserstein(&uniform, &q).unwrap() - bound).abs() < 1e-12);
        }
    }
}

#[test]
fn fifty_two_asset_one_shot() {
    let mut q = vec![0.0; 52];
    q[3] = 1.0;
    assert!((intra_volatility_variance(&q) - (1.0 - 1.0 / 52.0)).abs() < 1e-12);
}

fn random_vol_panel(seed: u64, n: usize, w: usize) -> VolatilityPanel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    VolatilityPanel {
        window_days: 10,
        days: (10..10 + w).collect(),
        sigmas: DMatrix::from_fn(n, w, |_, _| rng.random_range(0.01..0.2)),
    }
}

#[test]
fn dispersion_matrix_respects_metric_bound() {
    let vol = random_vol_panel(9, 6, 40);
    let d = dispersion_matrix(&vol).unwrap();
    let bound = wasserstein_upper_bound(6);
    for s in 0..40 {
        assert_eq!(d.matrix[(s, s)], 0.0);
        for t in 0..40 {
            assert_eq!(d.matrix[(s, t)], d.matrix[(t, s)]);
            assert!(d.matrix[(s, t)] <= bound);
            for u in 0..40 {
                assert!(d.matrix[(s, u)] <= d.matrix[(s, t)] + d.matrix[(t, u)] + 1e-15);
            }
        }
    }
    let (var, skipped) = variance_series(&vol);
    assert!(skipped.is_empty());
    assert_eq!(var.days, d.days);
}

/// Agglomerative clustering recomputing linkage distances from the original matrix each step.
fn reference_cluster(d: &DMatrix<f64>, linkage: Linkage) -> Vec<(Vec<usize>, f64)> {
    let mut clusters: Vec<Vec<usize>> = (0..d.nrows()).map(|i| vec![i]).collect();
    let mut merges = Vec::new();
    while clusters.len() > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let pairs: Vec<f64> = clusters[a]
                    .iter()
                    .flat_map(|&i| clusters[b].iter().map(move |&j| d[(i, j)]))
                    .collect();
                let dist = match linkage {
                    Linkage::Single => pairs.iter().cloned().fold(f64::INFINITY, f64::min),
                    Linkage::Complete => pairs.iter().cloned().fold(0.0, f64::max),
                    Linkage::Average => pairs.iter().sum::<f64>() / pairs.len() as f64,
                };
                if best.is_none_or(|(bd, _, _)| dist < bd) {
                    best = Some((dist, a, b));
                }
            }
        }
        let (h, a, b) = best.unwrap();
        let mut merged = clusters[a].clone();
        merged.extend(clusters[b].iter().copied());
        merged.sort();
        clusters.remove(b);
        clusters[a] = merged.clone();
        clusters.sort_by_key(|c| c[0]);
        merges.push((merged, h));
    }
    merges
}

fn leaf_sets(den: &coldyn_core::Dendrogram) -> Vec<(Vec<usize>, f64)> {
    let w = den.leaves();
    let mut members: Vec<Vec<usize>> = (0..w).map(|i| vec![i]).collect();
    let mut out = Vec::new();
    for m in den.merges() {
        let mut s = members[m.left].clone();
        s.extend(members[m.right].iter().copied());
        s.sort();
        members.push(s.clone());
        out.push((s, m.height));
    }
    out
}

#[test]
fn clustering_matches_reference_implementation() {
    for seed in 0..10 {
        let vol = random_vol_panel(100 + seed, 5, 25);
        let d = dispersion_matrix(&vol).unwrap();
        for linkage in [Linkage::Single, Linkage::Complete, Linkage::Average] {
            let got = leaf_sets(&hierarchical_cluster(&d.matrix, linkage).unwrap());
            let want = reference_cluster(&d.matrix, linkage);
            assert_eq!(got.len(), want.len());
            for ((gs, gh), (ws, wh)) in got.iter().zip(&want) {
                assert_eq!(gs, ws, "seed {seed} {linkage:?}");
                assert!((gh - wh).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn separated_groups_merge_last_above_the_gap() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let pts: Vec<f64> = (0..30)
        .map(|i| {
            if i < 18 {
                rng.random_range(0.0..1.0)
            } else {
                rng.random_range(10.0..11.0)
            }
        })
        .collect();
    let d = DMatrix::from_fn(30, 30, |i, j| (pts[i] - pts[j]).abs());
    for linkage in [Linkage::Complete, Linkage::Average] {
        let den = hierarchical_cluster(&d, linkage).unwrap();
        let last = den.merges().last().unwrap();
        assert!(last.height >= 9.0);
        let labels = den.two_cluster_cut().unwrap();
        for i in 0..30 {
            assert_eq!(labels[i], usize::from(i >= 18));
        }
        let want = reference_cluster(&d, linkage);
        assert!((want.last().unwrap().1 - last.height).abs() < 1e-12);
    }
}

#[test]
fn planted_regimes_are_recovered_exactly() {
    // Uniform volatility for 40 days, then one asset carrying most of it.
    let n = 8;
    let w = 90;
    let sigmas = DMatrix::from_fn(n, w, |i, k| {
        let jitter = 1.0 + 0.02 * ((k * 13 + i * 7) % 5) as f64;
        if k < 40 {
            jitter
        } else if i == 0 {
            9.0 * jitter
        } else {
            jitter
        }
    });
    let vol = VolatilityPanel {
        window_days: 5,
        days: (5..5 + w).collect(),
        sigmas,
    };
    let d = dispersion_matrix(&vol).unwrap();
    let labels = hierarchical_cluster(&d.matrix, Linkage::Average)
        .unwrap()
        .two_cluster_cut()
        .unwrap();
    for (k, l) in labels.iter().enumerate() {
        assert_eq!(*l, usize::from(k < 40), "date {k}");
    }
}

#[test]
fn heights_are_monotone() {
    let vol = random_vol_panel(3, 10, 120);
    let d = dispersion_matrix(&vol).unwrap();
    for linkage in [Linkage::Single, Linkage::Complete, Linkage::Average] {
        let den = hierarchical_cluster(&d.matrix, linkage).unwrap();
        assert_eq!(den.merges().len(), 119);
        assert!(den.merges().windows(2).all(|m| m[0].height <= m[1].height));
        assert_eq!(den.merges().last().unwrap().size, 120);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn metric_axioms(raw in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 1..=10), 3)) {
        let n = raw.iter().map(|v| v.len()).min().unwrap();
        let ps: Vec<Vec<f64>> = raw
            .iter()
            .map(|v| {
                let v = &v[..n];
                if v.iter().sum::<f64>() > 0.0 { normalize(v, 0).unwrap().p } else { vec![1.0 / n as f64; n] }
            })
            .collect();
        let d = |a: &[f64], b: &[f64]| wasserstein(a, b).unwrap();
        let (p, q, r) = (&ps[0], &ps[1], &ps[2]);
        prop_assert!(d(p, q) >= 0.0);
        prop_assert_eq!(d(p, q), d(q, p));
        prop_assert!(d(p, r) <= d(p, q) + d(q, r) + 1e-15);
        let mut sp = p.clone();
        let mut sq = q.clone();
        sp.sort_by(f64::total_cmp);
        sq.sort_by(f64::total_cmp);
        prop_assert_eq!(d(p, q) == 0.0, sp == sq);
    }

    #[test]
    fn order_insensitive(p in prop::collection::vec(0.0f64..1.0, 2..9), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q: Vec<f64> = p.iter().map(|_| rng.random()).collect();
        let mut p2 = p.clone();
        let mut q2 = q.clone();
        for i in (1..p2.len()).rev() {
            p2.swap(i, rng.random_range(0..=i));
            q2.swap(i, rng.random_range(0..=i));
        }
        prop_assert_eq!(wasserstein(&p, &q).unwrap(), wasserstein(&p2, &q2).unwrap());
    }
}
