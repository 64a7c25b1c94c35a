//! Agglomerative hierarchical clustering of a precomputed distance matrix.
//!
//! Clusters are merged closest-first, with ties going to the pair with the
//! lowest `(i, j)` slot indices, where a cluster's slot is its smallest leaf.
//! Inter-cluster distances follow the Lance-Williams update for the chosen
//! linkage. Leaves are ids `0..W`; the cluster formed at step `s` gets id
//! `W + s`.

use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;
use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Linkage {
    Single,
    Complete,
    #[default]
    Average,
}

impl Linkage {
    pub fn as_str(self) -> &'static str {
        match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
        }
    }

    fn update(self, d_a: f64, d_b: f64, n_a: usize, n_b: usize) -> f64 {
        match self {
            Linkage::Single => d_a.min(d_b),
            Linkage::Complete => d_a.max(d_b),
            Linkage::Average => (n_a as f64 * d_a + n_b as f64 * d_b) / (n_a + n_b) as f64,
        }
    }
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            other => Err(Error::InvalidParameter(alloc::format!(
                "unknown linkage `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    /// Leaves under the new cluster.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    leaves: usize,
    merges: Vec<Merge>,
}

struct Workspace {
    w: usize,
    dist: Vec<f64>,
    active: Vec<bool>,
    nn: Vec<usize>,
    nn_dist: Vec<f64>,
}

impl Workspace {
    fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.w + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.dist[i * self.w + j] = v;
        self.dist[j * self.w + i] = v;
    }

    fn refresh(&mut self, i: usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        for j in 0..self.w {
            if j != i && self.active[j] && self.d(i, j) < best.0 {
                best = (self.d(i, j), j);
            }
        }
        self.nn[i] = best.1;
        self.nn_dist[i] = best.0;
    }
}

pub fn hierarchical_cluster(d: &DMatrix<f64>, linkage: Linkage) -> Result<Dendrogram> {
    let w = d.nrows();
    if d.ncols() != w {
        return Err(Error::LengthMismatch {
            left: w,
            right: d.ncols(),
        });
    }
    if d.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidParameter(
            "distances must be finite and non-negative".into(),
        ));
    }
    let mut ws = Workspace {
        w,
        dist: (0..w * w).map(|k| d[(k / w, k % w)]).collect(),
        active: vec![true; w],
        nn: vec![usize::MAX; w],
        nn_dist: vec![f64::INFINITY; w],
    };
    for i in 0..w {
        for j in (i + 1)..w {
            // Use one triangle so asymmetric rounding in the input cannot matter.
            let v = ws.d(i, j);
            ws.set(i, j, v);
        }
    }
    for i in 0..w {
        ws.refresh(i);
    }
    let mut ids: Vec<usize> = (0..w).collect();
    let mut sizes = vec![1usize; w];
    let mut merges = Vec::with_capacity(w.saturating_sub(1));
    let mut floor = 0.0f64;
    for step in 0..w.saturating_sub(1) {
        let mut pick: Option<(f64, usize, usize)> = None;
        for i in (0..w).filter(|&i| ws.active[i]) {
            let (a, b) = (i.min(ws.nn[i]), i.max(ws.nn[i]));
            let cand = (ws.nn_dist[i], a, b);
            let better = match pick {
                None => true,
                Some(p) => cand.0 < p.0 || (cand.0 == p.0 && (cand.1, cand.2) < (p.1, p.2)),
            };
            if better {
                pick = Some(cand);
            }
        }
        let (height, a, b) = pick.expect("at least two active clusters remain");
        // Reducible linkages never merge below an earlier height; this only absorbs rounding.
        floor = floor.max(height);
        merges.push(Merge {
            left: ids[a],
            right: ids[b],
            height: floor,
            size: sizes[a] + sizes[b],
        });
        for k in 0..w {
            if ws.active[k] && k != a && k != b {
                let v = linkage.update(ws.d(a, k), ws.d(b, k), sizes[a], sizes[b]);
                ws.set(a, k, v);
            }
        }
        ws.active[b] = false;
        sizes[a] += sizes[b];
        ids[a] = w + step;
        ws.refresh(a);
        for k in 0..w {
            if !ws.active[k] || k == a {
                continue;
            }
            if ws.nn[k] == a || ws.nn[k] == b {
                ws.refresh(k);
            } else {
                let v = ws.d(k, a);
                if v < ws.nn_dist[k] || (v == ws.nn_dist[k] && a < ws.nn[k]) {
                    ws.nn[k] = a;
                    ws.nn_dist[k] = v;
                }
            }
        }
    }
    Ok(Dendrogram { leaves: w, merges })
}

impl Dendrogram {
    pub fn leaves(&self) -> usize {
        self.leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Flat labels after undoing the last `k - 1` merges. Labels are numbered
    /// by first appearance in leaf order.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>> {
        if k == 0 || k > self.leaves.max(1) {
            return Err(Error::InvalidParameter(alloc::format!(
                "cannot cut {} leaves into {k} clusters",
                self.leaves
            )));
        }
        let mut parent: Vec<usize> = (0..self.leaves + self.merges.len()).collect();
        fn root(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (s, m) in self.merges.iter().take(self.leaves - k).enumerate() {
            let id = self.leaves + s;
            parent[m.left] = id;
            parent[m.right] = id;
        }
        let mut labels = vec![usize::MAX; self.leaves];
        let mut seen: Vec<usize> = Vec::new();
        for (leaf, label) in labels.iter_mut().enumerate() {
            let r = root(&mut parent, leaf);
            *label = match seen.iter().position(|&x| x == r) {
                Some(p) => p,
                None => {
                    seen.push(r);
                    seen.len() - 1
                }
            };
        }
        Ok(labels)
    }

    /// Splits at the final merge. Label 0 is the larger side, 1 the minority;
    /// on equal sizes the side holding leaf 0 gets label 0.
    pub fn two_cluster_cut(&self) -> Result<Vec<usize>> {
        let mut labels = self.cut(2)?;
        let ones = labels.iter().filter(|&&l| l == 1).count();
        if ones * 2 > labels.len() {
            for l in labels.iter_mut() {
                *l = 1 - *l;
            }
        }
        Ok(labels)
    }
}
