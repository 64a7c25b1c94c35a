//! Exhaustive transport between equal-weight point sets.

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Optimal transport between two uniform N-atom measures on the line. With equal
/// weights an optimal plan is a permutation, so enumerating them is exhaustive.
pub fn brute_force_transport(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    permutations(n)
        .iter()
        .map(|perm| {
            perm.iter()
                .enumerate()
                .map(|(i, &j)| (a[i] - b[j]).abs())
                .sum::<f64>()
                / n as f64
        })
        .fold(f64::INFINITY, f64::min)
}
