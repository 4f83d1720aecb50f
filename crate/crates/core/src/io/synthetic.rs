//! Seeded stand-ins for the benchmark collection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{greedy_best_return, PortfolioInstance};

/// `Q = FFᵀ + diag(d)` with `F ~ U(0,1)^{n×p} / √p`, `d ~ U(0.01, 0.1)`,
/// `c ~ U(0,1)`, `u = e` and `θ` at 0.9 of the greedy best return.
///
/// # Panics
/// If `n < 2`, `p == 0` or `κ ∉ [1, n)`.
pub fn generate_synthetic(seed: u64, n: usize, p: usize, kappa: usize) -> PortfolioInstance {
    assert!(
        n >= 2 && p >= 1 && kappa >= 1 && kappa < n,
        "need n >= 2, p >= 1, 1 <= kappa < n"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (p as f64).sqrt();
    let f: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| rng.gen::<f64>() * scale).collect())
        .collect();
    let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..0.1)).collect();
    let c: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let mut q = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = f[i].iter().zip(&f[j]).map(|(a, b)| a * b).sum();
            q[i][j] = v;
            q[j][i] = v;
        }
        q[i][i] += d[i];
    }
    let u = vec![1.0; n];
    let (_, best) = greedy_best_return(&c, &u, kappa).expect("unit bounds always fill the budget");
    PortfolioInstance::new(format!("syn{seed:03}-n{n}"), q, c, u, 0.9 * best, kappa)
        .expect("synthetic instances are valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_valid() {
        assert_eq!(generate_synthetic(3, 10, 3, 2), generate_synthetic(3, 10, 3, 2));
        assert_ne!(generate_synthetic(3, 10, 3, 2).q, generate_synthetic(4, 10, 3, 2).q);
        for seed in 1..=100 {
            let inst = generate_synthetic(seed, 50, 5, 5);
            inst.validate().unwrap();
            assert!(inst.min_eigenvalue() > 0.0);
            let (z, r) = greedy_best_return(&inst.c, &inst.u, 5).unwrap();
            assert!(r > inst.theta && inst.feasible(&z, 1e-12));
        }
    }
}
