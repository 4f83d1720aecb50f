use ivopt_core::io::generate_synthetic;
use ivopt_core::model::{brute_force_pop, brute_force_pop_ref, solve_portfolio, PortfolioModel};
use ivopt_core::sets::{BoxSparsitySet, FullSpace};
use ivopt_core::solver::{pg_solve, AlmConfig, PgConfig, PgStatus, Termination};
use proptest::prelude::*;

fn quad<'a>(q: &'a [Vec<f64>], c: &'a [f64]) -> impl Fn(&[f64]) -> (f64, Vec<f64>) + 'a {
    move |w: &[f64]| {
        let g: Vec<f64> = q
            .iter()
            .zip(c)
            .map(|(row, ci)| row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + ci)
            .collect();
        // ½wᵀQw + cᵀw = ½(Qw + c)ᵀw + ½cᵀw
        let v = 0.5
            * g.iter()
                .chain(c)
                .zip(w.iter().chain(w))
                .map(|(a, b)| a * b)
                .sum::<f64>();
        (v, g)
    }
}

fn spd(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, n), n).prop_map(move |a| {
        let mut q = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                q[i][j] = (0..n).map(|k| a[k][i] * a[k][j]).sum::<f64>();
            }
            q[i][i] += 0.5;
        }
        q
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// The returned residual bounds the distance of `-∇L` to the limiting
    /// normal cone at the final point.
    #[test]
    fn pg_certificate_bounds_normal_distance(
        (q, c, w0) in (2usize..=5).prop_flat_map(|n| (
            spd(n),
            prop::collection::vec(-2.0f64..2.0, n),
            prop::collection::vec(-1.0f64..1.0, n),
        )),
        k in 1usize..4,
    ) {
        let n = c.len();
        prop_assume!(k < n);
        let set = BoxSparsitySet::new(k, vec![-1.0; n], vec![1.0; n]).unwrap();
        let fg = quad(&q, &c);
        let r = pg_solve(&fg, &set, &w0, 1e-8, &PgConfig::default());
        prop_assert_eq!(r.status, PgStatus::Converged);
        prop_assert!(set.member(&r.w, 1e-12));
        let neg: Vec<f64> = fg(&r.w).1.iter().map(|g| -g).collect();
        let d = set.normal_distance(&r.w, &neg).unwrap();
        prop_assert!(d <= r.residual + 1e-9, "distance {} above certificate {}", d, r.residual);
    }

    #[test]
    fn pg_unconstrained_solves_the_normal_equations(q in spd(2), c in prop::collection::vec(-2.0f64..2.0, 2)) {
        let fg = quad(&q, &c);
        let r = pg_solve(&fg, &FullSpace(2), &[0.0, 0.0], 1e-10, &PgConfig::default());
        let det = q[0][0] * q[1][1] - q[0][1] * q[1][0];
        let want = [(-c[0] * q[1][1] + c[1] * q[0][1]) / det, (-c[1] * q[0][0] + c[0] * q[1][0]) / det];
        prop_assert!((r.w[0] - want[0]).abs() < 1e-7 && (r.w[1] - want[1]).abs() < 1e-7, "{:?} vs {:?}", r.w, want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn alm_keeps_its_invariants(seed in 0u64..10_000, explicit in prop::bool::ANY) {
        let inst = generate_synthetic(seed, 8, 2, 3);
        let model = if explicit { PortfolioModel::Explicit } else { PortfolioModel::Implicit };
        let cfg = AlmConfig::default();
        let r = solve_portfolio(&inst, model, &cfg).unwrap().result;
        for (k, row) in r.trace.iter().enumerate() {
            prop_assert!(row.min_mu >= 0.0);
            if let Some(next) = r.trace.get(k + 1) {
                let raise = k >= 1 && row.v > cfg.tau * r.trace[k - 1].v;
                prop_assert_eq!(next.rho > row.rho, raise);
                prop_assert!(next.rho >= row.rho);
            }
        }
        prop_assert!(r.outer_iters <= cfg.max_outer && r.inner_iters <= cfg.max_inner_total);
        if r.reason == Termination::Converged {
            prop_assert!(r.violation < cfg.eps_tol);
        }
    }

    /// Optimal `z` of one model lifts to, or drops from, an optimal point of
    /// the other with the same value.
    #[test]
    fn global_minimizers_transfer(seed in 0u64..10_000, kappa in 1usize..3) {
        let inst = generate_synthetic(seed, 3, 2, kappa);
        let (v, z) = brute_force_pop(&inst).unwrap();
        let (v_ref, w) = brute_force_pop_ref(&inst).unwrap();
        prop_assert!((v - v_ref).abs() <= 1e-8);
        let z_ref = &w[..3];
        prop_assert!(inst.feasible(z_ref, 1e-9));
        prop_assert!((inst.objective(z_ref) - v).abs() <= 1e-8);
        let zeros = z.iter().filter(|x| x.abs() <= 1e-12).count();
        prop_assert!(zeros >= 3 - kappa);
        prop_assert!(inst.objective(&z) <= inst.objective(z_ref) + 1e-8);
    }
}
