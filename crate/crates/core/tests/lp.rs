use omt::lp::{kkt_report, solve_lp, LpProblem, LpStatus, RowSense, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random LP with a known optimum built from complementary primal/dual
/// pairs: rows with a nonzero multiplier are tight, columns with a
/// positive reduced cost sit at their lower bound, negative at the upper.
fn constructed(seed: u64) -> (LpProblem, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=12);
    let m = rng.gen_range(1..=10);
    let a: Vec<Vec<f64>> =
        (0..m).map(|_| (0..n).map(|_| if rng.gen_bool(0.6) { rng.gen_range(-5..=5) as f64 } else { 0.0 }).collect()).collect();
    let upper: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.3) { rng.gen_range(1..=6) as f64 } else { f64::INFINITY }).collect();
    // x*: at 0, at its upper bound, or strictly inside
    let mut x = vec![0.0; n];
    let mut state = vec![0u8; n];
    for j in 0..n {
        state[j] = rng.gen_range(0..3);
        if state[j] == 1 && upper[j].is_finite() {
            x[j] = upper[j];
        } else if state[j] == 2 {
            x[j] = rng.gen_range(1..=4) as f64 * if upper[j].is_finite() { upper[j] / 5.0 } else { 1.0 };
        } else {
            state[j] = 0;
        }
    }
    let mut senses = Vec::with_capacity(m);
    let mut y = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let act: f64 = (0..n).map(|j| a[i][j] * x[j]).sum();
        let sense = [RowSense::Le, RowSense::Ge, RowSense::Eq][rng.gen_range(0..3)];
        let tight = sense == RowSense::Eq || rng.gen_bool(0.5);
        let mag = if tight { rng.gen_range(0..=3) as f64 } else { 0.0 };
        y[i] = match sense {
            RowSense::Ge => mag,
            RowSense::Le => -mag,
            RowSense::Eq => mag * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
        };
        let slack = if tight { 0.0 } else { rng.gen_range(1..=3) as f64 };
        rhs[i] = match sense {
            RowSense::Ge => act - slack,
            RowSense::Le => act + slack,
            RowSense::Eq => act,
        };
        senses.push(sense);
    }
    let mut lp = LpProblem::new(Sense::Minimize, n);
    for j in 0..n {
        let aty: f64 = (0..m).map(|i| a[i][j] * y[i]).sum();
        let d = match state[j] {
            0 => rng.gen_range(0..=3) as f64,
            1 => -(rng.gen_range(0..=3) as f64),
            _ => 0.0,
        };
        lp.objective[j] = aty + d;
        lp.upper[j] = upper[j];
    }
    for i in 0..m {
        let coefs = (0..n).filter(|&j| a[i][j] != 0.0).map(|j| (j, a[i][j])).collect();
        lp.add_row(coefs, senses[i], rhs[i]);
    }
    let opt = lp.objective_value(&x);
    (lp, opt)
}

#[test]
fn constructed_lps_reach_known_optimum() {
    for seed in 0..1000 {
        let (lp, opt) = constructed(seed);
        let r = solve_lp(&lp).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert_eq!(r.status, LpStatus::Optimal, "seed {seed}");
        assert!((r.objective - opt).abs() <= 1e-6 * opt.abs().max(1.0), "seed {seed}: {} vs {opt}", r.objective);
        let k = kkt_report(&lp, &r);
        assert!(k.holds(), "seed {seed}: {k:?}");

        let mut max = lp.clone();
        max.sense = Sense::Maximize;
        max.objective.iter_mut().for_each(|c| *c = -*c);
        let r = solve_lp(&max).unwrap();
        assert!((r.objective + opt).abs() <= 1e-6 * opt.abs().max(1.0), "seed {seed} (max)");
        assert!(kkt_report(&max, &r).holds(), "seed {seed} (max)");
    }
}

#[test]
fn redundant_equalities_keep_artificials_at_zero() {
    // second row duplicates the first; phase 2 must not move its artificial
    let mut lp = LpProblem::new(Sense::Minimize, 3);
    lp.objective = vec![-1.0, 1.0, 0.0];
    lp.add_row(vec![(0, 1.0), (1, 1.0), (2, 1.0)], RowSense::Eq, 2.0);
    lp.add_row(vec![(0, 2.0), (1, 2.0), (2, 2.0)], RowSense::Eq, 4.0);
    lp.add_row(vec![(0, 1.0), (1, -1.0)], RowSense::Le, 1.0);
    let r = solve_lp(&lp).unwrap();
    assert_eq!(r.status, LpStatus::Optimal);
    assert!((r.objective + 1.0).abs() < 1e-9);
    assert!(kkt_report(&lp, &r).holds());
}
