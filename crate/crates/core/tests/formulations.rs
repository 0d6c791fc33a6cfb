use std::collections::HashMap;

use omt::covering::{build_cost_ladder, map_f};
use omt::fixtures::{appendix_b, property3b};
use omt::formulations::*;
use omt::lp::kkt_report;
use omt::oracle::{solution_for, solve_exact};
use omt::subsets::all_subsets;
use omt::{evaluate_objective, generate_instance, Criterion, Instance};
use proptest::prelude::*;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn all_combos() -> Vec<(Family, Sorting, TreeKind)> {
    let mut out = Vec::new();
    for f in Family::ALL {
        for s in Sorting::ALL {
            for t in TreeKind::ALL {
                out.push((f, s, t));
            }
        }
    }
    out
}

/// Lifts every p-subset, checks it, and returns the smallest objective.
fn min_over_lifts(inst: &Instance, model: &MilpModel) -> f64 {
    let mut best = f64::INFINITY;
    for fac in all_subsets(inst.n(), inst.p()) {
        let sol = solution_for(inst, &fac).unwrap();
        let asg = lift_solution(inst, &sol, model).unwrap();
        let rep = check_assignment(model, &asg).unwrap();
        assert!(rep.is_feasible(), "{} subset {fac:?}: {:?}", model.name, rep);
        let obj = evaluate_objective(inst, &sol).unwrap();
        assert!(close(rep.objective, obj), "{}: lifted {} vs {}", model.name, rep.objective, obj);
        best = best.min(rep.objective);
    }
    best
}

#[test]
fn every_combination_matches_oracle_at_integer_points() {
    for (k, n) in (3..=6).enumerate() {
        for p in 2..=n {
            let inst = generate_instance(n, p, (1, 20), 100 + k as u64 * 10 + p as u64, Criterion::Median).unwrap();
            let opt = solve_exact(&inst).unwrap().objective;
            for (f, s, t) in all_combos() {
                let model = build_for_instance(&inst, f, s, t, &BuildOptions::default()).unwrap();
                let best = min_over_lifts(&inst, &model);
                assert!(close(best, opt), "{f} {s} {t} n={n} p={p}: {best} vs {opt}");
            }
        }
    }
}

#[test]
fn variants_keep_lifts_feasible() {
    let inst = generate_instance(5, 3, (1, 9), 7, Criterion::KCentrum).unwrap();
    let opts = [
        BuildOptions { staircase: true, ..Default::default() },
        BuildOptions { relax_x: true, ..Default::default() },
        BuildOptions { redundant_covering: false, ..Default::default() },
        BuildOptions { split_f2_allocation: true, ..Default::default() },
        BuildOptions { sub_family: LazyFamily::ConnectionCut, ..Default::default() },
    ];
    for o in &opts {
        for (f, s, t) in all_combos() {
            let Ok(model) = build_for_instance(&inst, f, s, t, o) else {
                assert!(o.staircase && s == Sorting::U);
                continue;
            };
            min_over_lifts(&inst, &model);
        }
    }
}

#[test]
fn reported_sizes_small_instances() {
    let inst = appendix_b();
    let xl = build_for_instance(&inst, Family::F1, Sorting::Xl, TreeKind::Mtz, &BuildOptions::default()).unwrap();
    assert_eq!(xl.reported_size(), (86, 52));
    let u = build_for_instance(&inst, Family::F1, Sorting::U, TreeKind::Mtz, &BuildOptions::default()).unwrap();
    assert_eq!(u.reported_size(), (42, 49));
    assert_eq!(u.count_symbol(Symbol::X), 16);
    assert_eq!(u.count_symbol(Symbol::Z), 6);
    assert_eq!(u.count_symbol(Symbol::U), 20);
    // variables saved by covering, counted on the built models
    assert_eq!(xl.reported_size().0 - u.reported_size().0, 44);
}

#[test]
fn appendix_b_lifts() {
    let inst = appendix_b();
    let sol = solution_for(&inst, &[0, 2]).unwrap();
    let u = build_for_instance(&inst, Family::F1, Sorting::U, TreeKind::Mtz, &BuildOptions::default()).unwrap();
    let asg = lift_solution(&inst, &sol, &u).unwrap();
    let rows: Vec<Vec<f64>> = (1..=4).map(|l| (1..=5).map(|h| asg[&format!("u_{l}_{h}")]).collect()).collect();
    assert_eq!(
        rows,
        vec![vec![0.0; 5], vec![0.0; 5], vec![1.0, 1.0, 0.0, 0.0, 0.0], vec![1.0, 1.0, 0.0, 0.0, 0.0]]
    );
    let xl = build_for_instance(&inst, Family::F1, Sorting::Xl, TreeKind::Mtz, &BuildOptions::default()).unwrap();
    let asg = lift_solution(&inst, &sol, &xl).unwrap();
    let rep = check_assignment(&xl, &asg).unwrap();
    assert!(rep.is_feasible());
    assert!(close(rep.objective, 2.0));
}

#[test]
fn perturbed_z_breaks_edge_count() {
    let inst = appendix_b();
    let sol = solution_for(&inst, &[0, 2]).unwrap();
    let m = build_for_instance(&inst, Family::F1, Sorting::U, TreeKind::Sub, &BuildOptions::default()).unwrap();
    let mut asg = lift_solution(&inst, &sol, &m).unwrap();
    *asg.get_mut("z_2_4").unwrap() += 1.0;
    let rep = check_assignment(&m, &asg).unwrap();
    let row = rep.violated.iter().find(|r| r.name == "treeedges").unwrap();
    assert!(close(row.violation, 1.0));
}

#[test]
fn p_equals_n_in_f2() {
    let inst = generate_instance(5, 5, (1, 9), 3, Criterion::Median).unwrap();
    let sol = solution_for(&inst, &[0, 1, 2, 3, 4]).unwrap();
    let m = build_for_instance(&inst, Family::F2, Sorting::Xl, TreeKind::Flow2, &BuildOptions::default()).unwrap();
    let asg = lift_solution(&inst, &sol, &m).unwrap();
    let z: f64 = (1..=5).flat_map(|i| (i + 1..=5).map(move |j| (i, j))).map(|(i, j)| asg[&format!("z_{i}_{j}")]).sum();
    assert_eq!(z, 4.0);
    for i in 1..=5 {
        for j in 1..=5 {
            if i != j {
                assert_eq!(asg[&format!("x_{i}_{j}")], 0.0);
            }
        }
    }
}

#[test]
fn property3b_point_sorting_rows() {
    let pr = property3b();
    let input = ModelInput::raw(pr.n, pr.p, pr.cost.clone(), pr.lambda.clone()).unwrap();
    let opts = BuildOptions { relaxed: true, ..Default::default() };
    let xl = build_model(&input, Family::F1, Sorting::Xl, TreeKind::Sub, &opts).unwrap();
    let n = pr.n;
    let mut asg: Assignment = HashMap::new();
    for i in 0..n {
        for j in 0..n {
            asg.insert(format!("x_{}_{}", i + 1, j + 1), pr.point.x[i * n + j]);
            if i < j {
                asg.insert(format!("z_{}_{}", i + 1, j + 1), 0.0);
            }
            for l in 0..n {
                asg.insert(format!("xl_{}_{}_{}", l + 1, i + 1, j + 1), pr.point.xl_at(l, i, j));
            }
        }
    }
    let rep = check_assignment(&xl, &asg).unwrap();
    assert!(rep.violated.iter().all(|r| Block::from_name(&r.name) != Block::Sorting), "{rep:?}");

    let u = build_model(&input, Family::F1, Sorting::U, TreeKind::Sub, &opts).unwrap();
    let ladder = build_cost_ladder(n, &pr.cost);
    let ca = map_f(&pr.point, &ladder);
    let mut asg: Assignment = asg.into_iter().filter(|(k, _)| !k.starts_with("xl_")).collect();
    for l in 0..n {
        for h in 1..=ladder.h_size() {
            asg.insert(format!("u_{}_{}", l + 1, h), ca.u_at(l, h));
        }
    }
    let rep = check_assignment(&u, &asg).unwrap();
    assert!(rep.violated.iter().any(|r| r.name.starts_with("covmono_")), "{rep:?}");
}

#[test]
fn unsupported_combinations_are_explained() {
    let inst = appendix_b();
    let e = build_for_instance(&inst, Family::F1, Sorting::U, TreeKind::Mtz, &BuildOptions { staircase: true, ..Default::default() });
    assert!(e.unwrap_err().to_string().contains("supported"));
    let e = build_for_instance(&inst, Family::F2, Sorting::U, TreeKind::Mtz, &BuildOptions { with_mu: true, ..Default::default() });
    assert!(e.is_err());
}

#[test]
fn master_model_has_mu_and_no_tree() {
    let inst = appendix_b();
    let m = build_for_instance(&inst, Family::F1, Sorting::U, TreeKind::Sub, &BuildOptions { with_mu: true, ..Default::default() })
        .unwrap();
    assert!(m.tree.is_none());
    assert_eq!(m.count_symbol(Symbol::Mu), 1);
    assert_eq!(m.count_symbol(Symbol::Z), 0);
    assert!(m.constraints.iter().all(|c| !matches!(c.block, Block::Tree | Block::TreeCount | Block::Linking)));
    let sol = solution_for(&inst, &[0, 2]).unwrap();
    let asg = lift_solution(&inst, &sol, &m).unwrap();
    assert!(check_assignment(&m, &asg).unwrap().is_feasible());
}

#[test]
fn lp_round_trip_is_byte_identical() {
    let inst = generate_instance(5, 3, (1, 30), 11, Criterion::KTrimmed).unwrap();
    for (f, s, t) in all_combos() {
        let m = build_for_instance(&inst, f, s, t, &BuildOptions::default()).unwrap();
        let text = export_lp(&m);
        let back = parse_lp(&text).unwrap();
        assert_eq!(export_lp(&back), text);
        assert_eq!(back.num_vars(), m.num_vars());
        assert_eq!(back.num_constraints(), m.num_constraints());
        assert_eq!(back.reported_size(), m.reported_size());
    }
}

#[test]
fn golden_lp_files() {
    let mut one = MilpModel::new("one", Family::F1, Sorting::Xl, None, 1, 1);
    let x = one.add_var("x_1_1", 0.0, f64::INFINITY, VarType::Continuous).unwrap();
    one.objective = vec![(x, 1.0)];
    assert_eq!(export_lp(&one), include_str!("golden/one_variable.lp"));

    let inst = appendix_b();
    let m = build_for_instance(&inst, Family::F1, Sorting::U, TreeKind::Mtz, &BuildOptions::default()).unwrap();
    let text = export_lp(&m);
    assert_eq!(text, include_str!("golden/appendixB_F1_U_MTZ.lp"));
    // structural declarations and dimension-table rows read back from the file
    let back = parse_lp(include_str!("golden/appendixB_F1_U_MTZ.lp")).unwrap();
    assert_eq!(back.reported_size(), (42, 49));
    assert_eq!(back.count_symbol(Symbol::U), 20);
}

fn brute_max_subtour_violation(n: usize, z: &[f64]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for mask in 1u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        best = best.max(subtour_lhs(n, z, &set) - (set.len() as f64 - 1.0));
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subtour_separation_matches_enumeration(vals in proptest::collection::vec(0.0f64..1.0, 10)) {
        let n = 5;
        let mut z = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                z[i * n + j] = vals[k];
                k += 1;
            }
        }
        let cuts = separate_subtour(n, &z);
        let best = brute_max_subtour_violation(n, &z);
        if best > 1e-6 {
            prop_assert!(!cuts.is_empty());
            prop_assert!((cuts[0].violation() - best).abs() < 1e-7);
        } else {
            prop_assert!(cuts.is_empty());
        }
        for c in &cuts {
            prop_assert!(c.violation() > 0.0);
            prop_assert!((c.lhs - subtour_lhs(n, &z, &c.set)).abs() < 1e-12);
        }
    }

    #[test]
    fn built_sizes_follow_closed_forms(n in 3usize..=12, p_off in 0usize..10, seed in 0u64..1000, hi in 1u64..40) {
        let p = 2 + p_off % (n - 1);
        let inst = generate_instance(n, p, (1, hi), seed, Criterion::Median).unwrap();
        let h = build_cost_ladder(n, inst.cost_flat()).h_size();
        for f in Family::ALL {
            for s in Sorting::ALL {
                let m = build_for_instance(&inst, f, s, TreeKind::Sub, &BuildOptions::default()).unwrap();
                prop_assert_eq!(m.reported_size(), predicted_size(n, h, f, s));
            }
        }
        let (_, cx) = predicted_size(n, h, Family::F1, Sorting::Xl);
        let (_, cu) = predicted_size(n, h, Family::F1, Sorting::U);
        prop_assert_eq!(cu < cx, h <= n + 1);
    }
}

#[test]
fn relaxations_bound_the_optimum() {
    for seed in 0..3 {
        let inst = generate_instance(5, 2 + seed as usize % 2, (1, 9), seed, Criterion::ALL[seed as usize % 3]).unwrap();
        let opt = solve_exact(&inst).unwrap().objective;
        for family in Family::ALL {
            for sorting in Sorting::ALL {
                for tree in TreeKind::COMPACT {
                    let model = build_for_instance(&inst, family, sorting, tree, &BuildOptions::default()).unwrap();
                    let r = solve_relaxation(&model).unwrap();
                    assert!(r.objective <= opt + 1e-7, "{}: {} > {}", model.name, r.objective, opt);
                    assert!(r.objective >= -1e-9);
                    assert!(kkt_report(&to_lp(&model), &r).holds());
                }
            }
        }
        let sub = build_for_instance(&inst, Family::F1, Sorting::U, TreeKind::Sub, &BuildOptions::default()).unwrap();
        assert!(solve_relaxation(&sub).is_err());
    }
}
