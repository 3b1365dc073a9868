mod common;

use proptest::prelude::*;

use common::{all_tuples, spec, tree_grid};
use scottrank::equivalence::{compute_family, is_ultrahomogeneous, scott_rank, EngineLimits, NaiveBounds, NaiveOracle};
use scottrank::gromov::{compare_dn, epsilon_net, find_isometric_embedding, is_isometric, GromovLimits};
use scottrank::tree::{build_tree, tree_function_structure, tree_metric_space, BuildLimits};
use scottrank::{parse_space_file, FiniteMetricSpace, Rational, StructureView};

/// Random metric on up to five points: shortest-path closure of random
/// positive edge weights, which always satisfies the axioms.
fn metric_space() -> impl Strategy<Value = FiniteMetricSpace> {
    (1usize..=5)
        .prop_flat_map(|m| (Just(m), proptest::collection::vec(1i64..=4, m * m)))
        .prop_map(|(m, w)| {
            let mut d = vec![vec![0i64; m]; m];
            for i in 0..m {
                for j in 0..m {
                    if i != j {
                        d[i][j] = w[i.min(j) * m + i.max(j)];
                    }
                }
            }
            for k in 0..m {
                for i in 0..m {
                    for j in 0..m {
                        d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                    }
                }
            }
            let rows: Vec<Vec<Rational>> = d.iter().map(|r| r.iter().map(|&v| Rational::integer(v)).collect()).collect();
            FiniteMetricSpace::new(rows, None).unwrap()
        })
}

fn permutation(m: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..m).collect::<Vec<usize>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn engine_matches_oracle_on_random_spaces(s in metric_space()) {
        let view = StructureView::metric(&s);
        let fam = compute_family(&view, s.len(), EngineLimits::default()).unwrap();
        let mut oracle = NaiveOracle::new(&view, NaiveBounds::default()).unwrap();
        for k in 1..=2 {
            for a in all_tuples(s.len(), k) {
                for b in all_tuples(s.len(), k) {
                    for alpha in 0..=3 {
                        prop_assert_eq!(
                            fam.are_equivalent(&a, &b, alpha).unwrap(),
                            oracle.equivalent(&a, &b, alpha).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn invariants_survive_relabeling((s, p) in metric_space().prop_flat_map(|s| { let m = s.len(); (Just(s), permutation(m)) })) {
        let t = s.permuted(&p);
        let lim = EngineLimits::default();
        prop_assert_eq!(
            scott_rank(&StructureView::metric(&s), lim).unwrap(),
            scott_rank(&StructureView::metric(&t), lim).unwrap()
        );
        prop_assert_eq!(
            is_ultrahomogeneous(&s, 10_000).unwrap().homogeneous,
            is_ultrahomogeneous(&t, 10_000).unwrap().homogeneous
        );
        prop_assert!(is_isometric(&s, &t));
        prop_assert!(compare_dn(&s, &t, s.len(), GromovLimits::default()).unwrap().equal);
        // Point i of `s` is point p[i] of `t`.
        let e = find_isometric_embedding(&s, &t, &[0], &[p[0]]).unwrap();
        prop_assert!(e.is_some_and(|e| e.is_isometric_into(&s, &t)));
    }

    #[test]
    fn space_files_round_trip(s in metric_space()) {
        let text = s.to_file_string();
        let back = parse_space_file(&text).unwrap();
        prop_assert_eq!(back.matrix(), s.matrix());
        prop_assert_eq!(back.labels(), s.labels());
    }

    #[test]
    fn nets_cover(s in metric_space(), p in 1i64..12, q in 1i64..4) {
        let eps = Rational::new(p, q);
        let net = epsilon_net(&s, &eps).unwrap();
        for y in 0..s.len() {
            prop_assert!(net.iter().any(|&c| s.dist(c, y) < &eps));
        }
        for (i, &a) in net.iter().enumerate() {
            for &b in &net[i + 1..] {
                prop_assert!(s.dist(a, b) >= &eps);
            }
        }
    }
}

#[test]
fn grid_trees_are_prefix_closed_and_monotone() {
    let grid = tree_grid();
    for g in &grid {
        assert!(g.tree.is_prefix_closed(), "n={} alpha={} cap={}", g.n, g.alpha, g.cap);
        assert!(g.tree.contains(&[]));
        if g.alpha == "0" {
            assert_eq!(g.tree.len() as u64, g.n + 1);
        }
        if let Some(next) = grid.iter().find(|h| h.n == g.n && h.alpha == g.alpha && h.cap == g.cap + 1) {
            assert!(g.tree.is_subset(&next.tree));
        }
    }
}

#[test]
fn tree_views_share_carriers() {
    for g in tree_grid().iter().filter(|g| g.tree.len() <= 60) {
        let metric = tree_metric_space(&g.tree);
        let function = tree_function_structure(&g.tree);
        assert_eq!(metric.labels(), function.labels());
        assert!(metric.is_ultrametric());
    }
}

#[test]
fn truncated_ranks_grow_with_cap() {
    let lim = EngineLimits::default();
    let mut last = 0;
    for cap in 1..=4 {
        let t = build_tree(&spec(0, "1", cap), BuildLimits::default()).unwrap();
        let r = scott_rank(&tree_function_structure(&t), lim).unwrap();
        assert!(r >= last);
        last = r;
    }
}
