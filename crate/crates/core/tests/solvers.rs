use freezetag::model::{evaluate_tree, validate_tree, DistanceMatrix, FtpInstance, Point2};
use freezetag::solvers::{
    greedy_schedule, lower_bound_eccentricity, solve_branch_bound, solve_branch_bound_with, solve_exhaustive,
    BranchBoundOptions, SolveStatus,
};
use freezetag::Rational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn p(x: i64, y: i64) -> Point2 {
    Point2::from_ints(x, y)
}

fn seed_instance() -> FtpInstance {
    FtpInstance::l1(vec![p(0, 0), p(0, 1), p(8, 1), p(0, -1), p(-6, -1), p(1, 4)], 0).unwrap()
}

fn random_instance(rng: &mut StdRng, max_robots: usize, pool: Option<usize>) -> FtpInstance {
    let n = rng.gen_range(1..=max_robots);
    let coord = |rng: &mut StdRng| Rational::new(rng.gen_range(-20..=20), rng.gen_range(1..=4)).unwrap();
    let robots: Vec<Point2> = match pool {
        // draw from a small set of positions so that duplicates are common
        Some(k) => {
            let spots: Vec<Point2> = (0..k).map(|_| Point2::new(coord(rng), coord(rng))).collect();
            (0..n).map(|_| spots[rng.gen_range(0..k)]).collect()
        }
        None => (0..n).map(|_| Point2::new(coord(rng), coord(rng))).collect(),
    };
    let source = rng.gen_range(0..n);
    FtpInstance::l1(robots, source).unwrap()
}

#[test]
fn seed_instance_values() {
    let inst = seed_instance();
    assert_eq!(lower_bound_eccentricity(&inst).unwrap(), 9.into());
    assert_eq!(solve_exhaustive(&inst).unwrap().optimum(), Some(9.into()));
    let bb = solve_branch_bound(&inst, None).unwrap();
    assert_eq!(bb.status, SolveStatus::Optimal);
    assert_eq!(bb.optimum(), Some(9.into()));
    let greedy = greedy_schedule(&inst).unwrap();
    assert_eq!(greedy.makespan, Some(13.into()));
    // r1 -> a1 -> b1 -> b'1, a1 -> c1, b1 -> a'1
    assert_eq!(
        greedy.tree.unwrap().parent,
        vec![None, Some(0), Some(3), Some(1), Some(3), Some(1)]
    );
}

#[test]
fn decision_mode() {
    let inst = seed_instance();
    let yes = solve_branch_bound(&inst, Some(9.into())).unwrap();
    assert_eq!(yes.answer(), Some(true));
    assert!(validate_tree(yes.tree.as_ref().unwrap(), &inst, Some(9.into())).is_ok());
    let no = solve_branch_bound(&inst, Some(Rational::new(17, 2).unwrap())).unwrap();
    assert_eq!(no.answer(), Some(false));
    assert!(no.tree.is_none());
    // below the eccentricity bound there is nothing to search
    let trivial = solve_branch_bound(&inst, Some(8.into())).unwrap();
    assert_eq!(trivial.answer(), Some(false));
    assert_eq!(trivial.nodes_explored(), 0);
}

#[test]
fn budget_exhaustion_is_inconclusive() {
    // eight robots on a ring need a real search to settle optimality
    let inst = FtpInstance::l1(
        vec![
            p(0, 0),
            p(5, 0),
            p(-5, 0),
            p(0, 5),
            p(0, -5),
            p(3, 3),
            p(-3, -3),
            p(3, -3),
        ],
        0,
    )
    .unwrap();
    let full = solve_branch_bound(&inst, None).unwrap();
    assert!(full.nodes_explored() > 10);
    let opts = BranchBoundOptions {
        node_limit: Some(3),
        ..Default::default()
    };
    let res = solve_branch_bound_with(&inst, &opts).unwrap();
    assert_eq!(res.status, SolveStatus::Inconclusive);
    assert_eq!(res.answer(), None);
}

#[test]
fn explicit_metric_star() {
    // a weighted star: centre 0 with leaves at distances 1, 2, 3
    let r = |v: i64| Rational::from(v);
    let rows = vec![
        vec![r(0), r(1), r(2), r(3)],
        vec![r(1), r(0), r(3), r(4)],
        vec![r(2), r(3), r(0), r(5)],
        vec![r(3), r(4), r(5), r(0)],
    ];
    let inst = FtpInstance::explicit(DistanceMatrix::from_rows(rows).unwrap(), vec![], 0).unwrap();
    let ex = solve_exhaustive(&inst).unwrap().optimum().unwrap();
    let bb = solve_branch_bound(&inst, None).unwrap().optimum().unwrap();
    assert_eq!(ex, bb);
}

#[test]
fn branch_bound_matches_exhaustive_on_random_instances() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for round in 0..300 {
        let pool = match round % 3 {
            0 => None,
            1 => Some(2),
            _ => Some(3),
        };
        let inst = random_instance(&mut rng, 6, pool);
        let ex = solve_exhaustive(&inst).unwrap().optimum().unwrap();
        for (sym, dom) in [(true, true), (false, false), (true, false), (false, true)] {
            let opts = BranchBoundOptions {
                symmetry_breaking: sym,
                dominance: dom,
                ..Default::default()
            };
            let res = solve_branch_bound_with(&inst, &opts).unwrap();
            assert_eq!(res.optimum(), Some(ex), "round {round} sym={sym} dom={dom}: {inst:?}");
            let tree = res.tree.unwrap();
            assert_eq!(evaluate_tree(&tree, &inst).unwrap().makespan, ex);
        }
        let greedy = greedy_schedule(&inst).unwrap();
        let g = greedy.makespan.unwrap();
        assert!(validate_tree(greedy.tree.as_ref().unwrap(), &inst, Some(g)).is_ok());
        let ecc = lower_bound_eccentricity(&inst).unwrap();
        assert!(ecc <= ex && ex <= g, "sandwich fails in round {round}");
        // decision at the optimum is YES, just below it NO
        assert_eq!(solve_branch_bound(&inst, Some(ex)).unwrap().answer(), Some(true));
        if ex > Rational::ZERO {
            let below = ex.checked_sub(Rational::new(1, 1000).unwrap()).unwrap();
            assert_eq!(solve_branch_bound(&inst, Some(below)).unwrap().answer(), Some(false));
        }
    }
}

#[test]
fn single_threaded_runs_are_reproducible() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..20 {
        let inst = random_instance(&mut rng, 7, Some(4));
        let a = solve_branch_bound(&inst, None).unwrap();
        let b = solve_branch_bound(&inst, None).unwrap();
        assert_eq!(a.tree, b.tree);
        assert_eq!(a.makespan, b.makespan);
        assert_eq!(a.stats.nodes_explored, b.stats.nodes_explored);
    }
}
