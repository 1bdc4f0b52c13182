//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use freezetag::harness::{verify_reduction, VerifyOptions};
use freezetag::model::{build_distance_matrix, evaluate_tree, l1_distance, validate_tree, FtpInstance, Point2};
use freezetag::n3dm::{brute_force_match, shift_w, validate_n3dm, N3dmInstance};
use freezetag::reduction::{
    canonical_schedule, construct_reduction, embed_grid, layout_soundness, perturb_unique, required_shift,
    scale_to_integers, ReductionArtifacts, ReductionError,
};
use freezetag::solvers::{
    greedy_schedule, lower_bound_eccentricity, solve_branch_bound, solve_exhaustive, SolveStatus,
};
use freezetag::Rational;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d).unwrap()
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    check(took <= limit, || format!("took {took:?}, limit {limit:?}"))
}

fn n3dm(u: &[i64], v: &[i64], w: &[i64]) -> N3dmInstance {
    validate_n3dm(u, v, w).unwrap()
}

fn auto_shifted(inst: &N3dmInstance) -> ReductionArtifacts {
    construct_reduction(&shift_w(inst, required_shift(inst)).unwrap()).unwrap()
}

fn seed_equivalence() -> Outcome {
    let start = Instant::now();
    let inst = n3dm(&[1], &[1], &[1]);
    let art = construct_reduction(&inst).map_err(|e| e.to_string())?;
    check(art.l == 9.into(), || format!("L = {}", art.l))?;
    let m = brute_force_match(&inst).unwrap().ok_or("N3DM oracle says NO")?;
    let tree = canonical_schedule(&art, &m).map_err(|e| e.to_string())?;
    let canon = evaluate_tree(&tree, &art.instance).unwrap().makespan;
    check(canon == 9.into(), || format!("canonical makespan {canon}"))?;
    let opt = solve_branch_bound(&art.instance, None).unwrap().optimum();
    check(opt == Some(9.into()), || format!("solver optimum {opt:?}"))?;
    let report = verify_reduction(
        &inst,
        &VerifyOptions {
            optimize: true,
            ..Default::default()
        },
    )
    .unwrap();
    check(report.equivalence_holds == Some(true), || {
        format!("equivalence_holds {:?}", report.equivalence_holds)
    })?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("L = 9, canonical = {canon}, OPT = 9, {:?}", start.elapsed()))
}

fn yes_instance_n2() -> Outcome {
    let start = Instant::now();
    let inst = n3dm(&[2, 2], &[1, 1], &[1, 1]);
    let k = required_shift(&inst);
    check(k == 1, || format!("K = {k}"))?;
    let art = auto_shifted(&inst);
    check(art.l == 20.into(), || format!("L = {}", art.l))?;
    let m = brute_force_match(&art.n3dm).unwrap().ok_or("N3DM oracle says NO")?;
    let tree = canonical_schedule(&art, &m).map_err(|e| e.to_string())?;
    let canon = evaluate_tree(&tree, &art.instance).unwrap().makespan;
    check(canon == 20.into(), || format!("canonical makespan {canon}"))?;
    let res = solve_branch_bound(&art.instance, Some(art.l)).unwrap();
    check(res.status == SolveStatus::Yes, || {
        format!("decision at 20: {:?}", res.status)
    })?;
    let witness = res.tree.ok_or("YES without witness")?;
    validate_tree(&witness, &art.instance, Some(art.l)).map_err(|v| format!("witness invalid: {v:?}"))?;
    within(start, Duration::from_secs(600))?;
    Ok(format!(
        "K = 1, L = 20, canonical = 20, decision YES with valid witness, {} nodes, {:?}",
        res.stats.nodes_explored,
        start.elapsed()
    ))
}

fn no_instance_n2() -> Outcome {
    let start = Instant::now();
    let inst = n3dm(&[3, 1], &[1, 1], &[1, 1]);
    check(brute_force_match(&inst).unwrap().is_none(), || {
        "N3DM oracle says YES".into()
    })?;
    let art = auto_shifted(&inst);
    check(art.l == 20.into(), || format!("L = {}", art.l))?;
    let res = solve_branch_bound(&art.instance, Some(art.l)).unwrap();
    if res.status == SolveStatus::Yes {
        let tree = res.tree.unwrap();
        let eval = evaluate_tree(&tree, &art.instance).unwrap();
        let parent: Vec<String> = tree
            .parent
            .iter()
            .map(|p| p.map_or("-".to_string(), |p| p.to_string()))
            .collect();
        return Err(format!(
            "N3DM oracle NO, but decision at 20 is YES: witness parent [{}] has makespan {}",
            parent.join(","),
            eval.makespan
        ));
    }
    check(res.status == SolveStatus::No, || {
        format!("decision at 20: {:?}", res.status)
    })?;
    within(start, Duration::from_secs(600))?;
    Ok(format!("N3DM NO, decision at 20 NO, {:?}", start.elapsed()))
}

fn random_instance(rng: &mut StdRng) -> FtpInstance {
    let n = rng.gen_range(1..=6);
    let mut coord = || r(rng.gen_range(-20..=20), rng.gen_range(1..=4));
    let robots: Vec<Point2> = (0..n).map(|_| Point2::new(coord(), coord())).collect();
    let source = rng.gen_range(0..n);
    FtpInstance::l1(robots, source).unwrap()
}

fn solver_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xacce97);
    let count = 120;
    for case in 0..count {
        let inst = random_instance(&mut rng);
        let bb = solve_branch_bound(&inst, None).unwrap().optimum();
        let ex = solve_exhaustive(&inst).unwrap().optimum();
        check(bb.is_some() && bb == ex, || {
            format!("case {case}: branch-and-bound {bb:?}, exhaustive {ex:?}")
        })?;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{count} instances agree, {:?}", start.elapsed()))
}

fn geometry_identities(art: &ReductionArtifacts) -> Result<(), String> {
    let n = art.n();
    let inst = &art.n3dm;
    let d = |p: &Point2, q: &Point2| l1_distance(p, q).unwrap();
    let o = Point2::origin();
    let int = |x: i64| Rational::from(x);
    let q = int(inst.q());
    let nq = q.checked_mul_int(n as i128).unwrap();
    check(art.instance.len() == 6 * n, || format!("{} robots", art.instance.len()))?;
    for i in 0..n {
        check(d(art.a_prime(i), &o) == art.l, || format!("|A'_{}| != L", i + 1))?;
        check(d(art.a(i), &o) == int(inst.u()[i]), || format!("|A_{}| != u", i + 1))?;
        check(
            d(art.b_prime(i), art.a(i)) == art.l.checked_sub(int(inst.u()[i])).unwrap(),
            || format!("|B'_{0} - A_{0}| != L - u", i + 1),
        )?;
        let (b, bp) = (art.b(i), art.b_prime(i));
        check(bp.x <= b.x && bp.y <= b.y, || {
            format!("B'_{0} does not dominate below B_{0}", i + 1)
        })?;
        if i + 1 < n {
            let (a, next) = (art.a(i), art.a(i + 1));
            check(next.x < a.x && next.y > a.y, || {
                format!("A_{} -> A_{} not monotone", i + 1, i + 2)
            })?;
        }
        for j in 0..n {
            check(d(art.b(j), art.a(i)) == int(inst.u()[i] + inst.v()[j]), || {
                format!("|B_{} - A_{}| != u + v", j + 1, i + 1)
            })?;
            let want = int(inst.v()[j] + 2 * inst.w()[i]).checked_add(nq).unwrap();
            check(d(art.c(i), art.b(j)) == want, || {
                format!("|C_{} - B_{}| != v + 2w + nq", i + 1, j + 1)
            })?;
            if i < j {
                let two_delta = art.delta.checked_mul_int(2).unwrap();
                check(d(art.c(i), art.c(j)) >= two_delta, || {
                    format!("|C_{} - C_{}| < 2 delta", i + 1, j + 1)
                })?;
            }
        }
    }
    Ok(())
}

fn random_n3dm(rng: &mut StdRng, n: usize, max: i64) -> N3dmInstance {
    loop {
        let mut draw = || (0..n).map(|_| rng.gen_range(1..=max)).collect::<Vec<_>>();
        let (u, v, w) = (draw(), draw(), draw());
        if let Ok(inst) = validate_n3dm(&u, &v, &w) {
            return inst;
        }
    }
}

fn geometry_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x9e0);
    let mut count = 0;
    for n in 1..=3 {
        for _ in 0..20 {
            let inst = random_n3dm(&mut rng, n, 4);
            let art = auto_shifted(&inst);
            geometry_identities(&art)
                .map_err(|e| format!("U={:?} V={:?} W={:?}: {e}", inst.u(), inst.v(), inst.w()))?;
            count += 1;
        }
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!(
        "{count} instances, all identities exact, {:?}",
        start.elapsed()
    ))
}

fn soundness_gap() -> Outcome {
    let art = construct_reduction(&n3dm(&[2, 2], &[1, 1], &[1, 1])).unwrap();
    let report = layout_soundness(&art).unwrap();
    let listed: Vec<String> = report
        .violations
        .iter()
        .map(|v| format!("({},{}) slack {}", v.j + 1, v.k + 1, v.slack))
        .collect();
    let refused = matches!(
        canonical_schedule(&art, &brute_force_match(&art.n3dm).unwrap().unwrap()),
        Err(ReductionError::Unsound(_))
    );
    check(refused, || "canonical_schedule did not refuse".into())?;
    let exactly = report.violations.len() == 1
        && (report.violations[0].j, report.violations[0].k) == (1, 1)
        && report.violations[0].slack == (-2).into();
    check(exactly, || {
        format!("expected exactly (2,2) slack -2, got {}", listed.join(", "))
    })?;
    Ok("one violating pair (2,2) slack -2; canonical_schedule refuses".into())
}

fn integer_scaling() -> Outcome {
    let start = Instant::now();
    let art = auto_shifted(&n3dm(&[2, 2], &[1, 1], &[1, 1]));
    let (scaled, factor) = scale_to_integers(&art).map_err(|e| e.to_string())?;
    check(factor == 2.into(), || format!("factor {factor}"))?;
    check(
        scaled.robots().iter().all(|p| p.x.is_integer() && p.y.is_integer()),
        || "non-integer coordinate".into(),
    )?;
    let opt = solve_branch_bound(&scaled, None).unwrap().optimum();
    check(opt == Some(40.into()), || format!("scaled optimum {opt:?}"))?;
    within(start, Duration::from_secs(600))?;
    Ok(format!("integer coordinates, OPT = 40 = 2 x 20, {:?}", start.elapsed()))
}

#[allow(clippy::needless_range_loop)]
fn grid_matches(inst: &FtpInstance) -> Result<usize, String> {
    let grid = embed_grid(inst).map_err(|e| e.to_string())?;
    let bfs = grid.robot_distances();
    let m = build_distance_matrix(inst).unwrap();
    for i in 0..inst.len() {
        for j in 0..inst.len() {
            let want = m.get(i, j);
            check(Rational::from(bfs[i][j] as i64) == want, || {
                format!("pair ({i},{j}): BFS {} vs L1 {want}", bfs[i][j])
            })?;
        }
    }
    Ok(grid.cell_count())
}

fn grid_embedding() -> Outcome {
    let start = Instant::now();
    let seed = construct_reduction(&n3dm(&[1], &[1], &[1])).unwrap();
    let seed_cells = grid_matches(&seed.instance)?;
    let (scaled, _) = scale_to_integers(&auto_shifted(&n3dm(&[2, 2], &[1, 1], &[1, 1]))).unwrap();
    let scaled_cells = grid_matches(&scaled)?;
    within(start, Duration::from_secs(10))?;
    Ok(format!(
        "BFS = L1 on all pairs ({seed_cells} and {scaled_cells} cells), {:?}",
        start.elapsed()
    ))
}

fn greedy_sandwich() -> Outcome {
    let start = Instant::now();
    let inst = construct_reduction(&n3dm(&[1], &[1], &[1])).unwrap().instance;
    let ecc = lower_bound_eccentricity(&inst).unwrap();
    let opt = solve_branch_bound(&inst, None).unwrap().optimum().ok_or("no optimum")?;
    let greedy = greedy_schedule(&inst).unwrap().makespan.ok_or("no greedy makespan")?;
    check(ecc == 9.into() && opt == 9.into() && greedy == 13.into(), || {
        format!("eccentricity {ecc}, optimum {opt}, greedy {greedy}")
    })?;
    check(ecc <= opt && opt <= greedy, || "sandwich violated".into())?;
    within(start, Duration::from_secs(1))?;
    Ok("eccentricity 9 <= optimum 9 <= greedy 13".into())
}

fn perturbation_bound() -> Outcome {
    let start = Instant::now();
    let inst = construct_reduction(&n3dm(&[1], &[1], &[1])).unwrap().instance;
    let rho = r(1, 8);
    let moved = perturb_unique(&inst, rho).map_err(|e| e.to_string())?;
    let pts = moved.robots();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            check(pts[i] != pts[j], || format!("robots {i} and {j} coincide"))?;
        }
    }
    let opt = solve_branch_bound(&moved, None)
        .unwrap()
        .optimum()
        .ok_or("no optimum")?;
    let gap = opt.checked_sub(9.into()).and_then(Rational::checked_abs).unwrap();
    let bound = rho.checked_mul_int(2 * inst.len() as i128).unwrap();
    check(gap <= bound, || format!("|OPT' - 9| = {gap} > {bound}"))?;
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "positions distinct, OPT' = {opt}, |OPT' - 9| = {gap} <= {bound}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("seed equivalence (n=1)", seed_equivalence),
        ("yes-instance at n=2", yes_instance_n2),
        ("no-instance at n=2", no_instance_n2),
        ("solver oracle equivalence", solver_oracle),
        ("reduction geometry suite", geometry_suite),
        ("soundness-gap regression", soundness_gap),
        ("scaling to integers", integer_scaling),
        ("grid embedding", grid_embedding),
        ("greedy sandwich", greedy_sandwich),
        ("perturbation bound", perturbation_bound),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS  criterion {:>2}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {:>2}: {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
