//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::{coin, random_bounded_family, constraint_pairs, pick, random_complement_closed, random_family, random_instance, random_instance_up_to, rng, ADAPTER_KINDS};
use maxdist::bruteforce::{brute_solve, enumerate_domain, verify_sparsifier, Reference, VerifyScope};
use maxdist::cli::{run, Command, RunConfig};
use maxdist::domains::{explicit_oracle, is_trivial_sparsifier, mincut_oracle, GraphData};
use maxdist::instance::{parse_instance, DomainInstance};
use maxdist::limited::{approx_far_set, dk_sparsify, LimitedSparsifyParams};
use maxdist::small::{k_sparsify, size_bound, SmallSparsifyParams};
use maxdist::solvers::{solve, LimitedBuilder, Problem, ProblemSpec, SmallBuilder, SolveAnswer, SparsifierBuilder};
use maxdist::{DomainOracle, ExtensionOutcome, ExtensionQuery, SetFamily, SparsifyContext, SubsetMask, WeightVector};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn sparsifier_definition() -> Outcome {
    let (mut ok, mut within_bound) = (0, 0);
    for seed in 0..100u64 {
        let mut g = rng(1000 + seed);
        let n = pick(&mut g, 1, 8);
        let k = pick(&mut g, 1, 3);
        let r = pick(&mut g, 0, 4);
        let domain = random_bounded_family(&mut g, n, 30, r);
        let ell = domain.max_cardinality().unwrap_or(0);
        let report = k_sparsify(SmallSparsifyParams::new(k, r, ell).unwrap(), &explicit_oracle(domain.clone())).unwrap();
        let scope = VerifyScope {
            k,
            cap: None,
            reference: Reference::Ball {
                center: SubsetMask::empty(n),
                radius: r,
            },
        };
        if verify_sparsifier(&domain, &report.family, &scope).unwrap().ok() {
            ok += 1;
        }
        if size_bound(k, r, ell).is_none_or(|b| report.family.len() as u128 <= b) {
            within_bound += 1;
        }
    }
    outcome(
        ok == 100 && within_bound == 100,
        format!("{ok}/100 valid, {within_bound}/100 within the size bound"),
    )
}

fn limited_definition() -> Outcome {
    let (mut ok, mut calls, mut sound) = (0, 0, 0);
    for seed in 0..100u64 {
        let mut g = rng(2000 + seed);
        let n = pick(&mut g, 1, 8);
        let domain = random_family(&mut g, n, 30);
        let k = pick(&mut g, 1, 3);
        let d = pick(&mut g, 0, 3);
        let params = LimitedSparsifyParams::new(k, d).unwrap().with_seed(seed);
        let report = dk_sparsify(&explicit_oracle(domain.clone()), &params).unwrap();
        let scope = VerifyScope {
            k,
            cap: Some(d),
            reference: Reference::PowerSet,
        };
        if verify_sparsifier(&domain, &report.family, &scope).unwrap().ok() {
            ok += 1;
        }
        for call in &report.far_set_log {
            calls += 1;
            if call
                .result
                .is_none_or(|f| domain.contains(&f) && call.centers.iter().all(|c| c.distance(&f) > 2 * d))
            {
                sound += 1;
            }
        }
    }
    outcome(
        ok >= 99 && sound == calls,
        format!("{ok}/100 valid, {sound}/{calls} far-set answers sound"),
    )
}

fn certified(answer: &SolveAnswer, spec: &ProblemSpec, domain: &SetFamily) -> bool {
    if !answer.feasible {
        return true;
    }
    let w = &answer.witnesses;
    if w.len() != spec.k || !w.iter().all(|s| domain.contains(s)) {
        return false;
    }
    let pairs = || (0..w.len()).flat_map(|i| (i + 1..w.len()).map(move |j| (i, j)));
    match spec.problem {
        Problem::MaxMin => pairs().all(|(i, j)| spec.distance(&w[i], &w[j]) >= spec.d),
        Problem::MaxSum => {
            let sum: usize = pairs().map(|(i, j)| spec.distance(&w[i], &w[j])).sum();
            answer.objective == Some(sum as i64) && sum >= spec.d
        }
        Problem::KCenter | Problem::KSumRadii => {
            let Some(radii) = &answer.radii else { return false };
            let budget_ok = if spec.problem == Problem::KCenter {
                radii.iter().all(|&r| r <= spec.d)
            } else {
                radii.iter().sum::<usize>() <= spec.d
            };
            budget_ok
                && domain
                    .iter()
                    .all(|x| w.iter().zip(radii).any(|(c, &r)| spec.distance(c, x) <= r))
        }
    }
}

fn auto_builder(oracle: &dyn DomainOracle, seed: u64) -> Box<dyn SparsifierBuilder> {
    if oracle.size_bound().is_some() {
        Box::new(SmallBuilder)
    } else {
        Box::new(LimitedBuilder {
            seed,
            ..LimitedBuilder::default()
        })
    }
}

const PROBLEMS: [Problem; 4] = [Problem::MaxMin, Problem::MaxSum, Problem::KCenter, Problem::KSumRadii];

fn solver_equivalence() -> Outcome {
    let (mut agree, mut total, mut uncertified) = (0, 0, 0);
    let mut kinds = BTreeSet::new();
    for seed in 0..200u64 {
        let mut g = rng(3000 + seed);
        let kind = ADAPTER_KINDS[seed as usize % ADAPTER_KINDS.len()];
        kinds.insert(kind);
        let mut cases: Vec<(Box<dyn DomainOracle>, bool)> =
            vec![(random_instance(&mut g, kind).oracle().unwrap(), false)];
        if seed % 4 == 0 {
            let n = pick(&mut g, 1, 7);
            cases.push((Box::new(explicit_oracle(random_complement_closed(&mut g, n, 10))), true));
        }
        for (oracle, modified) in &cases {
            let domain = enumerate_domain(oracle.as_ref()).unwrap();
            let n = oracle.universe_size();
            let builder = auto_builder(oracle.as_ref(), seed);
            for problem in PROBLEMS {
                let k = pick(&mut g, 1, 3);
                let d = match problem {
                    Problem::MaxSum => pick(&mut g, 0, k * n + 1),
                    _ => pick(&mut g, 0, n + 1),
                };
                let mut specs = vec![ProblemSpec::new(problem, k, d)];
                if *modified {
                    specs.push(ProblemSpec::new(problem, k, d).modified());
                }
                for spec in specs {
                    total += 1;
                    let got = solve(oracle.as_ref(), &spec, builder.as_ref()).unwrap().answer;
                    let want = brute_solve(&domain, &spec).unwrap();
                    if got.feasible == want.feasible {
                        agree += 1;
                    } else {
                        eprintln!("  disagreement: seed {seed} {kind} {spec:?}: solver {} brute {}", got.feasible, want.feasible);
                    }
                    if !certified(&got, &spec, &domain) {
                        uncertified += 1;
                        eprintln!("  uncertified witnesses: seed {seed} {kind} {spec:?}");
                    }
                }
            }
        }
    }
    outcome(
        agree == total && uncertified == 0 && kinds.len() == ADAPTER_KINDS.len(),
        format!("{agree}/{total} answers agree over {} adapter kinds, {uncertified} uncertified", kinds.len()),
    )
}

fn domain_equivalence() -> Outcome {
    let (mut opt_ok, mut opt_total, mut ext_ok, mut ext_total) = (0u64, 0u64, 0u64, 0u64);
    let mut opt_skipped = 0u64;
    let mut largest = 0;
    for seed in 0..64u64 {
        let mut g = rng(4000 + seed);
        let kind = ADAPTER_KINDS[seed as usize % ADAPTER_KINDS.len()];
        let oracle = random_instance_up_to(&mut g, kind, 10).oracle().unwrap();
        let n = oracle.universe_size();
        if n > 10 {
            continue;
        }
        largest = largest.max(n);
        let domain = enumerate_domain(oracle.as_ref()).unwrap();
        for bits in 0..1u64 << n {
            let w = WeightVector::from_plus_mask(SubsetMask::from_bits(n, bits).unwrap());
            let best = domain.iter().map(|s| w.weight(s)).max();
            let got = match oracle.opt_pm1(&w) {
                Err(maxdist::Error::Unsupported { .. }) => {
                    opt_skipped += 1;
                    continue;
                }
                other => other.unwrap(),
            };
            opt_total += 1;
            if got.map(|s| (domain.contains(&s), w.weight(&s))) == best.map(|b| (true, b)) {
                opt_ok += 1;
            }
        }
        let constraints = constraint_pairs(n, 4);
        for c in domain.iter() {
            for r in 0..=n {
                for &(x, y) in &constraints {
                    let q = ExtensionQuery::new(*c, r, x, y).unwrap();
                    let exists = domain.iter().any(|s| q.accepts(s));
                    ext_total += 1;
                    let good = match oracle.exact_extend(&q, None).unwrap() {
                        ExtensionOutcome::Found(s) => exists && q.accepts(&s) && domain.contains(&s),
                        ExtensionOutcome::NotFound => !exists,
                        ExtensionOutcome::TrivialSparsifier(_) => false,
                    };
                    if good {
                        ext_ok += 1;
                    } else {
                        eprintln!("  extension mismatch: seed {seed} {kind} {q:?}");
                    }
                }
            }
        }
    }
    outcome(
        opt_ok == opt_total && ext_ok == ext_total,
        format!("optimisation {opt_ok}/{opt_total} ({opt_skipped} unsupported), extension {ext_ok}/{ext_total}, universes up to {largest}"),
    )
}

fn output_of(text: &str, config: &RunConfig) -> String {
    let mut buf = Vec::new();
    run(config, &parse_instance(text).unwrap(), &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

fn named_fixtures() -> Outcome {
    let c4 = "domain matching size=2\ngraph undirected 4 4\n0 1\n1 2\n2 3\n3 0\n";
    let triangle = "domain spanning_tree\ngraph undirected 3 3\n0 1\n1 2\n0 2\n";
    let points = "domain explicit\nuniverse 2\nset 0\nset 1\n";
    let diamond = "domain st_mincut s=0 t=3\ngraph directed 4 4\n0 1\n0 2\n1 3\n2 3\n";
    let solve = |p, k, d| RunConfig::new(Command::Solve).problem(p, k, d);
    let first_line = |text: &str, config: &RunConfig| output_of(text, config).lines().next().unwrap_or("").to_string();
    let checks = [
        first_line(c4, &solve(Problem::MaxMin, 2, 4)) == "YES",
        output_of(c4, &solve(Problem::MaxMin, 2, 4)) == "YES\nset: 0 2\nset: 1 3\n",
        first_line(triangle, &solve(Problem::MaxMin, 3, 2)) == "YES",
        output_of(triangle, &solve(Problem::MaxMin, 2, 3)) == "NO\n",
        first_line(points, &solve(Problem::KCenter, 1, 1)) == "NO",
        first_line(points, &solve(Problem::KCenter, 1, 2)) == "YES",
        output_of(points, &RunConfig::new(Command::Enumerate)) == "size: 2\nset: 0\nset: 1\n",
        output_of(diamond, &RunConfig::new(Command::Enumerate)) == "size: 4\nset: 0\nset: 0 1\nset: 0 2\nset: 0 1 2\n",
    ];
    let passed = checks.iter().filter(|&&c| c).count();
    outcome(passed == checks.len(), format!("{passed}/{} fixtures match", checks.len()))
}

fn far_set_calibration() -> Outcome {
    let n = 10;
    let ends = SetFamily::from_sets(n, [SubsetMask::empty(n), SubsetMask::full(n)]).unwrap();
    let oracle = explicit_oracle(ends);
    let centers = SetFamily::from_sets(n, [SubsetMask::empty(n)]).unwrap();
    let hits = (0..100u64)
        .filter(|&seed| {
            let mut g = ChaCha8Rng::seed_from_u64(seed);
            approx_far_set(&oracle, &centers, 1, 512, &mut g).unwrap() == Some(SubsetMask::full(n))
        })
        .count();
    outcome(hits >= 99, format!("{hits}/100 seeded runs found the far set"))
}

fn brute_min_cuts(graph: &GraphData, s: usize, t: usize) -> BTreeSet<u64> {
    let nv = graph.n_vertices;
    let value = |side: u64| {
        graph
            .edges
            .iter()
            .filter(|&&(u, v)| side >> u & 1 == 1 && side >> v & 1 == 0)
            .count()
    };
    let sides: Vec<u64> = (0..1u64 << nv).filter(|b| b >> s & 1 == 1 && b >> t & 1 == 0).collect();
    let best = sides.iter().map(|&b| value(b)).min().unwrap();
    sides.into_iter().filter(|&b| value(b) == best).collect()
}

fn mincut_structure() -> Outcome {
    let mut agree = 0;
    for seed in 0..50u64 {
        let mut g = rng(7000 + seed);
        let nv = pick(&mut g, 2, 8);
        let graph = common::random_graph(&mut g, true, nv, 20, 1, 3);
        let oracle = mincut_oracle(graph.clone(), 0, nv - 1).unwrap();
        let poset = oracle.poset();
        let via_ideals: BTreeSet<u64> = poset.ideals().unwrap().iter().map(|&i| poset.cut_of(i).bits()).collect();
        let ideal_count = poset.ideals().unwrap().len();
        if poset.is_partial_order() && ideal_count == via_ideals.len() && via_ideals == brute_min_cuts(&graph, 0, nv - 1) {
            agree += 1;
        }
    }

    // synthetic layered graphs with many parallel routes, where the shortcut can fire
    let (mut fired, mut valid) = (0, 0);
    for seed in 0..40u64 {
        let mut g = rng(7500 + seed);
        let width = pick(&mut g, 3, 9);
        let mut edges = Vec::new();
        let sink = width + 1;
        for i in 1..=width {
            edges.push((0, i));
            edges.push((i, sink));
            if coin(&mut g, 1, 4) && i > 1 {
                edges.push((i, i - 1));
            }
        }
        let graph = GraphData::directed(sink + 1, &edges).unwrap();
        let oracle = mincut_oracle(graph, 0, sink).unwrap();
        let domain = enumerate_domain(&oracle).unwrap();
        let k = pick(&mut g, 1, 3);
        let d = pick(&mut g, 0, 2);
        let ctx = SparsifyContext { k, d, p: pick(&mut g, 1, sink + 1) };
        for c in domain.iter() {
            for r in 0..=sink + 1 {
                if let ExtensionOutcome::TrivialSparsifier(fam) =
                    oracle.exact_extend(&ExtensionQuery::around(*c, r), Some(&ctx)).unwrap()
                {
                    fired += 1;
                    if is_trivial_sparsifier(&fam, k, d) && fam.iter().all(|s| domain.contains(s)) {
                        valid += 1;
                    }
                }
            }
        }
        let report = dk_sparsify(&oracle, &LimitedSparsifyParams::new(k, d).unwrap().with_seed(seed)).unwrap();
        if report.shortcut {
            fired += 1;
            if is_trivial_sparsifier(&report.family, k, d) && report.family.is_subfamily_of(&domain) {
                valid += 1;
            }
        }
    }
    outcome(
        agree == 50 && fired > 0 && valid == fired,
        format!("{agree}/50 cut families reproduced, shortcut fired {fired} times, {valid} valid"),
    )
}

fn cli_round_trip() -> Outcome {
    let mut ok = 0;
    for seed in 0..20u64 {
        let mut g = rng(8000 + seed);
        let inst = random_instance(&mut g, ADAPTER_KINDS[seed as usize % ADAPTER_KINDS.len()]);
        let mut buf = Vec::new();
        run(&RunConfig::new(Command::Enumerate), &inst, &mut buf).unwrap();
        let listing = String::from_utf8(buf).unwrap();
        let n = inst.oracle().unwrap().universe_size();
        let explicit: String = format!("domain explicit\nuniverse {n}\n")
            + &listing
                .lines()
                .skip(1)
                .map(|l| l.replacen("set:", "set", 1) + "\n")
                .collect::<String>();
        let DomainInstance::Explicit(parsed) = parse_instance(&explicit).unwrap() else {
            continue;
        };
        if parsed == enumerate_domain(inst.oracle().unwrap().as_ref()).unwrap() {
            ok += 1;
        }
    }
    outcome(ok == 20, format!("{ok}/20 listings re-parse to the same family"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 small sparsifier definition", sparsifier_definition),
        ("2 limited sparsifier definition", limited_definition),
        ("3 solver and brute-force answers", solver_equivalence),
        ("4 adapter and brute-force oracles", domain_equivalence),
        ("5 named fixtures", named_fixtures),
        ("6 far-set completeness", far_set_calibration),
        ("7 min-cut structure", mincut_structure),
        ("8 enumerate round trip", cli_round_trip),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {} ({:.1}s)", o.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
