//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::fs;
use std::path::Path;
use std::time::Instant;

use nlgames::analysis::{count_for_neighbor_count, estimate_linear_proportion};
use nlgames::rankmodel::derive_with_neighbor_count;
use nlgames::{
    ca_local_next, classify, complement_transform, count_rank_matrices, derive_rank_matrix,
    is_linear_realizable, make_grid, parse_rank_matrix, random_rank_matrix, rows_monotone,
    serialize_rank_matrix, step, ExactGame, Game, GameMatrix, Grid, Init, Patch, PortableRng,
    RankMatrix, Topology, TopologyKind, UpdateRule,
};
use nlgames_cli::{cmd_simulate, RunManifest};

type Check = Result<String, String>;
type Files = Vec<(String, Vec<u8>)>;

const TOPOLOGIES: [TopologyKind; 3] = TopologyKind::ALL;
const RULES: [UpdateRule; 2] = UpdateRule::ALL;

fn random_game(rng: &mut PortableRng) -> Game {
    let mut draw = || 2.0 * rng.unit() - 1.0;
    GameMatrix::new(draw(), draw(), draw(), draw()).expect("finite draws")
}

fn ensure(cond: bool, detail: String) -> Check {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac1_pd_payoffs() -> Check {
    let game: ExactGame = GameMatrix::parse("1.0,0.1,1.9,0.3").map_err(|e| e.to_string())?;
    let table = [
        [
            "8.0", "7.1", "6.2", "5.3", "4.4", "3.5", "2.6", "1.7", "0.8",
        ],
        [
            "15.2", "13.6", "12.0", "10.4", "8.8", "7.2", "5.6", "4.0", "2.4",
        ],
    ];
    let mut exact = 0;
    for (s, row) in table.iter().enumerate() {
        for (k, want) in row.iter().enumerate() {
            let want = nlgames::scalar::parse_decimal(want).expect("table literal");
            if game.payoff(s as u8, k, 8).map_err(|e| e.to_string())? == want {
                exact += 1;
            }
        }
    }
    ensure(exact == 18, format!("{exact}/18 payoff sums exact"))
}

fn ac2_pd_ranks() -> Check {
    let game: ExactGame = GameMatrix::parse("1.0,0.1,1.9,0.3").map_err(|e| e.to_string())?;
    let rm = derive_rank_matrix(&game, &Topology::moore8()).map_err(|e| e.to_string())?;
    let ok = rm.row(0) == [13, 11, 10, 8, 7, 5, 4, 2, 1]
        && rm.row(1) == [18, 17, 16, 15, 14, 12, 9, 6, 3];
    ensure(ok, format!("derived {}", rm.to_inline()))
}

fn ac3_monotone() -> Check {
    let mut rng = PortableRng::new(3);
    let (mut derived, mut failures, mut skipped) = (0, 0, 0);
    for kind in TOPOLOGIES {
        let mut done = 0;
        while done < 1000 {
            match derive_rank_matrix(&random_game(&mut rng), &Topology::new(kind)) {
                Ok(rm) => {
                    done += 1;
                    derived += 1;
                    failures += usize::from(!rows_monotone(&rm));
                }
                Err(_) => skipped += 1,
            }
        }
    }
    ensure(
        failures == 0,
        format!("{derived} derived matrices, {failures} non-monotone, {skipped} non-generic draws skipped"),
    )
}

fn ac4_soundness() -> Check {
    let mut rng = PortableRng::new(4);
    let (mut tested, mut failures) = (0, Vec::new());
    for kind in TOPOLOGIES {
        let topology = Topology::new(kind);
        let mut done = 0;
        while done < 500 {
            let Ok(rm) = derive_rank_matrix(&random_game(&mut rng), &topology) else {
                continue;
            };
            done += 1;
            tested += 1;
            let certified = match is_linear_realizable(&rm) {
                Ok(res) if res.realizable => res
                    .witness
                    .as_ref()
                    .and_then(|w| derive_rank_matrix(w, &topology).ok())
                    .is_some_and(|again| again == rm),
                _ => false,
            };
            if !certified {
                failures.push(rm.to_inline());
            }
        }
    }
    ensure(
        failures.is_empty(),
        format!(
            "{tested} game-derived matrices, {} without a certified witness {failures:?}",
            failures.len()
        ),
    )
}

/// Every `2 x (n+1)` rank matrix, by recursive swapping.
fn all_matrices(n: usize) -> Vec<RankMatrix> {
    fn permute(items: &mut Vec<u32>, start: usize, out: &mut Vec<Vec<u32>>) {
        if start == items.len() {
            out.push(items.clone());
            return;
        }
        for i in start..items.len() {
            items.swap(start, i);
            permute(items, start + 1, out);
            items.swap(start, i);
        }
    }
    let mut perms = Vec::new();
    permute(&mut (1..=2 * (n as u32 + 1)).collect(), 0, &mut perms);
    perms
        .iter()
        .map(|p| RankMatrix::with_neighbor_count(n, &p[..n + 1], &p[n + 1..]).expect("permutation"))
        .collect()
}

fn ac5_n1() -> Check {
    let matrices = all_matrices(1);
    let mut realizable = 0;
    for rm in &matrices {
        let res = is_linear_realizable(rm).map_err(|e| e.to_string())?;
        let certified = res
            .witness
            .as_ref()
            .and_then(|w| derive_with_neighbor_count(w, 1).ok())
            .is_some_and(|again| again.entries() == rm.entries());
        realizable += usize::from(res.realizable && certified);
    }
    ensure(
        matrices.len() == 24 && realizable == 24,
        format!(
            "{realizable}/{} permutations realizable with certified witness",
            matrices.len()
        ),
    )
}

fn ac6_proportion() -> Check {
    let c =
        estimate_linear_proportion(&Topology::moore8(), 10_000, 0).map_err(|e| e.to_string())?;
    let bound = c.proportion + c.half_width;
    ensure(
        bound < 0.01 && c.non_monotone_realizable == 0 && c.solver_failures == 0,
        format!(
            "{}/{} realizable, proportion {:.6} + half-width {:.6} = {bound:.6} (< 0.01), {} non-monotone realizable, {} solver failures",
            c.realizable, c.samples, c.proportion, c.half_width, c.non_monotone_realizable, c.solver_failures
        ),
    )
}

fn ac7_ca_equivalence() -> Check {
    let (mut pairs, mut cells, mut mismatches) = (0, 0, 0);
    for kind in TOPOLOGIES {
        let topology = Topology::new(kind);
        for rule in RULES {
            for i in 0..100u64 {
                let rm = random_rank_matrix(&topology, 7_000 + i);
                let g = make_grid(8, 8, &Init::Bernoulli(0.5), 9_000 + i, &topology)
                    .map_err(|e| e.to_string())?;
                let next = step(&g, &rm, &topology, rule).map_err(|e| e.to_string())?;
                pairs += 1;
                for r in 0..8 {
                    for c in 0..8 {
                        let local =
                            ca_local_next(&Patch::from_grid(&g, r, c), &rm, &topology, rule)
                                .map_err(|e| e.to_string())?;
                        cells += 1;
                        mismatches += usize::from(local != next.get(r, c));
                    }
                }
            }
        }
    }
    ensure(
        mismatches == 0,
        format!("{pairs} pairs, {cells} cells, {mismatches} mismatches"),
    )
}

fn ac8_invariants() -> Check {
    let mut rng = PortableRng::new(8);
    let mut failures = Vec::new();

    let mut uniform_cases = 0;
    for i in 0..100u64 {
        let topology = Topology::new(TOPOLOGIES[i as usize % 3]);
        let rm = random_rank_matrix(&topology, 100 + i);
        for s in [0, 1] {
            for rule in RULES {
                let g = Grid::filled(6, 6, s).expect("positive size");
                uniform_cases += 1;
                if step(&g, &rm, &topology, rule).map_err(|e| e.to_string())? != g {
                    failures.push(format!("uniform {s} {topology:?} {rule}"));
                }
            }
        }
    }

    let random_case = |rng: &mut PortableRng,
                       i: u64|
     -> Result<(Topology, UpdateRule, RankMatrix, Grid), String> {
        let topology = Topology::new(TOPOLOGIES[rng.below(3) as usize]);
        let rule = RULES[rng.below(2) as usize];
        let rows = 2 * (3 + rng.below(4) as usize);
        let cols = 3 + rng.below(8) as usize;
        let rm = random_rank_matrix(&topology, 500 + i);
        let g = make_grid(rows, cols, &Init::Bernoulli(rng.unit()), 600 + i, &topology)
            .map_err(|e| e.to_string())?;
        Ok((topology, rule, rm, g))
    };

    for i in 0..100u64 {
        let (topology, rule, rm, g) = random_case(&mut rng, i)?;
        let lhs = step(&g.complement(), &complement_transform(&rm), &topology, rule)
            .map_err(|e| e.to_string())?;
        let rhs = step(&g, &rm, &topology, rule)
            .map_err(|e| e.to_string())?
            .complement();
        if lhs != rhs {
            failures.push(format!("complement case {i}"));
        }
    }

    for i in 0..50u64 {
        let (topology, rule, rm, g) = random_case(&mut rng, 1_000 + i)?;
        // Hex offsets depend on row parity, so only even row shifts are symmetries.
        let mut dr = rng.below(g.rows() as u64) as isize;
        if topology.kind() == TopologyKind::Hex6 {
            dr -= dr % 2;
        }
        let dc = rng.below(g.cols() as u64) as isize;
        let lhs = step(&g.shifted(dr, dc), &rm, &topology, rule).map_err(|e| e.to_string())?;
        let rhs = step(&g, &rm, &topology, rule)
            .map_err(|e| e.to_string())?
            .shifted(dr, dc);
        if lhs != rhs {
            failures.push(format!("translation case {i}"));
        }
    }
    ensure(
        failures.is_empty(),
        format!(
            "{uniform_cases} uniform, 100 complement, 50 translation cases; failures {failures:?}"
        ),
    )
}

const EXAMPLE_MATRICES: [(TopologyKind, &str); 3] = [
    (
        TopologyKind::Moore8,
        "12 8 16 14 9 3 6 1 10/2 11 18 17 5 13 4 15 7",
    ),
    (
        TopologyKind::Moore8,
        "9 18 4 13 5 1 8 7 14/3 12 10 17 11 6 16 15 2",
    ),
    (TopologyKind::Hex6, "4 13 1 5 10 2 7/9 14 12 11 6 8 3"),
];

/// Grid seed of the acceptance run: the command-line default.
const AC9_SEED: u64 = 0;

fn ac9_example_matrices() -> Check {
    let mut details = Vec::new();
    let mut ok = true;
    for (kind, inline) in EXAMPLE_MATRICES {
        let start = Instant::now();
        let rm = RankMatrix::parse_inline(kind, inline).map_err(|e| e.to_string())?;
        let text = serialize_rank_matrix(&rm).map_err(|e| e.to_string())?;
        let reparsed = parse_rank_matrix(&text).map_err(|e| e.to_string())?;
        let topology = Topology::new(kind);
        let g = make_grid(100, 100, &Init::Bernoulli(0.5), AC9_SEED, &topology)
            .map_err(|e| e.to_string())?;
        let class = classify(&g, &reparsed, &topology, UpdateRule::default(), 200)
            .map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        let survived = reparsed == rm && class.first_uniform.is_none() && secs < 10.0;
        ok &= survived;
        details.push(format!(
            "{kind} [{inline}]: {} final density {:.4} ({secs:.2}s)",
            class.kind,
            class.density.last().copied().unwrap_or(0.0)
        ));
    }
    ensure(
        ok,
        format!(
            "seed {AC9_SEED}, best rule, never uniform: {}",
            details.join("; ")
        ),
    )
}

/// The same runs over more seeds; informational only.
fn ac9_seed_survey() -> Vec<String> {
    let mut lines = Vec::new();
    for (kind, inline) in EXAMPLE_MATRICES {
        let rm = RankMatrix::parse_inline(kind, inline).expect("example matrix");
        let topology = Topology::new(kind);
        for rule in RULES {
            let uniform = (0..20u64)
                .filter(|&seed| {
                    let g = make_grid(100, 100, &Init::Bernoulli(0.5), seed, &topology).unwrap();
                    classify(&g, &rm, &topology, rule, 200)
                        .unwrap()
                        .first_uniform
                        .is_some()
                })
                .count();
            lines.push(format!("{kind} [{inline}] rule={rule}: uniform within 200 steps for {uniform}/20 grid seeds"));
        }
    }
    lines
}

fn ac10_count() -> Check {
    let count = count_rank_matrices(&Topology::moore8());
    ensure(
        count.to_string() == "6402373705728000" && count == count_for_neighbor_count(8),
        format!("count_rank_matrices(moore8) = {count}"),
    )
}

fn snapshot(dir: &Path) -> Files {
    let mut files: Vec<_> = fs::read_dir(dir)
        .expect("output dir")
        .map(|e| {
            let p = e.expect("dir entry").path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).expect("frame"),
            )
        })
        .collect();
    files.sort();
    files
}

fn ac11_determinism() -> Check {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let manifest_text = |dir: &Path| {
        format!(
            "topology = \"hex6\"\nranks = \"inline:4 13 1 5 10 2 7/9 14 12 11 6 8 3\"\nrows = 60\ncols = 50\n\
             init = \"bernoulli:0.5\"\nseed = 21\nrule = \"any-better\"\nsteps = 40\nformat = \"pbm-binary\"\n\
             stride = 2\nout = {:?}\n",
            dir.display().to_string()
        )
    };
    let run_in = |name: &str| -> Result<(String, Files), String> {
        let dir = root.path().join(name);
        let spec = RunManifest::from_toml(&manifest_text(&dir))
            .and_then(|m| m.resolve())
            .map_err(|e| e.to_string())?;
        let mut out = Vec::new();
        cmd_simulate(&spec, &mut out).map_err(|e| e.to_string())?;
        Ok((
            String::from_utf8(out).map_err(|e| e.to_string())?,
            snapshot(&dir),
        ))
    };
    let first = run_in("a")?;
    let second = run_in("b")?;
    let concurrent: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..4)
            .map(|i| {
                let run_in = &run_in;
                s.spawn(move || run_in(&format!("t{i}")))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("thread"))
            .collect()
    });
    let mut identical = first == second && first.1.len() == 22;
    for run in concurrent {
        identical &= run? == first;
    }
    ensure(
        identical,
        format!(
            "6 runs (2 sequential, 4 concurrent) of one manifest, {} files each, byte-identical",
            first.1.len()
        ),
    )
}

fn main() {
    type Criterion = (&'static str, &'static str, fn() -> Check);
    let criteria: [Criterion; 11] = [
        ("AC1", "PD payoff table", ac1_pd_payoffs),
        ("AC2", "PD rank matrix", ac2_pd_ranks),
        ("AC3", "derived matrices are monotone", ac3_monotone),
        ("AC4", "realizability soundness", ac4_soundness),
        ("AC5", "one-neighbor completeness", ac5_n1),
        ("AC6", "small realizable proportion", ac6_proportion),
        ("AC7", "cellular automaton equivalence", ac7_ca_equivalence),
        ("AC8", "fixed points and symmetries", ac8_invariants),
        (
            "AC9",
            "example matrices stay non-uniform",
            ac9_example_matrices,
        ),
        ("AC10", "rank matrix count", ac10_count),
        ("AC11", "simulation determinism", ac11_determinism),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("{id} PASS {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("{id} FAIL {name}: {detail} [{secs:.2}s]");
            }
        }
        if id == "AC9" {
            for line in ac9_seed_survey() {
                println!("AC9 INFO {line}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
