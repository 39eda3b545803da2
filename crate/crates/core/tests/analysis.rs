use nlgames::analysis::{
    census_records, estimate_linear_proportion_n, grid_seed_for, score_matrix, ClassKind,
};
use nlgames::{
    classify, estimate_linear_proportion, explore, make_grid, random_rank_matrix, run,
    ExploreConfig, Init, RankMatrix, Topology, TopologyKind, UpdateRule,
};

fn first_example() -> RankMatrix {
    RankMatrix::new(
        TopologyKind::Moore8,
        &[12, 8, 16, 14, 9, 3, 6, 1, 10],
        &[2, 11, 18, 17, 5, 13, 4, 15, 7],
    )
    .unwrap()
}

fn pd() -> RankMatrix {
    RankMatrix::new(
        TopologyKind::Moore8,
        &[13, 11, 10, 8, 7, 5, 4, 2, 1],
        &[18, 17, 16, 15, 14, 12, 9, 6, 3],
    )
    .unwrap()
}

#[test]
fn classification_agrees_with_resimulation() {
    let t = Topology::moore8();
    let mut periodic_seen = 0;
    for seed in 0..30 {
        let rm = random_rank_matrix(&t, seed);
        let g = make_grid(12, 12, &Init::Bernoulli(0.5), seed, &t).unwrap();
        let class = classify(&g, &rm, &t, UpdateRule::default(), 120).unwrap();
        let (transient, period) = match class.kind {
            ClassKind::FixedPoint { transient } => (transient, 1),
            ClassKind::Periodic { period, transient } => {
                periodic_seen += 1;
                (transient, period)
            }
            ClassKind::Undetermined { .. } => continue,
        };
        let at = run(&g, &rm, &t, UpdateRule::default(), transient, |_, _, _| {}).unwrap();
        let later = run(
            &at.final_grid,
            &rm,
            &t,
            UpdateRule::default(),
            period,
            |_, _, _| {},
        )
        .unwrap();
        assert_eq!(at.final_grid, later.final_grid);
        // No earlier repeat: the states before the transient are all distinct
        // from the one `period` steps on.
        let full = run(
            &g,
            &rm,
            &t,
            UpdateRule::default(),
            transient + period,
            |_, _, _| {},
        )
        .unwrap();
        let digests: Vec<_> = full.frame_digests().collect();
        for i in 0..transient + period {
            for j in i + 1..transient + period {
                assert_ne!(digests[i], digests[j], "earlier repeat at {i},{j}");
            }
        }
        assert_eq!(class.density.len(), 121);
        assert_eq!(class.activity.len(), 120);
    }
    assert!(periodic_seen > 0);
}

#[test]
fn census_is_reproducible() {
    let a = estimate_linear_proportion(&Topology::von_neumann4(), 300, 9).unwrap();
    let b = estimate_linear_proportion(&Topology::von_neumann4(), 300, 9).unwrap();
    assert_eq!(a.proportion.to_bits(), b.proportion.to_bits());
    assert_eq!(a.half_width.to_bits(), b.half_width.to_bits());
    let records = census_records(4, 50, 9);
    let again = census_records(4, 50, 9);
    let lines: Vec<_> = records.iter().map(|r| r.to_record()).collect();
    let lines2: Vec<_> = again.iter().map(|r| r.to_record()).collect();
    assert_eq!(lines, lines2);
    assert!(lines
        .iter()
        .enumerate()
        .all(|(i, l)| l.starts_with(&format!("index={i}\t"))));
}

#[test]
fn single_neighbor_proportion_is_one() {
    let c = estimate_linear_proportion_n(1, 500, 3).unwrap();
    assert_eq!(c.proportion, 1.0);
    assert_eq!(c.solver_failures, 0);
}

#[test]
fn two_neighbor_proportion_brackets_exact_fraction() {
    // 72 of 720 matrices are realizable for N = 2.
    let c = estimate_linear_proportion_n(2, 4000, 17).unwrap();
    assert!((c.proportion - 0.1).abs() <= c.half_width, "{c:?}");
    assert_eq!(c.non_monotone_realizable, 0);
}

fn small_config(budget: usize, seed: u64) -> ExploreConfig {
    ExploreConfig {
        rows: 24,
        cols: 24,
        horizon: 60,
        ..ExploreConfig::new(Topology::moore8(), budget, seed)
    }
}

#[test]
fn exploring_one_matrix_returns_the_seed_matrix() {
    let hits = explore(&small_config(1, 99)).unwrap();
    assert_eq!(hits.len(), 1);
    assert_eq!(hits[0].matrix, random_rank_matrix(&Topology::moore8(), 99));
    assert_eq!(hits[0].grid_seed, grid_seed_for(99));
}

#[test]
fn exploration_is_deterministic_and_sorted() {
    let a = explore(&small_config(24, 5)).unwrap();
    let b = explore(&small_config(24, 5)).unwrap();
    let la: Vec<_> = a.iter().map(|h| h.to_record()).collect();
    let lb: Vec<_> = b.iter().map(|h| h.to_record()).collect();
    assert_eq!(la, lb);
    assert!(a
        .windows(2)
        .all(|w| w[0].interest.score >= w[1].interest.score));
    let mut indices: Vec<_> = a.iter().map(|h| h.index).collect();
    indices.sort();
    assert_eq!(indices, (0..24).collect::<Vec<_>>());
}

#[test]
fn quick_extinction_scores_below_persistent_activity() {
    let config = ExploreConfig::new(Topology::moore8(), 1, 7);
    let dead = score_matrix(&config, 0, 7, pd()).unwrap();
    assert!(dead.classification.first_uniform.unwrap() <= 3);
    let hex = Topology::hex6();
    let hex_config = ExploreConfig::new(hex, 1, 7);
    let alive = score_matrix(
        &hex_config,
        0,
        7,
        RankMatrix::new(
            TopologyKind::Hex6,
            &[4, 13, 1, 5, 10, 2, 7],
            &[9, 14, 12, 11, 6, 8, 3],
        )
        .unwrap(),
    )
    .unwrap();
    assert_eq!(
        alive.classification.kind,
        ClassKind::Undetermined { horizon: 200 }
    );
    assert!(dead.interest.score <= 3.0);
    assert!(alive.interest.score > dead.interest.score);
    assert!(alive.interest.score >= 200.0);
}

#[test]
fn first_example_matrix_stays_active() {
    let config = ExploreConfig::new(Topology::moore8(), 1, 7);
    let hit = score_matrix(&config, 0, 7, first_example()).unwrap();
    assert!(hit.classification.first_uniform.is_none());
    assert!(!matches!(
        hit.classification.kind,
        ClassKind::FixedPoint { .. }
    ));
    assert_eq!(
        hit.classification.kind,
        ClassKind::Periodic {
            period: 8,
            transient: 22
        }
    );
    assert_eq!(format!("{:.6}", hit.interest.score), "30.477600");
}
