use polypart::cells::{sign_vector, CellCounter, CellSign};
use polypart::equivariant::{continuation_zero, random_equivariant, residual, ContinuationConfig};
use polypart::solver::{objective_discrete, partition_points, partition_varieties, ObjectiveKind, SolveConfig};
use polypart::spectrum::wht;
use polypart::{Embedding, VarietyKind, VarietySpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lines(count: usize, seed: u64) -> Vec<VarietySpec> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let point = vec![r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)];
            let phi: f64 = r.random_range(0.0..std::f64::consts::PI);
            VarietySpec::build(2, VarietyKind::Line { point, dir: vec![phi.cos(), phi.sin()] }).unwrap()
        })
        .collect()
}

#[test]
fn line_report_is_self_consistent() {
    let gammas = lines(40, 5);
    let mut cfg = SolveConfig::new(2, 3, 17);
    cfg.restarts = 3;
    let rep = partition_varieties(&gammas, &cfg).unwrap();
    let emb = Embedding::with_indices(2, 3, rep.indices.clone()).unwrap();
    let polys = emb.to_polys(&rep.point).unwrap();
    let counter = CellCounter::new(&gammas, emb.bases(), &rep.sampling).unwrap();
    assert_eq!(counter.counts_for(&polys).unwrap(), rep.counts);
    assert_eq!(wht(&rep.counts), rep.spectrum);
    let direct = objective_discrete(&gammas, &rep.point, &emb, &rep.sampling).unwrap();
    assert_eq!(direct, rep.objective);
    assert_eq!(rep.max_count, rep.counts.max());
    let expected_ratio = rep.max_count as f64 * rep.total_degree as f64 / 40.0;
    assert!((rep.bound_ratio - expected_ratio).abs() < 1e-12);
    assert!(rep.best_restart < 3);
    assert!(!rep.trace.is_empty());
}

#[test]
fn smooth_objective_runs_and_reports_discrete_counts() {
    let gammas = lines(12, 8);
    let mut cfg = SolveConfig::new(2, 2, 4);
    cfg.restarts = 2;
    cfg.objective = Some(ObjectiveKind::Smooth);
    cfg.mc_count = 64;
    cfg.deltas = vec![0.25, 0.125];
    cfg.steps.levels = 2;
    cfg.steps.iters = 5;
    let rep = partition_varieties(&gammas, &cfg).unwrap();
    assert_eq!(rep.objective_kind, ObjectiveKind::Smooth);
    assert!(rep.trace.iter().any(|t| t.delta.is_some()));
    assert_eq!(wht(&rep.counts).nonzero_energy(), rep.objective);
}

#[test]
fn point_report_matches_direct_signs() {
    let mut r = ChaCha8Rng::seed_from_u64(12);
    let points: Vec<Vec<f64>> = (0..300).map(|_| vec![r.random(), r.random()]).collect();
    let rep = partition_points(&points, &SolveConfig::new(2, 4, 12)).unwrap();
    let polys = Embedding::with_indices(2, 4, rep.indices.clone()).unwrap().to_polys(&rep.point).unwrap();
    let mut counts = [0u64; 16];
    let mut boundary = 0;
    for p in &points {
        match sign_vector(&polys, p, rep.sampling.tau).unwrap() {
            CellSign::Cell(w) => counts[w.index()] += 1,
            CellSign::Boundary => boundary += 1,
        }
    }
    assert_eq!(rep.counts.as_slice(), counts);
    assert_eq!(rep.counts.total() + boundary, 300);
    assert_eq!(rep.bisection.len(), 4);
    assert!(rep.max_count <= 4 * 300 / 16);
}

#[test]
fn continuation_lands_on_a_zero_of_the_target() {
    let f = random_equivariant(3, 0.2, 31).unwrap();
    let rep = continuation_zero(&f, &ContinuationConfig::default()).unwrap();
    assert!(residual(&f, &rep.zero) < 1e-8);
    assert_eq!(rep.orbit_residuals.len(), 8);
    for mask in 0..8u32 {
        assert!(residual(&f, &rep.zero.flip_mask(mask)) < 1e-8);
    }
}
