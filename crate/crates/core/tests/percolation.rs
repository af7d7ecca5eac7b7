mod common;

use common::*;
use quasiperc::dynamics::{BoundaryPolicy, RuleSpec};
use quasiperc::percolation::rng::TileStream;
use quasiperc::percolation::*;
use quasiperc::multigrid::DirectionBasis;

fn spec(graph: GraphSpec, rule: RuleSpec, measure: MeasureSpec, trials: u32, seed: u64, criterion: Criterion) -> ExperimentSpec {
    ExperimentSpec {
        graph,
        rule,
        measure,
        trials,
        seed,
        criterion,
        boundary: BoundaryPolicy::Open,
        record_configurations: false,
    }
}

#[test]
fn neighbourhood_max_marginal() {
    let g = rhombus(&DirectionBasis::penrose(), 6.0);
    let q = 0.1;
    let m = MeasureSpec::NeighbourhoodMax { q };
    let want = 1.0 - (1.0f64 - q).powi(5);
    let tiles: Vec<u32> = g.ball(g.central_tile(), 2).into_iter().filter(|&t| g.degree(t) == 4).take(3).collect();
    assert_eq!(tiles.len(), 3);
    let n = 100_000u64;
    for &t in &tiles {
        let hits = (0..n).filter(|&i| m.value_at(&g, &mut TileStream::new(21, i, 0), t)).count() as f64;
        let sigma = (want * (1.0 - want) / n as f64).sqrt();
        assert!((hits / n as f64 - want).abs() < 3.0 * sigma, "tile {t}: {} vs {want}", hits / n as f64);
    }
}

/// Threshold 5 on the square grid never infects anything new, so "target
/// infected" has probability exactly p.
#[test]
fn wilson_interval_calibration() {
    let g = GraphSpec::Grid { radius: 4.0 };
    let p = 0.3;
    let t = g.build().unwrap().graph.central_tile();
    let mut covered = 0;
    for seed in 0..100 {
        let s = spec(g.clone(), RuleSpec::new(5), MeasureSpec::Bernoulli { p }, 200, seed, Criterion::TargetSet { tiles: vec![t] });
        let mc = monte_carlo(&Experiment::new(s).unwrap());
        covered += mc.summary.invasion.contains(p) as u32;
    }
    assert!(covered >= 93, "covered {covered}/100");
}

#[test]
fn monte_carlo_is_reproducible_across_pools() {
    let s = spec(GraphSpec::Penrose { radius: 10.0, offsets: None }, RuleSpec::new(2), MeasureSpec::Bernoulli { p: 0.08 }, 64, 5, Criterion::default());
    let e = Experiment::new(s).unwrap();
    let run = |threads| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| monte_carlo(&e));
    assert_eq!(run(1), run(4));
}

#[test]
fn enclosure_on_square_grid() {
    let g = rhombus(&DirectionBasis::square(), 12.0);
    let t = g.central_tile();
    let r = enclosure_probability(&g, t, 8, &MeasureSpec::Bernoulli { p: 0.4 }, 40_000, 3).unwrap();
    assert_eq!(r.gons, 1);
    let exact = 0.6 + 0.4 * 0.6f64.powi(8);
    let sigma = (exact * (1.0 - exact) / 40_000.0).sqrt();
    assert!((r.enclosed.estimate - exact).abs() < 4.0 * sigma, "{:?} vs {exact}", r.enclosed);
    assert!(enclosure_probability(&g, t, 40, &MeasureSpec::Bernoulli { p: 0.4 }, 10, 3).is_err());
}

#[test]
fn neighbourhood_max_cylinders_decay() {
    let g = rhombus(&DirectionBasis::penrose(), 12.0);
    let m = MeasureSpec::NeighbourhoodMax { q: 0.2 };
    let r = zero_cylinder_decay(&g, &m, &[1, 2, 4, 6, 8], 100_000, 9).unwrap();
    assert!(r.slope.unwrap() < 0.0);
    assert!(r.chi2_p_value > 0.01, "{r:?}");
    for p in &r.points {
        // exact per-domain probabilities sit below beta^n
        assert!(p.expected <= p.bound + 1e-12);
    }
    assert!(r.points.windows(2).all(|w| w[1].frequency < w[0].frequency));
}

#[test]
fn correlations() {
    let g = rhombus(&DirectionBasis::penrose(), 8.0);
    let c = g.central_tile();
    let nb: Vec<u32> = g.neighbours(c).iter().map(|n| n.tile).collect();
    let far: Vec<u32> = g.ball(c, 6).into_iter().filter(|&t| g.distances_from(c)[t as usize] == 6).take(2).collect();
    let a = Event::AllOnes { tiles: vec![c, nb[0]] };
    let b = Event::AllOnes { tiles: vec![nb[1], nb[2]] };
    let d = Event::AtLeast { tiles: far.clone(), k: 1 };

    let bern = positive_correlation_check(&g, &MeasureSpec::Bernoulli { p: 0.3 }, &[(a.clone(), d.clone())], 200_000, 4).unwrap();
    assert!(bern[0].z.abs() < 4.0, "{:?}", bern[0]);

    let nmax = positive_correlation_check(&g, &MeasureSpec::NeighbourhoodMax { q: 0.3 }, &[(a, b)], 200_000, 4).unwrap();
    assert!(!nmax[0].significant_negative);
    assert!(nmax[0].difference > 0.0, "{:?}", nmax[0]);
}

#[test]
fn uncoupled_sweep_is_monotone_within_intervals() {
    let s = spec(GraphSpec::Penrose { radius: 9.0, offsets: None }, RuleSpec::new(2), MeasureSpec::Bernoulli { p: 0.0 }, 200, 2, Criterion::default());
    let e = Experiment::new(s).unwrap();
    let params = [0.0, 0.02, 0.04, 0.06, 0.1, 0.2, 1.0];
    let sw = sweep(&e, &params, false).unwrap();
    for w in sw.points.windows(2) {
        assert!(w[1].invasion.upper >= w[0].invasion.lower, "{w:?}");
    }
    assert_eq!(sw.points[0].invasion.estimate, 0.0);
    assert_eq!(sw.points.last().unwrap().invasion.estimate, 1.0);

    let coupled = sweep(&e, &params, true).unwrap();
    assert!(coupled.points.windows(2).all(|w| w[0].invasion.estimate <= w[1].invasion.estimate));
}

#[test]
fn band_invasion_matches_cube_hits() {
    let s = spec(GraphSpec::Band { radius: 14.0 }, RuleSpec::f3(), MeasureSpec::Bernoulli { p: 0.5 }, 300, 1, Criterion::Cube);
    let mc = monte_carlo(&Experiment::new(s).unwrap());
    assert!(mc.summary.invasion.contains(1.0 - 0.125));
    for t in &mc.trials {
        assert_eq!(t.invaded, t.watched_hit.unwrap());
    }
}
