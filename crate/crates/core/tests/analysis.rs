mod common;

use common::*;
use quasiperc::analysis::*;
use quasiperc::dynamics::{fixpoint, Configuration, RuleSpec};
use quasiperc::graph::AdjacencyGraph;
use quasiperc::multigrid::{cube_tiles, grid_with_hole, DirectionBasis};
use quasiperc::percolation::{sample, MeasureSpec};
use quasiperc::percolation::rng::TileStream;

fn stable_limits(g: &AdjacencyGraph, p: f64, trials: u64, seed: u64) -> Vec<Configuration> {
    (0..trials)
        .map(|i| {
            let c = sample(&MeasureSpec::Bernoulli { p }, g, &mut TileStream::new(seed, i, 0));
            fixpoint(g, &c, &RuleSpec::new(2)).unwrap().0
        })
        .collect()
}

#[test]
fn stable_clusters_are_chain_convex() {
    let g = rhombus(&DirectionBasis::penrose(), 14.0);
    let d = g.family_count();
    let (mut yes, mut interior) = (0, 0);
    for limit in stable_limits(&g, 0.04, 20, 8) {
        for conn in [Connectivity::Vertex, Connectivity::Edge] {
            for cl in clusters(&g, &limit, conn) {
                let r = boundary_decomposition(&g, &cl).unwrap();
                let verdict = r.chain_convex.clone().unwrap();
                assert!(!verdict.is_no(), "{verdict:?}");
                if r.touches_boundary {
                    continue;
                }
                interior += 1;
                yes += (verdict == ConvexVerdict::Yes) as usize;
                assert!(r.boundary_segments.unwrap() <= 2 * d);
                // the wall around a stable cluster is healthy
                if conn == Connectivity::Vertex {
                    assert!(r.boundary.iter().all(|&t| !limit.is_infected(t)));
                }
                assert!(r.enclosing_gon.is_some());
            }
        }
    }
    assert!(yes > 100 && interior > 100, "yes={yes} interior={interior}");
}

#[test]
fn clusters_partition_infected_tiles() {
    let g = rhombus(&DirectionBasis::penrose(), 8.0);
    let c = sample(&MeasureSpec::Bernoulli { p: 0.3 }, &g, &mut TileStream::new(1, 0, 0));
    for conn in [Connectivity::Edge, Connectivity::Vertex] {
        let mut all: Vec<u32> = clusters(&g, &c, conn).concat();
        all.sort_unstable();
        assert_eq!(all, c.infected());
    }
    assert!(clusters(&g, &Configuration::zeros(g.len()), Connectivity::Vertex).is_empty());
}

#[test]
fn no_fortress_on_rhombus_patches() {
    for (name, g) in rhombus_corpus().into_iter().filter(|(n, _)| *n != "band") {
        let seeds = g.ball(g.central_tile(), 2);
        let r = fortress_search(&g, &seeds, 6, &RuleSpec::new(2)).unwrap();
        assert!(r.fortresses.is_empty(), "{name}: {:?}", r.fortresses);
    }
}

#[test]
fn band_cube_is_the_fortress() {
    let g = band(18.0);
    let mut cube = cube_tiles(patch(&g));
    cube.sort_unstable();
    assert!(is_fortress(&g, &cube, &RuleSpec::f3()).unwrap());
    assert!(!is_fortress(&g, &cube, &RuleSpec::new(2)).unwrap());
    let r = fortress_search(&g, &cube, 6, &RuleSpec::f3()).unwrap();
    assert!(r.fortresses.contains(&cube));
    assert!(r.fortresses.iter().all(|f| cube.iter().all(|t| f.contains(t))));
}

/// With everything else infected, the cube falls exactly when one of its tiles
/// starts infected.
#[test]
fn disarmed_cube_is_invaded() {
    let g = band(14.0);
    let cube = cube_tiles(patch(&g));
    for mask in 0u32..8 {
        let mut c = Configuration::ones(g.len());
        for (k, &t) in cube.iter().enumerate() {
            c.state[t as usize] = (mask >> k & 1) as u8;
        }
        let (limit, _) = fixpoint(&g, &c, &RuleSpec::f3()).unwrap();
        let all = cube.iter().all(|&t| limit.is_infected(t));
        assert_eq!(all, mask != 0, "mask {mask:03b}");
        if mask == 0 {
            assert!(cube.iter().all(|&t| !limit.is_infected(t)));
        }
    }
}

#[test]
fn gon_counts_respect_bound() {
    for (basis, radius, n_max) in [(DirectionBasis::penrose(), 16.0, 11), (DirectionBasis::square(), 14.0, 12)] {
        let g = rhombus(&basis, radius);
        let t = g.central_tile();
        let counts = enumerate_enclosing_gons(&g, t, n_max).unwrap();
        for c in &counts.per_length {
            assert!(c.convex <= c.within_2d && c.within_2d <= c.all);
            assert!((c.convex as f64) <= q_bound(&basis, c.n as u32));
        }
        assert!(counts.per_length.iter().any(|c| c.convex > 0));
    }
    let b = DirectionBasis::penrose();
    assert!((1..30).all(|n| q_bound(&b, n + 1) > q_bound(&b, n)));
}

#[test]
fn enumeration_agrees_with_brute_force_on_four_directions() {
    let g = rhombus(&DirectionBasis::ammann_beenker(), 12.0);
    let t = g.central_tile();
    assert_eq!(enumerate_enclosing_gons(&g, t, 8).unwrap(), brute_force_enclosing_gons(&g, t, 8).unwrap());
}

#[test]
fn hole_grid_stable_clusters_are_rectangles_or_l_hexagons() {
    let g = grid_with_hole(14).unwrap();
    let (mut rect, mut hex) = (0, 0);
    for p in [0.03, 0.06] {
        for limit in stable_limits(&g, p, 200, 4) {
            for cl in clusters(&g, &limit, Connectivity::Vertex) {
                match classify_hole_grid_cluster(&g, &cl).unwrap() {
                    HoleClass::Rectangle => rect += 1,
                    HoleClass::LHexagon => hex += 1,
                    HoleClass::Boundary => {}
                    HoleClass::Other => panic!(
                        "cluster {:?} is neither a rectangle nor an L-hexagon",
                        cl.iter().map(|&t| g.cell(t).unwrap()).collect::<Vec<_>>()
                    ),
                }
            }
        }
    }
    assert!(rect > 100, "rect={rect}");
    assert!(hex > 0, "hex={hex}");
}

#[test]
fn three_axis_neighbours_fill_the_hole() {
    let g = grid_with_hole(8).unwrap();
    let mut c = Configuration::zeros(g.len());
    for cell in [(-1, 0), (1, 0), (0, 1)] {
        c.state[g.tile_at_cell(cell).unwrap() as usize] = 1;
    }
    let (limit, _) = fixpoint(&g, &c, &RuleSpec::new(2)).unwrap();
    let cl = clusters(&g, &limit, Connectivity::Vertex);
    assert_eq!(cl.len(), 1);
    assert_eq!(classify_hole_grid_cluster(&g, &cl[0]).unwrap(), HoleClass::Rectangle);
}
