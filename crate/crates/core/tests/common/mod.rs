#![allow(dead_code)]

use std::sync::Arc;

use quasiperc::graph::{build_adjacency, AdjacencyGraph};
use quasiperc::multigrid::{generate_band_tiling, generate_patch, BandSpec, DirectionBasis, TilingPatch};

pub fn rhombus(basis: &DirectionBasis, radius: f64) -> AdjacencyGraph {
    build_adjacency(Arc::new(generate_patch(basis, radius).unwrap())).unwrap()
}

pub fn band(radius: f64) -> AdjacencyGraph {
    let (b, s) = BandSpec::canonical(radius);
    build_adjacency(Arc::new(generate_band_tiling(&b, &s).unwrap())).unwrap()
}

/// Penrose with and without the integer offset sum, the square grid, four
/// and seven directions, and the band.
pub fn rhombus_corpus() -> Vec<(&'static str, AdjacencyGraph)> {
    vec![
        ("penrose", rhombus(&DirectionBasis::penrose(), 9.0)),
        ("pentagrid", rhombus(&DirectionBasis::new(5, 0.1, &[0.11, 0.23, 0.37, 0.29, 0.05]).unwrap(), 9.0)),
        ("square", rhombus(&DirectionBasis::square(), 7.0)),
        ("four", rhombus(&DirectionBasis::ammann_beenker(), 8.0)),
        ("seven", rhombus(&DirectionBasis::new(7, 0.0, &[0.1, 0.2, 0.3, 0.4, 0.15, 0.25, 0.35]).unwrap(), 6.0)),
        ("band", band(10.0)),
    ]
}

pub fn patch(g: &AdjacencyGraph) -> &TilingPatch {
    g.patch().unwrap()
}
