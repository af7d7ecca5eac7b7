//! Geometry of stable sets: clusters, chain-convexity, exterior boundaries,
//! fortresses and enclosing chain polygons.

mod boundary;
mod convex;
mod fortress;
mod gons;
mod hole;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::dynamics::Configuration;
use crate::graph::AdjacencyGraph;
use crate::multigrid::DirectionBasis;

pub use boundary::{boundary_decomposition, exterior_boundary, ClusterReport};
pub use convex::{check_chain_convex, ConvexVerdict, DEFAULT_MARGIN};
pub use fortress::{fortress_search, is_fortress, FortressReport};
pub use gons::{
    brute_force_enclosing_gons, enclosing_gons, enumerate_enclosing_gons, gon_defects, ChainGon, GonCounts,
    GonDefect, LengthCount,
};
pub use hole::{classify_hole_grid_cluster, HoleClass};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Connectivity {
    #[default]
    Edge,
    Vertex,
}

/// Connected components of infected tiles, each sorted, ordered by smallest tile.
pub fn clusters(graph: &AdjacencyGraph, config: &Configuration, connectivity: Connectivity) -> Vec<Vec<u32>> {
    let n = graph.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n as u32 {
        if seen[s as usize] || !config.is_infected(s) {
            continue;
        }
        seen[s as usize] = true;
        queue.push_back(s);
        let mut comp = Vec::new();
        while let Some(u) = queue.pop_front() {
            comp.push(u);
            let next: Vec<u32> = match connectivity {
                Connectivity::Edge => graph.neighbours(u).iter().map(|nb| nb.tile).collect(),
                Connectivity::Vertex => graph.tile_vertex_neighbours(u),
            };
            for v in next {
                if !seen[v as usize] && config.is_infected(v) {
                    seen[v as usize] = true;
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// `(pi D^2 / A) n^(2d + 2)` with `D` the largest rhombus diameter and `A` the
/// smallest rhombus area over all pairs of directions.
pub fn q_bound(basis: &DirectionBasis, n: u32) -> f64 {
    let d = basis.n();
    let (mut diam, mut area) = (0.0f64, f64::INFINITY);
    for i in 0..d {
        for j in i + 1..d {
            let s = basis.dir(i).cross(basis.dir(j)).abs();
            let c = basis.dir(i).dot(basis.dir(j)).abs();
            // acute angle alpha: long diagonal 2 cos(alpha / 2) = sqrt(2 + 2 cos alpha)
            diam = diam.max((2.0 + 2.0 * c).sqrt());
            area = area.min(s);
        }
    }
    std::f64::consts::PI * diam * diam / area * (n as f64).powi(2 * d as i32 + 2)
}
