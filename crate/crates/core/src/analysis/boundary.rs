use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::convex::{check_chain_convex, ConvexVerdict, DEFAULT_MARGIN};
use super::gons::{gon_defects, segment_runs, ChainGon};
use crate::error::{Error, Result};
use crate::geom::{ccw_angle, signed_area};
use crate::graph::AdjacencyGraph;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterReport {
    pub tiles: Vec<u32>,
    pub touches_boundary: bool,
    /// Absent for graphs without chains.
    pub chain_convex: Option<ConvexVerdict>,
    /// Exterior tiles in counter-clockwise order around the set.
    pub boundary: Vec<u32>,
    /// Runs of equal shared-edge family around `boundary`.
    pub boundary_segments: Option<usize>,
    pub enclosing_gon: Option<ChainGon>,
}

/// Tiles touching `set` (and not in it), ordered counter-clockwise along the
/// outer outline of `set`. `None` when the set or its neighbourhood reaches
/// the patch boundary.
pub fn exterior_boundary(graph: &AdjacencyGraph, set: &[u32]) -> Result<Option<Vec<u32>>> {
    if set.is_empty() {
        return Err(Error::InvalidInput("empty tile set".into()));
    }
    let vn = graph.vertex_neighbours(set);
    if set.iter().chain(&vn).any(|&t| !graph.is_interior(t)) {
        return Ok(None);
    }
    let in_s: HashSet<u32> = set.iter().copied().collect();

    // Outline edges with the set on their left.
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for &t in set {
        let c = graph.corners(t);
        for k in 0..4 {
            match graph.side(t, k).0 {
                Some(u) if in_s.contains(&u) => {}
                _ => edges.push((c[k], c[(k + 1) % 4])),
            }
        }
    }
    edges.sort_unstable();
    let mut out_of: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        out_of.entry(e.0).or_default().push(i);
    }
    let pos = |v: u32| graph.vertex_position(v);

    let mut used = vec![false; edges.len()];
    let mut best: Option<(f64, Vec<u32>)> = None;
    for first in 0..edges.len() {
        if used[first] {
            continue;
        }
        let mut walk = Vec::new();
        let mut cur = first;
        loop {
            used[cur] = true;
            let (u, v) = edges[cur];
            walk.push(u);
            let back = pos(u) - pos(v);
            let next = out_of[&v]
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    let da = ccw_angle(back, pos(edges[a].1) - pos(v));
                    let db = ccw_angle(back, pos(edges[b].1) - pos(v));
                    da.total_cmp(&db)
                })
                .expect("outline is closed");
            if next == first {
                break;
            }
            if used[next] {
                // pinch structure visited from another loop; abandon this walk
                walk.clear();
                break;
            }
            cur = next;
        }
        if walk.len() < 3 {
            continue;
        }
        let area = signed_area(&walk.iter().map(|&v| pos(v)).collect::<Vec<_>>());
        if area > 0.0 && best.as_ref().is_none_or(|b| area > b.0) {
            best = Some((area, walk));
        }
    }
    let Some((_, outline)) = best else {
        return Ok(None);
    };

    let m = outline.len();
    let mut tiles: Vec<u32> = Vec::new();
    for k in 0..m {
        let (u, v, w) = (outline[(k + m - 1) % m], outline[k], outline[(k + 1) % m]);
        let back = pos(u) - pos(v);
        let span = ccw_angle(back, pos(w) - pos(v));
        let mut around: Vec<(f64, u32)> = graph
            .vertex_tiles(v)
            .iter()
            .filter(|x| !in_s.contains(x))
            .filter_map(|&x| {
                let c = graph.corners(x);
                let k = c.iter().position(|&y| y == v)?;
                let start = ccw_angle(back, pos(c[(k + 1) % 4]) - pos(v));
                (start < span - 1e-9).then_some((start, x))
            })
            .collect();
        around.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (_, x) in around {
            if tiles.last() != Some(&x) {
                tiles.push(x);
            }
        }
    }
    while tiles.len() > 1 && tiles.first() == tiles.last() {
        tiles.pop();
    }
    Ok(Some(tiles))
}

/// Exterior boundary of a finite set, its chain segments and (for rhombus
/// graphs) the chain-convexity verdict.
pub fn boundary_decomposition(graph: &AdjacencyGraph, set: &[u32]) -> Result<ClusterReport> {
    let mut tiles = set.to_vec();
    tiles.sort_unstable();
    let chain_convex = if graph.is_rhombus() {
        Some(check_chain_convex(graph, &tiles, DEFAULT_MARGIN)?)
    } else {
        None
    };
    let boundary = exterior_boundary(graph, &tiles)?;
    let touches_boundary = boundary.is_none();
    let boundary = boundary.unwrap_or_default();
    let boundary_segments = segment_runs(graph, &boundary).map(|r| r.len());
    let enclosing_gon = if !boundary.is_empty() && gon_defects(graph, &boundary).is_empty() {
        Some(ChainGon::new(graph, boundary.clone())?)
    } else {
        None
    };
    Ok(ClusterReport { tiles, touches_boundary, chain_convex, boundary, boundary_segments, enclosing_gon })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_adjacency;
    use crate::multigrid::{generate_patch, DirectionBasis};
    use std::sync::Arc;

    fn at(g: &AdjacencyGraph, x: i32, y: i32) -> u32 {
        let c = g.center(g.central_tile());
        (0..g.len() as u32)
            .find(|&t| {
                let d = g.center(t) - c;
                (d.x - x as f64).abs() < 1e-9 && (d.y - y as f64).abs() < 1e-9
            })
            .unwrap()
    }

    #[test]
    fn rectangle_has_four_sides() {
        let g = build_adjacency(Arc::new(generate_patch(&DirectionBasis::square(), 9.0).unwrap())).unwrap();
        let s: Vec<u32> = (0..3).flat_map(|x| (0..2).map(move |y| (x, y))).map(|(x, y)| at(&g, x, y)).collect();
        let r = boundary_decomposition(&g, &s).unwrap();
        assert!(!r.touches_boundary);
        assert_eq!(r.boundary.len(), 2 * 5 + 2 * 2);
        assert_eq!(r.boundary_segments, Some(4));
        assert_eq!(r.chain_convex, Some(ConvexVerdict::Yes));
        let gon = r.enclosing_gon.unwrap();
        assert!(gon.convex);
        let mut b = r.boundary.clone();
        b.sort_unstable();
        assert_eq!(b, g.vertex_neighbours(&s));
    }

    #[test]
    fn penrose_single_tile() {
        let g = build_adjacency(Arc::new(generate_patch(&DirectionBasis::penrose(), 10.0).unwrap())).unwrap();
        let mut checked = 0;
        for t in (0..g.len() as u32).step_by(5) {
            let r = boundary_decomposition(&g, &[t]).unwrap();
            if r.touches_boundary {
                continue;
            }
            let mut b = r.boundary.clone();
            b.sort_unstable();
            assert_eq!(b, g.vertex_neighbours(&[t]));
            assert!(r.boundary_segments.unwrap() <= 10);
            assert!(r.enclosing_gon.is_some());
            checked += 1;
        }
        assert!(checked > 20);
    }

    #[test]
    fn diagonal_pinch_is_traced_once() {
        let g = build_adjacency(Arc::new(generate_patch(&DirectionBasis::square(), 9.0).unwrap())).unwrap();
        let s = vec![at(&g, 0, 0), at(&g, 1, 1)];
        let b = exterior_boundary(&g, &s).unwrap().unwrap();
        let mut sorted = b.clone();
        sorted.sort_unstable();
        let mut want = g.vertex_neighbours(&s);
        want.sort_unstable();
        assert_eq!(sorted, want);
    }
}
