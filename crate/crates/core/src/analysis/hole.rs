use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{AdjacencyGraph, GraphKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HoleClass {
    Rectangle,
    LHexagon,
    /// The cluster or its neighbourhood reaches the window edge.
    Boundary,
    Other,
}

const AXIS: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

type Cell = (i32, i32);

fn bbox(cells: &HashSet<Cell>) -> (i32, i32, i32, i32) {
    let x0 = cells.iter().map(|c| c.0).min().unwrap();
    let x1 = cells.iter().map(|c| c.0).max().unwrap();
    let y0 = cells.iter().map(|c| c.1).min().unwrap();
    let y1 = cells.iter().map(|c| c.1).max().unwrap();
    (x0, x1, y0, y1)
}

fn is_rectangle(cells: &HashSet<Cell>) -> bool {
    if cells.is_empty() {
        return false;
    }
    let (x0, x1, y0, y1) = bbox(cells);
    ((x1 - x0 + 1) * (y1 - y0 + 1)) as usize == cells.len()
}

/// Shape of a finite stable cluster of the grid with a hole at the origin.
///
/// With three or four axis neighbours of the hole in the cluster the hole is
/// filled in first. With exactly two, the parts of the cluster in the two
/// half-planes holding them must be rectangles covering the cluster. The
/// completed cluster is then classified as a rectangle, an L-shaped hexagon
/// (its bounding box minus a rectangle at one corner) or neither.
pub fn classify_hole_grid_cluster(graph: &AdjacencyGraph, set: &[u32]) -> Result<HoleClass> {
    if !matches!(graph.kind(), GraphKind::GridWithHole { .. }) {
        return Err(Error::InvalidInput("expected a grid with a hole".into()));
    }
    if set.is_empty() {
        return Err(Error::InvalidInput("empty tile set".into()));
    }
    if set.iter().chain(&graph.vertex_neighbours(set)).any(|&t| !graph.is_interior(t)) {
        return Ok(HoleClass::Boundary);
    }
    let mut cells: HashSet<Cell> = set.iter().map(|&t| graph.cell(t).expect("grid cell")).collect();
    let axis: Vec<Cell> = AXIS.iter().copied().filter(|c| cells.contains(c)).collect();

    if axis.len() >= 3 {
        cells.insert((0, 0));
    } else if axis.len() == 2 {
        let half = |c: Cell| -> Box<dyn Fn(&Cell) -> bool> {
            match c {
                (1, 0) => Box::new(|p: &Cell| p.0 > 0),
                (-1, 0) => Box::new(|p: &Cell| p.0 < 0),
                (0, 1) => Box::new(|p: &Cell| p.1 > 0),
                _ => Box::new(|p: &Cell| p.1 < 0),
            }
        };
        let (h1, h2) = (half(axis[0]), half(axis[1]));
        let p1: HashSet<Cell> = cells.iter().copied().filter(|c| h1(c)).collect();
        let p2: HashSet<Cell> = cells.iter().copied().filter(|c| h2(c)).collect();
        if p1.union(&p2).count() != cells.len() || !is_rectangle(&p1) || !is_rectangle(&p2) {
            return Ok(HoleClass::Other);
        }
    }

    if is_rectangle(&cells) {
        return Ok(HoleClass::Rectangle);
    }
    let (x0, x1, y0, y1) = bbox(&cells);
    let gap: HashSet<Cell> = (x0..=x1)
        .flat_map(|x| (y0..=y1).map(move |y| (x, y)))
        .filter(|c| !cells.contains(c))
        .collect();
    let corner = [(x0, y0), (x0, y1), (x1, y0), (x1, y1)].iter().any(|c| gap.contains(c));
    Ok(if is_rectangle(&gap) && corner { HoleClass::LHexagon } else { HoleClass::Other })
}
