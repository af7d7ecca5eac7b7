//! Square-grid graphs with a modified origin: the five-node fortress and the
//! single hole. Labels are synthetic: east `(0,+)`, west `(0,-)`, north
//! `(1,+)`, south `(1,-)`; arcs between the centre square and a trapezoid use
//! family 2 (outwards `+`), arcs around the trapezoid ring use family 3
//! (clockwise `+`).

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::graph::{AdjacencyGraph, FaceSpec, GraphKind, Label};

const SOUTH: Label = Label::new(1, -1);
const EAST: Label = Label::new(0, 1);
const NORTH: Label = Label::new(1, 1);
const WEST: Label = Label::new(0, -1);

/// Node ids of the fortress: centre square and the four trapezoids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FortressNodes {
    pub center: u32,
    pub north: u32,
    pub east: u32,
    pub south: u32,
    pub west: u32,
}

impl FortressNodes {
    pub fn all(&self) -> [u32; 5] {
        [self.center, self.north, self.east, self.south, self.west]
    }
}

/// Vertex registry on a lattice of tenths.
#[derive(Default)]
struct Vertices {
    ids: HashMap<(i32, i32), u32>,
    pos: Vec<Vec2>,
}

impl Vertices {
    fn id(&mut self, x: i32, y: i32) -> u32 {
        let pos = &mut self.pos;
        *self.ids.entry((x, y)).or_insert_with(|| {
            pos.push(Vec2::new(x as f64 / 10.0, y as f64 / 10.0));
            (pos.len() - 1) as u32
        })
    }
}

fn grid_faces(h: i32, verts: &mut Vertices) -> Vec<FaceSpec> {
    let inside = |x: i32, y: i32| x.abs() <= h && y.abs() <= h;
    let mut faces = Vec::new();
    for y in -h..=h {
        for x in -h..=h {
            if (x, y) == (0, 0) {
                continue;
            }
            let (cx, cy) = (10 * x, 10 * y);
            let corners = [
                verts.id(cx - 5, cy - 5),
                verts.id(cx + 5, cy - 5),
                verts.id(cx + 5, cy + 5),
                verts.id(cx - 5, cy + 5),
            ];
            let across = [(x, y - 1), (x + 1, y), (x, y + 1), (x - 1, y)];
            // the origin is a real hole, not the edge of the window
            let missing = across.map(|(a, b)| (a, b) != (0, 0) && !inside(a, b));
            faces.push(FaceSpec {
                corners,
                labels: [SOUTH, EAST, NORTH, WEST],
                missing,
                center: Vec2::new(x as f64, y as f64),
                cell: Some((x, y)),
            });
        }
    }
    faces
}

/// Square grid `[-h, h]^2` whose origin cell is cut into a small centre square
/// and four trapezoids. Every trapezoid touches the centre, its two ring
/// neighbours and one grid cell.
pub fn generate_fortress_grid(half_size: i32) -> Result<(AdjacencyGraph, FortressNodes)> {
    if half_size < 2 {
        return Err(Error::InvalidInput(format!("half_size must be at least 2, got {half_size}")));
    }
    let mut verts = Vertices::default();
    let mut faces = grid_faces(half_size, &mut verts);
    let base = faces.len() as u32;

    let c = [verts.id(-2, -2), verts.id(2, -2), verts.id(2, 2), verts.id(-2, 2)];
    let o = [verts.id(-5, -5), verts.id(5, -5), verts.id(5, 5), verts.id(-5, 5)];
    let out = Label::new(2, 1);
    let cw = Label::new(3, 1);
    faces.push(FaceSpec {
        corners: c,
        labels: [out; 4],
        missing: [false; 4],
        center: Vec2::ZERO,
        cell: None,
    });
    // Sides: grid cell, counter-clockwise ring neighbour, inner edge, clockwise ring neighbour.
    let trapezoid = |k: usize, grid: Label, at: Vec2| FaceSpec {
        corners: [o[k], o[(k + 1) % 4], c[(k + 1) % 4], c[k]],
        labels: [grid, cw.reversed(), out.reversed(), cw],
        missing: [false; 4],
        center: at,
        cell: None,
    };
    // k indexes the inner edge: 0 south, 1 east, 2 north, 3 west.
    let centre_of = |k: usize| {
        let d = [Vec2::new(0.0, -1.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(-1.0, 0.0)];
        d[k] * 0.35
    };
    faces.push(trapezoid(2, NORTH, centre_of(2)));
    faces.push(trapezoid(1, EAST, centre_of(1)));
    faces.push(trapezoid(0, SOUTH, centre_of(0)));
    faces.push(trapezoid(3, WEST, centre_of(3)));

    let nodes = FortressNodes {
        center: base,
        north: base + 1,
        east: base + 2,
        south: base + 3,
        west: base + 4,
    };
    let graph = AdjacencyGraph::from_faces(
        GraphKind::FortressGrid { half_size },
        4,
        verts.pos,
        faces,
        Some(nodes.center),
        None,
    )?;
    Ok((graph, nodes))
}

/// Square grid `[-h, h]^2` without its origin cell.
pub fn grid_with_hole(half_size: i32) -> Result<AdjacencyGraph> {
    if half_size < 1 {
        return Err(Error::InvalidInput(format!("half_size must be at least 1, got {half_size}")));
    }
    let mut verts = Vertices::default();
    let faces = grid_faces(half_size, &mut verts);
    AdjacencyGraph::from_faces(
        GraphKind::GridWithHole { half_size },
        2,
        verts.pos,
        faces,
        None,
        None,
    )
}
