//! Labelled adjacency graphs of quadrilateral tilings.
//!
//! Every node is a quadrilateral face with counter-clockwise corners. The arc
//! `u -> v` carries a [`Label`] `(family, sign)`: for rhombus tilings the
//! family is the direction of the shared edge and the sign is that of
//! `<barycenter(v) - barycenter(u), e_family^perp>`, with `e^perp` the +90
//! degree rotation of `e`. Hand-built quadrilateral graphs carry synthetic
//! labels.

mod chains;

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::multigrid::TilingPatch;

pub use chains::{
    all_chains, chain_through, theta_violations, verify_chain_crossing, Chain, ChainCrossingReport,
    ChainIndex, CrossingViolation, ThetaViolation,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    pub family: u8,
    pub sign: i8,
}

impl Label {
    pub const fn new(family: u8, sign: i8) -> Self {
        Self { family, sign }
    }

    pub fn reversed(self) -> Self {
        Self { family: self.family, sign: -self.sign }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Neighbour {
    pub tile: u32,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphKind {
    Rhombus,
    FortressGrid { half_size: i32 },
    GridWithHole { half_size: i32 },
}

/// One face handed to [`AdjacencyGraph::from_faces`].
#[derive(Clone, Debug)]
pub(crate) struct FaceSpec {
    pub corners: [u32; 4],
    /// Label of the arc leaving through side `k` (corner `k` to `k + 1`).
    pub labels: [Label; 4],
    /// Side `k` faces a neighbour that lies outside the generated window.
    pub missing: [bool; 4],
    pub center: Vec2,
    pub cell: Option<(i32, i32)>,
}

#[derive(Debug)]
pub struct AdjacencyGraph {
    kind: GraphKind,
    family_count: usize,
    nbr_start: Vec<u32>,
    nbrs: Vec<Neighbour>,
    missing: Vec<Vec<Label>>,
    interior: Vec<bool>,
    corners: Vec<[u32; 4]>,
    sides: Vec<[Option<u32>; 4]>,
    side_labels: Vec<[Label; 4]>,
    vertex_pos: Vec<Vec2>,
    vertex_tiles: Vec<Vec<u32>>,
    centers: Vec<Vec2>,
    cells: Vec<Option<(i32, i32)>>,
    central: u32,
    patch: Option<Arc<TilingPatch>>,
    chains: OnceLock<ChainIndex>,
}

impl AdjacencyGraph {
    pub(crate) fn from_faces(
        kind: GraphKind,
        family_count: usize,
        vertex_pos: Vec<Vec2>,
        faces: Vec<FaceSpec>,
        central: Option<u32>,
        patch: Option<Arc<TilingPatch>>,
    ) -> Result<Self> {
        let mut edge_faces: HashMap<(u32, u32), Vec<(u32, usize)>> = HashMap::new();
        let mut vertex_tiles = vec![Vec::new(); vertex_pos.len()];
        for (f, face) in faces.iter().enumerate() {
            for k in 0..4 {
                let (a, b) = (face.corners[k], face.corners[(k + 1) % 4]);
                edge_faces
                    .entry((a.min(b), a.max(b)))
                    .or_default()
                    .push((f as u32, k));
                vertex_tiles[a as usize].push(f as u32);
            }
        }
        let mut sides = vec![[None; 4]; faces.len()];
        for (edge, fs) in &edge_faces {
            match fs.as_slice() {
                [_] => {}
                [(f, k), (g, l)] => {
                    sides[*f as usize][*k] = Some(*g);
                    sides[*g as usize][*l] = Some(*f);
                }
                _ => {
                    return Err(Error::InvalidPatch(format!(
                        "edge {edge:?} is shared by {} tiles",
                        fs.len()
                    )))
                }
            }
        }

        let mut nbr_start = Vec::with_capacity(faces.len() + 1);
        let mut nbrs = Vec::with_capacity(faces.len() * 4);
        let mut missing = Vec::with_capacity(faces.len());
        let mut interior = Vec::with_capacity(faces.len());
        for (f, face) in faces.iter().enumerate() {
            nbr_start.push(nbrs.len() as u32);
            let mut miss = Vec::new();
            for k in 0..4 {
                match sides[f][k] {
                    Some(g) => nbrs.push(Neighbour { tile: g, label: face.labels[k] }),
                    None if face.missing[k] => miss.push(face.labels[k]),
                    None => {}
                }
            }
            interior.push(miss.is_empty());
            missing.push(miss);
        }
        nbr_start.push(nbrs.len() as u32);

        let centers: Vec<Vec2> = faces.iter().map(|f| f.center).collect();
        let central = central.unwrap_or_else(|| {
            (0..centers.len() as u32)
                .min_by(|&a, &b| {
                    centers[a as usize]
                        .norm()
                        .total_cmp(&centers[b as usize].norm())
                        .then(a.cmp(&b))
                })
                .unwrap_or(0)
        });
        Ok(Self {
            kind,
            family_count,
            nbr_start,
            nbrs,
            missing,
            interior,
            corners: faces.iter().map(|f| f.corners).collect(),
            sides,
            side_labels: faces.iter().map(|f| f.labels).collect(),
            vertex_pos,
            vertex_tiles,
            centers,
            cells: faces.iter().map(|f| f.cell).collect(),
            central,
            patch,
            chains: OnceLock::new(),
        })
    }

    pub fn kind(&self) -> &GraphKind {
        &self.kind
    }

    pub fn is_rhombus(&self) -> bool {
        self.kind == GraphKind::Rhombus
    }

    pub(crate) fn require_rhombus(&self) -> Result<&TilingPatch> {
        match (&self.kind, &self.patch) {
            (GraphKind::Rhombus, Some(p)) => Ok(p),
            _ => Err(Error::NotRhombus),
        }
    }

    pub fn patch(&self) -> Option<&Arc<TilingPatch>> {
        self.patch.as_ref()
    }

    /// Number of edge directions `d` (synthetic label families for generic graphs).
    pub fn family_count(&self) -> usize {
        self.family_count
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn neighbours(&self, t: u32) -> &[Neighbour] {
        let (a, b) = (self.nbr_start[t as usize], self.nbr_start[t as usize + 1]);
        &self.nbrs[a as usize..b as usize]
    }

    pub fn degree(&self, t: u32) -> usize {
        self.neighbours(t).len()
    }

    pub fn are_adjacent(&self, a: u32, b: u32) -> bool {
        self.neighbours(a).iter().any(|n| n.tile == b)
    }

    /// Label of the arc `a -> b`, if the tiles are adjacent.
    pub fn label_between(&self, a: u32, b: u32) -> Option<Label> {
        self.neighbours(a).iter().find(|n| n.tile == b).map(|n| n.label)
    }

    /// Labels of arcs that would leave the generated window.
    pub fn missing_labels(&self, t: u32) -> &[Label] {
        &self.missing[t as usize]
    }

    pub fn is_interior(&self, t: u32) -> bool {
        self.interior[t as usize]
    }

    pub fn corners(&self, t: u32) -> [u32; 4] {
        self.corners[t as usize]
    }

    pub fn corner_positions(&self, t: u32) -> [Vec2; 4] {
        self.corners[t as usize].map(|v| self.vertex_pos[v as usize])
    }

    /// Tile across side `k` of `t`, with the label of that arc.
    pub fn side(&self, t: u32, k: usize) -> (Option<u32>, Label) {
        (self.sides[t as usize][k], self.side_labels[t as usize][k])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_pos.len()
    }

    pub fn vertex_position(&self, v: u32) -> Vec2 {
        self.vertex_pos[v as usize]
    }

    pub fn vertex_tiles(&self, v: u32) -> &[u32] {
        &self.vertex_tiles[v as usize]
    }

    pub fn center(&self, t: u32) -> Vec2 {
        self.centers[t as usize]
    }

    /// Grid coordinates of a square cell, for quadrilateral grids.
    pub fn cell(&self, t: u32) -> Option<(i32, i32)> {
        self.cells[t as usize]
    }

    pub fn tile_at_cell(&self, cell: (i32, i32)) -> Option<u32> {
        self.cells.iter().position(|c| *c == Some(cell)).map(|i| i as u32)
    }

    pub fn central_tile(&self) -> u32 {
        self.central
    }

    /// Tiles sharing at least one corner with `t`, excluding `t`.
    pub fn tile_vertex_neighbours(&self, t: u32) -> Vec<u32> {
        let mut out: Vec<u32> = self.corners[t as usize]
            .iter()
            .flat_map(|&v| self.vertex_tiles[v as usize].iter().copied())
            .filter(|&u| u != t)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `{ t not in S : t shares a corner with some tile of S }`, sorted.
    pub fn vertex_neighbours(&self, set: &[u32]) -> Vec<u32> {
        let inside: HashSet<u32> = set.iter().copied().collect();
        let mut out: Vec<u32> = set
            .iter()
            .flat_map(|&t| self.corners[t as usize])
            .flat_map(|v| self.vertex_tiles[v as usize].iter().copied())
            .filter(|u| !inside.contains(u))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `{ t not in S : t shares an edge with some tile of S }`, sorted.
    pub fn edge_neighbours(&self, set: &[u32]) -> Vec<u32> {
        let inside: HashSet<u32> = set.iter().copied().collect();
        let mut out: Vec<u32> = set
            .iter()
            .flat_map(|&t| self.neighbours(t).iter().map(|n| n.tile))
            .filter(|u| !inside.contains(u))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Breadth-first graph distances from `src` (`u32::MAX` when unreachable).
    pub fn distances_from(&self, src: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        let mut queue = VecDeque::new();
        dist[src as usize] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let d = dist[u as usize];
            for n in self.neighbours(u) {
                if dist[n.tile as usize] == u32::MAX {
                    dist[n.tile as usize] = d + 1;
                    queue.push_back(n.tile);
                }
            }
        }
        dist
    }

    /// Tiles within graph distance `radius` of `src`, in id order.
    pub fn ball(&self, src: u32, radius: u32) -> Vec<u32> {
        self.distances_from(src)
            .iter()
            .enumerate()
            .filter(|(_, &d)| d <= radius)
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// Largest finite distance from `src`.
    pub fn eccentricity(&self, src: u32) -> u32 {
        self.distances_from(src)
            .into_iter()
            .filter(|&d| d != u32::MAX)
            .max()
            .unwrap_or(0)
    }

    /// Chain index, built on first use. Rhombus graphs only.
    pub fn chain_index(&self) -> Result<&ChainIndex> {
        self.require_rhombus()?;
        Ok(self.chains.get_or_init(|| ChainIndex::build(self)))
    }

    /// Arcs violating `(u -> v, f, s)` iff `(v -> u, f, -s)`.
    pub fn symmetry_violations(&self) -> Vec<(u32, u32)> {
        let mut bad = Vec::new();
        for u in 0..self.len() as u32 {
            for n in self.neighbours(u) {
                if self.label_between(n.tile, u) != Some(n.label.reversed()) {
                    bad.push((u, n.tile));
                }
            }
        }
        bad
    }
}

/// Labelled adjacency graph of a rhombus patch.
pub fn build_adjacency(patch: Arc<TilingPatch>) -> Result<AdjacencyGraph> {
    let mut seen = HashSet::new();
    for t in patch.tiles() {
        if !seen.insert((t.families, t.lines)) {
            return Err(Error::InvalidPatch(format!(
                "tile {} duplicates lines {:?} of families {:?}",
                t.id, t.lines, t.families
            )));
        }
    }
    for (edge, tiles) in patch.edges() {
        if tiles.len() > 2 {
            return Err(Error::InvalidPatch(format!(
                "edge {edge:?} is shared by {} tiles",
                tiles.len()
            )));
        }
    }

    let basis = patch.basis();
    let vertex_pos: Vec<Vec2> = (0..patch.vertex_count() as u32)
        .map(|v| patch.embed_vertex(v))
        .collect();
    let mut faces = Vec::with_capacity(patch.len());
    for t in patch.tiles() {
        let (i, j) = t.families;
        let ids = patch.tile_vertex_ids(t.id);
        let ccw = basis.dir(i).cross(basis.dir(j)) > 0.0;
        // (corner, family of the side leaving it)
        let order: [(u32, usize); 4] = if ccw {
            [(ids[0], i), (ids[1], j), (ids[2], i), (ids[3], j)]
        } else {
            [(ids[0], j), (ids[3], i), (ids[2], j), (ids[1], i)]
        };
        let mut labels = [Label::new(0, 0); 4];
        for k in 0..4 {
            let (a, f) = order[k];
            let b = order[(k + 1) % 4].0;
            let mid = (vertex_pos[a as usize] + vertex_pos[b as usize]) * 0.5;
            let s = (mid - t.barycenter).dot(basis.perp(f));
            labels[k] = Label::new(f as u8, if s > 0.0 { 1 } else { -1 });
        }
        faces.push(FaceSpec {
            corners: order.map(|(v, _)| v),
            labels,
            missing: [true; 4],
            center: t.barycenter,
            cell: None,
        });
    }
    AdjacencyGraph::from_faces(
        GraphKind::Rhombus,
        basis.n(),
        vertex_pos,
        faces,
        None,
        Some(patch),
    )
}
