//! Rhombus tilings as duals of multigrids.
//!
//! A multigrid is `N` families of parallel lines `{x : <x, e_m> = k + gamma_m}`.
//! Every intersection of two lines `(i, k_i)` and `(j, k_j)` is dual to one
//! rhombus with edge directions `e_i` and `e_j`. Vertices of the tiling are
//! identified by integer vectors `K` (one coordinate per family) and embedded
//! in the plane as `sum_m K_m e_m`; all combinatorics use `K` only.

mod band;
pub mod io;
mod quad;

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;

pub use band::{cube_tiles, generate_band_tiling, BandSpec};
pub use quad::{generate_fortress_grid, grid_with_hole, FortressNodes};

/// Tolerance for three grid lines meeting in one point.
pub const SINGULAR_TOLERANCE: f64 = 1e-9;

/// Offsets generic enough to avoid singular points, with integer sum (Penrose class).
pub const PENROSE_OFFSETS: [f64; 5] = [0.13, 0.27, 0.04, 0.35, 0.21];

#[derive(Clone, Debug, PartialEq)]
pub struct DirectionBasis {
    phi: f64,
    stride: usize,
    dirs: Vec<Vec2>,
    gammas: Vec<f64>,
    theta: f64,
}

impl DirectionBasis {
    /// Directions sit at `phi + 2πj/N` for odd `N` and `phi + πj/N` for even
    /// `N`, so that no two families are ever parallel.
    pub fn new(n: usize, phi: f64, gammas: &[f64]) -> Result<Self> {
        Self::with_stride(n, phi, 1, gammas)
    }

    /// Family `j` takes the direction of index `stride * j mod N` of the
    /// regular scheme, relabelling the same directions. A stride sharing a
    /// factor with `N` repeats a direction and is rejected as degenerate.
    pub fn with_stride(n: usize, phi: f64, stride: usize, gammas: &[f64]) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidBasis(format!("need at least 2 families, got {n}")));
        }
        if gammas.len() != n {
            return Err(Error::InvalidBasis(format!(
                "expected {n} offsets, got {}",
                gammas.len()
            )));
        }
        if !phi.is_finite() || gammas.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidBasis("non-finite parameter".into()));
        }
        let step = if n % 2 == 1 { TAU / n as f64 } else { PI / n as f64 };
        if stride == 0 {
            return Err(Error::InvalidBasis("stride must be positive".into()));
        }
        let dirs: Vec<Vec2> =
            (0..n).map(|j| Vec2::from_angle(phi + step * ((stride * j) % n) as f64)).collect();
        Self::from_directions(phi, stride, dirs, gammas.to_vec())
    }

    fn from_directions(phi: f64, stride: usize, dirs: Vec<Vec2>, gammas: Vec<f64>) -> Result<Self> {
        let mut theta = f64::INFINITY;
        for i in 0..dirs.len() {
            for j in 0..dirs.len() {
                if i == j {
                    continue;
                }
                let s = dirs[i].dot(dirs[j].perp()).abs();
                if s < 1e-12 {
                    return Err(Error::DegenerateBasis(i.min(j), i.max(j)));
                }
                theta = theta.min(s);
            }
        }
        Ok(Self { phi, stride, dirs, gammas, theta })
    }

    pub fn penrose() -> Self {
        Self::new(5, 0.0, &PENROSE_OFFSETS).expect("penrose basis")
    }

    /// Two orthogonal families with half-integer offsets: the square grid.
    pub fn square() -> Self {
        Self::new(2, 0.0, &[0.5, 0.5]).expect("square basis")
    }

    /// Four families at 45 degrees (Ammann-Beenker directions) with generic offsets.
    pub fn ammann_beenker() -> Self {
        Self::new(4, 0.0, &[0.11, 0.23, 0.37, 0.29]).expect("ammann-beenker basis")
    }

    pub fn n(&self) -> usize {
        self.dirs.len()
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn dir(&self, m: usize) -> Vec2 {
        self.dirs[m]
    }

    /// `e_m` rotated by +90 degrees.
    pub fn perp(&self, m: usize) -> Vec2 {
        self.dirs[m].perp()
    }

    pub fn gamma(&self, m: usize) -> f64 {
        self.gammas[m]
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// Minimum over ordered pairs `i != j` of `|<e_i, e_j^perp>|`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn offset_sum_is_integer(&self) -> bool {
        let s: f64 = self.gammas.iter().sum();
        (s - s.round()).abs() < 1e-9
    }

    pub fn embed(&self, key: &VertexKey) -> Vec2 {
        key.0
            .iter()
            .zip(&self.dirs)
            .fold(Vec2::ZERO, |acc, (&k, &e)| acc + e * k as f64)
    }

    /// Intersection of line `(i, a - gamma_i)` and `(j, b - gamma_j)` given as raw
    /// right-hand sides `a = k_i + gamma_i`, `b = k_j + gamma_j`.
    fn intersect(&self, i: usize, a: f64, j: usize, b: f64) -> Vec2 {
        let (ei, ej) = (self.dirs[i], self.dirs[j]);
        let det = ei.cross(ej);
        Vec2::new((a * ej.y - b * ei.y) / det, (ei.x * b - ej.x * a) / det)
    }
}

/// Exact de Bruijn coordinates of a tiling vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexKey(pub Vec<i32>);

impl VertexKey {
    pub fn offset(&self, m: usize, by: i32) -> VertexKey {
        let mut k = self.0.clone();
        k[m] += by;
        VertexKey(k)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tile {
    pub id: u32,
    /// Edge-direction families, `i < j`.
    pub families: (usize, usize),
    /// Grid-line indices `(k_i, k_j)` of the generating intersection.
    pub lines: (i32, i32),
    pub base: VertexKey,
    pub barycenter: Vec2,
}

impl Tile {
    /// `base`, `base + u_i`, `base + u_i + u_j`, `base + u_j`.
    pub fn vertices(&self) -> [VertexKey; 4] {
        let (i, j) = self.families;
        let a = self.base.offset(i, 1);
        let b = a.offset(j, 1);
        let c = self.base.offset(j, 1);
        [self.base.clone(), a, b, c]
    }

    /// Edge family of edge `k` (from vertex `k` to vertex `k + 1`).
    pub fn edge_family(&self, k: usize) -> usize {
        if k.is_multiple_of(2) {
            self.families.0
        } else {
            self.families.1
        }
    }

    pub fn has_family(&self, m: usize) -> bool {
        self.families.0 == m || self.families.1 == m
    }

    /// Line index of this tile on family `m`, if `m` is one of its families.
    pub fn line_of(&self, m: usize) -> Option<i32> {
        if self.families.0 == m {
            Some(self.lines.0)
        } else if self.families.1 == m {
            Some(self.lines.1)
        } else {
            None
        }
    }
}

/// Minimal description of a tile; everything else is derived.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TileRecord {
    pub families: (usize, usize),
    pub lines: (i32, i32),
    pub base: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PatchKind {
    Multigrid,
    Band { sparse_index: [i32; 3] },
    Manual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(flatten)]
    pub kind: PatchKind,
    pub radius: f64,
    pub offsets: Vec<f64>,
    pub integer_offset_sum: bool,
}

/// A finite piece of a rhombus tiling with its vertex and edge incidence.
#[derive(Clone, Debug)]
pub struct TilingPatch {
    basis: DirectionBasis,
    tiles: Vec<Tile>,
    vertex_keys: Vec<VertexKey>,
    vertex_lookup: HashMap<VertexKey, u32>,
    tile_vertices: Vec<[u32; 4]>,
    vertex_tiles: Vec<Vec<u32>>,
    edge_index: HashMap<(u32, u32), Vec<u32>>,
    interior: Vec<bool>,
    provenance: Provenance,
}

impl TilingPatch {
    /// Builds the incidence structure. No validation beyond shape checks;
    /// malformed patches are rejected when the adjacency graph is built.
    pub fn from_records(
        basis: DirectionBasis,
        records: Vec<TileRecord>,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = basis.n();
        let mut tiles = Vec::with_capacity(records.len());
        for (id, r) in records.into_iter().enumerate() {
            let (i, j) = r.families;
            if i >= j || j >= n || r.base.len() != n {
                return Err(Error::InvalidPatch(format!("malformed tile record {id}")));
            }
            let base = VertexKey(r.base);
            let barycenter = basis.embed(&base) + (basis.dir(i) + basis.dir(j)) * 0.5;
            tiles.push(Tile {
                id: id as u32,
                families: r.families,
                lines: r.lines,
                base,
                barycenter,
            });
        }

        let mut vertex_keys = Vec::new();
        let mut vertex_lookup: HashMap<VertexKey, u32> = HashMap::new();
        let mut vertex_tiles: Vec<Vec<u32>> = Vec::new();
        let mut tile_vertices = Vec::with_capacity(tiles.len());
        for t in &tiles {
            let mut ids = [0u32; 4];
            for (slot, key) in t.vertices().into_iter().enumerate() {
                let id = *vertex_lookup.entry(key.clone()).or_insert_with(|| {
                    vertex_keys.push(key);
                    vertex_tiles.push(Vec::new());
                    (vertex_keys.len() - 1) as u32
                });
                vertex_tiles[id as usize].push(t.id);
                ids[slot] = id;
            }
            tile_vertices.push(ids);
        }

        let mut edge_index: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        for (t, vs) in tile_vertices.iter().enumerate() {
            for k in 0..4 {
                edge_index
                    .entry(edge_key(vs[k], vs[(k + 1) % 4]))
                    .or_default()
                    .push(t as u32);
            }
        }
        let interior = tile_vertices
            .iter()
            .map(|vs| (0..4).all(|k| edge_index[&edge_key(vs[k], vs[(k + 1) % 4])].len() >= 2))
            .collect();

        Ok(Self {
            basis,
            tiles,
            vertex_keys,
            vertex_lookup,
            tile_vertices,
            vertex_tiles,
            edge_index,
            interior,
            provenance,
        })
    }

    pub fn basis(&self) -> &DirectionBasis {
        &self.basis
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn tile(&self, id: u32) -> &Tile {
        &self.tiles[id as usize]
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn is_interior(&self, id: u32) -> bool {
        self.interior[id as usize]
    }

    pub fn interior_mask(&self) -> &[bool] {
        &self.interior
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_keys.len()
    }

    pub fn vertex_key(&self, v: u32) -> &VertexKey {
        &self.vertex_keys[v as usize]
    }

    pub fn vertex_id(&self, key: &VertexKey) -> Option<u32> {
        self.vertex_lookup.get(key).copied()
    }

    /// Tiles incident to the vertex with this key.
    pub fn tiles_at(&self, key: &VertexKey) -> &[u32] {
        self.vertex_id(key)
            .map(|v| self.vertex_tiles[v as usize].as_slice())
            .unwrap_or(&[])
    }

    pub fn vertex_tiles(&self, v: u32) -> &[u32] {
        &self.vertex_tiles[v as usize]
    }

    /// Vertex ids of a tile in [`Tile::vertices`] order.
    pub fn tile_vertex_ids(&self, t: u32) -> [u32; 4] {
        self.tile_vertices[t as usize]
    }

    /// Tiles containing the edge between two vertex ids.
    pub fn edge_tiles(&self, a: u32, b: u32) -> &[u32] {
        self.edge_index
            .get(&edge_key(a, b))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn edges(&self) -> impl Iterator<Item = (&(u32, u32), &Vec<u32>)> {
        self.edge_index.iter()
    }

    pub fn embed_vertex(&self, v: u32) -> Vec2 {
        self.basis.embed(&self.vertex_keys[v as usize])
    }

    pub fn records(&self) -> Vec<TileRecord> {
        self.tiles
            .iter()
            .map(|t| TileRecord {
                families: t.families,
                lines: t.lines,
                base: t.base.0.clone(),
            })
            .collect()
    }

    /// Tile generated by lines `(i, k_i)` and `(j, k_j)`.
    pub fn find_tile(&self, families: (usize, usize), lines: (i32, i32)) -> Option<u32> {
        self.tiles
            .iter()
            .find(|t| t.families == families && t.lines == lines)
            .map(|t| t.id)
    }
}

pub(crate) fn edge_key(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

/// Which lines of a family take part in the grid.
#[derive(Clone, Copy, Debug)]
pub(crate) enum LineSet {
    Dense,
    Single(i32),
}

impl LineSet {
    /// De Bruijn coordinate of a point whose offset-corrected projection is `v`.
    fn coordinate(self, v: f64) -> i32 {
        match self {
            LineSet::Dense => v.ceil() as i32,
            LineSet::Single(k) => {
                if v > k as f64 {
                    k + 1
                } else {
                    k
                }
            }
        }
    }

    /// Line of this set passing within the singular tolerance of `v`, if any.
    fn line_near(self, v: f64) -> Option<i32> {
        match self {
            LineSet::Dense => {
                let r = v.round();
                ((v - r).abs() < SINGULAR_TOLERANCE).then_some(r as i32)
            }
            LineSet::Single(k) => ((v - k as f64).abs() < SINGULAR_TOLERANCE).then_some(k),
        }
    }

    fn indices(self, radius: f64, gamma: f64) -> Vec<i32> {
        match self {
            LineSet::Dense => {
                let lo = (-radius - gamma).ceil() as i32;
                let hi = (radius - gamma).floor() as i32;
                (lo..=hi).collect()
            }
            LineSet::Single(k) => vec![k],
        }
    }
}

pub(crate) fn generate_with_lines(
    basis: &DirectionBasis,
    radius: f64,
    lines: &[LineSet],
) -> Result<Vec<TileRecord>> {
    let n = basis.n();
    let indices: Vec<Vec<i32>> = (0..n).map(|m| lines[m].indices(radius, basis.gamma(m))).collect();
    let mut records = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for &ki in &indices[i] {
                for &kj in &indices[j] {
                    let p = basis.intersect(
                        i,
                        ki as f64 + basis.gamma(i),
                        j,
                        kj as f64 + basis.gamma(j),
                    );
                    if p.norm() > radius {
                        continue;
                    }
                    let mut base = vec![0i32; n];
                    for m in 0..n {
                        if m == i {
                            base[m] = ki;
                        } else if m == j {
                            base[m] = kj;
                        } else {
                            let v = p.dot(basis.dir(m)) - basis.gamma(m);
                            if let Some(km) = lines[m].line_near(v) {
                                return Err(Error::SingularGrid((i, ki), (j, kj), (m, km)));
                            }
                            base[m] = lines[m].coordinate(v);
                        }
                    }
                    records.push(TileRecord {
                        families: (i, j),
                        lines: (ki, kj),
                        base,
                    });
                }
            }
        }
    }
    records.sort();
    Ok(records)
}

/// All tiles dual to line intersections within `radius` of the origin.
pub fn generate_patch(basis: &DirectionBasis, radius: f64) -> Result<TilingPatch> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    let lines = vec![LineSet::Dense; basis.n()];
    let records = generate_with_lines(basis, radius, &lines)?;
    let provenance = Provenance {
        kind: PatchKind::Multigrid,
        radius,
        offsets: basis.gammas().to_vec(),
        integer_offset_sum: basis.offset_sum_is_integer(),
    };
    TilingPatch::from_records(basis.clone(), records, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: angle-difference formula over all ordered pairs.
    fn theta_oracle(n: usize) -> f64 {
        let step = if n % 2 == 1 { TAU / n as f64 } else { PI / n as f64 };
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    best = best.min((step * (i as f64 - j as f64)).sin().abs());
                }
            }
        }
        best
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn theta_values() {
        let sq = DirectionBasis::new(2, 0.0, &[0.5, 0.5]).unwrap();
        assert!((sq.theta() - 1.0).abs() < 1e-12);
        let p = DirectionBasis::new(5, 0.0, &[0.0; 5]).unwrap();
        assert!((p.theta() - 36f64.to_radians().sin()).abs() < 1e-12);
        assert!((p.theta() - 0.587785).abs() < 1e-6);
        assert!((p.theta() - theta_oracle(5)).abs() < 1e-12);
        let ab = DirectionBasis::new(4, 0.0, &[0.0; 4]).unwrap();
        assert!((ab.theta() - 0.707107).abs() < 1e-6);
        assert!((ab.theta() - theta_oracle(4)).abs() < 1e-12);
    }

    #[test]
    fn basis_errors() {
        assert!(matches!(DirectionBasis::new(1, 0.0, &[0.0]), Err(Error::InvalidBasis(_))));
        assert!(matches!(DirectionBasis::new(3, 0.0, &[0.0]), Err(Error::InvalidBasis(_))));
        let dirs = vec![Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0)];
        assert!(matches!(
            DirectionBasis::from_directions(0.0, 1, dirs, vec![0.0, 0.0]),
            Err(Error::DegenerateBasis(0, 1))
        ));
    }

    #[test]
    fn unit_directions() {
        for n in 2..9 {
            let b = DirectionBasis::new(n, 0.3, &vec![0.1; n]).unwrap();
            for m in 0..n {
                assert!((b.dir(m).norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn penrose_sum_rule_recorded() {
        assert!(DirectionBasis::penrose().offset_sum_is_integer());
        let b = DirectionBasis::new(5, 0.0, &[0.1, 0.2, 0.3, 0.1, 0.05]).unwrap();
        assert!(!b.offset_sum_is_integer());
        let patch = generate_patch(&b, 6.0).unwrap();
        assert!(!patch.provenance().integer_offset_sum);
        let patch = generate_patch(&DirectionBasis::penrose(), 6.0).unwrap();
        assert!(patch.provenance().integer_offset_sum);
    }

    #[test]
    fn square_grid_is_unit_squares() {
        let patch = generate_patch(&DirectionBasis::square(), 3.0).unwrap();
        assert!(!patch.is_empty());
        for t in patch.tiles() {
            let (k0, k1) = t.lines;
            assert_eq!(t.base.0, vec![k0, k1]);
            let c = t.barycenter;
            assert!((c.x - (k0 as f64 + 0.5)).abs() < 1e-12);
            assert!((c.y - (k1 as f64 + 0.5)).abs() < 1e-12);
        }
        let interior = patch.tiles().iter().filter(|t| patch.is_interior(t.id)).count();
        assert!(interior > 0);
    }

    #[test]
    fn tile_vertices_are_rhombi() {
        let patch = generate_patch(&DirectionBasis::penrose(), 6.0).unwrap();
        let b = patch.basis();
        for t in patch.tiles() {
            let vs: Vec<Vec2> = t.vertices().iter().map(|k| b.embed(k)).collect();
            let (i, j) = t.families;
            let steps = [b.dir(i), b.dir(j), -b.dir(i), -b.dir(j)];
            for k in 0..4 {
                let d = vs[(k + 1) % 4] - vs[k];
                assert!((d - steps[k]).norm() < 1e-9);
                assert!((d.norm() - 1.0).abs() < 1e-9);
            }
            let centroid = (vs[0] + vs[1] + vs[2] + vs[3]) * 0.25;
            assert!((centroid - t.barycenter).norm() < 1e-9);
        }
    }

    #[test]
    fn singular_pentagrid_detected() {
        let b = DirectionBasis::new(5, 0.0, &[0.0; 5]).unwrap();
        match generate_patch(&b, 10.0) {
            Err(Error::SingularGrid(a, c, d)) => {
                let fams = [a.0, c.0, d.0];
                assert!(fams[0] != fams[1] && fams[1] != fams[2] && fams[0] != fams[2]);
            }
            other => panic!("expected singular grid, got {other:?}"),
        }
    }

    #[test]
    fn symmetric_fifth_offsets_are_regular() {
        let b = DirectionBasis::new(5, 0.0, &[0.2; 5]).unwrap();
        assert!(generate_patch(&b, 10.0).is_ok());
    }

    #[test]
    fn penrose_vertex_stars() {
        let patch = generate_patch(&DirectionBasis::penrose(), 10.0).unwrap();
        let mut checked = 0;
        for v in 0..patch.vertex_count() as u32 {
            let ts = patch.vertex_tiles(v);
            if ts.iter().all(|&t| patch.is_interior(t)) {
                assert!((3..=7).contains(&ts.len()), "vertex star of size {}", ts.len());
                checked += 1;
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn regeneration_is_identical() {
        let b = DirectionBasis::penrose();
        let a = generate_patch(&b, 8.0).unwrap();
        let c = generate_patch(&b, 8.0).unwrap();
        assert_eq!(a.records(), c.records());
    }
}
