//! JSON patch files.
//!
//! Rhombus patches store the basis and the tile records in id order, so a
//! reload reproduces every tile id. Quadrilateral grids store only their size.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    cube_tiles, generate_fortress_grid, grid_with_hole, DirectionBasis, FortressNodes, PatchKind, Provenance, TileRecord,
    TilingPatch,
};
use crate::error::Result;
use crate::graph::{build_adjacency, AdjacencyGraph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisRecord {
    pub n: usize,
    pub phi: f64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub stride: usize,
    pub gammas: Vec<f64>,
}

fn one() -> usize {
    1
}

fn is_one(s: &usize) -> bool {
    *s == 1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PatchFile {
    Rhombus {
        basis: BasisRecord,
        provenance: Provenance,
        tiles: Vec<TileRecord>,
    },
    FortressGrid {
        half_size: i32,
    },
    GridHole {
        half_size: i32,
    },
}

/// A loaded graph; `fortress` is set for fortress grids and `cube` for band tilings.
pub struct LoadedGraph {
    pub graph: AdjacencyGraph,
    pub fortress: Option<FortressNodes>,
    pub cube: Option<Vec<u32>>,
}

impl LoadedGraph {
    pub fn from_patch(patch: TilingPatch) -> Result<Self> {
        let cube = matches!(patch.provenance().kind, PatchKind::Band { .. }).then(|| cube_tiles(&patch));
        Ok(LoadedGraph { graph: build_adjacency(Arc::new(patch))?, fortress: None, cube })
    }
}

impl PatchFile {
    pub fn from_patch(patch: &TilingPatch) -> Self {
        let b = patch.basis();
        PatchFile::Rhombus {
            basis: BasisRecord { n: b.n(), phi: b.phi(), stride: b.stride(), gammas: b.gammas().to_vec() },
            provenance: patch.provenance().clone(),
            tiles: patch.records(),
        }
    }

    pub fn to_patch(&self) -> Result<Option<TilingPatch>> {
        match self {
            PatchFile::Rhombus { basis, provenance, tiles } => {
                let basis = DirectionBasis::with_stride(basis.n, basis.phi, basis.stride, &basis.gammas)?;
                Ok(Some(TilingPatch::from_records(basis, tiles.clone(), provenance.clone())?))
            }
            _ => Ok(None),
        }
    }

    pub fn build_graph(&self) -> Result<LoadedGraph> {
        match self {
            PatchFile::Rhombus { .. } => {
                LoadedGraph::from_patch(self.to_patch()?.expect("rhombus patch"))
            }
            PatchFile::FortressGrid { half_size } => {
                let (graph, nodes) = generate_fortress_grid(*half_size)?;
                Ok(LoadedGraph { graph, fortress: Some(nodes), cube: None })
            }
            PatchFile::GridHole { half_size } => {
                Ok(LoadedGraph { graph: grid_with_hole(*half_size)?, fortress: None, cube: None })
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigrid::{generate_band_tiling, generate_patch, BandSpec};

    fn same(a: &TilingPatch, b: &TilingPatch) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.tiles().iter().zip(b.tiles()) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.families, y.families);
            assert_eq!(x.lines, y.lines);
            assert_eq!(x.base, y.base);
        }
        assert_eq!(a.provenance(), b.provenance());
    }

    #[test]
    fn rhombus_round_trip() {
        let patch = generate_patch(&DirectionBasis::penrose(), 6.0).unwrap();
        let file = PatchFile::from_patch(&patch);
        let back = PatchFile::from_json(&file.to_json().unwrap()).unwrap();
        assert_eq!(file, back);
        same(&patch, &back.to_patch().unwrap().unwrap());
    }

    #[test]
    fn band_round_trip() {
        let (basis, spec) = BandSpec::canonical(8.0);
        let patch = generate_band_tiling(&basis, &spec).unwrap();
        let back = PatchFile::from_json(&PatchFile::from_patch(&patch).to_json().unwrap()).unwrap();
        same(&patch, &back.to_patch().unwrap().unwrap());
    }

    #[test]
    fn quad_round_trip() {
        let file = PatchFile::FortressGrid { half_size: 3 };
        let text = file.to_json().unwrap();
        assert!(text.contains("fortress-grid"));
        let loaded = PatchFile::from_json(&text).unwrap().build_graph().unwrap();
        assert_eq!(loaded.graph.len(), 49 - 1 + 5);
        assert!(loaded.fortress.is_some());
    }
}
