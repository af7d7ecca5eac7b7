use serde::{Deserialize, Serialize};

use super::{generate_with_lines, DirectionBasis, LineSet, PatchKind, Provenance, TilingPatch};
use crate::error::{Error, Result};

/// A five-direction tiling where families 3 and 4 are dense and families
/// 0, 1 and 2 each contribute a single line. The three single lines cross
/// pairwise in a small triangle whose dual is a three-rhombus "cube".
///
/// The canonical basis numbers the pentagrid directions with stride 2, so
/// families 0, 1, 2 point at 0, 144 and 288 degrees. Those three are not
/// contained in any half-plane, which gives each cube tile exactly one
/// outside neighbour in a direction `+e_0^perp`, `+e_1^perp` or `+e_2^perp`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    pub sparse_index: [i32; 3],
    pub radius: f64,
}

impl BandSpec {
    /// Offsets of the canonical band: the sparse lines bound a triangle of
    /// side ~0.35 around the origin, inside one face of the dense 3/4 grid.
    pub const CANONICAL_OFFSETS: [f64; 5] = [-0.1, 0.0, -0.1, 0.47, 0.61];

    pub fn canonical(radius: f64) -> (DirectionBasis, BandSpec) {
        let basis = DirectionBasis::with_stride(5, 0.0, 2, &Self::CANONICAL_OFFSETS).expect("band basis");
        (basis, BandSpec { sparse_index: [0, 0, 0], radius })
    }
}

pub fn generate_band_tiling(basis: &DirectionBasis, spec: &BandSpec) -> Result<TilingPatch> {
    if basis.n() != 5 {
        return Err(Error::DegenerateBand(format!(
            "band tiling needs 5 directions, got {}",
            basis.n()
        )));
    }
    if !(spec.radius > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let rhs = |m: usize| spec.sparse_index[m] as f64 + basis.gamma(m);
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        if basis.dir(i).cross(basis.dir(j)).abs() < 1e-12 {
            return Err(Error::DegenerateBand(format!("sparse lines {i} and {j} are parallel")));
        }
        let p = basis.intersect(i, rhs(i), j, rhs(j));
        if p.norm() > spec.radius {
            return Err(Error::DegenerateBand(format!(
                "sparse lines {i} and {j} meet outside the window"
            )));
        }
    }
    let p01 = basis.intersect(0, rhs(0), 1, rhs(1));
    if (p01.dot(basis.dir(2)) - rhs(2)).abs() < super::SINGULAR_TOLERANCE {
        return Err(Error::DegenerateBand("the three sparse lines are concurrent".into()));
    }

    let lines = [
        LineSet::Single(spec.sparse_index[0]),
        LineSet::Single(spec.sparse_index[1]),
        LineSet::Single(spec.sparse_index[2]),
        LineSet::Dense,
        LineSet::Dense,
    ];
    let records = generate_with_lines(basis, spec.radius, &lines)?;
    let provenance = Provenance {
        kind: PatchKind::Band { sparse_index: spec.sparse_index },
        radius: spec.radius,
        offsets: basis.gammas().to_vec(),
        integer_offset_sum: basis.offset_sum_is_integer(),
    };
    TilingPatch::from_records(basis.clone(), records, provenance)
}

/// The three tiles whose families are all sparse.
pub fn cube_tiles(patch: &TilingPatch) -> Vec<u32> {
    patch
        .tiles()
        .iter()
        .filter(|t| t.families.1 <= 2)
        .map(|t| t.id)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_band_has_one_cube() {
        let (basis, spec) = BandSpec::canonical(12.0);
        let patch = generate_band_tiling(&basis, &spec).unwrap();
        let cube = cube_tiles(&patch);
        assert_eq!(cube.len(), 3);
        let mut pairs: Vec<_> = cube.iter().map(|&t| patch.tile(t).families).collect();
        pairs.sort();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 2)]);
        for t in patch.tiles() {
            let (i, j) = t.families;
            let sparse = (i <= 2) as u8 + (j <= 2) as u8;
            match sparse {
                0 => assert_eq!((i, j), (3, 4)),
                1 => assert!(i <= 2 && j >= 3),
                _ => assert!(cube.contains(&t.id)),
            }
        }
    }

    #[test]
    fn concurrent_sparse_lines_rejected() {
        // with stride 2, e_0 + e_2 = -tau e_1, so these offsets make the lines meet in one point.
        let tau = (1.0 + 5f64.sqrt()) / 2.0;
        let g1 = 0.2;
        let basis =
            DirectionBasis::with_stride(5, 0.0, 2, &[0.1, g1, -tau * g1 - 0.1, 0.47, 0.61]).unwrap();
        let spec = BandSpec { sparse_index: [0, 0, 0], radius: 10.0 };
        assert!(matches!(generate_band_tiling(&basis, &spec), Err(Error::DegenerateBand(_))));
    }

    #[test]
    fn wrong_dimension_rejected() {
        let spec = BandSpec { sparse_index: [0, 0, 0], radius: 5.0 };
        assert!(matches!(
            generate_band_tiling(&DirectionBasis::square(), &spec),
            Err(Error::DegenerateBand(_))
        ));
    }
}
