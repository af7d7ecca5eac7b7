use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::AdjacencyGraph;

/// Chains must reach this many tiles beyond an inspected window.
pub const DEFAULT_MARGIN: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ConvexVerdict {
    Yes,
    No { chain: Vec<u32>, family: usize, reason: String },
    Indeterminate { reason: String },
}

impl ConvexVerdict {
    pub fn is_no(&self) -> bool {
        matches!(self, ConvexVerdict::No { .. })
    }
}

/// Checks both chain-convexity conditions on every chain meeting `S` or its
/// vertex neighbourhood:
///
/// 1. the positions of `S` along the chain form an interval;
/// 2. for vertex neighbours `chi_i`, `chi_j` (`i < j`), either the chain misses
///    `S` and every tile strictly between them is an edge neighbour of `S`, or
///    the edge neighbours on the chain are exactly `chi_i`, `chi_j` and the
///    chain meets `S` in exactly the tiles between them.
pub fn check_chain_convex(graph: &AdjacencyGraph, set: &[u32], margin: usize) -> Result<ConvexVerdict> {
    if set.is_empty() {
        return Err(Error::InvalidInput("empty tile set".into()));
    }
    let index = graph.chain_index()?;
    let in_s: HashSet<u32> = set.iter().copied().collect();
    let vn = graph.vertex_neighbours(set);
    let en: HashSet<u32> = graph.edge_neighbours(set).into_iter().collect();
    let in_vn: HashSet<u32> = vn.iter().copied().collect();

    if let Some(&t) = set.iter().chain(&vn).find(|&&t| !graph.is_interior(t)) {
        return Ok(ConvexVerdict::Indeterminate { reason: format!("tile {t} lies on the patch boundary") });
    }

    let chains: BTreeSet<u32> = set
        .iter()
        .chain(&vn)
        .flat_map(|&t| index.slots(t).map(|s| s.1))
        .collect();
    let mut short = None;
    for id in chains {
        let chain = index.chain(id);
        let pos_s: Vec<usize> = positions(&chain.tiles, |t| in_s.contains(&t));
        let pos_v: Vec<usize> = positions(&chain.tiles, |t| in_vn.contains(&t));
        let pos_e: Vec<usize> = positions(&chain.tiles, |t| en.contains(&t));
        let lo = pos_s.iter().chain(&pos_v).copied().min().unwrap();
        let hi = pos_s.iter().chain(&pos_v).copied().max().unwrap();
        let no = |reason: String| {
            Ok(ConvexVerdict::No { chain: chain.tiles.clone(), family: chain.family, reason })
        };

        if let (Some(&a), Some(&b)) = (pos_s.first(), pos_s.last()) {
            if b - a + 1 != pos_s.len() {
                return no(format!("chain meets the set in {} tiles spread over [{a}, {b}]", pos_s.len()));
            }
        }
        if pos_v.len() >= 2 {
            let (i, j) = (pos_v[0], *pos_v.last().unwrap());
            if pos_s.is_empty() {
                if let Some(k) = (i + 1..j).find(|&k| !en.contains(&chain.tiles[k])) {
                    return no(format!("tile at position {k} between vertex neighbours is not an edge neighbour"));
                }
            } else {
                let between: Vec<usize> = (i + 1..j).collect();
                if pos_v.len() > 2 || pos_e != [i, j] || pos_s != between {
                    return no(format!(
                        "chain meets the set at {pos_s:?} but its vertex neighbours sit at {pos_v:?} and edge neighbours at {pos_e:?}"
                    ));
                }
            }
        }
        let room_start = !chain.truncated[0] || lo >= margin;
        let room_end = !chain.truncated[1] || chain.len() - 1 - hi >= margin;
        if short.is_none() && !(room_start && room_end) {
            short = Some(format!("chain of family {} ends within {margin} tiles of the window", chain.family));
        }
    }
    Ok(match short {
        Some(reason) => ConvexVerdict::Indeterminate { reason },
        None => ConvexVerdict::Yes,
    })
}

fn positions(tiles: &[u32], pred: impl Fn(u32) -> bool) -> Vec<usize> {
    tiles.iter().enumerate().filter(|(_, &t)| pred(t)).map(|(k, _)| k).collect()
}
