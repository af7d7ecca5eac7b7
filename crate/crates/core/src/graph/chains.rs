use std::collections::HashMap;

use serde::Serialize;

use super::{AdjacencyGraph, Label};
use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Maximal run of tiles joined by edges of one family, ordered along `normal`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chain {
    pub family: usize,
    /// Grid line index shared by every tile of the chain.
    pub line: i32,
    pub tiles: Vec<u32>,
    pub normal: Vec2,
    /// `[start, end]`: the end tile lies on the patch boundary.
    pub truncated: [bool; 2],
}

impl Chain {
    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn position(&self, t: u32) -> Option<usize> {
        self.tiles.iter().position(|&x| x == t)
    }
}

fn step(graph: &AdjacencyGraph, t: u32, label: Label) -> Option<u32> {
    graph.neighbours(t).iter().find(|n| n.label == label).map(|n| n.tile)
}

pub fn chain_through(graph: &AdjacencyGraph, tile: u32, family: usize) -> Result<Chain> {
    let patch = graph.require_rhombus()?;
    let t = patch.tile(tile);
    let line = t.line_of(family).ok_or(Error::WrongFamily { tile, family })?;
    let fwd = Label::new(family as u8, 1);
    let back = fwd.reversed();

    let mut start = tile;
    let mut guard = 0;
    while let Some(prev) = step(graph, start, back) {
        start = prev;
        guard += 1;
        assert!(guard <= graph.len(), "chain walk does not terminate");
    }
    let mut tiles = vec![start];
    let mut cur = start;
    while let Some(next) = step(graph, cur, fwd) {
        tiles.push(next);
        cur = next;
        assert!(tiles.len() <= graph.len(), "chain walk does not terminate");
    }
    let truncated = [
        !graph.is_interior(tiles[0]),
        !graph.is_interior(*tiles.last().unwrap()),
    ];
    Ok(Chain { family, line, tiles, normal: patch.basis().perp(family), truncated })
}

/// All chains of a rhombus graph, with a per-tile lookup.
#[derive(Debug)]
pub struct ChainIndex {
    chains: Vec<Chain>,
    /// Per tile: `(family, chain, position)` for each of its two families.
    slots: Vec<[(usize, u32, u32); 2]>,
}

impl ChainIndex {
    pub(crate) fn build(graph: &AdjacencyGraph) -> Self {
        let patch = graph.patch().expect("rhombus graph");
        let mut chains = Vec::new();
        let mut slots: Vec<[(usize, u32, u32); 2]> = patch
            .tiles()
            .iter()
            .map(|t| [(t.families.0, u32::MAX, 0), (t.families.1, u32::MAX, 0)])
            .collect();
        for t in 0..graph.len() as u32 {
            for k in 0..2 {
                let (family, chain, _) = slots[t as usize][k];
                if chain != u32::MAX {
                    continue;
                }
                let c = chain_through(graph, t, family).expect("tile family");
                let id = chains.len() as u32;
                for (pos, &u) in c.tiles.iter().enumerate() {
                    let slot = slots[u as usize]
                        .iter_mut()
                        .find(|s| s.0 == family)
                        .expect("chain tile carries the family");
                    slot.1 = id;
                    slot.2 = pos as u32;
                }
                chains.push(c);
            }
        }
        Self { chains, slots }
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn chain(&self, id: u32) -> &Chain {
        &self.chains[id as usize]
    }

    /// `(chain id, position)` of `tile` in its chain of `family`.
    pub fn locate(&self, tile: u32, family: usize) -> Option<(u32, u32)> {
        self.slots[tile as usize]
            .iter()
            .find(|s| s.0 == family)
            .map(|s| (s.1, s.2))
    }

    /// Both chains through `tile` as `(family, chain, position)`.
    pub fn slots(&self, tile: u32) -> [(usize, u32, u32); 2] {
        self.slots[tile as usize]
    }
}

pub fn all_chains(graph: &AdjacencyGraph) -> Result<Vec<Chain>> {
    Ok(graph.chain_index()?.chains().to_vec())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum CrossingViolation {
    /// Two distinct chains share more than one tile.
    MultipleCrossing { chains: (u32, u32), shared: usize },
    /// Two chains of the same family share a tile.
    ParallelOverlap { chains: (u32, u32), tile: u32 },
    /// A shared tile does not carry both chain families.
    WrongShape { chains: (u32, u32), tile: u32 },
    /// A tile occurs twice in one chain.
    SelfCrossing { chain: u32, tile: u32 },
    /// Chain lengths do not add up to twice the tile count.
    Partition { total: usize, expected: usize },
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ChainCrossingReport {
    pub chains: usize,
    pub crossing_pairs: usize,
    pub violations: Vec<CrossingViolation>,
}

impl ChainCrossingReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_chain_crossing(graph: &AdjacencyGraph) -> Result<ChainCrossingReport> {
    let patch = graph.require_rhombus()?;
    let chains = all_chains(graph)?;
    let mut report = ChainCrossingReport { chains: chains.len(), ..Default::default() };

    let total: usize = chains.iter().map(Chain::len).sum();
    if total != 2 * graph.len() {
        report
            .violations
            .push(CrossingViolation::Partition { total, expected: 2 * graph.len() });
    }

    // Recount memberships from the chain lists themselves rather than the index.
    let mut member: Vec<Vec<u32>> = vec![Vec::new(); graph.len()];
    for (id, c) in chains.iter().enumerate() {
        let mut seen = std::collections::HashSet::new();
        for &t in &c.tiles {
            if !seen.insert(t) {
                report
                    .violations
                    .push(CrossingViolation::SelfCrossing { chain: id as u32, tile: t });
            }
            member[t as usize].push(id as u32);
        }
    }
    let mut shared: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for (t, ids) in member.iter().enumerate() {
        for a in 0..ids.len() {
            for b in a + 1..ids.len() {
                let key = (ids[a].min(ids[b]), ids[a].max(ids[b]));
                if key.0 != key.1 {
                    shared.entry(key).or_default().push(t as u32);
                }
            }
        }
    }
    let mut keys: Vec<_> = shared.keys().copied().collect();
    keys.sort_unstable();
    report.crossing_pairs = keys.len();
    for key in keys {
        let tiles = &shared[&key];
        let (fa, fb) = (chains[key.0 as usize].family, chains[key.1 as usize].family);
        if fa == fb {
            report
                .violations
                .push(CrossingViolation::ParallelOverlap { chains: key, tile: tiles[0] });
            continue;
        }
        if tiles.len() > 1 {
            report
                .violations
                .push(CrossingViolation::MultipleCrossing { chains: key, shared: tiles.len() });
        }
        for &t in tiles {
            let fams = patch.tile(t).families;
            if (fams.0.min(fams.1), fams.0.max(fams.1)) != (fa.min(fb), fa.max(fb)) {
                report.violations.push(CrossingViolation::WrongShape { chains: key, tile: t });
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaViolation {
    pub chain: u32,
    pub position: usize,
    pub projection: f64,
}

/// Consecutive chain steps whose projection on the chain normal is below theta.
pub fn theta_violations(graph: &AdjacencyGraph) -> Result<Vec<ThetaViolation>> {
    let patch = graph.require_rhombus()?;
    let theta = patch.basis().theta();
    let mut out = Vec::new();
    for (id, c) in graph.chain_index()?.chains().iter().enumerate() {
        for (k, w) in c.tiles.windows(2).enumerate() {
            let proj = (graph.center(w[1]) - graph.center(w[0])).dot(c.normal);
            if proj < theta - 1e-9 {
                out.push(ThetaViolation { chain: id as u32, position: k, projection: proj });
            }
        }
    }
    Ok(out)
}
