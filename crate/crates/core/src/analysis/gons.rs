use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{winding_number, Vec2};
use crate::graph::AdjacencyGraph;

/// Chordless cycle of tiles with its decomposition into chain segments.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainGon {
    pub tiles: Vec<u32>,
    /// `(family, first index, last index)`; indices wrap around the cycle.
    pub segments: Vec<(u8, usize, usize)>,
    pub length: usize,
    /// At most `2d` segments and no family in more than two of them.
    pub convex: bool,
}

impl ChainGon {
    pub fn new(graph: &AdjacencyGraph, tiles: Vec<u32>) -> Result<Self> {
        let defects = gon_defects(graph, &tiles);
        if !defects.is_empty() {
            return Err(Error::InvalidInput(format!("not a chain polygon: {defects:?}")));
        }
        let segments = segment_runs(graph, &tiles).expect("consecutive tiles are adjacent");
        let d = graph.family_count();
        let mut per_family: HashMap<u8, usize> = HashMap::new();
        for s in &segments {
            *per_family.entry(s.0).or_default() += 1;
        }
        let convex = segments.len() <= 2 * d && per_family.values().all(|&c| c <= 2);
        Ok(Self { length: tiles.len(), tiles, segments, convex })
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GonDefect {
    TooShort(usize),
    Repeated(u32),
    NotAdjacent(usize),
    Chord(usize, usize),
}

/// Ways in which `tiles` fails to be a chordless cycle.
pub fn gon_defects(graph: &AdjacencyGraph, tiles: &[u32]) -> Vec<GonDefect> {
    let m = tiles.len();
    let mut out = Vec::new();
    if m < 3 {
        out.push(GonDefect::TooShort(m));
        return out;
    }
    let mut seen = HashSet::new();
    for &t in tiles {
        if !seen.insert(t) {
            out.push(GonDefect::Repeated(t));
        }
    }
    for i in 0..m {
        if !graph.are_adjacent(tiles[i], tiles[(i + 1) % m]) {
            out.push(GonDefect::NotAdjacent(i));
        }
        for j in i + 2..m {
            if (i, j) != (0, m - 1) && graph.are_adjacent(tiles[i], tiles[j]) {
                out.push(GonDefect::Chord(i, j));
            }
        }
    }
    out
}

/// Maximal runs of equal shared-edge family around a cycle, or `None` when
/// two consecutive tiles are not adjacent.
pub(crate) fn segment_runs(graph: &AdjacencyGraph, tiles: &[u32]) -> Option<Vec<(u8, usize, usize)>> {
    let m = tiles.len();
    if m < 2 {
        return None;
    }
    let fam: Vec<u8> = (0..m)
        .map(|i| graph.label_between(tiles[i], tiles[(i + 1) % m]).map(|l| l.family))
        .collect::<Option<_>>()?;
    let Some(start) = (0..m).find(|&i| fam[(i + m - 1) % m] != fam[i]) else {
        return Some(vec![(fam[0], 0, 0)]);
    };
    let mut runs = Vec::new();
    let mut k = 0;
    while k < m {
        let i = (start + k) % m;
        let mut len = 1;
        while k + len < m && fam[(start + k + len) % m] == fam[i] {
            len += 1;
        }
        runs.push((fam[i], i, (i + len) % m));
        k += len;
    }
    Some(runs)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LengthCount {
    pub n: usize,
    pub all: u64,
    /// Cycles with at most `2d` chain segments.
    pub within_2d: u64,
    pub convex: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GonCounts {
    pub tile: u32,
    pub n_max: usize,
    pub per_length: Vec<LengthCount>,
}

fn check_margin(graph: &AdjacencyGraph, t: u32, n_max: usize) -> Result<Vec<u32>> {
    let dist = graph.distances_from(t);
    if let Some(bad) = (0..graph.len()).find(|&u| dist[u] as usize <= n_max && !graph.is_interior(u as u32)) {
        return Err(Error::Margin(format!(
            "tile {bad} at distance {} from {t} is on the patch boundary (need {n_max})",
            dist[bad]
        )));
    }
    Ok(dist)
}

fn encloses(graph: &AdjacencyGraph, cycle: &[u32], p: Vec2) -> bool {
    let poly: Vec<Vec2> = cycle.iter().map(|&u| graph.center(u)).collect();
    winding_number(&poly, p) != 0
}

/// Does segment `[a, b]` cross the ray `p + s dir`, `s > 0`?
fn crosses_ray(p: Vec2, dir: Vec2, a: Vec2, b: Vec2) -> bool {
    let (a, b) = (a - p, b - p);
    let (sa, sb) = (dir.cross(a), dir.cross(b));
    if (sa > 0.0) == (sb > 0.0) {
        return false;
    }
    // intersection point along the ray
    let s = (a.cross(b)) / (dir.cross(b - a));
    s > 0.0
}

/// All chordless cycles of length `<= n_max` whose barycenter polygon winds
/// around tile `t`.
///
/// Every such cycle crosses a fixed ray from `t`. Crossing edges are numbered;
/// each cycle is found once, from its lowest-numbered crossing edge `(u, v)`,
/// as a chordless path `v -> ... -> u` avoiding lower-numbered crossing edges.
pub fn enclosing_gons(graph: &AdjacencyGraph, t: u32, n_max: usize) -> Result<Vec<ChainGon>> {
    if !graph.is_interior(t) {
        return Err(Error::Margin(format!("tile {t} is on the patch boundary")));
    }
    let dist_t = check_margin(graph, t, n_max)?;
    let near = |u: u32| (dist_t[u as usize] as usize) <= n_max;
    let p = graph.center(t);
    let dir = Vec2::from_angle(std::f64::consts::FRAC_1_PI);

    let mut crossing: Vec<(u32, u32)> = Vec::new();
    for u in 0..graph.len() as u32 {
        if !near(u) || u == t {
            continue;
        }
        for nb in graph.neighbours(u) {
            let v = nb.tile;
            if u < v && v != t && near(v) && crosses_ray(p, dir, graph.center(u), graph.center(v)) {
                crossing.push((u, v));
            }
        }
    }
    crossing.sort_unstable();
    let rank: HashMap<(u32, u32), usize> = crossing.iter().enumerate().map(|(i, &e)| (e, i)).collect();

    let mut out = Vec::new();
    for (i, &(u, v)) in crossing.iter().enumerate() {
        let dist_u = restricted_distances(graph, u, &near, t);
        let forbidden = |a: u32, b: u32| rank.get(&(a.min(b), a.max(b))).is_some_and(|&r| r <= i);
        let mut search = PathSearch {
            graph,
            target: u,
            n_max,
            dist_u: &dist_u,
            near: &near,
            avoid: t,
            forbidden: &forbidden,
            on_path: HashSet::new(),
            path: vec![v],
            found: Vec::new(),
        };
        search.on_path.insert(v);
        search.extend();
        for cycle in search.found {
            if encloses(graph, &cycle, p) {
                out.push(ChainGon::new(graph, cycle)?);
            }
        }
    }
    Ok(out)
}

fn restricted_distances(graph: &AdjacencyGraph, src: u32, near: &dyn Fn(u32) -> bool, avoid: u32) -> Vec<u32> {
    let mut dist = vec![u32::MAX; graph.len()];
    let mut queue = std::collections::VecDeque::new();
    dist[src as usize] = 0;
    queue.push_back(src);
    while let Some(a) = queue.pop_front() {
        for nb in graph.neighbours(a) {
            let b = nb.tile;
            if b != avoid && near(b) && dist[b as usize] == u32::MAX {
                dist[b as usize] = dist[a as usize] + 1;
                queue.push_back(b);
            }
        }
    }
    dist
}

struct PathSearch<'a> {
    graph: &'a AdjacencyGraph,
    target: u32,
    n_max: usize,
    dist_u: &'a [u32],
    near: &'a dyn Fn(u32) -> bool,
    avoid: u32,
    forbidden: &'a dyn Fn(u32, u32) -> bool,
    on_path: HashSet<u32>,
    path: Vec<u32>,
    found: Vec<Vec<u32>>,
}

impl PathSearch<'_> {
    fn extend(&mut self) {
        let last = *self.path.last().unwrap();
        let k = self.path.len();
        for nb in self.graph.neighbours(last) {
            let w = nb.tile;
            if w == self.avoid || !(self.near)(w) || self.on_path.contains(&w) || (self.forbidden)(last, w) {
                continue;
            }
            if w == self.target {
                // closing: u may touch only v (first) and the previous tile
                if k >= 2 && self.path[1..k - 1].iter().all(|&x| !self.graph.are_adjacent(x, w)) {
                    let mut cycle = self.path.clone();
                    cycle.push(w);
                    self.found.push(cycle);
                }
                continue;
            }
            // w becomes p_k: no chord to p_0 .. p_{k-2}
            if self.path[..k - 1].iter().any(|&x| self.graph.are_adjacent(x, w)) {
                continue;
            }
            let d = self.dist_u[w as usize];
            if d == u32::MAX || k + 1 + d as usize > self.n_max {
                continue;
            }
            // an intermediate tile next to u must be followed by u
            self.path.push(w);
            self.on_path.insert(w);
            if self.graph.are_adjacent(w, self.target) {
                if !(self.forbidden)(w, self.target) {
                    self.close_only();
                }
            } else {
                self.extend();
            }
            self.on_path.remove(&w);
            self.path.pop();
        }
    }

    fn close_only(&mut self) {
        let k = self.path.len();
        let w = self.target;
        if self.path[1..k - 1].iter().all(|&x| !self.graph.are_adjacent(x, w)) {
            let mut cycle = self.path.clone();
            cycle.push(w);
            self.found.push(cycle);
        }
    }
}

/// Per-length counts of [`enclosing_gons`].
pub fn enumerate_enclosing_gons(graph: &AdjacencyGraph, t: u32, n_max: usize) -> Result<GonCounts> {
    let gons = enclosing_gons(graph, t, n_max)?;
    Ok(count_by_length(graph, t, n_max, &gons))
}

fn count_by_length(graph: &AdjacencyGraph, t: u32, n_max: usize, gons: &[ChainGon]) -> GonCounts {
    let d = graph.family_count();
    let mut per_length: Vec<LengthCount> = (0..=n_max).map(|n| LengthCount { n, ..Default::default() }).collect();
    for g in gons {
        let c = &mut per_length[g.length];
        c.all += 1;
        c.within_2d += (g.segment_count() <= 2 * d) as u64;
        c.convex += g.convex as u64;
    }
    GonCounts { tile: t, n_max, per_length: per_length.split_off(3.min(n_max + 1)) }
}

/// Reference enumeration: every simple cycle in the ball, each generated once
/// from its smallest tile, then filtered for chords and winding. Exponential;
/// for tests on small `n_max` only.
pub fn brute_force_enclosing_gons(graph: &AdjacencyGraph, t: u32, n_max: usize) -> Result<GonCounts> {
    let dist = check_margin(graph, t, n_max)?;
    let ball: Vec<u32> = (0..graph.len() as u32)
        .filter(|&u| u != t && (dist[u as usize] as usize) <= n_max)
        .collect();
    let in_ball: HashSet<u32> = ball.iter().copied().collect();
    let p = graph.center(t);
    let mut gons = Vec::new();
    for &s in &ball {
        let mut path = vec![s];
        simple_cycles(graph, s, n_max, &in_ball, &mut path, &mut |cycle: &[u32]| {
            // each cycle appears in both directions; keep one
            if cycle[1] < cycle[cycle.len() - 1]
                && gon_defects(graph, cycle).is_empty()
                && encloses(graph, cycle, p)
            {
                gons.push(ChainGon::new(graph, cycle.to_vec()).expect("valid gon"));
            }
        });
    }
    Ok(count_by_length(graph, t, n_max, &gons))
}

fn simple_cycles(
    graph: &AdjacencyGraph,
    s: u32,
    n_max: usize,
    ball: &HashSet<u32>,
    path: &mut Vec<u32>,
    emit: &mut dyn FnMut(&[u32]),
) {
    let last = *path.last().unwrap();
    for nb in graph.neighbours(last) {
        let w = nb.tile;
        if w == s && path.len() >= 3 {
            emit(path);
        } else if w > s && ball.contains(&w) && !path.contains(&w) && path.len() < n_max {
            path.push(w);
            simple_cycles(graph, s, n_max, ball, path, emit);
            path.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_adjacency;
    use crate::multigrid::{generate_patch, DirectionBasis};
    use std::sync::Arc;

    fn graph(basis: DirectionBasis, r: f64) -> AdjacencyGraph {
        build_adjacency(Arc::new(generate_patch(&basis, r).unwrap())).unwrap()
    }

    #[test]
    fn square_ring_is_smallest() {
        let g = graph(DirectionBasis::square(), 12.0);
        let t = g.central_tile();
        let c = enumerate_enclosing_gons(&g, t, 8).unwrap();
        for lc in &c.per_length {
            if lc.n < 8 {
                assert_eq!(lc.all, 0, "length {}", lc.n);
            }
        }
        let eight = c.per_length.iter().find(|l| l.n == 8).unwrap();
        assert_eq!(eight.all, 1);
        assert_eq!(eight.convex, 1);
        let ring = &enclosing_gons(&g, t, 8).unwrap()[0];
        let mut tiles = ring.tiles.clone();
        tiles.sort_unstable();
        assert_eq!(tiles, g.vertex_neighbours(&[t]));
        assert_eq!(ring.segment_count(), 4);
    }

    #[test]
    fn matches_brute_force() {
        let g = graph(DirectionBasis::square(), 14.0);
        let t = g.central_tile();
        assert_eq!(enumerate_enclosing_gons(&g, t, 10).unwrap(), brute_force_enclosing_gons(&g, t, 10).unwrap());
        let g = graph(DirectionBasis::penrose(), 14.0);
        let t = g.central_tile();
        assert_eq!(enumerate_enclosing_gons(&g, t, 9).unwrap(), brute_force_enclosing_gons(&g, t, 9).unwrap());
    }

    #[test]
    fn short_cycles_do_not_enclose() {
        let g = graph(DirectionBasis::penrose(), 10.0);
        let t = g.central_tile();
        let c = enumerate_enclosing_gons(&g, t, 3).unwrap();
        assert!(c.per_length.iter().all(|l| l.all == 0));
    }

    #[test]
    fn margin_is_enforced() {
        let g = graph(DirectionBasis::penrose(), 3.0);
        let r = enumerate_enclosing_gons(&g, g.central_tile(), 12);
        assert!(matches!(r, Err(Error::Margin(_))), "{r:?}");
    }

    #[test]
    fn chord_is_a_defect() {
        let g = graph(DirectionBasis::square(), 12.0);
        let t = g.central_tile();
        let ring = enclosing_gons(&g, t, 8).unwrap().remove(0);
        // splice the centre in: the cycle now has chords through t
        let mut bad = ring.tiles.clone();
        let k = bad.iter().position(|&x| g.are_adjacent(x, t)).unwrap();
        bad.insert(k + 1, t);
        assert!(gon_defects(&g, &bad).iter().any(|d| matches!(d, GonDefect::Chord(..))));
        assert!(ChainGon::new(&g, bad).is_err());
    }
}
