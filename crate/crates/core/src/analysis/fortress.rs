use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::RuleSpec;
use crate::error::{Error, Result};
use crate::graph::AdjacencyGraph;

/// Every tile of `set` has at most `m - 1` counted neighbours outside `set`,
/// so the set stays healthy when everything around it is infected.
pub fn is_fortress(graph: &AdjacencyGraph, set: &[u32], rule: &RuleSpec) -> Result<bool> {
    rule.validate(graph)?;
    if let Some(&t) = set.iter().find(|&&t| !graph.is_interior(t)) {
        return Err(Error::Indeterminate(format!("tile {t} lies on the patch boundary")));
    }
    let inside: HashSet<u32> = set.iter().copied().collect();
    Ok(set.iter().all(|&t| outside_pressure(graph, t, rule, |u| inside.contains(&u)) < rule.threshold))
}

fn outside_pressure(graph: &AdjacencyGraph, t: u32, rule: &RuleSpec, inside: impl Fn(u32) -> bool) -> u32 {
    graph
        .neighbours(t)
        .iter()
        .filter(|n| !inside(n.tile) && rule.allowed.is_none_or(|a| a.contains(n.label)))
        .count() as u32
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FortressReport {
    /// Sorted tile sets, in lexicographic order.
    pub fortresses: Vec<Vec<u32>>,
    /// Seeds whose ball of radius `kmax` reaches the patch boundary.
    pub skipped_seeds: Vec<u32>,
    pub sets_examined: u64,
}

/// All connected fortresses of at most `kmax` tiles containing a seed.
///
/// Sets are grown from a seed by adding frontier tiles in order; a tile passed
/// over at some level is excluded from that whole subtree, so every connected
/// set is produced exactly once. Earlier seeds are excluded from later seeds'
/// searches, so sets with several seeds are reported once.
pub fn fortress_search(graph: &AdjacencyGraph, seeds: &[u32], kmax: usize, rule: &RuleSpec) -> Result<FortressReport> {
    rule.validate(graph)?;
    if kmax == 0 {
        return Err(Error::InvalidInput("kmax must be at least 1".into()));
    }
    let seeds: Vec<u32> = seeds.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let results: Vec<(u32, Option<(Vec<Vec<u32>>, u64)>)> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let ball_ok = graph.ball(s, kmax as u32).iter().all(|&t| graph.is_interior(t));
            if !ball_ok {
                return (s, None);
            }
            let mut search = Search::new(graph, rule, kmax);
            for &earlier in &seeds[..i] {
                search.mark[earlier as usize] = EXCLUDED;
            }
            search.mark[s as usize] = IN_SET;
            search.set.push(s);
            search.grow();
            (s, Some((search.found, search.examined)))
        })
        .collect();

    let mut report = FortressReport::default();
    for (s, r) in results {
        match r {
            None => report.skipped_seeds.push(s),
            Some((found, examined)) => {
                report.fortresses.extend(found);
                report.sets_examined += examined;
            }
        }
    }
    report.fortresses.sort();
    Ok(report)
}

const FREE: u8 = 0;
const IN_SET: u8 = 1;
const EXCLUDED: u8 = 2;

struct Search<'a> {
    graph: &'a AdjacencyGraph,
    rule: &'a RuleSpec,
    kmax: usize,
    mark: Vec<u8>,
    set: Vec<u32>,
    found: Vec<Vec<u32>>,
    examined: u64,
}

impl<'a> Search<'a> {
    fn new(graph: &'a AdjacencyGraph, rule: &'a RuleSpec, kmax: usize) -> Self {
        Self { graph, rule, kmax, mark: vec![FREE; graph.len()], set: Vec::new(), found: Vec::new(), examined: 0 }
    }

    fn grow(&mut self) {
        self.examined += 1;
        let mark = &self.mark;
        if self
            .set
            .iter()
            .all(|&t| outside_pressure(self.graph, t, self.rule, |u| mark[u as usize] == IN_SET) < self.rule.threshold)
        {
            let mut s = self.set.clone();
            s.sort_unstable();
            self.found.push(s);
        }
        if self.set.len() == self.kmax {
            return;
        }
        let mut frontier: Vec<u32> = self
            .set
            .iter()
            .flat_map(|&t| self.graph.neighbours(t).iter().map(|n| n.tile))
            .filter(|&u| self.mark[u as usize] == FREE)
            .collect();
        frontier.sort_unstable();
        frontier.dedup();
        for &c in &frontier {
            self.mark[c as usize] = IN_SET;
            self.set.push(c);
            self.grow();
            self.set.pop();
            // c stays excluded for the remaining siblings
            self.mark[c as usize] = EXCLUDED;
        }
        for &c in &frontier {
            self.mark[c as usize] = FREE;
        }
    }
}
