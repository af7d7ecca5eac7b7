//! Synchronous bootstrap percolation: a tile becomes infected once at least
//! `m` of its counted neighbours are infected, and never heals.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AdjacencyGraph, Label};

/// Whether arcs leaving the generated window see an infected tile.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryPolicy {
    #[default]
    Open,
    Infected,
}

/// Set of `(family, sign)` labels, one bit per label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DirectionSet(u64);

impl DirectionSet {
    fn bit(label: Label) -> u64 {
        1u64 << (label.family as u64 * 2 + (label.sign > 0) as u64)
    }

    pub fn empty() -> Self {
        Self(0)
    }

    pub fn from_labels(labels: impl IntoIterator<Item = Label>) -> Self {
        Self(labels.into_iter().fold(0, |acc, l| acc | Self::bit(l)))
    }

    pub fn insert(&mut self, label: Label) {
        self.0 |= Self::bit(label);
    }

    pub fn contains(&self, label: Label) -> bool {
        self.0 & Self::bit(label) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn labels(&self) -> Vec<Label> {
        (0..64u8)
            .filter(|b| self.0 >> b & 1 == 1)
            .map(|b| Label::new(b / 2, if b % 2 == 1 { 1 } else { -1 }))
            .collect()
    }

    /// Five directions: families 0, 1, 2 only in the `+` sense, families 3 and 4 both ways.
    pub fn a3() -> Self {
        let mut s = Self::from_labels([Label::new(0, 1), Label::new(1, 1), Label::new(2, 1)]);
        for f in [3, 4] {
            s.insert(Label::new(f, 1));
            s.insert(Label::new(f, -1));
        }
        s
    }
}

impl fmt::Display for DirectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .labels()
            .iter()
            .map(|l| format!("{}{}", l.family, if l.sign > 0 { '+' } else { '-' }))
            .collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for DirectionSet {
    type Err = Error;

    /// `a3`, or a comma list of `<family><signs>` with signs among `+`, `-`, `±`.
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("a3") {
            return Ok(Self::a3());
        }
        let mut set = Self::empty();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let split = tok.find(|c: char| !c.is_ascii_digit()).unwrap_or(tok.len());
            let (num, signs) = tok.split_at(split);
            let family: u8 = num
                .parse()
                .ok()
                .filter(|&f| f < 32)
                .ok_or_else(|| Error::InvalidInput(format!("bad direction '{tok}'")))?;
            if signs.is_empty() {
                return Err(Error::InvalidInput(format!("direction '{tok}' has no sign")));
            }
            for c in signs.chars() {
                match c {
                    '+' => set.insert(Label::new(family, 1)),
                    '-' => set.insert(Label::new(family, -1)),
                    '±' => {
                        set.insert(Label::new(family, 1));
                        set.insert(Label::new(family, -1));
                    }
                    _ => return Err(Error::InvalidInput(format!("bad sign in '{tok}'"))),
                }
            }
        }
        if set.is_empty() {
            return Err(Error::InvalidInput("empty direction set".into()));
        }
        Ok(set)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleSpec {
    pub threshold: u32,
    /// `None` counts every neighbour; `Some(A)` only arcs `t -> t'` labelled in `A`.
    pub allowed: Option<DirectionSet>,
}

impl RuleSpec {
    pub fn new(threshold: u32) -> Self {
        Self { threshold, allowed: None }
    }

    pub fn directed(threshold: u32, allowed: DirectionSet) -> Self {
        Self { threshold, allowed: Some(allowed) }
    }

    /// Two-neighbour rule restricted to [`DirectionSet::a3`].
    pub fn f3() -> Self {
        Self::directed(2, DirectionSet::a3())
    }

    fn counts(&self, label: Label) -> bool {
        self.allowed.is_none_or(|a| a.contains(label))
    }

    /// Checks the rule against a graph.
    pub fn validate(&self, graph: &AdjacencyGraph) -> Result<()> {
        if self.threshold == 0 {
            return Err(Error::UnsupportedRule("threshold must be at least 1".into()));
        }
        if let Some(a) = self.allowed {
            if a.is_empty() {
                return Err(Error::UnsupportedRule("empty direction set".into()));
            }
            if !graph.is_rhombus() {
                return Err(Error::UnsupportedRule(
                    "directed rules need edge-direction labels of a rhombus tiling".into(),
                ));
            }
        }
        Ok(())
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.allowed {
            None => write!(f, "m{}", self.threshold),
            Some(a) if a == DirectionSet::a3() && self.threshold == 2 => f.write_str("directed:a3"),
            Some(a) if self.threshold == 2 => write!(f, "directed:{a}"),
            Some(a) => write!(f, "directed:{a}/m{}", self.threshold),
        }
    }
}

impl FromStr for RuleSpec {
    type Err = Error;

    /// `m2`, `m3`, `mK`, `directed:SPEC` or `directed:SPEC/mK`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("bad rule '{s}'"));
        let threshold = |t: &str| -> Result<u32> {
            t.strip_prefix('m').and_then(|n| n.parse().ok()).filter(|&m| m >= 1).ok_or_else(bad)
        };
        if let Some(spec) = s.strip_prefix("directed:") {
            let (dirs, m) = match spec.rsplit_once('/') {
                Some((d, m)) => (d, threshold(m)?),
                None => (spec, 2),
            };
            return Ok(Self::directed(m, dirs.parse()?));
        }
        Ok(Self::new(threshold(s)?))
    }
}

impl Serialize for RuleSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RuleSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    /// 0 healthy, 1 infected.
    pub state: Vec<u8>,
    pub policy: BoundaryPolicy,
}

impl Configuration {
    pub fn new(state: Vec<u8>) -> Self {
        Self { state, policy: BoundaryPolicy::Open }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![0; n])
    }

    pub fn ones(n: usize) -> Self {
        Self::new(vec![1; n])
    }

    pub fn with_policy(mut self, policy: BoundaryPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn len(&self) -> usize {
        self.state.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state.is_empty()
    }

    pub fn is_infected(&self, t: u32) -> bool {
        self.state[t as usize] != 0
    }

    pub fn infected_count(&self) -> usize {
        self.state.iter().filter(|&&x| x != 0).count()
    }

    pub fn infected(&self) -> Vec<u32> {
        (0..self.len() as u32).filter(|&t| self.is_infected(t)).collect()
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &Configuration) -> bool {
        self.state.iter().zip(&other.state).all(|(a, b)| a <= b)
    }

    /// Run-length encoding such as `5:0,3:1`.
    pub fn to_rle(&self) -> String {
        let mut out = Vec::new();
        let mut iter = self.state.iter().peekable();
        while let Some(&v) = iter.next() {
            let mut run = 1;
            while iter.peek() == Some(&&v) {
                iter.next();
                run += 1;
            }
            out.push(format!("{run}:{v}"));
        }
        out.join(",")
    }

    pub fn from_rle(text: &str) -> Result<Self> {
        let mut state = Vec::new();
        for tok in text.split(',').filter(|t| !t.is_empty()) {
            let bad = || Error::InvalidInput(format!("bad run '{tok}'"));
            let (run, v) = tok.split_once(':').ok_or_else(bad)?;
            let run: usize = run.parse().map_err(|_| bad())?;
            let v: u8 = v.parse().ok().filter(|&v| v <= 1).ok_or_else(bad)?;
            state.extend(std::iter::repeat_n(v, run));
        }
        Ok(Self::new(state))
    }
}

fn check(graph: &AdjacencyGraph, config: &Configuration, rule: &RuleSpec) -> Result<()> {
    rule.validate(graph)?;
    if config.len() != graph.len() {
        return Err(Error::InvalidInput(format!(
            "configuration has {} tiles, graph has {}",
            config.len(),
            graph.len()
        )));
    }
    Ok(())
}

/// Counted infected neighbours of `t`, virtual boundary neighbours included.
fn infected_neighbours(graph: &AdjacencyGraph, state: &[u8], policy: BoundaryPolicy, rule: &RuleSpec, t: u32) -> u32 {
    let mut c = graph
        .neighbours(t)
        .iter()
        .filter(|n| state[n.tile as usize] != 0 && rule.counts(n.label))
        .count() as u32;
    if policy == BoundaryPolicy::Infected {
        c += graph.missing_labels(t).iter().filter(|&&l| rule.counts(l)).count() as u32;
    }
    c
}

/// One synchronous update.
pub fn step(graph: &AdjacencyGraph, config: &Configuration, rule: &RuleSpec) -> Result<Configuration> {
    check(graph, config, rule)?;
    Ok(step_unchecked(graph, config, rule))
}

fn step_unchecked(graph: &AdjacencyGraph, config: &Configuration, rule: &RuleSpec) -> Configuration {
    let state = (0..graph.len() as u32)
        .map(|t| {
            let on = config.state[t as usize] != 0
                || infected_neighbours(graph, &config.state, config.policy, rule, t) >= rule.threshold;
            on as u8
        })
        .collect();
    Configuration { state, policy: config.policy }
}

pub fn is_stable(graph: &AdjacencyGraph, config: &Configuration, rule: &RuleSpec) -> Result<bool> {
    check(graph, config, rule)?;
    Ok((0..graph.len() as u32).all(|t| {
        config.state[t as usize] != 0
            || infected_neighbours(graph, &config.state, config.policy, rule, t) < rule.threshold
    }))
}

/// Limit configuration and the number of synchronous rounds that changed something.
pub fn fixpoint(graph: &AdjacencyGraph, config: &Configuration, rule: &RuleSpec) -> Result<(Configuration, u32)> {
    check(graph, config, rule)?;
    let mut out = config.clone();
    let rounds = run(graph, &mut out.state, config.policy, rule, None);
    Ok((out, rounds))
}

/// As [`fixpoint`], also returning the tiles infected in each round.
pub fn fixpoint_trace(
    graph: &AdjacencyGraph,
    config: &Configuration,
    rule: &RuleSpec,
) -> Result<(Configuration, Vec<Vec<u32>>)> {
    check(graph, config, rule)?;
    let mut out = config.clone();
    let mut trace = Vec::new();
    run(graph, &mut out.state, config.policy, rule, Some(&mut trace));
    Ok((out, trace))
}

/// In-place fixpoint for hot loops; the caller has validated the rule.
pub(crate) fn fixpoint_in_place(graph: &AdjacencyGraph, state: &mut [u8], policy: BoundaryPolicy, rule: &RuleSpec) -> u32 {
    run(graph, state, policy, rule, None)
}

/// Worklist evaluation, one frontier per synchronous round.
fn run(
    graph: &AdjacencyGraph,
    state: &mut [u8],
    policy: BoundaryPolicy,
    rule: &RuleSpec,
    mut trace: Option<&mut Vec<Vec<u32>>>,
) -> u32 {
    let n = graph.len();
    let m = rule.threshold;
    let mut count = vec![0u32; n];
    let mut queued = vec![false; n];
    let mut frontier = Vec::new();
    for t in 0..n as u32 {
        if state[t as usize] == 0 {
            count[t as usize] = infected_neighbours(graph, state, policy, rule, t);
            if count[t as usize] >= m {
                queued[t as usize] = true;
                frontier.push(t);
            }
        }
    }
    let mut rounds = 0;
    let mut next = Vec::new();
    while !frontier.is_empty() {
        rounds += 1;
        for &t in &frontier {
            state[t as usize] = 1;
        }
        for &u in &frontier {
            for nb in graph.neighbours(u) {
                let v = nb.tile as usize;
                // v sees u through the reversed arc
                if state[v] == 0 && !queued[v] && rule.counts(nb.label.reversed()) {
                    count[v] += 1;
                    if count[v] >= m {
                        queued[v] = true;
                        next.push(nb.tile);
                    }
                }
            }
        }
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(frontier.clone());
        }
        std::mem::swap(&mut frontier, &mut next);
        next.clear();
    }
    rounds
}

/// Reference implementation: apply [`step`] until nothing changes.
pub fn fixpoint_oracle(graph: &AdjacencyGraph, config: &Configuration, rule: &RuleSpec) -> Result<(Configuration, u32)> {
    check(graph, config, rule)?;
    let mut cur = config.clone();
    let mut rounds = 0;
    loop {
        let next = step_unchecked(graph, &cur, rule);
        if next == cur {
            return Ok((cur, rounds));
        }
        cur = next;
        rounds += 1;
    }
}
